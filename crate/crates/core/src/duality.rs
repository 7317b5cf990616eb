//! Primal functionals on adapted step paths, their conjugates, and the
//! interchange rules, each paired with an exhaustive lattice oracle.
//!
//! # Separable reduction
//!
//! For a step path `y` with grid values `v_i` the pairing reads
//! `Σ v_i u_i + Σ_{i≥1} y_{t_i−} ũ_i`, and `ũ_0` multiplies `y_{0−} = 0`.
//! Inside continuous time a càdlàg path may move just before `t_{i+1}`, so the
//! value `v_i` carried at `t_i` and the left limit `w_{i+1} = y_{t_{i+1}−}` are
//! separate decision variables. Both are realized by step paths on the grid
//! refined once: the first half of each cell carries `v_i`, the second `w_{i+1}`.
//! Every functional then splits into independent problems, one per
//! (partition cell, slot, kind):
//!
//! * `v`-problems over `partitions[i]` cells, constrained to `P_i ∩ I_i` (and
//!   the cell value of `S̃`), with objective `Σ_ω p_ω (v u_i − m_i h_i(v))`;
//! * `w`-problems over `partitions[i−1]` cells, constrained to
//!   `I_{i−1} ∩ S̃_i` (and the cell value of `S̃`), with objective
//!   `Σ_ω p_ω (w ũ_i − m̃_i h̃_i(w))`;
//! * a constant for slot 0, `−Σ_ω p_ω m̃_0 h̃_0(0)`, feasible iff `0 ∈ S̃_0`.
//!
//! The conjugate formula evaluates the same problems in closed form through
//! `h*` and `h̃*`; the lattice oracle enumerates them.

use std::collections::BTreeSet;

use num::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::{ext_sum, ser_q, sign, Ext, Q};
use crate::plconvex::{PLConvex, RInterval};
use crate::scenario::{expected_pairing, paste, predictable_atoms, RandomIntegrand, RandomMeasure, RandomPath, RandomSetMap, ScenarioTree};
use crate::setmaps::SetMap;
use crate::timegrid::{eval_i, eval_j, GridMeasure, StepPath, TimeGrid};

pub const DEFAULT_BUDGET: u128 = 10_000_000;
pub const BUDGET_ENV: &str = "CADLAG_CONVEX_BUDGET";

/// Lattice-point cap for the brute-force oracles.
pub fn budget_cap() -> u128 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub tree: ScenarioTree,
    pub grid: TimeGrid,
    pub h: RandomIntegrand,
    /// `None` stands for `h̃ = δ_{S̃}`.
    pub htilde: Option<RandomIntegrand>,
    pub mu: RandomMeasure,
    pub mutilde: RandomMeasure,
    pub s: RandomSetMap,
    pub stilde: RandomSetMap,
}

impl Instance {
    /// Shape validation only; measurability is reported by [`Instance::assumptions`]
    /// and enforced where an operation requires it.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        tree: ScenarioTree,
        grid: TimeGrid,
        h: RandomIntegrand,
        htilde: Option<RandomIntegrand>,
        mu: RandomMeasure,
        mutilde: RandomMeasure,
        s: Option<RandomSetMap>,
        stilde: Option<RandomSetMap>,
    ) -> Result<Instance> {
        let n = tree.len();
        if tree.slots() != grid.len() {
            return Err(Error::Grid(format!(
                "tree has {} partitions for {} grid times",
                tree.slots(),
                grid.len()
            )));
        }
        let slots_ok = |len: usize, what: &str| {
            if len == grid.len() {
                Ok(())
            } else {
                Err(Error::Grid(format!("{what} has {len} slots on a grid of {}", grid.len())))
            }
        };
        let count_ok = |count: usize| {
            if count == n {
                Ok(())
            } else {
                Err(Error::Dimension { expected: n, got: count })
            }
        };
        count_ok(h.count())?;
        slots_ok(h.len(), "integrand h")?;
        if let Some(ht) = &htilde {
            count_ok(ht.count())?;
            slots_ok(ht.len(), "integrand h~")?;
        }
        for m in [&mu, &mutilde] {
            count_ok(m.measures().len())?;
            if m.grid() != &grid {
                return Err(Error::Grid("measure grid differs from the instance grid".into()));
            }
            m.check_nonnegative()?;
        }
        let s = match s {
            Some(s) => s,
            None => RandomSetMap::new(
                (0..n)
                    .map(|w| SetMap::regular(&grid, h.scenario(w).iter().map(PLConvex::dom).collect()))
                    .collect::<Result<_>>()?,
            )?,
        };
        let stilde = stilde.unwrap_or_else(|| s.vec_map());
        for m in [&s, &stilde] {
            count_ok(m.maps().len())?;
            if m.grid() != &grid {
                return Err(Error::Grid("set map grid differs from the instance grid".into()));
            }
        }
        Ok(Instance {
            tree,
            grid,
            h,
            htilde,
            mu,
            mutilde,
            s,
            stilde,
        })
    }

    /// Single-scenario instance.
    pub fn deterministic(
        grid: &TimeGrid,
        h: Vec<PLConvex>,
        htilde: Option<Vec<PLConvex>>,
        mu: GridMeasure,
        mutilde: GridMeasure,
        s: Option<SetMap>,
    ) -> Result<Instance> {
        use crate::scenario::Flag;
        let tree = ScenarioTree::deterministic(grid.len());
        Instance::new(
            tree.clone(),
            grid.clone(),
            RandomIntegrand::deterministic(&tree, h, Flag::Optional),
            htilde.map(|ht| RandomIntegrand::deterministic(&tree, ht, Flag::Predictable)),
            RandomMeasure::deterministic(&tree, mu),
            RandomMeasure::deterministic(&tree, mutilde),
            s.map(|m| RandomSetMap::deterministic(&tree, m)),
            None,
        )
    }

    pub fn scenarios(&self) -> usize {
        self.tree.len()
    }

    pub fn last(&self) -> usize {
        self.grid.cells()
    }

    /// The integrand paired with `y_{t_i−}`: `h̃_i` (or `δ_{S̃_i}`), and at
    /// slot 0 its restriction to `{0} ∩ S̃_0`; `None` when that restriction is empty.
    pub fn left_integrand(&self, w: usize, i: usize) -> Option<PLConvex> {
        let point = &self.stilde.map(w).point_vals()[i];
        let base = match &self.htilde {
            Some(ht) => ht.at(w, i).clone(),
            None => PLConvex::indicator(point).ok()?,
        };
        if i == 0 {
            base.restrict(&RInterval::point(Q::zero()).intersect(point))
        } else {
            Some(base)
        }
    }

    /// Feasible set of `v_i`: attainable values of `S` within the cell value of `S̃`.
    pub fn v_constraint(&self, w: usize, i: usize) -> RInterval {
        let a = self.s.map(w).attainable_at(i);
        if i < self.last() {
            a.intersect(&self.stilde.map(w).open_vals()[i])
        } else {
            a
        }
    }

    /// Feasible set of `w_i = y_{t_i−}` for `i ≥ 1`.
    pub fn w_constraint(&self, w: usize, i: usize) -> RInterval {
        self.s.map(w).open_vals()[i - 1]
            .intersect(&self.stilde.map(w).point_vals()[i])
            .intersect(&self.stilde.map(w).open_vals()[i - 1])
    }

    /// Largest breakpoint, domain bound or constraint endpoint in absolute value.
    pub fn magnitude(&self) -> Q {
        let mut m = Q::zero();
        for w in 0..self.scenarios() {
            for i in 0..self.grid.len() {
                m = m.max(self.h.at(w, i).magnitude());
                if let Some(ht) = &self.htilde {
                    m = m.max(ht.at(w, i).magnitude());
                }
            }
            m = m.max(self.s.map(w).magnitude()).max(self.stilde.map(w).magnitude());
        }
        m
    }

    /// `B = 2·max(magnitude, 1)`.
    pub fn default_b(&self) -> Q {
        Q::from_integer(2.into()) * self.magnitude().max(Q::from_integer(1.into()))
    }

    pub fn check_flags(&self) -> Result<()> {
        self.h.check_adapted(&self.tree)?;
        if let Some(ht) = &self.htilde {
            ht.check_predictable(&self.tree)?;
        }
        self.mu.check_adapted(&self.tree)?;
        self.mutilde.check_predictable(&self.tree)?;
        self.s.check_adapted(&self.tree)?;
        self.stilde.check_predictable(&self.tree)
    }

    /// Grid refined by `factor`; every functional value is preserved.
    pub fn refine(&self, factor: usize) -> Instance {
        Instance {
            tree: self.tree.refine(factor),
            grid: self.grid.refine(factor),
            h: self.h.refine_side(factor, false),
            htilde: self.htilde.as_ref().map(|h| h.refine_side(factor, true)),
            mu: self.mu.refine(factor),
            mutilde: self.mutilde.refine(factor),
            s: self.s.refine(factor),
            stilde: self.stilde.refine(factor),
        }
    }

    /// Same constraints, zero integrands: the primal becomes `δ_{D(S)}` and
    /// its conjugate the support function of `D(S)`.
    pub fn support_instance(&self) -> Instance {
        use crate::scenario::Flag;
        Instance {
            h: RandomIntegrand::constant(&self.tree, PLConvex::affine(Q::zero(), Q::zero()), Flag::Optional),
            htilde: None,
            ..self.clone()
        }
    }

    pub fn assumptions(&self) -> AssumptionReport {
        let mut checks = Vec::new();
        let tree = &self.tree;
        let flag = |name: &str, r: Result<()>| AssumptionCheck::from_result(name, r);
        checks.push(flag("h-optional", self.h.check_adapted(tree)));
        if let Some(ht) = &self.htilde {
            checks.push(flag("htilde-predictable", ht.check_predictable(tree)));
        }
        checks.push(flag("mu-optional", self.mu.check_adapted(tree)));
        checks.push(flag("mutilde-predictable", self.mutilde.check_predictable(tree)));
        checks.push(flag("S-optional", self.s.check_adapted(tree)));
        checks.push(flag("Stilde-predictable", self.stilde.check_predictable(tree)));

        let ids = self.tree.ids();
        let first = |pred: &dyn Fn(usize, usize) -> bool, from: usize| -> Option<String> {
            for w in 0..self.scenarios() {
                for i in from..self.grid.len() {
                    if !pred(w, i) {
                        return Some(format!("scenario {} slot {i}", ids[w]));
                    }
                }
            }
            None
        };
        let named = |name: &str, fail: Option<String>| AssumptionCheck {
            name: name.into(),
            holds: fail.is_none(),
            detail: fail.unwrap_or_default(),
        };

        checks.push(named(
            "S-domain",
            first(&|w, i| self.s.map(w).point_vals()[i] == self.h.at(w, i).dom(), 0),
        ));
        let michael: Option<String> = (0..self.scenarios()).find_map(|w| {
            self.s
                .map(w)
                .first_right_isc_violation()
                .map(|i| format!("scenario {} slot {i}", ids[w]))
        });
        checks.push(named("michael", michael));
        checks.push(named(
            "Stilde-contains-vec-S",
            first(
                &|w, i| {
                    let s = self.s.map(w);
                    let st = self.stilde.map(w);
                    (i == 0 || s.open_vals()[i - 1].is_subset(&st.point_vals()[i]))
                        && (i == self.last() || s.open_vals()[i].is_subset(&st.open_vals()[i]))
                },
                0,
            ),
        ));
        checks.push(named(
            "htilde-domain",
            first(
                &|w, i| {
                    let cell = &self.s.map(w).open_vals()[i - 1];
                    match &self.htilde {
                        None => self.stilde.map(w).point_vals()[i].is_subset(cell),
                        Some(ht) => {
                            let dom = ht.at(w, i).dom();
                            dom.is_subset(cell) && (self.mutilde.atom(w, i).is_positive() || dom == *cell)
                        }
                    }
                },
                1,
            ),
        ));
        checks.push(named(
            "origin",
            (0..self.scenarios())
                .find(|&w| self.left_integrand(w, 0).is_none())
                .map(|w| format!("scenario {}", ids[w])),
        ));
        checks.push(named(
            "nonempty",
            (0..self.scenarios())
                .find(|&w| !self.s.map(w).selections_exist())
                .map(|w| format!("scenario {}", ids[w])),
        ));
        AssumptionReport { checks }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssumptionCheck {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

impl AssumptionCheck {
    fn from_result(name: &str, r: Result<()>) -> AssumptionCheck {
        AssumptionCheck {
            name: name.into(),
            holds: r.is_ok(),
            detail: r.err().map(|e| e.to_string()).unwrap_or_default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssumptionReport {
    pub checks: Vec<AssumptionCheck>,
}

impl AssumptionReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn holds(&self, name: &str) -> bool {
        self.checks.iter().filter(|c| c.name == name).all(|c| c.holds)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect()
    }
}

/// Optional `u` and predictable `ũ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualPair {
    pub u: RandomMeasure,
    pub ut: RandomMeasure,
}

impl DualPair {
    pub fn new(u: RandomMeasure, ut: RandomMeasure) -> DualPair {
        DualPair { u, ut }
    }

    pub fn zero(inst: &Instance) -> DualPair {
        DualPair {
            u: RandomMeasure::zero(&inst.tree, &inst.grid),
            ut: RandomMeasure::zero(&inst.tree, &inst.grid),
        }
    }

    pub fn check(&self, tree: &ScenarioTree) -> Result<()> {
        self.u.check_adapted(tree)?;
        self.ut.check_predictable(tree)
    }

    /// `E Σ|u_i| + E Σ|ũ_i|`.
    pub fn expected_variation(&self, tree: &ScenarioTree) -> Q {
        self.u.expected_variation(tree) + self.ut.expected_variation(tree)
    }

    pub fn refine(&self, factor: usize) -> DualPair {
        DualPair {
            u: self.u.refine(factor),
            ut: self.ut.refine(factor),
        }
    }
}

/// Gap bound for the lattice oracle: `δ·(E Σ|u| + E Σ|ũ|)`.
pub fn gap_bound(inst: &Instance, d: &DualPair, delta: &Q) -> Q {
    delta * d.expected_variation(&inst.tree)
}

fn left_path(y: &StepPath) -> StepPath {
    StepPath::new(y.grid().clone(), y.left_version()).expect("same grid")
}

/// `F(y) = E I_h(y) + δ_{D(S)}(y)`.
pub fn eval_f(inst: &Instance, y: &RandomPath) -> Result<Ext> {
    y.check_adapted(&inst.tree)?;
    let per = (0..inst.scenarios())
        .map(|w| {
            if !inst.s.map(w).is_selection(y.path(w)) {
                return Ok(Ext::PosInf);
            }
            eval_i(inst.h.scenario(w), y.path(w), inst.mu.measure(w))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(inst.tree.expect(|w| per[w].clone()))
}

/// `F̂(y) = F(y) + E I_{h̃}(y_−) + δ_{D_l(S̃)}(y_−)`.
pub fn eval_fhat(inst: &Instance, y: &RandomPath) -> Result<Ext> {
    let f = eval_f(inst, y)?;
    let per = (0..inst.scenarios())
        .map(|w| {
            if !inst.stilde.map(w).is_left_selection(y.path(w)) {
                return Ok(Ext::PosInf);
            }
            match &inst.htilde {
                Some(ht) => eval_i(ht.scenario(w), &left_path(y.path(w)), inst.mutilde.measure(w)),
                None => Ok(Ext::zero()),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ext_sum([f, inst.tree.expect(|w| per[w].clone())]))
}

/// `E[J_{h*}(u) + J_{h̃*}(ũ)]`, with `σ_{S̃}` in place of `h̃*` when `h̃` is absent.
pub fn conj_pointwise(inst: &Instance, d: &DualPair) -> Result<Ext> {
    inst.check_flags()?;
    d.check(&inst.tree)?;
    let mut per = Vec::with_capacity(inst.scenarios());
    for w in 0..inst.scenarios() {
        let hs: Vec<PLConvex> = inst.h.scenario(w).iter().map(PLConvex::conjugate).collect();
        let mut rho = Vec::with_capacity(inst.grid.len());
        for i in 0..inst.grid.len() {
            match inst.left_integrand(w, i) {
                Some(r) => rho.push(r.conjugate()),
                None => return Ok(Ext::NegInf),
            }
        }
        let a = eval_j(&hs, d.u.measure(w), inst.mu.measure(w))?;
        let b = eval_j(&rho, d.ut.measure(w), inst.mutilde.measure(w))?;
        per.push(ext_sum([a, b]));
    }
    Ok(inst.tree.expect(|w| per[w].clone()))
}

/// The uniform lattice `{−B, −B+δ, …}` inside `[−B, B]`.
#[derive(Clone, Debug)]
pub struct Lattice {
    b: Q,
    delta: Q,
    top: i64,
}

impl Lattice {
    pub fn new(b: &Q, delta: &Q) -> Result<Lattice> {
        if !b.is_positive() || !delta.is_positive() {
            return Err(Error::Precondition {
                slot: 0,
                reason: "B and delta must be positive".into(),
            });
        }
        let top = (Q::from_integer(2.into()) * b / delta)
            .floor()
            .to_integer()
            .to_i64()
            .ok_or(Error::Budget {
                required: u128::MAX,
                cap: budget_cap(),
            })?;
        Ok(Lattice {
            b: b.clone(),
            delta: delta.clone(),
            top,
        })
    }

    pub fn size(&self) -> u128 {
        self.top as u128 + 1
    }

    fn index_bounds(&self, c: &RInterval) -> Option<(i64, i64)> {
        let (lo, hi) = match c {
            RInterval::Empty => return None,
            RInterval::Closed { lo, hi } => (lo, hi),
        };
        let k_lo = match lo {
            Ext::Fin(l) => ((l + &self.b) / &self.delta).ceil().to_integer().to_i64().unwrap_or(i64::MAX).max(0),
            Ext::NegInf => 0,
            Ext::PosInf => return None,
        };
        let k_hi = match hi {
            Ext::Fin(h) => ((h + &self.b) / &self.delta)
                .floor()
                .to_integer()
                .to_i64()
                .unwrap_or(i64::MIN)
                .min(self.top),
            Ext::PosInf => self.top,
            Ext::NegInf => return None,
        };
        (k_lo <= k_hi).then_some((k_lo, k_hi))
    }

    /// Lattice points inside `c`.
    pub fn points_in(&self, c: &RInterval) -> Vec<Q> {
        match self.index_bounds(c) {
            None => Vec::new(),
            Some((a, b)) => (a..=b)
                .map(|k| -&self.b + &self.delta * Q::from_integer(k.into()))
                .collect(),
        }
    }
}

/// One term `p·(x·c − m·f(x))` of a separable lattice problem.
struct Term<'a> {
    p: Q,
    coeff: Q,
    m: Q,
    f: &'a PLConvex,
}

struct Problem<'a> {
    terms: Vec<Term<'a>>,
    feasible: RInterval,
}

impl Problem<'_> {
    fn maximize(&self, lat: &Lattice) -> Ext {
        let lin: Q = self.terms.iter().map(|t| &t.p * &t.coeff).sum();
        let charged: Vec<&Term> = self.terms.iter().filter(|t| t.m.is_positive()).collect();
        let mut best = Ext::NegInf;
        'points: for x in lat.points_in(&self.feasible) {
            let mut val = &lin * &x;
            for t in &charged {
                match t.f.eval_q(&x) {
                    Ext::Fin(fx) => val -= &t.p * &t.m * fx,
                    _ => continue 'points,
                }
            }
            let val = Ext::Fin(val);
            if val > best {
                best = val;
            }
        }
        best
    }
}

fn intersect_all(cs: impl Iterator<Item = RInterval>) -> RInterval {
    cs.fold(RInterval::real_line(), |a, b| a.intersect(&b))
}

/// Left integrands for every scenario and slot, or `None` when slot 0 is infeasible.
fn left_integrands(inst: &Instance) -> Option<Vec<Vec<PLConvex>>> {
    (0..inst.scenarios())
        .map(|w| (0..inst.grid.len()).map(|i| inst.left_integrand(w, i)).collect())
        .collect()
}

/// `−E[m̃_0 h̃_0(0)]`, the slot-0 contribution of the left integrand.
fn slot0_constant(inst: &Instance, rho: &[Vec<PLConvex>]) -> Ext {
    inst.tree
        .expect(|w| -rho[w][0].eval_q(&Q::zero()).scale_nonneg(inst.mutilde.atom(w, 0)))
}

fn check_budget(problems: usize, lat: &Lattice) -> Result<()> {
    let required = problems as u128 * lat.size();
    let cap = budget_cap();
    if required > cap {
        return Err(Error::Budget { required, cap });
    }
    Ok(())
}

/// Exhaustive supremum of `E⟨y,(u,ũ)⟩ − F̂(y)` over adapted paths with values
/// on the lattice, on the grid refined once so that each left limit is a free
/// variable. A lower bound of the conjugate; `−∞` when no lattice path is feasible.
pub fn conj_bruteforce(inst: &Instance, d: &DualPair, b: &Q, delta: &Q) -> Result<Ext> {
    inst.check_flags()?;
    d.check(&inst.tree)?;
    let lat = Lattice::new(b, delta)?;
    let Some(rho) = left_integrands(inst) else {
        return Ok(Ext::NegInf);
    };
    let tree = &inst.tree;
    let mut problems = Vec::new();
    for i in 0..inst.grid.len() {
        for cell in tree.cells(i) {
            problems.push(Problem {
                terms: cell
                    .iter()
                    .map(|&w| Term {
                        p: tree.probs()[w].clone(),
                        coeff: d.u.atom(w, i).clone(),
                        m: inst.mu.atom(w, i).clone(),
                        f: inst.h.at(w, i),
                    })
                    .collect(),
                feasible: intersect_all(cell.iter().map(|&w| inst.v_constraint(w, i))),
            });
        }
    }
    for i in 1..inst.grid.len() {
        for cell in tree.cells(i - 1) {
            problems.push(Problem {
                terms: cell
                    .iter()
                    .map(|&w| Term {
                        p: tree.probs()[w].clone(),
                        coeff: d.ut.atom(w, i).clone(),
                        m: inst.mutilde.atom(w, i).clone(),
                        f: &rho[w][i],
                    })
                    .collect(),
                feasible: intersect_all(cell.iter().map(|&w| inst.w_constraint(w, i))),
            });
        }
    }
    check_budget(problems.len(), &lat)?;
    let values: Vec<Ext> = problems.par_iter().map(|p| p.maximize(&lat)).collect();
    if values.contains(&Ext::NegInf) {
        return Ok(Ext::NegInf);
    }
    Ok(ext_sum(values.into_iter().chain([slot0_constant(inst, &rho)])))
}

/// `σ_{D(S)}(u,ũ) = E[J_{σ_S}(u) + J_{σ_{S̃}}(ũ)]`; `−∞` when `D(S)` is empty.
pub fn support_ds(inst: &Instance, d: &DualPair) -> Result<Ext> {
    d.check(&inst.tree)?;
    if !inst.s.selections_exist() {
        return Ok(Ext::NegInf);
    }
    let mut per = Vec::with_capacity(inst.scenarios());
    for w in 0..inst.scenarios() {
        let sig: Vec<PLConvex> = inst
            .s
            .map(w)
            .point_vals()
            .iter()
            .map(PLConvex::support_fn)
            .collect::<Result<_>>()?;
        let mut sigt = Vec::with_capacity(inst.grid.len());
        for (i, p) in inst.stilde.map(w).point_vals().iter().enumerate() {
            let c = if i == 0 { p.intersect(&RInterval::point(Q::zero())) } else { p.clone() };
            if c.is_empty() {
                return Ok(Ext::NegInf);
            }
            sigt.push(PLConvex::support_fn(&c)?);
        }
        per.push(ext_sum([
            eval_j(&sig, d.u.measure(w), inst.mu.measure(w))?,
            eval_j(&sigt, d.ut.measure(w), inst.mutilde.measure(w))?,
        ]));
    }
    Ok(inst.tree.expect(|w| per[w].clone()))
}

/// Normal cone of a closed interval at `x`.
pub fn normal_cone(c: &RInterval, x: &Q) -> RInterval {
    PLConvex::indicator(c)
        .map(|f| f.subdiff(x))
        .unwrap_or(RInterval::Empty)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InclusionFailure {
    pub scenario: String,
    pub slot: usize,
    pub kind: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubdiffReport {
    pub all_inclusions: bool,
    pub failures: Vec<InclusionFailure>,
    pub primal: Ext,
    pub dual: Ext,
    #[serde(serialize_with = "ser_q")]
    pub pairing: Q,
    pub fenchel_gap: Ext,
    pub equality: bool,
    /// The inclusions hold exactly when Fenchel's equality does.
    pub equivalence: bool,
}

/// Checks, slot by slot, `du/dμ ∈ ∂h(y)`, `du/d|u^s| ∈ N_{cl dom h}(y)`,
/// `dũ/dμ̃ ∈ ∂h̃(y_−)` and `dũ/d|ũ^s| ∈ N_{cl dom h̃}(y_−)`, and compares
/// with Fenchel's equality.
pub fn subdiff_check(inst: &Instance, y: &RandomPath, d: &DualPair) -> Result<SubdiffReport> {
    let primal = eval_fhat(inst, y)?;
    if !primal.is_finite() {
        return Err(Error::InfinitePrimal);
    }
    let dual = conj_pointwise(inst, d)?;
    let pairing = expected_pairing(&inst.tree, y, &d.u, &d.ut)?;
    let mut failures = Vec::new();
    let rho = left_integrands(inst).ok_or(Error::InfinitePrimal)?;
    for w in 0..inst.scenarios() {
        let v = y.path(w).values();
        let left = y.path(w).left_version();
        let mut check = |slot: usize, f: &PLConvex, x: &Q, theta: &Q, m: &Q, ac: &'static str, sing: &'static str| {
            let (ok, kind) = if m.is_positive() {
                (f.subdiff(x).contains(&(theta / m)), ac)
            } else if theta.is_zero() {
                (true, sing)
            } else {
                (normal_cone(&f.dom(), x).contains(&sign(theta)), sing)
            };
            if !ok {
                failures.push(InclusionFailure {
                    scenario: inst.tree.ids()[w].clone(),
                    slot,
                    kind,
                });
            }
        };
        for i in 0..inst.grid.len() {
            check(i, inst.h.at(w, i), &v[i], d.u.atom(w, i), inst.mu.atom(w, i), "absolutely-continuous", "singular");
            check(
                i,
                &rho[w][i],
                &left[i],
                d.ut.atom(w, i),
                inst.mutilde.atom(w, i),
                "left-absolutely-continuous",
                "left-singular",
            );
        }
    }
    let fenchel_gap = ext_sum([primal.clone(), dual.clone(), Ext::Fin(-pairing.clone())]);
    let all_inclusions = failures.is_empty();
    let equality = fenchel_gap == Ext::zero();
    Ok(SubdiffReport {
        all_inclusions,
        failures,
        primal,
        dual,
        pairing,
        fenchel_gap,
        equality,
        equivalence: all_inclusions == equality,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Infimum over càdlàg selections of `S` against `μ`.
    D,
    /// Infimum over left limits of selections of `S̃` against `μ̃`.
    Dl,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InterchangeReport {
    pub lhs: Ext,
    pub rhs: Ext,
    /// `lhs − rhs` when defined.
    pub gap: Option<Ext>,
    pub equal: bool,
    pub assumptions: AssumptionReport,
    /// Exact mode when the assumptions hold, gap-reporting mode otherwise.
    pub exact_mode: bool,
    pub failing_slots: Vec<usize>,
    /// Value of the pasted witness path on the twice-refined instance.
    pub witness: Option<Ext>,
    pub pass: bool,
}

fn ext_gap(lhs: &Ext, rhs: &Ext) -> Option<Ext> {
    lhs.checked_add(&-rhs.clone())
}

/// Deterministic interchange: `inf_{D(S)} I_h = Σ m_i inf h_i` (side `D`) or
/// its left-limit analogue for `h̃` over `D_l(S̃)` (side `Dl`).
pub fn interchange_det(inst: &Instance, side: Side) -> Result<InterchangeReport> {
    if inst.scenarios() != 1 {
        return Err(Error::Assumption("deterministic interchange needs a single scenario".into()));
    }
    let s = inst.s.map(0);
    let st = inst.stilde.map(0);
    let n = inst.grid.len();
    let (lhs, rhs, checks, failing_slots) = match side {
        Side::D => {
            let lhs = if s.selections_exist() {
                ext_sum((0..n).map(|i| inst.h.at(0, i).inf_over(&s.attainable_at(i)).0.scale_nonneg(inst.mu.atom(0, i))))
            } else {
                Ext::PosInf
            };
            let rhs = ext_sum((0..n).map(|i| inst.h.at(0, i).min_value().scale_nonneg(inst.mu.atom(0, i))));
            let michael = s.michael_check();
            let domain_fail = (0..n).find(|&i| s.point_vals()[i] != inst.h.at(0, i).dom());
            let checks = vec![
                AssumptionCheck {
                    name: "michael".into(),
                    holds: michael.representation_holds,
                    detail: format!("{:?}", michael.failing_slots),
                },
                AssumptionCheck {
                    name: "S-domain".into(),
                    holds: domain_fail.is_none(),
                    detail: domain_fail.map(|i| format!("slot {i}")).unwrap_or_default(),
                },
            ];
            (lhs, rhs, checks, michael.failing_slots)
        }
        Side::Dl => {
            let rho = left_integrands(inst);
            let left_feasible = |i: usize| {
                if i == 0 {
                    st.point_vals()[0].intersect(&RInterval::point(Q::zero()))
                } else {
                    st.point_vals()[i].intersect(&st.open_vals()[i - 1])
                }
            };
            let lhs = match &rho {
                Some(rho) if (0..n).all(|i| !left_feasible(i).is_empty()) => ext_sum(
                    (0..n).map(|i| rho[0][i].inf_over(&left_feasible(i)).0.scale_nonneg(inst.mutilde.atom(0, i))),
                ),
                _ => Ext::PosInf,
            };
            let rhs = match &rho {
                Some(rho) => ext_sum((0..n).map(|i| rho[0][i].min_value().scale_nonneg(inst.mutilde.atom(0, i)))),
                None => Ext::PosInf,
            };
            let failing: Vec<usize> =
                (1..n).filter(|&i| !st.point_vals()[i].is_subset(&st.open_vals()[i - 1])).collect();
            let domain_fail = match (&inst.htilde, &rho) {
                (Some(_), Some(rho)) => (1..n).find(|&i| st.point_vals()[i] != rho[0][i].dom()),
                _ => None,
            };
            let checks = vec![
                AssumptionCheck {
                    name: "left-isc".into(),
                    holds: failing.is_empty(),
                    detail: format!("{failing:?}"),
                },
                AssumptionCheck {
                    name: "Stilde-domain".into(),
                    holds: domain_fail.is_none(),
                    detail: domain_fail.map(|i| format!("slot {i}")).unwrap_or_default(),
                },
            ];
            (lhs, rhs, checks, failing)
        }
    };
    let assumptions = AssumptionReport { checks };
    let exact_mode = assumptions.all_hold();
    let equal = lhs == rhs;
    Ok(InterchangeReport {
        gap: ext_gap(&lhs, &rhs),
        pass: !exact_mode || equal,
        lhs,
        rhs,
        equal,
        assumptions,
        exact_mode,
        failing_slots,
        witness: None,
    })
}

/// Aggregate `Σ_ω p_ω m_ω f_ω` over a cell and minimize over `c`. Returns the
/// infimum and a minimizer when one exists.
fn cell_min(terms: &[(Q, Q, &PLConvex)], c: &RInterval) -> (Ext, Option<Q>) {
    if c.is_empty() {
        return (Ext::PosInf, None);
    }
    let mut agg: Option<PLConvex> = None;
    for (p, m, f) in terms {
        if !m.is_positive() {
            continue;
        }
        let scaled = f.scale(&(p * m));
        agg = match agg {
            None => Some(scaled),
            Some(a) => match a.add(&scaled) {
                Some(s) => Some(s),
                None => return (Ext::PosInf, None),
            },
        };
    }
    match agg {
        None => (Ext::zero(), c.anchor()),
        Some(g) => {
            let (val, arg) = g.inf_over(c);
            (val, arg.anchor())
        }
    }
}

/// Stochastic interchange for the combined functional:
/// `inf_y F̂(y) = E[Σ m_i inf h_i + Σ m̃_i inf h̃_i]`. The left side is the exact
/// separable infimum over adapted paths; the pasted witness is evaluated on
/// the instance refined twice and must attain it.
pub fn interchange_stoch(inst: &Instance) -> Result<InterchangeReport> {
    let assumptions = inst.assumptions();
    let tree = &inst.tree;
    let n = inst.grid.len();
    let Some(rho) = left_integrands(inst) else {
        return Ok(InterchangeReport {
            lhs: Ext::PosInf,
            rhs: Ext::PosInf,
            gap: None,
            equal: true,
            exact_mode: false,
            failing_slots: vec![0],
            witness: None,
            pass: !assumptions.all_hold(),
            assumptions,
        });
    };
    let mut parts = Vec::new();
    let mut v = vec![vec![Q::zero(); n]; tree.len()];
    let mut wv = vec![vec![Q::zero(); n]; tree.len()];
    let mut witness_ok = true;
    for i in 0..n {
        for cell in tree.cells(i) {
            let terms: Vec<_> = cell
                .iter()
                .map(|&w| (tree.probs()[w].clone(), inst.mu.atom(w, i).clone(), inst.h.at(w, i)))
                .collect();
            let (val, arg) = cell_min(&terms, &intersect_all(cell.iter().map(|&w| inst.v_constraint(w, i))));
            match arg {
                Some(x) => cell.iter().for_each(|&w| v[w][i] = x.clone()),
                None => witness_ok = false,
            }
            parts.push(val);
        }
    }
    for i in 1..n {
        for cell in tree.cells(i - 1) {
            let terms: Vec<_> = cell
                .iter()
                .map(|&w| (tree.probs()[w].clone(), inst.mutilde.atom(w, i).clone(), &rho[w][i]))
                .collect();
            let (val, arg) = cell_min(&terms, &intersect_all(cell.iter().map(|&w| inst.w_constraint(w, i))));
            match arg {
                Some(x) => cell.iter().for_each(|&w| wv[w][i] = x.clone()),
                None => witness_ok = false,
            }
            parts.push(val);
        }
    }
    parts.push(-slot0_constant(inst, &rho));
    let lhs = ext_sum(parts);
    let rhs = tree.expect(|w| {
        ext_sum((0..n).map(|i| {
            let direct = inst.h.at(w, i).min_value().scale_nonneg(inst.mu.atom(w, i));
            let left = if i == 0 {
                rho[w][0].eval_q(&Q::zero())
            } else {
                rho[w][i].min_value()
            };
            ext_sum([direct, left.scale_nonneg(inst.mutilde.atom(w, i))])
        }))
    });

    let witness = if witness_ok && lhs.is_finite() {
        Some(pasted_witness(inst, &v, &wv)?)
    } else {
        None
    };
    let equal = lhs == rhs;
    let exact_mode = assumptions.all_hold();
    let witness_matches = witness.as_ref().is_none_or(|x| *x == lhs);
    Ok(InterchangeReport {
        gap: ext_gap(&lhs, &rhs),
        pass: !exact_mode || (equal && witness_matches),
        failing_slots: failing_slots(&assumptions, inst),
        lhs,
        rhs,
        equal,
        assumptions,
        exact_mode,
        witness,
    })
}

fn failing_slots(rep: &AssumptionReport, inst: &Instance) -> Vec<usize> {
    if rep.holds("michael") {
        return Vec::new();
    }
    let mut out = BTreeSet::new();
    for m in inst.s.maps() {
        out.extend(m.michael_check().failing_slots);
    }
    out.into_iter().collect()
}

/// Builds `y` from the cell minimizers `v`, `ỹ` carrying the left-limit
/// minimizers `w` on the second half of each cell, pastes them at the atoms
/// of `μ̃` on the twice-refined instance and returns `F̂` of the result.
fn pasted_witness(inst: &Instance, v: &[Vec<Q>], w: &[Vec<Q>]) -> Result<Ext> {
    let fine = inst.refine(2);
    let n = inst.grid.len();
    let mut y = Vec::with_capacity(inst.scenarios());
    let mut yt = Vec::with_capacity(inst.scenarios());
    for s in 0..inst.scenarios() {
        let mut a = Vec::with_capacity(2 * n - 1);
        let mut b = Vec::with_capacity(2 * n - 1);
        for i in 0..n {
            a.push(v[s][i].clone());
            b.push(v[s][i].clone());
            if i + 1 < n {
                a.push(v[s][i].clone());
                b.push(w[s][i + 1].clone());
            }
        }
        y.push(a);
        yt.push(b);
    }
    let y = RandomPath::from_values(&fine.grid, y)?;
    let yt = RandomPath::from_values(&fine.grid, yt)?;
    let atoms = predictable_atoms(&fine.tree, &fine.mutilde)?;
    let z = paste(&fine.tree, &y, &yt, &atoms)?;
    eval_fhat(&fine, &z)
}

/// Infimum of a piecewise-linear convex function by enumeration of its
/// vertices and end slopes.
pub fn vertex_min(h: &PLConvex) -> Ext {
    let slopes = h.slopes();
    if h.dom_lo() == &Ext::NegInf && slopes[0].is_positive() {
        return Ext::NegInf;
    }
    if h.dom_hi() == &Ext::PosInf && slopes[slopes.len() - 1].is_negative() {
        return Ext::NegInf;
    }
    let vs = h.vertices();
    if vs.is_empty() {
        return h.eval_q(h.anchor().0);
    }
    vs.iter().map(|x| h.eval_q(x)).min().expect("nonempty")
}

/// Interchange on the decomposable space of all slot-wise selections, with no
/// adaptedness and no constraints: the vertex oracle against `inf h`.
pub fn decomposable_interchange(inst: &Instance) -> (Ext, Ext, bool) {
    let n = inst.grid.len();
    let lhs = inst
        .tree
        .expect(|w| ext_sum((0..n).map(|i| vertex_min(inst.h.at(w, i)).scale_nonneg(inst.mu.atom(w, i)))));
    let rhs = inst
        .tree
        .expect(|w| ext_sum((0..n).map(|i| inst.h.at(w, i).min_value().scale_nonneg(inst.mu.atom(w, i)))));
    let eq = lhs == rhs;
    (lhs, rhs, eq)
}

/// Affine minorant `h_i(x) ≥ x·θ_i − α_i` on the `μ`-charged slots built
/// from a dual `u` with `E J_{h*}(u)` finite: `θ = du/dμ`, `α = (h*(θ))⁺`.
/// Each minorant is verified through the infimum of the tilted integrand.
#[allow(clippy::type_complexity)]
pub fn lsc_minorant(inst: &Instance, u: &RandomMeasure) -> Result<Option<Vec<Vec<Option<(Q, Q)>>>>> {
    u.check_adapted(&inst.tree)?;
    let n = inst.grid.len();
    let per = (0..inst.scenarios())
        .map(|w| {
            let hs: Vec<PLConvex> = inst.h.scenario(w).iter().map(PLConvex::conjugate).collect();
            eval_j(&hs, u.measure(w), inst.mu.measure(w))
        })
        .collect::<Result<Vec<_>>>()?;
    if !inst.tree.expect(|w| per[w].clone()).is_finite() {
        return Ok(None);
    }
    let mut out = Vec::with_capacity(inst.scenarios());
    for w in 0..inst.scenarios() {
        let mut row = Vec::with_capacity(n);
        for i in 0..n {
            let m = inst.mu.atom(w, i);
            if !m.is_positive() {
                row.push(None);
                continue;
            }
            let h = inst.h.at(w, i);
            let theta = u.atom(w, i) / m;
            let alpha = h
                .conjugate()
                .eval_q(&theta)
                .into_finite()
                .ok_or(Error::Assumption("conjugate infinite at the density".into()))?
                .max(Q::zero());
            if h.tilt(&theta).min_value() < Ext::Fin(-alpha.clone()) {
                return Err(Error::Assumption(format!("minorant fails at slot {i}")));
            }
            row.push(Some((theta, alpha)));
        }
        out.push(row);
    }
    Ok(Some(out))
}

/// Lattice supremum of `E∫v du − E J_{h*}(u)` over adapted `u` with atoms on
/// the lattice; recovers `E I_h(y) + δ_{D(S)}(y)` as the lattice widens.
pub fn dual_representation(inst: &Instance, y: &RandomPath, b: &Q, delta: &Q) -> Result<Ext> {
    y.check_adapted(&inst.tree)?;
    let lat = Lattice::new(b, delta)?;
    let tree = &inst.tree;
    let n = inst.grid.len();
    let hs: Vec<Vec<PLConvex>> = (0..tree.len())
        .map(|w| inst.h.scenario(w).iter().map(PLConvex::conjugate).collect())
        .collect();
    let hs_rec: Vec<Vec<PLConvex>> = hs.iter().map(|r| r.iter().map(PLConvex::recession).collect()).collect();
    let mut jobs = Vec::new();
    for i in 0..n {
        for cell in tree.cells(i) {
            jobs.push((i, cell.clone()));
        }
    }
    check_budget(jobs.len(), &lat)?;
    let all = RInterval::real_line();
    let values: Vec<Ext> = jobs
        .par_iter()
        .map(|(i, cell)| {
            let mut best = Ext::NegInf;
            'points: for a in lat.points_in(&all) {
                let mut val = Q::zero();
                for &w in cell {
                    let p = &tree.probs()[w];
                    let m = inst.mu.atom(w, *i);
                    let j = if m.is_positive() {
                        hs[w][*i].eval_q(&(&a / m)).scale_nonneg(m)
                    } else if a.is_zero() {
                        Ext::zero()
                    } else {
                        hs_rec[w][*i].eval_q(&sign(&a)).scale_nonneg(&a.abs())
                    };
                    match j {
                        Ext::Fin(j) => val += p * (&a * y.value(w, *i) - j),
                        _ => continue 'points,
                    }
                }
                let val = Ext::Fin(val);
                if val > best {
                    best = val;
                }
            }
            best
        })
        .collect();
    Ok(ext_sum(values))
}
