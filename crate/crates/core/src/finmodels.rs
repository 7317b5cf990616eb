//! Financial constraint models built on the generic machinery: obstacles,
//! bid-ask intervals and currency markets with polyhedral solvency cones.
//!
//! Semicontinuity of a scalar process is read at grid semantics: `b` is
//! right-usc when each point value dominates the following cell value, and
//! `a` is right-lsc when each point value is dominated by it. Those are exactly
//! the conditions making `[b, ∞)` and `[b, a]` right-isc.

use num::{Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::duality::{DualPair, Instance};
use crate::error::{Error, Result};
use crate::ext::{Ext, Q};
use crate::plconvex::{PLConvex, RInterval};
use crate::polycone::{dot, ConeMap, PolyCone, Vector};
use crate::scenario::{Flag, RandomIntegrand, RandomMeasure, RandomPath, RandomSetMap, ScenarioTree};
use crate::setmaps::SetMap;
use crate::timegrid::TimeGrid;

/// Scalar process with separate grid-time and cell values per scenario.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarProcess {
    grid: TimeGrid,
    points: Vec<Vec<Q>>,
    open: Vec<Vec<Q>>,
    flag: Flag,
}

impl ScalarProcess {
    pub fn new(grid: TimeGrid, points: Vec<Vec<Q>>, open: Vec<Vec<Q>>, flag: Flag) -> Result<ScalarProcess> {
        if points.is_empty() || points.len() != open.len() {
            return Err(Error::Malformed("process needs matching point and cell rows".into()));
        }
        if points.iter().any(|p| p.len() != grid.len()) || open.iter().any(|o| o.len() != grid.cells()) {
            return Err(Error::Grid("process rows do not match the grid".into()));
        }
        Ok(ScalarProcess {
            grid,
            points,
            open,
            flag,
        })
    }

    /// Cell values repeat the value at the left end of the cell.
    pub fn regular(grid: TimeGrid, points: Vec<Vec<Q>>, flag: Flag) -> Result<ScalarProcess> {
        let open = points.iter().map(|p| p[..p.len().saturating_sub(1)].to_vec()).collect();
        ScalarProcess::new(grid, points, open, flag)
    }

    pub fn constant(tree: &ScenarioTree, grid: &TimeGrid, c: Q) -> ScalarProcess {
        ScalarProcess {
            grid: grid.clone(),
            points: vec![vec![c.clone(); grid.len()]; tree.len()],
            open: vec![vec![c; grid.cells()]; tree.len()],
            flag: Flag::Optional,
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn flag(&self) -> Flag {
        self.flag
    }

    pub fn points(&self) -> &[Vec<Q>] {
        &self.points
    }

    pub fn open(&self) -> &[Vec<Q>] {
        &self.open
    }

    pub fn point(&self, s: usize, i: usize) -> &Q {
        &self.points[s][i]
    }

    pub fn cell(&self, s: usize, i: usize) -> &Q {
        &self.open[s][i]
    }

    pub fn check_flag(&self, tree: &ScenarioTree) -> Result<()> {
        if self.points.len() != tree.len() {
            return Err(Error::Dimension {
                expected: tree.len(),
                got: self.points.len(),
            });
        }
        let predictable = self.flag == Flag::Predictable;
        if self.flag == Flag::Raw {
            return Ok(());
        }
        for i in 0..self.grid.len() {
            let part = if predictable { ScenarioTree::predictable_index(i) } else { i };
            if let Some(scenario) = tree.first_violation(part, |s| &self.points[s][i]) {
                return Err(if predictable {
                    Error::NotPredictable { scenario, slot: i }
                } else {
                    Error::NotAdapted { scenario, slot: i }
                });
            }
            if i < self.grid.cells() {
                if let Some(scenario) = tree.first_violation(i, |s| &self.open[s][i]) {
                    return Err(Error::NotAdapted { scenario, slot: i });
                }
            }
        }
        Ok(())
    }

    fn left_reg(&self) -> ScalarProcess {
        let points = self
            .open
            .iter()
            .map(|o| std::iter::once(Q::zero()).chain(o.iter().cloned()).collect())
            .collect();
        ScalarProcess {
            grid: self.grid.clone(),
            points,
            open: self.open.clone(),
            flag: match self.flag {
                Flag::Optional | Flag::Predictable => Flag::Predictable,
                Flag::Raw => Flag::Raw,
            },
        }
    }

    /// `b⃗_{t_i} = limsup_{s↑t_i} b_s`: the preceding cell value, 0 at `t₀`.
    pub fn left_usc_reg(&self) -> ScalarProcess {
        self.left_reg()
    }

    /// `a̲_{t_i} = liminf_{s↑t_i} a_s`; equal to the preceding cell value.
    pub fn left_lsc_reg(&self) -> ScalarProcess {
        self.left_reg()
    }

    /// First slot where a point value falls below the following cell value.
    pub fn right_usc_violation(&self) -> Option<usize> {
        (0..self.grid.cells()).find(|&i| self.points.iter().zip(&self.open).any(|(p, o)| p[i] < o[i]))
    }

    /// First slot where a point value exceeds the following cell value.
    pub fn right_lsc_violation(&self) -> Option<usize> {
        (0..self.grid.cells()).find(|&i| self.points.iter().zip(&self.open).any(|(p, o)| p[i] > o[i]))
    }

    /// New grid times inside a cell take the cell value.
    pub fn refine(&self, factor: usize) -> ScalarProcess {
        let mut points = Vec::with_capacity(self.points.len());
        let mut open = Vec::with_capacity(self.open.len());
        for (p, o) in self.points.iter().zip(&self.open) {
            let mut np = Vec::new();
            let mut no = Vec::new();
            for (i, c) in o.iter().enumerate() {
                np.push(p[i].clone());
                np.extend(std::iter::repeat_n(c.clone(), factor - 1));
                no.extend(std::iter::repeat_n(c.clone(), factor));
            }
            np.push(p.last().expect("nonempty").clone());
            points.push(np);
            open.push(no);
        }
        ScalarProcess {
            grid: self.grid.refine(factor),
            points,
            open,
            flag: self.flag,
        }
    }
}

fn zero_measures(tree: &ScenarioTree, grid: &TimeGrid) -> (RandomMeasure, RandomMeasure) {
    (RandomMeasure::zero(tree, grid), RandomMeasure::zero(tree, grid))
}

/// Instance whose integrand is the indicator of `S` itself.
fn constraint_instance(tree: &ScenarioTree, grid: &TimeGrid, maps: Vec<SetMap>) -> Result<Instance> {
    let h = maps
        .iter()
        .map(|m| m.point_vals().iter().map(PLConvex::indicator).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let (mu, mut_) = zero_measures(tree, grid);
    Instance::new(
        tree.clone(),
        grid.clone(),
        RandomIntegrand::new(h, Flag::Optional)?,
        None,
        mu,
        mut_,
        Some(RandomSetMap::new(maps)?),
        None,
    )
}

fn first_infeasible(maps: &[SetMap], y: &RandomPath) -> Option<usize> {
    maps.iter()
        .zip(y.paths())
        .filter_map(|(m, p)| (0..p.values().len()).find(|&i| !m.attainable_at(i).contains(&p.values()[i])))
        .min()
}

/// `S_t = [b_t, ∞)`, with a selection `y̌ ≥ b` certifying `D(S) ≠ ∅`.
pub fn obstacle_model(tree: &ScenarioTree, b: &ScalarProcess, ycheck: &RandomPath) -> Result<Instance> {
    b.check_flag(tree)?;
    if let Some(slot) = b.right_usc_violation() {
        return Err(Error::Precondition {
            slot,
            reason: "obstacle is not right-usc: point value below the following cell value".into(),
        });
    }
    ycheck.check_adapted(tree)?;
    let maps = (0..tree.len())
        .map(|s| {
            SetMap::new(
                b.grid.clone(),
                b.points[s].iter().map(|x| RInterval::at_least(x.clone())).collect(),
                b.open[s].iter().map(|x| RInterval::at_least(x.clone())).collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(slot) = first_infeasible(&maps, ycheck) {
        return Err(Error::Precondition {
            slot,
            reason: "the reference path does not dominate the obstacle".into(),
        });
    }
    constraint_instance(tree, &b.grid, maps)
}

/// `E[Σ b_i u_i + Σ_{i≥1} b⃗_i ũ_i]` when `u ≤ 0` and `ũ ≤ 0` after `t₀`, else `+∞`.
pub fn obstacle_support(tree: &ScenarioTree, b: &ScalarProcess, d: &DualPair) -> Result<Ext> {
    d.check(tree)?;
    let bl = b.left_usc_reg();
    let n = b.grid.len();
    for s in 0..tree.len() {
        for i in 0..n {
            if d.u.atom(s, i).is_positive() || (i > 0 && d.ut.atom(s, i).is_positive()) {
                return Ok(Ext::PosInf);
            }
        }
    }
    Ok(Ext::Fin(tree.expect_q(|s| {
        (0..n)
            .map(|i| b.point(s, i) * d.u.atom(s, i) + bl.point(s, i) * d.ut.atom(s, i))
            .sum()
    })))
}

/// `S_t = [b_t, a_t]` with a path `ȳ` strictly inside the spread, also in left limits.
pub fn bidask_model(tree: &ScenarioTree, b: &ScalarProcess, a: &ScalarProcess, ybar: &RandomPath) -> Result<Instance> {
    b.check_flag(tree)?;
    a.check_flag(tree)?;
    ybar.check_adapted(tree)?;
    if b.grid != a.grid {
        return Err(Error::Grid("bid and ask live on different grids".into()));
    }
    if let Some(slot) = b.right_usc_violation() {
        return Err(Error::Precondition {
            slot,
            reason: "bid is not right-usc".into(),
        });
    }
    if let Some(slot) = a.right_lsc_violation() {
        return Err(Error::Precondition {
            slot,
            reason: "ask is not right-lsc".into(),
        });
    }
    for s in 0..tree.len() {
        let y = ybar.path(s).values();
        for i in 0..b.grid.len() {
            if !(b.point(s, i) < &y[i] && &y[i] < a.point(s, i)) {
                return Err(Error::Precondition {
                    slot: i,
                    reason: format!("reference path not strictly inside the spread in scenario {}", tree.ids()[s]),
                });
            }
            if i > 0 && !(b.cell(s, i - 1) < &y[i - 1] && &y[i - 1] < a.cell(s, i - 1)) {
                return Err(Error::Precondition {
                    slot: i,
                    reason: format!(
                        "reference left limit not strictly inside the regularized spread in scenario {}",
                        tree.ids()[s]
                    ),
                });
            }
        }
    }
    let maps = (0..tree.len())
        .map(|s| {
            SetMap::new(
                b.grid.clone(),
                (0..b.grid.len())
                    .map(|i| RInterval::finite(b.point(s, i).clone(), a.point(s, i).clone()))
                    .collect(),
                (0..b.grid.cells())
                    .map(|i| RInterval::finite(b.cell(s, i).clone(), a.cell(s, i).clone()))
                    .collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    constraint_instance(tree, &b.grid, maps)
}

fn spread(x: &Q, lo: &Q, hi: &Q) -> Q {
    if x.is_positive() {
        hi * x
    } else {
        lo * x
    }
}

/// `E[Σ (a u⁺ − b u⁻) + Σ_{i≥1} (a̲ ũ⁺ − b⃗ ũ⁻)]`.
pub fn bidask_support(tree: &ScenarioTree, b: &ScalarProcess, a: &ScalarProcess, d: &DualPair) -> Result<Ext> {
    d.check(tree)?;
    let bl = b.left_usc_reg();
    let al = a.left_lsc_reg();
    let n = b.grid.len();
    Ok(Ext::Fin(tree.expect_q(|s| {
        (0..n)
            .map(|i| {
                let direct = spread(d.u.atom(s, i), b.point(s, i), a.point(s, i));
                let left = if i == 0 {
                    Q::zero()
                } else {
                    spread(d.ut.atom(s, i), bl.point(s, i), al.point(s, i))
                };
                direct + left
            })
            .sum()
    })))
}

/// Vector-valued dual pair: one vector per scenario and slot for `u` and `ũ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VecDual {
    pub u: Vec<Vec<Vector>>,
    pub ut: Vec<Vec<Vector>>,
}

impl VecDual {
    pub fn zero(scenarios: usize, slots: usize, dim: usize) -> VecDual {
        let z = vec![vec![vec![Q::zero(); dim]; slots]; scenarios];
        VecDual { u: z.clone(), ut: z }
    }

    pub fn check(&self, tree: &ScenarioTree) -> Result<()> {
        for i in 0..tree.slots() {
            if let Some(scenario) = tree.first_violation(i, |s| &self.u[s][i]) {
                return Err(Error::NotAdapted { scenario, slot: i });
            }
            let p = ScenarioTree::predictable_index(i);
            if let Some(scenario) = tree.first_violation(p, |s| &self.ut[s][i]) {
                return Err(Error::NotPredictable { scenario, slot: i });
            }
        }
        Ok(())
    }

    /// New slots carry zero atoms.
    pub fn refine(&self, factor: usize) -> VecDual {
        let spread = |rows: &Vec<Vec<Vector>>| {
            rows.iter()
                .map(|r| {
                    let dim = r[0].len();
                    let mut out = Vec::new();
                    for (i, v) in r.iter().enumerate() {
                        out.push(v.clone());
                        if i + 1 < r.len() {
                            out.extend(std::iter::repeat_n(vec![Q::zero(); dim], factor - 1));
                        }
                    }
                    out
                })
                .collect()
        };
        VecDual {
            u: spread(&self.u),
            ut: spread(&self.ut),
        }
    }

    pub fn add(&self, other: &VecDual) -> VecDual {
        let sum = |a: &Vec<Vec<Vector>>, b: &Vec<Vec<Vector>>| {
            a.iter()
                .zip(b)
                .map(|(ra, rb)| {
                    ra.iter()
                        .zip(rb)
                        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
                        .collect()
                })
                .collect()
        };
        VecDual {
            u: sum(&self.u, &other.u),
            ut: sum(&self.ut, &other.ut),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurrencyReport {
    pub right_isc: bool,
    pub solid: bool,
    pub vec_solid: bool,
    pub failing_slots: Vec<usize>,
    pub ok: bool,
}

/// Currency market with solvency cones `G` per scenario; the constraint is
/// `S = G*`, and the dual cone is `C = {(u,ũ) | u ∈ S*, ũ ∈ (vec S)*}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurrencyModel {
    pub tree: ScenarioTree,
    pub g: Vec<ConeMap>,
}

impl CurrencyModel {
    pub fn new(tree: ScenarioTree, g: Vec<ConeMap>) -> Result<CurrencyModel> {
        if g.len() != tree.len() {
            return Err(Error::Dimension {
                expected: tree.len(),
                got: g.len(),
            });
        }
        let dim = g[0].dim();
        for m in &g {
            if m.point.len() != tree.slots() {
                return Err(Error::Grid("cone map does not match the tree".into()));
            }
            if m.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: m.dim(),
                });
            }
        }
        let model = CurrencyModel { tree, g };
        for i in 0..model.tree.slots() {
            if let Some(scenario) = model.tree.first_violation(i, |s| &model.g[s].point[i]) {
                return Err(Error::NotAdapted { scenario, slot: i });
            }
        }
        Ok(model)
    }

    pub fn deterministic(g: ConeMap) -> CurrencyModel {
        let tree = ScenarioTree::deterministic(g.point.len());
        CurrencyModel { tree, g: vec![g] }
    }

    pub fn refine(&self, factor: usize) -> CurrencyModel {
        CurrencyModel {
            tree: self.tree.refine(factor),
            g: self.g.iter().map(|m| m.refine(factor)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.g[0].dim()
    }

    pub fn slots(&self) -> usize {
        self.tree.slots()
    }

    pub fn constraint(&self) -> Vec<ConeMap> {
        self.g.iter().map(ConeMap::polar).collect()
    }

    /// `S` right-isc and solid, and `vec S` solid.
    pub fn check(&self) -> CurrencyReport {
        let s = self.constraint();
        let mut failing = std::collections::BTreeSet::new();
        let mut right_isc = true;
        let mut solid = true;
        let mut vec_solid = true;
        for m in &s {
            for i in 0..m.point.len() {
                if i < m.open.len() && !m.point[i].subset_of(&m.open[i]) {
                    right_isc = false;
                    failing.insert(i);
                }
                if !m.point[i].solid() || (i < m.open.len() && !m.open[i].solid()) {
                    solid = false;
                    failing.insert(i);
                }
            }
            for (i, k) in m.vec_map().iter().enumerate().skip(1) {
                if !k.solid() {
                    vec_solid = false;
                    failing.insert(i);
                }
            }
        }
        CurrencyReport {
            ok: right_isc && solid && vec_solid,
            right_isc,
            solid,
            vec_solid,
            failing_slots: failing.into_iter().collect(),
        }
    }

    /// `u_i ∈ S_i*` and `ũ_i ∈ (vec S_i)*` at every scenario and slot.
    pub fn member(&self, d: &VecDual) -> Result<bool> {
        d.check(&self.tree)?;
        let s = self.constraint();
        for (w, m) in s.iter().enumerate() {
            let vs = m.vec_map();
            for i in 0..m.point.len() {
                if !m.point[i].polar().member(&d.u[w][i])? || !vs[i].polar().member(&d.ut[w][i])? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Adapted step selection of `S` from random nonnegative combinations of
    /// the generators of the attainable cones.
    pub fn sample_selection<R: Rng>(&self, rng: &mut R) -> Result<Vec<Vec<Vector>>> {
        let s = self.constraint();
        let n = self.slots();
        let mut y = vec![vec![vec![Q::zero(); self.dim()]; n]; self.tree.len()];
        for i in 0..n {
            for cell in self.tree.cells(i) {
                let mut k = PolyCone::whole(self.dim());
                for &w in cell {
                    k = k.intersect(&s[w].point[i])?;
                    if i + 1 < n {
                        k = k.intersect(&s[w].open[i])?;
                    }
                }
                let mut v = vec![Q::zero(); self.dim()];
                for g in k.generators() {
                    let c = Q::from_integer(rng.gen_range(0..=3).into());
                    for (vj, gj) in v.iter_mut().zip(g) {
                        *vj += &c * gj;
                    }
                }
                for &w in cell {
                    y[w][i] = v.clone();
                }
            }
        }
        Ok(y)
    }

    /// `E[Σ y_i·u_i + Σ_{i≥1} y_{i−1}·ũ_i]`.
    pub fn expected_pairing(&self, y: &[Vec<Vector>], d: &VecDual) -> Q {
        self.tree.expect_q(|w| {
            (0..self.slots())
                .map(|i| {
                    let left = if i == 0 { Q::zero() } else { dot(&y[w][i - 1], &d.ut[w][i]) };
                    dot(&y[w][i], &d.u[w][i]) + left
                })
                .sum()
        })
    }

    /// Pairs a member of `C` with `samples` sampled selections; every pairing must be `≤ 0`.
    pub fn certify<R: Rng>(&self, d: &VecDual, samples: usize, rng: &mut R) -> Result<CertifyReport> {
        let member = self.member(d)?;
        let mut max_pairing: Option<Q> = None;
        for _ in 0..samples {
            let y = self.sample_selection(rng)?;
            let p = self.expected_pairing(&y, d);
            max_pairing = Some(match max_pairing {
                Some(m) => m.max(p),
                None => p,
            });
        }
        let nonpositive = max_pairing.as_ref().is_none_or(|m| !m.is_positive());
        Ok(CertifyReport {
            member,
            samples,
            max_pairing,
            nonpositive,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifyReport {
    pub member: bool,
    pub samples: usize,
    pub max_pairing: Option<Q>,
    pub nonpositive: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::support_ds;
    use crate::ext::qi;
    use crate::timegrid::{GridMeasure, StepPath};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn qs(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|&x| qi(x)).collect()
    }

    fn dual(tree: &ScenarioTree, g: &TimeGrid, u: &[i64], ut: &[i64]) -> DualPair {
        DualPair::new(
            RandomMeasure::deterministic(tree, GridMeasure::new(g.clone(), qs(u)).unwrap()),
            RandomMeasure::deterministic(tree, GridMeasure::new(g.clone(), qs(ut)).unwrap()),
        )
    }

    #[test]
    fn regularization_examples() {
        let g = TimeGrid::uniform(3);
        let p = ScalarProcess::new(g.clone(), vec![qs(&[0, 0, 0, 0])], vec![qs(&[1, 3, 2])], Flag::Optional).unwrap();
        let r = p.left_usc_reg();
        assert_eq!(r.points()[0], qs(&[0, 1, 3, 2]));
        assert_eq!(r.flag(), Flag::Predictable);

        let tree = ScenarioTree::deterministic(4);
        let c = ScalarProcess::constant(&tree, &g, qi(5));
        assert!(c.left_lsc_reg().points()[0][1..].iter().all(|x| *x == qi(5)));

        let spike = ScalarProcess::new(g, vec![qs(&[1, 9, 1, 1])], vec![qs(&[1, 1, 1])], Flag::Optional).unwrap();
        assert_eq!(spike.left_usc_reg().point(0, 2), &qi(1));
    }

    #[test]
    fn obstacle_examples() {
        let g = TimeGrid::uniform(1);
        let tree = ScenarioTree::deterministic(2);
        let zero = ScalarProcess::constant(&tree, &g, qi(0));
        let y = RandomPath::deterministic(&tree, StepPath::constant(&g, qi(1)));
        let inst = obstacle_model(&tree, &zero, &y).unwrap();
        let d = dual(&tree, &g, &[-1, 0], &[0, 0]);
        assert_eq!(obstacle_support(&tree, &zero, &d).unwrap(), Ext::zero());
        assert_eq!(support_ds(&inst, &d).unwrap(), Ext::zero());
        let d = dual(&tree, &g, &[1, 0], &[0, 0]);
        assert_eq!(obstacle_support(&tree, &zero, &d).unwrap(), Ext::PosInf);
        assert_eq!(support_ds(&inst, &d).unwrap(), Ext::PosInf);

        let b = ScalarProcess::new(g.clone(), vec![qs(&[1, 3])], vec![qs(&[1])], Flag::Optional).unwrap();
        let y = RandomPath::deterministic(&tree, StepPath::constant(&g, qi(4)));
        let inst = obstacle_model(&tree, &b, &y).unwrap();
        let d = dual(&tree, &g, &[0, 0], &[0, -2]);
        assert_eq!(obstacle_support(&tree, &b, &d).unwrap(), Ext::Fin(qi(-2)));
        assert_eq!(support_ds(&inst, &d).unwrap(), Ext::Fin(qi(-2)));

        let bad = ScalarProcess::new(g, vec![qs(&[0, 0])], vec![qs(&[1])], Flag::Optional).unwrap();
        assert!(matches!(obstacle_model(&tree, &bad, &y), Err(Error::Precondition { slot: 0, .. })));
    }

    #[test]
    fn bidask_examples() {
        let g = TimeGrid::uniform(1);
        let tree = ScenarioTree::deterministic(2);
        let b = ScalarProcess::constant(&tree, &g, qi(-1));
        let a = ScalarProcess::constant(&tree, &g, qi(1));
        let y = RandomPath::deterministic(&tree, StepPath::constant(&g, qi(0)));
        let inst = bidask_model(&tree, &b, &a, &y).unwrap();
        for u in [1, -1] {
            let d = dual(&tree, &g, &[u, 0], &[0, 0]);
            assert_eq!(bidask_support(&tree, &b, &a, &d).unwrap(), Ext::Fin(qi(1)));
            assert_eq!(support_ds(&inst, &d).unwrap(), Ext::Fin(qi(1)));
        }

        let b = ScalarProcess::new(g.clone(), vec![qs(&[0, 1])], vec![qs(&[0])], Flag::Optional).unwrap();
        let a = ScalarProcess::new(g.clone(), vec![qs(&[2, 3])], vec![qs(&[2])], Flag::Optional).unwrap();
        let y = RandomPath::deterministic(&tree, StepPath::new(g.clone(), vec![qi(1), qi(2)]).unwrap());
        let inst = bidask_model(&tree, &b, &a, &y).unwrap();
        let d = dual(&tree, &g, &[0, 0], &[0, 1]);
        assert_eq!(bidask_support(&tree, &b, &a, &d).unwrap(), Ext::Fin(qi(2)));
        assert_eq!(support_ds(&inst, &d).unwrap(), Ext::Fin(qi(2)));

        let y = RandomPath::deterministic(&tree, StepPath::constant(&g, qi(2)));
        assert!(matches!(bidask_model(&tree, &b, &a, &y), Err(Error::Precondition { slot: 0, .. })));
    }

    #[test]
    fn currency_examples() {
        let model = CurrencyModel::deterministic(ConeMap::constant(PolyCone::orthant(2).polar(), 1));
        assert!(model.check().ok);
        let mut d = VecDual::zero(1, 2, 2);
        assert!(model.member(&d).unwrap());
        d.u[0][0] = vec![qi(-1), qi(-1)];
        assert!(model.member(&d).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cert = model.certify(&d, 20, &mut rng).unwrap();
        assert!(cert.member && cert.nonpositive);
        d.u[0][0] = vec![qi(1), qi(0)];
        assert!(!model.member(&d).unwrap());
    }
}
