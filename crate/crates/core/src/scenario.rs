//! Finite scenario trees and random objects on them.
//!
//! A filtration is a chain of partitions of the scenario set, one per grid
//! time. Optional data at slot `i` is constant on the cells of `partitions[i]`,
//! predictable data on the cells of `partitions[i-1]` (and on `partitions[0]`
//! at slot 0).

use std::collections::BTreeSet;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::{ext_sum, Ext, Q};
use crate::plconvex::PLConvex;
use crate::setmaps::SetMap;
use crate::timegrid::{eval_i, pairing, GridMeasure, StepPath, TimeGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    Optional,
    Predictable,
    Raw,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioTree {
    ids: Vec<String>,
    probs: Vec<Q>,
    partitions: Vec<Vec<Vec<usize>>>,
    /// `labels[i][s]` is the index of the cell of `partitions[i]` holding `s`.
    labels: Vec<Vec<usize>>,
}

impl ScenarioTree {
    pub fn new(ids: Vec<String>, probs: Vec<Q>, partitions: Vec<Vec<Vec<usize>>>) -> Result<ScenarioTree> {
        let n = ids.len();
        if n == 0 || probs.len() != n {
            return Err(Error::Tree("need one probability per scenario".into()));
        }
        if ids.iter().collect::<BTreeSet<_>>().len() != n {
            return Err(Error::Tree("duplicate scenario id".into()));
        }
        if probs.iter().any(|p| !p.is_positive()) {
            return Err(Error::Tree("probabilities must be positive".into()));
        }
        if probs.iter().sum::<Q>() != Q::one() {
            return Err(Error::Tree("probabilities must sum to 1".into()));
        }
        if partitions.is_empty() {
            return Err(Error::Tree("at least one partition is required".into()));
        }
        let mut labels = Vec::with_capacity(partitions.len());
        for (i, part) in partitions.iter().enumerate() {
            let mut label = vec![usize::MAX; n];
            for (c, cell) in part.iter().enumerate() {
                if cell.is_empty() {
                    return Err(Error::Tree(format!("partition {i} has an empty cell")));
                }
                for &s in cell {
                    if s >= n || label[s] != usize::MAX {
                        return Err(Error::Tree(format!("partition {i} is not a partition of the scenarios")));
                    }
                    label[s] = c;
                }
            }
            if label.contains(&usize::MAX) {
                return Err(Error::Tree(format!("partition {i} does not cover every scenario")));
            }
            labels.push(label);
        }
        for i in 1..partitions.len() {
            for cell in &partitions[i] {
                let parent = labels[i - 1][cell[0]];
                if cell.iter().any(|&s| labels[i - 1][s] != parent) {
                    return Err(Error::Tree(format!("partition {i} does not refine partition {}", i - 1)));
                }
            }
        }
        Ok(ScenarioTree {
            ids,
            probs,
            partitions,
            labels,
        })
    }

    /// One scenario of probability one, with `slots` trivial partitions.
    pub fn deterministic(slots: usize) -> ScenarioTree {
        ScenarioTree::new(vec!["s".into()], vec![Q::one()], vec![vec![vec![0]]; slots]).expect("valid")
    }

    /// Scenarios revealed all at once at slot `split` (coarse before, discrete from then on).
    pub fn split_at(ids: Vec<String>, probs: Vec<Q>, slots: usize, split: usize) -> Result<ScenarioTree> {
        let n = ids.len();
        let coarse = vec![(0..n).collect::<Vec<_>>()];
        let fine: Vec<Vec<usize>> = (0..n).map(|s| vec![s]).collect();
        let parts = (0..slots).map(|i| if i < split { coarse.clone() } else { fine.clone() }).collect();
        ScenarioTree::new(ids, probs, parts)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn slots(&self) -> usize {
        self.partitions.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn probs(&self) -> &[Q] {
        &self.probs
    }

    pub fn partitions(&self) -> &[Vec<Vec<usize>>] {
        &self.partitions
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|s| s == id)
    }

    /// The partition describing information strictly before slot `i`.
    pub fn predictable_index(i: usize) -> usize {
        i.saturating_sub(1)
    }

    pub fn cell_of(&self, partition: usize, s: usize) -> usize {
        self.labels[partition][s]
    }

    pub fn cells(&self, partition: usize) -> &[Vec<usize>] {
        &self.partitions[partition]
    }

    pub fn cell_prob(&self, cell: &[usize]) -> Q {
        cell.iter().map(|&s| self.probs[s].clone()).sum()
    }

    /// `E[X]` for an extended per-scenario quantity with `0·∞ = 0`.
    pub fn expect(&self, f: impl Fn(usize) -> Ext) -> Ext {
        ext_sum((0..self.len()).map(|s| f(s).scale_nonneg(&self.probs[s])))
    }

    pub fn expect_q(&self, f: impl Fn(usize) -> Q) -> Q {
        (0..self.len()).map(|s| f(s) * &self.probs[s]).sum()
    }

    /// Slot data is constant on every cell of the given partition.
    pub fn first_violation<T: PartialEq>(
        &self,
        partition: usize,
        value: impl Fn(usize) -> T,
    ) -> Option<usize> {
        for cell in &self.partitions[partition] {
            let first = value(cell[0]);
            if let Some(&s) = cell.iter().find(|&&s| value(s) != first) {
                return Some(s);
            }
        }
        None
    }

    /// Each slot of the coarse tree becomes `factor` slots carrying the same partition.
    pub fn refine(&self, factor: usize) -> ScenarioTree {
        let last = self.partitions.len() - 1;
        let mut parts = Vec::new();
        for p in &self.partitions[..last] {
            for _ in 0..factor {
                parts.push(p.clone());
            }
        }
        parts.push(self.partitions[last].clone());
        ScenarioTree::new(self.ids.clone(), self.probs.clone(), parts).expect("refinement of a valid tree")
    }

    fn check_slots(&self, slots: usize) -> Result<()> {
        if slots != self.slots() {
            return Err(Error::Grid(format!(
                "tree has {} partitions but the data has {} slots",
                self.slots(),
                slots
            )));
        }
        Ok(())
    }

    fn check_count(&self, count: usize) -> Result<()> {
        if count != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                got: count,
            });
        }
        Ok(())
    }
}

fn shared_grid<'a>(grids: impl Iterator<Item = &'a TimeGrid>) -> Result<TimeGrid> {
    let mut out: Option<&TimeGrid> = None;
    for g in grids {
        match out {
            None => out = Some(g),
            Some(o) if o != g => return Err(Error::Grid("scenarios use different grids".into())),
            _ => {}
        }
    }
    out.cloned().ok_or_else(|| Error::Tree("no scenarios".into()))
}

/// Measurability of slot-wise data for the two filtrations in play.
fn check_flag<T: PartialEq>(
    tree: &ScenarioTree,
    slots: usize,
    predictable: bool,
    value: impl Fn(usize, usize) -> T,
) -> Result<()> {
    for i in 0..slots {
        let part = if predictable { ScenarioTree::predictable_index(i) } else { i };
        if let Some(scenario) = tree.first_violation(part, |s| value(s, i)) {
            return Err(if predictable {
                Error::NotPredictable { scenario, slot: i }
            } else {
                Error::NotAdapted { scenario, slot: i }
            });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomPath {
    paths: Vec<StepPath>,
}

impl RandomPath {
    pub fn new(paths: Vec<StepPath>) -> Result<RandomPath> {
        shared_grid(paths.iter().map(StepPath::grid))?;
        Ok(RandomPath { paths })
    }

    pub fn deterministic(tree: &ScenarioTree, path: StepPath) -> RandomPath {
        RandomPath {
            paths: vec![path; tree.len()],
        }
    }

    pub fn from_values(grid: &TimeGrid, values: Vec<Vec<Q>>) -> Result<RandomPath> {
        RandomPath::new(
            values
                .into_iter()
                .map(|v| StepPath::new(grid.clone(), v))
                .collect::<Result<_>>()?,
        )
    }

    pub fn paths(&self) -> &[StepPath] {
        &self.paths
    }

    pub fn path(&self, s: usize) -> &StepPath {
        &self.paths[s]
    }

    pub fn grid(&self) -> &TimeGrid {
        self.paths[0].grid()
    }

    pub fn value(&self, s: usize, i: usize) -> &Q {
        &self.paths[s].values()[i]
    }

    pub fn check_adapted(&self, tree: &ScenarioTree) -> Result<()> {
        tree.check_count(self.paths.len())?;
        tree.check_slots(self.grid().len())?;
        check_flag(tree, self.grid().len(), false, |s, i| self.value(s, i))
    }

    pub fn check_predictable(&self, tree: &ScenarioTree) -> Result<()> {
        tree.check_count(self.paths.len())?;
        tree.check_slots(self.grid().len())?;
        check_flag(tree, self.grid().len(), true, |s, i| self.value(s, i))
    }

    pub fn is_adapted(&self, tree: &ScenarioTree) -> bool {
        self.check_adapted(tree).is_ok()
    }

    pub fn is_predictable(&self, tree: &ScenarioTree) -> bool {
        self.check_predictable(tree).is_ok()
    }

    fn project(&self, tree: &ScenarioTree, predictable: bool) -> RandomPath {
        let slots = self.grid().len();
        let mut values = vec![Vec::with_capacity(slots); tree.len()];
        for i in 0..slots {
            let part = if predictable { ScenarioTree::predictable_index(i) } else { i };
            let mut slot = vec![Q::zero(); tree.len()];
            for cell in tree.cells(part) {
                let mass = tree.cell_prob(cell);
                let avg = cell.iter().map(|&s| self.value(s, i) * &tree.probs()[s]).sum::<Q>() / mass;
                for &s in cell {
                    slot[s] = avg.clone();
                }
            }
            for (s, v) in slot.into_iter().enumerate() {
                values[s].push(v);
            }
        }
        RandomPath::from_values(self.grid(), values).expect("same shape")
    }

    /// Slot-wise conditional expectation given `partitions[i]`.
    pub fn optional_projection(&self, tree: &ScenarioTree) -> RandomPath {
        self.project(tree, false)
    }

    /// Slot-wise conditional expectation given `partitions[i-1]`.
    pub fn predictable_projection(&self, tree: &ScenarioTree) -> RandomPath {
        self.project(tree, true)
    }

    pub fn refine(&self, factor: usize) -> RandomPath {
        RandomPath {
            paths: self.paths.iter().map(|p| p.refine(factor)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomMeasure {
    measures: Vec<GridMeasure>,
}

impl RandomMeasure {
    pub fn new(measures: Vec<GridMeasure>) -> Result<RandomMeasure> {
        shared_grid(measures.iter().map(GridMeasure::grid))?;
        Ok(RandomMeasure { measures })
    }

    pub fn deterministic(tree: &ScenarioTree, m: GridMeasure) -> RandomMeasure {
        RandomMeasure {
            measures: vec![m; tree.len()],
        }
    }

    pub fn zero(tree: &ScenarioTree, grid: &TimeGrid) -> RandomMeasure {
        RandomMeasure::deterministic(tree, GridMeasure::zero(grid))
    }

    pub fn from_atoms(grid: &TimeGrid, atoms: Vec<Vec<Q>>) -> Result<RandomMeasure> {
        RandomMeasure::new(
            atoms
                .into_iter()
                .map(|a| GridMeasure::new(grid.clone(), a))
                .collect::<Result<_>>()?,
        )
    }

    pub fn measures(&self) -> &[GridMeasure] {
        &self.measures
    }

    pub fn measure(&self, s: usize) -> &GridMeasure {
        &self.measures[s]
    }

    pub fn grid(&self) -> &TimeGrid {
        self.measures[0].grid()
    }

    pub fn atom(&self, s: usize, i: usize) -> &Q {
        &self.measures[s].atoms()[i]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.measures.iter().all(GridMeasure::is_nonnegative)
    }

    pub fn check_nonnegative(&self) -> Result<()> {
        self.measures.iter().try_for_each(GridMeasure::check_nonnegative)
    }

    pub fn is_zero(&self) -> bool {
        self.measures.iter().all(|m| m.atoms().iter().all(Q::is_zero))
    }

    pub fn check_adapted(&self, tree: &ScenarioTree) -> Result<()> {
        tree.check_count(self.measures.len())?;
        tree.check_slots(self.grid().len())?;
        check_flag(tree, self.grid().len(), false, |s, i| self.atom(s, i))
    }

    pub fn check_predictable(&self, tree: &ScenarioTree) -> Result<()> {
        tree.check_count(self.measures.len())?;
        tree.check_slots(self.grid().len())?;
        check_flag(tree, self.grid().len(), true, |s, i| self.atom(s, i))
    }

    pub fn is_adapted(&self, tree: &ScenarioTree) -> bool {
        self.check_adapted(tree).is_ok()
    }

    pub fn is_predictable(&self, tree: &ScenarioTree) -> bool {
        self.check_predictable(tree).is_ok()
    }

    /// `E Σ_i m_i` weighted by `|atom|`.
    pub fn expected_variation(&self, tree: &ScenarioTree) -> Q {
        tree.expect_q(|s| self.measures[s].total_variation())
    }

    pub fn refine(&self, factor: usize) -> RandomMeasure {
        RandomMeasure {
            measures: self.measures.iter().map(|m| m.refine(factor)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomSetMap {
    maps: Vec<SetMap>,
}

impl RandomSetMap {
    pub fn new(maps: Vec<SetMap>) -> Result<RandomSetMap> {
        shared_grid(maps.iter().map(SetMap::grid))?;
        Ok(RandomSetMap { maps })
    }

    pub fn deterministic(tree: &ScenarioTree, m: SetMap) -> RandomSetMap {
        RandomSetMap {
            maps: vec![m; tree.len()],
        }
    }

    pub fn maps(&self) -> &[SetMap] {
        &self.maps
    }

    pub fn map(&self, s: usize) -> &SetMap {
        &self.maps[s]
    }

    pub fn grid(&self) -> &TimeGrid {
        self.maps[0].grid()
    }

    pub fn vec_map(&self) -> RandomSetMap {
        RandomSetMap {
            maps: self.maps.iter().map(SetMap::vec_map).collect(),
        }
    }

    /// Point values on the slot partition; cell values on the partition of the
    /// cell's left end for both flags.
    fn check(&self, tree: &ScenarioTree, predictable: bool) -> Result<()> {
        tree.check_count(self.maps.len())?;
        tree.check_slots(self.grid().len())?;
        let n = self.grid().len();
        check_flag(tree, n, predictable, |s, i| &self.maps[s].point_vals()[i])?;
        check_flag(tree, n - 1, false, |s, i| &self.maps[s].open_vals()[i])
    }

    pub fn check_adapted(&self, tree: &ScenarioTree) -> Result<()> {
        self.check(tree, false)
    }

    pub fn check_predictable(&self, tree: &ScenarioTree) -> Result<()> {
        self.check(tree, true)
    }

    /// `y(ω) ∈ D(S(ω))` for every scenario.
    pub fn is_selection(&self, y: &RandomPath) -> bool {
        self.maps.iter().zip(y.paths()).all(|(m, p)| m.is_selection(p))
    }

    pub fn selections_exist(&self) -> bool {
        self.maps.iter().all(SetMap::selections_exist)
    }

    pub fn refine(&self, factor: usize) -> RandomSetMap {
        RandomSetMap {
            maps: self.maps.iter().map(|m| m.refine(factor)).collect(),
        }
    }
}

/// Per-scenario, per-slot piecewise-linear convex integrand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomIntegrand {
    slots: Vec<Vec<PLConvex>>,
    flag: Flag,
}

impl RandomIntegrand {
    pub fn new(slots: Vec<Vec<PLConvex>>, flag: Flag) -> Result<RandomIntegrand> {
        let len = slots.first().map(Vec::len).ok_or_else(|| Error::Tree("no scenarios".into()))?;
        if slots.iter().any(|h| h.len() != len) {
            return Err(Error::Grid("integrand slot counts differ across scenarios".into()));
        }
        Ok(RandomIntegrand { slots, flag })
    }

    pub fn deterministic(tree: &ScenarioTree, h: Vec<PLConvex>, flag: Flag) -> RandomIntegrand {
        RandomIntegrand {
            slots: vec![h; tree.len()],
            flag,
        }
    }

    pub fn constant(tree: &ScenarioTree, h: PLConvex, flag: Flag) -> RandomIntegrand {
        RandomIntegrand::deterministic(tree, vec![h; tree.slots()], flag)
    }

    pub fn flag(&self) -> Flag {
        self.flag
    }

    pub fn with_flag(mut self, flag: Flag) -> RandomIntegrand {
        self.flag = flag;
        self
    }

    pub fn scenario(&self, s: usize) -> &[PLConvex] {
        &self.slots[s]
    }

    pub fn at(&self, s: usize, i: usize) -> &PLConvex {
        &self.slots[s][i]
    }

    pub fn len(&self) -> usize {
        self.slots[0].len()
    }

    /// Number of scenarios.
    pub fn count(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots[0].is_empty()
    }

    pub fn conjugate(&self) -> RandomIntegrand {
        RandomIntegrand {
            slots: self
                .slots
                .iter()
                .map(|h| h.iter().map(PLConvex::conjugate).collect())
                .collect(),
            flag: self.flag,
        }
    }

    pub fn check_adapted(&self, tree: &ScenarioTree) -> Result<()> {
        tree.check_count(self.slots.len())?;
        tree.check_slots(self.len())?;
        check_flag(tree, self.len(), false, |s, i| &self.slots[s][i])
    }

    pub fn check_predictable(&self, tree: &ScenarioTree) -> Result<()> {
        tree.check_count(self.slots.len())?;
        tree.check_slots(self.len())?;
        check_flag(tree, self.len(), true, |s, i| &self.slots[s][i])
    }

    /// Verifies the measurability the flag claims.
    pub fn check_flag(&self, tree: &ScenarioTree) -> Result<()> {
        match self.flag {
            Flag::Optional => self.check_adapted(tree),
            Flag::Predictable => self.check_predictable(tree),
            Flag::Raw => Ok(()),
        }
    }

    /// `E I_h(w)` against `μ`.
    pub fn expected_integral(&self, tree: &ScenarioTree, w: &RandomPath, mu: &RandomMeasure) -> Result<Ext> {
        let per = (0..tree.len())
            .map(|s| eval_i(&self.slots[s], w.path(s), mu.measure(s)))
            .collect::<Result<Vec<_>>>()?;
        Ok(tree.expect(|s| per[s].clone()))
    }

    /// Optional integrands extend from the left end of each cell, predictable
    /// ones from the right end.
    pub fn refine(&self, factor: usize) -> RandomIntegrand {
        self.refine_side(factor, self.flag == Flag::Predictable)
    }

    pub fn refine_side(&self, factor: usize, from_right: bool) -> RandomIntegrand {
        RandomIntegrand {
            slots: self.slots.iter().map(|h| refine_slots(h, factor, from_right)).collect(),
            flag: self.flag,
        }
    }
}

/// Extends slot data to a grid refined by `factor`; new slots copy the
/// neighbouring original slot on the chosen side.
pub fn refine_slots<T: Clone>(vals: &[T], factor: usize, from_right: bool) -> Vec<T> {
    let mut out = Vec::with_capacity((vals.len() - 1) * factor + 1);
    for i in 0..vals.len() - 1 {
        out.push(vals[i].clone());
        let fill = if from_right { &vals[i + 1] } else { &vals[i] };
        for _ in 1..factor {
            out.push(fill.clone());
        }
    }
    out.push(vals[vals.len() - 1].clone());
    out
}

/// `E⟨y,(u,ũ)⟩`.
pub fn expected_pairing(tree: &ScenarioTree, y: &RandomPath, u: &RandomMeasure, ut: &RandomMeasure) -> Result<Q> {
    let per = (0..tree.len())
        .map(|s| pairing(y.path(s), u.measure(s), ut.measure(s)))
        .collect::<Result<Vec<_>>>()?;
    Ok(tree.expect_q(|s| per[s].clone()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JensenSide {
    pub lhs: String,
    pub rhs: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JensenReport {
    pub lhs: Ext,
    pub rhs: Ext,
    pub ok: bool,
    /// Minorant `h(x) ≥ v·x − α` per scenario and slot.
    pub minorant: Vec<Vec<(Q, Q)>>,
    pub predictable: Option<(Ext, Ext, bool)>,
}

/// The affine minorant read off a point of `dom h*`: `h(x) ≥ v x − h*(v)`.
/// Picks the point of `dom h*` nearest the origin so the choice inherits the
/// measurability of `h`.
pub fn affine_minorant(h: &PLConvex) -> (Q, Q) {
    let hs = h.conjugate();
    let v = hs.dom().anchor().expect("conjugate of a proper function is proper");
    let alpha = hs.eval_q(&v).into_finite().expect("finite on its domain");
    (v, alpha)
}

/// `E I_h(w) ≥ E I_h(ᵒw)`, and the predictable variant when `h` and `μ` are predictable.
pub fn jensen_check(
    tree: &ScenarioTree,
    h: &RandomIntegrand,
    mu: &RandomMeasure,
    w: &RandomPath,
) -> Result<JensenReport> {
    h.check_adapted(tree)?;
    mu.check_adapted(tree)?;
    mu.check_nonnegative()?;
    let minorant: Vec<Vec<(Q, Q)>> = (0..tree.len())
        .map(|s| h.scenario(s).iter().map(affine_minorant).collect())
        .collect();
    check_flag(tree, h.len(), false, |s, i| &minorant[s][i])
        .map_err(|_| Error::Assumption("minorant is not optional".into()))?;
    let lhs = h.expected_integral(tree, w, mu)?;
    let rhs = h.expected_integral(tree, &w.optional_projection(tree), mu)?;
    let predictable = if h.check_predictable(tree).is_ok() && mu.check_predictable(tree).is_ok() {
        let prhs = h.expected_integral(tree, &w.predictable_projection(tree), mu)?;
        Some((lhs.clone(), prhs.clone(), lhs >= prhs))
    } else {
        None
    };
    Ok(JensenReport {
        ok: lhs >= rhs,
        lhs,
        rhs,
        minorant,
        predictable,
    })
}

/// `E∫v dμ = E∫ᵒv dμ`.
pub fn optionality_identity_check(tree: &ScenarioTree, v: &RandomPath, mu: &RandomMeasure) -> Result<bool> {
    mu.check_nonnegative()?;
    let zero = RandomMeasure::zero(tree, mu.grid());
    let lhs = expected_pairing(tree, v, mu, &zero)?;
    let rhs = expected_pairing(tree, &v.optional_projection(tree), mu, &zero)?;
    Ok(lhs == rhs)
}

/// Runs the identity over the indicator family `1_{ω=s, slot=i}`; returns the
/// first member on which it fails.
pub fn optionality_counterexample(tree: &ScenarioTree, mu: &RandomMeasure) -> Result<Option<RandomPath>> {
    let grid = mu.grid().clone();
    for i in 0..grid.len() {
        for s in 0..tree.len() {
            let values = (0..tree.len())
                .map(|r| {
                    (0..grid.len())
                        .map(|j| if r == s && j == i { Q::one() } else { Q::zero() })
                        .collect()
                })
                .collect();
            let v = RandomPath::from_values(&grid, values)?;
            if !optionality_identity_check(tree, &v, mu)? {
                return Ok(Some(v));
            }
        }
    }
    Ok(None)
}

pub fn is_optional_measure(tree: &ScenarioTree, mu: &RandomMeasure) -> Result<bool> {
    Ok(optionality_counterexample(tree, mu)?.is_none())
}

/// Atom slots `{i | ũ_i ≠ 0}` per scenario.
pub fn predictable_atoms(tree: &ScenarioTree, ut: &RandomMeasure) -> Result<Vec<BTreeSet<usize>>> {
    ut.check_predictable(tree)?;
    Ok(ut
        .measures()
        .iter()
        .map(|m| {
            m.atoms()
                .iter()
                .enumerate()
                .filter(|(_, a)| !a.is_zero())
                .map(|(i, _)| i)
                .collect()
        })
        .collect())
}

/// The discrete announcing time of an atom at slot `j`; none at the origin.
pub fn announce(j: usize) -> Option<usize> {
    j.checked_sub(1)
}

/// `z_i = ỹ_i` when `i+1` is an atom slot of the scenario, `z_i = y_i` otherwise.
pub fn paste(
    tree: &ScenarioTree,
    y: &RandomPath,
    ytilde: &RandomPath,
    atoms: &[BTreeSet<usize>],
) -> Result<RandomPath> {
    y.check_adapted(tree)?;
    ytilde.check_adapted(tree)?;
    tree.check_count(atoms.len())?;
    let n = y.grid().len();
    check_flag(tree, n, true, |s, j| atoms[s].contains(&j))?;
    let values = (0..tree.len())
        .map(|s| {
            (0..n)
                .map(|i| {
                    if atoms[s].contains(&(i + 1)) {
                        ytilde.value(s, i).clone()
                    } else {
                        y.value(s, i).clone()
                    }
                })
                .collect()
        })
        .collect();
    RandomPath::from_values(y.grid(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::{q, qi};
    use crate::plconvex::RInterval;

    fn two(slots: usize, split: usize) -> ScenarioTree {
        ScenarioTree::split_at(vec!["a".into(), "b".into()], vec![q(1, 2), q(1, 2)], slots, split).unwrap()
    }

    fn rp(grid: &TimeGrid, v: Vec<Vec<i64>>) -> RandomPath {
        RandomPath::from_values(grid, v.into_iter().map(|r| r.into_iter().map(qi).collect()).collect()).unwrap()
    }

    fn rm(grid: &TimeGrid, v: Vec<Vec<i64>>) -> RandomMeasure {
        RandomMeasure::from_atoms(grid, v.into_iter().map(|r| r.into_iter().map(qi).collect()).collect()).unwrap()
    }

    fn abs() -> PLConvex {
        PLConvex::max_affine(&[(qi(1), qi(0)), (qi(-1), qi(0))]).unwrap()
    }

    #[test]
    fn tree_validation() {
        assert!(ScenarioTree::new(vec!["a".into()], vec![q(1, 2)], vec![vec![vec![0]]]).is_err());
        let bad = ScenarioTree::new(
            vec!["a".into(), "b".into()],
            vec![q(1, 2), q(1, 2)],
            vec![vec![vec![0], vec![1]], vec![vec![0, 1]]],
        );
        assert!(matches!(bad, Err(Error::Tree(_))));
        let t = two(3, 1);
        assert_eq!(t.refine(2).slots(), 5);
        assert_eq!(t.refine(2).partitions()[1], t.partitions()[0]);
    }

    #[test]
    fn adapted_and_predictable_examples() {
        let g = TimeGrid::uniform(2);
        let t = two(3, 1);
        let det = rp(&g, vec![vec![1, 2, 3], vec![1, 2, 3]]);
        assert!(det.is_adapted(&t) && det.is_predictable(&t));
        let splits0 = rp(&g, vec![vec![1, 2, 3], vec![2, 2, 3]]);
        assert_eq!(splits0.check_adapted(&t), Err(Error::NotAdapted { scenario: 1, slot: 0 }));
        let splits1 = rp(&g, vec![vec![1, 2, 3], vec![1, 4, 3]]);
        assert!(splits1.is_adapted(&t));
        assert_eq!(splits1.check_predictable(&t), Err(Error::NotPredictable { scenario: 1, slot: 1 }));
    }

    #[test]
    fn projection_examples() {
        let g = TimeGrid::uniform(1);
        let t = two(2, 1);
        let w = rp(&g, vec![vec![2, 5], vec![4, 7]]);
        let o = w.optional_projection(&t);
        assert_eq!(o.value(0, 0), &qi(3));
        assert_eq!(o.value(1, 0), &qi(3));
        assert_eq!(o.value(1, 1), &qi(7));
        let p = w.predictable_projection(&t);
        assert_eq!(p.value(0, 1), &qi(6));
        assert_eq!(o.optional_projection(&t), o);
        assert_eq!(o.predictable_projection(&t), p);
        let det = rp(&g, vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(det.predictable_projection(&t), det);
    }

    #[test]
    fn jensen_examples() {
        let g = TimeGrid::uniform(1);
        let t = two(2, 1);
        let h = RandomIntegrand::constant(&t, abs(), Flag::Optional);
        let mu = rm(&g, vec![vec![1, 0], vec![1, 0]]);
        let w = rp(&g, vec![vec![1, 0], vec![-1, 0]]);
        let r = jensen_check(&t, &h, &mu, &w).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone(), r.ok), (Ext::Fin(qi(1)), Ext::zero(), true));

        let lin = RandomIntegrand::constant(&t, PLConvex::affine(qi(3), qi(0)), Flag::Optional);
        let r = jensen_check(&t, &lin, &mu, &w).unwrap();
        assert_eq!(r.lhs, r.rhs);

        let adapted = rp(&g, vec![vec![2, 1], vec![2, -1]]);
        let r = jensen_check(&t, &h, &mu, &adapted).unwrap();
        assert_eq!(r.lhs, r.rhs);
    }

    #[test]
    fn optionality_examples() {
        let g = TimeGrid::uniform(1);
        let t = two(2, 1);
        let adapted = rm(&g, vec![vec![1, 2], vec![1, 5]]);
        assert!(is_optional_measure(&t, &adapted).unwrap());
        let raw = rm(&g, vec![vec![1, 0], vec![3, 0]]);
        let witness = optionality_counterexample(&t, &raw).unwrap().unwrap();
        assert!(!optionality_identity_check(&t, &witness, &raw).unwrap());
        let v = rp(&g, vec![vec![1, 1], vec![1, -1]]);
        assert!(optionality_identity_check(&t, &v, &raw).unwrap());
    }

    #[test]
    fn atoms_and_pasting() {
        let g = TimeGrid::uniform(3);
        let t = two(4, 2);
        let ut = rm(&g, vec![vec![0, 0, 1, 0], vec![0, 0, 1, 0]]);
        let atoms = predictable_atoms(&t, &ut).unwrap();
        assert_eq!(atoms[0], BTreeSet::from([2]));
        assert_eq!(announce(2), Some(1));
        assert!(predictable_atoms(&t, &RandomMeasure::zero(&t, &g)).unwrap()[0].is_empty());
        let bad = rm(&g, vec![vec![0, 0, 1, 0], vec![0, 0, 2, 0]]);
        assert!(matches!(predictable_atoms(&t, &bad), Err(Error::NotPredictable { .. })));

        let y = rp(&g, vec![vec![1, 1, 1, 1], vec![1, 1, 1, 1]]);
        let yt = rp(&g, vec![vec![5, 6, 7, 8], vec![5, 6, 7, 8]]);
        let none = vec![BTreeSet::new(), BTreeSet::new()];
        assert_eq!(paste(&t, &y, &yt, &none).unwrap(), y);
        let z = paste(&t, &y, &yt, &atoms).unwrap();
        assert_eq!(z.path(0).values(), &[qi(1), qi(6), qi(1), qi(1)]);
        let all: Vec<BTreeSet<usize>> = vec![(1..4).collect(), (1..4).collect()];
        let z = paste(&t, &y, &yt, &all).unwrap();
        assert_eq!(z.path(1).values(), &[qi(5), qi(6), qi(7), qi(1)]);
        assert!(z.is_adapted(&t));
    }

    #[test]
    fn set_map_flags_and_selection() {
        let g = TimeGrid::uniform(1);
        let t = two(2, 1);
        let a = SetMap::constant(&g, RInterval::finite(qi(0), qi(1))).unwrap();
        let b = SetMap::regular(&g, vec![RInterval::finite(qi(0), qi(1)), RInterval::finite(qi(2), qi(3))]).unwrap();
        let s = RandomSetMap::new(vec![a, b]).unwrap();
        assert!(s.check_adapted(&t).is_ok());
        assert!(s.check_predictable(&t).is_err());
        assert!(s.is_selection(&rp(&g, vec![vec![0, 1], vec![1, 2]])));
        assert!(!s.is_selection(&rp(&g, vec![vec![0, 1], vec![1, 1]])));
    }

    #[test]
    fn refine_slots_sides() {
        assert_eq!(refine_slots(&[1, 2, 3], 2, false), vec![1, 1, 2, 2, 3]);
        assert_eq!(refine_slots(&[1, 2, 3], 2, true), vec![1, 2, 2, 3, 3]);
    }
}
