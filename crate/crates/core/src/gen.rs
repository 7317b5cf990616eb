//! Seeded random instances for property checks, benchmarks and the CLI.
//!
//! Every generator draws from a caller-supplied RNG. Numbers live on small
//! lattices (integers and halves) so that exact arithmetic stays cheap and all
//! vertices sit on the `1/100` lattice used by the brute-force oracles.

use num::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::duality::{DualPair, Instance};
use crate::ext::{q, qi, Ext, Q};
use crate::plconvex::{PLConvex, RInterval};
use crate::polycone::{ConeMap, PolyCone, Vector};
use crate::scenario::{Flag, RandomIntegrand, RandomMeasure, RandomPath, ScenarioTree};
use crate::setmaps::SetMap;
use crate::timegrid::{GridMeasure, StepPath, TimeGrid};

fn half<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> Q {
    q(rng.gen_range(2 * lo..=2 * hi), 2)
}

fn distinct_sorted<R: Rng>(rng: &mut R, k: usize, lo: i64, hi: i64) -> Vec<Q> {
    let mut pool: Vec<i64> = (2 * lo..=2 * hi).collect();
    pool.shuffle(rng);
    let mut out: Vec<Q> = pool.into_iter().take(k).map(|v| q(v, 2)).collect();
    out.sort();
    out
}

/// Random canonical piecewise-linear convex function: up to three kinks,
/// strictly increasing slopes and any of the five domain shapes.
pub fn plconvex<R: Rng>(rng: &mut R) -> PLConvex {
    let shape = rng.gen_range(0..5);
    let (lo, hi) = match shape {
        0 => (Ext::NegInf, Ext::PosInf),
        1 => (Ext::Fin(half(rng, -3, 1)), Ext::PosInf),
        2 => (Ext::NegInf, Ext::Fin(half(rng, -1, 3))),
        3 => {
            let ends = distinct_sorted(rng, 2, -4, 4);
            (Ext::Fin(ends[0].clone()), Ext::Fin(ends[1].clone()))
        }
        _ => {
            let x = half(rng, -3, 3);
            (Ext::Fin(x.clone()), Ext::Fin(x))
        }
    };
    let dom = RInterval::new(lo.clone(), hi.clone()).expect("ordered");
    let anchor = dom.anchor().expect("nonempty");
    let value = half(rng, -3, 3);
    if shape == 4 {
        return PLConvex::new(lo, hi, vec![], vec![Q::zero()], anchor, value).expect("valid");
    }
    let inside = |b: &Q| lo.cmp_q(b).is_lt() && hi.cmp_q(b).is_gt();
    let k = rng.gen_range(0..=3);
    let bps: Vec<Q> = distinct_sorted(rng, k, -4, 4).into_iter().filter(|b| inside(b)).collect();
    let mut slopes: Vec<Q> = distinct_sorted(rng, bps.len() + 1, -3, 3);
    if rng.gen_bool(0.2) {
        slopes.iter_mut().for_each(|s| *s *= qi(2));
    }
    PLConvex::new(lo, hi, bps, slopes, anchor, value).expect("valid")
}

/// Random PL function restricted to `c` (assumed nonempty and inside its domain bounds).
fn plconvex_on<R: Rng>(rng: &mut R, c: &RInterval) -> PLConvex {
    loop {
        let k = rng.gen_range(0..=2);
        let bps = distinct_sorted(rng, k, -3, 3);
        let slopes = distinct_sorted(rng, k + 1, -3, 3);
        let h = PLConvex::new(Ext::NegInf, Ext::PosInf, bps, slopes, Q::zero(), half(rng, -2, 2)).expect("valid");
        if let Some(r) = h.restrict(c) {
            return r;
        }
    }
}

fn solid_interval<R: Rng>(rng: &mut R) -> RInterval {
    let ends = distinct_sorted(rng, 2, -3, 3);
    RInterval::finite(ends[0].clone(), ends[1].clone())
}

fn any_interval<R: Rng>(rng: &mut R) -> RInterval {
    match rng.gen_range(0..6) {
        0 => RInterval::point(half(rng, -2, 2)),
        1 => RInterval::at_least(half(rng, -2, 2)),
        2 => RInterval::at_most(half(rng, -2, 2)),
        _ => solid_interval(rng),
    }
}

fn interval_inside<R: Rng>(rng: &mut R, c: &RInterval) -> RInterval {
    let (lo, hi) = match c {
        RInterval::Closed {
            lo: Ext::Fin(l),
            hi: Ext::Fin(h),
        } => (l.clone(), h.clone()),
        _ => return c.clone(),
    };
    let span = (&hi - &lo) * qi(4);
    let steps = span.to_integer().try_into().unwrap_or(0i64);
    let a = rng.gen_range(0..=steps);
    let b = rng.gen_range(a..=steps);
    RInterval::finite(&lo + q(a, 4), &lo + q(b, 4))
}

/// Random set map; right-isc (`P_i ⊆ I_i`) when `regular` is set.
pub fn setmap<R: Rng>(rng: &mut R, grid: &TimeGrid, regular: bool) -> SetMap {
    let open: Vec<RInterval> = (0..grid.cells()).map(|_| any_interval(rng)).collect();
    let mut points = Vec::with_capacity(grid.len());
    for cell in &open {
        let p = if regular {
            if rng.gen_bool(0.5) {
                cell.clone()
            } else {
                interval_inside(rng, cell)
            }
        } else if rng.gen_bool(0.5) {
            cell.clone()
        } else {
            any_interval(rng)
        };
        points.push(p);
    }
    points.push(any_interval(rng));
    SetMap::new(grid.clone(), points, open).expect("nonempty values")
}

/// Random chain of partitions over at most `max_scenarios` scenarios.
pub fn tree<R: Rng>(rng: &mut R, max_scenarios: usize, slots: usize) -> ScenarioTree {
    let n = rng.gen_range(1..=max_scenarios);
    let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
    let total: i64 = weights.iter().sum();
    let probs = weights.iter().map(|w| q(*w, total)).collect();
    let mut labels: Vec<usize> = vec![0; n];
    let mut parts = Vec::with_capacity(slots);
    for _ in 0..slots {
        // split each scenario off into a fresh label with some probability
        let next = labels.iter().max().copied().unwrap_or(0) + 1;
        for (s, l) in labels.iter_mut().enumerate() {
            if rng.gen_bool(0.4) {
                *l = next + s;
            }
        }
        let mut cells: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (s, l) in labels.iter().enumerate() {
            cells.entry(*l).or_default().push(s);
        }
        parts.push(cells.into_values().collect());
    }
    let ids = (0..n).map(|s| format!("s{}", s + 1)).collect();
    ScenarioTree::new(ids, probs, parts).expect("refining chain")
}

/// Per-scenario raw values, with no measurability imposed.
pub fn raw_path<R: Rng>(rng: &mut R, tree: &ScenarioTree, grid: &TimeGrid) -> RandomPath {
    let values = (0..tree.len())
        .map(|_| (0..grid.len()).map(|_| half(rng, -3, 3)).collect())
        .collect();
    RandomPath::from_values(grid, values).expect("shape")
}

/// Slot data constant on the cells of the given partitions.
fn cellwise<T: Clone, R: Rng>(
    rng: &mut R,
    tree: &ScenarioTree,
    slots: usize,
    predictable: bool,
    mut draw: impl FnMut(&mut R, usize, &[usize]) -> T,
) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<Option<T>>> = vec![vec![None; slots]; tree.len()];
    for i in 0..slots {
        let part = if predictable { ScenarioTree::predictable_index(i) } else { i };
        for cell in tree.cells(part) {
            let v = draw(rng, i, cell);
            for &s in cell {
                out[s][i] = Some(v.clone());
            }
        }
    }
    out.into_iter()
        .map(|r| r.into_iter().map(|v| v.expect("filled")).collect())
        .collect()
}

pub fn adapted_path<R: Rng>(rng: &mut R, tree: &ScenarioTree, grid: &TimeGrid) -> RandomPath {
    let values = cellwise(rng, tree, grid.len(), false, |r, _, _| half(r, -3, 3));
    RandomPath::from_values(grid, values).expect("shape")
}

fn measure<R: Rng>(rng: &mut R, tree: &ScenarioTree, grid: &TimeGrid, predictable: bool, signed: bool) -> RandomMeasure {
    let atoms = cellwise(rng, tree, grid.len(), predictable, |r, _, _| {
        if signed {
            half(r, -3, 3)
        } else {
            [Q::zero(), q(1, 2), qi(1), qi(2)][r.gen_range(0..4)].clone()
        }
    });
    RandomMeasure::from_atoms(grid, atoms).expect("shape")
}

pub fn optional_measure<R: Rng>(rng: &mut R, tree: &ScenarioTree, grid: &TimeGrid) -> RandomMeasure {
    measure(rng, tree, grid, false, false)
}

pub fn predictable_measure<R: Rng>(rng: &mut R, tree: &ScenarioTree, grid: &TimeGrid) -> RandomMeasure {
    measure(rng, tree, grid, true, false)
}

/// Optional `u` and predictable `ũ` with half-integer atoms in `[−3, 3]`.
pub fn dual<R: Rng>(rng: &mut R, tree: &ScenarioTree, grid: &TimeGrid) -> DualPair {
    DualPair::new(measure(rng, tree, grid, false, true), measure(rng, tree, grid, true, true))
}

/// Optional integrand with values drawn cell by cell.
pub fn optional_integrand<R: Rng>(rng: &mut R, tree: &ScenarioTree, slots: usize) -> RandomIntegrand {
    let h = cellwise(rng, tree, slots, false, |r, _, _| plconvex(r));
    RandomIntegrand::new(h, Flag::Optional).expect("shape")
}

/// Instance meeting every assumption of the conjugate theorem, with bounded
/// domains so that the conjugate is finite for every dual pair.
pub fn instance<R: Rng>(rng: &mut R, max_scenarios: usize, max_slots: usize) -> Instance {
    let slots = rng.gen_range(2..=max_slots.max(2));
    let grid = TimeGrid::uniform(slots - 1);
    let tree = tree(rng, max_scenarios, slots);
    let h = cellwise(rng, &tree, slots, false, |r, _, _| {
        let c = solid_interval(r);
        plconvex_on(r, &c)
    });
    let with_htilde = rng.gen_bool(0.6);
    let htilde = with_htilde.then(|| {
        let origin = RInterval::finite(qi(-1), qi(1));
        cellwise(rng, &tree, slots, true, |r, i, cell| {
            let dom = if i == 0 { origin.clone() } else { h[cell[0]][i - 1].dom() };
            plconvex_on(r, &dom)
        })
    });
    let mu = optional_measure(rng, &tree, &grid);
    let mutilde = predictable_measure(rng, &tree, &grid);
    Instance::new(
        tree,
        grid,
        RandomIntegrand::new(h, Flag::Optional).expect("shape"),
        htilde.map(|ht| RandomIntegrand::new(ht, Flag::Predictable).expect("shape")),
        mu,
        mutilde,
        None,
        None,
    )
    .expect("consistent shapes")
}

/// Selection of `S` built cell by cell from attainable values of the instance.
pub fn selection<R: Rng>(rng: &mut R, inst: &Instance) -> Option<RandomPath> {
    let mut failed = false;
    let values = cellwise(rng, &inst.tree, inst.grid.len(), false, |r, i, cell| {
        let c = cell
            .iter()
            .fold(RInterval::real_line(), |a, &w| a.intersect(&inst.v_constraint(w, i)));
        match &c {
            RInterval::Empty => {
                failed = true;
                Q::zero()
            }
            RInterval::Closed { .. } => pick_in(r, &c),
        }
    });
    if failed {
        return None;
    }
    RandomPath::from_values(&inst.grid, values).ok()
}

/// A vertex of `c` or a lattice point inside it.
pub fn pick_in<R: Rng>(rng: &mut R, c: &RInterval) -> Q {
    let (lo, hi) = match c {
        RInterval::Closed { lo, hi } => (lo.clone(), hi.clone()),
        RInterval::Empty => panic!("empty interval"),
    };
    match (lo, hi) {
        (Ext::Fin(l), Ext::Fin(h)) => match rng.gen_range(0..3) {
            0 => l,
            1 => h,
            _ => {
                let t = q(rng.gen_range(0..=4), 4);
                &l + (&h - &l) * t
            }
        },
        (Ext::Fin(l), _) => l + half(rng, 0, 2),
        (_, Ext::Fin(h)) => h - half(rng, 0, 2),
        _ => half(rng, -2, 2),
    }
}

/// Deterministic single path on a grid.
pub fn step_path<R: Rng>(rng: &mut R, grid: &TimeGrid) -> StepPath {
    StepPath::new(grid.clone(), (0..grid.len()).map(|_| half(rng, -3, 3)).collect()).expect("shape")
}

pub fn grid_measure<R: Rng>(rng: &mut R, grid: &TimeGrid, signed: bool) -> GridMeasure {
    let atoms = (0..grid.len())
        .map(|_| if signed { half(rng, -3, 3) } else { half(rng, 0, 2) })
        .collect();
    GridMeasure::new(grid.clone(), atoms).expect("shape")
}

/// Solid pointed cone in the plane spanned by two rays, `cone{(1, a), (b, 1)}`
/// with `a, b ∈ {−1/2, 0, 1/2}`.
pub fn planar_cone<R: Rng>(rng: &mut R) -> PolyCone {
    let pick = |r: &mut R| [q(-1, 2), Q::zero(), q(1, 2)][r.gen_range(0..3)].clone();
    let a = pick(rng);
    let b = pick(rng);
    PolyCone::from_generators(2, vec![vec![qi(1), a], vec![b, qi(1)]]).expect("planar")
}

/// A cone inside `k`: the hull of one generator of `k` and the sum of both.
fn narrower(k: &PolyCone) -> PolyCone {
    let g = k.generators();
    let mid: Vector = g[0].iter().zip(&g[1]).map(|(a, b)| a + b).collect();
    PolyCone::from_generators(2, vec![g[0].clone(), mid]).expect("planar")
}

/// Solvency-cone map `G` whose polar `S = G*` is right-isc and solid.
pub fn currency_map<R: Rng>(rng: &mut R, cells: usize) -> ConeMap {
    let open: Vec<PolyCone> = (0..cells).map(|_| planar_cone(rng)).collect();
    let mut point: Vec<PolyCone> = open
        .iter()
        .map(|k| if rng.gen_bool(0.5) { k.clone() } else { narrower(k) })
        .collect();
    point.push(planar_cone(rng));
    ConeMap::new(point, open).expect("same dimension").polar()
}

/// Dual pair inside the polar cone `C` of a currency model.
pub fn currency_member<R: Rng>(rng: &mut R, g: &ConeMap) -> (Vec<Vector>, Vec<Vector>) {
    let s = g.polar();
    let vs = s.vec_map();
    let combo = |r: &mut R, k: &PolyCone| -> Vector {
        let mut v = vec![Q::zero(); k.dim()];
        for gen in k.generators() {
            let c = qi(r.gen_range(0..=2));
            for (a, b) in v.iter_mut().zip(gen) {
                *a += &c * b;
            }
        }
        v
    };
    let u = s.point.iter().map(|k| combo(rng, &k.polar())).collect();
    let ut = vs.iter().map(|k| combo(rng, &k.polar())).collect();
    (u, ut)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_instances_meet_assumptions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let inst = instance(&mut rng, 4, 5);
            let rep = inst.assumptions();
            assert!(rep.all_hold(), "{:?}", rep.failing());
            assert!(selection(&mut rng, &inst).is_some());
        }
    }

    #[test]
    fn generated_objects_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = TimeGrid::uniform(3);
        for _ in 0..50 {
            let t = tree(&mut rng, 4, 4);
            assert!(adapted_path(&mut rng, &t, &g).is_adapted(&t));
            assert!(dual(&mut rng, &t, &g).check(&t).is_ok());
            assert!(setmap(&mut rng, &g, true).right_isc_check());
            let m = currency_map(&mut rng, 2);
            let model = crate::finmodels::CurrencyModel::deterministic(m.clone());
            assert!(model.check().ok);
            let (u, ut) = currency_member(&mut rng, &m);
            let d = crate::finmodels::VecDual { u: vec![u], ut: vec![ut] };
            assert!(model.member(&d).unwrap());
        }
    }
}
