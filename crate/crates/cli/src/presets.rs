//! Preset instance files emitted by `cadlag model` and shipped in `instances/`.

use cadlag_convex::duality::DualPair;
use cadlag_convex::finmodels::{CurrencyModel, ScalarProcess, VecDual};
use cadlag_convex::io::{Loaded, Model};
use cadlag_convex::polycone::Vector;
use cadlag_convex::{q, qi, ConeMap, Flag, GridMeasure, PLConvex, PolyCone, RInterval, RandomIntegrand};
use cadlag_convex::{RandomMeasure, RandomPath, RandomSetMap, ScenarioTree, SetMap, TimeGrid, Q};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const KINDS: &[&str] = &["obstacle", "bidask", "currency", "cs", "sample", "deterministic", "michael"];

pub fn preset(kind: &str) -> Option<Loaded> {
    Some(match kind {
        "obstacle" => obstacle(),
        "bidask" => bidask(),
        "currency" => currency(),
        "cs" => cs(),
        "sample" => sample(7),
        "deterministic" => deterministic(),
        "michael" => michael(),
        _ => return None,
    })
}

fn qs(xs: &[(i64, i64)]) -> Vec<Q> {
    xs.iter().map(|&(n, d)| q(n, d)).collect()
}

fn ints(xs: &[i64]) -> Vec<Q> {
    xs.iter().map(|&x| qi(x)).collect()
}

fn two_branch(slots: usize) -> ScenarioTree {
    ScenarioTree::split_at(vec!["hi".into(), "lo".into()], vec![q(1, 2), q(1, 2)], slots, 1).expect("valid tree")
}

fn bare(tree: ScenarioTree, grid: TimeGrid) -> Loaded {
    Loaded {
        mu: RandomMeasure::zero(&tree, &grid),
        mutilde: RandomMeasure::zero(&tree, &grid),
        grid,
        tree,
        h: None,
        htilde: None,
        s: None,
        stilde: None,
        duals: vec![],
        paths: vec![],
        model: None,
    }
}

fn measure(grid: &TimeGrid, rows: Vec<Vec<Q>>) -> RandomMeasure {
    RandomMeasure::from_atoms(grid, rows).expect("shape")
}

fn dual(grid: &TimeGrid, u: Vec<Vec<Q>>, ut: Vec<Vec<Q>>) -> DualPair {
    DualPair::new(measure(grid, u), measure(grid, ut))
}

/// Obstacle `b` with `y ≥ b`; scenarios `hi` and `lo` split after `t₀`.
fn obstacle() -> Loaded {
    let grid = TimeGrid::uniform(3);
    let tree = two_branch(4);
    let b = ScalarProcess::new(
        grid.clone(),
        vec![ints(&[1, 2, 1, 2]), qs(&[(1, 1), (1, 1), (0, 1), (1, 2)])],
        vec![qs(&[(1, 1), (3, 2), (1, 1)]), ints(&[1, 0, 0])],
        Flag::Optional,
    )
    .expect("obstacle");
    let ycheck = RandomPath::from_values(&grid, vec![ints(&[2, 2, 2, 2]); 2]).expect("path");
    let mut l = bare(tree, grid.clone());
    l.duals = vec![
        dual(
            &grid,
            vec![qs(&[(-1, 1), (0, 1), (-1, 2), (-1, 1)]); 2],
            vec![qs(&[(0, 1), (-1, 1), (0, 1), (-1, 2)]); 2],
        ),
        dual(
            &grid,
            vec![ints(&[-1, 0, -2, -1]), ints(&[-1, -1, 0, 0])],
            vec![qs(&[(0, 1), (-1, 2), (0, 1), (-1, 1)]), qs(&[(0, 1), (-1, 2), (-1, 1), (0, 1)])],
        ),
        dual(&grid, vec![ints(&[1, 0, 0, 0]); 2], vec![ints(&[0, 0, 0, 0]); 2]),
    ];
    l.paths = vec![ycheck.clone()];
    l.model = Some(Model::Obstacle { b, ycheck });
    l
}

/// Bid `b` and ask `a` with a reference path strictly inside the spread.
fn bidask() -> Loaded {
    let grid = TimeGrid::uniform(3);
    let tree = two_branch(4);
    let b = ScalarProcess::new(
        grid.clone(),
        vec![qs(&[(0, 1), (1, 1), (0, 1), (1, 2)]), ints(&[0, -1, -1, 0])],
        vec![ints(&[0, 0, 0]), ints(&[0, -1, -1])],
        Flag::Optional,
    )
    .expect("bid");
    let a = ScalarProcess::new(
        grid.clone(),
        vec![ints(&[2, 3, 2, 3]), ints(&[2, 1, 2, 2])],
        vec![ints(&[2, 3, 3]), ints(&[2, 2, 2])],
        Flag::Optional,
    )
    .expect("ask");
    let ybar = RandomPath::from_values(&grid, vec![ints(&[1, 2, 1, 1]), qs(&[(1, 1), (1, 2), (1, 2), (1, 1)])])
        .expect("path");
    let mut l = bare(tree, grid.clone());
    l.duals = vec![
        dual(
            &grid,
            vec![qs(&[(1, 1), (-1, 1), (1, 2), (-1, 1)]); 2],
            vec![qs(&[(0, 1), (1, 1), (-1, 1), (1, 2)]); 2],
        ),
        dual(
            &grid,
            vec![ints(&[-1, 2, 0, 1]), ints(&[-1, -1, 1, -2])],
            vec![qs(&[(0, 1), (1, 2), (-1, 1), (0, 1)]), qs(&[(0, 1), (1, 2), (1, 1), (-1, 1)])],
        ),
    ];
    l.paths = vec![ybar.clone()];
    l.model = Some(Model::BidAsk { b, a, ybar });
    l
}

/// `cone{(π, −1), (−1, π)}`: two-currency solvency cone with exchange spread `π > 1`.
pub fn spread_cone(pi: Q) -> PolyCone {
    PolyCone::from_generators(2, vec![vec![pi.clone(), qi(-1)], vec![qi(-1), pi]]).expect("planar")
}

fn v(xs: &[i64]) -> Vector {
    ints(xs)
}

fn currency() -> Loaded {
    let grid = TimeGrid::uniform(2);
    let tree = two_branch(3);
    let k = |n: i64, d: i64| spread_cone(q(n, d));
    let hi = ConeMap::new(vec![k(2, 1), k(2, 1), k(3, 1)], vec![k(3, 1), k(3, 1)]).expect("map");
    let lo = ConeMap::new(vec![k(2, 1), k(3, 2), k(2, 1)], vec![k(3, 1), k(2, 1)]).expect("map");
    let model = CurrencyModel::new(tree.clone(), vec![hi, lo]).expect("model");
    let member = VecDual {
        u: vec![vec![v(&[2, -1]), v(&[1, 1]), v(&[-1, 3])]; 2],
        ut: vec![vec![v(&[0, 0]), v(&[3, -1]), v(&[1, 1])]; 2],
    };
    let split = VecDual {
        u: vec![
            vec![v(&[1, 0]), v(&[2, -1]), v(&[0, 0])],
            vec![v(&[1, 0]), v(&[0, 0]), v(&[4, -1])],
        ],
        ut: vec![
            vec![v(&[0, 0]), v(&[-1, 3]), v(&[3, -1])],
            vec![v(&[0, 0]), v(&[-1, 3]), v(&[2, 1])],
        ],
    };
    let mut l = bare(tree, grid);
    l.model = Some(Model::Currency {
        model,
        duals: vec![member, split, VecDual::zero(2, 3, 2)],
    });
    l
}

/// Deterministic Campi–Schachermayer instance: spreads shrink inside cells.
pub fn cs_cones() -> (ConeMap, Vec<PolyCone>) {
    let k = |n: i64, d: i64| spread_cone(q(n, d));
    let g = ConeMap::new(vec![k(2, 1), k(3, 2), k(2, 1)], vec![k(3, 1), k(2, 1)]).expect("map");
    let gtilde = vec![k(2, 1), k(3, 1), k(2, 1)];
    (g, gtilde)
}

fn cs() -> Loaded {
    let grid = TimeGrid::uniform(2);
    let tree = ScenarioTree::deterministic(3);
    let (g, gtilde) = cs_cones();
    let mut l = bare(tree, grid);
    l.model = Some(Model::Cs { g, gtilde });
    l
}

/// Random instance meeting every assumption, with duals and selections.
pub fn sample(seed: u64) -> Loaded {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = cadlag_convex::gen::instance(&mut rng, 3, 4);
    let duals = (0..3)
        .map(|_| cadlag_convex::gen::dual(&mut rng, &inst.tree, &inst.grid))
        .collect();
    let paths = (0..2)
        .filter_map(|_| cadlag_convex::gen::selection(&mut rng, &inst))
        .collect();
    Loaded {
        grid: inst.grid.clone(),
        tree: inst.tree.clone(),
        h: Some(inst.h.clone()),
        htilde: inst.htilde.clone(),
        mu: inst.mu.clone(),
        mutilde: inst.mutilde.clone(),
        s: None,
        stilde: None,
        duals,
        paths,
        model: None,
    }
}

fn abs_shift(c: i64) -> PLConvex {
    PLConvex::max_affine(&[(qi(1), qi(-c)), (qi(-1), qi(c))]).expect("valid")
}

/// Single scenario: `|x − c|` terms on bounded domains with a predictable left term.
fn deterministic() -> Loaded {
    let grid = TimeGrid::uniform(3);
    let tree = ScenarioTree::deterministic(4);
    let dom = RInterval::finite(qi(-2), qi(2));
    let h = vec![
        abs_shift(1).restrict(&dom).expect("nonempty"),
        abs_shift(-1).restrict(&dom).expect("nonempty"),
        PLConvex::affine(q(1, 2), qi(0)).restrict(&dom).expect("nonempty"),
        abs_shift(0).restrict(&dom).expect("nonempty"),
    ];
    let htilde = vec![
        PLConvex::indicator(&RInterval::point(qi(0))).expect("point"),
        abs_shift(2).restrict(&dom).expect("nonempty"),
        abs_shift(0).restrict(&dom).expect("nonempty"),
        abs_shift(-2).restrict(&dom).expect("nonempty"),
    ];
    let mut l = bare(tree.clone(), grid.clone());
    l.h = Some(RandomIntegrand::deterministic(&tree, h, Flag::Optional));
    l.htilde = Some(RandomIntegrand::deterministic(&tree, htilde, Flag::Predictable));
    l.mu = RandomMeasure::deterministic(&tree, GridMeasure::new(grid.clone(), ints(&[1, 0, 2, 1])).expect("m"));
    l.mutilde = RandomMeasure::deterministic(&tree, GridMeasure::new(grid.clone(), ints(&[0, 1, 0, 1])).expect("m"));
    l.duals = vec![
        dual(&grid, vec![qs(&[(1, 2), (0, 1), (1, 1), (-1, 1)])], vec![qs(&[(0, 1), (1, 1), (0, 1), (1, 2)])]),
        dual(&grid, vec![ints(&[2, -1, 0, 3])], vec![ints(&[0, -2, 1, 0])]),
    ];
    l.paths = vec![
        RandomPath::from_values(&grid, vec![ints(&[1, -1, -2, 0])]).expect("path"),
        RandomPath::from_values(&grid, vec![qs(&[(1, 2), (0, 1), (1, 1), (-1, 2)])]).expect("path"),
    ];
    l
}

/// The canonical failure of the interchange rule: the point value at `t₁`
/// is strictly larger than the following cell value, and the minimizer of
/// `h₁` sits in the excess.
pub fn michael() -> Loaded {
    let grid = TimeGrid::uniform(2);
    let tree = ScenarioTree::deterministic(3);
    let iv = |a: i64, b: i64| RInterval::finite(qi(a), qi(b));
    let i01 = PLConvex::indicator(&iv(0, 1)).expect("interval");
    let h1 = abs_shift(2).restrict(&iv(0, 2)).expect("nonempty");
    let s = SetMap::new(grid.clone(), vec![iv(0, 1), iv(0, 2), iv(0, 1)], vec![iv(0, 1), iv(0, 1)]).expect("map");
    let mut l = bare(tree.clone(), grid.clone());
    l.h = Some(RandomIntegrand::deterministic(&tree, vec![i01.clone(), h1, i01], Flag::Optional));
    l.mu = RandomMeasure::deterministic(&tree, GridMeasure::new(grid.clone(), ints(&[0, 1, 0])).expect("m"));
    l.s = Some(RandomSetMap::deterministic(&tree, s));
    l.paths = vec![RandomPath::from_values(&grid, vec![ints(&[1, 1, 1])]).expect("path")];
    l.duals = vec![dual(&grid, vec![ints(&[1, -1, 0])], vec![ints(&[0, 1, 0])])];
    l
}
