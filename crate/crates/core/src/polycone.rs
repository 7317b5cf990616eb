//! Polyhedral cones in ℝ^d for small d, in generator and half-space form.
//!
//! All feasibility questions are decided exactly: cone membership from
//! generators by Fourier–Motzkin elimination on the multiplier system, and the
//! half-space form by enumerating the extreme rays of the polar.

use std::collections::BTreeSet;

use num::{BigInt, Integer, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ext::Q;

pub const MAX_DIM: usize = 4;

pub type Vector = Vec<Q>;

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Positive rescaling to a primitive integer vector (direction preserved).
pub fn normalize(v: &[Q]) -> Vector {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    ints.into_iter().map(|x| Q::from_integer(x / &g)).collect()
}

fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// Reduced row echelon form; returns the pivot columns.
fn rref(m: &mut [Vec<Q>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row >= m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = Q::one() / &m[row][col];
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[row].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row.iter()) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(rows: &[Vector], d: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, d).len()
}

/// Basis of `{x ∈ ℝ^d | r·x = 0 for every row r}`.
pub fn nullspace(rows: &[Vector], d: usize) -> Vec<Vector> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, d);
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); d];
            v[f] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            normalize(&v)
        })
        .collect()
}

/// Fourier–Motzkin feasibility of `{z | a·z ≤ b for every (a, b)}`.
pub fn fm_feasible(rows: Vec<(Vector, Q)>, nvars: usize) -> bool {
    let mut sys: BTreeSet<(Vector, Q)> = rows.into_iter().map(normalize_row).collect();
    for var in (0..nvars).rev() {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut next = BTreeSet::new();
        for (a, b) in sys {
            if a[var].is_positive() {
                pos.push((a, b));
            } else if a[var].is_negative() {
                neg.push((a, b));
            } else {
                next.insert((a, b));
            }
        }
        for (ap, bp) in &pos {
            for (an, bn) in &neg {
                let wp = -an[var].clone();
                let wn = ap[var].clone();
                let a: Vector = ap.iter().zip(an).map(|(x, y)| x * &wp + y * &wn).collect();
                let b = bp * &wp + bn * &wn;
                next.insert(normalize_row((a, b)));
            }
        }
        sys = next;
        if sys.iter().any(|(a, b)| is_zero_vec(a) && b.is_negative()) {
            return false;
        }
    }
    sys.iter().all(|(_, b)| !b.is_negative())
}

fn normalize_row((a, b): (Vector, Q)) -> (Vector, Q) {
    let scale = a
        .iter()
        .chain(std::iter::once(&b))
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(Q::zero);
    if scale.is_zero() {
        return (a, b);
    }
    (a.iter().map(|x| x / &scale).collect(), b / scale)
}

/// Is `x ∈ cone(gens)`? Decided by eliminating the multipliers λ ≥ 0 of
/// `Σ λ_j g_j = x`.
pub fn in_cone_fm(gens: &[Vector], x: &[Q]) -> bool {
    let d = x.len();
    let m = gens.len();
    if m == 0 {
        return is_zero_vec(x);
    }
    // augmented [G | x], d rows, m + 1 columns
    let mut aug: Vec<Vector> = (0..d)
        .map(|r| {
            let mut row: Vector = gens.iter().map(|g| g[r].clone()).collect();
            row.push(x[r].clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug, m + 1);
    if pivots.contains(&m) {
        return false;
    }
    let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
    let mut rows = Vec::new();
    // λ_p = c_p − Σ a_pf λ_f ≥ 0
    for (r, _) in pivots.iter().enumerate() {
        let a: Vector = free.iter().map(|&f| aug[r][f].clone()).collect();
        rows.push((a, aug[r][m].clone()));
    }
    for k in 0..free.len() {
        let mut a = vec![Q::zero(); free.len()];
        a[k] = -Q::one();
        rows.push((a, Q::zero()));
    }
    fm_feasible(rows, free.len())
}

/// Generators of `{x | a·x ≤ 0 for every a in halfspaces}`: the extreme rays
/// of its pointed part together with ± a basis of its lineality space.
pub fn generators_of(dim: usize, halfspaces: &[Vector]) -> Vec<Vector> {
    let lineality = nullspace(halfspaces, dim);
    let pointed_dim = dim - lineality.len();
    let mut out: BTreeSet<Vector> = BTreeSet::new();
    if pointed_dim > 0 {
        let need = pointed_dim - 1;
        let rows: Vec<&Vector> = halfspaces.iter().filter(|a| !is_zero_vec(a)).collect();
        for subset in subsets(rows.len(), need) {
            let mut sys: Vec<Vector> = subset.iter().map(|&i| rows[i].clone()).collect();
            sys.extend(lineality.iter().cloned());
            let ns = nullspace(&sys, dim);
            if ns.len() != 1 {
                continue;
            }
            let r = &ns[0];
            let neg: Vector = r.iter().map(|x| -x.clone()).collect();
            for cand in [r.clone(), neg] {
                if halfspaces.iter().all(|a| !dot(a, &cand).is_positive()) {
                    out.insert(normalize(&cand));
                }
            }
        }
    }
    for b in &lineality {
        out.insert(normalize(b));
        out.insert(normalize(&b.iter().map(|x| -x.clone()).collect::<Vec<_>>()));
    }
    out.into_iter().collect()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// A rational half-space `{x | qvec·x ≤ q0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfSpaceCert {
    pub q0: Q,
    pub qvec: Vector,
}

impl HalfSpaceCert {
    pub fn new(q0: Q, qvec: Vector) -> Result<HalfSpaceCert> {
        if q0.is_zero() && is_zero_vec(&qvec) {
            return Err(Error::Malformed("zero half-space certificate".into()));
        }
        Ok(HalfSpaceCert { q0, qvec })
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        dot(&self.qvec, x) <= self.q0
    }
}

/// A polyhedral cone with both representations kept in sync.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyCone {
    dim: usize,
    generators: Vec<Vector>,
    halfspaces: Vec<Vector>,
}

fn check_dim(dim: usize, vs: &[Vector]) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::Malformed(format!("cone dimension {dim} not in 1..={MAX_DIM}")));
    }
    for v in vs {
        if v.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: v.len(),
            });
        }
    }
    Ok(())
}

fn canonical_set(vs: &[Vector]) -> Vec<Vector> {
    vs.iter()
        .filter(|v| !is_zero_vec(v))
        .map(|v| normalize(v))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

impl PolyCone {
    /// `cone(generators)`; zero vectors are discarded.
    pub fn from_generators(dim: usize, generators: Vec<Vector>) -> Result<PolyCone> {
        check_dim(dim, &generators)?;
        let generators = canonical_set(&generators);
        let halfspaces = generators_of(dim, &generators);
        Ok(PolyCone {
            dim,
            generators,
            halfspaces,
        })
    }

    /// `{x | a·x ≤ 0 for every a}`.
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<Vector>) -> Result<PolyCone> {
        check_dim(dim, &halfspaces)?;
        let halfspaces = canonical_set(&halfspaces);
        let generators = generators_of(dim, &halfspaces);
        Ok(PolyCone {
            dim,
            generators,
            halfspaces,
        })
    }

    /// Both forms supplied; checked for consistency on the generator side.
    pub fn from_parts(dim: usize, generators: Vec<Vector>, halfspaces: Vec<Vector>) -> Result<PolyCone> {
        match (generators.is_empty(), halfspaces.is_empty()) {
            (false, true) => PolyCone::from_generators(dim, generators),
            (true, false) => PolyCone::from_halfspaces(dim, halfspaces),
            _ => {
                let k = PolyCone::from_generators(dim, generators)?;
                check_dim(dim, &halfspaces)?;
                let other = PolyCone::from_halfspaces(dim, halfspaces)?;
                if !k.same_set(&other) {
                    return Err(Error::Malformed(
                        "generator and half-space forms describe different cones".into(),
                    ));
                }
                Ok(k)
            }
        }
    }

    pub fn orthant(dim: usize) -> PolyCone {
        let gens = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
            .collect();
        PolyCone::from_generators(dim, gens).expect("orthant")
    }

    pub fn zero(dim: usize) -> PolyCone {
        PolyCone::from_generators(dim, vec![]).expect("zero cone")
    }

    pub fn whole(dim: usize) -> PolyCone {
        PolyCone::from_halfspaces(dim, vec![]).expect("whole space")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    pub fn halfspaces(&self) -> &[Vector] {
        &self.halfspaces
    }

    fn check_vec(&self, x: &[Q]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `K* = {x | x·y ≤ 0 ∀ y ∈ K}`.
    pub fn polar(&self) -> PolyCone {
        PolyCone {
            dim: self.dim,
            generators: generators_of(self.dim, &self.generators),
            halfspaces: self.generators.clone(),
        }
    }

    /// Membership through the half-space form.
    pub fn member(&self, x: &[Q]) -> Result<bool> {
        self.check_vec(x)?;
        Ok(self.halfspaces.iter().all(|a| !dot(a, x).is_positive()))
    }

    /// Membership through the generator form only (Fourier–Motzkin).
    pub fn member_v(&self, x: &[Q]) -> Result<bool> {
        self.check_vec(x)?;
        Ok(in_cone_fm(&self.generators, x))
    }

    /// `K ∩ (−K) = {0}`: no nontrivial nonnegative combination of the
    /// generators vanishes.
    pub fn pointed(&self) -> bool {
        if self.generators.is_empty() {
            return true;
        }
        let lifted: Vec<Vector> = self
            .generators
            .iter()
            .map(|g| {
                let mut v = g.clone();
                v.push(Q::one());
                v
            })
            .collect();
        let mut target = vec![Q::zero(); self.dim];
        target.push(Q::one());
        !in_cone_fm(&lifted, &target)
    }

    /// Nonempty interior: the generators span ℝ^d.
    pub fn solid(&self) -> bool {
        rank(&self.generators, self.dim) == self.dim
    }

    pub fn subset_of(&self, other: &PolyCone) -> bool {
        self.dim == other.dim
            && self
                .generators
                .iter()
                .all(|g| other.member(g).unwrap_or(false))
    }

    /// Set equality by mutual generator membership and mutual half-space
    /// satisfaction.
    pub fn same_set(&self, other: &PolyCone) -> bool {
        self.subset_of(other) && other.subset_of(self)
    }

    pub fn intersect(&self, other: &PolyCone) -> Result<PolyCone> {
        if self.dim != other.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut hs = self.halfspaces.clone();
        hs.extend(other.halfspaces.iter().cloned());
        PolyCone::from_halfspaces(self.dim, hs)
    }

    /// The half-spaces whose intersection is `K`, as certificates.
    pub fn certificates(&self) -> Vec<HalfSpaceCert> {
        let mut out: Vec<HalfSpaceCert> = self
            .halfspaces
            .iter()
            .map(|a| HalfSpaceCert {
                q0: Q::zero(),
                qvec: a.clone(),
            })
            .collect();
        if out.is_empty() {
            // ℝ^d is the trivial half-space 0·x ≤ 1
            out.push(HalfSpaceCert {
                q0: Q::one(),
                qvec: vec![Q::zero(); self.dim],
            });
        }
        out
    }

    /// A rational half-space containing `K` but not `x`, if `x ∉ K`.
    pub fn separate(&self, x: &[Q]) -> Result<Option<HalfSpaceCert>> {
        self.check_vec(x)?;
        Ok(self
            .halfspaces
            .iter()
            .find(|a| dot(a, x).is_positive())
            .map(|a| HalfSpaceCert {
                q0: Q::zero(),
                qvec: a.clone(),
            }))
    }
}

/// Closed conic hull of a finite union of cones, with redundant generators
/// removed. Finitely generated cones are closed, so no closure step is needed.
pub fn cone_hull(cones: &[PolyCone]) -> Result<PolyCone> {
    let first = cones
        .first()
        .ok_or_else(|| Error::Malformed("cone hull of an empty list".into()))?;
    let dim = first.dim;
    let mut gens: Vec<Vector> = Vec::new();
    for k in cones {
        if k.dim != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: k.dim,
            });
        }
        gens.extend(k.generators.iter().cloned());
    }
    let mut gens = canonical_set(&gens);
    let mut j = 0;
    while j < gens.len() {
        let others: Vec<Vector> = gens
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, g)| g.clone())
            .collect();
        if in_cone_fm(&others, &gens[j]) {
            gens.remove(j);
        } else {
            j += 1;
        }
    }
    PolyCone::from_generators(dim, gens)
}

/// Cone-valued mapping on a grid: a value at each grid time and a constant
/// value on each open cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeMap {
    pub point: Vec<PolyCone>,
    pub open: Vec<PolyCone>,
}

impl ConeMap {
    pub fn new(point: Vec<PolyCone>, open: Vec<PolyCone>) -> Result<ConeMap> {
        if point.len() != open.len() + 1 || point.is_empty() {
            return Err(Error::Grid(format!(
                "{} point cones for {} cells",
                point.len(),
                open.len()
            )));
        }
        let dim = point[0].dim();
        for k in point.iter().chain(open.iter()) {
            if k.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: k.dim(),
                });
            }
        }
        Ok(ConeMap { point, open })
    }

    pub fn constant(k: PolyCone, cells: usize) -> ConeMap {
        ConeMap {
            point: vec![k.clone(); cells + 1],
            open: vec![k; cells],
        }
    }

    pub fn dim(&self) -> usize {
        self.point[0].dim()
    }

    pub fn polar(&self) -> ConeMap {
        ConeMap {
            point: self.point.iter().map(PolyCone::polar).collect(),
            open: self.open.iter().map(PolyCone::polar).collect(),
        }
    }

    /// Left-limit mapping: the preceding cell's cone at each grid time, `{0}`
    /// at the origin.
    pub fn vec_map(&self) -> Vec<PolyCone> {
        let mut out = vec![PolyCone::zero(self.dim())];
        out.extend(self.open.iter().cloned());
        out
    }

    /// Point values contained in the following cell values.
    pub fn right_isc(&self) -> bool {
        self.open
            .iter()
            .enumerate()
            .all(|(i, cell)| self.point[i].subset_of(cell))
    }

    pub fn refine(&self, factor: usize) -> ConeMap {
        let mut point = Vec::new();
        let mut open = Vec::new();
        for (i, cell) in self.open.iter().enumerate() {
            point.push(self.point[i].clone());
            for _ in 1..factor {
                point.push(cell.clone());
            }
            for _ in 0..factor {
                open.push(cell.clone());
            }
        }
        point.push(self.point.last().expect("nonempty").clone());
        ConeMap { point, open }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct CsSlot {
    pub slot: usize,
    pub efficient_friction: bool,
    pub right_regular: bool,
    /// Not applicable at the initial time.
    pub left_regular: Option<bool>,
    pub polar_right_isc: bool,
    pub polar_solid: bool,
    pub vec_polar_matches: Option<bool>,
    pub vec_polar_solid: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct CsReport {
    pub slots: Vec<CsSlot>,
    /// Hypotheses: efficient friction and both regularity conditions.
    pub hypotheses_hold: bool,
    /// Conclusions: `G*` right-isc and solid, `G̃* = vec G*` and solid.
    pub conclusions_hold: bool,
}

impl CsReport {
    pub fn pass(&self) -> bool {
        self.hypotheses_hold && self.conclusions_hold
    }

    pub fn failing_slots(&self) -> Vec<usize> {
        self.slots
            .iter()
            .filter(|s| {
                !(s.efficient_friction && s.right_regular && s.left_regular.unwrap_or(true))
            })
            .map(|s| s.slot)
            .collect()
    }
}

/// Campi–Schachermayer hypotheses and their polar conclusions on a grid.
///
/// Window semantics: `G_{t,t+}` at a grid time is the hull of the point cone
/// and the following cell cone; `G_{t−,t}` is the preceding cell cone. Inside
/// a cell both windows reduce to the cell cone, so only grid times are checked.
pub fn cs_regularity_check(g: &ConeMap, gtilde: &[PolyCone]) -> Result<CsReport> {
    if gtilde.len() != g.point.len() {
        return Err(Error::Grid(format!(
            "G has {} grid slots, G̃ has {}",
            g.point.len(),
            gtilde.len()
        )));
    }
    for k in gtilde {
        if k.dim() != g.dim() {
            return Err(Error::Dimension {
                expected: g.dim(),
                got: k.dim(),
            });
        }
    }
    let n = g.open.len();
    let s = g.polar();
    let mut slots = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut friction = g.point[i].pointed() && gtilde[i].pointed();
        let mut right_regular = true;
        let mut polar_right_isc = true;
        let mut polar_solid = s.point[i].solid();
        if i < n {
            friction &= g.open[i].pointed();
            let window = cone_hull(&[g.point[i].clone(), g.open[i].clone()])?;
            right_regular = window.same_set(&g.point[i]);
            polar_right_isc = s.point[i].subset_of(&s.open[i]);
            polar_solid &= s.open[i].solid();
        }
        let (left_regular, vec_polar_matches) = if i == 0 {
            (None, None)
        } else {
            let left_window = &g.open[i - 1];
            (
                Some(left_window.same_set(&gtilde[i])),
                Some(gtilde[i].polar().same_set(&s.open[i - 1])),
            )
        };
        slots.push(CsSlot {
            slot: i,
            efficient_friction: friction,
            right_regular,
            left_regular,
            polar_right_isc,
            polar_solid,
            vec_polar_matches,
            vec_polar_solid: gtilde[i].polar().solid(),
        });
    }
    let hypotheses_hold = slots
        .iter()
        .all(|s| s.efficient_friction && s.right_regular && s.left_regular.unwrap_or(true));
    let conclusions_hold = slots.iter().all(|s| {
        s.polar_right_isc && s.polar_solid && s.vec_polar_matches.unwrap_or(true) && s.vec_polar_solid
    });
    Ok(CsReport {
        slots,
        hypotheses_hold,
        conclusions_hold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::qi;

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| qi(x)).collect()
    }

    fn cone(gens: &[&[i64]]) -> PolyCone {
        PolyCone::from_generators(gens[0].len(), gens.iter().map(|g| v(g)).collect()).unwrap()
    }

    #[test]
    fn polar_examples() {
        let p = PolyCone::orthant(2).polar();
        let expected = PolyCone::from_halfspaces(2, vec![v(&[1, 0]), v(&[0, 1])]).unwrap();
        assert!(p.same_set(&expected));
        assert!(p.member(&v(&[-1, -3])).unwrap());
        assert!(!p.member(&v(&[1, -3])).unwrap());

        let whole = cone(&[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]]);
        assert!(whole.polar().same_set(&PolyCone::zero(2)));
        assert!(whole.polar().generators().is_empty());

        let k = cone(&[&[1, 1], &[1, -1]]);
        assert!(k.polar().same_set(&cone(&[&[-1, -1], &[-1, 1]])));
    }

    #[test]
    fn polar_matches_angular_enumeration() {
        // oracle: unit directions at angular step 1e−3 lie in K* iff they make
        // a nonpositive product with both generators of K
        let p = cone(&[&[1, 1], &[1, -1]]).polar();
        let mut k = 0;
        while (k as f64) * 1e-3 < std::f64::consts::TAU {
            let th = k as f64 * 1e-3;
            let (c, s) = (th.cos(), th.sin());
            let in_oracle = c + s <= 1e-12 && c - s <= 1e-12;
            // rational approximation well away from the boundary rays
            let boundary = (c + s).abs() < 1e-6 || (c - s).abs() < 1e-6;
            if !boundary {
                let x = vec![
                    crate::ext::parse_q(&format!("{:.9}", c)).unwrap(),
                    crate::ext::parse_q(&format!("{:.9}", s)).unwrap(),
                ];
                assert_eq!(p.member(&x).unwrap(), in_oracle, "theta={th}");
            }
            k += 1;
        }
    }

    #[test]
    fn membership_examples() {
        let o = PolyCone::orthant(2);
        assert!(o.member(&v(&[1, 2])).unwrap());
        assert!(!o.member(&v(&[-1, 2])).unwrap());
        let k = cone(&[&[1, 1], &[1, -1]]);
        assert!(k.member(&v(&[2, 0])).unwrap());
        assert!(k.member_v(&v(&[2, 0])).unwrap());
        assert!(!k.member_v(&v(&[-1, 0])).unwrap());
        assert_eq!(
            o.member(&v(&[1, 2, 3])),
            Err(Error::Dimension { expected: 2, got: 3 })
        );
    }

    #[test]
    fn pointed_and_solid_examples() {
        let o = PolyCone::orthant(2);
        assert!(o.pointed() && o.solid());
        let line = cone(&[&[1, 0], &[-1, 0]]);
        assert!(!line.pointed() && !line.solid());
        let k = cone(&[&[1, 0], &[1, 1]]);
        assert!(k.pointed() && k.solid());
        let half = cone(&[&[1, 0], &[-1, 0], &[0, 1]]);
        assert!(!half.pointed() && half.solid());
        for c in [o, line, k, half] {
            assert_eq!(c.pointed(), c.polar().solid());
            assert_eq!(c.solid(), c.polar().pointed());
        }
    }

    #[test]
    fn cone_hull_examples() {
        let h = cone_hull(&[cone(&[&[1, 0]]), cone(&[&[0, 1]])]).unwrap();
        assert!(h.same_set(&PolyCone::orthant(2)));
        let k = cone(&[&[1, 1], &[1, -1]]);
        assert!(cone_hull(&[k.clone()]).unwrap().same_set(&k));
        let h = cone_hull(&[cone(&[&[1, 1]]), cone(&[&[1, -1]])]).unwrap();
        assert!(h.member_v(&v(&[1, 0])).unwrap());
        let redundant = cone_hull(&[cone(&[&[1, 0], &[0, 1]]), cone(&[&[1, 1]])]).unwrap();
        assert_eq!(redundant.generators().len(), 2);
        assert!(cone_hull(&[]).is_err());
    }

    #[test]
    fn three_dimensional_polar_roundtrip() {
        let k = cone(&[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]);
        let pp = k.polar().polar();
        assert!(pp.same_set(&k));
        assert!(k.pointed() && k.solid());
        assert!(k.member(&v(&[0, 0, 1])).unwrap());
        assert!(!k.member(&v(&[1, 1, 1])).unwrap());
    }

    #[test]
    fn certificates_represent_the_cone() {
        let k = cone(&[&[1, 1], &[1, -1]]);
        let certs = k.certificates();
        for x in [v(&[3, 1]), v(&[0, 1]), v(&[-2, 0]), v(&[5, -5])] {
            let by_certs = certs.iter().all(|c| c.contains(&x));
            assert_eq!(by_certs, k.member(&x).unwrap());
            let sep = k.separate(&x).unwrap();
            assert_eq!(sep.is_none(), by_certs);
            if let Some(c) = sep {
                assert!(!c.contains(&x));
                assert!(k.generators().iter().all(|g| c.contains(g)));
            }
        }
        assert!(HalfSpaceCert::new(qi(0), v(&[0, 0])).is_err());
    }

    #[test]
    fn cs_examples() {
        let o = PolyCone::orthant(2);
        let g = ConeMap::constant(o.clone(), 2);
        let rep = cs_regularity_check(&g, &[o.clone(), o.clone(), o.clone()]).unwrap();
        assert!(rep.pass(), "{rep:?}");

        // the cell after slot 0 is strictly larger than the point value, so
        // the window hull at slot 0 exceeds G_0 (polar point value ⊋ polar cell)
        let big = cone(&[&[1, 0], &[0, 1], &[-1, 2]]);
        let g = ConeMap::new(vec![o.clone(), o.clone()], vec![o.clone()]).unwrap();
        let g2 = ConeMap::new(vec![o.clone(), big.clone()], vec![o.clone()]).unwrap();
        assert!(cs_regularity_check(&g, &[o.clone(), o.clone()]).unwrap().pass());
        let g3 = ConeMap::new(vec![o.clone(), o.clone()], vec![big.clone()]).unwrap();
        let rep = cs_regularity_check(&g3, &[o.clone(), big.clone()]).unwrap();
        assert!(!rep.slots[0].right_regular);
        assert!(!rep.slots[0].polar_right_isc);
        assert_eq!(rep.failing_slots(), vec![0]);
        // a point value larger than its cell is right-regular
        let g4 = ConeMap::new(vec![big.clone(), o.clone()], vec![o.clone()]).unwrap();
        assert!(cs_regularity_check(&g4, &[o.clone(), o.clone()]).unwrap().slots[0].right_regular);
        // a larger terminal point value is not a right-regularity issue
        assert!(cs_regularity_check(&g2, &[o.clone(), o.clone()]).unwrap().slots[1].right_regular);

        let half = cone(&[&[1, 0], &[-1, 0], &[0, 1]]);
        let g = ConeMap::constant(half.clone(), 1);
        let rep = cs_regularity_check(&g, &[half.clone(), half]).unwrap();
        assert!(!rep.slots[0].efficient_friction);
        assert!(!rep.pass());

        assert!(cs_regularity_check(&ConeMap::constant(o.clone(), 2), &[o]).is_err());
    }
}
