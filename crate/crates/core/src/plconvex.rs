//! Proper closed convex piecewise-linear functions of one real variable.
//!
//! A [`PLConvex`] is stored in canonical form: the closure of the effective
//! domain `[dom_lo, dom_hi]`, the breakpoints strictly inside it, strictly
//! increasing slopes, and the value at a canonical anchor (the point of the
//! domain closest to zero). Two values compare equal iff they represent the
//! same function, so structural equality is function equality.

use std::fmt;

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::ext::{fmt_q, Ext, Q};

/// A closed interval of the real line, possibly unbounded, or empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RInterval {
    Empty,
    Closed { lo: Ext, hi: Ext },
}

impl RInterval {
    pub fn new(lo: Ext, hi: Ext) -> Result<RInterval> {
        if lo == Ext::PosInf || hi == Ext::NegInf || lo > hi {
            return Err(Error::Malformed(format!("interval [{lo}, {hi}]")));
        }
        Ok(RInterval::Closed { lo, hi })
    }

    /// `[lo, hi]` with finite ends; empty when `lo > hi`.
    pub fn finite(lo: Q, hi: Q) -> RInterval {
        if lo > hi {
            RInterval::Empty
        } else {
            RInterval::Closed {
                lo: Ext::Fin(lo),
                hi: Ext::Fin(hi),
            }
        }
    }

    pub fn point(x: Q) -> RInterval {
        RInterval::finite(x.clone(), x)
    }

    pub fn real_line() -> RInterval {
        RInterval::Closed {
            lo: Ext::NegInf,
            hi: Ext::PosInf,
        }
    }

    pub fn at_least(lo: Q) -> RInterval {
        RInterval::Closed {
            lo: Ext::Fin(lo),
            hi: Ext::PosInf,
        }
    }

    pub fn at_most(hi: Q) -> RInterval {
        RInterval::Closed {
            lo: Ext::NegInf,
            hi: Ext::Fin(hi),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, RInterval::Empty)
    }

    pub fn lo(&self) -> Option<&Ext> {
        match self {
            RInterval::Closed { lo, .. } => Some(lo),
            RInterval::Empty => None,
        }
    }

    pub fn hi(&self) -> Option<&Ext> {
        match self {
            RInterval::Closed { hi, .. } => Some(hi),
            RInterval::Empty => None,
        }
    }

    pub fn contains(&self, x: &Q) -> bool {
        match self {
            RInterval::Empty => false,
            RInterval::Closed { lo, hi } => lo.cmp_q(x).is_le() && hi.cmp_q(x).is_ge(),
        }
    }

    pub fn intersect(&self, other: &RInterval) -> RInterval {
        match (self, other) {
            (RInterval::Closed { lo: a, hi: b }, RInterval::Closed { lo: c, hi: d }) => {
                let lo = a.clone().max(c.clone());
                let hi = b.clone().min(d.clone());
                if lo > hi {
                    RInterval::Empty
                } else {
                    RInterval::Closed { lo, hi }
                }
            }
            _ => RInterval::Empty,
        }
    }

    pub fn is_subset(&self, other: &RInterval) -> bool {
        match (self, other) {
            (RInterval::Empty, _) => true,
            (_, RInterval::Empty) => false,
            (RInterval::Closed { lo: a, hi: b }, RInterval::Closed { lo: c, hi: d }) => {
                c <= a && b <= d
            }
        }
    }

    /// Nonempty interior.
    pub fn is_solid(&self) -> bool {
        match self {
            RInterval::Empty => false,
            RInterval::Closed { lo, hi } => lo < hi,
        }
    }

    /// Metric projection of `x`; `None` on the empty interval.
    pub fn nearest(&self, x: &Q) -> Option<Q> {
        match self {
            RInterval::Empty => None,
            RInterval::Closed { lo, hi } => {
                if lo.cmp_q(x).is_gt() {
                    lo.finite().cloned()
                } else if hi.cmp_q(x).is_lt() {
                    hi.finite().cloned()
                } else {
                    Some(x.clone())
                }
            }
        }
    }

    pub fn distance(&self, x: &Q) -> Option<Q> {
        self.nearest(x).map(|p| (p - x).abs())
    }

    /// The point closest to zero.
    pub fn anchor(&self) -> Option<Q> {
        self.nearest(&Q::zero())
    }

    /// Largest finite endpoint magnitude (0 if none).
    pub fn magnitude(&self) -> Q {
        let mut m = Q::zero();
        for e in [self.lo(), self.hi()].into_iter().flatten() {
            if let Ext::Fin(v) = e {
                m = m.max(v.abs());
            }
        }
        m
    }
}

impl fmt::Display for RInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RInterval::Empty => f.write_str("{}"),
            RInterval::Closed { lo, hi } => write!(f, "[{lo}, {hi}]"),
        }
    }
}

/// A proper closed convex piecewise-linear function `ℝ → (−∞, +∞]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PLConvex {
    dom_lo: Ext,
    dom_hi: Ext,
    breakpoints: Vec<Q>,
    slopes: Vec<Q>,
    anchor_x: Q,
    anchor_val: Q,
}

impl PLConvex {
    /// Builds the function with the given domain closure, slopes and one finite
    /// value, and brings it to canonical form. Breakpoints outside the domain
    /// are dropped and equal adjacent slopes merged.
    pub fn new(
        dom_lo: Ext,
        dom_hi: Ext,
        breakpoints: Vec<Q>,
        slopes: Vec<Q>,
        anchor_x: Q,
        anchor_val: Q,
    ) -> Result<PLConvex> {
        let dom = RInterval::new(dom_lo.clone(), dom_hi.clone())?;
        if slopes.len() != breakpoints.len() + 1 {
            return Err(Error::Malformed(format!(
                "{} slopes for {} breakpoints",
                slopes.len(),
                breakpoints.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Malformed("breakpoints not strictly increasing".into()));
        }
        if slopes.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::NotConvex(
                slopes.iter().map(fmt_q).collect::<Vec<_>>().join(", "),
            ));
        }
        if !dom.contains(&anchor_x) {
            return Err(Error::Malformed(format!(
                "anchor {} outside domain {dom}",
                fmt_q(&anchor_x)
            )));
        }

        if dom_lo == dom_hi {
            return Ok(PLConvex {
                dom_lo,
                dom_hi,
                breakpoints: Vec::new(),
                slopes: vec![Q::zero()],
                anchor_x,
                anchor_val,
            });
        }

        // keep the pieces meeting the open domain
        let k = breakpoints.len();
        let piece_meets = |j: usize| {
            let left_ok = j == k || dom_lo.cmp_q(&breakpoints[j]).is_lt();
            let right_ok = j == 0 || dom_hi.cmp_q(&breakpoints[j - 1]).is_gt();
            left_ok && right_ok
        };
        let first = (0..=k).find(|&j| piece_meets(j)).expect("nonempty domain");
        let last = (0..=k).rev().find(|&j| piece_meets(j)).expect("nonempty domain");
        let mut bps: Vec<Q> = breakpoints[first..last].to_vec();
        let mut sl: Vec<Q> = slopes[first..=last].to_vec();

        let mut i = 0;
        while i + 1 < sl.len() {
            if sl[i] == sl[i + 1] {
                sl.remove(i + 1);
                bps.remove(i);
            } else {
                i += 1;
            }
        }

        let mut h = PLConvex {
            dom_lo,
            dom_hi,
            breakpoints: bps,
            slopes: sl,
            anchor_x,
            anchor_val,
        };
        let canon = h.dom().anchor().expect("nonempty domain");
        h.anchor_val = h.value_in_domain(&canon);
        h.anchor_x = canon;
        Ok(h)
    }

    /// `x ↦ slope·x + intercept` on the whole line.
    pub fn affine(slope: Q, intercept: Q) -> PLConvex {
        PLConvex::new(
            Ext::NegInf,
            Ext::PosInf,
            vec![],
            vec![slope],
            Q::zero(),
            intercept,
        )
        .expect("affine functions are valid")
    }

    /// Pointwise maximum of finitely many affine functions `(slope, intercept)`.
    pub fn max_affine(pieces: &[(Q, Q)]) -> Result<PLConvex> {
        if pieces.is_empty() {
            return Err(Error::Malformed("max of no affine functions".into()));
        }
        let mut lines: Vec<(Q, Q)> = pieces.to_vec();
        lines.sort();
        // equal slopes: keep the highest intercept
        let mut dedup: Vec<(Q, Q)> = Vec::new();
        for l in lines {
            match dedup.last_mut() {
                Some(last) if last.0 == l.0 => *last = l,
                _ => dedup.push(l),
            }
        }
        // upper envelope, slopes ascending
        let cross = |a: &(Q, Q), b: &(Q, Q)| (&a.1 - &b.1) / (&b.0 - &a.0);
        let mut hull: Vec<(Q, Q)> = Vec::new();
        for l in dedup {
            while hull.len() >= 2 {
                let n = hull.len();
                if cross(&hull[n - 2], &l) <= cross(&hull[n - 2], &hull[n - 1]) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(l);
        }
        let breakpoints: Vec<Q> = hull.windows(2).map(|w| cross(&w[0], &w[1])).collect();
        let slopes: Vec<Q> = hull.iter().map(|l| l.0.clone()).collect();
        let x0 = Q::zero();
        let v0 = hull
            .iter()
            .map(|l| &l.0 * &x0 + &l.1)
            .max()
            .expect("nonempty");
        PLConvex::new(Ext::NegInf, Ext::PosInf, breakpoints, slopes, x0, v0)
    }

    /// `δ_C`, zero on `C` and `+∞` off it.
    pub fn indicator(c: &RInterval) -> Result<PLConvex> {
        match c {
            RInterval::Empty => Err(Error::EmptyInterval),
            RInterval::Closed { lo, hi } => {
                let a = c.anchor().expect("nonempty");
                PLConvex::new(lo.clone(), hi.clone(), vec![], vec![Q::zero()], a, Q::zero())
            }
        }
    }

    /// `σ_C(v) = sup_{x∈C} x·v`.
    pub fn support_fn(c: &RInterval) -> Result<PLConvex> {
        let (lo, hi) = match c {
            RInterval::Empty => return Err(Error::EmptyInterval),
            RInterval::Closed { lo, hi } => (lo, hi),
        };
        let dlo = if lo.is_finite() { Ext::NegInf } else { Ext::zero() };
        let dhi = if hi.is_finite() { Ext::PosInf } else { Ext::zero() };
        let (bps, slopes) = match (lo, hi) {
            (Ext::Fin(a), Ext::Fin(b)) => (vec![Q::zero()], vec![a.clone(), b.clone()]),
            (Ext::Fin(a), _) => (vec![], vec![a.clone()]),
            (_, Ext::Fin(b)) => (vec![], vec![b.clone()]),
            _ => (vec![], vec![Q::zero()]),
        };
        PLConvex::new(dlo, dhi, bps, slopes, Q::zero(), Q::zero())
    }

    pub fn dom_lo(&self) -> &Ext {
        &self.dom_lo
    }

    pub fn dom_hi(&self) -> &Ext {
        &self.dom_hi
    }

    pub fn breakpoints(&self) -> &[Q] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[Q] {
        &self.slopes
    }

    pub fn anchor(&self) -> (&Q, &Q) {
        (&self.anchor_x, &self.anchor_val)
    }

    /// Closure of the effective domain (the domain itself: it is closed).
    pub fn dom(&self) -> RInterval {
        RInterval::Closed {
            lo: self.dom_lo.clone(),
            hi: self.dom_hi.clone(),
        }
    }

    fn singleton(&self) -> bool {
        self.dom_lo == self.dom_hi
    }

    /// Slope of the piece immediately right of `x`.
    fn slope_right(&self, x: &Q) -> &Q {
        let idx = self.breakpoints.partition_point(|b| b <= x);
        &self.slopes[idx]
    }

    /// Slope of the piece immediately left of `x`.
    fn slope_left(&self, x: &Q) -> &Q {
        let idx = self.breakpoints.partition_point(|b| b < x);
        &self.slopes[idx]
    }

    /// `∫_a^b` of the slope function.
    fn slope_integral(&self, a: &Q, b: &Q) -> Q {
        if a > b {
            return -self.slope_integral(b, a);
        }
        let mut acc = Q::zero();
        let mut cur = a.clone();
        for bp in self.breakpoints.iter().filter(|bp| *bp > a && *bp < b) {
            acc += self.slope_right(&cur) * (bp - &cur);
            cur = bp.clone();
        }
        acc += self.slope_right(&cur) * (b - &cur);
        acc
    }

    fn value_in_domain(&self, x: &Q) -> Q {
        &self.anchor_val + self.slope_integral(&self.anchor_x, x)
    }

    pub fn eval(&self, x: &Ext) -> Ext {
        match x {
            Ext::Fin(v) => self.eval_q(v),
            _ => Ext::PosInf,
        }
    }

    pub fn eval_q(&self, x: &Q) -> Ext {
        if self.dom().contains(x) {
            Ext::Fin(self.value_in_domain(x))
        } else {
            Ext::PosInf
        }
    }

    /// Domain endpoints (when finite) and breakpoints, ascending.
    pub fn vertices(&self) -> Vec<Q> {
        let mut v = Vec::with_capacity(self.breakpoints.len() + 2);
        if let Ext::Fin(a) = &self.dom_lo {
            v.push(a.clone());
        }
        v.extend(self.breakpoints.iter().cloned());
        if let Ext::Fin(b) = &self.dom_hi {
            if !self.singleton() {
                v.push(b.clone());
            }
        }
        v
    }

    /// The Fenchel conjugate `h*(v) = sup_x {x·v − h(x)}`.
    ///
    /// Slopes and vertices swap roles: the vertices of `h` become the slopes of
    /// `h*`, and the slopes of `h` lying inside `dom h*` become its breakpoints.
    pub fn conjugate(&self) -> PLConvex {
        let vertices = self.vertices();
        if self.singleton() {
            let c = self.anchor_x.clone();
            return PLConvex::affine(c, -self.anchor_val.clone());
        }
        if vertices.is_empty() {
            // affine on the whole line
            let s = self.slopes[0].clone();
            let val = &s * &self.anchor_x - &self.anchor_val;
            return PLConvex::new(
                Ext::Fin(s.clone()),
                Ext::Fin(s.clone()),
                vec![],
                vec![Q::zero()],
                s,
                val,
            )
            .expect("singleton conjugate");
        }
        let first = self.slopes.first().expect("slopes").clone();
        let last = self.slopes.last().expect("slopes").clone();
        let clo = if self.dom_lo.is_finite() {
            Ext::NegInf
        } else {
            Ext::Fin(first)
        };
        let chi = if self.dom_hi.is_finite() {
            Ext::PosInf
        } else {
            Ext::Fin(last)
        };
        let bps: Vec<Q> = self
            .slopes
            .iter()
            .filter(|s| clo.cmp_q(s).is_lt() && chi.cmp_q(s).is_gt())
            .cloned()
            .collect();
        debug_assert_eq!(bps.len() + 1, vertices.len());
        let cdom = RInterval::Closed {
            lo: clo.clone(),
            hi: chi.clone(),
        };
        let v0 = cdom.anchor().expect("nonempty conjugate domain");
        let val = vertices
            .iter()
            .map(|x| &v0 * x - self.value_in_domain(x))
            .max()
            .expect("vertices");
        PLConvex::new(clo, chi, bps, vertices, v0, val).expect("conjugate is canonical")
    }

    /// The recession function `h^∞`, positively homogeneous.
    pub fn recession(&self) -> PLConvex {
        let left = if self.dom_lo.is_finite() {
            None
        } else {
            Some(self.slopes[0].clone())
        };
        let right = if self.dom_hi.is_finite() {
            None
        } else {
            Some(self.slopes.last().expect("slopes").clone())
        };
        let lo = if left.is_some() { Ext::NegInf } else { Ext::zero() };
        let hi = if right.is_some() { Ext::PosInf } else { Ext::zero() };
        let (bps, slopes) = match (left, right) {
            (Some(a), Some(b)) => (vec![Q::zero()], vec![a, b]),
            (Some(a), None) => (vec![], vec![a]),
            (None, Some(b)) => (vec![], vec![b]),
            (None, None) => (vec![], vec![Q::zero()]),
        };
        PLConvex::new(lo, hi, bps, slopes, Q::zero(), Q::zero()).expect("recession is canonical")
    }

    /// `∂h(x)` as `[left slope, right slope]`; the outward side is infinite at
    /// a domain endpoint. Empty off the domain.
    pub fn subdiff(&self, x: &Q) -> RInterval {
        if !self.dom().contains(x) {
            return RInterval::Empty;
        }
        let lo = if self.dom_lo.cmp_q(x).is_eq() {
            Ext::NegInf
        } else {
            Ext::Fin(self.slope_left(x).clone())
        };
        let hi = if self.dom_hi.cmp_q(x).is_eq() {
            Ext::PosInf
        } else {
            Ext::Fin(self.slope_right(x).clone())
        };
        RInterval::Closed { lo, hi }
    }

    /// Infimum of `h` over `c` and the set of minimizers. The value may be
    /// `−∞` (then the argmin is empty); an empty feasible set gives `(+∞, ∅)`.
    pub fn inf_over(&self, c: &RInterval) -> (Ext, RInterval) {
        let d = self.dom().intersect(c);
        let (p, q) = match &d {
            RInterval::Empty => return (Ext::PosInf, RInterval::Empty),
            RInterval::Closed { lo, hi } => (lo.clone(), hi.clone()),
        };
        let unbounded = (Ext::NegInf, RInterval::Empty);
        let inner: Vec<&Q> = self
            .breakpoints
            .iter()
            .filter(|b| p.cmp_q(b).is_lt() && q.cmp_q(b).is_gt())
            .collect();

        // leftmost point where the right derivative (of h + δ_D) is ≥ 0
        let alpha: Ext = 'a: {
            match &p {
                Ext::Fin(pv) => {
                    if q.cmp_q(pv).is_eq() || !self.slope_right(pv).is_negative() {
                        break 'a p.clone();
                    }
                }
                _ => {
                    let s0 = &self.slopes[0];
                    if s0.is_positive() {
                        return unbounded;
                    }
                    if s0.is_zero() {
                        break 'a Ext::NegInf;
                    }
                }
            }
            for b in &inner {
                if !self.slope_right(b).is_negative() {
                    break 'a Ext::Fin((*b).clone());
                }
            }
            if q.is_finite() {
                break 'a q.clone();
            }
            return unbounded;
        };

        // rightmost point where the left derivative is ≤ 0
        let beta: Ext = 'b: {
            match &q {
                Ext::Fin(qv) => {
                    if p.cmp_q(qv).is_eq() || !self.slope_left(qv).is_positive() {
                        break 'b q.clone();
                    }
                }
                _ => {
                    let sk = self.slopes.last().expect("slopes");
                    if sk.is_negative() {
                        return unbounded;
                    }
                    if sk.is_zero() {
                        break 'b Ext::PosInf;
                    }
                }
            }
            for b in inner.iter().rev() {
                if !self.slope_left(b).is_positive() {
                    break 'b Ext::Fin((*b).clone());
                }
            }
            if p.is_finite() {
                break 'b p.clone();
            }
            return unbounded;
        };

        let at = match (&alpha, &beta) {
            (Ext::Fin(a), _) => a.clone(),
            (_, Ext::Fin(b)) => b.clone(),
            _ => self.anchor_x.clone(),
        };
        (
            Ext::Fin(self.value_in_domain(&at)),
            RInterval::Closed {
                lo: alpha,
                hi: beta,
            },
        )
    }

    /// `inf_ℝ h`.
    pub fn min_value(&self) -> Ext {
        self.inf_over(&RInterval::real_line()).0
    }

    /// `h + g`; `None` when the domains do not meet.
    pub fn add(&self, other: &PLConvex) -> Option<PLConvex> {
        let dom = self.dom().intersect(&other.dom());
        let (lo, hi) = match &dom {
            RInterval::Empty => return None,
            RInterval::Closed { lo, hi } => (lo.clone(), hi.clone()),
        };
        let anchor = dom.anchor().expect("nonempty");
        let val = self.value_in_domain(&anchor) + other.value_in_domain(&anchor);
        if lo == hi {
            return PLConvex::new(lo, hi, vec![], vec![Q::zero()], anchor, val).ok();
        }
        let mut bps: Vec<Q> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .filter(|b| lo.cmp_q(b).is_lt() && hi.cmp_q(b).is_gt())
            .cloned()
            .collect();
        bps.sort();
        bps.dedup();
        // slope on each piece: sample the piece left of each breakpoint, then the last
        let mut slopes = Vec::with_capacity(bps.len() + 1);
        for b in &bps {
            slopes.push(self.slope_left(b) + other.slope_left(b));
        }
        match bps.last() {
            Some(b) => slopes.push(self.slope_right(b) + other.slope_right(b)),
            None => {
                // linear on the whole domain: sample strictly inside it
                let (a, b) = match (&lo, &hi) {
                    (Ext::Fin(l), _) => (self.slope_right(l), other.slope_right(l)),
                    (_, Ext::Fin(h)) => (self.slope_left(h), other.slope_left(h)),
                    _ => (self.slope_right(&anchor), other.slope_right(&anchor)),
                };
                slopes.push(a + b);
            }
        }
        PLConvex::new(lo, hi, bps, slopes, anchor, val).ok()
    }

    /// `x ↦ w·h(x)` for `w > 0`.
    pub fn scale(&self, w: &Q) -> PLConvex {
        assert!(w.is_positive(), "scale requires a positive weight");
        PLConvex {
            dom_lo: self.dom_lo.clone(),
            dom_hi: self.dom_hi.clone(),
            breakpoints: self.breakpoints.clone(),
            slopes: if self.singleton() {
                self.slopes.clone()
            } else {
                self.slopes.iter().map(|s| s * w).collect()
            },
            anchor_x: self.anchor_x.clone(),
            anchor_val: &self.anchor_val * w,
        }
    }

    /// `x ↦ h(x) − v·x`.
    pub fn tilt(&self, v: &Q) -> PLConvex {
        self.add(&PLConvex::affine(-v.clone(), Q::zero()))
            .expect("affine has full domain")
    }

    /// `h` restricted to `c`, i.e. `h + δ_c`.
    pub fn restrict(&self, c: &RInterval) -> Option<PLConvex> {
        let ind = PLConvex::indicator(c).ok()?;
        self.add(&ind)
    }

    /// Largest magnitude among breakpoints and finite domain bounds.
    pub fn magnitude(&self) -> Q {
        self.breakpoints
            .iter()
            .map(|b| b.abs())
            .fold(self.dom().magnitude(), |a, b| a.max(b))
    }
}

impl fmt::Display for PLConvex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bps: Vec<String> = self.breakpoints.iter().map(fmt_q).collect();
        let sl: Vec<String> = self.slopes.iter().map(fmt_q).collect();
        write!(
            f,
            "PL(dom=[{}, {}], bps=[{}], slopes=[{}], h({})={})",
            self.dom_lo,
            self.dom_hi,
            bps.join(", "),
            sl.join(", "),
            fmt_q(&self.anchor_x),
            fmt_q(&self.anchor_val)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::{q, qi};

    fn abs() -> PLConvex {
        PLConvex::max_affine(&[(qi(-1), qi(0)), (qi(1), qi(0))]).unwrap()
    }

    fn kink() -> PLConvex {
        // max(−x, 2x − 3)
        PLConvex::max_affine(&[(qi(-1), qi(0)), (qi(2), qi(-3))]).unwrap()
    }

    fn ind02() -> PLConvex {
        PLConvex::indicator(&RInterval::finite(qi(0), qi(2))).unwrap()
    }

    fn fin(n: i64) -> Ext {
        Ext::Fin(qi(n))
    }

    #[test]
    fn eval_examples() {
        assert_eq!(abs().eval(&fin(3)), fin(3));
        assert_eq!(ind02().eval(&fin(3)), Ext::PosInf);
        assert_eq!(kink().eval(&fin(4)), fin(5));
        assert_eq!(kink().breakpoints(), &[qi(1)]);
        assert_eq!(kink().eval(&fin(1)), fin(-1));
    }

    #[test]
    fn explicit_constructor_matches_max_affine() {
        let h = PLConvex::new(
            Ext::NegInf,
            Ext::PosInf,
            vec![qi(1)],
            vec![qi(-1), qi(2)],
            qi(1),
            qi(-1),
        )
        .unwrap();
        assert_eq!(h, kink());
    }

    #[test]
    fn canonicalization_merges_and_trims() {
        let h = PLConvex::new(
            fin(0),
            fin(5),
            vec![qi(-3), qi(1), qi(2), qi(7)],
            vec![qi(-5), qi(1), qi(1), qi(3), qi(9)],
            qi(0),
            qi(0),
        )
        .unwrap();
        assert_eq!(h.breakpoints(), &[qi(2)]);
        assert_eq!(h.slopes(), &[qi(1), qi(3)]);
        assert!(PLConvex::new(
            Ext::NegInf,
            Ext::PosInf,
            vec![qi(0)],
            vec![qi(1), qi(0)],
            qi(0),
            qi(0)
        )
        .is_err());
        assert!(PLConvex::new(fin(1), fin(0), vec![], vec![qi(0)], qi(0), qi(0)).is_err());
    }

    #[test]
    fn conjugate_examples() {
        let c = abs().conjugate();
        assert_eq!(c, PLConvex::indicator(&RInterval::finite(qi(-1), qi(1))).unwrap());
        let c = ind02().conjugate();
        assert_eq!(
            c,
            PLConvex::max_affine(&[(qi(0), qi(0)), (qi(2), qi(0))]).unwrap()
        );
        // v + 1 on [−1, 2]
        let c = kink().conjugate();
        assert_eq!(c.dom(), RInterval::finite(qi(-1), qi(2)));
        assert_eq!(c.eval(&fin(0)), fin(1));
        assert_eq!(c.eval(&Ext::Fin(q(3, 2))), Ext::Fin(q(5, 2)));
        assert_eq!(c.eval(&fin(3)), Ext::PosInf);
    }

    #[test]
    fn conjugate_of_kink_matches_grid_search() {
        // oracle: sup over x ∈ [−10, 10] at step 1e−3 of v·x − h(x)
        let h = |x: f64| (-x).max(2.0 * x - 3.0);
        let c = kink().conjugate();
        for &v in &[-1.0, -0.5, 0.0, 0.25, 1.0, 1.75, 2.0] {
            let mut best = f64::NEG_INFINITY;
            for k in 0..=20_000 {
                let x = -10.0 + k as f64 * 1e-3;
                best = best.max(v * x - h(x));
            }
            let exact = c.eval_q(&crate::ext::parse_q(&v.to_string()).unwrap()).to_f64();
            assert!((best - exact).abs() < 1e-2, "v={v} grid={best} exact={exact}");
        }
    }

    #[test]
    fn affine_and_singleton_conjugates() {
        let a = PLConvex::affine(qi(3), qi(1));
        let c = a.conjugate();
        assert_eq!(c.dom(), RInterval::point(qi(3)));
        assert_eq!(c.eval(&fin(3)), fin(-1));
        assert_eq!(c.conjugate(), a);
        let half = PLConvex::new(fin(2), Ext::PosInf, vec![], vec![qi(1)], qi(2), qi(0)).unwrap();
        let hc = half.conjugate();
        assert_eq!(hc.dom(), RInterval::at_most(qi(1)));
        assert_eq!(hc.conjugate(), half);
    }

    #[test]
    fn recession_examples() {
        assert_eq!(
            ind02().recession(),
            PLConvex::indicator(&RInterval::point(qi(0))).unwrap()
        );
        assert_eq!(abs().recession(), abs());
        assert_eq!(
            kink().recession(),
            PLConvex::max_affine(&[(qi(-1), qi(0)), (qi(2), qi(0))]).unwrap()
        );
    }

    #[test]
    fn recession_of_kink_matches_difference_quotient() {
        let alpha = 1e6_f64;
        let h = |x: f64| (-x).max(2.0 * x - 3.0);
        let r = kink().recession();
        for &x in &[-2.0, -1.0, 1.0, 3.0] {
            let dq = (h(alpha * x) - h(0.0)) / alpha;
            let exact = r.eval_q(&crate::ext::parse_q(&x.to_string()).unwrap()).to_f64();
            assert!((dq - exact).abs() < 1e-5);
        }
    }

    #[test]
    fn subdiff_examples() {
        assert_eq!(abs().subdiff(&qi(0)), RInterval::finite(qi(-1), qi(1)));
        assert_eq!(abs().subdiff(&qi(2)), RInterval::finite(qi(1), qi(1)));
        assert_eq!(ind02().subdiff(&qi(2)), RInterval::at_least(qi(0)));
        assert_eq!(ind02().subdiff(&qi(3)), RInterval::Empty);
    }

    #[test]
    fn inf_over_examples() {
        let (v, arg) = abs().inf_over(&RInterval::finite(qi(1), qi(3)));
        assert_eq!((v, arg), (fin(1), RInterval::point(qi(1))));
        let (v, arg) = abs().inf_over(&RInterval::real_line());
        assert_eq!((v, arg), (fin(0), RInterval::point(qi(0))));
        let (v, arg) = kink().inf_over(&RInterval::finite(qi(0), qi(4)));
        assert_eq!((v, arg), (fin(-1), RInterval::point(qi(1))));
        let (v, arg) = abs().inf_over(&RInterval::Empty);
        assert_eq!((v, arg), (Ext::PosInf, RInterval::Empty));
        let (v, _) = PLConvex::affine(qi(1), qi(0)).inf_over(&RInterval::real_line());
        assert_eq!(v, Ext::NegInf);
        let (v, arg) = PLConvex::affine(qi(0), qi(4)).inf_over(&RInterval::real_line());
        assert_eq!((v, arg), (fin(4), RInterval::real_line()));
        let flat = PLConvex::max_affine(&[(qi(-1), qi(0)), (qi(0), qi(-2))]).unwrap();
        let (v, arg) = flat.inf_over(&RInterval::real_line());
        assert_eq!((v, arg), (fin(-2), RInterval::at_least(qi(2))));
    }

    #[test]
    fn inf_over_kink_matches_grid_search() {
        let h = |x: f64| (-x).max(2.0 * x - 3.0);
        let best = (0..=4000)
            .map(|k| h(k as f64 * 1e-3))
            .fold(f64::INFINITY, f64::min);
        let (v, _) = kink().inf_over(&RInterval::finite(qi(0), qi(4)));
        assert!((v.to_f64() - best).abs() < 1e-2);
    }

    #[test]
    fn indicator_and_support_examples() {
        let ball = RInterval::finite(qi(-1), qi(1));
        assert_eq!(PLConvex::support_fn(&ball).unwrap(), abs());
        let half = RInterval::at_least(qi(0));
        assert_eq!(
            PLConvex::support_fn(&half).unwrap(),
            PLConvex::indicator(&RInterval::at_most(qi(0))).unwrap()
        );
        assert_eq!(
            PLConvex::support_fn(&RInterval::point(qi(2))).unwrap(),
            PLConvex::affine(qi(2), qi(0))
        );
        for c in [ball, half, RInterval::point(qi(2)), RInterval::real_line()] {
            assert_eq!(
                PLConvex::indicator(&c).unwrap().conjugate(),
                PLConvex::support_fn(&c).unwrap()
            );
        }
        assert_eq!(PLConvex::indicator(&RInterval::Empty), Err(Error::EmptyInterval));
        assert_eq!(PLConvex::support_fn(&RInterval::Empty), Err(Error::EmptyInterval));
    }

    #[test]
    fn sum_and_tilt() {
        let s = abs().add(&kink()).unwrap();
        for x in -4..=4 {
            let xv = fin(x);
            assert_eq!(s.eval(&xv), abs().eval(&xv) + kink().eval(&xv));
        }
        let t = abs().tilt(&q(1, 2));
        assert_eq!(t.eval(&fin(2)), Ext::Fin(qi(1)));
        assert!(ind02()
            .add(&PLConvex::indicator(&RInterval::finite(qi(3), qi(4))).unwrap())
            .is_none());
    }
}
