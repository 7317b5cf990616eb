//! Step paths and atomic measures on a rational time grid of `[0, T]`.

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::ext::{ext_sum, sign, Ext, Q};
use crate::plconvex::PLConvex;

/// `0 = t₀ < t₁ < … < t_N = T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TimeGrid {
    times: Vec<Q>,
}

impl TimeGrid {
    pub fn new(times: Vec<Q>) -> Result<TimeGrid> {
        if times.len() < 2 {
            return Err(Error::Grid("a grid needs at least two times".into()));
        }
        if !times[0].is_zero() {
            return Err(Error::Grid("grid must start at 0".into()));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Grid("grid times must be strictly increasing".into()));
        }
        Ok(TimeGrid { times })
    }

    /// `0, 1, …, n`.
    pub fn uniform(n: usize) -> TimeGrid {
        TimeGrid::new((0..=n as i64).map(crate::ext::qi).collect()).expect("uniform grid")
    }

    pub fn times(&self) -> &[Q] {
        &self.times
    }

    /// Number of grid times `N + 1`.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of cells `N`.
    pub fn cells(&self) -> usize {
        self.times.len() - 1
    }

    pub fn horizon(&self) -> &Q {
        self.times.last().expect("nonempty")
    }

    /// Inserts `factor − 1` equispaced points in every cell.
    pub fn refine(&self, factor: usize) -> TimeGrid {
        assert!(factor >= 1);
        let mut out = Vec::with_capacity(self.cells() * factor + 1);
        for w in self.times.windows(2) {
            let step = (&w[1] - &w[0]) / Q::from_integer((factor as i64).into());
            for k in 0..factor {
                out.push(&w[0] + &step * Q::from_integer((k as i64).into()));
            }
        }
        out.push(self.horizon().clone());
        TimeGrid { times: out }
    }
}

fn same_grid(a: &TimeGrid, b: &TimeGrid) -> Result<()> {
    if a != b {
        return Err(Error::Grid("objects live on different grids".into()));
    }
    Ok(())
}

/// Càdlàg step path: `y_t = v_i` on `[t_i, t_{i+1})`, `y_T = v_N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepPath {
    grid: TimeGrid,
    values: Vec<Q>,
}

impl StepPath {
    pub fn new(grid: TimeGrid, values: Vec<Q>) -> Result<StepPath> {
        if values.len() != grid.len() {
            return Err(Error::Grid(format!(
                "path has {} values on a grid of {} times",
                values.len(),
                grid.len()
            )));
        }
        Ok(StepPath { grid, values })
    }

    pub fn constant(grid: &TimeGrid, c: Q) -> StepPath {
        StepPath {
            values: vec![c; grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    /// `(y_{t_i−})_i = (0, v₀, …, v_{N−1})`, using `y_{0−} = 0`.
    pub fn left_version(&self) -> Vec<Q> {
        let mut out = Vec::with_capacity(self.values.len());
        out.push(Q::zero());
        out.extend(self.values[..self.values.len() - 1].iter().cloned());
        out
    }

    /// Constant extension onto a refined grid.
    pub fn refine(&self, factor: usize) -> StepPath {
        let mut values = Vec::new();
        for v in &self.values[..self.values.len() - 1] {
            values.extend(std::iter::repeat_n(v.clone(), factor));
        }
        values.push(self.values.last().expect("nonempty").clone());
        StepPath {
            grid: self.grid.refine(factor),
            values,
        }
    }
}

/// Signed purely atomic measure with an atom at each grid time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridMeasure {
    grid: TimeGrid,
    atoms: Vec<Q>,
}

impl GridMeasure {
    pub fn new(grid: TimeGrid, atoms: Vec<Q>) -> Result<GridMeasure> {
        if atoms.len() != grid.len() {
            return Err(Error::Grid(format!(
                "measure has {} atoms on a grid of {} times",
                atoms.len(),
                grid.len()
            )));
        }
        Ok(GridMeasure { grid, atoms })
    }

    pub fn zero(grid: &TimeGrid) -> GridMeasure {
        GridMeasure {
            atoms: vec![Q::zero(); grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn atoms(&self) -> &[Q] {
        &self.atoms
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.atoms.iter().any(|a| a.is_negative())
    }

    pub fn check_nonnegative(&self) -> Result<()> {
        match self.atoms.iter().position(|a| a.is_negative()) {
            Some(slot) => Err(Error::NegativeMeasure { slot }),
            None => Ok(()),
        }
    }

    pub fn total_variation(&self) -> Q {
        self.atoms.iter().map(|a| a.abs()).sum()
    }

    /// Atoms stay at the original times; new slots carry zero mass.
    pub fn refine(&self, factor: usize) -> GridMeasure {
        let mut atoms = Vec::new();
        for a in &self.atoms[..self.atoms.len() - 1] {
            atoms.push(a.clone());
            atoms.extend(std::iter::repeat(Q::zero()).take(factor - 1));
        }
        atoms.push(self.atoms.last().expect("nonempty").clone());
        GridMeasure {
            grid: self.grid.refine(factor),
            atoms,
        }
    }

    /// Slot-wise `y·μ`.
    pub fn weighted_by(&self, y: &StepPath) -> Result<GridMeasure> {
        same_grid(&self.grid, &y.grid)?;
        Ok(GridMeasure {
            grid: self.grid.clone(),
            atoms: self.atoms.iter().zip(&y.values).map(|(m, v)| m * v).collect(),
        })
    }
}

/// One slot of a Lebesgue decomposition with respect to a reference measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitSlot {
    /// The reference charges the slot; `density = θ_i / m_i`.
    Absolute { density: Q },
    /// The reference is null at the slot; `atom = θ_i`.
    Singular { atom: Q },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LebesgueSplit {
    pub slots: Vec<SplitSlot>,
}

impl LebesgueSplit {
    /// Rebuilds `θ` from the density against `μ` plus the singular atoms.
    pub fn recombine(&self, mu: &GridMeasure) -> Result<GridMeasure> {
        if mu.atoms.len() != self.slots.len() {
            return Err(Error::Grid("split and reference measure differ in length".into()));
        }
        let atoms = self
            .slots
            .iter()
            .zip(&mu.atoms)
            .map(|(s, m)| match s {
                SplitSlot::Absolute { density } => density * m,
                SplitSlot::Singular { atom } => atom.clone(),
            })
            .collect();
        GridMeasure::new(mu.grid.clone(), atoms)
    }

    /// `|θ^s|` slot-wise (zero at absolutely continuous slots).
    pub fn singular_variation(&self) -> Vec<Q> {
        self.slots
            .iter()
            .map(|s| match s {
                SplitSlot::Singular { atom } => atom.abs(),
                SplitSlot::Absolute { .. } => Q::zero(),
            })
            .collect()
    }
}

/// `⟨y, (u, ũ)⟩ = Σ v_i u_i + Σ y_{t_i−} ũ_i`.
pub fn pairing(y: &StepPath, u: &GridMeasure, ut: &GridMeasure) -> Result<Q> {
    same_grid(&y.grid, &u.grid)?;
    same_grid(&y.grid, &ut.grid)?;
    let direct: Q = y.values.iter().zip(&u.atoms).map(|(v, a)| v * a).sum();
    let left: Q = y
        .left_version()
        .iter()
        .zip(&ut.atoms)
        .map(|(v, a)| v * a)
        .sum();
    Ok(direct + left)
}

pub fn lebesgue_decompose(theta: &GridMeasure, mu: &GridMeasure) -> Result<LebesgueSplit> {
    same_grid(&theta.grid, &mu.grid)?;
    mu.check_nonnegative()?;
    let slots = theta
        .atoms
        .iter()
        .zip(&mu.atoms)
        .map(|(t, m)| {
            if m.is_positive() {
                SplitSlot::Absolute { density: t / m }
            } else {
                SplitSlot::Singular { atom: t.clone() }
            }
        })
        .collect();
    Ok(LebesgueSplit { slots })
}

fn check_slots(h: &[PLConvex], grid: &TimeGrid) -> Result<()> {
    if h.len() != grid.len() {
        return Err(Error::Grid(format!(
            "{} integrand slots on a grid of {} times",
            h.len(),
            grid.len()
        )));
    }
    Ok(())
}

/// `I_h(y) = Σ m_i h_{t_i}(v_i)`; a `+∞` term on a charged slot dominates.
pub fn eval_i(h: &[PLConvex], y: &StepPath, mu: &GridMeasure) -> Result<Ext> {
    same_grid(&y.grid, &mu.grid)?;
    check_slots(h, &y.grid)?;
    mu.check_nonnegative()?;
    Ok(ext_sum(
        h.iter()
            .zip(&y.values)
            .zip(&mu.atoms)
            .map(|((hi, v), m)| hi.eval_q(v).scale_nonneg(m)),
    ))
}

/// `J_f(θ) = Σ_{m_i>0} m_i f(θ_i/m_i) + Σ_{m_i=0} |θ_i| f^∞(sign θ_i)`.
pub fn eval_j(f: &[PLConvex], theta: &GridMeasure, mu: &GridMeasure) -> Result<Ext> {
    check_slots(f, &theta.grid)?;
    let split = lebesgue_decompose(theta, mu)?;
    Ok(ext_sum(split.slots.iter().zip(f).zip(&mu.atoms).map(
        |((s, fi), m)| match s {
            SplitSlot::Absolute { density } => fi.eval_q(density).scale_nonneg(m),
            SplitSlot::Singular { atom } if atom.is_zero() => Ext::zero(),
            SplitSlot::Singular { atom } => fi.recession().eval_q(&sign(atom)).scale_nonneg(&atom.abs()),
        },
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::{q, qi};
    use crate::plconvex::RInterval;

    fn qs(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|&x| qi(x)).collect()
    }

    fn abs() -> PLConvex {
        PLConvex::max_affine(&[(qi(-1), qi(0)), (qi(1), qi(0))]).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(qs(&[0])).is_err());
        assert!(TimeGrid::new(qs(&[1, 2])).is_err());
        assert!(TimeGrid::new(qs(&[0, 2, 2])).is_err());
        let g = TimeGrid::new(vec![qi(0), q(1, 2), qi(1)]).unwrap();
        assert_eq!(g.cells(), 2);
        assert_eq!(g.refine(2).times(), &[qi(0), q(1, 4), q(1, 2), q(3, 4), qi(1)]);
        assert_eq!(g.refine(2).refine(3), g.refine(6));
    }

    #[test]
    fn left_version_examples() {
        let g = TimeGrid::uniform(1);
        assert_eq!(StepPath::new(g, qs(&[5, 7])).unwrap().left_version(), qs(&[0, 5]));
        let g = TimeGrid::uniform(3);
        assert_eq!(StepPath::constant(&g, qi(4)).left_version(), qs(&[0, 4, 4, 4]));
        let g = TimeGrid::uniform(2);
        assert_eq!(StepPath::new(g, qs(&[1, 3, 2])).unwrap().left_version(), qs(&[0, 1, 3]));
    }

    #[test]
    fn pairing_examples() {
        let g = TimeGrid::uniform(1);
        let one = StepPath::constant(&g, qi(1));
        let u = GridMeasure::new(g.clone(), qs(&[0, 2])).unwrap();
        let ut = GridMeasure::new(g.clone(), qs(&[3, 0])).unwrap();
        assert_eq!(pairing(&one, &u, &ut).unwrap(), qi(2));
        let ut = GridMeasure::new(g.clone(), qs(&[0, 3])).unwrap();
        assert_eq!(pairing(&one, &GridMeasure::zero(&g), &ut).unwrap(), qi(3));
        let y = StepPath::new(g.clone(), qs(&[1, 3])).unwrap();
        let u = GridMeasure::new(g.clone(), qs(&[1, 1])).unwrap();
        let ut = GridMeasure::new(g.clone(), qs(&[0, 2])).unwrap();
        assert_eq!(pairing(&y, &u, &ut).unwrap(), qi(6));
        let other = GridMeasure::zero(&TimeGrid::uniform(2));
        assert!(pairing(&y, &other, &ut).is_err());
    }

    #[test]
    fn lebesgue_examples() {
        let g = TimeGrid::uniform(2);
        let theta = GridMeasure::new(g.clone(), qs(&[2, 0, 3])).unwrap();
        let mu = GridMeasure::new(g.clone(), qs(&[1, 1, 0])).unwrap();
        let s = lebesgue_decompose(&theta, &mu).unwrap();
        assert_eq!(
            s.slots,
            vec![
                SplitSlot::Absolute { density: qi(2) },
                SplitSlot::Absolute { density: qi(0) },
                SplitSlot::Singular { atom: qi(3) }
            ]
        );
        assert_eq!(s.recombine(&mu).unwrap(), theta);
        assert_eq!(s.singular_variation(), qs(&[0, 0, 3]));

        let s = lebesgue_decompose(&mu, &mu).unwrap();
        assert_eq!(s.slots[0], SplitSlot::Absolute { density: qi(1) });
        assert_eq!(s.slots[2], SplitSlot::Singular { atom: qi(0) });

        let neg = GridMeasure::new(g.clone(), qs(&[1, -1, 0])).unwrap();
        assert_eq!(
            lebesgue_decompose(&theta, &neg),
            Err(Error::NegativeMeasure { slot: 1 })
        );
    }

    #[test]
    fn eval_i_examples() {
        let g = TimeGrid::uniform(1);
        let h = vec![abs(), abs()];
        let y = StepPath::new(g.clone(), qs(&[2, -1])).unwrap();
        let mu = GridMeasure::new(g.clone(), qs(&[1, 3])).unwrap();
        assert_eq!(eval_i(&h, &y, &mu).unwrap(), Ext::Fin(qi(5)));
        assert_eq!(eval_i(&h, &y, &GridMeasure::zero(&g)).unwrap(), Ext::zero());
        let ind = PLConvex::indicator(&RInterval::finite(qi(0), qi(1))).unwrap();
        let y = StepPath::new(g.clone(), qs(&[2, 0])).unwrap();
        let mu = GridMeasure::new(g.clone(), qs(&[1, 1])).unwrap();
        assert_eq!(eval_i(&[ind.clone(), ind], &y, &mu).unwrap(), Ext::PosInf);
    }

    #[test]
    fn eval_j_examples() {
        let g = TimeGrid::uniform(2);
        let h = vec![abs(); 3];
        let theta = GridMeasure::new(g.clone(), qs(&[2, 0, 3])).unwrap();
        let mu = GridMeasure::new(g.clone(), qs(&[1, 1, 0])).unwrap();
        assert_eq!(eval_j(&h, &theta, &mu).unwrap(), Ext::Fin(qi(5)));

        let shifted = PLConvex::max_affine(&[(qi(-1), qi(1)), (qi(1), qi(1))]).unwrap();
        let zero = GridMeasure::zero(&g);
        assert_eq!(
            eval_j(&vec![shifted; 3], &zero, &mu).unwrap(),
            Ext::Fin(qi(2))
        );

        let ball = PLConvex::indicator(&RInterval::finite(qi(-1), qi(1))).unwrap();
        assert_eq!(eval_j(&vec![ball; 3], &theta, &mu).unwrap(), Ext::PosInf);
    }
}
