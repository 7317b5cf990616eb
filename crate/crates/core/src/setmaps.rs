//! Interval-valued mappings on a grid with separate point and cell values.
//!
//! Topological notions are evaluated at grid semantics: the mapping is
//! constant on each open cell `(t_i, t_{i+1})` and may take a different value
//! at the grid time itself. Càdlàg selections are step paths on refinements of
//! the grid, so a selection takes at `t_i` a value in `P_i ∩ I_i`, is free in
//! `I_i` inside the cell, and reaches `t_{i+1}` from the left inside `I_i`.

use num::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::Q;
use crate::plconvex::RInterval;
use crate::timegrid::{StepPath, TimeGrid};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetMap {
    grid: TimeGrid,
    point_vals: Vec<RInterval>,
    open_vals: Vec<RInterval>,
}

impl SetMap {
    pub fn new(grid: TimeGrid, point_vals: Vec<RInterval>, open_vals: Vec<RInterval>) -> Result<SetMap> {
        if point_vals.len() != grid.len() || open_vals.len() != grid.cells() {
            return Err(Error::Grid(format!(
                "set map has {} point and {} cell values on a grid of {} times",
                point_vals.len(),
                open_vals.len(),
                grid.len()
            )));
        }
        if let Some(i) = point_vals.iter().position(RInterval::is_empty) {
            return Err(Error::Precondition {
                slot: i,
                reason: "point value is empty".into(),
            });
        }
        if let Some(i) = open_vals.iter().position(RInterval::is_empty) {
            return Err(Error::Precondition {
                slot: i,
                reason: "cell value is empty".into(),
            });
        }
        Ok(SetMap {
            grid,
            point_vals,
            open_vals,
        })
    }

    pub fn constant(grid: &TimeGrid, c: RInterval) -> Result<SetMap> {
        SetMap::new(grid.clone(), vec![c.clone(); grid.len()], vec![c; grid.cells()])
    }

    /// Point values double as cell values (`P_i = I_i`).
    pub fn regular(grid: &TimeGrid, vals: Vec<RInterval>) -> Result<SetMap> {
        let open = vals[..vals.len().saturating_sub(1)].to_vec();
        SetMap::new(grid.clone(), vals, open)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn point_vals(&self) -> &[RInterval] {
        &self.point_vals
    }

    pub fn open_vals(&self) -> &[RInterval] {
        &self.open_vals
    }

    pub fn last(&self) -> usize {
        self.grid.cells()
    }

    /// Values a càdlàg selection can take at `t_i`: `P_i ∩ I_i`, and `P_N` at the horizon.
    pub fn attainable_at(&self, i: usize) -> RInterval {
        if i < self.last() {
            self.point_vals[i].intersect(&self.open_vals[i])
        } else {
            self.point_vals[i].clone()
        }
    }

    /// Every slot admits a value, so `D(Γ)` is nonempty.
    pub fn selections_exist(&self) -> bool {
        (0..=self.last()).all(|i| !self.attainable_at(i).is_empty())
    }

    /// `cl{y_{t_i−} | y ∈ D(Γ)}`; `{0}` at the origin.
    pub fn left_attainable_at(&self, i: usize) -> RInterval {
        if i == 0 {
            RInterval::point(Q::zero())
        } else if self.selections_exist() {
            self.open_vals[i - 1].clone()
        } else {
            RInterval::Empty
        }
    }

    /// The left-limit mapping `Γ⃗`: the preceding cell value at each grid
    /// time, `{0}` at `t₀`, and the cell values inside the cells.
    pub fn vec_map(&self) -> SetMap {
        let mut point = Vec::with_capacity(self.point_vals.len());
        point.push(RInterval::point(Q::zero()));
        point.extend(self.open_vals.iter().cloned());
        SetMap {
            grid: self.grid.clone(),
            point_vals: point,
            open_vals: self.open_vals.clone(),
        }
    }

    /// `P_i ⊆ I_i` for every `i < N`.
    pub fn right_isc_check(&self) -> bool {
        self.first_right_isc_violation().is_none()
    }

    pub fn first_right_isc_violation(&self) -> Option<usize> {
        (0..self.last()).find(|&i| !self.point_vals[i].is_subset(&self.open_vals[i]))
    }

    /// `P_i ⊆ I_{i−1}` for every `i ≥ 1`.
    pub fn left_isc_check(&self) -> bool {
        (1..=self.last()).all(|i| self.point_vals[i].is_subset(&self.open_vals[i - 1]))
    }

    /// Every value has nonempty interior.
    pub fn solid_check(&self) -> bool {
        self.point_vals.iter().chain(&self.open_vals).all(RInterval::is_solid)
    }

    /// Per-slot comparison of `Γ_t` with `cl{y_t | y ∈ D(Γ)}` and of `Γ⃗_t`
    /// with `cl{y_{t−} | y ∈ D(Γ)}`.
    pub fn michael_check(&self) -> MichaelReport {
        let vec = self.vec_map();
        let slots: Vec<MichaelSlot> = (0..=self.last())
            .map(|i| {
                let attainable = self.attainable_at(i);
                let left_attainable = self.left_attainable_at(i);
                MichaelSlot {
                    slot: i,
                    holds: attainable == self.point_vals[i],
                    left_holds: left_attainable == vec.point_vals[i],
                    value: self.point_vals[i].to_string(),
                    attainable: attainable.to_string(),
                }
            })
            .collect();
        let representation_holds = slots.iter().all(|s| s.holds);
        let right_isc = self.right_isc_check();
        MichaelReport {
            representation_holds,
            right_isc,
            verdict_matches_right_isc: representation_holds == right_isc,
            left_representation_holds: slots.iter().all(|s| s.left_holds),
            solid: self.solid_check(),
            failing_slots: slots.iter().filter(|s| !s.holds).map(|s| s.slot).collect(),
            slots,
        }
    }

    /// Slot-wise metric projection of `x` onto the attainable values.
    pub fn projection_selection(&self, x: &Q) -> Result<StepPath> {
        if let Some(slot) = self.first_right_isc_violation() {
            return Err(Error::Precondition {
                slot,
                reason: "point value not contained in the following cell value".into(),
            });
        }
        let values = (0..=self.last())
            .map(|i| {
                self.attainable_at(i).nearest(x).ok_or(Error::Precondition {
                    slot: i,
                    reason: "no attainable value".into(),
                })
            })
            .collect::<Result<Vec<Q>>>()?;
        let path = StepPath::new(self.grid.clone(), values)?;
        debug_assert!(self.left_limit_identity(x, &path));
        Ok(path)
    }

    /// `y_{t_i−}` is the nearest point of `Γ⃗_{t_i}` to `x` wherever the
    /// preceding cell value is itself attainable.
    pub fn left_limit_identity(&self, x: &Q, path: &StepPath) -> bool {
        let vec = self.vec_map();
        let left = path.left_version();
        (1..=self.last()).all(|i| {
            self.open_vals[i - 1] != self.attainable_at(i - 1)
                || vec.point_vals[i].nearest(x).as_ref() == Some(&left[i])
        })
    }

    /// `y ∈ D(Γ)` for a path on this grid.
    pub fn is_selection(&self, y: &StepPath) -> bool {
        y.grid() == &self.grid
            && y.values()
                .iter()
                .enumerate()
                .all(|(i, v)| self.attainable_at(i).contains(v))
    }

    /// `y_− ∈ D_l(Γ)`: left limits at grid times in the point values and, inside
    /// each cell, the path value in the cell value.
    pub fn is_left_selection(&self, y: &StepPath) -> bool {
        if y.grid() != &self.grid {
            return false;
        }
        let left = y.left_version();
        left.iter()
            .enumerate()
            .all(|(i, v)| self.point_vals[i].contains(v))
            && (0..self.last()).all(|i| self.open_vals[i].contains(&y.values()[i]))
    }

    /// New grid times inside a cell take the cell value.
    pub fn refine(&self, factor: usize) -> SetMap {
        let mut point = Vec::new();
        let mut open = Vec::new();
        for (i, cell) in self.open_vals.iter().enumerate() {
            point.push(self.point_vals[i].clone());
            for _ in 1..factor {
                point.push(cell.clone());
            }
            for _ in 0..factor {
                open.push(cell.clone());
            }
        }
        point.push(self.point_vals.last().expect("nonempty").clone());
        SetMap {
            grid: self.grid.refine(factor),
            point_vals: point,
            open_vals: open,
        }
    }

    pub fn magnitude(&self) -> Q {
        self.point_vals
            .iter()
            .chain(&self.open_vals)
            .map(RInterval::magnitude)
            .fold(Q::zero(), |a, b| a.max(b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MichaelSlot {
    pub slot: usize,
    pub holds: bool,
    pub left_holds: bool,
    pub value: String,
    pub attainable: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MichaelReport {
    pub slots: Vec<MichaelSlot>,
    pub representation_holds: bool,
    pub right_isc: bool,
    pub verdict_matches_right_isc: bool,
    pub left_representation_holds: bool,
    pub solid: bool,
    pub failing_slots: Vec<usize>,
}
