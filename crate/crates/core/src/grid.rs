//! Discretization grids over numeric attributes.
//!
//! A grid places `d` node centers across the observed range `[lo, hi]` of an
//! attribute. Centers sit in the middle of `d` equal cells, so
//! `centers[i] = lo + (i + 0.5) * (hi - lo) / d` for zero-based `i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Spread floor used when the observed range collapses to a point.
pub const SIGMA_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", content = "value", rename_all = "snake_case")]
pub enum SigmaPolicy<R> {
    /// Same spread for every node.
    Fixed(R),
    /// One cell width, `(hi - lo) / d`.
    #[default]
    CellWidth,
}

/// Where the node centers are anchored.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridLayout {
    /// Cells tile `[lo, hi]`.
    #[default]
    Offset,
    /// Cells tile `[0, hi - lo]`, ignoring where the data actually sits.
    /// Kept for experimentation; such grids need not overlap the data.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid<R> {
    lo: R,
    hi: R,
    sigma: R,
    centers: Vec<R>,
    degenerate: bool,
    layout: GridLayout,
}

/// Builds an offset grid spanning `[min(values), max(values)]`.
pub fn build_grid<R: Real>(values: &[R], d: usize, sigma: SigmaPolicy<R>) -> Result<Grid<R>> {
    build_grid_with_layout(values, d, sigma, GridLayout::Offset)
}

pub fn build_grid_with_layout<R: Real>(
    values: &[R],
    d: usize,
    sigma: SigmaPolicy<R>,
    layout: GridLayout,
) -> Result<Grid<R>> {
    let &first = values.first().ok_or(Error::EmptyValues)?;
    let mut lo = first;
    let mut hi = first;
    for &v in values {
        if !v.is_finite() {
            return Err(Error::NonFiniteInput);
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Grid::from_bounds(lo, hi, d, sigma, layout)
}

impl<R: Real> Grid<R> {
    pub fn from_bounds(
        lo: R,
        hi: R,
        d: usize,
        sigma: SigmaPolicy<R>,
        layout: GridLayout,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidGridSize);
        }
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::NonFiniteInput);
        }
        let degenerate = lo == hi;
        let count = R::from_count(d);
        let width = (hi - lo) / count;
        let sigma = match sigma {
            SigmaPolicy::Fixed(s) => {
                if s <= R::zero() || !s.is_finite() {
                    return Err(Error::InvalidSigma);
                }
                s
            }
            SigmaPolicy::CellWidth => width.max(R::lit(SIGMA_FLOOR)),
        };
        let origin = match layout {
            GridLayout::Offset => lo,
            GridLayout::Literal => R::zero(),
        };
        let half = R::lit(0.5);
        let centers = (0..d)
            .map(|i| origin + (R::from_count(i) + half) * (hi - lo) / count)
            .collect();
        Ok(Grid {
            lo,
            hi,
            sigma,
            centers,
            degenerate,
            layout,
        })
    }

    pub fn lo(&self) -> R {
        self.lo
    }

    pub fn hi(&self) -> R {
        self.hi
    }

    pub fn sigma(&self) -> R {
        self.sigma
    }

    pub fn centers(&self) -> &[R] {
        &self.centers
    }

    /// Node count.
    pub fn d(&self) -> usize {
        self.centers.len()
    }

    /// True when the range collapsed to a single point.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn layout(&self) -> GridLayout {
        self.layout
    }

    pub fn cell_width(&self) -> R {
        (self.hi - self.lo) / R::from_count(self.d())
    }

    /// Left edge of the first cell.
    pub fn origin(&self) -> R {
        match self.layout {
            GridLayout::Offset => self.lo,
            GridLayout::Literal => R::zero(),
        }
    }

    /// Interior cell boundaries, `d - 1` of them.
    pub fn boundaries(&self) -> Vec<R> {
        let count = R::from_count(self.d());
        (1..self.d())
            .map(|i| self.origin() + R::from_count(i) * (self.hi - self.lo) / count)
            .collect()
    }

    /// Whether `v` lies in `[lo, hi]`.
    pub fn covers(&self, v: R) -> bool {
        v >= self.lo && v <= self.hi
    }
}
