//! Membership of a numeric value in the nodes of a grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MembershipKind {
    /// Crisp binning: exactly one node per value.
    Rectangular,
    /// Graded membership `exp(-(a - v)^2 / (2 sigma^2))` at every node.
    #[default]
    Gaussian,
}

impl MembershipKind {
    pub fn name(self) -> &'static str {
        match self {
            MembershipKind::Rectangular => "rectangular",
            MembershipKind::Gaussian => "gaussian",
        }
    }
}

/// Gaussian membership of `a` in the node centered at `v`.
///
/// Equals 1 exactly when `a == v` and decays strictly with `|a - v|`.
/// The kernel is not normalized: peaks are 1, not `1 / (sigma sqrt(2 pi))`.
pub fn gaussian_membership<R: Real>(a: R, v: R, sigma: R) -> Result<R> {
    if !a.is_finite() || !v.is_finite() || !sigma.is_finite() || sigma <= R::zero() {
        return Err(Error::NonFiniteInput);
    }
    Ok(gaussian_unchecked(a, v, sigma))
}

#[inline]
fn gaussian_unchecked<R: Real>(a: R, v: R, sigma: R) -> R {
    let z = (a - v) / sigma;
    (-(z * z) / R::lit(2.0)).exp()
}

/// Zero-based index of the cell containing `a`.
///
/// Cells are half-open `[left, right)`; the top cell also holds `hi`, and
/// values outside the grid clamp to the first or last cell.
pub fn rectangular_cell<R: Real>(a: R, grid: &Grid<R>) -> Result<usize> {
    if !a.is_finite() {
        return Err(Error::NonFiniteInput);
    }
    let d = grid.d();
    let span = grid.hi() - grid.lo();
    if span <= R::zero() {
        return Ok(0);
    }
    let pos = ((a - grid.origin()) * R::from_count(d) / span).floor();
    if pos < R::zero() {
        Ok(0)
    } else {
        Ok(pos.to_usize().map_or(d - 1, |k| k.min(d - 1)))
    }
}

/// Indicator vector with a single 1 at the cell containing `a`.
pub fn rectangular_membership<R: Real>(a: R, grid: &Grid<R>) -> Result<Vec<R>> {
    let k = rectangular_cell(a, grid)?;
    let mut out = vec![R::zero(); grid.d()];
    out[k] = R::one();
    Ok(out)
}

/// Membership of `a` at each grid node.
pub fn membership_vector<R: Real>(a: R, grid: &Grid<R>, kind: MembershipKind) -> Result<Vec<R>> {
    let mut out = vec![R::zero(); grid.d()];
    membership_into(a, grid, kind, &mut out)?;
    Ok(out)
}

/// Writes the membership vector of `a` into `out` (length `grid.d()`).
pub fn membership_into<R: Real>(
    a: R,
    grid: &Grid<R>,
    kind: MembershipKind,
    out: &mut [R],
) -> Result<()> {
    debug_assert_eq!(out.len(), grid.d());
    if !a.is_finite() {
        return Err(Error::NonFiniteInput);
    }
    match kind {
        MembershipKind::Gaussian => {
            for (slot, &v) in out.iter_mut().zip(grid.centers()) {
                *slot = gaussian_unchecked(a, v, grid.sigma());
            }
        }
        MembershipKind::Rectangular => {
            let k = rectangular_cell(a, grid)?;
            out.fill(R::zero());
            out[k] = R::one();
        }
    }
    Ok(())
}
