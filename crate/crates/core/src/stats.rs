//! Sufficient statistics for clusters.
//!
//! Every attribute is reduced to a mass per slot: a count per declared value
//! for nominal attributes, and the summed membership per grid node for
//! numeric ones. Category utility only ever looks at these masses and the
//! member count.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::membership::{membership_into, MembershipKind};
use crate::scalar::{Real, Scalar};
use crate::schema::{AttributeKind, Instance, Schema};

/// Per-attribute slot masses of a single instance.
pub type Profile<S> = Vec<Vec<S>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterStats<S> {
    count: usize,
    mass: Vec<Vec<S>>,
}

impl<S: Scalar> ClusterStats<S> {
    /// Empty statistics with `widths[j]` slots for attribute `j`.
    pub fn empty(widths: &[usize]) -> Self {
        ClusterStats {
            count: 0,
            mass: widths.iter().map(|&w| vec![S::zero(); w]).collect(),
        }
    }

    pub fn from_profile(profile: &Profile<S>) -> Self {
        ClusterStats {
            count: 1,
            mass: profile.clone(),
        }
    }

    pub fn from_profiles<'a>(
        widths: &[usize],
        profiles: impl IntoIterator<Item = &'a Profile<S>>,
    ) -> Self {
        let mut stats = Self::empty(widths);
        for p in profiles {
            stats.add(p);
        }
        stats
    }

    /// Member count `l_k`.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mass(&self) -> &[Vec<S>] {
        &self.mass
    }

    pub fn attribute(&self, j: usize) -> &[S] {
        &self.mass[j]
    }

    pub fn add(&mut self, profile: &Profile<S>) {
        debug_assert_eq!(profile.len(), self.mass.len());
        self.count += 1;
        for (acc, p) in self.mass.iter_mut().zip(profile) {
            for (a, &x) in acc.iter_mut().zip(p) {
                *a = *a + x;
            }
        }
    }

    pub fn with(&self, profile: &Profile<S>) -> Self {
        let mut out = self.clone();
        out.add(profile);
        out
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        for (acc, p) in self.mass.iter_mut().zip(&other.mass) {
            for (a, &x) in acc.iter_mut().zip(p) {
                *a = *a + x;
            }
        }
    }

    pub fn merged(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.merge(other);
        out
    }

    /// Largest absolute slot difference; `None` if shapes or counts differ.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        if self.count != other.count || self.mass.len() != other.mass.len() {
            return None;
        }
        let mut worst = 0.0f64;
        for (a, b) in self.mass.iter().zip(&other.mass) {
            if a.len() != b.len() {
                return None;
            }
            for (&x, &y) in a.iter().zip(b) {
                worst = worst.max((x.to_f64() - y.to_f64()).abs());
            }
        }
        Some(worst)
    }
}

/// Slot count per attribute: declared values, or grid nodes.
pub fn slot_widths<R>(schema: &Schema, grids: &[Option<Grid<R>>]) -> Result<Vec<usize>>
where
    R: Real,
{
    schema
        .attributes()
        .iter()
        .enumerate()
        .map(|(j, attr)| match &attr.kind {
            AttributeKind::Nominal { values } => Ok(values.len()),
            AttributeKind::Numeric => grids
                .get(j)
                .and_then(Option::as_ref)
                .map(Grid::d)
                .ok_or_else(|| Error::MissingGrid {
                    attribute: attr.name.clone(),
                }),
        })
        .collect()
}

/// Indicator profile of an instance over an all-nominal schema.
pub fn nominal_profile<S: Scalar, T>(schema: &Schema, inst: &Instance<T>) -> Result<Profile<S>> {
    schema
        .attributes()
        .iter()
        .enumerate()
        .map(|(j, attr)| {
            let values = match &attr.kind {
                AttributeKind::Nominal { values } => values,
                AttributeKind::Numeric => {
                    return Err(Error::NonNominalAttribute {
                        attribute: attr.name.clone(),
                    })
                }
            };
            let label = inst.label(j).ok_or_else(|| Error::KindMismatch {
                attribute: attr.name.clone(),
                expected: "nominal",
            })?;
            let idx = values.iter().position(|v| v == label).ok_or_else(|| {
                Error::UnknownNominalValue {
                    attribute: attr.name.clone(),
                    value: label.to_string(),
                }
            })?;
            let mut slots = vec![S::zero(); values.len()];
            slots[idx] = S::one();
            Ok(slots)
        })
        .collect()
}

/// Profile of an instance over a mixed schema: indicators for nominal
/// attributes and membership vectors for numeric ones.
pub fn profile<R: Real>(
    schema: &Schema,
    grids: &[Option<Grid<R>>],
    kind: MembershipKind,
    inst: &Instance<R>,
) -> Result<Profile<R>> {
    schema
        .attributes()
        .iter()
        .enumerate()
        .map(|(j, attr)| match &attr.kind {
            AttributeKind::Nominal { values } => {
                let label = inst.label(j).ok_or_else(|| Error::KindMismatch {
                    attribute: attr.name.clone(),
                    expected: "nominal",
                })?;
                let idx = values.iter().position(|v| v == label).ok_or_else(|| {
                    Error::UnknownNominalValue {
                        attribute: attr.name.clone(),
                        value: label.to_string(),
                    }
                })?;
                let mut slots = vec![R::zero(); values.len()];
                slots[idx] = R::one();
                Ok(slots)
            }
            AttributeKind::Numeric => {
                let grid =
                    grids
                        .get(j)
                        .and_then(Option::as_ref)
                        .ok_or_else(|| Error::MissingGrid {
                            attribute: attr.name.clone(),
                        })?;
                let a = inst.number(j).ok_or_else(|| Error::KindMismatch {
                    attribute: attr.name.clone(),
                    expected: "numeric",
                })?;
                let mut slots = vec![R::zero(); grid.d()];
                membership_into(a, grid, kind, &mut slots)?;
                Ok(slots)
            }
        })
        .collect()
}
