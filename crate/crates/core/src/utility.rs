//! Category utility of a partition.
//!
//! For every cluster `C_k`, attribute `A_j` and slot `v_ij` (a declared value
//! or a grid node) the score adds
//!
//! ```text
//! P(A_j = v_ij) * P(C_k | A_j = v_ij) * P(A_j = v_ij | C_k)
//!    weight         predictiveness         predictability
//! ```
//!
//! With nominal attributes the three factors are frequencies. With numeric
//! attributes instance counts are replaced by summed membership: for a node
//! with cluster mass `S_k` and universe mass `S`, the factors are `S / l`,
//! `S_k / S` and `S_k / l_k`. Predictiveness is 0 where `S` is 0.
//!
//! The sum is neither divided by the cluster count nor reduced by the
//! single-cluster baseline, so refining a partition never lowers it. Compare
//! scores only between partitions with the same cluster count, or use the
//! normalized move score in [`crate::tree`].

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::membership::{membership_vector, MembershipKind};
use crate::partition::Partition;
use crate::scalar::{Real, Scalar};
use crate::schema::{AttributeKind, Dataset, Schema};
use crate::stats::{nominal_profile, profile, slot_widths, ClusterStats, Profile};

/// One `(k, j, i)` summand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UtilityTerm<S> {
    pub cluster: usize,
    pub attribute: usize,
    pub slot: usize,
    pub weight: S,
    pub predictiveness: S,
    pub predictability: S,
    pub product: S,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtilityReport<S> {
    pub attributes: Vec<String>,
    /// Display label of every slot, per attribute (empty for skipped ones).
    pub slot_labels: Vec<Vec<String>>,
    pub terms: Vec<UtilityTerm<S>>,
    pub total: S,
}

impl<S: Scalar> UtilityReport<S> {
    /// Looks up the term for cluster `k`, attribute `j`, slot `i`.
    pub fn term(&self, k: usize, j: usize, i: usize) -> Option<&UtilityTerm<S>> {
        self.terms
            .iter()
            .find(|t| t.cluster == k && t.attribute == j && t.slot == i)
    }

    /// Sum of products recomputed from the term table.
    pub fn term_sum(&self) -> S {
        self.terms.iter().fold(S::zero(), |acc, t| acc + t.product)
    }

    /// Tab-separated table, one row per term, then a `total` row.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("k\tj\tv\tweight\tpredictability\tpredictiveness\tterm\n");
        for t in &self.terms {
            let _ = writeln!(
                out,
                "C{}\t{}\t{}\t{}\t{}\t{}\t{}",
                t.cluster + 1,
                self.attributes[t.attribute],
                self.slot_labels[t.attribute][t.slot],
                t.weight,
                t.predictability,
                t.predictiveness,
                t.product
            );
        }
        let _ = writeln!(out, "total\t\t\t\t\t\t{}", self.total);
        out
    }
}

impl<S: Scalar> fmt::Display for UtilityReport<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_tsv())
    }
}

/// The three factors and their product for one slot.
#[inline]
pub(crate) fn term<S: Scalar>(
    universe_mass: S,
    universe_count: usize,
    cluster_mass: S,
    cluster_count: usize,
) -> [S; 4] {
    let weight = universe_mass / S::from_count(universe_count);
    let predictiveness = if universe_mass.is_zero() {
        S::zero()
    } else {
        let p = cluster_mass / universe_mass;
        if p > S::one() {
            S::one()
        } else {
            p
        }
    };
    let predictability = cluster_mass / S::from_count(cluster_count);
    [
        weight,
        predictiveness,
        predictability,
        weight * predictiveness * predictability,
    ]
}

/// Contribution of one cluster, summed over `attrs` and all their slots.
pub(crate) fn cluster_contribution<S: Scalar>(
    universe: &ClusterStats<S>,
    cluster: &ClusterStats<S>,
    attrs: &[usize],
) -> S {
    let mut sum = S::zero();
    for &j in attrs {
        for (&u, &c) in universe.attribute(j).iter().zip(cluster.attribute(j)) {
            sum = sum + term(u, universe.count(), c, cluster.count())[3];
        }
    }
    sum
}

/// Builds a report from cluster statistics.
pub fn report_from_stats<S: Scalar>(
    universe: &ClusterStats<S>,
    clusters: &[ClusterStats<S>],
    attrs: &[usize],
    attribute_names: Vec<String>,
    slot_labels: Vec<Vec<String>>,
) -> UtilityReport<S> {
    let mut terms = Vec::new();
    let mut total = S::zero();
    for (k, cluster) in clusters.iter().enumerate() {
        for &j in attrs {
            for (i, (&u, &c)) in universe
                .attribute(j)
                .iter()
                .zip(cluster.attribute(j))
                .enumerate()
            {
                let [weight, predictiveness, predictability, product] =
                    term(u, universe.count(), c, cluster.count());
                total = total + product;
                terms.push(UtilityTerm {
                    cluster: k,
                    attribute: j,
                    slot: i,
                    weight,
                    predictiveness,
                    predictability,
                    product,
                });
            }
        }
    }
    UtilityReport {
        attributes: attribute_names,
        slot_labels,
        terms,
        total,
    }
}

fn evaluate<S: Scalar>(
    partition: &Partition,
    profiles: &[Profile<S>],
    widths: &[usize],
    attrs: &[usize],
    names: Vec<String>,
    labels: Vec<Vec<String>>,
) -> UtilityReport<S> {
    let universe =
        ClusterStats::from_profiles(widths, partition.universe().iter().map(|&m| &profiles[m]));
    let clusters: Vec<_> = partition
        .clusters()
        .iter()
        .map(|c| ClusterStats::from_profiles(widths, c.iter().map(|&m| &profiles[m])))
        .collect();
    report_from_stats(&universe, &clusters, attrs, names, labels)
}

fn attribute_names(schema: &Schema) -> Vec<String> {
    schema.attributes().iter().map(|a| a.name.clone()).collect()
}

fn slot_labels<R: Real>(schema: &Schema, grids: &[Option<Grid<R>>]) -> Vec<Vec<String>> {
    schema
        .attributes()
        .iter()
        .enumerate()
        .map(|(j, attr)| match &attr.kind {
            AttributeKind::Nominal { values } => values.clone(),
            AttributeKind::Numeric => grids
                .get(j)
                .and_then(Option::as_ref)
                .map(|g| g.centers().iter().map(|c| c.to_string()).collect())
                .unwrap_or_default(),
        })
        .collect()
}

/// Category utility over an all-nominal schema, by exact counting.
///
/// The output scalar is independent of the dataset's numeric type, so the
/// score can be computed in rational arithmetic.
pub fn nominal_cu<S: Scalar, T: Scalar>(
    partition: &Partition,
    dataset: &Dataset<T>,
) -> Result<UtilityReport<S>> {
    let schema = dataset.schema();
    if let Some(attr) = schema.attributes().iter().find(|a| a.is_numeric()) {
        return Err(Error::NonNominalAttribute {
            attribute: attr.name.clone(),
        });
    }
    partition.check_bounds(dataset.len())?;
    let profiles = dataset
        .instances()
        .iter()
        .map(|inst| nominal_profile(schema, inst))
        .collect::<Result<Vec<Profile<S>>>>()?;
    let widths: Vec<usize> = schema
        .attributes()
        .iter()
        .map(|a| a.values().len())
        .collect();
    let attrs: Vec<usize> = (0..schema.len()).collect();
    let labels = schema
        .attributes()
        .iter()
        .map(|a| a.values().to_vec())
        .collect();
    Ok(evaluate(
        partition,
        &profiles,
        &widths,
        &attrs,
        attribute_names(schema),
        labels,
    ))
}

fn profiles_for<R: Real>(
    dataset: &Dataset<R>,
    grids: &[Option<Grid<R>>],
    kind: MembershipKind,
) -> Result<(Vec<Profile<R>>, Vec<usize>)> {
    let schema = dataset.schema();
    let widths = slot_widths(schema, grids)?;
    let profiles = dataset
        .instances()
        .iter()
        .map(|inst| profile(schema, grids, kind, inst))
        .collect::<Result<Vec<_>>>()?;
    Ok((profiles, widths))
}

/// Fuzzy category utility over the numeric attributes of `dataset`.
///
/// Nominal attributes are ignored; see [`mixed_cu`] to include them.
pub fn fuzzy_cu<R: Real>(
    partition: &Partition,
    dataset: &Dataset<R>,
    grids: &[Option<Grid<R>>],
    kind: MembershipKind,
) -> Result<UtilityReport<R>> {
    partition.check_bounds(dataset.len())?;
    let schema = dataset.schema();
    let (profiles, widths) = profiles_for(dataset, grids, kind)?;
    let attrs: Vec<usize> = (0..schema.len())
        .filter(|&j| schema.attribute(j).is_numeric())
        .collect();
    Ok(evaluate(
        partition,
        &profiles,
        &widths,
        &attrs,
        attribute_names(schema),
        slot_labels(schema, grids),
    ))
}

/// Nominal utility over nominal attributes plus fuzzy utility over numeric
/// ones, in a single report.
pub fn mixed_cu<R: Real>(
    partition: &Partition,
    dataset: &Dataset<R>,
    grids: &[Option<Grid<R>>],
    kind: MembershipKind,
) -> Result<UtilityReport<R>> {
    partition.check_bounds(dataset.len())?;
    let schema = dataset.schema();
    let (profiles, widths) = profiles_for(dataset, grids, kind)?;
    let attrs: Vec<usize> = (0..schema.len()).collect();
    Ok(evaluate(
        partition,
        &profiles,
        &widths,
        &attrs,
        attribute_names(schema),
        slot_labels(schema, grids),
    ))
}

fn node_masses<R: Real>(values: &[R], grid: &Grid<R>, kind: MembershipKind) -> Result<Vec<R>> {
    let mut sums = vec![R::zero(); grid.d()];
    for &a in values {
        for (s, f) in sums.iter_mut().zip(membership_vector(a, grid, kind)?) {
            *s = *s + f;
        }
    }
    Ok(sums)
}

/// Mean membership of the cluster's values at grid node `node`.
///
/// Panics if `node >= grid.d()`.
pub fn fuzzy_predictability<R: Real>(
    cluster: &[R],
    node: usize,
    grid: &Grid<R>,
    kind: MembershipKind,
) -> Result<R> {
    if cluster.is_empty() {
        return Err(Error::EmptyCluster);
    }
    Ok(node_masses(cluster, grid, kind)?[node] / R::from_count(cluster.len()))
}

/// Share of the universe's membership mass at `node` carried by the cluster;
/// 0 when the universe has no mass there.
pub fn fuzzy_predictiveness<R: Real>(
    cluster: &[R],
    universe: &[R],
    node: usize,
    grid: &Grid<R>,
    kind: MembershipKind,
) -> Result<R> {
    if universe.is_empty() {
        return Err(Error::EmptyUniverse);
    }
    let total = node_masses(universe, grid, kind)?[node];
    if total.is_zero() {
        return Ok(R::zero());
    }
    let part = node_masses(cluster, grid, kind)?[node];
    Ok((part / total).min(R::one()))
}

/// Mean membership of all universe values at `node`.
pub fn fuzzy_weight<R: Real>(
    universe: &[R],
    node: usize,
    grid: &Grid<R>,
    kind: MembershipKind,
) -> Result<R> {
    if universe.is_empty() {
        return Err(Error::EmptyUniverse);
    }
    Ok(node_masses(universe, grid, kind)?[node] / R::from_count(universe.len()))
}
