//! Test-only oracles and fixtures shared by the integration suites.
//!
//! Everything here recomputes utilities straight from instance values with
//! nested loops. Nothing goes through the crate's statistics or caches.
#![allow(dead_code)]

use cobweb_core::{
    AttributeDecl, Dataset, Grid, GridLayout, Instance, Partition, Schema, SigmaPolicy,
};
use rand::prelude::*;
use rand_distr::Normal;

/// Values of the nominal fixture, one row per instance:
/// s1 = (2, 1), s2 = (2, 2), s3 = (-2, -2), s4 = (-1, -2).
pub const FIXTURE: [[i32; 2]; 4] = [[2, 1], [2, 2], [-2, -2], [-1, -2]];
pub const FIXTURE_VALUES: [&str; 4] = ["-2", "-1", "1", "2"];

/// s1, s2 together; s3, s4 together.
pub fn fixture_separated() -> Partition {
    Partition::new(vec![vec![0, 1], vec![2, 3]]).unwrap()
}

/// {s3, s2} and {s4, s1}.
pub fn fixture_crossed() -> Partition {
    Partition::new(vec![vec![2, 1], vec![3, 0]]).unwrap()
}

pub fn fixture_nominal() -> Dataset<f64> {
    let schema = Schema::new(vec![
        AttributeDecl::nominal("A1", FIXTURE_VALUES),
        AttributeDecl::nominal("A2", FIXTURE_VALUES),
    ])
    .unwrap();
    let rows = FIXTURE
        .iter()
        .map(|r| Instance::nominal(r.iter().map(|v| v.to_string())))
        .collect();
    Dataset::new(schema, rows).unwrap()
}

pub fn fixture_numeric() -> Dataset<f64> {
    numeric_dataset(
        &FIXTURE
            .iter()
            .map(|r| r.iter().map(|&v| v as f64).collect())
            .collect::<Vec<_>>(),
    )
}

pub fn numeric_dataset(rows: &[Vec<f64>]) -> Dataset<f64> {
    let q = rows[0].len();
    let schema = Schema::new(
        (0..q)
            .map(|j| AttributeDecl::numeric(format!("A{}", j + 1)))
            .collect(),
    )
    .unwrap();
    Dataset::new(
        schema,
        rows.iter()
            .map(|r| Instance::numeric(r.iter().copied()))
            .collect(),
    )
    .unwrap()
}

/// Grid per column spanning the column's range.
pub fn grids_for(rows: &[Vec<f64>], d: usize, sigma: SigmaPolicy<f64>) -> Vec<Option<Grid<f64>>> {
    let q = rows[0].len();
    (0..q)
        .map(|j| {
            let lo = rows.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min);
            let hi = rows.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max);
            Some(Grid::from_bounds(lo, hi, d, sigma, GridLayout::Offset).unwrap())
        })
        .collect()
}

/// Gaussian utility evaluated term by term from raw values.
pub fn brute_gaussian_cu(
    rows: &[Vec<f64>],
    clusters: &[Vec<usize>],
    centers: &[Vec<f64>],
    sigmas: &[f64],
) -> f64 {
    let f = |a: f64, v: f64, s: f64| (-(a - v) * (a - v) / (2.0 * s * s)).exp();
    let universe: Vec<usize> = clusters.iter().flatten().copied().collect();
    let l = universe.len() as f64;
    let mut total = 0.0;
    for cluster in clusters {
        let lk = cluster.len() as f64;
        for j in 0..centers.len() {
            for &v in &centers[j] {
                let all: f64 = universe.iter().map(|&m| f(rows[m][j], v, sigmas[j])).sum();
                let part: f64 = cluster.iter().map(|&m| f(rows[m][j], v, sigmas[j])).sum();
                let weight = all / l;
                let predictiveness = if all == 0.0 { 0.0 } else { part / all };
                let predictability = part / lk;
                total += weight * predictiveness * predictability;
            }
        }
    }
    total
}

/// Predictiveness at every (attribute, node) for every cluster.
pub fn brute_predictiveness(
    rows: &[Vec<f64>],
    clusters: &[Vec<usize>],
    centers: &[Vec<f64>],
    sigmas: &[f64],
) -> Vec<Vec<Vec<f64>>> {
    let f = |a: f64, v: f64, s: f64| (-(a - v) * (a - v) / (2.0 * s * s)).exp();
    let universe: Vec<usize> = clusters.iter().flatten().copied().collect();
    clusters
        .iter()
        .map(|cluster| {
            (0..centers.len())
                .map(|j| {
                    centers[j]
                        .iter()
                        .map(|&v| {
                            let all: f64 =
                                universe.iter().map(|&m| f(rows[m][j], v, sigmas[j])).sum();
                            let part: f64 =
                                cluster.iter().map(|&m| f(rows[m][j], v, sigmas[j])).sum();
                            part / all
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Cell index by direct arithmetic: `floor((a - lo) / width)`, clamped.
pub fn brute_bin(a: f64, lo: f64, hi: f64, d: usize) -> usize {
    if hi == lo {
        return 0;
    }
    let k = ((a - lo) * d as f64 / (hi - lo)).floor();
    if k < 0.0 {
        0
    } else {
        (k as usize).min(d - 1)
    }
}

/// A small random numeric dataset with a random partition.
#[derive(Debug, Clone)]
pub struct RandomCase {
    pub rows: Vec<Vec<f64>>,
    pub clusters: Vec<Vec<usize>>,
    pub d: usize,
}

pub fn random_case(rng: &mut impl Rng) -> RandomCase {
    let l = rng.random_range(1..=8usize);
    let q = rng.random_range(1..=3usize);
    let d = rng.random_range(1..=5usize);
    let rows: Vec<Vec<f64>> = (0..l)
        .map(|_| {
            (0..q)
                .map(|_| {
                    // Mix of continuous and repeated integer values.
                    if rng.random_bool(0.3) {
                        rng.random_range(-3..=3) as f64
                    } else {
                        rng.random_range(-5.0..5.0)
                    }
                })
                .collect()
        })
        .collect();
    let n = rng.random_range(1..=l);
    let mut labels: Vec<usize> = (0..l)
        .map(|m| if m < n { m } else { rng.random_range(0..n) })
        .collect();
    labels.shuffle(rng);
    let mut clusters = vec![Vec::new(); n];
    for (m, &k) in labels.iter().enumerate() {
        clusters[k].push(m);
    }
    RandomCase { rows, clusters, d }
}

/// Points from two isotropic blobs at `-mean` and `+mean` in every
/// coordinate, shuffled. Returns rows and the blob of each row.
pub fn two_blobs(
    rng: &mut impl Rng,
    per_blob: usize,
    mean: f64,
    spread: f64,
    dims: usize,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let noise = Normal::new(0.0, spread).unwrap();
    let mut points: Vec<(Vec<f64>, usize)> = (0..2 * per_blob)
        .map(|i| {
            let blob = i / per_blob;
            let center = if blob == 0 { -mean } else { mean };
            (
                (0..dims).map(|_| center + noise.sample(rng)).collect(),
                blob,
            )
        })
        .collect();
    points.shuffle(rng);
    points.into_iter().unzip()
}

/// Each value replaced by the label of its rectangular cell.
pub fn discretized(rows: &[Vec<f64>], d: usize) -> Dataset<f64> {
    let q = rows[0].len();
    let bounds: Vec<(f64, f64)> = (0..q)
        .map(|j| {
            let lo = rows.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min);
            let hi = rows.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        })
        .collect();
    let labels: Vec<String> = (0..d).map(|i| format!("bin{i}")).collect();
    let schema = Schema::new(
        (0..q)
            .map(|j| AttributeDecl::nominal(format!("A{}", j + 1), labels.clone()))
            .collect(),
    )
    .unwrap();
    let instances = rows
        .iter()
        .map(|r| {
            Instance::nominal(
                r.iter()
                    .enumerate()
                    .map(|(j, &a)| labels[brute_bin(a, bounds[j].0, bounds[j].1, d)].clone()),
            )
        })
        .collect();
    Dataset::new(schema, instances).unwrap()
}
