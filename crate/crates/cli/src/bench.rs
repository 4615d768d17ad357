//! Synthetic blob benchmark: recovery, ranking and boundary jitter.

use std::fmt::Write as _;

use cobweb_core::{
    adjusted_rand_index, build_grid_with_layout, fuzzy_cu, membership_vector, rectangular_cell,
    AttributeDecl, Dataset, Grid, GridBounds, Hierarchy, HierarchyConfig, Instance, MembershipKind,
    Partition, Schema,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SigmaArg;

const KINDS: [MembershipKind; 2] = [MembershipKind::Rectangular, MembershipKind::Gaussian];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub blobs: usize,
    pub per_blob: usize,
    pub dims: usize,
    /// Blob means are spread evenly over `[-separation, separation]` on every axis.
    pub separation: f64,
    /// Per-coordinate standard deviation within a blob.
    pub spread: f64,
    pub trials: usize,
    pub seed: u64,
    pub grid_size: usize,
    pub sigma: SigmaArg,
    pub random_partitions: usize,
    pub jitter: f64,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        BenchmarkSpec {
            blobs: 2,
            per_blob: 20,
            dims: 2,
            separation: 10.0,
            spread: 1.0,
            trials: 20,
            seed: 0,
            grid_size: 8,
            sigma: SigmaArg::Cell,
            random_partitions: 100,
            jitter: 1e-6,
        }
    }
}

impl BenchmarkSpec {
    pub fn validate(&self) -> anyhow::Result<()> {
        anyhow::ensure!(self.blobs >= 2, "need at least two blobs");
        anyhow::ensure!(
            self.per_blob >= 1 && self.dims >= 1,
            "blobs must be non-empty"
        );
        anyhow::ensure!(self.trials >= 1, "need at least one trial");
        anyhow::ensure!(self.grid_size >= 1, "grid size must be positive");
        anyhow::ensure!(
            self.spread > 0.0 && self.spread.is_finite(),
            "spread must be positive"
        );
        anyhow::ensure!(self.separation.is_finite(), "separation must be finite");
        anyhow::ensure!(
            self.jitter > 0.0 && self.jitter.is_finite(),
            "jitter must be positive"
        );
        Ok(())
    }

    pub fn blob_mean(&self, b: usize) -> f64 {
        -self.separation + 2.0 * self.separation * b as f64 / (self.blobs - 1) as f64
    }

    fn config(&self, kind: MembershipKind) -> HierarchyConfig<f64> {
        HierarchyConfig::default()
            .with_membership(kind)
            .with_grid_size(self.grid_size)
            .with_sigma(self.sigma.policy())
    }
}

pub fn blob_schema(dims: usize) -> Schema {
    Schema::new(
        (0..dims)
            .map(|j| AttributeDecl::numeric(format!("x{j}")))
            .collect(),
    )
    .expect("distinct names")
}

/// Shuffled blob sample and its true labels.
pub fn generate_blobs(spec: &BenchmarkSpec, rng: &mut ChaCha8Rng) -> (Dataset<f64>, Vec<usize>) {
    let noise = Normal::new(0.0, spec.spread).expect("positive spread");
    let mut points: Vec<(Vec<f64>, usize)> = (0..spec.blobs * spec.per_blob)
        .map(|i| {
            let b = i / spec.per_blob;
            let mean = spec.blob_mean(b);
            (
                (0..spec.dims).map(|_| mean + noise.sample(rng)).collect(),
                b,
            )
        })
        .collect();
    points.shuffle(rng);
    let (rows, truth): (Vec<_>, Vec<_>) = points.into_iter().unzip();
    let dataset = Dataset::new(
        blob_schema(spec.dims),
        rows.into_iter().map(Instance::numeric).collect(),
    )
    .expect("numeric rows match schema");
    (dataset, truth)
}

fn grids(dataset: &Dataset<f64>, spec: &BenchmarkSpec) -> anyhow::Result<Vec<Option<Grid<f64>>>> {
    (0..dataset.schema().len())
        .map(|j| {
            Ok(Some(build_grid_with_layout(
                &dataset.column(j),
                spec.grid_size,
                spec.sigma.policy(),
                Default::default(),
            )?))
        })
        .collect()
}

fn root_labels(h: &Hierarchy<f64>) -> Vec<usize> {
    h.root_partition()
        .map(|p| {
            p.labels()
                .into_iter()
                .map(|l| l.unwrap_or(usize::MAX))
                .collect()
        })
        .unwrap_or_default()
}

/// Original and jittered copies of a dataset.
#[derive(Debug, Clone)]
pub struct JitterPair {
    pub original: Dataset<f64>,
    pub jittered: Dataset<f64>,
    /// `(instance, attribute)` cells that straddle a boundary.
    pub snapped: Vec<(usize, usize)>,
}

/// Places values within a quarter cell of an interior boundary `b` at
/// `b - eps/2` in the original and `b + eps/2` in the jittered copy.
/// Values at a column's min or max are left alone so both copies share a grid.
pub fn jitter_pair(dataset: &Dataset<f64>, grids: &[Option<Grid<f64>>], eps: f64) -> JitterPair {
    let mut original: Vec<Vec<f64>> = dataset
        .instances()
        .iter()
        .map(|i| {
            (0..i.len())
                .map(|j| i.number(j).expect("numeric"))
                .collect()
        })
        .collect();
    let mut jittered = original.clone();
    let mut snapped = Vec::new();
    for (j, grid) in grids.iter().enumerate() {
        let Some(grid) = grid else { continue };
        let reach = grid.cell_width() / 4.0;
        let boundaries = grid.boundaries();
        for m in 0..original.len() {
            let a = original[m][j];
            if a == grid.lo() || a == grid.hi() {
                continue;
            }
            let nearest = boundaries
                .iter()
                .copied()
                .min_by(|x, y| (x - a).abs().total_cmp(&(y - a).abs()));
            if let Some(b) = nearest.filter(|b| (b - a).abs() < reach && eps / 2.0 < reach) {
                original[m][j] = b - eps / 2.0;
                jittered[m][j] = b + eps / 2.0;
                snapped.push((m, j));
            }
        }
    }
    let build = |rows: Vec<Vec<f64>>| {
        Dataset::new(
            dataset.schema().clone(),
            rows.into_iter().map(Instance::numeric).collect(),
        )
        .expect("same schema")
    };
    JitterPair {
        original: build(original),
        jittered: build(jittered),
        snapped,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindResult {
    pub ari: f64,
    /// Fraction of random equal-size partitions the true labels beat.
    pub rank_rate: f64,
    /// ARI between root partitions fitted on the original and jittered data.
    pub jitter_agreement: f64,
    pub jitter_same_tree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub rect: KindResult,
    pub gauss: KindResult,
    pub snapped: usize,
    pub rect_flips: usize,
    pub gauss_max_delta: f64,
    /// Largest `delta / (eps / sigma * e^-1/2)` over snapped cells.
    pub gauss_bound_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub mean_ari_rect: f64,
    pub mean_ari_gauss: f64,
    pub mean_rank_rect: f64,
    pub mean_rank_gauss: f64,
    pub mean_agreement_rect: f64,
    pub mean_agreement_gauss: f64,
    pub same_tree_rect: f64,
    pub same_tree_gauss: f64,
    pub total_snapped: usize,
    pub total_rect_flips: usize,
    pub max_gauss_bound_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub spec: BenchmarkSpec,
    pub trials: Vec<TrialResult>,
    pub summary: BenchSummary,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

fn run_trial(spec: &BenchmarkSpec, trial: usize) -> anyhow::Result<TrialResult> {
    let seed = spec.seed.wrapping_add(trial as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (dataset, truth) = generate_blobs(spec, &mut rng);
    let base_grids = grids(&dataset, spec)?;
    let truth_partition = Partition::from_labels(&truth)?;

    let shuffles: Vec<Partition> = (0..spec.random_partitions)
        .map(|_| {
            let mut labels = truth.clone();
            labels.shuffle(&mut rng);
            Partition::from_labels(&labels)
        })
        .collect::<Result<_, _>>()?;

    let pair = jitter_pair(&dataset, &base_grids, spec.jitter);
    let jitter_grids = grids(&pair.original, spec)?;
    let bounds = GridBounds::Fixed(
        jitter_grids
            .iter()
            .map(|g| g.as_ref().map(|g| (g.lo(), g.hi())))
            .collect(),
    );

    let mut results = Vec::with_capacity(2);
    for kind in KINDS {
        let h = Hierarchy::fit(&dataset, spec.config(kind))?;
        let ari = adjusted_rand_index(&truth, &root_labels(&h));

        let truth_cu = fuzzy_cu(&truth_partition, &dataset, &base_grids, kind)?.total;
        let mut wins = 0usize;
        for p in &shuffles {
            if truth_cu > fuzzy_cu(p, &dataset, &base_grids, kind)?.total {
                wins += 1;
            }
        }
        let rank_rate = if shuffles.is_empty() {
            1.0
        } else {
            wins as f64 / shuffles.len() as f64
        };

        let cfg = spec.config(kind).with_bounds(bounds.clone());
        let a = Hierarchy::fit(&pair.original, cfg.clone())?;
        let b = Hierarchy::fit(&pair.jittered, cfg)?;
        results.push(KindResult {
            ari,
            rank_rate,
            jitter_agreement: adjusted_rand_index(&root_labels(&a), &root_labels(&b)),
            jitter_same_tree: a.fingerprint() == b.fingerprint(),
        });
    }

    let mut rect_flips = 0;
    let mut gauss_max_delta: f64 = 0.0;
    let mut gauss_bound_ratio: f64 = 0.0;
    for &(m, j) in &pair.snapped {
        let grid = jitter_grids[j].as_ref().expect("numeric attribute");
        let x = pair.original.instances()[m].number(j).expect("numeric");
        let y = pair.jittered.instances()[m].number(j).expect("numeric");
        if rectangular_cell(x, grid)? != rectangular_cell(y, grid)? {
            rect_flips += 1;
        }
        let fx = membership_vector(x, grid, MembershipKind::Gaussian)?;
        let fy = membership_vector(y, grid, MembershipKind::Gaussian)?;
        let delta = fx
            .iter()
            .zip(&fy)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max);
        let bound = (y - x).abs() / grid.sigma() * (-0.5f64).exp();
        gauss_max_delta = gauss_max_delta.max(delta);
        gauss_bound_ratio = gauss_bound_ratio.max(delta / bound);
    }

    let gauss = results.pop().expect("two kinds");
    let rect = results.pop().expect("two kinds");
    Ok(TrialResult {
        trial,
        seed,
        rect,
        gauss,
        snapped: pair.snapped.len(),
        rect_flips,
        gauss_max_delta,
        gauss_bound_ratio,
    })
}

/// Runs every trial in parallel; trial `t` is seeded with `seed + t`.
pub fn run(spec: &BenchmarkSpec) -> anyhow::Result<BenchReport> {
    spec.validate()?;
    let trials = (0..spec.trials)
        .into_par_iter()
        .map(|t| run_trial(spec, t))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let n = trials.len() as f64;
    let summary = BenchSummary {
        mean_ari_rect: mean(trials.iter().map(|t| t.rect.ari)),
        mean_ari_gauss: mean(trials.iter().map(|t| t.gauss.ari)),
        mean_rank_rect: mean(trials.iter().map(|t| t.rect.rank_rate)),
        mean_rank_gauss: mean(trials.iter().map(|t| t.gauss.rank_rate)),
        mean_agreement_rect: mean(trials.iter().map(|t| t.rect.jitter_agreement)),
        mean_agreement_gauss: mean(trials.iter().map(|t| t.gauss.jitter_agreement)),
        same_tree_rect: trials.iter().filter(|t| t.rect.jitter_same_tree).count() as f64 / n,
        same_tree_gauss: trials.iter().filter(|t| t.gauss.jitter_same_tree).count() as f64 / n,
        total_snapped: trials.iter().map(|t| t.snapped).sum(),
        total_rect_flips: trials.iter().map(|t| t.rect_flips).sum(),
        max_gauss_bound_ratio: trials
            .iter()
            .map(|t| t.gauss_bound_ratio)
            .fold(0.0, f64::max),
    };
    Ok(BenchReport {
        spec: spec.clone(),
        trials,
        summary,
    })
}

impl BenchReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(
            "trial\tseed\tari_rect\tari_gauss\trank_rect\trank_gauss\tagree_rect\tagree_gauss\t\
             same_tree_rect\tsame_tree_gauss\tsnapped\trect_flips\tgauss_max_delta\tgauss_bound_ratio\n",
        );
        for t in &self.trials {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                t.trial,
                t.seed,
                t.rect.ari,
                t.gauss.ari,
                t.rect.rank_rate,
                t.gauss.rank_rate,
                t.rect.jitter_agreement,
                t.gauss.jitter_agreement,
                t.rect.jitter_same_tree,
                t.gauss.jitter_same_tree,
                t.snapped,
                t.rect_flips,
                t.gauss_max_delta,
                t.gauss_bound_ratio
            );
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "mean\t\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t\t{}",
            s.mean_ari_rect,
            s.mean_ari_gauss,
            s.mean_rank_rect,
            s.mean_rank_gauss,
            s.mean_agreement_rect,
            s.mean_agreement_gauss,
            s.same_tree_rect,
            s.same_tree_gauss,
            s.total_snapped,
            s.total_rect_flips,
            s.max_gauss_bound_ratio
        );
        out
    }
}
