//! `fit`, `score` and `bench`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use cobweb_core::{
    build_grid_with_layout, mixed_cu, Dataset, Grid, Hierarchy, Partition, UtilityReport,
};
use serde::Serialize;
use serde_json::json;

use crate::bench::{self, BenchReport, BenchmarkSpec};
use crate::config::{provenance_line, Manifest, MembershipMode, RunConfig};
use crate::io;

/// Reads the input named by `cfg`, coercing to nominal in nominal mode.
pub fn load_dataset(cfg: &RunConfig) -> anyhow::Result<Dataset<f64>> {
    let delimiter =
        u8::try_from(cfg.delimiter).context("delimiter must be a single ASCII character")?;
    let dataset = io::load_csv(&cfg.input, delimiter, cfg.schema.as_deref())?;
    Ok(match cfg.membership {
        MembershipMode::Nominal => io::to_nominal(&dataset)?,
        _ => dataset,
    })
}

/// Grids spanning each numeric column, as the engine builds them.
pub fn grids_for(
    dataset: &Dataset<f64>,
    cfg: &RunConfig,
) -> anyhow::Result<Vec<Option<Grid<f64>>>> {
    (0..dataset.schema().len())
        .map(|j| {
            if !dataset.schema().attribute(j).is_numeric() {
                return Ok(None);
            }
            Ok(Some(build_grid_with_layout(
                &dataset.column(j),
                cfg.grid_size,
                cfg.sigma.policy(),
                cfg.layout(),
            )?))
        })
        .collect()
}

fn write(dir: &Path, name: &str, contents: &str, outputs: &mut Vec<String>) -> anyhow::Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("cannot write `{}`", path.display()))?;
    outputs.push(name.to_string());
    Ok(())
}

fn write_manifest(dir: &Path, mut manifest: Manifest, outputs: Vec<String>) -> anyhow::Result<()> {
    manifest.outputs = outputs;
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
        .with_context(|| format!("cannot write `{}`", path.display()))
}

fn create_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create `{}`", dir.display()))
}

/// Tree JSON with a `provenance` object next to the snapshot fields.
fn tree_json(h: &Hierarchy<f64>, hash: &str, seed: u64) -> anyhow::Result<String> {
    let mut value = serde_json::to_value(h.snapshot())?;
    value["provenance"] = json!({ "config_hash": hash, "seed": seed });
    Ok(serde_json::to_string_pretty(&value)? + "\n")
}

#[derive(Debug, Clone, Serialize)]
pub struct FitSummary {
    pub instances: usize,
    pub nodes: usize,
    pub leaves: usize,
    pub root_clusters: usize,
    pub utility: f64,
    pub fingerprint: String,
}

pub struct FitOutcome {
    pub hierarchy: Hierarchy<f64>,
    pub report: UtilityReport<f64>,
    pub summary: FitSummary,
}

/// Grows a hierarchy over the input in file order and writes `tree.json`,
/// `tree.dot`, `partition.tsv`, `utility.tsv` and `manifest.json`.
pub fn fit(cfg: &RunConfig, out_dir: Option<&Path>) -> anyhow::Result<FitOutcome> {
    let dataset = load_dataset(cfg)?;
    let hierarchy = Hierarchy::fit(&dataset, cfg.hierarchy())?;
    let report = hierarchy.root_report_from_scratch()?;
    let root = hierarchy.root().context("empty input")?;
    let summary = FitSummary {
        instances: hierarchy.len(),
        nodes: hierarchy.node_count(),
        leaves: hierarchy.leaf_count(),
        root_clusters: root.children().len().max(1),
        utility: report.total,
        fingerprint: hierarchy.fingerprint(),
    };

    if let Some(dir) = out_dir {
        create_dir(dir)?;
        let hash = cfg.hash();
        let mut outputs = Vec::new();
        write(
            dir,
            "tree.json",
            &tree_json(&hierarchy, &hash, cfg.seed)?,
            &mut outputs,
        )?;
        let dot = provenance_line("//", &hash, cfg.seed) + &hierarchy.to_dot();
        write(dir, "tree.dot", &dot, &mut outputs)?;
        let partition = hierarchy.root_partition().context("empty input")?;
        let part = provenance_line("#", &hash, cfg.seed) + &io::format_partition(&partition);
        write(dir, "partition.tsv", &part, &mut outputs)?;
        let table = provenance_line("#", &hash, cfg.seed) + &report.to_tsv();
        write(dir, "utility.tsv", &table, &mut outputs)?;
        let mut manifest = Manifest::new("fit", cfg, cfg.seed);
        manifest.summary = serde_json::to_value(&summary)?;
        write_manifest(dir, manifest, outputs)?;
    }
    Ok(FitOutcome {
        hierarchy,
        report,
        summary,
    })
}

/// Reruns `fit` with the configuration recorded in a manifest.
pub fn replay(manifest: &Path, out_dir: Option<&Path>) -> anyhow::Result<FitOutcome> {
    let text = fs::read_to_string(manifest)
        .with_context(|| format!("cannot read `{}`", manifest.display()))?;
    let manifest: Manifest = serde_json::from_str(&text).context("malformed manifest")?;
    anyhow::ensure!(
        manifest.command == "fit",
        "manifest records `{}`, not `fit`",
        manifest.command
    );
    let cfg: RunConfig =
        serde_json::from_value(manifest.config).context("malformed manifest config")?;
    fit(&cfg, out_dir)
}

/// Where the partition to score comes from.
#[derive(Debug, Clone)]
pub enum PartitionSource {
    /// Partition file over the rows of the configured input.
    File(PathBuf),
    /// Root partition of a saved tree, scored with the tree's own data and grids.
    Tree(PathBuf),
}

#[derive(Debug, Clone, Serialize)]
struct ScoreConfig<'a> {
    run: &'a RunConfig,
    partition: Option<&'a Path>,
    tree: Option<&'a Path>,
}

pub fn score(
    cfg: &RunConfig,
    source: &PartitionSource,
    out_dir: Option<&Path>,
) -> anyhow::Result<UtilityReport<f64>> {
    let report = match source {
        PartitionSource::File(path) => {
            let dataset = load_dataset(cfg)?;
            let partition = io::load_partition(path, dataset.len())?;
            let grids = grids_for(&dataset, cfg)?;
            mixed_cu(&partition, &dataset, &grids, cfg.membership.kind())?
        }
        PartitionSource::Tree(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read `{}`", path.display()))?;
            let h = Hierarchy::<f64>::from_json(&text)?;
            h.root_report_from_scratch()?
        }
    };
    if let Some(dir) = out_dir {
        create_dir(dir)?;
        let (partition, tree) = match source {
            PartitionSource::File(p) => (Some(p.as_path()), None),
            PartitionSource::Tree(p) => (None, Some(p.as_path())),
        };
        let sc = ScoreConfig {
            run: cfg,
            partition,
            tree,
        };
        let manifest = Manifest::new("score", &sc, cfg.seed);
        let table = provenance_line("#", &manifest.config_hash, cfg.seed) + &report.to_tsv();
        let mut outputs = Vec::new();
        write(dir, "utility.tsv", &table, &mut outputs)?;
        let mut manifest = manifest;
        manifest.summary = json!({ "utility": report.total });
        write_manifest(dir, manifest, outputs)?;
    }
    Ok(report)
}

/// Partition of a saved tree's root, for feeding back into `score`.
pub fn tree_partition(path: &Path) -> anyhow::Result<Partition> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read `{}`", path.display()))?;
    Hierarchy::<f64>::from_json(&text)?
        .root_partition()
        .context("tree is empty")
}

pub fn bench(spec: &BenchmarkSpec, out_dir: Option<&Path>) -> anyhow::Result<BenchReport> {
    let report = bench::run(spec)?;
    if let Some(dir) = out_dir {
        create_dir(dir)?;
        let mut manifest = Manifest::new("bench", spec, spec.seed);
        let mut outputs = Vec::new();
        let table = provenance_line("#", &manifest.config_hash, spec.seed) + &report.to_tsv();
        write(dir, "bench.tsv", &table, &mut outputs)?;
        manifest.summary = serde_json::to_value(&report.summary)?;
        write_manifest(dir, manifest, outputs)?;
    }
    Ok(report)
}
