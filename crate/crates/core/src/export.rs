//! Tree snapshots: a JSON document that reloads into an identical
//! hierarchy, and Graphviz DOT for the topology.
//!
//! JSON layout (`format` = `cobweb-tree/1`):
//!
//! ```text
//! {
//!   "format": "cobweb-tree/1",
//!   "schema": [{"name": .., "kind": "nominal", "values": [..]} | {"name": .., "kind": "numeric"}],
//!   "config": {..},
//!   "grids": [null | {"lo", "hi", "sigma", "centers", "degenerate", "layout"}],
//!   "instances": [[value, ..], ..],          // index = insertion order
//!   "next_id": n,
//!   "root": null | {"id", "count", "members", "stats", "children": [..]}
//! }
//! ```
//!
//! `stats[j]` holds the per-slot mass of attribute `j`: value counts for
//! nominal attributes, membership sums per grid node for numeric ones.

use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::scalar::{Real, Scalar};
use crate::schema::{Instance, Schema};
use crate::stats::ClusterStats;
use crate::tree::{ConceptNode, Hierarchy, HierarchyConfig, NodeId};

pub const SNAPSHOT_FORMAT: &str = "cobweb-tree/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "R: Serialize", deserialize = "R: DeserializeOwned"))]
pub struct NodeSnapshot<R> {
    pub id: NodeId,
    pub count: usize,
    pub members: Vec<usize>,
    pub stats: Vec<Vec<R>>,
    pub children: Vec<NodeSnapshot<R>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "R: Serialize", deserialize = "R: DeserializeOwned"))]
pub struct TreeSnapshot<R> {
    pub format: String,
    pub schema: Schema,
    pub config: HierarchyConfig<R>,
    pub grids: Vec<Option<Grid<R>>>,
    pub instances: Vec<Instance<R>>,
    pub next_id: u64,
    pub root: Option<NodeSnapshot<R>>,
}

fn node_snapshot<R: Real>(node: &ConceptNode<R>) -> NodeSnapshot<R> {
    NodeSnapshot {
        id: node.id(),
        count: node.count(),
        members: node.members().to_vec(),
        stats: node.stats().mass().to_vec(),
        children: node.children().iter().map(node_snapshot).collect(),
    }
}

fn node_from_snapshot<R: Real>(snap: &NodeSnapshot<R>, widths: &[usize]) -> Result<ConceptNode<R>> {
    if snap.count != snap.members.len() {
        return Err(Error::InvalidSnapshot(format!(
            "node {} count mismatch",
            snap.id
        )));
    }
    let children = snap
        .children
        .iter()
        .map(|c| node_from_snapshot(c, widths))
        .collect::<Result<Vec<_>>>()?;
    // Placeholder stats; the hierarchy recomputes them from its instances.
    Ok(ConceptNode::from_parts(
        snap.id,
        snap.members.clone(),
        ClusterStats::empty(widths),
        children,
    ))
}

fn compare_stats<R: Real>(node: &ConceptNode<R>, snap: &NodeSnapshot<R>) -> Result<()> {
    let mut worst = 0.0f64;
    let stored = node.stats().mass();
    if stored.len() != snap.stats.len()
        || stored
            .iter()
            .zip(&snap.stats)
            .any(|(a, b)| a.len() != b.len())
    {
        return Err(Error::InvalidSnapshot(format!(
            "node {} stats have the wrong shape",
            snap.id
        )));
    }
    for (a, b) in stored.iter().zip(&snap.stats) {
        for (&x, &y) in a.iter().zip(b) {
            worst = worst.max(Scalar::to_f64((x - y).abs()));
        }
    }
    if worst > 1e-9 {
        return Err(Error::InvalidSnapshot(format!(
            "stored stats of node {} differ from recomputation by {worst:e}",
            snap.id
        )));
    }
    node.children()
        .iter()
        .zip(&snap.children)
        .try_for_each(|(n, s)| compare_stats(n, s))
}

impl<R: Real> Hierarchy<R> {
    pub fn snapshot(&self) -> TreeSnapshot<R> {
        TreeSnapshot {
            format: SNAPSHOT_FORMAT.to_string(),
            schema: self.schema().clone(),
            config: self.config().clone(),
            grids: self.grids().to_vec(),
            instances: self.instances().to_vec(),
            next_id: self.issued_ids(),
            root: self.root().map(node_snapshot),
        }
    }

    /// Rebuilds a hierarchy, recomputing every statistic from the stored
    /// instances and checking it against the stored values.
    pub fn from_snapshot(snap: &TreeSnapshot<R>) -> Result<Self> {
        if snap.format != SNAPSHOT_FORMAT {
            return Err(Error::InvalidSnapshot(format!(
                "unknown format `{}`",
                snap.format
            )));
        }
        let widths: Vec<usize> = snap
            .schema
            .attributes()
            .iter()
            .map(|a| {
                if a.is_numeric() {
                    snap.config.grid_size
                } else {
                    a.values().len()
                }
            })
            .collect();
        let root = snap
            .root
            .as_ref()
            .map(|r| node_from_snapshot(r, &widths))
            .transpose()?;
        let h = Hierarchy::from_parts(
            snap.schema.clone(),
            snap.config.clone(),
            snap.grids.clone(),
            snap.instances.clone(),
            root,
            snap.next_id,
        )?;
        if let (Some(node), Some(s)) = (h.root(), &snap.root) {
            compare_stats(node, s)?;
        }
        Ok(h)
    }

    pub fn to_json(&self) -> Result<String>
    where
        R: Serialize,
    {
        serde_json::to_string_pretty(&self.snapshot())
            .map_err(|e| Error::InvalidSnapshot(e.to_string()))
    }

    pub fn from_json(json: &str) -> Result<Self>
    where
        R: DeserializeOwned,
    {
        let snap: TreeSnapshot<R> =
            serde_json::from_str(json).map_err(|e| Error::InvalidSnapshot(e.to_string()))?;
        Hierarchy::from_snapshot(&snap)
    }

    /// Graphviz rendering: one box per node labelled with id and `l_k`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph cobweb {\n  node [shape=box];\n");
        if let Some(root) = self.root() {
            for node in root.walk() {
                let _ = writeln!(
                    out,
                    "  n{} [label=\"#{}\\nl={}\"];",
                    node.id().0,
                    node.id().0,
                    node.count()
                );
                for child in node.children() {
                    let _ = writeln!(out, "  n{} -> n{};", node.id().0, child.id().0);
                }
            }
        }
        out.push_str("}\n");
        out
    }
}
