//! Incremental concept hierarchy.
//!
//! Each inserted instance descends from the root. At every internal node the
//! engine scores four restructurings of that node's children and applies the
//! best one:
//!
//! * insert into the best existing child,
//! * open a new singleton child,
//! * merge the two best hosts (with the instance) into one child,
//! * split the best host, promoting its children to this level.
//!
//! Scores only compare partitions of the same node. Ties resolve in the
//! order listed above, and among children the earliest created wins.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridLayout, SigmaPolicy};
use crate::membership::MembershipKind;
use crate::partition::Partition;
use crate::scalar::{Real, Scalar};
use crate::schema::{validate_instance, AttributeKind, Dataset, Instance, Schema};
use crate::stats::{profile, ClusterStats, Profile};
use crate::utility::{cluster_contribution, mixed_cu, report_from_stats, UtilityReport};

/// Creation-ordered node identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// How numeric grids follow the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "bounds", rename_all = "snake_case")]
pub enum GridBounds<R> {
    /// Grow `[lo, hi]` whenever an instance falls outside it, then recompute
    /// every cached membership sum.
    Streaming,
    /// Per-attribute `(lo, hi)`, `None` for nominal attributes.
    Fixed(Vec<Option<(R, R)>>),
}

/// How candidate partitions are ranked.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveScoring {
    /// `(CU(P) - CU({all})) / n`: gain over the single-cluster partition,
    /// per cluster.
    #[default]
    Normalized,
    /// `CU(P)` unchanged. Finer partitions never score lower, so new
    /// categories win every non-tie and the tree stays flat.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyConfig<R> {
    pub membership: MembershipKind,
    /// Node count `d` for every numeric attribute.
    pub grid_size: usize,
    pub sigma: SigmaPolicy<R>,
    pub layout: GridLayout,
    pub bounds: GridBounds<R>,
    pub scoring: MoveScoring,
    /// Run [`Hierarchy::audit`] after every insert.
    #[serde(default)]
    pub audit: bool,
}

impl<R: Real> Default for HierarchyConfig<R> {
    fn default() -> Self {
        HierarchyConfig {
            membership: MembershipKind::Gaussian,
            grid_size: 4,
            sigma: SigmaPolicy::CellWidth,
            layout: GridLayout::Offset,
            bounds: GridBounds::Streaming,
            scoring: MoveScoring::Normalized,
            audit: false,
        }
    }
}

impl<R: Real> HierarchyConfig<R> {
    pub fn with_membership(mut self, kind: MembershipKind) -> Self {
        self.membership = kind;
        self
    }

    pub fn with_grid_size(mut self, d: usize) -> Self {
        self.grid_size = d;
        self
    }

    pub fn with_sigma(mut self, sigma: SigmaPolicy<R>) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_bounds(mut self, bounds: GridBounds<R>) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn with_layout(mut self, layout: GridLayout) -> Self {
        self.layout = layout;
        self
    }

    pub fn with_scoring(mut self, scoring: MoveScoring) -> Self {
        self.scoring = scoring;
        self
    }

    pub fn with_audit(mut self, audit: bool) -> Self {
        self.audit = audit;
        self
    }

    fn validate(&self, schema: &Schema) -> Result<()> {
        if self.grid_size == 0 {
            return Err(Error::InvalidGridSize);
        }
        if let SigmaPolicy::Fixed(s) = self.sigma {
            if s <= R::zero() || !s.is_finite() {
                return Err(Error::InvalidSigma);
            }
        }
        if let GridBounds::Fixed(bounds) = &self.bounds {
            if bounds.len() != schema.len() {
                return Err(Error::InvalidConfig(format!(
                    "{} fixed bounds for {} attributes",
                    bounds.len(),
                    schema.len()
                )));
            }
            for (attr, b) in schema.attributes().iter().zip(bounds) {
                match (attr.is_numeric(), b) {
                    (true, Some((lo, hi))) if lo <= hi && lo.is_finite() && hi.is_finite() => {}
                    (false, None) => {}
                    _ => {
                        return Err(Error::InvalidConfig(format!(
                            "bad fixed bounds for attribute `{}`",
                            attr.name
                        )))
                    }
                }
            }
        }
        Ok(())
    }
}

/// A category in the hierarchy.
#[derive(Debug, Clone, PartialEq)]
pub struct ConceptNode<R> {
    id: NodeId,
    members: Vec<usize>,
    stats: ClusterStats<R>,
    children: Vec<ConceptNode<R>>,
}

impl<R: Real> ConceptNode<R> {
    fn leaf(id: NodeId, member: usize, profile: &Profile<R>) -> Self {
        ConceptNode {
            id,
            members: vec![member],
            stats: ClusterStats::from_profile(profile),
            children: Vec::new(),
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    /// Sorted instance indices.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Member count `l_k`.
    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn stats(&self) -> &ClusterStats<R> {
        &self.stats
    }

    pub fn children(&self) -> &[ConceptNode<R>] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    fn absorb(&mut self, member: usize, profile: &Profile<R>) {
        debug_assert!(self.members.last().is_none_or(|&m| m < member));
        self.members.push(member);
        self.stats.add(profile);
    }

    /// Depth-first search by id.
    pub fn find(&self, id: NodeId) -> Option<&ConceptNode<R>> {
        if self.id == id {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(id))
    }

    /// Pre-order iterator over this subtree.
    pub fn walk(&self) -> impl Iterator<Item = &ConceptNode<R>> {
        let mut stack = vec![self];
        std::iter::from_fn(move || {
            let node = stack.pop()?;
            stack.extend(node.children.iter().rev());
            Some(node)
        })
    }

    pub fn leaves(&self) -> impl Iterator<Item = &ConceptNode<R>> {
        self.walk().filter(|n| n.is_leaf())
    }

    pub(crate) fn from_parts(
        id: NodeId,
        members: Vec<usize>,
        stats: ClusterStats<R>,
        children: Vec<ConceptNode<R>>,
    ) -> Self {
        ConceptNode {
            id,
            members,
            stats,
            children,
        }
    }

    fn recompute(&mut self, profiles: &[Profile<R>], widths: &[usize]) {
        self.stats =
            ClusterStats::from_profiles(widths, self.members.iter().map(|&m| &profiles[m]));
        for child in &mut self.children {
            child.recompute(profiles, widths);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum Move {
    InsertIntoBest { child: NodeId },
    CreateNewCategory,
    MergeBestPair { first: NodeId, second: NodeId },
    SplitBest { child: NodeId },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoredMove<R> {
    #[serde(flatten)]
    pub mv: Move,
    pub score: R,
}

/// Scores of every feasible move at one node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoveScores<R> {
    /// Insertion into each host, best first (ties: earliest created first).
    pub inserts: Vec<ScoredMove<R>>,
    pub new_category: ScoredMove<R>,
    pub merge: Option<ScoredMove<R>>,
    pub split: Option<ScoredMove<R>>,
}

impl<R: Real> MoveScores<R> {
    /// Feasible moves in tie-break priority order.
    pub fn candidates(&self) -> Vec<ScoredMove<R>> {
        let mut out = vec![self.inserts[0], self.new_category];
        out.extend(self.merge);
        out.extend(self.split);
        out
    }

    /// The maximal move; on ties the earlier candidate wins.
    pub fn best(&self) -> ScoredMove<R> {
        select(&self.candidates())
    }
}

fn beats<R: Scalar>(a: R, b: R) -> bool {
    a > b && !a.nearly_eq(b)
}

fn select<R: Real>(candidates: &[ScoredMove<R>]) -> ScoredMove<R> {
    let mut best = candidates[0];
    for &c in &candidates[1..] {
        if beats(c.score, best.score) {
            best = c;
        }
    }
    best
}

/// Moves scored and applied at one level of one insert.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelTrace<R> {
    pub node: NodeId,
    pub scores: MoveScores<R>,
    pub chosen: ScoredMove<R>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct InsertTrace<R> {
    pub instance: usize,
    /// True if a grid grew and all cached sums were recomputed.
    pub grids_rebuilt: bool,
    pub levels: Vec<LevelTrace<R>>,
}

struct Scorer<'a, R> {
    scoring: MoveScoring,
    attrs: &'a [usize],
    parent: &'a ClusterStats<R>,
    baseline: R,
}

impl<'a, R: Real> Scorer<'a, R> {
    fn new(scoring: MoveScoring, attrs: &'a [usize], parent: &'a ClusterStats<R>) -> Self {
        let baseline = cluster_contribution(parent, parent, attrs);
        Scorer {
            scoring,
            attrs,
            parent,
            baseline,
        }
    }

    fn contribution(&self, cluster: &ClusterStats<R>) -> R {
        cluster_contribution(self.parent, cluster, self.attrs)
    }

    fn score(&self, cu: R, n: usize) -> R {
        match self.scoring {
            MoveScoring::Raw => cu,
            MoveScoring::Normalized => (cu - self.baseline) / R::from_count(n),
        }
    }
}

/// Sum of `base` in order with `replace[k]` substituted where present.
fn sum_with<R: Real>(base: &[R], replaced: usize, value: R) -> R {
    base.iter().enumerate().fold(R::zero(), |acc, (k, &b)| {
        acc + if k == replaced { value } else { b }
    })
}

/// Scores the moves at `node` for an instance with profile `xp`.
///
/// `parent` must already include the instance. A leaf is scored as a node
/// whose only child is itself, so just insertion and new category apply.
fn score_node<R: Real>(
    node: &ConceptNode<R>,
    parent: &ClusterStats<R>,
    xp: &Profile<R>,
    attrs: &[usize],
    scoring: MoveScoring,
) -> MoveScores<R> {
    let scorer = Scorer::new(scoring, attrs, parent);
    let hosts: Vec<&ConceptNode<R>> = if node.is_leaf() {
        vec![node]
    } else {
        node.children.iter().collect()
    };
    let m = hosts.len();
    let base: Vec<R> = hosts
        .iter()
        .map(|h| scorer.contribution(&h.stats))
        .collect();
    let total = base.iter().fold(R::zero(), |acc, &b| acc + b);

    let mut ranked: Vec<(usize, R)> = hosts
        .iter()
        .enumerate()
        .map(|(k, h)| {
            let cu = sum_with(&base, k, scorer.contribution(&h.stats.with(xp)));
            (k, scorer.score(cu, m))
        })
        .collect();
    // Stable ordering: better score first, ties by creation order.
    ranked.sort_by(|a, b| {
        if beats(a.1, b.1) {
            std::cmp::Ordering::Less
        } else if beats(b.1, a.1) {
            std::cmp::Ordering::Greater
        } else {
            hosts[a.0].id.cmp(&hosts[b.0].id)
        }
    });
    let inserts: Vec<ScoredMove<R>> = ranked
        .iter()
        .map(|&(k, score)| ScoredMove {
            mv: Move::InsertIntoBest { child: hosts[k].id },
            score,
        })
        .collect();

    let single = ClusterStats::from_profile(xp);
    let new_category = ScoredMove {
        mv: Move::CreateNewCategory,
        score: scorer.score(total + scorer.contribution(&single), m + 1),
    };

    let best = ranked[0].0;
    let merge = (m >= 3).then(|| {
        let second = ranked[1].0;
        let merged = hosts[best].stats.merged(&hosts[second].stats).with(xp);
        let (lo, hi) = (best.min(second), best.max(second));
        let cu = base.iter().enumerate().fold(R::zero(), |acc, (k, &b)| {
            if k == lo {
                acc + scorer.contribution(&merged)
            } else if k == hi {
                acc
            } else {
                acc + b
            }
        });
        ScoredMove {
            mv: Move::MergeBestPair {
                first: hosts[best].id,
                second: hosts[second].id,
            },
            score: scorer.score(cu, m - 1),
        }
    });

    let split = (!node.is_leaf() && !hosts[best].is_leaf()).then(|| {
        let grand = &hosts[best].children;
        let mut promoted: Vec<R> = Vec::with_capacity(m - 1 + grand.len());
        promoted.extend_from_slice(&base[..best]);
        let offset = promoted.len();
        promoted.extend(grand.iter().map(|g| scorer.contribution(&g.stats)));
        promoted.extend_from_slice(&base[best + 1..]);
        let n = promoted.len();
        let cu = grand
            .iter()
            .enumerate()
            .map(|(g, child)| {
                sum_with(
                    &promoted,
                    offset + g,
                    scorer.contribution(&child.stats.with(xp)),
                )
            })
            .fold(None, |acc: Option<R>, cu| match acc {
                Some(a) if !beats(cu, a) => Some(a),
                _ => Some(cu),
            })
            .expect("internal nodes have children");
        ScoredMove {
            mv: Move::SplitBest {
                child: hosts[best].id,
            },
            score: scorer.score(cu, n),
        }
    });

    MoveScores {
        inserts,
        new_category,
        merge,
        split,
    }
}

struct Ctx<'a, R> {
    profiles: &'a [Profile<R>],
    attrs: &'a [usize],
    scoring: MoveScoring,
    next_id: &'a mut u64,
}

impl<R> Ctx<'_, R> {
    fn fresh_id(&mut self) -> NodeId {
        let id = NodeId(*self.next_id);
        *self.next_id += 1;
        id
    }
}

fn insert_at<R: Real>(
    node: &mut ConceptNode<R>,
    x: usize,
    ctx: &mut Ctx<'_, R>,
    levels: &mut Vec<LevelTrace<R>>,
    force_split: bool,
) {
    let xp = &ctx.profiles[x];
    if node.is_leaf() {
        let absorb = if force_split {
            false
        } else {
            let parent = node.stats.with(xp);
            let scores = score_node(node, &parent, xp, ctx.attrs, ctx.scoring);
            let chosen = scores.best();
            levels.push(LevelTrace {
                node: node.id,
                scores,
                chosen,
            });
            matches!(chosen.mv, Move::InsertIntoBest { .. })
        };
        if !absorb {
            let clone = ConceptNode {
                id: ctx.fresh_id(),
                members: node.members.clone(),
                stats: node.stats.clone(),
                children: Vec::new(),
            };
            let single = ConceptNode::leaf(ctx.fresh_id(), x, xp);
            node.children = vec![clone, single];
        }
        node.absorb(x, xp);
        return;
    }

    node.absorb(x, xp);
    loop {
        let scores = score_node(node, &node.stats, xp, ctx.attrs, ctx.scoring);
        let chosen = scores.best();
        levels.push(LevelTrace {
            node: node.id,
            scores,
            chosen,
        });
        let position = |id: NodeId| {
            node.children
                .iter()
                .position(|c| c.id == id)
                .expect("move refers to a child")
        };
        match chosen.mv {
            Move::InsertIntoBest { child } => {
                let k = position(child);
                return insert_at(&mut node.children[k], x, ctx, levels, false);
            }
            Move::CreateNewCategory => {
                let leaf = ConceptNode::leaf(ctx.fresh_id(), x, xp);
                node.children.push(leaf);
                return;
            }
            Move::MergeBestPair { first, second } => {
                let (a, b) = (position(first), position(second));
                let (lo, hi) = (a.min(b), a.max(b));
                let right = node.children.remove(hi);
                let left = node.children.remove(lo);
                let mut members = Vec::with_capacity(left.count() + right.count());
                members.extend_from_slice(&left.members);
                members.extend_from_slice(&right.members);
                members.sort_unstable();
                let merged = ConceptNode {
                    id: ctx.fresh_id(),
                    members,
                    stats: left.stats.merged(&right.stats),
                    children: vec![left, right],
                };
                node.children.insert(lo, merged);
                return insert_at(&mut node.children[lo], x, ctx, levels, false);
            }
            Move::SplitBest { child } => {
                let k = position(child);
                let host = node.children.remove(k);
                for (offset, grand) in host.children.into_iter().enumerate() {
                    node.children.insert(k + offset, grand);
                }
            }
        }
    }
}

/// An incrementally built concept hierarchy.
#[derive(Debug, Clone)]
pub struct Hierarchy<R: Real> {
    schema: Schema,
    config: HierarchyConfig<R>,
    grids: Vec<Option<Grid<R>>>,
    widths: Vec<usize>,
    attrs: Vec<usize>,
    instances: Vec<Instance<R>>,
    profiles: Vec<Profile<R>>,
    root: Option<ConceptNode<R>>,
    next_id: u64,
}

impl<R: Real> Hierarchy<R> {
    pub fn new(schema: Schema, config: HierarchyConfig<R>) -> Result<Self> {
        config.validate(&schema)?;
        let widths = schema
            .attributes()
            .iter()
            .map(|a| match &a.kind {
                AttributeKind::Nominal { values } => values.len(),
                AttributeKind::Numeric => config.grid_size,
            })
            .collect();
        let grids = match &config.bounds {
            GridBounds::Streaming => vec![None; schema.len()],
            GridBounds::Fixed(bounds) => bounds
                .iter()
                .map(|b| {
                    b.map(|(lo, hi)| {
                        Grid::from_bounds(lo, hi, config.grid_size, config.sigma, config.layout)
                    })
                    .transpose()
                })
                .collect::<Result<_>>()?,
        };
        Ok(Hierarchy {
            attrs: (0..schema.len()).collect(),
            schema,
            config,
            grids,
            widths,
            instances: Vec::new(),
            profiles: Vec::new(),
            root: None,
            next_id: 0,
        })
    }

    /// Builds a hierarchy by inserting every instance of `dataset` in order.
    pub fn fit(dataset: &Dataset<R>, config: HierarchyConfig<R>) -> Result<Self> {
        let mut h = Hierarchy::new(dataset.schema().clone(), config)?;
        for inst in dataset.instances() {
            h.insert(inst.clone())?;
        }
        Ok(h)
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn config(&self) -> &HierarchyConfig<R> {
        &self.config
    }

    pub fn grids(&self) -> &[Option<Grid<R>>] {
        &self.grids
    }

    /// Inserted instances; index = insertion order.
    pub fn instances(&self) -> &[Instance<R>] {
        &self.instances
    }

    pub fn root(&self) -> Option<&ConceptNode<R>> {
        self.root.as_ref()
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Number of node ids handed out so far.
    pub fn issued_ids(&self) -> u64 {
        self.next_id
    }

    pub fn node_count(&self) -> usize {
        self.root.as_ref().map_or(0, |r| r.walk().count())
    }

    pub fn leaf_count(&self) -> usize {
        self.root.as_ref().map_or(0, |r| r.leaves().count())
    }

    pub fn find(&self, id: NodeId) -> Option<&ConceptNode<R>> {
        self.root.as_ref().and_then(|r| r.find(id))
    }

    /// Inserted instances as a dataset.
    pub fn dataset(&self) -> Dataset<R> {
        Dataset::new(self.schema.clone(), self.instances.clone())
            .expect("inserted instances were validated")
    }

    /// Grows grids to cover `inst`; returns whether any grid changed.
    fn track_ranges(&mut self, inst: &Instance<R>) -> Result<bool> {
        if !matches!(self.config.bounds, GridBounds::Streaming) {
            return Ok(false);
        }
        let mut changed = false;
        for j in 0..self.schema.len() {
            let Some(v) = inst.number(j) else { continue };
            let bounds = match &self.grids[j] {
                None => Some((v, v)),
                Some(g) if !g.covers(v) => Some((g.lo().min(v), g.hi().max(v))),
                Some(_) => None,
            };
            if let Some((lo, hi)) = bounds {
                self.grids[j] = Some(Grid::from_bounds(
                    lo,
                    hi,
                    self.config.grid_size,
                    self.config.sigma,
                    self.config.layout,
                )?);
                changed = true;
            }
        }
        Ok(changed)
    }

    fn profile_of(&self, inst: &Instance<R>) -> Result<Profile<R>> {
        profile(&self.schema, &self.grids, self.config.membership, inst)
    }

    fn rebuild_profiles(&mut self) -> Result<()> {
        self.profiles = self
            .instances
            .iter()
            .map(|inst| profile(&self.schema, &self.grids, self.config.membership, inst))
            .collect::<Result<_>>()?;
        if let Some(root) = &mut self.root {
            root.recompute(&self.profiles, &self.widths);
        }
        Ok(())
    }

    /// Adds one instance and restructures the tree along its path.
    pub fn insert(&mut self, inst: Instance<R>) -> Result<InsertTrace<R>> {
        validate_instance(&self.schema, &inst)?;
        let rebuilt = self.track_ranges(&inst)?;
        let x = self.instances.len();
        self.instances.push(inst);
        if rebuilt && x > 0 {
            self.rebuild_profiles()?;
        } else {
            let p = self.profile_of(&self.instances[x])?;
            self.profiles.push(p);
        }

        let mut trace = InsertTrace {
            instance: x,
            grids_rebuilt: rebuilt,
            levels: Vec::new(),
        };
        match &mut self.root {
            None => {
                let id = NodeId(self.next_id);
                self.next_id += 1;
                self.root = Some(ConceptNode::leaf(id, x, &self.profiles[x]));
            }
            Some(root) => {
                let bootstrap = root.is_leaf() && root.count() == 1;
                let mut ctx = Ctx {
                    profiles: &self.profiles,
                    attrs: &self.attrs,
                    scoring: self.config.scoring,
                    next_id: &mut self.next_id,
                };
                insert_at(root, x, &mut ctx, &mut trace.levels, bootstrap);
            }
        }
        if self.config.audit {
            self.audit()?;
        }
        Ok(trace)
    }

    /// Scores the moves an insert of `inst` would consider at node `id`,
    /// without changing the tree. Grids are not extended.
    pub fn score_moves(&self, id: NodeId, inst: &Instance<R>) -> Result<MoveScores<R>> {
        validate_instance(&self.schema, inst)?;
        let node = self.find(id).ok_or(Error::EmptyHierarchy)?;
        let xp = self.profile_of(inst)?;
        let parent = node.stats.with(&xp);
        Ok(score_node(
            node,
            &parent,
            &xp,
            &self.attrs,
            self.config.scoring,
        ))
    }

    /// Read-only descent choosing at each level the child that would host
    /// `inst`. Returns the node ids from the root to where it stopped;
    /// `max_depth` limits the number of descents.
    pub fn classify(&self, inst: &Instance<R>, max_depth: Option<usize>) -> Result<Vec<NodeId>> {
        validate_instance(&self.schema, inst)?;
        let mut node = self.root.as_ref().ok_or(Error::EmptyHierarchy)?;
        let xp = self.profile_of(inst)?;
        let mut path = vec![node.id];
        while !node.is_leaf() && max_depth.is_none_or(|d| path.len() <= d) {
            let parent = node.stats.with(&xp);
            let scores = score_node(node, &parent, &xp, &self.attrs, self.config.scoring);
            let Move::InsertIntoBest { child } = scores.inserts[0].mv else {
                unreachable!("insert candidates only hold insert moves")
            };
            node = node
                .children
                .iter()
                .find(|c| c.id == child)
                .expect("host is a child");
            path.push(node.id);
        }
        Ok(path)
    }

    /// Partition of all instances formed by the root's children.
    pub fn root_partition(&self) -> Option<Partition> {
        let root = self.root.as_ref()?;
        let clusters = if root.is_leaf() {
            vec![root.members.clone()]
        } else {
            root.children.iter().map(|c| c.members.clone()).collect()
        };
        Some(Partition::new(clusters).expect("children are disjoint and non-empty"))
    }

    /// Partition formed by the children of node `id` (or the node itself if
    /// it is a leaf).
    pub fn partition_at(&self, id: NodeId) -> Option<Partition> {
        let node = self.find(id)?;
        let clusters = if node.is_leaf() {
            vec![node.members.clone()]
        } else {
            node.children.iter().map(|c| c.members.clone()).collect()
        };
        Partition::new(clusters).ok()
    }

    /// Utility report of the root partition from cached statistics.
    pub fn root_report(&self) -> Result<UtilityReport<R>> {
        let root = self.root.as_ref().ok_or(Error::EmptyHierarchy)?;
        let clusters: Vec<ClusterStats<R>> = if root.is_leaf() {
            vec![root.stats.clone()]
        } else {
            root.children.iter().map(|c| c.stats.clone()).collect()
        };
        let names = self
            .schema
            .attributes()
            .iter()
            .map(|a| a.name.clone())
            .collect();
        let labels = self
            .schema
            .attributes()
            .iter()
            .zip(&self.grids)
            .map(|(a, g)| match (&a.kind, g) {
                (AttributeKind::Nominal { values }, _) => values.clone(),
                (AttributeKind::Numeric, Some(g)) => {
                    g.centers().iter().map(|c| c.to_string()).collect()
                }
                (AttributeKind::Numeric, None) => Vec::new(),
            })
            .collect();
        Ok(report_from_stats(
            &root.stats,
            &clusters,
            &self.attrs,
            names,
            labels,
        ))
    }

    /// Utility report of the root partition recomputed from the instances.
    pub fn root_report_from_scratch(&self) -> Result<UtilityReport<R>> {
        let partition = self.root_partition().ok_or(Error::EmptyHierarchy)?;
        mixed_cu(
            &partition,
            &self.dataset(),
            &self.grids,
            self.config.membership,
        )
    }

    /// Checks structural invariants and cached sums. Returns the first
    /// violation found.
    pub fn audit(&self) -> Result<()> {
        let Some(root) = &self.root else {
            return if self.instances.is_empty() {
                Ok(())
            } else {
                Err(Error::Audit("instances inserted but no root".into()))
            };
        };
        let all: Vec<usize> = (0..self.instances.len()).collect();
        if root.members != all {
            return Err(Error::Audit("root does not hold every instance".into()));
        }
        let mut seen_ids = std::collections::HashSet::new();
        for node in root.walk() {
            if !seen_ids.insert(node.id) {
                return Err(Error::Audit(format!("duplicate node id {}", node.id)));
            }
            if node.id.0 >= self.next_id {
                return Err(Error::Audit(format!(
                    "node id {} was never issued",
                    node.id
                )));
            }
            if node.members.is_empty() || node.stats.count() != node.members.len() {
                return Err(Error::Audit(format!("node {} count mismatch", node.id)));
            }
            if !node.members.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::Audit(format!("node {} members unsorted", node.id)));
            }
            if !node.is_leaf() {
                if node.children.len() < 2 {
                    return Err(Error::Audit(format!("node {} has a single child", node.id)));
                }
                let mut union: Vec<usize> = node
                    .children
                    .iter()
                    .flat_map(|c| c.members.iter().copied())
                    .collect();
                union.sort_unstable();
                if union != node.members {
                    return Err(Error::Audit(format!(
                        "children of node {} do not partition its members",
                        node.id
                    )));
                }
            }
            let fresh = ClusterStats::from_profiles(
                &self.widths,
                node.members.iter().map(|&m| &self.profiles[m]),
            );
            // 1e-9 in double precision; wider for f32 accumulations.
            let tolerance = 1e-9f64.max(16.0 * Scalar::to_f64(R::epsilon()) * node.count() as f64);
            match fresh.max_abs_diff(&node.stats) {
                Some(diff) if diff <= tolerance => {}
                _ => {
                    return Err(Error::Audit(format!(
                        "cached sums of node {} drifted from recomputation",
                        node.id
                    )))
                }
            }
        }
        Ok(())
    }

    /// Hex SHA-256 of the tree topology and membership.
    pub fn fingerprint(&self) -> String {
        fn encode<R>(node: &ConceptNode<R>, out: &mut String) {
            let _ = write!(out, "({}:{:?}", node.id.0, node.members);
            for c in &node.children {
                encode(c, out);
            }
            out.push(')');
        }
        let mut text = String::new();
        if let Some(root) = &self.root {
            encode(root, &mut text);
        }
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    pub(crate) fn from_parts(
        schema: Schema,
        config: HierarchyConfig<R>,
        grids: Vec<Option<Grid<R>>>,
        instances: Vec<Instance<R>>,
        root: Option<ConceptNode<R>>,
        next_id: u64,
    ) -> Result<Self> {
        let mut h = Hierarchy::new(schema, config)?;
        if grids.len() != h.schema.len() {
            return Err(Error::InvalidSnapshot(
                "grid count does not match schema".into(),
            ));
        }
        for (j, g) in grids.iter().enumerate() {
            match (h.schema.attribute(j).is_numeric(), g) {
                (true, Some(g)) if g.d() == h.config.grid_size => {}
                (true, None) if instances.is_empty() => {}
                (false, None) => {}
                _ => {
                    return Err(Error::InvalidSnapshot(format!(
                        "grid for attribute `{}` is inconsistent",
                        h.schema.attribute(j).name
                    )))
                }
            }
        }
        for inst in &instances {
            validate_instance(&h.schema, inst)?;
        }
        h.grids = grids;
        h.instances = instances;
        h.root = root;
        h.next_id = next_id;
        h.rebuild_profiles()?;
        h.audit()
            .map_err(|e| Error::InvalidSnapshot(e.to_string()))?;
        Ok(h)
    }
}
