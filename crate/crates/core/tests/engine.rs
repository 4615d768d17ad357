mod support;

use cobweb_core::{
    adjusted_rand_index, AttributeDecl, Dataset, GridBounds, Hierarchy, Hierarchy32, Hierarchy64,
    HierarchyConfig, Instance, MembershipKind, Move, MoveScoring, Partition, Scalar, Schema,
    ScoredMove, SigmaPolicy,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::*;

fn rows_of(ds: &Dataset<f64>) -> Vec<Vec<f64>> {
    ds.instances()
        .iter()
        .map(|inst| {
            (0..ds.schema().len())
                .map(|j| inst.number(j).unwrap())
                .collect()
        })
        .collect()
}

fn blob_config() -> HierarchyConfig<f64> {
    HierarchyConfig::default()
        .with_grid_size(8)
        .with_membership(MembershipKind::Gaussian)
        .with_audit(true)
}

#[test]
fn far_apart_instances_open_separate_categories() {
    let ds = numeric_dataset(&[vec![0.0], vec![100.0], vec![50.0]]);
    let mut h = Hierarchy64::new(
        ds.schema().clone(),
        HierarchyConfig::default().with_audit(true),
    )
    .unwrap();
    h.insert(ds.instances()[0].clone()).unwrap();
    h.insert(ds.instances()[1].clone()).unwrap();
    let root = h.root().unwrap();
    assert_eq!(root.children().len(), 2);
    assert!(root.children().iter().all(|c| c.count() == 1));

    // A third point midway: joining either side scores below a new category.
    let trace = h.insert(ds.instances()[2].clone()).unwrap();
    let scores = &trace.levels[0].scores;
    assert!(scores.new_category.score > scores.inserts[0].score);
    assert_eq!(trace.levels[0].chosen.mv, Move::CreateNewCategory);
    assert_eq!(h.root().unwrap().children().len(), 3);
}

/// Normalized move score of a candidate partition, computed from raw values.
fn brute_move_score(
    rows: &[Vec<f64>],
    clusters: &[Vec<usize>],
    centers: &[Vec<f64>],
    sigmas: &[f64],
) -> f64 {
    let all: Vec<usize> = clusters.iter().flatten().copied().collect();
    let cu = brute_gaussian_cu(rows, clusters, centers, sigmas);
    let baseline = brute_gaussian_cu(rows, &[all], centers, sigmas);
    (cu - baseline) / clusters.len() as f64
}

#[test]
fn root_move_scores_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (rows, _) = two_blobs(&mut rng, 15, 4.0, 1.5, 2);
    let bounds = (0..2)
        .map(|j| {
            let lo = rows.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min);
            let hi = rows.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max);
            Some((lo, hi))
        })
        .collect();
    let config = HierarchyConfig::default()
        .with_grid_size(5)
        .with_bounds(GridBounds::Fixed(bounds))
        .with_audit(true);
    let ds = numeric_dataset(&rows);
    let mut h = Hierarchy64::new(ds.schema().clone(), config).unwrap();
    let mut checked = 0;
    for (x, inst) in ds.instances().iter().enumerate() {
        let root = h.root().map(|r| (r.id(), r.is_leaf()));
        if let Some((root_id, false)) = root {
            let centers: Vec<Vec<f64>> = h
                .grids()
                .iter()
                .map(|g| g.as_ref().unwrap().centers().to_vec())
                .collect();
            let sigmas: Vec<f64> = h
                .grids()
                .iter()
                .map(|g| g.as_ref().unwrap().sigma())
                .collect();
            let scores = h.score_moves(root_id, inst).unwrap();
            let children: Vec<Vec<usize>> = h
                .root()
                .unwrap()
                .children()
                .iter()
                .map(|c| c.members().to_vec())
                .collect();
            let ids: Vec<_> = h
                .root()
                .unwrap()
                .children()
                .iter()
                .map(|c| c.id())
                .collect();
            let with_x = &rows[..=x];

            for ins in &scores.inserts {
                let Move::InsertIntoBest { child } = ins.mv else {
                    panic!()
                };
                let k = ids.iter().position(|&id| id == child).unwrap();
                let mut cand = children.clone();
                cand[k].push(x);
                let expected = brute_move_score(with_x, &cand, &centers, &sigmas);
                assert!(
                    (ins.score - expected).abs() < 1e-9,
                    "insert {} vs {}",
                    ins.score,
                    expected
                );
            }
            let mut cand = children.clone();
            cand.push(vec![x]);
            let expected = brute_move_score(with_x, &cand, &centers, &sigmas);
            assert!((scores.new_category.score - expected).abs() < 1e-9);

            if let Some(ScoredMove {
                mv: Move::MergeBestPair { first, second },
                score,
            }) = scores.merge
            {
                let a = ids.iter().position(|&id| id == first).unwrap();
                let b = ids.iter().position(|&id| id == second).unwrap();
                let mut merged: Vec<usize> =
                    children[a].iter().chain(&children[b]).copied().collect();
                merged.push(x);
                let mut cand: Vec<Vec<usize>> = children
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != a && k != b)
                    .map(|(_, c)| c.clone())
                    .collect();
                cand.push(merged);
                let expected = brute_move_score(with_x, &cand, &centers, &sigmas);
                assert!((score - expected).abs() < 1e-9);
            }

            if let Some(ScoredMove {
                mv: Move::SplitBest { child },
                score,
            }) = scores.split
            {
                let k = ids.iter().position(|&id| id == child).unwrap();
                let grand: Vec<Vec<usize>> = h
                    .find(child)
                    .unwrap()
                    .children()
                    .iter()
                    .map(|c| c.members().to_vec())
                    .collect();
                let best = (0..grand.len())
                    .map(|g| {
                        let mut cand: Vec<Vec<usize>> = children
                            .iter()
                            .enumerate()
                            .filter(|&(i, _)| i != k)
                            .map(|(_, c)| c.clone())
                            .collect();
                        let mut promoted = grand.clone();
                        promoted[g].push(x);
                        cand.extend(promoted);
                        brute_move_score(with_x, &cand, &centers, &sigmas)
                    })
                    .fold(f64::NEG_INFINITY, f64::max);
                assert!((score - best).abs() < 1e-9);
            }

            let trace = h.insert(inst.clone()).unwrap();
            assert_eq!(trace.levels[0].scores, scores);
            checked += 1;
        } else {
            h.insert(inst.clone()).unwrap();
        }
    }
    assert!(checked > 20);
}

fn assert_optimal(candidates: &[ScoredMove<f64>], chosen: ScoredMove<f64>) {
    let at = candidates
        .iter()
        .position(|c| *c == chosen)
        .expect("chosen move is a candidate");
    for (i, c) in candidates.iter().enumerate() {
        if i < at {
            assert!(
                chosen.score > c.score && !chosen.score.nearly_eq(c.score),
                "tie-break violated"
            );
        } else {
            assert!(
                c.score <= chosen.score || c.score.nearly_eq(chosen.score),
                "better move skipped"
            );
        }
    }
}

#[test]
fn every_applied_move_is_optimal_and_counts_are_conserved() {
    let mut moves = [0usize; 4];
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (rows, _) = two_blobs(&mut rng, 25, 3.0, 2.0, 2);
        let ds = numeric_dataset(&rows);
        for kind in [MembershipKind::Gaussian, MembershipKind::Rectangular] {
            let mut h =
                Hierarchy64::new(ds.schema().clone(), blob_config().with_membership(kind)).unwrap();
            for (x, inst) in ds.instances().iter().enumerate() {
                let trace = h.insert(inst.clone()).unwrap();
                for level in &trace.levels {
                    assert_optimal(&level.scores.candidates(), level.chosen);
                    moves[match level.chosen.mv {
                        Move::InsertIntoBest { .. } => 0,
                        Move::CreateNewCategory => 1,
                        Move::MergeBestPair { .. } => 2,
                        Move::SplitBest { .. } => 3,
                    }] += 1;
                }
                let root = h.root().unwrap();
                assert_eq!(root.count(), x + 1);
                assert_eq!(root.leaves().map(|l| l.count()).sum::<usize>(), x + 1);
                for node in root.walk().filter(|n| !n.is_leaf()) {
                    assert_eq!(
                        node.count(),
                        node.children().iter().map(|c| c.count()).sum::<usize>()
                    );
                }
            }
        }
    }
    // All four moves occur on these streams.
    assert!(moves.iter().all(|&c| c > 0), "{moves:?}");
}

#[test]
fn deterministic_and_replayable() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (rows, _) = two_blobs(&mut rng, 20, 10.0, 1.0, 2);
    let ds = numeric_dataset(&rows);
    let a = Hierarchy64::fit(&ds, blob_config()).unwrap();
    let b = Hierarchy64::fit(&ds, blob_config()).unwrap();
    assert_eq!(a.fingerprint(), b.fingerprint());
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());

    // Replaying the insertion log reproduces the tree.
    let replay = Hierarchy64::fit(&a.dataset(), blob_config()).unwrap();
    assert_eq!(replay.fingerprint(), a.fingerprint());
}

#[test]
fn two_blobs_are_recovered_at_the_root() {
    let mut total = 0.0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (rows, truth) = two_blobs(&mut rng, 20, 10.0, 1.0, 2);
        let h = Hierarchy64::fit(&numeric_dataset(&rows), blob_config()).unwrap();
        let labels: Vec<usize> = h
            .root_partition()
            .unwrap()
            .labels()
            .into_iter()
            .map(Option::unwrap)
            .collect();
        total += adjusted_rand_index(&truth, &labels);
    }
    assert!(total / 20.0 >= 0.9, "mean ARI {}", total / 20.0);
}

#[test]
fn single_precision_engine() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (rows, truth) = two_blobs(&mut rng, 20, 10.0, 1.0, 2);
    let schema = Schema::new(vec![
        AttributeDecl::numeric("x"),
        AttributeDecl::numeric("y"),
    ])
    .unwrap();
    let instances = rows
        .iter()
        .map(|r| Instance::numeric(r.iter().map(|&v| v as f32)))
        .collect();
    let ds = Dataset::new(schema, instances).unwrap();
    let h = Hierarchy32::fit(
        &ds,
        HierarchyConfig::default()
            .with_grid_size(8)
            .with_audit(true),
    )
    .unwrap();
    let labels: Vec<usize> = h
        .root_partition()
        .unwrap()
        .labels()
        .into_iter()
        .map(Option::unwrap)
        .collect();
    assert!(adjusted_rand_index(&truth, &labels) > 0.85);
}

#[test]
fn nominal_fixture_tree_depends_on_order() {
    let ds = fixture_nominal();
    // s1, s2, s3, s4: s3 opens its own category before s4 arrives, and the
    // two s1/s2 singletons are never regrouped.
    let h = Hierarchy64::fit(&ds, HierarchyConfig::default().with_audit(true)).unwrap();
    assert_eq!(
        h.root_partition().unwrap().clusters(),
        &[vec![0], vec![1], vec![2, 3]]
    );

    // s1, s3, s2, s4 realizes the separated partition.
    let order = [0, 2, 1, 3];
    let reordered = Dataset::new(
        ds.schema().clone(),
        order.iter().map(|&m| ds.instances()[m].clone()).collect(),
    )
    .unwrap();
    let h = Hierarchy64::fit(&reordered, HierarchyConfig::default().with_audit(true)).unwrap();
    assert_eq!(
        h.root_partition().unwrap().clusters(),
        &[vec![0, 2], vec![1, 3]]
    );
    assert_eq!(h.root_report().unwrap().total, 1.5);
    assert_eq!(h.root_report_from_scratch().unwrap().total, 1.5);
}

#[test]
fn raw_scoring_keeps_the_tree_flat() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (rows, _) = two_blobs(&mut rng, 10, 10.0, 1.0, 2);
    let h = Hierarchy64::fit(
        &numeric_dataset(&rows),
        blob_config().with_scoring(MoveScoring::Raw),
    )
    .unwrap();
    assert_eq!(h.root().unwrap().children().len(), 20);
}

#[test]
fn classify_finds_training_leaf() {
    let ds = fixture_numeric();
    let h = Hierarchy64::fit(
        &ds,
        HierarchyConfig::default()
            .with_sigma(SigmaPolicy::Fixed(1.0))
            .with_audit(true),
    )
    .unwrap();
    let before = h.fingerprint();
    for (m, inst) in ds.instances().iter().enumerate() {
        let path = h.classify(inst, None).unwrap();
        assert_eq!(path[0], h.root().unwrap().id());
        let leaf = h.find(*path.last().unwrap()).unwrap();
        assert!(leaf.is_leaf());
        assert!(
            leaf.members().contains(&m),
            "instance {m} classified to {:?}",
            leaf.members()
        );
        assert_eq!(h.classify(inst, None).unwrap(), path);
    }
    let shallow = h.classify(&ds.instances()[0], Some(1)).unwrap();
    assert_eq!(shallow.len(), 2);
    assert_eq!(h.fingerprint(), before);
}

#[test]
fn cached_root_report_matches_recomputation() {
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (rows, _) = two_blobs(&mut rng, 12, 2.0, 1.5, 3);
        let ds = numeric_dataset(&rows);
        let h = Hierarchy64::fit(&ds, blob_config()).unwrap();
        let cached = h.root_report().unwrap().total;
        let fresh = h.root_report_from_scratch().unwrap().total;
        let grids = h.grids();
        let centers: Vec<Vec<f64>> = grids
            .iter()
            .map(|g| g.as_ref().unwrap().centers().to_vec())
            .collect();
        let sigmas: Vec<f64> = grids.iter().map(|g| g.as_ref().unwrap().sigma()).collect();
        let brute = brute_gaussian_cu(
            &rows_of(&ds),
            h.root_partition().unwrap().clusters(),
            &centers,
            &sigmas,
        );
        assert!((cached - fresh).abs() < 1e-9 && (fresh - brute).abs() < 1e-9);
    }
}

#[test]
fn snapshot_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (rows, _) = two_blobs(&mut rng, 10, 5.0, 1.0, 2);
    let h = Hierarchy64::fit(&numeric_dataset(&rows), blob_config()).unwrap();
    let json = h.to_json().unwrap();
    let back = Hierarchy64::from_json(&json).unwrap();
    assert_eq!(back.fingerprint(), h.fingerprint());
    assert_eq!(back.to_json().unwrap(), json);
    assert_eq!(back.root_report().unwrap(), h.root_report().unwrap());
    for (a, b) in back.root().unwrap().walk().zip(h.root().unwrap().walk()) {
        assert_eq!(a.stats(), b.stats());
    }

    // Tampered statistics are rejected.
    let mut snap = h.snapshot();
    snap.root.as_mut().unwrap().stats[0][0] += 1.0;
    assert!(Hierarchy::from_snapshot(&snap).is_err());
    // And so are partitions that do not cover the instances.
    let mut snap = h.snapshot();
    snap.root.as_mut().unwrap().children[0].members.pop();
    assert!(Hierarchy::from_snapshot(&snap).is_err());
}

#[test]
fn mixed_schema_tree() {
    let schema = Schema::new(vec![
        AttributeDecl::nominal("shape", ["round", "square"]),
        AttributeDecl::numeric("size"),
    ])
    .unwrap();
    let rows = [
        ("round", 1.0),
        ("round", 1.2),
        ("square", 9.0),
        ("square", 8.7),
        ("round", 0.9),
        ("square", 9.3),
    ];
    let ds = Dataset::new(
        schema,
        rows.iter()
            .map(|&(s, x)| {
                Instance::new(vec![
                    cobweb_core::Value::Nominal(s.into()),
                    cobweb_core::Value::Numeric(x),
                ])
            })
            .collect(),
    )
    .unwrap();
    let h = Hierarchy64::fit(&ds, HierarchyConfig::default().with_audit(true)).unwrap();
    let p = h.root_partition().unwrap();
    let expected = Partition::new(vec![vec![0, 1, 4], vec![2, 3, 5]]).unwrap();
    assert_eq!(p, expected);
}
