use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Disjoint, non-empty clusters of instance indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct Partition {
    clusters: Vec<Vec<usize>>,
    universe: Vec<usize>,
}

impl Partition {
    pub fn new(clusters: Vec<Vec<usize>>) -> Result<Self> {
        if clusters.is_empty() {
            return Err(Error::InvalidPartition("no clusters".into()));
        }
        let mut seen = HashSet::new();
        for (k, cluster) in clusters.iter().enumerate() {
            if cluster.is_empty() {
                return Err(Error::InvalidPartition(format!("cluster {k} is empty")));
            }
            for &m in cluster {
                if !seen.insert(m) {
                    return Err(Error::InvalidPartition(format!(
                        "instance {m} appears in more than one cluster"
                    )));
                }
            }
        }
        let mut universe: Vec<usize> = seen.into_iter().collect();
        universe.sort_unstable();
        Ok(Partition { clusters, universe })
    }

    /// Groups `labels[m]` by value; cluster order follows first appearance.
    pub fn from_labels<L: Eq + Hash>(labels: &[L]) -> Result<Self> {
        let mut index: HashMap<&L, usize> = HashMap::new();
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for (m, label) in labels.iter().enumerate() {
            let k = *index.entry(label).or_insert_with(|| {
                clusters.push(Vec::new());
                clusters.len() - 1
            });
            clusters[k].push(m);
        }
        Partition::new(clusters)
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    /// Sorted union of all clusters.
    pub fn universe(&self) -> &[usize] {
        &self.universe
    }

    /// Cluster count `n`.
    pub fn n(&self) -> usize {
        self.clusters.len()
    }

    /// Instance count `l`.
    pub fn l(&self) -> usize {
        self.universe.len()
    }

    /// Cluster index of every instance `0..=max`, `None` for gaps.
    pub fn labels(&self) -> Vec<Option<usize>> {
        let len = self.universe.last().map_or(0, |&m| m + 1);
        let mut out = vec![None; len];
        for (k, cluster) in self.clusters.iter().enumerate() {
            for &m in cluster {
                out[m] = Some(k);
            }
        }
        out
    }

    pub(crate) fn check_bounds(&self, len: usize) -> Result<()> {
        match self.universe.last() {
            Some(&m) if m >= len => Err(Error::InvalidPartition(format!(
                "instance {m} is out of range for {len} instances"
            ))),
            _ => Ok(()),
        }
    }
}

impl TryFrom<Vec<Vec<usize>>> for Partition {
    type Error = Error;

    fn try_from(clusters: Vec<Vec<usize>>) -> Result<Self> {
        Partition::new(clusters)
    }
}

impl From<Partition> for Vec<Vec<usize>> {
    fn from(p: Partition) -> Self {
        p.clusters
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_overlap_and_empty() {
        assert!(Partition::new(vec![]).is_err());
        assert!(Partition::new(vec![vec![0], vec![]]).is_err());
        assert!(Partition::new(vec![vec![0, 1], vec![1]]).is_err());
    }

    #[test]
    fn labels_round_trip() {
        let p = Partition::from_labels(&["b", "a", "b", "c"]).unwrap();
        assert_eq!(p.clusters(), &[vec![0, 2], vec![1], vec![3]]);
        assert_eq!((p.n(), p.l()), (3, 4));
        assert_eq!(p.labels(), vec![Some(0), Some(1), Some(0), Some(2)]);
    }

    #[test]
    fn bounds() {
        let p = Partition::new(vec![vec![0, 5]]).unwrap();
        assert!(p.check_bounds(6).is_ok());
        assert!(p.check_bounds(5).is_err());
    }
}
