use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How an internal node relates to its leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    /// Weighted average of leaves, weights normalized per node.
    #[default]
    WeightedAverage,
    /// Plain sum of leaves.
    Sum,
}

/// Declaration of one node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec<T> {
    pub id: String,
    pub parent: Option<String>,
    /// Required for leaves, ignored for internal nodes.
    pub weight: Option<T>,
}

impl<T> NodeSpec<T> {
    pub fn root(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            parent: None,
            weight: None,
        }
    }

    pub fn internal(id: impl Into<String>, parent: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            parent: Some(parent.into()),
            weight: None,
        }
    }

    pub fn leaf(id: impl Into<String>, parent: impl Into<String>, weight: T) -> Self {
        Self {
            id: id.into(),
            parent: Some(parent.into()),
            weight: Some(weight),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Node {
    id: String,
    parent: Option<usize>,
    children: Vec<usize>,
    level: usize,
}

/// Rooted tree of nodes with positive leaf weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Hierarchy<T> {
    nodes: Vec<Node>,
    index: BTreeMap<String, usize>,
    leaf_weights: BTreeMap<String, T>,
    root: usize,
    /// Breadth-first order, children in declaration order.
    bfs: Vec<usize>,
    convention: Aggregation,
}

impl<T: Scalar> Hierarchy<T> {
    pub fn new(specs: Vec<NodeSpec<T>>, convention: Aggregation) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, s) in specs.iter().enumerate() {
            if index.insert(s.id.clone(), i).is_some() {
                return Err(Error::InvalidHierarchy(format!("duplicate node id `{}`", s.id)));
            }
        }
        let mut nodes: Vec<Node> = specs
            .iter()
            .map(|s| Node {
                id: s.id.clone(),
                parent: None,
                children: Vec::new(),
                level: 0,
            })
            .collect();
        let mut roots = Vec::new();
        for (i, s) in specs.iter().enumerate() {
            match &s.parent {
                None => roots.push(i),
                Some(p) => {
                    let &pi = index.get(p).ok_or_else(|| {
                        Error::InvalidHierarchy(format!(
                            "node `{}` has unknown parent `{p}`",
                            s.id
                        ))
                    })?;
                    if pi == i {
                        return Err(Error::InvalidHierarchy(format!(
                            "node `{}` is its own parent",
                            s.id
                        )));
                    }
                    nodes[i].parent = Some(pi);
                    nodes[pi].children.push(i);
                }
            }
        }
        let root = match roots.as_slice() {
            [r] => *r,
            [] => return Err(Error::InvalidHierarchy("no root node (cycle)".into())),
            many => {
                let ids: Vec<&str> = many.iter().map(|&i| specs[i].id.as_str()).collect();
                return Err(Error::InvalidHierarchy(format!(
                    "multiple roots: {}",
                    ids.join(", ")
                )));
            }
        };

        let mut bfs = Vec::with_capacity(nodes.len());
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            bfs.push(i);
            for c in nodes[i].children.clone() {
                nodes[c].level = nodes[i].level + 1;
                queue.push_back(c);
            }
        }
        if bfs.len() != nodes.len() {
            let reached: std::collections::BTreeSet<usize> = bfs.iter().copied().collect();
            let stray = (0..nodes.len()).find(|i| !reached.contains(i)).unwrap();
            return Err(Error::InvalidHierarchy(format!(
                "node `{}` is part of a cycle",
                nodes[stray].id
            )));
        }

        let mut leaf_weights = BTreeMap::new();
        for (i, s) in specs.iter().enumerate() {
            if !nodes[i].children.is_empty() {
                continue;
            }
            let w = s.weight.ok_or_else(|| {
                Error::InvalidHierarchy(format!("leaf `{}` has no weight", s.id))
            })?;
            if !(w > T::zero() && w.is_finite()) {
                return Err(Error::InvalidHierarchy(format!(
                    "leaf `{}` has nonpositive weight {w}",
                    s.id
                )));
            }
            leaf_weights.insert(s.id.clone(), w);
        }
        Ok(Self {
            nodes,
            index,
            leaf_weights,
            root,
            bfs,
            convention,
        })
    }

    pub fn convention(&self) -> Aggregation {
        self.convention
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> &str {
        &self.nodes[self.root].id
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    fn idx(&self, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::InvalidHierarchy(format!("unknown node `{id}`")))
    }

    pub fn is_leaf(&self, id: &str) -> bool {
        self.index
            .get(id)
            .is_some_and(|&i| self.nodes[i].children.is_empty())
    }

    pub fn children(&self, id: &str) -> Result<Vec<&str>> {
        let i = self.idx(id)?;
        Ok(self.nodes[i]
            .children
            .iter()
            .map(|&c| self.nodes[c].id.as_str())
            .collect())
    }

    pub fn parent(&self, id: &str) -> Result<Option<&str>> {
        let i = self.idx(id)?;
        Ok(self.nodes[i].parent.map(|p| self.nodes[p].id.as_str()))
    }

    pub fn level(&self, id: &str) -> Result<usize> {
        Ok(self.nodes[self.idx(id)?].level)
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.level).max().unwrap_or(0) + 1
    }

    /// All node ids, breadth first.
    pub fn bfs_order(&self) -> Vec<&str> {
        self.bfs.iter().map(|&i| self.nodes[i].id.as_str()).collect()
    }

    /// Leaves, breadth first. This is the column order of the summing matrix.
    pub fn leaves(&self) -> Vec<&str> {
        self.bfs
            .iter()
            .filter(|&&i| self.nodes[i].children.is_empty())
            .map(|&i| self.nodes[i].id.as_str())
            .collect()
    }

    /// Internal nodes, breadth first (root first).
    pub fn internal_nodes(&self) -> Vec<&str> {
        self.bfs
            .iter()
            .filter(|&&i| !self.nodes[i].children.is_empty())
            .map(|&i| self.nodes[i].id.as_str())
            .collect()
    }

    /// Internal nodes breadth first, then leaves breadth first.
    pub fn row_order(&self) -> Vec<&str> {
        let mut order = self.internal_nodes();
        order.extend(self.leaves());
        order
    }

    pub fn leaf_weights(&self) -> &BTreeMap<String, T> {
        &self.leaf_weights
    }

    pub fn leaf_weight(&self, id: &str) -> Option<T> {
        self.leaf_weights.get(id).copied()
    }

    /// Leaves in the subtree of `id`, breadth first.
    pub fn leaves_under(&self, id: &str) -> Result<Vec<&str>> {
        let start = self.idx(id)?;
        let mut out = Vec::new();
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            if self.nodes[i].children.is_empty() {
                out.push(self.nodes[i].id.as_str());
            }
            queue.extend(self.nodes[i].children.iter().copied());
        }
        Ok(out)
    }

    /// Total leaf weight below `id`.
    pub fn subtree_weight(&self, id: &str) -> Result<T> {
        Ok(self
            .leaves_under(id)?
            .into_iter()
            .map(|l| self.leaf_weights[l])
            .sum())
    }
}
