use crate::data::{FeatureValue, Observation, Prediction, Schema, TaskKind};
use crate::error::{Error, Result};

/// Split test of an internal node. Observations satisfying it go left.
#[derive(Clone, Debug, PartialEq)]
pub enum Split {
    /// `x <= threshold`
    LessOrEqual(f64),
    /// `x == category`
    Equals(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    Leaf,
    Split {
        feature: usize,
        split: Split,
        left: usize,
        right: usize,
    },
}

/// A tree node. Internal nodes also carry the value they would predict as a leaf.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub value: Prediction,
    pub n_samples: usize,
    pub kind: NodeKind,
}

impl TreeNode {
    pub fn leaf(value: Prediction) -> Self {
        TreeNode {
            value,
            n_samples: 0,
            kind: NodeKind::Leaf,
        }
    }

    pub fn split(feature: usize, split: Split, left: usize, right: usize, value: Prediction) -> Self {
        TreeNode {
            value,
            n_samples: 0,
            kind: NodeKind::Split {
                feature,
                split,
                left,
                right,
            },
        }
    }
}

/// Binary decision tree stored as an arena; node 0 is the root.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<TreeNode>,
    schema: Schema,
    task: TaskKind,
}

impl DecisionTree {
    pub fn new(nodes: Vec<TreeNode>, schema: Schema, task: TaskKind) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidParameter {
            name: "tree",
            reason,
        };
        if nodes.is_empty() {
            return Err(invalid("a tree needs at least one node".into()));
        }
        let mut seen = vec![false; nodes.len()];
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id], true) {
                return Err(invalid(format!("node {id} is reachable twice")));
            }
            let node = &nodes[id];
            if node.value.task() != task {
                return Err(Error::PredictionKind { task: task.as_str() });
            }
            if let Prediction::Real(v) = node.value {
                if !v.is_finite() {
                    return Err(invalid(format!("node {id} has a non-finite value")));
                }
            }
            if let NodeKind::Split {
                feature,
                split,
                left,
                right,
            } = &node.kind
            {
                if *feature >= schema.len() {
                    return Err(Error::FeatureOutOfRange {
                        feature: *feature,
                        d: schema.len(),
                    });
                }
                if let Split::LessOrEqual(t) = split {
                    if !t.is_finite() {
                        return Err(invalid(format!("node {id} has a non-finite threshold")));
                    }
                }
                for child in [*left, *right] {
                    if child >= nodes.len() || child == 0 {
                        return Err(invalid(format!("node {id} has invalid child {child}")));
                    }
                    stack.push(child);
                }
            }
        }
        if let Some(orphan) = seen.iter().position(|s| !s) {
            return Err(invalid(format!("node {orphan} is unreachable")));
        }
        Ok(DecisionTree {
            nodes,
            schema,
            task,
        })
    }

    pub fn single_leaf(value: Prediction, schema: Schema) -> Self {
        let task = value.task();
        DecisionTree {
            nodes: vec![TreeNode::leaf(value)],
            schema,
            task,
        }
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn task(&self) -> TaskKind {
        self.task
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Leaf))
            .count()
    }

    /// Depth of every leaf, in depth-first left-to-right order.
    pub fn leaf_depths(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![(0usize, 0usize)];
        while let Some((id, depth)) = stack.pop() {
            match &self.nodes[id].kind {
                NodeKind::Leaf => out.push(depth),
                NodeKind::Split { left, right, .. } => {
                    stack.push((*right, depth + 1));
                    stack.push((*left, depth + 1));
                }
            }
        }
        out
    }

    pub fn depth(&self) -> usize {
        self.leaf_depths().into_iter().max().unwrap_or(0)
    }

    pub fn predict<O: Observation + ?Sized>(&self, x: &O) -> Result<Prediction> {
        let mut id = 0;
        loop {
            let node = &self.nodes[id];
            match &node.kind {
                NodeKind::Leaf => return Ok(node.value.clone()),
                NodeKind::Split {
                    feature,
                    split,
                    left,
                    right,
                } => {
                    let value = x
                        .value(*feature)
                        .ok_or(Error::MissingFeature { feature: *feature })?;
                    let goes_left = match (split, value) {
                        (Split::LessOrEqual(t), FeatureValue::Num(v)) => v <= *t,
                        (Split::Equals(c), FeatureValue::Cat(v)) => v == c,
                        (split, value) => {
                            return Err(Error::FeatureKindMismatch {
                                feature: *feature,
                                expected: match split {
                                    Split::LessOrEqual(_) => "continuous",
                                    Split::Equals(_) => "categorical",
                                },
                                found: value.kind_name(),
                            })
                        }
                    };
                    id = if goes_left { *left } else { *right };
                }
            }
        }
    }
}
