//! Append-only rooted tree of configurations.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::space::{metric, Config};

/// Index of a node in its owning [`Tree`]; the root is always 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node<S> {
    pub config: Config<S>,
    pub parent: Option<NodeId>,
}

/// Every non-root node stores a single parent link with `parent < self`,
/// so the structure is acyclic and connected by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree<S> {
    nodes: Vec<Node<S>>,
}

impl<S: Scalar> Tree<S> {
    pub fn new(root: Config<S>) -> Self {
        Self::with_capacity(root, 1)
    }

    pub fn with_capacity(root: Config<S>, capacity: usize) -> Self {
        let mut nodes = Vec::with_capacity(capacity.max(1));
        nodes.push(Node {
            config: root,
            parent: None,
        });
        Self { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Always false; a tree holds at least its root.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> Config<S> {
        self.nodes[0].config
    }

    pub fn nodes(&self) -> &[Node<S>] {
        &self.nodes
    }

    pub fn config(&self, id: NodeId) -> Config<S> {
        self.nodes[id.0].config
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.0].parent
    }

    /// Appends `c` as a child of `parent`.
    ///
    /// # Panics
    ///
    /// If `parent` does not belong to this tree.
    pub fn add_node(&mut self, c: Config<S>, parent: NodeId) -> NodeId {
        assert!(
            parent.0 < self.nodes.len(),
            "parent {} out of range for tree of {} nodes",
            parent.0,
            self.nodes.len()
        );
        let id = NodeId(self.nodes.len());
        self.nodes.push(Node {
            config: c,
            parent: Some(parent),
        });
        id
    }

    /// Node closest to `x`, ties resolved to the smallest id. Linear scan.
    pub fn nearest_neighbour(&self, x: Config<S>) -> NodeId {
        let mut best = 0;
        let mut best_d2 = S::infinity();
        for (i, node) in self.nodes.iter().enumerate() {
            let dx = node.config.x - x.x;
            let dy = node.config.y - x.y;
            let d2 = dx * dx + dy * dy;
            if d2 < best_d2 {
                best_d2 = d2;
                best = i;
            }
        }
        NodeId(best)
    }

    /// Configurations on the root-to-`leaf` chain, root first.
    pub fn extract_path(&self, leaf: NodeId) -> Vec<Config<S>> {
        let mut path = Vec::new();
        let mut cursor = Some(leaf);
        while let Some(id) = cursor {
            let node = &self.nodes[id.0];
            path.push(node.config);
            cursor = node.parent;
        }
        path.reverse();
        path
    }

    /// `(parent, child)` pairs in insertion order of the child.
    pub fn edges(&self) -> impl Iterator<Item = (Config<S>, Config<S>)> + '_ {
        self.nodes
            .iter()
            .filter_map(move |n| n.parent.map(|p| (self.nodes[p.0].config, n.config)))
    }

    pub fn dump(&self) -> Vec<TreeRecord> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(id, n)| TreeRecord {
                id,
                x: n.config.x.as_f64(),
                y: n.config.y.as_f64(),
                parent: n.parent.map(NodeId::index),
            })
            .collect()
    }
}

/// One row of the JSON tree dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeRecord {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub parent: Option<usize>,
}

/// Sum of consecutive distances; 0 for a single configuration.
pub fn path_length<S: Scalar>(path: &[Config<S>]) -> S {
    path.windows(2)
        .map(|w| metric(w[0], w[1]))
        .fold(S::zero(), |acc, d| acc + d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64, y: f64) -> Config<f64> {
        Config::xy(x, y)
    }

    #[test]
    fn init_holds_only_root() {
        let t = Tree::new(c(10.0, 10.0));
        assert_eq!(t.len(), 1);
        assert_eq!(t.config(NodeId::ROOT), c(10.0, 10.0));
        assert_eq!(t.parent(NodeId::ROOT), None);
        assert_eq!(t.nearest_neighbour(c(99.0, 99.0)), NodeId(0));
        assert_eq!(t.extract_path(NodeId::ROOT), vec![c(10.0, 10.0)]);
    }

    #[test]
    fn add_node_appends() {
        let mut t = Tree::new(c(0.0, 0.0));
        let id = t.add_node(c(1.0, 2.0), NodeId::ROOT);
        assert_eq!(id, NodeId(1));
        assert_eq!(t.len(), 2);
        assert_eq!(t.extract_path(id), vec![c(0.0, 0.0), c(1.0, 2.0)]);

        let mut t = Tree::new(c(0.0, 0.0));
        let mut last = NodeId::ROOT;
        for k in 1..=3 {
            last = t.add_node(c(k as f64, 0.0), last);
        }
        for k in 1..=3 {
            assert_eq!(t.parent(NodeId(k)), Some(NodeId(k - 1)));
        }
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn add_node_rejects_foreign_parent() {
        let mut t = Tree::new(c(0.0, 0.0));
        t.add_node(c(1.0, 1.0), NodeId(5));
    }

    #[test]
    fn nearest_examples() {
        let mut t = Tree::new(c(0.0, 0.0));
        t.add_node(c(10.0, 0.0), NodeId::ROOT);
        assert_eq!(t.nearest_neighbour(c(3.0, 1.0)), NodeId(0));
        assert_eq!(t.nearest_neighbour(c(5.0, 0.0)), NodeId(0));
        assert_eq!(t.nearest_neighbour(c(7.0, 0.0)), NodeId(1));
    }

    #[test]
    fn chain_path_and_length() {
        let mut t = Tree::new(c(0.0, 0.0));
        let a = t.add_node(c(20.0, 0.0), NodeId::ROOT);
        let b = t.add_node(c(40.0, 0.0), a);
        let path = t.extract_path(b);
        assert_eq!(path, vec![c(0.0, 0.0), c(20.0, 0.0), c(40.0, 0.0)]);
        assert_eq!(path_length(&path), 40.0);
    }

    #[test]
    fn path_length_examples() {
        assert_eq!(path_length(&[c(0.0, 0.0)]), 0.0);
        assert_eq!(path_length(&[c(0.0, 0.0), c(3.0, 4.0)]), 5.0);
        assert_eq!(
            path_length(&[c(0.0, 0.0), c(20.0, 0.0), c(20.0, 15.0)]),
            35.0
        );
    }

    #[test]
    fn dump_lists_nodes_in_order() {
        let mut t = Tree::new(c(1.0, 2.0));
        t.add_node(c(3.0, 4.0), NodeId::ROOT);
        let json = serde_json::to_string(&t.dump()).unwrap();
        assert_eq!(
            json,
            r#"[{"id":0,"x":1.0,"y":2.0,"parent":null},{"id":1,"x":3.0,"y":4.0,"parent":0}]"#
        );
    }

    proptest! {
        #[test]
        fn random_trees_keep_parent_order(
            picks in prop::collection::vec((0.0..1.0f64, -50.0..50.0f64, -50.0..50.0f64), 1..200)
        ) {
            let mut t = Tree::new(c(0.0, 0.0));
            for (u, x, y) in picks {
                let parent = NodeId(((u * t.len() as f64) as usize).min(t.len() - 1));
                t.add_node(c(x, y), parent);
            }
            for (k, node) in t.nodes().iter().enumerate().skip(1) {
                prop_assert!(node.parent.unwrap().0 < k);
            }
            for k in 0..t.len() {
                let path = t.extract_path(NodeId(k));
                prop_assert!(path.len() <= t.len());
                prop_assert_eq!(path[0], t.root());
                prop_assert_eq!(*path.last().unwrap(), t.config(NodeId(k)));
                let mut rev = path.clone();
                rev.reverse();
                prop_assert!((path_length(&path) - path_length(&rev)).abs() <= 1e-9 * (1.0 + path_length(&path)));
            }
        }
    }
}
