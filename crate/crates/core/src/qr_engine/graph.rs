//! Schedules restricted to the edges of a qubit coupling graph.

use std::collections::{BTreeSet, VecDeque};

use super::{finish, Eliminator, RotationSchedule};
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, Real};

/// Simple undirected graph on `0..n_nodes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CouplingGraph {
    n_nodes: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl CouplingGraph {
    pub fn new(n_nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop on node {a}")));
            }
            let hi = a.max(b);
            if hi >= n_nodes {
                return Err(Error::IndexOutOfRange { index: hi, dim: n_nodes });
            }
            set.insert((a.min(b), hi));
        }
        Ok(Self { n_nodes, edges: set })
    }

    pub fn line(n: usize) -> Self {
        Self::new(n, (1..n).map(|k| (k - 1, k))).expect("valid line graph")
    }

    /// Hub `0` joined to every other node.
    pub fn star(n: usize) -> Self {
        Self::new(n, (1..n).map(|k| (0, k))).expect("valid star graph")
    }

    /// Five qubits shaped like a T: `0 - 1 - 3 - 4` with `2` hanging off `1`.
    pub fn t_graph() -> Self {
        Self::new(5, [(0, 1), (1, 2), (1, 3), (3, 4)]).expect("valid T graph")
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    fn neighbors_in(&self, v: usize, active: &BTreeSet<usize>) -> Vec<usize> {
        active.iter().copied().filter(|&u| u != v && self.has_edge(u, v)).collect()
    }

    fn connected_without(&self, active: &BTreeSet<usize>, removed: Option<usize>) -> bool {
        let nodes: BTreeSet<usize> = active.iter().copied().filter(|&v| Some(v) != removed).collect();
        let Some(&start) = nodes.iter().next() else { return true };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for u in self.neighbors_in(v, &nodes) {
                if seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        seen.len() == nodes.len()
    }

    pub fn is_connected(&self) -> bool {
        self.connected_without(&(0..self.n_nodes).collect(), None)
    }
}

/// For each row pick a pivot whose removal keeps the active graph connected (lowest degree,
/// then lowest index), grow a BFS tree from it and fold leaves into their parents wave by wave.
pub fn schedule_graph_constrained<T: Real>(q: &ComplexMatrix<T>, g: &CouplingGraph) -> Result<RotationSchedule<T>> {
    let (r, n) = (q.rows(), q.cols());
    if g.n_nodes() != n {
        return Err(Error::ShapeMismatch(format!("graph has {} nodes for {} modes", g.n_nodes(), n)));
    }
    if !g.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    let mut active: BTreeSet<usize> = (0..n).collect();
    let mut el = Eliminator::new(q.clone());
    let mut pivots = Vec::with_capacity(r);
    for i in 0..r {
        let pivot = active
            .iter()
            .copied()
            .filter(|&v| g.connected_without(&active, Some(v)))
            .min_by_key(|&v| (g.neighbors_in(v, &active).len(), v))
            .expect("a finite connected graph has a non-cut vertex");

        let mut parent = vec![usize::MAX; n];
        let mut children = vec![0usize; n];
        let mut tree = BTreeSet::from([pivot]);
        let mut queue = VecDeque::from([pivot]);
        while let Some(v) = queue.pop_front() {
            for u in g.neighbors_in(v, &active) {
                if tree.insert(u) {
                    parent[u] = v;
                    children[v] += 1;
                    queue.push_back(u);
                }
            }
        }

        while tree.len() > 1 {
            let mut wave: Vec<usize> = tree.iter().copied().filter(|&v| v != pivot && children[v] == 0).collect();
            wave.sort_by_key(|&v| (v.min(parent[v]), v.max(parent[v])));
            for v in wave {
                el.kill(i, v, parent[v], v)?;
                children[parent[v]] -= 1;
                tree.remove(&v);
            }
        }
        active.remove(&pivot);
        pivots.push(pivot);
    }
    finish(q, &el.seq, pivots, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::random_orthonormal_rows;
    use crate::qr_engine::{schedule_sameh_kuck, verify_schedule};
    use proptest::prelude::*;

    #[test]
    fn line_graph_matches_nearest_neighbour() {
        for (r, n, seed) in [(1, 4, 0), (3, 5, 1), (2, 7, 2), (4, 6, 3)] {
            let q = random_orthonormal_rows::<f64>(r, n, seed);
            let a = schedule_graph_constrained(&q, &CouplingGraph::line(n)).unwrap();
            let b = schedule_sameh_kuck(&q, false).unwrap();
            assert_eq!(a.rounds, b.rounds);
            assert_eq!(a.pivots, b.pivots);
        }
    }

    #[test]
    fn t_graph_zero_filling_order() {
        let q = random_orthonormal_rows::<f64>(3, 5, 11);
        let g = CouplingGraph::t_graph();
        let s = schedule_graph_constrained(&q, &g).unwrap();
        assert_eq!(s.pivots, vec![0, 2, 1]);
        assert!(s.rotations().all(|r| g.has_edge(r.l1, r.l2)));
        let pairs: Vec<Vec<(usize, usize)>> =
            s.rounds.iter().map(|r| r.iter().map(|g| (g.l1, g.l2)).collect()).collect();
        assert_eq!(
            pairs,
            vec![
                vec![(1, 2), (3, 4)],
                vec![(1, 3)],
                vec![(0, 1), (3, 4)],
                vec![(1, 3)],
                vec![(1, 2), (3, 4)],
                vec![(1, 3)],
            ]
        );
        assert!(verify_schedule(&q, &s).unwrap().residual < 1e-9);
    }

    #[test]
    fn star_rotations_touch_hub() {
        let q = random_orthonormal_rows::<f64>(2, 5, 5);
        let s = schedule_graph_constrained(&q, &CouplingGraph::star(5)).unwrap();
        assert!(s.rotations().all(|g| g.touches(0)));
        assert!(verify_schedule(&q, &s).unwrap().residual < 1e-9);
    }

    #[test]
    fn disconnected_is_rejected() {
        let q = random_orthonormal_rows::<f64>(1, 4, 5);
        let g = CouplingGraph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(schedule_graph_constrained(&q, &g), Err(Error::DisconnectedGraph)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn random_trees(n in 2usize..10, rfrac in 0.0..1.0f64, seed in 0u64..100_000, parents in proptest::collection::vec(0.0..1.0f64, 9)) {
            let r = 1 + ((n - 1) as f64 * rfrac) as usize;
            let edges: Vec<(usize, usize)> = (1..n).map(|v| ((parents[v - 1] * v as f64) as usize, v)).collect();
            let g = CouplingGraph::new(n, edges).unwrap();
            let q = random_orthonormal_rows::<f64>(r, n, seed);
            let s = schedule_graph_constrained(&q, &g).unwrap();
            let c = verify_schedule(&q, &s).unwrap();
            prop_assert!(c.residual <= 1e-9);
            prop_assert!(c.reopened <= 1e-10);
            prop_assert!(s.rotations().all(|x| g.has_edge(x.l1, x.l2)));
            prop_assert!(s.rotation_count() <= n * r);
        }
    }
}
