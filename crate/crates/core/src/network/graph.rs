use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Undirected weighted graph without self-loops. Edges are stored with
/// `i < j`, sorted, and without duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n_agents: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl Graph {
    pub fn new(n_agents: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n_agents == 0 {
            return Err(Error::InvalidGraph("graph needs at least one agent".into()));
        }
        let mut list = Vec::new();
        for (a, b, weight) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at {a}")));
            }
            let (i, j) = (a.min(b), a.max(b));
            if j >= n_agents {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for {n_agents} agents"
                )));
            }
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) has non-positive or non-finite weight {weight}"
                )));
            }
            list.push(Edge { i, j, weight });
        }
        list.sort_by_key(|e| (e.i, e.j));
        if let Some(w) = list.windows(2).find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j)) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                w[0].i, w[0].j
            )));
        }
        let mut adjacency = vec![Vec::new(); n_agents];
        for e in &list {
            adjacency[e.i].push((e.j, e.weight));
            adjacency[e.j].push((e.i, e.weight));
        }
        Ok(Self {
            n_agents,
            edges: list,
            adjacency,
        })
    }

    pub fn empty(n_agents: usize) -> Result<Self> {
        Self::new(n_agents, [])
    }

    pub fn complete(n_agents: usize) -> Result<Self> {
        let edges = (0..n_agents).flat_map(|i| (i + 1..n_agents).map(move |j| (i, j, 1.0)));
        Self::new(n_agents, edges)
    }

    pub fn path(n_agents: usize) -> Result<Self> {
        Self::new(n_agents, (1..n_agents).map(|j| (j - 1, j, 1.0)))
    }

    pub fn ring(n_agents: usize) -> Result<Self> {
        let mut edges: Vec<_> = (1..n_agents).map(|j| (j - 1, j, 1.0)).collect();
        if n_agents > 2 {
            edges.push((0, n_agents - 1, 1.0));
        }
        Self::new(n_agents, edges)
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `i` with their edge weights.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    /// Edge set union; weights of shared edges are taken from `self`.
    pub fn union(&self, other: &Graph) -> Result<Graph> {
        if self.n_agents != other.n_agents {
            return Err(Error::DimensionMismatch {
                expected: self.n_agents,
                found: other.n_agents,
            });
        }
        let mut edges: Vec<_> = self.edges.iter().map(|e| (e.i, e.j, e.weight)).collect();
        for e in &other.edges {
            if !self.has_edge(e.i, e.j) {
                edges.push((e.i, e.j, e.weight));
            }
        }
        Graph::new(self.n_agents, edges)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency
            .get(a)
            .is_some_and(|n| n.iter().any(|(k, _)| *k == b))
    }

    /// Union-find over the edge list.
    pub fn is_connected(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.n_agents).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = self.n_agents;
        for e in &self.edges {
            let (ri, rj) = (find(&mut parent, e.i), find(&mut parent, e.j));
            if ri != rj {
                parent[ri] = rj;
                components -= 1;
            }
        }
        components == 1
    }

    /// Weighted Laplacian as a dense row-major matrix.
    pub fn laplacian(&self) -> Vec<Vec<f64>> {
        let n = self.n_agents;
        let mut l = vec![vec![0.0; n]; n];
        for e in &self.edges {
            l[e.i][e.j] -= e.weight;
            l[e.j][e.i] -= e.weight;
            l[e.i][e.i] += e.weight;
            l[e.j][e.j] += e.weight;
        }
        l
    }
}

/// Free-function form of [`Graph::is_connected`].
pub fn is_connected(g: &Graph) -> bool {
    g.is_connected()
}
