//! Small undirected multigraphs used by graphic matroids, cut functions and covering families.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subset::Subset;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= vertices || b >= vertices) {
            return Err(Error::InvalidInput(format!("edge ({a},{b}) references a vertex >= {vertices}")));
        }
        Ok(Graph { vertices, edges })
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        Graph { vertices: n, edges }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edge indices incident to `v` (self-loops included once).
    pub fn star(&self, v: usize) -> Subset {
        Subset::from_iter(
            self.edges.iter().enumerate().filter(|(_, &(a, b))| a == v || b == v).map(|(e, _)| e),
        )
    }

    pub fn degree(&self, v: usize) -> usize {
        self.star(v).len()
    }

    /// Vertices touched by an edge subset.
    pub fn covered_vertices(&self, edges: Subset) -> Subset {
        edges.iter().fold(Subset::EMPTY, |acc, e| {
            let (a, b) = self.edges[e];
            acc.with(a).with(b)
        })
    }

    pub fn is_forest(&self, edges: Subset) -> bool {
        let mut uf = UnionFind::new(self.vertices);
        edges.iter().all(|e| {
            let (a, b) = self.edges[e];
            uf.union(a, b)
        })
    }

    pub fn is_spanning_tree(&self, edges: Subset) -> bool {
        edges.len() + 1 == self.vertices && self.is_forest(edges)
    }

    pub fn is_matching(&self, edges: Subset) -> bool {
        let mut used = Subset::EMPTY;
        for e in edges.iter() {
            let (a, b) = self.edges[e];
            if a == b || used.contains(a) || used.contains(b) {
                return false;
            }
            used = used.with(a).with(b);
        }
        true
    }

    pub fn is_perfect_matching(&self, edges: Subset) -> bool {
        self.is_matching(edges) && 2 * edges.len() == self.vertices
    }

    /// Whether the edge subset contains a path from `s` to `t`.
    pub fn connects(&self, edges: Subset, s: usize, t: usize) -> bool {
        let mut reach = Subset::singleton(s);
        loop {
            let mut grew = false;
            for e in edges.iter() {
                let (a, b) = self.edges[e];
                if reach.contains(a) != reach.contains(b) {
                    reach = reach.with(a).with(b);
                    grew = true;
                }
            }
            if !grew {
                return reach.contains(t);
            }
        }
    }

    /// Whether the edge subset is exactly a simple s–t path.
    pub fn is_st_path(&self, edges: Subset, s: usize, t: usize) -> bool {
        if s == t {
            return edges.is_empty();
        }
        let mut deg = vec![0usize; self.vertices];
        for e in edges.iter() {
            let (a, b) = self.edges[e];
            if a == b {
                return false;
            }
            deg[a] += 1;
            deg[b] += 1;
        }
        let ends_ok = deg[s] == 1 && deg[t] == 1;
        let inner_ok = (0..self.vertices).filter(|&v| v != s && v != t).all(|v| deg[v] == 0 || deg[v] == 2);
        ends_ok && inner_ok && self.is_forest(edges) && self.connects(edges, s, t)
    }
}

pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Joins the classes of `a` and `b`; false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
