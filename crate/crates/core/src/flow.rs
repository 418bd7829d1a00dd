//! Exact max-flow (Edmonds–Karp on integers) and min-cost flow (successive shortest paths on rationals).

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::rational::Rational;

/// Dense residual network; fine for the few dozen nodes used here.
pub struct MaxFlow {
    n: usize,
    cap: Vec<Vec<BigInt>>,
}

impl MaxFlow {
    pub fn new(n: usize) -> Self {
        MaxFlow { n, cap: vec![vec![BigInt::zero(); n]; n] }
    }

    pub fn add_edge(&mut self, a: usize, b: usize, c: &BigInt) {
        self.cap[a][b] += c;
    }

    pub fn add_undirected(&mut self, a: usize, b: usize, c: &BigInt) {
        self.cap[a][b] += c;
        self.cap[b][a] += c;
    }

    pub fn run(&mut self, s: usize, t: usize) -> BigInt {
        let mut total = BigInt::zero();
        if s == t {
            return total;
        }
        loop {
            let mut prev = vec![usize::MAX; self.n];
            prev[s] = s;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for v in 0..self.n {
                    if prev[v] == usize::MAX && self.cap[u][v].is_positive() {
                        prev[v] = u;
                        queue.push_back(v);
                    }
                }
            }
            if prev[t] == usize::MAX {
                return total;
            }
            let mut bottleneck: Option<BigInt> = None;
            let mut v = t;
            while v != s {
                let u = prev[v];
                let c = &self.cap[u][v];
                if bottleneck.as_ref().is_none_or(|b| c < b) {
                    bottleneck = Some(c.clone());
                }
                v = u;
            }
            let b = bottleneck.expect("path has an edge");
            let mut v = t;
            while v != s {
                let u = prev[v];
                self.cap[u][v] -= &b;
                self.cap[v][u] += &b;
                v = u;
            }
            total += b;
        }
    }

    /// Nodes reachable from `s` in the residual network.
    pub fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for v in 0..self.n {
                if !seen[v] && self.cap[u][v].is_positive() {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

struct Arc {
    to: usize,
    cap: i64,
    cost: Rational,
}

/// Min-cost flow with exact rational costs. Negative arc costs are allowed as
/// long as the initial network has no negative cycle.
pub struct MinCostFlow {
    n: usize,
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl MinCostFlow {
    pub fn new(n: usize) -> Self {
        MinCostFlow { n, arcs: Vec::new(), adj: vec![Vec::new(); n] }
    }

    /// Returns the arc id; its reverse is `id ^ 1`.
    pub fn add_arc(&mut self, a: usize, b: usize, cap: i64, cost: Rational) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to: b, cap, cost: cost.clone() });
        self.arcs.push(Arc { to: a, cap: 0, cost: -cost });
        self.adj[a].push(id);
        self.adj[b].push(id + 1);
        id
    }

    pub fn flow_on(&self, id: usize) -> i64 {
        self.arcs[id ^ 1].cap
    }

    /// Pushes up to `want` units from s to t along successive cheapest paths.
    /// Returns (units pushed, total cost).
    pub fn run(&mut self, s: usize, t: usize, want: i64) -> (i64, Rational) {
        let mut pushed = 0;
        let mut cost = Rational::zero();
        while pushed < want {
            // Bellman–Ford: the residual graph never has negative cycles here.
            let mut dist: Vec<Option<Rational>> = vec![None; self.n];
            let mut via = vec![usize::MAX; self.n];
            dist[s] = Some(Rational::zero());
            for _ in 0..self.n {
                let mut changed = false;
                for u in 0..self.n {
                    let Some(du) = dist[u].clone() else { continue };
                    for &id in &self.adj[u] {
                        let a = &self.arcs[id];
                        if a.cap <= 0 {
                            continue;
                        }
                        let cand = &du + &a.cost;
                        if dist[a.to].as_ref().is_none_or(|d| &cand < d) {
                            dist[a.to] = Some(cand);
                            via[a.to] = id;
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            let Some(dt) = dist[t].clone() else { break };
            let mut amount = want - pushed;
            let mut v = t;
            while v != s {
                let id = via[v];
                amount = amount.min(self.arcs[id].cap);
                v = self.arcs[id ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let id = via[v];
                self.arcs[id].cap -= amount;
                self.arcs[id ^ 1].cap += amount;
                v = self.arcs[id ^ 1].to;
            }
            pushed += amount;
            cost += dt * Rational::from_integer(amount.into());
        }
        (pushed, cost)
    }

    /// Nodes that can still reach `t` in the residual network.
    pub fn can_reach(&self, t: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[t] = true;
        let mut stack = vec![t];
        while let Some(v) = stack.pop() {
            // Residual arc u→v exists iff the arc stored at adj[v] with reverse id has capacity.
            for &id in &self.adj[v] {
                let back = id ^ 1;
                let u = self.arcs[id].to;
                if !seen[u] && self.arcs[back].cap > 0 {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }
}
