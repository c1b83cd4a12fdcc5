//! Dinic's max-flow on integer capacities.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: u64,
    rev: usize,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    graph: Vec<Vec<Arc>>,
    level: Vec<u32>,
    iter: Vec<usize>,
}

const UNSEEN: u32 = u32::MAX;

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self {
            graph: vec![Vec::new(); nodes],
            level: vec![UNSEEN; nodes],
            iter: vec![0; nodes],
        }
    }

    pub fn node_count(&self) -> usize {
        self.graph.len()
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: u64) {
        let rev_from = self.graph[to].len();
        let rev_to = self.graph[from].len();
        self.graph[from].push(Arc { to, cap, rev: rev_from });
        self.graph[to].push(Arc { to: from, cap: 0, rev: rev_to });
    }

    fn bfs(&mut self, s: usize) {
        self.level.fill(UNSEEN);
        let mut queue = VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for a in &self.graph[u] {
                if a.cap > 0 && self.level[a.to] == UNSEEN {
                    self.level[a.to] = self.level[u] + 1;
                    queue.push_back(a.to);
                }
            }
        }
    }

    fn dfs(&mut self, u: usize, t: usize, limit: u64) -> u64 {
        if u == t {
            return limit;
        }
        while self.iter[u] < self.graph[u].len() {
            let i = self.iter[u];
            let Arc { to, cap, rev } = self.graph[u][i];
            if cap > 0 && self.level[u] < self.level[to] {
                let pushed = self.dfs(to, t, limit.min(cap));
                if pushed > 0 {
                    self.graph[u][i].cap -= pushed;
                    self.graph[to][rev].cap += pushed;
                    return pushed;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    /// Maximum `s`-`t` flow. The network keeps its residual capacities
    /// afterwards so the minimum cut can be read with [`Self::source_side`].
    pub fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut flow = 0;
        loop {
            self.bfs(s);
            if self.level[t] == UNSEEN {
                return flow;
            }
            self.iter.fill(0);
            loop {
                let f = self.dfs(s, t, u64::MAX);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
    }

    /// Nodes reachable from `s` through arcs with positive residual capacity.
    /// After [`Self::max_flow`] this is the source side of the minimal
    /// minimum cut.
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.graph.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for a in &self.graph[u] {
                if a.cap > 0 && !seen[a.to] {
                    seen[a.to] = true;
                    stack.push(a.to);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_network() {
        let mut net = FlowNetwork::new(6);
        net.add_arc(0, 1, 10);
        net.add_arc(0, 2, 10);
        net.add_arc(1, 3, 4);
        net.add_arc(1, 4, 8);
        net.add_arc(2, 4, 9);
        net.add_arc(3, 5, 10);
        net.add_arc(4, 3, 6);
        net.add_arc(4, 5, 10);
        assert_eq!(net.max_flow(0, 5), 19);
    }

    #[test]
    fn disconnected() {
        let mut net = FlowNetwork::new(4);
        net.add_arc(0, 1, 10);
        net.add_arc(2, 3, 5);
        assert_eq!(net.max_flow(0, 3), 0);
        assert_eq!(net.source_side(0), vec![true, true, false, false]);
    }

    #[test]
    fn cut_capacity_matches_flow() {
        let mut net = FlowNetwork::new(4);
        net.add_arc(0, 1, 3);
        net.add_arc(0, 2, 2);
        net.add_arc(1, 2, 5);
        net.add_arc(1, 3, 2);
        net.add_arc(2, 3, 3);
        assert_eq!(net.max_flow(0, 3), 5);
        let side = net.source_side(0);
        assert!(side[0] && !side[3]);
    }
}
