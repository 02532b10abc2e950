//! Elementary circuit enumeration for directed graphs (Johnson's
//! algorithm), used to find counterexamples to well-foundedness in ground
//! example sets.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::ast::Value;

/// Enumerate every elementary cycle of the graph over arbitrary value
/// tuples. Each cycle is returned once, rotated so its smallest vertex
/// comes first; the result order is deterministic.
pub fn enumerate_simple_cycles(edges: &BTreeSet<(Vec<Value>, Vec<Value>)>) -> Vec<Vec<Vec<Value>>> {
    let mut verts: BTreeSet<&Vec<Value>> = BTreeSet::new();
    for (a, b) in edges {
        verts.insert(a);
        verts.insert(b);
    }
    let verts: Vec<&Vec<Value>> = verts.into_iter().collect();
    let index: BTreeMap<&Vec<Value>, usize> = verts
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, i))
        .collect();
    let mut adj = vec![BTreeSet::new(); verts.len()];
    for (a, b) in edges {
        adj[index[a]].insert(index[b]);
    }
    enumerate_cycle_indices(&adj)
        .into_iter()
        .map(|cycle| cycle.into_iter().map(|i| verts[i].clone()).collect())
        .collect()
}

/// Johnson's algorithm over an adjacency list; vertices are `0..n`.
/// Cycles are emitted with their smallest vertex first.
pub fn enumerate_cycle_indices(adj: &[BTreeSet<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut found = Vec::new();
    let mut s = 0;
    while s < n {
        // subgraph induced by vertices >= s
        let sub: Vec<BTreeSet<usize>> = adj
            .iter()
            .enumerate()
            .map(|(v, ws)| {
                if v < s {
                    BTreeSet::new()
                } else {
                    ws.iter().copied().filter(|w| *w >= s).collect()
                }
            })
            .collect();
        // least vertex of a strongly connected component with a cycle
        let sccs = tarjan_sccs(&sub);
        let candidate = sccs
            .iter()
            .filter(|scc| scc.len() > 1 || scc.iter().any(|v| sub[*v].contains(v)))
            .filter_map(|scc| scc.iter().min().copied())
            .min();
        let Some(start) = candidate else { break };
        let scc: BTreeSet<usize> = sccs
            .into_iter()
            .find(|scc| scc.contains(&start))
            .unwrap()
            .into_iter()
            .collect();
        let ak: Vec<BTreeSet<usize>> = sub
            .iter()
            .enumerate()
            .map(|(v, ws)| {
                if scc.contains(&v) {
                    ws.iter().copied().filter(|w| scc.contains(w)).collect()
                } else {
                    BTreeSet::new()
                }
            })
            .collect();
        let mut state = Johnson {
            adj: &ak,
            blocked: vec![false; n],
            block_map: vec![BTreeSet::new(); n],
            stack: Vec::new(),
            start,
            found: &mut found,
        };
        state.circuit(start);
        s = start + 1;
    }
    found
}

struct Johnson<'a> {
    adj: &'a [BTreeSet<usize>],
    blocked: Vec<bool>,
    block_map: Vec<BTreeSet<usize>>,
    stack: Vec<usize>,
    start: usize,
    found: &'a mut Vec<Vec<usize>>,
}

impl Johnson<'_> {
    fn unblock(&mut self, u: usize) {
        self.blocked[u] = false;
        let pending: Vec<usize> = self.block_map[u].iter().copied().collect();
        self.block_map[u].clear();
        for w in pending {
            if self.blocked[w] {
                self.unblock(w);
            }
        }
    }

    fn circuit(&mut self, v: usize) -> bool {
        let mut found_cycle = false;
        self.stack.push(v);
        self.blocked[v] = true;
        for w in self.adj[v].iter().copied().collect::<Vec<_>>() {
            if w == self.start {
                self.found.push(self.stack.clone());
                found_cycle = true;
            } else if !self.blocked[w] && self.circuit(w) {
                found_cycle = true;
            }
        }
        if found_cycle {
            self.unblock(v);
        } else {
            for w in self.adj[v].iter().copied() {
                self.block_map[w].insert(v);
            }
        }
        self.stack.pop();
        found_cycle
    }
}

fn tarjan_sccs(adj: &[BTreeSet<usize>]) -> Vec<Vec<usize>> {
    struct Tarjan<'a> {
        adj: &'a [BTreeSet<usize>],
        index: Vec<Option<usize>>,
        lowlink: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        counter: usize,
        sccs: Vec<Vec<usize>>,
    }

    impl Tarjan<'_> {
        fn visit(&mut self, v: usize) {
            self.index[v] = Some(self.counter);
            self.lowlink[v] = self.counter;
            self.counter += 1;
            self.stack.push(v);
            self.on_stack[v] = true;
            for w in self.adj[v].iter().copied() {
                match self.index[w] {
                    None => {
                        self.visit(w);
                        self.lowlink[v] = self.lowlink[v].min(self.lowlink[w]);
                    }
                    Some(ix) if self.on_stack[w] => {
                        self.lowlink[v] = self.lowlink[v].min(ix);
                    }
                    _ => {}
                }
            }
            if Some(self.lowlink[v]) == self.index[v] {
                let mut scc = Vec::new();
                loop {
                    let w = self.stack.pop().unwrap();
                    self.on_stack[w] = false;
                    scc.push(w);
                    if w == v {
                        break;
                    }
                }
                scc.sort_unstable();
                self.sccs.push(scc);
            }
        }
    }

    let n = adj.len();
    let mut t = Tarjan {
        adj,
        index: vec![None; n],
        lowlink: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        counter: 0,
        sccs: Vec::new(),
    };
    for v in 0..n {
        if t.index[v].is_none() {
            t.visit(v);
        }
    }
    t.sccs.sort();
    t.sccs
}
