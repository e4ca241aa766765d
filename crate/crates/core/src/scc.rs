//! Compressed adjacency plus an iterative Tarjan pass.
//!
//! The solver runs this on literal digraphs with up to ~10^7 nodes, so the
//! DFS keeps its own explicit stack (no recursion) and node ids are u32.

/// Immutable compressed sparse row adjacency.
#[derive(Debug, Clone)]
pub struct Csr {
    n: usize,
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Csr {
    /// Build from an arc list. Arcs may be in any order; duplicates are kept.
    pub fn from_arcs(n: usize, arcs: &[(u32, u32)]) -> Csr {
        let mut offsets = vec![0u32; n + 1];
        for &(u, _) in arcs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut targets = vec![0u32; arcs.len()];
        let mut cursor = offsets.clone();
        for &(u, v) in arcs {
            let slot = cursor[u as usize];
            targets[slot as usize] = v;
            cursor[u as usize] += 1;
        }
        Csr {
            n,
            offsets,
            targets,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn out(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }
}

/// Strongly connected components of a digraph.
///
/// `comp[v]` is the component id of node `v`. Ids follow Tarjan's emission
/// order, which is a reverse topological order of the condensation: if there
/// is an arc from component X to component Y ≠ X, then `Y < X`.
#[derive(Debug, Clone)]
pub struct SccResult {
    pub comp: Vec<u32>,
    pub count: usize,
}

impl SccResult {
    /// Component members grouped by id (each inner list ascending).
    pub fn groups(&self) -> Vec<Vec<u32>> {
        let mut groups = vec![Vec::new(); self.count];
        for (v, &c) in self.comp.iter().enumerate() {
            groups[c as usize].push(v as u32);
        }
        groups
    }
}

const UNVISITED: u32 = u32::MAX;

/// Single-pass iterative Tarjan.
pub fn tarjan(csr: &Csr) -> SccResult {
    let n = csr.node_count();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut comp = vec![UNVISITED; n];
    let mut next_index = 0u32;
    let mut count = 0u32;
    // (node, position of the next out-arc to examine)
    let mut work: Vec<(u32, u32)> = Vec::new();

    for root in 0..n as u32 {
        if index[root as usize] != UNVISITED {
            continue;
        }
        work.push((root, 0));
        while let Some(frame) = work.last_mut() {
            let v = frame.0 as usize;
            if frame.1 == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(frame.0);
                on_stack[v] = true;
            }
            let succ = csr.out(v);
            if (frame.1 as usize) < succ.len() {
                let w = succ[frame.1 as usize] as usize;
                frame.1 += 1;
                if index[w] == UNVISITED {
                    work.push((w as u32, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                let closed = frame.0;
                work.pop();
                if let Some(parent) = work.last() {
                    let p = parent.0 as usize;
                    low[p] = low[p].min(low[closed as usize]);
                }
                if low[closed as usize] == index[closed as usize] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w as usize] = false;
                        comp[w as usize] = count;
                        if w == closed {
                            break;
                        }
                    }
                    count += 1;
                }
            }
        }
    }
    SccResult {
        comp,
        count: count as usize,
    }
}
