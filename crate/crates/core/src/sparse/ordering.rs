//! Fill-reducing ordering by recursive level-structure bisection.

use std::collections::VecDeque;

use super::SparseMatrix;

const LEAF_SIZE: usize = 48;

struct Graph {
    ptr: Vec<usize>,
    adj: Vec<usize>,
}

impl Graph {
    /// Symmetrized off-diagonal pattern.
    fn from_matrix(a: &SparseMatrix) -> Self {
        let n = a.n_rows();
        let mut deg = vec![0usize; n];
        for (i, j, _) in a.iter() {
            if i != j {
                deg[i] += 1;
                deg[j] += 1;
            }
        }
        let mut ptr = vec![0usize; n + 1];
        for i in 0..n {
            ptr[i + 1] = ptr[i] + deg[i];
        }
        let mut fill = ptr.clone();
        let mut adj = vec![0usize; ptr[n]];
        for (i, j, _) in a.iter() {
            if i != j {
                adj[fill[i]] = j;
                fill[i] += 1;
                adj[fill[j]] = i;
                fill[j] += 1;
            }
        }
        for i in 0..n {
            let row = &mut adj[ptr[i]..ptr[i + 1]];
            row.sort_unstable();
        }
        // drop duplicates created by storing both (i, j) and (j, i)
        let mut out_ptr = vec![0usize; n + 1];
        let mut out = Vec::with_capacity(adj.len() / 2);
        for i in 0..n {
            let mut prev = usize::MAX;
            for &j in &adj[ptr[i]..ptr[i + 1]] {
                if j != prev {
                    out.push(j);
                    prev = j;
                }
            }
            out_ptr[i + 1] = out.len();
        }
        Graph { ptr: out_ptr, adj: out }
    }

    fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.ptr[v]..self.ptr[v + 1]]
    }
}

struct Dissector<'g> {
    g: &'g Graph,
    /// Id of the subset a node currently belongs to.
    owner: Vec<usize>,
    level: Vec<usize>,
    seen: Vec<usize>,
    stamp: usize,
    next_owner: usize,
    order: Vec<usize>,
}

impl<'g> Dissector<'g> {
    fn bfs(&mut self, root: usize, set: usize, levels: &mut Vec<Vec<usize>>) {
        self.stamp += 1;
        levels.clear();
        let mut queue = VecDeque::new();
        queue.push_back(root);
        self.seen[root] = self.stamp;
        self.level[root] = 0;
        while let Some(v) = queue.pop_front() {
            let l = self.level[v];
            if levels.len() <= l {
                levels.push(Vec::new());
            }
            levels[l].push(v);
            for &w in self.g.neighbors(v) {
                if self.owner[w] == set && self.seen[w] != self.stamp {
                    self.seen[w] = self.stamp;
                    self.level[w] = l + 1;
                    queue.push_back(w);
                }
            }
        }
    }

    fn assign(&mut self, nodes: &[usize]) -> usize {
        let id = self.next_owner;
        self.next_owner += 1;
        for &v in nodes {
            self.owner[v] = id;
        }
        id
    }

    fn dissect(&mut self, nodes: Vec<usize>) {
        if nodes.len() <= LEAF_SIZE {
            self.order.extend_from_slice(&nodes);
            return;
        }
        let set = self.assign(&nodes);
        let mut levels = Vec::new();
        self.bfs(nodes[0], set, &mut levels);
        let reached: usize = levels.iter().map(Vec::len).sum();
        if reached < nodes.len() {
            // disconnected: split off the first component
            let comp: Vec<usize> = levels.concat();
            let stamp = self.stamp;
            let rest: Vec<usize> = nodes.iter().copied().filter(|&v| self.seen[v] != stamp).collect();
            self.dissect(comp);
            self.dissect(rest);
            return;
        }
        // pseudo-peripheral root: restart from a min-degree node of the last level
        let mut root = nodes[0];
        for _ in 0..4 {
            let last = levels.last().unwrap();
            let cand = *last.iter().min_by_key(|&&v| (self.g.neighbors(v).len(), v)).unwrap();
            let mut trial = Vec::new();
            self.bfs(cand, set, &mut trial);
            if trial.len() > levels.len() {
                root = cand;
                levels = trial;
            } else {
                break;
            }
        }
        // leave `self.level` consistent with `levels`
        self.bfs(root, set, &mut levels);
        if levels.len() < 3 {
            self.order.extend_from_slice(&nodes);
            return;
        }
        let half = nodes.len() / 2;
        let mut acc = 0;
        let mut mid = 1;
        for (l, lv) in levels.iter().enumerate() {
            acc += lv.len();
            if acc >= half {
                mid = l.clamp(1, levels.len() - 2);
                break;
            }
        }
        let mut part_a: Vec<usize> = levels[..mid].concat();
        let part_b: Vec<usize> = levels[mid + 1..].concat();
        let mut separator = Vec::with_capacity(levels[mid].len());
        for &v in &levels[mid] {
            let touches_b = self.g.neighbors(v).iter().any(|&w| self.owner[w] == set && self.level[w] == mid + 1);
            if touches_b {
                separator.push(v);
            } else {
                part_a.push(v);
            }
        }
        self.dissect(part_a);
        self.dissect(part_b);
        self.order.extend_from_slice(&separator);
    }
}

/// Nested-dissection permutation of a square matrix's symmetrized graph.
/// Returns `perm` with `perm[new] = old`. Purely structural, hence
/// deterministic.
pub fn nested_dissection(a: &SparseMatrix) -> Vec<usize> {
    let n = a.n_rows();
    let g = Graph::from_matrix(a);
    let mut d = Dissector {
        g: &g,
        owner: vec![usize::MAX; n],
        level: vec![0; n],
        seen: vec![0; n],
        stamp: 0,
        next_owner: 0,
        order: Vec::with_capacity(n),
    };
    d.dissect((0..n).collect());
    d.order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_laplacian(m: usize) -> SparseMatrix {
        let idx = |i: usize, j: usize| i * m + j;
        let mut t = Vec::new();
        for i in 0..m {
            for j in 0..m {
                t.push((idx(i, j), idx(i, j), 4.0));
                if i + 1 < m {
                    t.push((idx(i, j), idx(i + 1, j), -1.0));
                    t.push((idx(i + 1, j), idx(i, j), -1.0));
                }
                if j + 1 < m {
                    t.push((idx(i, j), idx(i, j + 1), -1.0));
                    t.push((idx(i, j + 1), idx(i, j), -1.0));
                }
            }
        }
        SparseMatrix::from_triplets(m * m, m * m, t).unwrap()
    }

    #[test]
    fn is_a_permutation() {
        let a = grid_laplacian(30);
        let p = nested_dissection(&a);
        let mut sorted = p.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..900).collect::<Vec<_>>());
        assert_eq!(p, nested_dissection(&a));
    }

    #[test]
    fn handles_disconnected_and_diagonal_graphs() {
        let p = nested_dissection(&SparseMatrix::identity(200));
        assert_eq!(p.len(), 200);
        let mut s = p.clone();
        s.sort_unstable();
        assert_eq!(s, (0..200).collect::<Vec<_>>());
    }
}
