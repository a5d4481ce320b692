//! Exhaustive generation of unrooted trees whose nodes have degree 1 or 3.
//!
//! Trees with `n + 1` leaves are obtained from trees with `n` leaves by
//! subdividing an edge and hanging a new leaf on the subdivision vertex.
//! Duplicates are removed by a centre-based canonical form.

use std::collections::{BTreeMap, VecDeque};

#[derive(Clone, Debug)]
pub struct UnrootedTree {
    pub adj: Vec<Vec<usize>>,
}

impl UnrootedTree {
    fn single_edge() -> Self {
        UnrootedTree { adj: vec![vec![1], vec![0]] }
    }

    pub fn leaves(&self) -> usize {
        self.adj.iter().filter(|a| a.len() == 1).count()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, nbrs) in self.adj.iter().enumerate() {
            for &v in nbrs {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    fn with_leaf_on_edge(&self, (u, v): (usize, usize)) -> Self {
        let mut adj = self.adj.clone();
        let mid = adj.len();
        let leaf = mid + 1;
        for x in adj[u].iter_mut() {
            if *x == v {
                *x = mid;
            }
        }
        for x in adj[v].iter_mut() {
            if *x == u {
                *x = mid;
            }
        }
        adj.push(vec![u, v, leaf]);
        adj.push(vec![mid]);
        UnrootedTree { adj }
    }

    fn distances_from(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.adj.len()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Longest path length, by brute force over all sources.
    pub fn diameter(&self) -> usize {
        (0..self.adj.len())
            .map(|s| *self.distances_from(s).iter().max().unwrap())
            .max()
            .unwrap()
    }

    fn encode(&self, v: usize, parent: usize) -> String {
        let mut parts: Vec<String> = self.adj[v]
            .iter()
            .filter(|&&w| w != parent)
            .map(|&w| self.encode(w, v))
            .collect();
        parts.sort();
        format!("({})", parts.concat())
    }

    fn centres(&self) -> Vec<usize> {
        let n = self.adj.len();
        let mut degree: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        let mut removed = vec![false; n];
        let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
        let mut remaining = n;
        while remaining > 2 {
            remaining -= layer.len();
            let mut next = Vec::new();
            for &v in &layer {
                removed[v] = true;
                for &w in &self.adj[v] {
                    if !removed[w] {
                        degree[w] -= 1;
                        if degree[w] == 1 {
                            next.push(w);
                        }
                    }
                }
            }
            layer = next;
        }
        (0..n).filter(|&v| !removed[v]).collect()
    }

    pub fn canonical(&self) -> String {
        match self.centres().as_slice() {
            [c] => self.encode(*c, usize::MAX),
            [a, b] => {
                let mut pair = [self.encode(*a, *b), self.encode(*b, *a)];
                pair.sort();
                format!("{}|{}", pair[0], pair[1])
            }
            other => panic!("a tree has one or two centres, found {}", other.len()),
        }
    }
}

/// All trees with `2..=n_max` leaves; element `n` holds the trees with `n`
/// leaves (elements 0 and 1 are empty).
pub fn all_unrooted_trees(n_max: usize) -> Vec<Vec<UnrootedTree>> {
    let mut by_size: Vec<Vec<UnrootedTree>> = vec![Vec::new(); n_max + 1];
    if n_max < 2 {
        return by_size;
    }
    by_size[2].push(UnrootedTree::single_edge());
    for n in 3..=n_max {
        let mut seen: BTreeMap<String, UnrootedTree> = BTreeMap::new();
        for t in &by_size[n - 1] {
            for e in t.edges() {
                let grown = t.with_leaf_on_edge(e);
                seen.entry(grown.canonical()).or_insert(grown);
            }
        }
        by_size[n] = seen.into_values().collect();
    }
    by_size
}

/// Number of trees with each diameter, indexed by diameter.
pub fn diameter_histogram(trees: &[UnrootedTree]) -> Vec<u64> {
    let mut hist = Vec::new();
    for t in trees {
        let d = t.diameter();
        if hist.len() <= d {
            hist.resize(d + 1, 0);
        }
        hist[d] += 1;
    }
    hist
}
