//! Exhaustive generation of rooted non-plane binary trees.

use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RootedTree {
    /// Canonical string: `L` for a leaf, `(ab)` for a node with children
    /// `a <= b` in string order.
    pub canon: String,
    pub height: u32,
}

/// All trees with `1..=n_max` leaves; element `n` holds the trees of size `n`.
pub fn all_rooted_trees(n_max: usize) -> Vec<Vec<RootedTree>> {
    let mut by_size: Vec<Vec<RootedTree>> = vec![Vec::new(); n_max + 1];
    if n_max >= 1 {
        by_size[1].push(RootedTree { canon: "L".into(), height: 0 });
    }
    for n in 2..=n_max {
        let mut set = BTreeSet::new();
        for i in 1..n {
            for a in &by_size[i] {
                for b in &by_size[n - i] {
                    let (lo, hi) = if a.canon <= b.canon { (a, b) } else { (b, a) };
                    set.insert(RootedTree {
                        canon: format!("({}{})", lo.canon, hi.canon),
                        height: 1 + a.height.max(b.height),
                    });
                }
            }
        }
        by_size[n] = set.into_iter().collect();
    }
    by_size
}

/// Number of trees of size `n` with each height, indexed by height.
pub fn height_histogram(trees: &[RootedTree]) -> Vec<u64> {
    let max_h = trees.iter().map(|t| t.height).max().unwrap_or(0) as usize;
    let mut hist = vec![0u64; max_h + 1];
    for t in trees {
        hist[t.height as usize] += 1;
    }
    hist
}
