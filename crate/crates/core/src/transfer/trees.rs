//! Planar binary rooted trees and their signs.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PbrTree {
    Leaf,
    Node(Box<PbrTree>, Box<PbrTree>),
}

impl PbrTree {
    pub fn node(left: PbrTree, right: PbrTree) -> Self {
        PbrTree::Node(Box::new(left), Box::new(right))
    }

    pub fn leaves(&self) -> usize {
        match self {
            PbrTree::Leaf => 1,
            PbrTree::Node(l, r) => l.leaves() + r.leaves(),
        }
    }

    pub fn internal_vertices(&self) -> usize {
        self.leaves() - 1
    }

    /// Internal vertices in the two orders of the planar layout in which the
    /// root is leftmost and each left subtree is drawn below its right
    /// subtree: pre-order (horizontal, away from the root) and in-order
    /// (vertical, bottom to top). Each vertex is identified by its pre-order index.
    fn orders(&self) -> (Vec<usize>, Vec<usize>) {
        fn walk(t: &PbrTree, next: &mut usize, pre: &mut Vec<usize>, ino: &mut Vec<usize>) {
            if let PbrTree::Node(l, r) = t {
                let me = *next;
                *next += 1;
                pre.push(me);
                walk(l, next, pre, ino);
                ino.push(me);
                walk(r, next, pre, ino);
            }
        }
        let (mut pre, mut ino) = (Vec::new(), Vec::new());
        walk(self, &mut 0, &mut pre, &mut ino);
        (pre, ino)
    }
}

impl fmt::Display for PbrTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PbrTree::Leaf => write!(f, "*"),
            PbrTree::Node(l, r) => write!(f, "({l} {r})"),
        }
    }
}

/// All trees with `n` leaves, ordered by the size of the left subtree and then
/// recursively; there are Catalan(n - 1) of them.
pub fn enumerate_pbr(n: usize) -> Vec<PbrTree> {
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return alloc::vec![PbrTree::Leaf];
    }
    let mut out = Vec::new();
    for k in 1..n {
        let lefts = enumerate_pbr(k);
        let rights = enumerate_pbr(n - k);
        for l in &lefts {
            for r in &rights {
                out.push(PbrTree::node(l.clone(), r.clone()));
            }
        }
    }
    out
}

/// `σ_T(i) = v(h⁻¹(i))`: the vertical rank of the vertex with horizontal rank `i`.
pub fn sigma_permutation(t: &PbrTree) -> Vec<usize> {
    let (pre, ino) = t.orders();
    let mut vertical_rank = alloc::vec![0; ino.len()];
    for (rank, &v) in ino.iter().enumerate() {
        vertical_rank[v] = rank;
    }
    pre.iter().map(|&v| vertical_rank[v]).collect()
}

pub fn permutation_sign(p: &[usize]) -> i32 {
    let mut inversions = 0usize;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn tree_sign(t: &PbrTree) -> i32 {
    permutation_sign(&sigma_permutation(t))
}
