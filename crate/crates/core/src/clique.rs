//! Exact maximum clique by branch and bound over bitset candidate sets with
//! greedy-coloring upper bounds.
//!
//! The search runs in two passes. The first finds the clique number,
//! splitting the root into independent branches that run in parallel and
//! share only a monotone best-size bound. The second pass is sequential and
//! returns the lexicographically least clique of that size, so the reported
//! witness does not depend on scheduling.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;

use crate::bits::BitSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueResult {
    /// Original vertex indices, increasing.
    pub clique: Vec<usize>,
    /// False when the node budget ran out before optimality was proven.
    pub exact: bool,
    pub nodes_explored: u64,
}

impl CliqueResult {
    pub fn size(&self) -> usize {
        self.clique.len()
    }
}

/// A graph induced on a subset of vertices, re-indexed `0..len` in the
/// order given by `order`.
struct Induced {
    order: Vec<usize>,
    adj: Vec<BitSet>,
}

impl Induced {
    fn new(adj: &[BitSet], order: Vec<usize>) -> Self {
        let mut position = vec![usize::MAX; adj.len()];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        let m = order.len();
        let rows = order
            .iter()
            .map(|&v| {
                let mut row = BitSet::new(m);
                for u in adj[v].iter() {
                    if position[u] != usize::MAX {
                        row.insert(position[u]);
                    }
                }
                row
            })
            .collect();
        Induced { order, adj: rows }
    }

    fn len(&self) -> usize {
        self.order.len()
    }
}

/// Ordering by repeatedly removing a minimum-degree vertex; the removal
/// sequence is reversed so dense cores come first.
fn degeneracy_order(adj: &[BitSet], vertices: &BitSet) -> Vec<usize> {
    let mut alive = vertices.clone();
    let mut degree: Vec<usize> = (0..adj.len())
        .map(|v| {
            if alive.contains(v) {
                adj[v].intersection_len(&alive)
            } else {
                0
            }
        })
        .collect();
    let mut removed = Vec::with_capacity(vertices.len());
    while let Some(v) = alive.iter().min_by_key(|&v| (degree[v], v)) {
        alive.remove(v);
        for u in adj[v].iter() {
            if alive.contains(u) {
                degree[u] -= 1;
            }
        }
        removed.push(v);
    }
    removed.reverse();
    removed
}

/// Greedy sequential coloring of `p` in index order. Returns vertices
/// sorted by color with the color (1-based) of each.
fn color_sort(adj: &[BitSet], p: &BitSet, order: &mut Vec<usize>, colors: &mut Vec<usize>) {
    order.clear();
    colors.clear();
    let mut uncolored = p.clone();
    let mut color = 0;
    while !uncolored.is_empty() {
        color += 1;
        let mut q = uncolored.clone();
        while let Some(v) = q.first() {
            q.remove(v);
            q.difference_with(&adj[v]);
            uncolored.remove(v);
            order.push(v);
            colors.push(color);
        }
    }
}

fn color_bound(adj: &[BitSet], p: &BitSet) -> usize {
    let mut uncolored = p.clone();
    let mut color = 0;
    while !uncolored.is_empty() {
        color += 1;
        let mut q = uncolored.clone();
        while let Some(v) = q.first() {
            q.remove(v);
            q.difference_with(&adj[v]);
            uncolored.remove(v);
        }
    }
    color
}

struct Shared {
    best: AtomicUsize,
    best_clique: Mutex<Vec<usize>>,
    nodes: AtomicU64,
    budget: u64,
    aborted: AtomicBool,
}

impl Shared {
    fn tick(&self) -> bool {
        if self.aborted.load(Ordering::Relaxed) {
            return false;
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.aborted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    fn offer(&self, clique: &[usize]) {
        let mut guard = self.best_clique.lock().expect("lock poisoned");
        if clique.len() > guard.len() {
            *guard = clique.to_vec();
            self.best.fetch_max(clique.len(), Ordering::SeqCst);
        }
    }
}

fn expand(g: &Induced, shared: &Shared, clique: &mut Vec<usize>, mut p: BitSet) {
    if !shared.tick() {
        return;
    }
    let mut order = Vec::with_capacity(p.len());
    let mut colors = Vec::with_capacity(p.len());
    color_sort(&g.adj, &p, &mut order, &mut colors);
    for i in (0..order.len()).rev() {
        if clique.len() + colors[i] <= shared.best.load(Ordering::Relaxed) {
            return;
        }
        let v = order[i];
        clique.push(v);
        let next = p.intersection(&g.adj[v]);
        if next.is_empty() {
            if clique.len() > shared.best.load(Ordering::Relaxed) {
                shared.offer(clique);
            }
        } else {
            expand(g, shared, clique, next);
        }
        clique.pop();
        if shared.aborted.load(Ordering::Relaxed) {
            return;
        }
        p.remove(v);
    }
}

fn greedy_clique(g: &Induced) -> Vec<usize> {
    let mut clique = Vec::new();
    let mut p = BitSet::full(g.len());
    while let Some(v) = p.first() {
        clique.push(v);
        p.intersect_with(&g.adj[v]);
    }
    clique
}

/// Maximum clique of the subgraph of `adj` induced by `vertices`.
///
/// `adj` must be symmetric and irreflexive. `seed` is any known clique
/// inside `vertices` (possibly empty) used as the starting lower bound. At
/// most `budget` search nodes are expanded across both passes.
pub fn max_clique(adj: &[BitSet], vertices: &BitSet, seed: &[usize], budget: u64) -> CliqueResult {
    let g = Induced::new(adj, degeneracy_order(adj, vertices));
    let mut start = greedy_clique(&g);
    if seed.len() > start.len() {
        let mut position = vec![usize::MAX; adj.len()];
        for (i, &v) in g.order.iter().enumerate() {
            position[v] = i;
        }
        start = seed.iter().map(|&v| position[v]).collect();
        assert!(
            start.iter().all(|&i| i != usize::MAX),
            "seed clique lies outside the vertex set"
        );
    }
    let seed = start;
    let shared = Shared {
        best: AtomicUsize::new(seed.len()),
        best_clique: Mutex::new(seed),
        nodes: AtomicU64::new(0),
        budget,
        aborted: AtomicBool::new(false),
    };

    // Root branch i holds vertex i together with neighbours of lower index.
    (0..g.len()).into_par_iter().rev().for_each(|i| {
        if shared.aborted.load(Ordering::Relaxed) {
            return;
        }
        let mut p = g.adj[i].clone();
        p.intersect_with(&BitSet::prefix(g.len(), i));
        if p.len() < shared.best.load(Ordering::Relaxed) {
            return;
        }
        let mut clique = vec![i];
        if p.is_empty() {
            shared.offer(&clique);
        } else {
            expand(&g, &shared, &mut clique, p);
        }
    });

    let found: Vec<usize> = shared.best_clique.into_inner().expect("lock poisoned");
    let mut nodes = shared.nodes.load(Ordering::SeqCst);
    let exact = !shared.aborted.load(Ordering::SeqCst);
    let mut witness: Vec<usize> = found.iter().map(|&i| g.order[i]).collect();
    witness.sort_unstable();

    if exact {
        let size = witness.len();
        let remaining = budget.saturating_sub(nodes);
        if let Some((lex, used)) = lex_least_clique(adj, vertices, size, remaining) {
            witness = lex;
            nodes += used;
        } else {
            nodes = budget;
        }
    }
    CliqueResult {
        clique: witness,
        exact,
        nodes_explored: nodes,
    }
}

/// Lexicographically least clique of exactly `size` vertices, searching in
/// increasing vertex order. `None` if the budget runs out first.
pub fn lex_least_clique(
    adj: &[BitSet],
    vertices: &BitSet,
    size: usize,
    budget: u64,
) -> Option<(Vec<usize>, u64)> {
    let g = Induced::new(adj, vertices.iter().collect());
    let mut nodes = 0u64;
    let mut chosen = Vec::with_capacity(size);
    let found = lex_search(
        &g,
        BitSet::full(g.len()),
        size,
        &mut chosen,
        &mut nodes,
        budget,
    )?;
    assert!(found, "a clique of size {size} exists");
    Some((chosen.into_iter().map(|i| g.order[i]).collect(), nodes))
}

fn lex_search(
    g: &Induced,
    mut p: BitSet,
    size: usize,
    chosen: &mut Vec<usize>,
    nodes: &mut u64,
    budget: u64,
) -> Option<bool> {
    if chosen.len() == size {
        return Some(true);
    }
    *nodes += 1;
    if *nodes > budget {
        return None;
    }
    let need = size - chosen.len();
    if p.len() < need || color_bound(&g.adj, &p) < need {
        return Some(false);
    }
    while let Some(v) = p.first() {
        if p.len() < need {
            return Some(false);
        }
        p.remove(v);
        let next = p.intersection(&g.adj[v]);
        chosen.push(v);
        if lex_search(g, next, size, chosen, nodes, budget)? {
            return Some(true);
        }
        chosen.pop();
    }
    Some(false)
}
