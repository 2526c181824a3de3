//! Vertex covers: exact minimum cover, census by size, and the two-question
//! decoding that bounds the census by `2^tau * C(|V| - tau, m - tau)`.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bits::BitSet;
use crate::bounds::binomial;
use crate::error::{check_size, Error, Result};
use crate::graph::UndirectedGraph;
use crate::perm::{for_each_subset_of_size, SymbolSet};

/// Default node limit for the cover searches.
pub const DEFAULT_COVER_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinCover {
    pub tau: usize,
    /// Lexicographically least minimum cover.
    pub witness: SymbolSet,
    pub nodes_explored: u64,
}

pub fn is_vertex_cover(graph: &UndirectedGraph, cover: &SymbolSet) -> Result<bool> {
    check_size(graph.vertex_count(), cover.n())?;
    let bits = cover.bits();
    Ok(graph
        .rows()
        .iter()
        .enumerate()
        .all(|(u, row)| bits.contains(u) || row.is_subset(bits)))
}

struct CoverSolver<'g> {
    rows: &'g [BitSet],
    nodes: u64,
    budget: u64,
}

impl CoverSolver<'_> {
    fn degree(&self, v: usize, alive: &BitSet) -> usize {
        self.rows[v].intersection_len(alive)
    }

    /// Smallest cover of the subgraph induced by `alive`, provided its size
    /// is below `limit`.
    fn solve(&mut self, mut alive: BitSet, limit: usize) -> Result<Option<BitSet>> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        let mut taken = BitSet::new(alive.capacity());
        self.reduce(&mut alive, &mut taken);
        if taken.len() >= limit {
            return Ok(None);
        }
        let budget_left = limit - taken.len();

        let mut branch_vertex = None;
        let mut max_degree = 0;
        for v in alive.iter() {
            let d = self.degree(v, &alive);
            if d > max_degree {
                max_degree = d;
                branch_vertex = Some(v);
            }
        }
        let Some(v) = branch_vertex else {
            return Ok(Some(taken));
        };
        if matching_lower_bound(self.rows, &alive) >= budget_left {
            return Ok(None);
        }

        let mut best: Option<BitSet> = None;
        let mut best_len = budget_left;

        // Either v is in the cover ...
        let mut with_v = alive.clone();
        with_v.remove(v);
        if let Some(mut sub) = self.solve(with_v, best_len - 1)? {
            sub.insert(v);
            best_len = sub.len();
            best = Some(sub);
        }
        // ... or all of its neighbours are.
        let neighbours = self.rows[v].intersection(&alive);
        if neighbours.len() < best_len {
            let mut without_v = alive;
            without_v.difference_with(&neighbours);
            without_v.remove(v);
            if let Some(mut sub) = self.solve(without_v, best_len - neighbours.len())? {
                sub.union_with(&neighbours);
                best = Some(sub);
            }
        }

        Ok(best.map(|mut b| {
            b.union_with(&taken);
            b
        }))
    }

    /// Isolated vertices are dropped; a degree-one vertex forces its
    /// neighbour; an endpoint `u` of edge `uv` with `N[v] ⊆ N[u]` is taken.
    fn reduce(&self, alive: &mut BitSet, taken: &mut BitSet) {
        let mut changed = true;
        while changed {
            changed = false;
            let vertices: Vec<usize> = alive.iter().collect();
            for v in vertices {
                if !alive.contains(v) {
                    continue;
                }
                let nv = self.rows[v].intersection(alive);
                match nv.len() {
                    0 => {
                        alive.remove(v);
                        changed = true;
                    }
                    1 => {
                        let u = nv.first().expect("one neighbour");
                        taken.insert(u);
                        alive.remove(u);
                        alive.remove(v);
                        changed = true;
                    }
                    _ => {
                        for u in nv.iter() {
                            let mut rest = nv.clone();
                            rest.remove(u);
                            if rest.is_subset(&self.rows[u]) {
                                taken.insert(u);
                                alive.remove(u);
                                changed = true;
                                break;
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Size of a greedy maximal matching; every cover needs one endpoint per
/// matched edge.
fn matching_lower_bound(rows: &[BitSet], alive: &BitSet) -> usize {
    let mut free = alive.clone();
    let mut size = 0;
    for u in alive.iter() {
        if !free.contains(u) {
            continue;
        }
        let mut nbrs = rows[u].clone();
        nbrs.intersect_with(&free);
        if let Some(v) = nbrs.first() {
            free.remove(u);
            free.remove(v);
            size += 1;
        }
    }
    size
}

/// Exact minimum vertex cover with a lexicographically least witness.
pub fn min_vertex_cover(graph: &UndirectedGraph, budget: u64) -> Result<MinCover> {
    let n = graph.vertex_count();
    let mut solver = CoverSolver {
        rows: graph.rows(),
        nodes: 0,
        budget,
    };
    let tau = solver
        .solve(BitSet::full(n), n + 1)?
        .expect("the full vertex set is a cover")
        .len();

    // Fix vertices in increasing order, keeping each one whenever some
    // minimum cover still agrees with all the decisions made so far.
    let mut forced_in = BitSet::new(n);
    let mut forced_out = BitSet::new(n);
    for v in 0..n {
        if forced_in.len() == tau {
            break;
        }
        forced_in.insert(v);
        if !feasible(&mut solver, &forced_in, &forced_out, tau)? {
            forced_in.remove(v);
            forced_out.insert(v);
        }
    }
    debug_assert!(feasible(&mut solver, &forced_in, &forced_out, tau)?);
    let witness = completion(&mut solver, &forced_in, &forced_out, tau)?
        .expect("decisions keep a minimum cover reachable");
    Ok(MinCover {
        tau,
        witness: SymbolSet::from_bits(witness),
        nodes_explored: solver.nodes,
    })
}

fn feasible(
    solver: &mut CoverSolver<'_>,
    forced_in: &BitSet,
    forced_out: &BitSet,
    tau: usize,
) -> Result<bool> {
    Ok(completion(solver, forced_in, forced_out, tau)?.is_some())
}

/// A cover of size `tau` containing `forced_in` and avoiding `forced_out`.
fn completion(
    solver: &mut CoverSolver<'_>,
    forced_in: &BitSet,
    forced_out: &BitSet,
    tau: usize,
) -> Result<Option<BitSet>> {
    let n = forced_in.capacity();
    let mut chosen = forced_in.clone();
    for u in forced_out.iter() {
        if solver.rows[u].intersects(forced_out) {
            return Ok(None);
        }
        chosen.union_with(&solver.rows[u]);
    }
    if chosen.intersects(forced_out) || chosen.len() > tau {
        return Ok(None);
    }
    let mut alive = BitSet::full(n);
    alive.difference_with(&chosen);
    alive.difference_with(forced_out);
    let room = tau - chosen.len();
    Ok(solver.solve(alive, room + 1)?.map(|rest| {
        chosen.union_with(&rest);
        chosen
    }))
}

/// Number of vertex covers with exactly `m` vertices.
pub fn count_vertex_covers(graph: &UndirectedGraph, m: usize, budget: u64) -> Result<BigUint> {
    let n = graph.vertex_count();
    if m > n {
        return Err(Error::InvalidArgument(format!(
            "cover size {m} exceeds vertex count {n}"
        )));
    }
    // Covers of size m are complements of independent sets of size n - m.
    let mut nodes = 0u64;
    count_independent(graph.rows(), BitSet::full(n), n - m, &mut nodes, budget)
}

fn count_independent(
    rows: &[BitSet],
    alive: BitSet,
    size: usize,
    nodes: &mut u64,
    budget: u64,
) -> Result<BigUint> {
    *nodes += 1;
    if *nodes > budget {
        return Err(Error::BudgetExceeded { budget });
    }
    if size == 0 {
        return Ok(BigUint::one());
    }
    let available = alive.len();
    if available < size {
        return Ok(BigUint::zero());
    }
    let pivot = alive
        .iter()
        .map(|v| (rows[v].intersection_len(&alive), v))
        .max_by_key(|&(d, v)| (d, std::cmp::Reverse(v)));
    match pivot {
        Some((d, v)) if d > 0 => {
            let mut skip = alive.clone();
            skip.remove(v);
            let mut take = alive;
            take.difference_with(&rows[v]);
            take.remove(v);
            Ok(count_independent(rows, skip, size, nodes, budget)?
                + count_independent(rows, take, size - 1, nodes, budget)?)
        }
        _ => Ok(binomial(available as u64, size as u64)),
    }
}

/// Output of [`covers_via_encoding`].
#[derive(Clone, Debug)]
pub struct EncodedCovers {
    pub covers: BTreeSet<SymbolSet>,
    /// Number of `(U, C - T)` answer pairs tried.
    pub attempts: BigUint,
}

/// Recovers every size-`m` cover from the answers to two questions about
/// it, given a minimum cover `s`:
///
/// 1. `U = C ∩ S`, one of `2^|S|` subsets;
/// 2. `C - T`, where `T = U ∪ N(S - U)` is itself a cover contained in `C`,
///    one of `C(|V| - |T|, m - |T|)` subsets of `V - T`.
///
/// Every decoded set `T ∪ (C - T)` is a cover, and every cover is decoded
/// from its own answers, so the result is exactly the size-`m` covers.
pub fn covers_via_encoding(
    graph: &UndirectedGraph,
    s: &SymbolSet,
    m: usize,
) -> Result<EncodedCovers> {
    let n = graph.vertex_count();
    check_size(n, s.n())?;
    let tau = min_vertex_cover(graph, DEFAULT_COVER_BUDGET)?.tau;
    if s.len() != tau || !is_vertex_cover(graph, s)? {
        return Err(Error::NotMinimumCover);
    }
    if m > n {
        return Err(Error::InvalidArgument(format!(
            "cover size {m} exceeds vertex count {n}"
        )));
    }

    if tau >= 64 {
        return Err(Error::InvalidArgument(format!(
            "cover number {tau} too large to enumerate 2^tau answers"
        )));
    }
    let s_members: Vec<usize> = s.bits().iter().collect();
    let mut covers = BTreeSet::new();
    let mut attempts = BigUint::zero();
    for mask in 0u64..(1u64 << tau) {
        let mut t = BitSet::new(n);
        for (i, &x) in s_members.iter().enumerate() {
            if mask >> i & 1 == 1 {
                t.insert(x);
            } else {
                t.union_with(graph.row(x));
            }
        }
        if t.len() > m {
            continue;
        }
        let outside: Vec<usize> = (0..n).filter(|&v| !t.contains(v)).collect();
        let extra = m - t.len();
        attempts += binomial(outside.len() as u64, extra as u64);
        for_each_subset_of_size(outside.len(), extra, |pick| {
            let mut c = t.clone();
            for &i in pick {
                c.insert(outside[i - 1]);
            }
            covers.insert(SymbolSet::from_bits(c));
            true
        });
    }
    Ok(EncodedCovers { covers, attempts })
}

/// `2^tau * C(v - tau, m - tau)`, for `tau <= m <= v`.
pub fn cover_count_bound(tau: usize, v: usize, m: usize) -> Result<BigUint> {
    if !(tau <= m && m <= v) {
        return Err(Error::InvalidArgument(format!(
            "need tau <= m <= |V|, got tau = {tau}, m = {m}, |V| = {v}"
        )));
    }
    Ok((BigUint::one() << tau) * binomial((v - tau) as u64, (m - tau) as u64))
}
