//! Families of bounded diameter: cylinders, the lift to `S_{n+1}`, and the
//! exact search for the largest diameter-`k` family.

use std::collections::HashSet;
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::bits::BitSet;
use crate::bounds::{falling_factorial, intersection_bound_sum};
use crate::clique::max_clique;
use crate::cover::{min_vertex_cover, DEFAULT_COVER_BUDGET};
use crate::enumeration::{ball_size, BallSpec, DistanceProfile, ScanCap};
use crate::error::{check_size, Error, Result};
use crate::graph::UndirectedGraph;
use crate::perm::{check_enumeration_cap, factorial_u64, ulam_distance, Permutation, SymbolSet};

/// Largest `n` searched by default (720 vertices).
pub const SEARCH_CAP: usize = 6;
/// Largest `n` searched with [`SearchCap::Extended`] (5040 vertices).
pub const SEARCH_CAP_EXTENDED: usize = 7;
pub const DEFAULT_SEARCH_BUDGET: u64 = 200_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SearchCap {
    #[default]
    Standard,
    Extended,
}

impl SearchCap {
    pub fn limit(self) -> usize {
        match self {
            SearchCap::Standard => SEARCH_CAP,
            SearchCap::Extended => SEARCH_CAP_EXTENDED,
        }
    }
}

/// A deduplicated set of permutations of a common size, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    n: usize,
    members: Vec<Permutation>,
    index: HashSet<Permutation>,
}

impl Family {
    pub fn new(n: usize, members: impl IntoIterator<Item = Permutation>) -> Result<Self> {
        let mut members: Vec<Permutation> = members.into_iter().collect();
        for m in &members {
            check_size(n, m.n())?;
        }
        members.sort_unstable();
        members.dedup();
        let index = members.iter().cloned().collect();
        Ok(Family { n, members, index })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.index.contains(p)
    }

    /// Members in lexicographic order.
    pub fn members(&self) -> &[Permutation] {
        &self.members
    }
}

/// Largest pairwise Ulam distance within the family.
pub fn family_diameter(family: &Family) -> Result<usize> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let m = family.members();
    Ok((0..m.len())
        .into_par_iter()
        .map(|i| {
            m[i + 1..]
                .iter()
                .map(|b| ulam_distance(&m[i], b).expect("common n"))
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0))
}

/// `{gamma : gamma - A = anchor - A}`.
pub fn cylinder(n: usize, deleted: &SymbolSet, anchor: &Permutation) -> Result<Family> {
    check_size(n, anchor.n())?;
    check_size(n, deleted.n())?;
    let base = anchor.delete(deleted)?.symbols();
    // Insert the deleted symbols one at a time in every position.
    let mut strings = vec![base];
    for s in deleted.iter() {
        strings = strings
            .into_iter()
            .flat_map(|w| {
                (0..=w.len()).map(move |at| {
                    let mut next = w.clone();
                    next.insert(at, s);
                    next
                })
            })
            .collect();
    }
    Family::new(
        n,
        strings
            .into_iter()
            .map(|w| Permutation::from_one_line(&w).expect("insertions form a permutation")),
    )
}

/// Recovers `(A, anchor)` with `family = cylinder(n, A, anchor)`, if any.
///
/// A cylinder over `A` holds `n!/(n-|A|)!` members, which fixes `|A|`. Its
/// members agree after deleting `A` exactly when `A` covers every pair of
/// symbols whose relative order varies across the family, so the family is
/// a cylinder iff that disagreement graph has a vertex cover of the right
/// size. The returned `A` extends the least minimum cover by the smallest
/// unused symbols.
pub fn is_cylinder(family: &Family) -> Option<(SymbolSet, Permutation)> {
    let first = family.members().first()?;
    let n = family.n();
    let size = BigUint::from(family.len());
    let deleted_len =
        (0..=n).find(|&a| falling_factorial(n as u64, a as u64).expect("a <= n") == size)?;

    let mut disagreement = UndirectedGraph::empty(n);
    let first_pos = first.inverse();
    let first_pos = first_pos.as_slice();
    for member in &family.members()[1..] {
        let pos = member.inverse();
        let pos = pos.as_slice();
        for x in 0..n {
            for y in x + 1..n {
                if (first_pos[x] < first_pos[y]) != (pos[x] < pos[y]) {
                    disagreement.add_edge_raw(x, y);
                }
            }
        }
    }
    let cover = min_vertex_cover(&disagreement, DEFAULT_COVER_BUDGET).ok()?;
    if cover.tau > deleted_len {
        return None;
    }
    let mut deleted = cover.witness;
    for s in 1..=n {
        if deleted.len() == deleted_len {
            break;
        }
        deleted.insert(s);
    }
    Some((deleted, first.clone()))
}

/// `{gamma in S_{n+1} : gamma - {n+1} in family}`: every member with the
/// new top symbol inserted in each of the `n + 1` positions.
pub fn tensor_lift(family: &Family) -> Result<Family> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let n = family.n();
    Family::new(
        n + 1,
        family
            .members()
            .iter()
            .flat_map(|m| (1..=n + 1).map(move |at| m.insert_top(at))),
    )
}

fn check_search_cap(n: usize, cap: SearchCap) -> Result<()> {
    check_enumeration_cap(n, cap.limit(), "anticode search")
}

/// Adjacency rows of the graph on `S_n` (0-based rank indices) joining
/// permutations at distance at most `k`.
fn compatibility_rows(n: usize, k: usize) -> Vec<BitSet> {
    let profile = DistanceProfile::new(n, ScanCap::Standard).expect("search cap below scan cap");
    let total = factorial_u64(n) as usize;
    let perms: Vec<Permutation> = (0..total as u64)
        .map(|r| Permutation::unrank_u64(n, r).expect("rank in range"))
        .collect();
    (0..total)
        .into_par_iter()
        .map(|a| {
            let inv = perms[a].inverse();
            let mut scratch = vec![0u32; n];
            let mut row = BitSet::new(total);
            for (b, pb) in perms.iter().enumerate() {
                if a != b
                    && profile.distance_with_inverse(inv.as_slice(), pb.as_slice(), &mut scratch)
                        <= k
                {
                    row.insert(b);
                }
            }
            row
        })
        .collect()
}

/// The graph on `S_n` with vertex `r + 1` the permutation of lexicographic
/// rank `r`, and an edge whenever the distance is at most `k`.
pub fn compatibility_graph(n: usize, k: usize, cap: SearchCap) -> Result<UndirectedGraph> {
    check_search_cap(n, cap)?;
    let rows = compatibility_rows(n, k);
    let mut g = UndirectedGraph::empty(rows.len());
    for (u, row) in rows.iter().enumerate() {
        for v in row.iter().filter(|&v| v > u) {
            g.add_edge_raw(u, v);
        }
    }
    Ok(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    Exact,
    /// The budget ran out; `best_size` is only a lower bound.
    LowerBound,
}

impl SearchStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchStatus::Exact => "exact",
            SearchStatus::LowerBound => "lower_bound",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub n: usize,
    /// Requested diameter.
    pub k: usize,
    /// Diameter actually searched; `k` clamped to `n - 1`.
    pub search_k: usize,
    pub best_size: BigUint,
    pub witness: Family,
    pub status: SearchStatus,
    /// `n!/(n-k)!`, or `n!` when `k > n`.
    pub conjectured: BigUint,
    pub matches_conjecture: bool,
    pub witness_is_cylinder: bool,
    pub elapsed_ms: u64,
    pub nodes_explored: u64,
}

impl SearchReport {
    pub fn clamped(&self) -> bool {
        self.search_k != self.k
    }
}

/// Largest family of diameter at most `k` in `S_n`.
///
/// Relabeling is an isometry acting transitively on `S_n`, so some maximum
/// family contains the identity; the search is a maximum clique among the
/// permutations within distance `k` of the identity.
pub fn max_anticode(n: usize, k: usize, budget: u64, cap: SearchCap) -> Result<SearchReport> {
    check_search_cap(n, cap)?;
    let started = Instant::now();
    let search_k = k.min(n.saturating_sub(1));
    let rows = compatibility_rows(n, search_k);
    let neighbourhood = rows[0].clone();
    // The cylinder over {1..k} through the identity is a valid start.
    let deleted = SymbolSet::from_symbols(n, &(1..=search_k).collect::<Vec<_>>())?;
    let seed: Vec<usize> = cylinder(n, &deleted, &Permutation::identity(n))?
        .members()
        .iter()
        .map(|p| p.rank_u64() as usize)
        .filter(|&r| r != 0)
        .collect();
    let result = max_clique(&rows, &neighbourhood, &seed, budget);

    let members = std::iter::once(0)
        .chain(result.clique.iter().copied())
        .map(|r| Permutation::unrank_u64(n, r as u64).expect("rank in range"));
    let witness = Family::new(n, members)?;
    let best_size = BigUint::from(witness.len());
    let conjectured = falling_factorial(n as u64, k.min(n) as u64)?;
    Ok(SearchReport {
        n,
        k,
        search_k,
        matches_conjecture: best_size == conjectured,
        witness_is_cylinder: is_cylinder(&witness).is_some(),
        best_size,
        witness,
        status: if result.exact {
            SearchStatus::Exact
        } else {
            SearchStatus::LowerBound
        },
        conjectured,
        elapsed_ms: started.elapsed().as_millis() as u64,
        nodes_explored: result.nodes_explored,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equal,
    Counterexample,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Equal => "equal",
            Verdict::Counterexample => "counterexample",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConjectureReport {
    pub search: SearchReport,
    pub verdict: Verdict,
    /// `|B_k|`, an upper bound on any diameter-`k` family.
    pub ball_size: BigUint,
    pub intersection_bound_sum: BigUint,
    /// `n!/(n-k)! <= best <= min(|B_k|, intersection sum)`; only asserted
    /// for exact results, since a truncated search may stop below a cylinder.
    pub sandwich_holds: bool,
}

/// Compares the exact maximum with `n!/(n-k)!` and checks the witness
/// against the cylinder construction and the upper bounds.
pub fn verify_conjecture(
    n: usize,
    k: usize,
    budget: u64,
    cap: SearchCap,
) -> Result<ConjectureReport> {
    let search = max_anticode(n, k, budget, cap)?;
    let ball = ball_size(&BallSpec::around_identity(n, k), ScanCap::Standard)?;
    let ibs = intersection_bound_sum(n as u64, k.min(n) as u64)?;
    let best = &search.best_size;
    let verdict = match search.status {
        _ if *best > search.conjectured => Verdict::Counterexample,
        SearchStatus::Exact if *best == search.conjectured => Verdict::Equal,
        SearchStatus::Exact => Verdict::Counterexample,
        SearchStatus::LowerBound => Verdict::Inconclusive,
    };
    let upper_ok = *best <= ball && *best <= ibs;
    let lower_ok = search.status == SearchStatus::LowerBound || *best >= search.conjectured;
    Ok(ConjectureReport {
        verdict,
        ball_size: ball,
        intersection_bound_sum: ibs,
        sandwich_holds: upper_ok && lower_ok,
        search,
    })
}
