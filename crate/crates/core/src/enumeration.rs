//! Exhaustive desk-scale scans of `S_n`: balls, spheres, ball
//! intersections and the all-pairs distance profile.
//!
//! Every scan splits `S_n` into lexicographic rank ranges that are
//! processed in parallel and merged in rank order, so results never depend
//! on the number of worker threads.

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{check_size, Error, Result};
use crate::perm::{
    check_enumeration_cap, factorial_u64, for_each_in_range, lis_slice, rank_slice, Permutation,
};

/// Largest `n` for a full-space scan by default.
pub const SCAN_CAP: usize = 11;
/// Largest `n` for a full-space scan with [`ScanCap::Extended`].
pub const SCAN_CAP_EXTENDED: usize = 13;

const CHUNK: u64 = 20_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ScanCap {
    #[default]
    Standard,
    Extended,
}

impl ScanCap {
    pub fn limit(self) -> usize {
        match self {
            ScanCap::Standard => SCAN_CAP,
            ScanCap::Extended => SCAN_CAP_EXTENDED,
        }
    }

    fn check(self, n: usize) -> Result<()> {
        check_enumeration_cap(n, self.limit(), "full scans of S_n")
    }
}

/// Runs `visit` over every permutation of `S_n` (0-based entries) in
/// parallel rank chunks and returns the per-chunk results in rank order.
fn scan_chunks<T, F>(n: usize, visit: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync,
{
    let total = factorial_u64(n);
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| visit(c * CHUNK, ((c + 1) * CHUNK).min(total)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallSpec {
    pub center: Permutation,
    pub radius: usize,
}

impl BallSpec {
    pub fn new(center: Permutation, radius: usize) -> Self {
        BallSpec { center, radius }
    }

    pub fn around_identity(n: usize, radius: usize) -> Self {
        BallSpec::new(Permutation::identity(n), radius)
    }

    pub fn n(&self) -> usize {
        self.center.n()
    }
}

/// `|{gamma : d(center, gamma) <= radius}|`.
///
/// Counted around the identity with `d(id, gamma) = n - LIS(gamma)`; the
/// metric is invariant under relabeling, so the count is the same for
/// every center.
pub fn ball_size(spec: &BallSpec, cap: ScanCap) -> Result<BigUint> {
    let n = spec.n();
    cap.check(n)?;
    let radius = spec.radius;
    let counts = scan_chunks(n, |start, end| {
        let mut tails = Vec::with_capacity(n);
        let mut count = 0u64;
        for_each_in_range(n, start, end, |g| {
            if n - lis_slice(g, &mut tails) <= radius {
                count += 1;
            }
        });
        count
    });
    Ok(BigUint::from(counts.into_iter().sum::<u64>()))
}

/// Members of the ball, each obtained as `relabel(center, gamma)` for
/// `gamma` in the ball around the identity, ordered by the rank of
/// `gamma`.
pub fn ball_members(spec: &BallSpec, cap: ScanCap) -> Result<Vec<Permutation>> {
    let n = spec.n();
    cap.check(n)?;
    let radius = spec.radius;
    let chunks = scan_chunks(n, |start, end| {
        let mut tails = Vec::with_capacity(n);
        let mut out = Vec::new();
        for_each_in_range(n, start, end, |g| {
            if n - lis_slice(g, &mut tails) <= radius {
                out.push(Permutation::from_zero_based(g.to_vec()));
            }
        });
        out
    });
    chunks
        .into_iter()
        .flatten()
        .map(|g| spec.center.relabel(&g))
        .collect()
}

/// Histogram of `d(center, ·)` over `S_n`, indexed by distance `0..n`
/// (a single entry for `n = 0`).
pub fn sphere_sizes(center: &Permutation, cap: ScanCap) -> Result<Vec<BigUint>> {
    let n = center.n();
    cap.check(n)?;
    let to_center = center.inverse();
    let to_center = to_center.as_slice();
    let histograms = scan_chunks(n, |start, end| {
        let mut tails = Vec::with_capacity(n);
        let mut mapped = vec![0u32; n];
        let mut hist = vec![0u64; n.max(1)];
        for_each_in_range(n, start, end, |g| {
            for (m, &s) in mapped.iter_mut().zip(g) {
                *m = to_center[s as usize];
            }
            hist[n - lis_slice(&mapped, &mut tails)] += 1;
        });
        hist
    });
    let mut total = vec![0u64; n.max(1)];
    for h in histograms {
        for (t, v) in total.iter_mut().zip(h) {
            *t += v;
        }
    }
    Ok(total.into_iter().map(BigUint::from).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Intersection {
    pub size: BigUint,
    /// Members in lexicographic order, when requested.
    pub members: Option<Vec<Permutation>>,
}

/// `|{gamma : d(a, gamma) <= k and d(b, gamma) <= k}|`.
pub fn ball_intersection(
    a: &Permutation,
    b: &Permutation,
    k: usize,
    with_members: bool,
    cap: ScanCap,
) -> Result<Intersection> {
    check_size(a.n(), b.n())?;
    let n = a.n();
    cap.check(n)?;
    let (ia, ib) = (a.inverse(), b.inverse());
    let (ia, ib) = (ia.as_slice(), ib.as_slice());
    let chunks = scan_chunks(n, |start, end| {
        let mut tails = Vec::with_capacity(n);
        let mut mapped = vec![0u32; n];
        let mut count = 0u64;
        let mut members = Vec::new();
        for_each_in_range(n, start, end, |g| {
            for (m, &s) in mapped.iter_mut().zip(g) {
                *m = ia[s as usize];
            }
            if n - lis_slice(&mapped, &mut tails) > k {
                return;
            }
            for (m, &s) in mapped.iter_mut().zip(g) {
                *m = ib[s as usize];
            }
            if n - lis_slice(&mapped, &mut tails) > k {
                return;
            }
            count += 1;
            if with_members {
                members.push(Permutation::from_zero_based(g.to_vec()));
            }
        });
        (count, members)
    });
    let size = BigUint::from(chunks.iter().map(|(c, _)| c).sum::<u64>());
    let members = with_members.then(|| chunks.into_iter().flat_map(|(_, m)| m).collect());
    Ok(Intersection { size, members })
}

/// `(identity, 2 1 4 3 ... 2k 2k-1 2k+1 ... n)`, a pair at distance `k`.
pub fn transposition_pair(n: usize, k: usize) -> Result<(Permutation, Permutation)> {
    if 2 * k > n {
        return Err(Error::InvalidArgument(format!(
            "{k} disjoint transpositions need n >= {}, got n = {n}",
            2 * k
        )));
    }
    let mut symbols: Vec<usize> = (1..=n).collect();
    for t in 0..k {
        symbols.swap(2 * t, 2 * t + 1);
    }
    Ok((
        Permutation::identity(n),
        Permutation::from_one_line(&symbols)?,
    ))
}

/// Distances from the identity to every permutation, indexed by rank.
/// By relabel invariance `d(a, b) = d(id, relabel(a^-1, b))`, so this one
/// row answers every pairwise query.
#[derive(Clone, Debug)]
pub struct DistanceProfile {
    n: usize,
    row: Vec<u8>,
}

impl DistanceProfile {
    pub fn new(n: usize, cap: ScanCap) -> Result<Self> {
        cap.check(n)?;
        let chunks = scan_chunks(n, |start, end| {
            let mut tails = Vec::with_capacity(n);
            let mut out = Vec::with_capacity((end - start) as usize);
            for_each_in_range(n, start, end, |g| {
                out.push((n - lis_slice(g, &mut tails)) as u8);
            });
            out
        });
        Ok(DistanceProfile {
            n,
            row: chunks.concat(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `d(id, unrank(rank))`.
    #[inline]
    pub fn from_identity(&self, rank: u64) -> usize {
        self.row[rank as usize] as usize
    }

    pub fn row(&self) -> &[u8] {
        &self.row
    }

    pub fn distance(&self, a: &Permutation, b: &Permutation) -> Result<usize> {
        check_size(self.n, a.n())?;
        check_size(self.n, b.n())?;
        Ok(self.from_identity(a.inverse().relabel(b)?.rank_u64()))
    }

    /// Distance between 0-based entries given `a`'s inverse.
    #[inline]
    pub(crate) fn distance_with_inverse(
        &self,
        a_inv: &[u32],
        b: &[u32],
        scratch: &mut [u32],
    ) -> usize {
        for (m, &s) in scratch.iter_mut().zip(b) {
            *m = a_inv[s as usize];
        }
        self.from_identity(rank_slice(scratch))
    }

    pub fn sphere_sizes(&self) -> Vec<u64> {
        let mut hist = vec![0u64; self.n.max(1)];
        for &d in &self.row {
            hist[d as usize] += 1;
        }
        hist
    }
}
