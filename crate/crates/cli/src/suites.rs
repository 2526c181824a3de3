//! Invariant suites behind `ulam verify`.

use std::collections::BTreeMap;

use anyhow::{bail, Result};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use ulam_core::bounds::prop5_bound;
use ulam_core::cover::DEFAULT_COVER_BUDGET;
use ulam_core::perm::{factorial_big, for_each_subset_of_size};
use ulam_core::{
    count_vertex_covers, cover_count_bound, covers_via_encoding, enumerate_permutations,
    family_diameter, inversion_graph, is_vertex_cover, max_anticode, min_vertex_cover,
    ulam_distance, ulam_distance_oracle, ulam_graph, verify_conjecture, Permutation, SearchCap,
    SearchStatus, SymbolSet, UndirectedGraph, Verdict,
};

use crate::table::{monotonicity_relations, monotonicity_violations, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Metric,
    Lemma6,
    Lemma7,
    Props,
    Conjecture,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Metric => "metric",
            Suite::Lemma6 => "lemma6",
            Suite::Lemma7 => "lemma7",
            Suite::Props => "props",
            Suite::Conjecture => "conjecture",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    /// The search budget ran out before the check could be decided.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub facts: BTreeMap<&'static str, String>,
}

pub struct Settings {
    pub n_max: usize,
    pub budget: u64,
    pub cap: SearchCap,
    pub seed: u64,
}

struct Recorder<'a> {
    suite: &'static str,
    sink: &'a mut dyn FnMut(Check) -> Result<()>,
}

impl Recorder<'_> {
    fn record(
        &mut self,
        name: impl Into<String>,
        outcome: Outcome,
        facts: impl IntoIterator<Item = (&'static str, String)>,
    ) -> Result<()> {
        (self.sink)(Check {
            suite: self.suite,
            name: name.into(),
            outcome,
            facts: facts.into_iter().collect(),
        })
    }

    fn check(
        &mut self,
        name: impl Into<String>,
        passed: bool,
        facts: impl IntoIterator<Item = (&'static str, String)>,
    ) -> Result<()> {
        let outcome = if passed { Outcome::Pass } else { Outcome::Fail };
        self.record(name, outcome, facts)
    }
}

/// Runs `suite`, handing each check to `sink` as soon as it is decided.
pub fn run(
    suite: Suite,
    settings: &Settings,
    sink: &mut dyn FnMut(Check) -> Result<()>,
) -> Result<()> {
    let mut rec = Recorder {
        suite: suite.name(),
        sink,
    };
    let limit = match suite {
        Suite::Metric | Suite::Lemma6 => RANDOM_PAIR_MAX,
        Suite::Lemma7 => LEMMA7_VERTEX_MAX,
        Suite::Props | Suite::Conjecture => settings.cap.limit(),
    };
    if settings.n_max > limit {
        bail!(ulam_core::Error::CapExceeded {
            what: suite.name(),
            n: settings.n_max,
            cap: limit,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    match suite {
        Suite::Metric => metric(settings, &mut rng, &mut rec),
        Suite::Lemma6 => lemma6(settings, &mut rng, &mut rec),
        Suite::Lemma7 => lemma7(settings, &mut rng, &mut rec),
        Suite::Props => props(settings, &mut rec),
        Suite::Conjecture => conjecture(settings, &mut rec),
    }
}

fn random_perm(n: usize, rng: &mut ChaCha8Rng) -> Permutation {
    let mut s: Vec<usize> = (1..=n).collect();
    s.shuffle(rng);
    Permutation::from_one_line(&s).expect("shuffled identity")
}

fn all(n: usize) -> Result<Vec<Permutation>> {
    Ok(enumerate_permutations(n)?.collect())
}

fn n_fact(n: usize) -> (&'static str, String) {
    ("n", n.to_string())
}

const EXHAUSTIVE_MAX: usize = 5;
/// The deletion oracle tries up to `2^n` subsets per pair.
const RANDOM_PAIR_MAX: usize = 13;

fn metric(s: &Settings, rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    for n in 1..=s.n_max {
        if n <= EXHAUSTIVE_MAX {
            let perms = all(n)?;
            let d: Vec<Vec<usize>> = perms
                .iter()
                .map(|a| perms.iter().map(|b| ulam_distance(a, b)).collect())
                .collect::<ulam_core::Result<_>>()?;
            let mut axioms = true;
            let mut oracle = true;
            for i in 0..perms.len() {
                for j in 0..perms.len() {
                    axioms &= (d[i][j] == 0) == (i == j) && d[i][j] == d[j][i] && d[i][j] < n;
                    axioms &= (0..perms.len()).all(|l| d[i][l] <= d[i][j] + d[j][l]);
                    oracle &= d[i][j] == ulam_distance_oracle(&perms[i], &perms[j])?;
                }
            }
            let pairs = ("pairs", (perms.len() * perms.len()).to_string());
            rec.check("axioms_exhaustive", axioms, [n_fact(n), pairs.clone()])?;
            rec.check("oracle_exhaustive", oracle, [n_fact(n), pairs])?;
        } else {
            let mut axioms = true;
            let mut invariant = true;
            for _ in 0..10_000 {
                let (a, b, c) = (
                    random_perm(n, rng),
                    random_perm(n, rng),
                    random_perm(n, rng),
                );
                let (ab, bc, ac) = (
                    ulam_distance(&a, &b)?,
                    ulam_distance(&b, &c)?,
                    ulam_distance(&a, &c)?,
                );
                axioms &= (ab == 0) == (a == b) && ab == ulam_distance(&b, &a)? && ac <= ab + bc;
                let rel = a.inverse().relabel(&b)?;
                axioms &= (ab == n - 1) == (rel == Permutation::reversal(n));
                invariant &= ulam_distance(&c.relabel(&a)?, &c.relabel(&b)?)? == ab;
            }
            let mut oracle = true;
            for _ in 0..1000 {
                let (a, b) = (random_perm(n, rng), random_perm(n, rng));
                oracle &= ulam_distance(&a, &b)? == ulam_distance_oracle(&a, &b)?;
            }
            rec.check(
                "axioms_random",
                axioms,
                [n_fact(n), ("triples", "10000".into())],
            )?;
            rec.check(
                "relabel_invariance",
                invariant,
                [n_fact(n), ("triples", "10000".into())],
            )?;
            rec.check(
                "oracle_random",
                oracle,
                [n_fact(n), ("pairs", "1000".into())],
            )?;
        }
    }
    Ok(())
}

/// Whether the minimum cover of the pair's graph has size `d(a, b)` and its
/// witness is a common deletion set.
fn cover_matches_distance(a: &Permutation, b: &Permutation) -> Result<bool> {
    let cover = min_vertex_cover(&ulam_graph(a, b)?, DEFAULT_COVER_BUDGET)?;
    Ok(cover.tau == ulam_distance(a, b)?
        && a.delete(&cover.witness)? == b.delete(&cover.witness)?)
}

fn same_edges(a: &Permutation, b: &Permutation) -> Result<bool> {
    let direct = ulam_graph(a, b)?;
    let diff = inversion_graph(a).symmetric_difference(&inversion_graph(b))?;
    Ok(direct.edges() == diff.edges())
}

fn lemma6(s: &Settings, rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    for n in 1..=s.n_max {
        if n <= EXHAUSTIVE_MAX {
            let perms = all(n)?;
            let (mut number, mut both_ways, mut edges) = (true, true, true);
            for a in &perms {
                for b in &perms {
                    number &= cover_matches_distance(a, b)?;
                    edges &= same_edges(a, b)?;
                    let g = ulam_graph(a, b)?;
                    for size in 0..=n {
                        for_each_subset_of_size(n, size, |c| {
                            let c = SymbolSet::from_symbols(n, c).expect("subset of 1..n");
                            let cover = is_vertex_cover(&g, &c).expect("sizes agree");
                            let common = a.delete(&c).expect("sizes agree")
                                == b.delete(&c).expect("sizes agree");
                            both_ways &= cover == common;
                            true
                        });
                    }
                }
            }
            let pairs = ("pairs", (perms.len() * perms.len()).to_string());
            rec.check(
                "cover_number_is_distance",
                number,
                [n_fact(n), pairs.clone()],
            )?;
            rec.check(
                "covers_are_common_deletion_sets",
                both_ways,
                [n_fact(n), pairs.clone()],
            )?;
            rec.check("symmetric_difference", edges, [n_fact(n), pairs])?;
        } else {
            let (mut number, mut edges) = (true, true);
            for _ in 0..500 {
                let (a, b) = (random_perm(n, rng), random_perm(n, rng));
                number &= cover_matches_distance(&a, &b)?;
                edges &= same_edges(&a, &b)?;
            }
            let pairs = ("pairs", "500".to_string());
            rec.check(
                "cover_number_is_distance",
                number,
                [n_fact(n), pairs.clone()],
            )?;
            rec.check("symmetric_difference", edges, [n_fact(n), pairs])?;
        }
    }
    Ok(())
}

/// Vertex limit for graphs whose covers are listed by brute force.
const LEMMA7_VERTEX_MAX: usize = 16;

fn random_graph(v: usize, rng: &mut ChaCha8Rng) -> UndirectedGraph {
    let p: f64 = rng.gen_range(0.05..0.7);
    let mut g = UndirectedGraph::empty(v);
    for x in 1..=v {
        for y in x + 1..=v {
            if rng.gen_bool(p) {
                g.add_edge(x, y).expect("distinct vertices in range");
            }
        }
    }
    g
}

/// Vertex covers of `g` by size, found by testing every subset.
fn brute_covers(g: &UndirectedGraph) -> Vec<Vec<SymbolSet>> {
    let v = g.vertex_count();
    let edges = g.edges();
    let mut by_size = vec![Vec::new(); v + 1];
    for mask in 0u32..1 << v {
        let covered = edges
            .iter()
            .all(|&(a, b)| mask >> (a - 1) & 1 == 1 || mask >> (b - 1) & 1 == 1);
        if covered {
            let members: Vec<usize> = (0..v)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| i + 1)
                .collect();
            by_size[members.len()].push(SymbolSet::from_symbols(v, &members).expect("in range"));
        }
    }
    by_size
}

/// Checks the cover census against `2^tau C(|V| - tau, m - tau)` and the
/// two-question decoding against brute force on 200 random graphs with at
/// most `n_max` vertices.
fn lemma7(s: &Settings, rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let (mut bound, mut census, mut encoding) = (true, true, true);
    let mut instances = 0usize;
    let mut tight = 0usize;
    for _ in 0..200 {
        let v = rng.gen_range(1..=s.n_max.max(1));
        let g = random_graph(v, rng);
        let by_size = brute_covers(&g);
        let min = min_vertex_cover(&g, DEFAULT_COVER_BUDGET)?;
        for (m, expected) in by_size.iter().enumerate().skip(min.tau) {
            let count = count_vertex_covers(&g, m, DEFAULT_COVER_BUDGET)?;
            let limit = cover_count_bound(min.tau, v, m)?;
            census &= count == BigUint::from(expected.len());
            bound &= count <= limit;
            tight += usize::from(count == limit);
            let decoded = covers_via_encoding(&g, &min.witness, m)?;
            encoding &= decoded.covers.len() == expected.len()
                && expected.iter().all(|c| decoded.covers.contains(c));
            instances += 1;
        }
        census &= by_size[..min.tau].iter().all(Vec::is_empty);
    }
    let facts = || {
        [
            ("graphs", "200".to_string()),
            ("max_vertices", s.n_max.to_string()),
            ("instances", instances.to_string()),
        ]
    };
    rec.check("census_matches_brute_force", census, facts())?;
    rec.check(
        "census_within_bound",
        bound,
        facts()
            .into_iter()
            .chain([("tight_instances", tight.to_string())]),
    )?;
    rec.check("encoding_recovers_every_cover", encoding, facts())
}

struct Searched {
    size: BigUint,
    exact: bool,
}

fn search(s: &Settings, n: usize, k: usize) -> Result<Searched> {
    let r = max_anticode(n, k, s.budget, s.cap)?;
    let diameter_ok = family_diameter(&r.witness)? <= k;
    if !diameter_ok {
        bail!("search witness for n = {n}, k = {k} has diameter above {k}");
    }
    Ok(Searched {
        size: r.best_size,
        exact: r.status == SearchStatus::Exact,
    })
}

fn value_check(
    rec: &mut Recorder,
    name: &str,
    n: usize,
    k: usize,
    got: &Searched,
    expected: BigUint,
) -> Result<()> {
    let outcome = match (got.exact, got.size == expected) {
        (true, true) => Outcome::Pass,
        (false, _) if got.size < expected => Outcome::Inconclusive,
        _ => Outcome::Fail,
    };
    rec.record(
        name,
        outcome,
        [
            n_fact(n),
            ("k", k.to_string()),
            ("value", got.size.to_string()),
            ("expected", expected.to_string()),
        ],
    )
}

/// The exact small-`k` and large-`k` values, plus monotonicity and the
/// upper bound on every value computed along the way.
fn props(s: &Settings, rec: &mut Recorder) -> Result<()> {
    let mut table = Table::new();
    for n in 1..=s.n_max {
        let mut cases: Vec<(&str, usize, BigUint)> = vec![
            ("f0_is_one", 0, BigUint::from(1u8)),
            ("f1_is_n", 1, BigUint::from(n)),
            ("f_n_is_factorial", n, factorial_big(n)),
            ("f_n_minus_1_is_factorial", n - 1, factorial_big(n)),
        ];
        if n >= 2 {
            cases.push((
                "f_n_minus_2_is_half_factorial",
                n - 2,
                factorial_big(n) / 2u8,
            ));
        }
        for (name, k, expected) in cases {
            let got = search(s, n, k)?;
            value_check(rec, name, n, k, &got, expected)?;
            if got.exact {
                table.insert((n as u64, k as u64), got.size);
            }
        }
    }
    let violations = monotonicity_violations(&table);
    rec.check(
        "monotone_in_k_and_n_and_lift",
        violations.is_empty(),
        [
            ("relations", monotonicity_relations(&table).to_string()),
            ("violations", violations.join("; ")),
        ],
    )?;
    let mut above = Vec::new();
    for (&(n, k), f) in table.iter().filter(|((_, k), _)| *k >= 1) {
        if *f > prop5_bound(n, k)? {
            above.push(format!("f_{k}({n})"));
        }
    }
    rec.check(
        "below_degree_bound",
        above.is_empty(),
        [
            (
                "entries",
                table.keys().filter(|(_, k)| *k >= 1).count().to_string(),
            ),
            ("violations", above.join("; ")),
        ],
    )
}

/// Exact `f_k(n)` against `n!/(n-k)!` for every `k <= n`. A smaller or
/// larger maximum is reported through the `verdict` fact; the check itself
/// fails only if the value escapes the bounds that must hold.
fn conjecture(s: &Settings, rec: &mut Recorder) -> Result<()> {
    for n in 1..=s.n_max {
        for k in 0..=n {
            let report = verify_conjecture(n, k, s.budget, s.cap)?;
            let search = &report.search;
            let outcome = match (report.verdict, report.sandwich_holds) {
                (_, false) => Outcome::Fail,
                (Verdict::Inconclusive, true) => Outcome::Inconclusive,
                _ => Outcome::Pass,
            };
            rec.record(
                "cylinder_is_optimal",
                outcome,
                [
                    n_fact(n),
                    ("k", k.to_string()),
                    ("value", search.best_size.to_string()),
                    ("status", search.status.as_str().to_string()),
                    ("conjectured", search.conjectured.to_string()),
                    ("verdict", report.verdict.as_str().to_string()),
                    (
                        "witness_is_cylinder",
                        search.witness_is_cylinder.to_string(),
                    ),
                    ("ball_size", report.ball_size.to_string()),
                    (
                        "intersection_bound_sum",
                        report.intersection_bound_sum.to_string(),
                    ),
                ],
            )?;
        }
    }
    Ok(())
}
