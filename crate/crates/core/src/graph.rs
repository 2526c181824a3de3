//! Undirected simple graphs on `{1..n}` with bitset adjacency rows.

use std::fmt::Write as _;

use crate::bits::BitSet;
use crate::error::{check_size, Error, Result};
use crate::perm::Permutation;

#[derive(Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    rows: Vec<BitSet>,
    edge_count: usize,
}

impl UndirectedGraph {
    pub fn empty(vertex_count: usize) -> Self {
        UndirectedGraph {
            rows: vec![BitSet::new(vertex_count); vertex_count],
            edge_count: 0,
        }
    }

    pub fn complete(vertex_count: usize) -> Self {
        let mut g = Self::empty(vertex_count);
        for u in 1..=vertex_count {
            for v in u + 1..=vertex_count {
                g.add_edge(u, v).expect("valid edge");
            }
        }
        g
    }

    /// Builds a graph from 1-based edges; duplicates are ignored.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(vertex_count);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Adds the 1-based edge `{u, v}`.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.vertex_count();
        if u == v {
            return Err(Error::InvalidArgument(format!("self-loop at {u}")));
        }
        if u == 0 || v == 0 || u > n || v > n {
            return Err(Error::InvalidArgument(format!(
                "edge {{{u},{v}}} outside 1..={n}"
            )));
        }
        self.add_edge_raw(u - 1, v - 1);
        Ok(())
    }

    pub(crate) fn add_edge_raw(&mut self, u: usize, v: usize) {
        if !self.rows[u].contains(v) {
            self.rows[u].insert(v);
            self.rows[v].insert(u);
            self.edge_count += 1;
        }
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u >= 1 && v >= 1 && u <= self.vertex_count() && self.rows[u - 1].contains(v - 1)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v - 1].len()
    }

    /// 1-based neighbours of `v`, increasing.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[v - 1].iter().map(|u| u + 1)
    }

    /// 0-based adjacency row.
    #[inline]
    pub fn row(&self, v: usize) -> &BitSet {
        &self.rows[v]
    }

    pub(crate) fn rows(&self) -> &[BitSet] {
        &self.rows
    }

    /// Edges `(u, v)` with `u < v`, 1-based, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (u, row) in self.rows.iter().enumerate() {
            out.extend(row.iter().filter(|&v| v > u).map(|v| (u + 1, v + 1)));
        }
        out
    }

    /// Graph whose edges lie in exactly one of `self`, `other`.
    pub fn symmetric_difference(&self, other: &UndirectedGraph) -> Result<UndirectedGraph> {
        check_size(self.vertex_count(), other.vertex_count())?;
        let mut g = Self::empty(self.vertex_count());
        for (u, (a, b)) in self.rows.iter().zip(&other.rows).enumerate() {
            for v in a.iter().chain(b.iter()).filter(|&v| v > u) {
                if a.contains(v) != b.contains(v) {
                    g.add_edge_raw(u, v);
                }
            }
        }
        Ok(g)
    }

    /// Edge-list text: `n m` header, then one `u v` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.vertex_count(), self.edge_count);
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}").expect("write to string");
        }
        out
    }

    /// Parses the edge-list format. Blank lines and `#` comments are
    /// skipped; the header edge count must match.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let parse_pair = |line: &str| -> Result<(usize, usize)> {
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
                _ => Err(Error::Parse {
                    input: line.to_string(),
                    reason: "expected two non-negative integers".into(),
                }),
            }
        };
        let header = lines.next().ok_or_else(|| Error::Parse {
            input: String::new(),
            reason: "missing `n m` header".into(),
        })?;
        let (n, m) = parse_pair(header)?;
        let mut g = Self::empty(n);
        let mut listed = 0;
        for line in lines {
            let (u, v) = parse_pair(line)?;
            g.add_edge(u, v)?;
            listed += 1;
        }
        if listed != m {
            return Err(Error::Parse {
                input: header.to_string(),
                reason: format!("header declares {m} edges but {listed} were listed"),
            });
        }
        Ok(g)
    }
}

impl std::fmt::Debug for UndirectedGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UndirectedGraph")
            .field("vertex_count", &self.vertex_count())
            .field("edges", &self.edges())
            .finish()
    }
}

/// Graph on symbols with `x ~ y` iff `x < y` and `y` precedes `x` in `g`.
pub fn inversion_graph(g: &Permutation) -> UndirectedGraph {
    let n = g.n();
    let mut graph = UndirectedGraph::empty(n);
    let entries = g.as_slice();
    for i in 0..n {
        for j in i + 1..n {
            if entries[i] > entries[j] {
                graph.add_edge_raw(entries[i] as usize, entries[j] as usize);
            }
        }
    }
    graph
}

/// Graph on symbols with `x ~ y` iff `s` and `g` order the symbols `x, y`
/// differently. Its vertex covers are exactly the common deletion sets of
/// `s` and `g`.
pub fn ulam_graph(s: &Permutation, g: &Permutation) -> Result<UndirectedGraph> {
    check_size(s.n(), g.n())?;
    let n = s.n();
    let ps = s.inverse();
    let pg = g.inverse();
    let (ps, pg) = (ps.as_slice(), pg.as_slice());
    let mut graph = UndirectedGraph::empty(n);
    for x in 0..n {
        for y in x + 1..n {
            if (ps[x] < ps[y]) != (pg[x] < pg[y]) {
                graph.add_edge_raw(x, y);
            }
        }
    }
    Ok(graph)
}
