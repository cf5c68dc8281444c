//! The prefix graph: a complete digraph on distinct reads where edge
//! `i -> j` weighs `|pref(s_i, s_j)| = m - |ov(s_i, s_j)|`.
//!
//! Two builders produce the same matrix. [`build_naive`] runs one failure
//! function scan per ordered pair. [`build_indexed`] inserts every read into
//! a shared keyword trie with Aho-Corasick failure links and reads all
//! suffix/prefix overlaps off a single depth-first traversal.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Result, SspError};
use crate::reads::ReadSet;
use crate::strings::overlap_unchecked;

/// Diagonal sentinel: self-loops are not edges of the graph.
pub const FORBIDDEN: u32 = u32::MAX;

pub const DEFAULT_MAX_VERTICES: usize = 20_000;
pub const DEFAULT_INDEXED_THRESHOLD: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphBackend {
    Naive,
    Indexed,
    /// Naive below `threshold` vertices, indexed at or above it.
    Auto { threshold: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct GraphOptions {
    pub backend: GraphBackend,
    /// Dense storage needs `4 n^2` bytes; larger inputs are refused.
    pub max_vertices: usize,
}

impl Default for GraphOptions {
    fn default() -> Self {
        GraphOptions {
            backend: GraphBackend::Auto {
                threshold: DEFAULT_INDEXED_THRESHOLD,
            },
            max_vertices: DEFAULT_MAX_VERTICES,
        }
    }
}

/// Dense row-major prefix-length matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixGraph {
    n: usize,
    m: usize,
    weights: Vec<u32>,
    /// Read index (in the deduplicated read set) of each vertex.
    labels: Vec<usize>,
}

impl PrefixGraph {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn read_len(&self) -> usize {
        self.m
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Edge weight, `None` on the diagonal.
    pub fn weight(&self, i: usize, j: usize) -> Option<u32> {
        let w = self.weights[i * self.n + j];
        (w != FORBIDDEN).then_some(w)
    }

    /// Raw matrix entry including the [`FORBIDDEN`] diagonal.
    pub fn raw(&self, i: usize, j: usize) -> u32 {
        self.weights[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.weights[i * self.n..(i + 1) * self.n]
    }

    /// Builds a graph directly from a weight matrix; the diagonal is forced
    /// to [`FORBIDDEN`]. Intended for solvers and tests that do not start
    /// from reads.
    pub fn from_weights(m: usize, n: usize, mut weights: Vec<u32>) -> Result<Self> {
        if weights.len() != n * n {
            return Err(SspError::Argument(format!(
                "weight matrix has {} entries, expected {}",
                weights.len(),
                n * n
            )));
        }
        for i in 0..n {
            weights[i * n + i] = FORBIDDEN;
        }
        Ok(PrefixGraph {
            n,
            m,
            weights,
            labels: (0..n).collect(),
        })
    }

    /// Debug dump: a header of vertex labels, then one row per vertex.
    /// The diagonal is written as `-`.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
        writeln!(out, "vertex\t{}", header.join("\t"))?;
        for i in 0..self.n {
            let cells: Vec<String> = self
                .row(i)
                .iter()
                .map(|&w| if w == FORBIDDEN { "-".into() } else { w.to_string() })
                .collect();
            writeln!(out, "{}\t{}", self.labels[i], cells.join("\t"))?;
        }
        Ok(())
    }
}

fn check_size(rs: &ReadSet, opts: &GraphOptions) -> Result<()> {
    if rs.n() < 2 {
        return Err(SspError::Input(format!(
            "prefix graph needs at least 2 distinct reads, got {}",
            rs.n()
        )));
    }
    if rs.n() > opts.max_vertices {
        return Err(SspError::Capacity {
            what: "prefix graph vertex count",
            actual: rs.n(),
            limit: opts.max_vertices,
        });
    }
    Ok(())
}

/// Converts an overlap matrix into prefix weights, rejecting duplicate reads.
fn finish(rs: &ReadSet, mut overlaps: Vec<u32>) -> Result<PrefixGraph> {
    let n = rs.n();
    let m = rs.m() as u32;
    for i in 0..n {
        for j in 0..n {
            let cell = &mut overlaps[i * n + j];
            if i == j {
                *cell = FORBIDDEN;
            } else if *cell == m {
                return Err(SspError::Input(format!(
                    "reads {i} and {j} are identical; deduplicate before building the graph"
                )));
            } else {
                *cell = m - *cell;
            }
        }
    }
    Ok(PrefixGraph {
        n,
        m: rs.m(),
        weights: overlaps,
        labels: (0..n).collect(),
    })
}

pub fn build(rs: &ReadSet, opts: &GraphOptions) -> Result<PrefixGraph> {
    let indexed = match opts.backend {
        GraphBackend::Naive => false,
        GraphBackend::Indexed => true,
        GraphBackend::Auto { threshold } => rs.n() >= threshold,
    };
    if indexed {
        build_indexed_with(rs, opts)
    } else {
        build_naive_with(rs, opts)
    }
}

/// Pairwise construction, `O(n^2 m)`.
pub fn build_naive(rs: &ReadSet) -> Result<PrefixGraph> {
    build_naive_with(rs, &GraphOptions::default())
}

pub fn build_naive_with(rs: &ReadSet, opts: &GraphOptions) -> Result<PrefixGraph> {
    check_size(rs, opts)?;
    let n = rs.n();
    let reads = rs.reads();
    let mut overlaps = vec![0u32; n * n];
    overlaps
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(i, row)| {
            let u = reads[i].as_bytes();
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = overlap_unchecked(u, reads[j].as_bytes()) as u32;
            }
        });
    finish(rs, overlaps)
}

/// Keyword-trie construction, `O(total length + n^2)`.
pub fn build_indexed(rs: &ReadSet) -> Result<PrefixGraph> {
    build_indexed_with(rs, &GraphOptions::default())
}

pub fn build_indexed_with(rs: &ReadSet, opts: &GraphOptions) -> Result<PrefixGraph> {
    check_size(rs, opts)?;
    let strings: Vec<&[u8]> = rs.reads().iter().map(|r| r.as_bytes()).collect();
    finish(rs, all_pairs_overlaps(&strings))
}

#[derive(Debug, Default)]
struct TrieNode {
    children: Vec<(u8, u32)>,
    fail: u32,
    depth: u32,
    /// Strings whose last symbol lands on this node.
    ends: Vec<u32>,
    /// Strings that have this node's label as a suffix.
    suffix_of: Vec<u32>,
}

impl TrieNode {
    fn child(&self, b: u8) -> Option<u32> {
        self.children.iter().find(|(c, _)| *c == b).map(|&(_, v)| v)
    }
}

/// `n x n` row-major matrix with entry `(i, j) = |ov(s_i, s_j)|` for
/// arbitrary non-empty strings (the diagonal holds `|s_i|`).
///
/// Every string is inserted into one trie. The failure chain of string
/// `i`'s end node enumerates exactly the suffixes of `s_i` that are
/// prefixes of some string. A depth-first walk keeps, for each `i`, the
/// deepest such node on the current root path; when the walk reaches the
/// end of string `j` that depth is `|ov(s_i, s_j)|`.
pub fn all_pairs_overlaps(strings: &[&[u8]]) -> Vec<u32> {
    let n = strings.len();
    let mut nodes = vec![TrieNode::default()];
    let mut end_node = Vec::with_capacity(n);
    for (idx, s) in strings.iter().enumerate() {
        let mut cur = 0u32;
        for &b in s.iter() {
            cur = match nodes[cur as usize].child(b) {
                Some(next) => next,
                None => {
                    let next = nodes.len() as u32;
                    let depth = nodes[cur as usize].depth + 1;
                    nodes.push(TrieNode {
                        depth,
                        ..Default::default()
                    });
                    nodes[cur as usize].children.push((b, next));
                    next
                }
            };
        }
        nodes[cur as usize].ends.push(idx as u32);
        end_node.push(cur);
    }

    // failure links, breadth first
    let mut queue = std::collections::VecDeque::new();
    for &(_, c) in &nodes[0].children {
        queue.push_back(c);
    }
    while let Some(u) = queue.pop_front() {
        let children = nodes[u as usize].children.clone();
        for (b, v) in children {
            let mut f = nodes[u as usize].fail;
            let target = loop {
                if let Some(t) = nodes[f as usize].child(b) {
                    break t;
                }
                if f == 0 {
                    break 0;
                }
                f = nodes[f as usize].fail;
            };
            nodes[v as usize].fail = target;
            queue.push_back(v);
        }
    }

    for (i, &end) in end_node.iter().enumerate() {
        let mut x = end;
        while x != 0 {
            nodes[x as usize].suffix_of.push(i as u32);
            x = nodes[x as usize].fail;
        }
    }

    // transposed: row j holds overlaps of every i onto j
    let mut transposed = vec![0u32; n * n];
    let mut current = vec![0u32; n];
    let mut undo: Vec<(u32, u32)> = Vec::new();
    // (node, next child index, undo log length at entry)
    let mut stack: Vec<(u32, usize, usize)> = vec![(0, 0, 0)];
    while let Some(top) = stack.last_mut() {
        let (node, next_child, undo_mark) = *top;
        if next_child < nodes[node as usize].children.len() {
            top.1 += 1;
            let child = nodes[node as usize].children[next_child].1;
            let mark = undo.len();
            let depth = nodes[child as usize].depth;
            for &i in &nodes[child as usize].suffix_of {
                undo.push((i, current[i as usize]));
                current[i as usize] = depth;
            }
            for &j in &nodes[child as usize].ends {
                let j = j as usize;
                transposed[j * n..(j + 1) * n].copy_from_slice(&current);
            }
            stack.push((child, 0, mark));
        } else {
            while undo.len() > undo_mark {
                let (i, old) = undo.pop().expect("non-empty undo log");
                current[i as usize] = old;
            }
            stack.pop();
        }
    }

    let mut out = vec![0u32; n * n];
    for j in 0..n {
        for i in 0..n {
            out[i * n + j] = transposed[j * n + i];
        }
    }
    out
}
