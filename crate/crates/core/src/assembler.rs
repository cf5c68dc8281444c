//! Superstring construction from a cycle cover.
//!
//! For each cycle a representative read is chosen and the cycle is unrolled
//! into `sigma = pref(r, r_2) pref(r_2, r_3) ... pref(r_k, r) r`. The set of
//! sigma strings is then compressed by greedy maximum-overlap merging.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::io::Write;

use aho_corasick::{AhoCorasick, MatchKind};
use rayon::prelude::*;
use serde::Serialize;

use crate::cover::{self, classify, CoverBackend, CycleCover};
use crate::error::{Result, SspError};
use crate::graph::{self, all_pairs_overlaps, GraphOptions, PrefixGraph};
use crate::reads::{dedupe, ReadSet};
use crate::stats::{evaluate, histogram, ratio_table, select_alpha, CompressionFactor, RatioRow};
use crate::strings::Sequence;

/// Read with the smallest index on the cycle.
pub fn representative(cycle: &[usize]) -> usize {
    *cycle.iter().min().expect("cycles are non-empty")
}

/// Unrolls `cycle` starting at `rep`: the prefix strings along the cycle
/// followed by the representative read. `|sigma| = period + m`.
pub fn build_sigma(cycle: &[usize], rep: usize, rs: &ReadSet, g: &PrefixGraph) -> Sequence {
    let start = cycle
        .iter()
        .position(|&v| v == rep)
        .expect("representative lies on the cycle");
    let k = cycle.len();
    let mut out = Vec::with_capacity(rs.m() * 2);
    for step in 0..k {
        let u = cycle[(start + step) % k];
        let v = cycle[(start + step + 1) % k];
        let w = g.weight(u, v).expect("cycle edges are off-diagonal") as usize;
        out.extend_from_slice(&rs.get(u).as_bytes()[..w]);
    }
    out.extend_from_slice(rs.get(rep).as_bytes());
    Sequence::from_vec_unchecked(out)
}

/// Indices of strings that are neither duplicates of an earlier string nor
/// proper substrings of another string.
fn substring_free_indices(strings: &[&[u8]]) -> Vec<usize> {
    let mut first: HashMap<&[u8], usize> = HashMap::new();
    let mut unique = Vec::new();
    for (i, s) in strings.iter().enumerate() {
        if first.insert(s, i).is_none() {
            unique.push(i);
        }
    }
    let patterns: Vec<&[u8]> = unique.iter().map(|&i| strings[i]).collect();
    let ac = AhoCorasick::builder()
        .match_kind(MatchKind::Standard)
        .build(&patterns)
        .expect("automaton over non-empty patterns");
    let mut contained = vec![false; patterns.len()];
    for (pid, hay) in patterns.iter().enumerate() {
        for mat in ac.find_overlapping_iter(*hay) {
            let other = mat.pattern().as_usize();
            if other != pid {
                contained[other] = true;
            }
        }
    }
    unique
        .into_iter()
        .zip(contained)
        .filter(|(_, c)| !c)
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Compressed {
    pub superstring: Sequence,
    /// Inputs dropped because they occur inside another input.
    pub contained_dropped: usize,
}

/// Greedy merging: repeatedly joins the pair with the largest overlap,
/// ties by smallest `(left, right)` input index, until one string remains.
pub fn greedy_compress(strings: &[Sequence]) -> Result<Compressed> {
    if strings.is_empty() {
        return Err(SspError::Input("nothing to compress".into()));
    }
    let all: Vec<&[u8]> = strings.iter().map(|s| s.as_bytes()).collect();
    let keep = substring_free_indices(&all);
    let contained_dropped = strings.len() - keep.len();
    let s: Vec<&[u8]> = keep.iter().map(|&i| all[i]).collect();
    let k = s.len();
    let ov = all_pairs_overlaps(&s);

    // Each row's candidate successors by (overlap desc, index asc); a heap
    // holds the best untried candidate of every row.
    let key = |i: usize, j: usize| (u32::MAX - ov[i * k + j], i as u32, j as u32);
    let order: Vec<Vec<u32>> = (0..k)
        .into_par_iter()
        .map(|i| {
            let mut cols: Vec<u32> = (0..k as u32).filter(|&j| j as usize != i).collect();
            cols.sort_by_key(|&j| key(i, j as usize));
            cols
        })
        .collect();
    let mut cursor = vec![0usize; k];
    let mut heap: BinaryHeap<Reverse<(u32, u32, u32)>> = order
        .iter()
        .enumerate()
        .filter_map(|(i, cols)| cols.first().map(|&j| Reverse(key(i, j as usize))))
        .collect();

    let mut succ = vec![usize::MAX; k];
    let mut has_pred = vec![false; k];
    let mut head_of: Vec<usize> = (0..k).collect();
    let mut end_of: Vec<usize> = (0..k).collect();
    let mut merges = 0;
    while merges + 1 < k {
        let Reverse((_, i, j)) = heap.pop().expect("candidate edges remain until merged");
        let (i, j) = (i as usize, j as usize);
        if succ[i] != usize::MAX {
            continue;
        }
        if !has_pred[j] && head_of[i] != j {
            let (h, e) = (head_of[i], end_of[j]);
            end_of[h] = e;
            head_of[e] = h;
            succ[i] = j;
            has_pred[j] = true;
            merges += 1;
        } else {
            cursor[i] += 1;
            if let Some(&next) = order[i].get(cursor[i]) {
                heap.push(Reverse(key(i, next as usize)));
            }
        }
    }

    let mut out = Vec::new();
    for start in (0..k).filter(|&v| !has_pred[v]) {
        let mut v = start;
        out.extend_from_slice(s[v]);
        while succ[v] != usize::MAX {
            let next = succ[v];
            out.extend_from_slice(&s[next][ov[v * k + next] as usize..]);
            v = next;
        }
    }
    Ok(Compressed {
        superstring: Sequence::from_vec_unchecked(out),
        contained_dropped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaChoice {
    /// Minimize the bound over `alpha = i / m`.
    Auto,
    /// Values above 1 are clamped to 1.
    Explicit(f64),
}

impl std::str::FromStr for AlphaChoice {
    type Err = SspError;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(AlphaChoice::Auto);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| SspError::Argument(format!("alpha must be `auto` or a number, got `{s}`")))?;
        if !(v > 0.0 && v <= 1.0) {
            return Err(SspError::Argument(format!("alpha = {v} outside (0, 1]")));
        }
        Ok(AlphaChoice::Explicit(v))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AssembleOptions {
    pub alpha: AlphaChoice,
    pub c: CompressionFactor,
    pub backend: CoverBackend,
    pub graph: GraphOptions,
    /// Vertex cap for the exact backend.
    pub exact_max_vertices: usize,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions {
            alpha: AlphaChoice::Auto,
            c: CompressionFactor::GREEDY,
            backend: CoverBackend::Exact,
            graph: GraphOptions::default(),
            exact_max_vertices: 3_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssemblyStats {
    /// Distinct reads assembled.
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    /// Executed compression factor as `num/den`.
    pub c: String,
    pub wt_c: u64,
    pub cycles_small: usize,
    pub cycles_large: usize,
    pub w_sigma_len: usize,
    pub tau_len: usize,
    /// Guaranteed ratio at `alpha` with the executed `c`.
    pub beta_bound: f64,
    /// Small-period mass at `alpha`.
    pub sp: f64,
    pub contained_dropped: usize,
    /// Only one distinct read: no cover, `tau` is the read itself.
    pub degenerate: bool,
}

#[derive(Debug, Clone)]
pub struct Assembly {
    pub cover: Option<CycleCover>,
    pub sigma_strings: Vec<Sequence>,
    pub tau: Sequence,
    pub ratio: RatioRow,
    pub stats: AssemblyStats,
    c: CompressionFactor,
}

impl Assembly {
    /// Absolute length bound `2 OPT + c ((1 - alpha) / alpha) OPT + (c / 2) sp m`
    /// for a known optimum `opt`.
    pub fn theorem_bound(&self, opt: usize) -> f64 {
        let c = self.c.value();
        let alpha = self.stats.alpha;
        let opt = opt as f64;
        2.0 * opt + c * ((1.0 - alpha) / alpha) * opt + (c / 2.0) * self.stats.sp * self.stats.m as f64
    }
}

/// Full pipeline on the distinct reads of `rs`.
pub fn assemble(rs: &ReadSet, opts: &AssembleOptions) -> Result<Assembly> {
    let distinct = dedupe(rs).reads;
    let h = histogram(&distinct);
    let ratio = match opts.alpha {
        AlphaChoice::Auto => select_alpha(&ratio_table(&h, opts.c))?,
        AlphaChoice::Explicit(a) if a > 0.0 => evaluate(&h, a.min(1.0), opts.c)?,
        AlphaChoice::Explicit(a) => {
            return Err(SspError::Argument(format!("alpha = {a} must be positive")))
        }
    };
    let sp = h.sp_upto(ratio.period);

    let n = distinct.n();
    let m = distinct.m();
    let mut stats = AssemblyStats {
        n,
        m,
        alpha: ratio.alpha,
        c: opts.c.to_string(),
        wt_c: 0,
        cycles_small: 0,
        cycles_large: 0,
        w_sigma_len: m,
        tau_len: m,
        beta_bound: ratio.beta,
        sp,
        contained_dropped: 0,
        degenerate: n == 1,
    };
    if n == 1 {
        let tau = distinct.get(0).clone();
        return Ok(Assembly {
            cover: None,
            sigma_strings: vec![tau.clone()],
            tau,
            ratio,
            stats,
            c: opts.c,
        });
    }

    if opts.backend == CoverBackend::Exact && n > opts.exact_max_vertices {
        return Err(SspError::Capacity {
            what: "exact cycle cover vertex count",
            actual: n,
            limit: opts.exact_max_vertices,
        });
    }
    let g = graph::build(&distinct, &opts.graph)?;
    let cover = cover::cover(&g, opts.backend)?;
    let classes = classify(&cover, m, ratio.alpha);

    let sigma_strings: Vec<Sequence> = cover
        .cycles
        .par_iter()
        .map(|cycle| build_sigma(cycle, representative(cycle), &distinct, &g))
        .collect();
    let w_sigma_len = sigma_strings.iter().map(Sequence::len).sum();
    let compressed = greedy_compress(&sigma_strings)?;

    let report = verify(compressed.superstring.as_bytes(), &distinct);
    if !report.pass {
        return Err(SspError::Input(format!(
            "internal error: {} reads missing from the superstring",
            report.missing.len()
        )));
    }

    stats.wt_c = cover.total_weight;
    stats.cycles_small = classes.small.len();
    stats.cycles_large = classes.large.len();
    stats.w_sigma_len = w_sigma_len;
    stats.tau_len = compressed.superstring.len();
    stats.contained_dropped = compressed.contained_dropped;
    Ok(Assembly {
        cover: Some(cover),
        sigma_strings,
        tau: compressed.superstring,
        ratio,
        stats,
        c: opts.c,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub total: usize,
    pub found: usize,
    /// Indices of reads absent from the superstring.
    pub missing: Vec<usize>,
    pub missing_reads: Vec<String>,
    pub pass: bool,
}

/// Checks that every read occurs in `tau` with one multi-pattern scan.
pub fn verify(tau: &[u8], rs: &ReadSet) -> VerifyReport {
    let mut ids: HashMap<&[u8], usize> = HashMap::new();
    let mut patterns: Vec<&[u8]> = Vec::new();
    let read_pattern: Vec<usize> = rs
        .reads()
        .iter()
        .map(|r| {
            *ids.entry(r.as_bytes()).or_insert_with(|| {
                patterns.push(r.as_bytes());
                patterns.len() - 1
            })
        })
        .collect();
    let ac = AhoCorasick::builder()
        .match_kind(MatchKind::Standard)
        .build(&patterns)
        .expect("automaton over reads");
    let mut seen = vec![false; patterns.len()];
    for mat in ac.find_overlapping_iter(tau) {
        seen[mat.pattern().as_usize()] = true;
    }
    let missing: Vec<usize> = (0..rs.n()).filter(|&i| !seen[read_pattern[i]]).collect();
    VerifyReport {
        total: rs.n(),
        found: rs.n() - missing.len(),
        missing_reads: missing.iter().map(|&i| rs.get(i).to_string()).collect(),
        pass: missing.is_empty(),
        missing,
    }
}

pub fn write_fasta<W: Write>(tau: &Sequence, header: &str, mut out: W) -> Result<()> {
    writeln!(out, ">{header}")?;
    out.write_all(tau.as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_raw<W: Write>(tau: &Sequence, mut out: W) -> Result<()> {
    out.write_all(tau.as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}
