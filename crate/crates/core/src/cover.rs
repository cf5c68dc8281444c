//! Minimum-weight cycle covers of the prefix graph, with every cycle
//! holding at least two vertices.
//!
//! The period of a cycle is its total edge weight.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Result, SspError};
use crate::graph::PrefixGraph;
use crate::reads::ReadSet;
use crate::stats::{small_period_limit, PeriodHistogram};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverBackend {
    /// Optimal, via the assignment problem. `O(n^3)`.
    Exact,
    /// Greedy edge selection. Valid but not necessarily optimal.
    Greedy,
}

impl std::str::FromStr for CoverBackend {
    type Err = SspError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(CoverBackend::Exact),
            "greedy" => Ok(CoverBackend::Greedy),
            other => Err(SspError::Argument(format!("unknown cover backend `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleCover {
    /// Each cycle starts at its smallest vertex; cycles are ordered by that vertex.
    pub cycles: Vec<Vec<usize>>,
    pub per_cycle_weight: Vec<u64>,
    pub total_weight: u64,
}

impl CycleCover {
    /// Decomposes a successor permutation into cycles.
    pub fn from_successors(g: &PrefixGraph, succ: &[usize]) -> Result<Self> {
        let n = g.order();
        if succ.len() != n {
            return Err(SspError::Argument("successor list has wrong length".into()));
        }
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        let mut per_cycle_weight = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut weight = 0u64;
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                cycle.push(v);
                let next = succ[v];
                weight += g
                    .weight(v, next)
                    .ok_or_else(|| SspError::Argument(format!("self-loop at vertex {v}")))?
                    as u64;
                v = next;
            }
            if v != start {
                return Err(SspError::Argument("successor list is not a permutation".into()));
            }
            cycles.push(cycle);
            per_cycle_weight.push(weight);
        }
        let total_weight = per_cycle_weight.iter().sum();
        Ok(CycleCover {
            cycles,
            per_cycle_weight,
            total_weight,
        })
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Structural checks: partition of the vertices, no cycle shorter than
    /// two, stored weights equal to the graph's edge sums.
    pub fn validate(&self, g: &PrefixGraph) -> Result<()> {
        let n = g.order();
        let mut seen = vec![false; n];
        let mut total = 0u64;
        for (cycle, &w) in self.cycles.iter().zip(&self.per_cycle_weight) {
            if cycle.len() < 2 {
                return Err(SspError::Input(format!("cycle {cycle:?} has fewer than 2 vertices")));
            }
            let mut sum = 0u64;
            for (k, &v) in cycle.iter().enumerate() {
                if v >= n || std::mem::replace(&mut seen[v], true) {
                    return Err(SspError::Input(format!("vertex {v} repeated or out of range")));
                }
                let next = cycle[(k + 1) % cycle.len()];
                sum += g.weight(v, next).expect("off-diagonal") as u64;
            }
            if sum != w {
                return Err(SspError::Input(format!(
                    "cycle {cycle:?} stored weight {w}, recomputed {sum}"
                )));
            }
            total += w;
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(SspError::Input(format!("vertex {v} is not covered")));
        }
        if total != self.total_weight {
            return Err(SspError::Input("total weight mismatch".into()));
        }
        Ok(())
    }

    /// Period bounds every cover must satisfy.
    ///
    /// * each cycle's period is at least the smallest period of every read on it;
    /// * for every `i`, at most half the reads of period `<= i` can sit on
    ///   cycles of period `<= i`, since every cycle holds two reads or more.
    ///
    /// `rs` and `h` must describe the graph's vertex set.
    pub fn check_period_bounds(&self, rs: &ReadSet, h: &PeriodHistogram) -> Result<()> {
        for (cycle, &period) in self.cycles.iter().zip(&self.per_cycle_weight) {
            let max_read_period = cycle
                .iter()
                .map(|&v| rs.get(v).smallest_period())
                .max()
                .unwrap_or(0);
            if (period as usize) < max_read_period {
                return Err(SspError::Input(format!(
                    "cycle {cycle:?} has period {period} below read period {max_read_period}"
                )));
            }
        }
        let mut cycles_upto = vec![0u64; h.m() + 1];
        for &p in &self.per_cycle_weight {
            if (p as usize) <= h.m() {
                cycles_upto[p as usize] += 1;
            }
        }
        let mut cycles = 0u64;
        for (i, &at) in cycles_upto.iter().enumerate().skip(1) {
            cycles += at;
            if 2 * cycles > h.cum_count(i) {
                return Err(SspError::Input(format!(
                    "{cycles} cycles of period <= {i} but only {} reads of period <= {i}",
                    h.cum_count(i)
                )));
            }
        }
        Ok(())
    }
}

pub fn cover(g: &PrefixGraph, backend: CoverBackend) -> Result<CycleCover> {
    match backend {
        CoverBackend::Exact => exact_cover(g),
        CoverBackend::Greedy => greedy_cover(g),
    }
}

fn check_order(g: &PrefixGraph) -> Result<()> {
    if g.order() < 2 {
        Err(SspError::Input("a cycle cover needs at least 2 vertices".into()))
    } else {
        Ok(())
    }
}

/// Minimum-weight cover as a minimum-cost assignment with the diagonal
/// priced above any complete cover, solved with the `O(n^3)`
/// shortest-augmenting-path Hungarian method. Rows are inserted and columns
/// scanned in index order, which fixes the result among equal-cost optima.
pub fn exact_cover(g: &PrefixGraph) -> Result<CycleCover> {
    check_order(g)?;
    let n = g.order();
    let forbidden = (n as i64) * (g.read_len() as i64 + 1) + 1;
    let cost = |i: usize, j: usize| match g.weight(i, j) {
        Some(w) => w as i64,
        None => forbidden,
    };

    // 1-based potentials; p[j] = row matched to column j
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        p[0] = row;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut succ = vec![0usize; n];
    for j in 1..=n {
        succ[p[j] - 1] = j - 1;
    }
    if succ.iter().enumerate().any(|(i, &j)| i == j) {
        // unreachable for n >= 2: a derangement always beats the sentinel
        return Err(SspError::Input("assignment used a self-loop".into()));
    }
    CycleCover::from_successors(g, &succ)
}

/// Greedy cover: edges are taken by increasing weight (largest overlap
/// first), ties by `(source, target)`, whenever the source has no successor
/// and the target no predecessor yet. Closing a path into a cycle is allowed
/// unless it would strand a lone vertex that could then only close on itself.
pub fn greedy_cover(g: &PrefixGraph) -> Result<CycleCover> {
    check_order(g)?;
    let n = g.order();

    // per-row column order by (weight, column)
    let order: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            let mut cols: Vec<u32> = (0..n as u32).filter(|&j| j as usize != i).collect();
            cols.sort_by_key(|&j| (g.raw(i, j as usize), j));
            cols
        })
        .collect();
    let mut cursor = vec![0usize; n];
    let mut heap: BinaryHeap<Reverse<(u32, u32, u32)>> = (0..n)
        .map(|i| {
            let j = order[i][0];
            Reverse((g.raw(i, j as usize), i as u32, j))
        })
        .collect();

    let mut succ = vec![usize::MAX; n];
    let mut has_pred = vec![false; n];
    // for a path end: its head; for a path head: its end
    let mut head_of = (0..n).collect::<Vec<_>>();
    let mut end_of = (0..n).collect::<Vec<_>>();
    let mut open_paths = n;
    let mut singletons = n;
    let mut committed = 0;

    while committed < n {
        let Reverse((_, i, j)) = heap.pop().expect("a complete graph always has a free edge");
        let (i, j) = (i as usize, j as usize);
        if succ[i] != usize::MAX {
            continue;
        }
        let acceptable = !has_pred[j] && {
            let closing = head_of[i] == j;
            !(closing && open_paths == 2 && singletons == 1)
        };
        if acceptable {
            let closing = head_of[i] == j;
            if !closing {
                singletons -= usize::from(head_of[i] == i) + usize::from(end_of[j] == j);
                let (h, e) = (head_of[i], end_of[j]);
                end_of[h] = e;
                head_of[e] = h;
            }
            open_paths -= 1;
            succ[i] = j;
            has_pred[j] = true;
            committed += 1;
        } else {
            cursor[i] += 1;
            let j = order[i][cursor[i]];
            heap.push(Reverse((g.raw(i, j as usize), i as u32, j)));
        }
    }
    CycleCover::from_successors(g, &succ)
}

/// Cycle indices split by period against `floor(m * alpha)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub limit: usize,
    pub small: Vec<usize>,
    pub large: Vec<usize>,
}

impl Classification {
    pub fn n_small(&self) -> usize {
        self.small.len()
    }
}

pub fn classify(c: &CycleCover, m: usize, alpha: f64) -> Classification {
    let limit = small_period_limit(m, alpha);
    let (small, large) = (0..c.len()).partition(|&k| c.per_cycle_weight[k] as usize <= limit);
    Classification { limit, small, large }
}
