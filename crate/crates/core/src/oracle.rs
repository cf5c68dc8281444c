//! Brute-force references used to check the fast paths. Everything here
//! follows the definitions directly and refuses inputs beyond a size cap.

use crate::error::{Result, SspError};
use crate::graph::PrefixGraph;

pub const DEFAULT_SSP_LIMIT: usize = 12;
pub const DEFAULT_COVER_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult<W> {
    pub value: usize,
    pub witness: W,
}

/// Least `p` in `1..=|s|` with `s[i] == s[i + p]` wherever both exist.
pub fn naive_period(s: &[u8]) -> usize {
    (1..=s.len())
        .find(|&p| (0..s.len() - p).all(|i| s[i] == s[i + p]))
        .unwrap_or(s.len())
}

/// Largest `k` such that the last `k` symbols of `u` equal the first `k` of `v`.
pub fn naive_overlap(u: &[u8], v: &[u8]) -> usize {
    (0..=u.len().min(v.len()))
        .rev()
        .find(|&k| u[u.len() - k..] == v[..k])
        .unwrap_or(0)
}

fn contains(hay: &[u8], needle: &[u8]) -> bool {
    needle.len() <= hay.len() && hay.windows(needle.len()).any(|w| w == needle)
}

/// Drops duplicates and strings that occur inside another input string.
pub fn substring_free(strings: &[&[u8]]) -> Vec<Vec<u8>> {
    let mut kept: Vec<Vec<u8>> = Vec::new();
    for (i, s) in strings.iter().enumerate() {
        let swallowed = strings.iter().enumerate().any(|(j, t)| {
            j != i && contains(t, s) && (t.len() > s.len() || j < i)
        });
        if !swallowed {
            kept.push(s.to_vec());
        }
    }
    kept
}

fn merge_in_order(strings: &[Vec<u8>], order: &[usize]) -> Vec<u8> {
    let mut out = strings[order[0]].clone();
    for w in order.windows(2) {
        let (a, b) = (&strings[w[0]], &strings[w[1]]);
        let k = naive_overlap(a, b);
        out.extend_from_slice(&b[k..]);
    }
    out
}

fn capacity(what: &'static str, actual: usize, limit: usize) -> Result<()> {
    if actual > limit {
        Err(SspError::Capacity { what, actual, limit })
    } else {
        Ok(())
    }
}

/// Exact shortest superstring by dynamic programming over
/// `(subset, last string)` states, maximizing total overlap.
pub fn exact_ssp(strings: &[&[u8]], limit: usize) -> Result<OracleResult<Vec<u8>>> {
    if strings.is_empty() || strings.iter().any(|s| s.is_empty()) {
        return Err(SspError::Input("exact_ssp needs non-empty strings".into()));
    }
    let s = substring_free(strings);
    let k = s.len();
    capacity("superstring oracle input count", k, limit)?;
    let ov: Vec<Vec<usize>> = s
        .iter()
        .map(|a| s.iter().map(|b| naive_overlap(a, b)).collect())
        .collect();

    let full = (1usize << k) - 1;
    // best[mask][last] = max overlap of an ordering of `mask` ending in `last`
    let mut best = vec![vec![None::<usize>; k]; full + 1];
    let mut from = vec![vec![usize::MAX; k]; full + 1];
    for i in 0..k {
        best[1 << i][i] = Some(0);
    }
    for mask in 1..=full {
        for last in 0..k {
            let Some(cur) = best[mask][last] else { continue };
            for next in 0..k {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let nm = mask | (1 << next);
                let cand = cur + ov[last][next];
                if best[nm][next].is_none_or(|b| cand > b) {
                    best[nm][next] = Some(cand);
                    from[nm][next] = last;
                }
            }
        }
    }
    let (mut last, saved) = (0..k)
        .map(|i| (i, best[full][i].expect("all states reachable")))
        .fold((0, 0), |acc, x| if x.1 > acc.1 { x } else { acc });
    let total: usize = s.iter().map(Vec::len).sum();

    let mut order = Vec::with_capacity(k);
    let mut mask = full;
    while mask != 0 {
        order.push(last);
        let prev = from[mask][last];
        mask &= !(1 << last);
        last = prev;
    }
    order.reverse();
    let witness = merge_in_order(&s, &order);
    debug_assert_eq!(witness.len(), total - saved);
    Ok(OracleResult {
        value: total - saved,
        witness,
    })
}

/// Exact shortest superstring by enumerating every ordering. Only used to
/// cross-check [`exact_ssp`].
pub fn exact_ssp_by_permutation(strings: &[&[u8]], limit: usize) -> Result<usize> {
    let s = substring_free(strings);
    capacity("permutation oracle input count", s.len(), limit)?;
    let mut order: Vec<usize> = (0..s.len()).collect();
    let mut best = usize::MAX;
    permute(&mut order, 0, &mut |o| best = best.min(merge_in_order(&s, o).len()));
    Ok(best)
}

fn permute(v: &mut [usize], k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        visit(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, visit);
        v.swap(k, i);
    }
}

/// Minimum cover over every fixed-point-free permutation; the witness lists
/// the cycles.
pub fn brute_cycle_cover(g: &PrefixGraph, limit: usize) -> Result<OracleResult<Vec<Vec<usize>>>> {
    let n = g.order();
    capacity("cycle cover oracle vertex count", n, limit)?;
    if n < 2 {
        return Err(SspError::Input("no fixed-point-free permutation on < 2 vertices".into()));
    }
    let mut succ = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut best: Option<(usize, Vec<usize>)> = None;
    derangements(g, 0, 0, &mut succ, &mut used, &mut best);
    let (value, succ) = best.expect("a derangement exists for n >= 2");

    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            cycle.push(v);
            v = succ[v];
        }
        cycles.push(cycle);
    }
    Ok(OracleResult { value, witness: cycles })
}

fn derangements(
    g: &PrefixGraph,
    i: usize,
    cost: usize,
    succ: &mut Vec<usize>,
    used: &mut Vec<bool>,
    best: &mut Option<(usize, Vec<usize>)>,
) {
    let n = g.order();
    if i == n {
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            *best = Some((cost, succ.clone()));
        }
        return;
    }
    for j in 0..n {
        if j == i || used[j] {
            continue;
        }
        used[j] = true;
        succ[i] = j;
        let w = g.weight(i, j).expect("off-diagonal") as usize;
        derangements(g, i + 1, cost + w, succ, used, best);
        used[j] = false;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_naive;
    use crate::reads::ReadSet;
    use proptest::prelude::*;

    #[test]
    fn naive_examples() {
        assert_eq!(naive_period(b"abab"), 2);
        assert_eq!(naive_period(b"a"), 1);
        assert_eq!(naive_overlap(b"abcab", b"cabd"), 3);
        assert_eq!(naive_overlap(b"ab", b"ab"), 2);
    }

    #[test]
    fn ssp_examples() {
        let r = exact_ssp(&[b"abc", b"bca", b"cab"], 12).unwrap();
        assert_eq!(r.value, 5);
        assert_eq!(r.witness.len(), 5);
        assert_eq!(exact_ssp_by_permutation(&[b"abc", b"bca", b"cab"], 8).unwrap(), 5);
        assert_eq!(exact_ssp(&[b"ab"], 12).unwrap().value, 2);
        assert_eq!(exact_ssp(&[b"abc", b"xyz"], 12).unwrap().value, 6);
        assert_eq!(exact_ssp(&[b"abab", b"baba"], 12).unwrap().value, 5);
        // contained and repeated strings vanish
        assert_eq!(exact_ssp(&[b"abcd", b"bc", b"abcd"], 12).unwrap().value, 4);
    }

    #[test]
    fn limits_are_enforced() {
        let strs: Vec<Vec<u8>> = (0..5u8).map(|i| vec![b'a' + i; 2]).collect();
        let refs: Vec<&[u8]> = strs.iter().map(|s| &s[..]).collect();
        assert!(matches!(exact_ssp(&refs, 4), Err(SspError::Capacity { .. })));
        let rs = ReadSet::from_strs(&strs).unwrap();
        let g = build_naive(&rs).unwrap();
        assert!(matches!(brute_cycle_cover(&g, 4), Err(SspError::Capacity { .. })));
    }

    #[test]
    fn brute_cover_two_vertices() {
        let rs = ReadSet::from_strs(&["abc", "cxx"]).unwrap();
        let g = build_naive(&rs).unwrap();
        let r = brute_cycle_cover(&g, 8).unwrap();
        assert_eq!(r.value, (g.weight(0, 1).unwrap() + g.weight(1, 0).unwrap()) as usize);
        assert_eq!(r.witness, vec![vec![0, 1]]);
    }

    proptest! {
        #[test]
        fn dp_matches_enumeration(strings in prop::collection::vec("[ab]{1,5}", 1..=7)) {
            let refs: Vec<&[u8]> = strings.iter().map(|s| s.as_bytes()).collect();
            let dp = exact_ssp(&refs, 12).unwrap();
            prop_assert_eq!(dp.value, exact_ssp_by_permutation(&refs, 8).unwrap());
            for s in &refs {
                prop_assert!(contains(&dp.witness, s));
            }
            prop_assert!(dp.value >= refs.iter().map(|s| s.len()).max().unwrap());
        }
    }
}
