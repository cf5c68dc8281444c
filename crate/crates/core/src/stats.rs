//! Period statistics of a read set and the guaranteed approximation ratio
//! as a function of the small-cycle threshold `alpha`.
//!
//! For a histogram `n(i)` of smallest periods over reads of length `m`:
//!
//! ```text
//! sp(alpha)    = sum_{i <= floor(m * alpha)} n(i) / i
//! beta(alpha)  = 2 + c * (1 - alpha) / alpha  +  (c / 2) * sp(alpha) * m / n
//! ```
//!
//! where `c` is the compression factor of the superstring compression step.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SspError};
use crate::reads::ReadSet;

/// Slack used when flooring `m * alpha`, so that `alpha = i / m` always
/// lands on period `i` despite rounding in the division.
const FLOOR_SLACK: f64 = 1e-9;

/// Horizontal reference line of the period plot, as a fraction of `n / m`.
pub const SMALL_SP_REFERENCE: f64 = 0.02;

/// Exact rational compression factor `num / den` in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CompressionFactor {
    pub num: u64,
    pub den: u64,
}

impl CompressionFactor {
    /// Factor assumed by the analytic tables.
    pub const REFERENCE: CompressionFactor = CompressionFactor { num: 38, den: 63 };
    /// Factor guaranteed by greedy merging, which is what the assembler executes.
    pub const GREEDY: CompressionFactor = CompressionFactor { num: 1, den: 2 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num == 0 || num > den {
            return Err(SspError::Argument(format!(
                "compression factor {num}/{den} must lie in (0, 1]"
            )));
        }
        Ok(CompressionFactor { num, den })
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for CompressionFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl std::str::FromStr for CompressionFactor {
    type Err = SspError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || SspError::Argument(format!("cannot parse compression factor `{s}`"));
        let (num, den) = match s.trim().split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s.trim(), "1"),
        };
        let num = num.parse().map_err(|_| bad())?;
        let den = den.parse().map_err(|_| bad())?;
        CompressionFactor::new(num, den)
    }
}

/// Counts `n(i)` of reads by smallest period `i`, `1 <= i <= m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodHistogram {
    m: usize,
    // index 0 unused
    counts: Vec<u64>,
    n: u64,
}

impl PeriodHistogram {
    /// Builds a histogram from explicit `(period, count)` pairs.
    pub fn from_counts(m: usize, counts: &BTreeMap<usize, u64>) -> Result<Self> {
        if m == 0 {
            return Err(SspError::Argument("read length must be positive".into()));
        }
        let mut dense = vec![0u64; m + 1];
        for (&period, &count) in counts {
            if period == 0 || period > m {
                return Err(SspError::Argument(format!(
                    "period {period} outside [1, {m}]"
                )));
            }
            dense[period] += count;
        }
        let n = dense.iter().sum();
        if n == 0 {
            return Err(SspError::Input("histogram has no reads".into()));
        }
        Ok(PeriodHistogram { m, counts: dense, n })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `n(i)`; zero outside `[1, m]`.
    pub fn count(&self, period: usize) -> u64 {
        self.counts.get(period).copied().unwrap_or(0)
    }

    /// Non-zero `(period, count)` pairs in increasing period order.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i, c))
    }

    /// `sum_{i <= k} n(i) / i`, accumulated in increasing `i`.
    pub fn sp_upto(&self, k: usize) -> f64 {
        let k = k.min(self.m);
        let mut acc = 0.0;
        for i in 1..=k {
            acc += self.counts[i] as f64 / i as f64;
        }
        acc
    }

    pub fn cum_count(&self, k: usize) -> u64 {
        self.counts[1..=k.min(self.m)].iter().sum()
    }
}

/// Smallest-period histogram of every read (duplicates included).
///
/// Reads are split into chunks that are counted independently and merged
/// by integer addition, so the result is independent of the thread count.
pub fn histogram(rs: &ReadSet) -> PeriodHistogram {
    let m = rs.m();
    let counts = rs
        .reads()
        .par_iter()
        .fold(
            || vec![0u64; m + 1],
            |mut acc, r| {
                acc[r.smallest_period()] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; m + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    PeriodHistogram {
        m,
        counts,
        n: rs.n() as u64,
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(SspError::Argument(format!("alpha = {alpha} outside (0, 1]")))
    }
}

/// `floor(m * alpha)`: the largest period counted as small. Inclusive, so a
/// period exactly equal to `m * alpha` is small.
pub fn small_period_limit(m: usize, alpha: f64) -> usize {
    ((m as f64 * alpha) + FLOOR_SLACK).floor().max(0.0) as usize
}

/// Small-period mass `sp(alpha)`.
pub fn sp(h: &PeriodHistogram, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(h.sp_upto(small_period_limit(h.m, alpha)))
}

/// One evaluation of the ratio bound, laid out like a row of the ratio table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioRow {
    pub period: usize,
    pub nbseq: u64,
    pub cum_nbseq: u64,
    pub alpha: f64,
    /// `1 + 1/alpha`.
    pub naive_bound: f64,
    /// `2 + c (1 - alpha) / alpha`.
    pub large_term: f64,
    /// `(c / 2) sp m / n`.
    pub small_term: f64,
    pub beta: f64,
    pub c: f64,
}

/// Evaluates every term of the bound at `alpha`.
pub fn evaluate(h: &PeriodHistogram, alpha: f64, c: CompressionFactor) -> Result<RatioRow> {
    check_alpha(alpha)?;
    let c = c.value();
    let period = small_period_limit(h.m, alpha);
    let sp = h.sp_upto(period);
    let large_term = 2.0 + c * (1.0 - alpha) / alpha;
    let small_term = (c / 2.0) * sp * h.m as f64 / h.n as f64;
    Ok(RatioRow {
        period,
        nbseq: h.count(period),
        cum_nbseq: h.cum_count(period),
        alpha,
        naive_bound: 1.0 + 1.0 / alpha,
        large_term,
        small_term,
        beta: large_term + small_term,
        c,
    })
}

/// The guaranteed ratio `beta(alpha)`.
pub fn beta(h: &PeriodHistogram, alpha: f64, c: CompressionFactor) -> Result<f64> {
    Ok(evaluate(h, alpha, c)?.beta)
}

/// One row per period `i = 1..=m`, evaluated at `alpha = i / m`.
pub fn ratio_table(h: &PeriodHistogram, c: CompressionFactor) -> Vec<RatioRow> {
    (1..=h.m)
        .map(|i| evaluate(h, i as f64 / h.m as f64, c).expect("i/m lies in (0, 1]"))
        .collect()
}

/// Row minimizing `beta`; ties go to the larger `alpha`.
pub fn select_alpha(table: &[RatioRow]) -> Result<RatioRow> {
    table
        .iter()
        .copied()
        .reduce(|best, row| {
            if row.beta < best.beta || (row.beta == best.beta && row.alpha > best.alpha) {
                row
            } else {
                best
            }
        })
        .ok_or_else(|| SspError::Input("empty ratio table".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlotPoint {
    pub period: usize,
    pub count: u64,
    /// `sum_{i <= period} n(i) / i`.
    pub cum_sp: f64,
    /// `m * alpha` of the selected row.
    pub v_line: f64,
    /// `0.02 * n / m`.
    pub h_line: f64,
}

pub fn plot_data(h: &PeriodHistogram, selected: &RatioRow) -> Vec<PlotPoint> {
    let v_line = h.m as f64 * selected.alpha;
    let h_line = SMALL_SP_REFERENCE * h.n as f64 / h.m as f64;
    let mut cum = 0.0;
    (1..=h.m)
        .map(|x| {
            cum += h.counts[x] as f64 / x as f64;
            PlotPoint {
                period: x,
                count: h.counts[x],
                cum_sp: cum,
                v_line,
                h_line,
            }
        })
        .collect()
}

/// Formats like C's `%.{digits}g`: `digits` significant figures, trailing
/// zeros removed, exponent form outside `[1e-5, 10^digits)`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const TABLE_HEADER: [&str; 8] = [
    "period",
    "nbseq",
    "cum_nbseq",
    "alpha",
    "naive_bound",
    "large_term",
    "small_term",
    "beta",
];

/// Writes the ratio table as TSV with 6 significant digits for real columns.
pub fn write_table_tsv<W: Write>(rows: &[RatioRow], mut out: W) -> Result<()> {
    writeln!(out, "{}", TABLE_HEADER.join("\t"))?;
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.period,
            r.nbseq,
            r.cum_nbseq,
            format_sig(r.alpha, 6),
            format_sig(r.naive_bound, 6),
            format_sig(r.large_term, 6),
            format_sig(r.small_term, 6),
            format_sig(r.beta, 6),
        )?;
    }
    Ok(())
}

/// Writes plot data as CSV with full precision.
pub fn write_plot_csv<W: Write>(points: &[PlotPoint], mut out: W) -> Result<()> {
    writeln!(out, "period,count,cum_sp,v_line,h_line")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{}",
            p.period, p.count, p.cum_sp, p.v_line, p.h_line
        )?;
    }
    Ok(())
}
