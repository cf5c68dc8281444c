//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.
//!
//! Set `SUPERSTRING_SRR069579=/path/to/SRR069579.fastq[.gz]` to also run the
//! full-dataset ratio table check; it is skipped otherwise.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use superstring_core::assembler::{assemble, verify, AlphaChoice, AssembleOptions};
use superstring_core::cover::{exact_cover, greedy_cover, CoverBackend};
use superstring_core::graph::{build_indexed, build_naive};
use superstring_core::oracle::{brute_cycle_cover, exact_ssp, naive_overlap, naive_period};
use superstring_core::reads::{read_path, ParseOptions, ReadSet};
use superstring_core::stats::{
    evaluate, histogram, ratio_table, select_alpha, CompressionFactor, PeriodHistogram,
};
use superstring_core::strings::{overlap, smallest_period};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed <= limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn single_period_histogram(m: usize, n: u64) -> PeriodHistogram {
    PeriodHistogram::from_counts(m, &BTreeMap::from([(m, n)])).unwrap()
}

fn random_string(rng: &mut ChaCha8Rng, sigma: u8, len: usize) -> Vec<u8> {
    (0..len).map(|_| b'A' + rng.gen_range(0..sigma)).collect()
}

/// `count` distinct reads, or fewer if the space is exhausted.
fn random_reads(rng: &mut ChaCha8Rng, count: usize, m: usize, sigma: u8) -> ReadSet {
    let space = (sigma as f64).powi(m as i32);
    let count = count.min(space as usize);
    let mut reads: Vec<Vec<u8>> = Vec::with_capacity(count);
    while reads.len() < count {
        let r = random_string(rng, sigma, m);
        if !reads.contains(&r) {
            reads.push(r);
        }
    }
    ReadSet::from_strs(&reads).unwrap()
}

/// The 200 small instances shared by criteria 5 and 6.
fn small_instances() -> Vec<ReadSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    (0..200)
        .map(|_| {
            let n = rng.gen_range(3..=8);
            let m = rng.gen_range(3..=8);
            let sigma = rng.gen_range(2..=4);
            random_reads(&mut rng, n, m, sigma)
        })
        .collect()
}

fn ac1_table_columns() -> Check {
    let c = CompressionFactor::REFERENCE;
    // (m, period, naive_bound, large_term) from the bold rows of the four tables
    let spots = [
        (36, 33, 2.09091, 2.05483),
        (32, 29, 2.10345, 2.0624),
        (200, 196, 2.02041, 2.01231),
        (98, 95, 2.03158, 2.01905),
    ];
    for (m, period, naive, large) in spots {
        let h = single_period_histogram(m, 1);
        let row = evaluate(&h, period as f64 / m as f64, c).map_err(|e| e.to_string())?;
        ensure(
            (row.naive_bound - naive).abs() <= 1e-4 && (row.large_term - large).abs() <= 1e-4,
            || {
                format!(
                    "m={m} alpha={period}/{m}: got {} / {}, expected {naive} / {large}",
                    row.naive_bound, row.large_term
                )
            },
        )?;
    }
    Ok("4 tables, |error| <= 1e-4".into())
}

fn ac2_trivial_beta() -> Check {
    for (c, expected) in [
        (CompressionFactor::REFERENCE, 2.0 + 38.0 / 126.0),
        (CompressionFactor::GREEDY, 2.25),
    ] {
        for m in [1usize, 4, 36, 100] {
            let rs = ReadSet::from_strs(
                &(0..20)
                    .map(|k| {
                        // period-m reads: a unique symbol at the end breaks every border
                        let mut r = vec![b'A' + (k % 3) as u8; m];
                        r[m - 1] = b'Z';
                        r
                    })
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let h = histogram(&rs);
            ensure(h.count(m) == h.n(), || format!("m={m}: not all reads have period m"))?;
            let row = evaluate(&h, 1.0, c).map_err(|e| e.to_string())?;
            ensure((row.small_term - c.value() / 2.0).abs() <= 1e-12, || {
                format!("small_term {} != c/2", row.small_term)
            })?;
            ensure((row.beta - expected).abs() <= 1e-12, || {
                format!("beta {} != {expected}", row.beta)
            })?;
        }
    }
    Ok("beta = 2.301587 (c=38/63), 2.25 (c=1/2)".into())
}

fn ac3_oracle_equivalence() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sigmas = [2u8, 4, 26];
    for k in 0..10_000 {
        let sigma = sigmas[k % 3];
        let len = rng.gen_range(1..=64);
        let s = random_string(&mut rng, sigma, len);
        let fast = smallest_period(&s).map_err(|e| e.to_string())?;
        ensure(fast == naive_period(&s), || {
            format!("period mismatch on {}", String::from_utf8_lossy(&s))
        })?;
    }
    for k in 0..10_000 {
        let sigma = sigmas[k % 3];
        let (lu, lv) = (rng.gen_range(1..=64), rng.gen_range(1..=64));
        let u = random_string(&mut rng, sigma, lu);
        let mut v = random_string(&mut rng, sigma, lv);
        // plant an overlap half of the time so non-trivial cases are common
        if k % 2 == 0 {
            let k = rng.gen_range(0..=lu.min(lv));
            v[..k].copy_from_slice(&u[lu - k..]);
        }
        let fast = overlap(&u, &v).map_err(|e| e.to_string())?;
        ensure(fast == naive_overlap(&u, &v), || "overlap mismatch".into())?;
    }
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!("20000 checks, 100% agreement in {:?}", start.elapsed()))
}

fn ac4_graph_backends() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let m = rng.gen_range(2..=100);
        let n = rng.gen_range(2..=200);
        let sigma = rng.gen_range(2..=4);
        let rs = random_reads(&mut rng, n, m, sigma);
        if rs.n() < 2 {
            continue;
        }
        let a = build_naive(&rs).map_err(|e| e.to_string())?;
        let b = build_indexed(&rs).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("random set n={} m={m} differs", rs.n()))?;
    }
    let mut exhaustive = 0usize;
    for m in 1..=4usize {
        let universe: Vec<Vec<u8>> = (0..1u32 << m)
            .map(|bits| (0..m).map(|p| if bits >> p & 1 == 1 { b'B' } else { b'A' }).collect())
            .collect();
        for mask in 0u32..1 << universe.len() {
            let size = mask.count_ones();
            if !(2..=6).contains(&size) {
                continue;
            }
            let reads: Vec<&Vec<u8>> = (0..universe.len())
                .filter(|&k| mask >> k & 1 == 1)
                .map(|k| &universe[k])
                .collect();
            let rs = ReadSet::from_strs(&reads).unwrap();
            let a = build_naive(&rs).map_err(|e| e.to_string())?;
            let b = build_indexed(&rs).map_err(|e| e.to_string())?;
            ensure(a == b, || format!("binary set {reads:?} differs"))?;
            exhaustive += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "100 random + {exhaustive} exhaustive binary sets identical in {:?}",
        start.elapsed()
    ))
}

fn ac5_cycle_covers(instances: &[ReadSet]) -> Check {
    let start = Instant::now();
    for (k, rs) in instances.iter().enumerate() {
        let g = build_naive(rs).map_err(|e| e.to_string())?;
        let h = histogram(rs);
        let exact = exact_cover(&g).map_err(|e| e.to_string())?;
        let greedy = greedy_cover(&g).map_err(|e| e.to_string())?;
        let brute = brute_cycle_cover(&g, 8).map_err(|e| e.to_string())?;
        let strings: Vec<&[u8]> = rs.reads().iter().map(|r| r.as_bytes()).collect();
        let opt = exact_ssp(&strings, 12).map_err(|e| e.to_string())?.value;
        ensure(exact.total_weight == brute.value as u64, || {
            format!("instance {k}: exact {} vs brute {}", exact.total_weight, brute.value)
        })?;
        ensure(exact.total_weight <= opt as u64, || {
            format!("instance {k}: wt(C) {} > OPT {opt}", exact.total_weight)
        })?;
        ensure(greedy.total_weight >= exact.total_weight, || {
            format!("instance {k}: greedy below exact")
        })?;
        for cover in [&exact, &greedy] {
            cover
                .validate(&g)
                .and_then(|_| cover.check_period_bounds(rs, &h))
                .map_err(|e| format!("instance {k}: {e}"))?;
        }
    }
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("200 instances in {:?}", start.elapsed()))
}

fn ac6_theorem_bound(instances: &[ReadSet]) -> Check {
    let opts = AssembleOptions {
        alpha: AlphaChoice::Auto,
        c: CompressionFactor::GREEDY,
        backend: CoverBackend::Exact,
        ..Default::default()
    };
    let mut worst: f64 = 0.0;
    for (k, rs) in instances.iter().enumerate() {
        let asm = assemble(rs, &opts).map_err(|e| e.to_string())?;
        ensure(verify(asm.tau.as_bytes(), rs).pass, || {
            format!("instance {k}: not a superstring")
        })?;
        let strings: Vec<&[u8]> = rs.reads().iter().map(|r| r.as_bytes()).collect();
        let opt = exact_ssp(&strings, 12).map_err(|e| e.to_string())?.value;
        ensure(opt >= rs.n(), || format!("instance {k}: OPT < n"))?;
        let alpha = asm.stats.alpha;
        let bound = 2.0 * opt as f64
            + 0.5 * ((1.0 - alpha) / alpha) * opt as f64
            + 0.25 * asm.stats.sp * rs.m() as f64;
        ensure(asm.tau.len() as f64 <= bound, || {
            format!("instance {k}: |tau| = {} > bound {bound}", asm.tau.len())
        })?;
        worst = worst.max(asm.tau.len() as f64 / opt as f64);
    }
    Ok(format!("200/200 within bound, worst |tau|/OPT = {worst:.4}"))
}

fn ac7_small_term_floor(instances: &[ReadSet]) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut histograms: Vec<PeriodHistogram> = instances.iter().map(histogram).collect();
    for _ in 0..500 {
        let m = rng.gen_range(1..=150);
        let counts: BTreeMap<usize, u64> = (0..rng.gen_range(1..=10))
            .map(|_| (rng.gen_range(1..=m), rng.gen_range(1..=100_000)))
            .collect();
        histograms.push(PeriodHistogram::from_counts(m, &counts).unwrap());
    }
    for c in [CompressionFactor::REFERENCE, CompressionFactor::GREEDY] {
        for h in &histograms {
            let last = *ratio_table(h, c).last().unwrap();
            ensure(last.small_term >= c.value() / 2.0 * (1.0 - 1e-12), || {
                format!("m={} small_term(1) = {} < c/2", h.m(), last.small_term)
            })?;
        }
    }
    // the published ERR000009 value sits below this floor and is not a target
    let published = 0.285099;
    ensure(published < 38.0 / 126.0, || "anomaly no longer below floor".into())?;
    Ok(format!(
        "floor holds on {} histograms; published 0.285099 < 38/126 flagged as erratum",
        histograms.len()
    ))
}

fn cli_bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_superstring"))
}

fn run_cli(args: &[&str], threads: usize) -> Result<(), String> {
    let out = Command::new(cli_bin())
        .arg("--threads")
        .arg(threads.to_string())
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr))
    })
}

fn ac8_determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input = dir.path().join("reads.fq");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut text = String::new();
    for k in 0..400 {
        // periodic reads every so often so several periods are populated
        let read: Vec<u8> = if k % 10 == 0 {
            let unit_len = rng.gen_range(1..=6);
            let unit = random_string(&mut rng, 4, unit_len);
            unit.iter().cycle().take(30).copied().collect()
        } else {
            random_string(&mut rng, 4, 30)
        };
        let read = String::from_utf8(read).unwrap();
        text.push_str(&format!("@r{k}\n{read}\n+\n{}\n", "I".repeat(30)));
    }
    std::fs::write(&input, text).map_err(|e| e.to_string())?;

    let outputs = |tag: &str| -> Vec<PathBuf> {
        ["table.tsv", "plot.csv", "report.json", "tau.fa", "stats.json", "greedy.fa"]
            .iter()
            .map(|f| dir.path().join(format!("{tag}-{f}")))
            .collect()
    };
    let run = |tag: &str, threads: usize| -> Result<Vec<Vec<u8>>, String> {
        let o = outputs(tag);
        let p = |x: &Path| x.to_str().unwrap().to_string();
        let input = p(&input);
        run_cli(
            &["analyze", "--input", &input, "--out", &p(&o[0]), "--plot", &p(&o[1]),
              "--json", &p(&o[2]), "--no-timestamp"],
            threads,
        )?;
        run_cli(
            &["assemble", "--input", &input, "--out", &p(&o[3]), "--stats", &p(&o[4]),
              "--no-timestamp"],
            threads,
        )?;
        run_cli(
            &["assemble", "--input", &input, "--cover", "greedy", "--out", &p(&o[5])],
            threads,
        )?;
        o.iter()
            .map(|f| std::fs::read(f).map_err(|e| e.to_string()))
            .collect()
    };
    let one = run("t1", 1)?;
    let four = run("t4", 4)?;
    let again = run("t4b", 4)?;
    ensure(one == four && four == again, || "outputs differ across runs".into())?;
    Ok("analyze + assemble byte-identical with 1 and 4 threads".into())
}

/// Optional: the full first ratio table on the real dataset.
fn optional_full_table() -> Option<Check> {
    let path = std::env::var_os("SUPERSTRING_SRR069579")?;
    Some((|| {
        let reads = read_path(Path::new(&path), ParseOptions::default())
            .map_err(|e| e.to_string())?
            .reads;
        let h = histogram(&reads);
        let table = ratio_table(&h, CompressionFactor::REFERENCE);
        let best = select_alpha(&table).map_err(|e| e.to_string())?;
        ensure(h.n() == 3_702_309 && h.m() == 36, || format!("n={} m={}", h.n(), h.m()))?;
        ensure(best.period == 33, || format!("selected period {}", best.period))?;
        ensure((best.small_term - 0.0189677).abs() <= 1e-6, || {
            format!("small_term {}", best.small_term)
        })?;
        ensure((best.beta - 2.0738).abs() <= 1e-4, || format!("beta {}", best.beta))?;
        Ok("period 33, beta 2.0738".to_string())
    })())
}

fn main() {
    let instances = small_instances();
    let results: Vec<(&str, Check)> = vec![
        ("AC1 table-column reproduction", ac1_table_columns()),
        ("AC2 trivial-beta identity", ac2_trivial_beta()),
        ("AC3 period/overlap oracle equivalence", ac3_oracle_equivalence()),
        ("AC4 overlap-graph backend equivalence", ac4_graph_backends()),
        ("AC5 cycle-cover correctness", ac5_cycle_covers(&instances)),
        ("AC6 theorem bound, executable form", ac6_theorem_bound(&instances)),
        ("AC7 small-term floor / known anomaly", ac7_small_term_floor(&instances)),
        ("AC8 determinism", ac8_determinism()),
    ];
    let mut failed = 0;
    for (name, result) in &results {
        match result {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    match optional_full_table() {
        None => println!("SKIP  full SRR069579 table (set SUPERSTRING_SRR069579 to run)"),
        Some(Ok(detail)) => println!("PASS  full SRR069579 table: {detail}"),
        Some(Err(why)) => {
            failed += 1;
            println!("FAIL  full SRR069579 table: {why}");
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
