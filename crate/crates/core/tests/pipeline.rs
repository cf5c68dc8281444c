use std::collections::BTreeMap;

use proptest::prelude::*;

use superstring_core::assembler::{assemble, verify, AlphaChoice, AssembleOptions};
use superstring_core::cover::{classify, exact_cover, greedy_cover, CoverBackend};
use superstring_core::graph::{build, build_naive, GraphBackend, GraphOptions};
use superstring_core::oracle::{brute_cycle_cover, exact_ssp};
use superstring_core::reads::{dedupe, parse_reads, Format, ParseOptions, ReadSet};
use superstring_core::stats::{
    beta, histogram, plot_data, ratio_table, select_alpha, sp, CompressionFactor, PeriodHistogram,
};

fn distinct_reads(m: usize, max_n: usize) -> impl Strategy<Value = ReadSet> {
    prop::collection::hash_set(prop::collection::vec(b'a'..=b'c', m), 2..=max_n).prop_map(|set| {
        let mut reads: Vec<Vec<u8>> = set.into_iter().collect();
        reads.sort();
        ReadSet::from_strs(&reads).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn covers_are_bounded_by_the_optimum(rs in (3usize..=6).prop_flat_map(|m| distinct_reads(m, 7))) {
        let g = build_naive(&rs).unwrap();
        let exact = exact_cover(&g).unwrap();
        let strings: Vec<&[u8]> = rs.reads().iter().map(|r| r.as_bytes()).collect();
        let opt = exact_ssp(&strings, 12).unwrap();
        prop_assert!(exact.total_weight <= opt.value as u64);
        prop_assert_eq!(exact.total_weight, brute_cycle_cover(&g, 8).unwrap().value as u64);
        prop_assert!(brute_cycle_cover(&g, 8).unwrap().value <= opt.value);
        prop_assert!(greedy_cover(&g).unwrap().total_weight >= exact.total_weight);
        prop_assert!(opt.value >= rs.n());
    }

    #[test]
    fn theorem_bound_with_explicit_alpha(
        rs in (3usize..=6).prop_flat_map(|m| distinct_reads(m, 7)),
        alpha in 0.05f64..=1.0,
    ) {
        let opts = AssembleOptions {
            alpha: AlphaChoice::Explicit(alpha),
            ..Default::default()
        };
        let asm = assemble(&rs, &opts).unwrap();
        let strings: Vec<&[u8]> = rs.reads().iter().map(|r| r.as_bytes()).collect();
        let opt = exact_ssp(&strings, 12).unwrap().value;
        prop_assert!(verify(asm.tau.as_bytes(), &rs).pass);
        prop_assert!(asm.tau.len() as f64 <= asm.theorem_bound(opt));

        let cover = asm.cover.as_ref().unwrap();
        let cls = classify(cover, rs.m(), alpha);
        prop_assert_eq!(cls.small.len(), asm.stats.cycles_small);
        prop_assert_eq!(cls.small.len() + cls.large.len(), cover.len());
    }
}

#[test]
fn analysis_uses_duplicates_assembly_does_not() {
    let rs = ReadSet::from_strs(&["abab", "abab", "abab", "abcd"]).unwrap();
    let raw = histogram(&rs);
    assert_eq!((raw.n(), raw.count(2), raw.count(4)), (4, 3, 1));

    let asm = assemble(&rs, &AssembleOptions::default()).unwrap();
    assert_eq!(asm.stats.n, 2);
    assert_eq!(dedupe(&rs).multiplicity, vec![3, 1]);
}

#[test]
fn auto_alpha_matches_table_minimum() {
    let rs = ReadSet::from_strs(&["aaaaaa", "ababab", "abcabc", "abcdef", "bcdefa", "cdefab"])
        .unwrap();
    let c = CompressionFactor::GREEDY;
    let asm = assemble(&rs, &AssembleOptions::default()).unwrap();
    let best = select_alpha(&ratio_table(&histogram(&rs), c)).unwrap();
    assert_eq!(asm.stats.alpha, best.alpha);
    assert_eq!(asm.stats.beta_bound, best.beta);
}

#[test]
fn greedy_backend_end_to_end() {
    let text = ">a\nACGTAC\n>b\nGTACGG\n>c\nACGGTT\n>d\nGGTTAC\n";
    let opts = ParseOptions {
        format: Some(Format::Fasta),
        ..Default::default()
    };
    let rs = parse_reads(text.as_bytes(), opts, "inline".into()).unwrap().reads;
    let asm = assemble(
        &rs,
        &AssembleOptions {
            backend: CoverBackend::Greedy,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(verify(asm.tau.as_bytes(), &rs).pass);
    assert!(asm.tau.len() <= asm.stats.w_sigma_len);
}

#[test]
fn graph_backends_agree_through_dispatch() {
    let rs = ReadSet::from_strs(&["acgta", "cgtac", "gtacg", "tacgt", "aaaaa", "ccccc"]).unwrap();
    let naive = build(
        &rs,
        &GraphOptions {
            backend: GraphBackend::Naive,
            ..Default::default()
        },
    )
    .unwrap();
    let indexed = build(
        &rs,
        &GraphOptions {
            backend: GraphBackend::Indexed,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(naive, indexed);
}

#[test]
fn stats_surface_is_consistent() {
    let h = PeriodHistogram::from_counts(8, &BTreeMap::from([(2, 4), (5, 1), (8, 10)])).unwrap();
    let c = CompressionFactor::REFERENCE;
    let table = ratio_table(&h, c);
    for row in &table {
        let alpha = row.period as f64 / 8.0;
        assert_eq!(row.beta, beta(&h, alpha, c).unwrap());
        let expected_small = c.value() / 2.0 * sp(&h, alpha).unwrap() * 8.0 / 15.0;
        assert!((row.small_term - expected_small).abs() < 1e-15);
    }
    let sel = select_alpha(&table).unwrap();
    let plot = plot_data(&h, &sel);
    assert_eq!(plot.len(), 8);
    assert_eq!(plot[7].cum_sp, h.sp_upto(8));
}
