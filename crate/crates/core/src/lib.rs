//! Period-aware approximation of the shortest superstring of uniform-length
//! reads.
//!
//! The crate computes smallest-period statistics of a read set, evaluates
//! and minimizes the guaranteed approximation ratio `beta(alpha)`, and runs
//! the cycle-cover superstring pipeline:
//!
//! 1. build the prefix graph of the distinct reads ([`graph`]);
//! 2. find a minimum-weight cycle cover with cycles of length two or more ([`cover`]);
//! 3. unroll each cycle into a `sigma` string and compress the set greedily ([`assembler`]).
//!
//! [`oracle`] holds brute-force references for small instances.

pub mod assembler;
pub mod cover;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod reads;
pub mod stats;
pub mod strings;

pub use assembler::{assemble, verify, AlphaChoice, AssembleOptions, Assembly, AssemblyStats};
pub use cover::{classify, exact_cover, greedy_cover, CoverBackend, CycleCover};
pub use error::{Result, SspError};
pub use graph::{build_indexed, build_naive, GraphOptions, PrefixGraph};
pub use reads::{dedupe, parse_reads, read_path, Format, LengthPolicy, ParseOptions, ReadSet};
pub use stats::{
    beta, histogram, plot_data, ratio_table, select_alpha, sp, CompressionFactor, PeriodHistogram,
    RatioRow,
};
pub use strings::{border_array, overlap, prefix_len, smallest_period, Alphabet, Sequence};
