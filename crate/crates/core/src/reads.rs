//! Read-set ingestion: streaming FASTA/FASTQ/raw-lines parsing with gzip
//! auto-detection, uniform-length enforcement and deduplication.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;

use crate::error::{Result, SspError};
use crate::strings::{Alphabet, Sequence};

const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Fasta,
    Fastq,
    /// One read per line, no headers.
    Raw,
}

impl Format {
    /// Guesses the format from the first non-blank byte of a (decompressed) stream.
    pub fn sniff(first: Option<u8>) -> Format {
        match first {
            Some(b'>') => Format::Fasta,
            Some(b'@') => Format::Fastq,
            _ => Format::Raw,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Format::Fasta => "fasta",
            Format::Fastq => "fastq",
            Format::Raw => "raw",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = SspError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fasta" | "fa" => Ok(Format::Fasta),
            "fastq" | "fq" => Ok(Format::Fastq),
            "raw" | "raw-lines" | "lines" => Ok(Format::Raw),
            other => Err(SspError::Argument(format!("unknown read format `{other}`"))),
        }
    }
}

/// What to do with reads whose length differs from the expected one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LengthPolicy {
    /// Any mismatch against the first read's length is an error.
    #[default]
    Strict,
    /// Keep only reads of the most frequent length (ties: shorter length).
    FilterToModal,
}

impl std::str::FromStr for LengthPolicy {
    type Err = SspError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "strict" => Ok(LengthPolicy::Strict),
            "filter-to-modal" | "modal" => Ok(LengthPolicy::FilterToModal),
            other => Err(SspError::Argument(format!("unknown length policy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// `None` sniffs the format from the stream.
    pub format: Option<Format>,
    pub alphabet: Alphabet,
    pub length_policy: LengthPolicy,
}

/// Reads of one common length `m`, in input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadSet {
    reads: Vec<Sequence>,
    m: usize,
    source: String,
}

impl ReadSet {
    /// Builds a read set from already validated sequences.
    pub fn new(reads: Vec<Sequence>, source: impl Into<String>) -> Result<Self> {
        let Some(first) = reads.first() else {
            return Err(SspError::Input("no usable reads".into()));
        };
        let m = first.len();
        if let Some(i) = reads.iter().position(|r| r.len() != m) {
            return Err(SspError::Input(format!(
                "read {} has length {}, expected {m}",
                i + 1,
                reads[i].len()
            )));
        }
        Ok(ReadSet {
            reads,
            m,
            source: source.into(),
        })
    }

    /// Convenience constructor used heavily in tests: each string is
    /// validated against [`Alphabet::Any`].
    pub fn from_strs<S: AsRef<[u8]>>(reads: &[S]) -> Result<Self> {
        let seqs = reads
            .iter()
            .map(|r| Sequence::new(r.as_ref(), Alphabet::Any))
            .collect::<Result<Vec<_>>>()?;
        ReadSet::new(seqs, "memory")
    }

    pub fn reads(&self) -> &[Sequence] {
        &self.reads
    }

    pub fn get(&self, i: usize) -> &Sequence {
        &self.reads[i]
    }

    /// Uniform read length.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of reads.
    pub fn n(&self) -> usize {
        self.reads.len()
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

/// Result of parsing: the read set plus how many records the length policy dropped.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub reads: ReadSet,
    pub dropped: usize,
}

/// Opens `path`, transparently decompressing gzip, and parses it.
pub fn read_path(path: &Path, opts: ParseOptions) -> Result<Parsed> {
    let file = File::open(path)?;
    parse_reads(file, opts, path.display().to_string())
}

/// Parses a byte stream into a [`ReadSet`]. Gzip input is detected by its magic bytes.
pub fn parse_reads<'a, R: Read + 'a>(
    source: R,
    opts: ParseOptions,
    name: String,
) -> Result<Parsed> {
    let mut buffered = BufReader::new(source);
    let is_gzip = buffered.fill_buf()?.starts_with(&GZIP_MAGIC);
    let mut stream: Box<dyn BufRead + 'a> = if is_gzip {
        Box::new(BufReader::new(MultiGzDecoder::new(buffered)))
    } else {
        Box::new(buffered)
    };

    let format = match opts.format {
        Some(f) => f,
        None => Format::sniff(first_non_blank(stream.as_mut())?),
    };

    let mut collector = Collector::new(opts);
    match format {
        Format::Raw => parse_raw(&mut stream, &mut collector)?,
        Format::Fasta => parse_fasta(&mut stream, &mut collector)?,
        Format::Fastq => parse_fastq(&mut stream, &mut collector)?,
    }
    let source = format!("{name} ({}{})", format.name(), if is_gzip { ", gzip" } else { "" });
    collector.finish(source)
}

fn first_non_blank(stream: &mut dyn BufRead) -> Result<Option<u8>> {
    loop {
        let buf = stream.fill_buf()?;
        if buf.is_empty() {
            return Ok(None);
        }
        match buf.iter().position(|b| !b.is_ascii_whitespace()) {
            Some(i) => return Ok(Some(buf[i])),
            None => {
                let len = buf.len();
                stream.consume(len);
            }
        }
    }
}

struct Collector {
    opts: ParseOptions,
    reads: Vec<Sequence>,
    expected_len: Option<usize>,
}

impl Collector {
    fn new(opts: ParseOptions) -> Self {
        Collector {
            opts,
            reads: Vec::new(),
            expected_len: None,
        }
    }

    fn push(&mut self, record: usize, raw: &[u8]) -> Result<()> {
        let seq = Sequence::new(raw, self.opts.alphabet).map_err(|e| SspError::Parse {
            record,
            message: e.to_string(),
        })?;
        if self.opts.length_policy == LengthPolicy::Strict {
            let m = *self.expected_len.get_or_insert(seq.len());
            if seq.len() != m {
                return Err(SspError::Input(format!(
                    "record {record} has length {}, expected {m} (strict length policy)",
                    seq.len()
                )));
            }
        }
        self.reads.push(seq);
        Ok(())
    }

    fn finish(self, source: String) -> Result<Parsed> {
        if self.reads.is_empty() {
            return Err(SspError::Input("no usable reads".into()));
        }
        let (reads, dropped) = match self.opts.length_policy {
            LengthPolicy::Strict => (self.reads, 0),
            LengthPolicy::FilterToModal => {
                let mut freq: HashMap<usize, usize> = HashMap::new();
                for r in &self.reads {
                    *freq.entry(r.len()).or_default() += 1;
                }
                let (&modal, _) = freq
                    .iter()
                    .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
                    .expect("non-empty");
                let total = self.reads.len();
                let kept: Vec<_> = self.reads.into_iter().filter(|r| r.len() == modal).collect();
                let dropped = total - kept.len();
                (kept, dropped)
            }
        };
        Ok(Parsed {
            reads: ReadSet::new(reads, source)?,
            dropped,
        })
    }
}

fn trim_eol(line: &mut Vec<u8>) {
    while matches!(line.last(), Some(b'\n' | b'\r')) {
        line.pop();
    }
}

fn parse_raw(stream: &mut dyn BufRead, out: &mut Collector) -> Result<()> {
    let mut line = Vec::new();
    let mut record = 0;
    loop {
        line.clear();
        if stream.read_until(b'\n', &mut line)? == 0 {
            return Ok(());
        }
        trim_eol(&mut line);
        if line.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        record += 1;
        out.push(record, line.trim_ascii())?;
    }
}

fn parse_fasta(stream: &mut dyn BufRead, out: &mut Collector) -> Result<()> {
    let mut line = Vec::new();
    let mut seq: Vec<u8> = Vec::new();
    let mut record = 0;
    loop {
        line.clear();
        let eof = stream.read_until(b'\n', &mut line)? == 0;
        trim_eol(&mut line);
        if eof || line.first() == Some(&b'>') {
            if record > 0 {
                if seq.is_empty() {
                    return Err(SspError::Parse {
                        record,
                        message: "FASTA record has no sequence".into(),
                    });
                }
                out.push(record, &seq)?;
                seq.clear();
            }
            if eof {
                return Ok(());
            }
            record += 1;
        } else if !line.iter().all(u8::is_ascii_whitespace) {
            if record == 0 {
                return Err(SspError::Parse {
                    record: 1,
                    message: "sequence data before the first `>` header".into(),
                });
            }
            seq.extend_from_slice(line.trim_ascii());
        }
    }
}

fn parse_fastq(stream: &mut dyn BufRead, out: &mut Collector) -> Result<()> {
    let mut header = Vec::new();
    let mut seq = Vec::new();
    let mut plus = Vec::new();
    let mut qual = Vec::new();
    let mut record = 0;
    loop {
        header.clear();
        if stream.read_until(b'\n', &mut header)? == 0 {
            return Ok(());
        }
        trim_eol(&mut header);
        if header.is_empty() {
            continue;
        }
        record += 1;
        let malformed = |message: &str| SspError::Parse {
            record,
            message: message.to_string(),
        };
        if header[0] != b'@' {
            return Err(malformed("FASTQ header does not start with `@`"));
        }
        for buf in [&mut seq, &mut plus, &mut qual] {
            buf.clear();
            if stream.read_until(b'\n', buf)? == 0 {
                return Err(malformed("truncated FASTQ record"));
            }
            trim_eol(buf);
        }
        if plus.first() != Some(&b'+') {
            return Err(malformed("missing `+` separator line"));
        }
        if qual.len() != seq.len() {
            return Err(malformed("quality length differs from sequence length"));
        }
        out.push(record, &seq)?;
    }
}

/// Writes one read per line; re-parsing with [`Format::Raw`] yields the same reads.
pub fn write_raw<W: Write>(rs: &ReadSet, mut out: W) -> Result<()> {
    for r in rs.reads() {
        out.write_all(r.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Distinct reads in first-occurrence order with their multiplicities.
#[derive(Debug, Clone)]
pub struct Deduped {
    pub reads: ReadSet,
    /// Parallel to `reads.reads()`.
    pub multiplicity: Vec<usize>,
}

pub fn dedupe(rs: &ReadSet) -> Deduped {
    let mut index: HashMap<&[u8], usize> = HashMap::with_capacity(rs.n());
    let mut distinct = Vec::new();
    let mut multiplicity = Vec::new();
    for r in rs.reads() {
        match index.get(r.as_bytes()) {
            Some(&i) => multiplicity[i] += 1,
            None => {
                index.insert(r.as_bytes(), distinct.len());
                distinct.push(r.clone());
                multiplicity.push(1);
            }
        }
    }
    Deduped {
        reads: ReadSet {
            reads: distinct,
            m: rs.m,
            source: rs.source.clone(),
        },
        multiplicity,
    }
}
