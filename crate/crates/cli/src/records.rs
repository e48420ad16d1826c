//! CSV persistence for sweep results.

use std::io::{Read, Write};

use dtransform_core::SweepRecord;

pub const HEADER: [&str; 5] = [
    "degradation_fraction",
    "n_passes",
    "seed",
    "sdr_degraded_db",
    "sdr_corrected_db",
];

#[derive(Debug, thiserror::Error)]
pub enum RecordsError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected CSV header {0:?}")]
    Header(Vec<String>),
    #[error("line {line}: bad {column} value {value:?}")]
    Field {
        line: u64,
        column: &'static str,
        value: String,
    },
}

/// Writes the header and one row per record. Floats use Rust's shortest
/// round-trip formatting, so parsing them back is lossless.
pub fn write_records<W: Write>(out: W, records: &[SweepRecord]) -> Result<(), RecordsError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record([
            r.degradation_fraction.to_string(),
            r.n_passes.to_string(),
            r.seed.to_string(),
            r.sdr_degraded_db.to_string(),
            r.sdr_corrected_db.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<SweepRecord>, RecordsError> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_owned).collect();
    if header != HEADER {
        return Err(RecordsError::Header(header));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| row.get(i).unwrap_or("");
        fn parse<T: std::str::FromStr>(
            s: &str,
            line: u64,
            column: &'static str,
        ) -> Result<T, RecordsError> {
            s.parse().map_err(|_| RecordsError::Field {
                line,
                column,
                value: s.to_owned(),
            })
        }
        out.push(SweepRecord {
            degradation_fraction: parse(field(0), line, HEADER[0])?,
            n_passes: parse(field(1), line, HEADER[1])?,
            seed: parse(field(2), line, HEADER[2])?,
            sdr_degraded_db: parse(field(3), line, HEADER[3])?,
            sdr_corrected_db: parse(field(4), line, HEADER[4])?,
        });
    }
    Ok(out)
}
