//! Benchmark rows: `subcommand,seed,d,N,queries,result`. `N` lists the side
//! lengths joined by `x`, so the column count never depends on `d`.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use tarski_core::BoxLattice;

pub const HEADER: [&str; 6] = ["subcommand", "seed", "d", "N", "queries", "result"];

#[derive(Debug, Clone)]
pub struct Row {
    pub subcommand: &'static str,
    pub seed: Option<u64>,
    pub d: usize,
    pub sides: Vec<u128>,
    pub queries: usize,
    pub result: String,
}

impl Row {
    pub fn new(subcommand: &'static str, seed: Option<u64>, domain: &BoxLattice, queries: usize, result: String) -> Self {
        Row {
            subcommand,
            seed,
            d: domain.dim(),
            sides: domain.sides().to_vec(),
            queries,
            result,
        }
    }

    fn record(&self) -> [String; 6] {
        [
            self.subcommand.to_string(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.d.to_string(),
            self.sides.iter().map(u128::to_string).collect::<Vec<_>>().join("x"),
            self.queries.to_string(),
            self.result.clone(),
        ]
    }
}

pub fn write_rows<W: Write>(out: W, rows: &[Row], header: bool) -> anyhow::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    if header {
        w.write_record(HEADER)?;
    }
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

/// Appends to `path`, writing the header only if the file is new or empty.
pub fn append(path: &Path, rows: &[Row]) -> anyhow::Result<()> {
    let fresh = std::fs::metadata(path).map_or(true, |m| m.len() == 0);
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    write_rows(file, rows, fresh)
}
