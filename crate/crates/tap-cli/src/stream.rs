//! Line-oriented processing over newline-delimited JSON with optional
//! parallelism. Input is consumed in bounded batches so corpora never load
//! whole; output order always follows input order regardless of job count.

use std::io::BufRead;

use rayon::prelude::*;

/// A per-line failure carrying its 1-based line number.
#[derive(Debug)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for LineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Apply `map` to every non-empty line, feeding results to `sink` in input
/// order. With `jobs > 1` lines are processed in parallel batches.
pub fn for_each_line<T, M, S>(
    reader: &mut dyn BufRead,
    jobs: usize,
    map: M,
    mut sink: S,
) -> Result<(), LineError>
where
    T: Send,
    M: Fn(usize, &str) -> Result<T, String> + Sync,
    S: FnMut(usize, T) -> Result<(), LineError>,
{
    let jobs = jobs.max(1);
    let batch_size = (jobs * 16).max(64);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool construction cannot fail");

    let mut line_no = 0usize;
    let mut batch: Vec<(usize, String)> = Vec::with_capacity(batch_size);
    let mut buf = String::new();
    loop {
        buf.clear();
        let eof = reader
            .read_line(&mut buf)
            .map_err(|e| LineError {
                line: line_no + 1,
                message: format!("read failed: {}", e),
            })?
            == 0;
        if !eof {
            line_no += 1;
            let trimmed = buf.trim_end_matches(['\n', '\r']);
            if !trimmed.trim().is_empty() {
                batch.push((line_no, trimmed.to_string()));
            }
        }
        if batch.len() >= batch_size || (eof && !batch.is_empty()) {
            let results: Vec<(usize, Result<T, String>)> = if jobs == 1 {
                batch
                    .iter()
                    .map(|(no, line)| (*no, map(*no, line)))
                    .collect()
            } else {
                pool.install(|| {
                    batch
                        .par_iter()
                        .map(|(no, line)| (*no, map(*no, line)))
                        .collect()
                })
            };
            for (no, result) in results {
                let value = result.map_err(|message| LineError { line: no, message })?;
                sink(no, value)?;
            }
            batch.clear();
        }
        if eof {
            return Ok(());
        }
    }
}
