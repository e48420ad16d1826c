//! Pluggable execution of independent per-frame jobs.

/// Runs `job(row_index, row)` once for every `row_len`-sized row of `data`.
///
/// Implementations may run rows in any order and on any thread. Jobs must
/// depend only on their index and row, so every implementation produces the
/// same bytes.
pub trait FrameExecutor: Sync {
    fn for_each_row(
        &self,
        data: &mut [f64],
        row_len: usize,
        job: &(dyn Fn(usize, &mut [f64]) + Sync),
    );
}

/// Runs rows in order on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl FrameExecutor for Sequential {
    fn for_each_row(
        &self,
        data: &mut [f64],
        row_len: usize,
        job: &(dyn Fn(usize, &mut [f64]) + Sync),
    ) {
        for (i, row) in data.chunks_exact_mut(row_len).enumerate() {
            job(i, row);
        }
    }
}
