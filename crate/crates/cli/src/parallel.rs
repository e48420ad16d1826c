use dtransform_core::FrameExecutor;
use rayon::prelude::*;

/// Spreads frames over a dedicated rayon pool. Rows are independent jobs,
/// so the output does not depend on the thread count.
pub struct PoolExecutor {
    pool: rayon::ThreadPool,
}

impl PoolExecutor {
    /// `threads == 0` uses one thread per available core.
    pub fn new(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl FrameExecutor for PoolExecutor {
    fn for_each_row(
        &self,
        data: &mut [f64],
        row_len: usize,
        job: &(dyn Fn(usize, &mut [f64]) + Sync),
    ) {
        self.pool.install(|| {
            data.par_chunks_exact_mut(row_len)
                .enumerate()
                .for_each(|(i, row)| job(i, row));
        });
    }
}
