//! Dense kernels written so LLVM can vectorize them: eight independent
//! accumulators break the sequential dependency of a naive dot product.

use core::f64::consts::LOG2_E;

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 8];
    let mut ca = a.chunks_exact(8);
    let mut cb = b.chunks_exact(8);
    for (xa, xb) in (&mut ca).zip(&mut cb) {
        for k in 0..8 {
            acc[k] += xa[k] * xb[k];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        tail += x * y;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Row-major `out = m * x`, where `m` has `out.len()` rows of `x.len()`.
#[inline]
pub(crate) fn matvec(m: &[f64], x: &[f64], out: &mut [f64]) {
    let cols = x.len();
    for (o, row) in out.iter_mut().zip(m.chunks_exact(cols)) {
        *o = dot(row, x);
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

const LN_2_HI: f64 = 6.931_471_803_691_238e-1;
const LN_2_LO: f64 = 1.908_214_929_270_587_7e-10;

/// `e^x` without branches, so slices of it vectorize. Range reduction
/// `x = n ln 2 + r` with `|r| ≤ ln 2 / 2`, then a degree-13 Taylor series
/// for `e^r` (truncation below 1e-17 relative). Inputs are clamped to
/// `[-708, 708]`, where the result stays normal.
#[inline(always)]
pub(crate) fn exp(x: f64) -> f64 {
    // 1.5 * 2^52: adding it rounds to an integer held in the low mantissa bits
    const SHIFT: f64 = 6_755_399_441_055_744.0;
    let x = x.clamp(-708.0, 708.0);
    let shifted = x * LOG2_E + SHIFT;
    let n = shifted - SHIFT;
    let r = (x - n * LN_2_HI) - n * LN_2_LO;
    let mut p = 1.0 / 6_227_020_800.0;
    for c in [
        1.0 / 479_001_600.0,
        1.0 / 39_916_800.0,
        1.0 / 3_628_800.0,
        1.0 / 362_880.0,
        1.0 / 40_320.0,
        1.0 / 5040.0,
        1.0 / 720.0,
        1.0 / 120.0,
        1.0 / 24.0,
        1.0 / 6.0,
        0.5,
        1.0,
        1.0,
    ] {
        p = p * r + c;
    }
    // low bits of `shifted` are n in two's complement; the shift drops the rest
    let scale = f64::from_bits(shifted.to_bits().wrapping_add(1023) << 52);
    p * scale
}

/// Largest double below one.
const ONE_BELOW: f64 = 1.0 - f64::EPSILON / 2.0;

/// Logistic function, kept strictly inside `(0, 1)` even when saturated.
/// NaN propagates.
#[inline(always)]
pub(crate) fn sigmoid(t: f64) -> f64 {
    let y = 1.0 / (1.0 + exp(-t));
    if y > ONE_BELOW {
        ONE_BELOW
    } else {
        y
    }
}

pub(crate) fn sigmoid_in_place(xs: &mut [f64]) {
    for x in xs {
        *x = sigmoid(*x);
    }
}

/// Row-major slice views for [`gemm`]: element `(i, j)` lives at
/// `i * row_stride + j * col_stride`.
#[derive(Clone, Copy)]
pub(crate) struct Layout {
    pub rows: usize,
    pub cols: usize,
    pub row_stride: usize,
    pub col_stride: usize,
}

impl Layout {
    pub fn row_major(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_stride: cols,
            col_stride: 1,
        }
    }

    pub fn transposed(self) -> Self {
        Self {
            rows: self.cols,
            cols: self.rows,
            row_stride: self.col_stride,
            col_stride: self.row_stride,
        }
    }

    fn max_index(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            0
        } else {
            (self.rows - 1) * self.row_stride + (self.cols - 1) * self.col_stride
        }
    }
}

/// `c = a · b + beta · c` with `c` row-major.
pub(crate) fn gemm(a: &[f64], la: Layout, b: &[f64], lb: Layout, beta: f64, c: &mut [f64]) {
    assert_eq!(la.cols, lb.rows, "inner dimensions");
    let (m, k, n) = (la.rows, la.cols, lb.cols);
    assert!(m * n <= c.len());
    assert!(m == 0 || k == 0 || la.max_index() < a.len());
    assert!(k == 0 || n == 0 || lb.max_index() < b.len());
    // SAFETY: the asserts above keep every index the kernel touches inside
    // the three slices, and `c` is uniquely borrowed.
    #[allow(unsafe_code)]
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            la.row_stride as isize,
            la.col_stride as isize,
            b.as_ptr(),
            lb.row_stride as isize,
            lb.col_stride as isize,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}
