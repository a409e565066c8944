//! Orthonormal DCT-II / DCT-III on top of a complex FFT (Makhoul's
//! reordering), plus separable 2D helpers.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Planned orthonormal DCT of one length.
pub(crate) struct Dct {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// e^{-i pi k / 2n}
    twiddles: Vec<Complex64>,
}

impl Dct {
    fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        let twiddles = (0..len)
            .map(|k| Complex64::from_polar(1.0, -PI * k as f64 / (2 * len) as f64))
            .collect();
        Self {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
            twiddles,
        }
    }

    /// Shared plan for `len`; plans are built once per process.
    pub(crate) fn planned(len: usize) -> Arc<Dct> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Dct>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
        map.entry(len).or_insert_with(|| Arc::new(Dct::new(len))).clone()
    }

    fn scale(&self, k: usize) -> f64 {
        let n = self.len as f64;
        if k == 0 {
            (1.0 / n).sqrt()
        } else {
            (2.0 / n).sqrt()
        }
    }

    /// In-place orthonormal DCT-II. `buf` is scratch of the same length.
    pub(crate) fn dct2(&self, data: &mut [f64], buf: &mut [Complex64]) {
        let n = self.len;
        debug_assert_eq!(data.len(), n);
        if n == 1 {
            return;
        }
        for k in 0..n / 2 {
            buf[k] = Complex64::new(data[2 * k], 0.0);
            buf[n - 1 - k] = Complex64::new(data[2 * k + 1], 0.0);
        }
        self.forward.process(buf);
        for k in 0..n {
            data[k] = (buf[k] * self.twiddles[k]).re * self.scale(k);
        }
    }

    /// In-place orthonormal DCT-III, the inverse of [`Dct::dct2`].
    pub(crate) fn dct3(&self, data: &mut [f64], buf: &mut [Complex64]) {
        let n = self.len;
        debug_assert_eq!(data.len(), n);
        if n == 1 {
            return;
        }
        let unscaled = |k: usize| {
            if k == n {
                0.0
            } else {
                data[k] / self.scale(k)
            }
        };
        for k in 0..n {
            buf[k] = Complex64::new(unscaled(k), -unscaled(n - k)) * self.twiddles[k].conj();
        }
        self.inverse.process(buf);
        let norm = 1.0 / n as f64;
        for k in 0..n / 2 {
            data[2 * k] = buf[k].re * norm;
            data[2 * k + 1] = buf[n - 1 - k].re * norm;
        }
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Forward,
    Inverse,
}

fn separable(data: &mut [f64], side: usize, kind: Kind) {
    debug_assert_eq!(data.len(), side * side);
    let plan = Dct::planned(side);
    let mut buf = vec![Complex64::default(); side];
    let apply = |row: &mut [f64], buf: &mut [Complex64]| match kind {
        Kind::Forward => plan.dct2(row, buf),
        Kind::Inverse => plan.dct3(row, buf),
    };
    for row in data.chunks_exact_mut(side) {
        apply(row, &mut buf);
    }
    let mut column = vec![0.0; side];
    for c in 0..side {
        for r in 0..side {
            column[r] = data[r * side + c];
        }
        apply(&mut column, &mut buf);
        for r in 0..side {
            data[r * side + c] = column[r];
        }
    }
}

/// Orthonormal 2D DCT-II of a square row-major array.
pub(crate) fn dct2_2d(data: &mut [f64], side: usize) {
    separable(data, side, Kind::Forward);
}

/// Orthonormal 2D DCT-III of a square row-major array.
pub(crate) fn dct3_2d(data: &mut [f64], side: usize) {
    separable(data, side, Kind::Inverse);
}
