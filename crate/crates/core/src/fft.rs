//! One-dimensional complex FFT plans.
//!
//! Without the `std` feature the crate uses a small mixed-radix kernel
//! (factors 2, 3 and 4) written in the style of kissfft. With `std` the plans
//! delegate to `rustfft`. Both compute the unnormalized transform
//! `X_k = sum_j x_j e^{-+2 pi i jk/n}`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

/// Transform direction. `Forward` uses the `e^{-i..}` kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Returns true when `n` factors into 2s and 3s only.
pub fn is_smooth(n: usize) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    while m.is_multiple_of(2) {
        m /= 2;
    }
    while m.is_multiple_of(3) {
        m /= 3;
    }
    m == 1
}

/// Mixed-radix plan used when `rustfft` is unavailable. Lengths must be
/// smooth (see [`is_smooth`]).
#[derive(Debug, Clone)]
pub struct KernelPlan {
    n: usize,
    factors: Vec<(usize, usize)>,
    twiddles_fwd: Vec<Complex64>,
    twiddles_inv: Vec<Complex64>,
}

impl KernelPlan {
    pub fn new(n: usize) -> Self {
        assert!(is_smooth(n), "fft length {n} is not of the form 2^a 3^b");
        let mut factors = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = if m.is_multiple_of(4) {
                4
            } else if m.is_multiple_of(2) {
                2
            } else {
                3
            };
            m /= p;
            factors.push((p, m));
        }
        let twiddles_fwd: Vec<Complex64> = (0..n)
            .map(|i| {
                let a = -2.0 * PI * i as f64 / n as f64;
                Complex64::new(libm::cos(a), libm::sin(a))
            })
            .collect();
        let twiddles_inv = twiddles_fwd.iter().map(|w| w.conj()).collect();
        Self { n, factors, twiddles_fwd, twiddles_inv }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Transforms every length-`n` chunk of `data` in place.
    pub fn process(&self, data: &mut [Complex64], dir: Direction, scratch: &mut Vec<Complex64>) {
        let n = self.n;
        assert_eq!(data.len() % n, 0);
        if n == 1 {
            return;
        }
        scratch.resize(n, Complex64::new(0.0, 0.0));
        let tw = match dir {
            Direction::Forward => &self.twiddles_fwd,
            Direction::Inverse => &self.twiddles_inv,
        };
        for chunk in data.chunks_exact_mut(n) {
            scratch.copy_from_slice(chunk);
            self.work(chunk, scratch, 0, 1, 0, tw, dir);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn work(
        &self,
        out: &mut [Complex64],
        input: &[Complex64],
        in_offset: usize,
        f_stride: usize,
        depth: usize,
        tw: &[Complex64],
        dir: Direction,
    ) {
        let (p, m) = self.factors[depth];
        if m == 1 {
            for k in 0..p {
                out[k] = input[in_offset + k * f_stride];
            }
        } else {
            for k in 0..p {
                self.work(
                    &mut out[k * m..(k + 1) * m],
                    input,
                    in_offset + k * f_stride,
                    f_stride * p,
                    depth + 1,
                    tw,
                    dir,
                );
            }
        }
        match p {
            2 => bfly2(out, f_stride, tw, m),
            4 => bfly4(out, f_stride, tw, m, dir),
            _ => bfly_generic(out, f_stride, tw, m, p, self.n),
        }
    }
}

fn bfly2(out: &mut [Complex64], f_stride: usize, tw: &[Complex64], m: usize) {
    for k in 0..m {
        let t = out[m + k] * tw[k * f_stride];
        out[m + k] = out[k] - t;
        out[k] += t;
    }
}

fn bfly4(out: &mut [Complex64], f_stride: usize, tw: &[Complex64], m: usize, dir: Direction) {
    for k in 0..m {
        let s0 = out[k + m] * tw[k * f_stride];
        let s1 = out[k + 2 * m] * tw[2 * k * f_stride];
        let s2 = out[k + 3 * m] * tw[3 * k * f_stride];
        let s5 = out[k] - s1;
        let a0 = out[k] + s1;
        let s3 = s0 + s2;
        let s4 = s0 - s2;
        // multiply by -i (forward) or +i (inverse)
        let s4r = match dir {
            Direction::Forward => Complex64::new(s4.im, -s4.re),
            Direction::Inverse => Complex64::new(-s4.im, s4.re),
        };
        out[k + 2 * m] = a0 - s3;
        out[k] = a0 + s3;
        out[k + m] = s5 + s4r;
        out[k + 3 * m] = s5 - s4r;
    }
}

fn bfly_generic(out: &mut [Complex64], f_stride: usize, tw: &[Complex64], m: usize, p: usize, n: usize) {
    let mut scratch = [Complex64::new(0.0, 0.0); 4];
    debug_assert!(p <= 4);
    for u in 0..m {
        for q1 in 0..p {
            scratch[q1] = out[u + q1 * m];
        }
        for q1 in 0..p {
            let k = u + q1 * m;
            let mut acc = scratch[0];
            let mut twidx = 0usize;
            for s in scratch.iter().take(p).skip(1) {
                twidx += f_stride * k;
                if twidx >= n {
                    twidx %= n;
                }
                acc += s * tw[twidx];
            }
            out[k] = acc;
        }
    }
}

/// A planned 1-D transform of fixed length, usable in both directions.
#[derive(Clone)]
pub struct Plan {
    n: usize,
    backend: Backend,
}

#[derive(Clone)]
enum Backend {
    #[cfg_attr(feature = "std", allow(dead_code))]
    Kernel(KernelPlan),
    #[cfg(feature = "std")]
    Rust { fwd: alloc::sync::Arc<dyn rustfft::Fft<f64>>, inv: alloc::sync::Arc<dyn rustfft::Fft<f64>> },
}

impl Plan {
    pub fn new(n: usize) -> Self {
        #[cfg(feature = "std")]
        {
            let mut planner = rustfft::FftPlanner::<f64>::new();
            let fwd = planner.plan_fft_forward(n);
            let inv = planner.plan_fft_inverse(n);
            Self { n, backend: Backend::Rust { fwd, inv } }
        }
        #[cfg(not(feature = "std"))]
        {
            Self { n, backend: Backend::Kernel(KernelPlan::new(n)) }
        }
    }

    /// Plan that always uses the built-in kernel, regardless of features.
    pub fn kernel(n: usize) -> Self {
        Self { n, backend: Backend::Kernel(KernelPlan::new(n)) }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Transforms every length-`n` chunk of `data` in place (unnormalized).
    pub fn process(&self, data: &mut [Complex64], dir: Direction, scratch: &mut Vec<Complex64>) {
        match &self.backend {
            Backend::Kernel(k) => k.process(data, dir, scratch),
            #[cfg(feature = "std")]
            Backend::Rust { fwd, inv } => {
                let f = match dir {
                    Direction::Forward => fwd,
                    Direction::Inverse => inv,
                };
                let need = f.get_inplace_scratch_len();
                if scratch.len() < need {
                    scratch.resize(need, Complex64::new(0.0, 0.0));
                }
                f.process_with_scratch(data, &mut scratch[..need]);
            }
        }
    }
}

/// Direct O(n^2) DFT, used as a test oracle.
pub fn naive_dft(input: &[Complex64], dir: Direction) -> Vec<Complex64> {
    let n = input.len();
    let sign = match dir {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (k, o) in out.iter_mut().enumerate() {
        for (j, x) in input.iter().enumerate() {
            let a = sign * 2.0 * PI * ((j * k) % n) as f64 / n as f64;
            *o += x * Complex64::new(libm::cos(a), libm::sin(a));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signal(n: usize) -> Vec<Complex64> {
        (0..n).map(|j| Complex64::new(libm::sin(0.3 * j as f64 + 0.1), libm::cos(1.7 * j as f64))).collect()
    }

    #[test]
    fn kernel_matches_naive_dft() {
        for &n in &[1usize, 2, 3, 4, 6, 8, 9, 12, 16, 18, 24, 27, 32, 36, 48, 64, 96] {
            let x = signal(n);
            for dir in [Direction::Forward, Direction::Inverse] {
                let mut y = x.clone();
                let mut scratch = Vec::new();
                Plan::kernel(n).process(&mut y, dir, &mut scratch);
                let z = naive_dft(&x, dir);
                for (a, b) in y.iter().zip(&z) {
                    assert!((a - b).norm() < 1e-10 * n as f64, "n={n} {dir:?}");
                }
            }
        }
    }

    #[test]
    fn default_backend_agrees_with_kernel() {
        let n = 48;
        let x: Vec<Complex64> = (0..3).flat_map(|_| signal(n)).collect();
        let mut a = x.clone();
        let mut b = x;
        let mut s = Vec::new();
        Plan::new(n).process(&mut a, Direction::Forward, &mut s);
        Plan::kernel(n).process(&mut b, Direction::Forward, &mut s);
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).norm() < 1e-11);
        }
    }

    #[test]
    fn smoothness() {
        assert!(is_smooth(48));
        assert!(is_smooth(64));
        assert!(!is_smooth(10));
        assert!(!is_smooth(0));
    }
}
