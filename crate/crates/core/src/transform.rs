//! Multi-dimensional transforms on the grid layout `(i1, i2, i3)`, with `i3`
//! contiguous.
//!
//! Coefficients follow the convention `a(x) = sum_xi c(xi) e^{i xi.x}`, so the
//! physical -> spectral direction carries the `1/N` factor.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::fft::{Direction, Plan};
use crate::grid::Grid;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Planned transforms for one grid. Holds scratch space, so an instance must
/// not be shared between threads; clone one per worker instead.
#[derive(Clone)]
pub struct Transformer {
    grid: Grid,
    plan_h: Plan,
    plan_v: Plan,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Transformer {
    pub fn new(grid: &Grid) -> Self {
        Self {
            grid: *grid,
            plan_h: Plan::new(grid.n_h),
            plan_v: Plan::new(grid.n_v),
            buf: Vec::new(),
            scratch: Vec::new(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Coefficients -> point values, in place.
    pub fn to_physical(&mut self, data: &mut [Complex64]) {
        self.transform3(data, Direction::Inverse, None);
    }

    /// Point values -> coefficients, in place.
    pub fn to_spectral(&mut self, data: &mut [Complex64]) {
        self.transform3(data, Direction::Forward, None);
        let s = 1.0 / self.grid.len() as f64;
        data.iter_mut().for_each(|c| *c *= s);
    }

    /// Inverse transform of a spectrum that vanishes outside the dealiasing
    /// box; lines that are identically zero are skipped.
    pub fn to_physical_dealiased(&mut self, data: &mut [Complex64]) {
        let band = self.band();
        self.transform3(data, Direction::Inverse, Some(band));
    }

    /// Forward transform where only the dealiasing box of the result is kept;
    /// entries outside the box are left unspecified and then zeroed.
    pub fn to_spectral_dealiased(&mut self, data: &mut [Complex64]) {
        let band = self.band();
        self.transform3(data, Direction::Forward, Some(band));
        let s = 1.0 / self.grid.len() as f64;
        let (bh, bv) = self.band();
        let g = self.grid;
        for (idx, c) in data.iter_mut().enumerate() {
            let (i1, i2, i3) = g.unindex(idx);
            if bh[i1] && bh[i2] && bv[i3] {
                *c *= s;
            } else {
                *c = ZERO;
            }
        }
    }

    fn band(&self) -> (Vec<bool>, Vec<bool>) {
        let g = &self.grid;
        let kh = g.dealias_cutoff(g.n_h);
        let kv = g.dealias_cutoff(g.n_v);
        let h = (0..g.n_h).map(|i| Grid::wavenumber(i, g.n_h).abs() <= kh).collect();
        let v = (0..g.n_v).map(|i| Grid::wavenumber(i, g.n_v).abs() <= kv).collect();
        (h, v)
    }

    fn transform3(&mut self, data: &mut [Complex64], dir: Direction, band: Option<(Vec<bool>, Vec<bool>)>) {
        let g = self.grid;
        assert_eq!(data.len(), g.len());
        let (nh, nv) = (g.n_h, g.n_v);
        match (&band, dir) {
            (None, _) => {
                self.plan_v.process(data, dir, &mut self.scratch);
                for i1 in 0..nh {
                    let slab = &mut data[i1 * nh * nv..(i1 + 1) * nh * nv];
                    strided_lines(slab, nh, nv, &self.plan_h, dir, &mut self.buf, &mut self.scratch);
                }
                strided_lines(data, nh, nh * nv, &self.plan_h, dir, &mut self.buf, &mut self.scratch);
            }
            (Some((bh, _)), Direction::Inverse) => {
                // vertical lines: only (i1, i2) inside the band carry data
                for i1 in 0..nh {
                    if !bh[i1] {
                        continue;
                    }
                    for i2 in 0..nh {
                        if bh[i2] {
                            let off = (i1 * nh + i2) * nv;
                            self.plan_v.process(&mut data[off..off + nv], dir, &mut self.scratch);
                        }
                    }
                }
                // axis 2: only slabs with i1 in band
                for i1 in 0..nh {
                    if bh[i1] {
                        let slab = &mut data[i1 * nh * nv..(i1 + 1) * nh * nv];
                        strided_lines(slab, nh, nv, &self.plan_h, dir, &mut self.buf, &mut self.scratch);
                    }
                }
                strided_lines(data, nh, nh * nv, &self.plan_h, dir, &mut self.buf, &mut self.scratch);
            }
            (Some((bh, _)), Direction::Forward) => {
                strided_lines(data, nh, nh * nv, &self.plan_h, dir, &mut self.buf, &mut self.scratch);
                for i1 in 0..nh {
                    if bh[i1] {
                        let slab = &mut data[i1 * nh * nv..(i1 + 1) * nh * nv];
                        strided_lines(slab, nh, nv, &self.plan_h, dir, &mut self.buf, &mut self.scratch);
                    }
                }
                for i1 in 0..nh {
                    if !bh[i1] {
                        continue;
                    }
                    for i2 in 0..nh {
                        if bh[i2] {
                            let off = (i1 * nh + i2) * nv;
                            self.plan_v.process(&mut data[off..off + nv], dir, &mut self.scratch);
                        }
                    }
                }
            }
        }
    }

    /// 2-D transform of one horizontal plane (`n_h * n_h`, row-major).
    pub fn plane_to_physical(&mut self, plane: &mut [Complex64]) {
        let n = self.grid.n_h;
        assert_eq!(plane.len(), n * n);
        self.plan_h.process(plane, Direction::Inverse, &mut self.scratch);
        strided_lines(plane, n, n, &self.plan_h, Direction::Inverse, &mut self.buf, &mut self.scratch);
    }

    pub fn plane_to_spectral(&mut self, plane: &mut [Complex64]) {
        let n = self.grid.n_h;
        assert_eq!(plane.len(), n * n);
        self.plan_h.process(plane, Direction::Forward, &mut self.scratch);
        strided_lines(plane, n, n, &self.plan_h, Direction::Forward, &mut self.buf, &mut self.scratch);
        let s = 1.0 / (n * n) as f64;
        plane.iter_mut().for_each(|c| *c *= s);
    }

    /// Vertical-only transform (coefficients in x3 -> point values in x3).
    pub fn vertical_to_physical(&mut self, data: &mut [Complex64]) {
        assert_eq!(data.len() % self.grid.n_v, 0);
        self.plan_v.process(data, Direction::Inverse, &mut self.scratch);
    }

    pub fn vertical_to_spectral(&mut self, data: &mut [Complex64]) {
        assert_eq!(data.len() % self.grid.n_v, 0);
        self.plan_v.process(data, Direction::Forward, &mut self.scratch);
        let s = 1.0 / self.grid.n_v as f64;
        data.iter_mut().for_each(|c| *c *= s);
    }
}

/// Transforms the length-`n` lines of stride `inner` in each block of
/// `n * inner` elements of `data`.
fn strided_lines(
    data: &mut [Complex64],
    n: usize,
    inner: usize,
    plan: &Plan,
    dir: Direction,
    buf: &mut Vec<Complex64>,
    scratch: &mut Vec<Complex64>,
) {
    let block = n * inner;
    if buf.len() < block {
        buf.resize(block, ZERO);
    }
    for blk in data.chunks_exact_mut(block) {
        transpose(blk, &mut buf[..block], n, inner);
        plan.process(&mut buf[..block], dir, scratch);
        transpose(&buf[..block], blk, inner, n);
    }
}

/// `dst[c * rows + r] = src[r * cols + c]` for a `rows x cols` source.
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const B: usize = 16;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

/// Index of `-xi` for every storage position of the grid.
pub fn negation_map(grid: &Grid) -> Vec<usize> {
    let (nh, nv) = (grid.n_h, grid.n_v);
    let mut out = vec![0; grid.len()];
    for i1 in 0..nh {
        let j1 = (nh - i1) % nh;
        for i2 in 0..nh {
            let j2 = (nh - i2) % nh;
            for i3 in 0..nv {
                let j3 = (nv - i3) % nv;
                out[grid.index(i1, i2, i3)] = grid.index(j1, j2, j3);
            }
        }
    }
    out
}

/// Splits the spectrum of `a + i b` (both real) into the spectra of `a`, `b`.
pub fn unpack_pair(z: &[Complex64], neg: &[usize], a: &mut [Complex64], b: &mut [Complex64]) {
    for (idx, zc) in z.iter().enumerate() {
        let zm = z[neg[idx]].conj();
        a[idx] = (zc + zm) * 0.5;
        let d = zc - zm;
        // d / (2i)
        b[idx] = Complex64::new(d.im * 0.5, -d.re * 0.5);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fft::naive_dft;

    #[test]
    fn roundtrip_and_single_mode() {
        let g = Grid::new(12, 8).unwrap();
        let mut t = Transformer::new(&g);
        let mut c = vec![ZERO; g.len()];
        // e^{i(x1 - 2 x2 + 3 x3)}
        c[g.index(1, Grid::position(-2, 12).unwrap(), 3)] = Complex64::new(1.0, 0.0);
        let orig = c.clone();
        t.to_physical(&mut c);
        for idx in 0..g.len() {
            let (i1, i2, i3) = g.unindex(idx);
            let x = [i1 as f64 * g.spacing().0, i2 as f64 * g.spacing().0, i3 as f64 * g.spacing().1];
            let ph = x[0] - 2.0 * x[1] + 3.0 * x[2];
            let expect = Complex64::new(libm::cos(ph), libm::sin(ph));
            assert!((c[idx] - expect).norm() < 1e-12);
        }
        t.to_spectral(&mut c);
        for (a, b) in c.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn axis_transform_matches_dft() {
        let g = Grid::new(8, 12).unwrap();
        let mut t = Transformer::new(&g);
        let data: Vec<Complex64> =
            (0..g.len()).map(|i| Complex64::new(libm::sin(i as f64 * 0.37), libm::cos(i as f64 * 0.11))).collect();
        let mut got = data.clone();
        t.to_spectral(&mut got);
        // separable oracle: naive DFT along each axis
        let mut want = data;
        let (nh, nv) = (g.n_h, g.n_v);
        for line in want.chunks_exact_mut(nv) {
            let y = naive_dft(line, Direction::Forward);
            line.copy_from_slice(&y);
        }
        for i1 in 0..nh {
            for i3 in 0..nv {
                let col: Vec<_> = (0..nh).map(|i2| want[g.index(i1, i2, i3)]).collect();
                let y = naive_dft(&col, Direction::Forward);
                for i2 in 0..nh {
                    want[g.index(i1, i2, i3)] = y[i2];
                }
            }
        }
        for i2 in 0..nh {
            for i3 in 0..nv {
                let col: Vec<_> = (0..nh).map(|i1| want[g.index(i1, i2, i3)]).collect();
                let y = naive_dft(&col, Direction::Forward);
                for i1 in 0..nh {
                    want[g.index(i1, i2, i3)] = y[i1] / g.len() as f64;
                }
            }
        }
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn dealiased_paths_agree_with_full_transforms() {
        let g = Grid::new(24, 12).unwrap();
        let mut t = Transformer::new(&g);
        let mut c: Vec<Complex64> = (0..g.len())
            .map(|i| {
                let (i1, i2, i3) = g.unindex(i);
                if g.keeps(i1, i2, i3) {
                    Complex64::new(libm::sin(i as f64), libm::cos(0.5 * i as f64))
                } else {
                    ZERO
                }
            })
            .collect();
        let mut full = c.clone();
        t.to_physical(&mut full);
        t.to_physical_dealiased(&mut c);
        for (a, b) in c.iter().zip(&full) {
            assert!((a - b).norm() < 1e-12);
        }
        let mut back = full.clone();
        t.to_spectral(&mut back);
        t.to_spectral_dealiased(&mut full);
        for idx in 0..g.len() {
            let (i1, i2, i3) = g.unindex(idx);
            if g.keeps(i1, i2, i3) {
                assert!((back[idx] - full[idx]).norm() < 1e-13);
            } else {
                assert_eq!(full[idx], ZERO);
            }
        }
    }
}
