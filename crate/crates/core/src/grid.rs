use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fft::is_smooth;

/// How L^p norms integrate over the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Measure {
    /// Averages over the cell: the constant field 1 has unit norm.
    Volume,
    /// Plain Lebesgue integral over the period cell.
    Lebesgue,
}

/// Periodic 3-torus discretization. Two horizontal axes share `n_h` points and
/// period `l_h`; the vertical axis has `n_v` points and period `l_v`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grid {
    pub n_h: usize,
    pub n_v: usize,
    pub l_h: f64,
    pub l_v: f64,
    /// Dealiasing fraction as (numerator, denominator); 2/3 by default.
    pub dealias: (u32, u32),
    pub measure: Measure,
}

impl Grid {
    /// Grid with both periods 2π and the 2/3 dealiasing rule.
    pub fn new(n_h: usize, n_v: usize) -> Result<Self> {
        Self::with_periods(n_h, n_v, 2.0 * PI, 2.0 * PI)
    }

    pub fn cube(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn with_periods(n_h: usize, n_v: usize, l_h: f64, l_v: f64) -> Result<Self> {
        let g = Grid { n_h, n_v, l_h, l_v, dealias: (2, 3), measure: Measure::Volume };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("n_h", self.n_h), ("n_v", self.n_v)] {
            if n < 8 || n % 2 != 0 || !is_smooth(n) {
                return Err(Error::InvalidGrid(alloc::format!(
                    "{name} = {n} must be even, at least 8 and of the form 2^a 3^b"
                )));
            }
        }
        if !(self.l_h.is_finite() && self.l_h > 0.0 && self.l_v.is_finite() && self.l_v > 0.0) {
            return Err(Error::InvalidGrid("periods must be finite and positive".into()));
        }
        let (p, q) = self.dealias;
        if q == 0 || p == 0 || p > q {
            return Err(Error::InvalidGrid("dealias fraction must lie in (0, 1]".into()));
        }
        Ok(())
    }

    pub fn with_measure(mut self, measure: Measure) -> Self {
        self.measure = measure;
        self
    }

    pub fn with_dealias(mut self, num: u32, den: u32) -> Result<Self> {
        self.dealias = (num, den);
        self.validate()?;
        Ok(self)
    }

    /// Grid whose periods are divided by `lambda` (same point counts).
    pub fn contracted(&self, lambda: f64) -> Self {
        Grid { l_h: self.l_h / lambda, l_v: self.l_v / lambda, ..*self }
    }

    pub fn len(&self) -> usize {
        self.n_h * self.n_h * self.n_v
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn plane_len(&self) -> usize {
        self.n_h * self.n_h
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize, i3: usize) -> usize {
        (i1 * self.n_h + i2) * self.n_v + i3
    }

    #[inline]
    pub fn unindex(&self, idx: usize) -> (usize, usize, usize) {
        let i3 = idx % self.n_v;
        let r = idx / self.n_v;
        (r / self.n_h, r % self.n_h, i3)
    }

    /// Integer wavenumber stored at position `i` of an axis of length `n`,
    /// in `[-n/2 + 1, n/2]`.
    #[inline]
    pub fn wavenumber(i: usize, n: usize) -> i64 {
        if i <= n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Storage position of integer wavenumber `k` on an axis of length `n`.
    pub fn position(k: i64, n: usize) -> Option<usize> {
        let half = (n / 2) as i64;
        if k > half || k <= -half {
            return None;
        }
        Some(if k >= 0 { k as usize } else { (k + n as i64) as usize })
    }

    pub fn kh_unit(&self) -> f64 {
        2.0 * PI / self.l_h
    }

    pub fn kv_unit(&self) -> f64 {
        2.0 * PI / self.l_v
    }

    /// Physical horizontal frequency at storage position `i`.
    #[inline]
    pub fn xi_h(&self, i: usize) -> f64 {
        Self::wavenumber(i, self.n_h) as f64 * self.kh_unit()
    }

    #[inline]
    pub fn xi_v(&self, i: usize) -> f64 {
        Self::wavenumber(i, self.n_v) as f64 * self.kv_unit()
    }

    /// Frequency used by odd multipliers (derivatives, projections): the
    /// Nyquist entry has no signed partner and is mapped to zero.
    #[inline]
    pub fn xi_h_odd(&self, i: usize) -> f64 {
        if i == self.n_h / 2 {
            0.0
        } else {
            self.xi_h(i)
        }
    }

    #[inline]
    pub fn xi_v_odd(&self, i: usize) -> f64 {
        if i == self.n_v / 2 {
            0.0
        } else {
            self.xi_v(i)
        }
    }

    /// Largest retained |wavenumber| under the dealiasing rule: the biggest
    /// `k` with `k < fraction * n / 2`.
    pub fn dealias_cutoff(&self, n: usize) -> i64 {
        let (p, q) = self.dealias;
        let (p, q) = (p as u64, q as u64);
        // k < p n / (2 q)  <=>  2 q k < p n
        let mut k = (p * n as u64) / (2 * q);
        while k > 0 && 2 * q * k >= p * n as u64 {
            k -= 1;
        }
        k as i64
    }

    /// Whether storage position (i1, i2, i3) survives the dealiasing rule.
    #[inline]
    pub fn keeps(&self, i1: usize, i2: usize, i3: usize) -> bool {
        let kh = self.dealias_cutoff(self.n_h);
        let kv = self.dealias_cutoff(self.n_v);
        Self::wavenumber(i1, self.n_h).abs() <= kh
            && Self::wavenumber(i2, self.n_h).abs() <= kh
            && Self::wavenumber(i3, self.n_v).abs() <= kv
    }

    pub fn volume(&self) -> f64 {
        self.l_h * self.l_h * self.l_v
    }

    /// Factor turning a cell-averaged L^2 norm into this grid's measure.
    pub fn l2_factor(&self) -> f64 {
        match self.measure {
            Measure::Volume => 1.0,
            Measure::Lebesgue => libm::sqrt(self.volume()),
        }
    }

    /// Factor for the mixed L^4_h(L^2_v) norm.
    pub fn l4l2_factor(&self) -> f64 {
        match self.measure {
            Measure::Volume => 1.0,
            Measure::Lebesgue => libm::pow(self.l_h * self.l_h, 0.25) * libm::sqrt(self.l_v),
        }
    }

    /// Factor for L^p_h(L^2_v) with general `p` (p = inf allowed).
    pub fn lpl2_factor(&self, p: f64) -> f64 {
        match self.measure {
            Measure::Volume => 1.0,
            Measure::Lebesgue => {
                let h = if p.is_infinite() { 1.0 } else { libm::pow(self.l_h * self.l_h, 1.0 / p) };
                h * libm::sqrt(self.l_v)
            }
        }
    }

    /// Mesh spacings (horizontal, vertical).
    pub fn spacing(&self) -> (f64, f64) {
        (self.l_h / self.n_h as f64, self.l_v / self.n_v as f64)
    }

    /// Smallest and largest nonzero |ξ_h| on the grid.
    pub fn xi_h_range(&self) -> (f64, f64) {
        let half = (self.n_h / 2) as f64;
        (self.kh_unit(), libm::sqrt(2.0) * half * self.kh_unit())
    }

    pub fn xi_v_range(&self) -> (f64, f64) {
        (self.kv_unit(), (self.n_v / 2) as f64 * self.kv_unit())
    }
}

impl core::fmt::Display for Grid {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "{}x{}x{} L=({:.17e},{:.17e}) dealias={}/{} measure={:?}",
            self.n_h, self.n_h, self.n_v, self.l_h, self.l_v, self.dealias.0, self.dealias.1, self.measure
        )
    }
}
