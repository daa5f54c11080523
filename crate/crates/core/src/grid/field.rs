use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Grid;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Physical,
    Frequency,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Physical => "physical",
            Side::Frequency => "frequency",
        })
    }
}

/// Pairwise summation in a fixed split order, so that a reduction gives the
/// same bits no matter how the caller produced the terms.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

fn pairwise_sum_complex(xs: &[Complex64]) -> Complex64 {
    const BLOCK: usize = 64;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_complex(&xs[..mid]) + pairwise_sum_complex(&xs[mid..])
}

/// Complex samples of a function on a [`Grid`], on either the physical or
/// the frequency side.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: Grid,
    side: Side,
    values: Vec<Complex64>,
}

impl SampledField {
    pub fn new(grid: Grid, side: Side, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.total_points() {
            return Err(Error::Format(format!(
                "expected {} values, got {}",
                grid.total_points(),
                values.len()
            )));
        }
        Ok(Self { grid, side, values })
    }

    pub fn zeros(grid: Grid, side: Side) -> Self {
        Self {
            grid,
            side,
            values: vec![Complex64::new(0.0, 0.0); grid.total_points()],
        }
    }

    pub fn from_fn(grid: Grid, side: Side, f: impl FnMut(usize) -> Complex64) -> Self {
        Self {
            grid,
            side,
            values: (0..grid.total_points()).map(f).collect(),
        }
    }

    /// Physical-side field with the given real samples.
    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        Self::new(
            grid,
            Side::Physical,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// Constant physical-side field.
    pub fn constant(grid: Grid, c: Complex64) -> Self {
        Self::from_fn(grid, Side::Physical, |_| c)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Quadrature weight of one sample on this field's side.
    pub fn cell_volume(&self) -> f64 {
        match self.side {
            Side::Physical => self.grid.cell_volume(),
            Side::Frequency => self.grid.frequency_cell_volume(),
        }
    }

    pub fn require_side(&self, side: Side) -> Result<()> {
        if self.side != side {
            return Err(Error::SideMismatch { expected: side });
        }
        Ok(())
    }

    pub fn require_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        if self.side != other.side {
            return Err(Error::SideMismatch { expected: self.side });
        }
        Ok(())
    }

    /// `L^p` (quasi-)norm by Riemann-sum quadrature; `p = ∞` is the plain
    /// maximum of `|values|`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(invalid(format!("norm exponent must be positive, got {p}")));
        }
        if p.is_infinite() {
            return Ok(self.max_abs());
        }
        if p == 2.0 || p == 1.0 {
            let terms: Vec<f64> = if p == 2.0 {
                self.values.iter().map(|v| v.norm_sqr()).collect()
            } else {
                self.values.iter().map(|v| v.norm()).collect()
            };
            return Ok((pairwise_sum(&terms) * self.cell_volume()).powf(p.recip()));
        }
        // scaled by the maximum so large exponents neither overflow nor underflow
        let top = self.max_abs();
        if top == 0.0 {
            return Ok(0.0);
        }
        let terms: Vec<f64> = self.values.iter().map(|v| (v.norm() / top).powf(p)).collect();
        Ok(top * (pairwise_sum(&terms) * self.cell_volume()).powf(p.recip()))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `⟨f, g⟩ = ∫ f·ḡ`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        self.require_compatible(other)?;
        let terms: Vec<Complex64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .collect();
        Ok(pairwise_sum_complex(&terms) * self.cell_volume())
    }

    /// `∫ f`.
    pub fn integral(&self) -> Complex64 {
        pairwise_sum_complex(&self.values) * self.cell_volume()
    }

    /// Average of the samples.
    pub fn mean(&self) -> Complex64 {
        pairwise_sum_complex(&self.values) / self.values.len() as f64
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.require_compatible(other)?;
        Ok(Self {
            grid: self.grid,
            side: self.side,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        })
    }

    pub fn map(&self, op: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            side: self.side,
            values: self.values.iter().map(|&v| op(v)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        self.map(|v| v * lambda)
    }

    pub fn abs(&self) -> Self {
        self.map(|v| Complex64::new(v.norm(), 0.0))
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    /// Clamp the modulus to `r`, keeping the phase.
    pub fn truncate(&self, r: f64) -> Result<Self> {
        if !(r >= 0.0) {
            return Err(invalid(format!("truncation level must be nonnegative, got {r}")));
        }
        Ok(self.map(|v| {
            let m = v.norm();
            if m > r {
                v * (r / m)
            } else {
                v
            }
        }))
    }

    /// Periodic shift by whole cells: `out[j] = self[j − shift]`.
    pub fn roll(&self, shift: &[i64]) -> Self {
        let g = self.grid;
        let n = g.points_per_axis() as i64;
        let mut out = vec![Complex64::new(0.0, 0.0); self.values.len()];
        for (flat, v) in self.values.iter().enumerate() {
            let mut idx = g.unravel(flat);
            for axis in 0..g.dim() {
                let s = shift.get(axis).copied().unwrap_or(0);
                idx[axis] = (idx[axis] as i64 + s).rem_euclid(n) as usize;
            }
            out[g.ravel(&idx)] = *v;
        }
        Self {
            grid: g,
            side: self.side,
            values: out,
        }
    }

    /// Reflection `x ↦ −x` on the periodic lattice.
    pub fn reflect(&self) -> Self {
        let g = self.grid;
        let n = g.points_per_axis();
        Self::from_fn(g, self.side, |flat| {
            let mut idx = g.unravel(flat);
            // j ↦ −j on the physical side; on the frequency side i = k + n/2
            // maps to n − i, with k = −n/2 fixed by aliasing. Same formula.
            for axis in 0..g.dim() {
                idx[axis] = (n - idx[axis]) % n;
            }
            self.values[g.ravel(&idx)]
        })
    }
}
