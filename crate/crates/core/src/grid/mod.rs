//! Periodic sampling lattices on the torus `[0, L)^d`.
//!
//! Physical samples sit at `x_j = j·h` for `j ∈ {0,…,n−1}^d`; frequency
//! samples sit at `ξ_k = k/L` for `k ∈ {−n/2,…,n/2−1}^d`, stored in increasing
//! `k` order (index `i` on an axis holds `k = i − n/2`). Both sides use
//! row-major order with the last axis fastest.

mod field;
pub(crate) mod generate;

pub use field::{pairwise_sum, SampledField, Side};
pub use generate::{generate, AxisBox, GeneratorSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;

/// Multi-index with unused trailing axes set to zero.
pub type Index = [usize; MAX_DIM];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(dim: usize, points_per_axis: usize, side_length: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if points_per_axis < 4 {
            return Err(Error::InvalidGrid(format!(
                "need at least 4 points per axis, got {points_per_axis}"
            )));
        }
        if points_per_axis % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even, got {points_per_axis}"
            )));
        }
        if !(side_length.is_finite() && side_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "side length must be positive, got {side_length}"
            )));
        }
        let total = points_per_axis.checked_pow(dim as u32);
        if total.is_none() {
            return Err(Error::InvalidGrid("grid too large".into()));
        }
        Ok(Self {
            dim,
            n: points_per_axis,
            length: side_length,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn side_length(&self) -> f64 {
        self.length
    }

    /// Lattice spacing `h = L/n`.
    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Physical quadrature weight `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Frequency quadrature weight `(1/L)^d`.
    pub fn frequency_cell_volume(&self) -> f64 {
        self.length.recip().powi(self.dim as i32)
    }

    pub fn total_points(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// `L^d`.
    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// `log2 n` when `n` is a power of two.
    pub fn dyadic_depth(&self) -> Option<u32> {
        self.n.is_power_of_two().then(|| self.n.trailing_zeros())
    }

    pub fn unravel(&self, mut flat: usize) -> Index {
        let mut idx = [0; MAX_DIM];
        for axis in (0..self.dim).rev() {
            idx[axis] = flat % self.n;
            flat /= self.n;
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx[..self.dim]
            .iter()
            .fold(0, |acc, &i| acc * self.n + i)
    }

    /// Physical coordinates `x_j = j·h` of a flat index.
    pub fn position(&self, flat: usize) -> [f64; MAX_DIM] {
        let h = self.spacing();
        self.unravel(flat).map(|j| j as f64 * h)
    }

    /// Integer wave-vector `k` of a flat frequency-side index.
    pub fn wavenumber(&self, flat: usize) -> [i64; MAX_DIM] {
        let half = (self.n / 2) as i64;
        let mut k = self.unravel(flat).map(|i| i as i64 - half);
        k[self.dim..].iter_mut().for_each(|v| *v = 0);
        k
    }

    /// Frequency `ξ_k = k/L` of a flat frequency-side index.
    pub fn frequency(&self, flat: usize) -> [f64; MAX_DIM] {
        self.wavenumber(flat).map(|k| k as f64 / self.length)
    }

    /// Flat frequency-side index of wave-vector `k` (reduced mod `n`).
    pub fn frequency_index(&self, k: &[i64]) -> usize {
        let n = self.n as i64;
        let half = n / 2;
        let mut idx = [0usize; MAX_DIM];
        for axis in 0..self.dim {
            let kk = k.get(axis).copied().unwrap_or(0);
            idx[axis] = ((kk + half).rem_euclid(n)) as usize;
        }
        self.ravel(&idx)
    }

    /// Nyquist radius `n/(2L)` along one axis.
    pub fn nyquist(&self) -> f64 {
        self.n as f64 / (2.0 * self.length)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let g = Grid::new(1, 256, 16.0).unwrap();
        assert_eq!(g.spacing(), 0.0625);
        assert_eq!(g.spacing() * 256.0, 16.0);
        let g = Grid::new(2, 64, 1.0).unwrap();
        assert_eq!(g.total_points(), 4096);
        assert_eq!(g.cell_volume(), 1.0 / 4096.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(Grid::new(1, 255, 16.0), Err(Error::InvalidGrid(_))));
        assert!(Grid::new(1, 2, 16.0).is_err());
        assert!(Grid::new(0, 64, 1.0).is_err());
        assert!(Grid::new(4, 8, 1.0).is_err());
        assert!(Grid::new(1, 64, 0.0).is_err());
        assert!(Grid::new(1, 64, -1.0).is_err());
    }

    #[test]
    fn ravel_roundtrip_and_frequency_layout() {
        let g = Grid::new(3, 6, 2.0).unwrap();
        for flat in 0..g.total_points() {
            assert_eq!(g.ravel(&g.unravel(flat)), flat);
        }
        let g = Grid::new(1, 8, 2.0).unwrap();
        assert_eq!(g.wavenumber(0)[0], -4);
        assert_eq!(g.wavenumber(7)[0], 3);
        assert_eq!(g.frequency(5)[0], 0.5);
        assert_eq!(g.frequency_index(&[-4]), 0);
        assert_eq!(g.frequency_index(&[4]), 0);
        assert_eq!(g.frequency_index(&[0]), 4);
    }

    #[test]
    fn dyadic_depth() {
        assert_eq!(Grid::new(2, 512, 1.0).unwrap().dyadic_depth(), Some(9));
        assert_eq!(Grid::new(1, 6, 1.0).unwrap().dyadic_depth(), None);
    }
}
