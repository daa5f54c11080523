use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Grid, SampledField, Side};
use crate::error::{Error, Result};
use crate::rng;

/// Value a generator may still have at the edge of the fundamental domain.
const DECAY_GUARD: f64 = 1e-14;

/// Axis-aligned box `Π [lo_i, hi_i)` in physical coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Self { lo, hi }
    }

    /// Cube of half-width `a` centred at the domain midpoint.
    pub fn centered(grid: &Grid, half_width: f64) -> Self {
        let c = grid.side_length() / 2.0;
        Self {
            lo: vec![c - half_width; grid.dim()],
            hi: vec![c + half_width; grid.dim()],
        }
    }

    fn validate(&self, grid: &Grid, margin: f64) -> Result<()> {
        if self.lo.len() != grid.dim() || self.hi.len() != grid.dim() {
            return Err(Error::InvalidGenerator(format!(
                "box has {} / {} coordinates, grid has dimension {}",
                self.lo.len(),
                self.hi.len(),
                grid.dim()
            )));
        }
        let l = grid.side_length();
        for (&lo, &hi) in self.lo.iter().zip(&self.hi) {
            if !(lo < hi) {
                return Err(Error::InvalidGenerator(format!("empty box side [{lo}, {hi})")));
            }
            let pad = (hi - lo) * margin;
            if lo - pad < 0.0 || hi + pad > l {
                return Err(Error::InvalidGenerator(format!(
                    "support [{}, {}] leaves the fundamental domain [0, {l}]",
                    lo - pad,
                    hi + pad
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(x)
            .all(|((&lo, &hi), &v)| lo <= v && v < hi)
    }
}

/// Test functions used throughout the crate.
///
/// Unless stated otherwise profiles are centred at the domain midpoint `L/2`
/// and must have (numerically) vanished at the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// `e^{−επ|x−c|²}`.
    Gaussian { eps: f64 },
    /// Product of one-dimensional tents: 1 on the box, linear decay over a
    /// band of width `δ·(side)/2` on each side, 0 outside the dilate.
    Tent { cube: AxisBox, delta: f64 },
    /// `ρ_n(x) ∝ e^{1/(|n(x−c)|²−1)}` normalised so that `∫ρ_n = 1` by
    /// quadrature.
    Mollifier { index: u32 },
    Indicator { cube: AxisBox },
    /// Mean-zero `H¹` atom on the Euclidean ball `B(center, radius)` with
    /// `|a| ≤ |B|^{−1}`.
    Atom { center: Vec<f64>, radius: f64 },
    /// Plane wave `e^{2πi k·x/L}`.
    Mode { k: Vec<i64> },
    /// White noise: iid standard normal samples.
    RandomGaussian { seed: u64 },
    /// Sum of `count` random tents with uniform amplitudes in `[−1, 1]`.
    RandomTents { seed: u64, count: usize },
    /// Sum of `count` random Gaussian bumps with normal amplitudes.
    RandomBumps { seed: u64, count: usize },
    /// `1/h^d` at the origin cell, 0 elsewhere.
    DiscreteDelta,
    /// Gaussian envelope `e^{−επ|x−c|²}` times `cos(2π κ·(x−c))`.
    WavePacket { eps: f64, frequency: Vec<f64> },
}

pub fn generate(grid: &Grid, spec: &GeneratorSpec) -> Result<SampledField> {
    match spec {
        GeneratorSpec::Gaussian { eps } => gaussian(grid, *eps, None, 1.0),
        GeneratorSpec::Tent { cube, delta } => tent(grid, cube, *delta),
        GeneratorSpec::Mollifier { index } => mollifier(grid, *index),
        GeneratorSpec::Indicator { cube } => {
            cube.validate(grid, 0.0)?;
            Ok(real_field(grid, |x| if cube.contains(x) { 1.0 } else { 0.0 }))
        }
        GeneratorSpec::Atom { center, radius } => atom(grid, center, *radius),
        GeneratorSpec::Mode { k } => mode(grid, k),
        GeneratorSpec::RandomGaussian { seed } => {
            let mut r = rng::seeded(*seed);
            let vals: Vec<f64> = (0..grid.total_points())
                .map(|_| r.sample(StandardNormal))
                .collect();
            SampledField::from_real(*grid, &vals)
        }
        GeneratorSpec::RandomTents { seed, count } => random_tents(grid, *seed, *count),
        GeneratorSpec::RandomBumps { seed, count } => random_bumps(grid, *seed, *count),
        GeneratorSpec::DiscreteDelta => {
            let mut f = SampledField::zeros(*grid, Side::Physical);
            f.values_mut()[0] = Complex64::new(grid.cell_volume().recip(), 0.0);
            Ok(f)
        }
        GeneratorSpec::WavePacket { eps, frequency } => {
            if frequency.len() != grid.dim() {
                return Err(Error::InvalidGenerator(format!(
                    "frequency has {} components, grid has dimension {}",
                    frequency.len(),
                    grid.dim()
                )));
            }
            let envelope = gaussian(grid, *eps, None, 1.0)?;
            let c = grid.side_length() / 2.0;
            let d = grid.dim();
            Ok(SampledField::from_fn(*grid, Side::Physical, |flat| {
                let x = grid.position(flat);
                let phase: f64 = (0..d).map(|a| frequency[a] * (x[a] - c)).sum();
                envelope.values()[flat] * (2.0 * PI * phase).cos()
            }))
        }
    }
}

fn real_field(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> SampledField {
    let d = grid.dim();
    SampledField::from_fn(*grid, Side::Physical, |flat| {
        let x = grid.position(flat);
        Complex64::new(f(&x[..d]), 0.0)
    })
}

/// `amp·e^{−επ|x−c|²}`; `c` defaults to the midpoint.
fn gaussian(grid: &Grid, eps: f64, center: Option<&[f64]>, amp: f64) -> Result<SampledField> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidGenerator(format!("gaussian needs ε > 0, got {eps}")));
    }
    let mid = vec![grid.side_length() / 2.0; grid.dim()];
    let c = center.unwrap_or(&mid);
    let l = grid.side_length();
    let gap = c.iter().map(|&ci| ci.min(l - ci)).fold(f64::INFINITY, f64::min);
    if (-eps * PI * gap * gap).exp() > DECAY_GUARD {
        return Err(Error::InvalidGenerator(format!(
            "gaussian with ε = {eps} does not decay below {DECAY_GUARD:e} inside the domain"
        )));
    }
    Ok(real_field(grid, |x| {
        let r2: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
        amp * (-eps * PI * r2).exp()
    }))
}

fn tent_profile(cube: &AxisBox, delta: f64, x: &[f64]) -> f64 {
    let mut v = 1.0;
    for ((&lo, &hi), &xi) in cube.lo.iter().zip(&cube.hi).zip(x) {
        let band = (hi - lo) * delta / 2.0;
        let out = if xi < lo {
            lo - xi
        } else if xi > hi {
            xi - hi
        } else {
            0.0
        };
        let f = if out == 0.0 {
            1.0
        } else if out < band {
            1.0 - out / band
        } else {
            0.0
        };
        v *= f;
        if v == 0.0 {
            break;
        }
    }
    v
}

fn tent(grid: &Grid, cube: &AxisBox, delta: f64) -> Result<SampledField> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidGenerator(format!("tent needs δ > 0, got {delta}")));
    }
    cube.validate(grid, delta / 2.0)?;
    Ok(real_field(grid, |x| tent_profile(cube, delta, x)))
}

fn bump(r2: f64) -> f64 {
    if r2 < 1.0 {
        (1.0 / (r2 - 1.0)).exp()
    } else {
        0.0
    }
}

fn mollifier(grid: &Grid, index: u32) -> Result<SampledField> {
    if index == 0 {
        return Err(Error::InvalidGenerator("mollifier index must be ≥ 1".into()));
    }
    let radius = 1.0 / index as f64;
    let l = grid.side_length();
    if radius >= l / 2.0 {
        return Err(Error::InvalidGenerator(format!(
            "mollifier support radius {radius} exceeds half the domain"
        )));
    }
    let c = l / 2.0;
    let n = index as f64;
    let raw = real_field(grid, |x| {
        let r2: f64 = x.iter().map(|v| (n * (v - c)).powi(2)).sum();
        bump(r2)
    });
    let mass = raw.integral().re;
    if mass <= 0.0 {
        return Err(Error::InvalidGenerator(format!(
            "mollifier {index} is not resolved by the grid"
        )));
    }
    Ok(raw.scale(Complex64::new(mass.recip(), 0.0)))
}

/// Cells of the Euclidean ball `B(center, radius)`.
fn ball_cells(grid: &Grid, center: &[f64], radius: f64) -> Result<Vec<usize>> {
    if center.len() != grid.dim() {
        return Err(Error::InvalidGenerator(format!(
            "ball centre has {} coordinates, grid has dimension {}",
            center.len(),
            grid.dim()
        )));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidGenerator(format!("ball radius must be positive, got {radius}")));
    }
    let l = grid.side_length();
    if center.iter().any(|&c| c - radius < 0.0 || c + radius > l) {
        return Err(Error::InvalidGenerator("ball leaves the fundamental domain".into()));
    }
    let d = grid.dim();
    let cells: Vec<usize> = (0..grid.total_points())
        .filter(|&flat| {
            let x = grid.position(flat);
            let r2: f64 = x[..d].iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
            r2 < radius * radius
        })
        .collect();
    if cells.len() < 2 {
        return Err(Error::InvalidGenerator(format!(
            "ball of radius {radius} holds fewer than two grid cells"
        )));
    }
    Ok(cells)
}

/// Atom from raw ball values: subtract the mean, rescale to `max|a| = 1/|B|`.
pub(crate) fn atom_from_values(
    grid: &Grid,
    cells: &[usize],
    raw: &[f64],
) -> Result<SampledField> {
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    let centred: Vec<f64> = raw.iter().map(|v| v - mean).collect();
    let peak = centred.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Err(Error::InvalidGenerator("degenerate atom profile".into()));
    }
    let ball_measure = cells.len() as f64 * grid.cell_volume();
    let s = 1.0 / (ball_measure * peak);
    let mut f = SampledField::zeros(*grid, Side::Physical);
    for (&cell, v) in cells.iter().zip(&centred) {
        f.values_mut()[cell] = Complex64::new(v * s, 0.0);
    }
    Ok(f)
}

pub(crate) fn atom_cells(grid: &Grid, center: &[f64], radius: f64) -> Result<Vec<usize>> {
    ball_cells(grid, center, radius)
}

/// Two-level atom: `+1` on the half of the ball with `x₁ < c₁`, a
/// compensating negative level on the rest.
fn atom(grid: &Grid, center: &[f64], radius: f64) -> Result<SampledField> {
    let cells = ball_cells(grid, center, radius)?;
    let left: Vec<bool> = cells.iter().map(|&c| grid.position(c)[0] < center[0]).collect();
    let n_left = left.iter().filter(|&&b| b).count();
    let n_right = cells.len() - n_left;
    if n_left == 0 || n_right == 0 {
        return Err(Error::InvalidGenerator("ball too small to carry an atom".into()));
    }
    let (big, small) = (n_left.max(n_right) as f64, n_left.min(n_right) as f64);
    let left_is_small = n_left <= n_right;
    let ball_measure = cells.len() as f64 * grid.cell_volume();
    let mut f = SampledField::zeros(*grid, Side::Physical);
    for (&cell, &is_left) in cells.iter().zip(&left) {
        let v = if is_left == left_is_small { 1.0 } else { -small / big };
        f.values_mut()[cell] = Complex64::new(v / ball_measure, 0.0);
    }
    Ok(f)
}

fn mode(grid: &Grid, k: &[i64]) -> Result<SampledField> {
    if k.len() != grid.dim() {
        return Err(Error::InvalidGenerator(format!(
            "wave-vector has {} components, grid has dimension {}",
            k.len(),
            grid.dim()
        )));
    }
    let n = grid.points_per_axis() as i64;
    Ok(SampledField::from_fn(*grid, Side::Physical, |flat| {
        let j = grid.unravel(flat);
        // exact integer phase k·j mod n before going to floating point
        let kj: i64 = k.iter().zip(j).map(|(&a, b)| a * b as i64).sum::<i64>().rem_euclid(n);
        Complex64::from_polar(1.0, 2.0 * PI * kj as f64 / n as f64)
    }))
}

fn random_tents(grid: &Grid, seed: u64, count: usize) -> Result<SampledField> {
    if count == 0 {
        return Err(Error::InvalidGenerator("random_tents needs count ≥ 1".into()));
    }
    let mut r = rng::seeded(seed);
    let l = grid.side_length();
    let d = grid.dim();
    let mut acc = SampledField::zeros(*grid, Side::Physical);
    for _ in 0..count {
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        for _ in 0..d {
            let c = r.random_range(0.3 * l..0.7 * l);
            let w = r.random_range(l / 32.0..l / 10.0);
            lo.push(c - w);
            hi.push(c + w);
        }
        let delta = r.random_range(0.25..1.0);
        let amp: f64 = r.random_range(-1.0..1.0);
        let t = tent(grid, &AxisBox::new(lo, hi), delta)?;
        acc = acc.add(&t.scale(Complex64::new(amp, 0.0)))?;
    }
    Ok(acc)
}

fn random_bumps(grid: &Grid, seed: u64, count: usize) -> Result<SampledField> {
    if count == 0 {
        return Err(Error::InvalidGenerator("random_bumps needs count ≥ 1".into()));
    }
    let mut r = rng::seeded(seed);
    let l = grid.side_length();
    let d = grid.dim();
    let mut acc = SampledField::zeros(*grid, Side::Physical);
    for _ in 0..count {
        let c: Vec<f64> = (0..d).map(|_| r.random_range(0.4 * l..0.6 * l)).collect();
        let sigma = r.random_range(l / 24.0..l / 10.0);
        let amp: f64 = r.sample(StandardNormal);
        let g = gaussian(grid, sigma.powi(-2), Some(&c), amp)?;
        acc = acc.add(&g)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1() -> Grid {
        Grid::new(1, 256, 16.0).unwrap()
    }

    #[test]
    fn gaussian_peaks_at_center() {
        let g = grid1();
        let f = generate(&g, &GeneratorSpec::Gaussian { eps: 1.0 }).unwrap();
        assert_eq!(f.values()[128].re, 1.0);
        assert_eq!(f.max_abs(), 1.0);
        assert!(f.values()[0].norm() < DECAY_GUARD);
        assert!(generate(&g, &GeneratorSpec::Gaussian { eps: 0.0 }).is_err());
        assert!(generate(&g, &GeneratorSpec::Gaussian { eps: 1e-3 }).is_err());
    }

    #[test]
    fn mollifier_has_unit_mass() {
        for d in 1..=2 {
            let g = Grid::new(d, 128, 4.0).unwrap();
            let rho = generate(&g, &GeneratorSpec::Mollifier { index: 1 }).unwrap();
            assert!((rho.integral().re - 1.0).abs() < 1e-12);
            assert!(rho.values().iter().all(|v| v.re >= 0.0));
        }
        let g = grid1();
        assert!(generate(&g, &GeneratorSpec::Mollifier { index: 0 }).is_err());
    }

    #[test]
    fn atom_constraints() {
        let g = Grid::new(2, 64, 4.0).unwrap();
        let spec = GeneratorSpec::Atom { center: vec![2.0, 2.0], radius: 0.7 };
        let a = generate(&g, &spec).unwrap();
        let cells = ball_cells(&g, &[2.0, 2.0], 0.7).unwrap();
        let ball = cells.len() as f64 * g.cell_volume();
        assert!(a.integral().norm() < 1e-12);
        assert!(a.max_abs() <= 1.0 / ball * (1.0 + 1e-15));
        assert!(a.lp_norm(1.0).unwrap() <= 1.0 + 1e-12);
        assert!(generate(&g, &GeneratorSpec::Atom { center: vec![0.2, 2.0], radius: 0.7 }).is_err());
    }

    #[test]
    fn tent_support() {
        let g = Grid::new(2, 64, 8.0).unwrap();
        let cube = AxisBox::centered(&g, 1.0);
        let delta = 0.5;
        let f = generate(&g, &GeneratorSpec::Tent { cube: cube.clone(), delta }).unwrap();
        for flat in 0..g.total_points() {
            let x = g.position(flat);
            let v = f.values()[flat].re;
            let inside = x[..2].iter().all(|&c| (c - 4.0).abs() <= 1.0);
            let outside = x[..2].iter().any(|&c| (c - 4.0).abs() >= 1.0 + delta);
            if inside {
                assert_eq!(v, 1.0);
            }
            if outside {
                assert_eq!(v, 0.0);
            }
            assert!((0.0..=1.0).contains(&v));
        }
        let too_big = AxisBox::centered(&g, 3.5);
        assert!(generate(&g, &GeneratorSpec::Tent { cube: too_big, delta: 0.5 }).is_err());
    }

    #[test]
    fn delta_and_mode() {
        let g = grid1();
        let d = generate(&g, &GeneratorSpec::DiscreteDelta).unwrap();
        assert!((d.integral().re - 1.0).abs() < 1e-15);
        let m = generate(&g, &GeneratorSpec::Mode { k: vec![3] }).unwrap();
        assert!(m.values().iter().all(|v| (v.norm() - 1.0).abs() < 1e-15));
        assert!(generate(&g, &GeneratorSpec::Mode { k: vec![1, 2] }).is_err());
    }

    #[test]
    fn random_generators_are_seeded() {
        let g = grid1();
        for spec in [
            GeneratorSpec::RandomGaussian { seed: 9 },
            GeneratorSpec::RandomTents { seed: 9, count: 4 },
            GeneratorSpec::RandomBumps { seed: 9, count: 4 },
        ] {
            assert_eq!(generate(&g, &spec).unwrap(), generate(&g, &spec).unwrap());
        }
        let a = generate(&g, &GeneratorSpec::RandomBumps { seed: 1, count: 3 }).unwrap();
        let b = generate(&g, &GeneratorSpec::RandomBumps { seed: 2, count: 3 }).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn spec_json_shape() {
        let s = serde_json::to_string(&GeneratorSpec::Gaussian { eps: 2.0 }).unwrap();
        assert_eq!(s, r#"{"kind":"gaussian","eps":2.0}"#);
    }
}
