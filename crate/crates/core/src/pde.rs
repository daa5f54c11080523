//! Spectral solver for the homogeneous wave equation `∂²_t u = Δu` on the
//! torus, with unit propagation speed.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fourier::{forward, inverse};
use crate::grid::{SampledField, Side};
use crate::operators::{apply_multiplier, Symbol};

const REAL_TOLERANCE: f64 = 1e-12;

/// Initial displacement `f` and velocity `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveData {
    pub f: SampledField,
    pub g: SampledField,
}

impl WaveData {
    pub fn new(f: SampledField, g: SampledField) -> Result<Self> {
        f.require_side(Side::Physical)?;
        f.require_compatible(&g)?;
        for (name, u) in [("displacement", &f), ("velocity", &g)] {
            if u.max_imag() > REAL_TOLERANCE {
                return Err(invalid(format!("{name} is not real (imaginary part {})", u.max_imag())));
            }
        }
        Ok(Self { f, g })
    }

    /// Data with zero initial velocity.
    pub fn at_rest(f: SampledField) -> Result<Self> {
        let g = SampledField::zeros(*f.grid(), Side::Physical);
        Self::new(f, g)
    }
}

/// Frequency-side propagation: `cos(2πt|ξ|)·f̂ + sinc_t(ξ)·ĝ` and its time
/// derivative `−2π|ξ| sin(2πt|ξ|)·f̂ + cos(2πt|ξ|)·ĝ`.
fn propagate(data: &WaveData, t: f64, derivative: bool) -> Result<SampledField> {
    let grid = *data.f.grid();
    let fh = forward(&data.f)?;
    let gh = forward(&data.g)?;
    let cos = Symbol::WaveCos { t }.on_grid(&grid)?;
    let out = if derivative {
        let speed = SampledField::from_fn(grid, Side::Frequency, |k| {
            let xi = grid.frequency(k);
            let r = xi[..grid.dim()].iter().map(|v| v * v).sum::<f64>().sqrt();
            Complex64::new(-2.0 * PI * r * (2.0 * PI * t * r).sin(), 0.0)
        });
        speed.mul(&fh)?.add(&cos.mul(&gh)?)?
    } else {
        let sinc = Symbol::WaveSinc { t }.on_grid(&grid)?;
        cos.mul(&fh)?.add(&sinc.mul(&gh)?)?
    };
    inverse(&out)
}

/// `u(t)` for the data.
pub fn wave_evolve(data: &WaveData, t: f64) -> Result<SampledField> {
    propagate(data, t, false)
}

/// `∂_t u(t)` from the exact propagator derivative.
pub fn wave_velocity(data: &WaveData, t: f64) -> Result<SampledField> {
    propagate(data, t, true)
}

/// `E(t) = ‖∂_t u‖₂² + ‖∇u‖₂²`.
pub fn wave_energy(data: &WaveData, t: f64) -> Result<f64> {
    let u = wave_evolve(data, t)?;
    let ut = wave_velocity(data, t)?;
    let mut e = ut.lp_norm(2.0)?.powi(2);
    for axis in 0..u.grid().dim() {
        e += apply_multiplier(&u, &Symbol::Derivative { axis })?.lp_norm(2.0)?.powi(2);
    }
    Ok(e)
}

/// `‖(u(t+dt) − 2u(t) + u(t−dt))/dt² − Δu(t)‖₂ / ‖u(t)‖₂`, and 0 for zero
/// data.
pub fn dalembertian_residual(data: &WaveData, t: f64, dt: f64) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(invalid(format!("dt = {dt} must be positive")));
    }
    let u = wave_evolve(data, t)?;
    let up = wave_evolve(data, t + dt)?;
    let um = wave_evolve(data, t - dt)?;
    let lap = apply_multiplier(&u, &Symbol::Laplacian)?;
    let second = up
        .sub(&u.scale(2.0.into()))?
        .add(&um)?
        .scale(Complex64::new(1.0 / (dt * dt), 0.0));
    let num = second.sub(&lap)?.lp_norm(2.0)?;
    let den = u.lp_norm(2.0)?;
    if den == 0.0 {
        return if num == 0.0 { Ok(0.0) } else { Err(Error::ZeroField) };
    }
    Ok(num / den)
}

/// Trajectory rows `t,x_index,value` with the real part of `u(t)`.
pub fn trajectory_csv(data: &WaveData, times: &[f64]) -> Result<String> {
    let mut s = String::from("t,x_index,value\n");
    for &t in times {
        let u = wave_evolve(data, t)?;
        for (i, v) in u.values().iter().enumerate() {
            let _ = writeln!(s, "{t},{i},{}", v.re);
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{generate, GeneratorSpec, Grid};

    fn cosine(grid: Grid, k: i64) -> SampledField {
        let l = grid.side_length();
        SampledField::from_fn(grid, Side::Physical, |i| {
            Complex64::new((2.0 * PI * k as f64 * grid.position(i)[0] / l).cos(), 0.0)
        })
    }

    fn band_limited(grid: Grid, seed: u64) -> SampledField {
        let f = generate(&grid, &GeneratorSpec::RandomGaussian { seed }).unwrap();
        let smooth = apply_multiplier(&f, &Symbol::BochnerRiesz { radius: 2.0, delta: 2.0 }).unwrap();
        smooth.map(|v| Complex64::new(v.re, 0.0))
    }

    #[test]
    fn standing_waves() {
        let g = Grid::new(1, 128, 4.0).unwrap();
        let k = 3;
        let w = 2.0 * PI * k as f64 / 4.0;
        let c = cosine(g, k);
        let zero = SampledField::zeros(g, Side::Physical);
        for t in [0.0, 0.3, 1.7, -2.2] {
            let u = wave_evolve(&WaveData::new(c.clone(), zero.clone()).unwrap(), t).unwrap();
            let v = wave_evolve(&WaveData::new(zero.clone(), c.clone()).unwrap(), t).unwrap();
            for i in 0..128 {
                let ci = c.values()[i].re;
                assert!((u.values()[i].re - (w * t).cos() * ci).abs() < 1e-10);
                assert!((v.values()[i].re - (w * t).sin() / w * ci).abs() < 1e-10);
            }
            assert!(u.max_imag() < 1e-11);
        }
        let f = band_limited(g, 1);
        let u0 = wave_evolve(&WaveData::at_rest(f.clone()).unwrap(), 0.0).unwrap();
        assert!(u0.sub(&f).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn energy_is_conserved() {
        let g = Grid::new(2, 32, 4.0).unwrap();
        let data = WaveData::new(band_limited(g, 1), band_limited(g, 2)).unwrap();
        let e0 = wave_energy(&data, 0.0).unwrap();
        for t in [0.5, 1.0, 2.0, 5.0, 10.0] {
            let e = wave_energy(&data, t).unwrap();
            assert!((e - e0).abs() <= 1e-9 * e0);
        }
        let zero = SampledField::zeros(g, Side::Physical);
        assert_eq!(wave_energy(&WaveData::at_rest(zero).unwrap(), 3.0).unwrap(), 0.0);

        let g1 = Grid::new(1, 64, 2.0).unwrap();
        let k = 4;
        let f = cosine(g1, k);
        let w = 2.0 * PI * k as f64 / 2.0;
        let e = wave_energy(&WaveData::at_rest(f.clone()).unwrap(), 0.0).unwrap();
        let expect = w * w * f.lp_norm(2.0).unwrap().powi(2);
        assert!((e - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn residual_orders() {
        let g = Grid::new(1, 128, 8.0).unwrap();
        let data = WaveData::new(band_limited(g, 4), band_limited(g, 5)).unwrap();
        let r1 = dalembertian_residual(&data, 0.7, 1e-2).unwrap();
        let r2 = dalembertian_residual(&data, 0.7, 5e-3).unwrap();
        let ratio = r1 / r2;
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");

        let k = 5;
        let w = 2.0 * PI * k as f64 / 8.0;
        let mode = WaveData::at_rest(cosine(g, k)).unwrap();
        for dt in [1e-1, 1e-2] {
            let r = dalembertian_residual(&mode, 0.3, dt).unwrap();
            let expect = (2.0 * ((w * dt).cos() - 1.0) / (dt * dt) + w * w).abs();
            assert!((r - expect).abs() < 1e-9 * (1.0 + expect), "{r} {expect}");
        }
        let zero = WaveData::at_rest(SampledField::zeros(g, Side::Physical)).unwrap();
        assert_eq!(dalembertian_residual(&zero, 1.0, 0.1).unwrap(), 0.0);
        assert!(dalembertian_residual(&zero, 1.0, 0.0).is_err());
    }

    #[test]
    fn symmetry_composition_and_linearity() {
        let g = Grid::new(1, 64, 4.0).unwrap();
        let f = band_limited(g, 7);
        let h = band_limited(g, 8);
        let rest = WaveData::at_rest(f.clone()).unwrap();
        let a = wave_evolve(&rest, 1.3).unwrap();
        let b = wave_evolve(&rest, -1.3).unwrap();
        assert!(a.sub(&b).unwrap().max_abs() < 1e-12);

        let data = WaveData::new(f.clone(), h.clone()).unwrap();
        let (t, s) = (0.8, 1.9);
        let mid = WaveData::new(
            wave_evolve(&data, t).unwrap().map(|v| Complex64::new(v.re, 0.0)),
            wave_velocity(&data, t).unwrap().map(|v| Complex64::new(v.re, 0.0)),
        )
        .unwrap();
        let lhs = wave_evolve(&mid, s).unwrap();
        let rhs = wave_evolve(&data, t + s).unwrap();
        assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-10);

        let two = WaveData::new(f.scale(2.0.into()), h.scale((-3.0).into())).unwrap();
        let u = wave_evolve(&two, 0.9).unwrap();
        let parts = wave_evolve(&WaveData::at_rest(f).unwrap(), 0.9)
            .unwrap()
            .scale(2.0.into())
            .add(&wave_evolve(&WaveData::new(SampledField::zeros(g, Side::Physical), h).unwrap(), 0.9).unwrap().scale((-3.0).into()))
            .unwrap();
        assert!(u.sub(&parts).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn trajectories_and_validation() {
        let g = Grid::new(1, 16, 1.0).unwrap();
        let data = WaveData::at_rest(cosine(g, 1)).unwrap();
        let csv = trajectory_csv(&data, &[0.0, 0.5]).unwrap();
        assert!(csv.starts_with("t,x_index,value\n0,0,1\n"));
        assert_eq!(csv.lines().count(), 33);
        let complex = SampledField::constant(g, Complex64::new(0.0, 1.0));
        assert!(WaveData::at_rest(complex).is_err());
        let other = SampledField::zeros(Grid::new(1, 32, 1.0).unwrap(), Side::Physical);
        assert!(WaveData::new(cosine(g, 1), other).is_err());
    }
}
