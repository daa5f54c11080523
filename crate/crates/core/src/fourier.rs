//! Discrete Fourier transform in the `e^{−2πiξ·x}` convention.
//!
//! `forward` computes `F̂[k] = h^d Σ_j f(x_j) e^{−2πi ξ_k·x_j}` and `inverse`
//! computes `f(x_j) = L^{−d} Σ_k F̂[k] e^{2πi ξ_k·x_j}`. With these weights the
//! discrete Plancherel identity `‖f‖₂ = ‖F̂‖₂` is exact when the frequency
//! side is integrated with cell volume `L^{−d}`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{invalid, Error, Result};
use crate::grid::{Grid, SampledField, Side};
use crate::interp::conjugate;

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let fwd = direction == FftDirection::Forward;
    PLANS.with(|cell| {
        let mut cell = cell.borrow_mut();
        let (planner, cache) = &mut *cell;
        cache
            .entry((n, fwd))
            .or_insert_with(|| planner.plan_fft(n, direction))
            .clone()
    })
}

/// Unnormalised in-place DFT along every axis of a row-major `n^d` block.
fn fft_nd(data: &mut [Complex64], grid: &Grid, direction: FftDirection) {
    let n = grid.points_per_axis();
    let d = grid.dim();
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    // last axis is contiguous: rustfft handles the batch directly
    fft.process_with_scratch(data, &mut scratch);
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..d.saturating_sub(1) {
        let stride = n.pow((d - 1 - axis) as u32);
        let block = stride * n;
        for base in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[start + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    data[start + i * stride] = *v;
                }
            }
        }
    }
}

fn half_shift(grid: &Grid) -> Vec<i64> {
    vec![(grid.points_per_axis() / 2) as i64; grid.dim()]
}

/// Scaled spectrum in natural DFT order (index `m ≡ k mod n`).
fn forward_natural(field: &SampledField) -> Vec<Complex64> {
    let grid = *field.grid();
    let mut data = field.values().to_vec();
    fft_nd(&mut data, &grid, FftDirection::Forward);
    let w = grid.cell_volume();
    data.iter_mut().for_each(|v| *v *= w);
    data
}

pub fn forward(field: &SampledField) -> Result<SampledField> {
    field.require_side(Side::Physical)?;
    let grid = *field.grid();
    let natural = SampledField::new(grid, Side::Frequency, forward_natural(field))?;
    Ok(natural.roll(&half_shift(&grid)))
}

pub fn inverse(field: &SampledField) -> Result<SampledField> {
    field.require_side(Side::Frequency)?;
    let grid = *field.grid();
    let mut data = field.roll(&half_shift(&grid)).into_values();
    fft_nd(&mut data, &grid, FftDirection::Inverse);
    let w = grid.frequency_cell_volume();
    data.iter_mut().for_each(|v| *v *= w);
    SampledField::new(grid, Side::Physical, data)
}

/// `|‖f‖₂ − ‖f̂‖₂| / ‖f‖₂`.
pub fn plancherel_defect(field: &SampledField) -> Result<f64> {
    field.require_side(Side::Physical)?;
    if field.is_zero() {
        return Err(Error::ZeroField);
    }
    let a = field.lp_norm(2.0)?;
    let b = forward(field)?.lp_norm(2.0)?;
    Ok((a - b).abs() / a)
}

/// Defect of `∫ f̂·g = ∫ f·ĝ`, relative to the Cauchy–Schwarz bound
/// `max(‖f̂‖₂‖g‖₂, ‖f‖₂‖ĝ‖₂)` of the two sums.
///
/// Both transforms are paired with the other function index by index in
/// natural DFT order, which is the exact finite-group form of the identity.
/// The transforms carry absolute rounding error, so the defect is measured
/// against this bound rather than against the sums, which may cancel.
pub fn multiplication_formula_defect(f: &SampledField, g: &SampledField) -> Result<f64> {
    f.require_side(Side::Physical)?;
    f.require_compatible(g)?;
    let w = f.grid().cell_volume();
    let fh = forward_natural(f);
    let gh = forward_natural(g);
    let lhs: Complex64 = fh.iter().zip(g.values()).map(|(a, b)| a * b).sum::<Complex64>() * w;
    let rhs: Complex64 = f.values().iter().zip(&gh).map(|(a, b)| a * b).sum::<Complex64>() * w;
    let l2 = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let scale = w * (l2(&fh) * l2(g.values())).max(l2(f.values()) * l2(&gh));
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((lhs - rhs).norm() / scale)
}

/// `max{|F̂(ξ)| : |ξ| > radius}` (0 when no lattice frequency qualifies).
pub fn tail_beyond(spectrum: &SampledField, radius: f64) -> Result<f64> {
    spectrum.require_side(Side::Frequency)?;
    let g = spectrum.grid();
    let d = g.dim();
    Ok(spectrum
        .values()
        .iter()
        .enumerate()
        .filter(|(flat, _)| {
            let xi = g.frequency(*flat);
            xi[..d].iter().map(|v| v * v).sum::<f64>().sqrt() > radius
        })
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max))
}

/// Tail maxima `max_{|ξ|>r} |f̂(ξ)|` over dyadic radii `r = 2^j/L` up to the
/// Nyquist radius. Nonincreasing in `r` by construction.
pub fn riemann_lebesgue_profile(field: &SampledField) -> Result<Vec<(f64, f64)>> {
    let spec = forward(field)?;
    let g = field.grid();
    let nyq = g.nyquist();
    let mut out = Vec::new();
    let mut r = g.side_length().recip();
    while r <= nyq * (1.0 + 1e-12) {
        out.push((r, tail_beyond(&spec, r)?));
        r *= 2.0;
    }
    Ok(out)
}

/// Sharp Hausdorff–Young constant `C_p = (p^{1/p} / p'^{1/p'})^{1/2}` for the
/// real line; the `d`-dimensional constant is `C_p^d`.
pub fn beckner_constant(p: f64) -> Result<f64> {
    if !(1.0..=2.0).contains(&p) {
        return Err(invalid(format!("Hausdorff–Young exponent must lie in [1, 2], got {p}")));
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let q = conjugate(p);
    Ok((p.powf(1.0 / p) / q.powf(1.0 / q)).sqrt())
}

/// `‖f̂‖_{p'} / ‖f‖_p` for `1 ≤ p ≤ 2`.
pub fn hausdorff_young_ratio(field: &SampledField, p: f64) -> Result<f64> {
    field.require_side(Side::Physical)?;
    if !(1.0..=2.0).contains(&p) {
        return Err(invalid(format!("Hausdorff–Young exponent must lie in [1, 2], got {p}")));
    }
    if field.is_zero() {
        return Err(Error::ZeroField);
    }
    let spec = forward(field)?;
    Ok(spec.lp_norm(conjugate(p))? / field.lp_norm(p)?)
}
