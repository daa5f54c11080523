//! Fourier multipliers and the named operators built on them.
//!
//! Every spectral operator is `T f = (m · f̂)^∨` for a [`Symbol`] `m`
//! evaluated on the frequency lattice. Wave and heat symbols carry the `2π`
//! factors required by the `e^{−2πiξ·x}` convention, in which `Δ`
//! corresponds to `−4π²|ξ|²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fourier::{forward, inverse};
use crate::grid::{generate, GeneratorSpec, Grid, SampledField, Side};
use crate::io;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymbolRepr", into = "SymbolRepr")]
pub enum Symbol {
    /// `−i·sgn(ξ)`, `sgn(0) = 0`; one-dimensional grids only.
    Hilbert,
    /// `−i·ξ_axis/|ξ|`, zero at the origin. `axis` is 0-based.
    Riesz { axis: usize },
    /// `e^{−4π²ε|ξ|²}`.
    GaussWeierstrass { eps: f64 },
    /// `(1 − |ξ|²/R²)^δ` inside `|ξ| ≤ R`, else 0.
    BochnerRiesz { radius: f64, delta: f64 },
    /// `cos(2πt|ξ|)`.
    WaveCos { t: f64 },
    /// `sin(2πt|ξ|)/(2π|ξ|)`, equal to `t` at the origin.
    WaveSinc { t: f64 },
    /// `⟨ξ⟩^s = (1 + |ξ|²)^{s/2}`.
    BesselWeight { s: f64 },
    /// `WaveSinc(t)·⟨ξ⟩^{1−z}` for complex `z`.
    WaveFamily { z: Complex64, t: f64 },
    /// `2πi·ξ_axis`, the symbol of `∂/∂x_axis`.
    Derivative { axis: usize },
    /// `−4π²|ξ|²`, the symbol of `Δ`.
    Laplacian,
    /// Arbitrary values on the frequency lattice of one grid.
    Tabulated(SampledField),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SymbolRepr {
    Hilbert,
    Riesz { axis: usize },
    GaussWeierstrass { eps: f64 },
    BochnerRiesz { radius: f64, delta: f64 },
    WaveCos { t: f64 },
    WaveSinc { t: f64 },
    BesselWeight { s: f64 },
    WaveFamily { z_re: f64, z_im: f64, t: f64 },
    Derivative { axis: usize },
    Laplacian,
    /// FIELD-CSV v1 text of a frequency-side field.
    Tabulated { field: String },
}

impl From<Symbol> for SymbolRepr {
    fn from(s: Symbol) -> Self {
        match s {
            Symbol::Hilbert => SymbolRepr::Hilbert,
            Symbol::Riesz { axis } => SymbolRepr::Riesz { axis },
            Symbol::GaussWeierstrass { eps } => SymbolRepr::GaussWeierstrass { eps },
            Symbol::BochnerRiesz { radius, delta } => SymbolRepr::BochnerRiesz { radius, delta },
            Symbol::WaveCos { t } => SymbolRepr::WaveCos { t },
            Symbol::WaveSinc { t } => SymbolRepr::WaveSinc { t },
            Symbol::BesselWeight { s } => SymbolRepr::BesselWeight { s },
            Symbol::WaveFamily { z, t } => SymbolRepr::WaveFamily { z_re: z.re, z_im: z.im, t },
            Symbol::Derivative { axis } => SymbolRepr::Derivative { axis },
            Symbol::Laplacian => SymbolRepr::Laplacian,
            Symbol::Tabulated(f) => SymbolRepr::Tabulated { field: io::field_to_string(&f) },
        }
    }
}

impl TryFrom<SymbolRepr> for Symbol {
    type Error = Error;

    fn try_from(r: SymbolRepr) -> Result<Self> {
        Ok(match r {
            SymbolRepr::Hilbert => Symbol::Hilbert,
            SymbolRepr::Riesz { axis } => Symbol::Riesz { axis },
            SymbolRepr::GaussWeierstrass { eps } => Symbol::GaussWeierstrass { eps },
            SymbolRepr::BochnerRiesz { radius, delta } => Symbol::BochnerRiesz { radius, delta },
            SymbolRepr::WaveCos { t } => Symbol::WaveCos { t },
            SymbolRepr::WaveSinc { t } => Symbol::WaveSinc { t },
            SymbolRepr::BesselWeight { s } => Symbol::BesselWeight { s },
            SymbolRepr::WaveFamily { z_re, z_im, t } => Symbol::WaveFamily { z: Complex64::new(z_re, z_im), t },
            SymbolRepr::Derivative { axis } => Symbol::Derivative { axis },
            SymbolRepr::Laplacian => Symbol::Laplacian,
            SymbolRepr::Tabulated { field } => {
                let f = io::field_from_str(&field)?;
                f.require_side(Side::Frequency)?;
                Symbol::Tabulated(f)
            }
        })
    }
}

/// `sin(2πt r)/(2πr)` with the removable singularity filled in.
fn sinc_propagator(t: f64, r: f64) -> f64 {
    if r == 0.0 {
        t
    } else {
        (2.0 * PI * t * r).sin() / (2.0 * PI * r)
    }
}

impl Symbol {
    fn validate(&self, grid: &Grid) -> Result<()> {
        let d = grid.dim();
        match self {
            Symbol::Hilbert if d != 1 => {
                Err(Error::Dimension(format!("the Hilbert symbol needs d = 1, grid has d = {d}")))
            }
            Symbol::Riesz { axis } | Symbol::Derivative { axis } if *axis >= d => Err(Error::Dimension(
                format!("axis {axis} out of range for dimension {d}"),
            )),
            Symbol::BochnerRiesz { radius, delta } if !(*radius > 0.0) || !(*delta >= 0.0) => Err(invalid(
                format!("Bochner–Riesz needs R > 0 and δ ≥ 0, got R = {radius}, δ = {delta}"),
            )),
            Symbol::GaussWeierstrass { eps } if !(*eps >= 0.0) => {
                Err(invalid(format!("Gauss–Weierstrass needs ε ≥ 0, got {eps}")))
            }
            Symbol::Tabulated(f) if f.grid() != grid || f.side() != Side::Frequency => {
                Err(Error::GridMismatch)
            }
            _ => Ok(()),
        }
    }

    /// Value at the lattice frequency with flat index `flat`.
    pub fn value_at(&self, grid: &Grid, flat: usize) -> Complex64 {
        let d = grid.dim();
        let xi = grid.frequency(flat);
        let xi = &xi[..d];
        let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        let real = |v: f64| Complex64::new(v, 0.0);
        match self {
            Symbol::Hilbert => Complex64::new(0.0, -sgn(xi[0])),
            Symbol::Riesz { axis } => {
                if r == 0.0 {
                    real(0.0)
                } else {
                    Complex64::new(0.0, -xi[*axis] / r)
                }
            }
            Symbol::GaussWeierstrass { eps } => real((-4.0 * PI * PI * eps * r * r).exp()),
            Symbol::BochnerRiesz { radius, delta } => {
                if r <= *radius {
                    real((1.0 - (r * r) / (radius * radius)).powf(*delta))
                } else {
                    real(0.0)
                }
            }
            Symbol::WaveCos { t } => real((2.0 * PI * t * r).cos()),
            Symbol::WaveSinc { t } => real(sinc_propagator(*t, r)),
            Symbol::BesselWeight { s } => real((1.0 + r * r).powf(s / 2.0)),
            Symbol::WaveFamily { z, t } => {
                let log_bracket = 0.5 * (1.0 + r * r).ln();
                let weight = ((Complex64::new(1.0, 0.0) - z) * log_bracket).exp();
                weight * sinc_propagator(*t, r)
            }
            Symbol::Derivative { axis } => Complex64::new(0.0, 2.0 * PI * xi[*axis]),
            Symbol::Laplacian => real(-4.0 * PI * PI * r * r),
            Symbol::Tabulated(f) => f.values()[flat],
        }
    }

    /// The symbol tabulated on the frequency lattice of `grid`.
    pub fn on_grid(&self, grid: &Grid) -> Result<SampledField> {
        self.validate(grid)?;
        if let Symbol::Tabulated(f) = self {
            return Ok(f.clone());
        }
        Ok(SampledField::from_fn(*grid, Side::Frequency, |k| self.value_at(grid, k)))
    }

    /// `max_ξ |m(ξ)|` over the lattice.
    pub fn sup_norm(&self, grid: &Grid) -> Result<f64> {
        Ok(self.on_grid(grid)?.max_abs())
    }
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `(m · f̂)^∨`.
pub fn apply_multiplier(field: &SampledField, symbol: &Symbol) -> Result<SampledField> {
    field.require_side(Side::Physical)?;
    let m = symbol.on_grid(field.grid())?;
    apply_tabulated(field, &m)
}

/// Multiplier with precomputed lattice values.
pub fn apply_tabulated(field: &SampledField, symbol_values: &SampledField) -> Result<SampledField> {
    let spec = forward(field)?;
    inverse(&spec.mul(symbol_values)?)
}

/// Periodic convolution `(f*g)(x) = ∫ f(x−y) g(y) dy` via the convolution
/// theorem.
pub fn convolve(f: &SampledField, g: &SampledField) -> Result<SampledField> {
    f.require_side(Side::Physical)?;
    f.require_compatible(g)?;
    inverse(&forward(f)?.mul(&forward(g)?)?)
}

pub fn hilbert(field: &SampledField) -> Result<SampledField> {
    if field.grid().dim() != 1 {
        return Err(Error::Dimension(format!(
            "Hilbert transform needs d = 1, grid has d = {}",
            field.grid().dim()
        )));
    }
    apply_multiplier(field, &Symbol::Hilbert)
}

/// Principal-value quadrature of `(1/π) ∫_{|y|≤L/2} f(x−y)/y dy`.
///
/// Folding the two half-lines gives the integrand
/// `g(y) = (f(x−y) − f(x+y))/y`, which is smooth with `g(0) = −2f'(x)`.
/// The singular panel `[0, ε]` is integrated by a two-point trapezoid through
/// `g(0)`, where `f'` is the spectral derivative; the rest of `[ε, L/2]` uses
/// the trapezoidal rule on the lattice. `cutoff` must be a positive multiple
/// of the spacing `h`; `ε = h` gives the plain trapezoidal rule.
pub fn pv_hilbert_direct(field: &SampledField, cutoff: f64) -> Result<SampledField> {
    field.require_side(Side::Physical)?;
    let g = *field.grid();
    if g.dim() != 1 {
        return Err(Error::Dimension(format!("pv quadrature needs d = 1, grid has d = {}", g.dim())));
    }
    let h = g.spacing();
    let n = g.points_per_axis();
    let m = (cutoff / h).round();
    if !(cutoff >= h * (1.0 - 1e-12)) || (cutoff / h - m).abs() > 1e-9 || m as usize > n / 2 {
        return Err(invalid(format!(
            "pv cutoff {cutoff} must be a multiple of the spacing {h} between h and L/2"
        )));
    }
    let m = m as usize;
    let half = n / 2;
    let slope = apply_multiplier(field, &Symbol::Derivative { axis: 0 })?;
    let v = field.values();
    let folded = |i: usize, j: usize| (v[(i + n - j) % n] - v[(i + j) % n]) / (j as f64 * h);
    Ok(SampledField::from_fn(g, Side::Physical, |i| {
        let eps = m as f64 * h;
        let edge = folded(i, m);
        let mut acc = (slope.values()[i] * -2.0 + edge) * (eps / 2.0);
        if m < half {
            acc += edge * (h / 2.0);
            for j in m + 1..half {
                acc += folded(i, j) * h;
            }
            acc += folded(i, half) * (h / 2.0);
        }
        acc / PI
    }))
}

/// Riesz transform along the 0-based `axis`.
pub fn riesz(field: &SampledField, axis: usize) -> Result<SampledField> {
    apply_multiplier(field, &Symbol::Riesz { axis })
}

/// The mollifier `ρ_index` moved so that its centre sits at the origin cell.
pub fn mollifier_kernel(grid: &Grid, index: u32) -> Result<SampledField> {
    let h = grid.spacing();
    if index == 0 || 2.0 / (index as f64) < 8.0 * h {
        return Err(invalid(format!(
            "mollifier {index} has support {} but needs at least 8 cells of width {h}",
            2.0 / index.max(1) as f64
        )));
    }
    let rho = generate(grid, &GeneratorSpec::Mollifier { index })?;
    let half = (grid.points_per_axis() / 2) as i64;
    Ok(rho.roll(&vec![-half; grid.dim()]))
}

/// `f * ρ_index`.
pub fn mollify(field: &SampledField, index: u32) -> Result<SampledField> {
    convolve(field, &mollifier_kernel(field.grid(), index)?)
}

/// `(‖f*ρ_n − f‖_p)` for each requested mollifier index.
pub fn approximation_errors(field: &SampledField, indices: &[u32], p: f64) -> Result<Vec<(u32, f64)>> {
    indices
        .iter()
        .map(|&n| Ok((n, mollify(field, n)?.sub(field)?.lp_norm(p)?)))
        .collect()
}

/// Gauss–Weierstrass kernel `W(x, ε) = (4πε)^{−d/2} e^{−|x|²/4ε}` sampled at
/// the minimal periodic distance from the origin.
pub fn gauss_weierstrass_kernel(grid: &Grid, eps: f64) -> Result<SampledField> {
    if !(eps > 0.0) {
        return Err(invalid(format!("Gauss–Weierstrass needs ε > 0, got {eps}")));
    }
    let l = grid.side_length();
    let d = grid.dim();
    let norm = (4.0 * PI * eps).powf(-(d as f64) / 2.0);
    Ok(SampledField::from_fn(*grid, Side::Physical, |flat| {
        let x = grid.position(flat);
        let r2: f64 = x[..d]
            .iter()
            .map(|&v| {
                let w = if v >= l / 2.0 { v - l } else { v };
                w * w
            })
            .sum();
        Complex64::new(norm * (-r2 / (4.0 * eps)).exp(), 0.0)
    }))
}

pub fn gauss_weierstrass(field: &SampledField, eps: f64) -> Result<SampledField> {
    apply_multiplier(field, &Symbol::GaussWeierstrass { eps })
}

/// `S_R^δ f`.
pub fn bochner_riesz_mean(field: &SampledField, radius: f64, delta: f64) -> Result<SampledField> {
    apply_multiplier(field, &Symbol::BochnerRiesz { radius, delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::AxisBox;
    use proptest::prelude::*;

    fn grid1(n: usize, l: f64) -> Grid {
        Grid::new(1, n, l).unwrap()
    }

    fn max_diff(a: &SampledField, b: &SampledField) -> f64 {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    /// Periodic convolution by direct summation with weight `h^d`.
    fn convolve_direct(f: &SampledField, g: &SampledField) -> SampledField {
        let grid = *f.grid();
        let n = grid.points_per_axis();
        let d = grid.dim();
        SampledField::from_fn(grid, Side::Physical, |i| {
            let xi = grid.unravel(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..grid.total_points() {
                let yj = grid.unravel(j);
                let mut diff = [0usize; 3];
                for a in 0..d {
                    diff[a] = (xi[a] + n - yj[a]) % n;
                }
                acc += f.values()[grid.ravel(&diff)] * g.values()[j];
            }
            acc * grid.cell_volume()
        })
    }

    fn mexican_hat(g: &Grid, scale: f64) -> SampledField {
        let c = g.side_length() / 2.0;
        SampledField::from_fn(*g, Side::Physical, |j| {
            let u = (g.position(j)[0] - c) / scale;
            Complex64::new((1.0 - 2.0 * PI * u * u) * (-PI * u * u).exp(), 0.0)
        })
    }

    #[test]
    fn identity_and_eigen_modes() {
        let g = grid1(128, 8.0);
        let f = generate(&g, &GeneratorSpec::RandomGaussian { seed: 2 }).unwrap();
        let one = Symbol::BesselWeight { s: 0.0 };
        assert!(max_diff(&apply_multiplier(&f, &one).unwrap(), &f) < 1e-12 * f.max_abs());
        let mode = generate(&g, &GeneratorSpec::Mode { k: vec![5] }).unwrap();
        for sym in [
            Symbol::Hilbert,
            Symbol::GaussWeierstrass { eps: 0.01 },
            Symbol::BochnerRiesz { radius: 2.0, delta: 1.5 },
            Symbol::WaveSinc { t: 0.7 },
            Symbol::WaveFamily { z: Complex64::new(0.3, 1.2), t: 0.7 },
        ] {
            let m = sym.value_at(&g, g.frequency_index(&[5]));
            let out = apply_multiplier(&mode, &sym).unwrap();
            assert!(max_diff(&out, &mode.scale(m)) < 1e-12, "{sym:?}");
        }
    }

    #[test]
    fn bochner_riesz_mode_scaling() {
        let g = grid1(64, 4.0);
        let mode = generate(&g, &GeneratorSpec::Mode { k: vec![3] }).unwrap();
        let (r, delta) = (1.5, 2.5);
        let xi: f64 = 3.0 / 4.0;
        let expect = (1.0 - xi * xi / (r * r)).powf(delta);
        let out = bochner_riesz_mean(&mode, r, delta).unwrap();
        assert!(max_diff(&out, &mode.scale(expect.into())) < 1e-13);
        let f = generate(&g, &GeneratorSpec::RandomGaussian { seed: 1 }).unwrap();
        let id = bochner_riesz_mean(&f, 100.0, 0.0).unwrap();
        assert!(max_diff(&id, &f) < 1e-12 * f.max_abs());
        assert!(bochner_riesz_mean(&f, 0.0, 1.0).is_err());
        assert!(bochner_riesz_mean(&f, 1.0, -0.5).is_err());
    }

    #[test]
    fn bochner_riesz_converges_on_gaussians() {
        let g = grid1(256, 16.0);
        let f = generate(&g, &GeneratorSpec::Gaussian { eps: 1.0 }).unwrap();
        let errs: Vec<f64> = [1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&r| bochner_riesz_mean(&f, r, 1.0).unwrap().sub(&f).unwrap().lp_norm(2.0).unwrap())
            .collect();
        // 1 − (1 − ξ²/R²) = ξ²/R², so the error falls like R^{−2}
        for w in errs.windows(2) {
            assert!((3.5..=4.5).contains(&(w[0] / w[1])), "{errs:?}");
        }
    }

    #[test]
    fn heat_smoothing_of_a_gaussian() {
        // e^{−πx²} under e^{−4π²εξ²}: spectrum e^{−π(1+4πε)ξ²}, i.e.
        // (1+4πε)^{−1/2} e^{−πx²/(1+4πε)}.
        let g = grid1(512, 32.0);
        let f = generate(&g, &GeneratorSpec::Gaussian { eps: 1.0 }).unwrap();
        let eps = 0.05;
        let out = gauss_weierstrass(&f, eps).unwrap();
        let a = 1.0 + 4.0 * PI * eps;
        let exact = SampledField::from_fn(g, Side::Physical, |j| {
            let x = g.position(j)[0] - 16.0;
            Complex64::new(a.powf(-0.5) * (-PI * x * x / a).exp(), 0.0)
        });
        assert!(max_diff(&out, &exact) < 1e-10);
        // kernel route: unit mass and the same smoothing
        let w = gauss_weierstrass_kernel(&g, eps).unwrap();
        assert!((w.integral().re - 1.0).abs() < 1e-10);
        assert!(max_diff(&convolve(&f, &w).unwrap(), &exact) < 1e-10);
    }

    #[test]
    fn convolution_matches_direct_sum() {
        for (d, n) in [(1, 32), (2, 8)] {
            let g = Grid::new(d, n, 3.0).unwrap();
            let f = generate(&g, &GeneratorSpec::RandomGaussian { seed: 11 }).unwrap();
            let h = generate(&g, &GeneratorSpec::RandomGaussian { seed: 12 }).unwrap();
            assert!(max_diff(&convolve(&f, &h).unwrap(), &convolve_direct(&f, &h)) < 1e-10);
        }
        let g = grid1(64, 4.0);
        let f = generate(&g, &GeneratorSpec::RandomGaussian { seed: 1 }).unwrap();
        let delta = generate(&g, &GeneratorSpec::DiscreteDelta).unwrap();
        assert!(max_diff(&convolve(&f, &delta).unwrap(), &f) < 1e-12 * f.max_abs());
        let other = SampledField::zeros(grid1(32, 4.0), Side::Physical);
        assert!(matches!(convolve(&f, &other), Err(Error::GridMismatch)));
    }

    #[test]
    fn hilbert_of_cosine_and_square() {
        let g = grid1(256, 16.0);
        let k = 5.0;
        let cos = SampledField::from_fn(g, Side::Physical, |j| {
            Complex64::new((2.0 * PI * k * g.position(j)[0] / 16.0).cos(), 0.0)
        });
        let sin = SampledField::from_fn(g, Side::Physical, |j| {
            Complex64::new((2.0 * PI * k * g.position(j)[0] / 16.0).sin(), 0.0)
        });
        assert!(max_diff(&hilbert(&cos).unwrap(), &sin) < 1e-10);

        let f = generate(&g, &GeneratorSpec::RandomGaussian { seed: 4 }).unwrap();
        let f = f.sub(&SampledField::constant(g, f.mean())).unwrap();
        let hh = hilbert(&hilbert(&f).unwrap()).unwrap();
        assert!(max_diff(&hh, &f.scale((-1.0).into())) < 1e-10 * f.max_abs().max(1.0));

        let g2 = Grid::new(2, 8, 1.0).unwrap();
        assert!(matches!(
            hilbert(&SampledField::zeros(g2, Side::Physical)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn hilbert_square_identity() {
        let g = grid1(256, 16.0);
        for seed in 0..5 {
            let psi = generate(&g, &GeneratorSpec::RandomBumps { seed, count: 4 }).unwrap();
            let psi = psi.sub(&SampledField::constant(g, psi.mean())).unwrap();
            let h = hilbert(&psi).unwrap();
            let lhs = h.mul(&h).unwrap();
            let rhs = psi
                .mul(&psi)
                .unwrap()
                .add(&hilbert(&psi.mul(&h).unwrap()).unwrap().scale(2.0.into()))
                .unwrap();
            let resid = max_diff(&lhs, &rhs);
            assert!(resid <= 1e-8 * psi.max_abs().powi(2), "seed {seed}: {resid}");
        }
    }

    #[test]
    fn pv_quadrature_agrees_with_spectral_hilbert() {
        let g = grid1(1024, 16.0);
        for kappa in [12.0, 20.0, 25.0] {
            let f = generate(&g, &GeneratorSpec::WavePacket { eps: 1.0, frequency: vec![kappa] }).unwrap();
            let spectral = hilbert(&f).unwrap();
            let direct = pv_hilbert_direct(&f, g.spacing()).unwrap();
            let rel = direct.sub(&spectral).unwrap().lp_norm(2.0).unwrap() / f.lp_norm(2.0).unwrap();
            assert!(rel <= 1e-3, "κ = {kappa}: {rel}");
        }
        // the truncation at L/2 costs about 2/(π² k) at mode number k
        let hat = mexican_hat(&g, 1.0);
        let rel = pv_hilbert_direct(&hat, g.spacing())
            .unwrap()
            .sub(&hilbert(&hat).unwrap())
            .unwrap()
            .lp_norm(2.0)
            .unwrap()
            / hat.lp_norm(2.0).unwrap();
        assert!(rel > 1e-3 && rel < 0.05, "{rel}");
    }

    #[test]
    fn pv_symbol_matches_trapezoid_sum() {
        // on a single mode the rule reduces to (2/π)(θ/2 + Σ sin(θj)/j) with
        // a half weight at j = n/2
        let g = grid1(64, 4.0);
        for k in [1i64, 5, 17, 31] {
            let mode = generate(&g, &GeneratorSpec::Mode { k: vec![k] }).unwrap();
            let out = pv_hilbert_direct(&mode, g.spacing()).unwrap();
            let theta = 2.0 * PI * k as f64 / 64.0;
            let mut s = theta / 2.0;
            for j in 1..32 {
                s += (theta * j as f64).sin() / j as f64;
            }
            s += 0.5 * (theta * 32.0).sin() / 32.0;
            let symbol = Complex64::new(0.0, -2.0 / PI * s);
            assert!(max_diff(&out, &mode.scale(symbol)) < 1e-12);
        }
    }

    #[test]
    fn pv_symmetry_cases() {
        let g = grid1(256, 16.0);
        let even = generate(&g, &GeneratorSpec::Gaussian { eps: 1.0 }).unwrap();
        let pv = pv_hilbert_direct(&even, g.spacing()).unwrap();
        assert!(pv.values()[128].norm() <= 1e-10);
        let c = SampledField::constant(g, Complex64::new(3.0, 0.0));
        assert!(pv_hilbert_direct(&c, g.spacing()).unwrap().max_abs() <= 1e-10);
        assert!(pv_hilbert_direct(&c, g.spacing() / 2.0).is_err());
        assert!(pv_hilbert_direct(&c, 4.0 * g.spacing()).is_ok());
        assert!(pv_hilbert_direct(&c, 1.5 * g.spacing()).is_err());
    }

    #[test]
    fn riesz_transforms() {
        let g1 = grid1(64, 4.0);
        let f = generate(&g1, &GeneratorSpec::RandomGaussian { seed: 3 }).unwrap();
        assert_eq!(riesz(&f, 0).unwrap(), hilbert(&f).unwrap());
        assert!(riesz(&f, 1).is_err());

        let g = Grid::new(2, 32, 4.0).unwrap();
        let f = generate(&g, &GeneratorSpec::RandomGaussian { seed: 3 }).unwrap();
        let mut sum = SampledField::zeros(g, Side::Physical);
        for axis in 0..2 {
            sum = sum.add(&riesz(&riesz(&f, axis).unwrap(), axis).unwrap()).unwrap();
        }
        let expect = f.scale((-1.0).into()).add(&SampledField::constant(g, f.mean())).unwrap();
        assert!(max_diff(&sum, &expect) < 1e-10);
        for axis in 0..2 {
            assert!(riesz(&f, axis).unwrap().lp_norm(2.0).unwrap() <= f.lp_norm(2.0).unwrap() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn mollification() {
        let g = grid1(2048, 16.0);
        let c = SampledField::constant(g, Complex64::new(2.0, 0.0));
        assert!(max_diff(&mollify(&c, 8).unwrap(), &c) < 1e-10);
        assert!(mollify(&c, 200).is_err());

        let gauss = generate(&g, &GeneratorSpec::Gaussian { eps: 1.0 }).unwrap();
        let errs = approximation_errors(&gauss, &[4, 8, 16], 2.0).unwrap();
        assert!(errs.windows(2).all(|w| w[1].1 < w[0].1), "{errs:?}");

        // Lipschitz tent: O(1/n) in sup norm
        let tent = generate(&g, &GeneratorSpec::Tent { cube: AxisBox::centered(&g, 2.0), delta: 0.5 }).unwrap();
        let errs = approximation_errors(&tent, &[4, 8, 16, 32], f64::INFINITY).unwrap();
        for w in errs.windows(2) {
            let ratio = w[0].1 / w[1].1;
            assert!((1.5..=2.5).contains(&ratio), "{errs:?}");
        }
    }

    #[test]
    fn symbol_json() {
        let s = serde_json::to_string(&Symbol::Riesz { axis: 1 }).unwrap();
        assert_eq!(s, r#"{"kind":"riesz","axis":1}"#);
        let w = Symbol::WaveFamily { z: Complex64::new(0.5, -1.0), t: 2.0 };
        let back: Symbol = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
        assert_eq!(back, w);
        let g = grid1(8, 1.0);
        let tab = Symbol::Tabulated(Symbol::GaussWeierstrass { eps: 0.1 }.on_grid(&g).unwrap());
        let json = serde_json::to_string(&tab).unwrap();
        assert!(json.contains("harmlab-field v1"));
        let back: Symbol = serde_json::from_str(&json).unwrap();
        assert_eq!(back, tab);
    }

    proptest! {
        #[test]
        fn multipliers_compose_and_preserve_even_real(seed in 0u64..5000, eps in 0.0f64..0.05, t in -3.0f64..3.0) {
            let g = grid1(128, 8.0);
            let f = generate(&g, &GeneratorSpec::RandomGaussian { seed }).unwrap();
            let m1 = Symbol::GaussWeierstrass { eps };
            let m2 = Symbol::WaveCos { t };
            let seq = apply_multiplier(&apply_multiplier(&f, &m2).unwrap(), &m1).unwrap();
            let prod = m1.on_grid(&g).unwrap().mul(&m2.on_grid(&g).unwrap()).unwrap();
            let once = apply_multiplier(&f, &Symbol::Tabulated(prod)).unwrap();
            prop_assert!(max_diff(&seq, &once) <= 1e-12 * f.max_abs());

            // even real field: f(x) + f(−x)
            let even = f.add(&f.reflect()).unwrap();
            for sym in [m1, m2, Symbol::BesselWeight { s: 1.5 }] {
                let out = apply_multiplier(&even, &sym).unwrap();
                prop_assert!(out.max_imag() <= 1e-12 * even.max_abs());
                prop_assert!(max_diff(&out, &out.reflect()) <= 1e-12 * even.max_abs());
            }
        }

        #[test]
        fn convolution_norm_bounds(seed in 0u64..5000) {
            let g = grid1(128, 8.0);
            let f = generate(&g, &GeneratorSpec::RandomGaussian { seed }).unwrap();
            let k = generate(&g, &GeneratorSpec::RandomTents { seed: seed + 1, count: 3 }).unwrap();
            let conv = convolve(&f, &k).unwrap();
            let k1 = k.lp_norm(1.0).unwrap();
            for p in [1.0, 2.0, f64::INFINITY] {
                prop_assert!(conv.lp_norm(p).unwrap() <= f.lp_norm(p).unwrap() * k1 * (1.0 + 1e-9));
            }
            // Young with (4/3, 4/3, 2)
            let p = 4.0 / 3.0;
            prop_assert!(conv.lp_norm(2.0).unwrap() <= f.lp_norm(p).unwrap() * k.lp_norm(p).unwrap() * (1.0 + 1e-9));
            // L² → L² bounded by sup |ĝ|
            let sup = forward(&k).unwrap().max_abs();
            prop_assert!(conv.lp_norm(2.0).unwrap() <= f.lp_norm(2.0).unwrap() * sup * (1.0 + 1e-9));
        }
    }

    #[test]
    fn support_of_convolution() {
        let g = grid1(256, 16.0);
        let a = generate(&g, &GeneratorSpec::Indicator { cube: AxisBox::new(vec![6.0], vec![7.0]) }).unwrap();
        let b = generate(&g, &GeneratorSpec::Indicator { cube: AxisBox::new(vec![1.0], vec![1.5]) }).unwrap();
        let conv = convolve(&a, &b).unwrap();
        let h = g.spacing();
        let scale = conv.max_abs();
        for (j, v) in conv.values().iter().enumerate() {
            let x = g.position(j)[0];
            // supp a + supp b = [7, 8.5], dilated by one cell
            if x < 7.0 - h || x > 8.5 + h {
                assert!(v.norm() <= 1e-12 * scale, "x = {x}: {v}");
            }
        }
    }
}
