//! Interpolation certificates.
//!
//! Operator norms are only ever estimated from below, by maximising
//! `‖Tf‖_q / ‖f‖_p` over a seeded ensemble of test functions. Upper bounds
//! come from analytic endpoint estimates; a Riesz–Thorin certificate checks
//! that no test function beats the interpolated endpoint bound.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng as _;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::fourier::forward;
use crate::grid::generate::{atom_cells, atom_from_values};
use crate::grid::{generate, AxisBox, GeneratorSpec, Grid, SampledField, Side};
use crate::operators::{apply_tabulated, convolve, Symbol};
use crate::report::{number, CheckReport};
use crate::rng::{derive_seed, seeded};

/// Conjugate exponent `p' = p/(p−1)`, with `1' = ∞` and `∞' = 1`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn recip(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

/// Exponent with `1/p_θ = (1−θ)/p₀ + θ/p₁`, using `1/∞ = 0`.
pub fn interpolate_exponent(p0: f64, p1: f64, theta: f64) -> f64 {
    let inv = (1.0 - theta) * recip(p0) + theta * recip(p1);
    if inv == 0.0 {
        f64::INFINITY
    } else {
        1.0 / inv
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationQuery {
    pub p0: f64,
    pub q0: f64,
    pub p1: f64,
    pub q1: f64,
    pub theta: f64,
}

impl InterpolationQuery {
    pub fn new(p0: f64, q0: f64, p1: f64, q1: f64, theta: f64) -> Result<Self> {
        for e in [p0, q0, p1, q1] {
            if !(e >= 1.0) {
                return Err(invalid(format!("exponent {e} outside [1, ∞]")));
            }
        }
        if !(0.0..=1.0).contains(&theta) {
            return Err(invalid(format!("θ = {theta} outside [0, 1]")));
        }
        Ok(Self { p0, q0, p1, q1, theta })
    }

    pub fn p_theta(&self) -> f64 {
        interpolate_exponent(self.p0, self.p1, self.theta)
    }

    pub fn q_theta(&self) -> f64 {
        interpolate_exponent(self.q0, self.q1, self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    Measured,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Analytic => "analytic",
            Provenance::Measured => "measured",
        })
    }
}

/// Declared norms `M₀` at `(p₀, q₀)` and `M₁` at `(p₁, q₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointBounds {
    pub m0: f64,
    pub m1: f64,
    pub provenance: Provenance,
}

type OpFn = dyn Fn(&SampledField) -> Result<SampledField> + Send + Sync;

/// A named linear operator together with its endpoint bounds, if known.
#[derive(Clone)]
pub struct OperatorHandle {
    pub name: String,
    op: Arc<OpFn>,
    pub bounds: Option<EndpointBounds>,
}

impl fmt::Debug for OperatorHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorHandle")
            .field("name", &self.name)
            .field("bounds", &self.bounds)
            .finish_non_exhaustive()
    }
}

impl OperatorHandle {
    pub fn new(
        name: impl Into<String>,
        op: impl Fn(&SampledField) -> Result<SampledField> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            op: Arc::new(op),
            bounds: None,
        }
    }

    pub fn with_bounds(mut self, m0: f64, m1: f64, provenance: Provenance) -> Self {
        self.bounds = Some(EndpointBounds { m0, m1, provenance });
        self
    }

    pub fn apply(&self, f: &SampledField) -> Result<SampledField> {
        (self.op)(f)
    }

    pub fn identity() -> Self {
        Self::new("identity", |f| Ok(f.clone())).with_bounds(1.0, 1.0, Provenance::Analytic)
    }

    /// `f ↦ f * g` with the analytic endpoints `‖g‖₁` at `(1,1)` and
    /// `‖ĝ‖_∞` at `(2,2)`.
    pub fn convolution(kernel: SampledField) -> Result<Self> {
        let m0 = kernel.lp_norm(1.0)?;
        let m1 = forward(&kernel)?.max_abs();
        Ok(Self::new("convolution", move |f| convolve(f, &kernel)).with_bounds(m0, m1, Provenance::Analytic))
    }

    /// The Fourier transform, of norm 1 at `(1, ∞)` and at `(2, 2)`.
    pub fn fourier() -> Self {
        Self::new("fourier", forward).with_bounds(1.0, 1.0, Provenance::Analytic)
    }

    /// Fourier multiplier with fixed symbol.
    pub fn multiplier(grid: &Grid, symbol: &Symbol) -> Result<Self> {
        let table = symbol.on_grid(grid)?;
        Ok(Self::new("multiplier", move |f| apply_tabulated(f, &table)))
    }

    /// `λT`, with endpoint bounds scaled by `|λ|`.
    pub fn scaled(&self, lambda: Complex64) -> Self {
        let inner = self.op.clone();
        let mut out = Self::new(format!("{}*{}", lambda, self.name), move |f| Ok(inner(f)?.scale(lambda)));
        out.bounds = self.bounds.map(|b| EndpointBounds {
            m0: b.m0 * lambda.norm(),
            m1: b.m1 * lambda.norm(),
            provenance: b.provenance,
        });
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MemberKind {
    RandomGaussian,
    RandomTents,
    RandomBumps,
    Gaussian,
    Indicator,
    Tent,
    Atom,
    Mode,
}

impl MemberKind {
    pub fn name(self) -> &'static str {
        match self {
            MemberKind::RandomGaussian => "random_gaussian",
            MemberKind::RandomTents => "random_tents",
            MemberKind::RandomBumps => "random_bumps",
            MemberKind::Gaussian => "gaussian",
            MemberKind::Indicator => "indicator",
            MemberKind::Tent => "tent",
            MemberKind::Atom => "atom",
            MemberKind::Mode => "mode",
        }
    }
}

/// Composition of a test-function ensemble; member `i` has kind
/// `kinds[i % kinds.len()]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub size: usize,
    pub kinds: Vec<MemberKind>,
}

impl EnsembleSpec {
    /// Every kind, including single modes and atoms.
    pub fn mixed(size: usize) -> Self {
        use MemberKind::*;
        Self {
            size,
            kinds: vec![RandomGaussian, RandomTents, RandomBumps, Gaussian, Indicator, Tent, Atom, Mode],
        }
    }

    /// Kinds whose samples behave like functions on the line: no plane
    /// waves, deltas or few-cell atoms.
    pub fn spread(size: usize) -> Self {
        use MemberKind::*;
        Self {
            size,
            kinds: vec![RandomGaussian, RandomTents, RandomBumps, Gaussian, Indicator, Tent],
        }
    }

    pub fn random(size: usize) -> Self {
        Self {
            size,
            kinds: vec![MemberKind::RandomGaussian],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub id: String,
    pub field: SampledField,
}

fn random_box(grid: &Grid, r: &mut impl rand::Rng) -> AxisBox {
    let l = grid.side_length();
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for _ in 0..grid.dim() {
        let c = r.random_range(0.35 * l..0.65 * l);
        let w = r.random_range(l / 32.0..l / 8.0).max(grid.spacing());
        lo.push(c - w);
        hi.push(c + w);
    }
    AxisBox::new(lo, hi)
}

fn member_field(grid: &Grid, kind: MemberKind, seed: u64) -> Result<SampledField> {
    let mut r = seeded(seed);
    let l = grid.side_length();
    let spec = match kind {
        MemberKind::RandomGaussian => GeneratorSpec::RandomGaussian { seed },
        MemberKind::RandomTents => GeneratorSpec::RandomTents { seed, count: r.random_range(1..=4) },
        MemberKind::RandomBumps => GeneratorSpec::RandomBumps { seed, count: r.random_range(1..=4) },
        MemberKind::Gaussian => {
            // decays below 1e−14 at the boundary, resolved below Nyquist
            let lo = 1.05 * 4.0 * (1e14f64).ln() / (PI * l * l);
            let hi = (PI * grid.nyquist().powi(2) / 40.0).max(lo);
            GeneratorSpec::Gaussian { eps: (r.random_range(lo.ln()..=hi.ln())).exp() }
        }
        MemberKind::Indicator => GeneratorSpec::Indicator { cube: random_box(grid, &mut r) },
        MemberKind::Tent => GeneratorSpec::Tent {
            cube: random_box(grid, &mut r),
            delta: r.random_range(0.1..1.0),
        },
        MemberKind::Atom => {
            let center: Vec<f64> = (0..grid.dim()).map(|_| r.random_range(0.35 * l..0.65 * l)).collect();
            let rmin = 3.0 * grid.spacing();
            let rmax = (l / 8.0).max(rmin * 1.01);
            let radius = r.random_range(rmin..rmax);
            let cells = atom_cells(grid, &center, radius)?;
            let raw: Vec<f64> = cells.iter().map(|_| r.random_range(-1.0..1.0)).collect();
            return atom_from_values(grid, &cells, &raw);
        }
        MemberKind::Mode => {
            let kmax = (grid.points_per_axis() / 4) as i64;
            GeneratorSpec::Mode {
                k: (0..grid.dim()).map(|_| r.random_range(-kmax..=kmax)).collect(),
            }
        }
    };
    generate(grid, &spec)
}

/// Deterministic ensemble: member `i` draws from `derive_seed(seed, i)`.
pub fn build_ensemble(grid: &Grid, spec: &EnsembleSpec, seed: u64) -> Result<Vec<Member>> {
    if spec.size == 0 || spec.kinds.is_empty() {
        return Err(invalid("ensemble must be nonempty"));
    }
    (0..spec.size)
        .into_par_iter()
        .map(|i| {
            let kind = spec.kinds[i % spec.kinds.len()];
            let s = derive_seed(seed, i as u64);
            let id = format!("{}#{i}", kind.name());
            member_field(grid, kind, s)
                .map(|field| Member { id: id.clone(), field })
                .map_err(|e| Error::Member { id, source: Box::new(e) })
        })
        .collect()
}

/// `‖Tf‖_q / ‖f‖_p` for every nonzero member, in ensemble order.
pub fn ratios(op: &OperatorHandle, p: f64, q: f64, members: &[Member]) -> Result<Vec<(String, f64)>> {
    let out: Result<Vec<Option<(String, f64)>>> = members
        .par_iter()
        .map(|m| {
            let wrap = |e: Error| Error::Member { id: m.id.clone(), source: Box::new(e) };
            let denom = m.field.lp_norm(p).map_err(wrap)?;
            if denom == 0.0 {
                return Ok(None);
            }
            let tf = op.apply(&m.field).map_err(wrap)?;
            Ok(Some((m.id.clone(), tf.lp_norm(q).map_err(wrap)? / denom)))
        })
        .collect();
    Ok(out?.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub witness: String,
}

fn arg_max(rs: &[(String, f64)]) -> Option<NormEstimate> {
    let mut best: Option<&(String, f64)> = None;
    for r in rs {
        if best.map_or(true, |b| r.1 > b.1) {
            best = Some(r);
        }
    }
    best.map(|(id, v)| NormEstimate { value: *v, witness: id.clone() })
}

/// Lower bound on the `(p, q)` operator norm over an ensemble.
pub fn norm_lower_bound(op: &OperatorHandle, p: f64, q: f64, members: &[Member]) -> Result<NormEstimate> {
    if members.is_empty() {
        return Err(invalid("ensemble must be nonempty"));
    }
    arg_max(&ratios(op, p, q, members)?).ok_or_else(|| invalid("ensemble has only zero fields"))
}

/// Riesz–Thorin certificate: every member satisfies
/// `‖Tf‖_{q_θ} ≤ M₀^{1−θ} M₁^θ ‖f‖_{p_θ} (1 + 1e−8)`.
pub fn riesz_thorin_check(
    op: &OperatorHandle,
    query: &InterpolationQuery,
    members: &[Member],
    seed: u64,
) -> Result<CheckReport> {
    const SLACK: f64 = 1e-8;
    let bounds = op
        .bounds
        .ok_or_else(|| invalid(format!("operator `{}` has no endpoint bounds", op.name)))?;
    let grid = members.first().map(|m| *m.field.grid());
    let (p, q) = (query.p_theta(), query.q_theta());
    let bound = bounds.m0.powf(1.0 - query.theta) * bounds.m1.powf(query.theta);
    let rs = ratios(op, p, q, members)?;
    let best = arg_max(&rs).ok_or_else(|| invalid("ensemble has only zero fields"))?;
    let violations = rs.iter().filter(|(_, r)| *r > bound * (1.0 + SLACK)).count();
    let mut report = CheckReport::new("riesz-thorin", grid.as_ref(), seed)
        .param("operator", op.name.clone())
        .param("p0", number(query.p0))
        .param("q0", number(query.q0))
        .param("p1", number(query.p1))
        .param("q1", number(query.q1))
        .param("theta", query.theta)
        .param("p_theta", number(p))
        .param("q_theta", number(q))
        .param("m0", bounds.m0)
        .param("m1", bounds.m1)
        .param("bounds", bounds.provenance.to_string())
        .param("members", rs.len())
        .param("violations", violations)
        .outcome(best.value, bound, violations == 0);
    report.witness = Some(best.witness);
    Ok(report)
}

/// A function on the closed strip `0 ≤ Re z ≤ 1`, sampled on the segments
/// `|Im z| ≤ y_max` with `points` samples each.
#[derive(Clone)]
pub struct StripSample {
    pub phi: Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
    pub y_max: f64,
    pub points: usize,
}

impl StripSample {
    pub fn new(phi: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self {
            phi: Arc::new(phi),
            y_max: 20.0,
            points: 2001,
        }
    }

    pub fn with_sampling(mut self, y_max: f64, points: usize) -> Self {
        self.y_max = y_max;
        self.points = points;
        self
    }

    /// `max |Φ(x + iy)|` over the sampled segment.
    pub fn line_max(&self, x: f64) -> f64 {
        let n = self.points.max(2);
        (0..n)
            .map(|i| {
                let y = -self.y_max + 2.0 * self.y_max * i as f64 / (n - 1) as f64;
                (self.phi)(Complex64::new(x, y)).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Hadamard three-lines check: `sup_{Re z = θ} |Φ| ≤ k₀^{1−θ} k₁^θ (1 + 1e−9)`.
///
/// `measured` is the largest ratio of line maximum to interpolated bound.
pub fn three_lines_check(strip: &StripSample, thetas: &[f64]) -> Result<CheckReport> {
    const SLACK: f64 = 1e-9;
    if thetas.is_empty() {
        return Err(invalid("no θ values"));
    }
    let k0 = strip.line_max(0.0);
    let k1 = strip.line_max(1.0);
    if !(k0.is_finite() && k1.is_finite()) {
        return Err(invalid("Φ is unbounded on the sampled boundary"));
    }
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for &theta in thetas {
        if !(0.0..=1.0).contains(&theta) {
            return Err(invalid(format!("θ = {theta} outside [0, 1]")));
        }
        let sup = strip.line_max(theta);
        let bound = k0.powf(1.0 - theta) * k1.powf(theta);
        let ratio = if bound == 0.0 {
            if sup == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            sup / bound
        };
        worst = worst.max(ratio);
        lines.push(json!({ "theta": theta, "sup": sup, "bound": bound }));
    }
    Ok(CheckReport::new("three-lines", None, 0)
        .param("k0", k0)
        .param("k1", k1)
        .param("y_max", strip.y_max)
        .param("points", strip.points)
        .param("lines", Value::Array(lines))
        .at_most(worst, 1.0 + SLACK))
}

/// The holomorphic family `Φ(z) = ∫ (T f_z) g_z` from the proof of
/// Riesz–Thorin, for a convolution operator and nonnegative simple `f`, `g`.
///
/// `f` is normalised in `L^{p_θ}` and `g` in `L^{q_θ'}`; then
/// `f_z = f^{p_θ α(z)}` and `g_z = g^{q_θ' β(z)}` with
/// `α(z) = (1−z)/p₀ + z/p₁`, `β(z) = (1−z)/q₀' + z/q₁'`.
pub fn riesz_thorin_strip(
    kernel: &SampledField,
    f: &SampledField,
    g: &SampledField,
    query: &InterpolationQuery,
) -> Result<StripSample> {
    let levels = |u: &SampledField| -> Result<Vec<(f64, SampledField)>> {
        let mut vals: Vec<f64> = Vec::new();
        for v in u.values() {
            if v.im != 0.0 || v.re < 0.0 {
                return Err(invalid("simple functions must be nonnegative and real"));
            }
            if v.re > 0.0 && !vals.contains(&v.re) {
                vals.push(v.re);
            }
        }
        vals.sort_by(f64::total_cmp);
        Ok(vals
            .into_iter()
            .map(|a| {
                let ind = u.map(|v| Complex64::new(if v.re == a { 1.0 } else { 0.0 }, 0.0));
                (a, ind)
            })
            .collect())
    };
    let (p, qc) = (query.p_theta(), conjugate(query.q_theta()));
    if p.is_infinite() || qc.is_infinite() {
        return Err(invalid("the simple-function family needs finite p_θ and q_θ'"));
    }
    let f = f.scale(Complex64::new(f.lp_norm(p)?.recip(), 0.0));
    let g = g.scale(Complex64::new(g.lp_norm(qc)?.recip(), 0.0));
    let fl = levels(&f)?;
    let gl = levels(&g)?;
    // C[a][b] = ∫ (k * χ_a) χ_b
    let mut terms = Vec::new();
    for (a, ea) in &fl {
        let conv = convolve(ea, kernel)?;
        for (b, eb) in &gl {
            let c = conv.mul(eb)?.integral();
            terms.push((a.ln(), b.ln(), c));
        }
    }
    let (p0, p1) = (recip(query.p0), recip(query.p1));
    let (q0c, q1c) = (recip(conjugate(query.q0)), recip(conjugate(query.q1)));
    Ok(StripSample::new(move |z| {
        let one = Complex64::new(1.0, 0.0);
        let alpha = (one - z) * p0 + z * p1;
        let beta = (one - z) * q0c + z * q1c;
        terms
            .iter()
            .map(|&(la, lb, c)| c * (alpha * p * la + beta * qc * lb).exp())
            .sum()
    }))
}

/// Harmonic-measure weights of the unit strip at height `θ`:
/// `w₋ = (sin πθ / 2) ∫_{−Y}^{Y} dy / (cosh πy − cos πθ)` and `w₊` with `+`,
/// by the trapezoidal rule with the given step.
pub fn hirschman_weights(theta: f64, y_max: f64, step: f64) -> Result<(f64, f64)> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(invalid(format!("θ = {theta} must lie strictly inside (0, 1)")));
    }
    if !(y_max >= 10.0) || !(step > 0.0 && step <= 1e-3) {
        return Err(invalid(format!(
            "quadrature needs Y ≥ 10 and 0 < step ≤ 1e−3, got Y = {y_max}, step = {step}"
        )));
    }
    let intervals = (2.0 * y_max / step).round() as usize;
    let dy = 2.0 * y_max / intervals as f64;
    let c = (PI * theta).cos();
    let (mut minus, mut plus) = (0.0, 0.0);
    for i in 0..=intervals {
        let y = -y_max + i as f64 * dy;
        let w = if i == 0 || i == intervals { 0.5 } else { 1.0 };
        let ch = (PI * y).cosh();
        minus += w / (ch - c);
        plus += w / (ch + c);
    }
    let s = (PI * theta).sin() / 2.0 * dy;
    Ok((minus * s, plus * s))
}

/// `‖⟨ξ⟩^s f̂‖₂`.
pub fn sobolev_norm(field: &SampledField, s: f64) -> Result<f64> {
    field.require_side(Side::Physical)?;
    let spec = forward(field)?;
    let w = Symbol::BesselWeight { s }.on_grid(field.grid())?;
    spec.mul(&w)?.lp_norm(2.0)
}

/// One measurement of a Stein scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub z: Complex64,
    pub p: f64,
    pub q: f64,
    pub ratio: f64,
    pub witness: String,
}

#[derive(Debug, Clone)]
pub struct SteinScan {
    pub rows: Vec<ScanRow>,
    pub report: CheckReport,
}

impl SteinScan {
    /// CSV matrix `re_z,im_z,p,q,ratio`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("re_z,im_z,p,q,ratio\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{},{}\n", r.z.re, r.z.im, r.p, r.q, r.ratio));
        }
        s
    }
}

fn wave_family_op(grid: &Grid, z: Complex64, t: f64) -> Result<OperatorHandle> {
    OperatorHandle::multiplier(grid, &Symbol::WaveFamily { z, t })
}

/// Measures the wave family `T_z = (sinc_t ⟨ξ⟩^{1−z})^∨` at each `z` and
/// exponent pair, and checks that on every vertical line the measurements
/// vary by at most a factor of 10 in `Im z`.
pub fn stein_family_scan(
    grid: &Grid,
    t: f64,
    z_list: &[Complex64],
    pq_list: &[(f64, f64)],
    members: &[Member],
    seed: u64,
) -> Result<SteinScan> {
    const SPREAD: f64 = 10.0;
    if z_list.is_empty() || pq_list.is_empty() {
        return Err(invalid("Stein scan needs at least one z and one exponent pair"));
    }
    let mut rows = Vec::new();
    for &z in z_list {
        let op = wave_family_op(grid, z, t)?;
        for &(p, q) in pq_list {
            let est = norm_lower_bound(&op, p, q, members)?;
            rows.push(ScanRow { z, p, q, ratio: est.value, witness: est.witness });
        }
    }
    let mut worst = 1.0f64;
    for (i, r) in rows.iter().enumerate() {
        let group = rows[i..]
            .iter()
            .filter(|o| o.z.re == r.z.re && o.p == r.p && o.q == r.q)
            .map(|o| o.ratio);
        let (lo, hi) = group.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if lo > 0.0 {
            worst = worst.max(hi / lo);
        } else if hi > 0.0 {
            worst = f64::INFINITY;
        }
    }
    let report = CheckReport::new("stein-family", Some(grid), seed)
        .param("t", t)
        .param("z_count", z_list.len())
        .param("pairs", pq_list.len())
        .param("members", members.len())
        .at_most(worst, SPREAD);
    Ok(SteinScan { rows, report })
}

/// Stein interpolation along the wave family: endpoints `Re z = 0` at
/// `(2,2)` with `M₀ = sup |m_{iy}|` and `Re z = d+1` at `(1,∞)` with
/// `M₁ = sup_y Σ_k |m_{d+1+iy}(ξ_k)| L^{−d}`. At `z = θ(d+1) + iy` the
/// measured `(p_θ, p_θ')` ratio must not exceed `M₀^{1−θ} M₁^θ (1 + 1e−6)`.
pub fn stein_interpolation_check(
    grid: &Grid,
    t: f64,
    thetas: &[f64],
    ys: &[f64],
    members: &[Member],
    seed: u64,
) -> Result<CheckReport> {
    const SLACK: f64 = 1e-6;
    if thetas.is_empty() || ys.is_empty() {
        return Err(invalid("Stein interpolation needs θ and Im z samples"));
    }
    let top = (grid.dim() + 1) as f64;
    let mut m0 = 0.0f64;
    let mut m1 = 0.0f64;
    for &y in ys {
        let sym0 = Symbol::WaveFamily { z: Complex64::new(0.0, y), t };
        m0 = m0.max(sym0.sup_norm(grid)?);
        let sym1 = Symbol::WaveFamily { z: Complex64::new(top, y), t };
        m1 = m1.max(sym1.on_grid(grid)?.lp_norm(1.0)?);
    }
    let mut worst = 0.0f64;
    let mut witness = String::new();
    let mut lines = Vec::new();
    for &theta in thetas {
        let p = interpolate_exponent(2.0, 1.0, theta);
        let q = conjugate(p);
        let bound = m0.powf(1.0 - theta) * m1.powf(theta);
        for &y in ys {
            let op = wave_family_op(grid, Complex64::new(theta * top, y), t)?;
            let est = norm_lower_bound(&op, p, q, members)?;
            let r = est.value / bound;
            if r > worst {
                worst = r;
                witness = est.witness;
            }
            lines.push(json!({ "theta": theta, "im_z": y, "ratio": est.value, "bound": bound }));
        }
    }
    Ok(CheckReport::new("stein-interpolation", Some(grid), seed)
        .param("t", t)
        .param("m0", m0)
        .param("m1", m1)
        .param("lines", Value::Array(lines))
        .at_most(worst, 1.0 + SLACK)
        .witness(witness))
}
