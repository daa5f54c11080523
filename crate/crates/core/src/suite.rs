//! Seeded verification suites, one per family of checks.
//!
//! A [`RunConfig`] names the suite, the grid, the seed and the ensemble
//! size; [`run`] produces a [`SuiteOutput`] whose reports each embed the
//! full configuration. Serial runs use a one-thread pool; since every
//! reduction in the crate is order-independent, serial and parallel runs
//! give identical reports.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::fourier::{beckner_constant, forward, hausdorff_young_ratio, multiplication_formula_defect, plancherel_defect};
use crate::geometry::{
    audit_cz, audit_whitney, cube_summary, cubes_to_csv, cubes_to_svg, cz_decompose, whitney, ClosedSetMask,
};
use crate::grid::{generate, AxisBox, GeneratorSpec, Grid, SampledField, Side};
use crate::interp::{
    build_ensemble, hirschman_weights, riesz_thorin_check, riesz_thorin_strip, sobolev_norm,
    stein_family_scan, stein_interpolation_check, three_lines_check, EnsembleSpec, InterpolationQuery, Member,
    OperatorHandle, StripSample,
};
use crate::maximal::{
    atom_experiment, bmo_norm, hl_maximal, hl_maximal_direct, maximal_operator, random_atom, sharp_maximal,
    weak_norm, DistributionProfile,
};
use crate::operators::{
    apply_multiplier, approximation_errors, bochner_riesz_mean, convolve, hilbert, mollify, pv_hilbert_direct,
    riesz, Symbol,
};
use crate::pde::{dalembertian_residual, trajectory_csv, wave_energy, wave_evolve, WaveData};
use crate::report::{number, CheckReport};
use crate::rng::{derive_seed, seeded};

macro_rules! suites {
    ($($variant:ident => $name:literal: [$($key:literal),*]),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum SuiteName {
            $(#[serde(rename = $name)] $variant,)*
        }

        impl SuiteName {
            pub const ALL: &'static [SuiteName] = &[$(SuiteName::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(SuiteName::$variant => $name,)*
                }
            }

            /// Names accepted by `--tol key=value` for this suite.
            pub fn tolerance_keys(self) -> &'static [&'static str] {
                match self {
                    $(SuiteName::$variant => &[$($key),*],)*
                }
            }
        }
    };
}

suites! {
    GaussFt => "gauss-ft": ["max_error"],
    Plancherel => "plancherel": ["defect", "multiplication"],
    HausdorffYoung => "hausdorff-young": ["sharpness", "excess"],
    Young => "young": ["slack"],
    RieszThorin => "riesz-thorin": ["slack"],
    ThreeLines => "three-lines": ["slack", "equality"],
    Hirschman => "hirschman": ["weight"],
    Hilbert => "hilbert": ["closed_form", "involution", "identity", "pv"],
    Riesz => "riesz": ["identity", "slack"],
    Mollify => "mollify": [],
    BochnerRiesz => "bochner-riesz": ["closed_form"],
    Whitney => "whitney": [],
    Cz => "cz": [],
    Maximal => "maximal": ["routes", "weak"],
    Bmo => "bmo": ["exact", "shift"],
    Atoms => "atoms": ["slack"],
    Sobolev => "sobolev": ["convexity", "closed_form"],
    SteinFamily => "stein-family": ["spread", "slack"],
    Wave => "wave": ["closed_form", "energy"],
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteName::ALL
            .iter()
            .copied()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Both,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "both" => Ok(Format::Both),
            _ => Err(invalid(format!("unknown format `{s}` (json, csv, both)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parallelism {
    Serial,
    #[default]
    Auto,
}

impl FromStr for Parallelism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "serial" => Ok(Parallelism::Serial),
            "auto" => Ok(Parallelism::Auto),
            _ => Err(invalid(format!("unknown parallelism `{s}` (serial, auto)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub suite: SuiteName,
    pub d: usize,
    pub n: usize,
    pub length: f64,
    pub seed: u64,
    pub ensemble: usize,
    pub tol: BTreeMap<String, f64>,
    pub out_dir: Option<PathBuf>,
    pub format: Format,
    pub parallelism: Parallelism,
    pub theta: Option<f64>,
    pub t: Option<f64>,
}

impl RunConfig {
    /// Defaults: `d = 1`, `n = 256`, `L = 16`, seed 42, 100 members, JSON.
    pub fn new(suite: SuiteName) -> Self {
        Self {
            suite,
            d: 1,
            n: 256,
            length: 16.0,
            seed: 42,
            ensemble: 100,
            tol: BTreeMap::new(),
            out_dir: None,
            format: Format::Json,
            parallelism: Parallelism::Auto,
            theta: None,
            t: None,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.d, self.n, self.length)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        if self.ensemble == 0 {
            return Err(invalid("ensemble size must be positive"));
        }
        let keys = self.suite.tolerance_keys();
        for (k, v) in &self.tol {
            if !keys.contains(&k.as_str()) {
                return Err(invalid(format!(
                    "suite {} has no tolerance `{k}` (known: {})",
                    self.suite,
                    if keys.is_empty() { "none".to_string() } else { keys.join(", ") }
                )));
            }
            if !(*v >= 0.0 && v.is_finite()) {
                return Err(invalid(format!("tolerance {k} = {v} must be finite and nonnegative")));
            }
        }
        if let Some(theta) = self.theta {
            if !(theta > 0.0 && theta < 1.0) {
                return Err(invalid(format!("θ = {theta} must lie strictly inside (0, 1)")));
            }
        }
        if let Some(t) = self.t {
            if !t.is_finite() {
                return Err(invalid("t must be finite"));
            }
        }
        Ok(())
    }

    fn tol(&self, key: &str, default: f64) -> f64 {
        debug_assert!(self.suite.tolerance_keys().contains(&key));
        self.tol.get(key).copied().unwrap_or(default)
    }

    fn members(&self, grid: &Grid, spec: EnsembleSpec, stream: u64) -> Result<Vec<Member>> {
        build_ensemble(grid, &spec, derive_seed(self.seed, stream))
    }
}

/// Reports plus auxiliary CSV tables and an optional SVG drawing.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutput {
    pub suite: SuiteName,
    pub reports: Vec<CheckReport>,
    /// `(file name, CSV text)`.
    pub tables: Vec<(String, String)>,
    pub svg: Option<String>,
}

impl SuiteOutput {
    fn new(suite: SuiteName) -> Self {
        Self { suite, reports: Vec::new(), tables: Vec::new(), svg: None }
    }

    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckReport> {
        self.reports.iter().filter(|r| !r.pass)
    }

    pub fn summary(&self) -> Value {
        json!({
            "suite": self.suite.as_str(),
            "pass": self.passed(),
            "reports": self.reports,
        })
    }

    /// Pretty JSON summary with a trailing newline.
    pub fn summary_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary()).expect("reports serialise");
        s.push('\n');
        s
    }

    /// One CSV row per report.
    pub fn reports_csv(&self) -> String {
        let mut s = String::from("check,measured,bound,pass,seed,witness\n");
        for r in &self.reports {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.check,
                r.measured,
                r.bound,
                r.pass,
                r.seed,
                r.witness.as_deref().unwrap_or("")
            ));
        }
        s
    }

    /// Writes the outputs selected by `format` into `dir` and returns the
    /// paths written.
    pub fn write(&self, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let name = self.suite.as_str();
        let mut written = Vec::new();
        let mut put = |file: String, text: &str| -> Result<()> {
            let path = dir.join(file);
            fs::write(&path, text)?;
            written.push(path);
            Ok(())
        };
        if matches!(format, Format::Json | Format::Both) {
            put(format!("{name}.json"), &self.summary_json())?;
        }
        if matches!(format, Format::Csv | Format::Both) {
            put(format!("{name}.csv"), &self.reports_csv())?;
            for (file, text) in &self.tables {
                put(file.clone(), text)?;
            }
        }
        if let Some(svg) = &self.svg {
            put(format!("{name}.svg"), svg)?;
        }
        Ok(written)
    }
}

/// Runs the configured suite.
pub fn run(config: &RunConfig) -> Result<SuiteOutput> {
    config.validate()?;
    let mut out = match config.parallelism {
        Parallelism::Serial => rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| invalid(format!("cannot build thread pool: {e}")))?
            .install(|| dispatch(config)),
        Parallelism::Auto => dispatch(config),
    }?;
    let embedded = serde_json::to_value(config).expect("config serialises");
    for r in &mut out.reports {
        r.set_param("config", embedded.clone());
    }
    Ok(out)
}

fn dispatch(c: &RunConfig) -> Result<SuiteOutput> {
    match c.suite {
        SuiteName::GaussFt => gauss_ft(c),
        SuiteName::Plancherel => plancherel(c),
        SuiteName::HausdorffYoung => hausdorff_young(c),
        SuiteName::Young => young(c),
        SuiteName::RieszThorin => riesz_thorin(c),
        SuiteName::ThreeLines => three_lines(c),
        SuiteName::Hirschman => hirschman(c),
        SuiteName::Hilbert => hilbert_suite(c),
        SuiteName::Riesz => riesz_suite(c),
        SuiteName::Mollify => mollify_suite(c),
        SuiteName::BochnerRiesz => bochner_riesz(c),
        SuiteName::Whitney => whitney_suite(c),
        SuiteName::Cz => cz_suite(c),
        SuiteName::Maximal => maximal_suite(c),
        SuiteName::Bmo => bmo_suite(c),
        SuiteName::Atoms => atoms_suite(c),
        SuiteName::Sobolev => sobolev_suite(c),
        SuiteName::SteinFamily => stein_suite(c),
        SuiteName::Wave => wave_suite(c),
    }
}

/// Largest value with the id that attains it; ties keep the first.
struct Worst {
    value: f64,
    witness: String,
}

impl Worst {
    fn new() -> Self {
        Self { value: 0.0, witness: String::new() }
    }

    fn push(&mut self, value: f64, witness: impl fmt::Display) {
        if value > self.value || (value.is_nan() && !self.value.is_nan()) || self.witness.is_empty() {
            self.value = value;
            self.witness = witness.to_string();
        }
    }
}

fn max_abs_diff(a: &SampledField, b: &SampledField) -> Result<f64> {
    Ok(a.sub(b)?.max_abs())
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn remove_mean(f: &SampledField) -> Result<SampledField> {
    f.sub(&SampledField::constant(*f.grid(), f.mean()))
}

fn gauss_ft(c: &RunConfig) -> Result<SuiteOutput> {
    let grid = c.grid()?;
    let d = grid.dim();
    let bound = c.tol("max_error", if d == 1 { 1e-6 } else { 1e-5 });
    let mut out = SuiteOutput::new(c.suite);
    for eps in [1.0, 4.0] {
        let spec = forward(&generate(&grid, &GeneratorSpec::Gaussian { eps })?)?;
        // centred at L/2, which contributes the phase (−1)^{k₁+…+k_d}
        let mut err = 0.0f64;
        for (k, v) in spec.values().iter().enumerate() {
            let w = grid.wavenumber(k);
            let xi = grid.frequency(k);
            let r2: f64 = xi[..d].iter().map(|x| x * x).sum();
            let sign = if w[..d].iter().sum::<i64>().rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let exact = sign * eps.powf(-(d as f64) / 2.0) * (-PI * r2 / eps).exp();
            err = err.max((v - exact).norm());
        }
        out.reports.push(
            CheckReport::new("gauss-ft", Some(&grid), c.seed)
                .param("eps", eps)
                .at_most(err, bound),
        );
    }
    Ok(out)
}

fn plancherel(c: &RunConfig) -> Result<SuiteOutput> {
    let grid = c.grid()?;
    let members = c.members(&grid, EnsembleSpec::mixed(c.ensemble), 0)?;
    let mut worst = Worst::new();
    for m in &members {
        worst.push(plancherel_defect(&m.field)?, &m.id);
    }
    let mut out = SuiteOutput::new(c.suite);
    out.reports.push(
        CheckReport::new("plancherel", Some(&grid), c.seed)
            .param("members", members.len())
            .at_most(worst.value, c.tol("defect", 1e-12))
            .witness(worst.witness),
    );
    let mut worst = Worst::new();
    for pair in members.windows(2) {
        let defect = multiplication_formula_defect(&pair[0].field, &pair[1].field)?;
        worst.push(defect, format!("{}+{}", pair[0].id, pair[1].id));
    }
    out.reports.push(
        CheckReport::new("multiplication-formula", Some(&grid), c.seed)
            .param("pairs", members.len().saturating_sub(1))
            .at_most(worst.value, c.tol("multiplication", 1e-12))
            .witness(worst.witness),
    );
    Ok(out)
}

fn hausdorff_young(c: &RunConfig) -> Result<SuiteOutput> {
    let grid = c.grid()?;
    let d = grid.dim() as i32;
    let mut out = SuiteOutput::new(c.suite);
    let p = 4.0 / 3.0;
    let sharp = beckner_constant(p)?.powi(d);
    let gaussian = generate(&grid, &GeneratorSpec::Gaussian { eps: 1.0 })?;
    let ratio = hausdorff_young_ratio(&gaussian, p)?;
    out.reports.push(
        CheckReport::new("hausdorff-young-gaussian", Some(&grid), c.seed)
            .param("p", p)
            .param("ratio", ratio)
            .param("beckner", sharp)
            .at_most((ratio / sharp - 1.0).abs(), c.tol("sharpness", 0.01)),
    );
    let members = c.members(&grid, EnsembleSpec::spread(c.ensemble), 0)?;
    for p in [1.0, 1.25, 1.5, 2.0] {
        let cp = beckner_constant(p)?.powi(d);
        let mut worst = Worst::new();
        for m in &members {
            worst.push(hausdorff_young_ratio(&m.field, p)?, &m.id);
        }
        out.reports.push(
            CheckReport::new("hausdorff-young-ensemble", Some(&grid), c.seed)
                .param("p", p)
                .param("members", members.len())
                .at_most(worst.value, cp + c.tol("excess", 1e-6))
                .witness(worst.witness),
        );
    }
    Ok(out)
}

fn young(c: &RunConfig) -> Result<SuiteOutput> {
    let grid = c.grid()?;
    let members = c.members(&grid, EnsembleSpec::mixed(c.ensemble), 0)?;
    let triples = [
        (1.0, 1.0, 1.0),
        (1.0, 2.0, 2.0),
        (2.0, 1.0, 2.0),
        (4.0 / 3.0, 4.0 / 3.0, 2.0),
        (1.5, 1.2, 2.0),
        (1.25, 1.25, 5.0 / 3.0),
        (2.0, 2.0, f64::INFINITY),
    ];
    let mut worst = Worst::new();
    for pair in members.windows(2) {
        let (f, g) = (&pair[0].field, &pair[1].field);
        let conv = convolve(f, g)?;
        for &(p, q, r) in &triples {
            let denom = f.lp_norm(p)? * g.lp_norm(q)?;
            if denom > 0.0 {
                worst.push(conv.lp_norm(r)? / denom, format!("{}*{}@({p},{q},{r})", pair[0].id, pair[1].id));
            }
        }
    }
    let mut out = SuiteOutput::new(c.suite);
    out.reports.push(
        CheckReport::new("young", Some(&grid), c.seed)
            .param("pairs", members.len().saturating_sub(1))
            .param(
                "exponents",
                triples.iter().map(|&(p, q, r)| json!([p, q, number(r)])).collect::<Vec<_>>(),
            )
            .at_most(worst.value, 1.0 + c.tol("slack", 1e-12))
            .witness(worst.witness),
    );
    Ok(out)
}

const RT_KERNELS: usize = 20;

fn riesz_thorin(c: &RunConfig) -> Result<SuiteOutput> {
    let grid = c.grid()?;
    let members = c.members(&grid, EnsembleSpec::mixed(c.ensemble), 0)?;
    let kernels: Vec<OperatorHandle> = (0..RT_KERNELS)
        .map(|i| {
            let seed = derive_seed(c.seed, 1000 + i as u64);
            let spec = if i % 2 == 0 {
                GeneratorSpec::RandomBumps { seed, count: 3 }
            } else {
                GeneratorSpec::RandomTents { seed, count: 3 }
            };
            OperatorHandle::convolution(generate(&grid, &spec)?)
        })
        .collect::<Result<_>>()?;
    let thetas = c.theta.map_or(vec![0.25, 0.5, 0.75], |t| vec![t]);
    let slack = c.tol("slack", 1e-8);
    let mut out = SuiteOutput::new(c.suite);
    for &theta in &thetas {
        let query = InterpolationQuery::new(1.0, 1.0, 2.0, 2.0, theta)?;
        let mut worst = Worst::new();
        let mut violations = 0u64;
        for (i, op) in kernels.iter().enumerate() {
            let r = riesz_thorin_check(op, &query, &members, c.seed)?;
            violations += r.params["violations"].as_u64().unwrap_or(0);
            worst.push(r.measured / r.bound, format!("kernel#{i}/{}", r.witness.unwrap_or_default()));
        }
        out.reports.push(
            CheckReport::new("riesz-thorin", Some(&grid), c.seed)
                .param("theta", theta)
                .param("p_theta", query.p_theta())
                .param("kernels", RT_KERNELS)
                .param("members", members.len())
                .param("violations", violations)
                .outcome(worst.value, 1.0 + slack, violations == 0 && worst.value <= 1.0 + slack)
                .witness(worst.witness),
        );
    }
    let query = InterpolationQuery::new(1.0, f64::INFINITY, 2.0, 2.0, 0.5)?;
    let mut r = riesz_thorin_check(&OperatorHandle::fourier(), &query, &members, c.seed)?;
    r.check = "riesz-thorin-fourier".into();
    out.reports.push(r);
    Ok(out)
}

/// Nonnegative simple function with three random positive levels on random
/// cell sets.
fn simple_function(grid: &Grid, seed: u64) -> SampledField {
    let mut r = seeded(seed);
    let levels = [0.0, r.random_range(0.2..1.0), r.random_range(1.0..2.0), r.random_range(2.0..4.0)];
    SampledField::from_fn(*grid, Side::Physical, |_| real(levels[r.random_range(0..levels.len())]))
}

fn three_lines(c: &RunConfig) -> Result<SuiteOutput> {
    let thetas: Vec<f64> = c.theta.map_or((1..10).map(|i| i as f64 / 10.0).collect(), |t| vec![t]);
    let slack = c.tol("slack", 1e-9);
    let mut out = SuiteOutput::new(c.suite);
    for a in [Complex64::new(1.0, 0.0), Complex64::new(2.0, 1.0)] {
        let strip = StripSample::new(move |z| (a * z).exp());
        let mut r = three_lines_check(&strip, &thetas)?;
        r.set_param("a_re", a.re);
        r.set_param("a_im", a.im);
        let m = r.measured;
        r = r.at_most(m, 1.0 + slack);
        out.reports.push(r);
        let k0 = strip.line_max(0.0);
        let k1 = strip.line_max(1.0);
        let gap = thetas
            .iter()
            .map(|&t| (strip.line_max(t) / (k0.powf(1.0 - t) * k1.powf(t)) - 1.0).abs())
            .fold(0.0, f64::max);
        out.reports.push(
            CheckReport::new("three-lines-equality", None, c.seed)
                .param("a_re", a.re)
                .param("a_im", a.im)
                .at_most(gap, c.tol("equality", 1e-12)),
        );
    }
    let grid = c.grid()?;
    let kernel = generate(&grid, &GeneratorSpec::Gaussian { eps: 4.0 })?;
    let theta = c.theta.unwrap_or(0.5);
    let query = InterpolationQuery::new(1.0, 1.0, 2.0, 2.0, theta)?;
    let mut worst = Worst::new();
    for i in 0..10u64 {
        let f = simple_function(&grid, derive_seed(c.seed, 2 * i));
        let g = simple_function(&grid, derive_seed(c.seed, 2 * i + 1));
        let strip = riesz_thorin_strip(&kernel, &f, &g, &query)?;
        let r = three_lines_check(&strip, &[0.25, 0.5, 0.75])?;
        worst.push(r.measured, format!("pair#{i}"));
    }
    out.reports.push(
        CheckReport::new("three-lines-riesz-thorin", Some(&grid), c.seed)
            .param("theta", theta)
            .param("pairs", 10)
            .at_most(worst.value, 1.0 + slack)
            .witness(worst.witness),
    );
    Ok(out)
}

fn hirschman(c: &RunConfig) -> Result<SuiteOutput> {
    let thetas: Vec<f64> = c.theta.map_or((1..10).map(|i| i as f64 / 10.0).collect(), |t| vec![t]);
    let (y_max, step) = (20.0, 1e-3);
    let mut out = SuiteOutput::new(c.suite);
    for theta in thetas {
        let (wm, wp) = hirschman_weights(theta, y_max, step)?;
        let err = (wp - theta).abs().max((wm - (1.0 - theta)).abs()).max((wm + wp - 1.0).abs());
        out.reports.push(
            CheckReport::new("hirschman", None, c.seed)
                .param("theta", theta)
                .param("w_plus", wp)
                .param("w_minus", wm)
                .param("y_max", y_max)
                .param("step", step)
                .at_most(err, c.tol("weight", 1e-6)),
        );
    }
    Ok(out)
}

fn require_dim(grid: &Grid, d: usize, what: &str) -> Result<()> {
    if grid.dim() != d {
        return Err(Error::Dimension(format!("{what} needs d = {d}, got d = {}", grid.dim())));
    }
    Ok(())
}

fn hilbert_suite(c: &RunConfig) -> Result<SuiteOutput> {
    let grid = c.grid()?;
    require_dim(&grid, 1, "the hilbert suite")?;
    let l = grid.side_length();
    let mut out = SuiteOutput::new(c.suite);

    let mut err = 0.0f64;
    for k in [1usize, 3, 7, grid.points_per_axis() / 4] {
        let wave = |f: fn(f64) -> f64| {
            SampledField::from_fn(grid, Side::Physical, move |i| real(f(2.0 * PI * k as f64 * grid.position(i)[0] / l)))
        };
        err = err.max(max_abs_diff(&hilbert(&wave(f64::cos))?, &wave(f64::sin))?);
    }
    out.reports.push(
        CheckReport::new("hilbert-cosine", Some(&grid), c.seed).at_most(err, c.tol("closed_form", 1e-10)),
    );

    let members = c.members(&grid, EnsembleSpec::mixed(c.ensemble), 0)?;
    let mut worst = Worst::new();
    for m in &members {
        let f = remove_mean(&m.field)?;
        let hh = hilbert(&hilbert(&f)?)?;
        worst.push(max_abs_diff(&hh, &f.scale(real(-1.0)))? / f.max_abs().max(1.0), &m.id);
    }
    out.reports.push(
        CheckReport::new("hilbert-involution", Some(&grid), c.seed)
            .at_most(worst.value, c.tol("involution", 1e-10))
            .witness(worst.witness),
    );

    let mut worst = Worst::new();
    for i in 0..c.ensemble as u64 {
        let seed = derive_seed(c.seed, 500 + i);
        let psi = remove_mean(&generate(&grid, &GeneratorSpec::RandomBumps { seed, count: 4 })?)?;
        let h = hilbert(&psi)?;
        let lhs = h.mul(&h)?;
        let rhs = psi.mul(&psi)?.add(&hilbert(&psi.mul(&h)?)?.scale(real(2.0)))?;
        worst.push(max_abs_diff(&lhs, &rhs)? / psi.max_abs().powi(2), format!("random_bumps#{i}"));
    }
    out.reports.push(
        CheckReport::new("hilbert-square-identity", Some(&grid), c.seed)
            .param("fields", c.ensemble)
            .at_most(worst.value, c.tol("identity", 1e-8))
            .witness(worst.witness),
    );

    // the quadrature comparison runs on a 1024-point grid; the packets sit
    // between a quarter and a third of the way to Nyquist
    let fine = Grid::new(1, 1024, l)?;
    let mut r = seeded(derive_seed(c.seed, 900));
    let mut worst = Worst::new();
    for i in 0..5 {
        let k = r.random_range(0.25..0.35) * 1024.0;
        let f = generate(
            &fine,
            &GeneratorSpec::WavePacket { eps: 256.0 / (PI * l * l), frequency: vec![k / l] },
        )?;
        let diff = pv_hilbert_direct(&f, fine.spacing())?.sub(&hilbert(&f)?)?;
        worst.push(diff.lp_norm(2.0)? / f.lp_norm(2.0)?, format!("wave_packet#{i}(k={k:.1})"));
    }
    out.reports.push(
        CheckReport::new("hilbert-pv-quadrature", Some(&fine), c.seed)
            .param("cutoff", fine.spacing())
            .at_most(worst.value, c.tol("pv", 1e-3))
            .witness(worst.witness),
    );
    Ok(out)
}

fn riesz_suite(c: &RunConfig) -> Result<SuiteOutput> {
    let grid = c.grid()?;
    let members = c.members(&grid, EnsembleSpec::mixed(c.ensemble), 0)?;
    let mut identity = Worst::new();
    let mut bounded = Worst::new();
    for m in &members {
        let f = remove_mean(&m.field)?;
        let mut sum = SampledField::zeros(grid, Side::Physical);
        for axis in 0..grid.dim() {
            let rf = riesz(&f, axis)?;
            if f.lp_norm(2.0)? > 0.0 {
                bounded.push(rf.lp_norm(2.0)? / f.lp_norm(2.0)?, format!("{}@{axis}", m.id));
            }
            sum = sum.add(&riesz(&rf, axis)?)?;
        }
        identity.push(max_abs_diff(&sum, &f.scale(real(-1.0)))? / f.max_abs().max(1.0), &m.id);
    }
    let mut out = SuiteOutput::new(c.suite);
    out.reports.push(
        CheckReport::new("riesz-square-sum", Some(&grid), c.seed)
            .at_most(identity.value, c.tol("identity", 1e-10))
            .witness(identity.witness),
    );
    out.reports.push(
        CheckReport::new("riesz-l2-bound", Some(&grid), c.seed)
            .at_most(bounded.value, 1.0 + c.tol("slack", 1e-12))
            .witness(bounded.witness),
    );
    Ok(out)
}

const MOLLIFIER_INDICES: [u32; 4] = [4, 8, 16, 32];

fn mollify_suite(c: &RunConfig) -> Result<SuiteOutput> {
    // ρ_32 needs a spacing of at most 1/128 to be resolved
    let l = c.length;
    let needed = ((128.0 * l).ceil() as usize).next_power_of_two();
    let n = c.n.max(needed);
    if (n as f64).powi(c.d as i32) > (1u64 << 22) as f64 {
        return Err(invalid(format!(
            "resolving the mollifier ρ_32 on L = {l} needs n ≥ {needed}, too large in d = {}",
            c.d
        )));
    }
    let grid = Grid::new(c.d, n, l)?;
    let tent = generate(&grid, &GeneratorSpec::Tent { cube: AxisBox::centered(&grid, l / 8.0), delta: 0.5 })?;
    let gauss = generate(&grid, &GeneratorSpec::Gaussian { eps: 1.0 })?;
    let mut out = SuiteOutput::new(c.suite);
    let mut table = String::from("input,index,l2_error,sup_error\n");
    for (name, f) in [("tent", &tent), ("gaussian", &gauss)] {
        let errs = approximation_errors(f, &MOLLIFIER_INDICES, 2.0)?;
        let worst = errs.windows(2).map(|w| w[1].1 / w[0].1).fold(0.0, f64::max);
        for (i, e) in &errs {
            let sup = mollify(f, *i)?.sub(f)?.max_abs();
            table.push_str(&format!("{name},{i},{e},{sup}\n"));
        }
        out.reports.push(
            CheckReport::new("mollify-decrease", Some(&grid), c.seed)
                .param("input", name)
                .param("indices", MOLLIFIER_INDICES.to_vec())
                .param("l2_errors", errs.iter().map(|e| e.1).collect::<Vec<_>>())
                .outcome(worst, 1.0, worst < 1.0),
        );
    }
    let sup = |i: u32| -> Result<f64> { Ok(mollify(&tent, i)?.sub(&tent)?.max_abs()) };
    let ratio = sup(16)? / sup(32)?;
    out.reports.push(
        CheckReport::new("mollify-tent-rate", Some(&grid), c.seed)
            .param("norm", "sup")
            .outcome(ratio, 2.5, (1.5..=2.5).contains(&ratio)),
    );
    out.tables.push(("mollify_errors.csv".into(), table));
    Ok(out)
}

fn bochner_riesz(c: &RunConfig) -> Result<SuiteOutput> {
    let grid = c.grid()?;
    let mut out = SuiteOutput::new(c.suite);
    let l = grid.side_length();
    let k = 3i64;
    let mut k_vec = vec![0i64; grid.dim()];
    k_vec[0] = k;
    let mode = generate(&grid, &GeneratorSpec::Mode { k: k_vec })?;
    let xi = k as f64 / l;
    let mut err = 0.0f64;
    for (radius, delta) in [(2.0 * xi, 0.5), (1.5 * xi, 2.5), (4.0 * xi, 0.0)] {
        let expect = (1.0 - xi * xi / (radius * radius)).powf(delta);
        err = err.max(max_abs_diff(&bochner_riesz_mean(&mode, radius, delta)?, &mode.scale(real(expect)))?);
    }
    out.reports.push(
        CheckReport::new("bochner-riesz-mode", Some(&grid), c.seed).at_most(err, c.tol("closed_form", 1e-12)),
    );
    let f = generate(&grid, &GeneratorSpec::Gaussian { eps: 1.0 })?;
    let radii = [0.5, 1.0, 2.0, 4.0];
    let errs: Vec<f64> = radii
        .iter()
        .map(|&r| Ok(bochner_riesz_mean(&f, r, 1.0)?.sub(&f)?.lp_norm(2.0)?))
        .collect::<Result<_>>()?;
    let worst = errs.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    out.reports.push(
        CheckReport::new("bochner-riesz-convergence", Some(&grid), c.seed)
            .param("radii", radii.to_vec())
            .param("delta", 1.0)
            .param("l2_errors", errs.clone())
            .outcome(worst, 1.0, worst < 1.0),
    );
    Ok(out)
}

fn whitney_suite(c: &RunConfig) -> Result<SuiteOutput> {
    let grid = c.grid()?;
    let depth = grid
        .dyadic_depth()
        .ok_or_else(|| Error::InvalidGrid(format!("whitney needs n a power of two, got {}", grid.points_per_axis())))?;
    let mut out = SuiteOutput::new(c.suite);
    let mut violations = 0usize;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut cubes_total = 0usize;
    let mut witness = String::new();
    for i in 0..c.ensemble {
        let mask = ClosedSetMask::random(grid, derive_seed(c.seed, i as u64));
        let w = whitney(&mask, depth)?;
        let audit = audit_whitney(&mask, &w)?;
        if audit.violations > 0 && witness.is_empty() {
            witness = format!("mask#{i}");
        }
        violations += audit.violations;
        cubes_total += w.cubes.len();
        if !w.cubes.is_empty() && mask.count() > 0 {
            lo = lo.min(audit.min_ratio);
            hi = hi.max(audit.max_ratio);
        }
        if i == 0 {
            out.tables.push(("whitney_cubes.csv".into(), cubes_to_csv(grid.dim(), &w.cubes)));
            if grid.dim() == 2 {
                out.svg = Some(cubes_to_svg(&grid, &w.cubes, Some(&mask), &w.residual)?);
            }
            out.reports.push(
                CheckReport::new("whitney-summary", Some(&grid), c.seed)
                    .param("mask", "mask#0")
                    .param("summary", cube_summary(&w.cubes, w.residual.len()))
                    .at_most(audit.violations as f64, 0.0),
            );
        }
    }
    let mut report = CheckReport::new("whitney", Some(&grid), c.seed)
        .param("masks", c.ensemble)
        .param("cubes", cubes_total)
        .param("min_dist_over_side", number(lo))
        .param("max_dist_over_side", hi)
        .at_most(violations as f64, 0.0);
    if !witness.is_empty() {
        report = report.witness(witness);
    }
    out.reports.push(report);
    Ok(out)
}

fn cz_suite(c: &RunConfig) -> Result<SuiteOutput> {
    let grid = c.grid()?;
    let mut violations = 0usize;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut cubes_total = 0usize;
    let mut witness = String::new();
    for i in 0..c.ensemble {
        let seed = derive_seed(c.seed, i as u64);
        let f = match i % 3 {
            0 => generate(&grid, &GeneratorSpec::RandomGaussian { seed })?.abs().map(|v| v * v * v),
            1 => generate(&grid, &GeneratorSpec::RandomBumps { seed, count: 3 })?.abs(),
            _ => generate(&grid, &GeneratorSpec::RandomTents { seed, count: 3 })?.abs(),
        };
        let f = f.map(|v| real(v.re));
        let alpha = 2.0 * f.mean().re;
        if alpha == 0.0 {
            continue;
        }
        let r = cz_decompose(&f, alpha)?;
        let audit = audit_cz(&f, &r)?;
        if audit.violations > 0 && witness.is_empty() {
            witness = format!("field#{i}");
        }
        violations += audit.violations;
        cubes_total += r.cubes.len();
        if !r.cubes.is_empty() {
            lo = lo.min(audit.min_ratio);
            hi = hi.max(audit.max_ratio);
        }
    }
    let mut report = CheckReport::new("cz", Some(&grid), c.seed)
        .param("fields", c.ensemble)
        .param("cubes", cubes_total)
        .param("min_average_over_alpha", number(lo))
        .param("max_average_over_alpha", hi)
        .at_most(violations as f64, 0.0);
    if !witness.is_empty() {
        report = report.witness(witness);
    }
    let mut out = SuiteOutput::new(c.suite);
    out.reports.push(report);
    Ok(out)
}

/// A grid small enough for the direct window scans.
fn scan_grid(c: &RunConfig) -> Result<Grid> {
    let cap = [256, 32, 8][c.d.clamp(1, 3) - 1];
    Grid::new(c.d, c.n.min(cap), c.length)
}

fn maximal_suite(c: &RunConfig) -> Result<SuiteOutput> {
    let grid = c.grid()?;
    let small = scan_grid(c)?;
    let d = grid.dim() as i32;
    let mut out = SuiteOutput::new(c.suite);

    let small_members = c.members(&small, EnsembleSpec::mixed(c.ensemble), 1)?;
    let mut routes = Worst::new();
    let mut pointwise = Worst::new();
    let mut norms: Vec<Worst> = (0..3).map(|_| Worst::new()).collect();
    let ps = [1.5, 2.0, 4.0];
    for (i, m) in small_members.iter().enumerate() {
        let mf = hl_maximal(&m.field)?;
        let sharp = sharp_maximal(&m.field)?;
        if i < 10 {
            let direct = hl_maximal_direct(&m.field)?;
            let diff = mf.values().iter().zip(direct.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            routes.push(diff / m.field.max_abs().max(1.0), &m.id);
        }
        let excess = sharp
            .values()
            .iter()
            .zip(mf.values())
            .map(|(s, m)| s - 2.0 * m)
            .fold(f64::NEG_INFINITY, f64::max);
        pointwise.push(excess, &m.id);
        for (w, &p) in norms.iter_mut().zip(&ps) {
            let denom = mf.lp_norm(p)?;
            if denom > 0.0 {
                w.push(sharp.lp_norm(p)? / denom, &m.id);
            }
        }
    }
    out.reports.push(
        CheckReport::new("maximal-routes", Some(&small), c.seed)
            .at_most(routes.value, c.tol("routes", 1e-12))
            .witness(routes.witness),
    );
    out.reports.push(
        CheckReport::new("sharp-pointwise", Some(&small), c.seed)
            .param("statement", "max over cells of f# - 2 Mf")
            .at_most(pointwise.value, 0.0)
            .witness(pointwise.witness),
    );
    for (w, p) in norms.into_iter().zip(ps) {
        out.reports.push(
            CheckReport::new("sharp-norm", Some(&small), c.seed)
                .param("p", p)
                .param("statement", "max over fields of ||f#||_p / ||Mf||_p")
                .at_most(w.value, 1.0)
                .witness(w.witness),
        );
    }

    let members = c.members(&grid, EnsembleSpec::mixed(c.ensemble), 0)?;
    let weak = weak_norm(&maximal_operator(), 1.0, 1.0, &members)?;
    let mut report = CheckReport::new("maximal-weak-type", Some(&grid), c.seed)
        .param("p", 1.0)
        .at_most(weak.value, c.tol("weak", 3f64.powi(d)))
        .witness(weak.witness);
    if grid.dim() == 1 {
        let h = OperatorHandle::new("hilbert", hilbert);
        report.set_param("hilbert_weak_1_1", weak_norm(&h, 1.0, 1.0, &members)?.value);
    }
    out.reports.push(report);
    let id = weak_norm(&OperatorHandle::identity(), 2.0, 2.0, &members)?;
    out.reports.push(
        CheckReport::new("weak-identity", Some(&grid), c.seed)
            .param("p", 2.0)
            .at_most(id.value, 1.0 + 1e-12)
            .witness(id.witness),
    );
    for p in ps {
        // Marcinkiewicz between weak (1,1) with constant 3^d and (∞,∞) with constant 1
        let bound = 2.0 * (3f64.powi(d) * p / (p - 1.0)).powf(1.0 / p);
        let mut w = Worst::new();
        for m in &members {
            let denom = m.field.lp_norm(p)?;
            if denom > 0.0 {
                w.push(hl_maximal(&m.field)?.lp_norm(p)? / denom, &m.id);
            }
        }
        out.reports.push(
            CheckReport::new("maximal-strong-type", Some(&grid), c.seed)
                .param("p", p)
                .at_most(w.value, bound)
                .witness(w.witness),
        );
    }
    let first = &members[0].field;
    let mf = hl_maximal(first)?;
    let profile = DistributionProfile::exact(&grid, mf.values());
    out.tables.push(("maximal_distribution.csv".into(), profile.to_csv()));
    Ok(out)
}

fn bmo_suite(c: &RunConfig) -> Result<SuiteOutput> {
    let grid = c.grid()?;
    let l = grid.side_length();
    let mut out = SuiteOutput::new(c.suite);
    let half = SampledField::from_fn(grid, Side::Physical, |i| real(if grid.position(i)[0] < l / 2.0 { 1.0 } else { 0.0 }));
    let b = bmo_norm(&half)?;
    out.reports.push(
        CheckReport::new("bmo-half-indicator", Some(&grid), c.seed)
            .param("bmo", b)
            .at_most((b - 0.5).abs(), c.tol("exact", 0.0)),
    );
    let constant = bmo_norm(&SampledField::constant(grid, real(2.5)))?;
    out.reports.push(CheckReport::new("bmo-constant", Some(&grid), c.seed).at_most(constant, c.tol("exact", 0.0)));
    let members = c.members(&grid, EnsembleSpec::mixed(c.ensemble), 0)?;
    let mut shift = Worst::new();
    let mut sup = Worst::new();
    for m in &members {
        let base = bmo_norm(&m.field)?;
        let moved = bmo_norm(&m.field.map(|v| v + 3.0))?;
        shift.push((moved - base).abs() / base.max(1e-300).max(m.field.max_abs()), &m.id);
        if m.field.max_abs() > 0.0 {
            sup.push(base / (2.0 * m.field.max_abs()), &m.id);
        }
    }
    out.reports.push(
        CheckReport::new("bmo-shift-invariance", Some(&grid), c.seed)
            .at_most(shift.value, c.tol("shift", 1e-12))
            .witness(shift.witness),
    );
    out.reports.push(
        CheckReport::new("bmo-sup-bound", Some(&grid), c.seed)
            .param("statement", "bmo(f) / (2 ||f||_inf)")
            .at_most(sup.value, 1.0)
            .witness(sup.witness),
    );
    Ok(out)
}

fn atoms_suite(c: &RunConfig) -> Result<SuiteOutput> {
    let grid = c.grid()?;
    let l = grid.side_length();
    let h = grid.spacing();
    let slack = c.tol("slack", 1e-12);
    let mut r = seeded(derive_seed(c.seed, 0));
    let mut failed = Vec::new();
    let mut worst_l1 = Worst::new();
    let mut hilbert_l1 = 0.0f64;
    let mut balls = Vec::new();
    for i in 0..c.ensemble {
        let center: Vec<f64> = (0..grid.dim()).map(|_| r.random_range(0.3 * l..0.7 * l)).collect();
        let radius = r.random_range(2.0 * h..(l / 8.0).max(2.5 * h));
        let seed = derive_seed(c.seed, 1 + i as u64);
        let rep = atom_experiment(&grid, &center, radius, seed)?;
        if !rep.pass {
            failed.push(i);
        }
        worst_l1.push(rep.measured, format!("atom#{i}"));
        if let Some(v) = rep.params.get("hilbert_l1").and_then(Value::as_f64) {
            hilbert_l1 = hilbert_l1.max(v);
        }
        balls.push((center, radius, seed));
    }
    let mut out = SuiteOutput::new(c.suite);
    let mut report = CheckReport::new("atoms", Some(&grid), c.seed)
        .param("atoms", c.ensemble)
        .param("failed", failed.len())
        .outcome(worst_l1.value, 1.0 + slack, failed.is_empty())
        .witness(worst_l1.witness);
    if grid.dim() == 1 {
        report.set_param("hilbert_l1_max", hilbert_l1);
    }
    out.reports.push(report);

    let mut worst = Worst::new();
    for (j, chunk) in balls.chunks(5).enumerate() {
        let mut sum = SampledField::zeros(grid, Side::Physical);
        let mut total = 0.0;
        for (k, (center, radius, seed)) in chunk.iter().enumerate() {
            let lambda = if k % 2 == 0 { 1.0 } else { -0.5 } * (k + 1) as f64;
            sum = sum.add(&random_atom(&grid, center, *radius, *seed)?.scale(real(lambda)))?;
            total += lambda.abs();
        }
        worst.push(sum.lp_norm(1.0)? / total, format!("sum#{j}"));
    }
    out.reports.push(
        CheckReport::new("atomic-sum", Some(&grid), c.seed)
            .param("statement", "||sum lambda a||_1 / sum |lambda|")
            .at_most(worst.value, 1.0 + slack)
            .witness(worst.witness),
    );
    Ok(out)
}

fn sobolev_suite(c: &RunConfig) -> Result<SuiteOutput> {
    let grid = c.grid()?;
    let members = c.members(&grid, EnsembleSpec::mixed(c.ensemble), 0)?;
    let pairs = [(0.0, 2.0), (1.0, 3.0), (-1.0, 1.0)];
    let mut worst = Worst::new();
    for m in &members {
        for &(s0, s1) in &pairs {
            let a = sobolev_norm(&m.field, s0)?;
            let b = sobolev_norm(&m.field, s1)?;
            if a * b > 0.0 {
                let mid = sobolev_norm(&m.field, (s0 + s1) / 2.0)?;
                worst.push(mid * mid / (a * b) - 1.0, format!("{}@({s0},{s1})", m.id));
            }
        }
    }
    let mut out = SuiteOutput::new(c.suite);
    out.reports.push(
        CheckReport::new("sobolev-log-convexity", Some(&grid), c.seed)
            .param("pairs", pairs.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>())
            .at_most(worst.value, c.tol("convexity", 1e-12))
            .witness(worst.witness),
    );
    let l = grid.side_length();
    let mut k = vec![0i64; grid.dim()];
    k[0] = 5;
    let mode = generate(&grid, &GeneratorSpec::Mode { k })?;
    let unit = mode.scale(real(grid.volume().powf(-0.5)));
    let xi = 5.0 / l;
    let mut err = 0.0f64;
    for s in [-1.0, 0.5, 2.0] {
        let expect = (1.0 + xi * xi).powf(s / 2.0);
        err = err.max((sobolev_norm(&unit, s)? / expect - 1.0).abs());
    }
    out.reports.push(
        CheckReport::new("sobolev-mode", Some(&grid), c.seed).at_most(err, c.tol("closed_form", 1e-12)),
    );
    Ok(out)
}

fn stein_suite(c: &RunConfig) -> Result<SuiteOutput> {
    let grid = c.grid()?;
    let t = c.t.unwrap_or(1.0);
    let members = c.members(&grid, EnsembleSpec::mixed(c.ensemble), 0)?;
    let top = (grid.dim() + 1) as f64;
    let mut zs = Vec::new();
    for re in [0.0, top / 2.0, top] {
        for im in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            zs.push(Complex64::new(re, im));
        }
    }
    let pairs = [(2.0, 2.0), (4.0 / 3.0, 4.0), (1.0, f64::INFINITY)];
    let scan = stein_family_scan(&grid, t, &zs, &pairs, &members, c.seed)?;
    let mut out = SuiteOutput::new(c.suite);
    let mut rep = scan.report.clone();
    let m = rep.measured;
    rep = rep.at_most(m, c.tol("spread", 10.0));
    out.reports.push(rep);
    out.tables.push(("stein_family.csv".into(), scan.to_csv()));
    let thetas = c.theta.map_or(vec![0.25, 0.5, 0.75], |th| vec![th]);
    let mut r = stein_interpolation_check(&grid, t, &thetas, &[-2.0, 0.0, 2.0], &members, c.seed)?;
    let m = r.measured;
    r = r.at_most(m, 1.0 + c.tol("slack", 1e-6));
    out.reports.push(r);
    let p_of = |p: f64| number(p);
    out.reports[0].set_param("pairs", pairs.iter().map(|&(p, q)| json!([p_of(p), p_of(q)])).collect::<Vec<_>>());
    Ok(out)
}

fn band_limited(grid: &Grid, seed: u64) -> Result<SampledField> {
    let f = generate(grid, &GeneratorSpec::RandomGaussian { seed })?;
    let smooth = apply_multiplier(&f, &Symbol::BochnerRiesz { radius: grid.nyquist() / 4.0, delta: 2.0 })?;
    Ok(smooth.map(|v| real(v.re)))
}

fn wave_suite(c: &RunConfig) -> Result<SuiteOutput> {
    let grid = c.grid()?;
    let l = grid.side_length();
    let k = 3.0;
    let w = 2.0 * PI * k / l;
    let standing = SampledField::from_fn(grid, Side::Physical, |i| real((w * grid.position(i)[0]).cos()));
    let zero = SampledField::zeros(grid, Side::Physical);
    let rest = WaveData::new(standing.clone(), zero.clone())?;
    let kick = WaveData::new(zero, standing.clone())?;
    let mut err = 0.0f64;
    for t in [0.3, 1.7, 5.0, c.t.unwrap_or(1.0)] {
        err = err.max(max_abs_diff(&wave_evolve(&rest, t)?, &standing.scale(real((w * t).cos())))?);
        err = err.max(max_abs_diff(&wave_evolve(&kick, t)?, &standing.scale(real((w * t).sin() / w)))?);
    }
    let mut out = SuiteOutput::new(c.suite);
    out.reports.push(
        CheckReport::new("wave-standing", Some(&grid), c.seed)
            .param("k", k)
            .at_most(err, c.tol("closed_form", 1e-10)),
    );

    let count = c.ensemble.min(10) as u64;
    let mut drift = Worst::new();
    let mut order = Worst::new();
    let mut lo_ratio = f64::INFINITY;
    let mut hi_ratio = 0.0f64;
    let t0 = c.t.unwrap_or(1.0);
    for i in 0..count {
        let data = WaveData::new(
            band_limited(&grid, derive_seed(c.seed, 2 * i))?,
            band_limited(&grid, derive_seed(c.seed, 2 * i + 1))?,
        )?;
        let e0 = wave_energy(&data, 0.0)?;
        for t in [0.5, 1.0, 2.0, 5.0, 10.0] {
            drift.push((wave_energy(&data, t)? - e0).abs() / e0, format!("data#{i}@t={t}"));
        }
        let ratio = dalembertian_residual(&data, t0, 1e-2)? / dalembertian_residual(&data, t0, 5e-3)?;
        lo_ratio = lo_ratio.min(ratio);
        hi_ratio = hi_ratio.max(ratio);
        order.push((ratio - 4.0).abs(), format!("data#{i}"));
        if i == 0 {
            out.tables.push(("wave_trajectory.csv".into(), trajectory_csv(&data, &[0.0, 0.5, 1.0, 2.0])?));
        }
    }
    out.reports.push(
        CheckReport::new("wave-energy", Some(&grid), c.seed)
            .param("data", count)
            .at_most(drift.value, c.tol("energy", 1e-9))
            .witness(drift.witness),
    );
    out.reports.push(
        CheckReport::new("wave-residual-order", Some(&grid), c.seed)
            .param("t", t0)
            .param("dt", json!([1e-2, 5e-3]))
            .param("min_ratio", lo_ratio)
            .param("max_ratio", hi_ratio)
            .outcome(order.value, 0.5, lo_ratio >= 3.5 && hi_ratio <= 4.5)
            .witness(order.witness),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        assert_eq!(SuiteName::ALL.len(), 19);
        for &s in SuiteName::ALL {
            assert_eq!(s.as_str().parse::<SuiteName>().unwrap(), s);
            assert_eq!(serde_json::to_value(s).unwrap(), s.as_str());
        }
        assert!("nope".parse::<SuiteName>().is_err());
        assert_eq!("both".parse::<Format>().unwrap(), Format::Both);
        assert!("xml".parse::<Format>().is_err());
        assert_eq!("serial".parse::<Parallelism>().unwrap(), Parallelism::Serial);
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig::new(SuiteName::GaussFt);
        assert!(c.validate().is_ok());
        c.tol.insert("bogus".into(), 1.0);
        assert!(c.validate().is_err());
        let mut c = RunConfig::new(SuiteName::GaussFt);
        c.n = 7;
        assert!(c.validate().is_err());
        let mut c = RunConfig::new(SuiteName::Hirschman);
        c.theta = Some(1.0);
        assert!(c.validate().is_err());
        let mut c = RunConfig::new(SuiteName::Hilbert);
        c.d = 2;
        c.n = 32;
        assert!(run(&c).is_err());
    }

    #[test]
    fn small_suites_pass_and_embed_config() {
        for suite in [SuiteName::GaussFt, SuiteName::Hirschman, SuiteName::Sobolev, SuiteName::Bmo] {
            let mut c = RunConfig::new(suite);
            c.ensemble = 8;
            let out = run(&c).unwrap();
            assert!(out.passed(), "{}", out.summary_json());
            for r in &out.reports {
                assert_eq!(r.params["config"]["suite"], suite.as_str());
            }
        }
    }

    #[test]
    fn serial_and_auto_agree() {
        let mut c = RunConfig::new(SuiteName::Plancherel);
        c.ensemble = 12;
        c.parallelism = Parallelism::Serial;
        let a = run(&c).unwrap();
        c.parallelism = Parallelism::Auto;
        let b = run(&c).unwrap();
        assert_eq!(a.reports.len(), b.reports.len());
        for (x, y) in a.reports.iter().zip(&b.reports) {
            assert_eq!(x.measured.to_bits(), y.measured.to_bits());
        }
    }

    #[test]
    fn writes_selected_formats() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = RunConfig::new(SuiteName::Whitney);
        c.d = 2;
        c.n = 32;
        c.ensemble = 3;
        let out = run(&c).unwrap();
        assert!(out.passed());
        let files = out.write(dir.path(), Format::Both).unwrap();
        let names: Vec<String> = files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
        assert!(names.contains(&"whitney.json".to_string()));
        assert!(names.contains(&"whitney.csv".to_string()));
        assert!(names.contains(&"whitney_cubes.csv".to_string()));
        assert!(names.contains(&"whitney.svg".to_string()));
        let only_json = tempfile::tempdir().unwrap();
        let files = out.write(only_json.path(), Format::Json).unwrap();
        assert_eq!(files.len(), 2);
    }
}
