//! Hardy–Littlewood and sharp maximal functions over centred cube windows,
//! distribution functions, weak-type constants, dyadic BMO and H¹ atoms.
//!
//! Windows are the periodic cubes of odd side `2r + 1` cells centred on a
//! cell, for `r = 0, …, n/2 − 1`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng as _;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::grid::generate::{atom_cells, atom_from_values};
use crate::grid::{pairwise_sum, Grid, SampledField, Side};
use crate::interp::{Member, NormEstimate, OperatorHandle};
use crate::operators::hilbert;
use crate::report::CheckReport;
use crate::rng::seeded;

#[derive(Debug, Clone, PartialEq)]
pub struct MaximalField {
    grid: Grid,
    values: Vec<f64>,
}

impl MaximalField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest window radius in cells; window sides are `1, 3, …, 2R + 1`.
    pub fn max_radius(&self) -> usize {
        self.grid.points_per_axis() / 2 - 1
    }

    pub fn to_field(&self) -> SampledField {
        SampledField::from_fn(self.grid, Side::Physical, |i| Complex64::new(self.values[i], 0.0))
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        self.to_field().lp_norm(p)
    }
}

fn max_radius(grid: &Grid) -> usize {
    grid.points_per_axis() / 2 - 1
}

/// Periodic window sums of radius `r` along `axis`, via prefix sums over
/// the line extended by one period on each side.
fn window_sum_axis(grid: &Grid, values: &[f64], axis: usize, r: usize) -> Vec<f64> {
    let n = grid.points_per_axis();
    let stride = n.pow((grid.dim() - 1 - axis) as u32);
    let mut out = vec![0.0; values.len()];
    let mut prefix = vec![0.0; 3 * n + 1];
    for start in 0..values.len() {
        if (start / stride) % n != 0 {
            continue;
        }
        for i in 0..3 * n {
            prefix[i + 1] = prefix[i] + values[start + (i % n) * stride];
        }
        for x in 0..n {
            out[start + x * stride] = prefix[n + x + r + 1] - prefix[n + x - r];
        }
    }
    out
}

fn window_means(grid: &Grid, values: &[f64], r: usize) -> Vec<f64> {
    let mut acc = values.to_vec();
    for axis in 0..grid.dim() {
        acc = window_sum_axis(grid, &acc, axis, r);
    }
    let count = ((2 * r + 1) as f64).powi(grid.dim() as i32);
    acc.iter().map(|s| s / count).collect()
}

fn elementwise_max(mut a: Vec<f64>, b: Vec<f64>) -> Vec<f64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x = x.max(y);
    }
    a
}

/// `Mf(x) = max_r (mean of |f| over the window of radius r at x)`,
/// computed with separable prefix sums.
pub fn hl_maximal(field: &SampledField) -> Result<MaximalField> {
    field.require_side(Side::Physical)?;
    let grid = *field.grid();
    let abs: Vec<f64> = field.values().iter().map(|v| v.norm()).collect();
    let values = (0..=max_radius(&grid))
        .into_par_iter()
        .map(|r| window_means(&grid, &abs, r))
        .reduce(|| vec![0.0; abs.len()], elementwise_max);
    Ok(MaximalField { grid, values })
}

/// Cells of the window of radius `r` centred at `flat`.
fn window_cells(grid: &Grid, flat: usize, r: usize) -> Vec<usize> {
    let n = grid.points_per_axis();
    let d = grid.dim();
    let c = grid.unravel(flat);
    let w = 2 * r + 1;
    let mut out = Vec::with_capacity(w.pow(d as u32));
    let mut local = [0usize; 3];
    loop {
        let mut idx = [0usize; 3];
        for a in 0..d {
            idx[a] = (c[a] + n - r + local[a]) % n;
        }
        out.push(grid.ravel(&idx[..d]));
        let mut a = d;
        loop {
            if a == 0 {
                return out;
            }
            a -= 1;
            local[a] += 1;
            if local[a] < w {
                break;
            }
            local[a] = 0;
        }
    }
}

/// The same maximal function by scanning every window cell by cell.
pub fn hl_maximal_direct(field: &SampledField) -> Result<MaximalField> {
    field.require_side(Side::Physical)?;
    let grid = *field.grid();
    let values = (0..grid.total_points())
        .into_par_iter()
        .map(|x| {
            (0..=max_radius(&grid))
                .map(|r| {
                    let cells = window_cells(&grid, x, r);
                    cells.iter().map(|&c| field.values()[c].norm()).sum::<f64>() / cells.len() as f64
                })
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(MaximalField { grid, values })
}

/// `f♯(x) = max_r (mean of |f − f_W| over the window W of radius r at x)`.
pub fn sharp_maximal(field: &SampledField) -> Result<MaximalField> {
    field.require_side(Side::Physical)?;
    let grid = *field.grid();
    let vals = field.values();
    let values = (0..grid.total_points())
        .into_par_iter()
        .map(|x| {
            let mut best = 0.0f64;
            for r in 0..=max_radius(&grid) {
                let cells = window_cells(&grid, x, r);
                let k = cells.len() as f64;
                let mean = cells.iter().map(|&c| vals[c]).sum::<Complex64>() / k;
                let osc = cells.iter().map(|&c| (vals[c] - mean).norm()).sum::<f64>() / k;
                best = best.max(osc);
            }
            best
        })
        .collect();
    Ok(MaximalField { grid, values })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionProfile {
    pub alphas: Vec<f64>,
    pub measures: Vec<f64>,
}

impl DistributionProfile {
    /// `|{v > α}|` for each threshold, as cell count times cell volume.
    pub fn new(grid: &Grid, values: &[f64], alphas: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let measures = alphas
            .iter()
            .map(|&a| {
                let at_most = sorted.partition_point(|&v| v <= a);
                (sorted.len() - at_most) as f64 * grid.cell_volume()
            })
            .collect();
        Self { alphas: alphas.to_vec(), measures }
    }

    /// Thresholds at the distinct values, taken just below each value so
    /// the measure counts the value itself.
    pub fn exact(grid: &Grid, values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let mut alphas = Vec::new();
        let mut measures = Vec::new();
        let mut i = 0;
        while i < sorted.len() {
            let v = sorted[i];
            while i < sorted.len() && sorted[i] == v {
                i += 1;
            }
            if v > 0.0 {
                alphas.push(v);
                measures.push(i as f64 * grid.cell_volume());
            }
        }
        Self { alphas, measures }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("alpha,measure\n");
        for (a, m) in self.alphas.iter().zip(&self.measures) {
            let _ = writeln!(s, "{a},{m}");
        }
        s
    }
}

/// `sup_α α |{|g| > α}|^{1/q}`, attained in the limit as `α` rises to one
/// of the values of `|g|`.
pub fn weak_quasinorm(field: &SampledField, q: f64) -> Result<f64> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(invalid(format!("weak exponent q = {q} must be finite and ≥ 1")));
    }
    let abs: Vec<f64> = field.values().iter().map(|v| v.norm()).collect();
    let prof = DistributionProfile::exact(field.grid(), &abs);
    Ok(prof
        .alphas
        .iter()
        .zip(&prof.measures)
        .map(|(a, m)| a * m.powf(1.0 / q))
        .fold(0.0, f64::max))
}

/// Measured weak `(p, q)` constant of `op`: the largest
/// `‖Tf‖_{q,∞} / ‖f‖_p` over the ensemble.
pub fn weak_norm(op: &OperatorHandle, p: f64, q: f64, members: &[Member]) -> Result<NormEstimate> {
    if members.is_empty() {
        return Err(invalid("ensemble must be nonempty"));
    }
    let ratios: Result<Vec<Option<(String, f64)>>> = members
        .par_iter()
        .map(|m| {
            let wrap = |e: Error| Error::Member { id: m.id.clone(), source: Box::new(e) };
            let denom = m.field.lp_norm(p).map_err(wrap)?;
            if denom == 0.0 {
                return Ok(None);
            }
            let tf = op.apply(&m.field).map_err(wrap)?;
            Ok(Some((m.id.clone(), weak_quasinorm(&tf, q).map_err(wrap)? / denom)))
        })
        .collect();
    let mut best: Option<NormEstimate> = None;
    for (id, v) in ratios?.into_iter().flatten() {
        if best.as_ref().map_or(true, |b| v > b.value) {
            best = Some(NormEstimate { value: v, witness: id });
        }
    }
    best.ok_or_else(|| invalid("ensemble has only zero fields"))
}

/// The Hardy–Littlewood maximal operator as an operator handle.
pub fn maximal_operator() -> OperatorHandle {
    OperatorHandle::new("hl_maximal", |f| Ok(hl_maximal(f)?.to_field()))
}

/// Supremum over all dyadic cubes, the root included, of the mean
/// oscillation `(1/|Q|)∫_Q |f − f_Q|`.
pub fn bmo_norm(field: &SampledField) -> Result<f64> {
    field.require_side(Side::Physical)?;
    let grid = *field.grid();
    let depth = grid
        .dyadic_depth()
        .ok_or_else(|| Error::InvalidGrid("dyadic BMO needs n a power of two".into()))?;
    let n = grid.points_per_axis();
    let d = grid.dim();
    let vals = field.values();
    let best = (0..=depth)
        .into_par_iter()
        .map(|g| {
            let side = 1usize << g;
            let w = n / side;
            let cubes = side.pow(d as u32);
            let owner = |flat: usize| {
                let idx = grid.unravel(flat);
                (0..d).fold(0, |acc, a| acc * side + idx[a] / w)
            };
            let mut sums = vec![Complex64::new(0.0, 0.0); cubes];
            for (i, v) in vals.iter().enumerate() {
                sums[owner(i)] += v;
            }
            let k = w.pow(d as u32) as f64;
            let means: Vec<Complex64> = sums.iter().map(|s| s / k).collect();
            let mut osc = vec![0.0; cubes];
            for (i, v) in vals.iter().enumerate() {
                let o = owner(i);
                osc[o] += (v - means[o]).norm();
            }
            osc.iter().map(|s| s / k).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// Draws a random H¹ atom on the ball and checks `∫a = 0`,
/// `‖a‖_∞ ≤ 1/|B|` and `‖a‖₁ ≤ 1`. On one-dimensional grids `‖Ha‖₁` is
/// reported as well.
pub fn atom_experiment(grid: &Grid, center: &[f64], radius: f64, seed: u64) -> Result<CheckReport> {
    let a = random_atom(grid, center, radius, seed)?;
    let cells = atom_cells(grid, center, radius)?;
    let ball = cells.len() as f64 * grid.cell_volume();
    let integral = pairwise_sum(&a.real_parts()) * grid.cell_volume();
    let sup = a.max_abs();
    let l1 = a.lp_norm(1.0)?;
    let pass = integral.abs() <= 1e-12 && sup <= (1.0 + 1e-12) / ball && l1 <= 1.0 + 1e-12;
    let mut report = CheckReport::new("atoms", Some(grid), seed)
        .param("center", center.to_vec())
        .param("radius", radius)
        .param("ball_measure", ball)
        .param("integral", integral)
        .param("sup", sup)
        .outcome(l1, 1.0, pass);
    if grid.dim() == 1 {
        report.set_param("hilbert_l1", hilbert(&a)?.lp_norm(1.0)?);
    }
    Ok(report)
}

/// Random atom on the ball: uniform values, mean removed, peak scaled to
/// `1/|B|`.
pub fn random_atom(grid: &Grid, center: &[f64], radius: f64, seed: u64) -> Result<SampledField> {
    let cells = atom_cells(grid, center, radius)?;
    let mut r = seeded(seed);
    let raw: Vec<f64> = cells.iter().map(|_| r.random_range(-1.0..1.0)).collect();
    atom_from_values(grid, &cells, &raw)
}
