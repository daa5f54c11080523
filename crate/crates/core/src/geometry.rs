//! Dyadic cubes, Whitney decompositions of open sets and the
//! Calderón–Zygmund stopping-time decomposition.
//!
//! A cube of generation `g` has side `L/2^g`; on a grid with `n = 2^G`
//! points per axis it covers `n/2^g` cells per axis, so generation `G` cubes
//! are single cells. All distances use the sup metric on cell centres.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::grid::{Grid, SampledField, Side};
use crate::rng::seeded;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    pub generation: u32,
    pub index: Vec<usize>,
}

impl DyadicCube {
    pub fn new(generation: u32, index: Vec<usize>) -> Self {
        Self { generation, index }
    }

    pub fn root(dim: usize) -> Self {
        Self::new(0, vec![0; dim])
    }

    /// Side length `L/2^g`, which is also the sup-metric diameter.
    pub fn side(&self, grid: &Grid) -> f64 {
        grid.side_length() / f64::from(1u32 << self.generation)
    }

    /// Euclidean diameter `√d · L/2^g`.
    pub fn diameter(&self, grid: &Grid) -> f64 {
        (self.index.len() as f64).sqrt() * self.side(grid)
    }

    /// Side in cells on a grid of depth `depth`.
    pub fn cells_per_axis(&self, depth: u32) -> usize {
        1usize << (depth - self.generation)
    }

    pub fn children(&self) -> Vec<DyadicCube> {
        let d = self.index.len();
        (0..1usize << d)
            .map(|mask| {
                let index = self
                    .index
                    .iter()
                    .enumerate()
                    .map(|(a, &k)| 2 * k + ((mask >> (d - 1 - a)) & 1))
                    .collect();
                DyadicCube::new(self.generation + 1, index)
            })
            .collect()
    }

    pub fn contains(&self, other: &DyadicCube) -> bool {
        if other.generation < self.generation {
            return false;
        }
        let shift = other.generation - self.generation;
        self.index.iter().zip(&other.index).all(|(&a, &b)| b >> shift == a)
    }

    /// Whether the two cubes have disjoint interiors; dyadic cubes are
    /// otherwise nested.
    pub fn interiors_disjoint(&self, other: &DyadicCube) -> bool {
        !self.contains(other) && !other.contains(self)
    }

    /// Flat indices of the grid cells the cube covers.
    pub fn cells(&self, grid: &Grid) -> Vec<usize> {
        let depth = grid.dyadic_depth().expect("dyadic grid");
        let w = self.cells_per_axis(depth);
        let d = grid.dim();
        let mut out = Vec::with_capacity(w.pow(d as u32));
        let mut local = vec![0usize; d];
        loop {
            let idx: Vec<usize> = (0..d).map(|a| self.index[a] * w + local[a]).collect();
            out.push(grid.ravel(&idx));
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
}

fn depth_of(grid: &Grid) -> Result<u32> {
    grid.dyadic_depth()
        .ok_or_else(|| Error::InvalidGrid(format!("n = {} is not a power of two", grid.points_per_axis())))
}

/// Rasterised closed set `F` with its sup-metric distance field, measured
/// in cells between cell centres (`u32::MAX` when `F` is empty).
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedSetMask {
    grid: Grid,
    membership: Vec<bool>,
    distance: Vec<u32>,
}

/// Neighbour offsets of the sup-metric unit ball, excluding the origin.
fn king_moves(dim: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for code in 0..3usize.pow(dim as u32) {
        let mut c = code;
        let off: Vec<i64> = (0..dim)
            .map(|_| {
                let v = (c % 3) as i64 - 1;
                c /= 3;
                v
            })
            .collect();
        if off.iter().any(|&v| v != 0) {
            out.push(off);
        }
    }
    out
}

impl ClosedSetMask {
    pub fn new(grid: Grid, membership: Vec<bool>) -> Result<Self> {
        if membership.len() != grid.total_points() {
            return Err(invalid(format!(
                "mask has {} cells, grid has {}",
                membership.len(),
                grid.total_points()
            )));
        }
        let distance = Self::bfs(&grid, &membership);
        Ok(Self { grid, membership, distance })
    }

    pub fn from_fn(grid: Grid, f: impl FnMut(usize) -> bool) -> Self {
        let membership: Vec<bool> = (0..grid.total_points()).map(f).collect();
        let distance = Self::bfs(&grid, &membership);
        Self { grid, membership, distance }
    }

    fn bfs(grid: &Grid, membership: &[bool]) -> Vec<u32> {
        let n = grid.points_per_axis() as i64;
        let d = grid.dim();
        let moves = king_moves(d);
        let mut dist = vec![u32::MAX; membership.len()];
        let mut queue = VecDeque::new();
        for (i, &m) in membership.iter().enumerate() {
            if m {
                dist[i] = 0;
                queue.push_back(i);
            }
        }
        while let Some(c) = queue.pop_front() {
            let idx = grid.unravel(c);
            let next = dist[c] + 1;
            'moves: for off in &moves {
                let mut nb = [0usize; 3];
                for a in 0..d {
                    let v = idx[a] as i64 + off[a];
                    if v < 0 || v >= n {
                        continue 'moves;
                    }
                    nb[a] = v as usize;
                }
                let f = grid.ravel(&nb[..d]);
                if dist[f] == u32::MAX {
                    dist[f] = next;
                    queue.push_back(f);
                }
            }
        }
        dist
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn membership(&self) -> &[bool] {
        &self.membership
    }

    /// Distance in cells from each cell centre to the nearest centre in `F`.
    pub fn distance_cells(&self) -> &[u32] {
        &self.distance
    }

    /// Distance in length units, `∞` when `F` is empty.
    pub fn distance(&self, flat: usize) -> f64 {
        match self.distance[flat] {
            u32::MAX => f64::INFINITY,
            c => f64::from(c) * self.grid.spacing(),
        }
    }

    pub fn count(&self) -> usize {
        self.membership.iter().filter(|&&m| m).count()
    }

    /// Seeded mask: a few random boxes, discs and isolated points.
    pub fn random(grid: Grid, seed: u64) -> Self {
        let mut r = seeded(seed);
        let n = grid.points_per_axis();
        let d = grid.dim();
        let mut m = vec![false; grid.total_points()];
        let shapes = r.random_range(1..=5);
        for _ in 0..shapes {
            let kind = r.random_range(0..3);
            let c: Vec<usize> = (0..d).map(|_| r.random_range(0..n)).collect();
            let w = r.random_range(0..=n / 8);
            for (flat, cell) in m.iter_mut().enumerate() {
                let idx = grid.unravel(flat);
                let hit = match kind {
                    0 => (0..d).all(|a| idx[a].abs_diff(c[a]) <= w),
                    1 => {
                        let r2: usize = (0..d).map(|a| idx[a].abs_diff(c[a]).pow(2)).sum();
                        r2 <= w * w
                    }
                    _ => (0..d).all(|a| idx[a] == c[a]),
                };
                *cell |= hit;
            }
        }
        Self::from_fn(grid, |i| m[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WhitneyResult {
    pub cubes: Vec<DyadicCube>,
    /// Finest-generation cells outside `F` covered by no cube.
    pub residual: Vec<usize>,
}

/// Per-generation minima of a cell field, coarsest first.
fn min_pyramid(grid: &Grid, depth: u32, finest: &[u32]) -> Vec<Vec<u32>> {
    let d = grid.dim();
    let mut levels = vec![finest.to_vec()];
    for g in (0..depth).rev() {
        let side = 1usize << g;
        let prev = levels.last().unwrap();
        let mut cur = vec![u32::MAX; side.pow(d as u32)];
        let fine = 2 * side;
        for (i, &v) in prev.iter().enumerate() {
            let mut parent = 0;
            let mut rest = i;
            let mut stride = 1;
            for _ in 0..d {
                parent += ((rest % fine) / 2) * stride;
                rest /= fine;
                stride *= side;
            }
            cur[parent] = cur[parent].min(v);
        }
        levels.push(cur);
    }
    levels.reverse();
    levels
}

fn flat_at(side: usize, index: &[usize]) -> usize {
    index.iter().fold(0, |acc, &k| acc * side + k)
}

fn canonical(cubes: &mut [DyadicCube]) {
    cubes.sort();
}

/// Top-down Whitney decomposition of the complement of `F`.
///
/// A cube is admitted as soon as `dist(Q, F) ≥ side(Q)`, where `dist(Q, F)`
/// is the least centre distance from a cell of `Q` to `F`; its parent was
/// not admitted, so `dist(Q, F) < 4·side(Q)`. The root is admitted only
/// when `F` is empty.
pub fn whitney(mask: &ClosedSetMask, max_generation: u32) -> Result<WhitneyResult> {
    let grid = *mask.grid();
    let depth = depth_of(&grid)?;
    if max_generation > depth {
        return Err(invalid(format!("max_generation {max_generation} exceeds log2 n = {depth}")));
    }
    let d = grid.dim();
    let pyr = min_pyramid(&grid, depth, mask.distance_cells());
    let mut cubes = Vec::new();
    if pyr[0][0] == u32::MAX {
        cubes.push(DyadicCube::root(d));
        return Ok(WhitneyResult { cubes, residual: Vec::new() });
    }
    let mut stack = vec![DyadicCube::root(d)];
    let mut covered = vec![false; grid.total_points()];
    while let Some(q) = stack.pop() {
        for c in q.children() {
            if c.generation > max_generation {
                break;
            }
            let min = pyr[c.generation as usize][flat_at(1 << c.generation, &c.index)];
            let side_cells = c.cells_per_axis(depth) as u32;
            if min >= side_cells {
                for cell in c.cells(&grid) {
                    covered[cell] = true;
                }
                cubes.push(c);
            } else if c.generation < max_generation {
                stack.push(c);
            }
        }
    }
    canonical(&mut cubes);
    let residual = (0..grid.total_points())
        .filter(|&i| !covered[i] && !mask.membership()[i])
        .collect();
    Ok(WhitneyResult { cubes, residual })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CZResult {
    pub alpha: f64,
    pub cubes: Vec<DyadicCube>,
    pub good_cells: Vec<bool>,
}

/// Per-generation sums of a cell field, coarsest first.
pub(crate) fn sum_pyramid(grid: &Grid, depth: u32, finest: &[f64]) -> Vec<Vec<f64>> {
    let d = grid.dim();
    let mut levels = vec![finest.to_vec()];
    for g in (0..depth).rev() {
        let side = 1usize << g;
        let fine = 2 * side;
        let prev = levels.last().unwrap();
        let mut cur = vec![0.0; side.pow(d as u32)];
        // children are added in a fixed order so sums are reproducible
        for (p, slot) in cur.iter_mut().enumerate() {
            let mut pidx = vec![0usize; d];
            let mut rest = p;
            for a in (0..d).rev() {
                pidx[a] = rest % side;
                rest /= side;
            }
            let mut s = 0.0;
            for c in DyadicCube::new(g, pidx).children() {
                s += prev[flat_at(fine, &c.index)];
            }
            *slot = s;
        }
        levels.push(cur);
    }
    levels.reverse();
    levels
}

/// Calderón–Zygmund stopping time at height `alpha`.
///
/// Descends from the root, admitting each child whose average exceeds
/// `alpha`; single cells are admissible. Cells never admitted are good.
pub fn cz_decompose(field: &SampledField, alpha: f64) -> Result<CZResult> {
    field.require_side(Side::Physical)?;
    let grid = *field.grid();
    let depth = depth_of(&grid)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid(format!("alpha = {alpha} must be positive and finite")));
    }
    let mut vals = Vec::with_capacity(grid.total_points());
    for v in field.values() {
        if v.im.abs() > 1e-12 || !(v.re >= 0.0) {
            return Err(invalid(format!("value {v} is not nonnegative real")));
        }
        vals.push(v.re);
    }
    let d = grid.dim() as u32;
    let pyr = sum_pyramid(&grid, depth, &vals);
    let root_avg = pyr[0][0] / grid.total_points() as f64;
    if root_avg > alpha {
        return Err(invalid(format!("root average {root_avg} exceeds alpha = {alpha}")));
    }
    let mut cubes = Vec::new();
    let mut good = vec![true; grid.total_points()];
    let mut stack = vec![DyadicCube::root(grid.dim())];
    while let Some(q) = stack.pop() {
        if q.generation == depth {
            continue;
        }
        for c in q.children() {
            let count = (c.cells_per_axis(depth) as f64).powi(d as i32);
            let avg = pyr[c.generation as usize][flat_at(1 << c.generation, &c.index)] / count;
            if avg > alpha {
                for cell in c.cells(&grid) {
                    good[cell] = false;
                }
                cubes.push(c);
            } else {
                stack.push(c);
            }
        }
    }
    canonical(&mut cubes);
    Ok(CZResult { alpha, cubes, good_cells: good })
}

/// Summed-area table of a cell indicator with one zero guard layer per
/// axis, answering box counts by inclusion–exclusion.
struct BoxCounter {
    n: usize,
    dim: usize,
    table: Vec<u64>,
}

impl BoxCounter {
    fn new(grid: &Grid, cells: &[bool]) -> Self {
        let n = grid.points_per_axis();
        let dim = grid.dim();
        let m = n + 1;
        let mut table = vec![0u64; m.pow(dim as u32)];
        for (flat, &b) in cells.iter().enumerate() {
            if b {
                let idx = grid.unravel(flat);
                let t = (0..dim).fold(0, |acc, a| acc * m + idx[a] + 1);
                table[t] = 1;
            }
        }
        for axis in 0..dim {
            let stride = m.pow((dim - 1 - axis) as u32);
            for i in 0..table.len() {
                if (i / stride) % m != 0 {
                    table[i] += table[i - stride];
                }
            }
        }
        Self { n, dim, table }
    }

    /// Number of marked cells with `lo[a] ≤ idx[a] < hi[a]`, bounds clipped
    /// to the grid.
    fn count(&self, lo: &[i64], hi: &[i64]) -> u64 {
        let m = self.n + 1;
        let clip = |v: i64| v.clamp(0, self.n as i64) as usize;
        let mut total: i64 = 0;
        for corner in 0..1usize << self.dim {
            let mut t = 0;
            let mut sign = 1i64;
            for a in 0..self.dim {
                let upper = (corner >> a) & 1 == 1;
                let v = if upper { clip(hi[a]) } else { clip(lo[a]) };
                if !upper {
                    sign = -sign;
                }
                t = t * m + v;
            }
            total += sign * self.table[t] as i64;
        }
        total as u64
    }
}

/// Outcome of an independent audit of a decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Audit {
    pub violations: usize,
    /// Smallest and largest `dist(Q, F)/side(Q)` (Whitney) or
    /// `average/alpha` (Calderón–Zygmund) over the emitted cubes.
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Checks a Whitney result without the selection rule: every cube must
/// satisfy `side ≤ dist(Q, F) ≤ 4·side`, with the distance read off a
/// summed-area table of `F` by dilating `Q`, and cubes, residual and `F`
/// must partition the cells.
pub fn audit_whitney(mask: &ClosedSetMask, result: &WhitneyResult) -> Result<Audit> {
    let grid = *mask.grid();
    let depth = depth_of(&grid)?;
    let table = BoxCounter::new(&grid, mask.membership());
    let has_f = mask.count() > 0;
    let mut violations = 0;
    let (mut lo_ratio, mut hi_ratio) = (f64::INFINITY, 0.0f64);
    let mut owner = vec![0u32; grid.total_points()];
    for q in &result.cubes {
        let w = q.cells_per_axis(depth) as i64;
        let lo: Vec<i64> = q.index.iter().map(|&k| k as i64 * w).collect();
        let hits = |r: i64| {
            let a: Vec<i64> = lo.iter().map(|v| v - r).collect();
            let b: Vec<i64> = lo.iter().map(|v| v + w + r).collect();
            table.count(&a, &b) > 0
        };
        if has_f {
            // least r with F inside the r-dilate, found by bisection
            let (mut a, mut b) = (0i64, 2 * grid.points_per_axis() as i64);
            while a < b {
                let mid = (a + b) / 2;
                if hits(mid) {
                    b = mid;
                } else {
                    a = mid + 1;
                }
            }
            let ratio = a as f64 / w as f64;
            lo_ratio = lo_ratio.min(ratio);
            hi_ratio = hi_ratio.max(ratio);
            if !(a >= w && a <= 4 * w) {
                violations += 1;
            }
        } else if q.generation != 0 {
            violations += 1;
        }
        for c in q.cells(&grid) {
            owner[c] += 1;
        }
    }
    for &c in &result.residual {
        owner[c] += 1;
    }
    for (i, &m) in mask.membership().iter().enumerate() {
        if owner[i] + u32::from(m) != 1 {
            violations += 1;
        }
    }
    let mut sorted = result.cubes.clone();
    sorted.sort();
    if sorted != result.cubes {
        violations += 1;
    }
    Ok(Audit {
        violations,
        min_ratio: if result.cubes.is_empty() || !has_f { 0.0 } else { lo_ratio },
        max_ratio: hi_ratio,
    })
}

/// Checks a Calderón–Zygmund result by direct summation: every cube
/// average lies in `(α, 2^d α]`, every good cell is at most `α`, cubes and
/// good cells partition the grid and `Σ|Q| ≤ ‖f‖₁/α`, each up to a relative
/// `1e−12`.
pub fn audit_cz(field: &SampledField, result: &CZResult) -> Result<Audit> {
    const SLACK: f64 = 1e-12;
    let grid = *field.grid();
    let d = grid.dim() as i32;
    let alpha = result.alpha;
    let vals = field.real_parts();
    let mut violations = 0;
    let (mut lo_ratio, mut hi_ratio) = (f64::INFINITY, 0.0f64);
    let mut owner = vec![0u32; grid.total_points()];
    let mut measure = 0.0;
    for q in &result.cubes {
        let cells = q.cells(&grid);
        let local: Vec<f64> = cells.iter().map(|&c| vals[c]).collect();
        let avg = crate::grid::pairwise_sum(&local) / cells.len() as f64;
        let ratio = avg / alpha;
        lo_ratio = lo_ratio.min(ratio);
        hi_ratio = hi_ratio.max(ratio);
        if !(ratio > 1.0 - SLACK && ratio <= 2f64.powi(d) * (1.0 + SLACK)) {
            violations += 1;
        }
        for c in cells {
            owner[c] += 1;
        }
        measure += q.side(&grid).powi(d);
    }
    for (i, &good) in result.good_cells.iter().enumerate() {
        if owner[i] + u32::from(good) != 1 {
            violations += 1;
        }
        if good && vals[i] > alpha * (1.0 + SLACK) {
            violations += 1;
        }
    }
    if measure > field.lp_norm(1.0)? / alpha * (1.0 + SLACK) {
        violations += 1;
    }
    Ok(Audit {
        violations,
        min_ratio: if result.cubes.is_empty() { 0.0 } else { lo_ratio },
        max_ratio: hi_ratio,
    })
}

/// CSV rows `generation,k1,…,kd`.
pub fn cubes_to_csv(dim: usize, cubes: &[DyadicCube]) -> String {
    let mut s = String::from("generation");
    for a in 1..=dim {
        let _ = write!(s, ",k{a}");
    }
    s.push('\n');
    for c in cubes {
        let _ = write!(s, "{}", c.generation);
        for k in &c.index {
            let _ = write!(s, ",{k}");
        }
        s.push('\n');
    }
    s
}

/// `{count, min_gen, max_gen, residual_cells}`.
pub fn cube_summary(cubes: &[DyadicCube], residual_cells: usize) -> Value {
    json!({
        "count": cubes.len(),
        "min_gen": cubes.iter().map(|c| c.generation).min(),
        "max_gen": cubes.iter().map(|c| c.generation).max(),
        "residual_cells": residual_cells,
    })
}

/// SVG overlay of a 2D decomposition in grid-cell units: axis 0 runs to the
/// right, axis 1 downward. `F` cells are filled black, residual cells red.
pub fn cubes_to_svg(grid: &Grid, cubes: &[DyadicCube], mask: Option<&ClosedSetMask>, residual: &[usize]) -> Result<String> {
    if grid.dim() != 2 {
        return Err(Error::Dimension("SVG export needs a 2D grid".into()));
    }
    let depth = depth_of(grid)?;
    let n = grid.points_per_axis();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{n}" height="{n}" viewBox="0 0 {n} {n}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{n}" height="{n}" fill="white"/>"#);
    if let Some(m) = mask {
        for (i, _) in m.membership().iter().enumerate().filter(|(_, &b)| b) {
            let [x, y, _] = grid.unravel(i);
            let _ = writeln!(s, r#"<rect x="{x}" y="{y}" width="1" height="1" fill="black"/>"#);
        }
    }
    for &i in residual {
        let [x, y, _] = grid.unravel(i);
        let _ = writeln!(s, r#"<rect x="{x}" y="{y}" width="1" height="1" fill="red"/>"#);
    }
    for c in cubes {
        let w = c.cells_per_axis(depth);
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="{w}" height="{w}" fill="none" stroke="steelblue" stroke-width="0.1"/>"#,
            c.index[0] * w,
            c.index[1] * w
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{generate, GeneratorSpec};
    use num_complex::Complex64;

    /// Independent sup-metric distance from cube `q` to `F`, in cells:
    /// the least `r` such that `q` dilated by `r` cells meets `F`.
    fn brute_distance(mask: &ClosedSetMask, q: &DyadicCube) -> Option<u32> {
        let g = mask.grid();
        let depth = g.dyadic_depth().unwrap();
        let w = q.cells_per_axis(depth) as i64;
        let mut best: Option<u32> = None;
        for (i, _) in mask.membership().iter().enumerate().filter(|(_, &b)| b) {
            let idx = g.unravel(i);
            let mut r = 0i64;
            for a in 0..g.dim() {
                let lo = q.index[a] as i64 * w;
                let hi = lo + w - 1;
                let x = idx[a] as i64;
                r = r.max((lo - x).max(x - hi).max(0));
            }
            best = Some(best.map_or(r as u32, |b| b.min(r as u32)));
        }
        best
    }

    fn check_whitney(mask: &ClosedSetMask, w: &WhitneyResult) {
        let g = mask.grid();
        let depth = g.dyadic_depth().unwrap();
        let mut owner = vec![0u8; g.total_points()];
        for q in &w.cubes {
            let side = q.cells_per_axis(depth) as u32;
            if let Some(dist) = brute_distance(mask, q) {
                assert!(side <= dist && dist <= 4 * side, "{q:?}: side {side}, dist {dist}");
            }
            for c in q.cells(g) {
                owner[c] += 1;
            }
        }
        for &c in &w.residual {
            owner[c] += 1;
        }
        for (i, &m) in mask.membership().iter().enumerate() {
            assert_eq!(owner[i] as usize + m as usize, 1, "cell {i}");
        }
        let mut sorted = w.cubes.clone();
        sorted.sort();
        assert_eq!(sorted, w.cubes);
    }

    #[test]
    fn cube_arithmetic() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let q = DyadicCube::new(1, vec![1, 0]);
        assert_eq!(q.cells(&g).len(), 16);
        assert!((q.side(&g) - 0.5).abs() < 1e-15);
        assert!((q.diameter(&g) - 0.5 * 2f64.sqrt()).abs() < 1e-15);
        let kids = q.children();
        assert_eq!(kids.len(), 4);
        assert!(kids.iter().all(|k| q.contains(k)));
        assert!(kids[0].interiors_disjoint(&kids[3]));
        assert!(!q.interiors_disjoint(&kids[1]));
        assert_eq!(kids[1].index, vec![2, 1]);
    }

    #[test]
    fn distance_field_is_lipschitz() {
        let g = Grid::new(2, 32, 1.0).unwrap();
        let m = ClosedSetMask::random(g, 5);
        let d = m.distance_cells();
        for i in 0..g.total_points() {
            let a = g.unravel(i);
            if a[0] + 1 < 32 {
                let j = g.ravel(&[a[0] + 1, a[1]]);
                assert!(d[i].abs_diff(d[j]) <= 1);
            }
            let brute = (0..g.total_points())
                .filter(|&f| m.membership()[f])
                .map(|f| {
                    let b = g.unravel(f);
                    a[0].abs_diff(b[0]).max(a[1].abs_diff(b[1])) as u32
                })
                .min()
                .unwrap();
            assert_eq!(d[i], brute);
        }
        assert_eq!(*d.iter().min().unwrap(), 0);
    }

    #[test]
    fn whitney_degenerate_sets() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let full = ClosedSetMask::from_fn(g, |_| true);
        let w = whitney(&full, 4).unwrap();
        assert!(w.cubes.is_empty() && w.residual.is_empty());
        let empty = ClosedSetMask::from_fn(g, |_| false);
        let w = whitney(&empty, 0).unwrap();
        assert_eq!(w.cubes, vec![DyadicCube::root(2)]);
        assert!(w.residual.is_empty());
        assert!(whitney(&empty, 5).is_err());
        let g = Grid::new(1, 12, 1.0).unwrap();
        assert!(whitney(&ClosedSetMask::from_fn(g, |_| false), 0).is_err());
    }

    #[test]
    fn whitney_point_cascades() {
        let g = Grid::new(1, 1024, 1.0).unwrap();
        let m = ClosedSetMask::from_fn(g, |i| i == 512);
        let w = whitney(&m, 10).unwrap();
        check_whitney(&m, &w);
        assert!(w.residual.is_empty());
        // sizes shrink towards the point on both sides
        let mut left: Vec<&DyadicCube> = w.cubes.iter().filter(|q| q.index[0] << (10 - q.generation) < 512).collect();
        left.sort_by_key(|q| q.index[0] << (10 - q.generation));
        assert!(left.windows(2).all(|p| p[0].generation <= p[1].generation));
        assert!(left.len() > 5);
        let right = w.cubes.len() - left.len();
        assert!(right > 5);
    }

    #[test]
    fn whitney_random_masks_and_truncation() {
        for seed in 0..8 {
            let g = Grid::new(2, 64, 1.0).unwrap();
            let m = ClosedSetMask::random(g, seed);
            let w = whitney(&m, 6).unwrap();
            check_whitney(&m, &w);
            let w = whitney(&m, 3).unwrap();
            check_whitney(&m, &w);
        }
        let g = Grid::new(3, 16, 1.0).unwrap();
        let m = ClosedSetMask::random(g, 3);
        check_whitney(&m, &whitney(&m, 4).unwrap());
    }

    #[test]
    fn cz_examples() {
        let g = Grid::new(1, 64, 1.0).unwrap();
        let c = SampledField::constant(g, Complex64::new(0.7, 0.0));
        let r = cz_decompose(&c, 0.7).unwrap();
        assert!(r.cubes.is_empty() && r.good_cells.iter().all(|&b| b));

        let ind = |h: f64| SampledField::from_fn(g, Side::Physical, |i| Complex64::new(if i < 16 { h } else { 0.0 }, 0.0));
        assert!(cz_decompose(&ind(8.0), 1.0).is_err());
        let r = cz_decompose(&ind(2.0), 1.0).unwrap();
        assert_eq!(r.cubes, vec![DyadicCube::new(2, vec![0])]);

        let neg = ind(-1.0);
        assert!(cz_decompose(&neg, 1.0).is_err());
        assert!(cz_decompose(&c, 0.0).is_err());
    }

    fn check_cz(f: &SampledField, r: &CZResult) {
        let g = f.grid();
        let d = g.dim() as i32;
        let mut covered = vec![0u8; g.total_points()];
        let mut measure = 0.0;
        for q in &r.cubes {
            let cells = q.cells(g);
            let avg = cells.iter().map(|&c| f.values()[c].re).sum::<f64>() / cells.len() as f64;
            assert!(avg > r.alpha * (1.0 - 1e-12) && avg <= 2f64.powi(d) * r.alpha * (1.0 + 1e-12));
            for c in cells {
                covered[c] += 1;
            }
            measure += q.side(g).powi(d);
        }
        for (i, &good) in r.good_cells.iter().enumerate() {
            assert_eq!(covered[i] as usize + good as usize, 1);
            if good {
                assert!(f.values()[i].re <= r.alpha);
            }
        }
        let l1 = f.lp_norm(1.0).unwrap();
        assert!(measure <= l1 / r.alpha * (1.0 + 1e-12));
    }

    #[test]
    fn cz_random_fields() {
        for seed in 0..10 {
            for d in 1..=3 {
                let n = [256, 32, 8][d - 1];
                let g = Grid::new(d, n, 2.0).unwrap();
                let f = generate(&g, &GeneratorSpec::RandomGaussian { seed }).unwrap().abs();
                let f = f.map(|v| v * v * v);
                let alpha = 2.0 * f.mean().re;
                check_cz(&f, &cz_decompose(&f, alpha).unwrap());
            }
        }
    }

    #[test]
    fn audits_agree_with_brute_force() {
        for seed in 0..6 {
            let g = Grid::new(2, 64, 1.0).unwrap();
            let m = ClosedSetMask::random(g, seed);
            let w = whitney(&m, 6).unwrap();
            let a = audit_whitney(&m, &w).unwrap();
            assert_eq!(a.violations, 0, "{a:?}");
            assert!(a.min_ratio >= 1.0 && a.max_ratio <= 4.0);
            let mut broken = w.clone();
            if let Some(q) = broken.cubes.pop() {
                broken.residual.extend(q.cells(&g));
                broken.residual.sort();
                broken.cubes.push(DyadicCube::new(0, vec![0, 0]));
                assert!(audit_whitney(&m, &broken).unwrap().violations > 0);
            }
            let mut enlarged = w.clone();
            if let Some(q) = enlarged.cubes.iter_mut().find(|q| q.generation > 1) {
                // the parent of an admitted cube is too close to F
                q.generation -= 1;
                for k in q.index.iter_mut() {
                    *k /= 2;
                }
                assert!(audit_whitney(&m, &enlarged).unwrap().violations > 0);
            }
        }
        let g = Grid::new(1, 128, 1.0).unwrap();
        let f = generate(&g, &GeneratorSpec::RandomGaussian { seed: 9 }).unwrap().abs();
        let r = cz_decompose(&f, 2.0 * f.mean().re).unwrap();
        let a = audit_cz(&f, &r).unwrap();
        assert_eq!(a.violations, 0);
        assert!(a.min_ratio > 1.0 && a.max_ratio <= 2.0);
        let mut bad = r.clone();
        bad.good_cells[0] = !bad.good_cells[0];
        assert!(audit_cz(&f, &bad).unwrap().violations > 0);
    }

    #[test]
    fn exports() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let m = ClosedSetMask::random(g, 2);
        let w = whitney(&m, 4).unwrap();
        let csv = cubes_to_csv(2, &w.cubes);
        assert!(csv.starts_with("generation,k1,k2\n"));
        assert_eq!(csv.lines().count(), w.cubes.len() + 1);
        let summary = cube_summary(&w.cubes, w.residual.len());
        assert_eq!(summary["count"], w.cubes.len());
        let svg = cubes_to_svg(&g, &w.cubes, Some(&m), &w.residual).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(cubes_to_svg(&Grid::new(1, 16, 1.0).unwrap(), &[], None, &[]).is_err());
    }
}
