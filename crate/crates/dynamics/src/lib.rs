//! Double-precision diagnostics: Julia sets by backward orbits, the
//! measure of maximal entropy by pulling back a point, and a binned
//! Hausdorff distance between point clouds.
//!
//! Nothing here feeds into a decision; the numbers only corroborate.

use std::collections::HashSet;
use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use polysemi_core::polynomial::Polynomial;
use polysemi_core::scalar::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

/// Default cap on the number of preimages in [`mme_pullback`].
pub const DEFAULT_PREIMAGE_CAP: u64 = 2_000_000;

const ROOT_RETRIES: usize = 8;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("degree {0} is below 2")]
    Degree(usize),
    #[error("root finding failed after {retries} attempts")]
    RootFinding { retries: usize },
    #[error("{count} preimages exceed the cap {cap}")]
    PreimageCap { count: u128, cap: u64 },
    #[error("depth must be at least 1")]
    Depth,
    #[error("empty point cloud")]
    Empty,
    #[error("invalid grid: {0}")]
    Grid(String),
}

type Result<T> = std::result::Result<T, DynamicsError>;

/// A polynomial with `f64` complex coefficients, constant term first.
#[derive(Clone, Debug, PartialEq)]
pub struct DPoly {
    coeffs: Vec<Complex64>,
}

impl DPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        while coeffs.len() > 1 && coeffs.last() == Some(&Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.len() < 3 {
            return Err(DynamicsError::Degree(coeffs.len().saturating_sub(1)));
        }
        Ok(DPoly { coeffs })
    }

    pub fn from_polynomial<S: Scalar>(p: &Polynomial<S>) -> Result<Self> {
        DPoly::new(p.to_c64())
    }

    pub fn from_real(v: &[f64]) -> Result<Self> {
        DPoly::new(v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `R = 1 + max(1, sum |c_i| / |c_n|)`; orbits leaving this disk escape.
    pub fn escape_radius(&self) -> f64 {
        let lead = self.coeffs[self.degree()].norm();
        let s: f64 = self.coeffs[..self.degree()].iter().map(|c| c.norm()).sum();
        1.0 + (s / lead).max(1.0)
    }

    /// All solutions of `p(z) = w`.
    pub fn preimages(&self, w: Complex64) -> Result<Vec<Complex64>> {
        let mut shifted = self.coeffs.clone();
        shifted[0] -= w;
        roots(&shifted)
    }
}

/// Roots of the polynomial with coefficients `c` (constant term first) as
/// eigenvalues of the companion matrix, each polished by one Newton step.
pub fn roots(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = c.len() - 1;
    let lead = c[n];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    let mut max_iter = 200;
    for _ in 0..ROOT_RETRIES {
        if let Some(schur) = m.clone().try_schur(f64::EPSILON, max_iter) {
            let eig = schur.eigenvalues().ok_or(DynamicsError::RootFinding { retries: 1 })?;
            let poly = DPoly { coeffs: c.to_vec() };
            let out: Vec<Complex64> = eig
                .iter()
                .map(|&z| {
                    let (p, dp) = poly.eval_with_derivative(z);
                    let step = p / dp;
                    let polished = z - step;
                    if polished.is_finite() && poly.eval(polished).norm() <= p.norm() {
                        polished
                    } else {
                        z
                    }
                })
                .collect();
            if out.iter().all(|z| z.is_finite()) {
                return Ok(out);
            }
        }
        max_iter *= 4;
    }
    Err(DynamicsError::RootFinding {
        retries: ROOT_RETRIES,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CloudSource {
    InverseIteration,
    EscapeBoundary,
}

#[derive(Clone, Debug)]
pub struct PointCloud {
    pub points: Vec<Complex64>,
    pub source: CloudSource,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_modulus(&self) -> f64 {
        self.points.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "re,im")?;
        for z in &self.points {
            writeln!(w, "{:.17e},{:.17e}", z.re, z.im)?;
        }
        Ok(())
    }
}

fn chain_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_start(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.1..0.9), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Chains run in parallel; chain `c` draws from stream `c` of `seed`, so the
/// cloud depends on the seed only.
const CHAINS: usize = 64;

/// Samples the Julia set of `p` by random backward orbits: each chain
/// starts at a random point, picks a uniformly random preimage at every
/// step and keeps the iterates after the first `burn_in`.
pub fn julia_inverse_iteration(p: &DPoly, n_points: usize, burn_in: usize, seed: u64) -> Result<PointCloud> {
    if n_points == 0 {
        return Err(DynamicsError::Empty);
    }
    let radius = p.escape_radius();
    let chains = CHAINS.min(n_points);
    let parts: Vec<Result<Vec<Complex64>>> = (0..chains)
        .into_par_iter()
        .map(|c| {
            let share = n_points / chains + usize::from(c < n_points % chains);
            let mut rng = chain_rng(seed, c as u64);
            'retry: for _ in 0..ROOT_RETRIES {
                let mut z = random_start(&mut rng);
                let mut out = Vec::with_capacity(share);
                for step in 0..burn_in + share {
                    let Ok(pre) = p.preimages(z) else {
                        continue 'retry;
                    };
                    z = pre[rng.gen_range(0..pre.len())];
                    if step >= burn_in {
                        if !(z.norm() <= radius) {
                            continue 'retry;
                        }
                        out.push(z);
                    }
                }
                return Ok(out);
            }
            Err(DynamicsError::RootFinding {
                retries: ROOT_RETRIES,
            })
        })
        .collect();
    let mut points = Vec::with_capacity(n_points);
    for part in parts {
        points.extend(part?);
    }
    Ok(PointCloud {
        points,
        source: CloudSource::InverseIteration,
    })
}

/// Rectangle `[lo.re, hi.re] x [lo.im, hi.im]` cut into `nx x ny` cells.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub lo: Complex64,
    pub hi: Complex64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(lo: Complex64, hi: Complex64, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 || !(hi.re > lo.re) || !(hi.im > lo.im) {
            return Err(DynamicsError::Grid(format!("{lo} .. {hi} at {nx}x{ny}")));
        }
        Ok(GridSpec { lo, hi, nx, ny })
    }

    /// The square `[-R, R]^2` around the escape disk of `p`.
    pub fn escape_square(p: &DPoly, n: usize) -> Self {
        let r = p.escape_radius();
        GridSpec {
            lo: Complex64::new(-r, -r),
            hi: Complex64::new(r, r),
            nx: n,
            ny: n,
        }
    }

    pub fn cell_width(&self) -> f64 {
        (self.hi.re - self.lo.re) / self.nx as f64
    }

    pub fn cell_height(&self) -> f64 {
        (self.hi.im - self.lo.im) / self.ny as f64
    }

    /// Row-major index, row 0 at the bottom (`lo.im`).
    pub fn cell(&self, z: Complex64) -> Option<usize> {
        let fx = (z.re - self.lo.re) / self.cell_width();
        let fy = (z.im - self.lo.im) / self.cell_height();
        if !(fx >= 0.0 && fy >= 0.0) {
            return None;
        }
        let (ix, iy) = (fx as usize, fy as usize);
        // The closed upper edges belong to the last cells.
        let ix = if ix == self.nx && z.re == self.hi.re { ix - 1 } else { ix };
        let iy = if iy == self.ny && z.im == self.hi.im { iy - 1 } else { iy };
        (ix < self.nx && iy < self.ny).then_some(iy * self.nx + ix)
    }

    pub fn center(&self, idx: usize) -> Complex64 {
        let (ix, iy) = (idx % self.nx, idx / self.nx);
        Complex64::new(
            self.lo.re + (ix as f64 + 0.5) * self.cell_width(),
            self.lo.im + (iy as f64 + 0.5) * self.cell_height(),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridMeasure {
    pub spec: GridSpec,
    pub mass: Vec<f64>,
}

impl GridMeasure {
    /// Equal mass at every point, normalized over the points that fall
    /// inside the grid. Returns the measure and the fraction left outside.
    pub fn from_points(spec: GridSpec, points: &[Complex64]) -> (Self, f64) {
        let mut mass = vec![0.0; spec.nx * spec.ny];
        let mut inside = 0usize;
        for &z in points {
            if let Some(i) = spec.cell(z) {
                mass[i] += 1.0;
                inside += 1;
            }
        }
        if inside > 0 {
            let w = 1.0 / inside as f64;
            mass.iter_mut().for_each(|m| *m *= w);
        }
        let outside = 1.0 - inside as f64 / points.len().max(1) as f64;
        (GridMeasure { spec, mass }, outside)
    }

    pub fn total(&self) -> f64 {
        // Kahan summation keeps the 1e-12 mass check meaningful on large grids.
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for &m in &self.mass {
            let y = m - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        sum
    }

    /// Sum of the masses of cells whose centers satisfy `keep`.
    pub fn mass_where(&self, keep: impl Fn(Complex64) -> bool) -> f64 {
        self.mass
            .iter()
            .enumerate()
            .filter(|&(i, _)| keep(self.spec.center(i)))
            .map(|(_, m)| m)
            .sum()
    }

    /// 16-bit binary PGM, top row first, linear in mass with the largest
    /// cell at 65535.
    pub fn write_pgm<W: Write>(&self, w: W) -> io::Result<()> {
        let max = self.mass.iter().cloned().fold(0.0, f64::max);
        let scale = if max > 0.0 { 65535.0 / max } else { 0.0 };
        let values: Vec<u16> = self.mass.iter().map(|m| (m * scale).round() as u16).collect();
        write_pgm16(w, self.spec.nx, self.spec.ny, &values)
    }

    /// One line per grid row, top row first.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        for iy in (0..self.spec.ny).rev() {
            let row = &self.mass[iy * self.spec.nx..(iy + 1) * self.spec.nx];
            let line: Vec<String> = row.iter().map(|m| format!("{m:.17e}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Writes a binary 16-bit PGM from row-major `values` with row 0 at the
/// bottom of the picture.
pub fn write_pgm16<W: Write>(mut w: W, nx: usize, ny: usize, values: &[u16]) -> io::Result<()> {
    write!(w, "P5\n{nx} {ny}\n65535\n")?;
    let mut buf = Vec::with_capacity(2 * values.len());
    for iy in (0..ny).rev() {
        for v in &values[iy * nx..(iy + 1) * nx] {
            buf.extend_from_slice(&v.to_be_bytes());
        }
    }
    w.write_all(&buf)
}

/// Lit pixels (65535) at the cells containing cloud points.
pub fn render_cloud(cloud: &PointCloud, spec: GridSpec) -> Vec<u16> {
    let mut img = vec![0u16; spec.nx * spec.ny];
    for &z in &cloud.points {
        if let Some(i) = spec.cell(z) {
            img[i] = u16::MAX;
        }
    }
    img
}

/// `0.5 * sum |a_i - b_i|` over grids of the same shape.
pub fn total_variation(a: &GridMeasure, b: &GridMeasure) -> Result<f64> {
    if a.spec != b.spec {
        return Err(DynamicsError::Grid("grids differ".into()));
    }
    Ok(0.5 * a.mass.iter().zip(&b.mass).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

/// Normalized arc length of the circle `|z - center| = radius` in each
/// cell, from `samples` equally spaced points.
pub fn circle_measure(spec: GridSpec, center: Complex64, radius: f64, samples: usize) -> GridMeasure {
    let pts: Vec<Complex64> = (0..samples)
        .map(|k| center + Complex64::from_polar(radius, std::f64::consts::TAU * (k as f64 + 0.5) / samples as f64))
        .collect();
    GridMeasure::from_points(spec, &pts).0
}

#[derive(Clone, Debug)]
pub struct PullbackReport {
    pub start: Complex64,
    /// Starts rejected because their preimages collapsed.
    pub rejected_starts: Vec<Complex64>,
    pub preimages: usize,
    /// Fraction of the mass that fell outside the grid.
    pub outside: f64,
}

/// Equidistributes mass `1 / n^depth` over the depth-`depth` preimages of
/// `start` and bins it onto `spec`. A start whose preimages collapse (a
/// critical value or an exceptional point) is replaced by a random one.
pub fn mme_pullback(
    p: &DPoly,
    depth: u32,
    start: Complex64,
    spec: GridSpec,
    cap: u64,
    seed: u64,
) -> Result<(GridMeasure, PullbackReport)> {
    if depth == 0 {
        return Err(DynamicsError::Depth);
    }
    let n = p.degree() as u128;
    let count = n.checked_pow(depth).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(DynamicsError::PreimageCap { count, cap });
    }
    let mut rng = chain_rng(seed, u64::MAX);
    let mut start = start;
    let mut rejected = Vec::new();
    let scale = p.escape_radius();
    loop {
        let first = p.preimages(start)?;
        let collapsed = first
            .iter()
            .enumerate()
            .any(|(i, a)| first[i + 1..].iter().any(|b| (a - b).norm() < 1e-6 * scale));
        if !collapsed {
            break;
        }
        rejected.push(start);
        if rejected.len() > ROOT_RETRIES {
            return Err(DynamicsError::RootFinding {
                retries: ROOT_RETRIES,
            });
        }
        start = random_start(&mut rng);
    }
    let mut level = vec![start];
    for _ in 0..depth {
        let next: Result<Vec<Vec<Complex64>>> = level.par_iter().map(|&w| p.preimages(w)).collect();
        level = next?.into_iter().flatten().collect();
    }
    let (grid, outside) = GridMeasure::from_points(spec, &level);
    Ok((
        grid,
        PullbackReport {
            start,
            rejected_starts: rejected,
            preimages: level.len(),
            outside,
        },
    ))
}

/// Occupied cells of a cloud on a square lattice of side `h` anchored at `origin`.
fn occupied(points: &[Complex64], origin: Complex64, h: f64) -> HashSet<(i64, i64)> {
    points
        .iter()
        .map(|z| (((z.re - origin.re) / h).floor() as i64, ((z.im - origin.im) / h).floor() as i64))
        .collect()
}

/// Sampling resolution used by [`julia_distance`]: the diagonal of the
/// joint bounding box over the square root of the smaller cloud size.
pub fn sampling_resolution(a: &PointCloud, b: &PointCloud) -> f64 {
    let (lo, hi) = bounding_box(a.points.iter().chain(&b.points));
    let diag = (hi - lo).norm().max(f64::MIN_POSITIVE);
    diag / (a.len().min(b.len()).max(1) as f64).sqrt()
}

fn bounding_box<'a>(pts: impl Iterator<Item = &'a Complex64>) -> (Complex64, Complex64) {
    let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for z in pts {
        lo.re = lo.re.min(z.re);
        lo.im = lo.im.min(z.im);
        hi.re = hi.re.max(z.re);
        hi.im = hi.im.max(z.im);
    }
    (lo, hi)
}

/// Largest gap from an occupied cell of `a` to the nearest occupied cell of
/// `b`, measured between the closed cells (so neighbours are at distance 0).
fn directed(a: &HashSet<(i64, i64)>, b: &HashSet<(i64, i64)>, h: f64) -> f64 {
    a.par_iter()
        .map(|&(x, y)| {
            let mut best = f64::INFINITY;
            let mut r: i64 = 0;
            loop {
                if (r - 1).max(0) as f64 * h >= best {
                    return best;
                }
                for dx in -r..=r {
                    for dy in -r..=r {
                        if dx.abs().max(dy.abs()) != r || !b.contains(&(x + dx, y + dy)) {
                            continue;
                        }
                        let gx = (dx.abs() - 1).max(0) as f64;
                        let gy = (dy.abs() - 1).max(0) as f64;
                        best = best.min(h * gx.hypot(gy));
                    }
                }
                r += 1;
            }
        })
        .reduce(|| 0.0, f64::max)
}

/// Symmetric Hausdorff distance between the cell sets the clouds occupy at
/// [`sampling_resolution`]. Exact up to about one cell diagonal.
pub fn julia_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(DynamicsError::Empty);
    }
    let h = sampling_resolution(a, b);
    let (lo, _) = bounding_box(a.points.iter().chain(&b.points));
    let ca = occupied(&a.points, lo, h);
    let cb = occupied(&b.points, lo, h);
    Ok(directed(&ca, &cb, h).max(directed(&cb, &ca, h)))
}

/// Distance between the full preimage `p^-1(j)` and `j`; small values
/// indicate that the sampled set is completely invariant.
pub fn check_pullback_invariance(p: &DPoly, j: &PointCloud) -> Result<f64> {
    if j.is_empty() {
        return Err(DynamicsError::Empty);
    }
    let pre: Result<Vec<Vec<Complex64>>> = j.points.par_iter().map(|&w| p.preimages(w)).collect();
    let pre = PointCloud {
        points: pre?.into_iter().flatten().collect(),
        source: j.source,
    };
    julia_distance(&pre, j)
}

/// Cells on the edge of the bounded set: centers that stay within the
/// escape radius for `max_iter` steps and touch a cell that escapes.
pub fn escape_boundary(p: &DPoly, spec: GridSpec, max_iter: u32) -> PointCloud {
    let r = p.escape_radius();
    let bounded: Vec<bool> = (0..spec.nx * spec.ny)
        .into_par_iter()
        .map(|i| {
            let mut z = spec.center(i);
            for _ in 0..max_iter {
                if z.norm() > r {
                    return false;
                }
                z = p.eval(z);
            }
            true
        })
        .collect();
    let mut points = Vec::new();
    for iy in 0..spec.ny {
        for ix in 0..spec.nx {
            if !bounded[iy * spec.nx + ix] {
                continue;
            }
            let edge = [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)].iter().any(|&(dx, dy)| {
                let (x, y) = (ix as i64 + dx, iy as i64 + dy);
                x < 0
                    || y < 0
                    || x >= spec.nx as i64
                    || y >= spec.ny as i64
                    || !bounded[y as usize * spec.nx + x as usize]
            });
            if edge {
                points.push(spec.center(iy * spec.nx + ix));
            }
        }
    }
    PointCloud {
        points,
        source: CloudSource::EscapeBoundary,
    }
}
