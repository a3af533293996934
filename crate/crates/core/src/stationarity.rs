//! The stationarity diagnostics: functional-equation residual, Poisson-level
//! stationarity and drift, Borel-norm growth, finite sections of the
//! transfer operator and its adjoint, the contour-charge obstruction, and
//! Stolz-angle coverage.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmeasure::CircleMeasure;
use crate::error::{Error, Result};
use crate::exec;
use crate::gmeasure::GroupMeasure;
use crate::moebius::{ExtendedComplex, MoebiusMap};
use crate::transforms::{
    borel_series, cauchy_transform, cauchy_tail_bound, default_radii, hardy_norm, log_poisson,
    HardyEstimate, DEFAULT_QUAD,
};

const CIRCLE_TOL: f64 = 1e-9;
const POLE_MARGIN: f64 = 1e-6;

/// Residual of the functional equation at z:
/// Σ_γ μ(γ) f_ν(γ⁻¹z)(γ⁻¹)′(z) − f_ν(z) − Σ_γ μ(γ)/(z − γ.∞).
/// Defined for any z off the unit circle and off the poles {γ.∞}.
pub fn functional_residual(
    mu: &GroupMeasure,
    nu: &CircleMeasure,
    z: Complex64,
) -> Result<Complex64> {
    if (z.norm() - 1.0).abs() <= CIRCLE_TOL {
        return Err(Error::Domain(format!(
            "residual is undefined on the unit circle (|z| = {})",
            z.norm()
        )));
    }
    let mut composed = Complex64::new(0.0, 0.0);
    for (g, w) in mu.atoms() {
        let ginv = g.inverse();
        let pulled = ginv.apply_finite(z);
        composed += w * cauchy_transform(nu, pulled)? * ginv.derivative(z)?;
    }
    let direct = cauchy_transform(nu, z)?;
    let poles = borel_series(mu, z)?;
    Ok(composed - direct - poles)
}

/// Echo of the inputs that shaped a residual grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualConfig {
    pub r_max: f64,
    pub grid_size: usize,
    pub rings: usize,
    pub points_per_ring: usize,
    pub mu_support: usize,
    pub nu_kind: String,
    pub nu_resolution: usize,
    /// Worst-case Fourier truncation bound over the grid (0 for exact forms).
    pub cauchy_tail_bound: f64,
}

/// Grid evaluation of the functional-equation defect.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualReport {
    pub points: Vec<[f64; 2]>,
    pub values: Vec<[f64; 2]>,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub config: ResidualConfig,
}

/// Deterministic concentric-circle grid: rings at r_max·j/R, equispaced
/// angles on each ring.
pub fn residual_grid(r_max: f64, grid_size: usize) -> Vec<Complex64> {
    let rings = ((grid_size as f64 / 8.0).sqrt().round() as usize).max(1);
    let per_ring = grid_size.div_ceil(rings);
    let mut points = Vec::with_capacity(rings * per_ring);
    for j in 1..=rings {
        let r = r_max * j as f64 / rings as f64;
        for m in 0..per_ring {
            points.push(Complex64::from_polar(r, TAU * m as f64 / per_ring as f64));
        }
    }
    points
}

pub fn residual_report(
    mu: &GroupMeasure,
    nu: &CircleMeasure,
    r_max: f64,
    grid_size: usize,
) -> Result<ResidualReport> {
    if !(r_max > 0.0 && r_max < 1.0) {
        return Err(Error::Config(format!("r_max must lie in (0,1), got {r_max}")));
    }
    // Poles sit at |γ.∞| > 1 or at ∞, so any interior grid keeps at least
    // 1 − r_max of margin; still verify the stated bound.
    for (g, _) in mu.atoms() {
        if let ExtendedComplex::Finite(p) = g.pole_image() {
            if p.norm() - r_max < POLE_MARGIN {
                return Err(Error::Geometry(format!(
                    "pole {p} within {POLE_MARGIN} of the residual grid"
                )));
            }
        }
    }
    let points = residual_grid(r_max, grid_size);
    let rings = ((grid_size as f64 / 8.0).sqrt().round() as usize).max(1);
    let per_ring = grid_size.div_ceil(rings);
    let values: Vec<Result<Complex64>> =
        exec::map_slice(&points, |&z| functional_residual(mu, nu, z));
    let mut out = Vec::with_capacity(values.len());
    for v in values {
        out.push(v?);
    }
    let abs: Vec<f64> = out.iter().map(|v| v.norm()).collect();
    let max_abs = abs.iter().copied().fold(0.0, f64::max);
    let mean_abs = abs.iter().sum::<f64>() / abs.len() as f64;
    let tail = points
        .iter()
        .map(|&z| cauchy_tail_bound(nu, z))
        .fold(0.0, f64::max);
    Ok(ResidualReport {
        points: points.iter().map(|z| [z.re, z.im]).collect(),
        values: out.iter().map(|v| [v.re, v.im]).collect(),
        max_abs,
        mean_abs,
        config: ResidualConfig {
            r_max,
            grid_size,
            rings,
            points_per_ring: per_ring,
            mu_support: mu.support_size(),
            nu_kind: nu.kind().to_string(),
            nu_resolution: nu.resolution(),
            cauchy_tail_bound: tail,
        },
    })
}

/// Furstenberg drift l_{μ,ν} = Σ_γ μ(γ) p_ν(γ⁻¹.0); real for positive ν and
/// probability μ.
pub fn drift(mu: &GroupMeasure, nu: &CircleMeasure) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (g, w) in mu.atoms() {
        let base = g.inverse().apply_finite(Complex64::new(0.0, 0.0));
        acc += w * log_poisson(nu, base)?.value_c();
    }
    Ok(acc)
}

/// Deviation of h(z) = Σ_γ μ(γ) p_ν(γ⁻¹z) − p_ν(z) from a constant over a
/// grid; for stationary pairs the constant is the drift.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PoissonCheck {
    pub mean: [f64; 2],
    pub max_deviation: f64,
}

impl PoissonCheck {
    pub fn mean_c(&self) -> Complex64 {
        Complex64::new(self.mean[0], self.mean[1])
    }
}

pub fn poisson_stationarity_check(
    mu: &GroupMeasure,
    nu: &CircleMeasure,
    z_grid: &[Complex64],
) -> Result<PoissonCheck> {
    if z_grid.is_empty() {
        return Err(Error::Precondition("empty evaluation grid".into()));
    }
    let values: Vec<Result<Complex64>> = exec::map_slice(z_grid, |&z| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (g, w) in mu.atoms() {
            acc += w * log_poisson(nu, g.inverse().apply_finite(z))?.value_c();
        }
        Ok(acc - log_poisson(nu, z)?.value_c())
    });
    let mut h = Vec::with_capacity(values.len());
    for v in values {
        h.push(v?);
    }
    let mean = h.iter().sum::<Complex64>() / h.len() as f64;
    let max_deviation = h.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
    Ok(PoissonCheck {
        mean: [mean.re, mean.im],
        max_deviation,
    })
}

/// Hardy-norm estimates of the Borel series of μ*ⁿ for n = 1..n_max; the raw
/// sequence, no monotonicity asserted.
pub fn borel_norm_growth(
    mu: &GroupMeasure,
    n_max: usize,
    p: f64,
) -> Result<Vec<(usize, HardyEstimate)>> {
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    let radii = default_radii();
    let mut out = Vec::with_capacity(n_max);
    let mut power = GroupMeasure::delta(MoebiusMap::identity());
    for n in 1..=n_max {
        power = power.convolve(mu)?;
        let f = |z: Complex64| {
            borel_series(&power, z).expect("interior radii stay away from exterior poles")
        };
        out.push((n, hardy_norm(f, p, &radii, DEFAULT_QUAD)?));
    }
    Ok(out)
}

/// Finite section of an operator on power series: column k holds the Taylor
/// coefficients (orders 0..K) of the image of z^k.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub k_max: usize,
    /// Exponent label of the intended H^p action (metadata only).
    pub p: f64,
    entries: Vec<Vec<Complex64>>,
}

impl OperatorMatrix {
    /// Entry at row j (output order), column k (input monomial).
    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        self.entries[j][k]
    }

    pub fn size(&self) -> usize {
        self.k_max + 1
    }

    /// max |self − other^H| entrywise: the adjoint-identity defect.
    pub fn conj_transpose_distance(&self, other: &OperatorMatrix) -> f64 {
        let n = self.size().min(other.size());
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                worst = worst.max((self.entries[j][k] - other.entries[k][j].conj()).norm());
            }
        }
        worst
    }

    /// Apply the section to a coefficient vector (truncated at the band).
    pub fn apply(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        (0..self.size())
            .map(|j| {
                (0..self.size())
                    .map(|k| {
                        self.entries[j][k] * coeffs.get(k).copied().unwrap_or_default()
                    })
                    .sum()
            })
            .collect()
    }
}

impl Serialize for OperatorMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            k_max: usize,
            p: f64,
            entries: &'a Vec<Vec<[f64; 2]>>,
        }
        let entries: Vec<Vec<[f64; 2]>> = self
            .entries
            .iter()
            .map(|row| row.iter().map(|c| [c.re, c.im]).collect())
            .collect();
        Repr {
            k_max: self.k_max,
            p: self.p,
            entries: &entries,
        }
        .serialize(s)
    }
}

/// Quadrature radius for coefficient extraction.
const EXTRACTION_RADIUS: f64 = 0.5;

fn extraction_guard(k_max: usize) -> Result<()> {
    if EXTRACTION_RADIUS.powi(k_max as i32) < 1e-14 {
        return Err(Error::Accuracy(format!(
            "coefficient extraction at r0 = {EXTRACTION_RADIUS} is ill-conditioned beyond K = {k_max}"
        )));
    }
    Ok(())
}

/// Taylor coefficients 0..=orders of F on |z| = r0 by circle quadrature.
fn extract_coeffs(
    f: impl Fn(Complex64) -> Complex64,
    orders: usize,
    quad_points: usize,
) -> Vec<Complex64> {
    let m = quad_points;
    let samples: Vec<Complex64> = (0..m)
        .map(|j| f(Complex64::from_polar(EXTRACTION_RADIUS, TAU * j as f64 / m as f64)))
        .collect();
    (0..=orders)
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (idx, s) in samples.iter().enumerate() {
                acc += s * Complex64::from_polar(1.0, -(j as f64) * TAU * idx as f64 / m as f64);
            }
            acc / (m as f64 * EXTRACTION_RADIUS.powi(j as i32))
        })
        .collect()
}

/// Finite section of T_μ(f) = Σ_γ μ(γ)(f∘γ⁻¹)(γ⁻¹)′ − f.
pub fn t_mu_matrix(mu: &GroupMeasure, k_max: usize) -> Result<OperatorMatrix> {
    if k_max == 0 {
        return Err(Error::Precondition("band must be at least 1".into()));
    }
    extraction_guard(k_max)?;
    // Quadrature noise is amplified by r0^{-j} at order j; oversampling
    // beyond the 8K floor averages it down.
    let m = (32 * k_max).max(512);
    let inverses: Vec<(MoebiusMap, Complex64)> =
        mu.atoms().iter().map(|(g, w)| (g.inverse(), *w)).collect();
    let columns: Vec<Vec<Complex64>> = exec::map_range(k_max + 1, |k| {
        let image = |z: Complex64| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (ginv, w) in &inverses {
                let pulled = ginv.apply_finite(z);
                let der = ginv
                    .derivative(z)
                    .expect("extraction circle avoids exterior poles");
                acc += w * pulled.powu(k as u32) * der;
            }
            acc - z.powu(k as u32)
        };
        extract_coeffs(image, k_max, m)
    });
    // transpose: entries[row][col]
    let entries: Vec<Vec<Complex64>> = (0..=k_max)
        .map(|j| (0..=k_max).map(|k| columns[k][j]).collect())
        .collect();
    Ok(OperatorMatrix {
        k_max,
        p: 2.0,
        entries,
    })
}

/// Finite section of the H²-adjoint T*_μ(f) = S*(Σ_γ conj(μ(γ)) f(γz)·γz) − f,
/// with the backward shift applied exactly on coefficient sequences.
pub fn t_mu_adjoint_matrix(mu: &GroupMeasure, k_max: usize) -> Result<OperatorMatrix> {
    if k_max == 0 {
        return Err(Error::Precondition("band must be at least 1".into()));
    }
    extraction_guard(k_max + 1)?;
    let m = (32 * (k_max + 1)).max(512);
    let atoms: Vec<(MoebiusMap, Complex64)> =
        mu.atoms().iter().map(|(g, w)| (*g, w.conj())).collect();
    let columns: Vec<Vec<Complex64>> = exec::map_range(k_max + 1, |k| {
        let pre_shift = |z: Complex64| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (g, wc) in &atoms {
                let moved = g.apply_finite(z);
                acc += wc * moved.powu(k as u32 + 1);
            }
            acc
        };
        // orders 0..=K+1, then S*: drop the constant, shift down.
        let raw = extract_coeffs(pre_shift, k_max + 1, m);
        (0..=k_max)
            .map(|j| raw[j + 1] - if j == k { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
            .collect()
    });
    let entries: Vec<Vec<Complex64>> = (0..=k_max)
        .map(|j| (0..=k_max).map(|k| columns[k][j]).collect())
        .collect();
    Ok(OperatorMatrix {
        k_max,
        p: 2.0,
        entries,
    })
}

/// (1/2πi) ∮ residual(f; z) dz over the circle (center, radius) by
/// 2048-point trapezoid quadrature. For entire f this isolates
/// −Σ_{γ.∞ inside} μ(γ).
pub fn contour_charge(
    mu: &GroupMeasure,
    f: impl Fn(Complex64) -> Complex64 + Sync,
    center: Complex64,
    radius: f64,
) -> Result<Complex64> {
    if !(radius > 0.0) {
        return Err(Error::Geometry(format!("radius must be positive, got {radius}")));
    }
    // the contour must avoid every pole by 1e-3 ...
    for (g, _) in mu.atoms() {
        if let ExtendedComplex::Finite(p) = g.pole_image() {
            if ((p - center).norm() - radius).abs() < 1e-3 {
                return Err(Error::Geometry(format!(
                    "contour passes within 1e-3 of the pole {p}"
                )));
            }
        }
    }
    // ... and stay clear of the unit circle.
    let c = center.norm();
    let clear = c - radius > 1.0 + 1e-3 || radius - c > 1.0 + 1e-3 || c + radius < 1.0 - 1e-3;
    if !clear {
        return Err(Error::Geometry(
            "contour crosses or touches the unit circle".into(),
        ));
    }
    let m = 2048usize;
    let inverses: Vec<(MoebiusMap, Complex64)> =
        mu.atoms().iter().map(|(g, w)| (g.inverse(), *w)).collect();
    let samples = exec::map_range(m, |idx| {
        let w = Complex64::from_polar(radius, TAU * idx as f64 / m as f64);
        let z = center + w;
        let mut acc = Complex64::new(0.0, 0.0);
        for (ginv, weight) in &inverses {
            let pulled = ginv.apply_finite(z);
            let der = ginv.derivative(z).expect("contour avoids the poles");
            acc += weight * f(pulled) * der;
        }
        acc -= f(z);
        acc -= borel_series(mu, z).expect("contour avoids the poles");
        // dz = i w dθ; the 1/(2πi) and the i cancel into w/m.
        acc * w
    });
    Ok(samples.iter().sum::<Complex64>() / m as f64)
}

/// Stolz-angle coverage of the boundary by a point cloud.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StolzReport {
    pub alpha: f64,
    pub eps: f64,
    pub boundary_grid: usize,
    pub covered: Vec<bool>,
    pub coverage_fraction: f64,
}

/// Boundary angle ξ counts as covered when some point satisfies
/// |z − ξ| < α(1 − |z|) and 1 − |z| < ε.
pub fn stolz_coverage(
    points: &[Complex64],
    alpha: f64,
    eps: f64,
    boundary_grid: usize,
) -> Result<StolzReport> {
    if !(alpha > 1.0) {
        return Err(Error::Precondition(format!("alpha must exceed 1, got {alpha}")));
    }
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("eps must be positive, got {eps}")));
    }
    if let Some(bad) = points.iter().find(|z| z.norm() >= 1.0) {
        return Err(Error::Precondition(format!(
            "stolz coverage needs disk points, got |z| = {}",
            bad.norm()
        )));
    }
    let close: Vec<Complex64> = points
        .iter()
        .copied()
        .filter(|z| 1.0 - z.norm() < eps)
        .collect();
    let covered = exec::map_range(boundary_grid, |mth| {
        let xi = Complex64::from_polar(1.0, TAU * mth as f64 / boundary_grid as f64);
        close.iter().any(|z| (z - xi).norm() < alpha * (1.0 - z.norm()))
    });
    let coverage_fraction =
        covered.iter().filter(|&&c| c).count() as f64 / boundary_grid as f64;
    Ok(StolzReport {
        alpha,
        eps,
        boundary_grid,
        covered,
        coverage_fraction,
    })
}
