//! The analytic transforms: Cauchy transform (both sides of the circle),
//! log-Poisson transform, coefficient recovery, Borel pole series, Blaschke
//! products, Hardy-norm estimation, and the boundary-gap statistics.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmeasure::{CircleMeasure, FourierCoeffs};
use crate::error::{Error, Result};
use crate::exec;
use crate::gmeasure::GroupMeasure;
use crate::moebius::ExtendedComplex;

/// Circle exclusion band: |z| within this of 1 is rejected.
const CIRCLE_TOL: f64 = 1e-9;
/// Pole exclusion distance for the Borel series.
const BOREL_POLE_TOL: f64 = 1e-12;
/// Default quadrature resolution on circles.
pub const DEFAULT_QUAD: usize = 4096;

/// The standard radius schedule 1 − 2^{−j}, j = 1..14.
pub fn default_radii() -> Vec<f64> {
    (1..=14).map(|j| 1.0 - 2f64.powi(-j)).collect()
}

/// Schedule refined near the boundary (j = 1..16), used by the Aleksandrov
/// statistic.
pub fn refined_radii() -> Vec<f64> {
    (1..=16).map(|j| 1.0 - 2f64.powi(-j)).collect()
}

/// Effective atom list: atomic measures as-is; grid densities as quadrature
/// atoms of weight v_j/M.
fn effective_atoms(nu: &CircleMeasure) -> Option<Vec<(Complex64, Complex64)>> {
    if let Some((angles, weights)) = nu.as_atomic() {
        return Some(
            angles
                .iter()
                .zip(weights)
                .map(|(t, w)| (Complex64::from_polar(1.0, *t), *w))
                .collect(),
        );
    }
    if let Some(values) = nu.as_grid() {
        let m = values.len();
        return Some(
            values
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    (
                        Complex64::from_polar(1.0, TAU * j as f64 / m as f64),
                        v / m as f64,
                    )
                })
                .collect(),
        );
    }
    None
}

/// Cauchy transform f_ν(z) = Σ w_j/(ξ_j − z) (atomic/grid) or the interior /
/// exterior coefficient series (Fourier form). Defined off the unit circle.
pub fn cauchy_transform(nu: &CircleMeasure, z: Complex64) -> Result<Complex64> {
    if (z.norm() - 1.0).abs() <= CIRCLE_TOL {
        return Err(Error::Domain(format!(
            "cauchy transform is undefined on the unit circle (|z| = {})",
            z.norm()
        )));
    }
    if let Some(atoms) = effective_atoms(nu) {
        return Ok(atoms.iter().map(|(xi, w)| w / (xi - z)).sum());
    }
    let c = nu.as_fourier().expect("remaining representation");
    let k_max = c.k_max() as i64;
    if z.norm() < 1.0 {
        // Σ_{k≥0} a_{k+1} z^k, truncated at the band.
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (0..k_max).rev() {
            acc = acc * z + c.get(k + 1);
        }
        Ok(acc)
    } else {
        // −Σ_{k≥0} a_{−k} z^{−k−1}
        let w = z.finv();
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (0..=k_max).rev() {
            acc = acc * w + c.get(-k);
        }
        Ok(-acc * w)
    }
}

/// Truncation bound for Fourier-form evaluation: max|a|·q^K/(1−q) with
/// q = min(|z|, 1/|z|); 0 for exact (atomic/grid) representations.
pub fn cauchy_tail_bound(nu: &CircleMeasure, z: Complex64) -> f64 {
    match nu.as_fourier() {
        None => 0.0,
        Some(c) => {
            let q = z.norm().min(z.norm().recip());
            let a_max = c.values().iter().map(|a| a.norm()).fold(0.0, f64::max);
            a_max * q.powi(c.k_max() as i32) / (1.0 - q)
        }
    }
}

/// Value of the log-Poisson transform p_ν(z) with its holomorphic /
/// antiholomorphic split.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LogPoisson {
    /// p_ν(z) = log(1−|z|²) + f₊ + f₋ (real for positive ν).
    pub value: [f64; 2],
    /// f₊(z) = Σ_{k≥1} a_k z^k / k.
    pub f_plus: [f64; 2],
    /// f₋(z̄) = Σ_{k≥1} a_{−k} z̄^k / k.
    pub f_minus: [f64; 2],
    /// Series tail bound |z|^{K+1}/((K+1)(1−|z|)) per part; 0 when the
    /// closed form is used.
    pub tail_bound: f64,
}

impl LogPoisson {
    pub fn value_c(&self) -> Complex64 {
        Complex64::new(self.value[0], self.value[1])
    }
}

/// p_ν(z) = ∫ ĉ_B(z, ξ) dν(ξ) for |z| < 1.
pub fn log_poisson(nu: &CircleMeasure, z: Complex64) -> Result<LogPoisson> {
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!(
            "log-Poisson transform needs |z| < 1, got |z| = {}",
            z.norm()
        )));
    }
    let log_term = (1.0 - z.norm_sqr()).ln();
    let (f_plus, f_minus, tail) = if let Some(atoms) = effective_atoms(nu) {
        // Σ_k (z ξ̄)^k/k = −Log(1 − z ξ̄): exact per-atom kernels.
        let fp: Complex64 = atoms
            .iter()
            .map(|(xi, w)| -w * (1.0 - z * xi.conj()).ln())
            .sum();
        let fm: Complex64 = atoms
            .iter()
            .map(|(xi, w)| -w * (1.0 - z.conj() * xi).ln())
            .sum();
        (fp, fm, 0.0)
    } else {
        let c = nu.as_fourier().expect("remaining representation");
        let k_max = c.k_max() as i64;
        let mut fp = Complex64::new(0.0, 0.0);
        let mut fm = Complex64::new(0.0, 0.0);
        let zb = z.conj();
        for k in (1..=k_max).rev() {
            // Horner on z^k/k needs the harmonic weights folded in per term.
            fp = fp * z + c.get(k) / k as f64;
            fm = fm * zb + c.get(-k) / k as f64;
        }
        fp *= z;
        fm *= zb;
        let r = z.norm();
        let tail = r.powi(k_max as i32 + 1) / ((k_max as f64 + 1.0) * (1.0 - r));
        (fp, fm, tail)
    };
    let value = log_term + f_plus + f_minus;
    Ok(LogPoisson {
        value: [value.re, value.im],
        f_plus: [f_plus.re, f_plus.im],
        f_minus: [f_minus.re, f_minus.im],
        tail_bound: tail,
    })
}

/// Recover the band coefficients a_k, 1 ≤ |k| ≤ K, from a callable
/// z ↦ p_ν(z) by coefficient extraction on the circle |z| = r0.
pub fn taylor_recover(
    p: impl Fn(Complex64) -> Complex64,
    k_max: usize,
    r0: f64,
    quad_points: usize,
) -> Result<FourierCoeffs> {
    if !(r0 > 0.0 && r0 < 1.0) {
        return Err(Error::Config(format!("r0 must lie in (0,1), got {r0}")));
    }
    if r0.powi(k_max as i32) < 1e-14 {
        return Err(Error::Accuracy(format!(
            "coefficient extraction at r0 = {r0} is ill-conditioned beyond K = {k_max}"
        )));
    }
    let m = quad_points.max(4 * (k_max + 1));
    let samples: Vec<Complex64> = (0..m)
        .map(|j| {
            let z = Complex64::from_polar(r0, TAU * j as f64 / m as f64);
            p(z) - (1.0 - z.norm_sqr()).ln()
        })
        .collect();
    let mut values = vec![Complex64::new(0.0, 0.0); 2 * k_max + 1];
    values[k_max] = Complex64::new(1.0, 0.0);
    for k in 1..=k_max {
        let mut pos = Complex64::new(0.0, 0.0);
        let mut neg = Complex64::new(0.0, 0.0);
        for (j, s) in samples.iter().enumerate() {
            let w = Complex64::from_polar(1.0, -(k as f64) * TAU * j as f64 / m as f64);
            pos += s * w;
            neg += s * w.conj();
        }
        let scale = k as f64 / (m as f64 * r0.powi(k as i32));
        values[k_max + k] = pos * scale;
        values[k_max - k] = neg * scale;
    }
    FourierCoeffs::new(k_max, values)
}

/// Borel pole series Σ_γ μ(γ)/(z − γ.∞); rotation atoms (pole at ∞)
/// contribute zero.
pub fn borel_series(mu: &GroupMeasure, z: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (g, w) in mu.atoms() {
        match g.pole_image() {
            ExtendedComplex::Infinity => {}
            ExtendedComplex::Finite(p) => {
                if (z - p).norm() < BOREL_POLE_TOL {
                    return Err(Error::Domain(format!("borel series pole at z = {z}")));
                }
                acc += w / (z - p);
            }
        }
    }
    Ok(acc)
}

/// Blaschke product over the support: Π c_γ γ⁻¹(z), each factor normalized
/// to be positive at the origin (c_γ = 1 when γ.0 = 0). Zeros exactly at
/// {γ.0}; |B| ≤ 1 on the disk.
pub fn blaschke_product(mu: &GroupMeasure, z: Complex64) -> Result<Complex64> {
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!(
            "blaschke product needs |z| < 1, got |z| = {}",
            z.norm()
        )));
    }
    let mut acc = Complex64::new(1.0, 0.0);
    for (g, _) in mu.atoms() {
        let ginv = g.inverse();
        let w0 = ginv.apply_finite(Complex64::new(0.0, 0.0));
        let factor = ginv.apply_finite(z);
        let c = if w0.norm() < 1e-15 {
            Complex64::new(1.0, 0.0)
        } else {
            w0.conj() / w0.norm()
        };
        acc *= c * factor;
    }
    Ok(acc)
}

/// Hardy-norm estimate over a finite radius schedule: a lower bound on the
/// true sup over r < 1.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HardyEstimate {
    pub p: f64,
    pub radii: Vec<f64>,
    /// ‖f‖_p on each circle, same order as `radii`.
    pub values: Vec<f64>,
    pub sup_value: f64,
}

/// ‖f‖_p(r) = (mean over the grid of |f(re^{it})|^p)^{1/p}, sup over the
/// schedule.
pub fn hardy_norm(
    f: impl Fn(Complex64) -> Complex64 + Sync,
    p: f64,
    radii: &[f64],
    quad_points: usize,
) -> Result<HardyEstimate> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Config(format!("exponent p must be positive, got {p}")));
    }
    let mut values = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Config(format!("radius {r} outside (0,1)")));
        }
        let samples = exec::map_range(quad_points, |j| {
            let z = Complex64::from_polar(r, TAU * j as f64 / quad_points as f64);
            f(z).norm().powf(p)
        });
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::Evaluation(format!(
                "non-finite sample on the circle r = {r}"
            )));
        }
        let mean = samples.iter().sum::<f64>() / quad_points as f64;
        values.push(mean.powf(p.recip()));
    }
    let sup_value = values.iter().copied().fold(0.0, f64::max);
    Ok(HardyEstimate {
        p,
        radii: radii.to_vec(),
        values,
        sup_value,
    })
}

/// Grid densities are trigonometric interpolants of their samples; near the
/// boundary the kernel quadrature sees the quadrature atoms instead of the
/// density, so boundary statistics evaluate grid forms through their exact
/// band.
fn boundary_eval_form(nu: &CircleMeasure) -> Option<CircleMeasure> {
    nu.as_grid().map(|values| {
        let k = values.len() / 2 - 1;
        CircleMeasure::fourier(nu.fourier_coeffs(k)).expect("grid mean 1 gives a0 = 1")
    })
}

/// The singularity statistic (1−p)·‖f_ν‖_p at each p ∈ (0,1), with the
/// radius schedule refined near the boundary.
pub fn aleksandrov_statistic(nu: &CircleMeasure, p_list: &[f64]) -> Result<Vec<(f64, f64)>> {
    let converted = boundary_eval_form(nu);
    let nu = converted.as_ref().unwrap_or(nu);
    let radii = refined_radii();
    let mut out = Vec::with_capacity(p_list.len());
    for &p in p_list {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Config(format!("aleksandrov needs p in (0,1), got {p}")));
        }
        let est = hardy_norm(
            |z| cauchy_transform(nu, z).expect("schedule stays off the circle"),
            p,
            &radii,
            DEFAULT_QUAD,
        )?;
        out.push((p, (1.0 - p) * est.sup_value));
    }
    Ok(out)
}

/// Samples of the two-sided gap g_r(t) = f_ν(re^{it}) − f_ν(e^{it}/r), its
/// L¹ mean, and the fraction of the grid where it has already vanished.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryGap {
    pub r: f64,
    pub eps: f64,
    pub l1: f64,
    pub vanish_fraction: f64,
    /// |g_r| on the angle grid.
    pub abs_samples: Vec<f64>,
}

/// Default vanish threshold ε(r) = 125·(1−r): the gap of an atomic measure
/// decays like (1−r) off the atoms, so the threshold must scale with it.
pub fn default_gap_eps(r: f64) -> f64 {
    125.0 * (1.0 - r)
}

pub fn boundary_gap(
    nu: &CircleMeasure,
    r: f64,
    quad_points: usize,
    eps: Option<f64>,
) -> Result<BoundaryGap> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Config(format!("boundary gap needs r in (0,1), got {r}")));
    }
    let converted = boundary_eval_form(nu);
    let nu = converted.as_ref().unwrap_or(nu);
    let eps = eps.unwrap_or_else(|| default_gap_eps(r));
    let abs_samples = exec::map_range(quad_points, |j| {
        let t = TAU * j as f64 / quad_points as f64;
        let inner = cauchy_transform(nu, Complex64::from_polar(r, t))
            .expect("r < 1 stays off the circle");
        let outer = cauchy_transform(nu, Complex64::from_polar(r.recip(), t))
            .expect("1/r > 1 stays off the circle");
        (inner - outer).norm()
    });
    let l1 = abs_samples.iter().sum::<f64>() / quad_points as f64;
    let vanish = abs_samples.iter().filter(|&&s| s < eps).count() as f64 / quad_points as f64;
    Ok(BoundaryGap {
        r,
        eps,
        l1,
        vanish_fraction: vanish,
        abs_samples,
    })
}
