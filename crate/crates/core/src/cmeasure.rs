//! Measures on the unit circle in three interchangeable representations —
//! atomic, Fourier band, grid density — with pushforward under Möbius maps
//! and the Markov (stationarity) operator.
//!
//! Normalization convention ("unit harmonic mass"): a₀ = 1. Atomic weights
//! sum to one, the grid density has mean one, and a_k = Σ_j w_j e^{−ikθ_j},
//! so the Cauchy transform of a point mass at ξ is 1/(ξ − z) exactly.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::gmeasure::GroupMeasure;
use crate::group::ELEMENT_CAP;
use crate::moebius::MoebiusMap;

/// Default band limit for Fourier-form measures and conversions.
pub const DEFAULT_BAND: usize = 64;
/// Default grid resolution (equispaced angles, trapezoid quadrature).
pub const DEFAULT_GRID: usize = 1024;
const MASS_TOL: f64 = 1e-9;
/// Atom merge tolerance (radians) and weight floor used by markov_step.
const ANGLE_MERGE_TOL: f64 = 1e-12;
const WEIGHT_FLOOR: f64 = 1e-15;

/// Banded Fourier coefficients a_k, |k| ≤ K, stored with a₀ in the middle.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FourierCoeffs {
    k_max: usize,
    values: Vec<[f64; 2]>,
}

impl FourierCoeffs {
    pub fn new(k_max: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != 2 * k_max + 1 {
            return Err(Error::Config(format!(
                "band {k_max} needs {} coefficients, got {}",
                2 * k_max + 1,
                values.len()
            )));
        }
        Ok(FourierCoeffs {
            k_max,
            values: values.iter().map(|c| [c.re, c.im]).collect(),
        })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// a_k; zero outside the band.
    pub fn get(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.k_max {
            Complex64::new(0.0, 0.0)
        } else {
            let v = self.values[(k + self.k_max as i64) as usize];
            Complex64::new(v[0], v[1])
        }
    }

    /// Coefficients in order k = −K..K.
    pub fn values(&self) -> Vec<Complex64> {
        self.values.iter().map(|v| Complex64::new(v[0], v[1])).collect()
    }

    /// max |a_k^{(1)} − a_k^{(2)}| over the union band.
    pub fn max_coeff_distance(&self, other: &FourierCoeffs) -> f64 {
        let k = self.k_max.max(other.k_max) as i64;
        (-k..=k)
            .map(|i| (self.get(i) - other.get(i)).norm())
            .fold(0.0, f64::max)
    }

    /// a_{−k} = conj(a_k) within tolerance: the coefficient pattern of real
    /// measures.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..=self.k_max as i64).all(|k| (self.get(-k) - self.get(k).conj()).norm() <= tol)
    }

    /// Evaluate the trigonometric polynomial Σ a_k e^{ikθ} by Horner in
    /// e^{±iθ}.
    pub fn eval(&self, theta: f64) -> Complex64 {
        let u = Complex64::from_polar(1.0, theta);
        let ub = u.conj();
        let mut pos = Complex64::new(0.0, 0.0);
        let mut neg = Complex64::new(0.0, 0.0);
        for k in (1..=self.k_max as i64).rev() {
            pos = (pos + self.get(k)) * u;
            neg = (neg + self.get(-k)) * ub;
        }
        pos + neg + self.get(0)
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Atomic {
        angles: Vec<f64>,
        weights: Vec<Complex64>,
    },
    Fourier(FourierCoeffs),
    Grid {
        values: Vec<Complex64>,
    },
}

/// A measure on the unit circle with a₀ = 1.
#[derive(Clone, Debug)]
pub struct CircleMeasure {
    repr: Repr,
}

/// Equispaced quadrature angles t_j = 2πj/M.
pub fn grid_angles(m: usize) -> Vec<f64> {
    (0..m).map(|j| TAU * j as f64 / m as f64).collect()
}

fn reduce_angle(t: f64) -> f64 {
    t.rem_euclid(TAU)
}

impl CircleMeasure {
    /// Lebesgue measure: a₀ = 1, everything else 0.
    pub fn lebesgue() -> Self {
        CircleMeasure {
            repr: Repr::Fourier(
                FourierCoeffs::new(0, vec![Complex64::new(1.0, 0.0)]).expect("band 0"),
            ),
        }
    }

    /// Unit point mass at the given angle.
    pub fn point_mass(theta: f64) -> Self {
        CircleMeasure {
            repr: Repr::Atomic {
                angles: vec![reduce_angle(theta)],
                weights: vec![Complex64::new(1.0, 0.0)],
            },
        }
    }

    /// Atomic measure; weights must sum to 1 within 1e−9.
    pub fn atomic(angles: Vec<f64>, weights: Vec<Complex64>) -> Result<Self> {
        if angles.len() != weights.len() {
            return Err(Error::Config("angles/weights length mismatch".into()));
        }
        if angles.is_empty() {
            return Err(Error::Config("atomic measure needs at least one atom".into()));
        }
        let mass: Complex64 = weights.iter().sum();
        if (mass - 1.0).norm() > MASS_TOL {
            return Err(Error::Precondition(format!(
                "atomic weights must sum to 1, got {mass}"
            )));
        }
        Ok(CircleMeasure {
            repr: Repr::Atomic {
                angles: angles.into_iter().map(reduce_angle).collect(),
                weights,
            },
        })
    }

    /// Atomic measure with equal weights 1/n.
    pub fn atomic_uniform(angles: Vec<f64>) -> Result<Self> {
        let n = angles.len();
        if n == 0 {
            return Err(Error::Config("atomic measure needs at least one atom".into()));
        }
        let w = Complex64::new((n as f64).recip(), 0.0);
        Self::atomic(angles, vec![w; n])
    }

    /// Grid density; mean must be 1 within 1e−9.
    pub fn grid(values: Vec<Complex64>) -> Result<Self> {
        if values.len() < 4 {
            return Err(Error::Config("grid form needs at least 4 samples".into()));
        }
        let mean: Complex64 = values.iter().sum::<Complex64>() / values.len() as f64;
        if (mean - 1.0).norm() > MASS_TOL {
            return Err(Error::Precondition(format!(
                "grid density must have mean 1, got {mean}"
            )));
        }
        Ok(CircleMeasure {
            repr: Repr::Grid { values },
        })
    }

    /// Grid form of the density t ↦ f(t) sampled at M equispaced angles,
    /// rescaled to mean one.
    pub fn grid_from_density(m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values: Vec<Complex64> = grid_angles(m)
            .into_iter()
            .map(|t| Complex64::new(f(t), 0.0))
            .collect();
        let mean: Complex64 = values.iter().sum::<Complex64>() / m as f64;
        if mean.norm() < 1e-12 {
            return Err(Error::Config("density integrates to zero".into()));
        }
        Self::grid(values.into_iter().map(|v| v / mean).collect())
    }

    /// Fourier-band measure; a₀ must be 1 within 1e−9.
    pub fn fourier(coeffs: FourierCoeffs) -> Result<Self> {
        if (coeffs.get(0) - 1.0).norm() > MASS_TOL {
            return Err(Error::Precondition(format!(
                "fourier form needs a0 = 1, got {}",
                coeffs.get(0)
            )));
        }
        Ok(CircleMeasure {
            repr: Repr::Fourier(coeffs),
        })
    }

    fn from_repr(repr: Repr) -> Self {
        CircleMeasure { repr }
    }

    pub fn kind(&self) -> &'static str {
        match &self.repr {
            Repr::Atomic { .. } => "atomic",
            Repr::Fourier(_) => "fourier",
            Repr::Grid { .. } => "grid",
        }
    }

    pub fn as_atomic(&self) -> Option<(&[f64], &[Complex64])> {
        match &self.repr {
            Repr::Atomic { angles, weights } => Some((angles, weights)),
            _ => None,
        }
    }

    pub fn as_fourier(&self) -> Option<&FourierCoeffs> {
        match &self.repr {
            Repr::Fourier(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_grid(&self) -> Option<&[Complex64]> {
        match &self.repr {
            Repr::Grid { values } => Some(values),
            _ => None,
        }
    }

    /// Resolution descriptor for report configs: atom count, band, or grid
    /// size.
    pub fn resolution(&self) -> usize {
        match &self.repr {
            Repr::Atomic { angles, .. } => angles.len(),
            Repr::Fourier(c) => c.k_max(),
            Repr::Grid { values } => values.len(),
        }
    }

    /// Real non-negative weights / density (Hermitian band for the Fourier
    /// form).
    pub fn is_positive(&self, tol: f64) -> bool {
        match &self.repr {
            Repr::Atomic { weights, .. } => weights
                .iter()
                .all(|w| w.im.abs() <= tol && w.re >= -tol),
            Repr::Grid { values } => values
                .iter()
                .all(|v| v.im.abs() <= tol && v.re >= -tol),
            Repr::Fourier(c) => c.is_hermitian(tol),
        }
    }

    /// a_k = Σ w_j e^{−ikθ_j} (atomic) / trapezoid transform (grid) /
    /// truncation-extension (fourier), for |k| ≤ K.
    pub fn fourier_coeffs(&self, k_max: usize) -> FourierCoeffs {
        match &self.repr {
            Repr::Atomic { angles, weights } => {
                let values = exec::map_range(2 * k_max + 1, |idx| {
                    let k = idx as i64 - k_max as i64;
                    angles
                        .iter()
                        .zip(weights)
                        .map(|(t, w)| w * Complex64::from_polar(1.0, -(k as f64) * t))
                        .sum()
                });
                FourierCoeffs::new(k_max, values).expect("length matches band")
            }
            Repr::Grid { values } => {
                let m = values.len();
                let coeffs = exec::map_range(2 * k_max + 1, |idx| {
                    let k = idx as i64 - k_max as i64;
                    values
                        .iter()
                        .enumerate()
                        .map(|(j, v)| {
                            v * Complex64::from_polar(1.0, -(k as f64) * TAU * j as f64 / m as f64)
                        })
                        .sum::<Complex64>()
                        / m as f64
                });
                FourierCoeffs::new(k_max, coeffs).expect("length matches band")
            }
            Repr::Fourier(c) => {
                let values = ((-(k_max as i64))..=(k_max as i64)).map(|k| c.get(k)).collect();
                FourierCoeffs::new(k_max, values).expect("length matches band")
            }
        }
    }

    /// Pushforward γ_*ν.
    pub fn pushforward(&self, g: &MoebiusMap) -> CircleMeasure {
        match &self.repr {
            Repr::Atomic { angles, weights } => {
                let moved = angles
                    .iter()
                    .map(|t| {
                        let image = g.apply_finite(Complex64::from_polar(1.0, *t));
                        reduce_angle(image.arg())
                    })
                    .collect();
                CircleMeasure::from_repr(Repr::Atomic {
                    angles: moved,
                    weights: weights.clone(),
                })
            }
            Repr::Grid { values } => {
                let m = values.len();
                let band = m / 2 - 1;
                let coeffs = self.fourier_coeffs(band);
                let ginv = g.inverse();
                let out = exec::map_range(m, |j| {
                    pushforward_density_at(&coeffs, &ginv, TAU * j as f64 / m as f64)
                });
                CircleMeasure::from_repr(Repr::Grid { values: out })
            }
            Repr::Fourier(c) => {
                let k = c.k_max();
                let m = (4 * k).max(256);
                let ginv = g.inverse();
                let samples = exec::map_range(m, |j| {
                    pushforward_density_at(c, &ginv, TAU * j as f64 / m as f64)
                });
                let grid = CircleMeasure::from_repr(Repr::Grid { values: samples });
                CircleMeasure::from_repr(Repr::Fourier(grid.fourier_coeffs(k)))
            }
        }
    }

    /// One application of the Markov operator: Σ_γ μ(γ) · γ_*ν, in the
    /// representation of ν. The mass of μ should be 1 (the result keeps
    /// a₀ = 1 exactly then); complex weights are allowed.
    pub fn markov_step(&self, mu: &GroupMeasure) -> Result<CircleMeasure> {
        match &self.repr {
            Repr::Atomic { angles, weights } => {
                let mut out_angles: Vec<f64> = Vec::new();
                let mut out_weights: Vec<Complex64> = Vec::new();
                for (g, w_mu) in mu.atoms() {
                    for (t, w) in angles.iter().zip(weights) {
                        let image = g.apply_finite(Complex64::from_polar(1.0, *t));
                        out_angles.push(reduce_angle(image.arg()));
                        out_weights.push(w * w_mu);
                        if out_angles.len() > ELEMENT_CAP {
                            return Err(Error::Resource(format!(
                                "atomic markov step exceeds the {ELEMENT_CAP}-atom cap"
                            )));
                        }
                    }
                }
                let (angles, weights) = merge_atoms(out_angles, out_weights);
                Ok(CircleMeasure::from_repr(Repr::Atomic { angles, weights }))
            }
            Repr::Grid { values } => {
                let m = values.len();
                let band = m / 2 - 1;
                let coeffs = self.fourier_coeffs(band);
                let inverses: Vec<(MoebiusMap, Complex64)> =
                    mu.atoms().iter().map(|(g, w)| (g.inverse(), *w)).collect();
                let out = exec::map_range(m, |j| {
                    let theta = TAU * j as f64 / m as f64;
                    inverses
                        .iter()
                        .map(|(ginv, w)| w * pushforward_density_at(&coeffs, ginv, theta))
                        .sum()
                });
                Ok(CircleMeasure::from_repr(Repr::Grid { values: out }))
            }
            Repr::Fourier(c) => {
                let k = c.k_max();
                let m = (4 * k).max(256);
                let inverses: Vec<(MoebiusMap, Complex64)> =
                    mu.atoms().iter().map(|(g, w)| (g.inverse(), *w)).collect();
                let samples = exec::map_range(m, |j| {
                    let theta = TAU * j as f64 / m as f64;
                    inverses
                        .iter()
                        .map(|(ginv, w)| w * pushforward_density_at(c, ginv, theta))
                        .sum()
                });
                let grid = CircleMeasure::from_repr(Repr::Grid { values: samples });
                Ok(CircleMeasure::from_repr(Repr::Fourier(
                    grid.fourier_coeffs(k),
                )))
            }
        }
    }

    /// Fixed-point iteration of the Markov operator for grid/Fourier forms.
    /// Returns the last iterate and the per-step coefficient distances.
    pub fn stationary_iterate(
        &self,
        mu: &GroupMeasure,
        max_iter: usize,
        tol: f64,
    ) -> Result<(CircleMeasure, Vec<f64>)> {
        if matches!(self.repr, Repr::Atomic { .. }) {
            return Err(Error::Unsupported(
                "stationary iteration needs the grid or fourier form (atomic supports blow up)"
                    .into(),
            ));
        }
        if !mu.is_probability() {
            return Err(Error::Precondition(
                "stationary iteration needs a probability measure".into(),
            ));
        }
        if !(tol > 0.0) {
            return Err(Error::Precondition("tol must be positive".into()));
        }
        let band = match &self.repr {
            Repr::Fourier(c) => c.k_max(),
            _ => DEFAULT_BAND,
        };
        let mut current = self.clone();
        let mut coeffs = current.fourier_coeffs(band);
        let mut history = Vec::new();
        for _ in 0..max_iter {
            let next = current.markov_step(mu)?;
            let next_coeffs = next.fourier_coeffs(band);
            let dist = next_coeffs.max_coeff_distance(&coeffs);
            history.push(dist);
            current = next;
            coeffs = next_coeffs;
            if dist <= tol {
                break;
            }
        }
        Ok((current, history))
    }
}

/// Density of γ_*ν at angle θ: d(γ⁻¹ξ) · |(γ⁻¹)′(ξ)| with ξ = e^{iθ}, where
/// `ginv` is γ⁻¹ and the input density is the trig polynomial `coeffs`.
fn pushforward_density_at(coeffs: &FourierCoeffs, ginv: &MoebiusMap, theta: f64) -> Complex64 {
    let xi = Complex64::from_polar(1.0, theta);
    let pre = ginv.apply_finite(xi);
    let jac = ginv
        .derivative(xi)
        .expect("circle points are never poles of a disk automorphism")
        .norm();
    coeffs.eval(pre.arg()) * jac
}

/// Merge atoms closer than the angular tolerance (0 and 2π identified),
/// then drop weights below the floor.
fn merge_atoms(angles: Vec<f64>, weights: Vec<Complex64>) -> (Vec<f64>, Vec<Complex64>) {
    let mut order: Vec<usize> = (0..angles.len()).collect();
    order.sort_by(|&i, &j| angles[i].total_cmp(&angles[j]));
    let mut out_angles: Vec<f64> = Vec::new();
    let mut out_weights: Vec<Complex64> = Vec::new();
    for idx in order {
        let t = angles[idx];
        let w = weights[idx];
        match out_angles.last() {
            Some(&prev) if (t - prev).abs() <= ANGLE_MERGE_TOL => {
                *out_weights.last_mut().expect("non-empty") += w;
            }
            _ => {
                out_angles.push(t);
                out_weights.push(w);
            }
        }
    }
    // wrap-around pair
    if out_angles.len() >= 2 {
        let last = out_angles.len() - 1;
        if (TAU - out_angles[last] + out_angles[0]).abs() <= ANGLE_MERGE_TOL {
            let w = out_weights[last];
            out_weights[0] += w;
            out_angles.pop();
            out_weights.pop();
        }
    }
    let kept: Vec<(f64, Complex64)> = out_angles
        .into_iter()
        .zip(out_weights)
        .filter(|(_, w)| w.norm() >= WEIGHT_FLOOR)
        .collect();
    kept.into_iter().unzip()
}

// JSON: {"kind": "atomic"|"fourier"|"grid", ...}
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum MeasureRepr {
    Atomic {
        angles: Vec<f64>,
        weights: Vec<[f64; 2]>,
    },
    Fourier {
        k_max: usize,
        coeffs: Vec<[f64; 2]>,
    },
    Grid {
        values: Vec<[f64; 2]>,
    },
}

impl Serialize for CircleMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match &self.repr {
            Repr::Atomic { angles, weights } => MeasureRepr::Atomic {
                angles: angles.clone(),
                weights: weights.iter().map(|w| [w.re, w.im]).collect(),
            },
            Repr::Fourier(c) => MeasureRepr::Fourier {
                k_max: c.k_max(),
                coeffs: c.values.clone(),
            },
            Repr::Grid { values } => MeasureRepr::Grid {
                values: values.iter().map(|v| [v.re, v.im]).collect(),
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CircleMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = MeasureRepr::deserialize(d)?;
        let to_c = |v: &[f64; 2]| Complex64::new(v[0], v[1]);
        match repr {
            MeasureRepr::Atomic { angles, weights } => {
                CircleMeasure::atomic(angles, weights.iter().map(to_c).collect())
                    .map_err(D::Error::custom)
            }
            MeasureRepr::Fourier { k_max, coeffs } => {
                let fc = FourierCoeffs::new(k_max, coeffs.iter().map(to_c).collect())
                    .map_err(D::Error::custom)?;
                CircleMeasure::fourier(fc).map_err(D::Error::custom)
            }
            MeasureRepr::Grid { values } => {
                CircleMeasure::grid(values.iter().map(to_c).collect()).map_err(D::Error::custom)
            }
        }
    }
}
