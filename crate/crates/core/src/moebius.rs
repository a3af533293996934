//! Möbius maps of the unit disk: the group PSU(1,1) acting on the Riemann
//! sphere, together with the hyperbolic scalar functions (derivative,
//! Busemann cocycle, distance) everything else consumes.
//!
//! A map is stored as a normalized pair `(a, b)` with |a|² − |b|² = 1,
//! representing z ↦ (az + b)/(b̄z + ā). The pairs (a, b) and (−a, −b) are
//! the same map; construction canonicalizes the sign so equal maps compare
//! equal.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Inputs closer than this to a pole are treated as the pole.
pub const POLE_TOL: f64 = 1e-12;
/// Threshold for the canonical-sign tie-break chain.
const SIGN_TOL: f64 = 1e-12;

/// A point of the Riemann sphere: a finite complex value or ∞.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtendedComplex {
    pub fn finite(z: Complex64) -> Self {
        debug_assert!(z.re.is_finite() && z.im.is_finite(), "non-finite point");
        ExtendedComplex::Finite(z)
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ExtendedComplex::Infinity)
    }

    /// The finite value, if any.
    pub fn as_finite(&self) -> Option<Complex64> {
        match self {
            ExtendedComplex::Finite(z) => Some(*z),
            ExtendedComplex::Infinity => None,
        }
    }

    /// Spherical-ish comparison helper for tests and dedup: ∞ only equals ∞.
    pub fn approx_eq(&self, other: &ExtendedComplex, tol: f64) -> bool {
        match (self, other) {
            (ExtendedComplex::Infinity, ExtendedComplex::Infinity) => true,
            (ExtendedComplex::Finite(a), ExtendedComplex::Finite(b)) => (a - b).norm() <= tol,
            _ => false,
        }
    }
}

impl From<Complex64> for ExtendedComplex {
    fn from(z: Complex64) -> Self {
        ExtendedComplex::finite(z)
    }
}

/// An element of PSU(1,1): z ↦ (az + b)/(b̄z + ā) with |a|² − |b|² = 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusMap {
    a: Complex64,
    b: Complex64,
}

fn canonical_sign(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    // Pick the representative with Re a > 0, tie-broken by Im a, Re b, Im b.
    // |a| >= 1 in PSU(1,1), so one of the a components always decides except
    // for rotations by ~pi where Im a takes over.
    let keys = [a.re, a.im, b.re, b.im];
    for k in keys {
        if k > SIGN_TOL {
            return (a, b);
        }
        if k < -SIGN_TOL {
            return (-a, -b);
        }
    }
    (a, b)
}

impl MoebiusMap {
    /// Build from an arbitrary pair; rescales so |a|² − |b|² = 1 and
    /// canonicalizes the sign. Fails when the pair does not represent a
    /// disk automorphism (|a| <= |b|) or carries non-finite entries.
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
            return Err(Error::Domain("non-finite map coefficients".into()));
        }
        let det = a.norm_sqr() - b.norm_sqr();
        if det <= 0.0 {
            return Err(Error::Domain(format!(
                "|a|^2 - |b|^2 = {det:e} <= 0: not a PSU(1,1) representative"
            )));
        }
        let s = det.sqrt().recip();
        let (a, b) = canonical_sign(a * s, b * s);
        Ok(MoebiusMap { a, b })
    }

    pub fn identity() -> Self {
        MoebiusMap {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    /// Rotation z ↦ e^{iθ} z.
    pub fn rotation(theta: f64) -> Self {
        let (a, b) = canonical_sign(
            Complex64::from_polar(1.0, theta / 2.0),
            Complex64::new(0.0, 0.0),
        );
        MoebiusMap { a, b }
    }

    /// Hyperbolic translation of length `length` along the real axis,
    /// attracting fixed point +1.
    pub fn hyperbolic(length: f64) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Config(format!(
                "translation length must be positive, got {length}"
            )));
        }
        Ok(MoebiusMap {
            a: Complex64::new((length / 2.0).cosh(), 0.0),
            b: Complex64::new((length / 2.0).sinh(), 0.0),
        })
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn is_identity(&self) -> bool {
        (self.a - Complex64::new(1.0, 0.0)).norm() < 1e-12 && self.b.norm() < 1e-12
    }

    /// Group composition: `self.compose(h)` is the map z ↦ self(h(z)).
    pub fn compose(&self, h: &MoebiusMap) -> MoebiusMap {
        let a = self.a * h.a + self.b * h.b.conj();
        let b = self.a * h.b + self.b * h.a.conj();
        // Products of normalized pairs stay normalized to relative rounding.
        // Renormalizing through the computed determinant would inject its
        // cancellation error (|a|²−|b|² is ill-conditioned once the
        // coefficients are large), so only the sign is canonicalized.
        let (a, b) = canonical_sign(a, b);
        MoebiusMap { a, b }
    }

    pub fn inverse(&self) -> MoebiusMap {
        let (a, b) = canonical_sign(self.a.conj(), -self.b);
        MoebiusMap { a, b }
    }

    /// The pole of the map: the point sent to ∞.
    pub fn pole(&self) -> ExtendedComplex {
        if self.b == Complex64::new(0.0, 0.0) {
            ExtendedComplex::Infinity
        } else {
            ExtendedComplex::Finite(-self.a.conj() / self.b.conj())
        }
    }

    /// Apply the map; total on the Riemann sphere.
    pub fn apply(&self, z: ExtendedComplex) -> ExtendedComplex {
        match z {
            ExtendedComplex::Infinity => {
                if self.b == Complex64::new(0.0, 0.0) {
                    ExtendedComplex::Infinity
                } else {
                    ExtendedComplex::Finite(self.a / self.b.conj())
                }
            }
            ExtendedComplex::Finite(z) => {
                if let ExtendedComplex::Finite(p) = self.pole() {
                    if (z - p).norm() < POLE_TOL {
                        return ExtendedComplex::Infinity;
                    }
                }
                let den = self.b.conj() * z + self.a.conj();
                ExtendedComplex::Finite((self.a * z + self.b) / den)
            }
        }
    }

    /// Apply to a finite point known to stay finite (e.g. any point of the
    /// closed disk under a disk automorphism).
    pub fn apply_finite(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.b.conj() * z + self.a.conj())
    }

    /// γ′(z) = 1/(b̄z + ā)².
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        if let ExtendedComplex::Finite(p) = self.pole() {
            if (z - p).norm() < POLE_TOL {
                return Err(Error::Domain(format!("derivative at pole z = {z}")));
            }
        }
        let den = self.b.conj() * z + self.a.conj();
        Ok((den * den).finv())
    }

    /// γ.∞ = a/b̄ = 1/conj(γ.0); ∞ exactly when b = 0.
    pub fn pole_image(&self) -> ExtendedComplex {
        if self.b == Complex64::new(0.0, 0.0) {
            ExtendedComplex::Infinity
        } else {
            ExtendedComplex::Finite(self.a / self.b.conj())
        }
    }

    /// ½ γ″(z)/γ′(z) = −1/(z − γ⁻¹.∞); identically 0 for rotations.
    pub fn half_log_derivative_pole(&self, z: Complex64) -> Result<Complex64> {
        match self.inverse().pole_image() {
            ExtendedComplex::Infinity => Ok(Complex64::new(0.0, 0.0)),
            ExtendedComplex::Finite(p) => {
                if (z - p).norm() < POLE_TOL {
                    Err(Error::Domain(format!(
                        "half_log_derivative_pole at pole z = {z}"
                    )))
                } else {
                    Ok(-(z - p).finv())
                }
            }
        }
    }

    /// Trace classification with fixed-point data for the hyperbolic case.
    pub fn classify(&self) -> MapClass {
        if self.is_identity() {
            return MapClass::Identity;
        }
        let half_trace = self.a.re.abs();
        if half_trace > 1.0 + 1e-9 {
            let length = 2.0 * half_trace.acosh();
            let (attracting, repelling) = self.boundary_fixed_points();
            MapClass::Hyperbolic {
                translation_length: length,
                attracting,
                repelling,
            }
        } else if half_trace > 1.0 - 1e-9 {
            let (fp, _) = self.boundary_fixed_points();
            MapClass::Parabolic { fixed_point: fp }
        } else {
            MapClass::Elliptic
        }
    }

    /// Solve b̄z² − 2i·Im(a)·z − b = 0 for the circle fixed points; the
    /// attracting one (|γ′| < 1) comes first.
    fn boundary_fixed_points(&self) -> (Complex64, Complex64) {
        let bc = self.b.conj();
        let lin = Complex64::new(0.0, -2.0 * self.a.im);
        if bc.norm() < 1e-15 {
            // b = 0 and |Re a| >= 1 only happens at the identity, handled
            // by the caller; return the axis endpoints as a fallback.
            return (Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0));
        }
        let disc = (lin * lin + 4.0 * bc * self.b).sqrt();
        let z1 = (-lin + disc) / (2.0 * bc);
        let z2 = (-lin - disc) / (2.0 * bc);
        let d1 = (self.b.conj() * z1 + self.a.conj()).norm_sqr();
        // |γ′(z1)| = 1/d1 < 1 means attracting.
        if d1 > 1.0 {
            (z1, z2)
        } else {
            (z2, z1)
        }
    }

    /// Defect of the normalization invariant, for diagnostics.
    pub fn normalization_defect(&self) -> f64 {
        (self.a.norm_sqr() - self.b.norm_sqr() - 1.0).abs()
    }

    /// Euclidean distance between canonical coefficient pairs; the dedup
    /// metric used by group enumeration and measure merging.
    pub fn coeff_distance(&self, other: &MoebiusMap) -> f64 {
        ((self.a - other.a).norm_sqr() + (self.b - other.b).norm_sqr()).sqrt()
    }

    /// Distance in the rescaled coordinates (a/|a|, b/|a|, log|a|). Raw
    /// coefficients grow like e^{d/2} and so does their rounding drift,
    /// which breaks absolute comparisons; the rescaled pair alone collapses
    /// projectively toward the boundary. Together they separate distinct
    /// elements at every scale while duplicates drift only by rounding.
    pub fn scaled_distance(&self, other: &MoebiusMap) -> f64 {
        let s1 = self.a.norm();
        let s2 = other.a.norm();
        ((self.a / s1 - other.a / s2).norm_sqr()
            + (self.b / s1 - other.b / s2).norm_sqr()
            + (s1.ln() - s2.ln()).powi(2))
        .sqrt()
    }

    /// The rescaled coordinates (a/|a|, b/|a|, log|a|) used by the dedup
    /// index.
    pub fn scaled_coords(&self) -> [f64; 5] {
        let s = self.a.norm();
        [
            self.a.re / s,
            self.a.im / s,
            self.b.re / s,
            self.b.im / s,
            s.ln(),
        ]
    }
}

/// Conjugacy class of a map, with geometry for the non-elliptic cases.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MapClass {
    Identity,
    Elliptic,
    Parabolic {
        fixed_point: Complex64,
    },
    Hyperbolic {
        translation_length: f64,
        attracting: Complex64,
        repelling: Complex64,
    },
}

impl MapClass {
    pub fn translation_length(&self) -> Option<f64> {
        match self {
            MapClass::Hyperbolic {
                translation_length, ..
            } => Some(*translation_length),
            _ => None,
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        matches!(self, MapClass::Hyperbolic { .. })
    }
}

/// Pseudo-Busemann cocycle ĉ_B(z, ξ) = log((1 − |z|²)/|z − ξ|²) for |z| < 1,
/// |ξ| = 1.
pub fn busemann(z: Complex64, xi: Complex64) -> Result<f64> {
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!("busemann needs |z| < 1, got {z}")));
    }
    if (xi.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "busemann needs |xi| = 1, got |xi| = {}",
            xi.norm()
        )));
    }
    Ok(((1.0 - z.norm_sqr()) / (z - xi).norm_sqr()).ln())
}

/// Hyperbolic distance d(0, z) = log((1 + |z|)/(1 − |z|)).
pub fn hyperbolic_norm(z: Complex64) -> Result<f64> {
    let r = z.norm();
    if r >= 1.0 {
        return Err(Error::Domain(format!(
            "hyperbolic_norm needs |z| < 1, got |z| = {r}"
        )));
    }
    Ok(((1.0 + r) / (1.0 - r)).ln())
}

// JSON form: {"a": [re, im], "b": [re, im]}; deserialization renormalizes
// and canonicalizes.
#[derive(Serialize, Deserialize)]
struct MapRepr {
    a: [f64; 2],
    b: [f64; 2],
}

impl Serialize for MoebiusMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MapRepr {
            a: [self.a.re, self.a.im],
            b: [self.b.re, self.b.im],
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MoebiusMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MapRepr::deserialize(d)?;
        MoebiusMap::new(
            Complex64::new(r.a[0], r.a[1]),
            Complex64::new(r.b[0], r.b[1]),
        )
        .map_err(D::Error::custom)
    }
}
