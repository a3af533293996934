//! Complex finite Borel measures with countable support on PSU(1,1):
//! construction, convolution, convolution powers, and the moment / Blaschke
//! / weight-decay diagnostics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::group::{DedupIndex, GeneratorSet, GroupBall, DEDUP_TOL, ELEMENT_CAP};
use crate::moebius::{hyperbolic_norm, MoebiusMap};

/// A finitely supported complex measure Σ w_γ δ_γ. Atoms keep first-insertion
/// order (balls contribute word-length-then-lexicographic order), carry no
/// duplicates under the canonical form, and never carry exactly-zero weights.
#[derive(Clone, Debug)]
pub struct GroupMeasure {
    atoms: Vec<(MoebiusMap, Complex64)>,
    label: String,
}

impl GroupMeasure {
    /// Build from raw atoms: duplicates (within the dedup tolerance) merge by
    /// weight addition, exact-zero weights are pruned.
    pub fn from_atoms(
        atoms: Vec<(MoebiusMap, Complex64)>,
        label: impl Into<String>,
    ) -> Result<Self> {
        Self::merge_atoms(atoms.into_iter(), label.into(), ELEMENT_CAP)
    }

    fn merge_atoms(
        atoms: impl Iterator<Item = (MoebiusMap, Complex64)>,
        label: String,
        cap: usize,
    ) -> Result<Self> {
        let mut merged: Vec<(MoebiusMap, Complex64)> = Vec::new();
        let mut dedup = DedupIndex::new(DEDUP_TOL);
        for (g, w) in atoms {
            match dedup.lookup_by(&g, |i| merged[i].0) {
                Some(i) => merged[i].1 += w,
                None => {
                    if merged.len() >= cap {
                        return Err(Error::Resource(format!(
                            "measure support exceeds the {cap}-atom cap"
                        )));
                    }
                    dedup.insert(&g, merged.len());
                    merged.push((g, w));
                }
            }
        }
        merged.retain(|(_, w)| *w != Complex64::new(0.0, 0.0));
        Ok(GroupMeasure {
            atoms: merged,
            label,
        })
    }

    /// Point mass δ_g.
    pub fn delta(g: MoebiusMap) -> Self {
        GroupMeasure {
            atoms: vec![(g, Complex64::new(1.0, 0.0))],
            label: "delta".into(),
        }
    }

    /// Uniform probability measure on the generator alphabet (generators
    /// plus inverses when symmetrized).
    pub fn uniform_on_generators(set: &GeneratorSet) -> Result<Self> {
        let letters = set.alphabet();
        let w = Complex64::new((letters.len() as f64).recip(), 0.0);
        Self::merge_atoms(
            letters.into_iter().map(|g| (g, w)),
            format!("uniform({})", set.label),
            ELEMENT_CAP,
        )
    }

    /// Uniform probability measure on the elements of a ball.
    pub fn uniform_on_ball(ball: &GroupBall, label: impl Into<String>) -> Result<Self> {
        let w = Complex64::new((ball.len() as f64).recip(), 0.0);
        Self::merge_atoms(
            ball.maps().map(|g| (*g, w)),
            label.into(),
            ELEMENT_CAP,
        )
    }

    pub fn atoms(&self) -> &[(MoebiusMap, Complex64)] {
        &self.atoms
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    /// Σ w_γ (the mass; equals 1 for probability measures).
    pub fn mass(&self) -> Complex64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    /// Σ |w_γ| (total variation).
    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w.norm()).sum()
    }

    /// Real non-negative weights summing to one, within 1e−10.
    pub fn is_probability(&self) -> bool {
        let mut sum = 0.0;
        for (_, w) in &self.atoms {
            if w.im.abs() > 1e-10 || w.re < -1e-10 {
                return false;
            }
            sum += w.re;
        }
        (sum - 1.0).abs() < 1e-10
    }

    /// Convolution μ∗ν: atoms {(g·h, μ(g)ν(h))} merged under the canonical
    /// form. Products are computed in deterministic (i, j) order.
    pub fn convolve(&self, other: &GroupMeasure) -> Result<GroupMeasure> {
        let pairs: Vec<(usize, usize)> = (0..self.atoms.len())
            .flat_map(|i| (0..other.atoms.len()).map(move |j| (i, j)))
            .collect();
        let products = exec::map_slice(&pairs, |&(i, j)| {
            let (g, wg) = &self.atoms[i];
            let (h, wh) = &other.atoms[j];
            (g.compose(h), wg * wh)
        });
        Self::merge_atoms(
            products.into_iter(),
            format!("{}*{}", self.label, other.label),
            ELEMENT_CAP,
        )
    }

    /// μ*ⁿ by repeated convolution; μ*⁰ = δ_id.
    pub fn convolution_power(&self, n: usize) -> Result<GroupMeasure> {
        let mut acc = GroupMeasure::delta(MoebiusMap::identity());
        for _ in 0..n {
            acc = acc.convolve(self)?;
        }
        acc.label = format!("{}^*{}", self.label, n);
        Ok(acc)
    }

    /// Σ |w_γ| · d(0, γ.0), the first moment in the hyperbolic metric.
    pub fn first_moment(&self) -> f64 {
        self.atoms
            .iter()
            .map(|(g, w)| {
                let z = g.apply_finite(Complex64::new(0.0, 0.0));
                w.norm() * hyperbolic_norm(z).expect("orbit of 0 stays in the disk")
            })
            .sum()
    }

    /// Σ (1 − |γ.0|) over the support; the identity contributes 1.
    pub fn blaschke_sum(&self) -> f64 {
        self.atoms
            .iter()
            .map(|(g, _)| 1.0 - g.apply_finite(Complex64::new(0.0, 0.0)).norm())
            .sum()
    }

    /// Truncation estimate of limsup |μ(γ_n)|^{1/n}: the maximum of
    /// |w_n|^{1/n} over the trailing half of the enumeration (1-indexed).
    /// `ordering`, when given, is a permutation of atom indices; the default
    /// is storage order (word length then lexicographic for balls).
    pub fn weight_decay_rate(&self, ordering: Option<&[usize]>) -> Result<f64> {
        if self.atoms.is_empty() {
            return Err(Error::Domain("weight decay of the empty measure".into()));
        }
        let n = self.atoms.len();
        let weight_at = |pos: usize| -> Result<f64> {
            let idx = match ordering {
                Some(ord) => *ord.get(pos).ok_or_else(|| {
                    Error::Precondition("ordering shorter than the support".into())
                })?,
                None => pos,
            };
            Ok(self.atoms[idx].1.norm())
        };
        let start = n / 2;
        let mut best: f64 = 0.0;
        for pos in start..n {
            let w = weight_at(pos)?;
            best = best.max(w.powf(((pos + 1) as f64).recip()));
        }
        Ok(best)
    }

    /// Look up the weight of a map, if present.
    pub fn weight_of(&self, g: &MoebiusMap) -> Option<Complex64> {
        self.atoms
            .iter()
            .find(|(h, _)| h.coeff_distance(g) < DEDUP_TOL)
            .map(|(_, w)| *w)
    }
}

// JSON form: {"label": str, "atoms": [{"a": [..], "b": [..], "w": [re, im]}]}
#[derive(Serialize, Deserialize)]
struct AtomRepr {
    #[serde(flatten)]
    map: MoebiusMap,
    w: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    label: String,
    atoms: Vec<AtomRepr>,
}

impl Serialize for GroupMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureRepr {
            label: self.label.clone(),
            atoms: self
                .atoms
                .iter()
                .map(|(g, w)| AtomRepr {
                    map: *g,
                    w: [w.re, w.im],
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = MeasureRepr::deserialize(d)?;
        GroupMeasure::from_atoms(
            r.atoms
                .into_iter()
                .map(|a| (a.map, Complex64::new(a.w[0], a.w[1])))
                .collect(),
            r.label,
        )
        .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Preset;
    use crate::sample::{random_complex_measure, seeded_rng};
    use approx::assert_abs_diff_eq;

    fn sqrt2_map() -> MoebiusMap {
        MoebiusMap::new(Complex64::new(2f64.sqrt(), 0.0), Complex64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn delta_convolution_identity() {
        let g = sqrt2_map();
        let mu = GroupMeasure::delta(g);
        let id = GroupMeasure::delta(MoebiusMap::identity());
        let conv = id.convolve(&mu).unwrap();
        assert_eq!(conv.support_size(), 1);
        assert!(conv.atoms()[0].0.coeff_distance(&g) < 1e-12);
        assert_abs_diff_eq!(conv.atoms()[0].1.re, 1.0, epsilon = 1e-15);

        let h = MoebiusMap::rotation(0.4);
        let dd = GroupMeasure::delta(g).convolve(&GroupMeasure::delta(h)).unwrap();
        assert!(dd.atoms()[0].0.coeff_distance(&g.compose(&h)) < 1e-12);
    }

    #[test]
    fn symmetric_square_is_binomial() {
        let g = sqrt2_map();
        let mu = GroupMeasure::from_atoms(
            vec![
                (g, Complex64::new(0.5, 0.0)),
                (g.inverse(), Complex64::new(0.5, 0.0)),
            ],
            "sym",
        )
        .unwrap();
        let sq = mu.convolution_power(2).unwrap();
        assert_eq!(sq.support_size(), 3);
        assert_abs_diff_eq!(
            sq.weight_of(&MoebiusMap::identity()).unwrap().re,
            0.5,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            sq.weight_of(&g.compose(&g)).unwrap().re,
            0.25,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            sq.weight_of(&g.inverse().compose(&g.inverse())).unwrap().re,
            0.25,
            epsilon = 1e-12
        );
        assert!(sq.is_probability());
    }

    #[test]
    fn convolution_power_edge_cases() {
        let mu = GroupMeasure::delta(sqrt2_map());
        let p0 = mu.convolution_power(0).unwrap();
        assert!(p0.atoms()[0].0.is_identity());
        let p1 = mu.convolution_power(1).unwrap();
        assert!(p1.atoms()[0].0.coeff_distance(&sqrt2_map()) < 1e-12);
    }

    #[test]
    fn schottky_power_support_matches_reduced_words() {
        let set = GeneratorSet::preset(Preset::Schottky {
            count: 2,
            length: 3.0,
        })
        .unwrap();
        let mu = GroupMeasure::uniform_on_generators(&set).unwrap();
        let p3 = mu.convolution_power(3).unwrap();
        // Freely reduced words of length 3 and of length 1 (one cancellation):
        // 4*3*3 + 4 = 40.
        assert_eq!(p3.support_size(), 40);
        assert!(p3.is_probability());
    }

    #[test]
    fn first_moment_examples() {
        let id = GroupMeasure::delta(MoebiusMap::identity());
        assert_eq!(id.first_moment(), 0.0);

        let g = sqrt2_map();
        let mu = GroupMeasure::delta(g);
        let expected = g.classify().translation_length().unwrap();
        assert_abs_diff_eq!(mu.first_moment(), expected, epsilon = 1e-12);

        let scaled = GroupMeasure::from_atoms(
            vec![(g, Complex64::new(2.5, 0.0))],
            "scaled",
        )
        .unwrap();
        assert_abs_diff_eq!(scaled.first_moment(), 2.5 * expected, epsilon = 1e-12);
    }

    #[test]
    fn first_moment_subadditive_under_powers() {
        let set = GeneratorSet::preset(Preset::Schottky {
            count: 2,
            length: 3.0,
        })
        .unwrap();
        let mu = GroupMeasure::uniform_on_generators(&set).unwrap();
        let m1 = mu.first_moment();
        for n in 2..=4 {
            let mn = mu.convolution_power(n).unwrap().first_moment();
            assert!(mn <= n as f64 * m1 + 1e-8);
        }
    }

    #[test]
    fn blaschke_sum_examples() {
        let id = GroupMeasure::delta(MoebiusMap::identity());
        assert_abs_diff_eq!(id.blaschke_sum(), 1.0, epsilon = 1e-15);

        // Partial sums over {g^n} converge: geometric decay of 1 - |g^n.0|.
        let g = sqrt2_map();
        let mut partial = Vec::new();
        for radius in [4usize, 8, 12, 16] {
            let set = GeneratorSet::new("cyc", true, vec![g]).unwrap();
            let ball = set.enumerate_ball(radius, ELEMENT_CAP).unwrap();
            let mu = GroupMeasure::uniform_on_ball(&ball, "cyc-ball").unwrap();
            partial.push(mu.blaschke_sum());
        }
        let d1 = partial[1] - partial[0];
        let d3 = partial[3] - partial[2];
        assert!(d1 > d3, "tail increments should decay");
        assert!(d3 < 1e-4, "geometric tail should be tiny by radius 16");

        // Schottky balls: every new element contributes positive mass, so
        // partial sums grow monotonically across radii.
        let set = GeneratorSet::preset(Preset::Schottky {
            count: 2,
            length: 3.0,
        })
        .unwrap();
        let mut prev = 0.0;
        for radius in 2..=7 {
            let ball = set.enumerate_ball(radius, ELEMENT_CAP).unwrap();
            let mu = GroupMeasure::uniform_on_ball(&ball, "schottky-ball").unwrap();
            let s = mu.blaschke_sum();
            assert!(s > prev, "blaschke partial sums must grow with the radius");
            prev = s;
        }
    }

    #[test]
    fn weight_decay_geometric_and_subexponential() {
        let g = MoebiusMap::hyperbolic(0.5).unwrap();
        let set = GeneratorSet::new("cyc", false, vec![g]).unwrap();
        let ball = set.enumerate_ball(128, ELEMENT_CAP).unwrap();
        // weights 2^{-n} / n^{-2} on g^n, n = 1..128 (identity excluded)
        let maps: Vec<MoebiusMap> = ball.maps().skip(1).copied().collect();
        let mut atoms = Vec::new();
        let mut atoms_poly = Vec::new();
        for (i, m) in maps.iter().enumerate() {
            let n = (i + 1) as f64;
            atoms.push((*m, Complex64::new(2f64.powf(-n), 0.0)));
            atoms_poly.push((*m, Complex64::new(n.powi(-2), 0.0)));
        }
        let geo = GroupMeasure::from_atoms(atoms, "geometric").unwrap();
        let rate = geo.weight_decay_rate(None).unwrap();
        assert!((rate - 0.5).abs() < 0.02, "geometric rate {rate}");

        let poly = GroupMeasure::from_atoms(atoms_poly, "poly").unwrap();
        let rate = poly.weight_decay_rate(None).unwrap();
        assert!(rate >= 0.9, "subexponential rate {rate}");
    }

    #[test]
    fn zero_weights_pruned_and_empty_rejected() {
        let g = sqrt2_map();
        let mu = GroupMeasure::from_atoms(
            vec![
                (g, Complex64::new(1.0, 0.0)),
                (g.compose(&g), Complex64::new(0.0, 0.0)),
            ],
            "padded",
        )
        .unwrap();
        assert_eq!(mu.support_size(), 1);

        let empty = GroupMeasure::from_atoms(vec![], "empty").unwrap();
        assert!(empty.weight_decay_rate(None).is_err());
    }

    #[test]
    fn convolution_associative_and_submultiplicative() {
        let mut rng = seeded_rng(101);
        for _ in 0..20 {
            let a = random_complex_measure(&mut rng, 3);
            let b = random_complex_measure(&mut rng, 2);
            let c = random_complex_measure(&mut rng, 2);
            let left = a.convolve(&b).unwrap().convolve(&c).unwrap();
            let right = a.convolve(&b.convolve(&c).unwrap()).unwrap();
            assert_eq!(left.support_size(), right.support_size());
            for (g, w) in left.atoms() {
                let w2 = right.weight_of(g).expect("support must agree");
                assert!((w - w2).norm() < 1e-10);
            }
            let tv = a.convolve(&b).unwrap().total_variation();
            assert!(tv <= a.total_variation() * b.total_variation() + 1e-10);
        }
    }

    #[test]
    fn measure_json_round_trip() {
        let mut rng = seeded_rng(5);
        let mu = random_complex_measure(&mut rng, 4);
        let s = serde_json::to_string(&mu).unwrap();
        let back: GroupMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back.support_size(), mu.support_size());
        for (g, w) in mu.atoms() {
            assert!((back.weight_of(g).unwrap() - w).norm() < 1e-12);
        }
    }
}
