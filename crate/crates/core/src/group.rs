//! Generator presets for discrete subgroups of PSU(1,1) and breadth-first
//! enumeration of group balls with tolerance-based deduplication.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::{ExtendedComplex, MoebiusMap};

/// Dedup tolerance on canonical (a, b) pairs. Double-precision products over
/// twenty-ish letters stay far below this for moderate translation lengths.
pub const DEDUP_TOL: f64 = 1e-9;
/// Default hard cap on enumerated elements / measure atoms.
pub const ELEMENT_CAP: usize = 1_000_000;

/// A labeled set of group generators.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub label: String,
    /// When set, enumeration and uniform measures use generators plus
    /// inverses as the alphabet.
    pub symmetrized: bool,
    pub generators: Vec<MoebiusMap>,
}

/// Named generator configurations for experiments.
#[derive(Clone, Copy, Debug)]
pub enum Preset {
    /// One hyperbolic translation of the given length along the real axis.
    SingleHyperbolic { length: f64 },
    /// One rotation by the given angle.
    Rotation { angle: f64 },
    /// `count` hyperbolic translations of equal length with axes through
    /// e^{ikπ/count}; ping-pong disks are verified disjoint.
    Schottky { count: usize, length: f64 },
    /// Two hyperbolic translations whose axes cross the origin at the given
    /// angle; ping-pong disks are verified disjoint.
    FreeHyperbolic { length: f64, axis_angle: f64 },
}

/// Conjugate the real-axis translation so its axis passes through ±e^{iφ}.
fn axis_translation(length: f64, angle: f64) -> Result<MoebiusMap> {
    let g = MoebiusMap::hyperbolic(length)?;
    Ok(MoebiusMap::new(g.a(), g.b() * Complex64::from_polar(1.0, angle))
        .expect("rotating b preserves the determinant"))
}

/// Isometric disk of a map: center at its pole, radius 1/|b|.
fn isometric_disk(g: &MoebiusMap) -> Option<(Complex64, f64)> {
    let b = g.b();
    if b.norm() < 1e-15 {
        return None;
    }
    Some((-g.a().conj() / b.conj(), b.norm().recip()))
}

/// Ping-pong test: the isometric disks of all generators and inverses must
/// be pairwise disjoint.
fn check_ping_pong(generators: &[MoebiusMap]) -> Result<()> {
    let mut disks = Vec::new();
    for g in generators {
        for h in [*g, g.inverse()] {
            match isometric_disk(&h) {
                Some(d) => disks.push(d),
                None => {
                    return Err(Error::Config(
                        "ping-pong check needs hyperbolic generators".into(),
                    ))
                }
            }
        }
    }
    for i in 0..disks.len() {
        for j in (i + 1)..disks.len() {
            let (ci, ri) = disks[i];
            let (cj, rj) = disks[j];
            if (ci - cj).norm() <= ri + rj + 1e-9 {
                return Err(Error::Config(format!(
                    "ping-pong disks {i} and {j} overlap: centers {ci} / {cj}, radii {ri} / {rj}"
                )));
            }
        }
    }
    Ok(())
}

impl GeneratorSet {
    pub fn new(label: impl Into<String>, symmetrized: bool, generators: Vec<MoebiusMap>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Config("generator set must be non-empty".into()));
        }
        for i in 0..generators.len() {
            for j in (i + 1)..generators.len() {
                if generators[i].coeff_distance(&generators[j]) < DEDUP_TOL {
                    return Err(Error::Config(format!(
                        "generators {i} and {j} coincide under canonical form"
                    )));
                }
            }
        }
        Ok(GeneratorSet {
            label: label.into(),
            symmetrized,
            generators,
        })
    }

    pub fn preset(preset: Preset) -> Result<Self> {
        match preset {
            // not symmetrized: the uniform measure on this preset is δ_g,
            // whose attracting-point mass is stationary
            Preset::SingleHyperbolic { length } => Ok(GeneratorSet {
                label: format!("single-hyperbolic({length})"),
                symmetrized: false,
                generators: vec![MoebiusMap::hyperbolic(length)?],
            }),
            Preset::Rotation { angle } => {
                if !(angle > 0.0 && angle < std::f64::consts::TAU) {
                    return Err(Error::Config(format!(
                        "rotation angle must lie in (0, 2pi), got {angle}"
                    )));
                }
                Ok(GeneratorSet {
                    label: format!("rotation({angle})"),
                    symmetrized: false,
                    generators: vec![MoebiusMap::rotation(angle)],
                })
            }
            Preset::Schottky { count, length } => {
                if count == 0 {
                    return Err(Error::Config("schottky preset needs count >= 1".into()));
                }
                let gens = (0..count)
                    .map(|k| {
                        axis_translation(length, k as f64 * std::f64::consts::PI / count as f64)
                    })
                    .collect::<Result<Vec<_>>>()?;
                check_ping_pong(&gens)?;
                Ok(GeneratorSet {
                    label: format!("schottky({count},{length})"),
                    symmetrized: true,
                    generators: gens,
                })
            }
            Preset::FreeHyperbolic { length, axis_angle } => {
                let gens = vec![
                    axis_translation(length, 0.0)?,
                    axis_translation(length, axis_angle)?,
                ];
                check_ping_pong(&gens)?;
                Ok(GeneratorSet {
                    label: format!("free-hyperbolic({length},{axis_angle})"),
                    symmetrized: true,
                    generators: gens,
                })
            }
        }
    }

    /// Parse a preset from its CLI spelling, e.g. `single-hyperbolic`.
    pub fn preset_by_name(name: &str, length: f64, angle: f64, count: usize) -> Result<Self> {
        match name {
            "single-hyperbolic" => Self::preset(Preset::SingleHyperbolic { length }),
            "rotation" => Self::preset(Preset::Rotation { angle }),
            "schottky" => Self::preset(Preset::Schottky { count, length }),
            "free-hyperbolic" => Self::preset(Preset::FreeHyperbolic {
                length,
                axis_angle: angle,
            }),
            other => Err(Error::Config(format!("unknown preset '{other}'"))),
        }
    }

    /// The enumeration alphabet: generators, then inverses when symmetrized.
    pub fn alphabet(&self) -> Vec<MoebiusMap> {
        let mut letters = self.generators.clone();
        if self.symmetrized {
            letters.extend(self.generators.iter().map(MoebiusMap::inverse));
        }
        letters
    }

    /// Breadth-first closure of products up to word length `radius`.
    /// Duplicate maps merge keeping the first (shortest, then lexicographic)
    /// word; order is deterministic.
    pub fn enumerate_ball(&self, radius: usize, cap: usize) -> Result<GroupBall> {
        let letters = self.alphabet();
        let mut dedup = DedupIndex::new(DEDUP_TOL);
        let mut elements: Vec<BallElement> = Vec::new();

        let id = BallElement {
            word: Vec::new(),
            map: MoebiusMap::identity(),
        };
        dedup.insert(&id.map, 0);
        elements.push(id);

        let mut frontier: Vec<usize> = vec![0];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &idx in &frontier {
                let parent = elements[idx].clone();
                for (li, letter) in letters.iter().enumerate() {
                    let map = parent.map.compose(letter);
                    if dedup.lookup(&map, &elements).is_some() {
                        continue;
                    }
                    if elements.len() >= cap {
                        return Err(Error::Resource(format!(
                            "group ball exceeds the {cap}-element cap"
                        )));
                    }
                    let mut word = parent.word.clone();
                    word.push(li as u16);
                    dedup.insert(&map, elements.len());
                    next.push(elements.len());
                    elements.push(BallElement { word, map });
                }
            }
            frontier = next;
        }
        Ok(GroupBall { elements, radius })
    }
}

/// One enumerated element: its first word (letter indices into the
/// alphabet) and the map itself.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BallElement {
    pub word: Vec<u16>,
    pub map: MoebiusMap,
}

/// All elements of word length ≤ radius, identity first, ordered by word
/// length then lexicographic word.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupBall {
    pub elements: Vec<BallElement>,
    pub radius: usize,
}

impl GroupBall {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn maps(&self) -> impl Iterator<Item = &MoebiusMap> {
        self.elements.iter().map(|e| &e.map)
    }

    /// Orbit of a base point, in ball order.
    pub fn orbit_points(&self, base: ExtendedComplex) -> Vec<ExtendedComplex> {
        self.elements.iter().map(|e| e.map.apply(base)).collect()
    }
}

/// Spatial hash on the rescaled coordinates (a/|a|, b/|a|, log|a|); see
/// `MoebiusMap::scaled_distance` for why this metric works at every scale.
/// Keys are coordinates rounded to the tolerance grid; lookups probe the
/// 3^5 neighbor cells, so any pair within the tolerance per coordinate is
/// found.
pub(crate) struct DedupIndex {
    tol: f64,
    cells: HashMap<[i64; 5], Vec<usize>>,
}

impl DedupIndex {
    pub(crate) fn new(tol: f64) -> Self {
        DedupIndex {
            tol,
            cells: HashMap::new(),
        }
    }

    fn key(&self, g: &MoebiusMap) -> [i64; 5] {
        let c = g.scaled_coords();
        // pair coordinates are in [-1, 1]; the log-scale is bounded by the
        // clamp well inside i64 range
        const LIM: f64 = (i64::MAX / 4) as f64;
        let q = |x: f64| (x / self.tol).round().clamp(-LIM, LIM) as i64;
        [q(c[0]), q(c[1]), q(c[2]), q(c[3]), q(c[4])]
    }

    pub(crate) fn insert(&mut self, g: &MoebiusMap, index: usize) {
        self.cells.entry(self.key(g)).or_default().push(index);
    }

    pub(crate) fn lookup(&self, g: &MoebiusMap, elements: &[BallElement]) -> Option<usize> {
        self.lookup_by(g, |i| elements[i].map)
    }

    pub(crate) fn lookup_by<F: Fn(usize) -> MoebiusMap>(
        &self,
        g: &MoebiusMap,
        map_of: F,
    ) -> Option<usize> {
        let base = self.key(g);
        for da in -1..=1i64 {
            for db in -1..=1i64 {
                for dc in -1..=1i64 {
                    for dd in -1..=1i64 {
                        for de in -1..=1i64 {
                            let key = [
                                base[0] + da,
                                base[1] + db,
                                base[2] + dc,
                                base[3] + dd,
                                base[4] + de,
                            ];
                            if let Some(bucket) = self.cells.get(&key) {
                                for &i in bucket {
                                    if g.scaled_distance(&map_of(i)) < self.tol {
                                        return Some(i);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    /// |B(0)| + Σ_{k=1..r} 2n(2n−1)^{k−1}: sphere sizes of the free group
    /// of rank n with the symmetric alphabet.
    fn free_ball_size(rank: usize, radius: usize) -> usize {
        let letters = 2 * rank;
        let mut total = 1;
        let mut sphere = letters;
        for _ in 1..=radius.min(64) {
            total += sphere;
            sphere *= letters - 1;
        }
        if radius == 0 {
            1
        } else {
            total
        }
    }

    #[test]
    fn single_hyperbolic_preset_matches_length() {
        let set = GeneratorSet::preset(Preset::SingleHyperbolic { length: 1.76275 }).unwrap();
        let class = set.generators[0].classify();
        assert_abs_diff_eq!(class.translation_length().unwrap(), 1.76275, epsilon = 1e-12);
        // conjugate to (sqrt2, 1) at this length
        let sqrt2 = 2.0 * 2f64.sqrt().acosh();
        let set2 = GeneratorSet::preset(Preset::SingleHyperbolic { length: sqrt2 }).unwrap();
        assert!((set2.generators[0].a().re - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rotation_preset_is_elliptic_and_fixes_origin() {
        let set = GeneratorSet::preset(Preset::Rotation {
            angle: std::f64::consts::FRAC_PI_2,
        })
        .unwrap();
        let g = &set.generators[0];
        assert_eq!(g.classify(), crate::moebius::MapClass::Elliptic);
        assert_eq!(g.apply_finite(Complex64::new(0.0, 0.0)).norm(), 0.0);
    }

    #[test]
    fn schottky_ball_counts_match_free_group() {
        let set = GeneratorSet::preset(Preset::Schottky {
            count: 2,
            length: 3.0,
        })
        .unwrap();
        let ball = set.enumerate_ball(3, ELEMENT_CAP).unwrap();
        assert_eq!(ball.len(), 53); // 1 + 4 + 12 + 36
        let ball4 = set.enumerate_ball(4, ELEMENT_CAP).unwrap();
        assert_eq!(ball4.len(), free_ball_size(2, 4));
    }

    #[test]
    fn schottky_rejects_overlapping_disks() {
        let err = GeneratorSet::preset(Preset::Schottky {
            count: 2,
            length: 1.0,
        });
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn ball_radius_zero_is_identity() {
        let set = GeneratorSet::preset(Preset::Schottky {
            count: 2,
            length: 3.0,
        })
        .unwrap();
        let ball = set.enumerate_ball(0, ELEMENT_CAP).unwrap();
        assert_eq!(ball.len(), 1);
        assert!(ball.elements[0].map.is_identity());
        assert!(ball.elements[0].word.is_empty());
    }

    #[test]
    fn cyclic_ball_of_single_hyperbolic() {
        let g = MoebiusMap::hyperbolic(2.0).unwrap();
        let set = GeneratorSet::new("cyc", true, vec![g]).unwrap();
        let ball = set.enumerate_ball(5, ELEMENT_CAP).unwrap();
        assert_eq!(ball.len(), 11); // g^k, |k| <= 5

        // the preset itself is one-sided
        let preset = GeneratorSet::preset(Preset::SingleHyperbolic { length: 2.0 }).unwrap();
        assert_eq!(preset.enumerate_ball(5, ELEMENT_CAP).unwrap().len(), 6);
    }

    #[test]
    fn ball_monotone_in_radius() {
        let set = GeneratorSet::preset(Preset::Schottky {
            count: 2,
            length: 3.0,
        })
        .unwrap();
        let small = set.enumerate_ball(2, ELEMENT_CAP).unwrap();
        let big = set.enumerate_ball(3, ELEMENT_CAP).unwrap();
        for e in &small.elements {
            assert!(
                big.maps().any(|m| m.coeff_distance(&e.map) < DEDUP_TOL),
                "element of radius-2 ball missing at radius 3"
            );
        }
    }

    #[test]
    fn cap_fails_loudly() {
        let set = GeneratorSet::preset(Preset::Schottky {
            count: 2,
            length: 3.0,
        })
        .unwrap();
        assert!(matches!(
            set.enumerate_ball(8, 100),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn orbit_points_follow_axis() {
        let set = GeneratorSet::preset(Preset::SingleHyperbolic { length: 1.5 }).unwrap();
        let ball = set.enumerate_ball(4, ELEMENT_CAP).unwrap();
        let orbit = ball.orbit_points(ExtendedComplex::finite(Complex64::new(0.0, 0.0)));
        // The axis through the fixed points ±1 is the real diameter; the
        // cross-ratio (z, ξ₊; 0, ξ₋) = 2z/(z+1) of concyclic points is real.
        for p in &orbit {
            let z = p.as_finite().unwrap();
            let cross = 2.0 * z / (z + 1.0);
            assert!(cross.im.abs() < 1e-8, "orbit point {z} off the axis");
            assert!(z.norm() < 1.0);
        }
    }

    #[test]
    fn orbit_of_infinity_is_pole_images() {
        let set = GeneratorSet::preset(Preset::Schottky {
            count: 2,
            length: 3.0,
        })
        .unwrap();
        let ball = set.enumerate_ball(2, ELEMENT_CAP).unwrap();
        let orbit = ball.orbit_points(ExtendedComplex::Infinity);
        for (e, p) in ball.elements.iter().zip(&orbit) {
            assert!(e.map.pole_image().approx_eq(p, 1e-12));
        }
    }

    #[test]
    fn symmetrized_orbit_contains_inverse_images() {
        let set = GeneratorSet::preset(Preset::Schottky {
            count: 2,
            length: 3.0,
        })
        .unwrap();
        let ball = set.enumerate_ball(2, ELEMENT_CAP).unwrap();
        let orbit = ball.orbit_points(ExtendedComplex::finite(Complex64::new(0.0, 0.0)));
        for g in &set.generators {
            let target = g.inverse().apply_finite(Complex64::new(0.0, 0.0));
            assert!(orbit
                .iter()
                .any(|p| p.approx_eq(&ExtendedComplex::finite(target), 1e-9)));
        }
    }

    #[test]
    fn generator_set_json_round_trip() {
        let set = GeneratorSet::preset(Preset::Schottky {
            count: 2,
            length: 3.0,
        })
        .unwrap();
        let s = serde_json::to_string(&set).unwrap();
        let back: GeneratorSet = serde_json::from_str(&s).unwrap();
        assert_eq!(back.generators.len(), 2);
        assert!(back.symmetrized);
        assert!(back.generators[0].coeff_distance(&set.generators[0]) < 1e-14);
    }
}
