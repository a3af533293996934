//! Seeded random group elements and disk/circle points, shared by the
//! identity suites, property tests, and the CLI.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gmeasure::GroupMeasure;
use crate::moebius::MoebiusMap;

/// The deterministic generator used everywhere a seed appears in a config.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random element of PSU(1,1) with |b| ≤ 2 (moderate translation lengths).
pub fn random_map<R: Rng>(rng: &mut R) -> MoebiusMap {
    let b = Complex64::from_polar(2.0 * rng.gen::<f64>(), TAU * rng.gen::<f64>());
    let a = Complex64::from_polar((1.0 + b.norm_sqr()).sqrt(), TAU * rng.gen::<f64>());
    MoebiusMap::new(a, b).expect("constructed pair is a valid representative")
}

/// Uniform-in-radius point of the disk |z| < r_max.
pub fn random_disk_point<R: Rng>(rng: &mut R, r_max: f64) -> Complex64 {
    Complex64::from_polar(r_max * rng.gen::<f64>(), TAU * rng.gen::<f64>())
}

/// Uniform point of the unit circle.
pub fn random_unit_point<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, TAU * rng.gen::<f64>())
}

/// A random complex-weighted measure with `n_atoms` distinct atoms and unit
/// total weight sum (mass 1, weights generally non-positive).
pub fn random_complex_measure<R: Rng>(rng: &mut R, n_atoms: usize) -> GroupMeasure {
    let mut atoms = Vec::with_capacity(n_atoms);
    let mut total = Complex64::new(0.0, 0.0);
    for _ in 0..n_atoms {
        let w = Complex64::new(rng.gen::<f64>() - 0.3, rng.gen::<f64>() - 0.5);
        total += w;
        atoms.push((random_map(rng), w));
    }
    // Rescale so the weights sum to one; retry-free because the expected sum
    // stays away from zero for the offsets above.
    let atoms = atoms
        .into_iter()
        .map(|(g, w)| (g, w / total))
        .collect::<Vec<_>>();
    GroupMeasure::from_atoms(atoms, "random-complex").expect("atoms are distinct almost surely")
}

/// A random probability measure with `n_atoms` distinct atoms.
pub fn random_probability_measure<R: Rng>(rng: &mut R, n_atoms: usize) -> GroupMeasure {
    let mut atoms = Vec::with_capacity(n_atoms);
    let mut total = 0.0;
    for _ in 0..n_atoms {
        let w = 0.1 + rng.gen::<f64>();
        total += w;
        atoms.push((random_map(rng), Complex64::new(w, 0.0)));
    }
    let atoms = atoms
        .into_iter()
        .map(|(g, w)| (g, w / total))
        .collect::<Vec<_>>();
    GroupMeasure::from_atoms(atoms, "random-probability").expect("atoms are distinct almost surely")
}
