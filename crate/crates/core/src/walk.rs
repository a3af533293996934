//! Monte-Carlo random walks on the group: trajectories, boundary hitting
//! samples, empirical hitting measures, and the empirical escape rate.
//!
//! Walk state is the modulus-rescaled coefficient pair (a/|a|, b/|a|) plus
//! an additively tracked log-determinant. The normalized pair of a product
//! of n hyperbolic steps grows like e^{d/2} and overflows near a thousand
//! steps; the rescaled frame keeps every entry O(1) for arbitrarily long
//! walks, and 1 − |Xₙ.0|² = e^{logdet} exactly.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cmeasure::CircleMeasure;
use crate::error::{Error, Result};
use crate::exec;
use crate::gmeasure::GroupMeasure;
use crate::moebius::MoebiusMap;

/// Configuration of a seeded walk driven by a probability measure.
#[derive(Clone, Debug)]
pub struct WalkConfig {
    mu_maps: Vec<MoebiusMap>,
    cumulative: Vec<f64>,
    pub seed: u64,
    pub boundary_tol: f64,
    pub max_steps: usize,
}

pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_STEPS: usize = 10_000;

impl WalkConfig {
    pub fn new(mu: &GroupMeasure, seed: u64, boundary_tol: f64, max_steps: usize) -> Result<Self> {
        if !mu.is_probability() {
            return Err(Error::Precondition(
                "walks need a probability measure".into(),
            ));
        }
        if !(boundary_tol > 0.0 && boundary_tol < 1.0) {
            return Err(Error::Precondition(format!(
                "boundary_tol must lie in (0,1), got {boundary_tol}"
            )));
        }
        let mut cumulative = Vec::with_capacity(mu.support_size());
        let mut acc = 0.0;
        let mut maps = Vec::with_capacity(mu.support_size());
        for (g, w) in mu.atoms() {
            acc += w.re;
            cumulative.push(acc);
            maps.push(*g);
        }
        Ok(WalkConfig {
            mu_maps: maps,
            cumulative,
            seed,
            boundary_tol,
            max_steps,
        })
    }

    pub fn with_defaults(mu: &GroupMeasure, seed: u64) -> Result<Self> {
        Self::new(mu, seed, DEFAULT_BOUNDARY_TOL, DEFAULT_MAX_STEPS)
    }

    fn rng_for_sample(&self, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(splitmix64(self.seed ^ index))
    }

    fn step<R: Rng>(&self, rng: &mut R) -> &MoebiusMap {
        let u: f64 = rng.gen();
        let i = self.cumulative.partition_point(|&c| c <= u);
        &self.mu_maps[i.min(self.mu_maps.len() - 1)]
    }
}

/// SplitMix64 finalizer: the per-sample seed mix.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Rescaled product frame: represents the same Möbius map as the normalized
/// pair scaled by 1/|a|, with log(|a|²−|b|²) of the scaled pair tracked
/// additively.
#[derive(Clone, Copy, Debug)]
struct Frame {
    a: Complex64,
    b: Complex64,
    log_det: f64,
}

impl Frame {
    fn identity() -> Self {
        Frame {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            log_det: 0.0,
        }
    }

    /// Right-multiply by a normalized map: Xₙ = Xₙ₋₁ · g.
    fn step(&mut self, g: &MoebiusMap) {
        let a = self.a * g.a() + self.b * g.b().conj();
        let b = self.a * g.b() + self.b * g.a().conj();
        let scale = a.norm();
        self.a = a / scale;
        self.b = b / scale;
        self.log_det -= 2.0 * scale.ln();
    }

    /// Xₙ.0 = b/ā.
    fn point(&self) -> Complex64 {
        self.b / self.a.conj()
    }

    /// 1 − |Xₙ.0|, computed without cancellation: (1 − |z|²)/(1 + |z|) with
    /// 1 − |z|² = e^{logdet}.
    fn one_minus_abs(&self) -> f64 {
        let z = self.point().norm().min(1.0);
        self.log_det.exp() / (1.0 + z)
    }

    /// d(0, Xₙ.0) = 2 log(1 + |z|) − log(1 − |z|²).
    fn hyperbolic_norm(&self) -> f64 {
        let z = self.point().norm().min(1.0);
        2.0 * (1.0 + z).ln() - self.log_det
    }
}

/// Xₙ.0 for n = 1..steps along one seeded trajectory (sample index 0).
pub fn sample_path(cfg: &WalkConfig, steps: usize) -> Vec<Complex64> {
    let mut rng = cfg.rng_for_sample(0);
    let mut frame = Frame::identity();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        frame.step(cfg.step(&mut rng));
        out.push(frame.point());
    }
    out
}

/// One boundary-hitting attempt.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HittingSample {
    /// arg(Xₙ.0) in [0, 2π).
    pub angle: f64,
    pub steps_used: usize,
    /// Whether 1 − |Xₙ.0| < boundary_tol was reached before max_steps.
    pub reached: bool,
}

fn hitting_sample_indexed(cfg: &WalkConfig, index: u64) -> HittingSample {
    let mut rng = cfg.rng_for_sample(index);
    let mut frame = Frame::identity();
    for n in 1..=cfg.max_steps {
        frame.step(cfg.step(&mut rng));
        if frame.one_minus_abs() < cfg.boundary_tol {
            return HittingSample {
                angle: frame.point().arg().rem_euclid(TAU),
                steps_used: n,
                reached: true,
            };
        }
    }
    HittingSample {
        angle: frame.point().arg().rem_euclid(TAU),
        steps_used: cfg.max_steps,
        reached: false,
    }
}

/// Walk until the boundary tolerance or max_steps (sample index 0).
pub fn hitting_sample(cfg: &WalkConfig) -> HittingSample {
    hitting_sample_indexed(cfg, 0)
}

/// Aggregate statistics of an empirical hitting measure run.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HittingStats {
    pub requested: usize,
    pub reached: usize,
    pub dropped: usize,
    /// Set when more than 1% of the samples failed to reach the boundary.
    pub reliability_warning: bool,
}

/// N independent hitting samples (seed split per index); unreached samples
/// are dropped and counted. Weights are 1/reached.
pub fn empirical_hitting_measure(
    cfg: &WalkConfig,
    n: usize,
) -> Result<(CircleMeasure, HittingStats)> {
    if n == 0 {
        return Err(Error::Precondition("need at least one sample".into()));
    }
    let samples = exec::map_range(n, |i| hitting_sample_indexed(cfg, i as u64));
    let angles: Vec<f64> = samples
        .iter()
        .filter(|s| s.reached)
        .map(|s| s.angle)
        .collect();
    let reached = angles.len();
    if reached == 0 {
        return Err(Error::Evaluation(
            "no sample reached the boundary; the walk may be elliptic".into(),
        ));
    }
    let stats = HittingStats {
        requested: n,
        reached,
        dropped: n - reached,
        reliability_warning: (n - reached) as f64 > 0.01 * n as f64,
    };
    Ok((CircleMeasure::atomic_uniform(angles)?, stats))
}

/// Average of d(0, Xₙ.0)/n over N seeded samples.
pub fn empirical_escape_rate(cfg: &WalkConfig, n_samples: usize, steps: usize) -> f64 {
    let rates = exec::map_range(n_samples, |i| {
        let mut rng = cfg.rng_for_sample(i as u64);
        let mut frame = Frame::identity();
        for _ in 0..steps {
            frame.step(cfg.step(&mut rng));
        }
        frame.hyperbolic_norm() / steps as f64
    });
    rates.iter().sum::<f64>() / n_samples as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GeneratorSet, Preset};
    use approx::assert_abs_diff_eq;

    fn schottky_uniform() -> GroupMeasure {
        let set = GeneratorSet::preset(Preset::Schottky {
            count: 2,
            length: 3.0,
        })
        .unwrap();
        GroupMeasure::uniform_on_generators(&set).unwrap()
    }

    #[test]
    fn deterministic_walk_follows_powers() {
        let g = MoebiusMap::hyperbolic(1.4).unwrap();
        let mu = GroupMeasure::delta(g);
        let cfg = WalkConfig::with_defaults(&mu, 9).unwrap();
        let path = sample_path(&cfg, 20);
        let mut x = MoebiusMap::identity();
        for (n, p) in path.iter().enumerate() {
            x = x.compose(&g);
            let expected = x.apply_finite(Complex64::new(0.0, 0.0));
            assert!((p - expected).norm() < 1e-10, "step {n}");
        }
    }

    #[test]
    fn rotation_walk_never_escapes() {
        let mu = GroupMeasure::delta(MoebiusMap::rotation(1.1));
        let cfg = WalkConfig::new(&mu, 5, 1e-6, 200).unwrap();
        for p in sample_path(&cfg, 50) {
            assert!(p.norm() < 1e-12);
        }
        let s = hitting_sample(&cfg);
        assert!(!s.reached);
        assert_eq!(s.steps_used, 200);
    }

    #[test]
    fn schottky_walk_escapes_exponentially() {
        let mu = schottky_uniform();
        // log(1 - |X_n.0|) should decrease linearly in n; average the slope
        // over seeds with a least-squares fit.
        let mut slopes = Vec::new();
        for seed in 0..100u64 {
            let cfg = WalkConfig::new(&mu, seed, 1e-300, 200).unwrap();
            let mut rng = cfg.rng_for_sample(0);
            let mut frame = Frame::identity();
            let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
            let n = 200;
            for i in 1..=n {
                frame.step(cfg.step(&mut rng));
                let x = i as f64;
                let y = frame.log_det; // log(1 - |z|^2), same decay rate
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
            }
            let slope = (n as f64 * sxy - sx * sy) / (n as f64 * sxx - sx * sx);
            slopes.push(slope);
        }
        let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
        assert!(mean < -1.0, "escape slope {mean} should be strongly negative");
    }

    #[test]
    fn hitting_sample_of_hyperbolic_map() {
        let g = MoebiusMap::hyperbolic(1.76275).unwrap();
        let mu = GroupMeasure::delta(g);
        let cfg = WalkConfig::with_defaults(&mu, 1).unwrap();
        let s = hitting_sample(&cfg);
        assert!(s.reached);
        // attracting fixed point of the preset is +1, angle 0
        let dist = s.angle.min(TAU - s.angle);
        assert!(dist < 1e-3, "angle {} should approach 0", s.angle);
    }

    #[test]
    fn empirical_measure_of_delta_walk_is_one_atom() {
        let g = MoebiusMap::hyperbolic(2.0).unwrap();
        let mu = GroupMeasure::delta(g);
        let cfg = WalkConfig::with_defaults(&mu, 1234).unwrap();
        let (nu, stats) = empirical_hitting_measure(&cfg, 64).unwrap();
        assert_eq!(stats.reached, 64);
        let (angles, _) = nu.as_atomic().unwrap();
        for a in angles {
            let dist = a.min(TAU - a);
            assert!(dist < 1e-3);
        }
    }

    #[test]
    fn schottky_hitting_measure_reaches_and_stabilizes() {
        let mu = schottky_uniform();
        let cfg = WalkConfig::with_defaults(&mu, 42).unwrap();
        let (nu1, stats) = empirical_hitting_measure(&cfg, 2000).unwrap();
        assert!(stats.reached as f64 / stats.requested as f64 > 0.999);
        assert!(!stats.reliability_warning);
        let (nu2, _) = empirical_hitting_measure(&cfg, 8000).unwrap();
        let a1 = nu1.fourier_coeffs(1).get(1);
        let a2 = nu2.fourier_coeffs(1).get(1);
        // Monte-Carlo variance bound: |a1(N) - a1(4N)| < 3/sqrt(N)
        assert!(
            (a1 - a2).norm() < 3.0 / (2000f64).sqrt(),
            "a1 estimates {a1} vs {a2}"
        );
    }

    #[test]
    fn empirical_measure_respects_generator_symmetry() {
        // The symmetrized Schottky walk is invariant under angle -> angle+pi
        // (conjugation by the rotation that swaps the two axes' endpoints).
        let mu = schottky_uniform();
        let cfg = WalkConfig::with_defaults(&mu, 7).unwrap();
        let (nu, _) = empirical_hitting_measure(&cfg, 20_000).unwrap();
        let (angles, _) = nu.as_atomic().unwrap();
        let mut shifted: Vec<f64> = angles.iter().map(|a| (a + std::f64::consts::PI).rem_euclid(TAU)).collect();
        let mut original: Vec<f64> = angles.to_vec();
        original.sort_by(f64::total_cmp);
        shifted.sort_by(f64::total_cmp);
        // two-sample Kolmogorov-Smirnov statistic via sorted merge
        let mut ks: f64 = 0.0;
        let (mut i, mut j) = (0usize, 0usize);
        let n = original.len() as f64;
        while i < original.len() && j < shifted.len() {
            if original[i] <= shifted[j] {
                i += 1;
            } else {
                j += 1;
            }
            ks = ks.max((i as f64 / n - j as f64 / n).abs());
        }
        assert!(ks < 0.02, "KS statistic {ks}");
    }

    #[test]
    fn escape_rate_examples() {
        let g = MoebiusMap::hyperbolic(1.9).unwrap();
        let mu = GroupMeasure::delta(g);
        let cfg = WalkConfig::with_defaults(&mu, 3).unwrap();
        let rate = empirical_escape_rate(&cfg, 4, 50);
        assert_abs_diff_eq!(rate, 1.9, epsilon = 1e-9);

        let rot = GroupMeasure::delta(MoebiusMap::rotation(0.7));
        let cfg = WalkConfig::with_defaults(&rot, 3).unwrap();
        assert_abs_diff_eq!(empirical_escape_rate(&cfg, 4, 50), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn escape_rate_subadditive() {
        let mu = schottky_uniform();
        let cfg = WalkConfig::with_defaults(&mu, 11).unwrap();
        let r_n = empirical_escape_rate(&cfg, 2000, 100);
        let r_2n = empirical_escape_rate(&cfg, 2000, 200);
        assert!(r_2n <= r_n + 0.02, "subadditivity: {r_2n} vs {r_n}");
    }

    #[test]
    fn long_walks_do_not_overflow() {
        let mu = schottky_uniform();
        let cfg = WalkConfig::new(&mu, 77, 1e-300, 20_000).unwrap();
        let mut rng = cfg.rng_for_sample(0);
        let mut frame = Frame::identity();
        for _ in 0..20_000 {
            frame.step(cfg.step(&mut rng));
        }
        assert!(frame.a.norm().is_finite());
        assert!(frame.hyperbolic_norm().is_finite());
        assert!(frame.hyperbolic_norm() > 10_000.0);
        let z = frame.point();
        assert!(z.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn determinism_bitwise() {
        let mu = schottky_uniform();
        let cfg = WalkConfig::with_defaults(&mu, 4242).unwrap();
        let (nu1, s1) = empirical_hitting_measure(&cfg, 500).unwrap();
        let (nu2, s2) = empirical_hitting_measure(&cfg, 500).unwrap();
        assert_eq!(s1.reached, s2.reached);
        let (a1, _) = nu1.as_atomic().unwrap();
        let (a2, _) = nu2.as_atomic().unwrap();
        assert_eq!(a1, a2, "identical seeds must give bitwise-identical angles");
        let r1 = empirical_escape_rate(&cfg, 200, 100);
        let r2 = empirical_escape_rate(&cfg, 200, 100);
        assert_eq!(r1.to_bits(), r2.to_bits());
    }
}
