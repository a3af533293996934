//! Command-line front end: wires configs to the toolkit operations and
//! emits machine-readable reports.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric/resource error.

mod report;
mod sources;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use diskwalk::cmeasure::CircleMeasure;
use diskwalk::error::Error;
use diskwalk::group::ELEMENT_CAP;
use diskwalk::moebius::ExtendedComplex;
use diskwalk::sample::{random_disk_point, random_map, random_unit_point, seeded_rng};
use diskwalk::stationarity::{
    borel_norm_growth, contour_charge, drift, residual_report, stolz_coverage,
    t_mu_adjoint_matrix, t_mu_matrix,
};
use diskwalk::transforms::{aleksandrov_statistic, boundary_gap, DEFAULT_QUAD};
use diskwalk::walk::{empirical_escape_rate, sample_path, WalkConfig};

use report::{render_envelope, write_output, CsvTable};
use sources::{complex_pair, GroupArgs, NuArgs};

#[derive(Parser)]
#[command(name = "diskwalk", version, about = "Stationary-measure diagnostics on the unit circle")]
struct Cli {
    /// Report destination ('-' for stdout)
    #[arg(long, global = true, default_value = "-")]
    output: String,
    /// Optional CSV export path for tabular results
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Serialize, Deserialize, Clone)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Cmd {
    /// Check the Möbius/cocycle identities on seeded random data
    Identities(IdentitiesArgs),
    /// Enumerate a group ball and report its growth
    Enumerate(EnumerateArgs),
    /// Moment, Blaschke, and weight-decay diagnostics of a measure
    Moments(MomentsArgs),
    /// Sample a trajectory and estimate the escape rate
    Walk(WalkArgs),
    /// Empirical hitting measure from boundary-hitting samples
    Hitting(HittingArgs),
    /// Functional-equation residual on a disk grid
    Residual(ResidualArgs),
    /// Furstenberg drift of a (measure, circle measure) pair
    Drift(DriftArgs),
    /// Hardy norms of the pole series of convolution powers
    BorelNorms(BorelNormsArgs),
    /// Singularity statistic (1-p)·||f||_p across p
    Aleksandrov(AleksandrovArgs),
    /// Two-sided boundary gap of the Cauchy transform
    Gap(GapArgs),
    /// Finite sections of the transfer operator and its adjoint
    Operator(OperatorArgs),
    /// Contour charge around a prescribed center
    Contour(ContourArgs),
    /// Stolz-angle coverage of the boundary by an orbit
    Stolz(StolzArgs),
    /// Fixed-point iteration of the Markov operator
    Iterate(IterateArgs),
    /// Re-execute the config embedded in an emitted report
    #[serde(skip)]
    Rerun(RerunArgs),
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct IdentitiesArgs {
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct EnumerateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
    #[arg(long, default_value_t = 4)]
    radius: usize,
    #[arg(long, default_value_t = ELEMENT_CAP)]
    cap: usize,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct MomentsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct WalkArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_steps: usize,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct HittingArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_steps: usize,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct ResidualArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
    #[command(flatten)]
    #[serde(flatten)]
    nu: NuArgs,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 0.9)]
    rmax: f64,
    #[arg(long, default_value_t = 256)]
    grid_size: usize,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct DriftArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
    #[command(flatten)]
    #[serde(flatten)]
    nu: NuArgs,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct BorelNormsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
    #[arg(long, default_value_t = 10)]
    nmax: usize,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct AleksandrovArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
    #[command(flatten)]
    #[serde(flatten)]
    nu: NuArgs,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Comma-separated exponents in (0,1)
    #[arg(long, value_delimiter = ',', default_values_t = [0.9, 0.95, 0.99])]
    p_list: Vec<f64>,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct GapArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
    #[command(flatten)]
    #[serde(flatten)]
    nu: NuArgs,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 0.999)]
    r: f64,
    #[arg(long, default_value_t = DEFAULT_QUAD)]
    quad: usize,
    /// Vanish threshold; defaults to 125·(1−r)
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct OperatorArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
    #[arg(long, default_value_t = 16)]
    k: usize,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct ContourArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
    #[arg(long, default_value_t = 1.4142135623730951)]
    center_re: f64,
    #[arg(long, default_value_t = 0.0)]
    center_im: f64,
    #[arg(long, default_value_t = 0.25)]
    radius: f64,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct StolzArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
    #[arg(long, default_value_t = 6)]
    ball_radius: usize,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    #[arg(long, default_value_t = 1024)]
    boundary_grid: usize,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct IterateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    group: GroupArgs,
    #[command(flatten)]
    #[serde(flatten)]
    nu: NuArgs,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Band for the reported final coefficients
    #[arg(long, default_value_t = 16)]
    band: usize,
}

#[derive(Args, Clone, Serialize, Deserialize)]
struct RerunArgs {
    /// An emitted JSON report whose embedded config is re-executed
    #[arg(long)]
    report: PathBuf,
}

fn run_identities(args: &IdentitiesArgs) -> Result<(Value, Option<CsvTable>), Error> {
    use diskwalk::moebius::busemann;
    let mut rng = seeded_rng(args.seed);
    let mut defects = [0f64; 5];
    for _ in 0..args.trials {
        let g = random_map(&mut rng);
        let z = random_disk_point(&mut rng, 0.95);
        let xi = random_unit_point(&mut rng);

        let gz = g.apply_finite(z);
        let d0 = ((1.0 - gz.norm_sqr()).ln() - (1.0 - z.norm_sqr()).ln()
            - g.derivative(z)?.norm().ln())
        .abs();

        let gxi = g.apply_finite(xi);
        let g10 = g.inverse().apply_finite(Complex64::new(0.0, 0.0));
        let d1 = (busemann(gz, gxi / gxi.norm())? - busemann(z, xi)? + busemann(g10, xi)?).abs();

        let d2 = (g.apply_finite(z.conj().finv()).conj() - g.apply_finite(z).finv()).norm();

        let w = g
            .pole_image()
            .as_finite()
            .ok_or_else(|| Error::Domain("rotation in identity suite".into()))?;
        let d3 = (w * g.apply_finite(Complex64::new(0.0, 0.0)).conj() - 1.0).norm();

        let den = g.b().conj() * z + g.a().conj();
        let direct = (-2.0 * g.b().conj() / (den * den * den)) / (den * den).finv() / 2.0;
        let d4 = (direct - g.half_log_derivative_pole(z)?).norm();

        for (slot, d) in defects.iter_mut().zip([d0, d1, d2, d3, d4]) {
            *slot = slot.max(d);
        }
    }
    Ok((
        json!({
            "trials": args.trials,
            "max_defects": {
                "metric_distortion": defects[0],
                "cocycle": defects[1],
                "inside_outside": defects[2],
                "pole_image": defects[3],
                "log_derivative_pole": defects[4],
            }
        }),
        None,
    ))
}

fn run_enumerate(args: &EnumerateArgs) -> Result<(Value, Option<CsvTable>), Error> {
    let set = args.group.generators()?;
    let ball = set.enumerate_ball(args.radius, args.cap)?;
    let mut by_length = vec![0usize; args.radius + 1];
    for e in &ball.elements {
        by_length[e.word.len()] += 1;
    }
    let rows = ball
        .elements
        .iter()
        .map(|e| {
            let word = e
                .word
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(".");
            format!(
                "{word},{},{},{},{}",
                e.map.a().re,
                e.map.a().im,
                e.map.b().re,
                e.map.b().im
            )
        })
        .collect();
    Ok((
        json!({
            "label": set.label,
            "alphabet": set.alphabet().len(),
            "radius": args.radius,
            "total": ball.len(),
            "count_by_word_length": by_length,
        }),
        Some(CsvTable {
            header: "word,a_re,a_im,b_re,b_im".into(),
            rows,
        }),
    ))
}

fn run_moments(args: &MomentsArgs) -> Result<(Value, Option<CsvTable>), Error> {
    let mu = args.group.measure()?;
    Ok((
        json!({
            "label": mu.label(),
            "support": mu.support_size(),
            "mass": complex_pair(mu.mass()),
            "total_variation": mu.total_variation(),
            "is_probability": mu.is_probability(),
            "first_moment": mu.first_moment(),
            "blaschke_sum": mu.blaschke_sum(),
            "weight_decay_rate": mu.weight_decay_rate(None)?,
        }),
        None,
    ))
}

fn run_walk(args: &WalkArgs) -> Result<(Value, Option<CsvTable>), Error> {
    let mu = args.group.measure()?;
    let cfg = WalkConfig::new(&mu, args.seed, args.tol, args.max_steps)?;
    let rate = empirical_escape_rate(&cfg, args.samples, args.steps);
    let path = sample_path(&cfg, args.steps);
    let rows = path
        .iter()
        .enumerate()
        .map(|(n, z)| format!("{},{},{}", n + 1, z.re, z.im))
        .collect();
    Ok((
        json!({
            "escape_rate": rate,
            "samples": args.samples,
            "steps": args.steps,
            "final_point_of_first_path": complex_pair(path[path.len() - 1]),
        }),
        Some(CsvTable {
            header: "n,re,im".into(),
            rows,
        }),
    ))
}

fn run_hitting(args: &HittingArgs) -> Result<(Value, Option<CsvTable>), Error> {
    let mu = args.group.measure()?;
    let cfg = WalkConfig::new(&mu, args.seed, args.tol, args.max_steps)?;
    let (nu, stats) = diskwalk::walk::empirical_hitting_measure(&cfg, args.samples)?;
    let rate = empirical_escape_rate(&cfg, args.samples.min(2000), 200);
    let (angles, _) = nu.as_atomic().expect("empirical measure is atomic");
    let coeffs = nu.fourier_coeffs(4);
    let rows = angles.iter().map(|a| format!("{a}")).collect();
    Ok((
        json!({
            "stats": serde_json::to_value(stats).expect("serializable"),
            "reached_fraction": stats.reached as f64 / stats.requested as f64,
            "escape_rate": rate,
            "fourier_abs_1_to_4": (1..=4i64).map(|k| coeffs.get(k).norm()).collect::<Vec<_>>(),
        }),
        Some(CsvTable {
            header: "angle".into(),
            rows,
        }),
    ))
}

fn run_residual(args: &ResidualArgs) -> Result<(Value, Option<CsvTable>), Error> {
    let mu = args.group.measure()?;
    let nu = args.nu.resolve(&mu, args.seed)?;
    let rep = residual_report(&mu, &nu, args.rmax, args.grid_size)?;
    let rows = rep
        .points
        .iter()
        .zip(&rep.values)
        .map(|(z, v)| {
            format!(
                "{},{},{},{},{}",
                z[0],
                z[1],
                v[0],
                v[1],
                (v[0] * v[0] + v[1] * v[1]).sqrt()
            )
        })
        .collect();
    Ok((
        serde_json::to_value(&rep).expect("serializable report"),
        Some(CsvTable {
            header: "z_re,z_im,res_re,res_im,res_abs".into(),
            rows,
        }),
    ))
}

fn run_drift(args: &DriftArgs) -> Result<(Value, Option<CsvTable>), Error> {
    let mu = args.group.measure()?;
    let nu = args.nu.resolve(&mu, args.seed)?;
    let d = drift(&mu, &nu)?;
    Ok((
        json!({
            "drift": complex_pair(d),
            "drift_abs": d.norm(),
            "note": "the Busemann-cocycle constant; for a point mass at the attracting fixed point of a translation it equals minus the translation length",
        }),
        None,
    ))
}

fn run_borel_norms(args: &BorelNormsArgs) -> Result<(Value, Option<CsvTable>), Error> {
    let mu = args.group.measure()?;
    let seq = borel_norm_growth(&mu, args.nmax, args.p)?;
    let rows = seq
        .iter()
        .map(|(n, est)| format!("{n},{}", est.sup_value))
        .collect();
    Ok((
        json!({
            "p": args.p,
            "norms": seq
                .iter()
                .map(|(n, est)| json!({"n": n, "sup": est.sup_value, "radii": est.radii, "values": est.values}))
                .collect::<Vec<_>>(),
        }),
        Some(CsvTable {
            header: "n,norm".into(),
            rows,
        }),
    ))
}

fn run_aleksandrov(args: &AleksandrovArgs) -> Result<(Value, Option<CsvTable>), Error> {
    let mu = args.group.measure()?;
    let nu = args.nu.resolve(&mu, args.seed)?;
    let stats = aleksandrov_statistic(&nu, &args.p_list)?;
    let rows = stats.iter().map(|(p, s)| format!("{p},{s}")).collect();
    Ok((
        json!({
            "statistics": stats.iter().map(|(p, s)| json!({"p": p, "statistic": s})).collect::<Vec<_>>(),
        }),
        Some(CsvTable {
            header: "p,statistic".into(),
            rows,
        }),
    ))
}

fn run_gap(args: &GapArgs) -> Result<(Value, Option<CsvTable>), Error> {
    let mu = args.group.measure()?;
    let nu = args.nu.resolve(&mu, args.seed)?;
    let gap = boundary_gap(&nu, args.r, args.quad, args.eps)?;
    let rows = gap
        .abs_samples
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let t = std::f64::consts::TAU * j as f64 / gap.abs_samples.len() as f64;
            format!("{t},{s}")
        })
        .collect();
    Ok((
        json!({
            "r": gap.r,
            "eps": gap.eps,
            "l1": gap.l1,
            "vanish_fraction": gap.vanish_fraction,
        }),
        Some(CsvTable {
            header: "t,abs_gap".into(),
            rows,
        }),
    ))
}

fn run_operator(args: &OperatorArgs) -> Result<(Value, Option<CsvTable>), Error> {
    let mu = args.group.measure()?;
    let t = t_mu_matrix(&mu, args.k)?;
    let adj = t_mu_adjoint_matrix(&mu, args.k)?;
    let defect = adj.conj_transpose_distance(&t);
    Ok((
        json!({
            "k": args.k,
            "transfer": serde_json::to_value(&t).expect("serializable"),
            "adjoint": serde_json::to_value(&adj).expect("serializable"),
            "conj_transpose_defect": defect,
        }),
        None,
    ))
}

fn run_contour(args: &ContourArgs) -> Result<(Value, Option<CsvTable>), Error> {
    let mu = args.group.measure()?;
    let center = Complex64::new(args.center_re, args.center_im);
    let fns: [(&str, Box<dyn Fn(Complex64) -> Complex64 + Sync>); 3] = [
        ("0", Box::new(|_| Complex64::new(0.0, 0.0))),
        ("z", Box::new(|z| z)),
        ("z^2", Box::new(|z| z * z)),
    ];
    let mut charges = Vec::new();
    for (name, f) in &fns {
        let c = contour_charge(&mu, f, center, args.radius)?;
        charges.push(json!({"f": name, "charge": complex_pair(c)}));
    }
    let enclosed: Complex64 = mu
        .atoms()
        .iter()
        .filter_map(|(g, w)| match g.pole_image() {
            ExtendedComplex::Finite(p) if (p - center).norm() < args.radius => Some(*w),
            _ => None,
        })
        .sum();
    Ok((
        json!({
            "center": [args.center_re, args.center_im],
            "radius": args.radius,
            "charges": charges,
            "enclosed_weight": complex_pair(enclosed),
        }),
        None,
    ))
}

fn run_stolz(args: &StolzArgs) -> Result<(Value, Option<CsvTable>), Error> {
    let set = args.group.generators()?;
    let ball = set.enumerate_ball(args.ball_radius, ELEMENT_CAP)?;
    let points: Vec<Complex64> = ball
        .orbit_points(ExtendedComplex::finite(Complex64::new(0.0, 0.0)))
        .iter()
        .filter_map(|p| p.as_finite())
        .filter(|z| z.norm() < 1.0)
        .collect();
    let rep = stolz_coverage(&points, args.alpha, args.eps, args.boundary_grid)?;
    let rows = rep
        .covered
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let t = std::f64::consts::TAU * j as f64 / rep.boundary_grid as f64;
            format!("{t},{}", if *c { 1 } else { 0 })
        })
        .collect();
    Ok((
        json!({
            "points": points.len(),
            "alpha": rep.alpha,
            "eps": rep.eps,
            "boundary_grid": rep.boundary_grid,
            "coverage_fraction": rep.coverage_fraction,
        }),
        Some(CsvTable {
            header: "angle,covered".into(),
            rows,
        }),
    ))
}

fn run_iterate(args: &IterateArgs) -> Result<(Value, Option<CsvTable>), Error> {
    let mu = args.group.measure()?;
    let nu0 = if args.nu.nu == "lebesgue" {
        // iteration needs a grid/fourier start; lebesgue as a band measure
        CircleMeasure::lebesgue()
    } else {
        args.nu.resolve(&mu, args.seed)?
    };
    let (limit, history) = nu0.stationary_iterate(&mu, args.max_iter, args.tol)?;
    let coeffs = limit.fourier_coeffs(args.band);
    let rows = history
        .iter()
        .enumerate()
        .map(|(i, d)| format!("{},{}", i + 1, d))
        .collect();
    Ok((
        json!({
            "iterations_run": history.len(),
            "converged": history.last().map(|d| *d <= args.tol).unwrap_or(false),
            "history": history,
            "final_coeffs": (-(args.band as i64)..=args.band as i64)
                .map(|k| json!({"k": k, "value": complex_pair(coeffs.get(k))}))
                .collect::<Vec<_>>(),
        }),
        Some(CsvTable {
            header: "iteration,coeff_distance".into(),
            rows,
        }),
    ))
}

fn dispatch(cmd: &Cmd) -> Result<(Value, Option<CsvTable>), Error> {
    match cmd {
        Cmd::Identities(a) => run_identities(a),
        Cmd::Enumerate(a) => run_enumerate(a),
        Cmd::Moments(a) => run_moments(a),
        Cmd::Walk(a) => run_walk(a),
        Cmd::Hitting(a) => run_hitting(a),
        Cmd::Residual(a) => run_residual(a),
        Cmd::Drift(a) => run_drift(a),
        Cmd::BorelNorms(a) => run_borel_norms(a),
        Cmd::Aleksandrov(a) => run_aleksandrov(a),
        Cmd::Gap(a) => run_gap(a),
        Cmd::Operator(a) => run_operator(a),
        Cmd::Contour(a) => run_contour(a),
        Cmd::Stolz(a) => run_stolz(a),
        Cmd::Iterate(a) => run_iterate(a),
        Cmd::Rerun(_) => unreachable!("rerun resolves before dispatch"),
    }
}

fn execute(cli: &Cli) -> Result<(), Error> {
    let cmd = match &cli.cmd {
        Cmd::Rerun(args) => {
            let text = std::fs::read_to_string(&args.report).map_err(|e| {
                Error::Config(format!("cannot read {}: {e}", args.report.display()))
            })?;
            let mut value: Value = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("invalid report JSON: {e}")))?;
            let map = value
                .as_object_mut()
                .ok_or_else(|| Error::Config("report is not a JSON object".into()))?;
            map.remove("tool");
            map.remove("version");
            map.remove("result");
            serde_json::from_value(value)
                .map_err(|e| Error::Config(format!("report carries no valid config: {e}")))?
        }
        other => other.clone(),
    };
    let (result, table) = dispatch(&cmd)?;
    let config = serde_json::to_value(&cmd).expect("serializable config");
    write_output(&cli.output, &render_envelope(config, result))?;
    if let Some(path) = &cli.csv {
        if let Some(table) = table {
            std::fs::write(path, table.render())
                .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        } else {
            return Err(Error::Config(
                "this subcommand produces no tabular output".into(),
            ));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
