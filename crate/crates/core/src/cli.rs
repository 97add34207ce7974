//! Command-line driver behind the `sss` binary.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::appell::appell_transform;
use crate::error::{Error, Result};
use crate::exponents::{exponent_table, ExponentTable, SolveOptions};
use crate::heat_polynomial;
use crate::pde_verify::{evolve, lipschitz_demo, lipschitz_times, self_similarity_ratio, EvolveOptions, RadialGrid};
use crate::profile_ode::{ProblemParams, SelfSimilarProfile, Sign, SolverSettings, TailKind};
use crate::roots;
use crate::shooting::{assemble_matched_profile, classify_tail, inverse_zero_map, shoot_origin, Side, TailVerdict};
use crate::verify::{run_suite, Suite, VerifyConfig};

/// Run-wide settings, read from a `key = value` file and overridden by flags.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dimension: u32,
    pub rtol: f64,
    pub atol: f64,
    pub event_tol: f64,
    /// Accepted matching residual at a solved exponent.
    pub matching_tol: f64,
    pub alpha_tol: f64,
    /// Relative zero mismatch under which a tail counts as algebraic.
    pub tail_tol: f64,
    pub horizon_scale: f64,
    pub max_zeros: usize,
    pub spectral_grid_points: usize,
    pub pde_spacing: f64,
    pub threads: usize,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = SolverSettings::default();
        let o = SolveOptions::default();
        Self {
            dimension: 1,
            rtol: s.tolerances.rtol,
            atol: s.tolerances.atol,
            event_tol: s.event_tol,
            matching_tol: o.residual_tol,
            alpha_tol: o.alpha_tol,
            tail_tol: 1e-6,
            horizon_scale: s.horizon_scale,
            max_zeros: s.max_zeros,
            spectral_grid_points: 10_000,
            pde_spacing: 1.0 / 400.0,
            threads: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            output_dir: None,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad value '{value}' for '{key}'")))
}

impl RunConfig {
    /// Parses `key = value` lines on top of the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("line {}: expected key = value", i + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "dimension" => self.dimension = parse_value(key, value)?,
            "rtol" => self.rtol = parse_value(key, value)?,
            "atol" => self.atol = parse_value(key, value)?,
            "event_tol" => self.event_tol = parse_value(key, value)?,
            "matching_tol" => self.matching_tol = parse_value(key, value)?,
            "alpha_tol" => self.alpha_tol = parse_value(key, value)?,
            "tail_tol" => self.tail_tol = parse_value(key, value)?,
            "horizon_scale" => self.horizon_scale = parse_value(key, value)?,
            "max_zeros" => self.max_zeros = parse_value(key, value)?,
            "spectral_grid_points" => self.spectral_grid_points = parse_value(key, value)?,
            "pde_spacing" => self.pde_spacing = parse_value(key, value)?,
            "threads" => self.threads = parse_value(key, value)?,
            "output_dir" => self.output_dir = Some(PathBuf::from(value)),
            other => return Err(Error::InvalidInput(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::InvalidInput("dimension must be >= 1".into()));
        }
        if self.threads == 0 {
            return Err(Error::InvalidInput("threads must be >= 1".into()));
        }
        let positive = [
            ("matching_tol", self.matching_tol),
            ("alpha_tol", self.alpha_tol),
            ("tail_tol", self.tail_tol),
            ("pde_spacing", self.pde_spacing),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        if self.spectral_grid_points < 100 {
            return Err(Error::InvalidInput("spectral_grid_points must be >= 100".into()));
        }
        self.settings().validate()
    }

    pub fn settings(&self) -> SolverSettings {
        let mut s = SolverSettings::default();
        s.tolerances.rtol = self.rtol;
        s.tolerances.atol = self.atol;
        s.event_tol = self.event_tol;
        s.horizon_scale = self.horizon_scale;
        s.max_zeros = self.max_zeros;
        s
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions { alpha_tol: self.alpha_tol, residual_tol: self.matching_tol, ..SolveOptions::default() }
    }

    pub fn verify_config(&self) -> VerifyConfig {
        let mut v = VerifyConfig::new(self.dimension);
        v.settings = self.settings();
        v.solve = self.solve_options();
        v.spectral.grid_points = self.spectral_grid_points;
        v.pde.spacing = self.pde_spacing;
        v
    }

    fn resolve(&self, path: &Path) -> PathBuf {
        match &self.output_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sss", version, about = "Radial self-similar solutions of beta(w)_t = Laplacian w")]
pub struct Cli {
    /// Configuration file with `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Space dimension N.
    #[arg(long, global = true)]
    pub dim: Option<u32>,
    /// Worker threads (overrides SSS_THREADS and the config file).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigen-homogeneities alpha^(+/-)_k as CSV.
    Alpha(AlphaArgs),
    /// Samples of a profile f.
    Profile(ProfileArgs),
    /// Zero-map curves alpha(s) and their intersections.
    Sweep(SweepArgs),
    /// Runs verification suites; exit code 1 on any failed check.
    Verify(VerifyArgs),
    /// Appell dual g = psi f of a profile.
    Appell(ProfileArgs),
    /// Finite-difference evolution from a self-similar profile.
    Evolve(EvolveArgs),
}

#[derive(Debug, Args)]
pub struct AlphaArgs {
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub sign: Option<Sign>,
    /// All k up to this bound, both signs.
    #[arg(long)]
    pub max_k: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value = "plus")]
    pub sign: Sign,
    #[arg(long, default_value_t = 2000)]
    pub points: usize,
    /// Right end of the sample range (default: horizon or end of the computed range).
    #[arg(long)]
    pub s_max: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// `lo:hi:n`.
    #[arg(long, default_value = "0.5:4:64")]
    pub s_range: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: Suite,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// Defaults to the computed alpha^-_1.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value = "minus")]
    pub sign: Sign,
    #[arg(long, default_value_t = -0.05, allow_negative_numbers = true)]
    pub t_end: f64,
    /// Grid spacing (default from the config, 1/400).
    #[arg(long)]
    pub spacing: Option<f64>,
    /// Runs to t = -2^-10 and reports difference quotients instead of the trace.
    #[arg(long)]
    pub lipschitz_demo: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Solver(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(m) => Failure::Usage(m),
            other => Failure::Solver(other),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Solver(Error::Io(e.to_string()))
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Single-header CSV in memory; written out once all work has joined.
struct Csv {
    text: String,
}

impl Csv {
    fn new(header: &[&str]) -> Self {
        Self { text: header.join(",") + "\n" }
    }

    fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    fn emit(&self, cfg: &RunConfig, out: Option<&Path>) -> io::Result<()> {
        match out {
            Some(p) => {
                let p = cfg.resolve(p);
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir)?;
                }
                fs::write(p, &self.text)
            }
            None => io::stdout().write_all(self.text.as_bytes()),
        }
    }
}

/// Resolves the configuration: file, then `SSS_THREADS`, then flags.
pub fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::parse(&fs::read_to_string(p)?)?,
        None => RunConfig::default(),
    };
    match (cli.threads, std::env::var("SSS_THREADS")) {
        (Some(t), _) => cfg.threads = t,
        (None, Ok(v)) => cfg.threads = parse_value("SSS_THREADS", v.trim())?,
        (None, Err(_)) => {}
    }
    if let Some(n) = cli.dim {
        cfg.dimension = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Origin shot at `params`, replaced by the matched profile when one of its
/// zeros is followed by an algebraic tail.
pub fn build_profile(params: &ProblemParams, settings: &SolverSettings, tail_tol: f64) -> Result<SelfSimilarProfile> {
    let origin = shoot_origin(params, settings)?;
    for (i, &z) in origin.zeros.iter().enumerate() {
        let k = i + 1;
        match classify_tail(z, params.origin_sign.after_changes(k), params, settings, tail_tol) {
            Ok(d) if d.verdict == TailVerdict::Algebraic => return assemble_matched_profile(params, k, settings),
            Ok(_) => {}
            Err(Error::Unsupported { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(origin)
}

fn tail_name(kind: TailKind) -> &'static str {
    match kind {
        TailKind::Algebraic => "algebraic",
        TailKind::Exponential => "exponential",
        TailKind::Truncated => "truncated",
    }
}

fn sample_end(profile: &SelfSimilarProfile, settings: &SolverSettings, s_max: Option<f64>) -> f64 {
    let horizon = settings.horizon(profile.params.dimension);
    s_max.unwrap_or(horizon).min(profile.end())
}

fn cmd_alpha(cfg: &RunConfig, args: &AlphaArgs) -> std::result::Result<(), Failure> {
    let (max_k, sign) = match (args.max_k, args.k, args.sign) {
        (Some(m), None, None) => (m, None),
        (None, Some(k), Some(s)) => (k, Some((s, k))),
        _ => return Err(Failure::Usage("give either --max-k, or both --k and --sign".into())),
    };
    let table = exponent_table(max_k, cfg.dimension, &cfg.settings(), &cfg.solve_options())?;
    let mut csv = Csv::new(&["k", "sign", "alpha", "beta", "residual", "ident_check", "bracket_lo", "bracket_hi"]);
    for r in table.records.iter().filter(|r| sign.is_none_or(|(s, k)| r.sign == s && r.k == k)) {
        csv.row(&[
            r.k.to_string(),
            r.sign.to_string(),
            num(r.alpha),
            num(r.beta),
            num(r.residual),
            num(r.ident_check),
            num(r.bracket.0),
            num(r.bracket.1),
        ]);
        if args.out.is_some() {
            println!("{r}");
        }
    }
    csv.emit(cfg, args.out.as_deref())?;
    Ok(())
}

fn cmd_profile(cfg: &RunConfig, args: &ProfileArgs) -> std::result::Result<(), Failure> {
    let settings = cfg.settings();
    let params = ProblemParams::new(cfg.dimension, args.alpha, args.sign)?;
    let profile = build_profile(&params, &settings, cfg.tail_tol)?;
    let end = sample_end(&profile, &settings, args.s_max);
    let tail = tail_name(profile.tail.kind);
    let mut csv = Csv::new(&["s", "f", "f_prime", "branch", "piece_index", "tail"]);
    for (s, [f, fp]) in profile.sample(end, args.points) {
        let idx = profile.piece_index(s);
        csv.row(&[num(s), num(f), num(fp), profile.pieces[idx].branch.to_string(), idx.to_string(), tail.into()]);
    }
    csv.emit(cfg, args.out.as_deref())?;
    Ok(())
}

fn cmd_appell(cfg: &RunConfig, args: &ProfileArgs) -> std::result::Result<(), Failure> {
    let settings = cfg.settings();
    let params = ProblemParams::new(cfg.dimension, args.alpha, args.sign)?;
    let profile = build_profile(&params, &settings, cfg.tail_tol)?;
    let end = sample_end(&profile, &settings, args.s_max);
    let pair = appell_transform(&profile);
    let mut csv = Csv::new(&["r", "f", "psi", "g"]);
    for (r, [f, _]) in profile.sample(end, args.points) {
        let g = pair.g(r).map_or(f64::NAN, |y| y[0]);
        csv.row(&[num(r), num(f), num(pair.psi.value(r)), num(g)]);
    }
    csv.emit(cfg, args.out.as_deref())?;
    Ok(())
}

/// One curve of the sweep: which zero map is inverted.
#[derive(Debug, Clone, Copy)]
struct Curve {
    name: &'static str,
    sign: Sign,
    k: usize,
    side: Side,
}

const CURVES: [Curve; 6] = [
    Curve { name: "alpha_plus", sign: Sign::Plus, k: 1, side: Side::FromOrigin },
    Curve { name: "alpha_minus", sign: Sign::Minus, k: 1, side: Side::FromOrigin },
    Curve { name: "alpha_tilde_plus", sign: Sign::Plus, k: 1, side: Side::FromInfinity },
    Curve { name: "alpha_tilde_minus", sign: Sign::Minus, k: 1, side: Side::FromInfinity },
    Curve { name: "alpha_plus_2", sign: Sign::Plus, k: 2, side: Side::FromOrigin },
    Curve { name: "alpha_minus_2", sign: Sign::Minus, k: 2, side: Side::FromOrigin },
];

/// Origin curve, infinity curve, name of the exponent at their crossing.
const CROSSINGS: [(usize, usize, &str); 4] = [
    (1, 2, "alpha^-_1"),
    (0, 3, "alpha^+_1"),
    (4, 2, "alpha^+_2"),
    (5, 3, "alpha^-_2"),
];

fn parse_range(text: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Error::InvalidInput(format!("--s-range expects lo:hi:n, got '{text}'"));
    let [lo, hi, n] = parts.as_slice() else { return Err(bad()) };
    let (lo, hi, n): (f64, f64, usize) = (
        lo.parse().map_err(|_| bad())?,
        hi.parse().map_err(|_| bad())?,
        n.parse().map_err(|_| bad())?,
    );
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(bad());
    }
    Ok((lo, hi, n))
}

fn curve_value(c: &Curve, s: f64, n: u32, settings: &SolverSettings) -> f64 {
    inverse_zero_map(s, c.sign, c.k, c.side, n, settings, 1e-13).unwrap_or(f64::NAN)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    path.with_file_name(format!("{stem}_{suffix}.csv"))
}

fn cmd_sweep(cfg: &RunConfig, args: &SweepArgs) -> std::result::Result<(), Failure> {
    let (lo, hi, count) = parse_range(&args.s_range)?;
    let settings = cfg.settings();
    let n = cfg.dimension;
    let grid: Vec<f64> = (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect();
    let rows: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&s| CURVES.iter().map(|c| curve_value(c, s, n, &settings)).collect())
        .collect();

    let header: Vec<&str> = std::iter::once("s").chain(CURVES.iter().map(|c| c.name)).collect();
    let mut curves = Csv::new(&header);
    for (s, row) in grid.iter().zip(&rows) {
        let mut fields = vec![num(*s)];
        fields.extend(row.iter().map(|&v| num(v)));
        curves.row(&fields);
    }

    // Sign changes of origin minus infinity curve between neighbouring rows.
    let mut brackets = Vec::new();
    for &(a, b, name) in &CROSSINGS {
        for i in 0..count - 1 {
            let d0 = rows[i][a] - rows[i][b];
            let d1 = rows[i + 1][a] - rows[i + 1][b];
            if d0.is_finite() && d1.is_finite() && d0 * d1 <= 0.0 {
                brackets.push((a, b, name, grid[i], grid[i + 1], d0, d1));
            }
        }
    }
    let found: Vec<Result<(String, f64, f64)>> = brackets
        .par_iter()
        .map(|&(a, b, name, s0, s1, d0, d1)| {
            let d = |s: f64| curve_value(&CURVES[a], s, n, &settings) - curve_value(&CURVES[b], s, n, &settings);
            let root = roots::brent(d, s0, s1, d0, d1, 1e-12, 200)?;
            Ok((name.to_string(), root.x, curve_value(&CURVES[a], root.x, n, &settings)))
        })
        .collect();
    let mut crossings = Csv::new(&["exponent", "s", "alpha"]);
    for f in found {
        let (name, s, alpha) = f?;
        crossings.row(&[name, num(s), num(alpha)]);
    }

    let mut dots = Csv::new(&["degree", "alpha", "curve", "s"]);
    for m in 1..=3 {
        for (curve, lambda) in [("alpha_plus", 1.0), ("alpha_minus", 2.0)] {
            let z = heat_polynomial::zeros(m, n, lambda)?;
            dots.row(&[(2 * m).to_string(), num(2.0 * m as f64), curve.into(), num(z[0])]);
        }
    }

    curves.emit(cfg, Some(&args.out))?;
    crossings.emit(cfg, Some(&with_suffix(&args.out, "intersections")))?;
    dots.emit(cfg, Some(&with_suffix(&args.out, "heat_dots")))?;
    Ok(())
}

fn cmd_verify(cfg: &RunConfig, args: &VerifyArgs) -> std::result::Result<(), Failure> {
    let reports = run_suite(args.suite, &cfg.verify_config())?;
    let (mut checks, mut failed) = (0, 0);
    for r in &reports {
        println!("{r}");
        println!();
        checks += r.checks.len();
        failed += r.failures().count();
    }
    let status = if failed == 0 { "PASS" } else { "FAIL" };
    println!("summary suite={} dim={} checks={checks} failed={failed} status={status}", args.suite, cfg.dimension);
    if failed == 0 { Ok(()) } else { Err(Failure::Verification) }
}

fn first_minus(cfg: &RunConfig) -> Result<f64> {
    let table: ExponentTable = exponent_table(1, cfg.dimension, &cfg.settings(), &cfg.solve_options())?;
    table.alpha(Sign::Minus, 1).ok_or_else(|| Error::NonConvergence("alpha^-_1 not computed".into()))
}

fn cmd_evolve(cfg: &RunConfig, args: &EvolveArgs) -> std::result::Result<(), Failure> {
    let alpha = match args.alpha {
        Some(a) => a,
        None if args.sign == Sign::Minus => first_minus(cfg)?,
        None => return Err(Failure::Usage("--alpha is required with --sign plus".into())),
    };
    let settings = cfg.settings();
    let params = ProblemParams::new(cfg.dimension, alpha, args.sign)?;
    let profile = build_profile(&params, &settings, cfg.tail_tol)?;
    if profile.tail.kind != TailKind::Algebraic {
        return Err(Failure::Usage(format!("alpha = {alpha} is not an eigen-homogeneity for sign {}", args.sign)));
    }
    let grid = RadialGrid::for_profile(args.spacing.unwrap_or(cfg.pde_spacing), &profile)?;
    let f0 = args.sign.value();
    if args.lipschitz_demo {
        let opts = EvolveOptions { record_times: lipschitz_times(), ..EvolveOptions::default() };
        let traj = evolve(&profile, lipschitz_times()[9], &grid, &opts)?;
        let table = lipschitz_demo(&traj, alpha)?;
        let mut csv = Csv::new(&["m", "tau", "w0", "quotient"]);
        for r in &table.rows {
            csv.row(&[r.m.to_string(), num(r.tau), num(r.w0), num(r.quotient)]);
        }
        csv.emit(cfg, args.out.as_deref())?;
        eprintln!(
            "alpha = {alpha:.12}: fitted slope {:.6}, expected alpha/2 - 1 = {:.6}, quotients {}",
            table.slope,
            table.expected_slope,
            if table.unbounded() { "unbounded" } else { "bounded" }
        );
        return Ok(());
    }
    let traj = evolve(&profile, args.t_end, &grid, &EvolveOptions::default())?;
    let mut csv = Csv::new(&["t", "w0", "ratio"]);
    for ((t, ratio), p) in self_similarity_ratio(&traj, f0, alpha).into_iter().zip(&traj.trace) {
        csv.row(&[num(t), num(p.w0), num(ratio)]);
    }
    csv.emit(cfg, args.out.as_deref())?;
    Ok(())
}

/// Parses arguments, runs the command and maps the outcome to an exit code:
/// 0 success, 1 failed verification, 2 usage or solver error.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = load_config(&cli).map_err(Failure::from).and_then(|cfg| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Failure::Usage(e.to_string()))?
            .install(|| match &cli.command {
                Command::Alpha(a) => cmd_alpha(&cfg, a),
                Command::Profile(a) => cmd_profile(&cfg, a),
                Command::Sweep(a) => cmd_sweep(&cfg, a),
                Command::Verify(a) => cmd_verify(&cfg, a),
                Command::Appell(a) => cmd_appell(&cfg, a),
                Command::Evolve(a) => cmd_evolve(&cfg, a),
            })
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let cfg = RunConfig::parse("# run\ndimension = 2\nrtol=1e-10 # tighter\n\nthreads = 3\noutput_dir = out\n").unwrap();
        assert_eq!(cfg.dimension, 2);
        assert_eq!(cfg.rtol, 1e-10);
        assert_eq!(cfg.threads, 3);
        assert_eq!(cfg.output_dir, Some(PathBuf::from("out")));
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn config_rejects_bad_input() {
        assert!(RunConfig::parse("nonsense").is_err());
        assert!(RunConfig::parse("colour = blue").is_err());
        assert!(RunConfig::parse("rtol = abc").is_err());
        let cfg = RunConfig::parse("matching_tol = 0").unwrap();
        assert!(cfg.validate().is_err());
        let cfg = RunConfig::parse("threads = 0").unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("0.5:4:8").unwrap(), (0.5, 4.0, 8));
        assert!(parse_range("4:0.5:8").is_err());
        assert!(parse_range("1:2").is_err());
    }

    #[test]
    fn companion_names() {
        assert_eq!(with_suffix(Path::new("d/curves.csv"), "heat_dots"), PathBuf::from("d/curves_heat_dots.csv"));
    }
}
