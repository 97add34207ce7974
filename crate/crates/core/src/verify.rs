//! Verification suites. Each function checks one group of properties for a
//! single dimension and returns a [`Report`]; the CLI `verify` command and
//! the acceptance tests both go through here.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::appell::{appell_transform, decay_control, nonsign_check, pl_check, verify_pair, AppellTolerances};
use crate::error::{Error, Result};
use crate::exponents::{exponent_table, ExponentTable, SolveOptions};
use crate::heat_polynomial;
use crate::pde_verify::{pde_suite, PdeTolerances};
use crate::profile_ode::{ProblemParams, SelfSimilarProfile, Sign, SolverSettings};
use crate::report::{Check, Report};
use crate::shooting::{assemble_matched_profile, shoot_origin, zero_map, Side};
use crate::spectral::{discrete_min_eigenvalue, verify_minimal_eigenvalue, EigenOptions, MeasureKind, SpectralTolerances};

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub dimension: u32,
    pub max_k: usize,
    pub settings: SolverSettings,
    pub solve: SolveOptions,
    pub spectral: SpectralTolerances,
    pub appell: AppellTolerances,
    pub pde: PdeTolerances,
}

impl VerifyConfig {
    pub fn new(dimension: u32) -> Self {
        Self {
            dimension,
            max_k: 3,
            settings: SolverSettings::default(),
            solve: SolveOptions::default(),
            spectral: SpectralTolerances::default(),
            appell: AppellTolerances::default(),
            pde: PdeTolerances::default(),
        }
    }

    pub fn table(&self) -> Result<ExponentTable> {
        exponent_table(self.max_k, self.dimension, &self.settings, &self.solve)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Ode,
    Spectral,
    Appell,
    Pde,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::All => "all",
            Suite::Ode => "ode",
            Suite::Spectral => "spectral",
            Suite::Appell => "appell",
            Suite::Pde => "pde",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "ode" => Ok(Suite::Ode),
            "spectral" => Ok(Suite::Spectral),
            "appell" => Ok(Suite::Appell),
            "pde" => Ok(Suite::Pde),
            other => Err(Error::InvalidInput(format!("unknown suite '{other}'"))),
        }
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Parabola anchors at `α = 2`: `s^{+,1} = s̃^{+,1} = √(2N)`, `s^{-,1} = s̃^{-,1} = √N`.
pub fn calibration_identities(cfg: &VerifyConfig) -> Result<Report> {
    let n = cfg.dimension;
    let mut report = Report::new(format!("parabola anchors N={n}"));
    for (sign, exact) in [(Sign::Plus, (2.0 * n as f64).sqrt()), (Sign::Minus, (n as f64).sqrt())] {
        for side in [Side::FromOrigin, Side::FromInfinity] {
            let start = Instant::now();
            let z = zero_map(2.0, sign, 1, side, n, &cfg.settings)?.value;
            let secs = start.elapsed().as_secs_f64();
            report.push(Check::at_most(format!("s^({sign},1)_2 from {side}: relative error"), relative(z, exact), 1e-8)
                .with_note(format!("{z:.15} vs {exact:.15}")));
            report.push(Check::at_most(format!("s^({sign},1)_2 from {side}: seconds"), secs, 1.0));
        }
    }
    Ok(report)
}

/// Fixed-branch origin shots at `α = 4, 6` against the closed-form heat-polynomial roots.
pub fn heat_polynomial_dots(cfg: &VerifyConfig) -> Result<Report> {
    let n = cfg.dimension;
    let mut report = Report::new(format!("heat polynomial zeros N={n}"));
    let settings = cfg.settings.fixed();
    for m in [2usize, 3] {
        let alpha = 2.0 * m as f64;
        for sign in [Sign::Plus, Sign::Minus] {
            let lambda = sign.branch().lambda();
            let exact = heat_polynomial::zeros(m, n, lambda)?;
            let prof = shoot_origin(&ProblemParams::new(n, alpha, sign)?, &SolverSettings { max_zeros: m, ..settings })?;
            for (j, e) in exact.iter().enumerate() {
                match prof.zeros.get(j) {
                    Some(z) => report.push(Check::close(format!("alpha={alpha} sign={sign} zero {}", j + 1), *z, *e, 1e-6)),
                    None => report.push(Check::flag(format!("alpha={alpha} sign={sign} zero {}", j + 1), false, "missing")),
                }
            }
        }
    }
    Ok(report)
}

/// `α⁻₁ ∈ (0, 2)` and `α⁺₁ > 2` with margin `1e-3`.
pub fn first_exponents(table: &ExponentTable) -> Result<Report> {
    let mut report = Report::new(format!("first exponents N={}", table.dimension));
    let am = table.alpha(Sign::Minus, 1).ok_or_else(|| Error::InvalidInput("alpha^-_1 missing".into()))?;
    let ap = table.alpha(Sign::Plus, 1).ok_or_else(|| Error::InvalidInput("alpha^+_1 missing".into()))?;
    report.push(Check::at_least("alpha^-_1 - 0", am, 1e-3));
    report.push(Check::at_least("2 - alpha^-_1", 2.0 - am, 1e-3));
    report.push(Check::at_least("alpha^+_1 - 2", ap - 2.0, 1e-3));
    Ok(report)
}

/// Strict increase in `k` and interlacing `α⁻_k < α⁺_{k+1} < α⁻_{k+2}`, each with margin `1e-6`.
pub fn ordering(table: &ExponentTable) -> Result<Report> {
    const MARGIN: f64 = 1e-6;
    let mut report = Report::new(format!("exponent ordering N={}", table.dimension));
    let big_k = table.max_k();
    let a = |s, k| table.alpha(s, k).unwrap_or(f64::NAN);
    for sign in [Sign::Plus, Sign::Minus] {
        for k in 2..=big_k {
            report.push(Check::at_least(format!("alpha^{sign}_{k} - alpha^{sign}_{}", k - 1), a(sign, k) - a(sign, k - 1), MARGIN));
        }
    }
    for k in 1..big_k {
        report.push(Check::at_least(format!("alpha^+_{} - alpha^-_{k}", k + 1), a(Sign::Plus, k + 1) - a(Sign::Minus, k), MARGIN));
        if k + 2 <= big_k {
            report.push(Check::at_least(
                format!("alpha^-_{} - alpha^+_{}", k + 2, k + 1),
                a(Sign::Minus, k + 2) - a(Sign::Plus, k + 1),
                MARGIN,
            ));
        }
    }
    Ok(report)
}

/// At every computed exponent the zeros from both shots coincide.
pub fn zero_identity(table: &ExponentTable) -> Result<Report> {
    let mut report = Report::new(format!("zeros from origin and infinity coincide N={}", table.dimension));
    for r in &table.records {
        report.push(Check::at_most(format!("alpha^{}_{} = {:.10}", r.sign, r.k, r.alpha), r.ident_check, 1e-6));
    }
    Ok(report)
}

fn alpha_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect()
}

/// `s^{-,1}_α = s^{+,1}_α/√2` from both sides on 20 homogeneities.
pub fn duality(cfg: &VerifyConfig) -> Result<Report> {
    let n = cfg.dimension;
    let mut report = Report::new(format!("sqrt(2) scaling of the first zero N={n}"));
    let grid = alpha_grid(1.25, 8.0, 20);
    let rows: Vec<Result<(f64, Side, f64, f64)>> = grid
        .par_iter()
        .flat_map_iter(|&a| [Side::FromOrigin, Side::FromInfinity].map(move |side| (a, side)))
        .map(|(a, side)| {
            let p = zero_map(a, Sign::Plus, 1, side, n, &cfg.settings)?.value;
            let m = zero_map(a, Sign::Minus, 1, side, n, &cfg.settings)?.value;
            Ok((a, side, p, m))
        })
        .collect();
    for row in rows {
        let (a, side, p, m) = row?;
        report.push(Check::close(format!("alpha={a:.4} {side}"), m, p / 2f64.sqrt(), 1e-8));
    }
    Ok(report)
}

/// Zero maps on 20-point grids: decreasing in `α` from the origin, increasing
/// from infinity. Each grid starts at the first `α` (step 0.05) where the
/// `k`-th zero exists and ends at 9.5.
pub fn monotonicity(cfg: &VerifyConfig) -> Result<Report> {
    let n = cfg.dimension;
    let mut report = Report::new(format!("zero map monotonicity N={n}"));
    let floor = crate::shooting::infinity_threshold(n).max(0.0) + 0.05;
    let cases: Vec<(Sign, usize, Side)> = [Sign::Plus, Sign::Minus]
        .into_iter()
        .flat_map(|s| (1..=cfg.max_k).flat_map(move |k| [Side::FromOrigin, Side::FromInfinity].map(move |side| (s, k, side))))
        .collect();
    let defined = |a: f64, sign, k, side| match zero_map(a, sign, k, side, n, &cfg.settings) {
        Ok(z) => Ok(Some(z.value)),
        Err(Error::Absent { .. }) | Err(Error::Unsupported { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    let results: Vec<Result<(Sign, usize, Side, f64, Vec<Option<f64>>)>> = cases
        .par_iter()
        .map(|&(sign, k, side)| {
            let mut lo = floor;
            while defined(lo, sign, k, side)?.is_none() {
                lo += 0.05;
                if lo > 9.0 {
                    return Err(Error::Absent { k, reason: format!("no {side} zero below alpha = 9") });
                }
            }
            let values = alpha_grid(lo, 9.5, 20)
                .into_iter()
                .map(|a| defined(a, sign, k, side))
                .collect::<Result<Vec<_>>>()?;
            Ok((sign, k, side, lo, values))
        })
        .collect();
    for r in results {
        let (sign, k, side, lo, v) = r?;
        let all: Option<Vec<f64>> = v.into_iter().collect();
        let ok = all.as_ref().is_some_and(|v| {
            v.windows(2).all(|w| if side == Side::FromOrigin { w[1] < w[0] } else { w[1] > w[0] })
        });
        report.push(Check::flag(
            format!("s^({sign},{k}) from {side}"),
            ok,
            format!("alpha in [{lo:.2}, 9.5], {} of 20 samples defined", all.map_or(0, |v| v.len())),
        ));
    }
    Ok(report)
}

/// Eigen-profiles for every record of the table, in table order.
pub fn matched_profiles(table: &ExponentTable, settings: &SolverSettings) -> Result<Vec<SelfSimilarProfile>> {
    table
        .records
        .par_iter()
        .map(|r| assemble_matched_profile(&ProblemParams::new(table.dimension, r.alpha, r.sign)?, r.k, settings))
        .collect()
}

/// Observed order of the discrete eigenvalue error between `10³` and `10⁴` cells.
pub fn spectral_order(interval: (f64, f64), kind: MeasureKind, dimension: u32, exact_alpha: f64) -> Result<(f64, f64, f64)> {
    let coarse = discrete_min_eigenvalue(interval, kind, dimension, &EigenOptions { grid_points: 1_000, ..Default::default() })?;
    let fine = discrete_min_eigenvalue(interval, kind, dimension, &EigenOptions { grid_points: 10_000, ..Default::default() })?;
    let (e1, e2) = ((coarse.recovered_alpha - exact_alpha).abs(), (fine.recovered_alpha - exact_alpha).abs());
    Ok((e1, e2, (e1 / e2).log10()))
}

/// Rayleigh identities and discrete eigenvalues on all eigen-profiles, plus
/// the observed convergence order on the first piece of each `α^±_1`.
pub fn spectral_oracle(table: &ExponentTable, profiles: &[SelfSimilarProfile], cfg: &VerifyConfig) -> Result<Report> {
    let mut report = Report::new(format!("spectral oracle N={}", table.dimension));
    let parts: Vec<Result<Report>> = profiles
        .par_iter()
        .zip(&table.records)
        .map(|(p, r)| verify_minimal_eigenvalue(p, r.alpha, &cfg.settings, &cfg.spectral).map(|mut rep| {
            for c in &mut rep.checks {
                c.name = format!("alpha^{}_{}: {}", r.sign, r.k, c.name);
            }
            rep
        }))
        .collect();
    for p in parts {
        report.extend(p?);
    }
    for (p, r) in profiles.iter().zip(&table.records).filter(|(_, r)| r.k == 1) {
        let kind = MeasureKind::for_branch(r.sign.branch());
        let (e1, e2, order) = spectral_order((0.0, p.zeros[0]), kind, table.dimension, r.alpha)?;
        report.push(Check::close(format!("alpha^{}_1: observed order", r.sign), order, 2.0, 0.2)
            .with_note(format!("errors {e1:.3e} -> {e2:.3e}")));
    }
    Ok(report)
}

/// Appell structure on all eigen-profiles, a divergent non-eigen control and
/// the positivity comparison on ten exponents in `[-N, 0)`.
pub fn appell_oracle(table: &ExponentTable, profiles: &[SelfSimilarProfile], cfg: &VerifyConfig) -> Result<Report> {
    let n = table.dimension;
    let mut report = Report::new(format!("appell oracle N={n}"));
    let parts: Vec<Result<Report>> = profiles
        .par_iter()
        .zip(&table.records)
        .map(|(p, r)| verify_pair(&appell_transform(p), &cfg.appell).map(|mut rep| {
            for c in &mut rep.checks {
                c.name = format!("alpha^{}_{}: {}", r.sign, r.k, c.name);
            }
            rep
        }))
        .collect();
    for p in parts {
        report.extend(p?);
    }
    let am = table.alpha(Sign::Minus, 1).unwrap_or(f64::NAN);
    let ap2 = table.alpha(Sign::Plus, 2).unwrap_or(am + 2.0);
    let control = shoot_origin(&ProblemParams::new(n, 0.5 * (am + ap2), Sign::Minus)?, &cfg.settings)?;
    report.extend(decay_control(&control, cfg.appell.decay)?);
    for j in 0..10 {
        let beta = -(n as f64) * (1.0 - j as f64 / 10.0);
        report.extend(nonsign_check(beta, n, 12.0)?);
    }
    report.extend(pl_check(n, 6.0, 10, 0x5eed));
    Ok(report)
}

/// Finite-difference evolution of the `α^±_1` profiles.
pub fn pde_oracle(table: &ExponentTable, cfg: &VerifyConfig) -> Result<Report> {
    let n = table.dimension;
    let start = Instant::now();
    let am = table.alpha(Sign::Minus, 1).ok_or_else(|| Error::InvalidInput("alpha^-_1 missing".into()))?;
    let ap = table.alpha(Sign::Plus, 1).ok_or_else(|| Error::InvalidInput("alpha^+_1 missing".into()))?;
    let minus = assemble_matched_profile(&ProblemParams::new(n, am, Sign::Minus)?, 1, &cfg.settings)?;
    let plus = assemble_matched_profile(&ProblemParams::new(n, ap, Sign::Plus)?, 1, &cfg.settings)?;
    let control = shoot_origin(&ProblemParams::new(n, am + cfg.pde.control_offset, Sign::Minus)?, &cfg.settings)?;
    let mut report = pde_suite(&minus, &plus, &control, &cfg.pde)?;
    report.push(Check::at_most("pde oracle seconds", start.elapsed().as_secs_f64(), 120.0));
    Ok(report)
}

/// Everything in `suite` for one dimension.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<Report>> {
    let mut out = Vec::new();
    let table = cfg.table()?;
    let want = |s: Suite| suite == Suite::All || suite == s;
    if want(Suite::Ode) {
        out.push(calibration_identities(cfg)?);
        out.push(heat_polynomial_dots(cfg)?);
        out.push(first_exponents(&table)?);
        out.push(ordering(&table)?);
        out.push(zero_identity(&table)?);
        out.push(duality(cfg)?);
        out.push(monotonicity(cfg)?);
    }
    if want(Suite::Spectral) || want(Suite::Appell) {
        let profiles = matched_profiles(&table, &cfg.settings)?;
        if want(Suite::Spectral) {
            out.push(spectral_oracle(&table, &profiles, cfg)?);
        }
        if want(Suite::Appell) {
            out.push(appell_oracle(&table, &profiles, cfg)?);
        }
    }
    if want(Suite::Pde) {
        out.push(pde_oracle(&table, cfg)?);
    }
    Ok(out)
}
