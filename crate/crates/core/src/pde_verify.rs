//! Radial finite-difference evolution of `β(w)_t = Δw` started from a
//! self-similar profile at `t = -1`.
//!
//! The update works on the enthalpy `v = β(w)`: `v += Δt Δ_h w`, then
//! `w = β⁻¹(v)`. Away from the zero set this is `w_t = γ(w) Δw` with
//! `γ = 1` where `w > 0` and `γ = 1/2` where `w < 0`.

use crate::error::{Error, Result};
use crate::profile_ode::SelfSimilarProfile;
use crate::report::{Check, Report};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    pub spacing: f64,
    pub radius: f64,
    pub dimension: u32,
}

impl RadialGrid {
    pub fn new(spacing: f64, radius: f64, dimension: u32) -> Result<Self> {
        if !(spacing > 0.0 && radius > 0.0 && radius / spacing >= 4.0) || dimension == 0 {
            return Err(Error::InvalidInput(format!(
                "grid h = {spacing}, R = {radius}, N = {dimension}"
            )));
        }
        Ok(Self { spacing, radius, dimension })
    }

    /// Radius covering `3·max(zero)` of the profile, never below 4.
    pub fn for_profile(spacing: f64, profile: &SelfSimilarProfile) -> Result<Self> {
        let zmax = profile.zeros.iter().copied().fold(0.0, f64::max);
        Self::new(spacing, (3.0 * zmax).max(4.0), profile.params.dimension)
    }

    /// Number of nodes including `r = 0` and `r = R`.
    pub fn len(&self) -> usize {
        (self.radius / self.spacing).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.spacing
    }

    /// Largest stable explicit step, `h²/(2N)`.
    pub fn max_dt(&self) -> f64 {
        self.spacing * self.spacing / (2.0 * self.dimension as f64)
    }
}

/// Discrete radial Laplacian. The last node is the Dirichlet boundary and gets 0.
pub fn radial_laplacian(w: &[f64], grid: &RadialGrid) -> Vec<f64> {
    let mut out = vec![0.0; w.len()];
    laplacian_into(w, grid, &mut out);
    out
}

fn laplacian_into(w: &[f64], grid: &RadialGrid, out: &mut [f64]) {
    let m = w.len();
    if m < 2 {
        return;
    }
    let h2 = grid.spacing * grid.spacing;
    let nm1 = grid.dimension as f64 - 1.0;
    out[0] = 2.0 * grid.dimension as f64 * (w[1] - w[0]) / h2;
    for j in 1..m - 1 {
        let c = nm1 / (2.0 * j as f64);
        out[j] = ((1.0 + c) * w[j + 1] - 2.0 * w[j] + (1.0 - c) * w[j - 1]) / h2;
    }
    out[m - 1] = 0.0;
}

fn beta(w: f64) -> f64 {
    if w > 0.0 { w } else { 2.0 * w }
}

fn beta_inv(v: f64) -> f64 {
    if v > 0.0 { v } else { 0.5 * v }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionState {
    pub t: f64,
    pub w: Vec<f64>,
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub t: f64,
    pub w0: f64,
    /// Sign changes of the nodal values, ignoring values below `1e-12·max|w|`.
    pub sign_changes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: RadialGrid,
    pub trace: Vec<TracePoint>,
    pub last: EvolutionState,
    pub steps: usize,
}

impl Trajectory {
    /// Trace value recorded at exactly `t`, if any.
    pub fn at(&self, t: f64) -> Option<f64> {
        self.trace
            .iter()
            .find(|p| (p.t - t).abs() <= 1e-12 * t.abs().max(1.0))
            .map(|p| p.w0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    /// Fraction of `h²/(2N)` used as the step.
    pub cfl: f64,
    /// Times landed on exactly and recorded, besides start and end.
    pub record_times: Vec<f64>,
    /// Evenly spaced extra records over the run.
    pub samples: usize,
    pub growth_limit: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { cfl: 0.9, record_times: Vec::new(), samples: 200, growth_limit: 10.0 }
    }
}

fn sign_changes(w: &[f64]) -> usize {
    let scale = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-12 * scale;
    let mut last = 0.0;
    let mut count = 0;
    for &v in w {
        if v.abs() <= floor {
            continue;
        }
        if last != 0.0 && v.signum() != last {
            count += 1;
        }
        last = v.signum();
    }
    count
}

/// Explicit evolution from `t0` to `t_end` with Dirichlet data `boundary(t)` at `r = R`.
pub fn evolve_with<I, B>(
    initial: I,
    boundary: B,
    grid: &RadialGrid,
    t0: f64,
    t_end: f64,
    opts: &EvolveOptions,
) -> Result<Trajectory>
where
    I: Fn(f64) -> f64,
    B: Fn(f64) -> f64,
{
    if !(t_end > t0) || !(opts.cfl > 0.0 && opts.cfl <= 1.0) {
        return Err(Error::InvalidInput(format!("t0 = {t0}, t_end = {t_end}, cfl = {}", opts.cfl)));
    }
    let m = grid.len();
    let mut w: Vec<f64> = (0..m).map(|j| initial(grid.node(j))).collect();
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("initial data not finite".into()));
    }
    let mut v: Vec<f64> = w.iter().map(|&x| beta(x)).collect();
    let mut lap = vec![0.0; m];
    let limit = opts.growth_limit * w.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);

    let mut stops: Vec<f64> = opts.record_times.iter().copied().filter(|&s| s > t0 && s < t_end).collect();
    let span = t_end - t0;
    stops.extend((1..opts.samples).map(|i| t0 + span * i as f64 / opts.samples as f64));
    stops.push(t_end);
    stops.sort_by(|a, b| a.partial_cmp(b).unwrap());
    stops.dedup_by(|a, b| (*a - *b).abs() < 1e-14);

    let dt_max = opts.cfl * grid.max_dt();
    let mut t = t0;
    let mut steps = 0;
    let mut trace = vec![TracePoint { t, w0: w[0], sign_changes: sign_changes(&w) }];
    for &stop in &stops {
        while t < stop {
            let remaining = stop - t;
            let dt = if remaining <= dt_max * (1.0 + 1e-9) { remaining } else { dt_max };
            laplacian_into(&w, grid, &mut lap);
            for j in 0..m - 1 {
                v[j] += dt * lap[j];
                w[j] = beta_inv(v[j]);
            }
            t = if dt == remaining { stop } else { t + dt };
            w[m - 1] = boundary(t);
            v[m - 1] = beta(w[m - 1]);
            steps += 1;
            if !w[m - 1].is_finite() {
                return Err(Error::InvalidInput(format!("boundary value not finite at t = {t}")));
            }
            if steps % 64 == 0 || t == stop {
                let peak = w.iter().fold(0.0f64, |a, x| a.max(x.abs()));
                if !(peak <= limit) {
                    return Err(Error::Unstable { at: t });
                }
            }
        }
        trace.push(TracePoint { t, w0: w[0], sign_changes: sign_changes(&w) });
    }
    Ok(Trajectory { grid: *grid, trace, last: EvolutionState { t, w, dt: dt_max }, steps })
}

/// Evolution of `w(r,-1) = f(r)` with the self-similar boundary value
/// `(-t)^{α/2} f(R/√(-t))`.
pub fn evolve(profile: &SelfSimilarProfile, t_end: f64, grid: &RadialGrid, opts: &EvolveOptions) -> Result<Trajectory> {
    if !(t_end > -1.0 && t_end < 0.0) {
        return Err(Error::InvalidInput(format!("t_end = {t_end} outside (-1, 0)")));
    }
    if profile.end() < grid.radius / (-t_end).sqrt() {
        return Err(Error::InvalidInput(format!(
            "profile known up to s = {}, boundary needs s = {}",
            profile.end(),
            grid.radius / (-t_end).sqrt()
        )));
    }
    let alpha = profile.params.alpha;
    let radius = grid.radius;
    let f = |s: f64| profile.eval(s).map(|y| y[0]).unwrap_or(f64::NAN);
    evolve_with(f, |t| (-t).powf(0.5 * alpha) * f(radius / (-t).sqrt()), grid, -1.0, t_end, opts)
}

/// `w(0,t) / (f(0)(-t)^{α/2})` along the trace.
pub fn self_similarity_ratio(traj: &Trajectory, f0: f64, alpha: f64) -> Vec<(f64, f64)> {
    traj.trace.iter().map(|p| (p.t, p.w0 / (f0 * (-p.t).powf(0.5 * alpha)))).collect()
}

/// `τ = 2^{-m}`, `m = 1..=10`.
pub fn lipschitz_times() -> Vec<f64> {
    (1..=10).map(|m| -(0.5f64).powi(m)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzRow {
    pub m: u32,
    pub tau: f64,
    pub w0: f64,
    /// `|w(0,-τ) - w(0,0⁻)| / τ` with `w(0,0⁻) = 0`.
    pub quotient: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzTable {
    pub alpha: f64,
    pub rows: Vec<LipschitzRow>,
    /// Least-squares slope of `ln quotient` against `ln τ`.
    pub slope: f64,
    pub expected_slope: f64,
}

impl LipschitzTable {
    pub fn unbounded(&self) -> bool {
        self.slope < 0.0
    }

    pub fn max_quotient(&self) -> f64 {
        self.rows.iter().fold(0.0, |a, r| a.max(r.quotient))
    }
}

/// Difference quotients of the center trace at `t = -2^{-m}`.
/// The trajectory must have been recorded at [`lipschitz_times`].
pub fn lipschitz_demo(traj: &Trajectory, alpha: f64) -> Result<LipschitzTable> {
    let mut rows = Vec::with_capacity(10);
    for (i, t) in lipschitz_times().into_iter().enumerate() {
        let w0 = traj
            .at(t)
            .ok_or_else(|| Error::InvalidInput(format!("trajectory has no record at t = {t}")))?;
        let tau = -t;
        rows.push(LipschitzRow { m: i as u32 + 1, tau, w0, quotient: w0.abs() / tau });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.tau.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.quotient.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(LipschitzTable { alpha, rows, slope: sxy / sxx, expected_slope: 0.5 * alpha - 1.0 })
}

/// Sup error of the center value against `exact(0,t)` for the caloric case
/// `w = t + r²/(2N) + 2` on `[-1, -1/2]`.
pub fn polynomial_calibration(dimension: u32, spacing: f64) -> Result<f64> {
    let n = dimension as f64;
    let grid = RadialGrid::new(spacing, 4.0, dimension)?;
    let exact = move |r: f64, t: f64| t + r * r / (2.0 * n) + 2.0;
    let radius = grid.radius;
    let traj = evolve_with(|r| exact(r, -1.0), |t| exact(radius, t), &grid, -1.0, -0.5, &EvolveOptions::default())?;
    Ok(traj.trace.iter().fold(0.0, |a, p| a.max((p.w0 - exact(0.0, p.t)).abs())))
}

/// Same for the Gaussian `(t+2)^{-N/2} e^{-r²/(4(t+2))}`, whose discretization
/// error is not identically zero.
pub fn gaussian_calibration(dimension: u32, spacing: f64) -> Result<f64> {
    let n = dimension as f64;
    let grid = RadialGrid::new(spacing, 4.0, dimension)?;
    let exact = move |r: f64, t: f64| (t + 2.0).powf(-0.5 * n) * (-r * r / (4.0 * (t + 2.0))).exp();
    let radius = grid.radius;
    let traj = evolve_with(|r| exact(r, -1.0), |t| exact(radius, t), &grid, -1.0, -0.5, &EvolveOptions::default())?;
    Ok(traj.trace.iter().fold(0.0, |a, p| a.max((p.w0 - exact(0.0, p.t)).abs())))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdeTolerances {
    pub spacing: f64,
    pub ratio_band: f64,
    pub ratio_window_end: f64,
    pub slope_relative: f64,
    /// Exponent offset of the comparison envelopes.
    pub envelope_offset: f64,
    /// Perturbation of α for the negative control.
    pub control_offset: f64,
}

impl Default for PdeTolerances {
    fn default() -> Self {
        Self {
            spacing: 1.0 / 400.0,
            ratio_band: 0.02,
            ratio_window_end: -0.05,
            slope_relative: 0.05,
            envelope_offset: 0.05,
            control_offset: 0.1,
        }
    }
}

/// Calibration: polynomial exactness and the ×4 error reduction under `h → h/2`.
pub fn calibration_report(dimension: u32) -> Result<Report> {
    let mut report = Report::new(format!("pde calibration N={dimension}"));
    let poly = polynomial_calibration(dimension, 1.0 / 100.0)?;
    report.push(Check::at_most("t + r^2/(2N) + 2 transported", poly, 1e-11));
    let (e1, e2) = rayon::join(|| gaussian_calibration(dimension, 1.0 / 50.0), || gaussian_calibration(dimension, 1.0 / 100.0));
    let (e1, e2) = (e1?, e2?);
    report.push(
        Check::close("gaussian error ratio h -> h/2", e1 / e2, 4.0, 0.4)
            .with_note(format!("errors {e1:.3e}, {e2:.3e}")),
    );
    Ok(report)
}

/// Self-similar decay of the center value for an eigen-profile.
pub fn self_similarity_report(profile: &SelfSimilarProfile, k: usize, tol: &PdeTolerances) -> Result<(Report, Trajectory)> {
    let alpha = profile.params.alpha;
    let grid = RadialGrid::for_profile(tol.spacing, profile)?;
    let opts = EvolveOptions { record_times: lipschitz_times(), ..EvolveOptions::default() };
    let traj = evolve(profile, lipschitz_times()[9], &grid, &opts)?;
    let f0 = profile.params.origin_sign.value();
    let ratios = self_similarity_ratio(&traj, f0, alpha);
    let window: Vec<_> = ratios.iter().filter(|(t, _)| *t <= tol.ratio_window_end + 1e-14).collect();
    let worst = window.iter().fold(0.0f64, |a, (_, q)| a.max((q - 1.0).abs()));
    let mut report = Report::new(format!(
        "pde self-similarity N={} sigma={} k={k} alpha={alpha:.10}",
        profile.params.dimension, profile.params.origin_sign
    ));
    report.push(
        Check::at_most(format!("center ratio on [-1, {}]", tol.ratio_window_end), worst, tol.ratio_band)
            .with_note(format!("h = {:.3e}, R = {}, {} steps", grid.spacing, grid.radius, traj.steps)),
    );
    let bad = traj.trace.iter().filter(|p| p.sign_changes != k).count();
    report.push(Check::flag(
        "sign changes of w(., t) stay k",
        bad == 0,
        format!("{bad} of {} records differ", traj.trace.len()),
    ));
    let d = tol.envelope_offset;
    let inside = traj.trace.iter().filter(|p| p.t <= tol.ratio_window_end + 1e-14).all(|p| {
        let tau = -p.t;
        let lo = tau.powf(0.5 * (alpha + d)) * (1.0 - tol.ratio_band);
        let hi = tau.powf(0.5 * (alpha - d)) * (1.0 + tol.ratio_band);
        let x = p.w0.abs();
        x >= lo && x <= hi
    });
    report.push(Check::flag(
        format!("center value between alpha -/+ {d} envelopes"),
        inside,
        String::new(),
    ));
    Ok((report, traj))
}

/// Non-eigen initial data `f_{α+δ}` with its leading-order algebraic boundary
/// value `f(R)` held fixed. Returns the center ratios against `(-t)^{(α+δ)/2}`.
pub fn negative_control(profile: &SelfSimilarProfile, tol: &PdeTolerances) -> Result<Vec<(f64, f64)>> {
    let alpha = profile.params.alpha;
    let grid = RadialGrid::new(tol.spacing, 4.0, profile.params.dimension)?;
    let fr = profile.eval(grid.radius).map(|y| y[0]).unwrap_or(f64::NAN);
    let f = |s: f64| profile.eval(s).map(|y| y[0]).unwrap_or(f64::NAN);
    let traj = evolve_with(f, |_| fr, &grid, -1.0, tol.ratio_window_end, &EvolveOptions::default())?;
    Ok(self_similarity_ratio(&traj, profile.params.origin_sign.value(), alpha))
}

/// Direction-consistent drift: once `|ratio - 1|` exceeds `floor` it keeps
/// one sign and does not shrink.
pub fn drifts_monotonically(ratios: &[(f64, f64)], floor: f64) -> bool {
    let d: Vec<f64> = ratios.iter().map(|(_, q)| q - 1.0).filter(|x| x.abs() > floor).collect();
    let Some(&last) = d.last() else { return false };
    let s = last.signum();
    d.iter().all(|x| x.signum() == s) && d.windows(2).all(|w| w[1].abs() >= w[0].abs())
}

pub fn lipschitz_report(minus: &LipschitzTable, plus: &LipschitzTable, tol: &PdeTolerances) -> Report {
    let mut report = Report::new("pde difference quotients");
    report.push(Check::close(
        format!("slope for alpha = {:.10}", minus.alpha),
        minus.slope,
        minus.expected_slope,
        tol.slope_relative * minus.expected_slope.abs(),
    ));
    report.push(Check::flag(
        "quotients unbounded as tau -> 0",
        minus.unbounded(),
        format!("largest quotient {:.6e}", minus.max_quotient()),
    ));
    let first = plus.rows.first().map(|r| r.quotient).unwrap_or(f64::NAN);
    report.push(
        Check::at_most(format!("quotients bounded for alpha = {:.10}", plus.alpha), plus.max_quotient(), first * (1.0 + 1e-6))
            .with_note(format!("slope {:.6}, expected {:.6}", plus.slope, plus.expected_slope)),
    );
    report
}

/// Full PDE oracle for one dimension: calibration, self-similar decay of the
/// `α⁻₁` and `α⁺₁` profiles, difference quotients and the perturbed-α control.
pub fn pde_suite(minus: &SelfSimilarProfile, plus: &SelfSimilarProfile, control: &SelfSimilarProfile, tol: &PdeTolerances) -> Result<Report> {
    let dimension = minus.params.dimension;
    let mut report = Report::new(format!("pde oracle N={dimension}"));
    let ((cal, m), (p, ctl)) = rayon::join(
        || rayon::join(|| calibration_report(dimension), || self_similarity_report(minus, 1, tol)),
        || rayon::join(|| self_similarity_report(plus, 1, tol), || negative_control(control, tol)),
    );
    let (m_report, m_traj) = m?;
    let (p_report, p_traj) = p?;
    report.extend(cal?);
    report.extend(m_report);
    report.extend(p_report);
    let lm = lipschitz_demo(&m_traj, minus.params.alpha)?;
    let lp = lipschitz_demo(&p_traj, plus.params.alpha)?;
    report.extend(lipschitz_report(&lm, &lp, tol));
    let ctl = ctl?;
    let last = ctl.last().map(|(_, q)| *q).unwrap_or(f64::NAN);
    report.push(Check::at_least(
        format!("control alpha = {:.6} leaves the ratio band", control.params.alpha),
        (last - 1.0).abs(),
        tol.ratio_band,
    ));
    report.push(Check::flag("control drift is monotone", drifts_monotonically(&ctl, 1e-6), format!("final ratio {last:.6}")));
    Ok(report)
}
