//! The self-similar profile equation
//!
//! ```text
//! f'' + ((N-1)/s - λ s/2) f' + (λ α/2) f = 0,     λ = 1 where f > 0, λ = 2 where f < 0,
//! ```
//!
//! integrated outward from the regular singular point `s = 0` with a Frobenius
//! start, dense output, and exact restarts at sign changes.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ode::{Control, DenseTrajectory, Dopri5, State, Step, Tolerances};
use crate::roots;

/// Linear regime of the switching nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `f > 0`: λ = 1, γ = 1.
    PositiveRegion,
    /// `f < 0`: λ = 2, γ = 1/2.
    NegativeRegion,
}

impl Branch {
    pub fn lambda(self) -> f64 {
        match self {
            Branch::PositiveRegion => 1.0,
            Branch::NegativeRegion => 2.0,
        }
    }

    pub fn gamma(self) -> f64 {
        1.0 / self.lambda()
    }

    pub fn opposite(self) -> Self {
        match self {
            Branch::PositiveRegion => Branch::NegativeRegion,
            Branch::NegativeRegion => Branch::PositiveRegion,
        }
    }

    /// `+1` or `-1`.
    pub fn sign(self) -> f64 {
        match self {
            Branch::PositiveRegion => 1.0,
            Branch::NegativeRegion => -1.0,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::PositiveRegion => "positive",
            Branch::NegativeRegion => "negative",
        })
    }
}

/// Maps a nonzero value to the branch governing it.
pub fn branch_of(value: f64) -> Result<Branch> {
    if value > 0.0 {
        Ok(Branch::PositiveRegion)
    } else if value < 0.0 {
        Ok(Branch::NegativeRegion)
    } else {
        Err(Error::InvalidInput(
            "branch of an exact zero is decided by the crossing direction".into(),
        ))
    }
}

/// Sign of the profile at the origin (or at infinity, for the inverted shot).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn branch(self) -> Branch {
        match self {
            Sign::Plus => Branch::PositiveRegion,
            Sign::Minus => Branch::NegativeRegion,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// Sign after `k` sign changes.
    pub fn after_changes(self, k: usize) -> Self {
        if k % 2 == 0 {
            self
        } else {
            self.flip()
        }
    }

    pub fn of(value: f64) -> Self {
        if value < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        })
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plus" | "+" | "+1" | "1" => Ok(Sign::Plus),
            "minus" | "-" | "-1" => Ok(Sign::Minus),
            other => Err(Error::InvalidInput(format!("unknown sign '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    pub dimension: u32,
    pub alpha: f64,
    pub origin_sign: Sign,
}

impl ProblemParams {
    pub fn new(dimension: u32, alpha: f64, origin_sign: Sign) -> Result<Self> {
        if dimension < 1 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
        }
        Ok(Self { dimension, alpha, origin_sign })
    }

    pub fn n(&self) -> f64 {
        self.dimension as f64
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self { alpha, ..*self }
    }
}

/// Numerical knobs shared by the shooting procedures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub tolerances: Tolerances,
    /// Zero crossings are polished until `|f| < event_tol`.
    pub event_tol: f64,
    /// `|f|` beyond this ends a piece as [`Event::Overflow`].
    pub overflow_guard: f64,
    /// Minimal `|f'|` accepted at a located zero.
    pub derivative_floor: f64,
    /// Where the origin series hands over to the integrator.
    pub origin_offset: f64,
    /// Horizon is `horizon_scale * max(1, sqrt(N))`.
    pub horizon_scale: f64,
    pub max_zeros: usize,
    /// Keep the starting branch through zeros (heat-polynomial calibration).
    pub fixed_branch: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            event_tol: 1e-13,
            overflow_guard: 1e12,
            derivative_floor: 1e-9,
            origin_offset: 1e-6,
            horizon_scale: 12.0,
            max_zeros: 8,
            fixed_branch: false,
        }
    }
}

impl SolverSettings {
    pub fn horizon(&self, dimension: u32) -> f64 {
        self.horizon_scale * (dimension as f64).sqrt().max(1.0)
    }

    pub fn fixed(mut self) -> Self {
        self.fixed_branch = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        let positive = [
            ("rtol", t.rtol),
            ("atol", t.atol),
            ("event_tol", self.event_tol),
            ("overflow_guard", self.overflow_guard),
            ("derivative_floor", self.derivative_floor),
            ("origin_offset", self.origin_offset),
            ("horizon_scale", self.horizon_scale),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_zeros == 0 || t.max_steps == 0 {
            return Err(Error::InvalidInput("zero budget and step budget must be >= 1".into()));
        }
        Ok(())
    }
}

/// `f''` from the profile equation on the given branch.
pub fn rhs(s: f64, f: f64, fp: f64, branch: Branch, params: &ProblemParams) -> f64 {
    debug_assert!(s > 0.0, "profile equation evaluated at s = {s}");
    let lambda = branch.lambda();
    -((params.n() - 1.0) / s - 0.5 * lambda * s) * fp - 0.5 * lambda * params.alpha * f
}

/// Coefficients `a_j` of the regular solution `Σ a_j s^{2j}` with `a_0 = 1`.
///
/// `a_{j+1} = -a_j λ (α - 2j) / (2 (2j+2)(2j+N))`; terminates when α is an even
/// integer (radial heat polynomials).
pub fn origin_series_coefficients(alpha: f64, dimension: u32, lambda: f64, terms: usize) -> Vec<f64> {
    let n = dimension as f64;
    let mut coeffs = Vec::with_capacity(terms);
    let mut a = 1.0;
    for j in 0..terms {
        coeffs.push(a);
        let jf = j as f64;
        a = -a * lambda * (alpha - 2.0 * jf) / (2.0 * (2.0 * jf + 2.0) * (2.0 * jf + n));
    }
    coeffs
}

fn eval_even_series(coeffs: &[f64], s: f64) -> (f64, f64) {
    let s2 = s * s;
    let mut f = 0.0;
    let mut fp = 0.0;
    let mut pow = 1.0;
    for (j, c) in coeffs.iter().enumerate() {
        f += c * pow;
        if j > 0 {
            fp += 2.0 * j as f64 * c * pow / s;
        }
        pow *= s2;
    }
    (f, fp)
}

/// `(f(ε), f'(ε))` from the three-term expansion `f(0)(1 + a s² + b s⁴)`.
pub fn series_start_origin(params: &ProblemParams, epsilon: f64) -> Result<(f64, f64)> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("series offset must be positive, got {epsilon}")));
    }
    let lambda = params.origin_sign.branch().lambda();
    let c = origin_series_coefficients(params.alpha, params.dimension, lambda, 3);
    let (f, fp) = eval_even_series(&c, epsilon);
    let f0 = params.origin_sign.value();
    Ok((f0 * f, f0 * fp))
}

/// What ended a piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Event {
    ZeroCrossing { at: f64, slope: f64 },
    HorizonReached(f64),
    Overflow(f64),
}

/// Tail semi-profile `f(s) = scale · s^α · h(1/s)` built from a shot from
/// infinity. Beyond the start of the `t`-trajectory the algebraic series
/// `h(t) = Σ c_k t^{2k}` is used directly.
#[derive(Debug, Clone, PartialEq)]
pub struct InvertedTail {
    pub alpha: f64,
    pub scale: f64,
    pub series: Vec<f64>,
    pub trajectory: DenseTrajectory,
}

impl InvertedTail {
    /// `(h, h')` at `t`.
    pub fn h(&self, t: f64) -> Option<State> {
        let t_start = self.trajectory.start()?;
        if t <= t_start {
            return Some(eval_series_in_t(&self.series, t));
        }
        // The matched zero can sit a hair beyond the shot's own zero; extend
        // the last dense polynomial over that gap.
        let end = self.trajectory.end()?;
        if t > end && t - end < 1e-6 * end.max(1.0) {
            return self.trajectory.steps().last().map(|s| s.eval(t));
        }
        self.trajectory.eval(t)
    }

    pub fn eval(&self, s: f64) -> Option<State> {
        if !(s > 0.0) {
            return None;
        }
        let t = 1.0 / s;
        let [h, hp] = self.h(t)?;
        let a = self.alpha;
        let f = self.scale * t.powf(-a) * h;
        let fp = self.scale * (a * t.powf(1.0 - a) * h - t.powf(2.0 - a) * hp);
        Some([f, fp])
    }

    /// `s^{-α} f(s)`, which tends to `scale · h(0)` at infinity.
    pub fn normalized(&self, s: f64) -> Option<f64> {
        let [h, _] = self.h(1.0 / s)?;
        Some(self.scale * h)
    }
}

pub(crate) fn eval_series_in_t(coeffs: &[f64], t: f64) -> State {
    let t2 = t * t;
    let mut h = 0.0;
    let mut hp = 0.0;
    let mut pow = 1.0; // t^{2k}
    for (k, c) in coeffs.iter().enumerate() {
        h += c * pow;
        if k > 0 {
            hp += 2.0 * k as f64 * c * pow / t;
        }
        pow *= t2;
    }
    [h, hp]
}

#[derive(Debug, Clone, PartialEq)]
pub enum PieceSolution {
    Direct(DenseTrajectory),
    Inverted(InvertedTail),
}

/// Constant-sign stretch of a profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePiece {
    /// `(a, b)`; `b` is `+∞` for an algebraic tail.
    pub interval: (f64, f64),
    pub branch: Branch,
    pub solution: PieceSolution,
    pub end_state: State,
}

impl ProfilePiece {
    pub fn eval(&self, s: f64) -> Option<State> {
        match &self.solution {
            PieceSolution::Direct(traj) => traj.eval(s),
            PieceSolution::Inverted(tail) => tail.eval(s),
        }
    }

    /// Sign of `f` on the open interval.
    pub fn sign(&self) -> f64 {
        let (a, b) = self.interval;
        let mid = if b.is_finite() { 0.5 * (a + b) } else { a + 1.0 };
        self.eval(mid).map(|y| y[0].signum()).unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailKind {
    /// `s^{-α} f(s)` has a finite nonzero limit.
    Algebraic,
    Exponential,
    /// Stopped at the horizon or the zero budget.
    Truncated,
}

impl fmt::Display for TailKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TailKind::Algebraic => "algebraic",
            TailKind::Exponential => "exponential",
            TailKind::Truncated => "truncated",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailClass {
    pub kind: TailKind,
    /// λ on the last piece.
    pub tail_lambda: f64,
}

/// Piecewise C^{1,1} solution starting from `f(0) = ±1, f'(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimilarProfile {
    pub params: ProblemParams,
    pub pieces: Vec<ProfilePiece>,
    pub zeros: Vec<f64>,
    pub zero_derivatives: Vec<f64>,
    pub tail: TailClass,
    /// Below this the origin series is evaluated instead of the pieces.
    pub origin_offset: f64,
}

impl SelfSimilarProfile {
    pub fn eval(&self, s: f64) -> Option<State> {
        if s < 0.0 {
            return None;
        }
        if s < self.origin_offset {
            let lambda = self.params.origin_sign.branch().lambda();
            let c = origin_series_coefficients(self.params.alpha, self.params.dimension, lambda, 4);
            let (f, fp) = eval_even_series(&c, s);
            let f0 = self.params.origin_sign.value();
            return Some([f0 * f, if s == 0.0 { 0.0 } else { f0 * fp }]);
        }
        let idx = self.pieces.partition_point(|p| p.interval.1 < s);
        self.pieces.get(idx).and_then(|p| p.eval(s))
    }

    /// Right end of the computed range (`+∞` with an algebraic tail piece).
    pub fn end(&self) -> f64 {
        self.pieces.last().map(|p| p.interval.1).unwrap_or(self.origin_offset)
    }

    pub fn sign_changes(&self) -> usize {
        self.zeros.len()
    }

    /// Index of the piece containing `s`.
    pub fn piece_index(&self, s: f64) -> usize {
        self.pieces
            .partition_point(|p| p.interval.1 < s)
            .min(self.pieces.len().saturating_sub(1))
    }

    /// Uniform samples on `[0, s_max]` plus the exact zeros, sorted.
    pub fn sample(&self, s_max: f64, points: usize) -> Vec<(f64, State)> {
        let mut grid: Vec<f64> = (0..points.max(2))
            .map(|i| s_max * i as f64 / (points.max(2) - 1) as f64)
            .collect();
        grid.extend(self.zeros.iter().copied().filter(|z| *z <= s_max));
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        grid.dedup();
        grid.into_iter()
            .filter_map(|s| self.eval(s).map(|y| (s, y)))
            .collect()
    }
}

/// `±1`, or `0` for a zero (unlike `f64::signum`).
pub(crate) fn strict_sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Integrates one constant-sign stretch of a scalar second-order equation in
/// its first-order form, stopping at the next sign change, the horizon, or
/// the overflow guard. `entering_sign` is the sign the solution takes just
/// after `t0` (needed when the piece starts on a zero).
pub(crate) fn run_piece<F>(
    rhs: F,
    t0: f64,
    y0: State,
    t_end: f64,
    entering_sign: f64,
    settings: &SolverSettings,
    overflow_guard: f64,
) -> Result<(DenseTrajectory, Event)>
where
    F: Fn(f64, &State) -> State,
{
    let solver = Dopri5::new(settings.tolerances);
    let mut crossed = false;
    let mut overflow = false;
    let out = solver.integrate(&rhs, t0, y0, t_end, |step: &Step| {
        if entering_sign * step.y1[0] <= 0.0 {
            crossed = true;
            Control::Stop
        } else if step.y1[0].abs() > overflow_guard {
            overflow = true;
            Control::Stop
        } else {
            Control::Continue
        }
    })?;
    let mut traj = out.trajectory;

    if crossed {
        let step = traj.steps().last().expect("stopped on a step").clone();
        let (at, state) = locate_zero(&rhs, &step, entering_sign, &solver, settings)?;
        if state[1].abs() < settings.derivative_floor {
            return Err(Error::Tangency { at, slope: state[1].abs() });
        }
        let k1 = rhs(step.t0, &step.y0);
        let (mut short, _, _) = solver.single_step(&rhs, step.t0, step.y0, k1, at - step.t0);
        short.y1 = [0.0, state[1]];
        traj.replace_last(short);
        return Ok((traj, Event::ZeroCrossing { at, slope: state[1] }));
    }
    let end = traj.end().unwrap_or(t0);
    if overflow {
        Ok((traj, Event::Overflow(end)))
    } else {
        Ok((traj, Event::HorizonReached(end)))
    }
}

/// Finds the crossing inside `step` on the dense output, then polishes it with
/// exact single steps from the step start and Newton corrections.
fn locate_zero<F>(
    rhs: &F,
    step: &Step,
    entering_sign: f64,
    solver: &Dopri5,
    settings: &SolverSettings,
) -> Result<(f64, State)>
where
    F: Fn(f64, &State) -> State,
{
    let g = |t: f64| step.eval(t)[0];
    let mut lo = step.t0;
    let mut g_lo = step.y0[0];
    if entering_sign * g_lo <= 0.0 {
        // Step starts on the previous zero: find an interior point of the right sign.
        let mut theta = 0.5;
        loop {
            let t = step.t0 + theta * step.h;
            if entering_sign * g(t) > 0.0 {
                lo = t;
                g_lo = g(t);
                break;
            }
            theta *= 0.5;
            if theta < 1e-12 {
                return Err(Error::NonConvergence("could not bracket zero crossing".into()));
            }
        }
    }
    let hi = step.t1();
    let g_hi = step.y1[0];
    let xtol = 1e-15 * hi.abs().max(1e-3);
    let mut at = roots::brent(g, lo, hi, g_lo, g_hi, xtol, 200)?.x;

    let k1 = rhs(step.t0, &step.y0);
    let mut state = step.eval(at);
    for _ in 0..6 {
        let h = at - step.t0;
        state = if h > 0.0 {
            solver.single_step(rhs, step.t0, step.y0, k1, h).0.y1
        } else {
            step.y0
        };
        if state[0].abs() < settings.event_tol || state[1] == 0.0 {
            break;
        }
        let next = at - state[0] / state[1];
        if !(next > step.t0 && next <= hi + 1e-3 * step.h) {
            break;
        }
        at = next;
    }
    Ok((at, state))
}

/// Integrates from `start = (s0, f0, f0')` on `branch` until the next zero or
/// the horizon.
pub fn integrate_piece(
    start: (f64, f64, f64),
    branch: Branch,
    params: &ProblemParams,
    settings: &SolverSettings,
    horizon: f64,
) -> Result<(ProfilePiece, Event)> {
    let (s0, f0, fp0) = start;
    if !(s0 > 0.0) {
        return Err(Error::InvalidInput(format!("piece must start at s > 0, got {s0}")));
    }
    let entering = strict_sign(if f0 != 0.0 { f0 } else { fp0 });
    if entering == 0.0 {
        return Err(Error::Tangency { at: s0, slope: 0.0 });
    }
    if !settings.fixed_branch && entering != branch.sign() {
        return Err(Error::InvalidInput(format!(
            "start state sign {entering} incompatible with {branch} branch"
        )));
    }
    let p = *params;
    let field = move |s: f64, y: &State| [y[1], rhs(s, y[0], y[1], branch, &p)];
    let (traj, event) = run_piece(
        field,
        s0,
        [f0, fp0],
        horizon,
        entering,
        settings,
        settings.overflow_guard,
    )?;
    let end = traj.end().unwrap_or(s0);
    let end_state = match event {
        Event::ZeroCrossing { slope, .. } => [0.0, slope],
        _ => traj.steps().last().map(|s| s.y1).unwrap_or([f0, fp0]),
    };
    let piece = ProfilePiece {
        interval: (s0, end),
        branch,
        solution: PieceSolution::Direct(traj),
        end_state,
    };
    Ok((piece, event))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u32, alpha: f64, sign: Sign) -> ProblemParams {
        ProblemParams::new(n, alpha, sign).unwrap()
    }

    #[test]
    fn branch_map() {
        assert_eq!(branch_of(1.0).unwrap(), Branch::PositiveRegion);
        assert_eq!(branch_of(1.0).unwrap().lambda(), 1.0);
        assert_eq!(branch_of(-1.0).unwrap(), Branch::NegativeRegion);
        assert_eq!(branch_of(-1.0).unwrap().lambda(), 2.0);
        assert_eq!(Branch::NegativeRegion.gamma(), 0.5);
        assert!(branch_of(0.0).is_err());
    }

    #[test]
    fn rhs_on_parabolas() {
        // p+(s) = 1 - s²/2 for N = 1, α = 2.
        let p = params(1, 2.0, Sign::Plus);
        assert!((rhs(1.0, 0.5, -1.0, Branch::PositiveRegion, &p) + 1.0).abs() < 1e-15);
        // p-(s) = s² - 1.
        assert!((rhs(1.0, 0.0, 2.0, Branch::NegativeRegion, &p) - 2.0).abs() < 1e-15);
        assert_eq!(rhs(0.7, 0.0, 0.0, Branch::NegativeRegion, &p), 0.0);
    }

    #[test]
    fn series_coefficients() {
        let plus = params(1, 2.0, Sign::Plus);
        let (f, _) = series_start_origin(&plus, 1e-3).unwrap();
        assert!((f - (1.0 - 0.5e-6)).abs() < 1e-16);
        let minus = params(1, 2.0, Sign::Minus);
        let (f, fp) = series_start_origin(&minus, 1e-3).unwrap();
        assert!((f - (-1.0 + 1e-6)).abs() < 1e-16);
        assert!((fp - 2e-3).abs() < 1e-16);
        // b = λ a (2 - α) / (8N + 16)
        for (alpha, n, lambda) in [(3.0, 2u32, 1.0), (1.5, 3, 2.0), (2.0, 1, 1.0)] {
            let c = origin_series_coefficients(alpha, n, lambda, 3);
            let a = -lambda * alpha / (4.0 * n as f64);
            let b = lambda * a * (2.0 - alpha) / (8.0 * n as f64 + 16.0);
            assert!((c[1] - a).abs() < 1e-15);
            assert!((c[2] - b).abs() < 1e-15);
        }
        assert!(series_start_origin(&plus, 0.0).is_err());
    }

    #[test]
    fn series_residual_is_small() {
        // Substituting the truncated series leaves an O(s^4) residual.
        let p = params(3, 2.7, Sign::Plus);
        let c = origin_series_coefficients(p.alpha, p.dimension, 1.0, 3);
        let s: f64 = 1e-2;
        let f = c[0] + c[1] * s * s + c[2] * s.powi(4);
        let fp = 2.0 * c[1] * s + 4.0 * c[2] * s.powi(3);
        let fpp = 2.0 * c[1] + 12.0 * c[2] * s * s;
        let res = fpp - rhs(s, f, fp, Branch::PositiveRegion, &p);
        assert!(res.abs() < 1e-6, "{res}");
    }

    #[test]
    fn parabola_first_zero() {
        let s = SolverSettings::default();
        let p = params(1, 2.0, Sign::Plus);
        let eps = s.origin_offset;
        let (f, fp) = series_start_origin(&p, eps).unwrap();
        let (piece, ev) = integrate_piece((eps, f, fp), Branch::PositiveRegion, &p, &s, 12.0).unwrap();
        match ev {
            Event::ZeroCrossing { at, slope } => {
                assert!((at - 2f64.sqrt()).abs() < 1e-10, "{at}");
                assert!((slope + 2f64.sqrt()).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
        for i in 1..100 {
            let x = eps + (2f64.sqrt() - eps) * i as f64 / 100.0;
            let y = piece.eval(x).unwrap();
            assert!((y[0] - (1.0 - x * x / 2.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn incompatible_start_rejected() {
        let s = SolverSettings::default();
        let p = params(1, 2.0, Sign::Plus);
        assert!(integrate_piece((0.5, 1.0, 0.0), Branch::NegativeRegion, &p, &s, 5.0).is_err());
        assert!(integrate_piece((0.0, 1.0, 0.0), Branch::PositiveRegion, &p, &s, 5.0).is_err());
        assert!(matches!(
            integrate_piece((0.5, 0.0, 0.0), Branch::PositiveRegion, &p, &s, 5.0),
            Err(Error::Tangency { .. })
        ));
    }

    #[test]
    fn settings_validation() {
        assert!(SolverSettings::default().validate().is_ok());
        let mut s = SolverSettings::default();
        s.tolerances.rtol = 0.0;
        assert!(s.validate().is_err());
    }
}
