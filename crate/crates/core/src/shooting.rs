//! Shooting from the origin and from infinity.
//!
//! The shot from infinity works with `h(t) = t^α f(1/t)`. The point `t = 0` is
//! an irregular singular point of the transformed equation, so the shot starts
//! at a small `t0 > 0` from the (asymptotic, optimally truncated) algebraic
//! series `h = Σ c_k t^{2k}`.
//!
//! Zeros of an infinity shot are indexed in the order they are met from
//! infinity: `k = 1` is the outermost zero in `s`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ode::{DenseTrajectory, State};
use crate::profile_ode::{
    run_piece, series_start_origin, strict_sign, Branch, Event, InvertedTail, PieceSolution, ProblemParams,
    ProfilePiece, SelfSimilarProfile, Sign, SolverSettings, TailClass, TailKind,
};
use crate::roots;

/// Lowest homogeneity for which the shot from infinity is supported.
pub fn infinity_threshold(dimension: u32) -> f64 {
    match dimension {
        1 => 1.0,
        2 => 0.5,
        _ => 0.0,
    }
}

fn check_threshold(params: &ProblemParams) -> Result<()> {
    let threshold = infinity_threshold(params.dimension);
    if params.alpha <= threshold {
        return Err(Error::Unsupported {
            alpha: params.alpha,
            dimension: params.dimension,
            threshold,
        });
    }
    Ok(())
}

/// Result of marching through consecutive constant-sign pieces.
struct March {
    pieces: Vec<ProfilePiece>,
    zeros: Vec<f64>,
    slopes: Vec<f64>,
    last: Event,
}

/// Integrates piece after piece, restarting at each zero with state `(0, f')`
/// on the opposite branch (or the same one in fixed-branch mode).
fn march<F>(
    field: F,
    t0: f64,
    y0: State,
    branch0: Branch,
    t_end: f64,
    settings: &SolverSettings,
    guard: f64,
    max_zeros: usize,
) -> Result<March>
where
    F: Fn(Branch, f64, &State) -> State,
{
    let mut pieces = Vec::new();
    let mut zeros = Vec::new();
    let mut slopes = Vec::new();
    let mut branch = branch0;
    let mut entering = strict_sign(if y0[0] != 0.0 { y0[0] } else { y0[1] });
    if entering == 0.0 {
        return Err(Error::Tangency { at: t0, slope: 0.0 });
    }
    let (mut t, mut y) = (t0, y0);
    loop {
        let b = branch;
        let (traj, event) = run_piece(|s, st| field(b, s, st), t, y, t_end, entering, settings, guard)?;
        let end = traj.end().unwrap_or(t);
        let end_state = match event {
            Event::ZeroCrossing { slope, .. } => [0.0, slope],
            _ => traj.steps().last().map(|s| s.y1).unwrap_or(y),
        };
        pieces.push(ProfilePiece {
            interval: (t, end),
            branch,
            solution: PieceSolution::Direct(traj),
            end_state,
        });
        match event {
            Event::ZeroCrossing { at, slope } => {
                zeros.push(at);
                slopes.push(slope);
                if zeros.len() >= max_zeros || at >= t_end {
                    return Ok(March { pieces, zeros, slopes, last: event });
                }
                t = at;
                y = [0.0, slope];
                entering = -entering;
                if !settings.fixed_branch {
                    branch = branch.opposite();
                }
            }
            _ => return Ok(March { pieces, zeros, slopes, last: event }),
        }
    }
}

fn origin_field(params: ProblemParams) -> impl Fn(Branch, f64, &State) -> State {
    move |b, s, y| [y[1], crate::profile_ode::rhs(s, y[0], y[1], b, &params)]
}

/// Switching solution of `f(0) = ±1, f'(0) = 0`, up to `settings.max_zeros`
/// zeros or the horizon.
pub fn shoot_origin(params: &ProblemParams, settings: &SolverSettings) -> Result<SelfSimilarProfile> {
    shoot_origin_to(params, settings, settings.horizon(params.dimension))
}

pub fn shoot_origin_to(
    params: &ProblemParams,
    settings: &SolverSettings,
    horizon: f64,
) -> Result<SelfSimilarProfile> {
    settings.validate()?;
    let eps = settings.origin_offset;
    let (f, fp) = series_start_origin(params, eps)?;
    let m = march(
        origin_field(*params),
        eps,
        [f, fp],
        params.origin_sign.branch(),
        horizon,
        settings,
        settings.overflow_guard,
        settings.max_zeros,
    )?;
    let tail_lambda = m.pieces.last().map(|p| p.branch.lambda()).unwrap_or(1.0);
    let kind = match m.last {
        Event::Overflow(_) => TailKind::Exponential,
        _ => TailKind::Truncated,
    };
    Ok(SelfSimilarProfile {
        params: *params,
        pieces: m.pieces,
        zeros: m.zeros,
        zero_derivatives: m.slopes,
        tail: TailClass { kind, tail_lambda },
        origin_offset: eps,
    })
}

/// `h''` for `h(t) = t^α f(1/t)`.
pub fn rhs_infinity(t: f64, h: f64, hp: f64, branch: Branch, params: &ProblemParams) -> f64 {
    debug_assert!(t > 0.0, "inverted equation evaluated at t = {t}");
    let a = params.alpha;
    let n = params.n();
    ((2.0 * a + n - 3.0) * t * hp - 0.5 * branch.lambda() * hp / t - a * (a + n - 2.0) * h) / (t * t)
}

/// `h''(0) / h(0) = -2α(α+N-2)/λ`.
pub fn infinity_curvature(branch: Branch, params: &ProblemParams) -> f64 {
    -2.0 * params.alpha * (params.alpha + params.n() - 2.0) / branch.lambda()
}

/// Coefficients of the algebraic solution `h = Σ c_k t^{2k}` (`c_0 = ±1`),
/// truncated where the asymptotic series stops improving at `t0`.
pub fn infinity_series(params: &ProblemParams, sign: Sign, t0: f64) -> Vec<f64> {
    let a = params.alpha;
    let n = params.n();
    let lambda = sign.branch().lambda();
    let mut c = vec![sign.value()];
    let t2 = t0 * t0;
    let mut prev_term = c[0].abs();
    for k in 1..200 {
        let kf = k as f64;
        let ck = -c[k - 1] * (a - 2.0 * kf + 2.0) * (a + n - 2.0 * kf) / (lambda * kf);
        let term = (ck * t2.powi(k as i32)).abs();
        if kf > a / 2.0 + 1.0 && term > prev_term {
            break;
        }
        c.push(ck);
        if term < 1e-20 {
            break;
        }
        prev_term = term;
    }
    c
}

/// Where in `s` the algebraic series hands over to the integrator.
pub fn infinity_start(params: &ProblemParams, sign: Sign, settings: &SolverSettings) -> f64 {
    let lambda = sign.branch().lambda();
    let a = params.alpha;
    settings
        .horizon(params.dimension)
        .max(2.0 * (a * (a + params.n()) / lambda).sqrt())
}

/// Solution of the inverted problem started from `h(0) = ±1, h'(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfinityShot {
    pub params: ProblemParams,
    pub infinity_sign: Sign,
    pub t_start: f64,
    pub series: Vec<f64>,
    /// Pieces in the `t` variable.
    pub pieces: Vec<ProfilePiece>,
    pub t_zeros: Vec<f64>,
    pub t_zero_derivatives: Vec<f64>,
    /// `1/t_i`, ascending in `s`.
    pub mapped_zeros: Vec<f64>,
}

impl InfinityShot {
    /// The `k`-th zero met from infinity, mapped to `s`.
    pub fn zero(&self, k: usize) -> Option<f64> {
        (k >= 1).then(|| self.t_zeros.get(k - 1).map(|t| 1.0 / t)).flatten()
    }

    /// `(h, h')` at `t`.
    pub fn h(&self, t: f64) -> Option<State> {
        if t <= self.t_start {
            return Some(crate::profile_ode::eval_series_in_t(&self.series, t));
        }
        let idx = self.pieces.partition_point(|p| p.interval.1 < t);
        self.pieces.get(idx).and_then(|p| p.eval(t))
    }

    /// `f(s) = s^α h(1/s)` with the normalization `s^{-α} f → h(0)`.
    pub fn f(&self, s: f64) -> Option<State> {
        let t = 1.0 / s;
        let [h, hp] = self.h(t)?;
        let a = self.params.alpha;
        Some([t.powf(-a) * h, a * t.powf(1.0 - a) * h - t.powf(2.0 - a) * hp])
    }

    /// Outermost semi-profile as an evaluable tail, `f = scale · s^α h(1/s)`.
    pub fn tail(&self, scale: f64) -> Option<InvertedTail> {
        let first = self.pieces.first()?;
        let PieceSolution::Direct(traj) = &first.solution else {
            return None;
        };
        Some(InvertedTail {
            alpha: self.params.alpha,
            scale,
            series: self.series.clone(),
            trajectory: traj.clone(),
        })
    }
}

fn infinity_field(params: ProblemParams) -> impl Fn(Branch, f64, &State) -> State {
    move |b, t, y| [y[1], rhs_infinity(t, y[0], y[1], b, &params)]
}

pub fn shoot_infinity(
    params: &ProblemParams,
    infinity_sign: Sign,
    settings: &SolverSettings,
) -> Result<InfinityShot> {
    settings.validate()?;
    check_threshold(params)?;
    let s_start = infinity_start(params, infinity_sign, settings);
    let t0 = 1.0 / s_start;
    let series = infinity_series(params, infinity_sign, t0);
    let y0 = crate::profile_ode::eval_series_in_t(&series, t0);
    let t_end = settings.horizon(params.dimension);
    let m = march(
        infinity_field(*params),
        t0,
        y0,
        infinity_sign.branch(),
        t_end,
        settings,
        1e300,
        settings.max_zeros,
    )?;
    let mut mapped: Vec<f64> = m.zeros.iter().map(|t| 1.0 / t).collect();
    mapped.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(InfinityShot {
        params: *params,
        infinity_sign,
        t_start: t0,
        series,
        pieces: m.pieces,
        t_zeros: m.zeros,
        t_zero_derivatives: m.slopes,
        mapped_zeros: mapped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    FromOrigin,
    FromInfinity,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::FromOrigin => "origin",
            Side::FromInfinity => "infinity",
        })
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "origin" | "from-origin" => Ok(Side::FromOrigin),
            "infinity" | "from-infinity" => Ok(Side::FromInfinity),
            other => Err(Error::InvalidInput(format!("unknown side '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroMapSample {
    pub alpha: f64,
    pub sign: Sign,
    pub k: usize,
    pub value: f64,
    pub side: Side,
}

/// `s^{σ,k}_α` (origin) or `s̃^{σ,k}_α` (infinity, `k`-th zero met from infinity).
pub fn zero_map(
    alpha: f64,
    sign: Sign,
    k: usize,
    side: Side,
    dimension: u32,
    settings: &SolverSettings,
) -> Result<ZeroMapSample> {
    if k == 0 {
        return Err(Error::InvalidInput("zero index starts at 1".into()));
    }
    let params = ProblemParams::new(dimension, alpha, sign)?;
    let budget = SolverSettings { max_zeros: k, ..*settings };
    let value = match side {
        Side::FromOrigin => {
            let p = shoot_origin(&params, &budget)?;
            p.zeros.get(k - 1).copied().ok_or_else(|| Error::Absent {
                k,
                reason: format!("origin shot has {} zeros before the horizon", p.zeros.len()),
            })?
        }
        Side::FromInfinity => {
            let shot = shoot_infinity(&params, sign, &budget)?;
            shot.zero(k).ok_or_else(|| Error::Absent {
                k,
                reason: format!("infinity shot has {} zeros", shot.t_zeros.len()),
            })?
        }
    };
    Ok(ZeroMapSample { alpha, sign, k, value, side })
}

/// `s^{σ,k}_α - target` with `+∞` where the zero is missing (α too small on
/// the origin side) and `-∞` where it is missing from infinity.
fn zero_map_offset(alpha: f64, sign: Sign, k: usize, side: Side, n: u32, settings: &SolverSettings, target: f64) -> Result<f64> {
    match zero_map(alpha, sign, k, side, n, settings) {
        Ok(z) => Ok(z.value - target),
        Err(Error::Absent { .. }) | Err(Error::Unsupported { .. }) => Ok(match side {
            Side::FromOrigin => f64::INFINITY,
            Side::FromInfinity => f64::NEG_INFINITY,
        }),
        Err(e) => Err(e),
    }
}

/// Inverse of a zero map: the homogeneity `α` with `s^{σ,k}_α = s`
/// (or `s̃^{σ,k}_α = s`). The origin map decreases in `α`, the infinity map
/// increases, so a bracket is grown geometrically from `α = 2`.
pub fn inverse_zero_map(
    s: f64,
    sign: Sign,
    k: usize,
    side: Side,
    dimension: u32,
    settings: &SolverSettings,
    xtol: f64,
) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidInput(format!("zero location must be positive, got {s}")));
    }
    let g = |a: f64| zero_map_offset(a, sign, k, side, dimension, settings, s);
    let floor = match side {
        Side::FromOrigin => 1e-12,
        Side::FromInfinity => infinity_threshold(dimension) + 1e-9,
    };
    let increasing = side == Side::FromInfinity;
    let mut lo = 2.0f64.max(floor * 2.0);
    let mut hi = lo;
    let mut g_lo = g(lo)?;
    let mut g_hi = g_lo;
    // Below the root the offset is negative for the increasing map, positive
    // for the decreasing one.
    let below = |v: f64| if increasing { v < 0.0 } else { v > 0.0 };
    if below(g_lo) {
        while below(g_hi) {
            lo = hi;
            g_lo = g_hi;
            hi *= 1.5;
            if hi > 5000.0 {
                return Err(Error::BracketExhausted { lo, hi });
            }
            g_hi = g(hi)?;
        }
    } else {
        while !below(g_lo) && g_lo != 0.0 {
            hi = lo;
            g_hi = g_lo;
            lo /= 1.5;
            if lo < floor {
                lo = floor;
                g_lo = g(lo)?;
                if !below(g_lo) && g_lo != 0.0 {
                    return Err(Error::BracketExhausted { lo, hi });
                }
                break;
            }
            g_lo = g(lo)?;
        }
    }
    let mut err = None;
    let root = roots::brent(
        |a| match g(a) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                f64::NAN
            }
        },
        lo,
        hi,
        g_lo,
        g_hi,
        xtol,
        300,
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(root?.x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailVerdict {
    Algebraic,
    Exponential,
    /// The continuation changes sign again; not a tail.
    SignChange,
}

impl fmt::Display for TailVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TailVerdict::Algebraic => "algebraic",
            TailVerdict::Exponential => "exponential",
            TailVerdict::SignChange => "sign-change",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailDiagnosis {
    pub verdict: TailVerdict,
    /// `s̃^{σ,1}_α`.
    pub infinity_zero: f64,
    /// `s̃^{σ,1}_α - z`.
    pub mismatch: f64,
    pub tail_lambda: f64,
}

impl TailDiagnosis {
    pub fn tail_class(&self) -> Option<TailClass> {
        let kind = match self.verdict {
            TailVerdict::Algebraic => TailKind::Algebraic,
            TailVerdict::Exponential => TailKind::Exponential,
            TailVerdict::SignChange => return None,
        };
        Some(TailClass { kind, tail_lambda: self.tail_lambda })
    }
}

/// Decides what follows the zero `z` when the solution leaves it with sign
/// `outward`. Comparing `α` with `α̃^σ(z)` is equivalent to comparing
/// `s̃^{σ,1}_α` with `z`, since the infinity map increases in `α`.
pub fn classify_tail(
    z: f64,
    outward: Sign,
    params: &ProblemParams,
    settings: &SolverSettings,
    tol: f64,
) -> Result<TailDiagnosis> {
    if !(z > 0.0) {
        return Err(Error::InvalidInput(format!("zero must be positive, got {z}")));
    }
    check_threshold(params)?;
    let tail_lambda = outward.branch().lambda();
    let infinity_zero = match zero_map(params.alpha, outward, 1, Side::FromInfinity, params.dimension, settings) {
        Ok(sample) => sample.value,
        Err(Error::Absent { .. }) => 0.0,
        Err(e) => return Err(e),
    };
    let mismatch = infinity_zero - z;
    let verdict = if mismatch.abs() <= tol * z.max(1.0) {
        TailVerdict::Algebraic
    } else if mismatch < 0.0 {
        TailVerdict::Exponential
    } else {
        TailVerdict::SignChange
    };
    Ok(TailDiagnosis { verdict, infinity_zero, mismatch, tail_lambda })
}

/// Glues the first `k` origin pieces to the outermost infinity semi-profile,
/// scaled so that `f'` is continuous at the `k`-th zero.
pub fn assemble_matched_profile(
    params: &ProblemParams,
    k: usize,
    settings: &SolverSettings,
) -> Result<SelfSimilarProfile> {
    if k == 0 {
        return Err(Error::InvalidInput("matched profile needs at least one zero".into()));
    }
    let budget = SolverSettings { max_zeros: k, ..*settings };
    let origin = shoot_origin(params, &budget)?;
    if origin.zeros.len() < k {
        return Err(Error::Absent {
            k,
            reason: format!("origin shot has {} zeros", origin.zeros.len()),
        });
    }
    let tail_sign = params.origin_sign.after_changes(k);
    let shot = shoot_infinity(params, tail_sign, &SolverSettings { max_zeros: 1, ..*settings })?;
    let unit = shot.tail(1.0).ok_or_else(|| Error::Absent { k: 1, reason: "empty infinity shot".into() })?;
    if shot.zero(1).is_none() {
        return Err(Error::Absent { k: 1, reason: "infinity shot has no zero".into() });
    }
    let z = origin.zeros[k - 1];
    let slope = origin.zero_derivatives[k - 1];
    let [_, tail_slope] = unit
        .eval(z)
        .ok_or_else(|| Error::NonConvergence(format!("tail not evaluable at matched zero {z}")))?;
    let scale = slope / tail_slope;
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvariantViolation(format!(
            "matched slopes have opposite signs at s = {z} ({slope} vs {tail_slope})"
        )));
    }
    let tail = InvertedTail { scale, ..unit };
    let mut pieces: Vec<ProfilePiece> = origin.pieces.into_iter().take(k).collect();
    let branch = if settings.fixed_branch { params.origin_sign.branch() } else { tail_sign.branch() };
    let far = tail.eval(2.0 * z.max(1.0)).unwrap_or([f64::NAN; 2]);
    pieces.push(ProfilePiece {
        interval: (z, f64::INFINITY),
        branch,
        solution: PieceSolution::Inverted(tail),
        end_state: far,
    });
    Ok(SelfSimilarProfile {
        params: *params,
        pieces,
        zeros: origin.zeros[..k].to_vec(),
        zero_derivatives: origin.zero_derivatives[..k].to_vec(),
        tail: TailClass { kind: TailKind::Algebraic, tail_lambda: branch.lambda() },
        origin_offset: origin.origin_offset,
    })
}

/// Maps a profile given in `s` to `h(t) = t^α f(1/t)` on a sample of `t`.
pub fn to_inverted(profile: &SelfSimilarProfile, t: f64) -> Option<State> {
    let s = 1.0 / t;
    let [f, fp] = profile.eval(s)?;
    let a = profile.params.alpha;
    // h' = α t^{α-1} f(1/t) - t^{α-2} f'(1/t)
    Some([t.powf(a) * f, a * t.powf(a - 1.0) * f - t.powf(a - 2.0) * fp])
}

/// Dense `t`-trajectory of an infinity shot's first piece, if any.
pub fn first_trajectory(shot: &InfinityShot) -> Option<&DenseTrajectory> {
    match &shot.pieces.first()?.solution {
        PieceSolution::Direct(t) => Some(t),
        PieceSolution::Inverted(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> SolverSettings {
        SolverSettings::default()
    }

    #[test]
    fn origin_parabola_anchors() {
        for n in 1..=3u32 {
            let nf = n as f64;
            let p = shoot_origin(&ProblemParams::new(n, 2.0, Sign::Plus).unwrap(), &settings()).unwrap();
            assert!((p.zeros[0] - (2.0 * nf).sqrt()).abs() < 1e-9, "{:?}", p.zeros);
            let m = shoot_origin(&ProblemParams::new(n, 2.0, Sign::Minus).unwrap(), &settings()).unwrap();
            assert!((m.zeros[0] - nf.sqrt()).abs() < 1e-9, "{:?}", m.zeros);
        }
    }

    #[test]
    fn infinity_parabola_anchors() {
        for n in 1..=3u32 {
            let nf = n as f64;
            let p = ProblemParams::new(n, 2.0, Sign::Plus).unwrap();
            let plus = shoot_infinity(&p, Sign::Plus, &settings()).unwrap();
            assert!((plus.zero(1).unwrap() - (2.0 * nf).sqrt()).abs() < 1e-9);
            let minus = shoot_infinity(&p, Sign::Minus, &settings()).unwrap();
            assert!((minus.zero(1).unwrap() - nf.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn infinity_curvature_limits() {
        let p = ProblemParams::new(1, 3.0, Sign::Plus).unwrap();
        assert_eq!(infinity_curvature(Branch::PositiveRegion, &p), -2.0 * 3.0 * 2.0);
        assert_eq!(infinity_curvature(Branch::NegativeRegion, &p), -3.0 * 2.0);
        // Series second coefficient reproduces h''(0)/2.
        for sign in [Sign::Plus, Sign::Minus] {
            let c = infinity_series(&p, sign, 0.05);
            let expected = infinity_curvature(sign.branch(), &p) * sign.value() / 2.0;
            assert!((c[1] - expected).abs() < 1e-12);
        }
        assert_eq!(rhs_infinity(0.3, 0.0, 0.0, Branch::PositiveRegion, &p), 0.0);
    }

    #[test]
    fn below_threshold_is_unsupported() {
        let p = ProblemParams::new(1, 0.8, Sign::Plus).unwrap();
        assert!(matches!(shoot_infinity(&p, Sign::Plus, &settings()), Err(Error::Unsupported { .. })));
        let p = ProblemParams::new(3, 0.2, Sign::Plus).unwrap();
        assert!(shoot_infinity(&p, Sign::Plus, &settings()).is_ok());
    }

    #[test]
    fn tail_at_parabola_is_exponential() {
        let p = ProblemParams::new(1, 2.0, Sign::Plus).unwrap();
        let d = classify_tail(2f64.sqrt(), Sign::Minus, &p, &settings(), 1e-7).unwrap();
        assert_eq!(d.verdict, TailVerdict::Exponential);
        assert!((d.infinity_zero - 1.0).abs() < 1e-9);
    }

    #[test]
    fn inverse_maps_hit_anchors() {
        let s = settings();
        let a = inverse_zero_map(2f64.sqrt(), Sign::Plus, 1, Side::FromOrigin, 1, &s, 1e-11).unwrap();
        assert!((a - 2.0).abs() < 1e-8);
        let a = inverse_zero_map(1.3, Sign::Minus, 1, Side::FromInfinity, 1, &s, 1e-11).unwrap();
        let back = zero_map(a, Sign::Minus, 1, Side::FromInfinity, 1, &s).unwrap();
        assert!((back.value - 1.3).abs() < 1e-8);
    }
}
