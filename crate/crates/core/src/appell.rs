//! Modified Appell transform: an α-homogeneous profile `f` becomes the
//! `-(N+α)`-homogeneous dual `g = ψ f` with the piecewise Gaussian
//!
//! ```text
//! ψ(r) = exp(-∫_0^r λ(f(s)) s/2 ds) = C_i exp(-λ_i r²/4)   on the i-th piece.
//! ```

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ode::{Control, Dopri5, State, Tolerances};
use crate::profile_ode::{SelfSimilarProfile, TailKind};
use crate::quadrature::composite_gl8;
use crate::report::{Check, Report};

/// `ψ` in closed form: segment `i` covers `[zeros[i-1], zeros[i]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Psi {
    pub zeros: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub constants: Vec<f64>,
}

impl Psi {
    fn segment(&self, r: f64) -> usize {
        self.zeros.partition_point(|z| *z < r)
    }

    /// `(ψ, ψ')` at `r` from the closed form of segment `i`.
    fn eval_on(&self, i: usize, r: f64) -> State {
        let (c, l) = (self.constants[i], self.lambdas[i]);
        let v = c * (-0.25 * l * r * r).exp();
        [v, -0.5 * l * r * v]
    }

    pub fn eval(&self, r: f64) -> State {
        self.eval_on(self.segment(r), r)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r)[0]
    }

    /// One-sided derivatives at the `i`-th zero (0-based).
    pub fn derivative_jump(&self, i: usize) -> (f64, f64) {
        let z = self.zeros[i];
        (self.eval_on(i, z)[1], self.eval_on(i + 1, z)[1])
    }

    pub fn last_constant(&self) -> f64 {
        *self.constants.last().unwrap()
    }

    pub fn last_lambda(&self) -> f64 {
        *self.lambdas.last().unwrap()
    }
}

pub fn build_psi(profile: &SelfSimilarProfile) -> Psi {
    let lambdas: Vec<f64> = profile.pieces.iter().map(|p| p.branch.lambda()).collect();
    let zeros: Vec<f64> = profile.zeros.iter().copied().take(lambdas.len().saturating_sub(1)).collect();
    let mut constants = vec![1.0];
    for (i, z) in zeros.iter().enumerate() {
        let next = constants[i] * ((lambdas[i + 1] - lambdas[i]) * z * z / 4.0).exp();
        constants.push(next);
    }
    Psi { zeros, lambdas, constants }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppellPair {
    pub source: SelfSimilarProfile,
    pub psi: Psi,
    pub beta: f64,
    /// λ on the last piece.
    pub ell: f64,
}

impl AppellPair {
    /// `(g, g')`.
    pub fn g(&self, r: f64) -> Option<State> {
        let [f, fp] = self.source.eval(r)?;
        let [p, pp] = self.psi.eval(r);
        Some([p * f, pp * f + p * fp])
    }

    pub fn f(&self, r: f64) -> Option<State> {
        self.source.eval(r)
    }

    pub fn alpha(&self) -> f64 {
        self.source.params.alpha
    }

    pub fn dimension(&self) -> u32 {
        self.source.params.dimension
    }

    /// λ governing `r`.
    pub fn lambda_at(&self, r: f64) -> f64 {
        self.psi.lambdas[self.psi.segment(r)]
    }
}

pub fn appell_transform(profile: &SelfSimilarProfile) -> AppellPair {
    let psi = build_psi(profile);
    let ell = psi.last_lambda();
    AppellPair {
        source: profile.clone(),
        psi,
        beta: -(profile.params.n() + profile.params.alpha),
        ell,
    }
}

/// `g''` from the dual equation `g'' + ((N-1)/r + λr/2) g' + λ(N+α)/2 g = 0`.
pub fn dual_rhs(r: f64, g: f64, gp: f64, lambda: f64, dimension: u32, alpha: f64) -> f64 {
    let n = dimension as f64;
    -((n - 1.0) / r + 0.5 * lambda * r) * gp - 0.5 * lambda * (n + alpha) * g
}

/// Dual-equation residual at `r`, with `g''` from a fourth-order central
/// difference of `g'`. `None` when the stencil crosses a zero of `f`.
pub fn dual_residual(pair: &AppellPair, r: f64, delta: f64) -> Option<f64> {
    if pair.source.zeros.iter().any(|z| (z - r).abs() < 2.5 * delta) || r <= 2.0 * delta {
        return None;
    }
    let gp = |x: f64| pair.g(x).map(|y| y[1]);
    let gpp = (-gp(r + 2.0 * delta)? + 8.0 * gp(r + delta)? - 8.0 * gp(r - delta)? + gp(r - 2.0 * delta)?)
        / (12.0 * delta);
    let [g, g1] = pair.g(r)?;
    Some(gpp - dual_rhs(r, g, g1, pair.lambda_at(r), pair.dimension(), pair.alpha()))
}

/// `f = g/ψ` on sampled dual data.
pub fn inverse_appell(psi: &Psi, samples: &[(f64, f64)]) -> Vec<(f64, f64)> {
    samples.iter().map(|&(r, g)| (r, g / psi.value(r))).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayEstimate {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Richardson limit from the last three points (`r^{-2}` error model).
    pub limit: f64,
    pub last_relative_increment: f64,
    pub converged: bool,
}

/// Limit of `q(r)` along `radii`, declared convergent when the relative
/// increments shrink and the last one is below `tol`.
pub fn decay_limit<Q>(q: Q, radii: &[f64], tol: f64) -> Result<DecayEstimate>
where
    Q: Fn(f64) -> Option<f64>,
{
    if radii.len() < 3 {
        return Err(Error::InvalidInput("need at least three tail radii".into()));
    }
    let mut values = Vec::with_capacity(radii.len());
    for &r in radii {
        match q(r) {
            Some(v) if v.is_finite() => values.push(v),
            _ => break,
        }
    }
    let used = &radii[..values.len()];
    if values.len() < 3 {
        return Ok(DecayEstimate {
            radii: used.to_vec(),
            limit: f64::NAN,
            values,
            last_relative_increment: f64::INFINITY,
            converged: false,
        });
    }
    let incs: Vec<f64> = values.windows(2).map(|w| ((w[1] - w[0]) / w[1]).abs()).collect();
    let n = values.len();
    let ratio = (used[n - 1] / used[n - 2]).powi(2);
    let limit = (ratio * values[n - 1] - values[n - 2]) / (ratio - 1.0);
    let last = *incs.last().unwrap();
    let shrinking = incs.windows(2).rev().take(2).all(|w| w[1] <= w[0] || w[1] < 1e-12);
    Ok(DecayEstimate {
        radii: used.to_vec(),
        values,
        limit,
        last_relative_increment: last,
        converged: shrinking && last < tol && limit != 0.0,
    })
}

/// `e^{ℓr²/4} r^{-α} g(r)` on the tail, evaluated as `C_last r^{-α} f(r)` to
/// avoid underflow of `ψ`.
pub fn decay_check(pair: &AppellPair, radii: &[f64], tol: f64) -> Result<DecayEstimate> {
    let c = pair.psi.last_constant();
    let a = pair.alpha();
    decay_limit(|r| pair.f(r).map(|y| c * r.powf(-a) * y[0]), radii, tol)
}

/// Dyadic radii from `r0`, `count` points.
pub fn dyadic(r0: f64, count: usize) -> Vec<f64> {
    (0..count).map(|j| r0 * 2f64.powi(j as i32)).collect()
}

/// `count` geometric radii from `a` to `b`.
pub fn geometric(a: f64, b: f64, count: usize) -> Vec<f64> {
    let q = (b / a).powf(1.0 / (count.max(2) - 1) as f64);
    (0..count).map(|j| a * q.powi(j as i32)).collect()
}

/// Negative control: for a non-eigen profile the weighted tail quantity must
/// not settle. Radii run from just past the last zero to the end of the
/// computed range.
pub fn decay_control(profile: &SelfSimilarProfile, tol: f64) -> Result<Report> {
    let pair = appell_transform(profile);
    let z = profile.zeros.last().copied().unwrap_or(1.0);
    let end = if profile.end().is_finite() { profile.end() } else { 8.0 * z.max(1.0) };
    let est = decay_check(&pair, &geometric(z + 0.5, end * (1.0 - 1e-9), 8), tol)?;
    let growth = match est.values.as_slice() {
        [.., a, b] => (b / a).abs(),
        _ => f64::NAN,
    };
    let mut report = Report::new(format!(
        "appell control N={} alpha={:.10}",
        profile.params.dimension, profile.params.alpha
    ));
    report.push(Check::flag(
        "weighted tail quantity diverges",
        !est.converged && est.last_relative_increment > tol,
        format!("last increment {:.3e}, last growth factor {growth:.3e}", est.last_relative_increment),
    ));
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppellTolerances {
    pub round_trip: f64,
    pub residual: f64,
    pub decay: f64,
    pub fd_step: f64,
}

impl Default for AppellTolerances {
    fn default() -> Self {
        Self { round_trip: 1e-10, residual: 1e-8, decay: 1e-6, fd_step: 2e-3 }
    }
}

/// Structural checks on a pair: ψ, dual equation, signs, gluing, round trip,
/// and (for algebraic tails) the weighted decay limit.
pub fn verify_pair(pair: &AppellPair, tol: &AppellTolerances) -> Result<Report> {
    let src = &pair.source;
    let n = src.params.dimension;
    let mut report = Report::new(format!(
        "appell N={n} sign={} alpha={:.10} beta={:.10}",
        src.params.origin_sign, src.params.alpha, pair.beta
    ));
    let r_max = if src.end().is_finite() { src.end() } else { src.zeros.last().copied().unwrap_or(1.0) + 4.0 };
    let grid: Vec<f64> = (0..=800).map(|i| r_max * i as f64 / 800.0).collect();

    let psi_ok = grid.iter().all(|&r| {
        let [p, pp] = pair.psi.eval(r);
        p > 0.0 && (r == 0.0 || pp < 0.0)
    });
    report.push(Check::flag("psi positive and decreasing", psi_ok, ""));
    report.push(Check::close("psi(0) = 1", pair.psi.value(0.0), 1.0, 0.0));
    for (i, &z) in pair.psi.zeros.iter().enumerate() {
        let (left, right) = pair.psi.derivative_jump(i);
        let expected = -(pair.psi.lambdas[i + 1] - pair.psi.lambdas[i]) * z * pair.psi.value(z) / 2.0;
        report.push(Check::close(format!("psi' jump at zero {}", i + 1), right - left, expected, 1e-12 * left.abs().max(1.0)));
    }

    let g0 = pair.g(0.0).ok_or_else(|| Error::InvalidInput("profile not evaluable at 0".into()))?;
    let f0 = src.eval(0.0).unwrap();
    report.push(Check::close("g(0) = f(0)", g0[0], f0[0], 1e-15));
    report.push(Check::close("g'(0) = 0", g0[1], 0.0, 1e-12));

    let mut worst: f64 = 0.0;
    let mut sign_ok = true;
    for &r in &grid {
        if let (Some([g, _]), Some([f, _])) = (pair.g(r), src.eval(r)) {
            if f != 0.0 && g.signum() != f.signum() {
                sign_ok = false;
            }
        }
        if let Some(res) = dual_residual(pair, r, tol.fd_step) {
            worst = worst.max(res.abs());
        }
    }
    report.push(Check::flag("sign(g) = sign(f)", sign_ok, ""));
    report.push(Check::at_most("dual equation residual", worst, tol.residual));

    for (i, &z) in src.zeros.iter().enumerate().take(pair.psi.zeros.len()) {
        let left = src.pieces[i].eval(z).map(|y| y[1] * pair.psi.eval_on(i, z)[0] + y[0] * pair.psi.eval_on(i, z)[1]);
        let right = src.pieces[i + 1].eval(z).map(|y| y[1] * pair.psi.eval_on(i + 1, z)[0] + y[0] * pair.psi.eval_on(i + 1, z)[1]);
        if let (Some(l), Some(r)) = (left, right) {
            report.push(Check::close(format!("g' continuous at zero {}", i + 1), r, l, 1e-9 * l.abs().max(1.0)));
        }
    }

    let samples: Vec<(f64, f64)> = grid.iter().filter_map(|&r| pair.g(r).map(|y| (r, y[0]))).collect();
    let back = inverse_appell(&pair.psi, &samples);
    let rt = back
        .iter()
        .filter_map(|&(r, f)| src.eval(r).map(|y| (f - y[0]).abs()))
        .fold(0.0, f64::max);
    report.push(Check::at_most("round trip f -> g -> f", rt, tol.round_trip));

    if src.tail.kind == TailKind::Algebraic {
        let r0 = 2.0 * src.zeros.last().copied().unwrap_or(1.0).max(2.0);
        let est = decay_check(pair, &dyadic(r0, 12), tol.decay)?;
        report.push(Check::flag(
            "weighted tail limit finite",
            est.converged,
            format!("limit {:.10e}, last increment {:.2e}", est.limit, est.last_relative_increment),
        ));
    }
    report.push(Check::close("beta = -(N + alpha)", pair.beta, -(src.params.n() + src.params.alpha), 0.0));
    Ok(report)
}

/// Solves `g'' + ((N-1)/r + r/2) g' - (β/2) g = 0`, `g(0) = 1`, `g'(0) = 0`,
/// and compares with `e^{-r²/4}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonsignOutcome {
    pub beta: f64,
    pub first_zero: Option<f64>,
    /// `min g(r)/e^{-r²/4}` over the comparison grid.
    pub min_ratio: f64,
    pub arg_min_ratio: f64,
    /// `max |g - e^{-r²/4}|`.
    pub max_gaussian_deviation: f64,
}

pub fn nonsign_solve(beta: f64, dimension: u32, horizon: f64) -> Result<NonsignOutcome> {
    let n = dimension as f64;
    if !(beta >= -n && beta < 0.0) {
        return Err(Error::InvalidInput(format!("beta = {beta} outside [-N, 0)")));
    }
    // Series start: a_{j+1} = -a_j (j - β/2) / ((2j+2)(2j+N)).
    let r0 = 1e-3;
    let (mut g, mut gp, mut a, mut pow) = (0.0, 0.0, 1.0, 1.0);
    for j in 0..8 {
        let jf = j as f64;
        g += a * pow;
        if j > 0 {
            gp += 2.0 * jf * a * pow / r0;
        }
        a = -a * (jf - beta / 2.0) / ((2.0 * jf + 2.0) * (2.0 * jf + n));
        pow *= r0 * r0;
    }
    // At β = -N the solution is the recessive e^{-r²/4}; past e^{-r²/4} ~ 1e-10
    // the dominant r^{-N} mode seeded by roundoff takes over.
    let horizon = if beta == -n { horizon.min((4.0 * 1e10f64.ln()).sqrt()) } else { horizon };
    let rhs = move |r: f64, y: &State| [y[1], -((n - 1.0) / r + 0.5 * r) * y[1] + 0.5 * beta * y[0]];
    let solver = Dopri5::new(Tolerances { rtol: 1e-13, atol: 1e-16, max_steps: 200_000 });
    let mut first_zero = None;
    let out = solver.integrate(rhs, r0, [g, gp], horizon, |step| {
        if step.y1[0] <= 0.0 && first_zero.is_none() {
            first_zero = Some(step.t1());
            Control::Stop
        } else {
            Control::Continue
        }
    })?;
    let traj = out.trajectory;
    let mut min_ratio = f64::INFINITY;
    let mut arg = 0.0;
    let mut dev: f64 = 0.0;
    let end = traj.end().unwrap_or(r0);
    let points = 4000;
    for i in 0..=points {
        let r = 0.05 + (end - 0.05) * i as f64 / points as f64;
        let Some([v, _]) = traj.eval(r) else { continue };
        let gauss = (-0.25 * r * r).exp();
        dev = dev.max((v - gauss).abs());
        let ratio = v / gauss;
        if ratio < min_ratio {
            min_ratio = ratio;
            arg = r;
        }
    }
    Ok(NonsignOutcome { beta, first_zero, min_ratio, arg_min_ratio: arg, max_gaussian_deviation: dev })
}

pub fn nonsign_check(beta: f64, dimension: u32, horizon: f64) -> Result<Report> {
    let o = nonsign_solve(beta, dimension, horizon)?;
    let n = dimension as f64;
    let mut report = Report::new(format!("nonsign N={dimension} beta={beta:.6}"));
    report.push(Check::flag(
        "no sign change",
        o.first_zero.is_none(),
        o.first_zero.map(|z| format!("zero near r = {z}")).unwrap_or_default(),
    ));
    if beta == -n {
        report.push(Check::at_most("g = exp(-r^2/4) at beta = -N", o.max_gaussian_deviation, 1e-10));
    } else {
        report.push(
            Check::at_least("g / exp(-r^2/4) > 1", o.min_ratio - 1.0, f64::MIN_POSITIVE)
                .with_note(format!("min ratio {:.6e} at r = {:.4}", o.min_ratio, o.arg_min_ratio)),
        );
    }
    Ok(report)
}

/// `∫ φ'² dμ / ∫ φ² dμ` with `dμ = r^{N-1} e^{r²/4} dr` on `(0, R)`.
pub fn pl_quotient<F: Fn(f64) -> State>(phi: F, radius: f64, dimension: u32) -> f64 {
    let n = dimension as f64;
    let w = |r: f64| r.powf(n - 1.0) * (0.25 * r * r).exp();
    let num = composite_gl8(|r| w(r) * phi(r)[1].powi(2), 0.0, radius, 200);
    let den = composite_gl8(|r| w(r) * phi(r)[0].powi(2), 0.0, radius, 200);
    num / den
}

/// Quotient lower bound `-N/2` on seeded random functions vanishing at `R`.
pub fn pl_check(dimension: u32, radius: f64, samples: usize, seed: u64) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new(format!("quotient bound N={dimension}"));
    for i in 0..samples {
        let c: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let phi = move |r: f64| {
            let p = c[0] + c[1] * r * r + c[2] * r.powi(4);
            let dp = 2.0 * c[1] * r + 4.0 * c[2] * r.powi(3);
            [(radius - r) * p, -p + (radius - r) * dp]
        };
        let q = pl_quotient(phi, radius, dimension);
        report.push(Check::at_least(format!("random function {}", i + 1), q, -(dimension as f64) / 2.0));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile_ode::{ProblemParams, Sign, SolverSettings};
    use crate::shooting::shoot_origin;

    fn parabola() -> SelfSimilarProfile {
        let p = ProblemParams::new(1, 2.0, Sign::Plus).unwrap();
        shoot_origin(&p, &SolverSettings::default()).unwrap()
    }

    #[test]
    fn psi_two_segments() {
        let prof = parabola();
        let psi = build_psi(&prof);
        let z = prof.zeros[0];
        assert!((psi.value(1.0) - (-0.25f64).exp()).abs() < 1e-15);
        let r = 2.0;
        let expected = (z * z / 4.0).exp() * (-r * r / 2.0f64).exp();
        assert!((psi.value(r) - expected).abs() < 1e-15);
        assert!((psi.value(z) - psi.eval_on(1, z)[0]).abs() < 1e-15);
    }

    #[test]
    fn parabola_dual_closed_form() {
        let pair = appell_transform(&parabola());
        for r in [0.2, 0.7, 1.2] {
            let g = pair.g(r).unwrap()[0];
            let exact = (1.0 - r * r / 2.0) * (-r * r / 4.0f64).exp();
            assert!((g - exact).abs() < 1e-11);
            assert!(dual_residual(&pair, r, 2e-3).unwrap().abs() < 1e-8);
        }
        assert_eq!(pair.beta, -3.0);
    }

    #[test]
    fn gaussian_limit() {
        let est = decay_limit(|r: f64| Some(3.0 * (1.0 + 1.0 / (r * r))), &dyadic(4.0, 12), 1e-6).unwrap();
        assert!(est.converged);
        assert!((est.limit - 3.0).abs() < 1e-12);
        let div = decay_limit(|r: f64| Some((r * r / 8.0).exp()), &dyadic(1.0, 4), 1e-6).unwrap();
        assert!(!div.converged);
    }

    #[test]
    fn nonsign_endpoint() {
        let o = nonsign_solve(-1.0, 1, 12.0).unwrap();
        assert!(o.max_gaussian_deviation < 1e-10, "{}", o.max_gaussian_deviation);
        assert!(nonsign_solve(-1.5, 1, 12.0).is_err());
        assert!(nonsign_solve(0.0, 1, 12.0).is_err());
    }

    #[test]
    fn pl_bound() {
        assert!(pl_check(2, 3.0, 10, 7).passed());
    }
}
