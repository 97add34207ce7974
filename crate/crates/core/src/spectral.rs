//! Weighted Rayleigh quotients and a finite-volume eigenvalue oracle for
//!
//! ```text
//! -(w f')' = Λ w f,   w(s) = s^{N-1} exp(-λ s²/4),
//! ```
//!
//! where `λ = 1` (measure μ⁺, `Λ = α/2`) or `λ = 2` (measure μ⁻, `Λ = α`).

use std::fmt;

use crate::error::{Error, Result};
use crate::ode::State;
use crate::profile_ode::{Branch, SelfSimilarProfile, SolverSettings, TailKind};
use crate::quadrature::{composite_gl8, gl2};
use crate::report::{Check, Report};
use crate::shooting::shoot_origin;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    MuPlus,
    MuMinus,
}

impl MeasureKind {
    pub fn lambda(self) -> f64 {
        match self {
            MeasureKind::MuPlus => 1.0,
            MeasureKind::MuMinus => 2.0,
        }
    }

    pub fn for_branch(branch: Branch) -> Self {
        match branch {
            Branch::PositiveRegion => MeasureKind::MuPlus,
            Branch::NegativeRegion => MeasureKind::MuMinus,
        }
    }

    /// `α` from the eigenvalue parameter `Λ`.
    pub fn alpha_from_eigenvalue(self, lambda_min: f64) -> f64 {
        match self {
            MeasureKind::MuPlus => 2.0 * lambda_min,
            MeasureKind::MuMinus => lambda_min,
        }
    }

    pub fn eigenvalue_from_alpha(self, alpha: f64) -> f64 {
        match self {
            MeasureKind::MuPlus => 0.5 * alpha,
            MeasureKind::MuMinus => alpha,
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasureKind::MuPlus => "mu+",
            MeasureKind::MuMinus => "mu-",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedMeasure {
    pub kind: MeasureKind,
    pub dimension: u32,
}

impl WeightedMeasure {
    pub fn new(kind: MeasureKind, dimension: u32) -> Self {
        Self { kind, dimension }
    }

    pub fn weight(&self, s: f64) -> f64 {
        let n = self.dimension as f64;
        let power = if self.dimension == 1 { 1.0 } else { s.powf(n - 1.0) };
        power * (-0.25 * self.kind.lambda() * s * s).exp()
    }

    /// Leading-order bound on `∫_cap^∞ w`.
    pub fn tail_mass(&self, cap: f64) -> f64 {
        2.0 * self.weight(cap) / (self.kind.lambda() * cap)
    }
}

/// Point beyond which `w (f² + f'²)` has dropped by `e^{-46}` from its peak.
fn tail_cutoff<F: Fn(f64) -> Option<State>>(f: &F, a: f64, measure: &WeightedMeasure) -> Result<f64> {
    let log_density = |s: f64| -> Option<f64> {
        let [v, dv] = f(s)?;
        Some(measure.weight(s).ln() + (v * v + dv * dv).ln())
    };
    let mut s = a.max(0.5) + 0.25;
    let mut peak = f64::NEG_INFINITY;
    for _ in 0..4000 {
        let ld = log_density(s)
            .ok_or_else(|| Error::InvalidInput(format!("function not evaluable at s = {s}")))?;
        peak = peak.max(ld);
        if ld < peak - 46.0 && s > a + 1.0 {
            return Ok(s);
        }
        s += 0.25;
    }
    Err(Error::NonConvergence("integrand does not decay".into()))
}

/// `∫ f'² dμ / ∫ f² dμ` over `(a, b)`; `b` may be infinite. `f` returns
/// `(f, f')`.
pub fn rayleigh<F>(f: F, interval: (f64, f64), kind: MeasureKind, dimension: u32) -> Result<f64>
where
    F: Fn(f64) -> Option<State>,
{
    let measure = WeightedMeasure::new(kind, dimension);
    let (a, b) = interval;
    if !(b > a) || a < 0.0 {
        return Err(Error::InvalidInput(format!("bad interval ({a}, {b})")));
    }
    let b = if b.is_finite() { b } else { tail_cutoff(&f, a, &measure)? };
    let panels = ((b - a) * 96.0).ceil() as usize + 16;
    let mut missing = false;
    let mut moment = |which: usize| {
        composite_gl8(
            |s| match f(s) {
                Some(y) => measure.weight(s) * y[which] * y[which],
                None => {
                    missing = true;
                    0.0
                }
            },
            a,
            b,
            panels,
        )
    };
    let num = moment(1);
    let den = moment(0);
    if missing {
        return Err(Error::InvalidInput("function not evaluable on the interval".into()));
    }
    if !(den > 0.0) {
        return Err(Error::InvalidInput("zero denominator in the Rayleigh quotient".into()));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Number of cells.
    pub grid_points: usize,
    /// Replaces an infinite right endpoint (Dirichlet cap).
    pub cap: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { grid_points: 10_000, cap: 12.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    /// Interval actually discretized.
    pub interval: (f64, f64),
    pub kind: MeasureKind,
    pub grid_points: usize,
    pub lambda_min: f64,
    pub nodes: Vec<f64>,
    /// Ground state at `nodes`, positive, max-normalized.
    pub eigenvector: Vec<f64>,
    pub recovered_alpha: f64,
    pub truncated: bool,
    /// `∫_cap^∞ w`, when the interval was truncated.
    pub tail_weight: f64,
}

impl EigenResult {
    pub fn sign_changes(&self) -> usize {
        self.eigenvector
            .windows(2)
            .filter(|w| (w[0] > 0.0 && w[1] < 0.0) || (w[0] < 0.0 && w[1] > 0.0))
            .count()
    }

    pub fn is_positive(&self) -> bool {
        self.eigenvector.iter().all(|v| *v > 0.0)
    }
}

/// Eigenvalues of the symmetric tridiagonal matrix below `x`.
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let off = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] / q };
        q = d[i] - x - off;
        if q == 0.0 {
            q = -f64::EPSILON * (d[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Solves `(T - σ I) y = r` for symmetric tridiagonal `T`.
fn shifted_solve(d: &[f64], e: &[f64], sigma: f64, r: &[f64]) -> Vec<f64> {
    let n = d.len();
    let mut c = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut piv = d[0] - sigma;
    c[0] = if n > 1 { e[0] / piv } else { 0.0 };
    y[0] = r[0] / piv;
    for i in 1..n {
        piv = d[i] - sigma - e[i - 1] * c[i - 1];
        if piv == 0.0 {
            piv = f64::EPSILON;
        }
        if i + 1 < n {
            c[i] = e[i] / piv;
        }
        y[i] = (r[i] - e[i - 1] * y[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        let next = y[i + 1];
        y[i] -= c[i] * next;
    }
    y
}

/// Smallest eigenvalue of the finite-volume discretization on `interval`:
/// natural condition at `s = 0`, Dirichlet at every other endpoint.
pub fn discrete_min_eigenvalue(
    interval: (f64, f64),
    kind: MeasureKind,
    dimension: u32,
    opts: &EigenOptions,
) -> Result<EigenResult> {
    let (a, b_in) = interval;
    if opts.grid_points < 100 {
        return Err(Error::InvalidInput(format!("need at least 100 cells, got {}", opts.grid_points)));
    }
    let truncated = !b_in.is_finite();
    let b = if truncated { opts.cap } else { b_in };
    if !(a >= 0.0) || !(b > a) {
        return Err(Error::InvalidInput(format!("bad interval ({a}, {b})")));
    }
    let measure = WeightedMeasure::new(kind, dimension);
    let m = opts.grid_points;
    let h = (b - a) / m as f64;
    let node = |i: usize| a + i as f64 * h;
    let natural = a == 0.0;
    let first = if natural { 0 } else { 1 };
    let idx: Vec<usize> = (first..m).collect();
    let flux = |i: usize| measure.weight(node(i) + 0.5 * h) / h; // edge (i, i+1)
    let mass = |i: usize| {
        let x = node(i);
        let left = if i == 0 { 0.0 } else { gl2(|s| measure.weight(s), x - 0.5 * h, x) };
        left + gl2(|s| measure.weight(s), x, x + 0.5 * h)
    };
    let masses: Vec<f64> = idx.iter().map(|&i| mass(i)).collect();
    let fluxes: Vec<f64> = (0..m).map(flux).collect();
    let n = idx.len();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    for (r, &i) in idx.iter().enumerate() {
        let k_ii = fluxes[i] + if i == 0 { 0.0 } else { fluxes[i - 1] };
        d[r] = k_ii / masses[r];
        if r + 1 < n {
            e[r] = -fluxes[i] / (masses[r] * masses[r + 1]).sqrt();
        }
    }

    let mut lo = 0.0;
    let mut hi = (0..n)
        .map(|r| d[r] + if r > 0 { e[r - 1].abs() } else { 0.0 } + if r + 1 < n { e[r].abs() } else { 0.0 })
        .fold(0.0, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(&d, &e, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    let coarse = 0.5 * (lo + hi);

    let sigma = coarse * (1.0 - 1e-6);
    let mut y = vec![1.0; n];
    for _ in 0..6 {
        y = shifted_solve(&d, &e, sigma, &y);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NonConvergence("inverse iteration broke down".into()));
        }
        y.iter_mut().for_each(|v| *v /= norm);
    }
    let mut f: Vec<f64> = y.iter().zip(&masses).map(|(v, mm)| v / mm.sqrt()).collect();
    let peak = f.iter().copied().fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
    f.iter_mut().for_each(|v| *v /= peak);

    // Difference-form Rayleigh quotient avoids cancellation in d - 2e.
    let value_at = |i: usize| if i < first || i >= m { 0.0 } else { f[i - first] };
    let num: f64 = (0..m).map(|i| fluxes[i] * (value_at(i + 1) - value_at(i)).powi(2)).sum();
    let den: f64 = f.iter().zip(&masses).map(|(v, mm)| mm * v * v).sum();
    let lambda_min = num / den;
    if !lambda_min.is_finite() || (lambda_min - coarse).abs() > 1e-6 * coarse.max(1e-12) {
        return Err(Error::NonConvergence(format!(
            "Rayleigh refinement {lambda_min} disagrees with bisection {coarse}"
        )));
    }
    Ok(EigenResult {
        interval: (a, b),
        kind,
        grid_points: m,
        lambda_min,
        nodes: idx.iter().map(|&i| node(i)).collect(),
        eigenvector: f,
        recovered_alpha: kind.alpha_from_eigenvalue(lambda_min),
        truncated,
        tail_weight: if truncated { measure.tail_mass(b) } else { 0.0 },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralTolerances {
    pub rayleigh: f64,
    pub eigen_alpha: f64,
    pub grid_points: usize,
    /// Homogeneity increment for the nested-interval comparison.
    pub nested_step: f64,
}

impl Default for SpectralTolerances {
    fn default() -> Self {
        Self { rayleigh: 1e-5, eigen_alpha: 1e-3, grid_points: 10_000, nested_step: 0.25 }
    }
}

/// Rayleigh identities on every closed piece, the discrete minimal
/// eigenvalue on the first piece, and domain monotonicity against a profile
/// of slightly larger homogeneity. `claimed_alpha` is what the profile is
/// supposed to have.
pub fn verify_minimal_eigenvalue(
    profile: &SelfSimilarProfile,
    claimed_alpha: f64,
    settings: &SolverSettings,
    tol: &SpectralTolerances,
) -> Result<Report> {
    if profile.zeros.is_empty() {
        return Err(Error::InvalidInput("profile has no zero".into()));
    }
    let n = profile.params.dimension;
    let mut report = Report::new(format!(
        "spectral N={n} sign={} alpha={claimed_alpha:.10}",
        profile.params.origin_sign
    ));
    let closed = |i: usize| i < profile.zeros.len() || profile.tail.kind == TailKind::Algebraic;
    for (i, piece) in profile.pieces.iter().enumerate().filter(|(i, _)| closed(*i)) {
        let kind = MeasureKind::for_branch(piece.branch);
        let a = if i == 0 { 0.0 } else { piece.interval.0 };
        let r = rayleigh(|s| profile.eval(s), (a, piece.interval.1), kind, n)?;
        report.push(Check::close(
            format!("rayleigh piece {} ({kind})", i + 1),
            r,
            kind.eigenvalue_from_alpha(claimed_alpha),
            tol.rayleigh,
        ));
    }

    let first_kind = MeasureKind::for_branch(profile.pieces[0].branch);
    let z1 = profile.zeros[0];
    let opts = EigenOptions { grid_points: tol.grid_points, ..Default::default() };
    let eig = discrete_min_eigenvalue((0.0, z1), first_kind, n, &opts)?;
    report.push(Check::close("discrete eigenvalue on (0, s1)", eig.recovered_alpha, claimed_alpha, tol.eigen_alpha));
    report.push(Check::flag("ground state keeps its sign", eig.is_positive(), ""));

    let bigger = profile.params.with_alpha(profile.params.alpha + tol.nested_step);
    let other = shoot_origin(&bigger, &SolverSettings { max_zeros: 1, ..*settings })?;
    if let Some(&z2) = other.zeros.first() {
        let eig2 = discrete_min_eigenvalue((0.0, z2), first_kind, n, &opts)?;
        report.push(Check::flag(
            "nested intervals: smaller interval has larger eigenvalue",
            z2 < z1 && eig2.lambda_min > eig.lambda_min,
            format!("s1 {z1:.8} -> {z2:.8}, Lambda {:.8} -> {:.8}", eig.lambda_min, eig2.lambda_min),
        ));
        report.push(Check::close("discrete eigenvalue at larger alpha", eig2.recovered_alpha, bigger.alpha, tol.eigen_alpha));
    } else {
        report.push(Check::flag("nested intervals", false, "comparison profile has no zero"));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_mass_two_dimensions() {
        let m = WeightedMeasure::new(MeasureKind::MuPlus, 2);
        let v = composite_gl8(|s| m.weight(s), 0.0, 20.0, 200);
        assert!((v - 2.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn parabola_quotients() {
        // p+ = 1 - s²/2 on (0, √2): α/2 = 1. p- = s² - 1 on (0, 1): α = 2.
        let plus = rayleigh(|s| Some([1.0 - 0.5 * s * s, -s]), (0.0, 2f64.sqrt()), MeasureKind::MuPlus, 1).unwrap();
        assert!((plus - 1.0).abs() < 1e-12, "{plus}");
        let minus = rayleigh(|s| Some([s * s - 1.0, 2.0 * s]), (0.0, 1.0), MeasureKind::MuMinus, 1).unwrap();
        assert!((minus - 2.0).abs() < 1e-12, "{minus}");
        let c = rayleigh(|_| Some([3.0, 0.0]), (0.5, 2.0), MeasureKind::MuPlus, 2).unwrap();
        assert_eq!(c, 0.0);
        assert!(rayleigh(|_| Some([0.0, 0.0]), (0.5, 2.0), MeasureKind::MuPlus, 2).is_err());
    }

    #[test]
    fn sturm_count_diagonal() {
        let d = [1.0, 2.0, 3.0];
        let e = [0.0, 0.0];
        assert_eq!(sturm_count(&d, &e, 2.5), 2);
        assert_eq!(sturm_count(&d, &e, 0.5), 0);
    }

    #[test]
    fn eigen_oracle_parabola() {
        let r = discrete_min_eigenvalue((0.0, 2f64.sqrt()), MeasureKind::MuPlus, 1, &EigenOptions { grid_points: 2000, cap: 12.0 })
            .unwrap();
        assert!((r.recovered_alpha - 2.0).abs() < 1e-4, "{}", r.recovered_alpha);
        assert!(r.is_positive());
        assert!(discrete_min_eigenvalue((0.0, 1.0), MeasureKind::MuPlus, 1, &EigenOptions { grid_points: 10, cap: 12.0 }).is_err());
    }
}
