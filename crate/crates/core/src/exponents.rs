//! Eigen-homogeneities `α^±_k`: the `k`-th zero from the origin meets the
//! outermost zero from infinity.

use std::fmt;

use crate::error::{Error, Result};
use crate::profile_ode::{ProblemParams, Sign, SolverSettings};
use crate::roots;
use crate::shooting::{infinity_threshold, shoot_infinity, shoot_origin};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Absolute resolution of `α`.
    pub alpha_tol: f64,
    /// Accepted `|s^{σ,k}_α - s̃^{σ',1}_α|` at the solution.
    pub residual_tol: f64,
    /// Search window above the previous exponent.
    pub window: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { alpha_tol: 1e-10, residual_tol: 1e-9, window: 50.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentRecord {
    pub k: usize,
    pub sign: Sign,
    pub dimension: u32,
    pub alpha: f64,
    pub bracket: (f64, f64),
    pub residual: f64,
    /// `max_j |s^{σ,j}_α - s̃^{·,k+1-j}_α|` over `j ≤ k`.
    pub ident_check: f64,
    pub beta: f64,
    pub iterations: usize,
}

impl fmt::Display for ExponentRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha^{}_{} = {:.12} (beta = {:.12}, residual {:.2e}, ident {:.2e})",
            if self.sign == Sign::Plus { "+" } else { "-" },
            self.k,
            self.alpha,
            self.beta,
            self.residual,
            self.ident_check
        )
    }
}

/// Sign of the tail after `k` sign changes from `sign0`.
pub fn tail_sign(sign0: Sign, k: usize) -> Sign {
    sign0.after_changes(k)
}

/// `s^{σ₀,k}_α - s̃^{σ_tail,1}_α`. Missing zeros on either side mean `α` lies
/// below the root, reported as `+∞`.
pub fn matching_residual(
    alpha: f64,
    sign0: Sign,
    k: usize,
    dimension: u32,
    settings: &SolverSettings,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let params = ProblemParams::new(dimension, alpha, sign0)?;
    let origin = shoot_origin(&params, &SolverSettings { max_zeros: k, ..*settings })?;
    let Some(&s_origin) = origin.zeros.get(k - 1) else {
        return Ok(f64::INFINITY);
    };
    let shot = match shoot_infinity(&params, tail_sign(sign0, k), &SolverSettings { max_zeros: 1, ..*settings }) {
        Ok(shot) => shot,
        Err(Error::Unsupported { .. }) => return Ok(f64::INFINITY),
        Err(e) => return Err(e),
    };
    Ok(match shot.zero(1) {
        Some(s_inf) => s_origin - s_inf,
        None => f64::INFINITY,
    })
}

/// Largest distance between the origin zeros `1..=k` and the zeros met from
/// infinity, paired outermost with outermost.
pub fn ident_check(alpha: f64, sign0: Sign, k: usize, dimension: u32, settings: &SolverSettings) -> Result<f64> {
    let params = ProblemParams::new(dimension, alpha, sign0)?;
    let budget = SolverSettings { max_zeros: k, ..*settings };
    let origin = shoot_origin(&params, &budget)?;
    let shot = shoot_infinity(&params, tail_sign(sign0, k), &budget)?;
    if origin.zeros.len() < k || shot.t_zeros.len() < k {
        return Ok(f64::INFINITY);
    }
    Ok((1..=k)
        .map(|j| (origin.zeros[j - 1] - shot.zero(k + 1 - j).unwrap()).abs())
        .fold(0.0, f64::max))
}

/// Runs Brent on a fallible map, surfacing the first error.
fn brent_fallible<F>(g: F, lo: f64, hi: f64, g_lo: f64, g_hi: f64, xtol: f64) -> Result<roots::Root>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut err = None;
    let root = roots::brent(
        |a| match g(a) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        g_lo,
        g_hi,
        xtol,
        400,
    );
    match err {
        Some(e) => Err(e),
        None => root,
    }
}

/// Brackets and solves `matching_residual = 0`. `previous` is `α^{σ₀}_{k-1}`
/// (required for `k ≥ 2`).
pub fn solve_alpha(
    k: usize,
    sign0: Sign,
    dimension: u32,
    previous: Option<f64>,
    settings: &SolverSettings,
    opts: &SolveOptions,
) -> Result<ExponentRecord> {
    let r = |a: f64| matching_residual(a, sign0, k, dimension, settings);
    let (lo, hi, r_lo, r_hi) = match (k, sign0, previous) {
        (0, _, _) => return Err(Error::InvalidInput("k must be at least 1".into())),
        (1, Sign::Plus, _) => {
            let (mut lo, mut hi) = (2.0, 2.0);
            let mut r_lo = r(lo)?;
            let mut r_hi = r_lo;
            while r_hi > 0.0 {
                lo = hi;
                r_lo = r_hi;
                hi *= 1.5;
                if hi > 2.0 + opts.window {
                    return Err(Error::BracketExhausted { lo: 2.0, hi });
                }
                r_hi = r(hi)?;
            }
            (lo, hi, r_lo, r_hi)
        }
        (1, Sign::Minus, _) => {
            let floor = infinity_threshold(dimension);
            let (mut lo, mut hi) = (2.0, 2.0);
            let mut r_hi = r(hi)?;
            let mut r_lo = r_hi;
            while r_lo < 0.0 {
                hi = lo;
                r_hi = r_lo;
                lo /= 1.5;
                if lo <= floor.max(1e-6) {
                    return Err(Error::BracketExhausted { lo, hi: 2.0 });
                }
                r_lo = r(lo)?;
            }
            (lo, hi, r_lo, r_hi)
        }
        (_, _, None) => {
            return Err(Error::InvalidInput(format!("k = {k} needs the exponent for k - 1")))
        }
        (_, _, Some(prev)) => {
            let mut lo = prev + 1e-6;
            let mut r_lo = r(lo)?;
            if r_lo <= 0.0 {
                return Err(Error::InvariantViolation(format!(
                    "matching residual {r_lo} is not positive just above the previous exponent {prev}"
                )));
            }
            let mut step = 0.25;
            let mut hi = lo;
            let mut r_hi = r_lo;
            while r_hi > 0.0 {
                lo = hi;
                r_lo = r_hi;
                hi = (hi + step).min(prev + opts.window);
                step *= 1.5;
                r_hi = r(hi)?;
                if r_hi > 0.0 && hi >= prev + opts.window {
                    return Err(Error::BracketExhausted { lo: prev, hi });
                }
            }
            (lo, hi, r_lo, r_hi)
        }
    };
    let root = brent_fallible(r, lo, hi, r_lo, r_hi, opts.alpha_tol)?;
    let alpha = root.x;
    let residual = matching_residual(alpha, sign0, k, dimension, settings)?.abs();
    if !(residual <= opts.residual_tol) {
        return Err(Error::NonConvergence(format!(
            "residual {residual:e} at alpha = {alpha} exceeds {:e}",
            opts.residual_tol
        )));
    }
    let ident = ident_check(alpha, sign0, k, dimension, settings)?;
    Ok(ExponentRecord {
        k,
        sign: sign0,
        dimension,
        alpha,
        bracket: (lo, hi),
        residual,
        ident_check: ident,
        beta: -(dimension as f64 + alpha),
        iterations: root.iterations,
    })
}

/// Number of sign changes of the matching residual on a uniform scan.
pub fn residual_sign_changes(
    k: usize,
    sign0: Sign,
    dimension: u32,
    range: (f64, f64),
    points: usize,
    settings: &SolverSettings,
) -> Result<usize> {
    let mut prev: Option<f64> = None;
    let mut changes = 0;
    for i in 0..points {
        let a = range.0 + (range.1 - range.0) * i as f64 / (points - 1) as f64;
        let v = matching_residual(a, sign0, k, dimension, settings)?;
        if let Some(p) = prev {
            if (p > 0.0 && v < 0.0) || (p < 0.0 && v > 0.0) {
                changes += 1;
            }
        }
        if v != 0.0 {
            prev = Some(v);
        }
    }
    Ok(changes)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentTable {
    pub dimension: u32,
    /// `k = 1..=K` for each sign, plus first, then minus.
    pub records: Vec<ExponentRecord>,
}

impl ExponentTable {
    pub fn get(&self, sign: Sign, k: usize) -> Option<&ExponentRecord> {
        self.records.iter().find(|r| r.sign == sign && r.k == k)
    }

    pub fn alpha(&self, sign: Sign, k: usize) -> Option<f64> {
        self.get(sign, k).map(|r| r.alpha)
    }

    pub fn max_k(&self) -> usize {
        self.records.iter().map(|r| r.k).max().unwrap_or(0)
    }

    /// Smallest margin in each of the ordering relations, or an error naming
    /// the first violated one.
    pub fn check_invariants(&self, margin: f64) -> Result<InvariantMargins> {
        let big_k = self.max_k();
        let a = |s, k| self.alpha(s, k).ok_or_else(|| Error::InvariantViolation(format!("missing record {s} {k}")));
        let mut out = InvariantMargins::default();
        let check = |name: String, lo: f64, hi: f64, slot: &mut f64| -> Result<()> {
            let m = hi - lo;
            if !(m >= margin) {
                return Err(Error::InvariantViolation(format!("{name}: margin {m:e} below {margin:e}")));
            }
            *slot = slot.min(m);
            Ok(())
        };
        out.increasing = f64::INFINITY;
        out.interlacing = f64::INFINITY;
        for sign in [Sign::Plus, Sign::Minus] {
            for k in 2..=big_k {
                check(format!("alpha^{sign}_{k} > alpha^{sign}_{}", k - 1), a(sign, k - 1)?, a(sign, k)?, &mut out.increasing)?;
            }
        }
        let am1 = a(Sign::Minus, 1)?;
        let ap1 = a(Sign::Plus, 1)?;
        check("alpha^-_1 > 0".into(), 0.0, am1, &mut out.first_minus)?;
        out.first_minus = am1.min(2.0 - am1);
        check("alpha^-_1 < 2".into(), am1, 2.0, &mut out.first_minus)?;
        out.first_plus = ap1 - 2.0;
        check("alpha^+_1 > 2".into(), 2.0, ap1, &mut out.first_plus)?;
        for k in 1..=big_k {
            if k + 1 <= big_k {
                check(format!("alpha^-_{k} < alpha^+_{}", k + 1), a(Sign::Minus, k)?, a(Sign::Plus, k + 1)?, &mut out.interlacing)?;
            }
            if k + 2 <= big_k {
                check(
                    format!("alpha^+_{} < alpha^-_{}", k + 1, k + 2),
                    a(Sign::Plus, k + 1)?,
                    a(Sign::Minus, k + 2)?,
                    &mut out.interlacing,
                )?;
            }
        }
        for r in &self.records {
            if !(r.beta < -(self.dimension as f64)) {
                return Err(Error::InvariantViolation(format!("beta {} not below -N", r.beta)));
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InvariantMargins {
    pub increasing: f64,
    pub interlacing: f64,
    pub first_minus: f64,
    pub first_plus: f64,
}

fn chain(
    sign: Sign,
    max_k: usize,
    dimension: u32,
    settings: &SolverSettings,
    opts: &SolveOptions,
) -> Result<Vec<ExponentRecord>> {
    let mut out: Vec<ExponentRecord> = Vec::with_capacity(max_k);
    for k in 1..=max_k {
        let prev = out.last().map(|r| r.alpha);
        out.push(solve_alpha(k, sign, dimension, prev, settings, opts)?);
    }
    Ok(out)
}

/// All `α^±_k`, `k ≤ max_k`. The two sign chains run in parallel; within a
/// chain each exponent seeds the next bracket.
pub fn exponent_table(
    max_k: usize,
    dimension: u32,
    settings: &SolverSettings,
    opts: &SolveOptions,
) -> Result<ExponentTable> {
    if max_k == 0 || max_k > settings.max_zeros {
        return Err(Error::InvalidInput(format!(
            "K = {max_k} must lie in 1..={}",
            settings.max_zeros
        )));
    }
    let (plus, minus) = rayon::join(
        || chain(Sign::Plus, max_k, dimension, settings, opts),
        || chain(Sign::Minus, max_k, dimension, settings, opts),
    );
    let mut records = plus?;
    records.extend(minus?);
    let table = ExponentTable { dimension, records };
    table.check_invariants(0.0)?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_signs_at_two() {
        let s = SolverSettings::default();
        let r = matching_residual(2.0, Sign::Plus, 1, 1, &s).unwrap();
        assert!((r - (2f64.sqrt() - 1.0)).abs() < 1e-9);
        let r = matching_residual(2.0, Sign::Minus, 1, 1, &s).unwrap();
        assert!((r - (1.0 - 2f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn first_exponents_bracket_two() {
        let s = SolverSettings::default();
        let o = SolveOptions::default();
        let plus = solve_alpha(1, Sign::Plus, 1, None, &s, &o).unwrap();
        let minus = solve_alpha(1, Sign::Minus, 1, None, &s, &o).unwrap();
        assert!(plus.alpha > 2.0 && minus.alpha < 2.0 && minus.alpha > 0.0);
        assert!(plus.residual < 1e-9 && minus.residual < 1e-9);
        assert!(plus.bracket.0 <= plus.alpha && plus.alpha <= plus.bracket.1);
        assert_eq!(plus.beta, -1.0 - plus.alpha);
    }

    #[test]
    fn higher_k_needs_previous() {
        let s = SolverSettings::default();
        assert!(solve_alpha(2, Sign::Plus, 1, None, &s, &SolveOptions::default()).is_err());
    }
}
