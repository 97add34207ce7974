//! Dormand–Prince 5(4) integrator for scalar second-order equations written as
//! a two-component first-order system, with continuous (dense) output.
//!
//! The stepper only integrates forward in the independent variable. Callers
//! inspect every accepted step through a callback and decide whether to stop,
//! which is how zero crossings and overflow are detected upstream.

use crate::error::{Error, Result};

/// `[y, y']`.
pub type State = [f64; 2];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Quarter-point defect accepted per step, in tolerance units.
const DEFECT_BUDGET: f64 = 1.0;

/// Error tolerances and step limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Hard cap on accepted + rejected steps per call.
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            max_steps: 200_000,
        }
    }
}

/// One accepted step together with its continuous extension.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub t0: f64,
    pub h: f64,
    pub y0: State,
    pub y1: State,
    rcont: [State; 5],
}

impl Step {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Dense output at `t ∈ [t0, t0 + h]` (4th order).
    pub fn eval(&self, t: f64) -> State {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let r = &self.rcont;
        let mut out = [0.0; 2];
        for i in 0..2 {
            out[i] = r[0][i]
                + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])));
        }
        out
    }

    /// Time derivative of the dense output at `t`.
    pub fn derivative(&self, t: f64) -> State {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let r = &self.rcont;
        let mut out = [0.0; 2];
        for i in 0..2 {
            let q = r[3][i] + theta1 * r[4][i];
            let inner = r[2][i] + theta * q;
            let p = r[1][i] + theta1 * inner;
            let dq = -r[4][i];
            let dinner = q + theta * dq;
            let dp = -inner + theta1 * dinner;
            out[i] = (p + theta * dp) / self.h;
        }
        out
    }
}

/// Piecewise dense solution assembled from accepted steps. Immutable once built.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DenseTrajectory {
    steps: Vec<Step>,
}

impl DenseTrajectory {
    pub fn new(steps: Vec<Step>) -> Self {
        Self { steps }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn start(&self) -> Option<f64> {
        self.steps.first().map(|s| s.t0)
    }

    pub fn end(&self) -> Option<f64> {
        self.steps.last().map(Step::t1)
    }

    /// Evaluates the continuous extension; `None` outside the covered range.
    pub fn eval(&self, t: f64) -> Option<State> {
        let (lo, hi) = (self.start()?, self.end()?);
        let slack = 1e-12 * hi.abs().max(1.0);
        if t < lo - slack || t > hi + slack {
            return None;
        }
        let idx = self.steps.partition_point(|s| s.t1() < t);
        let step = &self.steps[idx.min(self.steps.len() - 1)];
        Some(step.eval(t))
    }

    pub(crate) fn push(&mut self, step: Step) {
        self.steps.push(step);
    }

    /// Replaces the final step (used after event refinement shortens it).
    pub(crate) fn replace_last(&mut self, step: Step) {
        if let Some(last) = self.steps.last_mut() {
            *last = step;
        }
    }
}

/// What to do after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Outcome of [`Dopri5::integrate`].
#[derive(Debug, Clone)]
pub struct Integration {
    pub trajectory: DenseTrajectory,
    /// True when the callback requested the stop (rather than reaching `t_end`).
    pub stopped_early: bool,
}

/// Adaptive Dormand–Prince 5(4) stepper.
#[derive(Debug, Clone, Copy, Default)]
pub struct Dopri5 {
    pub tol: Tolerances,
}

impl Dopri5 {
    pub fn new(tol: Tolerances) -> Self {
        Self { tol }
    }

    /// A single explicit step of size `h` without error control. Returns the
    /// step and the derivative at its end point.
    pub fn single_step<F>(&self, rhs: &F, t0: f64, y0: State, k1: State, h: f64) -> (Step, State, f64)
    where
        F: Fn(f64, &State) -> State,
    {
        let add = |y: &State, terms: &[(f64, &State)]| -> State {
            let mut out = *y;
            for (c, k) in terms {
                out[0] += h * c * k[0];
                out[1] += h * c * k[1];
            }
            out
        };
        let k2 = rhs(t0 + C2 * h, &add(&y0, &[(A21, &k1)]));
        let k3 = rhs(t0 + C3 * h, &add(&y0, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(t0 + C4 * h, &add(&y0, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(
            t0 + C5 * h,
            &add(&y0, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            t0 + h,
            &add(&y0, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = add(&y0, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs(t0 + h, &y1);

        let mut err = 0.0;
        let mut rcont = [[0.0; 2]; 5];
        for i in 0..2 {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.tol.atol + self.tol.rtol * y0[i].abs().max(y1[i].abs());
            err += (e / sc).powi(2);

            let dy = y1[i] - y0[i];
            let bspl = h * k1[i] - dy;
            rcont[0][i] = y0[i];
            rcont[1][i] = dy;
            rcont[2][i] = bspl;
            rcont[3][i] = dy - h * k7[i] - bspl;
            rcont[4][i] = h
                * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        let err = (err / 2.0).sqrt();
        (Step { t0, h, y0, y1, rcont }, k7, err)
    }

    /// Defect `h |y'_dense - F(t, y_dense)|` at `t0 + θh`, in units of the
    /// error tolerance (max over components).
    pub fn defect<F>(&self, rhs: &F, step: &Step, theta: f64) -> f64
    where
        F: Fn(f64, &State) -> State,
    {
        let t = step.t0 + theta * step.h;
        let y = step.eval(t);
        let dy = step.derivative(t);
        let f = rhs(t, &y);
        (0..2)
            .map(|i| {
                let sc = self.tol.atol + self.tol.rtol * step.y0[i].abs().max(step.y1[i].abs());
                step.h.abs() * (dy[i] - f[i]).abs() / sc
            })
            .fold(0.0, f64::max)
    }

    fn initial_step<F>(&self, rhs: &F, t0: f64, y0: &State, f0: &State, t_end: f64) -> f64
    where
        F: Fn(f64, &State) -> State,
    {
        let sc = |i: usize| self.tol.atol + self.tol.rtol * y0[i].abs();
        let norm = |v: &State| ((v[0] / sc(0)).powi(2) + (v[1] / sc(1)).powi(2)).sqrt() / 2f64.sqrt();
        let d0 = norm(y0);
        let d1 = norm(f0);
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(t_end - t0);
        let y1 = [y0[0] + h0 * f0[0], y0[1] + h0 * f0[1]];
        let f1 = rhs(t0 + h0, &y1);
        let d2 = norm(&[f1[0] - f0[0], f1[1] - f0[1]]) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(t_end - t0)
    }

    /// Integrates from `t0` to `t_end`, handing every accepted step to
    /// `on_step`. Returning [`Control::Stop`] keeps that step as the last one.
    pub fn integrate<F, C>(
        &self,
        rhs: F,
        t0: f64,
        y0: State,
        t_end: f64,
        mut on_step: C,
    ) -> Result<Integration>
    where
        F: Fn(f64, &State) -> State,
        C: FnMut(&Step) -> Control,
    {
        if !(t_end > t0) {
            return Err(Error::InvalidInput(format!(
                "integration interval [{t0}, {t_end}] is empty"
            )));
        }
        let mut traj = DenseTrajectory::default();
        let mut t = t0;
        let mut y = y0;
        let mut k1 = rhs(t, &y);
        let mut h = self.initial_step(&rhs, t, &y, &k1, t_end);
        let mut reject_streak = 0usize;

        for _ in 0..self.tol.max_steps {
            let remaining = t_end - t;
            if remaining <= 1e-14 * t_end.abs().max(1.0) {
                return Ok(Integration {
                    trajectory: traj,
                    stopped_early: false,
                });
            }
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            let h_min = 1e-14 * t.abs().max(1e-300);
            if h < h_min {
                return Err(Error::StepUnderflow { at: t });
            }
            let (step, k7, err) = self.single_step(&rhs, t, y, k1, h);
            // Defect control keeps the continuous extension, not only the
            // end point, within tolerance.
            let defect = self.defect(&rhs, &step, 0.25).max(self.defect(&rhs, &step, 0.75));
            let err = err.max(defect / DEFECT_BUDGET);
            if !err.is_finite() || !step.y1.iter().all(|v| v.is_finite()) {
                h *= 0.2;
                reject_streak += 1;
                continue;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                t = if last { t_end } else { step.t1() };
                y = step.y1;
                k1 = k7;
                let control = on_step(&step);
                traj.push(step);
                if control == Control::Stop {
                    return Ok(Integration {
                        trajectory: traj,
                        stopped_early: true,
                    });
                }
                h *= if reject_streak > 0 { fac.min(1.0) } else { fac };
                reject_streak = 0;
            } else {
                h *= fac.min(1.0);
                reject_streak += 1;
            }
        }
        Err(Error::NonConvergence(format!(
            "step budget of {} exhausted at t = {t}",
            self.tol.max_steps
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator(_t: f64, y: &State) -> State {
        [y[1], -y[0]]
    }

    #[test]
    fn harmonic_oscillator_to_tolerance() {
        let solver = Dopri5::default();
        let out = solver
            .integrate(oscillator, 0.0, [0.0, 1.0], 10.0, |_| Control::Continue)
            .unwrap();
        let end = out.trajectory.steps().last().unwrap().y1;
        assert!((end[0] - 10f64.sin()).abs() < 1e-10, "{}", end[0] - 10f64.sin());
        assert!((end[1] - 10f64.cos()).abs() < 1e-10);
    }

    #[test]
    fn dense_output_between_steps() {
        let solver = Dopri5::new(Tolerances {
            rtol: 1e-10,
            atol: 1e-12,
            ..Default::default()
        });
        let out = solver
            .integrate(oscillator, 0.0, [0.0, 1.0], 6.0, |_| Control::Continue)
            .unwrap();
        for i in 0..=60 {
            let t = i as f64 * 0.1;
            let y = out.trajectory.eval(t).unwrap();
            assert!((y[0] - t.sin()).abs() < 1e-8, "t={t}");
            assert!((y[1] - t.cos()).abs() < 1e-8, "t={t}");
        }
        assert!(out.trajectory.eval(6.5).is_none());
    }

    #[test]
    fn dense_output_is_fourth_order() {
        // Single fixed step of y' = y, midpoint error must shrink ~h^5.
        let solver = Dopri5::default();
        let rhs = |_t: f64, y: &State| [y[0], y[1]];
        let mut errs = Vec::new();
        for h in [0.2, 0.1] {
            let (step, _, _) = solver.single_step(&rhs, 0.0, [1.0, 1.0], [1.0, 1.0], h);
            let mid = step.eval(0.5 * h);
            errs.push((mid[0] - (0.5 * h).exp()).abs());
        }
        let ratio = errs[0] / errs[1];
        assert!(ratio > 20.0, "ratio {ratio}");
    }

    #[test]
    fn dense_derivative_matches_difference() {
        let solver = Dopri5::default();
        let (step, _, _) = solver.single_step(&oscillator, 0.0, [0.0, 1.0], [1.0, 0.0], 0.3);
        for t in [0.0, 0.07, 0.15, 0.29] {
            let d = 1e-6;
            let (a, b) = (step.eval(t + d), step.eval(t - d));
            let dy = step.derivative(t);
            for i in 0..2 {
                assert!((dy[i] - (a[i] - b[i]) / (2.0 * d)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn callback_stops_integration() {
        let solver = Dopri5::default();
        let out = solver
            .integrate(oscillator, 0.0, [0.0, 1.0], 10.0, |s| {
                if s.y1[0] < 0.0 {
                    Control::Stop
                } else {
                    Control::Continue
                }
            })
            .unwrap();
        assert!(out.stopped_early);
        let end = out.trajectory.end().unwrap();
        assert!(end > std::f64::consts::PI && end < 4.0);
    }

    #[test]
    fn empty_interval_rejected() {
        let solver = Dopri5::default();
        assert!(solver
            .integrate(oscillator, 1.0, [0.0, 1.0], 1.0, |_| Control::Continue)
            .is_err());
    }
}
