use proptest::prelude::*;
use sss_core::ode::Dopri5;
use sss_core::profile_ode::{integrate_piece, rhs, PieceSolution};
use sss_core::shooting::{
    classify_tail, inverse_zero_map, shoot_infinity, shoot_origin, to_inverted, zero_map, Side,
    TailVerdict,
};
use sss_core::exponents::{exponent_table, residual_sign_changes, SolveOptions};
use sss_core::{Branch, ProblemParams, SelfSimilarProfile, Sign, SolverSettings, TailKind};
use std::sync::OnceLock;

fn settings() -> SolverSettings {
    SolverSettings::default()
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

fn table(n: u32) -> &'static sss_core::ExponentTable {
    static TABLES: [OnceLock<sss_core::ExponentTable>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    TABLES[n as usize - 1]
        .get_or_init(|| exponent_table(3, n, &settings(), &SolveOptions::default()).unwrap())
}

fn profile(n: u32, alpha: f64, s: Sign) -> SelfSimilarProfile {
    shoot_origin(&ProblemParams::new(n, alpha, s).unwrap(), &settings()).unwrap()
}

/// Largest dense-output defect over five interior points per step, in units
/// of the integrator tolerance.
fn dense_residual(p: &SelfSimilarProfile) -> f64 {
    let solver = Dopri5::new(settings().tolerances);
    let mut worst = 0.0f64;
    for piece in &p.pieces {
        let PieceSolution::Direct(traj) = &piece.solution else { continue };
        let (branch, params) = (piece.branch, p.params);
        let field = move |s: f64, y: &[f64; 2]| [y[1], rhs(s, y[0], y[1], branch, &params)];
        for step in traj.steps() {
            for i in 0..5 {
                worst = worst.max(solver.defect(&field, step, (i as f64 + 0.5) / 5.0));
            }
        }
    }
    worst
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn linear_within_a_branch(alpha in 0.5f64..8.0, c in 0.1f64..10.0, n in 1u32..=3) {
        let params = ProblemParams::new(n, alpha, Sign::Plus).unwrap();
        let s = settings();
        let start = (0.3, 1.0, -0.2);
        let (a, _) = integrate_piece(start, Branch::PositiveRegion, &params, &s, 2.0).unwrap();
        let (b, _) = integrate_piece((0.3, c, -0.2 * c), Branch::PositiveRegion, &params, &s, 2.0).unwrap();
        let end = a.interval.1.min(b.interval.1);
        prop_assert!((a.interval.1 - b.interval.1).abs() < 1e-9);
        for i in 1..=10 {
            let x = 0.3 + (end - 0.3) * i as f64 / 10.0;
            let [fa, _] = a.eval(x).unwrap();
            let [fb, _] = b.eval(x).unwrap();
            prop_assert!((fb - c * fa).abs() <= 1e-9 * c.max(1.0) * (1.0 + fa.abs()));
        }
    }

    #[test]
    fn branch_rescaling_by_sqrt2(alpha in 0.5f64..8.0, n in 1u32..=3) {
        // g(s) = -f(sqrt2 s) maps a positive-branch solution to a negative-branch one.
        let params = ProblemParams::new(n, alpha, Sign::Plus).unwrap();
        let s = settings();
        let r2 = 2f64.sqrt();
        let (f0, fp0, s0) = (1.0, -0.1, 0.4);
        let (pos, _) = integrate_piece((s0, f0, fp0), Branch::PositiveRegion, &params, &s, 3.0).unwrap();
        let (neg, _) = integrate_piece((s0 / r2, -f0, -r2 * fp0), Branch::NegativeRegion, &params, &s, 3.0 / r2)
            .unwrap();
        prop_assert!((neg.interval.1 * r2 - pos.interval.1).abs() < 1e-9);
        for i in 1..10 {
            let x = s0 + (pos.interval.1 - s0) * i as f64 / 10.0;
            let [f, _] = pos.eval(x).unwrap();
            let [g, _] = neg.eval(x / r2).unwrap();
            prop_assert!((g + f).abs() < 1e-9 * (1.0 + f.abs()));
        }
    }

    #[test]
    fn zeros_are_transversal(alpha in 0.3f64..10.0, s in sign(), n in 1u32..=3) {
        let p = profile(n, alpha, s);
        for (z, d) in p.zeros.iter().zip(&p.zero_derivatives) {
            let [f, fp] = p.eval(*z).unwrap();
            // Limited by the spacing of doubles near z once f' is large.
            prop_assert!(f.abs() < 1e-12 + 8.0 * d.abs() * z * f64::EPSILON);
            prop_assert!(d.abs() > 1e-9 && (fp - d).abs() < 1e-8 * (1.0 + d.abs()));
        }
    }

    #[test]
    fn origin_zero_map_decreases(a in 1.0f64..9.0, gap in 0.05f64..1.0, s in sign(), n in 1u32..=3) {
        let (lo, hi) = (a, a + gap);
        let za = zero_map(lo, s, 1, Side::FromOrigin, n, &settings());
        let zb = zero_map(hi, s, 1, Side::FromOrigin, n, &settings());
        if let (Ok(za), Ok(zb)) = (za, zb) {
            prop_assert!(zb.value < za.value);
        }
    }

    #[test]
    fn infinity_zero_map_increases(a in 1.2f64..9.0, gap in 0.05f64..1.0, s in sign()) {
        let za = zero_map(a, s, 1, Side::FromInfinity, 1, &settings()).unwrap();
        let zb = zero_map(a + gap, s, 1, Side::FromInfinity, 1, &settings()).unwrap();
        prop_assert!(zb.value > za.value);
    }

    #[test]
    fn inversion_roundtrip(alpha in 1.2f64..8.0, s in sign(), t in 0.15f64..0.9) {
        // h(t) from the infinity shot equals t^α f(1/t) of its mapped profile.
        let params = ProblemParams::new(1, alpha, s).unwrap();
        let shot = shoot_infinity(&params, s, &settings()).unwrap();
        let Some([h, hp]) = shot.h(t) else { return Ok(()) };
        let [f, fp] = shot.f(1.0 / t).unwrap();
        prop_assert!((h - t.powf(alpha) * f).abs() < 1e-9 * (1.0 + h.abs()));
        let expected = alpha * t.powf(alpha - 1.0) * f - t.powf(alpha - 2.0) * fp;
        prop_assert!((hp - expected).abs() < 1e-8 * (1.0 + hp.abs()));
    }

    #[test]
    fn dense_output_satisfies_equation(alpha in 0.3f64..10.0, s in sign(), n in 1u32..=3) {
        let r = dense_residual(&profile(n, alpha, s));
        prop_assert!(r < 10.0, "residual {r} x tolerance");
    }

    #[test]
    fn monotone_beyond_last_zero(alpha in 0.3f64..10.0, s in sign(), n in 1u32..=3) {
        let p = profile(n, alpha, s);
        let last = p.zeros.last().copied().unwrap_or(p.origin_offset);
        let end = p.end().min(last + 4.0);
        let mut sign_of_fp = 0.0;
        for i in 1..=40 {
            let x = last + (end - last) * i as f64 / 40.0;
            let [f, fp] = p.eval(x).unwrap();
            if f.abs() < 1e-8 || x < last + 0.05 {
                continue;
            }
            // Away from the zero, |f| grows: f and f' share a sign.
            if sign_of_fp == 0.0 {
                sign_of_fp = fp.signum();
            }
            prop_assert_eq!(fp.signum(), sign_of_fp);
            if p.zeros.is_empty() {
                continue;
            }
            prop_assert_eq!(fp.signum(), f.signum());
        }
    }
}

#[test]
fn matched_profiles_have_k_zeros_and_algebraic_tails() {
    for n in 1..=3 {
        for rec in &table(n).records {
            let params = ProblemParams::new(n, rec.alpha, rec.sign).unwrap();
            let p = sss_core::shooting::assemble_matched_profile(&params, rec.k, &settings()).unwrap();
            assert_eq!(p.sign_changes(), rec.k, "N={n} {:?} k={}", rec.sign, rec.k);
            assert_eq!(p.tail.kind, TailKind::Algebraic);
            // h = t^α f(1/t) stays bounded as t → 0.
            let h: Vec<f64> = [1e-2, 1e-3].iter().map(|t| to_inverted(&p, *t).unwrap()[0]).collect();
            assert!(h[0].is_finite() && (h[0] - h[1]).abs() < 1e-2 * h[1].abs().max(1e-12));
        }
    }
}

#[test]
fn between_exponents_tail_is_exponential() {
    // Strictly between α_{k-1} and α_k the profile has k zeros and grows
    // exponentially past the last one.
    for n in 1..=3 {
        let t = table(n);
        for s in [Sign::Plus, Sign::Minus] {
            for k in 2..=3 {
                let mid = 0.5 * (t.alpha(s, k - 1).unwrap() + t.alpha(s, k).unwrap());
                let p = profile(n, mid, s);
                assert_eq!(p.sign_changes(), k, "N={n} {s:?} k={k}");
                assert_eq!(p.tail.kind, TailKind::Exponential, "N={n} {s:?} k={k}");
                let z = *p.zeros.last().unwrap();
                let d = classify_tail(z, s.after_changes(k), &p.params, &settings(), 1e-6).unwrap();
                assert_eq!(d.verdict, TailVerdict::Exponential);
            }
        }
    }
}

#[test]
fn residual_has_one_root_per_bracket() {
    let t = table(1);
    for s in [Sign::Plus, Sign::Minus] {
        for k in 1..=3 {
            let a = t.alpha(s, k).unwrap();
            let changes = residual_sign_changes(k, s, 1, (a - 0.2, a + 0.2), 50, &settings()).unwrap();
            assert_eq!(changes, 1, "{s:?} k={k}");
        }
    }
}

#[test]
fn origin_zero_map_spans_fixed_window() {
    // The first zero sweeps past [0.2, 10] as α runs over a finite bracket.
    for n in 1..=3 {
        for s in [Sign::Plus, Sign::Minus] {
            let near = zero_map(1000.0, s, 1, Side::FromOrigin, n, &settings()).unwrap();
            assert!(near.value < 0.2, "N={n} {s:?}: {}", near.value);
            // The zero escapes like sqrt(log(1/α)), so small α is needed.
            let far = (12..=30)
                .filter_map(|m| zero_map(10f64.powi(-m), s, 1, Side::FromOrigin, n, &settings()).ok())
                .map(|z| z.value)
                .fold(0.0, f64::max);
            assert!(far > 10.0, "N={n} {s:?}: {far}");
            let a = inverse_zero_map(0.2, s, 1, Side::FromOrigin, n, &settings(), 1e-10).unwrap();
            let z = zero_map(a, s, 1, Side::FromOrigin, n, &settings()).unwrap();
            assert!((z.value - 0.2).abs() < 1e-8);
        }
    }
}
