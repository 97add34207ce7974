//! Acceptance suite: one PASS/FAIL line per criterion, aggregated over
//! N = 1, 2, 3. Run with `cargo test -p sss-core --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use sss_core::report::Report;
use sss_core::verify::{self, VerifyConfig};
use sss_core::{ExponentTable, Result, SelfSimilarProfile};

const DIMENSIONS: [u32; 3] = [1, 2, 3];

struct Context {
    cfg: VerifyConfig,
    table: ExponentTable,
    profiles: Vec<SelfSimilarProfile>,
}

type Criterion = (&'static str, fn(&Context) -> Result<Report>);

const CRITERIA: [Criterion; 10] = [
    ("calibration identities", |c| verify::calibration_identities(&c.cfg)),
    ("heat-polynomial zeros", |c| verify::heat_polynomial_dots(&c.cfg)),
    ("first exponents bracket 2", |c| verify::first_exponents(&c.table)),
    ("exponent ordering and interlacing", |c| verify::ordering(&c.table)),
    ("origin and infinity zeros coincide", |c| verify::zero_identity(&c.table)),
    ("sqrt(2) duality", |c| verify::duality(&c.cfg)),
    ("spectral cross-oracle", |c| verify::spectral_oracle(&c.table, &c.profiles, &c.cfg)),
    ("Appell transform", |c| verify::appell_oracle(&c.table, &c.profiles, &c.cfg)),
    ("finite-difference evolution", |c| verify::pde_oracle(&c.table, &c.cfg)),
    ("zero-map monotonicity", |c| verify::monotonicity(&c.cfg)),
];

fn context(n: u32) -> Result<Context> {
    let cfg = VerifyConfig::new(n);
    let table = cfg.table()?;
    let profiles = verify::matched_profiles(&table, &cfg.settings)?;
    Ok(Context { cfg, table, profiles })
}

fn main() -> ExitCode {
    let start = Instant::now();
    let contexts: Vec<(u32, Result<Context>)> = DIMENSIONS.iter().map(|&n| (n, context(n))).collect();
    let mut failed = 0;
    for (i, (title, run)) in CRITERIA.iter().enumerate() {
        let clock = Instant::now();
        let mut checks = 0;
        let mut problems = Vec::new();
        for (n, ctx) in &contexts {
            let outcome = ctx.as_ref().map_err(|e| e.to_string()).and_then(|c| run(c).map_err(|e| e.to_string()));
            match outcome {
                Ok(report) => {
                    checks += report.checks.len();
                    problems.extend(report.failures().map(|c| format!("N={n}: {c}")));
                }
                Err(e) => problems.push(format!("N={n}: error: {e}")),
            }
        }
        let status = if problems.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "{status} criterion {}: {title} (N=1,2,3; {checks} checks, {} failed; {:.1} s)",
            i + 1,
            problems.len(),
            clock.elapsed().as_secs_f64()
        );
        for p in &problems {
            println!("    {p}");
        }
        if !problems.is_empty() {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1} s",
        CRITERIA.len() - failed,
        CRITERIA.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
