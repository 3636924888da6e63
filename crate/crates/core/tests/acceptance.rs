//! The ten acceptance criteria, each reported as one PASS/FAIL line.
//! Exits nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::Ratio;

use genusmaps::brute_oracle::enumerate_gluings;
use genusmaps::cli::{asymptotics_report, near_diagonal_suite, oracle_report};
use genusmaps::exact_enum::CountTable;
use genusmaps::hyper_constants::{
    d_mean_inv_degree, f_at_half, f_at_zero, f_exponent_quadrature, lambda_of_h, lambda_of_theta,
    monotonicity_inequality, near_diagonal_bounds, type2_bridge, HyperParams, LAMBDA_C,
};
use genusmaps::markov_props::{complete_monotonicity, hankel_moments, peeling_check, MixtureSpec};
use genusmaps::psht_sim::{estimate_drift, estimate_inverse_degree, PeelingLaw, DEFAULT_SEED, DEFAULT_STEP_BUDGET};

/// Published value of d at h = 1/8, as stated.
const D_AT_EIGHTH: f64 = 0.1558064;
const LADDER: [usize; 4] = [64, 128, 256, 512];
/// Empirical bound on the ratio error at n = 512.
const RATIO_TOL: f64 = 0.05;

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn close(name: &str, got: f64, want: f64, tol: f64) -> Check {
    ensure(
        (got - want).abs() < tol,
        format!("{name}: {got} vs {want} (tol {tol:e})"),
    )
}

fn within_time(started: Instant, limit: Duration, what: &str) -> Check {
    let t = started.elapsed();
    ensure(t < limit, format!("{what} took {:.1}s (limit {}s)", t.as_secs_f64(), limit.as_secs()))
}

fn oracle_equivalence() -> Check {
    let started = Instant::now();
    let rows = oracle_report().map_err(|e| e.to_string())?;
    within_time(started, Duration::from_secs(120), "oracle n<=3")?;
    if let Some(bad) = rows.iter().find(|r| !r.agree) {
        return Err(format!("n={} g={}: oracle {} vs recurrence {}", bad.n, bad.g, bad.oracle, bad.recurrence));
    }
    let one = enumerate_gluings(1).map_err(|e| e.to_string())?;
    ensure(one.involutions == 15, format!("n=1 involutions {}", one.involutions))?;
    let t1: Vec<_> = rows.iter().filter(|r| r.n == 1).map(|r| r.oracle.clone()).collect();
    ensure(
        t1 == [BigUint::from(4u32), BigUint::from(1u32)],
        format!("n=1 counts {t1:?}"),
    )?;
    Ok(format!(
        "{} (n,g) pairs agree, n=1: 15 involutions -> tau 4, 1, {:.1}s",
        rows.len(),
        started.elapsed().as_secs_f64()
    ))
}

fn closed_form_anchors() -> Check {
    let e = |r: genusmaps::Result<f64>| r.map_err(|e| e.to_string());
    close("d(lambda_c)", e(d_mean_inv_degree(LAMBDA_C))?, 1.0 / 6.0, 1e-12)?;
    close("lambda(0)", e(lambda_of_theta(0.0))?, 1.0 / (12.0 * 3f64.sqrt()), 1e-12)?;
    let kappa = HyperParams::from_h(0.25).map_err(|e| e.to_string())?.kappa;
    close("kappa(1/4)", kappa, 2.0 / 27.0, 1e-12)?;
    let log12r3 = (12.0 * 3f64.sqrt()).ln();
    let log6e = (6.0 / std::f64::consts::E).ln();
    close("f_at_zero", f_at_zero(), log12r3, 1e-12)?;
    close("f_at_half", f_at_half(), log6e, 1e-12)?;
    let mut worst = 0f64;
    for (th, want) in [(0.0, log12r3), (1e-9, log12r3), (0.5 - 1e-9, log6e), (0.5, log6e)] {
        let f = e(f_exponent_quadrature(th, 1e-12))?;
        close(&format!("quadrature f({th})"), f, want, 1e-6)?;
        worst = worst.max((f - want).abs());
    }
    Ok(format!("exact anchors to 1e-12, quadrature endpoints within {worst:.1e}"))
}

fn bridge_identity() -> Check {
    let mut worst = 0f64;
    for i in 1..=200 {
        let l = LAMBDA_C * i as f64 / 200.0;
        let b = type2_bridge(l).map_err(|e| e.to_string())?;
        worst = worst.max(b.residual);
    }
    ensure(worst < 1e-10, format!("max bridge residual {worst:e} on 200 points"))?;
    let l = lambda_of_h(0.125).map_err(|e| e.to_string())?;
    let b = type2_bridge(l).map_err(|e| e.to_string())?;
    close("kappa", b.kappa, 0.064, 1e-12)?;
    close("alpha", b.alpha, 0.8, 1e-12)?;
    close("E|A|", b.mean_block_size, 0.2, 1e-12)?;
    close("d", b.d, D_AT_EIGHTH, 1e-6)?;
    Ok(format!("max residual {worst:.2e}; h=1/8: kappa 0.064, alpha 0.8, E|A| 0.2, d {:.10}", b.d))
}

fn peeling_residual() -> Check {
    let mut parts = Vec::new();
    for l in [0.01, 0.03, 0.99 * LAMBDA_C] {
        let c = peeling_check(l, 10, 1e-6).map_err(|e| e.to_string())?;
        let j = c.residuals[0].j_max;
        let line = format!("lambda {l:.6}: max {:.1e}, doubling change {:.1e}, j_max {j}", c.max_residual, c.max_doubling_change);
        ensure(c.passed, line.clone())?;
        parts.push(line);
    }
    Ok(parts.join("; "))
}

fn monotonicity_suite() -> Check {
    let mut prev = 0.0;
    for i in 1..=1000 {
        let d = d_mean_inv_degree(LAMBDA_C * i as f64 / 1000.0).map_err(|e| e.to_string())?;
        ensure(d > prev, format!("d not increasing at grid point {i}"))?;
        prev = d;
    }
    for i in 1..=10_000 {
        let x = i as f64 / 10_001.0;
        ensure(monotonicity_inequality(x), format!("inequality fails at x={x}"))?;
    }
    let atoms: Vec<f64> = (1..=20).map(|i| LAMBDA_C * i as f64 / 20.0).collect();
    let mut mixtures = 0;
    let mut worst = f64::INFINITY;
    let mut run = |spec: MixtureSpec| -> Check {
        let r = complete_monotonicity(&spec, 5, 10, 30).map_err(|e| e.to_string())?;
        worst = worst.min(r.min_relative);
        ensure(r.holds, format!("{:?} fails at (p,k,v) = {:?}", spec.atoms(), r.worst))?;
        if spec.atoms().len() == 2 {
            let h = hankel_moments(&spec).map_err(|e| e.to_string())?;
            ensure(h.positive_semidefinite && h.rank == 2, format!("Hankel {:?}", h.eigenvalues))?;
        }
        mixtures += 1;
        Ok(String::new())
    };
    for &a in &atoms {
        run(MixtureSpec::single(a).map_err(|e| e.to_string())?)?;
    }
    for (i, &a) in atoms.iter().enumerate().step_by(3) {
        for &b in atoms[i + 1..].iter().step_by(4) {
            for w in [0.5, 0.2] {
                run(MixtureSpec::new(vec![(a, w), (b, 1.0 - w)]).map_err(|e| e.to_string())?)?;
            }
        }
    }
    run("0.01:0.5,0.04:0.5".parse().map_err(|e: genusmaps::Error| e.to_string())?)?;
    Ok(format!(
        "d increasing on 1000 points, inequality on 10^4 points, {mixtures} mixtures nonnegative (min relative difference {worst:.3e})"
    ))
}

fn drift_check() -> Check {
    let started = Instant::now();
    let law = PeelingLaw::new(lambda_of_h(0.125).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let d = estimate_drift(&law, 10_000, 1000, DEFAULT_SEED).map_err(|e| e.to_string())?;
    within_time(started, Duration::from_secs(300), "drift")?;
    let line = format!(
        "P/k {:.6} (target {}, z {:+.2}), V/k {:.6} (target {}, z {:+.2}), {:.1}s",
        d.perimeter.mean,
        d.perimeter.target,
        d.perimeter.z_score,
        d.volume.mean,
        d.volume.target,
        d.volume.z_score,
        started.elapsed().as_secs_f64()
    );
    close("P target", d.perimeter.target, 0.5, 1e-12)?;
    close("V target", d.volume.target, 1.0, 1e-12)?;
    ensure(d.perimeter.within(3.0) && d.volume.within(3.0), line)
}

fn degree_check() -> Check {
    let started = Instant::now();
    let law = PeelingLaw::new(lambda_of_h(0.125).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let r = estimate_inverse_degree(&law, 100_000, DEFAULT_SEED, DEFAULT_STEP_BUDGET)
        .map_err(|e| e.to_string())?;
    within_time(started, Duration::from_secs(900), "degree")?;
    let z = (r.mean - D_AT_EIGHTH) / r.std_error;
    let line = format!(
        "mean 1/deg {:.6} +- {:.1e} vs {D_AT_EIGHTH} (z {z:+.2}), {} excluded, {:.1}s",
        r.mean,
        r.std_error,
        r.excluded,
        started.elapsed().as_secs_f64()
    );
    ensure(z.abs() <= 3.0 && r.excluded == 0, line)
}

fn ratio_convergence(table: &CountTable) -> Check {
    let r = asymptotics_report(table, 0.1, &LADDER).map_err(|e| e.to_string())?;
    let errs: Vec<String> = r.points.iter().map(|p| format!("{:.2e}", p.ratio_error)).collect();
    let last = r.points.last().unwrap().ratio_error;
    ensure(
        r.ratio_nonincreasing && last < RATIO_TOL,
        format!("|ratio - lambda(0.1)| over n={LADDER:?}: {}", errs.join(", ")),
    )
}

fn exponent_trend(table: &CountTable) -> Check {
    let mut parts = Vec::new();
    let mut ok = true;
    for theta in [0.0, 0.1, 0.25] {
        let r = asymptotics_report(table, theta, &LADDER).map_err(|e| e.to_string())?;
        ok &= r.dev_nonincreasing;
        let devs: Vec<String> = r.points.iter().map(|p| format!("{:.4}", p.dev.abs())).collect();
        parts.push(format!("theta {theta}: {}", devs.join(" > ")));
    }
    ensure(ok, parts.join("; "))
}

fn near_diagonal() -> Check {
    let rows = near_diagonal_suite(6).map_err(|e| e.to_string())?;
    let t = CountTable::build(3, None).map_err(|e| e.to_string())?;
    let anchor = near_diagonal_bounds(&t, 1, Ratio::from_integer(1)).map_err(|e| e.to_string())?;
    ensure(anchor.unicellular_count == BigUint::from(2310u32), format!("g=1 count {}", anchor.unicellular_count))?;
    if let Some(bad) = rows.iter().find(|r| r.sandwich_holds() != Some(true)) {
        return Err(format!("g={} eps={}: {:?}", bad.g, bad.eps, bad));
    }
    let gap = rows
        .iter()
        .map(|r| r.upper_bound_log - r.tau_log.unwrap())
        .fold(f64::INFINITY, f64::min);
    Ok(format!("{} (g, eps) pairs sandwiched, min log gap to upper bound {gap:.3}, g=1 count 2310", rows.len()))
}

fn main() {
    let mut failures = 0;
    let mut report = |n: usize, name: &str, f: &dyn Fn() -> Check| {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n:>2} {name}: PASS [{secs:.1}s] {detail}"),
            Err(detail) => {
                failures += 1;
                println!("criterion {n:>2} {name}: FAIL [{secs:.1}s] {detail}");
            }
        }
    };

    report(1, "oracle equivalence", &oracle_equivalence);
    report(2, "closed-form anchors", &closed_form_anchors);
    report(3, "bridge identity", &bridge_identity);
    report(4, "peeling-equation residual", &peeling_residual);
    report(5, "monotonicity suite", &monotonicity_suite);
    report(6, "Monte Carlo drift", &drift_check);
    report(7, "Monte Carlo degree", &degree_check);

    let started = Instant::now();
    let table = CountTable::build(512, Some(128));
    let build = started.elapsed().as_secs_f64();
    match &table {
        Ok(t) => {
            println!("(exact table n <= 512, genus <= 128 built in {build:.1}s)");
            report(8, "ratio convergence", &|| ratio_convergence(t));
            report(9, "growth exponent trend", &|| exponent_trend(t));
        }
        Err(e) => {
            report(8, "ratio convergence", &|| Err(format!("table: {e}")));
            report(9, "growth exponent trend", &|| Err(format!("table: {e}")));
        }
    }
    report(10, "near-diagonal sandwich", &near_diagonal);

    if failures > 0 {
        println!("acceptance: {failures} of 10 criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all 10 criteria passed");
}
