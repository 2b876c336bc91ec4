//! One test per acceptance criterion; each prints a `[PASS]`/`[FAIL]` line
//! (run with `--nocapture` to see them).

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use tdssp::certify::{certify, closed_form_c, max_r, CertifiedR, Family, MaxROptions, Scan};
use tdssp::families::explicit_2s4p;
use tdssp::integrate::step_explicit;
use tdssp::order::{mdrk_residuals, MAX_ORDER_IMEX, MAX_ORDER_TD};
use tdssp::problems::{Linear, Relaxation};
use tdssp::registry::{self, Method, MethodClass, Params};
use tdssp::sweep::{convergence, order_report, tv_sweep, ConvergenceProblem, SweepOptions};
use tdssp::tableau::ButcherTd;
use tdssp::{integrate, lookup, Starting, System};

const K: f64 = std::f64::consts::FRAC_1_SQRT_2;
/// Roundoff allowance for "non-increasing" on order-one functionals.
const ROUNDOFF: f64 = 1e-12;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!("[{}] {id} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

#[test]
fn c1_tv_experiment_reproduction() {
    let start = Instant::now();
    let targets = [("td-ts", 0.6180, 0.001), ("td-2s3p", 1.0400, 0.01), ("td-2s4p", 0.7320, 0.005), ("td-3s5p", 0.7136, 0.005)];
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, want, tol) in targets {
        let r = tv_sweep(&lookup(name).unwrap(), &SweepOptions::default()).unwrap();
        let pass = (r.lambda_obs - want).abs() <= tol;
        ok &= pass;
        detail.push(format!("{name} {:.4} (want {want} +- {tol})", r.lambda_obs));
    }
    let bad = tv_sweep(&lookup("td-2s3p-nonssp").unwrap(), &SweepOptions::default()).unwrap();
    ok &= bad.always_rose;
    detail.push(format!("td-2s3p-nonssp rises at every lambda: {}", bad.always_rose));
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 300.0;
    detail.push(format!("{secs:.1}s"));
    report(1, "tv sweep", ok, &detail.join("; "));
}

#[test]
fn c2_certified_matches_closed_form() {
    let opts = MaxROptions::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for k in [K, 1.0] {
        for (fam, so) in [(Family::Taylor, lookup("td-ts").unwrap()), (Family::TwoStageFourth, lookup("td-2s4p").unwrap())] {
            let r = max_r(&so.explicit().unwrap().so_pair(), Scan::Sd(k), &opts).unwrap().r;
            let c = closed_form_c(fam, k).unwrap();
            ok &= (r - c).abs() <= 1e-4;
            detail.push(format!("{fam:?}(K={k:.4}) max_r={r:.6} closed={c:.6}"));
        }
    }
    let ts = closed_form_c(Family::Taylor, K).unwrap();
    ok &= (ts - 0.618034).abs() <= 1e-6;
    report(2, "certified vs closed form", ok, &detail.join("; "));
}

#[test]
fn c3_sufficiency_bound() {
    let opts = MaxROptions::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for spec in registry::all().into_iter().filter(|s| s.class() == MethodClass::ExplicitTd && s.is_ssp()) {
        let c = certify(&spec, &opts).unwrap().certified_r.as_f64();
        let obs = tv_sweep(&spec, &SweepOptions::default()).unwrap().lambda_obs;
        ok &= obs >= c - 0.01;
        detail.push(format!("{} obs={obs:.4} cert={c:.4}", spec.name));
    }
    report(3, "lambda_obs >= certified - 0.01", ok, &detail.join("; "));
}

fn rk4_with_zero_adot() -> ButcherTd {
    ButcherTd::from_rows(
        &[&[0.0, 0.0, 0.0, 0.0], &[0.5, 0.0, 0.0, 0.0], &[0.0, 0.5, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0]],
        &[&[0.0; 4], &[0.0; 4], &[0.0; 4], &[0.0; 4]],
        &[1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
        &[0.0; 4],
    )
    .unwrap()
}

#[test]
fn c4_order_condition_suite() {
    let mut ok = true;
    let mut detail = Vec::new();
    for spec in registry::all() {
        let at = order_report(&spec, spec.order).unwrap();
        let max = if matches!(spec.method, Method::ImexRk(_) | Method::ImexGlm(_)) { MAX_ORDER_IMEX } else { MAX_ORDER_TD };
        let above = (spec.order < max).then(|| order_report(&spec, spec.order + 1).unwrap());
        let fails_above = above.as_ref().is_none_or(|r| !r.satisfied);
        ok &= at.satisfied && fails_above;
        detail.push(format!(
            "{} p{} max={:.1e}{}",
            spec.name,
            spec.order,
            at.max_abs_residual,
            above.map_or(String::new(), |r| format!(" p{}={:.1e}", r.p, r.max_at_order(r.p)))
        ));
    }
    let rk4 = mdrk_residuals(&rk4_with_zero_adot(), 4).unwrap();
    ok &= rk4.satisfied;
    detail.push(format!("rk4 p4 max={:.1e}", rk4.max_abs_residual));
    report(4, "order conditions", ok, &detail.join("; "));
}

#[test]
fn c5_unconditional_implicit() {
    let mut ok = true;
    let mut worst = f64::NEG_INFINITY;
    for name in ["nd-implicit-p2", "nd-implicit-p3", "nd-implicit-p4"] {
        let spec = lookup(name).unwrap();
        ok &= certify(&spec, &MaxROptions::default()).unwrap().certified_r == CertifiedR::Unconditional;
        for eps in [1.0, 1e-6] {
            let sys = Relaxation::toy(64, eps);
            for ratio in [1.0, 10.0, 1000.0] {
                let (_, rep) = integrate(&spec, &sys, &sys.initial(), ratio * sys.dt_fe(), 100, Starting::SingleStep).unwrap();
                worst = worst.max(rep.max_rise_step);
            }
        }
    }
    ok &= worst <= ROUNDOFF;
    report(5, "unconditional implicit", ok, &format!("worst per-step rise {worst:.2e}, certificates unconditional"));
}

#[test]
fn c6_imex_stiffness_independence() {
    let names = ["imex-rk-p2", "imex-rk-p3", "imex-glm-1step-p2", "imex-glm-2step-p2", "imex-glm-kstep-p2", "imex-glm-2step-p3"];
    let sys = Relaxation::pde(200, 1e-8);
    let mut ok = true;
    let mut detail = Vec::new();
    for name in names {
        let spec = lookup(name).unwrap();
        let r = certify(&spec, &MaxROptions::default()).unwrap().certified_r.as_f64();
        let (_, rep) = integrate(&spec, &sys, &sys.initial(), 0.99 * r * sys.dt_fe(), 100, Starting::SingleStep).unwrap();
        let rise = rep.functional[rep.method_from..].windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        ok &= rise <= ROUNDOFF;
        detail.push(format!("{name} r={r:.4} rise={rise:.1e}"));
    }
    report(6, "imex stiffness independence", ok, &detail.join("; "));
}

#[test]
fn c7_temporal_convergence() {
    let dts = [0.05, 0.025, 0.0125, 0.00625];
    let mut ok = true;
    let mut detail = Vec::new();
    for spec in registry::all() {
        let rows = convergence(&spec, ConvergenceProblem::for_method(&spec), &dts).unwrap();
        let p = rows.last().unwrap().observed_order.unwrap();
        ok &= (p - spec.order as f64).abs() <= 0.2;
        detail.push(format!("{} {p:.2}/{}", spec.name, spec.order));
    }
    report(7, "temporal convergence", ok, &detail.join("; "));
}

/// Dense block solve of the stage system `(I - dt A (x) L - dt^2 Adot (x) L^2) Y = e (x) u`.
fn linear_oracle(m: &ButcherTd, l: &DMatrix<f64>, u: &DVector<f64>, dt: f64) -> DVector<f64> {
    let (s, n) = (m.stages(), u.len());
    let l2 = l * l;
    let mut big = DMatrix::identity(s * n, s * n);
    for i in 0..s {
        for j in 0..s {
            let blk = dt * m.a()[(i, j)] * l + dt * dt * m.a_dot()[(i, j)] * &l2;
            let mut view = big.view_mut((i * n, j * n), (n, n));
            view -= blk;
        }
    }
    let rhs = DVector::from_fn(s * n, |i, _| u[i % n]);
    let y = big.lu().solve(&rhs).unwrap();
    let mut out = u.clone();
    for j in 0..s {
        let yj = y.rows(j * n, n);
        out += dt * m.b()[j] * l * yj + dt * dt * m.b_dot()[j] * &l2 * yj;
    }
    out
}

#[test]
fn c8_linear_oracle() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for spec in registry::all().into_iter().filter(|s| s.class() == MethodClass::ExplicitTd) {
        let m = spec.explicit().unwrap();
        for _ in 0..10 {
            let l = DMatrix::from_fn(5, 5, |_, _| rng.random_range(-1.0..1.0));
            let u = DVector::from_fn(5, |_, _| rng.random_range(-1.0..1.0));
            let dt = 0.5 / l.norm();
            let got = step_explicit(m, &Linear::new(l.clone()), &u, dt).unwrap();
            let want = linear_oracle(m, &l, &u, dt);
            worst = worst.max((got - &want).amax() / want.amax());
        }
    }
    report(8, "linear oracle", worst <= 1e-12, &format!("worst relative error {worst:.2e}"));
}

#[test]
fn c9_glm_window_bound() {
    let sys = Relaxation::pde(200, 1e-8);
    let mut ok = true;
    let mut detail = Vec::new();
    let kstep = |k| registry::lookup_with("imex-glm-kstep-p2", &Params { steps: k, ..Params::default() }).unwrap();
    let specs = [lookup("imex-glm-1step-p2").unwrap(), lookup("imex-glm-2step-p2").unwrap(), kstep(3), kstep(5), lookup("imex-glm-2step-p3").unwrap()];
    for spec in specs {
        let r = certify(&spec, &MaxROptions::default()).unwrap().certified_r.as_f64();
        let (_, rep) = integrate(&spec, &sys, &sys.initial(), 0.99 * r * sys.dt_fe(), 200, Starting::SingleStep).unwrap();
        let k = spec.steps();
        let rise = rep.max_rise_over_window(k);
        ok &= rise <= ROUNDOFF;
        detail.push(format!("{}(k={k}) rise={rise:.1e}", spec.name));
    }
    report(9, "glm window bound", ok, &detail.join("; "));
}

#[test]
fn explicit_2s4p_matches_taylor_polynomial() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(4);
    let l = DMatrix::from_fn(5, 5, |_, _| rng.random_range(-1.0..1.0));
    let u = DVector::from_fn(5, |_, _| rng.random_range(-1.0..1.0));
    let dt = 0.9 / l.norm();
    let z = dt * &l;
    let z2 = &z * &z;
    let z3 = &z2 * &z;
    let poly = DMatrix::identity(5, 5) + &z + &z2 / 2.0 + &z3 / 6.0 + &z3 * &z / 24.0;
    let got = step_explicit(&explicit_2s4p(), &Linear::new(l), &u, dt).unwrap();
    assert!((got - poly * u).amax() < 1e-13);
}
