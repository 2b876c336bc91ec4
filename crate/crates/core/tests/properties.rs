use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use tdssp::certify::{feasible_sd, feasible_ts, max_r, MaxROptions, Scan, ENTRY_TOL};
use tdssp::families::{explicit_2s3p, explicit_3s5p, ts_3s4p};
use tdssp::integrate::{step, step_explicit};
use tdssp::order::mdrk_residuals;
use tdssp::problems::{
    centered_fdot, squared_upwind_fdot, step_ic, total_variation, upwind_f, Advection, FdotVariant, Relaxation,
};
use tdssp::registry::{self, Base, Method};
use tdssp::tableau::ButcherTd;
use tdssp::{integrate, Starting, System};

fn grid(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn forward_euler_upwind_is_tvd(u in grid(40)) {
        let dx = 1.0 / 40.0;
        let f = upwind_f(&u, dx);
        let v: Vec<f64> = u.iter().zip(&f).map(|(a, b)| a + dx * b).collect();
        prop_assert!(total_variation(&v) <= total_variation(&u) + 1e-12);
    }

    #[test]
    fn centered_second_derivative_step_is_tvd(u in grid(40)) {
        let dx = 1.0 / 40.0;
        let dt = std::f64::consts::FRAC_1_SQRT_2 * dx;
        let f = centered_fdot(&u, dx);
        let v: Vec<f64> = u.iter().zip(&f).map(|(a, b)| a + dt * dt * b).collect();
        prop_assert!(total_variation(&v) <= total_variation(&u) + 1e-12);
    }

    #[test]
    fn squared_upwind_is_upwind_twice(u in grid(30)) {
        let dx = 1.0 / 30.0;
        let twice = upwind_f(&upwind_f(&u, dx), dx);
        let direct = squared_upwind_fdot(&u, dx);
        for (a, b) in twice.iter().zip(&direct) {
            prop_assert!((a - b).abs() <= 1e-14 * (dx * dx).recip());
        }
    }

    #[test]
    fn total_variation_is_homogeneous(u in grid(25), alpha in -5.0f64..5.0) {
        let v: Vec<f64> = u.iter().map(|x| alpha * x).collect();
        prop_assert!((total_variation(&v) - alpha.abs() * total_variation(&u)).abs() <= 1e-12 * (1.0 + total_variation(&v)));
    }

    #[test]
    fn relaxation_stage_residual(a in grid(16), gamma in 0.0f64..10.0, gamma_dot in -10.0f64..0.0, eps in 1e-3f64..1.0) {
        let sys = Relaxation::pde(8, eps);
        let a = DVector::from_vec(a);
        let u = sys.stage_solve(&a, gamma, gamma_dot).unwrap();
        let res = (&u - &a - gamma * sys.f_im(&u) - gamma_dot * sys.fdot_im(&u)).amax();
        prop_assert!(res < 1e-13 * sys.stage_scale(gamma, gamma_dot), "{res}");
    }

    #[test]
    fn relaxation_matches_dense_solve(a in grid(8), mu in 0.0f64..1e3) {
        let sys = Relaxation::toy(4, 1.0);
        let a = DVector::from_vec(a);
        let g = DMatrix::from_fn(8, 8, |i, j| {
            if i % 4 == j % 4 { 0.5 } else { 0.0 }
        });
        let lhs = DMatrix::identity(8, 8) - mu * (&g - DMatrix::identity(8, 8));
        let dense = lhs.lu().solve(&a).unwrap();
        let closed = sys.solve(&a, mu, 0.0);
        prop_assert!((dense - closed).amax() <= 1e-13 * (1.0 + a.amax()));
    }

    #[test]
    fn projection_is_idempotent(a in grid(12)) {
        let sys = Relaxation::toy(6, 1.0);
        let a = DVector::from_vec(a);
        let g = sys.project(&a);
        prop_assert!((sys.project(&g) - g).amax() <= 1e-15);
    }

    #[test]
    fn two_stage_third_family(k in 0.3f64..2.0) {
        let c = explicit_2s3p(k).unwrap();
        prop_assert!(mdrk_residuals(&c.tableau, 3).unwrap().satisfied);
        let so = c.tableau.so_pair();
        prop_assert!(feasible_sd(&so, k, 0.999 * c.r, ENTRY_TOL).unwrap().feasible);
        let m = max_r(&so, Scan::Sd(k), &MaxROptions::default()).unwrap();
        prop_assert!((m.r - c.r).abs() < 1e-6, "{} vs {}", m.r, c.r);
    }

    #[test]
    fn three_stage_fifth_family(k in 0.4f64..1.2) {
        let c = explicit_3s5p(k).unwrap();
        let rep = mdrk_residuals(&c.tableau, 5).unwrap().with_tol(1e-10);
        prop_assert!(rep.satisfied, "{}", rep.max_abs_residual);
        prop_assert!(feasible_sd(&c.tableau.so_pair(), k, 0.999 * c.r, ENTRY_TOL).unwrap().feasible);
    }

    #[test]
    fn taylor_series_family(kappa in 1.0f64..4.0) {
        let t = ts_3s4p(kappa).unwrap();
        prop_assert!(mdrk_residuals(&t, 4).unwrap().satisfied);
        prop_assert!(feasible_ts(&t.so_pair(), kappa, 0.99, ENTRY_TOL).unwrap().feasible);
    }

    #[test]
    fn tree_conditions_match_written_formulas(
        a in prop::collection::vec(-1.0f64..1.0, 16),
        ad in prop::collection::vec(-1.0f64..1.0, 16),
        b in prop::collection::vec(-1.0f64..1.0, 4),
        bd in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let m = ButcherTd::new(
            DMatrix::from_row_slice(4, 4, &a),
            DMatrix::from_row_slice(4, 4, &ad),
            DVector::from_vec(b),
            DVector::from_vec(bd),
        ).unwrap();
        let written = written_conditions(&m);
        for p in 1..=5 {
            let rep = mdrk_residuals(&m, p).unwrap();
            for r in rep.at_order(p) {
                let w = written.iter().find(|(l, _)| *l == r.label).map(|(_, v)| *v).unwrap();
                prop_assert!((r.value - w.abs()).abs() < 1e-12 * (1.0 + w.abs()), "{}: {} vs {}", r.label, r.value, w);
            }
        }
    }
}

/// Conditions through order five written out in matrix-vector form.
fn written_conditions(m: &ButcherTd) -> Vec<(String, f64)> {
    let (a, ad, b, bd) = (m.a(), m.a_dot(), m.b(), m.b_dot());
    let e = DVector::from_element(4, 1.0);
    let c = a * &e;
    let cd = ad * &e;
    let ac = a * &c;
    let pw = |v: &DVector<f64>, k: i32| v.map(|x| x.powi(k));
    let c2 = pw(&c, 2);
    let c3 = pw(&c, 3);
    let d = |x: &DVector<f64>, y: &DVector<f64>| x.dot(y);
    let h = |x: &DVector<f64>, y: &DVector<f64>| x.component_mul(y);
    let aac = a * &ac;
    let list = [
        ("A.p1.1", d(b, &e) - 1.0),
        ("A.p2.1", d(b, &c) + d(bd, &e) - 0.5),
        ("A.p3.1", d(b, &c2) + 2.0 * d(bd, &c) - 1.0 / 3.0),
        ("A.p3.2", d(b, &ac) + d(b, &cd) + d(bd, &c) - 1.0 / 6.0),
        ("A.p4.1", d(b, &c3) + 3.0 * d(bd, &c2) - 0.25),
        ("A.p4.2", d(b, &h(&c, &ac)) + d(b, &h(&c, &cd)) + d(bd, &c2) + d(bd, &ac) + d(bd, &cd) - 1.0 / 8.0),
        ("A.p4.3", d(b, &(a * &c2)) + 2.0 * d(b, &(ad * &c)) + d(bd, &c2) - 1.0 / 12.0),
        ("A.p4.4", d(b, &aac) + d(b, &(a * &cd)) + d(b, &(ad * &c)) + d(bd, &ac) + d(bd, &cd) - 1.0 / 24.0),
        ("A.p5.1", d(b, &pw(&c, 4)) + 4.0 * d(bd, &c3) - 0.2),
        (
            "A.p5.2",
            d(b, &h(&c2, &ac)) + d(b, &h(&c2, &cd)) + d(bd, &c3) + 2.0 * d(bd, &h(&c, &ac)) + 2.0 * d(bd, &h(&c, &cd)) - 0.1,
        ),
        (
            "A.p5.3",
            d(b, &h(&c, &(a * &c2))) + 2.0 * d(b, &h(&c, &(ad * &c))) + d(bd, &c3) + d(bd, &(a * &c2)) + 2.0 * d(bd, &(ad * &c))
                - 1.0 / 15.0,
        ),
        (
            "A.p5.4",
            d(b, &h(&c, &aac)) + d(b, &h(&c, &(a * &cd))) + d(b, &h(&c, &(ad * &c))) + d(bd, &h(&c, &ac)) + d(bd, &h(&c, &cd))
                + d(bd, &aac)
                + d(bd, &(a * &cd))
                + d(bd, &(ad * &c))
                - 1.0 / 30.0,
        ),
        ("A.p5.5", d(b, &h(&ac, &ac)) + 2.0 * d(b, &h(&cd, &ac)) + d(b, &h(&cd, &cd)) + 2.0 * d(bd, &h(&c, &ac)) + 2.0 * d(bd, &h(&c, &cd)) - 0.05),
        ("A.p5.6", d(b, &(a * &c3)) + 3.0 * d(b, &(ad * &c2)) + d(bd, &c3) - 0.05),
        (
            "A.p5.7",
            d(b, &(a * h(&c, &ac))) + d(b, &(a * h(&c, &cd))) + d(b, &(ad * &c2)) + d(b, &(ad * &ac)) + d(b, &(ad * &cd))
                + d(bd, &h(&c, &ac))
                + d(bd, &h(&c, &cd))
                - 1.0 / 40.0,
        ),
        ("A.p5.8", d(b, &(a * (a * &c2))) + 2.0 * d(b, &(a * (ad * &c))) + d(b, &(ad * &c2)) + d(bd, &(a * &c2)) + 2.0 * d(bd, &(ad * &c)) - 1.0 / 60.0),
        (
            "A.p5.9",
            d(b, &(a * &aac)) + d(b, &(a * (a * &cd))) + d(b, &(a * (ad * &c))) + d(b, &(ad * &ac)) + d(b, &(ad * &cd))
                + d(bd, &aac)
                + d(bd, &(a * &cd))
                + d(bd, &(ad * &c))
                - 1.0 / 120.0,
        ),
    ];
    list.into_iter().map(|(l, v)| (l.to_string(), v)).collect()
}

#[test]
fn forward_euler_bound_is_sharp() {
    let fe = ButcherTd::from_rows(&[&[0.0]], &[&[0.0]], &[1.0], &[0.0]).unwrap();
    let sys = Advection::new(200, FdotVariant::Centered);
    let mut u = step_ic(200);
    let tv0 = total_variation(u.as_slice());
    let mut rose = false;
    for _ in 0..50 {
        u = step_explicit(&fe, &sys, &u, 1.01 * sys.dx).unwrap();
        rose |= total_variation(u.as_slice()) > tv0 + 1e-10;
    }
    assert!(rose);
}

#[test]
fn integrate_is_bitwise_reproducible() {
    for name in ["td-3s5p", "imex-glm-2step-p3"] {
        let spec = registry::lookup(name).unwrap();
        let sys = Relaxation::pde(64, 1e-6);
        let run = || match spec.method {
            Method::Explicit(_) => {
                let adv = Advection::new(64, FdotVariant::Centered);
                integrate(&spec, &adv, &step_ic(64), 0.5 * adv.dx, 30, Starting::SingleStep).unwrap().0
            }
            _ => integrate(&spec, &sys, &sys.initial(), 0.5 * sys.dt_fe(), 30, Starting::SingleStep).unwrap().0,
        };
        let (x, y) = (run(), run());
        assert!(x.iter().zip(y.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}

#[test]
fn one_step_integration_equals_step() {
    let sys = Relaxation::pde(32, 1e-3);
    let u0 = sys.initial();
    for spec in registry::all().into_iter().filter(|s| s.steps() == 1 && !matches!(s.method, Method::Explicit(_))) {
        let (u, rep) = integrate(&spec, &sys, &u0, 0.01, 1, Starting::SingleStep).unwrap();
        assert_eq!(u, step(&spec.method, &sys, &u0, 0.01).unwrap(), "{}", spec.name);
        assert_eq!(rep.functional.len(), 2);
    }
}

#[test]
fn sd_methods_are_tvd_below_certified_step() {
    for spec in registry::all().into_iter().filter(|s| matches!(s.base, Base::SecondDerivative { .. })) {
        let c = spec.ssp_coefficient.unwrap();
        let sys = Advection::new(400, FdotVariant::Centered);
        let (_, rep) = integrate(&spec, &sys, &step_ic(400), 0.99 * c * sys.dx, 50, Starting::SingleStep).unwrap();
        assert!(rep.max_rise_step <= 1e-10, "{}: {}", spec.name, rep.max_rise_step);
    }
}

#[test]
fn nonssp_rises_at_small_lambda() {
    let spec = registry::lookup("td-2s3p-nonssp").unwrap();
    let sys = Advection::new(1600, FdotVariant::Centered);
    let (_, rep) = integrate(&spec, &sys, &step_ic(1600), 0.05 * sys.dx, 50, Starting::SingleStep).unwrap();
    assert!(rep.max_rise_step > 0.0);
}

#[test]
fn kstep_glm_window_bound_at_half_fe() {
    let spec = registry::lookup("imex-glm-kstep-p2").unwrap();
    let sys = Relaxation::toy(64, 1.0);
    let (_, rep) = integrate(&spec, &sys, &sys.initial(), 0.99 * 0.5 * sys.dt_fe(), 100, Starting::SingleStep).unwrap();
    assert!(rep.max_rise_over_window(3) <= 1e-12);
}

#[test]
fn implicit_third_order_stiff_toy() {
    let spec = registry::lookup("nd-implicit-p3").unwrap();
    let sys = Relaxation::toy(64, 1e-8);
    let (_, rep) = integrate(&spec, &sys, &sys.initial(), 1.0, 100, Starting::SingleStep).unwrap();
    assert!(rep.max_rise_step <= 0.0);
}

#[test]
fn imex_second_order_without_implicit_part() {
    // With F_im = 0 the scheme is a chain of forward Euler steps in F_ex.
    struct Decay;
    impl System for Decay {
        fn dim(&self) -> usize {
            1
        }
        fn f_ex(&self, u: &DVector<f64>) -> DVector<f64> {
            -u
        }
        fn stage_solve(&self, a: &DVector<f64>, _: f64, _: f64) -> tdssp::Result<DVector<f64>> {
            Ok(a.clone())
        }
        fn functional(&self, u: &DVector<f64>) -> f64 {
            u.amax()
        }
        fn dt_fe(&self) -> f64 {
            1.0
        }
    }
    let spec = registry::lookup("imex-rk-p2").unwrap();
    let Method::ImexRk(m) = &spec.method else { panic!() };
    let u = step(&spec.method, &Decay, &DVector::from_vec(vec![1.0]), 0.1).unwrap();
    // Hand expansion: stage values y_i = re_i + sum_j (p_ij + w_ij (1 - dt/r)) y_j.
    let h = 1.0 - 0.1 / m.r;
    let mut y = Vec::new();
    for i in 0..m.stages() {
        let yi = m.re[i] + (0..i).map(|j| (m.p[(i, j)] + m.w[(i, j)] * h) * y[j]).sum::<f64>();
        y.push(yi);
    }
    assert!((u[0] - y[m.stages() - 1]).abs() < 1e-15);
    assert!((u[0] - (1.0 - 0.1 + 0.005)).abs() < 1e-3);
}
