//! Every example under examples/ runs and returns sensible values.

#[allow(dead_code)]
mod certify_methods {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/certify_methods.rs"));
}
#[allow(dead_code)]
mod convergence_study {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/convergence_study.rs"));
}
#[allow(dead_code)]
mod custom_tableau {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/custom_tableau.rs"));
}
#[allow(dead_code)]
mod family_roots {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/family_roots.rs"));
}
#[allow(dead_code)]
mod glm_history {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/glm_history.rs"));
}
#[allow(dead_code)]
mod implicit_unconditional {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/implicit_unconditional.rs"));
}
#[allow(dead_code)]
mod list_methods {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/list_methods.rs"));
}
#[allow(dead_code)]
mod order_conditions {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/order_conditions.rs"));
}
#[allow(dead_code)]
mod relaxation_imex {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/relaxation_imex.rs"));
}
#[allow(dead_code)]
mod tv_sweep {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/tv_sweep.rs"));
}

#[test]
fn certify_methods_example() {
    let certs = certify_methods::run_example().unwrap();
    assert_eq!(certs.len(), tdssp::registry::NAMES.len());
}

#[test]
fn convergence_study_example() {
    for (name, p) in convergence_study::run_example().unwrap() {
        let want = tdssp::lookup(&name).unwrap().order as f64;
        assert!((p - want).abs() < 0.25, "{name}: {p}");
    }
}

#[test]
fn custom_tableau_example() {
    let (order_ok, err) = custom_tableau::run_example().unwrap();
    assert!(order_ok);
    assert!(err < 1e-6);
}

#[test]
fn family_roots_example() {
    let rows = family_roots::run_example().unwrap();
    let (_, r3, r5) = rows[1];
    assert!((r3 - 1.0400704249944501).abs() < 1e-9);
    assert!((r5 - 0.6746859396396395).abs() < 1e-9);
}

#[test]
fn glm_history_example() {
    assert!(glm_history::run_example().unwrap() <= 1e-12);
}

#[test]
fn implicit_unconditional_example() {
    assert!(implicit_unconditional::run_example().unwrap() <= 1e-12);
}

#[test]
fn list_methods_example() {
    assert!(list_methods::run_example().unwrap() >= 12);
}

#[test]
fn order_conditions_example() {
    assert!(order_conditions::run_example().unwrap());
}

#[test]
fn relaxation_imex_example() {
    assert!(relaxation_imex::run_example().unwrap() <= 1e-12);
}

#[test]
fn tv_sweep_example() {
    let rows = tv_sweep::run_example().unwrap();
    let get = |n: &str| rows.iter().find(|(m, _)| m == n).unwrap().1;
    assert!((get("td-ts") - 0.618).abs() < 0.01);
    assert_eq!(get("td-2s3p-nonssp"), 0.0);
}
