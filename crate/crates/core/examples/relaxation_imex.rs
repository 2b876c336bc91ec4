// IMEX methods on a stiff two-velocity relaxation model: the stable step is
// set by transport alone, whatever the relaxation time.

use tdssp::certify::{certify, MaxROptions};
use tdssp::problems::Relaxation;
use tdssp::{integrate, registry, Starting, System};

pub fn run_example() -> tdssp::Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for eps in [1.0, 1e-4, 1e-8] {
        let sys = Relaxation::pde(200, eps);
        for name in ["imex-rk-p2", "imex-rk-p3"] {
            let spec = registry::lookup(name)?;
            let r = certify(&spec, &MaxROptions::default())?.certified_r.as_f64();
            let dt = 0.99 * r * sys.dt_fe();
            let (_, rep) = integrate(&spec, &sys, &sys.initial(), dt, 100, Starting::SingleStep)?;
            println!("eps = {eps:.0e} {name}: dt = {dt:.5}, TV {:.4} -> {:.4}, max rise {:.1e}", rep.functional[0], rep.functional[100], rep.max_rise_step);
            worst = worst.max(rep.max_rise_step);
        }
    }

    // Monitor output is plot-ready CSV.
    let sys = Relaxation::pde(50, 1e-8);
    let (_, rep) = integrate(&registry::lookup("imex-rk-p2")?, &sys, &sys.initial(), 0.5 * sys.dt_fe(), 5, Starting::SingleStep)?;
    print!("{}", rep.to_csv());
    Ok(worst)
}

#[allow(dead_code)]
fn main() -> tdssp::Result<()> {
    run_example().map(|_| ())
}
