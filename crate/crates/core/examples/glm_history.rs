// Multistep IMEX GLMs: starting values, history, and the bound by the
// largest of the last k functional values.

use tdssp::certify::{certify, MaxROptions};
use tdssp::problems::Relaxation;
use tdssp::registry::{self, Params};
use tdssp::{integrate, Starting, System};

pub fn run_example() -> tdssp::Result<f64> {
    let sys = Relaxation::pde(200, 1e-8);
    let mut worst = f64::NEG_INFINITY;
    for k in [3, 4, 6] {
        let spec = registry::lookup_with("imex-glm-kstep-p2", &Params { steps: k, ..Params::default() })?;
        let r = certify(&spec, &MaxROptions::default())?.certified_r.as_f64();
        let (_, rep) = integrate(&spec, &sys, &sys.initial(), 0.99 * r * sys.dt_fe(), 200, Starting::SingleStep)?;
        let rise = rep.max_rise_over_window(k);
        println!("k = {k}: r = {r:.4}, bootstrap steps = {}, max rise over window = {rise:.1e}", rep.method_from);
        worst = worst.max(rise);
    }

    for name in ["imex-glm-2step-p2", "imex-glm-2step-p3"] {
        let spec = registry::lookup(name)?;
        let r = certify(&spec, &MaxROptions::default())?.certified_r.as_f64();
        let (_, rep) = integrate(&spec, &sys, &sys.initial(), 0.99 * r * sys.dt_fe(), 200, Starting::SingleStep)?;
        let rise = rep.max_rise_over_window(spec.steps());
        println!("{name}: r = {r:.4}, max rise over window = {rise:.1e}");
        worst = worst.max(rise);
    }
    Ok(worst)
}

#[allow(dead_code)]
fn main() -> tdssp::Result<()> {
    run_example().map(|_| ())
}
