// Implicit negative-derivative methods take arbitrarily large steps on the
// relaxation model without increasing total variation.

use tdssp::certify::{certify, MaxROptions};
use tdssp::problems::Relaxation;
use tdssp::{integrate, registry, Starting, System};

pub fn run_example() -> tdssp::Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for name in ["nd-implicit-p2", "nd-implicit-p3", "nd-implicit-p4"] {
        let spec = registry::lookup(name)?;
        let cert = certify(&spec, &MaxROptions::default())?;
        println!("{name}: {}", serde_json::to_string(&cert.certified_r).expect("serializable"));
        for eps in [1.0, 1e-6] {
            let sys = Relaxation::toy(64, eps);
            for ratio in [1.0, 10.0, 1000.0] {
                let (_, rep) = integrate(&spec, &sys, &sys.initial(), ratio * sys.dt_fe(), 100, Starting::SingleStep)?;
                println!("  eps = {eps:.0e}, dt/dt_fe = {ratio:>6}: TV {:.4} -> {:.4}", rep.functional[0], rep.functional[100]);
                worst = worst.max(rep.max_rise_step);
            }
        }
    }
    Ok(worst)
}

#[allow(dead_code)]
fn main() -> tdssp::Result<()> {
    run_example().map(|_| ())
}
