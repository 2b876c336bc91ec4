// Observed temporal orders on smooth problems.

use tdssp::registry;
use tdssp::sweep::{convergence, convergence_csv, ConvergenceProblem};

pub fn run_example() -> tdssp::Result<Vec<(String, f64)>> {
    let dts = [0.05, 0.025, 0.0125];
    let mut out = Vec::new();
    for spec in registry::all() {
        let rows = convergence(&spec, ConvergenceProblem::for_method(&spec), &dts)?;
        let p = rows.last().and_then(|r| r.observed_order).unwrap_or(f64::NAN);
        println!("{:<22} expected {} observed {p:.2}", spec.name, spec.order);
        out.push((spec.name.to_string(), p));
    }
    let spec = registry::lookup("td-3s5p")?;
    print!("{}", convergence_csv(spec.name, &convergence(&spec, ConvergenceProblem::Riccati, &dts)?));
    Ok(out)
}

#[allow(dead_code)]
fn main() -> tdssp::Result<()> {
    run_example().map(|_| ())
}
