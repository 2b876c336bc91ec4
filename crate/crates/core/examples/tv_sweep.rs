// Where does total variation start to rise? A reduced-resolution version of
// the advection experiment; run the CLI `tv-sweep` for the full grid.

use tdssp::registry;
use tdssp::sweep::{tv_sweep, SweepOptions};

pub fn run_example() -> tdssp::Result<Vec<(String, f64)>> {
    let opts = SweepOptions { dx: 1.0 / 400.0, lambda_step: 0.01, refine: 1e-3, ..SweepOptions::default() };
    let mut out = Vec::new();
    for name in ["td-ts", "td-2s3p", "td-2s4p", "td-3s5p", "ts-3s4p", "td-2s3p-nonssp"] {
        let res = tv_sweep(&registry::lookup(name)?, &opts)?;
        let note = if res.always_rose { "  (rises everywhere)" } else { "" };
        println!("{name:<16} lambda_obs = {:.3}{note}", res.lambda_obs);
        out.push((name.to_string(), res.lambda_obs));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> tdssp::Result<()> {
    run_example().map(|_| ())
}
