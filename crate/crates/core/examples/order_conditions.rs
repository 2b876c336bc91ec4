// Order-condition residuals: every registry entry at its order and one above.

use tdssp::order::{MAX_ORDER_IMEX, MAX_ORDER_TD};
use tdssp::registry::{self, Method};
use tdssp::sweep::order_report;

pub fn run_example() -> tdssp::Result<bool> {
    let mut all_ok = true;
    for spec in registry::all() {
        let rep = order_report(&spec, spec.order)?;
        let max = match spec.method {
            Method::ImexRk(_) | Method::ImexGlm(_) => MAX_ORDER_IMEX,
            _ => MAX_ORDER_TD,
        };
        let next = if spec.order < max {
            let up = order_report(&spec, spec.order + 1)?;
            format!("order {} worst {:.1e}", up.p, up.max_at_order(up.p))
        } else {
            "no higher conditions tabulated".to_string()
        };
        println!("{:<22} p = {} satisfied = {:<5} max = {:.1e}; {next}", spec.name, spec.order, rep.satisfied, rep.max_abs_residual);
        all_ok &= rep.satisfied;
    }

    let rep = order_report(&registry::lookup("imex-glm-2step-p3")?, 3)?;
    for r in rep.residuals.iter().filter(|r| r.value > 1e-14) {
        println!("  {} = {:.2e}", r.label, r.value);
    }
    Ok(all_ok)
}

#[allow(dead_code)]
fn main() -> tdssp::Result<()> {
    run_example().map(|_| ())
}
