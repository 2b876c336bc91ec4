// SSP certificates for every registry entry, and the explicit ones against
// their closed forms.

use tdssp::certify::{certify, closed_form_c, CertifiedR, Family, MaxROptions};
use tdssp::registry;

pub fn run_example() -> tdssp::Result<Vec<(String, CertifiedR)>> {
    let opts = MaxROptions::default();
    let mut out = Vec::new();
    for spec in registry::all() {
        let cert = certify(&spec, &opts)?;
        let failed: Vec<&str> = cert.conditions.iter().filter(|c| !c.pass).map(|c| c.label.as_str()).collect();
        let r = match cert.certified_r {
            CertifiedR::Unconditional => "unconditional".to_string(),
            CertifiedR::Value(v) => format!("{v:.10}"),
        };
        println!("{:<22} {:<16} failing: {:?}", spec.name, r, failed);
        out.push((spec.name.to_string(), cert.certified_r));
    }

    // The Taylor method's coefficient as K varies.
    for k in [0.25, 0.5, std::f64::consts::FRAC_1_SQRT_2, 1.0, 2.0] {
        println!("K = {k:.4}: C(taylor) = {:.6}, C(2s4p) = {:.6}", closed_form_c(Family::Taylor, k)?, closed_form_c(Family::TwoStageFourth, k)?);
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> tdssp::Result<()> {
    run_example().map(|_| ())
}
