// The root-defined families: two-stage third order and three-stage fifth
// order, as functions of K.

use tdssp::families::{explicit_2s3p, literal_cubic_2s3p_root, roots_3s5p, explicit_3s5p};

pub fn run_example() -> tdssp::Result<Vec<(f64, f64, f64)>> {
    let mut out = Vec::new();
    for k in [0.5, std::f64::consts::FRAC_1_SQRT_2, 1.0] {
        let c3 = explicit_2s3p(k)?;
        let c5 = explicit_3s5p(k)?;
        println!(
            "K = {k:.4}: 2s3p r = {:.6} (literal cubic root {:?}); 3s5p roots {:?}, chosen {:.6}",
            c3.r,
            literal_cubic_2s3p_root(k),
            roots_3s5p(k),
            c5.r
        );
        println!("  2s3p b = {:?}, bdot = {:?}", c3.tableau.b().as_slice(), c3.tableau.b_dot().as_slice());
        out.push((k, c3.r, c5.r));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> tdssp::Result<()> {
    run_example().map(|_| ())
}
