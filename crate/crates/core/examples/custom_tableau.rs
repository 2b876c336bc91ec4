// Bring your own tableau: classical RK4 written with a zero second-derivative
// part, checked for order, certified and stepped.

use tdssp::certify::{certify_explicit, MaxROptions, Scan};
use tdssp::integrate::step_explicit;
use tdssp::order::mdrk_residuals;
use tdssp::problems::Riccati;
use tdssp::tableau::ButcherTd;
use tdssp::State;

pub fn run_example() -> tdssp::Result<(bool, f64)> {
    let z = [0.0; 4];
    let rk4 = ButcherTd::from_rows(
        &[&[0.0, 0.0, 0.0, 0.0], &[0.5, 0.0, 0.0, 0.0], &[0.0, 0.5, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0]],
        &[&z, &z, &z, &z],
        &[1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
        &z,
    )?;
    let p4 = mdrk_residuals(&rk4, 4)?;
    let p5 = mdrk_residuals(&rk4, 5)?;
    println!("rk4: order 4 satisfied = {}, order 5 satisfied = {}", p4.satisfied, p5.satisfied);

    // RK4 has a negative Shu-Osher coefficient, so no positive r is feasible.
    let cert = certify_explicit("rk4", &rk4.so_pair(), Scan::Sd(std::f64::consts::FRAC_1_SQRT_2), &MaxROptions::default())?;
    println!("rk4 certified r = {}", cert.certified_r.as_f64());

    let mut u = State::from_vec(vec![1.0]);
    for _ in 0..10 {
        u = step_explicit(&rk4, &Riccati::explicit(), &u, 0.1)?;
    }
    let err = (u[0] - 0.5).abs();
    println!("u(1) = {:.12}, error {err:.2e}", u[0]);
    Ok((p4.satisfied && !p5.satisfied, err))
}

#[allow(dead_code)]
fn main() -> tdssp::Result<()> {
    run_example().map(|_| ())
}
