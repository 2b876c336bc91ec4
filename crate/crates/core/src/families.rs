//! Every concrete method: explicit two-derivative families, implicit
//! negative-derivative methods, IMEX Runge–Kutta and IMEX general linear methods.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::roots::{largest_positive_root, positive_roots, smallest_positive_root};
use crate::tableau::{mat, vec, ButcherTd, ImexGlm, ImexRk, ImplicitNd};

/// Upper end of the root scans used by the parametric constructors.
pub const ROOT_SCAN_MAX: f64 = 10.0;
const ROOT_SCAN_STEP: f64 = 1e-3;
const ROOT_TOL: f64 = 1e-12;

/// A parametric explicit method together with the `r` its construction solved for.
#[derive(Debug, Clone, PartialEq)]
pub struct Constructed {
    pub tableau: ButcherTd,
    pub r: f64,
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {x}")))
    }
}

/// One-stage Taylor series method: `u + dt F + dt^2/2 Fdot`.
pub fn explicit_taylor() -> ButcherTd {
    ButcherTd::from_rows(&[&[0.0]], &[&[0.0]], &[1.0], &[0.5]).expect("static tableau")
}

/// Two-stage fourth-order method.
pub fn explicit_2s4p() -> ButcherTd {
    ButcherTd::from_rows(
        &[&[0.0, 0.0], &[0.5, 0.0]],
        &[&[0.0, 0.0], &[0.125, 0.0]],
        &[1.0, 0.0],
        &[1.0 / 6.0, 2.0 / 6.0],
    )
    .expect("static tableau")
}

/// Two-stage third-order comparator that is not SSP.
pub fn explicit_nonssp_2s3p() -> ButcherTd {
    ButcherTd::from_rows(
        &[&[0.0, 0.0], &[-1.0, 0.0]],
        &[&[0.0, 0.0], &[0.5, 0.0]],
        &[-1.0 / 3.0, 4.0 / 3.0],
        &[4.0 / 3.0, 0.5],
    )
    .expect("static tableau")
}

/// Cubic in `r` whose smallest positive root is the SSP coefficient of the
/// optimal two-stage third-order method.
///
/// Obtained by requiring the stage and output weights of the optimal Shu–Osher
/// decomposition to vanish simultaneously; written with `s = sqrt(K^2 + 2)`.
pub fn cubic_2s3p(k: f64, r: f64) -> f64 {
    let k2 = k * k;
    let s = (k2 + 2.0).sqrt();
    (3.0 * k2 - k * s + 2.0) * r.powi(3)
        + (12.0 * k2 * k2 - 12.0 * k2 * k * s + 9.0 * k2 - 3.0 * k * s) * r * r
        + (24.0 * k2.powi(3) - 24.0 * k2 * k2 * k * s + 24.0 * k2 * k2) * (r - 1.0)
}

/// The cubic in its literal closed form, kept for comparison only: its
/// smallest positive root gives a negative `b_2` and so no valid method.
pub fn literal_cubic_2s3p(k: f64, r: f64) -> f64 {
    let a0 = (k * k + 2.0).sqrt() - k;
    2.0 * k * (a0 - 2.0 * k) + 4.0 * k.powi(3) * a0 - a0 * r + (1.0 - a0) / (2.0 * k * k) * r * r
        - (a0 / (2.0 * k) + k) / (6.0 * k.powi(3)) * r.powi(3)
}

/// The literal `b_2` expression, kept for comparison with [`b2_2s3p`].
pub fn literal_b2_2s3p(k: f64, r: f64) -> f64 {
    let a0 = (k * k + 2.0).sqrt() - k;
    (2.0 * k * k * (1.0 - 1.0 / r) + r) / (k * a0 + 2.0 * k * k) - r * r / (3.0 * k * k)
}

/// Output weight `b_2` of the optimal two-stage third-order method as a function
/// of `a` and `r`; it makes the final second-derivative weight of the
/// decomposition vanish.
pub fn b2_2s3p(k: f64, a: f64, r: f64) -> f64 {
    let k2 = k * k;
    (6.0 * k2 * a - 2.0 * k2 - a * a * r * r) / (3.0 * a * a * (2.0 * k2 * a * r + 2.0 * k2 - a * a * r * r))
}

/// Smallest positive root of the literal cubic, if one exists in the scan window.
pub fn literal_cubic_2s3p_root(k: f64) -> Option<f64> {
    smallest_positive_root(|r| literal_cubic_2s3p(k, r), ROOT_SCAN_MAX, ROOT_SCAN_STEP, ROOT_TOL)
}

/// Two-stage third-order family tuned to the second-derivative constant `K`.
pub fn explicit_2s3p(k: f64) -> Result<Constructed> {
    check_positive("K", k)?;
    let r = smallest_positive_root(|r| cubic_2s3p(k, r), ROOT_SCAN_MAX, ROOT_SCAN_STEP, ROOT_TOL).ok_or_else(|| {
        Error::NoPositiveRoot { what: "two-stage third-order cubic".into(), r_max: ROOT_SCAN_MAX }
    })?;
    let a0 = (k * k + 2.0).sqrt() - k;
    let a = k * a0 / r;
    let a_hat = 0.5 * a * a;
    let b2 = b2_2s3p(k, a, r);
    let b1 = 1.0 - b2;
    let bd1 = 0.5 - 0.5 * a * b2 - 1.0 / (6.0 * a);
    let bd2 = 1.0 / (6.0 * a) - 0.5 * a * b2;
    let tableau = ButcherTd::from_rows(&[&[0.0, 0.0], &[a, 0.0]], &[&[0.0, 0.0], &[a_hat, 0.0]], &[b1, b2], &[bd1, bd2])?;
    Ok(Constructed { tableau, r })
}

/// `a_21` of the three-stage fifth-order family as a function of `r` and `K`.
pub fn a21_3s5p(k: f64, r: f64) -> f64 {
    let k2 = k * k;
    let k4 = k2 * k2;
    k2.powi(3) / r.powi(6)
        * (-2.0 / k4 * r.powi(5) + 10.0 / k4 * r.powi(4) + 40.0 / k2 * r.powi(3) - 120.0 / k2 * r * r - 240.0 * r + 240.0)
}

/// The quartic in `a_21` whose root selects the optimal three-stage fifth-order method.
pub fn quartic_3s5p(k: f64, r: f64, a: f64) -> f64 {
    let k2 = k * k;
    let r2 = r * r;
    10.0 * r2 * a.powi(4) - (100.0 * k2 + 10.0 * r2) * a.powi(3) + (130.0 * k2 + 3.0 * r2) * a * a - 50.0 * k2 * a
        + 6.0 * k2
}

/// Three-stage fifth-order tableau for a given `a_21`.
pub fn tableau_3s5p(a21: f64) -> Result<ButcherTd> {
    if (1.0 - 2.0 * a21).abs() < 1e-14 || a21.abs() < 1e-14 {
        return Err(Error::SingularDenominator(format!("three-stage fifth-order family at a21 = {a21}")));
    }
    let ad21 = 0.5 * a21 * a21;
    let g = 0.6 - a21;
    let h = 1.0 - 2.0 * a21;
    let a31 = g / h;
    if (a31 - a21).abs() < 1e-14 || a31.abs() < 1e-14 {
        return Err(Error::SingularDenominator(format!("three-stage fifth-order family at a31 = {a31}")));
    }
    let ad32 = 0.1 * (g * g / (a21 * h.powi(3)) - g / (h * h));
    let ad31 = 0.5 * g * g / (h * h) - ad32;
    let bd2 = (2.0 * a31 - 1.0) / (12.0 * a21 * (a31 - a21));
    let bd3 = h / (12.0 * a31 * (a31 - a21));
    let bd1 = 0.5 - bd2 - bd3;
    ButcherTd::from_rows(
        &[&[0.0, 0.0, 0.0], &[a21, 0.0, 0.0], &[a31, 0.0, 0.0]],
        &[&[0.0, 0.0, 0.0], &[ad21, 0.0, 0.0], &[ad31, ad32, 0.0]],
        &[1.0, 0.0, 0.0],
        &[bd1, bd2, bd3],
    )
}

/// Three-stage fifth-order family: substitutes `a_21(r)` into the quartic and takes
/// the largest root in `r`.
pub fn explicit_3s5p(k: f64) -> Result<Constructed> {
    check_positive("K", k)?;
    let f = |r: f64| quartic_3s5p(k, r, a21_3s5p(k, r));
    let r = largest_positive_root(f, ROOT_SCAN_MAX, ROOT_SCAN_STEP, ROOT_TOL).ok_or_else(|| Error::NoPositiveRoot {
        what: "three-stage fifth-order coupled system".into(),
        r_max: ROOT_SCAN_MAX,
    })?;
    Ok(Constructed { tableau: tableau_3s5p(a21_3s5p(k, r))?, r })
}

/// Number of sign changes of the coupled three-stage fifth-order system, for diagnostics.
pub fn roots_3s5p(k: f64) -> Vec<f64> {
    positive_roots(|r| quartic_3s5p(k, r, a21_3s5p(k, r)), ROOT_SCAN_MAX, ROOT_SCAN_STEP, ROOT_TOL)
}

/// Coefficients `(a21, ad21, a31, a32, ad31, b1, b2, b3, bd1)` of the `kappa <= 1`
/// three-stage fourth-order family.
pub fn ts_3s4p_coefficients(kappa: f64) -> Result<[f64; 9]> {
    check_positive("kappa", kappa)?;
    let k = kappa;
    if (k - 3.0).abs() < 1e-14 {
        return Err(Error::SingularDenominator("three-stage fourth-order family at kappa = 3".into()));
    }
    let kp1 = k + 1.0;
    let kp2 = k + 2.0;
    let km3 = k - 3.0;
    let a21 = kp1 / 2.0;
    let ad21 = kp1 * kp1 / 8.0;
    let a31 = kp1 * (-k.powi(3) - 2.0 * k * k + 14.0 * k + 3.0) / (2.0 * kp2.powi(3));
    let a32 = kp1 * km3 * km3 / (2.0 * kp2.powi(3));
    let ad31 = k * (-k * k + 2.0 * k + 3.0).powi(2) / (8.0 * kp2.powi(3));
    let b1 = (3.0 * k.powi(5) - 9.0 * k.powi(4) - 22.0 * k.powi(3) + 30.0 * k * k + 21.0 * k + 11.0)
        / (3.0 * km3 * km3 * kp1.powi(3));
    let b2 = 2.0 * k / (3.0 * kp1.powi(3));
    let b3 = 2.0 * kp2.powi(3) / (3.0 * km3 * km3 * kp1.powi(3));
    let bd1 = -(-3.0 * k.powi(3) + 3.0 * k * k + k + 1.0) / (6.0 * km3 * kp1 * kp1);
    Ok([a21, ad21, a31, a32, ad31, b1, b2, b3, bd1])
}

/// Three-stage fourth-order method built on the Taylor series condition.
pub fn ts_3s4p(kappa: f64) -> Result<ButcherTd> {
    check_positive("kappa", kappa)?;
    let [a21, ad21, a31, a32, ad31, b1, b2, b3, bd1] = if kappa >= 1.0 {
        [1.0, 0.5, 14.0 / 27.0, 4.0 / 27.0, 2.0 / 27.0, 17.0 / 48.0, 4.0 / 48.0, 27.0 / 48.0, 1.0 / 24.0]
    } else {
        ts_3s4p_coefficients(kappa)?
    };
    ButcherTd::from_rows(
        &[&[0.0, 0.0, 0.0], &[a21, 0.0, 0.0], &[a31, a32, 0.0]],
        &[&[0.0, 0.0, 0.0], &[ad21, 0.0, 0.0], &[ad31, 0.0, 0.0]],
        &[b1, b2, b3],
        &[bd1, 0.0, 0.0],
    )
}

/// Unconditionally SSP implicit methods of order 2, 3 and 4.
pub fn implicit_nd(order: usize) -> Result<ImplicitNd> {
    match order {
        2 => ImplicitNd::new(vec(&[1.0]), DMatrix::zeros(1, 1), vec(&[1.0]), vec(&[-0.5])),
        3 => ImplicitNd::new(
            vec(&[1.0, 0.0]),
            mat(&[&[0.0, 0.0], &[1.0, 0.0]]),
            vec(&[0.0, 1.0]),
            vec(&[-1.0 / 6.0, -1.0 / 3.0]),
        ),
        4 => {
            let mut p = DMatrix::zeros(5, 5);
            p[(1, 0)] = 1.0;
            p[(2, 0)] = 0.084036809261019;
            p[(2, 1)] = 0.915963190738981;
            p[(3, 0)] = 0.001511648458457;
            p[(3, 2)] = 0.090254853867587;
            p[(4, 3)] = 1.0;
            ImplicitNd::new(
                vec(&[1.0, 0.0, 0.0, 0.908233497673956, 0.0]),
                p,
                vec(&[0.660949255604937, 0.242201390400848, 1.137542996287740, 0.191388711018110, 0.625266691721946]),
                vec(&[
                    -0.177750705279127,
                    -0.354733903778084,
                    -0.403963513682271,
                    -0.161628266349058,
                    -0.218859021269943,
                ]),
            )
        }
        _ => Err(Error::UnsupportedOrder { what: "implicit negative-derivative method".into(), order }),
    }
}

/// Two-derivative IMEX Runge–Kutta methods of order 2 and 3.
pub fn imex_rk(order: usize) -> Result<ImexRk> {
    match order {
        2 => {
            let mut p = DMatrix::zeros(3, 3);
            let mut w = DMatrix::zeros(3, 3);
            w[(1, 0)] = 1.0;
            p[(2, 0)] = 0.5;
            w[(2, 1)] = 0.5;
            ImexRk::new(vec(&[1.0, 0.0, 0.0]), p, w, vec(&[0.5, 0.0, 0.5]), vec(&[0.0, -0.5, 0.0]), 1.0)
        }
        3 => {
            let mut p = DMatrix::zeros(6, 6);
            let mut w = DMatrix::zeros(6, 6);
            p[(1, 0)] = 0.253395246357353;
            w[(1, 0)] = 0.058453072749259;
            p[(2, 1)] = 0.235733481708505;
            w[(2, 0)] = 0.764266518291495;
            p[(3, 1)] = 0.123961833526104;
            w[(3, 2)] = 0.292520982667463;
            p[(4, 0)] = 0.409037644509411;
            p[(4, 1)] = 0.136123556305509;
            w[(4, 0)] = 0.173788618990251;
            w[(4, 3)] = 0.281050180194829;
            p[(5, 0)] = 0.203353399602184;
            p[(5, 4)] = 0.331204417210324;
            w[(5, 0)] = 0.016811671845949;
            w[(5, 3)] = 0.448630511341543;
            ImexRk::new(
                vec(&[1.0, 0.688151680893388, 0.0, 0.583517183806433, 0.0, 0.0]),
                p,
                w,
                vec(&[0.0, 2.0, 0.388820513661584, 0.083529464436389, 1.793313488277995, 0.0]),
                vec(&[-0.871358934880525, -0.856842702601821, 0.0, 0.0, -2.0, -0.205134529930013]),
                0.904402174130635,
            )
        }
        _ => Err(Error::UnsupportedOrder { what: "IMEX Runge-Kutta method".into(), order }),
    }
}

/// One-step, three-stage, second-order IMEX GLM with `r = (1 + sqrt 2)/2`.
pub fn imex_glm_1step_p2() -> Result<ImexGlm> {
    let s2 = 2f64.sqrt();
    let mut p = DMatrix::zeros(3, 3);
    let mut w = DMatrix::zeros(3, 3);
    w[(1, 0)] = 1.0;
    p[(2, 0)] = (6.0 - s2) / 8.0;
    w[(2, 1)] = (2.0 + s2) / 8.0;
    ImexGlm::new(
        mat(&[&[1.0], &[0.0], &[0.0]]),
        p,
        w,
        vec(&[1.0 / (2.0 + s2), 0.0, 1.0 / s2]),
        vec(&[-1.0 / (2.0 + s2), 0.0, 0.0]),
        vec(&[0.0]),
        vec(&[0.0, 0.0, 1.0 - s2 / 4.0]),
        vec(&[0.0, 0.0, (2.0 + s2) / (4.0 * (1.0 + s2))]),
        (1.0 + s2) / 2.0,
    )
}

/// Closed-form surds of the two-step, three-stage, second-order GLM:
/// `(w32, d33, ddot33, r31, q3, v2, v3, r)`.
///
/// `727 - 135 sqrt 29` and `sqrt 29 - 5` are evaluated as `4 / (727 + 135 sqrt 29)` and
/// `4 / (sqrt 29 + 5)` to avoid cancellation.
pub fn glm_2step_p2_surds() -> [f64; 8] {
    let q = 29f64.sqrt();
    let cb = f64::cbrt;
    let c4 = cb(4.0);
    let small = 4.0 / (q + 5.0);
    let w32 = (cb(27.0 + 5.0 * q) - cb(2.0)) / (2.0 * cb(5.0 + q));
    let d33 = 10.0 / 6.0 + c4 / 6.0 * (cb(9.0 * q + 43.0) - cb(9.0 * q - 43.0));
    let r31 = 1.0 + 0.5 * cb(0.5 * small) - 1.0 / (c4 * cb(small));
    let q3 = 20.0 / 9.0 - c4 / 9.0 * (cb(4.0 / (727.0 + 135.0 * q)) + cb(727.0 + 135.0 * q));
    let v2 = (7.0 - c4 * cb(81.0 * q + 137.0) + c4 * cb(81.0 * q - 137.0)) / 9.0;
    let v3 = c4 * (cb(5.0 + q) - cb(small)) - 2.0;
    let dd33 = -2.0 / (v3 + q3);
    let r = (cb(0.5 * (61.0 + 9.0 * q)) + cb(0.5 * (61.0 - 9.0 * q)) - 1.0) / 3.0;
    [w32, d33, dd33, r31, q3, v2, v3, r]
}

/// Two-step, three-stage, second-order IMEX GLM with `r ~ 1.5468`.
///
/// The first stage copies `u^n`; the third stage draws `r31` from `u^{n-1}`.
pub fn imex_glm_2step_p2() -> Result<ImexGlm> {
    let [w32, d33, dd33, r31, q3, v2, v3, r] = glm_2step_p2_surds();
    let mut w = DMatrix::zeros(3, 3);
    w[(1, 0)] = 1.0;
    w[(2, 1)] = w32;
    ImexGlm::new(
        mat(&[&[0.0, 1.0], &[0.0, 0.0], &[r31, 0.0]]),
        DMatrix::zeros(3, 3),
        w,
        vec(&[0.0, 0.0, d33]),
        vec(&[0.0, 0.0, dd33]),
        vec(&[0.0, 0.0]),
        vec(&[0.0, 0.0, q3]),
        vec(&[0.0, v2, v3]),
        r,
    )
}

/// k-step, two-stage, second-order IMEX GLM family with `r = (k-2)/(k-1)`, for `k >= 3`.
pub fn imex_glm_kstep_p2(k: usize) -> Result<ImexGlm> {
    if k < 3 {
        return Err(Error::InvalidParameter(format!("k-step family needs k >= 3, got {k}")));
    }
    let kf = k as f64;
    let mut rh = DMatrix::zeros(2, k);
    rh[(0, k - 1)] = 1.0;
    rh[(1, 0)] = 1.0 / (kf - 1.0);
    let mut w = DMatrix::zeros(2, 2);
    w[(1, 0)] = (kf - 2.0) / (kf - 1.0);
    ImexGlm::new(
        rh,
        DMatrix::zeros(2, 2),
        w,
        vec(&[0.0, kf]),
        vec(&[-(kf - 1.0), -kf]),
        DVector::zeros(k),
        vec(&[0.0, 1.0 / (kf - 1.0)]),
        vec(&[(kf - 2.0) / (kf - 1.0), 0.0]),
        (kf - 2.0) / (kf - 1.0),
    )
}

/// Two-step, five-stage, third-order IMEX GLM with `r = 1.080445742835932`.
///
/// Stored with three history columns: the tiny entry in the first column multiplies
/// `u^{n-2}` and is needed for the third-order conditions to hold to the precision of the quoted decimals.
pub fn imex_glm_2step_p3() -> Result<ImexGlm> {
    let rh = mat(&[
        &[0.0, 0.0, 1.0],
        &[0.000000000013270, 0.403826433558741, 0.037615230472512],
        &[0.0, 0.221598110956903, 0.0],
        &[0.0, 0.059380532720245, 0.0],
        &[0.0, 0.0, 0.0],
    ]);
    let mut p = DMatrix::zeros(5, 5);
    p[(1, 0)] = 0.452661697511965;
    p[(2, 1)] = 0.032510664101898;
    p[(3, 0)] = 0.235231740166619;
    p[(3, 1)] = 0.000000000563127;
    p[(4, 0)] = 0.536915718824635;
    p[(4, 1)] = 0.013138165959401;
    let mut w = DMatrix::zeros(5, 5);
    w[(1, 0)] = 0.105896638443513;
    w[(2, 0)] = 0.745891224941199;
    w[(3, 2)] = 0.705387726550010;
    w[(4, 0)] = 0.409669470298833;
    w[(4, 2)] = 0.000000000119198;
    w[(4, 3)] = 0.040276644797934;
    ImexGlm::new(
        rh,
        p,
        w,
        vec(&[0.0, 21.332739593864588, 0.0, 0.652867317315466, 14.945015954497144]),
        vec(&[-6.7737812489230, -72.4600167654208, 0.0, 0.0, -161.5846694139845]),
        vec(&[0.0, 0.0, 0.0]),
        vec(&[0.289233938741249, 0.0, 0.0, 0.0, 0.041812814961867]),
        vec(&[0.274172259985154, 0.0, 0.0, 0.394780986311730, 0.0]),
        1.080445742835932,
    )
}
