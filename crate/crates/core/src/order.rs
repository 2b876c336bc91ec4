//! Order-condition residuals for two-derivative Runge–Kutta tableaux, their IMEX
//! variants, and IMEX general linear methods.
//!
//! Two-derivative conditions are generated from rooted trees. For a tree
//! `t = [t_1, ..., t_m]` with stage weights `phi(t) = A phi'(t) + Adot phi''(t)`,
//!
//! ```text
//! phi'(t)  = prod_k phi(t_k)
//! phi''(t) = sum_k phi'(t_k) prod_{l != k} phi(t_l)
//! ```
//!
//! and the condition is `b^T phi'(t) + bdot^T phi''(t) = 1 / gamma(t)`. The second
//! term accounts for every way one edge below the root is absorbed by `Fdot`.
//! Trees are listed in the conventional order of the explicit formulas, so labels
//! such as `A.p4.3` are stable.
//!
//! IMEX and GLM conditions (orders up to three) are written out term by term.
//! Their two-column tables are enumerated left column first, then right column.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tableau::{ButcherGlm, ButcherImex, ButcherTd};

/// Highest order covered for two-derivative Runge–Kutta tableaux.
pub const MAX_ORDER_TD: usize = 6;
/// Highest order covered for the IMEX and GLM classes.
pub const MAX_ORDER_IMEX: usize = 3;

/// Rooted trees of orders 1 through 6 in bracket notation (`t` is a single vertex).
///
/// Within each order the first entries follow the usual written order of the
/// conditions; order six closes with the four trees that list omits.
pub const TREES: [&[&str]; 6] = [
    &["t"],
    &["[t]"],
    &["[t,t]", "[[t]]"],
    &["[t,t,t]", "[t,[t]]", "[[t,t]]", "[[[t]]]"],
    &[
        "[t,t,t,t]",
        "[t,t,[t]]",
        "[t,[t,t]]",
        "[t,[[t]]]",
        "[[t],[t]]",
        "[[t,t,t]]",
        "[[t,[t]]]",
        "[[[t,t]]]",
        "[[[[t]]]]",
    ],
    &[
        "[t,t,t,t,t]",
        "[t,t,t,[t]]",
        "[t,t,[t,t]]",
        "[t,[t,t,t]]",
        "[[t,t,t,t]]",
        "[t,t,[[t]]]",
        "[t,[[t,t]]]",
        "[[[t,t,t]]]",
        "[t,[t,[t]]]",
        "[[t,t,[t]]]",
        "[[t,[t,t]]]",
        "[t,[[[t]]]]",
        "[[t,[[t]]]]",
        "[[[t,[t]]]]",
        "[[[[t,t]]]]",
        "[t,[t],[t]]",
        "[[t],[t,t]]",
        "[[t],[[t]]]",
        "[[[t],[t]]]",
        "[[[[[t]]]]]",
    ],
];

/// Conditions per order for two-derivative Runge–Kutta tableaux.
pub const COUNTS_TD: [usize; 6] = [1, 1, 2, 4, 9, 20];
/// Conditions per order for the IMEX and GLM classes.
pub const COUNTS_IMEX: [usize; 3] = [2, 4, 14];

/// A rooted tree, stored as the list of subtrees hanging from its root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree(pub Vec<Tree>);

impl Tree {
    /// Parse bracket notation such as `[t,[t,t]]`.
    pub fn parse(s: &str) -> Result<Tree> {
        let bytes: Vec<u8> = s.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
        let (tree, end) = Self::parse_at(&bytes, 0)?;
        if end != bytes.len() {
            return Err(Error::InvalidParameter(format!("trailing input in tree `{s}`")));
        }
        Ok(tree)
    }

    fn parse_at(b: &[u8], i: usize) -> Result<(Tree, usize)> {
        match b.get(i) {
            Some(b't') => Ok((Tree(Vec::new()), i + 1)),
            Some(b'[') => {
                let mut kids = Vec::new();
                let mut j = i + 1;
                loop {
                    let (kid, next) = Self::parse_at(b, j)?;
                    kids.push(kid);
                    match b.get(next) {
                        Some(b',') => j = next + 1,
                        Some(b']') => return Ok((Tree(kids), next + 1)),
                        _ => return Err(Error::InvalidParameter("unterminated tree".into())),
                    }
                }
            }
            _ => Err(Error::InvalidParameter("malformed tree".into())),
        }
    }

    /// Number of vertices.
    pub fn order(&self) -> usize {
        1 + self.0.iter().map(Tree::order).sum::<usize>()
    }

    /// Tree density: the order times the densities of the subtrees.
    pub fn gamma(&self) -> f64 {
        self.order() as f64 * self.0.iter().map(Tree::gamma).product::<f64>()
    }

    /// Canonical form with sorted subtrees, for equality up to isomorphism.
    pub fn canonical(&self) -> String {
        if self.0.is_empty() {
            return "t".into();
        }
        let mut kids: Vec<String> = self.0.iter().map(Tree::canonical).collect();
        kids.sort();
        format!("[{}]", kids.join(","))
    }
}

/// One evaluated condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub label: String,
    pub value: f64,
}

/// All residuals up to a requested order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderReport {
    pub method: String,
    pub p: usize,
    pub residuals: Vec<Residual>,
    pub max_abs_residual: f64,
    pub tol: f64,
    pub satisfied: bool,
}

impl OrderReport {
    fn build(p: usize, raw: Vec<(String, f64)>) -> Self {
        let residuals: Vec<Residual> = raw.into_iter().map(|(label, v)| Residual { label, value: v.abs() }).collect();
        let max_abs_residual = residuals.iter().fold(0.0_f64, |m, r| m.max(r.value));
        Self { method: String::new(), p, residuals, max_abs_residual, tol: 1e-12, satisfied: max_abs_residual <= 1e-12 }
    }

    /// Re-evaluate `satisfied` against a different tolerance.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.satisfied = self.max_abs_residual <= tol;
        self
    }

    pub fn named(mut self, method: &str) -> Self {
        self.method = method.to_string();
        self
    }

    /// Residuals whose label carries order `p`.
    pub fn at_order(&self, p: usize) -> impl Iterator<Item = &Residual> {
        let tag = format!(".p{p}.");
        self.residuals.iter().filter(move |r| r.label.contains(&tag))
    }

    /// Largest residual among conditions of exactly order `p`.
    pub fn max_at_order(&self, p: usize) -> f64 {
        self.at_order(p).fold(0.0_f64, |m, r| m.max(r.value))
    }
}

fn check_order(p: usize, max: usize) -> Result<()> {
    if (1..=max).contains(&p) {
        Ok(())
    } else {
        Err(Error::OrderOutOfRange { order: p, max })
    }
}

struct Weights<'a> {
    a: &'a DMatrix<f64>,
    a_dot: &'a DMatrix<f64>,
    s: usize,
}

impl Weights<'_> {
    fn stage(&self, t: &Tree) -> DVector<f64> {
        self.a * self.first(t) + self.a_dot * self.second(t)
    }

    fn first(&self, t: &Tree) -> DVector<f64> {
        let mut v = DVector::from_element(self.s, 1.0);
        for kid in &t.0 {
            v.component_mul_assign(&self.stage(kid));
        }
        v
    }

    fn second(&self, t: &Tree) -> DVector<f64> {
        let stages: Vec<DVector<f64>> = t.0.iter().map(|k| self.stage(k)).collect();
        let mut out = DVector::zeros(self.s);
        for (k, kid) in t.0.iter().enumerate() {
            let mut w = self.first(kid);
            for (l, st) in stages.iter().enumerate() {
                if l != k {
                    w.component_mul_assign(st);
                }
            }
            out += w;
        }
        out
    }
}

/// Elementary weight `b^T phi'(t) + bdot^T phi''(t)` of a tree.
pub fn elementary_weight(m: &ButcherTd, t: &Tree) -> f64 {
    let w = Weights { a: m.a(), a_dot: m.a_dot(), s: m.stages() };
    m.b().dot(&w.first(t)) + m.b_dot().dot(&w.second(t))
}

/// The trees of a given order, parsed.
pub fn trees(order: usize) -> Vec<Tree> {
    TREES[order - 1].iter().map(|s| Tree::parse(s).expect("static tree table")).collect()
}

/// Two-derivative Runge–Kutta residuals for every condition of order `<= p`.
pub fn mdrk_residuals(m: &ButcherTd, p: usize) -> Result<OrderReport> {
    check_order(p, MAX_ORDER_TD)?;
    let mut raw = Vec::new();
    for n in 1..=p {
        for (k, t) in trees(n).iter().enumerate() {
            raw.push((format!("A.p{n}.{}", k + 1), elementary_weight(m, t) - 1.0 / t.gamma()));
        }
    }
    Ok(OrderReport::build(p, raw))
}

/// IMEX two-derivative Runge–Kutta residuals for every condition of order `<= p`.
pub fn imex_mdrk_residuals(m: &ButcherImex, p: usize) -> Result<OrderReport> {
    check_order(p, MAX_ORDER_IMEX)?;
    let (a, ah) = (&m.a, &m.a_hat);
    let (b, bh, bd) = (&m.b, &m.b_hat, &m.b_dot);
    let (c, ch, cd) = (&m.c, &m.c_hat, &m.c_dot);
    let e = DVector::from_element(b.len(), 1.0);
    let had = |x: &DVector<f64>, y: &DVector<f64>| x.component_mul(y);

    let mut groups: Vec<Vec<f64>> = vec![vec![b.dot(&e) - 1.0, bh.dot(&e) - 1.0]];
    if p >= 2 {
        groups.push(vec![
            b.dot(c) + bd.dot(&e) - 0.5,
            bh.dot(c) - 0.5,
            b.dot(ch) - 0.5,
            bh.dot(ch) - 0.5,
        ]);
    }
    if p >= 3 {
        let s6 = 1.0 / 6.0;
        let s3 = 1.0 / 3.0;
        groups.push(vec![
            // left column
            b.dot(&(a * c)) + bd.dot(c) + b.dot(cd) - s6,
            b.dot(&(ah * c)) - s6,
            bh.dot(&(a * c)) + bh.dot(cd) - s6,
            bh.dot(&(ah * c)) - s6,
            b.dot(&had(c, c)) + 2.0 * bd.dot(c) - s3,
            b.dot(&had(ch, ch)) - s3,
            bh.dot(&had(c, ch)) - s3,
            // right column
            b.dot(&(a * ch)) + bd.dot(ch) - s6,
            b.dot(&(ah * ch)) - s6,
            bh.dot(&(a * ch)) - s6,
            bh.dot(&(ah * ch)) - s6,
            b.dot(&had(c, ch)) + bd.dot(ch) - s3,
            bh.dot(&had(c, c)) - s3,
            bh.dot(&had(ch, ch)) - s3,
        ]);
    }
    Ok(OrderReport::build(p, label("B", groups)))
}

/// IMEX two-derivative GLM residuals for every condition of order `<= p`.
pub fn imex_glm_residuals(m: &ButcherGlm, p: usize) -> Result<OrderReport> {
    check_order(p, MAX_ORDER_IMEX)?;
    let s = m.b.len();
    let e = DVector::from_element(s, 1.0);
    let (th, l) = (&m.theta, &m.ell);
    let (bh, b, bd) = (&m.b_hat, &m.b, &m.b_dot);
    let (ah, a, ad) = (&m.a_hat, &m.a, &m.a_dot);
    let l2 = l.component_mul(l);
    let l3 = l2.component_mul(l);
    let tl = &m.t * l;
    let tl2 = &m.t * &l2;
    let xh = &tl + ah * &e;
    let x = &tl + a * &e;
    let ade = ad * &e;
    let had = |u: &DVector<f64>, v: &DVector<f64>| u.component_mul(v);

    let mut groups = vec![vec![th.dot(l) + bh.dot(&e) - 1.0, th.dot(l) + b.dot(&e) - 1.0]];
    if p >= 2 {
        let h = 0.5 * th.dot(&l2) - 0.5;
        groups.push(vec![
            // left column
            h + bh.dot(&xh),
            h + b.dot(&xh),
            // right column
            h + bh.dot(&x),
            h + b.dot(&x) + bd.dot(&e),
        ]);
    }
    if p >= 3 {
        let h6 = th.dot(&l3) / 6.0 - 1.0 / 6.0;
        let h3 = th.dot(&l3) / 3.0 - 1.0 / 3.0;
        let half = 0.5 * &tl2;
        let inner = |mm: &DMatrix<f64>, y: &DVector<f64>| &half + mm * y;
        groups.push(vec![
            h6 + bh.dot(&inner(ah, &xh)),
            h6 + bh.dot(&inner(ah, &x)),
            h6 + bh.dot(&inner(a, &xh)),
            h6 + bh.dot(&(inner(a, &x) + &ade)),
            h6 + b.dot(&inner(ah, &xh)),
            h6 + b.dot(&inner(ah, &x)),
            h6 + b.dot(&inner(a, &xh)) + bd.dot(&xh),
            h6 + b.dot(&(inner(a, &x) + &ade)) + bd.dot(&x),
            h3 + bh.dot(&had(&xh, &xh)),
            h3 + bh.dot(&had(&xh, &x)),
            h3 + bh.dot(&had(&x, &x)),
            h3 + b.dot(&had(&xh, &xh)),
            h3 + b.dot(&had(&x, &xh)) + bd.dot(&xh),
            h3 + b.dot(&had(&x, &x)) + 2.0 * bd.dot(&x),
        ]);
    }
    Ok(OrderReport::build(p, label("C", groups)))
}

fn label(prefix: &str, groups: Vec<Vec<f64>>) -> Vec<(String, f64)> {
    groups
        .into_iter()
        .enumerate()
        .flat_map(|(n, g)| {
            g.into_iter().enumerate().map(move |(k, v)| (format!("{prefix}.p{}.{}", n + 1, k + 1), v))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{explicit_2s4p, explicit_taylor};
    use crate::tableau::{mat, vec, ImexGlm};

    #[test]
    fn tree_counts_and_distinctness() {
        for n in 1..=MAX_ORDER_TD {
            let ts = trees(n);
            assert_eq!(ts.len(), COUNTS_TD[n - 1]);
            assert!(ts.iter().all(|t| t.order() == n));
            let mut canon: Vec<String> = ts.iter().map(Tree::canonical).collect();
            canon.sort();
            canon.dedup();
            assert_eq!(canon.len(), ts.len(), "duplicate tree at order {n}");
        }
    }

    #[test]
    fn densities() {
        let g: Vec<f64> = trees(4).iter().map(Tree::gamma).collect();
        assert_eq!(g, [4.0, 8.0, 12.0, 24.0]);
        assert_eq!(Tree::parse("[[[[[t]]]]]").unwrap().gamma(), 720.0);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Tree::parse("[t").is_err());
        assert!(Tree::parse("x").is_err());
        assert!(Tree::parse("t]").is_err());
    }

    #[test]
    fn taylor_is_second_order() {
        let m = explicit_taylor();
        let r2 = mdrk_residuals(&m, 2).unwrap();
        assert_eq!(r2.max_abs_residual, 0.0);
        let r3 = mdrk_residuals(&m, 3).unwrap();
        assert!((r3.residuals[2].value - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r3.residuals[2].label, "A.p3.1");
    }

    #[test]
    fn two_stage_fourth_order() {
        let r = mdrk_residuals(&explicit_2s4p(), 4).unwrap();
        assert!(r.max_abs_residual < 1e-14);
        assert_eq!(r.residuals.len(), 8);
    }

    #[test]
    fn out_of_range() {
        assert!(mdrk_residuals(&explicit_taylor(), 0).is_err());
        assert!(mdrk_residuals(&explicit_taylor(), 7).is_err());
    }

    #[test]
    fn imex_euler_glm() {
        let m = ImexGlm::new(
            mat(&[&[1.0]]),
            DMatrix::zeros(1, 1),
            DMatrix::zeros(1, 1),
            vec(&[1.0]),
            vec(&[0.0]),
            vec(&[0.0]),
            vec(&[0.0]),
            vec(&[1.0]),
            1.0,
        )
        .unwrap()
        .to_butcher();
        assert_eq!(imex_glm_residuals(&m, 1).unwrap().max_abs_residual, 0.0);
        let r2 = imex_glm_residuals(&m, 2).unwrap();
        assert_eq!(r2.residuals[2].label, "C.p2.1");
        assert!((r2.residuals[2].value - 0.5).abs() < 1e-15);
        assert_eq!(r2.residuals.len(), 6);
    }
}
