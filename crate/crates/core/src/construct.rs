//! The construction pipeline: from the generic unipotent element u(η_m) to
//! the Liouvillian matrix A_L(η), its solution tower, the coefficients
//! h_i(η_m), the elimination η_i = f_i(η), the invariants and A_G(h).
//!
//! Indexing: positions in vectors are 0-based over the negative-root order;
//! η_i is the DiffPoly variable `i` (1-based), so β_k carries variable k + 1.
//! Maps (`v`, `f`, `lbar`, `pbar`) are keyed by the 1-based index.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::chevalley::{ChevalleyRep, Coords};
use crate::diffpoly::{DiffPoly, JetVar};
use crate::error::{Error, Result};
use crate::linalg::{self, QMat};
use crate::liouville_expr::LiouvExpr;
use crate::matrix::{Matrix, QMatrix};
use crate::rootsys::{height, neg, simple, Root};
use crate::scalar::{q, Rational, Scalar};
use crate::symgroup::{Factor, GroupElement};

#[derive(Clone, Debug, PartialEq)]
pub struct Stage1Coeffs {
    pub v: BTreeMap<usize, DiffPoly>,
    /// ℓδ(u(η_m)) itself, reused by later stages.
    pub logderiv: Matrix<DiffPoly>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stage2Coeffs {
    pub g: Vec<DiffPoly>,
    pub ell: Vec<DiffPoly>,
    pub p: Vec<DiffPoly>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiouvilleData {
    pub n_bar: QMatrix,
    pub c: Vec<Rational>,
    pub gbar: Vec<DiffPoly>,
    pub a_l: Matrix<DiffPoly>,
    pub z: Vec<LiouvExpr>,
    pub y: Vec<LiouvExpr>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HCoeffs {
    pub h: Vec<DiffPoly>,
    pub q: Vec<DiffPoly>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Elimination {
    /// η_i = f_i(η_1..η_l) for every i > l.
    pub f: BTreeMap<usize, DiffPoly>,
    pub lbar: BTreeMap<usize, DiffPoly>,
    pub pbar: BTreeMap<usize, DiffPoly>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantSet {
    /// 1-based indices j_1 < … < j_l of the complementary roots.
    pub comp: Vec<usize>,
    pub h: Vec<DiffPoly>,
    pub lhat: Vec<DiffPoly>,
    pub phat: Vec<DiffPoly>,
}

#[derive(Clone, Debug)]
pub struct Pipeline {
    pub stage1: Stage1Coeffs,
    pub stage2: Stage2Coeffs,
    pub liouville: LiouvilleData,
    pub h_raw: HCoeffs,
    pub elim: Elimination,
    pub inv: InvariantSet,
    pub a_g: Matrix<DiffPoly>,
}

fn eta(i: usize) -> DiffPoly {
    DiffPoly::var(i as u32 + 1)
}

fn r(rep: &ChevalleyRep, i: usize) -> i64 {
    height(rep.rs().beta(i))
}

/// Largest 1-based index with height `h` (0 when there is none).
fn last_at(rep: &ChevalleyRep, h: i64) -> u32 {
    rep.rs().indices_at_height(h).last().map_or(0, |&i| i as u32 + 1)
}

fn u_eta<T: Scalar>(rep: &ChevalleyRep, x: impl Fn(usize) -> T) -> GroupElement<T> {
    GroupElement::new(
        (0..rep.m())
            .map(|i| Factor::Unipotent(rep.rs().beta(i).clone(), x(i)))
            .collect(),
    )
}

/// Coefficients of the positive root vectors must be those of A_0^+ (or all
/// zero when `a0` is false).
fn check_positive_part(rep: &ChevalleyRep, c: &Coords<DiffPoly>, a0: bool, lemma: &str) -> Result<()> {
    for r in rep.rs().positive_roots() {
        let want = if a0 && height(r) == 1 { DiffPoly::int(1) } else { DiffPoly::zero() };
        let got = c.get(r);
        if got != want {
            return Err(Error::structure(lemma, format!("coefficient of X_{r:?} is {got}")));
        }
    }
    Ok(())
}

fn rank_or_fail(m: &QMat, want: usize, lemma: &str, what: String) -> Result<()> {
    let r = linalg::rank(m);
    if r != want {
        return Err(Error::rank(lemma, format!("{what}: rank {r}, expected {want}")));
    }
    Ok(())
}

/// ℓδ(u_1(η_1)⋯u_m(η_m)) = Σ η_i'X_i + Σ_{i>l} v_i X_i.
pub fn logderiv_unipotent(rep: &ChevalleyRep) -> Result<Stage1Coeffs> {
    const LEMMA: &str = "logarithmic derivative of u(η)";
    let l = rep.rank();
    let ld = u_eta(rep, eta).log_derivative(rep)?;
    let c = rep.decompose(&ld)?;
    if c.h.iter().any(|x| !x.is_zero()) {
        return Err(Error::structure(LEMMA, "nonzero Cartan component"));
    }
    check_positive_part(rep, &c, false, LEMMA)?;
    let mut v = BTreeMap::new();
    for i in 0..rep.m() {
        let vi = c.get(rep.rs().beta(i)).sub(&eta(i).derive());
        if i < l {
            if !vi.is_zero() {
                return Err(Error::structure(LEMMA, format!("v_{} = {vi} for a simple root", i + 1)));
            }
            continue;
        }
        let s2 = last_at(rep, r(rep, i) + 1);
        for (mono, _) in vi.terms() {
            if mono.order() != 1 || mono.degree() < 2 {
                return Err(Error::structure(
                    LEMMA,
                    format!("v_{} has a term of order {} and degree {}", i + 1, mono.order(), mono.degree()),
                ));
            }
        }
        if let Some(x) = vi.vars().iter().find(|x| x.var > s2) {
            return Err(Error::structure(LEMMA, format!("v_{} involves η_{}", i + 1, x.var)));
        }
        v.insert(i + 1, vi);
    }
    Ok(Stage1Coeffs { v, logderiv: ld })
}

/// Ad(u(η_m))(A_0^+) = A_0^+ + Σ g_i H_i + Σ (ℓ_i + p_i) X_i.
pub fn adjoint_on_a0(rep: &ChevalleyRep) -> Result<Stage2Coeffs> {
    const LEMMA: &str = "adjoint action on A_0^+";
    let l = rep.rank();
    let m = rep.m();
    let ad = u_eta(rep, eta).adjoint(rep, &rep.a0_plus())?;
    let c = rep.decompose(&ad)?;
    check_positive_part(rep, &c, true, LEMMA)?;

    let mut gm: QMat = Vec::new();
    for (i, gi) in c.h.iter().enumerate() {
        if gi.is_zero() || gi.linear_part() != *gi || gi.order() != 0 {
            return Err(Error::structure(LEMMA, format!("g_{} = {gi} is not a nonzero linear form", i + 1)));
        }
        if gi.vars().iter().any(|x| x.var as usize > l) {
            return Err(Error::structure(LEMMA, format!("g_{} leaves η_1..η_{l}", i + 1)));
        }
        gm.push((0..l).map(|k| gi.linear_coeff(JetVar::new(k as u32 + 1, 0))).collect());
    }
    rank_or_fail(&gm, l, LEMMA, "g_1..g_l".into())?;

    let mut ell = Vec::with_capacity(m);
    let mut p = Vec::with_capacity(m);
    for i in 0..m {
        let x = c.get(rep.rs().beta(i));
        let (li, pi) = (x.linear_part(), x.nonlinear_part());
        if !pi.constant_term().is_zero() || x.order() != 0 {
            return Err(Error::structure(LEMMA, format!("coefficient of X_{} is {x}", i + 1)));
        }
        let band = r(rep, i) - 1;
        if let Some(v) = li.vars().iter().find(|v| r(rep, v.var as usize - 1) != band) {
            return Err(Error::structure(LEMMA, format!("ℓ_{} involves η_{}", i + 1, v.var)));
        }
        let i2 = last_at(rep, r(rep, i));
        if pi.min_degree() < 2 && !pi.is_zero() {
            return Err(Error::structure(LEMMA, format!("p_{} has a term of degree < 2", i + 1)));
        }
        if let Some(v) = pi.vars().iter().find(|v| v.var > i2) {
            return Err(Error::structure(LEMMA, format!("p_{} involves η_{}", i + 1, v.var)));
        }
        ell.push(li);
        p.push(pi);
    }
    for h in (rep.rs().min_height()..=-1).rev() {
        let rows: Vec<usize> =
            rep.rs().indices_at_height(h).into_iter().filter(|&i| !rep.rs().is_comp(i)).collect();
        let cols = rep.rs().indices_at_height(h - 1);
        if rows.len() != cols.len() {
            return Err(Error::rank(LEMMA, format!("height {h}: {} equations in {} unknowns", rows.len(), cols.len())));
        }
        let mat: QMat = rows
            .iter()
            .map(|&i| cols.iter().map(|&k| ell[i].linear_coeff(JetVar::new(k as u32 + 1, 0))).collect())
            .collect();
        rank_or_fail(&mat, rows.len(), LEMMA, format!("ℓ-system at height {h}"))?;
    }
    Ok(Stage2Coeffs { g: c.h, ell, p })
}

fn conj_q<T: Scalar>(n: &QMatrix, ni: &QMatrix, a: &Matrix<T>) -> Matrix<T> {
    a.lmul_q(n).rmul_q(ni)
}

/// A_L = Σ ḡ_i H_i + A_0^-(c) with Ad(n(w̄))(A_0^-(c)) = A_0^+ and
/// Ad(n(w̄))(Σ ḡ_i H_i) = −Σ g_i H_i.
pub fn build_a_l(rep: &ChevalleyRep, stage2: &Stage2Coeffs) -> Result<LiouvilleData> {
    let l = rep.rank();
    let n_bar = rep.longest();
    let ni = n_bar
        .inverse()
        .ok_or_else(|| Error::NoRationalSolution("n(w̄) is singular".into()))?;
    let mut c = vec![Rational::zero(); l];
    for (i, ci) in c.iter_mut().enumerate() {
        let img = conj_q(&n_bar, &ni, rep.x(&neg(&simple(l, i)))?);
        let co = rep.decompose(&img)?;
        let nz: Vec<(&Root, &Rational)> = co.x.iter().filter(|(_, v)| !v.is_zero()).collect();
        match nz.as_slice() {
            [(root, d)] if height(root) == 1 && co.h.iter().all(Zero::is_zero) => *ci = d.recip(),
            _ => {
                return Err(Error::NoRationalSolution(format!(
                    "Ad(n(w̄)) X_-α{} is not a multiple of a simple root vector",
                    i + 1
                )))
            }
        }
    }
    // columns: Ad(n(w̄)) H_i in the H basis
    let mut nh: QMat = vec![vec![Rational::zero(); l]; l];
    for i in 0..l {
        let co = rep.decompose(&conj_q(&n_bar, &ni, rep.h(i)))?;
        if co.x.values().any(|v| !v.is_zero()) {
            return Err(Error::NoRationalSolution(format!("Ad(n(w̄)) H_{} leaves the Cartan", i + 1)));
        }
        for j in 0..l {
            nh[j][i] = co.h[j].clone();
        }
    }
    let rhs: Vec<DiffPoly> = stage2.g.iter().map(DiffPoly::neg).collect();
    let gbar = linalg::solve(&nh, &rhs)
        .ok_or_else(|| Error::NoRationalSolution("Ad(n(w̄)) is singular on the Cartan".into()))?;

    let cd: Vec<DiffPoly> = c.iter().map(|x| DiffPoly::constant(x.clone())).collect();
    let a0m = rep.a0(false, &cd);
    let hpart = rep.combine(&Coords { h: gbar.clone(), x: BTreeMap::new() });
    let a_l = hpart.add(&a0m);
    if conj_q(&n_bar, &ni, &a0m) != rep.a0_plus() {
        return Err(Error::VerificationFailure("Ad(n(w̄))(A_0^-(c)) != A_0^+".into()));
    }
    let want = rep.combine(&Coords { h: rhs, x: BTreeMap::new() });
    if conj_q(&n_bar, &ni, &hpart) != want {
        return Err(Error::VerificationFailure("Ad(n(w̄))(Σ ḡ_i H_i) != −Σ g_i H_i".into()));
    }
    Ok(LiouvilleData { n_bar, c, gbar, a_l, z: Vec::new(), y: Vec::new() })
}

/// z_i = e^{∫ o_i ḡ_i}, y_i = ∫ c·χ_{β_i}(t(z))^{-1} for the simple roots and
/// y_i = ∫ −v_i(y) beyond, then ℓδ(t(z)u(y)) = A_L is checked.
pub fn liouville_solutions(
    rep: &ChevalleyRep,
    stage1: &Stage1Coeffs,
    data: &LiouvilleData,
) -> Result<LiouvilleData> {
    let l = rep.rank();
    let o = rep.orientation();
    let logz: Vec<DiffPoly> = (0..l).map(|i| data.gbar[i].scale(&q(o[i]))).collect();
    let z: Vec<LiouvExpr> = logz.iter().map(LiouvExpr::exp_integral).collect();
    let mut y: Vec<LiouvExpr> = Vec::with_capacity(rep.m());
    for i in 0..rep.m() {
        let beta = rep.rs().beta(i);
        let yi = if i < l {
            let k = (0..l)
                .find(|&k| *beta == neg(&simple(l, k)))
                .ok_or_else(|| Error::structure("Liouvillian tower", format!("β_{} is not simple", i + 1)))?;
            let ch = rep.character(beta);
            let mut e = DiffPoly::zero();
            for j in 0..l {
                e = e.sub(&logz[j].scale(&q(ch[j])));
            }
            LiouvExpr::integral(&LiouvExpr::exp_integral(&e).scale(&data.c[k]))
        } else {
            let vi = &stage1.v[&(i + 1)];
            let val: LiouvExpr = vi.eval(&mut |k| {
                y.get(k as usize - 1).cloned().ok_or(Error::MissingAssignment(k))
            })?;
            LiouvExpr::integral(&val.neg())
        };
        y.push(yi);
    }
    let out = LiouvilleData { z, y, ..data.clone() };
    check_tower(rep, &out)?;
    Ok(out)
}

fn tower(rep: &ChevalleyRep, data: &LiouvilleData) -> Vec<Factor<LiouvExpr>> {
    let mut f: Vec<Factor<LiouvExpr>> =
        data.z.iter().enumerate().map(|(i, z)| Factor::Torus(i, z.clone())).collect();
    f.extend(data.y.iter().enumerate().map(|(i, y)| Factor::Unipotent(rep.rs().beta(i).clone(), y.clone())));
    f
}

fn check_tower(rep: &ChevalleyRep, data: &LiouvilleData) -> Result<()> {
    let ld = GroupElement::new(tower(rep, data)).log_derivative(rep)?;
    let want = data.a_l.map(|p| LiouvExpr::poly(p.clone()));
    if ld != want {
        return Err(Error::VerificationFailure("ℓδ(t(z)u(y)) != A_L".into()));
    }
    Ok(())
}

/// ℓδ(Y) = ℓδ(u(η_m)) + Ad(u(η_m) n(w̄))(A_L) = A_0^+ + Σ h_i X_i.
pub fn logderiv_y(
    rep: &ChevalleyRep,
    stage1: &Stage1Coeffs,
    stage2: &Stage2Coeffs,
    data: &LiouvilleData,
) -> Result<HCoeffs> {
    const LEMMA: &str = "logarithmic derivative of Y";
    let ni = data.n_bar.inverse().expect("n(w̄) invertible");
    let inner = conj_q(&data.n_bar, &ni, &data.a_l);
    let ld = stage1.logderiv.add(&u_eta(rep, eta).adjoint(rep, &inner)?);
    let c = rep.decompose(&ld)?;
    if let Some(i) = c.h.iter().position(|x| !x.is_zero()) {
        return Err(Error::structure(LEMMA, format!("H_{} component {}", i + 1, c.h[i])));
    }
    check_positive_part(rep, &c, true, LEMMA)?;
    let mut h = Vec::new();
    let mut qs = Vec::new();
    for i in 0..rep.m() {
        let hi = c.get(rep.rs().beta(i));
        let qi = hi.sub(&eta(i).derive()).sub(&stage2.ell[i]);
        let s2 = last_at(rep, r(rep, i) + 1);
        let i2 = last_at(rep, r(rep, i));
        for (mono, _) in qi.terms() {
            if mono.degree() < 2 || mono.order() > 1 {
                return Err(Error::structure(LEMMA, format!("q_{} has a term {mono:?}", i + 1)));
            }
        }
        if let Some(v) = qi.vars().iter().find(|v| v.var > i2 || (v.order > 0 && v.var > s2)) {
            return Err(Error::structure(LEMMA, format!("q_{} involves η_{}^({})", i + 1, v.var, v.order)));
        }
        h.push(hi);
        qs.push(qi);
    }
    Ok(HCoeffs { h, q: qs })
}

fn coeff_row(p: &DiffPoly, vars: u32, order: u32) -> Vec<Rational> {
    (1..=vars).map(|k| p.linear_coeff(JetVar::new(k, order))).collect()
}

/// Solves the non-complementary equations h_i = 0 height by height for the
/// variables one height lower, substituting forward.
pub fn eliminate_noncomplementary(
    rep: &ChevalleyRep,
    stage2: &Stage2Coeffs,
    hc: &HCoeffs,
) -> Result<Elimination> {
    const LEMMA: &str = "elimination of the non-complementary equations";
    let l = rep.rank();
    let rs = rep.rs();
    let mut sigma: BTreeMap<u32, DiffPoly> = BTreeMap::new();
    for h in (rs.min_height() + 1..=-1).rev() {
        let rows: Vec<usize> = rs.indices_at_height(h).into_iter().filter(|&i| !rs.is_comp(i)).collect();
        let cols = rs.indices_at_height(h - 1);
        let mat: QMat = rows
            .iter()
            .map(|&i| cols.iter().map(|&k| stage2.ell[i].linear_coeff(JetVar::new(k as u32 + 1, 0))).collect())
            .collect();
        let inv = linalg::inverse(&mat)
            .ok_or_else(|| Error::rank(LEMMA, format!("ℓ-system at height {h} is singular")))?;
        let rhs: Vec<DiffPoly> = rows
            .iter()
            .map(|&i| hc.h[i].sub(&stage2.ell[i]).substitute_partial(&sigma).neg())
            .collect();
        for (k, fk) in cols.iter().zip(linalg::apply(&inv, &rhs)) {
            if let Some(v) = fk.vars().iter().find(|v| v.var as usize > l) {
                return Err(Error::structure(LEMMA, format!("f_{} involves η_{}", k + 1, v.var)));
            }
            sigma.insert(*k as u32 + 1, fk);
        }
    }
    for i in (0..rep.m()).filter(|&i| !rs.is_comp(i)) {
        let res = hc.h[i].substitute_partial(&sigma);
        if !res.is_zero() {
            return Err(Error::structure(LEMMA, format!("h_{} does not vanish: {res}", i + 1)));
        }
    }

    let j = rs.indices_at_height(-1).into_iter().filter(|&i| !rs.is_comp(i)).max().map_or(0, |i| i as u32 + 1);
    let mut elim = Elimination { f: BTreeMap::new(), lbar: BTreeMap::new(), pbar: BTreeMap::new() };
    for (&k, fk) in &sigma {
        let rk = r(rep, k as usize - 1);
        let ord = (rk + 1).unsigned_abs() as u32;
        let (lb, pb) = (fk.linear_part(), fk.nonlinear_part());
        if lb.is_zero() || lb.vars().iter().any(|v| v.var > j || v.order != ord) {
            return Err(Error::structure(LEMMA, format!("ℓ̄_{k} = {lb} is not of order {ord} in η_1..η_{j}")));
        }
        if !pb.is_zero() && (pb.min_degree() < 2 || pb.order() > (rk + 2).unsigned_abs() as u32) {
            return Err(Error::structure(LEMMA, format!("p̄_{k} = {pb}")));
        }
        elim.f.insert(k as usize, fk.clone());
        elim.lbar.insert(k as usize, lb);
        elim.pbar.insert(k as usize, pb);
    }
    for h in (rs.min_height()..=-2).rev() {
        let ord = (h + 1).unsigned_abs() as u32;
        let here: QMat = rs
            .indices_at_height(h)
            .iter()
            .map(|&k| coeff_row(&elim.lbar[&(k + 1)], j, ord))
            .collect();
        rank_or_fail(&here, here.len(), LEMMA, format!("ℓ̄-system at height {h}"))?;
        if h <= -3 {
            let above: QMat = rs
                .indices_at_height(h + 1)
                .iter()
                .filter(|&&k| !rs.is_comp(k))
                .map(|&k| coeff_row(&elim.lbar[&(k + 1)], j, ord - 1))
                .collect();
            let mut both = above.clone();
            both.extend(here.iter().cloned());
            if linalg::rank(&above) != here.len() || linalg::rank(&both) != here.len() {
                return Err(Error::rank(
                    LEMMA,
                    format!("ℓ̄-system at height {h} is not equivalent to the non-complementary rows above"),
                ));
            }
        }
    }
    Ok(elim)
}

/// Substitutes f into the complementary h_j and splits off the linear part.
pub fn invariants(rep: &ChevalleyRep, hc: &HCoeffs, elim: &Elimination) -> Result<InvariantSet> {
    const LEMMA: &str = "invariants";
    let l = rep.rank();
    let sigma: BTreeMap<u32, DiffPoly> = elim.f.iter().map(|(&k, f)| (k as u32, f.clone())).collect();
    let mut out = InvariantSet { comp: Vec::new(), h: Vec::new(), lhat: Vec::new(), phat: Vec::new() };
    let mut mat: QMat = Vec::new();
    for &j in rep.rs().comp() {
        let hj = hc.h[j].substitute_partial(&sigma);
        let rj = r(rep, j);
        let ord = rj.unsigned_abs() as u32;
        let (lh, ph) = (hj.linear_part(), hj.nonlinear_part());
        if lh.is_zero() || lh.vars().iter().any(|v| v.var as usize > l || v.order != ord) {
            return Err(Error::structure(LEMMA, format!("ℓ̂_{} = {lh} is not of order {ord}", j + 1)));
        }
        if !ph.is_zero() && (ph.min_degree() < 2 || ph.order() > (rj + 1).unsigned_abs() as u32) {
            return Err(Error::structure(LEMMA, format!("p̂_{} = {ph}", j + 1)));
        }
        mat.push(coeff_row(&lh, l as u32, ord));
        out.comp.push(j + 1);
        out.h.push(hj);
        out.lhat.push(lh);
        out.phat.push(ph);
    }
    rank_or_fail(&mat, l, LEMMA, "ℓ̂ coefficient matrix".into())?;
    check_prolonged(rep, &out)?;
    Ok(out)
}

/// Prolonging every h_j to the order |r(m)| gives a full-rank linear system in
/// the top derivatives, with nonlinear parts of lower order.
pub fn check_prolonged(rep: &ChevalleyRep, inv: &InvariantSet) -> Result<()> {
    const LEMMA: &str = "prolonged invariants";
    let l = rep.rank() as u32;
    let top = rep.rs().min_height().unsigned_abs() as u32;
    let mut mat: QMat = Vec::new();
    for (k, &j) in inv.comp.iter().enumerate() {
        let d = top - r(rep, j - 1).unsigned_abs() as u32;
        mat.push(coeff_row(&inv.lhat[k].derive_n(d), l, top));
        let ph = inv.phat[k].derive_n(d);
        if !ph.is_zero() && ph.order() + 1 > top {
            return Err(Error::structure(LEMMA, format!("prolonged p̂_{j} has order {}", ph.order())));
        }
    }
    rank_or_fail(&mat, l as usize, LEMMA, "top-order system".into())
}

/// A_G(h) = A_0^+ + Σ h_{j_k} X_{j_k}.
pub fn assemble_a_g(rep: &ChevalleyRep, inv: &InvariantSet) -> Matrix<DiffPoly> {
    a_g_from(rep, &inv.comp, &inv.h)
}

/// A_0^+ + Σ h_k X_{β_{j_k}} for 1-based complementary indices.
pub fn a_g_from(rep: &ChevalleyRep, comp: &[usize], h: &[DiffPoly]) -> Matrix<DiffPoly> {
    let mut c = Coords { h: vec![DiffPoly::zero(); rep.rank()], x: BTreeMap::new() };
    for a in 0..rep.rank() {
        c.x.insert(simple(rep.rank(), a), DiffPoly::int(1));
    }
    for (&j, hj) in comp.iter().zip(h) {
        c.x.insert(rep.rs().beta(j - 1).clone(), hj.clone());
    }
    rep.combine(&c)
}

/// Y = u((η, f(η))) n(w̄) t(z) u(y) over the Liouvillian expressions.
pub fn fundamental_matrix(rep: &ChevalleyRep, data: &LiouvilleData, elim: &Elimination) -> Result<Matrix<LiouvExpr>> {
    let l = rep.rank();
    let mut factors = u_eta(rep, |i| {
        LiouvExpr::poly(if i < l { eta(i) } else { elim.f[&(i + 1)].clone() })
    })
    .factors;
    factors.push(Factor::Constant(data.n_bar.clone()));
    factors.extend(tower(rep, data));
    GroupElement::new(factors).matrix(rep)
}

/// ∂(Y) − A_G(h)·Y = 0 entrywise, after re-checking the tower.
pub fn verify_end_to_end(
    rep: &ChevalleyRep,
    data: &LiouvilleData,
    elim: &Elimination,
    a_g: &Matrix<DiffPoly>,
) -> Result<()> {
    check_tower(rep, data)?;
    let y = fundamental_matrix(rep, data, elim)?;
    let ag = a_g.map(|p| LiouvExpr::poly(p.clone()));
    let res = y.derive().sub(&ag.mul(&y));
    if let Some((i, j, v)) = res.first_nonzero() {
        return Err(Error::IdentityFailure { row: i + 1, col: j + 1, residual: v.to_string() });
    }
    Ok(())
}

/// The invariants and A_G under a specialization of η_1..η_l.
pub fn specialize(
    rep: &ChevalleyRep,
    inv: &InvariantSet,
    sigma: &BTreeMap<u32, DiffPoly>,
) -> Result<(Vec<DiffPoly>, Matrix<DiffPoly>)> {
    let h = inv.h.iter().map(|p| p.substitute(sigma)).collect::<Result<Vec<_>>>()?;
    let m = a_g_from(rep, &inv.comp, &h);
    Ok((h, m))
}

impl Pipeline {
    pub fn run(rep: &ChevalleyRep) -> Result<Pipeline> {
        let stage1 = logderiv_unipotent(rep)?;
        let stage2 = adjoint_on_a0(rep)?;
        let data = build_a_l(rep, &stage2)?;
        let liouville = liouville_solutions(rep, &stage1, &data)?;
        let h_raw = logderiv_y(rep, &stage1, &stage2, &liouville)?;
        let elim = eliminate_noncomplementary(rep, &stage2, &h_raw)?;
        let inv = invariants(rep, &h_raw, &elim)?;
        let a_g = assemble_a_g(rep, &inv);
        Ok(Pipeline { stage1, stage2, liouville, h_raw, elim, inv, a_g })
    }

    pub fn verify(&self, rep: &ChevalleyRep) -> Result<()> {
        verify_end_to_end(rep, &self.liouville, &self.elim, &self.a_g)
    }

    pub fn to_json(&self, rep: &ChevalleyRep) -> Value {
        let polys = |v: &[DiffPoly]| v.iter().map(DiffPoly::to_json).collect::<Vec<_>>();
        let keyed = |m: &BTreeMap<usize, DiffPoly>| {
            m.iter().map(|(k, p)| (k.to_string(), p.to_json())).collect::<serde_json::Map<_, _>>()
        };
        let exprs = |v: &[LiouvExpr]| v.iter().map(LiouvExpr::to_json).collect::<Vec<_>>();
        let l = &self.liouville;
        json!({
            "system": rep.rs().to_json(),
            "stage1": {"v": keyed(&self.stage1.v)},
            "stage2": {"g": polys(&self.stage2.g), "ell": polys(&self.stage2.ell), "p": polys(&self.stage2.p)},
            "n_bar": l.n_bar.to_json(),
            "c": l.c.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "gbar": polys(&l.gbar),
            "A_L": l.a_l.to_json_with(DiffPoly::to_json),
            "z": exprs(&l.z),
            "y": exprs(&l.y),
            "h_raw": polys(&self.h_raw.h),
            "f": keyed(&self.elim.f),
            "invariants": {
                "comp": self.inv.comp,
                "h": polys(&self.inv.h),
                "lhat": polys(&self.inv.lhat),
                "phat": polys(&self.inv.phat),
            },
            "A_G": self.a_g.to_json_with(DiffPoly::to_json),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::Calibration;
    use crate::rootsys::{RootSystem, RootType};

    fn rep(k: RootType, l: usize) -> ChevalleyRep {
        ChevalleyRep::build_with(&RootSystem::build(k, l).unwrap(), &Calibration::embedded()).unwrap()
    }

    fn p(s: &str) -> DiffPoly {
        DiffPoly::parse(s).unwrap()
    }

    #[test]
    fn a1_riccati() {
        let r = rep(RootType::A, 1);
        let pl = Pipeline::run(&r).unwrap();
        assert!(pl.stage1.v.is_empty());
        assert_eq!(pl.liouville.n_bar, QMatrix::from_entries(2, &[(1, 2, 1), (2, 1, -1)]));
        assert_eq!(pl.liouville.c, vec![q(-1)]);
        assert_eq!(pl.liouville.gbar, vec![p("-η_1")]);
        assert_eq!(pl.inv.h, vec![p("η_1' + η_1^2")]);
        let want = Matrix::from_rows(vec![
            vec![DiffPoly::zero(), DiffPoly::int(1)],
            vec![p("η_1' + η_1^2"), DiffPoly::zero()],
        ])
        .unwrap();
        assert_eq!(pl.a_g, want);
        pl.verify(&r).unwrap();
    }

    #[test]
    fn a2_v3_against_direct_product() {
        let r = rep(RootType::A, 2);
        let s1 = logderiv_unipotent(&r).unwrap();
        let u = u_eta(&r, eta).matrix(&r).unwrap();
        let direct = crate::symgroup::log_derivative_tagged(&u, crate::symgroup::Tag::UnipotentLower).unwrap();
        assert_eq!(direct, s1.logderiv);
        let c = r.decompose(&direct).unwrap();
        assert_eq!(c.get(r.rs().beta(2)).sub(&p("η_3'")), s1.v[&3]);
        Pipeline::run(&r).unwrap().verify(&r).unwrap();
    }

    #[test]
    fn zero_specialization_of_stage2() {
        let r = rep(RootType::A, 3);
        let s2 = adjoint_on_a0(&r).unwrap();
        let zero: BTreeMap<u32, DiffPoly> = (1..=6).map(|i| (i, DiffPoly::zero())).collect();
        for x in s2.g.iter().chain(&s2.ell).chain(&s2.p) {
            assert!(x.substitute(&zero).unwrap().is_zero());
        }
    }

    #[test]
    fn specializations() {
        let r = rep(RootType::A, 1);
        let pl = Pipeline::run(&r).unwrap();
        let zero = BTreeMap::from([(1, DiffPoly::zero())]);
        let (h, m) = specialize(&r, &pl.inv, &zero).unwrap();
        assert_eq!(h, vec![DiffPoly::zero()]);
        assert_eq!(m, r.a0_plus());
        let id = BTreeMap::from([(1, DiffPoly::var(1))]);
        assert_eq!(specialize(&r, &pl.inv, &id).unwrap().1, pl.a_g);

        let r = rep(RootType::A, 3);
        let pl = Pipeline::run(&r).unwrap();
        let consts = [q(2), q(-3), crate::scalar::qf(1, 2)];
        let sigma: BTreeMap<u32, DiffPoly> =
            (0..3).map(|i| (i as u32 + 1, DiffPoly::constant(consts[i].clone()))).collect();
        let (h, _) = specialize(&r, &pl.inv, &sigma).unwrap();
        for (hj, hs) in pl.inv.h.iter().zip(&h) {
            let direct: Rational = hj.eval(&mut |i| Ok(consts[i as usize - 1].clone())).unwrap();
            assert_eq!(hs.as_constant(), Some(direct));
        }
    }

    #[test]
    fn report_is_deterministic() {
        let r = rep(RootType::A, 2);
        let a = Pipeline::run(&r).unwrap().to_json(&r).to_string();
        let b = Pipeline::run(&r).unwrap().to_json(&r).to_string();
        assert_eq!(a, b);
    }

    #[test]
    fn structural_checks_hold_beyond_type_a() {
        for (k, l) in [(RootType::B, 2), (RootType::C, 2), (RootType::B, 3), (RootType::C, 3), (RootType::D, 4)] {
            let r = rep(k, l);
            let pl = Pipeline::run(&r).unwrap_or_else(|e| panic!("{k}{l}: {e}"));
            assert_eq!(pl.inv.h.len(), l);
        }
    }
}
