//! Gauge normalization of A ∈ A_0^+(s) + b^- to the shape A_G(f) by an
//! element of B^-: a constant torus rescaling when s ≠ 1, then one unipotent
//! step per height solving the level systems of W_k = [X_k, A_0^+].
//!
//! Only the unipotent branch is covered; whether a given unipotent part is
//! normalisable in general is not decided here.

use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::chevalley::ChevalleyRep;
use crate::construct::a_g_from;
use crate::diffpoly::DiffPoly;
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::Matrix;
use crate::rootsys::{height, simple};
use crate::scalar::{exact_root, fmt_q, q, Rational};
use crate::symgroup::{Factor, GroupElement};

#[derive(Clone, Debug, PartialEq)]
pub struct Normalized {
    /// Torus parameters of the rescaling, empty when s = (1,..,1).
    pub z: Vec<Rational>,
    /// g ∈ B^- with gauge(g, A) = A_G(f); factors in product order.
    pub element: GroupElement<DiffPoly>,
    /// 1-based complementary indices, matching `f`.
    pub comp: Vec<usize>,
    pub f: Vec<DiffPoly>,
}

impl Normalized {
    pub fn matrix(&self, rep: &ChevalleyRep) -> Result<Matrix<DiffPoly>> {
        self.element.matrix(rep)
    }

    pub fn to_json(&self, rep: &ChevalleyRep) -> Result<Value> {
        let u = self.matrix(rep)?;
        Ok(json!({
            "z": self.z.iter().map(fmt_q).collect::<Vec<_>>(),
            "u": u.to_json_with(|p| Value::String(p.to_string())),
            "comp": self.comp,
            "f": self.f.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        }))
    }
}

/// Whether A lies in A_0^+(s) + b^-: no component on non-simple positive
/// roots and nonzero constants s_i on the simple ones.
pub fn is_in_plane(rep: &ChevalleyRep, a: &Matrix<DiffPoly>) -> (bool, Vec<Rational>) {
    let Ok(c) = rep.decompose(a) else {
        return (false, Vec::new());
    };
    let l = rep.rank();
    for r in rep.rs().positive_roots() {
        if height(r) > 1 && !c.get(r).is_zero() {
            return (false, Vec::new());
        }
    }
    let mut s = Vec::with_capacity(l);
    for i in 0..l {
        match c.get(&simple(l, i)).as_constant() {
            Some(x) if !x.is_zero() => s.push(x),
            _ => return (false, Vec::new()),
        }
    }
    (true, s)
}

/// Constant z with α_i(t(z))·s_i = 1 for every simple root.
fn rescaling(rep: &ChevalleyRep, s: &[Rational]) -> Result<Vec<Rational>> {
    let l = rep.rank();
    let e: Vec<Vec<Rational>> = (0..l)
        .map(|i| rep.character(&simple(l, i)).into_iter().map(q).collect())
        .collect();
    let einv = linalg::inverse(&e).ok_or_else(|| Error::rank("torus rescaling", "character matrix is singular"))?;
    let scaling: Vec<String> = s.iter().map(fmt_q).collect();
    let mut z = Vec::with_capacity(l);
    for (j, row) in einv.iter().enumerate() {
        // z_j^d = Π_i s_i^{-d·E^{-1}_{ji}}
        let d = row.iter().fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let mut rhs = q(1);
        for (si, eji) in s.iter().zip(row) {
            let k = (-(eji * Rational::from_integer(d.clone()))).to_integer();
            let k: i32 = k.try_into().map_err(|_| Error::structure("torus rescaling", "exponent overflow"))?;
            let base = if k >= 0 { si.clone() } else { si.recip() };
            rhs *= num_traits::pow(base, k.unsigned_abs() as usize);
        }
        let d: u32 = d.try_into().map_err(|_| Error::structure("torus rescaling", "root degree overflow"))?;
        match exact_root(&rhs, d) {
            Some(r) => z.push(r),
            None => {
                return Err(Error::NonUnitScaling {
                    scaling,
                    radical: format!("z_{}^{} = {}", j + 1, d, fmt_q(&rhs)),
                })
            }
        }
    }
    Ok(z)
}

/// gauge(g, A) = A_G(f) with g ∈ B^-, verified by recomputation.
pub fn normalize_to_ag(rep: &ChevalleyRep, a: &Matrix<DiffPoly>) -> Result<Normalized> {
    const LEMMA: &str = "gauge normalization";
    let (ok, s) = is_in_plane(rep, a);
    if !ok {
        return Err(Error::structure(LEMMA, "matrix is not in A_0^+(s) + b^-"));
    }
    let mut element = GroupElement::identity();
    let mut z = Vec::new();
    if s.iter().any(|x| !x.is_one()) {
        z = rescaling(rep, &s)?;
        element = GroupElement::new(
            z.iter().enumerate().map(|(i, zi)| Factor::Torus(i, DiffPoly::constant(zi.clone()))).collect(),
        );
    }
    let mut cur = element.gauge(rep, a)?;

    let min = rep.rs().min_height();
    for level in (min + 1..=0).rev() {
        let (ks, cols, mat) = rep.level_system(level)?;
        let c = rep.decompose(&cur)?;
        let resid: Vec<DiffPoly> = cols
            .iter()
            .map(|&b| if level == 0 { c.h[b].clone() } else { c.get(rep.rs().beta(b)) }.neg())
            .collect();
        if resid.iter().all(DiffPoly::is_zero) {
            continue;
        }
        // Σ_a x_a W_{k_a} cancels the residue: Mᵀ x = −r
        let mt: linalg::QMat = (0..mat.len()).map(|b| mat.iter().map(|row| row[b].clone()).collect()).collect();
        let x = linalg::solve(&mt, &resid).ok_or_else(|| Error::rank(LEMMA, format!("level {level} system")))?;
        let step = GroupElement::new(
            ks.iter()
                .zip(x)
                .filter(|(_, xk)| !xk.is_zero())
                .map(|(&k, xk)| Factor::Unipotent(rep.rs().beta(k).clone(), xk))
                .collect(),
        );
        cur = step.gauge(rep, &cur)?;
        let mut factors = step.factors;
        factors.extend(element.factors);
        element = GroupElement::new(factors);
    }

    let c = rep.decompose(&cur)?;
    let comp: Vec<usize> = rep.rs().comp().iter().map(|&k| k + 1).collect();
    let f: Vec<DiffPoly> = rep.rs().comp().iter().map(|&k| c.get(rep.rs().beta(k))).collect();
    let want = a_g_from(rep, &comp, &f);
    if element.gauge(rep, a)? != want {
        return Err(Error::VerificationFailure(format!("{LEMMA}: gauge(g, A) ≠ A_G(f)")));
    }
    Ok(Normalized { z, element, comp, f })
}
