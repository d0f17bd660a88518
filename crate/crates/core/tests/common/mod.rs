//! Seeded generators shared by the property and acceptance suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use pv_core::calibration::Calibration;
use pv_core::chevalley::{ChevalleyRep, Coords};
use pv_core::liouville_expr::LiouvExpr;
use pv_core::matrix::{Matrix, QMatrix};
use pv_core::rootsys::{add, neg, simple, RootSystem, RootType};
use pv_core::scalar::{q, qf, Rational};
use pv_core::symgroup::{Factor, GroupElement};
use pv_core::{DiffPoly, JetVar, Monomial};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rep(kind: RootType, rank: usize) -> ChevalleyRep {
    ChevalleyRep::build_with(&RootSystem::build(kind, rank).unwrap(), &Calibration::embedded()).unwrap()
}

pub fn small_q(r: &mut impl Rng) -> Rational {
    let n = r.gen_range(-9..=9);
    let d = *[1, 1, 1, 2, 3, 5].choose(r).unwrap();
    qf(n, d)
}

pub fn nonzero_q(r: &mut impl Rng) -> Rational {
    loop {
        let x = small_q(r);
        if !num_traits::Zero::is_zero(&x) {
            return x;
        }
    }
}

/// Up to `terms` monomials in η_1..η_vars, jet order ≤ `order`, degree ≤ `deg`.
pub fn diffpoly(r: &mut impl Rng, vars: u32, order: u32, deg: u32, terms: usize) -> DiffPoly {
    let mut p = DiffPoly::zero();
    for _ in 0..r.gen_range(0..=terms) {
        let d = r.gen_range(0..=deg);
        let f: Vec<(JetVar, u32)> = (0..d)
            .map(|_| (JetVar::new(r.gen_range(1..=vars), r.gen_range(0..=order)), 1))
            .collect();
        p = p.add(&DiffPoly::term(small_q(r), Monomial::from_factors(f)));
    }
    p
}

/// Random element of SL_n(Q): lower · monomial · upper with small entries.
pub fn sl_matrix(r: &mut impl Rng, n: usize) -> QMatrix {
    let mut low = QMatrix::identity(n);
    let mut up = QMatrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            if r.gen_bool(0.7) {
                low.set(i, j, small_q(r));
            }
            if r.gen_bool(0.7) {
                up.set(j, i, small_q(r));
            }
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    // half the samples stay generic, the rest land in smaller cells
    if r.gen_bool(0.5) {
        perm.shuffle(r);
    } else {
        perm.reverse();
    }
    let mut d: Vec<Rational> = (0..n - 1).map(|_| nonzero_q(r)).collect();
    let prod = d.iter().fold(q(1), |a, x| a * x);
    d.push(prod.recip());
    let mut mono = QMatrix::zeros(n);
    for (c, &row) in perm.iter().enumerate() {
        mono.set(row, c, d[c].clone());
    }
    let det = mono.det();
    if det != q(1) {
        // odd permutations need one sign flip
        let v = mono.get(perm[0], 0).clone();
        mono.set(perm[0], 0, -v);
    }
    let m = low.mul(&mono).mul(&up);
    assert_eq!(m.det(), q(1));
    m
}

/// A_0^+ + Σ a_i H_i + Σ b_β X_β over negative β, entries of degree ≤ 2.
pub fn plane_matrix(r: &mut impl Rng, rep: &ChevalleyRep) -> Matrix<DiffPoly> {
    let l = rep.rank() as u32;
    let mut c = Coords { h: Vec::new(), x: BTreeMap::new() };
    for _ in 0..rep.rank() {
        c.h.push(diffpoly(r, l, 1, 2, 3));
    }
    for b in rep.rs().neg_order() {
        if r.gen_bool(0.5) {
            c.x.insert(b.clone(), diffpoly(r, l, 1, 2, 2));
        }
    }
    rep.a0_plus::<DiffPoly>().add(&rep.combine(&c))
}

/// A structured product of unipotent, torus and Weyl factors over Liouvillian
/// expressions.
pub fn group_element(r: &mut impl Rng, rep: &ChevalleyRep, len: usize) -> GroupElement<LiouvExpr> {
    let roots = rep.rs().roots();
    let l = rep.rank();
    let vars = l as u32;
    let mut factors = Vec::new();
    for _ in 0..len {
        match r.gen_range(0..10) {
            0..=5 => {
                let root = roots.choose(r).unwrap().clone();
                let p = diffpoly(r, vars, 1, 2, 2);
                let x = if r.gen_bool(0.3) { LiouvExpr::integral(&LiouvExpr::poly(p)) } else { LiouvExpr::poly(p) };
                factors.push(Factor::Unipotent(root, x));
            }
            6..=8 => {
                let g = diffpoly(r, vars, 1, 1, 2);
                factors.push(Factor::Torus(r.gen_range(0..l), LiouvExpr::exp_integral(&g)));
            }
            _ => {
                let word: Vec<usize> = (0..r.gen_range(1..=3)).map(|_| r.gen_range(0..l)).collect();
                factors.push(Factor::Constant(rep.weyl(&word)));
            }
        }
    }
    GroupElement::new(factors)
}

/// Chevalley basis axioms over every pair of roots; panics on the first failure.
pub fn chevalley_axioms(rep: &ChevalleyRep) {
    let rs = rep.rs();
    let l = rep.rank();
    let roots = rs.roots();
    for i in 0..l {
        for j in 0..l {
            assert!(rep.h(i).bracket(rep.h(j)).is_zero());
        }
    }
    for a in &roots {
        let xa = rep.x(a).unwrap();
        assert!(xa.entries().all(|(_, _, v)| v.is_integer()), "X_{a:?} is not integral");
        for i in 0..l {
            let c = rs.cartan_integer(a, &simple(l, i)).unwrap();
            assert_eq!(rep.h(i).bracket(xa), xa.scale(&q(c)), "[H_{i}, X_{a:?}]");
        }
        // [X_α, X_{−α}] is the integral coroot
        let h = xa.bracket(rep.x(&neg(a)).unwrap());
        let c = rep.decompose(&h).unwrap();
        assert!(c.x.values().all(|v| v.is_zero()));
        assert!(c.h.iter().all(|v| v.is_integer()));
        assert_eq!(h, rep.coroot(a).unwrap());
        for b in &roots {
            if b == a || *b == neg(a) {
                continue;
            }
            let br = xa.bracket(rep.x(b).unwrap());
            let s = add(a, b);
            if rs.is_root(&s) {
                let mut p = 0;
                while rs.is_root(&b.iter().zip(a).map(|(u, v)| u - (p + 1) * v).collect::<Vec<_>>()) {
                    p += 1;
                }
                let xs = rep.x(&s).unwrap();
                assert!(br == xs.scale(&q(p + 1)) || br == xs.scale(&q(-p - 1)), "[X_{a:?}, X_{b:?}]");
            } else {
                assert!(br.is_zero(), "[X_{a:?}, X_{b:?}] should vanish");
            }
        }
    }
}
