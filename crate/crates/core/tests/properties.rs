mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use pv_core::bruhat::{sl2_relation, Bruhat, Convention};
use pv_core::chevalley::ChevalleyRep;
use pv_core::construct::{a_g_from, Pipeline};
use pv_core::gauge::normalize_to_ag;
use pv_core::liouville_expr::LiouvExpr;
use pv_core::matrix::{Matrix, QMatrix};
use pv_core::rootsys::RootType;
use pv_core::scalar::{q, qf};
use pv_core::symgroup::{Factor, GroupElement};
use pv_core::{DiffPoly, JetVar, Monomial};

use common::*;

const SYSTEMS: [(RootType, usize); 5] = [(RootType::A, 1), (RootType::A, 2), (RootType::A, 3), (RootType::A, 4), (RootType::G2, 2)];

#[test]
fn chevalley_axioms_exhaustive() {
    for (k, l) in SYSTEMS {
        chevalley_axioms(&rep(k, l));
    }
}

#[test]
fn full_rank_systems() {
    for (k, l) in SYSTEMS.into_iter().chain([(RootType::A, 5)]) {
        let r = rep(k, l);
        for level in (r.rs().min_height() + 1)..=0 {
            r.level_system(level).unwrap_or_else(|e| panic!("{k}{l} level {level}: {e}"));
        }
        // the construction re-checks every rank condition along the way
        Pipeline::run(&r).unwrap_or_else(|e| panic!("{k}{l}: {e}"));
    }
}

fn arb_diffpoly() -> impl Strategy<Value = DiffPoly> {
    let term = (-9i64..=9, 1i64..=3, prop::collection::vec((1u32..=3, 0u32..=3), 0..=3));
    prop::collection::vec(term, 0..=5).prop_map(|ts| {
        ts.into_iter().fold(DiffPoly::zero(), |acc, (n, d, f)| {
            let m = Monomial::from_factors(f.into_iter().map(|(v, o)| (JetVar::new(v, o), 1)).collect());
            acc.add(&DiffPoly::term(qf(n, d), m))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn leibniz(p in arb_diffpoly(), r in arb_diffpoly()) {
        prop_assert_eq!(p.mul(&r).derive(), p.derive().mul(&r).add(&p.mul(&r.derive())));
        prop_assert_eq!(p.add(&r).derive(), p.derive().add(&r.derive()));
        prop_assert_eq!(p.derive().derive().derive(), p.derive_n(3));
    }

    #[test]
    fn substitution_prolongs(p in arb_diffpoly(), s1 in arb_diffpoly(), s2 in arb_diffpoly()) {
        let sigma: BTreeMap<u32, DiffPoly> = [(1, s1), (2, s2)].into_iter().collect();
        let lhs = p.substitute_partial(&sigma).derive();
        let rhs = p.derive().substitute_partial(&sigma);
        prop_assert_eq!(lhs, rhs);
        // evaluation is the same ring map
        let ev = p.eval(&mut |v| Ok(sigma.get(&v).cloned().unwrap_or_else(|| DiffPoly::var(v)))).unwrap();
        prop_assert_eq!(ev, p.substitute_partial(&sigma));
    }

    #[test]
    fn display_round_trips(p in arb_diffpoly()) {
        prop_assert_eq!(DiffPoly::parse(&p.to_string()).unwrap(), p);
    }
}

fn direct_logderiv(rep: &ChevalleyRep, g: &GroupElement<LiouvExpr>) -> Matrix<LiouvExpr> {
    g.matrix(rep).unwrap().derive().mul(&g.inverse_matrix(rep).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn logderiv_product_rule(seed in any::<u64>(), which in 0usize..3) {
        let (k, l) = [(RootType::A, 2), (RootType::B, 2), (RootType::A, 1)][which];
        let rep = rep(k, l);
        let mut r = rng(seed);
        let g = group_element(&mut r, &rep, 3);
        let h = group_element(&mut r, &rep, 2);
        let gh = GroupElement::new(g.factors.iter().chain(&h.factors).cloned().collect());
        let ld = gh.log_derivative(&rep).unwrap();
        // product rule against the defining formula ∂(M)M^{-1}
        prop_assert_eq!(&ld, &direct_logderiv(&rep, &gh));
        let split = g.log_derivative(&rep).unwrap().add(&g.adjoint(&rep, &h.log_derivative(&rep).unwrap()).unwrap());
        prop_assert_eq!(&ld, &split);
        // decomposable: ℓδ lands in the Lie algebra
        prop_assert!(rep.decompose(&ld).is_ok());
        // gauge composes
        let a = rep.a0_plus::<LiouvExpr>();
        prop_assert_eq!(gh.gauge(&rep, &a).unwrap(), g.gauge(&rep, &h.gauge(&rep, &a).unwrap()).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn bruhat_recomposes_uniquely(seed in any::<u64>(), n in 3usize..=4) {
        let b = Bruhat::for_sl(n).unwrap();
        let mut r = rng(seed);
        let m = sl_matrix(&mut r, n);
        for conv in [Convention::Negative, Convention::Positive] {
            let f = b.decompose(&m, conv).unwrap();
            prop_assert_eq!(&f.recompose(), &m);
            prop_assert!(b.in_uprime_w(&f));
            prop_assert_eq!(&b.decompose(&f.recompose(), conv).unwrap(), &f);
        }
    }

    #[test]
    fn bruhat_cell_is_stable(seed in any::<u64>(), n in 3usize..=4) {
        let b = Bruhat::for_sl(n).unwrap();
        let mut r = rng(seed);
        let m = sl_matrix(&mut r, n);
        let f = b.decompose(&m, Convention::Negative).unwrap();
        let mut low = QMatrix::identity(n);
        let mut low2 = QMatrix::identity(n);
        for i in 1..n {
            for j in 0..i {
                low.set(i, j, small_q(&mut r));
                low2.set(i, j, small_q(&mut r));
            }
        }
        let g = b.decompose(&low.mul(&m).mul(&low2), Convention::Negative).unwrap();
        prop_assert_eq!(&g.w, &f.w);
        // right multiplication by B^- keeps u'
        let h = b.decompose(&m.mul(&low2), Convention::Negative).unwrap();
        prop_assert_eq!(&h.uprime, &f.uprime);
    }

    #[test]
    fn sl2_relation_holds(n in -50i64..=50, d in 1i64..=20) {
        prop_assume!(n != 0);
        let (l, r) = sl2_relation(&qf(n, d));
        prop_assert_eq!(l, r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn gauge_normal_form_is_an_invariant(seed in any::<u64>(), l in 2usize..=3) {
        let rep = rep(RootType::A, l);
        let mut r = rng(seed);
        let a = plane_matrix(&mut r, &rep);
        let n = normalize_to_ag(&rep, &a).unwrap();
        prop_assert_eq!(n.element.gauge(&rep, &a).unwrap(), a_g_from(&rep, &n.comp, &n.f));
        // idempotent on its own output
        let again = normalize_to_ag(&rep, &a_g_from(&rep, &n.comp, &n.f)).unwrap();
        prop_assert!(again.element.factors.is_empty());
        prop_assert_eq!(&again.f, &n.f);
        // the normal form only sees the U^- orbit
        let neg_roots = rep.rs().neg_order().to_vec();
        let u = GroupElement::new(
            neg_roots.iter().take(3).map(|b| Factor::Unipotent(b.clone(), diffpoly(&mut r, l as u32, 1, 2, 2))).collect(),
        );
        let moved = normalize_to_ag(&rep, &u.gauge(&rep, &a).unwrap()).unwrap();
        prop_assert_eq!(&moved.f, &n.f);
    }
}

#[test]
fn sl2_relation_small_values() {
    for x in [q(3), q(-1), qf(2, 7), qf(-5, 3)] {
        let (l, r): (QMatrix, QMatrix) = sl2_relation(&x);
        assert_eq!(l, r, "x = {x}");
    }
}
