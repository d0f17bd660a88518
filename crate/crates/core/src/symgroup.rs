//! Group elements as structured products, with logarithmic derivative,
//! adjoint action and gauge transformations over any coefficient domain.

use crate::chevalley::{ChevalleyRep, Coords};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, QMatrix};
use crate::rootsys::Root;
use crate::scalar::Scalar;

/// Structural tag of a matrix, deciding how it may be inverted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tag {
    UnipotentLower,
    UnipotentUpper,
    TorusDiagonal,
    /// All entries are rational constants.
    Constant,
    General,
}

/// Whether `m` has the shape claimed by `tag`.
pub fn check_tag<T: Scalar>(m: &Matrix<T>, tag: Tag) -> bool {
    match tag {
        Tag::UnipotentLower => m.is_lower_unitriangular(),
        Tag::UnipotentUpper => m.is_upper_unitriangular(),
        Tag::TorusDiagonal => {
            m.is_diagonal() && (0..m.n()).all(|i| m.get(i, i).try_inverse().is_some())
        }
        Tag::Constant => m.entries().all(|(_, _, v)| v.as_q().is_some()),
        Tag::General => true,
    }
}

/// Closed-form inverse dispatched on the tag; general matrices are refused.
pub fn invert_tagged<T: Scalar>(m: &Matrix<T>, tag: Tag) -> Result<Matrix<T>> {
    if !check_tag(m, tag) {
        return Err(Error::NotClosedFormInvertible(format!("matrix does not match tag {tag:?}")));
    }
    let n = m.n();
    match tag {
        Tag::UnipotentLower | Tag::UnipotentUpper => {
            // (I + N)^{-1} = Σ (−N)^k, N nilpotent
            let minus_n = Matrix::identity(n).sub(m);
            let mut out = Matrix::identity(n);
            let mut p = Matrix::identity(n);
            for _ in 1..n {
                p = p.mul(&minus_n);
                if p.is_zero() {
                    break;
                }
                out = out.add(&p);
            }
            Ok(out)
        }
        Tag::TorusDiagonal => Ok(Matrix::diag(
            (0..n).map(|i| m.get(i, i).try_inverse().expect("checked")).collect(),
        )),
        Tag::Constant => {
            let qm = m.map(|v| v.as_q().expect("checked"));
            let inv = qm
                .inverse()
                .ok_or_else(|| Error::NotClosedFormInvertible("singular constant matrix".into()))?;
            Ok(Matrix::lift(&inv))
        }
        Tag::General => Err(Error::NotClosedFormInvertible(
            "no structure to invert a general symbolic matrix".into(),
        )),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Factor<T> {
    /// u_α(x)
    Unipotent(Root, T),
    /// t_i(z)
    Torus(usize, T),
    /// constant invertible matrix such as n(w)
    Constant(QMatrix),
}

/// A product of structured factors.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<T> {
    pub factors: Vec<Factor<T>>,
}

impl<T: Scalar> GroupElement<T> {
    pub fn identity() -> Self {
        GroupElement { factors: Vec::new() }
    }

    pub fn new(factors: Vec<Factor<T>>) -> Self {
        GroupElement { factors }
    }

    pub fn then(mut self, f: Factor<T>) -> Self {
        self.factors.push(f);
        self
    }

    fn factor_matrix(rep: &ChevalleyRep, f: &Factor<T>) -> Result<Matrix<T>> {
        match f {
            Factor::Unipotent(r, x) => rep.unipotent(r, x),
            Factor::Torus(i, z) => rep.torus(*i, z),
            Factor::Constant(m) => Ok(Matrix::lift(m)),
        }
    }

    fn factor_inverse(rep: &ChevalleyRep, f: &Factor<T>) -> Result<Matrix<T>> {
        match f {
            Factor::Unipotent(r, x) => rep.unipotent(r, &x.neg()),
            Factor::Torus(i, z) => {
                let zi = z
                    .try_inverse()
                    .ok_or_else(|| Error::NotClosedFormInvertible("torus parameter".into()))?;
                rep.torus(*i, &zi)
            }
            Factor::Constant(m) => m
                .inverse()
                .map(|m| Matrix::lift(&m))
                .ok_or_else(|| Error::NotClosedFormInvertible("singular constant factor".into())),
        }
    }

    /// ℓδ of a single factor.
    fn factor_logderiv(rep: &ChevalleyRep, f: &Factor<T>) -> Result<Matrix<T>> {
        let n = rep.dim();
        Ok(match f {
            Factor::Unipotent(r, x) => Matrix::lift(rep.x(r)?).times(&x.derive()),
            Factor::Torus(i, z) => {
                let zi = z
                    .try_inverse()
                    .ok_or_else(|| Error::NotClosedFormInvertible("torus parameter".into()))?;
                let ld = z.derive().mul(&zi);
                let h = rep.h(*i).scale(&crate::scalar::q(rep.orientation()[*i]));
                Matrix::lift(&h).times(&ld)
            }
            Factor::Constant(_) => Matrix::zeros(n),
        })
    }

    pub fn matrix(&self, rep: &ChevalleyRep) -> Result<Matrix<T>> {
        let mut out = Matrix::identity(rep.dim());
        for f in &self.factors {
            out = out.mul(&Self::factor_matrix(rep, f)?);
        }
        Ok(out)
    }

    pub fn inverse_matrix(&self, rep: &ChevalleyRep) -> Result<Matrix<T>> {
        let mut out = Matrix::identity(rep.dim());
        for f in self.factors.iter().rev() {
            out = out.mul(&Self::factor_inverse(rep, f)?);
        }
        Ok(out)
    }

    /// ℓδ(g) = ∂(g)g^{-1} by the product rule ℓδ(AB) = ℓδ(A) + Ad(A)(ℓδ(B)).
    pub fn log_derivative(&self, rep: &ChevalleyRep) -> Result<Matrix<T>> {
        let mut acc: Matrix<T> = Matrix::zeros(rep.dim());
        for f in self.factors.iter().rev() {
            let m = Self::factor_matrix(rep, f)?;
            let mi = Self::factor_inverse(rep, f)?;
            acc = Self::factor_logderiv(rep, f)?.add(&conj(&m, &acc, &mi));
        }
        Ok(acc)
    }

    /// Ad(g)(A) = gAg^{-1}.
    pub fn adjoint(&self, rep: &ChevalleyRep, a: &Matrix<T>) -> Result<Matrix<T>> {
        let mut acc = a.clone();
        for f in self.factors.iter().rev() {
            let m = Self::factor_matrix(rep, f)?;
            let mi = Self::factor_inverse(rep, f)?;
            acc = conj(&m, &acc, &mi);
        }
        Ok(acc)
    }

    /// Ad(g)(A) + ℓδ(g).
    pub fn gauge(&self, rep: &ChevalleyRep, a: &Matrix<T>) -> Result<Matrix<T>> {
        Ok(self.adjoint(rep, a)?.add(&self.log_derivative(rep)?))
    }
}

fn conj<T: Scalar>(m: &Matrix<T>, a: &Matrix<T>, mi: &Matrix<T>) -> Matrix<T> {
    if a.is_zero() {
        return a.clone();
    }
    m.mul(a).mul(mi)
}

/// ∂(M)M^{-1} for a matrix with a structural tag.
pub fn log_derivative_tagged<T: Scalar>(m: &Matrix<T>, tag: Tag) -> Result<Matrix<T>> {
    Ok(m.derive().mul(&invert_tagged(m, tag)?))
}

pub fn decompose_in_basis<T: Scalar>(rep: &ChevalleyRep, a: &Matrix<T>) -> Result<Coords<T>> {
    rep.decompose(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::Calibration;
    use crate::diffpoly::DiffPoly;
    use crate::liouville_expr::LiouvExpr;
    use crate::rootsys::{neg, simple, RootSystem, RootType};
    use crate::scalar::q;

    fn rep(k: RootType, l: usize) -> ChevalleyRep {
        ChevalleyRep::build_with(&RootSystem::build(k, l).unwrap(), &Calibration::embedded()).unwrap()
    }

    fn p(s: &str) -> DiffPoly {
        DiffPoly::parse(s).unwrap()
    }

    #[test]
    fn unipotent_log_derivative() {
        let r = rep(RootType::A, 3);
        for i in 0..6 {
            let x = DiffPoly::var(i as u32 + 1);
            let g = GroupElement::new(vec![Factor::Unipotent(r.rs().beta(i).clone(), x.clone())]);
            let ld = g.log_derivative(&r).unwrap();
            assert_eq!(ld, Matrix::lift(r.xi(i)).times(&x.derive()));
            let m = g.matrix(&r).unwrap();
            assert_eq!(log_derivative_tagged(&m, Tag::UnipotentLower).unwrap(), ld);
        }
        assert!(GroupElement::<DiffPoly>::identity().log_derivative(&r).unwrap().is_zero());
    }

    #[test]
    fn torus_log_derivative() {
        let r = rep(RootType::A, 3);
        let z = LiouvExpr::exp_integral(&p("-η_3"));
        let g = GroupElement::new(vec![Factor::Torus(0, z)]);
        let ld = g.log_derivative(&r).unwrap();
        let expect = Matrix::lift(r.h(0)).times(&LiouvExpr::poly(p("-η_3")));
        assert_eq!(ld, expect);
    }

    #[test]
    fn remark_adjoint_formulas() {
        let r = rep(RootType::A, 3);
        let x = DiffPoly::var(1);
        for i in 0..3 {
            for j in 0..3 {
                let b = simple(3, j);
                let g = GroupElement::new(vec![Factor::Unipotent(b.clone(), x.clone())]);
                let hi = Matrix::lift(r.h(i));
                let c = r.rs().cartan_integer(&b, &simple(3, i)).unwrap();
                let expect = hi.sub(&Matrix::lift(r.x(&b).unwrap()).times(&x.scale(&q(c))));
                assert_eq!(g.adjoint(&r, &hi).unwrap(), expect);
            }
            let b = simple(3, i);
            let g = GroupElement::new(vec![Factor::Unipotent(b.clone(), x.clone())]);
            let xm = Matrix::lift(r.x(&neg(&b)).unwrap());
            let expect = xm
                .add(&Matrix::lift(&r.coroot(&b).unwrap()).times(&x))
                .sub(&Matrix::lift(r.x(&b).unwrap()).times(&x.mul(&x)));
            assert_eq!(g.adjoint(&r, &xm).unwrap(), expect);
        }
    }

    #[test]
    fn sl2_riccati_gauge() {
        let r = rep(RootType::A, 1);
        let eta = DiffPoly::var(1);
        let a = r.a0_plus::<DiffPoly>().add(&Matrix::lift(r.h(0)).times(&eta));
        let g = GroupElement::new(vec![Factor::Unipotent(vec![-1], eta.clone())]);
        let out = g.gauge(&r, &a).unwrap();
        let expect = Matrix::from_rows(vec![
            vec![DiffPoly::zero(), DiffPoly::int(1)],
            vec![p("η_1' + η_1^2"), DiffPoly::zero()],
        ])
        .unwrap();
        assert_eq!(out, expect);
        let z: Matrix<DiffPoly> = Matrix::zeros(2);
        assert_eq!(g.gauge(&r, &z).unwrap(), g.log_derivative(&r).unwrap());
        assert_eq!(GroupElement::identity().gauge(&r, &a).unwrap(), a);
    }

    #[test]
    fn v6_from_product() {
        let r = rep(RootType::A, 3);
        let g = GroupElement::new(
            (0..6)
                .map(|i| Factor::Unipotent(r.rs().beta(i).clone(), DiffPoly::var(i as u32 + 1)))
                .collect(),
        );
        let c = decompose_in_basis(&r, &g.log_derivative(&r).unwrap()).unwrap();
        assert_eq!(c.get(r.rs().beta(5)), p("η_6' + η_3η_4' - η_5'η_1 + η_3'η_2η_1"));
    }

    #[test]
    fn general_matrices_are_refused() {
        let m = Matrix::from_rows(vec![
            vec![DiffPoly::var(1), DiffPoly::int(1)],
            vec![DiffPoly::int(1), DiffPoly::int(0)],
        ])
        .unwrap();
        assert!(matches!(
            invert_tagged(&m, Tag::General),
            Err(Error::NotClosedFormInvertible(_))
        ));
        assert!(invert_tagged(&m, Tag::UnipotentLower).is_err());
    }
}
