//! Bruhat normal forms x = u'·n(w)·t·u for SL_n over Q.
//!
//! The negative convention takes u', u lower unitriangular (Borel B^- = TU^-)
//! and u' ∈ U^- ∩ n(w)U^+n(w)^{-1}; the positive convention is the mirror
//! image with upper unitriangular factors. Representatives n(w) come from the
//! Chevalley representation of A_{n-1}, so they agree with the ones used by
//! the construction.

use num_traits::Zero;
use serde_json::{json, Value};

use crate::chevalley::ChevalleyRep;
use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::rootsys::{neg, Root, RootSystem, RootType};
use crate::scalar::{fmt_q, q, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    Positive,
    Negative,
}

impl std::str::FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive" => Ok(Convention::Positive),
            "negative" => Ok(Convention::Negative),
            _ => Err(Error::Parse(format!("unknown convention {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BruhatForm {
    pub convention: Convention,
    /// 1-based permutation: column j of n(w) is nonzero in row w[j].
    pub w: Vec<usize>,
    /// Reduced word for w, 0-based simple reflections.
    pub word: Vec<usize>,
    pub n: QMatrix,
    pub uprime: QMatrix,
    pub t: QMatrix,
    pub u: QMatrix,
    /// Coordinates of u' and u along the ordered root list (Φ^- for the
    /// negative convention, its negative otherwise), and of t along t_i.
    pub x: Vec<Rational>,
    pub z: Vec<Rational>,
    pub y: Vec<Rational>,
}

impl BruhatForm {
    pub fn recompose(&self) -> QMatrix {
        self.uprime.mul(&self.n).mul(&self.t).mul(&self.u)
    }

    pub fn is_longest(&self) -> bool {
        let n = self.w.len();
        self.w.iter().enumerate().all(|(j, &r)| r == n - j)
    }

    pub fn to_json(&self) -> Value {
        let qs = |v: &[Rational]| v.iter().map(fmt_q).collect::<Vec<_>>();
        let diag: Vec<Rational> = (0..self.t.n()).map(|i| self.t.get(i, i).clone()).collect();
        json!({
            "convention": match self.convention { Convention::Positive => "positive", Convention::Negative => "negative" },
            "w": self.w,
            "word": self.word.iter().map(|i| i + 1).collect::<Vec<_>>(),
            "n": self.n.to_json(),
            "uprime": self.uprime.to_json(),
            "t": qs(&diag),
            "u": self.u.to_json(),
            "x": qs(&self.x),
            "z": qs(&self.z),
            "y": qs(&self.y),
        })
    }
}

pub struct Bruhat {
    rep: ChevalleyRep,
}

impl Bruhat {
    /// SL_n with the calibration from the environment.
    pub fn for_sl(n: usize) -> Result<Bruhat> {
        if n < 2 {
            return Err(Error::UnsupportedType { label: "A".into(), rank: n.saturating_sub(1) });
        }
        let rs = RootSystem::build(RootType::A, n - 1)?;
        Bruhat::with_rep(ChevalleyRep::build(&rs)?)
    }

    pub fn with_rep(rep: ChevalleyRep) -> Result<Bruhat> {
        if rep.rs().kind() != RootType::A || rep.dim() != rep.rank() + 1 {
            return Err(Error::UnsupportedRep(format!("Bruhat forms need SL_n, got {}", rep.rs().label())));
        }
        Ok(Bruhat { rep })
    }

    pub fn rep(&self) -> &ChevalleyRep {
        &self.rep
    }

    pub fn n(&self) -> usize {
        self.rep.dim()
    }

    pub fn decompose(&self, m: &QMatrix, conv: Convention) -> Result<BruhatForm> {
        let n = self.n();
        if m.n() != n {
            return Err(Error::DimMismatch(m.n(), n));
        }
        let det = m.det();
        if det != q(1) {
            return Err(Error::NotUnimodular(fmt_q(&det)));
        }
        let (left, mono, right) = match conv {
            Convention::Negative => lower_factor(m)?,
            Convention::Positive => {
                let j = flip(n);
                let (l, w, r) = lower_factor(&j.mul(m).mul(&j))?;
                (j.mul(&l).mul(&j), j.mul(&w).mul(&j), j.mul(&r).mul(&j))
            }
        };
        let perm: Vec<usize> = (0..n)
            .map(|c| (0..n).find(|&r| !mono.get(r, c).is_zero()).expect("monomial column"))
            .collect();
        let word = reduced_word(&perm);
        let rep_n = self.rep.weyl(&word);
        if (0..n).any(|c| (0..n).any(|r| rep_n.get(r, c).is_zero() != (r != perm[c]))) {
            return Err(Error::structure("Bruhat", "Weyl representative has the wrong pattern"));
        }
        let t = rep_n.inverse().expect("signed permutation").mul(&mono);
        if !t.is_diagonal() {
            return Err(Error::structure("Bruhat", "n(w)^{-1}·W is not diagonal"));
        }
        let roots: Vec<Root> = match conv {
            Convention::Negative => self.rep.rs().neg_order().to_vec(),
            Convention::Positive => self.rep.rs().neg_order().iter().map(|r| neg(r)).collect(),
        };
        let x = self.coordinates(&left, &roots)?;
        let y = self.coordinates(&right, &roots)?;
        let z = self.torus_coordinates(&t)?;
        let form = BruhatForm {
            convention: conv,
            w: perm.iter().map(|r| r + 1).collect(),
            word,
            n: rep_n,
            uprime: left,
            t,
            u: right,
            x,
            z,
            y,
        };
        if form.recompose() != *m {
            return Err(Error::VerificationFailure("Bruhat recomposition".into()));
        }
        if !self.in_uprime_w(&form) {
            return Err(Error::structure("Bruhat", "u' is not in U'_w"));
        }
        Ok(form)
    }

    /// u' ∈ U'_w: conjugating back by n(w) lands in the opposite unipotent group.
    pub fn in_uprime_w(&self, f: &BruhatForm) -> bool {
        let ninv = f.n.inverse().expect("signed permutation");
        let c = ninv.mul(&f.uprime).mul(&f.n);
        match f.convention {
            Convention::Negative => f.uprime.is_lower_unitriangular() && c.is_upper_unitriangular(),
            Convention::Positive => f.uprime.is_upper_unitriangular() && c.is_lower_unitriangular(),
        }
    }

    /// Coordinates x with v = Π u_{r_k}(x_k) in the given order; the order
    /// must be by height moving away from zero.
    fn coordinates(&self, v: &QMatrix, roots: &[Root]) -> Result<Vec<Rational>> {
        let mut rest = v.clone();
        let mut out = Vec::with_capacity(roots.len());
        for r in roots {
            let (a, b, c) = {
                let xr = self.rep.x(r)?;
                let (a, b, c) = xr.first_nonzero().expect("root vector is nonzero");
                (a, b, c.clone())
            };
            let xk = rest.get(a, b) / &c;
            rest = self.rep.unipotent(r, &-xk.clone())?.mul(&rest);
            out.push(xk);
        }
        if rest != QMatrix::identity(v.n()) {
            return Err(Error::structure("Bruhat", "unipotent factor has no product form"));
        }
        Ok(out)
    }

    /// t = Π t_i(z_i) with t_i(z) = diag(z^{o_i (H_i)_jj}).
    fn torus_coordinates(&self, t: &QMatrix) -> Result<Vec<Rational>> {
        let l = self.rep.rank();
        let mut prod = q(1);
        let mut z = Vec::with_capacity(l);
        for k in 0..l {
            prod *= t.get(k, k);
            let o = self.rep.orientation()[k];
            z.push(if o >= 0 { prod.clone() } else { prod.recip() });
        }
        let back = (0..l).try_fold(QMatrix::identity(self.n()), |acc, i| {
            Ok::<_, Error>(acc.mul(&self.rep.torus(i, &z[i])?))
        })?;
        if back != *t {
            return Err(Error::structure("Bruhat", "torus factor does not match the t_i"));
        }
        Ok(z)
    }

    /// Bruhat form of Y0·g, which must stay in the cell of the longest element.
    pub fn act_on_normal_form(&self, y0: &QMatrix, g: &QMatrix, conv: Convention) -> Result<BruhatForm> {
        let f0 = self.decompose(y0, conv)?;
        if !f0.is_longest() {
            return Err(Error::CellDegeneration(f0.w));
        }
        let f = self.decompose(&y0.mul(g), conv)?;
        if !f.is_longest() {
            return Err(Error::CellDegeneration(f.w));
        }
        Ok(f)
    }
}

/// n̄·ū_{−α}(x) = ū_{−α}(−1/x)·t̄(x)·ū_α(1/x) in SL_2; returns both sides.
pub fn sl2_relation(x: &Rational) -> (QMatrix, QMatrix) {
    let one = q(1);
    let zero = q(0);
    let m = |a: &Rational, b: &Rational, c: &Rational, d: &Rational| {
        QMatrix::from_rows(vec![vec![a.clone(), b.clone()], vec![c.clone(), d.clone()]]).unwrap()
    };
    let nbar = m(&zero, &one, &-one.clone(), &zero);
    let lower = |s: &Rational| m(&one, &zero, s, &one);
    let upper = |s: &Rational| m(&one, s, &zero, &one);
    let inv = x.recip();
    let tbar = m(x, &zero, &zero, &inv);
    (nbar.mul(&lower(x)), lower(&-inv.clone()).mul(&tbar).mul(&upper(&inv)))
}

fn flip(n: usize) -> QMatrix {
    QMatrix::from_fn(n, |i, j| if i + j + 1 == n { q(1) } else { q(0) })
}

/// M = L·W·R with L, R lower unitriangular, W monomial and L ∈ U^- ∩ W U^+ W^{-1}.
fn lower_factor(m: &QMatrix) -> Result<(QMatrix, QMatrix, QMatrix)> {
    let n = m.n();
    let mut a = m.rows();
    let mut rows_op = QMatrix::identity(n);
    let mut cols_op = QMatrix::identity(n);
    let mut used = vec![false; n];
    // row r pivots on its rightmost live column; earlier rows clear down, later
    // columns clear left, so both operations stay lower unitriangular
    for r in 0..n {
        let j = (0..n)
            .rev()
            .find(|&j| !used[j] && !a[r][j].is_zero())
            .ok_or_else(|| Error::NotUnimodular("0/1".into()))?;
        used[j] = true;
        let piv = a[r][j].clone();
        for c in 0..j {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &piv;
            for row in a.iter_mut() {
                let d = &row[j] * &f;
                row[c] -= d;
            }
            let mut e = QMatrix::identity(n);
            e.set(j, c, -f);
            cols_op = cols_op.mul(&e);
        }
        for k in r + 1..n {
            if a[k][j].is_zero() {
                continue;
            }
            let f = &a[k][j] / &piv;
            for c in 0..n {
                let d = &a[r][c] * &f;
                a[k][c] -= d;
            }
            let mut e = QMatrix::identity(n);
            e.set(k, r, -f);
            rows_op = e.mul(&rows_op);
        }
    }
    let w = QMatrix::from_rows(a)?;
    let l = rows_op.inverse().expect("unitriangular");
    let r = cols_op.inverse().expect("unitriangular");
    // W^{-1} L W = U Λ; the U part conjugates back into U'_w, Λ moves right
    let winv = w.inverse().expect("monomial");
    let (up, lo) = ul_split(&winv.mul(&l).mul(&w))?;
    Ok((w.mul(&up).mul(&winv), w, lo.mul(&r)))
}

/// K = U·Λ with U upper and Λ lower unitriangular, via LU of the flipped matrix.
fn ul_split(k: &QMatrix) -> Result<(QMatrix, QMatrix)> {
    let n = k.n();
    let j = flip(n);
    let kt = j.mul(k).mul(&j);
    let mut l = QMatrix::identity(n);
    let mut u = QMatrix::zeros(n);
    for i in 0..n {
        for c in i..n {
            let mut s = kt.get(i, c).clone();
            for p in 0..i {
                s -= l.get(i, p) * u.get(p, c);
            }
            u.set(i, c, s);
        }
        if u.get(i, i).is_zero() {
            return Err(Error::structure("Bruhat", "UL split hit a zero pivot"));
        }
        for r in i + 1..n {
            let mut s = kt.get(r, i).clone();
            for p in 0..i {
                s -= l.get(r, p) * u.get(p, i);
            }
            l.set(r, i, s / u.get(i, i));
        }
    }
    let up = j.mul(&l).mul(&j);
    let lo = j.mul(&u).mul(&j);
    if !lo.is_lower_unitriangular() {
        return Err(Error::structure("Bruhat", "UL split is not unitriangular"));
    }
    Ok((up, lo))
}

/// Reduced word (0-based) with P_perm = s_{i_1}⋯s_{i_k}.
fn reduced_word(perm: &[usize]) -> Vec<usize> {
    let mut p = perm.to_vec();
    let mut word = Vec::new();
    while let Some(i) = (0..p.len().saturating_sub(1)).find(|&i| p[i] > p[i + 1]) {
        p.swap(i, i + 1);
        word.push(i);
    }
    word.reverse();
    word
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qf;

    fn qm(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn identity_is_trivial() {
        let b = Bruhat::for_sl(3).unwrap();
        for conv in [Convention::Negative, Convention::Positive] {
            let f = b.decompose(&QMatrix::identity(3), conv).unwrap();
            assert_eq!(f.w, vec![1, 2, 3]);
            assert!(f.word.is_empty());
            assert_eq!(f.uprime, QMatrix::identity(3));
            assert_eq!(f.t, QMatrix::identity(3));
            assert_eq!(f.u, QMatrix::identity(3));
        }
    }

    #[test]
    fn longest_representative_sl4() {
        let b = Bruhat::for_sl(4).unwrap();
        let nbar = QMatrix::from_entries(4, &[(1, 4, 1), (2, 3, -1), (3, 2, 1), (4, 1, -1)]);
        let f = b.decompose(&nbar, Convention::Negative).unwrap();
        assert!(f.is_longest());
        assert_eq!(f.uprime, QMatrix::identity(4));
        assert_eq!(f.u, QMatrix::identity(4));
        assert_eq!(f.n.mul(&f.t), nbar);
        assert!(f.t.is_diagonal());
    }

    #[test]
    fn sl3_recomposition_and_uniqueness() {
        let b = Bruhat::for_sl(3).unwrap();
        let m = qm(&[&[1, 2, 0], &[0, 1, 3], &[0, 0, 1]])
            .mul(&qm(&[&[0, 0, 1], &[0, -1, 0], &[1, 0, 0]]))
            .mul(&qm(&[&[1, 0, 0], &[-2, 1, 0], &[5, 4, 1]]));
        let m = m.mul(&QMatrix::diag(vec![qf(1, 3), q(3), q(1)]));
        assert_eq!(m.det(), q(1));
        for conv in [Convention::Negative, Convention::Positive] {
            let f = b.decompose(&m, conv).unwrap();
            assert_eq!(f.recompose(), m);
            let again = b.decompose(&f.recompose(), conv).unwrap();
            assert_eq!(again, f);
        }
    }

    #[test]
    fn small_cells() {
        let b = Bruhat::for_sl(3).unwrap();
        // block permutation cell with a non-trivial u'
        let m = qm(&[&[1, 0, 0], &[0, 0, 1], &[0, -1, 5]]);
        let f = b.decompose(&m, Convention::Negative).unwrap();
        assert_eq!(f.w, vec![1, 3, 2]);
        assert_eq!(f.recompose(), m);
        assert!(b.in_uprime_w(&f));
    }

    #[test]
    fn not_unimodular() {
        let b = Bruhat::for_sl(2).unwrap();
        let err = b.decompose(&qm(&[&[2, 0], &[0, 1]]), Convention::Negative).unwrap_err();
        assert!(matches!(err, Error::NotUnimodular(_)));
    }

    #[test]
    fn sl2_relation_at_three() {
        let (l, r) = sl2_relation(&q(3));
        assert_eq!(l, r);
        let (l, r) = sl2_relation(&qf(-2, 7));
        assert_eq!(l, r);
    }

    #[test]
    fn lower_borel_keeps_x() {
        let b = Bruhat::for_sl(3).unwrap();
        let y0 = b.rep().longest().mul(&qm(&[&[1, 0, 0], &[2, 1, 0], &[1, -1, 1]]));
        let y0 = qm(&[&[1, 0, 0], &[4, 1, 0], &[-3, 2, 1]]).mul(&y0);
        let g = qm(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let f0 = b.act_on_normal_form(&y0, &g, Convention::Negative).unwrap();
        assert_eq!(f0, b.decompose(&y0, Convention::Negative).unwrap());
        let low = QMatrix::from_rows(vec![
            vec![q(2), q(0), q(0)],
            vec![q(5), q(1), q(0)],
            vec![qf(1, 3), q(7), qf(1, 2)],
        ])
        .unwrap();
        let f = b.act_on_normal_form(&y0, &low, Convention::Negative).unwrap();
        assert_eq!(f.x, f0.x);
        assert_eq!(f.uprime, f0.uprime);
    }

    #[test]
    fn leaving_the_big_cell() {
        let b = Bruhat::for_sl(2).unwrap();
        let y0 = qm(&[&[0, 1], &[-1, 0]]);
        let err = b.act_on_normal_form(&y0, &qm(&[&[0, -1], &[1, 0]]), Convention::Negative).unwrap_err();
        assert!(matches!(err, Error::CellDegeneration(_)));
    }
}
