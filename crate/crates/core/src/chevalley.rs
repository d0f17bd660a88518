//! Concrete Chevalley bases, one-parameter subgroups and Weyl representatives.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::calibration::{root_key, Calibration, Generators, SystemCalibration};
use crate::error::{Error, Result};
use crate::linalg::{self, QMat};
use crate::matrix::{Matrix, QMatrix};
use crate::rootsys::{height, neg, simple, Root, RootSystem, RootType};
use crate::scalar::{q, Rational, Scalar};

type Sparse = Vec<(usize, usize, Rational)>;

#[derive(Clone, Debug)]
pub struct ChevalleyRep {
    rs: RootSystem,
    dim: usize,
    h: Vec<QMatrix>,
    x: BTreeMap<Root, QMatrix>,
    /// X^k/k! for k = 1.. until the power vanishes.
    exp_terms: BTreeMap<Root, Vec<QMatrix>>,
    sparse_h: Vec<Sparse>,
    sparse_x: BTreeMap<Root, Sparse>,
    pivot: BTreeMap<Root, (usize, usize)>,
    h_rows: Vec<usize>,
    h_inv: QMat,
    orientation: Vec<i64>,
    overrides: Vec<(Vec<Root>, QMatrix)>,
    w: Vec<QMatrix>,
}

/// Coefficients of a Lie algebra element over {H_i} ∪ {X_α}.
#[derive(Clone, Debug, PartialEq)]
pub struct Coords<T> {
    pub h: Vec<T>,
    pub x: BTreeMap<Root, T>,
}

impl<T: Scalar> Coords<T> {
    pub fn get(&self, r: &[i64]) -> T {
        self.x.get(r).cloned().unwrap_or_else(T::nil)
    }

    pub fn is_zero(&self) -> bool {
        self.h.iter().all(T::is_nil) && self.x.values().all(T::is_nil)
    }
}

/// Key into the calibration file for a root system.
pub fn system_key(rs: &RootSystem) -> String {
    rs.label()
}

fn sparse(m: &QMatrix) -> Sparse {
    m.entries()
        .filter(|(_, _, v)| !v.is_zero())
        .map(|(i, j, v)| (i, j, v.clone()))
        .collect()
}

fn from_entries(n: usize, e: &[(usize, usize, i64)]) -> Result<QMatrix> {
    if let Some(&(i, j, _)) = e.iter().find(|(i, j, _)| *i == 0 || *j == 0 || *i > n || *j > n) {
        return Err(Error::Calibration(format!("entry ({i},{j}) outside {n}x{n}")));
    }
    Ok(QMatrix::from_entries(n, e))
}

/// Simple root vectors of the standard representations of B, C, D and the
/// calibrated 7-dimensional representation of G2.
fn simple_generators(
    rs: &RootSystem,
    gens: Option<&Generators>,
) -> Result<(usize, Vec<QMatrix>, Vec<QMatrix>)> {
    let l = rs.rank();
    // E_{i,i+1} − E_{n−2−i,n−1−i}: ε_{i+1} − ε_{i+2} on both halves.
    let pair = |n: usize, i: usize| {
        QMatrix::unit(n, i, i + 1, 1).sub(&QMatrix::unit(n, n - 2 - i, n - 1 - i, 1))
    };
    let (n, e): (usize, Vec<QMatrix>) = match rs.kind() {
        RootType::A => {
            let n = l + 1;
            (n, (0..l).map(|i| QMatrix::unit(n, i, i + 1, 1)).collect())
        }
        RootType::B => {
            let n = 2 * l + 1;
            let mut e: Vec<QMatrix> = (0..l - 1).map(|i| pair(n, i)).collect();
            e.push(QMatrix::unit(n, l - 1, l, 1).sub(&QMatrix::unit(n, l, l + 1, 1)));
            (n, e)
        }
        RootType::C => {
            let n = 2 * l;
            let mut e: Vec<QMatrix> = (0..l - 1).map(|i| pair(n, i)).collect();
            e.push(QMatrix::unit(n, l - 1, l, 1));
            (n, e)
        }
        RootType::D => {
            let n = 2 * l;
            let mut e: Vec<QMatrix> = (0..l - 1).map(|i| pair(n, i)).collect();
            e.push(QMatrix::unit(n, l - 2, l, 1).sub(&QMatrix::unit(n, l - 1, l + 1, 1)));
            (n, e)
        }
        RootType::G2 => {
            let g = gens.ok_or_else(|| {
                Error::UnsupportedRep("G2 needs calibrated generators".into())
            })?;
            if g.e.len() != 2 || g.f.len() != 2 {
                return Err(Error::Calibration("G2 needs two e and two f generators".into()));
            }
            let e = g.e.iter().map(|x| from_entries(g.dim, x)).collect::<Result<_>>()?;
            let f = g.f.iter().map(|x| from_entries(g.dim, x)).collect::<Result<_>>()?;
            return Ok((g.dim, e, f));
        }
    };
    let mut f: Vec<QMatrix> = e.iter().map(QMatrix::transpose).collect();
    if rs.kind() == RootType::B {
        // the short simple root needs [e, f] to be twice the weight projector
        f[l - 1] = f[l - 1].scale(&q(2));
    }
    Ok((n, e, f))
}

impl ChevalleyRep {
    /// Builds with the calibration from `PV_CALIBRATION` or the embedded default.
    pub fn build(rs: &RootSystem) -> Result<ChevalleyRep> {
        ChevalleyRep::build_with(rs, &Calibration::load()?)
    }

    pub fn build_with(rs: &RootSystem, calib: &Calibration) -> Result<ChevalleyRep> {
        let sys = calib.system(&system_key(rs)).cloned().unwrap_or_default();
        ChevalleyRep::build_from(rs, &sys)
    }

    pub fn build_from(rs: &RootSystem, sys: &SystemCalibration) -> Result<ChevalleyRep> {
        let mut rs = rs.clone();
        let l = rs.rank();
        let (n, e, f) = simple_generators(&rs, sys.generators.as_ref())?;
        if e.iter().chain(&f).any(|m| m.n() != n) {
            return Err(Error::UnsupportedRep("generator dimensions differ".into()));
        }
        let mut h = Vec::with_capacity(l);
        for i in 0..l {
            let hi = e[i].bracket(&f[i]);
            if !hi.is_diagonal() || hi.entries().any(|(_, _, v)| !v.is_integer()) {
                return Err(Error::NonDiagonalCartan(i + 1));
            }
            h.push(hi);
        }

        let mut x: BTreeMap<Root, QMatrix> = BTreeMap::new();
        if rs.kind() == RootType::A {
            // ε_i − ε_j ↦ E_ij
            for i in 0..n {
                for j in i + 1..n {
                    let r: Root = (0..l).map(|k| i64::from(k >= i && k < j)).collect();
                    x.insert(r.clone(), QMatrix::unit(n, i, j, 1));
                    x.insert(neg(&r), QMatrix::unit(n, j, i, 1));
                }
            }
        } else {
            for i in 0..l {
                x.insert(simple(l, i), e[i].clone());
                x.insert(neg(&simple(l, i)), f[i].clone());
            }
            let positive: Vec<Root> = rs.positive_roots().to_vec();
            for b in positive.iter().filter(|b| height(b) > 1) {
                let (i, rest) = (0..l)
                    .find_map(|i| {
                        let mut r = b.clone();
                        r[i] -= 1;
                        rs.is_root(&r).then_some((i, r))
                    })
                    .expect("every non-simple positive root has a simple predecessor");
                let a = simple(l, i);
                let (r, _) = rs.root_string(&rest, &a)?;
                let d = q(r + 1).recip();
                let xp = x[&a].bracket(&x[&rest]).scale(&d);
                let mut xn = x[&neg(&a)].bracket(&x[&neg(&rest)]).scale(&d);
                if xp.bracket(&xn) != coroot_matrix(&rs, &h, b).expect("coroot") {
                    xn = xn.neg();
                }
                x.insert(b.clone(), xp);
                x.insert(neg(b), xn);
            }
        }
        for (key, &s) in &sys.signs {
            let r: Root = serde_json::from_str(key)
                .map_err(|e| Error::Calibration(format!("bad root key {key}: {e}")))?;
            if s != 1 && s != -1 {
                return Err(Error::Calibration(format!("sign for {key} must be ±1")));
            }
            if !rs.is_root(&r) {
                return Err(Error::Calibration(format!("{key} is not a root of {}", rs.label())));
            }
            for k in [r.clone(), neg(&r)] {
                let m = x[&k].scale(&q(s));
                x.insert(k, m);
            }
        }

        let orientation = match &sys.torus_orientation {
            Some(o) if o.len() == l && o.iter().all(|v| *v == 1 || *v == -1) => o.clone(),
            Some(_) => return Err(Error::Calibration("torus_orientation must be l signs".into())),
            None => vec![1; l],
        };

        let mut exp_terms = BTreeMap::new();
        for (r, m) in &x {
            let mut terms = Vec::new();
            let mut p = m.clone();
            let mut k = 1;
            while !p.is_zero() {
                if k > n {
                    return Err(Error::UnsupportedRep(format!("X_{r:?} is not nilpotent")));
                }
                terms.push(p.clone());
                k += 1;
                p = p.mul(m).scale(&q(k as i64).recip());
            }
            exp_terms.insert(r.clone(), terms);
        }

        let pivot = x
            .iter()
            .map(|(r, m)| {
                let (i, j, _) = m.first_nonzero().expect("root vectors are nonzero");
                (r.clone(), (i, j))
            })
            .collect();

        // rows of the diagonal where the H_i are independent
        let mut h_rows = Vec::new();
        let mut cur: QMat = Vec::new();
        for j in 0..n {
            let row: Vec<Rational> = h.iter().map(|m| m.get(j, j).clone()).collect();
            cur.push(row);
            if linalg::rank(&cur) > h_rows.len() {
                h_rows.push(j);
            } else {
                cur.pop();
            }
        }
        let h_inv = linalg::inverse(&cur)
            .ok_or_else(|| Error::UnsupportedRep("Cartan subalgebra is degenerate".into()))?;

        let mut overrides = Vec::new();
        for o in &sys.weyl_overrides {
            if o.word.iter().any(|&i| i == 0 || i > l) {
                return Err(Error::Calibration(format!("bad Weyl word {:?}", o.word)));
            }
            let word: Vec<usize> = o.word.iter().map(|i| i - 1).collect();
            overrides.push((weyl_key(&rs, &word), from_entries(n, &o.entries)?));
        }

        let mut rep = ChevalleyRep {
            sparse_h: h.iter().map(sparse).collect(),
            sparse_x: x.iter().map(|(r, m)| (r.clone(), sparse(m))).collect(),
            rs: rs.clone(),
            dim: n,
            h,
            x,
            exp_terms,
            pivot,
            h_rows,
            h_inv,
            orientation,
            overrides,
            w: Vec::new(),
        };
        rep.check_axioms()?;
        rep.w = rep.compute_w(&vec![q(1); l]);
        let comp = rep.complementary_roots()?;
        rs.set_complementary(&comp);
        rep.rs = rs;
        rep.w = rep.compute_w(&vec![q(1); l]);
        rep.check_w_basis()?;
        for level in rep.rs.min_height() + 1..=0 {
            rep.level_system(level)?;
        }
        Ok(rep)
    }

    pub fn rs(&self) -> &RootSystem {
        &self.rs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rs.rank()
    }

    pub fn m(&self) -> usize {
        self.rs.m()
    }

    pub fn h(&self, i: usize) -> &QMatrix {
        &self.h[i]
    }

    pub fn x(&self, r: &[i64]) -> Result<&QMatrix> {
        self.x.get(r).ok_or_else(|| Error::NotARoot(r.to_vec()))
    }

    /// X_i = X_{β_i} (0-based index into the negative-root order).
    pub fn xi(&self, i: usize) -> &QMatrix {
        &self.x[self.rs.beta(i)]
    }

    pub fn orientation(&self) -> &[i64] {
        &self.orientation
    }

    /// W_i = [X_i, A_0^+] in the final order.
    pub fn w(&self, i: usize) -> &QMatrix {
        &self.w[i]
    }

    /// H_β for any root, an integer combination of the H_i.
    pub fn coroot(&self, r: &[i64]) -> Result<QMatrix> {
        coroot_matrix(&self.rs, &self.h, r)
    }

    /// N_{α,β} with [X_α, X_β] = N_{α,β} X_{α+β}; zero when α+β is not a root.
    pub fn structure_constant(&self, a: &[i64], b: &[i64]) -> Result<i64> {
        let br = self.x(a)?.bracket(self.x(b)?);
        let s: Root = a.iter().zip(b).map(|(u, v)| u + v).collect();
        if !self.rs.is_root(&s) {
            return Ok(0);
        }
        let (i, j) = self.pivot[&s];
        let c = br.get(i, j) / self.x[&s].get(i, j);
        Ok(c.to_integer().try_into().expect("small structure constant"))
    }

    fn check_axioms(&self) -> Result<()> {
        let fail = |d: String| Err(Error::structure("Chevalley basis", d));
        let l = self.rank();
        for i in 0..l {
            for j in 0..l {
                if !self.h[i].bracket(&self.h[j]).is_zero() {
                    return fail(format!("[H_{}, H_{}] != 0", i + 1, j + 1));
                }
            }
        }
        for (a, xa) in &self.x {
            if !self.exp_terms[a].last().is_some_and(|t| t.mul(xa).is_zero()) {
                return fail(format!("X_{a:?} is not nilpotent"));
            }
            for i in 0..l {
                let c = self.rs.cartan_integer(a, &simple(l, i))?;
                if self.h[i].bracket(xa) != xa.scale(&q(c)) {
                    return fail(format!("[H_{}, X_{a:?}] != {c} X", i + 1));
                }
            }
            for (b, xb) in &self.x {
                let br = xa.bracket(xb);
                let s: Root = a.iter().zip(b).map(|(u, v)| u + v).collect();
                if s.iter().all(|v| *v == 0) {
                    if br != self.coroot(a)? {
                        return fail(format!("[X_{a:?}, X_{b:?}] != H"));
                    }
                } else if self.rs.is_root(&s) {
                    let (r, _) = self.rs.root_string(b, a)?;
                    let xs = &self.x[&s];
                    if br != xs.scale(&q(r + 1)) && br != xs.scale(&q(-r - 1)) {
                        return fail(format!("[X_{a:?}, X_{b:?}] != ±{} X_{s:?}", r + 1));
                    }
                } else if !br.is_zero() {
                    return fail(format!("[X_{a:?}, X_{b:?}] != 0"));
                }
            }
        }
        Ok(())
    }

    /// A_0^±(s) = Σ s_i X_{±ᾱ_i}.
    pub fn a0<T: Scalar>(&self, positive: bool, s: &[T]) -> Matrix<T> {
        let l = self.rank();
        let mut coords = Coords {
            h: vec![T::nil(); l],
            x: BTreeMap::new(),
        };
        for (i, si) in s.iter().enumerate() {
            let a = simple(l, i);
            coords.x.insert(if positive { a } else { neg(&a) }, si.clone());
        }
        self.combine(&coords)
    }

    pub fn a0_plus<T: Scalar>(&self) -> Matrix<T> {
        self.a0(true, &vec![T::unit(); self.rank()])
    }

    pub fn compute_w(&self, s: &[Rational]) -> Vec<QMatrix> {
        let a0 = self.a0(true, s);
        (0..self.m()).map(|i| self.xi(i).bracket(&a0)).collect()
    }

    /// Coordinates of a rational element of b^- over (H_1..H_l, X_1..X_m).
    fn b_minus_vector(&self, m: &QMatrix) -> Vec<Rational> {
        let c = self.decompose(m).expect("element of b^-");
        let mut v = c.h.clone();
        v.extend(self.rs.neg_order().iter().map(|r| c.get(r)));
        v
    }

    /// Per height, greedily complete the span of the W landing there with
    /// root vectors, scanning from the greatest index down.
    pub fn complementary_roots(&self) -> Result<Vec<Root>> {
        let mut comp = Vec::new();
        for level in (self.rs.min_height()..=-1).rev() {
            let mut rows: QMat = (0..self.m())
                .filter(|&i| height(self.rs.beta(i)) == level - 1)
                .map(|i| self.b_minus_vector(&self.w[i]))
                .collect();
            let mut rank = linalg::rank(&rows);
            let target = self.rs.indices_at_height(level).len();
            for i in self.rs.indices_at_height(level).into_iter().rev() {
                if rank == target {
                    break;
                }
                rows.push(self.b_minus_vector(self.xi(i)));
                let r = linalg::rank(&rows);
                if r > rank {
                    rank = r;
                    comp.push(self.rs.beta(i).clone());
                } else {
                    rows.pop();
                }
            }
            if rank != target {
                return Err(Error::SpanFailure(level));
            }
        }
        if comp.len() != self.rank() {
            return Err(Error::SpanFailure(0));
        }
        Ok(comp)
    }

    fn check_w_basis(&self) -> Result<()> {
        let mut rows: QMat = self.w.iter().map(|w| self.b_minus_vector(w)).collect();
        rows.extend(self.rs.comp().iter().map(|&k| self.b_minus_vector(self.xi(k))));
        let r = linalg::rank(&rows);
        if r != self.m() + self.rank() {
            return Err(Error::rank(
                "W basis",
                format!("{{W_i}} ∪ {{X_γ}} has rank {r}, expected {}", self.m() + self.rank()),
            ));
        }
        Ok(())
    }

    /// For a height `level` ≤ 0: the W_k landing in g^(level) (k with
    /// ht β_k = level − 1) and the non-complementary coordinates there
    /// (the H_i at level 0). Returns (k indices, coordinate indices, square
    /// invertible matrix M with M[a][b] = coefficient of coordinate b in W_{k_a}).
    pub fn level_system(&self, level: i64) -> Result<(Vec<usize>, Vec<usize>, QMat)> {
        let ks: Vec<usize> = (0..self.m())
            .filter(|&i| height(self.rs.beta(i)) == level - 1)
            .collect();
        let cols: Vec<usize> = if level == 0 {
            (0..self.rank()).collect()
        } else {
            self.rs
                .indices_at_height(level)
                .into_iter()
                .filter(|&i| !self.rs.is_comp(i))
                .collect()
        };
        let l = self.rank();
        let mat: QMat = ks
            .iter()
            .map(|&k| {
                let v = self.b_minus_vector(&self.w[k]);
                cols.iter()
                    .map(|&c| if level == 0 { v[c].clone() } else { v[l + c].clone() })
                    .collect()
            })
            .collect();
        if ks.len() != cols.len() || linalg::inverse(&mat).is_none() {
            return Err(Error::rank(
                "W level system",
                format!("height {level}: {} W against {} coordinates not invertible", ks.len(), cols.len()),
            ));
        }
        Ok((ks, cols, mat))
    }

    /// u_α(x) = exp(x X_α).
    pub fn unipotent<T: Scalar>(&self, r: &[i64], x: &T) -> Result<Matrix<T>> {
        let terms = self.exp_terms.get(r).ok_or_else(|| Error::NotARoot(r.to_vec()))?;
        let mut out: Matrix<T> = Matrix::identity(self.dim);
        let mut xk = T::unit();
        for t in terms {
            xk = xk.mul(x);
            if xk.is_nil() {
                break;
            }
            for (i, j, c) in t.entries().filter(|(_, _, c)| !c.is_zero()) {
                out.set(i, j, out.get(i, j).add(&xk.scale(c)));
            }
        }
        Ok(out)
    }

    /// u_i(x) for the i-th negative root (0-based).
    pub fn u_neg<T: Scalar>(&self, i: usize, x: &T) -> Matrix<T> {
        self.unipotent(self.rs.beta(i), x).expect("β_i is a root")
    }

    /// Exponent of z on the j-th diagonal entry of t_i(z).
    pub fn torus_exponent(&self, i: usize, j: usize) -> i64 {
        self.orientation[i] * self.h[i].get(j, j).to_integer().try_into().unwrap_or(0i64)
    }

    /// t_i(z) = diag(z^{o_i (H_i)_jj}).
    pub fn torus<T: Scalar>(&self, i: usize, z: &T) -> Result<Matrix<T>> {
        let inv = z
            .try_inverse()
            .ok_or_else(|| Error::NotClosedFormInvertible("torus parameter".into()))?;
        Ok(Matrix::diag(
            (0..self.dim)
                .map(|j| {
                    let e = self.torus_exponent(i, j);
                    if e >= 0 {
                        z.pow(e as u32)
                    } else {
                        inv.pow((-e) as u32)
                    }
                })
                .collect(),
        ))
    }

    /// Exponent of z_j in the character β(t(z)): Ad(t(z)) X_β = Π z_j^{e_j} X_β.
    pub fn character(&self, r: &[i64]) -> Vec<i64> {
        let l = self.rank();
        (0..l)
            .map(|j| self.orientation[j] * self.rs.cartan_integer(r, &simple(l, j)).unwrap_or(0))
            .collect()
    }

    /// n(w) for w = w_{i_1}⋯w_{i_k} (0-based). Overrides are matched on the
    /// Weyl element, then on single letters.
    pub fn weyl(&self, word: &[usize]) -> QMatrix {
        if let Some(m) = self.lookup_override(word) {
            return m;
        }
        word.iter().fold(QMatrix::identity(self.dim), |acc, &i| {
            let ni = self.lookup_override(&[i]).unwrap_or_else(|| {
                let a = simple(self.rank(), i);
                let one = q(1);
                let e = self.unipotent(&a, &one).unwrap();
                e.mul(&self.unipotent(&neg(&a), &-one.clone()).unwrap()).mul(&e)
            });
            acc.mul(&ni)
        })
    }

    fn lookup_override(&self, word: &[usize]) -> Option<QMatrix> {
        if word.is_empty() {
            return None;
        }
        let key = weyl_key(&self.rs, word);
        self.overrides.iter().find(|(k, _)| *k == key).map(|(_, m)| m.clone())
    }

    /// n(w̄) for the longest element.
    pub fn longest(&self) -> QMatrix {
        self.weyl(&self.rs.longest_weyl_word())
    }

    /// Σ c_i H_i + Σ c_α X_α.
    pub fn combine<T: Scalar>(&self, c: &Coords<T>) -> Matrix<T> {
        let mut out: Matrix<T> = Matrix::zeros(self.dim);
        let mut put = |sp: &Sparse, v: &T| {
            if v.is_nil() {
                return;
            }
            for (i, j, e) in sp {
                out.set(*i, *j, out.get(*i, *j).add(&v.scale(e)));
            }
        };
        for (i, v) in c.h.iter().enumerate() {
            put(&self.sparse_h[i], v);
        }
        for (r, v) in &c.x {
            if let Some(sp) = self.sparse_x.get(r) {
                put(sp, v);
            }
        }
        out
    }

    /// Coefficients over the Chevalley basis; the residual must vanish exactly.
    pub fn decompose<T: Scalar>(&self, a: &Matrix<T>) -> Result<Coords<T>> {
        if a.n() != self.dim {
            return Err(Error::DimMismatch(self.dim, a.n()));
        }
        let x: BTreeMap<Root, T> = self
            .pivot
            .iter()
            .map(|(r, &(i, j))| {
                let c = self.x[r].get(i, j).recip();
                (r.clone(), a.get(i, j).scale(&c))
            })
            .collect();
        let d: Vec<T> = self.h_rows.iter().map(|&j| a.get(j, j).clone()).collect();
        let h = linalg::apply(&self.h_inv, &d);
        let c = Coords { h, x };
        let back = self.combine(&c);
        for (i, j, v) in a.entries() {
            if *v != *back.get(i, j) {
                return Err(Error::NotInLieAlgebra(format!(
                    "residual at ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
        }
        Ok(c)
    }

    /// Matrix entries as "p/q" strings.
    pub fn to_json(&self) -> serde_json::Value {
        let l = self.rank();
        serde_json::json!({
            "root_system": self.rs.to_json(),
            "dim": self.dim,
            "H": (0..l).map(|i| self.h[i].to_json()).collect::<Vec<_>>(),
            "X": self.rs.neg_order().iter().map(|r| {
                serde_json::json!({"root": r, "neg": self.x[r].to_json(), "pos": self.x[&neg(r)].to_json()})
            }).collect::<Vec<_>>(),
        })
    }
}

fn coroot_matrix(rs: &RootSystem, h: &[QMatrix], r: &[i64]) -> Result<QMatrix> {
    if !rs.is_root(r) {
        return Err(Error::NotARoot(r.to_vec()));
    }
    // β^∨ = Σ k_i (ᾱ_i,ᾱ_i)/(β,β) ᾱ_i^∨
    let bb = rs.inner(r, r);
    let n = h[0].n();
    let mut out = QMatrix::zeros(n);
    for (i, k) in r.iter().enumerate() {
        let a = simple(rs.rank(), i);
        let c = Rational::new((k * rs.inner(&a, &a)).into(), bb.into());
        if !c.is_zero() {
            out = out.add(&h[i].scale(&c));
        }
    }
    Ok(out)
}

/// A Weyl element identified by its images of the simple roots.
fn weyl_key(rs: &RootSystem, word: &[usize]) -> Vec<Root> {
    (0..rs.rank())
        .map(|i| rs.apply_word(word, &simple(rs.rank(), i)))
        .collect()
}

/// Every ±1 assignment on the non-simple positive roots, as sign tables.
pub fn sign_assignments(rs: &RootSystem) -> Vec<BTreeMap<String, i64>> {
    let roots: Vec<Root> = rs
        .positive_roots()
        .iter()
        .filter(|r| height(r) > 1)
        .map(|r| neg(r))
        .collect();
    (0..1u64 << roots.len())
        .map(|mask| {
            roots
                .iter()
                .enumerate()
                .map(|(k, r)| (root_key(r), if mask >> k & 1 == 1 { -1 } else { 1 }))
                .collect()
        })
        .collect()
}

/// Whether `m` equals ±X for a root vector X; returns the sign.
pub fn sign_against(m: &QMatrix, x: &QMatrix) -> Option<i64> {
    if m == x {
        Some(1)
    } else if *m == x.neg() {
        Some(-1)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::RootType;

    fn rep(kind: RootType, l: usize) -> ChevalleyRep {
        ChevalleyRep::build_with(&RootSystem::build(kind, l).unwrap(), &Calibration::embedded())
            .unwrap()
    }

    #[test]
    fn all_supported_types_build() {
        for (k, l) in [
            (RootType::A, 1),
            (RootType::A, 2),
            (RootType::A, 3),
            (RootType::A, 4),
            (RootType::B, 2),
            (RootType::B, 3),
            (RootType::C, 2),
            (RootType::C, 3),
            (RootType::D, 4),
            (RootType::G2, 2),
        ] {
            let r = rep(k, l);
            assert_eq!(r.rs().comp().len(), l, "{k}{l}");
        }
    }

    #[test]
    fn a3_complementary_and_w() {
        let r = rep(RootType::A, 3);
        assert_eq!(r.rs().comp(), &[2, 4, 5]);
        let w6 = r.xi(4).sub(r.xi(3));
        assert_eq!(r.w(5), &w6);
        let w4 = r.xi(1).sub(r.xi(0));
        assert_eq!(r.w(3), &w4);
        for i in 0..3 {
            assert_eq!(r.w(i), &r.h(i).neg());
        }
    }

    #[test]
    fn g2_complementary() {
        let r = rep(RootType::G2, 2);
        assert_eq!(r.rs().comp(), &[1, 5]);
        assert_eq!(r.rs().beta(3), &vec![-2, -1]);
    }

    #[test]
    fn a1_basics() {
        let r = rep(RootType::A, 1);
        assert_eq!(*r.h(0), QMatrix::from_entries(2, &[(1, 1, 1), (2, 2, -1)]));
        assert_eq!(r.w(0), &r.h(0).neg());
        assert_eq!(r.rs().comp(), &[0]);
    }

    #[test]
    fn torus_and_unipotent() {
        let r = rep(RootType::A, 3);
        let z = q(3);
        let t = r.torus(0, &z).unwrap();
        assert_eq!(t, QMatrix::diag(vec![q(3), Rational::new(1.into(), 3.into()), q(1), q(1)]));
        let ad = t.mul(r.xi(0)).mul(&t.inverse().unwrap());
        assert_eq!(ad, r.xi(0).scale(&Rational::new(1.into(), 9.into())));
        assert_eq!(r.u_neg(0, &q(0)), QMatrix::identity(4));
        let u = r.u_neg(3, &q(5));
        assert_eq!(u, QMatrix::identity(4).add(&r.xi(3).scale(&q(5))));
    }

    #[test]
    fn g2_unipotents_are_integral() {
        let r = rep(RootType::G2, 2);
        for root in r.rs().roots() {
            let u = r.unipotent(&root, &q(1)).unwrap();
            assert!(u.entries().all(|(_, _, v)| v.is_integer()));
            assert_eq!(u.det(), q(1));
        }
    }

    #[test]
    fn weyl_representatives() {
        let r = rep(RootType::A, 3);
        let nw = r.longest();
        assert_eq!(nw, QMatrix::from_entries(4, &[(1, 4, 1), (2, 3, -1), (3, 2, 1), (4, 1, -1)]));
        assert_eq!(r.weyl(&[]), QMatrix::identity(4));
        let g = rep(RootType::G2, 2);
        let n1 = QMatrix::from_entries(
            7,
            &[(1, 1, -1), (7, 2, 1), (6, 3, -1), (5, 4, -1), (4, 5, 1), (3, 6, -1), (2, 7, -1)],
        );
        assert_eq!(g.weyl(&[0]), n1);
        let n2 = g.weyl(&[1]);
        assert_eq!(g.longest(), n2.mul(&n1).pow(3));
    }

    #[test]
    fn default_g2_representatives_agree_with_overrides() {
        let g = rep(RootType::G2, 2);
        let sys = SystemCalibration {
            generators: Calibration::embedded().system("G2").unwrap().generators.clone(),
            ..Default::default()
        };
        let plain = ChevalleyRep::build_from(g.rs(), &sys).unwrap();
        assert_eq!(plain.weyl(&[0]), g.weyl(&[0]));
        assert_eq!(plain.weyl(&[1]), g.weyl(&[1]));
    }

    #[test]
    fn weyl_action_permutes_root_vectors() {
        for (k, l) in [(RootType::A, 3), (RootType::G2, 2), (RootType::B, 2)] {
            let r = rep(k, l);
            for i in 0..l {
                let n = r.weyl(&[i]);
                let ninv = n.inverse().unwrap();
                for root in r.rs().roots() {
                    let img = n.mul(r.x(&root).unwrap()).mul(&ninv);
                    let target = r.rs().reflect(i, &root);
                    assert!(sign_against(&img, r.x(&target).unwrap()).is_some());
                }
            }
        }
    }

    #[test]
    fn decomposition() {
        let r = rep(RootType::A, 3);
        let m = r.h(0).add(&r.x(&[1, 0, 0]).unwrap().scale(&q(2)));
        let c = r.decompose(&m).unwrap();
        assert_eq!(c.h, vec![q(1), q(0), q(0)]);
        assert_eq!(c.get(&[1, 0, 0]), q(2));
        assert!(matches!(
            r.decompose(&QMatrix::identity(4)),
            Err(Error::NotInLieAlgebra(_))
        ));
    }

    #[test]
    fn a0_minus_conjugates_to_a0_plus() {
        let r = rep(RootType::A, 3);
        let nw = r.longest();
        let img = nw.mul(&r.a0(false, &[q(-1), q(-1), q(-1)])).mul(&nw.inverse().unwrap());
        assert_eq!(img, r.a0_plus());
    }

    #[test]
    fn sign_enumeration_size() {
        let rs = RootSystem::build(RootType::A, 3).unwrap();
        assert_eq!(sign_assignments(&rs).len(), 8);
    }
}
