//! Root systems of types A, B, C, D and G2 as integer coefficient vectors
//! over the simple roots.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RootType {
    A,
    B,
    C,
    D,
    G2,
}

impl fmt::Display for RootType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RootType::A => "A",
            RootType::B => "B",
            RootType::C => "C",
            RootType::D => "D",
            RootType::G2 => "G2",
        };
        f.write_str(s)
    }
}

impl FromStr for RootType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(RootType::A),
            "B" => Ok(RootType::B),
            "C" => Ok(RootType::C),
            "D" => Ok(RootType::D),
            "G2" | "G" => Ok(RootType::G2),
            other => Err(Error::UnsupportedType {
                label: other.to_string(),
                rank: 0,
            }),
        }
    }
}

pub type Root = Vec<i64>;

pub fn height(r: &[i64]) -> i64 {
    r.iter().sum()
}

pub fn neg(r: &[i64]) -> Root {
    r.iter().map(|x| -x).collect()
}

pub fn add(a: &[i64], b: &[i64]) -> Root {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn axpy(a: &[i64], k: i64, b: &[i64]) -> Root {
    a.iter().zip(b).map(|(x, y)| x + k * y).collect()
}

/// Positive roots by height, then descending lexicographic so that the
/// simple roots come out as ᾱ_1, ᾱ_2, ….
fn pos_cmp(a: &Root, b: &Root) -> std::cmp::Ordering {
    height(a).cmp(&height(b)).then_with(|| b.cmp(a))
}

pub fn simple(rank: usize, i: usize) -> Root {
    let mut r = vec![0; rank];
    r[i] = 1;
    r
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSystem {
    kind: RootType,
    rank: usize,
    /// Symmetric form (ᾱ_i, ᾱ_j); short roots have squared length 2.
    gram: Vec<Vec<i64>>,
    cartan: Vec<Vec<i64>>,
    positive: Vec<Root>,
    neg_order: Vec<Root>,
    comp: Vec<usize>,
}

fn gram_matrix(kind: RootType, l: usize) -> Vec<Vec<i64>> {
    let mut g = vec![vec![0i64; l]; l];
    let mut link = |i: usize, j: usize, v: i64| {
        g[i][j] = v;
        g[j][i] = v;
    };
    match kind {
        RootType::A => {
            for i in 0..l - 1 {
                link(i, i + 1, -1);
            }
        }
        RootType::B => {
            for i in 0..l - 1 {
                link(i, i + 1, -2);
            }
        }
        RootType::C => {
            for i in 0..l - 2 {
                link(i, i + 1, -1);
            }
            link(l - 2, l - 1, -2);
        }
        RootType::D => {
            for i in 0..l - 2 {
                link(i, i + 1, -1);
            }
            link(l - 3, l - 1, -1);
        }
        RootType::G2 => link(0, 1, -3),
    }
    let diag: Vec<i64> = (0..l)
        .map(|i| match kind {
            RootType::A | RootType::D => 2,
            RootType::B => {
                if i + 1 < l {
                    4
                } else {
                    2
                }
            }
            RootType::C => {
                if i + 1 < l {
                    2
                } else {
                    4
                }
            }
            RootType::G2 => [2, 6][i],
        })
        .collect();
    for (i, d) in diag.into_iter().enumerate() {
        g[i][i] = d;
    }
    g
}

impl RootSystem {
    pub fn build(kind: RootType, rank: usize) -> Result<RootSystem> {
        let ok = match kind {
            RootType::A => rank >= 1,
            RootType::B | RootType::C => rank >= 2,
            RootType::D => rank >= 3,
            RootType::G2 => rank == 2,
        };
        if !ok {
            return Err(Error::UnsupportedType {
                label: kind.to_string(),
                rank,
            });
        }
        let gram = gram_matrix(kind, rank);
        let cartan: Vec<Vec<i64>> = (0..rank)
            .map(|i| (0..rank).map(|j| 2 * gram[i][j] / gram[j][j]).collect())
            .collect();
        let mut rs = RootSystem {
            kind,
            rank,
            gram,
            cartan,
            positive: Vec::new(),
            neg_order: Vec::new(),
            comp: Vec::new(),
        };
        rs.positive = rs.generate_positive();
        rs.neg_order = rs.order_negative_roots(&[]);
        Ok(rs)
    }

    pub fn from_label(label: &str, rank: usize) -> Result<RootSystem> {
        let kind = label.parse::<RootType>().map_err(|_| Error::UnsupportedType {
            label: label.to_string(),
            rank,
        })?;
        RootSystem::build(kind, rank)
    }

    /// Positive roots by height via root strings: β+ᾱ_i is a root iff
    /// p − ⟨β,ᾱ_i⟩ > 0 where p is the length of the string below β.
    fn generate_positive(&self) -> Vec<Root> {
        let l = self.rank;
        let mut all: BTreeSet<Root> = (0..l).map(|i| simple(l, i)).collect();
        let mut layer: Vec<Root> = all.iter().cloned().collect();
        while !layer.is_empty() {
            let mut next = BTreeSet::new();
            for b in &layer {
                for i in 0..l {
                    let a = simple(l, i);
                    if *b == a {
                        continue;
                    }
                    let mut p = 0;
                    while all.contains(&axpy(b, -(p + 1), &a)) {
                        p += 1;
                    }
                    let q = p - self.pairing(b, &a);
                    if q > 0 {
                        next.insert(add(b, &a));
                    }
                }
            }
            layer = next.iter().filter(|r| !all.contains(*r)).cloned().collect();
            all.extend(layer.iter().cloned());
        }
        let mut v: Vec<Root> = all.into_iter().collect();
        v.sort_by(pos_cmp);
        v
    }

    pub fn kind(&self) -> RootType {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn label(&self) -> String {
        match self.kind {
            RootType::G2 => "G2".to_string(),
            k => format!("{k}{}", self.rank),
        }
    }

    /// Number of positive roots.
    pub fn m(&self) -> usize {
        self.positive.len()
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.positive
    }

    pub fn roots(&self) -> Vec<Root> {
        let mut v: Vec<Root> = self.positive.clone();
        v.extend(self.neg_order.iter().cloned());
        v
    }

    /// β_1..β_m in the canonical order (0-based here).
    pub fn neg_order(&self) -> &[Root] {
        &self.neg_order
    }

    pub fn beta(&self, i: usize) -> &Root {
        &self.neg_order[i]
    }

    pub fn neg_index(&self, r: &[i64]) -> Option<usize> {
        self.neg_order.iter().position(|b| b.as_slice() == r)
    }

    /// 0-based indices of the complementary roots in `neg_order`.
    pub fn comp(&self) -> &[usize] {
        &self.comp
    }

    pub fn is_comp(&self, i: usize) -> bool {
        self.comp.contains(&i)
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn is_root(&self, r: &[i64]) -> bool {
        if r.len() != self.rank || r.iter().all(|&x| x == 0) {
            return false;
        }
        let p: Root = if height(r) > 0 { r.to_vec() } else { neg(r) };
        self.positive.binary_search_by(|x| pos_cmp(x, &p)).is_ok()
    }

    pub fn inner(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut s = 0;
        for i in 0..self.rank {
            for j in 0..self.rank {
                s += a[i] * self.gram[i][j] * b[j];
            }
        }
        s
    }

    fn pairing(&self, b: &[i64], a: &[i64]) -> i64 {
        2 * self.inner(b, a) / self.inner(a, a)
    }

    /// ⟨β, α⟩ = 2(β,α)/(α,α).
    pub fn cartan_integer(&self, beta: &[i64], alpha: &[i64]) -> Result<i64> {
        for r in [beta, alpha] {
            if !self.is_root(r) {
                return Err(Error::NotARoot(r.to_vec()));
            }
        }
        Ok(self.pairing(beta, alpha))
    }

    /// (r, q) maximal with α − rβ, …, α + qβ all roots.
    pub fn root_string(&self, alpha: &[i64], beta: &[i64]) -> Result<(i64, i64)> {
        for r in [alpha, beta] {
            if !self.is_root(r) {
                return Err(Error::NotARoot(r.to_vec()));
            }
        }
        if alpha == beta || alpha == neg(beta).as_slice() {
            return Err(Error::DependentRoots(alpha.to_vec(), beta.to_vec()));
        }
        let mut r = 0;
        while self.is_root(&axpy(alpha, -(r + 1), beta)) {
            r += 1;
        }
        let mut q = 0;
        while self.is_root(&axpy(alpha, q + 1, beta)) {
            q += 1;
        }
        Ok((r, q))
    }

    /// Simple reflection w_{ᾱ_i}.
    pub fn reflect(&self, i: usize, r: &[i64]) -> Root {
        let a = simple(self.rank, i);
        axpy(r, -self.pairing(r, &a), &a)
    }

    pub fn reflect_by(&self, alpha: &[i64], r: &[i64]) -> Root {
        axpy(r, -self.pairing(r, alpha), alpha)
    }

    /// Action of w = w_{i_1}⋯w_{i_k} (indices 0-based).
    pub fn apply_word(&self, word: &[usize], r: &[i64]) -> Root {
        word.iter().rev().fold(r.to_vec(), |acc, &i| self.reflect(i, &acc))
    }

    /// Greedy descent: extend w by the largest simple reflection with
    /// w(ᾱ_i) > 0 until every positive root is sent to a negative one.
    pub fn longest_weyl_word(&self) -> Vec<usize> {
        let mut word: Vec<usize> = Vec::new();
        loop {
            let next = (0..self.rank)
                .rev()
                .find(|&i| height(&self.apply_word(&word, &simple(self.rank, i))) > 0);
            match next {
                Some(i) => word.push(i),
                None => return word,
            }
        }
    }

    /// Ordering of Φ^-: non-increasing height, complementary roots last within
    /// each height, otherwise ascending lexicographic on coefficients.
    pub fn order_negative_roots(&self, comp: &[Root]) -> Vec<Root> {
        let mut v: Vec<Root> = self.positive.iter().map(|r| neg(r)).collect();
        v.sort_by(|a, b| {
            height(b)
                .cmp(&height(a))
                .then_with(|| comp.contains(a).cmp(&comp.contains(b)))
                .then_with(|| a.cmp(b))
        });
        v
    }

    /// Records the complementary roots and re-numbers Φ^- accordingly.
    pub fn set_complementary(&mut self, comp: &[Root]) {
        self.neg_order = self.order_negative_roots(comp);
        let mut idx: Vec<usize> = comp.iter().filter_map(|r| self.neg_index(r)).collect();
        idx.sort_unstable();
        self.comp = idx;
    }

    /// Indices (0-based) of the negative roots of height `h`.
    pub fn indices_at_height(&self, h: i64) -> Vec<usize> {
        (0..self.m()).filter(|&i| height(&self.neg_order[i]) == h).collect()
    }

    pub fn min_height(&self) -> i64 {
        self.neg_order.last().map_or(0, |r| height(r))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "type": self.kind.to_string(),
            "rank": self.rank,
            "neg_order": self.neg_order,
            "comp": self.comp.iter().map(|i| i + 1).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a3() -> RootSystem {
        RootSystem::build(RootType::A, 3).unwrap()
    }

    #[test]
    fn counts() {
        for (k, l, m) in [
            (RootType::A, 1, 1),
            (RootType::A, 3, 6),
            (RootType::A, 5, 15),
            (RootType::B, 2, 4),
            (RootType::B, 3, 9),
            (RootType::C, 3, 9),
            (RootType::D, 4, 12),
            (RootType::G2, 2, 6),
        ] {
            assert_eq!(RootSystem::build(k, l).unwrap().m(), m, "{k}{l}");
        }
    }

    #[test]
    fn inadmissible_ranks() {
        assert!(RootSystem::build(RootType::A, 0).is_err());
        assert!(RootSystem::build(RootType::B, 1).is_err());
        assert!(RootSystem::build(RootType::D, 2).is_err());
        assert!(RootSystem::build(RootType::G2, 3).is_err());
        assert!(matches!(
            RootSystem::from_label("E", 8),
            Err(Error::UnsupportedType { .. })
        ));
    }

    #[test]
    fn a3_order() {
        let rs = a3();
        let want: Vec<Root> = vec![
            vec![-1, 0, 0],
            vec![0, -1, 0],
            vec![0, 0, -1],
            vec![-1, -1, 0],
            vec![0, -1, -1],
            vec![-1, -1, -1],
        ];
        assert_eq!(rs.neg_order(), want.as_slice());
    }

    #[test]
    fn g2_order() {
        let rs = RootSystem::build(RootType::G2, 2).unwrap();
        let want: Vec<Root> = vec![
            vec![-1, 0],
            vec![0, -1],
            vec![-1, -1],
            vec![-2, -1],
            vec![-3, -1],
            vec![-3, -2],
        ];
        assert_eq!(rs.neg_order(), want.as_slice());
    }

    #[test]
    fn complementary_roots_move_last() {
        let mut rs = a3();
        rs.set_complementary(&[vec![-1, 0, 0], vec![-1, -1, 0], vec![-1, -1, -1]]);
        assert_eq!(rs.beta(2), &vec![-1, 0, 0]);
        assert_eq!(rs.beta(4), &vec![-1, -1, 0]);
        assert_eq!(rs.comp(), &[2, 4, 5]);
    }

    #[test]
    fn cartan_integers() {
        let rs = a3();
        assert_eq!(rs.cartan_integer(&[1, 0, 0], &[1, 0, 0]).unwrap(), 2);
        assert_eq!(rs.cartan_integer(&[1, 0, 0], &[0, 1, 0]).unwrap(), -1);
        assert!(matches!(
            rs.cartan_integer(&[1, 0, 1], &[1, 0, 0]),
            Err(Error::NotARoot(_))
        ));
        let g2 = RootSystem::build(RootType::G2, 2).unwrap();
        assert_eq!(g2.cartan_integer(&[0, 1], &[1, 0]).unwrap(), -3);
        assert_eq!(g2.cartan_integer(&[1, 0], &[0, 1]).unwrap(), -1);
        assert!(g2.inner(&[1, 0], &[1, 0]) < g2.inner(&[0, 1], &[0, 1]));
    }

    #[test]
    fn root_strings_follow_definition() {
        let rs = a3();
        // α − β = ᾱ_1 + ᾱ_2 is a root, α + β = ᾱ_2 − ᾱ_1 is not.
        assert_eq!(rs.root_string(&[0, 1, 0], &[-1, 0, 0]).unwrap(), (1, 0));
        assert_eq!(rs.root_string(&[0, 1, 0], &[1, 0, 0]).unwrap(), (0, 1));
        assert_eq!(rs.root_string(&[1, 0, 0], &[0, 0, 1]).unwrap(), (0, 0));
        assert!(matches!(
            rs.root_string(&[1, 0, 0], &[-1, 0, 0]),
            Err(Error::DependentRoots(..))
        ));
        let g2 = RootSystem::build(RootType::G2, 2).unwrap();
        assert_eq!(g2.root_string(&[0, 1], &[-1, 0]).unwrap(), (3, 0));
        assert_eq!(g2.root_string(&[0, 1], &[1, 0]).unwrap(), (0, 3));
    }

    #[test]
    fn longest_words() {
        let a1 = RootSystem::build(RootType::A, 1).unwrap();
        assert_eq!(a1.longest_weyl_word(), vec![0]);
        let g2 = RootSystem::build(RootType::G2, 2).unwrap();
        assert_eq!(g2.longest_weyl_word(), vec![1, 0, 1, 0, 1, 0]);
        let rs = a3();
        let w = rs.longest_weyl_word();
        assert_eq!(w.len(), 6);
        for i in 0..3 {
            assert_eq!(
                rs.apply_word(&w, &simple(3, i)),
                neg(&simple(3, 2 - i))
            );
        }
        for (k, l) in [(RootType::B, 3), (RootType::C, 3), (RootType::D, 4), (RootType::A, 5)] {
            let rs = RootSystem::build(k, l).unwrap();
            let w = rs.longest_weyl_word();
            assert_eq!(w.len(), rs.m());
            for r in rs.positive_roots() {
                assert!(height(&rs.apply_word(&w, r)) < 0);
            }
        }
    }

    #[test]
    fn reflections_permute_roots() {
        for (k, l) in [(RootType::A, 3), (RootType::B, 3), (RootType::C, 3), (RootType::D, 4), (RootType::G2, 2)] {
            let rs = RootSystem::build(k, l).unwrap();
            let roots = rs.roots();
            for a in &roots {
                for b in &roots {
                    assert!(rs.is_root(&rs.reflect_by(a, b)));
                    let s = add(a, b);
                    if rs.is_root(&s) {
                        assert_eq!(height(&s), height(a) + height(b));
                    }
                }
            }
        }
    }

    #[test]
    fn json_shape() {
        let mut rs = a3();
        rs.set_complementary(&[vec![0, 0, -1], vec![0, -1, -1], vec![-1, -1, -1]]);
        let j = rs.to_json().to_string();
        assert_eq!(
            j,
            r#"{"type":"A","rank":3,"neg_order":[[-1,0,0],[0,-1,0],[0,0,-1],[-1,-1,0],[0,-1,-1],[-1,-1,-1]],"comp":[3,5,6]}"#
        );
    }
}
