//! Sparse differential polynomials in jet variables η_i^(k) over ℚ.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{fmt_q, parse_q, q, show_q, Rational, Scalar};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct JetVar {
    pub var: u32,
    pub order: u32,
}

impl JetVar {
    pub fn new(var: u32, order: u32) -> Self {
        JetVar { var, order }
    }
}

/// Product of jet variables; factors ascending by `JetVar`, exponents positive.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    factors: Vec<(JetVar, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn from_factors(mut factors: Vec<(JetVar, u32)>) -> Self {
        factors.retain(|&(_, e)| e > 0);
        factors.sort_by_key(|&(v, _)| v);
        let mut merged: Vec<(JetVar, u32)> = Vec::with_capacity(factors.len());
        for (v, e) in factors {
            match merged.last_mut() {
                Some((w, f)) if *w == v => *f += e,
                _ => merged.push((v, e)),
            }
        }
        Monomial { factors: merged }
    }

    pub fn factors(&self) -> &[(JetVar, u32)] {
        &self.factors
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn order(&self) -> u32 {
        self.factors.iter().map(|&(v, _)| v.order).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.factors, &other.factors);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial { factors: out }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.factors.iter().rev().cmp(other.factors.iter().rev()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        DiffPoly::term(c, Monomial::one())
    }

    pub fn int(c: i64) -> Self {
        DiffPoly::constant(q(c))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        DiffPoly { terms }
    }

    /// η_i^(k).
    pub fn jet(var: u32, order: u32) -> Self {
        DiffPoly::term(
            q(1),
            Monomial::from_factors(vec![(JetVar::new(var, order), 1)]),
        )
    }

    /// η_i.
    pub fn var(var: u32) -> Self {
        DiffPoly::jet(var, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, x: &Rational) -> DiffPoly {
        if x.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * x)).collect(),
        }
    }

    pub fn mul(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> DiffPoly {
        let mut acc = DiffPoly::int(1);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Total derivation with ∂η_i^(k) = η_i^(k+1).
    pub fn derive(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for (idx, &(v, e)) in m.factors.iter().enumerate() {
                let mut f = m.factors.clone();
                if e == 1 {
                    f.remove(idx);
                } else {
                    f[idx].1 -= 1;
                }
                f.push((JetVar::new(v.var, v.order + 1), 1));
                out.add_term(Monomial::from_factors(f), c * q(e as i64));
            }
        }
        out
    }

    pub fn derive_n(&self, n: u32) -> DiffPoly {
        (0..n).fold(self.clone(), |p, _| p.derive())
    }

    /// Evaluates in any differential ring; η_i^(k) becomes the k-th derivative
    /// of the value assigned to η_i.
    pub fn eval<T: Scalar>(&self, assign: &mut dyn FnMut(u32) -> Result<T>) -> Result<T> {
        let mut jets: BTreeMap<u32, Vec<T>> = BTreeMap::new();
        let mut powers: BTreeMap<(JetVar, u32), T> = BTreeMap::new();
        let mut acc = T::nil();
        for (m, c) in &self.terms {
            let mut prod = T::from_q(c);
            for &(v, e) in &m.factors {
                let ders = match jets.entry(v.var) {
                    std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
                    std::collections::btree_map::Entry::Vacant(e) => e.insert(vec![assign(v.var)?]),
                };
                while ders.len() <= v.order as usize {
                    let next = ders.last().unwrap().derive();
                    ders.push(next);
                }
                let base = &ders[v.order as usize];
                let p = powers.entry((v, e)).or_insert_with(|| base.pow(e));
                prod = prod.mul(p);
            }
            acc = acc.add(&prod);
        }
        Ok(acc)
    }

    /// Differential substitution; every variable must be assigned.
    pub fn substitute(&self, sigma: &BTreeMap<u32, DiffPoly>) -> Result<DiffPoly> {
        self.eval(&mut |i| sigma.get(&i).cloned().ok_or(Error::MissingAssignment(i)))
    }

    /// Differential substitution leaving unassigned variables in place.
    pub fn substitute_partial(&self, sigma: &BTreeMap<u32, DiffPoly>) -> DiffPoly {
        if !self.vars().iter().any(|v| sigma.contains_key(&v.var)) {
            return self.clone();
        }
        self.eval(&mut |i| Ok(sigma.get(&i).cloned().unwrap_or_else(|| DiffPoly::var(i))))
            .expect("partial substitution is total")
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(Monomial::order).max().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Smallest total degree among the terms (0 for the zero polynomial).
    pub fn min_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).min().unwrap_or(0)
    }

    pub fn homogeneous_component(&self, d: u32) -> DiffPoly {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn homogeneous_components(&self) -> BTreeMap<u32, DiffPoly> {
        let mut out: BTreeMap<u32, DiffPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_default()
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    pub fn linear_part(&self) -> DiffPoly {
        self.homogeneous_component(1)
    }

    pub fn nonlinear_part(&self) -> DiffPoly {
        self.sub(&self.linear_part())
    }

    /// Coefficient of the degree-one monomial `v`.
    pub fn linear_coeff(&self, v: JetVar) -> Rational {
        let m = Monomial::from_factors(vec![(v, 1)]);
        self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 if self.terms.contains_key(&Monomial::one()) => Some(self.constant_term()),
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<JetVar> {
        self.terms
            .keys()
            .flat_map(|m| m.factors.iter().map(|&(v, _)| v))
            .collect()
    }

    /// Leading coefficient in the canonical term order.
    pub fn leading_coeff(&self) -> Option<&Rational> {
        self.terms.values().next_back()
    }

    pub fn parse(s: &str) -> Result<DiffPoly> {
        parse::Parser::new(s, &[]).parse()
    }

    /// Parses with extra named symbols mapped to variable indices.
    pub fn parse_with(s: &str, names: &[(&str, u32)]) -> Result<DiffPoly> {
        parse::Parser::new(s, names).parse()
    }

    /// Terms in display order: ascending degree, then descending jets.
    fn display_terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| b.0.cmp(a.0)));
        v
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .display_terms()
            .into_iter()
            .map(|(m, c)| {
                let fs: Vec<[u32; 3]> = m
                    .factors
                    .iter()
                    .rev()
                    .map(|&(v, e)| [v.var, v.order, e])
                    .collect();
                serde_json::json!({ "c": fmt_q(c), "m": fs })
            })
            .collect();
        serde_json::json!({ "terms": terms })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<DiffPoly> {
        if let Some(s) = v.as_str() {
            return DiffPoly::parse(s);
        }
        let terms = v
            .get("terms")
            .and_then(|t| t.as_array())
            .ok_or_else(|| Error::Parse("diffpoly object needs \"terms\"".into()))?;
        let mut out = DiffPoly::zero();
        for t in terms {
            let c = t
                .get("c")
                .and_then(|c| c.as_str())
                .ok_or_else(|| Error::Parse("term needs string \"c\"".into()))?;
            let c = parse_q(c)?;
            let fs = t
                .get("m")
                .and_then(|m| m.as_array())
                .ok_or_else(|| Error::Parse("term needs array \"m\"".into()))?;
            let mut factors = Vec::new();
            for f in fs {
                let trip: Vec<u32> = f
                    .as_array()
                    .filter(|a| a.len() == 3)
                    .and_then(|a| a.iter().map(|x| x.as_u64().map(|x| x as u32)).collect())
                    .ok_or_else(|| Error::Parse(format!("bad factor {f}")))?;
                factors.push((JetVar::new(trip[0], trip[1]), trip[2]));
            }
            out.add_term(Monomial::from_factors(factors), c);
        }
        Ok(out)
    }
}

impl Scalar for DiffPoly {
    fn nil() -> Self {
        DiffPoly::zero()
    }
    fn unit() -> Self {
        DiffPoly::int(1)
    }
    fn from_q(x: &Rational) -> Self {
        DiffPoly::constant(x.clone())
    }
    fn is_nil(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        DiffPoly::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        DiffPoly::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        DiffPoly::mul(self, other)
    }
    fn neg(&self) -> Self {
        DiffPoly::neg(self)
    }
    fn scale(&self, x: &Rational) -> Self {
        DiffPoly::scale(self, x)
    }
    fn derive(&self) -> Self {
        DiffPoly::derive(self)
    }
    fn try_inverse(&self) -> Option<Self> {
        let c = self.as_constant()?;
        (!c.is_zero()).then(|| DiffPoly::constant(c.recip()))
    }
    fn as_q(&self) -> Option<Rational> {
        self.as_constant()
    }
    fn pow(&self, k: u32) -> Self {
        DiffPoly::pow(self, k)
    }
}

impl Serialize for DiffPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiffPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        DiffPoly::from_json(&v).map_err(D::Error::custom)
    }
}

pub fn fmt_jet(v: JetVar) -> String {
    let base = format!("η_{}", v.var);
    match v.order {
        0 => base,
        k @ 1..=3 => format!("{base}{}", "'".repeat(k as usize)),
        k => format!("{base}^({k})"),
    }
}

fn fmt_monomial(m: &Monomial) -> String {
    m.factors
        .iter()
        .rev()
        .map(|&(v, e)| {
            if e == 1 {
                fmt_jet(v)
            } else {
                format!("{}^{e}", fmt_jet(v))
            }
        })
        .collect()
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.display_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mono = fmt_monomial(m);
            if mono.is_empty() {
                write!(f, "{}", show_q(&a))?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}{mono}", show_q(&a))?;
            }
        }
        Ok(())
    }
}

mod parse {
    use super::*;

    pub struct Parser<'a> {
        chars: Vec<char>,
        pos: usize,
        names: &'a [(&'a str, u32)],
    }

    fn superscript_digit(c: char) -> Option<u32> {
        "⁰¹²³⁴⁵⁶⁷⁸⁹".chars().position(|d| d == c).map(|p| p as u32)
    }

    impl<'a> Parser<'a> {
        pub fn new(s: &str, names: &'a [(&'a str, u32)]) -> Self {
            let chars = s
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '−' | '–' => '-',
                    '′' => '\'',
                    '·' => '*',
                    c => c,
                })
                .collect();
            Parser {
                chars,
                pos: 0,
                names,
            }
        }

        fn err<T>(&self, msg: &str) -> Result<T> {
            let s: String = self.chars.iter().collect();
            Err(Error::Parse(format!("{msg} at {} in {s:?}", self.pos)))
        }

        fn peek(&self) -> Option<char> {
            self.chars.get(self.pos).copied()
        }

        fn eat(&mut self, c: char) -> bool {
            if self.peek() == Some(c) {
                self.pos += 1;
                true
            } else {
                false
            }
        }

        pub fn parse(mut self) -> Result<DiffPoly> {
            let p = self.expr()?;
            if self.pos != self.chars.len() {
                return self.err("trailing input");
            }
            Ok(p)
        }

        fn expr(&mut self) -> Result<DiffPoly> {
            let mut acc = if self.eat('-') {
                self.term()?.neg()
            } else {
                self.eat('+');
                self.term()?
            };
            loop {
                if self.eat('+') {
                    acc = acc.add(&self.term()?);
                } else if self.eat('-') {
                    acc = acc.sub(&self.term()?);
                } else {
                    return Ok(acc);
                }
            }
        }

        fn starts_factor(&self) -> bool {
            match self.peek() {
                Some(c) => c == '(' || c.is_ascii_digit() || c.is_alphabetic(),
                None => false,
            }
        }

        fn term(&mut self) -> Result<DiffPoly> {
            let mut acc = self.power()?;
            loop {
                // juxtaposition multiplies like '*'
                if self.eat('*') || self.starts_factor() {
                    acc = acc.mul(&self.power()?);
                } else {
                    return Ok(acc);
                }
            }
        }

        fn number(&mut self) -> Result<u32> {
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            if start == self.pos {
                return self.err("expected digits");
            }
            let s: String = self.chars[start..self.pos].iter().collect();
            s.parse().or_else(|_| self.err("number too large"))
        }

        fn exponent(&mut self) -> Result<Option<u32>> {
            if let Some(d) = self.peek().and_then(superscript_digit) {
                let mut e = d;
                self.pos += 1;
                while let Some(d) = self.peek().and_then(superscript_digit) {
                    e = e * 10 + d;
                    self.pos += 1;
                }
                return Ok(Some(e));
            }
            let save = self.pos;
            if self.eat('^') {
                if self.eat('{') {
                    if self.peek() == Some('(') {
                        self.pos = save;
                        return Ok(None);
                    }
                    let e = self.number()?;
                    if !self.eat('}') {
                        return self.err("expected }");
                    }
                    return Ok(Some(e));
                }
                if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    return Ok(Some(self.number()?));
                }
                self.pos = save;
            }
            Ok(None)
        }

        fn power(&mut self) -> Result<DiffPoly> {
            let base = self.atom()?;
            match self.exponent()? {
                Some(e) => Ok(base.pow(e)),
                None => Ok(base),
            }
        }

        fn atom(&mut self) -> Result<DiffPoly> {
            match self.peek() {
                Some('(') => {
                    self.pos += 1;
                    let p = self.expr()?;
                    if !self.eat(')') {
                        return self.err("expected )");
                    }
                    Ok(p)
                }
                Some(c) if c.is_ascii_digit() => {
                    let start = self.pos;
                    self.number()?;
                    if self.peek() == Some('/')
                        && self.chars.get(self.pos + 1).is_some_and(|c| c.is_ascii_digit())
                    {
                        self.pos += 1;
                        self.number()?;
                    }
                    let s: String = self.chars[start..self.pos].iter().collect();
                    Ok(DiffPoly::constant(parse_q(&s)?))
                }
                Some(c) if c.is_alphabetic() => self.variable(),
                _ => self.err("expected a factor"),
            }
        }

        fn variable(&mut self) -> Result<DiffPoly> {
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_alphabetic()) {
                self.pos += 1;
            }
            let name: String = self.chars[start..self.pos].iter().collect();
            let mut ident = name.clone();
            let mut digits = None;
            let save = self.pos;
            self.eat('_');
            let braced = self.eat('{');
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                let n = self.number()?;
                if braced && !self.eat('}') {
                    return self.err("expected }");
                }
                digits = Some(n);
                ident = format!("{name}_{n}");
            } else {
                self.pos = save;
            }
            let var = if name == "η" || name == "eta" {
                match digits {
                    Some(n) => n,
                    None => return self.err("η needs an index"),
                }
            } else if let Some(&(_, v)) = self
                .names
                .iter()
                .find(|(n, _)| *n == ident || *n == name && digits.is_none())
            {
                v
            } else {
                return self.err(&format!("unknown symbol {ident}"));
            };
            let mut order = 0;
            while self.eat('\'') {
                order += 1;
            }
            let save = self.pos;
            if self.eat('^') {
                let braced = self.eat('{');
                if self.eat('(') {
                    order += self.number()?;
                    if !self.eat(')') || (braced && !self.eat('}')) {
                        return self.err("bad derivative order");
                    }
                } else {
                    self.pos = save;
                }
            }
            Ok(DiffPoly::jet(var, order))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> DiffPoly {
        DiffPoly::parse(s).unwrap()
    }

    #[test]
    fn arithmetic_cancels() {
        assert_eq!(p("η_1 + η_2").add(&p("-η_2")), p("η_1"));
        assert!(p("η_1'^2").sub(&p("η_1'^2")).is_zero());
        let m = p("η_1").mul(&p("η_2'"));
        assert_eq!(m.num_terms(), 1);
        assert_eq!(m.degree(), 2);
    }

    #[test]
    fn derivation_examples() {
        assert_eq!(p("η_1").derive(), p("η_1'"));
        assert_eq!(p("η_1η_2").derive(), p("η_1'η_2 + η_1η_2'"));
        assert_eq!(p("η_1² + η_1'").derive(), p("2η_1η_1' + η_1''"));
    }

    #[test]
    fn substitution_examples() {
        let mut s = BTreeMap::new();
        s.insert(4, p("η_1' + η_1²"));
        assert_eq!(
            p("η_4'").substitute_partial(&s),
            p("η_1'' + 2η_1η_1'")
        );
        let f6 = p("η_1'' + 3η_1η_1' + η_1³ − η_3η_1' − η_3η_1²");
        let s6: BTreeMap<u32, DiffPoly> = [(6, f6.clone())].into();
        assert_eq!(p("η_6").substitute(&s6).unwrap(), f6);
        assert_eq!(
            p("η_6 + η_1").substitute(&s6),
            Err(Error::MissingAssignment(1))
        );
        let id: BTreeMap<u32, DiffPoly> = (1..4).map(|i| (i, DiffPoly::var(i))).collect();
        let q = p("η_1''η_2 - 3/2η_3^2");
        assert_eq!(q.substitute(&id).unwrap(), q);
    }

    #[test]
    fn structure_queries() {
        let a = p("η_1'' + 3η_1η_1'");
        assert_eq!((a.order(), a.degree()), (2, 2));
        assert_eq!(a.linear_part(), p("η_1''"));
        let z = DiffPoly::zero();
        assert_eq!((z.order(), z.degree()), (0, 0));
        assert!(z.linear_part().is_zero() && z.nonlinear_part().is_zero());
        let b = p("η_2' + η_1' + η_1² + η_2(η_2−η_1)");
        assert_eq!(b.linear_part(), p("η_2' + η_1'"));
        assert_eq!(b.linear_part().add(&b.nonlinear_part()), b);
    }

    #[test]
    fn json_matches_documented_shape() {
        let v = p("-η_2'η_1");
        let j = serde_json::to_string(&v).unwrap();
        assert_eq!(j, r#"{"terms":[{"c":"-1/1","m":[[2,1,1],[1,0,1]]}]}"#);
        let back: DiffPoly = serde_json::from_str(&j).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn display_uses_primes() {
        assert_eq!(p("η_1'' + 3η_1η_1'").to_string(), "η_1'' + 3η_1'η_1");
        assert_eq!(p("η_1^(5)").to_string(), "η_1^(5)");
        assert_eq!(p("-η_2'η_1").to_string(), "-η_2'η_1");
    }

    #[test]
    fn parser_forms() {
        assert_eq!(p("eta_1^{(2)}"), p("η_1''"));
        assert_eq!(p("-1/4(2η_1)"), p("-1/2η_1"));
        assert_eq!(p("η_1'^2"), p("η_1'η_1'"));
        assert_eq!(p("3(η_1'+η_1²)"), p("3η_1' + 3η_1^2"));
        let h = DiffPoly::parse_with("h_1' + η_1 h_1", &[("h_1", 9)]).unwrap();
        assert_eq!(h, p("η_9' + η_1η_9"));
        assert!(DiffPoly::parse("η_1 +").is_err());
        assert!(DiffPoly::parse("x_1").is_err());
    }
}
