//! Liouvillian expressions: polynomials in formal integrals with
//! differential-polynomial coefficients, times exponentials of integrals.
//!
//! Canonical form is a sum of terms c · Π(∫f_k)^{p_k} · e^{∫g} with c a
//! DiffPoly, each integrand f_k itself canonical with leading coefficient 1,
//! and g a DiffPoly. Exponentials multiply by adding their exponents.
//! Integrals are opaque: no linearity or integration by parts.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::diffpoly::DiffPoly;
use crate::error::{Error, Result};
use crate::scalar::{q, Rational, Scalar};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Integral(Arc<LiouvExpr>);

impl Integral {
    pub fn integrand(&self) -> &LiouvExpr {
        &self.0
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Key {
    ints: Vec<(Integral, u32)>,
    exp: DiffPoly,
}

impl Key {
    fn unit() -> Key {
        Key::default()
    }

    fn is_unit(&self) -> bool {
        self.ints.is_empty() && self.exp.is_zero()
    }

    fn mul(&self, other: &Key) -> Key {
        let mut ints: BTreeMap<Integral, u32> = self.ints.iter().cloned().collect();
        for (a, p) in &other.ints {
            *ints.entry(a.clone()).or_insert(0) += p;
        }
        Key {
            ints: ints.into_iter().collect(),
            exp: self.exp.add(&other.exp),
        }
    }

    pub fn integrals(&self) -> &[(Integral, u32)] {
        &self.ints
    }

    pub fn exponent(&self) -> &DiffPoly {
        &self.exp
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct LiouvExpr {
    terms: BTreeMap<Key, DiffPoly>,
}

impl LiouvExpr {
    pub fn zero() -> LiouvExpr {
        LiouvExpr::default()
    }

    pub fn one() -> LiouvExpr {
        LiouvExpr::poly(DiffPoly::int(1))
    }

    pub fn constant(c: Rational) -> LiouvExpr {
        LiouvExpr::poly(DiffPoly::constant(c))
    }

    pub fn poly(p: DiffPoly) -> LiouvExpr {
        let mut e = LiouvExpr::zero();
        e.add_term(Key::unit(), p);
        e
    }

    fn add_term(&mut self, k: Key, c: DiffPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    /// ∫f, with the leading rational content of f pulled out front.
    pub fn integral(f: &LiouvExpr) -> LiouvExpr {
        let Some((_, c)) = f.terms.iter().next_back() else {
            return LiouvExpr::zero();
        };
        let lc = c.leading_coeff().cloned().unwrap_or_else(|| q(1));
        let atom = Integral(Arc::new(f.scale(&lc.recip())));
        let mut e = LiouvExpr::zero();
        e.add_term(
            Key {
                ints: vec![(atom, 1)],
                exp: DiffPoly::zero(),
            },
            DiffPoly::constant(lc),
        );
        e
    }

    /// e^{∫g}.
    pub fn exp_integral(g: &DiffPoly) -> LiouvExpr {
        let mut e = LiouvExpr::zero();
        e.add_term(
            Key {
                ints: Vec::new(),
                exp: g.clone(),
            },
            DiffPoly::int(1),
        );
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &DiffPoly)> {
        self.terms.iter()
    }

    /// The DiffPoly value when no integrals or exponentials remain.
    pub fn as_poly(&self) -> Option<DiffPoly> {
        match self.terms.len() {
            0 => Some(DiffPoly::zero()),
            1 => self.terms.get(&Key::unit()).cloned(),
            _ => None,
        }
    }

    /// Exponent g when the expression is exactly e^{∫g}.
    pub fn as_exp(&self) -> Option<&DiffPoly> {
        let (k, c) = self.terms.iter().next()?;
        (self.terms.len() == 1 && k.ints.is_empty() && c.as_constant() == Some(q(1))).then_some(&k.exp)
    }

    pub fn add(&self, other: &LiouvExpr) -> LiouvExpr {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LiouvExpr) -> LiouvExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LiouvExpr {
        LiouvExpr {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, x: &Rational) -> LiouvExpr {
        if x.is_zero() {
            return LiouvExpr::zero();
        }
        LiouvExpr {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.scale(x))).collect(),
        }
    }

    pub fn mul_poly(&self, p: &DiffPoly) -> LiouvExpr {
        let mut out = LiouvExpr::zero();
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.mul(p));
        }
        out
    }

    pub fn mul(&self, other: &LiouvExpr) -> LiouvExpr {
        let mut out = LiouvExpr::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                out.add_term(k1.mul(k2), c1.mul(c2));
            }
        }
        out
    }

    pub fn derive(&self) -> LiouvExpr {
        let mut out = LiouvExpr::zero();
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.derive());
            if !k.exp.is_zero() {
                out.add_term(k.clone(), c.mul(&k.exp));
            }
            for (idx, (atom, p)) in k.ints.iter().enumerate() {
                let mut rest = k.clone();
                if *p == 1 {
                    rest.ints.remove(idx);
                } else {
                    rest.ints[idx].1 -= 1;
                }
                let mut piece = LiouvExpr::zero();
                piece.add_term(rest, c.scale(&q(i64::from(*p))));
                out = out.add(&piece.mul(atom.integrand()));
            }
        }
        out
    }

    /// Inverse of c·e^{∫g} for a nonzero rational c.
    pub fn try_inverse(&self) -> Option<LiouvExpr> {
        if self.terms.len() != 1 {
            return None;
        }
        let (k, c) = self.terms.iter().next()?;
        let c = c.as_constant()?;
        if !k.ints.is_empty() || c.is_zero() {
            return None;
        }
        let mut e = LiouvExpr::zero();
        e.add_term(
            Key {
                ints: Vec::new(),
                exp: k.exp.neg(),
            },
            DiffPoly::constant(c.recip()),
        );
        Some(e)
    }

    /// Maps every DiffPoly coefficient, integrand and exponent through `f`;
    /// used for differential substitutions η ↦ f(η).
    pub fn map_polys(&self, f: &mut dyn FnMut(&DiffPoly) -> Result<DiffPoly>) -> Result<LiouvExpr> {
        let mut out = LiouvExpr::zero();
        for (k, c) in &self.terms {
            let mut term = LiouvExpr::poly(f(c)?);
            if term.is_zero() {
                continue;
            }
            for (atom, p) in &k.ints {
                let a = LiouvExpr::integral(&atom.integrand().map_polys(f)?);
                for _ in 0..*p {
                    term = term.mul(&a);
                }
            }
            if !k.exp.is_zero() {
                term = term.mul(&LiouvExpr::exp_integral(&f(&k.exp)?));
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let ints: Vec<serde_json::Value> = k
                    .ints
                    .iter()
                    .map(|(a, p)| serde_json::json!({"int": a.integrand().to_json(), "pow": p}))
                    .collect();
                serde_json::json!({"c": c.to_json(), "ints": ints, "exp": k.exp.to_json()})
            })
            .collect();
        serde_json::json!({ "sum": terms })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<LiouvExpr> {
        if let Some(s) = v.as_str() {
            return LiouvExpr::parse(s);
        }
        let bad = |what: &str| Error::Parse(format!("liouville term: {what}"));
        let terms = v
            .get("sum")
            .and_then(|t| t.as_array())
            .ok_or_else(|| bad("expected {\"sum\": [...]}"))?;
        let mut out = LiouvExpr::zero();
        for t in terms {
            let c = DiffPoly::from_json(t.get("c").ok_or_else(|| bad("missing c"))?)?;
            let exp = DiffPoly::from_json(t.get("exp").ok_or_else(|| bad("missing exp"))?)?;
            let mut term = LiouvExpr::poly(c).mul(&LiouvExpr::exp_integral(&exp));
            for i in t.get("ints").and_then(|x| x.as_array()).ok_or_else(|| bad("missing ints"))? {
                let f = LiouvExpr::from_json(i.get("int").ok_or_else(|| bad("missing int"))?)?;
                let p = i.get("pow").and_then(|p| p.as_u64()).ok_or_else(|| bad("missing pow"))?;
                let a = LiouvExpr::integral(&f);
                for _ in 0..p {
                    term = term.mul(&a);
                }
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    pub fn parse(s: &str) -> Result<LiouvExpr> {
        LiouvExpr::parse_with(s, &BTreeMap::new())
    }

    /// Parses with named references such as `y_1` or `z_2`.
    pub fn parse_with(s: &str, names: &BTreeMap<String, LiouvExpr>) -> Result<LiouvExpr> {
        parse::Parser::new(s, names).parse()
    }
}

impl Scalar for LiouvExpr {
    fn nil() -> Self {
        LiouvExpr::zero()
    }
    fn unit() -> Self {
        LiouvExpr::one()
    }
    fn from_q(x: &Rational) -> Self {
        LiouvExpr::constant(x.clone())
    }
    fn is_nil(&self) -> bool {
        self.is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        LiouvExpr::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        LiouvExpr::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        LiouvExpr::mul(self, other)
    }
    fn neg(&self) -> Self {
        LiouvExpr::neg(self)
    }
    fn scale(&self, x: &Rational) -> Self {
        LiouvExpr::scale(self, x)
    }
    fn derive(&self) -> Self {
        LiouvExpr::derive(self)
    }
    fn try_inverse(&self) -> Option<Self> {
        LiouvExpr::try_inverse(self)
    }
    fn as_q(&self) -> Option<Rational> {
        self.as_poly()?.as_constant()
    }
}

impl From<DiffPoly> for LiouvExpr {
    fn from(p: DiffPoly) -> Self {
        LiouvExpr::poly(p)
    }
}

/// Expression tree before normalization.
#[derive(Clone, Debug, PartialEq)]
pub enum LiouvNode {
    Scalar(DiffPoly),
    Integral(Box<LiouvNode>),
    /// e^{k∫g}; g must normalize to a differential polynomial.
    ExpIntegral(Box<LiouvNode>, i64),
    Sum(Vec<LiouvNode>),
    Product(Vec<LiouvNode>),
}

impl LiouvNode {
    pub fn normalize(&self) -> Result<LiouvExpr> {
        Ok(match self {
            LiouvNode::Scalar(p) => LiouvExpr::poly(p.clone()),
            LiouvNode::Integral(f) => LiouvExpr::integral(&f.normalize()?),
            LiouvNode::ExpIntegral(g, k) => {
                let g = g.normalize()?.as_poly().ok_or_else(|| {
                    Error::Parse("exponent of an exponential must be a differential polynomial".into())
                })?;
                LiouvExpr::exp_integral(&g.scale(&q(*k)))
            }
            LiouvNode::Sum(v) => v
                .iter()
                .try_fold(LiouvExpr::zero(), |acc, n| Ok::<_, Error>(acc.add(&n.normalize()?)))?,
            LiouvNode::Product(v) => v
                .iter()
                .try_fold(LiouvExpr::one(), |acc, n| Ok::<_, Error>(acc.mul(&n.normalize()?)))?,
        })
    }
}

fn fmt_factor_poly(p: &DiffPoly, alone: bool) -> (bool, String) {
    // returns (negative, text without sign)
    if let Some(c) = p.as_constant() {
        let neg = c.is_negative();
        let a = c.abs();
        let s = if a.is_one() && !alone {
            String::new()
        } else {
            crate::scalar::show_q(&a)
        };
        return (neg, s);
    }
    if p.num_terms() == 1 {
        let (_, c) = p.terms().next().unwrap();
        if c.is_negative() {
            return (true, p.neg().to_string());
        }
        return (false, p.to_string());
    }
    (false, format!("({p})"))
}

impl fmt::Display for LiouvExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let (neg, mut s) = fmt_factor_poly(c, k.is_unit());
            for (a, p) in &k.ints {
                s.push_str(&format!("(∫ {})", a.integrand()));
                if *p > 1 {
                    s.push_str(&format!("^{p}"));
                }
            }
            if !k.exp.is_zero() {
                s.push_str(&format!("e^{{∫({})}}", k.exp));
            }
            match (i, neg) {
                (0, true) => write!(f, "-{s}")?,
                (0, false) => write!(f, "{s}")?,
                (_, true) => write!(f, " - {s}")?,
                (_, false) => write!(f, " + {s}")?,
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
        names: &'a BTreeMap<String, LiouvExpr>,
    }

    fn superscript_digit(c: char) -> Option<u32> {
        "⁰¹²³⁴⁵⁶⁷⁸⁹".chars().position(|d| d == c).map(|p| p as u32)
    }

    impl<'a> Parser<'a> {
        pub fn new(s: &str, names: &'a BTreeMap<String, LiouvExpr>) -> Self {
            Parser {
                chars: s.chars().map(|c| if c == '−' { '-' } else { c }).collect(),
                pos: 0,
                names,
            }
        }

        fn err<T>(&self, msg: &str) -> Result<T> {
            let ctx: String = self.chars[self.pos.min(self.chars.len())..].iter().take(12).collect();
            Err(Error::Parse(format!("{msg} at {} near {ctx:?}", self.pos)))
        }

        fn skip_ws(&mut self) {
            while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
                self.pos += 1;
            }
        }

        fn peek(&mut self) -> Option<char> {
            self.skip_ws();
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

        fn starts_with(&mut self, s: &str) -> bool {
            self.skip_ws();
            let n = s.chars().count();
            self.chars.len() >= self.pos + n
                && self.chars[self.pos..self.pos + n].iter().copied().eq(s.chars())
        }

        pub fn parse(mut self) -> Result<LiouvExpr> {
            let e = self.expr()?;
            if self.peek().is_some() {
                return self.err("trailing input");
            }
            Ok(e)
        }

        fn at_end_of_expr(&mut self) -> bool {
            matches!(self.peek(), None | Some(')') | Some('}'))
        }

        fn expr(&mut self) -> Result<LiouvExpr> {
            let mut acc = LiouvExpr::zero();
            let mut first = true;
            while !self.at_end_of_expr() {
                let sign = if self.eat('+') {
                    1
                } else if self.eat('-') {
                    -1
                } else if first {
                    1
                } else {
                    return self.err("expected + or -");
                };
                first = false;
                let t = self.term()?;
                acc = if sign < 0 { acc.sub(&t) } else { acc.add(&t) };
            }
            if first {
                return self.err("empty expression");
            }
            Ok(acc)
        }

        fn term(&mut self) -> Result<LiouvExpr> {
            let mut acc = LiouvExpr::one();
            let mut any = false;
            loop {
                match self.peek() {
                    None | Some(')') | Some('}') | Some('+') | Some('-') => break,
                    Some('*') | Some('·') => {
                        self.pos += 1;
                        continue;
                    }
                    Some('/') => {
                        self.pos += 1;
                        let d = self.factor()?;
                        let inv = match d.as_poly().and_then(|p| p.as_constant()) {
                            Some(c) if !c.is_zero() => LiouvExpr::constant(c.recip()),
                            _ => match d.try_inverse() {
                                Some(i) => i,
                                None => return self.err("divisor has no closed-form inverse"),
                            },
                        };
                        acc = acc.mul(&inv);
                        continue;
                    }
                    Some('∫') => {
                        // the integrand runs to the end of the enclosing expression
                        self.pos += 1;
                        let f = self.expr()?;
                        acc = acc.mul(&LiouvExpr::integral(&f));
                        any = true;
                        break;
                    }
                    _ => {}
                }
                let f = self.factor()?;
                acc = acc.mul(&f);
                any = true;
            }
            if !any {
                return self.err("expected a factor");
            }
            Ok(acc)
        }

        fn number(&mut self) -> Option<u64> {
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == start {
                return None;
            }
            self.chars[start..self.pos].iter().collect::<String>().parse().ok()
        }

        fn index(&mut self) -> Result<u32> {
            if self.eat('{') {
                let n = self.number();
                if !self.eat('}') {
                    return self.err("expected }");
                }
                n.map(|n| n as u32).ok_or_else(|| Error::Parse("expected index".into()))
            } else {
                match self.number() {
                    Some(n) => Ok(n as u32),
                    None => self.err("expected index"),
                }
            }
        }

        fn factor(&mut self) -> Result<LiouvExpr> {
            let mut base = self.primary()?;
            loop {
                if self.pos < self.chars.len() && self.chars[self.pos] == '\'' {
                    self.pos += 1;
                    base = base.derive();
                } else if self.pos < self.chars.len() && superscript_digit(self.chars[self.pos]).is_some() {
                    let mut e = 0;
                    while let Some(d) = self.chars.get(self.pos).and_then(|c| superscript_digit(*c)) {
                        e = e * 10 + d;
                        self.pos += 1;
                    }
                    base = base.pow(e);
                } else if self.pos < self.chars.len() && self.chars[self.pos] == '^' {
                    self.pos += 1;
                    let braced = self.eat('{');
                    if self.eat('(') {
                        let k = self.number().unwrap_or(0);
                        if !self.eat(')') {
                            return self.err("expected )");
                        }
                        for _ in 0..k {
                            base = base.derive();
                        }
                    } else {
                        let Some(e) = self.number() else {
                            return self.err("expected exponent");
                        };
                        base = base.pow(e as u32);
                    }
                    if braced && !self.eat('}') {
                        return self.err("expected }");
                    }
                } else {
                    break;
                }
            }
            Ok(base)
        }

        fn exponent_body(&mut self) -> Result<DiffPoly> {
            // e^{∫ g}: the body must be a sum of rational multiples of ∫g_k
            let body = self.expr()?;
            let mut g = DiffPoly::zero();
            for (k, c) in body.terms() {
                let c = c.as_constant();
                match (c, k.integrals()) {
                    (Some(c), [(a, 1)]) if k.exponent().is_zero() => {
                        let p = a.integrand().as_poly().ok_or_else(|| {
                            Error::Parse("exponential integrand must be polynomial".into())
                        })?;
                        g = g.add(&p.scale(&c));
                    }
                    _ => return self.err("exponent must be a combination of integrals"),
                }
            }
            Ok(g)
        }

        fn primary(&mut self) -> Result<LiouvExpr> {
            let Some(c) = self.peek() else {
                return self.err("unexpected end");
            };
            if c == '(' {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected )");
                }
                return Ok(e);
            }
            if c.is_ascii_digit() {
                let n = self.number().unwrap();
                return Ok(LiouvExpr::constant(q(n as i64)));
            }
            if self.starts_with("e^{") {
                self.pos += 3;
                let g = self.exponent_body()?;
                if !self.eat('}') {
                    return self.err("expected }");
                }
                return Ok(LiouvExpr::exp_integral(&g));
            }
            if self.starts_with("exp(") {
                self.pos += 4;
                let g = self.exponent_body()?;
                if !self.eat(')') {
                    return self.err("expected )");
                }
                return Ok(LiouvExpr::exp_integral(&g));
            }
            // identifiers: η_i, eta_i, or a named reference like y_3
            let start = self.pos;
            while self.pos < self.chars.len()
                && (self.chars[self.pos].is_alphabetic() && self.chars[self.pos] != '∫')
            {
                self.pos += 1;
            }
            let ident: String = self.chars[start..self.pos].iter().collect();
            if ident.is_empty() {
                return self.err("unexpected character");
            }
            if !self.eat('_') {
                return self.err("expected _ after identifier");
            }
            let idx = self.index()?;
            if ident == "η" || ident == "eta" {
                return Ok(LiouvExpr::poly(DiffPoly::var(idx)));
            }
            let name = format!("{ident}_{idx}");
            match self.names.get(&name) {
                Some(e) => Ok(e.clone()),
                None => self.err(&format!("unknown name {name}")),
            }
        }
    }
}
