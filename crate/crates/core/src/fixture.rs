//! Golden fixtures: expected pipeline quantities written in the η notation
//! and compared by canonical-form equality.
//!
//! Expressions may refer to computed quantities by name (`v_4`, `g_1`,
//! `ell_2`, `p_6`, `gbar_1`, `h_3`, `q_5`, `f_4`, `lbar_5`, `pbar_6`,
//! `lhat_3`, `phat_5`, `inv_6`) and to the fixture's own macros.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chevalley::{ChevalleyRep, Coords};
use crate::construct::Pipeline;
use crate::diffpoly::DiffPoly;
use crate::error::{Error, Result};
use crate::liouville_expr::LiouvExpr;
use crate::matrix::QMatrix;
use crate::scalar::{parse_q, Rational};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Fixture {
    #[serde(rename = "type")]
    pub kind: String,
    pub rank: usize,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default)]
    pub macros: BTreeMap<String, String>,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub kind: String,
    #[serde(default)]
    pub index: Option<usize>,
    pub expect: Value,
    /// Right-hand side for `identity` checks; both sides are compared after
    /// substituting η_i = f_i.
    #[serde(default)]
    pub rhs: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub label: String,
    pub ok: bool,
    pub detail: String,
}

impl Fixture {
    pub fn from_path(path: &Path) -> Result<Fixture> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Fixture::from_str(&text)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Result<Fixture> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

const BASE: u32 = 100_000;

/// Named DiffPoly values, substituted through placeholder variables.
struct Names {
    names: Vec<(String, u32)>,
    values: BTreeMap<u32, DiffPoly>,
    n_computed: usize,
}

impl Names {
    fn new(pl: &Pipeline) -> Names {
        let mut n = Names { names: Vec::new(), values: BTreeMap::new(), n_computed: 0 };
        for (k, v) in &pl.stage1.v {
            n.push(format!("v_{k}"), v.clone());
        }
        let vecs: [(&str, &Vec<DiffPoly>); 6] = [
            ("g", &pl.stage2.g),
            ("ell", &pl.stage2.ell),
            ("p", &pl.stage2.p),
            ("gbar", &pl.liouville.gbar),
            ("h", &pl.h_raw.h),
            ("q", &pl.h_raw.q),
        ];
        for (name, v) in vecs {
            for (i, x) in v.iter().enumerate() {
                n.push(format!("{name}_{}", i + 1), x.clone());
            }
        }
        for (name, m) in [("f", &pl.elim.f), ("lbar", &pl.elim.lbar), ("pbar", &pl.elim.pbar)] {
            for (k, x) in m {
                n.push(format!("{name}_{k}"), x.clone());
            }
        }
        for (a, &j) in pl.inv.comp.iter().enumerate() {
            n.push(format!("lhat_{j}"), pl.inv.lhat[a].clone());
            n.push(format!("phat_{j}"), pl.inv.phat[a].clone());
            n.push(format!("inv_{j}"), pl.inv.h[a].clone());
        }
        n.n_computed = n.names.len();
        n
    }

    fn push(&mut self, name: String, v: DiffPoly) {
        let id = BASE + self.names.len() as u32;
        self.names.push((name, id));
        self.values.insert(id, v);
    }

    /// Computed quantities only; macros never shadow these.
    fn computed(&self, name: &str) -> Option<&DiffPoly> {
        self.names[..self.n_computed].iter().find(|(n, _)| n == name).map(|(_, id)| &self.values[id])
    }

    /// Later names shadow earlier ones, so macros win inside expressions.
    fn parse(&self, s: &str) -> Result<DiffPoly> {
        let refs: Vec<(&str, u32)> = self.names.iter().rev().map(|(n, id)| (n.as_str(), *id)).collect();
        let raw = DiffPoly::parse_with(s, &refs)?;
        // macros may refer to other names, so substitute until no placeholder is left
        let mut p = raw;
        for _ in 0..4 {
            if !p.vars().iter().any(|v| v.var >= BASE) {
                break;
            }
            p = p.substitute_partial(&self.values);
        }
        Ok(p)
    }
}

fn text(v: &Value) -> Result<&str> {
    v.as_str().ok_or_else(|| Error::Parse(format!("expected a string, got {v}")))
}

fn entries(v: &Value) -> Result<Vec<(usize, usize, i64)>> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))
}

/// The value on success; otherwise both sides and the first differing term.
fn describe(got: &DiffPoly, want: &DiffPoly) -> String {
    let d = got.sub(want);
    let first = d.terms().next().map(|(m, c)| DiffPoly::term(c.clone(), m.clone()));
    match first {
        None => got.to_string(),
        Some(t) => format!("expected {want}, got {got}; first differing term {t}"),
    }
}

/// JSON paths at which two reports differ, depth first.
pub fn diff_json(expected: &Value, got: &Value) -> Vec<String> {
    fn walk(path: String, a: &Value, b: &Value, out: &mut Vec<String>) {
        match (a, b) {
            (Value::Object(x), Value::Object(y)) => {
                for (k, v) in x {
                    match y.get(k) {
                        Some(w) => walk(format!("{path}.{k}"), v, w, out),
                        None => out.push(format!("{path}.{k}: missing")),
                    }
                }
                for k in y.keys().filter(|k| !x.contains_key(*k)) {
                    out.push(format!("{path}.{k}: unexpected"));
                }
            }
            (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
                for (i, (v, w)) in x.iter().zip(y).enumerate() {
                    walk(format!("{path}[{i}]"), v, w, out);
                }
            }
            _ if a == b => {}
            _ => out.push(format!("{path}: expected {a}, got {b}")),
        }
    }
    let mut out = Vec::new();
    walk(String::new(), expected, got, &mut out);
    out
}

/// Runs every check; parse errors in the fixture are errors, mismatches are
/// reported as failed outcomes.
pub fn run_checks(rep: &ChevalleyRep, pl: &Pipeline, fx: &Fixture) -> Result<Vec<Outcome>> {
    let mut names = Names::new(pl);
    for (k, s) in &fx.macros {
        let p = names.parse(s)?;
        names.push(k.clone(), p);
    }
    let mut lex: BTreeMap<String, LiouvExpr> = BTreeMap::new();
    for (i, y) in pl.liouville.y.iter().enumerate() {
        lex.insert(format!("y_{}", i + 1), y.clone());
    }
    for (i, z) in pl.liouville.z.iter().enumerate() {
        lex.insert(format!("z_{}", i + 1), z.clone());
    }
    let f_sigma: BTreeMap<u32, DiffPoly> = pl.elim.f.iter().map(|(&k, f)| (k as u32, f.clone())).collect();

    let mut out = Vec::new();
    for c in &fx.checks {
        let idx = c.index.map(|i| format!("_{i}")).unwrap_or_default();
        let label = format!("{}{idx}", c.kind);
        let (ok, detail) = match c.kind.as_str() {
            "c" => {
                let i = c.index.ok_or_else(|| Error::Parse("c needs an index".into()))?;
                let want = parse_q(text(&c.expect)?)?;
                let got: Option<&Rational> = pl.liouville.c.get(i - 1);
                (got == Some(&want), format!("{got:?}"))
            }
            "n_bar" => {
                let want = QMatrix::from_entries(rep.dim(), &entries(&c.expect)?);
                (pl.liouville.n_bar == want, pl.liouville.n_bar.to_json().to_string())
            }
            "A_L" => {
                let h: Vec<DiffPoly> = c.expect["gbar"]
                    .as_array()
                    .ok_or_else(|| Error::Parse("A_L needs gbar".into()))?
                    .iter()
                    .map(|s| names.parse(text(s)?))
                    .collect::<Result<_>>()?;
                let cs: Vec<DiffPoly> = c.expect["c"]
                    .as_array()
                    .ok_or_else(|| Error::Parse("A_L needs c".into()))?
                    .iter()
                    .map(|s| Ok(DiffPoly::constant(parse_q(text(s)?)?)))
                    .collect::<Result<_>>()?;
                let want = rep.combine(&Coords { h, x: BTreeMap::new() }).add(&rep.a0(false, &cs));
                (pl.liouville.a_l == want, "A_L differs".to_string())
            }
            "z" | "y" => {
                let i = c.index.ok_or_else(|| Error::Parse(format!("{} needs an index", c.kind)))?;
                let want = LiouvExpr::parse_with(text(&c.expect)?, &lex)?;
                let got = lex.get(&format!("{}_{i}", c.kind)).cloned().unwrap_or_default();
                (got == want, got.to_string())
            }
            "vanishes_under_f" => {
                let p = names.parse(text(&c.expect)?)?.substitute_partial(&f_sigma);
                (p.is_zero(), p.to_string())
            }
            "reduces_to" => {
                let i = c.index.ok_or_else(|| Error::Parse("reduces_to needs an index".into()))?;
                let p = names.parse(text(&c.expect)?)?.substitute_partial(&f_sigma);
                let got = names.computed(&format!("inv_{i}")).cloned().unwrap_or_default();
                (p == got, describe(&got, &p))
            }
            "identity" => {
                let rhs = c.rhs.as_deref().ok_or_else(|| Error::Parse("identity needs rhs".into()))?;
                let lhs = names.parse(text(&c.expect)?)?.substitute_partial(&f_sigma);
                let rhs = names.parse(rhs)?.substitute_partial(&f_sigma);
                (lhs == rhs, describe(&lhs, &rhs))
            }
            kind => {
                let i = c.index.ok_or_else(|| Error::Parse(format!("{kind} needs an index")))?;
                let got = names
                    .computed(&format!("{kind}_{i}"))
                    .cloned()
                    .ok_or_else(|| Error::Parse(format!("no computed quantity {kind}_{i}")))?;
                let want = names.parse(text(&c.expect)?)?;
                (got == want, describe(&got, &want))
            }
        };
        out.push(Outcome { label, ok, detail });
    }
    Ok(out)
}
