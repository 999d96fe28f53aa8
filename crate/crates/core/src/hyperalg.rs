//! Finite-dimensional graded spans of forms and the hyper-algebra product.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde_json::json;

use crate::ahol::AholForm;
use crate::error::{Error, Result};
use crate::exactnum::{format_rational, rat_int, CycNum, Rational};
use crate::linalg::{Matrix, Subspace};
use crate::qexp::QExp;
use crate::reps::{hom_space, Rep, RepRegistry};

pub type Grade = (i64, String);

/// Generating forms grouped by `(weight, type label)`, each with a
/// provenance note. Generators inside a grade are kept linearly independent
/// at the precision common to the grade.
#[derive(Clone, Debug, Default)]
pub struct FormSpan {
    grades: BTreeMap<Grade, Vec<(AholForm, String)>>,
}

type Key = (usize, usize, Rational);

fn coefficient_rows(forms: &[&AholForm], prec: &Rational) -> Vec<Vec<CycNum>> {
    let coeffs: Vec<BTreeMap<Key, CycNum>> = forms
        .iter()
        .map(|f| f.coefficients(prec).into_iter().collect())
        .collect();
    let keys: BTreeSet<&Key> = coeffs.iter().flat_map(|c| c.keys()).collect();
    coeffs
        .iter()
        .map(|c| {
            keys.iter()
                .map(|k| c.get(*k).cloned().unwrap_or_else(CycNum::zero))
                .collect()
        })
        .collect()
}

/// `f` lies in the span of `gens` when compared below `prec`.
fn in_span(gens: &[&AholForm], f: &AholForm, prec: &Rational) -> bool {
    let mut all: Vec<&AholForm> = gens.to_vec();
    all.push(f);
    let mut rows = coefficient_rows(&all, prec);
    let target = rows.pop().unwrap();
    if target.iter().all(CycNum::is_zero) {
        return true;
    }
    let space = Subspace::from_vectors(target.len(), rows);
    space.contains(&target).unwrap_or(false)
}

impl FormSpan {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `f` unless it is zero or already in the span. Returns whether it was added.
    pub fn insert(&mut self, f: AholForm, provenance: String) -> bool {
        if f.is_zero() {
            return false;
        }
        let key = (f.weight(), f.rep().label().to_string());
        let gens = self.grades.entry(key).or_default();
        let prec = gens
            .iter()
            .map(|(g, _)| g.prec())
            .chain([f.prec()])
            .min()
            .unwrap();
        let refs: Vec<&AholForm> = gens.iter().map(|(g, _)| g).collect();
        if in_span(&refs, &f, &prec) {
            return false;
        }
        gens.push((f, provenance));
        true
    }

    pub fn generators(&self) -> impl Iterator<Item = (&AholForm, &str)> {
        self.grades.values().flatten().map(|(f, p)| (f, p.as_str()))
    }

    pub fn grades(&self) -> impl Iterator<Item = (&Grade, &[(AholForm, String)])> {
        self.grades.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn grade(&self, weight: i64, label: &str) -> &[(AholForm, String)] {
        self.grades
            .get(&(weight, label.to_string()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn dim(&self, weight: i64, label: &str) -> usize {
        self.grade(weight, label).len()
    }

    pub fn dims(&self) -> BTreeMap<Grade, usize> {
        self.grades
            .iter()
            .map(|(k, v)| (k.clone(), v.len()))
            .filter(|(_, n)| *n > 0)
            .collect()
    }

    pub fn total_dim(&self) -> usize {
        self.grades.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn prec(&self) -> Option<Rational> {
        self.generators().map(|(f, _)| f.prec()).min()
    }

    /// Truncates every generator and re-prunes dependencies.
    pub fn truncate(&self, prec: &Rational) -> FormSpan {
        let mut out = FormSpan::new();
        for (f, p) in self.generators() {
            out.insert(f.truncate(prec), p.to_string());
        }
        out
    }

    /// Membership test without the Sturm-bound guard.
    pub fn contains_unchecked(&self, f: &AholForm, prec: &Rational) -> Result<bool> {
        if f.is_zero() {
            return Ok(true);
        }
        let gens: Vec<&AholForm> = self
            .grade(f.weight(), f.rep().label())
            .iter()
            .map(|(g, _)| g)
            .collect();
        if let Some(g) = gens.first() {
            if g.rep() != f.rep() {
                return Err(Error::InvalidArgument(format!(
                    "type {} differs from the span's",
                    f.rep().label()
                )));
            }
        }
        Ok(in_span(&gens, f, prec))
    }

    /// Coordinates of `f` in the generators of its grade, compared below `prec`;
    /// `None` when `f` is not in the span.
    pub fn express(&self, f: &AholForm, prec: &Rational) -> Result<Option<Vec<CycNum>>> {
        let gens: Vec<&AholForm> = self
            .grade(f.weight(), f.rep().label())
            .iter()
            .map(|(g, _)| g)
            .collect();
        if gens.is_empty() {
            return Ok(if f.truncate(prec).is_zero() {
                Some(vec![])
            } else {
                None
            });
        }
        let mut all = gens.clone();
        all.push(f);
        let mut rows = coefficient_rows(&all, prec);
        let target = rows.pop().unwrap();
        let a = Matrix::from_rows(rows)?.transpose();
        let b = Matrix::new(target.len(), 1, target)?;
        match a.solve_right(&b) {
            Ok(x) => Ok(Some(x.flatten())),
            Err(Error::InconsistentSystem) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Every generator of `other` lies in `self`, compared below `prec`.
    pub fn contains_span(&self, other: &FormSpan, prec: &Rational) -> Result<bool> {
        for (f, _) in other.generators() {
            if !self.contains_unchecked(f, prec)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let grades: Vec<_> = self
            .grades
            .iter()
            .filter(|(_, g)| !g.is_empty())
            .map(|((w, label), gens)| {
                json!({
                    "weight": w,
                    "type": label,
                    "dim": gens.len(),
                    "generators": gens.iter().map(|(f, p)| json!({"provenance": p, "form": f.to_json_value()})).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "prec": self.prec().map(|p| format_rational(&p)),
            "grades": grades,
        })
    }

    pub fn from_json(s: &str, registry: &RepRegistry) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s)?;
        let mut span = FormSpan::new();
        let grades = v["grades"]
            .as_array()
            .ok_or_else(|| Error::Parse("span needs a \"grades\" array".into()))?;
        for g in grades {
            let gens = g["generators"]
                .as_array()
                .ok_or_else(|| Error::Parse("grade needs \"generators\"".into()))?;
            for gen in gens {
                let f = AholForm::from_json_value(gen["form"].clone(), registry)?;
                let prov = gen["provenance"].as_str().unwrap_or("input").to_string();
                span.insert(f, prov);
            }
        }
        Ok(span)
    }
}

/// Graded union of spans.
pub fn span_sum(spans: &[&FormSpan]) -> FormSpan {
    let mut out = FormSpan::new();
    for s in spans {
        for (f, p) in s.generators() {
            out.insert(f.clone(), p.to_string());
        }
    }
    out
}

/// `⌈k · index / 12⌉ + 1`.
pub fn sturm_bound(k: i64, level_index: u64) -> u64 {
    let num = k.max(0) as u64 * level_index;
    num.div_ceil(12) + 1
}

/// `[SL2(Z) : Γ(N)] = N³ Π_{p | N} (1 − p⁻²)`.
pub fn congruence_index(n: u64) -> u64 {
    let mut idx = n * n * n;
    let mut m = n;
    let mut p = 2;
    while m > 1 {
        if m.is_multiple_of(p) {
            idx = idx / (p * p) * (p * p - 1);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    idx
}

/// Exact membership of `f` in `s`, comparing all coefficients below `prec_used`.
///
/// Refuses to answer below the Sturm bound for the weight and level of `f`,
/// or when any participating expansion is shorter than `prec_used`.
pub fn span_contains(s: &FormSpan, f: &AholForm, prec_used: u64) -> Result<bool> {
    let bound = sturm_bound(f.weight(), congruence_index(f.rep().level()));
    if prec_used < bound {
        return Err(Error::InsufficientPrecision {
            needed: bound.to_string(),
            available: prec_used.to_string(),
        });
    }
    let p = rat_int(prec_used as i64);
    let shortest = s
        .grade(f.weight(), f.rep().label())
        .iter()
        .map(|(g, _)| g.prec())
        .chain([f.prec()])
        .min()
        .unwrap();
    if shortest < p {
        return Err(Error::InsufficientPrecision {
            needed: prec_used.to_string(),
            available: format_rational(&shortest),
        });
    }
    s.contains_unchecked(f, &p)
}

/// The constant `1` of weight 0 and trivial type.
pub fn one_form(prec: u64) -> AholForm {
    AholForm::holomorphic(
        0,
        Rep::trivial(),
        vec![QExp::constant(CycNum::one(), rat_int(prec as i64))],
    )
    .unwrap()
}

/// `f ⊗̲ g`: all projections `φ ∘ (f ⊗ g)` for `φ` in a basis of each
/// `Hom(ρ_f ⊗ ρ_g, τ)`, `τ` in `targets`.
pub fn hyper_tensor(f: &AholForm, g: &AholForm, targets: &RepRegistry) -> Result<FormSpan> {
    hyper_tensor_labeled(f, "f", g, "g", targets)
}

pub fn hyper_tensor_labeled(
    f: &AholForm,
    fname: &str,
    g: &AholForm,
    gname: &str,
    targets: &RepRegistry,
) -> Result<FormSpan> {
    let p = f.prec().min(g.prec());
    if p <= Rational::zero() {
        return Err(Error::PrecisionExhausted(
            "inputs have no common sound coefficients".into(),
        ));
    }
    let prod = f.tensor(g);
    let mut span = FormSpan::new();
    for target in targets.iter() {
        for (idx, phi) in hom_space(prod.rep(), target).iter().enumerate() {
            let h = prod.apply_matrix(phi, target)?;
            span.insert(
                h,
                format!("phi[{idx}]({fname} x {gname}) -> {}", target.label()),
            );
        }
    }
    Ok(span)
}
