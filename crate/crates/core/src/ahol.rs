//! Almost-holomorphic vector-valued forms `Σ_r g_r Y^r` with `Y = 1/(4πy)`,
//! the normalized raising and lowering operators, and depth decomposition.
//!
//! With `R̂ = R/4π` and `L̂ = 4πL` every coefficient stays in the cyclotomic
//! field:
//!
//! ```text
//! R̂(g Y^r) = -θg Y^r + (k - r) g Y^{r+1}      (weight k -> k + 2)
//! L̂(g Y^r) = -r g Y^{r-1}                       (weight k -> k - 2)
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{format_rational, lcm, parse_rational, rat_int, CycNum, Rational};
use crate::hyperalg::FormSpan;
use crate::linalg::Matrix;
use crate::qexp::QExp;
use crate::reps::{hom_space, Rep, RepRegistry};

/// A vector-valued almost-holomorphic form of weight `k` and type `ρ`.
///
/// `graded[r][i]` is the coefficient of `Y^r` in component `i`. The top layer
/// is nonzero unless the whole form is zero; depth-0 forms are holomorphic.
#[derive(Clone, Debug)]
pub struct AholForm {
    weight: i64,
    rep: Rep,
    graded: Vec<Vec<QExp>>,
}

impl AholForm {
    pub fn new(weight: i64, rep: Rep, mut graded: Vec<Vec<QExp>>) -> Result<Self> {
        if weight % 2 != 0 {
            return Err(Error::InvalidArgument(format!("odd weight {weight}")));
        }
        if graded.is_empty() {
            return Err(Error::InvalidArgument(
                "form needs at least one layer".into(),
            ));
        }
        for layer in &graded {
            if layer.len() != rep.dim() {
                return Err(Error::DimensionMismatch {
                    expected: rep.dim(),
                    found: layer.len(),
                });
            }
        }
        while graded.len() > 1 && graded.last().unwrap().iter().all(QExp::is_zero) {
            graded.pop();
        }
        Ok(AholForm {
            weight,
            rep,
            graded,
        })
    }

    pub fn holomorphic(weight: i64, rep: Rep, components: Vec<QExp>) -> Result<Self> {
        Self::new(weight, rep, vec![components])
    }

    /// The zero form of the given weight and type.
    pub fn zero(weight: i64, rep: Rep, prec: Rational) -> Self {
        let comps = vec![QExp::zero(prec); rep.dim()];
        AholForm {
            weight,
            rep,
            graded: vec![comps],
        }
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn rep(&self) -> &Rep {
        &self.rep
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn depth(&self) -> usize {
        self.graded.len() - 1
    }

    pub fn graded(&self) -> &[Vec<QExp>] {
        &self.graded
    }

    pub fn layer(&self, r: usize) -> Option<&[QExp]> {
        self.graded.get(r).map(Vec::as_slice)
    }

    /// Holomorphic components (`Y^0` layer).
    pub fn components(&self) -> &[QExp] {
        &self.graded[0]
    }

    pub fn is_holomorphic(&self) -> bool {
        self.depth() == 0
    }

    pub fn is_zero(&self) -> bool {
        self.graded.iter().flatten().all(QExp::is_zero)
    }

    pub fn prec(&self) -> Rational {
        self.graded
            .iter()
            .flatten()
            .map(|q| q.prec().clone())
            .min()
            .expect("nonempty")
    }

    /// Common exponent lattice of all components.
    pub fn lattice(&self) -> u64 {
        self.graded
            .iter()
            .flatten()
            .fold(1, |h, q| lcm(h, q.denom()))
    }

    pub fn with_rep(mut self, rep: Rep) -> Result<Self> {
        if rep.dim() != self.rep.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.rep.dim(),
                found: rep.dim(),
            });
        }
        self.rep = rep;
        Ok(self)
    }

    pub fn truncate(&self, prec: &Rational) -> Self {
        let graded = self
            .graded
            .iter()
            .map(|l| l.iter().map(|q| q.truncate(prec)).collect())
            .collect();
        AholForm::new(self.weight, self.rep.clone(), graded).unwrap()
    }

    fn check_compatible(&self, other: &AholForm) -> Result<()> {
        if self.weight != other.weight {
            return Err(Error::InvalidArgument(format!(
                "weights differ: {} vs {}",
                self.weight, other.weight
            )));
        }
        if self.rep != other.rep {
            return Err(Error::InvalidArgument(format!(
                "types differ: {} vs {}",
                self.rep.label(),
                other.rep.label()
            )));
        }
        Ok(())
    }

    fn zip_layers(&self, other: &AholForm, f: impl Fn(&QExp, &QExp) -> QExp) -> Result<AholForm> {
        self.check_compatible(other)?;
        let depth = self.graded.len().max(other.graded.len());
        let p = self.prec().min(other.prec());
        let zero = vec![QExp::zero(p); self.dim()];
        let graded = (0..depth)
            .map(|r| {
                let a = self.graded.get(r).unwrap_or(&zero);
                let b = other.graded.get(r).unwrap_or(&zero);
                a.iter().zip(b).map(|(x, y)| f(x, y)).collect()
            })
            .collect();
        AholForm::new(self.weight, self.rep.clone(), graded)
    }

    pub fn add(&self, other: &AholForm) -> Result<AholForm> {
        self.zip_layers(other, QExp::add)
    }

    pub fn sub(&self, other: &AholForm) -> Result<AholForm> {
        self.zip_layers(other, QExp::sub)
    }

    pub fn scale(&self, c: &CycNum) -> AholForm {
        self.map_qexp(|q| q.scale(c))
    }

    pub fn scale_rational(&self, c: &Rational) -> AholForm {
        self.map_qexp(|q| q.scale_rational(c))
    }

    fn map_qexp(&self, f: impl Fn(&QExp) -> QExp) -> AholForm {
        let graded = self
            .graded
            .iter()
            .map(|l| l.iter().map(&f).collect())
            .collect();
        AholForm::new(self.weight, self.rep.clone(), graded).unwrap()
    }

    /// Componentwise `phi · f`, re-typed as `target`. No intertwining check.
    pub fn apply_matrix(&self, phi: &Matrix, target: &Rep) -> Result<AholForm> {
        if phi.cols() != self.dim() || phi.rows() != target.dim() {
            return Err(Error::Shape(format!(
                "matrix {}x{} cannot map dim {} to dim {}",
                phi.rows(),
                phi.cols(),
                self.dim(),
                target.dim()
            )));
        }
        let p = self.prec();
        let graded = self
            .graded
            .iter()
            .map(|layer| {
                (0..phi.rows())
                    .map(|i| {
                        layer
                            .iter()
                            .enumerate()
                            .fold(QExp::zero(p.clone()), |acc, (j, q)| {
                                let c = phi.get(i, j);
                                if c.is_zero() {
                                    acc
                                } else {
                                    acc.add(&q.scale(c))
                                }
                            })
                    })
                    .collect()
            })
            .collect();
        AholForm::new(self.weight, target.clone(), graded)
    }

    /// Pointwise tensor product `f ⊗ g` of type `ρ_f ⊗ ρ_g`; depths add.
    pub fn tensor(&self, other: &AholForm) -> AholForm {
        let rep = self.rep.tensor(&other.rep);
        let depth = self.depth() + other.depth();
        let p = self.prec().min(other.prec());
        let n = rep.dim();
        let mut graded = vec![vec![QExp::zero(p.clone()); n]; depth + 1];
        for (r1, l1) in self.graded.iter().enumerate() {
            for (r2, l2) in other.graded.iter().enumerate() {
                for (i, a) in l1.iter().enumerate() {
                    for (j, b) in l2.iter().enumerate() {
                        let slot = &mut graded[r1 + r2][i * other.dim() + j];
                        *slot = slot.add(&a.mul(b));
                    }
                }
            }
        }
        AholForm::new(self.weight + other.weight, rep, graded).unwrap()
    }

    /// Product with a scalar-valued form. When one factor has trivial type
    /// the result keeps the other factor's type; otherwise this is [`tensor`](Self::tensor).
    pub fn mul(&self, other: &AholForm) -> AholForm {
        let t = self.tensor(other);
        let trivial = Rep::trivial();
        if other.rep == trivial {
            t.with_rep(self.rep.clone()).unwrap()
        } else if self.rep == trivial {
            t.with_rep(other.rep.clone()).unwrap()
        } else {
            t
        }
    }

    /// `f(τ + 1)`: every layer gets the `q`-phase (`Y` is translation invariant).
    pub fn phase_shift(&self) -> AholForm {
        self.map_qexp(QExp::phase_shift)
    }

    /// Coordinates of the form up to `prec`, keyed by `(layer, component, exponent)`.
    pub fn coefficients(&self, prec: &Rational) -> Vec<((usize, usize, Rational), CycNum)> {
        let mut out = Vec::new();
        for (r, layer) in self.graded.iter().enumerate() {
            for (i, q) in layer.iter().enumerate() {
                for (e, c) in q.iter() {
                    if e < *prec {
                        out.push(((r, i, e), c.clone()));
                    }
                }
            }
        }
        out
    }
}

impl PartialEq for AholForm {
    /// Equal weight, type and layer expansions (including precision).
    fn eq(&self, other: &Self) -> bool {
        self.weight == other.weight && self.rep == other.rep && self.graded == other.graded
    }
}

impl fmt::Display for AholForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "weight {} type {} depth {}",
            self.weight,
            self.rep.label(),
            self.depth()
        )?;
        for (r, layer) in self.graded.iter().enumerate() {
            for (i, q) in layer.iter().enumerate() {
                writeln!(f, "  Y^{r} [{i}]: {q}")?;
            }
        }
        Ok(())
    }
}

/// `(a)^↑_n = a (a+1) ⋯ (a+n-1)`.
pub fn upper_factorial(a: i64, n: usize) -> BigInt {
    (0..n as i64).fold(BigInt::one(), |acc, i| acc * BigInt::from(a + i))
}

/// The graded raising formula with an explicit weight parameter `k`.
///
/// [`raise_op`] uses the form's own weight; this entry point exists for
/// identities that hold the weight parameter fixed.
pub fn raise_with_weight(f: &AholForm, k: i64) -> AholForm {
    let p = f.prec();
    let n = f.dim();
    let mut graded = vec![vec![QExp::zero(p.clone()); n]; f.graded.len() + 1];
    for (r, layer) in f.graded.iter().enumerate() {
        let factor = CycNum::from_int(k - r as i64);
        for (i, g) in layer.iter().enumerate() {
            graded[r][i] = graded[r][i].sub(&g.theta());
            graded[r + 1][i] = graded[r + 1][i].add(&g.scale(&factor));
        }
    }
    AholForm::new(f.weight + 2, f.rep.clone(), graded).unwrap()
}

/// `R̂ = R / 4π`, weight `k → k + 2`.
pub fn raise_op(f: &AholForm) -> AholForm {
    raise_with_weight(f, f.weight)
}

/// `L̂ = 4π L`, weight `k → k − 2`.
pub fn lower_op(f: &AholForm) -> AholForm {
    let p = f.prec();
    let n = f.dim();
    let depth = f.graded.len().saturating_sub(1).max(1);
    let mut graded = vec![vec![QExp::zero(p); n]; depth];
    for (r, layer) in f.graded.iter().enumerate().skip(1) {
        let factor = CycNum::from_int(-(r as i64));
        for (i, g) in layer.iter().enumerate() {
            graded[r - 1][i] = g.scale(&factor);
        }
    }
    AholForm::new(f.weight - 2, f.rep.clone(), graded).unwrap()
}

pub fn raise_times(f: &AholForm, t: usize) -> AholForm {
    (0..t).fold(f.clone(), |acc, _| raise_op(&acc))
}

/// Writes `f = Σ_t R̂^t h_t` with holomorphic `h_t` of weight `k − 2t`.
pub fn ahol_decompose(f: &AholForm) -> Result<Vec<AholForm>> {
    let k = f.weight;
    let d = f.depth();
    let p = f.prec();
    let mut rest = f.clone();
    let mut parts = vec![None; d + 1];
    for t in (0..=d).rev() {
        let weight = k - 2 * t as i64;
        let top: Vec<QExp> = match rest.layer(t) {
            Some(l) => l.to_vec(),
            None => vec![QExp::zero(p.clone()); f.dim()],
        };
        if top.iter().all(QExp::is_zero) {
            parts[t] = Some(AholForm::zero(weight, f.rep.clone(), p.clone()));
            continue;
        }
        let fact = upper_factorial(weight, t);
        if fact.is_zero() {
            return Err(Error::Obstruction(format!(
                "upper factorial ({weight})^{t} vanishes at layer {t}"
            )));
        }
        let inv = Rational::new(BigInt::one(), fact);
        let h = AholForm::holomorphic(
            weight,
            f.rep.clone(),
            top.iter().map(|q| q.scale_rational(&inv)).collect(),
        )?;
        rest = rest.sub(&raise_times(&h, t))?;
        parts[t] = Some(h);
    }
    debug_assert!(rest.is_zero());
    Ok(parts.into_iter().map(Option::unwrap).collect())
}

/// Projects `f` onto each target type through a basis of `Hom(ρ_f, target)`.
fn project_into(span: &mut FormSpan, f: &AholForm, targets: &RepRegistry, tag: &str) -> Result<()> {
    for target in targets.iter() {
        for (idx, phi) in hom_space(f.rep(), target).iter().enumerate() {
            let g = f.apply_matrix(phi, target)?;
            if !g.is_zero() {
                span.insert(
                    g,
                    format!(
                        "{tag} via phi[{idx}]: {} -> {}",
                        f.rep().label(),
                        target.label()
                    ),
                );
            }
        }
    }
    Ok(())
}

/// `T_∞ f = L̂f + R̂f`, graded by weight and projected onto the target types.
pub fn tinf(f: &AholForm, targets: &RepRegistry) -> Result<FormSpan> {
    let mut span = FormSpan::new();
    if f.is_zero() {
        return Ok(span);
    }
    project_into(&mut span, &lower_op(f), targets, "L")?;
    project_into(&mut span, &raise_op(f), targets, "R")?;
    Ok(span)
}

#[derive(Clone, Debug)]
pub struct Closure {
    pub span: FormSpan,
    pub rounds: usize,
    pub stabilized: bool,
}

/// Iterates `s ↦ s + L̂s + R̂s` inside a weight window until the graded
/// dimensions stop growing or `max_rounds` is reached.
pub fn tinf_closure(s: &FormSpan, window: (i64, i64), max_rounds: usize) -> Result<Closure> {
    let (lo, hi) = window;
    if lo > hi {
        return Err(Error::InvalidArgument(format!("empty window {lo}:{hi}")));
    }
    let in_window = |f: &AholForm| (lo..=hi).contains(&f.weight());
    let mut span = FormSpan::new();
    for (f, prov) in s.generators() {
        if in_window(f) {
            span.insert(f.clone(), prov.to_string());
        }
    }
    let mut frontier: Vec<AholForm> = span.generators().map(|(f, _)| f.clone()).collect();
    for round in 1..=max_rounds {
        let before = span.dims();
        let mut next = Vec::new();
        for f in &frontier {
            for (g, tag) in [(lower_op(f), "L"), (raise_op(f), "R")] {
                if g.is_zero() || !in_window(&g) {
                    continue;
                }
                if span.insert(g.clone(), format!("{tag} (round {round})")) {
                    next.push(g);
                }
            }
        }
        if span.dims() == before {
            return Ok(Closure {
                span,
                rounds: round,
                stabilized: true,
            });
        }
        frontier = next;
    }
    Ok(Closure {
        span,
        rounds: max_rounds,
        stabilized: false,
    })
}

#[derive(Serialize, Deserialize)]
pub(crate) struct FormWire {
    pub weight: i64,
    #[serde(rename = "type")]
    pub ty: serde_json::Value,
    pub h: u64,
    pub prec: String,
    #[serde(default)]
    pub depth: Option<usize>,
    #[serde(default)]
    pub components: Option<Vec<QExp>>,
    #[serde(default)]
    pub graded: Option<Vec<Vec<QExp>>>,
}

impl AholForm {
    pub fn to_json_value(&self) -> serde_json::Value {
        let wire = FormWire {
            weight: self.weight,
            ty: serde_json::to_value(&self.rep).expect("rep serializes"),
            h: self.lattice(),
            prec: format_rational(&self.prec()),
            depth: Some(self.depth()),
            components: Some(self.graded[0].clone()),
            graded: Some(self.graded.clone()),
        };
        serde_json::to_value(wire).expect("form serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).unwrap()
    }

    /// Parses the form JSON; a string `"type"` is resolved in `registry`.
    pub fn from_json_value(v: serde_json::Value, registry: &RepRegistry) -> Result<Self> {
        let w: FormWire = serde_json::from_value(v)?;
        let rep = match &w.ty {
            serde_json::Value::String(label) => registry.require(label)?.clone(),
            other => serde_json::from_value(other.clone())?,
        };
        let graded = match (w.graded, w.components) {
            (Some(g), _) => g,
            (None, Some(c)) => vec![c],
            (None, None) => {
                return Err(Error::Parse(
                    "form has neither graded nor components".into(),
                ))
            }
        };
        let form = AholForm::new(w.weight, rep, graded)?;
        let prec = parse_rational(&w.prec)?;
        Ok(form.truncate(&prec))
    }

    pub fn from_json(s: &str, registry: &RepRegistry) -> Result<Self> {
        Self::from_json_value(serde_json::from_str(s)?, registry)
    }
}

/// The constant `1` as a formal object of the given weight and trivial type.
pub fn constant_one(weight: i64, prec: u64) -> AholForm {
    AholForm::holomorphic(
        weight,
        Rep::trivial(),
        vec![QExp::constant(CycNum::one(), rat_int(prec as i64))],
    )
    .unwrap()
}
