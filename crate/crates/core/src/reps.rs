//! Congruence types: finite-dimensional representations of SL2(Z) given by
//! the images of `S` and `T`, and the hom-space machinery used to decompose them.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{lcm, CycNum};
use crate::linalg::{kernel, kron, solve_right, Matrix, Subspace};
use crate::sl2::{self, Generator, IntMat2};

#[derive(Clone, Debug)]
pub struct Rep {
    label: String,
    level: u64,
    s: Matrix,
    t: Matrix,
    inverses: OnceLock<(Matrix, Matrix)>,
}

impl PartialEq for Rep {
    /// Equal generator matrices; labels and declared levels are ignored.
    fn eq(&self, other: &Self) -> bool {
        self.s == other.s && self.t == other.t
    }
}

impl Rep {
    pub fn new(label: impl Into<String>, level: u64, s: Matrix, t: Matrix) -> Result<Self> {
        if !s.is_square() || !t.is_square() || s.rows() != t.rows() {
            return Err(Error::Shape(format!(
                "generators must be square of equal size, got {}x{} and {}x{}",
                s.rows(),
                s.cols(),
                t.rows(),
                t.cols()
            )));
        }
        if s.rows() == 0 {
            return Err(Error::Shape("zero-dimensional representation".into()));
        }
        if level == 0 {
            return Err(Error::InvalidArgument("level must be positive".into()));
        }
        Ok(Rep {
            label: label.into(),
            level,
            s,
            t,
            inverses: OnceLock::new(),
        })
    }

    pub fn trivial() -> Self {
        Rep::new("1", 1, Matrix::identity(1), Matrix::identity(1)).unwrap()
    }

    /// One-dimensional character with `S ↦ s`, `T ↦ t`.
    pub fn character(label: impl Into<String>, level: u64, s: CycNum, t: CycNum) -> Result<Self> {
        Rep::new(
            label,
            level,
            Matrix::new(1, 1, vec![s])?,
            Matrix::new(1, 1, vec![t])?,
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.s.rows()
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn s(&self) -> &Matrix {
        &self.s
    }

    pub fn t(&self) -> &Matrix {
        &self.t
    }

    pub fn conductor(&self) -> u64 {
        lcm(self.s.conductor(), self.t.conductor())
    }

    fn inverses(&self) -> &(Matrix, Matrix) {
        self.inverses.get_or_init(|| {
            (
                self.s.inverse().expect("S is invertible"),
                self.t.inverse().expect("T is invertible"),
            )
        })
    }

    /// Image of an arbitrary element of SL2(Z).
    pub fn eval(&self, g: &IntMat2) -> Matrix {
        let (_, t_inv) = self.inverses();
        let mut acc = Matrix::identity(self.dim());
        for (gen, e) in sl2::word(g) {
            let factor = match gen {
                Generator::S => self.s.pow(e as u64),
                Generator::T if e >= 0 => self.t.pow(e as u64),
                Generator::T => t_inv.pow((-e) as u64),
            };
            acc = &acc * &factor;
        }
        acc
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.dim();
        let id = Matrix::identity(n);
        let s2 = &self.s * &self.s;
        let st = &self.s * &self.t;
        let checks = vec![
            ("S^4 = I".to_string(), (&s2 * &s2).is_identity()),
            ("(ST)^3 = S^2".to_string(), st.pow(3) == s2),
            ("S^2 = I".to_string(), s2 == id),
            (
                format!("T^{} = I", self.level),
                self.t.pow(self.level).is_identity(),
            ),
        ];
        ValidationReport {
            label: self.label.clone(),
            checks,
        }
    }

    pub fn dual(&self) -> Rep {
        let (s_inv, t_inv) = self.inverses();
        Rep::new(
            format!("{}^", self.label),
            self.level,
            s_inv.transpose(),
            t_inv.transpose(),
        )
        .unwrap()
    }

    pub fn tensor(&self, other: &Rep) -> Rep {
        Rep::new(
            format!("{}*{}", self.label, other.label),
            lcm(self.level, other.level),
            kron(&self.s, &other.s),
            kron(&self.t, &other.t),
        )
        .unwrap()
    }

    /// Order of the image of `T`, searched up to `bound`.
    pub fn t_order(&self, bound: u64) -> Option<u64> {
        let mut acc = self.t.clone();
        for k in 1..=bound {
            if acc.is_identity() {
                return Some(k);
            }
            acc = &acc * &self.t;
        }
        None
    }

    /// Checks `phi · r(γ) = r2(γ) · phi` for `γ ∈ {S, T}`.
    pub fn intertwines(phi: &Matrix, r: &Rep, r2: &Rep) -> bool {
        if phi.rows() != r2.dim() || phi.cols() != r.dim() {
            return false;
        }
        (phi * &r.s) == (&r2.s * phi) && (phi * &r.t) == (&r2.t * phi)
    }
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub label: String,
    pub checks: Vec<(String, bool)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn into_result(self) -> Result<()> {
        if self.passed() {
            Ok(())
        } else {
            Err(Error::Validation(self.to_string()))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.label)?;
        for (name, ok) in &self.checks {
            write!(f, " [{}] {}", if *ok { "pass" } else { "FAIL" }, name)?;
        }
        Ok(())
    }
}

pub fn rep_validate(r: &Rep) -> ValidationReport {
    r.validate()
}

pub fn rep_dual(r: &Rep) -> Rep {
    r.dual()
}

pub fn rep_tensor(r: &Rep, r2: &Rep) -> Rep {
    r.tensor(r2)
}

/// Subspace of `K^{dim r · dim r2}` fixed by `dual(r) ⊗ r2`.
fn invariant_space(r: &Rep, r2: &Rep) -> Subspace {
    let d = r.dim() * r2.dim();
    let id = Matrix::identity(d);
    let dual = r.dual();
    let ms = &kron(dual.s(), r2.s()) - &id;
    let mt = &kron(dual.t(), r2.t()) - &id;
    let mut rows = ms.to_rows();
    rows.extend(mt.to_rows());
    kernel(&Matrix::from_rows(rows).unwrap())
}

/// Basis of `Hom(r, r2)` as `dim r2 × dim r` matrices.
pub fn hom_space(r: &Rep, r2: &Rep) -> Vec<Matrix> {
    let (d1, d2) = (r.dim(), r2.dim());
    invariant_space(r, r2)
        .basis()
        .iter()
        .map(|v| {
            let mut phi = Matrix::zero(d2, d1);
            for i in 0..d1 {
                for j in 0..d2 {
                    phi.set(j, i, v[i * d2 + j].clone());
                }
            }
            phi
        })
        .collect()
}

/// Flattened coordinates of an intertwiner, inverse to the reshaping of [`hom_space`].
fn flatten_intertwiner(phi: &Matrix) -> Vec<CycNum> {
    let (d2, d1) = (phi.rows(), phi.cols());
    let mut v = vec![CycNum::zero(); d1 * d2];
    for i in 0..d1 {
        for j in 0..d2 {
            v[i * d2 + j] = phi.get(j, i).clone();
        }
    }
    v
}

/// Whether `phi` lies in the span of the computed hom space.
pub fn hom_contains(r: &Rep, r2: &Rep, phi: &Matrix) -> Result<bool> {
    if phi.rows() != r2.dim() || phi.cols() != r.dim() {
        return Err(Error::Shape(format!(
            "expected {}x{} intertwiner, got {}x{}",
            r2.dim(),
            r.dim(),
            phi.rows(),
            phi.cols()
        )));
    }
    invariant_space(r, r2).contains(&flatten_intertwiner(phi))
}

pub fn hom_dim(r: &Rep, r2: &Rep) -> usize {
    invariant_space(r, r2).dim()
}

pub fn is_irreducible(r: &Rep) -> bool {
    hom_dim(r, r) == 1
}

/// Schur test for certified irreducibles.
pub fn rep_isomorphic(r: &Rep, r2: &Rep) -> Result<bool> {
    for x in [r, r2] {
        if !is_irreducible(x) {
            return Err(Error::NotIrreducible(x.label().to_string()));
        }
    }
    if r.dim() != r2.dim() {
        return Ok(false);
    }
    Ok(hom_dim(r, r2) >= 1)
}

/// Representatives of isomorphism classes of irreducible types.
#[derive(Clone, Debug, Default)]
pub struct RepRegistry {
    entries: Vec<Rep>,
}

const BUNDLED_REGISTRY: &str = include_str!("../data/registry.json");

#[derive(Serialize, Deserialize)]
struct RegistryWire {
    reps: Vec<Rep>,
}

impl RepRegistry {
    pub fn new(entries: Vec<Rep>) -> Result<Self> {
        let mut reg = RepRegistry::default();
        for r in entries {
            reg.push(r)?;
        }
        Ok(reg)
    }

    /// Appends an entry after checking validity, irreducibility and that it is
    /// new up to isomorphism.
    pub fn push(&mut self, r: Rep) -> Result<()> {
        r.validate().into_result()?;
        if !is_irreducible(&r) {
            return Err(Error::NotIrreducible(r.label().to_string()));
        }
        if self.get(r.label()).is_some() {
            return Err(Error::InvalidArgument(format!(
                "duplicate label {:?}",
                r.label()
            )));
        }
        for e in &self.entries {
            if rep_isomorphic(e, &r)? {
                return Err(Error::InvalidArgument(format!(
                    "{} is isomorphic to registered {}",
                    r.label(),
                    e.label()
                )));
            }
        }
        self.entries.push(r);
        Ok(())
    }

    /// 𝟙, ρ_3, ρ_ζ and ρ_{ζ²} with the matrices of the level-3 example.
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_REGISTRY).expect("bundled registry is valid")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: RegistryWire = serde_json::from_str(s)?;
        Self::new(wire.reps)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&RegistryWire {
            reps: self.entries.clone(),
        })?)
    }

    pub fn get(&self, label: &str) -> Option<&Rep> {
        self.entries.iter().find(|r| r.label() == label)
    }

    pub fn require(&self, label: &str) -> Result<&Rep> {
        self.get(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn entries(&self) -> &[Rep] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &Rep> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sub-registry with the given labels, in the given order.
    pub fn select(&self, labels: &[&str]) -> Result<Self> {
        Ok(RepRegistry {
            entries: labels
                .iter()
                .map(|l| self.require(l).cloned())
                .collect::<Result<_>>()?,
        })
    }
}

#[derive(Clone, Debug)]
pub enum Residual {
    None,
    /// `S` acts as a scalar; one character per `T`-eigenvalue with its multiplicity.
    Split(Vec<(Rep, usize)>),
    /// Not decomposed further. `irreducible` records the `dim End = 1` certificate.
    Unsplit {
        rep: Rep,
        irreducible: bool,
    },
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub multiplicities: Vec<(String, usize)>,
    pub residual: Residual,
}

impl Decomposition {
    pub fn multiplicity(&self, label: &str) -> usize {
        self.multiplicities
            .iter()
            .find(|(l, _)| l == label)
            .map_or(0, |(_, m)| *m)
    }

    pub fn residual_dim(&self) -> usize {
        match &self.residual {
            Residual::None => 0,
            Residual::Split(parts) => parts.iter().map(|(r, m)| r.dim() * m).sum(),
            Residual::Unsplit { rep, .. } => rep.dim(),
        }
    }
}

pub fn decompose(r: &Rep, registry: &RepRegistry) -> Decomposition {
    let mut multiplicities = Vec::new();
    let mut constraint_rows = Vec::new();
    for target in registry.iter() {
        let homs = hom_space(r, target);
        if homs.is_empty() {
            continue;
        }
        multiplicities.push((target.label().to_string(), homs.len()));
        for phi in homs {
            constraint_rows.extend(phi.to_rows());
        }
    }
    let joint = if constraint_rows.is_empty() {
        Subspace::full(r.dim())
    } else {
        kernel(&Matrix::from_rows(constraint_rows).unwrap())
    };
    let residual = if joint.dim() == 0 {
        Residual::None
    } else {
        residual_of(r, &joint)
    };
    Decomposition {
        multiplicities,
        residual,
    }
}

fn residual_of(r: &Rep, w: &Subspace) -> Residual {
    let bm = w.basis_matrix().transpose();
    let srest = solve_right(&bm, &(r.s() * &bm)).expect("joint kernel is S-stable");
    let trest = solve_right(&bm, &(r.t() * &bm)).expect("joint kernel is T-stable");
    let label = format!("{}|res", r.label());
    let rest = Rep::new(label.clone(), r.level(), srest.clone(), trest.clone()).unwrap();
    let c = srest.get(0, 0).clone();
    let scalar = srest == Matrix::identity(srest.rows()).scale(&c);
    if !scalar {
        let irreducible = is_irreducible(&rest);
        return Residual::Unsplit {
            rep: rest,
            irreducible,
        };
    }
    let n = r.level();
    let mut parts = Vec::new();
    for j in 0..n {
        let z = CycNum::zeta_pow(n, j as i64);
        let eig = kernel(&(&trest - &Matrix::identity(trest.rows()).scale(&z)));
        if eig.dim() > 0 {
            let ch = Rep::character(format!("{label}:T=zeta{n}^{j}"), n, c.clone(), z).unwrap();
            parts.push((ch, eig.dim()));
        }
    }
    let found: usize = parts.iter().map(|(_, m)| m).sum();
    if found != w.dim() {
        // T not diagonalisable over Q(ζ_level): declared level is wrong
        let irreducible = is_irreducible(&rest);
        return Residual::Unsplit {
            rep: rest,
            irreducible,
        };
    }
    Residual::Split(parts)
}

#[derive(Serialize, Deserialize)]
struct RepWire {
    label: String,
    dim: usize,
    level: u64,
    #[serde(default)]
    conductor: Option<u64>,
    #[serde(rename = "S")]
    s: Matrix,
    #[serde(rename = "T")]
    t: Matrix,
}

impl Serialize for Rep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RepWire {
            label: self.label.clone(),
            dim: self.dim(),
            level: self.level,
            conductor: Some(self.conductor()),
            s: self.s.clone(),
            t: self.t.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rep {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = RepWire::deserialize(d)?;
        let rep = Rep::new(w.label, w.level, w.s, w.t).map_err(D::Error::custom)?;
        if rep.dim() != w.dim {
            return Err(D::Error::custom(format!(
                "declared dim {} but generators are {}x{}",
                w.dim,
                rep.dim(),
                rep.dim()
            )));
        }
        Ok(rep)
    }
}
