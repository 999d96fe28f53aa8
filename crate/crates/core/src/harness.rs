//! Reproduction harness: the worked `ρ_3` example, coset counts, and
//! instances of cusp-form generation by raised Hecke-Eisenstein products.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::ahol::{ahol_decompose, raise_times, AholForm};
use crate::error::{Error, Result};
use crate::exactnum::{rat, rat_int, CycNum};
use crate::forms::{apply_hom, check_t_consistency, delta_form, eisenstein};
use crate::hecke::{cosets_distinct, delta_cosets, hecke_form};
use crate::hyperalg::{congruence_index, hyper_tensor, span_contains, sturm_bound, FormSpan};
use crate::linalg::Matrix;
use crate::reps::{hom_contains, hom_dim, hom_space, Rep, RepRegistry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Paper,
    Derived,
    Trivial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct HarnessCase {
    pub name: String,
    pub parameters: BTreeMap<String, String>,
    pub expected: String,
    pub observed: String,
    pub provenance: Provenance,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<String>,
}

impl HarnessCase {
    fn check(
        name: impl Into<String>,
        provenance: Provenance,
        expected: String,
        observed: String,
    ) -> Self {
        let status = if expected == observed {
            Status::Pass
        } else {
            Status::Fail
        };
        HarnessCase {
            name: name.into(),
            parameters: BTreeMap::new(),
            expected,
            observed,
            provenance,
            status,
            diagnostics: None,
        }
    }

    fn param(mut self, k: &str, v: impl ToString) -> Self {
        self.parameters.insert(k.to_string(), v.to_string());
        self
    }

    fn note(mut self, d: impl Into<String>) -> Self {
        self.diagnostics = Some(d.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub title: String,
    pub cases: Vec<HarnessCase>,
}

impl Report {
    fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            cases: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.status != Status::Fail)
    }

    pub fn case(&self, name: &str) -> Option<&HarnessCase> {
        self.cases.iter().find(|c| c.name == name)
    }

    pub fn merge(title: impl Into<String>, reports: Vec<Report>) -> Report {
        let mut out = Report::new(title);
        for r in reports {
            for mut c in r.cases {
                c.name = format!("{}/{}", r.title, c.name);
                out.cases.push(c);
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "== {} ==", self.title)?;
        for c in &self.cases {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            let prov = match c.provenance {
                Provenance::Paper => "paper",
                Provenance::Derived => "derived",
                Provenance::Trivial => "trivial",
            };
            write!(f, "[{tag}] {} ({prov})", c.name)?;
            if !c.parameters.is_empty() {
                let ps: Vec<String> = c
                    .parameters
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                write!(f, " {{{}}}", ps.join(", "))?;
            }
            writeln!(f)?;
            writeln!(f, "    expected: {}", c.expected)?;
            if c.status != Status::Pass {
                writeln!(f, "    observed: {}", c.observed)?;
            }
            if let Some(d) = &c.diagnostics {
                writeln!(f, "    note: {d}")?;
            }
        }
        let fails = self
            .cases
            .iter()
            .filter(|c| c.status == Status::Fail)
            .count();
        writeln!(f, "{} cases, {} failed", self.cases.len(), fails)
    }
}

fn zeta3(entries: &[(i64, i64)]) -> Vec<CycNum> {
    entries
        .iter()
        .map(|&(a, b)| CycNum::from_coeffs(3, vec![rat_int(a), rat_int(b)]).unwrap())
        .collect()
}

/// The five intertwiners `ρ_3 ⊗ ρ_3 → τ` displayed with the worked example,
/// as `(name, target label, matrix)`.
#[rustfmt::skip]
pub fn displayed_intertwiners() -> Vec<(&'static str, &'static str, Matrix)> {
    let h = rat(1, 2);
    let one = rat_int(1);
    let phi_one = Matrix::from_rationals(1, 9, &[
        one.clone(), h.clone(), h.clone(), h.clone(), one.clone(), h.clone(), h.clone(), h, one,
    ]);
    let phi_zeta = zeta3(&[(1, 0), (1, 1), (0, -1), (1, 1), (0, 1), (-1, 0), (0, -1), (-1, 0), (-1, -1)]);
    let phi_zeta2 = zeta3(&[(1, 0), (0, -1), (1, 1), (0, -1), (-1, -1), (-1, 0), (1, 1), (-1, 0), (0, 1)]);
    let phi_rho3_1 = Matrix::from_ints(3, 9, &[
        1, 0, -1, -1, -1, -2, 0, 1, -1,
        -1, 0, 1, -1, 1, 0, -2, -1, -1,
        -1, -2, -1, 1, -1, 0, 0, -1, 1,
    ]);
    let phi_rho3_2 = Matrix::from_ints(3, 9, &[
        0, 1, -1, -1, 0, -3, 1, 3, 0,
        0, 1, 3, -1, 0, 1, -3, -1, 0,
        0, -3, -1, 3, 0, 1, 1, -1, 0,
    ]);
    vec![
        ("phi_1", "1", phi_one),
        ("phi_zeta", "rho_zeta", Matrix::new(1, 9, phi_zeta).unwrap()),
        ("phi_zeta2", "rho_zeta2", Matrix::new(1, 9, phi_zeta2).unwrap()),
        ("phi_rho3_1", "rho3", phi_rho3_1),
        ("phi_rho3_2", "rho3", phi_rho3_2),
    ]
}

/// `T_3 𝟙 → ρ_3` used to build `E_{12,ρ_3}`.
#[rustfmt::skip]
pub fn t3_to_rho3() -> Matrix {
    let (a, b) = (rat_int(1), rat(-1, 3));
    Matrix::from_rationals(3, 4, &[
        a.clone(), b.clone(), b.clone(), b.clone(),
        b.clone(), a.clone(), b.clone(), b.clone(),
        b.clone(), b.clone(), a, b,
    ])
}

/// `E_{12,ρ_3}` with `prec` integral powers of `q` in each component.
pub fn e12_rho3(prec: u64) -> Result<AholForm> {
    let reg = RepRegistry::bundled();
    let t3 = hecke_form(3, &eisenstein(12, 3 * prec)?)?;
    apply_hom(&t3_to_rho3(), &t3, reg.require("rho3")?)
}

/// Recomputes the `ρ_3` example: hom dimensions, displayed intertwiners and
/// the trivial-type component of `E_{12,ρ_3} ⊗̲ E_{12,ρ_3}`.
pub fn verify_example32(prec: u64) -> Result<Report> {
    let prec = prec.max(3);
    let reg = RepRegistry::bundled();
    let rho3 = reg.require("rho3")?;
    let sq = rho3.tensor(rho3);
    let mut rep = Report::new("example32");

    for (label, want) in [("1", 1), ("rho3", 2), ("rho_zeta", 1), ("rho_zeta2", 1)] {
        let d = hom_dim(&sq, reg.require(label)?);
        rep.cases.push(
            HarnessCase::check(
                format!("hom_dim[{label}]"),
                Provenance::Paper,
                want.to_string(),
                d.to_string(),
            )
            .param("source", "rho3*rho3"),
        );
    }
    for (name, target, phi) in displayed_intertwiners() {
        let ok = hom_contains(&sq, reg.require(target)?, &phi)?;
        rep.cases.push(HarnessCase::check(
            format!("intertwiner[{name}]"),
            Provenance::Paper,
            "in hom space".into(),
            if ok {
                "in hom space"
            } else {
                "not in hom space"
            }
            .into(),
        ));
    }

    let e = e12_rho3(prec)?;
    let consts: Vec<String> = e
        .components()
        .iter()
        .map(|q| q.coeff_int(0).to_string())
        .collect();
    rep.cases.push(HarnessCase::check(
        "E12rho3 constant terms",
        Provenance::Derived,
        "531440/729, -531440/2187, -531440/2187".into(),
        consts.join(", "),
    ));
    rep.cases.push(HarnessCase::check(
        "E12rho3 T-consistency",
        Provenance::Derived,
        "true".into(),
        check_t_consistency(&e).to_string(),
    ));

    let span = hyper_tensor(&e, &e, &reg)?;
    let support: Vec<&str> = reg
        .iter()
        .filter(|t| span.dim(24, t.label()) > 0)
        .map(|t| t.label())
        .collect();
    rep.cases.push(HarnessCase::check(
        "product support",
        Provenance::Paper,
        "1, rho3, rho_zeta, rho_zeta2".into(),
        support.join(", "),
    ));

    let (_, _, phi_one) = displayed_intertwiners().into_iter().next().unwrap();
    let triv = e.tensor(&e).apply_matrix(&phi_one, reg.require("1")?)?;
    let golden = [
        "564856947200/1594323",
        "-1894333004462080000/84584326707",
        "-1261863434802833408000/28194775569",
    ];
    for (n, want) in golden.iter().enumerate() {
        let got = triv.components()[0].coeff_int(n as i64);
        rep.cases.push(
            HarnessCase::check(
                format!("trivial component q^{n}"),
                Provenance::Paper,
                want.to_string(),
                got.to_string(),
            )
            .param("phi", "phi_1"),
        );
    }
    Ok(rep)
}

fn sigma1(m: u64) -> u64 {
    (1..=m).filter(|d| m.is_multiple_of(*d)).sum()
}

/// Coset counts in genus 1 (`M ≤ 12`) and genus 2 (`p = 2, 3`), plus distinctness.
pub fn verify_counts() -> Result<Report> {
    let mut rep = Report::new("counts");
    for m in 1..=12u64 {
        let c = delta_cosets(1, m as i64)?;
        let prov = if m == 1 {
            Provenance::Trivial
        } else {
            Provenance::Derived
        };
        rep.cases.push(
            HarnessCase::check(
                format!("g=1 M={m}"),
                prov,
                sigma1(m).to_string(),
                c.len().to_string(),
            )
            .param("oracle", "sigma_1"),
        );
        rep.cases.push(HarnessCase::check(
            format!("g=1 M={m} distinct"),
            Provenance::Derived,
            "true".into(),
            cosets_distinct(&c)?.to_string(),
        ));
    }
    for p in [2u64, 3] {
        let c = delta_cosets(2, p as i64)?;
        rep.cases.push(
            HarnessCase::check(
                format!("g=2 p={p}"),
                Provenance::Derived,
                ((1 + p) * (1 + p * p)).to_string(),
                c.len().to_string(),
            )
            .param("oracle", "(1+p)(1+p^2)"),
        );
        rep.cases.push(HarnessCase::check(
            format!("g=2 p={p} distinct"),
            Provenance::Derived,
            "true".into(),
            cosets_distinct(&c)?.to_string(),
        ));
    }
    Ok(rep)
}

/// A basis `Δ · E_4^a E_6^b` of level-one cusp forms of weight `k`.
pub fn cusp_basis(k: i64, prec: u64) -> Vec<(String, AholForm)> {
    let mut out = Vec::new();
    if k < 12 {
        return out;
    }
    let rest = k - 12;
    let e4 = eisenstein(4, prec).unwrap();
    let e6 = eisenstein(6, prec).unwrap();
    let mut b = 0;
    while 6 * b <= rest {
        if (rest - 6 * b) % 4 == 0 {
            let a = (rest - 6 * b) / 4;
            let mut f = delta_form(prec);
            let mut name = "Delta".to_string();
            for _ in 0..a {
                f = f.mul(&e4);
            }
            for _ in 0..b {
                f = f.mul(&e6);
            }
            if a > 0 {
                name += &format!("*E4^{a}");
            }
            if b > 0 {
                name += &format!("*E6^{b}");
            }
            out.push((name, f));
        }
        b += 1;
    }
    out
}

/// Holomorphic parts of the trivial-type projections of
/// `R̂^a T_M E_l ⊗ R̂^b T_M E_l2` with `a + b = (k − l − l2)/2`.
pub fn thm11_span(k: i64, l: i64, l2: i64, indices: &[u64], prec: u64) -> Result<FormSpan> {
    let one = Rep::trivial();
    let t = ((k - l - l2) / 2) as usize;
    let mut span = FormSpan::new();
    for &m in indices {
        let f = hecke_form(m, &eisenstein(l, prec * m)?)?;
        let g = hecke_form(m, &eisenstein(l2, prec * m)?)?;
        let homs = hom_space(&f.rep().tensor(g.rep()), &one);
        for a in 0..=t {
            let prod = raise_times(&f, a).tensor(&raise_times(&g, t - a));
            for (i, phi) in homs.iter().enumerate() {
                let h = prod.apply_matrix(phi, &one)?;
                let h0 = ahol_decompose(&h)?.swap_remove(0);
                span.insert(
                    h0,
                    format!("T{m}: phi[{i}](R^{a} E{l} x R^{} E{l2})", t - a),
                );
            }
        }
    }
    Ok(span)
}

/// Membership of the level-one cusp forms of weight `k` in [`thm11_span`].
pub fn verify_thm11(k: i64, l: i64, l2: i64, indices: &[u64], prec: u64) -> Result<Report> {
    for (name, w) in [("l", l), ("l2", l2)] {
        if w < 4 || w % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "{name} = {w} must be even and at least 4"
            )));
        }
    }
    if k < l + l2 || k % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must be even and at least l + l2 = {}",
            l + l2
        )));
    }
    if indices.is_empty() || indices.contains(&0) {
        return Err(Error::InvalidArgument(
            "Hecke indices must be positive and nonempty".into(),
        ));
    }
    let bound = sturm_bound(k, congruence_index(1));
    if prec < bound {
        return Err(Error::InsufficientPrecision {
            needed: bound.to_string(),
            available: prec.to_string(),
        });
    }
    let span = thm11_span(k, l, l2, indices, prec)?;
    let idx: Vec<String> = indices.iter().map(u64::to_string).collect();
    let mut rep = Report::new(format!("thm11 k={k} l={l} l2={l2} M={{{}}}", idx.join(",")));
    rep.cases.push(
        HarnessCase::check(
            "span dimension",
            Provenance::Derived,
            span.dim(k, "1").to_string(),
            span.dim(k, "1").to_string(),
        )
        .param("prec", prec)
        .note(format!("sturm bound {bound}")),
    );
    let basis = cusp_basis(k, prec);
    if basis.is_empty() {
        let mut c = HarnessCase::check(
            "cusp forms",
            Provenance::Trivial,
            "none".into(),
            "none".into(),
        );
        c.status = Status::Skipped;
        rep.cases
            .push(c.note(format!("no level-one cusp forms of weight {k}")));
    }
    for (name, f) in basis {
        let contained = span_contains(&span, &f, prec)?;
        let mut case = HarnessCase::check(
            format!("{name} in span"),
            Provenance::Derived,
            "contained".into(),
            if contained {
                "contained"
            } else {
                "not contained"
            }
            .into(),
        )
        .param("prec", prec);
        if let Some(coords) = span.express(&f, &rat_int(prec as i64))? {
            let certs: Vec<String> = span
                .grade(k, "1")
                .iter()
                .zip(&coords)
                .filter(|(_, c)| !c.is_zero())
                .map(|((_, p), c)| format!("{c} * [{p}]"))
                .collect();
            case = case.note(format!("certified by {}", certs.join(" + ")));
        }
        rep.cases.push(case);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example32_reproduces() {
        let r = verify_example32(3).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn counts_pass() {
        let r = verify_counts().unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.case("g=1 M=6").unwrap().observed, "12");
        assert_eq!(r.case("g=2 p=2").unwrap().observed, "15");
    }

    #[test]
    fn thm11_weight_12() {
        let r = verify_thm11(12, 4, 8, &[1, 2], 5).unwrap();
        assert_eq!(r.case("Delta in span").unwrap().status, Status::Pass, "{r}");
        let r = verify_thm11(12, 4, 8, &[1], 5).unwrap();
        assert_eq!(r.case("Delta in span").unwrap().status, Status::Fail);
        assert!(matches!(
            verify_thm11(12, 4, 8, &[1, 2], 1),
            Err(Error::InsufficientPrecision { .. })
        ));
        assert!(verify_thm11(10, 4, 8, &[1], 5).is_err());
    }

    #[test]
    fn cusp_basis_dims() {
        assert_eq!(cusp_basis(12, 3).len(), 1);
        assert_eq!(cusp_basis(14, 3).len(), 0);
        assert_eq!(cusp_basis(24, 3).len(), 2);
    }
}
