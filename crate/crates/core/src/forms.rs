//! Holomorphic vector-valued modular forms: Eisenstein series, `Δ`,
//! intertwiner application and the `T`-consistency check.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::ahol::AholForm;
use crate::error::{Error, Result};
use crate::exactnum::{bernoulli, rat_int, CycNum, Rational};
use crate::hecke::{hecke_form, hecke_rep};
use crate::hyperalg::FormSpan;
use crate::linalg::Matrix;
use crate::qexp::QExp;
use crate::reps::{hom_space, Rep};

/// Holomorphic forms are almost-holomorphic forms of depth 0.
pub type VVForm = AholForm;

pub fn sigma(k: u32, n: u64) -> BigInt {
    let mut s = BigInt::zero();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                s += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    s
}

/// Level-one Eisenstein series with constant term 1, to `prec` coefficients.
pub fn eisenstein(k: i64, prec: u64) -> Result<VVForm> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "Eisenstein weight must be even and at least 4, got {k}"
        )));
    }
    let factor = -rat_int(2 * k) / bernoulli(k as usize);
    let coeffs = (0..prec)
        .map(|n| {
            if n == 0 {
                CycNum::one()
            } else {
                CycNum::from_rational(&factor * Rational::from_integer(sigma(k as u32 - 1, n)))
            }
        })
        .collect();
    AholForm::holomorphic(k, Rep::trivial(), vec![QExp::from_coeffs(coeffs, prec)])
}

/// `Δ = (E_4³ − E_6²) / 1728`.
pub fn delta_form(prec: u64) -> VVForm {
    let e4 = eisenstein(4, prec).unwrap().components()[0].clone();
    let e6 = eisenstein(6, prec).unwrap().components()[0].clone();
    let d = e4
        .mul(&e4)
        .mul(&e4)
        .sub(&e6.mul(&e6))
        .scale_rational(&Rational::new(1.into(), 1728.into()));
    AholForm::holomorphic(12, Rep::trivial(), vec![d]).unwrap()
}

/// `φ ∘ f` for an intertwiner `φ: ρ_f → target`.
pub fn apply_hom(phi: &Matrix, f: &AholForm, target: &Rep) -> Result<AholForm> {
    if phi.rows() != target.dim() || phi.cols() != f.dim() {
        return Err(Error::Shape(format!(
            "expected {}x{} intertwiner, got {}x{}",
            target.dim(),
            f.dim(),
            phi.rows(),
            phi.cols()
        )));
    }
    if !Rep::intertwines(phi, f.rep(), target) {
        return Err(Error::NotAnIntertwiner(format!(
            "{} -> {}",
            f.rep().label(),
            target.label()
        )));
    }
    f.apply_matrix(phi, target)
}

/// True iff `f(τ + 1) = ρ(T) f(τ)` on every `Y`-layer up to the common precision.
pub fn check_t_consistency(f: &AholForm) -> bool {
    let shifted = f.phase_shift();
    let acted = match f.apply_matrix(f.rep().t(), f.rep()) {
        Ok(g) => g,
        Err(_) => return false,
    };
    let p = f.prec();
    shifted.truncate(&p) == acted.truncate(&p)
}

/// Span of `φ ∘ T_M E_k` over a basis of `Hom(T_M 𝟙, target)`.
pub fn vv_eisenstein(k: i64, target: &Rep, m: u64, prec: u64) -> Result<FormSpan> {
    let hr = hecke_rep(m, &Rep::trivial())?;
    let tm = hecke_form(m, &eisenstein(k, prec * m)?)?;
    let mut span = FormSpan::new();
    for (idx, phi) in hom_space(&hr.rep, target).iter().enumerate() {
        let g = apply_hom(phi, &tm, target)?.truncate(&rat_int(prec as i64));
        if !g.is_zero() {
            span.insert(
                g,
                format!("E{k} via T{m}, phi[{idx}] -> {}", target.label()),
            );
        }
    }
    Ok(span)
}
