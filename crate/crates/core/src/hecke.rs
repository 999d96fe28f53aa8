//! Coset representatives `Δ_M`, the Hecke cocycle, the representations
//! `T_M ρ` on `V(ρ) ⊗ C[Δ_M]`, and the vector-valued Hecke operators on forms.
//!
//! Basis vectors of `T_M ρ` are ordered coset-major: `v_i ⊗ e_j` has index
//! `j · dim ρ + i`, with `j` the position of the coset in [`delta_cosets`].

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::ahol::AholForm;
use crate::error::{Error, Result};
use crate::exactnum::{lcm, rat_int, CycNum, Rational};
use crate::linalg::Matrix;
use crate::qexp::QExp;
use crate::reps::Rep;
use crate::sl2::{self, IntMat2};

/// An upper block-triangular similitude `(A B; 0 D)` of similitude factor `M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeltaCoset {
    pub genus: usize,
    pub mat: Vec<Vec<i64>>,
    pub similitude: u64,
}

impl DeltaCoset {
    pub fn from_abd(a: i64, b: i64, d: i64) -> Self {
        DeltaCoset {
            genus: 1,
            mat: vec![vec![a, b], vec![0, d]],
            similitude: (a * d) as u64,
        }
    }

    /// `(a, b, d)` of a genus-1 representative.
    pub fn abd(&self) -> (i64, i64, i64) {
        assert_eq!(self.genus, 1, "abd() is genus 1 only");
        (self.mat[0][0], self.mat[0][1], self.mat[1][1])
    }

    pub fn as_mat2(&self) -> IntMat2 {
        let (a, b, d) = self.abd();
        [[a, b], [0, d]]
    }

    fn to_matrix(&self) -> Matrix {
        let n = 2 * self.genus;
        Matrix::from_ints(n, n, &self.mat.concat())
    }
}

impl fmt::Display for DeltaCoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .mat
            .iter()
            .map(|r| r.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "({})", rows.join(";"))
    }
}

fn divisors(m: u64) -> Vec<u64> {
    (1..=m).filter(|d| m.is_multiple_of(*d)).collect()
}

/// Every tuple in `Π [0, bounds[i])`, lexicographically.
fn boxes(bounds: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|p| (0..b).map(move |x| [p.clone(), vec![x]].concat()))
            .collect();
    }
    out
}

/// `M · ᵗD⁻¹` if it is integral.
fn a_block(d: &[Vec<i64>], m: u64) -> Option<Vec<Vec<i64>>> {
    let g = d.len();
    // back substitution for the upper triangular inverse, exact over Q
    let mut inv = vec![vec![Rational::zero(); g]; g];
    for j in 0..g {
        for i in (0..=j).rev() {
            let mut s = if i == j {
                Rational::one()
            } else {
                Rational::zero()
            };
            for k in i + 1..=j {
                s -= rat_int(d[i][k]) * &inv[k][j];
            }
            inv[i][j] = s / rat_int(d[i][i]);
        }
    }
    let mut a = vec![vec![0; g]; g];
    for i in 0..g {
        for j in 0..g {
            let x = &inv[j][i] * rat_int(m as i64);
            if !x.is_integer() {
                return None;
            }
            a[i][j] = i64::try_from(x.to_integer()).ok()?;
        }
    }
    Some(a)
}

/// Representatives of `Sp_g(Z) \ {γ ∈ GSp_g(Z) integral, s(γ) = M}` in the
/// block form `(A B; 0 D)`.
///
/// Diagonal entries of `D` run over divisors of `M`, entries above the
/// diagonal and the entries of `B` over `[0, d_jj)`; candidates are kept
/// when `A = M ᵗD⁻¹` is integral and `ᵗB D` is symmetric. The result is in
/// lexicographic order of (diagonal of `D`, off-diagonal of `D`, `B`).
pub fn delta_cosets(g: usize, m: i64) -> Result<Vec<DeltaCoset>> {
    if m <= 0 {
        return Err(Error::InvalidArgument(format!(
            "similitude must be positive, got {m}"
        )));
    }
    if g == 0 {
        return Err(Error::InvalidArgument("genus must be positive".into()));
    }
    let mu = m as u64;
    let divs: Vec<i64> = divisors(mu).into_iter().map(|d| d as i64).collect();
    let upper: Vec<(usize, usize)> = (0..g)
        .flat_map(|i| (i + 1..g).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for diag_idx in boxes(&vec![divs.len() as i64; g]) {
        let diag: Vec<i64> = diag_idx.iter().map(|&i| divs[i as usize]).collect();
        let off_bounds: Vec<i64> = upper.iter().map(|&(_, j)| diag[j]).collect();
        for off in boxes(&off_bounds) {
            let mut d = vec![vec![0; g]; g];
            for i in 0..g {
                d[i][i] = diag[i];
            }
            for (&(i, j), &x) in upper.iter().zip(&off) {
                d[i][j] = x;
            }
            let Some(a) = a_block(&d, mu) else { continue };
            let b_bounds: Vec<i64> = (0..g * g).map(|idx| diag[idx % g]).collect();
            for bflat in boxes(&b_bounds) {
                let b: Vec<Vec<i64>> = bflat.chunks(g).map(<[i64]>::to_vec).collect();
                if !tb_d_symmetric(&b, &d) {
                    continue;
                }
                let mut mat = vec![vec![0; 2 * g]; 2 * g];
                for i in 0..g {
                    for j in 0..g {
                        mat[i][j] = a[i][j];
                        mat[i][g + j] = b[i][j];
                        mat[g + i][g + j] = d[i][j];
                    }
                }
                out.push(DeltaCoset {
                    genus: g,
                    mat,
                    similitude: mu,
                });
            }
        }
    }
    Ok(out)
}

fn tb_d_symmetric(b: &[Vec<i64>], d: &[Vec<i64>]) -> bool {
    let g = b.len();
    let entry = |i: usize, j: usize| (0..g).map(|k| b[k][i] * d[k][j]).sum::<i64>();
    (0..g).all(|i| (i + 1..g).all(|j| entry(i, j) == entry(j, i)))
}

/// True iff `Γ m = Γ m′`, i.e. `m m′⁻¹` is integral.
pub fn same_left_coset(m: &DeltaCoset, m2: &DeltaCoset) -> Result<bool> {
    let prod = m.to_matrix().checked_mul(&m2.to_matrix().inverse()?)?;
    Ok(prod
        .entries()
        .iter()
        .all(|x| x.to_rational().is_some_and(|r| r.is_integer())))
}

/// Checks pairwise distinctness of the left cosets of the given representatives.
pub fn cosets_distinct(cosets: &[DeltaCoset]) -> Result<bool> {
    let invs = cosets
        .iter()
        .map(|c| c.to_matrix().inverse())
        .collect::<Result<Vec<_>>>()?;
    for (i, m) in cosets.iter().enumerate() {
        let mm = m.to_matrix();
        for (j, inv) in invs.iter().enumerate() {
            if i == j {
                continue;
            }
            let prod = mm.checked_mul(inv)?;
            if prod
                .entries()
                .iter()
                .all(|x| x.to_rational().is_some_and(|r| r.is_integer()))
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Writes `m = γ · rep` with `γ ∈ SL2(Z)` and `rep ∈ Δ_{det m}`.
pub fn reduce_to_coset(m: &IntMat2) -> Result<(DeltaCoset, IntMat2)> {
    let det = sl2::det(m);
    if det <= 0 {
        return Err(Error::InvalidArgument(format!(
            "determinant {det} is not positive"
        )));
    }
    let (p, r) = (m[0][0], m[1][0]);
    let u: IntMat2 = if r == 0 {
        if p > 0 {
            sl2::IDENTITY
        } else {
            [[-1, 0], [0, -1]]
        }
    } else {
        let eg = p.extended_gcd(&r);
        let (mut g, mut x, mut y) = (eg.gcd, eg.x, eg.y);
        if g < 0 {
            g = -g;
            x = -x;
            y = -y;
        }
        [[x, y], [-r / g, p / g]]
    };
    let h = sl2::mul(&u, m);
    let (a, b, d) = (h[0][0], h[0][1], h[1][1]);
    let k = b.div_euclid(d);
    let v = sl2::mul(&sl2::t_pow(-k), &u);
    let rep = DeltaCoset::from_abd(a, b - k * d, d);
    Ok((rep, sl2::inv(&v)))
}

/// `m γ = I · target` with `target ∈ Δ_M`.
pub fn cocycle(m: &DeltaCoset, gamma: &IntMat2) -> Result<(IntMat2, DeltaCoset)> {
    if !sl2::is_sl2(gamma) {
        return Err(Error::InvalidArgument(format!(
            "{gamma:?} is not in SL2(Z)"
        )));
    }
    let (rep, i) = reduce_to_coset(&sl2::mul(&m.as_mat2(), gamma))?;
    Ok((i, rep))
}

#[derive(Clone, Debug)]
pub struct HeckeRep {
    pub base: Rep,
    pub index: u64,
    pub cosets: Vec<DeltaCoset>,
    pub rep: Rep,
}

impl HeckeRep {
    pub fn dim(&self) -> usize {
        self.rep.dim()
    }
}

/// `(T_M ρ)(γ)(v ⊗ e_m) = ρ(I⁻¹) v ⊗ e_n` where `m γ⁻¹ = I · n`.
pub fn hecke_rep(m: u64, r: &Rep) -> Result<HeckeRep> {
    if m == 0 {
        return Err(Error::InvalidArgument("index must be positive".into()));
    }
    let cosets = delta_cosets(1, m as i64)?;
    let pos: HashMap<&DeltaCoset, usize> = cosets.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let k = r.dim();
    let n = cosets.len() * k;
    let build = |gamma: &IntMat2| -> Result<Matrix> {
        let gi = sl2::inv(gamma);
        let mut out = Matrix::zero(n, n);
        for (j, c) in cosets.iter().enumerate() {
            let (i_mat, target) = cocycle(c, &gi)?;
            let block = r.eval(&sl2::inv(&i_mat));
            let t = pos[&target];
            for a in 0..k {
                for b in 0..k {
                    out.set(t * k + a, j * k + b, block.get(a, b).clone());
                }
            }
        }
        Ok(out)
    };
    let s = build(&sl2::S)?;
    let t = build(&sl2::T)?;
    let label = format!("T{m}({})", r.label());
    let bound = lcm(r.level(), m) * m * r.level();
    let probe = Rep::new(label.clone(), bound, s.clone(), t.clone())?;
    let level = probe
        .t_order(bound)
        .ok_or_else(|| Error::Validation(format!("{label}: T has no order up to {bound}")))?;
    let rep = Rep::new(label, level, s, t)?;
    rep.validate().into_result()?;
    Ok(HeckeRep {
        base: r.clone(),
        index: m,
        cosets,
        rep,
    })
}

/// The all-ones coordinate row `Σ_m e_m` in `V(T_M 𝟙)`.
pub fn unit_embedding(m: u64) -> Result<Vec<CycNum>> {
    Ok(vec![CycNum::one(); delta_cosets(1, m as i64)?.len()])
}

/// `(v ⊗ e_m) ⊗ (w ⊗ e_m′) ↦ δ_{m,m′} (v ⊗ w) ⊗ e_m`.
pub fn pi_m(r: &Rep, r2: &Rep, m: u64) -> Result<Matrix> {
    let n = delta_cosets(1, m as i64)?.len();
    let (d1, d2) = (r.dim(), r2.dim());
    let mut out = Matrix::zero(n * d1 * d2, n * d1 * n * d2);
    for j in 0..n {
        for i1 in 0..d1 {
            for i2 in 0..d2 {
                let src = (j * d1 + i1) * (n * d2) + (j * d2 + i2);
                let dst = j * d1 * d2 + i1 * d2 + i2;
                out.set(dst, src, CycNum::one());
            }
        }
    }
    Ok(out)
}

/// `T_M f = Σ_{m ∈ Δ_M} (f|_k m) ⊗ e_m`, with `Y^r` rescaled by `(d²/M)^r`.
pub fn hecke_form(m: u64, f: &AholForm) -> Result<AholForm> {
    if f.prec() <= Rational::zero() {
        return Err(Error::PrecisionExhausted(
            "input form has no sound coefficients".into(),
        ));
    }
    let hr = hecke_rep(m, f.rep())?;
    let k = f.weight();
    let graded = f
        .graded()
        .iter()
        .enumerate()
        .map(|(r, layer)| {
            let mut comps = Vec::with_capacity(hr.dim());
            for c in &hr.cosets {
                let (a, b, d) = c.abd();
                let y = num_traits::pow(Rational::new(BigInt::from(d * d), BigInt::from(m)), r);
                for q in layer {
                    comps.push(q.slash_expand(k, (a, b, d))?.scale_rational(&y));
                }
            }
            Ok(comps)
        })
        .collect::<Result<Vec<Vec<QExp>>>>()?;
    AholForm::new(k, hr.rep, graded)
}

/// A sesquilinear pairing `⟨v, w⟩ = Σ v_i G_ij conj(w_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pairing {
    pub gram: Matrix,
}

impl Pairing {
    pub fn new(gram: Matrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::Shape("Gram matrix must be square".into()));
        }
        Ok(Pairing { gram })
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn eval(&self, v: &[CycNum], w: &[CycNum]) -> Result<CycNum> {
        if v.len() != self.dim() || w.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len().max(w.len()),
            });
        }
        let wc: Vec<CycNum> = w.iter().map(CycNum::conj).collect();
        let gw = self.gram.apply(&wc)?;
        Ok(v.iter()
            .zip(&gw)
            .fold(CycNum::zero(), |acc, (a, b)| &acc + &(a * b)))
    }
}

/// Block-diagonal extension of `inner` to `V(ρ) ⊗ C[Δ_M]`.
pub fn pairing_tm(inner: &Pairing, m: u64) -> Result<Pairing> {
    let n = delta_cosets(1, m as i64)?.len();
    let k = inner.dim();
    let mut gram = Matrix::zero(n * k, n * k);
    for j in 0..n {
        for a in 0..k {
            for b in 0..k {
                gram.set(j * k + a, j * k + b, inner.gram.get(a, b).clone());
            }
        }
    }
    Pairing::new(gram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::forms::{delta_form, eisenstein};
    use crate::reps::{hom_contains, RepRegistry};

    fn sigma1(m: u64) -> usize {
        divisors(m).iter().sum::<u64>() as usize
    }

    #[test]
    fn genus_one_listing() {
        let c = delta_cosets(1, 3).unwrap();
        let abd: Vec<_> = c.iter().map(DeltaCoset::abd).collect();
        assert_eq!(abd, vec![(3, 0, 1), (1, 0, 3), (1, 1, 3), (1, 2, 3)]);
        assert_eq!(
            delta_cosets(1, 1).unwrap(),
            vec![DeltaCoset::from_abd(1, 0, 1)]
        );
        assert!(delta_cosets(1, 0).is_err());
        for m in 1..=12 {
            assert_eq!(delta_cosets(1, m).unwrap().len(), sigma1(m as u64));
        }
    }

    #[test]
    fn genus_two_counts() {
        for p in [2i64, 3] {
            let c = delta_cosets(2, p).unwrap();
            assert_eq!(c.len() as i64, (1 + p) * (1 + p * p));
            assert!(cosets_distinct(&c).unwrap());
        }
    }

    #[test]
    fn reduction_examples() {
        let (rep, g) = reduce_to_coset(&[[0, -1], [3, 0]]).unwrap();
        assert_eq!(rep.abd(), (3, 0, 1));
        assert_eq!(g, [[0, -1], [1, 0]]);
        let (rep, g) = reduce_to_coset(&[[1, 5], [0, 3]]).unwrap();
        assert_eq!(rep.abd(), (1, 2, 3));
        assert_eq!(g, [[1, 1], [0, 1]]);
        let (rep, g) = reduce_to_coset(&[[1, 1], [0, 3]]).unwrap();
        assert_eq!((rep.abd(), g), ((1, 1, 3), sl2::IDENTITY));
        assert!(reduce_to_coset(&[[0, 1], [1, 0]]).is_err());
    }

    #[test]
    fn cocycle_examples() {
        let m = DeltaCoset::from_abd(1, 0, 3);
        assert_eq!(
            cocycle(&m, &sl2::IDENTITY).unwrap(),
            (sl2::IDENTITY, m.clone())
        );
        let (i, t) = cocycle(&m, &sl2::T).unwrap();
        assert_eq!(i, sl2::IDENTITY);
        assert_eq!(t.abd(), (1, 1, 3));
        assert!(cocycle(&m, &[[2, 0], [0, 1]]).is_err());
    }

    #[test]
    fn hecke_reps_validate() {
        let reg = RepRegistry::bundled();
        let t1 = hecke_rep(1, reg.require("rho3").unwrap()).unwrap();
        assert_eq!(t1.rep.s(), reg.require("rho3").unwrap().s());
        assert_eq!(t1.rep.t(), reg.require("rho3").unwrap().t());
        let t3 = hecke_rep(3, &Rep::trivial()).unwrap();
        assert_eq!(t3.dim(), 4);
        let phi = Matrix::from_rationals(
            3,
            4,
            &[
                rat(1, 1),
                rat(-1, 3),
                rat(-1, 3),
                rat(-1, 3),
                rat(-1, 3),
                rat(1, 1),
                rat(-1, 3),
                rat(-1, 3),
                rat(-1, 3),
                rat(-1, 3),
                rat(1, 1),
                rat(-1, 3),
            ],
        );
        assert!(hom_contains(&t3.rep, reg.require("rho3").unwrap(), &phi).unwrap());
    }

    #[test]
    fn unit_embedding_fixed() {
        assert_eq!(unit_embedding(1).unwrap(), vec![CycNum::one()]);
        let t3 = hecke_rep(3, &Rep::trivial()).unwrap();
        let u = unit_embedding(3).unwrap();
        assert_eq!(t3.rep.s().apply(&u).unwrap(), u);
        assert_eq!(t3.rep.t().apply(&u).unwrap(), u);
        let row = Matrix::from_rows(vec![u]).unwrap();
        assert!(Rep::intertwines(&row, &t3.rep, &Rep::trivial()));
    }

    #[test]
    fn pi_intertwines() {
        assert!(pi_m(&Rep::trivial(), &Rep::trivial(), 1)
            .unwrap()
            .is_identity());
        let one = Rep::trivial();
        let t2 = hecke_rep(2, &one).unwrap();
        let p = pi_m(&one, &one, 2).unwrap();
        assert_eq!(p.rank(), 3);
        let src = t2.rep.tensor(&t2.rep);
        let dst = hecke_rep(2, &one.tensor(&one)).unwrap();
        assert!(Rep::intertwines(&p, &src, &dst.rep));
    }

    #[test]
    fn t3_e12_constants() {
        let f = hecke_form(3, &eisenstein(12, 6).unwrap()).unwrap();
        let c: Vec<_> = f.components().iter().map(|q| q.coeff_int(0)).collect();
        let small = CycNum::from_rational(rat(1, 729));
        assert_eq!(
            c,
            vec![CycNum::from_int(729), small.clone(), small.clone(), small]
        );
        assert_eq!(f.prec(), rat(2, 1));
        assert!(crate::forms::check_t_consistency(&f));
        let e = eisenstein(12, 4).unwrap();
        assert_eq!(hecke_form(1, &e).unwrap().components(), e.components());
    }

    #[test]
    fn unit_contraction_of_delta() {
        let d = delta_form(12);
        let t2 = hecke_form(2, &d).unwrap();
        let row = Matrix::from_rows(vec![unit_embedding(2).unwrap()]).unwrap();
        let g = t2.apply_matrix(&row, &Rep::trivial()).unwrap();
        let expect = d.truncate(&g.prec()).scale_rational(&rat(-3, 4));
        assert_eq!(g.components(), expect.components());
    }

    #[test]
    fn pairing_block_diagonal() {
        let base = Pairing::new(Matrix::identity(1)).unwrap();
        assert_eq!(pairing_tm(&base, 1).unwrap(), base);
        let p = pairing_tm(&base, 2).unwrap();
        let e = |i: usize| {
            (0..3)
                .map(|j| CycNum::from_int((i == j) as i64))
                .collect::<Vec<_>>()
        };
        assert!(p.eval(&e(0), &e(1)).unwrap().is_zero());
        assert!(p.eval(&e(2), &e(2)).unwrap().is_one());
    }
}
