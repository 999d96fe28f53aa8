//! Exact rationals and elements of cyclotomic fields.
//!
//! A [`CycNum`] is stored in the power basis `1, ζ_n, …, ζ_n^{φ(n)-1}` of
//! `Q(ζ_n)` at a fixed conductor `n`. Binary operations lift both operands to
//! the lcm of their conductors; nothing ever shrinks the conductor implicitly.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"a/b"` or `"a"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parsed = match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
            let d: BigInt = d
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Rational::new(n, d)
        }
        None => Rational::from_integer(
            s.parse()
                .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?,
        ),
    };
    Ok(parsed)
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn euler_phi(n: u64) -> usize {
    assert!(n >= 1);
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result as usize
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    // den is monic
    let mut rem = num.to_vec();
    let dl = den.len();
    let ql = rem.len() + 1 - dl;
    let mut quot = vec![BigInt::zero(); ql];
    for i in (0..ql).rev() {
        let c = rem[i + dl - 1].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dc) in den.iter().enumerate() {
            rem[i + j] -= &c * dc;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

fn compute_cyclotomic(n: u64) -> Vec<BigInt> {
    // x^n - 1 = prod_{d | n} Φ_d
    let mut p = vec![BigInt::zero(); n as usize + 1];
    p[0] = BigInt::from(-1);
    p[n as usize] = BigInt::one();
    for d in divisors(n) {
        if d < n {
            p = poly_div_exact(&p, &cyclotomic_polynomial(d));
        }
    }
    p
}

/// Integer coefficients of Φ_n, lowest degree first.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let p = Arc::new(compute_cyclotomic(n));
    cache.lock().unwrap().insert(n, p.clone());
    p
}

/// Reduces a rational polynomial modulo Φ_n and pads to length φ(n).
fn reduce_mod_cyclotomic(mut poly: Vec<Rational>, n: u64) -> Vec<Rational> {
    let phi = cyclotomic_polynomial(n);
    let deg = phi.len() - 1;
    if poly.len() > deg {
        for i in (deg..poly.len()).rev() {
            if poly[i].is_zero() {
                continue;
            }
            let c = poly[i].clone();
            for (j, pc) in phi.iter().enumerate() {
                if !pc.is_zero() {
                    poly[i - deg + j] -= &c * Rational::from_integer(pc.clone());
                }
            }
        }
        poly.truncate(deg);
    }
    poly.resize(deg, Rational::zero());
    poly
}

/// Solves a square rational system `a x = b` by Gauss-Jordan elimination.
/// Returns `None` when `a` is singular.
fn solve_rational(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for j in col..n {
            a[col][j] = &a[col][j] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..n {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                }
                let t = &f * &b[col];
                b[r] -= t;
            }
        }
    }
    Some(b)
}

/// An element of `Q(ζ_n)` in power-basis coordinates.
#[derive(Clone, Debug)]
pub struct CycNum {
    conductor: u64,
    coeffs: Vec<Rational>,
}

impl CycNum {
    pub fn from_coeffs(conductor: u64, coeffs: Vec<Rational>) -> Result<Self> {
        if conductor == 0 {
            return Err(Error::InvalidArgument("conductor must be positive".into()));
        }
        let phi = euler_phi(conductor);
        if coeffs.len() != phi {
            return Err(Error::DimensionMismatch {
                expected: phi,
                found: coeffs.len(),
            });
        }
        Ok(CycNum { conductor, coeffs })
    }

    /// Builds `Σ c_i ζ_n^i` from an arbitrary-length polynomial, reducing mod Φ_n.
    pub fn from_poly(conductor: u64, poly: Vec<Rational>) -> Self {
        assert!(conductor >= 1);
        CycNum {
            conductor,
            coeffs: reduce_mod_cyclotomic(poly, conductor),
        }
    }

    pub fn from_rational(r: Rational) -> Self {
        CycNum {
            conductor: 1,
            coeffs: vec![r],
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// `ζ_n^k` at conductor `n`.
    pub fn zeta_pow(n: u64, k: i64) -> Self {
        assert!(n >= 1);
        let e = k.rem_euclid(n as i64) as usize;
        let mut poly = vec![Rational::zero(); e + 1];
        poly[e] = Rational::one();
        Self::from_poly(n, poly)
    }

    pub fn zeta(n: u64) -> Self {
        Self::zeta_pow(n, 1)
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.is_rational() && self.coeffs[0].is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(Zero::is_zero)
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    /// Re-expresses the element at conductor `n` (a multiple of the current one)
    /// via `ζ_m ↦ ζ_n^{n/m}`.
    pub fn lift(&self, n: u64) -> Self {
        assert!(
            n.is_multiple_of(self.conductor),
            "cannot lift conductor {} to {}",
            self.conductor,
            n
        );
        if n == self.conductor {
            return self.clone();
        }
        let step = (n / self.conductor) as usize;
        let mut poly = vec![Rational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[i * step] = c.clone();
        }
        Self::from_poly(n, poly)
    }

    /// Expresses the element at conductor `m`, if it lies in `Q(ζ_m)`.
    pub fn reduce_conductor(&self, m: u64) -> Option<Self> {
        if m == 0 || !self.conductor.is_multiple_of(m) {
            return None;
        }
        if m == self.conductor {
            return Some(self.clone());
        }
        let phi_n = self.coeffs.len();
        let phi_m = euler_phi(m);
        // columns: images of ζ_m^i at conductor n
        let images: Vec<CycNum> = (0..phi_m)
            .map(|i| CycNum::zeta_pow(m, i as i64).lift(self.conductor))
            .collect();
        let mut rows: Vec<Vec<Rational>> = (0..phi_n)
            .map(|r| images.iter().map(|img| img.coeffs[r].clone()).collect())
            .collect();
        let mut rhs: Vec<Rational> = self.coeffs.clone();
        // overdetermined; row-reduce and check consistency
        let mut pivot_row = 0;
        for col in 0..phi_m {
            let Some(p) = (pivot_row..phi_n).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(pivot_row, p);
            rhs.swap(pivot_row, p);
            let inv = rows[pivot_row][col].recip();
            for j in 0..phi_m {
                rows[pivot_row][j] = &rows[pivot_row][j] * &inv;
            }
            rhs[pivot_row] = &rhs[pivot_row] * &inv;
            for r in 0..phi_n {
                if r != pivot_row && !rows[r][col].is_zero() {
                    let f = rows[r][col].clone();
                    for j in 0..phi_m {
                        let t = &f * &rows[pivot_row][j];
                        rows[r][j] -= t;
                    }
                    let t = &f * &rhs[pivot_row];
                    rhs[r] -= t;
                }
            }
            pivot_row += 1;
        }
        if rhs[pivot_row..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let coeffs = rhs[..phi_m].to_vec();
        Some(CycNum {
            conductor: m,
            coeffs,
        })
    }

    /// Smallest conductor dividing the current one at which the element lives.
    pub fn minimize_conductor(&self) -> Self {
        for d in divisors(self.conductor) {
            if let Some(r) = self.reduce_conductor(d) {
                return r;
            }
        }
        unreachable!("an element always lies in its own field")
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        let n = self.conductor as usize;
        if n <= 2 {
            return self.clone();
        }
        let mut poly = vec![Rational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[(n - i) % n] += c;
        }
        Self::from_poly(self.conductor, poly)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let phi = self.coeffs.len();
        if phi == 1 {
            return Ok(CycNum {
                conductor: self.conductor,
                coeffs: vec![self.coeffs[0].recip()],
            });
        }
        // columns are self * ζ^j
        let cols: Vec<CycNum> = (0..phi)
            .map(|j| self * &CycNum::zeta_pow(self.conductor, j as i64))
            .collect();
        let a: Vec<Vec<Rational>> = (0..phi)
            .map(|r| cols.iter().map(|c| c.coeffs[r].clone()).collect())
            .collect();
        let mut b = vec![Rational::zero(); phi];
        b[0] = Rational::one();
        let x = solve_rational(a, b).ok_or(Error::DivisionByZero)?;
        Ok(CycNum {
            conductor: self.conductor,
            coeffs: x,
        })
    }

    pub fn checked_div(&self, other: &CycNum) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = CycNum::one().lift(self.conductor);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CycNum {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    fn mul_same(&self, other: &CycNum) -> CycNum {
        debug_assert_eq!(self.conductor, other.conductor);
        let n = self.coeffs.len();
        if n == 1 {
            return CycNum {
                conductor: self.conductor,
                coeffs: vec![&self.coeffs[0] * &other.coeffs[0]],
            };
        }
        let mut poly = vec![Rational::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    poly[i + j] += a * b;
                }
            }
        }
        Self::from_poly(self.conductor, poly)
    }

    fn lifted_pair(&self, other: &CycNum) -> (std::borrow::Cow<'_, CycNum>, CycNum) {
        if self.conductor == other.conductor {
            return (std::borrow::Cow::Borrowed(self), other.clone());
        }
        let n = lcm(self.conductor, other.conductor);
        (std::borrow::Cow::Owned(self.lift(n)), other.lift(n))
    }
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor == other.conductor {
            return self.coeffs == other.coeffs;
        }
        let n = lcm(self.conductor, other.conductor);
        self.lift(n).coeffs == other.lift(n).coeffs
    }
}

impl Eq for CycNum {}

impl From<Rational> for CycNum {
    fn from(r: Rational) -> Self {
        CycNum::from_rational(r)
    }
}

impl From<i64> for CycNum {
    fn from(n: i64) -> Self {
        CycNum::from_int(n)
    }
}

impl<'a> Add<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn add(self, other: &CycNum) -> CycNum {
        let (a, b) = self.lifted_pair(other);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        CycNum {
            conductor: b.conductor,
            coeffs,
        }
    }
}

impl<'a> Sub<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn sub(self, other: &CycNum) -> CycNum {
        let (a, b) = self.lifted_pair(other);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
        CycNum {
            conductor: b.conductor,
            coeffs,
        }
    }
}

impl<'a> Mul<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn mul(self, other: &CycNum) -> CycNum {
        let (a, b) = self.lifted_pair(other);
        a.mul_same(&b)
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

/// Panics on division by zero; use [`CycNum::checked_div`] for a `Result`.
impl<'a> Div<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn div(self, other: &CycNum) -> CycNum {
        self.checked_div(other).expect("division by zero")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycNum> for CycNum {
            type Output = CycNum;
            fn $m(self, other: CycNum) -> CycNum {
                (&self).$m(&other)
            }
        }
        impl<'a> $tr<&'a CycNum> for CycNum {
            type Output = CycNum;
            fn $m(self, other: &CycNum) -> CycNum {
                (&self).$m(other)
            }
        }
        impl<'a> $tr<CycNum> for &'a CycNum {
            type Output = CycNum;
            fn $m(self, other: CycNum) -> CycNum {
                self.$m(&other)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&CycNum> for CycNum {
    fn add_assign(&mut self, other: &CycNum) {
        if self.conductor == other.conductor {
            for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
                *x += y;
            }
        } else {
            *self = &*self + other;
        }
    }
}

impl SubAssign<&CycNum> for CycNum {
    fn sub_assign(&mut self, other: &CycNum) {
        if self.conductor == other.conductor {
            for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
                *x -= y;
            }
        } else {
            *self = &*self - other;
        }
    }
}

impl MulAssign<&CycNum> for CycNum {
    fn mul_assign(&mut self, other: &CycNum) {
        *self = &*self * other;
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", format_rational(&self.coeffs[0]));
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = format_rational(&c.abs());
            let term = match (i, c.abs().is_one()) {
                (0, _) => mag,
                (1, true) => format!("zeta{}", self.conductor),
                (1, false) => format!("{}*zeta{}", mag, self.conductor),
                (_, true) => format!("zeta{}^{}", self.conductor, i),
                (_, false) => format!("{}*zeta{}^{}", mag, self.conductor, i),
            };
            parts.push((c.is_negative(), term));
        }
        let mut out = String::new();
        for (k, (neg, term)) in parts.iter().enumerate() {
            match (k, neg) {
                (0, true) => out.push_str(&format!("-{term}")),
                (0, false) => out.push_str(term),
                (_, true) => out.push_str(&format!(" - {term}")),
                (_, false) => out.push_str(&format!(" + {term}")),
            }
        }
        write!(f, "({out})")
    }
}

#[derive(Serialize, Deserialize)]
struct CycNumWire {
    n: u64,
    c: Vec<String>,
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycNumWire {
            n: self.conductor,
            c: self.coeffs.iter().map(format_rational).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = CycNumWire::deserialize(d)?;
        let coeffs = wire
            .c
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        CycNum::from_coeffs(wire.n, coeffs).map_err(D::Error::custom)
    }
}

/// Bernoulli number `B_k` with `B_1 = -1/2`.
pub fn bernoulli(k: usize) -> Rational {
    let mut b: Vec<Rational> = Vec::with_capacity(k + 1);
    for n in 0..=k {
        if n == 0 {
            b.push(Rational::one());
            continue;
        }
        // Σ_{j≤n} C(n+1, j) B_j = 0
        let mut binom = BigInt::one();
        let mut acc = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += Rational::from_integer(binom.clone()) * bj;
            binom = binom * BigInt::from(n + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / Rational::from_integer(BigInt::from(n + 1)));
    }
    b.pop().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64, k: i64) -> CycNum {
        CycNum::zeta_pow(n, k)
    }

    #[test]
    fn cyclotomic_polynomials() {
        let p = |n| {
            cyclotomic_polynomial(n)
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        assert_eq!(p(1), "-1,1");
        assert_eq!(p(3), "1,1,1");
        assert_eq!(p(4), "1,0,1");
        assert_eq!(p(12), "1,0,-1,0,1");
    }

    #[test]
    fn zeta3_sum_is_minus_one() {
        assert_eq!(&z(3, 1) + &z(3, 2), CycNum::from_int(-1));
    }

    #[test]
    fn gaussian_product() {
        let one = CycNum::one();
        let i = z(4, 1);
        assert_eq!((&one + &i) * (&one - &i), CycNum::from_int(2));
    }

    #[test]
    fn lift_and_lower() {
        let lifted = z(3, 1).lift(12);
        assert_eq!(lifted.conductor(), 12);
        assert_eq!(lifted, z(12, 4));
        assert_eq!(
            lifted.reduce_conductor(3).unwrap().coeffs(),
            z(3, 1).coeffs()
        );
        assert!(z(12, 1).reduce_conductor(3).is_none());
        assert_eq!(z(12, 4).minimize_conductor().conductor(), 3);
    }

    #[test]
    fn inverse_and_division() {
        let a = &CycNum::from_int(2) + &z(5, 2);
        let inv = a.inv().unwrap();
        assert!((&a * &inv).is_one());
        assert!(matches!(CycNum::zero().inv(), Err(Error::DivisionByZero)));
    }

    #[test]
    fn conjugation() {
        assert_eq!(z(3, 1).conj(), z(3, 2));
        let x = &z(7, 3) * &CycNum::from_int(5);
        assert!((&x * &x.conj()).is_rational());
    }

    #[test]
    fn rationality() {
        assert!(z(6, 3).is_rational());
        assert!(!z(6, 1).is_rational());
        assert_eq!(z(2, 1), CycNum::from_int(-1));
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), rat(1, 1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(12), rat(-691, 2730));
        assert_eq!(bernoulli(7), rat(0, 1));
    }

    #[test]
    fn rational_text_form() {
        assert_eq!(format_rational(&rat(-6, 4)), "-3/2");
        assert_eq!(format_rational(&rat(8, 4)), "2");
        assert_eq!(parse_rational(" -3/2").unwrap(), rat(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn display() {
        assert_eq!((&z(3, 1) + &CycNum::one()).to_string(), "(1 + zeta3)");
        assert_eq!((-z(3, 1)).to_string(), "(-zeta3)");
    }
}
