//! Truncated Fourier expansions in `q^{1/h}` with cyclotomic coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{format_rational, lcm, parse_rational, rat_int, CycNum, Rational};

/// `Σ c_n q^{n/h} + O(q^prec)`, holomorphic at the cusp.
///
/// Only exponents in `[0, prec)` are stored and zero coefficients are never kept.
#[derive(Clone, Debug)]
pub struct QExp {
    denom: u64,
    prec: Rational,
    terms: BTreeMap<i64, CycNum>,
}

fn exponent(n: i64, h: u64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(h))
}

impl QExp {
    pub fn new(
        denom: u64,
        prec: Rational,
        terms: impl IntoIterator<Item = (i64, CycNum)>,
    ) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidArgument(
                "exponent denominator must be positive".into(),
            ));
        }
        if prec.is_negative() {
            return Err(Error::InvalidArgument("negative precision".into()));
        }
        let mut map = BTreeMap::new();
        for (n, c) in terms {
            if n < 0 {
                return Err(Error::InvalidArgument(format!(
                    "negative exponent {n}/{denom}"
                )));
            }
            if c.is_zero() || exponent(n, denom) >= prec {
                continue;
            }
            map.insert(n, c);
        }
        Ok(QExp {
            denom,
            prec,
            terms: map,
        })
    }

    /// Integral exponents `0..prec` from a coefficient list.
    pub fn from_coeffs(coeffs: Vec<CycNum>, prec: u64) -> Self {
        Self::new(
            1,
            rat_int(prec as i64),
            coeffs.into_iter().enumerate().map(|(n, c)| (n as i64, c)),
        )
        .expect("nonnegative exponents")
    }

    pub fn zero(prec: Rational) -> Self {
        QExp {
            denom: 1,
            prec,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: CycNum, prec: Rational) -> Self {
        Self::new(1, prec, [(0, c)]).unwrap()
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn prec(&self) -> &Rational {
        &self.prec
    }

    pub fn terms(&self) -> &BTreeMap<i64, CycNum> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterates `(exponent, coefficient)` in increasing exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (Rational, &CycNum)> + '_ {
        self.terms
            .iter()
            .map(move |(&n, c)| (exponent(n, self.denom), c))
    }

    /// Coefficient of `q^e`; zero when `e` is off the lattice.
    ///
    /// Panics if `e` is at or beyond the precision.
    pub fn coeff(&self, e: &Rational) -> CycNum {
        assert!(*e < self.prec, "coefficient requested beyond precision");
        let scaled = e * Rational::from_integer(BigInt::from(self.denom));
        if !scaled.is_integer() {
            return CycNum::zero();
        }
        let n: i64 = scaled
            .to_integer()
            .try_into()
            .expect("exponent fits in i64");
        self.terms.get(&n).cloned().unwrap_or_else(CycNum::zero)
    }

    /// Coefficient of `q^n` for an integral exponent.
    pub fn coeff_int(&self, n: i64) -> CycNum {
        self.coeff(&rat_int(n))
    }

    /// Re-expresses on the finer lattice `1/h` (`h` must be a multiple of the current denominator).
    pub fn with_denom(&self, h: u64) -> Self {
        assert!(h.is_multiple_of(self.denom));
        let f = (h / self.denom) as i64;
        QExp {
            denom: h,
            prec: self.prec.clone(),
            terms: self
                .terms
                .iter()
                .map(|(&n, c)| (n * f, c.clone()))
                .collect(),
        }
    }

    /// Coarsest lattice carrying all stored exponents.
    pub fn normalized(&self) -> Self {
        let g = self.terms.keys().fold(self.denom as i64, |g, &n| g.gcd(&n)) as u64;
        if g <= 1 {
            return self.clone();
        }
        QExp {
            denom: self.denom / g,
            prec: self.prec.clone(),
            terms: self
                .terms
                .iter()
                .map(|(&n, c)| (n / g as i64, c.clone()))
                .collect(),
        }
    }

    pub fn truncate(&self, prec: &Rational) -> Self {
        let p = if *prec < self.prec {
            prec.clone()
        } else {
            self.prec.clone()
        };
        QExp {
            denom: self.denom,
            terms: self
                .terms
                .iter()
                .filter(|(&n, _)| exponent(n, self.denom) < p)
                .map(|(&n, c)| (n, c.clone()))
                .collect(),
            prec: p,
        }
    }

    fn combine(&self, other: &QExp, sign: bool) -> QExp {
        let h = lcm(self.denom, other.denom);
        let a = self.with_denom(h);
        let b = other.with_denom(h);
        let prec = if a.prec < b.prec {
            a.prec.clone()
        } else {
            b.prec.clone()
        };
        let mut terms = BTreeMap::new();
        for (&n, c) in &a.terms {
            terms.insert(n, c.clone());
        }
        for (&n, c) in &b.terms {
            let e = terms.entry(n).or_insert_with(CycNum::zero);
            if sign {
                *e += c;
            } else {
                *e -= c;
            }
        }
        QExp::new(h, prec, terms).unwrap()
    }

    pub fn add(&self, other: &QExp) -> QExp {
        self.combine(other, true)
    }

    pub fn sub(&self, other: &QExp) -> QExp {
        self.combine(other, false)
    }

    pub fn neg(&self) -> QExp {
        self.scale(&CycNum::from_int(-1))
    }

    pub fn scale(&self, c: &CycNum) -> QExp {
        QExp::new(
            self.denom,
            self.prec.clone(),
            self.terms.iter().map(|(&n, x)| (n, x * c)),
        )
        .unwrap()
    }

    pub fn scale_rational(&self, r: &Rational) -> QExp {
        QExp::new(
            self.denom,
            self.prec.clone(),
            self.terms.iter().map(|(&n, x)| (n, x.scale(r))),
        )
        .unwrap()
    }

    /// Exact product truncated at the smaller precision.
    pub fn mul(&self, other: &QExp) -> QExp {
        let h = lcm(self.denom, other.denom);
        let a = self.with_denom(h);
        let b = other.with_denom(h);
        let prec = if a.prec < b.prec {
            a.prec.clone()
        } else {
            b.prec.clone()
        };
        let limit = &prec * Rational::from_integer(BigInt::from(h));
        let mut terms: BTreeMap<i64, CycNum> = BTreeMap::new();
        for (&n, x) in &a.terms {
            if rat_int(n) >= limit {
                break;
            }
            for (&m, y) in &b.terms {
                if rat_int(n + m) >= limit {
                    break;
                }
                let e = terms.entry(n + m).or_insert_with(CycNum::zero);
                *e += &(x * y);
            }
        }
        QExp::new(h, prec, terms).unwrap()
    }

    /// `θ = q d/dq`: multiplies the coefficient of `q^e` by `e`.
    pub fn theta(&self) -> QExp {
        QExp::new(
            self.denom,
            self.prec.clone(),
            self.terms
                .iter()
                .map(|(&n, c)| (n, c.scale(&exponent(n, self.denom)))),
        )
        .unwrap()
    }

    /// The expansion of `f(τ + 1)`: `q^{n/h} ↦ ζ_h^n q^{n/h}`.
    pub fn phase_shift(&self) -> QExp {
        QExp::new(
            self.denom,
            self.prec.clone(),
            self.terms
                .iter()
                .map(|(&n, c)| (n, c * &CycNum::zeta_pow(self.denom, n))),
        )
        .unwrap()
    }

    /// Expansion of `M^{k/2} d^{-k} f((aτ + b)/d)` for `m = (a, b; 0, d)`.
    pub fn slash_expand(&self, k: i64, m: (i64, i64, i64)) -> Result<QExp> {
        let (a, b, d) = m;
        if k % 2 != 0 {
            return Err(Error::InvalidArgument(format!("odd weight {k}")));
        }
        if a <= 0 || d <= 0 {
            return Err(Error::InvalidArgument(format!(
                "diagonal entries must be positive: {m:?}"
            )));
        }
        if b < 0 || b >= d {
            return Err(Error::InvalidArgument(format!("b = {b} outside [0, {d})")));
        }
        let big_m = rat_int(a * d);
        let half = k / 2;
        let scalar = pow_rat(&big_m, half) * pow_rat(&rat_int(d), -k);
        let h = self.denom * d as u64;
        let prec = &self.prec * Rational::new(BigInt::from(a), BigInt::from(d));
        let terms = self.terms.iter().map(|(&n, c)| {
            let mut x = c.scale(&scalar);
            if b != 0 {
                x = &x * &CycNum::zeta_pow(h, n * b);
            }
            (n * a, x)
        });
        QExp::new(h, prec, terms)
    }

    /// Smallest stored exponent, if any.
    pub fn valuation(&self) -> Option<Rational> {
        self.terms.keys().next().map(|&n| exponent(n, self.denom))
    }
}

pub fn pow_rat(x: &Rational, e: i64) -> Rational {
    let p = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

impl PartialEq for QExp {
    /// Same precision and the same coefficient of every exponent.
    fn eq(&self, other: &Self) -> bool {
        if self.prec != other.prec {
            return false;
        }
        let a = self.normalized();
        let b = other.normalized();
        a.denom == b.denom && a.terms == b.terms
    }
}

impl fmt::Display for QExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (e, c) in self.iter() {
            let mono = if e.is_zero() {
                None
            } else if e.is_one() {
                Some("q".to_string())
            } else if e.is_integer() {
                Some(format!("q^{}", e.numer()))
            } else {
                Some(format!("q^({})", format_rational(&e)))
            };
            parts.push(match mono {
                None => c.to_string(),
                Some(m) if c.is_one() => m,
                Some(m) if (-c).is_one() => format!("-{m}"),
                Some(m) => format!("{c}*{m}"),
            });
        }
        let tail = if self.prec.is_integer() {
            format!("O(q^{})", self.prec.numer())
        } else {
            format!("O(q^({}))", format_rational(&self.prec))
        };
        parts.push(tail);
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}

#[derive(Serialize, Deserialize)]
struct QExpWire {
    h: u64,
    prec: String,
    terms: Vec<(i64, CycNum)>,
}

impl Serialize for QExp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QExpWire {
            h: self.denom,
            prec: format_rational(&self.prec),
            terms: self.terms.iter().map(|(&n, c)| (n, c.clone())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QExp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = QExpWire::deserialize(d)?;
        let prec = parse_rational(&w.prec).map_err(D::Error::custom)?;
        QExp::new(w.h, prec, w.terms).map_err(D::Error::custom)
    }
}
