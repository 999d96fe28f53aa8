//! Dense exact linear algebra over cyclotomic fields.
//!
//! Every elimination goes through [`rref`], so subspaces always carry their
//! canonical reduced row-echelon basis and compare by plain equality.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{lcm, CycNum, Rational};

fn common_conductor<'a>(xs: impl IntoIterator<Item = &'a CycNum>) -> u64 {
    xs.into_iter().fold(1, |n, x| lcm(n, x.conductor()))
}

/// Reduced row-echelon form. Pivots are the first nonzero entries in column
/// order; zero rows are dropped. Returns the nonzero rows and pivot columns.
pub fn rref(mut rows: Vec<Vec<CycNum>>, ncols: usize) -> (Vec<Vec<CycNum>>, Vec<usize>) {
    let n = common_conductor(rows.iter().flatten());
    for row in rows.iter_mut() {
        debug_assert_eq!(row.len(), ncols);
        for x in row.iter_mut() {
            if x.conductor() != n {
                *x = x.lift(n);
            }
        }
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv().expect("pivot is nonzero");
        for j in c..ncols {
            if !rows[r][j].is_zero() {
                rows[r][j] = &rows[r][j] * &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for j in c..ncols {
                if !pivot_row[j].is_zero() {
                    row[j] -= &(&f * &pivot_row[j]);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Kernel basis of the matrix given by `rows` (possibly empty) with `ncols` columns.
fn kernel_of_rows(rows: Vec<Vec<CycNum>>, ncols: usize) -> Subspace {
    let (red, pivots) = rref(rows, ncols);
    let mut is_pivot = vec![None; ncols];
    for (k, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(k);
    }
    let mut vectors = Vec::new();
    for f in (0..ncols).filter(|&c| is_pivot[c].is_none()) {
        let mut v = vec![CycNum::zero(); ncols];
        v[f] = CycNum::one();
        for (k, &pc) in pivots.iter().enumerate() {
            v[pc] = -&red[k][f];
        }
        vectors.push(v);
    }
    Subspace::from_vectors(ncols, vectors)
}

/// A dense matrix whose entries share one conductor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<CycNum>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, mut entries: Vec<CycNum>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        let n = common_conductor(&entries);
        for x in entries.iter_mut() {
            if x.conductor() != n {
                *x = x.lift(n);
            }
        }
        Ok(Matrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: Vec<Vec<CycNum>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_ints(rows: usize, cols: usize, entries: &[i64]) -> Self {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| CycNum::from_int(x)).collect(),
        )
        .expect("entry count matches shape")
    }

    pub fn from_rationals(rows: usize, cols: usize, entries: &[Rational]) -> Self {
        Self::new(
            rows,
            cols,
            entries.iter().cloned().map(CycNum::from_rational).collect(),
        )
        .expect("entry count matches shape")
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![CycNum::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.entries[i * n + i] = CycNum::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn conductor(&self) -> u64 {
        self.entries.first().map_or(1, CycNum::conductor)
    }

    pub fn get(&self, i: usize, j: usize) -> &CycNum {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: CycNum) {
        let n = self.conductor();
        let x = if x.conductor() == n {
            x
        } else if n.is_multiple_of(x.conductor()) {
            x.lift(n)
        } else {
            let m = lcm(n, x.conductor());
            for e in self.entries.iter_mut() {
                *e = e.lift(m);
            }
            x.lift(m)
        };
        self.entries[i * self.cols + j] = x;
    }

    pub fn entries(&self) -> &[CycNum] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> Vec<CycNum> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn to_rows(&self) -> Vec<Vec<CycNum>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    /// Flattens row-major into a single coordinate row.
    pub fn flatten(&self) -> Vec<CycNum> {
        self.entries.clone()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(CycNum::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn scale(&self, c: &CycNum) -> Self {
        Self::new(
            self.rows,
            self.cols,
            self.entries.iter().map(|x| x * c).collect(),
        )
        .unwrap()
    }

    pub fn checked_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let n = lcm(self.conductor(), other.conductor());
        let a = self.lifted(n);
        let b = other.lifted(n);
        let mut out = vec![CycNum::zero().lift(n); self.rows * other.cols];
        for i in 0..a.rows {
            for k in 0..a.cols {
                let x = a.get(i, k);
                if x.is_zero() {
                    continue;
                }
                for j in 0..b.cols {
                    let y = b.get(k, j);
                    if !y.is_zero() {
                        out[i * b.cols + j] += &(x * y);
                    }
                }
            }
        }
        Matrix::new(self.rows, other.cols, out)
    }

    pub fn checked_add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn checked_sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |x, y| x - y)
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(&CycNum, &CycNum) -> CycNum) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Matrix::new(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(x, y)| f(x, y))
                .collect(),
        )
    }

    fn lifted(&self, n: u64) -> std::borrow::Cow<'_, Matrix> {
        if self.conductor() == n {
            std::borrow::Cow::Borrowed(self)
        } else {
            std::borrow::Cow::Owned(Matrix {
                rows: self.rows,
                cols: self.cols,
                entries: self.entries.iter().map(|x| x.lift(n)).collect(),
            })
        }
    }

    pub fn apply(&self, v: &[CycNum]) -> Result<Vec<CycNum>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = CycNum::zero();
                for (j, vj) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !vj.is_zero() {
                        acc += &(a * vj);
                    }
                }
                acc
            })
            .collect())
    }

    pub fn pow(&self, mut e: u64) -> Matrix {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn rank(&self) -> usize {
        rref(self.to_rows(), self.cols).1.len()
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let rows = (0..n)
            .map(|i| {
                let mut r = self.row(i);
                r.extend((0..n).map(|j| {
                    if i == j {
                        CycNum::one()
                    } else {
                        CycNum::zero()
                    }
                }));
                r
            })
            .collect();
        let (red, pivots) = rref(rows, 2 * n);
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::DivisionByZero);
        }
        Matrix::from_rows(red.into_iter().map(|r| r[n..].to_vec()).collect())
    }

    /// `a · x = b` for `x`.
    pub fn solve_right(&self, b: &Matrix) -> Result<Matrix> {
        solve_right(self, b)
    }

    /// Reshapes the row-major entries into a new shape.
    pub fn reshape(&self, rows: usize, cols: usize) -> Result<Matrix> {
        Matrix::new(rows, cols, self.entries.clone())
    }
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn mul(self, other: &Matrix) -> Matrix {
        self.checked_mul(other).expect("matrix shape mismatch")
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn add(self, other: &Matrix) -> Matrix {
        self.checked_add(other).expect("matrix shape mismatch")
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn sub(self, other: &Matrix) -> Matrix {
        self.checked_sub(other).expect("matrix shape mismatch")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rows = Vec::<Vec<CycNum>>::deserialize(d)?;
        Matrix::from_rows(rows).map_err(D::Error::custom)
    }
}

/// A subspace of `K^n` held by its reduced row-echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<CycNum>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self::from_vectors(
            ambient_dim,
            (0..ambient_dim)
                .map(|i| {
                    (0..ambient_dim)
                        .map(|j| CycNum::from_int((i == j) as i64))
                        .collect()
                })
                .collect(),
        )
    }

    /// Span of arbitrary vectors of length `ambient_dim`.
    pub fn from_vectors(ambient_dim: usize, vectors: Vec<Vec<CycNum>>) -> Self {
        let (basis, pivots) = rref(vectors, ambient_dim);
        Subspace {
            ambient_dim,
            basis,
            pivots,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<CycNum>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Basis vectors as the rows of a matrix.
    pub fn basis_matrix(&self) -> Matrix {
        if self.basis.is_empty() {
            return Matrix::zero(0, self.ambient_dim);
        }
        Matrix::from_rows(self.basis.clone()).unwrap()
    }

    pub fn contains(&self, v: &[CycNum]) -> Result<bool> {
        member(self, v)
    }

    /// Vectors `w` with `b · w = 0` for every basis vector `b`.
    pub fn annihilator(&self) -> Subspace {
        kernel_of_rows(self.basis.clone(), self.ambient_dim)
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        intersect(self, other)
    }
}

pub fn kernel(m: &Matrix) -> Subspace {
    kernel_of_rows(m.to_rows(), m.cols())
}

pub fn intersect(u: &Subspace, v: &Subspace) -> Result<Subspace> {
    if u.ambient_dim != v.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: u.ambient_dim,
            found: v.ambient_dim,
        });
    }
    let mut constraints = u.annihilator().basis;
    constraints.extend(v.annihilator().basis);
    Ok(kernel_of_rows(constraints, u.ambient_dim))
}

/// Kronecker product; block `(i, j)` is `a[i, j] · b`.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut entries = vec![CycNum::zero(); rows * cols];
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    let y = b.get(k, l);
                    if !y.is_zero() {
                        entries[(i * b.rows + k) * cols + j * b.cols + l] = x * y;
                    }
                }
            }
        }
    }
    Matrix::new(rows, cols, entries).unwrap()
}

pub fn solve_right(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.rows != b.rows {
        return Err(Error::DimensionMismatch {
            expected: a.rows,
            found: b.rows,
        });
    }
    let (c, k) = (a.cols, b.cols);
    let rows = (0..a.rows)
        .map(|i| {
            let mut r = a.row(i);
            r.extend(b.row(i));
            r
        })
        .collect();
    let (red, pivots) = rref(rows, c + k);
    if pivots.iter().any(|&p| p >= c) {
        return Err(Error::InconsistentSystem);
    }
    let mut x = Matrix::zero(c, k);
    for (row, &pc) in red.iter().zip(&pivots) {
        for j in 0..k {
            x.set(pc, j, row[c + j].clone());
        }
    }
    Ok(x)
}

pub fn member(s: &Subspace, v: &[CycNum]) -> Result<bool> {
    if v.len() != s.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: s.ambient_dim,
            found: v.len(),
        });
    }
    let mut r = v.to_vec();
    for (b, &p) in s.basis.iter().zip(&s.pivots) {
        if r[p].is_zero() {
            continue;
        }
        let f = r[p].clone();
        for (x, y) in r.iter_mut().zip(b) {
            if !y.is_zero() {
                *x -= &(&f * y);
            }
        }
    }
    Ok(r.iter().all(CycNum::is_zero))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> Vec<CycNum> {
        (0..n).map(|j| CycNum::from_int((i == j) as i64)).collect()
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel(&Matrix::identity(3)).dim(), 0);
        assert_eq!(kernel(&Matrix::zero(2, 2)), Subspace::full(2));
        let k = kernel(&Matrix::from_ints(1, 2, &[1, -1]));
        assert_eq!(k.basis(), &[vec![CycNum::one(), CycNum::one()]]);
    }

    #[test]
    fn intersect_examples() {
        let u = Subspace::from_vectors(2, vec![e(2, 0)]);
        let v = Subspace::from_vectors(2, vec![e(2, 1)]);
        assert_eq!(intersect(&u, &u).unwrap(), u);
        assert_eq!(intersect(&u, &v).unwrap().dim(), 0);
        let a = Subspace::from_vectors(3, vec![e(3, 0), e(3, 1)]);
        let b = Subspace::from_vectors(3, vec![e(3, 1), e(3, 2)]);
        assert_eq!(
            intersect(&a, &b).unwrap(),
            Subspace::from_vectors(3, vec![e(3, 1)])
        );
        assert!(matches!(
            intersect(&u, &a),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kron_identity_and_s_matrix() {
        assert_eq!(
            kron(&Matrix::identity(2), &Matrix::identity(3)),
            Matrix::identity(6)
        );
        let s3 = Matrix::from_ints(3, 3, &[0, 1, 0, 1, 0, 0, -1, -1, -1]);
        let k = kron(&s3, &s3);
        assert_eq!((k.rows(), k.cols()), (9, 9));
        assert_eq!(*k.get(0, 4), CycNum::one());
    }

    #[test]
    fn solve_examples() {
        let b = Matrix::from_ints(2, 2, &[1, 2, 3, 4]);
        assert_eq!(solve_right(&Matrix::identity(2), &b).unwrap(), b);
        let two = Matrix::identity(2).scale(&CycNum::from_int(2));
        let half = b.scale(&CycNum::from_rational(crate::exactnum::rat(1, 2)));
        assert_eq!(solve_right(&two, &b).unwrap(), half);
        let a = Matrix::from_ints(2, 1, &[1, 0]);
        let b = Matrix::from_ints(2, 1, &[0, 1]);
        assert!(matches!(
            solve_right(&a, &b),
            Err(Error::InconsistentSystem)
        ));
    }

    #[test]
    fn member_examples() {
        let s = Subspace::from_vectors(
            3,
            vec![
                e(3, 0),
                vec![CycNum::one(), CycNum::zeta(3), CycNum::zero()],
            ],
        );
        for b in s.basis() {
            assert!(member(&s, b).unwrap());
        }
        assert!(member(&s, &[CycNum::zero(), CycNum::zero(), CycNum::zero()]).unwrap());
        let line = Subspace::from_vectors(2, vec![e(2, 0)]);
        assert!(!member(&line, &e(2, 1)).unwrap());
        assert!(member(&line, &e(3, 1)).is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Matrix::from_ints(3, 3, &[0, 1, 0, 1, 0, 0, -1, -1, -1]);
        assert!((&m * &m.inverse().unwrap()).is_identity());
        assert!(Matrix::from_ints(2, 2, &[1, 2, 2, 4]).inverse().is_err());
    }

    #[test]
    fn cyclotomic_entries() {
        let z = CycNum::zeta(3);
        let m = Matrix::from_rows(vec![
            vec![z.clone(), CycNum::one()],
            vec![CycNum::zero(), z.clone()],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).is_identity());
        assert_eq!(
            m.pow(3),
            Matrix::from_rows(vec![
                vec![CycNum::one(), &(&z * &z) * &CycNum::from_int(3)],
                vec![CycNum::zero(), CycNum::one()],
            ])
            .unwrap()
        );
    }
}
