//! Dense matrices over [`Rational`] and the brute-force kernels every closed
//! form is checked against: a Bareiss determinant, a Gauss-Jordan inverse and
//! the adjugate (cofactor) sum.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// The all-ones matrix `J_{rows x cols}`.
    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, Rational::one())
    }

    pub fn filled(rows: usize, cols: usize, value: Rational) -> Self {
        RationalMatrix { rows, cols, entries: vec![value; rows * cols] }
    }

    pub fn diagonal(values: &[Rational]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        RationalMatrix { rows, cols, entries }
    }

    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        Ok(RationalMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_row_major(r, c, rows.into_iter().flatten().collect())
    }

    /// Convenience for small literal matrices of integers.
    pub fn from_ints<const C: usize>(rows: &[[i64; C]]) -> Self {
        Self::from_fn(rows.len(), C, |i, j| Rational::from_int(rows[i][j]))
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

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Rational::is_zero)
    }

    pub fn sum_entries(&self) -> Rational {
        self.entries.iter().sum()
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        RationalMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|x| x * factor).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "add")?;
        Ok(RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "sub")?;
        Ok(RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Contiguous sub-block `rows x cols` starting at `(row0, col0)`.
    pub fn block(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        assert!(row0 + rows <= self.rows && col0 + cols <= self.cols, "block out of range");
        Self::from_fn(rows, cols, |i, j| self[(row0 + i, col0 + j)].clone())
    }

    /// Assembles a matrix from a grid of blocks. Every block in a grid row
    /// must share its row count and every block in a grid column its column
    /// count.
    pub fn from_blocks(grid: &[Vec<&RationalMatrix>]) -> Result<Self> {
        let heights: Vec<usize> = grid.iter().map(|r| r.first().map_or(0, |b| b.rows)).collect();
        let widths: Vec<usize> = grid.first().map_or(Vec::new(), |r| r.iter().map(|b| b.cols).collect());
        for (bi, row) in grid.iter().enumerate() {
            if row.len() != widths.len() {
                return Err(Error::DimensionMismatch("ragged block grid".into()));
            }
            for (bj, b) in row.iter().enumerate() {
                if b.rows != heights[bi] || b.cols != widths[bj] {
                    return Err(Error::DimensionMismatch(format!(
                        "block ({bi}, {bj}) is {}x{}, expected {}x{}",
                        b.rows, b.cols, heights[bi], widths[bj]
                    )));
                }
            }
        }
        let mut out = Self::zeros(heights.iter().sum(), widths.iter().sum());
        let mut r0 = 0;
        for (bi, row) in grid.iter().enumerate() {
            let mut c0 = 0;
            for (bj, b) in row.iter().enumerate() {
                for i in 0..b.rows {
                    for j in 0..b.cols {
                        out[(r0 + i, c0 + j)] = b[(i, j)].clone();
                    }
                }
                c0 += widths[bj];
            }
            r0 += heights[bi];
        }
        Ok(out)
    }

    /// `P M P^T` where row `i` of the result is row `order[i]` of `self`.
    pub fn permute_symmetric(&self, order: &[usize]) -> Self {
        assert!(self.is_square() && order.len() == self.rows, "permutation size mismatch");
        Self::from_fn(self.rows, self.cols, |i, j| self[(order[i], order[j])].clone())
    }

    /// Drops row `skip_row` and column `skip_col`.
    pub fn minor(&self, skip_row: usize, skip_col: usize) -> Self {
        let rows: Vec<usize> = (0..self.rows).filter(|&i| i != skip_row).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&j| j != skip_col).collect();
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    /// First coordinate at which the two matrices differ, with both values.
    pub fn first_mismatch(&self, other: &Self) -> Option<Mismatch> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some(Mismatch::Shape { left: (self.rows, self.cols), right: (other.rows, other.cols) });
        }
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .find(|&(i, j)| self[(i, j)] != other[(i, j)])
            .map(|(i, j)| Mismatch::Entry { row: i, col: j, left: self[(i, j)].clone(), right: other[(i, j)].clone() })
    }

    pub fn all_canonical(&self) -> bool {
        self.entries.iter().all(Rational::is_canonical)
    }

    fn same_shape(&self, other: &Self, op: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot {op} {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    fn require_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", self.rows, self.cols)));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range");
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range");
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalMatrix {}x{} ", self.rows, self.cols)?;
        f.debug_list().entries(self.to_rows()).finish()
    }
}

/// Where two matrices first disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mismatch {
    Shape { left: (usize, usize), right: (usize, usize) },
    Entry { row: usize, col: usize, left: Rational, right: Rational },
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::Shape { left, right } => {
                write!(f, "shape {}x{} vs {}x{}", left.0, left.1, right.0, right.1)
            }
            Mismatch::Entry { row, col, left, right } => write!(f, "({row}, {col}): {left} vs {right}"),
        }
    }
}

/// Exact equality: same shape and every entry equal.
pub fn mat_equal(a: &RationalMatrix, b: &RationalMatrix) -> bool {
    a == b
}

pub fn mat_mul(a: &RationalMatrix, b: &RationalMatrix) -> Result<RationalMatrix> {
    a.mul(b)
}

/// Determinant by Bareiss fraction-free elimination.
///
/// Each row is first cleared of denominators (multiplied by the lcm of its
/// denominators), so elimination runs entirely over integers; the scale
/// factors are divided back out at the end. Pivot: first nonzero entry in
/// the column.
pub fn oracle_det(m: &RationalMatrix) -> Result<Rational> {
    m.require_square()?;
    let n = m.rows();
    if n == 0 {
        return Ok(Rational::one());
    }
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let row = m.row(i);
        let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        a.push(row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect());
        scale *= lcm;
    }

    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let det = sign * &a[n - 1][n - 1];
    Rational::from_parts(det, scale)
}

/// Exact inverse by Gauss-Jordan elimination on `[M | I]`.
pub fn oracle_inverse(m: &RationalMatrix) -> Result<RationalMatrix> {
    m.require_square()?;
    let n = m.rows();
    let mut a = m.to_rows();
    let mut inv = RationalMatrix::identity(n).to_rows();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero()).ok_or(Error::SingularMatrix)?;
        a.swap(p, k);
        inv.swap(p, k);
        let pivot = a[k][k].recip()?;
        for j in 0..n {
            a[k][j] *= &pivot;
            inv[k][j] *= &pivot;
        }
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let factor = a[i][k].clone();
            for j in 0..n {
                if !a[k][j].is_zero() {
                    let d = &factor * &a[k][j];
                    a[i][j] -= &d;
                }
                if !inv[k][j].is_zero() {
                    let d = &factor * &inv[k][j];
                    inv[i][j] -= &d;
                }
            }
        }
    }
    RationalMatrix::from_rows(inv)
}

/// Sum of all entries of the adjugate.
///
/// Invertible input: `det(M) * sum(M^-1)`. Singular input: the signed minor
/// expansion `sum_{i,j} (-1)^(i+j) det(M with row i, column j removed)`.
pub fn oracle_adjugate_sum(m: &RationalMatrix) -> Result<Rational> {
    m.require_square()?;
    if m.rows() == 0 {
        return Err(Error::DimensionMismatch("adjugate of an empty matrix".into()));
    }
    let det = oracle_det(m)?;
    if !det.is_zero() {
        return Ok(&det * &oracle_inverse(m)?.sum_entries());
    }
    adjugate_sum_by_minors(m)
}

/// The minor-expansion route of [`oracle_adjugate_sum`], usable on any
/// square matrix. A `1x1` matrix has adjugate `[1]`.
pub fn adjugate_sum_by_minors(m: &RationalMatrix) -> Result<Rational> {
    m.require_square()?;
    let n = m.rows();
    if n == 0 {
        return Err(Error::DimensionMismatch("adjugate of an empty matrix".into()));
    }
    if n == 1 {
        return Ok(Rational::one());
    }
    let mut total = Rational::zero();
    for i in 0..n {
        for j in 0..n {
            let d = oracle_det(&m.minor(i, j))?;
            if (i + j) % 2 == 0 {
                total += &d;
            } else {
                total -= &d;
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    /// Laplace expansion along the first row; independent of elimination.
    fn det_by_expansion(m: &RationalMatrix) -> Rational {
        let n = m.rows();
        if n == 0 {
            return Rational::one();
        }
        (0..n)
            .map(|j| {
                let term = &m[(0, j)] * &det_by_expansion(&m.minor(0, j));
                if j % 2 == 0 {
                    term
                } else {
                    -term
                }
            })
            .sum()
    }

    fn pair(q: Rational) -> RationalMatrix {
        RationalMatrix::from_rows(vec![vec![Rational::one(), q.clone()], vec![q, Rational::one()]]).unwrap()
    }

    #[test]
    fn products() {
        let m = RationalMatrix::from_fn(3, 3, |i, j| rat(i as i64 + 1, j as i64 + 2));
        assert_eq!(RationalMatrix::identity(3).mul(&m).unwrap(), m);
        let j = RationalMatrix::ones(2, 3).mul(&RationalMatrix::ones(3, 2)).unwrap();
        assert_eq!(j, RationalMatrix::ones(2, 2).scale(&rat(3, 1)));
        let q = rat(1, 2);
        let p = pair(q.clone()).mul(&pair(-q)).unwrap();
        assert_eq!(p, RationalMatrix::identity(2).scale(&rat(3, 4)));
        assert!(matches!(
            RationalMatrix::ones(2, 3).mul(&RationalMatrix::ones(2, 3)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn determinants() {
        assert_eq!(oracle_det(&RationalMatrix::identity(5)).unwrap(), Rational::one());
        assert_eq!(oracle_det(&pair(rat(1, 2))).unwrap(), rat(3, 4));
        assert_eq!(oracle_det(&RationalMatrix::ones(3, 3)).unwrap(), Rational::zero());
        // needs a row swap: [[0,1],[1,0]]
        assert_eq!(oracle_det(&RationalMatrix::from_ints(&[[0, 1], [1, 0]])).unwrap(), rat(-1, 1));
        assert!(oracle_det(&RationalMatrix::ones(2, 3)).is_err());
    }

    #[test]
    fn inverses() {
        assert_eq!(oracle_inverse(&RationalMatrix::identity(4)).unwrap(), RationalMatrix::identity(4));
        let d = RationalMatrix::diagonal(&[rat(2, 1), rat(3, 1)]);
        assert_eq!(oracle_inverse(&d).unwrap(), RationalMatrix::diagonal(&[rat(1, 2), rat(1, 3)]));
        assert_eq!(oracle_inverse(&RationalMatrix::ones(2, 2)), Err(Error::SingularMatrix));
    }

    #[test]
    fn adjugate_sums() {
        assert_eq!(oracle_adjugate_sum(&pair(rat(1, 2))).unwrap(), Rational::one());
        assert_eq!(oracle_adjugate_sum(&RationalMatrix::identity(3)).unwrap(), rat(3, 1));
        // J_2 is singular; adj(J_2) = [[1,-1],[-1,1]] sums to 0
        assert_eq!(oracle_adjugate_sum(&RationalMatrix::ones(2, 2)).unwrap(), Rational::zero());
        assert_eq!(oracle_adjugate_sum(&RationalMatrix::zeros(1, 1)).unwrap(), Rational::one());
    }

    #[test]
    fn bareiss_agrees_with_laplace_expansion() {
        // deterministic pseudo-random fill with a few zeros to force pivoting
        let mut state: u64 = 0x2545_f491;
        for n in 1..=5 {
            for _ in 0..20 {
                let m = RationalMatrix::from_fn(n, n, |_, _| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    let num = ((state >> 33) % 7) as i64 - 3;
                    let den = ((state >> 40) % 4) as i64 + 1;
                    rat(num, den)
                });
                assert_eq!(oracle_det(&m).unwrap(), det_by_expansion(&m), "{m:?}");
            }
        }
    }

    #[test]
    fn blocks_and_permutations() {
        let a = RationalMatrix::from_ints(&[[1, 2], [3, 4]]);
        let b = RationalMatrix::ones(2, 1);
        let c = RationalMatrix::zeros(1, 2);
        let d = RationalMatrix::identity(1);
        let m = RationalMatrix::from_blocks(&[vec![&a, &b], vec![&c, &d]]).unwrap();
        assert_eq!(m, RationalMatrix::from_ints(&[[1, 2, 1], [3, 4, 1], [0, 0, 1]]));
        assert_eq!(m.block(0, 0, 2, 2), a);
        let p = m.permute_symmetric(&[2, 0, 1]);
        assert_eq!(p[(0, 0)], m[(2, 2)]);
        assert_eq!(p[(1, 2)], m[(0, 1)]);
        assert!(RationalMatrix::from_blocks(&[vec![&a, &c]]).is_err());
        let empty = RationalMatrix::zeros(2, 0);
        assert_eq!(RationalMatrix::from_blocks(&[vec![&a, &empty]]).unwrap(), a);
    }

    #[test]
    fn mismatch_witness() {
        let a = RationalMatrix::identity(2);
        let b = RationalMatrix::ones(2, 2);
        assert!(mat_equal(&a, &a));
        assert!(!mat_equal(&a, &b));
        assert_eq!(
            a.first_mismatch(&b),
            Some(Mismatch::Entry { row: 0, col: 1, left: Rational::zero(), right: Rational::one() })
        );
        assert!(matches!(a.first_mismatch(&RationalMatrix::identity(3)), Some(Mismatch::Shape { .. })));
    }
}
