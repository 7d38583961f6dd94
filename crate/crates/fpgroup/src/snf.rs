//! Smith normal form over the integers.
//!
//! The reduction runs first on `i64` with checked arithmetic; if any
//! operation overflows it is restarted from scratch on `BigInt`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix<T = BigInt> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> IntMatrix<T> {
    pub fn from_rows(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        IntMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> IntMatrix<U> {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn row_vec(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }
}

impl IntMatrix<BigInt> {
    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Self {
        IntMatrix::from_rows(rows, cols, data.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix::from_rows(rows, cols, vec![BigInt::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        for j in 0..n {
                            a.data.swap(k * n + j, i * n + j);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }
}

/// `left * m * right = diagonal`, with `left`, `right` unimodular and the
/// diagonal entries non-negative, each dividing the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub diagonal: IntMatrix,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl SmithForm {
    /// Diagonal entries `d_0, d_1, ...` (`min(rows, cols)` of them).
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let k = self.diagonal.rows.min(self.diagonal.cols);
        (0..k).map(|i| self.diagonal.get(i, i).clone()).collect()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let small: Option<IntMatrix<i64>> = m
        .data
        .iter()
        .map(|v| v.to_i64())
        .collect::<Option<Vec<_>>>()
        .map(|d| IntMatrix::from_rows(m.rows, m.cols, d));
    if let Some(small) = small {
        if let Some((d, l, r)) = reduce(small, true) {
            let conv = |x: IntMatrix<i64>| x.map(|&v| BigInt::from(v));
            return SmithForm { diagonal: conv(d), left: conv(l.unwrap()), right: conv(r.unwrap()) };
        }
    }
    let (d, l, r) = reduce(m.clone(), true).expect("BigInt arithmetic cannot overflow");
    SmithForm { diagonal: d, left: l.unwrap(), right: r.unwrap() }
}

/// Invariant factors only, skipping the transforms.
pub fn diagonal_only(m: &IntMatrix) -> Vec<BigInt> {
    let k = m.rows.min(m.cols);
    let small: Option<Vec<i64>> = m.data.iter().map(|v| v.to_i64()).collect();
    if let Some(data) = small {
        if let Some((d, _, _)) = reduce(IntMatrix::from_rows(m.rows, m.cols, data), false) {
            return (0..k).map(|i| BigInt::from(*d.get(i, i))).collect();
        }
    }
    let (d, _, _) = reduce(m.clone(), false).expect("BigInt arithmetic cannot overflow");
    (0..k).map(|i| d.get(i, i).clone()).collect()
}

/// Integer arithmetic with explicit overflow reporting.
trait Scalar: Clone + PartialEq {
    fn sc_zero() -> Self;
    fn sc_one() -> Self;
    fn sc_is_zero(&self) -> bool;
    fn abs_lt(&self, other: &Self) -> bool;
    fn sc_is_negative(&self) -> bool;
    fn sc_neg(&self) -> Option<Self>;
    /// Floor-free quotient `self div other` truncated toward zero.
    fn quot(&self, other: &Self) -> Option<Self>;
    fn sc_divides(&self, other: &Self) -> bool;
    /// `self - q * other`
    fn sub_mul(&self, q: &Self, other: &Self) -> Option<Self>;
}

impl Scalar for i64 {
    fn sc_zero() -> Self {
        0
    }
    fn sc_one() -> Self {
        1
    }
    fn sc_is_zero(&self) -> bool {
        *self == 0
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn sc_is_negative(&self) -> bool {
        *self < 0
    }
    fn sc_neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn quot(&self, other: &Self) -> Option<Self> {
        self.checked_div(*other)
    }
    fn sc_divides(&self, other: &Self) -> bool {
        *other != 0 && self.checked_rem(*other) == Some(0)
    }
    fn sub_mul(&self, q: &Self, other: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*other)?)
    }
}

impl Scalar for BigInt {
    fn sc_zero() -> Self {
        Zero::zero()
    }
    fn sc_one() -> Self {
        One::one()
    }
    fn sc_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.abs() < other.abs()
    }
    fn sc_is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn sc_neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn quot(&self, other: &Self) -> Option<Self> {
        Some(self / other)
    }
    fn sc_divides(&self, other: &Self) -> bool {
        !Zero::is_zero(other) && Integer::is_multiple_of(self, other)
    }
    fn sub_mul(&self, q: &Self, other: &Self) -> Option<Self> {
        Some(self - q * other)
    }
}

type Reduced<T> = (IntMatrix<T>, Option<IntMatrix<T>>, Option<IntMatrix<T>>);

fn identity<T: Scalar>(n: usize) -> IntMatrix<T> {
    let mut m = IntMatrix::from_rows(n, n, vec![T::sc_zero(); n * n]);
    for i in 0..n {
        m.set(i, i, T::sc_one());
    }
    m
}

fn swap_rows<T: Scalar>(m: &mut IntMatrix<T>, a: usize, b: usize) {
    if a != b {
        for j in 0..m.cols {
            m.data.swap(a * m.cols + j, b * m.cols + j);
        }
    }
}

fn swap_cols<T: Scalar>(m: &mut IntMatrix<T>, a: usize, b: usize) {
    if a != b {
        for i in 0..m.rows {
            m.data.swap(i * m.cols + a, i * m.cols + b);
        }
    }
}

/// row[target] -= q * row[src]
fn row_sub<T: Scalar>(m: &mut IntMatrix<T>, target: usize, src: usize, q: &T) -> Option<()> {
    for j in 0..m.cols {
        let s = m.get(src, j).clone();
        if s.sc_is_zero() {
            continue;
        }
        let v = m.get(target, j).sub_mul(q, &s)?;
        m.set(target, j, v);
    }
    Some(())
}

fn col_sub<T: Scalar>(m: &mut IntMatrix<T>, target: usize, src: usize, q: &T) -> Option<()> {
    for i in 0..m.rows {
        let s = m.get(i, src).clone();
        if s.sc_is_zero() {
            continue;
        }
        let v = m.get(i, target).sub_mul(q, &s)?;
        m.set(i, target, v);
    }
    Some(())
}

fn negate_row<T: Scalar>(m: &mut IntMatrix<T>, r: usize) -> Option<()> {
    for j in 0..m.cols {
        let v = m.get(r, j).sc_neg()?;
        m.set(r, j, v);
    }
    Some(())
}

fn reduce<T: Scalar>(mut a: IntMatrix<T>, track: bool) -> Option<Reduced<T>> {
    let (rows, cols) = (a.rows, a.cols);
    let mut left = track.then(|| identity::<T>(rows));
    let mut right = track.then(|| identity::<T>(cols));
    let k = rows.min(cols);

    for t in 0..k {
        loop {
            // Smallest non-zero entry of the trailing block becomes the pivot.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let v = a.get(i, j);
                    if !v.sc_is_zero() && best.is_none_or(|(bi, bj)| v.abs_lt(a.get(bi, bj))) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(a, left, right);
            };
            swap_rows(&mut a, t, pi);
            swap_cols(&mut a, t, pj);
            if let Some(l) = left.as_mut() {
                swap_rows(l, t, pi);
            }
            if let Some(r) = right.as_mut() {
                swap_cols(r, t, pj);
            }

            let pivot = a.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..rows {
                let v = a.get(i, t).clone();
                if v.sc_is_zero() {
                    continue;
                }
                let q = v.quot(&pivot)?;
                row_sub(&mut a, i, t, &q)?;
                if let Some(l) = left.as_mut() {
                    row_sub(l, i, t, &q)?;
                }
                if !a.get(i, t).sc_is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let v = a.get(t, j).clone();
                if v.sc_is_zero() {
                    continue;
                }
                let q = v.quot(&pivot)?;
                col_sub(&mut a, j, t, &q)?;
                if let Some(r) = right.as_mut() {
                    col_sub(r, j, t, &q)?;
                }
                if !a.get(t, j).sc_is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Divisibility: fold a row carrying a non-multiple into row t.
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !a.get(i, j).sc_divides(&pivot)));
            match offender {
                Some(i) => {
                    let minus_one = T::sc_one().sc_neg()?;
                    row_sub(&mut a, t, i, &minus_one)?;
                    if let Some(l) = left.as_mut() {
                        row_sub(l, t, i, &minus_one)?;
                    }
                }
                None => break,
            }
        }
        if a.get(t, t).sc_is_negative() {
            negate_row(&mut a, t)?;
            if let Some(l) = left.as_mut() {
                negate_row(l, t)?;
            }
        }
    }
    finish(a, left, right)
}

fn finish<T: Scalar>(
    a: IntMatrix<T>,
    left: Option<IntMatrix<T>>,
    right: Option<IntMatrix<T>>,
) -> Option<Reduced<T>> {
    Some((a, left, right))
}
