//! Integer linear algebra: Smith normal form with transforms, integer
//! solvability, quotient invariants and lattice saturation.
//!
//! Small matrices run on checked `i64` arithmetic and fall back to `BigInt`
//! on overflow.

use std::fmt;

use num::bigint::BigInt;
use num::integer::Integer;
use num::{One, Signed, ToPrimitive, Zero};

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flat_map(|row| row.iter().cloned().map(Into::into)).collect(),
        }
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, v) in col.iter().enumerate() {
                m.data[i * m.cols + j] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    out.data[i * o.cols + j] += a * o.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, x.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &x[j]).sum())
            .collect()
    }

    /// Determinant by fraction-free elimination. Square matrices only.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k * n + k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[i * n + k].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j]) / &prev;
                    a[i * n + j] = v;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * &a[n * n - 1]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let r: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
                format!("[{}]", r.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal with
/// `d_1 | d_2 | ...`, all nonnegative, zeros last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SNFResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SNFResult {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

trait Int: Clone + PartialEq + fmt::Debug {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn abs_lt(&self, o: &Self) -> bool;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    /// Truncated quotient and remainder.
    fn div_rem(&self, o: &Self) -> Option<(Self, Self)>;
}

impl Int for i64 {
    fn nil() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn abs_lt(&self, o: &Self) -> bool {
        self.unsigned_abs() < o.unsigned_abs()
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn div_rem(&self, o: &Self) -> Option<(Self, Self)> {
        Some((self.checked_div(*o)?, self.checked_rem(*o)?))
    }
}

impl Int for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn abs_lt(&self, o: &Self) -> bool {
        self.magnitude() < o.magnitude()
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn div_rem(&self, o: &Self) -> Option<(Self, Self)> {
        Some(Integer::div_rem(self, o))
    }
}

struct Mat<T> {
    r: usize,
    c: usize,
    a: Vec<T>,
}

impl<T: Int> Mat<T> {
    fn identity(n: usize) -> Self {
        let mut a = vec![T::nil(); n * n];
        for i in 0..n {
            a[i * n + i] = T::unit();
        }
        Mat { r: n, c: n, a }
    }

    fn at(&self, i: usize, j: usize) -> &T {
        &self.a[i * self.c + j]
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        if i != k {
            for j in 0..self.c {
                self.a.swap(i * self.c + j, k * self.c + j);
            }
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        if j != k {
            for i in 0..self.r {
                self.a.swap(i * self.c + j, i * self.c + k);
            }
        }
    }

    /// `row_i -= q * row_k`.
    fn row_axpy(&mut self, i: usize, k: usize, q: &T) -> Option<()> {
        for j in 0..self.c {
            let t = self.at(k, j).mul(q)?;
            let v = self.at(i, j).sub(&t)?;
            self.a[i * self.c + j] = v;
        }
        Some(())
    }

    /// `col_j -= q * col_k`.
    fn col_axpy(&mut self, j: usize, k: usize, q: &T) -> Option<()> {
        for i in 0..self.r {
            let t = self.at(i, k).mul(q)?;
            let v = self.at(i, j).sub(&t)?;
            self.a[i * self.c + j] = v;
        }
        Some(())
    }

    fn negate_row(&mut self, i: usize) -> Option<()> {
        for j in 0..self.c {
            let v = self.at(i, j).neg()?;
            self.a[i * self.c + j] = v;
        }
        Some(())
    }
}

/// Smallest nonzero entry by absolute value among `(i, j)` with `i, j >= t`
/// accepted by `keep`, ties broken by row-major position.
fn pivot<T: Int>(m: &Mat<T>, t: usize, keep: impl Fn(usize, usize) -> bool) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..m.r {
        for j in t..m.c {
            let x = m.at(i, j);
            if x.is_nil() || !keep(i, j) {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs_lt(m.at(bi, bj))) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn snf_generic<T: Int>(mut a: Mat<T>) -> Option<(Mat<T>, Mat<T>, Mat<T>)> {
    let mut u = Mat::<T>::identity(a.r);
    let mut v = Mat::<T>::identity(a.c);
    let steps = a.r.min(a.c);
    for t in 0..steps {
        let Some((pi, pj)) = pivot(&a, t, |_, _| true) else {
            break;
        };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..a.r {
                if a.at(i, t).is_nil() {
                    continue;
                }
                let (q, r) = a.at(i, t).div_rem(a.at(t, t))?;
                a.row_axpy(i, t, &q)?;
                u.row_axpy(i, t, &q)?;
                clean &= r.is_nil();
            }
            for j in t + 1..a.c {
                if a.at(t, j).is_nil() {
                    continue;
                }
                let (q, r) = a.at(t, j).div_rem(a.at(t, t))?;
                a.col_axpy(j, t, &q)?;
                v.col_axpy(j, t, &q)?;
                clean &= r.is_nil();
            }
            if !clean {
                let (pi, pj) = pivot(&a, t, |i, j| i == t || j == t).expect("pivot row or column is nonzero");
                a.swap_rows(t, pi);
                u.swap_rows(t, pi);
                a.swap_cols(t, pj);
                v.swap_cols(t, pj);
                continue;
            }
            let bad = (t + 1..a.r).find(|&i| {
                (t + 1..a.c).any(|j| !a.at(i, j).div_rem(a.at(t, t)).is_none_or(|(_, r)| r.is_nil()))
            });
            match bad {
                Some(i) => {
                    let minus_one = T::unit().neg()?;
                    a.row_axpy(t, i, &minus_one)?;
                    u.row_axpy(t, i, &minus_one)?;
                }
                None => break,
            }
        }
        if a.at(t, t).is_neg() {
            a.negate_row(t)?;
            u.negate_row(t)?;
        }
    }
    Some((u, a, v))
}

fn to_small(m: &IntMatrix) -> Option<Mat<i64>> {
    let a = m.data.iter().map(|x| x.to_i64()).collect::<Option<Vec<i64>>>()?;
    Some(Mat { r: m.rows, c: m.cols, a })
}

fn from_mat<T: Int + Into<BigInt>>(m: Mat<T>) -> IntMatrix {
    IntMatrix {
        rows: m.r,
        cols: m.c,
        data: m.a.into_iter().map(Into::into).collect(),
    }
}

/// Smith normal form. The result is verified (`U A V = D`, unimodularity,
/// divisibility chain) before returning.
pub fn snf(a: &IntMatrix) -> SNFResult {
    let result = match to_small(a).and_then(snf_generic) {
        Some((u, d, v)) => SNFResult {
            u: from_mat(u),
            d: from_mat(d),
            v: from_mat(v),
        },
        None => {
            let big = Mat {
                r: a.rows,
                c: a.cols,
                a: a.data.clone(),
            };
            let (u, d, v) = snf_generic(big).expect("bigint arithmetic does not overflow");
            SNFResult {
                u: from_mat(u),
                d: from_mat(d),
                v: from_mat(v),
            }
        }
    };
    verify(a, &result);
    result
}

fn verify(a: &IntMatrix, s: &SNFResult) {
    assert_eq!(s.u.mul(a).mul(&s.v), s.d, "U*A*V != D");
    assert!(s.u.det().abs().is_one(), "U not unimodular");
    assert!(s.v.det().abs().is_one(), "V not unimodular");
    for i in 0..s.d.rows {
        for j in 0..s.d.cols {
            assert!(i == j || s.d.get(i, j).is_zero(), "D not diagonal");
        }
    }
    let diag = s.diagonal();
    for w in diag.windows(2) {
        assert!(!w[0].is_negative(), "negative invariant factor");
        if w[0].is_zero() {
            assert!(w[1].is_zero(), "zero before nonzero invariant factor");
        } else {
            assert!((&w[1] % &w[0]).is_zero(), "divisibility chain broken");
        }
    }
}

/// Some integer `x` with `A x = b`, or `None` when no integer solution exists.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows, b.len(), "dimension mismatch");
    let s = snf(a);
    let c = s.u.mul_vec(b);
    let diag = s.diagonal();
    let mut y = vec![BigInt::zero(); a.cols];
    for (i, ci) in c.iter().enumerate() {
        match diag.get(i).filter(|d| !d.is_zero()) {
            Some(d) => {
                if !(ci % d).is_zero() {
                    return None;
                }
                y[i] = ci / d;
            }
            None if !ci.is_zero() => return None,
            None => {}
        }
    }
    let x = s.v.mul_vec(&y);
    debug_assert_eq!(a.mul_vec(&x), b);
    Some(x)
}

/// Invariant factors of `Z^rank / (column span of gens)`: one entry per
/// ambient coordinate, ascending, with `0` for each free summand (last).
pub fn quotient_invariants(ambient_rank: usize, gens: &IntMatrix) -> Vec<BigInt> {
    assert_eq!(gens.rows, ambient_rank, "generators need ambient_rank rows");
    let diag = snf(gens).diagonal();
    let mut out: Vec<BigInt> = diag.into_iter().filter(|d| !d.is_zero()).collect();
    out.resize(ambient_rank, BigInt::zero());
    out
}

/// Whether the quotient by the column span is torsion-free.
pub fn is_saturated(ambient_rank: usize, gens: &IntMatrix) -> bool {
    quotient_invariants(ambient_rank, gens)
        .iter()
        .all(|d| d.is_zero() || d.is_one())
}

/// A basis of `{x : A x = 0}`, as columns.
pub fn kernel(a: &IntMatrix) -> IntMatrix {
    let s = snf(a);
    let r = s.rank();
    let cols: Vec<Vec<BigInt>> = (r..a.cols).map(|j| s.v.column(j)).collect();
    IntMatrix::from_columns(a.cols, &cols)
}

/// Human form of a finitely generated abelian group from its invariant
/// factors, e.g. `Z + Z/2`, or `0`.
pub fn describe_group(invariants: &[BigInt]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let free = invariants.iter().filter(|d| d.is_zero()).count();
    for _ in 0..free {
        parts.push("Z".into());
    }
    for d in invariants.iter().filter(|d| !d.is_zero() && !d.is_one()) {
        parts.push(format!("Z/{d}"));
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}
