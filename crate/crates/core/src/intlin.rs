//! Exact integer matrices: Smith and Hermite normal forms and linear
//! Diophantine solving over arbitrary-precision integers.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dimension mismatch between operands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeError {
    pub op: &'static str,
    pub detail: String,
}

impl ShapeError {
    pub fn new(op: &'static str, detail: impl Into<String>) -> Self {
        ShapeError {
            op,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for ShapeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.op, self.detail)
    }
}

impl core::error::Error for ShapeError {}

/// Dense row-major matrix of big integers.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
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

    pub fn try_from_vec(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self, ShapeError> {
        if data.len() != rows * cols {
            return Err(ShapeError::new(
                "IntMatrix",
                format!(
                    "{} entries given for a {}x{} matrix",
                    data.len(),
                    rows,
                    cols
                ),
            ));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        Self::try_from_vec(rows, cols, data).expect("entry count must equal rows * cols")
    }

    /// Builds a matrix from rows; an empty row list gives a 0x0 matrix.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows_with_cols(cols, rows)
    }

    /// Like [`from_rows`](Self::from_rows) but with an explicit column count,
    /// so that `0 x n` and `n x 0` matrices can be expressed.
    pub fn from_rows_with_cols<T: Into<BigInt> + Clone>(cols: usize, rows: &[Vec<T>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().cloned().map(Into::into));
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn column<T: Into<BigInt> + Clone>(entries: &[T]) -> Self {
        IntMatrix {
            rows: entries.len(),
            cols: 1,
            data: entries.iter().cloned().map(Into::into).collect(),
        }
    }

    pub fn diagonal<T: Into<BigInt> + Clone>(entries: &[T]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone().into();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: impl Into<BigInt>) {
        self.data[i * self.cols + j] = v.into();
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn col_matrix(&self, j: usize) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: 1,
            data: self.col(j),
        }
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn checked_mul(&self, rhs: &IntMatrix) -> Result<IntMatrix, ShapeError> {
        if self.cols != rhs.rows {
            return Err(ShapeError::new(
                "mul",
                format!(
                    "{}x{} times {}x{}",
                    self.rows, self.cols, rhs.rows, rhs.cols
                ),
            ));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    fn zip_with(
        &self,
        rhs: &IntMatrix,
        op: &'static str,
        f: impl Fn(&BigInt, &BigInt) -> BigInt,
    ) -> Result<IntMatrix, ShapeError> {
        if self.shape() != rhs.shape() {
            return Err(ShapeError::new(
                op,
                format!("{}x{} vs {}x{}", self.rows, self.cols, rhs.rows, rhs.cols),
            ));
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn checked_add(&self, rhs: &IntMatrix) -> Result<IntMatrix, ShapeError> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn checked_sub(&self, rhs: &IntMatrix) -> Result<IntMatrix, ShapeError> {
        self.zip_with(rhs, "sub", |a, b| a - b)
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * k).collect(),
        }
    }

    /// Side-by-side concatenation; all parts must share the row count.
    pub fn hstack(rows: usize, parts: &[&IntMatrix]) -> IntMatrix {
        let cols: usize = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "hstack row mismatch");
            out.paste(0, c0, p);
            c0 += p.cols;
        }
        out
    }

    /// Vertical concatenation; all parts must share the column count.
    pub fn vstack(cols: usize, parts: &[&IntMatrix]) -> IntMatrix {
        let rows: usize = parts.iter().map(|p| p.rows).sum();
        let mut out = Self::zeros(rows, cols);
        let mut r0 = 0;
        for p in parts {
            assert_eq!(p.cols, cols, "vstack column mismatch");
            out.paste(r0, 0, p);
            r0 += p.rows;
        }
        out
    }

    /// Block-diagonal sum.
    pub fn block_diag(parts: &[&IntMatrix]) -> IntMatrix {
        let rows = parts.iter().map(|p| p.rows).sum();
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for p in parts {
            out.paste(r0, c0, p);
            r0 += p.rows;
            c0 += p.cols;
        }
        out
    }

    /// Overwrites the block starting at `(r0, c0)` with `m`.
    pub fn paste(&mut self, r0: usize, c0: usize, m: &IntMatrix) {
        for i in 0..m.rows {
            for j in 0..m.cols {
                self.data[(r0 + i) * self.cols + c0 + j] = m.get(i, j).clone();
            }
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        IntMatrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> IntMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.rows);
        for i in 0..self.rows {
            for &j in idx {
                data.push(self.get(i, j).clone());
            }
        }
        IntMatrix {
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }

    pub fn submatrix(
        &self,
        rows: core::ops::Range<usize>,
        cols: core::ops::Range<usize>,
    ) -> IntMatrix {
        let r: Vec<usize> = rows.collect();
        let c: Vec<usize> = cols.collect();
        self.select_rows(&r).select_cols(&c)
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &IntMatrix) -> IntMatrix {
        let mut out = Self::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out.set(i * rhs.rows + k, j * rhs.cols + l, a * rhs.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Column-major flattening into a single column.
    pub fn vec_columns(&self) -> IntMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        IntMatrix {
            rows: self.data.len(),
            cols: 1,
            data,
        }
    }

    /// Inverse of [`vec_columns`](Self::vec_columns).
    pub fn from_column_major(rows: usize, cols: usize, v: &[BigInt]) -> IntMatrix {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.data[i * cols + j] = v[j * rows + i].clone();
            }
        }
        m
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Option<BigInt> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a.get(i, k).is_zero()) else {
                    return Some(BigInt::zero());
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        Some(sign * a.get(n - 1, n - 1))
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(ToPrimitive::to_i64).collect())
            .collect()
    }

    /// Largest absolute entry (zero for empty matrices).
    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(|a| a.abs()).max().unwrap_or_default()
    }

    pub(crate) fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    pub(crate) fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// `row[t] += k * row[s]`
    pub(crate) fn add_row_multiple(&mut self, t: usize, s: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = &self.data[s * self.cols + c] * k;
            self.data[t * self.cols + c] += v;
        }
    }

    /// `col[t] += k * col[s]`
    pub(crate) fn add_col_multiple(&mut self, t: usize, s: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = &self.data[r * self.cols + s] * k;
            self.data[r * self.cols + t] += v;
        }
    }

    pub(crate) fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let e = &mut self.data[i * self.cols + c];
            *e = -core::mem::take(e);
        }
    }

    pub(crate) fn negate_col(&mut self, j: usize) {
        for r in 0..self.rows {
            let e = &mut self.data[r * self.cols + j];
            *e = -core::mem::take(e);
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, e) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix({}x{} {})", self.rows, self.cols, self)
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_mul(rhs)
            .expect("matrix product shape mismatch")
    }
}

impl Add for &IntMatrix {
    type Output = IntMatrix;
    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &IntMatrix {
    type Output = IntMatrix;
    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_sub(rhs)
            .expect("matrix difference shape mismatch")
    }
}

impl Neg for &IntMatrix {
    type Output = IntMatrix;
    fn neg(self) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

/// `u * source * v == s`, with `u`, `v` unimodular and `s` in Smith form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub source: IntMatrix,
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithDecomposition {
    /// Diagonal of `s`, length `min(rows, cols)`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let k = self.s.rows().min(self.s.cols());
        (0..k).map(|i| self.s.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors()
            .iter()
            .take_while(|d| !d.is_zero())
            .count()
    }
}

struct SmithState {
    s: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl SmithState {
    fn row_add(&mut self, t: usize, s: usize, k: &BigInt) {
        self.s.add_row_multiple(t, s, k);
        self.u.add_row_multiple(t, s, k);
        self.u_inv.add_col_multiple(s, t, &-k);
    }

    fn col_add(&mut self, t: usize, s: usize, k: &BigInt) {
        self.s.add_col_multiple(t, s, k);
        self.v.add_col_multiple(t, s, k);
        self.v_inv.add_row_multiple(s, t, &-k);
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        self.s.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        self.s.swap_cols(i, j);
        self.v.swap_cols(i, j);
        self.v_inv.swap_rows(i, j);
    }

    fn row_negate(&mut self, i: usize) {
        self.s.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    /// Position of a nonzero entry of least magnitude in the lower-right block.
    fn min_nonzero(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.s.rows() {
            for j in t..self.s.cols() {
                let e = self.s.get(i, j);
                if e.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| e.magnitude() < self.s.get(bi, bj).magnitude()) {
                    best = Some((i, j));
                    if e.magnitude().is_one() {
                        return best;
                    }
                }
            }
        }
        best
    }
}

/// Smith normal form with transforms. Invariant factors are nonnegative,
/// each divides the next nonzero one, and zeros come last.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = m.shape();
    let mut st = SmithState {
        s: m.clone(),
        u: IntMatrix::identity(rows),
        u_inv: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
        v_inv: IntMatrix::identity(cols),
    };
    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = st.min_nonzero(t) else {
            break;
        };
        st.row_swap(t, pi);
        st.col_swap(t, pj);
        loop {
            let pivot = st.s.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..rows {
                if st.s.get(i, t).is_zero() {
                    continue;
                }
                let q = st.s.get(i, t) / &pivot;
                st.row_add(i, t, &-q);
                clean &= st.s.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                if st.s.get(t, j).is_zero() {
                    continue;
                }
                let q = st.s.get(t, j) / &pivot;
                st.col_add(j, t, &-q);
                clean &= st.s.get(t, j).is_zero();
            }
            if !clean {
                // A remainder survived; move the smallest one onto the pivot.
                let mut best = (t, t);
                for i in t + 1..rows {
                    let e = st.s.get(i, t);
                    if !e.is_zero() && e.magnitude() < st.s.get(best.0, best.1).magnitude() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    let e = st.s.get(t, j);
                    if !e.is_zero() && e.magnitude() < st.s.get(best.0, best.1).magnitude() {
                        best = (t, j);
                    }
                }
                st.row_swap(t, best.0);
                st.col_swap(t, best.1);
                continue;
            }
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !st.s.get(i, j).is_multiple_of(&pivot));
            match offender {
                Some((i, _)) => st.row_add(t, i, &BigInt::one()),
                None => break,
            }
        }
        if st.s.get(t, t).is_negative() {
            st.row_negate(t);
        }
    }
    SmithDecomposition {
        source: m.clone(),
        u: st.u,
        s: st.s,
        v: st.v,
        u_inv: st.u_inv,
        v_inv: st.v_inv,
    }
}

/// Column-style Hermite normal form: a lower-triangular echelon basis of the
/// column lattice, positive pivots, entries left of each pivot reduced into
/// `[0, pivot)`. Trailing columns are zero; the shape is preserved.
pub fn hermite_normal_form(m: &IntMatrix) -> IntMatrix {
    let (rows, cols) = m.shape();
    let mut h = m.clone();
    let mut pc = 0;
    for row in 0..rows {
        if pc == cols {
            break;
        }
        loop {
            let pick = (pc..cols)
                .filter(|&j| !h.get(row, j).is_zero())
                .min_by(|&a, &b| h.get(row, a).magnitude().cmp(h.get(row, b).magnitude()));
            let Some(j) = pick else { break };
            h.swap_cols(pc, j);
            let pivot = h.get(row, pc).clone();
            let mut clean = true;
            for k in pc + 1..cols {
                if h.get(row, k).is_zero() {
                    continue;
                }
                let q = h.get(row, k) / &pivot;
                h.add_col_multiple(k, pc, &-q);
                clean &= h.get(row, k).is_zero();
            }
            if clean {
                break;
            }
        }
        if h.get(row, pc).is_zero() {
            continue;
        }
        if h.get(row, pc).is_negative() {
            h.negate_col(pc);
        }
        let pivot = h.get(row, pc).clone();
        for k in 0..pc {
            let q = h.get(row, k).div_floor(&pivot);
            h.add_col_multiple(k, pc, &-q);
        }
        pc += 1;
    }
    h
}

/// The nonzero columns of the Hermite normal form: a basis of the column lattice.
pub fn lattice_basis(m: &IntMatrix) -> IntMatrix {
    let h = hermite_normal_form(m);
    let keep: Vec<usize> = (0..h.cols())
        .filter(|&j| (0..h.rows()).any(|i| !h.get(i, j).is_zero()))
        .collect();
    h.select_cols(&keep)
}

/// Particular solution and homogeneous lattice basis of `a * x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSolution {
    pub particular: IntMatrix,
    pub homogeneous: IntMatrix,
}

/// Witness that `a * x = b` has no integer solution.
///
/// `multiplier * a` is divisible by `modulus` entrywise (identically zero
/// when `modulus` is 0) while `multiplier * b[:, column]` equals `residue`,
/// which is not. Row `row` of the Smith transform is where this shows up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfeasibilityCertificate {
    pub row: usize,
    pub column: usize,
    pub modulus: BigInt,
    pub residue: BigInt,
    pub multiplier: Vec<BigInt>,
}

impl InfeasibilityCertificate {
    /// Re-checks the certificate against the original system.
    pub fn verify(&self, a: &IntMatrix, b: &IntMatrix) -> bool {
        if self.multiplier.len() != a.rows() || a.rows() != b.rows() || self.column >= b.cols() {
            return false;
        }
        let dot = |j: usize, m: &IntMatrix| -> BigInt {
            self.multiplier
                .iter()
                .enumerate()
                .map(|(i, u)| u * m.get(i, j))
                .sum()
        };
        let divides = |x: &BigInt| {
            if self.modulus.is_zero() {
                x.is_zero()
            } else {
                x.is_multiple_of(&self.modulus)
            }
        };
        let lhs_ok = (0..a.cols()).all(|j| divides(&dot(j, a)));
        let rhs = dot(self.column, b);
        lhs_ok && rhs == self.residue && !divides(&rhs)
    }
}

impl fmt::Display for InfeasibilityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "row {} of the Smith transform: coefficient {} cannot produce {} (right-hand column {})",
            self.row, self.modulus, self.residue, self.column
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearOutcome {
    Solution(LinearSolution),
    Infeasible(InfeasibilityCertificate),
}

impl LinearOutcome {
    pub fn solution(self) -> Option<LinearSolution> {
        match self {
            LinearOutcome::Solution(s) => Some(s),
            LinearOutcome::Infeasible(_) => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, LinearOutcome::Solution(_))
    }
}

/// Solves `a * x = b` over the integers.
pub fn solve_linear(a: &IntMatrix, b: &IntMatrix) -> Result<LinearOutcome, ShapeError> {
    if a.rows() != b.rows() {
        return Err(ShapeError::new(
            "solve_linear",
            format!(
                "coefficient matrix has {} rows, right-hand side {}",
                a.rows(),
                b.rows()
            ),
        ));
    }
    let snf = smith_normal_form(a);
    Ok(solve_with(&snf, b))
}

/// Solves `a * x = b` reusing a precomputed decomposition of `a`.
pub fn solve_with(snf: &SmithDecomposition, b: &IntMatrix) -> LinearOutcome {
    let a = &snf.source;
    let (m, n) = a.shape();
    let c = &snf.u * b;
    let d = snf.invariant_factors();
    let rank = snf.rank();
    let mut y = IntMatrix::zeros(n, b.cols());
    for j in 0..b.cols() {
        for i in 0..m {
            let cij = c.get(i, j);
            let modulus = if i < rank {
                d[i].clone()
            } else {
                BigInt::zero()
            };
            let ok = if modulus.is_zero() {
                cij.is_zero()
            } else {
                cij.is_multiple_of(&modulus)
            };
            if !ok {
                return LinearOutcome::Infeasible(InfeasibilityCertificate {
                    row: i,
                    column: j,
                    modulus,
                    residue: cij.clone(),
                    multiplier: snf.u.row(i).to_vec(),
                });
            }
            if i < rank {
                y.set(i, j, cij / &modulus);
            }
        }
    }
    let free: Vec<usize> = (rank..n).collect();
    LinearOutcome::Solution(LinearSolution {
        particular: &snf.v * &y,
        homogeneous: snf.v.select_cols(&free),
    })
}

/// Basis of the integer solutions of `a * x = 0`.
pub fn nullspace(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let free: Vec<usize> = (snf.rank()..a.cols()).collect();
    snf.v.select_cols(&free)
}

/// Whether every column of `v` lies in the column lattice of `m`.
pub fn in_column_span(m: &IntMatrix, v: &IntMatrix) -> bool {
    solve_linear(m, v).map(|o| o.is_feasible()).unwrap_or(false)
}
