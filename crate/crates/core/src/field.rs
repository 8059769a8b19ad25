//! Prime-field arithmetic and dense matrices over GF(p).
//!
//! Elements are stored as `u64` residues in `[0, p)`. Moduli are capped at
//! 2^31 so that a product of two residues never overflows before reduction.
//!
//! Besides the usual matrix algebra this module carries the structured
//! products used throughout the crate:
//!
//! | product                 | shapes                          |
//! |-------------------------|---------------------------------|
//! | Hadamard / star (`★`)   | `r×c`, `r×c` → `r×c`            |
//! | Kronecker (`⊗`)         | `r1×c1`, `r2×c2` → `r1r2×c1c2`  |
//! | column Khatri–Rao (`⊙`) | `r1×c`, `r2×c` → `r1r2×c`       |
//! | row Khatri–Rao (`*`)    | `r×c1`, `r×c2` → `r×c1c2`       |
//!
//! Kronecker-style indices are laid out so that block `i` of the first
//! operand spans positions `i·w .. (i+1)·w`, which is exactly the thick
//! indexing of [`ThickIndex`].

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported modulus (exclusive).
pub const MAX_MODULUS: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is outside the supported range [2, 2^31)")]
    ModulusOutOfRange(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrices are defined over different fields (p = {0} vs p = {1})")]
    FieldMismatch(u64, u64),
    #[error("linear system has no solution")]
    NoSolution,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Arithmetic context for GF(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Field {
    p: u64,
}

impl Field {
    /// Creates GF(p), rejecting composite moduli.
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if !(2..MAX_MODULUS).contains(&p) {
            return Err(FieldError::ModulusOutOfRange(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Field { p })
    }

    /// Smallest prime `>= lower` (and at least 2).
    pub fn smallest_prime_at_least(lower: u64) -> Result<Self, FieldError> {
        let mut p = lower.max(2);
        while !is_prime(p) {
            p += 1;
        }
        Field::new(p)
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, a: u64) -> u64 {
        a % self.p
    }

    #[inline]
    pub fn reduce_signed(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(&self, a: u64) -> Result<u64, FieldError> {
        let a = a % self.p;
        if a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(a, self.p - 2))
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn element(&self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.p,
            field: *self,
        }
    }
}

/// A residue tagged with its field. Mostly useful at API boundaries; the
/// matrix code works on raw residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    field: Field,
}

impl FieldElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        Ok(self.field.element(self.field.inv(self.value)?))
    }

    pub fn pow(&self, exp: u64) -> FieldElement {
        self.field.element(self.field.pow(self.value, exp))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                assert_eq!(self.field, rhs.field, "operands from different fields");
                FieldElement {
                    value: self.field.$method(self.value, rhs.value),
                    field: self.field,
                }
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            value: self.field.neg(self.value),
            field: self.field,
        }
    }
}

/// Maps server (or file) indices to the blocks of consecutive matrix columns
/// (or rows) they own. Blocks usually share one width, but a layout may
/// carry per-block widths.
///
/// Indices are 0-based: block `i` of a uniform layout with width `w` covers
/// positions `i·w .. (i+1)·w`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThickIndex {
    widths: Vec<usize>,
    offsets: Vec<usize>,
}

impl ThickIndex {
    pub fn uniform(blocks: usize, width: usize) -> Self {
        Self::from_widths(vec![width; blocks])
    }

    pub fn from_widths(widths: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(widths.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for w in &widths {
            acc += w;
            offsets.push(acc);
        }
        ThickIndex { widths, offsets }
    }

    pub fn blocks(&self) -> usize {
        self.widths.len()
    }

    pub fn width(&self, block: usize) -> usize {
        self.widths[block]
    }

    /// Total number of positions covered by all blocks.
    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn block(&self, block: usize) -> std::ops::Range<usize> {
        self.offsets[block]..self.offsets[block + 1]
    }

    /// Union of the blocks in `set`, in increasing block order.
    pub fn psi(&self, set: &[usize]) -> Vec<usize> {
        let mut sorted: Vec<usize> = set.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.into_iter().flat_map(|b| self.block(b)).collect()
    }

    /// Block owning `position`.
    pub fn owner(&self, position: usize) -> usize {
        match self.offsets.binary_search(&position) {
            Ok(mut i) => {
                // skip zero-width blocks
                while self.widths[i] == 0 {
                    i += 1;
                }
                i
            }
            Err(i) => i - 1,
        }
    }
}

/// Result of reducing a matrix to reduced row echelon form.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub reduced: FieldMatrix,
    /// Pivot column of each nonzero row, in row order.
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Dense row-major matrix over GF(p).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldMatrix(p={}, {}x{}) ", self.field.p, self.rows, self.cols)?;
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl fmt::Display for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl FieldMatrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        FieldMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, size: usize) -> Self {
        let mut m = Self::zeros(field, size, size);
        for i in 0..size {
            m.data[i * size + i] = 1 % field.p;
        }
        m
    }

    /// All-ones row vector `1_len`.
    pub fn ones_row(field: Field, len: usize) -> Self {
        Self::from_fn(field, 1, len, |_, _| 1)
    }

    pub fn from_fn(
        field: Field,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> u64,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(field.reduce(f(r, c)));
            }
        }
        FieldMatrix {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Builds a matrix from row vectors; entries are reduced mod p.
    pub fn from_rows<R: AsRef<[u64]>>(field: Field, rows: &[R]) -> Result<Self, FieldError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(FieldError::ShapeMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend(r.iter().map(|&v| field.reduce(v)));
        }
        Ok(FieldMatrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Same as [`from_rows`](Self::from_rows) but with an explicit column
    /// count, so that 0-row matrices keep their width.
    pub fn from_rows_with_cols<R: AsRef<[u64]>>(
        field: Field,
        rows: &[R],
        cols: usize,
    ) -> Result<Self, FieldError> {
        if rows.is_empty() {
            return Ok(Self::zeros(field, 0, cols));
        }
        let m = Self::from_rows(field, rows)?;
        if m.cols != cols {
            return Err(FieldError::ShapeMismatch(format!(
                "expected {cols} columns, got {}",
                m.cols
            )));
        }
        Ok(m)
    }

    pub fn row_vector(field: Field, values: &[u64]) -> Self {
        Self::from_fn(field, 1, values.len(), |_, c| values[c])
    }

    pub fn column_vector(field: Field, values: &[u64]) -> Self {
        Self::from_fn(field, values.len(), 1, |r, _| values[r])
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = self.field.reduce(v);
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.field, self.cols, self.rows, |r, c| self.get(c, r))
    }

    fn same_field(&self, other: &Self) -> Result<(), FieldError> {
        if self.field != other.field {
            Err(FieldError::FieldMismatch(self.field.p, other.field.p))
        } else {
            Ok(())
        }
    }

    fn same_shape(&self, other: &Self, what: &str) -> Result<(), FieldError> {
        self.same_field(other)?;
        if self.shape() != other.shape() {
            return Err(FieldError::ShapeMismatch(format!(
                "{what}: {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_shape(other, "add")?;
        let f = self.field;
        Ok(FieldMatrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_shape(other, "sub")?;
        let f = self.field;
        Ok(FieldMatrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.sub(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, s: u64) -> Self {
        let f = self.field;
        let s = f.reduce(s);
        FieldMatrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(a, s)).collect(),
        }
    }

    /// Ordinary matrix product.
    pub fn mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(FieldError::ShapeMismatch(format!(
                "mul: {:?} · {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d = f.add(*d, f.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    /// `self · v` for a column vector given as a slice.
    pub fn mul_vec(&self, v: &[u64]) -> Result<Vec<u64>, FieldError> {
        if v.len() != self.cols {
            return Err(FieldError::ShapeMismatch(format!(
                "mul_vec: {} columns vs vector of length {}",
                self.cols,
                v.len()
            )));
        }
        let f = self.field;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect())
    }

    /// `v · self` for a row vector given as a slice.
    pub fn vec_mul(&self, v: &[u64]) -> Result<Vec<u64>, FieldError> {
        if v.len() != self.rows {
            return Err(FieldError::ShapeMismatch(format!(
                "vec_mul: vector of length {} vs {} rows",
                v.len(),
                self.rows
            )));
        }
        let f = self.field;
        let mut out = vec![0; self.cols];
        for (r, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(self.row(r)) {
                *o = f.add(*o, f.mul(a, b));
            }
        }
        Ok(out)
    }

    /// Entry-wise (star / Hadamard) product.
    pub fn hadamard(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_shape(other, "hadamard")?;
        let f = self.field;
        Ok(FieldMatrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.mul(a, b))
                .collect(),
        })
    }

    /// Kronecker product; entry `[i1·r2 + i2, j1·c2 + j2] = A[i1,j1]·B[i2,j2]`.
    pub fn kronecker(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        let f = self.field;
        let (r2, c2) = other.shape();
        Ok(Self::from_fn(f, self.rows * r2, self.cols * c2, |r, c| {
            f.mul(self.get(r / r2, c / c2), other.get(r % r2, c % c2))
        }))
    }

    /// Column-wise Khatri–Rao product: column `j` is `A[:,j] ⊗ B[:,j]`.
    pub fn khatri_rao_col(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        if self.cols != other.cols {
            return Err(FieldError::ShapeMismatch(format!(
                "column Khatri-Rao needs equal column counts: {} vs {}",
                self.cols, other.cols
            )));
        }
        let f = self.field;
        let r2 = other.rows;
        Ok(Self::from_fn(f, self.rows * r2, self.cols, |r, c| {
            f.mul(self.get(r / r2, c), other.get(r % r2, c))
        }))
    }

    /// Row-wise Khatri–Rao (face-splitting) product: row `i` is `A[i,:] ⊗ B[i,:]`.
    pub fn khatri_rao_row(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        if self.rows != other.rows {
            return Err(FieldError::ShapeMismatch(format!(
                "row Khatri-Rao needs equal row counts: {} vs {}",
                self.rows, other.rows
            )));
        }
        let f = self.field;
        let c2 = other.cols;
        Ok(Self::from_fn(f, self.rows, self.cols * c2, |r, c| {
            f.mul(self.get(r, c / c2), other.get(r, c % c2))
        }))
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(self.field, rows.len(), self.cols, |r, c| self.get(rows[r], c))
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.field, self.rows, cols.len(), |r, c| self.get(r, cols[c]))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(self.field, rows.len(), cols.len(), |r, c| {
            self.get(rows[r], cols[c])
        })
    }

    pub fn vstack(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        if self.cols != other.cols {
            return Err(FieldError::ShapeMismatch(format!(
                "vstack: {} vs {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FieldMatrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn hstack(&self, other: &Self) -> Result<Self, FieldError> {
        self.same_field(other)?;
        if self.rows != other.rows {
            return Err(FieldError::ShapeMismatch(format!(
                "hstack: {} vs {} rows",
                self.rows, other.rows
            )));
        }
        Ok(Self::from_fn(self.field, self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self.get(r, c)
            } else {
                other.get(r, c - self.cols)
            }
        }))
    }

    /// Indices (0-based) of the nonzero columns.
    pub fn colsupp(&self) -> BTreeSet<usize> {
        (0..self.cols)
            .filter(|&c| (0..self.rows).any(|r| self.get(r, c) != 0))
            .collect()
    }

    /// Reduced row echelon form, pivoting on the first nonzero entry of each column.
    pub fn echelon(&self) -> Echelon {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(pr) = (lead..m.rows).find(|&r| m.get(r, c) != 0) else {
                continue;
            };
            m.swap_rows(pr, lead);
            let inv = f.inv(m.get(lead, c)).expect("pivot is nonzero");
            for x in &mut m.data[lead * m.cols..(lead + 1) * m.cols] {
                *x = f.mul(*x, inv);
            }
            for r in 0..m.rows {
                if r == lead {
                    continue;
                }
                let factor = m.get(r, c);
                if factor == 0 {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(r, j), f.mul(factor, m.get(lead, j)));
                    m.data[r * m.cols + j] = v;
                }
            }
            pivots.push(c);
            lead += 1;
        }
        Echelon { reduced: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    /// Basis of the row space, as the nonzero rows of the reduced echelon form.
    pub fn row_basis(&self) -> Self {
        let e = self.echelon();
        let r = e.rank();
        let rows: Vec<usize> = (0..r).collect();
        e.reduced.select_rows(&rows)
    }

    /// Null-space basis as the columns of a `cols × (cols − rank)` matrix.
    pub fn kernel(&self) -> Self {
        let f = self.field;
        let e = self.echelon();
        let pivot_set: BTreeSet<usize> = e.pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Self::zeros(f, self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            basis.set(fc, k, 1);
            for (row, &pc) in e.pivots.iter().enumerate() {
                basis.set(pc, k, f.neg(e.reduced.get(row, fc)));
            }
        }
        basis
    }

    /// Some `x` with `self · x = b`.
    pub fn solve(&self, b: &[u64]) -> Result<Vec<u64>, FieldError> {
        if b.len() != self.rows {
            return Err(FieldError::ShapeMismatch(format!(
                "solve: {} rows vs right-hand side of length {}",
                self.rows,
                b.len()
            )));
        }
        let aug = self.hstack(&Self::column_vector(self.field, b))?;
        let e = aug.echelon();
        if e.pivots.last() == Some(&self.cols) {
            return Err(FieldError::NoSolution);
        }
        let mut x = vec![0; self.cols];
        for (row, &pc) in e.pivots.iter().enumerate() {
            x[pc] = e.reduced.get(row, self.cols);
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Self, FieldError> {
        if self.rows != self.cols {
            return Err(FieldError::ShapeMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let e = self.hstack(&Self::identity(self.field, n))?.echelon();
        if e.pivots.len() < n || e.pivots[n - 1] != n - 1 {
            return Err(FieldError::NoSolution);
        }
        let rows: Vec<usize> = (0..n).collect();
        let cols: Vec<usize> = (n..2 * n).collect();
        Ok(e.reduced.submatrix(&rows, &cols))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn gf(p: u64) -> Field {
        Field::new(p).unwrap()
    }

    fn random_matrix(f: Field, rows: usize, cols: usize, rng: &mut impl Rng) -> FieldMatrix {
        FieldMatrix::from_fn(f, rows, cols, |_, _| rng.gen_range(0..f.modulus()))
    }

    #[test]
    fn field_construction() {
        assert!(Field::new(7).is_ok());
        assert!(Field::new(3).is_ok());
        assert_eq!(Field::new(6), Err(FieldError::NotPrime(6)));
        assert_eq!(Field::new(1), Err(FieldError::ModulusOutOfRange(1)));
        assert_eq!(Field::smallest_prime_at_least(8).unwrap().modulus(), 11);
    }

    #[test]
    fn inverses() {
        assert_eq!(gf(7).inv(3), Ok(5));
        assert_eq!(gf(3).inv(2), Ok(2));
        for p in [2, 3, 5, 7, 101] {
            assert_eq!(gf(p).inv(1), Ok(1));
            assert_eq!(gf(p).inv(0), Err(FieldError::DivisionByZero));
            for a in 1..p {
                assert_eq!(gf(p).mul(a, gf(p).inv(a).unwrap()), 1);
            }
        }
        let f = gf(7);
        assert_eq!(f.element(3).inv().unwrap().value(), 5);
        assert_eq!((f.element(3) * f.element(5)).value(), 1);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(FieldMatrix::identity(gf(5), 3).rank(), 3);
        assert_eq!(FieldMatrix::zeros(gf(5), 2, 4).rank(), 0);
        let q = FieldMatrix::from_rows(gf(3), &[[0, 1, 0, 2], [0, 0, 0, 0]]).unwrap();
        assert_eq!(q.rank(), 1);
        assert_eq!(q.colsupp(), BTreeSet::from([1, 3]));
    }

    #[test]
    fn colsupp_examples() {
        assert!(FieldMatrix::zeros(gf(5), 3, 3).colsupp().is_empty());
        assert_eq!(
            FieldMatrix::identity(gf(5), 3).colsupp(),
            BTreeSet::from([0, 1, 2])
        );
    }

    #[test]
    fn hadamard_with_ones_is_identity() {
        let f = gf(5);
        let a = FieldMatrix::row_vector(f, &[1, 2, 3]);
        assert_eq!(a.hadamard(&FieldMatrix::ones_row(f, 3)).unwrap(), a);
        assert!(matches!(
            a.hadamard(&FieldMatrix::ones_row(f, 2)),
            Err(FieldError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn khatri_rao_col_matches_definition() {
        let f = gf(5);
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let a = random_matrix(f, 2, 3, &mut rng);
        let b = random_matrix(f, 2, 3, &mut rng);
        let kr = a.khatri_rao_col(&b).unwrap();
        assert_eq!(kr.shape(), (4, 3));
        // hand expansion: rows ordered (a0·b0, a0·b1, a1·b0, a1·b1) per column
        for c in 0..3 {
            let expect = [
                f.mul(a.get(0, c), b.get(0, c)),
                f.mul(a.get(0, c), b.get(1, c)),
                f.mul(a.get(1, c), b.get(0, c)),
                f.mul(a.get(1, c), b.get(1, c)),
            ];
            assert_eq!(kr.column(c), expect);
        }
        assert!(a.khatri_rao_col(&random_matrix(f, 2, 2, &mut rng)).is_err());
        assert!(a.khatri_rao_row(&random_matrix(f, 3, 3, &mut rng)).is_err());
    }

    #[test]
    fn kronecker_with_ones_repeats_columns() {
        let f = gf(7);
        let g = FieldMatrix::from_rows(f, &[[1, 2], [3, 4]]).unwrap();
        let thick = g.kronecker(&FieldMatrix::ones_row(f, 3)).unwrap();
        assert_eq!(thick.to_rows(), vec![vec![1, 1, 1, 2, 2, 2], vec![3, 3, 3, 4, 4, 4]]);
    }

    #[test]
    fn solve_and_kernel() {
        let f = gf(7);
        let b = [3, 1, 4];
        assert_eq!(FieldMatrix::identity(f, 3).solve(&b).unwrap(), b);

        let ones = FieldMatrix::from_rows(gf(2), &[[1, 1, 1]]).unwrap();
        let ker = ones.kernel();
        assert_eq!(ker.shape(), (3, 2));
        // enumeration oracle: the even-weight vectors of GF(2)^3
        let mut null = BTreeSet::new();
        for v in 0..8u64 {
            let x = [v & 1, (v >> 1) & 1, (v >> 2) & 1];
            if (x[0] + x[1] + x[2]) % 2 == 0 {
                null.insert(x.to_vec());
            }
        }
        let mut spanned = BTreeSet::new();
        for c in 0..4u64 {
            let combo = [c & 1, (c >> 1) & 1];
            spanned.insert(ker.mul_vec(&combo).unwrap());
        }
        assert_eq!(null, spanned);

        let col = FieldMatrix::from_rows(f, &[[1], [1]]).unwrap();
        assert_eq!(col.solve(&[0, 1]), Err(FieldError::NoSolution));
    }

    #[test]
    fn inverse_roundtrip() {
        let f = gf(11);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = random_matrix(f, 4, 4, &mut rng);
            match m.inverse() {
                Ok(inv) => assert_eq!(m.mul(&inv).unwrap(), FieldMatrix::identity(f, 4)),
                Err(_) => assert!(m.rank() < 4),
            }
        }
    }

    #[test]
    fn thick_index() {
        let t = ThickIndex::uniform(4, 3);
        assert_eq!(t.psi(&[0]), vec![0, 1, 2]);
        assert_eq!(t.psi(&[2, 0]), vec![0, 1, 2, 6, 7, 8]);
        assert_eq!(t.total(), 12);
        assert_eq!(t.owner(7), 2);
        let uneven = ThickIndex::from_widths(vec![2, 2, 2, 1]);
        assert_eq!(uneven.psi(&[3]), vec![6]);
        assert_eq!(uneven.owner(6), 3);
        assert_eq!(uneven.total(), 7);
    }
}
