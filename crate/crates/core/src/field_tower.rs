//! Exact scalar arithmetic over GF(p), GF(p^k) and Q, plus dense linear algebra.
//!
//! Every elimination uses leftmost pivots and picks the first nonzero row,
//! so results are reproducible for a fixed entry order.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("matrix is singular")]
    Singular,
}

/// A field with explicit element values; the field value carries runtime parameters.
pub trait Field: Clone + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_i64(&self, n: i64) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }
}

/// The prime field GF(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u32,
}

impl Fp {
    /// Panics unless `p` is prime and below 2^16.
    pub fn new(p: u32) -> Self {
        assert!(is_prime(p) && p < (1 << 16), "{p} is not a prime below 2^16");
        Fp { p }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn addv(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn subv(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn mulv(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn negv(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn invv(&self, a: u32) -> Option<u32> {
        if a.is_multiple_of(self.p) {
            return None;
        }
        Some(self.powv(a, self.p - 2))
    }

    pub fn powv(&self, a: u32, mut e: u32) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mulv(acc, base);
            }
            base = self.mulv(base, base);
            e >>= 1;
        }
        acc
    }

    /// Maps an integer into the field.
    pub fn reduce(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    /// Symmetric representative in (-p/2, p/2], for display.
    pub fn signed(&self, a: u32) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

impl Field for Fp {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        self.addv(*a, *b)
    }
    fn neg(&self, a: &u32) -> u32 {
        self.negv(*a)
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.mulv(*a, *b)
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        self.invv(*a)
    }
    fn from_i64(&self, n: i64) -> u32 {
        self.reduce(n)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Fixed monic irreducible polynomial of degree `k` over GF(p), low coefficient first.
///
/// The choice is the first irreducible `x^k + c_{k-1}x^{k-1} + ... + c_0` when the
/// coefficient vector is read as the integer `c_0 + c_1 p + ...`. For `k <= 3`,
/// irreducibility is the absence of roots.
pub fn irreducible_poly(p: u32, k: usize) -> Vec<u32> {
    assert!((1..=3).contains(&k), "extension degree must be 1, 2 or 3");
    let f = Fp::new(p);
    if k == 1 {
        return vec![0, 1];
    }
    let total = (p as u64).pow(k as u32);
    for code in 0..total {
        let mut coeffs = Vec::with_capacity(k + 1);
        let mut c = code;
        for _ in 0..k {
            coeffs.push((c % p as u64) as u32);
            c /= p as u64;
        }
        coeffs.push(1);
        let has_root = (0..p).any(|x| eval_poly(&f, &coeffs, x) == 0);
        if !has_root {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn eval_poly(f: &Fp, coeffs: &[u32], x: u32) -> u32 {
    coeffs
        .iter()
        .rev()
        .fold(0, |acc, &c| f.addv(f.mulv(acc, x), c))
}

/// Element of GF(p^k) in the power basis 1, θ, θ², stored low first; unused slots are 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GfElem(pub [u32; 3]);

/// The extension GF(p^k) = GF(p)[θ]/(f) for the fixed polynomial f.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtField {
    base: Fp,
    k: usize,
    modulus: Vec<u32>,
}

impl ExtField {
    pub fn new(p: u32, k: usize) -> Self {
        ExtField {
            base: Fp::new(p),
            k,
            modulus: irreducible_poly(p, k),
        }
    }

    pub fn base(&self) -> Fp {
        self.base
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Image of a base-field scalar under the tower embedding.
    pub fn embed(&self, a: u32) -> GfElem {
        GfElem([a % self.base.p(), 0, 0])
    }

    /// The power-basis vector θ^r.
    pub fn basis(&self, r: usize) -> GfElem {
        assert!(r < self.k);
        let mut c = [0; 3];
        c[r] = 1;
        GfElem(c)
    }

    pub fn coords(&self, a: &GfElem) -> Vec<u32> {
        a.0[..self.k].to_vec()
    }

    pub fn from_coords(&self, c: &[u32]) -> GfElem {
        let mut out = [0; 3];
        for (i, v) in c.iter().enumerate().take(self.k) {
            out[i] = v % self.base.p();
        }
        GfElem(out)
    }

    /// Matrix of multiplication by `a` on the power basis (column r = a·θ^r).
    pub fn mult_matrix(&self, a: &GfElem) -> Vec<Vec<u32>> {
        let mut m = vec![vec![0; self.k]; self.k];
        for r in 0..self.k {
            let prod = self.mul(a, &self.basis(r));
            for (i, row) in m.iter_mut().enumerate() {
                row[r] = prod.0[i];
            }
        }
        m
    }
}

impl Field for ExtField {
    type Elem = GfElem;

    fn zero(&self) -> GfElem {
        GfElem([0; 3])
    }
    fn one(&self) -> GfElem {
        GfElem([1, 0, 0])
    }
    fn add(&self, a: &GfElem, b: &GfElem) -> GfElem {
        let f = self.base;
        GfElem([f.addv(a.0[0], b.0[0]), f.addv(a.0[1], b.0[1]), f.addv(a.0[2], b.0[2])])
    }
    fn neg(&self, a: &GfElem) -> GfElem {
        let f = self.base;
        GfElem([f.negv(a.0[0]), f.negv(a.0[1]), f.negv(a.0[2])])
    }
    fn mul(&self, a: &GfElem, b: &GfElem) -> GfElem {
        let f = self.base;
        let k = self.k;
        let mut prod = [0u32; 5];
        for i in 0..k {
            for j in 0..k {
                prod[i + j] = f.addv(prod[i + j], f.mulv(a.0[i], b.0[j]));
            }
        }
        for d in (k..2 * k - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for i in 0..k {
                let shift = d - k + i;
                prod[shift] = f.subv(prod[shift], f.mulv(c, self.modulus[i]));
            }
        }
        let mut out = [0; 3];
        out[..k].copy_from_slice(&prod[..k]);
        GfElem(out)
    }
    fn inv(&self, a: &GfElem) -> Option<GfElem> {
        if *a == self.zero() {
            return None;
        }
        let order = (self.base.p() as u64).pow(self.k as u32);
        let mut e = order - 2;
        let mut base = *a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        Some(acc)
    }
    fn from_i64(&self, n: i64) -> GfElem {
        self.embed(self.base.reduce(n))
    }
}

/// The rational numbers with arbitrary-precision integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

/// Converts an exact rational with unit denominator to i64.
pub fn rational_to_i64(q: &BigRational) -> Option<i64> {
    if !q.is_integer() {
        return None;
    }
    let n = q.to_integer();
    if n.abs() > BigInt::from(i64::MAX) {
        return None;
    }
    let (sign, digits) = n.to_u64_digits();
    let mag = digits.first().copied().unwrap_or(0) as i64;
    Some(if sign == num_bigint::Sign::Minus { -mag } else { mag })
}

/// Dense row-major matrix over a field.
#[derive(Clone)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl<F: Field> PartialEq for Matrix<F> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: &F, rows: Vec<Vec<F::Elem>>, cols: usize) -> Self {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        Matrix {
            field: field.clone(),
            rows: nrows,
            cols,
            data,
        }
    }

    pub fn from_columns(field: &F, cols: &[Vec<F::Elem>], rows: usize) -> Self {
        let mut m = Self::zeros(field, rows, cols.len());
        for (c, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "ragged columns");
            for (r, v) in col.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        m
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &F::Elem {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: F::Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[F::Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LinAlgError> {
        if self.cols != other.rows {
            return Err(LinAlgError::DimMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if f.is_zero(b) {
                        continue;
                    }
                    let cur = out.get(i, j).clone();
                    out.set(i, j, f.add(&cur, &f.mul(a, b)));
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[F::Elem]) -> Result<Vec<F::Elem>, LinAlgError> {
        if v.len() != self.cols {
            return Err(LinAlgError::DimMismatch(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
            })
            .collect())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    /// Reduced row-echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut prow = 0;
        for col in 0..self.cols {
            if prow == self.rows {
                break;
            }
            let Some(src) = (prow..self.rows).find(|&r| !f.is_zero(self.get(r, col))) else {
                continue;
            };
            self.swap_rows(prow, src);
            let inv = f.inv(self.get(prow, col)).expect("nonzero pivot");
            for c in col..self.cols {
                let v = f.mul(self.get(prow, c), &inv);
                self.set(prow, c, v);
            }
            for r in 0..self.rows {
                if r == prow {
                    continue;
                }
                let factor = self.get(r, col).clone();
                if f.is_zero(&factor) {
                    continue;
                }
                for c in col..self.cols {
                    let v = f.sub(self.get(r, c), &f.mul(&factor, self.get(prow, c)));
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            prow += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space: one vector per free column, with 1 in that column
    /// and 0 in the other free columns.
    pub fn kernel_basis(&self) -> Vec<Vec<F::Elem>> {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(r.get(row, free));
            }
            out.push(v);
        }
        debug_assert_eq!(pivots.len() + out.len(), self.cols);
        out
    }

    /// Some solution of `self · x = b`.
    pub fn solve(&self, b: &[F::Elem]) -> Result<Vec<F::Elem>, LinAlgError> {
        if b.len() != self.rows {
            return Err(LinAlgError::DimMismatch(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        let f = &self.field;
        let mut aug = Self::zeros(f, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let pivots = aug.rref_in_place();
        if pivots.last() == Some(&self.cols) {
            return Err(LinAlgError::Inconsistent);
        }
        let mut x = vec![f.zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(row, self.cols).clone();
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Self, LinAlgError> {
        if self.rows != self.cols {
            return Err(LinAlgError::DimMismatch("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let f = &self.field;
        let mut aug = Self::zeros(f, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, f.one());
        }
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(LinAlgError::Singular);
        }
        let mut inv = Self::zeros(f, n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, aug.get(r, n + c).clone());
            }
        }
        Ok(inv)
    }
}

/// Rank of a list of row vectors over GF(p), computed in place.
pub fn rank_of_rows(f: &Fp, rows: &[Vec<u32>], cols: usize) -> usize {
    let mut m = Matrix::from_rows(f, rows.to_vec(), cols);
    m.rref_in_place().len()
}

/// Incremental row-echelon basis over GF(p) for membership tests and spans.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    field: Fp,
    dim: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(field: Fp, dim: usize) -> Self {
        EchelonBasis {
            field,
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Reduces `v` against the stored rows; returns the remainder.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let f = &self.field;
        let mut v = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v[pc];
            if c == 0 {
                continue;
            }
            for (x, &r) in v.iter_mut().zip(row) {
                if r != 0 {
                    *x = f.subv(*x, f.mulv(c, r));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v` if it is independent; returns whether it was added.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        let f = self.field;
        let mut r = self.reduce(v);
        let Some(pc) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.invv(r[pc]).expect("nonzero");
        for x in r.iter_mut() {
            *x = f.mulv(*x, inv);
        }
        for row in self.rows.iter_mut() {
            let c = row[pc];
            if c == 0 {
                continue;
            }
            for (x, &y) in row.iter_mut().zip(&r) {
                if y != 0 {
                    *x = f.subv(*x, f.mulv(c, y));
                }
            }
        }
        self.rows.push(r);
        self.pivots.push(pc);
        true
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf7() -> Fp {
        Fp::new(7)
    }

    /// Independent Gaussian elimination used as an oracle: counts rank by
    /// forward elimination only, choosing the last nonzero row as pivot.
    fn oracle_rank(f: &Fp, m: &[Vec<u32>]) -> usize {
        let mut m = m.to_vec();
        let rows = m.len();
        let cols = if rows == 0 { 0 } else { m[0].len() };
        let mut rank = 0;
        for c in (0..cols).rev() {
            let Some(r) = (rank..rows).rev().find(|&r| m[r][c] != 0) else {
                continue;
            };
            m.swap(rank, r);
            let inv = f.invv(m[rank][c]).unwrap();
            for rr in rank + 1..rows {
                let factor = f.mulv(m[rr][c], inv);
                for cc in 0..cols {
                    let v = f.mulv(factor, m[rank][cc]);
                    m[rr][cc] = f.subv(m[rr][cc], v);
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn identity_rref() {
        let f = gf7();
        let id = Matrix::identity(&f, 3);
        let (r, p) = id.rref();
        assert_eq!(r, id);
        assert_eq!(p, vec![0, 1, 2]);
    }

    #[test]
    fn zero_rref() {
        let f = gf7();
        let z = Matrix::zeros(&f, 2, 4);
        let (r, p) = z.rref();
        assert!(r.is_zero());
        assert!(p.is_empty());
    }

    #[test]
    fn random_rank_nullity_against_oracle() {
        let f = gf7();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let rows: Vec<Vec<u32>> = (0..5)
                .map(|_| (0..7).map(|_| if rng.gen_bool(0.4) { 0 } else { rng.gen_range(0..7) }).collect())
                .collect();
            let m = Matrix::from_rows(&f, rows.clone(), 7);
            let rank = m.rank();
            let ker = m.kernel_basis();
            assert_eq!(rank + ker.len(), 7);
            assert_eq!(rank, oracle_rank(&f, &rows));
            for v in &ker {
                assert!(m.apply(v).unwrap().iter().all(|&x| x == 0));
            }
        }
    }

    #[test]
    fn kernel_examples() {
        let f = gf7();
        assert!(Matrix::identity(&f, 4).kernel_basis().is_empty());
        let z = Matrix::zeros(&f, 1, 3);
        assert_eq!(z.kernel_basis(), vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let f5 = Fp::new(5);
        let m = Matrix::from_rows(&f5, vec![vec![1, 1]], 2);
        let ker = m.kernel_basis();
        assert_eq!(ker, vec![vec![4, 1]]);
        assert_eq!(m.apply(&ker[0]).unwrap(), vec![0]);
    }

    #[test]
    fn solve_examples() {
        let f = gf7();
        let id = Matrix::identity(&f, 3);
        assert_eq!(id.solve(&[3, 4, 5]).unwrap(), vec![3, 4, 5]);
        let z = Matrix::zeros(&f, 2, 2);
        assert_eq!(z.solve(&[1, 0]), Err(LinAlgError::Inconsistent));
        let m = Matrix::from_rows(&f, vec![vec![2, 1, 0], vec![0, 3, 1], vec![1, 0, 5]], 3);
        let x_known = vec![1, 2, 3];
        let b = m.apply(&x_known).unwrap();
        let x = m.solve(&b).unwrap();
        assert_eq!(m.apply(&x).unwrap(), b);
        assert_eq!(x, x_known);
    }

    #[test]
    fn rref_rows_are_combinations_of_original_rows() {
        let f = gf7();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let rows: Vec<Vec<u32>> =
                (0..4).map(|_| (0..6).map(|_| rng.gen_range(0..7)).collect()).collect();
            let m = Matrix::from_rows(&f, rows.clone(), 6);
            let (r, _) = m.rref();
            let mut span = EchelonBasis::new(f, 6);
            for row in &rows {
                span.insert(row);
            }
            for i in 0..r.rows() {
                assert!(span.contains(r.row(i)));
            }
            // Row order does not change the rank.
            let mut rev = rows.clone();
            rev.reverse();
            assert_eq!(Matrix::from_rows(&f, rev, 6).rank(), m.rank());
            assert_eq!(m.transpose().rank(), m.rank());
        }
    }

    #[test]
    fn recorded_irreducible_polynomials() {
        assert_eq!(irreducible_poly(7, 2), vec![1, 0, 1]);
        assert_eq!(irreducible_poly(7, 3), vec![2, 0, 0, 1]);
        assert_eq!(irreducible_poly(11, 2), vec![1, 0, 1]);
        assert_eq!(irreducible_poly(11, 3), vec![4, 1, 0, 1]);
        for p in [3u32, 5, 7, 11, 13] {
            for k in 2..=3 {
                let poly = irreducible_poly(p, k);
                let f = Fp::new(p);
                assert!((0..p).all(|x| eval_poly(&f, &poly, x) != 0));
            }
        }
    }

    #[test]
    fn extension_field_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for k in 1..=3 {
            let g = ExtField::new(7, k);
            let rand_elem = |rng: &mut ChaCha8Rng| {
                let c: Vec<u32> = (0..k).map(|_| rng.gen_range(0..7)).collect();
                g.from_coords(&c)
            };
            for _ in 0..10_000 {
                let (a, b, c) = (rand_elem(&mut rng), rand_elem(&mut rng), rand_elem(&mut rng));
                assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)));
                assert_eq!(g.mul(&a, &g.add(&b, &c)), g.add(&g.mul(&a, &b), &g.mul(&a, &c)));
                assert_eq!(g.mul(&a, &b), g.mul(&b, &a));
                assert_eq!(g.add(&a, &g.neg(&a)), g.zero());
                if a != g.zero() {
                    assert_eq!(g.mul(&a, &g.inv(&a).unwrap()), g.one());
                }
            }
            let f = g.base();
            for x in 0..7 {
                for y in 0..7 {
                    assert_eq!(g.embed(f.addv(x, y)), g.add(&g.embed(x), &g.embed(y)));
                    assert_eq!(g.embed(f.mulv(x, y)), g.mul(&g.embed(x), &g.embed(y)));
                }
            }
        }
    }

    #[test]
    fn prime_field_axioms() {
        let f = Fp::new(11);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let (a, b, c) = (rng.gen_range(0..11), rng.gen_range(0..11), rng.gen_range(0..11));
            assert_eq!(f.mulv(f.mulv(a, b), c), f.mulv(a, f.mulv(b, c)));
            assert_eq!(f.mulv(a, f.addv(b, c)), f.addv(f.mulv(a, b), f.mulv(a, c)));
            assert_eq!(f.addv(a, f.negv(a)), 0);
            if a != 0 {
                assert_eq!(f.mulv(a, f.invv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn rational_arithmetic() {
        let q = Rationals;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let r = |rng: &mut ChaCha8Rng| {
            BigRational::new(BigInt::from(rng.gen_range(-20i64..20)), BigInt::from(rng.gen_range(1i64..9)))
        };
        for _ in 0..10_000 {
            let (a, b, c) = (r(&mut rng), r(&mut rng), r(&mut rng));
            assert_eq!(q.mul(&q.mul(&a, &b), &c), q.mul(&a, &q.mul(&b, &c)));
            assert_eq!(q.mul(&a, &q.add(&b, &c)), q.add(&q.mul(&a, &b), &q.mul(&a, &c)));
            assert!(q.is_zero(&q.add(&a, &q.neg(&a))));
            if !a.is_zero() {
                assert_eq!(q.mul(&a, &q.inv(&a).unwrap()), q.one());
            }
        }
        let m = Matrix::from_rows(&q, vec![vec![q.from_i64(2), q.from_i64(1)], vec![q.from_i64(1), q.from_i64(1)]], 2);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(&q, 2));
        assert_eq!(rational_to_i64(&q.from_i64(-5)), Some(-5));
    }

    #[test]
    fn echelon_basis_membership() {
        let f = gf7();
        let mut e = EchelonBasis::new(f, 3);
        assert!(e.insert(&[1, 2, 0]));
        assert!(e.insert(&[0, 1, 1]));
        assert!(!e.insert(&[1, 3, 1]));
        assert!(e.contains(&[2, 5, 1]));
        assert!(!e.contains(&[0, 0, 1]));
        assert_eq!(e.len(), 2);
    }
}
