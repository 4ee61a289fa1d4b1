//! Bit-packed exact linear algebra and polynomial arithmetic over GF(2).
//!
//! Rows fit in a single machine word, so the ambient dimension is capped at
//! [`MAX_DIM`]. Vectors are rows and matrices act on the right: `v -> v * M`.

use crate::error::{Error, Result};
use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Maximum number of columns; one row must fit in a `u64` with headroom.
pub const MAX_DIM: usize = 62;

/// A row vector of `len` bits over GF(2). Bit `j` is coordinate `j`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    bits: u64,
    len: usize,
}

impl BitVector {
    pub fn zero(len: usize) -> Self {
        assert!(len >= 1 && len <= MAX_DIM, "dimension out of range");
        BitVector { bits: 0, len }
    }

    pub fn from_bits(bits: u64, len: usize) -> Self {
        assert!(len >= 1 && len <= MAX_DIM, "dimension out of range");
        assert_eq!(bits >> len, 0, "bits above position len must be zero");
        BitVector { bits, len }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn get(&self, j: usize) -> bool {
        assert!(j < self.len);
        (self.bits >> j) & 1 == 1
    }

    pub fn set(&mut self, j: usize, v: bool) {
        assert!(j < self.len);
        if v {
            self.bits |= 1 << j;
        } else {
            self.bits &= !(1 << j);
        }
    }

    /// Image of this row vector under `m` (i.e. `self * m`).
    pub fn apply(&self, m: &BitMatrix) -> BitVector {
        assert_eq!(self.len, m.nrows(), "vector/matrix dimension mismatch");
        let mut acc = 0u64;
        let mut bits = self.bits;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            acc ^= m.rows[i];
            bits &= bits - 1;
        }
        BitVector {
            bits: acc,
            len: m.ncols(),
        }
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len {
            write!(f, "{}", (self.bits >> j) & 1)?;
        }
        Ok(())
    }
}

/// A dense matrix over GF(2); each row is one machine word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitMatrix {
    rows: Vec<u64>,
    ncols: usize,
}

/// Result of reduced row echelon form computation.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: BitMatrix,
    pub rank: usize,
    /// Pivot columns, strictly increasing, 0-based.
    pub pivots: Vec<usize>,
}

impl BitMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        assert!(ncols >= 1 && ncols <= MAX_DIM, "dimension out of range");
        BitMatrix {
            rows: vec![0; nrows],
            ncols,
        }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_DIM, "dimension out of range");
        BitMatrix {
            rows: (0..n).map(|i| 1u64 << i).collect(),
            ncols: n,
        }
    }

    pub fn from_rows(rows: Vec<u64>, ncols: usize) -> Self {
        assert!(ncols >= 1 && ncols <= MAX_DIM, "dimension out of range");
        for r in &rows {
            assert_eq!(r >> ncols, 0, "bits above ncols must be zero");
        }
        BitMatrix { rows, ncols }
    }

    /// Build from 0/1 entries in row-major order.
    pub fn from_entries(entries: &[Vec<u8>]) -> Result<Self> {
        let nrows = entries.len();
        let ncols = entries.first().map(|r| r.len()).unwrap_or(0);
        if ncols == 0 || ncols > MAX_DIM {
            return Err(Error::DimensionMismatch(format!(
                "ncols {ncols} out of range 1..={MAX_DIM}"
            )));
        }
        let mut rows = Vec::with_capacity(nrows);
        for row in entries {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            let mut bits = 0u64;
            for (j, &e) in row.iter().enumerate() {
                match e {
                    0 => {}
                    1 => bits |= 1 << j,
                    _ => return Err(Error::DimensionMismatch("entries must be 0 or 1".into())),
                }
            }
            rows.push(bits);
        }
        Ok(BitMatrix { rows, ncols })
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols
    }

    pub fn row_bits(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> BitVector {
        BitVector {
            bits: self.rows[i],
            len: self.ncols,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(j < self.ncols);
        (self.rows[i] >> j) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        assert!(j < self.ncols);
        if v {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && self.rows.iter().enumerate().all(|(i, &r)| r == 1u64 << i)
    }

    /// Entrywise sum over GF(2) (also the difference).
    pub fn add(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.nrows() != other.nrows() || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.nrows(),
                self.ncols,
                other.nrows(),
                other.ncols
            )));
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(BitMatrix {
            rows,
            ncols: self.ncols,
        })
    }

    /// Exact product over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.ncols != other.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.nrows(),
                self.ncols,
                other.nrows(),
                other.ncols
            )));
        }
        let mut rows = Vec::with_capacity(self.nrows());
        for &r in &self.rows {
            let mut acc = 0u64;
            let mut bits = r;
            while bits != 0 {
                let k = bits.trailing_zeros() as usize;
                acc ^= other.rows[k];
                bits &= bits - 1;
            }
            rows.push(acc);
        }
        Ok(BitMatrix {
            rows,
            ncols: other.ncols,
        })
    }

    pub fn transpose(&self) -> BitMatrix {
        let n = self.nrows();
        assert!(n >= 1 && n <= MAX_DIM, "transpose needs 1..={MAX_DIM} rows");
        let mut out = BitMatrix::zeros(self.ncols, n);
        for (i, &r) in self.rows.iter().enumerate() {
            let mut bits = r;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                out.rows[j] |= 1 << i;
                bits &= bits - 1;
            }
        }
        out
    }

    /// Vertically stack two matrices with equal column counts.
    pub fn stack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.ncols != other.ncols {
            return Err(Error::DimensionMismatch("stack: column mismatch".into()));
        }
        let mut rows = self.rows.clone();
        rows.extend_from_slice(&other.rows);
        Ok(BitMatrix {
            rows,
            ncols: self.ncols,
        })
    }

    /// Unique reduced row echelon form, with rank and pivot columns.
    pub fn rref(&self) -> Rref {
        let mut rows = self.rows.clone();
        let nrows = rows.len();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..self.ncols {
            let mask = 1u64 << c;
            let Some(p) = (r..nrows).find(|&i| rows[i] & mask != 0) else {
                continue;
            };
            rows.swap(r, p);
            let pivot_row = rows[r];
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && *row & mask != 0 {
                    *row ^= pivot_row;
                }
            }
            pivots.push(c);
            r += 1;
            if r == nrows {
                break;
            }
        }
        Rref {
            matrix: BitMatrix {
                rows,
                ncols: self.ncols,
            },
            rank: r,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.ncols
    }

    /// Basis of the right kernel `{x : m * x^T = 0}`, presented as rows.
    ///
    /// Row count equals `ncols - rank`.
    pub fn kernel_basis(&self) -> BitMatrix {
        let Rref {
            matrix,
            rank,
            pivots,
        } = self.rref();
        let mut basis_rows = Vec::with_capacity(self.ncols - rank);
        let pivot_set: u64 = pivots.iter().fold(0, |acc, &c| acc | (1 << c));
        for f in 0..self.ncols {
            if pivot_set & (1 << f) != 0 {
                continue;
            }
            let mut x = 1u64 << f;
            for (r, &pc) in pivots.iter().enumerate() {
                if matrix.rows[r] & (1 << f) != 0 {
                    x |= 1 << pc;
                }
            }
            basis_rows.push(x);
        }
        BitMatrix {
            rows: basis_rows,
            ncols: self.ncols,
        }
    }

    /// Inverse of a square invertible matrix.
    pub fn inverse(&self) -> Result<BitMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of non-square".into()));
        }
        let n = self.ncols;
        let mut work = self.rows.clone();
        let mut inv: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        let mut r = 0usize;
        for c in 0..n {
            let mask = 1u64 << c;
            let Some(p) = (r..n).find(|&i| work[i] & mask != 0) else {
                return Err(Error::Singular);
            };
            work.swap(r, p);
            inv.swap(r, p);
            let (wr, ir) = (work[r], inv[r]);
            for i in 0..n {
                if i != r && work[i] & mask != 0 {
                    work[i] ^= wr;
                    inv[i] ^= ir;
                }
            }
            r += 1;
        }
        Ok(BitMatrix {
            rows: inv,
            ncols: n,
        })
    }

    pub fn pow(&self, mut e: u64) -> Result<BitMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("pow of non-square".into()));
        }
        let mut base = self.clone();
        let mut acc = BitMatrix::identity(self.ncols);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Least `e >= 1` with `m^e = I`.
    ///
    /// For `cap <= 10^6` the powers are iterated directly. For larger caps the
    /// order is located among the divisors of `cap`, so `cap` must then be a
    /// multiple of the order (e.g. the ambient group order).
    pub fn element_order(&self, cap: u64) -> Result<u64> {
        if !self.is_invertible() {
            return Err(Error::Singular);
        }
        assert!(cap >= 1);
        if cap <= 1_000_000 {
            let mut acc = self.clone();
            for e in 1..=cap {
                if acc.is_identity() {
                    return Ok(e);
                }
                acc = acc.mul(self)?;
            }
            return Err(Error::OrderCapExceeded { cap });
        }
        let mut divisors = divisors_of(cap);
        divisors.sort_unstable();
        for d in divisors {
            if self.pow(d)?.is_identity() {
                return Ok(d);
            }
        }
        Err(Error::OrderCapExceeded { cap })
    }

    /// Packed canonical key: column count, then the row words.
    pub fn key(&self) -> Vec<u64> {
        let mut k = Vec::with_capacity(self.rows.len() + 1);
        k.push(((self.nrows() as u64) << 8) | self.ncols as u64);
        k.extend_from_slice(&self.rows);
        k
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.nrows(), self.ncols)?;
        for i in 0..self.nrows() {
            for j in 0..self.ncols {
                write!(f, "{}", if self.get(i, j) { 1 } else { 0 })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

// Matrices serialize as JSON arrays of 0/1 row arrays.
impl Serialize for BitMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.nrows()))?;
        for i in 0..self.nrows() {
            let row: Vec<u8> = (0..self.ncols)
                .map(|j| if self.get(i, j) { 1 } else { 0 })
                .collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for BitMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = BitMatrix;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of 0/1 row arrays")
            }
            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<BitMatrix, A::Error> {
                let mut entries: Vec<Vec<u8>> = Vec::new();
                while let Some(row) = seq.next_element::<Vec<u8>>()? {
                    entries.push(row);
                }
                BitMatrix::from_entries(&entries).map_err(serde::de::Error::custom)
            }
        }
        d.deserialize_seq(V)
    }
}

fn divisors_of(n: u64) -> Vec<u64> {
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push((m, 1));
    }
    let mut divs = vec![1u64];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for &d in &divs {
            let mut pk = 1u64;
            for _ in 0..=e {
                next.push(d * pk);
                pk = pk.saturating_mul(p);
            }
        }
        divs = next;
    }
    divs
}

/// A polynomial over GF(2), bit `i` of `coeffs` being the coefficient of `x^i`.
///
/// Every nonzero polynomial over GF(2) is monic.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GF2Poly {
    coeffs: u64,
}

impl GF2Poly {
    pub const ZERO: GF2Poly = GF2Poly { coeffs: 0 };
    pub const ONE: GF2Poly = GF2Poly { coeffs: 1 };
    pub const X: GF2Poly = GF2Poly { coeffs: 2 };

    pub fn from_coeff_bits(coeffs: u64) -> Self {
        GF2Poly { coeffs }
    }

    pub fn coeff_bits(&self) -> u64 {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs == 0
    }

    /// Degree; the zero polynomial has none.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs == 0 {
            None
        } else {
            Some(63 - self.coeffs.leading_zeros() as usize)
        }
    }

    pub fn coeff(&self, i: usize) -> bool {
        (self.coeffs >> i) & 1 == 1
    }

    pub fn add(&self, other: &GF2Poly) -> GF2Poly {
        GF2Poly {
            coeffs: self.coeffs ^ other.coeffs,
        }
    }

    pub fn mul(&self, other: &GF2Poly) -> GF2Poly {
        if self.coeffs == 0 || other.coeffs == 0 {
            return GF2Poly::ZERO;
        }
        let da = self.degree().unwrap();
        let db = other.degree().unwrap();
        assert!(da + db < 64, "product degree exceeds packing");
        let mut acc = 0u64;
        let mut a = self.coeffs;
        while a != 0 {
            let i = a.trailing_zeros() as usize;
            acc ^= other.coeffs << i;
            a &= a - 1;
        }
        GF2Poly { coeffs: acc }
    }

    /// Quotient and remainder of `self / divisor`.
    pub fn div_rem(&self, divisor: &GF2Poly) -> (GF2Poly, GF2Poly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let mut rem = self.coeffs;
        let mut quo = 0u64;
        while rem != 0 {
            let dr = 63 - rem.leading_zeros() as usize;
            if dr < dd {
                break;
            }
            quo |= 1 << (dr - dd);
            rem ^= divisor.coeffs << (dr - dd);
        }
        (GF2Poly { coeffs: quo }, GF2Poly { coeffs: rem })
    }

    pub fn divides(&self, other: &GF2Poly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_rem(self).1.is_zero()
    }

    pub fn gcd(&self, other: &GF2Poly) -> GF2Poly {
        let (mut a, mut b) = (*self, *other);
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a
    }

    pub fn lcm(&self, other: &GF2Poly) -> GF2Poly {
        if self.is_zero() || other.is_zero() {
            return GF2Poly::ZERO;
        }
        let g = self.gcd(other);
        self.div_rem(&g).0.mul(other)
    }

    pub fn pow(&self, mut e: usize) -> GF2Poly {
        let mut base = *self;
        let mut acc = GF2Poly::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Evaluate at a square matrix: `sum c_i * m^i`.
    pub fn eval_matrix(&self, m: &BitMatrix) -> Result<BitMatrix> {
        let n = m.ncols();
        let mut acc = BitMatrix::zeros(n, n);
        let mut power = BitMatrix::identity(n);
        let mut bits = self.coeffs;
        while bits != 0 {
            if bits & 1 == 1 {
                acc = acc.add(&power)?;
            }
            bits >>= 1;
            if bits != 0 {
                power = power.mul(m)?;
            }
        }
        Ok(acc)
    }

    /// Coefficient bit-string, low degree first (e.g. `x^2+1` is "101").
    pub fn to_bit_string(&self) -> String {
        match self.degree() {
            None => "0".to_string(),
            Some(d) => (0..=d)
                .map(|i| if self.coeff(i) { '1' } else { '0' })
                .collect(),
        }
    }

    pub fn from_bit_string(s: &str) -> Result<GF2Poly> {
        let mut coeffs = 0u64;
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => coeffs |= 1 << i,
                _ => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("bad polynomial bit-string {s:?}"),
                    })
                }
            }
        }
        Ok(GF2Poly { coeffs })
    }
}

impl fmt::Debug for GF2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..=self.degree().unwrap()).rev() {
            if self.coeff(i) {
                if !first {
                    write!(f, "+")?;
                }
                match i {
                    0 => write!(f, "1")?,
                    1 => write!(f, "x")?,
                    _ => write!(f, "x^{i}")?,
                }
                first = false;
            }
        }
        Ok(())
    }
}

/// Companion matrix of a polynomial of degree `d >= 1`: ones on the
/// superdiagonal, last row the low coefficients. Acts on row vectors.
pub fn companion(p: &GF2Poly) -> Result<BitMatrix> {
    let d = p.degree().filter(|&d| d >= 1).ok_or(Error::BadPolynomial)?;
    let mut m = BitMatrix::zeros(d, d);
    for i in 0..d - 1 {
        m.set(i, i + 1, true);
    }
    for j in 0..d {
        if p.coeff(j) {
            m.set(d - 1, j, true);
        }
    }
    Ok(m)
}

/// Block-diagonal assembly of square blocks.
pub fn block_diag(blocks: &[BitMatrix]) -> BitMatrix {
    let n: usize = blocks.iter().map(|b| b.ncols()).sum();
    assert!(n >= 1 && n <= MAX_DIM, "total dimension out of range");
    let mut m = BitMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        assert!(b.is_square());
        for i in 0..b.nrows() {
            m.rows[off + i] = b.rows[i] << off;
        }
        off += b.ncols();
    }
    m
}

/// All monic polynomials with `1 <= degree <= max_degree`, sorted by
/// (degree, coefficient bits).
pub fn poly_list(max_degree: usize) -> Vec<GF2Poly> {
    assert!(max_degree < 63);
    let mut out = Vec::new();
    for d in 1..=max_degree {
        for low in 0..(1u64 << d) {
            out.push(GF2Poly::from_coeff_bits((1 << d) | low));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m7(rows: [u64; 7]) -> BitMatrix {
        BitMatrix::from_rows(rows.to_vec(), 7)
    }

    #[test]
    fn rref_identity_and_zero() {
        let id = BitMatrix::identity(7);
        let r = id.rref();
        assert_eq!(r.matrix, id);
        assert_eq!(r.rank, 7);
        assert_eq!(r.pivots, vec![0, 1, 2, 3, 4, 5, 6]);

        let z = BitMatrix::zeros(3, 7);
        let r = z.rref();
        assert_eq!(r.matrix, z);
        assert_eq!(r.rank, 0);
        assert!(r.pivots.is_empty());
    }

    #[test]
    fn rref_is_idempotent_on_random_inputs() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..200 {
            let rows: Vec<u64> = (0..5).map(|_| next() & 0x1ff).collect();
            let m = BitMatrix::from_rows(rows, 9);
            let r1 = m.rref();
            let r2 = r1.matrix.rref();
            assert_eq!(r1.matrix, r2.matrix);
            assert_eq!(r1.rank, r2.rank);
        }
    }

    #[test]
    fn mul_identity_and_mismatch() {
        let a = m7([3, 5, 9, 17, 33, 65, 1]);
        let id = BitMatrix::identity(7);
        assert_eq!(a.mul(&id).unwrap(), a);
        let b = BitMatrix::identity(5);
        assert!(matches!(a.mul(&b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn product_with_inverse_returns_original() {
        let mut state = 0xdeadbeefcafe1234u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut done = 0;
        while done < 50 {
            let a = BitMatrix::from_rows((0..7).map(|_| next() & 0x7f).collect(), 7);
            let b = BitMatrix::from_rows((0..7).map(|_| next() & 0x7f).collect(), 7);
            if !b.is_invertible() {
                continue;
            }
            let ab = a.mul(&b).unwrap();
            assert_eq!(ab.mul(&b.inverse().unwrap()).unwrap(), a);
            done += 1;
        }
    }

    #[test]
    fn rank_of_product_bounded() {
        let mut state = 0x123456789abcdefu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..100 {
            let a = BitMatrix::from_rows((0..6).map(|_| next() & 0xff).collect(), 8);
            let b = BitMatrix::from_rows((0..8).map(|_| next() & 0x3f).collect(), 6);
            let ab = a.mul(&b).unwrap();
            assert!(ab.rank() <= a.rank().min(b.rank()));
        }
    }

    #[test]
    fn kernel_dimension_rank_nullity() {
        let mut state = 0xfeedface12345678u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        assert_eq!(BitMatrix::identity(7).kernel_basis().nrows(), 0);
        assert_eq!(BitMatrix::zeros(5, 5).kernel_basis().nrows(), 5);
        for _ in 0..100 {
            let m = BitMatrix::from_rows((0..5).map(|_| next() & 0x1ff).collect(), 9);
            let k = m.kernel_basis();
            assert_eq!(k.nrows() + m.rank(), m.ncols());
            for i in 0..k.nrows() {
                let x = k.row(i);
                // m * x^T = 0, i.e. every row of m is orthogonal to x
                for r in 0..m.nrows() {
                    assert_eq!((m.row_bits(r) & x.bits()).count_ones() % 2, 0);
                }
            }
        }
    }

    #[test]
    fn inverse_of_identity_and_involution() {
        let id = BitMatrix::identity(7);
        assert_eq!(id.inverse().unwrap(), id);
        // shear involution
        let mut s = BitMatrix::identity(4);
        s.set(1, 0, true);
        assert_eq!(s.inverse().unwrap(), s);
        assert!(BitMatrix::zeros(3, 3).inverse().is_err());
    }

    #[test]
    fn element_order_small_and_capped() {
        let id = BitMatrix::identity(7);
        assert_eq!(id.element_order(10).unwrap(), 1);
        let p = GF2Poly::from_bit_string("11").unwrap(); // x + 1
        let c = companion(&p).unwrap();
        assert_eq!(c.element_order(10).unwrap(), 1); // [1]
        let p3 = GF2Poly::from_bit_string("111").unwrap(); // x^2+x+1
        let c3 = companion(&p3).unwrap();
        assert_eq!(c3.element_order(10).unwrap(), 3);
        assert!(matches!(
            c3.element_order(2),
            Err(Error::OrderCapExceeded { cap: 2 })
        ));
    }

    #[test]
    fn primitive_degree7_companion_has_order_127() {
        // x^7 + x + 1 is primitive over GF(2)
        let p = GF2Poly::from_bit_string("11000001").unwrap();
        assert_eq!(p.degree(), Some(7));
        let c = companion(&p).unwrap();
        // brute power iteration as the oracle: acc = c^e at the top of step e
        let mut acc = c.clone();
        let mut order = 0u64;
        for e in 1..=127u64 {
            if acc.is_identity() {
                order = e;
                break;
            }
            acc = acc.mul(&c).unwrap();
        }
        assert_eq!(order, 127);
        assert_eq!(c.element_order(127).unwrap(), 127);
        // large-cap path locates the order among divisors
        let gl7: u64 = 163_849_992_929_280;
        assert_eq!(c.element_order(gl7).unwrap(), 127);
    }

    #[test]
    fn element_order_divides_gl7_order() {
        let gl7: u64 = 163_849_992_929_280;
        let mut state = 0x5555aaaa5555aaaau64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut done = 0;
        while done < 30 {
            let m = BitMatrix::from_rows((0..7).map(|_| next() & 0x7f).collect(), 7);
            if !m.is_invertible() {
                continue;
            }
            let ord = m.element_order(gl7).unwrap();
            assert_eq!(gl7 % ord, 0);
            done += 1;
        }
    }

    #[test]
    fn companion_and_block_diag_basics() {
        let p = GF2Poly::from_bit_string("11").unwrap();
        let c = companion(&p).unwrap();
        assert_eq!(c.nrows(), 1);
        assert!(c.get(0, 0));
        let blocks: Vec<BitMatrix> = (0..7).map(|_| c.clone()).collect();
        assert_eq!(block_diag(&blocks), BitMatrix::identity(7));
        assert!(companion(&GF2Poly::ONE).is_err());
        assert!(companion(&GF2Poly::ZERO).is_err());
    }

    #[test]
    fn poly_arithmetic() {
        let a = GF2Poly::from_bit_string("111").unwrap(); // x^2+x+1
        let b = GF2Poly::from_bit_string("11").unwrap(); // x+1
        let prod = a.mul(&b); // x^3 + 1
        assert_eq!(prod.to_bit_string(), "1001");
        assert!(b.divides(&prod));
        assert!(a.divides(&prod));
        assert!(!GF2Poly::X.divides(&prod));
        let (q, r) = prod.div_rem(&a);
        assert_eq!(q, b);
        assert!(r.is_zero());
        assert_eq!(a.gcd(&prod), a);
        assert_eq!(a.lcm(&b), prod);
    }

    #[test]
    fn poly_list_counts() {
        let l = poly_list(3);
        assert_eq!(l.len(), 2 + 4 + 8);
        assert!(l.iter().all(|p| p.degree().unwrap() >= 1));
        let mut sorted = l.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), l.len());
    }

    #[test]
    fn matrix_json_round_trip() {
        let m = m7([3, 5, 9, 17, 33, 65, 127]);
        let js = serde_json::to_string(&m).unwrap();
        assert!(js.starts_with("[[1,1,0"));
        let back: BitMatrix = serde_json::from_str(&js).unwrap();
        assert_eq!(back, m);
    }
}
