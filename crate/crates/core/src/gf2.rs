//! Bit-exact linear algebra over GF(2) for square matrices of dimension 1..=8.
//!
//! A [`BitMatrix`] stores one `u8` per row; bit `j` of row `i` is the entry in
//! column `j`. Matrices map bijectively onto integers by packing row `i` into
//! bits `i*dim .. (i+1)*dim`, so row 0 occupies the least-significant bits.
//! The packing is linear: the index of `A + B` is the XOR of the indices.
//!
//! [`DetTable`] tabulates the determinant of every matrix of a given
//! dimension. Level `n` is derived from level `n - 1` by Laplace expansion
//! along row 0: for a fixed lower block (rows `1..n`) the `n` minors are looked
//! up once, then row 0 walks a reflected Gray code so each step costs a single
//! XOR with the minor of the flipped column.

use std::fmt;
use std::io::{Read, Write};
use std::ops::{Add, Mul};

use thiserror::Error;

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 8;

/// Largest determinant table built without an explicit opt-in (4 MiB).
pub const DEFAULT_MAX_TABLE_DIM: usize = 5;

/// Hard ceiling on tabulation: dimension 7 would need 2^49 bits.
pub const MAX_TABLE_DIM: usize = 6;

const TABLE_MAGIC: &[u8; 6] = b"GF2DET";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("matrix dimension {0} outside 1..={MAX_DIM}")]
    BadDim(usize),
    #[error("row {row} has bits set above column {dim}")]
    StrayBits { row: usize, dim: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("gray code position 0 has no predecessor")]
    GrayZero,
    #[error("column vector must be nonzero and fit in {dim} bits, got {col:#x}")]
    BadColumn { col: u8, dim: usize },
    #[error("determinant table dimension {0} not supported (max {MAX_TABLE_DIM})")]
    TableDimOutOfRange(usize),
    #[error("dimension 6 determinant table needs 8 GiB; enable it explicitly")]
    TableNeedsOptIn,
    #[error("lower table has dimension {got}, expected {expected}")]
    WrongLowerTable { got: usize, expected: usize },
    #[error("malformed determinant table file: {0}")]
    BadTableFile(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Gf2Error {
    fn from(e: std::io::Error) -> Self {
        Gf2Error::Io(e.to_string())
    }
}

/// Mask with the low `dim` bits set.
#[inline]
pub fn low_mask(dim: usize) -> u8 {
    if dim >= 8 {
        0xff
    } else {
        (1u8 << dim) - 1
    }
}

#[inline]
fn parity(x: u8) -> u8 {
    (x.count_ones() & 1) as u8
}

/// Square matrix over GF(2).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    dim: u8,
    rows: [u8; MAX_DIM],
}

impl BitMatrix {
    pub fn zero(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} out of range");
        BitMatrix {
            dim: dim as u8,
            rows: [0; MAX_DIM],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.rows[i] = 1 << i;
        }
        m
    }

    pub fn from_rows(rows: &[u8]) -> Result<Self, Gf2Error> {
        let dim = rows.len();
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Gf2Error::BadDim(dim));
        }
        let mask = low_mask(dim);
        let mut m = Self::zero(dim);
        for (i, &r) in rows.iter().enumerate() {
            if r & !mask != 0 {
                return Err(Gf2Error::StrayBits { row: i, dim });
            }
            m.rows[i] = r;
        }
        Ok(m)
    }

    /// Builds a matrix from entries written the usual way, `entries[i][j]`
    /// being row `i`, column `j`.
    pub fn from_entries<R: AsRef<[u8]>>(entries: &[R]) -> Result<Self, Gf2Error> {
        let rows: Vec<u8> = entries
            .iter()
            .map(|r| {
                r.as_ref()
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (j, &b)| acc | ((b & 1) << j))
            })
            .collect();
        for r in entries {
            if r.as_ref().len() != entries.len() {
                return Err(Gf2Error::DimMismatch(entries.len(), r.as_ref().len()));
            }
        }
        Self::from_rows(&rows)
    }

    pub fn from_index(dim: usize, index: u64) -> Result<Self, Gf2Error> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Gf2Error::BadDim(dim));
        }
        let bits = dim * dim;
        if bits < 64 && index >> bits != 0 {
            return Err(Gf2Error::StrayBits { row: dim, dim });
        }
        let mask = low_mask(dim) as u64;
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.rows[i] = ((index >> (i * dim)) & mask) as u8;
        }
        Ok(m)
    }

    pub fn index(&self) -> u64 {
        let dim = self.dim();
        self.rows()
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &r)| acc | ((r as u64) << (i * dim)))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn rows(&self) -> &[u8] {
        &self.rows[..self.dim()]
    }

    #[inline]
    pub fn row(&self, i: usize) -> u8 {
        self.rows()[i]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.row(i) >> j) & 1 == 1
    }

    /// Column `j` as a bit vector (bit `i` = entry `(i, j)`).
    pub fn column(&self, j: usize) -> u8 {
        self.rows()
            .iter()
            .enumerate()
            .fold(0u8, |acc, (i, &r)| acc | (((r >> j) & 1) << i))
    }

    pub fn transpose(&self) -> Self {
        let dim = self.dim();
        let mut t = Self::zero(dim);
        for j in 0..dim {
            t.rows[j] = self.column(j);
        }
        t
    }

    /// Matrix-vector product `A x` with `x` a column vector.
    #[inline]
    pub fn apply(&self, x: u8) -> u8 {
        self.rows()
            .iter()
            .enumerate()
            .fold(0u8, |acc, (i, &r)| acc | (parity(r & x) << i))
    }

    pub fn checked_add(&self, rhs: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        self.same_dim(rhs)?;
        let mut out = *self;
        for i in 0..self.dim() {
            out.rows[i] ^= rhs.rows[i];
        }
        Ok(out)
    }

    pub fn checked_mul(&self, rhs: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        self.same_dim(rhs)?;
        let mut out = Self::zero(self.dim());
        for (i, &r) in self.rows().iter().enumerate() {
            let mut acc = 0u8;
            let mut bits = r;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                acc ^= rhs.rows[j];
                bits &= bits - 1;
            }
            out.rows[i] = acc;
        }
        Ok(out)
    }

    /// Determinant by Gaussian elimination.
    pub fn det_gauss(&self) -> bool {
        let dim = self.dim();
        let mut rows = self.rows;
        for col in 0..dim {
            let Some(pivot) = (col..dim).find(|&r| (rows[r] >> col) & 1 == 1) else {
                return false;
            };
            rows.swap(col, pivot);
            let p = rows[col];
            for r in rows.iter_mut().take(dim).skip(col + 1) {
                if (*r >> col) & 1 == 1 {
                    *r ^= p;
                }
            }
        }
        true
    }

    pub fn inverse(&self) -> Result<BitMatrix, Gf2Error> {
        let dim = self.dim();
        let mut a = self.rows;
        let mut inv = Self::identity(dim).rows;
        for col in 0..dim {
            let pivot = (col..dim)
                .find(|&r| (a[r] >> col) & 1 == 1)
                .ok_or(Gf2Error::Singular)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            for r in 0..dim {
                if r != col && (a[r] >> col) & 1 == 1 {
                    a[r] ^= a[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Ok(BitMatrix {
            dim: self.dim,
            rows: inv,
        })
    }

    /// Solves `A x = y`.
    pub fn solve(&self, y: u8) -> Result<u8, Gf2Error> {
        Ok(self.inverse()?.apply(y))
    }

    fn same_dim(&self, rhs: &BitMatrix) -> Result<(), Gf2Error> {
        if self.dim != rhs.dim {
            Err(Gf2Error::DimMismatch(self.dim(), rhs.dim()))
        } else {
            Ok(())
        }
    }
}

impl Add for BitMatrix {
    type Output = BitMatrix;

    fn add(self, rhs: BitMatrix) -> BitMatrix {
        self.checked_add(&rhs).expect("matrix dimensions differ")
    }
}

impl Mul for BitMatrix {
    type Output = BitMatrix;

    fn mul(self, rhs: BitMatrix) -> BitMatrix {
        self.checked_mul(&rhs).expect("matrix dimensions differ")
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix[")?;
        for (i, &r) in self.rows().iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            for j in 0..self.dim() {
                write!(f, "{}", (r >> j) & 1)?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &r in self.rows() {
            for j in 0..self.dim() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", (r >> j) & 1)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Bit that flips between the `(k-1)`-th and `k`-th reflected Gray codewords.
pub fn gray_flip_position(k: u64) -> Result<u32, Gf2Error> {
    if k == 0 {
        return Err(Gf2Error::GrayZero);
    }
    Ok(k.trailing_zeros())
}

#[inline]
pub fn gray_code(k: u64) -> u64 {
    k ^ (k >> 1)
}

/// Determinants of every `dim x dim` matrix, addressed by matrix index.
#[derive(Clone)]
pub struct DetTable {
    dim: usize,
    bits: Vec<u64>,
    xor_count: u64,
}

impl fmt::Debug for DetTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DetTable")
            .field("dim", &self.dim)
            .field("xor_count", &self.xor_count)
            .finish_non_exhaustive()
    }
}

impl DetTable {
    pub fn dim1() -> Self {
        DetTable {
            dim: 1,
            bits: vec![0b10],
            xor_count: 0,
        }
    }

    /// Builds level `dim` from the complete level `dim - 1`.
    pub fn build(dim: usize, lower: &DetTable, allow_dim6: bool) -> Result<Self, Gf2Error> {
        if !(2..=MAX_TABLE_DIM).contains(&dim) {
            return Err(Gf2Error::TableDimOutOfRange(dim));
        }
        if dim == MAX_TABLE_DIM && !allow_dim6 {
            return Err(Gf2Error::TableNeedsOptIn);
        }
        if lower.dim != dim - 1 {
            return Err(Gf2Error::WrongLowerTable {
                got: lower.dim,
                expected: dim - 1,
            });
        }

        let total_bits = 1u64 << (dim * dim);
        let mut bits = vec![0u64; total_bits.div_ceil(64) as usize];
        let sweep = 1u64 << dim;
        let bases = 1u64 << (dim * (dim - 1));
        let row_mask = low_mask(dim) as u64;
        let mut minors = [false; MAX_DIM];
        let mut xor_count = 0u64;

        for base in 0..bases {
            // base holds rows 1..dim, each `dim` bits wide
            for (j, minor) in minors.iter_mut().enumerate().take(dim) {
                let mut idx = 0u64;
                for i in 0..dim - 1 {
                    let row = (base >> (i * dim)) & row_mask;
                    let low = row & ((1 << j) - 1);
                    let high = (row >> (j + 1)) << j;
                    idx |= (low | high) << (i * (dim - 1));
                }
                *minor = lower.get_index(idx);
            }

            let offset = base << dim;
            let mut det = false;
            for k in 1..sweep {
                let j = k.trailing_zeros() as usize;
                det ^= minors[j];
                xor_count += 1;
                if det {
                    let i = offset | gray_code(k);
                    bits[(i >> 6) as usize] |= 1 << (i & 63);
                }
            }
        }

        Ok(DetTable {
            dim,
            bits,
            xor_count,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// XOR operations spent on this level alone.
    pub fn xor_count(&self) -> u64 {
        self.xor_count
    }

    pub fn len(&self) -> u64 {
        1u64 << (self.dim * self.dim)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get_index(&self, index: u64) -> bool {
        (self.bits[(index >> 6) as usize] >> (index & 63)) & 1 == 1
    }

    pub fn det(&self, m: &BitMatrix) -> Result<bool, Gf2Error> {
        if m.dim() != self.dim {
            return Err(Gf2Error::DimMismatch(self.dim, m.dim()));
        }
        Ok(self.get_index(m.index()))
    }

    /// Number of invertible matrices, i.e. |GL(dim, 2)|.
    pub fn count_invertible(&self) -> u64 {
        let len = self.len();
        if len < 64 {
            return (self.bits[0] & ((1u64 << len) - 1)).count_ones() as u64;
        }
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Writes the table as an 8-byte header (`GF2DET`, dim, reserved) followed
    /// by the little-endian bit array. `xor_count` is not persisted.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), Gf2Error> {
        w.write_all(TABLE_MAGIC)?;
        w.write_all(&[self.dim as u8, 0])?;
        let nbytes = self.len().div_ceil(8) as usize;
        let mut payload = Vec::with_capacity(nbytes);
        for word in &self.bits {
            payload.extend_from_slice(&word.to_le_bytes());
        }
        payload.truncate(nbytes);
        w.write_all(&payload)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, Gf2Error> {
        let mut header = [0u8; 8];
        r.read_exact(&mut header)?;
        if &header[..6] != TABLE_MAGIC {
            return Err(Gf2Error::BadTableFile("bad magic".into()));
        }
        let dim = header[6] as usize;
        if !(1..=MAX_TABLE_DIM).contains(&dim) {
            return Err(Gf2Error::BadTableFile(format!("dimension {dim}")));
        }
        let len = 1u64 << (dim * dim);
        let mut payload = Vec::new();
        r.read_to_end(&mut payload)?;
        if payload.len() as u64 != len.div_ceil(8) {
            return Err(Gf2Error::BadTableFile(format!(
                "payload is {} bytes, expected {}",
                payload.len(),
                len.div_ceil(8)
            )));
        }
        let bits = payload
            .chunks(8)
            .map(|c| {
                let mut word = [0u8; 8];
                word[..c.len()].copy_from_slice(c);
                u64::from_le_bytes(word)
            })
            .collect();
        Ok(DetTable {
            dim,
            bits,
            xor_count: 0,
        })
    }
}

/// All determinant levels `1..=dim`, built bottom-up.
#[derive(Debug, Clone)]
pub struct DetLadder {
    levels: Vec<DetTable>,
}

impl DetLadder {
    pub fn build(dim: usize, allow_dim6: bool) -> Result<Self, Gf2Error> {
        if !(1..=MAX_TABLE_DIM).contains(&dim) {
            return Err(Gf2Error::TableDimOutOfRange(dim));
        }
        let mut levels = vec![DetTable::dim1()];
        for d in 2..=dim {
            let next = DetTable::build(d, &levels[d - 2], allow_dim6)?;
            levels.push(next);
        }
        Ok(DetLadder { levels })
    }

    pub fn level(&self, dim: usize) -> Option<&DetTable> {
        dim.checked_sub(1).and_then(|i| self.levels.get(i))
    }

    pub fn top(&self) -> &DetTable {
        self.levels.last().expect("ladder is never empty")
    }

    /// XOR operations summed over every level.
    pub fn cumulative_xor_count(&self) -> u64 {
        self.levels.iter().map(DetTable::xor_count).sum()
    }
}

/// Per-level XOR count of the row-0 Gray sweep: `2^(n^2) - 2^(n(n-1))`.
pub fn sweep_xor_count(dim: usize) -> u64 {
    (1u64 << (dim * dim)) - (1u64 << (dim * (dim - 1)))
}

/// The recurrence `D_1 = 0`, `D_n = D_{n-1} + 2^(n^2) - 1`.
pub fn recurrence_xor_bound(dim: usize) -> u64 {
    (2..=dim).map(|i| (1u64 << (i * i)) - 1).sum()
}

/// Closed-form upper bound `2^(n^2) (1 + 1/(2^(n+2) - 1)) - (n - 1)`.
pub fn closed_form_xor_bound(dim: usize) -> f64 {
    let n = dim as i32;
    2f64.powi(n * n) * (1.0 + 1.0 / (2f64.powi(n + 2) - 1.0)) - (n - 1) as f64
}

/// Invertible matrices whose column 0 equals `col`, in increasing index order.
pub fn enumerate_invertible_with_first_column(
    dim: usize,
    col: u8,
    table: &DetTable,
) -> Result<Vec<BitMatrix>, Gf2Error> {
    if table.dim() != dim {
        return Err(Gf2Error::DimMismatch(dim, table.dim()));
    }
    if col == 0 || col & !low_mask(dim) != 0 {
        return Err(Gf2Error::BadColumn { col, dim });
    }
    // bit 0 of every row is pinned; the other dim-1 bits of each row are free
    let free_per_row = dim - 1;
    let free_total = free_per_row * dim;
    let mut out = Vec::new();
    for free in 0..(1u64 << free_total) {
        let mut idx = 0u64;
        for i in 0..dim {
            let bits = (free >> (i * free_per_row)) & ((1 << free_per_row) - 1);
            let row = (bits << 1) | ((col >> i) & 1) as u64;
            idx |= row << (i * dim);
        }
        if table.get_index(idx) {
            out.push(BitMatrix::from_index(dim, idx)?);
        }
    }
    // the free-bit packing above is monotone in the matrix index
    debug_assert!(out.windows(2).all(|w| w[0].index() < w[1].index()));
    Ok(out)
}

/// Row-times-matrix lookup tables for a fixed right operand.
#[derive(Debug, Clone)]
pub struct MulTables {
    right: BitMatrix,
    split: usize,
    lo: Vec<u8>,
    hi: Vec<u8>,
}

impl MulTables {
    pub fn new(right: BitMatrix) -> Self {
        let dim = right.dim();
        let split = dim.div_ceil(2);
        let half = |from: usize, width: usize| -> Vec<u8> {
            (0..1usize << width)
                .map(|p| {
                    (0..width)
                        .filter(|&j| (p >> j) & 1 == 1)
                        .fold(0u8, |acc, j| acc ^ right.row(from + j))
                })
                .collect()
        };
        MulTables {
            right,
            split,
            lo: half(0, split),
            hi: half(split, dim - split),
        }
    }

    pub fn right_matrix(&self) -> &BitMatrix {
        &self.right
    }

    /// `r * right_matrix` for a row vector `r`.
    #[inline]
    pub fn row_product(&self, r: u8) -> u8 {
        self.lo[(r & low_mask(self.split)) as usize] ^ self.hi[(r >> self.split) as usize]
    }

    pub fn mul(&self, left: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        left.same_dim(&self.right)?;
        let mut out = BitMatrix::zero(left.dim());
        for (i, &r) in left.rows().iter().enumerate() {
            out.rows[i] = self.row_product(r);
        }
        Ok(out)
    }
}

pub fn build_mul_tables(right: BitMatrix) -> MulTables {
    MulTables::new(right)
}

pub fn mul_tabulated(left: &BitMatrix, tables: &MulTables) -> Result<BitMatrix, Gf2Error> {
    tables.mul(left)
}
