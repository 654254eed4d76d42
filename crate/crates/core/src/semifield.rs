//! Finite semifields of order `2^n` represented by their left-multiplication
//! matrices.
//!
//! Element `x` is an `n`-bit vector whose bit `i - 1` is the coordinate on the
//! basis vector `e_i`; the identity is `e_1 = 1`. A semifield is given by
//! matrices `A_1..A_n` with `L_x = sum of A_i over the set bits of x` and
//! `x * y = L_x y`. The tuple is valid when `A_1 = I`, column 0 of `A_i` is
//! `e_i`, and every nonzero combination of the `A_i` is invertible.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::gf2::{enumerate_invertible_with_first_column, BitMatrix, DetTable, Gf2Error};

/// A semifield element, stored in the low `dim` bits.
pub type SElement = u8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemifieldError {
    #[error("semifield dimension {0} not supported (2..=4)")]
    BadDim(usize),
    #[error("matrix tuple is not a semifield: {0}")]
    Invalid(String),
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("isotopy maps must be bijective linear maps")]
    SingularIsotopy,
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// Which side an inverse is taken on. `Right` solves `a * x = e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InverseSide {
    Left,
    #[default]
    Right,
}

impl fmt::Display for InverseSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InverseSide::Left => "left",
            InverseSide::Right => "right",
        })
    }
}

impl std::str::FromStr for InverseSide {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(InverseSide::Left),
            "right" => Ok(InverseSide::Right),
            other => Err(format!("unknown inverse side {other:?}")),
        }
    }
}

#[derive(Clone)]
pub struct Semifield {
    dim: usize,
    mats: Vec<BitMatrix>,
    id: u64,
    digest: String,
    table: Vec<u8>,
    right_inv: Vec<u8>,
    left_inv: Vec<u8>,
}

impl fmt::Debug for Semifield {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Semifield")
            .field("dim", &self.dim)
            .field("id", &self.id)
            .field("mats", &self.matrix_indices())
            .finish()
    }
}

impl PartialEq for Semifield {
    fn eq(&self, other: &Self) -> bool {
        self.mats == other.mats
    }
}

impl Eq for Semifield {}

/// On-disk form of a semifield.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemifieldRecord {
    pub dim: usize,
    pub mats: Vec<u64>,
    pub id: u64,
    pub digest: String,
}

impl Semifield {
    /// Validates `mats` with Gaussian elimination and builds the
    /// multiplication and inverse tables.
    pub fn from_matrices(mats: Vec<BitMatrix>, id: u64) -> Result<Self, SemifieldError> {
        check_tuple(&mats, |m| m.det_gauss())?;
        Ok(Self::build_unchecked(mats, id))
    }

    pub fn from_record(rec: &SemifieldRecord) -> Result<Self, SemifieldError> {
        if rec.mats.len() != rec.dim {
            return Err(SemifieldError::Invalid(format!(
                "{} matrices for dimension {}",
                rec.mats.len(),
                rec.dim
            )));
        }
        let mats = rec
            .mats
            .iter()
            .map(|&i| BitMatrix::from_index(rec.dim, i))
            .collect::<Result<Vec<_>, _>>()?;
        let sf = Self::from_matrices(mats, rec.id)?;
        if !rec.digest.is_empty() && rec.digest != sf.digest {
            return Err(SemifieldError::Invalid(format!(
                "digest {} does not match matrices ({})",
                rec.digest, sf.digest
            )));
        }
        Ok(sf)
    }

    pub fn to_record(&self) -> SemifieldRecord {
        SemifieldRecord {
            dim: self.dim,
            mats: self.matrix_indices(),
            id: self.id,
            digest: self.digest.clone(),
        }
    }

    fn build_unchecked(mats: Vec<BitMatrix>, id: u64) -> Self {
        let dim = mats.len();
        let order = 1usize << dim;
        let lefts: Vec<BitMatrix> = (0..order as u8).map(|x| combination(&mats, x)).collect();
        let mut table = vec![0u8; order * order];
        for x in 0..order {
            for y in 0..order {
                table[x * order + y] = lefts[x].apply(y as u8);
            }
        }
        let mut right_inv = vec![0u8; order];
        let mut left_inv = vec![0u8; order];
        for x in 1..order {
            for y in 1..order {
                if table[x * order + y] == 1 {
                    right_inv[x] = y as u8;
                    left_inv[y] = x as u8;
                }
            }
        }
        let digest = digest_of(&mats);
        Semifield {
            dim,
            mats,
            id,
            digest,
            table,
            right_inv,
            left_inv,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        1 << self.dim
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn with_id(mut self, id: u64) -> Self {
        self.id = id;
        self
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn matrices(&self) -> &[BitMatrix] {
        &self.mats
    }

    pub fn matrix_indices(&self) -> Vec<u64> {
        self.mats.iter().map(BitMatrix::index).collect()
    }

    /// `L_x`, the sum of `A_i` over the set bits of `x`.
    pub fn left_mul_matrix(&self, x: SElement) -> BitMatrix {
        combination(&self.mats, x)
    }

    #[inline]
    pub fn mul(&self, x: SElement, y: SElement) -> SElement {
        self.table[((x as usize) << self.dim) | y as usize]
    }

    /// The unique `x` with `a * x = e`.
    pub fn right_inverse(&self, a: SElement) -> Result<SElement, SemifieldError> {
        if a == 0 {
            return Err(SemifieldError::ZeroInverse);
        }
        Ok(self.right_inv[a as usize])
    }

    /// The unique `y` with `y * a = e`.
    pub fn left_inverse(&self, a: SElement) -> Result<SElement, SemifieldError> {
        if a == 0 {
            return Err(SemifieldError::ZeroInverse);
        }
        Ok(self.left_inv[a as usize])
    }

    pub fn inverse(&self, a: SElement, side: InverseSide) -> Result<SElement, SemifieldError> {
        match side {
            InverseSide::Right => self.right_inverse(a),
            InverseSide::Left => self.left_inverse(a),
        }
    }

    /// Raw `2^n x 2^n` multiplication table, row-major in the left operand.
    pub fn mul_table(&self) -> &[u8] {
        &self.table
    }
}

fn combination(mats: &[BitMatrix], x: SElement) -> BitMatrix {
    let dim = mats[0].dim();
    mats.iter()
        .enumerate()
        .filter(|(i, _)| (x >> i) & 1 == 1)
        .fold(BitMatrix::zero(dim), |acc, (_, m)| acc + *m)
}

fn digest_of(mats: &[BitMatrix]) -> String {
    let mut h = Sha256::new();
    for m in mats {
        h.update(m.index().to_le_bytes());
    }
    h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn check_tuple(
    mats: &[BitMatrix],
    invertible: impl Fn(&BitMatrix) -> bool,
) -> Result<(), SemifieldError> {
    let dim = mats.len();
    if !(1..=8).contains(&dim) {
        return Err(SemifieldError::BadDim(dim));
    }
    for m in mats {
        if m.dim() != dim {
            return Err(Gf2Error::DimMismatch(dim, m.dim()).into());
        }
    }
    if mats[0] != BitMatrix::identity(dim) {
        return Err(SemifieldError::Invalid("A_1 is not the identity".into()));
    }
    for (i, m) in mats.iter().enumerate() {
        if m.column(0) != 1 << i {
            return Err(SemifieldError::Invalid(format!(
                "first column of A_{} is not e_{}",
                i + 1,
                i + 1
            )));
        }
    }
    for x in 1..(1u16 << dim) {
        if !invertible(&combination(mats, x as u8)) {
            return Err(SemifieldError::Invalid(format!(
                "combination {x:#06b} of the matrices is singular"
            )));
        }
    }
    Ok(())
}

/// Whether `mats` satisfies the three matrix conditions, checking
/// invertibility by table lookup.
pub fn is_semifield(mats: &[BitMatrix], table: &DetTable) -> Result<bool, SemifieldError> {
    if mats.is_empty() {
        return Err(SemifieldError::BadDim(0));
    }
    if table.dim() != mats.len() {
        return Err(Gf2Error::DimMismatch(mats.len(), table.dim()).into());
    }
    match check_tuple(mats, |m| table.get_index(m.index())) {
        Ok(()) => Ok(true),
        Err(SemifieldError::Invalid(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Every matrix tuple describing a semifield of dimension `dim`, in
/// lexicographic order of `(index(A_2), .., index(A_dim))`, ids from 0.
pub fn enumerate_semifields(
    dim: usize,
    table: &DetTable,
) -> Result<Vec<Semifield>, SemifieldError> {
    let keys = enumerate_semifield_keys(dim, table)?;
    Ok(keys
        .into_par_iter()
        .enumerate()
        .map(|(id, key)| {
            let mats = key
                .iter()
                .map(|&i| BitMatrix::from_index(dim, i).expect("index in range"))
                .collect();
            Semifield::build_unchecked(mats, id as u64)
        })
        .collect())
}

/// Matrix-index tuples `(A_1, .., A_dim)` of every semifield, same order as
/// [`enumerate_semifields`]. Partitioned across threads by `A_2`.
pub fn enumerate_semifield_keys(
    dim: usize,
    table: &DetTable,
) -> Result<Vec<Vec<u64>>, SemifieldError> {
    if !(2..=4).contains(&dim) {
        return Err(SemifieldError::BadDim(dim));
    }
    if table.dim() != dim {
        return Err(Gf2Error::DimMismatch(dim, table.dim()).into());
    }
    let candidates: Vec<Vec<u64>> = (1..dim)
        .map(|i| {
            enumerate_invertible_with_first_column(dim, 1 << i, table)
                .map(|ms| ms.iter().map(BitMatrix::index).collect())
        })
        .collect::<Result<_, _>>()?;
    let identity = BitMatrix::identity(dim).index();

    let per_a2: Vec<Vec<Vec<u64>>> = candidates[0]
        .par_iter()
        .map(|&a2| {
            // span holds every combination of the chosen matrices, including 0
            let span = vec![0, identity];
            let mut out = Vec::new();
            let mut prefix = vec![identity];
            extend(table, &candidates, &span, &mut prefix, a2, &mut out);
            out
        })
        .collect();
    Ok(per_a2.into_iter().flatten().collect())
}

fn extend(
    table: &DetTable,
    candidates: &[Vec<u64>],
    span: &[u64],
    prefix: &mut Vec<u64>,
    next: u64,
    out: &mut Vec<Vec<u64>>,
) {
    // every new combination is next + (old combination)
    if !span.iter().all(|&s| table.get_index(s ^ next)) {
        return;
    }
    prefix.push(next);
    let level = prefix.len() - 1;
    if level == candidates.len() {
        out.push(prefix.clone());
    } else {
        let mut grown = span.to_vec();
        grown.extend(span.iter().map(|&s| s ^ next));
        for &c in &candidates[level] {
            extend(table, candidates, &grown, prefix, c, out);
        }
    }
    prefix.pop();
}

/// The field with 16 elements, modulus `x^4 + x + 1`, with `A_i` the matrix of
/// multiplication by `x^(i-1)` in the polynomial basis.
pub fn field16_reference() -> Semifield {
    let mats = (0..4)
        .map(|i| {
            let rows: Vec<u8> = (0..4)
                .map(|r| {
                    (0..4).fold(0u8, |acc, j| {
                        let col = gf16_mul(1 << i, 1 << j);
                        acc | (((col >> r) & 1) << j)
                    })
                })
                .collect();
            BitMatrix::from_rows(&rows).expect("4 rows")
        })
        .collect();
    Semifield::from_matrices(mats, 0).expect("GF(16) is a semifield")
}

/// Carry-less product modulo `x^4 + x + 1`.
pub fn gf16_mul(a: u8, b: u8) -> u8 {
    let mut acc = 0u8;
    let mut a = a & 0xf;
    let mut b = b & 0xf;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        a <<= 1;
        if a & 0x10 != 0 {
            a ^= 0b10011;
        }
        b >>= 1;
    }
    acc
}

/// Three bijective linear maps `(F, G, H)` between semifields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IsotopyTriple {
    pub f: BitMatrix,
    pub g: BitMatrix,
    pub h: BitMatrix,
}

/// `H(a *1 b) = F(a) *2 G(b)` for all `a, b`, checked exhaustively.
pub fn isotopy_check(
    s1: &Semifield,
    s2: &Semifield,
    t: &IsotopyTriple,
) -> Result<bool, SemifieldError> {
    let dim = s1.dim();
    if s2.dim() != dim {
        return Err(Gf2Error::DimMismatch(dim, s2.dim()).into());
    }
    for m in [&t.f, &t.g, &t.h] {
        if m.dim() != dim {
            return Err(Gf2Error::DimMismatch(dim, m.dim()).into());
        }
        if !m.det_gauss() {
            return Err(SemifieldError::SingularIsotopy);
        }
    }
    let order = s1.order() as u8;
    for a in 0..order {
        for b in 0..order {
            if t.h.apply(s1.mul(a, b)) != s2.mul(t.f.apply(a), t.g.apply(b)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
