//! Cryptographic criteria for vectorial boolean functions `F_2^n -> F_2^n`.
//!
//! Every criterion works for `2 <= n <= 8`; [`evaluate_all`] and
//! [`polynomial_degree`] need `n = 8`.
//!
//! Conventions:
//! - `linear_invariant` is `max |W(a, b)| / 2` over `b != 0`.
//! - `avalanche` and `bit_independence` count flips over the `2^(n-1)`
//!   unordered pairs `{x, x ^ a}` for every weight-1 `a`, and report the
//!   largest distance from `2^(n-2)`.
//! - `transparency` sums over nonzero differences `a` unless asked otherwise.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::gf256;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CriteriaError {
    #[error("table length {0} is not 2^n with 2 <= n <= 8")]
    BadLength(usize),
    #[error("output {value:#x} at input {input:#x} does not fit in {bits} bits")]
    OutputTooWide { input: usize, value: u8, bits: u32 },
    #[error("this criterion needs an 8-bit function, got {0} bits")]
    Width(u32),
}

/// A function `F_2^n -> F_2^n` stored as its lookup table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VectorialFn {
    bits: u32,
    table: Vec<u8>,
}

impl fmt::Debug for VectorialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorialFn({} bits, ", self.bits)?;
        for b in &self.table {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

impl VectorialFn {
    pub fn from_table(table: Vec<u8>) -> Result<Self, CriteriaError> {
        let len = table.len();
        if !len.is_power_of_two() || !(4..=256).contains(&len) {
            return Err(CriteriaError::BadLength(len));
        }
        let bits = len.trailing_zeros();
        for (input, &value) in table.iter().enumerate() {
            if (value as usize) >= len {
                return Err(CriteriaError::OutputTooWide { input, value, bits });
            }
        }
        Ok(VectorialFn { bits, table })
    }

    pub fn from_fn(bits: u32, f: impl Fn(u8) -> u8) -> Result<Self, CriteriaError> {
        Self::from_table((0..1usize << bits).map(|x| f(x as u8)).collect())
    }

    #[inline]
    pub fn get(&self, x: u8) -> u8 {
        self.table[x as usize]
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn size(&self) -> usize {
        self.table.len()
    }

    fn mask(&self) -> u8 {
        (self.size() - 1) as u8
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = [false; 256];
        self.table
            .iter()
            .all(|&y| !std::mem::replace(&mut seen[y as usize], true))
    }

    pub fn inverse(&self) -> Option<VectorialFn> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0u8; self.size()];
        for (x, &y) in self.table.iter().enumerate() {
            inv[y as usize] = x as u8;
        }
        Some(VectorialFn {
            bits: self.bits,
            table: inv,
        })
    }

    /// `x -> g(F(x))`; outputs are truncated to `n` bits.
    pub fn map_output(&self, g: impl Fn(u8) -> u8) -> VectorialFn {
        let mask = self.mask();
        VectorialFn {
            bits: self.bits,
            table: self.table.iter().map(|&y| g(y) & mask).collect(),
        }
    }

    /// `x -> F(g(x))`; `g` outputs are truncated to `n` bits.
    pub fn map_input(&self, g: impl Fn(u8) -> u8) -> VectorialFn {
        let mask = self.mask();
        VectorialFn {
            bits: self.bits,
            table: (0..self.size())
                .map(|x| self.table[(g(x as u8) & mask) as usize])
                .collect(),
        }
    }
}

#[inline]
fn dot(a: u8, b: u8) -> u32 {
    (a & b).count_ones() & 1
}

/// In-place fast Walsh-Hadamard transform.
fn fwht(v: &mut [i32]) {
    let mut h = 1;
    while h < v.len() {
        for chunk in v.chunks_mut(2 * h) {
            let (lo, hi) = chunk.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        }
        h *= 2;
    }
}

/// `W(a, b) = sum_x (-1)^((a|x) + (b|F(x)))`.
#[derive(Clone)]
pub struct WalshSpectrum {
    size: usize,
    // row-major in b
    w: Vec<i32>,
}

impl WalshSpectrum {
    #[inline]
    pub fn get(&self, a: u8, b: u8) -> i32 {
        self.w[b as usize * self.size + a as usize]
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Column `b`, indexed by `a`.
    pub fn column(&self, b: u8) -> &[i32] {
        let start = b as usize * self.size;
        &self.w[start..start + self.size]
    }
}

pub fn walsh_spectrum(f: &VectorialFn) -> WalshSpectrum {
    let size = f.size();
    let mut w = vec![0i32; size * size];
    for (b, row) in w.chunks_mut(size).enumerate() {
        for (x, v) in row.iter_mut().enumerate() {
            *v = 1 - 2 * dot(b as u8, f.get(x as u8)) as i32;
        }
        fwht(row);
    }
    WalshSpectrum { size, w }
}

/// `max |#{x : (a|x) = (b|F(x))} - 2^(n-1)|` over all `a` and `b != 0`.
pub fn linear_invariant(f: &VectorialFn) -> u32 {
    let spec = walsh_spectrum(f);
    (1..spec.size())
        .flat_map(|b| spec.column(b as u8).iter())
        .map(|w| w.unsigned_abs() / 2)
        .max()
        .unwrap_or(0)
}

/// Difference distribution table, `counts[a][b] = #{x : F(x) ^ F(x ^ a) = b}`.
#[derive(Clone)]
pub struct Ddt {
    size: usize,
    counts: Vec<u16>,
}

impl Ddt {
    #[inline]
    pub fn get(&self, a: u8, b: u8) -> u16 {
        self.counts[a as usize * self.size + b as usize]
    }

    pub fn row(&self, a: u8) -> &[u16] {
        let start = a as usize * self.size;
        &self.counts[start..start + self.size]
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

pub fn ddt(f: &VectorialFn) -> Ddt {
    let size = f.size();
    let mut counts = vec![0u16; size * size];
    for (a, row) in counts.chunks_mut(size).enumerate() {
        for x in 0..size {
            let d = f.get(x as u8) ^ f.get((x ^ a) as u8);
            row[d as usize] += 1;
        }
    }
    Ddt { size, counts }
}

/// Largest DDT entry over nonzero input differences.
pub fn differential_invariant(f: &VectorialFn) -> u32 {
    let size = f.size();
    let mut row = [0u16; 256];
    let mut best = 0;
    for a in 1..size {
        row[..size].fill(0);
        for x in 0..size {
            row[(f.get(x as u8) ^ f.get((x ^ a) as u8)) as usize] += 1;
        }
        best = best.max(*row[..size].iter().max().unwrap());
    }
    best as u32
}

pub fn fixed_points(f: &VectorialFn) -> u32 {
    (0..f.size()).filter(|&x| f.get(x as u8) == x as u8).count() as u32
}

/// Inputs mapped to their complement.
pub fn reverse_fixed_points(f: &VectorialFn) -> u32 {
    let mask = f.mask();
    (0..f.size())
        .filter(|&x| f.get(x as u8) == (x as u8) ^ mask)
        .count() as u32
}

/// Degree of the algebraic normal form of a boolean truth table.
pub fn anf_degree(truth: &[u8]) -> u32 {
    let mut anf = truth.to_vec();
    let n = anf.len().trailing_zeros();
    for i in 0..n {
        let bit = 1usize << i;
        for x in 0..anf.len() {
            if x & bit != 0 {
                anf[x] ^= anf[x ^ bit];
            }
        }
    }
    anf.iter()
        .enumerate()
        .filter(|(_, &c)| c & 1 == 1)
        .map(|(m, _)| m.count_ones())
        .max()
        .unwrap_or(0)
}

/// Maximum ANF degree over every nonzero output mask.
pub fn algebraic_degree(f: &VectorialFn) -> u32 {
    let size = f.size();
    let mut truth = vec![0u8; size];
    (1..size)
        .map(|v| {
            for (x, t) in truth.iter_mut().enumerate() {
                *t = dot(v as u8, f.get(x as u8)) as u8;
            }
            anf_degree(&truth)
        })
        .max()
        .unwrap_or(0)
}

/// Maximum ANF degree over the `n` coordinate functions only.
pub fn algebraic_degree_components(f: &VectorialFn) -> u32 {
    let size = f.size();
    (0..f.bits())
        .map(|i| {
            let truth: Vec<u8> = (0..size).map(|x| (f.get(x as u8) >> i) & 1).collect();
            anf_degree(&truth)
        })
        .max()
        .unwrap_or(0)
}

/// Coefficients of the interpolating polynomial over the AES field, lowest
/// degree first (256 entries).
pub fn interpolation_coefficients(f: &VectorialFn) -> Result<Vec<u8>, CriteriaError> {
    if f.bits() != 8 {
        return Err(CriteriaError::Width(f.bits()));
    }
    // F(X) = sum_a F(a) (1 - (X - a)^255); binom(255, k) is odd for every k
    let mut coeffs = vec![0u8; 256];
    coeffs[0] = f.get(0);
    coeffs[255] = f.table().iter().fold(0, |acc, &y| acc ^ y);
    for (k, c) in coeffs.iter_mut().enumerate().take(255).skip(1) {
        let e = 255 - k;
        *c = (1..=255u8)
            .filter(|&x| f.get(x) != 0)
            .fold(0u8, |acc, x| {
                let l = gf256::log(f.get(x)) as usize + gf256::log(x) as usize * e;
                acc ^ gf256::exp(l)
            });
    }
    Ok(coeffs)
}

/// Degree of the univariate polynomial interpolating `F` over GF(2^8).
pub fn polynomial_degree(f: &VectorialFn) -> Result<u32, CriteriaError> {
    let coeffs = interpolation_coefficients(f)?;
    Ok(coeffs.iter().rposition(|&c| c != 0).unwrap_or(0) as u32)
}

fn sac_distance(f: &VectorialFn, masks: impl Iterator<Item = u8>) -> u32 {
    let size = f.size();
    let expected = (size / 4) as i32;
    let mut best = 0u32;
    for v in masks {
        let comp: Vec<u8> = (0..size).map(|x| dot(v, f.get(x as u8)) as u8).collect();
        for i in 0..f.bits() {
            let a = 1usize << i;
            let flips = (0..size)
                .filter(|&x| x & a == 0 && comp[x] != comp[x ^ a])
                .count() as i32;
            best = best.max((expected - flips).unsigned_abs());
        }
    }
    best
}

/// Distance to the order-1 strict avalanche criterion, per coordinate.
pub fn avalanche(f: &VectorialFn) -> u32 {
    sac_distance(f, (0..f.bits()).map(|i| 1u8 << i))
}

/// Avalanche distance over single coordinates and XORs of coordinate pairs.
pub fn bit_independence(f: &VectorialFn) -> u32 {
    let n = f.bits();
    let singles = (0..n).map(|i| 1u8 << i);
    let pairs = (0..n).flat_map(move |i| (i + 1..n).map(move |j| (1u8 << i) | (1u8 << j)));
    sac_distance(f, singles.chain(pairs))
}

/// Which input differences enter the transparency sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DifferenceRange {
    #[default]
    Nonzero,
    All,
}

pub fn transparency(f: &VectorialFn) -> f64 {
    transparency_with(f, DifferenceRange::Nonzero)
}

pub fn transparency_with(f: &VectorialFn, range: DifferenceRange) -> f64 {
    let size = f.size();
    let n = f.bits() as usize;
    let first = match range {
        DifferenceRange::Nonzero => 1,
        DifferenceRange::All => 0,
    };
    // auto[a][k] = W_{D_a F}(0, e_k)
    let auto: Vec<[i32; 8]> = (first..size)
        .map(|a| {
            let mut set = [0i32; 8];
            for x in 0..size {
                let d = f.get(x as u8) ^ f.get((x ^ a) as u8);
                for (k, s) in set.iter_mut().enumerate().take(n) {
                    *s += ((d >> k) & 1) as i32;
                }
            }
            let mut w = [0i32; 8];
            for k in 0..n {
                w[k] = size as i32 - 2 * set[k];
            }
            w
        })
        .collect();
    let norm = (size * (size - 1)) as f64;
    (0..size)
        .map(|beta| {
            let total: i64 = auto
                .iter()
                .map(|w| {
                    let s: i32 = (0..n)
                        .map(|k| if (beta >> k) & 1 == 1 { -w[k] } else { w[k] })
                        .sum();
                    s.unsigned_abs() as i64
                })
                .sum();
            let weight = (beta as u8).count_ones() as i64;
            (n as i64 - 2 * weight).abs() as f64 - total as f64 / norm
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn five_decimals<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{v:.5}"))
}

fn from_decimal_string<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Num {
        S(String),
        F(f64),
    }
    match Num::deserialize(d)? {
        Num::S(s) => s.parse().map_err(serde::de::Error::custom),
        Num::F(f) => Ok(f),
    }
}

/// Scores of one function, one row of a comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaReport {
    pub delta: u32,
    pub lambda: u32,
    pub alg_degree: u32,
    pub poly_degree: u32,
    pub fixed_points: u32,
    pub reverse_fixed_points: u32,
    pub avalanche: u32,
    pub bit_independence: u32,
    #[serde(serialize_with = "five_decimals", deserialize_with = "from_decimal_string")]
    pub transparency: f64,
    pub bijective: bool,
}

impl CriteriaReport {
    pub const CSV_HEADER: &'static str = "delta,lambda,alg_degree,poly_degree,fixed_points,\
reverse_fixed_points,avalanche,bit_independence,transparency,bijective";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{:.5},{}",
            self.delta,
            self.lambda,
            self.alg_degree,
            self.poly_degree,
            self.fixed_points,
            self.reverse_fixed_points,
            self.avalanche,
            self.bit_independence,
            self.transparency,
            self.bijective
        )
    }
}

pub fn evaluate_all(f: &VectorialFn) -> Result<CriteriaReport, CriteriaError> {
    if f.bits() != 8 {
        return Err(CriteriaError::Width(f.bits()));
    }
    Ok(CriteriaReport {
        delta: differential_invariant(f),
        lambda: linear_invariant(f),
        alg_degree: algebraic_degree(f),
        poly_degree: polynomial_degree(f)?,
        fixed_points: fixed_points(f),
        reverse_fixed_points: reverse_fixed_points(f),
        avalanche: avalanche(f),
        bit_independence: bit_independence(f),
        transparency: transparency(f),
        bijective: f.is_bijective(),
    })
}
