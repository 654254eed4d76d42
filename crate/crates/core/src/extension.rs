//! Degree-2 pseudo-extensions of a semifield.
//!
//! A byte is read as the pair `(a, b)` standing for `aX + b`: `a` is the high
//! nibble, `b` the low one. A monic quadratic `X^2 + alpha X + beta` is
//! pseudo-irreducible when `(alpha + g) g + beta` never vanishes. Over a
//! field this is ordinary irreducibility, and the maps below reduce to
//! inversion and cubing in `GF(16)[X] / (X^2 + alpha X + beta)`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::criteria::VectorialFn;
use crate::semifield::{InverseSide, SElement, Semifield, SemifieldError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtensionError {
    #[error("X^2 + {}X + {} is not pseudo-irreducible", .0.alpha, .0.beta)]
    NotPseudoIrreducible(PseudoPoly),
    #[error("inner inverse undefined at {0:#04x}: (alpha + g) g + beta = 0")]
    InnerInverseUndefined(u8),
    #[error("pseudo-inverse table is not bijective: {first:#04x} and {second:#04x} both map to {image:#04x}")]
    NotBijective { first: u8, second: u8, image: u8 },
    #[error("pseudo-extensions need a semifield of dimension 4, got {0}")]
    BadDim(usize),
    #[error(transparent)]
    Semifield(#[from] SemifieldError),
}

/// `X^2 + alpha X + beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PseudoPoly {
    pub alpha: SElement,
    pub beta: SElement,
}

impl PseudoPoly {
    pub fn new(alpha: SElement, beta: SElement) -> Self {
        PseudoPoly { alpha, beta }
    }
}

impl fmt::Display for PseudoPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X^2 + {}X + {}", self.alpha, self.beta)
    }
}

/// The pair `(a, b)` for `aX + b`, packed as `(a << 4) | b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairCode {
    pub a: SElement,
    pub b: SElement,
}

impl PairCode {
    pub fn new(a: SElement, b: SElement) -> Self {
        PairCode { a, b }
    }

    pub fn from_byte(x: u8) -> Self {
        PairCode { a: x >> 4, b: x & 0xf }
    }

    pub fn to_byte(self) -> u8 {
        (self.a << 4) | (self.b & 0xf)
    }
}

/// How the product groupings of the cube formula are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grouping {
    /// Brackets as written; juxtaposed products group left to right.
    #[default]
    Printed,
    /// Every product evaluated in the opposite algebra, `x o y = y * x`.
    Opposite,
}

impl fmt::Display for Grouping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Grouping::Printed => "printed",
            Grouping::Opposite => "opposite",
        })
    }
}

/// How the outputs `c, d` for `X + g` are scaled back by `a^-1` when `a != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scaling {
    /// `c' = a^-1 c` and `d' = c' (alpha + g)`. A bijection over every
    /// semifield: `c'` is nonzero and `d'` determines `g` given `c'`.
    #[default]
    Chained,
    /// `(a^-1 c, a^-1 d)` with `d = c (alpha + g)`. Only a bijection when
    /// multiplication is associative enough to move `a^-1` across.
    Distributed,
}

impl fmt::Display for Scaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scaling::Chained => "chained",
            Scaling::Distributed => "distributed",
        })
    }
}

impl std::str::FromStr for Scaling {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "chained" => Ok(Scaling::Chained),
            "distributed" => Ok(Scaling::Distributed),
            other => Err(format!("unknown scaling {other:?} (expected chained or distributed)")),
        }
    }
}

impl std::str::FromStr for Grouping {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "printed" => Ok(Grouping::Printed),
            "opposite" => Ok(Grouping::Opposite),
            other => Err(format!("unknown grouping {other:?} (expected printed or opposite)")),
        }
    }
}

/// Choices left open by the pseudo-inverse formula over a non-associative
/// semifield. Over a field every combination gives the same map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct InverseConvention {
    #[serde(default)]
    pub side: InverseSide,
    #[serde(default)]
    pub scaling: Scaling,
}

impl InverseConvention {
    pub fn new(side: InverseSide, scaling: Scaling) -> Self {
        InverseConvention { side, scaling }
    }
}

pub fn is_pseudo_irreducible(s: &Semifield, p: PseudoPoly) -> bool {
    (0..s.order() as u8).all(|g| s.mul(p.alpha ^ g, g) ^ p.beta != 0)
}

/// All pseudo-irreducible quadratics, alpha major, beta minor.
pub fn list_pseudo_irreducible(s: &Semifield) -> Vec<PseudoPoly> {
    let order = s.order() as u8;
    (0..order)
        .flat_map(|alpha| (0..order).map(move |beta| PseudoPoly::new(alpha, beta)))
        .filter(|&p| is_pseudo_irreducible(s, p))
        .collect()
}

/// The pseudo-inverse of `x` in the extension defined by `p`.
pub fn pseudo_inverse_map(
    s: &Semifield,
    p: PseudoPoly,
    x: PairCode,
    conv: InverseConvention,
) -> Result<PairCode, ExtensionError> {
    let side = conv.side;
    let PairCode { a, b } = x;
    if a == 0 {
        if b == 0 {
            return Ok(PairCode::new(0, 0));
        }
        return Ok(PairCode::new(0, s.inverse(b, side)?));
    }
    let a_inv = s.inverse(a, side)?;
    let g = s.mul(a_inv, b);
    let t = p.alpha ^ g;
    let c = s
        .inverse(s.mul(t, g) ^ p.beta, side)
        .map_err(|_| ExtensionError::InnerInverseUndefined(x.to_byte()))?;
    let c2 = s.mul(a_inv, c);
    let d2 = match conv.scaling {
        Scaling::Chained => s.mul(c2, t),
        Scaling::Distributed => s.mul(a_inv, s.mul(c, t)),
    };
    Ok(PairCode::new(c2, d2))
}

/// 256-entry pseudo-inverse table. Fails if `p` is not pseudo-irreducible or
/// the result is not a permutation.
pub fn build_pseudo_inverse_sbox(
    s: &Semifield,
    p: PseudoPoly,
    conv: InverseConvention,
) -> Result<VectorialFn, ExtensionError> {
    if s.dim() != 4 {
        return Err(ExtensionError::BadDim(s.dim()));
    }
    if !is_pseudo_irreducible(s, p) {
        return Err(ExtensionError::NotPseudoIrreducible(p));
    }
    let mut table = [0u8; 256];
    let mut preimage = [None::<u8>; 256];
    for x in 0..=255u8 {
        let y = pseudo_inverse_map(s, p, PairCode::from_byte(x), conv)?.to_byte();
        if let Some(first) = preimage[y as usize] {
            return Err(ExtensionError::NotBijective {
                first,
                second: x,
                image: y,
            });
        }
        preimage[y as usize] = Some(x);
        table[x as usize] = y;
    }
    Ok(VectorialFn::from_table(table.to_vec()).expect("256 entries"))
}

/// The pseudo-cube of `x`: the char-2 cube formula for `(aX + b)^3` with the
/// products grouped as written.
pub fn pseudo_cube_map(s: &Semifield, p: PseudoPoly, x: PairCode, grouping: Grouping) -> PairCode {
    let m = |u: SElement, v: SElement| match grouping {
        Grouping::Printed => s.mul(u, v),
        Grouping::Opposite => s.mul(v, u),
    };
    let PairCode { a, b } = x;
    let (alpha, beta) = (p.alpha, p.beta);
    let a2 = m(a, a);
    let b2 = m(b, b);
    let a3 = m(a, a2);
    let ba2 = m(b, a2);
    let ab = m(a, b);
    let ba = m(b, a);
    let c = m(m(a3, alpha), alpha) ^ m(a3, beta) ^ m(a, ab) ^ m(a, ba) ^ m(a, b2) ^ m(ba2, alpha);
    let d = m(m(a3, alpha), beta) ^ m(ba2, beta) ^ m(b, ab) ^ m(b, ba) ^ m(b, b2);
    PairCode::new(c, d)
}

pub fn build_pseudo_cube_fn(
    s: &Semifield,
    p: PseudoPoly,
    grouping: Grouping,
) -> Result<VectorialFn, ExtensionError> {
    if s.dim() != 4 {
        return Err(ExtensionError::BadDim(s.dim()));
    }
    let table = (0..=255u8)
        .map(|x| pseudo_cube_map(s, p, PairCode::from_byte(x), grouping).to_byte())
        .collect();
    Ok(VectorialFn::from_table(table).expect("256 entries"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{differential_invariant, linear_invariant};
    use crate::semifield::{field16_reference, gf16_mul};

    /// Arithmetic in GF(16)[X] / (X^2 + alpha X + beta), written directly on
    /// polynomials rather than through the pair formulas.
    struct Quotient {
        alpha: u8,
        beta: u8,
    }

    impl Quotient {
        fn mul(&self, (a1, b1): (u8, u8), (a2, b2): (u8, u8)) -> (u8, u8) {
            // (a1 X + b1)(a2 X + b2) = a1a2 X^2 + (a1b2 + b1a2) X + b1b2
            let x2 = gf16_mul(a1, a2);
            let x1 = gf16_mul(a1, b2) ^ gf16_mul(b1, a2);
            let x0 = gf16_mul(b1, b2);
            // X^2 = alpha X + beta in characteristic 2
            (x1 ^ gf16_mul(x2, self.alpha), x0 ^ gf16_mul(x2, self.beta))
        }

        fn inverse(&self, v: (u8, u8)) -> (u8, u8) {
            if v == (0, 0) {
                return (0, 0);
            }
            (0..=255u8)
                .map(|y| (y >> 4, y & 0xf))
                .find(|&w| self.mul(v, w) == (0, 1))
                .expect("quotient by an irreducible is a field")
        }
    }

    fn all_conventions() -> Vec<InverseConvention> {
        let mut out = vec![];
        for side in [InverseSide::Left, InverseSide::Right] {
            for scaling in [Scaling::Chained, Scaling::Distributed] {
                out.push(InverseConvention::new(side, scaling));
            }
        }
        out
    }

    fn irreducible_by_roots(alpha: u8, beta: u8) -> bool {
        (0..16u8).all(|x| gf16_mul(x, x) ^ gf16_mul(alpha, x) ^ beta != 0)
    }

    #[test]
    fn pair_code_roundtrip() {
        for x in 0..=255u8 {
            let p = PairCode::from_byte(x);
            assert_eq!(p.to_byte(), x);
            assert_eq!((p.a, p.b), (x >> 4, x & 0xf));
        }
    }

    #[test]
    fn zero_beta_is_never_pseudo_irreducible() {
        let f = field16_reference();
        for alpha in 0..16 {
            assert!(!is_pseudo_irreducible(&f, PseudoPoly::new(alpha, 0)));
        }
    }

    #[test]
    fn field_pseudo_irreducibility_is_irreducibility() {
        let f = field16_reference();
        for alpha in 0..16 {
            for beta in 0..16 {
                assert_eq!(
                    is_pseudo_irreducible(&f, PseudoPoly::new(alpha, beta)),
                    irreducible_by_roots(alpha, beta)
                );
            }
        }
        let list = list_pseudo_irreducible(&f);
        assert_eq!(list.len(), 120);
        assert!(list.iter().all(|p| p.beta != 0));
        assert!(list.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn inverse_fixed_cases() {
        let f = field16_reference();
        let p = list_pseudo_irreducible(&f)[0];
        for conv in all_conventions() {
            assert_eq!(
                pseudo_inverse_map(&f, p, PairCode::new(0, 0), conv).unwrap(),
                PairCode::new(0, 0)
            );
            assert_eq!(
                pseudo_inverse_map(&f, p, PairCode::new(0, 1), conv).unwrap(),
                PairCode::new(0, 1)
            );
        }
    }

    #[test]
    fn field_pseudo_inverse_is_quotient_inverse() {
        let f = field16_reference();
        for p in list_pseudo_irreducible(&f) {
            let q = Quotient {
                alpha: p.alpha,
                beta: p.beta,
            };
            for conv in all_conventions() {
                let sbox = build_pseudo_inverse_sbox(&f, p, conv).unwrap();
                for x in 0..=255u8 {
                    let (c, d) = q.inverse((x >> 4, x & 0xf));
                    assert_eq!(sbox.get(x), (c << 4) | d, "{p} at {x:#04x}");
                }
            }
        }
    }

    #[test]
    fn field_pseudo_cube_is_quotient_cube() {
        let f = field16_reference();
        for p in list_pseudo_irreducible(&f).into_iter().step_by(7) {
            let q = Quotient {
                alpha: p.alpha,
                beta: p.beta,
            };
            let cube = build_pseudo_cube_fn(&f, p, Grouping::Printed).unwrap();
            for x in 0..=255u8 {
                let v = (x >> 4, x & 0xf);
                let (c, d) = q.mul(v, q.mul(v, v));
                assert_eq!(cube.get(x), (c << 4) | d);
            }
            assert_eq!(differential_invariant(&cube), 2);
        }
    }

    #[test]
    fn field_sbox_invariants() {
        let f = field16_reference();
        let p = list_pseudo_irreducible(&f)[3];
        let sbox = build_pseudo_inverse_sbox(&f, p, InverseConvention::default()).unwrap();
        assert_eq!(differential_invariant(&sbox), 4);
        assert_eq!(linear_invariant(&sbox), 16);
        let shifted = sbox.map_output(|y| y ^ 0x5a);
        assert!(shifted.is_bijective());
        assert_eq!(differential_invariant(&shifted), 4);
        assert_eq!(linear_invariant(&shifted), 16);
    }

    #[test]
    fn cube_fixes_zero_and_identity() {
        let f = field16_reference();
        for grouping in [Grouping::Printed, Grouping::Opposite] {
            for alpha in 0..16 {
                for beta in 0..16 {
                    let p = PseudoPoly::new(alpha, beta);
                    assert_eq!(pseudo_cube_map(&f, p, PairCode::new(0, 0), grouping).to_byte(), 0);
                    assert_eq!(pseudo_cube_map(&f, p, PairCode::new(0, 1), grouping).to_byte(), 1);
                }
            }
        }
    }

    /// The first enumerated semifield that is not even power-associative.
    fn non_field() -> Semifield {
        use crate::gf2::DetLadder;
        use crate::semifield::enumerate_semifields;
        let ladder = DetLadder::build(4, false).unwrap();
        enumerate_semifields(4, ladder.top())
            .unwrap()
            .into_iter()
            .find(|s| (1..16).any(|a| s.mul(s.mul(a, a), a) != s.mul(a, s.mul(a, a))))
            .unwrap()
    }

    #[test]
    fn chained_scaling_is_bijective_off_fields() {
        let s = non_field();
        let polys = list_pseudo_irreducible(&s);
        assert!(!polys.is_empty());
        for p in polys {
            for side in [InverseSide::Left, InverseSide::Right] {
                let conv = InverseConvention::new(side, Scaling::Chained);
                assert!(build_pseudo_inverse_sbox(&s, p, conv).is_ok(), "{p} {side}");
            }
        }
    }

    #[test]
    fn distributed_scaling_collides_off_fields() {
        let s = non_field();
        let p = list_pseudo_irreducible(&s)[0];
        let conv = InverseConvention::new(InverseSide::Right, Scaling::Distributed);
        match build_pseudo_inverse_sbox(&s, p, conv) {
            Err(ExtensionError::NotBijective { first, second, image }) => {
                assert_ne!(first, second);
                let img = |x| pseudo_inverse_map(&s, p, PairCode::from_byte(x), conv).unwrap();
                assert_eq!(img(first).to_byte(), image);
                assert_eq!(img(second).to_byte(), image);
            }
            other => panic!("expected a collision, got {other:?}"),
        }
    }

    #[test]
    fn non_irreducible_rejected() {
        let f = field16_reference();
        let p = PseudoPoly::new(3, 0);
        assert_eq!(
            build_pseudo_inverse_sbox(&f, p, InverseConvention::default()).unwrap_err(),
            ExtensionError::NotPseudoIrreducible(p)
        );
        // x = (1, 0) gives g = 0 and an inner value of beta = 0
        assert_eq!(
            pseudo_inverse_map(&f, p, PairCode::new(1, 0), InverseConvention::default()),
            Err(ExtensionError::InnerInverseUndefined(0x10))
        );
    }
}
