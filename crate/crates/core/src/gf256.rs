//! GF(2^8) with the AES modulus `x^8 + x^4 + x^3 + x + 1`, via log tables
//! over the generator `x + 1`.

use std::sync::OnceLock;

pub const AES_MODULUS: u16 = 0x11b;

struct Tables {
    exp: [u8; 510],
    log: [u8; 256],
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut exp = [0u8; 510];
        let mut log = [0u8; 256];
        let mut v: u8 = 1;
        for i in 0..255 {
            exp[i] = v;
            exp[i + 255] = v;
            log[v as usize] = i as u8;
            v = mul_slow(v, 3);
        }
        Tables { exp, log }
    })
}

/// Shift-and-add product, used to seed the tables.
pub fn mul_slow(a: u8, b: u8) -> u8 {
    let mut acc = 0u8;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        let carry = a & 0x80 != 0;
        a <<= 1;
        if carry {
            a ^= (AES_MODULUS & 0xff) as u8;
        }
        b >>= 1;
    }
    acc
}

#[inline]
pub fn mul(a: u8, b: u8) -> u8 {
    if a == 0 || b == 0 {
        return 0;
    }
    let t = tables();
    t.exp[t.log[a as usize] as usize + t.log[b as usize] as usize]
}

/// `a^e`, with `0^0 = 1`.
pub fn pow(a: u8, e: u32) -> u8 {
    if e == 0 {
        return 1;
    }
    if a == 0 {
        return 0;
    }
    let t = tables();
    let l = (t.log[a as usize] as u64 * e as u64) % 255;
    t.exp[l as usize]
}

/// Multiplicative inverse, with `0 -> 0`.
pub fn inv(a: u8) -> u8 {
    if a == 0 {
        return 0;
    }
    let t = tables();
    t.exp[(255 - t.log[a as usize] as usize) % 255]
}

#[inline]
pub(crate) fn log(a: u8) -> u8 {
    tables().log[a as usize]
}

#[inline]
pub(crate) fn exp(e: usize) -> u8 {
    tables().exp[e % 255]
}
