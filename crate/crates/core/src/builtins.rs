//! Reference tables shipped with the library.

use crate::criteria::VectorialFn;
use crate::gf2::BitMatrix;

/// The AES S-Box.
pub const AES_SBOX: [u8; 256] = [
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,
];

/// Camellia substitution table s1 (RFC 3713).
pub const CAMELLIA_S1: [u8; 256] = [
    0x70, 0x82, 0x2c, 0xec, 0xb3, 0x27, 0xc0, 0xe5, 0xe4, 0x85, 0x57, 0x35, 0xea, 0x0c, 0xae, 0x41,
    0x23, 0xef, 0x6b, 0x93, 0x45, 0x19, 0xa5, 0x21, 0xed, 0x0e, 0x4f, 0x4e, 0x1d, 0x65, 0x92, 0xbd,
    0x86, 0xb8, 0xaf, 0x8f, 0x7c, 0xeb, 0x1f, 0xce, 0x3e, 0x30, 0xdc, 0x5f, 0x5e, 0xc5, 0x0b, 0x1a,
    0xa6, 0xe1, 0x39, 0xca, 0xd5, 0x47, 0x5d, 0x3d, 0xd9, 0x01, 0x5a, 0xd6, 0x51, 0x56, 0x6c, 0x4d,
    0x8b, 0x0d, 0x9a, 0x66, 0xfb, 0xcc, 0xb0, 0x2d, 0x74, 0x12, 0x2b, 0x20, 0xf0, 0xb1, 0x84, 0x99,
    0xdf, 0x4c, 0xcb, 0xc2, 0x34, 0x7e, 0x76, 0x05, 0x6d, 0xb7, 0xa9, 0x31, 0xd1, 0x17, 0x04, 0xd7,
    0x14, 0x58, 0x3a, 0x61, 0xde, 0x1b, 0x11, 0x1c, 0x32, 0x0f, 0x9c, 0x16, 0x53, 0x18, 0xf2, 0x22,
    0xfe, 0x44, 0xcf, 0xb2, 0xc3, 0xb5, 0x7a, 0x91, 0x24, 0x08, 0xe8, 0xa8, 0x60, 0xfc, 0x69, 0x50,
    0xaa, 0xd0, 0xa0, 0x7d, 0xa1, 0x89, 0x62, 0x97, 0x54, 0x5b, 0x1e, 0x95, 0xe0, 0xff, 0x64, 0xd2,
    0x10, 0xc4, 0x00, 0x48, 0xa3, 0xf7, 0x75, 0xdb, 0x8a, 0x03, 0xe6, 0xda, 0x09, 0x3f, 0xdd, 0x94,
    0x87, 0x5c, 0x83, 0x02, 0xcd, 0x4a, 0x90, 0x33, 0x73, 0x67, 0xf6, 0xf3, 0x9d, 0x7f, 0xbf, 0xe2,
    0x52, 0x9b, 0xd8, 0x26, 0xc8, 0x37, 0xc6, 0x3b, 0x81, 0x96, 0x6f, 0x4b, 0x13, 0xbe, 0x63, 0x2e,
    0xe9, 0x79, 0xa7, 0x8c, 0x9f, 0x6e, 0xbc, 0x8e, 0x29, 0xf5, 0xf9, 0xb6, 0x2f, 0xfd, 0xb4, 0x59,
    0x78, 0x98, 0x06, 0x6a, 0xe7, 0x46, 0x71, 0xba, 0xd4, 0x25, 0xab, 0x42, 0x88, 0xa2, 0x8d, 0xfa,
    0x72, 0x07, 0xb9, 0x55, 0xf8, 0xee, 0xac, 0x0a, 0x36, 0x49, 0x2a, 0x68, 0x3c, 0x38, 0xf1, 0xa4,
    0x40, 0x28, 0xd3, 0x7b, 0xbb, 0xc9, 0x43, 0xc1, 0x15, 0xe3, 0xad, 0xf4, 0x77, 0xc7, 0x80, 0x9e,
];

/// Published pseudo-inverse S-Box '19203', row = high nibble of the input.
pub const SBOX_19203: [u8; 256] = [
    0x3f, 0x20, 0x9a, 0xf9, 0x5c, 0x43, 0xd8, 0xa4, 0xbb, 0x7d, 0x1e, 0x85, 0xc7, 0x62, 0xe6, 0x01,
    0x8c, 0xb9, 0x80, 0x39, 0xa1, 0x9c, 0xce, 0xa6, 0x2c, 0x97, 0x5d, 0x9d, 0xc6, 0xa3, 0x4f, 0x6f,
    0x5b, 0xaa, 0xde, 0x61, 0xab, 0x32, 0x24, 0x22, 0x9e, 0x3d, 0x4c, 0xca, 0x7b, 0xe5, 0x65, 0xd6,
    0xb4, 0xbf, 0x4b, 0x35, 0xfb, 0xb6, 0x6b, 0x50, 0x53, 0x05, 0x92, 0xf3, 0xe4, 0x4e, 0x29, 0x33,
    0xd0, 0x40, 0x4a, 0xbc, 0xd4, 0x45, 0x49, 0x10, 0xe0, 0xb7, 0x6c, 0x8f, 0xc4, 0x09, 0x82, 0x08,
    0x63, 0xdb, 0x7f, 0xf1, 0xe3, 0x52, 0x13, 0x2a, 0x28, 0x60, 0x5f, 0xf8, 0xec, 0xeb, 0x2e, 0xc2,
    0x5e, 0x25, 0x04, 0x41, 0x69, 0x95, 0x72, 0x34, 0x75, 0x4d, 0x31, 0xac, 0x26, 0xf0, 0xb2, 0x83,
    0x02, 0x0a, 0x84, 0x5a, 0x57, 0x86, 0xff, 0x1f, 0x30, 0x14, 0x36, 0x88, 0xd2, 0xd7, 0x70, 0x74,
    0xb1, 0x06, 0xd3, 0x98, 0x87, 0x8e, 0x38, 0x77, 0x99, 0x96, 0x8a, 0x67, 0x46, 0x6d, 0xf5, 0x1d,
    0x3a, 0x1b, 0x37, 0xee, 0x3b, 0x81, 0xe1, 0xdf, 0xd1, 0x93, 0xcc, 0x91, 0xb8, 0x3c, 0x51, 0xa9,
    0xd5, 0x1a, 0x2b, 0x59, 0x0b, 0x12, 0xbd, 0xf7, 0xa0, 0x2d, 0x78, 0x76, 0x71, 0xcd, 0x8b, 0x18,
    0xe8, 0x11, 0xad, 0xbe, 0xe2, 0x7e, 0x00, 0xa8, 0xcb, 0x9b, 0xfa, 0x58, 0x9f, 0xef, 0xf6, 0x94,
    0xed, 0x27, 0xba, 0x0f, 0x2f, 0x0d, 0x0c, 0x54, 0x21, 0x73, 0xb0, 0x19, 0xf4, 0x8d, 0xc8, 0x6e,
    0x89, 0x48, 0xc5, 0x23, 0x64, 0x47, 0x7c, 0x16, 0xc1, 0xfd, 0xe7, 0xcf, 0xea, 0x15, 0xda, 0xa7,
    0x07, 0xe9, 0xc3, 0x44, 0xa2, 0x0e, 0x79, 0x7a, 0x3e, 0x90, 0x6a, 0xfc, 0xa5, 0x56, 0xb3, 0xdd,
    0x66, 0xc9, 0xdc, 0xb5, 0xae, 0xaf, 0x68, 0xf2, 0x17, 0x42, 0x55, 0xd9, 0x03, 0xc0, 0x1c, 0xfe,
];

/// Published pseudo-cube APN function, row = high nibble of the input.
pub const APN_CUBE_EXAMPLE: [u8; 256] = [
    0x00, 0x01, 0x04, 0x0f, 0x0f, 0x08, 0x02, 0x0f, 0x02, 0x04, 0x08, 0x04, 0x01, 0x01, 0x02, 0x08,
    0xcf, 0xfa, 0xc4, 0xfb, 0x12, 0x21, 0x10, 0x29, 0x7c, 0x4e, 0x79, 0x41, 0xad, 0x99, 0xa1, 0x9f,
    0x38, 0x58, 0x8e, 0xe4, 0x93, 0xf5, 0x2c, 0x40, 0x32, 0x55, 0x8a, 0xe7, 0x95, 0xf4, 0x24, 0x4f,
    0xa4, 0xf0, 0x1d, 0x43, 0xdd, 0x8f, 0x6d, 0x35, 0x1f, 0x4c, 0xa8, 0xf1, 0x6a, 0x3f, 0xd4, 0x8b,
    0xa4, 0x6a, 0xf1, 0x35, 0x43, 0x8b, 0x1f, 0xdd, 0xd4, 0x1d, 0x8f, 0x4c, 0x3f, 0xf0, 0x6d, 0xa8,
    0xe2, 0x18, 0xb8, 0x48, 0xd7, 0x2b, 0x84, 0x72, 0x23, 0xde, 0x77, 0x80, 0x1a, 0xe1, 0x47, 0xb6,
    0xb1, 0x1e, 0x56, 0xf3, 0xf2, 0x5b, 0x1c, 0xbf, 0xc9, 0x61, 0x20, 0x82, 0x86, 0x28, 0x66, 0xc2,
    0xa4, 0x3f, 0x4c, 0xdd, 0x35, 0xa8, 0xd4, 0x43, 0x6d, 0xf1, 0x8b, 0x1d, 0xf0, 0x6a, 0x1f, 0x8f,
    0xb1, 0x28, 0x61, 0xf2, 0xbf, 0x20, 0x66, 0xf3, 0x1c, 0x82, 0xc2, 0x56, 0x1e, 0x86, 0xc9, 0x5b,
    0x38, 0x95, 0xe7, 0x40, 0xe4, 0x4f, 0x32, 0x93, 0x24, 0x8e, 0xf5, 0x55, 0xf4, 0x58, 0x2c, 0x8a,
    0xe2, 0x1a, 0x80, 0x72, 0x48, 0xb6, 0x23, 0xd7, 0x47, 0xb8, 0x2b, 0xde, 0xe1, 0x18, 0x84, 0x77,
    0x38, 0xf4, 0x55, 0x93, 0x40, 0x8a, 0x24, 0xe4, 0x2c, 0xe7, 0x4f, 0x8e, 0x58, 0x95, 0x32, 0xf5,
    0xcf, 0x99, 0x4e, 0x12, 0x29, 0x79, 0xa1, 0xfb, 0x10, 0x41, 0x9f, 0xc4, 0xfa, 0xad, 0x7c, 0x21,
    0xcf, 0xad, 0x41, 0x29, 0xfb, 0x9f, 0x7c, 0x12, 0xa1, 0xc4, 0x21, 0x4e, 0x99, 0xfa, 0x10, 0x79,
    0xb1, 0x86, 0x82, 0xbf, 0xf3, 0xc2, 0xc9, 0xf2, 0x66, 0x56, 0x5b, 0x61, 0x28, 0x1e, 0x1c, 0x20,
    0xe2, 0xe1, 0xde, 0xd7, 0x72, 0x77, 0x47, 0x48, 0x84, 0x80, 0xb6, 0xb8, 0x18, 0x1a, 0x23, 0x2b,
];

/// Published left-multiplication matrices for semifield '19203', as printed
/// (`[matrix][row][column]`).
pub const SEMIFIELD_19203_ENTRIES: [[[u8; 4]; 4]; 4] = [
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
    [[0, 0, 0, 1], [1, 1, 0, 0], [0, 1, 0, 1], [0, 0, 1, 0]],
    [[0, 0, 1, 1], [0, 1, 0, 0], [1, 1, 1, 1], [0, 1, 0, 0]],
    [[0, 1, 0, 1], [0, 1, 1, 1], [0, 1, 1, 0], [1, 0, 0, 1]],
];

pub fn semifield_19203_matrices() -> Vec<BitMatrix> {
    SEMIFIELD_19203_ENTRIES
        .iter()
        .map(|m| BitMatrix::from_entries(m).expect("4x4"))
        .collect()
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 4] = ["aes", "camellia", "paper-19203", "paper-apn"];

pub fn builtin(name: &str) -> Option<VectorialFn> {
    let table = match name {
        "aes" => AES_SBOX,
        "camellia" => CAMELLIA_S1,
        "paper-19203" => SBOX_19203,
        "paper-apn" => APN_CUBE_EXAMPLE,
        _ => return None,
    };
    Some(VectorialFn::from_table(table.to_vec()).expect("256 entries"))
}
