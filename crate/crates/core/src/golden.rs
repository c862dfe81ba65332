//! The built-in (9, 6) code over GF(32) with sub-packetization 9.
//!
//! This is the reference instance used by the test vectors: it attains the
//! minimum repair bandwidth of 8/3 node-units for every systematic node. The
//! coefficient tables are installed verbatim rather than drawn from a seed.
//!
//! The reference listing these tables come from carries misprints: six of
//! the 84 six-node subsets are singular ([`KNOWN_SINGULAR_SUBSETS`]), and a
//! set-cover argument over those six systems shows no single or double
//! coefficient correction can repair them all, so the misprints cannot be
//! reconstructed. The tables are kept verbatim because the split vectors,
//! repair plans and cost walkthroughs used as test vectors all derive from
//! them; decode paths treat those six subsets as singular.

use alloc::vec::Vec;

use crate::code::{CodeSpec, IndexArray, IndexPair};
use crate::field::Field;

/// Base coefficients of parity 1 (node 7): row major, nodes 1..=6.
pub const PARITY1_BASE: [[u16; 6]; 9] = [
    [7, 10, 18, 11, 17, 6],
    [26, 17, 25, 27, 31, 4],
    [22, 12, 27, 31, 31, 23],
    [17, 9, 14, 4, 21, 25],
    [20, 5, 5, 13, 11, 16],
    [25, 16, 30, 28, 10, 24],
    [20, 8, 21, 9, 3, 25],
    [23, 4, 12, 16, 8, 17],
    [2, 21, 8, 16, 7, 25],
];

/// Base coefficients of parity 2 (node 8).
pub const PARITY2_BASE: [[u16; 6]; 9] = [
    [8, 24, 21, 19, 6, 20],
    [3, 12, 6, 3, 16, 10],
    [23, 20, 30, 7, 16, 10],
    [14, 7, 10, 14, 24, 20],
    [25, 11, 29, 12, 20, 24],
    [17, 27, 4, 21, 15, 11],
    [19, 23, 16, 4, 14, 16],
    [5, 26, 22, 30, 22, 21],
    [10, 8, 10, 27, 28, 20],
];

/// Appended terms of parity 2: per row, two ((row, node), coefficient) pairs.
pub const PARITY2_EXTRA: [[((usize, usize), u16); 2]; 9] = [
    [((4, 1), 8), ((2, 4), 6)],
    [((5, 1), 30), ((1, 5), 24)],
    [((6, 1), 21), ((1, 6), 27)],
    [((1, 2), 16), ((5, 4), 31)],
    [((2, 2), 15), ((4, 5), 6)],
    [((3, 2), 19), ((4, 6), 21)],
    [((1, 3), 9), ((8, 4), 8)],
    [((2, 3), 24), ((7, 5), 26)],
    [((3, 3), 16), ((7, 6), 4)],
];

/// Base coefficients of parity 3 (node 9).
pub const PARITY3_BASE: [[u16; 6]; 9] = [
    [20, 20, 30, 17, 12, 27],
    [18, 10, 20, 21, 13, 7],
    [31, 25, 12, 18, 15, 24],
    [6, 16, 26, 4, 21, 27],
    [7, 6, 26, 6, 15, 16],
    [20, 20, 12, 20, 18, 26],
    [26, 2, 6, 20, 17, 23],
    [20, 15, 13, 20, 10, 24],
    [6, 2, 31, 12, 16, 30],
];

/// Appended terms of parity 3.
pub const PARITY3_EXTRA: [[((usize, usize), u16); 2]; 9] = [
    [((7, 1), 28), ((3, 4), 9)],
    [((8, 1), 2), ((3, 5), 6)],
    [((9, 1), 31), ((2, 6), 28)],
    [((7, 2), 26), ((6, 4), 8)],
    [((8, 2), 28), ((6, 5), 4)],
    [((9, 2), 19), ((5, 6), 30)],
    [((4, 3), 8), ((9, 4), 31)],
    [((5, 3), 31), ((9, 5), 9)],
    [((6, 3), 20), ((8, 6), 13)],
];

/// Six-node subsets of the reference code whose generator restriction is
/// singular, a consequence of misprints in the reference listing. Every
/// other one of the 84 subsets decodes.
pub const KNOWN_SINGULAR_SUBSETS: [[usize; 6]; 6] = [
    [1, 2, 3, 5, 7, 8],
    [1, 2, 3, 6, 7, 9],
    [1, 2, 5, 6, 8, 9],
    [1, 3, 4, 5, 8, 9],
    [2, 3, 4, 6, 8, 9],
    [3, 4, 5, 6, 7, 9],
];

/// The (9, 6) code with alpha = 9 over GF(32), coefficients installed
/// verbatim from the published tables.
pub fn golden_9_6_code() -> CodeSpec {
    let k = 6;
    let alpha = 9;
    let mut arrays = Vec::with_capacity(3);
    let mut coeffs = Vec::with_capacity(3);

    // parity 1: base grid only
    let rows1: Vec<Vec<IndexPair>> = (1..=alpha)
        .map(|j| (1..=k).map(|node| IndexPair::new(j, node)).collect())
        .collect();
    arrays.push(IndexArray { rows: rows1 });
    coeffs.push(PARITY1_BASE.iter().map(|row| row.to_vec()).collect());

    for (base, extra) in [
        (&PARITY2_BASE, &PARITY2_EXTRA),
        (&PARITY3_BASE, &PARITY3_EXTRA),
    ] {
        let mut rows = Vec::with_capacity(alpha);
        let mut crows = Vec::with_capacity(alpha);
        for j in 1..=alpha {
            let mut row: Vec<IndexPair> = (1..=k).map(|node| IndexPair::new(j, node)).collect();
            let mut crow: Vec<u16> = base[j - 1].to_vec();
            for ((er, en), coeff) in extra[j - 1] {
                row.push(IndexPair::new(er, en));
                crow.push(coeff);
            }
            rows.push(row);
            crows.push(crow);
        }
        arrays.push(IndexArray { rows });
        coeffs.push(crows);
    }

    CodeSpec::with_coefficients(9, 6, alpha, Field::gf32(), arrays, coeffs, 0)
}
