//! GF(2^w) arithmetic parameterized by an irreducible polynomial.
//!
//! Elements are `u16` values below `2^w`; addition is XOR. Multiplication and
//! inversion go through log/antilog tables built at construction time over a
//! primitive element, so a [`Field`] is immutable and cheap to share once
//! built. Construction rejects word sizes outside `2..=16` and reducible
//! moduli (checked by trial division against every polynomial of degree up to
//! `w/2`).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A field element. Values must stay below `2^w` of the owning [`Field`].
pub type FieldElement = u16;

/// Modulus of the default GF(32) field, x^5 + x^3 + 1.
pub const GF32_POLY: u32 = 0b10_1001;

/// Modulus of the byte-oriented GF(256) field, x^8 + x^4 + x^3 + x^2 + 1.
pub const GF256_POLY: u32 = 0x11d;

/// GF(2^w) context: word size, modulus and the multiplication tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    w: u32,
    poly: u32,
    /// exp[i] = g^i for i in 0..2*(order), mirrored so exp[log a + log b]
    /// needs no modular reduction.
    exp: Vec<u16>,
    /// log[a] = discrete log of a base g; log[0] is unused.
    log: Vec<u32>,
}

impl Field {
    /// Builds the field, verifying the modulus has degree `w` and is
    /// irreducible over GF(2).
    pub fn new(w: u32, poly: u32) -> Result<Self> {
        if !(2..=16).contains(&w) {
            return Err(Error::InvalidWordSize(w));
        }
        if 32 - poly.leading_zeros() != w + 1 {
            return Err(Error::InvalidPolynomialDegree { w, poly });
        }
        check_irreducible(w, poly)?;

        let order = (1usize << w) - 1;
        let generator = find_generator(w, poly);
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u32; 1 << w];
        let mut val: u16 = 1;
        for i in 0..order {
            exp[i] = val;
            exp[i + order] = val;
            log[val as usize] = i as u32;
            val = clmul_reduce(val, generator, w, poly);
        }
        debug_assert_eq!(val, 1, "generator order must be 2^w - 1");
        Ok(Field { w, poly, exp, log })
    }

    /// The default field of the built-in golden code: GF(32), x^5 + x^3 + 1.
    pub fn gf32() -> Self {
        Field::new(5, GF32_POLY).expect("x^5+x^3+1 is irreducible")
    }

    /// GF(256) with x^8 + x^4 + x^3 + x^2 + 1, for byte-aligned payloads.
    pub fn gf256() -> Self {
        Field::new(8, GF256_POLY).expect("0x11d is irreducible")
    }

    pub fn word_size(&self) -> u32 {
        self.w
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Number of elements, 2^w.
    pub fn order(&self) -> usize {
        1 << self.w
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a == 0 || b == 0 {
            return 0;
        }
        let idx = self.log[a as usize] + self.log[b as usize];
        self.exp[idx as usize]
    }

    /// Multiplicative inverse. Errors on zero.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let order = self.order() as u32 - 1;
        let idx = (order - self.log[a as usize]) % order;
        Ok(self.exp[idx as usize])
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a^e by square-and-multiply.
    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc: FieldElement = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Solves `A x = b` by Gaussian elimination with pivoting on the first
    /// nonzero entry. `A` is square, row-major. A singular system returns
    /// [`Error::SingularMatrix`]; callers use that as the non-MDS detector.
    pub fn solve(&self, a: &[Vec<FieldElement>], b: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let n = a.len();
        if a.iter().any(|row| row.len() != n) || b.len() != n {
            return Err(Error::ShapeMismatch(alloc::format!(
                "expected square {n}x{n} system"
            )));
        }
        let mut m: Vec<Vec<FieldElement>> = a
            .iter()
            .zip(b)
            .map(|(row, rhs)| {
                let mut r = row.clone();
                r.push(*rhs);
                r
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| m[r][col] != 0)
                .ok_or(Error::SingularMatrix)?;
            m.swap(col, pivot);
            let inv = self.inv(m[col][col])?;
            for v in m[col].iter_mut() {
                *v = self.mul(*v, inv);
            }
            for r in 0..n {
                if r != col && m[r][col] != 0 {
                    let factor = m[r][col];
                    for c in col..=n {
                        let sub = self.mul(factor, m[col][c]);
                        m[r][c] ^= sub;
                    }
                }
            }
        }
        Ok(m.into_iter().map(|row| row[n]).collect())
    }

    /// Rank of a (possibly rectangular) row-major matrix.
    pub fn rank(&self, rows: &[Vec<FieldElement>]) -> usize {
        let mut m: Vec<Vec<FieldElement>> = rows.to_vec();
        let ncols = m.iter().map(|r| r.len()).max().unwrap_or(0);
        let mut rank = 0;
        for col in 0..ncols {
            let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(rank, pivot);
            let inv = self.inv(m[rank][col]).expect("pivot nonzero");
            for c in col..ncols {
                m[rank][c] = self.mul(m[rank][c], inv);
            }
            for r in 0..m.len() {
                if r != rank && m[r][col] != 0 {
                    let factor = m[r][col];
                    for c in col..ncols {
                        let sub = self.mul(factor, m[rank][c]);
                        m[r][c] ^= sub;
                    }
                }
            }
            rank += 1;
            if rank == m.len() {
                break;
            }
        }
        rank
    }

    /// Solves a rectangular consistent system for all unknowns, returning
    /// `SingularMatrix` if the unknowns are not uniquely determined.
    /// Rows are `(coefficients, rhs)`.
    pub fn solve_rect(
        &self,
        rows: &[(Vec<FieldElement>, FieldElement)],
        unknowns: usize,
    ) -> Result<Vec<FieldElement>> {
        let mut m: Vec<Vec<FieldElement>> = rows
            .iter()
            .map(|(coef, rhs)| {
                let mut r = coef.clone();
                r.push(*rhs);
                r
            })
            .collect();
        let mut pivot_row = 0;
        for col in 0..unknowns {
            let Some(p) = (pivot_row..m.len()).find(|&r| m[r][col] != 0) else {
                return Err(Error::SingularMatrix);
            };
            m.swap(pivot_row, p);
            let inv = self.inv(m[pivot_row][col])?;
            for c in col..=unknowns {
                m[pivot_row][c] = self.mul(m[pivot_row][c], inv);
            }
            for r in 0..m.len() {
                if r != pivot_row && m[r][col] != 0 {
                    let factor = m[r][col];
                    for c in col..=unknowns {
                        let sub = self.mul(factor, m[pivot_row][c]);
                        m[r][c] ^= sub;
                    }
                }
            }
            pivot_row += 1;
        }
        Ok((0..unknowns).map(|i| m[i][unknowns]).collect())
    }
}

/// Carry-less multiply of two GF(2)[x] polynomials followed by reduction.
/// Independent of the table path; the tables are checked against it in tests.
pub fn clmul_reduce(a: u16, b: u16, w: u32, poly: u32) -> u16 {
    let mut acc: u32 = 0;
    let mut aa = a as u32;
    let mut bb = b as u32;
    while bb != 0 {
        if bb & 1 == 1 {
            acc ^= aa;
        }
        aa <<= 1;
        bb >>= 1;
    }
    // Reduce modulo poly (degree w).
    let mut deg = 31 - acc.leading_zeros().min(31);
    while acc != 0 && deg >= w {
        acc ^= poly << (deg - w);
        if acc == 0 {
            break;
        }
        deg = 31 - acc.leading_zeros();
    }
    acc as u16
}

/// Trial division of `poly` (degree w) by every polynomial of degree
/// 1..=w/2 over GF(2).
fn check_irreducible(w: u32, poly: u32) -> Result<()> {
    for d in 1..=(w / 2) {
        for low in 0..(1u32 << d) {
            let divisor = (1u32 << d) | low;
            if poly_mod(poly, divisor) == 0 {
                return Err(Error::ReduciblePolynomial {
                    poly,
                    factor: divisor,
                });
            }
        }
    }
    Ok(())
}

fn poly_mod(mut a: u32, b: u32) -> u32 {
    let db = 31 - b.leading_zeros();
    while a != 0 {
        let da = 31 - a.leading_zeros();
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

/// Smallest element generating the full multiplicative group.
fn find_generator(w: u32, poly: u32) -> u16 {
    let order = (1u32 << w) - 1;
    'candidates: for g in 2..(1u16 << w) {
        let mut val: u16 = 1;
        for step in 1..=order {
            val = clmul_reduce(val, g, w, poly);
            if val == 1 {
                if step == order {
                    return g;
                }
                continue 'candidates;
            }
        }
    }
    unreachable!("every GF(2^w) has a primitive element")
}
