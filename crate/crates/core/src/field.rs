//! Arithmetic in the binary extension fields GF(2^m), 1 <= m <= 16.
//!
//! Elements are stored as `u16` in polynomial basis. Multiplication goes
//! through log/antilog tables built once per field from a fixed reduction
//! polynomial per degree.

use rand::Rng;
use thiserror::Error;

/// Reduction polynomial used for GF(256): x^8 + x^4 + x^3 + x + 1.
pub const GF256_POLY: u32 = 0x11B;

/// Irreducible reduction polynomial for each degree m (index = m).
pub const REDUCTION_POLYS: [u32; 17] = [
    0, 0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x83, GF256_POLY, 0x211, 0x409, 0x805, 0x1053, 0x201B,
    0x4443, 0x8003, 0x1100B,
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("field size must be 2^m with 1 <= m <= 16, got {0}")]
    UnsupportedSize(u32),
}

/// Field size and reduction polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    bits: u8,
    poly: u32,
}

impl FieldSpec {
    /// GF(2^bits) with the fixed polynomial from [`REDUCTION_POLYS`].
    pub fn with_bits(bits: u8) -> Result<Self, FieldError> {
        if !(1..=16).contains(&bits) {
            return Err(FieldError::UnsupportedSize(1u32.checked_shl(bits as u32).unwrap_or(0)));
        }
        Ok(Self { bits, poly: REDUCTION_POLYS[bits as usize] })
    }

    /// GF(q) for `q` a power of two.
    pub fn with_order(q: u32) -> Result<Self, FieldError> {
        if !q.is_power_of_two() || q < 2 {
            return Err(FieldError::UnsupportedSize(q));
        }
        Self::with_bits(q.trailing_zeros() as u8).map_err(|_| FieldError::UnsupportedSize(q))
    }

    pub fn gf256() -> Self {
        Self { bits: 8, poly: GF256_POLY }
    }

    pub fn gf16() -> Self {
        Self { bits: 4, poly: REDUCTION_POLYS[4] }
    }

    pub fn bits(&self) -> u8 {
        self.bits
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    /// Number of field elements q = 2^m.
    pub fn order(&self) -> u32 {
        1 << self.bits
    }
}

impl Default for FieldSpec {
    fn default() -> Self {
        Self::gf256()
    }
}

/// Shift-and-add multiply with reduction; used to build the tables.
fn mul_reduce(mut a: u32, mut b: u32, spec: FieldSpec) -> u32 {
    let top = 1u32 << spec.bits;
    let mut acc = 0;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= spec.poly;
        }
    }
    acc
}

/// Table-driven GF(2^m).
#[derive(Debug, Clone)]
pub struct GaloisField {
    spec: FieldSpec,
    // exp has 2(q-1) entries so log sums index without a modulo.
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl GaloisField {
    pub fn new(spec: FieldSpec) -> Self {
        let q = spec.order();
        let group = q - 1;
        let generator = (1..q)
            .find(|&g| {
                let mut x = g;
                for order in 1..=group {
                    if x == 1 {
                        return order == group;
                    }
                    x = mul_reduce(x, g, spec);
                }
                false
            })
            .expect("multiplicative group of a finite field is cyclic");

        let mut exp = vec![0u16; 2 * group as usize];
        let mut log = vec![0u16; q as usize];
        let mut x = 1u32;
        for i in 0..group as usize {
            exp[i] = x as u16;
            exp[i + group as usize] = x as u16;
            log[x as usize] = i as u16;
            x = mul_reduce(x, generator, spec);
        }
        Self { spec, exp, log }
    }

    pub fn gf256() -> Self {
        Self::new(FieldSpec::gf256())
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn order(&self) -> u32 {
        self.spec.order()
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: u16) -> u16 {
        assert_ne!(a, 0, "zero has no multiplicative inverse");
        let group = self.order() as usize - 1;
        self.exp[(group - self.log[a as usize] as usize) % group]
    }

    #[inline]
    pub fn div(&self, a: u16, b: u16) -> u16 {
        self.mul(a, self.inv(b))
    }

    pub fn contains(&self, a: u16) -> bool {
        (a as u32) < self.order()
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u16 {
        rng.random_range(0..self.order()) as u16
    }

    /// `dst += c * src`, elementwise.
    pub fn mul_add_into(&self, dst: &mut [u16], src: &[u16], c: u16) {
        debug_assert_eq!(dst.len(), src.len());
        if c == 0 {
            return;
        }
        let lc = self.log[c as usize] as usize;
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d ^= self.exp[lc + self.log[s as usize] as usize];
            }
        }
    }

    pub fn scale(&self, row: &mut [u16], c: u16) {
        for x in row.iter_mut() {
            *x = self.mul(*x, c);
        }
    }
}
