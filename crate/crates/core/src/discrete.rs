//! The discrete interface: bit-tuple modulator and sign-discarding quantizer.
//!
//! A complex symbol is represented by a `2n`-bit tuple ordered
//! `(x_R(1), ..., x_R(n), x_I(1), ..., x_I(n))`. On the transmit side, bit
//! `x(k)` carries weight `2^-k` in the fractional expansion of the component,
//! and the symbol is `(x_R + i x_I) / sqrt(2)`, so every symbol satisfies the
//! unit power constraint. On the receive side, each component keeps the `n`
//! low-order bits of the integer part of its absolute value — the sign and
//! the fractional part are discarded, higher-order bits are truncated — and
//! bit `y(k)` is the bit of weight `2^(k-1)` of that value.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::gf2::BinaryVector;
use crate::topology::Precision;
use crate::{Error, Result};

/// A `2n`-bit per-symbol tuple. Position `p` (0-based) stores the `p`-th entry
/// of the ordering above; positions `0..n` are the real-component bits,
/// positions `n..2n` the imaginary-component bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitTuple {
    bits: u64,
    n: Precision,
}

impl BitTuple {
    pub fn zero(n: Precision) -> Self {
        Self { bits: 0, n }
    }

    /// Build from the positional bit index (bit `p` of `index` is position `p`).
    pub fn from_index(index: u64, n: Precision) -> Self {
        debug_assert!(n.tuple_bits() <= 63);
        debug_assert!(index < 1 << n.tuple_bits());
        Self { bits: index, n }
    }

    /// Build from an explicit bit slice in tuple order.
    pub fn from_bits(bits: &[u8], n: Precision) -> Result<Self> {
        if bits.len() != n.tuple_bits() {
            return Err(Error::DimensionMismatch {
                context: "bit tuple",
                expected: n.tuple_bits(),
                got: bits.len(),
            });
        }
        let mut value = 0u64;
        for (p, &b) in bits.iter().enumerate() {
            debug_assert!(b <= 1);
            value |= (b as u64) << p;
        }
        Ok(Self { bits: value, n })
    }

    /// Build from per-component integer values in `[0, 2^n)`.
    pub fn from_component_values(re: u64, im: u64, n: Precision) -> Self {
        debug_assert!(re < n.component_levels() && im < n.component_levels());
        Self { bits: re | im << n.get(), n }
    }

    pub fn precision(self) -> Precision {
        self.n
    }

    /// The tuple as an index into the `2^(2n)`-element alphabet.
    pub fn index(self) -> u64 {
        self.bits
    }

    pub fn bit(self, p: usize) -> u8 {
        debug_assert!(p < self.n.tuple_bits());
        (self.bits >> p & 1) as u8
    }

    pub fn bits_vec(self) -> Vec<u8> {
        (0..self.n.tuple_bits()).map(|p| self.bit(p)).collect()
    }

    /// Integer value of the real-component bits (weight `2^(k-1)` for bit `k`).
    pub fn re_value(self) -> u64 {
        self.bits & (n_mask(self.n))
    }

    /// Integer value of the imaginary-component bits.
    pub fn im_value(self) -> u64 {
        self.bits >> self.n.get() & n_mask(self.n)
    }
}

fn n_mask(n: Precision) -> u64 {
    (1u64 << n.get()) - 1
}

/// Map a bit tuple to its transmit symbol:
/// `(sum_k 2^-k x_R(k) + i sum_k 2^-k x_I(k)) / sqrt(2)`.
///
/// The squared magnitude is at most `(1 - 2^-n)^2 < 1`.
pub fn encode_symbol(tuple: BitTuple) -> Complex64 {
    let n = tuple.n.get() as usize;
    let mut re = 0.0;
    let mut im = 0.0;
    for k in 1..=n {
        let w = 2f64.powi(-(k as i32));
        if tuple.bit(k - 1) == 1 {
            re += w;
        }
        if tuple.bit(n + k - 1) == 1 {
            im += w;
        }
    }
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Quantize one real component: `floor(|y|) mod 2^n`.
pub fn quantize_component(y: f64, n: Precision) -> u64 {
    debug_assert!(y.is_finite());
    let m = y.abs().floor();
    // both operands are integer-valued floats, so the remainder is exact
    (m % n.component_levels() as f64) as u64
}

/// Quantize a complex reception to its `2n`-bit tuple.
pub fn quantize(y: Complex64, n: Precision) -> BitTuple {
    BitTuple::from_component_values(
        quantize_component(y.re, n),
        quantize_component(y.im, n),
        n,
    )
}

/// Adjoin `N` tuples into one `2nN`-bit block, time-major: the tuple for time
/// `t` occupies bit positions `2n*t .. 2n*(t+1)`.
pub fn pack_block(tuples: &[BitTuple]) -> Result<BinaryVector> {
    let Some(first) = tuples.first() else {
        return Err(Error::Config("cannot pack an empty block".into()));
    };
    let n = first.n;
    let w = n.tuple_bits();
    let mut block = BinaryVector::zeros(w * tuples.len());
    for (t, tuple) in tuples.iter().enumerate() {
        if tuple.n != n {
            return Err(Error::DimensionMismatch {
                context: "pack_block tuple precision",
                expected: n.get() as usize,
                got: tuple.n.get() as usize,
            });
        }
        for p in 0..w {
            if tuple.bit(p) == 1 {
                block.set(w * t + p, true);
            }
        }
    }
    Ok(block)
}

/// Split a `2nN`-bit block back into its `N` per-symbol tuples.
pub fn unpack_block(block: &BinaryVector, n: Precision, num_symbols: usize) -> Result<Vec<BitTuple>> {
    let w = n.tuple_bits();
    if block.len() != w * num_symbols {
        return Err(Error::DimensionMismatch {
            context: "unpack_block",
            expected: w * num_symbols,
            got: block.len(),
        });
    }
    let mut out = Vec::with_capacity(num_symbols);
    for t in 0..num_symbols {
        let mut bits = 0u64;
        for p in 0..w {
            if block.get(w * t + p) {
                bits |= 1 << p;
            }
        }
        out.push(BitTuple { bits, n });
    }
    Ok(out)
}
