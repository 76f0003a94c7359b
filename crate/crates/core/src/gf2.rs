//! Binary linear algebra over the two-element field.
//!
//! Vectors and matrix rows are packed into `u64` words; the matrix-vector
//! product is an AND / XOR-fold / popcount-parity loop per row. Unused bits of
//! the last word are kept zero at all times so word-wise operations need no
//! masking on the read side.

use rand::Rng;

use crate::{Error, Result};

const WORD_BITS: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

fn tail_mask(bits: usize) -> u64 {
    let rem = bits % WORD_BITS;
    if rem == 0 {
        !0
    } else {
        (1u64 << rem) - 1
    }
}

/// A bit vector over GF(2).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryVector {
    words: Vec<u64>,
    len: usize,
}

impl BinaryVector {
    pub fn zeros(len: usize) -> Self {
        assert!(len > 0, "binary vector length must be positive");
        Self { words: vec![0; words_for(len)], len }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            debug_assert!(b <= 1);
            if b == 1 {
                v.set(i, true);
            }
        }
        v
    }

    /// Interpret the low `len` bits of `value` as a vector (bit 0 first).
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mut v = Self::zeros(len);
        v.words[0] = value & tail_mask(len.min(64));
        v
    }

    /// The vector as an integer, for lengths up to 64 bits.
    pub fn as_u64(&self) -> u64 {
        assert!(self.len <= 64);
        self.words[0]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if bit {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn fill_random<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let n = self.words.len();
        for w in &mut self.words {
            *w = rng.random();
        }
        self.words[n - 1] &= tail_mask(self.len);
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(len);
        v.fill_random(rng);
        v
    }

    /// Elementwise XOR.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                context: "vector xor",
                expected: self.len,
                got: other.len,
            });
        }
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Self { words, len: self.len })
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_bits(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len).map(move |i| self.get(i) as u8)
    }

    fn words(&self) -> &[u64] {
        &self.words
    }
}

/// A dense matrix over GF(2) with word-packed rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let words_per_row = words_for(cols);
        Self {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        self.row_words(r)[c / WORD_BITS] >> (c % WORD_BITS) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = r * self.words_per_row + c / WORD_BITS;
        let mask = 1u64 << (c % WORD_BITS);
        if bit {
            self.data[w] |= mask;
        } else {
            self.data[w] &= !mask;
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words_per_row..(r + 1) * self.words_per_row]
    }
}

/// A matrix with every entry an independent fair coin flip.
pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> BinaryMatrix {
    let mut m = BinaryMatrix::zeros(rows, cols);
    let mask = tail_mask(cols);
    let wpr = m.words_per_row;
    for r in 0..rows {
        for w in 0..wpr {
            m.data[r * wpr + w] = rng.random();
        }
        m.data[r * wpr + wpr - 1] &= mask;
    }
    m
}

/// Matrix-vector product over GF(2): per row, the parity of the AND with the
/// vector.
pub fn matvec(a: &BinaryMatrix, v: &BinaryVector) -> Result<BinaryVector> {
    if a.cols != v.len() {
        return Err(Error::DimensionMismatch {
            context: "matvec",
            expected: a.cols,
            got: v.len(),
        });
    }
    let mut out = BinaryVector::zeros(a.rows);
    let vw = v.words();
    for r in 0..a.rows {
        let mut acc = 0u64;
        for (x, y) in a.row_words(r).iter().zip(vw) {
            acc ^= x & y;
        }
        if acc.count_ones() & 1 == 1 {
            out.set(r, true);
        }
    }
    Ok(out)
}

/// Rank over GF(2), by row elimination on a working copy. Diagnostic only.
pub fn rank(a: &BinaryMatrix) -> usize {
    let mut rows: Vec<Vec<u64>> = (0..a.rows).map(|r| a.row_words(r).to_vec()).collect();
    let mut rank = 0;
    for c in 0..a.cols {
        let (w, b) = (c / WORD_BITS, c % WORD_BITS);
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][w] >> b & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] >> b & 1 == 1 {
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x ^= p;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::{derive, Domain};

    /// Reference triple-loop product, independent of the packed layout.
    pub(crate) fn naive_matvec(a: &BinaryMatrix, v: &BinaryVector) -> BinaryVector {
        let mut out = BinaryVector::zeros(a.rows());
        for r in 0..a.rows() {
            let mut acc = 0u8;
            for c in 0..a.cols() {
                acc ^= (a.get(r, c) as u8) & (v.get(c) as u8);
            }
            out.set(r, acc == 1);
        }
        out
    }

    #[test]
    fn identity_preserves_vector() {
        let mut rng = derive(11, Domain::TestGen, 0);
        let v = BinaryVector::random(97, &mut rng);
        let id = BinaryMatrix::identity(97);
        assert_eq!(matvec(&id, &v).unwrap(), v);
    }

    #[test]
    fn hand_example_2x2() {
        // A = [[1,1],[0,1]], v = (1,1) -> (0,1)
        let mut a = BinaryMatrix::zeros(2, 2);
        a.set(0, 0, true);
        a.set(0, 1, true);
        a.set(1, 1, true);
        let v = BinaryVector::from_bits(&[1, 1]);
        let out = matvec(&a, &v).unwrap();
        assert_eq!(out.iter_bits().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn zero_matrix_gives_zero_vector() {
        let a = BinaryMatrix::zeros(5, 9);
        let mut rng = derive(12, Domain::TestGen, 0);
        let v = BinaryVector::random(9, &mut rng);
        assert_eq!(matvec(&a, &v).unwrap(), BinaryVector::zeros(5));
    }

    #[test]
    fn dimension_mismatch_errors() {
        let a = BinaryMatrix::zeros(4, 8);
        let v = BinaryVector::zeros(9);
        assert!(matches!(
            matvec(&a, &v),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn packed_equals_naive_on_random_instances() {
        let mut rng = derive(13, Domain::TestGen, 1);
        for &(r, c) in &[(1, 1), (3, 70), (64, 64), (65, 130), (128, 512), (512, 512)] {
            let a = random_matrix(r, c, &mut rng);
            let v = BinaryVector::random(c, &mut rng);
            assert_eq!(matvec(&a, &v).unwrap(), naive_matvec(&a, &v), "{r}x{c}");
        }
    }

    #[test]
    fn linearity_on_random_triples() {
        let mut rng = derive(14, Domain::TestGen, 2);
        for _ in 0..2000 {
            let a = random_matrix(24, 24, &mut rng);
            let u = BinaryVector::random(24, &mut rng);
            let v = BinaryVector::random(24, &mut rng);
            let lhs = matvec(&a, &u.xor(&v).unwrap()).unwrap();
            let rhs = matvec(&a, &u)
                .unwrap()
                .xor(&matvec(&a, &v).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn random_matrix_is_seed_deterministic_and_seed_sensitive() {
        let a = random_matrix(16, 16, &mut derive(42, Domain::RelayMatrix, 1));
        let b = random_matrix(16, 16, &mut derive(42, Domain::RelayMatrix, 1));
        assert_eq!(a, b);
        let c = random_matrix(16, 16, &mut derive(43, Domain::RelayMatrix, 1));
        assert_ne!(a, c);
    }

    #[test]
    fn random_matrix_regression_golden() {
        let a = random_matrix(3, 8, &mut derive(7, Domain::RelayMatrix, 0));
        let rows: Vec<u64> = (0..3).map(|r| a.row_words(r)[0]).collect();
        // frozen from the first run; guards the generation order
        assert_eq!(rows, vec![25, 79, 84]);
    }

    #[test]
    fn entry_frequency_is_half() {
        let mut rng = derive(15, Domain::TestGen, 3);
        let a = random_matrix(1000, 1000, &mut rng);
        let ones: usize = (0..1000).map(|r| {
            a.row_words(r).iter().map(|w| w.count_ones() as usize).sum::<usize>()
        }).sum();
        let freq = ones as f64 / 1e6;
        assert!((freq - 0.5).abs() < 0.002, "freq = {freq}");
    }

    #[test]
    fn rank_of_identity_and_zero() {
        assert_eq!(rank(&BinaryMatrix::identity(17)), 17);
        assert_eq!(rank(&BinaryMatrix::zeros(5, 5)), 0);
        // rank of [[1,1],[1,1]] is 1
        let mut a = BinaryMatrix::zeros(2, 2);
        for r in 0..2 {
            for c in 0..2 {
                a.set(r, c, true);
            }
        }
        assert_eq!(rank(&a), 1);
    }
}
