//! Dense bit storage for square 0/1 matrices and node subsets.

use alloc::vec;
use alloc::vec::Vec;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

/// A subset of `0..len` stored one bit per element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Square `n x n` bit matrix, row-major, each row padded to whole words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(n: usize) -> Self {
        let stride = words_for(n);
        BitMatrix {
            n,
            stride,
            data: vec![0; stride * n],
        }
    }

    /// All ones except the diagonal.
    pub fn off_diagonal_ones(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n);
        let tail = n % 64;
        for i in 0..n {
            let row = &mut m.data[i * m.stride..(i + 1) * m.stride];
            row.fill(u64::MAX);
            if tail != 0 {
                if let Some(last) = row.last_mut() {
                    *last = (1u64 << tail) - 1;
                }
            }
            row[i / 64] &= !(1 << (i % 64));
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.stride + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let w = &mut self.data[i * self.stride + j / 64];
        if value {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    /// Sets `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set_sym(&mut self, i: usize, j: usize, value: bool) {
        self.set(i, j, value);
        self.set(j, i, value);
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    /// Number of set bits in row `i` that are also in `mask`.
    #[inline]
    pub fn count_in(&self, i: usize, mask: &BitSet) -> u64 {
        debug_assert_eq!(mask.len, self.n);
        self.row(i)
            .iter()
            .zip(&mask.words)
            .map(|(a, b)| (a & b).count_ones() as u64)
            .sum()
    }

    pub fn row_count(&self, i: usize) -> u64 {
        self.row(i).iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn count_ones(&self) -> u64 {
        self.data.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn diagonal_is_zero(&self) -> bool {
        (0..self.n).all(|i| !self.get(i, i))
    }

    /// Submatrix on `nodes`, in the given order.
    pub fn induced(&self, nodes: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(nodes.len());
        for (a, &u) in nodes.iter().enumerate() {
            for (b, &v) in nodes.iter().enumerate() {
                if self.get(u, v) {
                    out.set(a, b, true);
                }
            }
        }
        out
    }
}
