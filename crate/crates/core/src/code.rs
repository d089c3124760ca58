use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::gf2::{kron_transform_in_place, submatrix, Gf2Matrix};

/// A polar code `(N, K, A, u_{A^c})`.
///
/// `info_set` is strictly increasing. `frozen_values` holds one bit per
/// frozen position, in ascending index order. The inverse of `G_AA` used
/// by the systematic encoder is computed on first use and then shared.
#[derive(Debug, Clone)]
pub struct CodeConfig {
    n: u32,
    info_set: Vec<usize>,
    frozen_values: Vec<u8>,
    is_info: Vec<bool>,
    /// `u` with info positions zeroed and frozen values in place.
    frozen_pattern: Vec<u8>,
    systematic_inverse: OnceLock<Gf2Matrix>,
}

impl PartialEq for CodeConfig {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.info_set == other.info_set && self.frozen_values == other.frozen_values
    }
}

impl CodeConfig {
    /// Code with all-zero frozen bits.
    pub fn new(block_len: usize, info_set: Vec<usize>) -> Result<Self> {
        let frozen = block_len.saturating_sub(info_set.len());
        Self::with_frozen_values(block_len, info_set, vec![0; frozen])
    }

    pub fn with_frozen_values(block_len: usize, info_set: Vec<usize>, frozen_values: Vec<u8>) -> Result<Self> {
        if block_len == 0 || !block_len.is_power_of_two() {
            return Err(Error::invalid(format!("block length {block_len} is not a power of two")));
        }
        if info_set.len() > block_len {
            return Err(Error::invalid(format!(
                "K = {} exceeds N = {block_len}",
                info_set.len()
            )));
        }
        if info_set.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("information set must be strictly increasing"));
        }
        if let Some(&last) = info_set.last() {
            if last >= block_len {
                return Err(Error::invalid(format!("index {last} out of range for N = {block_len}")));
            }
        }
        if frozen_values.len() != block_len - info_set.len() {
            return Err(Error::invalid(format!(
                "expected {} frozen values, got {}",
                block_len - info_set.len(),
                frozen_values.len()
            )));
        }
        if frozen_values.iter().any(|&b| b > 1) {
            return Err(Error::invalid("frozen values must be bits"));
        }

        let mut is_info = vec![false; block_len];
        for &i in &info_set {
            is_info[i] = true;
        }
        let mut frozen_pattern = vec![0u8; block_len];
        let frozen_positions = (0..block_len).filter(|&i| !is_info[i]);
        for (pos, &v) in frozen_positions.zip(&frozen_values) {
            frozen_pattern[pos] = v;
        }

        Ok(CodeConfig {
            n: block_len.trailing_zeros(),
            info_set,
            frozen_values,
            is_info,
            frozen_pattern,
            systematic_inverse: OnceLock::new(),
        })
    }

    /// `log2(N)`.
    pub fn exponent(&self) -> u32 {
        self.n
    }

    pub fn block_len(&self) -> usize {
        1 << self.n
    }

    pub fn info_len(&self) -> usize {
        self.info_set.len()
    }

    pub fn rate(&self) -> f64 {
        self.info_len() as f64 / self.block_len() as f64
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn frozen_values(&self) -> &[u8] {
        &self.frozen_values
    }

    pub fn frozen_set(&self) -> Vec<usize> {
        (0..self.block_len()).filter(|&i| !self.is_info[i]).collect()
    }

    pub fn is_info(&self, index: usize) -> bool {
        self.is_info[index]
    }

    pub(crate) fn info_mask(&self) -> &[bool] {
        &self.is_info
    }

    /// Frozen value at every position, zero at info positions.
    pub fn frozen_pattern(&self) -> &[u8] {
        &self.frozen_pattern
    }

    /// `(G_AA)^{-1}`. `G` is lower unitriangular, so every principal
    /// submatrix is too and the inverse always exists.
    pub fn systematic_inverse(&self) -> Result<&Gf2Matrix> {
        if let Some(inv) = self.systematic_inverse.get() {
            return Ok(inv);
        }
        let inv = submatrix(self.n, &self.info_set, &self.info_set)?.invert()?;
        Ok(self.systematic_inverse.get_or_init(|| inv))
    }

    /// `u_{A^c} · G_{A^c A}`: the frozen bits' contribution at info positions.
    pub(crate) fn frozen_contribution(&self) -> Vec<u8> {
        if self.frozen_values.iter().all(|&b| b == 0) {
            return vec![0; self.info_len()];
        }
        let mut x = self.frozen_pattern.clone();
        kron_transform_in_place(&mut x).expect("block length is a power of two");
        self.info_set.iter().map(|&i| x[i]).collect()
    }
}
