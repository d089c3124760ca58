//! Rate adaptation on weak channel gains.
//!
//! When gains below the reliability threshold `α` are seen at the
//! information positions, `⌊min(count, M)·c⌋` of the least reliable
//! information channels are frozen, `c` being the capacity at the
//! operating SNR. Only a prefix of the reliability order is re-read, so
//! the cost is `O(N)` whatever `α` and `M` are.

use crate::capacity::{biawgn_capacity, FadingDistribution, SnrPoint, FIXED_OFFSET_DB};
use crate::code::CodeConfig;
use crate::construction::ReliabilityOrder;
use crate::error::{Error, Result};

/// How the per-symbol capacity `c` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CapacityRule {
    /// `C(E{|h|}·√γ)`.
    #[default]
    MeanGain,
    /// `C(√γ_h)` with `γ_h = γ − 8 dB`.
    MinusEightDb,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptConfig {
    /// Gains strictly below this are unreliable.
    pub alpha: f64,
    /// Cap on the number of unreliable gains acted upon.
    pub cap_m: usize,
    /// Operating SNR.
    pub snr: SnrPoint,
    pub dist: FadingDistribution,
    pub rule: CapacityRule,
}

impl AdaptConfig {
    pub fn validate(&self, block_len: usize) -> Result<()> {
        if !(self.alpha >= 0.0) {
            return Err(Error::invalid(format!("alpha must be non-negative, got {}", self.alpha)));
        }
        if self.cap_m > block_len {
            return Err(Error::invalid(format!("M = {} exceeds N = {block_len}", self.cap_m)));
        }
        self.dist.validate()
    }

    /// Information lost per unreliable observation, in bits.
    pub fn capacity(&self) -> Result<f64> {
        match self.rule {
            CapacityRule::MeanGain => biawgn_capacity(self.dist.mu_abs() * self.snr.amplitude()),
            CapacityRule::MinusEightDb => {
                biawgn_capacity(SnrPoint::from_db(self.snr.db() + FIXED_OFFSET_DB).amplitude())
            }
        }
    }
}

/// `p = Pr{|h| ≤ α}`.
pub fn unreliable_fraction(alpha: f64, dist: FadingDistribution) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::invalid(format!("alpha must be non-negative, got {alpha}")));
    }
    dist.validate()?;
    Ok(dist.cdf(alpha))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedIndexSets {
    /// Ascending indices still carrying data.
    pub coding_idx: Vec<usize>,
    /// Ascending frozen indices.
    pub frozen_idx: Vec<usize>,
    /// Channels moved from data to frozen (`Num`).
    pub num_dropped: usize,
    /// Unreliable gains seen at the information positions (`rm_Num`).
    pub unreliable: usize,
}

/// `⌊N·R⌋`, tolerant of representation error in `R`.
pub fn info_count(block_len: usize, rate: f64) -> usize {
    ((block_len as f64 * rate) * (1.0 + 1e-12)).floor() as usize
}

/// Core of [`adapt_indices`] with the capacity supplied directly.
pub fn adapt_with_capacity(
    h_abs: &[f64],
    alpha: f64,
    cap_m: usize,
    n_info: usize,
    capacity: f64,
    qs: &ReliabilityOrder,
) -> Result<AdaptedIndexSets> {
    let block_len = qs.block_len();
    if h_abs.len() != block_len {
        return Err(Error::invalid(format!(
            "{} gains for a length-{block_len} reliability order",
            h_abs.len()
        )));
    }
    if n_info > block_len {
        return Err(Error::invalid(format!("n_info = {n_info} exceeds N = {block_len}")));
    }
    if !(0.0..=1.0).contains(&capacity) {
        return Err(Error::invalid(format!("capacity {capacity} outside [0, 1]")));
    }

    // Gains are read at the current information positions.
    let unreliable = qs.order[..n_info].iter().filter(|&&i| h_abs[i] < alpha).count();
    let counted = unreliable.min(cap_m);
    let num_dropped = ((counted as f64 * capacity).floor() as usize).min(n_info);

    let keep = n_info - num_dropped;
    let mut coding_idx = qs.order[..keep].to_vec();
    let mut frozen_idx = qs.order[keep..].to_vec();
    coding_idx.sort_unstable();
    frozen_idx.sort_unstable();
    Ok(AdaptedIndexSets {
        coding_idx,
        frozen_idx,
        num_dropped,
        unreliable,
    })
}

/// Shrinks the information set for one fading realization.
pub fn adapt_indices(h_abs: &[f64], cfg: &AdaptConfig, rate: f64, qs: &ReliabilityOrder) -> Result<AdaptedIndexSets> {
    cfg.validate(qs.block_len())?;
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::invalid(format!("rate must lie in (0, 1], got {rate}")));
    }
    let n_info = info_count(qs.block_len(), rate);
    adapt_with_capacity(h_abs, cfg.alpha, cfg.cap_m, n_info, cfg.capacity()?, qs)
}

/// The code after adaptation; newly frozen positions carry 0.
pub fn adapted_code_config(base: &CodeConfig, sets: &AdaptedIndexSets) -> Result<CodeConfig> {
    let block_len = base.block_len();
    if sets.coding_idx.len() + sets.frozen_idx.len() != block_len {
        return Err(Error::invalid("adapted index sets do not cover the block"));
    }
    if base.info_set() == sets.coding_idx.as_slice() {
        return Ok(base.clone());
    }
    let frozen_values = sets
        .frozen_idx
        .iter()
        .map(|&i| if base.is_info(i) { 0 } else { base.frozen_pattern()[i] })
        .collect();
    CodeConfig::with_frozen_values(block_len, sets.coding_idx.clone(), frozen_values)
}
