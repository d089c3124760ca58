//! BPSK over a coherent block-fading link.
//!
//! Model: `ỹ = |h|·√γ·x̃ + n`, `n ~ N(0, 1)`, with `|h|` known at the
//! receiver. Gains are i.i.d. per symbol and held for `N_b` consecutive
//! blocks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::capacity::{FadingDistribution, SnrPoint};
use crate::decoder::{LlrVector, LLR_CLAMP};
use crate::error::{Error, Result};

/// Which channel a simulation runs over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelModel {
    Awgn,
    Fading(FadingDistribution),
}

impl ChannelModel {
    /// The fading law, with AWGN as unit gain.
    pub fn distribution(&self) -> FadingDistribution {
        match *self {
            ChannelModel::Awgn => FadingDistribution::FixedMu(1.0),
            ChannelModel::Fading(d) => d,
        }
    }
}

/// Per-symbol gain magnitudes for one fading epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h_abs: Vec<f64>,
    /// Blocks left before the realization is redrawn.
    pub blocks_remaining: usize,
}

impl ChannelRealization {
    pub fn unit(len: usize) -> Self {
        ChannelRealization {
            h_abs: vec![1.0; len],
            blocks_remaining: usize::MAX,
        }
    }

    pub fn len(&self) -> usize {
        self.h_abs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h_abs.is_empty()
    }
}

/// Observations after coherent conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedBlock {
    pub y: Vec<f64>,
}

/// `0 → +1`, `1 → −1`.
pub fn modulate(x: &[u8]) -> Vec<f64> {
    x.iter().map(|&b| if b & 1 == 0 { 1.0 } else { -1.0 }).collect()
}

/// Draws `len` gains from `dist`. `FixedMu` consumes no randomness.
pub fn draw_fading<R: Rng + ?Sized>(
    len: usize,
    dist: FadingDistribution,
    n_blocks: usize,
    rng: &mut R,
) -> Result<ChannelRealization> {
    if len == 0 || n_blocks == 0 {
        return Err(Error::invalid("need at least one symbol and one block per realization"));
    }
    dist.validate()?;
    let h_abs = match dist {
        FadingDistribution::FixedMu(mu) => vec![mu; len],
        FadingDistribution::HalfNormal => (0..len)
            .map(|_| rng.sample::<f64, _>(StandardNormal).abs())
            .collect(),
    };
    Ok(ChannelRealization {
        h_abs,
        blocks_remaining: n_blocks,
    })
}

/// Sequential block-fading source: one realization per `n_blocks` blocks.
#[derive(Debug, Clone)]
pub struct BlockFading {
    len: usize,
    dist: FadingDistribution,
    n_blocks: usize,
    current: Option<ChannelRealization>,
}

impl BlockFading {
    pub fn new(len: usize, dist: FadingDistribution, n_blocks: usize) -> Result<Self> {
        if len == 0 || n_blocks == 0 {
            return Err(Error::invalid("need at least one symbol and one block per realization"));
        }
        dist.validate()?;
        Ok(BlockFading {
            len,
            dist,
            n_blocks,
            current: None,
        })
    }

    /// Gains for the next block, redrawing when the epoch is exhausted.
    pub fn next_block<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<&ChannelRealization> {
        let expired = self.current.as_ref().is_none_or(|c| c.blocks_remaining == 0);
        if expired {
            self.current = Some(draw_fading(self.len, self.dist, self.n_blocks, rng)?);
        }
        let cur = self.current.as_mut().expect("just drawn");
        cur.blocks_remaining -= 1;
        Ok(cur)
    }
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::invalid(format!("length mismatch: {a} symbols vs {b} gains")));
    }
    Ok(())
}

/// `y_i = |h_i|·√γ·x̃_i + n_i` with unit-variance Gaussian noise.
pub fn transmit<R: Rng + ?Sized>(
    symbols: &[f64],
    ch: &ChannelRealization,
    snr: SnrPoint,
    rng: &mut R,
) -> Result<ReceivedBlock> {
    check_len(symbols.len(), ch.len())?;
    let amp = snr.amplitude();
    let y = symbols
        .iter()
        .zip(&ch.h_abs)
        .map(|(&s, &h)| h * amp * s + rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(ReceivedBlock { y })
}

/// [`transmit`] with the noise switched off.
pub fn transmit_noiseless(symbols: &[f64], ch: &ChannelRealization, snr: SnrPoint) -> Result<ReceivedBlock> {
    check_len(symbols.len(), ch.len())?;
    let amp = snr.amplitude();
    Ok(ReceivedBlock {
        y: symbols.iter().zip(&ch.h_abs).map(|(&s, &h)| h * amp * s).collect(),
    })
}

/// Plain AWGN: `y_i = √γ·x̃_i + n_i`.
pub fn transmit_awgn<R: Rng + ?Sized>(symbols: &[f64], snr: SnrPoint, rng: &mut R) -> ReceivedBlock {
    let amp = snr.amplitude();
    ReceivedBlock {
        y: symbols
            .iter()
            .map(|&s| amp * s + rng.sample::<f64, _>(StandardNormal))
            .collect(),
    }
}

/// Coherent LLRs `2·|h_i|·√γ·y_i`, saturated at the decoder clamp.
pub fn demap_llr(rx: &ReceivedBlock, ch: &ChannelRealization, snr: SnrPoint) -> Result<LlrVector> {
    check_len(rx.y.len(), ch.len())?;
    let amp = snr.amplitude();
    LlrVector::new(
        rx.y.iter()
            .zip(&ch.h_abs)
            .map(|(&y, &h)| (2.0 * h * amp * y).clamp(-LLR_CLAMP, LLR_CLAMP))
            .collect(),
    )
}

/// AWGN LLRs `2·√γ·y_i`.
pub fn demap_llr_awgn(rx: &ReceivedBlock, snr: SnrPoint) -> Result<LlrVector> {
    let amp = snr.amplitude();
    LlrVector::new(rx.y.iter().map(|&y| (2.0 * amp * y).clamp(-LLR_CLAMP, LLR_CLAMP)).collect())
}
