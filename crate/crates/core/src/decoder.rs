//! Successive-cancellation decoding in the LLR domain.
//!
//! The recursion follows `G_N = [[G', 0], [G', G']]`: the first half of
//! `u` sees `f(L_first, L_second)`, the second half sees
//! `g(L_first, L_second, v̂)` where `v̂` is the re-encoded first half.
//! LLRs are `log P(bit 0) / P(bit 1)` in nats and saturate at
//! [`LLR_CLAMP`].

use crate::code::CodeConfig;
use crate::error::{Error, Result};

/// Saturation bound for every LLR in the decoder.
pub const LLR_CLAMP: f64 = 40.0;

/// Check-node rule used by [`llr_f`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecoderKind {
    /// `2·atanh(tanh(a/2)·tanh(b/2))`.
    #[default]
    Exact,
    /// `sign(a)·sign(b)·min(|a|, |b|)`.
    MinSum,
}

/// Channel LLRs entering the decoder, clamped to `±LLR_CLAMP`.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrVector(Vec<f64>);

impl LlrVector {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        for v in values.iter_mut() {
            if v.is_nan() {
                return Err(Error::invalid("NaN LLR"));
            }
            *v = v.clamp(-LLR_CLAMP, LLR_CLAMP);
        }
        Ok(LlrVector(values))
    }

    /// Saturated LLRs for a known codeword: `+clamp` for 0, `-clamp` for 1.
    pub fn noiseless(x: &[u8]) -> Self {
        LlrVector(x.iter().map(|&b| if b == 0 { LLR_CLAMP } else { -LLR_CLAMP }).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[inline]
fn clamp(v: f64) -> f64 {
    v.clamp(-LLR_CLAMP, LLR_CLAMP)
}

#[inline]
fn f_exact(a: f64, b: f64) -> f64 {
    // 2·atanh(tanh(a/2)·tanh(b/2)) written as min-sum plus a correction,
    // which stays accurate when both magnitudes are large.
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    let min = a.abs().min(b.abs());
    sign * min + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

#[inline]
fn f_min_sum(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    sign * a.abs().min(b.abs())
}

/// Check-node (upper branch) LLR update.
#[inline]
pub fn llr_f_with(kind: DecoderKind, a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    clamp(match kind {
        DecoderKind::Exact => f_exact(a, b),
        DecoderKind::MinSum => f_min_sum(a, b),
    })
}

/// Exact check-node update.
pub fn llr_f(a: f64, b: f64) -> f64 {
    llr_f_with(DecoderKind::Exact, a, b)
}

/// Variable-node (lower branch) LLR update given the partial-sum bit.
#[inline]
pub fn llr_g(a: f64, b: f64, partial_bit: u8) -> f64 {
    clamp(if partial_bit & 1 == 0 { b + a } else { b - a })
}

trait Decide {
    fn decide(&mut self, index: usize, llr: f64) -> u8;

    /// Fixed `u` for a block with no free decisions, if the decider can
    /// skip it.
    fn fixed_block(&self, _offset: usize, _len: usize) -> Option<&[u8]> {
        None
    }
}

struct Standard<'a> {
    mask: &'a [bool],
    frozen: &'a [u8],
    info_prefix: &'a [usize],
}

impl Decide for Standard<'_> {
    #[inline]
    fn decide(&mut self, index: usize, llr: f64) -> u8 {
        if self.mask[index] {
            u8::from(llr < 0.0)
        } else {
            self.frozen[index]
        }
    }

    fn fixed_block(&self, offset: usize, len: usize) -> Option<&[u8]> {
        (self.info_prefix[offset + len] == self.info_prefix[offset]).then(|| &self.frozen[offset..offset + len])
    }
}

struct Genie<'a> {
    truth: &'a [u8],
    decision_llrs: &'a mut [f64],
}

impl Decide for Genie<'_> {
    #[inline]
    fn decide(&mut self, index: usize, llr: f64) -> u8 {
        self.decision_llrs[index] = llr;
        self.truth[index]
    }
}

/// Output of [`ScDecoder::decode`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScOutput {
    /// Estimated transform input `û`.
    pub u_hat: Vec<u8>,
    /// Re-encoded codeword estimate `û·G`.
    pub x_hat: Vec<u8>,
    /// `û` restricted to the information set.
    pub info_hat: Vec<u8>,
}

/// SC decoder with reusable scratch space. One instance per thread.
#[derive(Debug, Clone, Default)]
pub struct ScDecoder {
    kind: DecoderKind,
    scratch: Vec<f64>,
    info_prefix: Vec<usize>,
}

impl ScDecoder {
    pub fn new(kind: DecoderKind) -> Self {
        ScDecoder {
            kind,
            ..Default::default()
        }
    }

    pub fn kind(&self) -> DecoderKind {
        self.kind
    }

    fn prepare(&mut self, len: usize) {
        if self.scratch.len() < len {
            self.scratch.resize(len, 0.0);
        }
    }

    fn run<D: Decide>(&mut self, llrs: &[f64], decider: &mut D) -> (Vec<u8>, Vec<u8>) {
        let len = llrs.len();
        self.prepare(len);
        let mut u = vec![0u8; len];
        let mut x = vec![0u8; len];
        let kind = self.kind;
        node(kind, llrs, &mut self.scratch, 0, &mut u, &mut x, decider);
        (u, x)
    }

    /// SC decoding with frozen positions forced to their values. A decision
    /// LLR of exactly zero decodes to 0.
    pub fn decode(&mut self, cfg: &CodeConfig, llrs: &LlrVector) -> Result<ScOutput> {
        let len = cfg.block_len();
        if llrs.len() != len {
            return Err(Error::invalid(format!("expected {len} LLRs, got {}", llrs.len())));
        }
        let mut prefix = std::mem::take(&mut self.info_prefix);
        prefix.clear();
        prefix.push(0);
        let mut acc = 0;
        for &info in cfg.info_mask() {
            acc += usize::from(info);
            prefix.push(acc);
        }
        let mut decider = Standard {
            mask: cfg.info_mask(),
            frozen: cfg.frozen_pattern(),
            info_prefix: &prefix,
        };
        let (u_hat, x_hat) = self.run(llrs.as_slice(), &mut decider);
        self.info_prefix = prefix;
        let info_hat = cfg.info_set().iter().map(|&i| u_hat[i]).collect();
        Ok(ScOutput { u_hat, x_hat, info_hat })
    }

    /// Decodes and returns the estimate of `x_A`.
    pub fn decode_systematic(&mut self, cfg: &CodeConfig, llrs: &LlrVector) -> Result<Vec<u8>> {
        let out = self.decode(cfg, llrs)?;
        Ok(cfg.info_set().iter().map(|&i| out.x_hat[i]).collect())
    }

    /// Genie-aided SC: every decision is replaced by the true bit, and the
    /// LLR each bit channel saw is written to `decision_llrs`.
    pub fn decode_genie(&mut self, truth_u: &[u8], llrs: &LlrVector, decision_llrs: &mut [f64]) -> Result<()> {
        let len = llrs.len();
        if !len.is_power_of_two() || truth_u.len() != len || decision_llrs.len() != len {
            return Err(Error::invalid("genie decode needs matching power-of-two lengths"));
        }
        let mut decider = Genie {
            truth: truth_u,
            decision_llrs,
        };
        self.run(llrs.as_slice(), &mut decider);
        Ok(())
    }
}

fn node<D: Decide>(
    kind: DecoderKind,
    llr: &[f64],
    scratch: &mut [f64],
    offset: usize,
    u: &mut [u8],
    x: &mut [u8],
    decider: &mut D,
) {
    let len = llr.len();
    if len == 1 {
        let bit = decider.decide(offset, llr[0]);
        u[0] = bit;
        x[0] = bit;
        return;
    }
    if let Some(fixed) = decider.fixed_block(offset, len) {
        u.copy_from_slice(fixed);
        x.copy_from_slice(fixed);
        crate::gf2::kron_transform_in_place(x).expect("power of two");
        return;
    }
    let half = len / 2;
    let (first, second) = llr.split_at(half);
    let (child, rest) = scratch.split_at_mut(half);
    let (u_lo, u_hi) = u.split_at_mut(half);
    let (x_lo, x_hi) = x.split_at_mut(half);

    for ((c, &a), &b) in child.iter_mut().zip(first).zip(second) {
        *c = llr_f_with(kind, a, b);
    }
    node(kind, child, rest, offset, u_lo, x_lo, decider);

    for (((c, &a), &b), &bit) in child.iter_mut().zip(first).zip(second).zip(x_lo.iter()) {
        *c = llr_g(a, b, bit);
    }
    node(kind, child, rest, offset + half, u_hi, x_hi, decider);

    for (lo, &hi) in x_lo.iter_mut().zip(x_hi.iter()) {
        *lo ^= hi;
    }
}

/// SC decode returning `(û, û_A)`.
pub fn sc_decode(cfg: &CodeConfig, llrs: &LlrVector) -> Result<(Vec<u8>, Vec<u8>)> {
    let out = ScDecoder::new(DecoderKind::Exact).decode(cfg, llrs)?;
    Ok((out.u_hat, out.info_hat))
}

/// SC decode followed by re-encoding and projection onto `A`.
pub fn sc_decode_systematic(cfg: &CodeConfig, llrs: &LlrVector) -> Result<Vec<u8>> {
    ScDecoder::new(DecoderKind::Exact).decode_systematic(cfg, llrs)
}
