//! Polar codes over AWGN and block-fading channels.
//!
//! The crate covers the whole link: GF(2) transforms and the systematic
//! inverse ([`gf2`], [`code`]), encoders ([`encoder`]), successive
//! cancellation decoding ([`decoder`]), capacity and design-SNR numerics
//! ([`capacity`]), bit-channel ranking ([`construction`]), the fading link
//! ([`channel`]), rate adaptation on weak channel gains ([`adapt`]) and a
//! Monte-Carlo sweep harness with CSV/SVG output ([`sim`]).
//!
//! Kernel convention: `G = F^{⊗n}` with the lower-triangular kernel
//! `F = [[1,0],[1,1]]`, no bit-reversal, 0-based indices. Under this
//! convention `G[i][j] = 1` iff the bits of `j` are a subset of the bits
//! of `i`.

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adapt;
pub mod capacity;
pub mod channel;
pub mod code;
pub mod construction;
pub mod decoder;
pub mod encoder;
pub mod error;
pub mod gf2;
mod quadrature;
pub mod sim;

pub use adapt::{adapt_indices, adapted_code_config, unreliable_fraction, AdaptConfig, AdaptedIndexSets, CapacityRule};
pub use capacity::{
    asymptotic_pe, biawgn_capacity, design_snr, equivalent_fading_snr, fading_capacity, q_func, q_inv,
    FadingDistribution, OffsetRule, SnrPoint,
};
pub use channel::{demap_llr, draw_fading, modulate, transmit, BlockFading, ChannelModel, ChannelRealization, ReceivedBlock};
pub use code::CodeConfig;
pub use construction::{ga_construct, load_order, mc_construct, save_order, select_info_set, Engine, ReliabilityOrder};
pub use decoder::{llr_f, llr_g, sc_decode, sc_decode_systematic, DecoderKind, LlrVector, ScDecoder, LLR_CLAMP};
pub use encoder::{encode_nonsystematic, encode_systematic, extract_systematic_info, Codeword};
pub use error::{Error, Result};
pub use gf2::{gf2_invert, kron_transform, submatrix, Gf2Matrix};
pub use sim::{emit_csv, emit_plot, run_experiment, ExperimentConfig, ExperimentKind, ExperimentOutput, SweepPoint, SweepResult};
