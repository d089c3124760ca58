//! Monte-Carlo link simulation over SNR sweeps.
//!
//! Every block draws its information bits and noise from its own ChaCha
//! stream `(seed, SNR point, block index)`, and fading realizations from a
//! stream keyed by the fading epoch, so results depend only on the
//! configuration and seed, never on the worker count. Blocks run in
//! fixed-size batches; the stopping rule is checked between batches.

mod csv;
mod plot;

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use self::csv::{emit_csv, read_sweep_csv, write_asymptotic_csv, write_design_snr_csv, SWEEP_HEADER};
pub use self::plot::{emit_plot, render_svg, PlotOptions, Series, BER_FLOOR};

use crate::adapt::{adapt_with_capacity, info_count, AdaptConfig, CapacityRule};
use crate::capacity::{
    asymptotic_exponent, asymptotic_pe, capacity_upper_bound, design_snr, equivalent_fading_snr, FadingDistribution,
    OffsetRule, SnrPoint,
};
use crate::channel::{
    demap_llr, demap_llr_awgn, draw_fading, modulate, transmit, transmit_awgn, ChannelModel, ChannelRealization,
};
use crate::code::CodeConfig;
use crate::construction::{
    ga_construct, load_order, mc_construct, order_to_string, save_order, select_info_set, Engine, ReliabilityOrder,
};
use crate::decoder::{DecoderKind, ScDecoder};
use crate::encoder::{encode_nonsystematic, encode_systematic};
use crate::error::{Error, Result};

/// Blocks simulated between two checks of the stopping rule.
pub const BATCH_BLOCKS: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    AwgnBer,
    FadingBer,
    AdaptBer,
    Construct,
    DesignSnr,
    Asymptotic,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::AwgnBer => "awgn-ber",
            ExperimentKind::FadingBer => "fading-ber",
            ExperimentKind::AdaptBer => "adapt-ber",
            ExperimentKind::Construct => "construct",
            ExperimentKind::DesignSnr => "design-snr",
            ExperimentKind::Asymptotic => "asymptotic",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "awgn-ber" => ExperimentKind::AwgnBer,
            "fading-ber" => ExperimentKind::FadingBer,
            "adapt-ber" => ExperimentKind::AdaptBer,
            "construct" => ExperimentKind::Construct,
            "design-snr" => ExperimentKind::DesignSnr,
            "asymptotic" => ExperimentKind::Asymptotic,
            other => return Err(Error::Config(format!("unknown experiment '{other}'"))),
        })
    }
}

/// Which SNR the reliability order is built at.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstructionMode {
    /// The operating SNR of each sweep point.
    Point,
    /// The equivalent AWGN SNR of each sweep point.
    Converted,
    /// One order at the design SNR of the rate.
    DesignSnr,
    /// A saved order.
    File(PathBuf),
}

impl std::str::FromStr for ConstructionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "point" => ConstructionMode::Point,
            "converted" => ConstructionMode::Converted,
            "design-snr" => ConstructionMode::DesignSnr,
            other => match other.strip_prefix("file:") {
                Some(p) if !p.is_empty() => ConstructionMode::File(PathBuf::from(p)),
                _ => return Err(Error::Config(format!("unknown construction mode '{other}'"))),
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub block_len: usize,
    pub rate: f64,
    pub snr_start_db: f64,
    pub snr_stop_db: f64,
    pub snr_step_db: f64,
    pub construction: ConstructionMode,
    pub engine: Engine,
    /// Genie-aided iterations when `engine` is Monte-Carlo.
    pub mc_iters: u64,
    pub systematic: bool,
    pub decoder: DecoderKind,
    /// Fading law for the fading experiments; ignored by `awgn-ber`.
    pub dist: FadingDistribution,
    /// Mapping used by `ConstructionMode::Converted`.
    pub offset_rule: OffsetRule,
    pub capacity_rule: CapacityRule,
    pub alpha: f64,
    pub cap_m: usize,
    /// Blocks per fading realization.
    pub fading_blocks: usize,
    pub max_blocks: u64,
    pub max_bit_errors: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::AwgnBer,
            block_len: 1024,
            rate: 0.36,
            snr_start_db: -2.0,
            snr_stop_db: 8.0,
            snr_step_db: 1.0,
            construction: ConstructionMode::DesignSnr,
            engine: Engine::Ga,
            mc_iters: 100_000,
            systematic: false,
            decoder: DecoderKind::Exact,
            dist: FadingDistribution::HalfNormal,
            offset_rule: OffsetRule::MeanGain,
            capacity_rule: CapacityRule::MeanGain,
            alpha: 0.2,
            cap_m: 64,
            fading_blocks: 1,
            max_blocks: 100_000,
            max_bit_errors: 100,
            seed: 7,
            workers: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.block_len < 2 || !self.block_len.is_power_of_two() {
            return bad(format!("block length {} must be a power of two ≥ 2", self.block_len));
        }
        if !(self.rate > 0.0 && self.rate < 1.0) {
            return bad(format!("rate must lie in (0, 1), got {}", self.rate));
        }
        if info_count(self.block_len, self.rate) == 0 {
            return bad("rate leaves no information bits".into());
        }
        if !(self.snr_step_db > 0.0) {
            return bad(format!("SNR step must be positive, got {}", self.snr_step_db));
        }
        if !self.snr_start_db.is_finite() || !self.snr_stop_db.is_finite() || self.snr_stop_db < self.snr_start_db {
            return bad(format!(
                "bad SNR range {}..{}",
                self.snr_start_db, self.snr_stop_db
            ));
        }
        if self.max_blocks < 1 {
            return bad("max_blocks must be at least 1".into());
        }
        if self.fading_blocks < 1 {
            return bad("fading block count must be at least 1".into());
        }
        if self.engine == Engine::Mc && self.mc_iters == 0 {
            return bad("Monte-Carlo construction needs iterations".into());
        }
        if !(self.alpha >= 0.0) {
            return bad(format!("alpha must be non-negative, got {}", self.alpha));
        }
        if self.cap_m > self.block_len {
            return bad(format!("M = {} exceeds N = {}", self.cap_m, self.block_len));
        }
        if self.workers == Some(0) {
            return bad("need at least one worker".into());
        }
        self.dist.validate().map_err(|e| Error::Config(e.to_string()))
    }

    /// Sweep points `start, start + step, …, ≤ stop`.
    pub fn snr_grid(&self) -> Vec<SnrPoint> {
        let count = ((self.snr_stop_db - self.snr_start_db) / self.snr_step_db + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| {
                let db = self.snr_start_db + i as f64 * self.snr_step_db;
                SnrPoint::from_db((db * 1e9).round() / 1e9)
            })
            .collect()
    }

    pub fn channel(&self) -> ChannelModel {
        match self.kind {
            ExperimentKind::AwgnBer => ChannelModel::Awgn,
            _ => ChannelModel::Fading(self.dist),
        }
    }

    pub fn info_bits(&self) -> usize {
        info_count(self.block_len, self.rate)
    }

    /// The SNR the reliability order is built at for operating SNR `snr`,
    /// or `None` for a file-backed order.
    pub fn construction_snr(&self, snr: SnrPoint) -> Result<Option<SnrPoint>> {
        Ok(match &self.construction {
            ConstructionMode::Point => Some(snr),
            ConstructionMode::Converted => {
                Some(equivalent_fading_snr(snr, self.channel().distribution(), self.offset_rule)?)
            }
            ConstructionMode::DesignSnr => Some(design_snr(self.rate)?),
            ConstructionMode::File(_) => None,
        })
    }

    fn build_order(&self, construction_snr: SnrPoint) -> Result<ReliabilityOrder> {
        match self.engine {
            Engine::Ga => ga_construct(self.block_len, construction_snr),
            // Construction follows the design rule, so it runs over AWGN.
            Engine::Mc => mc_construct(self.block_len, construction_snr, ChannelModel::Awgn, self.mc_iters, self.seed),
        }
    }

    /// Reliability order for operating SNR `snr`.
    pub fn reliability_order(&self, snr: SnrPoint) -> Result<ReliabilityOrder> {
        let qs = match self.construction_snr(snr)? {
            Some(c) => self.build_order(c)?,
            None => {
                let ConstructionMode::File(path) = &self.construction else {
                    unreachable!("only file mode has no construction SNR")
                };
                load_order(path)?
            }
        };
        if qs.block_len() != self.block_len {
            return Err(Error::Config(format!(
                "reliability order has N = {} but the experiment uses N = {}",
                qs.block_len(),
                self.block_len
            )));
        }
        Ok(qs)
    }
}

/// Accumulated counts at one SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub blocks: u64,
    pub bit_errors: u64,
    /// Information bits sent, summed over blocks.
    pub info_bits: u64,
    pub block_errors: u64,
    /// Mean information bits per code bit.
    pub effective_rate: f64,
}

impl SweepPoint {
    pub fn ber(&self) -> f64 {
        if self.info_bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.info_bits as f64
        }
    }

    pub fn bler(&self) -> f64 {
        if self.blocks == 0 {
            0.0
        } else {
            self.block_errors as f64 / self.blocks as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticPoint {
    pub snr_db: f64,
    pub rate: f64,
    pub capacity: f64,
    /// `log2(−log2 P_e)`.
    pub exponent: f64,
    pub pe: f64,
}

/// What an experiment produced.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentOutput {
    Sweep(SweepResult),
    Order(ReliabilityOrder),
    DesignSnr { rate: f64, snr: SnrPoint },
    Asymptotic(Vec<AsymptoticPoint>),
}

impl ExperimentOutput {
    /// Writes the output in its file format: CSV, or the reliability-order
    /// format for `construct`.
    pub fn write(&self, path: &Path) -> Result<()> {
        match self {
            ExperimentOutput::Sweep(r) => emit_csv(r, path),
            ExperimentOutput::Order(qs) => save_order(qs, path),
            ExperimentOutput::DesignSnr { rate, snr } => write_design_snr_csv(*rate, *snr, path),
            ExperimentOutput::Asymptotic(points) => write_asymptotic_csv(points, path),
        }
    }

    /// The same bytes [`ExperimentOutput::write`] produces.
    pub fn render(&self) -> Result<String> {
        Ok(match self {
            ExperimentOutput::Sweep(r) => csv::sweep_to_string(r),
            ExperimentOutput::Order(qs) => order_to_string(qs),
            ExperimentOutput::DesignSnr { rate, snr } => csv::design_snr_to_string(*rate, *snr)?,
            ExperimentOutput::Asymptotic(points) => csv::asymptotic_to_string(points),
        })
    }

    /// Chart of the output, if it has one: BER against SNR for sweeps,
    /// `P_e` against rate (one curve per SNR) for the asymptotic grid.
    pub fn chart(&self, label: &str) -> Result<Option<String>> {
        match self {
            ExperimentOutput::Sweep(r) => {
                let series = Series {
                    label: label.to_string(),
                    points: r.points.iter().map(|p| (p.snr_db, p.ber())).collect(),
                };
                render_svg(&[series], &PlotOptions::default()).map(Some)
            }
            ExperimentOutput::Asymptotic(points) => {
                let mut series: Vec<Series> = Vec::new();
                for p in points {
                    match series.last_mut() {
                        Some(s) if s.label == format!("{} dB", csv::fmt_g(p.snr_db)) => s.points.push((p.rate, p.pe)),
                        _ => series.push(Series {
                            label: format!("{} dB", csv::fmt_g(p.snr_db)),
                            points: vec![(p.rate, p.pe)],
                        }),
                    }
                }
                let opts = PlotOptions {
                    x_label: "rate R".into(),
                    y_label: "block error rate".into(),
                    log_y: true,
                };
                render_svg(&series, &opts).map(Some)
            }
            ExperimentOutput::Order(_) | ExperimentOutput::DesignSnr { .. } => Ok(None),
        }
    }
}

/// Runs any experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    match cfg.kind {
        ExperimentKind::AwgnBer | ExperimentKind::FadingBer | ExperimentKind::AdaptBer => {
            run_sweep(cfg).map(ExperimentOutput::Sweep)
        }
        ExperimentKind::Construct => {
            let snr = SnrPoint::from_db(cfg.snr_start_db);
            cfg.reliability_order(snr).map(ExperimentOutput::Order)
        }
        ExperimentKind::DesignSnr => Ok(ExperimentOutput::DesignSnr {
            rate: cfg.rate,
            snr: design_snr(cfg.rate)?,
        }),
        ExperimentKind::Asymptotic => asymptotic_grid(cfg).map(ExperimentOutput::Asymptotic),
    }
}

/// Block-error-law grid: `R ∈ {0.05, 0.10, …, 0.95}` at every sweep SNR,
/// capacity `C(E{|h|}·√γ)`.
pub fn asymptotic_grid(cfg: &ExperimentConfig) -> Result<Vec<AsymptoticPoint>> {
    cfg.validate()?;
    let n = cfg.block_len.trailing_zeros();
    let dist = cfg.channel().distribution();
    let mut out = Vec::new();
    for snr in cfg.snr_grid() {
        let capacity = capacity_upper_bound(snr, dist)?;
        for k in 1..=19 {
            let rate = k as f64 * 0.05;
            if capacity <= 0.0 {
                continue;
            }
            out.push(AsymptoticPoint {
                snr_db: snr.db(),
                rate,
                capacity,
                exponent: asymptotic_exponent(n, rate, capacity)?,
                pe: asymptotic_pe(n, rate, capacity)?,
            });
        }
    }
    Ok(out)
}

/// BER sweep for `awgn-ber`, `fading-ber` and `adapt-ber`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?
            .install(|| sweep_inner(cfg)),
        None => sweep_inner(cfg),
    }
}

fn sweep_inner(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let mut points = Vec::new();
    let mut cached: Option<ReliabilityOrder> = None;
    for (index, snr) in cfg.snr_grid().into_iter().enumerate() {
        // design-SNR and file orders do not depend on the operating point
        let qs = match (&cfg.construction, &cached) {
            (ConstructionMode::DesignSnr | ConstructionMode::File(_), Some(qs)) => qs.clone(),
            _ => {
                let qs = cfg.reliability_order(snr)?;
                cached = Some(qs.clone());
                qs
            }
        };
        points.push(simulate_point(cfg, &qs, snr, index as u64)?);
    }
    Ok(SweepResult { points })
}

/// splitmix64 finalizer, used to derive per-point seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn stream_rng(seed: u64, point: u64, domain: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed ^ mix(point.wrapping_mul(4).wrapping_add(domain))));
    rng.set_stream(stream);
    rng
}

const DOMAIN_BLOCK: u64 = 1;
const DOMAIN_FADING: u64 = 2;

struct PointContext<'a> {
    cfg: &'a ExperimentConfig,
    qs: &'a ReliabilityOrder,
    snr: SnrPoint,
    point: u64,
    n_info: usize,
    /// Adaptation parameters and the capacity `c`, for `adapt-ber`.
    adapt: Option<(AdaptConfig, f64)>,
    /// Code after dropping `k` channels, built on first use.
    codes: Vec<OnceLock<CodeConfig>>,
}

impl PointContext<'_> {
    fn code(&self, dropped: usize) -> Result<&CodeConfig> {
        let slot = &self.codes[dropped];
        if let Some(code) = slot.get() {
            return Ok(code);
        }
        let info = select_info_set(self.qs, self.n_info - dropped)?;
        Ok(slot.get_or_init(|| CodeConfig::new(self.cfg.block_len, info).expect("valid information set")))
    }

    fn realization(&self, block: u64) -> Result<Option<ChannelRealization>> {
        match self.cfg.channel() {
            ChannelModel::Awgn => Ok(None),
            ChannelModel::Fading(dist) => {
                let epoch = block / self.cfg.fading_blocks as u64;
                let mut rng = stream_rng(self.cfg.seed, self.point, DOMAIN_FADING, epoch);
                draw_fading(self.cfg.block_len, dist, self.cfg.fading_blocks, &mut rng).map(Some)
            }
        }
    }
}

#[derive(Default, Clone, Copy)]
struct BlockOutcome {
    bit_errors: u64,
    info_bits: u64,
    block_error: bool,
}

fn simulate_block(ctx: &PointContext<'_>, dec: &mut ScDecoder, block: u64) -> Result<BlockOutcome> {
    let cfg = ctx.cfg;
    let ch = ctx.realization(block)?;
    let dropped = match (&ctx.adapt, &ch) {
        (Some((ad, c)), Some(ch)) => {
            adapt_with_capacity(&ch.h_abs, ad.alpha, ad.cap_m, ctx.n_info, *c, ctx.qs)?.num_dropped
        }
        _ => 0,
    };
    let code = ctx.code(dropped)?;

    let mut rng = stream_rng(cfg.seed, ctx.point, DOMAIN_BLOCK, block);
    let info: Vec<u8> = (0..code.info_len()).map(|_| rng.random_range(0..2u8)).collect();
    let cw = if cfg.systematic {
        encode_systematic(code, &info)?
    } else {
        encode_nonsystematic(code, &info)?
    };
    let symbols = modulate(&cw.x);
    let llrs = match &ch {
        None => demap_llr_awgn(&transmit_awgn(&symbols, ctx.snr, &mut rng), ctx.snr)?,
        Some(ch) => demap_llr(&transmit(&symbols, ch, ctx.snr, &mut rng)?, ch, ctx.snr)?,
    };
    let estimate = if cfg.systematic {
        dec.decode_systematic(code, &llrs)?
    } else {
        dec.decode(code, &llrs)?.info_hat
    };
    let bit_errors = estimate.iter().zip(&info).filter(|(a, b)| a != b).count() as u64;
    Ok(BlockOutcome {
        bit_errors,
        info_bits: info.len() as u64,
        block_error: bit_errors > 0,
    })
}

/// Runs blocks at one SNR until `max_blocks` or `max_bit_errors`.
pub fn simulate_point(cfg: &ExperimentConfig, qs: &ReliabilityOrder, snr: SnrPoint, point: u64) -> Result<SweepPoint> {
    let n_info = cfg.info_bits();
    let adapt = if cfg.kind == ExperimentKind::AdaptBer {
        let ad = AdaptConfig {
            alpha: cfg.alpha,
            cap_m: cfg.cap_m,
            snr,
            dist: cfg.dist,
            rule: cfg.capacity_rule,
        };
        ad.validate(cfg.block_len)?;
        let c = ad.capacity()?;
        Some((ad, c))
    } else {
        None
    };
    let ctx = PointContext {
        cfg,
        qs,
        snr,
        point,
        n_info,
        adapt,
        codes: (0..=n_info).map(|_| OnceLock::new()).collect(),
    };

    let mut acc = SweepPoint {
        snr_db: snr.db(),
        blocks: 0,
        bit_errors: 0,
        info_bits: 0,
        block_errors: 0,
        effective_rate: 0.0,
    };
    while acc.blocks < cfg.max_blocks && acc.bit_errors < cfg.max_bit_errors {
        let start = acc.blocks;
        let end = (start + BATCH_BLOCKS).min(cfg.max_blocks);
        let outcomes = (start..end)
            .into_par_iter()
            .map_init(
                || ScDecoder::new(cfg.decoder),
                |dec, block| simulate_block(&ctx, dec, block),
            )
            .collect::<Result<Vec<_>>>()?;
        for o in outcomes {
            acc.blocks += 1;
            acc.bit_errors += o.bit_errors;
            acc.info_bits += o.info_bits;
            acc.block_errors += u64::from(o.block_error);
        }
    }
    acc.effective_rate = acc.info_bits as f64 / (acc.blocks as f64 * cfg.block_len as f64);
    Ok(acc)
}

/// SNR (dB) at which a BER curve crosses `target`, by log-linear
/// interpolation between the first bracketing pair of points.
pub fn snr_at_ber(points: &[SweepPoint], target: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        let (ya, yb) = (a.ber(), b.ber());
        if ya >= target && yb <= target && ya > 0.0 {
            if yb <= 0.0 {
                return Some(b.snr_db);
            }
            if ya == yb {
                return Some(a.snr_db);
            }
            let t = (ya.ln() - target.ln()) / (ya.ln() - yb.ln());
            Some(a.snr_db + t * (b.snr_db - a.snr_db))
        } else {
            None
        }
    })
}
