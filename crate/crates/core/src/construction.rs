//! Bit-channel reliability ranking.
//!
//! [`ga_construct`] tracks the mean LLR of every bit channel under the
//! Gaussian approximation. [`mc_construct`] measures genie-aided SC error
//! counts directly and serves as the reference the GA ranking is checked
//! against.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::capacity::{q_func, SnrPoint};
use crate::channel::{demap_llr, draw_fading, modulate, transmit, ChannelModel, ChannelRealization};
use crate::decoder::{DecoderKind, ScDecoder};
use crate::error::{Error, Result};

/// Mean LLRs at or above this are treated as noiseless.
pub const GA_SATURATION: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Ga,
    Mc,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Ga => "ga",
            Engine::Mc => "mc",
        })
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ga" => Ok(Engine::Ga),
            "mc" => Ok(Engine::Mc),
            other => Err(Error::invalid(format!("unknown engine '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderMeta {
    pub block_len: usize,
    pub snr_db: f64,
    pub engine: Engine,
    pub seed: Option<u64>,
}

/// All `N` bit-channel indices, most reliable first.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityOrder {
    pub order: Vec<usize>,
    pub meta: OrderMeta,
}

impl ReliabilityOrder {
    pub fn new(order: Vec<usize>, meta: OrderMeta) -> Result<Self> {
        if order.len() != meta.block_len {
            return Err(Error::invalid(format!(
                "order has {} entries but N = {}",
                order.len(),
                meta.block_len
            )));
        }
        let mut seen = vec![false; order.len()];
        for &i in &order {
            if i >= order.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::invalid(format!("order is not a permutation (index {i})")));
            }
        }
        Ok(ReliabilityOrder { order, meta })
    }

    pub fn block_len(&self) -> usize {
        self.order.len()
    }
}

fn check_block_len(len: usize) -> Result<()> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::invalid(format!("block length {len} is not a power of two")));
    }
    Ok(())
}

/// Below this the middle piece of φ exceeds 1 near zero, so a quadratic
/// segment takes over; the two meet continuously here.
const PHI_SMALL_X: f64 = 0.867861;

/// `ln φ(x)` for the piecewise approximation of
/// `φ(x) = 1 − E[tanh(L/2)]`, `L ~ N(x, 2x)`.
fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x <= PHI_SMALL_X {
        0.0564 * x * x - 0.48560 * x
    } else if x < 10.0 {
        -0.4527 * x.powf(0.86) + 0.0218
    } else {
        0.5 * (std::f64::consts::PI / x).ln() - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
    }
}

/// Solves `ln φ(x) = target` by bisection on `[0, GA_SATURATION]`.
fn phi_inv_ln(target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, GA_SATURATION);
    if ln_phi(hi) >= target {
        return GA_SATURATION;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_phi(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Mean LLR of the check-node child: `φ^{-1}(1 − (1 − φ(m))²)`.
fn ga_check(m: f64) -> f64 {
    if m >= GA_SATURATION {
        return GA_SATURATION;
    }
    if m <= 0.0 {
        return 0.0;
    }
    let ln_a = ln_phi(m).min(0.0);
    // 1 − (1 − a)² = a·(2 − a)
    let target = ln_a + (2.0 - ln_a.exp()).ln();
    phi_inv_ln(target).min(m)
}

fn ga_variable(m: f64) -> f64 {
    (2.0 * m).min(GA_SATURATION)
}

/// Final GA mean LLR of every bit channel at `snr`, with channel mean
/// `2/σ² = 2γ` under unit signal energy.
pub fn ga_mean_llrs(block_len: usize, snr: SnrPoint) -> Result<Vec<f64>> {
    check_block_len(block_len)?;
    if !snr.db().is_finite() {
        return Err(Error::invalid("construction SNR must be finite"));
    }
    let mut means = vec![(2.0 * snr.linear()).min(GA_SATURATION)];
    // Index bits are consumed MSB first; the MSB is the stage nearest the
    // channel.
    while means.len() < block_len {
        means = means.iter().flat_map(|&m| [ga_check(m), ga_variable(m)]).collect();
    }
    Ok(means)
}

/// Bit error probability of a channel whose LLR is `N(m, 2m)`.
pub fn ga_error_proxy(mean_llr: f64) -> f64 {
    q_func((mean_llr / 2.0).sqrt())
}

/// Gaussian-approximation ranking. Ties (saturated channels) go to the
/// lower index first.
pub fn ga_construct(block_len: usize, snr: SnrPoint) -> Result<ReliabilityOrder> {
    let means = ga_mean_llrs(block_len, snr)?;
    let mut order: Vec<usize> = (0..block_len).collect();
    order.sort_by(|&a, &b| means[b].total_cmp(&means[a]).then(a.cmp(&b)));
    ReliabilityOrder::new(
        order,
        OrderMeta {
            block_len,
            snr_db: snr.db(),
            engine: Engine::Ga,
            seed: None,
        },
    )
}

/// Iterations per independent RNG stream in [`mc_construct`].
const MC_CHUNK: u64 = 1024;

#[derive(Clone)]
struct McTally {
    /// Errors in half units: a zero decision LLR is a coin flip.
    half_errors: Vec<u64>,
    llr_sum: Vec<f64>,
}

fn mc_chunk(block_len: usize, snr: SnrPoint, model: ChannelModel, seed: u64, chunk: u64, iters: u64) -> Result<McTally> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut dec = ScDecoder::new(DecoderKind::Exact);
    let truth = vec![0u8; block_len];
    let symbols = modulate(&truth);
    let unit = ChannelRealization::unit(block_len);
    let mut seen = vec![0.0; block_len];
    let mut tally = McTally {
        half_errors: vec![0; block_len],
        llr_sum: vec![0.0; block_len],
    };
    for _ in 0..iters {
        let drawn;
        let ch = match model {
            ChannelModel::Awgn => &unit,
            ChannelModel::Fading(dist) => {
                drawn = draw_fading(block_len, dist, 1, &mut rng)?;
                &drawn
            }
        };
        let rx = transmit(&symbols, ch, snr, &mut rng)?;
        let llrs = demap_llr(&rx, ch, snr)?;
        dec.decode_genie(&truth, &llrs, &mut seen)?;
        for ((e, s), &l) in tally.half_errors.iter_mut().zip(tally.llr_sum.iter_mut()).zip(&seen) {
            *e += if l < 0.0 {
                2
            } else if l == 0.0 {
                1
            } else {
                0
            };
            *s += l;
        }
    }
    Ok(tally)
}

/// Per-channel genie-aided statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct McStatistics {
    pub iters: u64,
    /// Blocks in which the bit channel's decision LLR was negative, plus
    /// half the blocks in which it was exactly zero.
    pub errors: Vec<f64>,
    pub mean_llr: Vec<f64>,
}

/// Runs genie-aided SC over all-zero blocks. Iterations run in chunks
/// with independent RNG streams `(seed, chunk)`, so the result does not
/// depend on the worker count.
pub fn mc_statistics(block_len: usize, snr: SnrPoint, model: ChannelModel, iters: u64, seed: u64) -> Result<McStatistics> {
    check_block_len(block_len)?;
    if iters == 0 {
        return Err(Error::invalid("need at least one Monte-Carlo iteration"));
    }
    model.distribution().validate()?;
    let chunks = iters.div_ceil(MC_CHUNK);
    let tallies = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let n = MC_CHUNK.min(iters - c * MC_CHUNK);
            mc_chunk(block_len, snr, model, seed, c, n)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut half_errors = vec![0u64; block_len];
    let mut llr_sum = vec![0.0f64; block_len];
    for t in &tallies {
        for i in 0..block_len {
            half_errors[i] += t.half_errors[i];
            llr_sum[i] += t.llr_sum[i];
        }
    }
    Ok(McStatistics {
        iters,
        errors: half_errors.iter().map(|&h| h as f64 / 2.0).collect(),
        mean_llr: llr_sum.iter().map(|s| s / iters as f64).collect(),
    })
}

/// Genie-aided Monte-Carlo ranking: by error count, then by mean decision
/// LLR (higher first), then by index.
pub fn mc_construct(
    block_len: usize,
    snr: SnrPoint,
    model: ChannelModel,
    iters: u64,
    seed: u64,
) -> Result<ReliabilityOrder> {
    let stats = mc_statistics(block_len, snr, model, iters, seed)?;
    let mut order: Vec<usize> = (0..block_len).collect();
    order.sort_by(|&a, &b| {
        stats.errors[a]
            .total_cmp(&stats.errors[b])
            .then(stats.mean_llr[b].total_cmp(&stats.mean_llr[a]))
            .then(a.cmp(&b))
    });
    ReliabilityOrder::new(
        order,
        OrderMeta {
            block_len,
            snr_db: snr.db(),
            engine: Engine::Mc,
            seed: Some(seed),
        },
    )
}

/// The `K` most reliable indices, ascending.
pub fn select_info_set(qs: &ReliabilityOrder, k: usize) -> Result<Vec<usize>> {
    if k > qs.block_len() {
        return Err(Error::invalid(format!("K = {k} exceeds N = {}", qs.block_len())));
    }
    let mut a = qs.order[..k].to_vec();
    a.sort_unstable();
    Ok(a)
}

const QS_MAGIC: &str = "polar-qs v1";

/// The text format: magic line, metadata line, then one index per line,
/// best first.
pub fn order_to_string(qs: &ReliabilityOrder) -> String {
    let mut out = String::with_capacity(qs.block_len() * 6 + 64);
    out.push_str(QS_MAGIC);
    out.push('\n');
    let seed = qs.meta.seed.map_or_else(|| "-".to_string(), |s| s.to_string());
    out.push_str(&format!(
        "N={} snr_db={} engine={} seed={}\n",
        qs.meta.block_len, qs.meta.snr_db, qs.meta.engine, seed
    ));
    for i in &qs.order {
        out.push_str(&i.to_string());
        out.push('\n');
    }
    out
}

pub fn save_order(qs: &ReliabilityOrder, path: &Path) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(order_to_string(qs).as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn load_order(path: &Path) -> Result<ReliabilityOrder> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_order(&text, path)
}

fn parse_order(text: &str, path: &Path) -> Result<ReliabilityOrder> {
    let err = |line: usize, msg: String| Error::parse(path, line, msg);
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    match lines.next() {
        Some((_, l)) if l.trim_end() == QS_MAGIC => {}
        Some((n, l)) => return Err(err(n, format!("expected '{QS_MAGIC}', found '{l}'"))),
        None => return Err(err(1, "empty file".into())),
    }
    let (meta_line, meta_text) = lines.next().ok_or_else(|| err(2, "missing metadata line".into()))?;
    let mut block_len = None;
    let mut snr_db = None;
    let mut engine = None;
    let mut seed = None;
    for field in meta_text.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| err(meta_line, format!("malformed field '{field}'")))?;
        let bad = |what: &str| err(meta_line, format!("bad {what} '{value}'"));
        match key {
            "N" => block_len = Some(value.parse::<usize>().map_err(|_| bad("N"))?),
            "snr_db" => snr_db = Some(value.parse::<f64>().map_err(|_| bad("snr_db"))?),
            "engine" => engine = Some(value.parse::<Engine>().map_err(|_| bad("engine"))?),
            "seed" => {
                seed = Some(if value == "-" {
                    None
                } else {
                    Some(value.parse::<u64>().map_err(|_| bad("seed"))?)
                })
            }
            other => return Err(err(meta_line, format!("unknown key '{other}'"))),
        }
    }
    let missing = |k: &str| err(meta_line, format!("missing key '{k}'"));
    let block_len = block_len.ok_or_else(|| missing("N"))?;
    let meta = OrderMeta {
        block_len,
        snr_db: snr_db.ok_or_else(|| missing("snr_db"))?,
        engine: engine.ok_or_else(|| missing("engine"))?,
        seed: seed.ok_or_else(|| missing("seed"))?,
    };

    let mut order = Vec::with_capacity(block_len);
    let mut seen = vec![false; block_len];
    let mut last_line = meta_line;
    for (n, l) in lines {
        last_line = n;
        let l = l.trim();
        if l.is_empty() {
            continue;
        }
        let idx: usize = l.parse().map_err(|_| err(n, format!("not an index: '{l}'")))?;
        if idx >= block_len {
            return Err(err(n, format!("index {idx} out of range for N = {block_len}")));
        }
        if std::mem::replace(&mut seen[idx], true) {
            return Err(err(n, format!("duplicate index {idx}")));
        }
        order.push(idx);
    }
    if order.len() != block_len {
        return Err(err(
            last_line,
            format!("header says N = {block_len} but {} indices follow", order.len()),
        ));
    }
    ReliabilityOrder::new(order, meta)
}
