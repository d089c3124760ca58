//! Flag/config-file merging and typed parsing of settings.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use polarlink_core::sim::ConstructionMode;
use polarlink_core::{
    CapacityRule, DecoderKind, Engine, Error, ExperimentConfig, ExperimentKind, FadingDistribution, OffsetRule,
};

use crate::Opts;

pub const CONFIG_ERROR: u8 = 2;
pub const IO_ERROR: u8 = 3;

/// Every key a config file may set, as spelled on the command line.
const KEYS: &[&str] = &[
    "n",
    "rate",
    "snr-start",
    "snr-stop",
    "snr-step",
    "construction",
    "engine",
    "mc-iters",
    "systematic",
    "decoder",
    "dist",
    "offset",
    "capacity-rule",
    "alpha",
    "cap-m",
    "nb",
    "blocks",
    "max-bit-errors",
    "seed",
    "workers",
    "out",
    "qs-out",
    "plot-out",
];

/// Merged settings: command-line values over config-file values.
#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<&'static str, String>,
}

fn parse_config(text: &str, path: &Path) -> Result<BTreeMap<&'static str, String>, Error> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, found '{line}'")))?;
        let key = key.trim().replace('_', "-");
        let key = KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| err(format!("unknown key '{key}'")))?;
        out.insert(*key, value.trim().to_string());
    }
    Ok(out)
}

impl Settings {
    pub fn load(opts: &Opts) -> Result<Self, Error> {
        let mut values = match &opts.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
                parse_config(&text, path)?
            }
            None => BTreeMap::new(),
        };
        let path_str = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let flags: [(&'static str, Option<String>); 23] = [
            ("n", opts.n.clone()),
            ("rate", opts.rate.clone()),
            ("snr-start", opts.snr_start.clone()),
            ("snr-stop", opts.snr_stop.clone()),
            ("snr-step", opts.snr_step.clone()),
            ("construction", opts.construction.clone()),
            ("engine", opts.engine.clone()),
            ("mc-iters", opts.mc_iters.clone()),
            ("systematic", opts.systematic.clone()),
            ("decoder", opts.decoder.clone()),
            ("dist", opts.dist.clone()),
            ("offset", opts.offset.clone()),
            ("capacity-rule", opts.capacity_rule.clone()),
            ("alpha", opts.alpha.clone()),
            ("cap-m", opts.cap_m.clone()),
            ("nb", opts.nb.clone()),
            ("blocks", opts.blocks.clone()),
            ("max-bit-errors", opts.max_bit_errors.clone()),
            ("seed", opts.seed.clone()),
            ("workers", opts.workers.clone()),
            ("out", path_str(&opts.out)),
            ("qs-out", path_str(&opts.qs_out)),
            ("plot-out", path_str(&opts.plot_out)),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                values.insert(key, v);
            }
        }
        Ok(Settings { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(PathBuf::from)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, Error> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::Config(format!("bad value '{v}' for --{key}")))
            })
            .transpose()
    }

    fn with<T>(&self, key: &str, f: impl FnOnce(&str) -> Option<T>) -> Result<Option<T>, Error> {
        self.get(key)
            .map(|v| f(v).ok_or_else(|| Error::Config(format!("bad value '{v}' for --{key}"))))
            .transpose()
    }

    pub fn experiment(&self, kind: ExperimentKind) -> Result<ExperimentConfig, Error> {
        let d = ExperimentConfig::default();
        let cfg = ExperimentConfig {
            kind,
            block_len: self.parsed("n")?.unwrap_or(d.block_len),
            rate: self.parsed("rate")?.unwrap_or(d.rate),
            snr_start_db: self.parsed("snr-start")?.unwrap_or(d.snr_start_db),
            snr_stop_db: self.parsed("snr-stop")?.unwrap_or(d.snr_stop_db),
            snr_step_db: self.parsed("snr-step")?.unwrap_or(d.snr_step_db),
            construction: match self.get("construction") {
                Some(v) => v.parse::<ConstructionMode>()?,
                None => d.construction,
            },
            engine: self.with("engine", |v| v.parse::<Engine>().ok())?.unwrap_or(d.engine),
            mc_iters: self.parsed("mc-iters")?.unwrap_or(d.mc_iters),
            systematic: self.parsed("systematic")?.unwrap_or(d.systematic),
            decoder: self.with("decoder", parse_decoder)?.unwrap_or(d.decoder),
            dist: self.with("dist", parse_dist)?.unwrap_or(d.dist),
            offset_rule: self
                .with("offset", |v| match v {
                    "mean" => Some(OffsetRule::MeanGain),
                    "minus8" => Some(OffsetRule::MinusEightDb),
                    _ => None,
                })?
                .unwrap_or(d.offset_rule),
            capacity_rule: self
                .with("capacity-rule", |v| match v {
                    "mean" => Some(CapacityRule::MeanGain),
                    "minus8" => Some(CapacityRule::MinusEightDb),
                    _ => None,
                })?
                .unwrap_or(d.capacity_rule),
            alpha: self.parsed("alpha")?.unwrap_or(d.alpha),
            cap_m: self.parsed("cap-m")?.unwrap_or(d.cap_m),
            fading_blocks: self.parsed("nb")?.unwrap_or(d.fading_blocks),
            max_blocks: self.parsed("blocks")?.unwrap_or(d.max_blocks),
            max_bit_errors: self.parsed("max-bit-errors")?.unwrap_or(d.max_bit_errors),
            seed: self.parsed("seed")?.unwrap_or(d.seed),
            workers: self.parsed("workers")?.or(d.workers),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_decoder(v: &str) -> Option<DecoderKind> {
    match v {
        "exact" => Some(DecoderKind::Exact),
        "minsum" | "min-sum" => Some(DecoderKind::MinSum),
        _ => None,
    }
}

fn parse_dist(v: &str) -> Option<FadingDistribution> {
    if v == "halfnormal" {
        return Some(FadingDistribution::HalfNormal);
    }
    let mu: f64 = v.strip_prefix("fixedmu:")?.parse().ok()?;
    let dist = FadingDistribution::FixedMu(mu);
    dist.validate().ok().map(|_| dist)
}
