//! Binary-input AWGN capacity, its fading average and inverse, and the
//! asymptotic block-error law.
//!
//! Signal model throughout: unit-energy BPSK scaled by `√γ`, unit-variance
//! noise, so a channel of gain `|h|` has amplitude `s = |h|·√γ`.

use std::f64::consts::{FRAC_2_PI, LN_2, SQRT_2};

use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::quadrature;

/// An SNR stored in dB; `linear()` is the power ratio `10^(dB/10)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SnrPoint {
    db: f64,
}

impl SnrPoint {
    pub fn from_db(db: f64) -> Self {
        SnrPoint { db }
    }

    pub fn from_linear(linear: f64) -> Result<Self> {
        if !(linear > 0.0) || !linear.is_finite() {
            return Err(Error::invalid(format!("linear SNR must be positive and finite, got {linear}")));
        }
        Ok(SnrPoint {
            db: 10.0 * linear.log10(),
        })
    }

    pub fn db(&self) -> f64 {
        self.db
    }

    pub fn linear(&self) -> f64 {
        10f64.powf(self.db / 10.0)
    }

    /// Signal amplitude `√γ` under unit noise.
    pub fn amplitude(&self) -> f64 {
        self.linear().sqrt()
    }
}

/// Law of the fading magnitude `|h|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingDistribution {
    /// `h ~ N(0, 1)`, so `|h|` is half-normal with mean `√(2/π)`.
    HalfNormal,
    /// Deterministic `|h| = μ`; `FixedMu(1.0)` is plain AWGN.
    FixedMu(f64),
}

impl FadingDistribution {
    /// `E{|h|}`.
    pub fn mu_abs(&self) -> f64 {
        match *self {
            FadingDistribution::HalfNormal => FRAC_2_PI.sqrt(),
            FadingDistribution::FixedMu(mu) => mu,
        }
    }

    /// `Pr{|h| ≤ a}`.
    pub fn cdf(&self, a: f64) -> f64 {
        if a < 0.0 {
            return 0.0;
        }
        match *self {
            FadingDistribution::HalfNormal => 1.0 - 2.0 * q_func(a),
            FadingDistribution::FixedMu(mu) => {
                if mu <= a {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FadingDistribution::FixedMu(mu) if !(mu > 0.0 && mu.is_finite()) => {
                Err(Error::invalid(format!("fixed gain must be positive, got {mu}")))
            }
            _ => Ok(()),
        }
    }
}

/// Gaussian tail probability `Q(x)`.
pub fn q_func(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// Inverse of [`q_func`] on `(0, 1)`.
pub fn q_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("Q^-1 needs p in (0, 1), got {p}")));
    }
    // Q is decreasing; bracket then polish with Newton.
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q_func(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..3 {
        let density = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if density < 1e-300 {
            break;
        }
        let next = x + (q_func(x) - p) / density;
        if !(lo - 1e-12..=hi + 1e-12).contains(&next) {
            break;
        }
        x = next;
    }
    Ok(x)
}

/// `ln(1 + e^t)` without overflow.
#[inline]
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// Capacity in bits of BPSK with amplitude `s` in unit-variance Gaussian
/// noise: `1 − E[log2(1 + e^{−2sY})]`, `Y ~ N(s, 1)`. Each of the two
/// conditional integrals carries the uniform input prior ½; by symmetry
/// they are equal.
pub fn biawgn_capacity(s: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::invalid(format!("amplitude must be finite and non-negative, got {s}")));
    }
    Ok(biawgn_capacity_unchecked(s))
}

fn biawgn_capacity_unchecked(s: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    let rule = quadrature::hermite();
    // y = s + √2·t absorbs the Gaussian weight into e^{-t²}.
    let loss: f64 = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| w * softplus(-2.0 * s * (s + SQRT_2 * t)))
        .sum::<f64>()
        / std::f64::consts::PI.sqrt();
    (1.0 - loss / LN_2).clamp(0.0, 1.0)
}

/// Upper edge of the half-normal integration range.
const HALF_NORMAL_SPAN: f64 = 6.0;

/// `E_{|h|}{C(|h|·√γ)}`.
pub fn fading_capacity(snr: SnrPoint, dist: FadingDistribution) -> Result<f64> {
    dist.validate()?;
    let amp = snr.amplitude();
    Ok(match dist {
        FadingDistribution::FixedMu(mu) => biawgn_capacity_unchecked(mu * amp),
        FadingDistribution::HalfNormal => {
            let rule = quadrature::legendre();
            let half = HALF_NORMAL_SPAN / 2.0;
            let density_norm = (2.0 / std::f64::consts::PI).sqrt();
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&t, &w)| {
                    let a = half * (t + 1.0);
                    w * half * density_norm * (-0.5 * a * a).exp() * biawgn_capacity_unchecked(a * amp)
                })
                .sum::<f64>()
                .clamp(0.0, 1.0)
        }
    })
}

/// `C(E{|h|}·√γ)`, the Jensen upper bound on [`fading_capacity`].
pub fn capacity_upper_bound(snr: SnrPoint, dist: FadingDistribution) -> Result<f64> {
    dist.validate()?;
    biawgn_capacity(dist.mu_abs() * snr.amplitude())
}

/// The SNR at which BI-AWGN capacity equals `rate`.
pub fn design_snr(rate: f64) -> Result<SnrPoint> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::invalid(format!("rate must lie in (0, 1), got {rate}")));
    }
    let cap = |db: f64| biawgn_capacity_unchecked(SnrPoint::from_db(db).amplitude());
    let (mut lo, mut hi) = (-60.0f64, 40.0f64);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if cap(mid) < rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(SnrPoint::from_db(0.5 * (lo + hi)))
}

/// How an operating SNR is mapped onto an equivalent AWGN SNR for fading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OffsetRule {
    /// `γ_h = E{|h|}²·γ`.
    #[default]
    MeanGain,
    /// Fixed `γ − 8 dB`.
    MinusEightDb,
}

/// Offset used by [`OffsetRule::MinusEightDb`], in dB.
pub const FIXED_OFFSET_DB: f64 = -8.0;

/// Equivalent AWGN SNR of a coherent fading channel.
pub fn equivalent_fading_snr(gamma: SnrPoint, dist: FadingDistribution, rule: OffsetRule) -> Result<SnrPoint> {
    dist.validate()?;
    Ok(match rule {
        OffsetRule::MeanGain => SnrPoint::from_db(gamma.db() + 20.0 * dist.mu_abs().log10()),
        OffsetRule::MinusEightDb => SnrPoint::from_db(gamma.db() + FIXED_OFFSET_DB),
    })
}

const RATIO_EPS: f64 = 1e-12;

/// `log2(−log2 P_e) = n/2 + √n·Q^{-1}(R/C)`, with `R/C` clamped to
/// `(ε, 1−ε)` and the `o(√n)` term dropped.
pub fn asymptotic_exponent(n: u32, rate: f64, capacity: f64) -> Result<f64> {
    if !(rate > 0.0) || !(capacity > 0.0 && capacity <= 1.0) {
        return Err(Error::invalid(format!(
            "need rate > 0 and capacity in (0, 1], got R = {rate}, C = {capacity}"
        )));
    }
    let ratio = (rate / capacity).clamp(RATIO_EPS, 1.0 - RATIO_EPS);
    let nf = f64::from(n);
    Ok(nf / 2.0 + nf.sqrt() * q_inv(ratio)?)
}

/// Asymptotic block error rate `2^{−2^{n/2 + √n·Q^{-1}(R/C)}}`. Values below
/// the smallest normal `f64` are reported as that value.
pub fn asymptotic_pe(n: u32, rate: f64, capacity: f64) -> Result<f64> {
    let exponent = asymptotic_exponent(n, rate, capacity)?;
    let pe = (-(2f64.powf(exponent)) * LN_2).exp();
    Ok(pe.clamp(f64::MIN_POSITIVE, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    /// Composite Simpson on a wide window: an independent route to
    /// the capacity integral.
    fn simpson_capacity(s: f64) -> f64 {
        let (a, b) = (s - 12.0, s + 12.0);
        let steps = 200_000;
        let h = (b - a) / steps as f64;
        let integrand = |y: f64| {
            let density = (-0.5 * (y - s) * (y - s)).exp() / (2.0 * std::f64::consts::PI).sqrt();
            density * (2.0 / (1.0 + (-2.0 * y * s).exp())).log2()
        };
        let mut acc = integrand(a) + integrand(b);
        for k in 1..steps {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * integrand(a + k as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn snr_round_trip() {
        for db in [-30.0, -1.822, 0.0, 3.3, 25.0] {
            let p = SnrPoint::from_db(db);
            let back = SnrPoint::from_linear(p.linear()).unwrap();
            assert!((back.db() - db).abs() <= 1e-12 * db.abs().max(1.0));
        }
        assert!(SnrPoint::from_linear(0.0).is_err());
    }

    #[test]
    fn q_examples() {
        assert_eq!(q_func(0.0), 0.5);
        assert!((q_func(-40.0) - 1.0).abs() < 1e-15);
        // midpoint-rule oracle for Q(1.2816)
        let x0 = 1.2816;
        let steps = 400_000;
        let h = (12.0 - x0) / steps as f64;
        let oracle: f64 = (0..steps)
            .map(|k| {
                let t = x0 + (k as f64 + 0.5) * h;
                (-0.5 * t * t).exp()
            })
            .sum::<f64>()
            * h
            / (2.0 * std::f64::consts::PI).sqrt();
        assert!((q_func(x0) - oracle).abs() < 1e-10);
        assert!((q_func(x0) - 0.1).abs() < 1e-4);
    }

    #[test]
    fn q_inv_examples() {
        assert!(q_inv(0.5).unwrap().abs() < 1e-12);
        assert!((q_inv(q_func(1.7)).unwrap() - 1.7).abs() < 1e-8);
        assert!((q_inv(0.1).unwrap() - 1.281_551_565_5).abs() < 1e-8);
        for p in [0.0, 1.0, -0.2, f64::NAN] {
            assert!(q_inv(p).is_err());
        }
    }

    #[test]
    fn q_round_trip_grid() {
        for k in 0..=100 {
            let p = 10f64.powf(-6.0 + 6.0 * k as f64 / 100.0).min(0.5);
            for p in [p, 1.0 - p] {
                let x = q_inv(p).unwrap();
                assert!((q_func(x) - p).abs() < 1e-9, "p = {p}");
            }
        }
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(biawgn_capacity(0.0).unwrap(), 0.0);
        assert!(biawgn_capacity(8.0).unwrap() >= 0.9999);
        let c = biawgn_capacity(10f64.powf(-1.822 / 20.0)).unwrap();
        assert!((c - 0.36).abs() < 0.005, "{c}");
        assert!(biawgn_capacity(-0.1).is_err());
    }

    #[test]
    fn capacity_matches_simpson() {
        for s in [0.05, 0.25, 0.5, 0.811, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0] {
            let gh = biawgn_capacity(s).unwrap();
            let oracle = simpson_capacity(s);
            assert!((gh - oracle).abs() <= 1e-6, "s = {s}: {gh} vs {oracle}");
        }
    }

    #[test]
    fn capacity_monotone_and_bounded() {
        let mut prev = 0.0;
        for k in 0..100 {
            let c = biawgn_capacity(k as f64 * 0.08).unwrap();
            assert!((0.0..=1.0).contains(&c));
            assert!(c >= prev - 1e-12);
            prev = c;
        }
    }

    #[test]
    fn capacity_matches_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let samples = 10_000_000;
        for s in [0.25, 0.5, 1.0, 2.0] {
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..samples {
                let z: f64 = StandardNormal.sample(&mut rng);
                let y = s + z;
                let v = 1.0 - softplus(-2.0 * s * y) / LN_2;
                sum += v;
                sum_sq += v * v;
            }
            let mean = sum / samples as f64;
            let se = ((sum_sq / samples as f64 - mean * mean) / samples as f64).sqrt();
            let c = biawgn_capacity(s).unwrap();
            assert!((c - mean).abs() <= 3.0 * se, "s = {s}: {c} vs {mean} ± {se}");
        }
    }

    #[test]
    fn fading_capacity_examples() {
        let tiny = SnrPoint::from_db(-80.0);
        assert!(fading_capacity(tiny, FadingDistribution::HalfNormal).unwrap() < 1e-7);
        for db in [-3.0, 0.0, 5.0] {
            let g = SnrPoint::from_db(db);
            let fixed = fading_capacity(g, FadingDistribution::FixedMu(1.0)).unwrap();
            assert_eq!(fixed, biawgn_capacity(g.amplitude()).unwrap());
        }
        for db in [0.0, 4.0, 8.0] {
            let g = SnrPoint::from_db(db);
            let c = fading_capacity(g, FadingDistribution::HalfNormal).unwrap();
            let bound = capacity_upper_bound(g, FadingDistribution::HalfNormal).unwrap();
            assert!(c <= bound, "{db} dB: {c} > {bound}");
        }
        assert!(fading_capacity(tiny, FadingDistribution::FixedMu(-1.0)).is_err());
    }

    #[test]
    fn fading_capacity_matches_sampling() {
        // E over half-normal |h| by sampling, fixed seed.
        let g = SnrPoint::from_db(4.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 200_000;
        let mean: f64 = (0..n)
            .map(|_| {
                let h: f64 = StandardNormal.sample(&mut rng);
                biawgn_capacity(h.abs() * g.amplitude()).unwrap()
            })
            .sum::<f64>()
            / n as f64;
        let c = fading_capacity(g, FadingDistribution::HalfNormal).unwrap();
        assert!((c - mean).abs() < 3e-3, "{c} vs {mean}");
    }

    #[test]
    fn design_snr_examples() {
        let d = design_snr(0.36).unwrap();
        assert!((d.db() - -1.822).abs() <= 0.02, "{}", d.db());
        for r in [0.2, 0.5, 0.8] {
            let c = biawgn_capacity(design_snr(r).unwrap().amplitude()).unwrap();
            assert!((c - r).abs() <= 1e-4);
        }
        assert!(design_snr(0.5).unwrap() > design_snr(0.36).unwrap());
        assert!(design_snr(0.0).is_err());
        assert!(design_snr(1.0).is_err());
    }

    #[test]
    fn equivalent_snr_examples() {
        let g = SnrPoint::from_db(4.0);
        let same = equivalent_fading_snr(g, FadingDistribution::FixedMu(1.0), OffsetRule::MeanGain).unwrap();
        assert!((same.db() - 4.0).abs() < 1e-12);
        let fixed = equivalent_fading_snr(g, FadingDistribution::HalfNormal, OffsetRule::MinusEightDb).unwrap();
        assert!((fixed.db() - -4.0).abs() < 1e-12);
        let half = equivalent_fading_snr(g, FadingDistribution::HalfNormal, OffsetRule::MeanGain).unwrap();
        let analytic = 10.0 * (2.0 / std::f64::consts::PI).log10();
        assert!((half.db() - 4.0 - analytic).abs() < 1e-12);
        assert!((half.db() - 4.0 - -1.961).abs() < 1e-3);
        assert!((half.linear() / g.linear() - FRAC_2_PI).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_examples() {
        let pe = asymptotic_pe(10, 0.3, 0.6).unwrap();
        assert!((pe / 2f64.powi(-32) - 1.0).abs() < 1e-9);
        let near = asymptotic_pe(10, 0.6 * (1.0 - 1e-9), 0.6).unwrap();
        assert!(near > 0.5);
        let mut prev = 0.0;
        for k in 1..=19 {
            let r = k as f64 * 0.05;
            let pe = asymptotic_pe(10, r, 0.95).unwrap();
            assert!(pe >= prev);
            prev = pe;
        }
        let mut prev = 1.0;
        for k in 1..=10 {
            let pe = asymptotic_pe(10, 0.4, 0.5 + 0.05 * k as f64).unwrap();
            assert!(pe <= prev);
            prev = pe;
        }
        assert!(asymptotic_pe(10, 0.0, 0.5).is_err());
        assert!(asymptotic_pe(10, 0.2, 0.0).is_err());
        assert!(asymptotic_pe(10, 0.2, 0.01).unwrap() <= 1.0);
    }
}
