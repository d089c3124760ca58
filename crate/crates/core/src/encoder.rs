//! Non-systematic and systematic polar encoders.

use crate::code::CodeConfig;
use crate::error::{Error, Result};
use crate::gf2::kron_transform_in_place;

/// An encoded block: the transform input `u` and the codeword `x = u·G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    pub u: Vec<u8>,
    pub x: Vec<u8>,
}

impl Codeword {
    /// `x_A`, the codeword restricted to the information positions.
    pub fn info_positions_view(&self, cfg: &CodeConfig) -> Vec<u8> {
        cfg.info_set().iter().map(|&i| self.x[i]).collect()
    }
}

fn check_info_len(cfg: &CodeConfig, info: &[u8]) -> Result<()> {
    if info.len() != cfg.info_len() {
        return Err(Error::invalid(format!(
            "expected {} info bits, got {}",
            cfg.info_len(),
            info.len()
        )));
    }
    Ok(())
}

fn encode_from_info_part(cfg: &CodeConfig, u_info: &[u8]) -> Codeword {
    let mut u = cfg.frozen_pattern().to_vec();
    for (&pos, &bit) in cfg.info_set().iter().zip(u_info) {
        u[pos] = bit & 1;
    }
    let mut x = u.clone();
    kron_transform_in_place(&mut x).expect("block length is a power of two");
    Codeword { u, x }
}

/// `x = u_A·G_A + u_{A^c}·G_{A^c}`.
pub fn encode_nonsystematic(cfg: &CodeConfig, info: &[u8]) -> Result<Codeword> {
    check_info_len(cfg, info)?;
    Ok(encode_from_info_part(cfg, info))
}

/// Systematic encoding: solves `u_A = (info ⊕ u_{A^c}·G_{A^c A})·(G_AA)^{-1}`
/// so that the codeword carries `info` verbatim at positions `A`.
pub fn encode_systematic(cfg: &CodeConfig, info: &[u8]) -> Result<Codeword> {
    check_info_len(cfg, info)?;
    let mut rhs = cfg.frozen_contribution();
    for (r, &b) in rhs.iter_mut().zip(info) {
        *r ^= b & 1;
    }
    let u_info = cfg.systematic_inverse()?.left_mul_vec(&rhs)?;
    Ok(encode_from_info_part(cfg, &u_info))
}

/// Projection of a codeword onto `A`, in ascending index order.
pub fn extract_systematic_info(cfg: &CodeConfig, x: &[u8]) -> Result<Vec<u8>> {
    if x.len() != cfg.block_len() {
        return Err(Error::invalid(format!(
            "expected {} code bits, got {}",
            cfg.block_len(),
            x.len()
        )));
    }
    Ok(cfg.info_set().iter().map(|&i| x[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::kron_transform;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_config(rng: &mut ChaCha8Rng, random_frozen: bool) -> CodeConfig {
        let n = rng.random_range(0..=7u32);
        let len = 1usize << n;
        let info: Vec<usize> = (0..len).filter(|_| rng.random_bool(0.5)).collect();
        let frozen = (0..len - info.len())
            .map(|_| if random_frozen { rng.random_range(0..2) } else { 0 })
            .collect();
        CodeConfig::with_frozen_values(len, info, frozen).unwrap()
    }

    #[test]
    fn nonsystematic_examples() {
        let all = CodeConfig::new(8, (0..8).collect()).unwrap();
        let u = vec![1, 0, 1, 1, 0, 1, 0, 0];
        assert_eq!(encode_nonsystematic(&all, &u).unwrap().x, kron_transform(&u).unwrap());

        let cfg = CodeConfig::new(4, vec![3]).unwrap();
        assert_eq!(encode_nonsystematic(&cfg, &[1]).unwrap().x, vec![1, 1, 1, 1]);
        assert_eq!(encode_nonsystematic(&cfg, &[0]).unwrap().x, vec![0, 0, 0, 0]);
        assert!(encode_nonsystematic(&cfg, &[0, 1]).is_err());
    }

    #[test]
    fn systematic_matches_exhaustive_solve() {
        let cfg = CodeConfig::new(8, vec![3, 5, 6, 7]).unwrap();
        let info = [1u8, 0, 1, 1];
        // Every candidate u_A, keeping those whose codeword carries info at A.
        let solutions: Vec<(Vec<u8>, Vec<u8>)> = (0u8..16)
            .map(|m| (0..4).map(|b| (m >> b) & 1).collect::<Vec<u8>>())
            .filter_map(|ua| {
                let mut u = vec![0u8; 8];
                for (&p, &b) in cfg.info_set().iter().zip(&ua) {
                    u[p] = b;
                }
                let x = kron_transform(&u).unwrap();
                let xa: Vec<u8> = cfg.info_set().iter().map(|&i| x[i]).collect();
                (xa == info).then_some((ua, x))
            })
            .collect();
        assert_eq!(solutions.len(), 1);
        let cw = encode_systematic(&cfg, &info).unwrap();
        let ua: Vec<u8> = cfg.info_set().iter().map(|&i| cw.u[i]).collect();
        assert_eq!(ua, solutions[0].0);
        assert_eq!(cw.x, solutions[0].1);
        assert_eq!(cw.info_positions_view(&cfg), info);
    }

    #[test]
    fn systematic_zero() {
        let cfg = CodeConfig::new(16, vec![7, 11, 13, 14, 15]).unwrap();
        assert_eq!(encode_systematic(&cfg, &[0; 5]).unwrap().x, vec![0; 16]);
    }

    #[test]
    fn extract_examples() {
        let cfg = CodeConfig::new(4, vec![2, 3]).unwrap();
        assert_eq!(extract_systematic_info(&cfg, &[0, 1, 1, 0]).unwrap(), vec![1, 0]);
        assert_eq!(extract_systematic_info(&cfg, &[1, 1, 1, 1]).unwrap(), vec![1, 1]);
        assert!(extract_systematic_info(&cfg, &[1, 1, 1]).is_err());
    }

    #[test]
    fn systematic_round_trip_1000() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let cfg = random_config(&mut rng, true);
            let info: Vec<u8> = (0..cfg.info_len()).map(|_| rng.random_range(0..2)).collect();
            let cw = encode_systematic(&cfg, &info).unwrap();
            assert_eq!(extract_systematic_info(&cfg, &cw.x).unwrap(), info);
            // valid codeword: G is an involution, so x·G recovers u and its
            // frozen part must match.
            let u = kron_transform(&cw.x).unwrap();
            let frozen: Vec<u8> = cfg.frozen_set().iter().map(|&i| u[i]).collect();
            assert_eq!(frozen, cfg.frozen_values());
        }
    }

    proptest! {
        #[test]
        fn encoders_are_linear(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cfg = random_config(&mut rng, false);
            let k = cfg.info_len();
            let a: Vec<u8> = (0..k).map(|_| rng.random_range(0..2)).collect();
            let b: Vec<u8> = (0..k).map(|_| rng.random_range(0..2)).collect();
            let ab: Vec<u8> = a.iter().zip(&b).map(|(p, q)| p ^ q).collect();
            for enc in [encode_nonsystematic, encode_systematic] {
                let xa = enc(&cfg, &a).unwrap().x;
                let xb = enc(&cfg, &b).unwrap().x;
                let xab = enc(&cfg, &ab).unwrap().x;
                let sum: Vec<u8> = xa.iter().zip(&xb).map(|(p, q)| p ^ q).collect();
                prop_assert_eq!(xab, sum);
            }
        }
    }
}
