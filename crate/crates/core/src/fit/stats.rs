//! Population ratios and T1 fluctuation statistics.

use alloc::vec::Vec;

use libm::sqrt;

use crate::error::{non_negative, Error, Result};
use crate::sq;

/// Residual excited-state population from the e–f Rabi amplitudes measured
/// without (`a_idle`) and with (`a_swapped`) a preceding g–e π pulse.
pub fn population_from_ef_amplitudes(a_idle: f64, a_swapped: f64) -> Result<f64> {
    let a = non_negative("a_idle", a_idle)?;
    let b = non_negative("a_swapped", a_swapped)?;
    if a + b == 0.0 {
        return Err(Error::Domain {
            name: "a_idle + a_swapped",
            value: 0.0,
            reason: "at least one amplitude must be positive",
        });
    }
    Ok(a / (a + b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationStats {
    pub mean: f64,
    /// Intrinsic spread after removing the mean fit variance, s.
    pub sigma_intrinsic: f64,
    pub sigma_intrinsic_rel: f64,
    /// The fit variance exceeded the sample variance and the spread was
    /// clamped to zero.
    pub clamped: bool,
}

pub const MIN_FLUCTUATION_SAMPLES: usize = 10;

/// Intrinsic T1 spread from repeated `(T1, σ_fit)` measurements.
pub fn t1_fluctuation_stats(samples: &[(f64, f64)]) -> Result<FluctuationStats> {
    let n = samples.len();
    if n < MIN_FLUCTUATION_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_FLUCTUATION_SAMPLES,
            got: n,
        });
    }
    let nf = n as f64;
    let mean = samples.iter().map(|s| s.0).sum::<f64>() / nf;
    let var = samples.iter().map(|s| sq(s.0 - mean)).sum::<f64>() / (nf - 1.0);
    let fit_var = samples.iter().map(|s| s.1 * s.1).sum::<f64>() / nf;
    let excess = var - fit_var;
    let sigma = sqrt(excess.max(0.0));
    Ok(FluctuationStats {
        mean,
        sigma_intrinsic: sigma,
        sigma_intrinsic_rel: sigma / mean,
        clamped: excess < 0.0,
    })
}

/// Moving-window error fraction; the output has `len − window + 1` entries.
pub fn windowed_error_rate(outcomes: &[bool], window: usize) -> Result<Vec<f64>> {
    if window == 0 || window > outcomes.len() {
        return Err(Error::Domain {
            name: "window",
            value: window as f64,
            reason: "must lie in 1..=len",
        });
    }
    let mut count = outcomes[..window].iter().filter(|&&b| b).count();
    let mut out = Vec::with_capacity(outcomes.len() - window + 1);
    out.push(count as f64 / window as f64);
    for i in window..outcomes.len() {
        count += usize::from(outcomes[i]);
        count -= usize::from(outcomes[i - window]);
        out.push(count as f64 / window as f64);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermal::effective_temperature;
    use alloc::vec;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn population_ratio() {
        assert_eq!(population_from_ef_amplitudes(0.0, 1.0).unwrap(), 0.0);
        assert_eq!(population_from_ef_amplitudes(0.3, 0.3).unwrap(), 0.5);
        assert!(population_from_ef_amplitudes(0.0, 0.0).is_err());
        assert!(population_from_ef_amplitudes(-1.0, 1.0).is_err());
    }

    #[test]
    fn population_to_effective_temperature() {
        // amplitudes whose ratio is 1.7e-4, at the inferred 21.0 GHz
        let p = population_from_ef_amplitudes(1.7e-4, 1.0 - 1.7e-4).unwrap();
        let t = effective_temperature(21.0e9, p).unwrap().kelvin;
        assert!((t - 0.116).abs() < 0.003, "{t}");
    }

    #[test]
    fn six_percent_spread() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let dist = Normal::new(1.0e-6, 0.06e-6).unwrap();
        let samples: Vec<(f64, f64)> = (0..500).map(|_| (dist.sample(&mut rng), 0.0)).collect();
        let s = t1_fluctuation_stats(&samples).unwrap();
        assert!(
            (s.sigma_intrinsic_rel - 0.06).abs() <= 0.01,
            "{}",
            s.sigma_intrinsic_rel
        );
        assert!(!s.clamped);
    }

    #[test]
    fn fit_noise_is_removed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let intrinsic = Normal::new(1.0e-6, 0.06e-6).unwrap();
        let fit = Normal::new(0.0, 0.04e-6).unwrap();
        let samples: Vec<(f64, f64)> = (0..4000)
            .map(|_| (intrinsic.sample(&mut rng) + fit.sample(&mut rng), 0.04e-6))
            .collect();
        let s = t1_fluctuation_stats(&samples).unwrap();
        assert!(
            (s.sigma_intrinsic_rel - 0.06).abs() <= 0.005,
            "{}",
            s.sigma_intrinsic_rel
        );
    }

    #[test]
    fn clamped_and_boundary() {
        let same = vec![(1e-6, 1e-8); 12];
        let s = t1_fluctuation_stats(&same).unwrap();
        assert_eq!(s.sigma_intrinsic, 0.0);
        assert!(s.clamped);
        // sample variance of ±1 alternation over 10 points is 10/9
        let v = sqrt(10.0 / 9.0);
        let edge: Vec<(f64, f64)> = (0..10)
            .map(|i| (10.0 + if i % 2 == 0 { 1.0 } else { -1.0 }, v))
            .collect();
        let s = t1_fluctuation_stats(&edge).unwrap();
        assert!(s.sigma_intrinsic < 1e-7);
        assert!(t1_fluctuation_stats(&same[..9]).is_err());
    }

    #[test]
    fn windowed_rates() {
        assert_eq!(windowed_error_rate(&[false; 6], 3).unwrap(), vec![0.0; 4]);
        let alt: Vec<bool> = (0..9).map(|i| i % 2 == 1).collect();
        assert!(windowed_error_rate(&alt, 2)
            .unwrap()
            .iter()
            .all(|&r| r == 0.5));
        let g = windowed_error_rate(&alt, 9).unwrap();
        assert_eq!(g, vec![4.0 / 9.0]);
        assert!(windowed_error_rate(&alt, 0).is_err());
        assert!(windowed_error_rate(&alt, 10).is_err());
    }

    proptest! {
        #[test]
        fn population_scale_invariant(a in 0.0f64..10.0, b in 1e-3f64..10.0, k in 1e-3f64..1e3) {
            let p = population_from_ef_amplitudes(a, b).unwrap();
            let q = population_from_ef_amplitudes(k * a, k * b).unwrap();
            prop_assert!((p - q).abs() <= 1e-15);
        }

        #[test]
        fn window_rates_in_unit_interval(bits in proptest::collection::vec(any::<bool>(), 1..200), w in 1usize..50) {
            let w = w.min(bits.len());
            let r = windowed_error_rate(&bits, w).unwrap();
            prop_assert_eq!(r.len(), bits.len() - w + 1);
            prop_assert!(r.iter().all(|x| (0.0..=1.0).contains(x)));
            let one = windowed_error_rate(&bits, 1).unwrap();
            for (x, b) in one.iter().zip(&bits) {
                prop_assert_eq!(*x, if *b { 1.0 } else { 0.0 });
            }
        }
    }
}
