//! Customer demand at the Retailer.

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::disruption::{DisruptionKind, DisruptionScenario};

/// Random stream used by every run. Replication `r` is seeded with `base + r`.
pub type SimRng = SplitMix64;

pub fn seeded_rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemandProcess {
    #[default]
    Poisson,
    /// Deterministic demand of `floor(rate)` units per day.
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemandModel {
    pub base_rate: f64,
    pub surge_multiplier: f64,
    /// Half-open day window `[start, end)` during which the surge applies.
    pub surge_window: Option<(u32, u32)>,
    pub process: DemandProcess,
}

impl Default for DemandModel {
    fn default() -> Self {
        DemandModel {
            base_rate: 10.0,
            surge_multiplier: 1.5,
            surge_window: None,
            process: DemandProcess::Poisson,
        }
    }
}

impl DemandModel {
    pub fn effective_rate(&self, day: u32) -> f64 {
        match self.surge_window {
            Some((start, end)) if (start..end).contains(&day) => {
                self.base_rate * self.surge_multiplier
            }
            _ => self.base_rate,
        }
    }

    /// Installs the surge of a demand-surge scenario; other scenarios leave
    /// the model untouched.
    pub fn under_scenario(&self, scenario: &DisruptionScenario) -> DemandModel {
        let mut model = self.clone();
        if scenario.kind == DisruptionKind::DemandSurge {
            model.surge_multiplier = scenario.magnitude;
            model.surge_window = Some(scenario.window());
        }
        model
    }
}

/// Draws one day's customer demand.
pub fn sample_demand<R: Rng + ?Sized>(rng: &mut R, day: u32, model: &DemandModel) -> u64 {
    let rate = model.effective_rate(day);
    match model.process {
        DemandProcess::Poisson => poisson(rng, rate),
        DemandProcess::Constant => rate.max(0.0).floor() as u64,
    }
}

// exp(-CHUNK) stays far from underflow; larger rates are split into chunks
// and summed, which is exact for the Poisson family.
const CHUNK: f64 = 30.0;

/// Poisson draw by inversion with sequential search over the CDF.
pub fn poisson<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> u64 {
    if rate.is_nan() || rate <= 0.0 {
        return 0;
    }
    let mut remaining = rate;
    let mut total = 0;
    while remaining > CHUNK {
        total += poisson_inversion(rng, CHUNK);
        remaining -= CHUNK;
    }
    total + poisson_inversion(rng, remaining)
}

fn poisson_inversion<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> u64 {
    let u: f64 = rng.gen();
    let mut k = 0u64;
    let mut p = (-rate).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= rate / k as f64;
        if p == 0.0 {
            break;
        }
        cdf += p;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_close_to_rate() {
        let mut rng = seeded_rng(7);
        let model = DemandModel::default();
        let n = 100_000;
        let total: u64 = (0..n).map(|d| sample_demand(&mut rng, d, &model)).sum();
        let mean = total as f64 / n as f64;
        assert!((9.85..=10.15).contains(&mean), "mean {mean}");
    }

    #[test]
    fn surge_window_rate() {
        let model = DemandModel {
            surge_window: Some((60, 80)),
            ..DemandModel::default()
        };
        assert_eq!(model.effective_rate(59), 10.0);
        assert_eq!(model.effective_rate(60), 15.0);
        assert_eq!(model.effective_rate(79), 15.0);
        assert_eq!(model.effective_rate(80), 10.0);
    }

    #[test]
    fn zero_rate_is_zero() {
        let mut rng = seeded_rng(1);
        let model = DemandModel {
            base_rate: 0.0,
            ..DemandModel::default()
        };
        assert!((0..1000).all(|d| sample_demand(&mut rng, d, &model) == 0));
    }

    #[test]
    fn large_rates_are_chunked() {
        let mut rng = seeded_rng(3);
        let n = 20_000;
        let mean = (0..n).map(|_| poisson(&mut rng, 800.0)).sum::<u64>() as f64 / n as f64;
        assert!((mean - 800.0).abs() < 2.0, "mean {mean}");
    }

    #[test]
    fn same_seed_same_stream() {
        let model = DemandModel::default();
        let mut a = seeded_rng(42);
        let mut b = seeded_rng(42);
        for day in 0..500 {
            assert_eq!(
                sample_demand(&mut a, day, &model),
                sample_demand(&mut b, day, &model)
            );
        }
    }

    #[test]
    fn constant_process() {
        let mut rng = seeded_rng(0);
        let model = DemandModel {
            base_rate: 10.7,
            process: DemandProcess::Constant,
            ..DemandModel::default()
        };
        assert_eq!(sample_demand(&mut rng, 3, &model), 10);
    }
}
