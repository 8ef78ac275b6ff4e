//! JSON run configuration.
//!
//! Every field is optional; `{}` is the default run (150 days, Poisson demand
//! with rate 10, no disruption, static baseline, bundled knowledge bases).
//! Scenario fields left out take the kind's defaults, so
//! `{"scenario": {"kind": "demand_surge"}}` is a 20-day surge of 1.5x starting
//! on day 60. Relative knowledge-base paths resolve against the directory of
//! the configuration file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::demand::DemandModel;
use crate::disruption::{DisruptionKind, DisruptionScenario};
use crate::error::{Error, Result};
use crate::harness::{KbPaths, RunConfig};
use crate::knowledge::StrategyParameters;
use crate::panel::RatingBands;
use crate::policy::{EmergencyRule, PolicyKind, PolicySource};
use crate::scalar::Scalar;
use crate::world::{ChainParameters, PerRole};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    horizon: Option<i64>,
    seed: Option<u64>,
    policy: Option<String>,
    policy_source: Option<PolicySource>,
    scenario: Option<ScenarioEntry>,
    costs: Option<CostEntry>,
    demand: Option<DemandModel>,
    chain: Option<ChainParameters>,
    kb: Option<KbPaths>,
    strategy_override: Option<StrategyEntry>,
    premium_window_end: Option<u32>,
    fixed_targets: Option<PerRole<u64>>,
    initial_stock: Option<PerRole<u64>>,
    emergency: Option<EmergencyRule>,
    rating_bands: Option<RatingBands>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioEntry {
    kind: String,
    start_day: Option<u32>,
    duration_days: Option<u32>,
    magnitude: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CostEntry {
    holding_rate: Option<HoldingRate>,
    backorder_penalty: Option<f64>,
    premium_per_shipment: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum HoldingRate {
    Uniform(f64),
    PerRole(PerRole<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyEntry {
    extra_lead_time: u32,
    #[serde(default)]
    transport_cost_premium: f64,
}

impl ScenarioEntry {
    fn resolve(self) -> Result<DisruptionScenario> {
        let kind: DisruptionKind = self.kind.parse()?;
        let mut s = DisruptionScenario::new(kind);
        if let Some(d) = self.start_day {
            s.start_day = d;
        }
        if let Some(d) = self.duration_days {
            s.duration_days = d;
        }
        if let Some(m) = self.magnitude {
            s.magnitude = m;
        }
        s.validate()?;
        Ok(s)
    }
}

fn resolve_path(path: Option<PathBuf>, base: Option<&Path>) -> Option<PathBuf> {
    match (path, base) {
        (Some(p), Some(dir)) if p.is_relative() => Some(dir.join(p)),
        (p, _) => p,
    }
}

/// Parses a configuration document. `base_dir` anchors relative paths.
pub fn parse_run_config<T: Scalar>(text: &str, base_dir: Option<&Path>) -> Result<RunConfig<T>> {
    let file: ConfigFile = serde_json::from_str(text).map_err(|e| Error::Json {
        path: base_dir.map(Path::to_path_buf).unwrap_or_default(),
        source: e,
    })?;
    build(file, base_dir)
}

/// Reads and validates a configuration file.
pub fn load_run_config<T: Scalar>(path: &Path) -> Result<RunConfig<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ConfigFile = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    build(file, path.parent())
}

fn build<T: Scalar>(file: ConfigFile, base_dir: Option<&Path>) -> Result<RunConfig<T>> {
    let mut c: RunConfig<T> = RunConfig::default();
    if let Some(h) = file.horizon {
        c.horizon = u32::try_from(h)
            .ok()
            .filter(|&h| h >= 1)
            .ok_or_else(|| Error::config(format!("horizon must be at least 1, got {h}")))?;
    }
    if let Some(seed) = file.seed {
        c.seed = seed;
    }
    if let Some(p) = file.policy {
        c = c.with_policy(p.parse::<PolicyKind>()?);
    }
    if let Some(src) = file.policy_source {
        c.policy_source = src;
    }
    if let Some(s) = file.scenario {
        c.scenario = s.resolve()?;
    }
    if let Some(costs) = file.costs {
        match costs.holding_rate {
            Some(HoldingRate::Uniform(v)) => c.costs.holding_rate = PerRole::uniform(T::lit(v)),
            Some(HoldingRate::PerRole(r)) => {
                c.costs.holding_rate = PerRole {
                    supplier: T::lit(r.supplier),
                    manufacturer: T::lit(r.manufacturer),
                    retailer: T::lit(r.retailer),
                }
            }
            None => {}
        }
        if let Some(v) = costs.backorder_penalty {
            c.costs.backorder_penalty = T::lit(v);
        }
        if let Some(v) = costs.premium_per_shipment {
            c.costs.premium_per_shipment = T::lit(v);
        }
    }
    if let Some(d) = file.demand {
        c.demand = d;
    }
    if let Some(chain) = file.chain {
        c.chain = chain;
    }
    if let Some(kb) = file.kb {
        c.kb = KbPaths {
            policies: resolve_path(kb.policies, base_dir),
            strategies: resolve_path(kb.strategies, base_dir),
            reactive: resolve_path(kb.reactive, base_dir),
        };
    }
    if let Some(s) = file.strategy_override {
        c.strategy_override = Some(StrategyParameters {
            extra_lead_time: s.extra_lead_time,
            transport_cost_premium: T::lit(s.transport_cost_premium),
        });
    }
    c.premium_window_end = file.premium_window_end;
    if let Some(t) = file.fixed_targets {
        c.fixed_targets = t;
    }
    c.initial_stock = file.initial_stock;
    if let Some(e) = file.emergency {
        c.emergency = e;
    }
    if let Some(b) = file.rating_bands {
        c.rating_bands = b;
    }
    c.validate()?;
    Ok(c)
}
