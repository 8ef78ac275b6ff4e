//! Experiment orchestration: single runs, replicated batches, the scenario
//! grid, the strategic-choice pipeline and the hoarding demonstration.

use std::borrow::Cow;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::demand::DemandModel;
use crate::disruption::{DisruptionKind, DisruptionScenario};
use crate::entity::Role;
use crate::error::{Error, Result};
use crate::knowledge::{
    extract_parameters, parse_knowledge_base, retrieve_portfolio, KnowledgeBase, KnowledgeDocument,
    StrategyParameters, POLICIES_KB, REACTIVE_KB, STRATEGIES_KB,
};
use crate::panel::{evaluate_portfolio, CostRating, Evaluation, RatingBands, SpeedRating};
use crate::policy::{
    sga_set_policies, Agent, EmergencyRule, PolicyKind, PolicySource, PolicyVariant,
};
use crate::scalar::Scalar;
use crate::world::{
    step_day, ChainParameters, CostParameters, DayRecord, KpiReport, PerRole, SimSettings,
    WorldState,
};

pub const DEFAULT_HORIZON: u32 = 150;
pub const DEFAULT_REPLICATIONS: usize = 30;
pub const PORTFOLIO_QUERY: &str = "transportation disruption response";

/// Knowledge base locations. `None` selects the copy bundled with the crate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KbPaths {
    pub policies: Option<PathBuf>,
    pub strategies: Option<PathBuf>,
    pub reactive: Option<PathBuf>,
}

fn load_kb(path: Option<&Path>, bundled: &str) -> Result<KnowledgeBase> {
    match path {
        Some(p) => KnowledgeBase::load(p),
        None => parse_knowledge_base(bundled),
    }
}

impl KbPaths {
    pub fn policies(&self) -> Result<KnowledgeBase> {
        load_kb(self.policies.as_deref(), POLICIES_KB)
    }

    pub fn strategies(&self) -> Result<KnowledgeBase> {
        load_kb(self.strategies.as_deref(), STRATEGIES_KB)
    }

    pub fn reactive(&self) -> Result<KnowledgeBase> {
        load_kb(self.reactive.as_deref(), REACTIVE_KB)
    }
}

/// Complete description of a run or batch of runs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig<T> {
    pub horizon: u32,
    /// Seed of a single run; replication `r` of a batch uses `seed + r`.
    pub seed: u64,
    pub policy: PolicyKind,
    pub policy_source: PolicySource,
    pub scenario: DisruptionScenario,
    pub costs: CostParameters<T>,
    pub demand: DemandModel,
    pub chain: ChainParameters,
    pub kb: KbPaths,
    pub strategy_override: Option<StrategyParameters<T>>,
    pub premium_window_end: Option<u32>,
    /// Order-up-to levels of the fixed-target policies.
    pub fixed_targets: PerRole<u64>,
    /// Stock on hand at day 0; defaults to `fixed_targets`.
    pub initial_stock: Option<PerRole<u64>>,
    pub emergency: EmergencyRule,
    pub rating_bands: RatingBands,
}

/// Order-up-to levels used by the fixed-target policies unless configured.
pub const DEFAULT_FIXED_TARGETS: PerRole<u64> = PerRole {
    supplier: 40,
    manufacturer: 60,
    retailer: 40,
};

impl<T: Scalar> Default for RunConfig<T> {
    fn default() -> Self {
        RunConfig {
            horizon: DEFAULT_HORIZON,
            seed: 0,
            policy: PolicyKind::StaticBaseline,
            policy_source: PolicySource::Fixed,
            scenario: DisruptionScenario::none(),
            costs: CostParameters::default(),
            demand: DemandModel::default(),
            chain: ChainParameters::default(),
            kb: KbPaths::default(),
            strategy_override: None,
            premium_window_end: None,
            fixed_targets: DEFAULT_FIXED_TARGETS,
            initial_stock: None,
            emergency: EmergencyRule::default(),
            rating_bands: RatingBands::default(),
        }
    }
}

impl<T: Scalar> RunConfig<T> {
    /// Default configuration for `policy` under `scenario`.
    pub fn new(policy: PolicyKind, scenario: DisruptionKind) -> Self {
        RunConfig {
            policy,
            policy_source: policy.default_source(),
            scenario: DisruptionScenario::new(scenario),
            ..RunConfig::default()
        }
    }

    pub fn with_policy(mut self, policy: PolicyKind) -> Self {
        self.policy = policy;
        self.policy_source = policy.default_source();
        self
    }

    pub fn with_scenario(mut self, scenario: DisruptionScenario) -> Self {
        self.scenario = scenario;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::config("horizon must be at least 1 day"));
        }
        self.scenario.validate()?;
        if !self.costs.is_valid() {
            return Err(Error::config("cost rates must be finite and non-negative"));
        }
        if !(self.demand.base_rate >= 0.0 && self.demand.surge_multiplier >= 0.0)
            || !self.demand.base_rate.is_finite()
        {
            return Err(Error::config(
                "demand rates must be finite and non-negative",
            ));
        }
        if let Some(s) = &self.strategy_override {
            if s.transport_cost_premium.is_nan() || s.transport_cost_premium < T::zero() {
                return Err(Error::config("strategy premium must be non-negative"));
            }
        }
        PolicyVariant::new(self.policy, self.policy_source)?;
        Ok(())
    }
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome<T> {
    pub trace: Vec<DayRecord<T>>,
    pub report: KpiReport<T>,
    pub world: WorldState<T>,
}

/// A validated configuration with its knowledge bases loaded and targets
/// resolved. Cheap to run many times with different seeds.
#[derive(Debug, Clone)]
pub struct PreparedRun<T> {
    pub settings: SimSettings<T>,
    pub variant: PolicyVariant,
    pub targets: [u64; 3],
    pub initial_stock: [u64; 3],
    reactive: Option<KnowledgeBase>,
    emergency: EmergencyRule,
}

impl<T: Scalar> PreparedRun<T> {
    pub fn prepare(config: &RunConfig<T>) -> Result<Self> {
        config.validate()?;
        let variant = PolicyVariant::new(config.policy, config.policy_source)?;
        let targets = match config.policy_source {
            PolicySource::Fixed => config.fixed_targets.as_array(),
            PolicySource::SgaAtT0 => {
                let set = sga_set_policies(&config.kb.policies()?)?;
                Role::ALL.map(|r| set[&r])
            }
        };
        let initial_stock = config
            .initial_stock
            .unwrap_or(config.fixed_targets)
            .as_array();
        let reactive = match config.policy {
            PolicyKind::SelfishRag => Some(config.kb.reactive()?),
            _ => None,
        };
        let mut settings = SimSettings::new(config.horizon, config.scenario.clone());
        settings.chain = config.chain.clone();
        settings.costs = config.costs.clone();
        settings.demand = config.demand.under_scenario(&config.scenario);
        settings.premium_window_end = config.premium_window_end;
        if let Some(strategy) = config.strategy_override {
            settings = settings.with_strategy(strategy);
        }
        Ok(PreparedRun {
            settings,
            variant,
            targets,
            initial_stock,
            reactive,
            emergency: config.emergency.clone(),
        })
    }

    pub fn initial_world(&self, seed: u64) -> WorldState<T> {
        WorldState::new(&self.settings.chain, self.targets, self.initial_stock, seed)
    }

    pub fn agent(&self) -> Agent<'_> {
        let mut agent = Agent::new(self.variant.clone(), self.reactive.as_ref());
        agent.rule = self.emergency.clone();
        agent
    }

    pub fn run(&self, seed: u64) -> RunOutcome<T> {
        let mut world = self.initial_world(seed);
        let mut agent = self.agent();
        let mut trace = Vec::with_capacity(self.settings.horizon as usize * 3);
        while world.day < self.settings.horizon {
            trace.extend(step_day(&mut world, &mut agent, &self.settings));
        }
        RunOutcome {
            report: KpiReport::from_world(&world),
            trace,
            world,
        }
    }
}

/// Runs the configured horizon once with `config.seed`.
pub fn run_simulation<T: Scalar>(config: &RunConfig<T>) -> Result<RunOutcome<T>> {
    Ok(PreparedRun::prepare(config)?.run(config.seed))
}

/// Sample mean and standard deviation (n - 1 denominator, 0 when n = 1),
/// accumulated with Welford's update over the values in ascending order so the
/// result does not depend on the order runs finished in.
pub fn mean_std<T: Scalar>(samples: &[T]) -> (T, T) {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut mean = T::zero();
    let mut m2 = T::zero();
    for (i, &x) in sorted.iter().enumerate() {
        let n = T::from_units(i as u64 + 1);
        let delta = x - mean;
        mean = mean + delta / n;
        m2 = m2 + delta * (x - mean);
    }
    let std = if sorted.len() > 1 {
        (m2 / T::from_units(sorted.len() as u64 - 1)).sqrt()
    } else {
        T::zero()
    };
    (mean, std)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationStats<T> {
    pub mean_cost: T,
    pub std_cost: T,
    pub mean_service: T,
    pub std_service: T,
    pub n: usize,
}

impl<T: Scalar> ReplicationStats<T> {
    pub fn from_reports(reports: &[KpiReport<T>]) -> Self {
        let costs: Vec<T> = reports.iter().map(|r| r.total_cost).collect();
        let service: Vec<T> = reports.iter().map(|r| r.service_level).collect();
        let (mean_cost, std_cost) = mean_std(&costs);
        let (mean_service, std_service) = mean_std(&service);
        ReplicationStats {
            mean_cost,
            std_cost,
            mean_service,
            std_service,
            n: reports.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replications<T> {
    pub stats: ReplicationStats<T>,
    /// One report per replication, in replication order.
    pub reports: Vec<KpiReport<T>>,
}

/// `n` independent runs seeded `config.seed + r`, executed in parallel.
pub fn run_replications<T: Scalar>(config: &RunConfig<T>, n: usize) -> Result<Replications<T>> {
    if n == 0 {
        return Err(Error::config("replication count must be at least 1"));
    }
    let prepared = PreparedRun::prepare(config)?;
    let reports: Vec<KpiReport<T>> = (0..n as u64)
        .into_par_iter()
        .map(|r| prepared.run(config.seed.wrapping_add(r)).report)
        .collect();
    Ok(Replications {
        stats: ReplicationStats::from_reports(&reports),
        reports,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteCell<T> {
    pub scenario: DisruptionKind,
    pub policy: PolicyKind,
    pub stats: ReplicationStats<T>,
}

/// Grid of replicated results, scenario-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport<T> {
    pub cells: Vec<SuiteCell<T>>,
}

impl<T: Scalar> SuiteReport<T> {
    pub fn cell(&self, scenario: DisruptionKind, policy: PolicyKind) -> Option<&SuiteCell<T>> {
        self.cells
            .iter()
            .find(|c| c.scenario == scenario && c.policy == policy)
    }
}

/// Every (scenario, policy) pair replicated `n` times on top of `base`.
pub fn scenario_suite<T: Scalar>(
    base: &RunConfig<T>,
    policies: &[PolicyKind],
    scenarios: &[DisruptionKind],
    n: usize,
) -> Result<SuiteReport<T>> {
    if policies.is_empty() || scenarios.is_empty() {
        return Err(Error::config(
            "suite needs at least one policy and one scenario",
        ));
    }
    let configs: Vec<_> = scenarios
        .iter()
        .flat_map(|&s| {
            policies.iter().map(move |&p| {
                let mut c = base.clone().with_policy(p);
                if c.scenario.kind != s {
                    c.scenario = DisruptionScenario {
                        kind: s,
                        start_day: base.scenario.start_day,
                        ..DisruptionScenario::new(s)
                    };
                }
                (s, p, c)
            })
        })
        .collect();
    // Fail on any bad configuration before running anything.
    for (_, _, c) in &configs {
        PreparedRun::prepare(c)?;
    }
    let cells = configs
        .iter()
        .map(|(s, p, c)| {
            Ok(SuiteCell {
                scenario: *s,
                policy: *p,
                stats: run_replications(c, n)?.stats,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport { cells })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint<T> {
    pub strategy_name: String,
    pub total_cost: T,
    pub service_level: T,
    pub cost_rating: CostRating,
    pub speed_rating: SpeedRating,
    /// Another point is at least as cheap and at least as reliable.
    pub dominated: bool,
}

/// Flags points for which some other point has lower-or-equal cost and
/// higher-or-equal service.
pub fn mark_dominated<T: Scalar>(points: &mut [FrontierPoint<T>]) {
    let flags: Vec<bool> = (0..points.len())
        .map(|i| {
            points.iter().enumerate().any(|(j, q)| {
                j != i
                    && q.total_cost <= points[i].total_cost
                    && q.service_level >= points[i].service_level
            })
        })
        .collect();
    for (p, f) in points.iter_mut().zip(flags) {
        p.dominated = f;
    }
}

#[derive(Debug, Clone)]
pub struct StrategicChoice<T> {
    pub portfolio: Vec<KnowledgeDocument>,
    pub parameters: Vec<StrategyParameters<T>>,
    pub evaluations: Vec<Evaluation>,
    pub frontier: Vec<FrontierPoint<T>>,
    /// One run per strategy, same order as the portfolio.
    pub runs: Vec<RunOutcome<T>>,
}

/// Configuration the strategic-choice experiment expects: the collaborative
/// policy under a transport disruption (kept if already configured).
pub fn strategic_choice_config<T: Scalar>(base: &RunConfig<T>) -> RunConfig<T> {
    let mut c = base.clone().with_policy(PolicyKind::CollaborativeVmi);
    if c.scenario.kind != DisruptionKind::TransportDisruption {
        c.scenario = DisruptionScenario::new(DisruptionKind::TransportDisruption);
    }
    c
}

/// Retrieves the strategy portfolio, rates it, and runs the simulation once
/// per strategy with a common seed.
pub fn strategic_choice_experiment<T: Scalar>(config: &RunConfig<T>) -> Result<StrategicChoice<T>> {
    if config.policy != PolicyKind::CollaborativeVmi {
        return Err(Error::Experiment(format!(
            "strategic choice runs on collaborative-vmi, not {}",
            config.policy
        )));
    }
    if config.scenario.kind != DisruptionKind::TransportDisruption {
        return Err(Error::Experiment(format!(
            "strategic choice needs a transport disruption, not {}",
            config.scenario.kind
        )));
    }
    let kb = config.kb.strategies()?;
    let portfolio: Vec<KnowledgeDocument> = retrieve_portfolio(&kb, PORTFOLIO_QUERY)
        .map_err(|e| Error::Experiment(format!("empty strategy portfolio: {e}")))?
        .into_iter()
        .cloned()
        .collect();
    let parameters = portfolio
        .iter()
        .map(extract_parameters::<T>)
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<_> = portfolio.iter().zip(parameters.iter().copied()).collect();
    let evaluations = evaluate_portfolio(&pairs, &config.rating_bands);

    let runs = parameters
        .par_iter()
        .map(|p| {
            let mut c = config.clone();
            c.strategy_override = Some(*p);
            run_simulation(&c)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut frontier: Vec<FrontierPoint<T>> = evaluations
        .iter()
        .zip(&runs)
        .map(|(e, run)| FrontierPoint {
            strategy_name: e.strategy_name.clone(),
            total_cost: run.report.total_cost,
            service_level: run.report.service_level,
            cost_rating: e.cost,
            speed_rating: e.speed,
            dominated: false,
        })
        .collect();
    mark_dominated(&mut frontier);
    Ok(StrategicChoice {
        portfolio,
        parameters,
        evaluations,
        frontier,
        runs,
    })
}

/// Single run of the hoarding variant, kept whole for charting.
pub fn hoarding_demo<T: Scalar>(config: &RunConfig<T>) -> Result<RunOutcome<T>> {
    if config.policy != PolicyKind::HoardingVmi {
        return Err(Error::Experiment(format!(
            "hoarding demo runs on hoarding-vmi, not {}",
            config.policy
        )));
    }
    run_simulation(config)
}

/// Label used for a policy in reports; flags variants beyond the two
/// non-collaborative benchmarks.
pub fn policy_label(kind: PolicyKind) -> Cow<'static, str> {
    match kind {
        PolicyKind::StaticBaseline | PolicyKind::SelfishRag => Cow::Borrowed(kind.name()),
        other => Cow::Owned(format!("{} (extension)", other.name())),
    }
}
