//! Deterministic three-echelon supply-chain simulator.
//!
//! A Supplier, a Manufacturer and a Retailer exchange orders and shipments on
//! a daily clock while customer demand arrives at the Retailer. Four decision
//! architectures can drive the chain, from a fixed order-up-to baseline to a
//! collaborative vendor-managed protocol whose targets come from a text
//! knowledge base. Around the simulator sit lexical retrieval over those
//! knowledge bases, a rule-based rating panel for mitigation strategies, and
//! an experiment harness with replication statistics, CSV export and SVG
//! charts.
//!
//! Currency and statistics are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

pub mod chart;
pub mod config;
pub mod demand;
pub mod disruption;
pub mod entity;
pub mod error;
pub mod export;
pub mod harness;
pub mod knowledge;
pub mod panel;
pub mod policy;
pub mod scalar;
pub mod world;

pub use demand::{sample_demand, seeded_rng, DemandModel, DemandProcess, SimRng};
pub use disruption::{disruption_modifiers, DisruptionKind, DisruptionScenario, Modifiers};
pub use entity::{fulfill_demand, inventory_position, EntityState, FulfillmentResult, Role};
pub use error::{Error, Result};
pub use harness::{
    hoarding_demo, run_replications, run_simulation, scenario_suite, strategic_choice_config,
    strategic_choice_experiment, KbPaths, PreparedRun,
};
pub use knowledge::{
    extract_parameters, parse_knowledge_base, retrieve, retrieve_portfolio, similarity, DocKind,
    KnowledgeBase, KnowledgeDocument,
};
pub use panel::{evaluate_portfolio, rate_cost, rate_speed, CostRating, Evaluation, SpeedRating};
pub use policy::{DecisionSet, PolicyKind, PolicySource, PolicyVariant};
pub use scalar::Scalar;
pub use world::{dispatch, step_day, ChainParameters, PerRole, SimSettings};

pub type RunConfig = harness::RunConfig<f64>;
pub type RunOutcome = harness::RunOutcome<f64>;
pub type Replications = harness::Replications<f64>;
pub type ReplicationStats = harness::ReplicationStats<f64>;
pub type SuiteReport = harness::SuiteReport<f64>;
pub type FrontierPoint = harness::FrontierPoint<f64>;
pub type StrategicChoice = harness::StrategicChoice<f64>;
pub type WorldState = world::WorldState<f64>;
pub type KpiReport = world::KpiReport<f64>;
pub type DayRecord = world::DayRecord<f64>;
pub type Shipment = world::Shipment<f64>;
pub type CostParameters = world::CostParameters<f64>;
pub type StrategyParameters = knowledge::StrategyParameters<f64>;
