//! Rule-based expert panel that rates strategies on cost and speed.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::knowledge::{KnowledgeDocument, StrategyParameters};
use crate::scalar::Scalar;

/// Ordered cheapest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CostRating {
    Low,
    Medium,
    High,
    VeryHigh,
}

/// Ordered slowest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SpeedRating {
    VerySlow,
    Slow,
    Medium,
    Fast,
    VeryFast,
}

impl CostRating {
    pub fn label(self) -> &'static str {
        match self {
            CostRating::Low => "Low",
            CostRating::Medium => "Medium",
            CostRating::High => "High",
            CostRating::VeryHigh => "Very High",
        }
    }
}

impl SpeedRating {
    pub fn label(self) -> &'static str {
        match self {
            SpeedRating::VerySlow => "Very Slow",
            SpeedRating::Slow => "Slow",
            SpeedRating::Medium => "Medium",
            SpeedRating::Fast => "Fast",
            SpeedRating::VeryFast => "Very Fast",
        }
    }

    pub fn parse_label(s: &str) -> Option<Self> {
        [
            SpeedRating::VerySlow,
            SpeedRating::Slow,
            SpeedRating::Medium,
            SpeedRating::Fast,
            SpeedRating::VeryFast,
        ]
        .into_iter()
        .find(|r| r.label() == s)
    }
}

impl CostRating {
    pub fn parse_label(s: &str) -> Option<Self> {
        [
            CostRating::Low,
            CostRating::Medium,
            CostRating::High,
            CostRating::VeryHigh,
        ]
        .into_iter()
        .find(|r| r.label() == s)
    }
}

impl fmt::Display for CostRating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl fmt::Display for SpeedRating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Band edges of the rating tables. A premium at or above an edge earns that
/// band; a lead time at or above an edge is at least that slow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatingBands {
    pub cost_medium_from: f64,
    pub cost_high_from: f64,
    pub cost_very_high_from: f64,
    pub speed_fast_from: u32,
    pub speed_medium_from: u32,
    pub speed_slow_from: u32,
    pub speed_very_slow_from: u32,
}

impl Default for RatingBands {
    fn default() -> Self {
        RatingBands {
            cost_medium_from: 1.0,
            cost_high_from: 100.0,
            cost_very_high_from: 200.0,
            speed_fast_from: 1,
            speed_medium_from: 2,
            speed_slow_from: 3,
            speed_very_slow_from: 4,
        }
    }
}

impl RatingBands {
    pub fn rate_cost<T: Scalar>(&self, params: &StrategyParameters<T>) -> CostRating {
        let premium = params.transport_cost_premium.to_f64_lossy();
        if premium >= self.cost_very_high_from {
            CostRating::VeryHigh
        } else if premium >= self.cost_high_from {
            CostRating::High
        } else if premium >= self.cost_medium_from {
            CostRating::Medium
        } else {
            CostRating::Low
        }
    }

    pub fn rate_speed<T: Scalar>(&self, params: &StrategyParameters<T>) -> SpeedRating {
        let lead = params.extra_lead_time;
        if lead >= self.speed_very_slow_from {
            SpeedRating::VerySlow
        } else if lead >= self.speed_slow_from {
            SpeedRating::Slow
        } else if lead >= self.speed_medium_from {
            SpeedRating::Medium
        } else if lead >= self.speed_fast_from {
            SpeedRating::Fast
        } else {
            SpeedRating::VeryFast
        }
    }
}

pub fn rate_cost<T: Scalar>(params: &StrategyParameters<T>) -> CostRating {
    RatingBands::default().rate_cost(params)
}

pub fn rate_speed<T: Scalar>(params: &StrategyParameters<T>) -> SpeedRating {
    RatingBands::default().rate_speed(params)
}

const PROMPT_TAIL: &str = "Based on the context provided, evaluate the strategy on two\n\
criteria: Cost and Speed. Provide your ratings in a simple\n\
'key: value' format.";

/// Fills the panel's zero-shot prompt with a strategy description.
pub fn render_prompt(description: &str) -> String {
    let stop = if description.ends_with('.') { "" } else { "." };
    format!("Context: {description}{stop}\n\n{PROMPT_TAIL}")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluation {
    pub strategy_name: String,
    pub cost: CostRating,
    pub speed: SpeedRating,
    pub rendered_prompt: String,
}

/// Rates each strategy, keeping input order.
pub fn evaluate_portfolio<T: Scalar>(
    strategies: &[(&KnowledgeDocument, StrategyParameters<T>)],
    bands: &RatingBands,
) -> Vec<Evaluation> {
    strategies
        .iter()
        .map(|(doc, params)| Evaluation {
            strategy_name: doc.name.clone(),
            cost: bands.rate_cost(params),
            speed: bands.rate_speed(params),
            rendered_prompt: render_prompt(&doc.description),
        })
        .collect()
}
