//! Disruption scenarios and the per-day modifiers they put in force.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub const DEFAULT_START_DAY: u32 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisruptionKind {
    None,
    SupplierFailure,
    TransportDisruption,
    DemandSurge,
    QualityFailure,
}

impl DisruptionKind {
    pub const DISRUPTIVE: [DisruptionKind; 4] = [
        DisruptionKind::SupplierFailure,
        DisruptionKind::TransportDisruption,
        DisruptionKind::DemandSurge,
        DisruptionKind::QualityFailure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DisruptionKind::None => "none",
            DisruptionKind::SupplierFailure => "supplier-failure",
            DisruptionKind::TransportDisruption => "transport-disruption",
            DisruptionKind::DemandSurge => "demand-surge",
            DisruptionKind::QualityFailure => "quality-failure",
        }
    }

    /// (duration in days, magnitude) used when a scenario leaves them out.
    pub fn defaults(self) -> (u32, f64) {
        match self {
            DisruptionKind::None => (0, 0.0),
            // production lead multiplier
            DisruptionKind::SupplierFailure => (20, 2.0),
            // extra lead days on Manufacturer-inbound shipments
            DisruptionKind::TransportDisruption => (15, 4.0),
            // demand rate multiplier
            DisruptionKind::DemandSurge => (20, 1.5),
            // fraction of Manufacturer stock destroyed, once
            DisruptionKind::QualityFailure => (1, 0.7),
        }
    }
}

impl fmt::Display for DisruptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DisruptionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| *c != '-' && *c != '_' && *c != ' ')
            .flat_map(char::to_lowercase)
            .collect();
        match key.as_str() {
            "none" => Ok(DisruptionKind::None),
            "supplierfailure" => Ok(DisruptionKind::SupplierFailure),
            "transportdisruption" | "transport" => Ok(DisruptionKind::TransportDisruption),
            "demandsurge" | "surge" => Ok(DisruptionKind::DemandSurge),
            "qualityfailure" => Ok(DisruptionKind::QualityFailure),
            _ => Err(Error::config(format!("unknown scenario {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisruptionScenario {
    pub kind: DisruptionKind,
    pub start_day: u32,
    pub duration_days: u32,
    pub magnitude: f64,
}

impl DisruptionScenario {
    pub fn new(kind: DisruptionKind) -> Self {
        let (duration_days, magnitude) = kind.defaults();
        DisruptionScenario {
            kind,
            start_day: DEFAULT_START_DAY,
            duration_days,
            magnitude,
        }
    }

    pub fn none() -> Self {
        Self::new(DisruptionKind::None)
    }

    /// Half-open active window `[start, start + duration)`.
    pub fn window(&self) -> (u32, u32) {
        (
            self.start_day,
            self.start_day.saturating_add(self.duration_days),
        )
    }

    pub fn is_active(&self, day: u32) -> bool {
        let (start, end) = self.window();
        self.kind != DisruptionKind::None && (start..end).contains(&day)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let ok = match self.kind {
            DisruptionKind::None => true,
            DisruptionKind::SupplierFailure | DisruptionKind::DemandSurge => {
                self.magnitude.is_finite() && self.magnitude >= 0.0
            }
            DisruptionKind::TransportDisruption => {
                self.magnitude.is_finite() && self.magnitude >= 0.0
            }
            DisruptionKind::QualityFailure => (0.0..=1.0).contains(&self.magnitude),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!(
                "invalid magnitude {} for {}",
                self.magnitude, self.kind
            )))
        }
    }
}

impl Default for DisruptionScenario {
    fn default() -> Self {
        Self::none()
    }
}

/// Deltas in force on one day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modifiers {
    pub production_lead_multiplier: f64,
    /// Extra lead days on shipments dispatched towards the Manufacturer.
    pub extra_inbound_lead: u32,
    pub demand_multiplier: f64,
    /// Fraction of Manufacturer on-hand stock destroyed today.
    pub wipe_fraction: Option<f64>,
}

impl Modifiers {
    pub const NONE: Modifiers = Modifiers {
        production_lead_multiplier: 1.0,
        extra_inbound_lead: 0,
        demand_multiplier: 1.0,
        wipe_fraction: None,
    };

    pub fn is_empty(&self) -> bool {
        *self == Modifiers::NONE
    }
}

impl Default for Modifiers {
    fn default() -> Self {
        Modifiers::NONE
    }
}

/// Modifiers the scenario puts in force on `day`.
///
/// `strategy_lead` replaces the transport delay while the scenario window is
/// open; it is how a mitigation strategy's `extra_lead_time` enters the run.
pub fn disruption_modifiers(
    scenario: &DisruptionScenario,
    day: u32,
    strategy_lead: Option<u32>,
) -> Modifiers {
    let mut m = Modifiers::NONE;
    if scenario.kind == DisruptionKind::QualityFailure {
        if day == scenario.start_day {
            m.wipe_fraction = Some(scenario.magnitude);
        }
    } else if scenario.is_active(day) {
        match scenario.kind {
            DisruptionKind::SupplierFailure => m.production_lead_multiplier = scenario.magnitude,
            DisruptionKind::TransportDisruption => {
                m.extra_inbound_lead = scenario.magnitude.max(0.0).round() as u32
            }
            DisruptionKind::DemandSurge => m.demand_multiplier = scenario.magnitude,
            DisruptionKind::None | DisruptionKind::QualityFailure => {}
        }
    }
    if let Some(lead) = strategy_lead {
        if scenario.is_active(day) {
            m.extra_inbound_lead = lead;
        }
    }
    m
}

/// Units destroyed when `fraction` of `on_hand` is wiped, rounded down.
pub fn wiped_units(on_hand: u64, fraction: f64) -> u64 {
    // Nudge before flooring so decimal fractions such as 0.7 behave exactly.
    let lost = (on_hand as f64 * fraction + 1e-9).floor() as u64;
    lost.min(on_hand)
}
