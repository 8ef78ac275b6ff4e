//! Daily decision procedures for the four agent architectures.
//!
//! Each procedure reads the world and returns a [`DecisionSet`]. Orders are
//! computed downstream first, and each upstream entity sees the order its
//! customer places today as part of its own backlog, so after all orders are
//! placed every ordering entity's inventory position sits at its target.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::entity::{inventory_position, Role};
use crate::error::{Error, Result};
use crate::knowledge::{retrieve, DocKind, KnowledgeBase};
use crate::scalar::Scalar;
use crate::world::WorldState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    StaticBaseline,
    SelfishRag,
    HoardingVmi,
    CollaborativeVmi,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::StaticBaseline,
        PolicyKind::SelfishRag,
        PolicyKind::HoardingVmi,
        PolicyKind::CollaborativeVmi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::StaticBaseline => "static-baseline",
            PolicyKind::SelfishRag => "selfish-rag",
            PolicyKind::HoardingVmi => "hoarding-vmi",
            PolicyKind::CollaborativeVmi => "collaborative-vmi",
        }
    }

    pub fn is_vmi(self) -> bool {
        matches!(self, PolicyKind::HoardingVmi | PolicyKind::CollaborativeVmi)
    }

    /// Where targets come from unless configured otherwise.
    pub fn default_source(self) -> PolicySource {
        if self.is_vmi() {
            PolicySource::SgaAtT0
        } else {
            PolicySource::Fixed
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.name() == s || k.name().replace('-', "_") == s)
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown policy {s:?} (expected one of static-baseline, selfish-rag, \
                     hoarding-vmi, collaborative-vmi)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicySource {
    /// Targets fixed by configuration.
    Fixed,
    /// Targets read from the policy knowledge base before day 0.
    SgaAtT0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EmergencyState {
    pub cooldown_until: u32,
}

/// Sizing of the selfish Manufacturer's emergency order. Values found in the
/// retrieved document (`target_multiplier`, `cooldown_days`) take precedence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmergencyRule {
    pub target_multiplier: u64,
    pub cooldown_days: u32,
    pub query: String,
}

impl Default for EmergencyRule {
    fn default() -> Self {
        EmergencyRule {
            target_multiplier: 2,
            cooldown_days: 10,
            query: "Manufacturer stockout emergency".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyVariant {
    pub kind: PolicyKind,
    pub emergency: EmergencyState,
    pub source: PolicySource,
}

impl PolicyVariant {
    pub fn new(kind: PolicyKind, source: PolicySource) -> Result<Self> {
        if kind.is_vmi() && source != PolicySource::SgaAtT0 {
            return Err(Error::config(format!(
                "{kind} requires targets set by the policy advisor at t=0"
            )));
        }
        Ok(PolicyVariant {
            kind,
            emergency: EmergencyState::default(),
            source,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DecisionSet {
    /// Orders on the upstream neighbour; for the Supplier, units to produce.
    pub replenishment_orders: Vec<(Role, u64)>,
    pub push_shipments: Vec<(Role, Role, u64)>,
}

impl DecisionSet {
    pub fn order_for(&self, role: Role) -> u64 {
        self.replenishment_orders
            .iter()
            .filter(|(r, _)| *r == role)
            .map(|(_, q)| q)
            .sum()
    }

    fn order(&mut self, role: Role, qty: u64) {
        if qty > 0 {
            self.replenishment_orders.push((role, qty));
        }
    }
}

fn shortfall(target: i64, position: i64) -> u64 {
    (target - position).max(0) as u64
}

fn position<T: Scalar>(world: &WorldState<T>, role: Role) -> i64 {
    inventory_position(world.entity(role))
}

fn out_level<T: Scalar>(world: &WorldState<T>, role: Role) -> i64 {
    world.entity(role).out_level as i64
}

/// Supplier production order once the Manufacturer's order `m_order` lands
/// on its backlog.
fn supplier_order<T: Scalar>(world: &WorldState<T>, m_order: u64) -> u64 {
    let pos = position(world, Role::Supplier) - m_order as i64;
    shortfall(out_level(world, Role::Supplier), pos)
}

/// Independent order-up-to ordering at every echelon.
pub fn baseline_decide<T: Scalar>(world: &WorldState<T>) -> DecisionSet {
    decentralized(world, None)
}

fn decentralized<T: Scalar>(world: &WorldState<T>, m_target: Option<i64>) -> DecisionSet {
    let mut out = DecisionSet::default();
    let r_order = shortfall(
        out_level(world, Role::Retailer),
        position(world, Role::Retailer),
    );
    let m_pos = position(world, Role::Manufacturer) - r_order as i64;
    let m_target = m_target.unwrap_or_else(|| out_level(world, Role::Manufacturer));
    let m_order = shortfall(m_target, m_pos);
    out.order(Role::Retailer, r_order);
    out.order(Role::Manufacturer, m_order);
    out.order(Role::Supplier, supplier_order(world, m_order));
    out
}

/// Baseline ordering plus a reactive emergency order by the Manufacturer
/// after a stockout.
///
/// The emergency fires when the Manufacturer has nothing on hand, still owes
/// the Retailer and is out of cooldown, and only if the reactive knowledge
/// base yields a document for the rule's query. Retrieval failure falls back
/// to plain baseline behaviour.
pub fn selfish_decide<T: Scalar>(
    world: &WorldState<T>,
    kb: Option<&KnowledgeBase>,
    state: EmergencyState,
    rule: &EmergencyRule,
) -> (DecisionSet, EmergencyState) {
    let m = world.entity(Role::Manufacturer);
    let r_order = shortfall(
        out_level(world, Role::Retailer),
        position(world, Role::Retailer),
    );
    let backlog = m.backorders + r_order;
    let triggered = m.on_hand == 0 && backlog > 0 && world.day >= state.cooldown_until;
    if !triggered {
        return (baseline_decide(world), state);
    }
    let doc = match kb.map(|kb| retrieve(kb, &rule.query, Some(DocKind::Strategy))) {
        Some(Ok(doc)) => doc,
        Some(Err(e)) => {
            log::warn!(
                "day {}: emergency retrieval failed ({e}); ordering as baseline",
                world.day
            );
            return (baseline_decide(world), state);
        }
        None => {
            log::warn!(
                "day {}: no reactive knowledge base; ordering as baseline",
                world.day
            );
            return (baseline_decide(world), state);
        }
    };
    let multiplier = doc
        .parameter("target_multiplier")
        .and_then(|v| u64::try_from(v).ok())
        .unwrap_or(rule.target_multiplier);
    let cooldown = doc
        .parameter("cooldown_days")
        .and_then(|v| u32::try_from(v).ok())
        .unwrap_or(rule.cooldown_days);
    let target = out_level(world, Role::Manufacturer) * multiplier as i64;
    let next = EmergencyState {
        cooldown_until: world.day.saturating_add(cooldown),
    };
    (decentralized(world, Some(target)), next)
}

/// Consolidated Manufacturer order covering both downstream echelons.
fn consolidated<T: Scalar>(world: &WorldState<T>) -> (DecisionSet, u64) {
    let mut out = DecisionSet::default();
    let target = out_level(world, Role::Manufacturer) + out_level(world, Role::Retailer);
    let system = position(world, Role::Manufacturer) + position(world, Role::Retailer);
    let m_order = shortfall(target, system);
    out.order(Role::Manufacturer, m_order);
    out.order(Role::Supplier, supplier_order(world, m_order));
    (out, m_order)
}

/// Centralized ordering that never moves stock to the Retailer.
pub fn hoarding_vmi_decide<T: Scalar>(world: &WorldState<T>) -> DecisionSet {
    consolidated(world).0
}

/// Centralized ordering plus a proactive push to the Retailer, sized before
/// the Manufacturer keeps anything for itself.
pub fn collaborative_vmi_decide<T: Scalar>(world: &WorldState<T>) -> DecisionSet {
    let (mut out, _) = consolidated(world);
    let deficit = shortfall(
        out_level(world, Role::Retailer),
        position(world, Role::Retailer),
    );
    let push = deficit.min(world.entity(Role::Manufacturer).on_hand);
    if push > 0 {
        out.push_shipments
            .push((Role::Manufacturer, Role::Retailer, push));
    }
    out
}

/// Reads each role's order-up-to level from the best-matching policy document.
pub fn sga_set_policies(kb: &KnowledgeBase) -> Result<BTreeMap<Role, u64>> {
    Role::ALL
        .into_iter()
        .map(|role| {
            let doc = retrieve(kb, role.name(), Some(DocKind::Policy))
                .map_err(|_| Error::config(format!("no policy document matches {role}")))?;
            let level = doc.parameter("order_up_to_level").ok_or_else(|| {
                Error::config(format!("policy {} has no order_up_to_level", doc.name))
            })?;
            let level = u64::try_from(level).map_err(|_| {
                Error::config(format!(
                    "policy {} has a negative order_up_to_level",
                    doc.name
                ))
            })?;
            Ok((role, level))
        })
        .collect()
}

/// Stateful driver that applies one [`PolicyVariant`] day after day.
#[derive(Debug, Clone)]
pub struct Agent<'kb> {
    pub variant: PolicyVariant,
    pub reactive_kb: Option<&'kb KnowledgeBase>,
    pub rule: EmergencyRule,
}

impl<'kb> Agent<'kb> {
    pub fn new(variant: PolicyVariant, reactive_kb: Option<&'kb KnowledgeBase>) -> Self {
        Agent {
            variant,
            reactive_kb,
            rule: EmergencyRule::default(),
        }
    }

    pub fn decide<T: Scalar>(&mut self, world: &WorldState<T>) -> DecisionSet {
        match self.variant.kind {
            PolicyKind::StaticBaseline => baseline_decide(world),
            PolicyKind::SelfishRag => {
                let (d, next) =
                    selfish_decide(world, self.reactive_kb, self.variant.emergency, &self.rule);
                self.variant.emergency = next;
                d
            }
            PolicyKind::HoardingVmi => hoarding_vmi_decide(world),
            PolicyKind::CollaborativeVmi => collaborative_vmi_decide(world),
        }
    }
}
