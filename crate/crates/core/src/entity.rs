//! Per-echelon inventory bookkeeping.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Position of an entity in the chain, ordered upstream to downstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Supplier,
    Manufacturer,
    Retailer,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::Supplier, Role::Manufacturer, Role::Retailer];

    pub fn index(self) -> usize {
        self as usize
    }

    /// The entity this one orders from. The Supplier produces instead.
    pub fn upstream(self) -> Option<Role> {
        match self {
            Role::Supplier => None,
            Role::Manufacturer => Some(Role::Supplier),
            Role::Retailer => Some(Role::Manufacturer),
        }
    }

    pub fn downstream(self) -> Option<Role> {
        match self {
            Role::Supplier => Some(Role::Manufacturer),
            Role::Manufacturer => Some(Role::Retailer),
            Role::Retailer => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Role::Supplier => "Supplier",
            Role::Manufacturer => "Manufacturer",
            Role::Retailer => "Retailer",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "supplier" => Ok(Role::Supplier),
            "manufacturer" => Ok(Role::Manufacturer),
            "retailer" => Ok(Role::Retailer),
            other => Err(Error::config(format!("unknown role {other:?}"))),
        }
    }
}

/// Inventory state of one echelon.
///
/// `on_order` holds exactly the units in transit towards this entity (for the
/// Supplier: units in production). `awaiting` holds units this entity ordered
/// that its upstream neighbour has not shipped yet; it mirrors the upstream
/// entity's `backorders`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityState {
    pub role: Role,
    pub on_hand: u64,
    /// Units owed to this entity's customer (downstream entity, or end
    /// customers for the Retailer).
    pub backorders: u64,
    pub on_order: u64,
    pub awaiting: u64,
    pub out_level: u64,
    /// Units per day the Supplier can start producing. `None` elsewhere.
    pub production_capacity: Option<u64>,
}

impl EntityState {
    pub fn new(role: Role, on_hand: u64, out_level: u64) -> Self {
        EntityState {
            role,
            on_hand,
            backorders: 0,
            on_order: 0,
            awaiting: 0,
            out_level,
            production_capacity: None,
        }
    }

    pub fn with_capacity(mut self, capacity: u64) -> Self {
        self.production_capacity = Some(capacity);
        self
    }
}

/// On-hand stock plus everything still coming in, minus what is owed.
pub fn inventory_position(entity: &EntityState) -> i64 {
    entity.on_hand as i64 + entity.on_order as i64 + entity.awaiting as i64
        - entity.backorders as i64
}

/// Outcome of serving demand from an entity's shelf.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FulfillmentResult {
    pub filled: u64,
    /// Backorders outstanding after the call.
    pub new_backorders: u64,
}

/// Serves `demand` plus any outstanding backorders from on-hand stock, oldest
/// first.
pub fn fulfill_demand(entity: &mut EntityState, demand: u64) -> FulfillmentResult {
    let owed = entity.backorders + demand;
    let filled = owed.min(entity.on_hand);
    entity.on_hand -= filled;
    entity.backorders = owed - filled;
    FulfillmentResult {
        filled,
        new_backorders: entity.backorders,
    }
}
