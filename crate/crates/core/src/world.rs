//! Daily state machine of the three-echelon chain.
//!
//! One day runs these sub-steps in order:
//!
//! 1. receive shipments (and finished production) due today
//! 2. apply the day's disruption modifiers, including a quality wipe
//! 3. draw customer demand at the Retailer and serve it
//! 4. ship outstanding backorders to downstream entities
//! 5. ask the policy for orders and pushes
//! 6. dispatch pushes, then orders
//! 7. start Supplier production up to capacity
//! 8. accrue holding and backorder costs on closing stock

use serde::{Deserialize, Serialize};

use crate::demand::{sample_demand, seeded_rng, DemandModel, SimRng};
use crate::disruption::{disruption_modifiers, wiped_units, DisruptionScenario, Modifiers};
use crate::entity::{fulfill_demand, inventory_position, EntityState, Role};
use crate::knowledge::StrategyParameters;
use crate::policy::Agent;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainParameters {
    pub supplier_to_manufacturer_lead: u32,
    pub manufacturer_to_retailer_lead: u32,
    pub production_lead: u32,
    pub production_capacity: u64,
}

impl Default for ChainParameters {
    fn default() -> Self {
        ChainParameters {
            supplier_to_manufacturer_lead: 4,
            manufacturer_to_retailer_lead: 2,
            production_lead: 2,
            production_capacity: 20,
        }
    }
}

impl ChainParameters {
    fn transit_lead(&self, origin: Role, destination: Role) -> u32 {
        match (origin, destination) {
            (Role::Supplier, Role::Supplier) => self.production_lead,
            (_, Role::Manufacturer) => self.supplier_to_manufacturer_lead,
            (_, Role::Retailer) => self.manufacturer_to_retailer_lead,
            (_, Role::Supplier) => self.production_lead,
        }
    }
}

/// Per-role values such as holding rates, indexed Supplier, Manufacturer,
/// Retailer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerRole<V> {
    pub supplier: V,
    pub manufacturer: V,
    pub retailer: V,
}

impl<V: Copy> PerRole<V> {
    pub fn uniform(v: V) -> Self {
        PerRole {
            supplier: v,
            manufacturer: v,
            retailer: v,
        }
    }

    pub fn get(&self, role: Role) -> V {
        match role {
            Role::Supplier => self.supplier,
            Role::Manufacturer => self.manufacturer,
            Role::Retailer => self.retailer,
        }
    }

    pub fn as_array(&self) -> [V; 3] {
        [self.supplier, self.manufacturer, self.retailer]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostParameters<T> {
    pub holding_rate: PerRole<T>,
    /// Charged per unit of customer backorder still open at day end.
    pub backorder_penalty: T,
    /// Charged once per Manufacturer-inbound shipment dispatched while a
    /// premium window is open.
    pub premium_per_shipment: T,
}

impl<T: Scalar> Default for CostParameters<T> {
    fn default() -> Self {
        CostParameters {
            holding_rate: PerRole::uniform(T::one()),
            backorder_penalty: T::lit(10.0),
            premium_per_shipment: T::zero(),
        }
    }
}

impl<T: Scalar> CostParameters<T> {
    pub fn zero() -> Self {
        CostParameters {
            holding_rate: PerRole::uniform(T::zero()),
            backorder_penalty: T::zero(),
            premium_per_shipment: T::zero(),
        }
    }

    pub fn is_valid(&self) -> bool {
        let ok = |v: T| v >= T::zero() && v.is_finite();
        self.holding_rate.as_array().into_iter().all(ok)
            && ok(self.backorder_penalty)
            && ok(self.premium_per_shipment)
    }
}

/// A batch of units moving between entities. Supplier-to-Supplier shipments
/// are production batches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shipment<T> {
    pub origin: Role,
    pub destination: Role,
    pub quantity: u64,
    pub dispatch_day: u32,
    pub arrival_day: u32,
    pub premium_applied: T,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Ledger<T> {
    pub holding: T,
    pub backorder: T,
    pub premium: T,
    pub holding_by_role: [T; 3],
}

impl<T: Scalar> Ledger<T> {
    pub fn total(&self) -> T {
        self.holding + self.backorder + self.premium
    }
}

/// Everything a single run needs besides the world and the policy.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSettings<T> {
    pub horizon: u32,
    pub chain: ChainParameters,
    pub costs: CostParameters<T>,
    pub demand: DemandModel,
    pub scenario: DisruptionScenario,
    /// Mitigation applied during the scenario window: replaces the transport
    /// delay and charges its premium on Manufacturer-inbound shipments.
    pub strategy: Option<StrategyParameters<T>>,
    /// Last day (exclusive) of the premium window; defaults to the scenario
    /// window end.
    pub premium_window_end: Option<u32>,
}

impl<T: Scalar> SimSettings<T> {
    pub fn new(horizon: u32, scenario: DisruptionScenario) -> Self {
        SimSettings {
            horizon,
            chain: ChainParameters::default(),
            costs: CostParameters::default(),
            demand: DemandModel::default(),
            scenario,
            strategy: None,
            premium_window_end: None,
        }
    }

    /// Activates a mitigation strategy; its premium becomes the per-shipment
    /// charge.
    pub fn with_strategy(mut self, strategy: StrategyParameters<T>) -> Self {
        self.costs.premium_per_shipment = strategy.transport_cost_premium;
        self.strategy = Some(strategy);
        self
    }

    /// Premium charged per Manufacturer-inbound shipment dispatched on `day`.
    pub fn premium_on(&self, day: u32) -> Option<T> {
        self.strategy.as_ref()?;
        let (start, end) = self.scenario.window();
        let end = self.premium_window_end.unwrap_or(end);
        (start..end)
            .contains(&day)
            .then_some(self.costs.premium_per_shipment)
    }
}

/// Full state of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldState<T> {
    pub day: u32,
    pub entities: [EntityState; 3],
    pub in_transit: Vec<Shipment<T>>,
    pub ledger: Ledger<T>,
    pub total_demand: u64,
    pub total_fulfilled: u64,
    pub rng: SimRng,
    pub active_modifiers: Modifiers,
    /// Units present at day 0 plus every unit the Supplier started producing.
    pub created: u64,
    pub wiped: u64,
    /// Cumulative receipts per role (production counts for the Supplier).
    pub received: [u64; 3],
    /// Orders placed per role over the run.
    pub orders_placed: [u64; 3],
    pub lead: ChainParameters,
}

impl<T: Scalar> WorldState<T> {
    /// Fresh world with empty pipelines. `targets` and `initial_stock` are
    /// indexed Supplier, Manufacturer, Retailer.
    pub fn new(
        chain: &ChainParameters,
        targets: [u64; 3],
        initial_stock: [u64; 3],
        seed: u64,
    ) -> Self {
        let entities = Role::ALL.map(|role| {
            let e = EntityState::new(role, initial_stock[role.index()], targets[role.index()]);
            if role == Role::Supplier {
                e.with_capacity(chain.production_capacity)
            } else {
                e
            }
        });
        WorldState {
            day: 0,
            entities,
            in_transit: Vec::new(),
            ledger: Ledger::default(),
            total_demand: 0,
            total_fulfilled: 0,
            rng: seeded_rng(seed),
            active_modifiers: Modifiers::NONE,
            created: initial_stock.iter().sum(),
            wiped: 0,
            received: [0; 3],
            orders_placed: [0; 3],
            lead: chain.clone(),
        }
    }

    pub fn entity(&self, role: Role) -> &EntityState {
        &self.entities[role.index()]
    }

    pub fn entity_mut(&mut self, role: Role) -> &mut EntityState {
        &mut self.entities[role.index()]
    }

    pub fn in_transit_to(&self, role: Role) -> u64 {
        self.in_transit
            .iter()
            .filter(|s| s.destination == role)
            .map(|s| s.quantity)
            .sum()
    }

    /// `created - wiped - (stock + pipeline + delivered to customers)`; zero
    /// when no unit has appeared or vanished outside production and wipes.
    pub fn conservation_gap(&self) -> i128 {
        let on_hand: u64 = self.entities.iter().map(|e| e.on_hand).sum();
        let pipeline: u64 = self.in_transit.iter().map(|s| s.quantity).sum();
        self.created as i128 - (on_hand + pipeline + self.total_fulfilled + self.wiped) as i128
    }

    pub fn service_level(&self) -> T {
        service_level(self.total_fulfilled, self.total_demand)
    }
}

pub fn service_level<T: Scalar>(fulfilled: u64, demand: u64) -> T {
    if demand == 0 {
        T::zero()
    } else {
        T::lit(100.0) * T::from_units(fulfilled) / T::from_units(demand)
    }
}

/// Ships up to `quantity` from `origin` to `destination`, capped by the
/// origin's stock. Returns `None` when nothing could be shipped.
pub fn dispatch<T: Scalar>(
    world: &mut WorldState<T>,
    settings: &SimSettings<T>,
    origin: Role,
    destination: Role,
    quantity: u64,
) -> Option<Shipment<T>> {
    let qty = quantity.min(world.entity(origin).on_hand);
    if qty == 0 {
        return None;
    }
    world.entity_mut(origin).on_hand -= qty;
    let mut lead = world.lead.transit_lead(origin, destination);
    let mut premium = T::zero();
    if destination == Role::Manufacturer {
        lead += world.active_modifiers.extra_inbound_lead;
        if let Some(p) = settings.premium_on(world.day) {
            premium = p;
            world.ledger.premium = world.ledger.premium + p;
        }
    }
    let shipment = Shipment {
        origin,
        destination,
        quantity: qty,
        dispatch_day: world.day,
        arrival_day: world.day + lead.max(1),
        premium_applied: premium,
    };
    world.entity_mut(destination).on_order += qty;
    world.in_transit.push(shipment.clone());
    Some(shipment)
}

/// One row of the per-entity daily trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayRecord<T> {
    pub day: u32,
    pub entity: Role,
    pub on_hand: u64,
    pub backorders: u64,
    pub on_order: u64,
    /// Customer demand for the Retailer, orders received for the others.
    pub demand: u64,
    /// Units delivered to the customer or shipped downstream.
    pub fulfilled: u64,
    pub holding_cost: T,
    pub backorder_cost: T,
    pub premium_cost: T,
}

/// Moves as much of `upstream`'s backlog as its stock allows towards
/// `downstream`.
fn serve_backlog<T: Scalar>(
    world: &mut WorldState<T>,
    settings: &SimSettings<T>,
    upstream: Role,
    downstream: Role,
) -> u64 {
    let owed = world.entity(upstream).backorders;
    let Some(s) = dispatch(world, settings, upstream, downstream, owed) else {
        return 0;
    };
    world.entity_mut(upstream).backorders -= s.quantity;
    world.entity_mut(downstream).awaiting -= s.quantity;
    s.quantity
}

/// Advances the world by one day and returns that day's trace rows.
pub fn step_day<T: Scalar>(
    world: &mut WorldState<T>,
    agent: &mut Agent<'_>,
    settings: &SimSettings<T>,
) -> [DayRecord<T>; 3] {
    debug_assert!(world.day < settings.horizon);
    let day = world.day;
    let mut demand = [0u64; 3];
    let mut fulfilled = [0u64; 3];
    let premium_before = world.ledger.premium;

    // 1. receive
    let (arrived, pending): (Vec<_>, Vec<_>) = std::mem::take(&mut world.in_transit)
        .into_iter()
        .partition(|s| s.arrival_day <= day);
    world.in_transit = pending;
    for s in arrived {
        debug_assert_eq!(s.arrival_day, day);
        let dest = world.entity_mut(s.destination);
        dest.on_hand += s.quantity;
        dest.on_order -= s.quantity;
        world.received[s.destination.index()] += s.quantity;
    }

    // 2. disruption
    let strategy_lead = settings.strategy.as_ref().map(|s| s.extra_lead_time);
    world.active_modifiers = disruption_modifiers(&settings.scenario, day, strategy_lead);
    if let Some(fraction) = world.active_modifiers.wipe_fraction {
        let m = world.entity_mut(Role::Manufacturer);
        let lost = wiped_units(m.on_hand, fraction);
        m.on_hand -= lost;
        world.wiped += lost;
    }

    // 3. customer demand
    let d = sample_demand(&mut world.rng, day, &settings.demand);
    world.total_demand += d;
    let served = fulfill_demand(world.entity_mut(Role::Retailer), d);
    world.total_fulfilled += served.filled;
    demand[Role::Retailer.index()] = d;
    fulfilled[Role::Retailer.index()] = served.filled;

    // 4. internal backlog
    for (up, down) in [
        (Role::Manufacturer, Role::Retailer),
        (Role::Supplier, Role::Manufacturer),
    ] {
        fulfilled[up.index()] += serve_backlog(world, settings, up, down);
    }

    // 5. decide
    let decisions = agent.decide(world);

    // 6. dispatch
    for &(origin, destination, qty) in &decisions.push_shipments {
        if let Some(s) = dispatch(world, settings, origin, destination, qty) {
            fulfilled[origin.index()] += s.quantity;
        }
    }
    let mut production_request = 0;
    for &(role, qty) in &decisions.replenishment_orders {
        world.orders_placed[role.index()] += qty;
        match role.upstream() {
            Some(up) => {
                world.entity_mut(up).backorders += qty;
                world.entity_mut(role).awaiting += qty;
                demand[up.index()] += qty;
                fulfilled[up.index()] += serve_backlog(world, settings, up, role);
            }
            None => production_request += qty,
        }
    }

    // 7. production
    let capacity = world
        .entity(Role::Supplier)
        .production_capacity
        .unwrap_or(u64::MAX);
    let batch = production_request.min(capacity);
    if batch > 0 {
        let base = world.lead.production_lead as f64;
        let lead = (base * world.active_modifiers.production_lead_multiplier).ceil() as u32;
        world.in_transit.push(Shipment {
            origin: Role::Supplier,
            destination: Role::Supplier,
            quantity: batch,
            dispatch_day: day,
            arrival_day: day + lead.max(1),
            premium_applied: T::zero(),
        });
        world.entity_mut(Role::Supplier).on_order += batch;
        world.created += batch;
    }

    // 8. costs
    let records = Role::ALL.map(|role| {
        let e = world.entity(role);
        let holding = settings.costs.holding_rate.get(role) * T::from_units(e.on_hand);
        let backorder = if role == Role::Retailer {
            settings.costs.backorder_penalty * T::from_units(e.backorders)
        } else {
            T::zero()
        };
        let premium = if role == Role::Manufacturer {
            world.ledger.premium - premium_before
        } else {
            T::zero()
        };
        DayRecord {
            day,
            entity: role,
            on_hand: e.on_hand,
            backorders: e.backorders,
            on_order: e.on_order,
            demand: demand[role.index()],
            fulfilled: fulfilled[role.index()],
            holding_cost: holding,
            backorder_cost: backorder,
            premium_cost: premium,
        }
    });
    for r in &records {
        let i = r.entity.index();
        world.ledger.holding_by_role[i] = world.ledger.holding_by_role[i] + r.holding_cost;
        world.ledger.holding = world.ledger.holding + r.holding_cost;
        world.ledger.backorder = world.ledger.backorder + r.backorder_cost;
    }

    world.day += 1;
    records
}

/// Cost and service summary of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiReport<T> {
    pub total_cost: T,
    pub holding_cost: T,
    pub backorder_cost: T,
    pub premium_cost: T,
    pub service_level: T,
    pub holding_by_role: PerRole<T>,
    pub total_demand: u64,
    pub total_fulfilled: u64,
}

impl<T: Scalar> KpiReport<T> {
    pub fn from_world(world: &WorldState<T>) -> Self {
        let l = &world.ledger;
        KpiReport {
            total_cost: l.total(),
            holding_cost: l.holding,
            backorder_cost: l.backorder,
            premium_cost: l.premium,
            service_level: world.service_level(),
            holding_by_role: PerRole {
                supplier: l.holding_by_role[0],
                manufacturer: l.holding_by_role[1],
                retailer: l.holding_by_role[2],
            },
            total_demand: world.total_demand,
            total_fulfilled: world.total_fulfilled,
        }
    }
}

/// Positions after the day's orders, indexed Supplier, Manufacturer, Retailer.
pub fn positions<T: Scalar>(world: &WorldState<T>) -> [i64; 3] {
    world.entities.each_ref().map(inventory_position)
}
