use std::collections::BTreeMap;

use proptest::prelude::*;

use bullwhip::demand::DemandProcess;
use bullwhip::export::{read_kpi, read_trace, write_kpi, write_trace};
use bullwhip::harness::{mean_std, PreparedRun, ReplicationStats};
use bullwhip::knowledge::{tokenize, POLICIES_KB, REACTIVE_KB, STRATEGIES_KB};
use bullwhip::panel::{rate_cost, rate_speed};
use bullwhip::policy::{
    baseline_decide, collaborative_vmi_decide, hoarding_vmi_decide, Agent, EmergencyState,
};
use bullwhip::world::positions;
use bullwhip::{
    parse_knowledge_base, retrieve, similarity, step_day, ChainParameters, DayRecord,
    DisruptionKind, DisruptionScenario, DocKind, KnowledgeBase, KnowledgeDocument, KpiReport,
    PerRole, PolicyKind, PolicySource, PolicyVariant, Role, RunConfig, StrategyParameters,
    WorldState,
};

fn policy() -> impl Strategy<Value = PolicyKind> {
    prop::sample::select(PolicyKind::ALL.to_vec())
}

fn scenario() -> impl Strategy<Value = DisruptionKind> {
    prop::sample::select(vec![
        DisruptionKind::None,
        DisruptionKind::SupplierFailure,
        DisruptionKind::TransportDisruption,
        DisruptionKind::DemandSurge,
        DisruptionKind::QualityFailure,
    ])
}

fn per_role(max: u64) -> impl Strategy<Value = PerRole<u64>> {
    (0..=max, 0..=max, 0..=max).prop_map(|(s, m, r)| PerRole {
        supplier: s,
        manufacturer: m,
        retailer: r,
    })
}

prop_compose! {
    fn run_config()(
        policy in policy(),
        kind in scenario(),
        start in 0u32..120,
        horizon in 1u32..200,
        seed in any::<u64>(),
        rate in 0.0f64..30.0,
        capacity in 0u64..60,
        leads in (1u32..7, 1u32..7, 1u32..5),
        targets in per_role(300),
        stock in per_role(300),
        strategy in prop::option::of((0u32..6, 0u32..300)),
    ) -> RunConfig {
        let mut c = RunConfig::new(policy, kind);
        c.scenario.start_day = start;
        c.horizon = horizon;
        c.seed = seed;
        c.demand.base_rate = rate;
        c.chain = ChainParameters {
            supplier_to_manufacturer_lead: leads.0,
            manufacturer_to_retailer_lead: leads.1,
            production_lead: leads.2,
            production_capacity: capacity,
        };
        c.fixed_targets = targets;
        c.initial_stock = Some(stock);
        c.strategy_override = strategy.map(|(lead, premium)| StrategyParameters {
            extra_lead_time: lead,
            transport_cost_premium: premium as f64,
        });
        c
    }
}

fn trace_bytes(trace: &[DayRecord]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_trace(&mut buf, trace).unwrap();
    buf
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn units_are_conserved_every_day(config in run_config()) {
        let prepared = PreparedRun::prepare(&config).unwrap();
        let mut world = prepared.initial_world(config.seed);
        let mut agent = prepared.agent();
        while world.day < config.horizon {
            step_day(&mut world, &mut agent, &prepared.settings);
            prop_assert_eq!(world.conservation_gap(), 0, "day {}", world.day);
        }
        let total: u64 = world.total_fulfilled;
        prop_assert!(total <= world.total_demand);
    }

    #[test]
    fn runs_are_deterministic(config in run_config()) {
        let a = bullwhip::run_simulation(&config).unwrap();
        let b = bullwhip::run_simulation(&config).unwrap();
        prop_assert_eq!(trace_bytes(&a.trace), trace_bytes(&b.trace));
        prop_assert_eq!(a.report, b.report);
    }

    #[test]
    fn baseline_restores_order_up_to_position(
        seed in any::<u64>(),
        rate in 0.0f64..40.0,
        constant in any::<bool>(),
        targets in per_role(300),
        horizon in 1u32..150,
    ) {
        let mut c = RunConfig::new(PolicyKind::StaticBaseline, DisruptionKind::None);
        c.seed = seed;
        c.horizon = horizon;
        c.demand.base_rate = rate;
        if constant {
            c.demand.process = DemandProcess::Constant;
        }
        c.chain.production_capacity = u64::MAX / 4;
        c.fixed_targets = targets;
        c.initial_stock = Some(targets);
        let prepared = PreparedRun::prepare(&c).unwrap();
        let mut world = prepared.initial_world(seed);
        let mut agent = prepared.agent();
        while world.day < horizon {
            step_day(&mut world, &mut agent, &prepared.settings);
            prop_assert_eq!(positions(&world), targets.as_array().map(|t| t as i64), "day {}", world.day);
        }
    }

    #[test]
    fn selfish_without_emergencies_is_baseline(config in run_config()) {
        let mut config = config.with_policy(PolicyKind::StaticBaseline);
        config.policy_source = PolicySource::Fixed;
        let prepared = PreparedRun::prepare(&config).unwrap();
        let reactive = parse_knowledge_base(REACTIVE_KB).unwrap();
        let mut selfish = Agent::new(
            PolicyVariant::new(PolicyKind::SelfishRag, PolicySource::Fixed).unwrap(),
            Some(&reactive),
        );
        selfish.variant.emergency = EmergencyState { cooldown_until: u32::MAX };
        let mut baseline = prepared.agent();
        let mut a = prepared.initial_world(config.seed);
        let mut b = a.clone();
        while a.day < config.horizon {
            let ra = step_day(&mut a, &mut selfish, &prepared.settings);
            let rb = step_day(&mut b, &mut baseline, &prepared.settings);
            prop_assert_eq!(ra, rb);
        }
        prop_assert_eq!(a, b);
    }

    #[test]
    fn vmi_pushes_and_orders_are_bounded(
        stock in per_role(400),
        on_order in per_role(400),
        backorders in per_role(100),
    ) {
        let targets = [200, 150, 100];
        let mut w: WorldState = WorldState::new(&ChainParameters::default(), targets, stock.as_array(), 0);
        for role in Role::ALL {
            w.entity_mut(role).on_order = on_order.get(role);
            w.entity_mut(role).backorders = backorders.get(role);
        }
        let [_, m_pos, r_pos] = positions(&w);
        let system = m_pos + r_pos;
        for d in [hoarding_vmi_decide(&w), collaborative_vmi_decide(&w)] {
            let order = d.order_for(Role::Manufacturer) as i64;
            prop_assert!(order == 0 || system + order == 250);
            prop_assert_eq!(d.order_for(Role::Retailer), 0);
            for &(_, _, q) in &d.push_shipments {
                prop_assert!(q <= w.entity(Role::Manufacturer).on_hand);
            }
        }
        prop_assert!(hoarding_vmi_decide(&w).push_shipments.is_empty());
        prop_assert!(baseline_decide(&w).push_shipments.is_empty());
    }

    #[test]
    fn similarity_is_symmetric_and_bounded(a in "[a-z ]{0,40}", b in "[a-z ]{0,40}") {
        let (ta, tb) = (tokenize(&a), tokenize(&b));
        let ab: f64 = similarity(&ta, &tb);
        let ba: f64 = similarity(&tb, &ta);
        prop_assert_eq!(ab, ba);
        prop_assert!((0.0..=1.0).contains(&ab));
        if !ta.is_empty() {
            let aa: f64 = similarity(&ta, &ta);
            prop_assert!((aa - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ratings_are_monotone(p in 0u32..1000, dp in 0u32..1000, l in 0u32..20, dl in 0u32..20) {
        let lo = StrategyParameters { extra_lead_time: l, transport_cost_premium: p as f64 };
        let hi = StrategyParameters { extra_lead_time: l + dl, transport_cost_premium: (p + dp) as f64 };
        prop_assert!(rate_cost(&lo) <= rate_cost(&hi));
        prop_assert!(rate_speed(&hi) <= rate_speed(&lo));
    }

    #[test]
    fn knowledge_base_round_trips(docs in documents()) {
        let kb = KnowledgeBase::new(docs).unwrap();
        let text = kb.to_string();
        let back = parse_knowledge_base(&text).unwrap();
        prop_assert_eq!(back.documents(), kb.documents());
    }

    #[test]
    fn mean_std_matches_two_pass(samples in prop::collection::vec(-1e6f64..1e6, 1..200)) {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = if samples.len() > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let (m, s) = mean_std(&samples);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1.0);
        prop_assert!(close(m, mean), "{} vs {}", m, mean);
        prop_assert!(close(s, var.sqrt()), "{} vs {}", s, var.sqrt());
    }

    #[test]
    fn stats_ignore_replication_order(
        values in prop::collection::vec((0.0f64..1e5, 0.0f64..100.0), 1..40),
        shuffle_seed in any::<u64>(),
    ) {
        let reports: Vec<KpiReport> = values.iter().map(|&(c, s)| kpi(c, s)).collect();
        let mut permuted = reports.clone();
        shuffle(&mut permuted, shuffle_seed);
        prop_assert_eq!(ReplicationStats::from_reports(&reports), ReplicationStats::from_reports(&permuted));
    }

    #[test]
    fn csv_round_trips_exactly(
        rows in prop::collection::vec((0u32..500, 0usize..3, any::<u32>(), any::<u32>(), any::<f64>(), any::<f64>()), 0..30),
    ) {
        let trace: Vec<DayRecord> = rows
            .iter()
            .filter(|r| r.4.is_finite() && r.5.is_finite())
            .map(|&(day, role, a, b, x, y)| DayRecord {
                day,
                entity: Role::ALL[role],
                on_hand: a as u64,
                backorders: b as u64,
                on_order: (a ^ b) as u64,
                demand: b as u64 / 3,
                fulfilled: a as u64 / 7,
                holding_cost: x,
                backorder_cost: y,
                premium_cost: x * 0.5,
            })
            .collect();
        let bytes = trace_bytes(&trace);
        let back: Vec<DayRecord> = read_trace(bytes.as_slice()).unwrap();
        prop_assert_eq!(&back, &trace);

        let reports: Vec<KpiReport> = trace.iter().map(|r| kpi(r.holding_cost, r.backorder_cost)).collect();
        let mut buf = Vec::new();
        write_kpi(&mut buf, &reports).unwrap();
        let back: Vec<KpiReport> = read_kpi(buf.as_slice()).unwrap();
        prop_assert_eq!(back, reports);
    }
}

fn kpi(cost: f64, service: f64) -> KpiReport {
    KpiReport {
        total_cost: cost,
        holding_cost: cost,
        backorder_cost: 0.0,
        premium_cost: 0.0,
        service_level: service,
        holding_by_role: PerRole::uniform(cost / 3.0),
        total_demand: 10,
        total_fulfilled: 9,
    }
}

fn shuffle<T>(v: &mut [T], seed: u64) {
    let mut state = seed;
    for i in (1..v.len()).rev() {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        v.swap(i, (state >> 33) as usize % (i + 1));
    }
}

fn word() -> impl Strategy<Value = String> {
    "[a-z]{1,8}"
}

fn document(index: usize) -> impl Strategy<Value = KnowledgeDocument> {
    let name = "[A-Z][A-Z_]{0,10}".prop_map(move |n| format!("{n}_{index}"));
    let description = prop::collection::vec(word(), 1..12).prop_map(|w| w.join(" "));
    let params = prop::collection::btree_map("p_[a-z]{1,8}", -1000i64..1000, 0..4);
    (
        any::<bool>(),
        name,
        description,
        prop::option::of(0usize..3),
        params,
        0i64..10,
        0i64..500,
    )
        .prop_map(
            |(is_policy, name, description, entity, mut parameters, lead, premium)| {
                if is_policy {
                    KnowledgeDocument {
                        kind: DocKind::Policy,
                        name,
                        description,
                        entity: entity.map(|i| Role::ALL[i]),
                        parameters,
                    }
                } else {
                    parameters.insert("extra_lead_time".into(), lead);
                    parameters.insert("transport_cost_premium".into(), premium);
                    KnowledgeDocument {
                        kind: DocKind::Strategy,
                        name,
                        description,
                        entity: None,
                        parameters,
                    }
                }
            },
        )
}

fn documents() -> impl Strategy<Value = Vec<KnowledgeDocument>> {
    (0usize..6).prop_flat_map(|n| (0..n).map(document).collect::<Vec<_>>())
}

#[test]
fn shipped_documents_retrieve_themselves() {
    for text in [POLICIES_KB, STRATEGIES_KB, REACTIVE_KB] {
        let kb = parse_knowledge_base(text).unwrap();
        for doc in kb.documents() {
            let query = format!("{} {}", doc.name, doc.description);
            let hit = retrieve(&kb, &query, Some(doc.kind)).unwrap();
            assert_eq!(hit.name, doc.name);
            let unfiltered = retrieve(&kb, &query, None).unwrap();
            assert_eq!(unfiltered.name, doc.name);
        }
    }
}

#[test]
fn shipped_bases_parse_to_expected_shapes() {
    let count = |text| {
        let kb = parse_knowledge_base(text).unwrap();
        let mut by_kind: BTreeMap<&str, usize> = BTreeMap::new();
        for d in kb.documents() {
            *by_kind
                .entry(if d.kind == DocKind::Policy {
                    "policy"
                } else {
                    "strategy"
                })
                .or_default() += 1;
        }
        by_kind
    };
    assert_eq!(count(POLICIES_KB), BTreeMap::from([("policy", 3)]));
    assert_eq!(count(STRATEGIES_KB), BTreeMap::from([("strategy", 3)]));
    assert_eq!(count(REACTIVE_KB), BTreeMap::from([("strategy", 1)]));
}

#[test]
fn disruption_start_past_horizon_is_harmless() {
    let mut c = RunConfig::new(PolicyKind::StaticBaseline, DisruptionKind::QualityFailure);
    c.horizon = 30;
    let with = bullwhip::run_simulation(&c).unwrap();
    c.scenario = DisruptionScenario::none();
    let without = bullwhip::run_simulation(&c).unwrap();
    assert_eq!(with.trace, without.trace);
}
