mod common;

use std::sync::Arc;

use proptest::prelude::*;

use common::*;
use sociable::config::Preset;
use sociable::geo::Point;
use sociable::protocol::{select_relay, EventContext, EventId, MonitoringPacket, ProtocolParams};
use sociable::social::{weight_schedule, Beacon, CentralityScores, SocialProfile, StrWeights};
use sociable::{Protocol, Scenario, ScenarioConfig, SimTime, Simulator, VehicleId, VehicleState};

fn scores() -> impl Strategy<Value = CentralityScores> {
    (0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(b, c, d, e)| CentralityScores {
        betweenness: b,
        closeness: c,
        degree: d,
        eigenvector: e,
    })
}

fn packet(origin: VehicleId, sender: VehicleId, hop: u32, ttl_initial: u32) -> MonitoringPacket {
    MonitoringPacket {
        event_id: EventId(0),
        origin,
        sequence: 0,
        ttl: ttl_initial - hop,
        ttl_initial,
        hop_index: hop,
        next_relay: None,
        sender,
        community: Arc::new(SocialProfile::single("A", "am")),
        context: EventContext {
            detect_time: SimTime::ZERO,
            location: Point::default(),
            speed: 0.0,
            direction: 0.0,
        },
        created_at: SimTime::ZERO,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn hop_bound_and_single_broadcast(s in scene()) {
        let sc = build(&s);
        let r = Simulator::new(&sc).record_actions(true).run().unwrap();
        let log = r.log.as_ref().unwrap();
        let checked = check_hops_and_duplicates(log, s.ttl);
        prop_assert!(checked.is_ok(), "{:?}", checked);
        prop_assert!(r.deliveries.iter().all(|d| d.hops <= s.ttl));
        prop_assert!(r.deliveries.iter().all(|d| d.deliver_time >= d.detect_time));
        prop_assert_eq!(r.totals.copies, r.totals.arrivals + r.totals.lost);
    }

    #[test]
    fn flooding_collaborators_cover_sociable(s in scene()) {
        let sc = build(&s);
        let soc = Simulator::new(&sc).protocol(Protocol::Sociable).run().unwrap();
        let flood = Simulator::new(&sc).protocol(Protocol::Flooding).run().unwrap();
        prop_assert!(soc.collaborators.is_subset(&flood.collaborators));
        prop_assert!(soc.totals.epo <= flood.totals.epo);
        prop_assert_eq!(soc.ngm_series(), flood.ngm_series());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn str_is_monotone_in_every_centrality(
        a in scores(),
        bump in (0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64),
        hop in 0u32..10,
        extra in 0u32..10,
    ) {
        let w = weight_schedule(hop, hop + extra, 0.1, 0.9).unwrap();
        let b = CentralityScores {
            betweenness: (a.betweenness + bump.0).min(1.0),
            closeness: (a.closeness + bump.1).min(1.0),
            degree: (a.degree + bump.2).min(1.0),
            eigenvector: (a.eigenvector + bump.3).min(1.0),
        };
        prop_assert!(w.score(&b) >= w.score(&a) - 1e-15);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&w.score(&b)));
    }

    #[test]
    fn weight_schedule_sums_to_one(
        ttl in 1u32..100,
        hop_frac in 0.0..=1.0f64,
        lo in 0.0..=1.0f64,
        hi in 0.0..=1.0f64,
    ) {
        let (lo, hi) = (lo.min(hi), lo.max(hi));
        let hop = ((ttl as f64) * hop_frac).floor() as u32;
        let w = weight_schedule(hop, ttl, lo, hi).unwrap();
        prop_assert!((w.sum() - 1.0).abs() <= 1e-12);
        prop_assert!(w.w_ec() >= lo - 1e-15 && w.w_ec() <= hi + 1e-15);
        prop_assert_eq!(weight_schedule(0, ttl, lo, hi).unwrap().w_ec(), lo);
        prop_assert_eq!(weight_schedule(ttl, ttl, lo, hi).unwrap().w_ec(), hi);
    }

    #[test]
    fn fixed_gateway_weight_is_constant(w in 0.0..=1.0f64, ttl in 1u32..20) {
        for hop in 0..=ttl {
            let s = weight_schedule(hop, ttl, w, w).unwrap();
            prop_assert_eq!(s, StrWeights::with_gateway_weight(w).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// The relay choice depends on who is around, not on the order their
    /// beacons arrived in.
    #[test]
    fn relay_choice_ignores_beacon_order(
        g in (3usize..9).prop_flat_map(|n| (Just(n), any::<u64>())),
        perm_seed in any::<u64>(),
        hop in 0u32..3,
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let (n, seed) = g;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let graph = random_connected(&mut rng, n);
        let snapshot = graph.snapshot();
        let profile = Arc::new(SocialProfile::single("A", "am"));
        let center = VehicleId(0);
        let mut order: Vec<VehicleId> = snapshot.neighbors(center).unwrap().collect();
        let pick = |order: &[VehicleId]| {
            let mut v = VehicleState::new(center, profile.clone());
            for &u in order {
                let beacon = Beacon { sender: u, position: Point::default(), neighbor_count: 0, profile: profile.clone() };
                v.handle_beacon(&beacon, SimTime::ZERO);
            }
            select_relay(&v, &packet(center, center, hop, 3), &snapshot, &ProtocolParams::default())
        };
        let first = pick(&order);
        order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(perm_seed));
        prop_assert_eq!(first, pick(&order));
        // the winner scores at least as high as every other candidate
        if let Some(best) = first {
            let table = sociable::social::CentralityTable::compute(&snapshot);
            let w = weight_schedule(hop, 3, 0.1, 0.9).unwrap();
            let top = w.score(table.get(best).unwrap());
            for u in order.iter().filter(|&&u| u != center) {
                let s = w.score(table.get(*u).unwrap());
                prop_assert!(s < top || (s == top && best <= *u));
            }
        }
    }
}

fn valid_config() -> impl Strategy<Value = ScenarioConfig> {
    (
        any::<u64>(),
        any::<bool>(),
        prop_oneof![Just(Preset::Ld), Just(Preset::Hd)],
        (10.0..1000.0f64, 0.01..1.0f64, 0usize..2000),
        (0.0..=1.0f64, 1u32..10, 0.0..=1.0f64, 0.0..=1.0f64),
        (1.0..500.0f64, prop::collection::vec((-1e4..1e4f64, -1e4..1e4f64), 1..4)),
        (0.1..5.0f64, 0.1..10.0f64, 1usize..5, 1e-4..0.1f64),
    )
        .prop_map(|(seed, flood, preset, (duration, tick, count), (rate, ttl, a, b), (range, bs), (beacon, mon, hops, lat))| {
            ScenarioConfig {
                seed,
                protocol: if flood { Protocol::Flooding } else { Protocol::Sociable },
                duration,
                mobility_tick: tick,
                vehicle_count: count,
                relationship_rate: rate,
                ttl_initial: ttl,
                w_ec_min: a.min(b),
                w_ec_max: a.max(b),
                transmission_range: range,
                bs_positions: bs.into_iter().map(|(x, y)| Point::new(x, y)).collect(),
                beacon_period: beacon,
                monitor_rate: mon,
                snapshot_hops: hops,
                hop_latency: lat,
                ..ScenarioConfig::preset(preset)
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn config_round_trips_through_toml(c in valid_config()) {
        prop_assert!(c.validate().is_ok());
        let text = c.to_toml_string();
        prop_assert_eq!(ScenarioConfig::from_toml_str(&text).unwrap(), c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn runs_are_reproducible(seed in any::<u64>(), count in 0usize..40, flood in any::<bool>()) {
        let c = ScenarioConfig {
            seed,
            vehicle_count: count,
            duration: 60.0,
            event_start: 5.0,
            event_duration: 50.0,
            protocol: if flood { Protocol::Flooding } else { Protocol::Sociable },
            ..ScenarioConfig::default()
        };
        let a = Simulator::new(&Scenario::from_config(&c).unwrap()).run().unwrap();
        let b = Simulator::new(&Scenario::from_config(&c).unwrap()).run().unwrap();
        prop_assert_eq!(a.to_csv_string(), b.to_csv_string());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn empty_road_reports_nothing(seed in any::<u64>(), flood in any::<bool>()) {
        let c = ScenarioConfig {
            seed,
            vehicle_count: 0,
            protocol: if flood { Protocol::Flooding } else { Protocol::Sociable },
            ..ScenarioConfig::default()
        };
        let r = Simulator::new(&Scenario::from_config(&c).unwrap()).run().unwrap();
        prop_assert_eq!(r.totals.epo + r.totals.ngm + r.totals.ndm, 0);
        prop_assert_eq!(r.totals.ncv, 0);
        prop_assert!(r.totals.add_ms.is_none());
        prop_assert!(r.is_empty());
    }
}
