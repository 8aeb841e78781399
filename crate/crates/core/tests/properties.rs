mod common;

use common::*;
use csnet::engine::{enabled_transitions, fire, run, step, FiringPolicy};
use csnet::format::netfile::{net_digest, NetFile};
use csnet::marking::Marking;
use csnet::scenarios::human::{HumanDecider, HumanPolicy};
use csnet::scenarios::lam::{self, LamConfig};
use csnet::scenarios::swarm::{self, CouplingMode, SwarmConfig};
use csnet::scenarios::{run_scenario, ScenarioConfig};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn policy() -> impl Strategy<Value = FiringPolicy> {
    prop_oneof![
        Just(FiringPolicy::LexicographicFirst),
        Just(FiringPolicy::SeededUniformRandom)
    ]
}

proptest! {
    #[test]
    fn firing_matches_reference(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let rn = random_net(seed, SMALL);
        let m = random_marking(&rn, 5, &mut rng(seed.wrapping_add(1)));
        let events = enabled_transitions(&rn.net, &m);
        prop_assume!(!events.is_empty());
        let ev = pick.get(&events);
        let next = fire(&rn.net, &m, &ev.transition, &ev.binding).unwrap();
        prop_assert_eq!(key_of(&next), oracle_fire(&rn.net, &key_of(&m), &ev.transition, &ev.binding));
    }

    #[test]
    fn bindings_match_reference(seed in any::<u64>()) {
        let rn = random_net(seed, SMALL);
        let m = random_marking(&rn, 5, &mut rng(!seed));
        for tid in rn.net.transitions.keys() {
            let got = csnet::engine::enabled_bindings(&rn.net, &m, tid).unwrap();
            prop_assert_eq!(got, oracle_bindings(&rn, &key_of(&m), tid));
        }
    }

    #[test]
    fn runs_are_reproducible(seed in any::<u64>(), run_seed in any::<u64>(), p in policy()) {
        let rn = random_net(seed, SMALL);
        let a = run(&rn.net, p, run_seed, 50);
        let b = run(&rn.net, p, run_seed, 50);
        prop_assert_eq!(&a, &b);
        prop_assert!(a.len() <= 50);
    }

    #[test]
    fn digest_ignores_insertion_order(seed in any::<u64>()) {
        let rn = random_net(seed, SMALL);
        let r = &mut rng(seed);
        let mut tokens: Vec<(String, _)> = Vec::new();
        for (p, ms) in rn.net.initial.places() {
            for v in ms.sorted() {
                tokens.push((p.to_string(), v));
            }
        }
        tokens.extend(random_marking(&rn, 5, r).places().flat_map(|(p, ms)| {
            ms.sorted().into_iter().map(move |v| (p.to_string(), v))
        }));
        let build = |ts: &[(String, _)]| {
            let mut m = Marking::new();
            for (p, v) in ts {
                m.add_token(p, csnet::color::ColorValue::clone(v));
            }
            m
        };
        let a = build(&tokens);
        tokens.shuffle(r);
        let b = build(&tokens);
        prop_assert_eq!(a.canonical_json(), b.canonical_json());
        prop_assert_eq!(a.digest(), b.digest());
        prop_assert_eq!(a.digest().len(), 64);
    }

    #[test]
    fn net_files_round_trip(seed in any::<u64>(), bypass in any::<bool>()) {
        let cs = layering_case(seed, bypass);
        let json = NetFile::from_csnet(&cs).to_json();
        let loaded = NetFile::parse(&json).unwrap().to_net().unwrap();
        prop_assert_eq!(NetFile::from_csnet(&loaded.csnet).to_json(), json);
        prop_assert_eq!(net_digest(&loaded.csnet), net_digest(&cs));
        prop_assert_eq!(key_of(&loaded.csnet.net.initial), key_of(&cs.net.initial));
        prop_assert_eq!(enabled_transitions(&loaded.csnet.net, &loaded.csnet.net.initial),
                        enabled_transitions(&cs.net, &cs.net.initial));
        prop_assert_eq!(loaded.violations().is_empty(), !bypass);
    }

    #[test]
    fn group_sequences_keep_invariants(seed in any::<u64>(), len in 0usize..40, on in any::<bool>()) {
        let r = &mut rng(seed);
        let pool = agent_pool(r);
        let ops = group_ops(r, len);
        if let Err(e) = check_group_sequence(&pool, &ops, on) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn compiled_groups_deliver_like_the_agent(n in 0usize..=5, mask in any::<u32>(), order in any::<u64>()) {
        let (g, agents) = configured_group(n, mask);
        let mut msgs: Vec<csnet::group::Outgoing> = (0..n)
            .flat_map(|i| [TOPIC, "weather"].map(|t| csnet::group::Outgoing {
                sender: format!("m{i}"),
                topic: t.into(),
                payload: csnet::color::ColorValue::Unit,
            }))
            .collect();
        msgs.shuffle(&mut rng(order));
        msgs.truncate(8);
        if let Err(e) = fragment_agrees(&g, &agents, &msgs, order) {
            prop_assert!(false, "{}", e);
        }
    }
}

fn demo() -> impl Strategy<Value = LamConfig> {
    (1usize..=3, 1u32..=4).prop_flat_map(|(k, reps)| {
        let alphabet: Vec<String> = ["a", "b", "c"][..k].iter().map(|s| s.to_string()).collect();
        let actions = prop::collection::vec(prop::sample::select(alphabet.clone()), 1..=5);
        actions.prop_map(move |d| LamConfig {
            action_alphabet: alphabet.clone(),
            demonstrations: vec![d],
            repetitions: reps,
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lam_holds_one_model_token(config in demo(), seed in any::<u64>()) {
        let cs = lam::build_lam_net(&config).unwrap();
        let mut m = cs.net.initial.clone();
        let r = &mut csnet::engine::rng_from_seed(seed);
        let mut steps = 0;
        while let Some((_, next)) = step(&cs.net, &m, FiringPolicy::SeededUniformRandom, r) {
            prop_assert_eq!(next.count(lam::MODEL), 1);
            m = next;
            steps += 1;
        }
        prop_assert_eq!(steps, 6 * config.script().len() - 1);
        prop_assert!(lam::model_of(&config, &m).is_some());
    }

    #[test]
    fn lam_net_agrees_with_direct_model(config in demo(), seed in any::<u64>()) {
        let sc = ScenarioConfig::Lam(config.clone());
        let cs = sc.build().unwrap();
        let mut d = HumanDecider::new(HumanPolicy::ApproveAll);
        let report = run_scenario(&cs, &sc, FiringPolicy::SeededUniformRandom, seed, &mut d).unwrap();
        prop_assert_eq!(report.terminal.as_str(), "quiescent");
        prop_assert_eq!(&report.prediction_accuracy, &lam::simulate(&config));
    }

    #[test]
    fn lam_accuracy_never_drops(config in demo()) {
        let acc = lam::simulate(&config);
        prop_assert!(acc.windows(2).all(|w| w[0] <= w[1]), "{:?}", acc);
    }

    // When every context has a single successor the second pass is perfect.
    #[test]
    fn lam_learns_functional_demos_in_one_pass(config in demo()) {
        let d = &config.demonstrations[0];
        let mut next = std::collections::BTreeMap::new();
        let mut ctx = lam::START;
        let mut functional = true;
        for a in d {
            functional &= *next.entry(ctx).or_insert(a.as_str()) == a.as_str();
            ctx = a;
        }
        prop_assume!(functional && config.repetitions > 1);
        prop_assert_eq!(lam::simulate(&config)[1], 1.0);
    }

    #[test]
    fn mas_never_slower_than_centaurian(
        size in 2i64..=4,
        drones in 1u32..=3,
        cells in prop::collection::vec((0i64..4, 0i64..4), 0..=3),
        seed in any::<u64>(),
    ) {
        let tasks: Vec<(String, [i64; 2])> = cells
            .iter()
            .enumerate()
            .map(|(i, (x, y))| (format!("t{i}"), [x % size, y % size]))
            .collect();
        let tasks: Vec<(&str, [i64; 2])> = tasks.iter().map(|(id, c)| (id.as_str(), *c)).collect();
        let steps = |mode| {
            let c = SwarmConfig::simple(size, drones, &tasks, HumanPolicy::ApproveAll, mode);
            let cs = swarm::build_swarm_net(&c).unwrap();
            let mut d = HumanDecider::new(HumanPolicy::ApproveAll);
            swarm::run_swarm(&cs, &c, FiringPolicy::SeededUniformRandom, seed, &mut d).unwrap()
        };
        let mas = steps(CouplingMode::Mas);
        let cen = steps(CouplingMode::Centaurian);
        prop_assert!(mas.steps <= cen.steps, "mas {} centaurian {}", mas.steps, cen.steps);
        prop_assert_eq!(mas.tasks_assigned, cen.tasks_assigned);
        prop_assert_eq!(cen.approvals_requested, cen.approvals_granted);
    }
}
