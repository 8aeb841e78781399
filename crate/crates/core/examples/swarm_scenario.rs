//! Drone swarm task allocation under both coupling modes, with a scripted
//! operator, a mid-run mode switch and an obstacle that forces a replan.
//!
//! Pass a seed as the first argument to vary the interleaving.

use csnet::engine::FiringPolicy;
use csnet::scenarios::human::{Decision, HumanDecider, HumanPolicy};
use csnet::scenarios::swarm::{self, llm_stub_plan, CouplingMode, ModePhase, Obstacle, SwarmConfig, World};
use csnet::scenarios::{run_scenario, ScenarioConfig};

fn report(label: &str, config: SwarmConfig, seed: u64) {
    let sc = ScenarioConfig::Swarm(config.clone());
    let cs = sc.build().expect("valid config");
    let mut decider = HumanDecider::new(config.human_policy.clone());
    let r = run_scenario(&cs, &sc, FiringPolicy::SeededUniformRandom, seed, &mut decider).expect("run completes");
    println!("{label}: {}", r.headline());
    for e in &r.events {
        println!("    {e}");
    }
}

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let tasks = [
        ("ridge", [5, 0]),
        ("creek", [0, 5]),
        ("tower", [5, 5]),
        ("field", [2, 3]),
    ];

    let base = SwarmConfig::simple(6, 3, &tasks, HumanPolicy::ApproveAll, CouplingMode::Mas);
    let world = World {
        grid: base.grid,
        blocked: Default::default(),
        idle_drones: (0..base.drones).map(|d| (d, base.drone_cell(d))).collect(),
        open_tasks: base
            .task_ids()
            .iter()
            .enumerate()
            .map(|(i, id)| {
                let cell = base.tasks.iter().find(|t| t.id == *id).unwrap().cell;
                (i as u32, cell)
            })
            .collect(),
    };
    println!("task order: {:?}", base.task_ids());
    for p in llm_stub_plan(&world) {
        println!("planner: drone {} -> task {} ({} cells)", p.drone, p.task, p.distance);
    }

    report("mas", base.clone(), seed);
    report(
        "centaurian",
        SwarmConfig::simple(6, 3, &tasks, HumanPolicy::ApproveAll, CouplingMode::Centaurian),
        seed,
    );
    report(
        "deny-all",
        SwarmConfig::simple(6, 3, &tasks, HumanPolicy::DenyAll, CouplingMode::Centaurian),
        seed,
    );

    let mut mixed = base.clone();
    mixed.human_policy = HumanPolicy::Script(vec![
        Decision::Approve,
        Decision::Deny,
        Decision::Approve,
        Decision::Approve,
        Decision::Approve,
    ]);
    mixed.mode_schedule = vec![ModePhase {
        from: 3,
        to: usize::MAX,
        mode: CouplingMode::Centaurian,
    }];
    mixed.obstacles = vec![Obstacle { step: 40, cell: [1, 0] }, Obstacle { step: 40, cell: [1, 1] }];
    report("switch + obstacle", mixed, seed);

    let cs = swarm::build_swarm_net(&base).unwrap();
    println!(
        "net: {} places, {} transitions",
        cs.net.places.len(),
        cs.net.transitions.len()
    );
    for (t, space) in swarm::LAYER_TABLE {
        println!("    {t:<16} {}", space.as_str());
    }
}
