//! Write stock net files for the command line into a directory (default
//! `nets/`): the two-place layered net, a bypassing variant, the swarm
//! under each operator policy and the action-model routine.
//!
//! ```text
//! cargo run --example export_nets -- nets
//! cargo run --bin csnet -- analyze nets/swarm_deny_all.json --check live
//! ```

use std::path::PathBuf;

use csnet::color::{ColorSet, ColorValue};
use csnet::format::netfile::NetFile;
use csnet::net::{ArcExpr, ArcPattern, Net, Transition};
use csnet::scenarios::human::HumanPolicy;
use csnet::scenarios::lam::LamConfig;
use csnet::scenarios::swarm::{self, CouplingMode, SwarmConfig};
use csnet::scenarios::ScenarioConfig;
use csnet::space::{CommSpaceNet, SpaceAssignment, SpaceKind};

fn two_places(consumer: SpaceKind) -> CommSpaceNet {
    let mut net = Net::new();
    net.colorset(ColorSet::unit("U"))
        .place("P1", "U")
        .place("P2", "U")
        .add_transition(
            Transition::new("T1")
                .input("P1", ArcPattern::Lit(ColorValue::Unit))
                .output("P2", ArcExpr::Lit(ColorValue::Unit)),
        )
        .token("P1", ColorValue::Unit);
    let mut spaces = SpaceAssignment::default();
    spaces
        .place("P1", SpaceKind::Surface)
        .place("P2", consumer)
        .transition("T1", consumer);
    CommSpaceNet { net, spaces }
}

fn swarm_doc(policy: HumanPolicy, mode: CouplingMode) -> NetFile {
    let config = SwarmConfig::simple(4, 3, &[("t0", [3, 0]), ("t1", [0, 3]), ("t2", [3, 3])], policy, mode);
    let mut doc = NetFile::from_csnet(&swarm::build_swarm_net(&config).unwrap());
    doc.human_gates = swarm::swarm_gates();
    doc.scenario = Some(ScenarioConfig::Swarm(config));
    doc
}

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "nets".into()));
    std::fs::create_dir_all(&dir)?;

    let lam_config = LamConfig::new(&["a", "b", "c"], &["a", "b", "c", "b"], 6);
    let mut lam = NetFile::from_csnet(&ScenarioConfig::Lam(lam_config.clone()).build().unwrap());
    lam.scenario = Some(ScenarioConfig::Lam(lam_config));

    let files = [
        (
            "two_places.json",
            NetFile::from_csnet(&two_places(SpaceKind::Observation)),
        ),
        ("bypass.json", NetFile::from_csnet(&two_places(SpaceKind::Computation))),
        (
            "swarm_approve_all.json",
            swarm_doc(HumanPolicy::ApproveAll, CouplingMode::Centaurian),
        ),
        (
            "swarm_deny_all.json",
            swarm_doc(HumanPolicy::DenyAll, CouplingMode::Centaurian),
        ),
        (
            "swarm_interactive.json",
            swarm_doc(HumanPolicy::Interactive, CouplingMode::Centaurian),
        ),
        ("swarm_mas.json", swarm_doc(HumanPolicy::ApproveAll, CouplingMode::Mas)),
        ("lam_abcb.json", lam),
    ];
    for (name, doc) in files {
        let path = dir.join(name);
        std::fs::write(&path, doc.to_json())?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
