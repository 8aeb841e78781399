//! The smallest layered net: one token moves from a surface place to an
//! observation place.

use csnet::color::{ColorSet, ColorValue};
use csnet::engine::{enabled_transitions, run, FiringPolicy};
use csnet::net::{ArcExpr, ArcPattern, Net, Transition};
use csnet::space::{flow_classify, validate_layering, CommSpaceNet, SpaceAssignment, SpaceKind};

fn main() {
    let mut net = Net::new();
    net.colorset(ColorSet::unit("U"))
        .place("P1", "U")
        .place("P2", "U")
        .add_transition(
            Transition::new("T")
                .input("P1", ArcPattern::Lit(ColorValue::Unit))
                .output("P2", ArcExpr::Lit(ColorValue::Unit)),
        )
        .token("P1", ColorValue::Unit);

    let mut spaces = SpaceAssignment::default();
    spaces
        .place("P1", SpaceKind::Surface)
        .place("P2", SpaceKind::Observation)
        .transition("T", SpaceKind::Observation);
    let cs = CommSpaceNet::new(net, spaces).expect("labels cover the net");
    assert!(validate_layering(&cs).is_empty());

    println!("initial marking: {}", cs.net.initial.canonical_json());
    for ev in enabled_transitions(&cs.net, &cs.net.initial) {
        println!(
            "enabled: {} ({:?})",
            ev.transition,
            flow_classify(&cs, &ev.transition).unwrap()
        );
    }

    let trace = run(&cs.net, FiringPolicy::LexicographicFirst, 0, 10);
    for s in &trace.steps {
        println!("step {}: {} -> {}", s.index, s.transition, &s.digest[..16]);
    }
    println!(
        "final marking: {} ({})",
        trace.final_marking.canonical_json(),
        trace.terminal.as_str()
    );
}
