//! Layering rules: which arcs may cross between spaces, what a bypass
//! looks like, and how a net projects onto a single space.

use csnet::color::{ColorSet, ColorValue};
use csnet::format::netfile::space_census;
use csnet::net::{ArcExpr, ArcPattern, Net, Transition};
use csnet::space::{flow_classify, space_projection, validate_layering, CommSpaceNet, SpaceAssignment, SpaceKind};

fn pipeline() -> Net {
    let mut net = Net::new();
    let u = || ArcPattern::Lit(ColorValue::Unit);
    let o = || ArcExpr::Lit(ColorValue::Unit);
    net.colorset(ColorSet::unit("U"));
    for p in ["click", "event", "result", "shortcut"] {
        net.place(p, "U");
    }
    net.add_transition(Transition::new("sense").input("click", u()).output("event", o()))
        .add_transition(Transition::new("compute").input("event", u()).output("result", o()))
        .add_transition(Transition::new("shortcut").input("click", u()).output("shortcut", o()))
        .add_transition(Transition::new("log").input("event", u()).output("shortcut", o()))
        .token("click", ColorValue::Unit);
    net
}

fn main() {
    use SpaceKind::*;
    let mut spaces = SpaceAssignment::default();
    spaces
        .place("click", Surface)
        .place("event", Observation)
        .place("result", Computation)
        .place("shortcut", Observation)
        .transition("sense", Observation)
        .transition("compute", Computation)
        .transition("shortcut", Observation)
        .transition("log", Observation);
    let ok = CommSpaceNet::new(pipeline(), spaces.clone()).unwrap();
    println!("layered pipeline violations: {}", validate_layering(&ok).len());
    for t in ok.net.transitions.keys() {
        println!("  {t}: {:?}", flow_classify(&ok, t).unwrap());
    }
    for (space, (places, transitions)) in space_census(&ok) {
        println!("  {}: {places} places, {transitions} transitions", space.as_str());
    }
    let obs = space_projection(&ok, Observation);
    println!(
        "observation projection keeps {:?}",
        obs.transitions.keys().collect::<Vec<_>>()
    );

    // Reading the surface straight from computation skips observation.
    spaces
        .place("shortcut", Computation)
        .transition("shortcut", Computation);
    match CommSpaceNet::new(pipeline(), spaces.clone()) {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
    let bad = CommSpaceNet {
        net: pipeline(),
        spaces,
    };
    for v in validate_layering(&bad) {
        println!("{v}");
    }
}
