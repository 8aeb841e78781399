//! State-space exploration of a bounded producer/consumer and the checks
//! the command line exposes: boundedness, dead transitions, terminal
//! markings and an edge gate, with a replayed counterexample.

use csnet::analysis::{
    check_boundedness, dead_transitions, explore, find_deadlocks, to_dot, verify_edge_property, Limits, Outcome,
};
use csnet::color::{ColorSet, ColorValue};
use csnet::net::{ArcExpr, ArcPattern, Net, Transition};

fn producer_consumer(capacity: u32) -> Net {
    let mut net = Net::new();
    net.colorset(ColorSet::unit("U"));
    for p in ["p_ready", "p_done", "free", "buffer", "c_ready", "c_got"] {
        net.place(p, "U");
    }
    let u = || ArcPattern::Lit(ColorValue::Unit);
    let o = || ArcExpr::Lit(ColorValue::Unit);
    net.add_transition(Transition::new("produce").input("p_ready", u()).output("p_done", o()))
        .add_transition(
            Transition::new("deliver")
                .input("p_done", u())
                .input("free", u())
                .output("p_ready", o())
                .output("buffer", o()),
        )
        .add_transition(
            Transition::new("take")
                .input("c_ready", u())
                .input("buffer", u())
                .output("c_got", o())
                .output("free", o()),
        )
        .add_transition(Transition::new("consume").input("c_got", u()).output("c_ready", o()))
        .add_transition(
            Transition::new("overflow")
                .input("buffer", u())
                .input("free", u())
                .input("buffer", u())
                .output("buffer", o()),
        );
    net.token("p_ready", ColorValue::Unit)
        .tokens("free", ColorValue::Unit, capacity)
        .token("c_ready", ColorValue::Unit);
    net
}

fn main() {
    let net = producer_consumer(2);
    let g = explore(&net, Limits::default());
    println!(
        "nodes {} edges {} truncated {}",
        g.node_count(),
        g.edges.len(),
        g.truncated
    );

    for k in [1, 2] {
        let v = check_boundedness(&g, k);
        match &v.outcome {
            Outcome::Fails(c) => {
                let path: Vec<&str> = c.path.iter().map(|e| e.transition.as_str()).collect();
                let path = if path.is_empty() {
                    "(initial marking)".to_string()
                } else {
                    path.join(" ")
                };
                println!("{}: fails via {path} (replays: {})", v.property, c.replays(&net));
            }
            other => println!("{}: {other:?}", v.property),
        }
    }
    println!("dead transitions: {:?}", dead_transitions(&g, &net).unwrap());
    println!("terminal markings: {}", find_deadlocks(&g).len());
    let gate = verify_edge_property(&g, "take", |m| m.count("buffer") > 0).unwrap();
    println!("{}: holds {}", gate.property, gate.holds());

    let small = explore(
        &producer_consumer(6),
        Limits {
            max_nodes: 10,
            ..Limits::default()
        },
    );
    println!(
        "capacity 6 with a 10 node limit: truncated {}, {}: {:?}",
        small.truncated,
        check_boundedness(&small, 6).property,
        check_boundedness(&small, 6).outcome
    );

    let dot = to_dot(&g, &net);
    println!("{}", dot.lines().take(4).collect::<Vec<_>>().join("\n"));
    println!("... {} lines of DOT", dot.lines().count());
}
