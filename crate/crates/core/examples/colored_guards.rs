//! Typed tokens, tuple patterns and guards. A dispatcher pairs jobs with
//! workers whose level is at least the job's priority.

use csnet::color::{ColorSet, ColorValue};
use csnet::engine::{enabled_bindings, run, FiringPolicy};
use csnet::format::sexpr::{guard_to_sexpr, parse_guard};
use csnet::net::{validate_net, ArcExpr, ArcPattern, Net, Transition};

fn main() {
    let mut net = Net::new();
    net.colorset(ColorSet::int_range("Level", 0, 3))
        .colorset(ColorSet::enumeration("Kind", ["scan", "lift", "relay"]))
        .colorset(ColorSet::product("Job", ["Kind", "Level"]))
        .colorset(ColorSet::product("Done", ["Kind", "Level"]))
        .place("jobs", "Job")
        .place("workers", "Level")
        .place("done", "Done");

    let guard = parse_guard("(and (>= w p) (!= k 'relay))").expect("well formed");
    net.add_transition(
        Transition::new("dispatch")
            .input(
                "jobs",
                ArcPattern::Tuple(vec![ArcPattern::var("k"), ArcPattern::var("p")]),
            )
            .input("workers", ArcPattern::var("w"))
            .output("done", ArcExpr::Tuple(vec![ArcExpr::var("k"), ArcExpr::var("w")]))
            .output("workers", ArcExpr::var("w"))
            .guard(guard),
    );
    net.resolve_symbols();

    for (kind, prio) in [("scan", 1), ("lift", 3), ("relay", 0), ("scan", 2)] {
        let job = ColorValue::tuple([net.sym("Kind", kind), ColorValue::int(prio)]);
        net.token("jobs", job);
    }
    net.token("workers", ColorValue::int(2))
        .token("workers", ColorValue::int(3));

    let problems = validate_net(&net);
    assert!(problems.is_empty(), "{problems:?}");
    println!("guard: {}", guard_to_sexpr(&net.transitions["dispatch"].guard));

    for b in enabled_bindings(&net, &net.initial, "dispatch").unwrap() {
        let shown: Vec<String> = b.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!("binding: {}", shown.join(" "));
    }

    let trace = run(&net, FiringPolicy::SeededUniformRandom, 7, 100);
    println!("{} firings, {}", trace.len(), trace.terminal.as_str());
    for v in trace.final_marking.get("done").map(|m| m.sorted()).unwrap_or_default() {
        println!("done {v}");
    }
    // The relay job never matches the guard.
    println!("left over jobs: {}", trace.final_marking.count("jobs"));
}
