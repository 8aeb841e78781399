//! A topic group with active and dormant members, delivered directly and
//! through its compiled net fragment.

use csnet::color::ColorValue;
use csnet::engine::{run_with, FiringPolicy, PolicyOnly};
use csnet::group::{
    compile_group_to_net, fragment_buffers, post_token, AgentRef, Agents, FragmentOptions, GroupAgent, Outgoing,
    Status, PUBLISH,
};
use csnet::space::validate_layering;

fn post(sender: &str, topic: &str) -> Outgoing {
    Outgoing {
        sender: sender.into(),
        topic: topic.into(),
        payload: ColorValue::Unit,
    }
}

fn main() {
    let mut agents: Agents = [
        AgentRef::new("scout", Status::On, ["survey"]),
        AgentRef::new("mapper", Status::On, ["survey", "weather"]),
        AgentRef::new("relay", Status::Off, ["survey"]),
        AgentRef::new("tower", Status::On, ["weather"]),
    ]
    .into_iter()
    .map(|a| (a.id.clone(), a))
    .collect();

    let mut g = GroupAgent::new("survey-group", "survey");
    for a in agents.values() {
        println!("register {}: {:?}", a.id, g.register(a).unwrap());
    }
    println!("active {:?}, dormant {:?}", g.cmp_active, g.cmp_nonactive);

    let msgs = [
        post("scout", "survey"),
        post("relay", "weather"),
        post("mapper", "survey"),
    ];
    let snapshot = g.clone();
    for m in &msgs {
        let d = g.deliver(&mut agents, m.clone()).unwrap();
        println!(
            "deliver from {} on {}: seq {:?} to {:?}",
            m.sender, m.topic, d.seq, d.recipients
        );
    }

    let opts = FragmentOptions {
        topics: vec!["weather".into()],
        ..Default::default()
    };
    let cs = compile_group_to_net(&snapshot, &opts);
    println!(
        "fragment: {} places, {} transitions, {} layering violations",
        cs.net.places.len(),
        cs.net.transitions.len(),
        validate_layering(&cs).len()
    );
    let mut marking = cs.net.initial.clone();
    for m in &msgs {
        marking.add_token(PUBLISH, post_token(&cs.net, m));
        marking = run_with(
            &cs.net,
            marking,
            FiringPolicy::SeededUniformRandom,
            1,
            100,
            &mut PolicyOnly,
        )
        .0
        .final_marking;
    }
    let via_net = fragment_buffers(&snapshot, &marking);
    for (id, inbox) in &via_net {
        let direct = &agents[id].buffer;
        println!(
            "{id}: net {} messages, direct {} (match: {})",
            inbox.len(),
            direct.len(),
            inbox == direct
        );
    }

    let mut relay = agents["relay"].clone();
    relay.st = Status::On;
    println!("relay wakes: {:?}", g.switch_cmp(&relay).unwrap());
    agents.insert("relay".into(), relay);
    println!("deregister scout: {:?}", g.deregister("scout"));
    g.check_invariants(&agents).unwrap();
    println!(
        "active {:?}, dormant {:?}, next seq {}",
        g.cmp_active, g.cmp_nonactive, g.next_seq
    );
}
