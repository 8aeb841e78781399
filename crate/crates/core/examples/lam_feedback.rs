//! An action model learning a demonstrated routine from feedback. The net
//! run and the direct frequency model are printed side by side.

use csnet::engine::FiringPolicy;
use csnet::scenarios::human::{HumanDecider, HumanPolicy};
use csnet::scenarios::lam::{self, LamConfig};
use csnet::scenarios::{run_scenario, ScenarioConfig};

fn show(config: LamConfig) {
    let direct = lam::simulate(&config);
    let sc = ScenarioConfig::Lam(config.clone());
    let cs = sc.build().expect("valid config");
    let mut d = HumanDecider::new(HumanPolicy::ApproveAll);
    let r = run_scenario(&cs, &sc, FiringPolicy::SeededUniformRandom, 1, &mut d).unwrap();
    println!("demo {:?} x{}", config.demonstrations, config.repetitions);
    println!("    net    {}", r.headline());
    println!("    direct {direct:?}");
    if let Some(model) = lam::model_of(&config, &r.trace.final_marking) {
        for ctx in config.contexts() {
            let row: Vec<String> = config
                .action_alphabet
                .iter()
                .map(|a| format!("{a}:{}", model.count(ctx, a)))
                .collect();
            println!(
                "    after {ctx:<7} predict {:<6} [{}]",
                model.predict(ctx),
                row.join(" ")
            );
        }
    }
}

fn main() {
    show(LamConfig::new(&["a", "b", "c"], &["a", "b", "c", "b"], 6));
    show(LamConfig::new(
        &["open", "edit", "save", "close"],
        &["open", "edit", "save", "edit", "save", "close"],
        4,
    ));
    show(LamConfig {
        action_alphabet: vec!["x".into(), "y".into()],
        demonstrations: vec![vec!["x".into(), "y".into()], vec!["y".into(), "y".into(), "x".into()]],
        repetitions: 3,
    });
}
