//! Small random problem instances for the bundled domains.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub fn random_problem(domain: &str, seed: u64) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match domain {
        "gripper" => Ok(gripper(&mut rng)),
        "blocksworld" => Ok(blocksworld(&mut rng)),
        "miconic" => Ok(miconic(&mut rng)),
        "satellite" => Ok(satellite(&mut rng)),
        _ => Err(Error::Config(format!("no generator for domain `{domain}`"))),
    }
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn finish(out: &mut String, name: &str, domain: &str, objects: &str, init: &[String], goal: &[String]) {
    let _ = write!(out, "(define (problem {name})\n  (:domain {domain})\n  (:objects {objects})\n  (:init");
    for a in init {
        let _ = write!(out, " {a}");
    }
    out.push_str(")\n  (:goal (and");
    for g in goal {
        let _ = write!(out, " {g}");
    }
    out.push_str(")))\n");
}

fn gripper(rng: &mut ChaCha8Rng) -> String {
    let rooms = names("room", rng.gen_range(2..=3));
    let balls = names("ball", rng.gen_range(1..=3));
    let objects = format!("{} - room {} - ball left right - gripper", rooms.join(" "), balls.join(" "));
    let mut init = vec![
        format!("(at-robby {})", rooms.choose(rng).unwrap()),
        "(free left)".into(),
        "(free right)".into(),
    ];
    let mut goal = Vec::new();
    for b in &balls {
        init.push(format!("(at {b} {})", rooms.choose(rng).unwrap()));
        goal.push(format!("(at {b} {})", rooms.choose(rng).unwrap()));
    }
    let mut out = String::new();
    finish(&mut out, "gripper-rand", "gripper", &objects, &init, &goal);
    out
}

/// A random arrangement of `blocks` into towers, as `on`/`ontable`/`clear` atoms.
fn towers(rng: &mut ChaCha8Rng, blocks: &[String]) -> Vec<String> {
    let mut order = blocks.to_vec();
    order.shuffle(rng);
    let mut atoms = Vec::new();
    for (i, b) in order.iter().enumerate() {
        if i > 0 && rng.gen_bool(0.6) {
            atoms.push(format!("(on {b} {})", order[i - 1]));
        } else {
            if i > 0 {
                atoms.push(format!("(clear {})", order[i - 1]));
            }
            atoms.push(format!("(ontable {b})"));
        }
    }
    atoms.push(format!("(clear {})", order[order.len() - 1]));
    atoms
}

fn blocksworld(rng: &mut ChaCha8Rng) -> String {
    let blocks = names("b", rng.gen_range(2..=5));
    let mut init = vec!["(handempty)".to_string()];
    init.extend(towers(rng, &blocks));
    let goal: Vec<String> = towers(rng, &blocks)
        .into_iter()
        .filter(|a| a.starts_with("(on ") || (a.starts_with("(ontable") && rng.gen_bool(0.3)))
        .collect();
    let goal = if goal.is_empty() { vec![format!("(clear {})", blocks[0])] } else { goal };
    let mut out = String::new();
    finish(&mut out, "bw-rand", "blocksworld", &blocks.join(" "), &init, &goal);
    out
}

fn miconic(rng: &mut ChaCha8Rng) -> String {
    let floors = names("f", rng.gen_range(2..=4));
    let passengers = names("p", rng.gen_range(1..=3));
    let objects = format!("{} - passenger {} - floor", passengers.join(" "), floors.join(" "));
    let mut init = Vec::new();
    // An occasional missing link can leave the goal unreachable.
    let gap = rng.gen_bool(0.15).then(|| rng.gen_range(0..floors.len() - 1));
    for i in 0..floors.len() {
        for j in i + 1..floors.len() {
            if gap.is_some_and(|g| i <= g && j > g) {
                continue;
            }
            init.push(format!("(above {} {})", floors[i], floors[j]));
        }
    }
    let mut goal = Vec::new();
    for p in &passengers {
        init.push(format!("(origin {p} {})", floors.choose(rng).unwrap()));
        init.push(format!("(destin {p} {})", floors.choose(rng).unwrap()));
        goal.push(format!("(served {p})"));
    }
    init.push(format!("(lift-at {})", floors.choose(rng).unwrap()));
    let mut out = String::new();
    finish(&mut out, "miconic-rand", "miconic", &objects, &init, &goal);
    out
}

fn satellite(rng: &mut ChaCha8Rng) -> String {
    let dirs = names("d", rng.gen_range(2..=4));
    let insts = names("ins", rng.gen_range(1..=2));
    let modes = names("m", rng.gen_range(1..=2));
    let objects = format!(
        "sat0 - satellite {} - instrument {} - mode {} - direction",
        insts.join(" "),
        modes.join(" "),
        dirs.join(" ")
    );
    let mut init = vec!["(power_avail sat0)".to_string(), format!("(pointing sat0 {})", dirs.choose(rng).unwrap())];
    for i in &insts {
        init.push(format!("(on_board {i} sat0)"));
        init.push(format!("(calibration_target {i} {})", dirs.choose(rng).unwrap()));
        for m in &modes {
            if rng.gen_bool(0.6) {
                init.push(format!("(supports {i} {m})"));
            }
        }
    }
    let mut goal = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let g = format!("(have_image {} {})", dirs.choose(rng).unwrap(), modes.choose(rng).unwrap());
        if !goal.contains(&g) {
            goal.push(g);
        }
    }
    if rng.gen_bool(0.5) {
        goal.push(format!("(pointing sat0 {})", dirs.choose(rng).unwrap()));
    }
    let mut out = String::new();
    finish(&mut out, "satellite-rand", "satellite", &objects, &init, &goal);
    out
}
