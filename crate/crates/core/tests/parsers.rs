//! Replays the fuzz corpus through the parser entry points and mutates it
//! with proptest. Each check mirrors the corresponding fuzz target.

use std::path::PathBuf;

use proptest::prelude::*;
use toric_gs::io::{self, PolytopeInput, RunInputs};
use toric_gs::rational::{format_rational, parse_rational, MAX_LITERAL_LEN};

const TARGETS: [&str; 7] = [
    "polytope_json",
    "weight_json",
    "pl_json",
    "potential_json",
    "g_spec",
    "rational",
    "run_inputs",
];

fn check(target: &str, text: &str) {
    match target {
        "polytope_json" => {
            if let Ok(input) = PolytopeInput::parse(text) {
                assert_eq!(PolytopeInput::from_value(&input.to_value()).unwrap(), input);
                if let Ok(p) = input.build() {
                    assert!(p.volume_f64() > 0.0);
                }
            }
        }
        "weight_json" => {
            if let Ok(g) = io::parse_weight(text) {
                assert_eq!(io::weight_from_value(&io::weight_to_value(&g)).unwrap(), g);
            }
        }
        "pl_json" => {
            if let Ok(f) = io::parse_pl(text) {
                assert_eq!(io::pl_from_value(&io::pl_to_value(&f)).unwrap(), f);
            }
        }
        "potential_json" => {
            if let Ok(u) = io::parse_potential(text) {
                assert_eq!(io::potential_from_value(&io::potential_to_value(&u)).unwrap(), u);
                let _ = u.check_admissible((-1.0, 1.0));
            }
        }
        "g_spec" => {
            if let Ok(g) = io::parse_g_spec(text) {
                assert_eq!(io::weight_from_value(&io::weight_to_value(&g)).unwrap(), g);
            }
        }
        "rational" => {
            if let Some(q) = parse_rational(text) {
                let printed = format_rational(&q);
                if printed.len() <= MAX_LITERAL_LEN {
                    assert_eq!(parse_rational(&printed), Some(q));
                }
            }
        }
        "run_inputs" => {
            if let Ok(r) = RunInputs::parse(text) {
                assert_eq!(RunInputs::from_value(&r.to_value()).unwrap(), r);
            }
        }
        other => panic!("unknown target {other}"),
    }
}

fn corpus(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files.iter().map(|f| std::fs::read_to_string(f).unwrap()).collect()
}

#[test]
fn corpus_seeds_replay_cleanly() {
    for target in TARGETS {
        let seeds = corpus(target);
        assert!(!seeds.is_empty(), "{target} has no seeds");
        for s in &seeds {
            check(target, s);
        }
    }
}

#[test]
fn valid_seeds_parse() {
    assert!(io::parse_polytope(&corpus("polytope_json")[0]).is_ok());
    for s in corpus("weight_json") {
        io::parse_weight(&s).unwrap();
    }
    for s in corpus("run_inputs") {
        RunInputs::parse(&s).unwrap();
    }
}

fn mutated() -> impl Strategy<Value = (usize, String)> {
    (0..TARGETS.len(), any::<prop::sample::Index>(), any::<prop::sample::Index>(), "[-0-9a-z/.,:{}\\[\\]\" e]{0,6}")
        .prop_map(|(t, seed, pos, insert)| {
            let seeds = corpus(TARGETS[t]);
            let base = seeds[seed.index(seeds.len())].clone();
            let chars: Vec<char> = base.chars().collect();
            let at = pos.index(chars.len() + 1);
            let cut = (at + insert.len() / 2).min(chars.len());
            let text: String = chars[..at].iter().chain(insert.chars().collect::<Vec<_>>().iter()).chain(chars[cut..].iter()).collect();
            (t, text)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn mutated_seeds_never_panic((t, text) in mutated()) {
        check(TARGETS[t], &text);
    }

    #[test]
    fn arbitrary_text_never_panics(t in 0..TARGETS.len(), text in "\\PC{0,40}") {
        check(TARGETS[t], &text);
    }
}
