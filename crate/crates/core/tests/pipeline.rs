//! End-to-end behaviour: encode, solve, decode, verify, report.

use std::path::{Path, PathBuf};
use std::time::Duration;

use kbosat::corpus::{problem_files, run_corpus, system_kind, Report};
use kbosat::encode::SumWidth;
use kbosat::kbo::{orients, PrecOrd, PrecedenceMode, WeightFunction};
use kbosat::logic::parse_dimacs;
use kbosat::parse::parse_system;
use kbosat::pb::{parse_opb, solve_constraints, PbResult};
use kbosat::proof::{decode, render, EngineKind};
use kbosat::prover::{encode, import_model, prove, MaybeReason, RunConfig, Verdict};
use kbosat::random::{random_family, random_trs, Family};
use kbosat::solver::{solve, Model, SolveResult, SolverConfig};
use kbosat::term::Trs;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn load(name: &str) -> Trs {
    let path = corpus_dir().join(name);
    parse_system(&std::fs::read_to_string(&path).unwrap(), system_kind(&path).unwrap()).unwrap()
}

fn cfg(engine: EngineKind, bits: usize, mode: PrecedenceMode) -> RunConfig {
    RunConfig { timeout: None, ..RunConfig::new(engine, bits, mode) }
}

fn successes(report: &Report) -> Vec<String> {
    report.entries.iter().filter(|e| e.is_yes()).map(|e| e.name.clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Writing weights and codes into a model and decoding gives them back.
    #[test]
    fn decode_inverts_assignment(
        seed in any::<u64>(),
        engine in prop_oneof![Just(EngineKind::Sat), Just(EngineKind::Pbc)],
        k in 1usize..5,
        raw in prop::collection::vec((0u64..64, 0u64..64), 8),
        w0 in 1u64..64,
    ) {
        let trs = random_trs(&mut StdRng::seed_from_u64(seed), &Family { max_symbols: 6, ..Family::default() });
        let encoded = encode(&trs, &cfg(engine, k, PrecedenceMode::Quasi)).unwrap();
        let t = encoded.tables();
        let sig = trs.signature();
        let mask = (1u64 << k) - 1;
        let wf = WeightFunction {
            weights: sig.iter().cloned().zip(raw.iter().map(|(w, _)| w & mask)).collect(),
            w0: (w0 & mask).max(1),
        };
        let codes: Vec<u64> = raw.iter().take(sig.len()).map(|(_, c)| c & ((1 << t.l) - 1)).collect();
        let mut m = Model::from_values(vec![false; t.max_var() as usize]);
        t.assign(&wf, &codes, &mut m);
        let (back, p) = decode(&m, t);
        prop_assert_eq!(back, wf);
        prop_assert_eq!(t.codes(&m), codes.clone());
        for (i, f) in sig.iter().enumerate() {
            for (j, g) in sig.iter().enumerate() {
                let ord = p.compare(f, g);
                if codes[i] > codes[j] {
                    prop_assert_eq!(ord, PrecOrd::Greater);
                }
                if codes[i] == codes[j] && i != j && !f.is_constant() && !g.is_constant() {
                    prop_assert_eq!(ord, PrecOrd::Equal);
                }
            }
        }
    }
}

#[test]
fn yes_always_carries_a_verified_proof() {
    for trs in random_family(3, 200, &Family::default()) {
        for engine in [EngineKind::Sat, EngineKind::Pbc] {
            let out = prove(&trs, &cfg(engine, 3, PrecedenceMode::Quasi)).unwrap();
            if let Verdict::Yes { proof, objective } = out.verdict {
                assert!(orients(&trs, &proof.weights, &proof.precedence).is_ok());
                assert_eq!(proof.per_rule.len(), trs.rules().len());
                let text = render(&proof, trs.signature());
                for r in trs.rules() {
                    assert!(text.contains(&r.to_string()), "{text}");
                }
                assert!(objective.is_none());
            }
        }
    }
}

#[test]
fn golden_corpus_count() {
    let golden: Vec<String> = include_str!("golden/corpus_pbc4.txt")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(String::from)
        .collect();
    let report = run_corpus(&corpus_dir(), &cfg(EngineKind::Pbc, 4, PrecedenceMode::Quasi)).unwrap();
    assert_eq!(report.summary.problems, 20);
    assert_eq!(report.summary.errors, 0);
    assert_eq!(report.summary.successes, golden.len());
    assert_eq!(successes(&report), golden);
    let sat = run_corpus(&corpus_dir(), &cfg(EngineKind::Sat, 4, PrecedenceMode::Quasi)).unwrap();
    assert_eq!(successes(&sat), golden);
}

#[test]
fn corpus_runs_are_deterministic() {
    let config = cfg(EngineKind::Pbc, 3, PrecedenceMode::Quasi);
    let strip = |r: Report| {
        r.entries
            .into_iter()
            .map(|e| (e.name, e.verdict, e.reason, serde_json::to_string(&e.proof).unwrap()))
            .collect::<Vec<_>>()
    };
    let a = strip(run_corpus(&corpus_dir(), &config).unwrap());
    let b = strip(run_corpus(&corpus_dir(), &config).unwrap());
    assert_eq!(a, b);
}

#[test]
fn empty_directory_gives_zero_summary() {
    let dir = std::env::temp_dir().join(format!("kbosat-empty-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let report = run_corpus(&dir, &RunConfig::default()).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(report.summary.problems, 0);
    assert_eq!(report.summary.successes, 0);
    assert_eq!(report.summary.timeouts, 0);
    assert!(report.entries.is_empty());
}

#[test]
fn unparsable_file_becomes_error_entry() {
    let dir = std::env::temp_dir().join(format!("kbosat-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("bad.trs"), "(RULES f(x -> x)").unwrap();
    std::fs::write(dir.join("good.srs"), "(RULES a b -> b a)").unwrap();
    let report = run_corpus(&dir, &RunConfig::default()).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(report.summary.problems, 2);
    assert_eq!(report.summary.errors, 1);
    assert_eq!(report.summary.successes, 1);
}

/// Fixed-width sums can only lose proofs, never gain them.
#[test]
fn fixed_width_sums_are_weaker() {
    let mut systems: Vec<Trs> =
        problem_files(&corpus_dir()).unwrap().iter().map(|p| load(p.file_name().unwrap().to_str().unwrap())).collect();
    systems.extend(random_family(5, 150, &Family::default()));
    let mut lost = 0;
    for trs in &systems {
        for k in [2, 3] {
            let growing = cfg(EngineKind::Sat, k, PrecedenceMode::Quasi);
            let fixed = RunConfig { sum_width: SumWidth::Fixed, ..growing.clone() };
            let g = prove(trs, &growing).unwrap().verdict.is_yes();
            let f = prove(trs, &fixed).unwrap().verdict.is_yes();
            assert!(!f || g, "{trs}");
            lost += usize::from(g && !f);
        }
    }
    assert!(lost > 0, "fixed-width sums never lost a proof");
}

#[test]
fn dimacs_export_and_import() {
    let trs = load("SK_90.2.42.trs");
    let config = cfg(EngineKind::Sat, 2, PrecedenceMode::Quasi);
    let text = encode(&trs, &config).unwrap().dimacs();
    assert!(text.lines().next().unwrap().starts_with("p cnf "));
    let SolveResult::Sat(m) = solve(&parse_dimacs(&text).unwrap()) else {
        panic!("encoding should be satisfiable");
    };
    let model_text = format!("s SATISFIABLE\nv {} 0\n", m.literals().iter().map(i32::to_string).collect::<Vec<_>>().join(" "));
    let model = kbosat::prover::parse_model(&model_text).unwrap();
    let proof = import_model(&trs, &config, &model).unwrap();
    assert!(orients(&trs, &proof.weights, &proof.precedence).is_ok());
}

#[test]
fn opb_export_and_import() {
    let trs = load("SK_90.2.42.trs");
    let config = cfg(EngineKind::Pbc, 2, PrecedenceMode::Quasi);
    let text = encode(&trs, &config).unwrap().opb().unwrap();
    let inst = parse_opb(&text).unwrap();
    let PbResult::Sat(m) = solve_constraints(&inst.constraints, inst.num_vars, &SolverConfig::default()) else {
        panic!("encoding should be satisfiable");
    };
    let proof = import_model(&trs, &config, &m).unwrap();
    assert!(orients(&trs, &proof.weights, &proof.precedence).is_ok());
}

#[test]
fn foreign_model_is_rejected() {
    let trs = load("SK_90.2.42.trs");
    let config = cfg(EngineKind::Pbc, 2, PrecedenceMode::Quasi);
    let empty = Model::from_values(Vec::new());
    assert!(import_model(&trs, &config, &empty).is_err());
}

#[test]
fn timeout_reports_maybe() {
    let trs = load("triangle.srs");
    let config = RunConfig { timeout: Some(Duration::ZERO), ..RunConfig::new(EngineKind::Pbc, 7, PrecedenceMode::Quasi) };
    match prove(&trs, &config).unwrap().verdict {
        Verdict::Maybe(MaybeReason::Timeout) => {}
        v => panic!("expected a timeout, got {}", v.label()),
    }
}

#[test]
fn incompleteness_at_low_width() {
    // terminating by KBO, but only with w(i) >= 4
    let trs = load("unbounded_bits_4.trs");
    let out = prove(&trs, &cfg(EngineKind::Pbc, 2, PrecedenceMode::Quasi)).unwrap();
    assert!(matches!(out.verdict, Verdict::Maybe(MaybeReason::Unsat)));
}

#[test]
fn corpus_files_are_sorted() {
    let files = problem_files(&corpus_dir()).unwrap();
    let names: Vec<&Path> = files.iter().map(|p| p.as_path()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}
