//! The CDCL solver against exhaustive enumeration.

use kbosat::logic::{parse_dimacs, Cnf};
use kbosat::solver::{solve, solve_with, Limit, SolveResult, SolverConfig};
use proptest::prelude::*;

fn arb_cnf(max_vars: u32) -> impl Strategy<Value = Cnf> {
    (1..=max_vars).prop_flat_map(|n| {
        let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v });
        let clauses = prop::collection::vec(prop::collection::vec(lit, 1..=3), 0..(5 * n as usize));
        clauses.prop_map(move |cs| {
            let mut cnf = Cnf::new(n);
            for c in cs {
                cnf.add(c);
            }
            cnf
        })
    })
}

fn brute_force(cnf: &Cnf) -> bool {
    (0u32..1 << cnf.num_vars).any(|bits| cnf.satisfied_by(&|v| (bits >> (v - 1)) & 1 == 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn agrees_with_enumeration(cnf in arb_cnf(16)) {
        let expected = brute_force(&cnf);
        match solve(&cnf) {
            SolveResult::Sat(m) => {
                prop_assert!(expected);
                prop_assert!(cnf.satisfied_by(&|v| m.value(v)));
            }
            SolveResult::Unsat => prop_assert!(!expected),
            SolveResult::Unknown(l) => prop_assert!(false, "gave up: {:?}", l),
        }
    }

    #[test]
    fn repeated_calls_agree(cnf in arb_cnf(12)) {
        prop_assert_eq!(solve(&cnf), solve(&cnf));
    }
}

fn pigeonhole(holes: u32) -> Cnf {
    let pigeons = holes + 1;
    let var = |p: u32, h: u32| (p * holes + h + 1) as i32;
    let mut cnf = Cnf::new(pigeons * holes);
    for p in 0..pigeons {
        cnf.add((0..holes).map(|h| var(p, h)).collect());
    }
    for h in 0..holes {
        for p in 0..pigeons {
            for q in p + 1..pigeons {
                cnf.add(vec![-var(p, h), -var(q, h)]);
            }
        }
    }
    cnf
}

#[test]
fn pigeonhole_is_unsat() {
    for holes in 1..=5 {
        assert_eq!(solve(&pigeonhole(holes)), SolveResult::Unsat, "{holes} holes");
    }
}

#[test]
fn expired_deadline_gives_unknown() {
    let cfg = SolverConfig { conflict_budget: None, deadline: Some(std::time::Instant::now()) };
    assert_eq!(solve_with(&pigeonhole(7), &cfg), SolveResult::Unknown(Limit::Timeout));
}

#[test]
fn dimacs_input() {
    let cnf = parse_dimacs("c example\np cnf 3 3\n1 -2 0\n2 3 0\n-1 0\n").unwrap();
    match solve(&cnf) {
        SolveResult::Sat(m) => assert!(!m.value(1) && !m.value(2) && m.value(3)),
        r => panic!("{r:?}"),
    }
}
