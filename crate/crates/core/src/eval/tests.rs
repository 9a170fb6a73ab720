use proptest::prelude::*;

use super::*;
use crate::encoder::{kappa_shift, make_params, omega, phi_step0, variable_order, CopVariant, ConfigVars};
use crate::formula::{lex_less, parse, tuple_equiv, Tuple};
use crate::machine::{load_machine, Move, ZERO};

fn naive(f: &Formula) -> bool {
    eval_naive(f, None).unwrap().value
}

fn guarded(f: &Formula) -> bool {
    eval_guarded(f, None).unwrap().value
}

#[test]
fn trivial_sentences() {
    for (text, want) in [
        ("(& T (~ F))", true),
        ("(A (p[0]) (| p[0] (~ p[0])))", true),
        ("(E (p[0]) (& p[0] (~ p[0])))", false),
        ("(A (p[0]) (E (p[1]) (= p[0] p[1])))", true),
        ("(E (p[1]) (A (p[0]) (= p[0] p[1])))", false),
    ] {
        let f = parse(text).unwrap();
        assert_eq!(naive(&f), want, "{text}");
        assert_eq!(guarded(&f), want, "{text}");
    }
}

#[test]
fn kappa_right_width_three() {
    let gamma = Tuple::value(3, 3).unwrap();
    for v in 0u128..8 {
        let f = kappa_shift(Move::R, &gamma, &Tuple::value(v, 3).unwrap()).unwrap();
        let want = (3 ^ v) == 4;
        assert_eq!(naive(&f), want, "v = {v}");
        assert_eq!(guarded(&f), want, "v = {v}");
    }
}

#[test]
fn full_enumeration_counts_every_branch() {
    let vs: Vec<VarId> = (0..5).map(VarId::p).collect();
    let body = Formula::or(vec![Formula::var(vs[0]), Formula::not(Formula::var(vs[0]))]);
    let f = Formula::forall(vs, body).unwrap();
    let e = eval_naive(&f, None).unwrap();
    assert!(e.value);
    assert_eq!(e.stats.guard_hits, 0);
    assert_eq!(e.stats.branch_count, 32);
    assert_eq!(e.stats.peak_env, 5);
}

#[test]
fn naive_cap_and_unbound_variables() {
    let vs: Vec<VarId> = (0..10).map(VarId::p).collect();
    let f = Formula::forall(vs.clone(), Formula::and(vs.iter().map(|v| Formula::var(*v)).collect())).unwrap();
    let opts = EvalOptions {
        enum_cap: 8,
        ..EvalOptions::default()
    };
    assert_eq!(
        eval_naive_with(&f, None, &opts),
        Err(EvalError::TooManyVariables { count: 10, cap: 8 })
    );
    let open = Formula::var(VarId::p(3));
    assert_eq!(eval_naive(&open, None), Err(EvalError::UnboundVariable(VarId::p(3))));
    assert_eq!(eval_guarded(&open, None), Err(EvalError::UnboundVariable(VarId::p(3))));
    let mut a = Assignment::new();
    a.bind(VarId::p(3), true).unwrap();
    assert!(a.bind(VarId::p(3), false).is_err());
    let opts = EvalOptions::default().with_assignment(a);
    assert!(eval_naive_with(&open, None, &opts).unwrap().value);
    assert!(eval_guarded_with(&open, None, &opts).unwrap().value);
}

#[test]
fn node_budget_overflow_is_reported() {
    let xs: Vec<VarId> = (0..12).map(VarId::p).collect();
    let ys: Vec<VarId> = (0..12).map(|i| VarId::tagged(VarKind::Midpoint, 0, i)).collect();
    // ∀x ∃y: x < y as 12-bit numbers is false only for the maximum.
    let body = lex_less(&Tuple::of_vars(&xs), &Tuple::of_vars(&ys)).unwrap();
    let f = Formula::forall(xs, Formula::exists(ys, body).unwrap()).unwrap();
    assert!(!guarded(&f));
    let opts = EvalOptions {
        node_cap: 16,
        ..EvalOptions::default()
    };
    assert_eq!(
        eval_guarded_with(&f, None, &opts),
        Err(EvalError::GuardFallbackOverflow { nodes: 16 })
    );
}

#[test]
fn definitional_premises_are_substituted() {
    let xs: Vec<VarId> = (0..16).map(VarId::p).collect();
    let ys: Vec<VarId> = (0..16).map(|i| VarId::tagged(VarKind::Midpoint, 0, i)).collect();
    let (tx, ty) = (Tuple::of_vars(&xs), Tuple::of_vars(&ys));
    // ∀x ∀y (y ≡ x → ¬(x < y)).
    let inner = Formula::forall(
        ys,
        Formula::implies(tuple_equiv(&ty, &tx).unwrap(), Formula::not(lex_less(&tx, &ty).unwrap())),
    )
    .unwrap();
    let f = Formula::forall(xs, inner).unwrap();
    let e = eval_guarded(&f, None).unwrap();
    assert!(e.value);
    assert!(e.stats.guard_hits >= 1);
    assert!(eval_naive(&f, None).is_err());
}

#[test]
fn encoder_primitives_agree() {
    let prog = load_machine("alphabet: _ > 0 1\nstates: 4\nq0 > > -> q3 R > S\nq3 1 > -> q1 S > S\nq3 0 > -> q2 S > S\n").unwrap();
    let params = make_params(&prog, 2, 1).unwrap();
    for w in 1..=4usize {
        for a in 0..1u128 << w {
            for b in 0..1u128 << w {
                let (ta, tb) = (Tuple::value(a, w).unwrap(), Tuple::value(b, w).unwrap());
                let lt = lex_less(&ta, &tb).unwrap();
                assert_eq!(naive(&lt), a < b);
                assert_eq!(guarded(&lt), a < b);
                let eq = tuple_equiv(&ta, &tb).unwrap();
                assert_eq!(guarded(&eq), a == b);
            }
        }
    }
    // One instruction formula has free basic variables; close it and compare.
    let f = phi_step0(&params, 0, CopVariant::Disjunction).unwrap();
    let order = variable_order(&params, &[0, 1]);
    let closed = Formula::exists(crate::formula::free_vars(&f).into_iter().collect(), f).unwrap();
    let opts = EvalOptions::default().with_order(order);
    assert!(eval_guarded_with(&closed, None, &opts).unwrap().value);
    let _ = ConfigVars::basic(&params, 0);
}

#[test]
fn input_probe_reads_the_tape() {
    let prog = load_machine("alphabet: _ > 0 1\nstates: 3\nq0 > > -> q1 S > S\n").unwrap();
    let params = make_params(&prog, 2, 2).unwrap();
    let x = prog.alphabet().parse_word("01").unwrap();
    let probe = make_input_oracle(&params, &x);
    let aw = params.input_width();
    let cw = params.code_width();
    let at = |a: u128| BitTuple::from_value(a, aw).unwrap();
    let code = |s: Symbol| BitTuple::from_value(s.0 as u128, cw).unwrap();
    assert!(probe.holds(&at(0), &code(START)).unwrap());
    assert!(probe.holds(&at(1), &code(ZERO)).unwrap());
    assert!(!probe.holds(&at(2), &code(ZERO)).unwrap());
    assert!(probe.holds(&at(3), &code(BLANK)).unwrap());
    assert!(matches!(
        probe.holds(&BitTuple::from_value(0, aw + 1).unwrap(), &code(BLANK)),
        Err(EvalError::AddressOverflow { .. })
    ));
}

#[test]
fn accept_all_sentence() {
    let prog = load_machine("alphabet: _ > 0 1\nstates: 3\nq0 > > -> q1 S > S\n").unwrap();
    let params = make_params(&prog, 2, 2).unwrap();
    let x = prog.alphabet().parse_word("01").unwrap();
    let f = omega(&params, &x).unwrap();
    let opts = EvalOptions::default().with_order(variable_order(&params, &[0, params.period]));
    let e = eval_guarded_with(&f, None, &opts).unwrap();
    assert!(e.value);
    assert_eq!(e.stats.branch_guards, params.m as u64);
    assert_eq!(e.stats.guard_branches, 2 * params.m as u64);
    assert!(matches!(eval_naive(&f, None), Err(EvalError::TooManyVariables { .. })));
}

#[test]
fn registry_lookup() {
    let r = Registry::default();
    assert_eq!(r.names(), vec!["guarded", "naive"]);
    let f = parse("(A (p[0]) (| p[0] (~ p[0])))").unwrap();
    for name in r.names() {
        let e = r.get(name).unwrap().evaluate(&f, None, &EvalOptions::default()).unwrap();
        assert!(e.value);
    }
    assert!(matches!(r.get("dpll"), Err(EvalError::UnknownEvaluator(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn guarded_matches_naive(f in crate::formula::tests::arb_formula()) {
        let f = f.closure();
        let count = crate::formula::free_vars(&f).len();
        prop_assume!(count == 0);
        let a = eval_naive(&f, None).unwrap();
        let b = eval_guarded(&f, None).unwrap();
        prop_assert_eq!(a.value, b.value);
        prop_assert!(b.stats.peak_env <= 18 + 20);
    }
}
