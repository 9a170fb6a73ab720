use std::collections::HashMap;

use proptest::prelude::*;

use super::*;

/// Direct recursive truth value, enumerating quantified variables.
fn truth(f: &Formula, env: &mut HashMap<VarId, bool>) -> bool {
    match f.node() {
        Node::Const(b) => *b,
        Node::Var(v) => env[v],
        Node::Not(a) => !truth(a, env),
        Node::And(ps) => ps.iter().all(|p| truth(p, env)),
        Node::Or(ps) => ps.iter().any(|p| truth(p, env)),
        Node::Implies(a, b) => !truth(a, env) || truth(b, env),
        Node::Equiv(a, b) => truth(a, env) == truth(b, env),
        Node::Xor(a, b) => truth(a, env) != truth(b, env),
        Node::Forall(vs, body) | Node::Exists(vs, body) => {
            let universal = matches!(f.node(), Node::Forall(..));
            let saved: Vec<_> = vs.iter().map(|v| env.get(v).copied()).collect();
            let mut result = universal;
            for bits in 0u64..(1 << vs.len()) {
                for (i, v) in vs.iter().enumerate() {
                    env.insert(*v, bits >> i & 1 == 1);
                }
                if truth(body, env) != universal {
                    result = !universal;
                    break;
                }
            }
            for (v, old) in vs.iter().zip(saved) {
                match old {
                    Some(b) => env.insert(*v, b),
                    None => env.remove(v),
                };
            }
            result
        }
    }
}

fn p(i: usize) -> Formula {
    Formula::var(VarId::p(i))
}

fn tuple(kind: VarKind, tag: u128, w: usize) -> (Vec<VarId>, Tuple) {
    let vars: Vec<_> = (0..w).map(|i| VarId::tagged(kind, tag, i)).collect();
    let t = Tuple::of_vars(&vars);
    (vars, t)
}

#[test]
fn variable_length_counts_digits_and_brackets() {
    assert_eq!(natural_length(&Formula::var(VarId::tagged(VarKind::WorkCell, 12, 3))), 8);
    assert_eq!(natural_length(&Formula::var(VarId::plain(VarKind::TailCell, 10))), 6);
    assert_eq!(natural_length(&Formula::truth()), 4);
    assert_eq!(natural_length(&parse("(~ q[4][0])").unwrap()), 10);
}

#[test]
fn length_matches_rendering_without_constants() {
    let f = parse("(A (p[0] p[1]) (> (& p[0] p[1]) (| (^ p[0] p[1]) (= p[1] p[0]))))").unwrap();
    let visible = render(&f).chars().filter(|c| !c.is_whitespace()).count() as u64;
    assert_eq!(natural_length(&f), visible);
}

#[test]
fn and_length_is_additive() {
    let a = parse("(| p[0] p[1])").unwrap();
    let b = parse("(~ p[2])").unwrap();
    let both = Formula::and(vec![a.clone(), b.clone()]);
    assert_eq!(natural_length(&both), natural_length(&a) + natural_length(&b) + 3);
}

#[test]
fn tuple_equiv_holds_exactly_on_the_diagonal() {
    let (xs, x) = tuple(VarKind::WorkCell, 0, 3);
    let (ys, y) = tuple(VarKind::WorkCell, 1, 3);
    let f = tuple_equiv(&x, &y).unwrap();
    let mut count = 0;
    for bits in 0u32..64 {
        let mut env = HashMap::new();
        for i in 0..3 {
            env.insert(xs[i], bits >> i & 1 == 1);
            env.insert(ys[i], bits >> (i + 3) & 1 == 1);
        }
        let diag = (bits & 7) == (bits >> 3);
        assert_eq!(truth(&f, &mut env), diag);
        count += diag as u32;
    }
    assert_eq!(count, 8);
    let refl = tuple_equiv(&x, &x).unwrap();
    let closed = Formula::forall(xs, refl).unwrap();
    assert!(truth(&closed, &mut HashMap::new()));
}

#[test]
fn constant_tuples() {
    let a = Tuple::value(0b10, 2).unwrap();
    let b = Tuple::value(0b01, 2).unwrap();
    assert!(!truth(&tuple_equiv(&a, &b).unwrap(), &mut HashMap::new()));
    assert!(truth(&lex_less(&b, &a).unwrap(), &mut HashMap::new()));
    assert!(!truth(&lex_less(&a, &a).unwrap(), &mut HashMap::new()));
    assert!(truth(&lex_geq(&a, &a).unwrap(), &mut HashMap::new()));
    assert!(truth(&lex_greater(&a, &b).unwrap(), &mut HashMap::new()));
    assert!(matches!(
        tuple_equiv(&a, &Tuple::zeros(3)),
        Err(FormulaError::WidthMismatch { left: 2, right: 3 })
    ));
}

#[test]
fn lex_less_is_built_from_the_most_significant_bit() {
    let (_, x) = tuple(VarKind::WorkCell, 0, 2);
    let (_, y) = tuple(VarKind::WorkCell, 1, 2);
    assert_eq!(
        render(&lex_less(&x, &y).unwrap()),
        "(| (& (= x[0][0] F) (= x[1][0] T)) (& (= x[0][0] x[1][0]) (& (= x[0][1] F) (= x[1][1] T))))"
    );
}

#[test]
fn bit_tuples() {
    let t = BitTuple::from_value(6, 4).unwrap();
    assert_eq!(t.to_string(), "0110");
    assert_eq!(t.value(), 6);
    assert!(BitTuple::from_value(8, 3).is_err());
    assert_eq!(BitTuple::from_value(u128::MAX, 128).unwrap().value(), u128::MAX);
    assert_eq!(BitTuple::from_value(1, 130).unwrap().value(), 1);
}

#[test]
fn substitute_replaces_free_occurrences_only() {
    let f = parse("(| p[0] p[1])").unwrap();
    let g = substitute(&f, &HashMap::from([(VarId::p(0), true)]));
    assert_eq!(render(&g), "(| T p[1])");

    let h = parse("(& p[1] (A (p[1]) p[1]))").unwrap();
    let g = substitute(&h, &HashMap::from([(VarId::p(1), false)]));
    assert_eq!(render(&g), "(& F (A (p[1]) p[1]))");

    let cap = parse("(A (p[2]) (& p[0] p[2]))").unwrap();
    assert_eq!(
        substitute_terms(&cap, &HashMap::from([(VarId::p(0), p(2))])),
        Err(FormulaError::CapturedVariable(VarId::p(2)))
    );
    assert_eq!(
        render(&substitute_terms(&cap, &HashMap::from([(VarId::p(0), p(3))])).unwrap()),
        "(A (p[2]) (& p[3] p[2]))"
    );
}

#[test]
fn free_variables_and_closure() {
    let f = parse("(A (p[0]) (& p[0] (E (p[1]) (| p[1] p[2]))))").unwrap();
    assert_eq!(free_vars(&f).into_iter().collect::<Vec<_>>(), vec![VarId::p(2)]);
    assert!(!f.is_closed());
    assert!(f.closure().is_closed());
}

#[test]
fn binder_rules() {
    assert_eq!(Formula::forall(vec![], p(0)), Err(FormulaError::EmptyQuantifier));
    assert_eq!(
        Formula::exists(vec![VarId::p(0), VarId::p(0)], p(0)),
        Err(FormulaError::DuplicateBoundVariable(VarId::p(0)))
    );
}

fn arb_var() -> impl Strategy<Value = VarId> {
    prop_oneof![
        (0usize..6).prop_map(VarId::p),
        (0u128..20, 0usize..4).prop_map(|(t, i)| VarId::tagged(VarKind::WorkCell, t, i)),
        (0usize..4).prop_map(|i| VarId::plain(VarKind::InputSymbol, i)),
        (0usize..4).prop_map(|i| VarId::plain(VarKind::TailCell, i)),
        (0u128..3, 0usize..4).prop_map(|(t, i)| VarId::tagged(VarKind::Midpoint, t, i)),
    ]
}

pub(crate) fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        any::<bool>().prop_map(Formula::constant),
        arb_var().prop_map(Formula::var),
    ];
    leaf.prop_recursive(8, 128, 4, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            prop::collection::vec(inner.clone(), 0..4).prop_map(Formula::and),
            prop::collection::vec(inner.clone(), 0..4).prop_map(Formula::or),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::equiv(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::xor(a, b)),
            (prop::collection::btree_set(arb_var(), 1..3), inner.clone(), any::<bool>()).prop_map(
                |(vs, body, universal)| {
                    let vs: Vec<_> = vs.into_iter().collect();
                    if universal {
                        Formula::forall(vs, body).unwrap()
                    } else {
                        Formula::exists(vs, body).unwrap()
                    }
                }
            ),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn render_parse_round_trip(f in arb_formula()) {
        let text = render(&f);
        prop_assert_eq!(parse(&text).unwrap(), f);
    }

    #[test]
    fn substitution_agrees_with_extension(f in arb_formula(), bits in any::<u64>()) {
        let free: Vec<_> = free_vars(&f).into_iter().collect();
        prop_assume!(free.len() <= 12);
        let mut env: HashMap<VarId, bool> =
            free.iter().enumerate().map(|(i, v)| (*v, bits >> i & 1 == 1)).collect();
        let half: HashMap<VarId, bool> = env.iter().take(free.len() / 2).map(|(k, v)| (*k, *v)).collect();
        let g = substitute(&f, &half);
        let (a, b) = (truth(&f, &mut env.clone()), truth(&g, &mut env));
        prop_assert_eq!(a, b);
    }
}
