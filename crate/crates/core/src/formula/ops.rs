use std::collections::{BTreeSet, HashMap, HashSet};

use super::{Formula, FormulaError, Node, VarId};

fn digits(mut v: u128) -> u64 {
    let mut n = 1;
    while v >= 10 {
        v /= 10;
        n += 1;
    }
    n
}

pub(crate) fn var_length(v: &VarId) -> u64 {
    let letters = v.kind().letter().len() as u64;
    let pos = digits(v.pos() as u128) + 2;
    match v.tag() {
        Some(t) => letters + digits(t) + 2 + pos,
        None => letters + pos,
    }
}

/// Number of non-whitespace characters of the canonical rendering, except
/// that each constant counts 4 (the length of `x&~x`-style expansions).
pub fn natural_length(f: &Formula) -> u64 {
    fn go(f: &Formula, memo: &mut HashMap<usize, u64>) -> u64 {
        if let Some(&n) = memo.get(&f.id()) {
            return n;
        }
        let n = match f.node() {
            Node::Const(_) => 4,
            Node::Var(v) => var_length(v),
            Node::Not(a) => 3 + go(a, memo),
            Node::And(parts) | Node::Or(parts) => 3 + parts.iter().map(|p| go(p, memo)).sum::<u64>(),
            Node::Implies(a, b) | Node::Equiv(a, b) | Node::Xor(a, b) => 3 + go(a, memo) + go(b, memo),
            Node::Forall(vs, body) | Node::Exists(vs, body) => {
                5 + vs.iter().map(var_length).sum::<u64>() + go(body, memo)
            }
        };
        memo.insert(f.id(), n);
        n
    }
    go(f, &mut HashMap::new())
}

pub fn free_vars(f: &Formula) -> BTreeSet<VarId> {
    fn go(f: &Formula, bound: &mut Vec<VarId>, out: &mut BTreeSet<VarId>, seen: &mut HashSet<usize>) {
        // A subterm reached again under an empty binder stack adds nothing new.
        if bound.is_empty() && !seen.insert(f.id()) {
            return;
        }
        match f.node() {
            Node::Const(_) => {}
            Node::Var(v) => {
                if !bound.contains(v) {
                    out.insert(*v);
                }
            }
            Node::Not(a) => go(a, bound, out, seen),
            Node::And(parts) | Node::Or(parts) => {
                for p in parts {
                    go(p, bound, out, seen);
                }
            }
            Node::Implies(a, b) | Node::Equiv(a, b) | Node::Xor(a, b) => {
                go(a, bound, out, seen);
                go(b, bound, out, seen);
            }
            Node::Forall(vs, body) | Node::Exists(vs, body) => {
                let depth = bound.len();
                bound.extend_from_slice(vs);
                go(body, bound, out, seen);
                bound.truncate(depth);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(f, &mut Vec::new(), &mut out, &mut HashSet::new());
    out
}

/// Replace free occurrences of the bound-to variables by constants.
/// Variables rebound by an inner quantifier are left alone below it.
pub fn substitute(f: &Formula, binding: &HashMap<VarId, bool>) -> Formula {
    let terms: HashMap<VarId, Formula> = binding
        .iter()
        .map(|(v, b)| (*v, Formula::constant(*b)))
        .collect();
    substitute_terms(f, &terms).expect("constants cannot be captured")
}

/// Replace free occurrences of variables by formulas. Fails with
/// `CapturedVariable` when a replacement would fall under a quantifier that
/// binds one of its free variables.
pub fn substitute_terms(
    f: &Formula,
    binding: &HashMap<VarId, Formula>,
) -> Result<Formula, FormulaError> {
    let term_vars: HashMap<VarId, BTreeSet<VarId>> =
        binding.iter().map(|(v, t)| (*v, free_vars(t))).collect();

    fn go(
        f: &Formula,
        binding: &HashMap<VarId, Formula>,
        term_vars: &HashMap<VarId, BTreeSet<VarId>>,
        shadowed: &mut Vec<VarId>,
        binders: &mut Vec<VarId>,
    ) -> Result<Formula, FormulaError> {
        let map_all = |parts: &[Formula],
                       shadowed: &mut Vec<VarId>,
                       binders: &mut Vec<VarId>|
         -> Result<Vec<Formula>, FormulaError> {
            parts
                .iter()
                .map(|p| go(p, binding, term_vars, shadowed, binders))
                .collect()
        };
        Ok(match f.node() {
            Node::Const(_) => f.clone(),
            Node::Var(v) => match binding.get(v) {
                Some(t) if !shadowed.contains(v) => {
                    if let Some(c) = term_vars[v].iter().find(|c| binders.contains(c)) {
                        return Err(FormulaError::CapturedVariable(*c));
                    }
                    t.clone()
                }
                _ => f.clone(),
            },
            Node::Not(a) => Formula::not(go(a, binding, term_vars, shadowed, binders)?),
            Node::And(parts) => Formula::and(map_all(parts, shadowed, binders)?),
            Node::Or(parts) => Formula::or(map_all(parts, shadowed, binders)?),
            Node::Implies(a, b) => Formula::implies(
                go(a, binding, term_vars, shadowed, binders)?,
                go(b, binding, term_vars, shadowed, binders)?,
            ),
            Node::Equiv(a, b) => Formula::equiv(
                go(a, binding, term_vars, shadowed, binders)?,
                go(b, binding, term_vars, shadowed, binders)?,
            ),
            Node::Xor(a, b) => Formula::xor(
                go(a, binding, term_vars, shadowed, binders)?,
                go(b, binding, term_vars, shadowed, binders)?,
            ),
            Node::Forall(vs, body) | Node::Exists(vs, body) => {
                let (sd, bd) = (shadowed.len(), binders.len());
                shadowed.extend(vs.iter().filter(|v| binding.contains_key(v)));
                binders.extend_from_slice(vs);
                let inner = go(body, binding, term_vars, shadowed, binders);
                shadowed.truncate(sd);
                binders.truncate(bd);
                let inner = inner?;
                match f.node() {
                    Node::Forall(..) => Formula::forall(vs.clone(), inner)?,
                    _ => Formula::exists(vs.clone(), inner)?,
                }
            }
        })
    }
    go(f, binding, &term_vars, &mut Vec::new(), &mut Vec::new())
}
