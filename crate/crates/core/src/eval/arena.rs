//! Hash-consed formula graph with dense variable indices.

use std::collections::HashMap;
use std::rc::Rc;

use crate::formula::{Formula, Node, VarId, VarKind};

pub(crate) type NodeId = u32;
pub(crate) type VarIx = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Op {
    Const(bool),
    Var(VarIx),
    Not(NodeId),
    And(Vec<NodeId>),
    Or(Vec<NodeId>),
    Implies(NodeId, NodeId),
    Equiv(NodeId, NodeId),
    Xor(NodeId, NodeId),
    Forall(Vec<VarIx>, NodeId),
    Exists(Vec<VarIx>, NodeId),
    /// Input-tape lookup over the listed address and code variables.
    Probe(Rc<[VarIx]>, Rc<[VarIx]>),
}

pub(crate) struct Arena {
    ops: Vec<Op>,
    interned: HashMap<Op, NodeId>,
    vars: Vec<VarId>,
    var_index: HashMap<VarId, VarIx>,
    free: Vec<Option<Rc<[VarIx]>>>,
}

impl Arena {
    pub(crate) fn new() -> Arena {
        Arena {
            ops: Vec::new(),
            interned: HashMap::new(),
            vars: Vec::new(),
            var_index: HashMap::new(),
            free: Vec::new(),
        }
    }

    pub(crate) fn op(&self, n: NodeId) -> &Op {
        &self.ops[n as usize]
    }

    pub(crate) fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub(crate) fn var_ix(&self, v: &VarId) -> Option<VarIx> {
        self.var_index.get(v).copied()
    }

    pub(crate) fn var_of(&mut self, v: VarId) -> VarIx {
        if let Some(&i) = self.var_index.get(&v) {
            return i;
        }
        let i = self.vars.len() as VarIx;
        self.vars.push(v);
        self.var_index.insert(v, i);
        i
    }

    pub(crate) fn intern(&mut self, op: Op) -> NodeId {
        if let Some(&n) = self.interned.get(&op) {
            return n;
        }
        let n = self.ops.len() as NodeId;
        self.ops.push(op.clone());
        self.free.push(None);
        self.interned.insert(op, n);
        n
    }

    pub(crate) fn add_formula(&mut self, f: &Formula) -> NodeId {
        let mut memo = HashMap::new();
        self.add_rec(f, &mut memo)
    }

    fn add_rec(&mut self, f: &Formula, memo: &mut HashMap<usize, NodeId>) -> NodeId {
        if let Some(&n) = memo.get(&f.id()) {
            return n;
        }
        let op = match f.node() {
            Node::Const(b) => Op::Const(*b),
            Node::Var(v) => Op::Var(self.var_of(*v)),
            Node::Not(a) => Op::Not(self.add_rec(a, memo)),
            Node::And(parts) => Op::And(parts.iter().map(|p| self.add_rec(p, memo)).collect()),
            Node::Or(parts) => Op::Or(parts.iter().map(|p| self.add_rec(p, memo)).collect()),
            Node::Implies(a, b) => Op::Implies(self.add_rec(a, memo), self.add_rec(b, memo)),
            Node::Equiv(a, b) => Op::Equiv(self.add_rec(a, memo), self.add_rec(b, memo)),
            Node::Xor(a, b) => Op::Xor(self.add_rec(a, memo), self.add_rec(b, memo)),
            Node::Forall(vs, b) => {
                let vs = vs.iter().map(|v| self.var_of(*v)).collect();
                Op::Forall(vs, self.add_rec(b, memo))
            }
            Node::Exists(vs, b) => {
                let vs = vs.iter().map(|v| self.var_of(*v)).collect();
                Op::Exists(vs, self.add_rec(b, memo))
            }
        };
        let n = self.intern(op);
        memo.insert(f.id(), n);
        n
    }

    /// Sorted free variables of a node.
    pub(crate) fn free(&mut self, n: NodeId) -> Rc<[VarIx]> {
        if let Some(f) = &self.free[n as usize] {
            return f.clone();
        }
        let out: Vec<VarIx> = match self.ops[n as usize].clone() {
            Op::Const(_) => Vec::new(),
            Op::Var(v) => vec![v],
            Op::Not(a) => self.free(a).to_vec(),
            Op::And(ps) | Op::Or(ps) => {
                let mut all = Vec::new();
                for p in ps {
                    all.extend_from_slice(&self.free(p));
                }
                all.sort_unstable();
                all.dedup();
                all
            }
            Op::Implies(a, b) | Op::Equiv(a, b) | Op::Xor(a, b) => {
                let mut all = self.free(a).to_vec();
                all.extend_from_slice(&self.free(b));
                all.sort_unstable();
                all.dedup();
                all
            }
            Op::Forall(vs, b) | Op::Exists(vs, b) => {
                let inner = self.free(b);
                inner.iter().copied().filter(|v| !vs.contains(v)).collect()
            }
            Op::Probe(a, c) => {
                let mut all: Vec<VarIx> = a.iter().chain(c.iter()).copied().collect();
                all.sort_unstable();
                all.dedup();
                all
            }
        };
        let rc: Rc<[VarIx]> = out.into();
        self.free[n as usize] = Some(rc.clone());
        rc
    }

    pub(crate) fn mentions_any(&mut self, n: NodeId, vs: &[VarIx]) -> bool {
        let f = self.free(n);
        vs.iter().any(|v| f.binary_search(v).is_ok())
    }

    /// Conjuncts of `n`, with nested conjunctions flattened.
    pub(crate) fn conjuncts(&self, n: NodeId, out: &mut Vec<NodeId>) {
        match &self.ops[n as usize] {
            Op::And(ps) => {
                for &p in ps {
                    self.conjuncts(p, out);
                }
            }
            Op::Const(true) => {}
            _ => out.push(n),
        }
    }

    pub(crate) fn and_of(&mut self, mut parts: Vec<NodeId>) -> NodeId {
        match parts.len() {
            0 => self.intern(Op::Const(true)),
            1 => parts.pop().unwrap(),
            _ => self.intern(Op::And(parts)),
        }
    }

    pub(crate) fn or_of(&mut self, mut parts: Vec<NodeId>) -> NodeId {
        match parts.len() {
            0 => self.intern(Op::Const(false)),
            1 => parts.pop().unwrap(),
            _ => self.intern(Op::Or(parts)),
        }
    }

    /// Wrap the outermost quantifier block that binds input-tape variables
    /// so that its body only counts assignments accepted by the probe:
    /// `∀v (probe → body)`, `∃v (probe ∧ body)`.
    pub(crate) fn restrict_to_probe(
        &mut self,
        root: NodeId,
        address: &[VarId],
        code: &[VarId],
    ) -> Result<NodeId, String> {
        let is_input = |v: &VarId| matches!(v.kind(), VarKind::InputCell | VarKind::InputSymbol);
        let present: Vec<VarIx> = (0..self.vars.len() as VarIx)
            .filter(|&i| is_input(&self.vars[i as usize]))
            .collect();
        if present.is_empty() {
            return Ok(root);
        }
        let block = self.find_input_block(root, &present);
        let Some(path) = block else {
            return Err("no single quantifier block binds every input-tape variable".into());
        };
        let a: Rc<[VarIx]> = address.iter().map(|v| self.var_of(*v)).collect::<Vec<_>>().into();
        let c: Rc<[VarIx]> = code.iter().map(|v| self.var_of(*v)).collect::<Vec<_>>().into();
        if present.iter().any(|p| !a.contains(p) && !c.contains(p)) {
            return Err("formula uses input-tape bits the probe does not cover".into());
        }
        let probe = self.intern(Op::Probe(a, c));
        Ok(self.rebuild_along(root, &path, probe))
    }

    /// Path of child positions from `n` to the first quantifier node whose
    /// block contains all of `present`.
    fn find_input_block(&mut self, n: NodeId, present: &[VarIx]) -> Option<Vec<usize>> {
        if !self.mentions_any(n, present) && !self.binds_any(n, present) {
            return None;
        }
        match self.ops[n as usize].clone() {
            Op::Forall(vs, _) | Op::Exists(vs, _) if present.iter().all(|p| vs.contains(p)) => Some(Vec::new()),
            Op::Forall(vs, _) | Op::Exists(vs, _) if present.iter().any(|p| vs.contains(p)) => None,
            op => {
                let kids = children(&op);
                for (i, k) in kids.into_iter().enumerate() {
                    if let Some(mut p) = self.find_input_block(k, present) {
                        p.insert(0, i);
                        return Some(p);
                    }
                }
                None
            }
        }
    }

    fn binds_any(&self, n: NodeId, present: &[VarIx]) -> bool {
        match &self.ops[n as usize] {
            Op::Forall(vs, b) | Op::Exists(vs, b) => {
                vs.iter().any(|v| present.contains(v)) || self.binds_any(*b, present)
            }
            op => children(op).into_iter().any(|k| self.binds_any(k, present)),
        }
    }

    fn rebuild_along(&mut self, n: NodeId, path: &[usize], probe: NodeId) -> NodeId {
        let op = self.ops[n as usize].clone();
        if path.is_empty() {
            let op = match op {
                Op::Forall(vs, b) => Op::Forall(vs, self.intern(Op::Implies(probe, b))),
                Op::Exists(vs, b) => Op::Exists(vs, self.intern(Op::And(vec![probe, b]))),
                _ => unreachable!("path ends at a quantifier"),
            };
            return self.intern(op);
        }
        let mut kids = children(&op);
        kids[path[0]] = self.rebuild_along(kids[path[0]], &path[1..], probe);
        let op = with_children(op, kids);
        self.intern(op)
    }
}

pub(crate) fn children(op: &Op) -> Vec<NodeId> {
    match op {
        Op::Const(_) | Op::Var(_) | Op::Probe(..) => Vec::new(),
        Op::Not(a) => vec![*a],
        Op::And(ps) | Op::Or(ps) => ps.clone(),
        Op::Implies(a, b) | Op::Equiv(a, b) | Op::Xor(a, b) => vec![*a, *b],
        Op::Forall(_, b) | Op::Exists(_, b) => vec![*b],
    }
}

pub(crate) fn with_children(op: Op, kids: Vec<NodeId>) -> Op {
    match op {
        Op::Const(_) | Op::Var(_) | Op::Probe(..) => op,
        Op::Not(_) => Op::Not(kids[0]),
        Op::And(_) => Op::And(kids),
        Op::Or(_) => Op::Or(kids),
        Op::Implies(..) => Op::Implies(kids[0], kids[1]),
        Op::Equiv(..) => Op::Equiv(kids[0], kids[1]),
        Op::Xor(..) => Op::Xor(kids[0], kids[1]),
        Op::Forall(vs, _) => Op::Forall(vs, kids[0]),
        Op::Exists(vs, _) => Op::Exists(vs, kids[0]),
    }
}
