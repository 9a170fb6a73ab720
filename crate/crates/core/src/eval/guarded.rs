//! Guarded evaluation over decision diagrams.
//!
//! Each subformula compiles to a diagram over its free variables. A
//! quantifier block `∀v (G → B)` whose premise contains conjuncts
//! `v ≡ e` (with `e` free of the block's other open variables) is
//! eliminated by substituting `e` for `v`; a premise disjunction whose
//! every branch pins the whole remaining block is split into one
//! substitution per branch. Whatever is left is quantified on the diagram.

use std::collections::HashMap;

use super::arena::{children, with_children, Arena, NodeId, Op, VarIx};
use super::bdd::{Bdd, FastMap, LevelSet, Manager, FALSE, TRUE};
use super::{EvalStats, ProbeTable};

pub(crate) struct Overflow;

type Pin = (VarIx, NodeId);

struct Plan {
    pins: Vec<Pin>,
    rest: Vec<NodeId>,
    remaining: Vec<VarIx>,
    /// Position in `rest` of the branching disjunction, with per-branch
    /// pins and leftover conjuncts.
    branch: Option<(usize, Vec<(Vec<Pin>, Vec<NodeId>)>)>,
}

pub(crate) struct Guarded<'a> {
    arena: &'a mut Arena,
    mgr: Manager,
    level: Vec<u32>,
    memo: FastMap<NodeId, Bdd>,
    mini_memo: HashMap<NodeId, NodeId>,
    probe: Option<&'a ProbeTable>,
    stats: EvalStats,
    depth: usize,
}

impl<'a> Guarded<'a> {
    pub(crate) fn new(arena: &'a mut Arena, level: Vec<u32>, probe: Option<&'a ProbeTable>, node_cap: usize) -> Guarded<'a> {
        let levels = level.len();
        Guarded {
            arena,
            mgr: Manager::new(levels, node_cap),
            level,
            memo: FastMap::default(),
            mini_memo: HashMap::new(),
            probe,
            stats: EvalStats::default(),
            depth: 0,
        }
    }

    pub(crate) fn finish(mut self) -> EvalStats {
        self.stats.bdd_nodes = self.mgr.node_count();
        self.stats
    }

    /// Truth of `root` once free variables take the given values.
    pub(crate) fn run(&mut self, root: NodeId, env: &[Option<bool>]) -> Result<bool, Overflow> {
        let bound = env.iter().filter(|b| b.is_some()).count();
        self.depth = bound;
        self.stats.peak_env = bound;
        let root = self.miniscope(root);
        let f = self.compile(root)?;
        let mut map = FastMap::default();
        for (v, b) in env.iter().enumerate() {
            if let Some(b) = b {
                map.insert(self.level[v], if *b { TRUE } else { FALSE });
            }
        }
        let r = self.mgr.compose(f, &map);
        self.check()?;
        debug_assert!(r == TRUE || r == FALSE);
        Ok(r == TRUE)
    }

    fn check(&self) -> Result<(), Overflow> {
        if self.mgr.overflowed() {
            Err(Overflow)
        } else {
            Ok(())
        }
    }

    // ---- scope narrowing ----

    fn miniscope(&mut self, n: NodeId) -> NodeId {
        if let Some(&m) = self.mini_memo.get(&n) {
            return m;
        }
        let op = self.arena.op(n).clone();
        let out = match op {
            Op::Forall(vs, b) => {
                let b = self.miniscope(b);
                self.quantify(true, &vs, b)
            }
            Op::Exists(vs, b) => {
                let b = self.miniscope(b);
                self.quantify(false, &vs, b)
            }
            op => {
                let kids: Vec<NodeId> = children(&op).into_iter().map(|k| self.miniscope(k)).collect();
                self.arena.intern(with_children(op, kids))
            }
        };
        self.mini_memo.insert(n, out);
        out
    }

    /// Rebuild `Q vs. body` with conjuncts and disjuncts that do not
    /// mention `vs` moved out of the quantifier.
    fn quantify(&mut self, universal: bool, vs: &[VarIx], body: NodeId) -> NodeId {
        let free = self.arena.free(body);
        let vs: Vec<VarIx> = vs.iter().copied().filter(|v| free.binary_search(v).is_ok()).collect();
        if vs.is_empty() {
            return body;
        }
        let op = self.arena.op(body).clone();
        match (universal, op) {
            (_, Op::Implies(p, c)) => {
                let mut parts = Vec::new();
                self.arena.conjuncts(p, &mut parts);
                let (outer, inner) = self.split(parts, &vs);
                if outer.is_empty() {
                    let op = if universal { Op::Forall(vs, body) } else { Op::Exists(vs, body) };
                    return self.arena.intern(op);
                }
                let inner_body = if inner.is_empty() {
                    c
                } else {
                    let ip = self.arena.and_of(inner);
                    self.arena.intern(Op::Implies(ip, c))
                };
                let q = self.quantify(universal, &vs, inner_body);
                let op = self.arena.and_of(outer);
                self.arena.intern(Op::Implies(op, q))
            }
            (true, Op::And(parts)) | (false, Op::Or(parts)) => {
                let qs = parts.into_iter().map(|p| self.quantify(universal, &vs, p)).collect();
                if universal {
                    self.arena.and_of(qs)
                } else {
                    self.arena.or_of(qs)
                }
            }
            (true, Op::Or(parts)) | (false, Op::And(parts)) => {
                let (mut outer, inner) = self.split(parts, &vs);
                if outer.is_empty() {
                    let op = if universal { Op::Forall(vs, body) } else { Op::Exists(vs, body) };
                    return self.arena.intern(op);
                }
                let inner = if universal { self.arena.or_of(inner) } else { self.arena.and_of(inner) };
                outer.push(self.quantify(universal, &vs, inner));
                if universal {
                    self.arena.or_of(outer)
                } else {
                    self.arena.and_of(outer)
                }
            }
            (u, _) => {
                let op = if u { Op::Forall(vs, body) } else { Op::Exists(vs, body) };
                self.arena.intern(op)
            }
        }
    }

    fn split(&mut self, parts: Vec<NodeId>, vs: &[VarIx]) -> (Vec<NodeId>, Vec<NodeId>) {
        let mut outer = Vec::new();
        let mut inner = Vec::new();
        for p in parts {
            if self.arena.mentions_any(p, vs) {
                inner.push(p);
            } else {
                outer.push(p);
            }
        }
        (outer, inner)
    }

    // ---- guard recognition ----

    fn as_pin(&mut self, atom: NodeId, open: &[VarIx]) -> Option<Pin> {
        match self.arena.op(atom).clone() {
            Op::Var(v) if open.contains(&v) => Some((v, self.arena.intern(Op::Const(true)))),
            Op::Not(a) => match *self.arena.op(a) {
                Op::Var(v) if open.contains(&v) => Some((v, self.arena.intern(Op::Const(false)))),
                _ => None,
            },
            Op::Equiv(a, b) => {
                for (x, e) in [(a, b), (b, a)] {
                    if let Op::Var(v) = *self.arena.op(x) {
                        if open.contains(&v) && !self.arena.mentions_any(e, open) {
                            return Some((v, e));
                        }
                    }
                }
                None
            }
            _ => None,
        }
    }

    /// Repeatedly take conjuncts that define an open variable.
    fn collect_pins(&mut self, atoms: &[NodeId], open: &mut Vec<VarIx>) -> (Vec<Pin>, Vec<NodeId>) {
        let mut used = vec![false; atoms.len()];
        let mut pins = Vec::new();
        loop {
            let mut progress = false;
            for (i, &a) in atoms.iter().enumerate() {
                if used[i] || open.is_empty() {
                    continue;
                }
                if let Some((v, e)) = self.as_pin(a, open) {
                    used[i] = true;
                    open.retain(|&o| o != v);
                    pins.push((v, e));
                    progress = true;
                }
            }
            if !progress {
                break;
            }
        }
        let rest = atoms.iter().zip(&used).filter(|(_, u)| !**u).map(|(a, _)| *a).collect();
        (pins, rest)
    }

    fn plan(&mut self, vs: &[VarIx], atoms: &[NodeId]) -> Plan {
        let mut open = vs.to_vec();
        let (pins, rest) = self.collect_pins(atoms, &mut open);
        let mut branch = None;
        if !open.is_empty() {
            for (i, &a) in rest.iter().enumerate() {
                let Op::Or(branches) = self.arena.op(a).clone() else { continue };
                let mut per = Vec::with_capacity(branches.len());
                let mut ok = true;
                for br in branches {
                    let mut parts = Vec::new();
                    self.arena.conjuncts(br, &mut parts);
                    let mut bopen = open.clone();
                    let (bpins, left) = self.collect_pins(&parts, &mut bopen);
                    if !bopen.is_empty() {
                        ok = false;
                        break;
                    }
                    per.push((bpins, left));
                }
                if ok {
                    branch = Some((i, per));
                    break;
                }
            }
        }
        Plan {
            pins,
            rest,
            remaining: open,
            branch,
        }
    }

    // ---- compilation ----

    fn compile(&mut self, n: NodeId) -> Result<Bdd, Overflow> {
        if let Some(&b) = self.memo.get(&n) {
            return Ok(b);
        }
        let r = match self.arena.op(n).clone() {
            Op::Const(b) => {
                if b {
                    TRUE
                } else {
                    FALSE
                }
            }
            Op::Var(v) => self.mgr.var(self.level[v as usize]),
            Op::Not(a) => {
                let a = self.compile(a)?;
                self.mgr.not(a)
            }
            Op::And(ps) => self.conjunction(&ps)?,
            Op::Or(ps) => {
                let mut acc = FALSE;
                for p in ps {
                    let b = self.compile(p)?;
                    acc = self.mgr.or(acc, b);
                    if acc == TRUE {
                        break;
                    }
                }
                acc
            }
            Op::Implies(a, b) => {
                let a = self.compile(a)?;
                if a == FALSE {
                    TRUE
                } else {
                    let b = self.compile(b)?;
                    self.mgr.implies(a, b)
                }
            }
            Op::Equiv(a, b) => {
                let (a, b) = (self.compile(a)?, self.compile(b)?);
                self.mgr.iff(a, b)
            }
            Op::Xor(a, b) => {
                let (a, b) = (self.compile(a)?, self.compile(b)?);
                self.mgr.xor(a, b)
            }
            Op::Forall(vs, b) => self.block(true, &vs, b)?,
            Op::Exists(vs, b) => self.block(false, &vs, b)?,
            Op::Probe(addr, code) => self.probe_relation(&addr, &code)?,
        };
        self.check()?;
        self.memo.insert(n, r);
        Ok(r)
    }

    fn conjunction(&mut self, ps: &[NodeId]) -> Result<Bdd, Overflow> {
        let mut acc = TRUE;
        for &p in ps {
            let b = self.compile(p)?;
            acc = self.mgr.and(acc, b);
            if acc == FALSE {
                break;
            }
        }
        Ok(acc)
    }

    fn resolve(&mut self, pins: &[Pin], map: &mut FastMap<u32, Bdd>) -> Result<(), Overflow> {
        for &(v, e) in pins {
            let b = self.compile(e)?;
            let b = self.mgr.compose(b, map);
            map.insert(self.level[v as usize], b);
        }
        self.check()
    }

    fn block(&mut self, universal: bool, vs: &[VarIx], body: NodeId) -> Result<Bdd, Overflow> {
        self.depth += vs.len();
        self.stats.peak_env = self.stats.peak_env.max(self.depth);
        let r = self.block_inner(universal, vs, body);
        self.depth -= vs.len();
        self.mgr.trim_caches(1 << 22);
        r
    }

    fn block_inner(&mut self, universal: bool, vs: &[VarIx], body: NodeId) -> Result<Bdd, Overflow> {
        // ∀: premise conjuncts and a conclusion; ∃: conjuncts only.
        let (atoms, concl) = match (universal, self.arena.op(body).clone()) {
            (true, Op::Implies(p, c)) => {
                let mut parts = Vec::new();
                self.arena.conjuncts(p, &mut parts);
                (parts, Some(c))
            }
            (true, _) => (Vec::new(), Some(body)),
            (false, _) => {
                let mut parts = Vec::new();
                self.arena.conjuncts(body, &mut parts);
                (parts, None)
            }
        };
        let plan = self.plan(vs, &atoms);
        if !plan.pins.is_empty() || plan.branch.is_some() {
            self.stats.guard_hits += 1;
        }
        let mut sigma = FastMap::default();
        self.resolve(&plan.pins, &mut sigma)?;

        if let Some((at, branches)) = plan.branch {
            let others: Vec<NodeId> = plan
                .rest
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != at)
                .map(|(_, n)| *n)
                .collect();
            let others = self.conjunction(&others)?;
            let base = match concl {
                Some(c) => {
                    let c = self.compile(c)?;
                    self.mgr.implies(others, c)
                }
                None => others,
            };
            self.stats.branch_count += branches.len() as u64;
            self.stats.branch_guards += 1;
            self.stats.guard_branches += branches.len() as u64;
            let mut acc = if universal { TRUE } else { FALSE };
            for (bpins, left) in branches {
                let mut map = sigma.clone();
                self.resolve(&bpins, &mut map)?;
                let left = self.conjunction(&left)?;
                let term = if universal {
                    self.mgr.implies(left, base)
                } else {
                    self.mgr.and(left, base)
                };
                let r = self.mgr.compose(term, &map);
                acc = if universal { self.mgr.and(acc, r) } else { self.mgr.or(acc, r) };
                self.check()?;
            }
            return Ok(acc);
        }

        self.stats.branch_count += 1;
        let rest = self.conjunction(&plan.rest)?;
        let rest = self.mgr.compose(rest, &sigma);
        let concl = match concl {
            Some(c) => {
                let c = self.compile(c)?;
                Some(self.mgr.compose(c, &sigma))
            }
            None => None,
        };
        if plan.remaining.is_empty() {
            return Ok(match concl {
                Some(c) => self.mgr.implies(rest, c),
                None => rest,
            });
        }
        let levels: Vec<u32> = plan.remaining.iter().map(|&v| self.level[v as usize]).collect();
        let set = LevelSet::new(&levels, self.mgr.levels());
        let r = match concl {
            Some(c) => {
                let nc = self.mgr.not(c);
                let e = self.mgr.and_exists(rest, nc, &set);
                self.mgr.not(e)
            }
            None => self.mgr.exists(rest, &set),
        };
        self.check()?;
        Ok(r)
    }

    fn probe_relation(&mut self, addr: &[VarIx], code: &[VarIx]) -> Result<Bdd, Overflow> {
        let table = self.probe.expect("probe nodes only exist with a probe");
        let mut acc = FALSE;
        for a in 0..1u64 << addr.len() {
            for c in 0..1u64 << code.len() {
                if !table.holds(a, c) {
                    continue;
                }
                let mut term = TRUE;
                for (bits, value) in [(addr, a), (code, c)] {
                    let w = bits.len();
                    for (i, &v) in bits.iter().enumerate() {
                        let x = self.mgr.var(self.level[v as usize]);
                        let lit = if value >> (w - 1 - i) & 1 == 1 { x } else { self.mgr.not(x) };
                        term = self.mgr.and(term, lit);
                    }
                }
                acc = self.mgr.or(acc, term);
            }
        }
        self.check()?;
        Ok(acc)
    }
}
