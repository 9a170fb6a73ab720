//! Reduced ordered binary decision diagrams with a hard node budget.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

/// Multiplicative hasher for small integer keys.
#[derive(Default, Clone, Copy)]
pub(crate) struct IntHasher(u64);

impl Hasher for IntHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(b as u64);
        }
    }
    fn write_u8(&mut self, i: u8) {
        self.write_u64(i as u64);
    }
    fn write_u32(&mut self, i: u32) {
        self.write_u64(i as u64);
    }
    fn write_u64(&mut self, i: u64) {
        self.0 = (self.0.rotate_left(5) ^ i).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
    }
    fn write_usize(&mut self, i: usize) {
        self.write_u64(i as u64);
    }
}

pub(crate) type FastMap<K, V> = HashMap<K, V, BuildHasherDefault<IntHasher>>;

pub(crate) type Bdd = u32;
pub(crate) const FALSE: Bdd = 0;
pub(crate) const TRUE: Bdd = 1;
const TERMINAL_LEVEL: u32 = u32::MAX;

#[derive(Clone, Copy)]
struct Node {
    level: u32,
    lo: Bdd,
    hi: Bdd,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    And,
    Or,
    Xor,
}

/// A set of levels, for quantification.
pub(crate) struct LevelSet {
    member: Vec<bool>,
    max: u32,
}

impl LevelSet {
    pub(crate) fn new(levels: &[u32], total: usize) -> LevelSet {
        let mut member = vec![false; total];
        let mut max = 0;
        for &l in levels {
            member[l as usize] = true;
            max = max.max(l);
        }
        LevelSet { member, max }
    }

    fn contains(&self, level: u32) -> bool {
        (level as usize) < self.member.len() && self.member[level as usize]
    }
}

pub(crate) struct Manager {
    nodes: Vec<Node>,
    unique: FastMap<(u32, Bdd, Bdd), Bdd>,
    apply_cache: FastMap<(Op, Bdd, Bdd), Bdd>,
    not_cache: FastMap<Bdd, Bdd>,
    cap: usize,
    overflow: bool,
    levels: usize,
}

impl Manager {
    pub(crate) fn new(levels: usize, cap: usize) -> Manager {
        let terminal = Node {
            level: TERMINAL_LEVEL,
            lo: 0,
            hi: 0,
        };
        Manager {
            nodes: vec![terminal, terminal],
            unique: FastMap::default(),
            apply_cache: FastMap::default(),
            not_cache: FastMap::default(),
            cap,
            overflow: false,
            levels,
        }
    }

    pub(crate) fn overflowed(&self) -> bool {
        self.overflow
    }

    pub(crate) fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub(crate) fn levels(&self) -> usize {
        self.levels
    }

    fn level(&self, f: Bdd) -> u32 {
        self.nodes[f as usize].level
    }

    fn mk(&mut self, level: u32, lo: Bdd, hi: Bdd) -> Bdd {
        if lo == hi {
            return lo;
        }
        if let Some(&n) = self.unique.get(&(level, lo, hi)) {
            return n;
        }
        if self.nodes.len() >= self.cap {
            self.overflow = true;
            return FALSE;
        }
        let id = self.nodes.len() as Bdd;
        self.nodes.push(Node { level, lo, hi });
        self.unique.insert((level, lo, hi), id);
        id
    }

    pub(crate) fn var(&mut self, level: u32) -> Bdd {
        self.mk(level, FALSE, TRUE)
    }

    fn cofactors(&self, f: Bdd, level: u32) -> (Bdd, Bdd) {
        let n = self.nodes[f as usize];
        if n.level == level {
            (n.lo, n.hi)
        } else {
            (f, f)
        }
    }

    pub(crate) fn not(&mut self, f: Bdd) -> Bdd {
        if f <= TRUE {
            return f ^ 1;
        }
        if let Some(&r) = self.not_cache.get(&f) {
            return r;
        }
        if self.overflow {
            return FALSE;
        }
        let n = self.nodes[f as usize];
        let lo = self.not(n.lo);
        let hi = self.not(n.hi);
        let r = self.mk(n.level, lo, hi);
        self.not_cache.insert(f, r);
        r
    }

    fn apply(&mut self, op: Op, f: Bdd, g: Bdd) -> Bdd {
        match op {
            Op::And => {
                if f == FALSE || g == FALSE {
                    return FALSE;
                }
                if f == TRUE {
                    return g;
                }
                if g == TRUE || f == g {
                    return f;
                }
            }
            Op::Or => {
                if f == TRUE || g == TRUE {
                    return TRUE;
                }
                if f == FALSE {
                    return g;
                }
                if g == FALSE || f == g {
                    return f;
                }
            }
            Op::Xor => {
                if f == g {
                    return FALSE;
                }
                if f == FALSE {
                    return g;
                }
                if g == FALSE {
                    return f;
                }
                if f == TRUE {
                    return self.not(g);
                }
                if g == TRUE {
                    return self.not(f);
                }
            }
        }
        let (f, g) = if f < g { (f, g) } else { (g, f) };
        if let Some(&r) = self.apply_cache.get(&(op, f, g)) {
            return r;
        }
        if self.overflow {
            return FALSE;
        }
        let level = self.level(f).min(self.level(g));
        let (f0, f1) = self.cofactors(f, level);
        let (g0, g1) = self.cofactors(g, level);
        let lo = self.apply(op, f0, g0);
        let hi = self.apply(op, f1, g1);
        let r = self.mk(level, lo, hi);
        self.apply_cache.insert((op, f, g), r);
        r
    }

    pub(crate) fn and(&mut self, f: Bdd, g: Bdd) -> Bdd {
        self.apply(Op::And, f, g)
    }

    pub(crate) fn or(&mut self, f: Bdd, g: Bdd) -> Bdd {
        self.apply(Op::Or, f, g)
    }

    pub(crate) fn xor(&mut self, f: Bdd, g: Bdd) -> Bdd {
        self.apply(Op::Xor, f, g)
    }

    pub(crate) fn iff(&mut self, f: Bdd, g: Bdd) -> Bdd {
        let x = self.xor(f, g);
        self.not(x)
    }

    pub(crate) fn implies(&mut self, f: Bdd, g: Bdd) -> Bdd {
        let nf = self.not(f);
        self.or(nf, g)
    }

    pub(crate) fn ite(&mut self, c: Bdd, t: Bdd, e: Bdd) -> Bdd {
        let a = self.and(c, t);
        let nc = self.not(c);
        let b = self.and(nc, e);
        self.or(a, b)
    }

    pub(crate) fn exists(&mut self, f: Bdd, set: &LevelSet) -> Bdd {
        let mut cache = FastMap::default();
        self.exists_rec(f, set, &mut cache)
    }

    fn exists_rec(&mut self, f: Bdd, set: &LevelSet, cache: &mut FastMap<Bdd, Bdd>) -> Bdd {
        if f <= TRUE || self.level(f) > set.max {
            return f;
        }
        if let Some(&r) = cache.get(&f) {
            return r;
        }
        if self.overflow {
            return FALSE;
        }
        let n = self.nodes[f as usize];
        let lo = self.exists_rec(n.lo, set, cache);
        let r = if set.contains(n.level) {
            if lo == TRUE {
                TRUE
            } else {
                let hi = self.exists_rec(n.hi, set, cache);
                self.or(lo, hi)
            }
        } else {
            let hi = self.exists_rec(n.hi, set, cache);
            self.mk(n.level, lo, hi)
        };
        cache.insert(f, r);
        r
    }

    #[cfg(test)]
    pub(crate) fn forall(&mut self, f: Bdd, set: &LevelSet) -> Bdd {
        let nf = self.not(f);
        let e = self.exists(nf, set);
        self.not(e)
    }

    /// `∃set (f ∧ g)` without building the conjunction first.
    pub(crate) fn and_exists(&mut self, f: Bdd, g: Bdd, set: &LevelSet) -> Bdd {
        let mut cache = FastMap::default();
        self.and_exists_rec(f, g, set, &mut cache)
    }

    fn and_exists_rec(&mut self, f: Bdd, g: Bdd, set: &LevelSet, cache: &mut FastMap<(Bdd, Bdd), Bdd>) -> Bdd {
        if f == FALSE || g == FALSE {
            return FALSE;
        }
        if f == TRUE && g == TRUE {
            return TRUE;
        }
        if f == TRUE || f == g {
            return self.exists(g, set);
        }
        if g == TRUE {
            return self.exists(f, set);
        }
        let (f, g) = if f < g { (f, g) } else { (g, f) };
        let level = self.level(f).min(self.level(g));
        if level > set.max {
            return self.and(f, g);
        }
        if let Some(&r) = cache.get(&(f, g)) {
            return r;
        }
        if self.overflow {
            return FALSE;
        }
        let (f0, f1) = self.cofactors(f, level);
        let (g0, g1) = self.cofactors(g, level);
        let lo = self.and_exists_rec(f0, g0, set, cache);
        let r = if set.contains(level) {
            if lo == TRUE {
                TRUE
            } else {
                let hi = self.and_exists_rec(f1, g1, set, cache);
                self.or(lo, hi)
            }
        } else {
            let hi = self.and_exists_rec(f1, g1, set, cache);
            self.mk(level, lo, hi)
        };
        cache.insert((f, g), r);
        r
    }

    /// Simultaneous substitution of functions for levels.
    pub(crate) fn compose(&mut self, f: Bdd, map: &FastMap<u32, Bdd>) -> Bdd {
        if map.is_empty() {
            return f;
        }
        let max = *map.keys().max().unwrap();
        let mut cache = FastMap::default();
        self.compose_rec(f, map, max, &mut cache)
    }

    fn compose_rec(&mut self, f: Bdd, map: &FastMap<u32, Bdd>, max: u32, cache: &mut FastMap<Bdd, Bdd>) -> Bdd {
        if f <= TRUE || self.level(f) > max {
            return f;
        }
        if let Some(&r) = cache.get(&f) {
            return r;
        }
        if self.overflow {
            return FALSE;
        }
        let n = self.nodes[f as usize];
        let lo = self.compose_rec(n.lo, map, max, cache);
        let hi = self.compose_rec(n.hi, map, max, cache);
        let r = match map.get(&n.level) {
            Some(&g) => self.ite(g, hi, lo),
            None => {
                let v = self.var(n.level);
                self.ite(v, hi, lo)
            }
        };
        cache.insert(f, r);
        r
    }

    /// Truth value under a total assignment of levels.
    #[cfg(test)]
    pub(crate) fn eval(&self, mut f: Bdd, value: impl Fn(u32) -> bool) -> bool {
        while f > TRUE {
            let n = self.nodes[f as usize];
            f = if value(n.level) { n.hi } else { n.lo };
        }
        f == TRUE
    }

    /// Drop operation caches when they grow past `limit` entries.
    pub(crate) fn trim_caches(&mut self, limit: usize) {
        if self.apply_cache.len() > limit {
            self.apply_cache.clear();
        }
        if self.not_cache.len() > limit {
            self.not_cache.clear();
        }
    }
}
