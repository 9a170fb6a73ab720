//! Exhaustive evaluation: every quantifier block tries all assignments of
//! its variables, connectives short-circuit left to right.

use super::arena::{Arena, NodeId, Op, VarIx};
use super::{EvalStats, ProbeTable};

pub(crate) struct Naive<'a> {
    arena: &'a Arena,
    probe: Option<&'a ProbeTable>,
    env: Vec<Option<bool>>,
    bound: usize,
    stats: EvalStats,
}

impl<'a> Naive<'a> {
    pub(crate) fn new(arena: &'a Arena, probe: Option<&'a ProbeTable>, env: Vec<Option<bool>>) -> Naive<'a> {
        let bound = env.iter().filter(|b| b.is_some()).count();
        let stats = EvalStats {
            peak_env: bound,
            ..EvalStats::default()
        };
        Naive {
            arena,
            probe,
            env,
            bound,
            stats,
        }
    }

    pub(crate) fn finish(self) -> EvalStats {
        self.stats
    }

    pub(crate) fn eval(&mut self, n: NodeId) -> Result<bool, VarIx> {
        Ok(match self.arena.op(n) {
            Op::Const(b) => *b,
            Op::Var(v) => self.env[*v as usize].ok_or(*v)?,
            Op::Not(a) => !self.eval(*a)?,
            Op::And(ps) => {
                for &p in ps {
                    if !self.eval(p)? {
                        return Ok(false);
                    }
                }
                true
            }
            Op::Or(ps) => {
                for &p in ps {
                    if self.eval(p)? {
                        return Ok(true);
                    }
                }
                false
            }
            Op::Implies(a, b) => !self.eval(*a)? || self.eval(*b)?,
            Op::Equiv(a, b) => self.eval(*a)? == self.eval(*b)?,
            Op::Xor(a, b) => self.eval(*a)? != self.eval(*b)?,
            Op::Forall(vs, b) => self.block(vs, *b, true)?,
            Op::Exists(vs, b) => self.block(vs, *b, false)?,
            Op::Probe(addr, code) => {
                let table = self.probe.expect("probe nodes only exist with a probe");
                let a = self.read(addr)?;
                let c = self.read(code)?;
                table.holds(a, c)
            }
        })
    }

    fn read(&self, bits: &[VarIx]) -> Result<u64, VarIx> {
        let mut value = 0u64;
        for &v in bits {
            value = value << 1 | self.env[v as usize].ok_or(v)? as u64;
        }
        Ok(value)
    }

    fn block(&mut self, vs: &[VarIx], body: NodeId, universal: bool) -> Result<bool, VarIx> {
        let saved: Vec<Option<bool>> = vs.iter().map(|&v| self.env[v as usize]).collect();
        let newly = saved.iter().filter(|s| s.is_none()).count();
        self.bound += newly;
        self.stats.peak_env = self.stats.peak_env.max(self.bound);
        let k = vs.len();
        let mut result = universal;
        for mask in 0u64..1u64 << k {
            for (i, &v) in vs.iter().enumerate() {
                self.env[v as usize] = Some(mask >> (k - 1 - i) & 1 == 1);
            }
            self.stats.branch_count += 1;
            let r = self.eval(body)?;
            if r != universal {
                result = r;
                break;
            }
        }
        for (&v, s) in vs.iter().zip(saved) {
            self.env[v as usize] = s;
        }
        self.bound -= newly;
        Ok(result)
    }
}
