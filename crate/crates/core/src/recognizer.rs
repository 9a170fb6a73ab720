//! Membership by formula evaluation: for inputs of length `n` and a machine
//! that halts within `n^d` steps, build the input-free sentence once with
//! `m = d⌈log n⌉` and evaluate it against each input through the tape
//! probe.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;
use thiserror::Error;

use crate::encoder::{delta_conditional, make_params_shared, variable_order, EncoderError, EncodingParams};
use crate::eval::{make_input_oracle, EvalError, EvalOptions, EvalStats, Evaluator, GuardedEvaluator};
use crate::formula::{Formula, VarId};
use crate::growth::clog2;
use crate::machine::{serialize_program, simulate, MachineError, MachineProgram, Outcome, Symbol, BLANK, START};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn from_bool(accepted: bool) -> Verdict {
        if accepted {
            Verdict::Accept
        } else {
            Verdict::Reject
        }
    }

    pub fn accepted(self) -> bool {
        self == Verdict::Accept
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecognizerError {
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("input has length {got}, the compiled sentence expects {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("symbol {0} cannot appear in an input")]
    InvalidInputSymbol(usize),
    #[error("formula says {formula:?} but simulation says {oracle:?}")]
    CrossCheckMismatch { formula: Verdict, oracle: Verdict },
    #[error(transparent)]
    Encoder(#[from] EncoderError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecognizerReport {
    pub verdict: Verdict,
    pub m_used: usize,
    pub formula_length: u64,
    pub eval_stats: EvalStats,
    pub oracle_verdict: Option<Verdict>,
}

/// Cache key: program fingerprint, input length, degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub program_hash: u64,
    pub n: usize,
    pub d: usize,
}

/// An input-free sentence compiled for one key.
#[derive(Debug)]
pub struct CompiledDelta {
    pub key: CacheKey,
    pub params: EncodingParams,
    pub formula: Formula,
    pub length: u64,
    pub order: Vec<VarId>,
}

pub fn program_hash(program: &MachineProgram) -> u64 {
    let mut h = DefaultHasher::new();
    serialize_program(program).hash(&mut h);
    program.alphabet().names().hash(&mut h);
    program.state_count().hash(&mut h);
    h.finish()
}

/// `d⌈log n⌉`.
pub fn exponent_for(n: usize, d: usize) -> usize {
    d * clog2(n as u64) as usize
}

/// `n^d`, saturating.
pub fn step_budget(n: usize, d: usize) -> u64 {
    (n as u64).saturating_pow(d.min(u32::MAX as usize) as u32)
}

type Slot = Arc<OnceLock<Result<Arc<CompiledDelta>, RecognizerError>>>;

pub struct Recognizer {
    evaluator: Arc<dyn Evaluator>,
    options: EvalOptions,
    cache: Mutex<HashMap<CacheKey, Slot>>,
    compiles: AtomicUsize,
}

impl Default for Recognizer {
    fn default() -> Recognizer {
        Recognizer::new(Arc::new(GuardedEvaluator), EvalOptions::default())
    }
}

impl Recognizer {
    pub fn new(evaluator: Arc<dyn Evaluator>, options: EvalOptions) -> Recognizer {
        Recognizer {
            evaluator,
            options,
            cache: Mutex::new(HashMap::new()),
            compiles: AtomicUsize::new(0),
        }
    }

    /// Number of sentences built so far.
    pub fn compile_count(&self) -> usize {
        self.compiles.load(Ordering::SeqCst)
    }

    /// The compiled sentence for `(program, n, d)`, built on first use.
    pub fn reuse_compiled(&self, program: &MachineProgram, d: usize, n: usize) -> Result<Arc<CompiledDelta>, RecognizerError> {
        if d == 0 {
            return Err(RecognizerError::ZeroDegree);
        }
        let key = CacheKey {
            program_hash: program_hash(program),
            n,
            d,
        };
        let slot = {
            let mut cache = self.cache.lock().expect("cache lock");
            cache.entry(key).or_default().clone()
        };
        slot.get_or_init(|| {
            self.compiles.fetch_add(1, Ordering::SeqCst);
            let params = make_params_shared(Arc::new(program.clone()), n, exponent_for(n, d))?;
            let formula = delta_conditional(&params)?;
            let order = variable_order(&params, &[0, params.period]);
            Ok(Arc::new(CompiledDelta {
                key,
                length: formula.natural_length(),
                params,
                formula,
                order,
            }))
        })
        .clone()
    }

    pub fn recognize(
        &self,
        program: &MachineProgram,
        d: usize,
        input: &[Symbol],
        cross_check: bool,
    ) -> Result<RecognizerReport, RecognizerError> {
        let compiled = self.reuse_compiled(program, d, input.len())?;
        self.recognize_compiled(&compiled, input, cross_check)
    }

    pub fn recognize_compiled(
        &self,
        compiled: &CompiledDelta,
        input: &[Symbol],
        cross_check: bool,
    ) -> Result<RecognizerReport, RecognizerError> {
        let params = &compiled.params;
        if input.len() != params.n {
            return Err(RecognizerError::LengthMismatch {
                expected: params.n,
                got: input.len(),
            });
        }
        if let Some(bad) = input
            .iter()
            .find(|s| **s == BLANK || **s == START || s.0 >= params.alphabet_size)
        {
            return Err(RecognizerError::InvalidInputSymbol(bad.0));
        }
        let probe = make_input_oracle(params, input);
        let options = self.options.clone().with_order(compiled.order.clone());
        let eval = self.evaluator.evaluate(&compiled.formula, Some(&probe), &options)?;
        let verdict = Verdict::from_bool(eval.value);
        let oracle_verdict = if cross_check {
            let sim = simulate(params.program(), input, step_budget(params.n, compiled.key.d))?;
            let oracle = Verdict::from_bool(sim.outcome == Outcome::Accepted);
            if oracle != verdict {
                return Err(RecognizerError::CrossCheckMismatch { formula: verdict, oracle });
            }
            Some(oracle)
        } else {
            None
        };
        Ok(RecognizerReport {
            verdict,
            m_used: params.m,
            formula_length: compiled.length,
            eval_stats: eval.stats,
            oracle_verdict,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::render;
    use crate::machine::load_machine;

    const ACCEPT_ALL: &str = "alphabet: _ > 0 1\nstates: 3\nq0 > > -> q1 S > S\n";
    const FIRST_IS_ONE: &str = "alphabet: _ > 0 1\nstates: 4\nq0 > > -> q3 R > S\nq3 1 > -> q1 S > S\nq3 0 > -> q2 S > S\n";

    fn word(p: &MachineProgram, w: &str) -> Vec<Symbol> {
        p.alphabet().parse_word(w).unwrap()
    }

    #[test]
    fn exponent_and_budget() {
        assert_eq!(exponent_for(4, 2), 4);
        assert_eq!(exponent_for(5, 1), 3);
        for n in 2..=64usize {
            for d in 1..=3 {
                assert!(1u128 << exponent_for(n, d) >= (n as u128).pow(d as u32));
            }
        }
        assert_eq!(step_budget(3, 2), 9);
        assert_eq!(step_budget(1 << 40, 2), u64::MAX);
    }

    #[test]
    fn accept_all_accepts() {
        let p = load_machine(ACCEPT_ALL).unwrap();
        let r = Recognizer::default();
        let report = r.recognize(&p, 1, &word(&p, "01"), true).unwrap();
        assert_eq!(report.verdict, Verdict::Accept);
        assert_eq!(report.oracle_verdict, Some(Verdict::Accept));
        assert_eq!(report.m_used, 1);
    }

    #[test]
    fn first_symbol() {
        let p = load_machine(FIRST_IS_ONE).unwrap();
        let r = Recognizer::default();
        assert_eq!(r.recognize(&p, 1, &word(&p, "10"), true).unwrap().verdict, Verdict::Accept);
        assert_eq!(r.recognize(&p, 1, &word(&p, "01"), true).unwrap().verdict, Verdict::Reject);
        assert_eq!(r.compile_count(), 1);
    }

    #[test]
    fn cache_keys_and_reuse() {
        let p = load_machine(FIRST_IS_ONE).unwrap();
        let r = Recognizer::default();
        let a = r.reuse_compiled(&p, 1, 2).unwrap();
        let b = r.reuse_compiled(&p, 1, 3).unwrap();
        assert_ne!(a.key, b.key);
        assert!(Arc::ptr_eq(&a, &r.reuse_compiled(&p, 1, 2).unwrap()));
        assert_eq!(r.compile_count(), 2);

        let fresh = Recognizer::default();
        for w in ["01", "10"] {
            let cached = r.recognize_compiled(&a, &word(&p, w), false).unwrap();
            let other = Recognizer::default().recognize(&p, 1, &word(&p, w), false).unwrap();
            assert_eq!(cached.verdict, other.verdict);
        }
        assert_eq!(fresh.compile_count(), 0);
        assert_eq!(render(&a.formula), render(&delta_conditional(&a.params).unwrap()));
        assert!(matches!(
            r.recognize_compiled(&a, &word(&p, "011"), false),
            Err(RecognizerError::LengthMismatch { .. })
        ));
        assert_eq!(r.reuse_compiled(&p, 0, 2).unwrap_err(), RecognizerError::ZeroDegree);
    }

    #[test]
    fn sixteen_inputs_one_compilation() {
        let p = load_machine(FIRST_IS_ONE).unwrap();
        let r = Recognizer::default();
        std::thread::scope(|s| {
            for half in 0..2u32 {
                let (r, p) = (&r, &p);
                s.spawn(move || {
                    for bits in half * 8..half * 8 + 8 {
                        let w: String = (0..4).map(|i| if bits >> (3 - i) & 1 == 1 { '1' } else { '0' }).collect();
                        let rep = r.recognize(p, 1, &word(p, &w), true).unwrap();
                        assert_eq!(rep.verdict.accepted(), w.starts_with('1'));
                    }
                });
            }
        });
        assert_eq!(r.compile_count(), 1);
    }
}
