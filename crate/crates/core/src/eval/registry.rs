//! Evaluators by name.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::formula::Formula;

use super::{eval_guarded_with, eval_naive_with, EvalError, EvalOptions, Evaluation, InputProbe};

pub trait Evaluator: Send + Sync {
    fn name(&self) -> &'static str;
    fn evaluate(
        &self,
        formula: &Formula,
        probe: Option<&dyn InputProbe>,
        options: &EvalOptions,
    ) -> Result<Evaluation, EvalError>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct NaiveEvaluator;

impl Evaluator for NaiveEvaluator {
    fn name(&self) -> &'static str {
        "naive"
    }

    fn evaluate(&self, formula: &Formula, probe: Option<&dyn InputProbe>, options: &EvalOptions) -> Result<Evaluation, EvalError> {
        eval_naive_with(formula, probe, options)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct GuardedEvaluator;

impl Evaluator for GuardedEvaluator {
    fn name(&self) -> &'static str {
        "guarded"
    }

    fn evaluate(&self, formula: &Formula, probe: Option<&dyn InputProbe>, options: &EvalOptions) -> Result<Evaluation, EvalError> {
        eval_guarded_with(formula, probe, options)
    }
}

#[derive(Clone)]
pub struct Registry {
    entries: BTreeMap<&'static str, Arc<dyn Evaluator>>,
}

impl Default for Registry {
    fn default() -> Registry {
        let mut r = Registry::empty();
        r.register(Arc::new(NaiveEvaluator));
        r.register(Arc::new(GuardedEvaluator));
        r
    }
}

impl Registry {
    pub fn empty() -> Registry {
        Registry {
            entries: BTreeMap::new(),
        }
    }

    /// Adds or replaces the evaluator under its own name.
    pub fn register(&mut self, evaluator: Arc<dyn Evaluator>) {
        self.entries.insert(evaluator.name(), evaluator);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Evaluator>, EvalError> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| EvalError::UnknownEvaluator(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}
