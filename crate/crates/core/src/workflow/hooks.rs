//! Instrumented analyzers for exercising failure and in-flight states.

use std::sync::{Arc, Condvar, Mutex};

use super::{Analyzer, AnalyzerError, AnalyzerInput};
use crate::model::{AnalysisResult, Criterion};

/// Always fails, for the criteria it claims.
pub struct FailingAnalyzer {
    name: String,
    criteria: Vec<Criterion>,
}

impl FailingAnalyzer {
    pub fn new(name: &str, criteria: &[Criterion]) -> Self {
        FailingAnalyzer { name: name.to_string(), criteria: criteria.to_vec() }
    }
}

impl Analyzer for FailingAnalyzer {
    fn name(&self) -> &str {
        &self.name
    }

    fn criteria(&self) -> &[Criterion] {
        &self.criteria
    }

    fn analyze(&self, _: &AnalyzerInput) -> Result<Vec<AnalysisResult>, AnalyzerError> {
        Err(AnalyzerError::new("forced failure"))
    }
}

#[derive(Debug, Default)]
struct GateState {
    entered: usize,
    open: bool,
}

/// Open/closed gate shared between a test and a [`PausingAnalyzer`].
#[derive(Debug, Clone, Default)]
pub struct Gate {
    inner: Arc<(Mutex<GateState>, Condvar)>,
}

impl Gate {
    pub fn new() -> Self {
        Gate::default()
    }

    pub fn open(&self) {
        let (m, cv) = &*self.inner;
        m.lock().expect("gate poisoned").open = true;
        cv.notify_all();
    }

    /// Blocks until at least `n` callers have reached the gate.
    pub fn wait_entered(&self, n: usize) {
        let (m, cv) = &*self.inner;
        let mut s = m.lock().expect("gate poisoned");
        while s.entered < n {
            s = cv.wait(s).expect("gate poisoned");
        }
    }

    fn pass(&self) {
        let (m, cv) = &*self.inner;
        let mut s = m.lock().expect("gate poisoned");
        s.entered += 1;
        cv.notify_all();
        while !s.open {
            s = cv.wait(s).expect("gate poisoned");
        }
    }
}

/// Waits at a gate before delegating.
pub struct PausingAnalyzer {
    inner: Arc<dyn Analyzer>,
    gate: Gate,
}

impl PausingAnalyzer {
    pub fn new(inner: Arc<dyn Analyzer>, gate: Gate) -> Self {
        PausingAnalyzer { inner, gate }
    }
}

impl Analyzer for PausingAnalyzer {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn criteria(&self) -> &[Criterion] {
        self.inner.criteria()
    }

    fn analyze(&self, input: &AnalyzerInput) -> Result<Vec<AnalysisResult>, AnalyzerError> {
        self.gate.pass();
        self.inner.analyze(input)
    }
}
