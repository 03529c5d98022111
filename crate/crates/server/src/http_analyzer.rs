//! Analyzer proxy for `workflow.dispatch_mode = "http"`.

use std::sync::Arc;
use std::time::Duration;

use provenance_core::model::{AnalysisResult, Criterion};
use provenance_core::workflow::{Analyzer, AnalyzerError, AnalyzerInput};
use serde::Deserialize;

pub struct HttpAnalyzer {
    name: String,
    criteria: Vec<Criterion>,
    endpoint: String,
    agent: ureq::Agent,
}

#[derive(Deserialize)]
struct AnalyzerResponse {
    results: Vec<AnalysisResult>,
}

impl HttpAnalyzer {
    /// `base` is the server root, e.g. `http://127.0.0.1:8420`.
    pub fn new(base: &str, name: &str, criteria: &[Criterion], timeout: Duration) -> Self {
        HttpAnalyzer {
            name: name.to_string(),
            criteria: criteria.to_vec(),
            endpoint: format!("{}/api/v1/analyzers/{name}", base.trim_end_matches('/')),
            agent: ureq::AgentBuilder::new().timeout(timeout).build(),
        }
    }

    /// One proxy per local analyzer, same names and criteria.
    pub fn mirror(base: &str, local: &[Arc<dyn Analyzer>], timeout: Duration) -> Vec<Arc<dyn Analyzer>> {
        local
            .iter()
            .map(|a| Arc::new(HttpAnalyzer::new(base, a.name(), a.criteria(), timeout)) as Arc<dyn Analyzer>)
            .collect()
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }
}

impl Analyzer for HttpAnalyzer {
    fn name(&self) -> &str {
        &self.name
    }

    fn criteria(&self) -> &[Criterion] {
        &self.criteria
    }

    fn analyze(&self, input: &AnalyzerInput) -> Result<Vec<AnalysisResult>, AnalyzerError> {
        let resp = self
            .agent
            .post(&self.endpoint)
            .send_json(input)
            .map_err(|e| AnalyzerError::new(format!("{}: {e}", self.endpoint)))?;
        let body: AnalyzerResponse =
            resp.into_json().map_err(|e| AnalyzerError::new(format!("{}: bad response: {e}", self.endpoint)))?;
        Ok(body.results)
    }
}
