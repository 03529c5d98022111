//! Read-only JSON views over the knowledge graph.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::ingestion::asset_id_for_url;
use crate::knowledge_graph::{
    asset_id_of, Datatype, KnowledgeGraph, Pattern, Term, Triple, AGENT_CLASS, AGENT_NAME, HAS_ARTICLE, HAS_CRITERION,
    HAS_STATUS, LABEL, PUBLISHER, RDF_TYPE, TOPIC_CLASS,
};
use crate::model::{AssetId, Criterion, Status, TopicAssignment, VerificationRecord};

pub const SCHEMA_VERSION: &str = "1";
pub const DEFAULT_LIMIT: usize = 100;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("not found: {0}")]
    NotFound(String),
}

impl QueryError {
    pub fn http_status(&self) -> u16 {
        match self {
            QueryError::BadRequest(_) => 400,
            QueryError::NotFound(_) => 404,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CannedQueryName {
    VerificationByUrl,
    AssetsByTopic,
    AssetsByPublisher,
    CautionSummary,
}

impl CannedQueryName {
    pub const ALL: [CannedQueryName; 4] = [
        CannedQueryName::VerificationByUrl,
        CannedQueryName::AssetsByTopic,
        CannedQueryName::AssetsByPublisher,
        CannedQueryName::CautionSummary,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CannedQueryName::VerificationByUrl => "verification_by_url",
            CannedQueryName::AssetsByTopic => "assets_by_topic",
            CannedQueryName::AssetsByPublisher => "assets_by_publisher",
            CannedQueryName::CautionSummary => "caution_summary",
        }
    }

    pub fn required_params(self) -> &'static [&'static str] {
        match self {
            CannedQueryName::VerificationByUrl => &["url"],
            CannedQueryName::AssetsByTopic => &["topic"],
            CannedQueryName::AssetsByPublisher => &["publisher"],
            CannedQueryName::CautionSummary => &[],
        }
    }
}

impl fmt::Display for CannedQueryName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CannedQueryName {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CannedQueryName::ALL
            .into_iter()
            .find(|q| q.as_str() == s)
            .ok_or_else(|| QueryError::BadRequest(format!("unknown query `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CannedQuery {
    pub name: CannedQueryName,
    pub params: BTreeMap<String, String>,
}

impl CannedQuery {
    pub fn parse(name: &str, params: BTreeMap<String, String>) -> Result<Self, QueryError> {
        let name: CannedQueryName = name.parse()?;
        for p in name.required_params() {
            if params.get(*p).is_none_or(|v| v.is_empty()) {
                return Err(QueryError::BadRequest(format!("{name} needs parameter `{p}`")));
            }
        }
        Ok(CannedQuery { name, params })
    }

    fn param(&self, key: &str) -> &str {
        self.params.get(key).map(String::as_str).unwrap_or_default()
    }

    fn limit(&self) -> Result<usize, QueryError> {
        match self.params.get("limit") {
            None => Ok(DEFAULT_LIMIT),
            Some(v) => v
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| QueryError::BadRequest(format!("limit must be a positive integer, got `{v}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationResponse {
    pub schema_version: String,
    pub generated_at: DateTime<Utc>,
    #[serde(flatten)]
    pub record: VerificationRecord,
}

/// One asset in a listing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetRow {
    pub asset_id: AssetId,
    pub url: String,
    pub title: Option<String>,
    pub publisher: String,
    pub topic: TopicAssignment,
    pub statuses: BTreeMap<Criterion, Status>,
    pub caution_count: usize,
}

impl AssetRow {
    fn of(r: &VerificationRecord) -> Self {
        let statuses: BTreeMap<Criterion, Status> = r.results.iter().map(|(c, res)| (*c, res.status)).collect();
        AssetRow {
            asset_id: r.asset_id,
            url: r.url.clone(),
            title: r.title.clone(),
            publisher: r.publisher.clone(),
            topic: r.topic.clone(),
            caution_count: statuses.values().filter(|s| **s == Status::Caution).count(),
            statuses,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CautionRow {
    pub criterion: Criterion,
    pub caution: usize,
    pub pass: usize,
    pub unavailable: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CannedResponse {
    pub schema_version: String,
    pub generated_at: DateTime<Utc>,
    pub query: CannedQueryName,
    pub rows: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawResponse {
    pub schema_version: String,
    pub generated_at: DateTime<Utc>,
    pub count: usize,
    pub triples: Vec<Triple>,
}

/// Raw pattern body: each position optional. Strings with a known prefix are
/// IRIs; other object strings match any literal with that lexical value.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPattern {
    pub s: Option<String>,
    pub p: Option<String>,
    pub o: Option<RawObject>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum RawObject {
    Text(String),
    Term(Term),
}

#[derive(Debug, Clone)]
pub struct QueryService {
    graph: Arc<KnowledgeGraph>,
}

fn rows<T: Serialize>(items: impl IntoIterator<Item = T>) -> Vec<Value> {
    items.into_iter().map(|r| serde_json::to_value(r).expect("row serializes")).collect()
}

impl QueryService {
    pub fn new(graph: Arc<KnowledgeGraph>) -> Self {
        QueryService { graph }
    }

    pub fn graph(&self) -> &Arc<KnowledgeGraph> {
        &self.graph
    }

    fn record_for_url(&self, url: &str) -> Result<Option<VerificationRecord>, QueryError> {
        let id = asset_id_for_url(url).map_err(|e| QueryError::BadRequest(e.to_string()))?;
        Ok(self.graph.get_verification(&id))
    }

    pub fn handle_verification(&self, url: &str) -> Result<VerificationResponse, QueryError> {
        let record = self.record_for_url(url)?.ok_or_else(|| QueryError::NotFound(format!("no asset for {url}")))?;
        Ok(VerificationResponse { schema_version: SCHEMA_VERSION.into(), generated_at: Utc::now(), record })
    }

    pub fn handle_canned(&self, query: &CannedQuery) -> Result<CannedResponse, QueryError> {
        let limit = query.limit()?;
        let rows = match query.name {
            CannedQueryName::VerificationByUrl => {
                rows(self.record_for_url(query.param("url"))?.iter().map(AssetRow::of))
            }
            CannedQueryName::AssetsByTopic => {
                let label = Term::string(query.param("topic"));
                let topics: Vec<Term> = self
                    .graph
                    .matching(&Pattern::po(LABEL, label))
                    .into_iter()
                    .map(|t| t.subject)
                    .filter(|s| self.has_type(s, TOPIC_CLASS))
                    .collect();
                let assets = topics
                    .into_iter()
                    .flat_map(|t| self.graph.matching(&Pattern::sp(t, HAS_ARTICLE)))
                    .map(|t| t.object);
                rows(self.asset_rows(assets, limit))
            }
            CannedQueryName::AssetsByPublisher => {
                let name = Term::string(query.param("publisher"));
                let agents: Vec<Term> = self
                    .graph
                    .matching(&Pattern::po(AGENT_NAME, name))
                    .into_iter()
                    .map(|t| t.subject)
                    .filter(|s| self.has_type(s, AGENT_CLASS))
                    .collect();
                let assets =
                    agents.into_iter().flat_map(|a| self.graph.matching(&Pattern::po(PUBLISHER, a))).map(|t| t.subject);
                rows(self.asset_rows(assets, limit))
            }
            CannedQueryName::CautionSummary => rows(self.caution_summary()),
        };
        Ok(CannedResponse { schema_version: SCHEMA_VERSION.into(), generated_at: Utc::now(), query: query.name, rows })
    }

    fn has_type(&self, s: &Term, class: &str) -> bool {
        !self
            .graph
            .matching(&Pattern::new(Some(s.clone()), Some(Term::iri(RDF_TYPE)), Some(Term::iri(class))))
            .is_empty()
    }

    fn asset_rows(&self, assets: impl Iterator<Item = Term>, limit: usize) -> Vec<AssetRow> {
        let mut ids: Vec<AssetId> = assets.filter_map(|t| asset_id_of(&t)).collect();
        ids.sort();
        ids.dedup();
        ids.iter().filter_map(|id| self.graph.get_verification(id)).take(limit).map(|r| AssetRow::of(&r)).collect()
    }

    /// Observation counts per criterion and status.
    pub fn caution_summary(&self) -> Vec<CautionRow> {
        let mut counts: BTreeMap<Criterion, CautionRow> = Criterion::ALL
            .into_iter()
            .map(|c| (c, CautionRow { criterion: c, caution: 0, pass: 0, unavailable: 0 }))
            .collect();
        for status in [Status::Caution, Status::Pass, Status::Unavailable] {
            for obs in self.graph.matching(&Pattern::po(HAS_STATUS, Term::string(status.as_str()))) {
                let criterion =
                    self.graph.matching(&Pattern::sp(obs.subject, HAS_CRITERION)).first().and_then(|t| {
                        t.object.as_iri()?.strip_prefix("prov-obs:criterion/")?.parse::<Criterion>().ok()
                    });
                if let Some(row) = criterion.and_then(|c| counts.get_mut(&c)) {
                    match status {
                        Status::Caution => row.caution += 1,
                        Status::Pass => row.pass += 1,
                        Status::Unavailable => row.unavailable += 1,
                    }
                }
            }
        }
        counts.into_values().collect()
    }

    pub fn handle_raw_json(&self, body: &[u8]) -> Result<RawResponse, QueryError> {
        let pattern: RawPattern = if body.iter().all(u8::is_ascii_whitespace) {
            RawPattern::default()
        } else {
            serde_json::from_slice(body).map_err(|e| QueryError::BadRequest(format!("malformed pattern: {e}")))?
        };
        Ok(self.handle_raw(&pattern))
    }

    pub fn handle_raw(&self, pattern: &RawPattern) -> RawResponse {
        let s = pattern.s.as_ref().map(|v| Term::iri(v.as_str()));
        let p = pattern.p.as_ref().map(|v| Term::iri(v.as_str()));
        let triples = match &pattern.o {
            None => self.graph.matching(&Pattern::new(s, p, None)),
            Some(RawObject::Term(t)) => self.graph.matching(&Pattern::new(s, p, Some(t.clone()))),
            Some(RawObject::Text(v)) if Term::is_prefixed_name(v) => {
                self.graph.matching(&Pattern::new(s, p, Some(Term::iri(v.as_str()))))
            }
            Some(RawObject::Text(v)) => {
                let mut out: Vec<Triple> =
                    [Datatype::String, Datatype::Integer, Datatype::Decimal, Datatype::DateTime, Datatype::Boolean]
                        .into_iter()
                        .flat_map(|dt| {
                            let o = Term::Literal { value: v.clone(), datatype: dt };
                            self.graph.matching(&Pattern::new(s.clone(), p.clone(), Some(o)))
                        })
                        .collect();
                out.sort();
                out
            }
        };
        RawResponse { schema_version: SCHEMA_VERSION.into(), generated_at: Utc::now(), count: triples.len(), triples }
    }
}
