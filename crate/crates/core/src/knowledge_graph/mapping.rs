//! Bundle → triple mapping.
//!
//! | node | predicates |
//! |------|------------|
//! | asset `prov-data:asset/{id}` | `rdf:type prov-data:Asset`, `bib:url`, `bib:title`?, `bib:issued`, `bib:publisher`?, `prov-data:source`, `prov-data:contentDigest`, `prov-data:blockIndex`, `prov-data:blockHash`, `prov-data:likes`, `prov-data:shares`, `prov-data:comments`, `prov-data:engagementScore`, `prov-data:completedAt`, `prov-data:inTopic`, one `prov-data:hasFragment` per fragment |
//! | agent `agent:{slug}` | `rdf:type agent:Organization`, `agent:name` |
//! | fragment `prov-data:fragment/{id}/{fid}` | `rdf:type` (text/image/video fragment class), `prov-data:fragmentKind`, `prov-data:blobDigest` for media |
//! | concept, category, topic | `rdf:type`, `prov-data:label`, and `prov-data:hasCategory` / `prov-data:hasTopic` / `prov-data:hasArticle` down the path |
//! | criterion `prov-obs:criterion/{name}` | `rdf:type prov-obs:Criterion`, `prov-data:label` |
//! | observation `prov-obs:observation/{id}/{criterion}` | `rdf:type prov-obs:Observation`, `prov-obs:hasAsset`, `prov-obs:hasCriterion`, `prov-obs:hasStatus`, `prov-obs:hasScore`, `prov-obs:explanation`, `prov-obs:evidence` (JSON text), one `prov-obs:{measure}` per measure |

use sha2::{Digest as _, Sha256};

use super::term::{Term, Triple, RDF_TYPE};
use crate::model::{AnalysisBundle, Criterion, FragmentKind, TopicAssignment};
use crate::Digest;

pub const ASSET_CLASS: &str = "prov-data:Asset";
pub const AGENT_CLASS: &str = "agent:Organization";
pub const CONCEPT_CLASS: &str = "prov-data:Concept";
pub const CATEGORY_CLASS: &str = "prov-data:Category";
pub const TOPIC_CLASS: &str = "prov-data:Topic";
pub const CRITERION_CLASS: &str = "prov-obs:Criterion";
pub const OBSERVATION_CLASS: &str = "prov-obs:Observation";
pub const TEXT_FRAGMENT_CLASS: &str = "prov-data:TextFragment";
pub const IMAGE_FRAGMENT_CLASS: &str = "prov-data:ImageFragment";
pub const VIDEO_FRAGMENT_CLASS: &str = "prov-data:VideoFragment";

pub const URL: &str = "bib:url";
pub const TITLE: &str = "bib:title";
pub const ISSUED: &str = "bib:issued";
pub const PUBLISHER: &str = "bib:publisher";
pub const AGENT_NAME: &str = "agent:name";
pub const SOURCE: &str = "prov-data:source";
pub const CONTENT_DIGEST: &str = "prov-data:contentDigest";
pub const BLOCK_INDEX: &str = "prov-data:blockIndex";
pub const BLOCK_HASH: &str = "prov-data:blockHash";
pub const LIKES: &str = "prov-data:likes";
pub const SHARES: &str = "prov-data:shares";
pub const COMMENTS: &str = "prov-data:comments";
pub const ENGAGEMENT_SCORE: &str = "prov-data:engagementScore";
pub const COMPLETED_AT: &str = "prov-data:completedAt";
pub const IN_TOPIC: &str = "prov-data:inTopic";
pub const HAS_FRAGMENT: &str = "prov-data:hasFragment";
pub const FRAGMENT_KIND: &str = "prov-data:fragmentKind";
pub const BLOB_DIGEST: &str = "prov-data:blobDigest";
pub const LABEL: &str = "prov-data:label";
pub const HAS_CATEGORY: &str = "prov-data:hasCategory";
pub const HAS_TOPIC: &str = "prov-data:hasTopic";
pub const HAS_ARTICLE: &str = "prov-data:hasArticle";
pub const HAS_ASSET: &str = "prov-obs:hasAsset";
pub const HAS_CRITERION: &str = "prov-obs:hasCriterion";
pub const HAS_STATUS: &str = "prov-obs:hasStatus";
pub const HAS_SCORE: &str = "prov-obs:hasScore";
pub const EXPLANATION: &str = "prov-obs:explanation";
pub const EVIDENCE: &str = "prov-obs:evidence";

/// Observation predicates that are not measures.
pub const OBSERVATION_FIXED: [&str; 7] =
    [RDF_TYPE, HAS_ASSET, HAS_CRITERION, HAS_STATUS, HAS_SCORE, EXPLANATION, EVIDENCE];

pub fn asset_iri(id: &Digest) -> Term {
    Term::iri(format!("prov-data:asset/{id}"))
}

pub fn fragment_iri(id: &Digest, fragment_id: &str) -> Term {
    Term::iri(format!("prov-data:fragment/{id}/{}", sanitize(fragment_id)))
}

pub fn observation_iri(id: &Digest, c: Criterion) -> Term {
    Term::iri(format!("prov-obs:observation/{id}/{}", c.as_str()))
}

pub fn criterion_iri(c: Criterion) -> Term {
    Term::iri(format!("prov-obs:criterion/{}", c.as_str()))
}

pub fn measure_predicate(name: &str) -> String {
    format!("prov-obs:{}", sanitize(name))
}

/// Agent IRIs carry a short name hash so distinct names never share a node.
pub fn agent_iri(name: &str) -> Term {
    let h = Sha256::digest(name.as_bytes());
    Term::iri(format!("agent:{}-{}", slug(name), hex::encode(&h[..4])))
}

pub fn concept_iri(t: &TopicAssignment) -> Term {
    Term::iri(format!("prov-data:concept/{}", slug(&t.concept)))
}

pub fn category_iri(t: &TopicAssignment) -> Term {
    Term::iri(format!("prov-data:category/{}/{}", slug(&t.concept), slug(&t.category)))
}

pub fn topic_iri(t: &TopicAssignment) -> Term {
    Term::iri(format!("prov-data:topic/{}/{}/{}", slug(&t.concept), slug(&t.category), slug(&t.topic)))
}

fn slug(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars().flat_map(char::to_lowercase) {
        if c.is_ascii_alphanumeric() {
            out.push(c);
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    let out = out.trim_matches('-');
    if out.is_empty() {
        "_".to_string()
    } else {
        out.to_string()
    }
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' }).collect()
}

pub fn fragment_class(kind: FragmentKind) -> &'static str {
    match kind {
        FragmentKind::Image => IMAGE_FRAGMENT_CLASS,
        FragmentKind::Video => VIDEO_FRAGMENT_CLASS,
        _ => TEXT_FRAGMENT_CLASS,
    }
}

/// Every triple a bundle maps to, in emission order.
pub fn bundle_triples(b: &AnalysisBundle) -> Vec<Triple> {
    let a = asset_iri(&b.asset_id);
    let meta = &b.asset;
    let r = &b.ledger_receipt;
    let mut out = vec![
        Triple::new(a.clone(), RDF_TYPE, Term::iri(ASSET_CLASS)),
        Triple::new(a.clone(), URL, Term::string(&meta.url)),
        Triple::new(a.clone(), ISSUED, Term::timestamp(meta.published_at)),
        Triple::new(a.clone(), SOURCE, Term::string(meta.source.as_str())),
        Triple::new(a.clone(), CONTENT_DIGEST, Term::string(r.content_digest.to_hex())),
        Triple::new(a.clone(), BLOCK_INDEX, Term::integer(r.block_index as i64)),
        Triple::new(a.clone(), BLOCK_HASH, Term::string(r.block_hash.to_hex())),
        Triple::new(a.clone(), LIKES, Term::integer(b.engagement.likes as i64)),
        Triple::new(a.clone(), SHARES, Term::integer(b.engagement.shares as i64)),
        Triple::new(a.clone(), COMMENTS, Term::integer(b.engagement.comments as i64)),
        Triple::new(a.clone(), ENGAGEMENT_SCORE, Term::decimal(b.engagement.score)),
        Triple::new(a.clone(), COMPLETED_AT, Term::timestamp(b.completed_at)),
        Triple::new(a.clone(), IN_TOPIC, topic_iri(&meta.topic)),
    ];
    if let Some(title) = &meta.title {
        out.push(Triple::new(a.clone(), TITLE, Term::string(title)));
    }
    if !meta.publisher.is_empty() {
        let agent = agent_iri(&meta.publisher);
        out.push(Triple::new(a.clone(), PUBLISHER, agent.clone()));
        out.push(Triple::new(agent.clone(), RDF_TYPE, Term::iri(AGENT_CLASS)));
        out.push(Triple::new(agent, AGENT_NAME, Term::string(&meta.publisher)));
    }
    for f in &meta.fragments {
        let fi = fragment_iri(&b.asset_id, &f.fragment_id);
        out.push(Triple::new(a.clone(), HAS_FRAGMENT, fi.clone()));
        out.push(Triple::new(fi.clone(), RDF_TYPE, Term::iri(fragment_class(f.kind))));
        out.push(Triple::new(fi.clone(), FRAGMENT_KIND, Term::string(f.kind.as_str())));
        if let Some(d) = &f.blob {
            out.push(Triple::new(fi, BLOB_DIGEST, Term::string(d.to_hex())));
        }
    }

    let t = &meta.topic;
    let (ci, ki, ti) = (concept_iri(t), category_iri(t), topic_iri(t));
    out.extend([
        Triple::new(ci.clone(), RDF_TYPE, Term::iri(CONCEPT_CLASS)),
        Triple::new(ci.clone(), LABEL, Term::string(&t.concept)),
        Triple::new(ci, HAS_CATEGORY, ki.clone()),
        Triple::new(ki.clone(), RDF_TYPE, Term::iri(CATEGORY_CLASS)),
        Triple::new(ki.clone(), LABEL, Term::string(&t.category)),
        Triple::new(ki, HAS_TOPIC, ti.clone()),
        Triple::new(ti.clone(), RDF_TYPE, Term::iri(TOPIC_CLASS)),
        Triple::new(ti.clone(), LABEL, Term::string(&t.topic)),
        Triple::new(ti, HAS_ARTICLE, a.clone()),
    ]);

    for (c, res) in &b.results {
        let ci = criterion_iri(*c);
        out.push(Triple::new(ci.clone(), RDF_TYPE, Term::iri(CRITERION_CLASS)));
        out.push(Triple::new(ci.clone(), LABEL, Term::string(c.label())));
        let o = observation_iri(&b.asset_id, *c);
        let evidence = serde_json::to_string(&res.evidence).expect("evidence serializes");
        out.extend([
            Triple::new(o.clone(), RDF_TYPE, Term::iri(OBSERVATION_CLASS)),
            Triple::new(o.clone(), HAS_ASSET, a.clone()),
            Triple::new(o.clone(), HAS_CRITERION, ci),
            Triple::new(o.clone(), HAS_STATUS, Term::string(res.status.as_str())),
            Triple::new(o.clone(), HAS_SCORE, Term::decimal(res.score)),
            Triple::new(o.clone(), EXPLANATION, Term::string(&res.explanation)),
            Triple::new(o.clone(), EVIDENCE, Term::string(evidence)),
        ]);
        for (name, v) in &res.measures {
            out.push(Triple::new(o.clone(), &measure_predicate(name), Term::decimal(*v)));
        }
    }
    out
}
