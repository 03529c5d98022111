use std::fmt;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

pub const PROV_DATA: &str = "prov-data:";
pub const PROV_OBS: &str = "prov-obs:";
pub const BIB: &str = "bib:";
pub const AGENT: &str = "agent:";
pub const RDF: &str = "rdf:";
pub const XSD: &str = "xsd:";

pub const PREFIXES: [&str; 6] = [PROV_DATA, PROV_OBS, BIB, AGENT, RDF, XSD];

pub const RDF_TYPE: &str = "rdf:type";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Datatype {
    #[serde(rename = "xsd:string")]
    String,
    #[serde(rename = "xsd:integer")]
    Integer,
    #[serde(rename = "xsd:decimal")]
    Decimal,
    #[serde(rename = "xsd:dateTime")]
    DateTime,
    #[serde(rename = "xsd:boolean")]
    Boolean,
}

impl Datatype {
    pub fn iri(self) -> &'static str {
        match self {
            Datatype::String => "xsd:string",
            Datatype::Integer => "xsd:integer",
            Datatype::Decimal => "xsd:decimal",
            Datatype::DateTime => "xsd:dateTime",
            Datatype::Boolean => "xsd:boolean",
        }
    }

    pub fn from_iri(iri: &str) -> Option<Self> {
        [Datatype::String, Datatype::Integer, Datatype::Decimal, Datatype::DateTime, Datatype::Boolean]
            .into_iter()
            .find(|d| d.iri() == iri)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    Iri(String),
    Literal { value: String, datatype: Datatype },
}

impl Term {
    pub fn iri(s: impl Into<String>) -> Self {
        Term::Iri(s.into())
    }

    pub fn string(s: impl Into<String>) -> Self {
        Term::Literal { value: s.into(), datatype: Datatype::String }
    }

    pub fn integer(v: i64) -> Self {
        Term::Literal { value: v.to_string(), datatype: Datatype::Integer }
    }

    /// Shortest round-trip decimal form of a finite `f64`.
    pub fn decimal(v: f64) -> Self {
        debug_assert!(v.is_finite());
        Term::Literal { value: v.to_string(), datatype: Datatype::Decimal }
    }

    pub fn timestamp(t: DateTime<Utc>) -> Self {
        Term::Literal { value: t.to_rfc3339_opts(SecondsFormat::AutoSi, true), datatype: Datatype::DateTime }
    }

    pub fn boolean(v: bool) -> Self {
        Term::Literal { value: v.to_string(), datatype: Datatype::Boolean }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(s) => Some(s),
            Term::Literal { .. } => None,
        }
    }

    /// Lexical form: the IRI text or the literal value.
    pub fn lexical(&self) -> &str {
        match self {
            Term::Iri(s) => s,
            Term::Literal { value, .. } => value,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Term::Literal { value, datatype: Datatype::Decimal | Datatype::Integer } => value.parse().ok(),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Term::Literal { value, datatype: Datatype::Integer } => value.parse().ok(),
            _ => None,
        }
    }

    pub fn as_timestamp(&self) -> Option<DateTime<Utc>> {
        match self {
            Term::Literal { value, datatype: Datatype::DateTime } => {
                DateTime::parse_from_rfc3339(value).ok().map(|t| t.with_timezone(&Utc))
            }
            _ => None,
        }
    }

    /// Interprets a pattern string: prefixed names are IRIs, anything else
    /// is matched as a literal's lexical value.
    pub fn is_prefixed_name(s: &str) -> bool {
        PREFIXES.iter().any(|p| s.starts_with(p))
    }

    pub fn to_ntriples(&self) -> String {
        match self {
            Term::Iri(s) => format!("<{s}>"),
            Term::Literal { value, datatype } => format!("\"{}\"^^<{}>", escape(value), datatype.iri()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ntriples())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: &str, object: Term) -> Self {
        Triple { subject, predicate: Term::iri(predicate), object }
    }

    pub fn to_ntriples(&self) -> String {
        format!("{} {} {} .", self.subject.to_ntriples(), self.predicate.to_ntriples(), self.object.to_ntriples())
    }

    pub fn parse_ntriples(line: &str) -> Result<Triple, String> {
        let mut rest = line.trim();
        let subject = parse_term(&mut rest)?;
        let predicate = parse_term(&mut rest)?;
        let object = parse_term(&mut rest)?;
        if rest.trim() != "." {
            return Err(format!("expected terminating ` .` in `{line}`"));
        }
        if subject.as_iri().is_none() || predicate.as_iri().is_none() {
            return Err(format!("subject and predicate must be IRIs in `{line}`"));
        }
        Ok(Triple { subject, predicate, object })
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

fn parse_term(rest: &mut &str) -> Result<Term, String> {
    let s = rest.trim_start();
    if let Some(body) = s.strip_prefix('<') {
        let end = body.find('>').ok_or("unterminated IRI")?;
        *rest = &body[end + 1..];
        return Ok(Term::Iri(body[..end].to_string()));
    }
    let body = s.strip_prefix('"').ok_or_else(|| format!("unexpected term start in `{s}`"))?;
    let mut value = String::new();
    let mut chars = body.char_indices();
    let close = loop {
        let (i, c) = chars.next().ok_or("unterminated literal")?;
        match c {
            '"' => break i,
            '\\' => {
                let (_, e) = chars.next().ok_or("dangling escape")?;
                value.push(match e {
                    'n' => '\n',
                    'r' => '\r',
                    't' => '\t',
                    '"' => '"',
                    '\\' => '\\',
                    other => return Err(format!("unknown escape \\{other}")),
                });
            }
            c => value.push(c),
        }
    };
    let after = body[close + 1..].strip_prefix("^^<").ok_or("literal without datatype")?;
    let end = after.find('>').ok_or("unterminated datatype")?;
    let datatype = Datatype::from_iri(&after[..end]).ok_or_else(|| format!("unknown datatype {}", &after[..end]))?;
    *rest = &after[end + 1..];
    Ok(Term::Literal { value, datatype })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ntriples_round_trip_with_escapes() {
        let t = Triple::new(Term::iri("prov-data:asset/x"), "bib:title", Term::string("Say \"hi\"\n\tnow \\ ok"));
        let line = t.to_ntriples();
        assert!(!line.contains('\n'));
        assert_eq!(Triple::parse_ntriples(&line).unwrap(), t);
    }

    #[test]
    fn malformed_lines_are_rejected() {
        assert!(Triple::parse_ntriples("<a> <b> <c>").is_err());
        assert!(Triple::parse_ntriples("\"x\"^^<xsd:string> <b> <c> .").is_err());
        assert!(Triple::parse_ntriples("<a> <b> \"x\" .").is_err());
    }

    #[test]
    fn decimal_literals_round_trip() {
        for v in [0.0, 1.0 / 3.0, 1e-300, 0.4142_1356_2373, 12345.678] {
            assert_eq!(Term::decimal(v).as_f64(), Some(v));
        }
    }

    proptest! {
        #[test]
        fn any_literal_round_trips(value in "\\PC{0,40}", v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
            let t = Triple::new(Term::iri("prov-obs:o"), "prov-obs:explanation", Term::string(value));
            prop_assert_eq!(Triple::parse_ntriples(&t.to_ntriples()).unwrap(), t);
            prop_assert_eq!(Term::decimal(v).as_f64(), Some(v));
        }
    }
}
