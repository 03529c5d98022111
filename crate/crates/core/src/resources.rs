//! Lexicons, term list and explanation templates, built in or from a directory.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::companion::{CompanionError, Templates};
use crate::text_similarity::SubjectivityLexicon;
use crate::tone::EmotionLexicon;
use crate::writing_quality::TermList;

pub const SUBJECTIVITY_FILE: &str = "subjectivity.tsv";
pub const EMOTIONS_FILE: &str = "emotions.tsv";
pub const TERMS_FILE: &str = "low_quality_terms.txt";
pub const TEMPLATES_DIR: &str = "templates";

const SUBJECTIVITY: &str = include_str!("../resources/subjectivity.tsv");
const EMOTIONS: &str = include_str!("../resources/emotions.tsv");
const TERMS: &str = include_str!("../resources/low_quality_terms.txt");

#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Templates(#[from] CompanionError),
}

#[derive(Debug, Clone)]
pub struct Resources {
    pub subjectivity: SubjectivityLexicon,
    pub emotions: EmotionLexicon,
    pub terms: TermList,
    pub templates: Templates,
}

impl Resources {
    pub fn embedded() -> Self {
        Resources {
            subjectivity: SubjectivityLexicon::parse(SUBJECTIVITY).expect("embedded subjectivity lexicon"),
            emotions: EmotionLexicon::parse(EMOTIONS).expect("embedded emotion lexicon"),
            terms: TermList::parse(TERMS),
            templates: Templates::embedded(),
        }
    }

    /// Loads from `dir`; any file that is absent falls back to the built-in copy.
    pub fn load(dir: Option<&Path>) -> Result<Self, ResourceError> {
        let Some(dir) = dir else { return Ok(Self::embedded()) };
        let read = |name: &str, fallback: &'static str| -> Result<String, ResourceError> {
            let path = dir.join(name);
            match fs::read_to_string(&path) {
                Ok(s) => Ok(s),
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(fallback.to_string()),
                Err(source) => Err(ResourceError::Read { path: path.display().to_string(), source }),
            }
        };
        let subjectivity = SubjectivityLexicon::parse(&read(SUBJECTIVITY_FILE, SUBJECTIVITY)?)
            .map_err(|e| ResourceError::Parse(e.to_string()))?;
        let emotions =
            EmotionLexicon::parse(&read(EMOTIONS_FILE, EMOTIONS)?).map_err(|e| ResourceError::Parse(e.to_string()))?;
        let terms = TermList::parse(&read(TERMS_FILE, TERMS)?);
        let tdir = dir.join(TEMPLATES_DIR);
        let templates = if tdir.is_dir() { Templates::load_dir(&tdir)? } else { Templates::embedded() };
        Ok(Resources { subjectivity, emotions, terms, templates })
    }
}
