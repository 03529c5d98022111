//! Per-user presentation of verification records.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AnalysisResult, Criterion, Status, VerificationRecord};

#[derive(Debug, Error)]
pub enum CompanionError {
    #[error("invalid user model: {0}")]
    Validation(String),
    #[error("user store: {0}")]
    Io(#[from] io::Error),
    #[error("template {0} is missing")]
    MissingTemplate(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Novice,
    Intermediate,
    Expert,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Novice, Level::Intermediate, Level::Expert];

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Novice => "novice",
            Level::Intermediate => "intermediate",
            Level::Expert => "expert",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sensitivity {
    Low,
    #[default]
    Normal,
    High,
}

impl Sensitivity {
    /// Cautions scoring below the floor are muted.
    pub fn floor(self) -> f64 {
        match self {
            Sensitivity::Low => 0.25,
            Sensitivity::Normal | Sensitivity::High => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WarningPref {
    pub enabled: bool,
    pub sensitivity: Sensitivity,
}

impl Default for WarningPref {
    fn default() -> Self {
        WarningPref { enabled: true, sensitivity: Sensitivity::Normal }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserModel {
    pub user_id: String,
    #[serde(default)]
    pub interests: Vec<String>,
    #[serde(default)]
    pub domain_knowledge: BTreeMap<String, Level>,
    pub digital_literacy: Level,
    pub warning_prefs: BTreeMap<Criterion, WarningPref>,
}

impl UserModel {
    /// All criteria enabled at normal sensitivity, intermediate literacy.
    pub fn default_for(user_id: &str) -> Self {
        UserModel {
            user_id: user_id.to_string(),
            interests: Vec::new(),
            domain_knowledge: BTreeMap::new(),
            digital_literacy: Level::Intermediate,
            warning_prefs: Criterion::ALL.into_iter().map(|c| (c, WarningPref::default())).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), CompanionError> {
        if self.user_id.trim().is_empty() {
            return Err(CompanionError::Validation("user_id is empty".into()));
        }
        if let Some(c) = Criterion::ALL.iter().find(|c| !self.warning_prefs.contains_key(c)) {
            return Err(CompanionError::Validation(format!("warning_prefs lacks {c}")));
        }
        Ok(())
    }

    pub fn pref(&self, c: Criterion) -> WarningPref {
        self.warning_prefs.get(&c).copied().unwrap_or_default()
    }

    pub fn apply(&mut self, patch: &UserPatch) {
        if let Some(i) = &patch.interests {
            self.interests = i.clone();
        }
        if let Some(d) = &patch.domain_knowledge {
            self.domain_knowledge = d.clone();
        }
        if let Some(l) = patch.digital_literacy {
            self.digital_literacy = l;
        }
        for (c, p) in patch.warning_prefs.iter().flatten() {
            let pref = self.warning_prefs.entry(*c).or_default();
            if let Some(e) = p.enabled {
                pref.enabled = e;
            }
            if let Some(s) = p.sensitivity {
                pref.sensitivity = s;
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WarningPrefPatch {
    pub enabled: Option<bool>,
    pub sensitivity: Option<Sensitivity>,
}

/// Partial update; absent fields stay as they are.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserPatch {
    pub interests: Option<Vec<String>>,
    pub domain_knowledge: Option<BTreeMap<String, Level>>,
    pub digital_literacy: Option<Level>,
    pub warning_prefs: Option<BTreeMap<Criterion, WarningPrefPatch>>,
}

impl UserPatch {
    pub fn from_json(bytes: &[u8]) -> Result<Self, CompanionError> {
        serde_json::from_slice(bytes).map_err(|e| CompanionError::Validation(e.to_string()))
    }
}

/// User models, optionally persisted as one JSON file.
#[derive(Debug, Default)]
pub struct UserStore {
    path: Option<PathBuf>,
    users: RwLock<BTreeMap<String, UserModel>>,
}

impl UserStore {
    pub fn in_memory() -> Self {
        UserStore::default()
    }

    pub fn open(path: impl Into<PathBuf>) -> Result<Self, CompanionError> {
        let path = path.into();
        let users: BTreeMap<String, UserModel> = match fs::read(&path) {
            Ok(bytes) => serde_json::from_slice(&bytes)
                .map_err(|e| CompanionError::Validation(format!("{}: {e}", path.display())))?,
            Err(e) if e.kind() == io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(e.into()),
        };
        for u in users.values() {
            u.validate()?;
        }
        Ok(UserStore { path: Some(path), users: RwLock::new(users) })
    }

    /// Stored model, or the default one for unseen ids.
    pub fn get(&self, user_id: &str) -> UserModel {
        self.users
            .read()
            .expect("user store poisoned")
            .get(user_id)
            .cloned()
            .unwrap_or_else(|| UserModel::default_for(user_id))
    }

    pub fn update(&self, user_id: &str, patch: &UserPatch) -> Result<UserModel, CompanionError> {
        let mut users = self.users.write().expect("user store poisoned");
        let mut model = users.get(user_id).cloned().unwrap_or_else(|| UserModel::default_for(user_id));
        model.apply(patch);
        model.validate()?;
        let mut next = users.clone();
        next.insert(user_id.to_string(), model.clone());
        if let Some(path) = &self.path {
            let tmp = path.with_extension("json.tmp");
            fs::write(&tmp, serde_json::to_vec_pretty(&next).expect("users serialize"))?;
            fs::rename(&tmp, path)?;
        }
        *users = next;
        Ok(model)
    }
}

/// Explanation templates keyed by criterion and literacy level.
#[derive(Debug, Clone)]
pub struct Templates {
    map: BTreeMap<(Criterion, Level), String>,
}

macro_rules! embedded {
    ($($c:literal),*) => {
        [$(
            ($c, "novice", include_str!(concat!("../resources/templates/", $c, ".novice.txt"))),
            ($c, "intermediate", include_str!(concat!("../resources/templates/", $c, ".intermediate.txt"))),
            ($c, "expert", include_str!(concat!("../resources/templates/", $c, ".expert.txt"))),
        )*]
    };
}

const EMBEDDED: [(&str, &str, &str); 21] = embedded!(
    "text_similarity",
    "tone",
    "writing_quality",
    "image_reuse",
    "image_manipulation",
    "video_reuse",
    "video_manipulation"
);

impl Default for Templates {
    fn default() -> Self {
        Templates::embedded()
    }
}

impl Templates {
    /// Templates compiled into the binary.
    pub fn embedded() -> Self {
        let mut map = BTreeMap::new();
        for (c, l, text) in EMBEDDED {
            let c: Criterion = c.parse().expect("embedded criterion");
            let l = Level::ALL.into_iter().find(|x| x.as_str() == l).expect("embedded level");
            map.insert((c, l), text.trim().to_string());
        }
        Templates { map }
    }

    /// Reads `<criterion>.<level>.txt` files from `dir`; every file must exist.
    pub fn load_dir(dir: &Path) -> Result<Self, CompanionError> {
        let mut map = BTreeMap::new();
        for c in Criterion::ALL {
            for l in Level::ALL {
                let name = format!("{}.{}.txt", c.as_str(), l.as_str());
                let text = fs::read_to_string(dir.join(&name)).map_err(|e| match e.kind() {
                    io::ErrorKind::NotFound => CompanionError::MissingTemplate(name.clone()),
                    _ => CompanionError::Io(e),
                })?;
                map.insert((c, l), text.trim().to_string());
            }
        }
        Ok(Templates { map })
    }

    pub fn get(&self, c: Criterion, l: Level) -> &str {
        self.map.get(&(c, l)).map(String::as_str).unwrap_or_default()
    }

    pub fn render(&self, c: Criterion, l: Level, score: f64, threshold: Option<f64>) -> String {
        let threshold = threshold.map_or_else(|| "n/a".to_string(), |t| format!("{t}"));
        self.get(c, l).replace("{score}", &format!("{score:.2}")).replace("{threshold}", &threshold)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Badge {
    BlueOk,
    RedCaution,
    GreyUnknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IconState {
    GreenPass,
    RedCaution,
    GreyUnavailable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Icon {
    pub state: IconState,
    pub short_label: String,
    pub summary_text: String,
    pub detail_text: String,
    /// A caution hidden by the user's preferences.
    pub muted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Presentation {
    pub badge: Badge,
    pub icons: BTreeMap<Criterion, Icon>,
}

/// The caution actually shown to this user for one result.
pub fn effective_caution(result: &AnalysisResult, pref: WarningPref) -> bool {
    result.status == Status::Caution && pref.enabled && result.score >= pref.sensitivity.floor()
}

fn measures_line(r: &AnalysisResult) -> String {
    let parts: Vec<String> = r.measures.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("Measures: {}.", parts.join(", "))
}

/// Maps an optional record to badge and icons for `user`.
pub fn present(
    record: Option<&VerificationRecord>,
    user: &UserModel,
    templates: &Templates,
) -> Result<Presentation, CompanionError> {
    user.validate()?;
    let Some(record) = record else {
        let icons = Criterion::ALL
            .into_iter()
            .map(|c| {
                let icon = Icon {
                    state: IconState::GreyUnavailable,
                    short_label: c.label().to_string(),
                    summary_text: "No verification information is available for this post yet.".to_string(),
                    detail_text: String::new(),
                    muted: false,
                };
                (c, icon)
            })
            .collect();
        return Ok(Presentation { badge: Badge::GreyUnknown, icons });
    };

    // Topic expertise can only raise the wording level, never the verdict.
    let literacy =
        user.domain_knowledge.get(&record.topic.topic).map_or(user.digital_literacy, |&d| d.max(user.digital_literacy));

    let mut icons = BTreeMap::new();
    for c in Criterion::ALL {
        let pref = user.pref(c);
        let icon = match record.results.get(&c) {
            None => Icon {
                state: IconState::GreyUnavailable,
                short_label: c.label().to_string(),
                summary_text: "This check did not run.".to_string(),
                detail_text: String::new(),
                muted: false,
            },
            Some(r) => {
                let caution = effective_caution(r, pref);
                let state = match r.status {
                    Status::Unavailable => IconState::GreyUnavailable,
                    _ if caution => IconState::RedCaution,
                    _ => IconState::GreenPass,
                };
                let mut detail = match r.status {
                    Status::Caution => templates.render(c, literacy, r.score, r.measures.get("threshold").copied()),
                    _ => r.explanation.clone(),
                };
                if (literacy == Level::Expert || pref.sensitivity == Sensitivity::High) && !r.measures.is_empty() {
                    detail.push_str("\n\n");
                    detail.push_str(&measures_line(r));
                }
                Icon {
                    state,
                    short_label: c.label().to_string(),
                    summary_text: r.explanation.clone(),
                    detail_text: detail,
                    muted: r.status == Status::Caution && !caution,
                }
            }
        };
        icons.insert(c, icon);
    }
    let badge =
        if icons.values().any(|i| i.state == IconState::RedCaution) { Badge::RedCaution } else { Badge::BlueOk };
    Ok(Presentation { badge, icons })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_templates_match_shipped_files() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("resources/templates");
        let loaded = Templates::load_dir(&dir).unwrap();
        let embedded = Templates::embedded();
        for c in Criterion::ALL {
            for l in Level::ALL {
                assert_eq!(loaded.get(c, l), embedded.get(c, l));
                assert!(!embedded.get(c, l).is_empty());
            }
        }
        let text = embedded.render(Criterion::WritingQuality, Level::Expert, 0.4, Some(50.0));
        assert!(text.contains("0.40") && text.contains("50"));
    }

    #[test]
    fn patch_validation() {
        assert!(UserPatch::from_json(br#"{"warning_prefs":{"tone":{"sensitivity":"max"}}}"#).is_err());
        assert!(UserPatch::from_json(br#"{"colour":"red"}"#).is_err());
        assert!(UserPatch::from_json(br#"{"digital_literacy":"guru"}"#).is_err());
        let p = UserPatch::from_json(br#"{"warning_prefs":{"tone":{"enabled":false}}}"#).unwrap();
        let mut u = UserModel::default_for("u1");
        u.apply(&p);
        assert!(!u.pref(Criterion::Tone).enabled);
        assert_eq!(u.pref(Criterion::Tone).sensitivity, Sensitivity::Normal);
    }

    #[test]
    fn store_persists_and_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("users.json");
        let store = UserStore::open(&path).unwrap();
        assert_eq!(store.get("fresh"), UserModel::default_for("fresh"));
        let patch = UserPatch { digital_literacy: Some(Level::Expert), ..UserPatch::default() };
        store.update("u1", &patch).unwrap();
        let reopened = UserStore::open(&path).unwrap();
        assert_eq!(reopened.get("u1").digital_literacy, Level::Expert);
    }
}
