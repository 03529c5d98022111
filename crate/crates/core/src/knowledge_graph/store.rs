use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use super::term::{Term, Triple};
use super::GraphError;

type Index = BTreeMap<Term, BTreeMap<Term, BTreeSet<Term>>>;

/// A triple pattern; `None` is a wildcard.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pattern {
    pub subject: Option<Term>,
    pub predicate: Option<Term>,
    pub object: Option<Term>,
}

impl Pattern {
    pub fn new(subject: Option<Term>, predicate: Option<Term>, object: Option<Term>) -> Self {
        Pattern { subject, predicate, object }
    }

    pub fn subject(s: Term) -> Self {
        Pattern { subject: Some(s), ..Pattern::default() }
    }

    pub fn sp(s: Term, p: &str) -> Self {
        Pattern { subject: Some(s), predicate: Some(Term::iri(p)), object: None }
    }

    pub fn po(p: &str, o: Term) -> Self {
        Pattern { subject: None, predicate: Some(Term::iri(p)), object: Some(o) }
    }
}

/// In-memory triple set indexed three ways (SPO, POS, OSP).
#[derive(Debug, Default, Clone)]
pub struct TripleStore {
    spo: Index,
    pos: Index,
    osp: Index,
    len: usize,
}

fn index_insert(idx: &mut Index, a: &Term, b: &Term, c: &Term) -> bool {
    idx.entry(a.clone()).or_default().entry(b.clone()).or_default().insert(c.clone())
}

fn index_remove(idx: &mut Index, a: &Term, b: &Term, c: &Term) -> bool {
    let Some(level) = idx.get_mut(a) else { return false };
    let Some(leaf) = level.get_mut(b) else { return false };
    let removed = leaf.remove(c);
    if leaf.is_empty() {
        level.remove(b);
    }
    if level.is_empty() {
        idx.remove(a);
    }
    removed
}

impl TripleStore {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.spo.get(&t.subject).and_then(|l| l.get(&t.predicate)).is_some_and(|leaf| leaf.contains(&t.object))
    }

    pub fn insert(&mut self, t: &Triple) -> bool {
        if !index_insert(&mut self.spo, &t.subject, &t.predicate, &t.object) {
            return false;
        }
        index_insert(&mut self.pos, &t.predicate, &t.object, &t.subject);
        index_insert(&mut self.osp, &t.object, &t.subject, &t.predicate);
        self.len += 1;
        true
    }

    pub fn remove(&mut self, t: &Triple) -> bool {
        if !index_remove(&mut self.spo, &t.subject, &t.predicate, &t.object) {
            return false;
        }
        index_remove(&mut self.pos, &t.predicate, &t.object, &t.subject);
        index_remove(&mut self.osp, &t.object, &t.subject, &t.predicate);
        self.len -= 1;
        true
    }

    /// All triples matching `pat`, in SPO order.
    pub fn matching(&self, pat: &Pattern) -> Vec<Triple> {
        let mut out = Vec::new();
        let (s, p, o) = (pat.subject.as_ref(), pat.predicate.as_ref(), pat.object.as_ref());
        let push = |out: &mut Vec<Triple>, s: &Term, p: &Term, o: &Term| {
            out.push(Triple { subject: s.clone(), predicate: p.clone(), object: o.clone() })
        };
        match (s, p, o) {
            (Some(s), _, _) => {
                let Some(level) = self.spo.get(s) else { return out };
                for (pp, leaf) in level {
                    if p.is_some_and(|p| p != pp) {
                        continue;
                    }
                    for oo in leaf {
                        if o.is_none_or(|o| o == oo) {
                            push(&mut out, s, pp, oo);
                        }
                    }
                }
            }
            (None, Some(p), _) => {
                let Some(level) = self.pos.get(p) else { return out };
                for (oo, leaf) in level {
                    if o.is_some_and(|o| o != oo) {
                        continue;
                    }
                    for ss in leaf {
                        push(&mut out, ss, p, oo);
                    }
                }
                out.sort();
            }
            (None, None, Some(o)) => {
                let Some(level) = self.osp.get(o) else { return out };
                for (ss, leaf) in level {
                    for pp in leaf {
                        push(&mut out, ss, pp, o);
                    }
                }
            }
            (None, None, None) => {
                for (ss, level) in &self.spo {
                    for (pp, leaf) in level {
                        for oo in leaf {
                            push(&mut out, ss, pp, oo);
                        }
                    }
                }
            }
        }
        out
    }

    /// First object for `(s, p, ?)`.
    pub fn object(&self, s: &Term, p: &str) -> Option<&Term> {
        self.spo.get(s)?.get(&Term::iri(p))?.iter().next()
    }

    pub fn subjects(&self, p: &str, o: &Term) -> Vec<Term> {
        self.pos
            .get(&Term::iri(p))
            .and_then(|l| l.get(o))
            .map(|leaf| leaf.iter().cloned().collect())
            .unwrap_or_default()
    }

    pub fn has_subject(&self, s: &Term) -> bool {
        self.spo.contains_key(s)
    }
}

/// One atomic change set.
#[derive(Debug, Default, Clone)]
pub struct Transaction {
    pub retract: Vec<Triple>,
    pub assert: Vec<Triple>,
}

/// Triple store with an append-only N-Triples transaction log.
///
/// Log layout: `# begin N`, one line per change (retractions prefixed with
/// `- `), then `# commit N`. A trailing transaction without its commit marker
/// is ignored on reload.
#[derive(Debug)]
pub struct GraphStore {
    store: RwLock<TripleStore>,
    log: Option<Mutex<LogWriter>>,
}

#[derive(Debug)]
struct LogWriter {
    path: PathBuf,
    file: File,
    next_tx: u64,
}

impl Default for GraphStore {
    fn default() -> Self {
        GraphStore::in_memory()
    }
}

impl GraphStore {
    pub fn in_memory() -> Self {
        GraphStore { store: RwLock::new(TripleStore::default()), log: None }
    }

    pub fn open(path: impl AsRef<Path>) -> Result<Self, GraphError> {
        let path = path.as_ref().to_path_buf();
        let (store, next_tx) = if path.exists() { replay(&path)? } else { (TripleStore::default(), 0) };
        let mut file = OpenOptions::new().create(true).append(true).open(&path)?;
        // A torn final line must not swallow the next begin marker.
        let bytes = std::fs::read(&path)?;
        if bytes.last().is_some_and(|&b| b != b'\n') {
            file.write_all(b"\n")?;
        }
        Ok(GraphStore { store: RwLock::new(store), log: Some(Mutex::new(LogWriter { path, file, next_tx })) })
    }

    pub fn log_path(&self) -> Option<PathBuf> {
        self.log.as_ref().map(|l| l.lock().expect("graph log poisoned").path.clone())
    }

    /// Applies `tx` atomically: the log entry is durable before readers can see
    /// the change. Returns (retracted, asserted) counts of effective changes.
    pub fn commit(&self, tx: &Transaction) -> Result<(usize, usize), GraphError> {
        let mut log = self.log.as_ref().map(|l| l.lock().expect("graph log poisoned"));
        let mut store = self.store.write().expect("graph store poisoned");

        let mut retract: Vec<&Triple> = Vec::new();
        let mut seen = BTreeSet::new();
        for t in &tx.retract {
            if store.contains(t) && seen.insert(t) {
                retract.push(t);
            }
        }
        let retracted: BTreeSet<&Triple> = retract.iter().copied().collect();
        let mut assert: Vec<&Triple> = Vec::new();
        let mut seen = BTreeSet::new();
        for t in &tx.assert {
            if (!store.contains(t) || retracted.contains(t)) && seen.insert(t) {
                assert.push(t);
            }
        }
        // Net effect: a triple both retracted and re-asserted is left alone.
        let reasserted: BTreeSet<&Triple> = assert.iter().copied().filter(|t| retracted.contains(t)).collect();
        retract.retain(|t| !reasserted.contains(t));
        assert.retain(|t| !reasserted.contains(t));
        if retract.is_empty() && assert.is_empty() {
            return Ok((0, 0));
        }

        if let Some(log) = log.as_mut() {
            let n = log.next_tx;
            let mut buf = format!("# begin {n}\n");
            for t in &retract {
                buf.push_str("- ");
                buf.push_str(&t.to_ntriples());
                buf.push('\n');
            }
            for t in &assert {
                buf.push_str(&t.to_ntriples());
                buf.push('\n');
            }
            buf.push_str(&format!("# commit {n}\n"));
            log.file.write_all(buf.as_bytes())?;
            log.file.sync_data()?;
            log.next_tx += 1;
        }
        for t in &retract {
            store.remove(t);
        }
        for t in &assert {
            store.insert(t);
        }
        Ok((retract.len(), assert.len()))
    }

    /// Runs `f` against a consistent snapshot.
    pub fn read<R>(&self, f: impl FnOnce(&TripleStore) -> R) -> R {
        f(&self.store.read().expect("graph store poisoned"))
    }

    pub fn matching(&self, pat: &Pattern) -> Vec<Triple> {
        self.read(|s| s.matching(pat))
    }

    pub fn len(&self) -> usize {
        self.read(|s| s.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn replay(path: &Path) -> Result<(TripleStore, u64), GraphError> {
    let reader = BufReader::new(File::open(path)?);
    let mut store = TripleStore::default();
    let mut pending: Option<(u64, Transaction)> = None;
    let mut next_tx = 0;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let bad = |msg: String| GraphError::Log { line: lineno + 1, message: msg };
        if line.trim().is_empty() {
            continue;
        }
        if let Some(n) = line.strip_prefix("# begin ") {
            let n: u64 = n.trim().parse().map_err(|_| bad("bad begin marker".into()))?;
            pending = Some((n, Transaction::default()));
        } else if let Some(n) = line.strip_prefix("# commit ") {
            let n: u64 = n.trim().parse().map_err(|_| bad("bad commit marker".into()))?;
            match pending.take() {
                Some((open, tx)) if open == n => {
                    for t in &tx.retract {
                        store.remove(t);
                    }
                    for t in &tx.assert {
                        store.insert(t);
                    }
                    next_tx = n + 1;
                }
                _ => return Err(bad(format!("commit {n} without matching begin"))),
            }
        } else if line.starts_with('#') {
            continue;
        } else {
            let (_, tx) = pending.as_mut().ok_or_else(|| bad("change outside a transaction".into()))?;
            match line.strip_prefix("- ") {
                Some(rest) => tx.retract.push(Triple::parse_ntriples(rest).map_err(bad)?),
                None => tx.assert.push(Triple::parse_ntriples(&line).map_err(bad)?),
            }
        }
    }
    if let Some((n, _)) = pending {
        log::warn!("graph log {}: discarding uncommitted transaction {n}", path.display());
    }
    Ok((store, next_tx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str, p: &str, o: Term) -> Triple {
        Triple::new(Term::iri(s), p, o)
    }

    fn sample() -> Vec<Triple> {
        vec![
            t("prov-data:a", "bib:title", Term::string("A")),
            t("prov-data:a", "bib:publisher", Term::iri("agent:x")),
            t("prov-data:b", "bib:publisher", Term::iri("agent:x")),
            t("agent:x", "prov-data:name", Term::string("X")),
        ]
    }

    #[test]
    fn all_pattern_shapes_agree_with_a_scan() {
        let mut store = TripleStore::default();
        for tr in sample() {
            assert!(store.insert(&tr));
        }
        assert!(!store.insert(&sample()[0]));
        let all = store.matching(&Pattern::default());
        assert_eq!(all.len(), 4);
        let candidates: Vec<Option<Term>> = vec![
            None,
            Some(Term::iri("prov-data:a")),
            Some(Term::iri("bib:publisher")),
            Some(Term::iri("agent:x")),
            Some(Term::string("A")),
        ];
        for s in &candidates {
            for p in &candidates {
                for o in &candidates {
                    let pat = Pattern::new(s.clone(), p.clone(), o.clone());
                    let mut got = store.matching(&pat);
                    got.sort();
                    let expect: Vec<Triple> = all
                        .iter()
                        .filter(|tr| {
                            s.as_ref().is_none_or(|s| *s == tr.subject)
                                && p.as_ref().is_none_or(|p| *p == tr.predicate)
                                && o.as_ref().is_none_or(|o| *o == tr.object)
                        })
                        .cloned()
                        .collect();
                    assert_eq!(got, expect, "{pat:?}");
                }
            }
        }
        assert!(store.remove(&sample()[1]));
        assert_eq!(store.subjects("bib:publisher", &Term::iri("agent:x")), vec![Term::iri("prov-data:b")]);
        assert_eq!(store.len(), 3);
    }

    #[test]
    fn log_replay_restores_state_and_skips_torn_tail() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("graph.nt");
        {
            let g = GraphStore::open(&path).unwrap();
            g.commit(&Transaction { retract: vec![], assert: sample() }).unwrap();
            g.commit(&Transaction { retract: vec![sample()[0].clone()], assert: vec![] }).unwrap();
            assert_eq!(g.len(), 3);
        }
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        writeln!(f, "# begin 2\n{}", sample()[0].to_ntriples()).unwrap();
        drop(f);
        let g = GraphStore::open(&path).unwrap();
        assert_eq!(g.len(), 3);
        assert!(!g.read(|s| s.contains(&sample()[0])));
    }

    #[test]
    fn commit_applies_net_effect_only() {
        let g = GraphStore::in_memory();
        assert_eq!(g.commit(&Transaction { retract: vec![], assert: sample() }).unwrap(), (0, 4));
        let same = Transaction { retract: sample(), assert: sample() };
        assert_eq!(g.commit(&same).unwrap(), (0, 0));
        assert_eq!(g.len(), 4);
    }
}
