//! Tab-separated raw inputs: triples, entity aliases, relation aliases and
//! the per-entity corpus.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::text::normalize_ascii;
use super::{KgError, NodeId, RelationId};

/// The default banned relation names.
pub const DEFAULT_BANNED_RELATIONS: [&str; 3] = ["instance of", "subclass of", "part of"];

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Triple {
    pub head: NodeId,
    pub relation: RelationId,
    pub tail: NodeId,
}

/// Unreconciled contents of the four input files.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawDataset {
    pub triples: Vec<Triple>,
    pub entity_aliases: BTreeMap<NodeId, Vec<String>>,
    pub relation_aliases: BTreeMap<RelationId, Vec<String>>,
    pub corpus: BTreeMap<NodeId, String>,
}

#[derive(Clone, Debug)]
pub struct RawPaths {
    pub triples: PathBuf,
    pub entity_aliases: PathBuf,
    pub relation_aliases: PathBuf,
    pub corpus: PathBuf,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ParseMode {
    /// Skip malformed lines and report them.
    #[default]
    Lenient,
    /// Fail on the first malformed line.
    Strict,
}

/// Malformed lines seen while parsing one file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SkipReport {
    pub skipped: usize,
    /// 1-based line numbers, capped at the first 100.
    pub lines: Vec<usize>,
}

impl SkipReport {
    fn record(&mut self, line: usize) {
        self.skipped += 1;
        if self.lines.len() < 100 {
            self.lines.push(line);
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ParseReport {
    pub triples: SkipReport,
    pub entity_aliases: SkipReport,
    pub relation_aliases: SkipReport,
    pub corpus: SkipReport,
}

impl ParseReport {
    pub fn total_skipped(&self) -> usize {
        self.triples.skipped + self.entity_aliases.skipped + self.relation_aliases.skipped + self.corpus.skipped
    }
}

fn open(path: &Path) -> Result<BufReader<File>, KgError> {
    File::open(path).map(BufReader::new).map_err(|source| KgError::Io { path: path.to_path_buf(), source })
}

/// Reads all four files, one thread per file.
pub fn parse_raw_dataset(paths: &RawPaths, mode: ParseMode) -> Result<(RawDataset, ParseReport), KgError> {
    let label = |p: &Path| p.display().to_string();
    let (triples, entity, relation, corpus) = std::thread::scope(|s| {
        let t = s.spawn(|| parse_triples(open(&paths.triples)?, mode, &label(&paths.triples)));
        let e = s.spawn(|| parse_aliases(open(&paths.entity_aliases)?, mode, &label(&paths.entity_aliases)));
        let r = s.spawn(|| parse_aliases(open(&paths.relation_aliases)?, mode, &label(&paths.relation_aliases)));
        let c = s.spawn(|| parse_corpus(open(&paths.corpus)?, mode, &label(&paths.corpus)));
        (
            t.join().expect("triples parser panicked"),
            e.join().expect("alias parser panicked"),
            r.join().expect("alias parser panicked"),
            c.join().expect("corpus parser panicked"),
        )
    });
    let (triples, triples_report) = triples?;
    let (entity_aliases, entity_report) = entity?;
    let (relation_aliases, relation_report) = relation?;
    let (corpus, corpus_report) = corpus?;
    let relation_aliases = relation_aliases.into_iter().map(|(k, v)| (RelationId::new(k), v)).collect();
    let entity_aliases = entity_aliases.into_iter().map(|(k, v)| (NodeId::new(k), v)).collect();
    Ok((
        RawDataset { triples, entity_aliases, relation_aliases, corpus },
        ParseReport {
            triples: triples_report,
            entity_aliases: entity_report,
            relation_aliases: relation_report,
            corpus: corpus_report,
        },
    ))
}

fn lines<'a, R: BufRead + 'a>(reader: R, file: &str) -> impl Iterator<Item = Result<(usize, String), KgError>> + 'a {
    let file = file.to_owned();
    reader.lines().enumerate().map(move |(i, line)| {
        line.map(|l| (i + 1, l.trim_end_matches('\r').to_owned()))
            .map_err(|source| KgError::Io { path: PathBuf::from(&file), source })
    })
}

fn malformed(mode: ParseMode, report: &mut SkipReport, file: &str, line: usize, msg: &str) -> Result<(), KgError> {
    match mode {
        ParseMode::Strict => Err(KgError::Format { file: file.to_owned(), line, message: msg.to_owned() }),
        ParseMode::Lenient => {
            report.record(line);
            Ok(())
        }
    }
}

/// `head \t relation \t tail` per line.
pub fn parse_triples<R: BufRead>(reader: R, mode: ParseMode, file: &str) -> Result<(Vec<Triple>, SkipReport), KgError> {
    let mut out = Vec::new();
    let mut report = SkipReport::default();
    for item in lines(reader, file) {
        let (n, line) = item?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() < 3 || fields[..3].iter().any(|f| f.is_empty()) {
            malformed(mode, &mut report, file, n, "expected head, relation and tail")?;
            continue;
        }
        out.push(Triple { head: fields[0].into(), relation: fields[1].into(), tail: fields[2].into() });
    }
    Ok((out, report))
}

/// `id \t alias1 \t alias2 ...` per line. Repeated ids accumulate aliases.
pub fn parse_aliases<R: BufRead>(
    reader: R,
    mode: ParseMode,
    file: &str,
) -> Result<(BTreeMap<String, Vec<String>>, SkipReport), KgError> {
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut report = SkipReport::default();
    for item in lines(reader, file) {
        let (n, line) = item?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let id = fields.next().unwrap_or_default().trim();
        let aliases: Vec<String> = fields.map(str::trim).filter(|a| !a.is_empty()).map(str::to_owned).collect();
        if id.is_empty() || aliases.is_empty() {
            malformed(mode, &mut report, file, n, "expected an id and at least one alias")?;
            continue;
        }
        let entry = out.entry(id.to_owned()).or_default();
        for alias in aliases {
            if !entry.contains(&alias) {
                entry.push(alias);
            }
        }
    }
    Ok((out, report))
}

/// `id \t text` per line. The first text for an id wins.
pub fn parse_corpus<R: BufRead>(
    reader: R,
    mode: ParseMode,
    file: &str,
) -> Result<(BTreeMap<NodeId, String>, SkipReport), KgError> {
    let mut out = BTreeMap::new();
    let mut report = SkipReport::default();
    for item in lines(reader, file) {
        let (n, line) = item?;
        if line.trim().is_empty() {
            continue;
        }
        let Some((id, text)) = line.split_once('\t') else {
            malformed(mode, &mut report, file, n, "expected an id and a text separated by a tab")?;
            continue;
        };
        let id = id.trim();
        if id.is_empty() {
            malformed(mode, &mut report, file, n, "empty id")?;
            continue;
        }
        out.entry(NodeId::new(id)).or_insert_with(|| text.to_owned());
    }
    Ok((out, report))
}

/// Drops every triple whose relation has an alias in `banned`, compared
/// case-insensitively after ASCII folding.
pub fn filter_relations(mut raw: RawDataset, banned: &BTreeSet<String>) -> RawDataset {
    if banned.is_empty() {
        return raw;
    }
    let key = |s: &str| normalize_ascii(s).trim().to_lowercase();
    let banned: BTreeSet<String> = banned.iter().map(|b| key(b)).collect();
    let banned_ids: BTreeSet<RelationId> = raw
        .relation_aliases
        .iter()
        .filter(|(_, aliases)| aliases.iter().any(|a| banned.contains(&key(a))))
        .map(|(id, _)| id.clone())
        .collect();
    raw.triples.retain(|t| !banned_ids.contains(&t.relation));
    raw
}

pub fn default_banned() -> BTreeSet<String> {
    DEFAULT_BANNED_RELATIONS.iter().map(|s| s.to_string()).collect()
}
