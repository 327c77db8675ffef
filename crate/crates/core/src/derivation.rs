//! Derivation records (`source`, `target`, `SRC:TGT`, affix): reading,
//! fusion of partial records, affix inference and per-language counts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{self, BufRead};

use thiserror::Error;

use crate::diagnostic::{Code, Diagnostic};
use crate::schema::{Dimension, Inventory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Prefix,
    Suffix,
}

/// An affix as displayed: `-ico` is a suffix, `sus-` a prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Affix {
    pub text: String,
    pub orientation: Orientation,
}

impl Affix {
    pub fn suffix(text: impl Into<String>) -> Self {
        Affix {
            text: text.into(),
            orientation: Orientation::Suffix,
        }
    }

    pub fn prefix(text: impl Into<String>) -> Self {
        Affix {
            text: text.into(),
            orientation: Orientation::Prefix,
        }
    }

    /// Parses the hyphenated display form.
    pub fn parse(display: &str) -> Option<Self> {
        let d = display.trim();
        match (d.strip_prefix('-'), d.strip_suffix('-')) {
            (Some(t), None) if !t.is_empty() && !t.contains('-') => Some(Affix::suffix(t)),
            (None, Some(t)) if !t.is_empty() && !t.contains('-') => Some(Affix::prefix(t)),
            _ => None,
        }
    }
}

impl fmt::Display for Affix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.orientation {
            Orientation::Suffix => write!(f, "-{}", self.text),
            Orientation::Prefix => write!(f, "{}-", self.text),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DerivationRecord {
    pub language: String,
    pub source: String,
    pub target: String,
    pub source_pos: Option<String>,
    pub target_pos: Option<String>,
    pub affix: Option<Affix>,
}

impl DerivationRecord {
    pub fn new(
        language: impl Into<String>,
        source: impl Into<String>,
        target: impl Into<String>,
    ) -> Self {
        DerivationRecord {
            language: language.into(),
            source: source.into(),
            target: target.into(),
            source_pos: None,
            target_pos: None,
            affix: None,
        }
    }

    pub fn with_pos(mut self, source_pos: &str, target_pos: &str) -> Self {
        self.source_pos = Some(source_pos.to_string());
        self.target_pos = Some(target_pos.to_string());
        self
    }

    pub fn with_affix(mut self, affix: Affix) -> Self {
        self.affix = Some(affix);
        self
    }

    pub fn is_complete(&self) -> bool {
        self.source_pos.is_some() && self.target_pos.is_some() && self.affix.is_some()
    }

    fn key(&self) -> (&str, &str, &str) {
        (&self.language, &self.source, &self.target)
    }
}

/// Formats a record as `source \t target \t SRC:TGT \t affix \t language`;
/// missing values are empty.
pub fn format_derivation(r: &DerivationRecord) -> String {
    let pos = match (&r.source_pos, &r.target_pos) {
        (None, None) => String::new(),
        (s, t) => format!(
            "{}:{}",
            s.as_deref().unwrap_or(""),
            t.as_deref().unwrap_or("")
        ),
    };
    let affix = r.affix.as_ref().map(Affix::to_string).unwrap_or_default();
    format!(
        "{}\t{}\t{}\t{}\t{}",
        r.source, r.target, pos, affix, r.language
    )
}

/// Records with their line numbers, and the diagnostics for skipped rows.
pub type ReadResult = (Vec<(usize, DerivationRecord)>, Vec<Diagnostic>);

/// Reads derivation rows. The optional fifth column overrides
/// `default_language`. Bad rows become diagnostics and are skipped.
pub fn read_derivations<R: BufRead>(reader: R, default_language: &str) -> io::Result<ReadResult> {
    let inventory = Inventory::standard();
    let mut records = Vec::new();
    let mut diags = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let n = i + 1;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        if !(2..=5).contains(&cols.len()) {
            diags.push(Diagnostic::error(
                n,
                Code::MalformedLine,
                format!("expected 2 to 5 columns, found {}", cols.len()),
            ));
            continue;
        }
        let (source, target) = (cols[0], cols[1]);
        if source.is_empty() || target.is_empty() {
            diags.push(Diagnostic::error(
                n,
                Code::EmptyField,
                "source or target is empty",
            ));
            continue;
        }
        if source == target {
            diags.push(Diagnostic::error(
                n,
                Code::SameLemma,
                format!("{source} derives itself"),
            ));
            continue;
        }
        let language = cols
            .get(4)
            .filter(|l| !l.is_empty())
            .copied()
            .unwrap_or(default_language);
        let mut rec = DerivationRecord::new(language, source, target);

        if let Some(pos) = cols.get(2).filter(|p| !p.is_empty()) {
            let Some((s, t)) = pos.split_once(':') else {
                diags.push(Diagnostic::error(
                    n,
                    Code::BadPos,
                    format!("{pos:?} is not SRC:TGT"),
                ));
                continue;
            };
            let check = |p: &str| -> Result<Option<String>, String> {
                if p.is_empty() {
                    return Ok(None);
                }
                match inventory.lookup(p) {
                    Some(tag) if tag.dimension() == Dimension::PartOfSpeech => {
                        Ok(Some(tag.text().to_string()))
                    }
                    _ => Err(format!("{p:?} is not a part-of-speech tag")),
                }
            };
            match (check(s), check(t)) {
                (Ok(s), Ok(t)) => {
                    rec.source_pos = s;
                    rec.target_pos = t;
                }
                (Err(m), _) | (_, Err(m)) => {
                    diags.push(Diagnostic::error(n, Code::BadPos, m));
                    continue;
                }
            }
        }
        if let Some(a) = cols.get(3).filter(|a| !a.is_empty()) {
            match Affix::parse(a) {
                Some(affix) => rec.affix = Some(affix),
                None => {
                    diags.push(Diagnostic::error(
                        n,
                        Code::BadAffix,
                        format!("{a:?} needs one leading or trailing hyphen"),
                    ));
                    continue;
                }
            }
        }
        records.push((n, rec));
    }
    Ok((records, diags))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Field {
    SourcePos,
    TargetPos,
    Affix,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::SourcePos => "source POS",
            Field::TargetPos => "target POS",
            Field::Affix => "affix",
        })
    }
}

/// Two records for the same pair disagree on a field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldConflict {
    pub language: String,
    pub source: String,
    pub target: String,
    pub field: Field,
    pub values: Vec<String>,
}

impl fmt::Display for FieldConflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} -> {}: conflicting {} values {}",
            self.language,
            self.source,
            self.target,
            self.field,
            self.values.join(", ")
        )
    }
}

/// Merges records per (language, source, target). Each field takes its one
/// non-missing value; disagreeing values leave the field missing and are
/// reported. Output is sorted by (language, source, target).
pub fn fuse<I>(records: I) -> (Vec<DerivationRecord>, Vec<FieldConflict>)
where
    I: IntoIterator<Item = DerivationRecord>,
{
    let mut groups: BTreeMap<(String, String, String), Vec<DerivationRecord>> = BTreeMap::new();
    for r in records {
        let (l, s, t) = r.key();
        groups
            .entry((l.to_string(), s.to_string(), t.to_string()))
            .or_default()
            .push(r);
    }
    let mut out = Vec::with_capacity(groups.len());
    let mut conflicts = Vec::new();
    for ((language, source, target), group) in groups {
        let mut conflict = |field: Field, values: Vec<String>| {
            conflicts.push(FieldConflict {
                language: language.clone(),
                source: source.clone(),
                target: target.clone(),
                field,
                values,
            })
        };
        let source_pos = merge(group.iter().map(|r| r.source_pos.clone()), |v| {
            conflict(Field::SourcePos, v)
        });
        let target_pos = merge(group.iter().map(|r| r.target_pos.clone()), |v| {
            conflict(Field::TargetPos, v)
        });
        let affix = merge_with(group.iter().map(|r| r.affix.clone()), |v| {
            conflict(Field::Affix, v.iter().map(Affix::to_string).collect())
        });
        out.push(DerivationRecord {
            language,
            source,
            target,
            source_pos,
            target_pos,
            affix,
        });
    }
    (out, conflicts)
}

fn merge(
    values: impl Iterator<Item = Option<String>>,
    on_conflict: impl FnMut(Vec<String>),
) -> Option<String> {
    merge_with(values, on_conflict)
}

fn merge_with<T: Ord + Clone>(
    values: impl Iterator<Item = Option<T>>,
    mut on_conflict: impl FnMut(Vec<T>),
) -> Option<T> {
    let distinct: BTreeSet<T> = values.flatten().collect();
    match distinct.len() {
        0 => None,
        1 => distinct.into_iter().next(),
        _ => {
            on_conflict(distinct.into_iter().collect());
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Confidence {
    Exact,
    Truncating,
    Weak,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InferredAffix {
    pub affix: Affix,
    pub confidence: Confidence,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferError {
    #[error("{0} and {1} share no prefix or suffix")]
    NoRelation(String, String),
    #[error("source and target are both {0:?}")]
    SameLemma(String),
}

/// Thresholds for recognising a suffix that replaces stem-final material.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationHeuristic {
    /// Shortest common prefix accepted.
    pub min_common_prefix: usize,
    /// Most characters of the source that may be dropped.
    pub max_truncation: usize,
}

impl Default for TruncationHeuristic {
    fn default() -> Self {
        TruncationHeuristic {
            min_common_prefix: 3,
            max_truncation: 3,
        }
    }
}

/// Guesses the affix that turns `source` into `target`.
pub fn infer_affix(
    source: &str,
    target: &str,
    h: TruncationHeuristic,
) -> Result<InferredAffix, InferError> {
    if source == target {
        return Err(InferError::SameLemma(source.to_string()));
    }
    let no_relation = || InferError::NoRelation(source.to_string(), target.to_string());
    if let Some(a) = target.strip_suffix(source).filter(|a| !a.is_empty()) {
        return Ok(InferredAffix {
            affix: Affix::prefix(a),
            confidence: Confidence::Exact,
        });
    }
    if let Some(a) = target.strip_prefix(source).filter(|a| !a.is_empty()) {
        return Ok(InferredAffix {
            affix: Affix::suffix(a),
            confidence: Confidence::Exact,
        });
    }
    let prefix = common_prefix_bytes(source, target);
    let suffix = common_suffix_bytes(source, target);
    if prefix == 0 && suffix == 0 {
        return Err(no_relation());
    }
    let source_chars = source.chars().count();
    let prefix_chars = source[..prefix].chars().count();
    let threshold = h
        .min_common_prefix
        .max(source_chars.saturating_sub(h.max_truncation));
    let (affix, confidence) = if prefix_chars >= threshold {
        (Affix::suffix(&target[prefix..]), Confidence::Truncating)
    } else if suffix > prefix {
        (
            Affix::prefix(&target[..target.len() - suffix]),
            Confidence::Weak,
        )
    } else {
        (Affix::suffix(&target[prefix..]), Confidence::Weak)
    };
    if affix.text.is_empty() {
        return Err(no_relation());
    }
    Ok(InferredAffix { affix, confidence })
}

fn common_prefix_bytes(a: &str, b: &str) -> usize {
    a.char_indices()
        .zip(b.chars())
        .find(|((_, x), y)| x != y)
        .map(|((i, _), _)| i)
        .unwrap_or_else(|| a.len().min(b.len()))
}

fn common_suffix_bytes(a: &str, b: &str) -> usize {
    let mut n = 0;
    for (x, y) in a.chars().rev().zip(b.chars().rev()) {
        if x != y {
            break;
        }
        n += x.len_utf8();
    }
    n
}

/// Whether the record's affix can produce its target. A suffix may replace
/// stem-final material of the source.
pub fn validate_affix(record: &DerivationRecord) -> bool {
    let Some(affix) = &record.affix else {
        return false;
    };
    match affix.orientation {
        Orientation::Prefix => record.target.starts_with(&affix.text),
        Orientation::Suffix => record
            .target
            .strip_suffix(&affix.text)
            .is_some_and(|stem| record.source.starts_with(stem)),
    }
}

/// Fills missing affixes that can be inferred exactly.
pub fn fill_exact_affixes(records: &mut [DerivationRecord], h: TruncationHeuristic) -> usize {
    let mut filled = 0;
    for r in records.iter_mut().filter(|r| r.affix.is_none()) {
        if let Ok(inf) = infer_affix(&r.source, &r.target, h) {
            if inf.confidence == Confidence::Exact {
                r.affix = Some(inf.affix);
                filled += 1;
            }
        }
    }
    filled
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DerivationStats {
    pub lemma_count: usize,
    pub derivation_count: usize,
    pub morpheme_count: usize,
}

/// Per-language lemma, derivation and distinct-affix counts.
pub fn derivation_stats<'a>(
    records: impl IntoIterator<Item = &'a DerivationRecord>,
) -> BTreeMap<String, DerivationStats> {
    #[derive(Default)]
    struct Acc<'a> {
        lemmas: BTreeSet<&'a str>,
        affixes: BTreeSet<&'a Affix>,
        derivations: usize,
    }
    let mut per: BTreeMap<&str, Acc> = BTreeMap::new();
    for r in records {
        let a = per.entry(&r.language).or_default();
        a.lemmas.insert(&r.source);
        a.lemmas.insert(&r.target);
        a.affixes.extend(&r.affix);
        a.derivations += 1;
    }
    per.into_iter()
        .map(|(l, a)| {
            (
                l.to_string(),
                DerivationStats {
                    lemma_count: a.lemmas.len(),
                    derivation_count: a.derivations,
                    morpheme_count: a.affixes.len(),
                },
            )
        })
        .collect()
}

/// Renders the statistics as `language \t lemmas \t derivations \t morphemes`.
pub fn format_stats(stats: &BTreeMap<String, DerivationStats>) -> String {
    let mut out = String::from("language\tlemmas\tderivations\tmorphemes\n");
    for (l, s) in stats {
        out.push_str(&format!(
            "{l}\t{}\t{}\t{}\n",
            s.lemma_count, s.derivation_count, s.morpheme_count
        ));
    }
    out
}
