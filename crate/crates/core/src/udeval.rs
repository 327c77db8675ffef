//! Scoring a UniMorph dataset against Universal Dependencies treebanks.
//!
//! Treebank tokens are mapped to flat UniMorph bundles with a per-language
//! profile, deduplicated to (lemma, form, bundle) types, and looked up in an
//! index of the dataset.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::{self, BufRead};

use thiserror::Error;

use crate::dataset::InflectionRecord;
use crate::diagnostic::{Code, Diagnostic};
use crate::schema::{
    hierarchical_to_flat, Dimension, FeatureBundle, FeatureNode, FeatureTag, Inventory,
    LanguageProfile, SchemaKind,
};

/// One basic token line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UdToken {
    pub line: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub feats: BTreeMap<String, BTreeSet<String>>,
}

/// Reads CoNLL-U, skipping comments, multiword ranges and empty nodes.
/// Lines without ten columns are reported and skipped.
pub fn read_conllu<R: BufRead>(reader: R) -> io::Result<(Vec<UdToken>, Vec<Diagnostic>)> {
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let n = i + 1;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            diags.push(Diagnostic::error(
                n,
                Code::MalformedLine,
                format!("expected 10 columns, found {}", cols.len()),
            ));
            continue;
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        if cols[1].is_empty() || cols[2].is_empty() || cols[1] == "_" && cols[2] == "_" {
            diags.push(Diagnostic::error(
                n,
                Code::EmptyField,
                "form or lemma is empty",
            ));
            continue;
        }
        let mut feats: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        if cols[5] != "_" {
            for pair in cols[5].split('|') {
                match pair.split_once('=') {
                    Some((k, v)) if !k.is_empty() && !v.is_empty() => {
                        feats
                            .entry(k.to_string())
                            .or_default()
                            .extend(v.split(',').map(str::to_string));
                    }
                    _ => diags.push(Diagnostic::warning(
                        n,
                        Code::MalformedLine,
                        format!("ignoring feature {pair:?}"),
                    )),
                }
            }
        }
        tokens.push(UdToken {
            line: n,
            form: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos: cols[3].to_string(),
            feats,
        });
    }
    Ok((tokens, diags))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// UD part-of-speech and feature mappings for one language. `None` marks a
/// part of speech or feature that is deliberately dropped.
#[derive(Debug, Clone, Default)]
pub struct MappingProfile {
    pub language: Option<String>,
    upos: BTreeMap<String, Option<Vec<FeatureTag>>>,
    feats: BTreeMap<(String, String), Option<Vec<FeatureTag>>>,
}

impl MappingProfile {
    /// Reads `UPOS \t TAG` and `Key=Value \t TAG` rows; the target may list
    /// several tags with `;` or be `DROP`. `%language \t code` names the
    /// language. Every tag must exist in `inventory`.
    pub fn from_tsv(text: &str, inventory: &Inventory) -> Result<Self, ProfileError> {
        let mut p = MappingProfile::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let malformed = |message: String| ProfileError::Malformed {
                line: i + 1,
                message,
            };
            let Some((key, value)) = line.split_once('\t') else {
                return Err(malformed("expected two tab-separated columns".into()));
            };
            let (key, value) = (key.trim(), value.trim());
            if key == "%language" {
                p.language = Some(value.to_string());
                continue;
            }
            let tags = if value.eq_ignore_ascii_case("DROP") {
                None
            } else {
                let mut tags = Vec::new();
                for t in value.split(';') {
                    tags.push(
                        inventory
                            .require(t.trim())
                            .map_err(|e| malformed(e.to_string()))?,
                    );
                }
                Some(tags)
            };
            match key.split_once('=') {
                Some((k, v)) if !k.is_empty() && !v.is_empty() => {
                    p.feats.insert((k.to_string(), v.to_string()), tags);
                }
                Some(_) => return Err(malformed(format!("bad feature {key:?}"))),
                None if !key.is_empty() => {
                    p.upos.insert(key.to_string(), tags);
                }
                None => return Err(malformed("empty key".into())),
            }
        }
        Ok(p)
    }

    pub fn upos_count(&self) -> usize {
        self.upos.len()
    }
}

/// Why a token does not take part in the evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Excluded {
    #[error("UPOS {0} has no mapping")]
    UnmappedUpos(String),
    #[error("UPOS {0} is dropped")]
    DroppedUpos(String),
}

/// Maps one token to a canonical flat bundle. A part-of-speech tag coming
/// from a feature (e.g. participles) replaces the one from UPOS.
pub fn map_ud_to_unimorph(
    token: &UdToken,
    profile: &MappingProfile,
) -> Result<FeatureBundle, Excluded> {
    let pos = match profile.upos.get(&token.upos) {
        None => return Err(Excluded::UnmappedUpos(token.upos.clone())),
        Some(None) => return Err(Excluded::DroppedUpos(token.upos.clone())),
        Some(Some(tags)) => tags,
    };
    let mut from_feats: Vec<FeatureTag> = Vec::new();
    for (k, values) in &token.feats {
        for v in values {
            if let Some(Some(tags)) = profile.feats.get(&(k.clone(), v.clone())) {
                from_feats.extend(tags.iter().cloned());
            }
        }
    }
    let feat_has_pos = from_feats
        .iter()
        .any(|t| t.dimension() == Dimension::PartOfSpeech);
    let mut tags: Vec<FeatureTag> = if feat_has_pos {
        Vec::new()
    } else {
        pos.clone()
    };
    for t in from_feats {
        if !tags.contains(&t) {
            tags.push(t);
        }
    }
    let bundle = FeatureBundle::new(tags.into_iter().map(FeatureNode::atom).collect())
        .expect("tags are deduplicated");
    Ok(bundle.canonical())
}

/// (lemma, form) to the flat bundles listed for it. `None` stands for a
/// hierarchical entry with no flat equivalent: it counts for presence only.
#[derive(Debug, Clone, Default)]
pub struct UnimorphIndex {
    entries: HashMap<(String, String), Vec<Option<FeatureBundle>>>,
}

impl UnimorphIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn build<'a>(
        records: impl IntoIterator<Item = &'a InflectionRecord>,
        profile: &LanguageProfile,
    ) -> Self {
        let mut idx = UnimorphIndex::new();
        for r in records {
            idx.insert(r, profile);
        }
        idx
    }

    pub fn insert(&mut self, record: &InflectionRecord, profile: &LanguageProfile) {
        let flat = match record.features.schema_kind() {
            SchemaKind::Flat => Some(record.features.canonical()),
            SchemaKind::Hierarchical => hierarchical_to_flat(&record.features, profile)
                .ok()
                .map(|b| b.canonical()),
        };
        let list = self
            .entries
            .entry((record.lemma.clone(), record.form.clone()))
            .or_default();
        if !list.contains(&flat) {
            list.push(flat);
        }
    }

    pub fn get(&self, lemma: &str, form: &str) -> Option<&[Option<FeatureBundle>]> {
        self.entries
            .get(&(lemma.to_string(), form.to_string()))
            .map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum MatchMode {
    /// The dataset bundle equals the mapped bundle.
    #[default]
    Exact,
    /// The dataset bundle is a subset of the mapped bundle.
    Partial,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub total: usize,
    pub attempted: usize,
    pub matched: usize,
}

fn percent(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

impl Counts {
    pub fn recall(&self) -> f64 {
        percent(self.matched, self.total)
    }

    pub fn precision(&self) -> f64 {
        percent(self.matched, self.attempted)
    }

    pub fn f1(&self) -> f64 {
        f_measure(self.precision(), self.recall())
    }

    fn add(&mut self, attempted: bool, matched: bool) {
        self.total += 1;
        self.attempted += attempted as usize;
        self.matched += matched as usize;
    }
}

/// Harmonic mean of precision and recall, both in percent.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalReport {
    /// Keyed by the mapped part-of-speech tag.
    pub per_pos: BTreeMap<String, Counts>,
    pub overall: Counts,
    /// Tokens whose UPOS is unmapped or dropped.
    pub excluded: usize,
    /// Tokens that repeat an already counted (lemma, form, bundle) type.
    pub duplicates: usize,
}

/// Scores treebank types against the index. Each distinct
/// (lemma, form, mapped bundle) counts once.
pub fn evaluate(
    index: &UnimorphIndex,
    tokens: &[UdToken],
    profile: &MappingProfile,
    mode: MatchMode,
) -> EvalReport {
    let mut report = EvalReport::default();
    let mut units: BTreeMap<(String, String, String), FeatureBundle> = BTreeMap::new();
    for t in tokens {
        match map_ud_to_unimorph(t, profile) {
            Err(_) => report.excluded += 1,
            Ok(b) => {
                let key = (t.lemma.clone(), t.form.clone(), b.canonical_key());
                if units.insert(key, b).is_some() {
                    report.duplicates += 1;
                }
            }
        }
    }
    for ((lemma, form, _), mapped) in &units {
        let listed = index.get(lemma, form);
        let attempted = listed.is_some();
        let matched = listed.is_some_and(|l| {
            l.iter().flatten().any(|b| match mode {
                MatchMode::Exact => b == mapped,
                MatchMode::Partial => b.nodes().iter().all(|n| mapped.contains_node(n)),
            })
        });
        let pos = mapped
            .pos()
            .map(|t| t.text().to_string())
            .unwrap_or_else(|| "?".into());
        report
            .per_pos
            .entry(pos)
            .or_default()
            .add(attempted, matched);
        report.overall.add(attempted, matched);
    }
    report
}

/// Aligned text table with one-decimal percentages.
pub fn format_report_table(report: &EvalReport) -> String {
    let mut rows: Vec<(String, Counts)> = report
        .per_pos
        .iter()
        .map(|(k, c)| (k.clone(), *c))
        .collect();
    rows.push(("ALL".into(), report.overall));
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(3).max(3);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>8}  {:>9}  {:>7}  {:>6}  {:>9}  {:>6}",
        "POS", "total", "attempted", "matched", "recall", "precision", "F1"
    );
    for (k, c) in rows {
        let _ = writeln!(
            out,
            "{:<width$}  {:>8}  {:>9}  {:>7}  {:>6.1}  {:>9.1}  {:>6.1}",
            k,
            c.total,
            c.attempted,
            c.matched,
            c.recall(),
            c.precision(),
            c.f1()
        );
    }
    let _ = writeln!(out, "excluded tokens: {}", report.excluded);
    out
}

/// `pos \t total \t attempted \t matched \t recall \t precision \t f1`.
pub fn format_report_tsv(report: &EvalReport) -> String {
    let mut out = String::from("pos\ttotal\tattempted\tmatched\trecall\tprecision\tf1\n");
    let rows = report.per_pos.iter().map(|(k, c)| (k.as_str(), *c));
    for (k, c) in rows.chain([("ALL", report.overall)]) {
        let _ = writeln!(
            out,
            "{k}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}",
            c.total,
            c.attempted,
            c.matched,
            c.recall(),
            c.precision(),
            c.f1()
        );
    }
    out
}
