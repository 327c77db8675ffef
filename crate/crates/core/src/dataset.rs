//! Streaming reader and writer for UniMorph inflection TSV files, plus
//! structural validation and lemma/form statistics.
//!
//! Rows are `lemma<TAB>form<TAB>features`, or with a fourth segmentation
//! column `lemma<TAB>form<TAB>F|F|F<TAB>morph|morph|morph`. A fourth column
//! of `---` marks a single-morph form.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{self, BufRead, Write};

use unicode_normalization::is_nfc;

use crate::diagnostic::{Code, Diagnostic};
use crate::schema::{
    is_finite_verb, parse_features, Dimension, FeatureBundle, Inventory, ParseMode,
};
use crate::segment::StemMap;

/// Fourth-column marker for forms with no internal segmentation.
pub const UNSEGMENTED: &str = "---";

/// Which feature notation a file is expected to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchemaMode {
    Flat,
    Hierarchical,
    #[default]
    Auto,
}

/// One dataset row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InflectionRecord {
    pub lemma: String,
    pub form: String,
    pub features: FeatureBundle,
    pub segmentation: Option<Vec<String>>,
    /// The `|`-segmented features column, kept verbatim.
    pub feature_segmentation: Option<String>,
}

impl InflectionRecord {
    pub fn new(lemma: impl Into<String>, form: impl Into<String>, features: FeatureBundle) -> Self {
        InflectionRecord {
            lemma: lemma.into(),
            form: form.into(),
            features,
            segmentation: None,
            feature_segmentation: None,
        }
    }
}

/// Item produced by [`InflectionReader`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entry {
    Record {
        line: usize,
        record: InflectionRecord,
    },
    Diagnostic(Diagnostic),
}

/// Line-by-line reader. Per-row problems become [`Entry::Diagnostic`];
/// only I/O failures end the stream with an error.
pub struct InflectionReader<'a, R> {
    lines: io::Lines<R>,
    line_no: usize,
    schema_mode: SchemaMode,
    parse_mode: ParseMode,
    inventory: &'a Inventory,
}

pub fn read_inflections<R: BufRead>(
    reader: R,
    schema_mode: SchemaMode,
    parse_mode: ParseMode,
) -> InflectionReader<'static, R> {
    InflectionReader::with_inventory(reader, schema_mode, parse_mode, Inventory::standard())
}

impl<'a, R: BufRead> InflectionReader<'a, R> {
    pub fn with_inventory(
        reader: R,
        schema_mode: SchemaMode,
        parse_mode: ParseMode,
        inventory: &'a Inventory,
    ) -> Self {
        InflectionReader {
            lines: reader.lines(),
            line_no: 0,
            schema_mode,
            parse_mode,
            inventory,
        }
    }

    fn parse_row(&self, line: &str) -> Result<InflectionRecord, Diagnostic> {
        let n = self.line_no;
        let cols: Vec<&str> = line.split('\t').collect();
        if !(3..=4).contains(&cols.len()) {
            return Err(Diagnostic::error(
                n,
                Code::BadColumnCount,
                format!("expected 3 or 4 columns, found {}", cols.len()),
            ));
        }
        for (name, value) in ["lemma", "form", "features"].iter().zip(&cols) {
            if value.trim().is_empty() {
                return Err(Diagnostic::error(
                    n,
                    Code::EmptyField,
                    format!("{name} is empty"),
                ));
            }
        }
        let (lemma, form, feature_col) = (cols[0], cols[1], cols[2].trim());

        let mut segmentation = None;
        let mut feature_segmentation = None;
        if let Some(seg_col) = cols.get(3) {
            if seg_col.is_empty() {
                return Err(Diagnostic::error(
                    n,
                    Code::EmptyField,
                    "segmentation is empty",
                ));
            }
            let morphs: Vec<String> = if *seg_col == UNSEGMENTED {
                vec![form.to_string()]
            } else {
                seg_col.split('|').map(str::to_string).collect()
            };
            if morphs.iter().any(|m| m.is_empty()) {
                return Err(Diagnostic::error(
                    n,
                    Code::EmptyMorph,
                    format!("empty morph in {seg_col:?} (`|` cannot appear inside a morph)"),
                ));
            }
            segmentation = Some(morphs);
            if feature_col.contains('|') {
                feature_segmentation = Some(feature_col.to_string());
            }
        }

        let feature_text = feature_col.replace('|', ";");
        if self.schema_mode == SchemaMode::Flat && feature_text.contains('(') {
            return Err(Diagnostic::error(
                n,
                Code::SchemaMismatch,
                format!("hierarchical features {feature_col:?} in a flat-schema file"),
            ));
        }
        let features =
            parse_features(&feature_text, self.inventory, self.parse_mode).map_err(|e| {
                Diagnostic::error(n, Code::FeatureParseError, format!("{feature_col:?}: {e}"))
            })?;

        Ok(InflectionRecord {
            lemma: lemma.to_string(),
            form: form.to_string(),
            features,
            segmentation,
            feature_segmentation,
        })
    }
}

impl<R: BufRead> Iterator for InflectionReader<'_, R> {
    type Item = io::Result<Entry>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(e)),
            };
            self.line_no += 1;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.trim().is_empty() {
                continue;
            }
            return Some(Ok(match self.parse_row(line) {
                Ok(record) => Entry::Record {
                    line: self.line_no,
                    record,
                },
                Err(d) => Entry::Diagnostic(d),
            }));
        }
    }
}

/// Formats one record as a TSV row without the trailing newline.
pub fn format_record(record: &InflectionRecord) -> String {
    match &record.segmentation {
        None => format!(
            "{}\t{}\t{}",
            record.lemma,
            record.form,
            record.features.serialize()
        ),
        Some(morphs) => {
            let features = record
                .feature_segmentation
                .clone()
                .unwrap_or_else(|| record.features.serialize());
            let seg = if morphs.len() == 1 && morphs[0] == record.form {
                UNSEGMENTED.to_string()
            } else {
                morphs.join("|")
            };
            format!("{}\t{}\t{}\t{}", record.lemma, record.form, features, seg)
        }
    }
}

/// Writes records as LF-terminated TSV rows.
pub struct InflectionWriter<W> {
    out: W,
}

impl<W: Write> InflectionWriter<W> {
    pub fn new(out: W) -> Self {
        InflectionWriter { out }
    }

    pub fn write(&mut self, record: &InflectionRecord) -> io::Result<()> {
        writeln!(self.out, "{}", format_record(record))
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

/// Lemma and form counts for one part of speech.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PosCounts {
    pub lemmas: usize,
    pub forms: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetStats {
    /// Distinct lemma strings.
    pub lemma_count: usize,
    /// Data rows.
    pub form_count: usize,
    pub per_pos_counts: BTreeMap<String, PosCounts>,
}

impl fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lemmas={} forms={}", self.lemma_count, self.form_count)
    }
}

#[derive(Default)]
struct StatsAccumulator {
    lemmas: HashSet<String>,
    forms: usize,
    per_pos: BTreeMap<String, (HashSet<String>, usize)>,
}

impl StatsAccumulator {
    fn add(&mut self, line: usize, record: &InflectionRecord) -> Option<Diagnostic> {
        self.forms += 1;
        if !self.lemmas.contains(&record.lemma) {
            self.lemmas.insert(record.lemma.clone());
        }
        match record.features.pos() {
            Some(pos) => {
                let (lemmas, forms) = self.per_pos.entry(pos.text().to_string()).or_default();
                lemmas.insert(record.lemma.clone());
                *forms += 1;
                None
            }
            None => Some(Diagnostic::warning(
                line,
                Code::MissingPos,
                format!("features {} have no part-of-speech tag", record.features),
            )),
        }
    }

    fn finish(self) -> DatasetStats {
        DatasetStats {
            lemma_count: self.lemmas.len(),
            form_count: self.forms,
            per_pos_counts: self
                .per_pos
                .into_iter()
                .map(|(pos, (lemmas, forms))| {
                    (
                        pos,
                        PosCounts {
                            lemmas: lemmas.len(),
                            forms,
                        },
                    )
                })
                .collect(),
        }
    }
}

/// Counts lemmas and rows. Rows without a POS tag are counted in the
/// totals and reported.
pub fn compute_stats<'a>(
    records: impl IntoIterator<Item = (usize, &'a InflectionRecord)>,
) -> (DatasetStats, Vec<Diagnostic>) {
    let mut acc = StatsAccumulator::default();
    let diagnostics = records
        .into_iter()
        .filter_map(|(line, r)| acc.add(line, r))
        .collect();
    (acc.finish(), diagnostics)
}

/// Result of [`validate_dataset`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
    pub stats: DatasetStats,
}

impl ValidationReport {
    pub fn error_count(&self) -> usize {
        self.diagnostics.iter().filter(|d| d.is_error()).count()
    }

    pub fn warning_count(&self) -> usize {
        self.diagnostics.len() - self.error_count()
    }
}

/// Whether a row commits the file to one notation. Rows such as `V;PRS`
/// are valid in both and decide nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SchemaHint {
    Flat,
    Hierarchical,
}

fn schema_hint(bundle: &FeatureBundle) -> Option<SchemaHint> {
    if bundle.nodes().iter().any(|n| !n.is_atomic()) {
        return Some(SchemaHint::Hierarchical);
    }
    let has_case = bundle
        .nodes()
        .iter()
        .any(|n| n.head.dimension() == Dimension::Case);
    let flat_only = bundle.nodes().iter().any(|n| match n.head.dimension() {
        Dimension::ArgumentMarking => true,
        Dimension::Possession => n
            .head
            .text()
            .strip_prefix("PSS")
            .is_some_and(|rest| rest.starts_with(|c: char| c.is_ascii_digit())),
        Dimension::Number => has_case,
        Dimension::Person => is_finite_verb(bundle.pos()),
        _ => false,
    });
    flat_only.then_some(SchemaHint::Flat)
}

/// Validator state; feed rows with [`Validator::push`].
#[derive(Default)]
pub struct Validator<'a> {
    stem_map: Option<&'a StemMap>,
    diagnostics: Vec<Diagnostic>,
    stats: StatsAccumulator,
    triples: HashMap<(String, String, String), usize>,
    cells: HashMap<(String, String), (String, usize)>,
    first_hint: Option<(SchemaHint, usize)>,
    mixed_reported: bool,
}

impl<'a> Validator<'a> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Lets segmentations carry display stems from `map` in the stem slot.
    pub fn with_stem_map(mut self, map: &'a StemMap) -> Self {
        self.stem_map = Some(map);
        self
    }

    pub fn push(&mut self, entry: Entry) {
        match entry {
            Entry::Diagnostic(d) => self.diagnostics.push(d),
            Entry::Record { line, record } => self.check(line, &record),
        }
    }

    fn check(&mut self, line: usize, r: &InflectionRecord) {
        for (what, s) in [("lemma", &r.lemma), ("form", &r.form)] {
            if !is_nfc(s) {
                self.diagnostics.push(Diagnostic::warning(
                    line,
                    Code::NotNfc,
                    format!("{what} {s:?} is not NFC-normalized"),
                ));
            }
        }

        if let Some(morphs) = &r.segmentation {
            if !self.segmentation_matches(&r.form, morphs) {
                self.diagnostics.push(Diagnostic::error(
                    line,
                    Code::SegmentationMismatch,
                    format!("{} does not spell {:?}", morphs.join("|"), r.form),
                ));
            }
            if let Some(fs) = &r.feature_segmentation {
                let slots = fs.split('|').count();
                if slots > morphs.len() {
                    self.diagnostics.push(Diagnostic::error(
                        line,
                        Code::FeatureSlotOverflow,
                        format!("{slots} feature slots for {} morphs", morphs.len()),
                    ));
                }
            }
        }

        let key = r.features.canonical_key();
        let triple = (r.lemma.clone(), r.form.clone(), key.clone());
        if let Some(first) = self.triples.get(&triple) {
            self.diagnostics.push(Diagnostic::error(
                line,
                Code::DuplicateTriple,
                format!("duplicate of line {first}"),
            ));
        } else {
            self.triples.insert(triple, line);
            let cell = (r.lemma.clone(), key);
            match self.cells.get(&cell) {
                Some((form, first)) if *form != r.form => {
                    self.diagnostics.push(Diagnostic::warning(
                        line,
                        Code::OverabundantCell,
                        format!(
                            "{} {} already realized as {:?} on line {first}",
                            r.lemma, cell.1, form
                        ),
                    ));
                }
                Some(_) => {}
                None => {
                    self.cells.insert(cell, (r.form.clone(), line));
                }
            }
        }

        if let Some(hint) = schema_hint(&r.features) {
            match self.first_hint {
                None => self.first_hint = Some((hint, line)),
                Some((first, first_line)) if first != hint && !self.mixed_reported => {
                    self.mixed_reported = true;
                    let name = |h: SchemaHint| match h {
                        SchemaHint::Flat => "flat",
                        SchemaHint::Hierarchical => "hierarchical",
                    };
                    self.diagnostics.push(Diagnostic::warning(
                        line,
                        Code::MixedSchema,
                        format!(
                            "{} features after {} features on line {first_line}",
                            name(hint),
                            name(first)
                        ),
                    ));
                }
                Some(_) => {}
            }
        }

        if let Some(d) = self.stats.add(line, r) {
            self.diagnostics.push(d);
        }
    }

    fn segmentation_matches(&self, form: &str, morphs: &[String]) -> bool {
        if morphs.concat() == form {
            return true;
        }
        let Some(map) = self.stem_map else {
            return false;
        };
        (0..morphs.len()).any(|i| {
            map.surfaces_for(&morphs[i]).iter().any(|surface| {
                let mut parts: Vec<&str> = morphs.iter().map(String::as_str).collect();
                parts[i] = surface;
                parts.concat() == form
            })
        })
    }

    pub fn finish(self) -> ValidationReport {
        ValidationReport {
            diagnostics: self.diagnostics,
            stats: self.stats.finish(),
        }
    }
}

/// Validates a full entry stream.
pub fn validate_dataset(entries: impl IntoIterator<Item = Entry>) -> ValidationReport {
    let mut v = Validator::new();
    for e in entries {
        v.push(e);
    }
    v.finish()
}
