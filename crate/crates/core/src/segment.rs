//! Morph segmentation by walking a morpheme table from a form's feature
//! bundle back to a base cell, stripping one affix per edge.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::dataset::{Entry, InflectionRecord};
use crate::diagnostic::{Code, Diagnostic};
use crate::schema::{parse_features, Dimension, FeatureBundle, FeatureNode, Inventory, ParseMode};

/// Longest path the search will follow before reporting a cycle.
pub const MAX_PATH_EDGES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("edge source and target are the same bundle {0}")]
    SelfLoop(String),
    #[error("edge {0} has no allomorphs")]
    NoAllomorphs(String),
    #[error("override for {form:?}: morphs {morphs:?} do not spell the form")]
    OverrideMismatch { form: String, morphs: Vec<String> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum AffixKind {
    #[default]
    Suffix,
    Prefix,
}

impl std::str::FromStr for AffixKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "suffix" | "suf" | "s" => Ok(AffixKind::Suffix),
            "prefix" | "pre" | "p" => Ok(AffixKind::Prefix),
            other => Err(format!("unknown affix kind {other:?}")),
        }
    }
}

/// A table row: `target` is formed from `source` by adding one of `allomorphs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphemeEdge {
    pub source: FeatureBundle,
    pub target: FeatureBundle,
    pub allomorphs: Vec<String>,
    pub kind: AffixKind,
}

impl MorphemeEdge {
    /// Hyphens of the display notation (`-ek`, `meg-`) are stripped.
    pub fn new(
        source: FeatureBundle,
        target: FeatureBundle,
        allomorphs: impl IntoIterator<Item = impl AsRef<str>>,
        kind: AffixKind,
    ) -> Result<Self, TableError> {
        if source.canonical() == target.canonical() {
            return Err(TableError::SelfLoop(source.serialize()));
        }
        let mut list: Vec<String> = Vec::new();
        for a in allomorphs {
            let a = a.as_ref().trim().trim_matches('-');
            if !a.is_empty() && !list.iter().any(|x| x == a) {
                list.push(a.to_string());
            }
        }
        if list.is_empty() {
            return Err(TableError::NoAllomorphs(format!(
                "{} -> {}",
                source.serialize(),
                target.serialize()
            )));
        }
        Ok(MorphemeEdge {
            source,
            target,
            allomorphs: list,
            kind,
        })
    }
}

/// Problems found by [`MorphemeTable::check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableIssue {
    Cycle(String),
    NoPathToRoot(String),
}

#[derive(Debug, Clone, Default)]
pub struct MorphemeTable {
    edges: Vec<MorphemeEdge>,
    roots: Vec<FeatureBundle>,
    root_keys: HashSet<String>,
    by_target: HashMap<String, Vec<usize>>,
}

impl MorphemeTable {
    /// Roots are the sources that never appear as a target.
    pub fn new(edges: Vec<MorphemeEdge>) -> Self {
        let targets: HashSet<String> = edges.iter().map(|e| e.target.canonical_key()).collect();
        let mut roots = Vec::new();
        let mut seen = HashSet::new();
        for e in &edges {
            let k = e.source.canonical_key();
            if !targets.contains(&k) && seen.insert(k) {
                roots.push(e.source.clone());
            }
        }
        Self::with_roots(edges, roots)
    }

    pub fn with_roots(edges: Vec<MorphemeEdge>, roots: Vec<FeatureBundle>) -> Self {
        let mut by_target: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            by_target
                .entry(e.target.canonical_key())
                .or_default()
                .push(i);
        }
        let root_keys = roots.iter().map(|r| r.canonical_key()).collect();
        MorphemeTable {
            edges,
            roots,
            root_keys,
            by_target,
        }
    }

    /// Reads `source \t allomorph;allomorph \t target [\t kind]` rows.
    /// Blank lines and `#` comments are skipped.
    pub fn from_tsv(text: &str, inventory: &Inventory) -> Result<Self, TableError> {
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let malformed = |message: String| TableError::Malformed {
                line: i + 1,
                message,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if !(3..=4).contains(&cols.len()) {
                return Err(malformed(format!(
                    "expected 3 or 4 columns, found {}",
                    cols.len()
                )));
            }
            let parse = |s: &str| {
                parse_features(s.trim(), inventory, ParseMode::Lax)
                    .map_err(|e| malformed(format!("{s:?}: {e}")))
            };
            let kind = match cols.get(3) {
                Some(k) => k.parse().map_err(malformed)?,
                None => AffixKind::Suffix,
            };
            let edge =
                MorphemeEdge::new(parse(cols[0])?, parse(cols[2])?, cols[1].split(';'), kind)
                    .map_err(|e| malformed(e.to_string()))?;
            edges.push(edge);
        }
        Ok(Self::new(edges))
    }

    pub fn edges(&self) -> &[MorphemeEdge] {
        &self.edges
    }

    pub fn roots(&self) -> &[FeatureBundle] {
        &self.roots
    }

    pub fn is_root(&self, bundle: &FeatureBundle) -> bool {
        self.root_keys.contains(&bundle.canonical_key())
    }

    fn incoming(&self, key: &str) -> &[usize] {
        self.by_target.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Whether some chain of edges leads from `bundle` back to a root.
    pub fn reaches_root(&self, bundle: &FeatureBundle) -> bool {
        let mut seen = HashSet::new();
        self.reaches_root_key(&bundle.canonical_key(), &mut seen)
    }

    fn reaches_root_key(&self, key: &str, seen: &mut HashSet<String>) -> bool {
        if self.root_keys.contains(key) {
            return true;
        }
        if !seen.insert(key.to_string()) {
            return false;
        }
        self.incoming(key).iter().any(|&i| {
            let src = self.edges[i].source.canonical_key();
            self.reaches_root_key(&src, seen)
        })
    }

    /// Reports cycles and bundles with no route to a root.
    pub fn check(&self) -> Vec<TableIssue> {
        let mut issues = Vec::new();
        let mut state: HashMap<String, u8> = HashMap::new();
        let mut keys: Vec<String> = self.by_target.keys().cloned().collect();
        keys.sort();
        for k in &keys {
            self.find_cycle(k, &mut state, &mut issues);
        }
        for k in &keys {
            let mut seen = HashSet::new();
            if !self.reaches_root_key(k, &mut seen) {
                issues.push(TableIssue::NoPathToRoot(k.clone()));
            }
        }
        issues
    }

    fn find_cycle(&self, key: &str, state: &mut HashMap<String, u8>, issues: &mut Vec<TableIssue>) {
        match state.get(key) {
            Some(1) => {
                issues.push(TableIssue::Cycle(key.to_string()));
                return;
            }
            Some(_) => return,
            None => {}
        }
        state.insert(key.to_string(), 1);
        for &i in self.incoming(key) {
            let src = self.edges[i].source.canonical_key();
            self.find_cycle(&src, state, issues);
        }
        state.insert(key.to_string(), 2);
    }
}

/// A hand-written segmentation for an irregular form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverrideRule {
    pub form: String,
    pub features: FeatureBundle,
    pub segmentation: Vec<String>,
}

impl OverrideRule {
    pub fn new(
        form: impl Into<String>,
        features: FeatureBundle,
        segmentation: Vec<String>,
    ) -> Result<Self, TableError> {
        let form = form.into();
        if segmentation.is_empty()
            || segmentation.iter().any(String::is_empty)
            || segmentation.concat() != form
        {
            return Err(TableError::OverrideMismatch {
                form,
                morphs: segmentation,
            });
        }
        Ok(OverrideRule {
            form,
            features,
            segmentation,
        })
    }

    /// Reads `form \t features \t morph|morph` rows.
    pub fn from_tsv(text: &str, inventory: &Inventory) -> Result<Vec<Self>, TableError> {
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let malformed = |message: String| TableError::Malformed {
                line: i + 1,
                message,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(malformed(format!(
                    "expected 3 columns, found {}",
                    cols.len()
                )));
            }
            let features = parse_features(cols[1].trim(), inventory, ParseMode::Lax)
                .map_err(|e| malformed(format!("{:?}: {e}", cols[1])))?;
            let morphs = cols[2].split('|').map(str::to_string).collect();
            rules.push(Self::new(cols[0], features, morphs).map_err(|e| malformed(e.to_string()))?);
        }
        Ok(rules)
    }
}

/// Surface stem to display stem, e.g. `legy` to `légy`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StemMap {
    display: HashMap<String, String>,
    surfaces: HashMap<String, Vec<String>>,
}

impl StemMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, S, T>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut map = StemMap::new();
        for (s, d) in pairs {
            map.insert(s, d);
        }
        map
    }

    pub fn insert(&mut self, surface: impl Into<String>, display: impl Into<String>) {
        let (surface, display) = (surface.into(), display.into());
        if let Some(old) = self.display.insert(surface.clone(), display.clone()) {
            if let Some(v) = self.surfaces.get_mut(&old) {
                v.retain(|s| s != &surface);
            }
        }
        let v = self.surfaces.entry(display).or_default();
        v.push(surface);
        v.sort();
    }

    /// Reads `surface \t display` rows.
    pub fn from_tsv(text: &str) -> Result<Self, TableError> {
        let mut map = StemMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            match line.split('\t').collect::<Vec<_>>().as_slice() {
                [s, d] if !s.is_empty() && !d.is_empty() => map.insert(*s, *d),
                _ => {
                    return Err(TableError::Malformed {
                        line: i + 1,
                        message: "expected `surface<TAB>display`".into(),
                    })
                }
            }
        }
        Ok(map)
    }

    pub fn display_for(&self, surface: &str) -> Option<&str> {
        self.display.get(surface).map(String::as_str)
    }

    /// Surface stems that display as `display`.
    pub fn surfaces_for(&self, display: &str) -> &[String] {
        self.surfaces.get(display).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.display.len()
    }

    pub fn is_empty(&self) -> bool {
        self.display.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation {
    /// Morphs in surface order; the stem slot holds the display stem.
    pub morphs: Vec<String>,
    /// Edges from the root outward.
    pub path: Vec<MorphemeEdge>,
    pub stem_index: usize,
    /// The stem exactly as it occurs in the form.
    pub surface_stem: String,
    pub from_override: bool,
}

impl Segmentation {
    /// Morphs with the surface stem restored; these concatenate to the form.
    pub fn surface_morphs(&self) -> Vec<String> {
        let mut m = self.morphs.clone();
        if !self.from_override {
            m[self.stem_index] = self.surface_stem.clone();
        }
        m
    }

    /// Position in `morphs` of the affix added by `path[i]`.
    pub fn morph_index_of_edge(&self, i: usize) -> usize {
        let same_kind_before = self.path[..i]
            .iter()
            .filter(|e| e.kind == self.path[i].kind)
            .count();
        match self.path[i].kind {
            AffixKind::Suffix => self.stem_index + 1 + same_kind_before,
            AffixKind::Prefix => self.stem_index - 1 - same_kind_before,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SegmentError {
    #[error("no path from {0} to a base cell")]
    NoPath(String),
    #[error("no allomorph of the table fits {0:?}")]
    NoMatchingAllomorph(String),
    #[error("affixes consume all of {0:?}")]
    EmptyStem(String),
    #[error("more than {MAX_PATH_EDGES} edges while segmenting {0:?}")]
    CycleDetected(String),
}

impl SegmentError {
    pub fn code(&self) -> Code {
        match self {
            SegmentError::NoPath(_) => Code::NoPath,
            SegmentError::NoMatchingAllomorph(_) => Code::NoMatchingAllomorph,
            SegmentError::EmptyStem(_) => Code::EmptyStem,
            SegmentError::CycleDetected(_) => Code::CycleDetected,
        }
    }
}

/// One step of a parse in stripping order (outermost affix first).
#[derive(Debug, Clone, Copy)]
struct Step {
    edge: usize,
    allomorph: usize,
}

#[derive(Debug, Default)]
struct SearchState {
    parses: Vec<(Vec<Step>, usize, usize)>,
    empty_stem: bool,
    too_deep: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Segmenter {
    table: MorphemeTable,
    overrides: HashMap<(String, String), Vec<String>>,
    stem_map: StemMap,
}

impl Segmenter {
    pub fn new(table: MorphemeTable) -> Self {
        Segmenter {
            table,
            ..Default::default()
        }
    }

    /// Later rules for the same form and cell replace earlier ones.
    pub fn with_overrides(mut self, rules: impl IntoIterator<Item = OverrideRule>) -> Self {
        for r in rules {
            self.overrides
                .insert((r.form, r.features.canonical_key()), r.segmentation);
        }
        self
    }

    pub fn with_stem_map(mut self, map: StemMap) -> Self {
        self.stem_map = map;
        self
    }

    pub fn table(&self) -> &MorphemeTable {
        &self.table
    }

    pub fn stem_map(&self) -> &StemMap {
        &self.stem_map
    }

    /// The preferred parse.
    pub fn segment(
        &self,
        form: &str,
        features: &FeatureBundle,
    ) -> Result<Segmentation, SegmentError> {
        if let Some(s) = self.override_for(form, features) {
            return Ok(s);
        }
        let parses = self.search(form, features)?;
        let best = parses
            .into_iter()
            .min_by(|a, b| self.compare(form, a, b))
            .expect("search returns at least one parse");
        Ok(self.build(form, best))
    }

    /// Every parse, preferred first.
    pub fn segment_all(
        &self,
        form: &str,
        features: &FeatureBundle,
    ) -> Result<Vec<Segmentation>, SegmentError> {
        if let Some(s) = self.override_for(form, features) {
            return Ok(vec![s]);
        }
        let mut parses = self.search(form, features)?;
        parses.sort_by(|a, b| self.compare(form, a, b));
        Ok(parses.into_iter().map(|p| self.build(form, p)).collect())
    }

    fn override_for(&self, form: &str, features: &FeatureBundle) -> Option<Segmentation> {
        let morphs = self
            .overrides
            .get(&(form.to_string(), features.canonical_key()))?;
        Some(Segmentation {
            morphs: morphs.clone(),
            path: Vec::new(),
            stem_index: 0,
            surface_stem: morphs[0].clone(),
            from_override: true,
        })
    }

    fn search(
        &self,
        form: &str,
        features: &FeatureBundle,
    ) -> Result<Vec<(Vec<Step>, usize, usize)>, SegmentError> {
        if !self.table.reaches_root(features) {
            return Err(SegmentError::NoPath(features.serialize()));
        }
        let mut state = SearchState::default();
        let mut steps = Vec::new();
        self.walk(
            form,
            &features.canonical_key(),
            0,
            form.len(),
            &mut steps,
            &mut state,
        );
        if !state.parses.is_empty() {
            return Ok(state.parses);
        }
        Err(if state.too_deep {
            SegmentError::CycleDetected(form.to_string())
        } else if state.empty_stem {
            SegmentError::EmptyStem(form.to_string())
        } else {
            SegmentError::NoMatchingAllomorph(form.to_string())
        })
    }

    fn walk(
        &self,
        form: &str,
        key: &str,
        start: usize,
        end: usize,
        steps: &mut Vec<Step>,
        state: &mut SearchState,
    ) {
        if self.table.root_keys.contains(key) {
            state.parses.push((steps.clone(), start, end));
            return;
        }
        if steps.len() == MAX_PATH_EDGES {
            state.too_deep = true;
            return;
        }
        let residue = &form[start..end];
        for &ei in self.table.incoming(key) {
            let edge = &self.table.edges[ei];
            let src = edge.source.canonical_key();
            for (ai, a) in edge.allomorphs.iter().enumerate() {
                let (s, e) = match edge.kind {
                    AffixKind::Suffix if residue.ends_with(a.as_str()) => (start, end - a.len()),
                    AffixKind::Prefix if residue.starts_with(a.as_str()) => (start + a.len(), end),
                    _ => continue,
                };
                if s == e {
                    state.empty_stem = true;
                    continue;
                }
                steps.push(Step {
                    edge: ei,
                    allomorph: ai,
                });
                self.walk(form, &src, s, e, steps, state);
                steps.pop();
            }
        }
    }

    /// Longer affixes first (outermost first), then shorter paths, then
    /// lexicographic affixes, then table order.
    fn compare(
        &self,
        _form: &str,
        a: &(Vec<Step>, usize, usize),
        b: &(Vec<Step>, usize, usize),
    ) -> Ordering {
        let text = |s: &Step| self.table.edges[s.edge].allomorphs[s.allomorph].as_str();
        let lens_a = a.0.iter().map(|s| text(s).chars().count());
        let lens_b = b.0.iter().map(|s| text(s).chars().count());
        for (la, lb) in lens_a.zip(lens_b) {
            match lb.cmp(&la) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        a.0.len()
            .cmp(&b.0.len())
            .then_with(|| a.0.iter().map(text).cmp(b.0.iter().map(text)))
            .then_with(|| a.0.iter().map(|s| s.edge).cmp(b.0.iter().map(|s| s.edge)))
    }

    fn build(&self, form: &str, (steps, start, end): (Vec<Step>, usize, usize)) -> Segmentation {
        let surface_stem = form[start..end].to_string();
        let display = self
            .stem_map
            .display_for(&surface_stem)
            .unwrap_or(&surface_stem)
            .to_string();
        let mut prefixes = Vec::new();
        let mut suffixes = Vec::new();
        for s in &steps {
            let edge = &self.table.edges[s.edge];
            let a = edge.allomorphs[s.allomorph].clone();
            match edge.kind {
                AffixKind::Prefix => prefixes.push(a),
                AffixKind::Suffix => suffixes.push(a),
            }
        }
        suffixes.reverse();
        let stem_index = prefixes.len();
        let mut morphs = prefixes;
        morphs.push(display);
        morphs.extend(suffixes);
        let path = steps
            .iter()
            .rev()
            .map(|s| self.table.edges[s.edge].clone())
            .collect();
        Segmentation {
            morphs,
            path,
            stem_index,
            surface_stem,
            from_override: false,
        }
    }

    /// Segments one record, filling its segmentation columns. Warnings
    /// from feature alignment are returned alongside.
    pub fn segment_record(
        &self,
        record: &InflectionRecord,
    ) -> Result<(InflectionRecord, Vec<usize>), SegmentError> {
        let seg = self.segment(&record.form, &record.features)?;
        let mut out = record.clone();
        let aligned = align_feature_segmentation(&seg, &record.features);
        out.feature_segmentation =
            (seg.morphs.len() > 1 && !seg.from_override).then_some(aligned.column);
        out.segmentation = Some(seg.morphs);
        Ok((out, aligned.non_monotonic))
    }

    /// Segments a record stream. Failures and alignment warnings become
    /// diagnostics; other entries pass through unchanged.
    pub fn segment_dataset<'s, I>(&'s self, entries: I) -> impl Iterator<Item = Entry> + 's
    where
        I: IntoIterator<Item = Entry>,
        I::IntoIter: 's,
    {
        entries
            .into_iter()
            .flat_map(move |e| self.segment_entry(e, false))
    }

    /// One entry in, the resulting entries out. With `all_parses` every
    /// parse is emitted as its own record.
    pub fn segment_entry(&self, entry: Entry, all_parses: bool) -> Vec<Entry> {
        let (line, record) = match entry {
            Entry::Record { line, record } => (line, record),
            other => return vec![other],
        };
        let fail = |e: SegmentError| {
            vec![Entry::Diagnostic(Diagnostic::error(
                line,
                e.code(),
                format!("{} {}: {e}", record.form, record.features.serialize()),
            ))]
        };
        let segs = if all_parses {
            match self.segment_all(&record.form, &record.features) {
                Ok(s) => s,
                Err(e) => return fail(e),
            }
        } else {
            match self.segment(&record.form, &record.features) {
                Ok(s) => vec![s],
                Err(e) => return fail(e),
            }
        };
        let mut out = Vec::new();
        for seg in segs {
            let aligned = align_feature_segmentation(&seg, &record.features);
            for i in aligned.non_monotonic {
                out.push(Entry::Diagnostic(Diagnostic::warning(
                    line,
                    Code::NonMonotonicEdge,
                    format!(
                        "edge {} -> {} adds no features",
                        seg.path[i].source.serialize(),
                        seg.path[i].target.serialize()
                    ),
                )));
            }
            let mut r = record.clone();
            r.feature_segmentation =
                (seg.morphs.len() > 1 && !seg.from_override).then_some(aligned.column);
            r.segmentation = Some(seg.morphs);
            out.push(Entry::Record { line, record: r });
        }
        out
    }
}

/// Result of [`align_feature_segmentation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub column: String,
    /// Path indices of edges whose target adds nothing to the source.
    pub non_monotonic: Vec<usize>,
}

/// Builds the `|`-separated features column, one slot per morph. The stem
/// slot holds the root's part of speech; each affix slot holds what its edge
/// adds. Root features kept in the final cell go to the first affix slot.
pub fn align_feature_segmentation(seg: &Segmentation, features: &FeatureBundle) -> Alignment {
    if seg.path.is_empty() {
        return Alignment {
            column: features.serialize(),
            non_monotonic: Vec::new(),
        };
    }
    let nodes_of = |b: &FeatureBundle| -> Vec<FeatureNode> { b.canonical().into_nodes() };
    let fin = nodes_of(features);
    let root = nodes_of(&seg.path[0].source);
    let mut slots: Vec<Vec<FeatureNode>> = vec![Vec::new(); seg.morphs.len()];
    slots[seg.stem_index] = root
        .iter()
        .filter(|n| n.head.dimension() == Dimension::PartOfSpeech)
        .cloned()
        .collect();
    let mut non_monotonic = Vec::new();
    for (i, edge) in seg.path.iter().enumerate() {
        let src = nodes_of(&edge.source);
        let mut slot: Vec<FeatureNode> = nodes_of(&edge.target)
            .into_iter()
            .filter(|n| !src.contains(n))
            .collect();
        if slot.is_empty() {
            non_monotonic.push(i);
        }
        if i == 0 {
            slot.extend(
                root.iter()
                    .filter(|n| n.head.dimension() != Dimension::PartOfSpeech && fin.contains(n))
                    .cloned(),
            );
        }
        slot.sort();
        slots[seg.morph_index_of_edge(i)] = slot;
    }
    let column = slots
        .into_iter()
        .map(|s| FeatureBundle::from_nodes_unchecked(s).serialize())
        .collect::<Vec<_>>()
        .join("|");
    Alignment {
        column,
        non_monotonic,
    }
}
