//! Inflection-class inference: which paradigm patterns can generate every
//! observed form of a lemma under one shared variable binding.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::dataset::InflectionRecord;
use crate::diagnostic::{Code, Diagnostic};
use crate::schema::{parse_features, FeatureBundle, Inventory, ParseMode};

pub type Binding = BTreeMap<u32, String>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParadigmError {
    #[error("pattern {0:?} has no variable")]
    NoVariable(String),
    #[error("pattern {0:?} has adjacent variables")]
    AdjacentVariables(String),
    #[error("pattern {pattern:?}: {message}")]
    BadPattern { pattern: String, message: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Segment {
    Literal(String),
    Var(u32),
}

/// A form template such as `{1}ам`, with `{n}` marking variable parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormPattern {
    segments: Vec<Segment>,
}

impl FormPattern {
    pub fn new(segments: Vec<Segment>) -> Result<Self, ParadigmError> {
        let mut merged: Vec<Segment> = Vec::new();
        for s in segments {
            match (merged.last_mut(), s) {
                (_, Segment::Literal(l)) if l.is_empty() => {}
                (Some(Segment::Literal(prev)), Segment::Literal(l)) => prev.push_str(&l),
                (Some(Segment::Var(_)), Segment::Var(_)) => {
                    return Err(ParadigmError::AdjacentVariables(render_segments(&merged)))
                }
                (_, s) => merged.push(s),
            }
        }
        let p = FormPattern { segments: merged };
        if p.variables().is_empty() {
            return Err(ParadigmError::NoVariable(p.to_string()));
        }
        Ok(p)
    }

    pub fn parse(text: &str) -> Result<Self, ParadigmError> {
        let bad = |message: &str| ParadigmError::BadPattern {
            pattern: text.to_string(),
            message: message.to_string(),
        };
        let mut segments = Vec::new();
        let mut literal = String::new();
        let mut rest = text;
        while let Some(c) = rest.chars().next() {
            match c {
                '{' => {
                    let close = rest.find('}').ok_or_else(|| bad("unclosed `{`"))?;
                    let id: u32 = rest[1..close]
                        .parse()
                        .map_err(|_| bad("variable ids are positive integers"))?;
                    if id == 0 {
                        return Err(bad("variable ids are positive integers"));
                    }
                    if !literal.is_empty() {
                        segments.push(Segment::Literal(std::mem::take(&mut literal)));
                    } else if matches!(segments.last(), Some(Segment::Var(_))) {
                        return Err(ParadigmError::AdjacentVariables(text.to_string()));
                    }
                    segments.push(Segment::Var(id));
                    rest = &rest[close + 1..];
                }
                '}' => return Err(bad("unmatched `}`")),
                _ => {
                    literal.push(c);
                    rest = &rest[c.len_utf8()..];
                }
            }
        }
        if !literal.is_empty() {
            segments.push(Segment::Literal(literal));
        }
        Self::new(segments)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Distinct variable ids in order of first occurrence.
    pub fn variables(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for s in &self.segments {
            if let Segment::Var(v) = s {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
        }
        out
    }

    /// The generated form, or `None` if a variable is unbound.
    pub fn render(&self, binding: &Binding) -> Option<String> {
        let mut out = String::new();
        for s in &self.segments {
            match s {
                Segment::Literal(l) => out.push_str(l),
                Segment::Var(v) => out.push_str(binding.get(v)?),
            }
        }
        Some(out)
    }
}

fn render_segments(segments: &[Segment]) -> String {
    segments
        .iter()
        .map(|s| match s {
            Segment::Literal(l) => l.clone(),
            Segment::Var(v) => format!("{{{v}}}"),
        })
        .collect()
}

impl fmt::Display for FormPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_segments(&self.segments))
    }
}

/// Every extension of `partial` under which `pattern` generates `form`.
/// Variables bind to non-empty substrings.
pub fn match_cell(form: &str, pattern: &FormPattern, partial: &Binding) -> Vec<Binding> {
    let mut out = Vec::new();
    let mut binding = partial.clone();
    unify(form, &pattern.segments, &mut binding, &mut out);
    out.sort();
    out.dedup();
    out
}

fn unify(rest: &str, segments: &[Segment], binding: &mut Binding, out: &mut Vec<Binding>) {
    let Some((first, tail)) = segments.split_first() else {
        if rest.is_empty() {
            out.push(binding.clone());
        }
        return;
    };
    match first {
        Segment::Literal(l) => {
            if let Some(r) = rest.strip_prefix(l.as_str()) {
                unify(r, tail, binding, out);
            }
        }
        Segment::Var(v) => {
            if let Some(value) = binding.get(v) {
                if let Some(r) = rest.strip_prefix(value.as_str()) {
                    unify(r, tail, binding, out);
                }
                return;
            }
            for (end, c) in rest.char_indices() {
                let end = end + c.len_utf8();
                binding.insert(*v, rest[..end].to_string());
                unify(&rest[end..], tail, binding, out);
            }
            binding.remove(v);
        }
    }
}

/// One inflection class: a pattern (or alternatives) per feature cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParadigmClass {
    pub id: String,
    cells: BTreeMap<String, (FeatureBundle, Vec<FormPattern>)>,
}

impl ParadigmClass {
    pub fn new(id: impl Into<String>) -> Self {
        ParadigmClass {
            id: id.into(),
            cells: BTreeMap::new(),
        }
    }

    /// Adding a second pattern to a cell makes it an alternative.
    pub fn add_cell(&mut self, features: &FeatureBundle, pattern: FormPattern) {
        let features = features.canonical();
        let entry = self
            .cells
            .entry(features.canonical_key())
            .or_insert_with(|| (features, Vec::new()));
        if !entry.1.contains(&pattern) {
            entry.1.push(pattern);
        }
    }

    pub fn with_cell(mut self, features: &FeatureBundle, pattern: FormPattern) -> Self {
        self.add_cell(features, pattern);
        self
    }

    pub fn patterns_for(&self, features: &FeatureBundle) -> Option<&[FormPattern]> {
        self.cells
            .get(&features.canonical_key())
            .map(|(_, p)| p.as_slice())
    }

    pub fn cells(&self) -> impl Iterator<Item = (&FeatureBundle, &[FormPattern])> {
        self.cells.values().map(|(b, p)| (b, p.as_slice()))
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Variables that occur in only one cell.
    pub fn singleton_variables(&self) -> Vec<u32> {
        let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
        for (_, patterns) in self.cells.values() {
            let vars: BTreeSet<u32> = patterns.iter().flat_map(|p| p.variables()).collect();
            for v in vars {
                *counts.entry(v).or_default() += 1;
            }
        }
        counts
            .into_iter()
            .filter(|&(_, n)| n == 1)
            .map(|(v, _)| v)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParadigmMatch {
    pub class_id: String,
    pub binding: Binding,
}

/// How observations without a matching cell are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coverage {
    /// The class must have a cell for every observed bundle.
    #[default]
    Strict,
    /// Uncovered bundles are ignored; at least one must be covered.
    Lenient,
}

/// All bindings under which `class` generates every observed form.
pub fn match_lemma(
    triples: &[(String, FeatureBundle)],
    class: &ParadigmClass,
    coverage: Coverage,
) -> Vec<ParadigmMatch> {
    let mut obs: Vec<(&str, String, &[FormPattern])> = Vec::new();
    for (form, features) in triples {
        match class.patterns_for(features) {
            Some(p) => obs.push((form.as_str(), features.canonical_key(), p)),
            None if coverage == Coverage::Strict => return Vec::new(),
            None => {}
        }
    }
    if obs.is_empty() {
        return Vec::new();
    }
    obs.sort_by(|a, b| (&a.1, a.0).cmp(&(&b.1, b.0)));
    obs.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);

    let mut bindings = vec![Binding::new()];
    for (form, _, patterns) in &obs {
        let mut next = Vec::new();
        for b in &bindings {
            for p in patterns.iter() {
                next.extend(match_cell(form, p, b));
            }
        }
        next.sort();
        next.dedup();
        if next.is_empty() {
            return Vec::new();
        }
        bindings = next;
    }
    bindings
        .into_iter()
        .map(|binding| ParadigmMatch {
            class_id: class.id.clone(),
            binding,
        })
        .collect()
}

/// Ids of the classes that match all triples.
pub fn infer_classes<'a>(
    triples: &[(String, FeatureBundle)],
    inventory: impl IntoIterator<Item = &'a ParadigmClass>,
    coverage: Coverage,
) -> BTreeSet<String> {
    inventory
        .into_iter()
        .filter(|c| !match_lemma(triples, c, coverage).is_empty())
        .map(|c| c.id.clone())
        .collect()
}

/// A loaded set of classes, in file order.
#[derive(Debug, Clone, Default)]
pub struct ParadigmInventory {
    classes: Vec<ParadigmClass>,
}

impl ParadigmInventory {
    pub fn new(classes: Vec<ParadigmClass>) -> Self {
        ParadigmInventory { classes }
    }

    /// Reads `class_id \t features \t pattern` rows. Singleton variables
    /// are reported as warnings.
    pub fn from_tsv(
        text: &str,
        inventory: &Inventory,
    ) -> Result<(Self, Vec<Diagnostic>), ParadigmError> {
        let mut classes: Vec<ParadigmClass> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut first_line: Vec<usize> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let malformed = |message: String| ParadigmError::Malformed {
                line: i + 1,
                message,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 || cols[0].trim().is_empty() {
                return Err(malformed(
                    "expected `class<TAB>features<TAB>pattern`".into(),
                ));
            }
            let features = parse_features(cols[1].trim(), inventory, ParseMode::Lax)
                .map_err(|e| malformed(format!("{:?}: {e}", cols[1])))?;
            let pattern =
                FormPattern::parse(cols[2].trim()).map_err(|e| malformed(e.to_string()))?;
            let id = cols[0].trim();
            let slot = *index.entry(id.to_string()).or_insert_with(|| {
                classes.push(ParadigmClass::new(id));
                first_line.push(i + 1);
                classes.len() - 1
            });
            classes[slot].add_cell(&features, pattern);
        }
        let mut warnings = Vec::new();
        for (c, &line) in classes.iter().zip(&first_line) {
            for v in c.singleton_variables() {
                warnings.push(Diagnostic::warning(
                    line,
                    Code::SingletonVariable,
                    format!("class {}: variable {{{v}}} occurs in one cell only", c.id),
                ));
            }
        }
        Ok((ParadigmInventory { classes }, warnings))
    }

    pub fn classes(&self) -> &[ParadigmClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn infer(
        &self,
        triples: &[(String, FeatureBundle)],
        coverage: Coverage,
    ) -> BTreeSet<String> {
        infer_classes(triples, &self.classes, coverage)
    }
}

/// Groups records by lemma in order of first appearance.
pub fn group_by_lemma<'a>(
    records: impl IntoIterator<Item = &'a InflectionRecord>,
) -> Vec<(String, Vec<(String, FeatureBundle)>)> {
    let mut groups: Vec<(String, Vec<(String, FeatureBundle)>)> = Vec::new();
    let mut index: HashMap<&'a str, usize> = HashMap::new();
    for r in records {
        let slot = *index.entry(r.lemma.as_str()).or_insert_with(|| {
            groups.push((r.lemma.clone(), Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push((r.form.clone(), r.features.clone()));
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> FormPattern {
        FormPattern::parse(s).unwrap()
    }

    fn b(s: &str) -> FeatureBundle {
        FeatureBundle::parse_lax(s).unwrap()
    }

    fn t(form: &str, f: &str) -> (String, FeatureBundle) {
        (form.to_string(), b(f))
    }

    #[test]
    fn pattern_parsing() {
        assert_eq!(
            p("{1}ам").segments(),
            &[Segment::Var(1), Segment::Literal("ам".into())]
        );
        assert_eq!(p("pre{1}mid{2}").variables(), [1, 2]);
        assert_eq!(p("{2}a{1}").to_string(), "{2}a{1}");
        assert!(matches!(
            FormPattern::parse("abc"),
            Err(ParadigmError::NoVariable(_))
        ));
        assert!(matches!(
            FormPattern::parse("{1}{2}"),
            Err(ParadigmError::AdjacentVariables(_))
        ));
        assert!(FormPattern::parse("{1").is_err());
        assert!(FormPattern::parse("{0}").is_err());
        assert!(FormPattern::parse("a}").is_err());
    }

    #[test]
    fn cell_matching() {
        let m = match_cell("собакам", &p("{1}ам"), &Binding::new());
        assert_eq!(m, [Binding::from([(1, "собак".to_string())])]);
        assert_eq!(match_cell("abc", &p("{1}"), &Binding::new()).len(), 1);
        assert!(match_cell("abc", &p("x{1}"), &Binding::new()).is_empty());
        assert_eq!(match_cell("abab", &p("{1}b{2}"), &Binding::new()).len(), 1);
        assert_eq!(
            match_cell("aa", &p("{1}a"), &Binding::from([(1, "a".into())])).len(),
            1
        );
        assert_eq!(
            match_cell("ab", &p("{1}"), &Binding::from([(1, "a".into())])).len(),
            0
        );
    }

    fn hungarian_class() -> ParadigmClass {
        ParadigmClass::new("H1")
            .with_cell(&b("N;NOM;PL"), p("{1}ek"))
            .with_cell(&b("N;DAT;PL"), p("{1}eknek"))
    }

    #[test]
    fn lemma_matching() {
        let obs = vec![t("legyek", "N;NOM;PL"), t("legyeknek", "N;PL;DAT")];
        let m = match_lemma(&obs, &hungarian_class(), Coverage::Strict);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].binding[&1], "legy");

        let bad = vec![t("legyek", "N;NOM;PL"), t("házaknak", "N;DAT;PL")];
        assert!(match_lemma(&bad, &hungarian_class(), Coverage::Strict).is_empty());

        let uncovered = vec![t("legyek", "N;NOM;PL"), t("légy", "N;NOM;SG")];
        assert!(match_lemma(&uncovered, &hungarian_class(), Coverage::Strict).is_empty());
        assert_eq!(
            match_lemma(&uncovered, &hungarian_class(), Coverage::Lenient).len(),
            1
        );
        assert!(match_lemma(
            &[t("légy", "N;NOM;SG")],
            &hungarian_class(),
            Coverage::Lenient
        )
        .is_empty());
    }

    #[test]
    fn inference_keeps_ambiguity() {
        let a = hungarian_class();
        let mut b2 = a.clone();
        b2.id = "H2".into();
        b2.add_cell(&b("N;NOM;SG"), p("{1}x"));
        let c = ParadigmClass::new("H3").with_cell(&b("N;NOM;PL"), p("{1}ok"));
        let obs = vec![t("legyek", "N;NOM;PL")];
        let ids = infer_classes(&obs, [&a, &b2, &c], Coverage::Strict);
        assert_eq!(ids, BTreeSet::from(["H1".to_string(), "H2".to_string()]));
    }

    #[test]
    fn inventory_file() {
        let text = "A\tN;NOM;SG\t{1}\nA\tN;NOM;PL\t{1}ek\nB\tN;NOM;SG\t{1}a{2}\n";
        let (inv, warnings) = ParadigmInventory::from_tsv(text, Inventory::standard()).unwrap();
        assert_eq!(inv.len(), 2);
        assert_eq!(inv.classes()[0].cell_count(), 2);
        assert_eq!(warnings.len(), 2);
        assert!(warnings
            .iter()
            .all(|w| w.code == Code::SingletonVariable && w.line == 3));
        assert!(ParadigmInventory::from_tsv("A\tN\t{1}{2}\n", Inventory::standard()).is_err());
    }

    #[test]
    fn grouping() {
        let recs = vec![
            InflectionRecord::new("b", "b1", b("N")),
            InflectionRecord::new("a", "a1", b("N")),
            InflectionRecord::new("b", "b2", b("N;PL")),
        ];
        let g = group_by_lemma(&recs);
        assert_eq!(
            g.iter().map(|x| x.0.as_str()).collect::<Vec<_>>(),
            ["b", "a"]
        );
        assert_eq!(g[0].1.len(), 2);
    }
}
