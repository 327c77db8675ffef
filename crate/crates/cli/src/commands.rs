use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;
use unimorph_core::dataset::{
    format_record, read_inflections, Entry, InflectionRecord, SchemaMode, Validator,
};
use unimorph_core::derivation::{
    derivation_stats, fill_exact_affixes, format_derivation, format_stats, fuse, read_derivations,
    validate_affix, TruncationHeuristic,
};
use unimorph_core::diagnostic::Diagnostic;
use unimorph_core::paradigm::{group_by_lemma, Coverage, ParadigmInventory};
use unimorph_core::schema::{flat_to_hierarchical, hierarchical_to_flat, ParseMode, SchemaKind};
use unimorph_core::segment::{MorphemeTable, OverrideRule, Segmenter, StemMap};
use unimorph_core::udeval::{
    evaluate, format_report_table, format_report_tsv, read_conllu, MappingProfile, MatchMode,
    UnimorphIndex,
};
use unimorph_core::{Inventory, LanguageProfile};

use crate::{Command, Outcome, ReportFormat, SchemaArg, Target};

pub fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Validate {
            paths,
            schema,
            strict_tags,
            stem_map,
        } => validate(&paths, schema, strict_tags, stem_map.as_deref()),
        Command::Convert {
            path,
            to,
            profile,
            rejects,
        } => convert(&path, to, &profile, rejects.as_deref()),
        Command::Segment {
            path,
            table,
            overrides,
            stem_map,
            all_parses,
        } => segment(
            &path,
            &table,
            overrides.as_deref(),
            stem_map.as_deref(),
            all_parses,
        ),
        Command::InferParadigms {
            path,
            inventory,
            lenient,
        } => infer_paradigms(&path, &inventory, lenient),
        Command::FuseDerivations {
            paths,
            stats,
            output,
            infer_affixes,
        } => fuse_derivations(&paths, stats, output.as_deref(), infer_affixes),
        Command::EvalUd {
            unimorph,
            conllu,
            profile,
            schema_profile,
            partial,
            format,
        } => eval_ud(
            &unimorph,
            &conllu,
            &profile,
            schema_profile.as_deref(),
            partial,
            format,
        ),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_entries(path: &Path, mode: SchemaMode, parse: ParseMode) -> Result<Vec<Entry>> {
    let text = read(path)?;
    read_inflections(text.as_bytes(), mode, parse)
        .collect::<io::Result<Vec<_>>>()
        .with_context(|| format!("cannot read {}", path.display()))
}

fn schema_profile(path: Option<&Path>) -> Result<LanguageProfile> {
    match path {
        None => Ok(LanguageProfile::standard()),
        Some(p) => LanguageProfile::from_config(&read(p)?, Inventory::standard())
            .with_context(|| format!("bad profile {}", p.display())),
    }
}

fn stem_map(path: Option<&Path>) -> Result<Option<StemMap>> {
    path.map(|p| {
        StemMap::from_tsv(&read(p)?).with_context(|| format!("bad stem map {}", p.display()))
    })
    .transpose()
}

/// Prints diagnostics to standard error and tallies them.
fn report(path: &Path, diags: &[Diagnostic], outcome: &mut Outcome) {
    let stderr = io::stderr();
    let mut err = stderr.lock();
    for d in diags {
        let _ = writeln!(err, "{}:{d}", path.display());
        if d.is_error() {
            outcome.errors += 1;
        } else {
            outcome.warnings += 1;
        }
    }
}

fn stdout() -> BufWriter<io::StdoutLock<'static>> {
    BufWriter::new(io::stdout().lock())
}

fn validate(
    paths: &[std::path::PathBuf],
    schema: SchemaArg,
    strict_tags: bool,
    map: Option<&Path>,
) -> Result<Outcome> {
    let mode = match schema {
        SchemaArg::Flat => SchemaMode::Flat,
        SchemaArg::Hier => SchemaMode::Hierarchical,
        SchemaArg::Auto => SchemaMode::Auto,
    };
    let parse = if strict_tags {
        ParseMode::Strict
    } else {
        ParseMode::Lax
    };
    let map = stem_map(map)?;
    let results: Vec<Result<(String, Outcome)>> = paths
        .par_iter()
        .map(|path| {
            let entries = read_entries(path, mode, parse)?;
            let mut v = Validator::new();
            if let Some(m) = &map {
                v = v.with_stem_map(m);
            }
            for e in entries {
                v.push(e);
            }
            let rep = v.finish();
            let mut text = String::new();
            for d in &rep.diagnostics {
                text.push_str(&format!("{}:{d}\n", path.display()));
            }
            text.push_str(&format!("{}: {}\n", path.display(), rep.stats));
            Ok((
                text,
                Outcome {
                    errors: rep.error_count(),
                    warnings: rep.warning_count(),
                },
            ))
        })
        .collect();
    let mut out = stdout();
    let mut total = Outcome::default();
    for r in results {
        let (text, o) = r?;
        out.write_all(text.as_bytes())?;
        total.errors += o.errors;
        total.warnings += o.warnings;
    }
    out.flush()?;
    Ok(total)
}

enum Converted {
    Kept(Entry),
    Rejected(usize, InflectionRecord, String),
}

fn convert(path: &Path, to: Target, profile: &Path, rejects: Option<&Path>) -> Result<Outcome> {
    let profile = schema_profile(Some(profile))?;
    let entries = read_entries(path, SchemaMode::Auto, ParseMode::Lax)?;
    let converted: Vec<Converted> = entries
        .into_par_iter()
        .map(|e| {
            let Entry::Record { line, mut record } = e else {
                return Converted::Kept(e);
            };
            let result = match to {
                Target::Hier if record.features.schema_kind() == SchemaKind::Hierarchical => {
                    Ok(record.features.canonical())
                }
                Target::Hier => {
                    flat_to_hierarchical(&record.features, &profile).map_err(|e| e.to_string())
                }
                Target::Flat => hierarchical_to_flat(&record.features, &profile)
                    .map(|b| b.canonical())
                    .map_err(|e| e.to_string()),
            };
            match result {
                Ok(features) => {
                    record.features = features;
                    record.feature_segmentation = None;
                    Converted::Kept(Entry::Record { line, record })
                }
                Err(reason) => Converted::Rejected(line, record, reason),
            }
        })
        .collect();

    let mut outcome = Outcome::default();
    let mut out = stdout();
    let mut diags = Vec::new();
    let mut rejected = String::new();
    for c in converted {
        match c {
            Converted::Kept(Entry::Record { record, .. }) => {
                writeln!(out, "{}", format_record(&record))?
            }
            Converted::Kept(Entry::Diagnostic(d)) => diags.push(d),
            Converted::Rejected(line, record, reason) => {
                rejected.push_str(&format_record(&record));
                rejected.push('\n');
                diags.push(Diagnostic::warning(
                    line,
                    unimorph_core::diagnostic::Code::SchemaMismatch,
                    format!("not converted: {reason}"),
                ));
            }
        }
    }
    out.flush()?;
    if let Some(r) = rejects {
        fs::write(r, rejected).with_context(|| format!("cannot write {}", r.display()))?;
    }
    report(path, &diags, &mut outcome);
    Ok(outcome)
}

fn segment(
    path: &Path,
    table: &Path,
    overrides: Option<&Path>,
    map: Option<&Path>,
    all_parses: bool,
) -> Result<Outcome> {
    let inventory = Inventory::standard();
    let table = MorphemeTable::from_tsv(&read(table)?, inventory)
        .with_context(|| format!("bad morpheme table {}", table.display()))?;
    let mut segmenter = Segmenter::new(table);
    if let Some(o) = overrides {
        let rules = OverrideRule::from_tsv(&read(o)?, inventory)
            .with_context(|| format!("bad overrides {}", o.display()))?;
        segmenter = segmenter.with_overrides(rules);
    }
    if let Some(m) = stem_map(map)? {
        segmenter = segmenter.with_stem_map(m);
    }
    let entries = read_entries(path, SchemaMode::Auto, ParseMode::Lax)?;
    let results: Vec<Vec<Entry>> = entries
        .into_par_iter()
        .map(|e| segmenter.segment_entry(e, all_parses))
        .collect();

    let mut outcome = Outcome::default();
    let mut out = stdout();
    let mut diags = Vec::new();
    for e in results.into_iter().flatten() {
        match e {
            Entry::Record { record, .. } => writeln!(out, "{}", format_record(&record))?,
            Entry::Diagnostic(d) => diags.push(d),
        }
    }
    out.flush()?;
    report(path, &diags, &mut outcome);
    Ok(outcome)
}

fn infer_paradigms(path: &Path, inventory: &Path, lenient: bool) -> Result<Outcome> {
    let (classes, warnings) = ParadigmInventory::from_tsv(&read(inventory)?, Inventory::standard())
        .with_context(|| format!("bad paradigm inventory {}", inventory.display()))?;
    let mut outcome = Outcome::default();
    report(inventory, &warnings, &mut outcome);

    let mut records = Vec::new();
    let mut diags = Vec::new();
    for e in read_entries(path, SchemaMode::Auto, ParseMode::Lax)? {
        match e {
            Entry::Record { record, .. } => records.push(record),
            Entry::Diagnostic(d) => diags.push(d),
        }
    }
    let coverage = if lenient {
        Coverage::Lenient
    } else {
        Coverage::Strict
    };
    let groups = group_by_lemma(&records);
    let lines: Vec<String> = groups
        .par_iter()
        .map(|(lemma, triples)| {
            let ids = classes.infer(triples, coverage);
            let ids = if ids.is_empty() {
                "-".to_string()
            } else {
                ids.into_iter().collect::<Vec<_>>().join(",")
            };
            format!("{lemma}\t{ids}")
        })
        .collect();
    let mut out = stdout();
    for l in lines {
        writeln!(out, "{l}")?;
    }
    out.flush()?;
    report(path, &diags, &mut outcome);
    Ok(outcome)
}

/// The language code of a derivation file: its name up to the first dot.
fn language_of(path: &Path) -> String {
    path.file_name()
        .and_then(|n| n.to_str())
        .and_then(|n| n.split('.').next())
        .filter(|n| !n.is_empty())
        .unwrap_or("und")
        .to_string()
}

fn fuse_derivations(
    paths: &[std::path::PathBuf],
    stats: bool,
    output: Option<&Path>,
    infer_affixes: bool,
) -> Result<Outcome> {
    let loaded: Vec<Result<(Vec<_>, Vec<Diagnostic>)>> = paths
        .par_iter()
        .map(|p| {
            let text = read(p)?;
            let (records, diags) = read_derivations(text.as_bytes(), &language_of(p))?;
            Ok((
                records.into_iter().map(|(_, r)| r).collect::<Vec<_>>(),
                diags,
            ))
        })
        .collect();
    let mut outcome = Outcome::default();
    let mut all = Vec::new();
    for (p, l) in paths.iter().zip(loaded) {
        let (records, diags) = l?;
        report(p, &diags, &mut outcome);
        all.extend(records);
    }

    let (mut fused, conflicts) = fuse(all);
    if infer_affixes {
        fill_exact_affixes(&mut fused, TruncationHeuristic::default());
    }
    {
        let stderr = io::stderr();
        let mut err = stderr.lock();
        for c in &conflicts {
            writeln!(err, "warning FieldConflict: {c}")?;
            outcome.warnings += 1;
        }
        for r in fused
            .iter()
            .filter(|r| r.affix.is_some() && !validate_affix(r))
        {
            writeln!(
                err,
                "warning AffixMismatch: {} {} -> {}: {} does not produce the target",
                r.language,
                r.source,
                r.target,
                r.affix.as_ref().map(|a| a.to_string()).unwrap_or_default()
            )?;
            outcome.warnings += 1;
        }
    }

    let mut records = String::new();
    for r in &fused {
        records.push_str(&format_derivation(r));
        records.push('\n');
    }
    if let Some(o) = output {
        fs::write(o, &records).with_context(|| format!("cannot write {}", o.display()))?;
    }
    let mut out = stdout();
    if stats {
        out.write_all(format_stats(&derivation_stats(&fused)).as_bytes())?;
    } else if output.is_none() {
        out.write_all(records.as_bytes())?;
    }
    out.flush()?;
    Ok(outcome)
}

fn eval_ud(
    unimorph: &Path,
    conllu: &Path,
    profile: &Path,
    schema: Option<&Path>,
    partial: bool,
    format: ReportFormat,
) -> Result<Outcome> {
    let mapping = MappingProfile::from_tsv(&read(profile)?, Inventory::standard())
        .with_context(|| format!("bad mapping profile {}", profile.display()))?;
    let schema = schema_profile(schema)?;
    let mut outcome = Outcome::default();

    let mut records = Vec::new();
    let mut diags = Vec::new();
    for e in read_entries(unimorph, SchemaMode::Auto, ParseMode::Lax)? {
        match e {
            Entry::Record { record, .. } => records.push(record),
            Entry::Diagnostic(d) => diags.push(d),
        }
    }
    report(unimorph, &diags, &mut outcome);
    let index = UnimorphIndex::build(&records, &schema);

    let text = read(conllu)?;
    let (tokens, diags) = read_conllu(text.as_bytes())?;
    report(conllu, &diags, &mut outcome);

    let mode = if partial {
        MatchMode::Partial
    } else {
        MatchMode::Exact
    };
    let rep = evaluate(&index, &tokens, &mapping, mode);
    let mut out = stdout();
    match format {
        ReportFormat::Text => out.write_all(format_report_table(&rep).as_bytes())?,
        ReportFormat::Tsv => out.write_all(format_report_tsv(&rep).as_bytes())?,
    }
    out.flush()?;
    Ok(outcome)
}
