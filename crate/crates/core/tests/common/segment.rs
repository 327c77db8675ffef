use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;
use unimorph_core::segment::{AffixKind, MorphemeEdge, MorphemeTable};
use unimorph_core::FeatureBundle;

pub const CELLS: &[&str] = &[
    "N;NOM;SG", "N;NOM;PL", "N;ACC;SG", "N;ACC;PL", "N;DAT;SG", "N;DAT;PL", "N;GEN;PL",
];
pub const AFFIXES: &[&str] = &["a", "b", "ab", "ba", "aa", "bab"];

pub fn b(s: &str) -> FeatureBundle {
    FeatureBundle::parse_strict(s).unwrap()
}

pub fn random_table(rng: &mut StdRng) -> Vec<MorphemeEdge> {
    let n = rng.gen_range(1..=6);
    let mut edges = Vec::new();
    while edges.len() < n {
        let i = rng.gen_range(0..CELLS.len() - 1);
        let j = rng.gen_range(i + 1..CELLS.len());
        let k = rng.gen_range(1..=3);
        let allos: Vec<&str> = AFFIXES.choose_multiple(rng, k).copied().collect();
        let kind = if rng.gen_bool(0.25) {
            AffixKind::Prefix
        } else {
            AffixKind::Suffix
        };
        edges.push(MorphemeEdge::new(b(CELLS[i]), b(CELLS[j]), allos, kind).unwrap());
    }
    edges
}

/// Forward generation: every root-to-`target` path, every allomorph choice,
/// kept when the affixes line up with `form` around a non-empty stem.
pub fn oracle(
    table: &MorphemeTable,
    form: &str,
    target: &FeatureBundle,
) -> Vec<(Vec<String>, Vec<MorphemeEdge>)> {
    let mut paths: Vec<Vec<&MorphemeEdge>> = Vec::new();
    fn extend<'t>(
        table: &'t MorphemeTable,
        path: Vec<&'t MorphemeEdge>,
        out: &mut Vec<Vec<&'t MorphemeEdge>>,
    ) {
        out.push(path.clone());
        let current = path.last().unwrap().target.canonical_key();
        for e in table.edges() {
            if e.source.canonical_key() == current {
                let mut p = path.clone();
                p.push(e);
                extend(table, p, out);
            }
        }
    }
    for e in table.edges() {
        if table.is_root(&e.source) {
            extend(table, vec![e], &mut paths);
        }
    }
    let mut out = Vec::new();
    if table.is_root(target) {
        out.push((vec![form.to_string()], Vec::new()));
    }
    for path in paths {
        if path.last().unwrap().target.canonical_key() != target.canonical_key() {
            continue;
        }
        let mut choices: Vec<Vec<&str>> = vec![Vec::new()];
        for e in &path {
            choices = choices
                .into_iter()
                .flat_map(|c| {
                    e.allomorphs.iter().map(move |a| {
                        let mut c = c.clone();
                        c.push(a.as_str());
                        c
                    })
                })
                .collect();
        }
        for choice in choices {
            let prefixes: Vec<&str> = path
                .iter()
                .zip(&choice)
                .filter(|(e, _)| e.kind == AffixKind::Prefix)
                .map(|(_, a)| *a)
                .rev()
                .collect();
            let suffixes: Vec<&str> = path
                .iter()
                .zip(&choice)
                .filter(|(e, _)| e.kind == AffixKind::Suffix)
                .map(|(_, a)| *a)
                .collect();
            let (pre, suf) = (prefixes.concat(), suffixes.concat());
            if form.len() > pre.len() + suf.len() && form.starts_with(&pre) && form.ends_with(&suf)
            {
                let stem = &form[pre.len()..form.len() - suf.len()];
                let mut morphs: Vec<String> = prefixes.iter().map(|s| s.to_string()).collect();
                morphs.push(stem.to_string());
                morphs.extend(suffixes.iter().map(|s| s.to_string()));
                out.push((morphs, path.iter().map(|e| (*e).clone()).collect()));
            }
        }
    }
    out
}

pub fn key(x: &(Vec<String>, Vec<MorphemeEdge>)) -> String {
    format!("{:?}", x)
}
