use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;
use unimorph_core::paradigm::{Binding, FormPattern, ParadigmClass, Segment};
use unimorph_core::FeatureBundle;

pub const CELLS: &[&str] = &[
    "N;NOM;SG", "N;NOM;PL", "N;ACC;SG", "N;ACC;PL", "N;DAT;SG", "N;DAT;PL", "N;GEN;SG", "N;GEN;PL",
];

pub fn word(rng: &mut StdRng, min: usize, max: usize) -> String {
    let n = rng.gen_range(min..=max);
    (0..n)
        .map(|_| if rng.gen_bool(0.5) { 'a' } else { 'b' })
        .collect()
}

pub fn random_pattern(rng: &mut StdRng) -> FormPattern {
    let vars = rng.gen_range(1..=2);
    let mut segs = Vec::new();
    if rng.gen_bool(0.3) {
        segs.push(Segment::Literal(word(rng, 1, 2)));
    }
    for v in 1..=vars {
        segs.push(Segment::Var(v));
        if v < vars || rng.gen_bool(0.7) {
            segs.push(Segment::Literal(word(rng, 1, 2)));
        }
    }
    FormPattern::new(segs).unwrap()
}

pub fn random_class(rng: &mut StdRng, id: usize) -> ParadigmClass {
    let n = rng.gen_range(1..=6);
    let mut c = ParadigmClass::new(format!("C{id}"));
    for cell in CELLS.choose_multiple(rng, n) {
        c.add_cell(
            &FeatureBundle::parse_strict(cell).unwrap(),
            random_pattern(rng),
        );
    }
    c
}

pub fn random_triples(rng: &mut StdRng, classes: &[ParadigmClass]) -> Vec<(String, FeatureBundle)> {
    let class = classes.choose(rng).unwrap();
    let binding: Binding = BTreeMap::from([(1, word(rng, 1, 3)), (2, word(rng, 1, 2))]);
    let cells: Vec<_> = class.cells().collect();
    let k = rng.gen_range(1..=cells.len());
    let mut out: Vec<(String, FeatureBundle)> = cells
        .choose_multiple(rng, k)
        .map(|(b, p)| (p[0].render(&binding).unwrap(), (*b).clone()))
        .collect();
    if rng.gen_bool(0.3) {
        let cell = FeatureBundle::parse_strict(CELLS.choose(rng).unwrap()).unwrap();
        out.push((word(rng, 2, 8), cell));
    }
    out.retain(|(f, _)| f.chars().count() <= 12);
    if out.is_empty() {
        out.push((
            "ab".into(),
            FeatureBundle::parse_strict("N;NOM;SG").unwrap(),
        ));
    }
    out
}

pub fn substrings(forms: &[&str]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for f in forms {
        let chars: Vec<char> = f.chars().collect();
        for i in 0..chars.len() {
            for j in i + 1..=chars.len() {
                out.insert(chars[i..j].iter().collect());
            }
        }
    }
    out
}

/// Tries every assignment of observed substrings to the variables in use.
pub fn brute_force(triples: &[(String, FeatureBundle)], class: &ParadigmClass) -> bool {
    let mut patterns = Vec::new();
    for (form, b) in triples {
        match class.patterns_for(b) {
            Some(p) => patterns.push((form.as_str(), p)),
            None => return false,
        }
    }
    let vars: BTreeSet<u32> = patterns
        .iter()
        .flat_map(|(_, ps)| ps.iter().flat_map(|p| p.variables()))
        .collect();
    let forms: Vec<&str> = triples.iter().map(|(f, _)| f.as_str()).collect();
    let pool: Vec<String> = substrings(&forms).into_iter().collect();
    let vars: Vec<u32> = vars.into_iter().collect();
    let mut idx = vec![0usize; vars.len()];
    loop {
        let binding: Binding = vars
            .iter()
            .zip(&idx)
            .map(|(v, &i)| (*v, pool[i].clone()))
            .collect();
        let ok = patterns.iter().all(|(form, ps)| {
            ps.iter()
                .any(|p| p.render(&binding).as_deref() == Some(*form))
        });
        if ok {
            return true;
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return false;
            }
            idx[k] += 1;
            if idx[k] < pool.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
