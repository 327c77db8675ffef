#![allow(dead_code)]

pub mod derivation;
pub mod paradigm;
pub mod segment;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;
use unimorph_core::schema::Dimension;
use unimorph_core::{FeatureBundle, FeatureNode, Inventory};

const ATOM_DIMS: &[Dimension] = &[
    Dimension::PartOfSpeech,
    Dimension::Tense,
    Dimension::Aspect,
    Dimension::Mood,
    Dimension::Person,
    Dimension::Number,
    Dimension::Gender,
    Dimension::Polarity,
];

fn pool() -> Vec<(String, bool)> {
    let inv = Inventory::standard();
    let mut out = Vec::new();
    for d in ATOM_DIMS {
        out.extend(
            inv.tags_of(*d)
                .into_iter()
                .map(|t| (t.text().to_string(), false)),
        );
    }
    out.extend(
        inv.tags_of(Dimension::Case)
            .into_iter()
            .map(|t| (t.text().to_string(), true)),
    );
    out
}

fn spell(rng: &mut StdRng, tag: &str) -> String {
    if rng.gen_bool(0.2) {
        tag.to_ascii_lowercase()
    } else {
        tag.to_string()
    }
}

fn list(
    rng: &mut StdRng,
    tags: &[(String, bool)],
    depth: usize,
    max_width: usize,
    top: bool,
) -> String {
    let width = rng.gen_range(1..=max_width);
    let chosen: Vec<&(String, bool)> = tags.choose_multiple(rng, width).collect();
    let mut parts = Vec::new();
    for (tag, is_case) in chosen {
        let mut s = spell(rng, tag);
        if *is_case && depth > 1 && rng.gen_bool(0.4) {
            s.push('(');
            s.push_str(&list(rng, tags, depth - 1, max_width, false));
            s.push(')');
        }
        if rng.gen_bool(0.05) {
            s = format!(" {s} ");
        }
        parts.push(s);
    }
    let sep = if !top && rng.gen_bool(0.5) { "," } else { ";" };
    parts.join(sep)
}

/// A well-formed feature string with nesting depth at most `max_depth` and
/// at most `max_width` siblings per level.
pub fn random_feature_string(rng: &mut StdRng, max_depth: usize, max_width: usize) -> String {
    let tags = pool();
    list(rng, &tags, max_depth, max_width, true)
}

/// A flat string over POS plus a few tags of other dimensions.
pub fn random_flat_string(rng: &mut StdRng) -> String {
    let inv = Inventory::standard();
    let mut parts = vec![["N", "V", "ADJ", "V.PTCP", "AUX"]
        .choose(rng)
        .unwrap()
        .to_string()];
    for d in [
        Dimension::Tense,
        Dimension::Case,
        Dimension::Person,
        Dimension::Number,
        Dimension::Gender,
        Dimension::Possession,
        Dimension::ArgumentMarking,
    ] {
        if rng.gen_bool(0.4) {
            let tags = inv.tags_of(d);
            parts.push(tags.choose(rng).unwrap().text().to_string());
        }
    }
    parts.shuffle(rng);
    parts.join(";")
}

pub fn shuffled(node: &FeatureNode, rng: &mut StdRng) -> FeatureNode {
    let mut children: Vec<FeatureNode> = node.children.iter().map(|c| shuffled(c, rng)).collect();
    children.shuffle(rng);
    FeatureNode::composite(node.head.clone(), children)
}

pub fn permute(b: &FeatureBundle, rng: &mut StdRng) -> FeatureBundle {
    let mut nodes: Vec<FeatureNode> = b.nodes().iter().map(|n| shuffled(n, rng)).collect();
    nodes.shuffle(rng);
    FeatureBundle::new(nodes).unwrap()
}
