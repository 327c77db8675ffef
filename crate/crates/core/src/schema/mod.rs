//! Morphological feature bundles in the flat and hierarchical notations.
//!
//! A bundle is an ordered list of nodes; a node is a tag optionally carrying
//! child nodes, as in `V;PRS;NOM(3,SG)` or `N;ALL(COM(SG))`. Sibling order is
//! not significant, nesting order is.

mod convert;
mod inventory;
mod parse;
mod profile;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

pub(crate) use convert::is_finite_verb;
pub use convert::{flat_to_hierarchical, hierarchical_to_flat, ConversionError, NotRepresentable};
pub use inventory::{Dimension, Inventory, INVENTORY_VERSION};
pub use parse::{parse_features, ParseMode};
pub use profile::LanguageProfile;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("unbalanced parentheses at offset {offset}")]
    UnbalancedParentheses { offset: usize },
    #[error("empty component at offset {offset}")]
    EmptyComponent { offset: usize },
    #[error("unknown tag {0}")]
    UnknownTag(String),
    #[error("tag {0} cannot take child features")]
    CompositeHeadNotAllowed(String),
    #[error("tag {0} occurs twice among siblings")]
    DuplicateTag(String),
    #[error("invalid character {character:?} at offset {offset}")]
    InvalidCharacter { character: char, offset: usize },
    #[error("feature string is empty")]
    EmptyInput,
    #[error("unknown dimension {0}")]
    UnknownDimension(String),
    #[error("tag {tag} already belongs to {existing}, not {requested}")]
    ConflictingDimension {
        tag: String,
        existing: Dimension,
        requested: Dimension,
    },
    #[error("configuration line {line}: {message}")]
    Config { line: usize, message: String },
}

/// One atomic feature tag, e.g. `PL` or `NOM`.
#[derive(Debug, Clone)]
pub struct FeatureTag {
    text: Arc<str>,
    dimension: Dimension,
    order: u32,
}

impl FeatureTag {
    pub(crate) fn known(text: Arc<str>, dimension: Dimension, order: u32) -> Self {
        FeatureTag {
            text,
            dimension,
            order,
        }
    }

    pub(crate) fn unknown(text: &str) -> Self {
        FeatureTag {
            text: Arc::from(text),
            dimension: Dimension::Unknown,
            order: u32::MAX,
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn is_known(&self) -> bool {
        self.dimension != Dimension::Unknown
    }

    /// Whether this tag may head a composite node: cases, possession, and
    /// (in lax mode) anything unknown.
    pub fn may_take_children(&self) -> bool {
        match self.dimension {
            Dimension::Case | Dimension::Unknown => true,
            Dimension::Possession => matches!(&*self.text, "PSS" | "PSSD"),
            _ => false,
        }
    }

    fn sort_key(&self) -> (u8, u32, &str) {
        (self.dimension.canonical_rank(), self.order, &self.text)
    }
}

impl PartialEq for FeatureTag {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

impl Eq for FeatureTag {}

impl std::hash::Hash for FeatureTag {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.text.hash(state)
    }
}

impl Ord for FeatureTag {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for FeatureTag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FeatureTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// A tag together with its (possibly empty) list of child features.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureNode {
    pub head: FeatureTag,
    pub children: Vec<FeatureNode>,
}

impl FeatureNode {
    pub fn atom(head: FeatureTag) -> Self {
        FeatureNode {
            head,
            children: Vec::new(),
        }
    }

    pub fn composite(head: FeatureTag, children: Vec<FeatureNode>) -> Self {
        FeatureNode { head, children }
    }

    pub fn is_atomic(&self) -> bool {
        self.children.is_empty()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    fn canonicalized(&self) -> FeatureNode {
        let mut children: Vec<FeatureNode> =
            self.children.iter().map(|c| c.canonicalized()).collect();
        children.sort();
        FeatureNode {
            head: self.head.clone(),
            children,
        }
    }

    fn write(&self, out: &mut String) {
        out.push_str(self.head.text());
        if !self.children.is_empty() {
            let sep = if self.children.iter().all(|c| c.is_atomic()) {
                ','
            } else {
                ';'
            };
            out.push('(');
            for (i, child) in self.children.iter().enumerate() {
                if i > 0 {
                    out.push(sep);
                }
                child.write(out);
            }
            out.push(')');
        }
    }

    fn tags<'a>(&'a self, acc: &mut Vec<&'a FeatureTag>) {
        acc.push(&self.head);
        for c in &self.children {
            c.tags(acc);
        }
    }
}

/// Flat bundles contain only atomic nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemaKind {
    Flat,
    Hierarchical,
}

/// A complete feature annotation for one form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureBundle {
    nodes: Vec<FeatureNode>,
}

impl FeatureBundle {
    /// Builds a bundle, rejecting duplicate atomic siblings at any level.
    pub fn new(nodes: Vec<FeatureNode>) -> Result<Self, SchemaError> {
        check_siblings(&nodes)?;
        Ok(FeatureBundle { nodes })
    }

    pub(crate) fn from_nodes_unchecked(nodes: Vec<FeatureNode>) -> Self {
        FeatureBundle { nodes }
    }

    /// Parses with the standard inventory in lax mode.
    pub fn parse_lax(text: &str) -> Result<Self, SchemaError> {
        parse_features(text, Inventory::standard(), ParseMode::Lax)
    }

    /// Parses with the standard inventory in strict mode.
    pub fn parse_strict(text: &str) -> Result<Self, SchemaError> {
        parse_features(text, Inventory::standard(), ParseMode::Strict)
    }

    pub fn nodes(&self) -> &[FeatureNode] {
        &self.nodes
    }

    pub fn into_nodes(self) -> Vec<FeatureNode> {
        self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn schema_kind(&self) -> SchemaKind {
        if self.nodes.iter().all(|n| n.is_atomic()) {
            SchemaKind::Flat
        } else {
            SchemaKind::Hierarchical
        }
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth()).max().unwrap_or(0)
    }

    /// Every tag in the bundle, depth first.
    pub fn tags(&self) -> Vec<&FeatureTag> {
        let mut acc = Vec::new();
        for n in &self.nodes {
            n.tags(&mut acc);
        }
        acc
    }

    /// The first top-level part-of-speech tag.
    pub fn pos(&self) -> Option<&FeatureTag> {
        self.nodes
            .iter()
            .map(|n| &n.head)
            .find(|t| t.dimension() == Dimension::PartOfSpeech)
    }

    /// Whether a top-level node equals `node` structurally after
    /// canonicalization.
    pub fn contains_node(&self, node: &FeatureNode) -> bool {
        let wanted = node.canonicalized();
        self.nodes.iter().any(|n| n.canonicalized() == wanted)
    }

    /// The canonical form of the bundle without checking the inventory:
    /// siblings are sorted at every level, nesting is untouched.
    pub fn canonical(&self) -> FeatureBundle {
        let mut nodes: Vec<FeatureNode> = self.nodes.iter().map(|n| n.canonicalized()).collect();
        nodes.sort();
        FeatureBundle { nodes }
    }

    /// Canonical form; fails if any tag is outside the inventory.
    pub fn canonicalize(&self) -> Result<FeatureBundle, SchemaError> {
        if let Some(t) = self.tags().into_iter().find(|t| !t.is_known()) {
            return Err(SchemaError::UnknownTag(t.text().to_string()));
        }
        Ok(self.canonical())
    }

    /// The bundle in feature-string notation.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 {
                out.push(';');
            }
            n.write(&mut out);
        }
        out
    }

    /// Serialization of the canonical form, usable as a hash key.
    pub fn canonical_key(&self) -> String {
        self.canonical().serialize()
    }
}

impl fmt::Display for FeatureBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// Structural equality of canonical forms.
pub fn bundles_equal(a: &FeatureBundle, b: &FeatureBundle) -> bool {
    a.canonical() == b.canonical()
}

fn check_siblings(nodes: &[FeatureNode]) -> Result<(), SchemaError> {
    let mut seen: Vec<&FeatureTag> = Vec::new();
    for n in nodes {
        if n.is_atomic() {
            if seen.contains(&&n.head) {
                return Err(SchemaError::DuplicateTag(n.head.text().to_string()));
            }
            seen.push(&n.head);
        } else {
            check_siblings(&n.children)?;
        }
    }
    Ok(())
}
