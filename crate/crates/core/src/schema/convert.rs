//! Conversion between the flat and hierarchical notations.
//!
//! Flat to hierarchical:
//! * composite flat tags (`NO3P`, `PSS3SF`) expand through the profile map;
//! * on finite verbs, bare person/number/gender agreement is wrapped under
//!   the profile's core case (`V;PRS;3;SG` -> `V;PRS;NOM(3,SG)`);
//! * on nominals, the case node takes the number features, or every
//!   non-POS feature when the profile wraps nominals
//!   (`N;SG;ACC;PSSD;PSS1S` -> `N;ACC(SG;PSSD;PSS(1,SG))`).
//!
//! Hierarchical to flat reverses these steps where a flat encoding exists.
//! Nested cases have none.

use thiserror::Error;

use super::{Dimension, FeatureBundle, FeatureNode, FeatureTag, LanguageProfile, SchemaKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConversionError {
    #[error("bundle is not in the flat schema")]
    NotFlat,
    #[error("ambiguous conversion: {0}")]
    AmbiguousConversion(String),
    #[error("nominal bundle has no case to attach its features to")]
    NoCaseContext,
}

/// The bundle has no flat-schema encoding.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not representable in the flat schema: {reason}")]
pub struct NotRepresentable {
    pub reason: String,
}

fn not_representable(reason: impl Into<String>) -> NotRepresentable {
    NotRepresentable {
        reason: reason.into(),
    }
}

/// Finite verbs carry argument agreement; participles, masdars and
/// converbs inflect like nominals.
pub(crate) fn is_finite_verb(bundle_pos: Option<&FeatureTag>) -> bool {
    matches!(bundle_pos.map(|t| t.text()), Some("V" | "AUX"))
}

/// Clusivity and obviation refine a person value rather than compete with it.
fn is_person_modifier(node: &FeatureNode) -> bool {
    matches!(node.head.text(), "INCL" | "EXCL" | "PRX" | "OBV")
}

fn is_case(node: &FeatureNode) -> bool {
    node.head.dimension() == Dimension::Case
}

pub fn flat_to_hierarchical(
    bundle: &FeatureBundle,
    profile: &LanguageProfile,
) -> Result<FeatureBundle, ConversionError> {
    if bundle.schema_kind() != SchemaKind::Flat {
        return Err(ConversionError::NotFlat);
    }
    let nodes: Vec<FeatureNode> = bundle
        .nodes()
        .iter()
        .map(|n| match profile.expand(&n.head) {
            Some(expanded) => expanded.clone(),
            None => n.clone(),
        })
        .collect();

    let verbal = is_finite_verb(bundle.pos());
    let bare_cases: Vec<usize> = nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.is_atomic() && is_case(n))
        .map(|(i, _)| i)
        .collect();

    let out = match bare_cases.as_slice() {
        [] if verbal => wrap_agreement(nodes, profile)?,
        [] => {
            let needs_case = nodes.iter().any(|n| {
                matches!(
                    n.head.dimension(),
                    Dimension::Number | Dimension::Gender | Dimension::Possession
                )
            });
            if profile.case_wraps_nominal() && needs_case {
                return Err(ConversionError::NoCaseContext);
            }
            nodes
        }
        [_] if verbal => {
            return Err(ConversionError::AmbiguousConversion(
                "bare case tag on a finite verb".into(),
            ))
        }
        [case_idx] => wrap_nominal(nodes, *case_idx, profile),
        _ => {
            return Err(ConversionError::AmbiguousConversion(
                "several case tags with no nesting order".into(),
            ))
        }
    };
    Ok(FeatureBundle::from_nodes_unchecked(out).canonical())
}

fn wrap_agreement(
    nodes: Vec<FeatureNode>,
    profile: &LanguageProfile,
) -> Result<Vec<FeatureNode>, ConversionError> {
    let is_agreement = |n: &FeatureNode| {
        n.is_atomic()
            && matches!(
                n.head.dimension(),
                Dimension::Person | Dimension::Number | Dimension::Gender
            )
    };
    let (agreement, mut rest): (Vec<FeatureNode>, Vec<FeatureNode>) =
        nodes.into_iter().partition(is_agreement);
    if agreement.is_empty() {
        return Ok(rest);
    }
    for dim in [Dimension::Person, Dimension::Number, Dimension::Gender] {
        let count = agreement
            .iter()
            .filter(|n| n.head.dimension() == dim && !is_person_modifier(n))
            .count();
        if count > 1 {
            return Err(ConversionError::AmbiguousConversion(format!(
                "several {dim} features with no argument to attach them to"
            )));
        }
    }
    if rest
        .iter()
        .any(|n| !n.is_atomic() && n.head == *profile.core_case())
    {
        return Err(ConversionError::AmbiguousConversion(format!(
            "bare agreement features next to an explicit {} argument",
            profile.core_case()
        )));
    }
    rest.push(FeatureNode::composite(
        profile.core_case().clone(),
        agreement,
    ));
    Ok(rest)
}

fn wrap_nominal(
    nodes: Vec<FeatureNode>,
    case_idx: usize,
    profile: &LanguageProfile,
) -> Vec<FeatureNode> {
    let case = nodes[case_idx].head.clone();
    let mut kept = Vec::new();
    let mut children = Vec::new();
    for (i, n) in nodes.into_iter().enumerate() {
        if i == case_idx {
            continue;
        }
        let wrap = if profile.case_wraps_nominal() {
            n.head.dimension() != Dimension::PartOfSpeech
        } else {
            n.is_atomic() && n.head.dimension() == Dimension::Number
        };
        if wrap {
            children.push(n);
        } else {
            kept.push(n);
        }
    }
    kept.push(if children.is_empty() {
        FeatureNode::atom(case)
    } else {
        FeatureNode::composite(case, children)
    });
    kept
}

/// Collapses argument and case nodes back into flat tags. Node order
/// follows the hierarchical input.
pub fn hierarchical_to_flat(
    bundle: &FeatureBundle,
    profile: &LanguageProfile,
) -> Result<FeatureBundle, NotRepresentable> {
    if bundle.schema_kind() == SchemaKind::Flat {
        return Ok(bundle.clone());
    }
    let verbal = is_finite_verb(bundle.pos());
    let case_nodes = bundle
        .nodes()
        .iter()
        .filter(|n| !n.is_atomic() && is_case(n))
        .count();
    // On nominals, argument nodes with a composite flat tag are not the
    // form's own case.
    let own_cases = bundle
        .nodes()
        .iter()
        .filter(|n| !n.is_atomic() && is_case(n) && profile.collapse(n).is_none())
        .count();
    if !verbal && own_cases > 1 {
        return Err(not_representable("several case nodes on a nominal"));
    }

    let mut out: Vec<FeatureNode> = Vec::new();
    for node in bundle.nodes() {
        if node.is_atomic() {
            out.push(node.clone());
            continue;
        }
        match node.head.dimension() {
            Dimension::Possession => out.push(collapse(node, profile)?),
            Dimension::Case if verbal => {
                let lone_core = case_nodes == 1
                    && node.head == *profile.core_case()
                    && node.children.iter().all(|c| c.is_atomic());
                if lone_core {
                    out.extend(node.children.iter().cloned());
                } else {
                    out.push(collapse(node, profile)?);
                }
            }
            Dimension::Case if profile.collapse(node).is_some() => {
                out.push(collapse(node, profile)?)
            }
            Dimension::Case => {
                out.push(FeatureNode::atom(node.head.clone()));
                for child in &node.children {
                    if child.is_atomic() {
                        out.push(child.clone());
                    } else if is_case(child) {
                        return Err(not_representable(format!(
                            "case stacking {}({}(...))",
                            node.head, child.head
                        )));
                    } else if child.head.dimension() == Dimension::Possession {
                        out.push(collapse(child, profile)?);
                    } else {
                        return Err(not_representable(format!(
                            "composite {} inside case {}",
                            child.head, node.head
                        )));
                    }
                }
            }
            _ => {
                return Err(not_representable(format!(
                    "composite node headed by {}",
                    node.head
                )))
            }
        }
    }
    FeatureBundle::new(out).map_err(|e| not_representable(e.to_string()))
}

fn collapse(
    node: &FeatureNode,
    profile: &LanguageProfile,
) -> Result<FeatureNode, NotRepresentable> {
    if node.children.iter().any(|c| !c.is_atomic()) {
        return Err(not_representable(format!(
            "nested structure under {}",
            node.head
        )));
    }
    profile
        .collapse(node)
        .map(|t| FeatureNode::atom(t.clone()))
        .ok_or_else(|| {
            not_representable(format!(
                "no composite flat tag for {}",
                FeatureBundle::from_nodes_unchecked(vec![node.clone()])
            ))
        })
}
