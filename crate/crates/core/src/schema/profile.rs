use std::collections::HashMap;

use super::inventory::{for_each_composite_suffix, ARGUMENT_ROLES};
use super::{
    parse_features, Dimension, FeatureNode, FeatureTag, Inventory, ParseMode, SchemaError,
};

/// Language-dependent settings for converting between the flat and the
/// hierarchical notation.
///
/// Profile files hold `FLATTAG<TAB>ROLE(CHILD,...)` rows plus optional
/// settings lines:
///
/// ```text
/// %core-case          NOM
/// %case-wraps-nominal true
/// %defaults           false
/// ```
///
/// `%defaults false` starts from an empty composite map instead of the
/// built-in argument-marking and possessor expansions.
#[derive(Debug, Clone)]
pub struct LanguageProfile {
    core_case: FeatureTag,
    case_wraps_nominal: bool,
    composites: Vec<(FeatureTag, FeatureNode)>,
    by_flat: HashMap<FeatureTag, usize>,
    by_node: HashMap<FeatureNode, usize>,
}

impl LanguageProfile {
    /// Nominative core case, no nominal wrapping, and the built-in
    /// composite map (`NO1P -> NOM(1,PL)`, `PSS3SF -> PSS(3,SG,FEM)`, ...).
    pub fn standard() -> Self {
        let inv = Inventory::standard();
        let mut profile = LanguageProfile::empty(inv.require("NOM").expect("NOM"));
        for (role, case) in ARGUMENT_ROLES {
            let head = inv.require(case).expect("role case");
            for_each_composite_suffix(|code, person, number, extra| {
                let flat = inv.require(&format!("{role}{code}")).expect("arg tag");
                profile
                    .insert(flat, expansion(inv, &head, person, number, extra))
                    .expect("built-in map is injective");
            });
        }
        let pss = inv.require("PSS").expect("PSS");
        for_each_composite_suffix(|code, person, number, extra| {
            let flat = inv.require(&format!("PSS{code}")).expect("pss tag");
            profile
                .insert(flat, expansion(inv, &pss, person, number, extra))
                .expect("built-in map is injective");
        });
        profile
    }

    fn empty(core_case: FeatureTag) -> Self {
        LanguageProfile {
            core_case,
            case_wraps_nominal: false,
            composites: Vec::new(),
            by_flat: HashMap::new(),
            by_node: HashMap::new(),
        }
    }

    pub fn with_case_wraps_nominal(mut self, wraps: bool) -> Self {
        self.case_wraps_nominal = wraps;
        self
    }

    pub fn with_core_case(mut self, case: FeatureTag) -> Self {
        self.core_case = case;
        self
    }

    pub fn core_case(&self) -> &FeatureTag {
        &self.core_case
    }

    pub fn case_wraps_nominal(&self) -> bool {
        self.case_wraps_nominal
    }

    /// Adds a composite mapping; both directions must stay unique.
    pub fn insert(&mut self, flat: FeatureTag, node: FeatureNode) -> Result<(), SchemaError> {
        let node = canonical_node(node);
        if self.by_flat.contains_key(&flat) {
            return Err(SchemaError::Config {
                line: 0,
                message: format!("composite tag {flat} mapped twice"),
            });
        }
        if let Some(&other) = self.by_node.get(&node) {
            return Err(SchemaError::Config {
                line: 0,
                message: format!(
                    "composite map is not injective: {flat} and {} both expand to the same node",
                    self.composites[other].0
                ),
            });
        }
        let idx = self.composites.len();
        self.by_flat.insert(flat.clone(), idx);
        self.by_node.insert(node.clone(), idx);
        self.composites.push((flat, node));
        Ok(())
    }

    /// Expansion of a flat composite tag, if mapped.
    pub fn expand(&self, flat: &FeatureTag) -> Option<&FeatureNode> {
        self.by_flat.get(flat).map(|&i| &self.composites[i].1)
    }

    /// The flat tag whose expansion equals `node`.
    pub fn collapse(&self, node: &FeatureNode) -> Option<&FeatureTag> {
        self.by_node
            .get(&canonical_node(node.clone()))
            .map(|&i| &self.composites[i].0)
    }

    pub fn composite_count(&self) -> usize {
        self.composites.len()
    }

    /// Reads a profile file, resolving tags against `inventory`.
    pub fn from_config(text: &str, inventory: &Inventory) -> Result<Self, SchemaError> {
        let mut core_case = None;
        let mut wraps = false;
        let mut defaults = true;
        let mut rows = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cfg = |message: String| SchemaError::Config {
                line: line_no,
                message,
            };
            let mut cols = line.split('\t').map(str::trim);
            let (Some(key), Some(value), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(cfg("expected two tab-separated columns".into()));
            };
            if let Some(setting) = key.strip_prefix('%') {
                match setting {
                    "core-case" => {
                        let tag = inventory.require(value).map_err(|e| cfg(e.to_string()))?;
                        if tag.dimension() != Dimension::Case {
                            return Err(cfg(format!("{tag} is not a case")));
                        }
                        core_case = Some(tag);
                    }
                    "case-wraps-nominal" => {
                        wraps = parse_bool(value)
                            .ok_or_else(|| cfg(format!("not a boolean: {value}")))?
                    }
                    "defaults" => {
                        defaults = parse_bool(value)
                            .ok_or_else(|| cfg(format!("not a boolean: {value}")))?
                    }
                    other => return Err(cfg(format!("unknown setting %{other}"))),
                }
                continue;
            }
            let flat = inventory
                .lookup_or_unknown(key)
                .map_err(|e| cfg(e.to_string()))?;
            let bundle = parse_features(value, inventory, ParseMode::Strict)
                .map_err(|e| cfg(e.to_string()))?;
            let [node] = bundle.nodes() else {
                return Err(cfg("expansion must be a single composite node".into()));
            };
            if node.is_atomic() {
                return Err(cfg("expansion must have children".into()));
            }
            rows.push((line_no, flat, node.clone()));
        }

        let mut profile = if defaults {
            LanguageProfile::standard()
        } else {
            LanguageProfile::empty(Inventory::standard().require("NOM").expect("NOM"))
        };
        if let Some(case) = core_case {
            profile.core_case = case;
        }
        profile.case_wraps_nominal = wraps;
        for (line_no, flat, node) in rows {
            // Rows may override built-in entries of the same flat tag.
            if defaults {
                profile.remove_flat(&flat);
            }
            profile
                .insert(flat, node)
                .map_err(|e| SchemaError::Config {
                    line: line_no,
                    message: match e {
                        SchemaError::Config { message, .. } => message,
                        other => other.to_string(),
                    },
                })?;
        }
        Ok(profile)
    }

    fn remove_flat(&mut self, flat: &FeatureTag) {
        if let Some(idx) = self.by_flat.get(flat).copied() {
            self.composites.remove(idx);
            self.by_flat.clear();
            self.by_node.clear();
            for (i, (f, n)) in self.composites.iter().enumerate() {
                self.by_flat.insert(f.clone(), i);
                self.by_node.insert(n.clone(), i);
            }
        }
    }
}

impl Default for LanguageProfile {
    fn default() -> Self {
        LanguageProfile::standard()
    }
}

fn parse_bool(value: &str) -> Option<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

fn expansion(
    inv: &Inventory,
    head: &FeatureTag,
    person: &str,
    number: Option<&str>,
    extra: Option<&str>,
) -> FeatureNode {
    let children = std::iter::once(person)
        .chain(number)
        .chain(extra)
        .map(|t| FeatureNode::atom(inv.require(t).expect("expansion child")))
        .collect();
    FeatureNode::composite(head.clone(), children)
}

fn canonical_node(node: FeatureNode) -> FeatureNode {
    node.canonicalized()
}
