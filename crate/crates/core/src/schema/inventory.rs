//! Feature dimensions and the tag inventory.
//!
//! The built-in inventory carries the UniMorph 4.0 tag set, including the
//! split IMP/JUS moods, numberless argument-marking tags and the extended
//! possession tags. Additional tags can be loaded from a `TAG<TAB>DIMENSION`
//! configuration file.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, LazyLock};

use super::{FeatureTag, SchemaError};

/// Version of the built-in tag inventory.
pub const INVENTORY_VERSION: &str = "4.0";

/// A dimension of meaning. The declaration order is the canonical
/// serialization order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dimension {
    PartOfSpeech,
    Mood,
    Tense,
    Aspect,
    Voice,
    Case,
    Person,
    Number,
    Gender,
    Possession,
    ArgumentMarking,
    Finiteness,
    Polarity,
    Evidentiality,
    Definiteness,
    Animacy,
    Politeness,
    Comparison,
    Valency,
    SwitchReference,
    Interrogativity,
    InformationStructure,
    Deixis,
    Aktionsart,
    LanguageSpecific,
    Unknown,
}

impl Dimension {
    pub const ALL: [Dimension; 26] = [
        Dimension::PartOfSpeech,
        Dimension::Mood,
        Dimension::Tense,
        Dimension::Aspect,
        Dimension::Voice,
        Dimension::Case,
        Dimension::Person,
        Dimension::Number,
        Dimension::Gender,
        Dimension::Possession,
        Dimension::ArgumentMarking,
        Dimension::Finiteness,
        Dimension::Polarity,
        Dimension::Evidentiality,
        Dimension::Definiteness,
        Dimension::Animacy,
        Dimension::Politeness,
        Dimension::Comparison,
        Dimension::Valency,
        Dimension::SwitchReference,
        Dimension::Interrogativity,
        Dimension::InformationStructure,
        Dimension::Deixis,
        Dimension::Aktionsart,
        Dimension::LanguageSpecific,
        Dimension::Unknown,
    ];

    /// Position in the canonical order.
    pub fn canonical_rank(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            Dimension::PartOfSpeech => "PartOfSpeech",
            Dimension::Mood => "Mood",
            Dimension::Tense => "Tense",
            Dimension::Aspect => "Aspect",
            Dimension::Voice => "Voice",
            Dimension::Case => "Case",
            Dimension::Person => "Person",
            Dimension::Number => "Number",
            Dimension::Gender => "Gender",
            Dimension::Possession => "Possession",
            Dimension::ArgumentMarking => "ArgumentMarking",
            Dimension::Finiteness => "Finiteness",
            Dimension::Polarity => "Polarity",
            Dimension::Evidentiality => "Evidentiality",
            Dimension::Definiteness => "Definiteness",
            Dimension::Animacy => "Animacy",
            Dimension::Politeness => "Politeness",
            Dimension::Comparison => "Comparison",
            Dimension::Valency => "Valency",
            Dimension::SwitchReference => "SwitchReference",
            Dimension::Interrogativity => "Interrogativity",
            Dimension::InformationStructure => "InformationStructure",
            Dimension::Deixis => "Deixis",
            Dimension::Aktionsart => "Aktionsart",
            Dimension::LanguageSpecific => "LanguageSpecific",
            Dimension::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dimension {
    type Err = SchemaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Dimension::ALL
            .iter()
            .copied()
            .find(|d| d.name().to_ascii_lowercase() == wanted)
            .or(match wanted.as_str() {
                "pos" => Some(Dimension::PartOfSpeech),
                "argmark" | "argument" => Some(Dimension::ArgumentMarking),
                "lgspec" => Some(Dimension::LanguageSpecific),
                "switchref" => Some(Dimension::SwitchReference),
                "infostruct" => Some(Dimension::InformationStructure),
                _ => None,
            })
            .ok_or_else(|| SchemaError::UnknownDimension(s.to_string()))
    }
}

const POS: &[&str] = &[
    "N", "PROPN", "ADJ", "PRO", "CLF", "ART", "DET", "V", "V.PTCP", "V.MSDR", "V.CVB", "AUX",
    "ADV", "ADP", "COMP", "CONJ", "NUM", "PART", "INTJ",
];
const MOOD: &[&str] = &[
    "IND", "SBJV", "REAL", "IRR", "AUPRP", "AUNPRP", "IMP", "JUS", "COND", "PURP", "INTEN", "POT",
    "LKLY", "ADM", "OBLIG", "DEB", "PERM", "DED", "SIM", "OPT",
];
const TENSE: &[&str] = &["PRS", "PST", "FUT", "IMMED", "HOD", "1DAY", "RCT", "RMT"];
const ASPECT: &[&str] = &["IPFV", "PFV", "PRF", "PROG", "PROSP", "ITER", "HAB"];
const VOICE: &[&str] = &[
    "ACT", "MID", "PASS", "ANTIP", "DIR", "INV", "AGFOC", "PFOC", "LFOC", "BFOC", "ACFOC", "IFOC",
    "CFOC",
];
// Core argument cases lead so that NOM(..);ACC(..) serializes subject first.
const CASE: &[&str] = &[
    "NOM", "ACC", "ERG", "ABS", "NOMS", "DAT", "BEN", "PRP", "GEN", "REL", "PRT", "INS", "COM",
    "VOC", "COMPV", "EQTV", "PRIV", "PROPR", "AVR", "FRML", "TRANS", "BYWAY", "INTER", "AT",
    "POST", "IN", "CIRC", "ANTE", "APUD", "ON", "ONHR", "ONVR", "SUB", "REM", "PROXM", "ESS",
    "ALL", "ABL", "APPRX", "TERM",
];
const PERSON: &[&str] = &["0", "1", "2", "3", "4", "INCL", "EXCL", "PRX", "OBV"];
const NUMBER: &[&str] = &["SG", "PL", "GRPL", "DU", "TRI", "PAUC", "GRPAUC", "INVN"];
const GENDER: &[&str] = &["MASC", "FEM", "NEUT"];
const FINITENESS: &[&str] = &["FIN", "NFIN"];
const POLARITY: &[&str] = &["POS", "NEG"];
const EVIDENTIALITY: &[&str] = &[
    "FH", "DRCT", "SEN", "VISU", "NVSEN", "AUD", "NFH", "QUOT", "RPRT", "HRSY", "INFER", "ASSUM",
];
const DEFINITENESS: &[&str] = &["DEF", "INDF", "SPEC", "NSPEC"];
const ANIMACY: &[&str] = &["ANIM", "INAN", "HUM", "NHUM"];
const POLITENESS: &[&str] = &[
    "INFM", "FORM", "ELEV", "HUMB", "POL", "AVOID", "LOW", "HIGH", "STELEV", "STSUPR", "LIT",
    "FOREG", "COL",
];
const COMPARISON: &[&str] = &["CMPR", "SPRL", "AB", "RL", "EQT"];
const VALENCY: &[&str] = &[
    "IMPRS", "INTR", "TR", "DITR", "REFL", "RECP", "CAUS", "APPL",
];
const SWITCH_REFERENCE: &[&str] = &["SS", "SIMMA", "SEQMA", "DS", "DSADV", "OR", "LOG"];
const INTERROGATIVITY: &[&str] = &["DECL", "INT"];
const INFORMATION_STRUCTURE: &[&str] = &["TOP", "FOC"];
const DEIXIS: &[&str] = &[
    "PROX", "MED", "REMT", "REF1", "REF2", "NOREF", "PHOR", "VIS", "NVIS", "ABV", "EVEN", "BEL",
];
const AKTIONSART: &[&str] = &[
    "STAT", "DYN", "TEL", "ATEL", "PCT", "DUR", "ACH", "ACCMP", "SEMEL", "ACTY",
];

/// Argument roles used by composite argument-marking tags, paired with the
/// case tag each role expands to.
pub(crate) const ARGUMENT_ROLES: &[(&str, &str)] = &[
    ("NO", "NOM"),
    ("AC", "ACC"),
    ("ER", "ERG"),
    ("AB", "ABS"),
    ("DA", "DAT"),
    ("BE", "BEN"),
];
/// Person letters of composite tags.
pub(crate) const COMPOSITE_PERSONS: &[&str] = &["1", "2", "3"];
/// Number letters of composite tags and the tags they stand for.
pub(crate) const COMPOSITE_NUMBERS: &[(&str, Option<&str>)] = &[
    ("", None),
    ("S", Some("SG")),
    ("P", Some("PL")),
    ("D", Some("DU")),
];
/// Trailing inclusivity/gender letters of composite tags.
pub(crate) const COMPOSITE_EXTRAS: &[(&str, Option<&str>)] = &[
    ("", None),
    ("I", Some("INCL")),
    ("E", Some("EXCL")),
    ("F", Some("FEM")),
    ("M", Some("MASC")),
];

/// Calls `f(code, person, number, extra)` for every person/number/extra
/// suffix combination used by composite tags.
pub(crate) fn for_each_composite_suffix(mut f: impl FnMut(&str, &str, Option<&str>, Option<&str>)) {
    for person in COMPOSITE_PERSONS {
        for (nl, number) in COMPOSITE_NUMBERS {
            for (el, extra) in COMPOSITE_EXTRAS {
                let code = format!("{person}{nl}{el}");
                f(&code, person, *number, *extra);
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    dimension: Dimension,
    order: u32,
}

/// The set of known tags and the dimension each belongs to.
#[derive(Debug, Clone, Default)]
pub struct Inventory {
    entries: HashMap<Arc<str>, Entry>,
    counts: HashMap<Dimension, u32>,
}

static STANDARD: LazyLock<Inventory> = LazyLock::new(Inventory::build_standard);

impl Inventory {
    /// An inventory with no tags.
    pub fn empty() -> Self {
        Self::default()
    }

    /// The shared built-in inventory.
    pub fn standard() -> &'static Inventory {
        &STANDARD
    }

    fn build_standard() -> Inventory {
        let mut inv = Inventory::empty();
        let lists: &[(Dimension, &[&str])] = &[
            (Dimension::PartOfSpeech, POS),
            (Dimension::Mood, MOOD),
            (Dimension::Tense, TENSE),
            (Dimension::Aspect, ASPECT),
            (Dimension::Voice, VOICE),
            (Dimension::Case, CASE),
            (Dimension::Person, PERSON),
            (Dimension::Number, NUMBER),
            (Dimension::Gender, GENDER),
            (Dimension::Finiteness, FINITENESS),
            (Dimension::Polarity, POLARITY),
            (Dimension::Evidentiality, EVIDENTIALITY),
            (Dimension::Definiteness, DEFINITENESS),
            (Dimension::Animacy, ANIMACY),
            (Dimension::Politeness, POLITENESS),
            (Dimension::Comparison, COMPARISON),
            (Dimension::Valency, VALENCY),
            (Dimension::SwitchReference, SWITCH_REFERENCE),
            (Dimension::Interrogativity, INTERROGATIVITY),
            (Dimension::InformationStructure, INFORMATION_STRUCTURE),
            (Dimension::Deixis, DEIXIS),
            (Dimension::Aktionsart, AKTIONSART),
        ];
        for (dim, tags) in lists {
            for tag in *tags {
                inv.insert(tag, *dim).expect("built-in tags are unique");
            }
        }
        for i in 1..=8 {
            inv.insert(&format!("NAKH{i}"), Dimension::Gender).unwrap();
        }
        for i in 1..=23 {
            inv.insert(&format!("BANTU{i}"), Dimension::Gender).unwrap();
        }

        // PSSD precedes PSS so possessed-marking serializes before the
        // possessor node.
        for tag in ["PSSD", "PSS", "ALN", "NALN", "PSSRS", "PSSRP"] {
            inv.insert(tag, Dimension::Possession).unwrap();
        }
        for_each_composite_suffix(|code, _, _, _| {
            inv.insert(&format!("PSS{code}"), Dimension::Possession)
                .unwrap();
        });
        for (role, _) in ARGUMENT_ROLES {
            for_each_composite_suffix(|code, _, _, _| {
                inv.insert(&format!("{role}{code}"), Dimension::ArgumentMarking)
                    .unwrap();
            });
        }

        inv.insert("LGSPEC", Dimension::LanguageSpecific).unwrap();
        for i in 1..=20 {
            inv.insert(&format!("LGSPEC{i}"), Dimension::LanguageSpecific)
                .unwrap();
        }
        inv
    }

    /// Adds a tag. Tags already present with the same dimension are
    /// accepted silently; a different dimension is an error.
    pub fn insert(&mut self, tag: &str, dimension: Dimension) -> Result<(), SchemaError> {
        let text = normalize_tag_text(tag)?;
        if let Some(existing) = self.entries.get(text.as_str()) {
            if existing.dimension == dimension {
                return Ok(());
            }
            return Err(SchemaError::ConflictingDimension {
                tag: text,
                existing: existing.dimension,
                requested: dimension,
            });
        }
        let count = self.counts.entry(dimension).or_insert(0);
        let order = *count;
        *count += 1;
        self.entries
            .insert(Arc::from(text.as_str()), Entry { dimension, order });
        Ok(())
    }

    /// Reads `TAG<TAB>DIMENSION` lines into this inventory. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn extend_from_config(&mut self, text: &str) -> Result<(), SchemaError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let (Some(tag), Some(dim), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(SchemaError::Config {
                    line: idx + 1,
                    message: "expected TAG<TAB>DIMENSION".into(),
                });
            };
            let dim: Dimension =
                dim.trim()
                    .parse()
                    .map_err(|e: SchemaError| SchemaError::Config {
                        line: idx + 1,
                        message: e.to_string(),
                    })?;
            self.insert(tag.trim(), dim)
                .map_err(|e| SchemaError::Config {
                    line: idx + 1,
                    message: e.to_string(),
                })?;
        }
        Ok(())
    }

    /// Parses a standalone inventory file.
    pub fn from_config(text: &str) -> Result<Self, SchemaError> {
        let mut inv = Inventory::empty();
        inv.extend_from_config(text)?;
        Ok(inv)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Looks up a tag by its (case-insensitive) text. Argument-marking tags
    /// are found with or without their `ARG` prefix.
    pub fn lookup(&self, text: &str) -> Option<FeatureTag> {
        let upper = text.to_ascii_uppercase();
        if let Some(tag) = self.get_exact(&upper) {
            return Some(tag);
        }
        let stripped = upper.strip_prefix("ARG")?;
        self.get_exact(stripped)
            .filter(|t| t.dimension() == Dimension::ArgumentMarking)
    }

    fn get_exact(&self, upper: &str) -> Option<FeatureTag> {
        self.entries
            .get_key_value(upper)
            .map(|(k, e)| FeatureTag::known(k.clone(), e.dimension, e.order))
    }

    /// Looks up a tag, falling back to an `Unknown`-dimension tag.
    pub fn lookup_or_unknown(&self, text: &str) -> Result<FeatureTag, SchemaError> {
        match self.lookup(text) {
            Some(t) => Ok(t),
            None => Ok(FeatureTag::unknown(&normalize_tag_text(text)?)),
        }
    }

    /// Looks up a tag that must be present.
    pub fn require(&self, text: &str) -> Result<FeatureTag, SchemaError> {
        self.lookup(text)
            .ok_or_else(|| SchemaError::UnknownTag(text.to_ascii_uppercase()))
    }

    /// All tags of one dimension in inventory order.
    pub fn tags_of(&self, dimension: Dimension) -> Vec<FeatureTag> {
        let mut tags: Vec<FeatureTag> = self
            .entries
            .iter()
            .filter(|(_, e)| e.dimension == dimension)
            .map(|(k, e)| FeatureTag::known(k.clone(), e.dimension, e.order))
            .collect();
        tags.sort();
        tags
    }
}

/// Uppercases a tag and checks its characters.
pub(crate) fn normalize_tag_text(text: &str) -> Result<String, SchemaError> {
    if text.is_empty() {
        return Err(SchemaError::EmptyComponent { offset: 0 });
    }
    if let Some(c) = text.chars().find(|c| !is_tag_char(*c)) {
        return Err(SchemaError::InvalidCharacter {
            character: c,
            offset: text.find(c).unwrap_or(0),
        });
    }
    Ok(text.to_ascii_uppercase())
}

pub(crate) fn is_tag_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '+' | '.' | '-' | '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_inventory_has_new_tags() {
        let inv = Inventory::standard();
        assert_eq!(inv.require("IMP").unwrap().dimension(), Dimension::Mood);
        assert_eq!(inv.require("JUS").unwrap().dimension(), Dimension::Mood);
        assert_ne!(inv.require("IMP").unwrap(), inv.require("JUS").unwrap());
        for tag in [
            "NO1", "NO2", "NO3", "NO3F", "NO3M", "AC1", "AC2", "AC3", "NO1PI", "NO1PE", "AC1D",
            "AC2D", "AC3D",
        ] {
            assert_eq!(
                inv.require(tag).unwrap().dimension(),
                Dimension::ArgumentMarking,
                "{tag}"
            );
            let prefixed = inv.require(&format!("ARG{tag}")).unwrap();
            assert_eq!(prefixed.text(), tag);
        }
        for tag in ["PSS1I", "PSS3F", "PSS3M", "PSSRS", "PSSRP"] {
            assert_eq!(inv.require(tag).unwrap().dimension(), Dimension::Possession);
        }
    }

    #[test]
    fn lookup_is_case_insensitive() {
        let inv = Inventory::standard();
        assert_eq!(inv.lookup("nom"), inv.lookup("NOM"));
        assert!(inv.lookup("argno1p").is_some());
        assert!(inv.lookup("ARGNOM").is_none());
    }

    #[test]
    fn canonical_rank_pins_order() {
        use Dimension::*;
        let expected = [
            PartOfSpeech,
            Mood,
            Tense,
            Aspect,
            Voice,
            Case,
            Person,
            Number,
            Gender,
            Possession,
            ArgumentMarking,
        ];
        for pair in expected.windows(2) {
            assert!(pair[0].canonical_rank() < pair[1].canonical_rank());
        }
        assert_eq!(
            Dimension::ALL.iter().map(|d| d.canonical_rank()).max(),
            Some(Unknown.canonical_rank())
        );
    }

    #[test]
    fn config_loading() {
        let inv = Inventory::from_config("# tags\nFOO\tCase\nBAR\tlanguage-specific\n\n").unwrap();
        assert_eq!(inv.require("foo").unwrap().dimension(), Dimension::Case);
        assert_eq!(
            inv.require("BAR").unwrap().dimension(),
            Dimension::LanguageSpecific
        );
        assert!(Inventory::from_config("FOO\tNowhere").is_err());
        assert!(Inventory::from_config("FOO").is_err());
        assert!(Inventory::from_config("FOO\tCase\nFOO\tNumber").is_err());
    }

    #[test]
    fn every_tag_has_one_dimension() {
        let inv = Inventory::standard();
        let total: usize = Dimension::ALL.iter().map(|d| inv.tags_of(*d).len()).sum();
        assert_eq!(total, inv.len());
    }
}
