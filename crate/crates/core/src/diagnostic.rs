use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

/// Machine-readable diagnostic codes shared by the readers and pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    BadColumnCount,
    EmptyField,
    FeatureParseError,
    SchemaMismatch,
    EmptyMorph,
    DuplicateTriple,
    OverabundantCell,
    MixedSchema,
    SegmentationMismatch,
    FeatureSlotOverflow,
    NotNfc,
    MissingPos,
    NoPath,
    NoMatchingAllomorph,
    EmptyStem,
    CycleDetected,
    NonMonotonicEdge,
    MalformedLine,
    SameLemma,
    BadAffix,
    BadPos,
    FieldConflict,
    AffixMismatch,
    SingletonVariable,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::BadColumnCount => "BadColumnCount",
            Code::EmptyField => "EmptyField",
            Code::FeatureParseError => "FeatureParseError",
            Code::SchemaMismatch => "SchemaMismatch",
            Code::EmptyMorph => "EmptyMorph",
            Code::DuplicateTriple => "DuplicateTriple",
            Code::OverabundantCell => "OverabundantCell",
            Code::MixedSchema => "MixedSchema",
            Code::SegmentationMismatch => "SegmentationMismatch",
            Code::FeatureSlotOverflow => "FeatureSlotOverflow",
            Code::NotNfc => "NotNfc",
            Code::MissingPos => "MissingPOS",
            Code::NoPath => "NoPath",
            Code::NoMatchingAllomorph => "NoMatchingAllomorph",
            Code::EmptyStem => "EmptyStem",
            Code::CycleDetected => "CycleDetected",
            Code::NonMonotonicEdge => "NonMonotonicEdge",
            Code::MalformedLine => "MalformedLine",
            Code::SameLemma => "SameLemma",
            Code::BadAffix => "BadAffix",
            Code::BadPos => "BadPOS",
            Code::FieldConflict => "FieldConflict",
            Code::AffixMismatch => "AffixMismatch",
            Code::SingletonVariable => "SingletonVariable",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A problem found at one input line (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    pub line: usize,
    pub severity: Severity,
    pub code: Code,
    pub message: String,
}

impl Diagnostic {
    pub fn error(line: usize, code: Code, message: impl Into<String>) -> Self {
        Diagnostic::new(line, Severity::Error, code, message)
    }

    pub fn warning(line: usize, code: Code, message: impl Into<String>) -> Self {
        Diagnostic::new(line, Severity::Warning, code, message)
    }

    fn new(line: usize, severity: Severity, code: Code, message: impl Into<String>) -> Self {
        debug_assert!(line >= 1);
        Diagnostic {
            line: line.max(1),
            severity,
            code,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} {}: {}",
            self.line, self.severity, self.code, self.message
        )
    }
}
