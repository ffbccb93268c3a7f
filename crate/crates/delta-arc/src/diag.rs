//! Diagnostics shared by every stage of the toolchain: stable codes, severities,
//! source locations, and ordered reports.
//!
//! Codes are part of the tool's interface. Their textual form (`CC-PORT-LOWER`,
//! `DM-CONN-INVALID`, ...) never changes meaning across releases, so scripts may
//! match on them.

use std::fmt;
use std::sync::Arc;

/// A position inside a source artifact. `line` and `column` are 1-based;
/// synthetic locations use 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Loc {
    pub file: Arc<str>,
    pub line: u32,
    pub column: u32,
}

impl Loc {
    pub fn new(file: impl Into<Arc<str>>, line: u32, column: u32) -> Self {
        Loc { file: file.into(), line, column }
    }

    /// Location for elements produced by the toolchain itself (e.g. implicit
    /// connectors) rather than read from text.
    pub fn synthetic() -> Self {
        Loc::new("<synthetic>", 0, 0)
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
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

/// Stable diagnostic codes.
///
/// `PARSE-*` and `TYPES-*` come from the frontend, `CC-*` from the context
/// conditions (wellformedness), `AC-*` from autoconnect resolution, `DM-*` from
/// delta applicability, `ORD-*` from application-order search, and the rest
/// from generation and metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Code {
    ParseSyntax,
    TypesCycle,
    CcPortLower,
    CcNameUnique,
    CcConnResolve,
    CcConnDup,
    CcConnFanin,
    CcTypeResolve,
    CcArgCount,
    CcConnType,
    CcDecompCycle,
    CcPortUnconnected,
    AcAmbiguous,
    DmNoComponent,
    DmAddDup,
    DmRmMissing,
    DmRmPortConnected,
    DmRmSubcConnected,
    DmRenameBad,
    DmConfigNoParam,
    DmReplaceIncompat,
    DmConnInvalid,
    DmDiscMissing,
    OrdUnsat,
    OrdTooLarge,
    OrdUnknownName,
    GenDeltaMissing,
    MetricsEmpty,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::ParseSyntax => "PARSE-SYNTAX",
            Code::TypesCycle => "TYPES-CYCLE",
            Code::CcPortLower => "CC-PORT-LOWER",
            Code::CcNameUnique => "CC-NAME-UNIQUE",
            Code::CcConnResolve => "CC-CONN-RESOLVE",
            Code::CcConnDup => "CC-CONN-DUP",
            Code::CcConnFanin => "CC-CONN-FANIN",
            Code::CcTypeResolve => "CC-TYPE-RESOLVE",
            Code::CcArgCount => "CC-ARG-COUNT",
            Code::CcConnType => "CC-CONN-TYPE",
            Code::CcDecompCycle => "CC-DECOMP-CYCLE",
            Code::CcPortUnconnected => "CC-PORT-UNCONNECTED",
            Code::AcAmbiguous => "AC-AMBIGUOUS",
            Code::DmNoComponent => "DM-NO-COMPONENT",
            Code::DmAddDup => "DM-ADD-DUP",
            Code::DmRmMissing => "DM-RM-MISSING",
            Code::DmRmPortConnected => "DM-RM-PORT-CONNECTED",
            Code::DmRmSubcConnected => "DM-RM-SUBC-CONNECTED",
            Code::DmRenameBad => "DM-RENAME-BAD",
            Code::DmConfigNoParam => "DM-CONFIG-NO-PARAM",
            Code::DmReplaceIncompat => "DM-REPLACE-INCOMPAT",
            Code::DmConnInvalid => "DM-CONN-INVALID",
            Code::DmDiscMissing => "DM-DISC-MISSING",
            Code::OrdUnsat => "ORD-UNSAT",
            Code::OrdTooLarge => "ORD-TOO-LARGE",
            Code::OrdUnknownName => "ORD-UNKNOWN-NAME",
            Code::GenDeltaMissing => "GEN-DELTA-MISSING",
            Code::MetricsEmpty => "METRICS-EMPTY",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single finding, tied to a stable code and a source location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub loc: Loc,
}

impl Diagnostic {
    pub fn error(code: Code, loc: Loc, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, code, message: message.into(), loc }
    }

    pub fn warning(code: Code, loc: Loc, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, code, message: message.into(), loc }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}[{}]: {}", self.loc, self.severity, self.code, self.message)
    }
}

impl std::error::Error for Diagnostic {}

/// An ordered collection of diagnostics. Reports are sorted by
/// (file, line, column, code, message) so identical inputs always produce
/// byte-identical output.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub diagnostics: Vec<Diagnostic>,
}

impl CheckReport {
    pub fn new() -> Self {
        CheckReport::default()
    }

    pub fn push(&mut self, d: Diagnostic) {
        self.diagnostics.push(d);
    }

    pub fn extend(&mut self, ds: impl IntoIterator<Item = Diagnostic>) {
        self.diagnostics.extend(ds);
    }

    pub fn sort(&mut self) {
        self.diagnostics
            .sort_by(|a, b| (&a.loc, a.code, a.severity, &a.message).cmp(&(&b.loc, b.code, b.severity, &b.message)));
    }

    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| !d.is_error())
    }

    pub fn is_empty(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.diagnostics {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_render_their_stable_identifiers() {
        assert_eq!(Code::CcPortLower.to_string(), "CC-PORT-LOWER");
        assert_eq!(Code::DmConnInvalid.to_string(), "DM-CONN-INVALID");
        assert_eq!(Code::OrdUnsat.to_string(), "ORD-UNSAT");
    }

    #[test]
    fn reports_sort_by_location_then_code() {
        let mut r = CheckReport::new();
        r.push(Diagnostic::error(Code::CcNameUnique, Loc::new("b.arc", 1, 1), "x"));
        r.push(Diagnostic::error(Code::CcPortLower, Loc::new("a.arc", 2, 1), "y"));
        r.push(Diagnostic::error(Code::CcPortLower, Loc::new("a.arc", 1, 5), "z"));
        r.sort();
        let locs: Vec<String> = r.diagnostics.iter().map(|d| d.loc.to_string()).collect();
        assert_eq!(locs, ["a.arc:1:5", "a.arc:2:1", "b.arc:1:1"]);
    }
}
