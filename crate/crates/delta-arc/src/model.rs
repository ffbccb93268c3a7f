//! The architectural model: nominal data types, components with ports,
//! subcomponents and connectors, and the repository holding all definitions.
//!
//! This module also houses the wiring primitives everything else builds on:
//! implicit naming, type conformance, interface compatibility for component
//! substitution, and autoconnect resolution.
//!
//! All values are plain data; operations never mutate their inputs. Callers
//! that need an updated model work on a clone, which keeps every higher-level
//! operation trivially atomic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexMap;

use crate::diag::{Code, Diagnostic, Loc};

// ===== data types =====

/// Nominal data-type hierarchy. Conformance is the reflexive-transitive
/// closure of the declared supertype edges; the edge relation is kept acyclic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeHierarchy {
    /// Direct supertypes per declared type name.
    supers: BTreeMap<String, BTreeSet<String>>,
}

impl TypeHierarchy {
    pub fn new() -> Self {
        TypeHierarchy::default()
    }

    /// Registers a type name. Idempotent; declaring a name twice is harmless.
    pub fn declare(&mut self, name: &str) {
        self.supers.entry(name.to_string()).or_default();
    }

    pub fn is_declared(&self, name: &str) -> bool {
        self.supers.contains_key(name)
    }

    pub fn type_names(&self) -> impl Iterator<Item = &str> {
        self.supers.keys().map(String::as_str)
    }

    pub fn direct_supers(&self, name: &str) -> impl Iterator<Item = &str> {
        self.supers.get(name).into_iter().flatten().map(String::as_str)
    }

    /// Adds the edge `sub extends sup`, declaring both names if necessary.
    /// Rejects edges that would make the relation cyclic.
    pub fn add_edge(&mut self, sub: &str, sup: &str, loc: &Loc) -> Result<(), Diagnostic> {
        if self.conforms(sup, sub) {
            return Err(Diagnostic::error(
                Code::TypesCycle,
                loc.clone(),
                format!("`{sub} extends {sup}` would make the type hierarchy cyclic"),
            ));
        }
        self.declare(sup);
        self.supers.entry(sub.to_string()).or_default().insert(sup.to_string());
        Ok(())
    }

    /// True iff `sub` conforms to `sup`: the names are equal or `sup` is
    /// reachable from `sub` over declared supertype edges. Total over
    /// arbitrary names; an unregistered name conforms only to itself.
    pub fn conforms(&self, sub: &str, sup: &str) -> bool {
        if sub == sup {
            return true;
        }
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut work: Vec<&str> = vec![sub];
        while let Some(t) = work.pop() {
            for s in self.direct_supers(t) {
                if s == sup {
                    return true;
                }
                if seen.insert(s) {
                    work.push(s);
                }
            }
        }
        false
    }
}

// ===== component elements =====

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    In,
    Out,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::In => "in",
            Direction::Out => "out",
        })
    }
}

/// Autoconnect configuration of a component. `Port` derives implicit
/// connectors from matching port names, `Type` from unique type matches,
/// `Off` derives nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AutoconnectMode {
    Port,
    Type,
    #[default]
    Off,
}

impl fmt::Display for AutoconnectMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AutoconnectMode::Port => "port",
            AutoconnectMode::Type => "type",
            AutoconnectMode::Off => "off",
        })
    }
}

#[derive(Debug, Clone)]
pub struct PortDecl {
    pub direction: Direction,
    pub data_type: String,
    pub name: String,
    pub loc: Loc,
}

impl PortDecl {
    /// Field-wise equality ignoring source locations.
    pub fn same_decl(&self, other: &Self) -> bool {
        self.direction == other.direction
            && self.data_type == other.data_type
            && self.name == other.name
    }
}

#[derive(Debug, Clone)]
pub struct ParameterDecl {
    pub name: String,
    pub loc: Loc,
}

/// A configuration argument of a subcomponent instantiation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigArg {
    Int(i64),
    Str(String),
    /// Reference to a configuration parameter of the enclosing component.
    ParamRef(String),
}

impl fmt::Display for ConfigArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigArg::Int(i) => write!(f, "{i}"),
            ConfigArg::Str(s) => write!(f, "\"{s}\""),
            ConfigArg::ParamRef(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SubcomponentDecl {
    pub component_type: String,
    pub name: String,
    /// Positional arguments matching the instantiated component's parameters.
    pub args: Vec<ConfigArg>,
    pub loc: Loc,
}

impl SubcomponentDecl {
    pub fn same_decl(&self, other: &Self) -> bool {
        self.component_type == other.component_type
            && self.name == other.name
            && self.args == other.args
    }
}

/// Reference to a port, as written in a connector: `port` names a port of the
/// enclosing component, `owner.port` a port of the subcomponent `owner`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PortRef {
    pub owner: Option<String>,
    pub port: String,
}

impl PortRef {
    pub fn local(port: impl Into<String>) -> Self {
        PortRef { owner: None, port: port.into() }
    }

    pub fn sub(owner: impl Into<String>, port: impl Into<String>) -> Self {
        PortRef { owner: Some(owner.into()), port: port.into() }
    }
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.owner {
            Some(o) => write!(f, "{o}.{}", self.port),
            None => f.write_str(&self.port),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectorOrigin {
    /// Written in the model text (or materialised by `expand autoconnect`).
    Explicit,
    /// Derived by autoconnect resolution; never stored in a component.
    Implicit,
}

/// A directed connector from a data-flow source to a data-flow target.
#[derive(Debug, Clone)]
pub struct ConnectorDecl {
    pub source: PortRef,
    pub target: PortRef,
    pub origin: ConnectorOrigin,
    pub loc: Loc,
}

impl ConnectorDecl {
    pub fn explicit(source: PortRef, target: PortRef, loc: Loc) -> Self {
        ConnectorDecl { source, target, origin: ConnectorOrigin::Explicit, loc }
    }

    /// Source/target equality, ignoring origin and location.
    pub fn same_wiring(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target
    }

    pub fn wiring(&self) -> (&PortRef, &PortRef) {
        (&self.source, &self.target)
    }
}

impl fmt::Display for ConnectorDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.source, self.target)
    }
}

// ===== components and the repository =====

#[derive(Debug, Clone)]
pub struct ComponentDefinition {
    pub name: String,
    pub params: Vec<ParameterDecl>,
    pub autoconnect: AutoconnectMode,
    pub ports: Vec<PortDecl>,
    pub subcomponents: Vec<SubcomponentDecl>,
    /// Explicit connectors only; implicit wiring is computed on demand by
    /// [`resolve_autoconnect`].
    pub connectors: Vec<ConnectorDecl>,
    pub loc: Loc,
}

impl ComponentDefinition {
    pub fn new(name: impl Into<String>, loc: Loc) -> Self {
        ComponentDefinition {
            name: name.into(),
            params: Vec::new(),
            autoconnect: AutoconnectMode::Off,
            ports: Vec::new(),
            subcomponents: Vec::new(),
            connectors: Vec::new(),
            loc,
        }
    }

    pub fn port(&self, name: &str) -> Option<&PortDecl> {
        self.ports.iter().find(|p| p.name == name)
    }

    pub fn subcomponent(&self, name: &str) -> Option<&SubcomponentDecl> {
        self.subcomponents.iter().find(|s| s.name == name)
    }

    pub fn parameter(&self, name: &str) -> Option<&ParameterDecl> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn in_ports(&self) -> impl Iterator<Item = &PortDecl> {
        self.ports.iter().filter(|p| p.direction == Direction::In)
    }

    pub fn out_ports(&self) -> impl Iterator<Item = &PortDecl> {
        self.ports.iter().filter(|p| p.direction == Direction::Out)
    }

    /// True when the component is decomposed (has subcomponents) or wired
    /// (has explicit connectors). Atomic leaf components return false; reach-
    /// ability analysis and unconnected-port reporting do not apply to them.
    pub fn has_internal_structure(&self) -> bool {
        !self.subcomponents.is_empty() || !self.connectors.is_empty()
    }

    /// Structural equality: identical declarations up to declaration order of
    /// ports, subcomponents and connectors. Parameter order is significant
    /// (arguments are positional); source locations are ignored.
    pub fn structurally_equal(&self, other: &Self) -> bool {
        if self.name != other.name
            || self.autoconnect != other.autoconnect
            || self.params.len() != other.params.len()
            || self.ports.len() != other.ports.len()
            || self.subcomponents.len() != other.subcomponents.len()
            || self.connectors.len() != other.connectors.len()
        {
            return false;
        }
        if !self.params.iter().zip(&other.params).all(|(a, b)| a.name == b.name) {
            return false;
        }
        fn sorted_ports(c: &ComponentDefinition) -> Vec<&PortDecl> {
            let mut v: Vec<&PortDecl> = c.ports.iter().collect();
            v.sort_by(|a, b| a.name.cmp(&b.name));
            v
        }
        if !sorted_ports(self)
            .iter()
            .zip(sorted_ports(other).iter())
            .all(|(a, b)| a.same_decl(b))
        {
            return false;
        }
        fn sorted_subs(c: &ComponentDefinition) -> Vec<&SubcomponentDecl> {
            let mut v: Vec<&SubcomponentDecl> = c.subcomponents.iter().collect();
            v.sort_by(|a, b| a.name.cmp(&b.name));
            v
        }
        if !sorted_subs(self)
            .iter()
            .zip(sorted_subs(other).iter())
            .all(|(a, b)| a.same_decl(b))
        {
            return false;
        }
        fn sorted_conns(c: &ComponentDefinition) -> Vec<(&PortRef, &PortRef)> {
            let mut v: Vec<(&PortRef, &PortRef)> = c.connectors.iter().map(ConnectorDecl::wiring).collect();
            v.sort();
            v
        }
        sorted_conns(self) == sorted_conns(other)
    }
}

/// All component definitions of a model plus the data-type hierarchy.
/// Component names are unique; insertion order is preserved.
#[derive(Debug, Clone, Default)]
pub struct ModelRepository {
    pub components: IndexMap<String, ComponentDefinition>,
    pub types: TypeHierarchy,
}

impl ModelRepository {
    pub fn new() -> Self {
        ModelRepository::default()
    }

    pub fn component(&self, name: &str) -> Option<&ComponentDefinition> {
        self.components.get(name)
    }

    /// Inserts a definition, rejecting duplicate component names.
    pub fn insert(&mut self, c: ComponentDefinition) -> Result<(), Diagnostic> {
        if let Some(existing) = self.components.get(&c.name) {
            return Err(Diagnostic::error(
                Code::CcNameUnique,
                c.loc.clone(),
                format!(
                    "component `{}` is already defined at {}",
                    c.name, existing.loc
                ),
            ));
        }
        self.register_component_types(&c);
        self.components.insert(c.name.clone(), c);
        Ok(())
    }

    /// Registers every data-type name a component mentions, so type
    /// conformance is total. Undeclared names become fresh nominal types
    /// without supertypes.
    pub fn register_component_types(&mut self, c: &ComponentDefinition) {
        for p in &c.ports {
            self.types.declare(&p.data_type);
        }
    }

    /// Structural equality over all components and the type hierarchy; see
    /// [`ComponentDefinition::structurally_equal`].
    pub fn structurally_equal(&self, other: &Self) -> bool {
        if self.types != other.types || self.components.len() != other.components.len() {
            return false;
        }
        self.components.iter().all(|(name, c)| {
            other
                .components
                .get(name)
                .is_some_and(|o| c.structurally_equal(o))
        })
    }
}

// ===== naming =====

/// Derives the implicit name of an unnamed port or subcomponent from its type
/// name: the type name with the first character lowercased
/// (`SteeringMode` becomes `steeringMode`).
pub fn implicit_name(type_name: &str) -> String {
    let mut chars = type_name.chars();
    match chars.next() {
        Some(first) => first.to_lowercase().chain(chars).collect(),
        None => String::new(),
    }
}

// ===== interface compatibility =====

/// Port mapping justifying a component substitution: old port name to new
/// port name, per direction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InterfaceMapping {
    pub incoming: BTreeMap<String, String>,
    pub outgoing: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Compatibility {
    Compatible(InterfaceMapping),
    /// No mapping of the required shape exists.
    Incompatible(String),
    /// A mapping might exist but port pairing is not unique.
    Ambiguous(String),
}

impl Compatibility {
    pub fn is_compatible(&self) -> bool {
        matches!(self, Compatibility::Compatible(_))
    }
}

enum MatchFailure {
    Incompatible(String),
    Ambiguous(String),
}

/// Maps every port of `from` onto a distinct port of `to`, pairing same-named
/// ports first and then ports with a unique conformant candidate.
fn match_ports(
    from: &[&PortDecl],
    to: &[&PortDecl],
    conformant: impl Fn(&PortDecl, &PortDecl) -> bool,
    role: &str,
) -> Result<BTreeMap<String, String>, MatchFailure> {
    let mut mapping = BTreeMap::new();
    let mut used = vec![false; to.len()];
    let mut unmatched: Vec<&PortDecl> = Vec::new();

    for p in from {
        match to.iter().position(|q| q.name == p.name) {
            Some(i) if !used[i] && conformant(p, to[i]) => {
                used[i] = true;
                mapping.insert(p.name.clone(), to[i].name.clone());
            }
            _ => unmatched.push(p),
        }
    }

    // Candidate sets are computed for all unmatched ports before committing,
    // so the outcome does not depend on iteration order.
    let candidates: Vec<(usize, Vec<usize>)> = unmatched
        .iter()
        .enumerate()
        .map(|(idx, p)| {
            let cands = to
                .iter()
                .enumerate()
                .filter(|(i, q)| !used[*i] && conformant(p, q))
                .map(|(i, _)| i)
                .collect::<Vec<_>>();
            (idx, cands)
        })
        .collect();

    for (idx, cands) in &candidates {
        let p = unmatched[*idx];
        match cands.len() {
            0 => {
                return Err(MatchFailure::Incompatible(format!(
                    "no compatible counterpart for {role} `{}` of type `{}`",
                    p.name, p.data_type
                )))
            }
            1 => {}
            n => {
                let names: Vec<&str> = cands.iter().map(|i| to[*i].name.as_str()).collect();
                return Err(MatchFailure::Ambiguous(format!(
                    "{role} `{}` has {n} possible counterparts ({})",
                    p.name,
                    names.join(", ")
                )));
            }
        }
    }

    let mut taken: BTreeSet<usize> = BTreeSet::new();
    for (idx, cands) in &candidates {
        let i = cands[0];
        if !taken.insert(i) {
            return Err(MatchFailure::Incompatible(format!(
                "{role}s `{}` and another port both require counterpart `{}`",
                unmatched[*idx].name, to[i].name
            )));
        }
        mapping.insert(unmatched[*idx].name.clone(), to[i].name.clone());
    }
    Ok(mapping)
}

/// Decides whether `new` can substitute `old` wherever `old` is instantiated.
///
/// Every in-port of `old` must map bijectively onto an in-port of `new` of the
/// same type or a supertype; every out-port of `old` must map injectively onto
/// an out-port of `new` of the same type or a subtype (`new` may expose
/// additional out-ports).
pub fn interface_compatible(
    old: &ComponentDefinition,
    new: &ComponentDefinition,
    types: &TypeHierarchy,
) -> Compatibility {
    let old_in: Vec<&PortDecl> = old.in_ports().collect();
    let new_in: Vec<&PortDecl> = new.in_ports().collect();
    if old_in.len() != new_in.len() {
        return Compatibility::Incompatible(format!(
            "`{}` has {} in-port(s), `{}` has {}",
            old.name,
            old_in.len(),
            new.name,
            new_in.len()
        ));
    }
    let incoming = match match_ports(&old_in, &new_in, |p, q| types.conforms(&p.data_type, &q.data_type), "in-port") {
        Ok(m) => m,
        Err(MatchFailure::Incompatible(msg)) => return Compatibility::Incompatible(msg),
        Err(MatchFailure::Ambiguous(msg)) => return Compatibility::Ambiguous(msg),
    };

    let old_out: Vec<&PortDecl> = old.out_ports().collect();
    let new_out: Vec<&PortDecl> = new.out_ports().collect();
    if new_out.len() < old_out.len() {
        return Compatibility::Incompatible(format!(
            "`{}` has {} out-port(s), `{}` provides only {}",
            old.name,
            old_out.len(),
            new.name,
            new_out.len()
        ));
    }
    let outgoing = match match_ports(&old_out, &new_out, |p, q| types.conforms(&q.data_type, &p.data_type), "out-port") {
        Ok(m) => m,
        Err(MatchFailure::Incompatible(msg)) => return Compatibility::Incompatible(msg),
        Err(MatchFailure::Ambiguous(msg)) => return Compatibility::Ambiguous(msg),
    };

    Compatibility::Compatible(InterfaceMapping { incoming, outgoing })
}

// ===== autoconnect resolution =====

/// Result of autoconnect resolution: the derived implicit connectors in
/// canonical order plus warnings for targets skipped because several sources
/// matched.
#[derive(Debug, Clone, Default)]
pub struct AutoconnectResolution {
    pub connectors: Vec<ConnectorDecl>,
    pub diagnostics: Vec<Diagnostic>,
}

/// A connection endpoint candidate with its resolved declaration.
struct Endpoint<'a> {
    re: PortRef,
    decl: &'a PortDecl,
}

/// Computes the implicit connectors of `c` under its autoconnect mode.
///
/// Candidate pairs run from data-flow sources (in-ports of `c`, out-ports of
/// subcomponents) to data-flow targets (out-ports of `c`, in-ports of
/// subcomponents), never from a subcomponent to itself and never from the
/// enclosing component directly to itself. Targets already fed by an explicit
/// connector are left alone; each target receives at most one connector. In
/// mode `port` a source matches a target when names are equal and the source
/// type conforms to the target type; in mode `type` when it is the only
/// type-conformant candidate. Several matching sources for one target make
/// the target ambiguous: it is skipped and a warning is emitted.
///
/// Resolution is deterministic; connectors are ordered by (target, source).
pub fn resolve_autoconnect(c: &ComponentDefinition, repo: &ModelRepository) -> AutoconnectResolution {
    let mut res = AutoconnectResolution::default();
    if c.autoconnect == AutoconnectMode::Off {
        return res;
    }

    let mut sources: Vec<Endpoint<'_>> = Vec::new();
    let mut targets: Vec<Endpoint<'_>> = Vec::new();
    for p in c.in_ports() {
        sources.push(Endpoint { re: PortRef::local(&p.name), decl: p });
    }
    for p in c.out_ports() {
        targets.push(Endpoint { re: PortRef::local(&p.name), decl: p });
    }
    for s in &c.subcomponents {
        let Some(def) = repo.component(&s.component_type) else {
            continue; // unresolved subcomponent types contribute no endpoints
        };
        for p in def.out_ports() {
            sources.push(Endpoint { re: PortRef::sub(&s.name, &p.name), decl: p });
        }
        for p in def.in_ports() {
            targets.push(Endpoint { re: PortRef::sub(&s.name, &p.name), decl: p });
        }
    }

    let occupied: BTreeSet<&PortRef> = c.connectors.iter().map(|k| &k.target).collect();

    for t in &targets {
        if occupied.contains(&t.re) {
            continue; // explicit wiring wins
        }
        let admissible = |s: &Endpoint<'_>| match (&s.re.owner, &t.re.owner) {
            (None, None) => false,                  // enclosing in -> enclosing out
            (Some(a), Some(b)) if a == b => false,  // subcomponent to itself
            _ => true,
        };
        let matching: Vec<&Endpoint<'_>> = sources
            .iter()
            .filter(|s| admissible(s))
            .filter(|s| match c.autoconnect {
                AutoconnectMode::Port => {
                    s.decl.name == t.decl.name
                        && repo.types.conforms(&s.decl.data_type, &t.decl.data_type)
                }
                AutoconnectMode::Type => repo.types.conforms(&s.decl.data_type, &t.decl.data_type),
                AutoconnectMode::Off => false,
            })
            .collect();
        match matching.len() {
            0 => {}
            1 => res.connectors.push(ConnectorDecl {
                source: matching[0].re.clone(),
                target: t.re.clone(),
                origin: ConnectorOrigin::Implicit,
                loc: c.loc.clone(),
            }),
            n => {
                let names: Vec<String> = matching.iter().map(|s| s.re.to_string()).collect();
                res.diagnostics.push(Diagnostic::warning(
                    Code::AcAmbiguous,
                    c.loc.clone(),
                    format!(
                        "autoconnect {} in `{}`: target `{}` has {n} matching sources ({}); skipped",
                        c.autoconnect,
                        c.name,
                        t.re,
                        names.join(", ")
                    ),
                ));
            }
        }
    }

    res.connectors
        .sort_by(|a, b| (&a.target, &a.source).cmp(&(&b.target, &b.source)));
    res.diagnostics.sort_by(|a, b| a.message.cmp(&b.message));
    res
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loc() -> Loc {
        Loc::synthetic()
    }

    fn port(dir: Direction, ty: &str, name: &str) -> PortDecl {
        PortDecl { direction: dir, data_type: ty.into(), name: name.into(), loc: loc() }
    }

    #[test]
    fn implicit_names_lowercase_the_first_character() {
        assert_eq!(implicit_name("SteeringMode"), "steeringMode");
        assert_eq!(implicit_name("AccEval"), "accEval");
        assert_eq!(implicit_name("x"), "x");
    }

    #[test]
    fn conformance_is_reflexive_and_transitive() {
        let mut h = TypeHierarchy::new();
        h.add_edge("C", "B", &loc()).unwrap();
        h.add_edge("B", "A", &loc()).unwrap();
        assert!(h.conforms("A", "A"));
        assert!(h.conforms("C", "B"));
        assert!(h.conforms("C", "A"));
        assert!(!h.conforms("A", "C"));
        assert!(!h.conforms("Unrelated", "A"));
        assert!(h.conforms("Unregistered", "Unregistered"));
    }

    #[test]
    fn cyclic_type_edges_are_rejected() {
        let mut h = TypeHierarchy::new();
        h.add_edge("B", "A", &loc()).unwrap();
        let err = h.add_edge("A", "B", &loc()).unwrap_err();
        assert_eq!(err.code, Code::TypesCycle);
        let err = h.add_edge("A", "A", &loc()).unwrap_err();
        assert_eq!(err.code, Code::TypesCycle);
    }

    #[test]
    fn identical_interfaces_are_compatible() {
        let mut a = ComponentDefinition::new("A", loc());
        a.ports = vec![port(Direction::In, "T", "x"), port(Direction::Out, "U", "y")];
        let mut b = ComponentDefinition::new("B", loc());
        b.ports = vec![port(Direction::In, "T", "x"), port(Direction::Out, "U", "y")];
        let h = TypeHierarchy::new();
        match interface_compatible(&a, &b, &h) {
            Compatibility::Compatible(m) => {
                assert_eq!(m.incoming.get("x").map(String::as_str), Some("x"));
                assert_eq!(m.outgoing.get("y").map(String::as_str), Some("y"));
            }
            other => panic!("expected compatible, got {other:?}"),
        }
    }

    #[test]
    fn substitution_accepts_wider_inputs_and_narrower_outputs() {
        // T extends S and V extends U: the replacement consumes the supertype
        // and produces the subtype.
        let mut h = TypeHierarchy::new();
        h.add_edge("T", "S", &loc()).unwrap();
        h.add_edge("V", "U", &loc()).unwrap();
        let mut a = ComponentDefinition::new("A", loc());
        a.ports = vec![port(Direction::In, "T", "a"), port(Direction::Out, "U", "b")];
        let mut b = ComponentDefinition::new("B", loc());
        b.ports = vec![port(Direction::In, "S", "a"), port(Direction::Out, "V", "b")];
        assert!(interface_compatible(&a, &b, &h).is_compatible());
        // The reverse substitution narrows the input and widens the output.
        assert!(!interface_compatible(&b, &a, &h).is_compatible());
    }

    #[test]
    fn differing_in_port_count_is_incompatible() {
        let mut a = ComponentDefinition::new("A", loc());
        a.ports = vec![port(Direction::In, "T", "x")];
        let b = ComponentDefinition::new("B", loc());
        let h = TypeHierarchy::new();
        assert!(matches!(interface_compatible(&a, &b, &h), Compatibility::Incompatible(_)));
    }

    #[test]
    fn several_type_candidates_without_name_match_are_ambiguous() {
        let mut a = ComponentDefinition::new("A", loc());
        a.ports = vec![port(Direction::In, "T", "x"), port(Direction::In, "T", "y")];
        let mut b = ComponentDefinition::new("B", loc());
        b.ports = vec![port(Direction::In, "T", "p"), port(Direction::In, "T", "q")];
        let h = TypeHierarchy::new();
        assert!(matches!(interface_compatible(&a, &b, &h), Compatibility::Ambiguous(_)));
    }

    #[test]
    fn resolution_is_empty_with_autoconnect_off() {
        let mut repo = ModelRepository::new();
        let mut c = ComponentDefinition::new("C", loc());
        c.ports = vec![port(Direction::In, "T", "x"), port(Direction::Out, "T", "x2")];
        repo.insert(c.clone()).unwrap();
        assert!(resolve_autoconnect(&c, &repo).connectors.is_empty());
    }

    #[test]
    fn port_mode_matches_names_across_the_three_pair_kinds() {
        let mut repo = ModelRepository::new();
        let mut inner = ComponentDefinition::new("Inner", loc());
        inner.ports = vec![port(Direction::In, "T", "x"), port(Direction::Out, "T", "y")];
        repo.insert(inner).unwrap();
        let mut sink = ComponentDefinition::new("Sink", loc());
        sink.ports = vec![port(Direction::In, "T", "y")];
        repo.insert(sink).unwrap();

        let mut c = ComponentDefinition::new("C", loc());
        c.autoconnect = AutoconnectMode::Port;
        c.ports = vec![port(Direction::In, "T", "x"), port(Direction::Out, "T", "y")];
        c.subcomponents = vec![
            SubcomponentDecl { component_type: "Inner".into(), name: "inner".into(), args: vec![], loc: loc() },
            SubcomponentDecl { component_type: "Sink".into(), name: "sink".into(), args: vec![], loc: loc() },
        ];
        let res = resolve_autoconnect(&c, &repo);
        let wires: Vec<String> = res.connectors.iter().map(ToString::to_string).collect();
        // Canonical (target, source) order: the component's own out-ports
        // sort before subcomponent ports.
        assert_eq!(wires, ["inner.y -> y", "x -> inner.x", "inner.y -> sink.y"]);
        assert!(res.diagnostics.is_empty());
    }

    #[test]
    fn explicit_wiring_wins_over_resolution() {
        let mut repo = ModelRepository::new();
        let mut inner = ComponentDefinition::new("Inner", loc());
        inner.ports = vec![port(Direction::In, "T", "x")];
        repo.insert(inner).unwrap();
        let mut c = ComponentDefinition::new("C", loc());
        c.autoconnect = AutoconnectMode::Port;
        c.ports = vec![port(Direction::In, "T", "x"), port(Direction::In, "T", "other")];
        c.subcomponents =
            vec![SubcomponentDecl { component_type: "Inner".into(), name: "inner".into(), args: vec![], loc: loc() }];
        c.connectors = vec![ConnectorDecl::explicit(PortRef::local("other"), PortRef::sub("inner", "x"), loc())];
        let res = resolve_autoconnect(&c, &repo);
        assert!(res.connectors.is_empty(), "occupied target must be skipped");
    }

    #[test]
    fn type_mode_requires_a_unique_candidate() {
        let mut repo = ModelRepository::new();
        let mut consumer = ComponentDefinition::new("Consumer", loc());
        consumer.ports = vec![port(Direction::In, "Int", "value")];
        repo.insert(consumer).unwrap();

        let mut c = ComponentDefinition::new("C", loc());
        c.autoconnect = AutoconnectMode::Type;
        c.ports = vec![port(Direction::In, "Int", "a")];
        c.subcomponents =
            vec![SubcomponentDecl { component_type: "Consumer".into(), name: "consumer".into(), args: vec![], loc: loc() }];
        let res = resolve_autoconnect(&c, &repo);
        assert_eq!(res.connectors.len(), 1);
        assert_eq!(res.connectors[0].to_string(), "a -> consumer.value");

        // A second Int producer makes the target ambiguous: no connector, one warning.
        c.ports.push(port(Direction::In, "Int", "b"));
        let res = resolve_autoconnect(&c, &repo);
        assert!(res.connectors.is_empty());
        assert_eq!(res.diagnostics.len(), 1);
        assert_eq!(res.diagnostics[0].code, Code::AcAmbiguous);
    }

    #[test]
    fn structural_equality_ignores_declaration_order() {
        let mut a = ComponentDefinition::new("C", loc());
        a.ports = vec![port(Direction::In, "T", "x"), port(Direction::Out, "U", "y")];
        a.connectors = vec![ConnectorDecl::explicit(PortRef::local("x"), PortRef::local("y"), loc())];
        let mut b = a.clone();
        b.ports.reverse();
        assert!(a.structurally_equal(&b));
        b.ports[0].data_type = "Other".into();
        assert!(!a.structurally_equal(&b));
    }
}
