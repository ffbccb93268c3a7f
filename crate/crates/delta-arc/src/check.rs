//! Wellformedness: the context conditions models have to satisfy.
//!
//! Checks come in two tiers. [`check_local`] covers the conditions a single
//! component can establish by itself and runs after every delta application,
//! restricted to the elements the delta touched; intermediate products may
//! still violate whole-model conditions. [`check_full`] runs the
//! local conditions on every element plus the repository-wide conditions and
//! gates core models and final products. Every repository passing
//! [`check_full`] also passes [`check_local`] for each of its components with
//! all elements marked touched.

use std::collections::{BTreeMap, BTreeSet};

use crate::diag::{CheckReport, Code, Diagnostic};
use crate::model::{
    resolve_autoconnect, ComponentDefinition, ConfigArg, ConnectorDecl, Direction, ModelRepository,
    PortRef,
};

/// Identity of a component element, used to restrict local checks to what a
/// delta actually touched.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ElementKey {
    Port(String),
    Subcomponent(String),
    Parameter(String),
    Connector(PortRef, PortRef),
}

pub type TouchedSet = BTreeSet<ElementKey>;

/// Marks every element of `c` as touched.
pub fn all_elements(c: &ComponentDefinition) -> TouchedSet {
    let mut t = TouchedSet::new();
    for p in &c.ports {
        t.insert(ElementKey::Port(p.name.clone()));
    }
    for s in &c.subcomponents {
        t.insert(ElementKey::Subcomponent(s.name.clone()));
    }
    for p in &c.params {
        t.insert(ElementKey::Parameter(p.name.clone()));
    }
    for k in &c.connectors {
        t.insert(ElementKey::Connector(k.source.clone(), k.target.clone()));
    }
    t
}

/// Checks the single-component context conditions of `c`, reporting only
/// issues involving a touched element: port names start lowercase, names are
/// unique per element kind, connector endpoints resolve against `c`'s own
/// interface, and the explicit connectors are duplicate-free with at most one
/// incoming connector per target.
pub fn check_local(c: &ComponentDefinition, touched: &TouchedSet) -> CheckReport {
    let mut report = CheckReport::new();

    for p in &c.ports {
        if !touched.contains(&ElementKey::Port(p.name.clone())) {
            continue;
        }
        if !p.name.chars().next().is_some_and(|ch| ch.is_lowercase()) {
            report.push(Diagnostic::error(
                Code::CcPortLower,
                p.loc.clone(),
                format!("port name `{}` must start with a lowercase letter", p.name),
            ));
        }
    }

    let count = |names: &mut BTreeMap<String, usize>, name: &str| {
        *names.entry(name.to_string()).or_insert(0) += 1;
    };
    let mut port_names = BTreeMap::new();
    let mut sub_names = BTreeMap::new();
    let mut param_names = BTreeMap::new();
    for p in &c.ports {
        count(&mut port_names, &p.name);
    }
    for s in &c.subcomponents {
        count(&mut sub_names, &s.name);
    }
    for p in &c.params {
        count(&mut param_names, &p.name);
    }
    let flag_dup = |names: &BTreeMap<String, usize>, key: fn(String) -> ElementKey, kind: &str, report: &mut CheckReport| {
        for (name, n) in names {
            if *n > 1 && touched.contains(&key(name.clone())) {
                report.push(Diagnostic::error(
                    Code::CcNameUnique,
                    c.loc.clone(),
                    format!("{kind} name `{name}` is declared {n} times in component `{}`", c.name),
                ));
            }
        }
    };
    flag_dup(&port_names, ElementKey::Port, "port", &mut report);
    flag_dup(&sub_names, ElementKey::Subcomponent, "subcomponent", &mut report);
    flag_dup(&param_names, ElementKey::Parameter, "parameter", &mut report);

    for k in &c.connectors {
        if !touched.contains(&ElementKey::Connector(k.source.clone(), k.target.clone())) {
            continue;
        }
        check_endpoint_local(c, k, &k.source, Direction::In, &mut report);
        check_endpoint_local(c, k, &k.target, Direction::Out, &mut report);

        let same: usize = c.connectors.iter().filter(|o| o.same_wiring(k)).count();
        if same > 1 {
            report.push(Diagnostic::error(
                Code::CcConnDup,
                k.loc.clone(),
                format!("connector `{k}` is declared {same} times in component `{}`", c.name),
            ));
        } else {
            let incoming: Vec<&ConnectorDecl> =
                c.connectors.iter().filter(|o| o.target == k.target).collect();
            if incoming.len() > 1 {
                let sources: Vec<String> = incoming.iter().map(|o| o.source.to_string()).collect();
                report.push(Diagnostic::error(
                    Code::CcConnFanin,
                    k.loc.clone(),
                    format!(
                        "target `{}` in component `{}` receives {} connectors ({})",
                        k.target,
                        c.name,
                        incoming.len(),
                        sources.join(", ")
                    ),
                ));
            }
        }
    }

    report.sort();
    report
}

/// Local-tier endpoint resolution: references to the enclosing component's
/// own ports must exist and sit on the correct side of the data flow;
/// subcomponent owners must exist. Ports *of* subcomponents need the
/// repository and are resolved by [`check_full`].
fn check_endpoint_local(
    c: &ComponentDefinition,
    k: &ConnectorDecl,
    re: &PortRef,
    enclosing_side: Direction,
    report: &mut CheckReport,
) {
    let role = if enclosing_side == Direction::In { "source" } else { "target" };
    match &re.owner {
        None => match c.port(&re.port) {
            None => report.push(Diagnostic::error(
                Code::CcConnResolve,
                k.loc.clone(),
                format!("connector {role} `{re}` does not resolve to a port of component `{}`", c.name),
            )),
            Some(p) if p.direction != enclosing_side => report.push(Diagnostic::error(
                Code::CcConnResolve,
                k.loc.clone(),
                format!(
                    "connector {role} `{re}` must be an {enclosing_side}-port of component `{}`",
                    c.name
                ),
            )),
            Some(_) => {}
        },
        Some(owner) => {
            if c.subcomponent(owner).is_none() {
                report.push(Diagnostic::error(
                    Code::CcConnResolve,
                    k.loc.clone(),
                    format!(
                        "connector {role} `{re}` refers to undeclared subcomponent `{owner}` of component `{}`",
                        c.name
                    ),
                ));
            }
        }
    }
}

/// Checks a whole repository: all local conditions with every element
/// touched, subcomponent type and argument validity, full connector
/// resolution and type conformance, acyclic decomposition, and — as warnings
/// — ports left unconnected by the union of explicit and implicit wiring.
pub fn check_full(repo: &ModelRepository) -> CheckReport {
    let mut report = CheckReport::new();
    let mut names: Vec<&String> = repo.components.keys().collect();
    names.sort();

    for name in &names {
        let c = &repo.components[*name];
        report.extend(check_local(c, &all_elements(c)).diagnostics);
        check_subcomponents(repo, c, &mut report);
        check_connectors_full(repo, c, &mut report);
        check_port_usage(repo, c, &mut report);
    }
    check_decomposition(repo, &names, &mut report);

    report.sort();
    report
}

fn check_subcomponents(repo: &ModelRepository, c: &ComponentDefinition, report: &mut CheckReport) {
    for s in &c.subcomponents {
        let Some(def) = repo.component(&s.component_type) else {
            report.push(Diagnostic::error(
                Code::CcTypeResolve,
                s.loc.clone(),
                format!(
                    "subcomponent `{}` of component `{}` references undefined type `{}`",
                    s.name, c.name, s.component_type
                ),
            ));
            continue;
        };
        if s.args.len() != def.params.len() {
            report.push(Diagnostic::error(
                Code::CcArgCount,
                s.loc.clone(),
                format!(
                    "subcomponent `{}` supplies {} argument(s) but `{}` declares {} parameter(s)",
                    s.name,
                    s.args.len(),
                    def.name,
                    def.params.len()
                ),
            ));
        }
        for (i, arg) in s.args.iter().enumerate() {
            if let ConfigArg::ParamRef(r) = arg {
                if c.parameter(r).is_none() {
                    report.push(Diagnostic::error(
                        Code::CcArgCount,
                        s.loc.clone(),
                        format!(
                            "argument {} of subcomponent `{}` references undeclared parameter `{r}` of component `{}`",
                            i + 1,
                            s.name,
                            c.name
                        ),
                    ));
                }
            }
        }
    }
}

/// Resolves a connector endpoint to its port declaration, if the reference
/// and all definitions it needs are present.
fn resolve_endpoint<'a>(
    repo: &'a ModelRepository,
    c: &'a ComponentDefinition,
    re: &PortRef,
) -> Option<&'a crate::model::PortDecl> {
    match &re.owner {
        None => c.port(&re.port),
        Some(owner) => {
            let sub = c.subcomponent(owner)?;
            repo.component(&sub.component_type)?.port(&re.port)
        }
    }
}

fn check_connectors_full(repo: &ModelRepository, c: &ComponentDefinition, report: &mut CheckReport) {
    for k in &c.connectors {
        let mut resolved = true;
        for (re, enclosing_side) in [(&k.source, Direction::In), (&k.target, Direction::Out)] {
            let role = if enclosing_side == Direction::In { "source" } else { "target" };
            let Some(owner) = &re.owner else {
                continue; // enclosing-port endpoints are fully covered by check_local
            };
            let Some(sub) = c.subcomponent(owner) else {
                resolved = false;
                continue; // reported by check_local
            };
            let Some(def) = repo.component(&sub.component_type) else {
                resolved = false;
                continue; // reported as CC-TYPE-RESOLVE
            };
            match def.port(&re.port) {
                None => {
                    resolved = false;
                    report.push(Diagnostic::error(
                        Code::CcConnResolve,
                        k.loc.clone(),
                        format!(
                            "connector {role} `{re}` does not resolve: `{}` has no port `{}`",
                            def.name, re.port
                        ),
                    ));
                }
                Some(p) => {
                    // Data flows out of a subcomponent's out-ports and into
                    // its in-ports.
                    let needed = if enclosing_side == Direction::In { Direction::Out } else { Direction::In };
                    if p.direction != needed {
                        resolved = false;
                        report.push(Diagnostic::error(
                            Code::CcConnResolve,
                            k.loc.clone(),
                            format!("connector {role} `{re}` must be an {needed}-port of `{}`", def.name),
                        ));
                    }
                }
            }
        }
        if !resolved {
            continue;
        }
        let (Some(sp), Some(tp)) = (resolve_endpoint(repo, c, &k.source), resolve_endpoint(repo, c, &k.target))
        else {
            continue; // unresolvable enclosing-port refs are reported locally
        };
        if !repo.types.conforms(&sp.data_type, &tp.data_type) {
            report.push(Diagnostic::error(
                Code::CcConnType,
                k.loc.clone(),
                format!(
                    "connector `{k}` in component `{}` connects `{}` to `{}`, which it does not conform to",
                    c.name, sp.data_type, tp.data_type
                ),
            ));
        }
    }
}

/// Warns about ports untouched by the union of explicit and implicit wiring.
/// Components without internal structure are exempt: an atomic component has
/// no connectors of its own, its ports are wired by whoever instantiates it.
fn check_port_usage(repo: &ModelRepository, c: &ComponentDefinition, report: &mut CheckReport) {
    if !c.has_internal_structure() {
        return;
    }
    let resolution = resolve_autoconnect(c, repo);
    report.extend(resolution.diagnostics);

    let mut used: BTreeSet<PortRef> = BTreeSet::new();
    for k in c.connectors.iter().chain(resolution.connectors.iter()) {
        used.insert(k.source.clone());
        used.insert(k.target.clone());
    }
    for p in &c.ports {
        if !used.contains(&PortRef::local(&p.name)) {
            report.push(Diagnostic::warning(
                Code::CcPortUnconnected,
                p.loc.clone(),
                format!("port `{}` of component `{}` is not connected", p.name, c.name),
            ));
        }
    }
    for s in &c.subcomponents {
        let Some(def) = repo.component(&s.component_type) else {
            continue;
        };
        for p in &def.ports {
            if !used.contains(&PortRef::sub(&s.name, &p.name)) {
                report.push(Diagnostic::warning(
                    Code::CcPortUnconnected,
                    s.loc.clone(),
                    format!("port `{}.{}` in component `{}` is not connected", s.name, p.name, c.name),
                ));
            }
        }
    }
}

fn check_decomposition(repo: &ModelRepository, names: &[&String], report: &mut CheckReport) {
    // A component participating in an instantiation cycle reaches itself over
    // subcomponent-type edges.
    let reaches_self = |start: &str| -> bool {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut work: Vec<&str> = vec![start];
        while let Some(n) = work.pop() {
            let Some(c) = repo.component(n) else { continue };
            for s in &c.subcomponents {
                if s.component_type == start {
                    return true;
                }
                if repo.components.contains_key(&s.component_type) && seen.insert(&s.component_type) {
                    work.push(&s.component_type);
                }
            }
        }
        false
    };
    for name in names {
        if reaches_self(name) {
            let c = &repo.components[*name];
            report.push(Diagnostic::error(
                Code::CcDecompCycle,
                c.loc.clone(),
                format!("component `{name}` is contained in its own decomposition"),
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::Loc;
    use crate::parser::parse_component_text;

    fn repo_of(sources: &[&str]) -> ModelRepository {
        let mut repo = ModelRepository::new();
        for (i, s) in sources.iter().enumerate() {
            let c = parse_component_text(s, &format!("m{i}.arc")).unwrap();
            repo.insert(c).unwrap();
        }
        repo
    }

    fn codes(report: &CheckReport) -> Vec<Code> {
        report.diagnostics.iter().map(|d| d.code).collect()
    }

    #[test]
    fn well_formed_component_passes_local_checks() {
        let c = parse_component_text("component C { port in T x, out T y; }", "c.arc").unwrap();
        assert!(check_local(&c, &all_elements(&c)).is_empty());
    }

    #[test]
    fn uppercase_port_names_are_flagged() {
        let c = parse_component_text("component C { port out Integer Engine5; }", "c.arc").unwrap();
        assert_eq!(codes(&check_local(&c, &all_elements(&c))), [Code::CcPortLower]);
    }

    #[test]
    fn untouched_elements_are_not_reported() {
        let c = parse_component_text("component C { port out Integer Engine5, in T x; }", "c.arc").unwrap();
        let mut touched = TouchedSet::new();
        touched.insert(ElementKey::Port("x".into()));
        assert!(check_local(&c, &touched).is_empty());
    }

    #[test]
    fn duplicate_names_are_flagged_per_kind() {
        let c = parse_component_text("component C { port in T x, in U x; }", "c.arc").unwrap();
        assert_eq!(codes(&check_local(&c, &all_elements(&c))), [Code::CcNameUnique]);
        // A port and a subcomponent may share a name; references are not
        // ambiguous because `x` and `x.y` are syntactically distinct.
        let c = parse_component_text("component C { port in T s; component S s; }", "c.arc").unwrap();
        assert!(codes(&check_local(&c, &all_elements(&c))).is_empty());
    }

    #[test]
    fn dangling_and_ill_directed_refs_are_resolution_errors() {
        let c = parse_component_text("component C { port in T x; connect y -> x; }", "c.arc").unwrap();
        let got = codes(&check_local(&c, &all_elements(&c)));
        // `y` does not exist and `x` is an in-port used as target.
        assert_eq!(got, [Code::CcConnResolve, Code::CcConnResolve]);
    }

    #[test]
    fn duplicate_connectors_and_fan_in_are_distinguished() {
        let c = parse_component_text(
            "component C { port in T a, in T b, out T y; connect a -> y; connect a -> y; }",
            "c.arc",
        )
        .unwrap();
        assert_eq!(codes(&check_local(&c, &all_elements(&c))), [Code::CcConnDup, Code::CcConnDup]);
        let c = parse_component_text(
            "component C { port in T a, in T b, out T y; connect a -> y; connect b -> y; }",
            "c.arc",
        )
        .unwrap();
        assert_eq!(codes(&check_local(&c, &all_elements(&c))), [Code::CcConnFanin, Code::CcConnFanin]);
    }

    #[test]
    fn undefined_subcomponent_types_fail_the_full_check() {
        let repo = repo_of(&["component FlightController { component GyroEval gEval; }"]);
        let report = check_full(&repo);
        assert!(codes(&report).contains(&Code::CcTypeResolve));
    }

    #[test]
    fn argument_arity_and_references_are_validated() {
        let repo = repo_of(&[
            "component S(a, b) { }",
            "component C { component S(1) s; }",
            "component D(n) { component S(n, m) t; }",
        ]);
        let report = check_full(&repo);
        let arg_errors: Vec<_> = report.diagnostics.iter().filter(|d| d.code == Code::CcArgCount).collect();
        assert_eq!(arg_errors.len(), 2);
        assert!(arg_errors[1].message.contains("undeclared parameter `m`"));
    }

    #[test]
    fn connector_types_must_conform() {
        let mut repo = repo_of(&["component C { port in T x, out U y; connect x -> y; }"]);
        let report = check_full(&repo);
        assert!(codes(&report).contains(&Code::CcConnType));
        // With `T extends U` the same connector becomes legal.
        repo.types.add_edge("T", "U", &Loc::synthetic()).unwrap();
        let report = check_full(&repo);
        assert!(!codes(&report).contains(&Code::CcConnType));
    }

    #[test]
    fn decomposition_cycles_are_reported() {
        let repo = repo_of(&[
            "component A { component B b; }",
            "component B { component A a; }",
            "component Leaf { }",
        ]);
        let report = check_full(&repo);
        let cyclic: Vec<_> = report.diagnostics.iter().filter(|d| d.code == Code::CcDecompCycle).collect();
        assert_eq!(cyclic.len(), 2);
    }

    #[test]
    fn unconnected_ports_warn_only_in_structured_components() {
        let repo = repo_of(&[
            "component Leaf { port in T x, out T y; }",
            "component C { port in T unused; component Leaf leaf; connect unused -> leaf.x; }",
        ]);
        let report = check_full(&repo);
        assert!(!report.has_errors());
        // Leaf is atomic: no warnings. C wires leaf.x but leaves leaf.y dangling.
        let warnings: Vec<String> = report.warnings().map(|d| d.message.clone()).collect();
        assert_eq!(warnings.len(), 1, "got: {warnings:?}");
        assert!(warnings[0].contains("leaf.y"));
    }

    #[test]
    fn full_check_subsumes_local_checks() {
        let repo = repo_of(&[
            "component Leaf { port in T x, out T y; }",
            "component C { autoconnect port; port in T x, out T y; component Leaf leaf; }",
        ]);
        let report = check_full(&repo);
        assert!(!report.has_errors());
        for c in repo.components.values() {
            assert!(!check_local(c, &all_elements(c)).has_errors());
        }
    }
}
