//! Delta models and their application.
//!
//! A delta is an ordered list of modification operations, each scoped either
//! to a single component (`modify component C { ... }`) or to the whole
//! repository (`expand autoconnect;`, `introduce autoconnect <mode>;`,
//! `remove unreachable;`). Every operation checks its applicability before
//! changing anything and application is atomic: on error the caller's
//! repository is untouched. After a delta has been applied, the local-tier
//! context conditions are checked on every component the delta touched;
//! whole-model conditions are deliberately deferred, intermediate products
//! may violate them.

use std::collections::{BTreeMap, BTreeSet};

use crate::check::{check_local, all_elements, ElementKey, TouchedSet};
use crate::diag::{CheckReport, Code, Diagnostic, Loc};
use crate::model::{
    interface_compatible, resolve_autoconnect, AutoconnectMode, Compatibility, ComponentDefinition,
    ConfigArg, ConnectorDecl, InterfaceMapping, ModelRepository, ParameterDecl, PortDecl, PortRef,
    SubcomponentDecl,
};
use crate::order::OrderConstraint;

/// The kind of named element a rename refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Port,
    Subcomponent,
    Parameter,
}

impl std::fmt::Display for ElementKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ElementKind::Port => "port",
            ElementKind::Subcomponent => "subcomponent",
            ElementKind::Parameter => "parameter",
        })
    }
}

/// Where an operation applies: the whole repository or one component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpScope {
    Global,
    Component(String),
}

/// A single modification operation. Each operation carries the source
/// location it was written at, for error attribution.
#[derive(Debug, Clone)]
pub enum ModificationOp {
    AddPort(PortDecl),
    AddSubcomponent(SubcomponentDecl),
    AddParameter(ParameterDecl),
    /// Overwrites the component's autoconnect mode; never a duplicate error.
    SetAutoconnect { mode: AutoconnectMode, loc: Loc },
    RemovePort { name: String, loc: Loc },
    RemoveSubcomponent { name: String, loc: Loc },
    RemoveParameter { name: String, loc: Loc },
    Connect(ConnectorDecl),
    Disconnect { source: PortRef, target: PortRef, loc: Loc },
    Rename { kind: ElementKind, old: String, new: String, loc: Loc },
    Replace { old: String, with_type: String, new_name: Option<String>, loc: Loc },
    ModifyConfig { subcomponent: String, assignments: Vec<(String, ConfigArg)>, loc: Loc },
    ExpandAutoconnect { loc: Loc },
    IntroduceAutoconnect { mode: AutoconnectMode, loc: Loc },
    RemoveUnreachable { loc: Loc },
}

impl ModificationOp {
    pub fn loc(&self) -> &Loc {
        match self {
            ModificationOp::AddPort(p) => &p.loc,
            ModificationOp::AddSubcomponent(s) => &s.loc,
            ModificationOp::AddParameter(p) => &p.loc,
            ModificationOp::SetAutoconnect { loc, .. }
            | ModificationOp::RemovePort { loc, .. }
            | ModificationOp::RemoveSubcomponent { loc, .. }
            | ModificationOp::RemoveParameter { loc, .. }
            | ModificationOp::Disconnect { loc, .. }
            | ModificationOp::Rename { loc, .. }
            | ModificationOp::Replace { loc, .. }
            | ModificationOp::ModifyConfig { loc, .. }
            | ModificationOp::ExpandAutoconnect { loc }
            | ModificationOp::IntroduceAutoconnect { loc, .. }
            | ModificationOp::RemoveUnreachable { loc } => loc,
            ModificationOp::Connect(k) => &k.loc,
        }
    }
}

/// A named delta: an optional application-order constraint plus the ordered
/// operations of its body (blocks are flattened, order preserved).
#[derive(Debug, Clone)]
pub struct DeltaModel {
    pub name: String,
    pub constraint: Option<OrderConstraint>,
    pub body: Vec<(OpScope, ModificationOp)>,
    pub loc: Loc,
}

/// Failure while applying a delta: the offending delta plus the underlying
/// diagnostic, whose location points at the failing operation.
#[derive(Debug, Clone, thiserror::Error)]
#[error("delta `{delta}`: {diagnostic}")]
pub struct DeltaError {
    pub delta: String,
    pub diagnostic: Diagnostic,
}

fn err(code: Code, loc: &Loc, msg: String) -> Diagnostic {
    Diagnostic::error(code, loc.clone(), msg)
}

/// Applies one component-scoped operation, checking its applicability first.
/// On error the input repository is returned untouched (the result is a new
/// repository; the input is never modified).
pub fn apply_op(
    repo: &ModelRepository,
    component: &str,
    op: &ModificationOp,
) -> Result<ModelRepository, Diagnostic> {
    let Some(c) = repo.component(component) else {
        return Err(err(
            Code::DmNoComponent,
            op.loc(),
            format!("cannot modify undefined component `{component}`"),
        ));
    };

    match op {
        ModificationOp::AddPort(p) => {
            if c.port(&p.name).is_some() {
                return Err(err(
                    Code::DmAddDup,
                    &p.loc,
                    format!("component `{component}` already contains a port named `{}`", p.name),
                ));
            }
            let mut next = repo.clone();
            next.types.declare(&p.data_type);
            next.components[component].ports.push(p.clone());
            Ok(next)
        }
        ModificationOp::AddSubcomponent(s) => {
            if c.subcomponent(&s.name).is_some() {
                return Err(err(
                    Code::DmAddDup,
                    &s.loc,
                    format!("component `{component}` already contains a subcomponent named `{}`", s.name),
                ));
            }
            let mut next = repo.clone();
            next.components[component].subcomponents.push(s.clone());
            Ok(next)
        }
        ModificationOp::AddParameter(p) => {
            if c.parameter(&p.name).is_some() {
                return Err(err(
                    Code::DmAddDup,
                    &p.loc,
                    format!("component `{component}` already declares a parameter named `{}`", p.name),
                ));
            }
            let mut next = repo.clone();
            next.components[component].params.push(p.clone());
            Ok(next)
        }
        ModificationOp::SetAutoconnect { mode, .. } => {
            let mut next = repo.clone();
            next.components[component].autoconnect = *mode;
            Ok(next)
        }
        ModificationOp::RemovePort { name, loc } => {
            if c.port(name).is_none() {
                return Err(err(
                    Code::DmRmMissing,
                    loc,
                    format!("component `{component}` has no port `{name}` to remove"),
                ));
            }
            let re = PortRef::local(name.clone());
            if let Some(k) = c.connectors.iter().find(|k| k.source == re || k.target == re) {
                return Err(err(
                    Code::DmRmPortConnected,
                    loc,
                    format!("port `{name}` of component `{component}` is still used by connector `{k}`"),
                ));
            }
            let mut next = repo.clone();
            next.components[component].ports.retain(|p| p.name != *name);
            Ok(next)
        }
        ModificationOp::RemoveSubcomponent { name, loc } => {
            if c.subcomponent(name).is_none() {
                return Err(err(
                    Code::DmRmMissing,
                    loc,
                    format!("component `{component}` has no subcomponent `{name}` to remove"),
                ));
            }
            let owns = |re: &PortRef| re.owner.as_deref() == Some(name.as_str());
            if let Some(k) = c.connectors.iter().find(|k| owns(&k.source) || owns(&k.target)) {
                return Err(err(
                    Code::DmRmSubcConnected,
                    loc,
                    format!("subcomponent `{name}` of component `{component}` is still used by connector `{k}`"),
                ));
            }
            let mut next = repo.clone();
            next.components[component].subcomponents.retain(|s| s.name != *name);
            Ok(next)
        }
        ModificationOp::RemoveParameter { name, loc } => {
            if c.parameter(name).is_none() {
                return Err(err(
                    Code::DmRmMissing,
                    loc,
                    format!("component `{component}` declares no parameter `{name}` to remove"),
                ));
            }
            let mut next = repo.clone();
            next.components[component].params.retain(|p| p.name != *name);
            Ok(next)
        }
        ModificationOp::Connect(conn) => {
            validate_connect(repo, c, conn)?;
            let mut next = repo.clone();
            next.components[component]
                .connectors
                .push(ConnectorDecl::explicit(conn.source.clone(), conn.target.clone(), conn.loc.clone()));
            Ok(next)
        }
        ModificationOp::Disconnect { source, target, loc } => {
            let pos = c
                .connectors
                .iter()
                .position(|k| k.source == *source && k.target == *target);
            let Some(pos) = pos else {
                return Err(err(
                    Code::DmDiscMissing,
                    loc,
                    format!("component `{component}` has no connector `{source} -> {target}` to disconnect"),
                ));
            };
            let mut next = repo.clone();
            next.components[component].connectors.remove(pos);
            Ok(next)
        }
        ModificationOp::Rename { kind, old, new, loc } => apply_rename(repo, component, *kind, old, new, loc),
        ModificationOp::Replace { old, with_type, new_name, loc } => {
            apply_replace(repo, component, old, with_type, new_name.as_deref(), loc)
        }
        ModificationOp::ModifyConfig { subcomponent, assignments, loc } => {
            apply_modify_config(repo, component, subcomponent, assignments, loc)
        }
        ModificationOp::ExpandAutoconnect { loc } => {
            expand_autoconnect(repo, Some(component), loc).map(|(next, _)| next)
        }
        ModificationOp::IntroduceAutoconnect { mode, loc } => {
            introduce_autoconnect(repo, Some(component), *mode, loc)
        }
        ModificationOp::RemoveUnreachable { loc } => remove_unreachable(repo, Some(component), loc),
    }
}

/// Applicability of an explicit connector: both endpoints must resolve with
/// the right data-flow direction (subcomponent ports are only checked when
/// their type's definition is available), the connector must not already
/// exist, and the target must not already receive data.
fn validate_connect(
    repo: &ModelRepository,
    c: &ComponentDefinition,
    conn: &ConnectorDecl,
) -> Result<(), Diagnostic> {
    let loc = &conn.loc;
    for (re, enclosing_side, sub_side, role) in [
        (&conn.source, crate::model::Direction::In, crate::model::Direction::Out, "source"),
        (&conn.target, crate::model::Direction::Out, crate::model::Direction::In, "target"),
    ] {
        match &re.owner {
            None => match c.port(&re.port) {
                None => {
                    return Err(err(
                        Code::DmConnInvalid,
                        loc,
                        format!("connector {role} `{re}` does not resolve to a port of component `{}`", c.name),
                    ))
                }
                Some(p) if p.direction != enclosing_side => {
                    return Err(err(
                        Code::DmConnInvalid,
                        loc,
                        format!(
                            "connector {role} `{re}` must be an {enclosing_side}-port of component `{}`",
                            c.name
                        ),
                    ))
                }
                Some(_) => {}
            },
            Some(owner) => {
                let Some(sub) = c.subcomponent(owner) else {
                    return Err(err(
                        Code::DmConnInvalid,
                        loc,
                        format!(
                            "connector {role} `{re}`: subcomponent `{owner}` does not exist in component `{}`",
                            c.name
                        ),
                    ));
                };
                // Without a definition for the subcomponent's type the port
                // cannot be inspected here; the full check will resolve it.
                if let Some(def) = repo.component(&sub.component_type) {
                    match def.port(&re.port) {
                        None => {
                            return Err(err(
                                Code::DmConnInvalid,
                                loc,
                                format!("connector {role} `{re}`: `{}` has no port `{}`", def.name, re.port),
                            ))
                        }
                        Some(p) if p.direction != sub_side => {
                            return Err(err(
                                Code::DmConnInvalid,
                                loc,
                                format!("connector {role} `{re}` must be an {sub_side}-port of `{}`", def.name),
                            ))
                        }
                        Some(_) => {}
                    }
                }
            }
        }
    }
    if c.connectors.iter().any(|k| k.same_wiring(conn)) {
        return Err(err(
            Code::DmConnInvalid,
            loc,
            format!("connector `{conn}` already exists in component `{}`", c.name),
        ));
    }
    if let Some(k) = c.connectors.iter().find(|k| k.target == conn.target) {
        return Err(err(
            Code::DmConnInvalid,
            loc,
            format!(
                "target `{}` in component `{}` already receives data from `{}`",
                conn.target, c.name, k.source
            ),
        ));
    }
    Ok(())
}

fn apply_rename(
    repo: &ModelRepository,
    component: &str,
    kind: ElementKind,
    old: &str,
    new: &str,
    loc: &Loc,
) -> Result<ModelRepository, Diagnostic> {
    let c = repo.component(component).expect("checked by apply_op");
    let missing = |what: &str| {
        err(Code::DmRenameBad, loc, format!("component `{component}` has no {what} `{old}` to rename"))
    };
    let collision = |what: &str| {
        err(
            Code::DmRenameBad,
            loc,
            format!("component `{component}` already contains a {what} named `{new}`"),
        )
    };

    let mut next = repo.clone();
    match kind {
        ElementKind::Port => {
            if c.port(old).is_none() {
                return Err(missing("port"));
            }
            if c.port(new).is_some() {
                return Err(collision("port"));
            }
            {
                let cm = &mut next.components[component];
                for p in &mut cm.ports {
                    if p.name == old {
                        p.name = new.to_string();
                    }
                }
                for k in &mut cm.connectors {
                    rename_local_ref(&mut k.source, old, new);
                    rename_local_ref(&mut k.target, old, new);
                }
            }
            // The renamed port is visible wherever this component is
            // instantiated: rewrite qualified references in every component
            // that uses it as a subcomponent type.
            let names: Vec<String> = next.components.keys().cloned().collect();
            for name in names {
                let user = &next.components[&name];
                let owners: Vec<String> = user
                    .subcomponents
                    .iter()
                    .filter(|s| s.component_type == component)
                    .map(|s| s.name.clone())
                    .collect();
                if owners.is_empty() {
                    continue;
                }
                let user = &mut next.components[&name];
                for k in &mut user.connectors {
                    rename_owned_ref(&mut k.source, &owners, old, new);
                    rename_owned_ref(&mut k.target, &owners, old, new);
                }
            }
        }
        ElementKind::Subcomponent => {
            if c.subcomponent(old).is_none() {
                return Err(missing("subcomponent"));
            }
            if c.subcomponent(new).is_some() {
                return Err(collision("subcomponent"));
            }
            let cm = &mut next.components[component];
            for s in &mut cm.subcomponents {
                if s.name == old {
                    s.name = new.to_string();
                }
            }
            for k in &mut cm.connectors {
                for re in [&mut k.source, &mut k.target] {
                    if re.owner.as_deref() == Some(old) {
                        re.owner = Some(new.to_string());
                    }
                }
            }
        }
        ElementKind::Parameter => {
            if c.parameter(old).is_none() {
                return Err(missing("parameter"));
            }
            if c.parameter(new).is_some() {
                return Err(collision("parameter"));
            }
            let cm = &mut next.components[component];
            for p in &mut cm.params {
                if p.name == old {
                    p.name = new.to_string();
                }
            }
            for s in &mut cm.subcomponents {
                for arg in &mut s.args {
                    if matches!(arg, ConfigArg::ParamRef(r) if r == old) {
                        *arg = ConfigArg::ParamRef(new.to_string());
                    }
                }
            }
        }
    }
    Ok(next)
}

fn rename_local_ref(re: &mut PortRef, old: &str, new: &str) {
    if re.owner.is_none() && re.port == old {
        re.port = new.to_string();
    }
}

fn rename_owned_ref(re: &mut PortRef, owners: &[String], old: &str, new: &str) {
    if let Some(o) = &re.owner {
        if re.port == old && owners.iter().any(|n| n == o) {
            re.port = new.to_string();
        }
    }
}

fn apply_replace(
    repo: &ModelRepository,
    component: &str,
    old: &str,
    with_type: &str,
    new_name: Option<&str>,
    loc: &Loc,
) -> Result<ModelRepository, Diagnostic> {
    let c = repo.component(component).expect("checked by apply_op");
    let Some(sc) = c.subcomponent(old) else {
        return Err(err(
            Code::DmRmMissing,
            loc,
            format!("cannot replace `{old}`: component `{component}` has no such subcomponent"),
        ));
    };
    let Some(old_def) = repo.component(&sc.component_type) else {
        return Err(err(
            Code::DmNoComponent,
            loc,
            format!("definition of `{}` (type of subcomponent `{old}`) not found", sc.component_type),
        ));
    };
    let Some(new_def) = repo.component(with_type) else {
        return Err(err(
            Code::DmNoComponent,
            loc,
            format!("replacement type `{with_type}` is not defined"),
        ));
    };
    let mapping: InterfaceMapping = match interface_compatible(old_def, new_def, &repo.types) {
        Compatibility::Compatible(m) => m,
        Compatibility::Incompatible(msg) => {
            return Err(err(
                Code::DmReplaceIncompat,
                loc,
                format!("cannot replace `{old}` with `{with_type}`: {msg}"),
            ))
        }
        Compatibility::Ambiguous(msg) => {
            return Err(err(
                Code::DmReplaceIncompat,
                loc,
                format!("cannot replace `{old}` with `{with_type}`: mapping is ambiguous: {msg}"),
            ))
        }
    };
    let final_name = new_name.unwrap_or(old);
    if final_name != old && c.subcomponent(final_name).is_some() {
        return Err(err(
            Code::DmAddDup,
            loc,
            format!("component `{component}` already contains a subcomponent named `{final_name}`"),
        ));
    }

    let mut next = repo.clone();
    let cm = &mut next.components[component];
    for s in &mut cm.subcomponents {
        if s.name == old {
            *s = SubcomponentDecl {
                component_type: with_type.to_string(),
                name: final_name.to_string(),
                args: Vec::new(),
                loc: loc.clone(),
            };
        }
    }
    for k in &mut cm.connectors {
        if k.target.owner.as_deref() == Some(old) {
            let port = mapping.incoming.get(&k.target.port).cloned().unwrap_or_else(|| k.target.port.clone());
            k.target = PortRef::sub(final_name, port);
        }
        if k.source.owner.as_deref() == Some(old) {
            let port = mapping.outgoing.get(&k.source.port).cloned().unwrap_or_else(|| k.source.port.clone());
            k.source = PortRef::sub(final_name, port);
        }
    }
    Ok(next)
}

fn apply_modify_config(
    repo: &ModelRepository,
    component: &str,
    subcomponent: &str,
    assignments: &[(String, ConfigArg)],
    loc: &Loc,
) -> Result<ModelRepository, Diagnostic> {
    let c = repo.component(component).expect("checked by apply_op");
    let Some(sc) = c.subcomponent(subcomponent) else {
        return Err(err(
            Code::DmNoComponent,
            loc,
            format!("component `{component}` has no subcomponent `{subcomponent}` to configure"),
        ));
    };
    let Some(def) = repo.component(&sc.component_type) else {
        return Err(err(
            Code::DmNoComponent,
            loc,
            format!(
                "definition of `{}` (type of subcomponent `{subcomponent}`) not found",
                sc.component_type
            ),
        ));
    };

    let mut args = sc.args.clone();
    for (pname, value) in assignments {
        let Some(pos) = def.params.iter().position(|p| p.name == *pname) else {
            return Err(err(
                Code::DmConfigNoParam,
                loc,
                format!("`{}` declares no configuration parameter `{pname}`", def.name),
            ));
        };
        match pos.cmp(&args.len()) {
            std::cmp::Ordering::Less => args[pos] = value.clone(),
            std::cmp::Ordering::Equal => args.push(value.clone()),
            std::cmp::Ordering::Greater => {
                return Err(err(
                    Code::DmConfigNoParam,
                    loc,
                    format!(
                        "cannot assign parameter `{pname}` (position {}) of `{}`: instance `{subcomponent}` supplies only {} argument(s)",
                        pos + 1,
                        def.name,
                        args.len()
                    ),
                ))
            }
        }
    }

    let mut next = repo.clone();
    let cm = &mut next.components[component];
    for s in &mut cm.subcomponents {
        if s.name == subcomponent {
            s.args = args.clone();
        }
    }
    Ok(next)
}

fn scope_names(repo: &ModelRepository, scope: Option<&str>, loc: &Loc) -> Result<Vec<String>, Diagnostic> {
    match scope {
        None => Ok(repo.components.keys().cloned().collect()),
        Some(name) => {
            if repo.component(name).is_none() {
                return Err(err(
                    Code::DmNoComponent,
                    loc,
                    format!("cannot modify undefined component `{name}`"),
                ));
            }
            Ok(vec![name.to_string()])
        }
    }
}

/// Materialises the implicit connectors of the scoped components as explicit
/// ones and turns their autoconnect mode off. Semantics are unchanged and the
/// operation is idempotent. Ambiguity warnings from resolution are returned
/// alongside the repository.
pub fn expand_autoconnect(
    repo: &ModelRepository,
    scope: Option<&str>,
    loc: &Loc,
) -> Result<(ModelRepository, Vec<Diagnostic>), Diagnostic> {
    let names = scope_names(repo, scope, loc)?;
    let mut next = repo.clone();
    let mut warnings = Vec::new();
    for name in names {
        // Resolution only reads the component itself and the port interfaces
        // of instantiated definitions, so expanding against the input
        // repository is order-independent.
        let res = resolve_autoconnect(&repo.components[&name], repo);
        warnings.extend(res.diagnostics);
        let cm = &mut next.components[&name];
        for k in res.connectors {
            cm.connectors.push(ConnectorDecl::explicit(k.source, k.target, k.loc));
        }
        cm.autoconnect = AutoconnectMode::Off;
    }
    Ok((next, warnings))
}

/// Sets the autoconnect mode of the scoped components and removes every
/// explicit connector that resolution would recreate from the remaining
/// explicit set, iterating until a fixpoint: afterwards no stored connector
/// is redundant under the new mode.
pub fn introduce_autoconnect(
    repo: &ModelRepository,
    scope: Option<&str>,
    mode: AutoconnectMode,
    loc: &Loc,
) -> Result<ModelRepository, Diagnostic> {
    let names = scope_names(repo, scope, loc)?;
    let mut next = repo.clone();
    for name in names {
        let mut c = next.components[&name].clone();
        c.autoconnect = mode;
        loop {
            let mut order: Vec<usize> = (0..c.connectors.len()).collect();
            order.sort_by(|&a, &b| {
                let ka = (&c.connectors[a].target, &c.connectors[a].source);
                let kb = (&c.connectors[b].target, &c.connectors[b].source);
                ka.cmp(&kb)
            });
            let mut removed = false;
            for idx in order {
                let mut probe = c.clone();
                let k = probe.connectors.remove(idx);
                if resolve_autoconnect(&probe, repo).connectors.iter().any(|r| r.same_wiring(&k)) {
                    c = probe;
                    removed = true;
                    break;
                }
            }
            if !removed {
                break;
            }
        }
        next.components[&name] = c;
    }
    Ok(next)
}

/// Two-phase reachability cleanup over the union of explicit and implicit
/// connectors. Phase 1 repeatedly removes subcomponents without outgoing
/// connectors together with the explicit connectors touching them; phase 2
/// removes the component's own ports that no connector of the remaining
/// union uses. Components without internal structure are left untouched: an
/// atomic component's ports are wired by whoever instantiates it.
pub fn remove_unreachable(
    repo: &ModelRepository,
    scope: Option<&str>,
    loc: &Loc,
) -> Result<ModelRepository, Diagnostic> {
    let names = scope_names(repo, scope, loc)?;
    let mut next = repo.clone();
    for name in names {
        let mut c = next.components[&name].clone();
        if !c.has_internal_structure() {
            continue;
        }
        loop {
            let union = union_wiring(&c, repo);
            let dead: BTreeSet<String> = c
                .subcomponents
                .iter()
                .filter(|s| !union.iter().any(|(src, _)| src.owner.as_deref() == Some(s.name.as_str())))
                .map(|s| s.name.clone())
                .collect();
            if dead.is_empty() {
                break;
            }
            c.subcomponents.retain(|s| !dead.contains(&s.name));
            c.connectors.retain(|k| {
                let touches = |re: &PortRef| re.owner.as_ref().is_some_and(|o| dead.contains(o));
                !touches(&k.source) && !touches(&k.target)
            });
        }
        let union = union_wiring(&c, repo);
        let used: BTreeSet<String> = union
            .iter()
            .flat_map(|(s, t)| [s, t])
            .filter(|re| re.owner.is_none())
            .map(|re| re.port.clone())
            .collect();
        c.ports.retain(|p| used.contains(&p.name));
        next.components[&name] = c;
    }
    Ok(next)
}

/// The wiring a component actually has: explicit connectors plus the implicit
/// ones its autoconnect mode derives.
fn union_wiring(c: &ComponentDefinition, repo: &ModelRepository) -> Vec<(PortRef, PortRef)> {
    let mut union: Vec<(PortRef, PortRef)> = c
        .connectors
        .iter()
        .map(|k| (k.source.clone(), k.target.clone()))
        .collect();
    union.extend(
        resolve_autoconnect(c, repo)
            .connectors
            .into_iter()
            .map(|k| (k.source, k.target)),
    );
    union
}

/// Elements of `next` that are new or changed relative to `prev`.
fn diff_touched(prev: &ComponentDefinition, next: &ComponentDefinition) -> TouchedSet {
    let mut t = TouchedSet::new();
    for p in &next.ports {
        let same = prev.ports.iter().filter(|q| q.name == p.name).count()
            == next.ports.iter().filter(|q| q.name == p.name).count()
            && prev.ports.iter().any(|q| q.same_decl(p));
        if !same {
            t.insert(ElementKey::Port(p.name.clone()));
        }
    }
    for s in &next.subcomponents {
        let same = prev.subcomponents.iter().filter(|q| q.name == s.name).count()
            == next.subcomponents.iter().filter(|q| q.name == s.name).count()
            && prev.subcomponents.iter().any(|q| q.same_decl(s));
        if !same {
            t.insert(ElementKey::Subcomponent(s.name.clone()));
        }
    }
    for p in &next.params {
        if !prev.params.iter().any(|q| q.name == p.name) {
            t.insert(ElementKey::Parameter(p.name.clone()));
        }
    }
    for k in &next.connectors {
        let count = |c: &ComponentDefinition| c.connectors.iter().filter(|o| o.same_wiring(k)).count();
        if count(prev) != count(next) {
            t.insert(ElementKey::Connector(k.source.clone(), k.target.clone()));
        }
    }
    t
}

/// Applies all operations of `delta` in order, then runs the local-tier
/// checks on every touched component. The first applicability or local
/// context-condition error aborts the application; the input repository is
/// never modified. On success the new repository is returned together with a
/// report carrying any warnings.
pub fn apply_delta(
    repo: &ModelRepository,
    delta: &DeltaModel,
) -> Result<(ModelRepository, CheckReport), DeltaError> {
    let fail = |diagnostic: Diagnostic| DeltaError { delta: delta.name.clone(), diagnostic };

    let mut current = repo.clone();
    let mut warnings: Vec<Diagnostic> = Vec::new();
    let mut touched: BTreeMap<String, TouchedSet> = BTreeMap::new();

    for (scope, op) in &delta.body {
        let next = match scope {
            OpScope::Global => match op {
                ModificationOp::ExpandAutoconnect { loc } => {
                    let (next, w) = expand_autoconnect(&current, None, loc).map_err(&fail)?;
                    warnings.extend(w);
                    next
                }
                ModificationOp::IntroduceAutoconnect { mode, loc } => {
                    introduce_autoconnect(&current, None, *mode, loc).map_err(&fail)?
                }
                ModificationOp::RemoveUnreachable { loc } => {
                    remove_unreachable(&current, None, loc).map_err(&fail)?
                }
                other => {
                    return Err(fail(err(
                        Code::DmNoComponent,
                        other.loc(),
                        "this operation requires a `modify component` block".to_string(),
                    )))
                }
            },
            OpScope::Component(name) => apply_op(&current, name, op).map_err(&fail)?,
        };
        for (name, next_c) in &next.components {
            let diff = match current.components.get(name) {
                Some(prev_c) => diff_touched(prev_c, next_c),
                None => all_elements(next_c),
            };
            if !diff.is_empty() {
                touched.entry(name.clone()).or_default().extend(diff);
            }
        }
        current = next;
    }

    let mut report = CheckReport::new();
    report.extend(warnings);
    for (name, keys) in &touched {
        if let Some(c) = current.components.get(name) {
            report.extend(check_local(c, keys).diagnostics);
        }
    }
    report.sort();
    if let Some(first) = report.errors().next() {
        return Err(fail(first.clone()));
    }
    Ok((current, report))
}
