//! Application-order constraints and order computation.
//!
//! Each delta may carry a boolean constraint over delta names; a name
//! evaluates to true iff that delta has already been applied. A valid
//! application order applies every configured delta exactly once such that
//! each delta's constraint holds at the moment it is applied. Orders are
//! found by exhaustive backtracking over the tree of applicable extensions,
//! which is complete at configuration scale.

use std::collections::BTreeSet;

use indexmap::IndexMap;

use crate::delta::DeltaModel;
use crate::diag::{Code, Diagnostic, Loc};

/// Boolean expression over delta names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderConstraint {
    Delta(String),
    Not(Box<OrderConstraint>),
    And(Box<OrderConstraint>, Box<OrderConstraint>),
    Or(Box<OrderConstraint>, Box<OrderConstraint>),
}

impl OrderConstraint {
    /// Evaluates against the set of already-applied delta names. Names not
    /// in the set — including names outside the configuration — are false.
    pub fn eval(&self, applied: &BTreeSet<&str>) -> bool {
        match self {
            OrderConstraint::Delta(name) => applied.contains(name.as_str()),
            OrderConstraint::Not(inner) => !inner.eval(applied),
            OrderConstraint::And(a, b) => a.eval(applied) && b.eval(applied),
            OrderConstraint::Or(a, b) => a.eval(applied) || b.eval(applied),
        }
    }

    /// Collects every delta name referenced by the constraint.
    pub fn delta_names(&self, out: &mut BTreeSet<String>) {
        match self {
            OrderConstraint::Delta(name) => {
                out.insert(name.clone());
            }
            OrderConstraint::Not(inner) => inner.delta_names(out),
            OrderConstraint::And(a, b) | OrderConstraint::Or(a, b) => {
                a.delta_names(out);
                b.delta_names(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            OrderConstraint::Or(..) => 0,
            OrderConstraint::And(..) => 1,
            OrderConstraint::Not(..) => 2,
            OrderConstraint::Delta(..) => 3,
        }
    }

    fn fmt_prec(&self, f: &mut std::fmt::Formatter<'_>, min: u8) -> std::fmt::Result {
        let prec = self.precedence();
        if prec < min {
            write!(f, "(")?;
        }
        match self {
            OrderConstraint::Delta(name) => write!(f, "{name}")?,
            OrderConstraint::Not(inner) => {
                write!(f, "!")?;
                inner.fmt_prec(f, 3)?;
            }
            OrderConstraint::And(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " && ")?;
                b.fmt_prec(f, 2)?;
            }
            OrderConstraint::Or(a, b) => {
                a.fmt_prec(f, 0)?;
                write!(f, " || ")?;
                b.fmt_prec(f, 1)?;
            }
        }
        if prec < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl std::fmt::Display for OrderConstraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// A named selection of deltas, in the order they were listed.
#[derive(Debug, Clone)]
pub struct ProductConfiguration {
    pub name: String,
    pub deltas: Vec<String>,
    pub loc: Loc,
}

/// Tie-breaking rule for exploring applicable deltas in the search tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderStrategy {
    /// Explore deltas in the order the configuration lists them.
    #[default]
    ConfigurationOrder,
    /// Explore deltas in lexicographic name order.
    Lexicographic,
}

/// A complete, constraint-valid linear application order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ApplicationOrder(pub Vec<String>);

impl std::fmt::Display for ApplicationOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0.join(" -> "))
    }
}

/// Configurations larger than this are rejected by [`enumerate_orders`].
pub const DEFAULT_ENUMERATION_BOUND: usize = 10;

fn constraint_of<'a>(deltas: &'a IndexMap<String, DeltaModel>, name: &str) -> Option<&'a OrderConstraint> {
    deltas.get(name).and_then(|d| d.constraint.as_ref())
}

fn candidate_order(config: &ProductConfiguration, strategy: OrderStrategy) -> Vec<String> {
    let mut names = config.deltas.clone();
    if strategy == OrderStrategy::Lexicographic {
        names.sort();
    }
    names
}

/// Depth-first search over application prefixes. `on_complete` sees every
/// complete leaf in exploration order and returns whether to keep searching;
/// dead-end prefixes (no applicable extension) are reported to `on_dead_end`.
fn search(
    candidates: &[String],
    deltas: &IndexMap<String, DeltaModel>,
    prefix: &mut Vec<String>,
    on_complete: &mut dyn FnMut(&[String]) -> bool,
    on_dead_end: &mut dyn FnMut(&[String]),
) -> bool {
    if prefix.len() == candidates.len() {
        return !on_complete(prefix);
    }
    let applicable: Vec<String> = {
        let applied: BTreeSet<&str> = prefix.iter().map(String::as_str).collect();
        candidates
            .iter()
            .filter(|name| !prefix.contains(name))
            .filter(|name| constraint_of(deltas, name).is_none_or(|c| c.eval(&applied)))
            .cloned()
            .collect()
    };
    if applicable.is_empty() {
        on_dead_end(prefix);
        return false;
    }
    for name in applicable {
        prefix.push(name);
        let stop = search(candidates, deltas, prefix, on_complete, on_dead_end);
        prefix.pop();
        if stop {
            return true;
        }
    }
    false
}

/// Returns the first complete constraint-valid order found by depth-first
/// search, exploring applicable deltas under the given strategy. When no
/// complete order exists the error lists the maximal applicable prefixes.
pub fn compute_order(
    config: &ProductConfiguration,
    deltas: &IndexMap<String, DeltaModel>,
    strategy: OrderStrategy,
) -> Result<ApplicationOrder, Diagnostic> {
    let candidates = candidate_order(config, strategy);
    let mut found: Option<Vec<String>> = None;
    let mut dead_ends: Vec<Vec<String>> = Vec::new();
    search(
        &candidates,
        deltas,
        &mut Vec::new(),
        &mut |complete| {
            found = Some(complete.to_vec());
            false
        },
        &mut |prefix| dead_ends.push(prefix.to_vec()),
    );
    match found {
        Some(order) => Ok(ApplicationOrder(order)),
        None => {
            let longest = dead_ends.iter().map(Vec::len).max().unwrap_or(0);
            let mut prefixes: Vec<String> = dead_ends
                .iter()
                .filter(|p| p.len() == longest && longest > 0)
                .map(|p| format!("`{}`", p.join(" -> ")))
                .collect();
            prefixes.dedup();
            let detail = if prefixes.is_empty() {
                "no delta is applicable first".to_string()
            } else {
                format!("maximal applicable prefixes: {}", prefixes.join(", "))
            };
            Err(Diagnostic::error(
                Code::OrdUnsat,
                config.loc.clone(),
                format!("no valid application order for configuration `{}`; {detail}", config.name),
            ))
        }
    }
}

/// Enumerates every complete constraint-valid order, in exploration order of
/// the given strategy. Exhaustive by design and therefore bounded: a
/// configuration with more than `bound` deltas is rejected.
pub fn enumerate_orders(
    config: &ProductConfiguration,
    deltas: &IndexMap<String, DeltaModel>,
    strategy: OrderStrategy,
    bound: usize,
) -> Result<Vec<ApplicationOrder>, Diagnostic> {
    if config.deltas.len() > bound {
        return Err(Diagnostic::error(
            Code::OrdTooLarge,
            config.loc.clone(),
            format!(
                "configuration `{}` selects {} deltas; exhaustive enumeration is bounded at {bound}",
                config.name,
                config.deltas.len()
            ),
        ));
    }
    let candidates = candidate_order(config, strategy);
    let mut orders = Vec::new();
    search(
        &candidates,
        deltas,
        &mut Vec::new(),
        &mut |complete| {
            orders.push(ApplicationOrder(complete.to_vec()));
            true
        },
        &mut |_| {},
    );
    Ok(orders)
}

/// Warns about constraint atoms that name deltas outside the configuration:
/// such atoms are never satisfied, which is usually a typo in the constraint
/// or an incomplete configuration.
pub fn constraint_warnings(
    config: &ProductConfiguration,
    deltas: &IndexMap<String, DeltaModel>,
) -> Vec<Diagnostic> {
    let configured: BTreeSet<&str> = config.deltas.iter().map(String::as_str).collect();
    let mut warnings = Vec::new();
    for name in &config.deltas {
        let Some(delta) = deltas.get(name) else { continue };
        let Some(constraint) = &delta.constraint else { continue };
        let mut referenced = BTreeSet::new();
        constraint.delta_names(&mut referenced);
        for missing in referenced.iter().filter(|r| !configured.contains(r.as_str())) {
            warnings.push(Diagnostic::warning(
                Code::OrdUnknownName,
                delta.loc.clone(),
                format!(
                    "constraint `{constraint}` of delta `{name}` references `{missing}`, which is not part of configuration `{}`",
                    config.name
                ),
            ));
        }
    }
    warnings
}
