//! Canonical text form for component definitions.
//!
//! Printing is deterministic and canonicalising: the autoconnect line is
//! omitted when the mode is `off`, ports are grouped in-before-out preserving
//! declaration order within each direction, subcomponents keep declaration
//! order, and explicit connectors are sorted by (target, source). Implicit
//! names materialised during parsing are printed. A print/parse round trip
//! reaches a fixpoint after one iteration.

use std::fmt::Write;

use crate::model::{AutoconnectMode, ComponentDefinition, PortRef};

/// Renders `c` in canonical form, ending with a newline.
pub fn pretty_print(c: &ComponentDefinition) -> String {
    let mut out = String::new();
    let params = if c.params.is_empty() {
        String::new()
    } else {
        let names: Vec<&str> = c.params.iter().map(|p| p.name.as_str()).collect();
        format!("({})", names.join(", "))
    };

    let empty = c.autoconnect == AutoconnectMode::Off
        && c.ports.is_empty()
        && c.subcomponents.is_empty()
        && c.connectors.is_empty();
    if empty {
        let _ = writeln!(out, "component {}{} {{ }}", c.name, params);
        return out;
    }

    let _ = writeln!(out, "component {}{} {{", c.name, params);
    if c.autoconnect != AutoconnectMode::Off {
        let _ = writeln!(out, "  autoconnect {};", c.autoconnect);
    }

    let ports: Vec<_> = c.in_ports().chain(c.out_ports()).collect();
    for (i, p) in ports.iter().enumerate() {
        let lead = if i == 0 { "  port " } else { "    " };
        let tail = if i + 1 == ports.len() { ";" } else { "," };
        let _ = writeln!(out, "{lead}{} {} {}{tail}", p.direction, p.data_type, p.name);
    }

    for s in &c.subcomponents {
        let args = if s.args.is_empty() {
            String::new()
        } else {
            let rendered: Vec<String> = s.args.iter().map(ToString::to_string).collect();
            format!("({})", rendered.join(", "))
        };
        let _ = writeln!(out, "  component {}{} {};", s.component_type, args, s.name);
    }

    let mut wires: Vec<(&PortRef, &PortRef)> = c.connectors.iter().map(|k| (&k.target, &k.source)).collect();
    wires.sort();
    for (target, source) in wires {
        let _ = writeln!(out, "  connect {source} -> {target};");
    }

    let _ = writeln!(out, "}}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_component_text;

    #[test]
    fn empty_components_print_on_one_line() {
        let c = parse_component_text("component E { }", "e.arc").unwrap();
        assert_eq!(pretty_print(&c), "component E { }\n");
    }

    #[test]
    fn printing_materialises_implicit_names_and_groups_ports() {
        let c = parse_component_text(
            "component C(n) { autoconnect port; port out Integer engine1, in SteeringMode; component AccEval; }",
            "c.arc",
        )
        .unwrap();
        let text = pretty_print(&c);
        assert_eq!(
            text,
            "component C(n) {\n  autoconnect port;\n  port in SteeringMode steeringMode,\n    out Integer engine1;\n  component AccEval accEval;\n}\n"
        );
    }

    #[test]
    fn print_parse_print_is_a_fixpoint() {
        let src = "component C { port in T b, in T a; component S s; connect b -> s.x; connect a -> s.y; }";
        let c1 = parse_component_text(src, "c.arc").unwrap();
        let t1 = pretty_print(&c1);
        let c2 = parse_component_text(&t1, "c.arc").unwrap();
        let t2 = pretty_print(&c2);
        assert_eq!(t1, t2);
        assert!(c1.structurally_equal(&c2));
    }
}
