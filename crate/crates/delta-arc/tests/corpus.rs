//! Structural assertions over the bundled corpus: the models must parse to
//! exactly the shapes the rest of the suite (and the README examples) rely on.

use std::path::{Path, PathBuf};

use delta_arc::check::check_full;
use delta_arc::generate::{load_config, load_core, load_deltas};
use delta_arc::model::{resolve_autoconnect, AutoconnectMode, ConfigArg, Direction};

fn corpus(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)
}

#[test]
fn the_core_models_load_and_pass_the_full_check() {
    let core = load_core(&[corpus("multicopter/core")], Some(&corpus("multicopter/multicopter.types"))).unwrap();
    assert_eq!(core.components.len(), 9);
    let report = check_full(&core);
    assert!(!report.has_errors(), "{report}");
}

#[test]
fn the_flight_controller_matches_its_source() {
    let core = load_core(&[corpus("multicopter/core")], Some(&corpus("multicopter/multicopter.types"))).unwrap();
    let fc = core.component("FlightController").unwrap();

    assert_eq!(fc.autoconnect, AutoconnectMode::Port);
    assert!(fc.connectors.is_empty(), "core wiring is implicit");

    // Ports declared without a name take the lower-camel form of their type.
    let ins: Vec<&str> = fc.in_ports().map(|p| p.name.as_str()).collect();
    assert_eq!(ins, ["steeringCmd", "steeringMode", "gyroSensorStat", "accSensorStat"]);
    let outs: Vec<&str> = fc.out_ports().map(|p| p.name.as_str()).collect();
    assert_eq!(outs, ["engine1", "engine2", "engine3", "engine4"]);

    let subs: Vec<(&str, &str)> =
        fc.subcomponents.iter().map(|s| (s.component_type.as_str(), s.name.as_str())).collect();
    assert_eq!(
        subs,
        [
            ("SteeringCmdProcessor", "scp"),
            ("OutputProcessor", "op"),
            ("GyroEval", "gEval"),
            ("AccEval", "accEval"),
        ]
    );
    assert_eq!(fc.subcomponent("scp").unwrap().args, [ConfigArg::Int(4)]);
}

#[test]
fn the_steering_processor_passes_its_parameter_down() {
    let core = load_core(&[corpus("multicopter/core")], Some(&corpus("multicopter/multicopter.types"))).unwrap();
    let scp = core.component("SteeringCmdProcessor").unwrap();
    assert_eq!(scp.params.len(), 1);
    assert_eq!(scp.params[0].name, "engineCount");
    let qpc = scp.subcomponent("quadPowerCalc").unwrap();
    assert_eq!(qpc.component_type, "QuadPowerCalc");
    assert_eq!(qpc.args, [ConfigArg::ParamRef("engineCount".into())]);
}

#[test]
fn implicit_resolution_wires_the_controller_by_name() {
    let core = load_core(&[corpus("multicopter/core")], Some(&corpus("multicopter/multicopter.types"))).unwrap();
    let fc = core.component("FlightController").unwrap();
    let res = resolve_autoconnect(fc, &core);
    let wires: Vec<String> = res.connectors.iter().map(ToString::to_string).collect();
    assert!(wires.contains(&"steeringCmd -> scp.steeringCmd".to_string()), "{wires:?}");
    assert!(wires.contains(&"scp.powerOutput -> op.powerOutput".to_string()), "{wires:?}");
    assert!(res.diagnostics.is_empty(), "name matching is unambiguous in the core");
}

#[test]
fn the_delta_models_carry_their_application_conditions() {
    let deltas = load_deltas(&corpus("multicopter/deltas")).unwrap();
    let constraint = |name: &str| deltas[name].constraint.as_ref().map(ToString::to_string);

    assert_eq!(deltas.len(), 4);
    assert_eq!(constraint("PressureSensor"), None);
    assert_eq!(constraint("HexoCopter"), None);
    assert_eq!(constraint("HeightHold"), Some("PressureSensor && !HexoCopter".into()));
    assert_eq!(constraint("RemoveHHFlightMode"), Some("!HexoCopter".into()));
}

#[test]
fn the_ordering_corpus_constraints_render_with_minimal_parentheses() {
    let deltas = load_deltas(&corpus("ordering/deltas")).unwrap();
    let constraint = |name: &str| deltas[name].constraint.as_ref().map(ToString::to_string);

    assert_eq!(constraint("A"), None);
    assert_eq!(constraint("B"), Some("!D".into()));
    assert_eq!(constraint("C"), Some("(A || B) && !(A && B)".into()));
    assert_eq!(constraint("D"), Some("(B || C) && !A".into()));
}

#[test]
fn the_product_configuration_lists_deltas_in_declaration_order() {
    let config = load_config(&corpus("multicopter/DeltaWolf.deltacfg")).unwrap();
    assert_eq!(config.name, "DeltaWolf");
    assert_eq!(config.deltas, ["PressureSensor", "HeightHold", "HexoCopter", "RemoveHHFlightMode"]);
}

#[test]
fn the_type_hierarchy_is_flat() {
    let core = load_core(&[corpus("multicopter/core")], Some(&corpus("multicopter/multicopter.types"))).unwrap();
    for t in ["SteeringCmd", "PressureSensorStat", "FloatArray", "PowerCmds", "Integer", "Boolean"] {
        assert!(core.types.is_declared(t), "{t} must be declared");
        assert!(core.types.conforms(t, t));
    }
    assert!(!core.types.conforms("Integer", "Boolean"));
}

#[test]
fn every_corpus_port_direction_is_explicit() {
    let core = load_core(&[corpus("multicopter/core")], Some(&corpus("multicopter/multicopter.types"))).unwrap();
    let mut ins = 0;
    let mut outs = 0;
    for c in core.components.values() {
        for p in &c.ports {
            match p.direction {
                Direction::In => ins += 1,
                Direction::Out => outs += 1,
            }
        }
    }
    assert!(ins > 0 && outs > 0);
}
