//! Product derivation: the end-to-end generation workflow.
//!
//! Derivation runs in four steps: load and fully check the core model,
//! compute a constraint-valid application order for the configured deltas,
//! apply the deltas one by one (each followed by local checks), then fully
//! check the resulting product and pretty-print it to one `.arc` file per
//! component. Any error at any step aborts with no partial output.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;

use crate::check::check_full;
use crate::delta::{apply_delta, DeltaError, DeltaModel};
use crate::diag::{CheckReport, Code, Diagnostic};
use crate::model::{ModelRepository, TypeHierarchy};
use crate::order::{
    compute_order, constraint_warnings, ApplicationOrder, OrderStrategy, ProductConfiguration,
};
use crate::parser::{parse_component_text, parse_config_text, parse_delta_text, parse_types_text};
use crate::printer::pretty_print;

/// Everything a derivation needs: where to read the core, deltas, and
/// configuration, and optionally a type hierarchy and an output directory.
#[derive(Debug, Clone)]
pub struct DerivationRequest {
    pub core_dirs: Vec<PathBuf>,
    pub delta_dir: PathBuf,
    pub config_path: PathBuf,
    pub types_path: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub strategy: OrderStrategy,
}

/// A successful derivation: the final repository, the order that produced
/// it, one report per step (core check, each delta, final full check), and
/// the emitted files (empty without an output directory).
#[derive(Debug)]
pub struct DerivationResult {
    pub name: String,
    pub product: ModelRepository,
    pub order: ApplicationOrder,
    pub reports: Vec<CheckReport>,
    pub emitted: Vec<PathBuf>,
}

impl DerivationResult {
    /// All warnings accumulated across the derivation steps.
    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.reports.iter().flat_map(|r| r.warnings())
    }
}

/// Why a derivation (or one of the loaders) failed.
#[derive(Debug, thiserror::Error)]
pub enum GenerationError {
    /// A source file failed to parse, or the repository could not be built
    /// from it (e.g. two files define the same component).
    #[error("{0}")]
    Parse(Diagnostic),
    /// The core model failed the full wellformedness check.
    #[error("core model is not well-formed:\n{0}")]
    InvalidCore(CheckReport),
    /// The configuration selects a delta no loaded file defines.
    #[error("{0}")]
    DeltaMissing(Diagnostic),
    /// No constraint-valid application order exists.
    #[error("{0}")]
    Order(Diagnostic),
    /// A delta was not applicable or broke a local context condition.
    #[error("{0}")]
    Delta(#[from] DeltaError),
    /// The derived product failed the full wellformedness check.
    #[error("derived product `{name}` is not well-formed:\n{report}")]
    InvalidProduct { name: String, report: CheckReport },
    /// Reading an input or writing an output failed.
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> GenerationError {
    let path = path.into();
    move |source| GenerationError::Io { path, source }
}

fn read(path: &Path) -> Result<String, GenerationError> {
    fs::read_to_string(path).map_err(io_err(path))
}

/// The files directly inside `dir` with the given extension, sorted by path
/// for deterministic load order.
fn files_with_extension(dir: &Path, ext: &str) -> Result<Vec<PathBuf>, GenerationError> {
    let entries = fs::read_dir(dir).map_err(io_err(dir))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(io_err(dir))?;
        let path = entry.path();
        if path.is_file() && path.extension().is_some_and(|e| e == ext) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Parses a `.types` hierarchy file.
pub fn load_types(path: &Path) -> Result<TypeHierarchy, GenerationError> {
    parse_types_text(&read(path)?, &path.display().to_string()).map_err(GenerationError::Parse)
}

/// Parses every `.arc` file in the given directories (sorted within each
/// directory) into one repository, seeded with the optional type hierarchy.
pub fn load_core(dirs: &[PathBuf], types_path: Option<&Path>) -> Result<ModelRepository, GenerationError> {
    let mut repo = ModelRepository::new();
    if let Some(path) = types_path {
        repo.types = load_types(path)?;
    }
    for dir in dirs {
        for path in files_with_extension(dir, "arc")? {
            let c = parse_component_text(&read(&path)?, &path.display().to_string())
                .map_err(GenerationError::Parse)?;
            repo.insert(c).map_err(GenerationError::Parse)?;
        }
    }
    Ok(repo)
}

/// Parses every `.delta` file in the directory, indexed by declared delta
/// name (which need not match the file name). Duplicate names are rejected.
pub fn load_deltas(dir: &Path) -> Result<IndexMap<String, DeltaModel>, GenerationError> {
    let mut deltas = IndexMap::new();
    for path in files_with_extension(dir, "delta")? {
        let d = parse_delta_text(&read(&path)?, &path.display().to_string())
            .map_err(GenerationError::Parse)?;
        if let Some(existing) = deltas.get(&d.name) {
            let existing: &DeltaModel = existing;
            return Err(GenerationError::Parse(Diagnostic::error(
                Code::ParseSyntax,
                d.loc.clone(),
                format!("delta `{}` is already defined at {}", d.name, existing.loc),
            )));
        }
        deltas.insert(d.name.clone(), d);
    }
    Ok(deltas)
}

/// Parses a `.deltacfg` product configuration file.
pub fn load_config(path: &Path) -> Result<ProductConfiguration, GenerationError> {
    parse_config_text(&read(path)?, &path.display().to_string()).map_err(GenerationError::Parse)
}

/// Structural equality of two repositories, insensitive to declaration order
/// of ports, subcomponents, and connectors.
pub fn structural_equal(a: &ModelRepository, b: &ModelRepository) -> bool {
    a.structurally_equal(b)
}

/// Runs the four-step derivation workflow for one product.
pub fn derive_product(req: &DerivationRequest) -> Result<DerivationResult, GenerationError> {
    // Step 1: load the core and check it fully; the core must be a valid
    // product on its own.
    let core = load_core(&req.core_dirs, req.types_path.as_deref())?;
    let core_report = check_full(&core);
    if core_report.has_errors() {
        return Err(GenerationError::InvalidCore(core_report));
    }
    let mut reports = vec![core_report];

    // Step 2: load configuration and deltas, then compute the order.
    let config = load_config(&req.config_path)?;
    let deltas = load_deltas(&req.delta_dir)?;
    for name in &config.deltas {
        if !deltas.contains_key(name) {
            return Err(GenerationError::DeltaMissing(Diagnostic::error(
                Code::GenDeltaMissing,
                config.loc.clone(),
                format!(
                    "configuration `{}` selects delta `{name}`, but no delta model with that name was loaded",
                    config.name
                ),
            )));
        }
    }
    let mut order_report = CheckReport::new();
    order_report.extend(constraint_warnings(&config, &deltas));
    let order = compute_order(&config, &deltas, req.strategy).map_err(GenerationError::Order)?;
    reports.push(order_report);

    // Step 3: apply the deltas in the computed order.
    let mut product = core;
    for name in &order.0 {
        let (next, report) = apply_delta(&product, &deltas[name])?;
        product = next;
        reports.push(report);
    }

    // Step 4: full check, then pretty-print one file per component.
    let product_report = check_full(&product);
    if product_report.has_errors() {
        return Err(GenerationError::InvalidProduct { name: config.name, report: product_report });
    }
    reports.push(product_report);

    let mut emitted = Vec::new();
    if let Some(out_dir) = &req.out_dir {
        fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
        let mut names: Vec<&String> = product.components.keys().collect();
        names.sort();
        for name in names {
            let path = out_dir.join(format!("{name}.arc"));
            fs::write(&path, pretty_print(&product.components[name.as_str()]))
                .map_err(io_err(&path))?;
            emitted.push(path);
        }
    }

    Ok(DerivationResult { name: config.name, product, order, reports, emitted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_corpus(root: &Path, files: &[(&str, &str)]) {
        for (rel, text) in files {
            let path = root.join(rel);
            fs::create_dir_all(path.parent().unwrap()).unwrap();
            fs::write(path, text).unwrap();
        }
    }

    fn request(root: &Path) -> DerivationRequest {
        DerivationRequest {
            core_dirs: vec![root.join("core")],
            delta_dir: root.join("deltas"),
            config_path: root.join("p.deltacfg"),
            types_path: None,
            out_dir: Some(root.join("out")),
            strategy: OrderStrategy::ConfigurationOrder,
        }
    }

    fn mini_corpus(root: &Path) {
        write_corpus(
            root,
            &[
                ("core/Source.arc", "component Source {\n  port out T value;\n}\n"),
                ("core/Sink.arc", "component Sink {\n  port in T value;\n}\n"),
                (
                    "core/Top.arc",
                    "component Top {\n  autoconnect port;\n  component Source src;\n  component Sink snk;\n}\n",
                ),
                (
                    "deltas/AddTap.delta",
                    "delta AddTap {\n  modify component Top {\n    add port out T tapped;\n  }\n}\n",
                ),
                ("p.deltacfg", "deltaconfig P { AddTap }\n"),
            ],
        );
    }

    #[test]
    fn derivation_emits_one_file_per_component() {
        let dir = tempfile::tempdir().unwrap();
        mini_corpus(dir.path());
        let result = derive_product(&request(dir.path())).unwrap();
        assert_eq!(result.order.to_string(), "AddTap");
        assert_eq!(result.emitted.len(), 3);
        let emitted_top = fs::read_to_string(dir.path().join("out/Top.arc")).unwrap();
        let reparsed = crate::parser::parse_component_text(&emitted_top, "Top.arc").unwrap();
        assert!(result.product.components["Top"].structurally_equal(&reparsed));
    }

    #[test]
    fn an_empty_configuration_reproduces_the_core() {
        let dir = tempfile::tempdir().unwrap();
        mini_corpus(dir.path());
        fs::write(dir.path().join("p.deltacfg"), "deltaconfig P { }\n").unwrap();
        let result = derive_product(&request(dir.path())).unwrap();
        let core = load_core(&[dir.path().join("core")], None).unwrap();
        assert!(structural_equal(&result.product, &core));
    }

    #[test]
    fn a_configured_but_unknown_delta_aborts_derivation() {
        let dir = tempfile::tempdir().unwrap();
        mini_corpus(dir.path());
        fs::write(dir.path().join("p.deltacfg"), "deltaconfig P { AddTap, Ghost }\n").unwrap();
        match derive_product(&request(dir.path())).unwrap_err() {
            GenerationError::DeltaMissing(d) => {
                assert_eq!(d.code, Code::GenDeltaMissing);
                assert!(d.message.contains("Ghost"));
            }
            other => panic!("expected DeltaMissing, got {other}"),
        }
    }

    #[test]
    fn an_invalid_core_aborts_before_any_delta_is_applied() {
        let dir = tempfile::tempdir().unwrap();
        mini_corpus(dir.path());
        fs::write(
            dir.path().join("core/Broken.arc"),
            "component Broken {\n  component Missing m;\n  connect m.out -> m.in;\n}\n",
        )
        .unwrap();
        assert!(matches!(
            derive_product(&request(dir.path())).unwrap_err(),
            GenerationError::InvalidCore(_)
        ));
        assert!(!dir.path().join("out").exists(), "no partial output");
    }

    #[test]
    fn failing_deltas_leave_no_output_behind() {
        let dir = tempfile::tempdir().unwrap();
        mini_corpus(dir.path());
        fs::write(
            dir.path().join("deltas/Bad.delta"),
            "delta Bad {\n  modify component Top {\n    remove port ghost;\n  }\n}\n",
        )
        .unwrap();
        fs::write(dir.path().join("p.deltacfg"), "deltaconfig P { AddTap, Bad }\n").unwrap();
        match derive_product(&request(dir.path())).unwrap_err() {
            GenerationError::Delta(e) => {
                assert_eq!(e.delta, "Bad");
                assert_eq!(e.diagnostic.code, Code::DmRmMissing);
            }
            other => panic!("expected Delta, got {other}"),
        }
        assert!(!dir.path().join("out").exists(), "no partial output");
    }

    #[test]
    fn delta_names_come_from_declarations_not_file_names() {
        let dir = tempfile::tempdir().unwrap();
        mini_corpus(dir.path());
        fs::rename(dir.path().join("deltas/AddTap.delta"), dir.path().join("deltas/zz.delta")).unwrap();
        let deltas = load_deltas(&dir.path().join("deltas")).unwrap();
        assert!(deltas.contains_key("AddTap"));
        assert!(derive_product(&request(dir.path())).is_ok());
    }

    #[test]
    fn two_files_declaring_the_same_delta_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        mini_corpus(dir.path());
        fs::copy(dir.path().join("deltas/AddTap.delta"), dir.path().join("deltas/copy.delta")).unwrap();
        assert!(matches!(
            load_deltas(&dir.path().join("deltas")).unwrap_err(),
            GenerationError::Parse(_)
        ));
    }
}
