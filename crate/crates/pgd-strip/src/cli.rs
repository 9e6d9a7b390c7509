//! Configuration-driven experiment harness.
//!
//! A study is a named sweep over cases and slendernesses producing
//! [`ConvergenceRecord`] rows: the locking table, the single-mode and block
//! convergence sweeps, the comparison against the fine 2D reference, the
//! limit-ODE cross-check and the mode-shape dump. Configs are line-oriented
//! `key = value` text with `#` comments; every study also accepts overrides
//! from the command line (see the `pgd-strip` binary).

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::mesh::{ElementOrder, Integration};
use crate::metrics::{
    deflection_errors, energy_error, ConvergenceRecord, ReferenceKind, RunStatus,
};
use crate::model::{CaseId, LoadProfile, Material, StripGeometry};
use crate::oracles::{asymptotic::AsymptoticExpansion, fine2d, kl, limit_ode::LimitOde};
use crate::pgd::{fixed_point_block, solve_greedy, Discretization, PgdSolution, SolveSettings};

/// The experiment families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Study {
    /// Locking table: first mode on linear elements, full vs selective.
    Locking,
    /// Single-mode and block errors against the thin-plate closed form.
    SlendernessSweep,
    /// Block and greedy solutions (and the asymptotic expansion) against the
    /// fine 2D reference.
    CompareReference,
    /// Block mode shapes written to a plain-text dump.
    DumpModes,
    /// Single-mode deflection against the slenderness-limit ODE.
    LimitOde,
}

impl Study {
    pub const ALL: [Study; 5] = [
        Study::Locking,
        Study::SlendernessSweep,
        Study::CompareReference,
        Study::DumpModes,
        Study::LimitOde,
    ];
}

impl fmt::Display for Study {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Study::Locking => "locking",
            Study::SlendernessSweep => "slenderness-sweep",
            Study::CompareReference => "compare-reference",
            Study::DumpModes => "dump-modes",
            Study::LimitOde => "limit-ode",
        };
        f.write_str(s)
    }
}

impl FromStr for Study {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "locking" => Ok(Study::Locking),
            "slenderness-sweep" | "sweep" => Ok(Study::SlendernessSweep),
            "compare-reference" | "compare" => Ok(Study::CompareReference),
            "dump-modes" | "dump" => Ok(Study::DumpModes),
            "limit-ode" => Ok(Study::LimitOde),
            other => Err(format!(
                "unknown study `{other}` (expected locking, slenderness-sweep, \
                 compare-reference, dump-modes or limit-ode)"
            )),
        }
    }
}

/// A fully resolved experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub study: Study,
    pub cases: Vec<CaseId>,
    /// Strictly increasing slenderness grid.
    pub slenderness: Vec<f64>,
    pub young: f64,
    pub poisson: f64,
    pub length: f64,
    pub amplitude: f64,
    pub order: ElementOrder,
    pub n_elements: usize,
    pub thickness_degree: usize,
    pub boundary_layer: bool,
    pub integration: Integration,
    /// Greedy mode budget of the compare-reference study.
    pub modes: usize,
    pub eta: f64,
    pub max_iters: usize,
    pub out: Option<PathBuf>,
    pub parallel: bool,
}

impl ExperimentConfig {
    /// Study defaults: the sweep grids and discretizations each study is
    /// normally run with. Explicit config keys override these.
    pub fn for_study(study: Study) -> Self {
        let mut cfg = ExperimentConfig {
            study,
            cases: CaseId::ALL.to_vec(),
            slenderness: vec![10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0],
            young: 1.0e9,
            poisson: 0.3,
            length: 1.0,
            amplitude: 1.0,
            order: ElementOrder::Quadratic,
            n_elements: 64,
            thickness_degree: 4,
            boundary_layer: true,
            integration: Integration::Selective,
            modes: 5,
            eta: 1e-3,
            max_iters: 100,
            out: None,
            parallel: false,
        };
        match study {
            Study::Locking => {
                cfg.cases = vec![CaseId::SsSp];
                cfg.slenderness = vec![
                    4.0, 10.0, 40.0, 100.0, 400.0, 1000.0, 4000.0, 10000.0,
                ];
                cfg.order = ElementOrder::Linear;
                cfg.boundary_layer = false;
            }
            Study::CompareReference => {
                cfg.cases = vec![CaseId::CcUp];
                cfg.slenderness = vec![5.0, 10.0, 20.0, 50.0, 100.0, 200.0];
            }
            Study::DumpModes => {
                cfg.cases = vec![CaseId::CcUp];
                cfg.slenderness = vec![20.0];
            }
            Study::LimitOde => {
                cfg.slenderness = vec![100.0, 1000.0, 10000.0];
            }
            Study::SlendernessSweep => {}
        }
        cfg
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |msg: String| Err(ConfigError::Invalid(msg));
        if self.cases.is_empty() {
            return invalid("at least one case is required".into());
        }
        if self.slenderness.is_empty() {
            return invalid("the slenderness grid is empty".into());
        }
        if !self.slenderness.windows(2).all(|w| w[0] < w[1]) {
            return invalid(format!(
                "the slenderness grid must be strictly increasing, got {:?}",
                self.slenderness
            ));
        }
        if let Some(&s) = self.slenderness.iter().find(|&&s| !(s > 1.0)) {
            return invalid(format!("slenderness must be > 1, got {s}"));
        }
        if !(self.eta > 0.0) {
            return invalid(format!("eta must be > 0, got {}", self.eta));
        }
        if self.max_iters == 0 {
            return invalid("max-iters must be >= 1".into());
        }
        if self.n_elements == 0 {
            return invalid("elements must be >= 1".into());
        }
        if self.thickness_degree < 2 {
            return invalid(format!(
                "thickness-degree must be >= 2 (the deflection corrector is \
                 quadratic), got {}",
                self.thickness_degree
            ));
        }
        if self.modes == 0 {
            return invalid("modes must be >= 1".into());
        }
        if !(self.young > 0.0) || !(self.length > 0.0) {
            return invalid("young and length must be > 0".into());
        }
        Material::new(self.young, self.poisson)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }

    fn settings(&self) -> SolveSettings {
        SolveSettings {
            eta: self.eta,
            max_iters: self.max_iters,
            ..SolveSettings::default()
        }
    }

    fn material(&self) -> Material {
        Material::new(self.young, self.poisson).expect("validated")
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::for_study(Study::SlendernessSweep)
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    NotKeyValue { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: invalid value for `{key}`: {msg}")]
    BadValue {
        line: usize,
        key: String,
        msg: String,
    },
    #[error("{0}")]
    Invalid(String),
}

fn parse_list<T: FromStr>(raw: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| format!("`{s}`: {e}")))
        .collect()
}

fn parse_bool(raw: &str) -> Result<bool, String> {
    match raw.to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        other => Err(format!("`{other}` is not a boolean (true/false/on/off)")),
    }
}

/// Parse a configuration. Defaults depend on the `study` key (see
/// [`ExperimentConfig::for_study`]); an empty file is the default
/// slenderness sweep over all four cases.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    parse_config_impl(text, None)
}

/// Parse a configuration in the context of a requested study (the binary's
/// positional argument). The requested study supplies the defaults; a
/// `study` key in the text must agree with it.
pub fn parse_config_for_study(text: &str, study: Study) -> Result<ExperimentConfig, ConfigError> {
    parse_config_impl(text, Some(study))
}

fn parse_config_impl(
    text: &str,
    requested: Option<Study>,
) -> Result<ExperimentConfig, ConfigError> {
    let entries: Vec<(usize, String, String)> = text
        .lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                return None;
            }
            Some(match body.split_once('=') {
                Some((k, v)) => Ok((
                    line,
                    k.trim().to_ascii_lowercase().replace('-', "_"),
                    v.trim().to_string(),
                )),
                None => Err(ConfigError::NotKeyValue {
                    line,
                    text: body.to_string(),
                }),
            })
        })
        .collect::<Result<_, _>>()?;

    // The study key selects the defaults, so resolve it first.
    let mut study = requested.unwrap_or(Study::SlendernessSweep);
    for (line, key, value) in &entries {
        if key == "study" {
            let parsed: Study = value.parse().map_err(|msg| ConfigError::BadValue {
                line: *line,
                key: key.clone(),
                msg,
            })?;
            if let Some(req) = requested {
                if parsed != req {
                    return Err(ConfigError::Invalid(format!(
                        "the config is for study `{parsed}` but `{req}` was requested"
                    )));
                }
            }
            study = parsed;
        }
    }
    let mut cfg = ExperimentConfig::for_study(study);

    for (line, key, value) in entries {
        let bad = |msg: String| ConfigError::BadValue {
            line,
            key: key.clone(),
            msg,
        };
        match key.as_str() {
            "study" => {}
            "cases" | "case" => cfg.cases = parse_list(&value).map_err(bad)?,
            "slenderness" => cfg.slenderness = parse_list(&value).map_err(bad)?,
            "young" => cfg.young = value.parse().map_err(|e| bad(format!("{e}")))?,
            "poisson" => cfg.poisson = value.parse().map_err(|e| bad(format!("{e}")))?,
            "length" => cfg.length = value.parse().map_err(|e| bad(format!("{e}")))?,
            "amplitude" => cfg.amplitude = value.parse().map_err(|e| bad(format!("{e}")))?,
            "order" => {
                cfg.order = match value.to_ascii_lowercase().as_str() {
                    "linear" => ElementOrder::Linear,
                    "quadratic" => ElementOrder::Quadratic,
                    other => {
                        return Err(bad(format!(
                            "`{other}` is not an element order (linear|quadratic)"
                        )))
                    }
                }
            }
            "elements" => cfg.n_elements = value.parse().map_err(|e| bad(format!("{e}")))?,
            "thickness_degree" => {
                cfg.thickness_degree = value.parse().map_err(|e| bad(format!("{e}")))?
            }
            "boundary_layer" => cfg.boundary_layer = parse_bool(&value).map_err(bad)?,
            "integration" => {
                cfg.integration = match value.to_ascii_lowercase().as_str() {
                    "full" => Integration::Full,
                    "selective" => Integration::Selective,
                    other => {
                        return Err(bad(format!(
                            "`{other}` is not an integration rule (full|selective)"
                        )))
                    }
                }
            }
            "modes" => cfg.modes = value.parse().map_err(|e| bad(format!("{e}")))?,
            "eta" => {
                cfg.eta = value.parse().map_err(|e| bad(format!("{e}")))?;
                if !(cfg.eta > 0.0) {
                    return Err(bad(format!("eta must be > 0, got {}", cfg.eta)));
                }
            }
            "max_iters" => cfg.max_iters = value.parse().map_err(|e| bad(format!("{e}")))?,
            "out" => cfg.out = Some(PathBuf::from(value)),
            "parallel" => cfg.parallel = parse_bool(&value).map_err(bad)?,
            _ => return Err(ConfigError::UnknownKey { line, key }),
        }
    }

    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("refusing to write an empty record set")]
    NoRecords,
}

/// What one run produced: the record rows, and for the dump-modes study the
/// mode-shape text destined for the output file.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub records: Vec<ConvergenceRecord>,
    pub mode_dump: Option<String>,
}

/// What gets solved at one `(case, slenderness)` grid point.
#[derive(Debug, Clone, Copy)]
enum Row {
    Greedy { n_modes: usize },
    Block,
    /// The two-term asymptotic expansion as an approximant.
    AsymptoticRow,
}

/// One grid point: reference values are computed once and shared by its rows.
struct Unit {
    case: CaseId,
    slenderness: f64,
    integration: Integration,
    reference: ReferenceKind,
    rows: Vec<Row>,
}

fn units(cfg: &ExperimentConfig) -> Vec<Unit> {
    let mut out = Vec::new();
    for &case in &cfg.cases {
        for &s in &cfg.slenderness {
            match cfg.study {
                Study::Locking => {
                    for integration in [Integration::Full, Integration::Selective] {
                        out.push(Unit {
                            case,
                            slenderness: s,
                            integration,
                            reference: ReferenceKind::Kl,
                            rows: vec![Row::Greedy { n_modes: 1 }],
                        });
                    }
                }
                Study::SlendernessSweep => out.push(Unit {
                    case,
                    slenderness: s,
                    integration: cfg.integration,
                    reference: ReferenceKind::Kl,
                    rows: vec![Row::Greedy { n_modes: 1 }, Row::Block],
                }),
                Study::CompareReference => {
                    let mut rows = vec![Row::Block];
                    rows.extend((1..=cfg.modes).map(|k| Row::Greedy { n_modes: k }));
                    rows.push(Row::AsymptoticRow);
                    out.push(Unit {
                        case,
                        slenderness: s,
                        integration: cfg.integration,
                        reference: ReferenceKind::Fine2d,
                        rows,
                    });
                }
                Study::DumpModes => out.push(Unit {
                    case,
                    slenderness: s,
                    integration: cfg.integration,
                    reference: ReferenceKind::Kl,
                    rows: vec![Row::Block],
                }),
                Study::LimitOde => out.push(Unit {
                    case,
                    slenderness: s,
                    integration: cfg.integration,
                    reference: ReferenceKind::LimitOde,
                    rows: vec![Row::Greedy { n_modes: 1 }],
                }),
            }
        }
    }
    out
}

/// Number of Hermite elements for the limit-ODE reference.
const LIMIT_ODE_ELEMS: usize = 256;
/// Mesh-doubling settlement tolerance of the fine 2D reference.
const FINE2D_TOL: f64 = 1e-3;
const FINE2D_ROUNDS: usize = 2;

fn failed_record(unit: &Unit, n_modes: usize) -> ConvergenceRecord {
    ConvergenceRecord {
        case_id: unit.case,
        slenderness: unit.slenderness,
        n_modes,
        integration: unit.integration,
        defl_err_1: f64::NAN,
        defl_err_2: f64::NAN,
        energy_err: f64::NAN,
        reference_kind: unit.reference,
        fp_iterations: 0,
        runtime_ms: 0,
        status: RunStatus::Failed,
    }
}

fn reference_values(cfg: &ExperimentConfig, unit: &Unit) -> Option<(f64, f64)> {
    let material = cfg.material();
    let geometry = StripGeometry::from_slenderness(cfg.length, unit.slenderness).ok()?;
    match unit.reference {
        ReferenceKind::Kl => Some((
            kl::center_deflection(unit.case, &material, &geometry, cfg.amplitude),
            kl::strain_energy(unit.case, &material, &geometry, cfg.amplitude),
        )),
        ReferenceKind::Fine2d => {
            let sol = fine2d::converged_reference(
                unit.case,
                &material,
                &geometry,
                cfg.amplitude,
                FINE2D_TOL,
                FINE2D_ROUNDS,
            )
            .ok()?;
            Some((sol.center_deflection, sol.energy))
        }
        ReferenceKind::LimitOde => {
            let ode = LimitOde::isotropic(cfg.poisson, unit.case.end_condition()).ok()?;
            let shape = move |x: f64| match unit.case.load_profile() {
                LoadProfile::Sinusoidal => (std::f64::consts::PI * x).sin(),
                LoadProfile::Uniform => 1.0,
            };
            let sol = ode.solve(shape, LIMIT_ODE_ELEMS).ok()?;
            // The ODE lives on the unit interval with unit modulus; the
            // physical deflection scale is p0 L^4 / (E t^3) and the energy
            // scale p0^2 L^5 / (E t^3), p0 the line-load amplitude.
            let p0 = 2.0 * cfg.amplitude;
            let t3 = geometry.thickness.powi(3);
            let w_scale = p0 * cfg.length.powi(4) / (cfg.young * t3);
            let e_scale = p0 * p0 * cfg.length.powi(5) / (cfg.young * t3);
            Some((sol.center_deflection() * w_scale, sol.energy() * e_scale))
        }
        ReferenceKind::Asymptotic => {
            let asym = AsymptoticExpansion::new(unit.case, &material, &geometry, cfg.amplitude);
            Some((asym.center_deflection(), asym.strain_energy()))
        }
    }
}

fn solve_row(
    cfg: &ExperimentConfig,
    unit: &Unit,
    row: Row,
    reference: (f64, f64),
) -> ConvergenceRecord {
    let (ref_center, ref_energy) = reference;
    let n_modes_label = match row {
        Row::Greedy { n_modes } => n_modes,
        Row::Block => 2,
        Row::AsymptoticRow => 0,
    };
    let material = cfg.material();
    let geometry = match StripGeometry::from_slenderness(cfg.length, unit.slenderness) {
        Ok(g) => g,
        Err(_) => return failed_record(unit, n_modes_label),
    };

    let start = Instant::now();
    if let Row::AsymptoticRow = row {
        let asym = AsymptoticExpansion::new(unit.case, &material, &geometry, cfg.amplitude);
        let defl = ((asym.center_deflection() - ref_center) / ref_center).abs();
        let energy =
            energy_error(asym.strain_energy(), ref_energy).unwrap_or(f64::NAN);
        return ConvergenceRecord {
            case_id: unit.case,
            slenderness: unit.slenderness,
            n_modes: 0,
            integration: unit.integration,
            defl_err_1: defl,
            defl_err_2: defl,
            energy_err: energy,
            reference_kind: unit.reference,
            fp_iterations: 0,
            runtime_ms: start.elapsed().as_millis(),
            status: RunStatus::Converged,
        };
    }

    let disc = match Discretization::build(
        geometry,
        material,
        cfg.order,
        cfg.n_elements,
        cfg.thickness_degree,
        cfg.boundary_layer,
        unit.integration,
    ) {
        Ok(d) => d,
        Err(_) => return failed_record(unit, n_modes_label),
    };
    let load = unit.case.load(cfg.amplitude);
    let bc = unit.case.end_condition();
    let settings = cfg.settings();
    let solved: Result<PgdSolution, _> = match row {
        Row::Greedy { n_modes } => solve_greedy(&disc, bc, &load, n_modes, &settings),
        Row::Block => fixed_point_block(&disc, bc, &load, &settings),
        Row::AsymptoticRow => unreachable!("handled above"),
    };
    let runtime_ms = start.elapsed().as_millis();
    let sol = match solved {
        Ok(s) => s,
        Err(_) => return failed_record(unit, n_modes_label),
    };

    let (defl_err_1, defl_err_2) = match deflection_errors(&sol, &disc, ref_center) {
        Ok(pair) => pair,
        Err(_) => (f64::NAN, f64::NAN),
    };
    let energy_err =
        energy_error(disc.strain_energy(&sol.field()), ref_energy).unwrap_or(f64::NAN);
    ConvergenceRecord {
        case_id: unit.case,
        slenderness: unit.slenderness,
        n_modes: sol.n_modes(),
        integration: unit.integration,
        defl_err_1,
        defl_err_2,
        energy_err,
        reference_kind: unit.reference,
        fp_iterations: sol.total_iterations(),
        runtime_ms,
        status: if sol.converged() {
            RunStatus::Converged
        } else {
            RunStatus::NotConverged
        },
    }
}

fn run_unit(cfg: &ExperimentConfig, unit: &Unit) -> Vec<ConvergenceRecord> {
    match reference_values(cfg, unit) {
        Some(reference) if reference.0 != 0.0 => unit
            .rows
            .iter()
            .map(|&row| solve_row(cfg, unit, row, reference))
            .collect(),
        _ => unit
            .rows
            .iter()
            .map(|&row| {
                failed_record(
                    unit,
                    match row {
                        Row::Greedy { n_modes } => n_modes,
                        Row::Block => 2,
                        Row::AsymptoticRow => 0,
                    },
                )
            })
            .collect(),
    }
}

/// Run a configured study.
///
/// Row order is deterministic (case-major, slenderness-minor, then mode
/// count) regardless of `parallel`; individual solve failures become rows
/// with `failed` status rather than aborting the sweep.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    cfg.validate()?;
    let units = units(cfg);
    let records: Vec<ConvergenceRecord> = if cfg.parallel {
        units
            .par_iter()
            .map(|u| run_unit(cfg, u))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    } else {
        units.iter().flat_map(|u| run_unit(cfg, u)).collect()
    };
    let mode_dump = if cfg.study == Study::DumpModes {
        Some(mode_dump_text(cfg)?)
    } else {
        None
    };
    Ok(ExperimentOutput { records, mode_dump })
}

/// Render records as CSV (header + one row per record, LF endings, floats in
/// scientific notation).
pub fn csv_string(records: &[ConvergenceRecord]) -> Result<String, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::NoRecords);
    }
    let mut out = String::from(
        "case,slenderness,n_modes,integration,reference,defl_err_1,defl_err_2,\
         energy_err,fp_iters,runtime_ms,status\n",
    );
    for r in records {
        out.push_str(&format!(
            "{},{:e},{},{},{},{:e},{:e},{:e},{},{},{}\n",
            r.case_id,
            r.slenderness,
            r.n_modes,
            r.integration,
            r.reference_kind,
            r.defl_err_1,
            r.defl_err_2,
            r.energy_err,
            r.fp_iterations,
            r.runtime_ms,
            r.status,
        ));
    }
    Ok(out)
}

/// Write records to `path` as CSV.
pub fn write_csv(records: &[ConvergenceRecord], path: &Path) -> Result<(), HarnessError> {
    let text = csv_string(records)?;
    std::fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Solve the block mode for the first configured case/slenderness and render
/// the mode-shape dump: one row per axial node `x1 v1 v3 w3`, a blank line,
/// then the thickness sample grid `x3 r1 s3`.
pub fn mode_dump_text(cfg: &ExperimentConfig) -> Result<String, HarnessError> {
    let case = cfg.cases[0];
    let slenderness = cfg.slenderness[0];
    let geometry = StripGeometry::from_slenderness(cfg.length, slenderness)
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let disc = Discretization::build(
        geometry,
        cfg.material(),
        cfg.order,
        cfg.n_elements,
        cfg.thickness_degree,
        cfg.boundary_layer,
        cfg.integration,
    )
    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let sol = fixed_point_block(
        &disc,
        case.end_condition(),
        &case.load(cfg.amplitude),
        &cfg.settings(),
    )
    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let block = sol.block.as_ref().expect("block solve returns a block");

    let mut out = format!(
        "# {} slenderness {:e} block mode shapes\n# x1 v1 v3 w3\n",
        case, slenderness
    );
    for (i, &x1) in disc.mesh.nodes().iter().enumerate() {
        out.push_str(&format!(
            "{:e} {:e} {:e} {:e}\n",
            x1, block.v1[i], block.v3[i], block.w3[i]
        ));
    }
    out.push('\n');
    out.push_str("# x3 r1 s3\n");
    let t = disc.geometry.thickness;
    let samples = 41;
    for i in 0..samples {
        let x3 = t * (i as f64 / (samples - 1) as f64 - 0.5);
        out.push_str(&format!(
            "{:e} {:e} {:e}\n",
            x3,
            disc.thick.basis.eval(&block.r1, x3),
            disc.thick.basis.eval(&block.s3, x3),
        ));
    }
    Ok(out)
}
