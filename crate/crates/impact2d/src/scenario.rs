//! Declarative scenario configs, run orchestration, and parameter sweeps.
//!
//! Configs are flat `key = value` text grouped into `[section]` blocks; full
//! lines starting with `#` are comments. Vectors are two whitespace-separated
//! numbers. The schema:
//!
//! ```text
//! [geometry]   kind = disk | annulus; center (vec2); radius, or r_inner and
//!              r_outer; target_h
//! [material]   model = svk (young_modulus, poisson_ratio) | ogden (c1, c2,
//!              d); density
//! [time]       dt; t_final
//! [initial]    u0 (vec2, default 0 0); u1 (vec2, default 0 0); clearance
//!              (optional: shift the body so its lowest contact node starts
//!              this far above the foundation)
//! [contact]    law = snc | inc; c_nu; alpha; mu (default 0); c_tau
//!              (default 1, only used when mu > 0)
//! [foundation] height (default 0)
//! [solver]     tolerance (1e-8); max_outer_iters (50); linear_tol (1e-10)
//! [output]     directory (default "out"); vtk_every (default 0 = no frames)
//! ```
//!
//! Parsing reports every violation at once, each named by its dotted path.
//! `serialize_config` emits a canonical form that parses back to an equal
//! config; the run manifest hashes that canonical form, so equivalent configs
//! hash identically. Runs write `energy.csv` (byte-reproducible),
//! `manifest.json` (atomic tmp-then-rename), and optional VTK frames.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use nalgebra::{Point2, Vector2};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::contact_geom::RigidFoundation;
use crate::contact_law::{FrictionParams, NormalLawParams};
use crate::diagnostics::{
    energy_history, max_penetration, write_energy_csv, write_vtk_frame, DiagnosticsError,
};
use crate::dynamics::{ExternalLoads, SystemState, TimeStepConfig};
use crate::material::{MaterialModel, OgdenParams, SvkParams};
use crate::mesh::{build_annulus_mesh, build_disk_mesh, MeshError};
use crate::solver::{Problem, SolverConfig, SolverError, SolverReport, Trajectory};

/// One named defect in a config: `path` is the dotted key (or `[section]`).
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigViolation {
    pub path: String,
    pub message: String,
}

#[derive(Debug)]
pub struct ConfigError {
    pub violations: Vec<ConfigViolation>,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "configuration invalid ({} problem(s)):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {}: {}", v.path, v.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("mesh construction failed: {0}")]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("step {step} (t = {time}) did not converge; partial artifacts in {}", directory.display())]
    NonConverged { step: usize, time: f64, directory: PathBuf },
    #[error("sweep value {value} for {param}: {message}")]
    SweepValue { param: &'static str, value: f64, message: String },
}

#[derive(Clone, Debug, PartialEq)]
pub enum GeometryConfig {
    Disk { center: Point2<f64>, radius: f64 },
    Annulus { center: Point2<f64>, r_inner: f64, r_outer: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    /// Write every k-th state as a VTK frame; 0 disables frames.
    pub vtk_every: usize,
}

/// A fully validated scenario. External loads are fixed to zero here (both
/// benchmark bodies fly freely); the library API accepts loads directly.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub geometry: GeometryConfig,
    pub target_h: f64,
    pub material: MaterialModel,
    pub time: TimeStepConfig,
    pub u0: Vector2<f64>,
    pub u1: Vector2<f64>,
    pub clearance: Option<f64>,
    pub law: NormalLawParams,
    pub friction: FrictionParams,
    pub foundation_height: f64,
    pub solver: SolverConfig,
    pub output: OutputConfig,
}

// ---------------------------------------------------------------------------
// Parsing

fn parse_finite(value: &str) -> Result<f64, String> {
    match value.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        Ok(x) => Err(format!("must be finite, got {x}")),
        Err(_) => Err(format!("not a number: `{value}`")),
    }
}

fn parse_vec2(value: &str) -> Result<Vector2<f64>, String> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(format!("expected two numbers, got `{value}`"));
    }
    Ok(Vector2::new(parse_finite(parts[0])?, parse_finite(parts[1])?))
}

/// Raw `section -> key -> value` map; duplicate keys/sections and stray lines
/// become violations instead of silent overwrites.
fn raw_sections(
    text: &str,
    violations: &mut Vec<ConfigViolation>,
) -> BTreeMap<String, BTreeMap<String, String>> {
    let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let name = name.trim().to_string();
            if sections.contains_key(&name) {
                violations.push(ConfigViolation {
                    path: format!("[{name}]"),
                    message: format!("duplicate section (line {})", idx + 1),
                });
            }
            sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            violations.push(ConfigViolation {
                path: format!("line {}", idx + 1),
                message: format!("expected `key = value` or `[section]`, got `{line}`"),
            });
            continue;
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        match &current {
            None => violations.push(ConfigViolation {
                path: key,
                message: format!("key outside any [section] (line {})", idx + 1),
            }),
            Some(section) => {
                let entries = sections.get_mut(section).expect("section exists");
                if entries.insert(key.clone(), value).is_some() {
                    violations.push(ConfigViolation {
                        path: format!("{section}.{key}"),
                        message: format!("duplicate key (line {})", idx + 1),
                    });
                }
            }
        }
    }
    sections
}

/// Drains one section's entries, recording missing/unparsable/unknown keys.
struct SectionReader<'a> {
    name: &'static str,
    entries: BTreeMap<String, String>,
    violations: &'a mut Vec<ConfigViolation>,
}

impl<'a> SectionReader<'a> {
    fn new(
        name: &'static str,
        entries: Option<BTreeMap<String, String>>,
        violations: &'a mut Vec<ConfigViolation>,
    ) -> Self {
        Self { name, entries: entries.unwrap_or_default(), violations }
    }

    fn violation(&mut self, key: &str, message: impl Into<String>) {
        self.violations
            .push(ConfigViolation { path: format!("{}.{key}", self.name), message: message.into() });
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    fn parsed<T>(
        &mut self,
        key: &str,
        parse: impl FnOnce(&str) -> Result<T, String>,
    ) -> Option<Option<T>> {
        // Outer None: key absent. Inner None: present but malformed (recorded).
        let value = self.take(key)?;
        match parse(&value) {
            Ok(x) => Some(Some(x)),
            Err(msg) => {
                self.violation(key, msg);
                Some(None)
            }
        }
    }

    fn require_f64(&mut self, key: &str) -> Option<f64> {
        match self.parsed(key, parse_finite) {
            None => {
                self.violation(key, "missing required key");
                None
            }
            Some(x) => x,
        }
    }

    fn opt_f64(&mut self, key: &str, default: f64) -> Option<f64> {
        match self.parsed(key, parse_finite) {
            None => Some(default),
            Some(x) => x,
        }
    }

    fn opt_vec2(&mut self, key: &str, default: Vector2<f64>) -> Option<Vector2<f64>> {
        match self.parsed(key, parse_vec2) {
            None => Some(default),
            Some(x) => x,
        }
    }

    fn require_word(&mut self, key: &str) -> Option<String> {
        match self.take(key) {
            None => {
                self.violation(key, "missing required key");
                None
            }
            Some(v) => Some(v.to_lowercase()),
        }
    }

    fn opt_usize(&mut self, key: &str, default: usize) -> Option<usize> {
        match self.parsed(key, |v| {
            v.parse::<usize>().map_err(|_| format!("not a nonnegative integer: `{v}`"))
        }) {
            None => Some(default),
            Some(x) => x,
        }
    }

    fn finish(mut self) {
        let leftover: Vec<String> = self.entries.keys().cloned().collect();
        for key in leftover {
            self.violation(&key, "unknown key");
        }
    }
}

/// Parse and fully validate a scenario; all violations are reported together.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut violations = Vec::new();
    let mut sections = raw_sections(text, &mut violations);

    // geometry
    let mut geo = SectionReader::new("geometry", sections.remove("geometry"), &mut violations);
    let kind = geo.require_word("kind");
    let geometry = match kind.as_deref() {
        Some("disk") => {
            let center = geo.parsed("center", parse_vec2).unwrap_or_else(|| {
                geo.violation("center", "missing required key");
                None
            });
            let radius = geo.require_f64("radius");
            if let Some(r) = radius {
                if r <= 0.0 {
                    geo.violation("radius", format!("must be positive, got {r}"));
                }
            }
            match (center, radius) {
                (Some(c), Some(r)) if r > 0.0 => {
                    Some(GeometryConfig::Disk { center: Point2::from(c), radius: r })
                }
                _ => None,
            }
        }
        Some("annulus") => {
            let center = geo.parsed("center", parse_vec2).unwrap_or_else(|| {
                geo.violation("center", "missing required key");
                None
            });
            let r_inner = geo.require_f64("r_inner");
            let r_outer = geo.require_f64("r_outer");
            if let (Some(ri), Some(ro)) = (r_inner, r_outer) {
                if !(0.0 < ri && ri < ro) {
                    geo.violation("r_inner", format!("need 0 < r_inner < r_outer, got {ri} and {ro}"));
                }
            }
            match (center, r_inner, r_outer) {
                (Some(c), Some(ri), Some(ro)) if 0.0 < ri && ri < ro => {
                    Some(GeometryConfig::Annulus { center: Point2::from(c), r_inner: ri, r_outer: ro })
                }
                _ => None,
            }
        }
        Some(other) => {
            geo.violation("kind", format!("unknown kind `{other}` (disk or annulus)"));
            None
        }
        None => None,
    };
    let target_h = geo.require_f64("target_h");
    if let Some(h) = target_h {
        if h <= 0.0 {
            geo.violation("target_h", format!("must be positive, got {h}"));
        }
    }
    geo.finish();

    // material
    let mut mat = SectionReader::new("material", sections.remove("material"), &mut violations);
    let model = mat.require_word("model");
    let material = match model.as_deref() {
        Some("svk") => {
            let young = mat.require_f64("young_modulus");
            let poisson = mat.require_f64("poisson_ratio");
            match (young, poisson) {
                (Some(e), Some(k)) => match SvkParams::from_young_poisson(e, k) {
                    Ok(p) => Some(MaterialModel::SaintVenantKirchhoff(p)),
                    Err(err) => {
                        mat.violation("model", err.to_string());
                        None
                    }
                },
                _ => None,
            }
        }
        Some("ogden") => {
            let c1 = mat.require_f64("c1");
            let c2 = mat.require_f64("c2");
            let d = mat.require_f64("d");
            match (c1, c2, d) {
                (Some(c1), Some(c2), Some(d)) => match OgdenParams::new(c1, c2, d) {
                    Ok(p) => Some(MaterialModel::OgdenCompressible(p)),
                    Err(err) => {
                        mat.violation("model", err.to_string());
                        None
                    }
                },
                _ => None,
            }
        }
        Some(other) => {
            mat.violation("model", format!("unknown model `{other}` (svk or ogden)"));
            None
        }
        None => None,
    };
    let density = mat.require_f64("density");
    if let Some(rho) = density {
        if rho <= 0.0 {
            mat.violation("density", format!("must be positive, got {rho}"));
        }
    }
    mat.finish();

    // time
    let mut time_sec = SectionReader::new("time", sections.remove("time"), &mut violations);
    let dt = time_sec.require_f64("dt");
    let t_final = time_sec.require_f64("t_final");
    time_sec.finish();
    let time = match (dt, t_final, density) {
        (Some(dt), Some(t), Some(rho)) if rho > 0.0 => match TimeStepConfig::new(dt, t, rho) {
            Ok(cfg) => Some(cfg),
            Err(err) => {
                violations.push(ConfigViolation { path: "time.dt".into(), message: err.to_string() });
                None
            }
        },
        _ => None,
    };

    // initial
    let mut init = SectionReader::new("initial", sections.remove("initial"), &mut violations);
    let u0 = init.opt_vec2("u0", Vector2::zeros());
    let u1 = init.opt_vec2("u1", Vector2::zeros());
    let clearance = match init.parsed("clearance", parse_finite) {
        None => Some(None),
        Some(Some(g)) => {
            if g < 0.0 {
                init.violation("clearance", format!("must be nonnegative, got {g}"));
                None
            } else {
                Some(Some(g))
            }
        }
        Some(None) => None,
    };
    init.finish();

    // contact
    let mut con = SectionReader::new("contact", sections.remove("contact"), &mut violations);
    let law_kind = con.require_word("law");
    let c_nu = con.require_f64("c_nu");
    let alpha = con.require_f64("alpha");
    let law = match (law_kind.as_deref(), c_nu, alpha) {
        (Some(kind @ ("snc" | "inc")), Some(c), Some(a)) => {
            let built = if kind == "snc" {
                NormalLawParams::snc(c, a)
            } else {
                NormalLawParams::inc(c, a)
            };
            match built {
                Ok(law) => Some(law),
                Err(err) => {
                    con.violation(if c > 0.0 { "alpha" } else { "c_nu" }, err.to_string());
                    None
                }
            }
        }
        (Some(other), _, _) if other != "snc" && other != "inc" => {
            con.violation("law", format!("unknown law `{other}` (snc or inc)"));
            None
        }
        _ => None,
    };
    let mu = con.opt_f64("mu", 0.0);
    let c_tau = con.opt_f64("c_tau", 1.0);
    let friction = match (mu, c_tau) {
        (Some(m), Some(c)) => match FrictionParams::new(m, c) {
            Ok(fp) => Some(fp),
            Err(err) => {
                con.violation(if m < 0.0 { "mu" } else { "c_tau" }, err.to_string());
                None
            }
        },
        _ => None,
    };
    con.finish();

    // foundation
    let mut found = SectionReader::new("foundation", sections.remove("foundation"), &mut violations);
    let foundation_height = found.opt_f64("height", 0.0);
    found.finish();

    // solver
    let mut sol = SectionReader::new("solver", sections.remove("solver"), &mut violations);
    let tolerance = sol.opt_f64("tolerance", 1e-8);
    let max_outer = sol.opt_usize("max_outer_iters", 50);
    let linear_tol = sol.opt_f64("linear_tol", 1e-10);
    sol.finish();
    let solver = match (tolerance, max_outer, linear_tol) {
        (Some(tol), Some(iters), Some(lin)) => match SolverConfig::new(tol, iters, lin) {
            Ok(cfg) => Some(cfg),
            Err(err) => {
                violations.push(ConfigViolation {
                    path: "solver.tolerance".into(),
                    message: err.to_string(),
                });
                None
            }
        },
        _ => None,
    };

    // output
    let mut out = SectionReader::new("output", sections.remove("output"), &mut violations);
    let directory = out.take("directory").unwrap_or_else(|| "out".to_string());
    let vtk_every = out.opt_usize("vtk_every", 0);
    out.finish();

    for name in sections.keys() {
        violations.push(ConfigViolation {
            path: format!("[{name}]"),
            message: "unknown section".into(),
        });
    }

    if !violations.is_empty() {
        return Err(ConfigError { violations });
    }
    Ok(ScenarioConfig {
        geometry: geometry.expect("validated"),
        target_h: target_h.expect("validated"),
        material: material.expect("validated"),
        time: time.expect("validated"),
        u0: u0.expect("validated"),
        u1: u1.expect("validated"),
        clearance: clearance.expect("validated"),
        law: law.expect("validated"),
        friction: friction.expect("validated"),
        foundation_height: foundation_height.expect("validated"),
        solver: solver.expect("validated"),
        output: OutputConfig {
            directory: PathBuf::from(directory),
            vtk_every: vtk_every.expect("validated"),
        },
    })
}

/// Canonical text form; parses back to an equal config (floats use the
/// shortest exact decimal representation).
pub fn serialize_config(config: &ScenarioConfig) -> String {
    let mut s = String::new();
    s.push_str("[geometry]\n");
    match &config.geometry {
        GeometryConfig::Disk { center, radius } => {
            s.push_str("kind = disk\n");
            s.push_str(&format!("center = {} {}\n", center.x, center.y));
            s.push_str(&format!("radius = {radius}\n"));
        }
        GeometryConfig::Annulus { center, r_inner, r_outer } => {
            s.push_str("kind = annulus\n");
            s.push_str(&format!("center = {} {}\n", center.x, center.y));
            s.push_str(&format!("r_inner = {r_inner}\n"));
            s.push_str(&format!("r_outer = {r_outer}\n"));
        }
    }
    s.push_str(&format!("target_h = {}\n\n", config.target_h));

    s.push_str("[material]\n");
    match &config.material {
        MaterialModel::SaintVenantKirchhoff(p) => {
            s.push_str("model = svk\n");
            s.push_str(&format!("young_modulus = {}\n", p.young));
            s.push_str(&format!("poisson_ratio = {}\n", p.poisson));
        }
        MaterialModel::OgdenCompressible(p) => {
            s.push_str("model = ogden\n");
            s.push_str(&format!("c1 = {}\n", p.c1));
            s.push_str(&format!("c2 = {}\n", p.c2));
            s.push_str(&format!("d = {}\n", p.d));
        }
    }
    s.push_str(&format!("density = {}\n\n", config.time.density));

    s.push_str("[time]\n");
    s.push_str(&format!("dt = {}\n", config.time.dt));
    s.push_str(&format!("t_final = {}\n\n", config.time.t_final));

    s.push_str("[initial]\n");
    s.push_str(&format!("u0 = {} {}\n", config.u0.x, config.u0.y));
    s.push_str(&format!("u1 = {} {}\n", config.u1.x, config.u1.y));
    if let Some(g) = config.clearance {
        s.push_str(&format!("clearance = {g}\n"));
    }
    s.push('\n');

    s.push_str("[contact]\n");
    let (law_name, c_nu, alpha) = match config.law {
        NormalLawParams::Snc { c_nu, alpha } => ("snc", c_nu, alpha),
        NormalLawParams::Inc { c_nu, alpha } => ("inc", c_nu, alpha),
    };
    s.push_str(&format!("law = {law_name}\n"));
    s.push_str(&format!("c_nu = {c_nu}\n"));
    s.push_str(&format!("alpha = {alpha}\n"));
    s.push_str(&format!("mu = {}\n", config.friction.mu));
    s.push_str(&format!("c_tau = {}\n\n", config.friction.c_tau));

    s.push_str("[foundation]\n");
    s.push_str(&format!("height = {}\n\n", config.foundation_height));

    s.push_str("[solver]\n");
    s.push_str(&format!("tolerance = {}\n", config.solver.tolerance));
    s.push_str(&format!("max_outer_iters = {}\n", config.solver.max_outer_iters));
    s.push_str(&format!("linear_tol = {}\n\n", config.solver.linear_tol));

    s.push_str("[output]\n");
    s.push_str(&format!("directory = {}\n", config.output.directory.display()));
    s.push_str(&format!("vtk_every = {}\n", config.output.vtk_every));
    s
}

/// Hex SHA-256 of the canonical serialization; equivalent configs with
/// different formatting hash identically.
pub fn config_hash(config: &ScenarioConfig) -> String {
    let digest = Sha256::digest(serialize_config(config).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

// ---------------------------------------------------------------------------
// Running

/// Builds the mesh (applying the clearance shift) and the assembled problem
/// with its initial state.
pub fn build_problem(config: &ScenarioConfig) -> Result<(Problem, SystemState), RunError> {
    let mut mesh = match config.geometry {
        GeometryConfig::Disk { center, radius } => {
            build_disk_mesh(center, radius, config.target_h)?
        }
        GeometryConfig::Annulus { center, r_inner, r_outer } => {
            build_annulus_mesh(center, r_inner, r_outer, config.target_h)?
        }
    };
    if let Some(clearance) = config.clearance {
        // The lowest contact NODE is what first touches; the continuum
        // surface of the polygon sits slightly higher than the circle.
        let min_y = mesh
            .contact_nodes
            .iter()
            .map(|&n| mesh.nodes[n].y)
            .fold(f64::INFINITY, f64::min);
        let shift = config.foundation_height + clearance - min_y;
        mesh.translate(Vector2::new(0.0, shift));
    }
    let problem = Problem::new(
        mesh,
        config.material,
        RigidFoundation::below_height(config.foundation_height),
        config.law,
        config.friction,
        ExternalLoads::none(),
        config.time,
        config.solver,
        Vec::new(),
    )?;
    let initial = problem.uniform_state(config.u0, config.u1);
    Ok((problem, initial))
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub code_version: String,
    pub config_sha256: String,
    pub started_unix_s: f64,
    pub ended_unix_s: f64,
    pub wall_seconds: f64,
    pub steps_planned: usize,
    pub steps_completed: usize,
    pub non_converged_step: Option<usize>,
    pub outer_iterations_per_step: Vec<usize>,
    pub total_outer_iterations: usize,
    pub max_outer_iterations: usize,
    pub max_penetration: f64,
    pub final_energy_drift: f64,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub directory: PathBuf,
    pub steps_completed: usize,
    pub max_penetration: f64,
    /// (E_final − E_0)/E_0 when E_0 is meaningfully nonzero, else absolute.
    pub final_energy_drift: f64,
    pub total_outer_iterations: usize,
}

fn unix_seconds() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

fn io_at(path: &Path) -> impl FnOnce(io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.to_path_buf(), source }
}

fn energy_drift(e0: f64, e_final: f64) -> f64 {
    if e0.abs() > 1e-14 {
        (e_final - e0) / e0
    } else {
        e_final - e0
    }
}

/// Execute a scenario and write its artifacts into `out_dir` (defaults to
/// the config's output directory). A non-converged step still produces the
/// manifest and the CSV prefix, then surfaces as `RunError::NonConverged`.
pub fn run_scenario(
    config: &ScenarioConfig,
    out_dir: Option<&Path>,
) -> Result<RunSummary, RunError> {
    let started = unix_seconds();
    let clock = Instant::now();
    let dir: PathBuf = out_dir.map(Path::to_path_buf).unwrap_or_else(|| config.output.directory.clone());
    fs::create_dir_all(&dir).map_err(io_at(&dir))?;

    let (problem, initial) = build_problem(config)?;
    let t_final = config.time.t_final;
    let steps_planned = ((t_final / config.time.dt) - 1e-9).ceil().max(1.0) as usize;

    let mut states = vec![initial];
    let mut reports: Vec<SolverReport> = Vec::new();
    let mut non_converged: Option<(usize, f64)> = None;
    let mut t = 0.0;
    while t < t_final - 1e-12 * t_final {
        let dt_k = config.time.dt.min(t_final - t);
        let (state, report) = problem.solve_time_step(states.last().expect("nonempty"), dt_k)?;
        let converged = report.converged;
        reports.push(report);
        if !converged {
            non_converged = Some((reports.len() - 1, state.time));
            break;
        }
        t = state.time;
        states.push(state);
    }

    let records = {
        let trajectory = Trajectory { states, reports };
        let records = energy_history(&problem, &trajectory)?;
        let (pen_series, max_pen) = max_penetration(&trajectory.states);
        write_energy_csv(&records, &pen_series, &dir.join("energy.csv"))?;

        if config.output.vtk_every > 0 {
            for (i, state) in trajectory.states.iter().enumerate() {
                if i % config.output.vtk_every == 0 || i + 1 == trajectory.states.len() {
                    write_vtk_frame(problem.mesh(), state, &dir.join(format!("frame_{i:06}.vtk")))?;
                }
            }
        }
        (trajectory, records, max_pen)
    };
    let (trajectory, records, max_pen) = records;

    let drift = energy_drift(records[0].total, records.last().expect("nonempty").total);
    let total_outer: usize = trajectory.reports.iter().map(|r| r.outer_iterations).sum();
    let manifest = RunManifest {
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        config_sha256: config_hash(config),
        started_unix_s: started,
        ended_unix_s: unix_seconds(),
        wall_seconds: clock.elapsed().as_secs_f64(),
        steps_planned,
        steps_completed: trajectory.states.len() - 1,
        non_converged_step: non_converged.map(|(step, _)| step),
        outer_iterations_per_step: trajectory.reports.iter().map(|r| r.outer_iterations).collect(),
        total_outer_iterations: total_outer,
        max_outer_iterations: trajectory.reports.iter().map(|r| r.outer_iterations).max().unwrap_or(0),
        max_penetration: max_pen,
        final_energy_drift: drift,
    };
    let manifest_path = dir.join("manifest.json");
    let tmp_path = dir.join("manifest.json.tmp");
    let json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    fs::write(&tmp_path, json).map_err(io_at(&tmp_path))?;
    fs::rename(&tmp_path, &manifest_path).map_err(io_at(&manifest_path))?;

    if let Some((step, time)) = non_converged {
        return Err(RunError::NonConverged { step, time, directory: dir });
    }
    Ok(RunSummary {
        directory: dir,
        steps_completed: trajectory.states.len() - 1,
        max_penetration: max_pen,
        final_energy_drift: drift,
        total_outer_iterations: total_outer,
    })
}

// ---------------------------------------------------------------------------
// Sweeps

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    CNu,
    Alpha,
    Dt,
    TargetH,
    Mu,
}

impl SweepParam {
    pub fn key(self) -> &'static str {
        match self {
            SweepParam::CNu => "c_nu",
            SweepParam::Alpha => "alpha",
            SweepParam::Dt => "dt",
            SweepParam::TargetH => "target_h",
            SweepParam::Mu => "mu",
        }
    }
}

impl std::str::FromStr for SweepParam {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "c_nu" => Ok(SweepParam::CNu),
            "alpha" => Ok(SweepParam::Alpha),
            "dt" => Ok(SweepParam::Dt),
            "target_h" => Ok(SweepParam::TargetH),
            "mu" => Ok(SweepParam::Mu),
            other => Err(format!(
                "unknown sweep parameter `{other}` (c_nu, alpha, dt, target_h, mu)"
            )),
        }
    }
}

/// Clone the scenario with one parameter replaced, re-running the library
/// validation (an out-of-range value is rejected, not smuggled through).
pub fn apply_sweep_value(
    config: &ScenarioConfig,
    param: SweepParam,
    value: f64,
) -> Result<ScenarioConfig, RunError> {
    let mut out = config.clone();
    let reject = |message: String| RunError::SweepValue { param: param.key(), value, message };
    match param {
        SweepParam::CNu | SweepParam::Alpha => {
            let (c_nu, alpha) = (config.law.c_nu(), config.law.alpha());
            let (c_nu, alpha) =
                if param == SweepParam::CNu { (value, alpha) } else { (c_nu, value) };
            out.law = match config.law {
                NormalLawParams::Snc { .. } => NormalLawParams::snc(c_nu, alpha),
                NormalLawParams::Inc { .. } => NormalLawParams::inc(c_nu, alpha),
            }
            .map_err(|e| reject(e.to_string()))?;
        }
        SweepParam::Dt => {
            out.time = TimeStepConfig::new(value, config.time.t_final, config.time.density)
                .map_err(|e| reject(e.to_string()))?;
        }
        SweepParam::TargetH => {
            if value <= 0.0 {
                return Err(reject(format!("must be positive, got {value}")));
            }
            out.target_h = value;
        }
        SweepParam::Mu => {
            out.friction = FrictionParams::new(value, config.friction.c_tau)
                .map_err(|e| reject(e.to_string()))?;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub max_penetration: f64,
    pub final_energy_drift: f64,
    pub total_outer_iterations: usize,
}

/// Run the scenario once per value, each into `<out_root>/<param>_<value>/`,
/// and write the summary table to `<out_root>/sweep.csv`.
pub fn sweep_scenario(
    config: &ScenarioConfig,
    param: SweepParam,
    values: &[f64],
    out_root: &Path,
) -> Result<Vec<SweepRow>, RunError> {
    fs::create_dir_all(out_root).map_err(io_at(out_root))?;
    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let cfg = apply_sweep_value(config, param, value)?;
        let sub = out_root.join(format!("{}_{}", param.key(), value));
        let summary = run_scenario(&cfg, Some(&sub))?;
        rows.push(SweepRow {
            value,
            max_penetration: summary.max_penetration,
            final_energy_drift: summary.final_energy_drift,
            total_outer_iterations: summary.total_outer_iterations,
        });
    }
    let mut csv = String::from("value,max_penetration,final_energy_drift,total_outer_iterations\n");
    for row in &rows {
        csv.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{}\n",
            row.value, row.max_penetration, row.final_energy_drift, row.total_outer_iterations
        ));
    }
    let path = out_root.join("sweep.csv");
    fs::write(&path, csv).map_err(io_at(&path))?;
    Ok(rows)
}
