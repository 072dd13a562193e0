//! Scenario catalogue, runner and report rendering.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::checks::{all_pass, Check};
use crate::crypto::{
    build_g1, build_g2, build_g2_full, degeneration_residual, intertwining_checks,
    is_crypto_hermitian, level_two_core, make_crypto_scenario, CryptoFamily, LevelTwoCore,
};
use crate::errata::{self, Erratum};
use crate::error::{Error, Result};
use crate::linalg::{dominant_index, rank_of, rel, CMat, ToleranceConfig, C64};
use crate::models::{make_model, ModelInstance, ModelKind, ModelParams};
use crate::transform::{transform, TransformResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Bounds on the per-mode dimension and on the total Hilbert-space dimension.
pub const MIN_DIM: usize = 4;
pub const MAX_DIM: usize = 512;

/// Residual bound for the `epsilon = 0` comparison against the hermitian pipeline.
pub const DEGENERATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Boson,
    Quon,
    LandauA,
    LandauB,
    CryptoBoson,
    CryptoQuon,
    CryptoLandauA,
    CryptoLandauB,
}

/// Parameter keys accepted by a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    Dim,
    K,
    Q,
    Epsilon,
    Seed,
    HbarOmega,
}

impl Param {
    pub fn key(&self) -> &'static str {
        match self {
            Param::Dim => "dim",
            Param::K => "k",
            Param::Q => "q",
            Param::Epsilon => "epsilon",
            Param::Seed => "seed",
            Param::HbarOmega => "hbar_omega",
        }
    }

    pub fn schema(&self) -> &'static str {
        match self {
            Param::Dim => "integer, states per mode",
            Param::K => "integer, 1 <= k < dim",
            Param::Q => "real in [0, 1]",
            Param::Epsilon => "real >= 0",
            Param::Seed => "unsigned integer",
            Param::HbarOmega => "real > 0",
        }
    }
}

impl Scenario {
    /// Catalogue order; `verify --all` reports in this order.
    pub const ALL: [Scenario; 8] = [
        Scenario::Boson,
        Scenario::Quon,
        Scenario::LandauA,
        Scenario::LandauB,
        Scenario::CryptoBoson,
        Scenario::CryptoQuon,
        Scenario::CryptoLandauA,
        Scenario::CryptoLandauB,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Boson => "boson",
            Scenario::Quon => "quon",
            Scenario::LandauA => "landau-a",
            Scenario::LandauB => "landau-b",
            Scenario::CryptoBoson => "crypto-boson",
            Scenario::CryptoQuon => "crypto-quon",
            Scenario::CryptoLandauA => "crypto-landau-a",
            Scenario::CryptoLandauB => "crypto-landau-b",
        }
    }

    pub fn base_kind(&self) -> ModelKind {
        match self {
            Scenario::Boson | Scenario::CryptoBoson => ModelKind::Boson,
            Scenario::Quon | Scenario::CryptoQuon => ModelKind::Quon,
            Scenario::LandauA | Scenario::CryptoLandauA => ModelKind::LandauA,
            Scenario::LandauB | Scenario::CryptoLandauB => ModelKind::LandauB,
        }
    }

    pub fn is_crypto(&self) -> bool {
        matches!(
            self,
            Scenario::CryptoBoson
                | Scenario::CryptoQuon
                | Scenario::CryptoLandauA
                | Scenario::CryptoLandauB
        )
    }

    pub fn default_dim(&self) -> usize {
        match (self.base_kind().is_two_mode(), self.is_crypto()) {
            (false, _) => 16,
            (true, false) => 8,
            (true, true) => 4,
        }
    }

    pub fn params(&self) -> Vec<Param> {
        let mut p = vec![Param::Dim];
        match self.base_kind() {
            ModelKind::Boson => p.push(Param::K),
            ModelKind::Quon => p.extend([Param::K, Param::Q]),
            _ => p.push(Param::HbarOmega),
        }
        if self.is_crypto() {
            p.extend([Param::Epsilon, Param::Seed]);
        }
        p
    }

    pub fn description(&self) -> &'static str {
        match self {
            Scenario::Boson => "truncated boson, h1 = a^dagger a, x = a^k",
            Scenario::Quon => "truncated quon, h1 = B^dagger B, x = B^k",
            Scenario::LandauA => "two-mode Landau levels, x = A+ A-",
            Scenario::LandauB => "two-mode Landau levels, x = A+ J",
            Scenario::CryptoBoson => "metric-dressed boson",
            Scenario::CryptoQuon => "metric-dressed quon",
            Scenario::CryptoLandauA => "metric-dressed landau-a",
            Scenario::CryptoLandauB => "metric-dressed landau-b",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Markdown,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidParameter(format!(
                "unknown format `{other}` (expected json, markdown or csv)"
            ))),
        }
    }
}

/// One scenario invocation. `None` means "scenario default".
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub scenario: Option<Scenario>,
    pub dim: Option<usize>,
    pub k: Option<usize>,
    pub q: Option<f64>,
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub hbar_omega: Option<f64>,
    pub tol: ToleranceConfig,
}

/// Fully resolved and validated parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedConfig {
    pub scenario: Scenario,
    pub dim: usize,
    pub model: ModelParams,
    pub epsilon: f64,
    pub seed: u64,
    pub tol: ToleranceConfig,
}

impl RunConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario: Some(scenario),
            ..Default::default()
        }
    }

    pub fn resolve(&self) -> Result<ResolvedConfig> {
        let scenario = self
            .scenario
            .ok_or_else(|| Error::InvalidParameter("no scenario given".into()))?;
        let accepted = scenario.params();
        let given = [
            (Param::Dim, self.dim.is_some()),
            (Param::K, self.k.is_some()),
            (Param::Q, self.q.is_some()),
            (Param::Epsilon, self.epsilon.is_some()),
            (Param::Seed, self.seed.is_some()),
            (Param::HbarOmega, self.hbar_omega.is_some()),
        ];
        for (param, present) in given {
            if present && !accepted.contains(&param) {
                return Err(Error::InvalidParameter(format!(
                    "scenario {scenario} does not take `{}`",
                    param.key()
                )));
            }
        }

        let defaults = ModelParams::default();
        let dim = self.dim.unwrap_or_else(|| scenario.default_dim());
        let total = if scenario.base_kind().is_two_mode() {
            dim.saturating_mul(dim)
        } else {
            dim
        };
        if !(MIN_DIM..=MAX_DIM).contains(&dim) || total > MAX_DIM {
            return Err(Error::InvalidParameter(format!(
                "dim = {dim} out of range: need {MIN_DIM} <= dim and total dimension <= {MAX_DIM}"
            )));
        }
        let model = ModelParams {
            k: self.k.unwrap_or(defaults.k),
            q: self.q.unwrap_or(defaults.q),
            hbar_omega: self.hbar_omega.unwrap_or(defaults.hbar_omega),
        };
        if accepted.contains(&Param::K) && !(1..dim).contains(&model.k) {
            return Err(Error::InvalidParameter(format!(
                "k = {} must satisfy 1 <= k < dim = {dim}",
                model.k
            )));
        }
        if !(0.0..=1.0).contains(&model.q) {
            return Err(Error::InvalidParameter(format!("q = {} outside [0, 1]", model.q)));
        }
        if !(model.hbar_omega.is_finite() && model.hbar_omega > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "hbar_omega = {} must be positive",
                model.hbar_omega
            )));
        }
        let epsilon = self.epsilon.unwrap_or(0.2);
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon = {epsilon} must be finite and non-negative"
            )));
        }
        Ok(ResolvedConfig {
            scenario,
            dim,
            model,
            epsilon,
            seed: self.seed.unwrap_or(1),
            tol: self.tol,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    /// Joint label `(n, k)`: `h1` level and position inside it.
    pub labels: [usize; 2],
    /// Occupation numbers of the dominant basis state.
    pub basis: Vec<usize>,
    pub eps1: f64,
    pub nu: f64,
    pub eps2: f64,
    pub eps2_oracle: Option<f64>,
    pub in_safe_margin: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema_version: u32,
    pub scenario: String,
    pub params: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub eigen_table: Vec<EigenRow>,
    pub errata: Vec<Erratum>,
    pub overall_pass: bool,
}

impl CheckReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn params_map(cfg: &ResolvedConfig) -> BTreeMap<String, Value> {
    let mut map = BTreeMap::new();
    for p in cfg.scenario.params() {
        let v = match p {
            Param::Dim => Value::from(cfg.dim),
            Param::K => Value::from(cfg.model.k),
            Param::Q => Value::from(cfg.model.q),
            Param::Epsilon => Value::from(cfg.epsilon),
            Param::Seed => Value::from(cfg.seed),
            Param::HbarOmega => Value::from(cfg.model.hbar_omega),
        };
        map.insert(p.key().to_string(), v);
    }
    map.insert("residual_tol".into(), Value::from(cfg.tol.residual_tol));
    map.insert("rank_tol".into(), Value::from(cfg.tol.rank_tol));
    map.insert("cluster_tol".into(), Value::from(cfg.tol.cluster_tol));
    map
}

fn error_check(stage: &str, e: &Error) -> Check {
    Check::new(format!("pipeline.{stage}"), f64::INFINITY, 0.0).with_note(e.to_string())
}

fn prefixed<'a>(prefix: &'a str, checks: &'a [Check]) -> impl Iterator<Item = Check> + 'a {
    checks.iter().map(move |c| {
        let mut c = c.clone();
        c.name = format!("{prefix}.{}", c.name);
        c
    })
}

fn hermitian_table(model: &ModelInstance, r: &TransformResult) -> Vec<EigenRow> {
    let h2 = &r.ops.h2;
    (0..r.f1.len())
        .map(|i| {
            let basis = model.space.label_of(dominant_index(&r.f1.vector(i)));
            let eps2 = match r.f2.source.iter().position(|&s| s == i) {
                Some(j) => {
                    let v = r.f2.vector(j);
                    (v.dotc(&h2.mul_vec(&v)) / v.dotc(&v)).re
                }
                None => r.f1.eps1[i] * r.f1.nu[i],
            };
            EigenRow {
                labels: [r.f1.labels[i].n, r.f1.labels[i].k],
                eps2_oracle: model.oracle.map(|o| o.eval(&basis).eps2),
                in_safe_margin: model.in_safe_margin(&basis),
                basis,
                eps1: r.f1.eps1[i],
                nu: r.f1.nu[i],
                eps2,
            }
        })
        .collect()
}

fn crypto_table(
    model: &ModelInstance,
    g1: &CryptoFamily,
    core: &LevelTwoCore,
    theta: &CMat,
) -> Vec<EigenRow> {
    (0..g1.len())
        .map(|i| {
            let basis = model.space.label_of(dominant_index(&g1.phi.column(i)));
            let eps2 = match core.source.iter().position(|&s| s == i) {
                Some(j) => {
                    let v = core.big_phi.column(j);
                    let tv = theta.mul_vec(&v);
                    let z: C64 = tv.dotc(&core.h2.mul_vec(&v)) / tv.dotc(&v);
                    z.re
                }
                None => g1.eps[i] * g1.nu[i],
            };
            EigenRow {
                labels: [g1.labels[i].n, g1.labels[i].k],
                eps2_oracle: model.oracle.map(|o| o.eval(&basis).eps2),
                in_safe_margin: model.in_safe_margin(&basis),
                basis,
                eps1: g1.eps[i],
                nu: g1.nu[i],
                eps2,
            }
        })
        .collect()
}

fn model_errata(model: &ModelInstance, cfg: &ResolvedConfig) -> Vec<Erratum> {
    let mut out = Vec::new();
    match model.kind {
        ModelKind::Quon => {
            if let Ok(e) = errata::quon_recurrence(cfg.dim, cfg.model.q) {
                out.push(e);
            }
        }
        ModelKind::LandauA => out.extend(errata::landau_a_index_order(model)),
        _ => {}
    }
    out
}

/// Runs one scenario. Invalid parameters are errors; pipeline failures are
/// reported as failing checks.
pub fn run_scenario(cfg: &RunConfig) -> Result<CheckReport> {
    let cfg = cfg.resolve()?;
    let model = make_model(cfg.scenario.base_kind(), cfg.dim, cfg.model)?;
    let mut checks = Vec::new();
    let mut table = Vec::new();
    let mut errata = model_errata(&model, &cfg);

    if cfg.scenario.is_crypto() {
        run_crypto(&model, &cfg, &mut checks, &mut table, &mut errata);
    } else {
        match transform(&model, &cfg.tol) {
            Ok(r) => {
                table = hermitian_table(&model, &r);
                checks = r.checks;
            }
            Err(e) => checks.push(error_check("transform", &e)),
        }
    }

    Ok(CheckReport {
        schema_version: SCHEMA_VERSION,
        scenario: cfg.scenario.name().to_string(),
        params: params_map(&cfg),
        overall_pass: all_pass(&checks),
        checks,
        eigen_table: table,
        errata,
    })
}

fn run_crypto(
    model: &ModelInstance,
    cfg: &ResolvedConfig,
    checks: &mut Vec<Check>,
    table: &mut Vec<EigenRow>,
    errata: &mut Vec<Erratum>,
) {
    let tol = &cfg.tol;
    match transform(model, tol) {
        Ok(r) => checks.extend(prefixed("base", &r.checks)),
        Err(e) => checks.push(error_check("base", &e)),
    }
    let sc = match make_crypto_scenario(model, cfg.epsilon, cfg.seed, tol) {
        Ok(sc) => sc,
        Err(e) => return checks.push(error_check("scenario", &e)),
    };
    let m = &sc.metric;
    checks.push(
        Check::new(
            "scenario.H1_crypto_hermitian",
            is_crypto_hermitian(&sc.h1, m, tol).1,
            tol.residual_tol,
        )
        .with_note(format!("metric condition number {:.6e}", m.condition())),
    );

    let n1 = match sc.n1() {
        Ok(n1) => n1,
        Err(e) => return checks.push(error_check("scenario", &e)),
    };
    let g1 = match build_g1(&sc.h1, &n1, m, tol) {
        Ok(g) => g,
        Err(e) => return checks.push(error_check("g1", &e)),
    };
    checks.extend(g1.checks.iter().cloned());

    let core = match level_two_core(&sc.h1, &sc.x, &g1, m, tol) {
        Ok(c) => c,
        Err(e) => return checks.push(error_check("g2", &e)),
    };
    checks.extend(core.checks.iter().cloned());
    *table = crypto_table(model, &g1, &core, &m.theta);
    errata.push(errata::frame_closed_form(&core));

    let f2_rank = if core.big_phi.cols() == 0 {
        0
    } else {
        rank_of(&core.big_phi, tol)
    };
    let dim = sc.x.cols();
    checks.push(
        Check::new(
            "g2.rank_sum",
            (f2_rank + core.kernel_dim).abs_diff(dim) as f64,
            0.0,
        )
        .with_note(format!(
            "kernel_dim = {}, f2_rank = {f2_rank}, space_dim = {dim}",
            core.kernel_dim
        )),
    );
    let kernel_consistent = match build_g2(&sc.h1, &sc.x, m, tol) {
        Err(Error::KernelCondition { kernel_dim }) => kernel_dim == core.kernel_dim,
        Ok(_) => core.kernel_dim == 0,
        Err(_) => false,
    };
    checks.push(
        Check::new(
            "g2.kernel_condition",
            if kernel_consistent { 0.0 } else { 1.0 },
            0.0,
        )
        .with_note(if core.kernel_dim == 0 {
            "level-two family complete".to_string()
        } else {
            format!(
                "level-two family incomplete: dim ker(X Theta^-1) = {}",
                core.kernel_dim
            )
        }),
    );
    checks.push(Check::new(
        "intertwine.level1",
        crate::crypto::intertwining_residual(&g1.s_phi, &g1.hamiltonian),
        tol.residual_tol,
    ));

    // The complete level-two family lives on the invertible periodic companion of x.
    let companion = model
        .periodic_companion()
        .ok_or_else(|| Error::InvalidParameter("model has no periodic companion".into()))
        .and_then(|xp| sc.dress_operator(&xp))
        .and_then(|xp| build_g2_full(&sc.h1, &xp, m, tol));
    match companion {
        Ok(b) => {
            checks.extend(prefixed("companion", &b.g1.checks));
            checks.extend(prefixed("companion", &b.family.checks));
            checks.extend(prefixed(
                "companion",
                &intertwining_checks(&b.g1, &b.family, tol),
            ));
            match errata::phi2_definition(&b.g1, &b.family, tol) {
                Ok(e) => errata.push(e),
                Err(e) => checks.push(error_check("companion.errata", &e)),
            }
            errata.push(errata::frame_closed_form(&b.core));
            if let Some(last) = errata.last_mut() {
                last.id = "level2-frame-closed-form-companion".into();
            }
        }
        Err(e) => checks.push(error_check("companion", &e)),
    }

    match degeneration_residual(model, cfg.seed, tol) {
        Ok(r) => checks.push(
            Check::new("degeneration.epsilon_zero", r, DEGENERATION_TOL)
                .with_note("epsilon = 0 against the hermitian pipeline, entry-wise"),
        ),
        Err(e) => checks.push(error_check("degeneration", &e)),
    }
}

#[derive(Serialize)]
struct CsvRow {
    labels: String,
    eps1: f64,
    nu: f64,
    eps2: f64,
    eps2_oracle: Option<f64>,
    in_safe_margin: bool,
}

fn label_text(row: &EigenRow) -> String {
    format!("{}:{}", row.labels[0], row.labels[1])
}

/// Renders a report; the JSON form uses shortest round-trip decimals.
pub fn render(report: &CheckReport, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
            out.push(b'\n');
            out
        }
        Format::Markdown => render_markdown(report).into_bytes(),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &report.eigen_table {
                w.serialize(CsvRow {
                    labels: label_text(row),
                    eps1: row.eps1,
                    nu: row.nu,
                    eps2: row.eps2,
                    eps2_oracle: row.eps2_oracle,
                    in_safe_margin: row.in_safe_margin,
                })
                .expect("in-memory csv write");
            }
            if report.eigen_table.is_empty() {
                w.write_record(["labels", "eps1", "nu", "eps2", "eps2_oracle", "in_safe_margin"])
                    .expect("in-memory csv write");
            }
            w.into_inner().expect("in-memory csv flush")
        }
    }
}

fn render_markdown(r: &CheckReport) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let verdict = if r.overall_pass { "PASS" } else { "FAIL" };
    let _ = writeln!(s, "# {} ({verdict})\n", r.scenario);
    let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k} = {v}")).collect();
    let _ = writeln!(s, "{}\n", params.join(", "));

    let _ = writeln!(s, "## Checks\n");
    let _ = writeln!(s, "| check | residual | tolerance | pass | note |");
    let _ = writeln!(s, "|---|---|---|---|---|");
    for c in &r.checks {
        let _ = writeln!(
            s,
            "| {} | {:e} | {:e} | {} | {} |",
            c.name,
            c.residual,
            c.tolerance,
            if c.pass { "yes" } else { "no" },
            c.note.replace('|', "/")
        );
    }

    let _ = writeln!(s, "\n## Eigenvalues\n");
    let _ = writeln!(s, "| labels | basis | eps1 | nu | eps2 | eps2_oracle | in_safe_margin |");
    let _ = writeln!(s, "|---|---|---|---|---|---|---|");
    for row in &r.eigen_table {
        let basis: Vec<String> = row.basis.iter().map(|b| b.to_string()).collect();
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} | {} |",
            label_text(row),
            basis.join(","),
            row.eps1,
            row.nu,
            row.eps2,
            row.eps2_oracle.map_or_else(String::new, |v| v.to_string()),
            row.in_safe_margin
        );
    }

    if !r.errata.is_empty() {
        let _ = writeln!(s, "\n## Errata\n");
        let _ = writeln!(s, "| id | stated residual | adopted residual | description |");
        let _ = writeln!(s, "|---|---|---|---|");
        for e in &r.errata {
            let _ = writeln!(
                s,
                "| {} | {:e} | {:e} | {} |",
                e.id, e.stated_form_residual, e.adopted_form_residual, e.description
            );
        }
    }
    s
}

/// Runs scenarios concurrently; results come back in input order.
pub fn run_many(configs: &[RunConfig]) -> Vec<Result<CheckReport>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|cfg| scope.spawn(move || run_scenario(cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario thread panicked"))
            .collect()
    })
}

/// Default-parameter configs for every catalogue entry.
pub fn catalogue_configs() -> Vec<RunConfig> {
    Scenario::ALL.into_iter().map(RunConfig::new).collect()
}

/// Relative gap between two eigenvalue tables, `INFINITY` on shape mismatch.
pub fn table_gap(a: &[EigenRow], b: &[EigenRow]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            [
                rel((x.eps1 - y.eps1).abs(), y.eps1.abs().max(1.0)),
                rel((x.nu - y.nu).abs(), y.nu.abs().max(1.0)),
                rel((x.eps2 - y.eps2).abs(), y.eps2.abs().max(1.0)),
            ]
            .into_iter()
            .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}
