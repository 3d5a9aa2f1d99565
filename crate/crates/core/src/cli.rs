//! Command-line front end.
//!
//! Every subcommand reads a [`RunConfig`], assembled from an optional JSON
//! file (`--config`) with command-line flags taking precedence, and writes a
//! table as CSV or JSON.
//!
//! State descriptors are accepted either as compact strings
//!
//! ```text
//! fock:N   coherent:RE[,IM]   sqvac:S   mix:N1@P1,N2@P2,...
//! ```
//!
//! or, in the config file, as tagged objects:
//!
//! ```json
//! {"kind": "fock", "n": 1}
//! {"kind": "coherent", "re": 2.12928, "im": 0.0}
//! {"kind": "squeezed_vacuum", "s": 1.5}
//! {"kind": "fock_mixture", "weights": [{"n": 0, "p": 0.5}, {"n": 1, "p": 0.5}]}
//! ```
//!
//! Config file keys match the long flag names with `_` in place of `-`
//! (`delta_grid`, `identity_channel`, ...), plus `command`, `quadrature` and
//! `diff` objects for the numerical settings. Grids are either `"a:b:n"`
//! (inclusive linspace), a comma list, or a JSON array.
//!
//! CSV output starts with a `# cvteleport <version> config=<hash>` line; the
//! hash covers the resolved config minus output path, format and job count.
//! Floats are written in shortest round-trip form. On failure the process
//! exits with status 1 and prints `{"error": {"kind": ..., "message": ...}}`
//! on stderr.

use crate::channel::{teleport, OutputState};
use crate::error::{Error, Result};
use crate::moments::{moment_set_with, transfer_moment_set, DerivativeRoute, MomentSet};
use crate::numerics::diff::DiffConfig;
use crate::numerics::quadrature::QuadratureConfig;
use crate::optimize::{
    closed_form_delta, minimize_delta, sweep_r, ClosedFormKind, Objective, ObjectiveKind, TransferRoute,
};
use crate::phasespace::PhasePoint;
use crate::photonstats::{check_fock_equivalence, output_photon_probs, ReferenceInput};
use crate::states::{input_charfn, Channel, InputState, SqueezedBellResource};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Moments,
    PhotonStats,
    Compare,
    Optimize,
    Sweep,
    TransferSurface,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Evaluation route for transfer-function quantities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RouteName {
    Printed,
    #[default]
    Derivative,
    FiniteDifference,
}

/// Ordered list of values; parses `a:b:n`, `x,y,z` or a JSON array.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| -> Result<f64> {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad number {t:?} in grid {s:?}")))
        };
        let parts: Vec<&str> = s.split(':').collect();
        let values = match parts.as_slice() {
            [a, b, n] => {
                let (a, b) = (num(a)?, num(b)?);
                let n: usize = n
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad point count in grid {s:?}")))?;
                match n {
                    0 => Vec::new(),
                    1 => vec![a],
                    _ => (0..n)
                        .map(|i| {
                            if i == n - 1 {
                                b
                            } else {
                                a + (b - a) * i as f64 / (n - 1) as f64
                            }
                        })
                        .collect(),
                }
            }
            [list] => list
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(num)
                .collect::<Result<_>>()?,
            _ => return Err(Error::invalid(format!("grid {s:?} is neither a:b:n nor a comma list"))),
        };
        let g = Grid(values);
        g.validate("grid")?;
        Ok(g)
    }
}

impl Grid {
    fn validate(&self, what: &str) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::invalid(format!("{what} is empty")));
        }
        if let Some(v) = self.0.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("{what} contains {v}")));
        }
        Ok(())
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            List(Vec<f64>),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::List(v) => Ok(Grid(v)),
        }
    }
}

fn deserialize_input<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<InputState>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Text(String),
        Descriptor(InputState),
    }
    match Option::<Raw>::deserialize(d)? {
        None => Ok(None),
        Some(Raw::Text(s)) => s.parse().map(Some).map_err(serde::de::Error::custom),
        Some(Raw::Descriptor(st)) => Ok(Some(st)),
    }
}

/// Fully resolved run description.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    #[serde(deserialize_with = "deserialize_input")]
    pub input: Option<InputState>,
    pub identity_channel: bool,
    pub delta: Option<f64>,
    pub delta_grid: Option<Grid>,
    pub theta: Option<f64>,
    pub r: Option<f64>,
    pub r_grid: Option<Grid>,
    pub gain: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub kind: Option<ObjectiveKind>,
    pub kinds: Option<Vec<ObjectiveKind>>,
    pub closed_form: Option<ClosedFormKind>,
    pub s: Option<f64>,
    pub interval: Option<[f64; 2]>,
    pub route: Option<RouteName>,
    pub extent: Option<f64>,
    pub points: Option<usize>,
    pub quadrature: QuadratureConfig,
    pub diff: DiffConfig,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))
    }

    /// Hex SHA-256 prefix of the settings that determine the numbers.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        c.format = None;
        c.jobs = None;
        let text = serde_json::to_string(&c).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.command.is_none() {
            return Err(Error::invalid("no command given (flag or config \"command\")"));
        }
        if let Some(s) = &self.input {
            s.validate()?;
        }
        if let Some(d) = self.delta {
            if !(0.0..=1.0).contains(&d) {
                return Err(Error::invalid(format!("delta = {d} outside [0, 1]")));
            }
        }
        if let Some(g) = &self.delta_grid {
            g.validate("delta grid")?;
            if let Some(d) = g.0.iter().find(|d| !(0.0..=1.0).contains(*d)) {
                return Err(Error::invalid(format!("delta grid value {d} outside [0, 1]")));
            }
        }
        if let Some(g) = &self.r_grid {
            g.validate("r grid")?;
        }
        if let Some(k) = &self.kinds {
            if k.is_empty() {
                return Err(Error::invalid("kind list is empty"));
            }
        }
        if self.jobs == Some(0) {
            return Err(Error::invalid("jobs must be at least 1"));
        }
        if let Some(p) = self.points {
            if p < 2 {
                return Err(Error::invalid("points must be at least 2"));
            }
        }
        self.quadrature.validate()?;
        self.diff.validate()?;
        Ok(())
    }

    fn theta(&self) -> f64 {
        self.theta.unwrap_or(0.0)
    }

    fn gain(&self) -> f64 {
        self.gain.unwrap_or(1.0)
    }

    fn photon_cutoff(&self) -> usize {
        self.n.unwrap_or(24)
    }

    fn need_input(&self) -> Result<&InputState> {
        self.input.as_ref().ok_or_else(|| Error::invalid("--input is required"))
    }

    fn need_r(&self) -> Result<f64> {
        self.r.ok_or_else(|| Error::invalid("--r is required"))
    }

    fn channel(&self, delta: f64) -> Result<Channel> {
        Channel::new(
            SqueezedBellResource::new(delta, self.theta(), self.need_r()?)?,
            self.gain(),
        )
    }

    fn single_channel(&self) -> Result<Channel> {
        self.channel(self.delta.ok_or_else(|| Error::invalid("--delta is required"))?)
    }

    fn derivative_route(&self) -> DerivativeRoute {
        match self.route.unwrap_or_default() {
            RouteName::FiniteDifference => DerivativeRoute::FiniteDifference(self.diff),
            _ => DerivativeRoute::Auto,
        }
    }

    fn transfer_route(&self) -> TransferRoute {
        match self.route.unwrap_or_default() {
            RouteName::Printed => TransferRoute::Printed,
            RouteName::Derivative => TransferRoute::ClosedFormDerivative,
            RouteName::FiniteDifference => TransferRoute::FiniteDifference(self.diff),
        }
    }

    fn objective(&self, kind: ObjectiveKind, r: f64) -> Objective {
        let mut obj = Objective::new(kind, r)
            .with_theta(self.theta())
            .with_gain(self.gain())
            .with_route(self.transfer_route())
            .with_photon_cutoff(self.photon_cutoff())
            .with_quadrature(self.quadrature);
        if let Some([lo, hi]) = self.interval {
            obj = obj.with_interval(lo, hi);
        }
        if let Some(input) = &self.input {
            obj = obj.with_input(input.clone());
        }
        obj
    }
}

/// One table cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Missing,
}

impl Value {
    fn csv_text(&self) -> String {
        match self {
            Value::Num(v) => format!("{v:?}"),
            Value::Int(v) => v.to_string(),
            Value::Text(s) => s.clone(),
            Value::Bool(b) => b.to_string(),
            Value::Missing => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Value::Num(v) => {
                serde_json::Number::from_f64(*v).map_or(serde_json::Value::Null, serde_json::Value::Number)
            }
            Value::Int(v) => (*v).into(),
            Value::Text(s) => s.clone().into(),
            Value::Bool(b) => (*b).into(),
            Value::Missing => serde_json::Value::Null,
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<Option<f64>> for Value {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Value::Missing, Value::Num)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn to_csv(&self, provenance: &str) -> Result<String> {
        let mut buf = format!("# {provenance}\n").into_bytes();
        {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut buf);
            let io = |e: csv::Error| Error::Io(e.to_string());
            w.write_record(&self.columns).map_err(io)?;
            for row in &self.rows {
                w.write_record(row.iter().map(Value::csv_text)).map_err(io)?;
            }
            w.flush()?;
        }
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("json output");
        s.push('\n');
        s
    }
}

const MOMENT_COLUMNS: [&str; 16] = [
    "source",
    "x_mean",
    "p_mean",
    "x2_central",
    "p2_central",
    "cov_xp",
    "mu3_x",
    "mu3_p",
    "mu4_x",
    "mu4_p",
    "kappa4_x",
    "kappa4_p",
    "n_mean",
    "g2_zero",
    "is_state",
    "label",
];

fn moment_row(source: &str, m: &MomentSet, label: String) -> Vec<Value> {
    vec![
        source.into(),
        m.x_mean.into(),
        m.p_mean.into(),
        m.x2_central.into(),
        m.p2_central.into(),
        m.cov_xp.into(),
        m.mu3_x.into(),
        m.mu3_p.into(),
        m.mu4_x.into(),
        m.mu4_p.into(),
        m.kappa4_x.into(),
        m.kappa4_p.into(),
        m.n_mean.into(),
        m.g2_zero.into(),
        m.is_state.into(),
        label.into(),
    ]
}

fn run_moments(cfg: &RunConfig) -> Result<Table> {
    let input = cfg.need_input()?;
    let route = cfg.derivative_route();
    let mut t = Table::new(&MOMENT_COLUMNS);
    let m_in = moment_set_with(&input_charfn(input)?, route)?;
    t.push(moment_row("input", &m_in, input.to_string()));
    if !cfg.identity_channel {
        let ch = cfg.single_channel()?;
        let desc = format!(
            "delta={:?} theta={:?} r={:?} g={:?}",
            ch.resource.delta, ch.resource.theta, ch.resource.r, ch.gain
        );
        t.push(moment_row("transfer", &transfer_moment_set(&ch, route)?, desc.clone()));
        let out = teleport(input, &ch)?;
        t.push(moment_row("output", &moment_set_with(&out.charfn, route)?, desc));
    }
    Ok(t)
}

fn run_photon_stats(cfg: &RunConfig) -> Result<Table> {
    let input = cfg.need_input()?;
    let n = cfg.photon_cutoff();
    let out = if cfg.identity_channel {
        OutputState::identity(input)?
    } else {
        teleport(input, &cfg.single_channel()?)?
    };
    let reference = ReferenceInput::new(input, n, &cfg.quadrature)?;
    let p_out = output_photon_probs(&out, n, &cfg.quadrature)?;
    let mut t = Table::new(&["n", "P_in", "P_out"]);
    for k in 0..=n {
        t.push(vec![
            k.into(),
            reference.distribution.probs[k].into(),
            p_out.probs[k].into(),
        ]);
    }
    Ok(t)
}

fn run_compare(cfg: &RunConfig) -> Result<Table> {
    let input = cfg.need_input()?;
    let grid = cfg
        .delta_grid
        .as_ref()
        .ok_or_else(|| Error::invalid("--delta-grid is required"))?;
    let reference = ReferenceInput::new(input, cfg.photon_cutoff(), &cfg.quadrature)?;
    let rows: Vec<Vec<Value>> = grid
        .0
        .par_iter()
        .map(|&delta| {
            let measured = cfg
                .channel(delta)
                .and_then(|ch| teleport(input, &ch))
                .and_then(|out| reference.measures(&out, &cfg.quadrature));
            match measured {
                Ok((m, _)) => {
                    let status = match check_fock_equivalence(input, &m) {
                        Ok(()) => "ok".to_string(),
                        Err(e) => format!("{}: {e}", e.kind()),
                    };
                    vec![
                        delta.into(),
                        m.d_n.into(),
                        m.fidelity.into(),
                        (1.0 - m.fidelity).into(),
                        m.frobenius.into(),
                        m.purity_out.into(),
                        status.into(),
                    ]
                }
                Err(e) => {
                    let mut row = vec![delta.into()];
                    row.extend(std::iter::repeat_n(Value::Missing, 5));
                    row.push(format!("{}: {e}", e.kind()).into());
                    row
                }
            }
        })
        .collect();
    let mut t = Table::new(&[
        "delta",
        "d_n",
        "fidelity",
        "one_minus_fidelity",
        "frobenius",
        "purity_out",
        "status",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

fn run_optimize(cfg: &RunConfig) -> Result<Table> {
    let r = cfg.need_r()?;
    if let Some(kind) = cfg.closed_form {
        let delta = closed_form_delta(kind, r, cfg.s)?;
        let mut t = Table::new(&["kind", "r", "s", "delta_star"]);
        t.push(vec![kind.name().into(), r.into(), cfg.s.into(), delta.into()]);
        return Ok(t);
    }
    let kind = cfg
        .kind
        .ok_or_else(|| Error::invalid("--kind or --closed-form is required"))?;
    let rec = minimize_delta(&cfg.objective(kind, r))?;
    let mut t = Table::new(&[
        "kind",
        "r",
        "delta_star",
        "objective_value",
        "bracket_lo",
        "bracket_hi",
        "iterations",
    ]);
    t.push(vec![
        rec.kind.name().into(),
        rec.r.into(),
        rec.delta_star.into(),
        rec.objective_value.into(),
        rec.bracket[0].into(),
        rec.bracket[1].into(),
        rec.iterations.into(),
    ]);
    Ok(t)
}

fn run_sweep(cfg: &RunConfig) -> Result<Table> {
    let kinds = match (&cfg.kinds, cfg.kind) {
        (Some(k), _) => k.clone(),
        (None, Some(k)) => vec![k],
        (None, None) => return Err(Error::invalid("--kinds is required")),
    };
    let r_grid = cfg
        .r_grid
        .as_ref()
        .ok_or_else(|| Error::invalid("--r-grid is required"))?;
    let template = cfg.objective(kinds[0], r_grid.0[0]);
    let cells = sweep_r(&template, &kinds, &r_grid.0)?;
    let mut t = Table::new(&["kind", "r", "delta_star", "objective_value", "status"]);
    for c in cells {
        let (d, v) = c
            .record
            .map_or((None, None), |rec| (Some(rec.delta_star), Some(rec.objective_value)));
        let status = c.error.unwrap_or_else(|| "ok".to_string());
        t.push(vec![
            c.kind.name().into(),
            c.r.into(),
            d.into(),
            v.into(),
            status.into(),
        ]);
    }
    Ok(t)
}

/// The four resource settings shown as transfer-function surfaces.
pub fn transfer_presets(r: f64) -> Result<Vec<(&'static str, f64)>> {
    let c2 = (2.0 * r).cosh().sqrt();
    Ok(vec![
        ("squeezed_vacuum", 1.0),
        ("photon_subtracted", r.cosh() / c2),
        ("photon_added", r.sinh() / c2),
        (
            "coherent_optimal",
            closed_form_delta(ClosedFormKind::FidelityCoherent, r, None)?,
        ),
    ])
}

fn run_transfer_surface(cfg: &RunConfig) -> Result<Table> {
    let r = cfg.r.unwrap_or(1.25);
    let extent = cfg.extent.unwrap_or(4.0);
    let points = cfg.points.unwrap_or(41);
    if !(extent.is_finite() && extent > 0.0) {
        return Err(Error::invalid(format!("extent must be positive, got {extent}")));
    }
    let axis: Vec<f64> = (0..points)
        .map(|i| {
            if i == points - 1 {
                extent
            } else {
                -extent + 2.0 * extent * i as f64 / (points - 1) as f64
            }
        })
        .collect();
    let mut t = Table::new(&["preset", "delta", "w", "z", "tau"]);
    for (name, delta) in transfer_presets(r)? {
        let ch = Channel::new(SqueezedBellResource::new(delta, cfg.theta(), r)?, cfg.gain())?;
        for &w in &axis {
            for &z in &axis {
                let u = PhasePoint::new(w, z).norm_sqr();
                t.push(vec![
                    name.into(),
                    delta.into(),
                    w.into(),
                    z.into(),
                    ch.transfer_at(u).into(),
                ]);
            }
        }
    }
    Ok(t)
}

/// Execute a resolved config on the current rayon pool.
pub fn run(cfg: &RunConfig) -> Result<Table> {
    cfg.validate()?;
    match cfg.command.expect("validated") {
        CommandKind::Moments => run_moments(cfg),
        CommandKind::PhotonStats => run_photon_stats(cfg),
        CommandKind::Compare => run_compare(cfg),
        CommandKind::Optimize => run_optimize(cfg),
        CommandKind::Sweep => run_sweep(cfg),
        CommandKind::TransferSurface => run_transfer_surface(cfg),
    }
}

/// Render a table in the configured format.
pub fn render(cfg: &RunConfig, table: &Table) -> Result<String> {
    match cfg.format.unwrap_or_default() {
        Format::Csv => table.to_csv(&format!("cvteleport {VERSION} config={}", cfg.hash())),
        Format::Json => Ok(table.to_json()),
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "cvteleport",
    version,
    about = "Teleportation output statistics and resource optimization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum Command {
    /// Moments and cumulants of input, transfer function and output.
    Moments,
    /// Photon-number probabilities of input and output.
    PhotonStats,
    /// D_N, fidelity and Frobenius distance over a delta grid.
    Compare,
    /// Optimal delta for one objective, or a printed closed form.
    Optimize,
    /// Optimal delta for several objectives over an r grid.
    Sweep,
    /// Transfer function on a (w, z) grid for the four preset resources.
    TransferSurface,
}

impl From<Command> for CommandKind {
    fn from(c: Command) -> Self {
        match c {
            Command::Moments => CommandKind::Moments,
            Command::PhotonStats => CommandKind::PhotonStats,
            Command::Compare => CommandKind::Compare,
            Command::Optimize => CommandKind::Optimize,
            Command::Sweep => CommandKind::Sweep,
            Command::TransferSurface => CommandKind::TransferSurface,
        }
    }
}

fn parse_with<T: FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_interval(s: &str) -> std::result::Result<[f64; 2], String> {
    let (a, b) = s.split_once(':').ok_or("interval must be lo:hi")?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?}"));
    Ok([num(a)?, num(b)?])
}

#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Input state: fock:N, coherent:RE[,IM], sqvac:S, mix:N@P,...
    #[arg(long, global = true, value_parser = parse_with::<InputState>)]
    pub input: Option<InputState>,
    /// Use the input itself instead of the teleported output.
    #[arg(long, global = true)]
    pub identity_channel: bool,
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// a:b:n or comma list.
    #[arg(long, global = true, value_parser = parse_with::<Grid>)]
    pub delta_grid: Option<Grid>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, global = true)]
    pub r: Option<f64>,
    #[arg(long, global = true, value_parser = parse_with::<Grid>)]
    pub r_grid: Option<Grid>,
    #[arg(long, global = true)]
    pub gain: Option<f64>,
    /// Photon-number cutoff (default 24).
    #[arg(long = "N", global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true, value_parser = parse_with::<ObjectiveKind>)]
    pub kind: Option<ObjectiveKind>,
    /// Comma-separated objective kinds.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_with::<ObjectiveKind>)]
    pub kinds: Vec<ObjectiveKind>,
    /// Evaluate a printed optimum instead of minimizing.
    #[arg(long, global = true, value_parser = parse_with::<ClosedFormKind>)]
    pub closed_form: Option<ClosedFormKind>,
    /// Input squeezing for the squeezed closed forms.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Delta search interval lo:hi.
    #[arg(long, global = true, value_parser = parse_interval)]
    pub interval: Option<[f64; 2]>,
    #[arg(long, global = true, value_enum)]
    pub route: Option<RouteName>,
    /// Half-width of the transfer-surface grid.
    #[arg(long, global = true)]
    pub extent: Option<f64>,
    /// Points per axis of the transfer-surface grid.
    #[arg(long, global = true)]
    pub points: Option<usize>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, env = "CVTELEPORT_JOBS")]
    pub jobs: Option<usize>,
}

/// Merge file config and flags.
pub fn resolve(cli: Cli) -> Result<RunConfig> {
    let f = cli.flags;
    let mut cfg = match &f.config {
        Some(path) => RunConfig::from_json(&std::fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    macro_rules! over {
        ($($field:ident),*) => { $( if f.$field.is_some() { cfg.$field = f.$field; } )* };
    }
    over!(
        input,
        delta,
        delta_grid,
        theta,
        r,
        r_grid,
        gain,
        n,
        kind,
        closed_form,
        s,
        interval,
        route,
        extent,
        points,
        output,
        format,
        jobs
    );
    if !f.kinds.is_empty() {
        cfg.kinds = Some(f.kinds);
    }
    if f.identity_channel {
        cfg.identity_channel = true;
    }
    if let Some(c) = cli.command {
        cfg.command = Some(c.into());
    }
    Ok(cfg)
}

/// Parse arguments, run, and return the rendered output.
/// With `--output` the text is also written to that file.
pub fn execute<I, T>(args: I) -> Result<String>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::invalid(e.to_string().trim_end().to_string()))?;
    let cfg = resolve(cli)?;
    cfg.validate()?;
    let table = match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(|| run(&cfg))?,
        None => run(&cfg)?,
    };
    let text = render(&cfg, &table)?;
    if let Some(path) = &cfg.output {
        std::fs::write(path, &text)?;
    }
    Ok(text)
}

/// Machine-readable error record.
pub fn error_record(e: &Error) -> String {
    serde_json::json!({"error": {"kind": e.kind(), "message": e.to_string()}}).to_string()
}

/// Binary entry point; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    // help and version go to stdout with status 0
    if let Err(e) = Cli::try_parse_from(&args) {
        if matches!(
            e.kind(),
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
        ) {
            print!("{e}");
            return 0;
        }
    }
    let to_file = args
        .iter()
        .any(|a| a == "--output" || a.to_string_lossy().starts_with("--output="));
    match execute(args) {
        Ok(text) => {
            if !to_file {
                let mut out = std::io::stdout().lock();
                if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                    return 1;
                }
            }
            0
        }
        Err(e) => {
            eprintln!("{}", error_record(&e));
            1
        }
    }
}
