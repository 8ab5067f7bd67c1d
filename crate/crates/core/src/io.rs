//! Run configuration and tabular output.
//!
//! A configuration document is one JSON object:
//!
//! ```json
//! {
//!   "sequence": "fid",
//!   "equal": { "n": 2, "A": 1.0, "omega": 0.5 },
//!   "beta": 0.01,
//!   "sweep": { "variable": "time", "start": 0, "stop": 10, "steps": 101 },
//!   "format": "csv",
//!   "out": "fid.csv"
//! }
//! ```
//!
//! `bath` (a list of `{"A_x": .., "omega": ..}`) may replace `equal`; exactly
//! one of the two must be present. Command-line flags override the file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{ExperimentConfig, NuclearSpinParam, SequenceKind, SpinBath, DEFAULT_BETA};
use crate::sweep::{BathTemplate, SweepGrid, SweepRecord, SweepVariable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::config(
                "format",
                format!("unknown format `{other}` (expected csv or json)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EqualSpec {
    pub n: usize,
    #[serde(rename = "A", alias = "A_x")]
    pub a_x: f64,
    #[serde(default)]
    pub omega: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: Option<String>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub steps: Option<usize>,
}

/// Configuration as written, before defaults and validation.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub sequence: Option<String>,
    pub bath: Option<Vec<NuclearSpinParam>>,
    pub equal: Option<EqualSpec>,
    #[serde(alias = "beta_S")]
    pub beta: Option<f64>,
    pub sweep: Option<SweepSpec>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub sequence: Option<String>,
    pub bath: Option<Vec<NuclearSpinParam>>,
    pub equal: Option<EqualSpec>,
    pub beta: Option<f64>,
    pub variable: Option<String>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sequence: SequenceKind,
    pub bath: BathTemplate,
    pub beta_s: f64,
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn grid(&self) -> SweepGrid {
        SweepGrid {
            variable: self.variable,
            start: self.start,
            stop: self.stop,
            steps: self.steps,
            sequence: self.sequence,
            bath: self.bath.clone(),
        }
    }

    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            beta_s: self.beta_s,
        }
    }
}

/// Default `(start, stop, steps)` for each sweep variable.
pub fn default_range(variable: SweepVariable) -> (f64, f64, usize) {
    match variable {
        SweepVariable::Time => (0.0, 10.0, 101),
        SweepVariable::FieldRatio => (0.0, 4.0, 401),
        SweepVariable::VParameter => (0.0, 2.0, 201),
    }
}

impl RawConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." {
                "<root>".to_string()
            } else {
                path
            };
            Error::config(path, e.inner().to_string())
        })
    }

    pub fn apply(&mut self, ov: ConfigOverrides) -> Result<()> {
        if ov.bath.is_some() && ov.equal.is_some() {
            return Err(Error::config(
                "bath",
                "--bath and --equal both given; use exactly one bath source",
            ));
        }
        if ov.bath.is_some() || ov.equal.is_some() {
            self.bath = ov.bath;
            self.equal = ov.equal;
        }
        let sweep = self.sweep.get_or_insert_with(SweepSpec::default);
        if let Some(v) = ov.variable {
            let same = match &sweep.variable {
                Some(f) => f.parse::<SweepVariable>().ok() == v.parse::<SweepVariable>().ok(),
                None => false,
            };
            if !same {
                // a different variable makes the file's range meaningless
                if ov.start.is_none() && ov.stop.is_none() && ov.steps.is_none() {
                    *sweep = SweepSpec::default();
                }
            }
            sweep.variable = Some(v);
        }
        sweep.start = ov.start.or(sweep.start);
        sweep.stop = ov.stop.or(sweep.stop);
        sweep.steps = ov.steps.or(sweep.steps);
        self.sequence = ov.sequence.or(self.sequence.take());
        self.beta = ov.beta.or(self.beta);
        self.out = ov.out.or(self.out.take());
        self.format = ov.format.or(self.format.take());
        Ok(())
    }

    pub fn validate(&self) -> Result<RunConfig> {
        let sequence = match &self.sequence {
            Some(s) => s.parse::<SequenceKind>().map_err(|_| {
                Error::config(
                    "sequence",
                    format!("unknown sequence `{s}` (expected fid or echo)"),
                )
            })?,
            None => SequenceKind::Fid,
        };

        let bath = match (&self.bath, &self.equal) {
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "bath",
                    "both `bath` and `equal` are given; use exactly one bath source",
                ))
            }
            (None, None) => {
                return Err(Error::config(
                    "bath",
                    "no bath given; set `bath` or `equal`",
                ))
            }
            (Some(list), None) => {
                for (i, spin) in list.iter().enumerate() {
                    spin.validate()
                        .map_err(|e| Error::config(format!("bath[{i}]"), e.to_string()))?;
                }
                BathTemplate::Explicit(
                    SpinBath::new(list.clone())
                        .map_err(|e| Error::config("bath", e.to_string()))?,
                )
            }
            (None, Some(eq)) => {
                if !eq.a_x.is_finite() {
                    return Err(Error::config("equal.A", "must be finite"));
                }
                if !eq.omega.is_finite() {
                    return Err(Error::config("equal.omega", "must be finite"));
                }
                BathTemplate::EqualCoupling {
                    n: eq.n,
                    a_x: eq.a_x,
                    omega: eq.omega,
                }
            }
        };

        let beta_s = self.beta.unwrap_or(DEFAULT_BETA);
        if !(beta_s.is_finite() && beta_s > 0.0 && beta_s < 2.0) {
            return Err(Error::config(
                "beta",
                format!("must lie in (0, 2), got {beta_s}"),
            ));
        }

        let spec = self.sweep.clone().unwrap_or_default();
        let variable = match &spec.variable {
            Some(v) => v
                .parse::<SweepVariable>()
                .map_err(|e| Error::config("sweep.variable", e.to_string()))?,
            None => SweepVariable::Time,
        };
        let (d_start, d_stop, d_steps) = default_range(variable);
        let start = spec.start.unwrap_or(d_start);
        let stop = spec.stop.unwrap_or(d_stop);
        let steps = spec.steps.unwrap_or(d_steps);
        if !start.is_finite() {
            return Err(Error::config("sweep.start", "must be finite"));
        }
        if !stop.is_finite() {
            return Err(Error::config("sweep.stop", "must be finite"));
        }
        if start != stop && steps < 2 {
            return Err(Error::config("sweep.steps", "steps must be ≥ 2"));
        }
        if start == stop && steps != 1 {
            return Err(Error::config(
                "sweep.steps",
                "a single-point sweep (start == stop) needs steps = 1",
            ));
        }
        if start > stop {
            return Err(Error::config(
                "sweep.stop",
                format!("stop ({stop}) is below start ({start})"),
            ));
        }
        let format = match &self.format {
            Some(f) => f.parse::<OutputFormat>()?,
            None => OutputFormat::Csv,
        };

        let cfg = RunConfig {
            sequence,
            bath,
            beta_s,
            variable,
            start,
            stop,
            steps,
            out: self.out.clone(),
            format,
        };
        cfg.grid()
            .validate()
            .map_err(|e| Error::config("sweep", e.to_string()))?;
        Ok(cfg)
    }
}

/// Parse and validate a configuration document, applying defaults.
pub fn parse_config(source: &str) -> Result<RunConfig> {
    RawConfig::from_json(source)?.validate()
}

/// Read a bath file: a JSON list of `{"A_x": .., "omega": ..}` objects.
pub fn load_bath(path: &Path) -> Result<Vec<NuclearSpinParam>> {
    let text = fs::read_to_string(path)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| Error::config(format!("bath{}", e.path()), e.inner().to_string()))
}

/// Shortest decimal form that parses back to the same `f64`.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub const RECORD_COLUMNS: [&str; 11] = [
    "x", "g", "K", "phi_opt", "I_red", "C_red", "D_red", "ratio", "I_abs", "C_abs", "D_abs",
];

fn record_values(r: &SweepRecord) -> [f64; 11] {
    let p = &r.point;
    [
        r.x, p.g, p.k, p.phi_opt, p.i_red, p.c_red, p.d_red, p.ratio, p.i_abs, p.c_abs, p.d_abs,
    ]
}

fn header(n_spins: usize) -> Vec<String> {
    RECORD_COLUMNS
        .iter()
        .map(|s| s.to_string())
        .chain((1..=n_spins).map(|j| format!("v_{j}")))
        .collect()
}

fn spin_count(records: &[SweepRecord]) -> Result<usize> {
    let first = records
        .first()
        .ok_or_else(|| Error::InvalidParameter("no records to emit".into()))?;
    Ok(first.v.len())
}

fn write_table<I>(header: &[String], rows: I) -> Result<String>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.into_iter().map(format_number))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("ASCII output"))
}

/// CSV with one header row, LF line endings, and round-trip exact numbers.
pub fn records_to_csv(records: &[SweepRecord]) -> Result<String> {
    let n = spin_count(records)?;
    write_table(
        &header(n),
        records
            .iter()
            .map(|r| record_values(r).iter().chain(&r.v).copied().collect()),
    )
}

/// JSON array of flat objects keyed like the CSV header.
pub fn records_to_json(records: &[SweepRecord]) -> Result<String> {
    let n = spin_count(records)?;
    let keys = header(n);
    let rows: Vec<serde_json::Value> = records
        .iter()
        .map(|r| {
            let obj: serde_json::Map<String, serde_json::Value> = keys
                .iter()
                .cloned()
                .zip(
                    record_values(r)
                        .iter()
                        .chain(r.v.iter())
                        .map(|&x| serde_json::json!(x)),
                )
                .collect();
            serde_json::Value::Object(obj)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("finite numbers serialize");
    s.push('\n');
    Ok(s)
}

/// Signal-only table: `x,g,v_1..v_n`.
pub fn signal_to_csv(records: &[SweepRecord]) -> Result<String> {
    let n = spin_count(records)?;
    let mut head = vec!["x".to_string(), "g".to_string()];
    head.extend((1..=n).map(|j| format!("v_{j}")));
    write_table(
        &head,
        records
            .iter()
            .map(|r| [r.x, r.point.g].iter().chain(&r.v).copied().collect()),
    )
}

/// Signal-only JSON: objects with keys `x`, `g`, `v_1..v_n`.
pub fn signal_to_json(records: &[SweepRecord]) -> Result<String> {
    let n = spin_count(records)?;
    let rows: Vec<serde_json::Value> = records
        .iter()
        .map(|r| {
            let mut obj = serde_json::Map::new();
            obj.insert("x".into(), serde_json::json!(r.x));
            obj.insert("g".into(), serde_json::json!(r.point.g));
            for (j, &v) in r.v.iter().enumerate().take(n) {
                obj.insert(format!("v_{}", j + 1), serde_json::json!(v));
            }
            serde_json::Value::Object(obj)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("finite numbers serialize");
    s.push('\n');
    Ok(s)
}

pub fn render_signal(records: &[SweepRecord], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => signal_to_csv(records),
        OutputFormat::Json => signal_to_json(records),
    }
}

pub fn render_records(records: &[SweepRecord], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => records_to_csv(records),
        OutputFormat::Json => records_to_json(records),
    }
}

/// Write records to `path`, or to standard output when `path` is `None`.
pub fn emit_records(
    records: &[SweepRecord],
    format: OutputFormat,
    path: Option<&Path>,
) -> Result<()> {
    let text = render_records(records, format)?;
    write_output(&text, path)
}

pub fn write_output(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            match lock.write_all(text.as_bytes()).and_then(|_| lock.flush()) {
                // reader closed early (`| head`), not an error
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                r => r?,
            }
        }
    }
    Ok(())
}

/// Parse a numeric CSV produced by [`records_to_csv`] into its header and
/// rows.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers()?.iter().map(str::to_string).collect();
    let rows = reader
        .records()
        .enumerate()
        .map(|(i, rec)| {
            rec?.iter()
                .map(|f| {
                    f.parse::<f64>().map_err(|_| {
                        Error::InvalidParameter(format!("row {}: `{f}` is not a number", i + 1))
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((header, rows))
}
