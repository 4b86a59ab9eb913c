//! File formats. Complex numbers are `[re, im]` pairs everywhere; structured
//! data is JSON, signals and evaluations are CSV.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::filters::params::{BoxPoint, Factor, FilterParameters};
use crate::matrix::{CMatrix, C64};
use crate::realization::Realization;

/// Load failures, split by whether the input was unreadable or readable but
/// violating an invariant.
#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: malformed input: {reason}")]
    Format { path: String, reason: String },
    #[error("{path}: invariant violated: {source}")]
    Invariant { path: String, source: Error },
}

fn read(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn format_err(path: &Path, reason: impl ToString) -> LoadError {
    LoadError::Format {
        path: path.display().to_string(),
        reason: reason.to_string(),
    }
}

fn invariant_err(path: &Path, source: Error) -> LoadError {
    LoadError::Invariant {
        path: path.display().to_string(),
        source,
    }
}

type Pair = [f64; 2];

fn to_pair(z: C64) -> Pair {
    [z.re, z.im]
}

fn from_pair(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorRecord {
    pub v: Vec<Pair>,
    pub alpha: Pair,
}

/// `{"n", "m", "rho", "factors": [{"v", "alpha"}], "box"?, "seed"?}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterFile {
    pub n: usize,
    pub m: usize,
    pub rho: f64,
    pub factors: Vec<FactorRecord>,
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub box_coords: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ParameterFile {
    pub fn from_params(
        params: &FilterParameters,
        box_point: Option<&BoxPoint>,
        seed: Option<u64>,
    ) -> Self {
        Self {
            n: params.n(),
            m: params.m(),
            rho: params.rho(),
            factors: params
                .factors()
                .iter()
                .map(|f| FactorRecord {
                    v: f.v.iter().copied().map(to_pair).collect(),
                    alpha: to_pair(f.alpha),
                })
                .collect(),
            box_coords: box_point.map(BoxPoint::to_flat),
            seed,
        }
    }

    /// Rebuilds and revalidates the parameters.
    pub fn to_params(&self) -> crate::Result<FilterParameters> {
        if self.factors.len() != self.m {
            return Err(Error::invalid(
                "m",
                format!("m = {} but {} factors listed", self.m, self.factors.len()),
            ));
        }
        let factors = self
            .factors
            .iter()
            .map(|f| {
                Factor::new(
                    f.v.iter().copied().map(from_pair).collect(),
                    from_pair(f.alpha),
                )
            })
            .collect();
        FilterParameters::new(self.n, self.rho, factors)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Pair>,
}

impl MatrixRecord {
    pub fn from_matrix(m: &CMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.as_slice().iter().copied().map(to_pair).collect(),
        }
    }

    pub fn to_matrix(&self) -> crate::Result<CMatrix> {
        CMatrix::from_vec(
            self.rows,
            self.cols,
            self.data.iter().copied().map(from_pair).collect(),
        )
    }
}

/// `{"n", "state_dim", "a", "b", "c", "d"}` with row-major blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealizationFile {
    pub n: usize,
    pub state_dim: usize,
    pub a: MatrixRecord,
    pub b: MatrixRecord,
    pub c: MatrixRecord,
    pub d: MatrixRecord,
}

impl RealizationFile {
    pub fn from_realization(r: &Realization) -> Self {
        Self {
            n: r.outputs(),
            state_dim: r.state_dim(),
            a: MatrixRecord::from_matrix(r.a()),
            b: MatrixRecord::from_matrix(r.b()),
            c: MatrixRecord::from_matrix(r.c()),
            d: MatrixRecord::from_matrix(r.d()),
        }
    }

    pub fn to_realization(&self) -> crate::Result<Realization> {
        let r = Realization::new(
            self.a.to_matrix()?,
            self.b.to_matrix()?,
            self.c.to_matrix()?,
            self.d.to_matrix()?,
        )?;
        if r.state_dim() != self.state_dim || r.inputs() != self.n || r.outputs() != self.n {
            return Err(Error::DimensionMismatch {
                op: "realization file header",
                lhs: (self.state_dim, self.n),
                rhs: (r.state_dim(), r.outputs()),
            });
        }
        if ![r.a(), r.b(), r.c(), r.d()].iter().all(|m| m.is_finite()) {
            return Err(Error::invalid("realization", "non-finite entry"));
        }
        Ok(r)
    }
}

/// One line of a verification report. `max_residual` is `null` when the
/// check could not be evaluated; `detail` then says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub name: String,
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub samples: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl ReportEntry {
    pub fn new(
        name: impl Into<String>,
        residual: f64,
        tolerance: f64,
        samples: usize,
        seed: u64,
    ) -> Self {
        Self {
            name: name.into(),
            max_residual: residual.is_finite().then_some(residual),
            tolerance,
            passed: residual <= tolerance,
            samples,
            seed,
            detail: None,
        }
    }

    pub fn failed(
        name: impl Into<String>,
        tolerance: f64,
        samples: usize,
        seed: u64,
        why: impl ToString,
    ) -> Self {
        Self {
            name: name.into(),
            max_residual: None,
            tolerance,
            passed: false,
            samples,
            seed,
            detail: Some(why.to_string()),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

impl From<crate::filters::CheckReport> for ReportEntry {
    fn from(r: crate::filters::CheckReport) -> Self {
        ReportEntry::new(r.name, r.max_residual, r.tolerance, r.samples, r.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub file: String,
    pub kind: String,
    pub seed: u64,
    pub points: usize,
    pub tolerance: f64,
    pub passed: bool,
    pub checks: Vec<ReportEntry>,
}

/// Sidecar written next to a synthesized signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisSidecar {
    pub n: usize,
    pub delay: usize,
    pub length: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    /// `‖x̂ − shift(x, T)‖ / ‖x‖` against the reference.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_abs_error: Option<f64>,
}

/// Either kind of input accepted by `verify` and `eval`.
#[derive(Debug, Clone)]
pub enum FilterFile {
    Parameters(FilterParameters, ParameterFile),
    Realization(Realization),
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, LoadError> {
    serde_json::from_str(text).map_err(|e| format_err(path, e))
}

pub fn load_parameters(path: &Path) -> Result<(FilterParameters, ParameterFile), LoadError> {
    let file: ParameterFile = parse_json(path, &read(path)?)?;
    let params = file.to_params().map_err(|e| invariant_err(path, e))?;
    Ok((params, file))
}

pub fn load_realization(path: &Path) -> Result<Realization, LoadError> {
    let file: RealizationFile = parse_json(path, &read(path)?)?;
    file.to_realization().map_err(|e| invariant_err(path, e))
}

/// Dispatches on the JSON shape: `factors` marks a parameter file, `a` a
/// realization file.
pub fn load_filter_file(path: &Path) -> Result<FilterFile, LoadError> {
    let text = read(path)?;
    let value: serde_json::Value = parse_json(path, &text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| format_err(path, "expected a JSON object"))?;
    if obj.contains_key("factors") {
        let file: ParameterFile = serde_json::from_value(value).map_err(|e| format_err(path, e))?;
        let params = file.to_params().map_err(|e| invariant_err(path, e))?;
        Ok(FilterFile::Parameters(params, file))
    } else if obj.contains_key("a") {
        let file: RealizationFile =
            serde_json::from_value(value).map_err(|e| format_err(path, e))?;
        let r = file.to_realization().map_err(|e| invariant_err(path, e))?;
        Ok(FilterFile::Realization(r))
    } else {
        Err(format_err(
            path,
            "neither a parameter file (\"factors\") nor a realization file (\"a\")",
        ))
    }
}

/// Box coordinates from either a bare JSON array or `{"box": [...]}`.
pub fn load_box(path: &Path) -> Result<Vec<f64>, LoadError> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum BoxJson {
        Flat(Vec<f64>),
        Wrapped {
            #[serde(rename = "box")]
            coords: Vec<f64>,
        },
    }
    Ok(match parse_json::<BoxJson>(path, &read(path)?)? {
        BoxJson::Flat(v) | BoxJson::Wrapped { coords: v } => v,
    })
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Parses one complex sample per line as `re,im` or a bare real value.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_signal_csv(path: &Path, text: &str) -> Result<Vec<C64>, LoadError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parse = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format_err(path, format!("line {}: bad number {s:?}", lineno + 1)))
        };
        let z = match fields.as_slice() {
            [re] => C64::new(parse(re)?, 0.0),
            [re, im] => C64::new(parse(re)?, parse(im)?),
            _ => {
                return Err(format_err(
                    path,
                    format!("line {}: expected `re,im`", lineno + 1),
                ))
            }
        };
        out.push(z);
    }
    Ok(out)
}

pub fn read_signal_csv(path: &Path) -> Result<Vec<C64>, LoadError> {
    parse_signal_csv(path, &read(path)?)
}

pub fn signal_to_csv(x: &[C64]) -> String {
    let mut s = String::with_capacity(x.len() * 24);
    for z in x {
        let _ = writeln!(s, "{},{}", z.re, z.im);
    }
    s
}

/// `z_re,z_im,` followed by the row-major `re,im` pairs of `value`.
pub fn eval_row(z: C64, value: &CMatrix) -> String {
    let mut s = format!("{},{}", z.re, z.im);
    for v in value.as_slice() {
        let _ = write!(s, ",{},{}", v.re, v.im);
    }
    s
}
