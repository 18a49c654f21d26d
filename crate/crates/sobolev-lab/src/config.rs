//! Flat key-value experiment configs.
//!
//! Grammar: one `key = value` pair per line, `#` comments, UTF-8. Keys are
//! dotted (`body.shape`, `fn.region.radius`); lists are comma-separated;
//! polytope normals separate vectors with `;`. Unknown keys, duplicate
//! keys, missing seeds, and out-of-range values are reported with the
//! offending line. The seed is mandatory: runs must be reproducible, so
//! there is no wall-clock default.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::convex_body::ConvexBody;
use crate::error::{Error, Result};
use crate::estimate::McConfig;
use crate::level_set::SetKind;
use crate::test_functions::TestFunction;

/// The experiment families the runner can dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// `s -> 1` seminorm sweep against the gradient moment energy.
    Bbm,
    /// `s -> 0` seminorm sweep against `(2n/p)|K| ||f||_p^p`.
    Ms,
    /// Large-threshold level-set limit.
    LargeLambda,
    /// Small-threshold level-set limit.
    SmallLambda,
    /// Weak quasinorm over a threshold grid.
    Quasinorm,
    /// Two-sided quasinorm bounds.
    Sandwich,
    /// Line-decomposition identity on product indicators.
    VerifyBp,
    /// One-dimensional averaged-integral set oracle.
    VerifyProp21,
    /// Line-field set bound.
    VerifyProp22,
    /// Interval certificates for the large-threshold set.
    VerifyClaims,
    /// Compact-support half-set sandwich.
    M1,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Bbm => "bbm",
            ExperimentKind::Ms => "ms",
            ExperimentKind::LargeLambda => "large-lambda",
            ExperimentKind::SmallLambda => "small-lambda",
            ExperimentKind::Quasinorm => "quasinorm",
            ExperimentKind::Sandwich => "sandwich",
            ExperimentKind::VerifyBp => "verify-bp",
            ExperimentKind::VerifyProp21 => "verify-prop21",
            ExperimentKind::VerifyProp22 => "verify-prop22",
            ExperimentKind::VerifyClaims => "verify-claims",
            ExperimentKind::M1 => "m1",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "bbm" => ExperimentKind::Bbm,
            "ms" => ExperimentKind::Ms,
            "large-lambda" => ExperimentKind::LargeLambda,
            "small-lambda" => ExperimentKind::SmallLambda,
            "quasinorm" => ExperimentKind::Quasinorm,
            "sandwich" => ExperimentKind::Sandwich,
            "verify-bp" => ExperimentKind::VerifyBp,
            "verify-prop21" => ExperimentKind::VerifyProp21,
            "verify-prop22" => ExperimentKind::VerifyProp22,
            "verify-claims" => ExperimentKind::VerifyClaims,
            "m1" => ExperimentKind::M1,
            other => return Err(format!("unknown experiment `{other}`")),
        })
    }
}

/// Declarative body description (constructed on demand).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "shape")]
pub enum BodySpec {
    Ball { radius: f64 },
    Ellipsoid { diag: Vec<f64> },
    Box { half_widths: Vec<f64> },
    Polytope { normals: Vec<Vec<f64>> },
    LqBall { q: f64, scale: f64 },
}

impl BodySpec {
    pub fn build(&self, n: usize) -> Result<ConvexBody> {
        match self {
            BodySpec::Ball { radius } => ConvexBody::ball(n, *radius),
            BodySpec::Ellipsoid { diag } => {
                if diag.len() != n {
                    return Err(Error::invalid("ellipsoid diagonal length must equal n"));
                }
                let form: Vec<Vec<f64>> = (0..n)
                    .map(|i| (0..n).map(|j| if i == j { diag[i] } else { 0.0 }).collect())
                    .collect();
                ConvexBody::ellipsoid(form)
            }
            BodySpec::Box { half_widths } => {
                if half_widths.len() != n {
                    return Err(Error::invalid("box half-width count must equal n"));
                }
                ConvexBody::cuboid(half_widths.clone())
            }
            BodySpec::Polytope { normals } => ConvexBody::polytope(normals.clone()),
            BodySpec::LqBall { q, scale } => ConvexBody::lq_ball(n, *q, *scale),
        }
    }
}

/// Declarative test-function description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct FunctionSpec {
    pub kind: String,
    pub amplitude: f64,
    pub center: Vec<f64>,
    pub radius: f64,
    pub m: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub region: Option<BodySpec>,
}

impl FunctionSpec {
    pub fn build(&self, n: usize) -> Result<TestFunction> {
        let mut center = self.center.clone();
        if center.is_empty() {
            center = vec![0.0; n];
        }
        match self.kind.as_str() {
            "smooth-bump" => TestFunction::smooth_bump(n, self.amplitude, center, self.radius),
            "poly-bump" => TestFunction::poly_bump(n, self.m, self.amplitude, center, self.radius),
            "gaussian" => TestFunction::gaussian(n, self.amplitude, center, self.radius),
            "triangle" => {
                if n != 1 {
                    return Err(Error::invalid("triangle kind is one-dimensional"));
                }
                TestFunction::triangle(self.amplitude, center[0], self.radius)
            }
            "indicator" => {
                let region = self
                    .region
                    .as_ref()
                    .ok_or_else(|| Error::invalid("indicator needs fn.region.*"))?
                    .build(n)?;
                TestFunction::indicator(region, center, self.amplitude)
            }
            other => Err(Error::invalid(format!("unknown function kind `{other}`"))),
        }
    }
}

/// Seminorm estimator choice (`auto` picks deterministic grids for n = 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureMethod {
    Auto,
    Mc,
    RadialTensor,
}

/// Output format of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
    PlotData,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "csv" => OutputFormat::Csv,
            "json" => OutputFormat::Json,
            "plot-data" => OutputFormat::PlotData,
            other => return Err(format!("unknown format `{other}`")),
        })
    }
}

/// A parsed, validated experiment description with defaults filled.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub samples: u64,
    pub subdivisions: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub body: Option<BodySpec>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub function: Option<FunctionSpec>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub s_list: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub lambda_list: Vec<f64>,
    pub set_kind: SetKind,
    pub method: QuadratureMethod,
    pub window: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub gamma_list: Vec<f64>,
    pub grid: usize,
    pub line_grid: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub delta_list: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub lambda_factors: Vec<f64>,
    pub r_support: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub output_path: Option<String>,
    pub output_format: OutputFormat,
}

impl ExperimentConfig {
    pub fn mc(&self) -> McConfig {
        McConfig {
            samples: self.samples,
            seed: self.seed,
            subdivisions: self.subdivisions,
        }
    }

    pub fn build_body(&self) -> Result<ConvexBody> {
        self.body
            .as_ref()
            .ok_or_else(|| Error::invalid("experiment needs body.shape"))?
            .build(self.n)
    }

    pub fn build_function(&self) -> Result<TestFunction> {
        self.function
            .as_ref()
            .ok_or_else(|| Error::invalid("experiment needs fn.kind"))?
            .build(self.n)
    }
}

struct RawConfig {
    entries: BTreeMap<String, (usize, String)>,
    used: std::collections::BTreeSet<String>,
}

impl RawConfig {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.used.insert(key.to_string());
        self.entries.get(key).cloned()
    }

    fn parse<T: FromStr>(&mut self, key: &str, what: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, value)) => value.parse::<T>().map(Some).map_err(|_| Error::Config {
                line,
                key: key.to_string(),
                reason: format!("expected {what}, got `{value}`"),
            }),
        }
    }

    fn parse_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, value)) => value
                .split(',')
                .map(|tok| tok.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map(Some)
                .map_err(|_| Error::Config {
                    line,
                    key: key.to_string(),
                    reason: format!("expected a comma-separated list of reals, got `{value}`"),
                }),
        }
    }

    fn err(&self, key: &str, reason: impl Into<String>) -> Error {
        let line = self.entries.get(key).map(|(l, _)| *l).unwrap_or(0);
        Error::Config {
            line,
            key: key.to_string(),
            reason: reason.into(),
        }
    }
}

/// Parse the key-value grammar into a validated config with defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(Error::Config {
                line: line_no,
                key: line.to_string(),
                reason: "expected `key = value`".into(),
            });
        };
        let key = line[..eq].trim().to_string();
        let value = line[eq + 1..].trim().to_string();
        if key.is_empty() {
            return Err(Error::Config {
                line: line_no,
                key,
                reason: "empty key".into(),
            });
        }
        if let Some((first_line, _)) = entries.get(&key) {
            return Err(Error::Config {
                line: line_no,
                key,
                reason: format!("duplicate key (first set on line {first_line})"),
            });
        }
        entries.insert(key, (line_no, value));
    }
    let mut raw = RawConfig {
        entries,
        used: Default::default(),
    };

    let experiment: ExperimentKind = match raw.take("experiment") {
        None => {
            return Err(Error::Config {
                line: 0,
                key: "experiment".into(),
                reason: "missing (required)".into(),
            })
        }
        Some((line, value)) => value.parse().map_err(|e: String| Error::Config {
            line,
            key: "experiment".into(),
            reason: e,
        })?,
    };

    let seed: u64 = match raw.parse::<u64>("seed", "an unsigned integer")? {
        Some(seed) => seed,
        None => {
            return Err(Error::Config {
                line: 0,
                key: "seed".into(),
                reason: "missing (required; runs have no wall-clock default)".into(),
            })
        }
    };

    let n: usize = raw.parse("n", "a positive integer")?.unwrap_or(1);
    if n == 0 {
        return Err(raw.err("n", "must be positive"));
    }
    let p: f64 = raw.parse("p", "a real")?.unwrap_or(1.0);
    if !(p >= 1.0) {
        return Err(raw.err("p", "out of range: the theory requires p >= 1"));
    }
    let samples: u64 = raw.parse("samples", "an unsigned integer")?.unwrap_or(100_000);
    if samples == 0 {
        return Err(raw.err("samples", "must be positive"));
    }
    let subdivisions: u32 = raw.parse("subdivisions", "an unsigned integer")?.unwrap_or(256);

    let body = parse_body(&mut raw, "body")?;
    let function = parse_function(&mut raw, n)?;

    let s_list = match raw.parse_list("s.list")? {
        Some(list) => {
            if list.iter().any(|&s| !(s > 0.0 && s < 1.0)) {
                return Err(raw.err("s.list", "s values must lie in (0,1)"));
            }
            list
        }
        None => match experiment {
            ExperimentKind::Bbm => crate::gagliardo::DEFAULT_BBM_GRID.to_vec(),
            ExperimentKind::Ms => crate::gagliardo::DEFAULT_MS_GRID.to_vec(),
            _ => Vec::new(),
        },
    };
    let lambda_list = match raw.parse_list("lambda.list")? {
        Some(list) => {
            if list.iter().any(|&l| !(l > 0.0)) {
                return Err(raw.err("lambda.list", "thresholds must be positive"));
            }
            list
        }
        None => Vec::new(),
    };

    let set_kind = match raw.take("kind") {
        None => SetKind::PartB,
        Some((line, value)) => match value.as_str() {
            "part-a" => SetKind::PartA,
            "part-b" => SetKind::PartB,
            other => {
                return Err(Error::Config {
                    line,
                    key: "kind".into(),
                    reason: format!("expected part-a or part-b, got `{other}`"),
                })
            }
        },
    };

    let method = match raw.take("method") {
        None => QuadratureMethod::Auto,
        Some((line, value)) => match value.as_str() {
            "mc" => QuadratureMethod::Mc,
            "radial-tensor" => QuadratureMethod::RadialTensor,
            other => {
                return Err(Error::Config {
                    line,
                    key: "method".into(),
                    reason: format!("expected mc or radial-tensor, got `{other}`"),
                })
            }
        },
    };

    let window: f64 = raw.parse("window", "a positive real")?.unwrap_or(1.5);
    if !(window > 0.0) {
        return Err(raw.err("window", "must be positive"));
    }
    let gamma_list = raw
        .parse_list("gamma.list")?
        .unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    if gamma_list.iter().any(|&g| !(g > 0.0)) {
        return Err(raw.err("gamma.list", "gamma values must be positive"));
    }
    let grid: usize = raw.parse("grid", "a positive integer")?.unwrap_or(2000);
    let line_grid: usize = raw.parse("line.grid", "a positive integer")?.unwrap_or(96);
    let delta_list = raw
        .parse_list("delta.list")?
        .unwrap_or_else(|| vec![0.25, 0.5, 0.75]);
    if delta_list.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
        return Err(raw.err("delta.list", "delta values must lie in (0,1)"));
    }
    let lambda_factors = raw
        .parse_list("lambda.factors")?
        .unwrap_or_else(|| vec![10.0, 100.0]);
    let r_support: f64 = raw.parse("r.support", "a positive real")?.unwrap_or(1.0);

    let output_path = raw.take("output.path").map(|(_, v)| v);
    let output_format = match raw.take("output.format") {
        None => OutputFormat::Csv,
        Some((line, value)) => value.parse().map_err(|e: String| Error::Config {
            line,
            key: "output.format".into(),
            reason: e,
        })?,
    };

    // Anything not consumed is unknown.
    for (key, (line, _)) in raw.entries.iter() {
        if !raw.used.contains(key) {
            return Err(Error::Config {
                line: *line,
                key: key.clone(),
                reason: "unknown key".into(),
            });
        }
    }

    Ok(ExperimentConfig {
        experiment,
        n,
        p,
        seed,
        samples,
        subdivisions,
        body,
        function,
        s_list,
        lambda_list,
        set_kind,
        method,
        window,
        gamma_list,
        grid,
        line_grid,
        delta_list,
        lambda_factors,
        r_support,
        output_path,
        output_format,
    })
}

fn parse_body(raw: &mut RawConfig, prefix: &str) -> Result<Option<BodySpec>> {
    let shape_key = format!("{prefix}.shape");
    let Some((line, shape)) = raw.take(&shape_key) else {
        return Ok(None);
    };
    let spec = match shape.as_str() {
        "ball" => BodySpec::Ball {
            radius: raw
                .parse(&format!("{prefix}.radius"), "a positive real")?
                .unwrap_or(1.0),
        },
        "ellipsoid" => {
            let diag = raw
                .parse_list(&format!("{prefix}.diag"))?
                .ok_or_else(|| raw.err(&shape_key, "ellipsoid needs `.diag`"))?;
            BodySpec::Ellipsoid { diag }
        }
        "box" => {
            let half_widths = raw
                .parse_list(&format!("{prefix}.half_widths"))?
                .ok_or_else(|| raw.err(&shape_key, "box needs `.half_widths`"))?;
            BodySpec::Box { half_widths }
        }
        "polytope" => {
            let key = format!("{prefix}.normals");
            let Some((nline, value)) = raw.take(&key) else {
                return Err(raw.err(&shape_key, "polytope needs `.normals`"));
            };
            let normals: Vec<Vec<f64>> = value
                .split(';')
                .map(|vector| {
                    vector
                        .split(',')
                        .map(|tok| tok.trim().parse::<f64>())
                        .collect::<std::result::Result<Vec<f64>, _>>()
                })
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Config {
                    line: nline,
                    key,
                    reason: "expected `a,b;c,d` vectors".into(),
                })?;
            BodySpec::Polytope { normals }
        }
        "lq-ball" => BodySpec::LqBall {
            q: raw
                .parse(&format!("{prefix}.q"), "a real >= 1")?
                .unwrap_or(2.0),
            scale: raw
                .parse(&format!("{prefix}.scale"), "a positive real")?
                .unwrap_or(1.0),
        },
        other => {
            return Err(Error::Config {
                line,
                key: shape_key,
                reason: format!("unknown shape `{other}`"),
            })
        }
    };
    Ok(Some(spec))
}

fn parse_function(raw: &mut RawConfig, n: usize) -> Result<Option<FunctionSpec>> {
    let Some((_, kind)) = raw.take("fn.kind") else {
        return Ok(None);
    };
    let amplitude: f64 = raw.parse("fn.amplitude", "a real")?.unwrap_or(1.0);
    let center = raw.parse_list("fn.center")?.unwrap_or_else(|| vec![0.0; n]);
    let radius: f64 = raw.parse("fn.radius", "a positive real")?.unwrap_or(1.0);
    let m: u32 = raw.parse("fn.m", "an integer >= 3")?.unwrap_or(3);
    let region = parse_body(raw, "fn.region")?;
    Ok(Some(FunctionSpec {
        kind,
        amplitude,
        center,
        radius,
        m,
        region,
    }))
}
