//! Experiment descriptions read from JSON.

use std::collections::BTreeMap;

use coiso::symplin::grassmannian_dim;
use coiso::Tolerances;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One experiment: its kind selects the parameter record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentSpec {
    GrassmannianDim(Job<GrassmannianParams>),
    MaslovIndex(Job<MaslovParams>),
    InvarianceSuite(Job<InvarianceParams>),
    DiscIndex(Job<DiscParams>),
    HypersurfaceReport(Job<SurfaceParams>),
    MinimalityScan(Job<SurfaceParams>),
}

/// Parameters plus the settings shared by every kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Job<P> {
    pub parameters: P,
    #[serde(default)]
    pub seed: u64,
    /// Overrides of named tolerances.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: String,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    /// The oracle comparisons as a CSV table.
    Csv,
}

fn default_samples() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GrassmannianParams {
    pub n: usize,
    pub k: usize,
    /// Random points at which the tangent rank is measured.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_m() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct MaslovParams {
    pub family: LoopFamily,
    /// Initial number of loop samples; refined when needed.
    #[serde(rename = "M", default = "default_m")]
    pub m: usize,
    #[serde(default)]
    pub section: SectionSpec,
    /// Where to write the phase trace of the index ratio.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
}

/// Named loops in the coisotropic Grassmannian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LoopFamily {
    /// `e^{iθ/2} R^n`, a Lagrangian loop.
    LagrangianRotation { n: usize },
    /// The standard model of rank `k` moved by `diag(e^{i w_j θ})`.
    DiagonalPhases { n: usize, k: usize, windings: Vec<i64> },
    /// The standard model moved by a seeded random unitary loop.
    RandomUnitary {
        n: usize,
        k: usize,
        windings: Vec<i64>,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default = "default_modes")]
        modes: usize,
    },
    Constant { n: usize, k: usize },
}

fn default_amplitude() -> f64 {
    0.3
}

fn default_modes() -> usize {
    2
}

impl LoopFamily {
    pub fn n(&self) -> usize {
        match *self {
            Self::LagrangianRotation { n } => n,
            Self::DiagonalPhases { n, .. } | Self::RandomUnitary { n, .. } | Self::Constant { n, .. } => n,
        }
    }

    pub fn k(&self) -> usize {
        match *self {
            Self::LagrangianRotation { .. } => 0,
            Self::DiagonalPhases { k, .. } | Self::RandomUnitary { k, .. } | Self::Constant { k, .. } => k,
        }
    }
}

/// How the transverse Maslov section is chosen along the loop.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SectionSpec {
    /// Coordinate 1 in the propagated frames; closes only when the frame
    /// monodromy has `det² = 1`, which always holds for Lagrangian loops.
    #[default]
    FrameConstant,
    /// `e^{iwθ}` times the canonical section.
    CanonicalTwist { winding: i64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct InvarianceParams {
    pub n: usize,
    pub k: usize,
    /// Random triples `(γ, ζ, A)`.
    pub cases: usize,
    #[serde(rename = "M", default = "default_m")]
    pub m: usize,
    /// Random re-framings applied to each loop.
    #[serde(default = "default_reframings")]
    pub reframings: usize,
}

fn default_reframings() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct DiscParams {
    pub fixture: Fixture,
    pub boundary: Boundary,
    #[serde(default)]
    pub grading: GradingSpec,
    #[serde(rename = "M", default = "default_m")]
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
}

/// Boundary loops of discs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Boundary {
    /// `θ ↦ r e^{imθ}` in the first complex coordinate, other coordinates 0.
    Hopf { radius: f64, turns: i64 },
    /// `θ ↦ c + cos θ u + sin θ v + sin 2θ w`.
    Ellipse {
        center: Vec<f64>,
        u: Vec<f64>,
        v: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        w: Option<Vec<f64>>,
    },
}

/// The grading used for the disc index.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GradingSpec {
    #[default]
    Canonical,
    /// Square of a constant complex form; `rows[a][j] = [re, im]` of `dz_j` in row `a`.
    Form { rows: Vec<Vec<[f64; 2]>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SurfaceParams {
    pub fixture: Fixture,
    /// Number of sampled points; ignored when `at` is given.
    pub points: usize,
    /// Explicit points on the fixture, for fixtures without a sampler.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<Vec<Vec<f64>>>,
}

/// Named coisotropic fixtures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Fixture {
    Hyperplane { n: usize },
    Sphere { n: usize, r: f64 },
    Cylinder { n: usize },
    /// Semi-axes for all `2n` real coordinates.
    Ellipsoid { n: usize, axes: Vec<f64> },
    /// One semi-axis per complex coordinate.
    ComplexEllipsoid { axes: Vec<f64> },
    /// `{P = 1}` for `P = Σ c Π x_i^{e_i}` in the `2n` real coordinates.
    Polynomial { n: usize, terms: Vec<Term> },
    /// `graph(∇f) × C^m` with `f` a polynomial in `p` variables.
    LagrangianGraph { terms: Vec<Term>, p: usize, m: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coefficient: f64,
    pub exponents: Vec<u32>,
}

impl Fixture {
    pub fn n(&self) -> usize {
        match self {
            Self::Hyperplane { n } | Self::Sphere { n, .. } | Self::Cylinder { n } => *n,
            Self::Ellipsoid { n, .. } | Self::Polynomial { n, .. } => *n,
            Self::ComplexEllipsoid { axes } => axes.len(),
            Self::LagrangianGraph { p, m, .. } => p + m,
        }
    }
}

const MAX_N: usize = 8;
const MAX_SAMPLES: usize = 1 << 16;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Schema(msg()))
    }
}

fn check_nk(n: usize, k: usize) -> Result<(), CliError> {
    check((1..=MAX_N).contains(&n), || format!("n must be in 1..={MAX_N}, got {n}"))?;
    check(k <= n, || format!("k must be at most n = {n}, got {k}"))
}

fn check_surface_n(n: usize) -> Result<(), CliError> {
    check((2..=MAX_N).contains(&n), || format!("hypersurface fixtures need n in 2..={MAX_N}, got {n}"))
}

fn check_count(name: &str, v: usize) -> Result<(), CliError> {
    check((1..=MAX_SAMPLES).contains(&v), || format!("{name} must be in 1..={MAX_SAMPLES}, got {v}"))
}

fn check_finite(name: &str, v: &[f64]) -> Result<(), CliError> {
    check(v.iter().all(|x| x.is_finite()), || format!("{name} must be finite"))
}

fn check_terms(terms: &[Term], nvars: usize) -> Result<(), CliError> {
    for (i, t) in terms.iter().enumerate() {
        check(t.coefficient.is_finite(), || format!("term {i} has a non-finite coefficient"))?;
        check(t.exponents.len() == nvars, || format!("term {i} needs {nvars} exponents"))?;
        let deg: u32 = t.exponents.iter().sum();
        check(deg <= coiso::hypergeo::MAX_DEGREE, || format!("term {i} has degree {deg}"))?;
    }
    check(!terms.is_empty(), || "a polynomial needs at least one term".into())
}

impl Fixture {
    fn validate(&self) -> Result<(), CliError> {
        match self {
            Self::Hyperplane { n } | Self::Cylinder { n } => check_surface_n(*n),
            Self::Sphere { n, r } => {
                check_surface_n(*n)?;
                check(r.is_finite() && *r > 0.0, || "sphere radius must be positive".into())
            }
            Self::Ellipsoid { n, axes } => {
                check_surface_n(*n)?;
                check(axes.len() == 2 * n, || format!("ellipsoid needs {} semi-axes", 2 * n))?;
                check(axes.iter().all(|a| a.is_finite() && *a > 0.0), || "semi-axes must be positive".into())
            }
            Self::ComplexEllipsoid { axes } => {
                check_surface_n(axes.len())?;
                check(axes.iter().all(|a| a.is_finite() && *a > 0.0), || "semi-axes must be positive".into())
            }
            Self::Polynomial { n, terms } => {
                check_surface_n(*n)?;
                check_terms(terms, 2 * n)
            }
            Self::LagrangianGraph { terms, p, m } => {
                check(*p >= 1 && *m >= 1, || "p and m must be positive".into())?;
                check_nk(p + m, 0)?;
                check_terms(terms, *p)
            }
        }
    }

    pub fn is_hypersurface(&self) -> bool {
        !matches!(self, Self::LagrangianGraph { .. })
    }
}

impl ExperimentSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::GrassmannianDim(_) => "grassmannian-dim",
            Self::MaslovIndex(_) => "maslov-index",
            Self::InvarianceSuite(_) => "invariance-suite",
            Self::DiscIndex(_) => "disc-index",
            Self::HypersurfaceReport(_) => "hypersurface-report",
            Self::MinimalityScan(_) => "minimality-scan",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Self::GrassmannianDim(j) => j.seed,
            Self::MaslovIndex(j) => j.seed,
            Self::InvarianceSuite(j) => j.seed,
            Self::DiscIndex(j) => j.seed,
            Self::HypersurfaceReport(j) | Self::MinimalityScan(j) => j.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Self::GrassmannianDim(j) => j.seed = seed,
            Self::MaslovIndex(j) => j.seed = seed,
            Self::InvarianceSuite(j) => j.seed = seed,
            Self::DiscIndex(j) => j.seed = seed,
            Self::HypersurfaceReport(j) | Self::MinimalityScan(j) => j.seed = seed,
        }
    }

    pub fn tolerance_overrides(&self) -> &BTreeMap<String, f64> {
        match self {
            Self::GrassmannianDim(j) => &j.tolerances,
            Self::MaslovIndex(j) => &j.tolerances,
            Self::InvarianceSuite(j) => &j.tolerances,
            Self::DiscIndex(j) => &j.tolerances,
            Self::HypersurfaceReport(j) | Self::MinimalityScan(j) => &j.tolerances,
        }
    }

    pub fn tolerance_overrides_mut(&mut self) -> &mut BTreeMap<String, f64> {
        match self {
            Self::GrassmannianDim(j) => &mut j.tolerances,
            Self::MaslovIndex(j) => &mut j.tolerances,
            Self::InvarianceSuite(j) => &mut j.tolerances,
            Self::DiscIndex(j) => &mut j.tolerances,
            Self::HypersurfaceReport(j) | Self::MinimalityScan(j) => &mut j.tolerances,
        }
    }

    pub fn output(&self) -> Option<&OutputSpec> {
        match self {
            Self::GrassmannianDim(j) => j.output.as_ref(),
            Self::MaslovIndex(j) => j.output.as_ref(),
            Self::InvarianceSuite(j) => j.output.as_ref(),
            Self::DiscIndex(j) => j.output.as_ref(),
            Self::HypersurfaceReport(j) | Self::MinimalityScan(j) => j.output.as_ref(),
        }
    }

    /// Default tolerances with this spec's overrides applied.
    pub fn tolerances(&self) -> Result<Tolerances, CliError> {
        let mut t = Tolerances::default();
        for (name, &value) in self.tolerance_overrides() {
            t.set(name, value).map_err(|e| CliError::Schema(e.to_string()))?;
        }
        Ok(t)
    }

    /// Parses and validates a spec.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let spec: Self = serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Range checks the schema cannot express.
    pub fn validate(&self) -> Result<(), CliError> {
        self.tolerances()?;
        match self {
            Self::GrassmannianDim(j) => {
                let p = &j.parameters;
                check_nk(p.n, p.k)?;
                check_count("samples", p.samples)?;
                grassmannian_dim(p.n, p.k).map(|_| ()).map_err(|e| CliError::Schema(e.to_string()))
            }
            Self::MaslovIndex(j) => {
                let p = &j.parameters;
                check_nk(p.family.n(), p.family.k())?;
                check_count("M", p.m)?;
                match &p.family {
                    LoopFamily::DiagonalPhases { n, windings, .. } | LoopFamily::RandomUnitary { n, windings, .. } => {
                        check(windings.len() == *n, || format!("windings needs {n} entries"))?;
                        check(windings.iter().all(|w| w.abs() <= 16), || "windings must be at most 16 in size".into())?;
                    }
                    _ => {}
                }
                if let LoopFamily::RandomUnitary { amplitude, modes, .. } = &p.family {
                    check(amplitude.is_finite() && *amplitude >= 0.0 && *amplitude <= 1.0, || "amplitude must be in [0, 1]".into())?;
                    check(*modes <= 8, || "modes must be at most 8".into())?;
                }
                if let SectionSpec::CanonicalTwist { winding } = p.section {
                    check(winding.abs() <= 64, || "section winding must be at most 64 in size".into())?;
                }
                Ok(())
            }
            Self::InvarianceSuite(j) => {
                let p = &j.parameters;
                check_nk(p.n, p.k)?;
                check_count("cases", p.cases)?;
                check_count("M", p.m)?;
                check(p.reframings <= 1000, || "reframings must be at most 1000".into())
            }
            Self::DiscIndex(j) => {
                let p = &j.parameters;
                p.fixture.validate()?;
                check(p.fixture.is_hypersurface(), || "disc-index needs a hypersurface fixture".into())?;
                check_count("M", p.m)?;
                let dim = 2 * p.fixture.n();
                match &p.boundary {
                    Boundary::Hopf { radius, turns } => {
                        check(radius.is_finite() && *radius > 0.0, || "radius must be positive".into())?;
                        check(*turns != 0 && turns.abs() <= 64, || "turns must be nonzero and at most 64 in size".into())?;
                    }
                    Boundary::Ellipse { center, u, v, w } => {
                        for (name, x) in [("center", Some(center)), ("u", Some(u)), ("v", Some(v)), ("w", w.as_ref())] {
                            if let Some(x) = x {
                                check(x.len() == dim, || format!("{name} needs {dim} coordinates"))?;
                                check_finite(name, x)?;
                            }
                        }
                    }
                }
                if let GradingSpec::Form { rows } = &p.grading {
                    let n = p.fixture.n();
                    check(rows.len() + 1 == n, || format!("a form on a hypersurface in C^{n} needs {} rows", n - 1))?;
                    for r in rows {
                        check(r.len() == n, || format!("form rows need {n} entries"))?;
                        check_finite("form", &r.iter().flatten().copied().collect::<Vec<_>>())?;
                    }
                }
                Ok(())
            }
            Self::HypersurfaceReport(j) | Self::MinimalityScan(j) => {
                let p = &j.parameters;
                p.fixture.validate()?;
                check_count("points", p.points)?;
                if let Some(at) = &p.at {
                    let dim = 2 * p.fixture.n();
                    check(!at.is_empty(), || "at needs at least one point".into())?;
                    for x in at {
                        check(x.len() == dim, || format!("points need {dim} coordinates"))?;
                        check_finite("at", x)?;
                    }
                }
                if matches!(self, Self::MinimalityScan(_)) {
                    check(p.fixture.is_hypersurface(), || "minimality-scan needs a hypersurface fixture".into())?;
                }
                Ok(())
            }
        }
    }
}

/// The published JSON schema of [`ExperimentSpec`].
pub fn schema() -> schemars::schema::RootSchema {
    schemars::schema_for!(ExperimentSpec)
}
