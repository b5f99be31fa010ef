//! Scenario files for `check` and `mc`.
//!
//! Factor and input indices in files are 1-based.

use std::path::Path;

use serde::Deserialize;

use ncvar::conditioning::{
    martingale_check, martingale_projection_check, reduced_expectation, tower_identity_check, trace_preservation_check,
    variance_additivity_check,
};
use ncvar::element::{matrix_from_rows, ElementRecord, MatrixRows};
use ncvar::independence::{boolean_independence_check, boolean_variance_infimum_check};
use ncvar::inequalities::{
    efron_stein_check, embed_inputs, kadison_step_check, lemma_variance_bound, matrix_efron_stein_check,
    norm_inequality_check, omit_one_polynomials, steele_check, trace_jensen_check, CopyMode, MatrixRealization,
};
use ncvar::montecarlo::{
    classical_efron_stein_mc, matrix_efron_stein_mc, MatrixFunction, NormConvention, ScalarDistribution, ScalarExpr,
};
use ncvar::{AlgebraShape, Element, FactorSet, LocalMatrix, NcPolynomial, Tolerances};

use crate::error::CliError;
use crate::output::Record;

/// A polynomial as text (`"x1 x2 + 0.5 x1^2"`) or as a term record.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PolySpec {
    Text(String),
    Record(NcPolynomial),
}

impl PolySpec {
    pub fn resolve(&self, inputs: &[String]) -> ncvar::Result<NcPolynomial> {
        match self {
            PolySpec::Text(s) => NcPolynomial::parse(inputs, s),
            PolySpec::Record(p) => Ok(p.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum RealizationChoice {
    MatrixLeg,
    Strict,
    Both,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    LemmaVarianceBound,
    EfronStein {
        #[serde(default = "extension")]
        copy_mode: CopyMode,
    },
    Steele {
        /// Defaults to dropping every word that mentions input `j`.
        #[serde(default)]
        f_js: Option<Vec<PolySpec>>,
    },
    NormInequality,
    TraceJensen,
    /// On the entrywise trace of `y` over one factor.
    Kadison {
        #[serde(default = "one")]
        factor: usize,
    },
    TracePreservation {
        factors: Vec<usize>,
    },
    TowerIdentity {
        j: usize,
    },
    Martingale,
    VarianceAdditivity,
    MartingaleProjection,
    BooleanIndependence {
        x: ElementRecord,
        y: ElementRecord,
    },
    /// Candidates `y` for `var(f) = inf τ((f − y)²)`.
    BooleanVarianceInfimum {
        candidates: Vec<ElementRecord>,
    },
    MatrixEfronStein {
        d: usize,
        inner_shape: Vec<usize>,
        locals: Vec<MatrixRows>,
        f: PolySpec,
        #[serde(default)]
        inputs: Option<Vec<String>>,
        #[serde(default = "extension")]
        copy_mode: CopyMode,
        #[serde(default = "both")]
        realization: RealizationChoice,
    },
}

fn extension() -> CopyMode {
    CopyMode::Extension
}
fn one() -> usize {
    1
}
fn both() -> RealizationChoice {
    RealizationChoice::Both
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckScenario {
    pub name: String,
    pub shape: Vec<usize>,
    /// Defaults to `x1..xn`.
    #[serde(default)]
    pub inputs: Option<Vec<String>>,
    pub locals: Vec<MatrixRows>,
    pub f: PolySpec,
    pub checks: Vec<CheckSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    Classical {
        #[serde(default)]
        label: Option<String>,
        f: ScalarExpr,
        distributions: Vec<ScalarDistribution>,
        #[serde(default)]
        n_samples: Option<usize>,
        #[serde(default)]
        seed: Option<u64>,
    },
    Matrix {
        #[serde(default)]
        label: Option<String>,
        function: MatrixFunction,
        distributions: Vec<ScalarDistribution>,
        #[serde(default)]
        n_samples: Option<usize>,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        convention: NormConvention,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McScenario {
    pub name: String,
    pub experiments: Vec<Experiment>,
}

pub const DEFAULT_MC_SAMPLES: usize = 10_000;

/// Reads and deserializes `path`, reporting the failing field path with line
/// and column.
pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        field: match e.path().to_string() {
            p if p == "." => "<root>".into(),
            p => p,
        },
        message: e.inner().to_string(),
    })
}

fn one_based(shape: &AlgebraShape, factors: &[usize]) -> ncvar::Result<FactorSet> {
    let idx = factors
        .iter()
        .map(|&k| {
            k.checked_sub(1).ok_or(ncvar::Error::FactorOutOfRange {
                index: 0,
                n_factors: shape.n_factors(),
            })
        })
        .collect::<ncvar::Result<Vec<_>>>()?;
    FactorSet::new(shape, idx)
}

fn element(rec: &ElementRecord, shape: &AlgebraShape) -> ncvar::Result<Element> {
    let e = Element::from_record(rec)?;
    if e.shape() != shape {
        return Err(ncvar::Error::ShapeMismatch(
            e.shape().factor_dims().to_vec(),
            shape.factor_dims().to_vec(),
        ));
    }
    Ok(e)
}

/// Runs every check of a scenario. Input errors abort with exit code 2.
pub fn run_checks(sc: &CheckScenario, tol: &Tolerances) -> Result<Vec<Record>, CliError> {
    let ctx = |what: &str| format!("scenario {}: {what}", sc.name);
    let input = |what: &str| {
        let c = ctx(what);
        move |e| CliError::input(c.clone(), e)
    };
    let shape = AlgebraShape::new(sc.shape.clone()).map_err(input("shape"))?;
    let inputs = sc
        .inputs
        .clone()
        .unwrap_or_else(|| NcPolynomial::standard_inputs(shape.n_factors()));
    let f = sc.f.resolve(&inputs).map_err(input("f"))?;
    let locals = sc
        .locals
        .iter()
        .map(matrix_from_rows)
        .collect::<ncvar::Result<Vec<_>>>()
        .map_err(input("locals"))?;
    let y = embed_inputs(&locals, &shape, tol)
        .and_then(|xs| f.eval(&xs))
        .map_err(input("evaluating f"))?;

    let mut out = Vec::new();
    for (k, check) in sc.checks.iter().enumerate() {
        let label = format!("{}/{}", sc.name, k + 1);
        let err = input(&format!("check {}", k + 1));
        let reports = match check {
            CheckSpec::LemmaVarianceBound => vec![lemma_variance_bound(&f, &locals, &shape, tol)],
            CheckSpec::EfronStein { copy_mode } => vec![efron_stein_check(&f, &locals, &shape, *copy_mode, tol)],
            CheckSpec::Steele { f_js } => {
                let f_js = match f_js {
                    Some(list) => list
                        .iter()
                        .map(|p| p.resolve(&inputs))
                        .collect::<ncvar::Result<Vec<_>>>()
                        .map_err(&err)?,
                    None => omit_one_polynomials(&f),
                };
                vec![steele_check(&f, &locals, &shape, &f_js, tol)]
            }
            CheckSpec::NormInequality => vec![norm_inequality_check(&locals, &shape, tol)],
            CheckSpec::TraceJensen => vec![trace_jensen_check(&y, tol)],
            CheckSpec::Kadison { factor } => {
                let set = one_based(&shape, &[*factor]).map_err(&err)?;
                vec![reduced_expectation(&y, &set).and_then(|a| kadison_step_check(&a, tol))]
            }
            CheckSpec::TracePreservation { factors } => {
                let set = one_based(&shape, factors).map_err(&err)?;
                vec![trace_preservation_check(&y, &set, tol)]
            }
            CheckSpec::TowerIdentity { j } => vec![tower_identity_check(&y, *j, tol)],
            CheckSpec::Martingale => vec![martingale_check(&y, tol)],
            CheckSpec::VarianceAdditivity => vec![variance_additivity_check(&y, tol)],
            CheckSpec::MartingaleProjection => vec![martingale_projection_check(&y, tol)],
            CheckSpec::BooleanIndependence { x, y } => {
                let x = element(x, &shape).map_err(&err)?;
                let y = element(y, &shape).map_err(&err)?;
                vec![boolean_independence_check(&x, &y, tol)]
            }
            CheckSpec::BooleanVarianceInfimum { candidates } => {
                let c = candidates
                    .iter()
                    .map(|r| element(r, &shape))
                    .collect::<ncvar::Result<Vec<_>>>()
                    .map_err(&err)?;
                vec![boolean_variance_infimum_check(&y, &c, tol)]
            }
            CheckSpec::MatrixEfronStein {
                d,
                inner_shape,
                locals,
                f,
                inputs,
                copy_mode,
                realization,
            } => {
                let inner = AlgebraShape::new(inner_shape.clone()).map_err(&err)?;
                let names = inputs
                    .clone()
                    .unwrap_or_else(|| NcPolynomial::standard_inputs(inner.n_factors()));
                let g = f.resolve(&names).map_err(&err)?;
                let mats: Vec<LocalMatrix> = locals
                    .iter()
                    .map(matrix_from_rows)
                    .collect::<ncvar::Result<_>>()
                    .map_err(&err)?;
                let which: &[MatrixRealization] = match realization {
                    RealizationChoice::MatrixLeg => &[MatrixRealization::MatrixLeg],
                    RealizationChoice::Strict => &[MatrixRealization::Strict],
                    RealizationChoice::Both => &[MatrixRealization::MatrixLeg, MatrixRealization::Strict],
                };
                which
                    .iter()
                    .map(|&r| matrix_efron_stein_check(&g, *d, &mats, &inner, *copy_mode, r, tol))
                    .collect()
            }
        };
        for r in reports {
            out.push(Record::check(&label, r.map_err(&err)?));
        }
    }
    Ok(out)
}

/// Runs every experiment; `n_samples` and `seed` override the file.
pub fn run_experiments(sc: &McScenario, n_samples: Option<usize>, seed: Option<u64>) -> Result<Vec<Record>, CliError> {
    let mut out = Vec::new();
    for (k, exp) in sc.experiments.iter().enumerate() {
        let (label, r) = match exp {
            Experiment::Classical {
                label,
                f,
                distributions,
                n_samples: n,
                seed: s,
            } => (
                label.clone(),
                classical_efron_stein_mc(
                    f,
                    distributions,
                    n_samples.or(*n).unwrap_or(DEFAULT_MC_SAMPLES),
                    seed.or(*s).unwrap_or(0),
                ),
            ),
            Experiment::Matrix {
                label,
                function,
                distributions,
                n_samples: n,
                seed: s,
                convention,
            } => (
                label.clone(),
                matrix_efron_stein_mc(
                    function,
                    distributions,
                    n_samples.or(*n).unwrap_or(DEFAULT_MC_SAMPLES),
                    seed.or(*s).unwrap_or(0),
                    *convention,
                ),
            ),
        };
        let label = label.unwrap_or_else(|| (k + 1).to_string());
        let r = r.map_err(|e| CliError::input(format!("scenario {}: experiment {label}", sc.name), e))?;
        out.push(Record::monte_carlo(format!("{}/{label}", sc.name), r));
    }
    Ok(out)
}
