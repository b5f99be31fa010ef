//! Seeded Monte Carlo estimates for the classical and random-matrix
//! Efron–Stein inequalities.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::element::{matrix_from_rows, matrix_hermitian_defect, matrix_to_rows, LocalMatrix, MatrixRows};
use crate::error::{Error, Result};
pub use crate::random::{sample_stream, SampleRng};
use crate::report::{InequalityReport, Note};
use crate::tolerance::Tolerances;
use crate::C64;

pub const MIN_SAMPLES: usize = 100;

/// Real distributions for the independent inputs `X_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarDistribution {
    /// `±1` with probability ½ each.
    Rademacher,
    Uniform {
        a: f64,
        b: f64,
    },
    Discrete {
        support: Vec<f64>,
        probabilities: Vec<f64>,
    },
}

impl ScalarDistribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarDistribution::Rademacher => Ok(()),
            ScalarDistribution::Uniform { a, b } => {
                if a.is_finite() && b.is_finite() && a < b {
                    Ok(())
                } else {
                    Err(Error::InvalidDistribution(format!(
                        "uniform needs finite a < b, got a={a}, b={b}"
                    )))
                }
            }
            ScalarDistribution::Discrete { support, probabilities } => {
                if support.is_empty() || support.len() != probabilities.len() {
                    return Err(Error::InvalidDistribution(
                        "support and probabilities must be nonempty and of equal length".into(),
                    ));
                }
                if support.iter().any(|s| !s.is_finite()) || probabilities.iter().any(|p| !(p.is_finite() && *p >= 0.0))
                {
                    return Err(Error::InvalidDistribution(
                        "support must be finite and probabilities nonnegative".into(),
                    ));
                }
                let total: f64 = probabilities.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
                }
                Ok(())
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            ScalarDistribution::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            ScalarDistribution::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            ScalarDistribution::Discrete { support, probabilities } => {
                let u = rng.random::<f64>();
                let mut acc = 0.0;
                for (s, p) in support.iter().zip(probabilities) {
                    acc += p;
                    if u < acc {
                        return *s;
                    }
                }
                *support.last().expect("validated")
            }
        }
    }

    /// `E[X^k]`.
    pub fn moment(&self, k: u32) -> f64 {
        match self {
            ScalarDistribution::Rademacher => {
                if k.is_multiple_of(2) {
                    1.0
                } else {
                    0.0
                }
            }
            ScalarDistribution::Uniform { a, b } => {
                let k1 = (k + 1) as i32;
                (b.powi(k1) - a.powi(k1)) / ((k + 1) as f64 * (b - a))
            }
            ScalarDistribution::Discrete { support, probabilities } => support
                .iter()
                .zip(probabilities)
                .map(|(s, p)| p * s.powi(k as i32))
                .sum(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.moment(2) - m * m
    }

    /// Finite support with probabilities, if any.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            ScalarDistribution::Rademacher => Some(vec![(-1.0, 0.5), (1.0, 0.5)]),
            ScalarDistribution::Uniform { .. } => None,
            ScalarDistribution::Discrete { support, probabilities } => {
                Some(support.iter().copied().zip(probabilities.iter().copied()).collect())
            }
        }
    }
}

fn validate_dists(dists: &[ScalarDistribution]) -> Result<()> {
    if dists.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one input distribution is required".into(),
        ));
    }
    dists.iter().try_for_each(ScalarDistribution::validate)
}

/// Real-valued function of the inputs. Inputs are numbered from 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarExpr {
    Const(f64),
    Input(usize),
    Neg(Box<ScalarExpr>),
    Add(Vec<ScalarExpr>),
    Mul(Vec<ScalarExpr>),
    Max(Vec<ScalarExpr>),
    Min(Vec<ScalarExpr>),
    Pow(Box<ScalarExpr>, u32),
}

impl ScalarExpr {
    pub fn sum_of_inputs(n: usize) -> Self {
        ScalarExpr::Add((1..=n).map(ScalarExpr::Input).collect())
    }

    pub fn max_of_inputs(n: usize) -> Self {
        ScalarExpr::Max((1..=n).map(ScalarExpr::Input).collect())
    }

    pub fn validate(&self, n_inputs: usize) -> Result<()> {
        match self {
            ScalarExpr::Const(c) if !c.is_finite() => Err(Error::InvalidArgument(format!("non-finite constant {c}"))),
            ScalarExpr::Const(_) => Ok(()),
            ScalarExpr::Input(i) if (1..=n_inputs).contains(i) => Ok(()),
            ScalarExpr::Input(i) => Err(Error::InvalidArgument(format!("input {i} out of range 1..={n_inputs}"))),
            ScalarExpr::Neg(e) | ScalarExpr::Pow(e, _) => e.validate(n_inputs),
            ScalarExpr::Max(v) | ScalarExpr::Min(v) if v.is_empty() => {
                Err(Error::InvalidArgument("max/min of nothing".into()))
            }
            ScalarExpr::Add(v) | ScalarExpr::Mul(v) | ScalarExpr::Max(v) | ScalarExpr::Min(v) => {
                v.iter().try_for_each(|e| e.validate(n_inputs))
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ScalarExpr::Const(c) => *c,
            ScalarExpr::Input(i) => x[i - 1],
            ScalarExpr::Neg(e) => -e.eval(x),
            ScalarExpr::Add(v) => v.iter().map(|e| e.eval(x)).sum(),
            ScalarExpr::Mul(v) => v.iter().map(|e| e.eval(x)).product(),
            ScalarExpr::Max(v) => v.iter().map(|e| e.eval(x)).fold(f64::NEG_INFINITY, f64::max),
            ScalarExpr::Min(v) => v.iter().map(|e| e.eval(x)).fold(f64::INFINITY, f64::min),
            ScalarExpr::Pow(e, k) => e.eval(x).powi(*k as i32),
        }
    }
}

/// Sample mean with its plug-in standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub label: String,
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// An inequality report together with the estimators behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    #[serde(flatten)]
    pub report: InequalityReport,
    pub estimators: Vec<EstimatorReport>,
}

impl MonteCarloReport {
    pub fn estimator(&self, label: &str) -> Option<&EstimatorReport> {
        self.estimators.iter().find(|e| e.label == label)
    }
}

fn mean_and_se(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = values.clone().sum::<f64>() / nf;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    (mean, (var / nf).sqrt())
}

/// Unbiased sample variance of `z`, with the delta-method standard error
/// `sd((z − z̄)²)/√N`.
fn variance_estimate(z: &[f64]) -> (f64, f64) {
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    let dev: Vec<f64> = z.iter().map(|v| (v - mean).powi(2)).collect();
    let (m2, se) = mean_and_se(dev.iter().copied(), dev.len());
    (m2 * n / (n - 1.0), se)
}

fn check_samples(n_samples: usize) -> Result<()> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            got: n_samples,
            min: MIN_SAMPLES,
        });
    }
    Ok(())
}

fn draw(dists: &[ScalarDistribution], rng: &mut SampleRng) -> (Vec<f64>, Vec<f64>) {
    let x = dists.iter().map(|d| d.sample(rng)).collect();
    let xp = dists.iter().map(|d| d.sample(rng)).collect();
    (x, xp)
}

/// `Z = f(X)` and `(Z − Z'_j)²` for each `j`, where `Z'_j` has `X_j` replaced
/// by `X'_j`.
fn classical_sample(f: &ScalarExpr, x: &[f64], xp: &[f64]) -> (f64, Vec<f64>) {
    let z = f.eval(x);
    let mut buf = x.to_vec();
    let diffs = (0..x.len())
        .map(|j| {
            buf[j] = xp[j];
            let zj = f.eval(&buf);
            buf[j] = x[j];
            (z - zj).powi(2)
        })
        .collect();
    (z, diffs)
}

/// Estimates `var(Z)` and `Σ_j E[(Z − Z'_j)²]` for `Z = f(X_1..X_n)`.
///
/// `lhs = var(Z)`, `rhs = ½ Σ_j E[(Z − Z'_j)²]`; passes when
/// `lhs ≤ rhs + 3·√(se_lhs² + se_rhs²)`. The constant `1/n` variant is
/// reported in the notes.
pub fn classical_efron_stein_mc(
    f: &ScalarExpr,
    dists: &[ScalarDistribution],
    n_samples: usize,
    seed: u64,
) -> Result<MonteCarloReport> {
    validate_dists(dists)?;
    f.validate(dists.len())?;
    check_samples(n_samples)?;
    let n = dists.len();
    let samples: Vec<(f64, Vec<f64>)> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_stream(seed, i as u64);
            let (x, xp) = draw(dists, &mut rng);
            classical_sample(f, &x, &xp)
        })
        .collect();
    let z: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let (var, var_se) = variance_estimate(&z);
    let (sum, sum_se) = mean_and_se(samples.iter().map(|s| s.1.iter().sum::<f64>()), n_samples);
    let est = |label: String, estimate: f64, std_error: f64| EstimatorReport {
        label,
        estimate,
        std_error,
        n_samples,
        seed,
    };
    let mut estimators = vec![est("var".into(), var, var_se), est("sum_sq_diff".into(), sum, sum_se)];
    for j in 0..n {
        let (m, se) = mean_and_se(samples.iter().map(|s| s.1[j]), n_samples);
        estimators.push(est(format!("sq_diff_{}", j + 1), m, se));
    }

    let mut r = InequalityReport::inequality("classical_efron_stein_mc", var, 0.5 * sum, 0.0);
    r.tolerance = 3.0 * (var_se.powi(2) + (0.5 * sum_se).powi(2)).sqrt();
    let one_over_n = sum / n as f64;
    r.notes.push(Note::new("rhs_half", 0.5 * sum));
    r.notes.push(Note::new("slack_half", 0.5 * sum - var));
    r.notes.push(Note::new("rhs_one_over_n", one_over_n));
    r.notes.push(Note::new("slack_one_over_n", one_over_n - var));
    r.notes.push(Note::new(
        "tolerance_one_over_n",
        3.0 * (var_se.powi(2) + (sum_se / n as f64).powi(2)).sqrt(),
    ));
    if let Ok((v, s)) = enumerate_classical(f, dists) {
        r.notes.push(Note::new("exact_var", v));
        r.notes.push(Note::new("exact_sum_sq_diff", s));
    }
    Ok(MonteCarloReport {
        report: r.finish(),
        estimators,
    })
}

/// Exact `(var(Z), Σ_j E[(Z − Z'_j)²])` by enumerating every outcome of
/// `(X, X')`; only for finitely supported inputs with at most `10⁶` outcomes.
pub fn enumerate_classical(f: &ScalarExpr, dists: &[ScalarDistribution]) -> Result<(f64, f64)> {
    validate_dists(dists)?;
    f.validate(dists.len())?;
    let atoms = dists
        .iter()
        .map(|d| {
            d.atoms()
                .ok_or_else(|| Error::InvalidDistribution("enumeration needs finite support".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = atoms.len();
    let count = atoms
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.len() * a.len()));
    if count.is_none_or(|c| c > 1_000_000) {
        return Err(Error::InvalidArgument("too many outcomes to enumerate".into()));
    }
    let mut idx = vec![0usize; 2 * n];
    let (mut m1, mut m2, mut diff) = (0.0, 0.0, 0.0);
    loop {
        let mut p = 1.0;
        let mut x = vec![0.0; n];
        let mut xp = vec![0.0; n];
        for j in 0..n {
            let (a, pa) = atoms[j][idx[j]];
            let (b, pb) = atoms[j][idx[n + j]];
            x[j] = a;
            xp[j] = b;
            p *= pa * pb;
        }
        let (z, d) = classical_sample(f, &x, &xp);
        m1 += p * z;
        m2 += p * z * z;
        diff += p * d.iter().sum::<f64>();
        let mut k = 0;
        loop {
            if k == 2 * n {
                return Ok((m2 - m1 * m1, diff));
            }
            idx[k] += 1;
            if idx[k] < atoms[k % n].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// One term `(∏_j X_j^{e_j}) · A` of a matrix function.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTerm {
    pub exponents: Vec<u32>,
    pub coeff: LocalMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct MatrixTermRecord {
    exponents: Vec<u32>,
    matrix: MatrixRows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct MatrixFunctionRecord {
    dim: usize,
    n_inputs: usize,
    terms: Vec<MatrixTermRecord>,
}

/// `F(X) = Σ_t (∏_j X_j^{e_tj}) A_t` with Hermitian `d × d` coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixFunctionRecord", into = "MatrixFunctionRecord")]
pub struct MatrixFunction {
    dim: usize,
    n_inputs: usize,
    terms: Vec<MatrixTerm>,
}

impl TryFrom<MatrixFunctionRecord> for MatrixFunction {
    type Error = Error;
    fn try_from(rec: MatrixFunctionRecord) -> Result<Self> {
        let terms = rec
            .terms
            .iter()
            .map(|t| {
                Ok(MatrixTerm {
                    exponents: t.exponents.clone(),
                    coeff: matrix_from_rows(&t.matrix)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        MatrixFunction::new(rec.dim, rec.n_inputs, terms, &Tolerances::default())
    }
}

impl From<MatrixFunction> for MatrixFunctionRecord {
    fn from(f: MatrixFunction) -> Self {
        MatrixFunctionRecord {
            dim: f.dim,
            n_inputs: f.n_inputs,
            terms: f
                .terms
                .iter()
                .map(|t| MatrixTermRecord {
                    exponents: t.exponents.clone(),
                    matrix: matrix_to_rows(&t.coeff),
                })
                .collect(),
        }
    }
}

impl MatrixFunction {
    pub fn new(dim: usize, n_inputs: usize, terms: Vec<MatrixTerm>, tol: &Tolerances) -> Result<Self> {
        if dim == 0 || n_inputs == 0 {
            return Err(Error::InvalidArgument(
                "matrix function needs dim ≥ 1 and at least one input".into(),
            ));
        }
        for t in &terms {
            if t.exponents.len() != n_inputs {
                return Err(Error::Arity {
                    expected: n_inputs,
                    got: t.exponents.len(),
                });
            }
            if t.coeff.nrows() != dim || t.coeff.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    rows: t.coeff.nrows(),
                    cols: t.coeff.ncols(),
                });
            }
            let defect = matrix_hermitian_defect(&t.coeff);
            if defect > tol.hermitian {
                return Err(Error::NotSelfAdjoint(defect));
            }
        }
        Ok(MatrixFunction { dim, n_inputs, terms })
    }

    /// `A_0 + Σ_j X_j A_j`.
    pub fn linear(a0: Option<LocalMatrix>, coeffs: Vec<LocalMatrix>, tol: &Tolerances) -> Result<Self> {
        let n = coeffs.len();
        let dim = coeffs.first().or(a0.as_ref()).map_or(0, |m| m.nrows());
        let mut terms: Vec<MatrixTerm> = coeffs
            .into_iter()
            .enumerate()
            .map(|(j, coeff)| {
                let mut exponents = vec![0; n];
                exponents[j] = 1;
                MatrixTerm { exponents, coeff }
            })
            .collect();
        if let Some(a) = a0 {
            terms.push(MatrixTerm {
                exponents: vec![0; n.max(1)],
                coeff: a,
            });
        }
        MatrixFunction::new(dim, n.max(1), terms, tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn terms(&self) -> &[MatrixTerm] {
        &self.terms
    }

    /// Coefficients `A_j` when `F = A_0 + Σ X_j A_j`.
    pub fn linear_coefficients(&self) -> Option<Vec<LocalMatrix>> {
        let mut coeffs = vec![LocalMatrix::zeros(self.dim, self.dim); self.n_inputs];
        for t in &self.terms {
            let degree: u32 = t.exponents.iter().sum();
            match degree {
                0 => {}
                1 => {
                    let j = t.exponents.iter().position(|&e| e == 1).expect("degree one");
                    coeffs[j] += &t.coeff;
                }
                _ => return None,
            }
        }
        Some(coeffs)
    }

    pub fn eval(&self, x: &[f64]) -> LocalMatrix {
        let mut out = LocalMatrix::zeros(self.dim, self.dim);
        for t in &self.terms {
            let w: f64 = t.exponents.iter().zip(x).map(|(&e, v)| v.powi(e as i32)).product();
            out += &t.coeff * C64::new(w, 0.0);
        }
        out
    }

    /// `E F(X)` from the exact moments of independent inputs.
    pub fn expectation(&self, dists: &[ScalarDistribution]) -> LocalMatrix {
        let mut out = LocalMatrix::zeros(self.dim, self.dim);
        for t in &self.terms {
            let w: f64 = t.exponents.iter().zip(dists).map(|(&e, d)| d.moment(e)).product();
            out += &t.coeff * C64::new(w, 0.0);
        }
        out
    }
}

/// Normalization of the matrix trace in the Schatten norms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormConvention {
    /// `‖A‖_p^p = tr(|A|^p)/d`.
    #[default]
    Normalized,
    /// `‖A‖_p^p = tr(|A|^p)`.
    Unnormalized,
}

fn tr_sq(a: &LocalMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Estimates `E‖Z‖₂²` and `½ E‖Σ_j (Z − Z^{(j)})²‖₁` for `Z = F(X) − E F(X)`.
///
/// `E F` is computed exactly from the input moments. The sum of squares of
/// Hermitian matrices is positive, so its Schatten 1-norm is its trace.
/// For linear `F` the exact value `Σ_j var(X_j)‖A_j‖₂²` of both sides is
/// reported, and a step records whether the lhs estimate is within 3σ of it.
/// Moments 1..4 of `‖Z‖₂` and `‖Z^{(j)}‖₂` are compared in the notes.
pub fn matrix_efron_stein_mc(
    f: &MatrixFunction,
    dists: &[ScalarDistribution],
    n_samples: usize,
    seed: u64,
    convention: NormConvention,
) -> Result<MonteCarloReport> {
    validate_dists(dists)?;
    if dists.len() != f.n_inputs {
        return Err(Error::Arity {
            expected: f.n_inputs,
            got: dists.len(),
        });
    }
    check_samples(n_samples)?;
    let n = dists.len();
    let scale = match convention {
        NormConvention::Normalized => 1.0 / f.dim as f64,
        NormConvention::Unnormalized => 1.0,
    };
    let mean = f.expectation(dists);

    struct Sample {
        lhs: f64,
        rhs: f64,
        norm_z: f64,
        norm_zj: Vec<f64>,
    }
    let samples: Vec<Sample> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_stream(seed, i as u64);
            let (x, xp) = draw(dists, &mut rng);
            let z = f.eval(&x) - &mean;
            let mut buf = x.clone();
            let mut acc = LocalMatrix::zeros(f.dim, f.dim);
            let mut norm_zj = Vec::with_capacity(n);
            for j in 0..n {
                buf[j] = xp[j];
                let zj = f.eval(&buf) - &mean;
                buf[j] = x[j];
                norm_zj.push((scale * tr_sq(&zj)).sqrt());
                let d = &z - &zj;
                acc += &d * &d;
            }
            let lhs = scale * tr_sq(&z);
            Sample {
                lhs,
                rhs: 0.5 * scale * acc.trace().re,
                norm_z: lhs.sqrt(),
                norm_zj,
            }
        })
        .collect();

    let (lhs, lhs_se) = mean_and_se(samples.iter().map(|s| s.lhs), n_samples);
    let (rhs, rhs_se) = mean_and_se(samples.iter().map(|s| s.rhs), n_samples);
    let est = |label: &str, estimate: f64, std_error: f64| EstimatorReport {
        label: label.into(),
        estimate,
        std_error,
        n_samples,
        seed,
    };
    let estimators = vec![est("norm2_sq", lhs, lhs_se), est("half_norm1_sum_sq_diff", rhs, rhs_se)];
    let mut r = InequalityReport::inequality("matrix_efron_stein_mc", lhs, rhs, 0.0);
    r.tolerance = 3.0 * (lhs_se.powi(2) + rhs_se.powi(2)).sqrt();
    r.realization = Some(
        match convention {
            NormConvention::Normalized => "normalized",
            NormConvention::Unnormalized => "unnormalized",
        }
        .into(),
    );
    r.notes.push(Note::new("rhs_one_over_n", 2.0 * rhs / n as f64));

    if let Some(coeffs) = f.linear_coefficients() {
        let exact: f64 = coeffs
            .iter()
            .zip(dists)
            .map(|(a, d)| d.variance() * scale * tr_sq(a))
            .sum();
        r.notes.push(Note::new("exact_lhs", exact));
        r.notes.push(Note::new("exact_rhs", exact));
        let z_score = if lhs_se > 0.0 {
            (lhs - exact).abs() / lhs_se
        } else {
            0.0
        };
        r.push_step(
            "lhs estimate within 3 std errors of exact value",
            (lhs - exact).abs(),
            3.0 * lhs_se,
            (lhs - exact).abs() <= 3.0 * lhs_se,
        );
        r.notes.push(Note::new("exact_lhs_z", z_score));
    }

    let mut worst_z = 0.0f64;
    for j in 0..n {
        for k in 1..=4 {
            let diffs = samples.iter().map(|s| s.norm_z.powi(k) - s.norm_zj[j].powi(k));
            let (m, se) = mean_and_se(diffs, n_samples);
            let z = if se > 0.0 {
                m.abs() / se
            } else if m == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            worst_z = worst_z.max(z);
        }
    }
    r.notes.push(Note::new("same_distribution_max_z", worst_z));
    if worst_z > 3.0 {
        r.messages.push(format!(
            "moments of ||Z||_2 and ||Z^(j)||_2 differ by {worst_z:.2} std errors"
        ));
    }
    Ok(MonteCarloReport {
        report: r.finish(),
        estimators,
    })
}
