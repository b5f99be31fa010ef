//! Variance inequalities: the martingale lemma, Efron–Stein (scalar and
//! matrix valued), Steele, and the auxiliary trace inequalities.

use serde::{Deserialize, Serialize};

use crate::conditioning::{
    conditional_expectation, leave_one_out_residual, martingale_decomposition, reduced_expectation, subalgebra_defect,
};
use crate::element::{matrix_hermitian_defect, Element, LocalMatrix};
use crate::error::{Error, Result};
use crate::poly::NcPolynomial;
use crate::report::{InequalityReport, Note};
use crate::shape::{AlgebraShape, FactorSet};
use crate::spectral::{schatten_norm, variance_unchecked};
use crate::tolerance::Tolerances;

/// Where the replacement inputs `x'_j` come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CopyMode {
    /// A fresh tensor factor carrying an identically distributed copy.
    Extension,
    /// `x'_j = x_{j+1 mod n}`, another of the given inputs.
    LiteralReuse,
}

impl CopyMode {
    pub fn tag(self) -> &'static str {
        match self {
            CopyMode::Extension => "extension",
            CopyMode::LiteralReuse => "literal_reuse",
        }
    }
}

/// How the subalgebras carrying the matrix inputs sit inside `M_d(M)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixRealization {
    /// `U_j ∈ M_d ⊗ N_j`; the subalgebras share the matrix leg.
    MatrixLeg,
    /// `U_j ∈ 1_d ⊗ N_j`; strictly tensor independent.
    Strict,
}

impl MatrixRealization {
    pub fn tag(self) -> &'static str {
        match self {
            MatrixRealization::MatrixLeg => "md_tensor_nj",
            MatrixRealization::Strict => "scalar_d_tensor_nj",
        }
    }
}

pub(crate) fn validate_locals(
    locals: &[LocalMatrix],
    dims: impl Iterator<Item = usize>,
    tol: &Tolerances,
) -> Result<()> {
    let dims: Vec<usize> = dims.collect();
    if locals.len() != dims.len() {
        return Err(Error::Arity {
            expected: dims.len(),
            got: locals.len(),
        });
    }
    for (m, d) in locals.iter().zip(dims) {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let defect = matrix_hermitian_defect(m);
        if defect > tol.hermitian {
            return Err(Error::NotSelfAdjoint(defect));
        }
    }
    Ok(())
}

/// `x_j = locals[j]` placed at factor `j`.
pub fn embed_inputs(locals: &[LocalMatrix], shape: &AlgebraShape, tol: &Tolerances) -> Result<Vec<Element>> {
    validate_locals(locals, shape.factor_dims().iter().copied(), tol)?;
    locals
        .iter()
        .enumerate()
        .map(|(j, m)| Element::tensor_embed(m, j, shape))
        .collect()
}

fn sq(x: &Element) -> f64 {
    x.trace_of_product(x).re
}

fn diff_sq(a: &Element, b: &Element) -> f64 {
    sq(&(a - b))
}

/// `var(y) ≤ Σ_j τ((y − E_j y)²)`, with `E_j` onto the factors other than `j`.
///
/// Also records `τ(z_j²) ≤ τ((y − E_j y)²)` for the martingale differences.
pub fn lemma_variance_bound(
    f: &NcPolynomial,
    locals: &[LocalMatrix],
    shape: &AlgebraShape,
    tol: &Tolerances,
) -> Result<InequalityReport> {
    let xs = embed_inputs(locals, shape, tol)?;
    let y = f.eval(&xs)?;
    let zs = martingale_decomposition(&y, tol)?;
    let mut residuals = Vec::with_capacity(xs.len());
    for j in 0..shape.n_factors() {
        residuals.push(leave_one_out_residual(&y, j)?.1);
    }
    let mut r = InequalityReport::inequality(
        "lemma_variance_bound",
        variance_unchecked(&y),
        residuals.iter().sum(),
        tol.rel,
    );
    for (j, (z, res)) in zs.iter().zip(&residuals).enumerate() {
        r.step_le(
            format!("tau(z_{0}^2) <= tau((y - E_{0} y)^2)", j + 1),
            sq(z),
            *res,
            tol.rel,
        );
    }
    Ok(r.finish())
}

/// `var(y) ≤ ½ Σ_j τ((y − y'_j)²)` subject to `τ(y y'_j) ≤ ‖E_j y‖₂²` and
/// `τ(y'_j²) ≥ τ(y²)`.
///
/// In extension mode each `y'_j` lives in `shape ++ [d_j]` with the copy of
/// `x_j` on the appended factor; `y` is lifted by the identity. Both
/// hypotheses and the conclusion only involve traces of the subalgebra
/// generated by `y` and `y'_j`, so this agrees with the doubled algebra of
/// [`independent_copy_extension`](crate::independence::independent_copy_extension)
/// at a fraction of the dimension.
pub fn efron_stein_check(
    f: &NcPolynomial,
    locals: &[LocalMatrix],
    shape: &AlgebraShape,
    mode: CopyMode,
    tol: &Tolerances,
) -> Result<InequalityReport> {
    let xs = embed_inputs(locals, shape, tol)?;
    let y = f.eval(&xs)?;
    let n = xs.len();
    if mode == CopyMode::LiteralReuse && n < 2 {
        let mut r =
            InequalityReport::not_applicable("efron_stein", "literal reuse needs at least two inputs", n as f64, 2.0);
        r.realization = Some(mode.tag().into());
        return Ok(r);
    }
    let mut terms = Vec::with_capacity(n);
    let mut r = InequalityReport::inequality("efron_stein", 0.0, 0.0, tol.rel);
    let y_sq = sq(&y);
    for j in 0..n {
        let (ej, _) = leave_one_out_residual(&y, j)?;
        let (y_lift, yj) = match mode {
            CopyMode::Extension => {
                let ext = shape.extended(&[shape.dim(j)])?;
                let mut args = xs.iter().map(|x| x.lift(&ext)).collect::<Result<Vec<_>>>()?;
                args[j] = Element::tensor_embed(&locals[j], n, &ext)?;
                (y.lift(&ext)?, f.eval(&args)?)
            }
            CopyMode::LiteralReuse => {
                let mut args = xs.clone();
                args[j] = xs[(j + 1) % n].clone();
                (y.clone(), f.eval(&args)?)
            }
        };
        r.hypothesis_le(
            format!("tau(y y'_{0}) <= ||E_{0}(y)||_2^2", j + 1),
            y_lift.trace_of_product(&yj).re,
            ej.norm2_sq(),
            tol.rel,
        );
        r.hypothesis_ge(format!("tau(y'_{}^2) >= tau(y^2)", j + 1), sq(&yj), y_sq, tol.rel);
        terms.push(diff_sq(&y_lift, &yj));
    }
    let sum: f64 = terms.iter().sum();
    r.lhs = variance_unchecked(&y);
    r.rhs = 0.5 * sum;
    r.tolerance = tol.rel * r.rhs.abs().max(1.0);
    push_constant_notes(&mut r, sum, n);
    if mode == CopyMode::LiteralReuse {
        r.messages
            .push("replacement inputs reuse x_{j+1}; hypotheses are informational in this mode".into());
    }
    Ok(r.finish().with_realization(mode.tag()))
}

fn push_constant_notes(r: &mut InequalityReport, sum: f64, n: usize) {
    let one_over_n = if n == 0 { 0.0 } else { sum / n as f64 };
    r.notes.push(Note::new("rhs_half", 0.5 * sum));
    r.notes.push(Note::new("slack_half", 0.5 * sum - r.lhs));
    r.notes.push(Note::new("rhs_one_over_n", one_over_n));
    r.notes.push(Note::new("slack_one_over_n", one_over_n - r.lhs));
}

/// `var(y) ≤ Σ_j τ((y − y_j)²)` where `y_j = f_js[j](x)` does not use `x_j`.
///
/// Records `τ((y − E_j y)²) ≤ τ((y − y_j)²)` per `j`. Fails with
/// [`Error::ForbiddenInput`] when `f_js[j]` mentions input `j`.
pub fn steele_check(
    f: &NcPolynomial,
    locals: &[LocalMatrix],
    shape: &AlgebraShape,
    f_js: &[NcPolynomial],
    tol: &Tolerances,
) -> Result<InequalityReport> {
    if f_js.len() != f.inputs().len() {
        return Err(Error::Arity {
            expected: f.inputs().len(),
            got: f_js.len(),
        });
    }
    for (j, g) in f_js.iter().enumerate() {
        if g.inputs() != f.inputs() {
            return Err(Error::InvalidArgument(format!(
                "f_{} must use the same inputs as f",
                j + 1
            )));
        }
        if g.references(j) {
            return Err(Error::ForbiddenInput {
                index: j,
                name: f.inputs()[j].clone(),
            });
        }
    }
    let xs = embed_inputs(locals, shape, tol)?;
    let y = f.eval(&xs)?;
    let mut r = InequalityReport::inequality("steele", variance_unchecked(&y), 0.0, tol.rel);
    let mut rhs = 0.0;
    let mut lemma_rhs = 0.0;
    for (j, g) in f_js.iter().enumerate() {
        let yj = g.eval(&xs)?;
        let term = diff_sq(&y, &yj);
        let (_, res) = leave_one_out_residual(&y, j)?;
        r.step_le(
            format!("tau((y - E_{0} y)^2) <= tau((y - y_{0})^2)", j + 1),
            res,
            term,
            tol.rel,
        );
        rhs += term;
        lemma_rhs += res;
    }
    r.rhs = rhs;
    r.tolerance = tol.rel * rhs.abs().max(1.0);
    r.notes.push(Note::new("lemma_rhs", lemma_rhs));
    Ok(r.finish())
}

/// `f_j = f` with every word containing input `j` dropped.
pub fn omit_one_polynomials(f: &NcPolynomial) -> Vec<NcPolynomial> {
    (0..f.inputs().len()).map(|j| f.without_input(j)).collect()
}

/// Matrix valued Efron–Stein in `M_d(M) = [d] ++ inner_shape`:
/// `τ(tr((V − τ(V))²)) ≤ ½ τ(tr(Σ_j (V − V^{(j)})²))`, with `τ(V)` the
/// entrywise trace, `tr` unnormalized over the matrix leg.
///
/// `locals[j]` is a `(d·d_j)`-square Hermitian matrix on factors `{0, j+1}`.
/// The realization selects the subalgebra `E_j` conditions onto: all factors
/// but `j+1` ([`MatrixRealization::MatrixLeg`]) or only the inner ones
/// ([`MatrixRealization::Strict`], which also requires each `U_j` to be
/// trivial on the matrix leg).
pub fn matrix_efron_stein_check(
    f: &NcPolynomial,
    d: usize,
    locals: &[LocalMatrix],
    inner_shape: &AlgebraShape,
    mode: CopyMode,
    realization: MatrixRealization,
    tol: &Tolerances,
) -> Result<InequalityReport> {
    let shape = inner_shape.with_matrix_leg(d)?;
    let n = inner_shape.n_factors();
    validate_locals(locals, inner_shape.factor_dims().iter().map(|&dj| d * dj), tol)?;
    let sets = (0..n)
        .map(|j| FactorSet::new(&shape, [0, j + 1]))
        .collect::<Result<Vec<_>>>()?;
    let us = locals
        .iter()
        .zip(&sets)
        .map(|(m, s)| Element::embed_on(m, s, &shape))
        .collect::<Result<Vec<_>>>()?;
    let tags = format!("{}/{}", realization.tag(), mode.tag());

    if realization == MatrixRealization::Strict {
        let mut worst = 0.0f64;
        for (j, u) in us.iter().enumerate() {
            worst = worst.max(subalgebra_defect(u, &FactorSet::singleton(&shape, j + 1)?)?);
        }
        if worst > tol.operator_identity {
            let r = InequalityReport::not_applicable(
                "matrix_efron_stein",
                "inputs trivial on the matrix leg",
                worst,
                tol.operator_identity,
            );
            return Ok(r.with_realization(tags));
        }
    }
    if mode == CopyMode::LiteralReuse && n < 2 {
        let r = InequalityReport::not_applicable(
            "matrix_efron_stein",
            "literal reuse needs at least two inputs",
            n as f64,
            2.0,
        );
        return Ok(r.with_realization(tags));
    }

    let v = f.eval(&us)?;
    let df = d as f64;
    let leg = FactorSet::singleton(&shape, 0)?;
    let tau_v = conditional_expectation(&v, &leg)?;
    let lhs = df * diff_sq(&v, &tau_v);
    let v_sq = sq(&v);
    let mut r = InequalityReport::inequality("matrix_efron_stein", lhs, 0.0, tol.rel);
    let mut sum = 0.0;
    for j in 0..n {
        let keep = match realization {
            MatrixRealization::MatrixLeg => FactorSet::all_but(&shape, j + 1)?,
            MatrixRealization::Strict => FactorSet::new(&shape, (1..=n).filter(|&k| k != j + 1))?,
        };
        let ej = conditional_expectation(&v, &keep)?;
        let (v_lift, vj) = match mode {
            CopyMode::Extension => {
                let ext = shape.extended(&[inner_shape.dim(j)])?;
                let mut args = us.iter().map(|u| u.lift(&ext)).collect::<Result<Vec<_>>>()?;
                args[j] = Element::embed_on(&locals[j], &FactorSet::new(&ext, [0, n + 1])?, &ext)?;
                (v.lift(&ext)?, f.eval(&args)?)
            }
            CopyMode::LiteralReuse => {
                let mut args = us.clone();
                args[j] = us[(j + 1) % n].clone();
                (v.clone(), f.eval(&args)?)
            }
        };
        r.hypothesis_le(
            format!("tau_bar(V V^({0})) <= ||E_{0}(V)||_2^2", j + 1),
            v_lift.trace_of_product(&vj).re,
            ej.norm2_sq(),
            tol.rel,
        );
        r.hypothesis_ge(
            format!("tau_bar((V^({}))^2) >= tau_bar(V^2)", j + 1),
            sq(&vj),
            v_sq,
            tol.rel,
        );
        sum += df * diff_sq(&v_lift, &vj);
    }
    r.rhs = 0.5 * sum;
    r.tolerance = tol.rel * r.rhs.abs().max(1.0);
    r.step_le(
        "lhs <= tau(tr((V - tau_bar(V))^2))",
        lhs,
        df * variance_unchecked(&v),
        tol.rel,
    );
    let a = reduced_expectation(&v, &leg)?;
    let k = kadison_step_check(&a, tol)?;
    r.push_step("(1/d)(tr tau(V))^2 <= tr(tau(V)^2)", k.lhs, k.rhs, k.passed);
    push_constant_notes(&mut r, sum, n);
    Ok(r.finish().with_realization(tags))
}

/// `(1/d)(tr A)² ≤ tr(A²)` for Hermitian `A`, with equality exactly for
/// scalar matrices.
///
/// The gap equals `‖A − tr̄(A)·1‖_F²`; note `equality` is 1 when the gap is
/// within tolerance.
pub fn kadison_step_check(a: &LocalMatrix, tol: &Tolerances) -> Result<InequalityReport> {
    let defect = matrix_hermitian_defect(a);
    if defect > tol.hermitian {
        return Err(Error::NotSelfAdjoint(defect));
    }
    let d = a.nrows();
    if d == 0 || a.ncols() != d {
        return Err(Error::InvalidArgument("expected a nonempty square matrix".into()));
    }
    let tr = a.trace().re;
    let tr_sq = a.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let mean = tr / d as f64;
    let scalar_defect = a
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let (i, j) = (k % d, k / d);
            if i == j {
                (z - mean).norm_sqr()
            } else {
                z.norm_sqr()
            }
        })
        .sum::<f64>()
        .sqrt();
    let mut r = InequalityReport::inequality("kadison_step", tr * tr / d as f64, tr_sq, tol.rel);
    let gap = r.rhs - r.lhs;
    r.push_step(
        "tr(A^2) - (1/d)(tr A)^2 == ||A - mean(A)||_F^2",
        gap,
        scalar_defect * scalar_defect,
        (gap - scalar_defect * scalar_defect).abs() <= r.tolerance,
    );
    let equality = gap.abs() <= r.tolerance;
    r.notes.push(Note::new("scalar_defect", scalar_defect));
    r.notes.push(Note::new("equality", if equality { 1.0 } else { 0.0 }));
    Ok(r.finish())
}

/// `‖S‖₂² ≤ ‖S‖₁² + Σ_j ‖x_j‖₂²` for `S = Σ_j x_j`.
pub fn norm_inequality_check(
    locals: &[LocalMatrix],
    shape: &AlgebraShape,
    tol: &Tolerances,
) -> Result<InequalityReport> {
    let xs = embed_inputs(locals, shape, tol)?;
    let s = xs.iter().fold(Element::zero(shape), |acc, x| &acc + x);
    let one = schatten_norm(&s, 1.0, tol)?;
    let parts: f64 = xs.iter().map(Element::norm2_sq).sum();
    let mut r = InequalityReport::inequality("norm_inequality", s.norm2_sq(), one * one + parts, tol.rel);
    r.notes.push(Note::new("norm1", one));
    Ok(r.finish())
}

/// `τ(y)² ≤ τ(y²)` for self-adjoint `y`.
pub fn trace_jensen_check(y: &Element, tol: &Tolerances) -> Result<InequalityReport> {
    y.ensure_self_adjoint(tol.hermitian)?;
    let t = y.trace_re();
    Ok(InequalityReport::inequality("trace_jensen", t * t, sq(y), tol.rel).finish())
}
