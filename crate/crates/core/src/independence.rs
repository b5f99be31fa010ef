//! Boolean, tensor and (asymptotic) free independence.

use rayon::prelude::*;

use crate::element::{matrix_hermitian_defect, Element, LocalMatrix};
use crate::error::{Error, Result};
use crate::random::{haar_unitary, random_hermitian, sample_stream};
use crate::report::{InequalityReport, Note};
use crate::shape::{AlgebraShape, FactorSet};
use crate::spectral::{hermitian_eigenvalues, shifted_second_moment, variance};
use crate::tolerance::Tolerances;
use crate::C64;

/// `τ(xy) = τ(x)τ(y)`.
pub fn boolean_independence_check(x: &Element, y: &Element, tol: &Tolerances) -> Result<InequalityReport> {
    x.ensure_same_shape(y)?;
    let err = (x.trace_of_product(y) - x.trace() * y.trace()).norm();
    let thr = tol.trace_identity * (x.norm2() * y.norm2()).max(1.0);
    Ok(InequalityReport::identity("boolean_independence", err, thr).finish())
}

/// Checks `τ(∏_i ∏_k a_{ki}) = ∏_k τ(∏_i a_{ki})` for one family, where
/// `family[k][i]` is the `i`-th letter drawn from subalgebra `k`.
///
/// Returns the relative error scaled by `max(1, ∏ ‖a_{ki}‖₂)`.
pub fn tensor_factorization_error(family: &[Vec<Element>]) -> Result<f64> {
    let Some(first) = family.first().and_then(|row| row.first()) else {
        return Ok(0.0);
    };
    let shape = first.shape().clone();
    let m = family[0].len();
    if family.iter().any(|row| row.len() != m) {
        return Err(Error::InvalidArgument(
            "every subalgebra needs the same number of letters".into(),
        ));
    }
    let mut word = Element::identity(&shape);
    let mut scale = 1.0f64;
    for i in 0..m {
        for row in family {
            row[i].ensure_same_shape(&word)?;
            word = &word * &row[i];
            scale *= row[i].norm2();
        }
    }
    let lhs = word.trace();
    let mut rhs = C64::new(1.0, 0.0);
    for row in family {
        let p = row[1..].iter().fold(row[0].clone(), |acc, a| &acc * a);
        rhs *= p.trace();
    }
    Ok((lhs - rhs).norm() / scale.max(1.0))
}

/// Fuzzes the tensor-independence factorization for the subalgebras generated
/// by pairwise disjoint factor sets.
///
/// Each sample draws a word length `m ≤ max_word_len` and random Hermitian
/// letters on each set from substream `(seed, sample)`.
pub fn tensor_independence_check(
    shape: &AlgebraShape,
    factor_sets: &[FactorSet],
    max_word_len: usize,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<InequalityReport> {
    for (a, sa) in factor_sets.iter().enumerate() {
        if !sa.matches(shape) {
            return Err(Error::InvalidArgument("factor set does not match shape".into()));
        }
        for sb in &factor_sets[..a] {
            if let Some(k) = sa.intersection_witness(sb) {
                return Err(Error::OverlappingFactorSets(k));
            }
        }
    }
    if max_word_len == 0 {
        return Err(Error::InvalidArgument("max_word_len must be at least 1".into()));
    }
    let errors: Vec<(usize, f64)> = (0..samples)
        .into_par_iter()
        .map(|s| -> Result<(usize, f64)> {
            let mut rng = sample_stream(seed, s as u64);
            let m = rand::Rng::random_range(&mut rng, 1..=max_word_len);
            let family = factor_sets
                .iter()
                .map(|set| {
                    (0..m)
                        .map(|_| Element::embed_on(&random_hermitian(&mut rng, set.local_dim(shape)), set, shape))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((m, tensor_factorization_error(&family)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let (worst_idx, worst) = errors.iter().enumerate().fold(
        (0usize, 0.0f64),
        |best, (i, &(_, e))| if e > best.1 { (i, e) } else { best },
    );
    let mut r = InequalityReport::identity("tensor_independence", worst, tol.operator_identity);
    r.notes.push(Note::new("samples", samples as f64));
    if worst > tol.operator_identity {
        r.messages.push(format!(
            "witness: sample {worst_idx} (seed {seed}), word length {}",
            errors[worst_idx].0
        ));
    }
    Ok(r.finish())
}

/// `var(x) = inf{τ((x − y)²) : y self-adjoint, Boolean independent of x}`.
///
/// Candidates failing the Boolean independence check are skipped with a
/// message. The infimum is taken over the admissible candidates together
/// with the attaining candidate `τ(x)·1`; each admissible candidate must
/// dominate `var(x)`.
pub fn boolean_variance_infimum_check(
    x: &Element,
    candidates: &[Element],
    tol: &Tolerances,
) -> Result<InequalityReport> {
    let var = variance(x, tol)?;
    let mean = x.trace_re();
    let attained = shifted_second_moment(x, mean);
    let mut best = attained;
    let mut steps = Vec::new();
    let mut messages = Vec::new();
    let mut skipped = 0usize;
    for (i, y) in candidates.iter().enumerate() {
        x.ensure_same_shape(y)?;
        if !y.is_self_adjoint(tol.hermitian) || !boolean_independence_check(x, y, tol)?.passed {
            skipped += 1;
            messages.push(format!(
                "candidate {i} skipped: not self-adjoint and Boolean independent of x"
            ));
            continue;
        }
        let d = x - y;
        let v = d.trace_of_product(&d).re;
        best = best.min(v);
        steps.push((format!("var(x) <= tau((x - y_{i})^2)"), var, v));
    }
    let mut r = InequalityReport::inequality("boolean_variance_infimum", var, best, tol.rel);
    for (label, l, v) in steps {
        r.step_le(label, l, v, tol.rel);
    }
    r.push_step(
        "tau((x - tau(x)1)^2) == var(x)",
        attained,
        var,
        (attained - var).abs() <= tol.moment_identity * var.abs().max(1.0),
    );
    r.notes
        .push(Note::new("admissible", (candidates.len() - skipped) as f64));
    r.notes.push(Note::new("skipped", skipped as f64));
    r.messages = messages;
    Ok(r.finish())
}

/// Originals and independent copies living in one doubled algebra.
#[derive(Debug, Clone)]
pub struct CopyExtension {
    pub shape: AlgebraShape,
    pub originals: Vec<Element>,
    pub copies: Vec<Element>,
}

fn check_locals(locals: &[LocalMatrix], shape: &AlgebraShape) -> Result<()> {
    if locals.len() != shape.n_factors() {
        return Err(Error::Arity {
            expected: shape.n_factors(),
            got: locals.len(),
        });
    }
    for (k, m) in locals.iter().enumerate() {
        let d = shape.dim(k);
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
    }
    Ok(())
}

/// Places `locals[j]` at factor `j` of `[d_1..d_n, d_1..d_n]` and its copy at
/// factor `n + j`.
pub fn independent_copy_extension(
    locals: &[LocalMatrix],
    shape: &AlgebraShape,
    tol: &Tolerances,
) -> Result<CopyExtension> {
    check_locals(locals, shape)?;
    for m in locals {
        let defect = matrix_hermitian_defect(m);
        if defect > tol.hermitian {
            return Err(Error::NotSelfAdjoint(defect));
        }
    }
    let n = shape.n_factors();
    let ext = shape.extended(shape.factor_dims())?;
    let originals = (0..n)
        .map(|j| Element::tensor_embed(&locals[j], j, &ext))
        .collect::<Result<Vec<_>>>()?;
    let copies = (0..n)
        .map(|j| Element::tensor_embed(&locals[j], n + j, &ext))
        .collect::<Result<Vec<_>>>()?;
    Ok(CopyExtension {
        shape: ext,
        originals,
        copies,
    })
}

/// `τ(x_j^k) = τ(x'_j^k)` for `k ≤ max_moment`; reports the worst gap.
pub fn copy_moment_check(ext: &CopyExtension, max_moment: u32, tol: &Tolerances) -> InequalityReport {
    let mut worst = 0.0f64;
    for (x, c) in ext.originals.iter().zip(&ext.copies) {
        let (mut px, mut pc) = (x.clone(), c.clone());
        for k in 1..=max_moment {
            if k > 1 {
                px = &px * x;
                pc = &pc * c;
            }
            let s = px.norm2().max(1.0);
            worst = worst.max((px.trace() - pc.trace()).norm() / s);
        }
    }
    InequalityReport::identity("copy_moments", worst, tol.trace_identity).finish()
}

/// Empirical mean of `|τ(å U b̊ U* å U b̊ U*)|` over Haar unitaries `U`,
/// with `å = A − τ(A)` and `b̊ = B − τ(B)`.
///
/// Passes when the mean is at most `constant / dim`. By unitary invariance
/// of Haar measure, `A` and `B` are replaced by their eigenvalue diagonals,
/// which leaves the distribution of the statistic unchanged.
pub fn asymptotic_freeness_diagnostic(
    a: &LocalMatrix,
    b: &LocalMatrix,
    samples: usize,
    seed: u64,
    constant: f64,
    tol: &Tolerances,
) -> Result<InequalityReport> {
    let dim = a.nrows();
    if a.ncols() != dim || b.nrows() != dim || b.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            rows: b.nrows(),
            cols: b.ncols(),
        });
    }
    for m in [a, b] {
        let defect = matrix_hermitian_defect(m);
        if defect > tol.hermitian {
            return Err(Error::NotSelfAdjoint(defect));
        }
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    let shape = AlgebraShape::with_cap(vec![dim], usize::MAX)?;
    let centered_spectrum = |m: &LocalMatrix| {
        let e = Element::new(shape.clone(), m.clone()).expect("square");
        let mean = e.trace_re();
        hermitian_eigenvalues(&e)
            .into_iter()
            .map(|l| l - mean)
            .collect::<Vec<f64>>()
    };
    let alpha = centered_spectrum(a);
    let beta = centered_spectrum(b);

    let stats: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = sample_stream(seed, s as u64);
            let u = haar_unitary(&mut rng, dim);
            let mut ub = u.clone();
            for (j, &bj) in beta.iter().enumerate() {
                for v in ub.column_mut(j).iter_mut() {
                    *v *= bj;
                }
            }
            let m = &ub * u.adjoint();
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..dim {
                for j in 0..dim {
                    acc += m[(i, j)] * m[(j, i)] * (alpha[i] * alpha[j]);
                }
            }
            (acc / dim as f64).norm()
        })
        .collect();
    let mean = stats.iter().sum::<f64>() / samples as f64;
    let var = if samples > 1 {
        stats.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64
    } else {
        0.0
    };
    let bound = constant / dim as f64;
    let mut r = InequalityReport::inequality("asymptotic_freeness", mean, bound, 0.0);
    r.notes.push(Note::new("dim", dim as f64));
    r.notes.push(Note::new("samples", samples as f64));
    r.notes.push(Note::new("std_error", (var / samples as f64).sqrt()));
    Ok(r.finish())
}
