//! Conditional expectations onto tensor-factor subalgebras and the
//! martingale-difference machinery built on them.
//!
//! For a factor set `S`, `E_S(x)` is the normalized partial trace of `x` over
//! the factors outside `S`, tensored back with the identity there. It is the
//! unique trace-preserving bimodule map onto the subalgebra generated by `S`.
//!
//! Along the filtration of prefixes `{0..j}` we write `E'_j` for the
//! expectation onto the first `j` factors (`E'_0(x) = τ(x)·1`) and `E_j` for
//! the expectation onto every factor except factor `j − 1`.

use crate::element::{Element, LocalMatrix};
use crate::error::{Error, Result};
use crate::report::{InequalityReport, Note};
use crate::shape::{AlgebraShape, FactorSet, FactorSplit};
use crate::spectral::variance_unchecked;
use crate::tolerance::Tolerances;
use crate::C64;

fn check_set(x: &Element, set: &FactorSet) -> Result<()> {
    if set.matches(x.shape()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "factor set over {} factors used with shape {:?}",
            set.n_factors(),
            x.shape().factor_dims()
        )))
    }
}

/// The compressed expectation: the `D_S × D_S` matrix
/// `(1/D_c) Σ_t x[(a,t),(b,t)]` obtained by normalized partial trace over the
/// factors outside `set`.
pub fn reduced_expectation(x: &Element, set: &FactorSet) -> Result<LocalMatrix> {
    check_set(x, set)?;
    let split = FactorSplit::new(x.shape(), set);
    let (di, dc) = (split.inner_dim, split.outer_dim);
    let m = x.matrix();
    let inv = 1.0 / dc as f64;
    Ok(LocalMatrix::from_fn(di, di, |a, b| {
        let mut acc = C64::new(0.0, 0.0);
        for t in 0..dc {
            acc += m[(split.full[a * dc + t], split.full[b * dc + t])];
        }
        acc * inv
    }))
}

/// `E_S(x)`.
pub fn conditional_expectation(x: &Element, set: &FactorSet) -> Result<Element> {
    check_set(x, set)?;
    if set.is_full() {
        return Ok(x.clone());
    }
    if set.is_empty() {
        return Ok(Element::scalar(x.shape(), x.trace()));
    }
    let red = reduced_expectation(x, set)?;
    Element::embed_on(&red, set, x.shape())
}

/// `E'_j`: expectation onto the first `j` factors.
pub fn prefix_expectation(x: &Element, j: usize) -> Result<Element> {
    conditional_expectation(x, &FactorSet::prefix(x.shape(), j)?)
}

/// `E_j`: expectation onto every factor except `factor`.
pub fn leave_one_out_expectation(x: &Element, factor: usize) -> Result<Element> {
    conditional_expectation(x, &FactorSet::all_but(x.shape(), factor)?)
}

/// `‖E_S(x) − x‖₂`: zero exactly when `x` lies in the `S`-subalgebra.
pub fn subalgebra_defect(x: &Element, set: &FactorSet) -> Result<f64> {
    Ok(conditional_expectation(x, set)?.dist2(x))
}

fn scale(values: &[f64]) -> f64 {
    values.iter().product::<f64>().max(1.0)
}

/// `E_S(axb) = a E_S(x) b` for `a, b` in the `S`-subalgebra.
pub fn module_property_check(
    a: &Element,
    x: &Element,
    b: &Element,
    set: &FactorSet,
    tol: &Tolerances,
) -> Result<InequalityReport> {
    a.ensure_same_shape(x)?;
    b.ensure_same_shape(x)?;
    const NAME: &str = "module_property";
    for (label, e) in [("a in subalgebra", a), ("b in subalgebra", b)] {
        let defect = subalgebra_defect(e, set)?;
        let thr = tol.operator_identity * e.norm2().max(1.0);
        if defect > thr {
            return Ok(InequalityReport::not_applicable(NAME, label, defect, thr));
        }
    }
    let lhs = conditional_expectation(&(&(a * x) * b), set)?;
    let rhs = &(a * &conditional_expectation(x, set)?) * b;
    let err = lhs.dist2(&rhs);
    let thr = tol.operator_identity * scale(&[a.norm2(), x.norm2(), b.norm2()]);
    Ok(InequalityReport::identity(NAME, err, thr).finish())
}

/// `τ(E_S(x)) = τ(x)`.
pub fn trace_preservation_check(x: &Element, set: &FactorSet, tol: &Tolerances) -> Result<InequalityReport> {
    let e = conditional_expectation(x, set)?;
    let err = (e.trace() - x.trace()).norm();
    Ok(InequalityReport::identity("trace_preservation", err, tol.trace_identity * x.norm2().max(1.0)).finish())
}

/// `E'_j ∘ E_j = E'_{j−1} = E'_j ∘ E'_{j−1}` applied to `y`, for `1 ≤ j ≤ n`.
pub fn tower_identity_check(y: &Element, j: usize, tol: &Tolerances) -> Result<InequalityReport> {
    y.ensure_self_adjoint(tol.hermitian)?;
    let n = y.shape().n_factors();
    if j == 0 || j > n {
        return Err(Error::FactorOutOfRange { index: j, n_factors: n });
    }
    let prev = prefix_expectation(y, j - 1)?;
    let first = prefix_expectation(&leave_one_out_expectation(y, j - 1)?, j)?.dist2(&prev);
    let second = prefix_expectation(&prev, j)?.dist2(&prev);
    let mut r = InequalityReport::identity(
        "tower_identity",
        first.max(second),
        tol.operator_identity * y.norm2().max(1.0),
    );
    r.notes.push(Note::new("j", j as f64));
    r.notes.push(Note::new("leave_one_out_error", first));
    r.notes.push(Note::new("prefix_error", second));
    Ok(r.finish())
}

/// `z_j = E'_j(y) − E'_{j−1}(y)` for `j = 1..=n`.
pub fn martingale_decomposition(y: &Element, tol: &Tolerances) -> Result<Vec<Element>> {
    y.ensure_self_adjoint(tol.hermitian)?;
    let n = y.shape().n_factors();
    let prefixes = (0..=n).map(|j| prefix_expectation(y, j)).collect::<Result<Vec<_>>>()?;
    Ok(prefixes.windows(2).map(|w| &w[1] - &w[0]).collect())
}

/// Martingale differences sum to `y − τ(y)1` and are pairwise
/// trace-orthogonal. The reported error is `max_{i≠j} |τ(z_i z_j)|`.
pub fn martingale_check(y: &Element, tol: &Tolerances) -> Result<InequalityReport> {
    let z = martingale_decomposition(y, tol)?;
    let centered = y.centered();
    let total = z.iter().fold(Element::zero(y.shape()), |acc, zj| acc + zj);
    let sum_err = total.dist2(&centered);
    let mut orth = 0.0f64;
    for i in 0..z.len() {
        for j in 0..i {
            orth = orth.max(z[i].trace_of_product(&z[j]).norm());
        }
    }
    let s = y.norm2().max(1.0);
    let mut r = InequalityReport::identity("martingale_orthogonality", orth, tol.operator_identity * s * s);
    r.push_step(
        "sum z_j == y - tau(y)",
        sum_err,
        0.0,
        sum_err <= tol.operator_identity * s,
    );
    let sa = z.iter().map(Element::self_adjoint_defect).fold(0.0, f64::max);
    r.push_step("z_j self-adjoint", sa, 0.0, sa <= tol.hermitian * s);
    Ok(r.finish())
}

/// `var(y) = Σ_j τ(z_j²)`.
pub fn variance_additivity_check(y: &Element, tol: &Tolerances) -> Result<InequalityReport> {
    let z = martingale_decomposition(y, tol)?;
    let var = variance_unchecked(y);
    let sum: f64 = z.iter().map(|zj| zj.trace_of_product(zj).re).sum();
    let err = (var - sum).abs();
    let mut r = InequalityReport::identity("variance_additivity", err, tol.moment_identity * var.abs().max(1.0));
    r.notes.push(Note::new("variance", var));
    r.notes.push(Note::new("sum_tau_z_sq", sum));
    Ok(r.finish())
}

/// `z_j = E'_j(y − E_j(y))` for every `j`; reports the worst ‖·‖₂ gap.
pub fn martingale_projection_check(y: &Element, tol: &Tolerances) -> Result<InequalityReport> {
    let z = martingale_decomposition(y, tol)?;
    let mut worst = 0.0f64;
    for (k, zj) in z.iter().enumerate() {
        let j = k + 1;
        let inner = y - &leave_one_out_expectation(y, k)?;
        worst = worst.max(zj.dist2(&prefix_expectation(&inner, j)?));
    }
    Ok(InequalityReport::identity(
        "martingale_projection",
        worst,
        tol.operator_identity * y.norm2().max(1.0),
    )
    .finish())
}

/// `E_{S1 ∪ S2}(x) = E_{S1}(x)` when `x` is supported away from `S2` and the
/// sets are disjoint.
pub fn conditional_independence_check(
    x: &Element,
    s1: &FactorSet,
    s2: &FactorSet,
    tol: &Tolerances,
) -> Result<InequalityReport> {
    const NAME: &str = "conditional_independence";
    check_set(x, s1)?;
    check_set(x, s2)?;
    if let Some(k) = s1.intersection_witness(s2) {
        return Ok(InequalityReport::not_applicable(
            NAME,
            "S1 and S2 disjoint",
            k as f64,
            f64::NAN,
        ));
    }
    let support = subalgebra_defect(x, &s2.complement())?;
    let thr = tol.operator_identity * x.norm2().max(1.0);
    if support > thr {
        return Ok(InequalityReport::not_applicable(
            NAME,
            "x supported outside S2",
            support,
            thr,
        ));
    }
    let err = conditional_expectation(x, &s1.union(s2))?.dist2(&conditional_expectation(x, s1)?);
    Ok(InequalityReport::identity(NAME, err, thr).finish())
}

/// `‖E_S(x)‖₂ ≤ ‖x‖₂`.
pub fn contraction_check(x: &Element, set: &FactorSet, tol: &Tolerances) -> Result<InequalityReport> {
    let e = conditional_expectation(x, set)?;
    Ok(InequalityReport::inequality("contraction", e.norm2(), x.norm2(), tol.rel).finish())
}

/// `τ(xy) = τ(y E_S(x))` for `y` in the `S`-subalgebra.
pub fn trace_pairing_check(x: &Element, y: &Element, set: &FactorSet, tol: &Tolerances) -> Result<InequalityReport> {
    const NAME: &str = "trace_pairing";
    x.ensure_same_shape(y)?;
    let defect = subalgebra_defect(y, set)?;
    let thr = tol.operator_identity * y.norm2().max(1.0);
    if defect > thr {
        return Ok(InequalityReport::not_applicable(NAME, "y in subalgebra", defect, thr));
    }
    let err = (x.trace_of_product(y) - y.trace_of_product(&conditional_expectation(x, set)?)).norm();
    Ok(InequalityReport::identity(NAME, err, tol.trace_identity * scale(&[x.norm2(), y.norm2()])).finish())
}

/// `E_S ∘ E_T = E_S` for `S ⊆ T`.
pub fn nested_tower_check(
    x: &Element,
    inner: &FactorSet,
    outer: &FactorSet,
    tol: &Tolerances,
) -> Result<InequalityReport> {
    const NAME: &str = "nested_tower";
    if !inner.is_subset_of(outer) {
        return Ok(InequalityReport::not_applicable(NAME, "S subset of T", 0.0, 1.0));
    }
    let lhs = conditional_expectation(&conditional_expectation(x, outer)?, inner)?;
    let err = lhs.dist2(&conditional_expectation(x, inner)?);
    Ok(InequalityReport::identity(NAME, err, tol.operator_identity * x.norm2().max(1.0)).finish())
}

/// The two expectations appearing in the variance bound for factor `j`
/// (0-based): `E_j(y)` and the residual `τ((y − E_j y)²)`.
pub fn leave_one_out_residual(y: &Element, factor: usize) -> Result<(Element, f64)> {
    let e = leave_one_out_expectation(y, factor)?;
    let d = y - &e;
    let r = d.trace_of_product(&d).re;
    Ok((e, r))
}

/// Shape helper used by checks that build sets from 0-based indices.
pub fn factor_set(shape: &AlgebraShape, indices: &[usize]) -> Result<FactorSet> {
    FactorSet::new(shape, indices.iter().copied())
}
