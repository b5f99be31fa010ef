//! Spectral calculus for self-adjoint elements: eigenprojections, Schatten
//! norms, variance, tail probabilities and the layer-cake formula.

use std::ops::Range;

use nalgebra::SymmetricEigen;

use crate::element::{Element, LocalMatrix};
use crate::error::{Error, Result};
use crate::report::{InequalityReport, Note};
use crate::shape::AlgebraShape;
use crate::tolerance::Tolerances;
use crate::C64;

/// Eigenvalues (distinct, ascending) with their eigenspaces.
///
/// Projections are materialized on demand; a 256-dimensional element with
/// simple spectrum would otherwise hold 256 dense projections.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    shape: AlgebraShape,
    eigenvalues: Vec<f64>,
    groups: Vec<Range<usize>>,
    /// Orthonormal eigenvectors as columns, sorted by eigenvalue.
    vectors: LocalMatrix,
    /// Raw eigenvalues, one per column of `vectors`.
    raw: Vec<f64>,
}

impl SpectralDecomposition {
    /// Decompose a self-adjoint element. Eigenvalues closer than
    /// `tol.eig · max(1, max|λ|)` share an eigenspace.
    pub fn new(x: &Element, tol: &Tolerances) -> Result<Self> {
        x.ensure_self_adjoint(tol.hermitian)?;
        let h = x.hermitian_part();
        let eig = SymmetricEigen::new(h.matrix().clone());
        let d = x.dim();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let raw: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = LocalMatrix::from_fn(d, d, |i, c| eig.eigenvectors[(i, order[c])]);

        let scale = raw.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let gap = tol.eig * scale;
        let mut groups: Vec<Range<usize>> = Vec::new();
        let mut start = 0;
        for k in 1..=d {
            if k == d || raw[k] - raw[k - 1] > gap {
                groups.push(start..k);
                start = k;
            }
        }
        let eigenvalues = groups
            .iter()
            .map(|g| raw[g.clone()].iter().sum::<f64>() / g.len() as f64)
            .collect();
        Ok(SpectralDecomposition {
            shape: x.shape().clone(),
            eigenvalues,
            groups,
            vectors,
            raw,
        })
    }

    /// Distinct eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// All eigenvalues with multiplicity, ascending.
    pub fn eigenvalues_with_multiplicity(&self) -> &[f64] {
        &self.raw
    }

    pub fn multiplicity(&self, k: usize) -> usize {
        self.groups[k].len()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    fn projection_on_columns(&self, cols: Range<usize>) -> Element {
        let v = self.vectors.columns(cols.start, cols.len());
        Element::from_parts(self.shape.clone(), v * v.adjoint())
    }

    /// Orthogonal projection onto the `k`-th eigenspace.
    pub fn projection(&self, k: usize) -> Element {
        self.projection_on_columns(self.groups[k].clone())
    }

    /// Sum of eigenprojections for eigenvalue groups `k..`.
    pub fn upper_projection(&self, k: usize) -> Element {
        let start = self.groups.get(k).map_or(self.raw.len(), |g| g.start);
        self.projection_on_columns(start..self.raw.len())
    }

    /// `Σ_k g(λ_k) P_k`.
    pub fn apply(&self, g: impl Fn(f64) -> f64) -> Element {
        let mut scaled = self.vectors.clone();
        for (k, grp) in self.groups.iter().enumerate() {
            let w = g(self.eigenvalues[k]);
            for c in grp.clone() {
                for v in scaled.column_mut(c).iter_mut() {
                    *v *= w;
                }
            }
        }
        Element::from_parts(self.shape.clone(), &scaled * self.vectors.adjoint())
    }

    /// `Σ λ_k P_k`.
    pub fn reconstruct(&self) -> Element {
        self.apply(|l| l)
    }

    /// Index of the first eigenvalue group with `λ ≥ t − eig_tol`.
    fn first_at_least(&self, t: f64, eig_tol: f64) -> usize {
        self.eigenvalues
            .iter()
            .position(|&l| l >= t - eig_tol)
            .unwrap_or(self.eigenvalues.len())
    }
}

/// Schatten norm `‖x‖_p = τ(|x|^p)^{1/p}` with the normalized trace.
///
/// Self-adjoint inputs use their own spectrum; otherwise the singular values
/// come from the spectrum of `x*x`.
pub fn schatten_norm(x: &Element, p: f64, tol: &Tolerances) -> Result<f64> {
    if !p.is_finite() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    let singular: Vec<f64> = if x.is_self_adjoint(tol.hermitian) {
        hermitian_eigenvalues(x).into_iter().map(f64::abs).collect()
    } else {
        let g = (&x.adjoint() * x).hermitian_part();
        hermitian_eigenvalues(&g)
            .into_iter()
            .map(|l| l.max(0.0).sqrt())
            .collect()
    };
    let mean = singular.iter().map(|s| s.powf(p)).sum::<f64>() / singular.len() as f64;
    Ok(mean.powf(1.0 / p))
}

/// Eigenvalues of the Hermitian part, unsorted.
pub(crate) fn hermitian_eigenvalues(x: &Element) -> Vec<f64> {
    let h = x.hermitian_part();
    SymmetricEigen::new(h.matrix().clone())
        .eigenvalues
        .iter()
        .copied()
        .collect()
}

/// `var(x) = τ((x − τ(x))²)` for self-adjoint `x`.
pub fn variance(x: &Element, tol: &Tolerances) -> Result<f64> {
    x.ensure_self_adjoint(tol.hermitian)?;
    Ok(variance_unchecked(x))
}

pub(crate) fn variance_unchecked(x: &Element) -> f64 {
    let c = x.centered();
    c.trace_of_product(&c).re
}

/// `τ((x − λ1)²)`.
pub fn shifted_second_moment(x: &Element, lambda: f64) -> f64 {
    let c = x.shift(C64::new(lambda, 0.0));
    c.trace_of_product(&c).re
}

/// Checks `τ((x − λ1)²) ≥ var(x)` over a grid of real shifts, with equality
/// at `λ = τ(x)`.
pub fn variance_inf_lambda_check(x: &Element, lambda_grid: &[f64], tol: &Tolerances) -> Result<InequalityReport> {
    let var = variance(x, tol)?;
    let mean = x.trace_re();
    let at_mean = shifted_second_moment(x, mean);
    let mut best = (f64::NAN, f64::INFINITY);
    for &l in lambda_grid {
        let v = shifted_second_moment(x, l);
        if v < best.1 {
            best = (l, v);
        }
    }
    let mut report = InequalityReport::inequality("variance_inf_lambda", var, best.1, tol.rel);
    report.push_step(
        "tau((x - tau(x))^2) == var(x)",
        at_mean,
        var,
        (at_mean - var).abs() <= tol.moment_identity * var.abs().max(1.0),
    );
    report.notes.push(Note::new("argmin_lambda", best.0));
    report.notes.push(Note::new("mean", mean));
    Ok(report.finish())
}

/// `χ_[t,∞)(x)`: sum of the eigenprojections with `λ ≥ t − tol.eig`.
pub fn spectral_projection(x: &Element, t: f64, tol: &Tolerances) -> Result<Element> {
    let sd = SpectralDecomposition::new(x, tol)?;
    Ok(sd.upper_projection(sd.first_at_least(t, tol.eig)))
}

/// `P(x ≥ t) = τ(χ_[t,∞)(x))`, computed as (rank of the projection) / D.
pub fn tail_probability(x: &Element, t: f64, tol: &Tolerances) -> Result<f64> {
    let sd = SpectralDecomposition::new(x, tol)?;
    Ok(tail_from_decomposition(&sd, t, tol.eig, x.dim()))
}

fn tail_from_decomposition(sd: &SpectralDecomposition, t: f64, eig_tol: f64, d: usize) -> f64 {
    let k = sd.first_at_least(t, eig_tol);
    let rank: usize = (k..sd.len()).map(|g| sd.multiplicity(g)).sum();
    rank as f64 / d as f64
}

/// `‖x‖_p^p = ∫_0^∞ p t^{p−1} P(x ≥ t) dt` for positive `x`, evaluated
/// exactly: the tail function is a step function with jumps at the
/// eigenvalues, so the integral is `Σ_k P(x ≥ λ_k) (λ_k^p − λ_{k−1}^p)`.
///
/// Returns the p-th power of the norm.
pub fn layer_cake_norm(x: &Element, p: f64, tol: &Tolerances) -> Result<f64> {
    if !p.is_finite() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    let sd = SpectralDecomposition::new(x, tol)?;
    let scale = sd.eigenvalues().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if let Some(&lowest) = sd.eigenvalues().first() {
        if lowest < -tol.eig * scale {
            return Err(Error::NotPositive(lowest));
        }
    }
    let mut acc = 0.0;
    let mut prev = 0.0f64;
    for (k, &lambda) in sd.eigenvalues().iter().enumerate() {
        let lambda = lambda.max(0.0);
        if lambda <= prev {
            continue;
        }
        // On (prev, λ_k] the tail is the mass of groups k.., i.e. P(x ≥ λ_k).
        let tail = tail_from_decomposition(&sd, lambda, 0.0, x.dim());
        debug_assert!(k < sd.len());
        acc += tail * (lambda.powf(p) - prev.powf(p));
        prev = lambda;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::{pauli_x, pauli_z};
    use approx::assert_relative_eq;

    fn s(d: &[usize]) -> AlgebraShape {
        AlgebraShape::new(d.to_vec()).unwrap()
    }
    fn z() -> Element {
        Element::new(s(&[2]), pauli_z()).unwrap()
    }
    fn diag(v: &[f64]) -> Element {
        Element::real_diagonal(&s(&[v.len()]), v).unwrap()
    }
    const T: Tolerances = Tolerances {
        hermitian: 1e-12,
        eig: 1e-10,
        rel: 1e-9,
        trace_identity: 1e-12,
        operator_identity: 1e-10,
        moment_identity: 1e-9,
    };

    #[test]
    fn schatten_examples() {
        assert_relative_eq!(schatten_norm(&z(), 2.0, &T).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(
            schatten_norm(&diag(&[2.0, 0.0]), 1.0, &T).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        let id = Element::identity(&s(&[3]));
        for p in [1.0, 2.5, 7.0] {
            assert_relative_eq!(schatten_norm(&id, p, &T).unwrap(), 1.0, epsilon = 1e-14);
        }
        assert!(matches!(schatten_norm(&z(), 0.5, &T), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn schatten_non_hermitian_uses_singular_values() {
        // [[0, 2], [0, 0]] has singular values {2, 0}.
        let m = crate::element::real_matrix(2, &[0.0, 2.0, 0.0, 0.0]);
        let x = Element::new(s(&[2]), m).unwrap();
        assert_relative_eq!(schatten_norm(&x, 1.0, &T).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(
            schatten_norm(&x, 2.0, &T).unwrap().powi(2),
            x.norm2_sq(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn variance_examples() {
        assert_relative_eq!(variance(&z(), &T).unwrap(), 1.0);
        assert_eq!(variance(&Element::identity(&s(&[2])), &T).unwrap(), 0.0);
        assert_relative_eq!(variance(&diag(&[1.0, 3.0]), &T).unwrap(), 1.0);
        let bad = Element::new(s(&[2]), crate::element::real_matrix(2, &[0.0, 1.0, 0.0, 0.0])).unwrap();
        assert!(variance(&bad, &T).is_err());
    }

    #[test]
    fn variance_inf_lambda_examples() {
        let r = variance_inf_lambda_check(&z(), &[-1.0, 0.0, 1.0], &T).unwrap();
        assert!(r.passed);
        assert_eq!(r.rhs, 1.0);
        assert_eq!(r.note("argmin_lambda"), Some(0.0));

        let r = variance_inf_lambda_check(&diag(&[1.0, 3.0]), &[0.0, 1.0, 2.0, 2.5], &T).unwrap();
        assert_eq!(r.note("argmin_lambda"), Some(2.0));
        assert_relative_eq!(r.rhs, 1.0);

        let r = variance_inf_lambda_check(&Element::identity(&s(&[2])), &[-3.0, 1.0, 4.0], &T).unwrap();
        assert_eq!(r.note("argmin_lambda"), Some(1.0));
        assert_eq!(r.rhs, 0.0);
    }

    #[test]
    fn spectral_projection_examples() {
        let p = spectral_projection(&z(), 0.5, &T).unwrap();
        assert!(p.dist2(&diag(&[1.0, 0.0])) < 1e-14);
        let p = spectral_projection(&z(), -2.0, &T).unwrap();
        assert!(p.dist2(&Element::identity(&s(&[2]))) < 1e-14);
        let p = spectral_projection(&diag(&[1.0, 2.0, 3.0]), 2.0, &T).unwrap();
        assert!(p.dist2(&diag(&[0.0, 1.0, 1.0])) < 1e-14);
    }

    #[test]
    fn boundary_eigenvalue_is_included() {
        let x = diag(&[1.0, 2.0 - 5e-11, 3.0]);
        assert_relative_eq!(tail_probability(&x, 2.0, &T).unwrap(), 2.0 / 3.0);
        let x = diag(&[1.0, 2.0 - 1e-8, 3.0]);
        assert_relative_eq!(tail_probability(&x, 2.0, &T).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn tail_probability_examples() {
        assert_eq!(tail_probability(&z(), 0.5, &T).unwrap(), 0.5);
        assert_eq!(tail_probability(&Element::identity(&s(&[2])), 2.0, &T).unwrap(), 0.0);
        assert_relative_eq!(tail_probability(&diag(&[1.0, 2.0, 3.0]), 2.0, &T).unwrap(), 2.0 / 3.0);
    }

    #[test]
    fn layer_cake_examples() {
        assert_relative_eq!(
            layer_cake_norm(&diag(&[2.0, 0.0]), 1.0, &T).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            layer_cake_norm(&Element::identity(&s(&[2])), 3.0, &T).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            layer_cake_norm(&diag(&[1.0, 2.0, 3.0]), 2.0, &T).unwrap(),
            14.0 / 3.0,
            epsilon = 1e-14
        );
        assert!(matches!(layer_cake_norm(&z(), 1.0, &T), Err(Error::NotPositive(_))));
    }

    #[test]
    fn decomposition_groups_degenerate_eigenvalues() {
        let sh = s(&[2, 2]);
        let y = Element::tensor_embed(&pauli_z(), 0, &sh).unwrap() + Element::tensor_embed(&pauli_x(), 1, &sh).unwrap();
        let sd = SpectralDecomposition::new(&y, &T).unwrap();
        assert_eq!(sd.len(), 3);
        assert_eq!(sd.multiplicity(1), 2);
        assert!(sd.reconstruct().dist2(&y) < 1e-12);
        let total = (0..sd.len()).fold(Element::zero(&sh), |acc, k| acc + sd.projection(k));
        assert!(total.dist2(&Element::identity(&sh)) < 1e-12);
        let p = sd.projection(1);
        assert!((&p * &p).dist2(&p) < 1e-12);
        assert!((&p * &sd.projection(0)).norm2() < 1e-12);
    }
}
