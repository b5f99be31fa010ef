//! Elements of the ambient tracial algebra.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shape::{AlgebraShape, FactorSet, FactorSplit};
use crate::C64;

/// Dense complex matrix on one or more tensor factors.
pub type LocalMatrix = DMatrix<C64>;

/// A dense complex matrix of full tensor dimension, tagged with its shape.
///
/// Elements are immutable values. Binary operators panic on shape mismatch,
/// the same way nalgebra panics on dimension mismatch; use
/// [`Element::ensure_same_shape`] at API boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    shape: AlgebraShape,
    matrix: LocalMatrix,
}

impl Element {
    pub fn new(shape: AlgebraShape, matrix: LocalMatrix) -> Result<Self> {
        let d = shape.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        Ok(Element { shape, matrix })
    }

    pub(crate) fn from_parts(shape: AlgebraShape, matrix: LocalMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), shape.total_dim());
        Element { shape, matrix }
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        let d = shape.total_dim();
        Element::from_parts(shape.clone(), LocalMatrix::identity(d, d))
    }

    pub fn zero(shape: &AlgebraShape) -> Self {
        let d = shape.total_dim();
        Element::from_parts(shape.clone(), LocalMatrix::zeros(d, d))
    }

    pub fn scalar(shape: &AlgebraShape, c: C64) -> Self {
        Element::identity(shape).scale(c)
    }

    /// Real diagonal element; `diag.len()` must equal the total dimension.
    pub fn real_diagonal(shape: &AlgebraShape, diag: &[f64]) -> Result<Self> {
        let m = LocalMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            diag.len(),
            diag.iter().map(|&v| C64::new(v, 0.0)),
        ));
        Element::new(shape.clone(), m)
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn matrix(&self) -> &LocalMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> LocalMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.shape.total_dim()
    }

    pub fn ensure_same_shape(&self, other: &Element) -> Result<()> {
        if self.shape == other.shape {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(
                self.shape.factor_dims().to_vec(),
                other.shape.factor_dims().to_vec(),
            ))
        }
    }

    pub fn adjoint(&self) -> Element {
        Element::from_parts(self.shape.clone(), self.matrix.adjoint())
    }

    /// `(x + x*) / 2`.
    pub fn hermitian_part(&self) -> Element {
        let m = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        Element::from_parts(self.shape.clone(), m)
    }

    /// `max_{ij} |x_ij − conj(x_ji)|`.
    pub fn self_adjoint_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                let diff = self.matrix[(i, j)] - self.matrix[(j, i)].conj();
                worst = worst.max(diff.norm());
            }
        }
        worst
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.self_adjoint_defect() <= tol
    }

    pub fn ensure_self_adjoint(&self, tol: f64) -> Result<()> {
        let defect = self.self_adjoint_defect();
        if defect <= tol {
            Ok(())
        } else {
            Err(Error::NotSelfAdjoint(defect))
        }
    }

    /// Normalized trace `τ(x) = tr(x) / D`.
    pub fn trace(&self) -> C64 {
        self.matrix.trace() / self.dim() as f64
    }

    /// `τ(x)` as a real number; the imaginary part is discarded.
    pub fn trace_re(&self) -> f64 {
        self.trace().re
    }

    /// `τ(xy)` without forming the product.
    pub fn trace_of_product(&self, other: &Element) -> C64 {
        assert_eq!(self.shape, other.shape, "shape mismatch in trace_of_product");
        let d = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += self.matrix[(i, j)] * other.matrix[(j, i)];
            }
        }
        acc / d as f64
    }

    /// `‖x‖₂² = τ(x* x)`.
    pub fn norm2_sq(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.dim() as f64
    }

    pub fn norm2(&self) -> f64 {
        self.norm2_sq().sqrt()
    }

    /// `‖x − y‖₂`.
    pub fn dist2(&self, other: &Element) -> f64 {
        (self - other).norm2()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: C64) -> Element {
        Element::from_parts(self.shape.clone(), &self.matrix * c)
    }

    pub fn scale_real(&self, c: f64) -> Element {
        self.scale(C64::new(c, 0.0))
    }

    /// `x − c·1`.
    pub fn shift(&self, c: C64) -> Element {
        let mut m = self.matrix.clone();
        for i in 0..self.dim() {
            m[(i, i)] -= c;
        }
        Element::from_parts(self.shape.clone(), m)
    }

    /// `x − τ(x)·1`.
    pub fn centered(&self) -> Element {
        self.shift(self.trace())
    }

    pub fn square(&self) -> Element {
        self * self
    }

    pub fn pow(&self, k: u32) -> Element {
        let mut acc = Element::identity(&self.shape);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Embed a matrix acting on the factors in `set` (in increasing factor
    /// order) as `local ⊗ 1` on the full algebra.
    pub fn embed_on(local: &LocalMatrix, set: &FactorSet, shape: &AlgebraShape) -> Result<Element> {
        if !set.matches(shape) {
            return Err(Error::InvalidArgument(format!(
                "factor set over {} factors used with shape {:?}",
                set.n_factors(),
                shape.factor_dims()
            )));
        }
        let ld = set.local_dim(shape);
        if local.nrows() != ld || local.ncols() != ld {
            return Err(Error::DimensionMismatch {
                expected: ld,
                rows: local.nrows(),
                cols: local.ncols(),
            });
        }
        let split = FactorSplit::new(shape, set);
        let d = shape.total_dim();
        let m = LocalMatrix::from_fn(d, d, |i, j| {
            if split.outer[i] == split.outer[j] {
                local[(split.inner[i], split.inner[j])]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Ok(Element::from_parts(shape.clone(), m))
    }

    /// `1 ⊗ … ⊗ local ⊗ … ⊗ 1` with `local` at factor `position`.
    pub fn tensor_embed(local: &LocalMatrix, position: usize, shape: &AlgebraShape) -> Result<Element> {
        shape.check_factor(position)?;
        let set = FactorSet::singleton(shape, position)?;
        Element::embed_on(local, &set, shape)
    }

    /// `x ⊗ 1` in a shape that extends this one by extra trailing factors.
    pub fn lift(&self, target: &AlgebraShape) -> Result<Element> {
        let n = self.shape.n_factors();
        if target.n_factors() < n || target.factor_dims()[..n] != *self.shape.factor_dims() {
            return Err(Error::ShapeMismatch(
                self.shape.factor_dims().to_vec(),
                target.factor_dims().to_vec(),
            ));
        }
        let set = FactorSet::prefix(target, n)?;
        Element::embed_on(&self.matrix, &set, target)
    }

    pub fn to_record(&self) -> ElementRecord {
        let d = self.dim();
        ElementRecord {
            shape: self.shape.factor_dims().to_vec(),
            matrix: (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| [self.matrix[(i, j)].re, self.matrix[(i, j)].im])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_record(rec: &ElementRecord) -> Result<Element> {
        let shape = AlgebraShape::new(rec.shape.clone())?;
        let matrix = matrix_from_rows(&rec.matrix)?;
        Element::new(shape, matrix)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_record()).expect("element record serializes")
    }

    pub fn from_json(s: &str) -> Result<Element> {
        let rec: ElementRecord = serde_json::from_str(s).map_err(|e| Error::Serde(e.to_string()))?;
        Element::from_record(&rec)
    }
}

/// Row-major `[re, im]` rows.
pub type MatrixRows = Vec<Vec<[f64; 2]>>;

/// JSON form of an [`Element`]: shape plus row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub shape: Vec<usize>,
    pub matrix: MatrixRows,
}

pub fn matrix_from_rows(rows: &MatrixRows) -> Result<LocalMatrix> {
    let n = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            rows: n,
            cols: bad.len(),
        });
    }
    Ok(LocalMatrix::from_fn(n, n, |i, j| {
        C64::new(rows[i][j][0], rows[i][j][1])
    }))
}

pub fn matrix_to_rows(m: &LocalMatrix) -> MatrixRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Max entrywise `|m_ij − conj(m_ji)|` of a square matrix.
pub fn matrix_hermitian_defect(m: &LocalMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn real_matrix(n: usize, entries: &[f64]) -> LocalMatrix {
    assert_eq!(entries.len(), n * n);
    LocalMatrix::from_fn(n, n, |i, j| C64::new(entries[i * n + j], 0.0))
}

pub fn pauli_x() -> LocalMatrix {
    real_matrix(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> LocalMatrix {
    let i = C64::new(0.0, 1.0);
    LocalMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), -i, i, C64::new(0.0, 0.0)])
}

pub fn pauli_z() -> LocalMatrix {
    real_matrix(2, &[1.0, 0.0, 0.0, -1.0])
}

pub fn diag_matrix(diag: &[f64]) -> LocalMatrix {
    LocalMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        diag.len(),
        diag.iter().map(|&v| C64::new(v, 0.0)),
    ))
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&Element> for &Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                assert_eq!(self.shape, rhs.shape, "shape mismatch in {}", stringify!($method));
                let f: fn(&LocalMatrix, &LocalMatrix) -> LocalMatrix = $body;
                Element::from_parts(self.shape.clone(), f(&self.matrix, &rhs.matrix))
            }
        }
        impl $tr<Element> for Element {
            type Output = Element;
            fn $method(self, rhs: Element) -> Element {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Element> for Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a + b);
binop!(Sub, sub, |a, b| a - b);
binop!(Mul, mul, |a, b| a * b);

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element::from_parts(self.shape.clone(), -&self.matrix)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn s(d: &[usize]) -> AlgebraShape {
        AlgebraShape::new(d.to_vec()).unwrap()
    }

    #[test]
    fn normalized_trace_examples() {
        assert_eq!(Element::identity(&s(&[2])).trace(), C64::new(1.0, 0.0));
        let z = Element::new(s(&[2]), pauli_z()).unwrap();
        assert_eq!(z.trace(), C64::new(0.0, 0.0));
        let d = Element::real_diagonal(&s(&[3]), &[1.0, 2.0, 3.0]).unwrap();
        assert_relative_eq!(d.trace().re, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn tensor_embed_matches_kronecker() {
        let sh = s(&[2, 2]);
        let i2 = LocalMatrix::identity(2, 2);
        let zi = Element::tensor_embed(&pauli_z(), 0, &sh).unwrap();
        assert_eq!(zi.matrix(), &pauli_z().kronecker(&i2));
        let ix = Element::tensor_embed(&pauli_x(), 1, &sh).unwrap();
        assert_eq!(ix.matrix(), &i2.kronecker(&pauli_x()));
        assert_relative_eq!(ix.trace_of_product(&ix).re, 1.0);
        assert_eq!(Element::tensor_embed(&i2, 1, &sh).unwrap(), Element::identity(&sh));
    }

    #[test]
    fn tensor_embed_three_factor_middle() {
        let sh = s(&[2, 3, 2]);
        let a = LocalMatrix::from_fn(3, 3, |i, j| C64::new((i * 3 + j) as f64, i as f64 - j as f64));
        let e = Element::tensor_embed(&a, 1, &sh).unwrap();
        let oracle = LocalMatrix::identity(2, 2)
            .kronecker(&a)
            .kronecker(&LocalMatrix::identity(2, 2));
        assert_eq!(e.matrix(), &oracle);
        assert_relative_eq!(e.trace().re, a.trace().re / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn embed_on_non_contiguous_set() {
        let sh = s(&[2, 3, 2]);
        let set = FactorSet::new(&sh, [0, 2]).unwrap();
        let (z, x) = (pauli_z(), pauli_x());
        let local = z.kronecker(&x);
        let e = Element::embed_on(&local, &set, &sh).unwrap();
        let oracle = z.kronecker(&LocalMatrix::identity(3, 3)).kronecker(&x);
        assert_eq!(e.matrix(), &oracle);
    }

    #[test]
    fn embed_dimension_mismatch_rejected() {
        let sh = s(&[2, 3]);
        assert!(matches!(
            Element::tensor_embed(&pauli_z(), 1, &sh),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(Element::tensor_embed(&pauli_z(), 2, &sh).is_err());
    }

    #[test]
    fn lift_appends_identity() {
        let sh = s(&[2]);
        let z = Element::new(sh, pauli_z()).unwrap();
        let big = s(&[2, 3]);
        let l = z.lift(&big).unwrap();
        assert_eq!(l.matrix(), &pauli_z().kronecker(&LocalMatrix::identity(3, 3)));
        assert!(z.lift(&s(&[3, 2])).is_err());
    }

    #[test]
    fn self_adjoint_checks() {
        let y = Element::new(s(&[2]), pauli_y()).unwrap();
        assert!(y.is_self_adjoint(1e-12));
        let m = real_matrix(2, &[0.0, 1.0, 0.0, 0.0]);
        let n = Element::new(s(&[2]), m).unwrap();
        assert!(matches!(n.ensure_self_adjoint(1e-12), Err(Error::NotSelfAdjoint(_))));
        assert!(n.hermitian_part().is_self_adjoint(0.0));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let sh = s(&[3]);
        let m = LocalMatrix::from_fn(3, 3, |i, j| {
            C64::new(
                0.1 * i as f64 + std::f64::consts::PI * j as f64,
                (1.0f64 / 3.0) * (i as f64 - j as f64),
            )
        });
        let e = Element::new(sh, m).unwrap();
        let back = Element::from_json(&e.to_json()).unwrap();
        assert_eq!(e, back);
        assert!(Element::from_json(r#"{"shape":[2],"matrix":[[[1,0]]]}"#).is_err());
    }
}
