//! Algebra shapes and tensor-factor subsets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the total matrix dimension of an algebra.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// The ambient algebra `M_{d_1} ⊗ … ⊗ M_{d_n}` described by its local
/// dimensions. Factor 0 is the leftmost (most significant) Kronecker factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct AlgebraShape {
    factor_dims: Vec<usize>,
    total_dim: usize,
}

impl AlgebraShape {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        Self::with_cap(factor_dims, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(factor_dims: Vec<usize>, cap: usize) -> Result<Self> {
        if factor_dims.is_empty() {
            return Err(Error::InvalidShape("at least one factor is required".into()));
        }
        if let Some(k) = factor_dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidShape(format!("factor {k} has dimension 0")));
        }
        let mut total: usize = 1;
        for &d in &factor_dims {
            total = total.checked_mul(d).filter(|&t| t <= cap).ok_or(Error::DimensionCap {
                total: total.saturating_mul(d),
                cap,
            })?;
        }
        Ok(AlgebraShape {
            factor_dims,
            total_dim: total,
        })
    }

    /// The scalars, shape `[1]`.
    pub fn scalar() -> Self {
        AlgebraShape {
            factor_dims: vec![1],
            total_dim: 1,
        }
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn n_factors(&self) -> usize {
        self.factor_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn dim(&self, factor: usize) -> usize {
        self.factor_dims[factor]
    }

    /// Shape with extra factors appended on the right.
    pub fn extended(&self, extra: &[usize]) -> Result<Self> {
        let mut dims = self.factor_dims.clone();
        dims.extend_from_slice(extra);
        AlgebraShape::new(dims)
    }

    /// `M_d(M)` realized as `[d] ++ self`.
    pub fn with_matrix_leg(&self, d: usize) -> Result<Self> {
        let mut dims = Vec::with_capacity(self.n_factors() + 1);
        dims.push(d);
        dims.extend_from_slice(&self.factor_dims);
        AlgebraShape::new(dims)
    }

    pub(crate) fn check_factor(&self, index: usize) -> Result<()> {
        if index < self.n_factors() {
            Ok(())
        } else {
            Err(Error::FactorOutOfRange {
                index,
                n_factors: self.n_factors(),
            })
        }
    }
}

impl TryFrom<Vec<usize>> for AlgebraShape {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        AlgebraShape::new(v)
    }
}

impl From<AlgebraShape> for Vec<usize> {
    fn from(s: AlgebraShape) -> Self {
        s.factor_dims
    }
}

/// A subset of tensor factors, naming the subalgebra they generate.
///
/// The empty set is `ℂ·1`; the full set is the whole algebra. Indices are
/// 0-based here; scenario files use 1-based indices and convert on load.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactorSet {
    n_factors: usize,
    indices: Vec<usize>,
}

impl FactorSet {
    pub fn new(shape: &AlgebraShape, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        for &i in &indices {
            shape.check_factor(i)?;
        }
        indices.sort_unstable();
        indices.dedup();
        Ok(FactorSet {
            n_factors: shape.n_factors(),
            indices,
        })
    }

    pub fn empty(shape: &AlgebraShape) -> Self {
        FactorSet {
            n_factors: shape.n_factors(),
            indices: Vec::new(),
        }
    }

    pub fn full(shape: &AlgebraShape) -> Self {
        FactorSet {
            n_factors: shape.n_factors(),
            indices: (0..shape.n_factors()).collect(),
        }
    }

    pub fn singleton(shape: &AlgebraShape, index: usize) -> Result<Self> {
        Self::new(shape, [index])
    }

    /// The first `len` factors `{0, …, len−1}`.
    pub fn prefix(shape: &AlgebraShape, len: usize) -> Result<Self> {
        if len > shape.n_factors() {
            return Err(Error::FactorOutOfRange {
                index: len,
                n_factors: shape.n_factors(),
            });
        }
        Ok(FactorSet {
            n_factors: shape.n_factors(),
            indices: (0..len).collect(),
        })
    }

    /// Every factor except `index`.
    pub fn all_but(shape: &AlgebraShape, index: usize) -> Result<Self> {
        shape.check_factor(index)?;
        Ok(FactorSet {
            n_factors: shape.n_factors(),
            indices: (0..shape.n_factors()).filter(|&k| k != index).collect(),
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn n_factors(&self) -> usize {
        self.n_factors
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.indices.len() == self.n_factors
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn complement(&self) -> FactorSet {
        FactorSet {
            n_factors: self.n_factors,
            indices: (0..self.n_factors).filter(|k| !self.contains(*k)).collect(),
        }
    }

    pub fn union(&self, other: &FactorSet) -> FactorSet {
        let mut indices = self.indices.clone();
        indices.extend_from_slice(&other.indices);
        indices.sort_unstable();
        indices.dedup();
        FactorSet {
            n_factors: self.n_factors.max(other.n_factors),
            indices,
        }
    }

    /// First shared factor, if any.
    pub fn intersection_witness(&self, other: &FactorSet) -> Option<usize> {
        self.indices.iter().copied().find(|&k| other.contains(k))
    }

    pub fn is_subset_of(&self, other: &FactorSet) -> bool {
        self.indices.iter().all(|&k| other.contains(k))
    }

    pub fn matches(&self, shape: &AlgebraShape) -> bool {
        self.n_factors == shape.n_factors()
    }

    /// Dimension of the local algebra `⊗_{k∈S} M_{d_k}`.
    pub fn local_dim(&self, shape: &AlgebraShape) -> usize {
        self.indices.iter().map(|&k| shape.dim(k)).product()
    }
}

/// Split of each full basis index into (in-set, out-of-set) coordinates.
///
/// For a full index `i = (i_0, …, i_{n−1})` in mixed radix, `inner[i]` is the
/// mixed-radix index of the coordinates in the set and `outer[i]` of those
/// outside it. `full[a * outer_dim + t]` inverts the map.
#[derive(Debug, Clone)]
pub(crate) struct FactorSplit {
    pub inner: Vec<usize>,
    pub outer: Vec<usize>,
    pub full: Vec<usize>,
    pub inner_dim: usize,
    pub outer_dim: usize,
}

impl FactorSplit {
    pub fn new(shape: &AlgebraShape, set: &FactorSet) -> Self {
        let dims = shape.factor_dims();
        let n = dims.len();
        let total = shape.total_dim();
        let inner_dim = set.local_dim(shape);
        let outer_dim = total / inner_dim;
        let mut inner = vec![0usize; total];
        let mut outer = vec![0usize; total];
        let mut full = vec![0usize; total];
        let mut digits = vec![0usize; n];
        for i in 0..total {
            let (mut a, mut t) = (0usize, 0usize);
            for k in 0..n {
                if set.contains(k) {
                    a = a * dims[k] + digits[k];
                } else {
                    t = t * dims[k] + digits[k];
                }
            }
            inner[i] = a;
            outer[i] = t;
            full[a * outer_dim + t] = i;
            for k in (0..n).rev() {
                digits[k] += 1;
                if digits[k] < dims[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        FactorSplit {
            inner,
            outer,
            full,
            inner_dim,
            outer_dim,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_product_and_cap() {
        let s = AlgebraShape::new(vec![2, 3, 2]).unwrap();
        assert_eq!(s.total_dim(), 12);
        assert!(AlgebraShape::new(vec![]).is_err());
        assert!(AlgebraShape::new(vec![2, 0]).is_err());
        assert!(matches!(
            AlgebraShape::new(vec![64, 65]),
            Err(Error::DimensionCap { .. })
        ));
        assert!(AlgebraShape::with_cap(vec![64, 65], 1 << 20).is_ok());
    }

    #[test]
    fn factor_set_ops() {
        let s = AlgebraShape::new(vec![2, 3, 2]).unwrap();
        let a = FactorSet::new(&s, [2, 0, 2]).unwrap();
        assert_eq!(a.indices(), &[0, 2]);
        assert_eq!(a.complement().indices(), &[1]);
        assert_eq!(a.local_dim(&s), 4);
        assert!(FactorSet::new(&s, [3]).is_err());
        assert_eq!(FactorSet::prefix(&s, 0).unwrap().len(), 0);
        assert_eq!(FactorSet::all_but(&s, 1).unwrap().indices(), &[0, 2]);
        let b = FactorSet::singleton(&s, 1).unwrap();
        assert_eq!(a.intersection_witness(&b), None);
        assert_eq!(a.union(&b), FactorSet::full(&s));
    }

    #[test]
    fn split_is_a_bijection() {
        let s = AlgebraShape::new(vec![2, 3, 2]).unwrap();
        let set = FactorSet::new(&s, [1]).unwrap();
        let sp = FactorSplit::new(&s, &set);
        assert_eq!((sp.inner_dim, sp.outer_dim), (3, 4));
        for i in 0..12 {
            assert_eq!(sp.full[sp.inner[i] * sp.outer_dim + sp.outer[i]], i);
        }
        // index 7 = (1, 0, 1): inner digit 0, outer digits (1, 1) -> 3
        assert_eq!((sp.inner[7], sp.outer[7]), (0, 3));
    }
}
