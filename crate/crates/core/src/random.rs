//! Seeded random sources and random algebra objects.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::element::{Element, LocalMatrix};
use crate::poly::{Letter, NcPolynomial, Term};
use crate::shape::AlgebraShape;
use crate::C64;

pub type SampleRng = ChaCha8Rng;

/// Deterministic substream `index` of `seed`.
///
/// Every (seed, index) pair addresses an independent ChaCha stream, so work
/// split by sample index gives the same draws under any parallel chunking.
pub fn sample_stream(seed: u64, index: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Standard complex Gaussian, `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(gaussian(rng), gaussian(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> LocalMatrix {
    LocalMatrix::from_fn(n, n, |_, _| complex_gaussian(rng))
}

/// `(G + G*)/2` for a complex Gaussian `G`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> LocalMatrix {
    let g = gaussian_matrix(rng, n);
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}

/// `G G* / n`, positive semidefinite.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> LocalMatrix {
    let g = gaussian_matrix(rng, n);
    let p = &g * g.adjoint() / C64::new(n as f64, 0.0);
    (&p + p.adjoint()) * C64::new(0.5, 0.0)
}

pub fn random_element<R: Rng + ?Sized>(rng: &mut R, shape: &AlgebraShape) -> Element {
    Element::from_parts(shape.clone(), gaussian_matrix(rng, shape.total_dim()))
}

pub fn random_hermitian_element<R: Rng + ?Sized>(rng: &mut R, shape: &AlgebraShape) -> Element {
    Element::from_parts(shape.clone(), random_hermitian(rng, shape.total_dim()))
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> LocalMatrix {
    let qr = gaussian_matrix(rng, n).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { C64::new(1.0, 0.0) };
        for v in q.column_mut(j).iter_mut() {
            *v *= phase;
        }
    }
    q
}

/// Uniform shape with `1..=max_factors` factors of dimension `1..=max_local_dim`,
/// redrawn until the total dimension is at most `max_total`.
pub fn random_shape<R: Rng + ?Sized>(
    rng: &mut R,
    max_factors: usize,
    max_local_dim: usize,
    max_total: usize,
) -> AlgebraShape {
    loop {
        let n = rng.random_range(1..=max_factors.max(1));
        let dims: Vec<usize> = (0..n).map(|_| rng.random_range(1..=max_local_dim.max(1))).collect();
        if dims.iter().product::<usize>() <= max_total {
            return AlgebraShape::new(dims).expect("bounded shape");
        }
    }
}

/// Random polynomial in `n_inputs` inputs with `1..=4` terms of degree at most
/// `max_degree` and real Gaussian coefficients.
pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, n_inputs: usize, max_degree: usize) -> NcPolynomial {
    let n_terms = rng.random_range(1..=4);
    let terms = (0..n_terms)
        .map(|_| {
            let len = rng.random_range(0..=max_degree);
            let word = (0..len)
                .map(|_| Letter {
                    input: rng.random_range(0..n_inputs),
                    adjoint: false,
                })
                .collect();
            Term {
                coeff: C64::new(gaussian(rng), 0.0),
                word,
            }
        })
        .collect();
    NcPolynomial::new(NcPolynomial::standard_inputs(n_inputs), terms).expect("letters in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let mut r1 = sample_stream(0, 3);
        let mut r2 = sample_stream(0, 3);
        for _ in 0..100 {
            assert_eq!(r1.random::<u64>(), r2.random::<u64>());
        }
    }

    #[test]
    fn distinct_streams_are_uncorrelated() {
        let mut r1 = sample_stream(5, 0);
        let mut r2 = sample_stream(5, 1);
        let n = 10_000;
        let xs: Vec<f64> = (0..n).map(|_| r1.random::<f64>()).collect();
        let ys: Vec<f64> = (0..n).map(|_| r2.random::<f64>()).collect();
        let mx = xs.iter().sum::<f64>() / n as f64;
        let my = ys.iter().sum::<f64>() / n as f64;
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        assert!((cov / (vx * vy).sqrt()).abs() < 0.05);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = sample_stream(1, 0);
        for n in [1, 2, 7, 32] {
            let u = haar_unitary(&mut rng, n);
            let err = (&u.adjoint() * &u - LocalMatrix::identity(n, n)).camax();
            assert!(err < 1e-10, "n={n} err={err}");
        }
    }

    #[test]
    fn haar_first_entry_second_moment() {
        // E|U_11|² = 1/n for Haar U.
        let n = 4;
        let m = 4000;
        let mut acc = 0.0;
        for i in 0..m {
            let u = haar_unitary(&mut sample_stream(2, i), n);
            acc += u[(0, 0)].norm_sqr();
        }
        assert!((acc / m as f64 - 0.25).abs() < 0.02);
    }

    #[test]
    fn random_shape_respects_bounds() {
        let mut rng = sample_stream(3, 0);
        for _ in 0..200 {
            let s = random_shape(&mut rng, 4, 3, 256);
            assert!(s.n_factors() <= 4 && s.factor_dims().iter().all(|&d| (1..=3).contains(&d)));
        }
    }
}
