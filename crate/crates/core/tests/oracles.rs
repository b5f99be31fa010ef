use ncvar::conditioning::conditional_expectation;
use ncvar::element::{pauli_x, pauli_z};
use ncvar::inequalities::{efron_stein_check, CopyMode};
use ncvar::montecarlo::{enumerate_classical, ScalarDistribution, ScalarExpr};
use ncvar::random::{gaussian_matrix, sample_stream};
use ncvar::spectral::variance;
use ncvar::{AlgebraShape, Element, FactorSet, LocalMatrix, NcPolynomial, Tolerances, C64};

#[test]
fn max_of_fair_coins_matches_brute_force() {
    let coin = ScalarDistribution::Discrete {
        support: vec![0.0, 1.0],
        probabilities: vec![0.5, 0.5],
    };
    let (var, sum_sq_diff) = enumerate_classical(&ScalarExpr::max_of_inputs(2), &[coin.clone(), coin]).unwrap();

    let (mut m1, mut m2, mut d1, mut d2) = (0.0, 0.0, 0.0, 0.0);
    for bits in 0u32..16 {
        let b = |k: u32| f64::from((bits >> k) & 1);
        let (x1, x2, y1, y2) = (b(0), b(1), b(2), b(3));
        let z = x1.max(x2);
        m1 += z / 16.0;
        m2 += z * z / 16.0;
        d1 += (z - y1.max(x2)).powi(2) / 16.0;
        d2 += (z - x1.max(y2)).powi(2) / 16.0;
    }
    let oracle_var = m2 - m1 * m1;
    assert_eq!(oracle_var, 3.0 / 16.0);
    assert_eq!((d1, d2), (0.25, 0.25));
    assert!((var - oracle_var).abs() < 1e-15);
    assert!((sum_sq_diff - (d1 + d2)).abs() < 1e-15);
    assert!(var <= 0.5 * sum_sq_diff);
}

#[test]
fn conditional_expectation_matches_explicit_partial_trace() {
    let shape = AlgebraShape::new(vec![2, 3]).unwrap();
    let mut rng = sample_stream(9, 0);
    let x = Element::new(shape.clone(), gaussian_matrix(&mut rng, 6)).unwrap();
    let m = x.matrix();

    let keep_first = conditional_expectation(&x, &FactorSet::new(&shape, vec![0]).unwrap()).unwrap();
    let keep_second = conditional_expectation(&x, &FactorSet::new(&shape, vec![1]).unwrap()).unwrap();
    for (r, c) in (0..6).flat_map(|r| (0..6).map(move |c| (r, c))) {
        let (i, k) = (r / 3, r % 3);
        let (j, l) = (c / 3, c % 3);
        let first = if k == l {
            (0..3).map(|q| m[(i * 3 + q, j * 3 + q)]).sum::<C64>() / 3.0
        } else {
            C64::new(0.0, 0.0)
        };
        let second = if i == j {
            (0..2).map(|p| m[(p * 3 + k, p * 3 + l)]).sum::<C64>() / 2.0
        } else {
            C64::new(0.0, 0.0)
        };
        assert!((keep_first.matrix()[(r, c)] - first).norm() < 1e-12);
        assert!((keep_second.matrix()[(r, c)] - second).norm() < 1e-12);
    }
}

#[test]
fn pauli_sum_variance_from_explicit_kronecker() {
    let tol = Tolerances::default();
    let shape = AlgebraShape::new(vec![2, 2]).unwrap();
    let i2 = LocalMatrix::identity(2, 2);
    let y = pauli_z().kronecker(&i2) + i2.kronecker(&pauli_x());
    let sq = &y * &y;
    let tr = sq.trace().re / 4.0 - (y.trace().re / 4.0).powi(2);
    assert!((tr - 2.0).abs() < 1e-14);
    let elem = Element::new(shape.clone(), y).unwrap();
    assert!((variance(&elem, &tol).unwrap() - tr).abs() < 1e-14);

    let f = NcPolynomial::parse(&NcPolynomial::standard_inputs(2), "x1 + x2").unwrap();
    let r = efron_stein_check(&f, &[pauli_z(), pauli_x()], &shape, CopyMode::Extension, &tol).unwrap();
    assert!((r.lhs - tr).abs() < 1e-12);
}

#[test]
fn report_serializes_with_stable_field_names() {
    let tol = Tolerances::default();
    let shape = AlgebraShape::new(vec![2, 2]).unwrap();
    let f = NcPolynomial::parse(&NcPolynomial::standard_inputs(2), "x1 x2 + x2 x1").unwrap();
    let r = efron_stein_check(&f, &[pauli_z(), pauli_x()], &shape, CopyMode::Extension, &tol).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for key in ["name", "hypotheses", "lhs", "rhs", "slack", "passed", "realization"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let back: ncvar::InequalityReport = serde_json::from_value(v).unwrap();
    assert_eq!(back, r);
}
