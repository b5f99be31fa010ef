//! The built-in verification suite: hand-derived cases followed by a seeded
//! fuzz campaign.

use rand::Rng;
use rayon::prelude::*;

use ncvar::conditioning::{
    conditional_expectation, contraction_check, martingale_check, martingale_projection_check, module_property_check,
    nested_tower_check, reduced_expectation, tower_identity_check, trace_pairing_check, trace_preservation_check,
    variance_additivity_check,
};
use ncvar::element::{diag_matrix, pauli_x, pauli_z};
use ncvar::independence::{
    asymptotic_freeness_diagnostic, boolean_independence_check, boolean_variance_infimum_check, copy_moment_check,
    independent_copy_extension, tensor_factorization_error, tensor_independence_check,
};
use ncvar::inequalities::{
    efron_stein_check, embed_inputs, kadison_step_check, lemma_variance_bound, matrix_efron_stein_check,
    norm_inequality_check, omit_one_polynomials, steele_check, trace_jensen_check, CopyMode, MatrixRealization,
};
use ncvar::montecarlo::{
    classical_efron_stein_mc, matrix_efron_stein_mc, MatrixFunction, NormConvention, ScalarDistribution, ScalarExpr,
};
use ncvar::random::{random_hermitian, random_hermitian_element, random_polynomial, random_shape, sample_stream};
use ncvar::spectral::{layer_cake_norm, schatten_norm, tail_probability, variance_inf_lambda_check};
use ncvar::{AlgebraShape, Element, FactorSet, InequalityReport, LocalMatrix, NcPolynomial, Tolerances, Verdict, C64};

use crate::output::Record;

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub seed: u64,
    pub fuzz_count: usize,
    pub max_factors: usize,
    pub max_local_dim: usize,
    pub max_total_dim: usize,
    pub tol: Tolerances,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 42,
            fuzz_count: 500,
            max_factors: 4,
            max_local_dim: 3,
            max_total_dim: 256,
            tol: Tolerances::default(),
        }
    }
}

/// Hand cases, then fuzz scenarios in index order.
pub fn run_suite(opts: &SuiteOptions) -> Vec<Record> {
    let mut records = hand_cases(opts);
    let fuzz: Vec<Vec<Record>> = (0..opts.fuzz_count)
        .into_par_iter()
        .map(|i| fuzz_scenario(i, opts))
        .collect();
    records.extend(fuzz.into_iter().flatten());
    records
}

fn shape(dims: &[usize]) -> AlgebraShape {
    AlgebraShape::new(dims.to_vec()).expect("static shape")
}

fn poly(inputs: &[&str], expr: &str) -> NcPolynomial {
    NcPolynomial::parse(inputs, expr).expect("static polynomial")
}

fn embed(m: &LocalMatrix, pos: usize, sh: &AlgebraShape) -> Element {
    Element::tensor_embed(m, pos, sh).expect("static embedding")
}

/// Adds steps comparing both sides with hand-derived values.
fn expect_sides(
    r: ncvar::Result<InequalityReport>,
    lhs: f64,
    rhs: f64,
    tol: &Tolerances,
) -> ncvar::Result<InequalityReport> {
    let mut r = r?;
    let close = |got: f64, want: f64| (got - want).abs() <= tol.rel * want.abs().max(1.0);
    let (l, rr) = (r.lhs, r.rhs);
    r.push_step("lhs matches hand value", l, lhs, close(l, lhs));
    r.push_step("rhs matches hand value", rr, rhs, close(rr, rhs));
    Ok(r.finish())
}

fn expect_value(name: &str, got: f64, want: f64, tol: &Tolerances) -> InequalityReport {
    let mut r = InequalityReport::identity(name, (got - want).abs(), tol.rel * want.abs().max(1.0));
    r.notes.push(ncvar::report::Note::new("value", got));
    r.notes.push(ncvar::report::Note::new("expected", want));
    r.finish()
}

fn expect_element(
    name: &str,
    got: ncvar::Result<Element>,
    want: &Element,
    tol: &Tolerances,
) -> ncvar::Result<InequalityReport> {
    let got = got?;
    Ok(InequalityReport::identity(name, got.dist2(want), tol.operator_identity * want.norm2().max(1.0)).finish())
}

/// Passes when the wrapped check reports a violation.
fn expect_violation(r: ncvar::Result<InequalityReport>) -> ncvar::Result<InequalityReport> {
    let r = r?;
    let hit = r.verdict == Verdict::Violated;
    Ok(InequalityReport::identity(format!("negative_control/{}", r.name), if hit { 0.0 } else { 1.0 }, 0.5).finish())
}

fn expect_verdict(r: ncvar::Result<InequalityReport>, verdict: Verdict) -> ncvar::Result<InequalityReport> {
    let mut r = r?;
    let v = r.verdict;
    r.push_step("expected verdict", 0.0, 0.0, v == verdict);
    Ok(r.finish())
}

/// Passes when the call was rejected with an error.
fn expect_rejection<T>(name: &str, r: ncvar::Result<T>) -> InequalityReport {
    let mut rep = InequalityReport::identity(
        format!("negative_control/{name}"),
        if r.is_err() { 0.0 } else { 1.0 },
        0.5,
    );
    if let Err(e) = r {
        rep.messages.push(e.to_string());
    }
    rep.finish()
}

fn hand_cases(opts: &SuiteOptions) -> Vec<Record> {
    let tol = &opts.tol;
    let mut out = Vec::new();
    let mut push = |id: &str, name: &str, r: ncvar::Result<InequalityReport>| {
        out.push(Record::from_result(&format!("hand/{id}"), name, r));
    };
    let s1 = shape(&[1]);
    let s2 = shape(&[2]);
    let s3 = shape(&[3]);
    let s22 = shape(&[2, 2]);
    let z = pauli_z();
    let x = pauli_x();
    let zi = embed(&z, 0, &s22);
    let ix = embed(&x, 1, &s22);
    let d13 = Element::real_diagonal(&s2, &[1.0, 3.0]).unwrap();
    let d123 = Element::real_diagonal(&s3, &[1.0, 2.0, 3.0]).unwrap();
    let z1 = Element::new(s2.clone(), z.clone()).unwrap();

    // tracial core
    push(
        "trace_identity",
        "trace",
        Ok(expect_value("trace", Element::identity(&s2).trace_re(), 1.0, tol)),
    );
    push(
        "trace_diag123",
        "trace",
        Ok(expect_value("trace", d123.trace_re(), 2.0, tol)),
    );
    push(
        "schatten_z_p2",
        "schatten_norm",
        schatten_norm(&z1, 2.0, tol).map(|v| expect_value("schatten_norm", v, 1.0, tol)),
    );
    let d20 = Element::real_diagonal(&s2, &[2.0, 0.0]).unwrap();
    push(
        "schatten_d20_p1",
        "schatten_norm",
        schatten_norm(&d20, 1.0, tol).map(|v| expect_value("schatten_norm", v, 1.0, tol)),
    );
    push(
        "variance_inf_z",
        "variance_inf_lambda",
        expect_sides(variance_inf_lambda_check(&z1, &[-1.0, 0.0, 1.0], tol), 1.0, 1.0, tol),
    );
    push(
        "variance_inf_d13",
        "variance_inf_lambda",
        expect_sides(variance_inf_lambda_check(&d13, &[0.0, 2.0, 3.5], tol), 1.0, 1.0, tol),
    );
    push(
        "tail_z",
        "tail_probability",
        tail_probability(&z1, 0.5, tol).map(|v| expect_value("tail_probability", v, 0.5, tol)),
    );
    push(
        "tail_d123",
        "tail_probability",
        tail_probability(&d123, 2.0, tol).map(|v| expect_value("tail_probability", v, 2.0 / 3.0, tol)),
    );
    push(
        "layer_cake_d20",
        "layer_cake",
        layer_cake_norm(&d20, 1.0, tol).map(|v| expect_value("layer_cake", v, 1.0, tol)),
    );
    push(
        "layer_cake_d123",
        "layer_cake",
        layer_cake_norm(&d123, 2.0, tol).map(|v| expect_value("layer_cake", v, 14.0 / 3.0, tol)),
    );

    // conditioning
    let zx = embed(&z, 0, &s22) * embed(&x, 1, &s22);
    let f2 = FactorSet::singleton(&s22, 1).unwrap();
    let f1 = FactorSet::singleton(&s22, 0).unwrap();
    push(
        "cond_exp_zx",
        "conditional_expectation",
        expect_element(
            "conditional_expectation",
            conditional_expectation(&zx, &f2),
            &Element::zero(&s22),
            tol,
        ),
    );
    let sum = &zi + &ix;
    push(
        "cond_exp_sum",
        "conditional_expectation",
        expect_element("conditional_expectation", conditional_expectation(&sum, &f1), &zi, tol),
    );
    let mut rng = sample_stream(opts.seed, u64::MAX);
    let rnd = random_hermitian_element(&mut rng, &s22);
    push(
        "module_property",
        "module_property",
        module_property_check(&zi, &rnd, &Element::identity(&s22), &f1, tol),
    );
    push(
        "module_property_rejected",
        "module_property",
        expect_verdict(module_property_check(&ix, &rnd, &ix, &f1, tol), Verdict::NotApplicable),
    );
    let s23 = shape(&[2, 3]);
    let rnd23 = random_hermitian_element(&mut rng, &s23);
    push(
        "trace_preservation",
        "trace_preservation",
        trace_preservation_check(&rnd23, &FactorSet::singleton(&s23, 1).unwrap(), tol),
    );
    push("martingale", "martingale_orthogonality", martingale_check(&rnd23, tol));
    push(
        "variance_additivity",
        "variance_additivity",
        variance_additivity_check(&rnd23, tol),
    );

    // independence
    push(
        "boolean_disjoint",
        "boolean_independence",
        boolean_independence_check(&zi, &ix, tol),
    );
    push(
        "boolean_same",
        "boolean_independence",
        expect_violation(boolean_independence_check(&zi, &zi, tol)),
    );
    push(
        "boolean_scalar",
        "boolean_independence",
        boolean_independence_check(&rnd, &Element::scalar(&s22, C64::new(-1.5, 0.0)), tol),
    );
    let fam = [vec![zi.clone(), zi.clone()], vec![ix.clone(), ix.clone()]];
    push(
        "tensor_factorization",
        "tensor_factorization",
        tensor_factorization_error(&fam).map(|e| expect_value("tensor_factorization", e, 0.0, tol)),
    );
    let sets = [f1.clone(), f2.clone()];
    push(
        "tensor_independence",
        "tensor_independence",
        tensor_independence_check(&s22, &sets, 3, 20, opts.seed, tol),
    );
    push(
        "tensor_overlap",
        "tensor_independence",
        Ok(expect_rejection(
            "tensor_independence",
            tensor_independence_check(&s22, &[f1.clone(), f1.clone()], 2, 1, 0, tol),
        )),
    );
    push(
        "boolean_inf_disjoint",
        "boolean_variance_infimum",
        boolean_variance_infimum_check(&zi, std::slice::from_ref(&ix), tol),
    );
    push(
        "boolean_inf_mean",
        "boolean_variance_infimum",
        expect_sides(
            boolean_variance_infimum_check(&zi, &[Element::zero(&s22)], tol),
            1.0,
            1.0,
            tol,
        ),
    );
    let two = Element::scalar(&s2, C64::new(2.0, 0.0));
    push(
        "boolean_inf_d13",
        "boolean_variance_infimum",
        expect_sides(boolean_variance_infimum_check(&d13, &[two], tol), 1.0, 1.0, tol),
    );
    push(
        "copy_moments",
        "copy_moments",
        independent_copy_extension(&[z.clone(), x.clone()], &s22, tol).map(|e| copy_moment_check(&e, 8, tol)),
    );
    let zero8 = LocalMatrix::zeros(8, 8);
    push(
        "freeness_zero",
        "asymptotic_freeness",
        expect_sides(
            asymptotic_freeness_diagnostic(&zero8, &zero8, 10, opts.seed, 10.0, tol),
            0.0,
            10.0 / 8.0,
            tol,
        ),
    );
    let one = LocalMatrix::identity(1, 1);
    push(
        "freeness_dim1",
        "asymptotic_freeness",
        expect_sides(
            asymptotic_freeness_diagnostic(&one, &one, 10, opts.seed, 10.0, tol),
            0.0,
            10.0,
            tol,
        ),
    );
    push(
        "freeness_decay",
        "freeness_decay",
        freeness_decay(16, 64, 100, opts.seed, tol),
    );

    // inequalities
    let xs = ["x1", "x2"];
    let pz = vec![z.clone(), x.clone()];
    let fsum = poly(&xs, "x1 + x2");
    let fprod = poly(&xs, "x1 x2");
    let fone = poly(&xs, "1");
    push(
        "lemma_sum",
        "lemma_variance_bound",
        expect_sides(lemma_variance_bound(&fsum, &pz, &s22, tol), 2.0, 2.0, tol),
    );
    push(
        "lemma_product",
        "lemma_variance_bound",
        expect_sides(lemma_variance_bound(&fprod, &pz, &s22, tol), 1.0, 2.0, tol),
    );
    push(
        "lemma_constant",
        "lemma_variance_bound",
        expect_sides(lemma_variance_bound(&fone, &pz, &s22, tol), 0.0, 0.0, tol),
    );
    for (id, f, l, r) in [
        ("sum", &fsum, 2.0, 2.0),
        ("product", &fprod, 1.0, 2.0),
        ("constant", &fone, 0.0, 0.0),
    ] {
        push(
            &format!("efron_stein_{id}"),
            "efron_stein",
            expect_sides(efron_stein_check(f, &pz, &s22, CopyMode::Extension, tol), l, r, tol),
        );
    }
    push(
        "efron_stein_literal_sum",
        "efron_stein",
        efron_stein_check(&fsum, &pz, &s22, CopyMode::LiteralReuse, tol),
    );
    push(
        "steele_sum",
        "steele",
        expect_sides(
            steele_check(&fsum, &pz, &s22, &omit_one_polynomials(&fsum), tol),
            2.0,
            2.0,
            tol,
        ),
    );
    let zero = NcPolynomial::zero(fprod.inputs().to_vec());
    push(
        "steele_product",
        "steele",
        expect_sides(
            steele_check(&fprod, &pz, &s22, &[zero.clone(), zero.clone()], tol),
            1.0,
            2.0,
            tol,
        ),
    );
    push(
        "steele_forbidden",
        "steele",
        Ok(expect_rejection(
            "steele",
            steele_check(&fprod, &pz, &s22, &[poly(&xs, "x1"), zero], tol),
        )),
    );

    let i2 = LocalMatrix::identity(2, 2);
    let u1 = NcPolynomial::parse(&["U1"], "U1").unwrap();
    let a = diag_matrix(&[1.0, -2.0]).kronecker(&i2);
    push(
        "matrix_efron_stein_constant",
        "matrix_efron_stein",
        expect_sides(
            matrix_efron_stein_check(
                &u1,
                2,
                &[a],
                &s2,
                CopyMode::Extension,
                MatrixRealization::MatrixLeg,
                tol,
            ),
            0.0,
            0.0,
            tol,
        ),
    );
    let ulocals = vec![i2.kronecker(&z), i2.kronecker(&x)];
    let usum = NcPolynomial::parse(&["U1", "U2"], "U1 + U2").unwrap();
    for real in [MatrixRealization::MatrixLeg, MatrixRealization::Strict] {
        push(
            &format!("matrix_efron_stein_pauli_{}", real.tag()),
            "matrix_efron_stein",
            expect_sides(
                matrix_efron_stein_check(&usum, 2, &ulocals, &s22, CopyMode::Extension, real, tol),
                4.0,
                4.0,
                tol,
            ),
        );
    }
    push(
        "kadison_identity",
        "kadison_step",
        expect_sides(kadison_step_check(&i2, tol), 2.0, 2.0, tol),
    );
    push(
        "kadison_d13",
        "kadison_step",
        expect_sides(kadison_step_check(&diag_matrix(&[1.0, 3.0]), tol), 8.0, 10.0, tol),
    );
    push(
        "kadison_traceless",
        "kadison_step",
        expect_sides(kadison_step_check(&diag_matrix(&[1.0, -1.0]), tol), 0.0, 2.0, tol),
    );
    push(
        "norm_pauli",
        "norm_inequality",
        expect_sides(norm_inequality_check(&pz, &s22, tol), 2.0, 3.0, tol),
    );
    push(
        "norm_single",
        "norm_inequality",
        expect_sides(norm_inequality_check(std::slice::from_ref(&z), &s2, tol), 1.0, 2.0, tol),
    );
    let z2 = LocalMatrix::zeros(2, 2);
    push(
        "norm_zero",
        "norm_inequality",
        expect_sides(norm_inequality_check(&[z2.clone(), z2], &s22, tol), 0.0, 0.0, tol),
    );
    push(
        "jensen_identity",
        "trace_jensen",
        expect_sides(trace_jensen_check(&Element::identity(&s1), tol), 1.0, 1.0, tol),
    );
    push(
        "jensen_z",
        "trace_jensen",
        expect_sides(trace_jensen_check(&z1, tol), 0.0, 1.0, tol),
    );
    push(
        "jensen_d13",
        "trace_jensen",
        expect_sides(trace_jensen_check(&d13, tol), 4.0, 5.0, tol),
    );

    // Monte Carlo
    let rad5 = vec![ScalarDistribution::Rademacher; 5];
    let coin = ScalarDistribution::Discrete {
        support: vec![0.0, 1.0],
        probabilities: vec![0.5, 0.5],
    };
    let mc = [
        (
            "mc_rademacher_sum",
            classical_efron_stein_mc(&ScalarExpr::sum_of_inputs(5), &rad5, 20_000, opts.seed),
        ),
        (
            "mc_constant",
            classical_efron_stein_mc(&ScalarExpr::Const(1.0), &rad5, 1_000, opts.seed),
        ),
        (
            "mc_max_coins",
            classical_efron_stein_mc(&ScalarExpr::max_of_inputs(2), &[coin.clone(), coin], 20_000, opts.seed),
        ),
    ];
    let diag_fn = MatrixFunction::linear(
        None,
        vec![
            diag_matrix(&[1.0, 0.5]),
            diag_matrix(&[-2.0, 1.0]),
            diag_matrix(&[0.25, 3.0]),
        ],
        tol,
    );
    let single = MatrixFunction::linear(None, vec![diag_matrix(&[1.0, -1.0])], tol);
    let rad3 = vec![ScalarDistribution::Rademacher; 3];
    let mmc = [
        (
            "mc_matrix_diagonal",
            diag_fn.and_then(|f| matrix_efron_stein_mc(&f, &rad3, 20_000, opts.seed, NormConvention::Normalized)),
        ),
        (
            "mc_matrix_single",
            single.and_then(|f| matrix_efron_stein_mc(&f, &rad3[..1], 20_000, opts.seed, NormConvention::Normalized)),
        ),
    ];
    for (id, r) in mc.into_iter().chain(mmc) {
        let scenario = format!("hand/{id}");
        out.push(match r {
            Ok(m) => Record::monte_carlo(scenario, m),
            Err(e) => Record::failure(scenario, id, e),
        });
    }
    out
}

/// Mean alternating moment at `small` over that at `large`, expected in
/// `[2, 8]` when the decay is `O(1/dim)`.
pub fn freeness_decay(
    small: usize,
    large: usize,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> ncvar::Result<InequalityReport> {
    let balanced = |n: usize| diag_matrix(&(0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect::<Vec<_>>());
    let a = asymptotic_freeness_diagnostic(&balanced(small), &balanced(small), samples, seed, 10.0, tol)?;
    let b = asymptotic_freeness_diagnostic(&balanced(large), &balanced(large), samples, seed, 10.0, tol)?;
    let ratio = a.lhs / b.lhs;
    let mut r = InequalityReport::inequality("freeness_decay", 2.0, ratio, 0.0);
    r.push_step("ratio <= 8", ratio, 8.0, ratio <= 8.0);
    r.push_step(format!("statistic at dim {small} within bound"), a.lhs, a.rhs, a.passed);
    r.push_step(format!("statistic at dim {large} within bound"), b.lhs, b.rhs, b.passed);
    r.notes.push(ncvar::report::Note::new("statistic_small", a.lhs));
    r.notes.push(ncvar::report::Note::new("statistic_large", b.lhs));
    r.notes.push(ncvar::report::Note::new("ratio", ratio));
    Ok(r.finish())
}

fn random_subset<R: Rng>(rng: &mut R, sh: &AlgebraShape) -> FactorSet {
    let idx: Vec<usize> = (0..sh.n_factors()).filter(|_| rng.random::<bool>()).collect();
    FactorSet::new(sh, idx).expect("indices in range")
}

/// All checks of fuzz scenario `index`, drawn from substream `(seed, index)`.
pub fn fuzz_scenario(index: usize, opts: &SuiteOptions) -> Vec<Record> {
    let tol = &opts.tol;
    let id = format!("fuzz/{index}");
    let mut rng = sample_stream(opts.seed, index as u64);
    let sh = random_shape(&mut rng, opts.max_factors, opts.max_local_dim, opts.max_total_dim);
    let n = sh.n_factors();
    let locals: Vec<LocalMatrix> = sh
        .factor_dims()
        .iter()
        .map(|&d| random_hermitian(&mut rng, d))
        .collect();
    let f = random_polynomial(&mut rng, n, 3);
    let s_set = random_subset(&mut rng, &sh);
    let outer = s_set.union(&random_subset(&mut rng, &sh));
    let a_loc = random_hermitian(&mut rng, s_set.local_dim(&sh));
    let b_loc = random_hermitian(&mut rng, s_set.local_dim(&sh));
    let other = random_hermitian_element(&mut rng, &sh);
    let tower_j = rng.random_range(1..=n);
    let leg_locals: Vec<LocalMatrix> = sh
        .factor_dims()
        .iter()
        .map(|&d| random_hermitian(&mut rng, 2 * d))
        .collect();
    let i2 = LocalMatrix::identity(2, 2);
    let strict_locals: Vec<LocalMatrix> = locals.iter().map(|m| i2.kronecker(m)).collect();

    let mut out = Vec::with_capacity(24);
    let mut push = |name: &str, r: ncvar::Result<InequalityReport>| out.push(Record::from_result(&id, name, r));

    push("lemma_variance_bound", lemma_variance_bound(&f, &locals, &sh, tol));
    push("steele", steele_check(&f, &locals, &sh, &omit_one_polynomials(&f), tol));
    push(
        "efron_stein",
        efron_stein_check(&f, &locals, &sh, CopyMode::Extension, tol),
    );
    push(
        "efron_stein",
        efron_stein_check(&f, &locals, &sh, CopyMode::LiteralReuse, tol),
    );
    push("norm_inequality", norm_inequality_check(&locals, &sh, tol));
    push("kadison_step", kadison_step_check(&locals[0], tol));
    push(
        "matrix_efron_stein",
        matrix_efron_stein_check(
            &f,
            2,
            &strict_locals,
            &sh,
            CopyMode::Extension,
            MatrixRealization::Strict,
            tol,
        ),
    );
    push(
        "matrix_efron_stein",
        matrix_efron_stein_check(
            &f,
            2,
            &leg_locals,
            &sh,
            CopyMode::Extension,
            MatrixRealization::MatrixLeg,
            tol,
        ),
    );
    if n >= 2 {
        let x0 = Element::tensor_embed(&locals[0], 0, &sh);
        let x1 = Element::tensor_embed(&locals[1], 1, &sh);
        push(
            "boolean_independence",
            x0.and_then(|a| boolean_independence_check(&a, &x1?, tol)),
        );
    }

    let y = match embed_inputs(&locals, &sh, tol).and_then(|xs| f.eval(&xs)) {
        Ok(y) => y,
        Err(e) => {
            out.push(Record::failure(&id, "eval", e));
            return out;
        }
    };
    let mut push = |name: &str, r: ncvar::Result<InequalityReport>| out.push(Record::from_result(&id, name, r));
    push("trace_jensen", trace_jensen_check(&y, tol));
    push(
        "kadison_step",
        FactorSet::singleton(&sh, 0)
            .and_then(|s| reduced_expectation(&y, &s))
            .and_then(|a| kadison_step_check(&a, tol)),
    );
    let a = Element::embed_on(&a_loc, &s_set, &sh);
    let b = Element::embed_on(&b_loc, &s_set, &sh);
    push(
        "module_property",
        a.and_then(|a| module_property_check(&a, &y, &b?, &s_set, tol)),
    );
    push("trace_preservation", trace_preservation_check(&y, &s_set, tol));
    push("tower_identity", tower_identity_check(&y, tower_j, tol));
    push("martingale_orthogonality", martingale_check(&y, tol));
    push("variance_additivity", variance_additivity_check(&y, tol));
    push("martingale_projection", martingale_projection_check(&y, tol));
    push("contraction", contraction_check(&y, &s_set, tol));
    push(
        "trace_pairing",
        conditional_expectation(&other, &s_set).and_then(|e| trace_pairing_check(&y, &e, &s_set, tol)),
    );
    push("nested_tower", nested_tower_check(&y, &s_set, &outer, tol));
    push("layer_cake", layer_cake_agreement(&y.square(), tol));
    out
}

/// Worst relative gap between the layer-cake sum and `‖x‖_p^p` over
/// `p ∈ {1, 2, 4}`.
pub fn layer_cake_agreement(x: &Element, tol: &Tolerances) -> ncvar::Result<InequalityReport> {
    let mut worst = 0.0f64;
    for p in [1.0, 2.0, 4.0] {
        let lc = layer_cake_norm(x, p, tol)?;
        let sp = schatten_norm(x, p, tol)?.powf(p);
        worst = worst.max((lc - sp).abs() / sp.abs().max(f64::MIN_POSITIVE).max(lc.abs()));
    }
    Ok(InequalityReport::identity("layer_cake", worst, tol.rel).finish())
}
