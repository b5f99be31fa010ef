//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use ncvar::element::{diag_matrix, pauli_x, pauli_z};
use ncvar::independence::boolean_independence_check;
use ncvar::inequalities::{
    efron_stein_check, kadison_step_check, lemma_variance_bound, matrix_efron_stein_check, omit_one_polynomials,
    steele_check, CopyMode, MatrixRealization,
};
use ncvar::montecarlo::{
    classical_efron_stein_mc, matrix_efron_stein_mc, MatrixFunction, NormConvention, ScalarDistribution, ScalarExpr,
};
use ncvar::random::{random_hermitian, random_polynomial, random_psd, random_shape, sample_stream};
use ncvar::spectral::{layer_cake_norm, schatten_norm, tail_probability};
use ncvar::{
    AlgebraShape, Element, Error, FactorSet, InequalityReport, LocalMatrix, NcPolynomial, Tolerances, Verdict,
};
use ncvar_cli::output::{Outcome, Record};
use ncvar_cli::suite::{freeness_decay, fuzz_scenario, SuiteOptions};

type Criterion = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Criterion {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{label}: got {got}, want {want} ± {tol}"))
    }
}

fn ms(d: Duration) -> String {
    format!("{:.0} ms", d.as_secs_f64() * 1e3)
}

fn pauli_tightness() -> Criterion {
    let tol = Tolerances::default();
    let shape = AlgebraShape::new(vec![2, 2]).map_err(|e| e.to_string())?;
    let locals = vec![pauli_z(), pauli_x()];
    let f = NcPolynomial::parse(&NcPolynomial::standard_inputs(2), "x1 + x2").map_err(|e| e.to_string())?;
    let start = Instant::now();
    let reports = [
        lemma_variance_bound(&f, &locals, &shape, &tol),
        steele_check(&f, &locals, &shape, &omit_one_polynomials(&f), &tol),
        efron_stein_check(&f, &locals, &shape, CopyMode::Extension, &tol),
    ];
    let elapsed = start.elapsed();
    for r in reports {
        let r = r.map_err(|e| e.to_string())?;
        within(&format!("{} lhs", r.name), r.lhs, 2.0, 1e-9)?;
        within(&format!("{} rhs", r.name), r.rhs, 2.0, 1e-9)?;
        within(&format!("{} slack", r.name), r.slack, 0.0, 1e-9)?;
        if r.verdict != Verdict::Holds {
            return Err(format!("{} verdict {:?}", r.name, r.verdict));
        }
    }
    ensure(
        elapsed < Duration::from_secs(1),
        format!("lhs = rhs = 2 for all three; {}", ms(elapsed)),
    )
}

struct Campaign {
    records: Vec<Record>,
    elapsed: Duration,
}

fn run_campaign() -> Campaign {
    let opts = SuiteOptions::default();
    let start = Instant::now();
    let records: Vec<Record> = (0..500)
        .into_par_iter()
        .map(|i| fuzz_scenario(i, &opts))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Campaign {
        records,
        elapsed: start.elapsed(),
    }
}

const CAMPAIGN_CHECKS: &[&str] = &[
    "lemma_variance_bound",
    "steele",
    "norm_inequality",
    "trace_jensen",
    "kadison_step",
    "module_property",
    "trace_preservation",
    "tower_identity",
    "martingale_orthogonality",
    "variance_additivity",
    "martingale_projection",
    "contraction",
    "trace_pairing",
    "nested_tower",
];

fn fuzz_campaign(c: &Campaign) -> Criterion {
    let mut checked = 0usize;
    let mut worst_orth = 0.0f64;
    let mut worst_additivity = 0.0f64;
    for r in &c.records {
        if !CAMPAIGN_CHECKS.contains(&r.name()) {
            continue;
        }
        checked += 1;
        let Some(rep) = r.report() else {
            return Err(format!("{} {} failed to evaluate", r.scenario, r.name()));
        };
        if rep.verdict != Verdict::Holds {
            return Err(format!(
                "{} {} verdict {:?} slack {}",
                r.scenario, rep.name, rep.verdict, rep.slack
            ));
        }
        if rep.slack < -1e-9 * rep.rhs.abs().max(1.0) {
            return Err(format!("{} {} slack {}", r.scenario, rep.name, rep.slack));
        }
        match rep.name.as_str() {
            "martingale_orthogonality" => worst_orth = worst_orth.max(rep.lhs),
            "variance_additivity" => worst_additivity = worst_additivity.max(rep.lhs),
            _ => {}
        }
    }
    within("max |tau(z_i z_j)|", worst_orth, 0.0, 1e-10)?;
    within("max variance additivity error", worst_additivity, 0.0, 1e-9)?;
    ensure(
        c.elapsed < Duration::from_secs(60),
        format!(
            "{checked} checks over 500 scenarios, 0 violations; max |tau(z_i z_j)| = {worst_orth:.1e}, max additivity error = {worst_additivity:.1e}; {}",
            ms(c.elapsed)
        ),
    )
}

fn efron_stein_conditional(c: &Campaign) -> Criterion {
    let es: Vec<&InequalityReport> = c
        .records
        .iter()
        .filter_map(Record::report)
        .filter(|r| r.name == "efron_stein" && r.realization.as_deref() == Some(CopyMode::Extension.tag()))
        .collect();
    if es.len() != 500 {
        return Err(format!("expected 500 extension-mode reports, found {}", es.len()));
    }
    let holding: Vec<_> = es.iter().filter(|r| r.hypotheses_hold()).collect();
    if let Some(bad) = holding.iter().find(|r| r.slack < -1e-9 * r.rhs.abs().max(1.0)) {
        return Err(format!("slack {} with rhs {}", bad.slack, bad.rhs));
    }
    let errors = c
        .records
        .iter()
        .filter(|r| r.name() == "efron_stein" && r.outcome() == Outcome::Error)
        .count();
    ensure(
        errors == 0,
        format!(
            "hypotheses hold in {}/500 ({:.1}%), all with nonnegative slack",
            holding.len(),
            100.0 * holding.len() as f64 / 500.0
        ),
    )
}

fn spectral_calculus() -> Criterion {
    let tol = Tolerances::default();
    let mut rng = sample_stream(4, 0);
    let mut worst = 0.0f64;
    let mut max_dim = 0;
    for k in 0..200 {
        let sh = random_shape(&mut rng, 4, 4, 256);
        let x = if k % 2 == 0 {
            Element::new(sh.clone(), random_psd(&mut rng, sh.total_dim()))
        } else {
            // Degenerate spectrum: a PSD local block tensored with identities.
            let set = FactorSet::singleton(&sh, 0).map_err(|e| e.to_string())?;
            Element::embed_on(&random_psd(&mut rng, set.local_dim(&sh)), &set, &sh)
        }
        .map_err(|e| e.to_string())?;
        max_dim = max_dim.max(x.dim());
        for p in [1.0, 2.0, 4.0] {
            let lc = layer_cake_norm(&x, p, &tol).map_err(|e| e.to_string())?;
            let sp = schatten_norm(&x, p, &tol).map_err(|e| e.to_string())?.powf(p);
            let rel = (lc - sp).abs() / sp.abs().max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
        }
    }
    if worst > 1e-9 {
        return Err(format!("worst relative gap {worst:.2e}"));
    }
    let z = Element::tensor_embed(&pauli_z(), 0, &AlgebraShape::new(vec![2]).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let tail = tail_probability(&z, 0.5, &tol).map_err(|e| e.to_string())?;
    ensure(
        tail == 0.5,
        format!("200 elements up to dim {max_dim}, worst relative gap {worst:.1e}; tail_probability(Z, 0.5) = {tail}"),
    )
}

fn matrix_consistency() -> Criterion {
    let tol = Tolerances::default();
    let mut worst = 0.0f64;
    for k in 0..50u64 {
        let mut rng = sample_stream(5, k);
        let sh = random_shape(&mut rng, 3, 3, 64);
        let locals: Vec<LocalMatrix> = sh
            .factor_dims()
            .iter()
            .map(|&d| random_hermitian(&mut rng, d))
            .collect();
        let f = random_polynomial(&mut rng, sh.n_factors(), 3);
        let scalar = efron_stein_check(&f, &locals, &sh, CopyMode::Extension, &tol).map_err(|e| e.to_string())?;
        for real in [MatrixRealization::MatrixLeg, MatrixRealization::Strict] {
            let m = matrix_efron_stein_check(&f, 1, &locals, &sh, CopyMode::Extension, real, &tol)
                .map_err(|e| e.to_string())?;
            let gap = (m.lhs - scalar.lhs).abs().max((m.rhs - scalar.rhs).abs());
            if gap > 1e-10 {
                return Err(format!(
                    "scenario {k} {}: lhs {} vs {}, rhs {} vs {}",
                    real.tag(),
                    m.lhs,
                    scalar.lhs,
                    m.rhs,
                    scalar.rhs
                ));
            }
            worst = worst.max(gap);
        }
    }

    let mut rng = sample_stream(5, 1000);
    let mut equalities = 0;
    for k in 0..200 {
        let d = 1 + k % 6;
        let a = random_hermitian(&mut rng, d);
        let r = kadison_step_check(&a, &tol).map_err(|e| e.to_string())?;
        if !r.passed {
            return Err(format!("kadison violated on random matrix {k}"));
        }
        // Random Hermitian matrices of size ≥ 2 are almost surely not scalar.
        let expect_eq = d == 1;
        if (r.note("equality") == Some(1.0)) != expect_eq {
            return Err(format!("equality flag wrong on random matrix {k} (d={d})"));
        }
        equalities += usize::from(expect_eq);
    }
    for (k, c) in [-3.5, 0.0, 1.0, 2.25].into_iter().enumerate() {
        let a = diag_matrix(&vec![c; 2 + k]);
        let r = kadison_step_check(&a, &tol).map_err(|e| e.to_string())?;
        if r.note("equality") != Some(1.0) || r.note("scalar_defect") != Some(0.0) {
            return Err(format!("equality not detected for {c}·I"));
        }
    }
    Ok(format!(
        "50 scenarios, worst gap {worst:.1e}; kadison holds on 200 random matrices ({equalities} scalar 1×1), equality exact on c·I"
    ))
}

fn rademacher(n: usize) -> Vec<ScalarDistribution> {
    vec![ScalarDistribution::Rademacher; n]
}

fn mc_scalar() -> Criterion {
    let start = Instant::now();
    let r = classical_efron_stein_mc(&ScalarExpr::sum_of_inputs(5), &rademacher(5), 100_000, 7)
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let var = r.estimator("var").ok_or("missing var estimator")?;
    let ssd = r.estimator("sum_sq_diff").ok_or("missing sum_sq_diff estimator")?;
    within("var", var.estimate, 5.0, 3.0 * var.std_error)?;
    within("half rhs", 0.5 * ssd.estimate, 5.0, 3.0 * 0.5 * ssd.std_error)?;
    let one_over_n = r.report.note("slack_one_over_n").ok_or("1/n variant not reported")?;
    if !r.report.passed {
        return Err("inequality not satisfied within 3σ".into());
    }
    ensure(
        elapsed < Duration::from_secs(5),
        format!(
            "var = {:.4} ± {:.4}, ½rhs = {:.4} ± {:.4}; 1/n slack = {one_over_n:.4}; {}",
            var.estimate,
            var.std_error,
            0.5 * ssd.estimate,
            0.5 * ssd.std_error,
            ms(elapsed)
        ),
    )
}

fn mc_matrix() -> Criterion {
    let tol = Tolerances::default();
    let coeffs = vec![
        diag_matrix(&[1.0, 0.5]),
        diag_matrix(&[-2.0, 1.0]),
        diag_matrix(&[0.25, 3.0]),
    ];
    // Normalized ‖A‖₂² = (1/d) Σ a_i².
    let exact: f64 = coeffs
        .iter()
        .map(|a| a.iter().map(|z| z.norm_sqr()).sum::<f64>() / 2.0)
        .sum();
    let f = MatrixFunction::linear(None, coeffs, &tol).map_err(|e| e.to_string())?;
    let run = || matrix_efron_stein_mc(&f, &rademacher(3), 100_000, 7, NormConvention::Normalized);
    let r = run().map_err(|e| e.to_string())?;
    let lhs = r.estimator("norm2_sq").ok_or("missing norm2_sq estimator")?;
    within("lhs vs exact", lhs.estimate, exact, 3.0 * lhs.std_error)?;
    if !r.report.passed {
        return Err(format!("inequality not satisfied within 3σ: slack {}", r.report.slack));
    }
    let a = serde_json::to_string(&r).map_err(|e| e.to_string())?;
    let b = serde_json::to_string(&run().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(
        a == b,
        format!(
            "lhs = {:.4} ± {:.4} vs exact {exact}; rhs = {:.4}; repeat byte-identical",
            lhs.estimate, lhs.std_error, r.report.rhs
        ),
    )
}

fn freeness() -> Criterion {
    let r = freeness_decay(64, 256, 200, 11, &Tolerances::default()).map_err(|e| e.to_string())?;
    let ratio = r.note("ratio").ok_or("missing ratio")?;
    ensure(
        (2.0..=8.0).contains(&ratio) && r.passed,
        format!(
            "statistic {:.3e} at 64, {:.3e} at 256, ratio {ratio:.2}",
            r.note("statistic_small").unwrap_or(f64::NAN),
            r.note("statistic_large").unwrap_or(f64::NAN)
        ),
    )
}

fn negative_controls() -> Criterion {
    let tol = Tolerances::default();
    let shape = AlgebraShape::new(vec![2, 2]).map_err(|e| e.to_string())?;
    let z = Element::tensor_embed(&pauli_z(), 0, &shape).map_err(|e| e.to_string())?;
    let b = boolean_independence_check(&z, &z, &tol).map_err(|e| e.to_string())?;
    if b.passed || b.verdict != Verdict::Violated {
        return Err("boolean independence accepted x = y = Z⊗I".into());
    }

    let names = NcPolynomial::standard_inputs(2);
    let f = NcPolynomial::parse(&names, "x1 + x2").map_err(|e| e.to_string())?;
    let bad = vec![f.clone(), NcPolynomial::parse(&names, "x1").map_err(|e| e.to_string())?];
    match steele_check(&f, &[pauli_z(), pauli_x()], &shape, &bad, &tol) {
        Err(Error::ForbiddenInput { .. }) => {}
        other => return Err(format!("steele accepted f_1 mentioning x1: {other:?}")),
    }

    let out = Command::new(env!("CARGO_BIN_EXE_ncvar"))
        .args(["suite", "--tol", "1e-30", "--fuzz-count", "20"])
        .output()
        .map_err(|e| e.to_string())?;
    let code = out.status.code();
    ensure(
        code == Some(1),
        format!(
            "boolean x = y violated (defect {:.2}); steele rejects forbidden input; suite --tol 1e-30 exits {code:?}",
            b.lhs
        ),
    )
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: usize, title: &str, f: &mut dyn FnMut() -> Criterion| {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("PASS {id} {title}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id} {title}: {detail}");
            }
        }
    };
    report(1, "pauli tightness", &mut pauli_tightness);
    let campaign = run_campaign();
    report(2, "fuzz campaign", &mut || fuzz_campaign(&campaign));
    report(3, "efron-stein conditional", &mut || efron_stein_conditional(&campaign));
    report(4, "spectral calculus", &mut spectral_calculus);
    report(5, "matrix efron-stein consistency", &mut matrix_consistency);
    report(6, "monte carlo scalar", &mut mc_scalar);
    report(7, "monte carlo matrix", &mut mc_matrix);
    report(8, "asymptotic freeness", &mut freeness);
    report(9, "negative controls", &mut negative_controls);
    if failed == 0 {
        println!("acceptance: 9/9 passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 9 failed");
        ExitCode::FAILURE
    }
}
