//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

mod common;

use std::time::Instant;

use num_complex::Complex64 as C;
use sawfeti::feti::{nodal_fields, solve_saw, FetiModel, SubregionField};
use sawfeti::geometry::{GeometrySpec, SubregionKind};
use sawfeti::linalg::{frobenius_norm, sylvester_generalized_solve, CMat};
use sawfeti::model::{ProblemConfig, ScaleSet, SolverChoice};
use sawfeti::oracle::{assemble_monolithic, solve_monolithic};
use sawfeti::qtsolver::{
    complete_factorization, double_method, double_newton, double_newton_with, lambda_error,
    newton_qme, qt_dense_oracle, smw_solve, NewtonStop, QTSystem,
};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'a str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_geometry() -> GeometrySpec {
    GeometrySpec::small([5, 3, 5], [3, 3, 3], 3, [2, 2, 2])
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let cfg = common::config(3, vec![1.0, 0.0, -1.0], oracle_geometry());
    let feti = solve_saw(&cfg).map_err(|e| e.to_string())?;
    let (mono, _) = solve_monolithic(&assemble_monolithic(&cfg).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let d = feti
        .fields
        .relative_difference(&mono)
        .map_err(|e| e.to_string())?;
    let t = start.elapsed().as_secs_f64();
    check(
        d <= 1e-8 && t < 60.0,
        format!("relative L2 difference {d:.3e} (≤ 1e-8), {t:.2} s (< 60 s)"),
    )
}

/// FETI-derived blocks on the default cell resolution.
fn feti_blocks() -> Result<QTSystem, String> {
    let cfg = common::config(2, vec![1.0, 0.0], GeometrySpec::default());
    let model = FetiModel::build(&cfg).map_err(|e| e.to_string())?;
    Ok(model.qt)
}

fn double_newton_quality(qt: &QTSystem) -> Outcome {
    let n_m = qt.block_size();
    // Both methods start from M and stop on the relative step, as in a head-to-head comparison.
    let (_, report) = double_newton_with(&qt.m, &qt.b, 1e-10, NewtonStop::Step(1e-10), 50)
        .map_err(|e| e.to_string())?;
    let double = double_method(&qt.m, &qt.b, 1e-10, 50).map_err(|e| e.to_string())?;
    let err_double = lambda_error(&qt.m, &qt.b, &double.lambda).map_err(|e| e.to_string())?;
    let ok = n_m <= 300 && report.err <= 1e-9 && report.err <= 1e-3 * err_double;
    check(
        ok,
        format!(
            "n_m = {n_m}, Err(Double-Newton) = {:.3e} (≤ 1e-9), Err(Double) = {err_double:.3e}, ratio {:.3e} (≤ 1e-3)",
            report.err,
            report.err / err_double
        ),
    )
}

fn smw_versus_banded(feti: &QTSystem) -> Outcome {
    let mut rng = common::rng(7);
    let mut worst: f64 = 0.0;
    let small_feti = FetiModel::build(&common::config(2, vec![1.0, 0.0], oracle_geometry()))
        .map_err(|e| e.to_string())?
        .qt;
    for base in [None, Some(&small_feti), Some(feti)] {
        for n in [4, 16, 64] {
            let sys = match base {
                None => common::dominant_system(&mut rng, 40, n, 1),
                Some(b) => common::with_blocks(b, n, &mut rng),
            };
            let (lambda1, report) =
                double_newton(&sys.m, &sys.b, 1e-10, 1e-10, 50).map_err(|e| e.to_string())?;
            let fact = complete_factorization(&lambda1, &sys.b, &sys.m_l, &sys.m_r)
                .map_err(|e| e.to_string())?
                .with_report(report);
            let x = smw_solve(&fact, &sys).map_err(|e| e.to_string())?;
            let y = qt_dense_oracle(&sys, usize::MAX).map_err(|e| e.to_string())?;
            let agreement = frobenius_norm(&(&x - &y)) / frobenius_norm(&y);
            worst = worst.max(sys.relative_residual(&x)).max(agreement);
        }
    }
    check(
        worst <= 1e-8,
        format!(
            "worst residual / disagreement {worst:.3e} over synthetic and FETI blocks (≤ 1e-8)"
        ),
    )
}

fn smw_time(n_blocks: usize) -> Result<f64, String> {
    let mut rng = common::rng(11);
    let sys = common::dominant_system(&mut rng, 100, n_blocks, 1);
    let (lambda1, _) =
        double_newton(&sys.m, &sys.b, 1e-10, 1e-10, 50).map_err(|e| e.to_string())?;
    let fact =
        complete_factorization(&lambda1, &sys.b, &sys.m_l, &sys.m_r).map_err(|e| e.to_string())?;
    let mut best = f64::INFINITY;
    for _ in 0..3 {
        let t = Instant::now();
        smw_solve(&fact, &sys).map_err(|e| e.to_string())?;
        best = best.min(t.elapsed().as_secs_f64());
    }
    Ok(best)
}

fn linear_scaling() -> Outcome {
    let (t64, t256) = (smw_time(64)?, smw_time(256)?);
    let ratio = t256 / t64;
    check(
        ratio <= 5.0,
        format!("t(256) = {t256:.3} s, t(64) = {t64:.3} s, ratio {ratio:.2} (≤ 5)"),
    )
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    CMat::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

fn sylvester_kernel() -> Outcome {
    let mut rng = common::rng(3);
    let mut worst: f64 = 0.0;
    for (n, m) in [(1, 1), (2, 3), (5, 4), (8, 8)] {
        let a1 = common::random_matrix(&mut rng, n, n) + CMat::identity(n, n) * C::new(3.0, 0.0);
        let a2 = common::random_matrix(&mut rng, n, n);
        let y = common::random_matrix(&mut rng, m, m);
        let c = common::random_matrix(&mut rng, n, m);
        let e = sylvester_generalized_solve(&a1, &a2, &y, &c).map_err(|e| e.to_string())?;
        let op = kron(&CMat::identity(m, m), &a1) + kron(&y.transpose(), &a2);
        let vec_c = CMat::from_column_slice(n * m, 1, c.as_slice());
        let vec_e = sawfeti::linalg::dense_solve(&op, &vec_c).map_err(|e| e.to_string())?;
        let mine = CMat::from_column_slice(n * m, 1, e.as_slice());
        worst = worst.max(frobenius_norm(&(&mine - &vec_e)) / frobenius_norm(&vec_e));
    }
    check(
        worst <= 1e-10,
        format!("worst relative difference to Kronecker oracle {worst:.3e} (≤ 1e-10)"),
    )
}

/// Relative differences of displacement and potential over all nodes.
fn physical_difference(a: &[SubregionField], b: &[SubregionField]) -> (f64, f64) {
    let (mut du, mut nu, mut dp, mut np) = (0.0, 0.0, 0.0, 0.0);
    for (fa, fb) in a.iter().zip(b) {
        for (x, y) in fa.nodes.iter().zip(&fb.nodes) {
            for k in 0..3 {
                du += (x.u[k] - y.u[k]).norm_sqr();
                nu += y.u[k].norm_sqr();
            }
            dp += (x.phi - y.phi).norm_sqr();
            np += y.phi.norm_sqr();
        }
    }
    ((du / nu).sqrt(), (dp / np).sqrt())
}

fn scaling_equivalence() -> Outcome {
    let scaled = common::tiny(1, vec![1.0]);
    let mut raw = scaled.clone();
    raw.scales = ScaleSet::identity();
    let gs = assemble_monolithic(&scaled).map_err(|e| e.to_string())?;
    let gr = assemble_monolithic(&raw).map_err(|e| e.to_string())?;
    let (fs, _) = solve_monolithic(&gs).map_err(|e| e.to_string())?;
    let (fr, _) = solve_monolithic(&gr).map_err(|e| e.to_string())?;
    let (du, dp) = physical_difference(
        &nodal_fields(&gs.problem, &fs),
        &nodal_fields(&gr.problem, &fr),
    );
    let dofs = gs.dofs();
    check(
        dofs <= 500 && du <= 1e-10 && dp <= 1e-10,
        format!("{dofs} DOFs, displacement {du:.3e}, potential {dp:.3e} (≤ 1e-10)"),
    )
}

fn scalar_fixtures() -> Outcome {
    let s = |v: f64| CMat::from_element(1, 1, C::new(v, 0.0));
    let (lambda, _) =
        double_newton(&s(5.0), &s(2.0), 1e-14, 1e-14, 50).map_err(|e| e.to_string())?;
    let e1 = (lambda[(0, 0)] - C::new(4.0, 0.0)).norm();
    let y = newton_qme(&s(5.0), &s(2.0), &s(0.6), 1e-15, 50)
        .map_err(|e| e.to_string())?
        .y;
    let e2 = (y[(0, 0)] - C::new(0.5, 0.0)).norm();
    let sys = QTSystem::new(
        s(2.0),
        s(2.0),
        s(2.0),
        s(-1.0),
        2,
        CMat::from_column_slice(
            3,
            1,
            &[C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)],
        ),
    )
    .map_err(|e| e.to_string())?;
    let (l1, _) = double_newton(&sys.m, &sys.b, 1e-14, 1e-14, 60).map_err(|e| e.to_string())?;
    let fact =
        complete_factorization(&l1, &sys.b, &sys.m_l, &sys.m_r).map_err(|e| e.to_string())?;
    let x = smw_solve(&fact, &sys).map_err(|e| e.to_string())?;
    let e3 = [0.75, 0.5, 0.25]
        .iter()
        .enumerate()
        .map(|(i, v)| (x[(i, 0)] - C::new(*v, 0.0)).norm())
        .fold(0.0, f64::max);
    let worst = e1.max(e2).max(e3);
    check(
        worst <= 1e-12,
        format!("Λ₁ error {e1:.1e}, y error {e2:.1e}, chain error {e3:.1e} (≤ 1e-12)"),
    )
}

fn pml_decay() -> Outcome {
    let cfg = common::config(3, vec![1.0, 0.0, 1.0], oracle_geometry());
    let sol = solve_saw(&cfg).map_err(|e| e.to_string())?;
    let g = &cfg.geometry;
    let um = 1e-6;
    let (p_end, d, h) = (
        cfg.cells as f64 * g.pitch * um,
        g.pml_thickness * um,
        g.depth * um,
    );
    let tol = 1e-9 * um;
    let near = |a: f64, b: f64| (a - b).abs() <= tol;
    let (mut ext, mut int, mut inner) = (0.0f64, 0.0f64, 0.0f64);
    let layer = d / (g.pml_nodes - 1) as f64;
    for f in sol
        .nodal_fields()
        .iter()
        .filter(|f| f.kind != SubregionKind::Electrode)
    {
        for n in &f.nodes {
            let [x1, _, x3] = n.x;
            let mag = n.u.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if near(x1, -d) || near(x1, p_end + d) || near(x3, -h - d) {
                ext = ext.max(mag);
            }
            let inside = x1 >= -tol && x1 <= p_end + tol && x3 >= -h - tol;
            if inside && (near(x1, 0.0) || near(x1, p_end) || near(x3, -h)) {
                int = int.max(mag);
            }
            if near(x1, -d + layer) || near(x1, p_end + d - layer) || near(x3, -h - d + layer) {
                inner = inner.max(mag);
            }
        }
    }
    check(
        ext <= 1e-2 * int,
        format!(
            "max|u| on outer boundary {ext:.3e} m, on PML junction {int:.3e} m (ratio ≤ 1e-2); one layer inside the outer boundary {:.3e} of junction",
            inner / int
        ),
    )
}

fn dimensionality_reduction() -> Outcome {
    let mut counts = Vec::new();
    for n in 1..=4 {
        let cfg = common::config(
            n,
            ProblemConfig::alternating_voltages(n, 1.0),
            oracle_geometry(),
        );
        let sol = solve_saw(&cfg).map_err(|e| e.to_string())?;
        let mono = assemble_monolithic(&cfg).map_err(|e| e.to_string())?.dofs();
        counts.push((
            sol.report.multiplier_dofs,
            mono,
            sol.report.n_t + sol.report.n_r,
        ));
    }
    let smaller = counts.iter().all(|(m, g, _)| m < g);
    let growth = counts.windows(2).all(|w| w[1].0 - w[0].0 == w[0].2);
    let text: Vec<String> = counts.iter().map(|(m, g, _)| format!("{m}<{g}")).collect();
    check(
        smaller && growth,
        format!(
            "multiplier vs monolithic DOFs for N = 1..4: {}, growth per cell {} = n_t + n_r",
            text.join(", "),
            counts[0].2
        ),
    )
}

fn voltage_reuse() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (n, voltages) in [
        (6, ProblemConfig::alternating_voltages(6, 1.0)),
        (5, vec![0.3, 0.3, -0.2, 0.3, -0.2]),
        (4, vec![1.0, 2.0, 3.0, 4.0]),
    ] {
        let mut cfg = common::tiny(n, voltages);
        cfg.solver = SolverChoice::Dense;
        let expected = cfg.distinct_voltages();
        let sol = solve_saw(&cfg).map_err(|e| e.to_string())?;
        ok &= sol.report.lift_solves == expected && sol.report.trace_solves == 6;
        lines.push(format!(
            "N = {n}: {} lift solves for {expected} voltages",
            sol.report.lift_solves
        ));
    }
    check(ok, lines.join("; "))
}

#[test]
fn acceptance() {
    let feti = feti_blocks();
    let criteria: Vec<Criterion> = vec![
        ("oracle equivalence", Box::new(oracle_equivalence)),
        (
            "Double-Newton quality",
            Box::new(|| double_newton_quality(feti.as_ref().map_err(Clone::clone)?)),
        ),
        (
            "SMW correctness",
            Box::new(|| smw_versus_banded(feti.as_ref().map_err(Clone::clone)?)),
        ),
        ("linear-in-N scaling", Box::new(linear_scaling)),
        ("generalized Sylvester kernel", Box::new(sylvester_kernel)),
        ("scaling equivalence", Box::new(scaling_equivalence)),
        ("analytic scalar fixtures", Box::new(scalar_fixtures)),
        ("PML decay", Box::new(pml_decay)),
        (
            "dimensionality reduction",
            Box::new(dimensionality_reduction),
        ),
        ("voltage-pattern reuse", Box::new(voltage_reuse)),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                println!("FAIL {:>2} {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
