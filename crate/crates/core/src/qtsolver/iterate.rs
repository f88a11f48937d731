//! Iterations for `B Λ⁻¹ Bᵀ + Λ = M` and the quadratic equation
//! `Q(Y) = −Bᵀ + M Y − B Y² = 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    dense_inverse, dense_solve, dense_solve_right, frobenius_norm, sylvester_generalized_solve,
    CMat,
};

/// `‖X − X_prev‖_F / ‖X_prev‖_F`.
pub fn rho_d(x: &CMat, prev: &CMat) -> f64 {
    let d = frobenius_norm(&(x - prev));
    let p = frobenius_norm(prev);
    if d == 0.0 {
        0.0
    } else {
        d / p
    }
}

pub fn qme_residual(m: &CMat, b: &CMat, y: &CMat) -> CMat {
    m * y - b * (y * y) - b.transpose()
}

/// Relative residual of the quadratic matrix equation at `y`.
pub fn rho_n(m: &CMat, b: &CMat, y: &CMat) -> f64 {
    let q = frobenius_norm(&qme_residual(m, b, y));
    if q == 0.0 {
        return 0.0;
    }
    let ny = frobenius_norm(y);
    let nb = frobenius_norm(b);
    q / (nb * ny * ny + frobenius_norm(m) * ny + nb)
}

/// `‖B Λ⁻¹ Bᵀ + Λ − M‖_F / ‖M‖_F`.
pub fn lambda_error(m: &CMat, b: &CMat, lambda: &CMat) -> Result<f64> {
    let g = b * dense_solve(lambda, &b.transpose())? + lambda - m;
    Ok(frobenius_norm(&g) / frobenius_norm(m))
}

/// Iteration counts, residual histories and final error of one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IterationReport {
    pub double_iterations: usize,
    pub newton_iterations: usize,
    pub rho_d: Vec<f64>,
    pub rho_n: Vec<f64>,
    /// Error of the Double-method initializer, when one was used.
    pub err_initial: Option<f64>,
    pub err: f64,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct DoubleOutcome {
    pub lambda: CMat,
    pub history: Vec<f64>,
    pub converged: bool,
}

/// Structured doubling for `B Λ⁻¹ Bᵀ + Λ = M` starting from
/// `B⁰ = Bᵀ`, `Λ⁰ = M`, `P⁰ = 0`.
pub fn double_method(m: &CMat, b: &CMat, eps_d: f64, max_iters: usize) -> Result<DoubleOutcome> {
    let n = m.nrows();
    let mut bk = b.transpose();
    let mut lambda = m.clone();
    let mut p = CMat::zeros(n, n);
    let mut history = Vec::new();
    for k in 1..=max_iters {
        let w = dense_inverse(&(&lambda - &p)).map_err(|e| Error::IterationSingular {
            what: "Double method",
            iteration: k,
            source: Box::new(e),
        })?;
        let wb = &w * &bk;
        let bkt = bk.transpose();
        let next_b = &bk * &wb;
        let next_lambda = &lambda - &bkt * &wb;
        p += &bk * &w * &bkt;
        let rho = rho_d(&next_lambda, &lambda);
        history.push(rho);
        bk = next_b;
        lambda = next_lambda;
        if rho < eps_d {
            return Ok(DoubleOutcome {
                lambda,
                history,
                converged: true,
            });
        }
    }
    Ok(DoubleOutcome {
        lambda,
        history,
        converged: false,
    })
}

#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub y: CMat,
    pub history: Vec<f64>,
    pub converged: bool,
}

/// When a Newton iteration stops.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NewtonStop {
    /// `ρ_N(Y) ≤ eps`.
    Residual(f64),
    /// Relative step `‖Y_k − Y_{k−1}‖_F / ‖Y_{k−1}‖_F < eps`.
    Step(f64),
}

/// Newton's method on `Q(Y) = 0` stopping on `ρ_N(Y) ≤ eps_n`.
pub fn newton_qme(
    m: &CMat,
    b: &CMat,
    y0: &CMat,
    eps_n: f64,
    iter_max: usize,
) -> Result<NewtonOutcome> {
    newton_qme_with(m, b, y0, NewtonStop::Residual(eps_n), iter_max)
}

/// Newton's method on `Q(Y) = 0`; each step solves
/// `B E Y + (B Y − M) E = Q(Y)`. The history records `ρ_N` per step.
pub fn newton_qme_with(
    m: &CMat,
    b: &CMat,
    y0: &CMat,
    stop: NewtonStop,
    iter_max: usize,
) -> Result<NewtonOutcome> {
    let mut y = y0.clone();
    let mut history = Vec::new();
    let mut rho = rho_n(m, b, &y);
    let mut step = f64::INFINITY;
    let done = |rho: f64, step: f64| match stop {
        NewtonStop::Residual(eps) => rho <= eps,
        NewtonStop::Step(eps) => step < eps || rho == 0.0,
    };
    while !done(rho, step) && history.len() < iter_max {
        let q = qme_residual(m, b, &y);
        let a1 = b * &y - m;
        let e =
            sylvester_generalized_solve(&a1, b, &y, &q).map_err(|e| Error::IterationSingular {
                what: "Newton step",
                iteration: history.len() + 1,
                source: Box::new(e),
            })?;
        let ny = frobenius_norm(&y);
        step = if ny == 0.0 {
            frobenius_norm(&e)
        } else {
            frobenius_norm(&e) / ny
        };
        y += e;
        rho = rho_n(m, b, &y);
        history.push(rho);
    }
    Ok(NewtonOutcome {
        y,
        history,
        converged: done(rho, step),
    })
}

/// Double method followed by Newton refinement of `Y = Λ⁻¹ Bᵀ`; returns
/// `Λ₁* = M − B Y`.
pub fn double_newton(
    m: &CMat,
    b: &CMat,
    eps_d: f64,
    eps_n: f64,
    iter_max: usize,
) -> Result<(CMat, IterationReport)> {
    double_newton_with(m, b, eps_d, NewtonStop::Residual(eps_n), iter_max)
}

/// [`double_newton`] with an explicit Newton stopping rule.
pub fn double_newton_with(
    m: &CMat,
    b: &CMat,
    eps_d: f64,
    stop: NewtonStop,
    iter_max: usize,
) -> Result<(CMat, IterationReport)> {
    let d = double_method(m, b, eps_d, iter_max)?;
    let err_initial = lambda_error(m, b, &d.lambda).ok();
    let y0 = dense_solve(&d.lambda, &b.transpose()).map_err(|e| Error::IterationSingular {
        what: "Newton initializer",
        iteration: 0,
        source: Box::new(e),
    })?;
    let nw = newton_qme_with(m, b, &y0, stop, iter_max)?;
    let lambda = m - b * &nw.y;
    let err = lambda_error(m, b, &lambda)?;
    Ok((
        lambda,
        IterationReport {
            double_iterations: d.history.len(),
            newton_iterations: nw.history.len(),
            rho_d: d.history,
            rho_n: nw.history,
            err_initial,
            err,
            converged: nw.converged,
        },
    ))
}

/// Newton's method directly on `G(Λ) = B Λ⁻¹ Bᵀ + Λ − M`; each step solves
/// `X − (B Λ⁻¹) X (Λ⁻¹ Bᵀ) = −G(Λ)`. Stops when the relative step falls
/// below `eps`.
pub fn newton_lambda(
    m: &CMat,
    b: &CMat,
    lambda0: &CMat,
    eps: f64,
    iter_max: usize,
) -> Result<(CMat, Vec<f64>, bool)> {
    let n = m.nrows();
    let mut lambda = lambda0.clone();
    let mut history = Vec::new();
    let ident = CMat::identity(n, n);
    for k in 1..=iter_max {
        let step = |e: Error| Error::IterationSingular {
            what: "Newton step on Λ",
            iteration: k,
            source: Box::new(e),
        };
        let r = dense_solve(&lambda, &b.transpose()).map_err(step)?;
        let l = dense_solve_right(&lambda, b).map_err(step)?;
        let g = b * &r + &lambda - m;
        let x = sylvester_generalized_solve(&ident, &(-&l), &r, &(-g)).map_err(step)?;
        let next = &lambda + x;
        let rho = rho_d(&next, &lambda);
        history.push(rho);
        lambda = next;
        if rho < eps {
            return Ok((lambda, history, true));
        }
    }
    Ok((lambda, history, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn s(v: f64) -> CMat {
        CMat::from_element(1, 1, C::new(v, 0.0))
    }

    #[test]
    fn scalar_double_iterates() {
        let d = double_method(&s(5.0), &s(2.0), 1e-300, 3).unwrap();
        assert!(!d.converged);
        let d1 = double_method(&s(5.0), &s(2.0), 1e-300, 1).unwrap();
        assert!((d1.lambda[(0, 0)].re - 4.2).abs() < 1e-15);
        let d2 = double_method(&s(5.0), &s(2.0), 1e-300, 2).unwrap();
        assert!((d2.lambda[(0, 0)].re - (4.2 - 0.64 / 3.4)).abs() < 1e-14);
        let full = double_method(&s(5.0), &s(2.0), 1e-14, 50).unwrap();
        assert!(full.converged);
        assert!((full.lambda[(0, 0)].re - 4.0).abs() < 1e-12);
        let h = &full.history;
        assert!(h.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn zero_coupling_is_a_fixed_point() {
        let m = CMat::from_fn(3, 3, |i, j| C::new(if i == j { 4.0 } else { 0.5 }, 0.1));
        let d = double_method(&m, &CMat::zeros(3, 3), 1e-10, 10).unwrap();
        assert_eq!(d.history, vec![0.0]);
        assert_eq!(d.lambda, m);
    }

    #[test]
    fn scalar_newton_finds_half() {
        let out = newton_qme(&s(5.0), &s(2.0), &s(0.6), 1e-15, 50).unwrap();
        assert!(out.converged);
        assert!((out.y[(0, 0)].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn newton_at_a_root_takes_no_steps() {
        let out = newton_qme(&s(5.0), &s(2.0), &s(0.5), 1e-12, 50).unwrap();
        assert!(out.history.is_empty());
        assert_eq!(out.y, s(0.5));
    }

    #[test]
    fn scalar_double_newton() {
        let (lambda, rep) = double_newton(&s(5.0), &s(2.0), 1e-10, 1e-14, 50).unwrap();
        assert!((lambda[(0, 0)].re - 4.0).abs() < 1e-12);
        assert!(rep.err < 1e-14);
        assert_eq!(rep.rho_d.len(), rep.double_iterations);
        assert_eq!(rep.rho_n.len(), rep.newton_iterations);
    }

    #[test]
    fn newton_on_lambda_scalar() {
        let (lambda, _, ok) = newton_lambda(&s(5.0), &s(2.0), &s(5.0), 1e-14, 50).unwrap();
        assert!(ok);
        assert!((lambda[(0, 0)].re - 4.0).abs() < 1e-12);
    }

    #[test]
    fn metric_identities() {
        let x = CMat::from_fn(2, 2, |i, j| C::new(i as f64 + 1.0, j as f64));
        assert_eq!(rho_d(&x, &x), 0.0);
        assert_eq!(rho_n(&s(5.0), &s(2.0), &s(0.5)), 0.0);
        assert!(rho_n(&s(5.0), &s(2.0), &s(0.4)) > 0.0);
    }
}
