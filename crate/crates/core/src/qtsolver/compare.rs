//! Side-by-side run of the four iterations for `B Λ⁻¹ Bᵀ + Λ = M`, all
//! started from `M` and stopped on the relative step.

use std::time::Instant;

use serde::Serialize;

use super::iterate::{
    double_method, double_newton_with, lambda_error, newton_lambda, newton_qme_with, NewtonStop,
};
use crate::error::Result;
use crate::linalg::{dense_solve, CMat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    DoubleNewton,
    Double,
    NewtonQuadratic,
    NewtonLambda,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::DoubleNewton,
        Method::Double,
        Method::NewtonQuadratic,
        Method::NewtonLambda,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::DoubleNewton => "double-newton",
            Method::Double => "double",
            Method::NewtonQuadratic => "newton-quadratic",
            Method::NewtonLambda => "newton-lambda",
        }
    }
}

/// Outcome of one method; failures are recorded rather than propagated.
#[derive(Clone, Debug, Serialize)]
pub struct MethodResult {
    pub method: Method,
    pub seconds: f64,
    pub err: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub failure: Option<String>,
}

fn run(
    method: Method,
    m: &CMat,
    b: &CMat,
    eps: f64,
    iter_max: usize,
) -> Result<(CMat, usize, bool)> {
    match method {
        Method::DoubleNewton => {
            let (lambda, r) = double_newton_with(m, b, eps, NewtonStop::Step(eps), iter_max)?;
            Ok((
                lambda,
                r.double_iterations + r.newton_iterations,
                r.converged,
            ))
        }
        Method::Double => {
            let d = double_method(m, b, eps, iter_max)?;
            Ok((d.lambda, d.history.len(), d.converged))
        }
        Method::NewtonQuadratic => {
            let y0 = dense_solve(m, &b.transpose())?;
            let out = newton_qme_with(m, b, &y0, NewtonStop::Step(eps), iter_max)?;
            Ok((m - b * &out.y, out.history.len(), out.converged))
        }
        Method::NewtonLambda => {
            let (lambda, history, converged) = newton_lambda(m, b, m, eps, iter_max)?;
            Ok((lambda, history.len(), converged))
        }
    }
}

/// Runs every method on `(M, B)` with stopping threshold `eps`.
pub fn compare_methods(m: &CMat, b: &CMat, eps: f64, iter_max: usize) -> Vec<MethodResult> {
    Method::ALL
        .iter()
        .map(|&method| {
            let start = Instant::now();
            let outcome = run(method, m, b, eps, iter_max).and_then(|(lambda, it, conv)| {
                let err = lambda_error(m, b, &lambda)?;
                Ok((err, it, conv))
            });
            let seconds = start.elapsed().as_secs_f64();
            match outcome {
                Ok((err, iterations, converged)) => MethodResult {
                    method,
                    seconds,
                    err: Some(err),
                    iterations,
                    converged,
                    failure: None,
                },
                Err(e) => MethodResult {
                    method,
                    seconds,
                    err: None,
                    iterations: 0,
                    converged: false,
                    failure: Some(e.to_string()),
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    #[test]
    fn scalar_instance_all_methods_reach_four() {
        let s = |v: f64| CMat::from_element(1, 1, C::new(v, 0.0));
        let rows = compare_methods(&s(5.0), &s(2.0), 1e-12, 50);
        assert_eq!(rows.len(), 4);
        for r in rows {
            assert!(r.failure.is_none(), "{:?}", r.method);
            assert!(r.err.unwrap() <= 1e-12, "{:?} {:?}", r.method, r.err);
        }
    }
}
