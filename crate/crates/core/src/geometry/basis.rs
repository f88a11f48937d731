//! One-dimensional Lagrange bases and Gauss-Legendre rules on `[-1, 1]`.

/// Gauss-Legendre points and weights with `n` points, `1 ≤ n ≤ 4`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    match n {
        1 => (vec![0.0], vec![2.0]),
        2 => {
            let a = 1.0 / 3f64.sqrt();
            (vec![-a, a], vec![1.0, 1.0])
        }
        3 => {
            let a = (0.6f64).sqrt();
            (vec![-a, 0.0, a], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
        }
        4 => {
            let r = (6.0f64 / 5.0).sqrt();
            let inner = ((3.0 - 2.0 * r) / 7.0).sqrt();
            let outer = ((3.0 + 2.0 * r) / 7.0).sqrt();
            let wi = (18.0 + 30f64.sqrt()) / 36.0;
            let wo = (18.0 - 30f64.sqrt()) / 36.0;
            (vec![-outer, -inner, inner, outer], vec![wo, wi, wi, wo])
        }
        _ => panic!("Gauss-Legendre rule with {n} points is not tabulated"),
    }
}

/// Equispaced Lagrange basis of degree `order` tabulated at Gauss points.
#[derive(Clone, Debug)]
pub struct LagrangeRule {
    pub order: usize,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// `values[q][a]`
    pub values: Vec<Vec<f64>>,
    /// `derivs[q][a]`, with respect to the reference coordinate
    pub derivs: Vec<Vec<f64>>,
}

impl LagrangeRule {
    /// Basis of degree `order` with an `order + 1` point rule.
    pub fn new(order: usize) -> Self {
        Self::with_points(order, order + 1)
    }

    pub fn with_points(order: usize, npts: usize) -> Self {
        let (points, weights) = gauss_legendre(npts);
        let values = points.iter().map(|&x| lagrange_values(order, x)).collect();
        let derivs = points.iter().map(|&x| lagrange_derivs(order, x)).collect();
        Self {
            order,
            points,
            weights,
            values,
            derivs,
        }
    }
}

fn nodes(order: usize) -> Vec<f64> {
    (0..=order)
        .map(|a| -1.0 + 2.0 * a as f64 / order as f64)
        .collect()
}

pub fn lagrange_values(order: usize, x: f64) -> Vec<f64> {
    let xs = nodes(order);
    (0..=order)
        .map(|a| {
            (0..=order)
                .filter(|&b| b != a)
                .map(|b| (x - xs[b]) / (xs[a] - xs[b]))
                .product()
        })
        .collect()
}

pub fn lagrange_derivs(order: usize, x: f64) -> Vec<f64> {
    let xs = nodes(order);
    (0..=order)
        .map(|a| {
            let mut sum = 0.0;
            for m in (0..=order).filter(|&m| m != a) {
                let mut term = 1.0 / (xs[a] - xs[m]);
                for b in (0..=order).filter(|&b| b != a && b != m) {
                    term *= (x - xs[b]) / (xs[a] - xs[b]);
                }
                sum += term;
            }
            sum
        })
        .collect()
}
