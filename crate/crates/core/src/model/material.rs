//! Material tensors in full index form.

use serde::Deserialize;

use crate::error::{Error, Result};

pub type Tensor4 = [[[[f64; 3]; 3]; 3]; 3];
pub type Tensor3 = [[[f64; 3]; 3]; 3];
pub type Tensor2 = [[f64; 3]; 3];

/// Voigt index of the symmetric pair `(i, j)`: 11→0, 22→1, 33→2, 23→3, 13→4, 12→5.
pub const fn voigt(i: usize, j: usize) -> usize {
    match (i, j) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (1, 2) | (2, 1) => 3,
        (0, 2) | (2, 0) => 4,
        _ => 5,
    }
}

/// Elastic, piezoelectric and dielectric constants of one material.
///
/// `e[k][i][j]` is the piezoelectric tensor `e_kij`. Electrodes carry a zero
/// piezoelectric tensor and no permittivity.
#[derive(Clone, Debug, PartialEq)]
pub struct MaterialSet {
    pub name: String,
    pub c: Tensor4,
    pub e: Tensor3,
    pub eps: Option<Tensor2>,
    pub rho: f64,
}

impl MaterialSet {
    pub fn from_voigt(
        name: impl Into<String>,
        c6: &[[f64; 6]; 6],
        e36: Option<&[[f64; 6]; 3]>,
        eps: Option<Tensor2>,
        rho: f64,
    ) -> Result<Self> {
        let mut c = [[[[0.0; 3]; 3]; 3]; 3];
        let mut e = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        c[i][j][k][l] = c6[voigt(i, j)][voigt(k, l)];
                    }
                    if let Some(e36) = e36 {
                        e[k][i][j] = e36[k][voigt(i, j)];
                    }
                }
            }
        }
        let m = Self {
            name: name.into(),
            c,
            e,
            eps,
            rho,
        };
        m.validate()?;
        Ok(m)
    }

    /// Isotropic elastic solid with Lamé constants `lambda`, `mu`.
    pub fn isotropic(name: impl Into<String>, lambda: f64, mu: f64, rho: f64) -> Self {
        let mut c = [[[[0.0; 3]; 3]; 3]; 3];
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        c[i][j][k][l] = lambda * d(i, j) * d(k, l)
                            + mu * (d(i, k) * d(j, l) + d(i, l) * d(j, k));
                    }
                }
            }
        }
        Self {
            name: name.into(),
            c,
            e: [[[0.0; 3]; 3]; 3],
            eps: None,
            rho,
        }
    }

    pub fn is_piezoelectric(&self) -> bool {
        self.eps.is_some()
    }

    /// Checks tensor symmetries, permittivity definiteness and density.
    pub fn validate(&self) -> Result<()> {
        let tol = 1e-12;
        let cmax = max_abs4(&self.c).max(f64::MIN_POSITIVE);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let v = self.c[i][j][k][l];
                        let worst = (v - self.c[j][i][k][l])
                            .abs()
                            .max((v - self.c[i][j][l][k]).abs())
                            .max((v - self.c[k][l][i][j]).abs());
                        if worst > tol * cmax {
                            return Err(Error::Config(format!(
                                "{}: elasticity tensor lacks symmetry at ({i},{j},{k},{l})",
                                self.name
                            )));
                        }
                    }
                }
            }
        }
        let emax = max_abs3(&self.e).max(f64::MIN_POSITIVE);
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    if (self.e[k][i][j] - self.e[k][j][i]).abs() > tol * emax {
                        return Err(Error::Config(format!(
                            "{}: piezoelectric tensor lacks e_kij = e_kji",
                            self.name
                        )));
                    }
                }
            }
        }
        if let Some(eps) = &self.eps {
            let m = eps.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
            for i in 0..3 {
                for j in 0..3 {
                    if (eps[i][j] - eps[j][i]).abs() > tol * m {
                        return Err(Error::Config(format!(
                            "{}: permittivity not symmetric",
                            self.name
                        )));
                    }
                }
            }
            if !positive_definite(eps) {
                return Err(Error::Config(format!(
                    "{}: permittivity not positive definite",
                    self.name
                )));
            }
        }
        if !(self.rho > 0.0) {
            return Err(Error::Config(format!(
                "{}: density must be positive",
                self.name
            )));
        }
        Ok(())
    }

    /// Applies the orthogonal rotation `r` to every tensor.
    pub fn rotated_by(&self, r: &Tensor2) -> Self {
        let mut c = [[[[0.0; 3]; 3]; 3]; 3];
        let mut e = [[[0.0; 3]; 3]; 3];
        let mut eps = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let mut acc = 0.0;
                        for a in 0..3 {
                            for b in 0..3 {
                                let rab = r[i][a] * r[j][b];
                                if rab == 0.0 {
                                    continue;
                                }
                                for cc in 0..3 {
                                    for d in 0..3 {
                                        acc += rab * r[k][cc] * r[l][d] * self.c[a][b][cc][d];
                                    }
                                }
                            }
                        }
                        c[i][j][k][l] = acc;
                    }
                    let mut acc = 0.0;
                    for a in 0..3 {
                        for b in 0..3 {
                            for cc in 0..3 {
                                acc += r[i][a] * r[j][b] * r[k][cc] * self.e[a][b][cc];
                            }
                        }
                    }
                    e[i][j][k] = acc;
                }
                if let Some(old) = &self.eps {
                    let mut acc = 0.0;
                    for a in 0..3 {
                        for b in 0..3 {
                            acc += r[i][a] * r[j][b] * old[a][b];
                        }
                    }
                    eps[i][j] = acc;
                }
            }
        }
        Self {
            name: self.name.clone(),
            c,
            e,
            eps: self.eps.map(|_| eps),
            rho: self.rho,
        }
    }

    /// Loads a material file (TOML; Voigt matrices in SI units).
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let file: MaterialFile = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        let m = Self::from_voigt(
            file.name,
            &file.stiffness,
            file.piezoelectric.as_ref(),
            file.permittivity,
            file.density,
        )?;
        let angles = match (file.euler_deg, file.euler_rad) {
            (Some(_), Some(_)) => {
                return Err(Error::Parse {
                    path: origin.to_string(),
                    message: "give either euler_deg or euler_rad, not both".into(),
                })
            }
            (Some(d), None) => Some(d.map(f64::to_radians)),
            (None, r) => r,
        };
        Ok(match angles {
            Some(a) => rotate_material(&m, a),
            None => m,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialFile {
    name: String,
    /// kg/m³
    density: f64,
    /// 6×6, Pa
    stiffness: [[f64; 6]; 6],
    /// 3×6, C/m²
    piezoelectric: Option<[[f64; 6]; 3]>,
    /// 3×3, F/m
    permittivity: Option<Tensor2>,
    euler_deg: Option<[f64; 3]>,
    euler_rad: Option<[f64; 3]>,
}

/// Rotation matrix for z-x-z Euler angles `(phi, theta, psi)`.
pub fn euler_rotation(angles: [f64; 3]) -> Tensor2 {
    let [phi, theta, psi] = angles;
    let rz = |a: f64| {
        [
            [a.cos(), -a.sin(), 0.0],
            [a.sin(), a.cos(), 0.0],
            [0.0, 0.0, 1.0],
        ]
    };
    let rx = |a: f64| {
        [
            [1.0, 0.0, 0.0],
            [0.0, a.cos(), -a.sin()],
            [0.0, a.sin(), a.cos()],
        ]
    };
    matmul3(&matmul3(&rz(phi), &rx(theta)), &rz(psi))
}

/// Rotates all tensors of `m` by the z-x-z Euler angles (radians).
pub fn rotate_material(m: &MaterialSet, euler_angles: [f64; 3]) -> MaterialSet {
    m.rotated_by(&euler_rotation(euler_angles))
}

fn matmul3(a: &Tensor2, b: &Tensor2) -> Tensor2 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn positive_definite(m: &Tensor2) -> bool {
    let d1 = m[0][0];
    let d2 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let d3 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    d1 > 0.0 && d2 > 0.0 && d3 > 0.0
}

pub(crate) fn max_abs4(t: &Tensor4) -> f64 {
    t.iter()
        .flatten()
        .flatten()
        .flatten()
        .fold(0.0f64, |a, v| a.max(v.abs()))
}

pub(crate) fn max_abs3(t: &Tensor3) -> f64 {
    t.iter()
        .flatten()
        .flatten()
        .fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Lithium niobate constants (clamped permittivity) from common literature
/// tables. Not the values behind any published run; replace freely.
pub fn lithium_niobate() -> MaterialSet {
    let e0 = 8.854_187_812_8e-12;
    let (c11, c12, c13, c14, c33, c44) = (2.03e11, 0.53e11, 0.75e11, 0.09e11, 2.45e11, 0.60e11);
    let c66 = 0.5 * (c11 - c12);
    let c6 = [
        [c11, c12, c13, c14, 0.0, 0.0],
        [c12, c11, c13, -c14, 0.0, 0.0],
        [c13, c13, c33, 0.0, 0.0, 0.0],
        [c14, -c14, 0.0, c44, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, c44, c14],
        [0.0, 0.0, 0.0, 0.0, c14, c66],
    ];
    let (e15, e22, e31, e33) = (3.7, 2.5, 0.2, 1.3);
    let e36 = [
        [0.0, 0.0, 0.0, 0.0, e15, -e22],
        [-e22, e22, 0.0, e15, 0.0, 0.0],
        [e31, e31, e33, 0.0, 0.0, 0.0],
    ];
    let eps = [
        [44.0 * e0, 0.0, 0.0],
        [0.0, 44.0 * e0, 0.0],
        [0.0, 0.0, 29.0 * e0],
    ];
    MaterialSet::from_voigt("LiNbO3", &c6, Some(&e36), Some(eps), 4700.0)
        .expect("tabulated constants are consistent")
}

/// Synthetic transversely isotropic (6mm) piezoelectric with round
/// constants, used where results must not depend on crystal data.
pub fn synthetic_piezoelectric() -> MaterialSet {
    let e0 = 8.854_187_812_8e-12;
    let (c11, c12, c13, c33, c44) = (1.2e11, 0.7e11, 0.7e11, 1.1e11, 0.25e11);
    let c66 = 0.5 * (c11 - c12);
    let c6 = [
        [c11, c12, c13, 0.0, 0.0, 0.0],
        [c12, c11, c13, 0.0, 0.0, 0.0],
        [c13, c13, c33, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, c44, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, c44, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, c66],
    ];
    let (e15, e31, e33) = (5.0, -2.0, 6.0);
    let e36 = [
        [0.0, 0.0, 0.0, 0.0, e15, 0.0],
        [0.0, 0.0, 0.0, e15, 0.0, 0.0],
        [e31, e31, e33, 0.0, 0.0, 0.0],
    ];
    let eps = [
        [100.0 * e0, 0.0, 0.0],
        [0.0, 100.0 * e0, 0.0],
        [0.0, 0.0, 80.0 * e0],
    ];
    MaterialSet::from_voigt("synthetic-6mm", &c6, Some(&e36), Some(eps), 5000.0)
        .expect("constants are consistent")
}

/// Polycrystalline aluminium as an isotropic solid.
pub fn aluminium() -> MaterialSet {
    let (young, poisson) = (70.0e9, 0.35);
    let lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
    let mu = young / (2.0 * (1.0 + poisson));
    MaterialSet::isotropic("Al", lambda, mu, 2700.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn assert_same(a: &MaterialSet, b: &MaterialSet, tol: f64) {
        let scale = max_abs4(&a.c);
        for (x, y) in
            a.c.iter()
                .flatten()
                .flatten()
                .flatten()
                .zip(b.c.iter().flatten().flatten().flatten())
        {
            assert!((x - y).abs() <= tol * scale);
        }
        let escale = max_abs3(&a.e).max(1.0);
        for (x, y) in
            a.e.iter()
                .flatten()
                .flatten()
                .zip(b.e.iter().flatten().flatten())
        {
            assert!((x - y).abs() <= tol * escale);
        }
    }

    #[test]
    fn zero_rotation_is_identity() {
        let m = lithium_niobate();
        assert_eq!(rotate_material(&m, [0.0; 3]), m);
    }

    #[test]
    fn full_turn_is_identity() {
        let m = lithium_niobate();
        for axis in 0..3 {
            let mut a = [0.0; 3];
            a[axis] = 2.0 * PI;
            assert_same(&rotate_material(&m, a), &m, 1e-12);
        }
    }

    #[test]
    fn quarter_turn_about_x3_moves_c1111_to_c2222() {
        let mut c = [[[[0.0; 3]; 3]; 3]; 3];
        c[0][0][0][0] = 7.0;
        let m = MaterialSet {
            name: "marker".into(),
            c,
            e: [[[0.0; 3]; 3]; 3],
            eps: None,
            rho: 1.0,
        };
        let r = rotate_material(&m, [PI / 2.0, 0.0, 0.0]);
        // brute-force index transform with R = [[0,-1,0],[1,0,0],[0,0,1]]
        assert!((r.c[1][1][1][1] - 7.0).abs() < 1e-12);
        assert!(r.c[0][0][0][0].abs() < 1e-12);
    }

    #[test]
    fn rotation_preserves_symmetries() {
        let m = lithium_niobate();
        let r = rotate_material(&m, [0.3, 38f64.to_radians(), -1.1]);
        r.validate().unwrap();
    }

    #[test]
    fn isotropic_tensor_is_valid() {
        aluminium().validate().unwrap();
    }

    #[test]
    fn rejects_bad_density() {
        let mut m = aluminium();
        m.rho = 0.0;
        assert!(m.validate().is_err());
    }

    #[test]
    fn parses_material_file() {
        let text = r#"
name = "iso"
density = 2.0
stiffness = [
  [3.0, 1.0, 1.0, 0.0, 0.0, 0.0],
  [1.0, 3.0, 1.0, 0.0, 0.0, 0.0],
  [1.0, 1.0, 3.0, 0.0, 0.0, 0.0],
  [0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
  [0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
  [0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
]
piezoelectric = [
  [0.0, 0.0, 0.0, 0.0, 0.5, 0.0],
  [0.0, 0.0, 0.0, 0.5, 0.0, 0.0],
  [0.1, 0.1, 0.3, 0.0, 0.0, 0.0],
]
permittivity = [[2.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 3.0]]
"#;
        let m = MaterialSet::parse(text, "inline").unwrap();
        assert_eq!(m.c[0][1][0][1], 1.0);
        assert_eq!(m.e[2][2][2], 0.3);
        assert_eq!(m.e[0][0][2], 0.5);
        assert_eq!(m.e[0][2][0], 0.5);
        assert!(m.is_piezoelectric());
    }
}
