use proptest::prelude::*;
use sawfeti::model::{lithium_niobate, rotate_material, ScaleSet};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derived_scales_satisfy_identities(c1 in 1e6f64..1e12, omega1 in 1e3f64..1e10, rho1 in 1e-2f64..1e4) {
        let s = ScaleSet::new(c1, omega1, rho1).unwrap();
        prop_assert!(s.check().is_ok());
        prop_assert!((s.c1 * s.eps1 - 1.0).abs() <= 1e-12);
        prop_assert!((s.e1 - 1.0).abs() <= 1e-12);
        let l1 = (c1 / (omega1 * omega1 * rho1)).sqrt();
        prop_assert!((s.l1 - l1).abs() <= 1e-12 * l1);
    }

    #[test]
    fn rotation_preserves_tensor_symmetries(a in -3.2f64..3.2, b in -3.2f64..3.2, c in -3.2f64..3.2) {
        let m = rotate_material(&lithium_niobate(), [a, b, c]);
        let cs = m.c.iter().flatten().flatten().flatten().fold(0.0f64, |x, v| x.max(v.abs()));
        let es = m.e.iter().flatten().flatten().fold(0.0f64, |x, v| x.max(v.abs()));
        let eps = m.eps.unwrap();
        let ps = eps.iter().flatten().fold(0.0f64, |x, v| x.max(v.abs()));
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((eps[i][j] - eps[j][i]).abs() <= 1e-12 * ps);
                for k in 0..3 {
                    prop_assert!((m.e[k][i][j] - m.e[k][j][i]).abs() <= 1e-12 * es);
                    for l in 0..3 {
                        let v = m.c[i][j][k][l];
                        prop_assert!((v - m.c[j][i][k][l]).abs() <= 1e-12 * cs);
                        prop_assert!((v - m.c[i][j][l][k]).abs() <= 1e-12 * cs);
                        prop_assert!((v - m.c[k][l][i][j]).abs() <= 1e-12 * cs);
                    }
                }
            }
        }
    }
}
