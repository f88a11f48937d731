mod common;

use num_complex::Complex64 as C;
use proptest::prelude::*;
use sawfeti::feti::FetiModel;
use sawfeti::oracle::{assemble_monolithic, solve_monolithic};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn decomposed_and_monolithic_fields_agree(n in 1usize..=4, v in proptest::collection::vec(-2.0f64..2.0, 4)) {
        let cfg = common::tiny(n, v[..n].to_vec());
        let model = FetiModel::build(&cfg).unwrap();
        let (fields, report) = model.solve().unwrap();
        prop_assert!(report.residual <= 1e-9);
        let (mono, _) = solve_monolithic(&assemble_monolithic(&cfg).unwrap()).unwrap();
        let d = fields.relative_difference(&mono).unwrap();
        prop_assert!(d <= 1e-8, "{d:e}");
    }
}

#[test]
fn solve_counts_do_not_depend_on_cell_count() {
    let counts: Vec<(usize, usize)> = [1, 3, 6]
        .iter()
        .map(|&n| {
            let model = FetiModel::build(&common::tiny(n, vec![1.0; n])).unwrap();
            let (_, report) = model.solve().unwrap();
            (report.trace_solves, report.lift_solves)
        })
        .collect();
    assert!(counts.windows(2).all(|w| w[0] == w[1]), "{counts:?}");
}

#[test]
fn auxiliary_multipliers_are_inert() {
    let model = FetiModel::build(&common::tiny(3, vec![1.0, -1.0, 0.5])).unwrap();
    let (fields, _) = model.solve().unwrap();
    let lambda = fields.multipliers.clone().unwrap();
    assert!(lambda
        .auxiliary()
        .iter()
        .all(|z| z.norm() <= 1e-12 * lambda.padded.norm()));
    let mut perturbed = lambda.clone();
    for z in &mut perturbed.padded.as_mut_slice()[..lambda.n_t] {
        *z = C::new(3.0, -7.0);
    }
    let recovered = model.recover_fields(perturbed).unwrap();
    assert_eq!(recovered.relative_difference(&fields).unwrap(), 0.0);
}
