use proptest::prelude::*;
use storynet::classify::{
    bootstrap_accuracy, mean_and_error, midpoint_variant, train_discriminant, BootstrapOptions, Group, LdaOptions,
    MidpointMode,
};

fn group(dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-10.0f64..10.0, dim), dim + 2..12)
}

/// Two groups, the second shifted along the first coordinate.
fn groups() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    (1usize..4).prop_flat_map(|d| (group(d), group(d), 1.0f64..30.0)).prop_map(|(a, mut b, shift)| {
        for x in &mut b {
            x[0] += shift;
        }
        (a, b)
    })
}

fn mean(g: &[Vec<f64>]) -> Vec<f64> {
    let n = g.len() as f64;
    (0..g[0].len()).map(|j| g.iter().map(|x| x[j]).sum::<f64>() / n).collect()
}

fn opts() -> LdaOptions {
    LdaOptions { max_condition: 1e10, ..LdaOptions::default() }.with_labels("a", "b")
}

proptest! {
    #[test]
    fn class_means_land_on_their_own_side((g1, g2) in groups()) {
        let Ok(model) = train_discriminant(&g1, &g2, &opts()) else { return Ok(()) };
        prop_assert_eq!(model.classify(&mean(&g1)).unwrap(), Group::First);
        prop_assert_eq!(model.classify(&mean(&g2)).unwrap(), Group::Second);
    }

    #[test]
    fn midpoint_is_the_projected_mean_midpoint((g1, g2) in groups()) {
        let Ok(model) = train_discriminant(&g1, &g2, &opts()) else { return Ok(()) };
        let mid: Vec<f64> = mean(&g1).iter().zip(mean(&g2)).map(|(a, b)| (a + b) / 2.0).collect();
        let y = model.project(&mid).unwrap();
        prop_assert!((y - model.midpoint).abs() <= 1e-9 * model.midpoint.abs().max(1.0));
        let variant = midpoint_variant(&model, MidpointMode::Mean, &g1, &g2).unwrap();
        prop_assert!((variant - model.midpoint).abs() <= 1e-9 * model.midpoint.abs().max(1.0));
    }

    #[test]
    fn swapping_groups_negates_the_discriminant((g1, g2) in groups(), probe in prop::collection::vec(-20.0f64..20.0, 3)) {
        let Ok(ab) = train_discriminant(&g1, &g2, &opts()) else { return Ok(()) };
        let ba = train_discriminant(&g2, &g1, &opts()).unwrap();
        let x = &probe[..ab.dim()];
        let s1 = ab.project(x).unwrap() - ab.midpoint;
        let s2 = ba.project(x).unwrap() - ba.midpoint;
        prop_assert!((s1 + s2).abs() <= 1e-8 * s1.abs().max(1.0));
        if s1.abs() > 1e-6 {
            prop_assert_ne!(ab.classify(x).unwrap(), ba.classify(x).unwrap());
        }
    }

    #[test]
    fn affine_maps_preserve_the_decisions(
        (g1, g2) in groups(),
        scale in prop::collection::vec(prop_oneof![0.1f64..10.0, -10.0f64..-0.1], 3),
        offset in prop::collection::vec(-50.0f64..50.0, 3),
    ) {
        let Ok(before) = train_discriminant(&g1, &g2, &opts()) else { return Ok(()) };
        let map = |g: &[Vec<f64>]| -> Vec<Vec<f64>> {
            g.iter().map(|x| x.iter().enumerate().map(|(j, v)| scale[j] * v + offset[j]).collect()).collect()
        };
        let after = train_discriminant(&map(&g1), &map(&g2), &opts()).unwrap();
        for (x, y) in g1.iter().chain(&g2).zip(map(&g1).iter().chain(&map(&g2))) {
            let s1 = before.project(x).unwrap() - before.midpoint;
            let s2 = after.project(y).unwrap() - after.midpoint;
            prop_assert!((s1 - s2).abs() <= 1e-7 * s1.abs().max(1.0), "{} vs {}", s1, s2);
        }
    }

    #[test]
    fn error_is_twice_the_sample_deviation(values in prop::collection::vec(0.0f64..1.0, 2..50)) {
        let (m, e) = mean_and_error(&values);
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(m >= lo - 1e-12 && m <= hi + 1e-12);
        let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
        prop_assert!((e - 2.0 * var.sqrt()).abs() <= 1e-12);
    }
}

#[test]
fn median_midpoint_follows_the_bulk_of_a_skewed_group() {
    // group 1 has one far outlier that drags its mean but not its median
    let g1: Vec<Vec<f64>> = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 20.0].iter().map(|&v| vec![v]).collect();
    let g2: Vec<Vec<f64>> = [-5.0, -5.1, -5.2, -4.9, -4.8, -5.3, -5.0].iter().map(|&v| vec![v]).collect();
    let model = train_discriminant(&g1, &g2, &opts()).unwrap();
    let mean_mid = midpoint_variant(&model, MidpointMode::Mean, &g1, &g2).unwrap();
    let median_mid = midpoint_variant(&model, MidpointMode::Median, &g1, &g2).unwrap();
    let d = model.direction[0];
    assert!(d > 0.0);
    assert!((mean_mid / d - (21.5 / 7.0 - 35.3 / 7.0) / 2.0).abs() < 1e-9);
    assert!((median_mid / d - (0.3 - 5.0) / 2.0).abs() < 1e-9);
    assert!(median_mid < mean_mid);
}

#[test]
fn bootstrap_reports_are_seeded_and_bounded() {
    let g1: Vec<Vec<f64>> = (0..20).map(|i| vec![f64::from(i % 7), f64::from(i % 3)]).collect();
    let g2: Vec<Vec<f64>> = (0..20).map(|i| vec![f64::from(i % 5) + 2.0, f64::from(i % 4) - 1.0]).collect();
    let options = BootstrapOptions::new(10, 40, 11, opts());
    let a = bootstrap_accuracy(&g1, &g2, &options).unwrap();
    let b = bootstrap_accuracy(&g1, &g2, &options).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.failed_iterations, 0);
    for c in &a.per_category {
        assert_eq!(c.accuracies.len(), 40);
        assert!(c.accuracies.iter().all(|v| (0.0..=1.0).contains(v)));
        let (m, e) = mean_and_error(&c.accuracies);
        assert_eq!((c.mean, c.error), (m, e));
    }
    let other = bootstrap_accuracy(&g1, &g2, &BootstrapOptions { seed: 12, ..options.clone() }).unwrap();
    // iteration i of seed 12 is iteration i + 1 of seed 11
    for c in 0..2 {
        assert_eq!(other.per_category[c].accuracies[..39], a.per_category[c].accuracies[1..]);
    }
}
