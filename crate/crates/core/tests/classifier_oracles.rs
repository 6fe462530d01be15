use sosgibbs::{
    check_th1_condition, classify_point, BranchPattern, FamilyTag, ModelParams, Regime, RootFindConfig,
};

#[test]
fn b_zero_prediction_matches_solver() {
    let cfg = RootFindConfig::default();
    for k in 2..=7usize {
        for c in 0..=k - 2 {
            for i in 1..40 {
                let theta = 0.01 + 0.025 * i as f64;
                let p = ModelParams::three_state(theta, k).unwrap();
                let rep = classify_point(&BranchPattern::new(k, 0, c, k - c), &p, &cfg).unwrap();
                assert_eq!(rep.n_solutions_predicted, rep.n_solutions_found, "k = {k}, c = {c}, theta = {theta}");
            }
        }
    }
}

#[test]
fn found_at_least_predicted_off_b_zero() {
    let cfg = RootFindConfig::default();
    for k in 2..=6usize {
        for a in 0..k {
            for c in 0..=k {
                for &theta in &[0.01, 0.05, 0.2, 0.5, 1.5, 4.0] {
                    let pat = BranchPattern::for_order(k, a, c).unwrap();
                    let p = ModelParams::three_state(theta, k).unwrap();
                    let rep = classify_point(&pat, &p, &cfg).unwrap();
                    assert!(rep.n_solutions_found >= rep.n_solutions_predicted);
                    if rep.regime == Regime::Triple {
                        let v = rep.condition_value.unwrap();
                        let root = rep.solutions.roots.iter().find(|r| r.derivative == v).unwrap();
                        let chk = check_th1_condition(&pat, &p, root.field.h2).unwrap();
                        assert!(chk.satisfied && chk.implies_triple);
                    }
                }
            }
        }
    }
}

#[test]
fn family_tags() {
    let cfg = RootFindConfig::default();
    let p = ModelParams::three_state(1.089, 164).unwrap();
    let rep = classify_point(&BranchPattern::new(0, 164, 164, 0), &p, &cfg).unwrap();
    assert!(rep.family_tags.contains(&FamilyTag::Periodic));
    assert!(rep.family_tags.contains(&FamilyTag::TranslationInvariant));
    let p = ModelParams::three_state(0.05, 4).unwrap();
    let rep = classify_point(&BranchPattern::new(4, 0, 1, 3), &p, &cfg).unwrap();
    assert!(rep.family_tags.iter().all(|t| *t != FamilyTag::Periodic));
}
