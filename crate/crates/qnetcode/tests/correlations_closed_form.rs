//! Cross-validation of the discord minimizer against the closed-form
//! Bell-diagonal expressions, plus separability checks against the known
//! weight criterion for this family.

use qnetcode::correlations::{
    bell_diagonal, classical_correlation, discord, discord_channel, discord_closed_form,
    mutual_information, ppt_separable, BellDiagonalParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Nine physical Bell-diagonal parameter points spanning the tetrahedron:
/// the maximally mixed centre, a Bell vertex, two Werner-type mixtures,
/// an isotropic-leaning point, and assorted interior points.
const REFERENCE_POINTS: [(f64, f64, f64); 9] = [
    (0.0, 0.0, 0.0),
    (1.0, -1.0, 1.0),
    (0.5, -0.5, 0.5),
    (-0.5, -0.5, -0.5),
    (0.2, 0.2, 0.2),
    (0.3, 0.2, 0.1),
    (-0.4, 0.25, -0.15),
    (0.9, -0.9, 0.9),
    (0.0, 0.0, 0.7),
];

#[test]
fn reference_points_are_physical() {
    for &(c1, c2, c3) in &REFERENCE_POINTS {
        let params = BellDiagonalParams::new(c1, c2, c3).unwrap();
        assert!(
            params.is_physical(),
            "({c1}, {c2}, {c3}) min weight {}",
            params.min_weight()
        );
    }
}

#[test]
fn minimizer_matches_closed_form_on_reference_points() {
    for &(c1, c2, c3) in &REFERENCE_POINTS {
        let params = BellDiagonalParams::new(c1, c2, c3).unwrap();
        let rho = bell_diagonal(&params);
        let (i_closed, j_closed, d_closed) = discord_closed_form(&params).unwrap();
        let report = discord(&rho).unwrap();
        assert!(
            (report.mutual_information - i_closed).abs() < 1e-8,
            "({c1},{c2},{c3}) I {} vs {i_closed}",
            report.mutual_information
        );
        assert!(
            (report.classical_correlation - j_closed).abs() < 1e-4,
            "({c1},{c2},{c3}) J {} vs {j_closed}",
            report.classical_correlation
        );
        assert!(
            (report.discord - d_closed).abs() < 1e-4,
            "({c1},{c2},{c3}) D {} vs {d_closed}",
            report.discord
        );
    }
}

#[test]
fn bell_vertex_has_unit_discord() {
    let params = BellDiagonalParams::new(1.0, -1.0, 1.0).unwrap();
    let (i, j, d) = discord_closed_form(&params).unwrap();
    assert_eq!(i, 2.0);
    assert_eq!(j, 1.0);
    assert_eq!(d, 1.0);
    let report = discord(&bell_diagonal(&params)).unwrap();
    assert!((report.discord - 1.0).abs() < 1e-4);
    assert!(!ppt_separable(&bell_diagonal(&params)).unwrap());
}

#[test]
fn maximally_mixed_point_has_no_correlations_at_all() {
    let rho = bell_diagonal(&BellDiagonalParams::new(0.0, 0.0, 0.0).unwrap());
    assert!(mutual_information(&rho).unwrap().abs() < 1e-9);
    let report = discord(&rho).unwrap();
    assert!(report.discord.abs() < 1e-6);
    assert!(report.classical_correlation.abs() < 1e-6);
    assert!(ppt_separable(&rho).unwrap());
}

#[test]
fn zero_setting_channel_is_classically_correlated_but_discord_free() {
    // The c3 = 0 member of the (1, c3, c3) family carries one full bit of
    // correlation, all of it classical: I = J = 1, D = 0, and the state is
    // separable.
    let rho = discord_channel(0.0).unwrap();
    assert!((mutual_information(&rho).unwrap() - 1.0).abs() < 1e-9);
    let report = discord(&rho).unwrap();
    assert!((report.classical_correlation - 1.0).abs() < 1e-6);
    assert!(report.discord.abs() < 1e-6);
    assert!(ppt_separable(&rho).unwrap());
}

#[test]
fn separability_tracks_the_bell_weight_criterion() {
    // A Bell-diagonal state is separable exactly when its largest Bell
    // weight is at most 1/2; the partial-transpose test must agree away
    // from the boundary.
    let mut rng = ChaCha8Rng::seed_from_u64(20260815);
    let mut checked = 0;
    while checked < 200 {
        let mut w: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..1.0)).collect();
        let total: f64 = w.iter().sum();
        for x in &mut w {
            *x /= total;
        }
        let c1 = w[0] - w[1] + w[2] - w[3];
        let c2 = -w[0] + w[1] + w[2] - w[3];
        let c3 = w[0] + w[1] - w[2] - w[3];
        let max_w = w.iter().cloned().fold(f64::MIN, f64::max);
        if (max_w - 0.5).abs() < 1e-7 {
            continue;
        }
        let params = BellDiagonalParams::new(c1, c2, c3).unwrap();
        let rho = bell_diagonal(&params);
        assert_eq!(
            ppt_separable(&rho).unwrap(),
            max_w <= 0.5,
            "weights {w:?}"
        );
        checked += 1;
    }
}

#[test]
fn discord_is_nonnegative_and_bounded_by_mutual_information() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    while checked < 60 {
        let c1 = rng.gen_range(-1.0..1.0);
        let c2 = rng.gen_range(-1.0..1.0);
        let c3 = rng.gen_range(-1.0..1.0);
        let params = BellDiagonalParams::new(c1, c2, c3).unwrap();
        if !params.is_physical() {
            continue;
        }
        let rho = bell_diagonal(&params);
        let report = discord(&rho).unwrap();
        assert!(report.discord >= -1e-6, "({c1},{c2},{c3})");
        assert!(report.classical_correlation >= -1e-6);
        assert!(report.discord <= report.mutual_information + 1e-6);
        checked += 1;
    }
}

#[test]
fn classical_correlation_is_measurement_orientation_invariant_for_werner() {
    // Werner-type states are rotationally symmetric, so a coarse grid and
    // a fine grid must land on the same classical correlation.
    let params = BellDiagonalParams::new(0.5, -0.5, 0.5).unwrap();
    let rho = bell_diagonal(&params);
    let (coarse, _) = classical_correlation(&rho, 8, 1e-6).unwrap();
    let (fine, _) = classical_correlation(&rho, 64, 1e-6).unwrap();
    assert!((coarse - fine).abs() < 1e-6, "{coarse} vs {fine}");
}
