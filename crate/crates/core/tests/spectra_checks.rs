mod common;

use common::{fig6, fig7};
use oto_clock::models::{build_local_effective, build_local_microscopic, Frame, ModelParams};
use oto_clock::spectra::{
    classify_manifold, compare_local_model, compare_spectra, manifold_splitting, ring_degeneracy_signature,
    sector_spectrum, sw_consistency_check, OffsetPolicy,
};
use oto_clock::Error;

fn with_g(p: &ModelParams, g: f64) -> ModelParams {
    ModelParams { g_site: vec![g; p.n_sites], ..p.clone() }
}

fn splittings(p: &ModelParams) -> [f64; 2] {
    let h = build_local_microscopic(p, Frame::Rotating).unwrap();
    [0, 1].map(|n_a| {
        let s = sector_spectrum(&h, n_a).unwrap();
        manifold_splitting(&s, &classify_manifold(&s, (1, 0))).unwrap()
    })
}

#[test]
fn dimer_splitting_converges_to_the_second_order_value() {
    for (g, tol) in [(2.5, 0.02), (5.0, 0.05)] {
        let p = with_g(&fig6(), g);
        let want = 2.0 * g * g / p.delta_b();
        let [s0, s1] = splittings(&p);
        assert!((s0 / want - 1.0).abs() < tol, "g = {g}: {s0} vs {want}");
        assert!((s0 - s1).abs() / s0 < 1e-2);
    }
    assert_eq!(splittings(&with_g(&fig6(), 0.0)), [0.0, 0.0]);
}

#[test]
fn dimer_spectra_agree_within_a_tenth_of_a_percent() {
    for n_a in 0..2 {
        let (_, _, cmp) = compare_local_model(&fig6(), n_a).unwrap();
        assert!(cmp.max_rel_error() < 1e-3, "sector {n_a}: {}", cmp.max_rel_error());
        assert_eq!(cmp.pairs.len(), 3);
        assert_eq!(cmp.excluded, 0);
    }
}

#[test]
fn manifold_counts_must_match() {
    let exact = sector_spectrum(&build_local_microscopic(&fig6(), Frame::Rotating).unwrap(), 0).unwrap();
    let eff = sector_spectrum(&build_local_effective(&fig6(), 2, Frame::Rotating).unwrap(), 0).unwrap();
    // the effective model has no states with an excited coupler
    let err = compare_spectra(&exact, &eff, &[(0, 1)], OffsetPolicy::None).unwrap_err();
    assert!(matches!(err, Error::CardinalityMismatch { exact: 1, effective: 0, .. }));
}

#[test]
fn ring_pattern_and_chirality() {
    for g in [2.0, 5.0] {
        let p = with_g(&fig7(), g);
        let h = build_local_microscopic(&p, Frame::Rotating).unwrap();
        let s0 = ring_degeneracy_signature(&sector_spectrum(&h, 0).unwrap()).unwrap();
        let s1 = ring_degeneracy_signature(&sector_spectrum(&h, 1).unwrap()).unwrap();
        assert_eq!((s0.ground_degeneracy, s1.ground_degeneracy), (1, 2), "g = {g}");
        assert!(!s0.ambiguous && !s1.ambiguous);
        assert!(s0.chirality_check && s1.chirality_check);
        let want = 3.0 * g * g / p.delta_b();
        assert!((3.0 * s0.hopping / want - 1.0).abs() < 0.05);
        assert!((s0.hopping - s1.hopping).abs() / s0.hopping < 1e-2);
    }
}

#[test]
fn ring_effective_hopping() {
    let h = build_local_effective(&fig7(), 2, Frame::Rotating).unwrap();
    let s = ring_degeneracy_signature(&sector_spectrum(&h, 1).unwrap()).unwrap();
    assert!((s.hopping - 0.5).abs() < 1e-12);
}

#[test]
fn sw_residuals_match_dense_reference() {
    // P e^S H e^{-S} P against the second-order form, from an independent dense-exponential computation
    let reference = [(1.0, 0.00028784643686208256), (2.5, 0.011212556201812163), (5.0, 0.17761435073811427)];
    for (g, want) in reference {
        for n_a in 0..2 {
            let r = sw_consistency_check(&with_g(&fig6(), g), n_a).unwrap();
            assert!((r.residual - want).abs() < 1e-9 * want.max(1.0), "g = {g}: {}", r.residual);
            assert_eq!(r.scale, g * g * g / 2500.0);
        }
    }
}
