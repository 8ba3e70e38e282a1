use lsa_core::problems::{
    build_deconvolution_energy, build_repulsion_energy, synthesize_deconv_instance, GrayImage, RepulsionParams, Shape,
};
use lsa_core::Labeling;

/// Number of 3x3 windows (one per pixel, clipped) and their sizes.
fn window_sizes(w: usize, h: usize) -> Vec<usize> {
    let span = |c: usize, len: usize| (c.saturating_sub(1)..=(c + 1).min(len - 1)).count();
    (0..h).flat_map(|y| (0..w).map(move |x| span(x, w) * span(y, h))).collect()
}

#[test]
fn deconvolution_pair_mass_counts_window_co_memberships() {
    for (w, h) in [(1, 1), (2, 3), (5, 4), (9, 7)] {
        let img = GrayImage::new(w, h, (0..w * h).map(|k| (k % 7) as f64 / 7.0).collect()).unwrap();
        let e = build_deconvolution_energy(&img).unwrap();
        let total: f64 = e.pairs().iter().map(|p| p.w).sum();
        let expected: f64 = window_sizes(w, h).iter().map(|&k| (k * (k - 1) / 2) as f64 * 2.0 / 81.0).sum();
        assert!((total - expected).abs() <= 1e-12 * expected.max(1.0), "{w}x{h}: {total} vs {expected}");
        assert!(e.pairs().iter().all(|p| p.w > 0.0));
    }
}

#[test]
fn noiseless_truth_has_zero_residual() {
    let (img, truth) = synthesize_deconv_instance(16, 12, Shape::centered_disk(16, 12), 0.0, 3).unwrap();
    let e = build_deconvolution_energy(&img).unwrap();
    assert!(e.eval(&truth).unwrap().abs() < 1e-12);
    assert!(e.eval(&Labeling::ones(truth.len())).unwrap() > 0.0);
}

#[test]
fn noise_is_seeded() {
    let shape = Shape::centered_disk(8, 8);
    let a = synthesize_deconv_instance(8, 8, shape, 0.1, 5).unwrap();
    let b = synthesize_deconv_instance(8, 8, shape, 0.1, 5).unwrap();
    let c = synthesize_deconv_instance(8, 8, shape, 0.1, 6).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.0, c.0);
}

#[test]
fn uniform_image_gives_attraction_only() {
    let img = GrayImage::new(6, 6, vec![0.5; 36]).unwrap();
    let e = build_repulsion_energy(&img, &RepulsionParams::default()).unwrap();
    assert!(e.is_submodular());
    assert!(!e.pairs().is_empty());
}
