//! Convolution and multiplier application against their eigenfunction and
//! cross-route oracles.

use neurofield::grid::{Field, GridSpec, Norm};
use neurofield::kernel::{dog_eval, omega_hat, DogParams};
use neurofield::spectral::{apply_multiplier, convolve};
use neurofield::stimulus::random_smooth;
use num_complex::Complex64;
use std::f64::consts::PI;

fn canonical_kernel(spec: GridSpec) -> Field {
    let p = DogParams::canonical();
    Field::sample(spec, |x| dog_eval(&p, spec.dim, x)).unwrap()
}

#[test]
fn cosine_modes_are_eigenfunctions() {
    // omega * cos(2 pi <xi0, x>) = omega-hat(xi0) cos(2 pi <xi0, x>)
    let p = DogParams::canonical();
    let spec = GridSpec::new_2d(10.0, 256).unwrap();
    let kernel = canonical_kernel(spec);
    for (k1, k2) in [(50i32, 0i32), (3, 7), (0, 11)] {
        let xi0 = [k1 as f64 / 20.0, k2 as f64 / 20.0];
        let u =
            Field::sample(spec, |x| (2.0 * PI * (xi0[0] * x[0] + xi0[1] * x[1])).cos()).unwrap();
        let conv = convolve(&kernel, &u).unwrap();
        let expected = u.scale(omega_hat(&p, &xi0));
        let rel = conv.sup_distance(&expected).unwrap() / u.norm(Norm::Sup);
        assert!(rel <= 1e-10, "mode ({k1},{k2}): relative error {rel:.2e}");
    }
}

#[test]
fn constant_field_is_annihilated_by_balanced_kernel() {
    // omega-hat(0) = 1 - kappa = 0 for the canonical parameters
    let spec = GridSpec::new_2d(10.0, 128).unwrap();
    let kernel = canonical_kernel(spec);
    let ones = Field::sample(spec, |_| 1.0).unwrap();
    let conv = convolve(&kernel, &ones).unwrap();
    assert!(conv.norm(Norm::Sup) < 1e-12);
}

#[test]
fn multiplier_route_matches_convolution_route() {
    let p = DogParams::canonical();
    let spec = GridSpec::new_2d(10.0, 128).unwrap();
    let kernel = canonical_kernel(spec);
    let mut worst = 0.0f64;
    for seed in 0..100 {
        let u = random_smooth(spec, seed, 16).unwrap();
        let by_conv = convolve(&kernel, &u).unwrap();
        let by_mult = apply_multiplier(|xi| Complex64::new(omega_hat(&p, xi), 0.0), &u).unwrap();
        worst = worst.max(by_conv.sup_distance(&by_mult).unwrap());
    }
    assert!(worst <= 1e-12, "max route disagreement {worst:.2e}");
}

#[test]
fn semigroup_multiplier_scales_single_mode() {
    // m(xi) = e^{t (mu omega-hat - 1)} acts on one cosine mode as the scalar
    let p = DogParams::canonical();
    let spec = GridSpec::new_1d(10.0, 1024).unwrap();
    let xi0 = 2.5;
    let u = Field::sample(spec, |x| (2.0 * PI * xi0 * x[0]).cos()).unwrap();
    let t = 0.7;
    let mu = 1.0;
    let factor = (t * (mu * omega_hat(&p, &[xi0]) - 1.0)).exp();
    let v = apply_multiplier(
        |xi| Complex64::new((t * (mu * omega_hat(&p, xi) - 1.0)).exp(), 0.0),
        &u,
    )
    .unwrap();
    let expected = u.scale(factor);
    assert!(v.sup_distance(&expected).unwrap() < 1e-12);
}

#[test]
fn convolution_commutes_with_node_translations() {
    use neurofield::euclid::{act, GroupElement};
    let spec = GridSpec::new_2d(6.0, 64).unwrap();
    let kernel = canonical_kernel(spec);
    let u = random_smooth(spec, 42, 12).unwrap();
    let g = GroupElement::translation(9, -13);
    let a = convolve(&kernel, &act(&g, &u).unwrap()).unwrap();
    let b = act(&g, &convolve(&kernel, &u).unwrap()).unwrap();
    assert!(a.sup_distance(&b).unwrap() <= 1e-12);
}

#[test]
fn convolution_is_bilinear() {
    let spec = GridSpec::new_1d(10.0, 512).unwrap();
    let kernel = canonical_kernel(spec);
    let u = random_smooth(spec, 1, 10).unwrap();
    let v = random_smooth(spec, 2, 10).unwrap();
    let lhs = convolve(&kernel, &u.lin_comb(2.5, &v, -0.75).unwrap()).unwrap();
    let rhs = convolve(&kernel, &u)
        .unwrap()
        .lin_comb(2.5, &convolve(&kernel, &v).unwrap(), -0.75)
        .unwrap();
    assert!(lhs.sup_distance(&rhs).unwrap() <= 1e-12);
}
