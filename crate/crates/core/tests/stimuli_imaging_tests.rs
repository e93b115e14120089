//! Stimulus generation, binarization, warping, group actions, and the
//! symmetry properties the stationary map inherits.

use neurofield::dynamics::{stationary_state, FieldOperator, SolverOptions};
use neurofield::euclid::{act, GroupElement};
use neurofield::grid::{Field, GridSpec};
use neurofield::imaging::{cortical_to_retina, ray_transitions, retino_cortical, warp_to_retina};
use neurofield::kernel::DogParams;
use neurofield::response::ResponseKind;
use neurofield::stimulus::{binarize, generate, heaviside, random_smooth, Stimulus};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[test]
fn paper_figure_inputs_evaluate_pointwise() {
    let spec = GridSpec::new_2d(10.0, 2000).unwrap();
    let rays = generate(&Stimulus::mackay_rays_default(), spec).unwrap();
    // I(x) = cos(5 pi x2) + 0.025 H(2 - x1) at a hand-picked node
    let (i1, i2) = (spec.nearest_index(-3.0), spec.nearest_index(1.7));
    let (x1, x2) = (spec.coord(i1), spec.coord(i2));
    let by_hand = (5.0 * PI * x2).cos() + 0.025 * heaviside(2.0 - x1);
    assert!((rays.at2(i1, i2) - by_hand).abs() < 1e-15);

    let target = generate(&Stimulus::mackay_target_default(), spec).unwrap();
    let by_hand = (5.0 * PI * x1).cos()
        + 0.025 * (heaviside(-x2 - 9.75) + heaviside(x2 - 9.75) + heaviside(0.25 - x2.abs()));
    assert!((target.at2(i1, i2) - by_hand).abs() < 1e-15);

    // the target's central stripe is two-sided: |x2| <= 0.25
    let j_in = spec.nearest_index(0.2);
    let j_out = spec.nearest_index(0.4);
    assert!(target.at2(i1, j_in) > target.at2(i1, j_out));
}

#[test]
fn retino_cortical_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let r: f64 = rng.gen_range(1e-3..50.0);
        let theta: f64 = rng.gen_range(0.0..2.0 * PI);
        let (x1, x2) = retino_cortical(r, theta).unwrap();
        let (r2, t2) = cortical_to_retina(x1, x2);
        assert!((r - r2).abs() <= 1e-14 * r.max(1.0));
        assert!((theta - t2).abs() <= 1e-12);
    }
}

#[test]
fn funnel_warp_shows_the_formula_sector_count() {
    // cos(2 pi lambda theta) along a circle: sector boundaries where the
    // cosine crosses zero; count them on the half-turn theta in (0, pi)
    // via the vertical column of the warped image
    let lambda = 2.5;
    let spec = GridSpec::new_2d(10.0, 512).unwrap();
    let funnel = generate(&Stimulus::Funnel { lambda }, spec).unwrap();
    let out_px = 1001;
    let r_max = 5.0;
    let raster = warp_to_retina(&funnel, out_px, r_max).unwrap();

    // walk a circle of radius r=2.5 through pixel space and count
    // black/white transitions; compare to the zero count of
    // cos(2 pi lambda theta) over the sweep
    let center = (out_px as f64 - 1.0) / 2.0;
    let scale = r_max / center;
    let r_walk = 2.5 / scale; // in pixels
    let samples = 4096;
    let mut transitions = 0;
    let mut prev: Option<bool> = None;
    let mut first: Option<bool> = None;
    for s in 0..samples {
        let th = 2.0 * PI * s as f64 / samples as f64;
        let px = (center + r_walk * th.cos()).round() as usize;
        let py = (center - r_walk * th.sin()).round() as usize;
        let dark = raster.pixels[py * out_px + px] < 128;
        if let Some(p) = prev {
            if p != dark {
                transitions += 1;
            }
        } else {
            first = Some(dark);
        }
        prev = Some(dark);
    }
    if prev != first {
        transitions += 1; // close the loop
    }
    // zeros of cos(2 pi lambda theta) in [0, 2 pi): floor(4 pi lambda)
    let expected = (4.0 * PI * lambda).floor() as i64; // 31 for lambda = 2.5
    assert!(
        (transitions - expected).abs() <= 2,
        "transitions {transitions} vs formula {expected}"
    );
}

#[test]
fn tunnel_warp_shows_concentric_rings() {
    let lambda = 2.5;
    let spec = GridSpec::new_2d(10.0, 512).unwrap();
    let tunnel = generate(&Stimulus::Tunnel { lambda }, spec).unwrap();
    let r_max = (1.5f64).exp();
    let raster = warp_to_retina(&tunnel, 1001, r_max).unwrap();
    // rings between r_lo and r_max: zeros of cos(2 pi lambda log r), i.e.
    // log r crossing the (k - 1/2)/(2 lambda) lattice
    let r_lo = 0.5f64;
    let count_formula = {
        let (a, b) = (r_lo.ln(), r_max.ln());
        let lo = (2.0 * lambda * a - 0.5).ceil() as i64;
        let hi = (2.0 * lambda * b - 0.5).floor() as i64;
        (hi - lo + 1).max(0)
    };
    let measured = ray_transitions(&raster, r_lo, r_max, r_max);
    assert!(
        (measured as i64 - count_formula).abs() <= 1,
        "measured {measured} rings vs formula {count_formula}"
    );
}

#[test]
fn group_actions_satisfy_the_group_law() {
    let spec = GridSpec::new_2d(8.0, 64).unwrap();
    let u = random_smooth(spec, 9, 14).unwrap();
    let g1 = GroupElement {
        shift_nodes: [5, -3],
        orthogonal: neurofield::euclid::Orthogonal::Rotate90,
    };
    let g2 = GroupElement::reflection_x2();
    // T_{g1} T_{g2} u = T_{g1 g2} u checked pointwise through double action
    let lhs = act(&g1, &act(&g2, &u).unwrap()).unwrap();
    // compose manually: (a1, r1)(a2, r2) = (r1 a2 + a1, r1 r2); with r2 a
    // reflection the composite is not in our restricted enum for all cases,
    // so verify associativity through inverses instead
    let back = act(&g2.inverse(), &act(&g1.inverse(), &lhs).unwrap()).unwrap();
    assert!(back.sup_distance(&u).unwrap() == 0.0);
}

#[test]
fn stationary_map_is_equivariant() {
    let p = DogParams::canonical();
    let spec = GridSpec::new_2d(10.0, 128).unwrap();
    let op = FieldOperator::new(spec, &p).unwrap();
    let opts = SolverOptions::default();
    let elements = [
        GroupElement::translation(7, 31),
        GroupElement::reflection_x1(),
        GroupElement::rotation_quarter_turns(2),
    ];
    for (i, g) in elements.iter().enumerate() {
        let input = random_smooth(spec, 700 + i as u64, 14).unwrap();
        let (psi, _) = stationary_state(&op, &input, 1.0, ResponseKind::Tanh, &opts).unwrap();
        let (psi_g, _) = stationary_state(
            &op,
            &act(g, &input).unwrap(),
            1.0,
            ResponseKind::Tanh,
            &opts,
        )
        .unwrap();
        let gap = psi_g.sup_distance(&act(g, &psi).unwrap()).unwrap();
        assert!(gap <= 10.0 * opts.tol, "{g:?}: equivariance gap {gap:.2e}");
    }
}

#[test]
fn funnel_output_varies_along_x2_only_and_is_periodic() {
    let p = DogParams::canonical();
    // n chosen so the stimulus period 1/lambda = 0.4 is exactly 8 nodes
    let spec = GridSpec::new_2d(10.0, 400).unwrap();
    let op = FieldOperator::new(spec, &p).unwrap();
    let lambda = 2.5;
    let input = generate(&Stimulus::Funnel { lambda }, spec).unwrap();
    let (state, _) = stationary_state(
        &op,
        &input,
        1.0,
        ResponseKind::Rational,
        &SolverOptions::default(),
    )
    .unwrap();

    // x1-independence: row-wise variance across x1
    let n = spec.n;
    let mut max_var = 0.0f64;
    for i2 in 0..n {
        let mean: f64 = (0..n).map(|i1| state.at2(i1, i2)).sum::<f64>() / n as f64;
        let var: f64 = (0..n)
            .map(|i1| (state.at2(i1, i2) - mean).powi(2))
            .sum::<f64>()
            / n as f64;
        max_var = max_var.max(var);
    }
    assert!(max_var <= 1e-10, "max x1 variance {max_var:.2e}");

    // 1/lambda periodicity and evenness in x2, both exact on this lattice
    let period = ((1.0 / lambda) / spec.dx()).round() as usize;
    assert_eq!(period, 8);
    let mut max_gap = 0.0f64;
    let mut max_even_gap = 0.0f64;
    for i2 in 0..n {
        let shifted = (i2 + period) % n;
        max_gap = max_gap.max((state.at2(0, shifted) - state.at2(0, i2)).abs());
        let mirrored = (n - i2) % n;
        max_even_gap = max_even_gap.max((state.at2(0, mirrored) - state.at2(0, i2)).abs());
    }
    assert!(max_gap <= 1e-9, "periodicity gap {max_gap:.2e}");
    assert!(max_even_gap <= 1e-9, "evenness gap {max_even_gap:.2e}");
}

#[test]
fn odd_response_keeps_funnel_zeros_anchored() {
    // mu = 0.8 < mu_0/2, odd sigmoid: zeros of a_F coincide with the
    // cosine's within one grid cell
    let p = DogParams::canonical();
    let spec = GridSpec::new_1d(10.0, 4096).unwrap();
    let op = FieldOperator::new(spec, &p).unwrap();
    let lambda = 2.5;
    let input = Field::sample(spec, |x| (2.0 * PI * lambda * x[0]).cos()).unwrap();
    for kind in [ResponseKind::Tanh, ResponseKind::Rational] {
        let (state, _) =
            stationary_state(&op, &input, 0.8, kind, &SolverOptions::with_tol(1e-12)).unwrap();
        let zs = zero_crossings(&state, &spec);
        let cos_zs = zero_crossings(&input, &spec);
        assert_eq!(zs.len(), cos_zs.len(), "{kind:?}");
        for (a, b) in zs.iter().zip(&cos_zs) {
            assert!(
                (a - b).abs() <= spec.dx(),
                "{kind:?}: zero {a} vs cosine {b}"
            );
        }
    }
}

#[test]
fn non_odd_response_obeys_the_zero_gap_bound() {
    // an admissible non-odd response: identity on [-2, 1], capped outside;
    // measured zero displacement must respect arcsin(mu/mu_0)/(2 pi lambda)
    let p = DogParams::canonical();
    let spec = GridSpec::new_1d(10.0, 4096).unwrap();
    let op = FieldOperator::new(spec, &p).unwrap();
    let lambda = 2.5;
    let mu = 0.8;
    let input = Field::sample(spec, |x| (2.0 * PI * lambda * x[0]).cos()).unwrap();

    // solve with the asymmetric response by reusing the solver's machinery
    // through a custom fixed-point loop
    let f_asym = |s: f64| s.clamp(-2.0, 1.0);
    let mut state = input.clone();
    for _ in 0..400 {
        let fs = state.map(f_asym).unwrap();
        let next = input.lin_comb(1.0, &op.convolve(&fs), mu).unwrap();
        let delta = next.sup_distance(&state).unwrap();
        state = next;
        if delta < 1e-12 {
            break;
        }
    }

    let zs = zero_crossings(&state, &spec);
    let bound = (mu / 2.0).asin() / (2.0 * PI * lambda);
    // displacement against the cosine zero lattice (2k+1)/(4 lambda)
    for z in zs {
        let k = ((z * 4.0 * lambda - 1.0) / 2.0).round();
        let tau = (2.0 * k + 1.0) / (4.0 * lambda);
        assert!(
            (z - tau).abs() <= bound + spec.dx(),
            "zero {z} displaced {:.2e} beyond bound {bound:.2e}",
            (z - tau).abs()
        );
    }
}

fn zero_crossings(f: &Field, spec: &GridSpec) -> Vec<f64> {
    let mut out = Vec::new();
    for j in 1..spec.n {
        let (a, b) = (f.at(j - 1), f.at(j));
        if a.signum() != b.signum() && b != 0.0 && a != 0.0 {
            let (xa, xb) = (spec.coord(j - 1), spec.coord(j));
            out.push(xa - a * (xb - xa) / (b - a));
        }
    }
    out
}

#[test]
fn pbm_serialization_is_stable() {
    let spec = GridSpec::new_2d(1.0, 16).unwrap();
    let f = Field::sample(spec, |x| x[0]).unwrap();
    let pbm = binarize(&f).to_pbm();
    assert!(pbm.starts_with(b"P4\n16 16\n"));
    // 16 pixels/row = 2 bytes per row
    assert_eq!(pbm.len(), b"P4\n16 16\n".len() + 2 * 16);
    // determinism
    assert_eq!(pbm, binarize(&f).to_pbm());
}

#[test]
fn warp_binary_ring_counting_matches_field_route() {
    let spec = GridSpec::new_2d(10.0, 256).unwrap();
    let tunnel = generate(&Stimulus::Tunnel { lambda: 2.5 }, spec).unwrap();
    let r_max = (1.0f64).exp();
    let a = warp_to_retina(&tunnel, 512, r_max).unwrap();
    let b = neurofield::imaging::warp_binary_to_retina(&binarize(&tunnel), 512, r_max).unwrap();
    let ta = ray_transitions(&a, 0.4, r_max, r_max);
    let tb = ray_transitions(&b, 0.4, r_max, r_max);
    assert!((ta as i64 - tb as i64).abs() <= 1, "{ta} vs {tb}");
}
