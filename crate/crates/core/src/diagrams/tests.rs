use super::*;
use crate::kernels::{build_kernel, KernelFamily, KernelSpec};
use crate::quad::adaptive_simpson;
use crate::ratpoly::rat;
use approx::assert_relative_eq;

fn cube(side: f64, d: u32) -> Kernel {
    build_kernel(KernelSpec {
        family: KernelFamily::HyperCube { side },
        d,
    })
    .unwrap()
}

#[test]
fn cube_rationals_match_reference_table() {
    let one = rat(1, 1);
    let loops = [
        (3, rat(3, 4)),
        (4, rat(2, 3)),
        (5, rat(115, 192)),
        (6, rat(11, 20)),
        (7, rat(5887, 11520)),
        (8, rat(151, 315)),
    ];
    for (n, want) in loops {
        assert_eq!(cube_loop_rational(&one, n), want, "loop{n}");
    }
    assert_eq!(cube_theta_rational(&one, 1, 2, 2), rat(7, 12));
    assert_eq!(cube_theta_rational(&one, 2, 2, 2), rat(1, 2));
    assert_eq!(cube_theta_rational(&one, 1, 2, 3), rat(49, 96));
}

#[test]
fn cube_float_values() {
    for d in [1u32, 5, 20] {
        let k = cube(1.0, d);
        let v = loop_value(&k, 3).unwrap();
        assert_eq!(v.method, Method::ClosedForm);
        assert_relative_eq!(
            v.value.ln_abs,
            d as f64 * 0.75f64.ln(),
            max_relative = 1e-13
        );
        let t = theta_value(&k, 2, 1, 2).unwrap();
        assert_relative_eq!(
            t.value.ln_abs,
            d as f64 * (7.0f64 / 12.0).ln(),
            max_relative = 1e-13
        );
    }
}

#[test]
fn gaussian_and_cauchy_closed_forms() {
    let d = 7u32;
    let g = build_kernel(KernelSpec::gaussian_phi0(d, 0.8)).unwrap();
    let q = g.log_mass;
    for n in 2..=6u32 {
        let v = loop_value(&g, n).unwrap();
        let want = q.powi(n as i32 - 1).ln_abs - d as f64 / 2.0 * (n as f64).ln();
        assert_relative_eq!(v.value.ln_abs, want, max_relative = 1e-12);
    }
    // theta(1,2,2): pairs = 1·2+1·2+2·2 = 8
    let t = theta_value(&g, 1, 2, 2).unwrap();
    let want = q.powi(3).ln_abs - d as f64 / 2.0 * 8.0f64.ln();
    assert_relative_eq!(t.value.ln_abs, want, max_relative = 1e-12);

    let c = build_kernel(KernelSpec::cauchy_phi0(d, 0.6)).unwrap();
    let qc = c.log_mass;
    let t = theta_value(&c, 1, 2, 2).unwrap();
    let want = qc.powi(3).ln_abs + d as f64 * (5.0f64 / 36.0).ln();
    assert_relative_eq!(t.value.ln_abs, want, max_relative = 1e-12);
}

#[test]
fn permutation_invariance_is_exact() {
    let k = cube(1.0, 4);
    let perms = [
        (1u32, 2u32, 3u32),
        (1, 3, 2),
        (2, 1, 3),
        (2, 3, 1),
        (3, 1, 2),
        (3, 2, 1),
    ];
    let base = theta_value(&k, 1, 2, 3).unwrap();
    for (a, b, c) in perms {
        assert_eq!(theta_value(&k, a, b, c).unwrap(), base);
    }
}

#[test]
fn scale_invariance_of_normalized_diagrams() {
    let ids = [
        DiagramId::Loop(3),
        DiagramId::Loop(5),
        DiagramId::theta(1, 2, 2),
        DiagramId::theta(2, 2, 3),
    ];
    for d in [1u32, 6] {
        let base = cube(1.0, d);
        for scale in [0.5, 2.0, 10.0] {
            let scaled = cube(scale, d);
            for id in ids {
                let a = normalized_diagram(&base, id).unwrap().value;
                let b = normalized_diagram(&scaled, id).unwrap().value;
                assert_relative_eq!(a.ln_abs, b.ln_abs, max_relative = 1e-10, epsilon = 1e-10);
            }
        }
    }
}

#[test]
fn monotone_loop_chain_unit_mass() {
    // q_φ = 1 ⇒ Loop(n+1) ≤ Loop(n)
    let kernels: Vec<Kernel> = vec![
        cube(1.0, 9),
        build_kernel(KernelSpec::sphere_unit_volume(9)).unwrap(),
        build_kernel(KernelSpec::gaussian_phi0(9, 1.0 / (2.0 * std::f64::consts::PI).sqrt()))
            .unwrap(),
        build_kernel(KernelSpec::cauchy_phi0(9, 1.0 / std::f64::consts::PI)).unwrap(),
    ];
    for k in &kernels {
        assert!(k.log_mass.ln_abs.abs() < 1e-10, "q=1 setup");
        let mut prev = f64::INFINITY;
        for n in 2..=8u32 {
            let v = loop_value(k, n).unwrap();
            assert!(
                v.value.ln_abs <= prev + 1e-9,
                "loop{n} not decreasing for {:?}",
                k.spec.family
            );
            prev = v.value.ln_abs;
        }
    }
}

#[test]
fn theta_bounded_by_loop222_product_form() {
    // ∫φ^{⋆a}φ^{⋆b}φ^{⋆c} ≤ q^{a+b+c-6} ∫(φ^{⋆2})³ for a,b,c ≥ 2
    let triples = [
        (2u32, 2u32, 2u32),
        (2, 2, 3),
        (2, 2, 4),
        (2, 3, 3),
        (2, 2, 5),
        (2, 3, 4),
        (3, 3, 3),
    ];
    let kernels = vec![
        cube(2.0, 5),
        build_kernel(KernelSpec::gaussian_phi0(5, 0.7)).unwrap(),
        build_kernel(KernelSpec::cauchy_phi0(5, 0.9)).unwrap(),
    ];
    for k in &kernels {
        let t222 = theta_value(k, 2, 2, 2).unwrap().value;
        for (a, b, c) in triples {
            let t = theta_value(k, a, b, c).unwrap().value;
            let bound = k
                .log_mass
                .powi((a + b + c) as i32 - 6)
                .mul(&t222);
            assert!(
                t.ln_abs <= bound.ln_abs + 1e-9,
                "triple ({a},{b},{c}) violates bound for {:?}",
                k.spec.family
            );
        }
    }
}

#[test]
fn cross_route_closed_vs_grid() {
    // cube closed forms against the brute-force grid oracle
    let ids = [
        DiagramId::Loop(3),
        DiagramId::Loop(4),
        DiagramId::theta(1, 2, 2),
        DiagramId::theta(2, 2, 2),
    ];
    for d in [1u32, 5, 20] {
        let ck = cube(1.0, d);
        let profile = ck.product_profile(4097).unwrap();
        for id in ids {
            let closed = diagram_value(&ck, id).unwrap().value.ln_abs;
            let oracle = grid::oracle_grid_diagram(&profile, id, d);
            assert_relative_eq!(closed, oracle.ln_value, max_relative = 1e-8, epsilon = 1e-8);
        }
    }
}

#[test]
fn cauchy_vs_frozen_nested_quadrature_1d() {
    // heavy tails make live nested quadrature far too slow here, so the
    // oracle values come from offline arbitrary-precision nested quadrature
    // of phi(x) = 1/(1+x^2) over split infinite ranges (30 digits)
    let k = build_kernel(KernelSpec::cauchy_phi0(1, 1.0)).unwrap();
    let loop3_oracle = 3.2898681336964528729;
    let t122_oracle = 4.3064273167083083577;
    let closed = loop_value(&k, 3).unwrap().value.to_f64();
    assert_relative_eq!(closed, loop3_oracle, max_relative = 1e-12);
    let closed = theta_value(&k, 1, 2, 2).unwrap().value.to_f64();
    assert_relative_eq!(closed, t122_oracle, max_relative = 1e-12);
}

#[test]
fn gaussian_theta_vs_direct_quadrature_1d() {
    // independent oracle: nested adaptive quadrature of ∫ φ^{⋆1} (φ^{⋆2})² at d=1
    let spec = KernelSpec::gaussian_phi0(1, 0.9);
    let k = build_kernel(spec).unwrap();
    let phi = |x: f64| k.eval(&[x]);
    let phi2 = |x: f64| {
        adaptive_simpson(|t| phi(t) * phi(x - t), -12.0, 12.0, 1e-12).0
    };
    let (oracle, _) = adaptive_simpson(|x| phi(x) * phi2(x) * phi2(x), -12.0, 12.0, 1e-11);
    let closed = theta_value(&k, 1, 2, 2).unwrap().value.to_f64();
    assert_relative_eq!(closed, oracle, max_relative = 1e-8);
}

#[test]
fn theta_11n_pairs_formula_vs_quadrature() {
    // Theta(1,1,n): the Gaussian pairs formula gives (2n+1); check against
    // direct quadrature of ∫ φ(x)² φ^{⋆n}(x) dx at d=1 for n = 2
    let k = build_kernel(KernelSpec::gaussian_phi0(1, 0.8)).unwrap();
    let phi = |x: f64| k.eval(&[x]);
    let phi2 = |x: f64| adaptive_simpson(|t| phi(t) * phi(x - t), -11.0, 11.0, 1e-12).0;
    let (oracle, _) = adaptive_simpson(|x| phi(x) * phi(x) * phi2(x), -11.0, 11.0, 1e-11);
    let closed = theta_value(&k, 1, 1, 2).unwrap().value.to_f64();
    assert_relative_eq!(closed, oracle, max_relative = 1e-8);
}

#[test]
fn sphere_basic_routes() {
    let k = build_kernel(KernelSpec::sphere_unit_volume(12)).unwrap();
    let l2 = loop_value(&k, 2).unwrap();
    assert!(l2.value.ln_abs.abs() < 1e-10); // ∫φ² = q = 1
    let l3 = loop_value(&k, 3).unwrap();
    assert_eq!(l3.method, Method::ClosedForm);
    let l4 = loop_value(&k, 4).unwrap();
    assert_eq!(l4.method, Method::BetaQuadrature);
    let l7 = loop_value(&k, 7).unwrap();
    assert_eq!(l7.method, Method::RadialFourierQuadrature);
    // unsupported sphere theta reports a clean error
    assert!(theta_value(&k, 2, 2, 3).is_err());
}

#[test]
fn diagram_id_parse_and_display() {
    assert_eq!("loop3".parse::<DiagramId>().unwrap(), DiagramId::Loop(3));
    assert_eq!(
        "theta212".parse::<DiagramId>().unwrap(),
        DiagramId::Theta(1, 2, 2)
    );
    assert_eq!(DiagramId::theta(3, 1, 2).to_string(), "theta123");
    assert!("loop1".parse::<DiagramId>().is_err());
    assert!("blah".parse::<DiagramId>().is_err());
}

#[test]
fn memoization_returns_identical_values() {
    let k = cube(1.0, 8);
    let a = diagram_value(&k, DiagramId::Loop(5)).unwrap();
    let b = diagram_value(&k, DiagramId::Loop(5)).unwrap();
    assert_eq!(a, b);
    assert!(k.cache.read().unwrap().contains_key(&DiagramId::Loop(5)));
}
