use outer_eds::billiard::{outer_map, ConvexCurve};
use outer_eds::geom::alternating_triple;
use outer_eds::lab::{sample_orbit_polygon, OrbitSampler};
use outer_eds::{
    det2, inner2, special_element_minus, special_element_plus, variety_equations_n5,
    variety_equations_n6, OrbitPolygon, Tolerances, Vec2,
};
use proptest::prelude::*;

fn vec2() -> impl Strategy<Value = Vec2> {
    (-100.0..100.0f64, -100.0..100.0f64).prop_map(|(x, y)| Vec2::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn alternating_triple_vanishes(a in vec2(), b in vec2(), c in vec2()) {
        let scale = a.norm() * b.norm() * c.norm() + 1e-300;
        prop_assert!(alternating_triple(a, b, c).norm() <= 1e-12 * scale);
    }

    #[test]
    fn lemma_holds(r0 in vec2(), r1 in vec2(), r2 in vec2()) {
        let lhs = det2(r1, r2) * inner2(r0, r1) + det2(r0, r1) * inner2(r1, r2);
        let rhs = r1.norm_squared() * det2(r0, r2);
        let scale = r0.norm() * r1.norm() * r1.norm() * r2.norm() + 1e-300;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn special_elements_have_corank_two(seed in any::<u64>(), n in 3usize..=12) {
        let m = 1 + (seed as usize) % ((n - 1) / 2);
        let p = sample_orbit_polygon(&OrbitSampler::new(n, m, seed)).unwrap();
        let tol = Tolerances::default();
        prop_assert!(special_element_minus(&p, &tol).is_ok());
        if n % 2 == 0 {
            prop_assert!(special_element_plus(&p, &tol).is_ok());
        }
    }

    #[test]
    fn variety_contains_special_elements(seed in any::<u64>(), m in 1usize..=2) {
        let tol = Tolerances::default();
        let p5 = sample_orbit_polygon(&OrbitSampler::new(5, m, seed)).unwrap();
        let minus: Vec<f64> = p5.d().iter().map(|d| -d).collect();
        let a = p5.area_scale();
        for r in variety_equations_n5(&p5, &minus).unwrap() {
            prop_assert!(r.abs() <= tol.variety * a * a);
        }
        let p6 = sample_orbit_polygon(&OrbitSampler::new(6, m, seed)).unwrap();
        let a = p6.area_scale();
        for c in [p6.d().iter().map(|d| -d).collect::<Vec<_>>(), p6.d().to_vec()] {
            for r in variety_equations_n6(&p6, &c).unwrap() {
                prop_assert!(r.abs() <= tol.variety * a * a * a);
            }
        }
    }

    #[test]
    fn polygon_map_is_an_involution_off_the_singular_set(angle in 0.0..std::f64::consts::TAU, radius in 1.5..20.0f64) {
        let hex = ConvexCurve::regular_polygon(6, 1.0).unwrap();
        let z = Vec2::from_angle(angle) * radius;
        let Ok(fz) = outer_map(&hex, z) else { return Ok(()); };
        // reflecting back through the same support point: F⁻¹ is F for the reversed curve
        let reversed: Vec<Vec2> = hex.points().iter().rev().map(|p| Vec2::new(p.x, -p.y)).collect();
        let mirror = ConvexCurve::polygon(reversed).unwrap();
        let back = outer_map(&mirror, Vec2::new(fz.x, -fz.y)).unwrap();
        prop_assert!((Vec2::new(back.x, -back.y) - z).norm() <= 1e-12 * radius);
    }

    #[test]
    fn polygon_json_round_trip(seed in any::<u64>()) {
        let p = sample_orbit_polygon(&OrbitSampler::new(7, 2, seed)).unwrap();
        let text = serde_json::to_string(&p.to_file()).unwrap();
        let q = OrbitPolygon::try_from(OrbitPolygon::from_json(&text).unwrap()).unwrap();
        prop_assert_eq!(p, q);
    }
}
