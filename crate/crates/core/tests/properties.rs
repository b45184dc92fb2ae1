use proptest::prelude::*;

use weakderiv::admissibility::{check_support, falsify, one_sided_trace, CheckOptions, Mode};
use weakderiv::caratheodory::{measure_fourier_coefficients, toeplitz_psd};
use weakderiv::cone::{Ball, ConvexBody, DirectionClass, HPolytope};
use weakderiv::distributions::Mollified;
use weakderiv::numerics::{richardson_one_sided, simpson, Polynomial, RichardsonOptions, Side, SmoothFn, Trig};
use weakderiv::transport::VelocityRepresentative;
use weakderiv::{Atom, DensityPiece, Mollifier, RadonMeasure, StructuredDistribution, SupportSet};

use nalgebra::DVector;

fn atom_strategy() -> impl Strategy<Value = Atom> {
    (-1.0..1.0f64, 0usize..=4, -3.0..3.0f64).prop_map(|(p, k, c)| Atom::new(p, k, c))
}

fn box_strategy() -> impl Strategy<Value = DensityPiece> {
    (-1.0..0.9f64, 0.05..1.0f64, -2.0..2.0f64).prop_map(|(lo, w, m)| DensityPiece::uniform(lo, lo + w, m).unwrap())
}

fn distribution_strategy() -> impl Strategy<Value = StructuredDistribution> {
    (prop::collection::vec(atom_strategy(), 0..5), prop::collection::vec(box_strategy(), 0..3))
        .prop_map(|(a, d)| StructuredDistribution::new(a, d).unwrap())
}

/// Disjoint ordered components, each an isolated point or an interval.
fn support_strategy() -> impl Strategy<Value = SupportSet> {
    prop::collection::vec((0.2..0.8f64, prop::bool::ANY, 0.1..0.5f64), 1..=3).prop_map(|parts| {
        let mut x = -1.5;
        let mut out = Vec::new();
        for (gap, point, len) in parts {
            x += gap;
            if point {
                out.push((x, x));
            } else {
                out.push((x, x + len));
                x += len;
            }
        }
        SupportSet::new(out).unwrap()
    })
}

fn test_function() -> impl SmoothFn {
    Trig { amplitude: 1.3, frequency: 2.1, phase: 0.4 }
}

fn rules_ok(support: &SupportSet, eta: &StructuredDistribution, mode: Mode) -> bool {
    let opts = CheckOptions { probability: false, budget: 0, seed: 0 };
    check_support(support, eta, mode, &opts).admissible
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairing_is_linear(a in distribution_strategy(), b in distribution_strategy(), s in -3.0..3.0f64, t in -3.0..3.0f64) {
        let phi = test_function();
        let lhs = a.scaled(s).plus(&b.scaled(t)).pair(&phi).unwrap();
        let rhs = s * a.pair(&phi).unwrap() + t * b.pair(&phi).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn atom_pairing_follows_sign_convention(p in -1.0..1.0f64, k in 0usize..=6, c in -2.0..2.0f64) {
        let phi = test_function();
        let got = StructuredDistribution::atom(p, k, c).pair(&phi).unwrap();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let want = c * sign * phi.derivative(p, k).unwrap();
        prop_assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()));
    }

    #[test]
    fn two_sided_is_one_sided_for_both_signs(s in support_strategy(), eta in distribution_strategy()) {
        let both = one_sided_trace(&s, &eta).iter().all(|f| f.satisfied)
            && one_sided_trace(&s, &-&eta).iter().all(|f| f.satisfied);
        prop_assert_eq!(rules_ok(&s, &eta, Mode::TwoSided), both);
        prop_assert_eq!(rules_ok(&s, &eta, Mode::TwoSided), rules_ok(&s, &-&eta, Mode::TwoSided));
        if rules_ok(&s, &eta, Mode::TwoSided) {
            prop_assert!(rules_ok(&s, &eta, Mode::OneSided));
        }
    }

    #[test]
    fn verdict_invariant_under_positive_scaling(s in support_strategy(), eta in distribution_strategy(), lambda in 1e-3..1e3f64) {
        for mode in [Mode::OneSided, Mode::TwoSided] {
            prop_assert_eq!(rules_ok(&s, &eta, mode), rules_ok(&s, &eta.scaled(lambda), mode));
        }
    }

    #[test]
    fn oracle_never_refutes_rule_admissible(s in support_strategy(), eta in distribution_strategy(), seed in 0u64..1000) {
        for mode in [Mode::OneSided, Mode::TwoSided] {
            if rules_ok(&s, &eta, mode) {
                prop_assert!(falsify(&s, &eta, mode, 1500, seed).is_none());
            }
        }
    }

    #[test]
    fn simpson_exact_on_cubics(c in prop::collection::vec(-5.0..5.0f64, 4), a in -2.0..0.0f64, w in 0.1..3.0f64) {
        let p = Polynomial::new(c.clone());
        let b = a + w;
        let anti = |x: f64| c[0] * x + c[1] * x * x / 2.0 + c[2] * x.powi(3) / 3.0 + c[3] * x.powi(4) / 4.0;
        let got = simpson(|x| p.value(x), a, b, 2);
        let want = anti(b) - anti(a);
        prop_assert!((got - want).abs() <= 1e-11 * (1.0 + want.abs()));
    }

    #[test]
    fn mollifier_derivatives_have_parity(ratio in 0.1..0.9f64, x in -1.0..1.0f64, k in 0usize..=6) {
        let m = Mollifier::new(ratio).unwrap();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let l = m.derivative(-x, k).unwrap();
        let r = m.derivative(x, k).unwrap();
        prop_assert!((l - sign * r).abs() <= 1e-9 * (1.0 + r.abs()));
    }

    #[test]
    fn scaled_mollifier_law(ratio in 0.1..0.9f64, eps in 0.01..1.0f64, x in -1.0..1.0f64, k in 0usize..=4) {
        let m = Mollifier::new(ratio).unwrap();
        let me = m.scaled(eps).unwrap();
        let want = m.derivative(x / eps, k).unwrap() / eps.powi(k as i32 + 1);
        let got = me.derivative(x, k).unwrap();
        prop_assert!((got - want).abs() <= 1e-10 * (1.0 + want.abs()));
    }

    #[test]
    fn mollified_value_is_pairing_with_shifted_kernel(eta in distribution_strategy(), eps in 0.05..0.5f64, x in -1.5..1.5f64) {
        let psi = Mollifier::new(0.5).unwrap().scaled(eps).unwrap();
        let conv = Mollified::new(&psi, &eta).unwrap();
        // (η * ψ_ε)(x) = Σ c ψ_ε^{(k)}(x - p) + ∫ ρ(y) ψ_ε(x - y) dy
        let atoms: f64 = eta.atoms().iter().map(|a| a.coeff * psi.derivative(x - a.location, a.order).unwrap()).sum();
        let dens: f64 = eta.density().iter().map(|d| {
            let (lo, hi) = d.interval();
            simpson(|y| d.value(y) * psi.eval(x - y), lo, hi, 1 << 12)
        }).sum();
        let want = atoms + dens;
        let scale = 1.0 + eta.scale() * psi.sup_derivative(eta.order()).unwrap();
        prop_assert!((conv.value(x) - want).abs() <= 1e-7 * scale, "{} vs {}", conv.value(x), want);
    }

    #[test]
    fn richardson_recovers_polynomial_slope(c in prop::collection::vec(-3.0..3.0f64, 5), t0 in -1.0..1.0f64) {
        let p = Polynomial::new(c);
        let want = p.derivative(t0, 1).unwrap();
        for side in [Side::Right, Side::Left] {
            let ex = richardson_one_sided(|t| p.value(t), t0, side, &RichardsonOptions::new(0.1)).unwrap();
            prop_assert!((ex.estimate - want).abs() <= 1e-8 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn toeplitz_of_positive_circle_measure_is_psd(
        masses in prop::collection::vec((0.0..std::f64::consts::TAU, 0.01..2.0f64), 1..6),
        n in 0usize..12,
    ) {
        let mu = RadonMeasure::new(masses, vec![]).unwrap();
        let report = toeplitz_psd(&measure_fourier_coefficients(&mu, n).unwrap()).unwrap();
        prop_assert!(report.is_psd, "{report:?}");
    }

    #[test]
    fn support_operations(s in support_strategy(), r in 0.0..0.3f64, x in -2.0..2.0f64) {
        prop_assert!(s.union(&s) == s);
        prop_assert!(s.is_subset_of(&s.dilate(r)));
        if s.contains(x) {
            prop_assert!(s.dilate(r).contains(x));
        }
    }

    #[test]
    fn cone_directions_inside_give_feasible_curves(
        v in prop::collection::vec(-1.0..1.0f64, 2),
        corner in 0usize..4,
    ) {
        let square = ConvexBody::Polytope(HPolytope::cube(2, 0.0, 1.0).unwrap());
        let p = DVector::from_vec(vec![(corner & 1) as f64, (corner >> 1) as f64]);
        let v = DVector::from_vec(v);
        match square.classify_direction(&p, &v).unwrap() {
            DirectionClass::Outside => prop_assert!(square.construct_curve(&p, &v, 20).is_err()),
            _ => {
                let c = square.construct_curve(&p, &v, 20).unwrap();
                prop_assert!(c.points().iter().all(|x| square.contains(x)));
            }
        }
    }

    #[test]
    fn ball_boundary_curves_stay_inside(theta in 0.0..std::f64::consts::TAU, s in -1.0..1.0f64) {
        let ball = ConvexBody::Ball(Ball::unit(2));
        let p = DVector::from_vec(vec![theta.cos(), theta.sin()]);
        // tangent direction plus an inward component
        let v = DVector::from_vec(vec![-theta.sin(), theta.cos()]) * s - &p * 0.1 * s.abs();
        let c = ball.construct_curve(&p, &v, 30).unwrap();
        for i in 0..=200 {
            prop_assert!(ball.contains(&c.eval(i as f64 / 200.0)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn velocity_reconstructs_flux(a in -2.0..2.0f64, b in -2.0..2.0f64, p in -0.2..0.2f64) {
        // zero total action: dipole plus quadrupole
        let eta = StructuredDistribution::new([Atom::new(p, 1, a), Atom::new(p, 2, b)], []).unwrap();
        prop_assume!(eta.scale() > 1e-3);
        let psi = Mollifier::new(0.5).unwrap();
        let rep = VelocityRepresentative::build(&RadonMeasure::uniform(-0.5, 0.5).unwrap(), &eta, &psi, &[0.1, 0.05]).unwrap();
        for l in &rep.levels {
            prop_assert!(l.mass_ok());
            prop_assert!(l.residual_ok(), "{}", l.residual / l.sup_g);
            for i in 0..l.v.len() {
                if l.mask[i] {
                    let flux = l.f.values()[i] * l.v.values()[i];
                    prop_assert!((flux + l.flux_primitive.values()[i]).abs() <= 1e-10 * l.sup_g);
                }
            }
        }
    }
}

