use proptest::prelude::*;
use radial_mult::fock::{self, build_space, FockSpec};
use radial_mult::hankel::{self, c_norm};
use radial_mult::integral::{self, Atom, DiscreteMeasure};
use radial_mult::multiplier::{self, kraus, ucp, Component, EigenOptions, Variant};
use radial_mult::symbol::{self, DoublingOptions, RadialSymbol};
use radial_mult::{Case, FockSpace, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

const TOL: f64 = 1e-10;

fn complex(bound: f64) -> impl Strategy<Value = C64> {
    (-bound..bound, -bound..bound).prop_map(|(re, im)| C64::new(re, im))
}

fn disk_point(radius: f64) -> impl Strategy<Value = C64> {
    (0.0..radius, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn measure() -> impl Strategy<Value = DiscreteMeasure> {
    prop::collection::vec((disk_point(0.85), complex(1.0)), 1..5)
        .prop_map(|atoms| DiscreteMeasure::new(atoms.into_iter().map(|(s, w)| Atom { s, w }).collect()).unwrap())
}

fn finite_symbol() -> impl Strategy<Value = RadialSymbol> {
    (prop::collection::vec(complex(1.0), 0..8), complex(1.0)).prop_map(|(values, tail)| RadialSymbol::finite(values, tail).unwrap())
}

fn any_symbol() -> impl Strategy<Value = RadialSymbol> {
    prop_oneof![
        finite_symbol(),
        disk_point(0.8).prop_map(|s| RadialSymbol::geometric(s).unwrap()),
        (0usize..6).prop_map(RadialSymbol::indicator),
        (0.1f64..0.8, 0usize..6).prop_map(|(r, n)| RadialSymbol::truncated_geometric(r, n).unwrap()),
        (complex(1.0), measure()).prop_map(|(c, m)| RadialSymbol::from_measure(c, m).unwrap()),
    ]
}

fn small_space() -> impl Strategy<Value = Arc<FockSpace>> {
    (prop::collection::vec(1usize..3, 2..4), 1usize..4).prop_map(|(dims, n)| build_space(FockSpec::new(dims, n)).unwrap())
}

fn vector() -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(complex(1.0), 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn psi_split_recovers_symbol(sym in any_symbol()) {
        let c = sym.tail_constant();
        for n in 0..20 {
            let sum = sym.psi1(n, TOL).unwrap() + sym.psi2(n, TOL).unwrap() + c;
            prop_assert!((sum - sym.eval(n)).norm() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn psi1_second_difference(sym in any_symbol()) {
        for n in 0..20 {
            let lhs = sym.psi1(n, TOL).unwrap() - sym.psi1(n + 2, TOL).unwrap();
            prop_assert!((lhs - (sym.eval(n) - sym.eval(n + 1))).norm() < 1e-9);
        }
    }

    #[test]
    fn doubling_interleaves_zeros(sym in any_symbol()) {
        let d = symbol::double_parity(&sym, DoublingOptions::default());
        let zero = C64::new(0.0, 0.0);
        for n in 0..d.source_len.min(40) {
            prop_assert_eq!(d.values[2 * n], sym.eval(n));
            prop_assert_eq!(d.values[2 * n + 1], zero);
        }
        let (c1, c2) = d.cprime_constants();
        prop_assert!((c1 - sym.tail_constant() / 2.0).norm() < 1e-15 && (c1 - c2).norm() < 1e-15);
    }

    #[test]
    fn norm_dominates_sup_and_variation(sym in any_symbol()) {
        let report = c_norm(&sym, TOL).unwrap();
        let sup = (0..64).map(|n| sym.eval(n).norm()).fold(0.0, f64::max);
        prop_assert!(sup <= report.total + 1e-9);
        // |diagonal entries| sum to at most the trace norm
        let variation: f64 = (0..2 * report.truncation - 1).map(|n| (sym.eval(n) - sym.eval(n + 1)).norm()).sum();
        prop_assert!(variation <= report.trace_norm_h + report.trace_norm_k + 1e-8);
    }

    #[test]
    fn trace_norm_grows_with_truncation(sym in finite_symbol(), m in 1usize..10) {
        let small = hankel::trace_norm(&hankel::hankel_h(&sym, m)).unwrap();
        let large = hankel::trace_norm(&hankel::hankel_h(&sym, m + 1)).unwrap();
        prop_assert!(small <= large + 1e-10);
    }

    #[test]
    fn rank_one_decomposition_reconstructs(sym in any_symbol(), m in 1usize..12) {
        let h = hankel::hankel_h(&sym, m);
        let d = hankel::rank_one_decompose(&h, 1e-14).unwrap();
        prop_assert!((d.reconstruct(m, m) - &h).iter().all(|z| z.norm() < 1e-10));
        prop_assert!((d.nuclear_sum - hankel::trace_norm(&h).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn creation_operators_are_partial_isometries(space in small_space()) {
        for &letter in space.letters() {
            let l = fock::creation(&space, letter).unwrap();
            let ll = l.adjoint().compose(&l);
            prop_assert!(ll.compose(&ll).max_abs_diff(&ll) < 1e-15);
            let r = fock::right_creation(&space, letter).unwrap();
            let rr = r.adjoint().compose(&r);
            prop_assert!(rr.compose(&rr).max_abs_diff(&rr) < 1e-15);
        }
    }

    #[test]
    fn factor_projections_sum_to_tail(space in small_space()) {
        let mut sum = fock::zero(&space);
        for i in 0..space.num_factors() {
            sum = sum.plus(&fock::factor_end_projection(&space, i).unwrap());
        }
        prop_assert!(sum.max_abs_diff(&fock::tail_projection(&space, 1)) < 1e-15);
    }

    #[test]
    fn eps_is_idempotent(space in small_space(), seed in 0u64..1000) {
        let dim = space.dim();
        let a = fock::word_operator(&space, space.word(seed as usize % dim), space.word((seed as usize * 7 + 3) % dim))
            .unwrap()
            .plus(&fock::identity(&space).scale(C64::new(0.5, -0.25)));
        let once = fock::eps(&a);
        prop_assert!(fock::eps(&once).max_abs_diff(&once) < 1e-15);
    }

    #[test]
    fn kraus_row_sum_is_scaled_identity(space in small_space(), x in vector(), second in any::<bool>()) {
        let variant = if second { Variant::Second } else { Variant::First };
        let sum = kraus::row_sum(&space, &x, variant).unwrap();
        let expected = fock::identity(&space).scale(C64::new(kraus::row_identity_scale(&x), 0.0));
        prop_assert!(sum.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn membership_bound_holds(m in measure(), c in complex(1.0)) {
        let report = integral::verify_membership_bound(c, &m, TOL).unwrap();
        prop_assert!(report.holds, "{} > {}", report.lhs, report.rhs);
        let sym = RadialSymbol::from_measure(c, m.clone()).unwrap();
        for n in 0..30 {
            prop_assert!((integral::eval_measure(c, &m, n) - sym.eval(n)).norm() < 1e-14);
        }
    }

    #[test]
    fn json_roundtrips(sym in any_symbol(), m in measure(), dims in prop::collection::vec(1usize..5, 2..4), n in 0usize..6) {
        let back: RadialSymbol = serde_json::from_str(&serde_json::to_string(&sym).unwrap()).unwrap();
        prop_assert_eq!(back, sym);
        let back: DiscreteMeasure = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        prop_assert_eq!(back, m);
        let spec = FockSpec::new(dims, n);
        let back: FockSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        prop_assert_eq!(back, spec);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn word_operators_are_eigenvectors(sym in any_symbol(), space in small_space()) {
        let plan = multiplier::build_plan(&sym, TOL, None).unwrap();
        for component in [Component::Full, Component::T1, Component::T2] {
            let opts = EigenOptions { component, ..EigenOptions::new(space.max_len(), TOL) };
            let report = multiplier::verify_eigenaction(&plan, &space, &opts).unwrap();
            prop_assert!(report.worst_residual < 1e-9, "{component:?}: {}", report.worst_residual);
        }
    }

    #[test]
    fn case1_eigenvalue_splits(sym in any_symbol(), k in 0usize..8, l in 0usize..8) {
        let full = multiplier::expected_eigenvalue(&sym, k, l, Case::Case1, Component::Full, TOL).unwrap();
        let t1 = multiplier::expected_eigenvalue(&sym, k, l, Case::Case1, Component::T1, TOL).unwrap();
        let t2 = multiplier::expected_eigenvalue(&sym, k, l, Case::Case1, Component::T2, TOL).unwrap();
        prop_assert!((t1 + t2 + sym.tail_constant() - full).norm() < 1e-9);
    }

    #[test]
    fn ucp_maps_are_positive(space in small_space(), seed in 0u64..1000, z in complex(1.0), second in any::<bool>()) {
        let dim = space.dim();
        let a = fock::word_operator(&space, space.word(seed as usize % dim), space.word((seed as usize * 5 + 1) % dim))
            .unwrap()
            .plus(&fock::identity(&space).scale(z));
        let ata = a.adjoint().compose(&a);
        let variant = if second { Variant::Second } else { Variant::First };
        let pi = ucp::ucp_pi_apply(&space, space.max_len() + 1, variant, &ata).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert!(pi.min_quadratic_form(&mut rng, 20) >= -1e-12);
    }
}
