//! Property tests for the structural invariants.

use num_traits::{One, Signed};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use curvespec::basic::{
    alpha_max, combo_spectrum, mu_delta_chain, ring_product, spec_basic, BasicType, ChainType,
    TypeCombo,
};
use curvespec::bounds::{g_condition, merge_sequences};
use curvespec::Error;
use curvespec::formulas::{spec_from_resolution, spp_from_resolution};
use curvespec::graph::{build_basic, build_chain, build_ordinary};
use curvespec::newton::{newton_mu, newton_window_count, NewtonDiagram};
use curvespec::rational::{rat, Rational};
use curvespec::recombination::{default_d_max, spectrum_to_basic};
use curvespec::spectrum::{
    forget_weights, is_symmetric, spec_ordinary, total_mass, window_count, Window,
};

fn basic_pq() -> impl Strategy<Value = (i64, i64)> {
    (0i64..=7, prop_oneof![Just(0i64), 2i64..=6]).prop_filter("not empty", |(p, q)| p + q > 0)
}

fn chain_parts() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0i64..=4, 1..=3).prop_filter("last part nonzero", |p| {
        p.last().is_some_and(|x| *x > 0)
    })
}

fn combo() -> impl Strategy<Value = TypeCombo> {
    prop::collection::vec((basic_pq(), -3i64..=3), 0..=3).prop_map(|terms| {
        let mut c = TypeCombo::new();
        for ((p, q), k) in terms {
            c.add(BasicType::new(p, q).unwrap(), k);
        }
        c
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_spectra_are_symmetric_and_integral(p in chain_parts()) {
        let g = build_chain(&p).unwrap();
        let s = spec_from_resolution(&g).unwrap();
        prop_assert!(is_symmetric(&s));
        prop_assert!(s.has_nonnegative_coefficients());
        let c = ChainType::new(p).unwrap();
        prop_assert_eq!(total_mass(&s), mu_delta_chain(&c).1);
    }

    #[test]
    fn forgetting_weights_recovers_the_spectrum(p in chain_parts()) {
        let g = build_chain(&p).unwrap();
        let spp = spp_from_resolution(&g).unwrap();
        prop_assert_eq!(forget_weights(&spp), spec_from_resolution(&g).unwrap());
    }

    #[test]
    fn basic_closed_form((p, q) in basic_pq()) {
        let s = spec_basic(p, q).unwrap();
        prop_assert_eq!(&s, &spec_from_resolution(&build_basic(p, q).unwrap()).unwrap());
        if let Some(top) = s.max_value() {
            prop_assert_eq!(top, &alpha_max(p, q).unwrap());
        }
    }

    #[test]
    fn solver_round_trip(c in combo()) {
        let s = combo_spectrum(&c).unwrap();
        let sol = spectrum_to_basic(&s, default_d_max(&s)).unwrap();
        prop_assert_eq!(combo_spectrum(&sol).unwrap(), s);
    }

    #[test]
    fn ring_laws(a in combo(), b in combo(), c in combo()) {
        prop_assert_eq!(ring_product(&a, &b), ring_product(&b, &a));
        prop_assert_eq!(
            ring_product(&ring_product(&a, &b), &c),
            ring_product(&a, &ring_product(&b, &c))
        );
        let mut bc = b.clone();
        bc.add_scaled(&c, 1);
        let mut ab_ac = ring_product(&a, &b);
        ab_ac.add_scaled(&ring_product(&a, &c), 1);
        prop_assert_eq!(ring_product(&a, &bc), ab_ac);
        prop_assert_eq!(ring_product(&a, &TypeCombo::unit()), a);
    }

    #[test]
    fn newton_count_decreases_in_alpha(m in 2i64..=9, n in 2usize..=3, a in 0i64..12, b in 0i64..12) {
        let d = NewtonDiagram::fermat(n, m).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        let c_lo = newton_window_count(&d, &rat(lo, 12)).unwrap();
        let c_hi = newton_window_count(&d, &rat(hi, 12)).unwrap();
        prop_assert!(c_hi <= c_lo);
    }

    #[test]
    fn newton_mu_grows_with_scale(m in 2i64..=6, t in 1i64..=4) {
        let d = NewtonDiagram::fermat(2, m).unwrap();
        prop_assert!(newton_mu(&d.scaled(t)).unwrap() <= newton_mu(&d.scaled(t + 1)).unwrap());
    }
}

/// The lattice count of the Fermat diagram equals the spectrum count of the ordinary point.
#[test]
fn newton_count_matches_ordinary_spectrum() {
    for m in 1..=10 {
        let d = NewtonDiagram::fermat(2, m).unwrap();
        let s = spec_ordinary(m);
        assert_eq!(newton_mu(&d).unwrap(), total_mass(&s), "mu of ord({m})");
        for num in 0..24 {
            let alpha = rat(num, 24);
            let w = Window::up_to(-alpha.clone()).unwrap();
            assert_eq!(
                newton_window_count(&d, &alpha).unwrap(),
                window_count(&s, &w),
                "ord({m}) at alpha {alpha}"
            );
        }
    }
    assert!(spec_from_resolution(&build_ordinary(3).unwrap()).unwrap() == spec_ordinary(3));
}

fn random_sequence(rng: &mut StdRng) -> Vec<Rational> {
    let den = rng.gen_range(2..=20);
    let k = rng.gen_range(1..=6);
    let mut v: Vec<Rational> = (0..k).map(|_| rat(rng.gen_range(1..den), den)).collect();
    v.sort();
    v.dedup();
    v
}

fn union(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut m: Vec<Rational> = a.iter().chain(b).cloned().collect();
    m.sort();
    m.dedup();
    m
}

/// A successful merge is a valid sequence; a refused one really breaks the condition.
#[test]
fn merging_checks_the_condition() {
    let mut rng = StdRng::seed_from_u64(7);
    let (mut tried, mut refused) = (0, 0);
    while tried < 10_000 {
        let a = random_sequence(&mut rng);
        let b = random_sequence(&mut rng);
        if !(g_condition(&a).unwrap() && g_condition(&b).unwrap()) {
            continue;
        }
        tried += 1;
        match merge_sequences(&a, &b) {
            Ok(m) => {
                assert_eq!(m, union(&a, &b));
                assert!(g_condition(&m).unwrap());
                assert!(m.iter().all(|x| x.is_positive() && *x < Rational::one()));
            }
            Err(Error::Verification(_)) => {
                assert!(!g_condition(&union(&a, &b)).unwrap());
                refused += 1;
            }
            Err(e) => panic!("{e}"),
        }
    }
    eprintln!("merged {tried} pairs, {refused} unions violate the condition");
}

/// Two even-length sequences whose union gets a middle term above 1/2.
#[test]
fn merging_can_break_the_middle_term() {
    let a = [rat(1, 8), rat(5, 8)];
    let b = [rat(1, 8), rat(3, 4)];
    assert!(g_condition(&a).unwrap() && g_condition(&b).unwrap());
    assert!(matches!(merge_sequences(&a, &b), Err(Error::Verification(_))));
}
