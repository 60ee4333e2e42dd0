mod common;

use common::*;
use ewlab::function_model::{AdditiveFunctionSpec, Family};
use ewlab::functionals::{beta_ba, remark_params_thm12, select_params_thm12, section1_params_thm13, thm12_bound, thm13_bound, trivial_concentration, ConstantsLedger, FunctionalTable};
use ewlab::harness::{convergence_sweep, levelset_consistency, ContinuousCdf, SweepConfig, SweepMode};
use ewlab::limit_law::{atomic_law, CharacteristicFunction, EulerProductCf, GaussianCf, GridOptions, InvertedLaw};
use ewlab::sieve::{build_sieve, DEFAULT_SEGMENT};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

fn families() -> Vec<AdditiveFunctionSpec> {
    vec![
        AdditiveFunctionSpec::log_pow(2.0),
        AdditiveFunctionSpec::log_pow(0.5),
        AdditiveFunctionSpec::p_pow(1.0),
        AdditiveFunctionSpec::dyadic_log(2.0),
        AdditiveFunctionSpec::dyadic_pow(1.0),
        AdditiveFunctionSpec::euler_ratio(),
        AdditiveFunctionSpec::sigma_ratio(),
        AdditiveFunctionSpec::zero(),
    ]
}

fn spec_strategy() -> impl Strategy<Value = AdditiveFunctionSpec> {
    (0..families().len()).prop_map(|i| families()[i].clone())
}

#[test]
fn h_is_multiplicative_on_coprime_pairs() {
    let odd = AdditiveFunctionSpec::zero().with_strong(false).unwrap().with_override(2, 2, 3.0).unwrap().with_override(3, 1, -1.0).unwrap();
    for spec in [AdditiveFunctionSpec::p_pow(1.0), AdditiveFunctionSpec::sigma_ratio(), AdditiveFunctionSpec::log_pow(2.0).truncated(10.0).unwrap(), odd] {
        h_multiplicative(&spec, 1000).unwrap();
    }
}

#[test]
fn zero_classifies_with_zero_sums() {
    let c = ewlab::function_model::classify(&AdditiveFunctionSpec::zero(), 100_000).unwrap();
    assert_eq!((c.square_sum, c.mean_sum, c.support_sum), (0.0, 0.0, 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncation_is_idempotent(spec in spec_strategy(), r in 3.0f64..1e4, extra in 1.0f64..100.0) {
        truncation_laws(&spec, r, r * extra, 2000).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn companion_series_meet_their_tolerance(spec in spec_strategy(), idx in 0usize..200, exp in 3i32..14) {
        let p = ewlab::primes::primes_up_to(2000)[idx];
        companions_tail(&spec, p, 10f64.powi(-exp)).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sieve_tables_obey_counting_laws(spec in spec_strategy(), x in 16u64..30_000) {
        let t = build_sieve(&spec, x, DEFAULT_SEGMENT).unwrap();
        table_laws(&t).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn segment_size_is_invisible(spec in spec_strategy(), x in 100u64..50_000, s1 in 16u64..5000, s2 in 16u64..5000) {
        segment_invariance(&spec, x, s1, s2).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn distance_matches_brute_force(seed in any::<u64>(), n in 1usize..400, m in 1usize..400) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sample = random_sample(&mut rng, n, 12);
        let reference = ewlab::sieve::EmpiricalCdf::from_values(random_sample(&mut rng, m, 12)).unwrap();
        distance_agrees(sample.clone(), &reference).map_err(TestCaseError::fail)?;
        let normal = Normal::new(1.0, 1.0).unwrap();
        distance_agrees(sample, &ContinuousCdf(|y: f64| normal.cdf(y))).map_err(TestCaseError::fail)?;
    }
}

#[test]
fn small_tables_match_trial_division() {
    for kind in [Naive::LogPow(2.0), Naive::PPow(1.0), Naive::DyadicLog(2.0), Naive::SigmaRatio] {
        compare_with_naive(kind, 1000, 64).unwrap();
    }
}

#[test]
fn characteristic_functions_are_hermitian() {
    for spec in families() {
        let cf = EulerProductCf::limit(&spec, 10_000).unwrap();
        assert_eq!(cf.eval(0.0), num_complex::Complex64::new(1.0, 0.0));
        for j in 1..=200 {
            let tau = j as f64 * 0.37;
            assert!((cf.eval(-tau) - cf.eval(tau).conj()).norm() < 1e-12);
        }
    }
}

#[test]
fn atomic_mass_grows_with_the_budgets() {
    let spec = AdditiveFunctionSpec::dyadic_log(2.0);
    let mut prev = 0.0;
    for (p, m) in [(10_000, 1000), (20_000, 2000), (40_000, 4000), (80_000, 8000)] {
        let law = atomic_law(&spec, 0.5, p, m).unwrap();
        assert!(law.mass >= prev);
        assert!(law.deficit <= law.deficit_bound * (1.0 + 1e-12) + 1e-15);
        prev = law.mass;
    }
}

#[test]
fn inverted_laws_are_monotone_within_their_error() {
    let cf = EulerProductCf::limit(&AdditiveFunctionSpec::log_pow(2.0), 100_000).unwrap();
    let law = InvertedLaw::build(&cf, GridOptions::new(2000.0, 0.0, 6.0)).unwrap();
    let err = law.pointwise_error();
    let mut prev = f64::NEG_INFINITY;
    for j in 0..1000 {
        let f = law.cdf(j as f64 * 6.0 / 999.0);
        assert!(f >= prev - 2.0 * err);
        prev = prev.max(f);
    }
    let g = InvertedLaw::build(&GaussianCf { mean: 0.0, sd: 1.0 }, GridOptions::new(40.0, -5.0, 5.0)).unwrap();
    let normal = Normal::new(0.0, 1.0).unwrap();
    for y in [-2.0, -0.3, 0.0, 1.7] {
        assert!((g.cdf(y) - normal.cdf(y)).abs() < 2.0 * g.error_bound() + 1e-6);
    }
}

#[test]
fn eta_dominates_directly_summed_tails() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for spec in [AdditiveFunctionSpec::log_pow(2.0), AdditiveFunctionSpec::p_pow(1.0), AdditiveFunctionSpec::dyadic_log(2.0), AdditiveFunctionSpec::euler_ratio()] {
        let table = FunctionalTable::new(&spec, 100_000).unwrap();
        for _ in 0..20 {
            let y = 10f64.powf(rng.gen_range(0.5..4.5));
            eta_majorant(&table, y, 100_000).unwrap();
        }
    }
}

#[test]
fn b_squared_matches_the_prime_power_sum() {
    for spec in [AdditiveFunctionSpec::log_pow(2.0), AdditiveFunctionSpec::sigma_ratio(), AdditiveFunctionSpec::p_pow(0.5)] {
        let table = FunctionalTable::new(&spec, 100_000).unwrap();
        for v in [2.0, 10.0, 1000.0, 99_999.0] {
            b_squared_direct(&table, v).unwrap();
        }
    }
}

#[test]
fn beta_at_its_symbolic_points() {
    assert!((beta_ba(0.5, 1.0) - 1.0).abs() < 1e-15);
    assert!((beta_ba(0.3, 0.6) - 1.0).abs() < 1e-15);
    assert!(beta_ba(0.5, 1e6) < 1e-3);
}

#[test]
fn feasibility_flags_follow_the_constraints() {
    let c = ConstantsLedger::default();
    for spec in [AdditiveFunctionSpec::log_pow(2.0), AdditiveFunctionSpec::p_pow(1.0)] {
        let table = FunctionalTable::new(&spec, 1_000_000).unwrap();
        for x in [1e4, 1e6, 1e8, 1e20] {
            let s = select_params_thm12(&table, x, &trivial_concentration, &c).unwrap();
            let holds = s.first_lhs <= s.first_rhs && s.second_lhs <= s.second_rhs && s.eps > 1.0 / x.ln().sqrt() && x.powf(s.eps) >= s.r;
            assert_eq!(s.feasible, holds, "x = {x}");
            assert!(s.bound.is_finite() && s.bound > 0.0);
        }
    }
}

#[test]
fn explicit_bounds_do_not_grow_with_x() {
    let c = ConstantsLedger::default();
    let table = FunctionalTable::new(&AdditiveFunctionSpec::log_pow(2.0), 1_000_000).unwrap();
    let fam = Family::LogPow { xi: 2.0 };
    let (mut prev12, mut prev13) = (f64::INFINITY, f64::INFINITY);
    for x in [1e5, 1e6, 1e7, 1e8, 1e10] {
        let (eps, r, t) = remark_params_thm12(fam, x, &c).unwrap();
        let b = thm12_bound(&table, x, eps, r, t, &trivial_concentration, &c).unwrap().bound;
        assert!(b <= 1.2 * prev12, "bound at x = {x}");
        prev12 = b;
        let k = x.ln().ln().round() as u32;
        let (v, r, t) = section1_params_thm13(fam, x).unwrap();
        let frak = thm13_bound(&table, x, k, v, t, r, &trivial_concentration, &c).unwrap().frak_r;
        assert!(frak <= 1.2 * prev13, "remainder at x = {x}");
        prev13 = frak;
    }
}

#[test]
fn dft_extraction_is_exact() {
    let c = ConstantsLedger::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let spec = AdditiveFunctionSpec::log_pow(2.0);
    let mut done = 0;
    while done < 20 {
        let x = rng.gen_range(1000..=100_000u64);
        let k = rng.gen_range(1..=4u32);
        let tau = rng.gen_range(-3.0..3.0);
        let t = build_sieve(&spec, x, DEFAULT_SEGMENT).unwrap();
        let Ok(res) = levelset_consistency(&t, k, tau, 100.0, 64, &c) else { continue };
        assert!(res.residual <= 1e-9 * (res.pi_k.max(1) as f64), "x = {x}, k = {k}, tau = {tau}: {}", res.residual);
        done += 1;
    }
}

#[test]
fn sweeps_are_deterministic_and_bounded() {
    let cfg = SweepConfig { p_cut: 100_000, m_cut: 100_000, ..SweepConfig::default() };
    let spec = AdditiveFunctionSpec::dyadic_log(2.0);
    let run = || {
        let rep = convergence_sweep(&spec, &[1000, 10_000, 100_000], SweepMode::Atomic, &cfg).unwrap();
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        (rep, buf)
    };
    let (rep, a) = run();
    let (_, b) = run();
    assert_eq!(a, b);
    for r in &rep.rows {
        assert!(r.distance <= 1.0 + r.guard);
        assert!(r.bound.is_finite() && r.bound > 0.0);
    }
}

#[test]
fn turan_kubilius_constant_is_stable() {
    let spec = AdditiveFunctionSpec::log_pow(2.0);
    let table = FunctionalTable::new(&spec, 100_000).unwrap();
    let taus = [0.1, 0.5, 1.0, 2.0];
    let r = 100.0;
    let at = |x: u64| {
        let t = build_sieve(&spec.truncated(r).unwrap(), x, DEFAULT_SEGMENT).unwrap();
        turan_kubilius_constant(&t, &table, r, &taus).unwrap()
    };
    let c6 = at(1_000_000);
    let c7 = at(10_000_000);
    assert!(c6 > 0.0 && (c7 / c6 - 1.0).abs() <= 0.5, "fitted {c6} at 1e6, {c7} at 1e7");
}
