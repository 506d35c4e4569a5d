use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vsynth::dioph::{euler_representable, factor, solve_beta, two_squares, Effort};
use vsynth::exact::{evaluate, GateSet};
use vsynth::expr::{parse_epsilon, Expr};
use vsynth::oracle::Oracle;
use vsynth::ring::{DenominatorExponent, GaussianInteger};
use vsynth::synth::{synthesize, verify, SynthesisRequest};

fn theta_strategy() -> impl Strategy<Value = String> {
    prop_oneof![
        (-6.3f64..6.3).prop_map(|x| format!("{x:.12}")),
        (-64i32..64, 1u32..65).prop_map(|(a, b)| format!("{a}*pi/{b}")),
    ]
}

fn epsilon_strategy() -> impl Strategy<Value = String> {
    (-8.0f64..-0.31).prop_map(|e| format!("{:.3e}", 10f64.powf(e)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn results_are_sound_and_of_determinant_one_form(theta in theta_strategy(), eps in epsilon_strategy()) {
        let r = synthesize(&SynthesisRequest::parse(&theta, &eps).unwrap()).unwrap();
        let e = parse_epsilon(&eps).unwrap();
        let d = verify(&r.circuit, &theta.parse().unwrap(), 384).unwrap();
        prop_assert!(d.upper().to_rational() <= e);
        let u = &r.unitary;
        prop_assert_eq!(&evaluate(&r.circuit), u);
        prop_assert_eq!(&u.b, &-u.c.conj());
        prop_assert_eq!(&u.d, &u.a.conj());
        prop_assert_eq!(u.det_power_of_i(), Some(0));
        prop_assert_eq!(r.v_count, u.sqrt5_exponent());
    }

    #[test]
    fn pauli_mode_stays_in_pauli_v(theta in theta_strategy(), eps in epsilon_strategy()) {
        let req = SynthesisRequest::parse(&theta, &eps).unwrap().gate_set(GateSet::PauliV);
        let r = synthesize(&req).unwrap();
        prop_assert!(r.circuit.is_pauli_v());
        prop_assert_eq!(r.unitary.exp.l, 0);
        prop_assert!(r.circuit.to_string().split_whitespace().all(|g| !["H", "S", "Sd", "W"].contains(&g)));
    }

    #[test]
    fn v_count_is_monotone_in_epsilon(theta in theta_strategy(), e in -7.0f64..-0.5, step in 0.05f64..1.5) {
        let small = format!("{:.3e}", 10f64.powf(e));
        let large = format!("{:.3e}", 10f64.powf(e + step));
        let a = synthesize(&SynthesisRequest::parse(&theta, &small).unwrap()).unwrap();
        let b = synthesize(&SynthesisRequest::parse(&theta, &large).unwrap()).unwrap();
        prop_assert!(b.v_count <= a.v_count, "{} at {small}, {} at {large}", a.v_count, b.v_count);
    }

    #[test]
    fn two_squares_agrees_with_euler(n in 0u64..5_000_000) {
        let big = BigInt::from(n);
        let mut rng = ChaCha8Rng::seed_from_u64(n);
        let f = factor(&big, Effort::Complete, &mut rng).unwrap();
        prop_assert_eq!(f.product(), big.clone());
        let w = two_squares(&f, &mut rng).unwrap();
        prop_assert_eq!(w.is_some(), euler_representable(&f).unwrap());
        if let Some(b) = w {
            prop_assert_eq!(b.norm(), big);
        }
    }

    #[test]
    fn solved_betas_complete_the_column(re in -60i64..60, im in -60i64..60, k in 0u32..6, l in 0u32..3) {
        let alpha = GaussianInteger::new(re, im);
        let exp = DenominatorExponent::new(k, l);
        let n = exp.squared_denominator();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = solve_beta(&alpha, exp, &Effort::Complete, &mut rng);
        if alpha.norm() > n {
            prop_assert!(r.is_err());
        } else if let Ok(beta) = r.unwrap() {
            prop_assert_eq!(alpha.norm() + beta.norm(), n);
        }
    }
}

#[test]
fn identical_seeds_give_identical_circuits() {
    for effort in [Effort::FastPathOnly, Effort::Bounded(10_000), Effort::Complete] {
        let req = SynthesisRequest::parse("0.987654321", "1e-7").unwrap().effort(effort).seed(11);
        let a = synthesize(&req).unwrap();
        let b = synthesize(&req).unwrap();
        assert_eq!(a.circuit, b.circuit);
        assert_eq!(a.error_bound, b.error_bound);
    }
}

#[test]
fn epsilon_sweep_stays_under_the_prior_ceiling() {
    for e in 2..=10 {
        let eps = format!("1e-{e}");
        let r = synthesize(&SynthesisRequest::parse("pi/64", &eps).unwrap()).unwrap();
        let ceiling = 4.0 * (2.0 * 10f64.powi(e)).ln() / 5f64.ln();
        assert!(r.v_count as f64 <= ceiling, "ε={eps}: {}", r.v_count);
    }
}

#[test]
fn oracle_bounds_synthesis_and_is_monotone() {
    let oracle = Oracle::with_levels(4).unwrap();
    for theta in ["pi/16", "0.3", "-1.1", "2.5"] {
        let t: Expr = theta.parse().unwrap();
        let mut last = u32::MAX;
        for eps in ["0.06", "0.1", "0.2", "0.3", "0.5", "0.8"] {
            let e = parse_epsilon(eps).unwrap();
            let req = SynthesisRequest::new(t.clone(), e.clone()).effort(Effort::Complete);
            let r = synthesize(&req).unwrap();
            if let Some((k, w)) = oracle.min_vcount(&t, &e, 4).unwrap() {
                assert!(k <= r.v_count);
                if r.v_count <= 4 {
                    assert_eq!(k, r.v_count, "θ={theta} ε={eps}");
                }
                assert!(k <= last);
                last = k;
                assert!(verify(&w, &t, 256).unwrap().upper().to_rational() <= e);
            }
        }
    }
}

#[test]
fn pi_over_sixteen_matches_the_oracle() {
    let oracle = Oracle::with_levels(5).unwrap();
    let t: Expr = "pi/16".parse().unwrap();
    let e = parse_epsilon("0.2").unwrap();
    let (k, _) = oracle.min_vcount(&t, &e, 5).unwrap().unwrap();
    let r = synthesize(&SynthesisRequest::new(t, e).effort(Effort::Complete)).unwrap();
    assert_eq!(r.v_count, k);
}
