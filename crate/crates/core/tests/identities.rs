use std::collections::BTreeSet;
use std::fs;

use etaquot::etaq::{cusp_context, expansion_at_cusp, ord_t_at_cusp, CuspContext, PartitionSpec};
use etaquot::exact::Rational;
use etaquot::identities::*;
use etaquot::partitions::{count_ps_signed, x_combined};
use etaquot::Error;
use num_integer::Integer;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec(delta: u64, parts: &[u64]) -> PartitionSpec {
    PartitionSpec::new(delta, parts.iter().copied()).unwrap()
}

const MOD24: &str = "delta=24 s1=1,5,7,9 s2=1,7,9,11 scale=4 eta_scale=24 eta_power=7 sieve_mod=24 sieve_res=20 level=576";

fn with_residue(res: u64) -> SturmConfig {
    let mut c: SturmConfig = MOD24.parse().unwrap();
    c.sieve_res = res;
    c
}

#[test]
fn problem_examples() {
    let p = build_problem(&spec(24, &[1, 5, 7, 9]), &spec(24, &[1, 7, 9, 11]), &[13]).unwrap();
    assert_eq!((p.h, p.v, p.delta_scaled), (1, 4, 96));
    // n ≡ 13 ↦ 4·13 + 4·(−3/4) = 49
    assert_eq!(p.residues_scaled, vec![49]);
    assert_eq!(gamma_level(&p), 9216);

    let q = build_problem(&spec(30, &[1, 7, 9, 11]), &spec(30, &[1, 9, 11, 13]), &[0]).unwrap();
    assert_eq!((q.h, q.v, q.delta_scaled), (1, 5, 150));
    assert_eq!(gamma_level(&q), 22500);

    let s = spec(24, &[1, 5, 7, 9]);
    let same = build_problem(&s, &s, &[3]).unwrap();
    assert_eq!(same.h, 0);
    assert_eq!(level_formula(24, 12, 12), 576);
}

#[test]
fn non_integral_shift_is_rejected_with_value() {
    let err = build_problem(&spec(24, &[1]), &spec(24, &[1, 5]), &[0]).unwrap_err();
    match err {
        Error::NotIntegral { what, value } => {
            assert_eq!(what, "H");
            let h = spec(24, &[1]).ord() - spec(24, &[1, 5]).ord();
            assert_eq!(value, h.to_string());
        }
        e => panic!("unexpected {e:?}"),
    }
}

#[test]
fn problem_config_round_trip() {
    let c: ProblemConfig = "delta=24 s1=1,5,7,9 s2=1,7,9,11 r=13 mod=24".parse().unwrap();
    assert_eq!(c.to_string(), "delta=24 s1=1,5,7,9 s2=1,7,9,11 r=13 mod=24");
    assert_eq!(c.to_string().parse::<ProblemConfig>().unwrap(), c);
    let p = c.problem().unwrap();
    assert_eq!(p.residues, vec![13]);
    let coarse: ProblemConfig = "delta=24 s1=1,5,7,9 s2=1,7,9,11 r=1 mod=6".parse().unwrap();
    assert_eq!(coarse.problem().unwrap().residues, vec![1, 7, 13, 19]);
    assert!("delta=24 s1=1 s2=1 r=1 colour=red".parse::<ProblemConfig>().is_err());
    assert!("delta=24 s1=1 s2=1 r=30".parse::<ProblemConfig>().is_err());
    assert!("delta=24 s1=1 s2=1 r=1 mod=5".parse::<ProblemConfig>().unwrap().problem().is_err());
}

#[test]
fn sturm_config_round_trip() {
    let c: SturmConfig = MOD24.parse().unwrap();
    assert_eq!(c.to_string(), MOD24);
    assert_eq!(c.weight(), Rational::new(7, 2));
    assert_eq!(c.bound().unwrap(), 64512);
    let commented = format!("# mod 24\n{}\n", MOD24.replace(' ', "\n"));
    assert_eq!(commented.parse::<SturmConfig>().unwrap(), c);
    assert!(MOD24.replace("level=576", "").parse::<SturmConfig>().is_err());
    assert!(format!("{MOD24} extra=1").parse::<SturmConfig>().is_err());
}

#[test]
fn group_index_and_sturm_bound_examples() {
    assert_eq!(index_gamma1(576), 221184);
    assert_eq!(index_gamma1(900), 518400);
    assert_eq!(index_gamma1(1), 1);
    assert_eq!(sturm_bound(576, &Rational::new(7, 2)).unwrap(), 64512);
    assert_eq!(sturm_bound(900, &Rational::from(8)).unwrap(), 345600);
    assert_eq!(sturm_bound(37, &Rational::zero()).unwrap(), 0);
    assert!(sturm_bound(5, &Rational::from(-1)).is_err());
}

proptest! {
    #[test]
    fn sturm_bound_is_monotone(n in 1u64..2000, k in 0i64..40, dn in 1u64..50, dk in 1i64..10) {
        let w = Rational::new(k, 2);
        let b = sturm_bound(n, &w).unwrap();
        prop_assert!(sturm_bound(n, &Rational::new(k + dk, 2)).unwrap() >= b);
        prop_assert!(sturm_bound(n * dn, &w).unwrap() >= b);
    }

    #[test]
    fn index_is_multiplicative(a in 1u64..300, b in 1u64..300) {
        prop_assume!(a.gcd(&b) == 1);
        prop_assert_eq!(index_gamma1(a * b), index_gamma1(a) * index_gamma1(b));
    }
}

#[test]
fn cusp_count_examples() {
    assert_eq!(cusp_representatives(576).len(), 1152);
    assert_eq!(cusp_representatives(900).len(), 2240);
    assert_eq!(cusp_representatives(1), vec![(1, 0)]);
    assert_eq!(cusp_representatives(4).len(), 3);
}

#[test]
fn cusp_count_matches_divisor_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut levels: BTreeSet<u64> = [5, 6, 12, 24, 96, 576, 784, 900].into_iter().collect();
    while levels.len() < 20 {
        levels.insert(rng.gen_range(5..=1000));
    }
    for n in levels {
        assert_eq!(cusp_representatives(n).len() as u64, cusp_count_formula(n), "N = {n}");
    }
}

#[test]
fn cusp_representatives_are_inequivalent_and_complete() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [1u64, 2, 3, 4, 5, 8, 12, 18, 30, 49, 60, 97] {
        let reps = cusp_representatives(n);
        for (i, x) in reps.iter().enumerate() {
            assert_eq!(x.0.gcd(&x.1), 1);
            for y in &reps[i + 1..] {
                assert!(!cusps_equivalent(n, *x, *y), "N = {n}: {x:?} ~ {y:?}");
            }
        }
        for _ in 0..200 {
            let c = rng.gen_range(0..=n as i64);
            let a = rng.gen_range(-200..200i64);
            if a.gcd(&c) != 1 {
                continue;
            }
            let hits = reps
                .iter()
                .filter(|r| cusps_equivalent(n, (a, c), **r))
                .count();
            assert_eq!(hits, 1, "N = {n}, cusp ({a}, {c})");
        }
    }
}

#[test]
fn cusp_order_is_ascending_c_then_a() {
    let n = 60;
    let key = |&(a, c): &(i64, i64)| (c.rem_euclid(n), a);
    let reps = cusp_representatives(n as u64);
    assert!(reps.windows(2).all(|w| key(&w[0]) <= key(&w[1])) || reps[0] == (1, 0));
    let finite: Vec<_> = reps.iter().filter(|r| r.1 != 0 && r.1 != n).collect();
    assert!(finite.windows(2).all(|w| key(w[0]) < key(w[1])));
}

fn mod24_problem(r: u64) -> IdentityProblem {
    build_problem(&spec(24, &[1, 5, 7, 9]), &spec(24, &[1, 7, 9, 11]), &[r]).unwrap()
}

#[test]
fn principal_exponents_at_zero_rederived_from_expansions() {
    let p = mod24_problem(13);
    let ctx = cusp_context(0, 1, p.delta_scaled).unwrap();
    let set = principal_exponent_set(&p, &ctx);
    let mut scanned = BTreeSet::new();
    let mut total = 0usize;
    for s in [&p.spec1_scaled, &p.spec2_scaled] {
        for t in 0..p.delta_scaled as i64 {
            let e = expansion_at_cusp(s, &ctx, t, 1).unwrap();
            let mut n = 0u64;
            loop {
                let m = &e.order + &e.step * Rational::from(n);
                if !m.is_negative() {
                    break;
                }
                scanned.insert(m);
                n += 1;
                total += 1;
            }
        }
    }
    assert!(!set.is_empty());
    assert_eq!(set, scanned);
    assert!(set.len() <= total);
}

#[test]
fn principal_exponents_empty_when_orders_nonnegative() {
    let p = mod24_problem(13);
    let inf = cusp_context(1, 0, p.delta_scaled).unwrap();
    let all_nonneg = [&p.spec1_scaled, &p.spec2_scaled].iter().all(|s| {
        (0..p.delta_scaled as i64).all(|t| !ord_t_at_cusp(s, &inf, t).is_negative())
    });
    assert_eq!(principal_exponent_set(&p, &inf).is_empty(), all_nonneg);
    // at infinity F_{S'}^{(t)} starts at v·ord_S = 1 and -3
    assert!(principal_exponent_set(&p, &inf).contains(&Rational::from(-3)));
}

#[test]
fn identical_specs_are_suited() {
    let s = spec(7, &[1, 2, 3]);
    let p = build_problem(&s, &s, &[0, 3, 5]).unwrap();
    let cert = check_suited(&p, None).unwrap();
    assert_eq!(cert.verdict, Verdict::Suited);
    assert_eq!(cert.parameters["level"], gamma_level(&p));
    assert_eq!(dp_scan(&p, 2000), None);
}

fn delta14(s1: &[u64], s2: &[u64], r: &[u64]) -> IdentityProblem {
    build_problem(&spec(14, s1), &spec(14, s2), r).unwrap()
}

#[test]
fn not_suited_problems_carry_rechecked_witnesses() {
    for (s1, s2, r) in [
        (&[1, 2, 3][..], &[1, 4, 5][..], &[0u64][..]),
        (&[1, 2, 3], &[1, 4, 5], &[2]),
        (&[1, 4, 5], &[3, 5, 6], &[3]),
    ] {
        let p = delta14(s1, s2, r);
        let cert = check_suited(&p, None).unwrap();
        assert_eq!(cert.verdict, Verdict::NotSuited, "{s1:?} {s2:?} {r:?}");
        assert_eq!(cert.witnesses.len(), 1);
        assert!(recheck_cusp_witness(&p, &cert.witnesses[0]).unwrap());
        assert!(dp_scan(&p, 2000).is_some());
    }
}

#[test]
fn suited_problem_has_no_dp_mismatch() {
    let p = delta14(&[1, 2, 3], &[1, 4, 5], &[1]);
    assert_eq!(check_suited(&p, None).unwrap().verdict, Verdict::Suited);
    assert_eq!(dp_scan(&p, 2000), None);
}

#[test]
fn cusp_verdicts_do_not_depend_on_the_completion() {
    for r in [1u64, 2] {
        let p = delta14(&[1, 2, 3], &[1, 4, 5], &[r]);
        let dp = p.delta_scaled;
        let res = &p.residues_scaled;
        let mut disagreements = 0;
        let mut cusps: Vec<(i64, i64)> =
            cusp_representatives(gamma_level(&p)).into_iter().filter(|x| x.1 != 0).take(30).collect();
        if let Some(Witness::Cusp { a, c, .. }) = check_suited(&p, None).unwrap().witnesses.first() {
            cusps.push((*a, *c));
        }
        for (a, c) in cusps {
            let base = cusp_context(a, c, dp).unwrap();
            let mut ms = principal_exponent_set(&p, &base);
            ms.insert(Rational::zero());
            let verdicts = |ctx: &CuspContext| -> Vec<bool> {
                ms.iter()
                    .map(|m| {
                        x_combined(&p.spec1_scaled, res, ctx, m).unwrap()
                            == x_combined(&p.spec2_scaled, res, ctx, m).unwrap()
                    })
                    .collect()
            };
            let want = verdicts(&base);
            disagreements += want.iter().filter(|&&v| !v).count();
            for (j, k) in [(1, 0), (0, 1), (-2, 3)] {
                let alt = CuspContext::with_choice(a, c, dp, j, k).unwrap();
                assert_eq!(principal_exponent_set(&p, &alt), principal_exponent_set(&p, &base));
                assert_eq!(verdicts(&alt), want, "r={r} cusp {a}/{c} choice ({j}, {k})");
            }
        }
        assert_eq!(disagreements > 0, r == 2);
    }
}

#[test]
fn forged_witness_fails_recheck() {
    let p = delta14(&[1, 2, 3], &[1, 4, 5], &[2]);
    let cert = check_suited(&p, None).unwrap();
    let Witness::Cusp { a, c, m, x1, .. } = cert.witnesses[0].clone() else {
        panic!("cusp witness expected");
    };
    let forged = Witness::Cusp {
        a,
        c,
        m,
        x1: x1.clone(),
        x2: x1,
    };
    assert!(!recheck_cusp_witness(&p, &forged).unwrap());
}

#[test]
fn suited_checkpoint_resumes_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let p = delta14(&[1, 2, 3], &[1, 4, 5], &[1]);
    let cusps: Vec<_> = cusp_representatives(gamma_level(&p)).into_iter().take(80).collect();
    let cp = CheckpointSpec {
        dir: dir.path().to_path_buf(),
        config_text: "delta=14 s1=1,2,3 s2=1,4,5 r=1 mod=14".into(),
    };
    let cert = check_suited_with(&p, Some(&cusps), Some(&cp)).unwrap();
    assert_eq!(cert.verdict, Verdict::Suited);
    assert!(Checkpoint::load(&cp.dir, "suited", &cp.config_text).unwrap().is_none());

    Checkpoint::new("suited", &cp.config_text, 64, String::new())
        .save(&cp.dir, &cp.config_text)
        .unwrap();
    let resumed = check_suited_with(&p, Some(&cusps), Some(&cp)).unwrap();
    assert_eq!(resumed.verdict, Verdict::Suited);

    let mut bad = Checkpoint::new("suited", &cp.config_text, 64, String::new());
    bad.progress = 70;
    bad.save(&cp.dir, &cp.config_text).unwrap();
    assert!(matches!(
        check_suited_with(&p, Some(&cusps), Some(&cp)),
        Err(Error::Checkpoint(_))
    ));
}

#[test]
fn sturm_mod24_is_proved_and_symmetric() {
    let c: SturmConfig = MOD24.parse().unwrap();
    let cert = verify_identity_sturm(&c).unwrap();
    assert_eq!(cert.verdict, Verdict::Proved);
    assert_eq!(cert.parameters["bound"], 64512);
    let swapped = verify_identity_sturm(&c.swapped()).unwrap();
    assert_eq!(swapped.verdict, cert.verdict);
}

#[test]
fn corrupted_sturm_config_is_refuted_with_witness() {
    let c = with_residue(4);
    let cert = verify_identity_sturm(&c).unwrap();
    assert_eq!(cert.verdict, Verdict::Refuted);
    let w = &cert.witnesses[0];
    assert!(recheck_coefficient_witness(&c, w).unwrap());
    let Witness::Coefficient { index, .. } = w else { panic!() };
    assert_eq!(*index, 4);
    let swapped = verify_identity_sturm(&c.swapped()).unwrap();
    assert_eq!(swapped.verdict, Verdict::Refuted);
}

#[test]
fn residue_19_sieves_to_zero() {
    let c = with_residue(19);
    let (s1, _) = c.specs().unwrap();
    let f = hatted_series(&c, &s1, 1000).unwrap();
    assert!(f.is_zero());
    assert_eq!(verify_identity_sturm(&c).unwrap().verdict, Verdict::Proved);
}

#[test]
fn hatted_series_match_direct_coefficients() {
    let c: SturmConfig = MOD24.parse().unwrap();
    let (s1, s2) = c.specs().unwrap();
    for s in [&s1, &s2] {
        let f = hatted_series(&c, s, 400).unwrap();
        for i in [0i64, 8, 20, 44, 68, 164, 380, 400] {
            assert_eq!(f.coeff_at(i).unwrap(), hatted_coefficient(&c, s, i).unwrap(), "q^{i}");
        }
    }
}

#[test]
fn sturm_pole_is_rejected_before_comparison() {
    let mut c: SturmConfig = MOD24.parse().unwrap();
    c.eta_power = 0;
    c.eta_scale = 24;
    c.sieve_res = 13;
    let err = verify_identity_sturm(&c).unwrap_err();
    assert!(matches!(err, Error::InvalidArgument(ref m) if m.contains("pole")), "{err}");
}

#[test]
fn sturm_checkpoint_digest_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let c: SturmConfig = MOD24.parse().unwrap();
    let cp = CheckpointSpec {
        dir: dir.path().to_path_buf(),
        config_text: c.to_string(),
    };
    Checkpoint::new("sturm", &cp.config_text, COEFFICIENT_BLOCK as u64, "0".repeat(64))
        .save(&cp.dir, &cp.config_text)
        .unwrap();
    assert!(matches!(
        verify_identity_sturm_with(&c, Some(&cp)),
        Err(Error::Checkpoint(_))
    ));
    Checkpoint::remove(&cp.dir, "sturm", &cp.config_text).unwrap();
    let cert = verify_identity_sturm_with(&c, Some(&cp)).unwrap();
    assert_eq!(cert.verdict, Verdict::Proved);
    assert!(Checkpoint::load(&cp.dir, "sturm", &cp.config_text).unwrap().is_none());
}

#[test]
fn counterexample_search_examples() {
    let s5 = spec(24, &[1, 5, 7, 9]);
    let s11 = spec(24, &[1, 7, 9, 11]);
    let even = Progression::new(6, [0, 2]).unwrap();
    let ce = find_counterexample(&s5, &s11, &even, DEFAULT_SEARCH_BOUND)
        .unwrap()
        .expect("a counterexample exists");
    assert!(even.contains(ce.n));
    let n = ce.n as i64;
    assert_eq!(count_ps_signed(&s5, n - 1), ce.left.clone().into());
    assert_eq!(count_ps_signed(&s11, n), ce.right.clone().into());
    assert_ne!(ce.left, ce.right);
    for res in [vec![4], vec![1, 3, 5]] {
        let p = Progression::new(6, res).unwrap();
        assert_eq!(find_counterexample(&s5, &s11, &p, 10_000).unwrap(), None);
    }
    assert!(Progression::new(6, [6]).is_err());
}

#[test]
fn alternate_identity_examples() {
    assert_eq!(alt_identity_check(0).unwrap().verdict, Verdict::Proved);
    assert_eq!(alt_identity_check(5).unwrap().verdict, Verdict::Proved);
    assert_eq!(alt_identity_check(10_000).unwrap().verdict, Verdict::Proved);
}

#[test]
fn certificates_persist_under_config_digest() {
    let dir = tempfile::tempdir().unwrap();
    let cert = Certificate::new(
        Verdict::Refuted,
        vec![Witness::Coefficient {
            index: 4,
            left: "0".into(),
            right: "1".into(),
        }],
        serde_json::json!({ "bound": 10 }),
    );
    let path = persist_certificate(dir.path(), "delta=1", &cert).unwrap();
    assert_eq!(
        path.file_name().unwrap().to_str().unwrap(),
        format!("{}.json", sha256_hex(b"delta=1"))
    );
    let back: Certificate = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(back, cert);
    let text = serde_json::to_string(&cert).unwrap();
    assert!(!text.contains("runtime"));
    assert!(text.contains("\"verdict\":\"refuted\""));
}
