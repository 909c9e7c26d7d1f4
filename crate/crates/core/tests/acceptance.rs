mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{close, f_direct, mobius};
use etaquot::etaq::*;
use etaquot::exact::{CyclotomicNumber, Rational};
use etaquot::identities::*;
use etaquot::partitions::{count_ps, count_table, w_series};
use etaquot::qseries::{sparse_factor_product, QSeries, SparseFactor};
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXTENDED_ENV: &str = "ETAQUOT_EXTENDED";

const MOD24: &str = "delta=24 s1=1,5,7,9 s2=1,7,9,11 scale=4 eta_scale=24 eta_power=7 sieve_mod=24 sieve_res=20 level=576";
const MOD30: &str = "delta=30 s1=1,7,9,11 s2=1,9,11,13 scale=5 eta_scale=30 eta_power=16 sieve_mod=30 sieve_res=6 level=900";

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn spec(delta: u64, parts: &[u64]) -> PartitionSpec {
    PartitionSpec::new(delta, parts.iter().copied()).unwrap()
}

fn q5() -> PartitionSpec {
    spec(24, &[1, 5, 7, 9])
}

fn q11() -> PartitionSpec {
    spec(24, &[1, 7, 9, 11])
}

fn q7() -> PartitionSpec {
    spec(30, &[1, 7, 9, 11])
}

fn q13() -> PartitionSpec {
    spec(30, &[1, 9, 11, 13])
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed <= limit, || {
        format!("took {elapsed:.2?}, limit {limit:?}")
    })
}

fn extended() -> bool {
    std::env::var(EXTENDED_ENV).is_ok_and(|v| v == "1")
}

fn partition_table() -> Outcome {
    let t = Instant::now();
    let a = count_ps(&q5(), 32);
    let b = count_ps(&q11(), 33);
    let dt = t.elapsed();
    ensure(a == BigUint::from(7u8) && b == BigUint::from(7u8), || {
        format!("Q5(32) = {a}, Q11(33) = {b}")
    })?;
    within(dt, Duration::from_secs(1))?;
    Ok(format!("Q5(32) = Q11(33) = 7 in {dt:.2?}"))
}

fn progressions() -> Outcome {
    let t = Instant::now();
    let prog = Progression::new(6, [1, 3, 4, 5]).unwrap();
    for (name, s1, s2) in [("Q5/Q11", q5(), q11()), ("Q7/Q13", q7(), q13())] {
        if let Some(ce) = find_counterexample(&s1, &s2, &prog, 10_000).map_err(|e| e.to_string())? {
            return Err(format!("{name} mismatch at n = {}", ce.n));
        }
    }
    let dt = t.elapsed();
    within(dt, Duration::from_secs(60))?;
    Ok(format!("no mismatch for n <= 10000, n odd or n = 4 mod 6, in {dt:.2?}"))
}

/// `p_S(n)` read off `∏_{ℓ ≡ ±S} (1 + q^ℓ)`.
fn product_count(s: &PartitionSpec, n: i64) -> BigInt {
    if n < 0 {
        return BigInt::default();
    }
    let factors: Vec<SparseFactor<BigInt>> = (1..=n as u64)
        .filter(|&l| s.allows(l))
        .map(|l| SparseFactor::plus(Rational::from(l)))
        .collect();
    sparse_factor_product(&factors, &Rational::from(n + 1))
        .coeff_at(n)
        .expect("within precision")
}

fn counterexample() -> Outcome {
    let even = Progression::new(6, [0, 2]).unwrap();
    let ce = find_counterexample(&q5(), &q11(), &even, 10_000)
        .map_err(|e| e.to_string())?
        .ok_or("no counterexample below 10000")?;
    let n = ce.n as i64;
    let (l, r) = (product_count(&q5(), n - 1), product_count(&q11(), n));
    ensure(l == BigInt::from(ce.left.clone()) && r == BigInt::from(ce.right.clone()) && l != r, || {
        format!("witness n = {n} does not re-verify: {l} vs {r}")
    })?;
    Ok(format!("n = {n}: Q5(n-1) = {l}, Q11(n) = {r}"))
}

fn constants() -> Outcome {
    let got = [
        index_gamma1(576) as u64,
        index_gamma1(900) as u64,
        sturm_bound(576, &Rational::new(7, 2)).map_err(|e| e.to_string())?,
        sturm_bound(900, &Rational::from(8)).map_err(|e| e.to_string())?,
        cusp_representatives(576).len() as u64,
        cusp_representatives(900).len() as u64,
    ];
    let want = [221184, 518400, 64512, 345600, 1152, 2240];
    ensure(got == want, || format!("got {got:?}, want {want:?}"))?;
    Ok(format!("{want:?}"))
}

fn orders() -> Outcome {
    let got: Vec<Rational> = [q5(), q11(), q7(), q13()].iter().map(|s| s.ord()).collect();
    let want = [
        Rational::new(1, 4),
        Rational::new(-3, 4),
        Rational::new(1, 5),
        Rational::new(-4, 5),
    ];
    ensure(got == want, || format!("got {got:?}"))?;
    Ok("1/4, -3/4, 1/5, -4/5".into())
}

fn sturm_run(text: &str, limit: Duration) -> Outcome {
    let c: SturmConfig = text.parse().map_err(|e: etaquot::Error| e.to_string())?;
    let t = Instant::now();
    let cert = verify_identity_sturm(&c).map_err(|e| e.to_string())?;
    let dt = t.elapsed();
    ensure(cert.verdict == Verdict::Proved, || {
        format!("verdict {:?}, witnesses {:?}", cert.verdict, cert.witnesses)
    })?;
    within(dt, limit)?;
    Ok(format!(
        "proved through {} coefficients in {dt:.2?}",
        cert.parameters["bound"]
    ))
}

fn sturm_mod24() -> Outcome {
    let main = sturm_run(MOD24, Duration::from_secs(30 * 60))?;
    if !extended() {
        return Ok(format!("{main}; mod-30 job skipped, set {EXTENDED_ENV}=1"));
    }
    let ext = sturm_run(MOD30, Duration::from_secs(4 * 3600))?;
    Ok(format!("{main}; mod-30 {ext}"))
}

fn alternate_identity() -> Outcome {
    let t = Instant::now();
    let cert = alt_identity_check(10_000).map_err(|e| e.to_string())?;
    let dt = t.elapsed();
    ensure(cert.verdict == Verdict::Proved, || {
        format!("refuted at {:?}", cert.witnesses)
    })?;
    within(dt, Duration::from_secs(120))?;
    Ok(format!("through q^10000 in {dt:.2?}"))
}

fn transformation_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    while checked < 60 {
        let delta: u64 = rng.gen_range(3..=12);
        let parts: Vec<u64> = (1..delta).filter(|g| 2 * g < delta && rng.gen_bool(0.6)).collect();
        if parts.is_empty() {
            continue;
        }
        let (a, c) = (rng.gen_range(-12..=12i64), rng.gen_range(1..=12i64));
        if a.gcd(&c) != 1 {
            continue;
        }
        let s = spec(delta, &parts);
        let t = rng.gen_range(0..delta as i64);
        let ctx = cusp_context(a, c, delta).map_err(|e| e.to_string())?;
        let y = 4.0;
        let step = expansion_step(&ctx).to_f64();
        let terms = (60.0 / (2.0 * std::f64::consts::PI * y * step)).ceil() as usize;
        let exp = expansion_at_cusp(&s, &ctx, t, terms).map_err(|e| e.to_string())?;
        for k in 0..3 {
            let tau = Complex64::new(-0.3 + 0.25 * k as f64, y + 0.3 * k as f64);
            let want = f_direct(&s, mobius(&ctx, tau) + t as f64 / delta as f64);
            let got = exp.evaluate(tau);
            ensure(close(got, want, 1e-8), || {
                format!("{s} t={t} at {a}/{c}, tau={tau}: {got} vs {want}")
            })?;
        }
        checked += 1;
    }
    Ok(format!("{checked} instances x 3 points within 1e-8"))
}

fn ladder() -> Outcome {
    let s = q5();
    let inf = cusp_context(1, 0, 24).map_err(|e| e.to_string())?;
    let w = w_series(&s, &inf, 0, 100).map_err(|e| e.to_string())?;
    let table = count_table(&s, 100);
    for n in 0..=100 {
        let want = CyclotomicNumber::from_rational(Rational::from(BigInt::from(table[n].clone())), 1);
        ensure(w[n] == want, || format!("W(inf; {n}) = {} vs {}", w[n], table[n]))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut scaled = 0;
    while scaled < 100 {
        let (a, c) = (rng.gen_range(-30..30i64), rng.gen_range(1..40i64));
        if a.gcd(&c) != 1 {
            continue;
        }
        let ctx = cusp_context(a, c, rng.gen_range(2..20)).map_err(|e| e.to_string())?;
        let (g, t) = (rng.gen_range(1..10i64), rng.gen_range(0..20i64));
        let ell = Rational::new(rng.gen_range(-50..50i64), rng.gen_range(1..9i64));
        let sign: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
        let eps = Rational::from(ctx.epsilon);
        let lhs = c_phase(&ctx.scaled(), 2 * g, 2 * t, &ell, sign);
        let rhs = c_phase(&ctx, g, t, &(&eps * &ell * Rational::new(1, 4)), sign) * eps;
        ensure(lhs == rhs, || format!("C-scaling fails at {ctx:?}, g={g}, t={t}, l={ell}"))?;
        scaled += 1;
    }

    for _ in 0..20 {
        let len = rng.gen_range(1..60usize);
        let off = rng.gen_range(-10..10i64);
        let cs: Vec<BigInt> = (0..len).map(|_| BigInt::from(rng.gen_range(-1000..1000i64))).collect();
        let f = QSeries::new(1, off, cs, off + len as i64);
        let tm = rng.gen_range(1..13u64);
        let mut sum = QSeries::zero(1, f.precision());
        for r in 0..tm as i64 {
            sum = &sum + &f.sieve(tm, r).map_err(|e| e.to_string())?;
        }
        ensure(sum == f, || format!("sieve reconstruction fails for T = {tm}"))?;
    }
    Ok("W = p_S for n <= 100; 100 C-scaling cases; 20 sieve reconstructions".into())
}

/// `(spec, parts, residues)` for problems with `δ ≤ 8`, chosen among those
/// with the smallest levels.
const SMALL: [(u64, &[u64], &[u64]); 10] = [
    (7, &[1, 2, 3], &[0, 1, 2, 3, 4, 5, 6]),
    (7, &[1, 2, 3], &[3]),
    (5, &[1, 2], &[0, 1, 2, 3, 4]),
    (5, &[1, 2], &[1]),
    (3, &[1], &[0, 1, 2]),
    (3, &[1], &[2]),
    (6, &[2], &[0, 1, 2, 3, 4, 5]),
    (6, &[2], &[0, 4]),
    (8, &[1, 2, 3], &[0, 1, 2, 3, 4, 5, 6, 7]),
    (8, &[1, 2, 3], &[5]),
];

/// Nontrivial pairs with `δ = 14`.
const PAIRS: [(&[u64], &[u64], &[u64]); 4] = [
    (&[1, 2, 3], &[1, 4, 5], &[1]),
    (&[1, 2, 3], &[1, 4, 5], &[0]),
    (&[1, 2, 3], &[1, 4, 5], &[2]),
    (&[1, 4, 5], &[3, 5, 6], &[3]),
];

fn agree_with_scan(p: &IdentityProblem, label: &str) -> Result<(Verdict, bool), String> {
    let cert = check_suited(p, None).map_err(|e| format!("{label}: {e}"))?;
    let scan = dp_scan(p, 2000);
    match cert.verdict {
        Verdict::Suited => {
            ensure(scan.is_none(), || format!("{label}: suited but DP mismatch at {scan:?}"))?;
            Ok((Verdict::Suited, false))
        }
        Verdict::NotSuited => {
            let w = cert.witnesses.first().ok_or(format!("{label}: no witness"))?;
            let ok = recheck_cusp_witness(p, w).map_err(|e| e.to_string())?;
            ensure(ok, || format!("{label}: witness does not recheck"))?;
            Ok((Verdict::NotSuited, scan.is_some()))
        }
        v => Err(format!("{label}: unexpected verdict {v:?}")),
    }
}

fn suitedness() -> Outcome {
    let t = Instant::now();
    let (mut suited, mut not_suited, mut scanned) = (0, 0, 0);
    for (delta, parts, res) in SMALL {
        let s = spec(delta, parts);
        let p = build_problem(&s, &s, res).map_err(|e| e.to_string())?;
        let label = format!("delta={delta} S={parts:?} R={res:?}");
        agree_with_scan(&p, &label)?;
        suited += 1;
    }
    for (s1, s2, res) in PAIRS {
        let p = build_problem(&spec(14, s1), &spec(14, s2), res).map_err(|e| e.to_string())?;
        let label = format!("delta=14 S1={s1:?} S2={s2:?} R={res:?}");
        match agree_with_scan(&p, &label)? {
            (Verdict::Suited, _) => suited += 1,
            (_, found) => {
                not_suited += 1;
                scanned += found as usize;
            }
        }
    }
    let mut msg = format!(
        "{} problems with delta <= 8 and {} with delta = 14 agree with DP to n <= 2000: \
         {suited} suited, {not_suited} not suited ({scanned} with a DP mismatch found; \
         absence of a mismatch is evidence, not proof) in {:.2?}",
        SMALL.len(),
        PAIRS.len(),
        t.elapsed()
    );
    if extended() {
        let p = build_problem(&q5(), &q11(), &[13]).map_err(|e| e.to_string())?;
        let t = Instant::now();
        let cert = check_suited(&p, None).map_err(|e| e.to_string())?;
        ensure(cert.verdict == Verdict::Suited, || {
            format!("mod-24 problem: {:?} {:?}", cert.verdict, cert.witnesses)
        })?;
        msg.push_str(&format!("; mod-24 problem suited at level 9216 in {:.2?}", t.elapsed()));
    } else {
        msg.push_str(&format!("; level-9216 job skipped, set {EXTENDED_ENV}=1"));
    }
    Ok(msg)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("partition table", partition_table),
        ("progressions to 10000", progressions),
        ("counterexample existence", counterexample),
        ("index, Sturm bound and cusp constants", constants),
        ("orders", orders),
        ("Sturm proof, mod 24", sturm_mod24),
        ("alternate identity", alternate_identity),
        ("transformation oracle", transformation_oracle),
        ("ladder consistency", ladder),
        ("suitedness pipeline", suitedness),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
