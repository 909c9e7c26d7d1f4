use num_integer::Integer;

use crate::exact::euler_phi;

/// Whether `(a:c)` and `(a':c')` give the same cusp of `Γ₁(N)`:
/// `(a', c') ≡ ±(a + jc, c) (mod N)` for some integer `j`.
pub fn cusps_equivalent(n: u64, x: (i64, i64), y: (i64, i64)) -> bool {
    let n = n as i64;
    let g = x.1.gcd(&n);
    [1i64, -1].iter().any(|&s| {
        (y.1 - s * x.1).rem_euclid(n) == 0 && (y.0 - s * x.0).rem_euclid(g) == 0
    })
}

/// `(1/2)·Σ_{d|N} φ(d)·φ(N/d)`, the number of cusps of `Γ₁(N)` for `N > 4`.
pub fn cusp_count_formula(n: u64) -> u64 {
    let s: u64 = (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| euler_phi(d) * euler_phi(n / d))
        .sum();
    s / 2
}

/// One representative `(a, c)` per cusp of `Γ₁(N)`, `gcd(a, c) = 1`,
/// ordered by ascending `c mod N`, then `a`.
///
/// Classes are indexed by `(c mod N, a mod gcd(c, N))` up to sign. The cusp
/// at infinity is returned as `(1, 0)`; other classes with `c ≡ 0` use
/// `c = N`. Otherwise `a` is the least nonnegative lift coprime to `c`.
pub fn cusp_representatives(n: u64) -> Vec<(i64, i64)> {
    assert!(n >= 1, "level must be positive");
    let ni = n as i64;
    let mut out = Vec::new();
    for c in 0..ni {
        let neg_c = (ni - c) % ni;
        if neg_c < c {
            continue;
        }
        let g = c.gcd(&ni);
        for a in 0..g {
            if a.gcd(&g) != 1 {
                continue;
            }
            if neg_c == c && (g - a) % g < a {
                continue;
            }
            out.push(lift(ni, a, c, g));
        }
    }
    out
}

fn lift(n: i64, a: i64, c: i64, g: i64) -> (i64, i64) {
    if c == 0 {
        if (a - 1).rem_euclid(n) == 0 || (a + 1).rem_euclid(n) == 0 {
            return (1, 0);
        }
        return (a, n);
    }
    let mut x = a;
    while x.gcd(&c) != 1 {
        x += g;
    }
    (x, c)
}
