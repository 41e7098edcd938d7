//! Small integer helpers: primes, smoothness, gcd.

/// All primes ≤ n.
pub fn primes_up_to(n: usize) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &p)| p.then_some(k as u64))
        .collect()
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    let mut bound = 16usize.max(count * 2);
    if count >= 6 {
        let n = count as f64;
        bound = (n * (n.ln() + n.ln().ln())).ceil() as usize + 16;
    }
    loop {
        let ps = primes_up_to(bound);
        if ps.len() >= count {
            return ps[..count].to_vec();
        }
        bound *= 2;
    }
}

/// p_n, the n-th prime (1-based: p_1 = 2).
pub fn nth_prime(n: usize) -> u64 {
    assert!(n >= 1, "primes are indexed from 1");
    first_primes(n)[n - 1]
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Smallest prime factor for every n ≤ limit (spf[0] = spf[1] = 0).
pub fn smallest_prime_factors(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Whether every prime factor of n is ≤ bound.
pub fn is_smooth(mut n: u64, bound: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut p = 2;
    while p <= bound && n > 1 {
        while n.is_multiple_of(p) {
            n /= p;
        }
        p += 1;
    }
    n == 1
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Factorization as (prime, exponent) pairs using a smallest-prime-factor table.
pub fn factor_with(spf: &[u32], mut n: usize) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    while n > 1 {
        let p = spf[n] as usize;
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        out.push((p as u64, e));
    }
    out
}
