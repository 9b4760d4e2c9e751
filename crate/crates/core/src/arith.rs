//! Exact integer primitives: primality, factorization, squarefreeness,
//! integer square roots and modular inverses.
//!
//! Everything here is pure. Integers that fit in a `u64` take a native fast
//! path; larger values fall back to `BigInt` arithmetic with the same
//! algorithms.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Upper bound (exclusive) on the trial-division prime table.
pub const TRIAL_DIVISION_LIMIT: u32 = 1_000_000;

/// Default Pollard-rho iteration budget per composite cofactor.
pub const DEFAULT_RHO_BUDGET: u64 = 100_000_000;

/// Miller-Rabin with the prime bases 2..=17 is exact below this bound
/// (it is the smallest strong pseudoprime to all of them).
pub const DETERMINISTIC_PRIMALITY_BOUND: u64 = 341_550_071_728_321;

const DETERMINISTIC_BASES: [u64; 7] = [2, 3, 5, 7, 11, 13, 17];

/// Rounds used above [`DETERMINISTIC_PRIMALITY_BOUND`]. The bases are the
/// first 64 primes, so results are reproducible run to run.
pub const PROBABILISTIC_ROUNDS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("{value} is not invertible modulo {modulus}")]
    NotCoprime { value: BigInt, modulus: BigInt },
    #[error("modulus must be at least 1, got {0}")]
    InvalidModulus(BigInt),
    #[error("expected a positive integer, got {0}")]
    NonPositive(BigInt),
    #[error("cannot factor zero")]
    FactorZero,
    #[error("Pollard rho exhausted its budget of {budget} iterations on {cofactor}")]
    FactorizationTimeout { cofactor: BigInt, budget: u64 },
}

/// How [`is_prime`] decided a given input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimalityMethod {
    /// Exact: trial division or Miller-Rabin with a proven witness set.
    Deterministic,
    /// Miller-Rabin with [`PROBABILISTIC_ROUNDS`] fixed bases.
    Probabilistic { rounds: usize },
}

impl PrimalityMethod {
    pub fn for_value(n: &BigInt) -> Self {
        match n.to_u64() {
            Some(v) if v < DETERMINISTIC_PRIMALITY_BOUND => PrimalityMethod::Deterministic,
            _ if n.is_negative() => PrimalityMethod::Deterministic,
            _ => PrimalityMethod::Probabilistic {
                rounds: PROBABILISTIC_ROUNDS,
            },
        }
    }
}

/// Human-readable description of the primality policy, for report metadata.
pub fn primality_policy() -> String {
    format!(
        "miller-rabin: deterministic (bases 2..17) below {DETERMINISTIC_PRIMALITY_BOUND}, \
         {PROBABILISTIC_ROUNDS} fixed prime bases above"
    )
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let limit = TRIAL_DIVISION_LIMIT as usize;
        let mut composite = vec![false; limit];
        let mut primes = Vec::with_capacity(78_500);
        for i in 2..limit {
            if !composite[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j < limit {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn strong_probable_prime_u64(n: u64, base: u64) -> bool {
    let base = base % n;
    if base == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod(base, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

fn strong_probable_prime_big(n: &BigInt, base: u64) -> bool {
    let one = BigInt::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    let mut x = BigInt::from(base).modpow(&d, n);
    if x.is_one() || x == n_minus_one {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_one {
            return true;
        }
    }
    false
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &small_primes()[..25] {
        let p = p as u64;
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    if n < 101 * 101 {
        return true;
    }
    if n < DETERMINISTIC_PRIMALITY_BOUND {
        DETERMINISTIC_BASES
            .iter()
            .all(|&b| strong_probable_prime_u64(n, b))
    } else {
        small_primes()[..PROBABILISTIC_ROUNDS]
            .iter()
            .all(|&b| strong_probable_prime_u64(n, b as u64))
    }
}

/// Primality test. Negative inputs, 0 and 1 are not prime.
pub fn is_prime(n: &BigInt) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    if n.is_negative() {
        return false;
    }
    for &p in &small_primes()[..PROBABILISTIC_ROUNDS] {
        if (n % p).is_zero() {
            return false;
        }
    }
    small_primes()[..PROBABILISTIC_ROUNDS]
        .iter()
        .all(|&b| strong_probable_prime_big(n, b as u64))
}

/// Prime factorization with sign. The unit factorization of 1 is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    negative: bool,
    factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub fn factors(&self) -> &[(BigInt, u32)] {
        &self.factors
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }

    /// Multiplies the factorization back out.
    pub fn product(&self) -> BigInt {
        let mut acc = BigInt::one();
        for (p, e) in &self.factors {
            acc *= num_traits::pow(p.clone(), *e as usize);
        }
        if self.negative {
            -acc
        } else {
            acc
        }
    }

    /// Product of the primes occurring to an odd power.
    pub fn squarefree_part(&self) -> BigInt {
        self.factors
            .iter()
            .filter(|(_, e)| e % 2 == 1)
            .fold(BigInt::one(), |acc, (p, _)| acc * p)
    }

    /// All positive divisors, unsorted.
    pub fn divisors(&self) -> Vec<BigInt> {
        let mut divs = vec![BigInt::one()];
        for (p, e) in &self.factors {
            let len = divs.len();
            let mut power = BigInt::one();
            for _ in 0..*e {
                power *= p;
                for i in 0..len {
                    let next = &divs[i] * &power;
                    divs.push(next);
                }
            }
        }
        divs
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_str("-")?;
        }
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Brent's variant of Pollard rho on `u64`. `budget` is decremented per
/// polynomial evaluation; `Err(())` means it ran out.
fn brent_u64(n: u64, c: u64, budget: &mut u64) -> Result<Option<u64>, ()> {
    const BATCH: u64 = 128;
    let f = |v: u64| (mul_mod(v, v, n) + c) % n;
    let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        if *budget < r {
            return Err(());
        }
        *budget -= r;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let steps = BATCH.min(r - k);
            if *budget < steps {
                return Err(());
            }
            *budget -= steps;
            for _ in 0..steps {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += BATCH;
        }
        r *= 2;
    }
    if g == n {
        loop {
            if *budget == 0 {
                return Err(());
            }
            *budget -= 1;
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    Ok((g != n).then_some(g))
}

fn brent_big(n: &BigInt, c: u64, budget: &mut u64) -> Result<Option<BigInt>, ()> {
    const BATCH: u64 = 128;
    let c = BigInt::from(c);
    let f = |v: &BigInt| (v * v + &c) % n;
    let mut y = BigInt::from(2);
    let mut r = 1u64;
    let mut q = BigInt::one();
    let mut g = BigInt::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    while g.is_one() {
        x = y.clone();
        if *budget < r {
            return Err(());
        }
        *budget -= r;
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let steps = BATCH.min(r - k);
            if *budget < steps {
                return Err(());
            }
            *budget -= steps;
            for _ in 0..steps {
                y = f(&y);
                q = (&q * (&x - &y).abs()) % n;
            }
            g = q.gcd(n);
            k += BATCH;
        }
        r *= 2;
    }
    if &g == n {
        loop {
            if *budget == 0 {
                return Err(());
            }
            *budget -= 1;
            ys = f(&ys);
            g = (&x - &ys).abs().gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    Ok((&g != n).then_some(g))
}

fn push_factor(out: &mut Vec<(BigInt, u32)>, p: BigInt) {
    match out.iter_mut().find(|(q, _)| *q == p) {
        Some((_, e)) => *e += 1,
        None => out.push((p, 1)),
    }
}

fn factor_u64(mut n: u64, budget: u64, out: &mut Vec<(BigInt, u32)>) -> Result<(), ArithError> {
    for &p in small_primes() {
        let p = p as u64;
        if p * p > n {
            break;
        }
        while n.is_multiple_of(p) {
            n /= p;
            push_factor(out, BigInt::from(p));
        }
    }
    if n == 1 {
        return Ok(());
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if is_prime_u64(m) {
            push_factor(out, BigInt::from(m));
            continue;
        }
        let mut remaining = budget;
        let mut split = None;
        for c in 1.. {
            match brent_u64(m, c, &mut remaining) {
                Ok(Some(g)) => {
                    split = Some(g);
                    break;
                }
                Ok(None) => continue,
                Err(()) => break,
            }
        }
        let g = split.ok_or_else(|| ArithError::FactorizationTimeout {
            cofactor: BigInt::from(m),
            budget,
        })?;
        stack.push(g);
        stack.push(m / g);
    }
    Ok(())
}

fn factor_big(n: BigInt, budget: u64, out: &mut Vec<(BigInt, u32)>) -> Result<(), ArithError> {
    let mut n = n;
    for &p in small_primes() {
        if (&n % p).is_zero() {
            while (&n % p).is_zero() {
                n /= p;
                push_factor(out, BigInt::from(p));
            }
            if let Some(v) = n.to_u64() {
                return factor_u64(v, budget, out);
            }
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if let Some(v) = m.to_u64() {
            factor_u64(v, budget, out)?;
            continue;
        }
        if is_prime(&m) {
            push_factor(out, m);
            continue;
        }
        let mut remaining = budget;
        let mut split = None;
        for c in 1.. {
            match brent_big(&m, c, &mut remaining) {
                Ok(Some(g)) => {
                    split = Some(g);
                    break;
                }
                Ok(None) => continue,
                Err(()) => break,
            }
        }
        let g = split.ok_or_else(|| ArithError::FactorizationTimeout {
            cofactor: m.clone(),
            budget,
        })?;
        let other = &m / &g;
        stack.push(g);
        stack.push(other);
    }
    Ok(())
}

/// Complete factorization with the default rho budget.
pub fn factorize(n: &BigInt) -> Result<Factorization, ArithError> {
    factorize_with_budget(n, DEFAULT_RHO_BUDGET)
}

/// Trial division by primes below 10⁶, then Brent-Pollard rho on any
/// composite cofactor. `budget` bounds rho iterations per cofactor.
pub fn factorize_with_budget(n: &BigInt, budget: u64) -> Result<Factorization, ArithError> {
    if n.is_zero() {
        return Err(ArithError::FactorZero);
    }
    let mut factors = Vec::new();
    let magnitude = n.abs();
    match magnitude.to_u64() {
        Some(v) => factor_u64(v, budget, &mut factors)?,
        None => factor_big(magnitude, budget, &mut factors)?,
    }
    factors.sort();
    Ok(Factorization {
        negative: n.is_negative(),
        factors,
    })
}

/// True iff no prime square divides `n`. Requires `n ≥ 1`.
pub fn is_squarefree(n: &BigInt) -> Result<bool, ArithError> {
    if !n.is_positive() {
        return Err(ArithError::NonPositive(n.clone()));
    }
    Ok(factorize(n)?.is_squarefree())
}

/// Floor of the square root of a non-negative integer.
///
/// # Panics
/// If `n` is negative.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of negative value {n}");
    n.sqrt()
}

pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = isqrt(n);
    &r * &r == *n
}

/// Inverse of `a` modulo `m`, in `[0, m)`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Result<BigInt, ArithError> {
    if m < &BigInt::one() {
        return Err(ArithError::InvalidModulus(m.clone()));
    }
    let reduced = a.mod_floor(m);
    let egcd = reduced.extended_gcd(m);
    if !egcd.gcd.is_one() {
        return Err(ArithError::NotCoprime {
            value: a.clone(),
            modulus: m.clone(),
        });
    }
    Ok(egcd.x.mod_floor(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(&big(7)));
        assert!(!is_prime(&big(1)));
        assert!(!is_prime(&big(0)));
        assert!(!is_prime(&big(-7)));
        // 11 * 31
        assert!(!is_prime(&big(341)));
        assert!(is_prime(&big(1_000_000_007)));
        // strong pseudoprime to bases 2..13
        assert!(!is_prime(&big(3_215_031_751)));
        assert!(!is_prime(&BigInt::from(DETERMINISTIC_PRIMALITY_BOUND)));
    }

    #[test]
    fn primality_beyond_u64() {
        let m61 = (BigInt::one() << 61) - 1;
        let m89 = (BigInt::one() << 89) - 1;
        assert!(is_prime(&m89));
        assert!(!is_prime(&(&m61 * &m89)));
        assert_eq!(
            PrimalityMethod::for_value(&m89),
            PrimalityMethod::Probabilistic { rounds: 64 }
        );
        assert_eq!(
            PrimalityMethod::for_value(&big(97)),
            PrimalityMethod::Deterministic
        );
    }

    #[test]
    fn factorization_examples() {
        let f = factorize(&big(123)).unwrap();
        assert_eq!(f.factors(), &[(big(3), 1), (big(41), 1)]);
        assert_eq!(f.to_string(), "3*41");

        let f = factorize(&big(25)).unwrap();
        assert_eq!(f.factors(), &[(big(5), 2)]);
        assert_eq!(f.to_string(), "5^2");

        let f = factorize(&big(-12)).unwrap();
        assert!(f.is_negative());
        assert_eq!(f.factors(), &[(big(2), 2), (big(3), 1)]);
        assert_eq!(f.to_string(), "-2^2*3");

        assert_eq!(factorize(&big(1)).unwrap().to_string(), "1");
        assert_eq!(factorize(&big(0)), Err(ArithError::FactorZero));
    }

    #[test]
    fn factorization_needs_rho() {
        // two primes above the trial-division table
        let p = big(1_000_003);
        let q = big(1_000_033);
        let f = factorize(&(&p * &q * &q)).unwrap();
        assert_eq!(f.factors(), &[(p.clone(), 1), (q.clone(), 2)]);

        let m61 = (BigInt::one() << 61) - 1;
        let n = &m61 * &p * big(6);
        let f = factorize(&n).unwrap();
        assert_eq!(f.product(), n);
        assert_eq!(f.factors().last().unwrap().0, m61);
    }

    #[test]
    fn factorization_timeout() {
        let p = big(1_000_003);
        let q = big(1_000_033);
        let err = factorize_with_budget(&(&p * &q), 3).unwrap_err();
        assert!(matches!(
            err,
            ArithError::FactorizationTimeout { budget: 3, .. }
        ));
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(is_squarefree(&big(123)), Ok(true));
        assert_eq!(is_squarefree(&big(25)), Ok(false));
        assert_eq!(is_squarefree(&big(1)), Ok(true));
        assert!(is_squarefree(&big(0)).is_err());
    }

    #[test]
    fn square_examples() {
        assert!(is_square(&big(25)));
        assert!(!is_square(&big(123)));
        assert!(is_square(&big(0)));
        assert!(!is_square(&big(-4)));
        assert_eq!(isqrt(&big(143)), big(11));
        assert_eq!(isqrt(&big(144)), big(12));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(&big(3), &big(7)), Ok(big(5)));
        assert_eq!(mod_inverse(&big(1), &big(9)), Ok(big(1)));
        assert_eq!(mod_inverse(&big(-3), &big(7)), Ok(big(2)));
        assert!(matches!(
            mod_inverse(&big(2), &big(4)),
            Err(ArithError::NotCoprime { .. })
        ));
        assert!(matches!(
            mod_inverse(&big(2), &big(0)),
            Err(ArithError::InvalidModulus(_))
        ));
    }

    #[test]
    fn divisors_of_twelve() {
        let mut d = factorize(&big(12)).unwrap().divisors();
        d.sort();
        assert_eq!(d, [1, 2, 3, 4, 6, 12].map(big));
    }

    #[test]
    fn primality_matches_trial_division_below_one_million() {
        let table = small_primes();
        let mut idx = 0;
        for n in 0u64..1_000_000 {
            let expected = idx < table.len() && table[idx] as u64 == n;
            if expected {
                idx += 1;
            }
            assert_eq!(is_prime_u64(n), expected, "n = {n}");
        }
    }
}
