//! Modular arithmetic kernel: primality, prime streams, Legendre/Jacobi
//! symbols, modular square roots and quartic residue symbols.
//!
//! Everything here is exact. Primality uses a deterministic Miller-Rabin
//! witness set that is valid for the whole 64-bit range, so the verification
//! campaigns never depend on a probabilistic answer.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use std::fmt;
use std::ops::{Mul, Neg};

/// Value of a quadratic or quartic residue symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Symbol {
    Minus,
    Zero,
    Plus,
}

impl Symbol {
    pub fn value(self) -> i8 {
        match self {
            Symbol::Minus => -1,
            Symbol::Zero => 0,
            Symbol::Plus => 1,
        }
    }

    pub fn from_value(v: i8) -> Option<Symbol> {
        match v {
            -1 => Some(Symbol::Minus),
            0 => Some(Symbol::Zero),
            1 => Some(Symbol::Plus),
            _ => None,
        }
    }

    /// Sign of (-1)^e.
    pub fn from_exponent_parity(e: u64) -> Symbol {
        if e % 2 == 0 {
            Symbol::Plus
        } else {
            Symbol::Minus
        }
    }
}

impl Mul for Symbol {
    type Output = Symbol;
    fn mul(self, rhs: Symbol) -> Symbol {
        Symbol::from_value(self.value() * rhs.value()).unwrap()
    }
}

impl Neg for Symbol {
    type Output = Symbol;
    fn neg(self) -> Symbol {
        Symbol::from_value(-self.value()).unwrap()
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc: u64 = 1;
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

/// Deterministic primality test for the full `u64` range.
///
/// Miller-Rabin with the witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29,
/// 31, 37}, which is known to be exact for all n < 3.3 * 10^24.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let s = d.trailing_zeros();
    d >>= s;
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn ensure_odd_prime(n: u64) -> Result<()> {
    if n == 2 || !is_prime(n) {
        return Err(Error::NotOddPrime { n });
    }
    Ok(())
}

/// Iterator over the primes q with `lower <= q < upper` and
/// `q = residue mod modulus`, ascending. Backed by a segmented sieve.
pub struct PrimeStream {
    next: u64,
    upper: u64,
    modulus: u64,
    residue: u64,
    base: Vec<u64>,
    segment: Vec<bool>,
    seg_lo: u64,
    seg_idx: usize,
}

const SEGMENT_LEN: usize = 1 << 18;

impl PrimeStream {
    pub fn new(lower: u64, upper: u64) -> PrimeStream {
        PrimeStream::with_residue(lower, upper, 1, 0).unwrap()
    }

    pub fn with_residue(lower: u64, upper: u64, modulus: u64, residue: u64) -> Result<PrimeStream> {
        if modulus == 0 || residue >= modulus {
            return Err(Error::InvalidArgument {
                what: format!("residue class {residue} mod {modulus}"),
            });
        }
        let root = if upper > 1 { (upper - 1).isqrt() } else { 0 };
        Ok(PrimeStream {
            next: lower.max(2),
            upper,
            modulus,
            residue,
            base: simple_sieve(root),
            segment: Vec::new(),
            seg_lo: 0,
            seg_idx: 0,
        })
    }

    fn fill_segment(&mut self) {
        let lo = self.next;
        let hi = self.upper.min(lo.saturating_add(SEGMENT_LEN as u64));
        let len = (hi - lo) as usize;
        self.segment.clear();
        self.segment.resize(len, true);
        for &p in &self.base {
            if p * p >= hi {
                break;
            }
            let mut j = (lo.div_ceil(p) * p).max(p * p);
            while j < hi {
                self.segment[(j - lo) as usize] = false;
                j += p;
            }
        }
        self.seg_lo = lo;
        self.seg_idx = 0;
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if self.next >= self.upper && self.seg_idx >= self.segment.len() {
                return None;
            }
            if self.seg_idx >= self.segment.len() {
                if self.next >= self.upper {
                    return None;
                }
                self.fill_segment();
                self.next = self.seg_lo + self.segment.len() as u64;
                if self.segment.is_empty() {
                    return None;
                }
            }
            let idx = self.seg_idx;
            self.seg_idx += 1;
            if self.segment[idx] {
                let q = self.seg_lo + idx as u64;
                if q % self.modulus == self.residue {
                    return Some(q);
                }
            }
        }
    }
}

/// All primes <= n by a plain sieve of Eratosthenes.
fn simple_sieve(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Jacobi symbol (a/n) for odd positive n; (a/1) = +1 by convention.
pub fn jacobi(a: i128, n: i128) -> Result<Symbol> {
    if n <= 0 || n % 2 == 0 {
        return Err(Error::BadJacobiModulus { n: n.to_string() });
    }
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut sign = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        Ok(Symbol::from_value(sign).unwrap())
    } else {
        Ok(Symbol::Zero)
    }
}

/// Jacobi symbol for unbounded operands; used by the spin symbols, whose
/// arguments can outgrow fixed-width integers under repeated unit shifts.
pub fn jacobi_big(a: &BigInt, n: &BigInt) -> Result<Symbol> {
    fn low_bits(x: &BigInt, m: u8) -> u8 {
        use num_traits::ToPrimitive;
        x.mod_floor(&BigInt::from(m)).to_u8().unwrap()
    }
    if !n.is_positive() || n.is_even() {
        return Err(Error::BadJacobiModulus { n: n.to_string() });
    }
    let mut a = a.mod_floor(n);
    let mut n = n.clone();
    let mut sign = 1i8;
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = low_bits(&n, 8);
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if low_bits(&a, 4) == 3 && low_bits(&n, 4) == 3 {
            sign = -sign;
        }
        a = a.mod_floor(&n);
    }
    if n == BigInt::from(1) {
        Ok(Symbol::from_value(sign).unwrap())
    } else {
        Ok(Symbol::Zero)
    }
}

/// Legendre symbol (a/p) by Euler's criterion; p must be an odd prime.
pub fn legendre(a: i64, p: u64) -> Result<Symbol> {
    ensure_odd_prime(p)?;
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return Ok(Symbol::Zero);
    }
    let e = pow_mod(r, (p - 1) / 2, p);
    if e == 1 {
        Ok(Symbol::Plus)
    } else if e == p - 1 {
        Ok(Symbol::Minus)
    } else {
        Err(Error::InvariantViolation {
            what: format!("euler criterion for ({a}/{p}) returned {e}"),
        })
    }
}

/// Square root of a mod p, normalized into [0, (p-1)/2]; `None` when a is a
/// quadratic non-residue, 0 when p | a.
pub fn sqrt_mod(a: i64, p: u64) -> Result<Option<u64>> {
    ensure_odd_prime(p)?;
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return Ok(Some(0));
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return Ok(None);
    }
    let r = if p % 4 == 3 {
        pow_mod(a, (p + 1) / 4, p)
    } else {
        tonelli_shanks(a, p)
    };
    debug_assert_eq!(mul_mod(r, r, p), a);
    Ok(Some(r.min(p - r)))
}

/// Tonelli-Shanks for p = 1 mod 4; a must be a quadratic residue.
fn tonelli_shanks(a: u64, p: u64) -> u64 {
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    // Deterministic scan for a non-residue keeps the whole pipeline
    // reproducible; the least one is tiny for every prime in range.
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    r
}

/// Quartic residue symbol (2/p)_4 for p = 1 mod 8, computed as
/// 2^((p-1)/4) mod p mapped {1 -> +1, p-1 -> -1}.
pub fn quartic_symbol_2(p: u64) -> Result<Symbol> {
    if !is_prime(p) {
        return Err(Error::NotPrime { n: p });
    }
    if p % 8 != 1 {
        return Err(Error::WrongResidueClass {
            p,
            requirement: "p = 1 mod 8",
        });
    }
    let e = pow_mod(2, (p - 1) / 4, p);
    if e == 1 {
        Ok(Symbol::Plus)
    } else if e == p - 1 {
        Ok(Symbol::Minus)
    } else {
        Err(Error::InvariantViolation {
            what: format!("2^((p-1)/4) mod {p} = {e}, neither 1 nor -1"),
        })
    }
}

/// Quartic residue symbol (a/p)_4 for p = 1 mod 4; defined only when
/// (a/p) = +1, otherwise errors with `NotQuadraticResidue`.
pub fn quartic_symbol(a: i64, p: u64) -> Result<Symbol> {
    if !is_prime(p) {
        return Err(Error::NotPrime { n: p });
    }
    if p % 4 != 1 {
        return Err(Error::WrongResidueClass {
            p,
            requirement: "p = 1 mod 4",
        });
    }
    if legendre(a, p)? != Symbol::Plus {
        return Err(Error::NotQuadraticResidue { a, p });
    }
    let r = a.rem_euclid(p as i64) as u64;
    let e = pow_mod(r, (p - 1) / 4, p);
    if e == 1 {
        Ok(Symbol::Plus)
    } else if e == p - 1 {
        Ok(Symbol::Minus)
    } else {
        Err(Error::InvariantViolation {
            what: format!("{a}^((p-1)/4) mod {p} = {e}, neither 1 nor -1"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_and_known() {
        assert!(is_prime(2));
        assert!(!is_prime(0));
        assert!(!is_prime(1));
        assert!(is_prime(999983));
        assert!(!is_prime(999981));
        // Strong pseudoprime to several small bases.
        assert!(!is_prime(3215031751));
        assert!(is_prime(18446744073709551557)); // largest u64 prime
    }

    #[test]
    fn primality_matches_trial_division() {
        fn trial(n: u64) -> bool {
            if n < 2 {
                return false;
            }
            let mut d = 2;
            while d * d <= n {
                if n % d == 0 {
                    return false;
                }
                d += 1;
            }
            true
        }
        for n in 0..2000 {
            assert_eq!(is_prime(n), trial(n), "n = {n}");
        }
    }

    #[test]
    fn prime_stream_plain() {
        let ps: Vec<u64> = PrimeStream::new(0, 30).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        let ps: Vec<u64> = PrimeStream::new(10, 30).collect();
        assert_eq!(ps, vec![11, 13, 17, 19, 23, 29]);
        assert_eq!(PrimeStream::new(10, 10).count(), 0);
    }

    #[test]
    fn prime_stream_residue_class() {
        let ps: Vec<u64> = PrimeStream::with_residue(0, 200, 16, 15).unwrap().collect();
        assert_eq!(ps, vec![31, 47, 79, 127, 191]);
        // Count of p < 10^4 with p = 15 mod 32 against a direct loop.
        let direct = (0u64..10_000).filter(|&n| is_prime(n) && n % 32 == 15).count();
        let streamed = PrimeStream::with_residue(0, 10_000, 32, 15).unwrap().count();
        assert_eq!(streamed, direct);
    }

    #[test]
    fn prime_stream_crosses_segments() {
        let n = SEGMENT_LEN as u64 * 2 + 1000;
        let streamed = PrimeStream::new(0, n).count();
        let direct = simple_sieve(n - 1).len();
        assert_eq!(streamed, direct);
    }

    #[test]
    fn jacobi_known_values() {
        assert_eq!(jacobi(2, 7).unwrap(), Symbol::Plus);
        assert_eq!(jacobi(2, 3).unwrap(), Symbol::Minus);
        assert_eq!(jacobi(26, 9).unwrap(), Symbol::Plus);
        assert_eq!(jacobi(66, 23).unwrap(), Symbol::Minus);
        // n = 1 is the empty product.
        assert_eq!(jacobi(46, 1).unwrap(), Symbol::Plus);
        assert_eq!(jacobi(0, 1).unwrap(), Symbol::Plus);
        // Shared factor.
        assert_eq!(jacobi(6, 9).unwrap(), Symbol::Zero);
        assert!(jacobi(2, 4).is_err());
        assert!(jacobi(2, -3).is_err());
        assert!(jacobi(2, 0).is_err());
    }

    #[test]
    fn jacobi_multiplicative() {
        for n in (1..200i128).step_by(2) {
            for a in -30..30 {
                for b in -30..30 {
                    let lhs = jacobi(a * b, n).unwrap().value();
                    let rhs = jacobi(a, n).unwrap().value() * jacobi(b, n).unwrap().value();
                    assert_eq!(lhs, rhs, "a={a} b={b} n={n}");
                }
            }
        }
    }

    #[test]
    fn jacobi_big_agrees_with_fixed_width() {
        for n in (1..500i128).step_by(2) {
            for a in -50..50i128 {
                let big = jacobi_big(&BigInt::from(a), &BigInt::from(n)).unwrap();
                assert_eq!(big, jacobi(a, n).unwrap(), "a={a} n={n}");
            }
        }
    }

    #[test]
    fn sqrt_mod_known_values() {
        assert_eq!(sqrt_mod(2, 7).unwrap(), Some(3));
        assert_eq!(sqrt_mod(2, 17).unwrap(), Some(6));
        assert_eq!(sqrt_mod(3, 7).unwrap(), None);
        assert_eq!(sqrt_mod(0, 7).unwrap(), Some(0));
        assert_eq!(sqrt_mod(14, 7).unwrap(), Some(0));
        assert!(sqrt_mod(2, 8).is_err());
    }

    #[test]
    fn sqrt_mod_normalized_root() {
        for p in [5u64, 13, 17, 29, 97, 101, 65537] {
            for a in 1..50i64 {
                if let Some(r) = sqrt_mod(a, p).unwrap() {
                    assert!(r <= (p - 1) / 2);
                    assert_eq!(mul_mod(r, r, p), (a as u64) % p);
                }
            }
        }
    }

    #[test]
    fn quartic_symbol_2_known_values() {
        assert_eq!(quartic_symbol_2(17).unwrap(), Symbol::Minus);
        assert_eq!(quartic_symbol_2(97).unwrap(), Symbol::Minus);
        assert_eq!(quartic_symbol_2(113).unwrap(), Symbol::Plus);
        assert!(quartic_symbol_2(7).is_err());
        assert!(quartic_symbol_2(9).is_err());
    }

    #[test]
    fn quartic_symbol_known_values() {
        assert_eq!(quartic_symbol(9, 73).unwrap(), Symbol::Plus);
        assert_eq!(quartic_symbol(1, 13).unwrap(), Symbol::Plus);
        assert_eq!(quartic_symbol(4, 5).unwrap(), Symbol::Minus);
        assert!(matches!(
            quartic_symbol(2, 5),
            Err(Error::NotQuadraticResidue { .. })
        ));
        assert!(quartic_symbol(2, 7).is_err());
    }

    #[test]
    fn quartic_symbol_squares_to_legendre() {
        for p in PrimeStream::with_residue(0, 500, 4, 1).unwrap() {
            for a in 1..p as i64 {
                match legendre(a, p).unwrap() {
                    Symbol::Plus => {
                        let q = quartic_symbol(a, p).unwrap();
                        assert!(q == Symbol::Plus || q == Symbol::Minus);
                    }
                    _ => assert!(quartic_symbol(a, p).is_err()),
                }
            }
        }
    }
}
