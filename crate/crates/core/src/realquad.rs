//! Real quadratic field computations: periodic continued fractions of
//! sqrt(d), fundamental units, the norm equation x^2 - d y^2 = 2, and the
//! unit identities they satisfy for p = 7 mod 8.
//!
//! Fundamental units grow exponentially (hundreds of digits already for
//! d near 10^4), so convergents are accumulated in unbounded integers.

use crate::error::{Error, Result};
use crate::modular::{self, is_prime, Symbol};
use num_bigint::{BigInt, BigUint};
use num_traits::One;

/// Continued fraction of sqrt(d): a0 followed by the repeating period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuedFraction {
    pub d: u64,
    pub a0: u64,
    pub period: Vec<u64>,
}

/// Minimal solution of x^2 - d y^2 = +-1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalUnit {
    pub d: u64,
    pub x: BigUint,
    pub y: BigUint,
    pub unit_norm: i8,
}

/// Minimal solution of x^2 - d y^2 = 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormTwoSolution {
    pub d: u64,
    pub x: BigUint,
    pub y: BigUint,
}

/// (P, Q) state of the sqrt(d) expansion; yields partial quotients.
struct SqrtExpansion {
    d: u64,
    a0: u64,
    p: u64,
    q: u64,
}

impl SqrtExpansion {
    fn new(d: u64) -> SqrtExpansion {
        let a0 = d.isqrt();
        SqrtExpansion { d, a0, p: 0, q: 1 }
    }

    /// Advance to the next state; returns (a_i, P_i, Q_i) for i >= 1.
    fn step(&mut self, a_prev: u64) -> (u64, u64, u64) {
        self.p = a_prev * self.q - self.p;
        self.q = (self.d - self.p * self.p) / self.q;
        let a = (self.a0 + self.p) / self.q;
        (a, self.p, self.q)
    }
}

fn ensure_not_square(d: u64) -> Result<()> {
    let r = d.isqrt();
    if r * r == d {
        return Err(Error::PerfectSquare { d });
    }
    Ok(())
}

/// Squarefreeness by trial division up to the cube root plus a perfect
/// square test on the cofactor.
pub fn is_squarefree(d: u64) -> bool {
    if d == 0 {
        return false;
    }
    let mut m = d;
    let mut f = 2;
    while f * f * f <= d {
        if m % f == 0 {
            m /= f;
            if m % f == 0 {
                return false;
            }
        }
        f += 1;
    }
    // m is now 1, a prime, a product of two primes above the cube root, or
    // the square of such a prime; only the square case is not squarefree.
    if m == 1 {
        return true;
    }
    let r = m.isqrt();
    r * r != m
}

fn ensure_squarefree(d: u64) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidArgument {
            what: format!("d = {d} must be at least 2"),
        });
    }
    if !is_squarefree(d) {
        return Err(Error::NotSquarefree { d });
    }
    Ok(())
}

/// Periodic continued fraction of sqrt(d) for non-square d >= 2.
pub fn cf_sqrt(d: u64) -> Result<ContinuedFraction> {
    if d < 2 {
        return Err(Error::InvalidArgument {
            what: format!("d = {d} must be at least 2"),
        });
    }
    ensure_not_square(d)?;
    let mut exp = SqrtExpansion::new(d);
    let a0 = exp.a0;
    let mut period = Vec::new();
    let mut a = a0;
    loop {
        let (next, _, q) = exp.step(a);
        period.push(next);
        a = next;
        if q == 1 {
            break;
        }
    }
    debug_assert_eq!(*period.last().unwrap(), 2 * a0);
    Ok(ContinuedFraction { d, a0, period })
}

/// Fundamental unit of Z[sqrt(d)] from the convergent at the end of the
/// first period: norm -1 exactly when the period length is odd.
pub fn fundamental_unit(d: u64) -> Result<FundamentalUnit> {
    ensure_squarefree(d)?;
    ensure_not_square(d)?;
    let mut exp = SqrtExpansion::new(d);
    // Convergents h_i/k_i; after processing a_i they hold (h_i, k_i).
    let mut h_prev = BigUint::one();
    let mut k_prev = BigUint::ZERO;
    let mut h = BigUint::from(exp.a0);
    let mut k = BigUint::one();
    let mut a = exp.a0;
    let mut len = 0u64;
    loop {
        let (next, _, q) = exp.step(a);
        len += 1;
        if q == 1 {
            // Period has length `len`; (h, k) is the convergent at ell - 1.
            let unit_norm = if len % 2 == 1 { -1 } else { 1 };
            let check = BigInt::from(h.clone()) * BigInt::from(h.clone())
                - BigInt::from(d) * BigInt::from(k.clone()) * BigInt::from(k.clone());
            if check != BigInt::from(unit_norm) {
                return Err(Error::InvariantViolation {
                    what: format!("unit candidate for d = {d} has norm {check}"),
                });
            }
            return Ok(FundamentalUnit { d, x: h, y: k, unit_norm });
        }
        let nh = BigUint::from(next) * &h + &h_prev;
        let nk = BigUint::from(next) * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, nh);
        k_prev = std::mem::replace(&mut k, nk);
        a = next;
    }
}

/// Minimal solution of x^2 - d y^2 = 2, if one exists.
///
/// A solution with 2 < sqrt(d) must be a convergent of sqrt(d), showing up
/// as an occurrence of Q = 2 at even index; two periods are scanned so that
/// odd period lengths are covered as well. d = 2 and d = 3 sit below the
/// convergent bound and are handled directly.
pub fn solve_norm_two(d: u64) -> Result<Option<NormTwoSolution>> {
    ensure_squarefree(d)?;
    if d == 2 {
        return Ok(Some(NormTwoSolution {
            d,
            x: BigUint::from(2u32),
            y: BigUint::one(),
        }));
    }
    if d == 3 {
        // x^2 = 2 mod 3 has no solution.
        return Ok(None);
    }
    ensure_not_square(d)?;
    let mut exp = SqrtExpansion::new(d);
    let mut h_prev = BigUint::one();
    let mut k_prev = BigUint::ZERO;
    let mut h = BigUint::from(exp.a0);
    let mut k = BigUint::one();
    let mut a = exp.a0;
    let mut idx = 0u64;
    let mut periods = 0;
    loop {
        let (next, _, q) = exp.step(a);
        idx += 1;
        // h and k currently hold the convergent at index idx - 1, and
        // h^2 - d k^2 = (-1)^idx * Q_idx.
        if q == 2 && idx % 2 == 0 {
            let check = BigInt::from(h.clone()) * BigInt::from(h.clone())
                - BigInt::from(d) * BigInt::from(k.clone()) * BigInt::from(k.clone());
            if check != BigInt::from(2) {
                return Err(Error::InvariantViolation {
                    what: format!("norm-two candidate for d = {d} has norm {check}"),
                });
            }
            return Ok(Some(NormTwoSolution { d, x: h, y: k }));
        }
        if q == 1 {
            periods += 1;
            if periods == 2 {
                return Ok(None);
            }
        }
        let nh = BigUint::from(next) * &h + &h_prev;
        let nk = BigUint::from(next) * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, nh);
        k_prev = std::mem::replace(&mut k, nk);
        a = next;
    }
}

/// Result of checking that the fundamental units of Q(sqrt(p)) and
/// Q(sqrt(2p)) equal half the square of the respective norm-two solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfSquareReport {
    /// (x + y*sqrt(p))^2 / 2 is the fundamental unit of Q(sqrt(p)).
    pub sqrt_p: bool,
    /// (x + y*sqrt(2p))^2 / 2 is the fundamental unit of Q(sqrt(2p)).
    pub sqrt_2p: bool,
}

/// For p = 7 mod 8: verify that the fundamental units of Q(sqrt(p)) and
/// Q(sqrt(2p)) are half the squares of the minimal norm-two solutions.
pub fn check_unit_half_square(p: u64) -> Result<HalfSquareReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime { n: p });
    }
    if p % 8 != 7 {
        return Err(Error::WrongResidueClass {
            p,
            requirement: "p = 7 mod 8",
        });
    }
    let sqrt_p = half_square_holds(p)?;
    let sqrt_2p = half_square_holds(2 * p)?;
    Ok(HalfSquareReport { sqrt_p, sqrt_2p })
}

fn half_square_holds(d: u64) -> Result<bool> {
    let sol = solve_norm_two(d)?.ok_or(Error::NoNormTwoSolution { d })?;
    let unit = fundamental_unit(d)?;
    // (x + y*sqrt(d))^2 = (x^2 + d y^2) + 2xy*sqrt(d), to be compared
    // against 2*(X + Y*sqrt(d)) componentwise.
    let lhs_rat = &sol.x * &sol.x + BigUint::from(d) * &sol.y * &sol.y;
    let lhs_irr = BigUint::from(2u32) * &sol.x * &sol.y;
    Ok(lhs_rat == BigUint::from(2u32) * &unit.x && lhs_irr == BigUint::from(2u32) * &unit.y)
}

/// Three local-square checks for p = 15 mod 16, all expected to hold:
/// 2 + sqrt(2) and 2 - sqrt(2) are squares mod p, and the x-coordinates of
/// the norm-two solutions for d = p and d = 2p are squares mod p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalSquareReport {
    pub two_plus_minus_sqrt2: bool,
    pub norm_two_x_sqrt_p: bool,
    pub norm_two_x_sqrt_2p: bool,
}

impl LocalSquareReport {
    pub fn all_hold(&self) -> bool {
        self.two_plus_minus_sqrt2 && self.norm_two_x_sqrt_p && self.norm_two_x_sqrt_2p
    }
}

/// Run the local-square checks for a prime p = 15 mod 16.
pub fn local_square_suite(p: u64) -> Result<LocalSquareReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime { n: p });
    }
    if p % 16 != 15 {
        return Err(Error::WrongResidueClass {
            p,
            requirement: "p = 15 mod 16",
        });
    }
    let t = modular::sqrt_mod(2, p)?.ok_or_else(|| Error::InvariantViolation {
        what: format!("2 must be a quadratic residue mod {p}"),
    })?;
    let plus = modular::jacobi(2 + t as i128, p as i128)?;
    let minus = modular::jacobi(2 - t as i128, p as i128)?;

    let xp = solve_norm_two(p)?.ok_or(Error::NoNormTwoSolution { d: p })?.x;
    let x2p = solve_norm_two(2 * p)?.ok_or(Error::NoNormTwoSolution { d: 2 * p })?.x;
    let jp = modular::jacobi_big(&BigInt::from(xp), &BigInt::from(p))?;
    let j2p = modular::jacobi_big(&BigInt::from(x2p), &BigInt::from(p))?;

    Ok(LocalSquareReport {
        two_plus_minus_sqrt2: plus == Symbol::Plus && minus == Symbol::Plus,
        norm_two_x_sqrt_p: jp == Symbol::Plus,
        norm_two_x_sqrt_2p: j2p == Symbol::Plus,
    })
}
