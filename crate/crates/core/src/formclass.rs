//! Exact class numbers of imaginary quadratic orders by enumerating the
//! reduced primitive positive-definite binary quadratic forms (a, b, c) of
//! discriminant D = b^2 - 4ac < 0.
//!
//! Reduced means |b| <= a <= c with b >= 0 whenever |b| = a or a = c; the
//! reduced primitive forms biject with the ideal classes, so counting them
//! gives h(D) exactly. Ambiguous classes (b = 0, b = a or a = c) count the
//! genera, which certifies the 2-rank.

use crate::error::{Error, Result};
use crate::modular::is_prime;
use serde::Serialize;

/// A reduced primitive positive-definite form a x^2 + b xy + c y^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReducedForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl ReducedForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        a > 0 && c > 0 && b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a.unsigned_abs(), self.b.unsigned_abs()), self.c.unsigned_abs()) == 1
    }

    pub fn is_ambiguous(&self) -> bool {
        self.b == 0 || self.b == self.a || self.a == self.c
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Class data of a negative discriminant: the class number, its 2-adic
/// valuation and the number of ambiguous classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FormClassSummary {
    pub d: i64,
    pub h: u64,
    pub ord2: u32,
    pub ambiguous: u64,
}

/// All reduced primitive forms of discriminant D < 0, D = 0 or 1 mod 4,
/// ordered by (a, b).
pub fn reduced_forms(d: i64) -> Result<Vec<ReducedForm>> {
    if d >= 0 || d.rem_euclid(4) > 1 {
        return Err(Error::BadDiscriminant { d });
    }
    let mut forms = Vec::new();
    let abs_d = d.unsigned_abs();
    let a_max = (abs_d / 3).isqrt() as i64;
    for a in 1..=a_max {
        let four_a = 4 * a;
        // b runs over -a..=a with the parity of D.
        let mut b = -a + (a + d.rem_euclid(2)) % 2;
        while b <= a {
            let num = b as i128 * b as i128 - d as i128;
            if num % (four_a as i128) == 0 {
                let c = (num / (four_a as i128)) as i64;
                if c >= a && !((b.abs() == a || a == c) && b < 0) {
                    let form = ReducedForm { a, b, c };
                    if form.is_primitive() {
                        if !form.is_reduced() || form.discriminant() != d {
                            return Err(Error::InvariantViolation {
                                what: format!("enumerated form {form:?} is not reduced of discriminant {d}"),
                            });
                        }
                        forms.push(form);
                    }
                }
            }
            b += 2;
        }
    }
    Ok(forms)
}

/// Exact class number of discriminant D < 0 with ambiguous-class count.
pub fn class_number(d: i64) -> Result<FormClassSummary> {
    let forms = reduced_forms(d)?;
    let h = forms.len() as u64;
    let ambiguous = forms.iter().filter(|f| f.is_ambiguous()).count() as u64;
    Ok(FormClassSummary {
        d,
        h,
        ord2: h.trailing_zeros(),
        ambiguous,
    })
}

/// Class data of Q(sqrt(-2p)), i.e. of discriminant -8p, for an odd prime.
pub fn h2p(p: u64) -> Result<FormClassSummary> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime { n: p });
    }
    class_number(-8 * p as i64)
}
