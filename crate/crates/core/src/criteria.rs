//! Decision trees for the 2-adic valuations: ord_2(h(-2p)) from residue
//! classes and residue symbols, ord_2 of the class number of Q(p^(1/4))
//! from the companion criteria, and the cross-field relation between them.
//!
//! Predictions carry an exactness flag: `exact = false` means the value is
//! only a proven lower bound, because no finer criterion is known on that
//! branch. The quartic-field class number is never computed exactly here;
//! every statement about it is a prediction.

use crate::error::{Error, Result};
use crate::modular::{self, is_prime, Symbol};
use crate::zsqrt2;
use serde::Serialize;

/// Criterion branches, named after the classical sources where one exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    // ord_2(h(-2p))
    Redei3Mod8,
    Hasse7Mod16,
    Lw15Mod16,
    Lw15Mod16Floor,
    Quartic2OneMod8,
    QuarticUOneMod8,
    OneMod8Floor,
    // ord_2(h_K)
    Parry3Mod8,
    Parry7Mod16,
    Lemmermeyer9Mod16,
    Quartic2OneMod16,
    OneMod16Floor,
    FifteenMod16Floor,
    Conjecture15Mod16,
    Conjecture15Mod16Floor,
}

impl Branch {
    pub fn tag(self) -> &'static str {
        match self {
            Branch::Redei3Mod8 => "Redei-3mod8",
            Branch::Hasse7Mod16 => "Hasse-7mod16",
            Branch::Lw15Mod16 => "LW-15mod16",
            Branch::Lw15Mod16Floor => "LW-15mod16-lb",
            Branch::Quartic2OneMod8 => "quartic2-1mod8",
            Branch::QuarticUOneMod8 => "quarticU-1mod8",
            Branch::OneMod8Floor => "1mod8-lb",
            Branch::Parry3Mod8 => "Parry-3mod8",
            Branch::Parry7Mod16 => "Parry-7mod16",
            Branch::Lemmermeyer9Mod16 => "Lemmermeyer-9mod16",
            Branch::Quartic2OneMod16 => "quartic2-1mod16",
            Branch::OneMod16Floor => "1mod16-lb",
            Branch::FifteenMod16Floor => "15mod16-lb",
            Branch::Conjecture15Mod16 => "conjecture-15mod16",
            Branch::Conjecture15Mod16Floor => "conjecture-15mod16-lb",
        }
    }
}

/// A predicted 2-adic valuation together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ord2Prediction {
    pub value: u32,
    /// true: the criterion pins the valuation exactly; false: lower bound.
    pub exact: bool,
    pub branch: Branch,
    /// Residue symbols the branch consulted, in evaluation order.
    pub symbols_used: Vec<(&'static str, Symbol)>,
}

impl Ord2Prediction {
    fn exact(value: u32, branch: Branch, symbols_used: Vec<(&'static str, Symbol)>) -> Self {
        Ord2Prediction { value, exact: true, branch, symbols_used }
    }

    fn floor(value: u32, branch: Branch, symbols_used: Vec<(&'static str, Symbol)>) -> Self {
        Ord2Prediction { value, exact: false, branch, symbols_used }
    }
}

/// Sign (-1)^((p+1)/16) for p = 15 mod 16.
pub fn sign_sixteen(p: u64) -> Symbol {
    debug_assert_eq!(p % 16, 15);
    Symbol::from_exponent_parity((p + 1) / 16)
}

/// Predicted ord_2(h(-2p)) for an odd prime p.
///
/// Exact on every branch except the two where only "16 | h" (residue
/// criteria exhausted) is known; there the value 4 is a lower bound.
pub fn predict_ord2_h2p(p: u64) -> Result<Ord2Prediction> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime { n: p });
    }
    match p % 8 {
        3 | 5 => Ok(Ord2Prediction::exact(1, Branch::Redei3Mod8, vec![])),
        7 => {
            if p % 16 == 7 {
                return Ok(Ord2Prediction::exact(2, Branch::Hasse7Mod16, vec![]));
            }
            let inv = zsqrt2::invariant(p)?;
            let eps = sign_sixteen(p);
            let used = vec![("inv", inv), ("eps16", eps)];
            if eps * inv == Symbol::Minus {
                Ok(Ord2Prediction::exact(3, Branch::Lw15Mod16, used))
            } else {
                Ok(Ord2Prediction::floor(4, Branch::Lw15Mod16Floor, used))
            }
        }
        1 => {
            let q2 = modular::quartic_symbol_2(p)?;
            if q2 == Symbol::Minus {
                return Ok(Ord2Prediction::exact(2, Branch::Quartic2OneMod8, vec![("quartic2", q2)]));
            }
            // (u/p)_4 is defined here: (2/p)_4 = +1 forces (u/p) = +1.
            let dec = zsqrt2::decompose(p)?;
            let qu = modular::quartic_symbol(dec.u as i64, p)?;
            let used = vec![("quartic2", q2), ("quarticU", qu)];
            if qu == Symbol::Minus {
                Ok(Ord2Prediction::exact(3, Branch::QuarticUOneMod8, used))
            } else {
                Ok(Ord2Prediction::floor(4, Branch::OneMod8Floor, used))
            }
        }
        _ => unreachable!("odd prime"),
    }
}

/// Predicted ord_2 of the class number of Q(p^(1/4)).
///
/// With `assume_conjecture` the p = 15 mod 16 branch is refined by the
/// decomposition invariant; that refinement is conjectural and callers must
/// label it as such.
pub fn predict_ord2_hk(p: u64, assume_conjecture: bool) -> Result<Ord2Prediction> {
    if p == 2 {
        return Ok(Ord2Prediction::exact(0, Branch::Parry3Mod8, vec![]));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime { n: p });
    }
    match p % 16 {
        3 | 5 | 11 | 13 => Ok(Ord2Prediction::exact(0, Branch::Parry3Mod8, vec![])),
        7 => Ok(Ord2Prediction::exact(1, Branch::Parry7Mod16, vec![])),
        9 => Ok(Ord2Prediction::exact(1, Branch::Lemmermeyer9Mod16, vec![])),
        1 => {
            let q2 = modular::quartic_symbol_2(p)?;
            if q2 == Symbol::Minus {
                Ok(Ord2Prediction::exact(1, Branch::Quartic2OneMod16, vec![("quartic2", q2)]))
            } else {
                Ok(Ord2Prediction::floor(2, Branch::OneMod16Floor, vec![("quartic2", q2)]))
            }
        }
        15 => {
            if !assume_conjecture {
                return Ok(Ord2Prediction::floor(2, Branch::FifteenMod16Floor, vec![]));
            }
            let inv = zsqrt2::invariant(p)?;
            let used = vec![("inv", inv)];
            if inv == Symbol::Minus {
                Ok(Ord2Prediction::exact(2, Branch::Conjecture15Mod16, used))
            } else {
                Ok(Ord2Prediction::floor(3, Branch::Conjecture15Mod16Floor, used))
            }
        }
        _ => unreachable!("odd prime"),
    }
}

/// Where both sides are pinned exactly (p = +-3 mod 8 or p = 7 mod 16),
/// check ord_2(h(-2p)) = ord_2(h_K) + 1; `None` outside those cases.
pub fn relation_check(p: u64) -> Result<Option<bool>> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime { n: p });
    }
    if !(p % 8 == 3 || p % 8 == 5 || p % 16 == 7) {
        return Ok(None);
    }
    let h2p = predict_ord2_h2p(p)?;
    let hk = predict_ord2_hk(p, false)?;
    Ok(Some(h2p.exact && hk.exact && h2p.value == hk.value + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h2p_known_values() {
        let pr = predict_ord2_h2p(7).unwrap();
        assert_eq!((pr.value, pr.exact, pr.branch.tag()), (2, true, "Hasse-7mod16"));
        let pr = predict_ord2_h2p(31).unwrap();
        assert_eq!((pr.value, pr.exact), (3, true));
        let pr = predict_ord2_h2p(17).unwrap();
        assert_eq!((pr.value, pr.exact), (2, true));
        let pr = predict_ord2_h2p(73).unwrap();
        assert_eq!((pr.value, pr.exact), (4, false));
        let pr = predict_ord2_h2p(5).unwrap();
        assert_eq!((pr.value, pr.exact, pr.branch.tag()), (1, true, "Redei-3mod8"));
        assert!(predict_ord2_h2p(2).is_err());
        assert!(predict_ord2_h2p(9).is_err());
    }

    #[test]
    fn hk_known_values() {
        let pr = predict_ord2_hk(5, false).unwrap();
        assert_eq!((pr.value, pr.exact), (0, true));
        let pr = predict_ord2_hk(7, false).unwrap();
        assert_eq!((pr.value, pr.exact), (1, true));
        let pr = predict_ord2_hk(17, false).unwrap();
        assert_eq!((pr.value, pr.exact), (1, true));
        let pr = predict_ord2_hk(31, true).unwrap();
        assert_eq!((pr.value, pr.exact, pr.branch.tag()), (2, true, "conjecture-15mod16"));
        let pr = predict_ord2_hk(47, true).unwrap();
        assert_eq!((pr.value, pr.exact, pr.branch.tag()), (3, false, "conjecture-15mod16-lb"));
        let pr = predict_ord2_hk(2, false).unwrap();
        assert_eq!((pr.value, pr.exact), (0, true));
        // Without the conjecture only the floor of 2 is available.
        let pr = predict_ord2_hk(31, false).unwrap();
        assert_eq!((pr.value, pr.exact), (2, false));
        // p = 9 mod 16 and p = 7 mod 16 take distinct branches, same value.
        assert_eq!(predict_ord2_hk(41, false).unwrap().branch.tag(), "Lemmermeyer-9mod16");
        assert_eq!(predict_ord2_hk(23, false).unwrap().branch.tag(), "Parry-7mod16");
    }

    #[test]
    fn hk_never_consults_quartic_u() {
        for p in crate::modular::PrimeStream::new(2, 2000) {
            for conj in [false, true] {
                let pr = predict_ord2_hk(p, conj).unwrap();
                assert!(
                    pr.symbols_used.iter().all(|(name, _)| *name != "quarticU"),
                    "p = {p}"
                );
            }
        }
    }

    #[test]
    fn h2p_consults_quartic_u_only_behind_quartic2_plus() {
        for p in crate::modular::PrimeStream::new(3, 5000) {
            let pr = predict_ord2_h2p(p).unwrap();
            let quartic_u = pr.symbols_used.iter().find(|(n, _)| *n == "quarticU");
            if quartic_u.is_some() {
                let q2 = pr
                    .symbols_used
                    .iter()
                    .find(|(n, _)| *n == "quartic2")
                    .expect("quartic2 must be evaluated first");
                assert_eq!(q2.1, Symbol::Plus, "p = {p}");
            }
        }
    }

    #[test]
    fn relation_known_values() {
        assert_eq!(relation_check(5).unwrap(), Some(true));
        assert_eq!(relation_check(7).unwrap(), Some(true));
        assert_eq!(relation_check(31).unwrap(), None);
        assert_eq!(relation_check(17).unwrap(), None);
        assert!(relation_check(2).is_err());
    }
}
