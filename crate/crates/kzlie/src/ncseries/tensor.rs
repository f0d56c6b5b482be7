use std::collections::HashMap;
use std::ops::{Add, Sub};

use crate::alphabet::{canonical_cmp, Word};
use crate::coeff::{inv_factorial, Coeff};
use crate::error::{domain, Result};

use super::{half_shuffle_words, shuffle_words};

/// Product used on one leg of a tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LegProduct {
    Conc,
    Shuffle,
    HalfShuffle,
}

impl LegProduct {
    fn words(self, u: &[u8], v: &[u8]) -> Vec<(Word, u64)> {
        match self {
            LegProduct::Conc => {
                let mut w = Word::from_slice(u);
                w.extend_from_slice(v);
                vec![(w, 1)]
            }
            LegProduct::Shuffle => shuffle_words(u, v),
            LegProduct::HalfShuffle => half_shuffle_words(u, v),
        }
    }
}

/// Finitely supported map `(Word, Word) → C`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorPoly<C> {
    terms: HashMap<(Word, Word), C>,
}

impl<C: Coeff> Default for TensorPoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> TensorPoly<C> {
    pub fn zero() -> Self {
        TensorPoly { terms: HashMap::new() }
    }

    /// `1 ⊗ 1`.
    pub fn one() -> Self {
        let mut t = Self::zero();
        t.add_term(Word::new(), Word::new(), C::one());
        t
    }

    pub fn add_term(&mut self, u: Word, v: Word, c: C) {
        if c.is_zero() {
            return;
        }
        let key = (u, v);
        let new = match self.terms.get(&key) {
            Some(old) => old.clone() + c,
            None => c,
        };
        if new.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, new);
        }
    }

    /// `Σ_{(u,c),(v,d)} c·d · u ⊗ v`.
    pub fn tensor(left: &super::NcPoly<C>, right: &super::NcPoly<C>) -> Self {
        let mut t = Self::zero();
        for (u, a) in left.iter() {
            for (v, b) in right.iter() {
                t.add_term(u.clone(), v.clone(), a.clone() * b.clone());
            }
        }
        t
    }

    pub fn coeff(&self, u: &[u8], v: &[u8]) -> C {
        self.terms.get(&(Word::from_slice(u), Word::from_slice(v))).cloned().unwrap_or_else(C::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Word, Word), &C)> {
        self.terms.iter()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    pub fn sorted_terms(&self) -> Vec<(Word, Word, C)> {
        let mut v: Vec<(Word, Word, C)> =
            self.terms.iter().map(|((u, w), c)| (u.clone(), w.clone(), c.clone())).collect();
        v.sort_by(|a, b| canonical_cmp(&a.0, &b.0).then_with(|| canonical_cmp(&a.1, &b.1)));
        v
    }

    pub fn truncate(&self, cap: usize) -> Self {
        TensorPoly {
            terms: self
                .terms
                .iter()
                .filter(|((u, v), _)| u.len() <= cap && v.len() <= cap)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut t = Self::zero();
        for ((u, v), d) in &self.terms {
            t.add_term(u.clone(), v.clone(), d.clone() * c.clone());
        }
        t
    }

    /// Componentwise product with `left` on the first leg and `right` on the second.
    pub fn mul(&self, other: &Self, left: LegProduct, right: LegProduct, cap: Option<usize>) -> Self {
        let mut out = Self::zero();
        for ((u1, v1), a) in &self.terms {
            for ((u2, v2), b) in &other.terms {
                if cap.is_some_and(|c| u1.len() + u2.len() > c || v1.len() + v2.len() > c) {
                    continue;
                }
                let ab = a.clone() * b.clone();
                let lw = left.words(u1, u2);
                if lw.is_empty() {
                    continue;
                }
                let rw = right.words(v1, v2);
                for (lu, lm) in &lw {
                    for (rv, rm) in &rw {
                        out.add_term(lu.clone(), rv.clone(), ab.clone() * C::from_i64((lm * rm) as i64));
                    }
                }
            }
        }
        out
    }

    /// `Σ_k x^k / k!` for the given leg products; requires no `1⊗1` term.
    pub fn exp(&self, left: LegProduct, right: LegProduct, cap: usize) -> Result<Self> {
        if !self.coeff(&[], &[]).is_zero() {
            return domain("tensor exp requires a zero 1⊗1 coefficient");
        }
        let x = self.truncate(cap);
        let mut out = Self::one();
        let mut pow = Self::one();
        for k in 1..=2 * cap {
            pow = pow.mul(&x, left, right, Some(cap));
            if pow.is_zero() {
                break;
            }
            out = &out + &pow.scale(&inv_factorial(k));
        }
        Ok(out)
    }

    /// Logarithm for the given leg products; requires `1⊗1` coefficient 1.
    pub fn log(&self, left: LegProduct, right: LegProduct, cap: usize) -> Result<Self> {
        if !self.coeff(&[], &[]).approx_eq(&C::one(), 1e-12) {
            return domain("tensor log requires 1⊗1 coefficient 1");
        }
        let mut x = self.truncate(cap);
        x.terms.remove(&(Word::new(), Word::new()));
        let mut out = Self::zero();
        let mut pow = Self::one();
        for k in 1..=2 * cap {
            pow = pow.mul(&x, left, right, Some(cap));
            if pow.is_zero() {
                break;
            }
            let c = C::ratio(if k % 2 == 1 { 1 } else { -1 }, k as i64);
            out = &out + &pow.scale(&c);
        }
        Ok(out)
    }

    /// Apply a linear functional to the left leg.
    pub fn contract_left(&self, f: impl Fn(&[u8]) -> C) -> super::NcPoly<C> {
        let mut p = super::NcPoly::zero();
        for ((u, v), c) in &self.terms {
            p.add_term(v.clone(), f(u) * c.clone());
        }
        p
    }
}

impl<C: Coeff> Add for &TensorPoly<C> {
    type Output = TensorPoly<C>;
    fn add(self, rhs: Self) -> TensorPoly<C> {
        let mut out = self.clone();
        for ((u, v), c) in &rhs.terms {
            out.add_term(u.clone(), v.clone(), c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for &TensorPoly<C> {
    type Output = TensorPoly<C>;
    fn sub(self, rhs: Self) -> TensorPoly<C> {
        let mut out = self.clone();
        for ((u, v), c) in &rhs.terms {
            out.add_term(u.clone(), v.clone(), -c.clone());
        }
        out
    }
}
