//! Sparse noncommutative polynomials and degree-truncated series over a
//! [`Coeff`] domain.
//!
//! Products: concatenation, shuffle `⧢` and half-shuffle `≺`, where
//! `1 ≺ (tH) = 0`, `(tH) ≺ 1 = tH` and `(tH) ≺ R = t(H ⧢ R)`.
//! Word maps: the antipode `a(w) = (−1)^{|w|} w̃`, the right-normed
//! bracketing `r`, its adjoint `ř`, and the pair `(v̄, v̂)`.
//!
//! Truncation is expressed by an optional cap on word length; every
//! product discards words longer than the cap.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::alphabet::{canonical_cmp, Word};
use crate::coeff::{inv_factorial, Coeff, Q};
use crate::error::{domain, Result};

/// Finitely supported map `Word → C` without stored zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct NcPoly<C> {
    terms: HashMap<Word, C>,
}

impl<C: Coeff> Default for NcPoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

fn fits(len: usize, cap: Option<usize>) -> bool {
    cap.is_none_or(|c| len <= c)
}

impl<C: Coeff> NcPoly<C> {
    pub fn zero() -> Self {
        NcPoly { terms: HashMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(Word::new(), C::one())
    }

    pub fn letter(t: u8) -> Self {
        Self::monomial(Word::from_slice(&[t]), C::one())
    }

    pub fn word(w: &[u8]) -> Self {
        Self::monomial(Word::from_slice(w), C::one())
    }

    pub fn monomial(w: Word, c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(w, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, C)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (w, c) in it {
            p.add_term(w, c);
        }
        p
    }

    /// Adds `c·w`, removing the entry if it cancels.
    pub fn add_term(&mut self, w: Word, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn coeff(&self, w: &[u8]) -> C {
        self.terms.get(w).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&[])
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &C)> {
        self.terms.iter()
    }

    /// Terms in canonical order (length, then lexicographic).
    pub fn sorted_terms(&self) -> Vec<(Word, C)> {
        let mut v: Vec<(Word, C)> = self.terms.iter().map(|(w, c)| (w.clone(), c.clone())).collect();
        v.sort_by(|a, b| canonical_cmp(&a.0, &b.0));
        v
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|w| w.len()).max()
    }

    /// Largest coefficient magnitude (0 for the zero polynomial).
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    pub fn truncate(&self, cap: usize) -> Self {
        NcPoly { terms: self.terms.iter().filter(|(w, _)| w.len() <= cap).map(|(w, c)| (w.clone(), c.clone())).collect() }
    }

    pub fn homogeneous(&self, d: usize) -> Self {
        NcPoly { terms: self.terms.iter().filter(|(w, _)| w.len() == d).map(|(w, c)| (w.clone(), c.clone())).collect() }
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, v)| (w.clone(), v.clone() * c.clone())))
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> NcPoly<D> {
        NcPoly::from_terms(self.terms.iter().map(|(w, c)| (w.clone(), f(c))))
    }

    /// Image under a letter relabelling.
    pub fn map_letters(&self, f: impl Fn(u8) -> u8) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, c)| (w.iter().map(|&t| f(t)).collect(), c.clone())))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).max_abs() <= tol
    }

    pub fn conc_mul_cap(&self, other: &Self, cap: Option<usize>) -> Self {
        let mut out = Self::zero();
        for (u, a) in &self.terms {
            if !fits(u.len(), cap) {
                continue;
            }
            for (v, b) in &other.terms {
                if !fits(u.len() + v.len(), cap) {
                    continue;
                }
                let mut w = u.clone();
                w.extend_from_slice(v);
                out.add_term(w, a.clone() * b.clone());
            }
        }
        out
    }

    pub fn conc_mul(&self, other: &Self) -> Self {
        self.conc_mul_cap(other, None)
    }

    pub fn shuffle_mul_cap(&self, other: &Self, cap: Option<usize>) -> Self {
        let mut out = Self::zero();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                if !fits(u.len() + v.len(), cap) {
                    continue;
                }
                let ab = a.clone() * b.clone();
                for (w, m) in shuffle_words(u, v) {
                    out.add_term(w, ab.clone() * C::from_i64(m as i64));
                }
            }
        }
        out
    }

    pub fn shuffle_mul(&self, other: &Self) -> Self {
        self.shuffle_mul_cap(other, None)
    }

    pub fn half_shuffle_mul_cap(&self, other: &Self, cap: Option<usize>) -> Self {
        let mut out = Self::zero();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                if !fits(u.len() + v.len(), cap) {
                    continue;
                }
                let ab = a.clone() * b.clone();
                for (w, m) in half_shuffle_words(u, v) {
                    out.add_term(w, ab.clone() * C::from_i64(m as i64));
                }
            }
        }
        out
    }

    pub fn half_shuffle_mul(&self, other: &Self) -> Self {
        self.half_shuffle_mul_cap(other, None)
    }

    /// `Σ_w ⟨self|w⟩⟨other|w⟩`.
    pub fn pairing(&self, other: &Self) -> C {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let mut acc = C::zero();
        for (w, c) in &small.terms {
            if let Some(d) = large.terms.get(w) {
                acc += c.clone() * d.clone();
            }
        }
        acc
    }

    /// Linear extension of `w ↦ (−1)^{|w|} reverse(w)`.
    pub fn antipode(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, c)| {
            let r: Word = w.iter().rev().cloned().collect();
            let c = if w.len() % 2 == 1 { -c.clone() } else { c.clone() };
            (r, c)
        }))
    }

    /// Lie bracket `[p, q] = pq − qp`.
    pub fn bracket_cap(&self, other: &Self, cap: Option<usize>) -> Self {
        &self.conc_mul_cap(other, cap) - &other.conc_mul_cap(self, cap)
    }

    pub fn bracket(&self, other: &Self) -> Self {
        self.bracket_cap(other, None)
    }

    /// `p^k` for the concatenation product.
    pub fn conc_pow(&self, k: usize, cap: Option<usize>) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = out.conc_mul_cap(self, cap);
        }
        out
    }

    /// `p^{⧢k}`.
    pub fn shuffle_pow(&self, k: usize, cap: Option<usize>) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = out.shuffle_mul_cap(self, cap);
        }
        out
    }

    /// Replace each letter `t` by `images(t)`, keeping words of length `≤ cap`
    /// (images are assumed to have no constant term).
    pub fn substitute(&self, images: &dyn Fn(u8) -> NcPoly<C>, cap: usize) -> Self {
        let mut cache: HashMap<u8, NcPoly<C>> = HashMap::new();
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            if w.len() > cap {
                continue;
            }
            let mut acc = Self::monomial(Word::new(), c.clone());
            for &t in w.iter() {
                let img = cache.entry(t).or_insert_with(|| images(t)).clone();
                acc = acc.conc_mul_cap(&img, Some(cap));
                if acc.is_zero() {
                    break;
                }
            }
            out = &out + &acc;
        }
        out
    }
}

impl NcPoly<Q> {
    /// Embed a rational polynomial into another coefficient domain.
    pub fn convert<D: Coeff>(&self) -> NcPoly<D> {
        self.map_coeffs(|c| D::from_q(c))
    }
}

impl<C: Coeff> Add for &NcPoly<C> {
    type Output = NcPoly<C>;
    fn add(self, rhs: Self) -> NcPoly<C> {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for &NcPoly<C> {
    type Output = NcPoly<C>;
    fn sub(self, rhs: Self) -> NcPoly<C> {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -c.clone());
        }
        out
    }
}

impl<C: Coeff> Neg for &NcPoly<C> {
    type Output = NcPoly<C>;
    fn neg(self) -> NcPoly<C> {
        NcPoly { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c.clone())).collect() }
    }
}

impl<C: Coeff> Mul for &NcPoly<C> {
    type Output = NcPoly<C>;
    fn mul(self, rhs: Self) -> NcPoly<C> {
        self.conc_mul(rhs)
    }
}

/// All interleavings of `u` and `v` with multiplicities.
pub fn shuffle_words(u: &[u8], v: &[u8]) -> Vec<(Word, u64)> {
    if u.is_empty() {
        return vec![(Word::from_slice(v), 1)];
    }
    if v.is_empty() {
        return vec![(Word::from_slice(u), 1)];
    }
    let n = u.len() + v.len();
    assert!(n <= 60, "shuffle of words longer than 60 letters");
    let mut counts: HashMap<Word, u64> = HashMap::new();
    // Bitmask of positions taken by u; Gosper's hack walks all C(n, |u|) masks.
    let k = u.len();
    let mut mask: u64 = (1u64 << k) - 1;
    let limit: u64 = 1u64 << n;
    while mask < limit {
        let (mut i, mut j) = (0, 0);
        let mut w = Word::with_capacity(n);
        for p in 0..n {
            if mask >> p & 1 == 1 {
                w.push(u[i]);
                i += 1;
            } else {
                w.push(v[j]);
                j += 1;
            }
        }
        *counts.entry(w).or_insert(0) += 1;
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    counts.into_iter().collect()
}

/// `u ≺ v` on words.
pub fn half_shuffle_words(u: &[u8], v: &[u8]) -> Vec<(Word, u64)> {
    if u.is_empty() {
        return Vec::new();
    }
    if v.is_empty() {
        return vec![(Word::from_slice(u), 1)];
    }
    shuffle_words(&u[1..], v)
        .into_iter()
        .map(|(w, m)| {
            let mut x = Word::with_capacity(w.len() + 1);
            x.push(u[0]);
            x.extend_from_slice(&w);
            (x, m)
        })
        .collect()
}

/// `r(t1…tm) = [t1, [t2, … [t_{m−1}, t_m]…]]`, with `r(1) = 0`.
pub fn right_bracketing<C: Coeff>(w: &[u8]) -> NcPoly<C> {
    match w.len() {
        0 => NcPoly::zero(),
        1 => NcPoly::letter(w[0]),
        _ => NcPoly::letter(w[0]).bracket(&right_bracketing(&w[1..])),
    }
}

/// `ř(t) = t`, `ř(t1 w t2) = t1 ř(w t2) − t2 ř(t1 w)`, `ř(1) = 0`.
pub fn adjoint_rcheck<C: Coeff>(w: &[u8]) -> NcPoly<C> {
    match w.len() {
        0 => NcPoly::zero(),
        1 => NcPoly::letter(w[0]),
        n => {
            let left = NcPoly::letter(w[0]).conc_mul(&adjoint_rcheck(&w[1..]));
            let right = NcPoly::letter(w[n - 1]).conc_mul(&adjoint_rcheck(&w[..n - 1]));
            &left - &right
        }
    }
}

/// `(v̄, v̂)`: `v̄ = t1 ⧢ … ⧢ tm` and `v̂ = ⧢_t t^{|v|_t}`.
pub fn bar_hat<C: Coeff>(w: &[u8]) -> (NcPoly<C>, NcPoly<C>) {
    let mut bar = NcPoly::one();
    for &t in w {
        bar = bar.shuffle_mul(&NcPoly::letter(t));
    }
    let mut counts: Vec<(u8, usize)> = Vec::new();
    for &t in w {
        match counts.iter_mut().find(|(s, _)| *s == t) {
            Some(e) => e.1 += 1,
            None => counts.push((t, 1)),
        }
    }
    let mut hat = NcPoly::one();
    for (t, k) in counts {
        hat = hat.shuffle_mul(&NcPoly::word(&vec![t; k]));
    }
    (bar, hat)
}

/// A polynomial together with a word-length cap.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<C> {
    pub poly: NcPoly<C>,
    pub cap: usize,
}

impl<C: Coeff> TruncatedSeries<C> {
    pub fn new(poly: NcPoly<C>, cap: usize) -> Self {
        TruncatedSeries { poly: poly.truncate(cap), cap }
    }

    pub fn one(cap: usize) -> Self {
        Self::new(NcPoly::one(), cap)
    }

    pub fn coeff(&self, w: &[u8]) -> C {
        self.poly.coeff(w)
    }

    fn join_cap(&self, other: &Self) -> usize {
        self.cap.min(other.cap)
    }

    pub fn conc_mul(&self, other: &Self) -> Self {
        let cap = self.join_cap(other);
        TruncatedSeries { poly: self.poly.conc_mul_cap(&other.poly, Some(cap)), cap }
    }

    pub fn shuffle_mul(&self, other: &Self) -> Self {
        let cap = self.join_cap(other);
        TruncatedSeries { poly: self.poly.shuffle_mul_cap(&other.poly, Some(cap)), cap }
    }

    pub fn antipode(&self) -> Self {
        TruncatedSeries { poly: self.poly.antipode(), cap: self.cap }
    }

    pub fn star(&self) -> Result<Self> {
        Ok(TruncatedSeries { poly: star_trunc(&self.poly, self.cap)?, cap: self.cap })
    }

    pub fn exp(&self) -> Result<Self> {
        Ok(TruncatedSeries { poly: exp_trunc(&self.poly, self.cap)?, cap: self.cap })
    }

    pub fn log(&self) -> Result<Self> {
        Ok(TruncatedSeries { poly: log_trunc(&self.poly, self.cap)?, cap: self.cap })
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(TruncatedSeries { poly: inverse_trunc(&self.poly, self.cap)?, cap: self.cap })
    }
}

/// `1 + s + s² + …` truncated; requires `⟨s|1⟩ = 0`.
pub fn star_trunc<C: Coeff>(s: &NcPoly<C>, cap: usize) -> Result<NcPoly<C>> {
    if !s.constant_term().is_zero() {
        return domain("star requires a series without constant term");
    }
    let s = s.truncate(cap);
    let mut out = NcPoly::one();
    let mut pow = NcPoly::one();
    for _ in 0..cap {
        pow = pow.conc_mul_cap(&s, Some(cap));
        if pow.is_zero() {
            break;
        }
        out = &out + &pow;
    }
    Ok(out)
}

/// Concatenation exponential, truncated; requires `⟨s|1⟩ = 0`.
pub fn exp_trunc<C: Coeff>(s: &NcPoly<C>, cap: usize) -> Result<NcPoly<C>> {
    if !s.constant_term().is_zero() {
        return domain("exp requires a series without constant term");
    }
    let s = s.truncate(cap);
    let mut out = NcPoly::one();
    let mut pow = NcPoly::one();
    for k in 1..=cap {
        pow = pow.conc_mul_cap(&s, Some(cap));
        if pow.is_zero() {
            break;
        }
        out = &out + &pow.scale(&inv_factorial(k));
    }
    Ok(out)
}

/// Concatenation logarithm, truncated; requires `⟨s|1⟩ = 1`.
pub fn log_trunc<C: Coeff>(s: &NcPoly<C>, cap: usize) -> Result<NcPoly<C>> {
    if !s.constant_term().approx_eq(&C::one(), 1e-12) {
        return domain("log requires constant term 1");
    }
    let mut x = s.truncate(cap);
    x.terms.remove(&Word::new());
    let mut out = NcPoly::zero();
    let mut pow = NcPoly::one();
    for k in 1..=cap {
        pow = pow.conc_mul_cap(&x, Some(cap));
        if pow.is_zero() {
            break;
        }
        let c = C::ratio(if k % 2 == 1 { 1 } else { -1 }, k as i64);
        out = &out + &pow.scale(&c);
    }
    Ok(out)
}

/// Concatenation inverse, truncated; requires an invertible constant term.
pub fn inverse_trunc<C: Coeff>(s: &NcPoly<C>, cap: usize) -> Result<NcPoly<C>> {
    let c0 = s.constant_term();
    let Some(c0inv) = c0.inv() else {
        return domain("inverse requires an invertible constant term");
    };
    let mut y = s.truncate(cap).scale(&c0inv);
    y.terms.remove(&Word::new());
    let neg = -&y;
    Ok(star_trunc(&neg, cap)?.scale(&c0inv))
}

mod tensor;
pub use tensor::{LegProduct, TensorPoly};
