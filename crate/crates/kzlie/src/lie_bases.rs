//! Dual PBW families on Lyndon words and the tools built on them.
//!
//! `P_t = t`, `P_l = [P_{l1}, P_{l2}]` along the standard factorization and
//! `P_w = P_{l1} … P_{lk}` along the nonincreasing Lyndon factorization.
//! `S_t = t`, `S_l = t·S_{l'}` for `l = t l'` and
//! `S_w = S_{l1}^{⧢i1} ⧢ … ⧢ S_{lk}^{⧢ik} / (i1! … ik!)`.
//! The two families satisfy `⟨P_u, S_v⟩ = δ_{u,v}`.

use std::collections::HashMap;

use crate::alphabet::{
    enumerate_lyndon_over, lyndon_factorization, standard_factorization, word_count, words_of_length, words_up_to,
    Word,
};
use crate::coeff::{inv_factorial, Coeff, Q};
use crate::error::{domain, Error, Result};
use crate::ncseries::{exp_trunc, NcPoly};

/// Upper bound on the number of cached words.
pub const BASIS_WORD_LIMIT: u64 = 400_000;

/// Lyndon words, standard factorizations and both PBW families up to a cap.
#[derive(Debug, Clone)]
pub struct LyndonBasis {
    letters: Vec<u8>,
    cap: usize,
    lyndon: Vec<Word>,
    p: HashMap<Word, NcPoly<Q>>,
    s: HashMap<Word, NcPoly<Q>>,
}

impl LyndonBasis {
    /// Build over `letters` (increasing indices) for all words of length `≤ cap`.
    pub fn new(letters: &[u8], cap: usize) -> Result<Self> {
        let mut letters = letters.to_vec();
        letters.sort_unstable();
        letters.dedup();
        let total = word_count(letters.len(), cap);
        if total > BASIS_WORD_LIMIT {
            return Err(Error::Resource(format!(
                "PBW basis over {} letters up to length {cap} needs {total} words",
                letters.len()
            )));
        }
        let lyndon = if cap == 0 { Vec::new() } else { enumerate_lyndon_over(&letters, cap, BASIS_WORD_LIMIT)? };
        let mut p: HashMap<Word, NcPoly<Q>> = HashMap::new();
        let mut s: HashMap<Word, NcPoly<Q>> = HashMap::new();
        p.insert(Word::new(), NcPoly::one());
        s.insert(Word::new(), NcPoly::one());
        for d in 1..=cap {
            for w in words_of_length(&letters, d) {
                let factors = lyndon_factorization(&w);
                if factors.len() == 1 {
                    let (pl, sl) = if d == 1 {
                        (NcPoly::letter(w[0]), NcPoly::letter(w[0]))
                    } else {
                        let (l1, l2) = standard_factorization(&w)?;
                        let pl = p[&l1].bracket(&p[&l2]);
                        let sl = NcPoly::letter(w[0]).conc_mul(&s[&w[1..]]);
                        (pl, sl)
                    };
                    p.insert(w.clone(), pl);
                    s.insert(w, sl);
                } else {
                    let mut pw = NcPoly::one();
                    for f in &factors {
                        pw = pw.conc_mul(&p[f]);
                    }
                    let mut sw = NcPoly::one();
                    let mut i = 0;
                    while i < factors.len() {
                        let mut j = i;
                        while j < factors.len() && factors[j] == factors[i] {
                            j += 1;
                        }
                        let k = j - i;
                        let power = s[&factors[i]].shuffle_pow(k, None).scale(&inv_factorial::<Q>(k));
                        sw = sw.shuffle_mul(&power);
                        i = j;
                    }
                    p.insert(w.clone(), pw);
                    s.insert(w, sw);
                }
            }
        }
        Ok(LyndonBasis { letters, cap, lyndon, p, s })
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Lyndon words in increasing order.
    pub fn lyndon(&self) -> &[Word] {
        &self.lyndon
    }

    pub fn lyndon_of_degree(&self, d: usize) -> Vec<Word> {
        self.lyndon.iter().filter(|l| l.len() == d).cloned().collect()
    }

    /// All cached words, by length then lexicographically.
    pub fn words(&self) -> Vec<Word> {
        words_up_to(&self.letters, self.cap)
    }

    fn check(&self, w: &[u8]) -> Result<()> {
        if w.len() > self.cap {
            return Err(Error::Resource(format!("word of length {} exceeds basis cap {}", w.len(), self.cap)));
        }
        if w.iter().any(|t| self.letters.binary_search(t).is_err()) {
            return domain("word uses a letter outside the basis alphabet");
        }
        Ok(())
    }

    pub fn p(&self, w: &[u8]) -> Result<&NcPoly<Q>> {
        self.check(w)?;
        Ok(&self.p[w])
    }

    pub fn s(&self, w: &[u8]) -> Result<&NcPoly<Q>> {
        self.check(w)?;
        Ok(&self.s[w])
    }

    /// `{w ↦ ⟨s, S_w⟩}` over all cached words, nonzero entries only.
    pub fn pbw_decompose<C: Coeff>(&self, s: &NcPoly<C>) -> Vec<(Word, C)> {
        let mut out = Vec::new();
        for w in self.words() {
            let c = pair_q(s, &self.s[&w]);
            if !c.is_zero() {
                out.push((w, c));
            }
        }
        out
    }

    /// `Σ c_w P_w`.
    pub fn pbw_reconstruct<C: Coeff>(&self, coeffs: &[(Word, C)]) -> Result<NcPoly<C>> {
        let mut out = NcPoly::zero();
        for (w, c) in coeffs {
            out = &out + &self.p(w)?.convert::<C>().scale(c);
        }
        Ok(out)
    }

    /// Exponents `⟨s, S_l⟩` in decreasing Lyndon order, zeros dropped.
    pub fn mrs_factorize<C: Coeff>(&self, s: &NcPoly<C>, tol: f64) -> Result<Vec<(Word, C)>> {
        let check = is_grouplike(s, &self.letters, self.cap, Coproduct::Shuffle, tol)?;
        if let Some((u, v)) = check.witness {
            return domain(format!("series is not grouplike: Friedrichs test fails at ({u:?}, {v:?})"));
        }
        let mut out = Vec::new();
        for l in self.lyndon.iter().rev() {
            let c = pair_q(s, &self.s[l]);
            if !c.is_zero() {
                out.push((l.clone(), c));
            }
        }
        Ok(out)
    }

    /// Ordered product `∏ exp(c_l P_l)` in the given order, truncated at `cap`.
    pub fn mrs_product<C: Coeff>(&self, factors: &[(Word, C)], cap: usize) -> Result<NcPoly<C>> {
        let mut out = NcPoly::one();
        for (l, c) in factors {
            let e = exp_trunc(&self.p(l)?.convert::<C>().scale(c), cap)?;
            out = out.conc_mul_cap(&e, Some(cap));
        }
        Ok(out)
    }
}

/// Inverse factorization: reversed order, negated exponents.
pub fn mrs_inverse<C: Coeff>(factors: &[(Word, C)]) -> Vec<(Word, C)> {
    factors.iter().rev().map(|(l, c)| (l.clone(), -c.clone())).collect()
}

fn pair_q<C: Coeff>(s: &NcPoly<C>, q: &NcPoly<Q>) -> C {
    let mut acc = C::zero();
    for (w, c) in q.iter() {
        let a = s.coeff(w);
        if !a.is_zero() {
            acc += a * C::from_q(c);
        }
    }
    acc
}

/// `π₁(w) = Σ_{m≥1} ((−1)^{m−1}/m) Σ ⟨w | u1⧢…⧢um⟩ u1…um` over nonempty `u_i`.
///
/// Evaluated by summing over surjective labellings of the positions of `w`.
pub fn pi1_project(w: &[u8]) -> NcPoly<Q> {
    let n = w.len();
    let mut out = NcPoly::zero();
    if n == 0 {
        return out;
    }
    for m in 1..=n {
        let coeff = Q::new(if m % 2 == 1 { 1 } else { -1 }, m as i128);
        let mut labels = vec![0usize; n];
        loop {
            let mut used = vec![false; m];
            for &l in &labels {
                used[l] = true;
            }
            if used.iter().all(|&b| b) {
                let mut word = Word::with_capacity(n);
                for block in 0..m {
                    for (pos, &l) in labels.iter().enumerate() {
                        if l == block {
                            word.push(w[pos]);
                        }
                    }
                }
                out.add_term(word, coeff);
            }
            let mut k = 0;
            while k < n {
                labels[k] += 1;
                if labels[k] < m {
                    break;
                }
                labels[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coproduct {
    Shuffle,
    Conc,
}

/// Outcome of a grouplike or primitive test; `witness` is the first failing pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Witnessed {
    pub ok: bool,
    pub witness: Option<(Word, Word)>,
}

impl Witnessed {
    fn pass() -> Self {
        Witnessed { ok: true, witness: None }
    }
    fn fail(u: Word, v: Word) -> Self {
        Witnessed { ok: false, witness: Some((u, v)) }
    }
}

fn close<C: Coeff>(a: &C, b: &C, tol: f64) -> bool {
    if C::EXACT {
        a == b
    } else {
        let scale = 1f64.max(a.magnitude()).max(b.magnitude());
        a.approx_eq(b, tol * scale)
    }
}

fn nonempty_words(letters: &[u8], cap: usize) -> Vec<Word> {
    words_up_to(letters, cap).into_iter().filter(|w| !w.is_empty()).collect()
}

/// Friedrichs test: shuffle mode checks `⟨s,u⧢v⟩ = ⟨s,u⟩⟨s,v⟩`, conc mode
/// checks `⟨s,uv⟩ = ⟨s,u⟩⟨s,v⟩`, for nonempty `u, v` with `|u|+|v| ≤ cap`.
pub fn is_grouplike<C: Coeff>(s: &NcPoly<C>, letters: &[u8], cap: usize, mode: Coproduct, tol: f64) -> Result<Witnessed> {
    if !close(&s.constant_term(), &C::one(), tol) {
        return domain("grouplike test requires constant term 1");
    }
    let words = nonempty_words(letters, cap.saturating_sub(1));
    for u in &words {
        for v in &words {
            if u.len() + v.len() > cap {
                continue;
            }
            let lhs = match mode {
                Coproduct::Shuffle => NcPoly::<C>::word(u).shuffle_mul(&NcPoly::word(v)).pairing(s),
                Coproduct::Conc => {
                    let mut uv = u.clone();
                    uv.extend_from_slice(v);
                    s.coeff(&uv)
                }
            };
            let rhs = s.coeff(u) * s.coeff(v);
            if !close(&lhs, &rhs, tol) {
                return Ok(Witnessed::fail(u.clone(), v.clone()));
            }
        }
    }
    Ok(Witnessed::pass())
}

/// Shuffle mode: `⟨s,u⧢v⟩ = 0` for nonempty `u, v`; conc mode: support in letters.
pub fn is_primitive<C: Coeff>(s: &NcPoly<C>, letters: &[u8], cap: usize, mode: Coproduct, tol: f64) -> Witnessed {
    let zero = C::zero();
    if !close(&s.constant_term(), &zero, tol) {
        return Witnessed::fail(Word::new(), Word::new());
    }
    match mode {
        Coproduct::Conc => {
            for (w, c) in s.sorted_terms() {
                if w.len() != 1 && !close(&c, &zero, tol) {
                    return Witnessed::fail(w, Word::new());
                }
            }
            Witnessed::pass()
        }
        Coproduct::Shuffle => {
            let words = nonempty_words(letters, cap.saturating_sub(1));
            for u in &words {
                for v in &words {
                    if u.len() + v.len() > cap {
                        continue;
                    }
                    let val = NcPoly::<C>::word(u).shuffle_mul(&NcPoly::word(v)).pairing(s);
                    if !close(&val, &zero, tol) {
                        return Witnessed::fail(u.clone(), v.clone());
                    }
                }
            }
            Witnessed::pass()
        }
    }
}
