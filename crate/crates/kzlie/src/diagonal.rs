//! Diagonal series `D = Σ_w w ⊗ w` and its factorizations.
//!
//! Tensor exponentials `exp(S_l ⊗ P_l)` stack exponents with the shuffle
//! product on the left leg and concatenation on the right leg. Residual
//! functions return the full difference so failures can be read term by term.
//!
//! For the split `𝒯_n = T_n ⊔ 𝒯_{n−1}`, the ideal generated by `𝒯_{n−1}`
//! is freely generated by the brackets `r(vt)` (`v ∈ T_n^*`, `t ∈ 𝒯_{n−1}`);
//! the antipodes `a(vt)` pair with them up to a global sign `ε` that is
//! measured when the family is built.

use crate::alphabet::{enumerate_lyndon_over, words_of_length, words_up_to, Alphabet, Word};
use crate::coeff::{Coeff, Q};
use crate::error::{domain, Result};
use crate::lie_bases::{pi1_project, LyndonBasis};
use crate::ncseries::{bar_hat, right_bracketing, LegProduct, NcPoly, TensorPoly};

const SH: LegProduct = LegProduct::Shuffle;
const CO: LegProduct = LegProduct::Conc;

/// `Σ_{|w| ≤ cap} w ⊗ w` over `letters`.
pub fn diagonal_series(letters: &[u8], cap: usize) -> TensorPoly<Q> {
    let mut d = TensorPoly::zero();
    for w in words_up_to(letters, cap) {
        d.add_term(w.clone(), w, Q::from_integer(1));
    }
    d
}

/// `ℳ = Σ_t t ⊗ t`.
pub fn letter_diagonal(letters: &[u8]) -> TensorPoly<Q> {
    let mut m = TensorPoly::zero();
    for &t in letters {
        m.add_term(Word::from_slice(&[t]), Word::from_slice(&[t]), Q::from_integer(1));
    }
    m
}

/// `(∇D − ℳD, ∇D − Dℳ)` where `∇D = D − 1⊗1`, both legs multiplied by
/// concatenation and truncated at `cap`. Terms of `ℳD` of length `cap + 1`
/// are dropped.
pub fn nabla_check(letters: &[u8], cap: usize) -> (TensorPoly<Q>, TensorPoly<Q>) {
    let d = diagonal_series(letters, cap);
    let m = letter_diagonal(letters);
    let nabla = &d - &TensorPoly::one();
    let md = m.mul(&d, CO, CO, Some(cap));
    let dm = d.mul(&m, CO, CO, Some(cap));
    (&nabla - &md, &nabla - &dm)
}

/// `∏` of `exp(S_l ⊗ P_l)` over `lyndon` in the given order.
pub fn lyndon_product(basis: &LyndonBasis, lyndon: &[Word], cap: usize) -> Result<TensorPoly<Q>> {
    let mut out = TensorPoly::one();
    for l in lyndon {
        if l.len() > cap {
            continue;
        }
        let x = TensorPoly::tensor(basis.s(l)?, basis.p(l)?);
        let e = x.exp(SH, CO, cap)?;
        out = out.mul(&e, SH, CO, Some(cap));
    }
    Ok(out)
}

/// `∏↘_{|l| ≤ cap} exp(S_l ⊗ P_l) − D`.
pub fn mrs_identity_check(letters: &[u8], cap: usize) -> Result<TensorPoly<Q>> {
    let basis = LyndonBasis::new(letters, cap)?;
    let desc: Vec<Word> = basis.lyndon().iter().rev().cloned().collect();
    let prod = lyndon_product(&basis, &desc, cap)?;
    Ok(&prod - &diagonal_series(letters, cap))
}

/// `log D − Σ_w w ⊗ π₁(w)`.
///
/// The logarithm is taken with shuffle on the left leg and concatenation on
/// the right, the product in which `D` is grouplike. With concatenation on
/// both legs `log D = Σ_w w ⊗ w / |w|` instead; see [`log_diagonal_conc_conc`].
pub fn log_diagonal_check(letters: &[u8], cap: usize) -> Result<TensorPoly<Q>> {
    let d = diagonal_series(letters, cap);
    let log = d.log(SH, CO, cap)?;
    let mut expected = TensorPoly::zero();
    for w in words_up_to(letters, cap) {
        if w.is_empty() {
            continue;
        }
        for (v, c) in pi1_project(&w).iter() {
            expected.add_term(w.clone(), v.clone(), *c);
        }
    }
    Ok(&log - &expected)
}

/// `log D` with concatenation on both legs.
pub fn log_diagonal_conc_conc(letters: &[u8], cap: usize) -> Result<TensorPoly<Q>> {
    diagonal_series(letters, cap).log(CO, CO, cap)
}

/// One generator `r(vt)` of the eliminated ideal with its dual candidates.
#[derive(Debug, Clone)]
pub struct LazardGenerator {
    pub v: Word,
    pub t: u8,
    /// The word `vt`.
    pub word: Word,
    /// `r(vt)`.
    pub r: NcPoly<Q>,
    /// `a(vt)`.
    pub a: NcPoly<Q>,
    /// `a(v̂ t)`.
    pub a_hat: NcPoly<Q>,
}

/// Generators `r(vt)` and duals `a(vt)` for `|vt| ≤ cap`, with the sign `ε`
/// that turns the Gram matrix `⟨a(vt), r(v't')⟩` into the identity.
#[derive(Debug, Clone)]
pub struct LazardDualFamily {
    pub n: u32,
    pub cap: usize,
    pub alphabet: Alphabet,
    pub eps: i32,
    pub gens: Vec<LazardGenerator>,
}

impl LazardDualFamily {
    pub fn new(n: u32, cap: usize) -> Result<Self> {
        if n < 3 {
            return domain(format!("Lazard family needs n >= 3, got {n}"));
        }
        if cap == 0 {
            return domain("Lazard family needs cap >= 1");
        }
        let alphabet = Alphabet::braid(n)?;
        let (tn, rest) = alphabet.braid_split().expect("braid alphabet");
        let mut gens = Vec::new();
        for len in 1..=cap {
            for v in words_of_length(&tn, len - 1) {
                for &t in &rest {
                    let mut word = v.clone();
                    word.push(t);
                    let r = right_bracketing::<Q>(&word);
                    let a = NcPoly::<Q>::word(&word).antipode();
                    let (_, vhat) = bar_hat::<Q>(&v);
                    let a_hat = vhat.conc_mul(&NcPoly::letter(t)).antipode();
                    gens.push(LazardGenerator { v: v.clone(), t, word, r, a, a_hat });
                }
            }
        }
        let diag: Vec<Q> = gens.iter().map(|g| g.a.pairing(&g.r)).collect();
        let one = Q::from_integer(1);
        let eps = if diag.iter().all(|d| *d == one) {
            1
        } else if diag.iter().all(|d| *d == -one) {
            -1
        } else {
            return domain("raw Gram diagonal is not a constant sign");
        };
        Ok(LazardDualFamily { n, cap, alphabet, eps, gens })
    }

    fn eps_pow(&self, p: usize) -> Q {
        Q::from_integer(if self.eps == -1 && p % 2 == 1 { -1 } else { 1 })
    }

    /// `⟨ε·a(g_i), r(g_j)⟩`.
    pub fn gram(&self) -> Vec<Vec<Q>> {
        let e = self.eps_pow(1);
        self.gens.iter().map(|gi| self.gens.iter().map(|gj| gi.a.pairing(&gj.r) * e).collect()).collect()
    }

    /// `a(g_{i1}) ≺ (a(g_{i2}) ≺ (… a(g_{ip})))`, times `ε^p` when `normalized`.
    pub fn tower(&self, idx: &[usize], hat: bool, normalized: bool) -> NcPoly<Q> {
        let pick = |i: usize| if hat { &self.gens[i].a_hat } else { &self.gens[i].a };
        let mut acc = match idx.last() {
            None => return NcPoly::one(),
            Some(&i) => pick(i).clone(),
        };
        for &i in idx.iter().rev().skip(1) {
            acc = pick(i).half_shuffle_mul(&acc);
        }
        if normalized {
            acc = acc.scale(&self.eps_pow(idx.len()));
        }
        acc
    }

    /// `r(g_{i1}) … r(g_{ip})`.
    pub fn product(&self, idx: &[usize]) -> NcPoly<Q> {
        let mut acc = NcPoly::one();
        for &i in idx {
            acc = acc.conc_mul(&self.gens[i].r);
        }
        acc
    }

    /// Nonempty generator sequences with total length `≤ max_len`.
    pub fn sequences(&self, max_len: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut frontier: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
        while let Some((seq, len)) = frontier.pop() {
            for (i, g) in self.gens.iter().enumerate() {
                let l = len + g.word.len();
                if l <= max_len {
                    let mut s = seq.clone();
                    s.push(i);
                    out.push(s.clone());
                    frontier.push((s, l));
                }
            }
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    /// `Σ_{k≥1} Σ tower ⊗ product` truncated at `cap`, with `ε^k` when `normalized`.
    pub fn lambda(&self, cap: usize, hat: bool, normalized: bool) -> TensorPoly<Q> {
        let mut out = TensorPoly::zero();
        for seq in self.sequences(cap.min(self.cap)) {
            let x = TensorPoly::tensor(&self.tower(&seq, hat, normalized), &self.product(&seq));
            out = &out + &x;
        }
        out
    }
}

/// `λ(ℳ⁺_{𝒯_{n−1}})` as displayed (no sign normalization).
pub fn lambda_map(n: u32, cap: usize, hat: bool) -> Result<TensorPoly<Q>> {
    Ok(LazardDualFamily::new(n, cap)?.lambda(cap, hat, false))
}

/// Which Lyndon words form the middle factor of the first split form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiddleReading {
    /// `l = l1 l2` with `l1 ∈ Lyn T_n`, `l2 ∈ Lyn 𝒯_{n−1}`.
    Concatenation,
    /// Every Lyndon word using letters of both `T_n` and `𝒯_{n−1}`.
    Mixed,
}

impl MiddleReading {
    pub fn name(self) -> &'static str {
        match self {
            MiddleReading::Concatenation => "concatenation l1·l2",
            MiddleReading::Mixed => "all mixed Lyndon words",
        }
    }
}

/// Middle-factor Lyndon words for a reading, in decreasing order.
pub fn middle_words(n: u32, cap: usize, reading: MiddleReading) -> Result<Vec<Word>> {
    let alphabet = Alphabet::braid(n)?;
    let (tn, rest) = alphabet.braid_split().expect("braid alphabet");
    let all = enumerate_lyndon_over(&alphabet.indices(), cap, u64::MAX)?;
    let in_tn = |t: &u8| tn.contains(t);
    let mut out: Vec<Word> = match reading {
        MiddleReading::Mixed => all.into_iter().filter(|l| l.iter().any(in_tn) && !l.iter().all(in_tn)).collect(),
        MiddleReading::Concatenation => {
            let lt = enumerate_lyndon_over(&tn, cap, u64::MAX)?;
            let lr = enumerate_lyndon_over(&rest, cap, u64::MAX)?;
            let mut v = Vec::new();
            for l1 in &lt {
                for l2 in &lr {
                    if l1.len() + l2.len() <= cap {
                        let mut l = l1.clone();
                        l.extend_from_slice(l2);
                        v.push(l);
                    }
                }
            }
            v.sort();
            v.dedup();
            v
        }
    };
    out.reverse();
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ReadingResidual {
    pub reading: MiddleReading,
    pub residual: TensorPoly<Q>,
}

#[derive(Debug, Clone)]
pub struct DiagonalReport {
    pub n: u32,
    pub cap: usize,
    pub eps: i32,
    pub form1: Vec<ReadingResidual>,
    /// `D_{T_n}(1⊗1 + Σ ε^k tower ⊗ product) − D_{𝒯_n}`.
    pub form2: TensorPoly<Q>,
    /// Same without the `ε^k` weights.
    pub form2_unnormalized: TensorPoly<Q>,
    /// `D_{𝒯_{n−1}}^{-1} · D_{𝒯_n} · D_{T_n}^{-1}`, the exact middle factor.
    pub middle_exact: TensorPoly<Q>,
}

impl DiagonalReport {
    /// First reading with zero residual, if any.
    pub fn form1_reading(&self) -> Option<MiddleReading> {
        self.form1.iter().find(|r| r.residual.is_zero()).map(|r| r.reading)
    }
}

/// Inverse of an ordered Lyndon product: reversed order, negated exponents.
fn lyndon_product_inverse(basis: &LyndonBasis, lyndon_desc: &[Word], cap: usize) -> Result<TensorPoly<Q>> {
    let mut out = TensorPoly::one();
    for l in lyndon_desc.iter().rev() {
        if l.len() > cap {
            continue;
        }
        let x = TensorPoly::tensor(basis.s(l)?, basis.p(l)?).scale(&Q::from_integer(-1));
        out = out.mul(&x.exp(SH, CO, cap)?, SH, CO, Some(cap));
    }
    Ok(out)
}

/// Both split forms of the diagonal series for `𝒯_n = T_n ⊔ 𝒯_{n−1}`.
pub fn theorem_diagonal_check(n: u32, cap: usize) -> Result<DiagonalReport> {
    if !(3..=4).contains(&n) {
        return domain("theorem_diagonal_check supports n in {3, 4}");
    }
    if cap > 4 {
        return domain("theorem_diagonal_check supports cap <= 4");
    }
    let alphabet = Alphabet::braid(n)?;
    let (tn, rest) = alphabet.braid_split().expect("braid alphabet");
    let all = alphabet.indices();
    let basis = LyndonBasis::new(&all, cap)?;
    let d = diagonal_series(&all, cap);
    let d_tn = diagonal_series(&tn, cap);
    let d_rest = diagonal_series(&rest, cap);

    let family = LazardDualFamily::new(n, cap)?;
    let one = TensorPoly::one();
    let mid = &one + &family.lambda(cap, false, true);
    let form2 = &d_tn.mul(&mid, SH, CO, Some(cap)) - &d;
    let mid_raw = &one + &family.lambda(cap, false, false);
    let form2_unnormalized = &d_tn.mul(&mid_raw, SH, CO, Some(cap)) - &d;

    let mut form1 = Vec::new();
    for reading in [MiddleReading::Concatenation, MiddleReading::Mixed] {
        let words = middle_words(n, cap, reading)?;
        let middle = lyndon_product(&basis, &words, cap)?;
        let lhs = d_rest.mul(&middle, SH, CO, Some(cap)).mul(&d_tn, SH, CO, Some(cap));
        form1.push(ReadingResidual { reading, residual: &lhs - &d });
    }

    let lyn_rest_desc: Vec<Word> = basis.lyndon().iter().rev().filter(|l| l.iter().all(|t| rest.contains(t))).cloned().collect();
    let lyn_tn_desc: Vec<Word> = basis.lyndon().iter().rev().filter(|l| l.iter().all(|t| tn.contains(t))).cloned().collect();
    let inv_rest = lyndon_product_inverse(&basis, &lyn_rest_desc, cap)?;
    let inv_tn = lyndon_product_inverse(&basis, &lyn_tn_desc, cap)?;
    let middle_exact = inv_rest.mul(&d, SH, CO, Some(cap)).mul(&inv_tn, SH, CO, Some(cap));

    Ok(DiagonalReport { n, cap, eps: family.eps, form1, form2, form2_unnormalized, middle_exact })
}

/// Pairing of a left-leg functional given by a polynomial.
pub fn pair_left<C: Coeff>(t: &TensorPoly<C>, p: &NcPoly<C>) -> NcPoly<C> {
    t.contract_left(|u| p.coeff(u))
}
