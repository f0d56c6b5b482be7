//! Polylogarithms and hyperlogarithms indexed by words.
//!
//! Letters: `x0 = 0`, `x1 = 1` for polylogarithms (`ω0 = ds/s`,
//! `ω1 = ds/(1−s)`, so `Li_{x1}(z) = −log(1−z)`); `x_i = i` with
//! `ω_i = ds/(s − a_i)` and `a_0 = 0` for hyperlogarithms.
//!
//! Words ending in `x0` are handled by shuffle regularization:
//! `w = Σ_j P_j ⧢ x0^{⧢j}` with no `P_j` word ending in `x0`, so that
//! `Li_w(z) = Σ_j Li_{P_j}(z) log^j z`. Words ending in `x1` are nested sums
//! `Li_{s1,…,sk}(z) = Σ_{n1>…>nk≥1} z^{n1} / (n1^{s1} ⋯ nk^{sk})`.

use crate::alphabet::Word;
use crate::coeff::{Coeff, C64, Q};
use crate::error::{domain, Error, Result};
use crate::lie_bases::LyndonBasis;
use crate::ncseries::{exp_trunc, NcPoly, TruncatedSeries};

use super::{iterated_integrals, Forms, PathSpec, QuadratureConfig};

/// Largest number of nested-sum terms before giving up.
pub const MAX_SERIES_TERMS: usize = 50_000_000;

/// `(s1, …, sk)` for a word `x0^{s1−1} x1 ⋯ x0^{sk−1} x1`; `None` unless it ends in `x1`.
pub fn word_to_composition(w: &[u8]) -> Option<Vec<u32>> {
    if w.last() != Some(&1) || w.iter().any(|&t| t > 1) {
        return None;
    }
    let mut out = Vec::new();
    let mut run = 0;
    for &t in w {
        run += 1;
        if t == 1 {
            out.push(run);
            run = 0;
        }
    }
    Some(out)
}

/// Inverse of [`word_to_composition`].
pub fn composition_to_word(s: &[u32]) -> Word {
    let mut w = Word::new();
    for &k in s {
        for _ in 1..k {
            w.push(0);
        }
        w.push(1);
    }
    w
}

/// `Li_{s1,…,sk}(z)` for `|z| < 1` by direct summation with a tail bound below `tol`.
pub fn nested_sum(s: &[u32], z: C64, tol: f64) -> Result<C64> {
    if s.is_empty() {
        return Ok(C64::new(1.0, 0.0));
    }
    if s.contains(&0) {
        return domain("composition entries must be positive");
    }
    let r = z.norm();
    if r >= 1.0 {
        return domain(format!("nested sum needs |z| < 1, got |z| = {r}"));
    }
    if r == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let depth = s.len();
    // inner[j] holds S_{j+1}(n−1) for j = 1..depth−1; inner[depth] = 1.
    let mut inner = vec![0.0f64; depth + 1];
    inner[depth] = 1.0;
    let mut zn = C64::new(1.0, 0.0);
    let mut acc = C64::new(0.0, 0.0);
    let mut n = 0usize;
    loop {
        n += 1;
        zn *= z;
        let nf = n as f64;
        acc += zn * inner[1] / nf.powi(s[0] as i32);
        for j in 1..depth {
            inner[j] += inner[j + 1] / nf.powi(s[j] as i32);
        }
        // Tail from n+1 on: terms ≤ r^m (1 + ln m)^{depth−1} with ratio ≤ ρ.
        let lg = |m: f64| (1.0 + m.ln()).powi(depth as i32 - 1);
        let rho = r * lg(nf + 2.0) / lg(nf + 1.0);
        if rho < 1.0 {
            let tail = r.powi((n + 1).min(i32::MAX as usize) as i32) * lg(nf + 1.0) / (1.0 - rho);
            if tail < tol {
                return Ok(acc);
            }
        }
        if n >= MAX_SERIES_TERMS {
            return Err(Error::Accuracy(format!("nested sum at |z| = {r} needs more than {MAX_SERIES_TERMS} terms")));
        }
    }
}

/// `[P_0, P_1, …]` with `w = Σ_j P_j ⧢ x0^{⧢j}` and no word of `P_j` ending in `letter`.
pub fn regularize_trailing(w: &[u8], letter: u8) -> Vec<NcPoly<Q>> {
    let r = w.iter().rev().take_while(|&&t| t == letter).count();
    if r == 0 {
        return vec![NcPoly::word(w)];
    }
    let u = &w[..w.len() - r];
    if u.is_empty() {
        let mut out = vec![NcPoly::zero(); r + 1];
        out[r] = NcPoly::one().scale(&crate::coeff::inv_factorial::<Q>(r));
        return out;
    }
    // u x^r = (1/r) [ (u x^{r−1}) ⧢ x − Σ_{p<|u|} ins_p(u) x^{r−1} ]
    let mut shorter = Word::from_slice(u);
    shorter.extend(std::iter::repeat_n(letter, r - 1));
    let mut out: Vec<NcPoly<Q>> = vec![NcPoly::zero()];
    out.extend(regularize_trailing(&shorter, letter));
    for p in 0..u.len() {
        let mut v = Word::from_slice(&u[..p]);
        v.push(letter);
        v.extend_from_slice(&u[p..]);
        v.extend(std::iter::repeat_n(letter, r - 1));
        for (j, pj) in regularize_trailing(&v, letter).into_iter().enumerate() {
            if out.len() <= j {
                out.resize(j + 1, NcPoly::zero());
            }
            out[j] = &out[j] - &pj;
        }
    }
    let inv = Q::new(1, r as i128);
    out.into_iter().map(|p| p.scale(&inv)).collect()
}

fn is_one(z: C64) -> bool {
    (z - C64::new(1.0, 0.0)).norm() < 1e-15
}

/// `Li_w(z)` for `|z| < 1`, or `z = 1` with `w` starting in `x0` and ending in `x1`.
pub fn polylog_eval(w: &[u8], z: C64, tol: f64) -> Result<C64> {
    if w.iter().any(|&t| t > 1) {
        return domain("polylogarithm words use letters x0 and x1 only");
    }
    if w.is_empty() {
        return Ok(C64::new(1.0, 0.0));
    }
    if is_one(z) {
        if w[0] != 0 {
            return domain("Li_w(1) diverges: w starts with x1");
        }
        if *w.last().unwrap() != 1 {
            return domain("Li_w(1) diverges: w ends with x0");
        }
        // Split 0 ⇝ 1 at 1/2; s ↦ 1 − s maps the upper half onto reversed, swapped words.
        let half = C64::new(0.5, 0.0);
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..=w.len() {
            let (u, v) = w.split_at(k);
            let dual: Word = u.iter().rev().map(|&t| 1 - t).collect();
            acc += nested_word(&dual, half, tol)? * nested_word(v, half, tol)?;
        }
        return Ok(acc);
    }
    if z.norm() >= 1.0 {
        return domain(format!("polylogarithm evaluation needs |z| < 1 or z = 1, got {z}"));
    }
    let parts = regularize_trailing(w, 0);
    if z.norm() == 0.0 {
        return if parts.len() > 1 { domain("Li_w(0) diverges for w ending in x0") } else { Ok(C64::new(0.0, 0.0)) };
    }
    let log = z.ln();
    let mut acc = C64::new(0.0, 0.0);
    let mut logj = C64::new(1.0, 0.0);
    for p in &parts {
        acc += polylog_poly_convergent(p, z, tol)? * logj;
        logj *= log;
    }
    Ok(acc)
}

fn nested_word(w: &[u8], z: C64, tol: f64) -> Result<C64> {
    if w.is_empty() {
        return Ok(C64::new(1.0, 0.0));
    }
    let s = word_to_composition(w).ok_or_else(|| Error::Domain("nested sums need words ending in x1".into()))?;
    nested_sum(&s, z, tol)
}

fn polylog_poly_convergent(p: &NcPoly<Q>, z: C64, tol: f64) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for (w, c) in p.iter() {
        acc += nested_word(w, z, tol)? * C64::from_q(c);
    }
    Ok(acc)
}

/// `Σ c_w Li_w(z)`.
pub fn polylog_poly<C: Coeff>(p: &NcPoly<C>, z: C64, tol: f64, to_c64: impl Fn(&C) -> C64) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for (w, c) in p.iter() {
        acc += polylog_eval(w, z, tol)? * to_c64(c);
    }
    Ok(acc)
}

/// Hyperlogarithm `Li_w(z)` for singularities `sing = [0, a1, …, aN]`, by
/// quadrature along `path` (straight from 0 when `None`).
pub fn hyperlog_eval(w: &[u8], z: C64, sing: &[C64], path: Option<&PathSpec>, q: &QuadratureConfig) -> Result<C64> {
    if sing.first().map(|a| a.norm() != 0.0).unwrap_or(true) {
        return domain("singularity list must start with 0");
    }
    if w.iter().any(|&t| t as usize >= sing.len()) {
        return domain("word uses a letter without a singularity");
    }
    if w.is_empty() {
        return Ok(C64::new(1.0, 0.0));
    }
    let straight;
    let path = match path {
        Some(p) => p,
        None => {
            straight = PathSpec::line1(C64::new(0.0, 0.0), z);
            &straight
        }
    };
    if path.dim() != 1 || path.start()[0].norm() != 0.0 || (path.end()[0] - z).norm() > 1e-14 {
        return domain("hyperlogarithm path must run from 0 to z in one variable");
    }
    let forms = Forms::hyperlog(sing);
    let parts = regularize_trailing(w, 0);
    if z.norm() == 0.0 {
        return if parts.len() > 1 { domain("Li_w(0) diverges for w ending in x0") } else { Ok(C64::new(0.0, 0.0)) };
    }
    let mut words: Vec<Word> = Vec::new();
    for p in &parts {
        for (u, _) in p.iter() {
            if !u.is_empty() && !words.contains(u) {
                words.push(u.clone());
            }
        }
    }
    let vals = iterated_integrals(&words, &forms, path, q)?;
    let log = z.ln();
    let mut acc = C64::new(0.0, 0.0);
    let mut logj = C64::new(1.0, 0.0);
    for p in &parts {
        let mut v = C64::new(0.0, 0.0);
        for (u, c) in p.iter() {
            let val = if u.is_empty() { C64::new(1.0, 0.0) } else { vals[words.iter().position(|x| x == u).unwrap()] };
            v += val * C64::from_q(c);
        }
        acc += v * logj;
        logj *= log;
    }
    Ok(acc)
}

fn mrs_series(basis: &LyndonBasis, exps: &[(Word, C64)], cap: usize) -> Result<TruncatedSeries<C64>> {
    let mut out = NcPoly::one();
    for (l, c) in exps {
        let e = exp_trunc(&basis.p(l)?.convert::<C64>().scale(c), cap)?;
        out = out.conc_mul_cap(&e, Some(cap));
    }
    Ok(TruncatedSeries::new(out, cap))
}

fn li_of_s(basis: &LyndonBasis, l: &[u8], z: C64, tol: f64) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for (w, c) in basis.s(l)?.iter() {
        acc += polylog_eval(w, z, tol)? * C64::from_q(c);
    }
    Ok(acc)
}

/// `L(z) = ∏↘_{l} exp(Li_{S_l}(z) P_l)` over Lyndon words on `{x0, x1}` up to `cap`.
pub fn l_series(z: C64, cap: usize, tol: f64) -> Result<TruncatedSeries<C64>> {
    if cap > 6 {
        return Err(Error::Resource(format!("l_series supports cap <= 6, got {cap}")));
    }
    let basis = LyndonBasis::new(&[0, 1], cap)?;
    let mut exps = Vec::new();
    for l in basis.lyndon().iter().rev() {
        exps.push((l.clone(), li_of_s(&basis, l, z, tol)?));
    }
    mrs_series(&basis, &exps, cap)
}

/// `Φ_KZ = ∏↘_{l non-letter} exp(Li_{S_l}(1) P_l)`.
pub fn phi_kz(cap: usize, tol: f64) -> Result<TruncatedSeries<C64>> {
    if cap > 6 {
        return Err(Error::Resource(format!("phi_kz supports cap <= 6, got {cap}")));
    }
    let basis = LyndonBasis::new(&[0, 1], cap)?;
    let mut exps = Vec::new();
    for l in basis.lyndon().iter().rev() {
        if l.len() >= 2 {
            exps.push((l.clone(), li_of_s(&basis, l, C64::new(1.0, 0.0), tol)?));
        }
    }
    mrs_series(&basis, &exps, cap)
}

/// `ζ(s1, …, sk)` as `Li_{s1,…,sk}(1)`; needs `s1 ≥ 2`.
pub fn zeta(s: &[u32], tol: f64) -> Result<C64> {
    polylog_eval(&composition_to_word(s), C64::new(1.0, 0.0), tol)
}
