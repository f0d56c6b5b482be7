//! Volterra-type expansion of a Chen series around a sub-alphabet.
//!
//! With `V_0` the Chen series of the base letters `B`,
//! `V_k(z) = V_0(z) ∫ V_0(s)^{-1} (Σ_{t∉B} ω_t(s) t) V_{k−1}(s)`,
//! and `Σ_k V_k` is the full Chen series. Node fields are whole truncated series.

use crate::alphabet::{words_up_to, Alphabet, Word};
use crate::coeff::{Coeff, C64};
use crate::diagonal::LazardDualFamily;
use crate::error::{domain, Result};
use crate::ncseries::{exp_trunc, NcPoly};

use super::{chen_series, chen_series_nodes, layout, refine, Forms, Layout, PathSpec, QuadratureConfig, Rule};

/// How `V_0` is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseSeries {
    /// Chen series of the base letters.
    Chen,
    /// `exp(Σ_{t∈B} α(t) t)`.
    Abelian,
}

/// `V_0, …, V_K` at the end of the path, truncated at `cap`.
#[derive(Debug, Clone)]
pub struct VolterraTerms {
    pub base: Vec<u8>,
    pub cap: usize,
    pub terms: Vec<NcPoly<C64>>,
}

impl VolterraTerms {
    pub fn sum(&self) -> NcPoly<C64> {
        self.terms.iter().fold(NcPoly::zero(), |acc, t| &acc + t)
    }
}

fn base_nodes(
    forms: &Forms,
    base: &[u8],
    lay: &Layout,
    rule: &Rule,
    cap: usize,
    mode: BaseSeries,
) -> Result<(Vec<Vec<NcPoly<C64>>>, NcPoly<C64>)> {
    let ns = chen_series_nodes(forms, base, lay, rule, if mode == BaseSeries::Chen { cap } else { cap.min(1) })?;
    match mode {
        BaseSeries::Chen => Ok((ns.nodes, ns.end)),
        BaseSeries::Abelian => {
            let abelian = |p: &NcPoly<C64>| exp_trunc(&p.homogeneous(1), cap);
            let nodes = ns.nodes.iter().map(|panel| panel.iter().map(abelian).collect()).collect::<Result<_>>()?;
            Ok((nodes, abelian(&ns.end)?))
        }
    }
}

fn iterate_fixed(
    forms: &Forms,
    base: &[u8],
    lay: &Layout,
    rule: &Rule,
    cap: usize,
    k_max: usize,
    mode: BaseSeries,
) -> Result<Vec<NcPoly<C64>>> {
    let (v0_nodes, v0_end) = base_nodes(forms, base, lay, rule, cap, mode)?;
    let v0_inv: Vec<Vec<NcPoly<C64>>> =
        v0_nodes.iter().map(|panel| panel.iter().map(|v| v.antipode()).collect()).collect();
    let comp: Vec<u8> = forms.letters().into_iter().filter(|t| !base.contains(t)).collect();
    let m = rule.x.len();
    let mut prev_nodes = v0_nodes.clone();
    let mut out = vec![v0_end.clone()];
    for _ in 1..=k_max {
        let mut start = NcPoly::<C64>::zero();
        let mut next_nodes = Vec::with_capacity(lay.panels.len());
        for (p, panel) in lay.panels.iter().enumerate() {
            let h: Vec<NcPoly<C64>> = (0..m)
                .map(|j| {
                    let mut omega = NcPoly::zero();
                    for &t in &comp {
                        omega.add_term(Word::from_slice(&[t]), panel.g[t as usize][j]);
                    }
                    v0_inv[p][j].conc_mul_cap(&omega, Some(cap)).conc_mul_cap(&prev_nodes[p][j], Some(cap))
                })
                .collect();
            let mut vals = Vec::with_capacity(m);
            for i in 0..m {
                let mut w = start.clone();
                for (j, hj) in h.iter().enumerate() {
                    w = &w + &hj.scale(&C64::new(rule.q[i][j], 0.0));
                }
                vals.push(v0_nodes[p][i].conc_mul_cap(&w, Some(cap)));
            }
            for (j, hj) in h.iter().enumerate() {
                start = &start + &hj.scale(&C64::new(rule.w[j], 0.0));
            }
            next_nodes.push(vals);
        }
        out.push(v0_end.conc_mul_cap(&start, Some(cap)));
        prev_nodes = next_nodes;
    }
    Ok(out)
}

/// `V_0, …, V_{k_max}` for base letters `base`, refined until stable.
pub fn volterra_iterate(
    forms: &Forms,
    base: &[u8],
    path: &PathSpec,
    q: &QuadratureConfig,
    cap: usize,
    k_max: usize,
    mode: BaseSeries,
) -> Result<VolterraTerms> {
    if base.iter().any(|&t| t as usize >= forms.len()) {
        return domain("base letter without a form");
    }
    let rule = Rule::new(q.order)?;
    let words = words_up_to(&forms.letters(), cap);
    let terms = refine(
        q,
        |p| {
            let lay = layout(forms, path, &rule, p)?;
            if lay.start_singular.iter().chain(&lay.end_singular).any(|&b| b) {
                return domain("Volterra iteration needs a path avoiding all singularities");
            }
            iterate_fixed(forms, base, &lay, &rule, cap, k_max, mode)
        },
        |ts: &Vec<NcPoly<C64>>| ts.iter().flat_map(|t| words.iter().map(move |w| t.coeff(w))).collect(),
    )?;
    Ok(VolterraTerms { base: base.to_vec(), cap, terms })
}

/// `φ(t) = V_0^{-1} t V_0`.
pub fn phi_factor(v0: &NcPoly<C64>, t: u8, cap: usize) -> NcPoly<C64> {
    v0.antipode().conc_mul_cap(&NcPoly::letter(t), Some(cap)).conc_mul_cap(v0, Some(cap))
}

/// `κ_w = V_0 φ(t1) ⋯ φ(tk)`.
pub fn kernel(v0: &NcPoly<C64>, w: &[u8], cap: usize) -> NcPoly<C64> {
    let mut acc = v0.clone();
    for &t in w {
        acc = acc.conc_mul_cap(&phi_factor(v0, t, cap), Some(cap));
    }
    acc
}

/// Residuals of the Volterra expansion against the directly computed Chen series.
#[derive(Debug, Clone)]
pub struct ChenBraidsReport {
    pub base: Vec<u8>,
    pub cap: usize,
    /// `max |⟨Σ_{k≤cap} V_k − C, w⟩|` over `|w| ≤ cap`.
    pub sum_residual: f64,
    /// `max |⟨V_0^{-1} C − H, w⟩|` for the closed form `H` built from
    /// half-shuffle towers; present only when the base is `T_n`.
    pub closed_form_residual: Option<f64>,
}

/// Compare `Σ V_k` with `C` for KZ forms on `n` points.
pub fn chen_braids_check(
    n: u32,
    base: &[u8],
    path: &PathSpec,
    q: &QuadratureConfig,
    cap: usize,
    scale: C64,
) -> Result<ChenBraidsReport> {
    let forms = Forms::kz(n, scale)?;
    let vt = volterra_iterate(&forms, base, path, q, cap, cap, BaseSeries::Chen)?;
    let c = chen_series(&forms, path, cap, q)?.poly;
    let diff = &vt.sum() - &c;
    let sum_residual = diff.truncate(cap).max_abs();
    let alpha = Alphabet::braid(n)?;
    let (tn, _) = alpha.braid_split().expect("braid alphabet");
    let mut sorted = base.to_vec();
    sorted.sort_unstable();
    let closed_form_residual = if sorted == tn {
        let fam = LazardDualFamily::new(n, cap)?;
        let mut h = NcPoly::<C64>::one();
        for seq in fam.sequences(cap) {
            let tower = fam.tower(&seq, false, true);
            let coeff = tower.iter().fold(C64::new(0.0, 0.0), |acc, (w, a)| acc + c.coeff(w) * C64::from_q(a));
            h = &h + &fam.product(&seq).convert::<C64>().scale(&coeff);
        }
        let lhs = vt.terms[0].antipode().conc_mul_cap(&c, Some(cap));
        Some((&lhs - &h).truncate(cap).max_abs())
    } else {
        None
    };
    Ok(ChenBraidsReport { base: base.to_vec(), cap, sum_residual, closed_form_residual })
}
