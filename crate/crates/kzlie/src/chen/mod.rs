//! Numeric iterated integrals and Chen series.
//!
//! Forms are logarithmic differentials of affine functions,
//! `ω = scale · dlog(c·z + d)`, pulled back along piecewise-linear paths in
//! `ℂ^dim`. Iterated integrals follow the convention
//! `α(t1…tk) = ∫ ω_{t1}(s) α(t2…tk)(s)`, so the first letter is outermost and
//! the Chen series solves `dC = (Σ ω_t t) C`.
//!
//! Each path segment is split into Gauss–Legendre panels. Inner integrals are
//! carried to the nodes with a spectral integration matrix, and the panel
//! count doubles until two successive results agree. Singular endpoints get
//! geometrically graded panels.

pub mod kz;
pub mod polylog;
pub mod volterra;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::alphabet::{words_up_to, Word};
use crate::coeff::C64;
use crate::error::{domain, Error, Result};
use crate::ncseries::{NcPoly, TruncatedSeries};

/// Levels of geometric grading toward a singular endpoint.
const GRADING_LEVELS: i32 = 36;

/// `scale · dlog(Σ coeffs_i z_i + constant)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearDlog {
    pub coeffs: Vec<C64>,
    pub constant: C64,
    pub scale: C64,
}

impl LinearDlog {
    pub fn new(coeffs: Vec<C64>, constant: C64, scale: C64) -> Self {
        LinearDlog { coeffs, constant, scale }
    }

    /// `scale · dlog(z_i − z_j)` on `ℂ^dim` (0-based `i`, `j`).
    pub fn difference(dim: usize, i: usize, j: usize, scale: C64) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); dim];
        coeffs[i] = C64::new(1.0, 0.0);
        coeffs[j] = C64::new(-1.0, 0.0);
        LinearDlog { coeffs, constant: C64::new(0.0, 0.0), scale }
    }

    /// `scale · dlog(s − a)` in one variable.
    pub fn pole(a: C64, scale: C64) -> Self {
        LinearDlog { coeffs: vec![C64::new(1.0, 0.0)], constant: -a, scale }
    }

    pub fn argument(&self, z: &[C64]) -> C64 {
        self.coeffs.iter().zip(z).fold(self.constant, |acc, (c, x)| acc + c * x)
    }
}

/// One form per letter; letter `k` is `forms[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forms {
    pub dim: usize,
    pub forms: Vec<LinearDlog>,
}

impl Forms {
    pub fn new(dim: usize, forms: Vec<LinearDlog>) -> Result<Self> {
        for f in &forms {
            if f.coeffs.len() != dim {
                return domain(format!("form has {} coefficients, expected {dim}", f.coeffs.len()));
            }
            if f.coeffs.iter().all(|c| c.norm() == 0.0) {
                return domain("form with constant argument has zero differential");
            }
        }
        Ok(Forms { dim, forms })
    }

    /// `dlog(z_i − z_j)·scale` for every letter of `Alphabet::braid(n)`, in letter order.
    pub fn kz(n: u32, scale: C64) -> Result<Self> {
        let alpha = crate::alphabet::Alphabet::braid(n)?;
        let mut forms = Vec::new();
        for idx in alpha.indices() {
            match alpha.letter(idx) {
                crate::alphabet::Letter::Braid { i, j } => {
                    forms.push(LinearDlog::difference(n as usize, *i as usize - 1, *j as usize - 1, scale))
                }
                _ => unreachable!("braid alphabet"),
            }
        }
        Forms::new(n as usize, forms)
    }

    /// `x0 ↦ ds/s`, `x1 ↦ ds/(1−s)`.
    pub fn polylog() -> Self {
        let one = C64::new(1.0, 0.0);
        Forms {
            dim: 1,
            forms: vec![LinearDlog::pole(C64::new(0.0, 0.0), one), LinearDlog::new(vec![-one], one, -one)],
        }
    }

    /// `x_i ↦ ds/(s − a_i)`.
    pub fn hyperlog(sing: &[C64]) -> Self {
        Forms { dim: 1, forms: sing.iter().map(|a| LinearDlog::pole(*a, C64::new(1.0, 0.0))).collect() }
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn letters(&self) -> Vec<u8> {
        (0..self.forms.len() as u8).collect()
    }

    /// Keep only the listed letters, renumbered in the given order.
    pub fn restrict(&self, letters: &[u8]) -> Forms {
        Forms { dim: self.dim, forms: letters.iter().map(|&t| self.forms[t as usize].clone()).collect() }
    }
}

/// Piecewise-linear path through waypoints in `ℂ^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub waypoints: Vec<Vec<C64>>,
}

impl PathSpec {
    pub fn new(waypoints: Vec<Vec<C64>>) -> Result<Self> {
        let Some(first) = waypoints.first() else {
            return domain("path needs at least one point");
        };
        let dim = first.len();
        if waypoints.iter().any(|p| p.len() != dim) {
            return domain("path waypoints have inconsistent dimensions");
        }
        Ok(PathSpec { waypoints })
    }

    pub fn line(a: Vec<C64>, b: Vec<C64>) -> Result<Self> {
        Self::new(vec![a, b])
    }

    /// Straight path in one variable.
    pub fn line1(a: C64, b: C64) -> Self {
        PathSpec { waypoints: vec![vec![a], vec![b]] }
    }

    pub fn dim(&self) -> usize {
        self.waypoints[0].len()
    }

    pub fn start(&self) -> &[C64] {
        &self.waypoints[0]
    }

    pub fn end(&self) -> &[C64] {
        self.waypoints.last().expect("nonempty path")
    }

    /// Same waypoints in reverse.
    pub fn reversed(&self) -> PathSpec {
        let mut w = self.waypoints.clone();
        w.reverse();
        PathSpec { waypoints: w }
    }

    /// `self` followed by `other`, which must start where `self` ends.
    pub fn then(&self, other: &PathSpec) -> Result<PathSpec> {
        let gap: f64 = self.end().iter().zip(other.start()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if gap > 1e-14 {
            return domain("paths do not meet");
        }
        let mut w = self.waypoints.clone();
        w.extend(other.waypoints.iter().skip(1).cloned());
        Ok(PathSpec { waypoints: w })
    }
}

/// Quadrature settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    /// Starting number of uniform panels per segment.
    pub panels: usize,
    /// Target agreement between successive refinements.
    pub tol: f64,
    /// Refinement stops with an accuracy error beyond this many panels per segment.
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { order: 32, panels: 8, tol: 1e-10, max_panels: 1024 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.order < 2 || self.panels == 0 || self.max_panels < self.panels || !(self.tol > 0.0) {
            return domain("quadrature config needs order >= 2, panels >= 1, max_panels >= panels and tol > 0");
        }
        Ok(())
    }
}

/// Gauss nodes, weights and the spectral integration matrix on `[−1, 1]`.
#[derive(Debug, Clone)]
pub(crate) struct Rule {
    pub w: Vec<f64>,
    /// `q[i][j]`: weight of node `j` in `∫_{−1}^{x_i}`.
    pub q: Vec<Vec<f64>>,
    pub x: Vec<f64>,
}

fn legendre_table(m: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; m + 1];
    p[0] = 1.0;
    if m >= 1 {
        p[1] = x;
    }
    for k in 1..m {
        p[k + 1] = ((2 * k + 1) as f64 * x * p[k] - k as f64 * p[k - 1]) / (k + 1) as f64;
    }
    p
}

impl Rule {
    pub fn new(order: usize) -> Result<Self> {
        let gl = GaussLegendre::new(order).map_err(|e| Error::Domain(format!("Gauss-Legendre rule: {e}")))?;
        let mut pairs: Vec<(f64, f64)> = gl.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let w: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let m = order;
        let pj: Vec<Vec<f64>> = x.iter().map(|&xj| legendre_table(m, xj)).collect();
        let ik: Vec<Vec<f64>> = x
            .iter()
            .map(|&xi| {
                let p = legendre_table(m, xi);
                (0..m)
                    .map(|k| if k == 0 { xi + 1.0 } else { (p[k + 1] - p[k - 1]) / (2 * k + 1) as f64 })
                    .collect()
            })
            .collect();
        let mut q = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in 0..m {
                let mut acc = 0.0;
                for k in 0..m {
                    acc += (2 * k + 1) as f64 / 2.0 * w[j] * pj[j][k] * ik[i][k];
                }
                q[i][j] = acc;
            }
        }
        Ok(Rule { w, q, x })
    }
}

/// One Gauss panel: `g[letter][node]` is the pulled-back form times the
/// Jacobian to the reference interval.
#[derive(Debug, Clone)]
pub(crate) struct Panel {
    pub g: Vec<Vec<C64>>,
}

/// Panels for a path plus the letters singular at the start or the end.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub panels: Vec<Panel>,
    pub start_singular: Vec<bool>,
    pub end_singular: Vec<bool>,
}

fn min_on_segment(l0: C64, l1: C64) -> (f64, f64) {
    let n2 = l1.norm_sqr();
    if n2 == 0.0 {
        return (l0.norm(), 0.0);
    }
    let tau = (-(l0 * l1.conj()).re / n2).clamp(0.0, 1.0);
    ((l0 + l1 * tau).norm(), tau)
}

pub(crate) fn layout(forms: &Forms, path: &PathSpec, rule: &Rule, panels: usize) -> Result<Layout> {
    if path.dim() != forms.dim {
        return domain(format!("path dimension {} does not match forms dimension {}", path.dim(), forms.dim));
    }
    let nseg = path.waypoints.len().saturating_sub(1);
    let nf = forms.len();
    let mut start_singular = vec![false; nf];
    let mut end_singular = vec![false; nf];
    let mut segs = Vec::new();
    for s in 0..nseg {
        let a = &path.waypoints[s];
        let b = &path.waypoints[s + 1];
        let mut lin = Vec::with_capacity(nf);
        let mut sing_lo = false;
        let mut sing_hi = false;
        for (k, f) in forms.forms.iter().enumerate() {
            let l0 = f.argument(a);
            let l1 = f.argument(b) - l0;
            let scale = l0.norm().max((l0 + l1).norm()).max(1e-300);
            let (m, tau) = min_on_segment(l0, l1);
            if m <= 1e-13 * scale.max(1.0) {
                if s == 0 && tau == 0.0 && l1.norm() > 0.0 {
                    start_singular[k] = true;
                    sing_lo = true;
                } else if s + 1 == nseg && tau == 1.0 && l1.norm() > 0.0 {
                    end_singular[k] = true;
                    sing_hi = true;
                } else {
                    return domain(format!("path passes through a singularity of letter {k} on segment {s}"));
                }
            }
            lin.push((l0, l1, f.scale));
        }
        segs.push((lin, sing_lo, sing_hi));
    }
    let mut out = Vec::new();
    for (lin, sing_lo, sing_hi) in segs {
        let lo = if sing_lo { 0.25 } else { 0.0 };
        let hi = if sing_hi { 0.75 } else { 1.0 };
        let mut breaks: Vec<f64> = Vec::new();
        if sing_lo {
            breaks.push(0.0);
            for k in (0..GRADING_LEVELS).rev() {
                breaks.push(0.25 * 2f64.powi(-k));
            }
            breaks.pop();
        }
        for p in 0..=panels {
            breaks.push(lo + (hi - lo) * p as f64 / panels as f64);
        }
        if sing_hi {
            for k in 1..GRADING_LEVELS {
                breaks.push(1.0 - 0.25 * 2f64.powi(-k));
            }
            breaks.push(1.0);
        }
        breaks.dedup();
        for win in breaks.windows(2) {
            let (t0, t1) = (win[0], win[1]);
            let half = (t1 - t0) / 2.0;
            let taus: Vec<f64> = rule.x.iter().map(|x| t0 + (x + 1.0) * half).collect();
            let g: Vec<Vec<C64>> = lin
                .iter()
                .map(|(l0, l1, sc)| taus.iter().map(|&tau| sc * l1 / (l0 + l1 * tau) * half).collect())
                .collect();
            out.push(Panel { g });
        }
    }
    Ok(Layout { panels: out, start_singular, end_singular })
}

/// Suffix-closed word set, ordered by length, with parent links.
struct WordPlan {
    words: Vec<Word>,
    /// `(first letter, index of the suffix)` for nonempty words.
    parent: Vec<Option<(u8, usize)>>,
}

impl WordPlan {
    fn new(requested: &[Word]) -> Self {
        let mut set: std::collections::BTreeSet<(usize, Word)> = std::collections::BTreeSet::new();
        for w in requested {
            for k in 0..=w.len() {
                set.insert((w.len() - k, Word::from_slice(&w[k..])));
            }
        }
        let words: Vec<Word> = set.into_iter().map(|(_, w)| w).collect();
        let index: std::collections::HashMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let parent = words
            .iter()
            .map(|w| if w.is_empty() { None } else { Some((w[0], index[&Word::from_slice(&w[1..])])) })
            .collect();
        WordPlan { words, parent }
    }

    fn index_of(&self, w: &[u8]) -> usize {
        self.words.iter().position(|x| x.as_slice() == w).expect("planned word")
    }
}

/// End values for every planned word, and optionally node values per panel.
struct Fields {
    end: Vec<C64>,
    nodes: Option<Vec<Vec<Vec<C64>>>>,
}

fn run_plan(plan: &WordPlan, lay: &Layout, rule: &Rule, keep_nodes: bool) -> Fields {
    let m = rule.x.len();
    let nw = plan.words.len();
    let mut start = vec![C64::new(0.0, 0.0); nw];
    let mut kept = if keep_nodes { Some(Vec::with_capacity(lay.panels.len())) } else { None };
    let one = C64::new(1.0, 0.0);
    for (i, w) in plan.words.iter().enumerate() {
        if w.is_empty() {
            start[i] = one;
        }
    }
    for panel in &lay.panels {
        let mut vals: Vec<Vec<C64>> = vec![Vec::new(); nw];
        let mut end = start.clone();
        for i in 0..nw {
            match plan.parent[i] {
                None => vals[i] = vec![one; m],
                Some((t, p)) => {
                    let g = &panel.g[t as usize];
                    let h: Vec<C64> = (0..m).map(|j| g[j] * vals[p][j]).collect();
                    let mut v = vec![start[i]; m];
                    for (r, vr) in v.iter_mut().enumerate() {
                        let row = &rule.q[r];
                        let mut acc = C64::new(0.0, 0.0);
                        for j in 0..m {
                            acc += h[j] * row[j];
                        }
                        *vr += acc;
                    }
                    let mut acc = C64::new(0.0, 0.0);
                    for j in 0..m {
                        acc += h[j] * rule.w[j];
                    }
                    end[i] = start[i] + acc;
                    vals[i] = v;
                }
            }
        }
        start = end;
        if let Some(k) = kept.as_mut() {
            k.push(vals);
        }
    }
    Fields { end: start, nodes: kept }
}

fn check_plan(plan: &WordPlan, lay: &Layout) -> Result<()> {
    for w in &plan.words {
        if let Some(&last) = w.last() {
            if lay.start_singular.get(last as usize).copied().unwrap_or(false) {
                return domain(format!(
                    "iterated integral diverges at the start: innermost letter {last} is singular there (regularize first)"
                ));
            }
        }
    }
    Ok(())
}

fn check_outer(requested: &[Word], lay: &Layout) -> Result<()> {
    for w in requested {
        if let Some(&first) = w.first() {
            if lay.end_singular.get(first as usize).copied().unwrap_or(false) {
                return domain(format!("iterated integral diverges at the end: outermost letter {first} is singular there"));
            }
        }
    }
    Ok(())
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_abs(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Run `compute` at doubling panel counts until two results agree within `tol`.
pub(crate) fn refine<T>(
    q: &QuadratureConfig,
    mut compute: impl FnMut(usize) -> Result<T>,
    measure: impl Fn(&T) -> Vec<C64>,
) -> Result<T> {
    q.validate()?;
    let mut panels = q.panels;
    let mut prev = compute(panels)?;
    loop {
        if panels * 2 > q.max_panels {
            return Err(Error::Accuracy(format!(
                "quadrature did not reach tolerance {:e} within {} panels per segment",
                q.tol, q.max_panels
            )));
        }
        panels *= 2;
        let next = compute(panels)?;
        let a = measure(&prev);
        let b = measure(&next);
        if b.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Accuracy("quadrature produced a non-finite value".into()));
        }
        if max_diff(&a, &b) <= q.tol * max_abs(&b).max(1.0) {
            return Ok(next);
        }
        prev = next;
    }
}

/// Values `α(w)` for each requested word.
pub fn iterated_integrals(words: &[Word], forms: &Forms, path: &PathSpec, q: &QuadratureConfig) -> Result<Vec<C64>> {
    for w in words {
        if w.iter().any(|&t| t as usize >= forms.len()) {
            return domain("word uses a letter without a form");
        }
    }
    let plan = WordPlan::new(words);
    let rule = Rule::new(q.order)?;
    let probe = layout(forms, path, &rule, q.panels)?;
    check_plan(&plan, &probe)?;
    check_outer(words, &probe)?;
    let idx: Vec<usize> = words.iter().map(|w| plan.index_of(w)).collect();
    let end = refine(
        q,
        |p| {
            let lay = layout(forms, path, &rule, p)?;
            Ok(run_plan(&plan, &lay, &rule, false).end)
        },
        |v| v.clone(),
    )?;
    Ok(idx.into_iter().map(|i| end[i]).collect())
}

/// `α(w)` along `path`.
pub fn iterated_integral(w: &[u8], forms: &Forms, path: &PathSpec, q: &QuadratureConfig) -> Result<C64> {
    Ok(iterated_integrals(&[Word::from_slice(w)], forms, path, q)?[0])
}

/// `Σ_{|w| ≤ cap} α(w) w`.
pub fn chen_series(forms: &Forms, path: &PathSpec, cap: usize, q: &QuadratureConfig) -> Result<TruncatedSeries<C64>> {
    let words = words_up_to(&forms.letters(), cap);
    let vals = iterated_integrals(&words, forms, path, q)?;
    let mut poly = NcPoly::zero();
    for (w, v) in words.into_iter().zip(vals) {
        poly.add_term(w, v);
    }
    Ok(TruncatedSeries::new(poly, cap))
}

/// Chen series at every quadrature node of a fixed layout, plus the end value.
pub(crate) struct NodeSeries {
    pub nodes: Vec<Vec<NcPoly<C64>>>,
    pub end: NcPoly<C64>,
}

pub(crate) fn chen_series_nodes(
    forms: &Forms,
    letters: &[u8],
    lay: &Layout,
    rule: &Rule,
    cap: usize,
) -> Result<NodeSeries> {
    let words = words_up_to(letters, cap);
    let plan = WordPlan::new(&words);
    check_plan(&plan, lay)?;
    let _ = forms;
    let fields = run_plan(&plan, lay, rule, true);
    let nodes_raw = fields.nodes.expect("kept");
    let m = rule.x.len();
    let mut nodes = Vec::with_capacity(nodes_raw.len());
    for panel_vals in &nodes_raw {
        let mut per = Vec::with_capacity(m);
        for j in 0..m {
            let mut p = NcPoly::zero();
            for (i, w) in plan.words.iter().enumerate() {
                p.add_term(w.clone(), panel_vals[i][j]);
            }
            per.push(p);
        }
        nodes.push(per);
    }
    let mut end = NcPoly::zero();
    for (i, w) in plan.words.iter().enumerate() {
        end.add_term(w.clone(), fields.end[i]);
    }
    Ok(NodeSeries { nodes, end })
}

/// `exp(α(t))` with the partial sum `Σ_{k ≤ terms} α(t^k)` as a cross-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarEval {
    pub value: C64,
    pub partial_sum: C64,
    pub terms: usize,
}

pub fn star_eval(t: u8, forms: &Forms, path: &PathSpec, q: &QuadratureConfig, terms: usize) -> Result<StarEval> {
    let words: Vec<Word> = (0..=terms).map(|k| Word::from_elem(t, k)).collect();
    let vals = iterated_integrals(&words, forms, path, q)?;
    Ok(StarEval { value: vals[1.min(terms)].exp(), partial_sum: vals.iter().sum(), terms })
}

/// `β`, `μ(letter)`, `η` of a linear representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearRepresentation {
    pub beta: Vec<C64>,
    pub mu: Vec<Vec<Vec<C64>>>,
    pub eta: Vec<C64>,
}

impl LinearRepresentation {
    pub fn new(beta: Vec<C64>, mu: Vec<Vec<Vec<C64>>>, eta: Vec<C64>) -> Result<Self> {
        let k = beta.len();
        if eta.len() != k || mu.iter().any(|m| m.len() != k || m.iter().any(|r| r.len() != k)) {
            return domain("linear representation has inconsistent dimensions");
        }
        Ok(LinearRepresentation { beta, mu, eta })
    }

    pub fn dim(&self) -> usize {
        self.beta.len()
    }

    /// `β μ(w) η`.
    pub fn coefficient(&self, w: &[u8]) -> C64 {
        let mut v = self.eta.clone();
        for &t in w.iter().rev() {
            v = mat_vec(&self.mu[t as usize], &v);
        }
        self.beta.iter().zip(&v).map(|(a, b)| a * b).sum()
    }
}

fn mat_vec(m: &[Vec<C64>], v: &[C64]) -> Vec<C64> {
    m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// `⟪C‖S⟫ = Σ_{|w| ≤ length_cap} (β μ(w) η) α(w)` and the size of the last included degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingValue {
    pub value: C64,
    pub last_term: f64,
}

/// Evaluated as `β (Σ_k U_k) η` with `U_0 = 1`, `U_k = ∫ (Σ_t ω_t μ(t)) U_{k−1}`.
///
/// Without `length_cap`, the series is summed until the degree-`k` term
/// drops below `q.tol`, which requires `Σ_t ‖μ(t)‖ · ∫|ω_t| < 1`.
pub fn rational_pairing(
    rep: &LinearRepresentation,
    forms: &Forms,
    path: &PathSpec,
    q: &QuadratureConfig,
    length_cap: Option<usize>,
) -> Result<PairingValue> {
    if rep.mu.len() != forms.len() {
        return domain("representation and forms have different letter counts");
    }
    let rule = Rule::new(q.order)?;
    let k = rep.dim();
    let cap = match length_cap {
        Some(c) => c,
        None => {
            let lay = layout(forms, path, &rule, q.panels)?;
            let mut bound = 0.0;
            for (t, mu) in rep.mu.iter().enumerate() {
                let norm: f64 = mu.iter().map(|r| r.iter().map(|c| c.norm()).sum::<f64>()).fold(0.0, f64::max);
                let total: f64 = lay
                    .panels
                    .iter()
                    .map(|p| p.g[t].iter().zip(&rule.w).map(|(g, w)| g.norm() * w).sum::<f64>())
                    .sum();
                bound += norm * total;
            }
            if bound >= 1.0 {
                return domain(format!("pairing convergence guard fails (bound {bound:.3} >= 1); give a length cap"));
            }
            let mut c = 1;
            while bound.powi(c as i32) > q.tol * 1e-2 && c < 10_000 {
                c += 1;
            }
            c
        }
    };
    let result = refine(
        q,
        |p| {
            let lay = layout(forms, path, &rule, p)?;
            if lay.start_singular.iter().chain(&lay.end_singular).any(|&b| b) {
                return domain("rational pairing needs a path avoiding all singularities");
            }
            Ok(pairing_terms(rep, &lay, &rule, cap, k))
        },
        |v: &Vec<C64>| v.clone(),
    )?;
    let value = result.iter().sum();
    Ok(PairingValue { value, last_term: result.last().map(|c| c.norm()).unwrap_or(0.0) })
}

/// `β U_k(end) η` for `k = 0..=cap`.
fn pairing_terms(rep: &LinearRepresentation, lay: &Layout, rule: &Rule, cap: usize, k: usize) -> Vec<C64> {
    let m = rule.x.len();
    let zero = C64::new(0.0, 0.0);
    // Fields are `U_k η` (vectors), which is all the pairing needs.
    let mut start: Vec<Vec<C64>> = vec![vec![zero; k]; cap + 1];
    start[0] = rep.eta.clone();
    for panel in &lay.panels {
        let mut vals: Vec<Vec<Vec<C64>>> = vec![vec![rep.eta.clone(); m]];
        let mut end = start.clone();
        for d in 1..=cap {
            let h: Vec<Vec<C64>> = (0..m)
                .map(|j| {
                    let mut acc = vec![zero; k];
                    for (t, mu) in rep.mu.iter().enumerate() {
                        let mv = mat_vec(mu, &vals[d - 1][j]);
                        let g = panel.g[t][j];
                        for (a, b) in acc.iter_mut().zip(mv) {
                            *a += g * b;
                        }
                    }
                    acc
                })
                .collect();
            let node_vals: Vec<Vec<C64>> = (0..m)
                .map(|i| {
                    let mut v = start[d].clone();
                    for j in 0..m {
                        let c = rule.q[i][j];
                        for (a, b) in v.iter_mut().zip(&h[j]) {
                            *a += b * c;
                        }
                    }
                    v
                })
                .collect();
            for j in 0..m {
                for (a, b) in end[d].iter_mut().zip(&h[j]) {
                    *a += b * rule.w[j];
                }
            }
            vals.push(node_vals);
        }
        start = end;
    }
    start.iter().map(|v| rep.beta.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// `2πi`.
pub fn two_pi_i() -> C64 {
    Complex64::new(0.0, 2.0 * std::f64::consts::PI)
}
