//! Graded Lie ideal of the infinitesimal braid relations.
//!
//! Each degree `d` of the ideal is stored as a row-reduced rational basis in
//! the coordinates `x ↦ ⟨x, S_l⟩` on the Lyndon basis `{P_l : |l| = d}`.
//! Columns are ordered by decreasing Lyndon word, so pivots land on the
//! largest words and the lexicographically first coordinates stay free.
//! Normal forms keep only those free coordinates.

use num_complex::Complex64;

use crate::alphabet::{Alphabet, AlphabetKind, Word};
use crate::coeff::{Coeff, C64, Q};
use crate::error::{domain, Error, Result};
use crate::lie_bases::LyndonBasis;
use crate::ncseries::NcPoly;

/// Largest number of Lyndon words of a single degree a quotient will handle.
pub const QUOTIENT_LYNDON_LIMIT: usize = 4000;

/// Which presentation of the braid relations to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelatorVariant {
    /// `[t_ik + t_jk, t_ij]`, `[t_ij + t_ik, t_jk]` for `i < j < k`, and `[t_ij, t_kl]`.
    R,
    /// `[t_ik + t_jk, t_ij]` for all distinct `i, j, k` with `t_ji = t_ij`, and `[t_ij, t_kl]`.
    RPrime,
}

impl RelatorVariant {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "R" | "r" => Ok(RelatorVariant::R),
            "Rprime" | "R'" | "rprime" => Ok(RelatorVariant::RPrime),
            _ => Err(Error::Parse(format!("unknown relator variant {s:?} (expected R or Rprime)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RelatorVariant::R => "R",
            RelatorVariant::RPrime => "Rprime",
        }
    }
}

fn t(alpha: &Alphabet, i: u32, j: u32) -> NcPoly<Q> {
    NcPoly::letter(alpha.braid_index(i, j).expect("valid braid pair"))
}

/// Degree-2 relators as Lie polynomials over `Alphabet::braid(n)`.
pub fn relators(n: u32, variant: RelatorVariant) -> Result<Vec<NcPoly<Q>>> {
    if n < 3 {
        return domain(format!("braid relators need n >= 3, got {n}"));
    }
    let alpha = Alphabet::braid(n)?;
    let mut out: Vec<NcPoly<Q>> = Vec::new();
    let mut push = |p: NcPoly<Q>| {
        if p.is_zero() {
            return;
        }
        let neg = p.scale(&Q::from_integer(-1));
        if !out.iter().any(|q| *q == p || *q == neg) {
            out.push(p);
        }
    };
    match variant {
        RelatorVariant::R => {
            for i in 1..=n {
                for j in i + 1..=n {
                    for k in j + 1..=n {
                        push((&t(&alpha, i, k) + &t(&alpha, j, k)).bracket(&t(&alpha, i, j)));
                        push((&t(&alpha, i, j) + &t(&alpha, i, k)).bracket(&t(&alpha, j, k)));
                    }
                }
            }
        }
        RelatorVariant::RPrime => {
            for i in 1..=n {
                for j in 1..=n {
                    for k in 1..=n {
                        if i != j && j != k && i != k {
                            push((&t(&alpha, i, k) + &t(&alpha, j, k)).bracket(&t(&alpha, i, j)));
                        }
                    }
                }
            }
        }
    }
    let pairs: Vec<(u32, u32)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for &(k, l) in &pairs[a + 1..] {
            if i != k && i != l && j != k && j != l {
                push(t(&alpha, i, j).bracket(&t(&alpha, k, l)));
            }
        }
    }
    Ok(out)
}

/// Row-reduced basis of a subspace of `Q^m`.
#[derive(Debug, Clone, Default)]
struct Rref {
    rows: Vec<(usize, Vec<Q>)>,
}

impl Rref {
    fn reduce(&self, v: &mut [Q]) {
        for (p, row) in &self.rows {
            let c = v[*p];
            if c != Q::from_integer(0) {
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= c * r;
                }
            }
        }
    }

    /// Add `v`; returns whether the rank grew.
    fn insert(&mut self, mut v: Vec<Q>) -> bool {
        self.reduce(&mut v);
        let Some(p) = v.iter().position(|c| *c != Q::from_integer(0)) else {
            return false;
        };
        let inv = v[p].recip();
        for x in v.iter_mut() {
            *x *= inv;
        }
        for (_, row) in self.rows.iter_mut() {
            let c = row[p];
            if c != Q::from_integer(0) {
                for (x, r) in row.iter_mut().zip(&v) {
                    *x -= c * r;
                }
            }
        }
        let at = self.rows.partition_point(|(q, _)| *q < p);
        self.rows.insert(at, (p, v));
        true
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce_c64(&self, v: &mut [C64]) {
        for (p, row) in &self.rows {
            let c = v[*p];
            if c != Complex64::new(0.0, 0.0) {
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= c * C64::from_q(r);
                }
            }
        }
    }
}

/// Per-degree dimensions of the free Lie algebra, the ideal and the quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeDims {
    pub degree: usize,
    pub free_lie: usize,
    pub ideal: usize,
    pub quotient: usize,
}

#[derive(Debug, Clone)]
struct Level {
    /// Lyndon words of this degree, decreasing.
    columns: Vec<Word>,
    ideal: Rref,
}

/// The ideal `J` generated by a relator set, truncated at a degree cap.
#[derive(Debug, Clone)]
pub struct BraidQuotient {
    n: u32,
    variant: RelatorVariant,
    cap: usize,
    alphabet: Alphabet,
    basis: LyndonBasis,
    levels: Vec<Level>,
}

impl BraidQuotient {
    pub fn new(n: u32, variant: RelatorVariant, cap: usize) -> Result<Self> {
        let rels = relators(n, variant)?;
        let alphabet = Alphabet::braid(n)?;
        Self::from_generators(alphabet, &rels, cap).map(|mut q| {
            q.variant = variant;
            q
        })
    }

    /// Ideal generated by arbitrary homogeneous Lie polynomials of degree ≥ 1.
    pub fn from_generators(alphabet: Alphabet, generators: &[NcPoly<Q>], cap: usize) -> Result<Self> {
        let letters = alphabet.indices();
        let basis = LyndonBasis::new(&letters, cap)?;
        let mut levels = Vec::with_capacity(cap + 1);
        for d in 0..=cap {
            let mut columns = basis.lyndon_of_degree(d);
            if columns.len() > QUOTIENT_LYNDON_LIMIT {
                return Err(Error::Resource(format!(
                    "degree {d} has {} Lyndon words (limit {QUOTIENT_LYNDON_LIMIT})",
                    columns.len()
                )));
            }
            columns.reverse();
            levels.push(Level { columns, ideal: Rref::default() });
        }
        let n = match alphabet.kind() {
            AlphabetKind::Braid { n } => *n,
            AlphabetKind::Free => 0,
        };
        let mut q = BraidQuotient {
            n,
            variant: RelatorVariant::R,
            cap,
            alphabet,
            basis,
            levels,
        };
        let mut seeds: Vec<Vec<NcPoly<Q>>> = vec![Vec::new(); cap + 1];
        for g in generators {
            let Some(d) = g.degree() else { continue };
            if g.homogeneous(d) != *g || d == 0 {
                return domain("ideal generators must be homogeneous of positive degree");
            }
            if d <= cap {
                seeds[d].push(g.clone());
            }
        }
        let lyndon_p: Vec<Vec<NcPoly<Q>>> = (0..=cap)
            .map(|d| q.levels[d].columns.iter().map(|l| q.basis.p(l).expect("cached").clone()).collect())
            .collect();
        let mut spans: Vec<Vec<NcPoly<Q>>> = vec![Vec::new(); cap + 1];
        for d in 1..=cap {
            let mut candidates = seeds[d].clone();
            for x in &spans[d - 1] {
                for &t in &letters {
                    candidates.push(NcPoly::letter(t).bracket(x));
                }
            }
            for (e, gens) in seeds.iter().enumerate().take(d) {
                if e == 0 || d - e == 0 {
                    continue;
                }
                for g in gens {
                    for p in &lyndon_p[d - e] {
                        candidates.push(g.bracket(p));
                    }
                }
            }
            for c in candidates {
                let v = q.coords_q(&c, d);
                if q.levels[d].ideal.insert(v) {
                    spans[d].push(c);
                }
            }
        }
        Ok(q)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn variant(&self) -> RelatorVariant {
        self.variant
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn basis(&self) -> &LyndonBasis {
        &self.basis
    }

    fn coords_q(&self, x: &NcPoly<Q>, d: usize) -> Vec<Q> {
        self.levels[d].columns.iter().map(|l| x.pairing(self.basis.s(l).expect("cached"))).collect()
    }

    fn coords_c64(&self, x: &NcPoly<C64>, d: usize) -> Vec<C64> {
        self.levels[d]
            .columns
            .iter()
            .map(|l| {
                let mut acc = C64::new(0.0, 0.0);
                for (w, c) in self.basis.s(l).expect("cached").iter() {
                    acc += x.coeff(w) * C64::from_q(c);
                }
                acc
            })
            .collect()
    }

    pub fn dims(&self) -> Vec<DegreeDims> {
        (1..=self.cap)
            .map(|d| {
                let free_lie = self.levels[d].columns.len();
                let ideal = self.levels[d].ideal.rank();
                DegreeDims { degree: d, free_lie, ideal, quotient: free_lie - ideal }
            })
            .collect()
    }

    fn check_degree(&self, x_degree: Option<usize>) -> Result<()> {
        match x_degree {
            Some(d) if d > self.cap => {
                Err(Error::Resource(format!("degree {d} exceeds quotient cap {}", self.cap)))
            }
            _ => Ok(()),
        }
    }

    /// Free-coordinate representative `Σ c_l P_l` of a Lie polynomial modulo `J`.
    ///
    /// Non-Lie parts are discarded; use [`BraidQuotient::residual`] to detect them.
    pub fn normal_form(&self, x: &NcPoly<Q>) -> Result<NcPoly<Q>> {
        self.check_degree(x.degree())?;
        let mut out = NcPoly::zero();
        for d in 1..=self.cap {
            let mut v = self.coords_q(x, d);
            self.levels[d].ideal.reduce(&mut v);
            for (l, c) in self.levels[d].columns.iter().zip(v) {
                if c != Q::from_integer(0) {
                    out = &out + &self.basis.p(l)?.scale(&c);
                }
            }
        }
        Ok(out)
    }

    /// Whether a rational Lie polynomial lies in `J` (and has no constant or non-Lie part).
    pub fn contains(&self, x: &NcPoly<Q>) -> Result<bool> {
        Ok(self.residual(&x.convert::<C64>())? == 0.0)
    }

    /// Numeric normal form.
    pub fn normal_form_c64(&self, x: &NcPoly<C64>) -> Result<NcPoly<C64>> {
        self.check_degree(x.degree())?;
        let mut out = NcPoly::zero();
        for d in 1..=self.cap {
            let mut v = self.coords_c64(x, d);
            self.levels[d].ideal.reduce_c64(&mut v);
            for (l, c) in self.levels[d].columns.iter().zip(v) {
                if c.norm() != 0.0 {
                    out = &out + &self.basis.p(l)?.convert::<C64>().scale(&c);
                }
            }
        }
        Ok(out)
    }

    /// Distance of `x` from `J`: the largest free coordinate after reduction,
    /// combined with the defect `x − Σ ⟨x,S_l⟩ P_l` that measures any non-Lie part.
    pub fn residual(&self, x: &NcPoly<C64>) -> Result<f64> {
        self.check_degree(x.degree())?;
        let mut worst = x.constant_term().norm();
        let mut lie = NcPoly::<C64>::zero();
        for d in 1..=self.cap {
            let raw = self.coords_c64(x, d);
            for (l, c) in self.levels[d].columns.iter().zip(&raw) {
                if c.norm() != 0.0 {
                    lie = &lie + &self.basis.p(l)?.convert::<C64>().scale(c);
                }
            }
            let mut v = raw;
            self.levels[d].ideal.reduce_c64(&mut v);
            worst = v.iter().map(|c| c.norm()).fold(worst, f64::max);
        }
        let mut defect = x - &lie;
        defect = defect.truncate(self.cap);
        Ok(worst.max(defect.max_abs()))
    }
}

/// `Σ_{i<j} t_ij`.
pub fn total_letter_sum(n: u32) -> Result<NcPoly<Q>> {
    let alpha = Alphabet::braid(n)?;
    let mut s = NcPoly::zero();
    for t in alpha.indices() {
        s.add_term(Word::from_slice(&[t]), Q::from_integer(1));
    }
    Ok(s)
}

/// Whether `[Σ t_ij, t] ∈ J` for every letter `t`, exactly.
pub fn centrality_check(q: &BraidQuotient) -> Result<bool> {
    if q.cap() < 2 {
        return domain("centrality needs a quotient of cap >= 2");
    }
    let sum = total_letter_sum(q.n())?;
    for t in q.alphabet().indices() {
        if !q.contains(&sum.bracket(&NcPoly::letter(t)))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Residuals of the flatness identities at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatnessSample {
    pub z: Vec<C64>,
    /// `Σ_i U_i` modulo `J`.
    pub sum: f64,
    /// `Σ_i z_i U_i − Σ t_ij` modulo `J`.
    pub weighted_sum: f64,
    /// Largest `[U_i, U_j]` modulo `J`.
    pub commutators: f64,
    /// Largest `∂_i U_j − ∂_j U_i`.
    pub curl: f64,
}

impl FlatnessSample {
    pub fn max(&self) -> f64 {
        self.sum.max(self.weighted_sum).max(self.commutators).max(self.curl)
    }
}

/// `U_i = Σ_{j≠i} t_ij / (z_i − z_j)`.
pub fn kz_coefficients(alpha: &Alphabet, z: &[C64]) -> Result<Vec<NcPoly<C64>>> {
    let n = z.len();
    let mut us = Vec::with_capacity(n);
    for i in 0..n {
        let mut u = NcPoly::zero();
        for j in 0..n {
            if i == j {
                continue;
            }
            let diff = z[i] - z[j];
            if diff.norm() == 0.0 {
                return domain(format!("coincident coordinates z{} = z{}", i + 1, j + 1));
            }
            let idx = alpha.braid_index(i as u32 + 1, j as u32 + 1)?;
            u.add_term(Word::from_slice(&[idx]), C64::new(1.0, 0.0) / diff);
        }
        us.push(u);
    }
    Ok(us)
}

/// `∂U_j/∂z_i`, from `∂(z_a − z_b)^{-1}/∂z_c = −(δ_ac − δ_bc)/(z_a − z_b)²`.
pub fn kz_coefficient_derivative(alpha: &Alphabet, z: &[C64], i: usize, j: usize) -> Result<NcPoly<C64>> {
    let mut out = NcPoly::zero();
    for k in 0..z.len() {
        if k == j {
            continue;
        }
        let d = z[j] - z[k];
        if d.norm() == 0.0 {
            return domain(format!("coincident coordinates z{} = z{}", j + 1, k + 1));
        }
        let sign = (i == j) as i32 - (i == k) as i32;
        if sign != 0 {
            let idx = alpha.braid_index(j as u32 + 1, k as u32 + 1)?;
            out.add_term(Word::from_slice(&[idx]), -C64::new(sign as f64, 0.0) / (d * d));
        }
    }
    Ok(out)
}

/// Check the flatness identities of the KZ coefficients at each sample point.
pub fn flatness_check(q: &BraidQuotient, samples: &[Vec<C64>]) -> Result<Vec<FlatnessSample>> {
    let n = q.n() as usize;
    if q.cap() < 2 {
        return domain("flatness needs a quotient of cap >= 2");
    }
    let alpha = q.alphabet();
    let total = total_letter_sum(q.n())?.convert::<C64>();
    let mut out = Vec::new();
    for z in samples {
        if z.len() != n {
            return domain(format!("sample has {} coordinates, expected {n}", z.len()));
        }
        let us = kz_coefficients(alpha, z)?;
        let mut sum = NcPoly::zero();
        let mut weighted = NcPoly::zero();
        for (i, u) in us.iter().enumerate() {
            sum = &sum + u;
            weighted = &weighted + &u.scale(&z[i]);
        }
        let mut commutators: f64 = 0.0;
        let mut curl: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                commutators = commutators.max(q.residual(&us[i].bracket(&us[j]))?);
                let di_uj = kz_coefficient_derivative(alpha, z, i, j)?;
                let dj_ui = kz_coefficient_derivative(alpha, z, j, i)?;
                curl = curl.max((&di_uj - &dj_ui).max_abs());
            }
        }
        out.push(FlatnessSample {
            z: z.clone(),
            sum: q.residual(&sum)?,
            weighted_sum: q.residual(&(&weighted - &total))?,
            commutators,
            curl,
        });
    }
    Ok(out)
}

/// Ranks of `J_ℛ`, `J_ℛ'` and their sum in each degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariantComparison {
    pub degree: usize,
    pub rank_r: usize,
    pub rank_rprime: usize,
    pub rank_sum: usize,
}

impl VariantComparison {
    pub fn equal(&self) -> bool {
        self.rank_r == self.rank_sum && self.rank_rprime == self.rank_sum
    }
}

pub fn compare_variants(n: u32, cap: usize) -> Result<Vec<VariantComparison>> {
    let a = BraidQuotient::new(n, RelatorVariant::R, cap)?;
    let b = BraidQuotient::new(n, RelatorVariant::RPrime, cap)?;
    let mut out = Vec::new();
    for d in 1..=cap {
        let mut sum = a.levels[d].ideal.clone();
        for (_, row) in &b.levels[d].ideal.rows {
            sum.insert(row.clone());
        }
        out.push(VariantComparison {
            degree: d,
            rank_r: a.levels[d].ideal.rank(),
            rank_rprime: b.levels[d].ideal.rank(),
            rank_sum: sum.rank(),
        });
    }
    Ok(out)
}
