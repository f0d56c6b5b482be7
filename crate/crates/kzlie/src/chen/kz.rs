//! KZ equations on three and four points.
//!
//! Three points: with `s = (z3 − z2)/(z1 − z2)` the one-form
//! `Ω₃ = Σ t_ij dlog(z_i − z_j) / 2πi` splits as
//! `T dlog(z1 − z2)/2πi + t23 ds/(2πi s) − t13 ds/(2πi (1 − s))`,
//! `T = t12 + t13 + t23`, so `F = L(s)|_{x0 = t23/2πi, x1 = −t13/2πi} · (z1 − z2)^{T/2πi}`
//! solves `dF = Ω₃ F` modulo the braid relations.
//!
//! Four points: an exact check of the one-form in cubic coordinates
//! `z = (xy, y, 1, 0)` in a small algebra of formal logarithmic differentials.

use std::collections::BTreeMap;

use crate::alphabet::{Alphabet, Word};
use crate::braid::{BraidQuotient, RelatorVariant};
use crate::coeff::{C64, Q};
use crate::error::{domain, Error, Result};
use crate::ncseries::{exp_trunc, inverse_trunc, NcPoly};

use super::polylog::l_series;
use super::two_pi_i;

/// Which argument and letter substitution to use for `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kz3Variant {
    /// `s = (z3 − z2)/(z1 − z2)`, `x0 = t23/2πi`, `x1 = −t13/2πi`.
    Consistent,
    /// `s = (z3 − z2)/(z1 − z2)`, `x0 = t13/2πi`, `x1 = −t23/2πi`.
    SwappedLetters,
    /// `s = (z3 − z1)/(z2 − z1)`, `x0 = t13/2πi`, `x1 = −t23/2πi`.
    SwappedArgument,
}

impl Kz3Variant {
    pub fn name(self) -> &'static str {
        match self {
            Kz3Variant::Consistent => "consistent",
            Kz3Variant::SwappedLetters => "swapped-letters",
            Kz3Variant::SwappedArgument => "swapped-argument",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "consistent" => Ok(Kz3Variant::Consistent),
            "swapped-letters" => Ok(Kz3Variant::SwappedLetters),
            "swapped-argument" => Ok(Kz3Variant::SwappedArgument),
            _ => Err(Error::Parse(format!("unknown KZ3 variant {s:?}"))),
        }
    }
}

/// Side on which the central factor `(z1 − z2)^{T/2πi}` multiplies `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CentralSide {
    Right,
    Left,
}

fn check_points(z: &[C64; 3]) -> Result<()> {
    for i in 0..3 {
        for j in i + 1..3 {
            if (z[i] - z[j]).norm() < 1e-12 {
                return domain(format!("coincident points z{} = z{}", i + 1, j + 1));
            }
        }
    }
    Ok(())
}

/// `F(z)` truncated at `cap`, over `Alphabet::braid(3)`.
pub fn kz3_solution(z: &[C64; 3], cap: usize, variant: Kz3Variant, side: CentralSide, tol: f64) -> Result<NcPoly<C64>> {
    check_points(z)?;
    let alpha = Alphabet::braid(3)?;
    let t12 = alpha.braid_index(1, 2)?;
    let t13 = alpha.braid_index(1, 3)?;
    let t23 = alpha.braid_index(2, 3)?;
    let (s, base, x0, x1) = match variant {
        Kz3Variant::Consistent => ((z[2] - z[1]) / (z[0] - z[1]), z[0] - z[1], t23, t13),
        Kz3Variant::SwappedLetters => ((z[2] - z[1]) / (z[0] - z[1]), z[0] - z[1], t13, t23),
        Kz3Variant::SwappedArgument => ((z[2] - z[0]) / (z[1] - z[0]), z[1] - z[0], t13, t23),
    };
    let l = l_series(s, cap, tol)?.poly;
    let tpi = two_pi_i();
    let image = |t: u8| -> NcPoly<C64> {
        if t == 0 {
            NcPoly::monomial(Word::from_slice(&[x0]), C64::new(1.0, 0.0) / tpi)
        } else {
            NcPoly::monomial(Word::from_slice(&[x1]), C64::new(-1.0, 0.0) / tpi)
        }
    };
    let l_sub = l.substitute(&image, cap);
    let mut total = NcPoly::<C64>::zero();
    for t in [t12, t13, t23] {
        total.add_term(Word::from_slice(&[t]), base.ln() / tpi);
    }
    let power = exp_trunc(&total, cap)?;
    Ok(match side {
        CentralSide::Right => l_sub.conc_mul_cap(&power, Some(cap)),
        CentralSide::Left => power.conc_mul_cap(&l_sub, Some(cap)),
    })
}

/// `Ω₃` component along `dz_k`: `Σ_{j≠k} t_kj / ((z_k − z_j) 2πi)`.
pub fn omega3_component(z: &[C64; 3], k: usize) -> Result<NcPoly<C64>> {
    let alpha = Alphabet::braid(3)?;
    let mut out = NcPoly::zero();
    for j in 0..3 {
        if j != k {
            let idx = alpha.braid_index(k as u32 + 1, j as u32 + 1)?;
            out.add_term(Word::from_slice(&[idx]), C64::new(1.0, 0.0) / ((z[k] - z[j]) * two_pi_i()));
        }
    }
    Ok(out)
}

/// Step used by the Richardson-extrapolated central differences.
pub const KZ3_STEP: f64 = 1e-3;

fn derivative(z: &[C64; 3], k: usize, cap: usize, variant: Kz3Variant, side: CentralSide, tol: f64) -> Result<NcPoly<C64>> {
    let diff = |h: f64| -> Result<NcPoly<C64>> {
        let mut zp = *z;
        let mut zm = *z;
        zp[k] += h;
        zm[k] -= h;
        let fp = kz3_solution(&zp, cap, variant, side, tol)?;
        let fm = kz3_solution(&zm, cap, variant, side, tol)?;
        Ok((&fp - &fm).scale(&C64::new(1.0 / (2.0 * h), 0.0)))
    };
    let d1 = diff(KZ3_STEP)?;
    let d2 = diff(KZ3_STEP / 2.0)?;
    Ok((&d2.scale(&C64::new(4.0, 0.0)) - &d1).scale(&C64::new(1.0 / 3.0, 0.0)))
}

/// `∂_k F · F^{-1} − Ω₃,k` for `k = 1, 2, 3`.
pub fn kz3_defects(z: &[C64; 3], cap: usize, variant: Kz3Variant, side: CentralSide, tol: f64) -> Result<Vec<NcPoly<C64>>> {
    let f = kz3_solution(z, cap, variant, side, tol)?;
    let finv = inverse_trunc(&f, cap)?;
    let mut out = Vec::new();
    for k in 0..3 {
        let df = derivative(z, k, cap, variant, side, tol)?;
        let x = &df.conc_mul_cap(&finv, Some(cap)) - &omega3_component(z, k)?;
        out.push(x);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Kz3Sample {
    pub z: [C64; 3],
    /// Residual modulo the braid ideal with the central factor on the right.
    pub right: f64,
    /// Same with the central factor on the left.
    pub left: f64,
    /// Largest raw coefficient of the defect before reduction.
    pub unreduced: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Kz3Report {
    pub cap: usize,
    pub variant: Kz3Variant,
    pub samples: Vec<Kz3Sample>,
}

impl Kz3Report {
    pub fn max_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.right.max(s.left)).fold(0.0, f64::max)
    }

    /// Largest gap between the two central-factor placements.
    pub fn side_gap(&self) -> f64 {
        self.samples.iter().map(|s| (s.right - s.left).abs()).fold(0.0, f64::max)
    }
}

/// Default sample points for the three-point check.
pub fn kz3_default_samples() -> Vec<[C64; 3]> {
    vec![
        [C64::new(1.3, 0.0), C64::new(0.1, 0.0), C64::new(0.4, 0.2)],
        [C64::new(2.0, 0.0), C64::new(0.0, 0.0), C64::new(0.7, -0.3)],
        [C64::new(1.0, 0.5), C64::new(-0.5, 0.0), C64::new(0.2, 0.1)],
    ]
}

/// Check `dF = Ω₃ F` modulo the braid ideal at each sample.
pub fn kz3_verify(samples: &[[C64; 3]], cap: usize, variant: Kz3Variant, tol: f64) -> Result<Kz3Report> {
    if cap == 0 || cap > 3 {
        return domain("kz3_verify supports 1 <= cap <= 3");
    }
    let q = BraidQuotient::new(3, RelatorVariant::R, cap)?;
    let mut out = Vec::new();
    for z in samples {
        let mut res = [0.0f64; 2];
        let mut unreduced: f64 = 0.0;
        for (slot, side) in [CentralSide::Right, CentralSide::Left].into_iter().enumerate() {
            for x in kz3_defects(z, cap, variant, side, tol)? {
                res[slot] = res[slot].max(q.residual(&x)?);
                unreduced = unreduced.max(x.max_abs());
            }
        }
        out.push(Kz3Sample { z: *z, right: res[0], left: res[1], unreduced });
    }
    Ok(Kz3Report { cap, variant, samples: out })
}

/// Polynomial in `x, y` with integer coefficients, keyed by exponents.
pub type XyPoly = BTreeMap<(u32, u32), i64>;

fn xy_mul(a: &XyPoly, b: &XyPoly) -> XyPoly {
    let mut out = XyPoly::new();
    for (&(i, j), &c) in a {
        for (&(k, l), &d) in b {
            *out.entry((i + k, j + l)).or_insert(0) += c * d;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn xy_sub(a: &XyPoly, b: &XyPoly) -> XyPoly {
    let mut out = a.clone();
    for (&k, &c) in b {
        *out.entry(k).or_insert(0) -= c;
    }
    out.retain(|_, c| *c != 0);
    out
}

fn xy(terms: &[((u32, u32), i64)]) -> XyPoly {
    let mut p: XyPoly = terms.iter().cloned().collect();
    p.retain(|_, c| *c != 0);
    p
}

/// `Some(c)` with `a = c·b` for a rational constant `c`.
fn proportional(a: &XyPoly, b: &XyPoly) -> Option<Q> {
    let (k, &cb) = b.iter().next()?;
    let ca = *a.get(k)?;
    let c = Q::new(ca as i128, cb as i128);
    if a.len() != b.len() {
        return None;
    }
    for (key, &v) in b {
        if Q::from_integer(*a.get(key)? as i128) != c * Q::from_integer(v as i128) {
            return None;
        }
    }
    Some(c)
}

/// Named functions of `(x, y)` and declared factorizations among them.
#[derive(Debug, Clone, Default)]
pub struct DlogRegistry {
    pub symbols: BTreeMap<String, XyPoly>,
    pub relations: BTreeMap<String, Vec<String>>,
}

impl DlogRegistry {
    /// Symbols `x, y, 1−x, 1−y, 1−xy, xy, y(1−x)` with `xy = x·y` and `y(1−x) = y·(1−x)`.
    pub fn cubic() -> Self {
        let mut r = DlogRegistry::default();
        r.symbols.insert("x".into(), xy(&[((1, 0), 1)]));
        r.symbols.insert("y".into(), xy(&[((0, 1), 1)]));
        r.symbols.insert("1-x".into(), xy(&[((0, 0), 1), ((1, 0), -1)]));
        r.symbols.insert("1-y".into(), xy(&[((0, 0), 1), ((0, 1), -1)]));
        r.symbols.insert("1-xy".into(), xy(&[((0, 0), 1), ((1, 1), -1)]));
        r.symbols.insert("xy".into(), xy(&[((1, 1), 1)]));
        r.symbols.insert("y(1-x)".into(), xy(&[((0, 1), 1), ((1, 1), -1)]));
        r.relations.insert("xy".into(), vec!["x".into(), "y".into()]);
        r.relations.insert("y(1-x)".into(), vec!["y".into(), "1-x".into()]);
        r
    }

    /// Check that each declared factorization is a polynomial identity.
    pub fn validate(&self) -> Result<()> {
        for (s, factors) in &self.relations {
            let mut prod = xy(&[((0, 0), 1)]);
            for f in factors {
                let p = self.symbols.get(f).ok_or_else(|| Error::Domain(format!("unknown symbol {f}")))?;
                prod = xy_mul(&prod, p);
            }
            let lhs = self.symbols.get(s).ok_or_else(|| Error::Domain(format!("unknown symbol {s}")))?;
            if *lhs != prod {
                return domain(format!("declared relation for {s} is not a polynomial identity"));
            }
        }
        Ok(())
    }

    /// Symbol proportional to `p`, or `None` for a constant.
    fn match_symbol(&self, p: &XyPoly) -> Result<Option<String>> {
        if p.keys().all(|&k| k == (0, 0)) {
            if p.is_empty() {
                return domain("dlog of zero");
            }
            return Ok(None);
        }
        for (name, q) in &self.symbols {
            if proportional(p, q).is_some() {
                return Ok(Some(name.clone()));
            }
        }
        domain(format!("no registered symbol matches {p:?}"))
    }

    /// Expand a symbol into atoms along the declared relations.
    fn atoms(&self, s: &str, depth: usize) -> Result<Vec<String>> {
        if depth > 16 {
            return domain("relation expansion does not terminate");
        }
        match self.relations.get(s) {
            None => Ok(vec![s.to_string()]),
            Some(fs) => {
                let mut out = Vec::new();
                for f in fs {
                    out.extend(self.atoms(f, depth + 1)?);
                }
                Ok(out)
            }
        }
    }
}

/// Formal one-form `Σ coeff · dlog(atom)`.
pub type FormalOneForm = BTreeMap<String, NcPoly<Q>>;

fn add_form(f: &mut FormalOneForm, atom: &str, c: &NcPoly<Q>) {
    let e = f.entry(atom.to_string()).or_insert_with(NcPoly::zero);
    *e = &*e + c;
    if e.is_zero() {
        f.remove(atom);
    }
}

/// `Σ_{i<j, (i,j)≠(3,4)} t_ij dlog(z_i − z_j)` at `z = (xy, y, 1, 0)`, rewritten into atoms.
pub fn kz4_cubic_form(registry: &DlogRegistry) -> Result<FormalOneForm> {
    registry.validate()?;
    let alpha = Alphabet::braid(4)?;
    let z = [xy(&[((1, 1), 1)]), xy(&[((0, 1), 1)]), xy(&[((0, 0), 1)]), XyPoly::new()];
    let mut out = FormalOneForm::new();
    for i in 1..=4u32 {
        for j in i + 1..=4 {
            if (i, j) == (3, 4) {
                continue;
            }
            let diff = xy_sub(&z[i as usize - 1], &z[j as usize - 1]);
            let t = NcPoly::letter(alpha.braid_index(i, j)?);
            if let Some(sym) = registry.match_symbol(&diff)? {
                for a in registry.atoms(&sym, 0)? {
                    add_form(&mut out, &a, &t);
                }
            }
        }
    }
    Ok(out)
}

/// The regrouped target: `t12 dlog(1−x) + t13 dlog(1−xy) + t23 dlog(1−y) + t14 dlog x + (t12+t14+t24) dlog y`.
pub fn kz4_expected() -> Result<FormalOneForm> {
    let alpha = Alphabet::braid(4)?;
    let t = |i, j| -> Result<NcPoly<Q>> { Ok(NcPoly::letter(alpha.braid_index(i, j)?)) };
    let mut f = FormalOneForm::new();
    add_form(&mut f, "1-x", &t(1, 2)?);
    add_form(&mut f, "1-xy", &t(1, 3)?);
    add_form(&mut f, "1-y", &t(2, 3)?);
    add_form(&mut f, "x", &t(1, 4)?);
    add_form(&mut f, "y", &(&(&t(1, 2)? + &t(1, 4)?) + &t(2, 4)?));
    Ok(f)
}

/// `computed − expected`, per atom.
pub fn form_difference(a: &FormalOneForm, b: &FormalOneForm) -> FormalOneForm {
    let mut out = a.clone();
    for (k, v) in b {
        add_form(&mut out, k, &v.scale(&Q::from_integer(-1)));
    }
    out
}

#[derive(Debug, Clone)]
pub struct Kz4Report {
    pub residual: FormalOneForm,
    pub control_residual: FormalOneForm,
}

/// Exact check of the cubic-coordinate display, with a negative control
/// that drops the `y(1−x)` factorization.
pub fn kz4_connection_check() -> Result<Kz4Report> {
    let reg = DlogRegistry::cubic();
    let residual = form_difference(&kz4_cubic_form(&reg)?, &kz4_expected()?);
    let mut broken = reg.clone();
    broken.relations.remove("y(1-x)");
    let control_residual = form_difference(&kz4_cubic_form(&broken)?, &kz4_expected()?);
    Ok(Kz4Report { residual, control_residual })
}
