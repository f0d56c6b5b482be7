//! The `checkall` suite. The fast profile lowers every cap by one.

use std::collections::HashMap;
use std::time::Instant;

use kzlie::alphabet::{words_up_to, Alphabet};
use kzlie::braid::{centrality_check, flatness_check, BraidQuotient, RelatorVariant};
use kzlie::chen::kz::{kz3_default_samples, kz3_verify, kz4_connection_check, Kz3Variant};
use kzlie::chen::polylog::{phi_kz, polylog_eval};
use kzlie::chen::volterra::chen_braids_check;
use kzlie::chen::{chen_series, rational_pairing, Forms, LinearRepresentation, PathSpec, QuadratureConfig};
use kzlie::diagonal::{log_diagonal_check, mrs_identity_check, theorem_diagonal_check, LazardDualFamily};
use kzlie::lie_bases::LyndonBasis;
use kzlie::ncseries::{adjoint_rcheck, exp_trunc, log_trunc, right_bracketing, shuffle_words};
use kzlie::{NcPoly, Word, C64, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Fast,
    Full,
}

impl Profile {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "fast" => Some(Profile::Fast),
            "full" => Some(Profile::Full),
            _ => None,
        }
    }

    fn cap(self, full: usize) -> usize {
        match self {
            Profile::Fast => full - 1,
            Profile::Full => full,
        }
    }
}

struct Check {
    passed: bool,
    residuals: Value,
}

fn check(passed: bool, residuals: Value) -> Check {
    Check { passed, residuals }
}

type Criterion = (usize, &'static str, f64, fn(Profile, &QuadratureConfig) -> kzlie::Result<Check>);

const CRITERIA: [Criterion; 12] = [
    (1, "pbw_duality", 10.0, pbw_duality),
    (2, "mrs_identity", 30.0, mrs_identity),
    (3, "diagonal_factorization", 60.0, diagonal_theorem),
    (4, "lazard_family", 30.0, lazard_family),
    (5, "property_suites", 60.0, property_suites),
    (6, "braid_quotient", 30.0, braid_module),
    (7, "chen_numerics", 120.0, chen_numerics),
    (8, "zeta_constants", 30.0, zeta_constants),
    (9, "hypergeometric_pairing", 30.0, hypergeometric),
    (10, "volterra", 120.0, volterra),
    (11, "kz3", 120.0, kz3),
    (12, "kz4", 5.0, kz4),
];

/// Runs every criterion; returns the summary and the ids that failed.
pub fn run(profile: Profile, q: &QuadratureConfig) -> (Value, Vec<usize>) {
    let mut rows = Vec::new();
    let mut failing = Vec::new();
    for (id, name, budget, f) in CRITERIA {
        let t = Instant::now();
        let out = f(profile, q);
        let secs = t.elapsed().as_secs_f64();
        let (passed, residuals) = match out {
            Ok(c) => (c.passed && secs < budget, c.residuals),
            Err(e) => (false, json!({ "error": e.to_string() })),
        };
        eprintln!("{} {id:>2} {name} ({secs:.2}s)", if passed { "PASS" } else { "FAIL" });
        if !passed {
            failing.push(id);
        }
        rows.push(json!({ "id": id, "name": name, "passed": passed, "seconds": secs, "budget_seconds": budget, "residuals": residuals }));
    }
    let profile = if profile == Profile::Fast { "fast" } else { "full" };
    (json!({ "profile": profile, "checks": rows, "failing": failing }), failing)
}

fn shuffle_rec(u: &[u8], v: &[u8]) -> HashMap<Vec<u8>, i128> {
    let mut out = HashMap::new();
    if u.is_empty() || v.is_empty() {
        out.insert([u, v].concat(), 1);
        return out;
    }
    for (w, m) in shuffle_rec(&u[1..], v) {
        *out.entry([&[u[0]][..], &w].concat()).or_insert(0) += m;
    }
    for (w, m) in shuffle_rec(u, &v[1..]) {
        *out.entry([&[v[0]][..], &w].concat()).or_insert(0) += m;
    }
    out
}

fn shuffle_oracle(a: &NcPoly<Q>, b: &NcPoly<Q>) -> NcPoly<Q> {
    let mut out = NcPoly::zero();
    for (u, x) in a.iter() {
        for (v, y) in b.iter() {
            for (w, m) in shuffle_rec(u, v) {
                out.add_term(Word::from_vec(w), x * y * Q::from_integer(m));
            }
        }
    }
    out
}

fn pair_shuffle(s: &NcPoly<Q>, u: &[u8], v: &[u8]) -> Q {
    shuffle_rec(u, v).into_iter().fold(Q::from_integer(0), |acc, (w, m)| acc + s.coeff(&w) * Q::from_integer(m))
}

fn friedrichs(s: &NcPoly<Q>, cap: usize, grouplike: bool) -> bool {
    let ws: Vec<Word> = words_up_to(&[0, 1], cap - 1).into_iter().filter(|w| !w.is_empty()).collect();
    let unit = if grouplike { Q::from_integer(1) } else { Q::from_integer(0) };
    s.coeff(&[]) == unit
        && ws.iter().all(|u| {
            ws.iter().all(|v| {
                let expect = if grouplike { s.coeff(u) * s.coeff(v) } else { Q::from_integer(0) };
                u.len() + v.len() > cap || pair_shuffle(s, u, v) == expect
            })
        })
}

fn random_poly(rng: &mut ChaCha8Rng, letters: u8, min_len: usize, max_len: usize) -> NcPoly<Q> {
    let n = rng.gen_range(1..5);
    NcPoly::from_terms((0..n).map(|_| {
        let len = rng.gen_range(min_len..=max_len);
        let w: Vec<u8> = (0..len).map(|_| rng.gen_range(0..letters)).collect();
        (Word::from_vec(w), Q::from_integer(rng.gen_range(-3..=3)))
    }))
}

fn random_lie(rng: &mut ChaCha8Rng, max_len: usize) -> NcPoly<Q> {
    let mut out = NcPoly::zero();
    for _ in 0..rng.gen_range(1..4) {
        let mut acc = NcPoly::letter(rng.gen_range(0..2));
        for _ in 1..rng.gen_range(1..=max_len) {
            acc = NcPoly::letter(rng.gen_range(0..2)).bracket(&acc);
        }
        out = &out + &acc.scale(&Q::from_integer(rng.gen_range(-3..=3)));
    }
    out
}

fn zeta_oracle(s: i32) -> f64 {
    let n = 10_000usize;
    let head: f64 = (1..n).map(|k| (k as f64).powi(-s)).sum();
    let (nf, sf) = (n as f64, s as f64);
    head + nf.powf(1.0 - sf) / (sf - 1.0) + 0.5 * nf.powi(-s) + sf / 12.0 * nf.powi(-s - 1)
}

fn rk4_oracle(mu: &[[[f64; 2]; 2]; 2], a: f64, b: f64, steps: usize) -> f64 {
    let f = |z: f64, y: [f64; 2]| -> [f64; 2] {
        let m = |i: usize, j: usize| mu[0][i][j] / z + mu[1][i][j] / (1.0 - z);
        [m(0, 0) * y[0] + m(0, 1) * y[1], m(1, 0) * y[0] + m(1, 1) * y[1]]
    };
    let h = (b - a) / steps as f64;
    let mut y = [1.0, 0.0];
    for k in 0..steps {
        let z = a + k as f64 * h;
        let k1 = f(z, y);
        let k2 = f(z + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = f(z + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = f(z + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y[0]
}

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn max_diff(a: &NcPoly<C64>, b: &NcPoly<C64>, words: &[Word]) -> f64 {
    words.iter().map(|w| (a.coeff(w) - b.coeff(w)).norm()).fold(0.0, f64::max)
}

fn kz3_path() -> kzlie::Result<PathSpec> {
    PathSpec::line(vec![r(2.0), r(0.0), r(0.5)], vec![c(2.5, 0.3), r(0.2), c(1.0, 0.1)])
}

fn pbw_duality(p: Profile, _: &QuadratureConfig) -> kzlie::Result<Check> {
    let mut bad = 0usize;
    let mut pairs = 0usize;
    for (letters, cap) in [(vec![0u8, 1], p.cap(5)), (Alphabet::braid(3)?.indices(), p.cap(4))] {
        let basis = LyndonBasis::new(&letters, cap)?;
        let words = basis.words();
        for u in &words {
            let pu = basis.p(u)?;
            for v in &words {
                pairs += 1;
                let expect = if u == v { Q::from_integer(1) } else { Q::from_integer(0) };
                bad += (pu.pairing(basis.s(v)?) != expect) as usize;
            }
        }
    }
    Ok(check(bad == 0, json!({ "pairings": pairs, "mismatches": bad })))
}

fn mrs_identity(p: Profile, _: &QuadratureConfig) -> kzlie::Result<Check> {
    let t3 = Alphabet::braid(3)?.indices();
    let a = mrs_identity_check(&[0, 1], p.cap(4))?.len();
    let b = mrs_identity_check(&t3, p.cap(3))?.len();
    let l1 = log_diagonal_check(&[0, 1], p.cap(3))?.len();
    let l2 = log_diagonal_check(&t3, p.cap(3))?.len();
    Ok(check(a + b + l1 + l2 == 0, json!({ "mrs_x": a, "mrs_t3": b, "log_x": l1, "log_t3": l2 })))
}

fn diagonal_theorem(p: Profile, _: &QuadratureConfig) -> kzlie::Result<Check> {
    let mut ok = true;
    let mut rows = Vec::new();
    for n in [3, 4] {
        let rep = theorem_diagonal_check(n, p.cap(3))?;
        let reading = rep.form1_reading();
        ok &= rep.form2.is_zero() && reading.is_some();
        rows.push(json!({
            "n": n,
            "eps": rep.eps,
            "form2_terms": rep.form2.len(),
            "form1_reading": reading.map(|r| r.name()),
            "form1_terms": rep.form1.iter().map(|r| json!({ "reading": r.reading.name(), "terms": r.residual.len() })).collect::<Vec<_>>(),
        }));
    }
    Ok(check(ok, json!(rows)))
}

fn lazard_family(p: Profile, _: &QuadratureConfig) -> kzlie::Result<Check> {
    let mut ok = true;
    let mut towers = 0;
    let cap = p.cap(3);
    for n in [3, 4] {
        let fam = LazardDualFamily::new(n, cap)?;
        for (i, row) in fam.gram().iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                ok &= *x == Q::from_integer((i == j) as i128);
            }
        }
        let seqs: Vec<Vec<usize>> = fam.sequences(cap).into_iter().filter(|s| s.len() <= 2).collect();
        for s in &seqs {
            let tower = fam.tower(s, false, true);
            for s2 in &seqs {
                towers += 1;
                ok &= tower.pairing(&fam.product(s2)) == Q::from_integer((s == s2) as i128);
            }
        }
    }
    Ok(check(ok, json!({ "tower_pairings": towers })))
}

fn property_suites(p: Profile, _: &QuadratureConfig) -> kzlie::Result<Check> {
    let deg = p.cap(5);
    let mut rng = ChaCha8Rng::seed_from_u64(20261015);
    let mut fails = [0usize; 5];
    for _ in 0..200 {
        let (a, b, t) = (random_poly(&mut rng, 2, 1, 2), random_poly(&mut rng, 2, 1, deg - 3), random_poly(&mut rng, 2, 1, 1));
        let lhs = a.half_shuffle_mul(&b).half_shuffle_mul(&t);
        let rhs = &a.half_shuffle_mul(&b.half_shuffle_mul(&t)) + &a.half_shuffle_mul(&t.half_shuffle_mul(&b));
        fails[0] += (lhs != rhs) as usize;
        let (x, y) = (random_poly(&mut rng, 3, 1, deg - 2), random_poly(&mut rng, 3, 1, 2));
        fails[1] += (&x.half_shuffle_mul(&y) + &y.half_shuffle_mul(&x) != shuffle_oracle(&x, &y)) as usize;
        let (s, u) = (random_poly(&mut rng, 2, 0, deg - 2), random_poly(&mut rng, 2, 0, 2));
        let l = random_lie(&mut rng, 3);
        let g = exp_trunc(&l, deg)?;
        let anti = s.conc_mul(&u).antipode() == u.antipode().conc_mul(&s.antipode())
            && s.shuffle_mul(&u).antipode() == s.antipode().shuffle_mul(&u.antipode())
            && g.conc_mul_cap(&g.antipode(), Some(deg)) == NcPoly::one();
        fails[2] += (!anti) as usize;
        let h = g.conc_mul_cap(&exp_trunc(&random_lie(&mut rng, 2), deg)?, Some(deg));
        let ree = friedrichs(&g, deg, true) && friedrichs(&l.truncate(deg), deg, false) && friedrichs(&log_trunc(&h, deg)?, deg, false);
        fails[3] += (!ree) as usize;
        let v: Vec<u8> = (0..rng.gen_range(1..=deg)).map(|_| rng.gen_range(0..3)).collect();
        let w: Vec<u8> = (0..rng.gen_range(1..=deg)).map(|_| rng.gen_range(0..3)).collect();
        fails[4] += (right_bracketing::<Q>(&v).coeff(&w) != adjoint_rcheck::<Q>(&w).coeff(&v)) as usize;
    }
    Ok(check(
        fails.iter().all(|&f| f == 0),
        json!({ "trials": 200, "zinbiel": fails[0], "symmetrization": fails[1], "antipode": fails[2], "ree": fails[3], "adjoint": fails[4] }),
    ))
}

fn braid_module(_: Profile, _: &QuadratureConfig) -> kzlie::Result<Check> {
    let dim = BraidQuotient::new(3, RelatorVariant::R, 2)?.dims()[1].quotient;
    let mut central = true;
    let mut worst: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [3u32, 4] {
        let q = BraidQuotient::new(n, RelatorVariant::R, 2)?;
        central &= centrality_check(&q)?;
        let pts: Vec<Vec<C64>> = (0..5).map(|_| (0..n).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect()).collect();
        for s in flatness_check(&q, &pts)? {
            worst = worst.max(s.max());
        }
    }
    Ok(check(dim == 1 && central && worst < 1e-10, json!({ "quotient_dim_2": dim, "central": central, "flatness": worst })))
}

fn chen_numerics(p: Profile, q: &QuadratureConfig) -> kzlie::Result<Check> {
    let cap = p.cap(3);
    let forms = Forms::kz(3, r(1.0))?;
    let s = chen_series(&forms, &kz3_path()?, 2 * cap, q)?.poly;
    let short = words_up_to(&forms.letters(), cap);
    let mut shuffle: f64 = 0.0;
    for u in &short {
        for v in &short {
            let lhs: C64 = shuffle_words(u, v).iter().map(|(w, m)| s.coeff(w) * *m as f64).sum();
            shuffle = shuffle.max((lhs - s.coeff(u) * s.coeff(v)).norm());
        }
    }
    let m = vec![c(2.2, 0.5), c(0.1, -0.2), r(0.7)];
    let first = PathSpec::line(vec![r(2.0), r(0.0), r(0.5)], m.clone())?;
    let second = PathSpec::line(m, vec![c(2.5, 0.3), r(0.2), c(1.0, 0.1)])?;
    let detour = first.then(&second)?;
    let whole = chen_series(&forms, &detour, cap, q)?.poly;
    let c1 = chen_series(&forms, &first, cap, q)?.poly;
    let c2 = chen_series(&forms, &second, cap, q)?.poly;
    let words = words_up_to(&forms.letters(), cap);
    let concat = max_diff(&whole, &c2.conc_mul_cap(&c1, Some(cap)), &words);
    let hf = Forms::hyperlog(&[r(0.0), r(1.0), r(2.0)]);
    let pa = PathSpec::line1(c(0.3, 0.1), c(0.8, 0.4));
    let pb = PathSpec::new(vec![vec![c(0.3, 0.1)], vec![c(0.4, 0.6)], vec![c(0.9, 0.5)], vec![c(0.8, 0.4)]])?;
    let homotopy = max_diff(&chen_series(&hf, &pa, cap, q)?.poly, &chen_series(&hf, &pb, cap, q)?.poly, &words_up_to(&hf.letters(), cap));
    let straight = chen_series(&forms, &kz3_path()?, cap, q)?.poly;
    let diff = &log_trunc(&straight, cap)? - &log_trunc(&whole, cap)?;
    let kz_h = BraidQuotient::new(3, RelatorVariant::R, cap)?.residual(&diff)?;
    Ok(check(
        shuffle < 1e-8 && concat < 1e-8 && homotopy < 1e-7 && kz_h < 1e-7,
        json!({ "shuffle": shuffle, "concatenation": concat, "homotopy": homotopy, "kz_homotopy_mod_braid": kz_h }),
    ))
}

fn zeta_constants(_: Profile, _: &QuadratureConfig) -> kzlie::Result<Check> {
    let tol = 1e-12;
    let (z2, z3) = (zeta_oracle(2), zeta_oracle(3));
    let e2 = (polylog_eval(&[0, 1], r(1.0), tol)? - r(z2)).norm();
    let e3 = (polylog_eval(&[0, 0, 1], r(1.0), tol)? - r(z3)).norm();
    let phi = phi_kz(2, tol)?.poly;
    let p01 = (phi.coeff(&[0, 1]) - r(z2)).norm();
    let p10 = (phi.coeff(&[1, 0]) + r(z2)).norm();
    Ok(check(e2.max(e3).max(p01).max(p10) < 1e-8, json!({ "zeta2": e2, "zeta3": e3, "phi_x0x1": p01, "phi_x1x0": p10 })))
}

fn hypergeometric(_: Profile, q: &QuadratureConfig) -> kzlie::Result<Check> {
    let (t0, t1, t2) = (0.3, 0.4, 0.9);
    let mu = [[[0.0, 0.0], [-t0 * t1, -t2]], [[0.0, -1.0], [0.0, -(t2 - t0 - t1)]]];
    let to_c = |m: &[[f64; 2]; 2]| m.iter().map(|row| row.iter().map(|&x| r(x)).collect()).collect::<Vec<Vec<C64>>>();
    let rep = LinearRepresentation::new(vec![r(1.0), r(0.0)], mu.iter().map(to_c).collect(), vec![r(1.0), r(0.0)])?;
    let got = rational_pairing(&rep, &Forms::polylog(), &PathSpec::line1(r(0.1), r(0.5)), q, Some(20))?;
    let oracle = rk4_oracle(&mu, 0.1, 0.5, 20_000);
    let err = (got.value - r(oracle)).norm();
    Ok(check(err < 1e-6, json!({ "pairing": got.value.re, "oracle": oracle, "error": err, "last_term": got.last_term })))
}

fn volterra(p: Profile, q: &QuadratureConfig) -> kzlie::Result<Check> {
    let cap = p.cap(3);
    let a = Alphabet::braid(3)?;
    let (tn, _) = a.braid_split().expect("braid alphabet");
    let t12 = a.braid_index(1, 2)?;
    let r1 = chen_braids_check(3, &tn, &kz3_path()?, q, cap, r(0.5))?;
    let r2 = chen_braids_check(3, &[t12], &kz3_path()?, q, cap, r(0.5))?;
    let closed = r1.closed_form_residual.unwrap_or(f64::INFINITY);
    Ok(check(
        r1.sum_residual < 1e-6 && closed < 1e-6 && r2.sum_residual < 1e-6,
        json!({ "t3_base": r1.sum_residual, "closed_form": closed, "t12_base": r2.sum_residual }),
    ))
}

fn kz3(p: Profile, _: &QuadratureConfig) -> kzlie::Result<Check> {
    let rep = kz3_verify(&kz3_default_samples(), p.cap(2), Kz3Variant::Consistent, 1e-13)?;
    let (res, gap) = (rep.max_residual(), rep.side_gap());
    Ok(check(res < 1e-5 && gap < 1e-8, json!({ "max_residual": res, "side_gap": gap })))
}

fn kz4(_: Profile, _: &QuadratureConfig) -> kzlie::Result<Check> {
    let rep = kz4_connection_check()?;
    let zero = rep.residual.values().all(|p| p.is_zero());
    let control = rep.control_residual.values().any(|p| !p.is_zero());
    Ok(check(zero && control, json!({ "residual_zero": zero, "control_nonzero": control })))
}
