//! One handler per subcommand. Each returns a JSON report and a pass flag.

use std::path::PathBuf;

use kzlie::alphabet::{enumerate_lyndon_over, words_up_to};
use kzlie::braid::{centrality_check, flatness_check, BraidQuotient, RelatorVariant};
use kzlie::chen::kz::{kz3_default_samples, kz3_verify, kz4_connection_check, FormalOneForm, Kz3Variant};
use kzlie::chen::polylog::{hyperlog_eval, polylog_eval};
use kzlie::chen::volterra::{chen_braids_check, volterra_iterate, BaseSeries};
use kzlie::chen::{chen_series, Forms, PathSpec};
use kzlie::diagonal::{log_diagonal_check, mrs_identity_check, theorem_diagonal_check};
use kzlie::json::{factors_to_doc, poly_to_doc, tensor_to_doc, JsonCoeff};
use kzlie::lie_bases::{pi1_project, LyndonBasis};
use kzlie::ncseries::shuffle_words;
use kzlie::{Alphabet, NcPoly, C64, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::parse;

pub struct Report {
    pub value: Value,
    pub ok: bool,
}

impl Report {
    fn ok(value: Value) -> Self {
        Report { value, ok: true }
    }
}

fn c64(z: C64) -> Value {
    json!([z.re, z.im])
}

fn names(alpha: &Alphabet, w: &[u8]) -> Value {
    json!(alpha.word_names(w))
}

pub fn lyndon(cfg: &RunConfig, alphabet: &str, max_len: Option<usize>) -> Result<Report, CliError> {
    let alpha = parse::alphabet(alphabet)?;
    let max_len = cfg.cap(max_len)?;
    let words = enumerate_lyndon_over(&alpha.indices(), max_len, cfg.lyndon_cap)?;
    Ok(Report::ok(json!({
        "alphabet": alpha.word_names(&alpha.indices()),
        "max_len": max_len,
        "count": words.len(),
        "words": words.iter().map(|w| names(&alpha, w)).collect::<Vec<_>>(),
    })))
}

pub fn shuffle(alphabet: &str, left: &str, right: &str, half: bool) -> Result<Report, CliError> {
    let alpha = parse::alphabet(alphabet)?;
    let a = parse::poly(&alpha, left)?;
    let b = parse::poly(&alpha, right)?;
    let out = if half { a.half_shuffle_mul(&b) } else { a.shuffle_mul(&b) };
    Ok(Report::ok(serde_json::to_value(poly_to_doc(&alpha, &out)).expect("serializable")))
}

pub enum PbwMode {
    Word(String),
    Decompose(String),
    Mrs(String),
}

pub fn pbw(cfg: &RunConfig, alphabet: &str, cap: Option<usize>, mode: PbwMode) -> Result<Report, CliError> {
    let alpha = parse::alphabet(alphabet)?;
    let cap = cfg.cap(cap)?;
    let basis = LyndonBasis::new(&alpha.indices(), cap)?;
    let doc = |p: &NcPoly<Q>| serde_json::to_value(poly_to_doc(&alpha, p)).expect("serializable");
    match mode {
        PbwMode::Word(w) => {
            let w = alpha.parse_word(&w)?;
            Ok(Report::ok(json!({ "word": names(&alpha, &w), "P": doc(basis.p(&w)?), "S": doc(basis.s(&w)?) })))
        }
        PbwMode::Decompose(src) => {
            let s = parse::poly(&alpha, &src)?;
            let coeffs = basis.pbw_decompose(&s);
            let back = basis.pbw_reconstruct(&coeffs)?;
            let terms: Vec<Value> = coeffs.iter().map(|(w, c)| json!({ "word": names(&alpha, w), "coeff": c.to_doc() })).collect();
            let exact = back == s.truncate(cap);
            Ok(Report { value: json!({ "coefficients": terms, "reconstructs": exact }), ok: exact })
        }
        PbwMode::Mrs(src) => {
            let s = parse::poly(&alpha, &src)?;
            let factors = basis.mrs_factorize(&s, 0.0)?;
            let back = basis.mrs_product(&factors, cap)?;
            let exact = back == s.truncate(cap);
            Ok(Report { value: json!({ "factors": factors_to_doc(&alpha, &factors), "reconstructs": exact }), ok: exact })
        }
    }
}

pub fn pi1(alphabet: &str, word: &str) -> Result<Report, CliError> {
    let alpha = parse::alphabet(alphabet)?;
    let w = alpha.parse_word(word)?;
    Ok(Report::ok(serde_json::to_value(poly_to_doc(&alpha, &pi1_project(&w))).expect("serializable")))
}

pub fn diagonal(cfg: &RunConfig, check: &str, alphabet: &str, n: Option<u32>, cap: Option<usize>) -> Result<Report, CliError> {
    let cap = cfg.cap(cap)?;
    match check {
        "mrs" | "log" => {
            let alpha = parse::alphabet_or_braid(alphabet, n)?;
            let residual =
                if check == "mrs" { mrs_identity_check(&alpha.indices(), cap)? } else { log_diagonal_check(&alpha.indices(), cap)? };
            Ok(Report {
                value: json!({ "check": check, "cap": cap, "residual": tensor_to_doc(&alpha, &residual) }),
                ok: residual.is_zero(),
            })
        }
        "split" => {
            let n = n.ok_or_else(|| CliError::Usage("--check split needs --n".into()))?;
            let alpha = Alphabet::braid(n)?;
            let rep = theorem_diagonal_check(n, cap)?;
            let reading = rep.form1_reading();
            let form1: Vec<Value> = rep
                .form1
                .iter()
                .map(|r| {
                    json!({
                        "reading": r.reading.name(),
                        "residual_terms": r.residual.len(),
                        "residual": tensor_to_doc(&alpha, &r.residual),
                    })
                })
                .collect();
            Ok(Report {
                value: json!({
                    "check": "split",
                    "n": n,
                    "cap": cap,
                    "eps": rep.eps,
                    "form1_reading": reading.map(|r| r.name()),
                    "form1": form1,
                    "form2_residual": tensor_to_doc(&alpha, &rep.form2),
                    "form2_unnormalized_terms": rep.form2_unnormalized.len(),
                }),
                ok: rep.form2.is_zero() && reading.is_some(),
            })
        }
        other => Err(CliError::Usage(format!("unknown diagonal check {other:?}; use mrs, log or split"))),
    }
}

pub struct BraidArgs {
    pub n: u32,
    pub variant: String,
    pub cap: Option<usize>,
    pub check: String,
    pub samples: usize,
    pub seed: u64,
}

pub fn braid(cfg: &RunConfig, a: BraidArgs) -> Result<Report, CliError> {
    let cap = cfg.cap(a.cap)?;
    let variant = RelatorVariant::parse(&a.variant)?;
    let q = BraidQuotient::new(a.n, variant, cap)?;
    let dims: Vec<Value> = q
        .dims()
        .iter()
        .map(|d| json!({ "degree": d.degree, "free_lie": d.free_lie, "ideal": d.ideal, "quotient": d.quotient }))
        .collect();
    let mut value = json!({ "n": a.n, "variant": variant.name(), "cap": cap, "dims": dims });
    let ok = match a.check.as_str() {
        "dims" => true,
        "central" => {
            let central = centrality_check(&q)?;
            value["central"] = json!(central);
            central
        }
        "flat" => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let pts: Vec<Vec<C64>> = (0..a.samples)
                .map(|_| (0..a.n).map(|_| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect())
                .collect();
            let samples = flatness_check(&q, &pts)?;
            let worst = samples.iter().map(|s| s.max()).fold(0.0, f64::max);
            value["flatness"] = json!(samples
                .iter()
                .map(|s| json!({
                    "z": s.z.iter().map(|z| c64(*z)).collect::<Vec<_>>(),
                    "sum": s.sum,
                    "weighted_sum": s.weighted_sum,
                    "commutators": s.commutators,
                    "curl": s.curl,
                }))
                .collect::<Vec<_>>());
            value["max_residual"] = json!(worst);
            worst < 1e-10
        }
        other => return Err(CliError::Usage(format!("unknown braid check {other:?}; use dims, central or flat"))),
    };
    value["check"] = json!(a.check);
    Ok(Report { value, ok })
}

/// Straight path moving every point slightly; no two points meet for any `n`.
pub fn default_kz_path(n: u32) -> PathSpec {
    let start: Vec<C64> = (0..n).map(|i| C64::new(i as f64 + 1.0, 0.0)).collect();
    let end: Vec<C64> = (0..n).map(|i| start[i as usize] + C64::from_polar(0.3, i as f64 + 0.5)).collect();
    PathSpec::line(start, end).expect("consistent dimensions")
}

fn load_path(path: Option<&PathBuf>, n: u32) -> Result<PathSpec, CliError> {
    match path {
        Some(p) => {
            let spec: PathSpec = parse::read_json(p)?;
            Ok(PathSpec::new(spec.waypoints)?)
        }
        None => Ok(default_kz_path(n)),
    }
}

pub fn chen(cfg: &RunConfig, n: u32, path: Option<&PathBuf>, cap: Option<usize>, scale: &str) -> Result<Report, CliError> {
    let cap = cfg.cap(cap)?;
    let alpha = Alphabet::braid(n)?;
    let forms = Forms::kz(n, parse::complex(scale)?)?;
    let path = load_path(path, n)?;
    if path.dim() != n as usize {
        return Err(CliError::Usage(format!("path has dimension {}, expected {n}", path.dim())));
    }
    let s = chen_series(&forms, &path, cap, &cfg.quad())?.poly;
    // Chen's lemma on pairs of words whose shuffles stay within the cap.
    let words = words_up_to(&forms.letters(), cap);
    let mut worst: f64 = 0.0;
    for u in &words {
        for v in words.iter().filter(|v| u.len() + v.len() <= cap) {
            let lhs: C64 = shuffle_words(u, v).iter().map(|(w, m)| s.coeff(w) * *m as f64).sum();
            worst = worst.max((lhs - s.coeff(u) * s.coeff(v)).norm());
        }
    }
    Ok(Report {
        value: json!({ "n": n, "cap": cap, "path": path, "series": poly_to_doc(&alpha, &s), "shuffle_residual": worst }),
        ok: worst < cfg.check_tol,
    })
}

pub fn li(cfg: &RunConfig, word: &str, z: &str, tol: Option<f64>) -> Result<Report, CliError> {
    let alpha = Alphabet::x(2);
    let w = alpha.parse_word(word)?;
    let z = parse::complex(z)?;
    let v = polylog_eval(&w, z, tol.unwrap_or(cfg.tol))?;
    Ok(Report::ok(json!({ "word": names(&alpha, &w), "z": c64(z), "value": c64(v) })))
}

pub fn hyperlog(cfg: &RunConfig, sing: &str, word: &str, z: &str, path: Option<&PathBuf>) -> Result<Report, CliError> {
    let sing = parse::complex_list(sing)?;
    let alpha = Alphabet::x(sing.len());
    let w = alpha.parse_word(word)?;
    let z = parse::complex(z)?;
    let path = match path {
        Some(p) => Some(parse::read_json::<PathSpec>(p)?),
        None => None,
    };
    let v = hyperlog_eval(&w, z, &sing, path.as_ref(), &cfg.quad())?;
    Ok(Report::ok(json!({
        "word": names(&alpha, &w),
        "singularities": sing.iter().map(|a| c64(*a)).collect::<Vec<_>>(),
        "z": c64(z),
        "value": c64(v),
    })))
}

pub struct VolterraArgs {
    pub n: u32,
    pub split: String,
    pub k: usize,
    pub path: Option<PathBuf>,
    pub scale: String,
    pub abelian: bool,
}

pub fn volterra(cfg: &RunConfig, a: VolterraArgs) -> Result<Report, CliError> {
    let alpha = Alphabet::braid(a.n)?;
    let k = cfg.cap(Some(a.k))?;
    let base: Vec<u8> = if a.split == format!("T{}", a.n) {
        alpha.braid_split().expect("braid alphabet").0
    } else {
        a.split.split(',').map(|s| alpha.parse_letter(s.trim())).collect::<kzlie::Result<_>>()?
    };
    let path = load_path(a.path.as_ref(), a.n)?;
    let scale = parse::complex(&a.scale)?;
    let q = cfg.quad();
    if a.abelian {
        let forms = Forms::kz(a.n, scale)?;
        let vt = volterra_iterate(&forms, &base, &path, &q, k, k, BaseSeries::Abelian)?;
        let c = chen_series(&forms, &path, k, &q)?.poly;
        let residual = (&vt.sum() - &c).truncate(k).max_abs();
        return Ok(Report {
            value: json!({ "base": names(&alpha, &base), "k": k, "mode": "abelian", "sum_residual": residual }),
            ok: residual < cfg.check_tol,
        });
    }
    let rep = chen_braids_check(a.n, &base, &path, &q, k, scale)?;
    let ok = rep.sum_residual < cfg.check_tol && rep.closed_form_residual.is_none_or(|r| r < cfg.check_tol);
    Ok(Report {
        value: json!({
            "base": names(&alpha, &base),
            "k": k,
            "mode": "chen",
            "sum_residual": rep.sum_residual,
            "closed_form_residual": rep.closed_form_residual,
        }),
        ok,
    })
}

pub fn kz3(cfg: &RunConfig, cap: Option<usize>, variant: &str, samples: Option<&PathBuf>) -> Result<Report, CliError> {
    let cap = cfg.cap(cap)?;
    let variant = Kz3Variant::parse(variant)?;
    let samples: Vec<[C64; 3]> = match samples {
        Some(p) => parse::read_json(p)?,
        None => kz3_default_samples(),
    };
    let rep = kz3_verify(&samples, cap, variant, cfg.tol.min(1e-12))?;
    let per: Vec<Value> = rep
        .samples
        .iter()
        .map(|s| {
            json!({
                "z": s.z.iter().map(|z| c64(*z)).collect::<Vec<_>>(),
                "right": s.right,
                "left": s.left,
                "unreduced": s.unreduced,
            })
        })
        .collect();
    let (res, gap) = (rep.max_residual(), rep.side_gap());
    Ok(Report {
        value: json!({ "cap": cap, "variant": variant.name(), "samples": per, "max_residual": res, "side_gap": gap }),
        ok: res < 1e-5 && gap < 1e-8,
    })
}

fn form_doc(f: &FormalOneForm) -> Value {
    let alpha = Alphabet::braid(4).expect("n = 4");
    let map: serde_json::Map<String, Value> =
        f.iter().map(|(k, p)| (k.clone(), serde_json::to_value(poly_to_doc(&alpha, p)).expect("serializable"))).collect();
    Value::Object(map)
}

pub fn kz4() -> Result<Report, CliError> {
    let rep = kz4_connection_check()?;
    let zero = rep.residual.values().all(|p| p.is_zero());
    let control = rep.control_residual.values().any(|p| !p.is_zero());
    Ok(Report {
        value: json!({
            "residual": form_doc(&rep.residual),
            "residual_zero": zero,
            "control_residual": form_doc(&rep.control_residual),
            "control_nonzero": control,
        }),
        ok: zero && control,
    })
}
