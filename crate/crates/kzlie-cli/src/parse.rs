//! Argument parsing for alphabets, words, polynomials and complex numbers.

use std::path::Path;

use kzlie::json::{poly_from_doc, PolyDoc};
use kzlie::{Alphabet, NcPoly, C64, Q};
use serde::de::DeserializeOwned;

use crate::error::CliError;

/// `T<n>` for the braid alphabet, otherwise comma-separated letter names in increasing order.
pub fn alphabet(spec: &str) -> Result<Alphabet, CliError> {
    let spec = spec.trim();
    if let Some(n) = spec.strip_prefix('T').and_then(|n| n.parse::<u32>().ok()) {
        return Ok(Alphabet::braid(n)?);
    }
    let names: Vec<&str> = spec.split(',').map(str::trim).collect();
    if names.iter().enumerate().all(|(i, n)| *n == format!("x{i}")) {
        return Ok(Alphabet::x(names.len()));
    }
    Ok(Alphabet::free(&names)?)
}

/// `--n` wins over `--alphabet`.
pub fn alphabet_or_braid(spec: &str, n: Option<u32>) -> Result<Alphabet, CliError> {
    match n {
        Some(n) => Ok(Alphabet::braid(n)?),
        None => alphabet(spec),
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.display().to_string(), source })
}

/// A word such as `x0x1`, or `@file.json` holding a rational polynomial document.
pub fn poly(alpha: &Alphabet, src: &str) -> Result<NcPoly<Q>, CliError> {
    match src.strip_prefix('@') {
        Some(path) => {
            let doc: PolyDoc = read_json(Path::new(path))?;
            Ok(poly_from_doc(alpha, &doc)?)
        }
        None => Ok(NcPoly::word(&alpha.parse_word(src)?)),
    }
}

/// `a`, `a+bi`, `a-bi`, `bi`, or `a,b`.
pub fn complex(s: &str) -> Result<C64, CliError> {
    let bad = || CliError::Usage(format!("cannot parse complex number {s:?}"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some((a, b)) = t.split_once(',') {
        return Ok(C64::new(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(C64::new(t.parse().map_err(|_| bad())?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |x: &str| -> Result<f64, CliError> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => Ok(C64::new(body[..k].parse().map_err(|_| bad())?, imag(&body[k..])?)),
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

pub fn complex_list(s: &str) -> Result<Vec<C64>, CliError> {
    s.split(',').map(complex).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(complex("0.5").unwrap(), C64::new(0.5, 0.0));
        assert_eq!(complex("0.5+0.2i").unwrap(), C64::new(0.5, 0.2));
        assert_eq!(complex("-1e-3-2i").unwrap(), C64::new(-1e-3, -2.0));
        assert_eq!(complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(complex("1,2").unwrap(), C64::new(1.0, 2.0));
        assert!(complex("x").is_err());
    }

    #[test]
    fn alphabets() {
        assert_eq!(alphabet("x0,x1").unwrap(), Alphabet::x(2));
        assert_eq!(alphabet("T3").unwrap(), Alphabet::braid(3).unwrap());
        assert_eq!(alphabet("a,b").unwrap().len(), 2);
        assert!(alphabet("a,a").is_err());
    }
}
