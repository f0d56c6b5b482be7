//! JSON documents for polynomials, tensors and MRS factorizations.
//!
//! Words are arrays of letter names. Rational coefficients are `"p/q"` strings,
//! complex ones `[re, im]`. Terms are emitted in canonical word order so that
//! serialization of equal values is byte-identical.

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Word};
use crate::coeff::{q_from_str, q_to_string, Coeff, C64, Q};
use crate::error::{Error, Result};
use crate::ncseries::{NcPoly, TensorPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Rational,
    Complex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffDoc {
    Rational(String),
    Complex([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub word: Vec<String>,
    pub coeff: CoeffDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyDoc {
    pub domain: Domain,
    pub terms: Vec<TermDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorTermDoc {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorDoc {
    pub terms: Vec<TensorTermDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDoc {
    pub lyndon: Vec<String>,
    pub exponent: CoeffDoc,
}

/// Coefficient domains with a JSON encoding.
pub trait JsonCoeff: Coeff {
    const DOMAIN: Domain;
    fn to_doc(&self) -> CoeffDoc;
    fn from_doc(d: &CoeffDoc) -> Result<Self>;
}

impl JsonCoeff for Q {
    const DOMAIN: Domain = Domain::Rational;
    fn to_doc(&self) -> CoeffDoc {
        CoeffDoc::Rational(q_to_string(self))
    }
    fn from_doc(d: &CoeffDoc) -> Result<Self> {
        match d {
            CoeffDoc::Rational(s) => parse_q(s),
            CoeffDoc::Complex(_) => Err(Error::Parse("complex coefficient in a rational document".into())),
        }
    }
}

impl JsonCoeff for C64 {
    const DOMAIN: Domain = Domain::Complex;
    fn to_doc(&self) -> CoeffDoc {
        CoeffDoc::Complex([self.re, self.im])
    }
    fn from_doc(d: &CoeffDoc) -> Result<Self> {
        match d {
            CoeffDoc::Complex([re, im]) => Ok(C64::new(*re, *im)),
            CoeffDoc::Rational(s) => Ok(C64::from_q(&parse_q(s)?)),
        }
    }
}

fn parse_q(s: &str) -> Result<Q> {
    q_from_str(s).ok_or_else(|| Error::Parse(format!("bad rational {s:?}")))
}

fn names(alpha: &Alphabet, w: &[u8]) -> Vec<String> {
    alpha.word_names(w)
}

fn word(alpha: &Alphabet, names: &[String]) -> Result<Word> {
    alpha.word_from_names(names)
}

pub fn poly_to_doc<C: JsonCoeff>(alpha: &Alphabet, p: &NcPoly<C>) -> PolyDoc {
    PolyDoc {
        domain: C::DOMAIN,
        terms: p.sorted_terms().into_iter().map(|(w, c)| TermDoc { word: names(alpha, &w), coeff: c.to_doc() }).collect(),
    }
}

pub fn poly_from_doc<C: JsonCoeff>(alpha: &Alphabet, d: &PolyDoc) -> Result<NcPoly<C>> {
    if C::DOMAIN == Domain::Rational && d.domain != Domain::Rational {
        return Err(Error::Parse("expected a rational polynomial".into()));
    }
    let mut p = NcPoly::zero();
    for t in &d.terms {
        p.add_term(word(alpha, &t.word)?, C::from_doc(&t.coeff)?);
    }
    Ok(p)
}

pub fn tensor_to_doc(alpha: &Alphabet, t: &TensorPoly<Q>) -> TensorDoc {
    TensorDoc {
        terms: t
            .sorted_terms()
            .into_iter()
            .map(|(u, v, c)| TensorTermDoc { left: names(alpha, &u), right: names(alpha, &v), coeff: q_to_string(&c) })
            .collect(),
    }
}

pub fn tensor_from_doc(alpha: &Alphabet, d: &TensorDoc) -> Result<TensorPoly<Q>> {
    let mut t = TensorPoly::zero();
    for term in &d.terms {
        t.add_term(word(alpha, &term.left)?, word(alpha, &term.right)?, parse_q(&term.coeff)?);
    }
    Ok(t)
}

/// Factorization in the given (decreasing Lyndon) order.
pub fn factors_to_doc<C: JsonCoeff>(alpha: &Alphabet, f: &[(Word, C)]) -> Vec<FactorDoc> {
    f.iter().map(|(l, c)| FactorDoc { lyndon: names(alpha, l), exponent: c.to_doc() }).collect()
}

pub fn factors_from_doc<C: JsonCoeff>(alpha: &Alphabet, d: &[FactorDoc]) -> Result<Vec<(Word, C)>> {
    d.iter().map(|f| Ok((word(alpha, &f.lyndon)?, C::from_doc(&f.exponent)?))).collect()
}
