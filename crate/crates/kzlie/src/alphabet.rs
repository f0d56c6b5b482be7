//! Letters, ordered alphabets and words, together with Lyndon-word
//! enumeration, Lyndon factorization and standard factorization.
//!
//! A [`Word`] stores letter indices into an [`Alphabet`]. Indices are
//! assigned in increasing `≺` order, so comparing index sequences
//! lexicographically is the alphabet-induced lexicographic order on words.
//!
//! For the braid alphabet `𝒯_n = {t_{i,j}}` the order is
//! `T_2 ≻ T_3 ≻ … ≻ T_n` and, inside `T_k`, `t_{1,k} ≻ … ≻ t_{k−1,k}`.
//! Hence `T_n` occupies the lowest indices and `𝒯_{n−1}` the rest.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{domain, Error, Result};

/// Finite sequence of letter indices; the empty word is the monoid unit.
pub type Word = SmallVec<[u8; 16]>;

/// Default cap on the number of Lyndon words an enumeration may produce.
pub const DEFAULT_LYNDON_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Letter {
    /// `t_{i,j}` with `i < j`.
    Braid { i: u32, j: u32 },
    /// Free symbol; `rank` fixes its position in the order.
    Free { name: String, rank: u32 },
}

impl Letter {
    /// Braid letter, normalizing `t_{j,i}` to `t_{i,j}`.
    pub fn braid(i: u32, j: u32) -> Result<Letter> {
        if i == 0 || j == 0 || i == j {
            return domain(format!("invalid braid letter indices ({i},{j})"));
        }
        Ok(Letter::Braid { i: i.min(j), j: i.max(j) })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlphabetKind {
    Braid { n: u32 },
    Free,
}

/// Ordered alphabet; `letters[k]` has index `k` and `letters` is increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    kind: AlphabetKind,
    letters: Vec<Letter>,
}

impl Alphabet {
    /// The braid alphabet `𝒯_n`, `n ≥ 2`.
    pub fn braid(n: u32) -> Result<Alphabet> {
        if n < 2 {
            return domain(format!("braid alphabet needs n >= 2, got {n}"));
        }
        if n > 23 {
            return Err(Error::Resource(format!("braid alphabet with n={n} exceeds 253 letters")));
        }
        let mut letters = Vec::new();
        for k in (2..=n).rev() {
            for i in (1..k).rev() {
                letters.push(Letter::Braid { i, j: k });
            }
        }
        Ok(Alphabet { kind: AlphabetKind::Braid { n }, letters })
    }

    /// Free alphabet whose order is the order of `names`.
    pub fn free<S: AsRef<str>>(names: &[S]) -> Result<Alphabet> {
        if names.len() > 255 {
            return Err(Error::Resource("free alphabet exceeds 255 letters".into()));
        }
        let mut letters = Vec::with_capacity(names.len());
        for (rank, name) in names.iter().enumerate() {
            let name = name.as_ref().trim();
            if name.is_empty() {
                return domain("empty letter name");
            }
            let letter = Letter::Free { name: name.to_string(), rank: rank as u32 };
            if letters.iter().any(|l: &Letter| matches!(l, Letter::Free { name: m, .. } if m == name)) {
                return domain(format!("duplicate letter {name}"));
            }
            letters.push(letter);
        }
        Ok(Alphabet { kind: AlphabetKind::Free, letters })
    }

    /// `{x0, x1, …, x_{k−1}}` with `x0 ≺ x1 ≺ …`.
    pub fn x(k: usize) -> Alphabet {
        let names: Vec<String> = (0..k).map(|i| format!("x{i}")).collect();
        Alphabet::free(&names).expect("valid names")
    }

    pub fn kind(&self) -> &AlphabetKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// All letter indices, increasing.
    pub fn indices(&self) -> Vec<u8> {
        (0..self.letters.len() as u8).collect()
    }

    pub fn letter(&self, idx: u8) -> &Letter {
        &self.letters[idx as usize]
    }

    pub fn index_of(&self, letter: &Letter) -> Option<u8> {
        self.letters.iter().position(|l| l == letter).map(|p| p as u8)
    }

    /// Index of `t_{i,j}` (either index order accepted).
    pub fn braid_index(&self, i: u32, j: u32) -> Result<u8> {
        let letter = Letter::braid(i, j)?;
        self.index_of(&letter)
            .ok_or_else(|| Error::Domain(format!("letter t_{i},{j} not in alphabet")))
    }

    pub fn compare_letters(&self, a: &Letter, b: &Letter) -> Result<Ordering> {
        let ia = self.index_of(a).ok_or_else(|| Error::Domain(format!("{a:?} not in alphabet")))?;
        let ib = self.index_of(b).ok_or_else(|| Error::Domain(format!("{b:?} not in alphabet")))?;
        Ok(ia.cmp(&ib))
    }

    /// Split `𝒯_n = T_n ⊔ 𝒯_{n−1}` as index lists `(T_n, 𝒯_{n−1})`.
    pub fn braid_split(&self) -> Option<(Vec<u8>, Vec<u8>)> {
        match self.kind {
            AlphabetKind::Braid { n } => {
                let t = (n - 1) as u8;
                Some(((0..t).collect(), (t..self.letters.len() as u8).collect()))
            }
            AlphabetKind::Free => None,
        }
    }

    pub fn name(&self, idx: u8) -> String {
        match &self.letters[idx as usize] {
            Letter::Free { name, .. } => name.clone(),
            Letter::Braid { i, j } => match self.kind {
                AlphabetKind::Braid { n } if n >= 10 => format!("t_{i}_{j}"),
                _ => format!("t{i}{j}"),
            },
        }
    }

    pub fn parse_letter(&self, s: &str) -> Result<u8> {
        let s = s.trim();
        if let AlphabetKind::Braid { .. } = self.kind {
            if let Some((i, j)) = parse_braid_name(s) {
                return self.braid_index(i, j);
            }
        }
        (0..self.letters.len() as u8)
            .find(|&k| self.name(k) == s)
            .ok_or_else(|| Error::Parse(format!("unknown letter {s:?}")))
    }

    pub fn word_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Word> {
        names.iter().map(|s| self.parse_letter(s.as_ref())).collect()
    }

    /// Parse a concatenated word such as `x0x1x1` or `t12t13`.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Word::new());
        }
        if s.contains(',') || s.contains(' ') {
            let parts: Vec<&str> = s.split([',', ' ']).filter(|p| !p.is_empty()).collect();
            return self.word_from_names(&parts);
        }
        let mut names: Vec<(u8, String)> = (0..self.letters.len() as u8).map(|k| (k, self.name(k))).collect();
        names.sort_by_key(|(_, n)| std::cmp::Reverse(n.len()));
        let mut rest = s;
        let mut w = Word::new();
        'outer: while !rest.is_empty() {
            for (k, n) in &names {
                if let Some(r) = rest.strip_prefix(n.as_str()) {
                    w.push(*k);
                    rest = r;
                    continue 'outer;
                }
            }
            if let AlphabetKind::Braid { .. } = self.kind {
                if rest.len() >= 3 && rest.starts_with('t') {
                    if let Some((i, j)) = parse_braid_name(&rest[..3]) {
                        w.push(self.braid_index(i, j)?);
                        rest = &rest[3..];
                        continue;
                    }
                }
            }
            return Err(Error::Parse(format!("cannot parse word {s:?} at {rest:?}")));
        }
        Ok(w)
    }

    pub fn word_names(&self, w: &[u8]) -> Vec<String> {
        w.iter().map(|&k| self.name(k)).collect()
    }

    pub fn display_word(&self, w: &[u8]) -> String {
        if w.is_empty() {
            "1".into()
        } else {
            self.word_names(w).concat()
        }
    }
}

fn parse_braid_name(s: &str) -> Option<(u32, u32)> {
    let body = s.strip_prefix('t')?;
    if let Some(rest) = body.strip_prefix('_') {
        let mut it = rest.split('_');
        let i = it.next()?.parse().ok()?;
        let j = it.next()?.parse().ok()?;
        if it.next().is_some() {
            return None;
        }
        return Some((i, j));
    }
    let b = body.as_bytes();
    if b.len() == 2 && b[0].is_ascii_digit() && b[1].is_ascii_digit() {
        return Some(((b[0] - b'0') as u32, (b[1] - b'0') as u32));
    }
    None
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.letters.len() as u8).map(|k| self.name(k)).collect();
        write!(f, "{{{}}}", names.join(" ≺ "))
    }
}

/// True iff `w` is strictly smaller than each of its proper rotations.
pub fn is_lyndon(w: &[u8]) -> Result<bool> {
    if w.is_empty() {
        return domain("is_lyndon: empty word");
    }
    Ok(lyndon_factorization(w).len() == 1)
}

/// Nonincreasing factorization `w = l1 … lk`, `l1 ⪰ … ⪰ lk` (Duval).
pub fn lyndon_factorization(w: &[u8]) -> Vec<Word> {
    let n = w.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        let mut k = i;
        while j < n && w[k] <= w[j] {
            if w[k] < w[j] {
                k = i;
            } else {
                k += 1;
            }
            j += 1;
        }
        while i <= k {
            out.push(Word::from_slice(&w[i..i + j - k]));
            i += j - k;
        }
    }
    out
}

/// `(l1, l2)` with `l2` the longest proper Lyndon right factor of `l`.
pub fn standard_factorization(l: &[u8]) -> Result<(Word, Word)> {
    if l.len() < 2 {
        return domain("standard factorization needs a Lyndon word of length >= 2");
    }
    if !is_lyndon(l)? {
        return domain("standard factorization of a non-Lyndon word");
    }
    for i in 1..l.len() {
        if is_lyndon(&l[i..])? {
            return Ok((Word::from_slice(&l[..i]), Word::from_slice(&l[i..])));
        }
    }
    unreachable!("the last letter is always Lyndon")
}

/// Number of Lyndon words of length `d` over `k` letters.
pub fn witt_count(k: u64, d: u32) -> u64 {
    let mut total: i128 = 0;
    for e in 1..=d {
        if d.is_multiple_of(e) {
            total += mobius(e) as i128 * (k as i128).pow(d / e);
        }
    }
    (total / d as i128) as u64
}

fn mobius(mut n: u32) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// All Lyndon words over `letters` (increasing indices) of length `≤ max_len`,
/// in increasing lexicographic order.
pub fn enumerate_lyndon_over(letters: &[u8], max_len: usize, cap: u64) -> Result<Vec<Word>> {
    if max_len == 0 {
        return domain("enumerate_lyndon: max_len must be >= 1");
    }
    let k = letters.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut count: u64 = 0;
    for d in 1..=max_len as u32 {
        count = count.saturating_add(witt_count(k as u64, d));
        if count > cap {
            return Err(Error::Resource(format!(
                "Lyndon enumeration over {k} letters up to length {max_len} exceeds cap {cap}"
            )));
        }
    }
    let mut out = Vec::with_capacity(count as usize);
    let top = k - 1;
    let mut w: Vec<usize> = vec![0];
    loop {
        out.push(w.iter().map(|&p| letters[p]).collect());
        let m = w.len();
        while w.len() < max_len {
            let c = w[w.len() - m];
            w.push(c);
        }
        while w.last() == Some(&top) {
            w.pop();
        }
        match w.last_mut() {
            None => break,
            Some(last) => *last += 1,
        }
    }
    Ok(out)
}

/// All Lyndon words of the alphabet with length `≤ max_len`.
pub fn enumerate_lyndon(alpha: &Alphabet, max_len: usize) -> Result<Vec<Word>> {
    enumerate_lyndon_over(&alpha.indices(), max_len, DEFAULT_LYNDON_CAP)
}

/// All words over `letters` of length exactly `len`, in lexicographic order.
pub fn words_of_length(letters: &[u8], len: usize) -> Vec<Word> {
    let mut out = vec![Word::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * letters.len());
        for w in &out {
            for &t in letters {
                let mut v = w.clone();
                v.push(t);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// All words over `letters` of length `≤ max_len`, by length then lexicographically.
pub fn words_up_to(letters: &[u8], max_len: usize) -> Vec<Word> {
    (0..=max_len).flat_map(|d| words_of_length(letters, d)).collect()
}

/// Number of words of length `≤ max_len` over `k` letters, saturating.
pub fn word_count(k: usize, max_len: usize) -> u64 {
    let mut total: u64 = 0;
    let mut p: u64 = 1;
    for _ in 0..=max_len {
        total = total.saturating_add(p);
        p = p.saturating_mul(k as u64);
    }
    total
}

/// Canonical order for serialization: by length, then lexicographically.
pub fn canonical_cmp(a: &[u8], b: &[u8]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}
