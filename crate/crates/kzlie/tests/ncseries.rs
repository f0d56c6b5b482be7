use std::collections::HashMap;

use kzlie::alphabet::{words_up_to, Alphabet};
use kzlie::ncseries::*;
use kzlie::{Coeff, Error, LegProduct, NcPoly, TensorPoly, TruncatedSeries, Word, C64, Q};
use proptest::prelude::*;

fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

fn p(a: &Alphabet, terms: &[(&str, i128)]) -> NcPoly<Q> {
    NcPoly::from_terms(terms.iter().map(|(w, c)| (a.parse_word(w).unwrap(), Q::from_integer(*c))))
}

/// Shuffle from the letter recursion `xu ⧢ yv = x(u ⧢ yv) + y(xu ⧢ v)`.
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

fn bracket(a: &NcPoly<Q>, b: &NcPoly<Q>) -> NcPoly<Q> {
    &(a * b) - &(b * a)
}

fn poly_strategy(letters: u8, max_len: usize, constant: bool) -> impl Strategy<Value = NcPoly<Q>> {
    let min_len = if constant { 0 } else { 1 };
    prop::collection::vec((prop::collection::vec(0..letters, min_len..=max_len), -3i128..=3), 0..5)
        .prop_map(|ts| NcPoly::from_terms(ts.into_iter().map(|(w, c)| (Word::from_vec(w), Q::from_integer(c)))))
}

/// Random Lie polynomial built from nested brackets of letters.
fn lie_strategy(letters: u8, max_len: usize) -> impl Strategy<Value = NcPoly<Q>> {
    prop::collection::vec((prop::collection::vec(0..letters, 1..=max_len), -3i128..=3), 1..4).prop_map(|ts| {
        let mut out = NcPoly::zero();
        for (w, c) in ts {
            let mut acc = NcPoly::letter(*w.last().unwrap());
            for &t in w.iter().rev().skip(1) {
                acc = bracket(&NcPoly::letter(t), &acc);
            }
            out = &out + &acc.scale(&Q::from_integer(c));
        }
        out
    })
}

/// Grouplike test against the recursive shuffle oracle.
fn grouplike_by_oracle(g: &NcPoly<Q>, letters: u8, cap: usize) -> bool {
    let ws: Vec<Word> = words_up_to(&(0..letters).collect::<Vec<_>>(), cap).into_iter().filter(|w| !w.is_empty()).collect();
    g.constant_term() == Q::from_integer(1)
        && ws.iter().all(|u| {
            ws.iter().filter(|v| u.len() + v.len() <= cap).all(|v| {
                let s = shuffle_oracle(&NcPoly::word(u), &NcPoly::word(v));
                s.pairing(g) == g.coeff(u) * g.coeff(v)
            })
        })
}

fn primitive_by_oracle(l: &NcPoly<Q>, letters: u8, cap: usize) -> bool {
    let ws: Vec<Word> = words_up_to(&(0..letters).collect::<Vec<_>>(), cap).into_iter().filter(|w| !w.is_empty()).collect();
    l.constant_term() == Q::from_integer(0)
        && ws.iter().all(|u| {
            ws.iter()
                .filter(|v| u.len() + v.len() <= cap)
                .all(|v| shuffle_oracle(&NcPoly::word(u), &NcPoly::word(v)).pairing(l) == Q::from_integer(0))
        })
}

#[test]
fn product_examples() {
    let a = Alphabet::x(2);
    assert_eq!(p(&a, &[("x0", 1)]).conc_mul(&p(&a, &[("x1", 1)])), p(&a, &[("x0x1", 1)]));
    assert_eq!(p(&a, &[("1", 1), ("x0", 1)]).conc_mul(&p(&a, &[("1", 1), ("x0", -1)])), p(&a, &[("1", 1), ("x0x0", -1)]));
    let s = p(&a, &[("x0", 1), ("x1", 1)]);
    assert_eq!(s.conc_mul(&s), p(&a, &[("x0x0", 1), ("x0x1", 1), ("x1x0", 1), ("x1x1", 1)]));
    assert_eq!(p(&a, &[("x0", 1)]).shuffle_mul(&p(&a, &[("x1", 1)])), p(&a, &[("x0x1", 1), ("x1x0", 1)]));
    assert_eq!(p(&a, &[("x0", 1)]).shuffle_mul(&p(&a, &[("x0", 1)])), p(&a, &[("x0x0", 2)]));
    let got = p(&a, &[("x0x1", 1)]).shuffle_mul(&p(&a, &[("x0", 1)]));
    assert_eq!(got, shuffle_oracle(&p(&a, &[("x0x1", 1)]), &p(&a, &[("x0", 1)])));
    assert_eq!(got, p(&a, &[("x0x0x1", 2), ("x0x1x0", 1)]));
}

#[test]
fn half_shuffle_examples() {
    let b = Alphabet::braid(3).unwrap();
    let got = p(&b, &[("t13t12", 1)]).half_shuffle_mul(&p(&b, &[("t23", 1)]));
    assert_eq!(got, p(&b, &[("t13t12t23", 1), ("t13t23t12", 1)]));
    let a = Alphabet::x(2);
    assert!(NcPoly::<Q>::one().half_shuffle_mul(&p(&a, &[("x0", 1)])).is_zero());
    assert_eq!(p(&a, &[("x0", 1)]).half_shuffle_mul(&p(&a, &[("x1", 1)])), p(&a, &[("x0x1", 1)]));
    assert_eq!(p(&a, &[("x0x1", 1)]).half_shuffle_mul(&NcPoly::one()), p(&a, &[("x0x1", 1)]));
}

#[test]
fn pairing_examples() {
    let a = Alphabet::x(2);
    assert_eq!(p(&a, &[("x0x1", 1), ("x1x0", 2)]).pairing(&p(&a, &[("x0x1", 1)])), q(1, 1));
    assert_eq!(p(&a, &[("x0x1", 1)]).pairing(&NcPoly::zero()), q(0, 1));
    assert_eq!(p(&a, &[("x0x1", 1), ("x1x0", -1)]).pairing(&p(&a, &[("x0x1", 1), ("x1x0", 1)])), q(0, 1));
}

#[test]
fn antipode_examples() {
    let a = Alphabet::x(2);
    assert_eq!(p(&a, &[("x0x1", 1)]).antipode(), p(&a, &[("x1x0", 1)]));
    assert_eq!(p(&a, &[("x0", 1)]).antipode(), p(&a, &[("x0", -1)]));
    assert_eq!(p(&a, &[("x0x1x1", 1)]).antipode(), p(&a, &[("x1x1x0", -1)]));
}

#[test]
fn star_examples() {
    let a = Alphabet::x(2);
    let s = TruncatedSeries::new(p(&a, &[("x0", 1)]), 3).star().unwrap();
    assert_eq!(s.poly, p(&a, &[("1", 1), ("x0", 1), ("x0x0", 1), ("x0x0x0", 1)]));
    assert_eq!(star_trunc(&NcPoly::<Q>::zero(), 4).unwrap(), NcPoly::one());
    let s = star_trunc(&p(&a, &[("x0", 1), ("x1", 1)]), 2).unwrap();
    assert_eq!(s, p(&a, &[("1", 1), ("x0", 1), ("x1", 1), ("x0x0", 1), ("x0x1", 1), ("x1x0", 1), ("x1x1", 1)]));
    assert!(matches!(star_trunc(&p(&a, &[("1", 1)]), 2), Err(Error::Domain(_))));
}

#[test]
fn star_solves_left_equation() {
    // X − 1 = sX at the cap.
    let a = Alphabet::x(2);
    let s = p(&a, &[("x0", 2), ("x0x1", -1), ("x1", 1)]);
    let x = star_trunc(&s, 5).unwrap();
    let lhs = &x - &NcPoly::one();
    assert_eq!(lhs, s.conc_mul_cap(&x, Some(5)));
}

#[test]
fn exp_log_examples() {
    let a = Alphabet::x(2);
    let l = log_trunc(&p(&a, &[("1", 1), ("x0", 1)]), 3).unwrap();
    let expect = NcPoly::from_terms([
        (a.parse_word("x0").unwrap(), q(1, 1)),
        (a.parse_word("x0x0").unwrap(), q(-1, 2)),
        (a.parse_word("x0x0x0").unwrap(), q(1, 3)),
    ]);
    assert_eq!(l, expect);
    let e = exp_trunc(&p(&a, &[("x0", 1), ("x1", 1)]), 2).unwrap();
    let half = q(1, 2);
    let expect = NcPoly::from_terms(
        [("1", q(1, 1)), ("x0", q(1, 1)), ("x1", q(1, 1)), ("x0x0", half), ("x0x1", half), ("x1x0", half), ("x1x1", half)]
            .into_iter()
            .map(|(w, c)| (a.parse_word(w).unwrap(), c)),
    );
    assert_eq!(e, expect);
    let lie = p(&a, &[("x0x1", 1), ("x1x0", -1)]);
    assert_eq!(log_trunc(&exp_trunc(&lie, 4).unwrap(), 4).unwrap(), lie);
    assert!(exp_trunc(&p(&a, &[("1", 1)]), 2).is_err());
    assert!(log_trunc(&p(&a, &[("x0", 1)]), 2).is_err());
}

#[test]
fn inverse_matches_antipode_on_grouplikes() {
    let a = Alphabet::x(2);
    let g = exp_trunc(&p(&a, &[("x0", 1), ("x1", -2)]), 4).unwrap();
    assert_eq!(inverse_trunc(&g, 4).unwrap(), g.antipode().truncate(4));
}

#[test]
fn antipode_is_not_the_inverse_off_grouplikes() {
    let a = Alphabet::x(2);
    let s = p(&a, &[("1", 1), ("x0", 1), ("x0x1", 1)]);
    let prod = s.conc_mul(&s.antipode()).truncate(3);
    assert_ne!(prod, NcPoly::one());
}

#[test]
fn bracketing_examples() {
    let a = Alphabet::x(2);
    assert_eq!(right_bracketing::<Q>(&a.parse_word("x0x1").unwrap()), p(&a, &[("x0x1", 1), ("x1x0", -1)]));
    assert_eq!(right_bracketing::<Q>(&a.parse_word("x0").unwrap()), p(&a, &[("x0", 1)]));
    assert!(right_bracketing::<Q>(&[]).is_zero());
    assert_eq!(
        right_bracketing::<Q>(&a.parse_word("x0x0x1").unwrap()),
        p(&a, &[("x0x0x1", 1), ("x0x1x0", -2), ("x1x0x0", 1)])
    );
    assert_eq!(adjoint_rcheck::<Q>(&a.parse_word("x0").unwrap()), p(&a, &[("x0", 1)]));
    assert_eq!(adjoint_rcheck::<Q>(&a.parse_word("x0x1").unwrap()), p(&a, &[("x0x1", 1), ("x1x0", -1)]));
}

#[test]
fn bar_hat_examples() {
    let a = Alphabet::x(2);
    let (bar, hat) = bar_hat::<Q>(&a.parse_word("x0x1").unwrap());
    assert_eq!(bar, p(&a, &[("x0x1", 1), ("x1x0", 1)]));
    assert_eq!(hat, bar);
    let (bar, hat) = bar_hat::<Q>(&a.parse_word("x0x0").unwrap());
    assert_eq!(bar, p(&a, &[("x0x0", 2)]));
    assert_eq!(hat, p(&a, &[("x0x0", 1)]));
    let (bar, hat) = bar_hat::<Q>(&a.parse_word("x0x0x1").unwrap());
    assert_eq!(bar, p(&a, &[("x0x0x1", 2), ("x0x1x0", 2), ("x1x0x0", 2)]));
    assert_eq!(hat, p(&a, &[("x0x0x1", 1), ("x0x1x0", 1), ("x1x0x0", 1)]));
}

#[test]
fn bar_over_hat_is_product_of_letter_factorials() {
    // v̄ = (∏_t |v|_t!) v̂, which differs from |v|! v̂ once a letter repeats.
    for w in words_up_to(&[0, 1, 2], 5) {
        let (bar, hat) = bar_hat::<Q>(&w);
        let mut scale = 1i128;
        for t in 0..3u8 {
            let k = w.iter().filter(|&&s| s == t).count() as i128;
            scale *= (1..=k).product::<i128>();
        }
        assert_eq!(bar, hat.scale(&Q::from_integer(scale)), "{w:?}");
    }
}

#[test]
fn adjointness_exhaustive() {
    let ws = words_up_to(&[0, 1], 5);
    for v in &ws {
        let rv = right_bracketing::<Q>(v);
        for w in &ws {
            let lhs = rv.coeff(w);
            let rhs = adjoint_rcheck::<Q>(w).coeff(v);
            assert_eq!(lhs, rhs, "v={v:?} w={w:?}");
        }
    }
}

#[test]
fn rcheck_deconcatenation_identity() {
    // |w| w = Σ_{uv=w} ř(u) ⧢ v.
    for w in words_up_to(&[0, 1, 2], 5).into_iter().filter(|w| !w.is_empty()) {
        let mut rhs = NcPoly::<Q>::zero();
        for k in 1..=w.len() {
            rhs = &rhs + &shuffle_oracle(&adjoint_rcheck(&w[..k]), &NcPoly::word(&w[k..]));
        }
        assert_eq!(rhs, NcPoly::monomial(w.clone(), Q::from_integer(w.len() as i128)), "{w:?}");
    }
}

#[test]
fn tensor_examples() {
    let a = Alphabet::x(2);
    let x0 = p(&a, &[("x0", 1)]);
    let x1 = p(&a, &[("x1", 1)]);
    let t0 = TensorPoly::tensor(&x0, &x0);
    let t1 = TensorPoly::tensor(&x1, &x1);
    let got = t0.mul(&t1, LegProduct::Shuffle, LegProduct::Conc, None);
    let expect = TensorPoly::tensor(&p(&a, &[("x0x1", 1), ("x1x0", 1)]), &p(&a, &[("x0x1", 1)]));
    assert_eq!(got, expect);
    assert_eq!(TensorPoly::one().mul(&t0, LegProduct::Conc, LegProduct::Conc, None), t0);
    let sq = t0.mul(&t0, LegProduct::Conc, LegProduct::Conc, None);
    assert_eq!(sq, TensorPoly::tensor(&p(&a, &[("x0x0", 1)]), &p(&a, &[("x0x0", 1)])));
    let hs = t0.mul(&t1, LegProduct::HalfShuffle, LegProduct::Conc, None);
    assert_eq!(hs, TensorPoly::tensor(&p(&a, &[("x0x1", 1)]), &p(&a, &[("x0x1", 1)])));
    assert_eq!(sq.truncate(1), TensorPoly::zero());
}

#[test]
fn tensor_exp_log_round_trip() {
    let a = Alphabet::x(2);
    let x = &TensorPoly::tensor(&p(&a, &[("x0", 1)]), &p(&a, &[("x0", 1)]))
        + &TensorPoly::tensor(&p(&a, &[("x1", 1)]), &p(&a, &[("x1", 1)]));
    let e = x.exp(LegProduct::Shuffle, LegProduct::Conc, 4).unwrap();
    assert_eq!(e.log(LegProduct::Shuffle, LegProduct::Conc, 4).unwrap(), x);
    assert!(e.exp(LegProduct::Shuffle, LegProduct::Conc, 4).is_err());
}

#[test]
fn complex_coefficients_use_tolerance() {
    let a = NcPoly::monomial(Word::from_slice(&[0]), C64::new(1.0, 1e-14));
    let b = NcPoly::monomial(Word::from_slice(&[0]), C64::new(1.0, 0.0));
    assert!(a.approx_eq(&b, 1e-12));
    assert!(!a.approx_eq(&b, 1e-15));
    assert!(C64::new(0.5, 0.0).approx_eq(&C64::from_q(&q(1, 2)), 0.0));
}

#[test]
fn no_stored_zero_coefficients() {
    let a = Alphabet::x(2);
    let x = p(&a, &[("x0", 1), ("x1", 1)]);
    let y = p(&a, &[("x0", 1)]);
    let d = &x - &(&y + &p(&a, &[("x1", 1)]));
    assert!(d.is_zero());
    assert_eq!(d.len(), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn shuffle_matches_recursion(a in poly_strategy(3, 3, true), b in poly_strategy(3, 2, true)) {
        prop_assert_eq!(a.shuffle_mul(&b), shuffle_oracle(&a, &b));
    }

    #[test]
    fn products_are_associative_and_unital(
        a in poly_strategy(2, 2, true), b in poly_strategy(2, 2, true), c in poly_strategy(2, 1, true)
    ) {
        prop_assert_eq!(a.shuffle_mul(&b), b.shuffle_mul(&a));
        prop_assert_eq!(a.shuffle_mul(&b).shuffle_mul(&c), a.shuffle_mul(&b.shuffle_mul(&c)));
        prop_assert_eq!(a.conc_mul(&b).conc_mul(&c), a.conc_mul(&b.conc_mul(&c)));
        prop_assert_eq!(a.shuffle_mul(&NcPoly::one()), a.clone());
        prop_assert_eq!(NcPoly::one().conc_mul(&a), a.clone());
    }

    #[test]
    fn zinbiel_identity(r in poly_strategy(2, 2, false), s in poly_strategy(2, 2, false), t in poly_strategy(2, 1, false)) {
        let lhs = r.half_shuffle_mul(&s).half_shuffle_mul(&t);
        let rhs = &r.half_shuffle_mul(&s.half_shuffle_mul(&t)) + &r.half_shuffle_mul(&t.half_shuffle_mul(&s));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn symmetrization(r in poly_strategy(3, 3, false), s in poly_strategy(3, 2, false)) {
        prop_assert_eq!(&r.half_shuffle_mul(&s) + &s.half_shuffle_mul(&r), shuffle_oracle(&r, &s));
    }

    #[test]
    fn antipode_laws(s in poly_strategy(2, 3, true), r in poly_strategy(2, 2, true)) {
        prop_assert_eq!(s.conc_mul(&r).antipode(), r.antipode().conc_mul(&s.antipode()));
        prop_assert_eq!(s.shuffle_mul(&r).antipode(), s.antipode().shuffle_mul(&r.antipode()));
        prop_assert_eq!(s.antipode().antipode(), s);
    }

    #[test]
    fn antipode_inverts_grouplikes(l in lie_strategy(2, 3), cap in 1usize..=5) {
        let g = exp_trunc(&l, cap).unwrap();
        prop_assert_eq!(g.conc_mul_cap(&g.antipode(), Some(cap)), NcPoly::one());
        prop_assert_eq!(g.antipode().conc_mul_cap(&g, Some(cap)), NcPoly::one());
        prop_assert_eq!(g.antipode(), exp_trunc(&-&l, cap).unwrap());
    }

    #[test]
    fn ree_exp_of_lie_is_grouplike(l in lie_strategy(2, 3)) {
        let g = exp_trunc(&l, 5).unwrap();
        prop_assert!(grouplike_by_oracle(&g, 2, 5));
        prop_assert!(primitive_by_oracle(&l, 2, 5));
    }

    #[test]
    fn ree_log_of_grouplike_is_primitive(l in lie_strategy(2, 3), m in lie_strategy(2, 2)) {
        // A product of grouplikes is grouplike; its log must be Lie.
        let g = exp_trunc(&l, 5).unwrap().conc_mul_cap(&exp_trunc(&m, 5).unwrap(), Some(5));
        let lg = log_trunc(&g, 5).unwrap();
        prop_assert!(primitive_by_oracle(&lg, 2, 5));
    }

    #[test]
    fn adjointness_random(v in prop::collection::vec(0u8..3, 1..=5), w in prop::collection::vec(0u8..3, 1..=5)) {
        prop_assert_eq!(right_bracketing::<Q>(&v).coeff(&w), adjoint_rcheck::<Q>(&w).coeff(&v));
    }

    #[test]
    fn exp_log_inverse(l in poly_strategy(2, 3, false), cap in 1usize..=6) {
        let l = l.truncate(cap);
        prop_assert_eq!(log_trunc(&exp_trunc(&l, cap).unwrap(), cap).unwrap(), l.clone());
        let g = &NcPoly::one() + &l;
        prop_assert_eq!(exp_trunc(&log_trunc(&g, cap).unwrap(), cap).unwrap(), g);
    }
}
