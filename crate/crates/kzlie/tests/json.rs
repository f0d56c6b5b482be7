use kzlie::diagonal::diagonal_series;
use kzlie::json::*;
use kzlie::{Alphabet, Error, NcPoly, TensorPoly, Word, C64, Q};
use proptest::prelude::*;

fn rational_poly() -> impl Strategy<Value = NcPoly<Q>> {
    prop::collection::vec((prop::collection::vec(0u8..3, 0..5), -20i128..20, 1i128..9), 0..8)
        .prop_map(|ts| NcPoly::from_terms(ts.into_iter().map(|(w, p, q)| (Word::from_slice(&w), Q::new(p, q)))))
}

#[test]
fn rational_document_shape() {
    let a = Alphabet::x(2);
    let p = NcPoly::from_terms([(Word::from_slice(&[1, 0]), Q::new(-1, 2)), (Word::new(), Q::from_integer(3))]);
    let s = serde_json::to_string(&poly_to_doc(&a, &p)).unwrap();
    assert_eq!(s, r#"{"domain":"rational","terms":[{"word":[],"coeff":"3"},{"word":["x1","x0"],"coeff":"-1/2"}]}"#);
}

#[test]
fn complex_round_trip() {
    let a = Alphabet::braid(3).unwrap();
    let p = NcPoly::from_terms([(a.parse_word("t12t13").unwrap(), C64::new(0.25, -1.5))]);
    let s = serde_json::to_string(&poly_to_doc(&a, &p)).unwrap();
    let back: NcPoly<C64> = poly_from_doc(&a, &serde_json::from_str(&s).unwrap()).unwrap();
    assert_eq!(back, p);
    // Rational strings are accepted in complex documents, not the reverse.
    let r = poly_to_doc(&a, &NcPoly::from_terms([(a.parse_word("t12").unwrap(), Q::new(1, 4))]));
    let lifted: NcPoly<C64> = poly_from_doc(&a, &r).unwrap();
    assert_eq!(lifted.coeff(&a.parse_word("t12").unwrap()), C64::new(0.25, 0.0));
    let cdoc = poly_to_doc(&a, &p);
    assert!(matches!(poly_from_doc::<Q>(&a, &cdoc), Err(Error::Parse(_))));
}

#[test]
fn malformed_documents_are_rejected() {
    let a = Alphabet::x(2);
    for bad in [
        r#"{"domain":"rational","terms":[],"extra":1}"#,
        r#"{"domain":"real","terms":[]}"#,
        r#"{"domain":"rational","terms":[{"word":["x0"],"coeff":"1/2","w":0}]}"#,
    ] {
        assert!(serde_json::from_str::<PolyDoc>(bad).is_err(), "{bad}");
    }
    let unknown: PolyDoc = serde_json::from_str(r#"{"domain":"rational","terms":[{"word":["x7"],"coeff":"1"}]}"#).unwrap();
    assert!(poly_from_doc::<Q>(&a, &unknown).is_err());
    let badq: PolyDoc = serde_json::from_str(r#"{"domain":"rational","terms":[{"word":["x0"],"coeff":"1/0"}]}"#).unwrap();
    assert!(poly_from_doc::<Q>(&a, &badq).is_err());
}

#[test]
fn tensor_round_trip() {
    let a = Alphabet::x(2);
    let d = diagonal_series(&[0, 1], 3);
    let doc = tensor_to_doc(&a, &d);
    let s = serde_json::to_string(&doc).unwrap();
    let back: TensorPoly<Q> = tensor_from_doc(&a, &serde_json::from_str(&s).unwrap()).unwrap();
    assert_eq!(back, d);
    assert_eq!(serde_json::to_string(&tensor_to_doc(&a, &back)).unwrap(), s);
}

#[test]
fn factor_round_trip() {
    let a = Alphabet::x(2);
    let f = vec![(Word::from_slice(&[1]), Q::new(2, 3)), (Word::from_slice(&[0, 1]), Q::from_integer(-1))];
    let doc = factors_to_doc(&a, &f);
    let s = serde_json::to_string(&doc).unwrap();
    let back: Vec<FactorDoc> = serde_json::from_str(&s).unwrap();
    assert_eq!(factors_from_doc::<Q>(&a, &back).unwrap(), f);
}

proptest! {
    #[test]
    fn rational_round_trip_is_byte_identical(p in rational_poly()) {
        let a = Alphabet::x(3);
        let s = serde_json::to_string(&poly_to_doc(&a, &p)).unwrap();
        let back: NcPoly<Q> = poly_from_doc(&a, &serde_json::from_str(&s).unwrap()).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(serde_json::to_string(&poly_to_doc(&a, &back)).unwrap(), s);
    }

    #[test]
    fn equal_values_serialize_identically(p in rational_poly(), q in rational_poly()) {
        let a = Alphabet::x(3);
        let lhs = serde_json::to_string(&poly_to_doc(&a, &(&p + &q))).unwrap();
        let rhs = serde_json::to_string(&poly_to_doc(&a, &(&q + &p))).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
