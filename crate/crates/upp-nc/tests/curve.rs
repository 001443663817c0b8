use std::cmp::Ordering;

use upp_nc::curve::{Element, Point, Segment, Sequence};
use upp_nc::ncops::{delay_element, rate_latency, stair};
use upp_nc::numeric::{compare, int, parse_rational, rat, Finite, MinusInfinity, PlusInfinity};
use upp_nc::{Curve, Error, Rational};

fn v(x: Rational) -> upp_nc::ExtendedValue {
    Finite(x)
}

#[test]
fn rationals_are_stored_in_lowest_terms() {
    assert_eq!(rat(2, 6), rat(1, 3));
    assert_eq!(rat(-4, -8), rat(1, 2));
    assert_eq!(compare(&v(rat(1, 3)), &v(rat(2, 6))), Ordering::Equal);
    assert_eq!(compare(&MinusInfinity, &v(int(-1_000_000_000))), Ordering::Less);
    assert_eq!(compare(&PlusInfinity, &v(int(1_000_000_000))), Ordering::Greater);
    assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
    assert!(matches!(parse_rational("1/0"), Err(Error::Parse(_))));
    assert!(PlusInfinity.add(&MinusInfinity).is_err());
    assert_eq!(PlusInfinity.add(&v(int(3))).unwrap(), PlusInfinity);
}

#[test]
fn evaluation_follows_the_periodic_extension() {
    let beta = rate_latency(int(2), int(1)).unwrap();
    assert_eq!(beta.value_at(&int(1)).unwrap(), v(int(0)));
    assert_eq!(beta.value_at(&int(3)).unwrap(), v(int(4)));

    let identity = Curve::new(
        Sequence::new(vec![Point::new(int(0), int(0)).into(), Segment::new(int(0), int(1), int(0), int(1)).into()]).unwrap(),
        int(0),
        int(1),
        int(1),
    )
    .unwrap();
    assert_eq!(identity.value_at(&rat(7, 2)).unwrap(), v(rat(7, 2)));

    let ceil = stair(int(1), int(1)).unwrap();
    assert_eq!(ceil.left_limit_at(&int(2)).unwrap(), v(int(2)));
    assert_eq!(ceil.value_at(&int(2)).unwrap(), v(int(2)));
    assert_eq!(ceil.right_limit_at(&int(2)).unwrap(), v(int(3)));
    assert!(matches!(ceil.value_at(&int(-1)), Err(Error::Domain(_))));

    let nu = stair(int(1), int(5)).unwrap();
    let got: Vec<_> = [0, 1, 5, 6].iter().map(|t| nu.value_at(&int(*t)).unwrap()).collect();
    assert_eq!(got, vec![v(int(0)), v(int(1)), v(int(1)), v(int(2))]);
}

#[test]
fn cut_materializes_repetitions() {
    let ceil = stair(int(1), int(1)).unwrap();
    let s = ceil.cut(&int(0), &int(3), false).unwrap();
    assert_eq!(s.len(), 6);
    for (k, pair) in s.elements().chunks(2).enumerate() {
        let k = k as i64;
        assert_eq!(pair[0], Element::Point(Point::new(int(k), int(k))));
        assert_eq!(pair[1], Element::Segment(Segment::constant(int(k), int(k + 1), int(k + 1))));
    }

    let base = ceil.cut(&int(0), &(ceil.pseudo_period_start() + ceil.pseudo_period_length()), false).unwrap();
    assert_eq!(&base, ceil.sequence());

    let line = rate_latency(int(1), int(0)).unwrap();
    let s = line.cut(&int(2), &int(5), true).unwrap();
    assert!(s.end_included());
    // The cut keeps a point at every period seam; merging removes them.
    assert_eq!(
        s.canonical().elements(),
        &[Point::new(int(2), int(2)).into(), Segment::new(int(2), int(5), int(2), int(5)).into(), Point::new(int(5), int(5)).into()]
    );
}

#[test]
fn classification_examples() {
    let beta = rate_latency(int(3), int(2)).unwrap().classify();
    let ua = beta.ua.expect("rate-latency is ultimately affine");
    assert_eq!((ua.affine_start, ua.slope), (int(2), int(3)));
    assert!(!beta.is_uc && !beta.is_wui);

    let delay = delay_element(int(3)).unwrap();
    assert!(delay.classify().is_wui);
    assert_eq!(delay.value_at(&int(3)).unwrap(), v(int(0)));
    assert_eq!(delay.right_limit_at(&int(3)).unwrap(), PlusInfinity);

    // The ceiling jumps right after each integer, so it is left-continuous.
    let ceil = stair(int(1), int(1)).unwrap().classify();
    assert!(ceil.is_non_decreasing && ceil.is_left_continuous && !ceil.is_right_continuous);
    assert!(ceil.ua.is_none());
}

#[test]
fn minimize_merges_collinear_pieces() {
    let split = Sequence::new(vec![
        Point::new(int(0), int(0)).into(),
        Segment::new(int(0), int(1), int(0), int(2)).into(),
        Point::new(int(1), int(2)).into(),
        Segment::new(int(1), int(2), int(2), int(4)).into(),
    ])
    .unwrap();
    let f = Curve::new(split, int(0), int(2), int(4)).unwrap();
    let m = f.minimize();
    assert_eq!(m.sequence().len(), 2);
    assert!(m.equivalent(&f));
    assert_eq!(m.minimize(), m);

    let ceil = stair(int(1), int(1)).unwrap();
    assert_eq!(ceil.minimize(), ceil);
}

#[test]
fn minimize_lowers_an_inflated_period_start() {
    let ceil = stair(int(1), int(1)).unwrap();
    let inflated = Curve::new(ceil.cut(&int(0), &int(4), false).unwrap(), int(3), int(1), int(1)).unwrap();
    let m = inflated.minimize();
    assert_eq!(m.pseudo_period_start(), &int(0));
    assert!(m.equivalent(&ceil));
}

#[test]
fn equivalence_ignores_the_encoding() {
    let line = rate_latency(int(1), int(0)).unwrap();
    let ceil = stair(int(1), int(1)).unwrap();
    assert!(!line.equivalent(&ceil));

    let doubled = Curve::new(ceil.cut(&int(0), &int(2), false).unwrap(), int(0), int(2), int(2)).unwrap();
    assert!(doubled.equivalent(&ceil));
    assert!(ceil.equivalent(&ceil.minimize()));
}

#[test]
fn malformed_sequences_are_rejected() {
    let gap = Sequence::new(vec![Point::new(int(0), int(0)).into(), Segment::new(int(1), int(2), int(0), int(1)).into()]);
    assert!(matches!(gap, Err(Error::Invariant(_))));
    let seq = Sequence::new(vec![Point::new(int(0), int(0)).into(), Segment::new(int(0), int(1), int(0), int(1)).into()]).unwrap();
    assert!(Curve::new(seq.clone(), int(0), int(0), int(1)).is_err());
    assert!(Curve::new(seq, int(0), int(2), int(1)).is_err());
}
