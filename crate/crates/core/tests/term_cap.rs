//! The term cap is process-wide, so it gets a test binary of its own.

use cremona::automorphism::PolyMap;
use cremona::parse::parse_poly;
use cremona::poly::{max_terms, set_max_terms};
use cremona::Error;

#[test]
fn cap_stops_blowup_and_can_be_lifted() {
    let sigma = PolyMap::parse("x1 -> x1 + x2 + x3 + 1", 3).unwrap();
    let f = parse_poly("x1^30", 3).unwrap();

    set_max_terms(100);
    assert_eq!(max_terms(), 100);
    assert!(matches!(
        sigma.apply(&f),
        Err(Error::TermLimit { limit: 100, .. })
    ));
    assert!(f.pow(1000).is_ok());
    let g = parse_poly("x1 + x2 + x3", 3).unwrap();
    assert!(matches!(g.pow(20), Err(Error::TermLimit { .. })));

    set_max_terms(usize::MAX);
    assert_eq!(sigma.apply(&f).unwrap().num_terms(), 5456);
}
