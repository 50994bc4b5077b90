mod common;

use charp::invariants::invariant_series;
use charp::rank::{rank_of_power_with, PowerStrategy};
use charp::{BracketSpace, FieldSpec, Limits, Monomial, SparsePolynomial};
use common::*;
use proptest::prelude::*;

fn same_ring(
    primes: &[u64],
) -> impl Strategy<Value = (SparsePolynomial, SparsePolynomial, SparsePolynomial)> {
    (prop::sample::select(primes.to_vec()), 1usize..=3).prop_flat_map(|(p, n)| {
        (
            arb_poly(p, n, 5, 4),
            arb_poly(p, n, 5, 4),
            arb_poly(p, n, 5, 4),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn ring_axioms((f, g, h) in same_ring(&[2, 3, 5, 7, 101])) {
        prop_assert_eq!(f.add(&g).unwrap(), g.add(&f).unwrap());
        prop_assert_eq!(f.mul(&g).unwrap(), g.mul(&f).unwrap());
        prop_assert_eq!(f.mul(&g).unwrap().mul(&h).unwrap(), f.mul(&g.mul(&h).unwrap()).unwrap());
        prop_assert_eq!(
            f.mul(&g.add(&h).unwrap()).unwrap(),
            f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap()
        );
        prop_assert!(f.sub(&f).unwrap().is_zero());
        prop_assert!(f.add(&f.neg()).unwrap().is_zero());
    }

    #[test]
    fn product_matches_schoolbook((f, g, _h) in same_ring(&[2, 3, 5, 7, 101])) {
        let p = f.field().p() as u64;
        let expected = from_map(&f, &oracle_mul(&term_map(&f), &term_map(&g), p));
        prop_assert_eq!(f.mul(&g).unwrap(), expected);
    }

    #[test]
    fn frobenius_is_additive((f, g, _h) in same_ring(&[2, 3, 5])) {
        let p = f.field().p() as u64;
        let l = Limits::default();
        let lhs = f.add(&g).unwrap().pow_naive(p, &l).unwrap();
        let rhs = f.pow_naive(p, &l).unwrap().add(&g.pow_naive(p, &l).unwrap()).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        // f^p = f(x^p) since c^p = c in F_p
        let spread = SparsePolynomial::from_terms(
            f.field(),
            f.vars().clone(),
            f.terms().map(|(m, c)| {
                (Monomial::new(m.exponents().iter().map(|a| a * p as u32).collect()), c as i64)
            }),
        );
        prop_assert_eq!(f.pow_naive(p, &l).unwrap(), spread);
    }

    #[test]
    fn translation_round_trip(
        f in arb_ring_poly(5, 4),
        shift in prop::collection::vec(-9i64..9, 3),
    ) {
        let c = &shift[..f.nvars()];
        let back: Vec<i64> = c.iter().map(|x| -x).collect();
        prop_assert_eq!(f.translate(c).unwrap().translate(&back).unwrap(), f.clone());
        // value at the shifted point moves to the origin
        let p = f.field().p() as i64;
        let point: Vec<u32> = c.iter().map(|x| x.rem_euclid(p) as u32).collect();
        prop_assert_eq!(f.translate(c).unwrap().constant_term(), f.evaluate(&point));
    }

    #[test]
    fn operator_rank_bounds_and_units(f in arb_ring_poly(4, 3)) {
        let l = Limits::default();
        let space = BracketSpace::new(f.field(), f.nvars(), 1, &l).unwrap();
        let op = space.mult_operator(&f, &l).unwrap();
        let rank = charp::rank_fp(&op, &l).unwrap();
        prop_assert!(rank <= space.dim());
        prop_assert_eq!(rank == space.dim(), f.constant_term() != 0);
        prop_assert_eq!(rank == 0, space.bracket_reduce(&f).unwrap().is_zero());
        prop_assert_eq!(rank, oracle_operator_rank(&f, space.q() as u32));
    }

    #[test]
    fn power_strategies_agree(f in arb_ring_poly(4, 3), k in 0u64..12) {
        let l = Limits::default();
        let space = BracketSpace::new(f.field(), f.nvars(), 1, &l).unwrap();
        let direct = rank_of_power_with(&f, k, &space, PowerStrategy::Direct, &l).unwrap();
        let iterated = rank_of_power_with(&f, k, &space, PowerStrategy::Iterated, &l).unwrap();
        let auto = rank_of_power_with(&f, k, &space, PowerStrategy::Auto, &l).unwrap();
        prop_assert_eq!(direct, iterated);
        prop_assert_eq!(direct, auto);
    }
}

#[test]
fn a1_colengths_match_dense_oracle() {
    // xy + z^2 over F_5 at e = 1, rebuilt from scratch: f^(q-1) and f on k[x,y,z]/(x^5,y^5,z^5)
    let f = poly("x*y + z^2", &["x", "y", "z"], 5);
    let f4 = from_map(&f, &oracle_pow(&f, 4));
    let colength_ie = oracle_operator_rank(&f4, 5);
    let colength_bracket = 125 - oracle_operator_rank(&f, 5);
    assert_eq!((colength_ie, colength_bracket), (13, 37));
    let report = invariant_series(&f, 1, &Limits::default()).unwrap();
    let row = &report.rows[0];
    assert_eq!(row.colength_ie, colength_ie as u64);
    assert_eq!(row.colength_bracket, colength_bracket as u64);
    assert_eq!(row.s_e.to_string(), "13/25");
    assert_eq!(row.ehk_e.to_string(), "37/25");
}

#[test]
fn a1_closed_form_through_e2() {
    // for xy + z^2 the colengths are (q^2 + 1)/2 and (3q^2 - 1)/2
    let f = poly("x*y + z^2", &["x", "y", "z"], 3);
    let report = invariant_series(&f, 3, &Limits::default()).unwrap();
    for row in &report.rows {
        let q2 = row.q * row.q;
        assert_eq!(row.colength_ie, q2.div_ceil(2), "e={}", row.e);
        assert_eq!(row.colength_bracket, (3 * q2 - 1) / 2, "e={}", row.e);
    }
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let f = poly("x1^2 + x2^3 + x3^4", &["x1", "x2", "x3"], 5);
    let l = Limits {
        dense_threshold: 64,
        ..Limits::default()
    };
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let four = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    let a = one.install(|| invariant_series(&f, 2, &l).unwrap());
    let b = four.install(|| invariant_series(&f, 2, &l).unwrap());
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    let corpus = charp::corpus::Corpus::builtin();
    let r1 = one.install(|| charp::corpus::reproduce_corpus(&corpus, &Limits::default()).unwrap());
    let r2 = four.install(|| charp::corpus::reproduce_corpus(&corpus, &Limits::default()).unwrap());
    assert_eq!(
        serde_json::to_string(&r1).unwrap(),
        serde_json::to_string(&r2).unwrap()
    );
}

#[test]
fn regular_baseline_over_small_fields() {
    let l = Limits::default();
    for p in [2u64, 3, 5] {
        let f = poly("x", &["x", "y"], p);
        let field = FieldSpec::new(p).unwrap();
        let e_max = (1..)
            .take_while(|&e| BracketSpace::feasible(field, 2, e, &l))
            .last()
            .unwrap();
        let report = invariant_series(&f, e_max.min(3), &l).unwrap();
        assert!(report.infeasible.is_empty());
        for row in &report.rows {
            assert_eq!(row.s_e.to_string(), "1/1");
            assert_eq!(row.ehk_e.to_string(), "1/1");
        }
    }
}

#[test]
fn quartic_family_colengths_match_dense_oracle() {
    let l = Limits::default();
    for (text, p) in [
        ("x1^2+x2^4+x3^5+x4^4", 3u64),
        ("x1^2+x2^4+x3^5+x4^4", 5),
        ("x1^2+x2^3+x3^4", 7),
    ] {
        let vars: Vec<String> = names(text.matches('x').count());
        let vars: Vec<&str> = vars.iter().map(String::as_str).collect();
        let f = poly(text, &vars, p);
        let q = p as u32;
        let dim = (p as usize).pow(vars.len() as u32);
        let fq = from_map(&f, &oracle_pow(&f, p - 1));
        let row = charp::invariants::invariant_row(&f, 1, &l).unwrap();
        assert_eq!(
            row.colength_ie as usize,
            oracle_operator_rank(&fq, q),
            "{text} p={p}"
        );
        assert_eq!(
            row.colength_bracket as usize,
            dim - oracle_operator_rank(&f, q),
            "{text} p={p}"
        );
    }
}
