#![allow(dead_code)]

use std::collections::HashMap;

use charp::poly::var_names;
use charp::{parse_poly, FieldSpec, Monomial, SparsePolynomial};
use proptest::prelude::*;

pub fn poly(text: &str, vars: &[&str], p: u64) -> SparsePolynomial {
    parse_poly(text, &var_names(vars), FieldSpec::new(p).unwrap()).unwrap()
}

pub fn names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Random polynomial with at most `max_terms` terms and exponents `<= max_exp`.
pub fn arb_poly(
    p: u64,
    n: usize,
    max_terms: usize,
    max_exp: u32,
) -> impl Strategy<Value = SparsePolynomial> {
    prop::collection::vec(
        (prop::collection::vec(0..=max_exp, n), -20i64..20),
        0..=max_terms,
    )
    .prop_map(move |terms| {
        let field = FieldSpec::new(p).unwrap();
        SparsePolynomial::from_terms(
            field,
            var_names(&names(n)),
            terms.into_iter().map(|(e, c)| (Monomial::new(e), c)),
        )
    })
}

/// Small prime and variable count, then a polynomial in that ring.
pub fn arb_ring_poly(max_terms: usize, max_exp: u32) -> impl Strategy<Value = SparsePolynomial> {
    (prop::sample::select(vec![2u64, 3, 5, 7]), 1usize..=3)
        .prop_flat_map(move |(p, n)| arb_poly(p, n, max_terms, max_exp))
}

/// Terms of `f` as a map from exponent vectors to residues.
pub fn term_map(f: &SparsePolynomial) -> HashMap<Vec<u32>, u64> {
    f.terms()
        .map(|(m, c)| (m.exponents().to_vec(), c as u64))
        .collect()
}

/// Schoolbook product, independent of the library's multiplication.
pub fn oracle_mul(
    a: &HashMap<Vec<u32>, u64>,
    b: &HashMap<Vec<u32>, u64>,
    p: u64,
) -> HashMap<Vec<u32>, u64> {
    let mut out: HashMap<Vec<u32>, u64> = HashMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let slot = out.entry(e).or_insert(0);
            *slot = (*slot + ca * cb) % p;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Row reduction over F_p on a dense copy.
pub fn oracle_rank(rows: usize, cols: usize, entries: &[(usize, usize, u64)], p: u64) -> usize {
    let mut a = vec![vec![0u64; cols]; rows];
    for &(r, c, v) in entries {
        a[r][c] = (a[r][c] + v) % p;
    }
    let inv = |x: u64| {
        let mut r = 1u64;
        let mut b = x % p;
        let mut k = p - 2;
        while k > 0 {
            if k & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            k >>= 1;
        }
        r
    };
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let s = inv(a[rank][c]);
        for x in a[rank].iter_mut() {
            *x = *x * s % p;
        }
        let pivot = a[rank].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != rank && row[c] != 0 {
                let m = row[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + p - m * y % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of multiplication by `g` on k[x]/(x_i^q), built from scratch.
pub fn oracle_operator_rank(g: &SparsePolynomial, q: u32) -> usize {
    let n = g.nvars();
    let p = g.field().p() as u64;
    let dim = (q as usize).pow(n as u32);
    let index = |e: &[u32]| {
        e.iter()
            .rev()
            .fold(0usize, |acc, &a| acc * q as usize + a as usize)
    };
    let gm = term_map(g);
    let mut entries = Vec::new();
    for col in 0..dim {
        let mut e = vec![0u32; n];
        let mut rest = col;
        for slot in e.iter_mut() {
            *slot = (rest % q as usize) as u32;
            rest /= q as usize;
        }
        let basis: HashMap<Vec<u32>, u64> = [(e, 1)].into_iter().collect();
        for (m, c) in oracle_mul(&gm, &basis, p) {
            if m.iter().all(|&a| a < q) {
                entries.push((index(&m), col, c));
            }
        }
    }
    oracle_rank(dim, dim, &entries, p)
}

/// `g^k` by repeated schoolbook multiplication.
pub fn oracle_pow(g: &SparsePolynomial, k: u64) -> HashMap<Vec<u32>, u64> {
    let p = g.field().p() as u64;
    let base = term_map(g);
    let mut acc: HashMap<Vec<u32>, u64> = [(vec![0; g.nvars()], 1)].into_iter().collect();
    for _ in 0..k {
        acc = oracle_mul(&acc, &base, p);
    }
    acc
}

pub fn from_map(g: &SparsePolynomial, m: &HashMap<Vec<u32>, u64>) -> SparsePolynomial {
    SparsePolynomial::from_terms(
        g.field(),
        g.vars().clone(),
        m.iter().map(|(e, &c)| (Monomial::new(e.clone()), c as i64)),
    )
}
