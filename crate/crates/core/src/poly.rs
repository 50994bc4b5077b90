//! Sparse multivariate polynomials over F_p.
//!
//! A polynomial is a map from exponent tuples to nonzero residues. Terms are
//! kept in a `BTreeMap`, so iteration follows lexicographic order on the
//! exponent tuple (first variable most significant, last variable fastest) and
//! every rendering is deterministic.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::field::FieldSpec;

/// Exponent vector of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents.into_boxed_slice())
    }

    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n].into_boxed_slice())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&a| a as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Product of monomials; fails if an exponent overflows `u32`.
    pub fn checked_mul(&self, other: &Monomial) -> Result<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            out.push(
                a.checked_add(*b)
                    .ok_or_else(|| Error::cap("monomial exponent", u32::MAX as u64))?,
            );
        }
        Ok(Monomial::new(out))
    }

    /// Product of monomials, or `None` when some exponent reaches `bound`.
    fn mul_below(&self, other: &Monomial, bound: u64) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            let s = *a as u64 + *b as u64;
            if s >= bound {
                return None;
            }
            out.push(s as u32);
        }
        Some(Monomial::new(out))
    }

    /// True if every exponent is strictly below `bound`.
    pub fn below(&self, bound: u64) -> bool {
        self.0.iter().all(|&a| (a as u64) < bound)
    }
}

/// An exact polynomial in `n` variables over a prime field.
#[derive(Debug, Clone)]
pub struct SparsePolynomial {
    field: FieldSpec,
    vars: Arc<[String]>,
    terms: BTreeMap<Monomial, u32>,
}

impl PartialEq for SparsePolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.vars.len() == other.vars.len()
            && self.terms == other.terms
    }
}

impl Eq for SparsePolynomial {}

impl SparsePolynomial {
    pub fn zero(field: FieldSpec, vars: Arc<[String]>) -> Self {
        SparsePolynomial {
            field,
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: FieldSpec, vars: Arc<[String]>, c: i64) -> Self {
        let n = vars.len();
        Self::from_terms(field, vars, [(Monomial::one(n), c)])
    }

    /// The `i`-th variable (0-based).
    pub fn variable(field: FieldSpec, vars: Arc<[String]>, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::from_terms(field, vars, [(Monomial::new(e), 1)])
    }

    /// Builds a canonical polynomial, summing repeated monomials and dropping zeros.
    pub fn from_terms<I>(field: FieldSpec, vars: Arc<[String]>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, i64)>,
    {
        let mut map: BTreeMap<Monomial, u32> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.nvars(), vars.len(), "monomial arity does not match ring");
            let c = field.from_i64(c);
            let slot = map.entry(m).or_insert(0);
            *slot = field.add(*slot, c);
        }
        map.retain(|_, c| *c != 0);
        SparsePolynomial {
            field,
            vars,
            terms: map,
        }
    }

    pub(crate) fn from_map(
        field: FieldSpec,
        vars: Arc<[String]>,
        terms: BTreeMap<Monomial, u32>,
    ) -> Self {
        debug_assert!(terms.values().all(|&c| c != 0 && c < field.p()));
        SparsePolynomial { field, vars, terms }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    /// Same polynomial with different display names for the variables.
    pub fn with_vars(&self, vars: Arc<[String]>) -> Self {
        assert_eq!(vars.len(), self.vars.len());
        SparsePolynomial {
            field: self.field,
            vars,
            terms: self.terms.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending lexicographic order of exponent tuples.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, u32)> + '_ {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn coefficient(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> u32 {
        self.coefficient(&Monomial::one(self.nvars()))
    }

    /// Minimal total degree of a term (the order of vanishing at the origin).
    pub fn order(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::total_degree).min()
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    fn check_same_ring(&self, other: &Self) -> Result<()> {
        if self.field != other.field || self.nvars() != other.nvars() {
            return Err(Error::MismatchedRing);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_ring(other)?;
        let mut terms = self.terms.clone();
        for (m, &c) in &other.terms {
            let slot = terms.entry(m.clone()).or_insert(0);
            *slot = self.field.add(*slot, c);
        }
        terms.retain(|_, c| *c != 0);
        Ok(Self::from_map(self.field, self.vars.clone(), terms))
    }

    pub fn neg(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, &c)| (m.clone(), self.field.neg(c)))
            .collect();
        Self::from_map(self.field, self.vars.clone(), terms)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u32) -> Self {
        let c = c % self.field.p();
        let terms = self
            .terms
            .iter()
            .map(|(m, &a)| (m.clone(), self.field.mul(a, c)))
            .filter(|(_, a)| *a != 0)
            .collect();
        Self::from_map(self.field, self.vars.clone(), terms)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_capped(other, usize::MAX)
    }

    pub(crate) fn mul_capped(&self, other: &Self, term_cap: usize) -> Result<Self> {
        self.check_same_ring(other)?;
        let field = self.field;
        let mut acc: HashMap<Monomial, u32> = HashMap::new();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let m = ma.checked_mul(mb)?;
                let slot = acc.entry(m).or_insert(0);
                *slot = field.add(*slot, field.mul(ca, cb));
            }
            if acc.len() > term_cap {
                return Err(Error::cap("polynomial term count", term_cap as u64));
            }
        }
        Ok(self.collect(acc))
    }

    /// Product with every monomial having an exponent `>= q` discarded.
    pub fn mul_truncated(&self, other: &Self, q: u64, term_cap: usize) -> Result<Self> {
        self.check_same_ring(other)?;
        let field = self.field;
        let mut acc: HashMap<Monomial, u32> = HashMap::new();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                if let Some(m) = ma.mul_below(mb, q) {
                    let slot = acc.entry(m).or_insert(0);
                    *slot = field.add(*slot, field.mul(ca, cb));
                }
            }
            if acc.len() > term_cap {
                return Err(Error::cap("polynomial term count", term_cap as u64));
            }
        }
        Ok(self.collect(acc))
    }

    fn collect(&self, acc: HashMap<Monomial, u32>) -> Self {
        let terms = acc.into_iter().filter(|(_, c)| *c != 0).collect();
        Self::from_map(self.field, self.vars.clone(), terms)
    }

    /// `self^k` by repeated squaring, without truncation.
    pub fn pow_naive(&self, k: u64, limits: &Limits) -> Result<Self> {
        let one = Self::constant(self.field, self.vars.clone(), 1);
        self.pow_with(k, one, |a, b| a.mul_capped(b, limits.term_cap))
    }

    /// `self^k` modulo the bracket power `(x_1^q, ..., x_n^q)`.
    ///
    /// Repeated squaring where every intermediate product drops the monomials
    /// lying in the monomial ideal, so no intermediate exceeds q^n terms.
    pub fn truncated_pow(&self, k: u64, q: u64, limits: &Limits) -> Result<Self> {
        let one = if q >= 1 {
            Self::constant(self.field, self.vars.clone(), 1)
        } else {
            Self::zero(self.field, self.vars.clone())
        };
        let base = self.truncate(q);
        base.pow_with(k, one, |a, b| a.mul_truncated(b, q, limits.term_cap))
    }

    fn pow_with<F>(&self, mut k: u64, one: Self, mul: F) -> Result<Self>
    where
        F: Fn(&Self, &Self) -> Result<Self>,
    {
        let mut acc = one;
        let mut square = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = mul(&acc, &square)?;
            }
            k >>= 1;
            if k > 0 {
                square = mul(&square, &square)?;
            }
        }
        Ok(acc)
    }

    /// Drops every term having some exponent `>= q`.
    pub fn truncate(&self, q: u64) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.below(q))
            .map(|(m, &c)| (m.clone(), c))
            .collect();
        Self::from_map(self.field, self.vars.clone(), terms)
    }

    /// `f(x_1 + c_1, ..., x_n + c_n)`.
    pub fn translate(&self, point: &[i64]) -> Result<Self> {
        if point.len() != self.nvars() {
            return Err(Error::MismatchedRing);
        }
        let n = self.nvars();
        let field = self.field;
        // powers[i][k] = (x_i + c_i)^k, filled lazily up to the largest exponent
        let mut powers: Vec<Vec<Self>> = Vec::with_capacity(n);
        for (i, &c) in point.iter().enumerate() {
            let max_exp = self
                .terms
                .keys()
                .map(|m| m.exponents()[i])
                .max()
                .unwrap_or(0);
            let shift = Self::variable(field, self.vars.clone(), i).add(&Self::constant(
                field,
                self.vars.clone(),
                c,
            ))?;
            let mut row = vec![Self::constant(field, self.vars.clone(), 1)];
            for _ in 0..max_exp {
                let next = row.last().unwrap().mul(&shift)?;
                row.push(next);
            }
            powers.push(row);
        }
        let mut out = Self::zero(field, self.vars.clone());
        for (m, &c) in &self.terms {
            let mut term = Self::constant(field, self.vars.clone(), c as i64);
            for (i, &a) in m.exponents().iter().enumerate() {
                if a > 0 {
                    term = term.mul(&powers[i][a as usize])?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Formal partial derivative with respect to variable `i` (0-based).
    pub fn partial_derivative(&self, i: usize) -> Self {
        assert!(i < self.nvars(), "variable index out of range");
        let field = self.field;
        let mut terms = BTreeMap::new();
        for (m, &c) in &self.terms {
            let a = m.exponents()[i];
            if a == 0 {
                continue;
            }
            let coeff = field.mul(c, field.from_u64(a as u64));
            if coeff == 0 {
                continue;
            }
            let mut e = m.exponents().to_vec();
            e[i] -= 1;
            terms.insert(Monomial::new(e), coeff);
        }
        Self::from_map(field, self.vars.clone(), terms)
    }

    pub fn evaluate(&self, point: &[u32]) -> u32 {
        assert_eq!(point.len(), self.nvars());
        let field = self.field;
        self.terms.iter().fold(0, |acc, (m, &c)| {
            let v = m.exponents().iter().zip(point).fold(c, |t, (&a, &x)| {
                field.mul(t, field.pow(x % field.p(), a as u64))
            });
            field.add(acc, v)
        })
    }

    /// Highest power of variable `i` dividing every term.
    pub fn divisibility_by_variable(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.exponents()[i]).min()
    }
}

impl fmt::Display for SparsePolynomial {
    /// Terms in descending lexicographic order, e.g. `x1^2 + 3*x2*x3 + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, &c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let mut factors = Vec::new();
            for (i, &a) in m.exponents().iter().enumerate() {
                match a {
                    0 => {}
                    1 => factors.push(self.vars[i].clone()),
                    _ => factors.push(format!("{}^{}", self.vars[i], a)),
                }
            }
            if factors.is_empty() {
                write!(f, "{c}")?;
            } else if c == 1 {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", c, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Convenience for building variable name lists.
pub fn var_names<S: AsRef<str>>(names: &[S]) -> Arc<[String]> {
    names.iter().map(|s| s.as_ref().to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn fp(p: u64) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    fn poly(text: &str, vars: &[&str], p: u64) -> SparsePolynomial {
        parse_poly(text, &var_names(vars), fp(p)).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let a = poly("x + y", &["x", "y"], 5);
        let b = poly("x - y", &["x", "y"], 5);
        let prod = a.mul(&b).unwrap();
        assert_eq!(prod, poly("x^2 + 4*y^2", &["x", "y"], 5));
        assert_eq!(prod.to_string(), "x^2 + 4*y^2");
    }

    #[test]
    fn additive_inverse_and_identity() {
        let f = poly("3*x^2*y + y^3 + 2", &["x", "y"], 7);
        assert!(f.add(&f.neg()).unwrap().is_zero());
        let one = SparsePolynomial::constant(fp(7), f.vars().clone(), 1);
        assert_eq!(f.mul(&one).unwrap(), f);
    }

    #[test]
    fn mismatched_rings_are_rejected() {
        let f = poly("x", &["x", "y"], 5);
        let g = poly("x", &["x", "y"], 7);
        let h = poly("x", &["x"], 5);
        assert_eq!(f.add(&g), Err(Error::MismatchedRing));
        assert_eq!(f.mul(&h), Err(Error::MismatchedRing));
    }

    #[test]
    fn naive_powers_in_characteristic_p() {
        let limits = Limits::default();
        let f = poly("x + y", &["x", "y"], 2);
        assert_eq!(
            f.pow_naive(2, &limits).unwrap(),
            poly("x^2 + y^2", &["x", "y"], 2)
        );
        let g = poly("x1 + x2", &["x1", "x2"], 3);
        assert_eq!(
            g.pow_naive(3, &limits).unwrap(),
            poly("x1^3 + x2^3", &["x1", "x2"], 3)
        );
        let one = g.pow_naive(0, &limits).unwrap();
        assert_eq!(one.to_string(), "1");
    }

    #[test]
    fn term_cap_is_enforced() {
        let limits = Limits {
            term_cap: 10,
            ..Limits::default()
        };
        let f = poly("x + y + z + 1", &["x", "y", "z"], 101);
        assert!(matches!(
            f.pow_naive(5, &limits),
            Err(Error::ResourceCapExceeded { .. })
        ));
    }

    #[test]
    fn truncated_pow_of_single_variable() {
        let limits = Limits::default();
        for p in [2u64, 3, 5, 7] {
            let x = poly("x", &["x", "y"], p);
            let below = x.truncated_pow(p - 1, p, &limits).unwrap();
            assert_eq!(below, x.pow_naive(p - 1, &limits).unwrap());
            assert!(x.truncated_pow(p, p, &limits).unwrap().is_zero());
        }
    }

    #[test]
    fn truncated_pow_keeps_multinomial_coefficient() {
        let limits = Limits::default();
        let vars = ["x1", "x2", "x3", "x4"];
        let f = poly("x1^2 + x2^4 + x3^5 + x4^4", &vars, 7);
        let t = f.truncated_pow(6, 7, &limits).unwrap();
        assert!(!t.is_zero());
        // 6!/(3!1!1!1!) = 120 = 1 mod 7
        assert_eq!(t.coefficient(&Monomial::new(vec![6, 4, 5, 4])), 1);
        assert_eq!(t, f.pow_naive(6, &limits).unwrap().truncate(7));
    }

    #[test]
    fn translation_examples() {
        let f = poly("x^2", &["x"], 3);
        assert_eq!(f.translate(&[1]).unwrap(), poly("x^2 + 2*x + 1", &["x"], 3));
        let g = poly("x + y", &["x", "y"], 2);
        assert_eq!(g.translate(&[1, 1]).unwrap(), g);
        let h = poly("x^3*y + 2*y^2 + 1", &["x", "y"], 5);
        assert_eq!(h.translate(&[0, 0]).unwrap(), h);
        assert_eq!(h.translate(&[1]), Err(Error::MismatchedRing));
    }

    #[test]
    fn derivatives() {
        let f = poly("x^5", &["x"], 5);
        assert!(f.partial_derivative(0).is_zero());
        let vars = ["x1", "x2", "x3", "x4"];
        let g = poly("x1^2 + x2^4 + x3^5 + x4^4", &vars, 7);
        assert_eq!(g.partial_derivative(2), poly("5*x3^4", &vars, 7));
        let c = poly("4", &["x", "y"], 7);
        assert!(c.partial_derivative(1).is_zero());
    }

    #[test]
    fn order_and_evaluation() {
        let f = poly("x^2*y + y^3 + x*y", &["x", "y"], 7);
        assert_eq!(f.order(), Some(2));
        assert_eq!(f.total_degree(), Some(3));
        assert_eq!(f.evaluate(&[1, 2]), (2 + 8 + 2) % 7);
    }
}
