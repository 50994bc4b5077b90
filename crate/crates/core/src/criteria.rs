//! Decision procedures at the origin of a hypersurface `S/(f)`.
//!
//! * Fedder's test: `S/(f)` is F-pure at the origin iff `f^(q-1)` is not in m^[q].
//! * Strong F-regularity certificate: for a domain with an isolated singularity
//!   at the origin, the ring is strongly F-regular iff `c * f^(q-1)` escapes
//!   m^[q] for some `e`, where `c` is any element outside the minimal primes.
//!   A finite search can only ever certify, never refute.
//! * Isolated singularity: degree-truncated Nakayama test on the ideal
//!   generated by `f` and its partial derivatives.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::matrix::FpMatrix;
use crate::poly::{Monomial, SparsePolynomial};
use crate::rank::rank_fp;

/// Rejects the zero polynomial and polynomials with a constant term.
pub fn require_in_maximal_ideal(f: &SparsePolynomial) -> Result<()> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.constant_term() != 0 {
        return Err(Error::NotInMaximalIdeal);
    }
    Ok(())
}

fn frobenius_q(f: &SparsePolynomial, e: u32) -> Result<u64> {
    if e == 0 {
        return Err(Error::InvalidArgument(
            "Frobenius iterate must be >= 1".into(),
        ));
    }
    f.field()
        .frobenius_power(e)
        .filter(|&q| q <= u32::MAX as u64)
        .ok_or_else(|| Error::cap("Frobenius power p^e", u32::MAX as u64))
}

/// Fedder's criterion at iterate `e`.
pub fn fedder_is_fpure(f: &SparsePolynomial, e: u32, limits: &Limits) -> Result<bool> {
    require_in_maximal_ideal(f)?;
    let q = frobenius_q(f, e)?;
    Ok(!f.truncated_pow(q - 1, q, limits)?.is_zero())
}

/// True iff `c * f^(q-1)` is not in m^[q].
pub fn split_witness(
    f: &SparsePolynomial,
    c: &SparsePolynomial,
    e: u32,
    limits: &Limits,
) -> Result<bool> {
    require_in_maximal_ideal(f)?;
    if c.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let q = frobenius_q(f, e)?;
    let power = f.truncated_pow(q - 1, q, limits)?;
    let product = c.truncate(q).mul_truncated(&power, q, limits.term_cap)?;
    Ok(!product.is_zero())
}

/// First variable that is nonzero in `S/(f)`; for a hypersurface `x_i`
/// vanishes in the quotient only when `f` is a scalar multiple of `x_i`.
pub fn default_witness(f: &SparsePolynomial) -> SparsePolynomial {
    let killed = |i: usize| {
        f.num_terms() == 1
            && f.terms()
                .next()
                .is_some_and(|(m, _)| m.total_degree() == 1 && m.exponents()[i] == 1)
    };
    let pick = (0..f.nvars()).find(|&i| !killed(i)).unwrap_or(0);
    SparsePolynomial::variable(f.field(), f.vars().clone(), pick)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SfrStatus {
    Certified { e: u32 },
    Inconclusive { e_max: u32 },
}

/// What is known about the hypotheses of the strong F-regularity criterion.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SfrHypotheses {
    /// Caller asserts `S/(f)` is a domain; never computed.
    pub domain_asserted: bool,
    /// The isolated singularity at the origin was certified.
    pub isolated_certified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SfrOutcome {
    #[serde(flatten)]
    pub status: SfrStatus,
    #[serde(serialize_with = "crate::criteria::ser_poly")]
    pub witness: SparsePolynomial,
    /// `(e, split_witness result)` for every tested iterate, ascending.
    pub transcript: Vec<SfrStep>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SfrStep {
    pub e: u32,
    pub survives: bool,
}

pub(crate) fn ser_poly<S: serde::Serializer>(
    p: &SparsePolynomial,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

/// Searches `e = 1..=e_max` for the least iterate where the witness survives.
pub fn sfr_search(
    f: &SparsePolynomial,
    e_max: u32,
    witness: Option<&SparsePolynomial>,
    hypotheses: SfrHypotheses,
    limits: &Limits,
) -> Result<SfrOutcome> {
    require_in_maximal_ideal(f)?;
    let witness = match witness {
        Some(c) => {
            if c.field() != f.field() || c.nvars() != f.nvars() {
                return Err(Error::MismatchedRing);
            }
            c.clone()
        }
        None => default_witness(f),
    };
    let mut warnings = Vec::new();
    if !hypotheses.isolated_certified {
        warnings.push(
            "PreconditionNotCertified: isolated singularity at the origin not certified"
                .to_string(),
        );
    }
    if !hypotheses.domain_asserted {
        warnings.push("PreconditionNotCertified: domain hypothesis not asserted".to_string());
    }
    let mut transcript = Vec::new();
    for e in 1..=e_max {
        let survives = split_witness(f, &witness, e, limits)?;
        transcript.push(SfrStep { e, survives });
        if survives {
            return Ok(SfrOutcome {
                status: SfrStatus::Certified { e },
                witness,
                transcript,
                warnings,
            });
        }
    }
    Ok(SfrOutcome {
        status: SfrStatus::Inconclusive { e_max },
        witness,
        transcript,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum IsolatedOutcome {
    Certified { d: u32 },
    Inconclusive { d_max: u32 },
}

/// Least `D <= d_max` with `m^D` inside `(f, df/dx_1, ..., df/dx_n) + m^(D+1)`.
///
/// By Nakayama's lemma this puts `m^D` inside the Jacobian-plus-f ideal after
/// localizing at the origin, so the singular locus is isolated there.
pub fn isolated_singularity_certify(
    f: &SparsePolynomial,
    d_max: u32,
    limits: &Limits,
) -> Result<IsolatedOutcome> {
    require_in_maximal_ideal(f)?;
    let mut generators = vec![f.clone()];
    generators.extend(
        (0..f.nvars())
            .map(|i| f.partial_derivative(i))
            .filter(|g| !g.is_zero()),
    );
    for d in 1..=d_max {
        if truncated_nakayama(&generators, d, limits)? {
            return Ok(IsolatedOutcome::Certified { d });
        }
    }
    Ok(IsolatedOutcome::Inconclusive { d_max })
}

/// Monomials in `n` variables of total degree at most `d`, graded then lex.
fn monomials_up_to(n: usize, d: u32) -> Vec<Monomial> {
    fn rec(n: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if prefix.len() == n {
            out.push(Monomial::new(prefix.clone()));
            return;
        }
        for a in 0..=left {
            prefix.push(a);
            rec(n, left - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out.sort_by_key(|m| (m.total_degree(), m.clone()));
    out
}

fn truncated_nakayama(generators: &[SparsePolynomial], d: u32, limits: &Limits) -> Result<bool> {
    let f = &generators[0];
    let n = f.nvars();
    let field = f.field();
    let monos = monomials_up_to(n, d);
    if monos.len().saturating_mul(generators.len() + 1) > limits.term_cap {
        return Err(Error::cap(
            "truncated Jacobian system size",
            limits.term_cap as u64,
        ));
    }
    let index: HashMap<&Monomial, u32> = monos
        .iter()
        .enumerate()
        .map(|(i, m)| (m, i as u32))
        .collect();
    let d = d as u64;
    let mut rows: Vec<Vec<(u32, u32)>> = Vec::new();
    let mut nnz = 0usize;
    for g in generators {
        let order = g.order().unwrap_or(0);
        for beta in monos.iter().filter(|b| b.total_degree() + order <= d) {
            let row: Vec<(u32, u32)> = g
                .terms()
                .filter(|(m, _)| m.total_degree() + beta.total_degree() <= d)
                .map(|(m, c)| {
                    let prod = m.checked_mul(beta)?;
                    Ok((index[&prod], c))
                })
                .collect::<Result<_>>()?;
            nnz += row.len();
            rows.push(row);
        }
        if nnz > limits.term_cap {
            return Err(Error::cap(
                "truncated Jacobian system nonzeros",
                limits.term_cap as u64,
            ));
        }
    }
    let span = rank_fp(
        &FpMatrix::from_rows(field, monos.len(), rows.clone()),
        limits,
    )?;
    // adjoin every monomial of degree exactly d; they lie in the span iff the rank is unchanged
    for (i, m) in monos.iter().enumerate() {
        if m.total_degree() == d {
            rows.push(vec![(i as u32, 1)]);
        }
    }
    let extended = rank_fp(&FpMatrix::from_rows(field, monos.len(), rows), limits)?;
    Ok(span == extended)
}

/// Jacobian criterion at the origin: some partial derivative is a unit there.
pub fn smooth_at_origin(f: &SparsePolynomial) -> bool {
    (0..f.nvars()).any(|i| f.partial_derivative(i).constant_term() != 0)
}

/// Verdict strings used in reports.
pub struct Verdict;

impl Verdict {
    pub fn fpure(v: bool) -> String {
        format!("fpure:{v}")
    }

    pub fn sfr(s: &SfrStatus) -> String {
        s.to_string()
    }

    pub fn isolated(s: &IsolatedOutcome) -> String {
        s.to_string()
    }

    pub fn smooth(v: bool) -> String {
        format!("smooth_at_origin:{v}")
    }
}

impl fmt::Display for SfrStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SfrStatus::Certified { e } => write!(f, "sfr:certified(e={e})"),
            SfrStatus::Inconclusive { e_max } => write!(f, "sfr:inconclusive(e_max={e_max})"),
        }
    }
}

impl fmt::Display for IsolatedOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsolatedOutcome::Certified { d } => write!(f, "isolated:certified(D={d})"),
            IsolatedOutcome::Inconclusive { d_max } => {
                write!(f, "isolated:inconclusive(D_max={d_max})")
            }
        }
    }
}
