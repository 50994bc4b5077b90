//! The finite quotient S/m^[q] of the polynomial ring by the bracket power
//! `(x_1^q, ..., x_n^q)`, with its basis of standard monomials.
//!
//! Basis index of `x^a` is the mixed-radix integer `a_1 + a_2 q + ... + a_n q^(n-1)`,
//! so the first variable is the least significant digit.

use crate::config::Limits;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::matrix::FpMatrix;
use crate::poly::{Monomial, SparsePolynomial};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketSpace {
    field: FieldSpec,
    n: usize,
    e: u32,
    q: u64,
    dim: usize,
}

impl BracketSpace {
    pub fn new(field: FieldSpec, n: usize, e: u32, limits: &Limits) -> Result<Self> {
        if e == 0 {
            return Err(Error::InvalidArgument(
                "Frobenius iterate must be >= 1".into(),
            ));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one variable".into()));
        }
        let q = field
            .frobenius_power(e)
            .ok_or(Error::DimensionCapExceeded {
                dim: u128::MAX,
                cap: limits.dim_cap,
            })?;
        let dim = Self::dimension(q, n);
        if dim > limits.dim_cap as u128 || dim > u32::MAX as u128 {
            return Err(Error::DimensionCapExceeded {
                dim,
                cap: limits.dim_cap,
            });
        }
        Ok(BracketSpace {
            field,
            n,
            e,
            q,
            dim: dim as usize,
        })
    }

    /// `q^n`, saturating at `u128::MAX`.
    pub fn dimension(q: u64, n: usize) -> u128 {
        let mut d: u128 = 1;
        for _ in 0..n {
            d = d.saturating_mul(q as u128);
        }
        d
    }

    /// Whether `(p^e)^n` is within the dimension cap.
    pub fn feasible(field: FieldSpec, n: usize, e: u32, limits: &Limits) -> bool {
        Self::new(field, n, e, limits).is_ok()
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Index of a standard monomial, or `None` if it lies in m^[q].
    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        let mut idx = 0u64;
        for &a in m.exponents().iter().rev() {
            if a as u64 >= self.q {
                return None;
            }
            idx = idx * self.q + a as u64;
        }
        Some(idx as usize)
    }

    pub fn monomial_at(&self, mut idx: usize) -> Monomial {
        let q = self.q as usize;
        let mut e = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            e.push((idx % q) as u32);
            idx /= q;
        }
        Monomial::new(e)
    }

    fn check(&self, f: &SparsePolynomial) -> Result<()> {
        if f.field() != self.field || f.nvars() != self.n {
            return Err(Error::MismatchedRing);
        }
        Ok(())
    }

    /// Canonical representative of `f` in S/m^[q]; zero iff `f` lies in m^[q].
    pub fn bracket_reduce(&self, f: &SparsePolynomial) -> Result<SparsePolynomial> {
        self.check(f)?;
        Ok(f.truncate(self.q))
    }

    /// Matrix of multiplication by `g` on S/m^[q] in the standard monomial basis.
    ///
    /// Column `j` holds the coordinates of `g * x^a` where `x^a` is basis element `j`.
    pub fn mult_operator(&self, g: &SparsePolynomial, limits: &Limits) -> Result<FpMatrix> {
        let g = self.bracket_reduce(g)?;
        let q = self.q as usize;
        let shifts: Vec<(Vec<u32>, usize, u32)> = g
            .terms()
            .map(|(m, c)| {
                let idx = self.index_of(m).expect("reduced term");
                (m.exponents().to_vec(), idx, c)
            })
            .collect();
        let nnz_bound = shifts.len() as u128 * self.dim as u128;
        if nnz_bound > limits.term_cap as u128 {
            return Err(Error::cap("operator nonzeros", limits.term_cap as u64));
        }
        let mut cols = Vec::with_capacity(self.dim);
        let mut digits = vec![0u32; self.n];
        for j in 0..self.dim {
            let mut col: Vec<(u32, u32)> = Vec::with_capacity(shifts.len());
            'terms: for (exps, offset, c) in &shifts {
                for (d, a) in digits.iter().zip(exps) {
                    if (*d + *a) as usize >= q {
                        continue 'terms;
                    }
                }
                col.push(((j + offset) as u32, *c));
            }
            col.sort_unstable_by_key(|&(r, _)| r);
            cols.push(col);
            // increment the mixed-radix digit vector
            for d in digits.iter_mut() {
                *d += 1;
                if (*d as usize) < q {
                    break;
                }
                *d = 0;
            }
        }
        Ok(FpMatrix::from_columns(self.field, self.dim, cols))
    }

    /// Applies multiplication by `g` to a vector given in basis coordinates.
    pub fn apply(&self, g: &SparsePolynomial, v: &[(usize, u32)]) -> Result<Vec<(usize, u32)>> {
        let g = self.bracket_reduce(g)?;
        let mut acc = std::collections::BTreeMap::new();
        for &(j, a) in v {
            let mono = self.monomial_at(j);
            for (m, c) in g.terms() {
                let prod = mono.checked_mul(m)?;
                if let Some(i) = self.index_of(&prod) {
                    let slot = acc.entry(i).or_insert(0u32);
                    *slot = self.field.add(*slot, self.field.mul(a, c));
                }
            }
        }
        Ok(acc.into_iter().filter(|&(_, c)| c != 0).collect())
    }
}
