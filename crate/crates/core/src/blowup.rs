//! Standard affine charts of the blowup of a hypersurface at the origin.
//!
//! In chart `i` the variable `x_i` is kept and every other `x_j` stands for
//! `x_j / x_i`. Substituting `x_j -> x_i x_j` multiplies a term `x^a` by
//! `x_i^(|a| - a_i)`, so every term becomes divisible by `x_i^m` where `m` is
//! the order of `f`. Dividing it out leaves the strict transform, which is not
//! divisible by `x_i` because some term has total degree exactly `m`.

use std::sync::Arc;

use serde::Serialize;

use crate::criteria::require_in_maximal_ideal;
use crate::error::{Error, Result};
use crate::poly::{Monomial, SparsePolynomial};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartRing {
    /// Chart variable position, 0-based.
    pub index: usize,
    pub chart_poly: SparsePolynomial,
    /// Power of the chart variable factored out (the order of `f`).
    pub dropped_power: u32,
    /// `x_j -> x_i*x_j` for every `j != i`, in source variable names.
    pub substitution: Vec<String>,
}

impl ChartRing {
    /// Whether the chart origin lies on the strict transform.
    pub fn origin_on_strict_transform(&self) -> bool {
        self.chart_poly.constant_term() == 0
    }

    /// Chart polynomial with variables renamed `a, b, c, ...` for display.
    pub fn display_poly(&self) -> SparsePolynomial {
        self.chart_poly.with_vars(letter_names(
            self.chart_poly.nvars(),
            self.chart_poly.vars(),
        ))
    }

    /// Undoes the chart: `x_j -> x_j / x_i` for `j != i`, then multiply by `x_i^m`.
    pub fn resubstitute(&self) -> Result<SparsePolynomial> {
        let i = self.index;
        let field = self.chart_poly.field();
        let mut terms = Vec::with_capacity(self.chart_poly.num_terms());
        for (m, c) in self.chart_poly.terms() {
            let e = m.exponents();
            let others: i64 = e
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &a)| a as i64)
                .sum();
            let top = e[i] as i64 + self.dropped_power as i64 - others;
            if top < 0 {
                return Err(Error::Precondition(format!(
                    "term {m:?} does not come from a chart of a polynomial"
                )));
            }
            let mut out = e.to_vec();
            out[i] = top as u32;
            terms.push((Monomial::new(out), c as i64));
        }
        Ok(SparsePolynomial::from_terms(
            field,
            self.chart_poly.vars().clone(),
            terms,
        ))
    }

    pub fn report(&self) -> ChartReport {
        ChartReport {
            chart: self.index + 1,
            dropped_power: self.dropped_power,
            poly: self.display_poly().to_string(),
            origin_on_strict_transform: self.origin_on_strict_transform(),
        }
    }
}

/// JSON shape of one chart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChartReport {
    /// 1-based chart index.
    pub chart: usize,
    pub dropped_power: u32,
    pub poly: String,
    pub origin_on_strict_transform: bool,
}

/// `a, b, c, ...` when there are at most 26 variables; otherwise the original names.
pub fn letter_names(n: usize, fallback: &Arc<[String]>) -> Arc<[String]> {
    if n > 26 {
        return fallback.clone();
    }
    (0..n)
        .map(|k| ((b'a' + k as u8) as char).to_string())
        .collect()
}

/// Chart `index` (0-based) of the blowup of `V(f)` at the origin.
pub fn chart(f: &SparsePolynomial, index: usize) -> Result<ChartRing> {
    require_in_maximal_ideal(f)?;
    let n = f.nvars();
    if index >= n {
        return Err(Error::InvalidChartIndex {
            index: index + 1,
            n,
        });
    }
    let order = f.order().expect("nonzero polynomial");
    let terms = f.terms().map(|(m, c)| {
        let mut e = m.exponents().to_vec();
        e[index] = (m.total_degree() - order) as u32;
        (Monomial::new(e), c as i64)
    });
    let chart_poly = SparsePolynomial::from_terms(f.field(), f.vars().clone(), terms);
    let vars = f.vars();
    let substitution = (0..n)
        .filter(|&j| j != index)
        .map(|j| format!("{} -> {}*{}", vars[j], vars[index], vars[j]))
        .collect();
    Ok(ChartRing {
        index,
        chart_poly,
        dropped_power: order as u32,
        substitution,
    })
}

/// All `n` standard charts in index order.
pub fn charts(f: &SparsePolynomial) -> Result<Vec<ChartRing>> {
    (0..f.nvars()).map(|i| chart(f, i)).collect()
}

/// F_p-rational points of the chart hypersurface on the exceptional locus
/// `V(x_i)` where the Jacobian vanishes, by exhaustive enumeration.
pub fn singular_exceptional_points(ch: &ChartRing, max_points: u64) -> Result<ExceptionalScan> {
    let f = &ch.chart_poly;
    let n = f.nvars();
    let p = f.field().p() as u64;
    let total = (p as u128).pow(n as u32 - 1);
    if total > max_points as u128 {
        return Err(Error::cap("rational points to enumerate", max_points));
    }
    let partials: Vec<SparsePolynomial> = (0..n).map(|i| f.partial_derivative(i)).collect();
    let mut scan = ExceptionalScan::default();
    let mut point = vec![0u32; n];
    for k in 0..total as u64 {
        let mut rest = k;
        for (j, slot) in point.iter_mut().enumerate() {
            if j == ch.index {
                *slot = 0;
            } else {
                *slot = (rest % p) as u32;
                rest /= p;
            }
        }
        if f.evaluate(&point) != 0 {
            continue;
        }
        scan.on_strict_transform += 1;
        if partials.iter().all(|d| d.evaluate(&point) == 0) {
            scan.singular.push(point.clone());
        }
    }
    Ok(scan)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExceptionalScan {
    /// Rational points of the strict transform with `x_i = 0`.
    pub on_strict_transform: u64,
    pub singular: Vec<Vec<u32>>,
}
