//! F-signature and Hilbert-Kunz estimators for hypersurfaces `R = S/(f)`.
//!
//! For `q = p^e`, an element `a` lies in the degeneracy ideal `I_e` iff
//! `a * f^(q-1)` is in m^[q] (Fedder). Hence `S/(m^[q] : f^(q-1))` has length
//! equal to the rank of multiplication by `f^(q-1)` on S/m^[q], and
//! `R/m_R^[q] = S/(m^[q] + (f))` has length `q^n - rank(mult by f)`.
//! Both are divided by `q^(n-1)` since `dim R = n - 1`.

use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bracket::BracketSpace;
use crate::config::Limits;
use crate::criteria::{require_in_maximal_ideal, smooth_at_origin};
use crate::error::{Error, Result};
use crate::poly::SparsePolynomial;
use crate::rank::{rank_fp, rank_of_power};

/// Exact rational serialized as `{"num": .., "den": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fraction(pub Ratio<i64>);

impl Fraction {
    pub fn new(num: i64, den: i64) -> Self {
        Fraction(Ratio::new(num, den))
    }

    pub fn num(&self) -> i64 {
        *self.0.numer()
    }

    pub fn den(&self) -> i64 {
        *self.0.denom()
    }

    pub fn abs(&self) -> Self {
        if self.num() < 0 {
            Fraction(-self.0)
        } else {
            *self
        }
    }

    /// Floating approximation, for notes and tolerance checks only.
    pub fn to_f64(&self) -> f64 {
        self.num() as f64 / self.den() as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num(), self.den())
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Fraction", 2)?;
        st.serialize_field("num", &self.num())?;
        st.serialize_field("den", &self.den())?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantRow {
    pub e: u32,
    pub q: u64,
    /// Length of `R/I_e`.
    pub colength_ie: u64,
    /// Length of `R/m_R^[q]`.
    pub colength_bracket: u64,
    pub s_e: Fraction,
    pub ehk_e: Fraction,
    /// `|s_e + ehk_e - 2|`, present for singular points of multiplicity 2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mult2_deviation: Option<Fraction>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub p: u32,
    pub n: usize,
    pub poly: String,
    pub rows: Vec<InvariantRow>,
    /// Iterates skipped because q^n exceeds the dimension cap.
    pub infeasible: Vec<u32>,
    pub notes: Vec<String>,
}

fn space_for(f: &SparsePolynomial, e: u32, limits: &Limits) -> Result<BracketSpace> {
    require_in_maximal_ideal(f)?;
    BracketSpace::new(f.field(), f.nvars(), e, limits)
}

/// Length of `R/I_e`: rank of multiplication by `f^(q-1)` on S/m^[q].
pub fn splitting_colength(f: &SparsePolynomial, e: u32, limits: &Limits) -> Result<u64> {
    let space = space_for(f, e, limits)?;
    Ok(rank_of_power(f, space.q() - 1, &space, limits)? as u64)
}

/// Length of `R/m_R^[q]`: `q^n` minus the rank of multiplication by `f`.
pub fn bracket_colength(f: &SparsePolynomial, e: u32, limits: &Limits) -> Result<u64> {
    let space = space_for(f, e, limits)?;
    let op = space.mult_operator(f, limits)?;
    Ok((space.dim() - rank_fp(&op, limits)?) as u64)
}

/// Both colengths at iterate `e` as one row.
pub fn invariant_row(f: &SparsePolynomial, e: u32, limits: &Limits) -> Result<InvariantRow> {
    let space = space_for(f, e, limits)?;
    let q = space.q();
    let colength_ie = splitting_colength(f, e, limits)?;
    let colength_bracket = bracket_colength(f, e, limits)?;
    let scale = (q as i64)
        .checked_pow(f.nvars() as u32 - 1)
        .ok_or_else(|| Error::cap("q^(n-1)", i64::MAX as u64))?;
    let s_e = Fraction::new(colength_ie as i64, scale);
    let ehk_e = Fraction::new(colength_bracket as i64, scale);
    let mult2_deviation = (!smooth_at_origin(f) && f.order() == Some(2))
        .then(|| Fraction(s_e.0 + ehk_e.0 - Ratio::from_integer(2)).abs());
    Ok(InvariantRow {
        e,
        q,
        colength_ie,
        colength_bracket,
        s_e,
        ehk_e,
        mult2_deviation,
    })
}

/// Rows for `e = 1..=e_max`; iterates whose quotient exceeds the dimension
/// cap are listed in `infeasible` with a note.
pub fn invariant_series(
    f: &SparsePolynomial,
    e_max: u32,
    limits: &Limits,
) -> Result<InvariantReport> {
    require_in_maximal_ideal(f)?;
    let field = f.field();
    let n = f.nvars();
    let (feasible, infeasible): (Vec<u32>, Vec<u32>) =
        (1..=e_max).partition(|&e| BracketSpace::feasible(field, n, e, limits));
    let rows: Result<Vec<InvariantRow>> = feasible
        .par_iter()
        .map(|&e| invariant_row(f, e, limits))
        .collect();
    let rows = rows?;
    let mut notes = Vec::new();
    for &e in &infeasible {
        let q = field.frobenius_power(e).unwrap_or(u64::MAX);
        notes.push(format!(
            "e={e}: q^n = {} exceeds dim_cap {}; row skipped",
            BracketSpace::dimension(q, n),
            limits.dim_cap
        ));
    }
    for row in &rows {
        if f.truncate(row.q).is_zero() {
            notes.push(format!("e={}: f lies in m^[q]; degenerate row", row.e));
        }
    }
    if rows.iter().any(|r| r.mult2_deviation.is_some()) {
        notes.push(
            "multiplicity 2: s + e_HK = 2 holds for the limits; mult2_deviation measures it at finite e".to_string(),
        );
    }
    Ok(InvariantReport {
        p: field.p(),
        n,
        poly: f.to_string(),
        rows,
        infeasible,
        notes,
    })
}

impl InvariantReport {
    pub const CSV_HEADER: &'static str =
        "e,q,colength_Ie,colength_bracket,s_e_num,s_e_den,ehk_num,ehk_den";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.to_csv());
            out.push('\n');
        }
        out
    }
}

impl InvariantRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.e,
            self.q,
            self.colength_ie,
            self.colength_bracket,
            self.s_e.num(),
            self.s_e.den(),
            self.ehk_e.num(),
            self.ehk_e.den()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::parse::parse_poly;
    use crate::poly::var_names;

    fn poly(text: &str, vars: &[&str], p: u64) -> SparsePolynomial {
        parse_poly(text, &var_names(vars), FieldSpec::new(p).unwrap()).unwrap()
    }

    #[test]
    fn regular_point_has_unit_invariants() {
        let l = Limits::default();
        for p in [2u64, 3, 5] {
            let f = poly("x", &["x", "y"], p);
            for e in 1..=2 {
                let q = FieldSpec::new(p).unwrap().frobenius_power(e).unwrap();
                assert_eq!(splitting_colength(&f, e, &l).unwrap(), q);
                assert_eq!(bracket_colength(&f, e, &l).unwrap(), q);
                let row = invariant_row(&f, e, &l).unwrap();
                assert_eq!(row.s_e, Fraction::new(1, 1));
                assert_eq!(row.ehk_e, Fraction::new(1, 1));
                assert_eq!(row.mult2_deviation, None);
            }
        }
    }

    #[test]
    fn degenerate_and_invalid_inputs() {
        let l = Limits::default();
        let f = poly("x^3 + y^3", &["x", "y"], 3);
        assert_eq!(splitting_colength(&f, 1, &l).unwrap(), 0);
        let report = invariant_series(&f, 1, &l).unwrap();
        assert!(report.notes.iter().any(|n| n.contains("degenerate")));
        assert_eq!(
            bracket_colength(&poly("0", &["x"], 3), 1, &l),
            Err(Error::ZeroPolynomial)
        );
        assert_eq!(
            splitting_colength(&poly("x + 1", &["x"], 3), 1, &l),
            Err(Error::NotInMaximalIdeal)
        );
    }

    #[test]
    fn infeasible_rows_are_reported() {
        let l = Limits {
            dim_cap: 1000,
            ..Limits::default()
        };
        let f = poly("x*y + z^2", &["x", "y", "z"], 3);
        let report = invariant_series(&f, 3, &l).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.infeasible, vec![3]);
        assert!(report.notes[0].starts_with("e=3: q^n = 19683"));
    }

    #[test]
    fn csv_layout() {
        let l = Limits::default();
        let f = poly("x", &["x", "y"], 3);
        let report = invariant_series(&f, 2, &l).unwrap();
        assert_eq!(
            report.to_csv(),
            "e,q,colength_Ie,colength_bracket,s_e_num,s_e_den,ehk_num,ehk_den\n1,3,3,3,1,1,1,1\n2,9,9,9,1,1,1,1\n"
        );
    }

    #[test]
    fn fraction_json() {
        let v = serde_json::to_string(&Fraction::new(6, 4)).unwrap();
        assert_eq!(v, r#"{"num":3,"den":2}"#);
    }
}
