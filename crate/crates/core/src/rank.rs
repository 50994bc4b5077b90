//! Exact rank over F_p.
//!
//! `rank_fp` first splits a matrix into the connected components of its
//! row/column incidence graph. Rank is additive over components, and the
//! operators built from monomial shifts fall apart into many small blocks.
//! Blocks up to the dense threshold use Gaussian elimination on a dense copy;
//! larger ones use sparse elimination with Markowitz pivoting.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::bracket::BracketSpace;
use crate::config::Limits;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::matrix::FpMatrix;
use crate::poly::SparsePolynomial;

/// Which elimination path `rank_with` takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankMethod {
    /// Component split, then dense or sparse per block by size.
    Auto,
    /// Dense Gaussian elimination on the whole matrix.
    Dense,
    /// Markowitz sparse elimination on the whole matrix.
    Sparse,
}

pub fn rank_fp(m: &FpMatrix, limits: &Limits) -> Result<usize> {
    rank_with(m, RankMethod::Auto, limits)
}

pub fn rank_with(m: &FpMatrix, method: RankMethod, limits: &Limits) -> Result<usize> {
    let field = m.field();
    match method {
        RankMethod::Dense => Ok(dense_rank(field, m.dense_rows(), m.cols())),
        RankMethod::Sparse => sparse_rank(field, m.cols(), m.sparse_rows(), limits.term_cap),
        RankMethod::Auto => {
            let blocks = components(m);
            let threshold = limits.dense_threshold;
            let ranks: Result<Vec<usize>> = blocks
                .into_par_iter()
                .map(|b| {
                    if b.rows.max(b.cols) <= threshold {
                        Ok(dense_rank(field, b.dense(), b.cols))
                    } else {
                        sparse_rank(field, b.cols, b.entries, limits.term_cap)
                    }
                })
                .collect();
            Ok(ranks?.into_iter().sum())
        }
    }
}

/// A connected block with local row/column numbering.
struct Block {
    rows: usize,
    cols: usize,
    /// Sparse rows in local column indices.
    entries: Vec<Vec<(u32, u32)>>,
}

impl Block {
    fn dense(&self) -> Vec<Vec<u32>> {
        self.entries
            .iter()
            .map(|row| {
                let mut d = vec![0u32; self.cols];
                for &(c, v) in row {
                    d[c as usize] = v;
                }
                d
            })
            .collect()
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins, so labels are schedule independent
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Blocks of the bipartite row/column graph that carry at least one nonzero,
/// ordered by their smallest row.
fn components(m: &FpMatrix) -> Vec<Block> {
    let rows = m.sparse_rows();
    let r = m.rows();
    let mut uf = UnionFind::new(r + m.cols());
    for (i, row) in rows.iter().enumerate() {
        for &(c, _) in row {
            uf.union(i as u32, r as u32 + c);
        }
    }
    let mut block_of: HashMap<u32, usize> = HashMap::new();
    let mut row_sets: Vec<Vec<usize>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if row.is_empty() {
            continue;
        }
        let root = uf.find(i as u32);
        let b = *block_of.entry(root).or_insert_with(|| {
            row_sets.push(Vec::new());
            row_sets.len() - 1
        });
        row_sets[b].push(i);
    }
    row_sets
        .into_iter()
        .map(|members| {
            let mut col_local: HashMap<u32, u32> = HashMap::new();
            let mut cols: Vec<u32> = members
                .iter()
                .flat_map(|&i| rows[i].iter().map(|&(c, _)| c))
                .collect();
            cols.sort_unstable();
            cols.dedup();
            for (k, &c) in cols.iter().enumerate() {
                col_local.insert(c, k as u32);
            }
            let entries = members
                .iter()
                .map(|&i| rows[i].iter().map(|&(c, v)| (col_local[&c], v)).collect())
                .collect();
            Block {
                rows: members.len(),
                cols: cols.len(),
                entries,
            }
        })
        .collect()
}

/// Row-echelon rank of a dense row-major matrix.
fn dense_rank(field: FieldSpec, mut rows: Vec<Vec<u32>>, ncols: usize) -> usize {
    let nrows = rows.len();
    let mut rank = 0;
    for c in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(piv) = (rank..nrows).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let (top, rest) = rows.split_at_mut(rank + 1);
        let pivot = &mut top[rank];
        let inv = field.inv(pivot[c]);
        for v in pivot[c..].iter_mut() {
            *v = field.mul(*v, inv);
        }
        for row in rest.iter_mut() {
            let a = row[c];
            if a == 0 {
                continue;
            }
            for (x, &y) in row[c..].iter_mut().zip(&pivot[c..]) {
                if y != 0 {
                    *x = field.sub(*x, field.mul(a, y));
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rows and columns examined per pivot search.
const MARKOWITZ_CANDIDATES: usize = 4;

/// Sparse Gaussian elimination with Markowitz pivot selection.
///
/// Pivot minimizes `(r_i - 1)(c_j - 1)` among the entries of the few
/// shortest rows and columns; ties go to the shorter row, then the lower
/// row index, then the lower column index.
fn sparse_rank(
    field: FieldSpec,
    ncols: usize,
    mut rows: Vec<Vec<(u32, u32)>>,
    fill_cap: usize,
) -> Result<usize> {
    let nrows = rows.len();
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); ncols];
    let mut col_count = vec![0u32; ncols];
    let mut nnz = 0usize;
    for (i, row) in rows.iter().enumerate() {
        for &(c, _) in row {
            col_rows[c as usize].push(i as u32);
            col_count[c as usize] += 1;
        }
        nnz += row.len();
    }
    let mut row_alive = vec![true; nrows];
    let mut row_set: BTreeSet<(u32, u32)> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.is_empty())
        .map(|(i, r)| (r.len() as u32, i as u32))
        .collect();
    let mut col_set: BTreeSet<(u32, u32)> = col_count
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(c, &n)| (n, c as u32))
        .collect();

    fn contains(row: &[(u32, u32)], c: u32) -> Option<usize> {
        row.binary_search_by_key(&c, |&(k, _)| k).ok()
    }

    let set_count =
        |col_set: &mut BTreeSet<(u32, u32)>, col_count: &mut [u32], c: u32, new: u32| {
            let old = col_count[c as usize];
            if old == new {
                return;
            }
            if old > 0 {
                col_set.remove(&(old, c));
            }
            if new > 0 {
                col_set.insert((new, c));
            }
            col_count[c as usize] = new;
        };

    let mut rank = 0usize;
    let mut merged: Vec<(u32, u32)> = Vec::new();
    loop {
        // pivot search
        let mut best: Option<(u64, u32, u32, u32)> = None;
        let consider =
            |best: &mut Option<(u64, u32, u32, u32)>, len: u32, r: u32, c: u32, cnt: u32| {
                let cost = (len as u64 - 1) * (cnt as u64 - 1);
                let key = (cost, len, r, c);
                if best.is_none_or(|b| key < b) {
                    *best = Some(key);
                }
            };
        for &(len, r) in row_set.iter().take(MARKOWITZ_CANDIDATES) {
            for &(c, _) in &rows[r as usize] {
                consider(&mut best, len, r, c, col_count[c as usize]);
            }
        }
        for &(cnt, c) in col_set.iter().take(MARKOWITZ_CANDIDATES) {
            for &r in &col_rows[c as usize] {
                if row_alive[r as usize] && contains(&rows[r as usize], c).is_some() {
                    consider(&mut best, rows[r as usize].len() as u32, r, c, cnt);
                }
            }
        }
        let Some((_, len, pr, pc)) = best else { break };

        // retire the pivot row
        row_set.remove(&(len, pr));
        row_alive[pr as usize] = false;
        let pivot_row = std::mem::take(&mut rows[pr as usize]);
        nnz -= pivot_row.len();
        for &(k, _) in &pivot_row {
            let n = col_count[k as usize] - 1;
            set_count(&mut col_set, &mut col_count, k, n);
        }
        let pv = pivot_row[contains(&pivot_row, pc).expect("pivot entry")].1;
        let inv = field.inv(pv);

        let mut targets: Vec<u32> = std::mem::take(&mut col_rows[pc as usize])
            .into_iter()
            .filter(|&i| row_alive[i as usize] && contains(&rows[i as usize], pc).is_some())
            .collect();
        targets.sort_unstable();
        targets.dedup();

        for i in targets {
            let row = std::mem::take(&mut rows[i as usize]);
            let old_len = row.len() as u32;
            let a = row[contains(&row, pc).unwrap()].1;
            let factor = field.mul(a, inv);
            merged.clear();
            let (mut x, mut y) = (0, 0);
            while x < row.len() || y < pivot_row.len() {
                let kx = row.get(x).map_or(u32::MAX, |e| e.0);
                let ky = pivot_row.get(y).map_or(u32::MAX, |e| e.0);
                if kx < ky {
                    merged.push(row[x]);
                    x += 1;
                } else if ky < kx {
                    // fill-in
                    let v = field.neg(field.mul(factor, pivot_row[y].1));
                    merged.push((ky, v));
                    let n = col_count[ky as usize] + 1;
                    set_count(&mut col_set, &mut col_count, ky, n);
                    col_rows[ky as usize].push(i);
                    y += 1;
                } else {
                    let v = field.sub(row[x].1, field.mul(factor, pivot_row[y].1));
                    if v != 0 {
                        merged.push((kx, v));
                    } else {
                        let n = col_count[kx as usize] - 1;
                        set_count(&mut col_set, &mut col_count, kx, n);
                    }
                    x += 1;
                    y += 1;
                }
            }
            let new_len = merged.len() as u32;
            nnz = nnz + merged.len() - row.len();
            rows[i as usize] = merged.clone();
            row_set.remove(&(old_len, i));
            if new_len > 0 {
                row_set.insert((new_len, i));
            }
        }
        debug_assert_eq!(col_count[pc as usize], 0);
        rank += 1;
        if nnz > fill_cap {
            return Err(Error::cap("elimination fill-in", fill_cap as u64));
        }
    }
    Ok(rank)
}

/// Strategy for the rank of multiplication by `g^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerStrategy {
    /// Pick by the size of `g^k mod m^[q]`.
    Auto,
    /// Rank of the operator of the truncated power.
    Direct,
    /// Image of the whole space under `k` applications of the operator of `g`.
    Iterated,
}

/// Rank of multiplication by `g^k` on S/m^[q].
pub fn rank_of_power(
    g: &SparsePolynomial,
    k: u64,
    space: &BracketSpace,
    limits: &Limits,
) -> Result<usize> {
    rank_of_power_with(g, k, space, PowerStrategy::Auto, limits)
}

pub fn rank_of_power_with(
    g: &SparsePolynomial,
    k: u64,
    space: &BracketSpace,
    strategy: PowerStrategy,
    limits: &Limits,
) -> Result<usize> {
    let g = space.bracket_reduce(g)?;
    if k == 0 {
        return Ok(space.dim());
    }
    let direct = |power: &SparsePolynomial| -> Result<usize> {
        let op = space.mult_operator(power, limits)?;
        rank_fp(&op, limits)
    };
    match strategy {
        PowerStrategy::Direct => direct(&g.truncated_pow(k, space.q(), limits)?),
        PowerStrategy::Iterated => iterated_image_rank(&g, k, space, limits),
        PowerStrategy::Auto => {
            let power = g.truncated_pow(k, space.q(), limits)?;
            let terms = power.num_terms();
            let nnz = terms as u128 * space.dim() as u128;
            if terms > (space.dim() / 4).max(1) || nnz > limits.term_cap as u128 {
                iterated_image_rank(&g, k, space, limits)
            } else {
                direct(&power)
            }
        }
    }
}

/// `dim(A^k V)` computed by pushing an echelon basis through `A` `k` times,
/// one invariant block of `A` at a time.
fn iterated_image_rank(
    g: &SparsePolynomial,
    k: u64,
    space: &BracketSpace,
    limits: &Limits,
) -> Result<usize> {
    let field = space.field();
    let op = space.mult_operator(g, limits)?;
    let dim = space.dim();
    let columns: Vec<Vec<(u32, u32)>> = (0..dim).map(|j| op.column(j)).collect();

    // A is block diagonal over the components of the graph i ~ j when A[i][j] != 0
    let mut uf = UnionFind::new(dim);
    for (j, col) in columns.iter().enumerate() {
        for &(i, _) in col {
            uf.union(i, j as u32);
        }
    }
    let mut blocks: Vec<Vec<u32>> = Vec::new();
    let mut block_of: HashMap<u32, usize> = HashMap::new();
    for j in 0..dim as u32 {
        let root = uf.find(j);
        let b = *block_of.entry(root).or_insert_with(|| {
            blocks.push(Vec::new());
            blocks.len() - 1
        });
        blocks[b].push(j);
    }

    let ranks: Result<Vec<usize>> = blocks
        .par_iter()
        .map(|members| {
            let local: HashMap<u32, u32> = members
                .iter()
                .enumerate()
                .map(|(l, &g)| (g, l as u32))
                .collect();
            let cols: Vec<Vec<(u32, u32)>> = members
                .iter()
                .map(|&j| {
                    let mut c: Vec<(u32, u32)> = columns[j as usize]
                        .iter()
                        .map(|&(i, v)| (local[&i], v))
                        .collect();
                    c.sort_unstable();
                    c
                })
                .collect();
            let size = members.len();
            // image of the whole block under A is spanned by its columns
            let mut basis = echelon(field, cols.clone());
            let mut steps = 1;
            let mut scratch = vec![0u32; size];
            while steps < k && !basis.is_empty() {
                let images = basis
                    .iter()
                    .map(|v| apply_sparse(field, &cols, v, &mut scratch))
                    .collect();
                let next = echelon(field, images);
                let stable = next.len() == basis.len();
                basis = next;
                steps += 1;
                if stable {
                    break;
                }
                let stored: usize = basis.iter().map(Vec::len).sum();
                if stored > limits.term_cap {
                    return Err(Error::cap("image basis nonzeros", limits.term_cap as u64));
                }
            }
            Ok(basis.len())
        })
        .collect();
    Ok(ranks?.into_iter().sum())
}

fn apply_sparse(
    field: FieldSpec,
    cols: &[Vec<(u32, u32)>],
    v: &[(u32, u32)],
    scratch: &mut [u32],
) -> Vec<(u32, u32)> {
    let mut touched = Vec::new();
    for &(j, a) in v {
        for &(i, b) in &cols[j as usize] {
            let slot = &mut scratch[i as usize];
            if *slot == 0 {
                touched.push(i);
            }
            *slot = field.add(*slot, field.mul(a, b));
        }
    }
    touched.sort_unstable();
    touched.dedup();
    touched
        .into_iter()
        .filter_map(|i| {
            let v = std::mem::take(&mut scratch[i as usize]);
            (v != 0).then_some((i, v))
        })
        .collect()
}

/// Reduces vectors to a basis with distinct leading indices, leading coefficient 1.
fn echelon(field: FieldSpec, vectors: Vec<Vec<(u32, u32)>>) -> Vec<Vec<(u32, u32)>> {
    let mut pivots: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
    let mut order = Vec::new();
    for mut v in vectors {
        while let Some(&(lead, a)) = v.first() {
            match pivots.get(&lead) {
                Some(p) => v = axpy(field, &v, field.neg(a), p),
                None => {
                    let inv = field.inv(a);
                    for e in v.iter_mut() {
                        e.1 = field.mul(e.1, inv);
                    }
                    order.push(lead);
                    pivots.insert(lead, v);
                    break;
                }
            }
        }
    }
    order.sort_unstable();
    order
        .into_iter()
        .map(|l| pivots.remove(&l).unwrap())
        .collect()
}

/// `x + s * y` for sorted sparse vectors.
fn axpy(field: FieldSpec, x: &[(u32, u32)], s: u32, y: &[(u32, u32)]) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let kx = x.get(i).map_or(u32::MAX, |e| e.0);
        let ky = y.get(j).map_or(u32::MAX, |e| e.0);
        if kx < ky {
            out.push(x[i]);
            i += 1;
        } else if ky < kx {
            out.push((ky, field.mul(s, y[j].1)));
            j += 1;
        } else {
            let v = field.add(x[i].1, field.mul(s, y[j].1));
            if v != 0 {
                out.push((kx, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}
