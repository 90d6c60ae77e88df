//! Sparse matrices with exact entries, column-major.

use crate::scalar::{Ring, RingKind, Scalar, ScalarError};
use std::collections::BTreeMap;

/// Sparse vector: sorted `(index, scalar)` pairs, scalars nonzero canonical.
pub type SparseVec = Vec<(u32, Scalar)>;

pub fn sv_add(ring: &Ring, a: &SparseVec, b: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            out.push(b[j].clone());
            j += 1;
        } else {
            let s = ring.add(&a[i].1, &b[j].1);
            if !ring.is_zero(&s) {
                out.push((a[i].0, s));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn sv_scale(ring: &Ring, c: &Scalar, a: &SparseVec) -> SparseVec {
    if ring.is_zero(c) {
        return Vec::new();
    }
    a.iter()
        .filter_map(|(i, s)| {
            let v = ring.mul(c, s);
            if ring.is_zero(&v) {
                None
            } else {
                Some((*i, v))
            }
        })
        .collect()
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    /// column -> sorted (row, scalar)
    pub columns: Vec<SparseVec>,
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    Dims(String),
    #[error("operation unsupported over ring {0:?}")]
    UnsupportedRing(RingKind),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize, ring: &Ring) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.columns[i].push((i as u32, ring.one()));
        }
        m
    }

    pub fn from_entries(
        rows: usize,
        cols: usize,
        ring: &Ring,
        entries: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Self {
        let mut acc: Vec<BTreeMap<u32, Scalar>> = vec![BTreeMap::new(); cols];
        for (r, c, s) in entries {
            assert!(r < rows && c < cols, "entry ({r},{c}) out of {rows}x{cols}");
            let s = ring.canon(s);
            if ring.is_zero(&s) {
                continue;
            }
            let cell = acc[c].entry(r as u32).or_insert_with(|| ring.zero());
            *cell = ring.add(cell, &s);
        }
        let columns = acc
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, s)| !ring.is_zero(s)).collect())
            .collect();
        SparseMatrix { rows, cols, columns }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    pub fn entry(&self, r: usize, c: usize, ring: &Ring) -> Scalar {
        self.columns[c]
            .iter()
            .find(|(i, _)| *i == r as u32)
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| ring.zero())
    }

    pub fn transpose(&self, _ring: &Ring) -> SparseMatrix {
        let mut cols: Vec<SparseVec> = vec![Vec::new(); self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for (r, s) in col {
                cols[*r as usize].push((c as u32, s.clone()));
            }
        }
        SparseMatrix { rows: self.cols, cols: self.rows, columns: cols }
    }

    pub fn add(&self, other: &SparseMatrix, ring: &Ring) -> Result<SparseMatrix, MatrixError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::Dims(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| sv_add(ring, a, b))
            .collect();
        Ok(SparseMatrix { rows: self.rows, cols: self.cols, columns })
    }

    pub fn scale(&self, c: &Scalar, ring: &Ring) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            columns: self.columns.iter().map(|col| sv_scale(ring, c, col)).collect(),
        }
    }

    pub fn neg(&self, ring: &Ring) -> SparseMatrix {
        self.scale(&ring.neg(&ring.one()), ring)
    }

    /// `self * other`, with a dense accumulator per column.
    pub fn mul(&self, other: &SparseMatrix, ring: &Ring) -> Result<SparseMatrix, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::Dims(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut dense: Vec<Scalar> = vec![ring.zero(); self.rows];
        let mut touched: Vec<u32> = Vec::new();
        let mut columns = Vec::with_capacity(other.cols);
        for bcol in &other.columns {
            for (k, coeff) in bcol {
                for (r, s) in &self.columns[*k as usize] {
                    let prev = &dense[*r as usize];
                    let was_zero = ring.is_zero(prev);
                    let v = ring.add(prev, &ring.mul(coeff, s));
                    if was_zero && !ring.is_zero(&v) {
                        touched.push(*r);
                    }
                    dense[*r as usize] = v;
                }
            }
            touched.sort_unstable();
            let mut col: SparseVec = Vec::with_capacity(touched.len());
            for &r in &touched {
                let v = std::mem::replace(&mut dense[r as usize], ring.zero());
                if !ring.is_zero(&v) {
                    col.push((r, v));
                }
            }
            col.dedup_by(|a, b| a.0 == b.0);
            touched.clear();
            columns.push(col);
        }
        Ok(SparseMatrix { rows: self.rows, cols: other.cols, columns })
    }

    pub fn apply(&self, v: &SparseVec, ring: &Ring) -> SparseVec {
        let mut acc: BTreeMap<u32, Scalar> = BTreeMap::new();
        for (c, coeff) in v {
            for (r, s) in &self.columns[*c as usize] {
                let cell = acc.entry(*r).or_insert_with(|| ring.zero());
                *cell = ring.add(cell, &ring.mul(coeff, s));
            }
        }
        acc.into_iter().filter(|(_, s)| !ring.is_zero(s)).collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.rows, other.rows);
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        SparseMatrix { rows: self.rows, cols: self.cols + other.cols, columns }
    }

    pub fn to_dense(&self, ring: &Ring) -> Vec<Vec<Scalar>> {
        let mut d = vec![vec![ring.zero(); self.cols]; self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for (r, s) in col {
                d[*r as usize][c] = s.clone();
            }
        }
        d
    }
}

/// Row-echelon data over a field: reduced rows keyed by pivot column.
struct Echelon {
    /// (pivot column, row as sparse vec over columns)
    rows: Vec<(u32, SparseVec)>,
}

fn echelon(mat: &SparseMatrix, ring: &Ring) -> Echelon {
    assert!(ring.is_field());
    let rowmajor = mat.transpose(ring);
    let mut rows: Vec<(u32, SparseVec)> = Vec::new();
    // index pivot column -> position in rows
    let mut pivot_at: std::collections::HashMap<u32, usize> = std::collections::HashMap::new();
    for r in 0..rowmajor.cols {
        let mut v: SparseVec = rowmajor.columns[r].clone();
        while let Some((col, coeff)) = v.first().cloned() {
            let Some(&pos) = pivot_at.get(&col) else { break };
            let c = ring.neg(&coeff);
            v = sv_add(ring, &v, &sv_scale(ring, &c, &rows[pos].1));
        }
        if v.is_empty() {
            continue;
        }
        let pivot = v[0].0;
        let inv = ring.inv(&v[0].1).expect("field element invertible");
        pivot_at.insert(pivot, rows.len());
        rows.push((pivot, sv_scale(ring, &inv, &v)));
    }
    Echelon { rows }
}

/// Rank over a field; over the integers, the rank over Q.
pub fn rank(mat: &SparseMatrix, ring: &Ring) -> usize {
    let field = if ring.is_field() { *ring } else { Ring::rationals() };
    let m = if ring.is_field() {
        mat.clone()
    } else {
        // reinterpret integer entries as rationals
        SparseMatrix {
            rows: mat.rows,
            cols: mat.cols,
            columns: mat
                .columns
                .iter()
                .map(|col| col.iter().map(|(r, s)| (*r, field.canon(s.clone()))).collect())
                .collect(),
        }
    };
    echelon(&m, &field).rows.len()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    /// A solution vector, indexed by columns of `A`.
    Found(SparseVec),
    /// No solution; over a field the certificate is a left null vector `y`
    /// with `yA = 0` and `y.b != 0`. Over Z it may be a divisibility
    /// obstruction instead.
    Infeasible(Certificate),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    LeftNull(SparseVec),
    /// Invariant factor `d` at position `i` fails to divide the transformed
    /// right-hand side entry `v`.
    Divisibility { index: usize, factor: Scalar, value: Scalar },
}

/// Solve `A x = b`; see `Solution`.
pub fn solve_linear(a: &SparseMatrix, b: &SparseVec, ring: &Ring) -> Result<Solution, MatrixError> {
    if let Some((i, _)) = b.iter().find(|(i, _)| *i as usize >= a.rows) {
        return Err(MatrixError::Dims(format!("rhs index {i} out of {} rows", a.rows)));
    }
    match ring.kind {
        RingKind::Integers => solve_over_z(a, b, ring),
        _ => solve_over_field(a, b, ring),
    }
}

/// Column elimination state: reduced columns with distinct pivot rows, each
/// carrying its expression in the original columns.
pub struct ColSpace {
    /// (pivot row, reduced column, expression over original column indices)
    pub cols: Vec<(u32, SparseVec, SparseVec)>,
    pivot_at: std::collections::HashMap<u32, usize>,
    track_exprs: bool,
}

impl ColSpace {
    pub fn new() -> Self {
        ColSpace { cols: Vec::new(), pivot_at: Default::default(), track_exprs: true }
    }

    /// Like `new` but without expression tracking (rank-only use).
    pub fn new_untracked() -> Self {
        ColSpace { cols: Vec::new(), pivot_at: Default::default(), track_exprs: false }
    }

    pub fn rank(&self) -> usize {
        self.cols.len()
    }

    /// Reduce `v` against the span; returns the residual and the combination
    /// of inserted columns used (by their tags).
    pub fn reduce(&self, ring: &Ring, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut res = v.clone();
        let mut used: SparseVec = Vec::new();
        while let Some((head, coeff)) = res.first().cloned() {
            let Some(&pos) = self.pivot_at.get(&head) else {
                break;
            };
            let (_, pc, pe) = &self.cols[pos];
            let c = ring.neg(&coeff);
            res = sv_add(ring, &res, &sv_scale(ring, &c, pc));
            if self.track_exprs {
                used = sv_add(ring, &used, &sv_scale(ring, &coeff, pe));
            }
        }
        (res, used)
    }

    /// Insert column `v` labelled `tag`; returns false if it reduced to zero.
    pub fn insert(&mut self, ring: &Ring, v: &SparseVec, tag: u32) -> bool {
        let (res, mut used) = self.reduce(ring, v);
        if res.is_empty() {
            return false;
        }
        let inv = ring.inv(&res[0].1).expect("field element invertible");
        let expr = if self.track_exprs {
            used = sv_scale(ring, &ring.neg(&ring.one()), &used);
            used = sv_add(ring, &used, &vec![(tag, ring.one())]);
            sv_scale(ring, &inv, &used)
        } else {
            Vec::new()
        };
        self.pivot_at.insert(res[0].0, self.cols.len());
        self.cols.push((res[0].0, sv_scale(ring, &inv, &res), expr));
        true
    }
}

fn solve_over_field(a: &SparseMatrix, b: &SparseVec, ring: &Ring) -> Result<Solution, MatrixError> {
    let mut space = ColSpace::new();
    for c in 0..a.cols {
        space.insert(ring, &a.columns[c], c as u32);
    }
    let (res, x) = space.reduce(ring, b);
    if res.is_empty() {
        return Ok(Solution::Found(x));
    }
    // Inconsistent. Row-reduce [A | I]; a row with pivot in the identity part
    // is a left null vector of A, and one of them must separate b.
    let ai = a.hcat(&SparseMatrix::identity(a.rows, ring));
    let ech = echelon(&ai, ring);
    for (pivot, row) in &ech.rows {
        if (*pivot as usize) >= a.cols {
            let y: SparseVec = row
                .iter()
                .filter(|(c, _)| (*c as usize) >= a.cols)
                .map(|(c, s)| (c - a.cols as u32, s.clone()))
                .collect();
            let dot = y
                .iter()
                .filter_map(|(i, s)| b.iter().find(|(j, _)| j == i).map(|(_, t)| ring.mul(s, t)))
                .fold(ring.zero(), |acc, v| ring.add(&acc, &v));
            if !ring.is_zero(&dot) {
                return Ok(Solution::Infeasible(Certificate::LeftNull(y)));
            }
        }
    }
    unreachable!("inconsistent system must admit a separating left null vector")
}

fn solve_over_z(a: &SparseMatrix, b: &SparseVec, ring: &Ring) -> Result<Solution, MatrixError> {
    use crate::snf;
    let dec = snf::smith_normal_form(a, ring)?;
    // A = U^{-1} D V^{-1}; solve D z = U b, x = V z.
    let ub = dec.u.apply(b, ring);
    let mut z: SparseVec = Vec::new();
    let r = dec.rank;
    for (i, s) in &ub {
        let i = *i as usize;
        if i < r {
            let d = dec.diag[i].clone();
            match ring.div_exact(s, &d) {
                Some(q) => z.push((i as u32, q)),
                None => {
                    return Ok(Solution::Infeasible(Certificate::Divisibility {
                        index: i,
                        factor: d,
                        value: s.clone(),
                    }))
                }
            }
        } else {
            // row beyond the rank: U b must vanish there; row i of U is a
            // left null vector of A separating b.
            let urow: SparseVec = {
                let ut = dec.u.transpose(ring);
                ut.columns[i].clone()
            };
            return Ok(Solution::Infeasible(Certificate::LeftNull(urow)));
        }
    }
    Ok(Solution::Found(dec.v.apply(&z, ring)))
}

/// Verify a certificate against the system.
pub fn check_certificate(
    a: &SparseMatrix,
    b: &SparseVec,
    cert: &Certificate,
    ring: &Ring,
) -> bool {
    match cert {
        Certificate::LeftNull(y) => {
            // yA = 0 and y.b != 0
            let at = a.transpose(ring);
            let ya = at.apply(y, ring);
            let dot = y
                .iter()
                .filter_map(|(i, s)| b.iter().find(|(j, _)| j == i).map(|(_, t)| ring.mul(s, t)))
                .fold(ring.zero(), |acc, v| ring.add(&acc, &v));
            ya.is_empty() && !ring.is_zero(&dot)
        }
        Certificate::Divisibility { factor, value, .. } => {
            ring.div_exact(value, factor).is_none()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(ring: &Ring, rows: usize, cols: usize, data: &[i64]) -> SparseMatrix {
        SparseMatrix::from_entries(
            rows,
            cols,
            ring,
            data.iter().enumerate().map(|(k, &v)| (k / cols, k % cols, Scalar::Int(v))),
        )
    }

    #[test]
    fn rank_examples() {
        let q = Ring::rationals();
        assert_eq!(rank(&SparseMatrix::zero(3, 4), &q), 0);
        assert_eq!(rank(&SparseMatrix::identity(5, &q), &q), 5);
        // [[1,2],[2,4]] has rank 1 (row reduce by hand)
        let z = Ring::integers();
        assert_eq!(rank(&m(&z, 2, 2, &[1, 2, 2, 4]), &z), 1);
    }

    #[test]
    fn solve_trivial() {
        let q = Ring::rationals();
        let a = SparseMatrix::zero(2, 2);
        assert_eq!(solve_linear(&a, &vec![], &q).unwrap(), Solution::Found(vec![]));
        let a1 = m(&q, 1, 1, &[1]);
        let b = vec![(0u32, q.from_i64(5))];
        match solve_linear(&a1, &b, &q).unwrap() {
            Solution::Found(x) => assert_eq!(x, vec![(0u32, q.from_i64(5))]),
            _ => panic!(),
        }
    }

    #[test]
    fn solve_mod2_exhaustive_oracle() {
        // A = [[1,1]], b = [1] over Z/2: solutions among 4 candidates are
        // exactly (1,0) and (0,1).
        let f2 = Ring::prime_field(2).unwrap();
        let a = m(&f2, 1, 2, &[1, 1]);
        let b = vec![(0u32, f2.one())];
        let mut oracle = Vec::new();
        for x0 in 0..2i64 {
            for x1 in 0..2i64 {
                if (x0 + x1) % 2 == 1 {
                    oracle.push((x0, x1));
                }
            }
        }
        assert_eq!(oracle, vec![(0, 1), (1, 0)]);
        match solve_linear(&a, &b, &f2).unwrap() {
            Solution::Found(x) => {
                let x0 = x.iter().find(|(i, _)| *i == 0).map(|_| 1).unwrap_or(0);
                let x1 = x.iter().find(|(i, _)| *i == 1).map(|_| 1).unwrap_or(0);
                assert!(oracle.contains(&(x0, x1)));
            }
            _ => panic!("system is solvable"),
        }
    }

    #[test]
    fn infeasible_with_certificate() {
        let q = Ring::rationals();
        // x + y = 1, x + y = 2
        let a = m(&q, 2, 2, &[1, 1, 1, 1]);
        let b = vec![(0u32, q.one()), (1u32, q.from_i64(2))];
        match solve_linear(&a, &b, &q).unwrap() {
            Solution::Infeasible(cert) => assert!(check_certificate(&a, &b, &cert, &q)),
            _ => panic!("should be infeasible"),
        }
    }

    #[test]
    fn infeasible_over_z_divisibility() {
        let z = Ring::integers();
        let a = m(&z, 1, 1, &[2]);
        let b = vec![(0u32, z.one())];
        match solve_linear(&a, &b, &z).unwrap() {
            Solution::Infeasible(_) => {}
            _ => panic!("2x = 1 unsolvable over Z"),
        }
        let b2 = vec![(0u32, z.from_i64(6))];
        match solve_linear(&a, &b2, &z).unwrap() {
            Solution::Found(x) => assert_eq!(x, vec![(0u32, z.from_i64(3))]),
            _ => panic!(),
        }
    }

    #[test]
    fn mul_and_apply_agree() {
        let z = Ring::integers();
        let a = m(&z, 2, 3, &[1, 2, 0, 0, -1, 3]);
        let b = m(&z, 3, 2, &[1, 0, 2, 1, 0, 4]);
        let ab = a.mul(&b, &z).unwrap();
        for c in 0..2 {
            let via_apply = a.apply(&b.columns[c], &z);
            assert_eq!(ab.columns[c], via_apply);
        }
    }
}
