//! Connective chain complexes of finitely generated free modules.

use crate::label::Label;
use crate::matrix::{rank, MatrixError, SparseMatrix, SparseVec};
use crate::perm::{cross_sign, Deg};
use crate::scalar::{Ring, RingKind, Scalar};
use crate::snf;
use std::collections::HashMap;
use std::sync::Arc;

#[derive(thiserror::Error, Debug)]
pub enum ChainError {
    #[error("ring mismatch: {0:?} vs {1:?}")]
    RingMismatch(RingKind, RingKind),
    #[error("d о d != 0 at degree {degree}, basis column {column}")]
    NotAComplex { degree: Deg, column: usize },
    #[error("differential at degree {0} has wrong shape")]
    BadShape(Deg),
    #[error("duplicate basis label {0} in degree {1}")]
    DuplicateLabel(Label, Deg),
    #[error("chain map fails d f = (-1)^k f d at degree {0}")]
    NotAChainMap(Deg),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// A connective chain complex with a chosen basis in every degree.
/// Degrees below `lower` and above `upper` are zero.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub ring: Ring,
    pub lower: Deg,
    /// bases\[i\] is the basis of degree `lower + i`.
    pub bases: Vec<Vec<Label>>,
    /// diffs\[i\]: degree `lower+i` -> degree `lower+i-1`.
    pub diffs: Vec<SparseMatrix>,
    index: Vec<HashMap<Label, u32>>,
}

impl ChainComplex {
    pub fn new(
        ring: Ring,
        lower: Deg,
        bases: Vec<Vec<Label>>,
        diffs: Vec<SparseMatrix>,
    ) -> Result<Arc<Self>, ChainError> {
        let mut index = Vec::with_capacity(bases.len());
        for (i, basis) in bases.iter().enumerate() {
            let mut m = HashMap::with_capacity(basis.len());
            for (j, l) in basis.iter().enumerate() {
                if m.insert(l.clone(), j as u32).is_some() {
                    return Err(ChainError::DuplicateLabel(l.clone(), lower + i as Deg));
                }
            }
            index.push(m);
        }
        let c = ChainComplex { ring, lower, bases, diffs, index };
        c.validate()?;
        Ok(Arc::new(c))
    }

    /// The zero complex.
    pub fn zero(ring: Ring) -> Arc<Self> {
        Self::new(ring, 0, vec![], vec![]).unwrap()
    }

    /// Free rank-one complex concentrated in one degree.
    pub fn generator(ring: Ring, label: Label, degree: Deg) -> Arc<Self> {
        Self::new(ring, degree, vec![vec![label]], vec![SparseMatrix::zero(0, 1)]).unwrap()
    }

    pub fn upper(&self) -> Deg {
        self.lower + self.bases.len() as Deg - 1
    }

    pub fn degrees(&self) -> impl Iterator<Item = Deg> + '_ {
        (0..self.bases.len()).map(move |i| self.lower + i as Deg)
    }

    pub fn basis(&self, degree: Deg) -> &[Label] {
        let i = degree - self.lower;
        if i < 0 || i as usize >= self.bases.len() {
            &[]
        } else {
            &self.bases[i as usize]
        }
    }

    pub fn dim(&self, degree: Deg) -> usize {
        self.basis(degree).len()
    }

    pub fn total_dim(&self) -> usize {
        self.bases.iter().map(|b| b.len()).sum()
    }

    pub fn index_of(&self, degree: Deg, label: &Label) -> Option<u32> {
        let i = degree - self.lower;
        if i < 0 || i as usize >= self.index.len() {
            return None;
        }
        self.index[i as usize].get(label).copied()
    }

    /// Differential out of `degree`; zero matrix when out of range.
    pub fn diff(&self, degree: Deg) -> SparseMatrix {
        let i = degree - self.lower;
        if i < 0 || i as usize >= self.diffs.len() {
            SparseMatrix::zero(self.dim(degree - 1), self.dim(degree))
        } else {
            self.diffs[i as usize].clone()
        }
    }

    fn validate(&self) -> Result<(), ChainError> {
        if self.diffs.len() != self.bases.len() {
            return Err(ChainError::BadShape(self.lower));
        }
        for (i, d) in self.diffs.iter().enumerate() {
            let tgt = if i == 0 { 0 } else { self.bases[i - 1].len() };
            if d.rows != tgt || d.cols != self.bases[i].len() {
                return Err(ChainError::BadShape(self.lower + i as Deg));
            }
        }
        for i in 1..self.diffs.len() {
            let dd = self.diffs[i - 1].mul(&self.diffs[i], &self.ring)?;
            if let Some(col) = dd.columns.iter().position(|c| !c.is_empty()) {
                return Err(ChainError::NotAComplex {
                    degree: self.lower + i as Deg,
                    column: col,
                });
            }
        }
        Ok(())
    }

    /// Apply the differential to a sparse element of the given degree.
    pub fn d(&self, degree: Deg, v: &SparseVec) -> SparseVec {
        self.diff(degree).apply(v, &self.ring)
    }
}

/// A degree-`shift` map of complexes, one matrix per source degree.
/// The chain condition is `d_target f = (-1)^shift f d_source`.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: Arc<ChainComplex>,
    pub target: Arc<ChainComplex>,
    pub shift: Deg,
    /// mats\[i\]: source degree `source.lower + i` -> target degree `+ shift`.
    pub mats: Vec<SparseMatrix>,
}

impl ChainMap {
    pub fn new(
        source: Arc<ChainComplex>,
        target: Arc<ChainComplex>,
        shift: Deg,
        mats: Vec<SparseMatrix>,
    ) -> Result<Self, ChainError> {
        let f = ChainMap { source, target, shift, mats };
        f.validate()?;
        Ok(f)
    }

    /// Build from a function on basis labels.
    pub fn from_fn(
        source: Arc<ChainComplex>,
        target: Arc<ChainComplex>,
        shift: Deg,
        mut f: impl FnMut(Deg, &Label) -> Vec<(Label, Scalar)>,
    ) -> Result<Self, ChainError> {
        let ring = source.ring;
        let mut mats = Vec::with_capacity(source.bases.len());
        for d in source.degrees() {
            let td = d + shift;
            let mut entries = Vec::new();
            for (j, l) in source.basis(d).iter().enumerate() {
                for (tl, s) in f(d, l) {
                    let r = target.index_of(td, &tl).unwrap_or_else(|| {
                        panic!("image label {tl} not in target degree {td}")
                    });
                    entries.push((r as usize, j, s));
                }
            }
            mats.push(SparseMatrix::from_entries(
                target.dim(td),
                source.dim(d),
                &ring,
                entries,
            ));
        }
        ChainMap::new(source, target, shift, mats)
    }

    /// Construct without validating the chain-map condition; for maps that
    /// are not chain maps for the full differential (simplicial operators).
    pub fn new_unchecked(
        source: Arc<ChainComplex>,
        target: Arc<ChainComplex>,
        shift: Deg,
        mats: Vec<SparseMatrix>,
    ) -> Self {
        ChainMap { source, target, shift, mats }
    }

    pub fn identity(c: &Arc<ChainComplex>) -> Self {
        let mats = c.degrees().map(|d| SparseMatrix::identity(c.dim(d), &c.ring)).collect();
        ChainMap { source: c.clone(), target: c.clone(), shift: 0, mats }
    }

    pub fn zero(source: Arc<ChainComplex>, target: Arc<ChainComplex>, shift: Deg) -> Self {
        let mats = source
            .degrees()
            .map(|d| SparseMatrix::zero(target.dim(d + shift), source.dim(d)))
            .collect();
        ChainMap { source, target, shift, mats }
    }

    pub fn mat(&self, degree: Deg) -> SparseMatrix {
        let i = degree - self.source.lower;
        if i < 0 || i as usize >= self.mats.len() {
            SparseMatrix::zero(self.target.dim(degree + self.shift), self.source.dim(degree))
        } else {
            self.mats[i as usize].clone()
        }
    }

    pub fn apply(&self, degree: Deg, v: &SparseVec) -> SparseVec {
        self.mat(degree).apply(v, &self.source.ring)
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        let ring = self.source.ring;
        for (i, m) in self.mats.iter().enumerate() {
            let d = self.source.lower + i as Deg;
            if m.rows != self.target.dim(d + self.shift) || m.cols != self.source.dim(d) {
                return Err(ChainError::BadShape(d));
            }
        }
        for d in self.source.degrees() {
            let lhs = self.target.diff(d + self.shift).mul(&self.mat(d), &ring)?;
            let mut rhs = self.mat(d - 1).mul(&self.source.diff(d), &ring)?;
            if cross_sign(self.shift, 1) < 0 {
                rhs = rhs.neg(&ring);
            }
            if lhs != rhs {
                return Err(ChainError::NotAChainMap(d));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.mats.iter().all(|m| m.is_zero())
    }

    /// `other` then `self`.
    pub fn compose(&self, other: &ChainMap) -> Result<ChainMap, ChainError> {
        let ring = self.source.ring;
        let mut mats = Vec::with_capacity(other.mats.len());
        for d in other.source.degrees() {
            mats.push(self.mat(d + other.shift).mul(&other.mat(d), &ring)?);
        }
        ChainMap::new(other.source.clone(), self.target.clone(), self.shift + other.shift, mats)
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap, ChainError> {
        let ring = self.source.ring;
        let mats: Result<Vec<_>, MatrixError> = self
            .source
            .degrees()
            .map(|d| self.mat(d).add(&other.mat(d), &ring))
            .collect();
        ChainMap::new(self.source.clone(), self.target.clone(), self.shift, mats?)
    }

    /// Equality of underlying matrices (same shift and shapes assumed).
    pub fn equals(&self, other: &ChainMap) -> bool {
        self.shift == other.shift
            && self.source.degrees().all(|d| self.mat(d) == other.mat(d))
    }
}

/// Tensor product with the Leibniz differential
/// `d(c (x) c') = dc (x) c' + (-1)^{|c|} c (x) dc'`.
/// Basis labels are pairs `(b, b')`.
pub fn tensor_complexes(
    a: &Arc<ChainComplex>,
    b: &Arc<ChainComplex>,
) -> Result<Arc<ChainComplex>, ChainError> {
    if a.ring != b.ring {
        return Err(ChainError::RingMismatch(a.ring.kind, b.ring.kind));
    }
    let ring = a.ring;
    if a.bases.is_empty() || b.bases.is_empty() {
        return Ok(ChainComplex::zero(ring));
    }
    let lower = a.lower + b.lower;
    let upper = a.upper() + b.upper();
    let mut bases: Vec<Vec<Label>> = Vec::new();
    for n in lower..=upper {
        let mut basis = Vec::new();
        for da in a.degrees() {
            let db = n - da;
            for la in a.basis(da) {
                for lb in b.basis(db) {
                    basis.push(Label::pair(la.clone(), lb.clone()));
                }
            }
        }
        bases.push(basis);
    }
    // index for target lookups
    let dim_at = |n: Deg| -> usize {
        if n < lower || n > upper {
            0
        } else {
            bases[(n - lower) as usize].len()
        }
    };
    let pos = |n: Deg, l: &Label| -> u32 {
        bases[(n - lower) as usize]
            .iter()
            .position(|x| x == l)
            .map(|p| p as u32)
            .expect("tensor label present")
    };
    let mut diffs = Vec::new();
    for n in lower..=upper {
        let mut entries = Vec::new();
        let mut col = 0usize;
        for da in a.degrees() {
            let db = n - da;
            if db < b.lower || db > b.upper() {
                continue;
            }
            let da_mat = a.diff(da);
            let db_mat = b.diff(db);
            for (ja, la) in a.basis(da).iter().enumerate() {
                for (jb, lb) in b.basis(db).iter().enumerate() {
                    // d a (x) b
                    for (r, s) in &da_mat.columns[ja] {
                        let tl = Label::pair(a.basis(da - 1)[*r as usize].clone(), lb.clone());
                        entries.push((pos(n - 1, &tl) as usize, col, s.clone()));
                    }
                    // (-1)^{|a|} a (x) d b
                    let sign = cross_sign(1, da);
                    for (r, s) in &db_mat.columns[jb] {
                        let tl = Label::pair(la.clone(), b.basis(db - 1)[*r as usize].clone());
                        let v = if sign < 0 { ring.neg(s) } else { s.clone() };
                        entries.push((pos(n - 1, &tl) as usize, col, v));
                    }
                    col += 1;
                }
            }
        }
        let rows = dim_at(n - 1);
        diffs.push(SparseMatrix::from_entries(rows, dim_at(n), &ring, entries));
    }
    ChainComplex::new(ring, lower, bases, diffs)
}

/// Shift: `(s^k C)_n = C_{n-k}`, labels wrapped as `(s^k, b)` words when
/// `k != 0`. The canonical degree-k map `C -> s^k C` satisfies
/// `d s^k = (-1)^k s^k d`, so the shifted differential is `(-1)^k d`.
pub fn shift(c: &Arc<ChainComplex>, k: Deg) -> Arc<ChainComplex> {
    if k == 0 {
        return c.clone();
    }
    let ring = c.ring;
    let name = format!("s^{k}");
    let wrap = |l: &Label| Label::word(vec![Label::gen(&name, k), l.clone()]);
    let bases: Vec<Vec<Label>> = c.bases.iter().map(|b| b.iter().map(wrap).collect()).collect();
    let diffs: Vec<SparseMatrix> = c
        .diffs
        .iter()
        .map(|m| if k % 2 != 0 { m.neg(&ring) } else { m.clone() })
        .collect();
    ChainComplex::new(ring, c.lower + k, bases, diffs).expect("shift preserves d2=0")
}

/// Unshift, inverse to `shift`: strips the `(s^k, b)` wrapper.
pub fn unshift(c: &Arc<ChainComplex>, k: Deg) -> Arc<ChainComplex> {
    if k == 0 {
        return c.clone();
    }
    let ring = c.ring;
    let bases: Vec<Vec<Label>> = c
        .bases
        .iter()
        .map(|b| {
            b.iter()
                .map(|l| match l.as_word() {
                    Some([_, inner]) => inner.clone(),
                    _ => panic!("unshift on a non-shifted label {l}"),
                })
                .collect()
        })
        .collect();
    let diffs: Vec<SparseMatrix> = c
        .diffs
        .iter()
        .map(|m| if k % 2 != 0 { m.neg(&ring) } else { m.clone() })
        .collect();
    ChainComplex::new(ring, c.lower - k, bases, diffs).expect("unshift preserves d2=0")
}

/// Direct sum with inclusion and projection chain maps.
pub fn direct_sum(
    a: &Arc<ChainComplex>,
    b: &Arc<ChainComplex>,
) -> Result<(Arc<ChainComplex>, [ChainMap; 2], [ChainMap; 2]), ChainError> {
    if a.ring != b.ring {
        return Err(ChainError::RingMismatch(a.ring.kind, b.ring.kind));
    }
    let ring = a.ring;
    if a.bases.is_empty() {
        let s = b.clone();
        return Ok((
            s.clone(),
            [ChainMap::zero(a.clone(), s.clone(), 0), ChainMap::identity(b)],
            [ChainMap::zero(s.clone(), a.clone(), 0), ChainMap::identity(b)],
        ));
    }
    if b.bases.is_empty() {
        let s = a.clone();
        return Ok((
            s.clone(),
            [ChainMap::identity(a), ChainMap::zero(b.clone(), s.clone(), 0)],
            [ChainMap::identity(a), ChainMap::zero(s.clone(), b.clone(), 0)],
        ));
    }
    let lower = a.lower.min(b.lower);
    let upper = a.upper().max(b.upper());
    // tag labels from each summand to keep them distinct
    let tag = |side: usize, l: &Label| {
        Label::word(vec![Label::gen(if side == 0 { "inl" } else { "inr" }, 0), l.clone()])
    };
    let mut bases = Vec::new();
    let mut diffs = Vec::new();
    for n in lower..=upper {
        let mut basis: Vec<Label> = a.basis(n).iter().map(|l| tag(0, l)).collect();
        basis.extend(b.basis(n).iter().map(|l| tag(1, l)));
        bases.push(basis);
        let (da, db) = (a.diff(n), b.diff(n));
        let rows = a.dim(n - 1) + b.dim(n - 1);
        let cols = a.dim(n) + b.dim(n);
        let mut entries = Vec::new();
        for (c, col) in da.columns.iter().enumerate() {
            for (r, s) in col {
                entries.push((*r as usize, c, s.clone()));
            }
        }
        for (c, col) in db.columns.iter().enumerate() {
            for (r, s) in col {
                entries.push((a.dim(n - 1) + *r as usize, a.dim(n) + c, s.clone()));
            }
        }
        diffs.push(SparseMatrix::from_entries(rows, cols, &ring, entries));
    }
    let sum = ChainComplex::new(ring, lower, bases, diffs)?;
    let include = |side: usize, c: &Arc<ChainComplex>| -> ChainMap {
        ChainMap::from_fn(c.clone(), sum.clone(), 0, |_, l| {
            vec![(tag(side, l), ring.one())]
        })
        .expect("inclusion is a chain map")
    };
    let project = |side: usize, c: &Arc<ChainComplex>| -> ChainMap {
        let c = c.clone();
        ChainMap::from_fn(sum.clone(), c.clone(), 0, |d, l| {
            let w = l.as_word().unwrap();
            let this = matches!((&w[0], side), (Label::Gen(n, _), 0) if &**n == "inl")
                || matches!((&w[0], side), (Label::Gen(n, _), 1) if &**n == "inr");
            if this && c.index_of(d, &w[1]).is_some() {
                vec![(w[1].clone(), ring.one())]
            } else {
                vec![]
            }
        })
        .expect("projection is a chain map")
    };
    let incs = [include(0, a), include(1, b)];
    let projs = [project(0, a), project(1, b)];
    Ok((sum, incs, projs))
}

/// Homology in one degree: free rank and invariant factors (> 1) over Z,
/// or just the rank over a field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologySummand {
    pub degree: Deg,
    pub free_rank: usize,
    /// Nontrivial invariant factors; empty over a field.
    pub torsion: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyResult {
    pub summands: Vec<HomologySummand>,
}

impl HomologyResult {
    pub fn rank(&self, degree: Deg) -> usize {
        self.summands
            .iter()
            .find(|s| s.degree == degree)
            .map(|s| s.free_rank)
            .unwrap_or(0)
    }

    pub fn torsion(&self, degree: Deg) -> &[Scalar] {
        self.summands
            .iter()
            .find(|s| s.degree == degree)
            .map(|s| s.torsion.as_slice())
            .unwrap_or(&[])
    }

    pub fn is_zero(&self) -> bool {
        self.summands.iter().all(|s| s.free_rank == 0 && s.torsion.is_empty())
    }
}

/// Homology over the complex's ring for all degrees in `range` (inclusive).
pub fn homology(
    c: &Arc<ChainComplex>,
    range: Option<(Deg, Deg)>,
) -> Result<HomologyResult, ChainError> {
    let (lo, hi) = range.unwrap_or((c.lower, c.upper()));
    let ring = c.ring;
    let mut summands = Vec::new();
    for d in lo..=hi {
        let a = c.diff(d); // out of degree d
        let b = c.diff(d + 1); // into degree d
        let summand = if ring.is_field() {
            let rank_a = rank(&a, &ring);
            let rank_b = rank(&b, &ring);
            HomologySummand { degree: d, free_rank: c.dim(d) - rank_a - rank_b, torsion: vec![] }
        } else {
            homology_over_z(&a, &b, c.dim(d), d, &ring)?
        };
        summands.push(summand);
    }
    Ok(HomologyResult { summands })
}

fn homology_over_z(
    a: &SparseMatrix,
    b: &SparseMatrix,
    dim: usize,
    degree: Deg,
    ring: &Ring,
) -> Result<HomologySummand, ChainError> {
    // ker a = V e_{r..}, then read b in that basis and take its SNF.
    let dec = snf::smith_normal_form(a, ring)?;
    let r = dec.rank;
    let vb = dec.v_inv.mul(b, ring)?;
    // rows below r form the matrix of b into the kernel coordinates
    let mut entries = Vec::new();
    for (c, col) in vb.columns.iter().enumerate() {
        for (row, s) in col {
            let row = *row as usize;
            if row >= r {
                entries.push((row - r, c, s.clone()));
            } else {
                debug_assert!(ring.is_zero(s), "image of d not inside kernel");
            }
        }
    }
    let bker = SparseMatrix::from_entries(dim - r, b.cols, ring, entries);
    let sub = snf::smith_normal_form(&bker, ring)?;
    let mut torsion = Vec::new();
    for ddiag in sub.diag.iter().take(sub.rank) {
        if !ring.is_one(ddiag) {
            torsion.push(ddiag.clone());
        }
    }
    Ok(HomologySummand { degree, free_rank: dim - r - sub.rank, torsion })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring_z() -> Ring {
        Ring::integers()
    }

    /// The two-term complex `R a_1 -> R b_0`, `d a = b`.
    fn disk(ring: Ring, a: &str, b: &str) -> Arc<ChainComplex> {
        ChainComplex::new(
            ring,
            0,
            vec![vec![Label::gen(b, 0)], vec![Label::gen(a, 1)]],
            vec![
                SparseMatrix::zero(0, 1),
                SparseMatrix::from_entries(1, 1, &ring, [(0, 0, Scalar::Int(1))]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn tensor_units_and_zero() {
        let z = ring_z();
        let d = disk(z, "a", "b");
        let zero = ChainComplex::zero(z);
        let t = tensor_complexes(&d, &zero).unwrap();
        assert_eq!(t.total_dim(), 0);
        let unit = ChainComplex::generator(z, Label::gen("1", 0), 0);
        let t = tensor_complexes(&unit, &d).unwrap();
        assert_eq!(t.total_dim(), 2);
        assert_eq!(t.dim(0), 1);
        assert_eq!(t.dim(1), 1);
    }

    #[test]
    fn leibniz_sign_on_disk_square() {
        // D (x) D with d a = b: d(a|a) = b|a - a|b, the sign forced by |a|=1
        let z = ring_z();
        let d = disk(z, "a", "b");
        let t = tensor_complexes(&d, &d).unwrap();
        let a = Label::gen("a", 1);
        let b = Label::gen("b", 0);
        let aa = Label::pair(a.clone(), a.clone());
        let col = t.index_of(2, &aa).unwrap();
        let dcol = &t.diff(2).columns[col as usize];
        let ba = t.index_of(1, &Label::pair(b.clone(), a.clone())).unwrap();
        let ab = t.index_of(1, &Label::pair(a, b)).unwrap();
        let mut expect = vec![(ba, Scalar::Int(1)), (ab, Scalar::Int(-1))];
        expect.sort_by_key(|(i, _)| *i);
        assert_eq!(dcol, &expect);
    }

    #[test]
    fn shift_inverse_and_sign() {
        let z = ring_z();
        let d = disk(z, "a", "b");
        assert!(Arc::ptr_eq(&shift(&d, 0), &d));
        let s = shift(&d, -1);
        // generator s^{-1}a in degree 0 with d(s^{-1}a) = -s^{-1}b
        assert_eq!(s.lower, -1);
        assert_eq!(s.dim(0), 1);
        let m = s.diff(0);
        assert_eq!(m.entry(0, 0, &z), Scalar::Int(-1));
        let back = unshift(&s, -1);
        assert_eq!(back.bases, d.bases);
        assert_eq!(back.diffs, d.diffs);
    }

    #[test]
    fn homology_examples() {
        let z = ring_z();
        // zero complex
        let h = homology(&ChainComplex::zero(z), Some((0, 2))).unwrap();
        assert!(h.is_zero());
        // Z --x2--> Z in degrees 1 -> 0: H_0 = Z/2, H_1 = 0
        let c = ChainComplex::new(
            z,
            0,
            vec![vec![Label::gen("y", 0)], vec![Label::gen("x", 1)]],
            vec![
                SparseMatrix::zero(0, 1),
                SparseMatrix::from_entries(1, 1, &z, [(0, 0, Scalar::Int(2))]),
            ],
        )
        .unwrap();
        let h = homology(&c, None).unwrap();
        assert_eq!(h.rank(0), 0);
        assert_eq!(h.torsion(0), &[Scalar::Int(2)]);
        assert_eq!(h.rank(1), 0);
        assert!(h.torsion(1).is_empty());
    }

    /// The 7-generator mod-2 coalgebra's underlying complex: only dv = x+y.
    #[test]
    fn homology_of_small_mod2_complex() {
        let f2 = Ring::prime_field(2).unwrap();
        let one = f2.one();
        let bases = vec![
            vec![Label::gen("1", 0)],
            vec![],
            vec![Label::gen("u", 2)],
            vec![Label::gen("x", 3), Label::gen("y", 3), Label::gen("z", 3)],
            vec![Label::gen("v", 4)],
            vec![],
            vec![Label::gen("w", 6)],
        ];
        let diffs = vec![
            SparseMatrix::zero(0, 1),
            SparseMatrix::zero(1, 0),
            SparseMatrix::zero(0, 1),
            SparseMatrix::zero(1, 3),
            SparseMatrix::from_entries(3, 1, &f2, [(0, 0, one.clone()), (1, 0, one)]),
            SparseMatrix::zero(1, 0),
            SparseMatrix::zero(0, 1),
        ];
        let c = ChainComplex::new(f2, 0, bases, diffs).unwrap();
        let h = homology(&c, None).unwrap();
        let ranks: Vec<usize> = (0..7).map(|d| h.rank(d)).collect();
        // hand count: only dv = x+y is nonzero
        assert_eq!(ranks, vec![1, 0, 1, 2, 0, 0, 1]);
    }

    #[test]
    fn direct_sum_adds_ranks_and_homology() {
        use rand::{Rng, SeedableRng};
        let z = ring_z();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for trial in 0..5 {
            // random complexes assembled from disks and spheres
            let mut build = |tag: &str| {
                let mut c = ChainComplex::zero(z);
                for i in 0..rng.gen_range(1..4) {
                    let piece = if rng.gen_bool(0.5) {
                        disk(z, &format!("{tag}a{i}"), &format!("{tag}b{i}"))
                    } else {
                        ChainComplex::generator(
                            z,
                            Label::gen(&format!("{tag}s{i}"), 0),
                            rng.gen_range(0..3),
                        )
                    };
                    c = direct_sum(&c, &piece).unwrap().0;
                }
                c
            };
            let a = build("p");
            let b = build("q");
            let (s, incs, projs) = direct_sum(&a, &b).unwrap();
            for d in s.degrees() {
                assert_eq!(s.dim(d), a.dim(d) + b.dim(d));
            }
            // projection о inclusion = identity on each side
            for (inc, proj) in incs.iter().zip(projs.iter()) {
                let round = proj.compose(inc).unwrap();
                assert!(round.equals(&ChainMap::identity(&inc.source)), "trial {trial}");
            }
            // homology adds degreewise
            let hs = homology(&s, None).unwrap();
            let ha = homology(&a, None).unwrap();
            let hb = homology(&b, None).unwrap();
            for d in s.degrees() {
                assert_eq!(hs.rank(d), ha.rank(d) + hb.rank(d));
                assert_eq!(hs.torsion(d).len(), ha.torsion(d).len() + hb.torsion(d).len());
            }
        }
    }

    #[test]
    fn kunneth_over_field() {
        use rand::{Rng, SeedableRng};
        let q = Ring::rationals();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut build = |tag: &str| {
            let mut c = ChainComplex::zero(q);
            for i in 0..rng.gen_range(1..4) {
                let piece = if rng.gen_bool(0.5) {
                    ChainComplex::new(
                        q,
                        rng.gen_range(0..2),
                        vec![vec![Label::gen(&format!("{tag}b{i}"), 0)], vec![Label::gen(&format!("{tag}a{i}"), 1)]],
                        vec![
                            SparseMatrix::zero(0, 1),
                            SparseMatrix::from_entries(1, 1, &q, [(0, 0, Scalar::Int(rng.gen_range(1..5)))]),
                        ],
                    )
                    .unwrap()
                } else {
                    ChainComplex::generator(q, Label::gen(&format!("{tag}s{i}"), 0), rng.gen_range(0..3))
                };
                c = direct_sum(&c, &piece).unwrap().0;
            }
            c
        };
        for _ in 0..5 {
            let a = build("p");
            let b = build("q");
            let t = tensor_complexes(&a, &b).unwrap();
            let ht = homology(&t, None).unwrap();
            let ha = homology(&a, None).unwrap();
            let hb = homology(&b, None).unwrap();
            for n in t.degrees() {
                let expect: usize = a
                    .degrees()
                    .map(|l| ha.rank(l) * hb.rank(n - l))
                    .sum();
                assert_eq!(ht.rank(n), expect, "Kunneth mismatch in degree {n}");
            }
        }
    }

    #[test]
    fn shift_preserves_homology() {
        let z = ring_z();
        let c = disk(z, "a", "b");
        let s = shift(&c, 3);
        let hc = homology(&c, None).unwrap();
        let hs = homology(&s, None).unwrap();
        for d in c.degrees() {
            assert_eq!(hc.rank(d), hs.rank(d + 3));
        }
    }

    #[test]
    fn invalid_complex_rejected() {
        let z = ring_z();
        // d о d != 0: two stacked identity maps
        let r = ChainComplex::new(
            z,
            0,
            vec![vec![Label::gen("c", 0)], vec![Label::gen("b", 1)], vec![Label::gen("a", 2)]],
            vec![
                SparseMatrix::zero(0, 1),
                SparseMatrix::identity(1, &z),
                SparseMatrix::identity(1, &z),
            ],
        );
        assert!(matches!(r, Err(ChainError::NotAComplex { degree: 2, .. })));
    }
}
