//! The presimplicial structure on the one-sided resolution: face maps on
//! single-block, unit-comonoid elements.

use super::{AwBlock, AwElt, AwSlot, Diffraction};
use crate::chain::{ChainError, ChainMap};
use crate::matrix::SparseMatrix;
use crate::perm::Deg;

/// The face map `d_i` on the single-block part of the unit diffraction at
/// one level: interior faces merge neighbouring inner entries, the outer
/// faces vanish (the dual sequence has nothing in level zero).
///
/// Returns the map between the simplicial-degree graded pieces: source
/// elements have `m` inner slots, targets `m - 1`.
pub fn face_map(f: &Diffraction, n: usize, i: usize) -> Result<ChainMap, ChainError> {
    let ring = f.ring;
    let cx = f.level_complex(n).clone();
    let mut mats = Vec::new();
    for d in cx.degrees() {
        let lower = cx.lower;
        let row_elems = &f.elements[n][(d - lower) as usize];
        let mut entries = Vec::new();
        for (col, e) in row_elems.iter().enumerate() {
            if e.blocks.len() != 1 || e.blocks[0].slots.len() != 1 {
                continue;
            }
            let slot = &e.blocks[0].slots[0];
            let m = slot.m;
            if i == 0 || i >= m {
                continue; // outer faces vanish
            }
            let mut r = slot.r.clone();
            let merged = r[i - 1] + r[i];
            r.remove(i);
            r[i - 1] = merged;
            let nb = AwBlock {
                level: e.blocks[0].level,
                x: e.blocks[0].x.clone(),
                slots: vec![AwSlot { m: m - 1, r }],
            };
            let raw = AwElt { blocks: vec![nb], sigma: e.sigma.clone() };
            if let Some((dd, idx, s)) = f.resolve(n, &raw, &ring.one()) {
                debug_assert_eq!(dd, d - 1);
                entries.push((idx as usize, col, s));
            }
        }
        mats.push(SparseMatrix::from_entries(cx.dim(d - 1), cx.dim(d), &ring, entries));
    }
    Ok(ChainMap::new_unchecked(cx.clone(), cx, -1, mats))
}

/// The single-block, single-slot subcomplex of the unit diffraction at one
/// level, with the simplicial part of the differential only. This is the
/// one-sided resolution; its homology sits in the bottom degree at level 1.
pub fn koszul_strand(
    f: &Diffraction,
    n: usize,
) -> Result<std::sync::Arc<crate::chain::ChainComplex>, ChainError> {
    let ring = f.ring;
    let cx = f.level_complex(n);
    // keep single-block elements; the cobar differential leaves the strand,
    // so restricting the full differential to it gives the face sum.
    let lower = cx.lower;
    let mut keep: Vec<Vec<usize>> = Vec::new();
    let mut bases = Vec::new();
    for d in cx.degrees() {
        let row = &f.elements[n][(d - lower) as usize];
        let mut cols = Vec::new();
        let mut basis = Vec::new();
        for (i, e) in row.iter().enumerate() {
            if e.blocks.len() == 1 && e.blocks[0].slots.len() == 1 {
                cols.push(i);
                basis.push(e.encode());
            }
        }
        keep.push(cols);
        bases.push(basis);
    }
    let mut diffs = Vec::new();
    for (di, cols) in keep.iter().enumerate() {
        let d = lower + di as Deg;
        let rows = if di == 0 { 0 } else { keep[di - 1].len() };
        let full = cx.diff(d);
        let mut entries = Vec::new();
        for (newc, &c) in cols.iter().enumerate() {
            for (r, s) in &full.columns[c] {
                if let Some(newr) = keep[di - 1].iter().position(|&x| x == *r as usize) {
                    entries.push((newr, newc, s.clone()));
                }
            }
        }
        diffs.push(SparseMatrix::from_entries(rows, cols.len(), &ring, entries));
    }
    crate::chain::ChainComplex::new(ring, lower, bases, diffs)
}
