//! Extension of an equivariant family `X(m) (x) Y[nvec] -> Z(n)` to a
//! morphism out of the composition product.

use super::products::{CompProduct, CompTerm};
use super::{SymError, SymSeq, SymSeqMorphism};
use crate::chain::ChainMap;
use crate::label::Label;
use crate::matrix::{SparseMatrix, SparseVec};
use crate::perm::{block_perm, Deg, Perm};
use crate::scalar::Ring;

/// The generating data of a morphism out of `X o Y`: for each `(m, nvec)`
/// and each pair of an `X(m)` label and a tuple of `Y(n_i)` labels, a sparse
/// element of `Z(n)` in the stated degree.
pub trait EquivFamily {
    /// Degree shift of the family (0 for plain morphisms).
    fn shift(&self) -> Deg;
    /// Value on `x (x) y_1 (x) .. (x) y_m`; the result is indexed by the
    /// target complex basis in degree `deg(x) + sum deg(y_i) + shift`.
    fn value(&self, m: usize, nvec: &[usize], x: &Label, ys: &[Label]) -> SparseVec;
}

impl<F> EquivFamily for (Deg, F)
where
    F: Fn(usize, &[usize], &Label, &[Label]) -> SparseVec,
{
    fn shift(&self) -> Deg {
        self.0
    }
    fn value(&self, m: usize, nvec: &[usize], x: &Label, ys: &[Label]) -> SparseVec {
        (self.1)(m, nvec, x, ys)
    }
}

/// Evaluate the family on a witness term, applying its coset representative
/// through the target action.
fn evaluate_term(
    ring: &Ring,
    z: &SymSeq,
    n: usize,
    fam: &dyn EquivFamily,
    t: &CompTerm,
) -> Result<SparseVec, SymError> {
    let v = fam.value(t.m, &t.pow.nvec, &t.x, &t.pow.parts);
    if v.is_empty() {
        return Ok(vec![]);
    }
    let d = t.degree() + fam.shift();
    if t.pow.rho.is_identity() {
        return Ok(v);
    }
    let act = &z.level(n).action;
    let mut out: SparseVec = Vec::new();
    for (i, s) in &v {
        let (j, c) = act.apply_perm(ring, d, *i, &t.pow.rho)?;
        out.push((j, ring.mul(s, &c)));
    }
    out.sort_by_key(|(i, _)| *i);
    // merge duplicates (a permutation is injective, so none expected)
    Ok(out)
}

/// Check the two equivariance squares on all basis instances and, if they
/// hold, extend the family to a morphism `X o Y -> Z` through the witnesses.
pub fn extend_family(
    prod: &CompProduct,
    z: &SymSeq,
    fam: &dyn EquivFamily,
) -> Result<SymSeqMorphism, SymError> {
    let ring = prod.x.ring;
    let x = &prod.x;
    let y = &prod.y;
    // equivariance checks per level
    for n in 0..=prod.seq.max_level() {
        let zc = z.complex(n);
        let zact = &z.level(n).action;
        for degterms in &prod.terms[n] {
            for t in degterms {
                if !t.pow.rho.is_identity() {
                    continue; // checks run on the underlying (x, ys) data
                }
                let base = fam.value(t.m, &t.pow.nvec, &t.x, &t.pow.parts);
                // inner equivariance: y_j . s vs right multiplication in Z
                let mut offset = 0usize;
                for (j, &p) in t.pow.nvec.iter().enumerate() {
                    for g in 0..p.saturating_sub(1) {
                        let cy = y.complex(p);
                        let dy = t.pow.parts[j].degree();
                        let yi = cy.index_of(dy, &t.pow.parts[j]).unwrap();
                        let (nyi, sy) = y
                            .level(p)
                            .action
                            .apply_perm(&ring, dy, yi, &Perm::adjacent(p, g))?;
                        let mut ys2 = t.pow.parts.clone();
                        ys2[j] = cy.basis(dy)[nyi as usize].clone();
                        let lhs = fam.value(t.m, &t.pow.nvec, &t.x, &ys2);
                        let lhs = crate::matrix::sv_scale(&ring, &sy, &lhs);
                        // embed s_g of part j into Sigma_n
                        let full = Perm::adjacent(n, offset + g);
                        let mut rhs: SparseVec = Vec::new();
                        let dd = t.degree() + fam.shift();
                        for (i, s) in &base {
                            let (k, c) = zact.apply_perm(&ring, dd, *i, &full)?;
                            rhs.push((k, ring.mul(s, &c)));
                        }
                        rhs.sort_by_key(|(i, _)| *i);
                        if lhs != rhs {
                            return Err(SymError::NotEquivariant {
                                level: n,
                                nvec: t.pow.nvec.clone(),
                                gen: format!("inner s_{g} of part {j}"),
                            });
                        }
                    }
                    offset += p;
                }
                // outer equivariance: x . tau vs block permutation on Z
                for g in 0..t.m.saturating_sub(1) {
                    let tau = Perm::adjacent(t.m, g);
                    let cx = x.complex(t.m);
                    let dx = t.x.degree();
                    let xi = cx.index_of(dx, &t.x).unwrap();
                    let (nxi, sx) = x.level(t.m).action.apply_perm(&ring, dx, xi, &tau)?;
                    let x2 = cx.basis(dx)[nxi as usize].clone();
                    let lhs = crate::matrix::sv_scale(
                        &ring,
                        &sx,
                        &fam.value(t.m, &t.pow.nvec, &x2, &t.pow.parts),
                    );
                    // x tau (x) ys  ~  x (x) tau.(ys (x) id):
                    // reorder parts, Koszul sign, block permutation on Z
                    let mut nvec2 = t.pow.nvec.clone();
                    nvec2.swap(g, g + 1);
                    let mut ys2 = t.pow.parts.clone();
                    ys2.swap(g, g + 1);
                    let ksign = if t.pow.parts[g].degree() % 2 != 0
                        && t.pow.parts[g + 1].degree() % 2 != 0
                    {
                        ring.neg(&ring.one())
                    } else {
                        ring.one()
                    };
                    let beta = block_perm(&tau, &t.pow.nvec);
                    let val = fam.value(t.m, &nvec2, &t.x, &ys2);
                    let dd = t.degree() + fam.shift();
                    let mut rhs: SparseVec = Vec::new();
                    for (i, s) in &val {
                        let (k, c) = zact.apply_perm(&ring, dd, *i, &beta)?;
                        rhs.push((k, ring.mul(&ring.mul(s, &c), &ksign)));
                    }
                    rhs.sort_by_key(|(i, _)| *i);
                    if lhs != rhs {
                        return Err(SymError::NotEquivariant {
                            level: n,
                            nvec: t.pow.nvec.clone(),
                            gen: format!("outer s_{g}"),
                        });
                    }
                }
            }
        }
        let _ = zc;
    }
    // build the morphism on representatives
    let mut maps = Vec::new();
    for n in 0..=prod.seq.max_level() {
        let sc = prod.seq.complex(n);
        let zc = z.complex(n);
        let mut mats = Vec::new();
        for d in sc.degrees() {
            let di = (d - sc.lower) as usize;
            let mut entries = Vec::new();
            for (col, t) in prod.terms[n][di].iter().enumerate() {
                for (r, s) in evaluate_term(&ring, z, n, fam, t)? {
                    entries.push((r as usize, col, s));
                }
            }
            mats.push(SparseMatrix::from_entries(
                zc.dim(d + fam.shift()),
                sc.dim(d),
                &ring,
                entries,
            ));
        }
        maps.push(ChainMap::new(sc.clone(), zc.clone(), fam.shift(), mats)?);
    }
    SymSeqMorphism::new(prod.seq.clone(), z.clone(), fam.shift(), maps)
}

/// Restrict a morphism on `X o Y` back to the family on identity-coset
/// witnesses (used by the roundtrip test).
pub fn restrict_family(
    prod: &CompProduct,
    f: &SymSeqMorphism,
) -> Vec<((usize, Vec<usize>, Label, Vec<Label>), SparseVec)> {
    let mut out = Vec::new();
    for n in 0..=prod.seq.max_level() {
        let sc = prod.seq.complex(n);
        for d in sc.degrees() {
            let di = (d - sc.lower) as usize;
            for (col, t) in prod.terms[n][di].iter().enumerate() {
                if !t.pow.rho.is_identity() {
                    continue;
                }
                let v = f.map(n).mat(d).columns[col].clone();
                out.push((
                    (t.m, t.pow.nvec.clone(), t.x.clone(), t.pow.parts.clone()),
                    v,
                ));
            }
        }
    }
    out
}
