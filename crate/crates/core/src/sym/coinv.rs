//! Group coinvariants of a complex with a monomial action, presented by
//! orbit representatives and torsion relations.

use super::{SignedAction, SymError};
use crate::chain::{ChainComplex, ChainError, ChainMap};
use crate::label::Label;
use crate::matrix::{SparseMatrix, SparseVec};
use crate::perm::Deg;
use crate::scalar::{Ring, RingKind, Scalar};
use std::sync::Arc;

/// Presentation of the coinvariant quotient of a complex under a finite
/// group of signed basis permutations.
///
/// Per degree: every ambient basis element projects onto a canonical orbit
/// representative with a sign (or to zero when its orbit is sign-conflicted
/// over a field of odd or zero characteristic). Over the integers a
/// sign-conflicted orbit survives with the relation `2 b = 0`, recorded in
/// `relations`.
#[derive(Clone, Debug)]
pub struct OrbitPresentation {
    pub ambient: Arc<ChainComplex>,
    /// Per degree: representative ambient indices, in ambient order.
    pub reps: Vec<Vec<u32>>,
    /// Per degree, per ambient index: `(rep position, coefficient)` or None
    /// when the class is zero.
    pub proj: Vec<Vec<Option<(u32, Scalar)>>>,
    /// `(degree, rep position)` of classes `b` with `2 b = 0`.
    pub relations: Vec<(Deg, u32)>,
    /// The quotient as a complex on the representatives (valid presentation
    /// of the free part; exact over fields and torsion-free over Z).
    pub quotient: Arc<ChainComplex>,
}

impl OrbitPresentation {
    pub fn degree_index(&self, degree: Deg) -> usize {
        (degree - self.ambient.lower) as usize
    }

    /// Project an ambient sparse element into quotient coordinates.
    pub fn project(&self, ring: &Ring, degree: Deg, v: &SparseVec) -> SparseVec {
        let di = self.degree_index(degree);
        let mut acc: std::collections::BTreeMap<u32, Scalar> = Default::default();
        for (i, s) in v {
            if let Some((rep, c)) = &self.proj[di][*i as usize] {
                let cell = acc.entry(*rep).or_insert_with(|| ring.zero());
                *cell = ring.add(cell, &ring.mul(c, s));
            }
        }
        acc.into_iter().filter(|(_, s)| !ring.is_zero(s)).collect()
    }

    /// Lift a quotient element to the ambient complex on representatives.
    pub fn section(&self, degree: Deg, v: &SparseVec) -> SparseVec {
        let di = self.degree_index(degree);
        let mut out: SparseVec =
            v.iter().map(|(i, s)| (self.reps[di][*i as usize], s.clone())).collect();
        out.sort_by_key(|(i, _)| *i);
        out
    }

    /// Projection as a degreewise matrix (not a chain map structure, since
    /// the quotient may differ in shape).
    pub fn projection_matrix(&self, degree: Deg) -> SparseMatrix {
        let di = self.degree_index(degree);
        let ring = self.ambient.ring;
        SparseMatrix::from_entries(
            self.reps[di].len(),
            self.ambient.dim(degree),
            &ring,
            self.proj[di].iter().enumerate().filter_map(|(i, m)| {
                m.as_ref().map(|(rep, c)| (*rep as usize, i, c.clone()))
            }),
        )
    }

    pub fn has_torsion(&self) -> bool {
        !self.relations.is_empty()
    }
}

/// Compute coinvariants of `c` under the group generated by `action`'s
/// generators (with signs). The action must be monomial.
pub fn coinvariants(
    c: &Arc<ChainComplex>,
    action: &SignedAction,
) -> Result<OrbitPresentation, SymError> {
    let ring = c.ring;
    let char2 = matches!(ring.kind, RingKind::PrimeField(2));
    let mut reps: Vec<Vec<u32>> = Vec::new();
    let mut proj: Vec<Vec<Option<(u32, Scalar)>>> = Vec::new();
    let mut relations: Vec<(Deg, u32)> = Vec::new();

    for d in c.degrees() {
        let dim = c.dim(d);
        let monos: Vec<Vec<(u32, Scalar)>> = (0..action.gens.len())
            .map(|i| action.monomial(i, d))
            .collect::<Result<_, _>>()?;
        // orbit bfs with signs relative to the start element
        let mut assign: Vec<Option<(u32, Scalar)>> = vec![None; dim]; // (orbit seed, sign)
        let mut orbit_of: Vec<u32> = vec![0; dim];
        let mut orbits: Vec<(u32, bool)> = Vec::new(); // (min element, conflicted)
        for start in 0..dim as u32 {
            if assign[start as usize].is_some() {
                continue;
            }
            let orbit_id = orbits.len() as u32;
            let mut queue = vec![start];
            assign[start as usize] = Some((start, ring.one()));
            orbit_of[start as usize] = orbit_id;
            let mut min_elt = start;
            let mut conflict = false;
            while let Some(t) = queue.pop() {
                let (_, ts) = assign[t as usize].clone().unwrap();
                for mono in &monos {
                    let (img, s) = &mono[t as usize];
                    let new_sign = ring.mul(&ts, s);
                    match &assign[*img as usize] {
                        None => {
                            assign[*img as usize] = Some((start, new_sign));
                            orbit_of[*img as usize] = orbit_id;
                            min_elt = min_elt.min(*img);
                            queue.push(*img);
                        }
                        Some((_, old)) => {
                            if *old != new_sign && !char2 {
                                conflict = true;
                            }
                        }
                    }
                }
            }
            orbits.push((min_elt, conflict));
        }
        // choose representatives; re-normalize signs to the representative
        let mut rep_pos: Vec<Option<u32>> = vec![None; orbits.len()];
        let mut rep_list: Vec<u32> = Vec::new();
        for (oid, (min_elt, conflict)) in orbits.iter().enumerate() {
            let keep = !conflict || matches!(ring.kind, RingKind::Integers);
            if keep {
                rep_pos[oid] = Some(rep_list.len() as u32);
                rep_list.push(*min_elt);
                if *conflict {
                    relations.push((d, rep_pos[oid].unwrap()));
                }
            }
        }
        let mut projd: Vec<Option<(u32, Scalar)>> = vec![None; dim];
        for i in 0..dim as u32 {
            let oid = orbit_of[i as usize] as usize;
            let Some(rp) = rep_pos[oid] else { continue };
            let min_elt = orbits[oid].0;
            // sign(i relative to seed) / sign(rep relative to seed)
            let (_, si) = assign[i as usize].clone().unwrap();
            let (_, sr) = assign[min_elt as usize].clone().unwrap();
            let rel = ring.mul(&si, &ring.inv(&sr).unwrap_or_else(|_| sr.clone()));
            projd[i as usize] = Some((rp, rel));
        }
        reps.push(rep_list);
        proj.push(projd);
    }

    // conflicted orbits over Z: 2b = 0 lives in the presentation; the
    // quotient complex below keeps the generator (its class generates Z/2).
    let quotient = build_quotient(c, &reps, &proj)?;
    Ok(OrbitPresentation { ambient: c.clone(), reps, proj, relations, quotient })
}

fn build_quotient(
    c: &Arc<ChainComplex>,
    reps: &[Vec<u32>],
    proj: &[Vec<Option<(u32, Scalar)>>],
) -> Result<Arc<ChainComplex>, ChainError> {
    let ring = c.ring;
    let mut bases: Vec<Vec<Label>> = Vec::new();
    for (di, rl) in reps.iter().enumerate() {
        let d = c.lower + di as Deg;
        bases.push(rl.iter().map(|&i| c.basis(d)[i as usize].clone()).collect());
    }
    let mut diffs: Vec<SparseMatrix> = Vec::new();
    for (di, rl) in reps.iter().enumerate() {
        let d = c.lower + di as Deg;
        let rows = if di == 0 { 0 } else { reps[di - 1].len() };
        let mut entries = Vec::new();
        let dm = c.diff(d);
        for (col, &amb) in rl.iter().enumerate() {
            for (r, s) in &dm.columns[amb as usize] {
                if let Some((rep, cgn)) = &proj[di - 1][*r as usize] {
                    entries.push((*rep as usize, col, ring.mul(s, cgn)));
                }
            }
        }
        diffs.push(SparseMatrix::from_entries(rows, rl.len(), &ring, entries));
    }
    ChainComplex::new(ring, c.lower, bases, diffs)
}

/// The induced map on quotients of an equivariant chain map.
pub fn induced_on_quotient(
    f: &ChainMap,
    src: &OrbitPresentation,
    tgt: &OrbitPresentation,
) -> Result<ChainMap, SymError> {
    let ring = f.source.ring;
    let mut mats = Vec::new();
    for d in src.quotient.degrees() {
        let cols = src.quotient.dim(d);
        let rows = tgt.quotient.dim(d + f.shift);
        let mut entries = Vec::new();
        for col in 0..cols {
            let lift = src.section(d, &vec![(col as u32, ring.one())]);
            let img = f.apply(d, &lift);
            for (r, s) in tgt.project(&ring, d + f.shift, &img) {
                entries.push((r as usize, col, s));
            }
        }
        mats.push(SparseMatrix::from_entries(rows, cols, &ring, entries));
    }
    ChainMap::new(src.quotient.clone(), tgt.quotient.clone(), f.shift, mats)
        .map_err(SymError::Chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::ChainMap;

    #[test]
    fn trivial_action_identity_presentation() {
        let z = Ring::integers();
        let c = ChainComplex::new(
            z,
            0,
            vec![vec![Label::gen("a", 0), Label::gen("b", 0)]],
            vec![SparseMatrix::zero(0, 2)],
        )
        .unwrap();
        let p = coinvariants(&c, &SignedAction::trivial(&c, 1)).unwrap();
        assert_eq!(p.quotient.dim(0), 2);
        assert!(!p.has_torsion());
    }

    #[test]
    fn swap_action_one_orbit() {
        let z = Ring::integers();
        let c = ChainComplex::new(
            z,
            0,
            vec![vec![Label::gen("a", 0), Label::gen("b", 0)]],
            vec![SparseMatrix::zero(0, 2)],
        )
        .unwrap();
        let swap = ChainMap::from_fn(c.clone(), c.clone(), 0, |_, l| {
            let other = if format!("{l}") == "a" { Label::gen("b", 0) } else { Label::gen("a", 0) };
            vec![(other, z.one())]
        })
        .unwrap();
        let p = coinvariants(&c, &SignedAction { gens: vec![swap] }).unwrap();
        assert_eq!(p.quotient.dim(0), 1);
        // representative is the lexicographically least element, a
        assert_eq!(format!("{}", p.quotient.basis(0)[0]), "a");
        assert!(!p.has_torsion());
    }

    #[test]
    fn sign_conflict_gives_two_torsion_over_z() {
        // Sigma_2 on R{a} by a -> -a: quotient Z/2, relation 2a = 0.
        // Oracle: the cokernel of (2) via SNF is Z/2.
        let z = Ring::integers();
        let c = ChainComplex::new(z, 0, vec![vec![Label::gen("a", 0)]], vec![SparseMatrix::zero(0, 1)])
            .unwrap();
        let neg = ChainMap::from_fn(c.clone(), c.clone(), 0, |_, l| {
            vec![(l.clone(), Scalar::Int(-1))]
        })
        .unwrap();
        let p = coinvariants(&c, &SignedAction { gens: vec![neg.clone()] }).unwrap();
        assert_eq!(p.relations, vec![(0, 0)]);
        let snf = crate::snf::invariant_factors(
            &SparseMatrix::from_entries(1, 1, &z, [(0, 0, Scalar::Int(2))]),
            &z,
        )
        .unwrap();
        assert_eq!(snf, vec![Scalar::Int(2)]);

        // over Q the class dies; over F2 it survives freely
        let q = Ring::rationals();
        let cq = ChainComplex::new(q, 0, vec![vec![Label::gen("a", 0)]], vec![SparseMatrix::zero(0, 1)])
            .unwrap();
        let negq = ChainMap::from_fn(cq.clone(), cq.clone(), 0, |_, l| {
            vec![(l.clone(), q.from_i64(-1))]
        })
        .unwrap();
        let pq = coinvariants(&cq, &SignedAction { gens: vec![negq] }).unwrap();
        assert_eq!(pq.quotient.dim(0), 0);

        let f2 = Ring::prime_field(2).unwrap();
        let c2 = ChainComplex::new(f2, 0, vec![vec![Label::gen("a", 0)]], vec![SparseMatrix::zero(0, 1)])
            .unwrap();
        let neg2 = ChainMap::from_fn(c2.clone(), c2.clone(), 0, |_, l| {
            vec![(l.clone(), f2.from_i64(-1))]
        })
        .unwrap();
        let p2 = coinvariants(&c2, &SignedAction { gens: vec![neg2] }).unwrap();
        assert_eq!(p2.quotient.dim(0), 1);
        assert!(!p2.has_torsion());
    }

    #[test]
    fn projection_factors_equivariant_maps() {
        // projection is surjective and constant on orbits by construction;
        // composing an equivariant map with the section then projecting
        // reproduces the induced map.
        let z = Ring::integers();
        let c = ChainComplex::new(
            z,
            0,
            vec![vec![Label::gen("a", 0), Label::gen("b", 0)]],
            vec![SparseMatrix::zero(0, 2)],
        )
        .unwrap();
        let swap = ChainMap::from_fn(c.clone(), c.clone(), 0, |_, l| {
            let other = if format!("{l}") == "a" { Label::gen("b", 0) } else { Label::gen("a", 0) };
            vec![(other, z.one())]
        })
        .unwrap();
        let p = coinvariants(&c, &SignedAction { gens: vec![swap.clone()] }).unwrap();
        let f = induced_on_quotient(&swap, &p, &p).unwrap();
        assert!(f.equals(&ChainMap::identity(&p.quotient)));
    }
}
