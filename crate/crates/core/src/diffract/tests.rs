use super::*;
use crate::chain::homology;
use crate::label::Label;
use crate::matrix::SparseMatrix;
use crate::scalar::{Ring, Scalar};
use crate::sym::{SignedAction, SymmetricSequence, Trunc};

fn fact(n: usize) -> usize {
    (1..=n).product::<usize>().max(1)
}

/// The interval-chains comonoid: level 1 has u, v, e with de = v - u and
/// the usual simplicial coproduct; level 2 has c (grouplike, degree 0) and
/// a (degree 1) with the one-sided coproduct. Exercises internal
/// differentials and level-2 blocks.
fn interval_comonoid(ring: Ring, trunc: Trunc) -> LevelComonoid {
    let c1 = crate::chain::ChainComplex::new(
        ring,
        0,
        vec![vec![Label::gen("u0", 0), Label::gen("v0", 0)], vec![Label::gen("e1", 1)]],
        vec![
            SparseMatrix::zero(0, 2),
            SparseMatrix::from_entries(2, 1, &ring, [(0, 0, Scalar::Int(-1)), (1, 0, Scalar::Int(1))]),
        ],
    )
    .unwrap();
    let c2 = crate::chain::ChainComplex::new(
        ring,
        0,
        vec![vec![Label::gen("c0", 0)], vec![Label::gen("a1", 1)]],
        vec![SparseMatrix::zero(0, 1), SparseMatrix::zero(1, 1)],
    )
    .unwrap();
    let carrier = SymmetricSequence::from_levels(
        ring,
        trunc,
        vec![
            (1, c1.clone(), SignedAction::trivial(&c1, 1)),
            (2, c2.clone(), SignedAction::trivial(&c2, 2)),
        ],
        true,
    )
    .unwrap();
    let one = ring.one();
    LevelComonoid {
        carrier,
        cop: Arc::new(move |lvl, l| {
            let name = format!("{l}");
            let g = |n: &str, d: i32| Label::gen(n, d);
            match (lvl, name.as_str()) {
                (1, "u0") => vec![((g("u0", 0), g("u0", 0)), one.clone())],
                (1, "v0") => vec![((g("v0", 0), g("v0", 0)), one.clone())],
                (1, "e1") => vec![
                    ((g("u0", 0), g("e1", 1)), one.clone()),
                    ((g("e1", 1), g("v0", 0)), one.clone()),
                ],
                (2, "c0") => vec![((g("c0", 0), g("c0", 0)), one.clone())],
                (2, "a1") => vec![
                    ((g("c0", 0), g("a1", 1)), one.clone()),
                    ((g("a1", 1), g("c0", 0)), one.clone()),
                ],
                _ => panic!("unknown label {name} at level {lvl}"),
            }
        }),
        unit: Some(Label::gen("u0", 0)),
        name: "I".into(),
    }
}

#[test]
fn unit_diffraction_ranks() {
    // rank of the unit diffraction at level n is 3^{n-1} n!
    let ring = Ring::integers();
    let t = Trunc::new(4, 10);
    let f = diffract(&LevelComonoid::unit_j(ring, t), t).unwrap();
    for n in 1..=4usize {
        let expect = 3usize.pow((n - 1) as u32) * fact(n);
        assert_eq!(f.level_complex(n).total_dim(), expect, "level {n}");
    }
    // generators f_m sit in degree m-1
    for m in 1..=4usize {
        let g = f.generator(1, &Label::gen("u0", 0), &[m]);
        let (d, _) = f.index_of(m, &g).expect("generator present");
        assert_eq!(d, m as i32 - 1);
    }
}

#[test]
fn unit_differential_shape() {
    // the differential of f_2: one two-block cobar term, one merged term
    let ring = Ring::integers();
    let t = Trunc::new(3, 8);
    let x = LevelComonoid::unit_j(ring, t);
    let f2 = AwElt {
        blocks: vec![AwBlock { level: 1, x: Label::gen("u0", 0), slots: vec![AwSlot::generator(2)] }],
        sigma: crate::perm::Perm::identity(2),
    };
    let terms = differential_terms(&ring, &x, &f2).unwrap();
    assert_eq!(terms.len(), 2);
    let has_cobar = terms.iter().any(|(e, _)| e.blocks.len() == 2);
    let has_merge = terms
        .iter()
        .any(|(e, _)| e.blocks.len() == 1 && e.blocks[0].slots[0] == AwSlot { m: 1, r: vec![2] });
    assert!(has_cobar && has_merge);
    // d f_1 = 0
    let f1 = AwElt {
        blocks: vec![AwBlock { level: 1, x: Label::gen("u0", 0), slots: vec![AwSlot::generator(1)] }],
        sigma: crate::perm::Perm::identity(1),
    };
    assert!(differential_terms(&ring, &x, &f1).unwrap().is_empty());
}

#[test]
fn differential_squares_to_zero_over_z() {
    // constructing the complexes runs the d^2 = 0 validation
    let ring = Ring::integers();
    let t = Trunc::new(4, 10);
    diffract(&LevelComonoid::unit_j(ring, t), t).expect("unit diffraction over Z");
    let t3 = Trunc::new(3, 8);
    diffract(&LevelComonoid::assoc_diagonal(ring, t3), t3)
        .expect("diagonal diffraction over Z");
    diffract(&interval_comonoid(ring, t3), t3).expect("interval diffraction over Z");
}

#[test]
fn unit_diffraction_right_action_is_valid() {
    // the per-level actions were validated during construction; probe the
    // inner action formula on a generator
    let ring = Ring::integers();
    let t = Trunc::new(4, 10);
    let f = diffract(&LevelComonoid::unit_j(ring, t), t).unwrap();
    let g = f.generator(1, &Label::gen("u0", 0), &[2]);
    // act by arguments of sizes (2, 1): widens the entries
    let (acted, s) = right_act_elt(
        &ring,
        &g,
        &[2, 1],
        &[crate::perm::Perm::identity(2), crate::perm::Perm::identity(1)],
    );
    assert!(ring.is_one(&s));
    assert_eq!(acted.blocks[0].slots[0].r, vec![2, 1]);
    assert_eq!(acted.level(), 3);
    assert!(f.resolve(3, &acted, &ring.one()).is_some());
}

#[test]
fn coproduct_of_f3_matches_expected_terms() {
    let ring = Ring::integers();
    let t = Trunc::new(3, 8);
    let f = diffract(&LevelComonoid::unit_j(ring, t), t).unwrap();
    let f3 = f.generator(1, &Label::gen("u0", 0), &[3]);
    let psi = psi_elt(&f, &f3);
    // f1 (o) f3 | f2 (o) (f1 f2) | f2 (o) (f2 f1) | f3 (o) (f1 f1 f1)
    assert_eq!(psi.len(), 4, "coproduct of the degree-2 generator");
    for (term, coeff) in &psi {
        assert_eq!(term.depth(), 2);
        assert!(ring.is_one(coeff) || *coeff == Scalar::Int(-1));
        let upper_sizes: Vec<usize> = term.layers[0][0].slots.iter().map(|s| s.m).collect();
        assert_eq!(upper_sizes.len(), 1);
    }
}

#[test]
fn coproduct_is_a_chain_map() {
    let ring = Ring::integers();
    let t = Trunc::new(3, 8);
    for x in [
        LevelComonoid::unit_j(ring, t),
        LevelComonoid::assoc_diagonal(ring, Trunc::new(2, 6)),
        interval_comonoid(ring, Trunc::new(2, 6)),
    ] {
        let tr = x.carrier.trunc;
        let f = diffract(&x, tr).unwrap();
        for n in 1..=tr.max_level.min(3) {
            let cx = f.level_complex(n).clone();
            for d in cx.degrees() {
                for i in 0..cx.dim(d) {
                    let e = f.element(n, d, i as u32).clone();
                    let defect = chain_defect(&f, n, &e).unwrap();
                    assert!(
                        defect.is_empty(),
                        "psi d != d psi on {} (comonoid {}, level {n})",
                        e.pretty(),
                        f.comonoid.name
                    );
                }
            }
        }
    }
}

#[test]
fn coproduct_is_coassociative_and_counital() {
    let ring = Ring::integers();
    let t = Trunc::new(3, 8);
    let f = diffract(&LevelComonoid::unit_j(ring, t), t).unwrap();
    for n in 1..=3usize {
        let cx = f.level_complex(n).clone();
        for d in cx.degrees() {
            for i in 0..cx.dim(d) {
                let e = f.element(n, d, i as u32).clone();
                assert!(
                    coassoc_defect(&f, &e).is_empty(),
                    "coassociativity fails on {}",
                    e.pretty()
                );
                assert!(
                    counit_defect(&f, &e).is_empty(),
                    "left counit law fails on {}",
                    e.pretty()
                );
                assert!(
                    counit_defect_right(&f, &e).is_empty(),
                    "right counit law fails on {}",
                    e.pretty()
                );
            }
        }
    }
}

#[test]
fn face_maps_and_strand() {
    let ring = Ring::integers();
    let t = Trunc::new(4, 10);
    let f = diffract(&LevelComonoid::unit_j(ring, t), t).unwrap();
    // d_1 on alpha_2 (x) (1,1) gives alpha_1 with merged entries
    let d1 = face_map(&f, 2, 1).unwrap();
    let g = f.generator(1, &Label::gen("u0", 0), &[2]);
    let (dg, gi) = f.index_of(2, &g).unwrap();
    let col = d1.mat(dg).columns[gi as usize].clone();
    assert_eq!(col.len(), 1);
    let target = f.element(2, dg - 1, col[0].0);
    assert_eq!(target.blocks[0].slots[0], AwSlot { m: 1, r: vec![2] });
    // simplicial identities d_i d_j = d_j d_{i+1} for j <= i
    for n in 2..=4usize {
        for i in 1..n {
            for j in 1..=i {
                // maps out of simplicial degree where both sides defined
                let di = face_map(&f, n, i).unwrap();
                let dj = face_map(&f, n, j).unwrap();
                let dip = face_map(&f, n, i + 1).unwrap();
                // d_i d_j = d_j d_{i+1} for j <= i (rightmost acts first)
                let lhs = di.compose(&dj).ok();
                let rhs = dj.compose(&dip).ok();
                match (lhs, rhs) {
                    (Some(l), Some(r)) => assert!(l.equals(&r), "d_{i} d_{j} at level {n}"),
                    _ => {}
                }
            }
        }
    }
    // homology of the strand: level 1 has rank 1 in degree 0; levels 2, 3
    // vanish entirely
    let s1 = koszul_strand(&f, 1).unwrap();
    let h1 = homology(&s1, None).unwrap();
    assert_eq!(h1.rank(0), 1);
    for n in 2..=4usize {
        let s = koszul_strand(&f, n).unwrap();
        let h = homology(&s, None).unwrap();
        assert!(h.is_zero(), "strand homology at level {n}: {:?}", h);
    }
}

#[test]
fn homology_of_unit_diffraction() {
    let ring = Ring::integers();
    let t = Trunc::new(3, 8);
    let f = diffract(&LevelComonoid::unit_j(ring, t), t).unwrap();
    for n in 1..=3usize {
        let h = homology(f.level_complex(n), None).unwrap();
        assert_eq!(h.rank(0), fact(n), "level {n} bottom homology");
        assert!(h.torsion(0).is_empty());
        for d in 1..n as i32 {
            assert_eq!(h.rank(d), 0, "level {n} degree {d}");
            assert!(h.torsion(d).is_empty());
        }
    }
}

#[test]
fn milgram_is_a_chain_map_and_gives_the_level_coproduct() {
    let ring = Ring::integers();
    let t = Trunc::new(3, 8);
    let j = LevelComonoid::unit_j(ring, t);
    let jj = LevelComonoid::tensor(&j, &j).unwrap();
    let f = diffract(&j, t).unwrap();
    let fxy = diffract(&jj, t).unwrap();
    // chain map: q(de) = d(q e) with the tensor differential
    for n in 1..=3usize {
        let cx = fxy.level_complex(n).clone();
        for d in cx.degrees() {
            for i in 0..cx.dim(d) {
                let e = fxy.element(n, d, i as u32).clone();
                let mut acc: std::collections::HashMap<TensorElt, Scalar> = Default::default();
                // q(d e)
                for (raw, s) in differential_terms(&ring, &jj, &e).unwrap() {
                    let (canon, cs) = canonicalize(&ring, &jj, &raw);
                    let coeff = ring.mul(&s, &cs);
                    for (pair, c2) in milgram_map(&fxy, &f, &f, &canon) {
                        let entry = acc.entry(pair).or_insert_with(|| ring.zero());
                        *entry = ring.add(entry, &ring.mul(&coeff, &c2));
                    }
                }
                // - d_tensor(q e)
                for ((a, b), coeff) in milgram_map(&fxy, &f, &f, &e) {
                    for (raw, s) in differential_terms(&ring, &j, &a).unwrap() {
                        let (canon, cs) = canonicalize(&ring, &j, &raw);
                        let c = ring.mul(&coeff, &ring.mul(&s, &cs));
                        let entry = acc.entry((canon, b.clone())).or_insert_with(|| ring.zero());
                        *entry = ring.sub(entry, &c);
                    }
                    let sgn = crate::perm::cross_sign(1, a.degree());
                    for (raw, s) in differential_terms(&ring, &j, &b).unwrap() {
                        let (canon, cs) = canonicalize(&ring, &j, &raw);
                        let mut c = ring.mul(&coeff, &ring.mul(&s, &cs));
                        if sgn < 0 {
                            c = ring.neg(&c);
                        }
                        let entry = acc.entry((a.clone(), canon)).or_insert_with(|| ring.zero());
                        *entry = ring.sub(entry, &c);
                    }
                }
                acc.retain(|_, v| !ring.is_zero(v));
                assert!(acc.is_empty(), "milgram chain defect on {} level {n}", e.pretty());
            }
        }
    }
    // the induced level coproduct agrees with the closed formula
    for n in 1..=3usize {
        let cx = f.level_complex(n).clone();
        for d in cx.degrees() {
            for i in 0..cx.dim(d) {
                let e = f.element(n, d, i as u32).clone();
                let via_q = aw_level_coproduct(&fxy, &f, &e);
                let closed = aw_level_coproduct_closed(&ring, &f, &e);
                assert_eq!(via_q, closed, "level coproduct on {}", e.pretty());
            }
        }
    }
}

#[test]
fn level_coproduct_is_coassociative() {
    let ring = Ring::integers();
    let t = Trunc::new(3, 8);
    let j = LevelComonoid::unit_j(ring, t);
    let f = diffract(&j, t).unwrap();
    for n in 1..=3usize {
        let cx = f.level_complex(n).clone();
        for d in cx.degrees() {
            for i in 0..cx.dim(d) {
                let e = f.element(n, d, i as u32).clone();
                let mut acc: std::collections::HashMap<(AwElt, AwElt, AwElt), Scalar> =
                    Default::default();
                for ((a, b), c) in aw_level_coproduct_closed(&ring, &f, &e) {
                    for ((a1, a2), c2) in aw_level_coproduct_closed(&ring, &f, &a) {
                        let entry = acc
                            .entry((a1, a2, b.clone()))
                            .or_insert_with(|| ring.zero());
                        *entry = ring.add(entry, &ring.mul(&c, &c2));
                    }
                    for ((b1, b2), c2) in aw_level_coproduct_closed(&ring, &f, &b) {
                        let entry = acc
                            .entry((a.clone(), b1, b2))
                            .or_insert_with(|| ring.zero());
                        *entry = ring.sub(entry, &ring.mul(&c, &c2));
                    }
                }
                acc.retain(|_, v| !ring.is_zero(v));
                assert!(acc.is_empty(), "level coproduct coassociativity on {}", e.pretty());
            }
        }
    }
}

#[test]
fn functoriality_on_comonoid_morphisms() {
    // relabelling along the diagonal then along the two projections is
    // the identity on generators of the unit diffraction
    let e = AwElt {
        blocks: vec![AwBlock {
            level: 1,
            x: Label::gen("u0", 0),
            slots: vec![AwSlot::generator(3)],
        }],
        sigma: crate::perm::Perm::identity(3),
    };
    let d = diagonal_elt(&e);
    assert_eq!(d.blocks[0].x, Label::pair(Label::gen("u0", 0), Label::gen("u0", 0)));
}
