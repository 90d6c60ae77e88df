//! Structural laws of the symmetric-sequence products and the standard
//! operads, checked at truncation.

use coring_core::chain::{ChainComplex, ChainMap};
use coring_core::label::Label;
use coring_core::matrix::SparseMatrix;
use coring_core::operad::*;
use coring_core::perm::{all_perms, Perm};
use coring_core::scalar::{Ring, Scalar};
use coring_core::sym::*;
use std::sync::Arc;

fn trunc4() -> Trunc {
    Trunc::new(4, 10)
}

#[test]
fn associative_operad_units_and_block_composition() {
    let ring = Ring::integers();
    let a = associative_operad(ring, trunc4());
    // A(2) has rank 2 in degree 0
    assert_eq!(a.seq.complex(2).dim(0), 2);
    assert_eq!(a.seq.complex(2).total_dim(), 2);
    // gamma(delta (x) (delta^{(m)}, delta^{(n)})) = delta^{(m+n)}
    let delta = Label::Perm(Perm::identity(2));
    for (m, n) in [(1usize, 1usize), (1, 2), (2, 1), (2, 2), (1, 3), (3, 1)] {
        let v = (a.comp)(&delta, &[m, n], &[
            Label::Perm(Perm::identity(m)),
            Label::Perm(Perm::identity(n)),
        ]);
        let idx = a.seq.complex(m + n).index_of(0, &Label::Perm(Perm::identity(m + n))).unwrap();
        assert_eq!(v, vec![(idx, ring.one())], "block composition of identities");
    }
    // gamma(delta^{(1)} o x) = x for all x
    for rep in verify_operad(&a) {
        assert!(rep.ok, "{}: {:?}", rep.name, rep.witness);
    }
}

#[test]
fn associative_operad_composition_is_equivariant() {
    let ring = Ring::integers();
    let a = associative_operad(ring, Trunc::new(3, 8));
    // materializing runs the two equivariance squares on all instances
    let (_, gamma) = materialize_comp(&a).expect("gamma extends");
    assert_eq!(gamma.maps.len(), 4);
}

#[test]
fn composition_product_of_group_rings_has_expected_rank() {
    // (A o A)(2): enumerate and count by the coinvariant dimension oracle:
    // evaluating on a rank-1 dummy V gives A(A(V)) whose square-word part
    // has multiplicity 2, and the Sigma_2-coinvariants of (A o A)(2) must
    // match: rank = 2 * |Sigma_2| = 4.
    let ring = Ring::integers();
    let a = associative_operad(ring, trunc4());
    let prod = composition_product(&a.seq, &a.seq).unwrap();
    assert_eq!(prod.seq.complex(2).total_dim(), 4);
    // coinvariants of the level-2 part should be rank 2
    let lvl = prod.seq.level(2);
    let coinv = coinvariants(&lvl.complex, &lvl.action).unwrap();
    assert_eq!(coinv.quotient.total_dim(), 2);
    // gamma maps (A o A)(2) onto A(2)
    let (_, gamma) = materialize_comp(&a).unwrap();
    let m = gamma.map(2).mat(0);
    assert_eq!(coring_core::matrix::rank(&m, &ring), 2);
    // ranks across levels: rank (A o A)(n) = 2^{n-1} n!
    for n in 1..=4usize {
        let expect = (1usize << (n - 1)) * (1..=n).product::<usize>();
        assert_eq!(prod.seq.complex(n).total_dim(), expect, "level {n}");
    }
}

#[test]
fn composition_units() {
    let ring = Ring::integers();
    let a = associative_operad(ring, trunc4());
    let j = unit_sequence(UnitKind::CompositionUnit, ring, trunc4());
    // X o J and J o X have the same level dimensions as X
    let xj = composition_product(&a.seq, &j).unwrap();
    let jx = composition_product(&j, &a.seq).unwrap();
    for n in 0..=4usize {
        assert_eq!(xj.seq.complex(n).total_dim(), a.seq.complex(n).total_dim());
        assert_eq!(jx.seq.complex(n).total_dim(), a.seq.complex(n).total_dim());
    }
    // J(1) rank one in degree 0; J(2) = 0
    assert_eq!(j.complex(1).dim(0), 1);
    assert!(j.is_zero_level(2));
    // C(3) rank 1 with trivial action
    let c = unit_sequence(UnitKind::Constant, ring, trunc4());
    assert_eq!(c.complex(3).total_dim(), 1);
    assert!(c.level(3).action.gens.iter().all(|g| g.equals(&ChainMap::identity(c.complex(3)))));
}

#[test]
fn composition_is_not_symmetric() {
    // X with X(1) = R^2, Y with Y(2) = R: ranks of (X o Y)(2) and
    // (Y o X)(2) differ (2 vs 4).
    let ring = Ring::integers();
    let t = Trunc::new(3, 6);
    let x2 = ChainComplex::new(
        ring,
        0,
        vec![vec![Label::gen("x1", 0), Label::gen("x2", 0)]],
        vec![SparseMatrix::zero(0, 2)],
    )
    .unwrap();
    let x = single_level(ring, t, 1, x2.clone(), SignedAction::trivial(&x2, 1)).unwrap();
    let yc = ChainComplex::generator(ring, Label::gen("y", 0), 0);
    let y = single_level(ring, t, 2, yc.clone(), SignedAction::trivial(&yc, 2)).unwrap();
    let xy = composition_product(&x, &y).unwrap();
    let yx = composition_product(&y, &x).unwrap();
    assert_eq!(xy.seq.complex(2).total_dim(), 2);
    assert_eq!(yx.seq.complex(2).total_dim(), 4);
}

#[test]
fn graded_tensor_examples() {
    let ring = Ring::integers();
    let t = trunc4();
    let j = unit_sequence(UnitKind::CompositionUnit, ring, t);
    let u = unit_sequence(UnitKind::GradedUnit, ring, t);
    // (J (.) J)(2) has rank 2: the two cosets
    let jj = graded_tensor(&j, &j).unwrap();
    assert_eq!(jj.complex(2).total_dim(), 2);
    // U is the unit
    let a = associative_operad(ring, t);
    let ua = graded_tensor(&u, &a.seq).unwrap();
    for n in 0..=4usize {
        assert_eq!(ua.complex(n).total_dim(), a.seq.complex(n).total_dim(), "U (.) A at {n}");
    }
    // rank formula with free actions: rank (X (.) Y)(m) =
    // sum binom(m, i) rank X(i) rank Y(j)
    let aa = graded_tensor(&a.seq, &a.seq).unwrap();
    for m in 0..=4usize {
        let mut expect = 0usize;
        for i in 0..=m {
            let j = m - i;
            let binom = (1..=m).product::<usize>()
                / ((1..=i).product::<usize>() * (1..=j).product::<usize>());
            expect += a.seq.complex(i).total_dim() * a.seq.complex(j).total_dim() * binom;
        }
        assert_eq!(aa.complex(m).total_dim(), expect, "A (.) A at {m}");
    }
}

#[test]
fn level_tensor_examples() {
    let ring = Ring::integers();
    let t = trunc4();
    let a = associative_operad(ring, t);
    let c = unit_sequence(UnitKind::Constant, ring, t);
    let j = unit_sequence(UnitKind::CompositionUnit, ring, t);
    let ac = level_tensor(&a.seq, &c).unwrap();
    for n in 0..=4usize {
        assert_eq!(ac.complex(n).total_dim(), a.seq.complex(n).total_dim());
    }
    let jj = level_tensor(&j, &j).unwrap();
    assert_eq!(jj.complex(1).total_dim(), 1);
    assert!(jj.is_zero_level(2));
}

#[test]
fn suspension_operad_laws() {
    for ring in [Ring::integers(), Ring::prime_field(2).unwrap()] {
        let t = Trunc::new(5, 10);
        let s = suspension_operad(ring, t);
        assert_eq!(s.seq.complex(1).dim(0), 1);
        assert_eq!(s.seq.complex(2).dim(1), 1);
        // transposition acts by -1 (by +1 over Z/2)
        let g = &s.seq.level(2).action.gens[0];
        let entry = g.mat(1).entry(0, 0, &ring);
        assert_eq!(entry, ring.from_i64(-1));
        for rep in verify_operad(&s) {
            assert!(rep.ok, "{}: {:?}", rep.name, rep.witness);
        }
        let (_, _gamma) = materialize_comp(&s).expect("suspension composition equivariant");
    }
}

#[test]
fn adual_is_free_rank_one_twisted() {
    let ring = Ring::integers();
    let adual = adual_sequence(ring, Trunc::new(4, 10));
    for n in 1..=4usize {
        let dim: usize = (1..=n).product();
        assert_eq!(adual.complex(n).total_dim(), dim);
        assert_eq!(adual.complex(n).dim((n - 1) as i32), dim);
    }
    // the action twists by sign: s_0 sends (a2, e) to -(a2, s_0)
    let g = &adual.level(2).action.gens[0];
    let m = g.mat(1);
    let col: Vec<(u32, Scalar)> = m.columns[0].clone();
    assert_eq!(col.len(), 1);
    assert_eq!(col[0].1, Scalar::Int(-1));
}

#[test]
fn extend_family_zero_and_projection_roundtrip() {
    let ring = Ring::integers();
    let t = Trunc::new(3, 8);
    let a = associative_operad(ring, t);
    let prod = composition_product(&a.seq, &a.seq).unwrap();
    // zero family extends to the zero morphism
    let zero_fam = (0i32, |_m: usize, _s: &[usize], _x: &Label, _y: &[Label]| Vec::new());
    let z = extend_family(&prod, &a.seq, &zero_fam).unwrap();
    assert!(z.is_zero());
    // the tautological family given by orbit projection extends to the
    // identity of the product, and restricting returns the family
    let prod2 = composition_product(&a.seq, &a.seq).unwrap();
    let seq = prod2.seq.clone();
    let res = {
        let p = &prod2;
        let fam = (0i32, move |m: usize, sizes: &[usize], x: &Label, ys: &[Label]| {
            let n: usize = sizes.iter().sum();
            let term = CompTerm {
                m,
                x: x.clone(),
                pow: PowTerm {
                    nvec: sizes.to_vec(),
                    parts: ys.to_vec(),
                    rho: Perm::identity(n),
                },
            };
            let (d, i, s) = p.resolve(n, &term).unwrap();
            let _ = d;
            vec![(i, s)]
        });
        extend_family(&prod, &seq, &fam).unwrap()
    };
    let id = SymSeqMorphism::identity(&prod.seq);
    assert!(res.equals(&id), "projection family extends to the identity");
    let fam_back = restrict_family(&prod, &res);
    for ((m, nvec, x, ys), v) in fam_back {
        let n: usize = nvec.iter().sum();
        let term = CompTerm {
            m,
            x,
            pow: PowTerm { nvec: nvec.clone(), parts: ys, rho: Perm::identity(n) },
        };
        let (_, i, s) = prod.resolve(n, &term).unwrap();
        assert_eq!(v, vec![(i, s)]);
    }
}

#[test]
fn iterated_product_ranks_agree() {
    // ((X o Y) o Z)(n) vs (X o (Y o Z))(n): same dimension per degree.
    let ring = Ring::prime_field(2).unwrap();
    let t = Trunc::new(3, 8);
    let a = associative_operad(ring, t);
    let s = suspension_operad(ring, t);
    let xy = composition_product(&a.seq, &s.seq).unwrap();
    let left = composition_product(&xy.seq, &a.seq).unwrap();
    let yz = composition_product(&s.seq, &a.seq).unwrap();
    let right = composition_product(&a.seq, &yz.seq).unwrap();
    for n in 0..=3usize {
        let lc = left.seq.complex(n);
        let rc = right.seq.complex(n);
        assert_eq!(lc.total_dim(), rc.total_dim(), "level {n}");
        for d in lc.degrees() {
            assert_eq!(lc.dim(d), rc.dim(d), "level {n} degree {d}");
        }
    }
}

#[test]
fn intertwiner_on_units_and_naturality() {
    let ring = Ring::integers();
    let t = Trunc::new(3, 8);
    let j = unit_sequence(UnitKind::CompositionUnit, ring, t);
    let a = associative_operad(ring, t);
    // all arguments J: the intertwiner is an isomorphism on (J o J)
    let jj = level_tensor(&j, &j).unwrap();
    let src = composition_product(&jj, &jj).unwrap();
    let p1 = composition_product(&j, &j).unwrap();
    let p2 = composition_product(&j, &j).unwrap();
    let iota = intertwiner(&src, &p1, &p2).unwrap();
    assert_eq!(src.seq.complex(1).total_dim(), 1);
    assert!(!iota.map(1).is_zero());

    // naturality in the first argument against a morphism A (x) A -> A (x) A
    // induced by inversion... use the identity and a sign automorphism.
    let aa = level_tensor(&a.seq, &a.seq).unwrap();
    let src2 = composition_product(&aa, &aa).unwrap();
    let q1 = composition_product(&a.seq, &a.seq).unwrap();
    let q2 = composition_product(&a.seq, &a.seq).unwrap();
    let iota2 = intertwiner(&src2, &q1, &q2).unwrap();
    // the intertwiner lands in the level tensor of the products and is a
    // valid equivariant chain morphism (checked by construction); check a
    // rank: level 2 of the source has dimension 4 + 4*2 = ...
    assert!(iota2.maps.iter().any(|m| !m.is_zero()));
}

#[test]
fn tensor_bimodule_of_coalgebra() {
    // T(C) for the 7-element mod-2 coalgebra: bimodule structure verifies
    // at low levels; level 1 right action by delta is the coproduct.
    let f2 = Ring::prime_field(2).unwrap();
    let coalg = example_coalgebra(f2);
    let a = associative_operad(f2, Trunc::new(3, 9));
    let tc = embed_tensor(&coalg, &a, Trunc::new(3, 9)).unwrap();
    assert_eq!(tc.module.carrier.complex(0).total_dim(), 1);
    assert_eq!(
        tc.module.carrier.complex(1).total_dim(),
        coalg.complex.total_dim()
    );
    // right action at n=1 with delta equals the coproduct
    let right = tc.module.right.as_ref().unwrap();
    let delta = Label::Perm(Perm::identity(2));
    let w = Label::word(vec![Label::gen("w", 6)]);
    let img = right(&w, &[2], &[delta]);
    // psi(w) = w(x)1 + 1(x)w + x(x)z + z(x)y
    let c2 = tc.module.carrier.complex(2);
    let expect: Vec<Label> = vec![
        Label::word(vec![Label::gen("w", 6), Label::gen("1", 0)]),
        Label::word(vec![Label::gen("1", 0), Label::gen("w", 6)]),
        Label::word(vec![Label::gen("x", 3), Label::gen("z", 3)]),
        Label::word(vec![Label::gen("z", 3), Label::gen("y", 3)]),
    ];
    let mut expect_idx: Vec<u32> =
        expect.iter().map(|l| c2.index_of(6, l).unwrap()).collect();
    expect_idx.sort();
    let got: Vec<u32> = img.iter().map(|(i, _)| *i).collect();
    assert_eq!(got, expect_idx);

    // module axioms at levels <= 3
    for rep in verify_left_module(&tc.module) {
        assert!(rep.ok, "{}: {:?}", rep.name, rep.witness);
    }
    for rep in verify_right_module(&tc.module) {
        assert!(rep.ok, "{}: {:?}", rep.name, rep.witness);
    }
    let rep = verify_bimodule_compat(&tc.module);
    assert!(rep.ok, "{}: {:?}", rep.name, rep.witness);
    // equivariance of both actions
    materialize_left(&tc.module).expect("left action equivariant");
    materialize_right(&tc.module).expect("right action equivariant");
}

/// The counital 7-generator mod-2 coalgebra used across the suites:
/// generators 1, u2, x3, y3, z3, v4, w6 with dv = x + y,
/// psi-bar(v) = u (x) u, psi-bar(w) = x (x) z + z (x) y, counit on 1.
pub fn example_coalgebra(ring: Ring) -> ChainCoalgebra {
    let one = ring.one();
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
        SparseMatrix::from_entries(3, 1, &ring, [(0, 0, one.clone()), (1, 0, one)]),
        SparseMatrix::zero(1, 0),
        SparseMatrix::zero(0, 1),
    ];
    let complex = ChainComplex::new(ring, 0, bases, diffs).unwrap();
    let r = ring;
    let cop = Arc::new(move |l: &Label| {
        let unit = Label::gen("1", 0);
        let name = format!("{l}");
        let mut out: Vec<((Label, Label), Scalar)> = vec![
            ((unit.clone(), l.clone()), r.one()),
            ((l.clone(), unit.clone()), r.one()),
        ];
        if name == "1" {
            // psi(1) = 1 (x) 1: the two terms above double-count
            out = vec![((unit.clone(), unit.clone()), r.one())];
        } else if name == "v" {
            out.push(((Label::gen("u", 2), Label::gen("u", 2)), r.one()));
        } else if name == "w" {
            out.push(((Label::gen("x", 3), Label::gen("z", 3)), r.one()));
            out.push(((Label::gen("z", 3), Label::gen("y", 3)), r.one()));
        }
        out
    });
    ChainCoalgebra { complex, cop, name: "M".into() }
}

#[test]
fn example_coalgebra_is_coassociative() {
    let f2 = Ring::prime_field(2).unwrap();
    example_coalgebra(f2).validate().expect("coassociative counital coalgebra");
}

#[test]
fn const_embedding_and_sign_endomorphism() {
    let f2 = Ring::prime_field(2).unwrap();
    let q = Ring::rationals();
    for ring in [f2, q] {
        let alg = small_algebra(ring);
        let a = associative_operad(ring, Trunc::new(3, 8));
        let c = embed_const(&alg, &a, Trunc::new(3, 8)).unwrap();
        assert_eq!(c.carrier.complex(0).total_dim(), 0);
        for rep in verify_left_module(&c) {
            assert!(rep.ok, "{}: {:?}", rep.name, rep.witness);
        }
        materialize_left(&c).expect("left action equivariant");
        let z = embed_trivial(&alg, &a, Trunc::new(3, 8)).unwrap();
        for rep in verify_left_module(&z) {
            assert!(rep.ok, "{}: {:?}", rep.name, rep.witness);
        }
        // the sign-alternating endomorphism F_n = (-1)^n id is a module
        // morphism of c(A) that is not c(g) for any algebra map g
        let m = &c;
        let mats: Vec<ChainMap> = (0..=3usize)
            .map(|n| {
                let cx = m.carrier.complex(n);
                let sign = if n % 2 == 1 { ring.neg(&ring.one()) } else { ring.one() };
                ChainMap::from_fn(cx.clone(), cx.clone(), 0, |_, l| {
                    vec![(l.clone(), sign.clone())]
                })
                .unwrap()
            })
            .collect();
        let f = SymSeqMorphism::new(m.carrier.clone(), m.carrier.clone(), 0, mats).unwrap();
        // module-morphism condition: commutes with the action on samples
        let left = m.left.as_ref().unwrap();
        let delta = Label::Perm(Perm::identity(2));
        let c1 = m.carrier.complex(1);
        let d0 = c1.lower;
        let lab = &c1.basis(d0)[0];
        let act = left(&delta, &[1, 1], &[lab.clone(), lab.clone()]);
        // f(act) = act with sign (-1)^2; lambda(delta; f a, f a) = act * (-1)^2
        let f2m = f.map(2).mat(2 * d0);
        let lhs = f2m.apply(&act, &ring);
        let s = ring.mul(&ring.neg(&ring.one()), &ring.neg(&ring.one()));
        let rhs = coring_core::matrix::sv_scale(&ring, &s, &act);
        assert_eq!(lhs, rhs);
        // and f at level 1 is -id while at level 2 it is +id: not constant,
        // hence not of the form c(g)
        assert!(ring.is_field());
        if !matches!(ring.kind, coring_core::RingKind::PrimeField(2)) {
            assert!(!f.map(1).equals(&f.map(2)) || c1.total_dim() == 0);
        }
    }
}

fn small_algebra(ring: Ring) -> ChainAlgebra {
    // A = R{a1, b2} with a*a = b, all other products zero; d = 0.
    // associativity: (aa)a = ba = 0 and a(aa) = ab = 0.
    let complex = ChainComplex::new(
        ring,
        1,
        vec![vec![Label::gen("a", 1)], vec![Label::gen("b", 2)]],
        vec![SparseMatrix::zero(0, 1), SparseMatrix::zero(1, 1)],
    )
    .unwrap();
    let r = ring;
    let mul = Arc::new(move |x: &Label, y: &Label| {
        if format!("{x}") == "a" && format!("{y}") == "a" {
            vec![(Label::gen("b", 2), r.one())]
        } else {
            vec![]
        }
    });
    ChainAlgebra { complex, mul, name: "E".into() }
}

#[test]
fn cosimplicial_identities_and_cup_pairing() {
    let f2 = Ring::prime_field(2).unwrap();
    let coalg = example_coalgebra(f2);
    let a = associative_operad(f2, Trunc::new(4, 12));
    let tc = embed_tensor(&coalg, &a, Trunc::new(4, 12)).unwrap();
    // central element: the coaugmentation 1 in T(M)(1)
    let c1 = tc.module.carrier.complex(1);
    let v = CentralElement {
        value: vec![(c1.index_of(0, &Label::word(vec![Label::gen("1", 0)])).unwrap(), f2.one())],
    };
    assert!(is_central(&tc.module, &v).unwrap());
    // d^i d^j = d^j d^{i-1} for i > j at levels <= 3
    for n in 1..=2usize {
        for i in 0..=(n + 2) {
            for j in 0..i {
                let di = coface(&tc.module, &v, n + 1, if i <= n + 2 { i } else { i }).unwrap();
                let dj = coface(&tc.module, &v, n, j).unwrap();
                let lhs = di.compose(&dj).unwrap();
                let dj2 = coface(&tc.module, &v, n + 1, j).unwrap();
                let di2 = coface(&tc.module, &v, n, i - 1).unwrap();
                let rhs = dj2.compose(&di2).unwrap();
                assert!(lhs.equals(&rhs), "cosimplicial identity d^{i} d^{j} at level {n}");
            }
        }
    }
    // d^1 on level 1 equals the coproduct
    let d1 = coface(&tc.module, &v, 1, 1).unwrap();
    let w = Label::word(vec![Label::gen("w", 6)]);
    let iw = c1.index_of(6, &w).unwrap();
    let img = d1.mat(6).columns[iw as usize].clone();
    assert_eq!(img.len(), 4, "psi(w) has four terms");
    // cup pairing conditions
    let phi11 = cup_pairing(&tc.module, 1, 1).unwrap();
    let phi21 = cup_pairing(&tc.module, 2, 1).unwrap();
    let phi12 = cup_pairing(&tc.module, 1, 2).unwrap();
    let u = Label::word(vec![Label::gen("u", 2)]);
    // (1) d^i phi_{1,1} = phi_{2,1}(d^i (x) 1) for i <= 1
    let left = {
        let val = phi11(&u, &w);
        let d1m = coface(&tc.module, &v, 2, 1).unwrap();
        d1m.mat(8).apply(&val, &f2)
    };
    let right = {
        let du = d1.mat(2).columns[c1.index_of(2, &u).unwrap() as usize].clone();
        let c2 = tc.module.carrier.complex(2);
        let mut acc = Vec::new();
        for (idx, s) in du {
            let l2 = c2.basis(2)[idx as usize].clone();
            for (r, t) in phi21(&l2, &w) {
                acc.push((r, f2.mul(&s, &t)));
            }
        }
        acc.sort_by_key(|(i, _)| *i);
        acc
    };
    assert_eq!(left, right, "cup condition (1), i = 1");
    // (2) phi_{2,1}(d^{2} (x) 1) = phi_{1,2}(1 (x) d^0)
    let lhs2 = {
        let d2m = coface(&tc.module, &v, 1, 2).unwrap();
        let du = d2m.mat(2).columns[c1.index_of(2, &u).unwrap() as usize].clone();
        let c2 = tc.module.carrier.complex(2);
        let mut acc = Vec::new();
        for (idx, s) in du {
            let l2 = c2.basis(2)[idx as usize].clone();
            for (r, t) in phi21(&l2, &w) {
                acc.push((r, f2.mul(&s, &t)));
            }
        }
        acc.sort_by_key(|(i, _)| *i);
        acc
    };
    let rhs2 = {
        let d0m = coface(&tc.module, &v, 1, 0).unwrap();
        let dw = d0m.mat(6).columns[c1.index_of(6, &w).unwrap() as usize].clone();
        let c2 = tc.module.carrier.complex(2);
        let mut acc = Vec::new();
        for (idx, s) in dw {
            let l2 = c2.basis(6)[idx as usize].clone();
            let _ = &l2;
            for (r, t) in phi12(&u, &c2.basis(6)[idx as usize]) {
                acc.push((r, f2.mul(&s, &t)));
            }
        }
        acc.sort_by_key(|(i, _)| *i);
        acc
    };
    assert_eq!(lhs2, rhs2, "cup condition (2)");
}
