use coring_core::chain::ChainComplex;
use coring_core::diffract::*;
use coring_core::label::Label;
use coring_core::matrix::SparseMatrix;
use coring_core::perm::Perm;
use coring_core::scalar::{Ring, Scalar};
use coring_core::sym::{SignedAction, SymmetricSequence, Trunc};
use std::sync::Arc;

fn show(t: &NestedElt) -> String {
    let up = AwElt { blocks: t.layers[0].clone(), sigma: Perm::identity(0) };
    let lo = AwElt { blocks: t.layers[1].clone(), sigma: t.sigma.clone() };
    format!("{} (o) {}", up.encode(), lo.encode())
}

fn interval(ring: Ring, trunc: Trunc) -> LevelComonoid {
    let c1 = ChainComplex::new(
        ring, 0,
        vec![vec![Label::gen("u0", 0), Label::gen("v0", 0)], vec![Label::gen("e1", 1)]],
        vec![SparseMatrix::zero(0, 2),
             SparseMatrix::from_entries(2, 1, &ring, [(0, 0, Scalar::Int(-1)), (1, 0, Scalar::Int(1))])],
    ).unwrap();
    let carrier = SymmetricSequence::from_levels(
        ring, trunc, vec![(1, c1.clone(), SignedAction::trivial(&c1, 1))], true).unwrap();
    let one = ring.one();
    LevelComonoid {
        carrier,
        cop: Arc::new(move |_l, l| {
            let name = format!("{l}");
            let g = |n: &str, d: i32| Label::gen(n, d);
            match name.as_str() {
                "u0" => vec![((g("u0",0), g("u0",0)), one.clone())],
                "v0" => vec![((g("v0",0), g("v0",0)), one.clone())],
                "e1" => vec![((g("u0",0), g("e1",1)), one.clone()), ((g("e1",1), g("v0",0)), one.clone())],
                _ => panic!(),
            }
        }),
        unit: Some(Label::gen("u0", 0)),
        name: "I".into(),
    }
}

fn side_by_side(f: &Diffraction, x: &LevelComonoid, e: &AwElt) {
    use std::collections::HashMap;
    let ring = f.ring;
    let mut psid: HashMap<NestedElt, coring_core::scalar::Scalar> = HashMap::new();
    for (raw, s) in coring_core::diffract::differential_terms(&ring, x, e).unwrap() {
        let (canon, cs) = canonicalize(&ring, x, &raw);
        if f.index_of(e.level(), &canon).is_none() { continue; }
        let coeff = ring.mul(&s, &cs);
        for (nested, c2) in psi_expand(f, &NestedElt::from_flat(&canon), 0) {
            accumulate(&ring, x, &mut psid, &nested, &ring.mul(&coeff, &c2));
        }
    }
    psid.retain(|_, v| !ring.is_zero(v));
    let mut dpsi: HashMap<NestedElt, coring_core::scalar::Scalar> = HashMap::new();
    for (nested, coeff) in psi_elt(f, e) {
        for (raw, s) in nested_differential(f, &nested).unwrap() {
            accumulate(&ring, x, &mut dpsi, &raw, &ring.mul(&coeff, &s));
        }
    }
    dpsi.retain(|_, v| !ring.is_zero(v));
    println!("psi(d e):");
    let mut k1: Vec<_> = psid.iter().collect(); k1.sort_by_key(|(t, _)| format!("{t:?}"));
    for (t, c) in k1 { println!("   {c} * {}", show(t)); }
    println!("d(psi e):");
    let mut k2: Vec<_> = dpsi.iter().collect(); k2.sort_by_key(|(t, _)| format!("{t:?}"));
    for (t, c) in k2 { println!("   {c} * {}", show(t)); }
}

fn main() {
    let ring = Ring::integers();
    let t = Trunc::new(2, 6);
    let x = interval(ring, t);
    let f = diffract(&x, t).unwrap();
    // the e1 two-slot element at sigma = id
    let e = f.generator(1, &Label::gen("e1", 1), &[2]);
    side_by_side(&f, &x, &e);
}
