//! The generalized Milgram map `q` from the diffraction of a level tensor
//! product into the level tensor of the diffractions, and the level
//! coproduct it induces on the unit diffraction.

use super::{AwBlock, AwElt, AwSlot, Diffraction, LevelComonoid};
use crate::label::Label;
use crate::perm::{compositions, cross_sign, Deg, Perm};
use crate::scalar::{Ring, Scalar};
use std::collections::HashMap;

/// A term of the level tensor `Phi(X)(n) (x) Phi(Y)(n)`.
pub type TensorElt = (AwElt, AwElt);

/// The Milgram expansion of a single generator block with pair label
/// `(x, y)`: the first factor keeps `x` over new slot sizes with entry
/// widths matching the second factor's block coverages; the second factor
/// distributes the iterated coproduct of `y` over blocks whose slot sizes
/// split the original slot sizes columnwise.
pub fn milgram_on_generator(
    ring: &Ring,
    ycop: &LevelComonoid,
    block: &AwBlock,
) -> Vec<(AwBlock, AwBlock, Vec<AwBlock>, Perm, Perm, Scalar)> {
    // returns (original gen, first factor block, second factor blocks,
    // sigma1, sigma2, coeff); sigmas are at unit (arity) scale.
    let p = block.level;
    let mvec: Vec<usize> = block.slots.iter().map(|s| s.m).collect();
    let total_m: usize = mvec.iter().sum();
    let w = block.x.as_word().expect("pair label");
    let (xl, yl) = (&w[0], &w[1]);
    let mut out = Vec::new();
    let max_n = *mvec.iter().min().unwrap_or(&0);
    for n in p..=max_n {
        // first factor slot sizes
        for nvec in compositions(n, p, 1) {
            // columnwise splittings: per slot t a composition of m_t into
            // n positive parts
            let mut mats: Vec<Vec<Vec<usize>>> = vec![vec![]];
            for &mt in &mvec {
                let rows = compositions(mt, n, 1);
                let mut next = Vec::new();
                for m in &mats {
                    for row in &rows {
                        let mut m2 = m.clone();
                        m2.push(row.clone());
                        next.push(m2);
                    }
                }
                mats = next;
            }
            for mat in &mats {
                // second block v coverage
                let rv: Vec<usize> = (0..n).map(|v| (0..p).map(|t| mat[t][v]).sum()).collect();
                for (yfactors, c) in iterated_cop_level(ring, ycop, p, yl, n) {
                    // first factor: slots alpha_{n_t}; entry widths r_v in
                    // slot-major entry order (entry (t,k) is block v(t,k))
                    let mut entries_of_slot: Vec<Vec<usize>> = Vec::with_capacity(p);
                    {
                        let mut v = 0usize;
                        for &nt in &nvec {
                            let mut row = Vec::with_capacity(nt);
                            for _ in 0..nt {
                                row.push(rv[v]);
                                v += 1;
                            }
                            entries_of_slot.push(row);
                        }
                    }
                    let first = AwBlock {
                        level: p,
                        x: xl.clone(),
                        slots: nvec
                            .iter()
                            .zip(&entries_of_slot)
                            .map(|(&nt, row)| AwSlot { m: nt, r: row.clone() })
                            .collect(),
                    };
                    let seconds: Vec<AwBlock> = (0..n)
                        .map(|v| AwBlock {
                            level: p,
                            x: yfactors[v].clone(),
                            slots: (0..p)
                                .map(|t| AwSlot::generator(mat[t][v]))
                                .collect(),
                        })
                        .collect();
                    // unit-scale placement: original units are slot-major
                    // (t, u); second block v's slot t takes the v-th piece
                    // of slot t's units.
                    let mut unit_of_piece: Vec<Vec<Vec<usize>>> = Vec::new(); // [v][t] -> units
                    {
                        let mut slot_offset = vec![0usize; p];
                        let mut acc = 0;
                        for t in 0..p {
                            slot_offset[t] = acc;
                            acc += mvec[t];
                        }
                        for v in 0..n {
                            let mut per_t = Vec::with_capacity(p);
                            for t in 0..p {
                                let start: usize = mat[t][..v].iter().sum();
                                let units: Vec<usize> = (0..mat[t][v])
                                    .map(|k| slot_offset[t] + start + k)
                                    .collect();
                                per_t.push(units);
                            }
                            unit_of_piece.push(per_t);
                        }
                    }
                    // sigma2: second layout (v, t, u) -> unit
                    let mut s2_layout_to_unit = Vec::with_capacity(total_m);
                    for v in 0..n {
                        for t in 0..p {
                            for &u in &unit_of_piece[v][t] {
                                s2_layout_to_unit.push(u as u8);
                            }
                        }
                    }
                    // sigma1: first layout: entries slot-major (t,k) = block
                    // v; each entry covers block v's units sorted ascending
                    let mut s1_layout_to_unit = Vec::with_capacity(total_m);
                    {
                        let mut v = 0usize;
                        for t in 0..p {
                            for _k in 0..nvec[t] {
                                let mut units: Vec<usize> = (0..p)
                                    .flat_map(|t2| unit_of_piece[v][t2].iter().copied())
                                    .collect();
                                units.sort_unstable();
                                for u in units {
                                    s1_layout_to_unit.push(u as u8);
                                }
                                v += 1;
                            }
                        }
                    }
                    let sigma1 = Perm(s1_layout_to_unit).inverse();
                    let sigma2 = Perm(s2_layout_to_unit).inverse();
                    // signs: rearrange real symbols [x, y_0..y_{n-1},
                    // alpha-pieces slot-major (t, v)] into the target order
                    // [x | y_0, pieces (t,0) | y_1, pieces (t,1) | ..];
                    // created symbols (first-factor alphas and the n new
                    // suspensions) contribute crossing factors against the
                    // real symbols placed before them.
                    let mut degs: Vec<Deg> = Vec::new();
                    degs.push(xl.degree());
                    for f in &yfactors {
                        degs.push(f.degree());
                    }
                    let base = 1 + n;
                    for t in 0..p {
                        for v in 0..n {
                            degs.push(mat[t][v] as Deg - 1);
                        }
                    }
                    let mut pat: Vec<u8> = Vec::with_capacity(degs.len());
                    pat.push(0);
                    for v in 0..n {
                        pat.push((1 + v) as u8);
                        for t in 0..p {
                            pat.push((base + t * n + v) as u8);
                        }
                    }
                    let ks = crate::perm::koszul_sign(&degs, &Perm(pat));
                    // created: first-factor alphas (after x), then one
                    // suspension before each y_v
                    let mut created = 1i64;
                    let mut real_passed: Deg = xl.degree();
                    for &nt in &nvec {
                        created *= cross_sign(nt as Deg - 1, real_passed);
                    }
                    for v in 0..n {
                        created *= cross_sign(p as Deg - 1, real_passed);
                        real_passed += yfactors[v].degree()
                            + (0..p).map(|t| mat[t][v] as Deg - 1).sum::<Deg>();
                    }
                    let mut coeff = c.clone();
                    if ks * created < 0 {
                        coeff = ring.neg(&coeff);
                    }
                    out.push((block.clone(), first, seconds, sigma1, sigma2, coeff));
                }
            }
        }
    }
    out
}

fn iterated_cop_level(
    ring: &Ring,
    x: &LevelComonoid,
    level: usize,
    l: &Label,
    n: usize,
) -> Vec<(Vec<Label>, Scalar)> {
    let mut acc: Vec<(Vec<Label>, Scalar)> = vec![(vec![l.clone()], ring.one())];
    for _ in 1..n {
        let mut next = Vec::new();
        for (word, coeff) in &acc {
            let head = &word[0];
            for ((a, b), s) in (x.cop)(level, head) {
                let mut w = vec![a, b];
                w.extend(word[1..].iter().cloned());
                next.push((w, ring.mul(coeff, &s)));
            }
        }
        acc = next;
    }
    acc
}

/// The Milgram map on a flat basis element of the tensor diffraction.
/// `fx`, `fy` are the diffractions of the two halves; the result is a
/// dictionary of canonical tensor pairs.
pub fn milgram_map(
    fxy: &Diffraction,
    fx: &Diffraction,
    fy: &Diffraction,
    e: &AwElt,
) -> HashMap<TensorElt, Scalar> {
    let ring = fxy.ring;
    let ycop = &fy.comonoid;
    // per-block expansions on generators
    let mut parts = Vec::new();
    for b in &e.blocks {
        let gen = AwBlock {
            level: b.level,
            x: b.x.clone(),
            slots: b.slots.iter().map(|s| AwSlot::generator(s.m)).collect(),
        };
        parts.push(milgram_on_generator(&ring, ycop, &gen));
    }
    let widths: Vec<usize> =
        e.blocks.iter().flat_map(|b| b.slots.iter().flat_map(|s| s.r.iter().copied())).collect();
    let mut acc: HashMap<TensorElt, Scalar> = HashMap::new();
    let mut stack: Vec<(usize, Vec<usize>, Scalar)> = vec![(0, Vec::new(), ring.one())];
    while let Some((i, choice, coeff)) = stack.pop() {
        if i < e.blocks.len() {
            for (ci, (_, first, seconds, _, _, c)) in parts[i].iter().enumerate() {
                // interchange: the new first factor passes the second
                // factors accumulated so far
                let fdeg: Deg = first.degree();
                let sdeg: Deg = choice
                    .iter()
                    .enumerate()
                    .map(|(k, &ck)| parts[k][ck].2.iter().map(|b| b.degree()).sum::<Deg>())
                    .sum();
                let mut cc = ring.mul(&coeff, c);
                if cross_sign(fdeg, sdeg) < 0 {
                    cc = ring.neg(&cc);
                }
                let mut ch = choice.clone();
                ch.push(ci);
                stack.push((i + 1, ch, cc));
            }
            continue;
        }
        // assemble both factors at unit scale
        let mut fblocks = Vec::new();
        let mut sblocks = Vec::new();
        let mut s1parts = Vec::new();
        let mut s2parts = Vec::new();
        let mut sizes = Vec::new();
        for (k, &ck) in choice.iter().enumerate() {
            let (gen, first, seconds, s1, s2, _) = &parts[k][ck];
            fblocks.push(first.clone());
            sblocks.extend(seconds.iter().cloned());
            s1parts.push(s1.clone());
            s2parts.push(s2.clone());
            sizes.push(gen.arity());
        }
        let sigma1 = crate::perm::block_diag(&s1parts, &sizes);
        let sigma2 = crate::perm::block_diag(&s2parts, &sizes);
        let first = AwElt { blocks: fblocks, sigma: sigma1 };
        let second = AwElt { blocks: sblocks, sigma: sigma2 };
        // widen by the original inner data and apply the permutation
        let args: Vec<Perm> = widths.iter().map(|&w| Perm::identity(w)).collect();
        let (first, _) = super::right_act_elt(&ring, &first, &widths, &args);
        let (second, _) = super::right_act_elt(&ring, &second, &widths, &args);
        let first = AwElt { blocks: first.blocks, sigma: first.sigma.compose(&e.sigma) };
        let second = AwElt { blocks: second.blocks, sigma: second.sigma.compose(&e.sigma) };
        let (cf, sf) = super::canonicalize(&ring, &fx.comonoid, &first);
        let (cs, ss) = super::canonicalize(&ring, &fy.comonoid, &second);
        let sign = ring.mul(&sf, &ss);
        let entry = acc.entry((cf, cs)).or_insert_with(|| ring.zero());
        *entry = ring.add(entry, &ring.mul(&coeff, &sign));
    }
    acc.retain(|_, v| !ring.is_zero(v));
    acc
}

/// The level coproduct on the unit diffraction, computed through the
/// Milgram map: the unit comonoid's diagonal is a comonoid morphism, so
/// the composite lands in the tensor square.
pub fn aw_level_coproduct(
    fxy: &Diffraction,
    f: &Diffraction,
    e: &AwElt,
) -> HashMap<TensorElt, Scalar> {
    // relabel generators along the diagonal, then apply q
    let ring = f.ring;
    let diag = diagonal_elt(e);
    let _ = &fxy.comonoid;
    milgram_map(fxy, f, f, &diag)
}

/// The closed form of the level coproduct on unit-diffraction generators:
/// first factor `f_k` with entry widths a positive composition, second the
/// blocks of the parts.
pub fn aw_level_coproduct_closed(
    ring: &Ring,
    f: &Diffraction,
    e: &AwElt,
) -> HashMap<TensorElt, Scalar> {
    // per block f_m (with entries): sum over k and positive compositions
    let mut parts: Vec<Vec<(AwBlock, Vec<AwBlock>)>> = Vec::new();
    for b in &e.blocks {
        debug_assert_eq!(b.level, 1);
        let m = b.slots[0].m;
        let mut choices = Vec::new();
        for k in 1..=m {
            for ivec in compositions(m, k, 1) {
                // first: f_k with entries = widths of the pieces
                let mut rfirst = Vec::with_capacity(k);
                let mut seconds = Vec::with_capacity(k);
                let mut pos = 0usize;
                for &iv in &ivec {
                    let rseg: Vec<usize> = b.slots[0].r[pos..pos + iv].to_vec();
                    rfirst.push(rseg.iter().sum());
                    seconds.push(AwBlock {
                        level: 1,
                        x: b.x.clone(),
                        slots: vec![AwSlot { m: iv, r: rseg }],
                    });
                    pos += iv;
                }
                let first =
                    AwBlock { level: 1, x: b.x.clone(), slots: vec![AwSlot { m: k, r: rfirst }] };
                choices.push((first, seconds));
            }
        }
        parts.push(choices);
    }
    let mut acc: HashMap<TensorElt, Scalar> = HashMap::new();
    let mut stack: Vec<(usize, Vec<usize>, Scalar)> = vec![(0, Vec::new(), ring.one())];
    while let Some((i, choice, coeff)) = stack.pop() {
        if i < e.blocks.len() {
            for (ci, (first, seconds)) in parts[i].iter().enumerate() {
                let fdeg = first.degree();
                let sdeg: Deg = choice
                    .iter()
                    .enumerate()
                    .map(|(kk, &ck)| parts[kk][ck].1.iter().map(|b| b.degree()).sum::<Deg>())
                    .sum();
                let mut cc = coeff.clone();
                if cross_sign(fdeg, sdeg) < 0 {
                    cc = ring.neg(&cc);
                }
                let mut ch = choice.clone();
                ch.push(ci);
                stack.push((i + 1, ch, cc));
            }
            continue;
        }
        let mut fblocks = Vec::new();
        let mut sblocks = Vec::new();
        for (k, &ck) in choice.iter().enumerate() {
            fblocks.push(parts[k][ck].0.clone());
            sblocks.extend(parts[k][ck].1.iter().cloned());
        }
        let first = AwElt { blocks: fblocks, sigma: e.sigma.clone() };
        let second = AwElt { blocks: sblocks, sigma: e.sigma.clone() };
        let (cf, sf) = super::canonicalize(ring, &f.comonoid, &first);
        let (cs, ss) = super::canonicalize(ring, &f.comonoid, &second);
        let entry = acc.entry((cf, cs)).or_insert_with(|| ring.zero());
        *entry = ring.add(entry, &ring.mul(&coeff, &ring.mul(&sf, &ss)));
    }
    acc.retain(|_, v| !ring.is_zero(v));
    acc
}

/// Relabel a unit-diffraction element as an element of the tensor-square
/// diffraction along the diagonal.
pub fn diagonal_elt(e: &AwElt) -> AwElt {
    let blocks = e
        .blocks
        .iter()
        .map(|b| AwBlock {
            level: b.level,
            x: Label::pair(b.x.clone(), b.x.clone()),
            slots: b.slots.clone(),
        })
        .collect();
    AwElt { blocks, sigma: e.sigma.clone() }
}
