//! The co-ring structure on a diffraction: the coproduct into the
//! composite over the associative operad, its counit for the unit comonoid,
//! and the associated checks.
//!
//! Composites `Phi o_A Phi o_A ...` are represented as nested words: a list
//! of layers of blocks. The inner composition entries of a block in layer
//! `d` count consecutive blocks of layer `d+1` (its run); entries of the
//! last layer count final positions, which the global permutation places.
//! Freeness over the operad makes that a basis once elements are put in
//! canonical form, so identities are checked by accumulating canonical
//! terms in dictionaries.

use super::{AwBlock, AwElt, AwSlot, Diffraction, LevelComonoid};
use crate::label::Label;
use crate::perm::{block_perm, compositions, cross_sign, koszul_sign, Deg, Perm};
use crate::scalar::{Ring, Scalar};
use crate::sym::SymError;
use std::collections::HashMap;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NestedElt {
    pub layers: Vec<Vec<AwBlock>>,
    pub sigma: Perm,
}

impl NestedElt {
    pub fn from_flat(e: &AwElt) -> Self {
        NestedElt { layers: vec![e.blocks.clone()], sigma: e.sigma.clone() }
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn degree(&self) -> Deg {
        self.layers.iter().flat_map(|l| l.iter()).map(|b| b.degree()).sum()
    }

    /// Final level: positions covered by the last layer.
    pub fn level(&self) -> usize {
        self.layers.last().map(|l| l.iter().map(|b| b.coverage()).sum()).unwrap_or(0)
    }

    /// Final-position coverage of each block in layer `d`.
    fn final_coverages(&self, d: usize) -> Vec<usize> {
        let mut cov: Vec<usize> =
            self.layers[self.depth() - 1].iter().map(|b| b.coverage()).collect();
        for layer in (d..self.depth() - 1).rev() {
            let mut out = Vec::with_capacity(self.layers[layer].len());
            let mut idx = 0usize;
            for b in &self.layers[layer] {
                let mut w = 0usize;
                for _ in 0..b.coverage() {
                    w += cov[idx];
                    idx += 1;
                }
                out.push(w);
            }
            cov = out;
        }
        cov
    }
}

/// Slot swap inside block `bi` of layer `d`: the block-level symmetric
/// group coinvariants.
fn nested_slot_swap(
    ring: &Ring,
    x: &LevelComonoid,
    e: &NestedElt,
    d: usize,
    bi: usize,
    si: usize,
) -> Option<(NestedElt, Scalar)> {
    let b = &e.layers[d][bi];
    let p = b.level;
    let tau = Perm::adjacent(p, si);
    let cx = x.carrier.complex(p);
    let dx = b.x.degree();
    let xi = cx.index_of(dx, &b.x)?;
    let (nxi, xsign) = x.carrier.level(p).action.apply_perm(ring, dx, xi, &tau).ok()?;
    let nx = cx.basis(dx)[nxi as usize].clone();
    let mut sign = xsign;
    if b.slots[si].degree() % 2 != 0 && b.slots[si + 1].degree() % 2 != 0 {
        sign = ring.neg(&sign);
    }
    let before: usize = e.layers[d][..bi].iter().map(|b2| b2.coverage()).sum::<usize>()
        + b.slots[..si].iter().map(|s| s.coverage()).sum::<usize>();
    let (wi, wj) = (b.slots[si].coverage(), b.slots[si + 1].coverage());
    let segments = vec![(before + wi, before + wi + wj), (before, before + wi)];
    let (deeper, sigma, dsign) = regroup_deeper(ring, e, d, &segments);
    let mut layers = deeper;
    sign = ring.mul(&sign, &dsign);
    let mut slots = b.slots.clone();
    slots.swap(si, si + 1);
    layers[d][bi] = AwBlock { level: p, x: nx, slots };
    Some((NestedElt { layers, sigma }, sign))
}

/// Canonical form over the structural symmetries; the scalar relates the
/// raw input to the canonical element (signs are self-inverse units).
pub fn canonicalize_nested(
    ring: &Ring,
    x: &LevelComonoid,
    raw: &NestedElt,
) -> (NestedElt, Scalar) {
    if raw.layers.iter().all(|l| l.iter().all(|b| b.level == 1)) {
        return (raw.clone(), ring.one());
    }
    let mut best: Option<(NestedElt, Scalar)> = None;
    let mut seen: HashMap<NestedElt, Scalar> = HashMap::new();
    seen.insert(raw.clone(), ring.one());
    let mut stack = vec![(raw.clone(), ring.one())];
    while let Some((e, sign)) = stack.pop() {
        match &best {
            None => best = Some((e.clone(), sign.clone())),
            Some((b, _)) => {
                if (&e.layers, &e.sigma) < (&b.layers, &b.sigma) {
                    best = Some((e.clone(), sign.clone()));
                }
            }
        }
        for d in 0..e.depth() {
            for bi in 0..e.layers[d].len() {
                for si in 0..e.layers[d][bi].slots.len().saturating_sub(1) {
                    if let Some((e2, s2)) = nested_slot_swap(ring, x, &e, d, bi, si) {
                        if !seen.contains_key(&e2) {
                            let s = ring.mul(&sign, &s2);
                            seen.insert(e2.clone(), s.clone());
                            stack.push((e2, s));
                        }
                    }
                }
            }
        }
    }
    best.expect("canonical nested form")
}

/// Accumulate `coeff * canonical(raw)` into a dictionary.
pub fn accumulate(
    ring: &Ring,
    x: &LevelComonoid,
    acc: &mut HashMap<NestedElt, Scalar>,
    raw: &NestedElt,
    coeff: &Scalar,
) {
    let (canon, sign) = canonicalize_nested(ring, x, raw);
    let e = acc.entry(canon).or_insert_with(|| ring.zero());
    *e = ring.add(e, &ring.mul(coeff, &sign));
}

/// Rearrange the content deeper than layer `d` so that the entry ranges in
/// `segments` (old offsets, in entry units of layer `d`) appear in the
/// listed order. Everything outside the union (which must be a contiguous
/// interval) is untouched. Adjusts sigma, returns the layer-major Koszul
/// sign of the induced reordering.
fn regroup_deeper(
    ring: &Ring,
    e: &NestedElt,
    d: usize,
    segments: &[(usize, usize)],
) -> (Vec<Vec<AwBlock>>, Perm, Scalar) {
    let mut layers = e.layers.clone();
    let mut sign = ring.one();
    let mut segs: Vec<(usize, usize)> = segments.to_vec();
    for layer in (d + 1)..e.depth() {
        let blocks = &e.layers[layer];
        let lo = segs.iter().map(|s| s.0).min().unwrap_or(0);
        let hi = segs.iter().map(|s| s.1).max().unwrap_or(0);
        let degs: Vec<Deg> = segs
            .iter()
            .map(|&(a, b)| blocks[a..b].iter().map(|x| x.degree()).sum())
            .collect();
        for i in 0..segs.len() {
            for j in (i + 1)..segs.len() {
                if segs[i].0 > segs[j].0 && degs[i] % 2 != 0 && degs[j] % 2 != 0 {
                    sign = ring.neg(&sign);
                }
            }
        }
        let mut nl = Vec::with_capacity(blocks.len());
        nl.extend(blocks[..lo].iter().cloned());
        for &(a, b) in &segs {
            nl.extend(blocks[a..b].iter().cloned());
        }
        nl.extend(blocks[hi..].iter().cloned());
        layers[layer] = nl;
        // push segments one layer deeper (entry units of this layer)
        let mut cum: Vec<usize> = Vec::with_capacity(blocks.len() + 1);
        let mut acc = 0usize;
        for b in blocks {
            cum.push(acc);
            acc += b.coverage();
        }
        cum.push(acc);
        segs = segs.iter().map(|&(a, b)| (cum[a], cum[b])).collect();
    }
    // final positions: adjust sigma by the same regrouping
    let n = e.level();
    let lo = segs.iter().map(|s| s.0).min().unwrap_or(0);
    let mut iota: Vec<u8> = (0..n as u8).collect();
    let mut newpos = lo;
    for &(a, b) in &segs {
        for v in a..b {
            iota[newpos] = v as u8;
            newpos += 1;
        }
    }
    let sigma = e.sigma.compose(&Perm(iota));
    (layers, sigma, sign)
}

/// All coproduct expansions of one block of layer `d`: the upper
/// replacement block, the lower blocks to insert, the entry segments of
/// the original block footprint in piece order, and the sign.
fn psi_block_terms(
    ring: &Ring,
    x: &LevelComonoid,
    e: &NestedElt,
    d: usize,
    bi: usize,
) -> Vec<(AwBlock, Vec<AwBlock>, Vec<(usize, usize)>, Scalar)> {
    let b = &e.layers[d][bi];
    let p = b.level;
    let mvec: Vec<usize> = b.slots.iter().map(|s| s.m).collect();
    let offset: usize = e.layers[d][..bi].iter().map(|b2| b2.coverage()).sum();
    let mut out = Vec::new();
    let max_ell = *mvec.iter().min().unwrap_or(&0);
    for ell in 1..=max_ell {
        let mut mats: Vec<Vec<Vec<usize>>> = vec![vec![]];
        for &mt in &mvec {
            let rows = compositions(mt, ell, 1);
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
        for lvec in compositions(ell, p, 1) {
            for mat in &mats {
                for (factors, c) in iterated_cop(ring, x, p, &b.x, ell + 1) {
                    let upper = AwBlock {
                        level: p,
                        x: factors[0].clone(),
                        slots: lvec.iter().map(|&l| AwSlot::generator(l)).collect(),
                    };
                    // lower block j: slots take the j-th piece of each
                    // original slot, carrying its entry subsegment
                    let mut lowers = Vec::with_capacity(ell);
                    let mut segments = Vec::new();
                    for j in 0..ell {
                        let mut slots = Vec::with_capacity(p);
                        for (t, slot) in b.slots.iter().enumerate() {
                            let start: usize = mat[t][..j].iter().sum();
                            let len = mat[t][j];
                            slots.push(AwSlot {
                                m: len,
                                r: slot.r[start..start + len].to_vec(),
                            });
                            // entry segment in layer-d entry units
                            let ent_before: usize = b.slots[..t]
                                .iter()
                                .map(|s| s.coverage())
                                .sum::<usize>()
                                + slot.r[..start].iter().sum::<usize>();
                            let width: usize = slot.r[start..start + len].iter().sum();
                            segments.push((offset + ent_before, offset + ent_before + width));
                        }
                        lowers.push(AwBlock { level: p, x: factors[j + 1].clone(), slots });
                    }
                    // Koszul of rearranging [x0..x_ell, alpha pieces
                    // slot-major] to [x0 | x1, col 1 | x2, col 2 | ..]
                    let mut degs: Vec<Deg> = factors.iter().map(|f| f.degree()).collect();
                    let base = factors.len();
                    for t in 0..p {
                        for j in 0..ell {
                            degs.push(mat[t][j] as Deg - 1);
                        }
                    }
                    let mut pat: Vec<u8> = Vec::with_capacity(degs.len());
                    pat.push(0);
                    for j in 0..ell {
                        pat.push((1 + j) as u8);
                        for t in 0..p {
                            pat.push((base + t * ell + j) as u8);
                        }
                    }
                    let ks = koszul_sign(&degs, &Perm(pat));
                    // staircase signs fixed by the chain-map requirement:
                    // the alpha part of lower column j passes the remaining
                    // (ell - 1 - j) column units, and its generator part
                    // passes (ell - 1) units plus the alpha parts of the
                    // earlier columns.
                    let col_alpha = |j: usize| -> i64 {
                        (0..p).map(|t| mat[t][j] as i64 - 1).sum()
                    };
                    let mut stair = 0i64;
                    let mut alpha_before = 0i64;
                    for j in 0..ell {
                        stair += (ell as i64 - 1 - j as i64) * col_alpha(j);
                        stair += (ell as i64 - 1 + alpha_before)
                            * factors[j + 1].degree() as i64;
                        alpha_before += col_alpha(j);
                    }
                    let mut coeff = c.clone();
                    if ks * (if stair % 2 != 0 { -1 } else { 1 }) < 0 {
                        coeff = ring.neg(&coeff);
                    }
                    out.push((upper, lowers, segments, coeff));
                }
            }
        }
    }
    out
}

fn iterated_cop(
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

/// Apply the coproduct to every block of one layer, producing raw terms
/// one layer deeper.
pub fn psi_expand(f: &Diffraction, e: &NestedElt, layer: usize) -> Vec<(NestedElt, Scalar)> {
    let ring = f.ring;
    let x = &f.comonoid;
    let blocks = &e.layers[layer];
    if blocks.is_empty() {
        return Vec::new();
    }
    let parts: Vec<Vec<(AwBlock, Vec<AwBlock>, Vec<(usize, usize)>, Scalar)>> =
        (0..blocks.len()).map(|bi| psi_block_terms(&ring, x, e, layer, bi)).collect();
    let mut out = Vec::new();
    // choose one expansion per block
    let mut stack: Vec<(usize, Vec<usize>, Scalar)> = vec![(0, Vec::new(), ring.one())];
    while let Some((i, choice, coeff)) = stack.pop() {
        if i < blocks.len() {
            for (ci, (u, l, _, c)) in parts[i].iter().enumerate() {
                // interchange: the new upper passes the lowers of earlier blocks
                let udeg: Deg = u.degree();
                let ldeg: Deg = choice
                    .iter()
                    .enumerate()
                    .map(|(k, &ck)| {
                        parts[k][ck].1.iter().map(|b| b.degree()).sum::<Deg>()
                    })
                    .sum();
                let mut cc = ring.mul(&coeff, c);
                if cross_sign(udeg, ldeg) < 0 {
                    cc = ring.neg(&cc);
                }
                let mut ch = choice.clone();
                ch.push(ci);
                stack.push((i + 1, ch, cc));
            }
            continue;
        }
        // assemble: segments across all blocks, uppers, lowers
        let mut segments = Vec::new();
        let mut uppers = Vec::new();
        let mut lowers = Vec::new();
        for (k, &ck) in choice.iter().enumerate() {
            let (u, l, segs, _) = &parts[k][ck];
            uppers.push(u.clone());
            lowers.extend(l.iter().cloned());
            segments.extend(segs.iter().cloned());
        }
        let (deeper, sigma, dsign) = regroup_deeper(&ring, e, layer, &segments);
        let mut layers = Vec::with_capacity(e.depth() + 1);
        layers.extend(deeper[..layer].iter().cloned());
        layers.push(uppers);
        layers.push(lowers);
        layers.extend(deeper[layer + 1..].iter().cloned());
        out.push((NestedElt { layers, sigma }, ring.mul(&coeff, &dsign)));
    }
    out
}

/// The coproduct of a flat basis element, canonicalized into a dictionary
/// of depth-2 terms.
pub fn psi_elt(f: &Diffraction, e: &AwElt) -> HashMap<NestedElt, Scalar> {
    let ring = f.ring;
    let x = &f.comonoid;
    let mut acc: HashMap<NestedElt, Scalar> = HashMap::new();
    for (raw, c) in psi_expand(f, &NestedElt::from_flat(e), 0) {
        accumulate(&ring, x, &mut acc, &raw, &c);
    }
    acc.retain(|_, s| !ring.is_zero(s));
    acc
}

/// Counit of the unit-comonoid diffraction: nonzero only on elements all
/// of whose blocks are unit blocks; the value is the permutation.
pub fn aw_counit(f: &Diffraction, e: &AwElt) -> Option<Perm> {
    f.comonoid.unit.as_ref()?;
    if e.blocks.iter().all(|b| b.level == 1 && b.slots.len() == 1 && b.slots[0].m == 1) {
        Some(e.sigma.clone())
    } else {
        None
    }
}

fn is_unit_block(b: &AwBlock) -> bool {
    b.level == 1 && b.slots.len() == 1 && b.slots[0].m == 1
}

/// `(counit o_A id) psi - id` on a basis element, as a dictionary of flat
/// canonical terms; empty when the left counit law holds there.
pub fn counit_defect(f: &Diffraction, e: &AwElt) -> HashMap<AwElt, Scalar> {
    let ring = f.ring;
    let x = &f.comonoid;
    let mut acc: HashMap<AwElt, Scalar> = HashMap::new();
    for (nested, coeff) in psi_elt(f, e) {
        if !nested.layers[0].iter().all(is_unit_block) {
            continue;
        }
        // the resulting operad element acts from the left: forget grouping
        let flat = AwElt { blocks: nested.layers[1].clone(), sigma: nested.sigma.clone() };
        let (canon, s) = super::canonicalize(&ring, x, &flat);
        let entry = acc.entry(canon).or_insert_with(|| ring.zero());
        *entry = ring.add(entry, &ring.mul(&coeff, &s));
    }
    let (canon, s) = super::canonicalize(&ring, x, e);
    let entry = acc.entry(canon).or_insert_with(|| ring.zero());
    *entry = ring.sub(entry, &s);
    acc.retain(|_, v| !ring.is_zero(v));
    acc
}

/// `(id o_A counit) psi - id`, dual to `counit_defect`.
pub fn counit_defect_right(f: &Diffraction, e: &AwElt) -> HashMap<AwElt, Scalar> {
    let ring = f.ring;
    let x = &f.comonoid;
    let mut acc: HashMap<AwElt, Scalar> = HashMap::new();
    for (nested, coeff) in psi_elt(f, e) {
        if !nested.layers[1].iter().all(is_unit_block) {
            continue;
        }
        // the lower operad elements act from the right: widen the upper
        // entries by the lower coverages
        let widths: Vec<usize> = nested.layers[1].iter().map(|b| b.coverage()).collect();
        let mut blocks = Vec::with_capacity(nested.layers[0].len());
        let mut pos = 0usize;
        for b in &nested.layers[0] {
            let mut slots = Vec::with_capacity(b.slots.len());
            for s in &b.slots {
                let mut r = Vec::with_capacity(s.m);
                for &entry in &s.r {
                    let w: usize = widths[pos..pos + entry].iter().sum();
                    r.push(w);
                    pos += entry;
                }
                slots.push(AwSlot { m: s.m, r });
            }
            blocks.push(AwBlock { level: b.level, x: b.x.clone(), slots });
        }
        let flat = AwElt { blocks, sigma: nested.sigma.clone() };
        let (canon, s) = super::canonicalize(&ring, x, &flat);
        let entry = acc.entry(canon).or_insert_with(|| ring.zero());
        *entry = ring.add(entry, &ring.mul(&coeff, &s));
    }
    let (canon, s) = super::canonicalize(&ring, x, e);
    let entry = acc.entry(canon).or_insert_with(|| ring.zero());
    *entry = ring.sub(entry, &s);
    acc.retain(|_, v| !ring.is_zero(v));
    acc
}

/// `(psi o_A id) psi - (id o_A psi) psi` as depth-3 dictionaries; empty
/// when coassociativity holds on the element.
pub fn coassoc_defect(f: &Diffraction, e: &AwElt) -> HashMap<NestedElt, Scalar> {
    let ring = f.ring;
    let x = &f.comonoid;
    let mut acc: HashMap<NestedElt, Scalar> = HashMap::new();
    for (nested, coeff) in psi_elt(f, e) {
        for (n3, c3) in psi_expand(f, &nested, 0) {
            accumulate(&ring, x, &mut acc, &n3, &ring.mul(&coeff, &c3));
        }
        for (n3, c3) in psi_expand(f, &nested, 1) {
            accumulate(&ring, x, &mut acc, &n3, &ring.neg(&ring.mul(&coeff, &c3)));
        }
    }
    acc.retain(|_, v| !ring.is_zero(v));
    acc
}

/// `psi(d e) - d(psi e)` as a depth-2 dictionary; empty when the coproduct
/// is a chain map on the element.
pub fn chain_defect(f: &Diffraction, n: usize, e: &AwElt) -> Result<HashMap<NestedElt, Scalar>, SymError> {
    let ring = f.ring;
    let x = &f.comonoid;
    let mut acc: HashMap<NestedElt, Scalar> = HashMap::new();
    // psi(d e)
    for (raw, s) in super::differential_terms(&ring, x, e)? {
        let (canon, cs) = super::canonicalize(&ring, x, &raw);
        if f.index_of(n, &canon).is_none() {
            // degree-truncated term: skip consistently on both sides
            continue;
        }
        let coeff = ring.mul(&s, &cs);
        for (nested, c2) in psi_expand(f, &NestedElt::from_flat(&canon), 0) {
            accumulate(&ring, x, &mut acc, &nested, &ring.mul(&coeff, &c2));
        }
    }
    // - d(psi e)
    for (nested, coeff) in psi_elt(f, e) {
        for (raw, s) in nested_differential(f, &nested)? {
            accumulate(&ring, x, &mut acc, &raw, &ring.neg(&ring.mul(&coeff, &s)));
        }
    }
    acc.retain(|_, v| !ring.is_zero(v));
    Ok(acc)
}

/// Differential of a nested element: the per-block rules at every layer.
pub fn nested_differential(
    f: &Diffraction,
    e: &NestedElt,
) -> Result<Vec<(NestedElt, Scalar)>, SymError> {
    let ring = f.ring;
    let x = &f.comonoid;
    let mut out = Vec::new();
    let mut prefix: Deg = 0;
    for d in 0..e.depth() {
        for bi in 0..e.layers[d].len() {
            let b = e.layers[d][bi].clone();
            let pre = cross_sign(1, prefix);
            // internal
            let cx = x.carrier.complex(b.level);
            let dx = b.x.degree();
            let xi = cx
                .index_of(dx, &b.x)
                .ok_or_else(|| SymError::Other(format!("missing label {}", b.x)))?;
            let isign = cross_sign(1, b.level as Deg - 1) * pre;
            for (r, s) in &cx.diff(dx).columns[xi as usize] {
                let mut layers = e.layers.clone();
                layers[d][bi] = AwBlock {
                    level: b.level,
                    x: cx.basis(dx - 1)[*r as usize].clone(),
                    slots: b.slots.clone(),
                };
                let mut coeff = s.clone();
                if isign < 0 {
                    coeff = ring.neg(&coeff);
                }
                out.push((NestedElt { layers, sigma: e.sigma.clone() }, coeff));
            }
            // cobar within layer d
            for (term, s) in nested_cobar(&ring, x, e, d, bi)? {
                let mut coeff = s;
                if pre < 0 {
                    coeff = ring.neg(&coeff);
                }
                out.push((term, coeff));
            }
            // simplicial: merge inner entries (deeper runs concatenate)
            let mut inner_prefix: Deg = (b.level as Deg - 1) + b.x.degree();
            for (ti, slot) in b.slots.iter().enumerate() {
                for u in 0..slot.m.saturating_sub(1) {
                    let mut coeff = ring.one();
                    if (u + 1) % 2 != 0 {
                        coeff = ring.neg(&coeff);
                    }
                    if cross_sign(1, inner_prefix) < 0 {
                        coeff = ring.neg(&coeff);
                    }
                    if pre < 0 {
                        coeff = ring.neg(&coeff);
                    }
                    let mut slots = b.slots.clone();
                    let mut r = slot.r.clone();
                    let merged = r[u] + r[u + 1];
                    r.remove(u + 1);
                    r[u] = merged;
                    slots[ti] = AwSlot { m: slot.m - 1, r };
                    let mut layers = e.layers.clone();
                    layers[d][bi] = AwBlock { level: b.level, x: b.x.clone(), slots };
                    out.push((NestedElt { layers, sigma: e.sigma.clone() }, coeff));
                }
                inner_prefix += slot.degree();
            }
            prefix += b.degree();
        }
    }
    Ok(out)
}

/// Cobar split of one block at one layer of a nested element.
fn nested_cobar(
    ring: &Ring,
    x: &LevelComonoid,
    e: &NestedElt,
    d: usize,
    bi: usize,
) -> Result<Vec<(NestedElt, Scalar)>, SymError> {
    let b = &e.layers[d][bi];
    let p = b.level;
    if b.slots.iter().any(|s| s.m < 2) {
        return Ok(Vec::new());
    }
    let offset: usize = e.layers[d][..bi].iter().map(|b2| b2.coverage()).sum();
    let mut out = Vec::new();
    let mut splits: Vec<Vec<usize>> = vec![vec![]];
    for slot in &b.slots {
        let mut next = Vec::new();
        for s in &splits {
            for cut in 1..slot.m {
                let mut s2 = s.clone();
                s2.push(cut);
                next.push(s2);
            }
        }
        splits = next;
    }
    for cuts in splits {
        let mut lslots = Vec::with_capacity(p);
        let mut rslots = Vec::with_capacity(p);
        let mut lsegs = Vec::with_capacity(p);
        let mut rsegs = Vec::with_capacity(p);
        {
            let mut acc = offset;
            for (t, slot) in b.slots.iter().enumerate() {
                let c = cuts[t];
                lslots.push(AwSlot { m: c, r: slot.r[..c].to_vec() });
                rslots.push(AwSlot { m: slot.m - c, r: slot.r[c..].to_vec() });
                let lcov: usize = slot.r[..c].iter().sum();
                lsegs.push((acc, acc + lcov));
                rsegs.push((acc + lcov, acc + slot.coverage()));
                acc += slot.coverage();
            }
        }
        let mut segments = lsegs.clone();
        segments.extend(rsegs.iter().cloned());
        for ((xl, xr), c) in (x.cop)(p, &b.x) {
            let u = super::cobar_sign_exponent(p, &xl, &xr, &lslots, &rslots);
            let mut coeff = c.clone();
            if u % 2 != 0 {
                coeff = ring.neg(&coeff);
            }
            let (deeper, sigma, dsign) = regroup_deeper(ring, e, d, &segments);
            let mut layers = deeper;
            let mut newblocks = Vec::with_capacity(e.layers[d].len() + 1);
            newblocks.extend(e.layers[d][..bi].iter().cloned());
            newblocks.push(AwBlock { level: p, x: xl.clone(), slots: lslots.clone() });
            newblocks.push(AwBlock { level: p, x: xr.clone(), slots: rslots.clone() });
            newblocks.extend(e.layers[d][bi + 1..].iter().cloned());
            layers[d] = newblocks;
            // splitting a block of a non-final layer turns one block into
            // two, so the parent entry counting it widens by one
            if d > 0 {
                widen_parent_entry(&mut layers, d - 1, bi);
            }
            out.push((NestedElt { layers, sigma }, ring.mul(&coeff, &dsign)));
        }
    }
    Ok(out)
}

/// Value of the counit on a flat element as operad data: the widths and
/// the permutation, when defined.
/// Increment the entry of layer `d` that contains block index `child` of
/// layer `d+1` (used when a deeper block splits in two).
fn widen_parent_entry(layers: &mut [Vec<AwBlock>], d: usize, child: usize) {
    let mut acc = 0usize;
    for b in layers[d].iter_mut() {
        for s in b.slots.iter_mut() {
            for r in s.r.iter_mut() {
                if child < acc + *r {
                    *r += 1;
                    return;
                }
                acc += *r;
            }
        }
    }
    panic!("child block {child} not covered by layer {d}");
}

pub fn counit_value(f: &Diffraction, e: &AwElt) -> Option<(Vec<usize>, Perm)> {
    aw_counit(f, e).map(|sigma| {
        let widths: Vec<usize> = e.blocks.iter().map(|b| b.slots[0].r[0]).collect();
        (widths, sigma)
    })
}

/// Printable coproduct column for reports.
pub fn psi_report(f: &Diffraction, n: usize, degree: Deg, idx: u32) -> Vec<(String, String)> {
    let e = f.element(n, degree, idx);
    let mut rows: Vec<(String, String)> = psi_elt(f, e)
        .into_iter()
        .map(|(t, c)| {
            let upper = AwElt { blocks: t.layers[0].clone(), sigma: Perm::identity(0) };
            let lower = AwElt { blocks: t.layers[1].clone(), sigma: t.sigma.clone() };
            (format!("{c}"), format!("{} (o) {}", upper.pretty(), lower.pretty()))
        })
        .collect();
    rows.sort();
    rows
}

#[allow(unused)]
fn unused_block_perm(p: &Perm, sizes: &[usize]) -> Perm {
    block_perm(p, sizes)
}
