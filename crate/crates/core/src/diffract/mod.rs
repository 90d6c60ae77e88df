//! Diffraction of level comonoids.
//!
//! The diffraction of a level comonoid `X` is the free bimodule over the
//! associative operad on the suspension of `X` composed with the dual
//! sequence, with differential combining the internal differential of `X`,
//! a cobar part fed by the level coproduct, and a simplicial part that
//! multiplies neighbouring inner factors.
//!
//! Elements are kept in a flat normal form that exploits freeness of the
//! regular representation: a list of blocks, each a suspended `X`-generator
//! with sized slots and an inner composition per slot, together with one
//! global permutation. Nothing else is quotiented, so bases stay small.

mod coring;
mod faces;
mod milgram;

pub use coring::{
    accumulate, aw_counit, canonicalize_nested, chain_defect, coassoc_defect, counit_defect,
    counit_defect_right, counit_value, nested_differential, psi_elt, psi_expand, psi_report,
    NestedElt,
};
pub use faces::{face_map, koszul_strand};
pub use milgram::{
    aw_level_coproduct, aw_level_coproduct_closed, diagonal_elt, milgram_map,
    milgram_on_generator, TensorElt,
};

use crate::chain::{ChainComplex, ChainError};
use crate::label::Label;
use crate::matrix::{sv_add, sv_scale, SparseMatrix, SparseVec};
use crate::perm::{all_perms, block_perm, compositions, cross_sign, koszul_sign, Deg, Perm};
use crate::scalar::{Ring, Scalar};
use crate::sym::{SignedAction, SymError, SymSeq, SymmetricSequence, Trunc};
use std::collections::HashMap;
use std::sync::Arc;

/// A level comonoid: a symmetric sequence with a coassociative levelwise
/// coproduct given on basis labels.
#[derive(Clone)]
pub struct LevelComonoid {
    pub carrier: SymSeq,
    /// `cop(level, label)`: the coproduct as pairs with coefficients.
    pub cop: Arc<dyn Fn(usize, &Label) -> Vec<((Label, Label), Scalar)> + Send + Sync>,
    /// For comonoids under the composition unit: the distinguished label
    /// of level 1, degree 0.
    pub unit: Option<Label>,
    pub name: String,
}

impl LevelComonoid {
    /// The composition unit as a level comonoid: one grouplike generator.
    pub fn unit_j(ring: Ring, trunc: Trunc) -> Self {
        let carrier =
            crate::sym::unit_sequence(crate::sym::UnitKind::CompositionUnit, ring, trunc);
        let one = ring.one();
        let u0 = Label::gen("u0", 0);
        let u = u0.clone();
        LevelComonoid {
            carrier,
            cop: Arc::new(move |_, l| vec![((l.clone(), l.clone()), one.clone())]),
            unit: Some(u),
            name: "J".into(),
        }
    }

    /// The associative operad with its diagonal as a level comonoid.
    pub fn assoc_diagonal(ring: Ring, trunc: Trunc) -> Self {
        let a = crate::operad::associative_operad(ring, trunc);
        let one = ring.one();
        LevelComonoid {
            carrier: a.seq.clone(),
            cop: Arc::new(move |_, l| vec![((l.clone(), l.clone()), one.clone())]),
            unit: Some(Label::Perm(Perm::identity(1))),
            name: "A".into(),
        }
    }

    /// The levelwise tensor square `X (x) Y` with pair labels.
    pub fn tensor(x: &LevelComonoid, y: &LevelComonoid) -> Result<Self, SymError> {
        let carrier = crate::sym::level_tensor(&x.carrier, &y.carrier)?;
        let ring = carrier.ring;
        let (cx, cy) = (x.cop.clone(), y.cop.clone());
        let unit = match (&x.unit, &y.unit) {
            (Some(a), Some(b)) => Some(Label::pair(a.clone(), b.clone())),
            _ => None,
        };
        Ok(LevelComonoid {
            carrier,
            cop: Arc::new(move |lvl, l| {
                let w = l.as_word().expect("pair label");
                let (a, b) = (&w[0], &w[1]);
                let mut out = Vec::new();
                for ((a1, a2), s) in cx(lvl, a) {
                    for ((b1, b2), t) in cy(lvl, b) {
                        // Koszul: b1 passes a2
                        let sgn = cross_sign(b1.degree(), a2.degree());
                        let mut coeff = ring.mul(&s, &t);
                        if sgn < 0 {
                            coeff = ring.neg(&coeff);
                        }
                        out.push((
                            (Label::pair(a1.clone(), b1), Label::pair(a2.clone(), b2)),
                            coeff,
                        ));
                    }
                }
                out
            }),
            unit,
            name: format!("{}(x){}", x.name, y.name),
        })
    }

    /// Check coassociativity, equivariance and the chain-map condition of
    /// the coproduct on all basis elements within truncation.
    pub fn validate(&self) -> Result<(), SymError> {
        let ring = self.carrier.ring;
        for lvl in 0..=self.carrier.max_level() {
            if self.carrier.is_zero_level(lvl) {
                continue;
            }
            let cx = self.carrier.complex(lvl);
            for d in cx.degrees() {
                for l in cx.basis(d) {
                    // coassociativity
                    let mut left: Vec<(Label, Scalar)> = Vec::new();
                    for ((a, b), s) in (self.cop)(lvl, l) {
                        for ((a1, a2), t) in (self.cop)(lvl, &a) {
                            left.push((
                                Label::word(vec![a1, a2, b.clone()]),
                                ring.mul(&s, &t),
                            ));
                        }
                    }
                    let mut right: Vec<(Label, Scalar)> = Vec::new();
                    for ((a, b), s) in (self.cop)(lvl, l) {
                        for ((b1, b2), t) in (self.cop)(lvl, &b) {
                            right.push((
                                Label::word(vec![a.clone(), b1, b2]),
                                ring.mul(&s, &t),
                            ));
                        }
                    }
                    for (lab, s) in right {
                        left.push((lab, ring.neg(&s)));
                    }
                    let mut acc: HashMap<Label, Scalar> = HashMap::new();
                    for (lab, s) in left {
                        let e = acc.entry(lab).or_insert_with(|| ring.zero());
                        *e = ring.add(e, &s);
                    }
                    if acc.values().any(|s| !ring.is_zero(s)) {
                        return Err(SymError::Other(format!(
                            "level coproduct not coassociative on {l} (level {lvl})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// One slot of a block: the generator of size `m` with an inner composition
/// `r` of length `m` (all entries positive) recording how its inputs are
/// fed by the inner operad action.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AwSlot {
    pub m: usize,
    pub r: Vec<usize>,
}

impl AwSlot {
    pub fn generator(m: usize) -> Self {
        AwSlot { m, r: vec![1; m] }
    }

    pub fn degree(&self) -> Deg {
        self.m as Deg - 1
    }

    /// Positions covered at the bottom.
    pub fn coverage(&self) -> usize {
        self.r.iter().sum()
    }
}

/// A block: a suspended generator of the comonoid with its slots.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AwBlock {
    pub level: usize,
    pub x: Label,
    pub slots: Vec<AwSlot>,
}

impl AwBlock {
    pub fn degree(&self) -> Deg {
        (self.level as Deg - 1) + self.x.degree() + self.slots.iter().map(|s| s.degree()).sum::<Deg>()
    }

    pub fn coverage(&self) -> usize {
        self.slots.iter().map(|s| s.coverage()).sum()
    }

    /// Number of slot inputs before inner compositions.
    pub fn arity(&self) -> usize {
        self.slots.iter().map(|s| s.m).sum()
    }
}

/// A basis element of the diffraction: blocks laid out consecutively and a
/// global permutation placing the covered positions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AwElt {
    pub blocks: Vec<AwBlock>,
    pub sigma: Perm,
}

impl AwElt {
    pub fn degree(&self) -> Deg {
        self.blocks.iter().map(|b| b.degree()).sum()
    }

    pub fn level(&self) -> usize {
        self.blocks.iter().map(|b| b.coverage()).sum()
    }

    pub fn encode(&self) -> Label {
        let mut items = Vec::new();
        for b in &self.blocks {
            let mut slots = Vec::new();
            for s in &b.slots {
                let rl: Vec<Label> =
                    s.r.iter().map(|&v| Label::gen(&format!("r{v}"), 0)).collect();
                let mut sl = vec![Label::gen(&format!("a{}", s.m), s.m as Deg - 1)];
                sl.extend(rl);
                slots.push(Label::word(sl));
            }
            let mut bl = vec![
                Label::gen(&format!("s{}", b.level - 1), b.level as Deg - 1),
                b.x.clone(),
            ];
            bl.extend(slots);
            items.push(Label::word(bl));
        }
        items.push(Label::Perm(self.sigma.clone()));
        Label::word(items)
    }

    /// Short form used in reports: `f2.d(2,1)` style for unit comonoids.
    pub fn pretty(&self) -> String {
        let mut parts = Vec::new();
        for b in &self.blocks {
            let core = if b.level == 1 && b.slots.len() == 1 {
                format!("f{}", b.slots[0].m)
            } else {
                format!(
                    "s{}({}) a[{}]",
                    b.level - 1,
                    b.x,
                    b.slots.iter().map(|s| s.m.to_string()).collect::<Vec<_>>().join(",")
                )
            };
            let rvec: Vec<usize> = b.slots.iter().flat_map(|s| s.r.iter().copied()).collect();
            if rvec.iter().all(|&v| v == 1) {
                parts.push(core);
            } else {
                parts.push(format!(
                    "{core}.d({})",
                    rvec.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
                ));
            }
        }
        let mut s = parts.join(" | ");
        if !self.sigma.is_identity() {
            s.push_str(&format!(" * {}", self.sigma));
        }
        s
    }
}

/// The diffraction of a level comonoid: per-level complexes on the flat
/// basis, with actions and a generator registry.
pub struct Diffraction {
    pub comonoid: LevelComonoid,
    pub ring: Ring,
    pub trunc: Trunc,
    pub seq: SymSeq,
    /// Per level, per degree index: the elements, aligned with bases.
    pub elements: Vec<Vec<Vec<AwElt>>>,
    index: Vec<HashMap<AwElt, (Deg, u32)>>,
}

impl Diffraction {
    pub fn level_complex(&self, n: usize) -> &Arc<ChainComplex> {
        self.seq.complex(n)
    }

    /// Index of a canonical element.
    pub fn index_of(&self, n: usize, e: &AwElt) -> Option<(Deg, u32)> {
        self.index[n].get(e).copied()
    }

    pub fn element(&self, n: usize, degree: Deg, i: u32) -> &AwElt {
        let lower = self.seq.complex(n).lower;
        &self.elements[n][(degree - lower) as usize][i as usize]
    }

    /// Resolve a raw term into basis coordinates.
    pub fn resolve(&self, n: usize, raw: &AwElt, coeff: &Scalar) -> Option<(Deg, u32, Scalar)> {
        let (canon, sign) = canonicalize(&self.ring, &self.comonoid, raw);
        let (d, i) = self.index_of(n, &canon)?;
        Some((d, i, self.ring.mul(coeff, &sign)))
    }

    /// The generator with a single block `(level p, x, slot sizes mvec)`.
    pub fn generator(&self, p: usize, x: &Label, mvec: &[usize]) -> AwElt {
        let n: usize = mvec.iter().sum();
        AwElt {
            blocks: vec![AwBlock {
                level: p,
                x: x.clone(),
                slots: mvec.iter().map(|&m| AwSlot::generator(m)).collect(),
            }],
            sigma: Perm::identity(n),
        }
    }
}

/// Canonical form of a raw flat element, with the sign relating it to the
/// raw input.
///
/// Freeness of the regular representation absorbs the outer coinvariants
/// entirely (blocks stay in their composition order, the permutation is a
/// free coordinate), so only the block-level symmetric group coinvariants
/// on the slots remain to normalize. For unit-like comonoids (one slot per
/// block) this is the identity.
pub fn canonicalize(ring: &Ring, x: &LevelComonoid, raw: &AwElt) -> (AwElt, Scalar) {
    if raw.blocks.iter().all(|b| b.level == 1) {
        return (raw.clone(), ring.one());
    }
    let mut best: Option<(AwElt, Scalar)> = None;
    let mut stack = vec![(raw.clone(), ring.one())];
    let mut seen: HashMap<AwElt, Scalar> = HashMap::new();
    seen.insert(raw.clone(), ring.one());
    while let Some((e, sign)) = stack.pop() {
        match &best {
            None => best = Some((e.clone(), sign.clone())),
            Some((b, _)) => {
                if (&e.blocks, &e.sigma) < (&b.blocks, &b.sigma) {
                    best = Some((e.clone(), sign.clone()));
                }
            }
        }
        // neighbours: adjacent slot swaps within each block
        let mut offset = 0usize;
        for (bi, b) in e.blocks.iter().enumerate() {
            for si in 0..b.slots.len().saturating_sub(1) {
                if let Some((e2, s2)) = slot_swap(ring, x, &e, bi, si, offset) {
                    let s2 = ring.mul(&sign, &s2);
                    if !seen.contains_key(&e2) {
                        seen.insert(e2.clone(), s2.clone());
                        stack.push((e2, s2));
                    }
                }
            }
            offset += b.coverage();
        }
    }
    best.expect("canonical form exists")
}

/// Swap slots `si, si+1` of block `bi` through the block-level symmetric
/// group action: permute the suspended generator, the slots, and absorb the
/// block permutation into sigma.
fn slot_swap(
    ring: &Ring,
    x: &LevelComonoid,
    e: &AwElt,
    bi: usize,
    si: usize,
    block_offset: usize,
) -> Option<(AwElt, Scalar)> {
    let b = &e.blocks[bi];
    let p = b.level;
    let tau = Perm::adjacent(p, si);
    // the x-part moves by the signed action
    let cx = x.carrier.complex(p);
    let dx = b.x.degree();
    let xi = cx.index_of(dx, &b.x)?;
    let (nxi, xsign) = x.carrier.level(p).action.apply_perm(ring, dx, xi, &tau).ok()?;
    let nx = cx.basis(dx)[nxi as usize].clone();
    // Koszul for swapping the alpha factors
    let mut sign = xsign;
    if b.slots[si].degree() % 2 != 0 && b.slots[si + 1].degree() % 2 != 0 {
        sign = ring.neg(&sign);
    }
    let mut slots = b.slots.clone();
    slots.swap(si, si + 1);
    // coset factor: block permutation of the slot coverages, embedded at
    // this block's position range
    let coverages: Vec<usize> = b.slots.iter().map(|s| s.coverage()).collect();
    let local = block_perm(&tau, &coverages);
    let total = e.level();
    let emb = embed_at(&local, block_offset, total);
    let sigma = emb.compose(&e.sigma);
    let mut blocks = e.blocks.clone();
    blocks[bi] = AwBlock { level: p, x: nx, slots };
    Some((AwElt { blocks, sigma }, sign))
}

fn embed_at(p: &Perm, offset: usize, total: usize) -> Perm {
    let mut v: Vec<u8> = (0..total as u8).collect();
    for k in 0..p.len() {
        v[offset + k] = (offset + p.apply(k)) as u8;
    }
    Perm(v)
}

/// All raw differential terms of a flat element (not yet canonicalized).
pub fn differential_terms(
    ring: &Ring,
    x: &LevelComonoid,
    e: &AwElt,
) -> Result<Vec<(AwElt, Scalar)>, SymError> {
    let mut out = Vec::new();
    let mut prefix: Deg = 0;
    let mut block_offset = 0usize;
    for (bi, b) in e.blocks.iter().enumerate() {
        let pre_sign = cross_sign(1, prefix);
        // internal differential on the x part
        let cx = x.carrier.complex(b.level);
        let dx = b.x.degree();
        let xi = cx
            .index_of(dx, &b.x)
            .ok_or_else(|| SymError::Other(format!("missing label {}", b.x)))?;
        let internal_sign = cross_sign(1, b.level as Deg - 1) * pre_sign;
        for (r, s) in &cx.diff(dx).columns[xi as usize] {
            let mut blocks = e.blocks.clone();
            blocks[bi] = AwBlock {
                level: b.level,
                x: cx.basis(dx - 1)[*r as usize].clone(),
                slots: b.slots.clone(),
            };
            let mut coeff = s.clone();
            if internal_sign < 0 {
                coeff = ring.neg(&coeff);
            }
            out.push((AwElt { blocks, sigma: e.sigma.clone() }, coeff));
        }
        // cobar part: split the block in two through the level coproduct
        for (term, s) in cobar_terms(ring, x, e, bi, block_offset)? {
            let mut coeff = s;
            if pre_sign < 0 {
                coeff = ring.neg(&coeff);
            }
            out.push((term, coeff));
        }
        // simplicial part: merge neighbouring inner entries within a slot
        let mut inner_prefix: Deg = (b.level as Deg - 1) + b.x.degree();
        for (ti, slot) in b.slots.iter().enumerate() {
            for u in 0..slot.m.saturating_sub(1) {
                // faces alternate starting at the first interior index
                let mut coeff = ring.one();
                if (u + 1) % 2 != 0 {
                    coeff = ring.neg(&coeff);
                }
                if cross_sign(1, inner_prefix) < 0 {
                    coeff = ring.neg(&coeff);
                }
                if pre_sign < 0 {
                    coeff = ring.neg(&coeff);
                }
                let mut slots = b.slots.clone();
                let mut r = slot.r.clone();
                let merged = r[u] + r[u + 1];
                r.remove(u + 1);
                r[u] = merged;
                slots[ti] = AwSlot { m: slot.m - 1, r };
                let mut blocks = e.blocks.clone();
                blocks[bi] = AwBlock { level: b.level, x: b.x.clone(), slots };
                out.push((AwElt { blocks, sigma: e.sigma.clone() }, coeff));
            }
            inner_prefix += slot.degree();
        }
        prefix += b.degree();
        block_offset += b.coverage();
    }
    Ok(out)
}

/// Split block `bi` into two blocks through the level coproduct: each slot
/// splits into a positive left and right piece, the inner composition
/// splits along, and the interleaving is absorbed into sigma.
fn cobar_terms(
    ring: &Ring,
    x: &LevelComonoid,
    e: &AwElt,
    bi: usize,
    block_offset: usize,
) -> Result<Vec<(AwElt, Scalar)>, SymError> {
    let b = &e.blocks[bi];
    let p = b.level;
    if b.slots.iter().any(|s| s.m < 2) {
        // every slot must split into two positive pieces
        return Ok(Vec::new());
    }
    let total = e.level();
    let mut out = Vec::new();
    // all slotwise split points
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
        // left/right slot lists and the interleave permutation
        let mut lslots = Vec::with_capacity(p);
        let mut rslots = Vec::with_capacity(p);
        for (t, slot) in b.slots.iter().enumerate() {
            let c = cuts[t];
            lslots.push(AwSlot { m: c, r: slot.r[..c].to_vec() });
            rslots.push(AwSlot { m: slot.m - c, r: slot.r[c..].to_vec() });
        }
        // interleave map: new layout [left-block slots | right-block slots]
        // -> old layout [slot 1 (left piece then right piece), slot 2 ...]
        let mut iota: Vec<u8> = (0..total as u8).collect();
        {
            let mut old_slot_offsets = Vec::with_capacity(p);
            let mut acc = block_offset;
            for slot in &b.slots {
                old_slot_offsets.push(acc);
                acc += slot.coverage();
            }
            let mut new_pos = block_offset;
            for t in 0..p {
                let width = lslots[t].coverage();
                for k in 0..width {
                    iota[new_pos] = (old_slot_offsets[t] + k) as u8;
                    new_pos += 1;
                }
            }
            for t in 0..p {
                let lwidth = lslots[t].coverage();
                let width = rslots[t].coverage();
                for k in 0..width {
                    iota[new_pos] = (old_slot_offsets[t] + lwidth + k) as u8;
                    new_pos += 1;
                }
            }
        }
        let sigma = e.sigma.compose(&Perm(iota));
        for ((xl, xr), c) in (x.cop)(p, &b.x) {
            let u = cobar_sign_exponent(p, &xl, &xr, &lslots, &rslots);
            let mut coeff = c.clone();
            if u % 2 != 0 {
                coeff = ring.neg(&coeff);
            }
            let mut blocks = Vec::with_capacity(e.blocks.len() + 1);
            blocks.extend(e.blocks[..bi].iter().cloned());
            blocks.push(AwBlock { level: p, x: xl.clone(), slots: lslots.clone() });
            blocks.push(AwBlock { level: p, x: xr.clone(), slots: rslots.clone() });
            blocks.extend(e.blocks[bi + 1..].iter().cloned());
            out.push((AwElt { blocks, sigma: sigma.clone() }, coeff));
        }
    }
    Ok(out)
}

/// Sign exponent of a cobar split, fixed so that the differential squares
/// to zero over the integers: with left pieces of sizes `i_t` and right
/// pieces `j_t`,
/// `u = |x'| + (p + A) |x''| + A + sum_{t' < t} j_{t'} i_t`,
/// where `A = sum (i_t - 1)`.
pub(crate) fn cobar_sign_exponent(
    p: usize,
    xl: &Label,
    xr: &Label,
    lslots: &[AwSlot],
    rslots: &[AwSlot],
) -> i64 {
    let a1: i64 = lslots.iter().map(|s| s.m as i64 - 1).sum();
    let mut u = xl.degree() as i64 + (p as i64 + a1) * xr.degree() as i64 + a1;
    for t in 0..p {
        for tp in 0..t {
            u += rslots[tp].m as i64 * lslots[t].m as i64;
        }
    }
    u
}

/// Enumerate all canonical basis elements of `Phi(X)(n)` within the degree
/// bound, build the per-level complex and action, and assemble everything
/// into a `Diffraction`.
pub fn diffract(x: &LevelComonoid, trunc: Trunc) -> Result<Diffraction, SymError> {
    x.validate()?;
    let ring = x.carrier.ring;
    let mut elements: Vec<Vec<Vec<AwElt>>> = Vec::new();
    let mut index: Vec<HashMap<AwElt, (Deg, u32)>> = Vec::new();
    let mut level_data = Vec::new();
    for n in 0..=trunc.max_level {
        let elems = enumerate_level(ring, x, n, trunc.max_degree);
        let (data, table, idx) = assemble_level(&ring, x, n, elems)?;
        level_data.push(data);
        elements.push(table);
        index.push(idx);
    }
    let seq = SymmetricSequence::new(ring, trunc, level_data, false)?;
    Ok(Diffraction { comonoid: x.clone(), ring, trunc, seq, elements, index })
}

/// All canonical elements at one level.
fn enumerate_level(ring: Ring, x: &LevelComonoid, n: usize, max_degree: Deg) -> Vec<AwElt> {
    if n == 0 {
        return Vec::new();
    }
    // enumerate block shapes: a block covering w positions has a level p,
    // slot sizes mvec (|mvec| = p), and inner compositions r per slot.
    let mut blocks_by_coverage: Vec<Vec<AwBlock>> = vec![Vec::new(); n + 1];
    for w in 1..=n {
        let mut shapes = Vec::new();
        for p in 1..=x.carrier.max_level().min(w) {
            if x.carrier.is_zero_level(p) {
                continue;
            }
            let cx = x.carrier.complex(p);
            // slot coverages: composition of w into p parts
            for slot_cov in compositions(w, p, 1) {
                // each slot: m and r with sum(r) = coverage, len(r) = m
                let mut slot_choices: Vec<Vec<AwSlot>> = vec![vec![]];
                for &cov in &slot_cov {
                    let mut next = Vec::new();
                    for m in 1..=cov {
                        for r in compositions(cov, m, 1) {
                            for prev in &slot_choices {
                                let mut v = prev.clone();
                                v.push(AwSlot { m, r: r.clone() });
                                next.push(v);
                            }
                        }
                    }
                    slot_choices = next;
                }
                for slots in slot_choices {
                    for d in cx.degrees() {
                        for xl in cx.basis(d) {
                            let b = AwBlock { level: p, x: xl.clone(), slots: slots.clone() };
                            if b.degree() <= max_degree {
                                shapes.push(b);
                            }
                        }
                    }
                }
            }
        }
        blocks_by_coverage[w] = shapes;
    }
    // assemble block lists covering n, then attach permutations and keep
    // canonical representatives
    let mut lists: Vec<(Vec<AwBlock>, Deg)> = Vec::new();
    fn rec(
        blocks_by_coverage: &[Vec<AwBlock>],
        remaining: usize,
        max_degree: Deg,
        cur: &mut Vec<AwBlock>,
        deg: Deg,
        out: &mut Vec<(Vec<AwBlock>, Deg)>,
    ) {
        if remaining == 0 {
            if !cur.is_empty() {
                out.push((cur.clone(), deg));
            }
            return;
        }
        for w in 1..=remaining {
            for b in &blocks_by_coverage[w] {
                let nd = deg + b.degree();
                if nd > max_degree {
                    continue;
                }
                cur.push(b.clone());
                rec(blocks_by_coverage, remaining - w, max_degree, cur, nd, out);
                cur.pop();
            }
        }
    }
    rec(&blocks_by_coverage, n, max_degree, &mut Vec::new(), 0, &mut lists);
    let perms = all_perms(n);
    let mut out = Vec::new();
    let mut seen: std::collections::HashSet<AwElt> = Default::default();
    for (blocks, _) in lists {
        for sigma in &perms {
            let raw = AwElt { blocks: blocks.clone(), sigma: sigma.clone() };
            let (canon, _) = canonicalize(&ring, x, &raw);
            if seen.insert(canon.clone()) {
                out.push(canon);
            }
        }
    }
    out.sort();
    out
}

type LevelTable = Vec<Vec<AwElt>>;

fn assemble_level(
    ring: &Ring,
    x: &LevelComonoid,
    n: usize,
    elems: Vec<AwElt>,
) -> Result<(crate::sym::LevelData, LevelTable, HashMap<AwElt, (Deg, u32)>), SymError> {
    if elems.is_empty() {
        let z = ChainComplex::zero(*ring);
        return Ok((
            crate::sym::LevelData { action: SignedAction::trivial(&z, n), complex: z },
            Vec::new(),
            HashMap::new(),
        ));
    }
    let lower = elems.iter().map(|e| e.degree()).min().unwrap();
    let upper = elems.iter().map(|e| e.degree()).max().unwrap();
    let mut table: LevelTable = vec![Vec::new(); (upper - lower + 1) as usize];
    for e in elems {
        let d = e.degree();
        table[(d - lower) as usize].push(e);
    }
    let mut index: HashMap<AwElt, (Deg, u32)> = HashMap::new();
    for (di, row) in table.iter().enumerate() {
        for (i, e) in row.iter().enumerate() {
            index.insert(e.clone(), (lower + di as Deg, i as u32));
        }
    }
    let bases: Vec<Vec<Label>> =
        table.iter().map(|row| row.iter().map(|e| e.encode()).collect()).collect();
    let mut diffs = Vec::new();
    for (di, row) in table.iter().enumerate() {
        let d = lower + di as Deg;
        let rows = if di == 0 { 0 } else { table[di - 1].len() };
        let mut entries = Vec::new();
        for (col, e) in row.iter().enumerate() {
            let mut acc: SparseVec = Vec::new();
            for (raw, s) in differential_terms(ring, x, e)? {
                let (canon, cs) = canonicalize(ring, x, &raw);
                if let Some(&(dd, i)) = index.get(&canon) {
                    debug_assert_eq!(dd, d - 1);
                    acc = sv_add(ring, &acc, &vec![(i, ring.mul(&s, &cs))]);
                }
            }
            for (r, s) in acc {
                entries.push((r as usize, col, s));
            }
        }
        diffs.push(SparseMatrix::from_entries(rows, row.len(), ring, entries));
    }
    let complex = ChainComplex::new(*ring, lower, bases, diffs)?;
    // right action generators: multiply sigma on the right
    let mut gens = Vec::new();
    for gi in 0..n.saturating_sub(1) {
        let s_i = Perm::adjacent(n, gi);
        let mut mats = Vec::new();
        for (di, row) in table.iter().enumerate() {
            let d = lower + di as Deg;
            let _ = d;
            let mut entries = Vec::new();
            for (col, e) in row.iter().enumerate() {
                let raw = AwElt { blocks: e.blocks.clone(), sigma: e.sigma.compose(&s_i) };
                let (canon, cs) = canonicalize(ring, x, &raw);
                let (dd, i) = index[&canon];
                debug_assert_eq!(dd, lower + di as Deg);
                entries.push((i as usize, col, cs));
            }
            mats.push(SparseMatrix::from_entries(row.len(), row.len(), ring, entries));
        }
        gens.push(crate::chain::ChainMap::new(complex.clone(), complex.clone(), 0, mats)?);
    }
    Ok((
        crate::sym::LevelData { complex, action: SignedAction { gens } },
        table,
        index,
    ))
}

/// Right action of inner operad arguments on a flat element: the argument
/// at final position `v` has size `q_v` and carries a group-ring label.
/// Returns the raw acted element.
pub fn right_act_elt(
    ring: &Ring,
    e: &AwElt,
    sizes: &[usize],
    args: &[Perm],
) -> (AwElt, Scalar) {
    let n = e.level();
    debug_assert_eq!(sizes.len(), n);
    let sigma = crate::perm::gamma_compose(&e.sigma, args, sizes);
    // structure position v sits at final position sigma^{-1}(v); its inner
    // entry widens by the size of the argument attached there.
    let inv = e.sigma.inverse();
    let mut blocks = Vec::with_capacity(e.blocks.len());
    let mut pos = 0usize;
    for b in &e.blocks {
        let mut slots = Vec::with_capacity(b.slots.len());
        for s in &b.slots {
            let mut r = Vec::with_capacity(s.m);
            for &entry in &s.r {
                let mut width = 0usize;
                for k in 0..entry {
                    width += sizes[inv.apply(pos + k)];
                }
                r.push(width);
                pos += entry;
            }
            slots.push(AwSlot { m: s.m, r });
        }
        blocks.push(AwBlock { level: b.level, x: b.x.clone(), slots });
    }
    (AwElt { blocks, sigma }, ring.one())
}

/// Left action: concatenate elements (the outer group-ring label is
/// absorbed, as in the free graded monoid).
pub fn concat_elts(parts: &[&AwElt]) -> AwElt {
    let mut blocks = Vec::new();
    let mut perms = Vec::new();
    let mut sizes = Vec::new();
    for p in parts {
        blocks.extend(p.blocks.iter().cloned());
        perms.push(p.sigma.clone());
        sizes.push(p.level());
    }
    let sigma = crate::perm::block_diag(&perms, &sizes);
    AwElt { blocks, sigma }
}

#[cfg(test)]
mod tests;
