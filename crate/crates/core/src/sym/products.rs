//! The three monoidal products of symmetric sequences.
//!
//! Composition-product bases are orbit representatives for the diagonal
//! symmetric group action, with every ambient term carrying a full witness
//! `(m, x, nvec, ys, rho)` so that morphisms can be defined termwise.

use super::{LevelData, SignedAction, SymError, SymSeq, SymmetricSequence};
use crate::chain::{ChainComplex, ChainMap};
use crate::label::Label;
use crate::matrix::SparseMatrix;
use crate::perm::{block_perm, compositions, coset_reps, coset_split, koszul_sign, Deg, Perm};
use crate::scalar::{Ring, RingKind, Scalar};
use std::collections::HashMap;
use std::sync::Arc;

/// Basis element of `Y^{(.)m}(n)`: a composition, one basis label per part,
/// and a canonical coset representative.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PowTerm {
    pub nvec: Vec<usize>,
    pub parts: Vec<Label>,
    pub rho: Perm,
}

/// Ambient basis element of `(X o Y)(n)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CompTerm {
    pub m: usize,
    pub x: Label,
    pub pow: PowTerm,
}

impl CompTerm {
    pub fn degree(&self) -> Deg {
        self.x.degree() + self.pow.parts.iter().map(|l| l.degree()).sum::<Deg>()
    }

    pub fn encode(&self) -> Label {
        let mut items = vec![Label::gen(&format!("o{}", self.m), 0), self.x.clone()];
        items.extend(self.pow.parts.iter().cloned());
        items.push(Label::Perm(self.pow.rho.clone()));
        Label::word(items)
    }

    /// Sort key used for canonical orbit representatives.
    fn key(&self) -> (usize, &Label, &Vec<usize>, &Vec<Label>, &Perm) {
        (self.m, &self.x, &self.pow.nvec, &self.pow.parts, &self.pow.rho)
    }
}

/// Enumerate the basis of `Y^{(.)m}(n)` within the degree bound.
pub struct PowBasis;

impl PowBasis {
    pub fn enumerate(y: &SymSeq, m: usize, n: usize, max_degree: Deg) -> Vec<PowTerm> {
        let min_part = if y.is_zero_level(0) { 1 } else { 0 };
        let mut out = Vec::new();
        if m == 0 {
            if n == 0 {
                out.push(PowTerm { nvec: vec![], parts: vec![], rho: Perm(vec![]) });
            }
            return out;
        }
        for nvec in compositions(n, m, min_part) {
            if nvec.iter().any(|&p| p > y.max_level()) {
                continue;
            }
            let reps = coset_reps(&nvec);
            let mut tuples: Vec<(Vec<Label>, Deg)> = vec![(vec![], 0)];
            for &p in &nvec {
                let mut next = Vec::new();
                let cx = y.complex(p);
                for (tuple, deg) in &tuples {
                    for d in cx.degrees() {
                        if deg + d > max_degree {
                            continue;
                        }
                        for l in cx.basis(d) {
                            let mut t = tuple.clone();
                            t.push(l.clone());
                            next.push((t, deg + d));
                        }
                    }
                }
                tuples = next;
            }
            for (parts, _) in tuples {
                for rho in &reps {
                    out.push(PowTerm { nvec: nvec.clone(), parts: parts.clone(), rho: rho.clone() });
                }
            }
        }
        out
    }
}

/// Left action of a `Sigma_m` adjacent transposition `s_i` on a power term:
/// chunks `i, i+1` swap (with the Koszul sign of their total degrees) and
/// the coset datum absorbs the block permutation, so that evaluation by
/// `gamma_compose`-style operations is unchanged.
fn left_swap(
    ring: &Ring,
    y: &SymSeq,
    term: &PowTerm,
    i: usize,
) -> Result<(PowTerm, Scalar), SymError> {
    let tau = Perm::adjacent(term.nvec.len(), i);
    // Koszul: the list (.., y_i, y_{i+1}, ..) is reordered by swapping
    let sign = if term.parts[i].degree() % 2 != 0 && term.parts[i + 1].degree() % 2 != 0 {
        ring.neg(&ring.one())
    } else {
        ring.one()
    };
    let beta = block_perm(&tau, &term.nvec);
    let g = beta.compose(&term.rho);
    let mut nvec = term.nvec.clone();
    nvec.swap(i, i + 1);
    let mut parts = term.parts.clone();
    parts.swap(i, i + 1);
    let (h, rho) = coset_split(&g, &nvec);
    // apply h_j to each part
    let mut coeff = sign;
    let mut new_parts = Vec::with_capacity(parts.len());
    for (j, l) in parts.iter().enumerate() {
        if h[j].is_identity() {
            new_parts.push(l.clone());
            continue;
        }
        let lvl = nvec[j];
        let cx = y.complex(lvl);
        let d = l.degree();
        let idx = cx.index_of(d, l).expect("part label in its complex");
        let (nidx, s) = y.level(lvl).action.apply_perm(ring, d, idx, &h[j])?;
        coeff = ring.mul(&coeff, &s);
        new_parts.push(cx.basis(d)[nidx as usize].clone());
    }
    Ok((PowTerm { nvec, parts: new_parts, rho }, coeff))
}

/// Right action of an arbitrary permutation on a power term.
fn right_act(
    ring: &Ring,
    y: &SymSeq,
    term: &PowTerm,
    sigma: &Perm,
) -> Result<(PowTerm, Scalar), SymError> {
    let g = term.rho.compose(sigma);
    let (h, rho) = coset_split(&g, &term.nvec);
    let mut coeff = ring.one();
    let mut parts = Vec::with_capacity(term.parts.len());
    for (j, l) in term.parts.iter().enumerate() {
        if h[j].is_identity() {
            parts.push(l.clone());
            continue;
        }
        let lvl = term.nvec[j];
        let cx = y.complex(lvl);
        let d = l.degree();
        let idx = cx.index_of(d, l).expect("part label in its complex");
        let (nidx, s) = y.level(lvl).action.apply_perm(ring, d, idx, &h[j])?;
        coeff = ring.mul(&coeff, &s);
        parts.push(cx.basis(d)[nidx as usize].clone());
    }
    Ok((PowTerm { nvec: term.nvec.clone(), parts, rho }, coeff))
}

/// The composition product with orbit witnesses.
pub struct CompProduct {
    pub seq: SymSeq,
    pub x: SymSeq,
    pub y: SymSeq,
    /// Per level, per degree index: the representative terms, aligned with
    /// the quotient bases.
    pub terms: Vec<Vec<Vec<CompTerm>>>,
    /// False when the right factor has level zero and the left factor is
    /// truncated, so high outer levels could contribute: the computed
    /// bases are then only a window, usable for instance checks but not
    /// for exact bases.
    pub exact: bool,
    /// Per level: map from any orbit member to (degree, index, coefficient).
    orbit: Vec<HashMap<CompTerm, (Deg, u32, Scalar)>>,
}

impl CompProduct {
    /// Canonical coordinates of an arbitrary ambient term (rho need not be
    /// a coset representative).
    pub fn resolve(&self, level: usize, term: &CompTerm) -> Result<(Deg, u32, Scalar), SymError> {
        let ring = self.x.ring;
        // first reduce the coset datum
        let (pow, c) = right_act(&ring, &self.y, &PowTerm {
            nvec: term.pow.nvec.clone(),
            parts: term.pow.parts.clone(),
            rho: Perm::identity(term.pow.rho.len()),
        }, &term.pow.rho)?;
        let t = CompTerm { m: term.m, x: term.x.clone(), pow };
        match self.orbit[level].get(&t) {
            Some((d, i, s)) => Ok((*d, *i, ring.mul(s, &c))),
            None => Err(SymError::Other(format!(
                "term not found in composition product at level {level}: {:?}",
                t
            ))),
        }
    }

    pub fn term(&self, level: usize, degree: Deg, index: u32) -> &CompTerm {
        let di = (degree - self.seq.complex(level).lower) as usize;
        &self.terms[level][di][index as usize]
    }
}

/// Compute `X o Y` on all levels `0..=max_level`. Refused when the result
/// would be inexact (right factor alive in level zero under a truncated
/// left factor); use `composition_product_windowed` to get the window.
pub fn composition_product(x: &SymSeq, y: &SymSeq) -> Result<CompProduct, SymError> {
    if !y.is_zero_level(0) && !x.complete {
        return Err(SymError::Truncation {
            level: 0,
            reason: "right factor has level 0; left factor must vanish above its truncation"
                .into(),
        });
    }
    composition_product_windowed(x, y)
}

/// The window of `X o Y` spanned by outer levels within the truncation;
/// exact unless the right factor has level zero under a truncated left
/// factor (recorded in `exact`).
pub fn composition_product_windowed(x: &SymSeq, y: &SymSeq) -> Result<CompProduct, SymError> {
    let ring = x.ring;
    let trunc = x.trunc;
    let max_degree = trunc.max_degree;
    let exact = y.is_zero_level(0) || x.complete;
    let mut level_data = Vec::new();
    let mut all_terms = Vec::new();
    let mut all_orbit = Vec::new();
    for n in 0..=trunc.max_level {
        let (data, terms, orbit) = build_level(x, y, n, max_degree, &ring)?;
        level_data.push(data);
        all_terms.push(terms);
        all_orbit.push(orbit);
    }
    let complete = exact && composite_complete(x, y);
    let seq = SymmetricSequence::new(ring, trunc, level_data, complete)?;
    Ok(CompProduct { seq, x: x.clone(), y: y.clone(), terms: all_terms, exact, orbit: all_orbit })
}

fn composite_complete(x: &SymSeq, y: &SymSeq) -> bool {
    if !x.complete || !y.complete {
        return false;
    }
    let top = |s: &SymSeq| (0..=s.max_level()).rev().find(|&n| !s.is_zero_level(n));
    match (top(x), top(y)) {
        (Some(tx), Some(ty)) => tx * ty <= x.trunc.max_level,
        _ => true,
    }
}

type LevelTerms = Vec<Vec<CompTerm>>;
type LevelOrbit = HashMap<CompTerm, (Deg, u32, Scalar)>;

fn build_level(
    x: &SymSeq,
    y: &SymSeq,
    n: usize,
    max_degree: Deg,
    ring: &Ring,
) -> Result<(LevelData, LevelTerms, LevelOrbit), SymError> {
    let char2 = matches!(ring.kind, RingKind::PrimeField(2));
    // enumerate ambient terms
    let mut ambient: Vec<CompTerm> = Vec::new();
    for m in 0..=x.max_level() {
        if x.is_zero_level(m) {
            continue;
        }
        let xc = x.complex(m);
        let pows = PowBasis::enumerate(y, m, n, max_degree);
        if pows.is_empty() {
            continue;
        }
        for d in xc.degrees() {
            for xl in xc.basis(d) {
                for p in &pows {
                    let t = CompTerm { m, x: xl.clone(), pow: p.clone() };
                    if t.degree() <= max_degree && t.degree() >= 0 {
                        ambient.push(t);
                    }
                }
            }
        }
    }
    // orbit closure under the diagonal Sigma_m generators
    let mut index: HashMap<CompTerm, usize> = HashMap::with_capacity(ambient.len());
    for (i, t) in ambient.iter().enumerate() {
        index.insert(t.clone(), i);
    }
    let mut assign: Vec<Option<(usize, Scalar)>> = vec![None; ambient.len()];
    let mut orbit_members: Vec<Vec<usize>> = Vec::new();
    let mut conflicted: Vec<bool> = Vec::new();
    for start in 0..ambient.len() {
        if assign[start].is_some() {
            continue;
        }
        let oid = orbit_members.len();
        assign[start] = Some((oid, ring.one()));
        let mut members = vec![start];
        let mut queue = vec![start];
        let mut conflict = false;
        while let Some(t) = queue.pop() {
            let ts = assign[t].clone().unwrap().1;
            let term = ambient[t].clone();
            let m = term.m;
            for i in 0..m.saturating_sub(1) {
                // A_i(term) = (x . s_i) (x) (s_i . pow)
                let xc = x.complex(m);
                let xd = term.x.degree();
                let xi = xc.index_of(xd, &term.x).expect("x label");
                let (nxi, sx) =
                    x.level(m).action.apply_perm(ring, xd, xi, &Perm::adjacent(m, i))?;
                let (npow, sp) = left_swap(ring, y, &term.pow, i)?;
                let nt = CompTerm { m, x: xc.basis(xd)[nxi as usize].clone(), pow: npow };
                let sign = ring.mul(&ts, &ring.mul(&sx, &sp));
                let j = *index.get(&nt).unwrap_or_else(|| {
                    panic!("orbit left the ambient basis: {:?} -> {:?}", term, nt)
                });
                match &assign[j] {
                    None => {
                        assign[j] = Some((oid, sign));
                        members.push(j);
                        queue.push(j);
                    }
                    Some((_, old)) => {
                        if *old != sign && !char2 {
                            conflict = true;
                        }
                    }
                }
            }
        }
        orbit_members.push(members);
        conflicted.push(conflict);
    }
    // choose representatives (lexicographically least witness)
    let lower = ambient.iter().map(|t| t.degree()).min().unwrap_or(0);
    let upper = ambient.iter().map(|t| t.degree()).max().unwrap_or(-1);
    let n_degs = if upper < lower { 0 } else { (upper - lower + 1) as usize };
    let mut terms: LevelTerms = vec![Vec::new(); n_degs];
    let mut orbit_map: LevelOrbit = HashMap::with_capacity(ambient.len());
    let mut rep_of_orbit: Vec<Option<(Deg, usize)>> = vec![None; orbit_members.len()];
    for (oid, members) in orbit_members.iter().enumerate() {
        if conflicted[oid] {
            match ring.kind {
                RingKind::Integers => {
                    return Err(SymError::Torsion(format!(
                        "level {n}: orbit of {:?} is sign-conflicted",
                        ambient[members[0]]
                    )))
                }
                _ => continue, // class is zero over a field of odd/zero char
            }
        }
        let rep = members
            .iter()
            .min_by(|&&a, &&b| ambient[a].key().cmp(&ambient[b].key()))
            .copied()
            .unwrap();
        let d = ambient[rep].degree();
        let di = (d - lower) as usize;
        let pos = terms[di].len();
        terms[di].push(ambient[rep].clone());
        rep_of_orbit[oid] = Some((d, pos));
    }
    // fill the orbit map with signs relative to representatives
    for (oid, members) in orbit_members.iter().enumerate() {
        let Some((d, pos)) = rep_of_orbit[oid] else { continue };
        let rep = terms[(d - lower) as usize][pos].clone();
        let rep_sign = assign[*index.get(&rep).unwrap()].clone().unwrap().1;
        for &mem in members {
            let s = assign[mem].clone().unwrap().1;
            let rel = ring.mul(&s, &ring.inv(&rep_sign).expect("sign is a unit"));
            orbit_map.insert(ambient[mem].clone(), (d, pos as u32, rel));
        }
    }
    // assemble the quotient complex
    let bases: Vec<Vec<Label>> =
        terms.iter().map(|ts| ts.iter().map(|t| t.encode()).collect()).collect();
    let resolve = |t: &CompTerm, c: &Scalar| -> Option<(Deg, u32, Scalar)> {
        orbit_map.get(t).map(|(d, i, s)| (*d, *i, ring.mul(s, c)))
    };
    let mut diffs: Vec<SparseMatrix> = Vec::new();
    for (di, ts) in terms.iter().enumerate() {
        let d = lower + di as Deg;
        let rows = if di == 0 { 0 } else { terms[di - 1].len() };
        let mut entries = Vec::new();
        for (col, t) in ts.iter().enumerate() {
            for (img, s) in differential_of_term(x, y, t, ring)? {
                // reduce coset data before lookup
                let (pow, c1) = right_act(ring, y, &PowTerm {
                    nvec: img.pow.nvec.clone(),
                    parts: img.pow.parts.clone(),
                    rho: Perm::identity(img.pow.rho.len()),
                }, &img.pow.rho)?;
                let canon = CompTerm { m: img.m, x: img.x.clone(), pow };
                if let Some((dd, i, c)) = resolve(&canon, &ring.mul(&s, &c1)) {
                    debug_assert_eq!(dd, d - 1);
                    entries.push((i as usize, col, c));
                }
            }
        }
        diffs.push(SparseMatrix::from_entries(rows, ts.len(), ring, entries));
    }
    let complex = ChainComplex::new(*ring, lower, bases, diffs)?;
    // the right Sigma_n action on representatives
    let mut gens = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let s_i = Perm::adjacent(n, i);
        let mut mats = Vec::new();
        for (di, ts) in terms.iter().enumerate() {
            let d = lower + di as Deg;
            let mut entries = Vec::new();
            for (col, t) in ts.iter().enumerate() {
                let (pow, c) = right_act(ring, y, &t.pow, &s_i)?;
                let canon = CompTerm { m: t.m, x: t.x.clone(), pow };
                if let Some((dd, j, cc)) = resolve(&canon, &c) {
                    debug_assert_eq!(dd, d);
                    entries.push((j as usize, col, cc));
                }
            }
            mats.push(SparseMatrix::from_entries(ts.len(), ts.len(), ring, entries));
        }
        gens.push(ChainMap::new(complex.clone(), complex.clone(), 0, mats)?);
    }
    let action = SignedAction { gens };
    Ok((LevelData { complex, action }, terms, orbit_map))
}

/// Leibniz differential of an ambient term (images have raw coset data).
fn differential_of_term(
    x: &SymSeq,
    y: &SymSeq,
    t: &CompTerm,
    ring: &Ring,
) -> Result<Vec<(CompTerm, Scalar)>, SymError> {
    let mut out = Vec::new();
    let xc = x.complex(t.m);
    let xd = t.x.degree();
    let xi = xc.index_of(xd, &t.x).expect("x label");
    for (r, s) in &xc.diff(xd).columns[xi as usize] {
        out.push((
            CompTerm { m: t.m, x: xc.basis(xd - 1)[*r as usize].clone(), pow: t.pow.clone() },
            s.clone(),
        ));
    }
    let mut sign_acc = if xd % 2 != 0 { ring.neg(&ring.one()) } else { ring.one() };
    for (j, l) in t.pow.parts.iter().enumerate() {
        let lvl = t.pow.nvec[j];
        let cy = y.complex(lvl);
        let d = l.degree();
        let idx = cy.index_of(d, l).expect("y label");
        for (r, s) in &cy.diff(d).columns[idx as usize] {
            let mut parts = t.pow.parts.clone();
            parts[j] = cy.basis(d - 1)[*r as usize].clone();
            out.push((
                CompTerm {
                    m: t.m,
                    x: t.x.clone(),
                    pow: PowTerm { nvec: t.pow.nvec.clone(), parts, rho: t.pow.rho.clone() },
                },
                ring.mul(&sign_acc, s),
            ));
        }
        if d % 2 != 0 {
            sign_acc = ring.neg(&sign_acc);
        }
    }
    Ok(out)
}

/// Level tensor product: `(X (x) Y)(n) = X(n) (x) Y(n)` with the diagonal
/// action.
pub fn level_tensor(x: &SymSeq, y: &SymSeq) -> Result<SymSeq, SymError> {
    let ring = x.ring;
    let trunc = x.trunc;
    let mut given = Vec::new();
    for n in 0..=trunc.max_level {
        let c = crate::chain::tensor_complexes(x.complex(n), y.complex(n))?;
        if c.total_dim() == 0 {
            continue;
        }
        let mut gens = Vec::new();
        for i in 0..n.saturating_sub(1) {
            gens.push(tensor_map(&x.level(n).action.gens[i], &y.level(n).action.gens[i], &c, &c)?);
        }
        given.push((n, c, SignedAction { gens }));
    }
    SymmetricSequence::from_levels(ring, trunc, given, x.complete && y.complete)
}

/// Tensor of two degree-0 chain maps on pair-labelled tensor complexes.
pub fn tensor_map(
    f: &ChainMap,
    g: &ChainMap,
    source: &Arc<ChainComplex>,
    target: &Arc<ChainComplex>,
) -> Result<ChainMap, SymError> {
    assert_eq!(f.shift, 0);
    assert_eq!(g.shift, 0);
    let ring = f.source.ring;
    ChainMap::from_fn(source.clone(), target.clone(), 0, |_, l| {
        let w = l.as_word().expect("tensor label");
        let (a, b) = (&w[0], &w[1]);
        let (da, db) = (a.degree(), b.degree());
        let ia = f.source.index_of(da, a).expect("left factor");
        let ib = g.source.index_of(db, b).expect("right factor");
        let mut out = Vec::new();
        for (ra, sa) in &f.mat(da).columns[ia as usize] {
            for (rb, sb) in &g.mat(db).columns[ib as usize] {
                let la = f.target.basis(da)[*ra as usize].clone();
                let lb = g.target.basis(db)[*rb as usize].clone();
                out.push((Label::pair(la, lb), ring.mul(sa, sb)));
            }
        }
        out
    })
    .map_err(SymError::Chain)
}

/// Graded tensor product via induced-representation bases:
/// `(X (.) Y)(m) = sum_{i+j=m} (X(i) (x) Y(j)) (x)_{Si x Sj} R[Sigma_m]`.
/// Basis labels are `(gt_i_j, x, y, rho)` words.
pub fn graded_tensor(x: &SymSeq, y: &SymSeq) -> Result<SymSeq, SymError> {
    let ring = x.ring;
    let trunc = x.trunc;
    let mut given = Vec::new();
    for m in 0..=trunc.max_level {
        // collect basis terms (i, x, y, rho) per degree
        #[derive(Clone)]
        struct Term {
            i: usize,
            x: Label,
            y: Label,
            rho: Perm,
        }
        let mut by_degree: std::collections::BTreeMap<Deg, Vec<Term>> = Default::default();
        for i in 0..=m {
            let j = m - i;
            if x.is_zero_level(i) || y.is_zero_level(j) {
                continue;
            }
            let reps = coset_reps(&[i, j]);
            for dx in x.complex(i).degrees() {
                for dy in y.complex(j).degrees() {
                    if dx + dy > trunc.max_degree {
                        continue;
                    }
                    for lx in x.complex(i).basis(dx) {
                        for ly in y.complex(j).basis(dy) {
                            for rho in &reps {
                                by_degree.entry(dx + dy).or_default().push(Term {
                                    i,
                                    x: lx.clone(),
                                    y: ly.clone(),
                                    rho: rho.clone(),
                                });
                            }
                        }
                    }
                }
            }
        }
        if by_degree.is_empty() {
            continue;
        }
        let lower = *by_degree.keys().next().unwrap();
        let upper = *by_degree.keys().last().unwrap();
        let encode = |t: &Term| {
            Label::word(vec![
                Label::gen(&format!("gt{}_{}", t.i, m - t.i), 0),
                t.x.clone(),
                t.y.clone(),
                Label::Perm(t.rho.clone()),
            ])
        };
        let mut bases = Vec::new();
        let mut table: Vec<Vec<Term>> = Vec::new();
        for d in lower..=upper {
            let ts = by_degree.get(&d).cloned().unwrap_or_default();
            bases.push(ts.iter().map(&encode).collect::<Vec<_>>());
            table.push(ts);
        }
        let lookup = |d: Deg, lab: &Label, bases: &Vec<Vec<Label>>| -> u32 {
            bases[(d - lower) as usize]
                .iter()
                .position(|l| l == lab)
                .expect("graded tensor term") as u32
        };
        // differential: Leibniz on (x, y), rho untouched
        let mut diffs = Vec::new();
        for (di, ts) in table.iter().enumerate() {
            let d = lower + di as Deg;
            let rows = if di == 0 { 0 } else { table[di - 1].len() };
            let mut entries = Vec::new();
            for (col, t) in ts.iter().enumerate() {
                let (i, j) = (t.i, m - t.i);
                let cx = x.complex(i);
                let cy = y.complex(j);
                let (dx, dy) = (t.x.degree(), t.y.degree());
                let xi = cx.index_of(dx, &t.x).unwrap();
                for (r, s) in &cx.diff(dx).columns[xi as usize] {
                    let mut nt = t.clone();
                    nt.x = cx.basis(dx - 1)[*r as usize].clone();
                    entries.push((lookup(d - 1, &encode(&nt), &bases) as usize, col, s.clone()));
                }
                let yi = cy.index_of(dy, &t.y).unwrap();
                let sgn = if dx % 2 != 0 { ring.neg(&ring.one()) } else { ring.one() };
                for (r, s) in &cy.diff(dy).columns[yi as usize] {
                    let mut nt = t.clone();
                    nt.y = cy.basis(dy - 1)[*r as usize].clone();
                    entries.push((
                        lookup(d - 1, &encode(&nt), &bases) as usize,
                        col,
                        ring.mul(&sgn, s),
                    ));
                }
            }
            diffs.push(SparseMatrix::from_entries(rows, ts.len(), &ring, entries));
        }
        let complex = ChainComplex::new(ring, lower, bases.clone(), diffs)?;
        // right action: multiply into rho, split, act on x and y
        let mut gens = Vec::new();
        for gi in 0..m.saturating_sub(1) {
            let s_i = Perm::adjacent(m, gi);
            let mut mats = Vec::new();
            for (di, ts) in table.iter().enumerate() {
                let d = lower + di as Deg;
                let mut entries = Vec::new();
                for (col, t) in ts.iter().enumerate() {
                    let (i, j) = (t.i, m - t.i);
                    let g = t.rho.compose(&s_i);
                    let (h, rho) = coset_split(&g, &[i, j]);
                    let mut coeff = ring.one();
                    let mut nt = Term { i, x: t.x.clone(), y: t.y.clone(), rho };
                    if !h[0].is_identity() {
                        let dx = t.x.degree();
                        let xi = x.complex(i).index_of(dx, &t.x).unwrap();
                        let (nx, s) = x.level(i).action.apply_perm(&ring, dx, xi, &h[0])?;
                        coeff = ring.mul(&coeff, &s);
                        nt.x = x.complex(i).basis(dx)[nx as usize].clone();
                    }
                    if !h[1].is_identity() {
                        let dy = t.y.degree();
                        let yi = y.complex(j).index_of(dy, &t.y).unwrap();
                        let (ny, s) = y.level(j).action.apply_perm(&ring, dy, yi, &h[1])?;
                        coeff = ring.mul(&coeff, &s);
                        nt.y = y.complex(j).basis(dy)[ny as usize].clone();
                    }
                    entries.push((lookup(d, &encode(&nt), &bases) as usize, col, coeff));
                }
                mats.push(SparseMatrix::from_entries(ts.len(), ts.len(), &ring, entries));
            }
            gens.push(ChainMap::new(complex.clone(), complex.clone(), 0, mats)?);
        }
        given.push((m, complex, SignedAction { gens }));
    }
    SymmetricSequence::from_levels(ring, trunc, given, x.complete && y.complete)
}

/// The intertwiner `(X (x) X') o (Y (x) Y') -> (X o Y) (x) (X' o Y')`:
/// termwise regrouping with Koszul signs.
///
/// `src` must be the composition product of the level tensors; `xy` and
/// `xy_p` the two target composition products.
pub fn intertwiner(
    src: &CompProduct,
    xy: &CompProduct,
    xyp: &CompProduct,
) -> Result<crate::sym::SymSeqMorphism, SymError> {
    let ring = src.x.ring;
    let trunc = src.seq.trunc;
    let target = level_tensor(&xy.seq, &xyp.seq)?;
    let mut maps = Vec::new();
    for n in 0..=trunc.max_level {
        let sc = src.seq.complex(n);
        let tc = target.complex(n);
        let mut mats = Vec::new();
        for d in sc.degrees() {
            let mut entries: Vec<(usize, usize, Scalar)> = Vec::new();
            for (col, t) in src.terms[n][(d - sc.lower) as usize].iter().enumerate() {
                // x part is a pair label; each y part is a pair label
                let xw = t.x.as_word().expect("pair");
                let (x1, x2) = (&xw[0], &xw[1]);
                let mut ys1 = Vec::new();
                let mut ys2 = Vec::new();
                for p in t.pow.parts.iter() {
                    let pw = p.as_word().expect("pair");
                    ys1.push(pw[0].clone());
                    ys2.push(pw[1].clone());
                }
                // Koszul sign: reorder [x1 x2 y1 y1' y2 y2' ..] to
                // [x1 y1 y2 .. x2 y1' y2' ..]
                let m = t.m;
                let mut degs: Vec<Deg> = vec![x1.degree(), x2.degree()];
                for k in 0..m {
                    degs.push(ys1[k].degree());
                    degs.push(ys2[k].degree());
                }
                // target position -> source position
                let mut perm: Vec<u8> = Vec::with_capacity(2 + 2 * m);
                perm.push(0);
                for k in 0..m {
                    perm.push((2 + 2 * k) as u8);
                }
                perm.push(1);
                for k in 0..m {
                    perm.push((2 + 2 * k + 1) as u8);
                }
                let sign = koszul_sign(&degs, &Perm(perm));
                let t1 = CompTerm {
                    m,
                    x: x1.clone(),
                    pow: PowTerm { nvec: t.pow.nvec.clone(), parts: ys1, rho: t.pow.rho.clone() },
                };
                let t2 = CompTerm {
                    m,
                    x: x2.clone(),
                    pow: PowTerm { nvec: t.pow.nvec.clone(), parts: ys2, rho: t.pow.rho.clone() },
                };
                let (d1, i1, c1) = xy.resolve(n, &t1)?;
                let (d2, i2, c2) = xyp.resolve(n, &t2)?;
                let lab = Label::pair(
                    xy.seq.complex(n).basis(d1)[i1 as usize].clone(),
                    xyp.seq.complex(n).basis(d2)[i2 as usize].clone(),
                );
                let row = tc.index_of(d, &lab).expect("target tensor label");
                let mut coeff = ring.mul(&c1, &c2);
                if sign < 0 {
                    coeff = ring.neg(&coeff);
                }
                entries.push((row as usize, col, coeff));
            }
            mats.push(SparseMatrix::from_entries(tc.dim(d), sc.dim(d), &ring, entries));
        }
        maps.push(ChainMap::new(sc.clone(), tc.clone(), 0, mats)?);
    }
    crate::sym::SymSeqMorphism::new(src.seq.clone(), target, 0, maps)
}
