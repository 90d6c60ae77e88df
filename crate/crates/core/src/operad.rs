//! Operads, their modules and bimodules, and the standard examples: the
//! associative operad, the sign-suspension operad and its dual sequence,
//! the free graded monoid on a coalgebra, and the constant/trivial
//! embeddings of algebras.
//!
//! Structure maps are carried as *family evaluators*: functions on basis
//! tuples. They extend to the composition product through the orbit
//! witnesses, and `extend_family` checks equivariance along the way.

use crate::chain::{ChainComplex, ChainMap};
use crate::label::Label;
use crate::matrix::{sv_add, sv_scale, SparseMatrix, SparseVec};
use crate::perm::{block_perm, gamma_compose, koszul_sign, Deg, Perm};
use crate::scalar::{Ring, Scalar};
use crate::sym::{
    composition_product, extend_family, sign_action, CompProduct, SignedAction, SymError, SymSeq, SymSeqMorphism, SymmetricSequence, Trunc,
};
use std::sync::Arc;

/// Value of a structure map on a basis tuple: `eval(op, sizes, args)` where
/// `op` is a basis label of the acting level and `args` are basis labels of
/// the argument levels `sizes[i]`. The result is a sparse element of the
/// target level `sum(sizes)`, in the appropriate degree.
pub type FamilyEval = Arc<dyn Fn(&Label, &[usize], &[Label]) -> SparseVec + Send + Sync>;

#[derive(Clone)]
pub struct OperadStructure {
    pub seq: SymSeq,
    /// Composition on basis tuples: `comp(p, sizes, [q_i]) in P(n)`.
    pub comp: FamilyEval,
    /// Basis label of the unit in level 1, degree 0.
    pub unit: Label,
    pub name: String,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Left,
    Right,
    Bi,
}

#[derive(Clone)]
pub struct ModuleStructure {
    pub side: Side,
    pub carrier: SymSeq,
    pub operad: Arc<OperadStructure>,
    /// `lambda(p, sizes, [m_i])` for left modules.
    pub left: Option<FamilyEval>,
    /// `rho(m, sizes, [p_i])` for right modules.
    pub right: Option<FamilyEval>,
    pub name: String,
}

/// The associative operad: level `n` is the group ring of `Sigma_n` in
/// degree 0 (level 0 is zero), composition by block permutation.
pub fn associative_operad(ring: Ring, trunc: Trunc) -> Arc<OperadStructure> {
    let mut given = Vec::new();
    for n in 1..=trunc.max_level {
        let basis: Vec<Label> = crate::perm::all_perms(n).into_iter().map(Label::Perm).collect();
        let dim = basis.len();
        let c = ChainComplex::new(ring, 0, vec![basis.clone()], vec![SparseMatrix::zero(0, dim)])
            .unwrap();
        let mut gens = Vec::new();
        for i in 0..n.saturating_sub(1) {
            let s_i = Perm::adjacent(n, i);
            let g = ChainMap::from_fn(c.clone(), c.clone(), 0, |_, l| {
                let p = l.as_perm().unwrap();
                vec![(Label::Perm(p.compose(&s_i)), ring.one())]
            })
            .unwrap();
            gens.push(g);
        }
        given.push((n, c, SignedAction { gens }));
    }
    let seq = SymmetricSequence::from_levels(ring, trunc, given, false).unwrap();
    let comp: FamilyEval = Arc::new(move |p: &Label, sizes: &[usize], args: &[Label]| {
        let sigma = p.as_perm().expect("group-ring label");
        let taus: Vec<Perm> = args.iter().map(|a| a.as_perm().unwrap().clone()).collect();
        let g = gamma_compose(sigma, &taus, sizes);
        // index within all_perms ordering is resolved by the caller through
        // the label; return the label-indexed element
        vec![(perm_index(&g), ring.one())]
    });
    Arc::new(OperadStructure {
        seq,
        comp,
        unit: Label::Perm(Perm::identity(1)),
        name: "assoc".into(),
    })
}

/// Index of a permutation in the sorted `all_perms` basis of its level.
fn perm_index(p: &Perm) -> u32 {
    // all_perms returns sorted perms; compute the lexicographic rank of the
    // image vector directly.
    let n = p.len();
    let mut rank = 0usize;
    let mut remaining: Vec<u8> = (0..n as u8).collect();
    for i in 0..n {
        let pos = remaining.iter().position(|&v| v == p.0[i]).unwrap();
        let mut fact = 1usize;
        for k in 1..(n - i) {
            fact *= k;
        }
        rank += pos * fact;
        remaining.remove(pos);
    }
    rank as u32
}

/// The sign-suspension operad: level `n` is one generator of degree `n-1`
/// with the sign representation; composition interleaves suspension letters.
pub fn suspension_operad(ring: Ring, trunc: Trunc) -> Arc<OperadStructure> {
    let mut given = Vec::new();
    for n in 1..=trunc.max_level {
        let c = ChainComplex::generator(ring, susp_label(n), (n - 1) as Deg);
        let action = sign_action(&ring, &c, n);
        given.push((n, c, action));
    }
    let seq = SymmetricSequence::from_levels(ring, trunc, given, false).unwrap();
    let r = ring;
    let comp: FamilyEval = Arc::new(move |_p: &Label, sizes: &[usize], _args: &[Label]| {
        let s = interleave_sign(sizes);
        let one = if s < 0 { r.neg(&r.one()) } else { r.one() };
        vec![(0u32, one)]
    });
    Arc::new(OperadStructure {
        seq,
        comp,
        unit: susp_label(1),
        name: "susp".into(),
    })
}

pub fn susp_label(n: usize) -> Label {
    Label::gen(&format!("s{}", n - 1), (n - 1) as Deg)
}

/// Koszul sign of interleaving the `k-1` outer suspension letters with the
/// inner letter words: `(X_1..X_{k-1}, Y^1, .., Y^k)` goes to
/// `(Y^1, X_1, Y^2, X_2, .., X_{k-1}, Y^k)`, all letters of degree 1.
fn interleave_sign(sizes: &[usize]) -> i64 {
    let k = sizes.len();
    let outer = k - 1;
    let total: usize = outer + sizes.iter().map(|&n| n - 1).sum::<usize>();
    if total == 0 {
        return 1;
    }
    // source positions: X_i at i (0-based, i < outer), then Y-letters
    let mut y_offset = vec![0usize; k];
    let mut acc = outer;
    for (i, &n) in sizes.iter().enumerate() {
        y_offset[i] = acc;
        acc += n - 1;
    }
    // target order
    let mut target: Vec<u8> = Vec::with_capacity(total);
    for i in 0..k {
        for t in 0..(sizes[i] - 1) {
            target.push((y_offset[i] + t) as u8);
        }
        if i < outer {
            target.push(i as u8);
        }
    }
    let degs = vec![1 as Deg; total];
    koszul_sign(&degs, &Perm(target))
}

/// The dual sequence to the associative operad: level `n` is the free
/// rank-one right group-ring module on a generator of degree `n-1`, with
/// the action twisted by sign. Basis labels are `(a{n}, sigma)` words.
pub fn adual_sequence(ring: Ring, trunc: Trunc) -> SymSeq {
    let mut given = Vec::new();
    for n in 1..=trunc.max_level {
        if (n as Deg - 1) > trunc.max_degree {
            continue;
        }
        let basis: Vec<Label> = crate::perm::all_perms(n)
            .into_iter()
            .map(|s| adual_label(n, &s))
            .collect();
        let dim = basis.len();
        let c = ChainComplex::new(
            ring,
            (n - 1) as Deg,
            vec![basis],
            vec![SparseMatrix::zero(0, dim)],
        )
        .unwrap();
        let mut gens = Vec::new();
        for i in 0..n.saturating_sub(1) {
            let s_i = Perm::adjacent(n, i);
            let g = ChainMap::from_fn(c.clone(), c.clone(), 0, |_, l| {
                let w = l.as_word().unwrap();
                let sigma = w[1].as_perm().unwrap();
                vec![(adual_label(n, &sigma.compose(&s_i)), ring.neg(&ring.one()))]
            })
            .unwrap();
            gens.push(g);
        }
        given.push((n, c, SignedAction { gens }));
    }
    SymmetricSequence::from_levels(ring, trunc, given, false).unwrap()
}

pub fn adual_label(n: usize, sigma: &Perm) -> Label {
    Label::word(vec![
        Label::gen(&format!("a{n}"), (n - 1) as Deg),
        Label::Perm(sigma.clone()),
    ])
}

/// A coassociative chain coalgebra (no counit required): a complex with a
/// coproduct evaluator on basis labels.
#[derive(Clone)]
pub struct ChainCoalgebra {
    pub complex: Arc<ChainComplex>,
    /// `cop(c)` as pairs `((c', c''), coeff)`.
    pub cop: Arc<dyn Fn(&Label) -> Vec<((Label, Label), Scalar)> + Send + Sync>,
    pub name: String,
}

/// An associative chain algebra (no unit required).
#[derive(Clone)]
pub struct ChainAlgebra {
    pub complex: Arc<ChainComplex>,
    /// `mul(a, b)` as a sparse element of the complex.
    pub mul: Arc<dyn Fn(&Label, &Label) -> Vec<(Label, Scalar)> + Send + Sync>,
    pub name: String,
}

impl ChainCoalgebra {
    /// Iterated coproduct with Koszul signs: `n = 1` is the identity,
    /// `n = 2` is `cop`, and in general `(cop (x) id^(n-2)) o ..`.
    pub fn iterated_cop(&self, l: &Label, n: usize) -> Vec<(Vec<Label>, Scalar)> {
        let ring = self.complex.ring;
        let mut acc: Vec<(Vec<Label>, Scalar)> = vec![(vec![l.clone()], ring.one())];
        for _ in 1..n {
            let mut next = Vec::new();
            for (word, coeff) in &acc {
                // expand the first factor (co-associativity makes any
                // placement equal; the first keeps signs simple:
                // cop applied to factor 0 crosses nothing)
                let head = &word[0];
                for ((a, b), s) in (self.cop)(head) {
                    let mut w = vec![a, b];
                    w.extend(word[1..].iter().cloned());
                    next.push((w, ring.mul(coeff, &s)));
                }
            }
            acc = next;
        }
        acc
    }

    /// Verify coassociativity and the chain-map condition on all basis
    /// elements; returns the first violation.
    pub fn validate(&self) -> Result<(), SymError> {
        let ring = self.complex.ring;
        let cx = &self.complex;
        // chain map: cop(dc) = d(cop c) with Leibniz
        for d in cx.degrees() {
            for (i, l) in cx.basis(d).iter().enumerate() {
                let mut lhs: Vec<(Label, Label, Scalar)> = Vec::new();
                for (r, s) in &cx.diff(d).columns[i] {
                    for ((a, b), t) in (self.cop)(&cx.basis(d - 1)[*r as usize]) {
                        lhs.push((a, b, ring.mul(s, &t)));
                    }
                }
                let mut rhs: Vec<(Label, Label, Scalar)> = Vec::new();
                for ((a, b), t) in (self.cop)(l) {
                    let da = a.degree();
                    let ia = cx.index_of(da, &a).unwrap();
                    for (r, s) in &cx.diff(da).columns[ia as usize] {
                        rhs.push((cx.basis(da - 1)[*r as usize].clone(), b.clone(), ring.mul(&t, s)));
                    }
                    let db = b.degree();
                    let ib = cx.index_of(db, &b).unwrap();
                    let sgn = if da % 2 != 0 { ring.neg(&ring.one()) } else { ring.one() };
                    for (r, s) in &cx.diff(db).columns[ib as usize] {
                        rhs.push((
                            a.clone(),
                            cx.basis(db - 1)[*r as usize].clone(),
                            ring.mul(&ring.mul(&t, s), &sgn),
                        ));
                    }
                }
                if !pair_sums_equal(&ring, lhs, rhs) {
                    return Err(SymError::Other(format!(
                        "coproduct is not a chain map on {l}"
                    )));
                }
                // coassociativity
                let mut left: Vec<(Vec<Label>, Scalar)> = Vec::new();
                for ((a, b), s) in (self.cop)(l) {
                    for ((a1, a2), t) in (self.cop)(&a) {
                        left.push((vec![a1, a2, b.clone()], ring.mul(&s, &t)));
                    }
                }
                let mut right: Vec<(Vec<Label>, Scalar)> = Vec::new();
                for ((a, b), s) in (self.cop)(l) {
                    for ((b1, b2), t) in (self.cop)(&b) {
                        // Koszul: cop moves past a (degree |a|) -- cop is
                        // degree 0, no sign
                        right.push((vec![a.clone(), b1, b2], ring.mul(&s, &t)));
                    }
                }
                if !word_sums_equal(&ring, left, right) {
                    return Err(SymError::Other(format!("coproduct not coassociative on {l}")));
                }
            }
        }
        Ok(())
    }
}

impl ChainAlgebra {
    pub fn iterated_mul(&self, word: &[Label]) -> Vec<(Label, Scalar)> {
        let ring = self.complex.ring;
        let mut acc: Vec<(Label, Scalar)> = vec![(word[0].clone(), ring.one())];
        for next in &word[1..] {
            let mut out = Vec::new();
            for (l, s) in &acc {
                for (m, t) in (self.mul)(l, next) {
                    out.push((m, ring.mul(s, &t)));
                }
            }
            acc = out;
        }
        acc
    }

    pub fn validate(&self) -> Result<(), SymError> {
        let ring = self.complex.ring;
        let cx = &self.complex;
        let all: Vec<Label> =
            cx.degrees().flat_map(|d| cx.basis(d).iter().cloned()).collect();
        for a in &all {
            for b in &all {
                for c in &all {
                    let mut lhs = Vec::new();
                    for (ab, s) in (self.mul)(a, b) {
                        for (abc, t) in (self.mul)(&ab, c) {
                            lhs.push((abc, ring.mul(&s, &t)));
                        }
                    }
                    let mut rhs = Vec::new();
                    for (bc, s) in (self.mul)(b, c) {
                        for (abc, t) in (self.mul)(a, &bc) {
                            rhs.push((abc, ring.mul(&s, &t)));
                        }
                    }
                    if !label_sums_equal(&ring, lhs, rhs) {
                        return Err(SymError::Other(format!(
                            "product not associative on ({a}, {b}, {c})"
                        )));
                    }
                }
            }
            // chain map on pairs
            for b in &all {
                let (da, db) = (a.degree(), b.degree());
                let mut lhs = Vec::new();
                let ia = cx.index_of(da, a).unwrap();
                for (r, s) in &cx.diff(da).columns[ia as usize] {
                    for (m, t) in (self.mul)(&cx.basis(da - 1)[*r as usize], b) {
                        lhs.push((m, ring.mul(s, &t)));
                    }
                }
                let sgn = if da % 2 != 0 { ring.neg(&ring.one()) } else { ring.one() };
                let ib = cx.index_of(db, b).unwrap();
                for (r, s) in &cx.diff(db).columns[ib as usize] {
                    for (m, t) in (self.mul)(a, &cx.basis(db - 1)[*r as usize]) {
                        lhs.push((m, ring.mul(&ring.mul(s, &t), &sgn)));
                    }
                }
                let mut rhs = Vec::new();
                for (m, s) in (self.mul)(a, b) {
                    let dm = m.degree();
                    let im = cx.index_of(dm, &m).unwrap();
                    for (r, t) in &cx.diff(dm).columns[im as usize] {
                        rhs.push((cx.basis(dm - 1)[*r as usize].clone(), ring.mul(&s, t)));
                    }
                }
                if !label_sums_equal(&ring, lhs, rhs) {
                    return Err(SymError::Other(format!(
                        "product is not a chain map on ({a}, {b})"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn label_sums_equal(ring: &Ring, a: Vec<(Label, Scalar)>, b: Vec<(Label, Scalar)>) -> bool {
    use std::collections::BTreeMap;
    let mut acc: BTreeMap<Label, Scalar> = BTreeMap::new();
    for (l, s) in a {
        let e = acc.entry(l).or_insert_with(|| ring.zero());
        *e = ring.add(e, &s);
    }
    for (l, s) in b {
        let e = acc.entry(l).or_insert_with(|| ring.zero());
        *e = ring.sub(e, &s);
    }
    acc.values().all(|s| ring.is_zero(s))
}

fn word_sums_equal(ring: &Ring, a: Vec<(Vec<Label>, Scalar)>, b: Vec<(Vec<Label>, Scalar)>) -> bool {
    label_sums_equal(
        ring,
        a.into_iter().map(|(w, s)| (Label::word(w), s)).collect(),
        b.into_iter().map(|(w, s)| (Label::word(w), s)).collect(),
    )
}

fn pair_sums_equal(ring: &Ring, a: Vec<(Label, Label, Scalar)>, b: Vec<(Label, Label, Scalar)>) -> bool {
    label_sums_equal(
        ring,
        a.into_iter().map(|(x, y, s)| (Label::pair(x, y), s)).collect(),
        b.into_iter().map(|(x, y, s)| (Label::pair(x, y), s)).collect(),
    )
}

/// Tensor word complexes `T(C)(n) = C^{(x) n}` with labels that are flat
/// words of `C` labels; `T(C)(0) = R` on the empty word.
pub fn tensor_power_complex(
    c: &Arc<ChainComplex>,
    n: usize,
    max_degree: Deg,
) -> Arc<ChainComplex> {
    let ring = c.ring;
    if n == 0 {
        return ChainComplex::generator(ring, Label::word(vec![]), 0);
    }
    // enumerate words by degree
    let mut words: Vec<(Vec<Label>, Deg)> = vec![(vec![], 0)];
    for _ in 0..n {
        let mut next = Vec::new();
        for (w, d) in &words {
            for dd in c.degrees() {
                if d + dd > max_degree {
                    continue;
                }
                for l in c.basis(dd) {
                    let mut w2 = w.clone();
                    w2.push(l.clone());
                    next.push((w2, d + dd));
                }
            }
        }
        words = next;
    }
    if words.is_empty() {
        return ChainComplex::zero(ring);
    }
    let lower = words.iter().map(|(_, d)| *d).min().unwrap();
    let upper = words.iter().map(|(_, d)| *d).max().unwrap();
    let mut bases: Vec<Vec<Label>> = vec![Vec::new(); (upper - lower + 1) as usize];
    for (w, d) in &words {
        bases[(*d - lower) as usize].push(Label::word(w.clone()));
    }
    for b in &mut bases {
        b.sort();
    }
    let lookup = |d: Deg, l: &Label, bases: &Vec<Vec<Label>>| -> Option<u32> {
        let i = (d - lower) as usize;
        bases.get(i).and_then(|b| b.binary_search(l).ok()).map(|p| p as u32)
    };
    let mut diffs = Vec::new();
    for (di, basis) in bases.iter().enumerate() {
        let d = lower + di as Deg;
        let rows = if di == 0 { 0 } else { bases[di - 1].len() };
        let mut entries = Vec::new();
        for (col, l) in basis.iter().enumerate() {
            let w = l.as_word().unwrap();
            let mut sign = ring.one();
            for (t, f) in w.iter().enumerate() {
                let df = f.degree();
                let fi = c.index_of(df, f).unwrap();
                for (r, s) in &c.diff(df).columns[fi as usize] {
                    let mut w2: Vec<Label> = w.to_vec();
                    w2[t] = c.basis(df - 1)[*r as usize].clone();
                    let tl = Label::word(w2);
                    if let Some(row) = lookup(d - 1, &tl, &bases) {
                        entries.push((row as usize, col, ring.mul(&sign, s)));
                    }
                }
                if df % 2 != 0 {
                    sign = ring.neg(&sign);
                }
            }
        }
        diffs.push(SparseMatrix::from_entries(rows, basis.len(), &ring, entries));
    }
    ChainComplex::new(ring, lower, bases, diffs).expect("tensor power is a complex")
}

/// The free graded monoid `T(C)` on a chain complex, as a symmetric
/// sequence with the factor-permutation action (with Koszul signs).
pub fn tensor_sequence(c: &Arc<ChainComplex>, trunc: Trunc) -> Result<SymSeq, SymError> {
    let ring = c.ring;
    let mut given = Vec::new();
    for n in 0..=trunc.max_level {
        let cx = tensor_power_complex(c, n, trunc.max_degree);
        if cx.total_dim() == 0 {
            continue;
        }
        let mut gens = Vec::new();
        for i in 0..n.saturating_sub(1) {
            let g = ChainMap::from_fn(cx.clone(), cx.clone(), 0, |_, l| {
                let w = l.as_word().unwrap();
                let mut w2: Vec<Label> = w.to_vec();
                w2.swap(i, i + 1);
                let sign = if w[i].degree() % 2 != 0 && w[i + 1].degree() % 2 != 0 {
                    ring.neg(&ring.one())
                } else {
                    ring.one()
                };
                vec![(Label::word(w2), sign)]
            })
            .map_err(SymError::Chain)?;
            gens.push(g);
        }
        given.push((n, cx, SignedAction { gens }));
    }
    SymmetricSequence::from_levels(ring, trunc, given, false)
}

/// Apply a permutation to a flat tensor word with Koszul signs.
pub fn word_act(ring: &Ring, w: &[Label], sigma: &Perm) -> (Vec<Label>, Scalar) {
    let degs: Vec<Deg> = w.iter().map(|l| l.degree()).collect();
    let sign = koszul_sign(&degs, sigma);
    let out: Vec<Label> = (0..w.len()).map(|t| w[sigma.apply(t)].clone()).collect();
    (out, if sign < 0 { ring.neg(&ring.one()) } else { ring.one() })
}

/// The free graded monoid on a coalgebra as an `(A, A)`-bimodule: the left
/// action concatenates words, the right action applies iterated coproducts.
pub struct TensorBimodule {
    pub module: ModuleStructure,
    pub coalgebra: ChainCoalgebra,
}

pub fn embed_tensor(
    coalg: &ChainCoalgebra,
    a: &Arc<OperadStructure>,
    trunc: Trunc,
) -> Result<TensorBimodule, SymError> {
    coalg.validate()?;
    let ring = coalg.complex.ring;
    let carrier = tensor_sequence(&coalg.complex, trunc)?;
    // left action: concatenation. The group-ring part of the acting label
    // contributes nothing here: reordering the chunks and then letting the
    // block permutation act through the signed factor-permutation action
    // cancel exactly, so the equivariant extension of "concatenate" takes
    // this value on every basis element of A(m).
    let car = carrier.clone();
    let r = ring;
    let left: FamilyEval = Arc::new(move |_p: &Label, sizes: &[usize], args: &[Label]| {
        let mut word: Vec<Label> = Vec::new();
        for a in args {
            word.extend(a.as_word().unwrap().iter().cloned());
        }
        let n: usize = sizes.iter().sum();
        let lab = Label::word(word);
        let deg = lab.degree();
        match car.complex(n).index_of(deg, &lab) {
            Some(idx) => vec![(idx, r.one())],
            // outside the degree window of the truncated carrier
            None if deg > car.trunc.max_degree => vec![],
            None => panic!("word {lab} missing from carrier level {n}"),
        }
    });
    // right action: iterated coproducts shuffled into place
    let car2 = carrier.clone();
    let coal = coalg.clone();
    let right: FamilyEval = Arc::new(move |m: &Label, sizes: &[usize], args: &[Label]| {
        // m is a word (c_1 .. c_k); args[i] is a Sigma_{sizes[i]} label;
        // value = shuffle of theta_{sizes[i]}(c_i) with signs, then the
        // group elements act on the right of each chunk.
        let w = m.as_word().unwrap();
        debug_assert_eq!(w.len(), sizes.len());
        let n: usize = sizes.iter().sum();
        let ring = coal.complex.ring;
        // iterated coproducts per factor
        let mut pieces: Vec<Vec<(Vec<Label>, Scalar)>> = Vec::new();
        for (i, c) in w.iter().enumerate() {
            if sizes[i] == 0 {
                // A(0) = 0: no value
                return Vec::new();
            }
            let mut piece = coal.iterated_cop(c, sizes[i]);
            // apply the group element to the chunk
            let sigma = args[i].as_perm().unwrap();
            if !sigma.is_identity() {
                piece = piece
                    .into_iter()
                    .map(|(word, s)| {
                        let (w2, t) = word_act(&ring, &word, sigma);
                        (w2, ring.mul(&s, &t))
                    })
                    .collect();
            }
            pieces.push(piece);
        }
        // expand the product over factors; no shuffle signs arise beyond
        // the Koszul cost of splitting, which iterated_cop already carries,
        // because chunks stay in factor order.
        let mut acc: Vec<(Vec<Label>, Scalar)> = vec![(vec![], ring.one())];
        for piece in &pieces {
            let mut next = Vec::new();
            for (w0, s0) in &acc {
                for (w1, s1) in piece {
                    let mut w = w0.clone();
                    w.extend(w1.iter().cloned());
                    next.push((w, ring.mul(s0, s1)));
                }
            }
            acc = next;
        }
        let mut out: SparseVec = Vec::new();
        for (word, s) in acc {
            let lab = Label::word(word);
            let deg = lab.degree();
            if let Some(idx) = car2.complex(n).index_of(deg, &lab) {
                out = sv_add(&ring, &out, &vec![(idx, s)]);
            }
        }
        out
    });
    Ok(TensorBimodule {
        module: ModuleStructure {
            side: Side::Bi,
            carrier,
            operad: a.clone(),
            left: Some(left),
            right: Some(right),
            name: format!("T({})", coalg.name),
        },
        coalgebra: coalg.clone(),
    })
}

/// The constant embedding of an algebra as a left module: level `n >= 1` is
/// the algebra itself with trivial action; the action is iterated
/// multiplication.
pub fn embed_const(
    alg: &ChainAlgebra,
    a: &Arc<OperadStructure>,
    trunc: Trunc,
) -> Result<ModuleStructure, SymError> {
    alg.validate()?;
    let ring = alg.complex.ring;
    let mut given = Vec::new();
    for n in 1..=trunc.max_level {
        let c = relabel(&alg.complex, n);
        given.push((n, c.clone(), SignedAction::trivial(&c, n)));
    }
    let carrier = SymmetricSequence::from_levels(ring, trunc, given, false)?;
    let alg2 = alg.clone();
    let car = carrier.clone();
    let left: FamilyEval = Arc::new(move |p: &Label, sizes: &[usize], args: &[Label]| {
        let sigma = p.as_perm().unwrap();
        let ring = alg2.complex.ring;
        let n: usize = sizes.iter().sum();
        // strip level tags, reorder by the chunk pattern of the block
        // permutation (each chunk is one algebra factor), multiply
        let inner: Vec<Label> = args.iter().map(strip_level).collect();
        let (word, ks) = word_act(&ring, &inner, &sigma.inverse());
        let mut out: SparseVec = Vec::new();
        for (l, s) in alg2.iterated_mul(&word) {
            let lab = level_tag(&l, n);
            let deg = lab.degree();
            if let Some(i) = car.complex(n).index_of(deg, &lab) {
                out = sv_add(&ring, &out, &vec![(i, ring.mul(&ks, &s))]);
            }
        }
        out
    });
    Ok(ModuleStructure {
        side: Side::Left,
        carrier,
        operad: a.clone(),
        left: Some(left),
        right: None,
        name: format!("c({})", alg.name),
    })
}

/// The trivial embedding: the algebra sits in level 0.
pub fn embed_trivial(
    alg: &ChainAlgebra,
    a: &Arc<OperadStructure>,
    trunc: Trunc,
) -> Result<ModuleStructure, SymError> {
    alg.validate()?;
    let ring = alg.complex.ring;
    let c = relabel(&alg.complex, 0);
    let carrier = SymmetricSequence::from_levels(
        ring,
        trunc,
        vec![(0, c.clone(), SignedAction::trivial(&c, 0))],
        true,
    )?;
    let alg2 = alg.clone();
    let car = carrier.clone();
    let left: FamilyEval = Arc::new(move |p: &Label, _sizes: &[usize], args: &[Label]| {
        let sigma = p.as_perm().unwrap();
        let ring = alg2.complex.ring;
        let inner: Vec<Label> = args.iter().map(strip_level).collect();
        let (word, ks) = word_act(&ring, &inner, &sigma.inverse());
        let mut out: SparseVec = Vec::new();
        for (l, s) in alg2.iterated_mul(&word) {
            let lab = level_tag(&l, 0);
            let deg = lab.degree();
            if let Some(i) = car.complex(0).index_of(deg, &lab) {
                out = sv_add(&ring, &out, &vec![(i, ring.mul(&ks, &s))]);
            }
        }
        out
    });
    Ok(ModuleStructure {
        side: Side::Left,
        carrier,
        operad: a.clone(),
        left: Some(left),
        right: None,
        name: format!("z({})", alg.name),
    })
}

fn level_tag(l: &Label, n: usize) -> Label {
    Label::word(vec![Label::gen(&format!("lv{n}"), 0), l.clone()])
}

fn strip_level(l: &Label) -> Label {
    l.as_word().expect("level-tagged label")[1].clone()
}

fn relabel(c: &Arc<ChainComplex>, n: usize) -> Arc<ChainComplex> {
    let bases = c
        .bases
        .iter()
        .map(|b| b.iter().map(|l| level_tag(l, n)).collect())
        .collect();
    ChainComplex::new(c.ring, c.lower, bases, c.diffs.clone()).unwrap()
}

/// Materialize a left action as a morphism `P o M -> M`, checking
/// equivariance; used by the axiom suites.
pub fn materialize_left(
    m: &ModuleStructure,
) -> Result<(CompProduct, SymSeqMorphism), SymError> {
    let p = &m.operad;
    let prod = crate::sym::composition_product_windowed(&p.seq, &m.carrier)?;
    let eval = m.left.clone().expect("left action");
    let carrier = m.carrier.clone();
    let fam = (0 as Deg, move |mm: usize, sizes: &[usize], x: &Label, ys: &[Label]| {
        let _ = mm;
        eval(x, sizes, ys)
    });
    let f = extend_family(&prod, &carrier, &fam)?;
    Ok((prod, f))
}

/// Materialize a right action as a morphism `M o P -> M`.
pub fn materialize_right(
    m: &ModuleStructure,
) -> Result<(CompProduct, SymSeqMorphism), SymError> {
    let p = &m.operad;
    let prod = composition_product(&m.carrier, &p.seq)?;
    let eval = m.right.clone().expect("right action");
    let carrier = m.carrier.clone();
    let fam = (0 as Deg, move |mm: usize, sizes: &[usize], x: &Label, ys: &[Label]| {
        let _ = mm;
        eval(x, sizes, ys)
    });
    let f = extend_family(&prod, &carrier, &fam)?;
    Ok((prod, f))
}

/// Report from the structure verifier: one line per axiom.
#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub name: String,
    pub ok: bool,
    pub witness: Option<String>,
}

/// Tuple-level associativity and unit checks for an operad, within the
/// truncation window.
pub fn verify_operad(p: &Arc<OperadStructure>) -> Vec<AxiomReport> {
    let ring = p.seq.ring;
    let max = p.seq.max_level();
    let mut out = Vec::new();
    // unit: comp(unit; x) = x and comp(x; unit, .., unit) = x
    let mut unit_ok = true;
    let mut unit_witness = None;
    for n in 1..=max {
        if p.seq.is_zero_level(n) {
            continue;
        }
        let cx = p.seq.complex(n);
        for d in cx.degrees() {
            for (i, l) in cx.basis(d).iter().enumerate() {
                let v = (p.comp)(&p.unit, &[n], &[l.clone()]);
                if v != vec![(i as u32, ring.one())] {
                    unit_ok = false;
                    unit_witness = Some(format!("comp(1; {l}) != {l}"));
                }
                let units: Vec<Label> = vec![p.unit.clone(); n];
                let v = (p.comp)(l, &vec![1; n], &units);
                if v != vec![(i as u32, ring.one())] {
                    unit_ok = false;
                    unit_witness = Some(format!("comp({l}; 1..1) != {l}"));
                }
            }
        }
    }
    out.push(AxiomReport { name: "operad.unit".into(), ok: unit_ok, witness: unit_witness });
    // associativity on basis tuples: comp(comp(p; q); r) = comp(p; comp(q; r))
    let mut ok = true;
    let mut witness = None;
    'outer: for k in 1..=max {
        if p.seq.is_zero_level(k) {
            continue;
        }
        for jvec in levels_tuples(p, k, max) {
            let j: usize = jvec.iter().sum();
            if j > max {
                continue;
            }
            for qs in basis_tuples(p, &jvec) {
                for rvec in levels_tuples(p, j, max) {
                    let n: usize = rvec.iter().sum();
                    if n > max {
                        continue;
                    }
                    for rs in basis_tuples(p, &rvec) {
                        for pl in all_level_labels(p, k) {
                            if !assoc_instance(p, &ring, &pl, &jvec, &qs, &rvec, &rs) {
                                ok = false;
                                witness = Some(format!(
                                    "p={pl}, q-levels {jvec:?}, r-levels {rvec:?}"
                                ));
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
    }
    out.push(AxiomReport { name: "operad.assoc".into(), ok, witness });
    out
}

fn all_level_labels(p: &Arc<OperadStructure>, k: usize) -> Vec<Label> {
    let cx = p.seq.complex(k);
    cx.degrees().flat_map(|d| cx.basis(d).iter().cloned()).collect()
}

fn levels_tuples(p: &Arc<OperadStructure>, k: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for t in &out {
            for lvl in 1..=max {
                if p.seq.is_zero_level(lvl) {
                    continue;
                }
                let sum: usize = t.iter().sum();
                if sum + lvl <= max {
                    let mut t2 = t.clone();
                    t2.push(lvl);
                    next.push(t2);
                }
            }
        }
        out = next;
    }
    out
}

fn basis_tuples(p: &Arc<OperadStructure>, levels: &[usize]) -> Vec<Vec<Label>> {
    let mut out = vec![vec![]];
    for &lvl in levels {
        let labels = all_level_labels(p, lvl);
        let mut next = Vec::new();
        for t in &out {
            for l in &labels {
                let mut t2 = t.clone();
                t2.push(l.clone());
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

fn assoc_instance(
    p: &Arc<OperadStructure>,
    ring: &Ring,
    pl: &Label,
    jvec: &[usize],
    qs: &[Label],
    rvec: &[usize],
    rs: &[Label],
) -> bool {
    let j: usize = jvec.iter().sum();
    let n: usize = rvec.iter().sum();
    let pq = (p.comp)(pl, jvec, qs);
    // lhs: comp(pq; rs)
    let mut lhs: SparseVec = Vec::new();
    let cxj = p.seq.complex(j);
    let dq: Deg = pl.degree() + qs.iter().map(|l| l.degree()).sum::<Deg>();
    for (i, s) in &pq {
        let l = &cxj.basis(dq)[*i as usize];
        let v = (p.comp)(l, rvec, rs);
        lhs = sv_add(ring, &lhs, &sv_scale(ring, s, &v));
    }
    // rhs: comp(p; comp(q_i; r-chunk_i)); distributing q_i past the earlier
    // argument chunks costs the usual interchange sign
    let mut chunks: Vec<(&[usize], &[Label])> = Vec::new();
    let mut off = 0usize;
    for &ji in jvec {
        chunks.push((&rvec[off..off + ji], &rs[off..off + ji]));
        off += ji;
    }
    let mut parts: Vec<SparseVec> = Vec::new();
    let mut passed: Deg = 0;
    for (i, q) in qs.iter().enumerate() {
        let mut v = (p.comp)(q, chunks[i].0, chunks[i].1);
        if crate::perm::cross_sign(q.degree(), passed) < 0 {
            v = sv_scale(ring, &ring.neg(&ring.one()), &v);
        }
        passed += chunks[i].1.iter().map(|l| l.degree()).sum::<Deg>();
        parts.push(v);
    }
    let mut rhs: SparseVec = Vec::new();
    // expand the multilinear combination
    let mut stack: Vec<(usize, Vec<Label>, Scalar)> = vec![(0, Vec::new(), ring.one())];
    while let Some((i, labels, coeff)) = stack.pop() {
        if i == parts.len() {
            let sizes: Vec<usize> = chunks.iter().map(|(sv, _)| sv.iter().sum()).collect();
            let v = (p.comp)(pl, &sizes, &labels);
            rhs = sv_add(ring, &rhs, &sv_scale(ring, &coeff, &v));
            continue;
        }
        let lvl: usize = chunks[i].0.iter().sum();
        let cx = p.seq.complex(lvl);
        let dd: Deg = qs[i].degree() + chunks[i].1.iter().map(|l| l.degree()).sum::<Deg>();
        for (t, s) in &parts[i] {
            let mut l2 = labels.clone();
            l2.push(cx.basis(dd)[*t as usize].clone());
            stack.push((i + 1, l2, ring.mul(&coeff, s)));
        }
    }
    let _ = n;
    lhs == rhs
}

/// A central element of an `A`-bimodule: a degree-0 element of level 1 on
/// which the two unit-like actions agree.
pub struct CentralElement {
    pub value: SparseVec,
}

impl CentralElement {
    pub fn zero() -> Self {
        CentralElement { value: vec![] }
    }
}

/// Check the defining square of a central element: for delta in A(2),
/// `lambda(delta; v, v) = rho(v; delta)` followed suitably; concretely the
/// left action of delta on (v, m) equals the right action of delta on m
/// composed with v on the other side, for all m.
pub fn is_central(m: &ModuleStructure, v: &CentralElement) -> Result<bool, SymError> {
    let ring = m.carrier.ring;
    let left = m.left.as_ref().expect("bimodule");
    let right = m.right.as_ref().expect("bimodule");
    let delta = Label::Perm(Perm::identity(2));
    let c1 = m.carrier.complex(1);
    // lambda(delta (x) v (x) v) = rho(v (x) delta) in M(2)
    let mut lhs: SparseVec = Vec::new();
    for (i, s) in &v.value {
        for (j, t) in &v.value {
            let (li, lj) = (&c1.basis(0)[*i as usize], &c1.basis(0)[*j as usize]);
            let val = left(&delta, &[1, 1], &[li.clone(), lj.clone()]);
            lhs = sv_add(&ring, &lhs, &sv_scale(&ring, &ring.mul(s, t), &val));
        }
    }
    let mut rhs: SparseVec = Vec::new();
    for (i, s) in &v.value {
        let li = &c1.basis(0)[*i as usize];
        let val = right(li, &[2], &[delta.clone()]);
        rhs = sv_add(&ring, &rhs, &sv_scale(&ring, s, &val));
    }
    Ok(lhs == rhs)
}

/// Coface maps of the precosimplicial structure determined by a central
/// element: interior cofaces from the right action, outer ones from the
/// left action and the central element.
pub fn coface(
    m: &ModuleStructure,
    v: &CentralElement,
    n: usize,
    i: usize,
) -> Result<ChainMap, SymError> {
    let ring = m.carrier.ring;
    let src = m.carrier.complex(n).clone();
    let tgt = m.carrier.complex(n + 1).clone();
    let left = m.left.as_ref().expect("bimodule").clone();
    let right = m.right.as_ref().expect("bimodule").clone();
    let delta = Label::Perm(Perm::identity(2));
    let one1 = Label::Perm(Perm::identity(1));
    let c1 = m.carrier.complex(1).clone();
    let vval = v.value.clone();
    let mats: Vec<SparseMatrix> = src
        .degrees()
        .map(|d| {
            let mut entries = Vec::new();
            for (col, l) in src.basis(d).iter().enumerate() {
                let img: SparseVec = if i == 0 {
                    // lambda(delta (x) v (x) m)
                    let mut acc: SparseVec = Vec::new();
                    for (iv, s) in &vval {
                        let lv = &c1.basis(0)[*iv as usize];
                        let val = left(&delta, &[1, n], &[lv.clone(), l.clone()]);
                        acc = sv_add(&ring, &acc, &sv_scale(&ring, s, &val));
                    }
                    acc
                } else if i == n + 1 {
                    let mut acc: SparseVec = Vec::new();
                    for (iv, s) in &vval {
                        let lv = &c1.basis(0)[*iv as usize];
                        let val = left(&delta, &[n, 1], &[l.clone(), lv.clone()]);
                        acc = sv_add(&ring, &acc, &sv_scale(&ring, s, &val));
                    }
                    acc
                } else {
                    // rho(m; 1^{i-1} delta 1^{n-i})
                    let mut sizes = vec![1usize; n];
                    sizes[i - 1] = 2;
                    let mut args = vec![one1.clone(); n];
                    args[i - 1] = delta.clone();
                    right(l, &sizes, &args)
                };
                for (r, s) in img {
                    entries.push((r as usize, col, s));
                }
            }
            SparseMatrix::from_entries(tgt.dim(d), src.dim(d), &ring, entries)
        })
        .collect();
    ChainMap::new(src, tgt, 0, mats).map_err(SymError::Chain)
}

/// Cup pairing `phi_{p,q}: M(p) (x) M(q) -> M(p+q)` from the graded
/// multiplication `lambda(delta; -, -)`.
pub fn cup_pairing(
    m: &ModuleStructure,
    p: usize,
    q: usize,
) -> Result<impl Fn(&Label, &Label) -> SparseVec + '_, SymError> {
    let left = m.left.as_ref().expect("bimodule").clone();
    let delta = Label::Perm(Perm::identity(2));
    Ok(move |a: &Label, b: &Label| left(&delta, &[p, q], &[a.clone(), b.clone()]))
}

/// Materialize the operad composition itself through the witnesses; this
/// checks its equivariance as a by-product.
pub fn materialize_comp(
    p: &Arc<OperadStructure>,
) -> Result<(CompProduct, SymSeqMorphism), SymError> {
    let prod = composition_product(&p.seq, &p.seq)?;
    let comp = p.comp.clone();
    let fam = (0 as Deg, move |_m: usize, sizes: &[usize], x: &Label, ys: &[Label]| {
        comp(x, sizes, ys)
    });
    let f = extend_family(&prod, &p.seq, &fam)?;
    Ok((prod, f))
}

fn sparse_to_labels(s: &SymSeq, level: usize, degree: Deg, v: &SparseVec) -> Vec<(Label, Scalar)> {
    let cx = s.complex(level);
    v.iter().map(|(i, c)| (cx.basis(degree)[*i as usize].clone(), c.clone())).collect()
}

/// Evaluate a multilinear expansion: apply `eval` to `(op, chunk sizes,
/// chunk labels)` for each already-expanded choice of labels.
fn expand_action(
    ring: &Ring,
    carrier: &SymSeq,
    eval: &FamilyEval,
    op: &Label,
    chunk_levels: &[usize],
    parts: &[Vec<(Label, Scalar)>],
) -> SparseVec {
    let mut acc: SparseVec = Vec::new();
    let mut stack: Vec<(usize, Vec<Label>, Scalar)> = vec![(0, Vec::new(), ring.one())];
    while let Some((i, labels, coeff)) = stack.pop() {
        if i == parts.len() {
            let v = eval(op, chunk_levels, &labels);
            acc = sv_add(ring, &acc, &sv_scale(ring, &coeff, &v));
            continue;
        }
        for (l, s) in &parts[i] {
            let mut l2 = labels.clone();
            l2.push(l.clone());
            stack.push((i + 1, l2, ring.mul(&coeff, s)));
        }
    }
    let _ = carrier;
    acc
}

/// Left-module axioms at tuple level: unit and associativity with the
/// operad composition.
pub fn verify_left_module(m: &ModuleStructure) -> Vec<AxiomReport> {
    let ring = m.carrier.ring;
    let p = &m.operad;
    let left = m.left.as_ref().expect("left module");
    let max = m.carrier.max_level();
    let mut out = Vec::new();
    // unit
    let mut ok = true;
    let mut witness = None;
    for n in 0..=max {
        if m.carrier.is_zero_level(n) {
            continue;
        }
        let cx = m.carrier.complex(n);
        for d in cx.degrees() {
            for (i, l) in cx.basis(d).iter().enumerate() {
                let v = left(&p.unit, &[n], &[l.clone()]);
                if v != vec![(i as u32, ring.one())] {
                    ok = false;
                    witness = Some(format!("lambda(1; {l}) != {l}"));
                }
            }
        }
    }
    out.push(AxiomReport { name: format!("{}.left.unit", m.name), ok, witness });
    // associativity: lambda(gamma(p; q..); m..) = lambda(p; lambda(q_i; chunk)..)
    let mut ok = true;
    let mut witness = None;
    'outer: for k in 1..=max {
        if p.seq.is_zero_level(k) {
            continue;
        }
        for jvec in levels_tuples(p, k, max) {
            let j: usize = jvec.iter().sum();
            if j > max {
                continue;
            }
            for qs in basis_tuples(p, &jvec) {
                for mvec in module_levels_tuples(m, j, max) {
                    let n: usize = mvec.iter().sum();
                    if n > max || m.carrier.is_zero_level(n) {
                        continue;
                    }
                    for ms in module_basis_tuples(m, &mvec) {
                        let tot: Deg = qs.iter().chain(ms.iter()).map(|l| l.degree()).sum();
                        if tot > m.carrier.trunc.max_degree {
                            continue;
                        }
                        for pl in all_level_labels(p, k) {
                            // lhs
                            let pq = (p.comp)(&pl, &jvec, &qs);
                            let dq: Deg =
                                pl.degree() + qs.iter().map(|l| l.degree()).sum::<Deg>();
                            let mut lhs: SparseVec = Vec::new();
                            for (t, s) in &pq {
                                let l = &p.seq.complex(j).basis(dq)[*t as usize];
                                let v = left(l, &mvec, &ms);
                                lhs = sv_add(&ring, &lhs, &sv_scale(&ring, s, &v));
                            }
                            // rhs: chunk the m's under the q's, with the
                            // interchange sign for moving q_i past chunks
                            let mut off = 0usize;
                            let mut parts: Vec<Vec<(Label, Scalar)>> = Vec::new();
                            let mut chunk_levels = Vec::new();
                            let mut passed: Deg = 0;
                            for (qi, &ji) in jvec.iter().enumerate() {
                                let chunk_mvec = &mvec[off..off + ji];
                                let chunk_ms = &ms[off..off + ji];
                                let lvl: usize = chunk_mvec.iter().sum();
                                let mut v = left(&qs[qi], chunk_mvec, chunk_ms);
                                if crate::perm::cross_sign(qs[qi].degree(), passed) < 0 {
                                    v = sv_scale(&ring, &ring.neg(&ring.one()), &v);
                                }
                                passed +=
                                    chunk_ms.iter().map(|l| l.degree()).sum::<Deg>();
                                let dd: Deg = qs[qi].degree()
                                    + chunk_ms.iter().map(|l| l.degree()).sum::<Deg>();
                                parts.push(sparse_to_labels(&m.carrier, lvl, dd, &v));
                                chunk_levels.push(lvl);
                                off += ji;
                            }
                            let rhs =
                                expand_action(&ring, &m.carrier, left, &pl, &chunk_levels, &parts);
                            if lhs != rhs {
                                ok = false;
                                witness = Some(format!(
                                    "p={pl}, q-levels {jvec:?}, m-levels {mvec:?}"
                                ));
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
    }
    out.push(AxiomReport { name: format!("{}.left.assoc", m.name), ok, witness });
    out
}

/// Right-module axioms at tuple level.
pub fn verify_right_module(m: &ModuleStructure) -> Vec<AxiomReport> {
    let ring = m.carrier.ring;
    let p = &m.operad;
    let right = m.right.as_ref().expect("right module");
    let max = m.carrier.max_level();
    let mut out = Vec::new();
    let mut ok = true;
    let mut witness = None;
    for n in 0..=max {
        if m.carrier.is_zero_level(n) {
            continue;
        }
        let cx = m.carrier.complex(n);
        for d in cx.degrees() {
            for (i, l) in cx.basis(d).iter().enumerate() {
                if n == 0 {
                    continue; // no arguments to feed
                }
                let units = vec![p.unit.clone(); n];
                let v = right(l, &vec![1; n], &units);
                if v != vec![(i as u32, ring.one())] {
                    ok = false;
                    witness = Some(format!("rho({l}; 1..1) != {l}"));
                }
            }
        }
    }
    out.push(AxiomReport { name: format!("{}.right.unit", m.name), ok, witness });
    // associativity: rho(rho(m; p..); q..) = rho(m; gamma(p_i; chunk)..)
    let mut ok = true;
    let mut witness = None;
    'outer: for k in 1..=max {
        if m.carrier.is_zero_level(k) {
            continue;
        }
        for jvec in levels_tuples(p, k, max) {
            let j: usize = jvec.iter().sum();
            if j > max {
                continue;
            }
            for ps in basis_tuples(p, &jvec) {
                for rvec in levels_tuples(p, j, max) {
                    let n: usize = rvec.iter().sum();
                    if n > max {
                        continue;
                    }
                    for rs in basis_tuples(p, &rvec) {
                        for ml in module_level_labels(m, k) {
                            let tot: Deg = ml.degree()
                                + ps.iter().chain(rs.iter()).map(|l| l.degree()).sum::<Deg>();
                            if tot > m.carrier.trunc.max_degree {
                                continue;
                            }
                            // lhs: rho(rho(m; p..); q..)
                            let mp = right(&ml, &jvec, &ps);
                            let dq: Deg =
                                ml.degree() + ps.iter().map(|l| l.degree()).sum::<Deg>();
                            let mut lhs: SparseVec = Vec::new();
                            for (t, s) in &mp {
                                let l = &m.carrier.complex(j).basis(dq)[*t as usize];
                                let v = right(l, &rvec, &rs);
                                lhs = sv_add(&ring, &lhs, &sv_scale(&ring, s, &v));
                            }
                            // rhs: rho(m; gamma(p_i; chunk_i)..) with the
                            // interchange sign
                            let mut off = 0usize;
                            let mut parts = Vec::new();
                            let mut chunk_levels = Vec::new();
                            let mut passed: Deg = 0;
                            for (pi, &ji) in jvec.iter().enumerate() {
                                let chunk_rvec = &rvec[off..off + ji];
                                let chunk_rs = &rs[off..off + ji];
                                let lvl: usize = chunk_rvec.iter().sum();
                                let mut v = (p.comp)(&ps[pi], chunk_rvec, chunk_rs);
                                if crate::perm::cross_sign(ps[pi].degree(), passed) < 0 {
                                    v = sv_scale(&ring, &ring.neg(&ring.one()), &v);
                                }
                                passed +=
                                    chunk_rs.iter().map(|l| l.degree()).sum::<Deg>();
                                let dd: Deg = ps[pi].degree()
                                    + chunk_rs.iter().map(|l| l.degree()).sum::<Deg>();
                                parts.push(sparse_to_labels(&p.seq, lvl, dd, &v));
                                chunk_levels.push(lvl);
                                off += ji;
                            }
                            let rhs = expand_action(
                                &ring,
                                &m.carrier,
                                right,
                                &ml,
                                &chunk_levels,
                                &parts,
                            );
                            if lhs != rhs {
                                ok = false;
                                witness = Some(format!(
                                    "m={ml}, p-levels {jvec:?}, q-levels {rvec:?}"
                                ));
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
    }
    out.push(AxiomReport { name: format!("{}.right.assoc", m.name), ok, witness });
    out
}

/// Bimodule compatibility: acting on the left then the right agrees with
/// the right-then-left composite.
pub fn verify_bimodule_compat(m: &ModuleStructure) -> AxiomReport {
    let ring = m.carrier.ring;
    let p = &m.operad;
    let left = m.left.as_ref().expect("bimodule");
    let right = m.right.as_ref().expect("bimodule");
    let max = m.carrier.max_level();
    let mut ok = true;
    let mut witness = None;
    'outer: for k in 1..=max {
        if p.seq.is_zero_level(k) {
            continue;
        }
        for jvec in module_levels_tuples(m, k, max) {
            let j: usize = jvec.iter().sum();
            if j > max {
                continue;
            }
            for ms in module_basis_tuples(m, &jvec) {
                for rvec in levels_tuples(p, j, max) {
                    let n: usize = rvec.iter().sum();
                    if n > max || m.carrier.is_zero_level(n) {
                        continue;
                    }
                    for rs in basis_tuples(p, &rvec) {
                        let mtot: Deg =
                            ms.iter().chain(rs.iter()).map(|l| l.degree()).sum();
                        if mtot > m.carrier.trunc.max_degree {
                            continue;
                        }
                        for pl in all_level_labels(p, k) {
                            // left then right
                            let lm = left(&pl, &jvec, &ms);
                            let dl: Deg =
                                pl.degree() + ms.iter().map(|l| l.degree()).sum::<Deg>();
                            let mut lhs: SparseVec = Vec::new();
                            for (t, s) in &lm {
                                let l = &m.carrier.complex(j).basis(dl)[*t as usize];
                                let v = right(l, &rvec, &rs);
                                lhs = sv_add(&ring, &lhs, &sv_scale(&ring, s, &v));
                            }
                            // right on each factor, then left; moving m_i
                            // past the earlier argument chunks costs a sign
                            let mut off = 0usize;
                            let mut parts = Vec::new();
                            let mut chunk_levels = Vec::new();
                            let mut passed: Deg = 0;
                            for (mi, &ji) in jvec.iter().enumerate() {
                                let chunk_rvec = &rvec[off..off + ji];
                                let chunk_rs = &rs[off..off + ji];
                                let lvl: usize = chunk_rvec.iter().sum();
                                let mut v = right(&ms[mi], chunk_rvec, chunk_rs);
                                if crate::perm::cross_sign(ms[mi].degree(), passed) < 0 {
                                    v = sv_scale(&ring, &ring.neg(&ring.one()), &v);
                                }
                                passed +=
                                    chunk_rs.iter().map(|l| l.degree()).sum::<Deg>();
                                let dd: Deg = ms[mi].degree()
                                    + chunk_rs.iter().map(|l| l.degree()).sum::<Deg>();
                                parts.push(sparse_to_labels(&m.carrier, lvl, dd, &v));
                                chunk_levels.push(lvl);
                                off += ji;
                            }
                            let rhs =
                                expand_action(&ring, &m.carrier, left, &pl, &chunk_levels, &parts);
                            if lhs != rhs {
                                ok = false;
                                witness = Some(format!(
                                    "p={pl}, m-levels {jvec:?}, a-levels {rvec:?}"
                                ));
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
    }
    AxiomReport { name: format!("{}.bimodule.compat", m.name), ok, witness }
}

fn module_level_labels(m: &ModuleStructure, k: usize) -> Vec<Label> {
    if m.carrier.is_zero_level(k) {
        return vec![];
    }
    let cx = m.carrier.complex(k);
    cx.degrees().flat_map(|d| cx.basis(d).iter().cloned()).collect()
}

fn module_levels_tuples(m: &ModuleStructure, k: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let min_lvl = if m.carrier.is_zero_level(0) { 1 } else { 0 };
    for _ in 0..k {
        let mut next = Vec::new();
        for t in &out {
            for lvl in min_lvl..=max {
                if m.carrier.is_zero_level(lvl) {
                    continue;
                }
                let sum: usize = t.iter().sum();
                if sum + lvl <= max {
                    let mut t2 = t.clone();
                    t2.push(lvl);
                    next.push(t2);
                }
            }
        }
        out = next;
    }
    out
}

fn module_basis_tuples(m: &ModuleStructure, levels: &[usize]) -> Vec<Vec<Label>> {
    let mut out = vec![vec![]];
    for &lvl in levels {
        let labels = module_level_labels(m, lvl);
        let mut next = Vec::new();
        for t in &out {
            for l in &labels {
                let mut t2 = t.clone();
                t2.push(l.clone());
                next.push(t2);
            }
        }
        out = next;
    }
    out
}
