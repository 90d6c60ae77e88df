//! Symmetric sequences: families of chain complexes with signed symmetric
//! group actions, truncated by level and degree.

mod coinv;
mod products;
mod extend;

pub use coinv::{coinvariants, induced_on_quotient, OrbitPresentation};
pub use extend::{extend_family, restrict_family, EquivFamily};
pub use products::{
    composition_product, composition_product_windowed, graded_tensor, intertwiner, level_tensor,
    CompProduct, CompTerm, PowBasis, PowTerm,
};

use crate::chain::{ChainComplex, ChainError, ChainMap};
use crate::label::Label;

use crate::perm::{Deg, Perm};
use crate::scalar::{Ring, Scalar};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Trunc {
    pub max_level: usize,
    pub max_degree: Deg,
}

impl Trunc {
    pub fn new(max_level: usize, max_degree: Deg) -> Self {
        Trunc { max_level, max_degree }
    }
}

#[derive(thiserror::Error, Debug)]
pub enum SymError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("level {0} outside truncation (max {1})")]
    Level(usize, usize),
    #[error("truncation cannot determine level {level}: {reason}")]
    Truncation { level: usize, reason: String },
    #[error("action generator {gen} at level {level} violates {relation}")]
    BadAction { level: usize, gen: usize, relation: String },
    #[error("action is not by signed permutations of the basis (level {0}, degree {1})")]
    NotMonomial(usize, Deg),
    #[error("equivariance fails at level {level}, parts {nvec:?}, generator {gen}")]
    NotEquivariant { level: usize, nvec: Vec<usize>, gen: String },
    #[error("coinvariant torsion over the integers: {0}")]
    Torsion(String),
    #[error("{0}")]
    Other(String),
}

/// Signed action of `Sigma_n` on one chain complex: images of the adjacent
/// transpositions `s_0, .., s_{n-2}`.
#[derive(Clone, Debug)]
pub struct SignedAction {
    pub gens: Vec<ChainMap>,
}

/// One permutation step on a basis element: target index and coefficient.
pub type Monomial = (u32, Scalar);

impl SignedAction {
    pub fn trivial(_c: &Arc<ChainComplex>, n: usize) -> Self {
        if n < 2 {
            return SignedAction { gens: vec![] };
        }
        SignedAction { gens: vec![ChainMap::identity(_c); n - 1] }
    }

    pub fn level(&self) -> usize {
        self.gens.len() + 1
    }

    /// Monomial view of generator `i` in `degree`: for each source basis
    /// index, the image index and coefficient. Errors unless every column
    /// has exactly one entry.
    pub fn monomial(&self, i: usize, degree: Deg) -> Result<Vec<Monomial>, SymError> {
        let m = self.gens[i].mat(degree);
        let mut out = Vec::with_capacity(m.cols);
        for col in &m.columns {
            if col.len() != 1 {
                return Err(SymError::NotMonomial(self.level(), degree));
            }
            out.push((col[0].0, col[0].1.clone()));
        }
        Ok(out)
    }

    /// Apply an arbitrary permutation to a basis element on the right,
    /// assuming a monomial action.
    pub fn apply_perm(
        &self,
        ring: &Ring,
        degree: Deg,
        idx: u32,
        p: &Perm,
    ) -> Result<Monomial, SymError> {
        debug_assert_eq!(p.len().max(1), self.level().max(1));
        let mut cur = (idx, ring.one());
        for g in p.adjacent_word() {
            let mono = self.monomial(g, degree)?;
            let (next, s) = &mono[cur.0 as usize];
            cur = (*next, ring.mul(&cur.1, s));
        }
        Ok(cur)
    }

    /// Check the Coxeter relations and compatibility with the differential.
    pub fn validate(&self, c: &Arc<ChainComplex>) -> Result<(), SymError> {
        let n = self.level();
        let ring = c.ring;
        for (i, g) in self.gens.iter().enumerate() {
            g.validate().map_err(|_| SymError::BadAction {
                level: n,
                gen: i,
                relation: "chain map".into(),
            })?;
            let sq = g.compose(g).map_err(SymError::Chain)?;
            if !sq.equals(&ChainMap::identity(c)) {
                return Err(SymError::BadAction { level: n, gen: i, relation: "s_i^2 = 1".into() });
            }
        }
        for i in 0..self.gens.len() {
            for j in 0..self.gens.len() {
                let (gi, gj) = (&self.gens[i], &self.gens[j]);
                if i.abs_diff(j) >= 2 {
                    let ab = gi.compose(gj).map_err(SymError::Chain)?;
                    let ba = gj.compose(gi).map_err(SymError::Chain)?;
                    if !ab.equals(&ba) {
                        return Err(SymError::BadAction {
                            level: n,
                            gen: i,
                            relation: format!("s_{i} s_{j} = s_{j} s_{i}"),
                        });
                    }
                } else if j == i + 1 {
                    // braid: s_i s_j s_i = s_j s_i s_j
                    let lhs = gi.compose(&gj.compose(gi).map_err(SymError::Chain)?).unwrap();
                    let rhs = gj.compose(&gi.compose(gj).map_err(SymError::Chain)?).unwrap();
                    if !lhs.equals(&rhs) {
                        return Err(SymError::BadAction {
                            level: n,
                            gen: i,
                            relation: "braid".into(),
                        });
                    }
                }
            }
        }
        let _ = ring;
        Ok(())
    }
}

// escape hatch for debugging convention mismatches
fn skip_action_validation() -> bool {
    std::env::var("CORING_SKIP_ACTION_VALIDATION").is_ok()
}

#[derive(Clone, Debug)]
pub struct LevelData {
    pub complex: Arc<ChainComplex>,
    pub action: SignedAction,
}

/// A truncated symmetric sequence. `levels[n]` is the data of level `n`;
/// `complete` records that all levels above the truncation vanish (needed
/// to compose on the right with sequences supported in level zero).
#[derive(Clone, Debug)]
pub struct SymmetricSequence {
    pub ring: Ring,
    pub trunc: Trunc,
    pub levels: Vec<LevelData>,
    pub complete: bool,
}

pub type SymSeq = Arc<SymmetricSequence>;

impl SymmetricSequence {
    pub fn new(
        ring: Ring,
        trunc: Trunc,
        levels: Vec<LevelData>,
        complete: bool,
    ) -> Result<SymSeq, SymError> {
        assert_eq!(levels.len(), trunc.max_level + 1);
        let s = SymmetricSequence { ring, trunc, levels, complete };
        for (n, l) in s.levels.iter().enumerate() {
            if l.action.gens.len() + 1 != n.max(1) {
                return Err(SymError::Other(format!(
                    "level {n} needs {} action generators",
                    n.saturating_sub(1)
                )));
            }
            if skip_action_validation() {
                continue;
            }
            l.action.validate(&l.complex)?;
        }
        Ok(Arc::new(s))
    }

    pub fn level(&self, n: usize) -> &LevelData {
        &self.levels[n]
    }

    pub fn complex(&self, n: usize) -> &Arc<ChainComplex> {
        &self.levels[n].complex
    }

    pub fn max_level(&self) -> usize {
        self.trunc.max_level
    }

    pub fn is_zero_level(&self, n: usize) -> bool {
        n > self.max_level() || self.levels[n].complex.total_dim() == 0
    }

    /// Build from per-level complexes and actions; missing levels are zero.
    pub fn from_levels(
        ring: Ring,
        trunc: Trunc,
        given: Vec<(usize, Arc<ChainComplex>, SignedAction)>,
        complete: bool,
    ) -> Result<SymSeq, SymError> {
        let mut levels: Vec<LevelData> = (0..=trunc.max_level)
            .map(|n| {
                let z = ChainComplex::zero(ring);
                LevelData { action: SignedAction::trivial(&z, n), complex: z }
            })
            .collect();
        for (n, c, a) in given {
            if n > trunc.max_level {
                return Err(SymError::Level(n, trunc.max_level));
            }
            levels[n] = LevelData { complex: c, action: a };
        }
        SymmetricSequence::new(ring, trunc, levels, complete)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitKind {
    /// `C(n) = R` in degree 0 for all `n`, trivial actions.
    Constant,
    /// `U(0) = R`, zero elsewhere: unit for the graded tensor.
    GradedUnit,
    /// `J(1) = R`, zero elsewhere: unit for the composition product.
    CompositionUnit,
}

/// The unit sequences for the three monoidal products.
pub fn unit_sequence(kind: UnitKind, ring: Ring, trunc: Trunc) -> SymSeq {
    let gen = |name: &str| ChainComplex::generator(ring, Label::gen(name, 0), 0);
    let levels = match kind {
        UnitKind::Constant => (0..=trunc.max_level)
            .map(|n| (n, gen("c"), ()))
            .collect::<Vec<_>>(),
        UnitKind::GradedUnit => vec![(0, gen("u"), ())],
        UnitKind::CompositionUnit => vec![(1, gen("u0"), ())],
    };
    let mut given = Vec::new();
    for (n, c, _) in levels {
        let a = SignedAction::trivial(&c, n);
        given.push((n, c, a));
    }
    SymmetricSequence::from_levels(ring, trunc, given, !matches!(kind, UnitKind::Constant))
        .expect("unit sequences are valid")
}

/// A morphism of symmetric sequences: level-wise equivariant chain maps of
/// a common degree shift.
#[derive(Clone, Debug)]
pub struct SymSeqMorphism {
    pub source: SymSeq,
    pub target: SymSeq,
    pub shift: Deg,
    pub maps: Vec<ChainMap>,
}

impl SymSeqMorphism {
    pub fn new(
        source: SymSeq,
        target: SymSeq,
        shift: Deg,
        maps: Vec<ChainMap>,
    ) -> Result<Self, SymError> {
        let f = SymSeqMorphism { source, target, shift, maps };
        f.validate()?;
        Ok(f)
    }

    pub fn identity(s: &SymSeq) -> Self {
        let maps = s.levels.iter().map(|l| ChainMap::identity(&l.complex)).collect();
        SymSeqMorphism { source: s.clone(), target: s.clone(), shift: 0, maps }
    }

    pub fn zero(source: &SymSeq, target: &SymSeq, shift: Deg) -> Self {
        let maps = source
            .levels
            .iter()
            .enumerate()
            .map(|(n, l)| ChainMap::zero(l.complex.clone(), target.complex(n).clone(), shift))
            .collect();
        SymSeqMorphism { source: source.clone(), target: target.clone(), shift, maps }
    }

    pub fn map(&self, n: usize) -> &ChainMap {
        &self.maps[n]
    }

    pub fn validate(&self) -> Result<(), SymError> {
        for (n, f) in self.maps.iter().enumerate() {
            f.validate()?;
            // equivariance against each generator
            let src_a = &self.source.level(n).action;
            let tgt_a = &self.target.level(n).action;
            for (i, g_src) in src_a.gens.iter().enumerate() {
                let lhs = f.compose(g_src).map_err(SymError::Chain)?;
                let rhs = tgt_a.gens[i].compose(f).map_err(SymError::Chain)?;
                if !lhs.equals(&rhs) {
                    return Err(SymError::NotEquivariant {
                        level: n,
                        nvec: vec![],
                        gen: format!("s_{i}"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn compose(&self, other: &SymSeqMorphism) -> Result<SymSeqMorphism, SymError> {
        let maps: Result<Vec<ChainMap>, ChainError> = self
            .maps
            .iter()
            .zip(&other.maps)
            .map(|(f, g)| f.compose(g))
            .collect();
        Ok(SymSeqMorphism {
            source: other.source.clone(),
            target: self.target.clone(),
            shift: self.shift + other.shift,
            maps: maps?,
        })
    }

    pub fn equals(&self, other: &SymSeqMorphism) -> bool {
        self.shift == other.shift
            && self.maps.iter().zip(&other.maps).all(|(f, g)| f.equals(g))
    }

    pub fn is_zero(&self) -> bool {
        self.maps.iter().all(|m| m.is_zero())
    }
}

/// Build the sequence with a single nonzero level carrying a free rank-one
/// complex; used in tests and for the sign-representation spheres.
pub fn single_level(
    ring: Ring,
    trunc: Trunc,
    n: usize,
    c: Arc<ChainComplex>,
    action: SignedAction,
) -> Result<SymSeq, SymError> {
    SymmetricSequence::from_levels(ring, trunc, vec![(n, c, action)], true)
}

/// Helper: the sign character as a `SignedAction` on a rank-one complex.
pub fn sign_action(ring: &Ring, c: &Arc<ChainComplex>, n: usize) -> SignedAction {
    if n < 2 {
        return SignedAction::trivial(c, n);
    }
    let minus = ChainMap::from_fn(c.clone(), c.clone(), 0, |_, l| {
        vec![(l.clone(), ring.neg(&ring.one()))]
    })
    .expect("sign map");
    SignedAction { gens: vec![minus; n - 1] }
}

/// Scalars of a sparse element rendered for error reports.
pub fn show_element(c: &Arc<ChainComplex>, degree: Deg, v: &crate::matrix::SparseVec) -> String {
    if v.is_empty() {
        return "0".into();
    }
    v.iter()
        .map(|(i, s)| {
            let l = &c.basis(degree)[*i as usize];
            if c.ring.is_one(s) {
                format!("{l}")
            } else {
                format!("{s}*{l}")
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

