//! Permutations, compositions of integers, coset representatives and the
//! Koszul sign routine.
//!
//! Conventions used throughout the crate:
//!   - a permutation is a bijection `p` of `0..n`, stored by images;
//!   - composition `p * q` is the function `i -> p(q(i))`;
//!   - the right action of `s` on a tensor word `w` places factor `w[s(t)]`
//!     at position `t`, so `(w . s) . t = w . (s * t)`.

use serde::{Deserialize, Serialize};
use std::fmt;

pub type Deg = i32;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perm(pub Vec<u8>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i as u8 == v)
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    /// `(self * other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.len(), other.len());
        Perm(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut v = vec![0u8; self.len()];
        for (i, &j) in self.0.iter().enumerate() {
            v[j as usize] = i as u8;
        }
        Perm(v)
    }

    /// Adjacent transposition `s_i = (i, i+1)` in `Sigma_n` (0-based).
    pub fn adjacent(n: usize, i: usize) -> Perm {
        let mut v: Vec<u8> = (0..n as u8).collect();
        v.swap(i, i + 1);
        Perm(v)
    }

    pub fn sign(&self) -> i64 {
        let mut seen = vec![false; self.len()];
        let mut sign = 1i64;
        for i in 0..self.len() {
            if seen[i] {
                continue;
            }
            let mut j = i;
            let mut len = 0;
            while !seen[j] {
                seen[j] = true;
                j = self.0[j] as usize;
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }

    /// Word of adjacent transpositions whose composition equals `self`
    /// (used to check equivariance against action generators).
    pub fn adjacent_word(&self) -> Vec<usize> {
        let mut v = self.0.clone();
        let mut word = Vec::new();
        // bubble sort; s_{i} swaps positions i, i+1
        loop {
            let mut done = true;
            for i in 0..v.len().saturating_sub(1) {
                if v[i] > v[i + 1] {
                    v.swap(i, i + 1);
                    word.push(i);
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        // the word built sorts self into identity: self * s_{i1} * ... = id,
        // hence self = (s_{ik} * ... * s_{i1})^{-1} reversed; adjacent
        // transpositions are involutions so reversing the list suffices.
        word.reverse();
        word
    }

}

/// Block-diagonal permutation: `taus[j]` acting within the `j`-th block of
/// the composition `sizes`.
pub fn block_diag(taus: &[Perm], sizes: &[usize]) -> Perm {
    let n: usize = sizes.iter().sum();
    let mut v = Vec::with_capacity(n);
    let mut off = 0usize;
    for (j, &s) in sizes.iter().enumerate() {
        debug_assert_eq!(taus[j].len(), s);
        for k in 0..s {
            v.push((off + taus[j].apply(k)) as u8);
        }
        off += s;
    }
    Perm(v)
}

/// Block permutation `sigma_{sizes}` moving block `j` (of the composition
/// `sizes`, blocks laid out consecutively) onto slot `sigma(j)` of the
/// rearranged composition. Conjugation carries block-diagonal subgroups to
/// block-diagonal subgroups:
/// `sigma_{sizes} o diag(taus) o sigma_{sizes}^{-1} = diag(taus o sigma^{-1}-pattern)`.
pub fn block_perm(sigma: &Perm, sizes: &[usize]) -> Perm {
    let m = sizes.len();
    debug_assert_eq!(sigma.len(), m);
    let inv = sigma.inverse();
    // raw: slot t of the output is block inv(t); as a position map this is
    // the permutation r with r(offset'_t + k) = offset_{inv(t)} + k, and the
    // conjugation-friendly block permutation is its inverse.
    let n: usize = sizes.iter().sum();
    let mut offset = vec![0usize; m];
    let mut acc = 0;
    for j in 0..m {
        offset[j] = acc;
        acc += sizes[j];
    }
    let mut r = Vec::with_capacity(n);
    for t in 0..m {
        let b = inv.apply(t);
        for k in 0..sizes[b] {
            r.push((offset[b] + k) as u8);
        }
    }
    Perm(r).inverse()
}

/// Composite permutation of the associative operad: an outer `sigma` in
/// `Sigma_m` with inner `taus[j]` in `Sigma_{sizes[j]}`:
/// `gamma(sigma; taus) = sigma_{sizes} o diag(taus)`.
///
/// The inner factors act block-diagonally on the source blocks, then the
/// block permutation rearranges the blocks; with this order the composite
/// is right-equivariant in the inner arguments:
/// `gamma(sigma; taus . h) = gamma(sigma; taus) o diag(h)`.
pub fn gamma_compose(sigma: &Perm, taus: &[Perm], sizes: &[usize]) -> Perm {
    block_perm(sigma, sizes).compose(&block_diag(taus, sizes))
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{:?}", self.0)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "e");
        }
        let chars: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "[{}]", chars.join(""))
    }
}

pub fn all_perms(n: usize) -> Vec<Perm> {
    let mut out = vec![Perm(vec![])];
    for k in 0..n {
        let mut next = Vec::with_capacity(out.len() * (k + 1));
        for p in &out {
            for pos in 0..=k {
                let mut v = p.0.clone();
                v.insert(pos, k as u8);
                next.push(Perm(v));
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Compositions of `n` into exactly `m` parts, each `>= min_part`.
pub fn compositions(n: usize, m: usize, min_part: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m);
    fn rec(n: usize, m: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if m == 0 {
            if n == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if n < min * m {
            return;
        }
        let hi = n - min * (m - 1);
        for part in min..=hi {
            cur.push(part);
            rec(n - part, m - 1, min, cur, out);
            cur.pop();
        }
    }
    rec(n, m, min_part, &mut cur, &mut out);
    out
}

/// All compositions of `n` into any number of positive parts.
pub fn all_positive_compositions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for m in 1..=n {
        out.extend(compositions(n, m, 1));
    }
    out
}

/// Canonical representatives of the right cosets `(Sigma_{sizes}) \ Sigma_n`
/// for the block subgroup of a composition: one permutation per ordered
/// set-partition `(P_1, .., P_m)` of `0..n` with `|P_j| = sizes[j]`.
///
/// The representative maps `t in P_j` to `offset_j + rank(t in P_j)`; in the
/// expanded-word picture the factors of chunk `j` land at the positions
/// `P_j` with their internal order preserved (a shuffle).
pub fn coset_reps(sizes: &[usize]) -> Vec<Perm> {
    let n: usize = sizes.iter().sum();
    let mut out = Vec::new();
    let mut chosen: Vec<Vec<usize>> = Vec::new();
    fn rec(
        sizes: &[usize],
        avail: u32,
        n: usize,
        chosen: &mut Vec<Vec<usize>>,
        out: &mut Vec<Perm>,
    ) {
        if chosen.len() == sizes.len() {
            out.push(rep_for_partition(chosen, n));
            return;
        }
        let k = sizes[chosen.len()];
        let elems: Vec<usize> = (0..n).filter(|i| avail & (1 << i) != 0).collect();
        for combo in combinations(&elems, k) {
            let mut next = avail;
            for &e in &combo {
                next &= !(1 << e);
            }
            chosen.push(combo);
            rec(sizes, next, n, chosen, out);
            chosen.pop();
        }
    }
    debug_assert!(n <= 31);
    rec(sizes, (1u32 << n).wrapping_sub(1), n, &mut chosen, &mut out);
    out
}

fn rep_for_partition(blocks: &[Vec<usize>], n: usize) -> Perm {
    let mut v = vec![0u8; n];
    let mut offset = 0;
    for block in blocks {
        for (rank, &t) in block.iter().enumerate() {
            v[t] = (offset + rank) as u8;
        }
        offset += block.len();
    }
    Perm(v)
}

fn combinations(elems: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &e) in elems.iter().enumerate() {
        if elems.len() - i < k {
            break;
        }
        for mut rest in combinations(&elems[i + 1..], k - 1) {
            rest.insert(0, e);
            out.push(rest);
        }
    }
    out
}

/// Split `g = h_full o rho` with `h_full` in the block subgroup of `sizes`
/// and `rho` the canonical coset representative of `(Sigma_{sizes}) g`.
/// Returns the per-block components of `h_full` together with `rho`.
///
/// This is the reduction used in `Y[sizes] tensor_{Sigma_sizes} R[Sigma_n]`:
/// `y (x) g  =  (y . h) (x) rho`.
pub fn coset_split(g: &Perm, sizes: &[usize]) -> (Vec<Perm>, Perm) {
    let n = g.len();
    let mut offset = 0usize;
    let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(sizes.len());
    let mut h_blocks = Vec::with_capacity(sizes.len());
    for &s in sizes {
        // P_j = g^{-1}(block_j), sorted
        let mut pre: Vec<usize> = (0..n)
            .filter(|&t| {
                let img = g.apply(t);
                img >= offset && img < offset + s
            })
            .collect();
        pre.sort_unstable();
        // h_j(k) = g(k-th smallest of P_j) - offset
        let h: Vec<u8> = pre.iter().map(|&t| (g.apply(t) - offset) as u8).collect();
        h_blocks.push(Perm(h));
        blocks.push(pre);
        offset += s;
    }
    let rho = rep_for_partition(&blocks, n);
    (h_blocks, rho)
}

/// Koszul sign of the permutation rearranging homogeneous factors with the
/// given degrees: factor at source position `s(t)` moves to position `t`.
/// The sign is the product of `(-1)^{d_i d_j}` over all inverted pairs.
pub fn koszul_sign(degrees: &[Deg], s: &Perm) -> i64 {
    debug_assert_eq!(degrees.len(), s.len());
    let mut sign = 1i64;
    for t1 in 0..s.len() {
        for t2 in (t1 + 1)..s.len() {
            let (i, j) = (s.apply(t1), s.apply(t2));
            if i > j && degrees[i] % 2 != 0 && degrees[j] % 2 != 0 {
                sign = -sign;
            }
        }
    }
    sign
}

/// Sign for moving a degree `d` operator past factors of total degree `t`.
pub fn cross_sign(d: Deg, t: Deg) -> i64 {
    if d % 2 != 0 && t % 2 != 0 {
        -1
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_convention() {
        // right action on words: (w.s)(t) = w(s(t))
        let w = ['a', 'b', 'c'];
        let s = Perm(vec![2, 0, 1]);
        let applied: Vec<char> = (0..3).map(|t| w[s.apply(t)]).collect();
        assert_eq!(applied, ['c', 'a', 'b']);
        let t = Perm(vec![1, 0, 2]);
        let st = s.compose(&t);
        let one_step: Vec<char> = (0..3).map(|i| w[st.apply(i)]).collect();
        let two_step: Vec<char> = (0..3).map(|i| applied[t.apply(i)]).collect();
        assert_eq!(one_step, two_step);
    }

    #[test]
    fn sign_and_inverse() {
        for p in all_perms(4) {
            assert_eq!(p.sign(), p.inverse().sign());
            assert!(p.compose(&p.inverse()).is_identity());
            // adjacent word reconstructs the permutation
            let mut q = Perm::identity(4);
            for i in p.adjacent_word() {
                q = q.compose(&Perm::adjacent(4, i));
            }
            assert_eq!(q, p);
        }
    }

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(5, 2, 1).len(), 4);
        assert_eq!(all_positive_compositions(6).len(), 32);
        assert_eq!(compositions(4, 2, 2), vec![vec![2, 2]]);
    }

    #[test]
    fn coset_rep_counts_and_split() {
        // (1,1) in Sigma_2: two cosets
        assert_eq!(coset_reps(&[1, 1]).len(), 2);
        // (2,1) in Sigma_3: 3 cosets
        assert_eq!(coset_reps(&[2, 1]).len(), 3);
        let reps = coset_reps(&[2, 2]);
        assert_eq!(reps.len(), 6);
        for g in all_perms(4) {
            let (h, rho) = coset_split(&g, &[2, 2]);
            // reassemble h_full o rho = g
            let mut hb = vec![0u8; 4];
            for k in 0..2 {
                hb[k] = h[0].0[k];
                hb[2 + k] = 2 + h[1].0[k];
            }
            let h_full = Perm(hb);
            assert_eq!(h_full.compose(&rho), g, "split failed for {g:?}");
            assert!(reps.contains(&rho));
            // splitting a representative is trivial
            let (h2, rho2) = coset_split(&rho, &[2, 2]);
            assert_eq!(rho2, rho);
            assert!(h2.iter().all(|p| p.is_identity()));
        }
    }

    #[test]
    fn block_perm_conjugates_block_diagonals() {
        assert!(block_perm(&Perm::identity(2), &[2, 3]).is_identity());
        // B o diag(taus) o B^{-1} = diag(taus o sigma^{-1}-pattern)
        for sizes in [vec![1usize, 2], vec![2, 1], vec![2, 2], vec![1, 1, 2]] {
            let m = sizes.len();
            for sigma in all_perms(m) {
                let b = block_perm(&sigma, &sizes);
                let taus: Vec<Perm> = sizes
                    .iter()
                    .map(|&s| {
                        // a fixed nontrivial choice per size
                        if s >= 2 {
                            Perm::adjacent(s, 0)
                        } else {
                            Perm::identity(s)
                        }
                    })
                    .collect();
                let lhs = b.compose(&block_diag(&taus, &sizes)).compose(&b.inverse());
                let inv = sigma.inverse();
                let new_sizes: Vec<usize> = (0..m).map(|t| sizes[inv.apply(t)]).collect();
                let new_taus: Vec<Perm> = (0..m).map(|t| taus[inv.apply(t)].clone()).collect();
                let rhs = block_diag(&new_taus, &new_sizes);
                assert_eq!(lhs, rhs, "sigma {sigma:?}, sizes {sizes:?}");
            }
        }
    }

    #[test]
    fn gamma_compose_operad_laws() {
        // units
        for m in 1..=3usize {
            for s in all_perms(m) {
                let ids: Vec<Perm> = vec![Perm::identity(1); m];
                assert_eq!(gamma_compose(&s, &ids, &vec![1; m]), s);
                assert_eq!(gamma_compose(&Perm::identity(1), &[s.clone()], &[m]), s);
            }
        }
        // associativity on a generating family of instances
        for s in all_perms(2) {
            for t2 in all_perms(2) {
                for r1 in all_perms(2) {
                    let t1 = Perm::identity(1);
                    let r2 = Perm::identity(1);
                    let r3 = Perm::identity(1);
                    let st = gamma_compose(&s, &[t1.clone(), t2.clone()], &[1, 2]);
                    let lhs =
                        gamma_compose(&st, &[r1.clone(), r2.clone(), r3.clone()], &[2, 1, 1]);
                    let tr1 = gamma_compose(&t1, &[r1.clone()], &[2]);
                    let tr2 = gamma_compose(&t2, &[r2.clone(), r3.clone()], &[1, 1]);
                    let rhs = gamma_compose(&s, &[tr1, tr2], &[2, 2]);
                    assert_eq!(lhs, rhs);
                }
            }
        }
        // inner right-equivariance
        for s in all_perms(2) {
            for t in all_perms(2) {
                for h in all_perms(2) {
                    let lhs = gamma_compose(&s, &[Perm::identity(1), t.compose(&h)], &[1, 2]);
                    let rhs = gamma_compose(&s, &[Perm::identity(1), t.clone()], &[1, 2])
                        .compose(&block_diag(&[Perm::identity(1), h.clone()], &[1, 2]));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn koszul_signs() {
        // swapping two odd factors costs a sign
        assert_eq!(koszul_sign(&[1, 1], &Perm(vec![1, 0])), -1);
        assert_eq!(koszul_sign(&[1, 2], &Perm(vec![1, 0])), 1);
        assert_eq!(koszul_sign(&[1, 1, 1], &Perm(vec![2, 1, 0])), -1);
    }
}
