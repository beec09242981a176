//! Leaf-block elimination.
//!
//! The last-attached block `K_{s,t}` of a graph with at least two blocks is
//! a leaf. Reordering the vertices as
//! `[H without the cut vertex, cut vertex, leaf cut-side vertices, leaf
//! opposite-side vertices]` (where `H` is the graph of the remaining blocks
//! and `s` is the size of the cut vertex's side) puts `F` in 3x3 block form
//! with `F(H)` in the corner. The selector matrices `E1` (`|H| x (s-1)`) and
//! `E2` (`|H| x t`) are zero except for a row of ones in the cut vertex's
//! row, and a unit lower block-triangular `L` makes `L F` block upper
//! triangular.

use crate::closed_forms::{aibj_det, AibjForm};
use crate::edm::exponential_matrix;
use crate::error::{Error, Result};
use crate::graph::BiBlockGraph;
use crate::matrix::{oracle_det, RationalMatrix};
use crate::rational::Rational;

/// How a graph splits into `H` and its last (leaf) block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafSplit {
    /// Graph of the first `r - 1` blocks; its ids are the first ids of `G`.
    pub sub: BiBlockGraph,
    pub cut_vertex: usize,
    /// Size of the leaf block's part containing the cut vertex.
    pub s: usize,
    /// Size of the leaf block's other part.
    pub t: usize,
    /// Vertex order of `G` used for the block form; the first `sub` ids end
    /// with the cut vertex.
    pub order: Vec<usize>,
}

impl LeafSplit {
    pub fn of(g: &BiBlockGraph) -> Result<Self> {
        let r = g.block_count();
        if r < 2 {
            return Err(Error::NotEnoughBlocks);
        }
        let leaf = r - 1;
        let attach = g.attachments()[leaf - 1];
        let sub = g.prefix(leaf)?;
        let cut_side = g.part(leaf, attach.side);
        let other_side = g.part(leaf, attach.side.other());
        let mut order: Vec<usize> = (0..sub.vertex_count()).filter(|&v| v != attach.cut_vertex).collect();
        order.push(attach.cut_vertex);
        order.extend_from_slice(&cut_side[1..]);
        order.extend_from_slice(other_side);
        Ok(LeafSplit { cut_vertex: attach.cut_vertex, s: cut_side.len(), t: other_side.len(), order, sub })
    }

    /// `|H|`.
    pub fn sub_order(&self) -> usize {
        self.sub.vertex_count()
    }

    /// `|H| x cols` matrix whose last row is all ones.
    fn last_row_ones(&self, cols: usize) -> RationalMatrix {
        let m = self.sub_order();
        RationalMatrix::from_fn(m, cols, |i, _| if i + 1 == m { Rational::one() } else { Rational::zero() })
    }

    pub fn e1(&self) -> RationalMatrix {
        self.last_row_ones(self.s - 1)
    }

    pub fn e2(&self) -> RationalMatrix {
        self.last_row_ones(self.t)
    }

    /// `|H| x |H|` with a single 1 in the bottom-right corner.
    pub fn emm(&self) -> RationalMatrix {
        let m = self.sub_order();
        let mut out = RationalMatrix::zeros(m, m);
        out[(m - 1, m - 1)] = Rational::one();
        out
    }

    /// `F(H)` in the split's order (cut vertex last).
    pub fn f_hat(&self, q: &Rational) -> Result<RationalMatrix> {
        Ok(exponential_matrix(&self.sub, q)?.permute_symmetric(&self.order[..self.sub_order()]))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafBlockDecomposition {
    pub split: LeafSplit,
    pub q: Rational,
    /// `F(G)` in the split's order.
    pub f: RationalMatrix,
    pub f_hat: RationalMatrix,
    pub l: RationalMatrix,
    pub lf: RationalMatrix,
    /// The three diagonal blocks of `L F`, sizes `|H|`, `s - 1`, `t`.
    pub diag_blocks: [RationalMatrix; 3],
    /// Expected second and third diagonal blocks:
    /// `(1-q^2)(I + q^2 J)` and `(1-q^2) I + q^2 (q^2-1)(s-1)/(q^2(s-1)+1) J`.
    pub expected_forms: [AibjForm; 2],
}

/// Outcome of checking a [`LeafBlockDecomposition`] entrywise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangularCheck {
    pub lower_blocks_zero: bool,
    pub leading_block_is_f_hat: bool,
    pub middle_block_matches: bool,
    pub last_block_matches: bool,
    pub l_is_unimodular: bool,
    /// Each `aI + bJ` determinant equals the oracle determinant of its
    /// block, and `det F = det F(H) * det(middle) * det(last)`.
    pub det_factorizes: bool,
}

impl TriangularCheck {
    pub fn all_hold(&self) -> bool {
        self.lower_blocks_zero
            && self.leading_block_is_f_hat
            && self.middle_block_matches
            && self.last_block_matches
            && self.l_is_unimodular
            && self.det_factorizes
    }
}

impl LeafBlockDecomposition {
    fn block_offsets(&self) -> [(usize, usize); 3] {
        let m = self.split.sub_order();
        let s1 = self.split.s - 1;
        [(0, m), (m, s1), (m + s1, self.split.t)]
    }

    fn sub_block(&self, mat: &RationalMatrix, bi: usize, bj: usize) -> RationalMatrix {
        let offs = self.block_offsets();
        mat.block(offs[bi].0, offs[bj].0, offs[bi].1, offs[bj].1)
    }

    pub fn check(&self) -> Result<TriangularCheck> {
        let lower_blocks_zero = [(1, 0), (2, 0), (2, 1)].iter().all(|&(i, j)| self.sub_block(&self.lf, i, j).is_zero());
        let [d0, d1, d2] = &self.diag_blocks;
        let [e1, e2] = &self.expected_forms;
        let det_f = oracle_det(&self.f)?;
        let det_hat = oracle_det(&self.f_hat)?;
        let det_factorizes = aibj_det(e1) == oracle_det(d1)?
            && aibj_det(e2) == oracle_det(d2)?
            && det_f == det_hat * aibj_det(e1) * aibj_det(e2);
        Ok(TriangularCheck {
            lower_blocks_zero,
            leading_block_is_f_hat: *d0 == self.f_hat,
            middle_block_matches: *d1 == e1.materialize(),
            last_block_matches: *d2 == e2.materialize(),
            l_is_unimodular: oracle_det(&self.l)?.is_one(),
            det_factorizes,
        })
    }
}

pub fn leaf_block_triangularize(g: &BiBlockGraph, q: &Rational) -> Result<LeafBlockDecomposition> {
    let split = LeafSplit::of(g)?;
    let f = exponential_matrix(g, q)?.permute_symmetric(&split.order);
    let f_hat = split.f_hat(q)?;
    let (m, s, t) = (split.sub_order(), split.s, split.t);
    let s1 = s - 1;
    let q2 = q.square();
    let one = Rational::one();
    let denom = &(&q2 * &Rational::from(s1)) + &one;
    let e1t = split.e1().transpose();
    let e2t = split.e2().transpose();
    let jts1 = RationalMatrix::ones(t, s1);

    let l21 = e1t.scale(&-&q2);
    let l31 = e2t.scale(&-q).add(&jts1.mul(&e1t)?.scale(&(q * &q2).checked_div(&denom)?))?;
    let l32 = jts1.scale(&(-q).checked_div(&denom)?);
    let l = RationalMatrix::from_blocks(&[
        vec![&RationalMatrix::identity(m), &RationalMatrix::zeros(m, s1), &RationalMatrix::zeros(m, t)],
        vec![&l21, &RationalMatrix::identity(s1), &RationalMatrix::zeros(s1, t)],
        vec![&l31, &l32, &RationalMatrix::identity(t)],
    ])?;
    let lf = l.mul(&f)?;

    let base = &one - &q2;
    let expected_forms = [
        AibjForm::new(base.clone(), &base * &q2, s1),
        AibjForm::new(base, (&(&q2 * &(&q2 - &one)) * &Rational::from(s1)).checked_div(&denom)?, t),
    ];
    let diag_blocks = [lf.block(0, 0, m, m), lf.block(m, m, s1, s1), lf.block(m + s1, m + s1, t, t)];
    Ok(LeafBlockDecomposition { split, q: q.clone(), f, f_hat, l, lf, diag_blocks, expected_forms })
}

/// The selector identities, each as a pair of exact matrix equalities:
/// (a) `E1' F^ E2 = J` and `E2' F^ E1 = J`; (b) `E1' F^ E1 = J` and
/// `E2' F^ E2 = J`; (c) `E1 J = (s-1) E1` and `E2 J = t E2`;
/// (d) `E1 J = (s-1) E2` and `E2 J = t E1` (rectangular `J`);
/// (e) `E1 E1' = (s-1) Emm` and `E2 E2' = t Emm`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectorIdentities {
    pub a: [bool; 2],
    pub b: [bool; 2],
    pub c: [bool; 2],
    pub d: [bool; 2],
    pub e: [bool; 2],
}

impl SelectorIdentities {
    pub fn all_hold(&self) -> bool {
        [self.a, self.b, self.c, self.d, self.e].iter().flatten().all(|&ok| ok)
    }
}

pub fn selector_identities(g: &BiBlockGraph, q: &Rational) -> Result<SelectorIdentities> {
    let split = LeafSplit::of(g)?;
    let f_hat = split.f_hat(q)?;
    let (s1, t) = (split.s - 1, split.t);
    let (e1, e2, emm) = (split.e1(), split.e2(), split.emm());
    let (e1t, e2t) = (e1.transpose(), e2.transpose());
    let ones = RationalMatrix::ones;
    let sandwich = |l: &RationalMatrix, r: &RationalMatrix| l.mul(&f_hat)?.mul(r);
    let s1r = Rational::from(s1);
    let tr = Rational::from(t);
    Ok(SelectorIdentities {
        a: [sandwich(&e1t, &e2)? == ones(s1, t), sandwich(&e2t, &e1)? == ones(t, s1)],
        b: [sandwich(&e1t, &e1)? == ones(s1, s1), sandwich(&e2t, &e2)? == ones(t, t)],
        c: [e1.mul(&ones(s1, s1))? == e1.scale(&s1r), e2.mul(&ones(t, t))? == e2.scale(&tr)],
        d: [e1.mul(&ones(s1, t))? == e2.scale(&s1r), e2.mul(&ones(t, s1))? == e1.scale(&tr)],
        e: [e1.mul(&e1t)? == emm.scale(&s1r), e2.mul(&e2t)? == emm.scale(&tr)],
    })
}

/// All selector identities hold for the leaf block of `g`.
pub fn e_identity_check(g: &BiBlockGraph, q: &Rational) -> Result<bool> {
    Ok(selector_identities(g, q)?.all_hold())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Attachment, BlockSpec, Side};
    use crate::rational::rat;

    #[test]
    fn path_decomposition() {
        let g = BiBlockGraph::path(3).unwrap();
        let q = rat(1, 2);
        let d = leaf_block_triangularize(&g, &q).unwrap();
        assert_eq!((d.split.sub_order(), d.split.s, d.split.t), (2, 1, 1));
        assert_eq!(d.split.order, vec![0, 1, 2]);
        assert_eq!(d.diag_blocks[0].rows(), 2);
        assert_eq!(d.diag_blocks[1].rows(), 0);
        assert_eq!(d.diag_blocks[2], RationalMatrix::identity(1).scale(&rat(3, 4)));
        // hand computation: L F = [[1,1/2,1/4],[1/2,1,1/2],[0,0,3/4]]
        let expected = RationalMatrix::from_rows(vec![
            vec![rat(1, 1), rat(1, 2), rat(1, 4)],
            vec![rat(1, 2), rat(1, 1), rat(1, 2)],
            vec![rat(0, 1), rat(0, 1), rat(3, 4)],
        ])
        .unwrap();
        assert_eq!(d.lf, expected);
        assert!(d.check().unwrap().all_hold());
    }

    #[test]
    fn leaf_on_y_side_with_interior_cut_vertex() {
        let g = BiBlockGraph::new(
            vec![BlockSpec::new(2, 3), BlockSpec::new(1, 2), BlockSpec::new(2, 2)],
            vec![Attachment::new(1, Side::X), Attachment::new(3, Side::Y)],
        )
        .unwrap();
        let split = LeafSplit::of(&g).unwrap();
        assert_eq!(split.cut_vertex, 3);
        assert_eq!(*split.order.get(split.sub_order() - 1).unwrap(), 3);
        for q in [rat(1, 2), rat(-2, 3), Rational::one()] {
            let d = leaf_block_triangularize(&g, &q).unwrap();
            assert!(d.check().unwrap().all_hold(), "q = {q}");
            assert!(e_identity_check(&g, &q).unwrap());
        }
    }

    #[test]
    fn selector_shapes() {
        let g = BiBlockGraph::new(vec![BlockSpec::new(1, 1), BlockSpec::new(3, 2)], vec![Attachment::new(1, Side::X)])
            .unwrap();
        let split = LeafSplit::of(&g).unwrap();
        assert_eq!(split.e1().cols(), 2);
        let e1e1t = split.e1().mul(&split.e1().transpose()).unwrap();
        let mut expected = RationalMatrix::zeros(2, 2);
        expected[(1, 1)] = rat(2, 1);
        assert_eq!(e1e1t, expected);
        // with s = 1, E1 has no columns and (c)-(e) hold vacuously
        let p = BiBlockGraph::path(4).unwrap();
        assert_eq!(LeafSplit::of(&p).unwrap().e1().cols(), 0);
        assert!(e_identity_check(&p, &rat(1, 3)).unwrap());
    }

    #[test]
    fn single_block_has_no_leaf() {
        let g = BiBlockGraph::complete_bipartite(2, 2).unwrap();
        assert_eq!(LeafSplit::of(&g), Err(Error::NotEnoughBlocks));
        assert_eq!(leaf_block_triangularize(&g, &rat(1, 2)).map(|_| ()), Err(Error::NotEnoughBlocks));
        assert_eq!(e_identity_check(&g, &rat(1, 2)), Err(Error::NotEnoughBlocks));
    }
}
