//! The exponential distance matrix `F` (entries `q^d(u,v)`) and the
//! auxiliary objects of its inverse: the weighted adjacency `A`, the
//! same-side weights `B`, the vectors `mu` and `x`, and the q-Laplacian.
//!
//! Every block `K_{m,n}` carries the weight `w = 1 / (1 - q^2 (m-1)(n-1))`.
//! A vertex in several blocks accumulates one term per membership.

use crate::error::{Error, Result};
use crate::graph::{BiBlockGraph, Side};
use crate::matrix::RationalMatrix;
use crate::rational::Rational;

/// Which guards fail at a given `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularityProfile {
    pub q_is_zero: bool,
    pub q_is_pm1: bool,
    /// Blocks with `1 - q^2 (m-1)(n-1) = 0`.
    pub vanishing_blocks: Vec<usize>,
}

impl SingularityProfile {
    /// `F` is invertible and every closed form is defined.
    pub fn is_regular(&self) -> bool {
        !self.q_is_zero && !self.q_is_pm1 && self.vanishing_blocks.is_empty()
    }
}

/// `1 - q^2 (m-1)(n-1)` for one block.
pub fn block_factor(m: usize, n: usize, q: &Rational) -> Rational {
    Rational::one() - q.square() * Rational::from((m - 1) * (n - 1))
}

pub fn singularity_profile(g: &BiBlockGraph, q: &Rational) -> SingularityProfile {
    let q2 = q.square();
    SingularityProfile {
        q_is_zero: q.is_zero(),
        q_is_pm1: q2.is_one(),
        vanishing_blocks: g
            .blocks()
            .iter()
            .enumerate()
            .filter(|(_, b)| block_factor(b.m, b.n, q).is_zero())
            .map(|(i, _)| i)
            .collect(),
    }
}

fn require_nonzero(q: &Rational) -> Result<()> {
    if q.is_zero() {
        return Err(Error::ZeroQ);
    }
    Ok(())
}

/// Per-block weights `1 / (1 - q^2 (m_i-1)(n_i-1))`.
fn block_weights(g: &BiBlockGraph, q: &Rational) -> Result<Vec<Rational>> {
    let profile = singularity_profile(g, q);
    if !profile.vanishing_blocks.is_empty() {
        return Err(Error::VanishingBlockDenominator(profile.vanishing_blocks));
    }
    g.blocks().iter().map(|b| block_factor(b.m, b.n, q).recip()).collect()
}

/// `F_uv = q^d(u,v)`.
pub fn exponential_matrix(g: &BiBlockGraph, q: &Rational) -> Result<RationalMatrix> {
    require_nonzero(q)?;
    let powers: Vec<Rational> = (0..=g.diameter() as u32).map(|k| q.pow(k)).collect();
    let n = g.vertex_count();
    Ok(RationalMatrix::from_fn(n, n, |u, v| powers[g.distance(u, v)].clone()))
}

/// Weighted adjacency: `a_uv = w_i` for an edge of block `i`.
pub fn aux_matrix_a(g: &BiBlockGraph, q: &Rational) -> Result<RationalMatrix> {
    let w = block_weights(g, q)?;
    let n = g.vertex_count();
    let mut a = RationalMatrix::zeros(n, n);
    for (b, weight) in w.iter().enumerate() {
        for &x in g.part(b, Side::X) {
            for &y in g.part(b, Side::Y) {
                a[(x, y)] = weight.clone();
                a[(y, x)] = weight.clone();
            }
        }
    }
    Ok(a)
}

/// Same-side weights: `(n_i-1) w_i` for distinct `u, v` in `X_i`,
/// `(m_i-1) w_i` for distinct `u, v` in `Y_i`.
pub fn aux_matrix_b(g: &BiBlockGraph, q: &Rational) -> Result<RationalMatrix> {
    let w = block_weights(g, q)?;
    let n = g.vertex_count();
    let mut out = RationalMatrix::zeros(n, n);
    for (b, spec) in g.blocks().iter().enumerate() {
        for side in [Side::X, Side::Y] {
            let value = &w[b] * &Rational::from(spec.part_size(side.other()) - 1);
            if value.is_zero() {
                continue;
            }
            let part = g.part(b, side);
            for (i, &u) in part.iter().enumerate() {
                for &v in &part[i + 1..] {
                    out[(u, v)] = value.clone();
                    out[(v, u)] = value.clone();
                }
            }
        }
    }
    Ok(out)
}

/// `mu(v) = sum over memberships of (size of the opposite part - 1) w_i,
/// plus (block index - 1)`.
pub fn mu_vector(g: &BiBlockGraph, q: &Rational) -> Result<Vec<Rational>> {
    let w = block_weights(g, q)?;
    Ok((0..g.vertex_count())
        .map(|v| {
            let memberships = g.memberships(v);
            let mut total = Rational::from(memberships.len() - 1);
            for mb in memberships {
                let opposite = g.blocks()[mb.block].part_size(mb.side.other());
                total += &(&w[mb.block] * &Rational::from(opposite - 1));
            }
            total
        })
        .collect())
}

/// `x(v) = sum over memberships of (1 - q^2 (p-2)(o-1)) w_i - (1 - q^2)(k - 1)`
/// where `p` is the size of the part containing `v`, `o` the opposite part
/// and `k` the block index.
pub fn x_vector(g: &BiBlockGraph, q: &Rational) -> Result<Vec<Rational>> {
    let w = block_weights(g, q)?;
    let q2 = q.square();
    let one = Rational::one();
    Ok((0..g.vertex_count())
        .map(|v| {
            let memberships = g.memberships(v);
            let mut total = -(&(&one - &q2) * &Rational::from(memberships.len() - 1));
            for mb in memberships {
                let spec = g.blocks()[mb.block];
                let own = spec.part_size(mb.side) as i64;
                let opposite = spec.part_size(mb.side.other()) as i64;
                let numer = &one - &(&q2 * &Rational::from_int((own - 2) * (opposite - 1)));
                total += &(&numer * &w[mb.block]);
            }
            total
        })
        .collect())
}

/// `diag(x) + q^2 B - q A`.
pub fn q_laplacian(g: &BiBlockGraph, q: &Rational) -> Result<RationalMatrix> {
    let x = x_vector(g, q)?;
    let a = aux_matrix_a(g, q)?;
    let b = aux_matrix_b(g, q)?;
    assemble_q_laplacian(&x, &a, &b, q)
}

fn assemble_q_laplacian(
    x: &[Rational],
    a: &RationalMatrix,
    b: &RationalMatrix,
    q: &Rational,
) -> Result<RationalMatrix> {
    RationalMatrix::diagonal(x).add(&b.scale(&q.square()))?.sub(&a.scale(q))
}

/// Everything derived from one `(graph, q)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdmBundle {
    pub q: Rational,
    pub f: RationalMatrix,
    pub a: RationalMatrix,
    pub b: RationalMatrix,
    pub mu: Vec<Rational>,
    pub x: Vec<Rational>,
    pub qlap: RationalMatrix,
}

impl EdmBundle {
    pub fn build(g: &BiBlockGraph, q: &Rational) -> Result<Self> {
        require_nonzero(q)?;
        let f = exponential_matrix(g, q)?;
        let a = aux_matrix_a(g, q)?;
        let b = aux_matrix_b(g, q)?;
        let mu = mu_vector(g, q)?;
        let x = x_vector(g, q)?;
        let qlap = assemble_q_laplacian(&x, &a, &b, q)?;
        Ok(EdmBundle { q: q.clone(), f, a, b, mu, x, qlap })
    }

    pub fn order(&self) -> usize {
        self.f.rows()
    }

    /// `diag(x) = I + q^2 diag(mu)`, entrywise.
    pub fn x_matches_mu(&self) -> bool {
        let q2 = self.q.square();
        self.x.len() == self.mu.len() && self.x.iter().zip(&self.mu).all(|(x, mu)| *x == Rational::one() + &q2 * mu)
    }
}

pub fn build_bundle(g: &BiBlockGraph, q: &Rational) -> Result<EdmBundle> {
    EdmBundle::build(g, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Attachment, BlockSpec};
    use crate::matrix::oracle_inverse;
    use crate::rational::rat;

    fn p3() -> BiBlockGraph {
        BiBlockGraph::path(3).unwrap()
    }

    fn rows(m: &RationalMatrix) -> Vec<Vec<String>> {
        m.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
    }

    #[test]
    fn profiles() {
        let tree = BiBlockGraph::path(5).unwrap();
        assert!(singularity_profile(&tree, &rat(1, 2)).is_regular());
        let c4 = BiBlockGraph::complete_bipartite(2, 2).unwrap();
        let p = singularity_profile(&c4, &rat(1, 1));
        assert!(p.q_is_pm1 && !p.q_is_zero);
        assert_eq!(p.vanishing_blocks, vec![0]);
        let k32 = BiBlockGraph::complete_bipartite(3, 2).unwrap();
        assert_eq!(block_factor(3, 2, &rat(1, 2)), rat(1, 2));
        assert!(singularity_profile(&k32, &rat(1, 2)).is_regular());
        assert!(singularity_profile(&k32, &Rational::zero()).q_is_zero);
        // never vanishes for blocks with a singleton part
        let star = BiBlockGraph::complete_bipartite(1, 4).unwrap();
        assert!(singularity_profile(&star, &rat(7, 1)).vanishing_blocks.is_empty());
    }

    #[test]
    fn exponential_matrices() {
        let k11 = BiBlockGraph::complete_bipartite(1, 1).unwrap();
        assert_eq!(rows(&exponential_matrix(&k11, &rat(1, 2)).unwrap()), [["1", "1/2"], ["1/2", "1"]]);
        assert_eq!(
            rows(&exponential_matrix(&p3(), &rat(1, 2)).unwrap()),
            [["1", "1/2", "1/4"], ["1/2", "1", "1/2"], ["1/4", "1/2", "1"]]
        );
        let c4 = exponential_matrix(&BiBlockGraph::complete_bipartite(2, 2).unwrap(), &rat(1, 2)).unwrap();
        assert_eq!(c4[(0, 1)], rat(1, 4));
        assert_eq!(c4[(0, 2)], rat(1, 2));
        assert_eq!(exponential_matrix(&k11, &Rational::zero()), Err(Error::ZeroQ));
    }

    #[test]
    fn auxiliary_matrices() {
        let k11 = BiBlockGraph::complete_bipartite(1, 1).unwrap();
        assert_eq!(aux_matrix_a(&k11, &rat(5, 3)).unwrap(), RationalMatrix::from_ints(&[[0, 1], [1, 0]]));
        let c4 = BiBlockGraph::complete_bipartite(2, 2).unwrap();
        let q = rat(1, 2);
        let a = aux_matrix_a(&c4, &q).unwrap();
        let b = aux_matrix_b(&c4, &q).unwrap();
        for u in 0..4 {
            for v in 0..4 {
                let cross = (u < 2) != (v < 2);
                assert_eq!(a[(u, v)], if cross { rat(4, 3) } else { Rational::zero() });
                let same = u != v && !cross;
                assert_eq!(b[(u, v)], if same { rat(4, 3) } else { Rational::zero() });
            }
        }
        assert!(aux_matrix_b(&p3(), &q).unwrap().is_zero());
        assert!(aux_matrix_b(&BiBlockGraph::complete_bipartite(1, 3).unwrap(), &q).unwrap().is_zero());
        assert_eq!(aux_matrix_a(&c4, &rat(1, 1)), Err(Error::VanishingBlockDenominator(vec![0])));
    }

    #[test]
    fn mu_and_x() {
        let q = rat(1, 2);
        assert_eq!(mu_vector(&p3(), &q).unwrap(), vec![rat(0, 1), rat(1, 1), rat(0, 1)]);
        assert_eq!(x_vector(&p3(), &q).unwrap()[1], rat(5, 4));
        let star = BiBlockGraph::complete_bipartite(1, 3).unwrap();
        assert_eq!(mu_vector(&star, &q).unwrap()[0], rat(2, 1));
        let c4 = BiBlockGraph::complete_bipartite(2, 2).unwrap();
        assert!(mu_vector(&c4, &q).unwrap().iter().all(|m| *m == rat(4, 3)));
        // tree at q = 1: x is the degree vector
        let g = BiBlockGraph::new(
            vec![BlockSpec::new(1, 1); 4],
            vec![Attachment::new(0, Side::X), Attachment::new(0, Side::Y), Attachment::new(1, Side::X)],
        )
        .unwrap();
        let x = x_vector(&g, &Rational::one()).unwrap();
        for (v, xv) in x.iter().enumerate() {
            assert_eq!(*xv, Rational::from(g.degree(v)));
        }
    }

    #[test]
    fn q_laplacian_of_an_edge() {
        let k11 = BiBlockGraph::complete_bipartite(1, 1).unwrap();
        let q = rat(1, 2);
        let lap = q_laplacian(&k11, &q).unwrap();
        assert_eq!(rows(&lap), [["1", "-1/2"], ["-1/2", "1"]]);
        let f = exponential_matrix(&k11, &q).unwrap();
        let scaled = oracle_inverse(&f).unwrap().scale(&(Rational::one() - q.square()));
        assert_eq!(scaled, lap);
        // tree at q = 1 gives the combinatorial Laplacian
        let l = q_laplacian(&p3(), &Rational::one()).unwrap();
        assert_eq!(l, RationalMatrix::from_ints(&[[1, -1, 0], [-1, 2, -1], [0, -1, 1]]));
    }

    #[test]
    fn bundles() {
        let q = rat(1, 2);
        let b = build_bundle(&p3(), &q).unwrap();
        assert_eq!(b.a, RationalMatrix::from_ints(&[[0, 1, 0], [1, 0, 1], [0, 1, 0]]));
        assert!(b.b.is_zero());
        assert_eq!(b.mu, vec![rat(0, 1), rat(1, 1), rat(0, 1)]);
        assert!(b.x_matches_mu());
        assert!(b.f.is_symmetric() && b.a.is_symmetric() && b.b.is_symmetric() && b.qlap.is_symmetric());
        let c4 = BiBlockGraph::complete_bipartite(2, 2).unwrap();
        assert_eq!(build_bundle(&c4, &Rational::one()), Err(Error::VanishingBlockDenominator(vec![0])));
        assert_eq!(build_bundle(&c4, &Rational::zero()), Err(Error::ZeroQ));
    }
}
