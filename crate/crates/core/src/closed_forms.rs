//! Closed-form determinant, inverse and cofactor sum of `F`, for a single
//! complete bipartite block and for whole bi-block graphs, together with the
//! `aI + bJ` and Schur-complement helpers they are derived from.
//!
//! Determinants and cofactor sums are evaluated in fully cancelled
//! polynomial form, so they stay defined at `q = ±1` and at points where a
//! block factor `1 - q^2 (m-1)(n-1)` vanishes. Only the inverses need those
//! points excluded.

use crate::edm::{block_factor, EdmBundle};
use crate::error::{Error, Result};
use crate::graph::BiBlockGraph;
use crate::matrix::{oracle_inverse, RationalMatrix};
use crate::rational::Rational;

/// The matrix `a I_n + b J_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AibjForm {
    pub a: Rational,
    pub b: Rational,
    pub n: usize,
}

impl AibjForm {
    pub fn new(a: Rational, b: Rational, n: usize) -> Self {
        AibjForm { a, b, n }
    }

    pub fn materialize(&self) -> RationalMatrix {
        RationalMatrix::from_fn(self.n, self.n, |i, j| if i == j { &self.a + &self.b } else { self.b.clone() })
    }

    /// `a + n b`, the simple eigenvalue.
    pub fn top_eigenvalue(&self) -> Rational {
        &self.a + &(&Rational::from(self.n) * &self.b)
    }
}

/// `a^(n-1) (a + n b)`. The empty form (`n = 0`) has determinant 1.
pub fn aibj_det(f: &AibjForm) -> Rational {
    if f.n == 0 {
        return Rational::one();
    }
    f.a.pow(f.n as u32 - 1) * f.top_eigenvalue()
}

/// `(a I + b J)^-1 = (1/a) (I - b/(a + n b) J)`.
pub fn aibj_inverse(f: &AibjForm) -> Result<AibjForm> {
    let top = f.top_eigenvalue();
    if f.a.is_zero() || top.is_zero() {
        return Err(Error::SingularForm { a: f.a.to_string(), a_plus_nb: top.to_string() });
    }
    let a_inv = f.a.recip()?;
    let b = -(&f.b.checked_div(&(&f.a * &top))?);
    Ok(AibjForm::new(a_inv, b, f.n))
}

/// `M/M11 = M22 - M21 M11^-1 M12` for the leading `k x k` block `M11`.
pub fn schur_complement(m: &RationalMatrix, k: usize) -> Result<RationalMatrix> {
    if !m.is_square() || k > m.rows() {
        return Err(Error::DimensionMismatch(format!("leading {k}x{k} block of a {}x{} matrix", m.rows(), m.cols())));
    }
    let rest = m.rows() - k;
    let m11 = m.block(0, 0, k, k);
    let m12 = m.block(0, k, k, rest);
    let m21 = m.block(k, 0, rest, k);
    let m22 = m.block(k, k, rest, rest);
    let m11_inv = oracle_inverse(&m11).map_err(|e| match e {
        Error::SingularMatrix => Error::SingularLeadingBlock(k),
        other => other,
    })?;
    m22.sub(&m21.mul(&m11_inv)?.mul(&m12)?)
}

fn one_minus_q2(q: &Rational) -> Rational {
    Rational::one() - q.square()
}

fn require_nonzero(q: &Rational) -> Result<()> {
    if q.is_zero() {
        return Err(Error::ZeroQ);
    }
    Ok(())
}

fn require_block(s: usize, t: usize) -> Result<()> {
    if s == 0 || t == 0 {
        return Err(Error::InvalidBlock { index: 0, m: s, n: t });
    }
    Ok(())
}

/// `det F(K_{s,t}) = (1 - q^2)^(s+t-1) (1 - q^2 (s-1)(t-1))`.
pub fn det_complete_bipartite(s: usize, t: usize, q: &Rational) -> Result<Rational> {
    require_block(s, t)?;
    require_nonzero(q)?;
    Ok(one_minus_q2(q).pow((s + t - 1) as u32) * block_factor(s, t, q))
}

/// `det F(G) = (1 - q^2)^(n-1) prod_i (1 - q^2 (m_i-1)(n_i-1))`.
pub fn det_bi_block(g: &BiBlockGraph, q: &Rational) -> Result<Rational> {
    require_nonzero(q)?;
    let product: Rational = g.blocks().iter().map(|b| block_factor(b.m, b.n, q)).product();
    Ok(one_minus_q2(q).pow(g.vertex_count() as u32 - 1) * product)
}

/// `F(K_{s,t})^-1` with X (size `s`) numbered before Y (size `t`).
pub fn inverse_complete_bipartite(s: usize, t: usize, q: &Rational) -> Result<RationalMatrix> {
    require_block(s, t)?;
    require_nonzero(q)?;
    let base = one_minus_q2(q);
    if base.is_zero() {
        return Err(Error::SingularParameter(format!("q = {q} makes 1 - q^2 vanish")));
    }
    let factor = block_factor(s, t, q);
    if factor.is_zero() {
        return Err(Error::SingularParameter(format!("q^2 (s-1)(t-1) = 1 for s = {s}, t = {t}")));
    }
    let c = q.checked_div(&(&base * &factor))?;
    let diag = base.recip()?;
    let xx = &c * &(q * &Rational::from(t - 1));
    let yy = &c * &(q * &Rational::from(s - 1));
    let xy = -&c;
    Ok(RationalMatrix::from_fn(s + t, s + t, |i, j| {
        let off = match (i < s, j < s) {
            (true, true) => xx.clone(),
            (false, false) => yy.clone(),
            _ => xy.clone(),
        };
        if i == j {
            off + &diag
        } else {
            off
        }
    }))
}

/// `F^-1 = (I - q A + q^2 B + q^2 diag(mu)) / (1 - q^2)`.
pub fn inverse_bi_block(bundle: &EdmBundle) -> Result<RationalMatrix> {
    let q = &bundle.q;
    let base = one_minus_q2(q);
    if base.is_zero() {
        return Err(Error::SingularParameter(format!("q = {q} makes 1 - q^2 vanish")));
    }
    let q2 = q.square();
    let n = bundle.order();
    let inner = RationalMatrix::identity(n)
        .sub(&bundle.a.scale(q))?
        .add(&bundle.b.scale(&q2))?
        .add(&RationalMatrix::diagonal(&bundle.mu).scale(&q2))?;
    Ok(inner.scale(&base.recip()?))
}

/// `2q(q-1) s t + (s+t)(1-q^2)`: the cofactor-sum numerator of one block.
fn cofsum_block_numerator(s: usize, t: usize, q: &Rational) -> Rational {
    let two_q_q1 = &(q * &(q - &Rational::one())) * &Rational::from_int(2);
    two_q_q1 * Rational::from(s * t) + Rational::from(s + t) * one_minus_q2(q)
}

/// `cof F(K_{s,t}) = (1 - q^2)^(s+t-2) [2q(q-1) s t + (s+t)(1-q^2)]`.
pub fn cofsum_complete_bipartite(s: usize, t: usize, q: &Rational) -> Result<Rational> {
    require_block(s, t)?;
    require_nonzero(q)?;
    Ok(one_minus_q2(q).pow((s + t - 2) as u32) * cofsum_block_numerator(s, t, q))
}

/// Which algebraic form of the bi-block cofactor sum to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CofsumForm {
    /// Prefactor distributed into the bracket; defined for every `q != 0`.
    Cancelled,
    /// Determinant times a sum of fractions; needs `q != ±1` and no
    /// vanishing block factor.
    Fractional,
}

/// Cofactor sum of `F(G)`, cancelled form.
pub fn cofsum_bi_block(g: &BiBlockGraph, q: &Rational) -> Result<Rational> {
    cofsum_bi_block_with(g, q, CofsumForm::Cancelled)
}

pub fn cofsum_bi_block_with(g: &BiBlockGraph, q: &Rational, form: CofsumForm) -> Result<Rational> {
    require_nonzero(q)?;
    let base = one_minus_q2(q);
    let factors: Vec<Rational> = g.blocks().iter().map(|b| block_factor(b.m, b.n, q)).collect();
    let numerators: Vec<Rational> = g.blocks().iter().map(|b| cofsum_block_numerator(b.m, b.n, q)).collect();
    let r = g.block_count();
    let n = g.vertex_count() as u32;
    match form {
        CofsumForm::Cancelled => {
            let all: Rational = factors.iter().cloned().product();
            let mut bracket = -(&(&Rational::from(r - 1) * &base) * &all);
            for (i, c) in numerators.iter().enumerate() {
                let others: Rational =
                    factors.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, f)| f.clone()).product();
                bracket += &(c * &others);
            }
            // every block has at least two vertices, so n >= 2
            Ok(base.pow(n - 2) * bracket)
        }
        CofsumForm::Fractional => {
            if base.is_zero() {
                return Err(Error::SingularParameter(format!("q = {q} makes 1 - q^2 vanish")));
            }
            if let Some(i) = factors.iter().position(Rational::is_zero) {
                return Err(Error::SingularParameter(format!("block {i} factor vanishes at q = {q}")));
            }
            let det = det_bi_block(g, q)?;
            let mut bracket = -Rational::from(r - 1);
            for (b, factor) in g.blocks().iter().zip(&factors) {
                let cross = &(&(q * &(q - &Rational::one())) * &Rational::from_int(2)) * &Rational::from(b.m * b.n);
                bracket += &cross.checked_div(&(&base * factor))?;
                bracket += &Rational::from(b.m + b.n).checked_div(factor)?;
            }
            Ok(det * bracket)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edm::{build_bundle, exponential_matrix};
    use crate::matrix::{oracle_adjugate_sum, oracle_det};
    use crate::rational::rat;

    #[test]
    fn aibj_forms() {
        assert_eq!(aibj_det(&AibjForm::new(rat(1, 1), rat(0, 1), 5)), Rational::one());
        let ipj = AibjForm::new(rat(1, 1), rat(1, 1), 3);
        assert_eq!(aibj_det(&ipj), rat(4, 1));
        assert_eq!(oracle_det(&ipj.materialize()).unwrap(), rat(4, 1));
        let inv = aibj_inverse(&ipj).unwrap();
        assert_eq!(inv, AibjForm::new(rat(1, 1), rat(-1, 4), 3));
        assert_eq!(ipj.materialize().mul(&inv.materialize()).unwrap(), RationalMatrix::identity(3));
        assert_eq!(
            aibj_inverse(&AibjForm::new(rat(1, 1), rat(0, 1), 4)).unwrap(),
            AibjForm::new(rat(1, 1), rat(0, 1), 4)
        );
        assert!(matches!(aibj_inverse(&AibjForm::new(rat(1, 1), rat(-1, 3), 3)), Err(Error::SingularForm { .. })));
        assert!(matches!(aibj_inverse(&AibjForm::new(rat(0, 1), rat(1, 1), 3)), Err(Error::SingularForm { .. })));
    }

    #[test]
    fn schur_complements() {
        let m = RationalMatrix::from_ints(&[[2, 1], [1, 1]]);
        assert_eq!(schur_complement(&m, 1).unwrap(), RationalMatrix::from_fn(1, 1, |_, _| rat(1, 2)));
        let blockdiag = RationalMatrix::from_ints(&[[3, 1, 0, 0], [1, 2, 0, 0], [0, 0, 5, 7], [0, 0, 7, 1]]);
        assert_eq!(schur_complement(&blockdiag, 2).unwrap(), blockdiag.block(2, 2, 2, 2));
        let singular = RationalMatrix::from_ints(&[[0, 1], [1, 0]]);
        assert_eq!(schur_complement(&singular, 1), Err(Error::SingularLeadingBlock(1)));
    }

    #[test]
    fn schur_complement_of_complete_bipartite() {
        let q = rat(2, 5);
        for (s, t) in [(1, 1), (2, 3), (4, 2)] {
            let f = exponential_matrix(&BiBlockGraph::complete_bipartite(s, t).unwrap(), &q).unwrap();
            let q2 = q.square();
            let s1 = Rational::from(s - 1);
            let b = -(&(&q2 * &one_minus_q2(&q)) * &s1).checked_div(&(&(&q2 * &s1) + &Rational::one())).unwrap();
            let expected = AibjForm::new(one_minus_q2(&q), b, t).materialize();
            let schur = schur_complement(&f, s).unwrap();
            assert_eq!(schur, expected);
            assert_eq!(
                oracle_det(&f).unwrap(),
                oracle_det(&f.block(0, 0, s, s)).unwrap() * oracle_det(&schur).unwrap()
            );
        }
    }

    #[test]
    fn complete_bipartite_determinants() {
        assert_eq!(det_complete_bipartite(1, 1, &rat(1, 2)).unwrap(), rat(3, 4));
        assert_eq!(det_complete_bipartite(2, 3, &rat(1, 3)).unwrap(), rat(28672, 59049));
        assert_eq!(det_complete_bipartite(3, 4, &Rational::one()).unwrap(), Rational::zero());
        assert_eq!(det_complete_bipartite(1, 1, &Rational::zero()), Err(Error::ZeroQ));
    }

    #[test]
    fn path_determinant() {
        let p3 = BiBlockGraph::path(3).unwrap();
        assert_eq!(det_bi_block(&p3, &rat(1, 2)).unwrap(), rat(9, 16));
    }

    #[test]
    fn complete_bipartite_inverses() {
        let q = rat(1, 2);
        let expected = RationalMatrix::from_rows(vec![
            vec![rat(5, 3), rat(-2, 3), rat(-2, 3)],
            vec![rat(-2, 3), rat(4, 3), Rational::zero()],
            vec![rat(-2, 3), Rational::zero(), rat(4, 3)],
        ])
        .unwrap();
        assert_eq!(inverse_complete_bipartite(1, 2, &q).unwrap(), expected);
        let q = rat(3, 7);
        let k11 = inverse_complete_bipartite(1, 1, &q).unwrap();
        let pair = RationalMatrix::from_rows(vec![vec![Rational::one(), -&q], vec![-&q, Rational::one()]]).unwrap();
        assert_eq!(k11, pair.scale(&one_minus_q2(&q).recip().unwrap()));
        assert!(matches!(inverse_complete_bipartite(2, 2, &Rational::one()), Err(Error::SingularParameter(_))));
        assert!(matches!(inverse_complete_bipartite(3, 3, &rat(1, 2)), Err(Error::SingularParameter(_))));
    }

    #[test]
    fn bundle_inverse_of_path() {
        let q = rat(1, 2);
        let p3 = BiBlockGraph::path(3).unwrap();
        let bundle = build_bundle(&p3, &q).unwrap();
        let inv = inverse_bi_block(&bundle).unwrap();
        assert_eq!(inv, oracle_inverse(&bundle.f).unwrap());
        let at_one = build_bundle(&p3, &Rational::one()).unwrap();
        assert!(matches!(inverse_bi_block(&at_one), Err(Error::SingularParameter(_))));
    }

    #[test]
    fn cofactor_sums() {
        assert_eq!(cofsum_complete_bipartite(1, 1, &rat(1, 2)).unwrap(), Rational::one());
        let q = rat(3, 5);
        assert_eq!(cofsum_complete_bipartite(1, 1, &q).unwrap(), Rational::from_int(2) - &q * &Rational::from_int(2));
        let c4 = BiBlockGraph::complete_bipartite(2, 2).unwrap();
        for q in [rat(1, 2), Rational::one(), rat(-1, 1)] {
            let f = exponential_matrix(&c4, &q).unwrap();
            assert_eq!(cofsum_complete_bipartite(2, 2, &q).unwrap(), oracle_adjugate_sum(&f).unwrap());
            assert_eq!(cofsum_bi_block(&c4, &q).unwrap(), oracle_adjugate_sum(&f).unwrap());
        }
        let p3 = BiBlockGraph::path(3).unwrap();
        let q = rat(1, 2);
        let f = exponential_matrix(&p3, &q).unwrap();
        assert_eq!(cofsum_bi_block(&p3, &q).unwrap(), oracle_adjugate_sum(&f).unwrap());
        assert_eq!(cofsum_bi_block_with(&p3, &q, CofsumForm::Fractional).unwrap(), oracle_adjugate_sum(&f).unwrap());
        assert!(matches!(
            cofsum_bi_block_with(&c4, &Rational::one(), CofsumForm::Fractional),
            Err(Error::SingularParameter(_))
        ));
        assert!(matches!(
            cofsum_bi_block_with(&BiBlockGraph::complete_bipartite(3, 3).unwrap(), &rat(1, 2), CofsumForm::Fractional),
            Err(Error::SingularParameter(_))
        ));
    }
}
