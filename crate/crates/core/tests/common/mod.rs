//! Reference computations for integration tests. Nothing here goes through
//! the library's own distance, elimination or closed-form code.

#![allow(dead_code)]

use expdist::{BiBlockGraph, Rational, RationalMatrix};

/// Floyd-Warshall over the edge list.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    const INF: usize = usize::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(u, v) in edges {
        d[u][v] = 1;
        d[v][u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// `q^d` from a Floyd-Warshall metric on the graph's edges.
pub fn reference_f(g: &BiBlockGraph, q: &Rational) -> RationalMatrix {
    let d = floyd_warshall(g.vertex_count(), &g.edges());
    let n = g.vertex_count();
    RationalMatrix::from_fn(n, n, |i, j| q.pow(d[i][j] as u32))
}

/// Plain fraction Gaussian elimination with row swaps.
pub fn gauss_det(m: &RationalMatrix) -> Rational {
    let n = m.rows();
    let mut a = m.to_rows();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= &a[col][col];
        let inv = a[col][col].recip().unwrap();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &inv;
            let pivot_row = a[col].clone();
            for (entry, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                *entry -= &(&factor * p);
            }
        }
    }
    det
}

/// Cofactor expansion along the first row; only for small matrices.
pub fn laplace_det(m: &RationalMatrix) -> Rational {
    let n = m.rows();
    if n == 0 {
        return Rational::one();
    }
    let mut total = Rational::zero();
    for j in 0..n {
        if m[(0, j)].is_zero() {
            continue;
        }
        let term = &m[(0, j)] * &laplace_det(&m.minor(0, j));
        if j % 2 == 0 {
            total += &term;
        } else {
            total -= &term;
        }
    }
    total
}

/// `C[i][j] = (-1)^(i+j) det(minor(i, j))` by cofactor expansion.
pub fn cofactor_matrix(m: &RationalMatrix) -> RationalMatrix {
    let n = m.rows();
    if n == 1 {
        return RationalMatrix::identity(1);
    }
    RationalMatrix::from_fn(n, n, |i, j| {
        let d = laplace_det(&m.minor(i, j));
        if (i + j) % 2 == 0 {
            d
        } else {
            -d
        }
    })
}

/// Sum of all cofactors, by brute force.
pub fn laplace_cofsum(m: &RationalMatrix) -> Rational {
    cofactor_matrix(m).sum_entries()
}

/// `adj(M) / det(M)`, by brute force.
pub fn cofactor_inverse(m: &RationalMatrix) -> Option<RationalMatrix> {
    let det = laplace_det(m);
    let inv = det.recip().ok()?;
    Some(cofactor_matrix(m).transpose().scale(&inv))
}

/// Cofactor sum through the matrix determinant lemma: for any `c`,
/// `det(M + c J) = det M + c * cof(M)`.
pub fn cofsum_by_rank_one(m: &RationalMatrix) -> Rational {
    let n = m.rows();
    let shifted = m.add(&RationalMatrix::ones(n, n)).unwrap();
    gauss_det(&shifted) - gauss_det(m)
}

pub fn rats(values: &[(i64, i64)]) -> Vec<Rational> {
    values.iter().map(|&(p, q)| expdist::rat(p, q)).collect()
}

pub fn matrix(rows: &[&[(i64, i64)]]) -> RationalMatrix {
    RationalMatrix::from_rows(rows.iter().map(|r| rats(r)).collect()).unwrap()
}

/// Adjacency, degree and the tree q-Laplacian built from scratch.
pub fn tree_reference_laplacian(g: &BiBlockGraph, q: &Rational) -> RationalMatrix {
    let n = g.vertex_count();
    let mut deg = vec![0i64; n];
    let mut adj = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        deg[u] += 1;
        deg[v] += 1;
        adj[u][v] = true;
        adj[v][u] = true;
    }
    let one = Rational::one();
    RationalMatrix::from_fn(n, n, |i, j| {
        if i == j {
            // q * deg - (q - 1) + q (q - 1) (deg - 1)
            let d = Rational::from_int(deg[i]);
            let qm1 = q - &one;
            &(&(q * &d) - &qm1) + &(&(q * &qm1) * &(&d - &one))
        } else if adj[i][j] {
            -q
        } else {
            Rational::zero()
        }
    })
}
