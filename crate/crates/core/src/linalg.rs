//! Small dense and block-tridiagonal linear solves.
//!
//! Everything here targets tiny blocks (n <= 8 species), so plain LU with
//! partial pivoting is both adequate and easy to audit. The block solver
//! exists for the Newton systems of the wave module, whose Jacobians couple
//! each grid point to its neighbours through diagonal blocks only.

/// LU-factor the row-major `n x n` matrix `a` in place with partial
/// pivoting. `piv[k]` records the row swapped into position `k`.
///
/// Returns `Err(k)` when no usable pivot exists in column `k`, with
/// "usable" meaning larger than `1e-12` times the largest entry of the
/// original matrix.
pub(crate) fn lu_factor(n: usize, a: &mut [f64], piv: &mut [usize]) -> Result<(), usize> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(piv.len(), n);
    let scale = a.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if scale == 0.0 {
        return Err(0);
    }
    let tol = 1e-12 * scale;
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].abs();
        for r in k + 1..n {
            let v = a[r * n + k].abs();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best <= tol {
            return Err(k);
        }
        piv[k] = p;
        if p != k {
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
        }
        let inv = 1.0 / a[k * n + k];
        for r in k + 1..n {
            let l = a[r * n + k] * inv;
            a[r * n + k] = l;
            for c in k + 1..n {
                a[r * n + c] -= l * a[k * n + c];
            }
        }
    }
    Ok(())
}

/// Solve `A x = b` given the factorization from [`lu_factor`]; `b` is
/// overwritten with the solution.
pub(crate) fn lu_solve(n: usize, a: &[f64], piv: &[usize], b: &mut [f64]) {
    // All interchanges first: the stored L has its rows in final (swapped)
    // order, so interleaving swaps with the elimination would mix factors
    // from different stages.
    for k in 0..n {
        b.swap(k, piv[k]);
    }
    for k in 0..n {
        for r in k + 1..n {
            b[r] -= a[r * n + k] * b[k];
        }
    }
    for k in (0..n).rev() {
        for c in k + 1..n {
            b[k] -= a[k * n + c] * b[c];
        }
        b[k] /= a[k * n + k];
    }
}

/// One-shot dense solve of `A x = b` for small systems. `a` and `b` are
/// consumed as scratch. Returns `Err(col)` on a singular column.
pub(crate) fn solve_dense(n: usize, mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Vec<f64>, usize> {
    let mut piv = vec![0usize; n];
    lu_factor(n, &mut a, &mut piv)?;
    lu_solve(n, &a, &piv, &mut b);
    Ok(b)
}

/// Solve a block-tridiagonal system with `nblk` block rows of size `n`.
///
/// The off-diagonal blocks are diagonal matrices (species do not couple
/// across neighbouring grid points), so they are passed as length-`n`
/// vectors per block row:
///
/// * `sub[j]`  multiplies unknown block `j - 1` (entry 0 unused),
/// * `diag[j]` is the dense `n x n` block on the diagonal (row-major),
/// * `sup[j]`  multiplies unknown block `j + 1` (last entry unused).
///
/// `rhs` is overwritten with the solution. Returns `Err(j)` when the
/// eliminated diagonal block at row `j` is singular.
pub(crate) fn solve_block_tridiag(
    n: usize,
    nblk: usize,
    sub: &[f64],
    diag: &mut [f64],
    sup: &[f64],
    rhs: &mut [f64],
) -> Result<(), usize> {
    debug_assert_eq!(sub.len(), nblk * n);
    debug_assert_eq!(diag.len(), nblk * n * n);
    debug_assert_eq!(sup.len(), nblk * n);
    debug_assert_eq!(rhs.len(), nblk * n);

    // Forward sweep: eliminate the sub-diagonal, storing W_j = D_j^{-1} C_j
    // (dense) and s_j = D_j^{-1} r_j in place of `diag` and `rhs`.
    let mut piv = vec![0usize; n];
    let mut col = vec![0.0f64; n];
    for j in 0..nblk {
        if j > 0 {
            // D_j <- D_j - A_j W_{j-1}, r_j <- r_j - A_j s_{j-1}.
            // A_j is diagonal, so this scales rows of W_{j-1}.
            let (prev, cur) = diag.split_at_mut(j * n * n);
            let w_prev = &prev[(j - 1) * n * n..];
            let d_j = &mut cur[..n * n];
            for i in 0..n {
                let a = sub[j * n + i];
                if a != 0.0 {
                    for c in 0..n {
                        d_j[i * n + c] -= a * w_prev[i * n + c];
                    }
                }
            }
            let (rprev, rcur) = rhs.split_at_mut(j * n);
            let s_prev = &rprev[(j - 1) * n..];
            for i in 0..n {
                rcur[i] -= sub[j * n + i] * s_prev[i];
            }
        }
        let d_j = &mut diag[j * n * n..(j + 1) * n * n];
        lu_factor(n, d_j, &mut piv).map_err(|_| j)?;
        lu_solve(n, d_j, &piv, &mut rhs[j * n..(j + 1) * n]);
        // Replace the factored block with W_j = D_j^{-1} diag(sup_j),
        // column by column. The last block row has no super-diagonal.
        if j + 1 < nblk {
            let mut w = vec![0.0f64; n * n];
            for c in 0..n {
                col.iter_mut().for_each(|v| *v = 0.0);
                col[c] = sup[j * n + c];
                lu_solve(n, d_j, &piv, &mut col);
                for r in 0..n {
                    w[r * n + c] = col[r];
                }
            }
            d_j.copy_from_slice(&w);
        }
    }

    // Back substitution: x_j = s_j - W_j x_{j+1}.
    for j in (0..nblk.saturating_sub(1)).rev() {
        let w = &diag[j * n * n..(j + 1) * n * n];
        let (head, tail) = rhs.split_at_mut((j + 1) * n);
        let x_next = &tail[..n];
        let x_j = &mut head[j * n..];
        for r in 0..n {
            let mut acc = 0.0;
            for c in 0..n {
                acc += w[r * n + c] * x_next[c];
            }
            x_j[r] -= acc;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_solve_2x2() {
        // [1 2; 2 1] x = (1, 1) has solution (1/3, 1/3).
        let x = solve_dense(2, vec![1.0, 2.0, 2.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert!((x[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((x[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn dense_solve_needs_pivoting() {
        // Zero leading entry forces a row swap.
        let x = solve_dense(2, vec![0.0, 1.0, 1.0, 0.0], vec![2.0, 3.0]).unwrap();
        assert_eq!(x, vec![3.0, 2.0]);
    }

    #[test]
    fn dense_solve_swaps_after_elimination() {
        // The circulant [1 2 3; 3 1 2; 2 3 1] pivots at step 0 *and* step 1,
        // so the solve must not reuse L entries from before a later swap.
        let a = vec![1.0, 2.0, 3.0, 3.0, 1.0, 2.0, 2.0, 3.0, 1.0];
        let x = solve_dense(3, a, vec![1.0, 1.0, 1.0]).unwrap();
        for v in &x {
            assert!((v - 1.0 / 6.0).abs() < 1e-14, "{x:?}");
        }
    }

    #[test]
    fn dense_singular_detected() {
        assert!(solve_dense(2, vec![1.0, 2.0, 2.0, 4.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn block_tridiag_matches_dense() {
        // Random-ish 3-block system with n = 2, checked against a dense
        // solve of the assembled 6x6 matrix.
        let n = 2;
        let nblk = 3;
        let sub = vec![0.0, 0.0, 1.5, -0.5, 0.25, 2.0];
        let sup = vec![-1.0, 0.5, 0.75, 1.25, 0.0, 0.0];
        let diag = vec![
            4.0, 1.0, -1.0, 3.5, // block 0
            5.0, -2.0, 0.5, 4.0, // block 1
            3.0, 0.25, -0.75, 6.0, // block 2
        ];
        let rhs = vec![1.0, -2.0, 0.5, 3.0, -1.0, 2.5];

        let dim = n * nblk;
        let mut full = vec![0.0; dim * dim];
        for j in 0..nblk {
            for r in 0..n {
                for c in 0..n {
                    full[(j * n + r) * dim + j * n + c] = diag[j * n * n + r * n + c];
                }
                if j > 0 {
                    full[(j * n + r) * dim + (j - 1) * n + r] = sub[j * n + r];
                }
                if j + 1 < nblk {
                    full[(j * n + r) * dim + (j + 1) * n + r] = sup[j * n + r];
                }
            }
        }
        let expect = solve_dense(dim, full, rhs.clone()).unwrap();

        let mut diag_scratch = diag;
        let mut x = rhs;
        solve_block_tridiag(n, nblk, &sub, &mut diag_scratch, &sup, &mut x).unwrap();
        for (a, b) in x.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn scalar_tridiag_poisson() {
        // -u'' = 1 on 4 interior points of [0, 5] with zero boundary:
        // u_j = j (5 - j) / 2 at integer nodes.
        let n = 1;
        let nblk = 4;
        let sub = vec![0.0, 1.0, 1.0, 1.0];
        let sup = vec![1.0, 1.0, 1.0, 0.0];
        let mut diag = vec![-2.0; 4];
        let mut rhs = vec![-1.0; 4];
        solve_block_tridiag(n, nblk, &sub, &mut diag, &sup, &mut rhs).unwrap();
        for (j, &v) in rhs.iter().enumerate() {
            let x = (j + 1) as f64;
            assert!((v - x * (5.0 - x) / 2.0).abs() < 1e-12);
        }
    }
}
