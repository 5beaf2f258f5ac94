//! Small dense and block-tridiagonal linear solvers.
//!
//! The implicit time stepper produces stage systems whose matrix is block
//! tridiagonal (one small block per grid node, coupling only neighbors),
//! plus two corner blocks when the grid wraps periodically.  The tridiagonal
//! core is factored by block LU once per step size; the corners are handled
//! by a rank-`2b` Woodbury correction so the wrap never densifies the
//! factorization.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LinalgError {
    /// Elimination hit an exactly-zero pivot column.
    Singular { row: usize },
    /// A diagonal block could not be factored.
    SingularBlock { index: usize },
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::Singular { row } => write!(f, "singular matrix at elimination row {row}"),
            LinalgError::SingularBlock { index } => {
                write!(f, "singular diagonal block at index {index}")
            }
        }
    }
}

impl std::error::Error for LinalgError {}

// ═══════════════════════════════════════════════════════════════════════════
// Dense matrices
// ═══════════════════════════════════════════════════════════════════════════

/// A dense row-major matrix (used for node blocks and small corrections).
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = 1.0;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Mat {
        let r = rows.len();
        let c = rows[0].len();
        assert!(rows.iter().all(|row| row.len() == c));
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    *out.at_mut(i, j) += a * other.at(k, j);
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * v[j]).sum())
            .collect()
    }
}

// ═══════════════════════════════════════════════════════════════════════════
// Dense LU
// ═══════════════════════════════════════════════════════════════════════════

/// Row-pivoted LU factorization of a square matrix.
#[derive(Debug, Clone)]
pub(crate) struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    piv: Vec<usize>,
}

impl DenseLu {
    pub fn factor(m: &Mat) -> Result<DenseLu, LinalgError> {
        assert_eq!(m.rows, m.cols);
        let n = m.rows;
        let mut lu = m.data.clone();
        let mut piv = Vec::with_capacity(n);
        for col in 0..n {
            let mut best = col;
            let mut best_mag = lu[col * n + col].abs();
            for row in col + 1..n {
                let mag = lu[row * n + col].abs();
                if mag > best_mag {
                    best = row;
                    best_mag = mag;
                }
            }
            if best_mag == 0.0 {
                return Err(LinalgError::Singular { row: col });
            }
            if best != col {
                for j in 0..n {
                    lu.swap(col * n + j, best * n + j);
                }
            }
            piv.push(best);
            let inv_pivot = 1.0 / lu[col * n + col];
            for row in col + 1..n {
                let factor = lu[row * n + col] * inv_pivot;
                lu[row * n + col] = factor;
                if factor != 0.0 {
                    for j in col + 1..n {
                        lu[row * n + j] -= factor * lu[col * n + j];
                    }
                }
            }
        }
        Ok(DenseLu { n, lu, piv })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x = b.to_vec();
        for i in 0..n {
            x.swap(i, self.piv[i]);
        }
        // forward substitution (unit lower triangle)
        for i in 1..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        // back substitution
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    /// Solves for each column of a matrix right-hand side.
    pub fn solve_mat(&self, b: &Mat) -> Mat {
        assert_eq!(b.rows, self.n);
        let mut out = Mat::zeros(b.rows, b.cols);
        let mut col = vec![0.0; b.rows];
        for j in 0..b.cols {
            for i in 0..b.rows {
                col[i] = b.at(i, j);
            }
            let x = self.solve(&col);
            for i in 0..b.rows {
                *out.at_mut(i, j) = x[i];
            }
        }
        out
    }
}

// ═══════════════════════════════════════════════════════════════════════════
// Block tridiagonal LU
// ═══════════════════════════════════════════════════════════════════════════

/// Block-LU factorization of a block-tridiagonal matrix.
///
/// With diagonal blocks `D_i`, sub-diagonal `L_i` (row `i+1`, column `i`)
/// and super-diagonal `U_i` (row `i`, column `i+1`), the factorization
/// stores the pivoted LUs of the Schur-complement diagonals
/// `D~_i = D_i - L_(i-1) D~_(i-1)^(-1) U_(i-1)` plus the back-substitution
/// blocks `W_i = D~_i^(-1) U_i`.
#[derive(Debug, Clone)]
pub(crate) struct BlockTridiag {
    n: usize,
    b: usize,
    lus: Vec<DenseLu>,
    w: Vec<Mat>,
    lowers: Vec<Mat>,
}

impl BlockTridiag {
    pub fn factor(
        diag: &[Mat],
        lower: &[Mat],
        upper: &[Mat],
    ) -> Result<BlockTridiag, LinalgError> {
        let n = diag.len();
        assert!(n >= 1);
        assert_eq!(lower.len(), n - 1);
        assert_eq!(upper.len(), n - 1);
        let b = diag[0].rows();

        let mut lus = Vec::with_capacity(n);
        let mut w = Vec::with_capacity(n.saturating_sub(1));
        let mut current = diag[0].clone();
        for i in 0..n {
            if i > 0 {
                current = diag[i].sub(&lower[i - 1].matmul(&w[i - 1]));
            }
            let lu = DenseLu::factor(&current)
                .map_err(|_| LinalgError::SingularBlock { index: i })?;
            if i + 1 < n {
                w.push(lu.solve_mat(&upper[i]));
            }
            lus.push(lu);
        }
        Ok(BlockTridiag {
            n,
            b,
            lus,
            w,
            lowers: lower.to_vec(),
        })
    }

    pub fn unknowns(&self) -> usize {
        self.n * self.b
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        assert_eq!(rhs.len(), self.unknowns());
        let b = self.b;
        // forward sweep
        let mut z: Vec<Vec<f64>> = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut r = rhs[i * b..(i + 1) * b].to_vec();
            if i > 0 {
                let correction = self.lowers[i - 1].mul_vec(&z[i - 1]);
                for (rj, cj) in r.iter_mut().zip(correction) {
                    *rj -= cj;
                }
            }
            z.push(self.lus[i].solve(&r));
        }
        // back substitution
        let mut x = vec![0.0; self.unknowns()];
        x[(self.n - 1) * b..].copy_from_slice(&z[self.n - 1]);
        for i in (0..self.n - 1).rev() {
            let tail = self.w[i].mul_vec(&x[(i + 1) * b..(i + 2) * b]);
            for j in 0..b {
                x[i * b + j] = z[i][j] - tail[j];
            }
        }
        x
    }

    /// Solves for each column of a matrix right-hand side.
    fn solve_mat(&self, bmat: &Mat) -> Mat {
        let mut out = Mat::zeros(bmat.rows(), bmat.cols());
        let mut col = vec![0.0; bmat.rows()];
        for j in 0..bmat.cols() {
            for i in 0..bmat.rows() {
                col[i] = bmat.at(i, j);
            }
            let x = self.solve(&col);
            for i in 0..bmat.rows() {
                *out.at_mut(i, j) = x[i];
            }
        }
        out
    }
}

// ═══════════════════════════════════════════════════════════════════════════
// Cyclic (periodic) block tridiagonal LU
// ═══════════════════════════════════════════════════════════════════════════

/// Block-tridiagonal factorization with periodic corner blocks, solved by
/// the Woodbury identity.
///
/// The corners `C_lo = A(0, n-1)` and `C_hi = A(n-1, 0)` are written as a
/// rank-`2b` update `A = T + U V^T`; the stored pieces are the tridiagonal
/// factorization of `T`, the tall solve `Z = T^(-1) U`, and the LU of the
/// small capacitance matrix `S = I + V^T Z`.
#[derive(Debug, Clone)]
pub(crate) struct CyclicBlockTridiag {
    tri: BlockTridiag,
    z: Mat,
    s_lu: DenseLu,
}

impl CyclicBlockTridiag {
    pub fn factor(
        diag: &[Mat],
        lower: &[Mat],
        upper: &[Mat],
        corner_lo: &Mat,
        corner_hi: &Mat,
    ) -> Result<CyclicBlockTridiag, LinalgError> {
        let n = diag.len();
        assert!(n >= 3, "cyclic corners need at least three block rows");
        let b = diag[0].rows();
        let tri = BlockTridiag::factor(diag, lower, upper)?;

        // U places the corners; V places identities so that U V^T restores
        // exactly the two corner blocks.
        let mut u = Mat::zeros(n * b, 2 * b);
        for i in 0..b {
            for j in 0..b {
                *u.at_mut(i, j) = corner_lo.at(i, j);
                *u.at_mut((n - 1) * b + i, b + j) = corner_hi.at(i, j);
            }
        }
        let z = tri.solve_mat(&u);

        // V^T Z picks block row n-1 of Z (for the first b rows) and block
        // row 0 (for the rest).
        let mut s = Mat::identity(2 * b);
        for i in 0..b {
            for j in 0..2 * b {
                *s.at_mut(i, j) += z.at((n - 1) * b + i, j);
                *s.at_mut(b + i, j) += z.at(i, j);
            }
        }
        let s_lu = DenseLu::factor(&s).map_err(|_| LinalgError::SingularBlock { index: n })?;
        Ok(CyclicBlockTridiag { tri, z, s_lu })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let b = self.tri.b;
        let n = self.tri.n;
        let y = self.tri.solve(rhs);
        let mut vty = vec![0.0; 2 * b];
        vty[..b].copy_from_slice(&y[(n - 1) * b..]);
        vty[b..].copy_from_slice(&y[..b]);
        let w = self.s_lu.solve(&vty);
        let correction = self.z.mul_vec(&w);
        y.iter().zip(correction).map(|(yi, ci)| yi - ci).collect()
    }
}

// ═══════════════════════════════════════════════════════════════════════════
// Tests
// ═══════════════════════════════════════════════════════════════════════════

#[cfg(test)]
mod tests {
    use super::*;

    /// Deterministic pseudo-random stream for test matrices.
    struct Lcg(u64);

    impl Lcg {
        fn next(&mut self) -> f64 {
            self.0 = self
                .0
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (self.0 >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        }
    }

    fn random_block(rng: &mut Lcg, b: usize, diag_boost: f64) -> Mat {
        let mut m = Mat::zeros(b, b);
        for i in 0..b {
            for j in 0..b {
                *m.at_mut(i, j) = rng.next();
            }
            *m.at_mut(i, i) += diag_boost;
        }
        m
    }

    /// Assembles blocks into one dense matrix for oracle solves.
    fn assemble(
        diag: &[Mat],
        lower: &[Mat],
        upper: &[Mat],
        corners: Option<(&Mat, &Mat)>,
    ) -> Mat {
        let n = diag.len();
        let b = diag[0].rows();
        let mut full = Mat::zeros(n * b, n * b);
        let put = |mat: &Mat, bi: usize, bj: usize, full: &mut Mat| {
            for i in 0..b {
                for j in 0..b {
                    *full.at_mut(bi * b + i, bj * b + j) = mat.at(i, j);
                }
            }
        };
        for i in 0..n {
            put(&diag[i], i, i, &mut full);
            if i + 1 < n {
                put(&upper[i], i, i + 1, &mut full);
                put(&lower[i], i + 1, i, &mut full);
            }
        }
        if let Some((lo, hi)) = corners {
            put(lo, 0, n - 1, &mut full);
            put(hi, n - 1, 0, &mut full);
        }
        full
    }

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn dense_lu_solves_a_known_system() {
        // 2x + y = 5, x + 3y = 10 -> x = 1, y = 3
        let m = Mat::from_rows(vec![vec![2.0, 1.0], vec![1.0, 3.0]]);
        let lu = DenseLu::factor(&m).unwrap();
        let x = lu.solve(&[5.0, 10.0]);
        assert!((x[0] - 1.0).abs() < 1e-14);
        assert!((x[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn dense_lu_needs_pivoting() {
        // zero leading pivot forces a row swap
        let m = Mat::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let lu = DenseLu::factor(&m).unwrap();
        let x = lu.solve(&[7.0, 9.0]);
        assert_eq!(x, vec![9.0, 7.0]);
    }

    #[test]
    fn dense_lu_detects_singularity() {
        let m = Mat::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(matches!(
            DenseLu::factor(&m),
            Err(LinalgError::Singular { row: 1 })
        ));
    }

    #[test]
    fn dense_lu_random_residual() {
        let mut rng = Lcg(42);
        let n = 10;
        let mut rows = Vec::new();
        for i in 0..n {
            let mut row: Vec<f64> = (0..n).map(|_| rng.next()).collect();
            row[i] += 4.0;
            rows.push(row);
        }
        let m = Mat::from_rows(rows);
        let b: Vec<f64> = (0..n).map(|_| rng.next()).collect();
        let x = DenseLu::factor(&m).unwrap().solve(&b);
        let back = m.mul_vec(&x);
        assert!(max_abs_diff(&back, &b) < 1e-12);
    }

    #[test]
    fn block_tridiag_matches_dense_solve() {
        let mut rng = Lcg(7);
        for &(n, b) in &[(5usize, 2usize), (4, 4), (3, 1)] {
            let diag: Vec<Mat> = (0..n).map(|_| random_block(&mut rng, b, 5.0)).collect();
            let lower: Vec<Mat> = (0..n - 1).map(|_| random_block(&mut rng, b, 0.0)).collect();
            let upper: Vec<Mat> = (0..n - 1).map(|_| random_block(&mut rng, b, 0.0)).collect();
            let rhs: Vec<f64> = (0..n * b).map(|_| rng.next()).collect();

            let fast = BlockTridiag::factor(&diag, &lower, &upper)
                .unwrap()
                .solve(&rhs);
            let dense = assemble(&diag, &lower, &upper, None);
            let slow = DenseLu::factor(&dense).unwrap().solve(&rhs);
            assert!(
                max_abs_diff(&fast, &slow) < 1e-10,
                "n = {n}, b = {b}: {:?}",
                max_abs_diff(&fast, &slow)
            );
        }
    }

    #[test]
    fn cyclic_block_tridiag_matches_dense_solve() {
        let mut rng = Lcg(19);
        for &(n, b) in &[(5usize, 2usize), (4, 4), (6, 1)] {
            let diag: Vec<Mat> = (0..n).map(|_| random_block(&mut rng, b, 6.0)).collect();
            let lower: Vec<Mat> = (0..n - 1).map(|_| random_block(&mut rng, b, 0.0)).collect();
            let upper: Vec<Mat> = (0..n - 1).map(|_| random_block(&mut rng, b, 0.0)).collect();
            let corner_lo = random_block(&mut rng, b, 0.0);
            let corner_hi = random_block(&mut rng, b, 0.0);
            let rhs: Vec<f64> = (0..n * b).map(|_| rng.next()).collect();

            let fast = CyclicBlockTridiag::factor(&diag, &lower, &upper, &corner_lo, &corner_hi)
                .unwrap()
                .solve(&rhs);
            let dense = assemble(&diag, &lower, &upper, Some((&corner_lo, &corner_hi)));
            let slow = DenseLu::factor(&dense).unwrap().solve(&rhs);
            assert!(
                max_abs_diff(&fast, &slow) < 1e-10,
                "n = {n}, b = {b}: {:?}",
                max_abs_diff(&fast, &slow)
            );
        }
    }

    #[test]
    fn singular_diagonal_block_is_reported() {
        let zero = Mat::zeros(2, 2);
        let id = Mat::identity(2);
        let err = BlockTridiag::factor(
            &[id.clone(), zero, id.clone()],
            &[Mat::zeros(2, 2), Mat::zeros(2, 2)],
            &[Mat::zeros(2, 2), Mat::zeros(2, 2)],
        )
        .unwrap_err();
        assert_eq!(err, LinalgError::SingularBlock { index: 1 });
    }
}
