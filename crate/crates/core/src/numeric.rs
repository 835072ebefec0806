//! Small dense linear algebra used throughout: tolerance comparisons, a
//! rank-3 array type, numerical rank, pivot selection and column echelon
//! forms.

use nalgebra::{DMatrix, DVector, SVD};

use crate::error::{JetError, Result};

/// Default comparison tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Smallest admissible `|det|` for a stored group element block.
pub const DET_FLOOR: f64 = 1e-12;

/// Combined absolute/relative distance: `|x - y| / max(1, |x|, |y|)`.
#[inline]
pub fn rel_diff(x: f64, y: f64) -> f64 {
    let scale = 1f64.max(x.abs()).max(y.abs());
    (x - y).abs() / scale
}

/// `|x - y| <= tol * max(1, |x|, |y|)`.
#[inline]
pub fn close(x: f64, y: f64, tol: f64) -> bool {
    rel_diff(x, y) <= tol
}

/// Blockwise combined distance `‖a − b‖∞ / max(1, ‖a‖∞, ‖b‖∞)`, the
/// [`rel_diff`] measure applied to a whole array at once. Infinite when the
/// lengths differ or any entry is NaN.
pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let (mut diff, mut scale) = (0.0f64, 1.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let d = (x - y).abs();
        if d.is_nan() {
            return f64::INFINITY;
        }
        diff = diff.max(d);
        scale = scale.max(x.abs()).max(y.abs());
    }
    diff / scale
}

pub fn mat_rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    max_rel_diff(a.as_slice(), b.as_slice())
}

pub fn vec_rel_diff(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    max_rel_diff(a.as_slice(), b.as_slice())
}

pub fn all_finite(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite())
}

/// Builds a matrix from nested rows; `None` on ragged or empty input.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Option<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first()?.len();
    if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return None;
    }
    Some(DMatrix::from_fn(nrows, ncols, |r, c| rows[r][c]))
}

pub fn matrix_to_rows(a: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..a.nrows())
        .map(|r| (0..a.ncols()).map(|c| a[(r, c)]).collect())
        .collect()
}

/// Dense `d0 x d1 x d2` array, row-major, addressed as `t[(a, i, j)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    shape: [usize; 3],
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(d0: usize, d1: usize, d2: usize) -> Self {
        Self {
            shape: [d0, d1, d2],
            data: vec![0.0; d0 * d1 * d2],
        }
    }

    pub fn from_fn(d0: usize, d1: usize, d2: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(d0 * d1 * d2);
        for a in 0..d0 {
            for i in 0..d1 {
                for j in 0..d2 {
                    data.push(f(a, i, j));
                }
            }
        }
        Self {
            shape: [d0, d1, d2],
            data,
        }
    }

    /// Nested `[d0][d1][d2]` lists; `None` when ragged.
    pub fn from_nested(nested: &[Vec<Vec<f64>>]) -> Option<Self> {
        let d0 = nested.len();
        let d1 = nested.first()?.len();
        let d2 = nested.first()?.first()?.len();
        let mut data = Vec::with_capacity(d0 * d1 * d2);
        for block in nested {
            if block.len() != d1 {
                return None;
            }
            for row in block {
                if row.len() != d2 {
                    return None;
                }
                data.extend_from_slice(row);
            }
        }
        Some(Self {
            shape: [d0, d1, d2],
            data,
        })
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        let [d0, d1, d2] = self.shape;
        (0..d0)
            .map(|a| (0..d1).map(|i| (0..d2).map(|j| self[(a, i, j)]).collect()).collect())
            .collect()
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn rel_diff(&self, other: &Tensor3) -> f64 {
        if self.shape != other.shape {
            return f64::INFINITY;
        }
        max_rel_diff(&self.data, &other.data)
    }

    /// Swaps the last two indices.
    pub fn transpose_last(&self) -> Self {
        let [d0, d1, d2] = self.shape;
        Self::from_fn(d0, d2, d1, |a, i, j| self[(a, j, i)])
    }

    /// `½(T + Tᵀ)` in the last two indices.
    pub fn sym_last(&self) -> Self {
        let [d0, d1, d2] = self.shape;
        debug_assert_eq!(d1, d2);
        Self::from_fn(d0, d1, d2, |a, i, j| 0.5 * (self[(a, i, j)] + self[(a, j, i)]))
    }

    /// `½(T - Tᵀ)` in the last two indices.
    pub fn alt_last(&self) -> Self {
        let [d0, d1, d2] = self.shape;
        debug_assert_eq!(d1, d2);
        Self::from_fn(d0, d1, d2, |a, i, j| 0.5 * (self[(a, i, j)] - self[(a, j, i)]))
    }

    /// Relative defect of `T[a][i][j] = T[a][j][i]`.
    pub fn symmetry_defect(&self) -> f64 {
        self.rel_diff(&self.transpose_last())
    }

    /// Relative defect of `T[a][i][j] = -T[a][j][i]`.
    pub fn skew_defect(&self) -> f64 {
        self.rel_diff(&self.transpose_last().scale(-1.0))
    }

    pub fn add(&self, other: &Tensor3) -> Self {
        debug_assert_eq!(self.shape, other.shape);
        Self {
            shape: self.shape,
            data: self.data.iter().zip(&other.data).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, other: &Tensor3) -> Self {
        debug_assert_eq!(self.shape, other.shape);
        Self {
            shape: self.shape,
            data: self.data.iter().zip(&other.data).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            shape: self.shape,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    /// `R[a][p][q] = Σ_{h,k} T[a][h][k] · left[h][p] · right[k][q]`.
    pub fn contract_last_two(&self, left: &DMatrix<f64>, right: &DMatrix<f64>) -> Self {
        let [d0, d1, d2] = self.shape;
        debug_assert_eq!(left.nrows(), d1);
        debug_assert_eq!(right.nrows(), d2);
        let (p_dim, q_dim) = (left.ncols(), right.ncols());
        let mut out = Self::zeros(d0, p_dim, q_dim);
        for a in 0..d0 {
            // first contract k against `right`, then h against `left`
            let mut half = vec![0.0; d1 * q_dim];
            for h in 0..d1 {
                for q in 0..q_dim {
                    let mut acc = 0.0;
                    for k in 0..d2 {
                        acc += self[(a, h, k)] * right[(k, q)];
                    }
                    half[h * q_dim + q] = acc;
                }
            }
            for p in 0..p_dim {
                for q in 0..q_dim {
                    let mut acc = 0.0;
                    for h in 0..d1 {
                        acc += left[(h, p)] * half[h * q_dim + q];
                    }
                    out[(a, p, q)] = acc;
                }
            }
        }
        out
    }

    /// `R[a][i][j] = Σ_h m[a][h] · T[h][i][j]`.
    pub fn left_mul(m: &DMatrix<f64>, t: &Tensor3) -> Self {
        let [d0, d1, d2] = t.shape;
        debug_assert_eq!(m.ncols(), d0);
        Self::from_fn(m.nrows(), d1, d2, |a, i, j| {
            (0..d0).map(|h| m[(a, h)] * t[(h, i, j)]).sum()
        })
    }

    /// Keeps the listed first-index slices, in order.
    pub fn select_first(&self, rows: &[usize]) -> Self {
        let [_, d1, d2] = self.shape;
        Self::from_fn(rows.len(), d1, d2, |a, i, j| self[(rows[a], i, j)])
    }

    /// Inverse of [`select_first`](Self::select_first) over a partition:
    /// rows listed in `first` come from `top`, the rest from `rest`.
    pub fn interleave_first(top: &Tensor3, first: &[usize], rest: &Tensor3, others: &[usize]) -> Self {
        let [_, d1, d2] = top.shape;
        let n = first.len() + others.len();
        let mut out = Self::zeros(n, d1, d2);
        for (k, &row) in first.iter().enumerate() {
            for i in 0..d1 {
                for j in 0..d2 {
                    out[(row, i, j)] = top[(k, i, j)];
                }
            }
        }
        for (k, &row) in others.iter().enumerate() {
            for i in 0..d1 {
                for j in 0..d2 {
                    out[(row, i, j)] = rest[(k, i, j)];
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize, usize)> for Tensor3 {
    type Output = f64;

    #[inline]
    fn index(&self, (a, i, j): (usize, usize, usize)) -> &f64 {
        let [_, d1, d2] = self.shape;
        &self.data[(a * d1 + i) * d2 + j]
    }
}

impl std::ops::IndexMut<(usize, usize, usize)> for Tensor3 {
    #[inline]
    fn index_mut(&mut self, (a, i, j): (usize, usize, usize)) -> &mut f64 {
        let [_, d1, d2] = self.shape;
        &mut self.data[(a * d1 + i) * d2 + j]
    }
}

pub fn select_rows(a: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    a.select_rows(rows.iter())
}

/// Row indices in `0..n` not listed in `rows` (which must be sorted).
pub fn complement(rows: &[usize], n: usize) -> Vec<usize> {
    (0..n).filter(|r| rows.binary_search(r).is_err()).collect()
}

/// Places the rows of `top` at `first` and the rows of `rest` at `others`.
pub fn interleave_rows(top: &DMatrix<f64>, first: &[usize], rest: &DMatrix<f64>, others: &[usize]) -> DMatrix<f64> {
    let n = first.len() + others.len();
    let mut out = DMatrix::zeros(n, top.ncols());
    for (k, &row) in first.iter().enumerate() {
        out.set_row(row, &top.row(k));
    }
    for (k, &row) in others.iter().enumerate() {
        out.set_row(row, &rest.row(k));
    }
    out
}

fn is_integral(a: &DMatrix<f64>) -> bool {
    a.iter().all(|x| x.fract() == 0.0 && x.abs() <= 1e9)
}

/// Fraction-free elimination over `i128`; `None` on overflow.
fn exact_integer_rank(a: &DMatrix<f64>) -> Option<usize> {
    let (rows, cols) = a.shape();
    let mut m: Vec<Vec<i128>> = (0..rows)
        .map(|r| (0..cols).map(|c| a[(r, c)] as i128).collect())
        .collect();
    let mut rank = 0;
    let mut prev: i128 = 1;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let num = m[r][c]
                    .checked_mul(m[rank][col])?
                    .checked_sub(m[r][col].checked_mul(m[rank][c])?)?;
                m[r][c] = num / prev;
            }
            m[r][col] = 0;
        }
        prev = m[rank][col];
        rank += 1;
    }
    Some(rank)
}

pub fn singular_values(a: &DMatrix<f64>) -> Option<DVector<f64>> {
    if a.is_empty() || !all_finite(a.as_slice()) {
        return None;
    }
    SVD::try_new(a.clone(), false, false, f64::EPSILON, 1000).map(|svd| svd.singular_values)
}

/// Numerical rank: singular values above `tol · max(1, σ_max)`, or exact
/// elimination when every entry is a (moderate) integer.
pub fn rank(a: &DMatrix<f64>, tol: f64) -> usize {
    if a.is_empty() || !all_finite(a.as_slice()) {
        return 0;
    }
    if is_integral(a) {
        if let Some(r) = exact_integer_rank(a) {
            return r;
        }
    }
    let Some(sv) = singular_values(a) else {
        return 0;
    };
    let threshold = tol * sv.max().max(1.0);
    sv.iter().filter(|&&s| s > threshold).count()
}

/// Rank against an absolute singular-value threshold (exact for integers).
fn rank_abs(a: &DMatrix<f64>, threshold: f64) -> usize {
    if is_integral(a) {
        if let Some(r) = exact_integer_rank(a) {
            return r;
        }
    }
    singular_values(a).map_or(0, |sv| sv.iter().filter(|&&s| s > threshold).count())
}

/// Greedy lexicographically-first set of linearly independent rows,
/// stopping once `a.ncols()` rows have been found.
pub fn pivot_rows(a: &DMatrix<f64>, tol: f64) -> Vec<usize> {
    let want = a.ncols();
    let Some(smax) = singular_values(a).map(|sv| sv.max()) else {
        return Vec::new();
    };
    let threshold = tol * smax.max(1.0);
    let mut chosen: Vec<usize> = Vec::with_capacity(want);
    for r in 0..a.nrows() {
        if chosen.len() == want {
            break;
        }
        chosen.push(r);
        if rank_abs(&select_rows(a, &chosen), threshold) < chosen.len() {
            chosen.pop();
        }
    }
    chosen
}

/// Reduced column echelon form of a full-column-rank `n x m` matrix and
/// its pivot rows. The pivot rows of the result hold the identity exactly.
pub fn column_echelon(a: &DMatrix<f64>, tol: f64) -> Result<(DMatrix<f64>, Vec<usize>)> {
    let pivots = pivot_rows(a, tol);
    if pivots.len() < a.ncols() {
        return Err(JetError::Precondition(format!(
            "matrix has rank {} < {}",
            pivots.len(),
            a.ncols()
        )));
    }
    let block = select_rows(a, &pivots);
    let inv = invert(&block, "pivot block")?;
    let mut p = a * inv;
    for (k, &row) in pivots.iter().enumerate() {
        for c in 0..p.ncols() {
            p[(row, c)] = if c == k { 1.0 } else { 0.0 };
        }
    }
    Ok((p, pivots))
}

/// Inverse of a square matrix; fails when `|det| <= DET_FLOOR`.
pub fn invert(a: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(JetError::Dimension(format!(
            "{what} is {}x{}, not square",
            a.nrows(),
            a.ncols()
        )));
    }
    if !all_finite(a.as_slice()) {
        return Err(JetError::Invalid(format!("{what} has non-finite entries")));
    }
    let det = a.determinant();
    if det.abs() <= DET_FLOOR {
        return Err(JetError::Singular(format!("{what} (det = {det:e})")));
    }
    a.clone()
        .try_inverse()
        .ok_or_else(|| JetError::Singular(what.to_string()))
}

/// `rhs · a⁻¹` through an LU solve, with the same admissibility checks as
/// [`invert`].
pub fn right_divide(rhs: &DMatrix<f64>, a: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    invert(a, what)?;
    if rhs.ncols() != a.nrows() {
        return Err(JetError::Dimension(format!(
            "cannot divide a {}-column matrix by {what}",
            rhs.ncols()
        )));
    }
    a.transpose()
        .lu()
        .solve(&rhs.transpose())
        .map(|x| x.transpose())
        .ok_or_else(|| JetError::Singular(what.to_string()))
}

/// `|det(B)| / Π ‖row_k(B)‖` in `[0, 1]`; zero when a row vanishes.
pub fn hadamard_ratio(block: &DMatrix<f64>) -> f64 {
    let norms: f64 = block.row_iter().map(|r| r.norm()).product();
    if norms == 0.0 || !norms.is_finite() {
        return 0.0;
    }
    block.determinant().abs() / norms
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn lex_subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut next = if k <= n { Some((0..k).collect::<Vec<_>>()) } else { None };
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut idx = current.clone();
        let mut pos = k;
        while pos > 0 {
            pos -= 1;
            if idx[pos] < n - k + pos {
                idx[pos] += 1;
                for q in pos + 1..k {
                    idx[q] = idx[q - 1] + 1;
                }
                next = Some(idx);
                break;
            }
        }
        Some(current)
    })
}
