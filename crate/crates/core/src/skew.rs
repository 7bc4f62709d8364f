//! Real canonical form of antisymmetric matrices.
//!
//! A real antisymmetric `A` is brought to antisymmetric tridiagonal form
//! `T = Qᵀ A Q` by Householder reflections. `i T` is Hermitian and is
//! diagonally similar to `−S`, where `S` is the real symmetric tridiagonal
//! matrix with zero diagonal and the same off-diagonal. Diagonalizing `S`
//! with implicit QL therefore yields the spectrum `±ε_k` of `iA` and, with
//! vectors, a real orthogonal `O` such that
//!
//! ```text
//! A = O · diag([[0, ε_k], [−ε_k, 0]]) · Oᵀ,   ε_k ≥ 0.
//! ```

use nalgebra::DMatrix;

/// Reduce the antisymmetric `n × n` row-major matrix `a` to tridiagonal form.
///
/// Only the strictly lower triangle of `a` is read; it is destroyed. Returns
/// the sub-diagonal `T[k+1][k]` (length `n − 1`, or empty for `n ≤ 1`) and,
/// when `want_q` is set, the row-major orthogonal `Q` with `A = Q T Qᵀ`.
pub(crate) fn tridiagonalize(a: &mut [f64], n: usize, want_q: bool) -> (Vec<f64>, Option<Vec<f64>>) {
    debug_assert_eq!(a.len(), n * n);
    if n <= 1 {
        return (Vec::new(), want_q.then(|| vec![1.0; n]));
    }
    let mut sub = vec![0.0; n - 1];
    let mut reflectors: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];

    for k in 0..n - 1 {
        let r0 = k + 1;
        let m = n - r0;
        // Householder vector annihilating a[r0+1.., k].
        // The tail norm is summed separately: `norm² − x0²` cancels when
        // the tail is small.
        let mut tail2 = 0.0;
        for i in 0..m {
            let x = a[(r0 + i) * n + k];
            v[i] = x;
            if i > 0 {
                tail2 += x * x;
            }
        }
        let x0 = v[0];
        if m == 1 || tail2 <= f64::MIN_POSITIVE {
            sub[k] = x0;
            if want_q {
                reflectors.push((Vec::new(), 0.0));
            }
            continue;
        }
        let norm = (x0 * x0 + tail2).sqrt();
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        v[0] = x0 - alpha;
        let beta = 2.0 / (tail2 + v[0] * v[0]);
        sub[k] = alpha;

        // p = β · A_sub · v using the lower triangle only.
        let v = &v[..m];
        let p = &mut p[..m];
        p.fill(0.0);
        for i in 1..m {
            let row = &a[(r0 + i) * n + r0..(r0 + i) * n + r0 + i];
            let vi = v[i];
            let mut acc = 0.0;
            for ((aij, vj), pj) in row.iter().zip(&v[..i]).zip(p[..i].iter_mut()) {
                acc += aij * vj;
                *pj -= aij * vi;
            }
            p[i] += acc;
        }
        for pi in p.iter_mut() {
            *pi *= beta;
        }
        // A_sub ← A_sub + v pᵀ − p vᵀ
        for i in 1..m {
            let (vi, pi) = (v[i], p[i]);
            let row = &mut a[(r0 + i) * n + r0..(r0 + i) * n + r0 + i];
            for ((aij, vj), pj) in row.iter_mut().zip(&v[..i]).zip(&p[..i]) {
                *aij += vi * pj - pi * vj;
            }
        }
        if want_q {
            reflectors.push((v.to_vec(), beta));
        }
    }

    let q = want_q.then(|| {
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            q[i * n + i] = 1.0;
        }
        // Q = P_0 P_1 ⋯ ; apply from the last reflector backwards.
        let mut w = vec![0.0; n];
        for (k, (v, beta)) in reflectors.iter().enumerate().rev() {
            if *beta == 0.0 {
                continue;
            }
            let r0 = k + 1;
            // Q[r0.., :] ← (I − β v vᵀ) Q[r0.., :]
            w.fill(0.0);
            for (i, vi) in v.iter().enumerate() {
                let row = &q[(r0 + i) * n..(r0 + i + 1) * n];
                for (wj, qij) in w.iter_mut().zip(row) {
                    *wj += vi * qij;
                }
            }
            for (i, vi) in v.iter().enumerate() {
                let s = beta * vi;
                let row = &mut q[(r0 + i) * n..(r0 + i + 1) * n];
                for (qij, wj) in row.iter_mut().zip(&w) {
                    *qij -= s * wj;
                }
            }
        }
        q
    });
    (sub, q)
}

/// Householder vector for column `k`: fills `v[..n−k−1]`, writes the
/// resulting sub-diagonal entry and returns `β` (zero when no reflection is
/// needed).
fn reflector(a: &[f64], n: usize, k: usize, v: &mut [f64], sub: &mut f64) -> f64 {
    let r0 = k + 1;
    let m = n - r0;
    let mut tail2 = 0.0;
    for i in 0..m {
        let x = a[(r0 + i) * n + k];
        v[i] = x;
        if i > 0 {
            tail2 += x * x;
        }
    }
    let x0 = v[0];
    if m == 1 || tail2 <= f64::MIN_POSITIVE {
        *sub = x0;
        return 0.0;
    }
    let norm = (x0 * x0 + tail2).sqrt();
    let alpha = if x0 >= 0.0 { -norm } else { norm };
    v[0] = x0 - alpha;
    *sub = alpha;
    2.0 / (tail2 + v[0] * v[0])
}

/// `p = β · A[r0.., r0..] · v` from the strict lower triangle.
fn lower_matvec(a: &[f64], n: usize, r0: usize, v: &[f64], beta: f64, p: &mut [f64]) {
    let m = v.len();
    let p = &mut p[..m];
    p.fill(0.0);
    for i in 1..m {
        let row = &a[(r0 + i) * n + r0..(r0 + i) * n + r0 + i];
        let vi = v[i];
        let mut acc = 0.0;
        for ((aij, vj), pj) in row.iter().zip(&v[..i]).zip(p[..i].iter_mut()) {
            acc += aij * vj;
            *pj -= aij * vi;
        }
        p[i] += acc;
    }
    for pi in p.iter_mut() {
        *pi *= beta;
    }
}

/// One row of the fused pass: `a += vi·p − pi·v`, then returns `a · w` and
/// does `q −= wi · a`. Four independent partial sums let the dot product
/// vectorize.
#[allow(clippy::too_many_arguments)]
#[inline]
fn fused_row(
    row: &mut [f64],
    v: &[f64],
    p: &[f64],
    w: &[f64],
    q: &mut [f64],
    vi: f64,
    pi: f64,
    wi: f64,
) -> f64 {
    let len = row.len();
    let (v, p, w, q) = (&v[..len], &p[..len], &w[..len], &mut q[..len]);
    let mut acc = [0.0; 4];
    let split = len - len % 4;
    for j0 in (0..split).step_by(4) {
        for l in 0..4 {
            let j = j0 + l;
            let x = row[j] + vi * p[j] - pi * v[j];
            row[j] = x;
            acc[l] += x * w[j];
            q[j] -= x * wi;
        }
    }
    let mut tail = 0.0;
    for j in split..len {
        let x = row[j] + vi * p[j] - pi * v[j];
        row[j] = x;
        tail += x * w[j];
        q[j] -= x * wi;
    }
    (acc[0] + acc[2]) + (acc[1] + acc[3]) + tail
}

/// Sub-diagonal of the tridiagonal form, without `Q`.
///
/// Same reduction as [`tridiagonalize`], but the rank-2 update of step `k`
/// and the product `A v` of step `k + 1` share one pass over the trailing
/// triangle, which halves the memory traffic on large blocks.
fn tridiagonal_fused(a: &mut [f64], n: usize) -> Vec<f64> {
    if n <= 1 {
        return Vec::new();
    }
    let mut sub = vec![0.0; n - 1];
    let (mut v, mut p) = (vec![0.0; n], vec![0.0; n]);
    let (mut vn, mut pn) = (vec![0.0; n], vec![0.0; n]);
    let mut beta = reflector(a, n, 0, &mut v, &mut sub[0]);
    let mut have_p = false;
    for k in 0..n - 1 {
        let r0 = k + 1;
        let m = n - r0;
        let last = k + 2 >= n;
        if beta == 0.0 {
            if !last {
                beta = reflector(a, n, k + 1, &mut v, &mut sub[k + 1]);
                have_p = false;
            }
            continue;
        }
        if !have_p {
            lower_matvec(a, n, r0, &v[..m], beta, &mut p);
        }
        // Column r0 of the update first: it defines the next reflector.
        for i in 1..m {
            a[(r0 + i) * n + r0] += v[i] * p[0] - p[i] * v[0];
        }
        if last {
            break;
        }
        let beta_n = reflector(a, n, k + 1, &mut vn, &mut sub[k + 1]);
        if beta_n != 0.0 {
            pn[..m - 1].fill(0.0);
        }
        for i in 2..m {
            let (vi, pi, wi) = (v[i], p[i], vn[i - 1]);
            let row = &mut a[(r0 + i) * n + r0 + 1..(r0 + i) * n + r0 + i];
            if beta_n != 0.0 {
                pn[i - 1] += fused_row(row, &v[1..i], &p[1..i], &vn[..i - 1], &mut pn[..i - 1], vi, pi, wi);
            } else {
                for (aij, (vj, pj)) in row.iter_mut().zip(v[1..i].iter().zip(&p[1..i])) {
                    *aij += vi * pj - pi * vj;
                }
            }
        }
        std::mem::swap(&mut v, &mut vn);
        if beta_n != 0.0 {
            for q in pn[..m - 1].iter_mut() {
                *q *= beta_n;
            }
            std::mem::swap(&mut p, &mut pn);
            have_p = true;
        } else {
            have_p = false;
        }
        beta = beta_n;
    }
    sub
}

/// Eigenvalues (and optionally eigenvectors) of the symmetric tridiagonal
/// matrix with diagonal `d` and off-diagonal `e` (`e[i]` couples `i, i+1`),
/// by implicit QL with Wilkinson shifts.
///
/// On return `d` holds the eigenvalues (unsorted) and, if given, row `i` of
/// the row-major `zt` holds the eigenvector of `d[i]` (it must be initialised
/// to the identity).
pub(crate) fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], mut zt: Option<&mut [f64]>) {
    let n = d.len();
    if n == 0 {
        return;
    }
    debug_assert!(e.len() >= n - 1);
    let mut off = vec![0.0; n];
    off[..n - 1].copy_from_slice(&e[..n - 1]);
    let e = &mut off;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 200 {
                log::warn!("tridiagonal QL did not converge at index {l}");
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = zt.as_deref_mut() {
                    let (lo, hi) = z.split_at_mut((i + 1) * n);
                    let zi = &mut lo[i * n..];
                    let zi1 = &mut hi[..n];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let f = *b;
                        *b = s * *a + c * f;
                        *a = c * *a - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Nonnegative values `ε_k` (`n/2` of them, ascending) such that the spectrum
/// of `i·A` is `{±ε_k}`, for an antisymmetric row-major `n × n` matrix.
/// The lower triangle of `a` is destroyed.
pub(crate) fn skew_spectrum_in_place(a: &mut [f64], n: usize) -> Vec<f64> {
    let sub = tridiagonal_fused(a, n);
    let mut d = vec![0.0; n];
    let mut e = sub;
    tridiagonal_ql(&mut d, &mut e, None);
    d.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    // The spectrum is symmetric; average each ± pair.
    (0..n / 2)
        .map(|k| 0.5 * (d[n - 1 - k].abs() + d[k].abs()))
        .rev()
        .collect()
}

/// Nonnegative symplectic values of an antisymmetric matrix (ascending).
pub fn skew_spectrum(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut buf = row_major(a);
    skew_spectrum_in_place(&mut buf, n)
}

fn row_major(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut buf = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            buf[i * n + j] = a[(i, j)];
        }
    }
    buf
}

/// `A = O · diag([[0, ε_k], [−ε_k, 0]]) · Oᵀ` with the kernel split off.
///
/// Columns `2k, 2k+1` of `basis` are the pair `(p_k, q_k)` with
/// `p_kᵀ A q_k = ε_k > threshold`; the last `kernel_dim` columns span the
/// (numerical) kernel of `A`.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    energies: Vec<f64>,
    basis: DMatrix<f64>,
    kernel_dim: usize,
}

impl CanonicalForm {
    /// Decompose the antisymmetric `a`; values `ε ≤ threshold` are treated as
    /// zero modes.
    pub fn new(a: &DMatrix<f64>, threshold: f64) -> Self {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "canonical form needs a square matrix");
        assert!(n % 2 == 0, "canonical form needs an even dimension");
        if n == 0 {
            return Self {
                energies: Vec::new(),
                basis: DMatrix::zeros(0, 0),
                kernel_dim: 0,
            };
        }
        let mut buf = row_major(a);
        let (sub, q) = tridiagonalize(&mut buf, n, true);
        let q = q.expect("reflectors requested");
        let q = DMatrix::from_row_slice(n, n, &q);

        // S has off-diagonal T[k][k+1] = −T[k+1][k].
        let mut d = vec![0.0; n];
        let mut e: Vec<f64> = sub.iter().map(|t| -t).collect();
        let mut zt = vec![0.0; n * n];
        for i in 0..n {
            zt[i * n + i] = 1.0;
        }
        tridiagonal_ql(&mut d, &mut e, Some(&mut zt));
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| d[x].partial_cmp(&d[y]).unwrap_or(std::cmp::Ordering::Equal));

        let half = n / 2;
        let n_pairs = order[..half].iter().filter(|&&i| -d[i] > threshold).count();
        let kernel_half = half - n_pairs;

        // Eigenvector z of S ↦ v = D z of iT (D = diag(iᵏ)); real and
        // imaginary parts give the real pair.
        let phase_re = [1.0, 0.0, -1.0, 0.0];
        let phase_im = [0.0, 1.0, 0.0, -1.0];
        let split = |idx: usize| {
            let z = &zt[idx * n..(idx + 1) * n];
            let re = DMatrix::from_fn(n, 1, |k, _| z[k] * phase_re[k % 4]);
            let im = DMatrix::from_fn(n, 1, |k, _| z[k] * phase_im[k % 4]);
            (re, im)
        };

        let mut raw = DMatrix::<f64>::zeros(n, 2 * n_pairs);
        let mut energies = Vec::with_capacity(n_pairs);
        for (slot, &idx) in order[..n_pairs].iter().enumerate() {
            let (re, im) = split(idx);
            raw.set_column(2 * slot, &re.column(0));
            raw.set_column(2 * slot + 1, &im.column(0));
            energies.push(-d[idx]);
        }
        let mut pairs = &q * raw * std::f64::consts::SQRT_2;
        for slot in 0..n_pairs {
            let u1 = pairs.column(2 * slot).clone_owned();
            let u2 = pairs.column(2 * slot + 1).clone_owned();
            let orient = u1.dot(&(a * &u2));
            if orient < 0.0 {
                pairs.set_column(2 * slot, &u2);
                pairs.set_column(2 * slot + 1, &u1);
            }
        }

        let kernel_dim = 2 * kernel_half;
        let kernel = if kernel_dim > 0 {
            let mut cand = DMatrix::<f64>::zeros(n, 2 * kernel_dim);
            for (slot, &idx) in order[half - kernel_half..half + kernel_half].iter().enumerate() {
                let (re, im) = split(idx);
                cand.set_column(2 * slot, &re.column(0));
                cand.set_column(2 * slot + 1, &im.column(0));
            }
            orthonormal_columns(&(&q * cand), kernel_dim)
        } else {
            DMatrix::zeros(n, 0)
        };

        let mut basis = DMatrix::<f64>::zeros(n, n);
        basis.columns_mut(0, 2 * n_pairs).copy_from(&pairs);
        basis.columns_mut(2 * n_pairs, kernel_dim).copy_from(&kernel);
        Self {
            energies,
            basis,
            kernel_dim,
        }
    }

    /// `ε_k` of the regular pairs, in the order of the basis columns
    /// (descending).
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn n_pairs(&self) -> usize {
        self.energies.len()
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_dim
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Orthonormal basis of the zero-mode subspace.
    pub fn kernel(&self) -> DMatrix<f64> {
        let n = self.basis.nrows();
        self.basis
            .columns(n - self.kernel_dim, self.kernel_dim)
            .clone_owned()
    }
}

/// Modified Gram–Schmidt over the candidate columns, keeping the first
/// `want` independent directions.
fn orthonormal_columns(cand: &DMatrix<f64>, want: usize) -> DMatrix<f64> {
    let n = cand.nrows();
    let mut out: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(want);
    // Try the best-conditioned candidates first.
    let mut idx: Vec<usize> = (0..cand.ncols()).collect();
    idx.sort_by(|&x, &y| {
        cand.column(y)
            .norm()
            .partial_cmp(&cand.column(x).norm())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    for pass_tol in [0.5, 1e-3, 1e-8] {
        for &c in &idx {
            if out.len() == want {
                break;
            }
            let mut w = cand.column(c).clone_owned();
            let norm0 = w.norm();
            if norm0 == 0.0 {
                continue;
            }
            for _ in 0..2 {
                for u in &out {
                    let proj = u.dot(&w);
                    w.axpy(-proj, u, 1.0);
                }
            }
            let norm = w.norm();
            if norm > pass_tol * norm0 {
                out.push(w / norm);
            }
        }
    }
    // Complete with unit vectors if the candidates were rank deficient.
    for k in 0..n {
        if out.len() == want {
            break;
        }
        let mut w = nalgebra::DVector::<f64>::zeros(n);
        w[k] = 1.0;
        for _ in 0..2 {
            for u in &out {
                let proj = u.dot(&w);
                w.axpy(-proj, u, 1.0);
            }
        }
        let norm = w.norm();
        if norm > 1e-6 {
            out.push(w / norm);
        }
    }
    DMatrix::from_columns(&out)
}
