//! Matrix-product representation of the augmented path tensor.
//!
//! Sites are ordered oldest first. Site `j` holds `T[l, a, r]` with `a` the
//! Liouville index of the path variable, stored as a `(4·left) × right`
//! matrix with row `a·left + l`. An overall scale is kept in log form so
//! that long propagations neither underflow nor overflow.

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par};
use num_complex::Complex64;

use super::liouville::{Superoperator, LIOUVILLE_DIM as D};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone)]
pub struct SiteTensor {
    left: usize,
    right: usize,
    data: Mat<Complex64>,
}

impl SiteTensor {
    pub fn from_fn(
        left: usize,
        right: usize,
        mut f: impl FnMut(usize, usize, usize) -> Complex64,
    ) -> Self {
        let data = Mat::from_fn(D * left, right, |row, r| f(row % left, row / left, r));
        Self { left, right, data }
    }

    fn from_matrix(left: usize, data: Mat<Complex64>) -> Self {
        debug_assert_eq!(data.nrows(), D * left);
        Self {
            left,
            right: data.ncols(),
            data,
        }
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn get(&self, l: usize, a: usize, r: usize) -> Complex64 {
        self.data[(a * self.left + l, r)]
    }

    /// The `left × right` slice for a fixed physical index.
    fn block(&self, a: usize) -> MatRef<'_, Complex64> {
        self.data
            .as_ref()
            .submatrix(a * self.left, 0, self.left, self.right)
    }

    /// `(left) × (a, r)` reshaping, conjugate-transposed.
    fn right_grouped_adjoint(&self) -> Mat<Complex64> {
        let (l, r) = (self.left, self.right);
        Mat::from_fn(D * r, l, |row, col| {
            self.data[((row / r) * l + col, row % r)].conj()
        })
    }

    /// Multiply every block from the right by `m` (`right × k`).
    fn absorb_right(&self, m: MatRef<'_, Complex64>) -> SiteTensor {
        let mut out = Mat::zeros(D * self.left, m.ncols());
        for a in 0..D {
            matmul(
                out.as_mut()
                    .submatrix_mut(a * self.left, 0, self.left, m.ncols()),
                Accum::Replace,
                self.block(a),
                m,
                ONE,
                Par::Seq,
            );
        }
        SiteTensor::from_matrix(self.left, out)
    }

    /// Multiply every block from the left by `m` (`k × left`).
    fn absorb_left(&self, m: MatRef<'_, Complex64>) -> SiteTensor {
        let k = m.nrows();
        let mut out = Mat::zeros(D * k, self.right);
        for a in 0..D {
            matmul(
                out.as_mut().submatrix_mut(a * k, 0, k, self.right),
                Accum::Replace,
                m,
                self.block(a),
                ONE,
                Par::Seq,
            );
        }
        SiteTensor::from_matrix(k, out)
    }

    fn is_finite(&self) -> bool {
        (0..self.data.ncols()).all(|c| self.data.col_as_slice(c).iter().all(|x| x.is_finite()))
    }
}

/// Bond cap reached while singular values above the cutoff remained.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BondCapExceeded {
    pub needed: usize,
    pub cap: usize,
}

impl From<BondCapExceeded> for Error {
    fn from(e: BondCapExceeded) -> Self {
        Error::Resource {
            message: format!("bond dimension {} needed, cap is {}", e.needed, e.cap),
            partial: None,
        }
    }
}

struct Truncated {
    u: Mat<Complex64>,
    sigma: Vec<f64>,
    vh: Mat<Complex64>,
    discarded: f64,
}

impl Truncated {
    fn svh(&self) -> Mat<Complex64> {
        Mat::from_fn(self.vh.nrows(), self.vh.ncols(), |i, j| {
            self.vh[(i, j)] * self.sigma[i]
        })
    }

    fn us(&self) -> Mat<Complex64> {
        Mat::from_fn(self.u.nrows(), self.u.ncols(), |i, j| {
            self.u[(i, j)] * self.sigma[j]
        })
    }
}

fn truncated_svd(
    m: MatRef<'_, Complex64>,
    cutoff: f64,
    max_bond: Option<usize>,
) -> std::result::Result<Truncated, Error> {
    let svd = m
        .thin_svd()
        .map_err(|e| Error::numerical(format!("SVD failed: {e:?}"), f64::NAN))?;
    let sigma: Vec<f64> = svd.S().column_vector().iter().map(|x| x.re).collect();
    let largest = sigma.first().copied().unwrap_or(0.0);
    let mut keep = sigma
        .iter()
        .take_while(|&&s| s > 0.0 && s >= cutoff * largest)
        .count()
        .max(1);
    if let Some(cap) = max_bond {
        if keep > cap {
            return Err(BondCapExceeded { needed: keep, cap }.into());
        }
    }
    keep = keep.min(sigma.len());
    let total: f64 = sigma.iter().map(|s| s * s).sum();
    let dropped: f64 = sigma[keep..].iter().map(|s| s * s).sum();
    let discarded = if total > 0.0 {
        (dropped / total).sqrt()
    } else {
        0.0
    };
    let u = svd.U().subcols(0, keep).to_owned();
    let v = svd.V();
    let vh = Mat::from_fn(keep, m.ncols(), |i, j| v[(j, i)].conj());
    Ok(Truncated {
        u,
        sigma: sigma[..keep].to_vec(),
        vh,
        discarded,
    })
}

/// Compressed augmented path tensor.
#[derive(Debug, Clone)]
pub struct PathState {
    sites: Vec<SiteTensor>,
    log_scale: f64,
    truncation_error: f64,
}

impl PathState {
    pub fn new(sites: Vec<SiteTensor>) -> Result<Self> {
        if let (Some(first), Some(last)) = (sites.first(), sites.last()) {
            if first.left != 1 || last.right != 1 {
                return Err(Error::Domain("boundary bond dimensions must be 1".into()));
            }
        }
        for w in sites.windows(2) {
            if w[0].right != w[1].left {
                return Err(Error::Domain(format!(
                    "bond mismatch: {} vs {}",
                    w[0].right, w[1].left
                )));
            }
        }
        Ok(Self {
            sites,
            log_scale: 0.0,
            truncation_error: 0.0,
        })
    }

    /// Product state from one Liouville vector per site.
    pub fn product(vectors: &[[Complex64; D]]) -> Self {
        let sites = vectors
            .iter()
            .map(|v| SiteTensor::from_fn(1, 1, |_, a, _| v[a]))
            .collect();
        Self {
            sites,
            log_scale: 0.0,
            truncation_error: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[SiteTensor] {
        &self.sites
    }

    /// Internal bond dimensions, `len() − 1` of them.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.sites.iter().skip(1).map(|s| s.left).collect()
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Accumulated relative discarded weight; never decreases.
    pub fn truncation_error(&self) -> f64 {
        self.truncation_error
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// Full tensor, site 0 as the most significant index. Only sensible for a
    /// handful of sites.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let scale = self.log_scale.exp();
        let mut partial: Vec<Vec<Complex64>> = vec![vec![Complex64::new(scale, 0.0)]];
        for site in &self.sites {
            let mut next = Vec::with_capacity(partial.len() * D);
            for row in &partial {
                for a in 0..D {
                    let v: Vec<Complex64> = (0..site.right)
                        .map(|r| (0..site.left).map(|l| row[l] * site.get(l, a, r)).sum())
                        .collect();
                    next.push(v);
                }
            }
            partial = next;
        }
        partial.into_iter().map(|v| v[0]).collect()
    }

    fn normalize_first(&mut self) {
        if let Some(first) = self.sites.first_mut() {
            let norm = first.data.norm_l2();
            if norm > 0.0 && norm.is_finite() {
                first.data = &first.data * faer::Scale(Complex64::new(1.0 / norm, 0.0));
                self.log_scale += norm.ln();
            }
        }
    }

    /// Bring every site except the first into right-canonical form, moving
    /// the norm into the first site's scale.
    fn right_canonicalize(&mut self) {
        for j in (1..self.sites.len()).rev() {
            let adj = self.sites[j].right_grouped_adjoint();
            let qr = adj.qr();
            let q = qr.compute_thin_Q();
            let r = qr.thin_R();
            let k = q.ncols();
            let right = self.sites[j].right;
            let site = Mat::from_fn(D * k, right, |row, rr| {
                q[((row / k) * right + rr, row % k)].conj()
            });
            self.sites[j] = SiteTensor::from_matrix(k, site);
            let r_adj = r.adjoint().to_owned();
            self.sites[j - 1] = self.sites[j - 1].absorb_right(r_adj.as_ref());
        }
        self.normalize_first();
    }

    /// Contract the oldest site with the trace vector and fold it into its
    /// neighbour.
    pub(crate) fn sum_out_oldest(&mut self) {
        if self.sites.len() < 2 {
            return;
        }
        let first = self.sites.remove(0);
        let v = Mat::from_fn(1, first.right, |_, r| {
            (0..D).map(|a| first.get(0, a, r)).sum()
        });
        self.sites[0] = self.sites[0].absorb_left(v.as_ref());
    }

    /// Sum over all path variables but the newest, giving its Liouville vector.
    pub(crate) fn open_end(&self) -> [Complex64; D] {
        let mut out = [ZERO; D];
        let Some((last, rest)) = self.sites.split_last() else {
            return out;
        };
        let mut env = vec![ONE];
        for site in rest {
            let mut next = vec![ZERO; site.right];
            for a in 0..D {
                for (r, acc) in next.iter_mut().enumerate() {
                    let col = site.data.col_as_slice(r);
                    let block = &col[a * site.left..(a + 1) * site.left];
                    *acc += block
                        .iter()
                        .zip(&env)
                        .map(|(x, e)| x * e)
                        .sum::<Complex64>();
                }
            }
            env = next;
        }
        let col = last.data.col_as_slice(0);
        let scale = self.log_scale.exp();
        for (a, o) in out.iter_mut().enumerate() {
            let block = &col[a * last.left..(a + 1) * last.left];
            *o = block
                .iter()
                .zip(&env)
                .map(|(x, e)| x * e)
                .sum::<Complex64>()
                * scale;
        }
        out
    }

    /// Append the next path variable `b`.
    ///
    /// Site `j` of an `L`-site state sits at lag `k = L − j` from the new
    /// variable and is multiplied by `influence[k][b][a]`; the newest site
    /// additionally carries `propagator[b][a]`. The new site gets
    /// `self_weights[b]`. The product is compressed on the fly with
    /// singular-value truncation and then right-canonicalized.
    pub(crate) fn grow(
        &mut self,
        influence: &[Superoperator],
        propagator: &Superoperator,
        self_weights: &[Complex64; D],
        cutoff: f64,
        max_bond: Option<usize>,
    ) -> Result<()> {
        let len = self.sites.len();
        debug_assert!(influence.len() > len);
        let mut carry = Mat::from_fn(1, D, |_, _| ONE);
        let mut new_sites = Vec::with_capacity(len + 1);
        let mut discarded = 0.0;
        for (j, site) in self.sites.iter().enumerate() {
            let k = len - j;
            let (cl, cr, cp) = (site.left, site.right, carry.nrows());
            let mut w = Mat::<Complex64>::zeros(D * cp, D * cr);
            for b in 0..D {
                let rb = carry.as_ref().submatrix(0, b * cl, cp, cl);
                for a in 0..D {
                    let mut f = influence[k][b][a];
                    if k == 1 {
                        f *= propagator[b][a];
                    }
                    if f == ZERO {
                        continue;
                    }
                    matmul(
                        w.as_mut().submatrix_mut(a * cp, b * cr, cp, cr),
                        Accum::Replace,
                        rb,
                        site.block(a),
                        f,
                        Par::Seq,
                    );
                }
            }
            let t = truncated_svd(w.as_ref(), cutoff, max_bond)?;
            discarded += t.discarded;
            carry = t.svh();
            new_sites.push(SiteTensor::from_matrix(cp, t.u));
        }
        let m = carry.nrows();
        let last = Mat::from_fn(D * m, 1, |row, _| {
            carry[(row % m, row / m)] * self_weights[row / m]
        });
        new_sites.push(SiteTensor::from_matrix(m, last));
        self.sites = new_sites;
        self.truncation_error += discarded;
        self.right_canonicalize();
        if !self.sites.iter().all(SiteTensor::is_finite) {
            return Err(Error::numerical("non-finite path tensor entries", f64::NAN));
        }
        Ok(())
    }
}

/// Canonical two-sweep compression: a QR sweep to left-canonical form, then
/// a truncating SVD sweep from the right. Bond dimensions never grow; the
/// relative discarded weight of every truncation is added to the state's
/// accumulated error.
pub fn compress(state: PathState, svd_cutoff: f64, max_bond: Option<usize>) -> Result<PathState> {
    if !(0.0..1.0).contains(&svd_cutoff) {
        return Err(Error::Domain(format!(
            "svd_cutoff must lie in [0, 1), got {svd_cutoff}"
        )));
    }
    let mut state = state;
    let n = state.sites.len();
    for j in 0..n.saturating_sub(1) {
        let qr = state.sites[j].data.qr();
        let q = qr.compute_thin_Q();
        let r = qr.thin_R().to_owned();
        let left = state.sites[j].left;
        state.sites[j] = SiteTensor::from_matrix(left, q);
        state.sites[j + 1] = state.sites[j + 1].absorb_left(r.as_ref());
    }
    let mut discarded = 0.0;
    for j in (1..n).rev() {
        let site = &state.sites[j];
        let (l, r) = (site.left, site.right);
        let m = site.right_grouped_adjoint().adjoint().to_owned();
        let t = truncated_svd(m.as_ref(), svd_cutoff, max_bond)?;
        discarded += t.discarded;
        let k = t.u.ncols();
        let vh = &t.vh;
        // vh is k × (a, r); store as (a·k + c) × r.
        let right_site = Mat::from_fn(D * k, r, |row, rr| vh[(row % k, (row / k) * r + rr)]);
        state.sites[j] = SiteTensor::from_matrix(k, right_site);
        debug_assert_eq!(t.u.nrows(), l);
        state.sites[j - 1] = state.sites[j - 1].absorb_right(t.us().as_ref());
    }
    state.truncation_error += discarded;
    state.normalize_first();
    Ok(state)
}
