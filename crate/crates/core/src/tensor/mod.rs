//! Dense complex operators over labeled tensor factors.
//!
//! Every factor is a [`SiteLabel`]: a lattice site together with whether it
//! is the physical qudit or its ancilla copy. Operators keep their factors in
//! canonical order (all physical sites ascending, then all ancillas
//! ascending), and row/column indices factorize row-major over that order.

mod basis;
mod json;
pub mod linalg;
mod vector;

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use basis::{weyl_basis, weyl_operator};
pub use json::MatrixJson;
pub use linalg::{HermitianEigen, Svd};
pub use vector::{Density, LowRank, StateVector};

pub type C64 = nalgebra::Complex<f64>;

/// Default cap on the side length of any dense operator.
pub const DEFAULT_DENSE_CAP: usize = 1 << 14;

static DENSE_CAP: OnceLock<AtomicUsize> = OnceLock::new();

fn cap_cell() -> &'static AtomicUsize {
    DENSE_CAP.get_or_init(|| {
        let cap = std::env::var("QCA_DENSE_CAP")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_DENSE_CAP);
        AtomicUsize::new(cap)
    })
}

/// Largest allowed side length of a dense operator. Initialized from the
/// `QCA_DENSE_CAP` environment variable when set.
pub fn dense_cap() -> usize {
    cap_cell().load(Ordering::Relaxed)
}

pub fn set_dense_cap(cap: usize) {
    cap_cell().store(cap, Ordering::Relaxed);
}

pub(crate) fn check_cap(dim: usize) -> Result<()> {
    let cap = dense_cap();
    if dim > cap {
        return Err(Error::DimensionCap { requested: dim, cap });
    }
    Ok(())
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SiteKind {
    Physical,
    Ancilla,
}

/// One tensor factor: a lattice site (row-major index) and its kind.
///
/// The derived ordering puts every physical label before every ancilla.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteLabel {
    pub kind: SiteKind,
    pub site: usize,
}

impl SiteLabel {
    pub fn physical(site: usize) -> Self {
        SiteLabel { kind: SiteKind::Physical, site }
    }

    pub fn ancilla(site: usize) -> Self {
        SiteLabel { kind: SiteKind::Ancilla, site }
    }

    pub fn is_ancilla(&self) -> bool {
        self.kind == SiteKind::Ancilla
    }

    /// The same site with the other kind.
    pub fn partner(&self) -> Self {
        match self.kind {
            SiteKind::Physical => SiteLabel::ancilla(self.site),
            SiteKind::Ancilla => SiteLabel::physical(self.site),
        }
    }
}

impl fmt::Display for SiteLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SiteKind::Physical => write!(f, "{}", self.site),
            SiteKind::Ancilla => write!(f, "{}'", self.site),
        }
    }
}

impl std::str::FromStr for SiteLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, ancilla) = match s.strip_suffix('\'') {
            Some(body) => (body, true),
            None => (s, false),
        };
        let site = body
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("bad site label `{s}`")))?;
        Ok(if ancilla { SiteLabel::ancilla(site) } else { SiteLabel::physical(site) })
    }
}

impl Serialize for SiteLabel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SiteLabel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Index(usize),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Index(site) => Ok(SiteLabel::physical(site)),
            Raw::Text(text) => text.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Physical labels for a set of sites.
pub fn physical_labels<'a>(sites: impl IntoIterator<Item = &'a usize>) -> Vec<SiteLabel> {
    sites.into_iter().map(|&s| SiteLabel::physical(s)).collect()
}

/// Ancilla labels for a set of sites.
pub fn ancilla_labels<'a>(sites: impl IntoIterator<Item = &'a usize>) -> Vec<SiteLabel> {
    sites.into_iter().map(|&s| SiteLabel::ancilla(s)).collect()
}

/// Row-major strides for a list of factor dimensions.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut out = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        out[k] = out[k + 1] * dims[k + 1];
    }
    out
}

/// Linear offsets contributed by a subset of factors, enumerated row-major
/// over `positions` in the order given.
pub(crate) fn offsets(dims: &[usize], positions: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &p in positions {
        let mut next = Vec::with_capacity(out.len() * dims[p]);
        for &base in &out {
            for digit in 0..dims[p] {
                next.push(base + digit * st[p]);
            }
        }
        out = next;
    }
    out
}

fn label_list(labels: &[SiteLabel]) -> String {
    labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
}

/// A complex operator acting on the tensor product of its support factors.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    support: Vec<SiteLabel>,
    dims: Vec<usize>,
    data: DMatrix<C64>,
}

impl DenseOperator {
    /// Builds an operator whose factors are listed in `support` order; the
    /// result is re-sorted into canonical order.
    pub fn new(support: Vec<SiteLabel>, dims: Vec<usize>, data: DMatrix<C64>) -> Result<Self> {
        if support.len() != dims.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels but {} dimensions",
                support.len(),
                dims.len()
            )));
        }
        let dim: usize = dims.iter().product();
        check_cap(dim)?;
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {}x{}, factors need {dim}x{dim}",
                data.nrows(),
                data.ncols()
            )));
        }
        let mut order: Vec<usize> = (0..support.len()).collect();
        order.sort_by_key(|&k| support[k]);
        if order.windows(2).any(|w| support[w[0]] == support[w[1]]) {
            return Err(Error::OverlappingSupport(label_list(&support)));
        }
        if order.iter().enumerate().all(|(i, &k)| i == k) {
            return Ok(DenseOperator { support, dims, data });
        }
        let data = permute_matrix(&data, &dims, &order);
        let support = order.iter().map(|&k| support[k]).collect();
        let dims = order.iter().map(|&k| dims[k]).collect();
        Ok(DenseOperator { support, dims, data })
    }

    pub fn from_fn(
        support: Vec<SiteLabel>,
        dims: Vec<usize>,
        f: impl FnMut(usize, usize) -> C64,
    ) -> Result<Self> {
        let dim: usize = dims.iter().product();
        check_cap(dim)?;
        DenseOperator::new(support, dims, DMatrix::from_fn(dim, dim, f))
    }

    pub fn identity(support: Vec<SiteLabel>, dims: Vec<usize>) -> Result<Self> {
        let dim: usize = dims.iter().product();
        check_cap(dim)?;
        DenseOperator::new(support, dims, DMatrix::identity(dim, dim))
    }

    pub fn zeros(support: Vec<SiteLabel>, dims: Vec<usize>) -> Result<Self> {
        let dim: usize = dims.iter().product();
        check_cap(dim)?;
        DenseOperator::new(support, dims, DMatrix::zeros(dim, dim))
    }

    /// Operator with empty support, i.e. a number.
    pub fn scalar(value: C64) -> Self {
        DenseOperator { support: Vec::new(), dims: Vec::new(), data: DMatrix::from_element(1, 1, value) }
    }

    /// Identity on `labels`, each of local dimension `d`.
    pub fn identity_on(labels: &[SiteLabel], d: usize) -> Result<Self> {
        DenseOperator::identity(labels.to_vec(), vec![d; labels.len()])
    }

    /// Single-factor operator.
    pub fn on_site(label: SiteLabel, matrix: DMatrix<C64>) -> Result<Self> {
        let d = matrix.nrows();
        DenseOperator::new(vec![label], vec![d], matrix)
    }

    pub fn support(&self) -> &[SiteLabel] {
        &self.support
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<C64> {
        self.data
    }

    /// Side length of the matrix.
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// Renames the factors positionally; the result is re-canonicalized.
    pub fn relabel(&self, labels: &[SiteLabel]) -> Result<Self> {
        if labels.len() != self.support.len() {
            return Err(Error::SupportMismatch(format!(
                "cannot rename [{}] to [{}]",
                label_list(&self.support),
                label_list(labels)
            )));
        }
        DenseOperator::new(labels.to_vec(), self.dims.clone(), self.data.clone())
    }

    pub fn dim_of(&self, label: SiteLabel) -> Option<usize> {
        self.support.iter().position(|&l| l == label).map(|k| self.dims[k])
    }

    pub(crate) fn positions(&self, labels: &[SiteLabel]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|l| {
                self.support.iter().position(|s| s == l).ok_or_else(|| {
                    Error::SupportMismatch(format!("{l} is not in the support [{}]", label_list(&self.support)))
                })
            })
            .collect()
    }

    fn same_support(&self, other: &DenseOperator) -> Result<()> {
        if self.support != other.support || self.dims != other.dims {
            return Err(Error::SupportMismatch(format!(
                "[{}] vs [{}]",
                label_list(&self.support),
                label_list(&other.support)
            )));
        }
        Ok(())
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn adjoint(&self) -> Self {
        DenseOperator { support: self.support.clone(), dims: self.dims.clone(), data: self.data.adjoint() }
    }

    /// Full transpose in the computational basis.
    pub fn transpose(&self) -> Self {
        DenseOperator { support: self.support.clone(), dims: self.dims.clone(), data: self.data.transpose() }
    }

    pub fn scale(&self, factor: C64) -> Self {
        DenseOperator { support: self.support.clone(), dims: self.dims.clone(), data: &self.data * factor }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(c(factor, 0.0))
    }

    pub fn add(&self, other: &DenseOperator) -> Result<Self> {
        self.same_support(other)?;
        Ok(DenseOperator { support: self.support.clone(), dims: self.dims.clone(), data: &self.data + &other.data })
    }

    pub fn sub(&self, other: &DenseOperator) -> Result<Self> {
        self.same_support(other)?;
        Ok(DenseOperator { support: self.support.clone(), dims: self.dims.clone(), data: &self.data - &other.data })
    }

    /// Matrix product `self · other` on a common support.
    pub fn matmul(&self, other: &DenseOperator) -> Result<Self> {
        self.same_support(other)?;
        Ok(DenseOperator { support: self.support.clone(), dims: self.dims.clone(), data: &self.data * &other.data })
    }

    /// Relative Frobenius distance `‖self − other‖ / max(1, ‖other‖)`.
    pub fn distance(&self, other: &DenseOperator) -> Result<f64> {
        self.same_support(other)?;
        Ok((&self.data - &other.data).norm() / other.frobenius_norm().max(1.0))
    }

    pub fn approx_eq(&self, other: &DenseOperator, tol: f64) -> bool {
        self.distance(other).is_ok_and(|dist| dist <= tol)
    }

    /// Tensor product on the union of two disjoint supports.
    pub fn tensor_product(&self, other: &DenseOperator) -> Result<Self> {
        let shared: Vec<SiteLabel> = self.support.iter().filter(|l| other.support.contains(l)).copied().collect();
        if !shared.is_empty() {
            return Err(Error::OverlappingSupport(label_list(&shared)));
        }
        check_cap(self.dim() * other.dim())?;
        let data = self.data.kronecker(&other.data);
        let support = self.support.iter().chain(&other.support).copied().collect();
        let dims = self.dims.iter().chain(&other.dims).copied().collect();
        DenseOperator::new(support, dims, data)
    }

    /// Partial trace over `traced`, which must be a subset of the support.
    pub fn partial_trace(&self, traced: &[SiteLabel]) -> Result<Self> {
        let traced_pos = self.positions(traced)?;
        let keep_pos: Vec<usize> = (0..self.support.len()).filter(|p| !traced_pos.contains(p)).collect();
        let keep_off = offsets(&self.dims, &keep_pos);
        let trace_off = offsets(&self.dims, &traced_pos);
        let n = self.dim();
        let k = keep_off.len();
        let src = self.data.as_slice();
        let mut out = DMatrix::<C64>::zeros(k, k);
        {
            let dst = out.as_mut_slice();
            for (j, &oj) in keep_off.iter().enumerate() {
                for &t in &trace_off {
                    let col = (oj + t) * n + t;
                    for (i, &oi) in keep_off.iter().enumerate() {
                        dst[j * k + i] += src[col + oi];
                    }
                }
            }
        }
        Ok(DenseOperator {
            support: keep_pos.iter().map(|&p| self.support[p]).collect(),
            dims: keep_pos.iter().map(|&p| self.dims[p]).collect(),
            data: out,
        })
    }

    /// Partial trace onto `keep`.
    pub fn reduce_to(&self, keep: &[SiteLabel]) -> Result<Self> {
        self.positions(keep)?;
        let traced: Vec<SiteLabel> = self.support.iter().filter(|l| !keep.contains(l)).copied().collect();
        self.partial_trace(&traced)
    }

    /// `tr_traced(self · other)` without forming the full product.
    pub fn partial_trace_of_product(&self, other: &DenseOperator, traced: &[SiteLabel]) -> Result<Self> {
        self.same_support(other)?;
        let traced_pos = self.positions(traced)?;
        let keep_pos: Vec<usize> = (0..self.support.len()).filter(|p| !traced_pos.contains(p)).collect();
        let keep_off = offsets(&self.dims, &keep_pos);
        let trace_off = offsets(&self.dims, &traced_pos);
        let n = self.dim();
        let k = keep_off.len();
        // rows of self restricted to the kept/traced split, and columns of other
        let mut out = DMatrix::<C64>::zeros(k, k);
        for &t in &trace_off {
            let left = DMatrix::from_fn(k, n, |i, m| self.data[(keep_off[i] + t, m)]);
            let right = DMatrix::from_fn(n, k, |m, j| other.data[(m, keep_off[j] + t)]);
            out += left * right;
        }
        Ok(DenseOperator {
            support: keep_pos.iter().map(|&p| self.support[p]).collect(),
            dims: keep_pos.iter().map(|&p| self.dims[p]).collect(),
            data: out,
        })
    }

    /// Extends the operator to `support` by tensoring identities on the
    /// missing factors (each of dimension `d`).
    pub fn embed(&self, support: &[SiteLabel], d: usize) -> Result<Self> {
        let missing: Vec<SiteLabel> = support.iter().filter(|l| !self.support.contains(l)).copied().collect();
        if self.support.iter().any(|l| !support.contains(l)) {
            return Err(Error::SupportMismatch(format!(
                "[{}] is not contained in [{}]",
                label_list(&self.support),
                label_list(support)
            )));
        }
        if missing.is_empty() {
            return Ok(self.clone());
        }
        self.tensor_product(&DenseOperator::identity_on(&missing, d)?)
    }

    /// Re-expresses the operator with its factors in `order` (a permutation
    /// of the support). The result is a raw matrix since it is not canonical.
    pub fn matrix_in_order(&self, order: &[SiteLabel]) -> Result<DMatrix<C64>> {
        if order.len() != self.support.len() {
            return Err(Error::SupportMismatch("order must list every factor".into()));
        }
        let pos = self.positions(order)?;
        Ok(permute_matrix(&self.data, &self.dims, &pos))
    }

    /// Frobenius norm of the anti-Hermitian part relative to the operator.
    pub fn hermiticity_deviation(&self) -> f64 {
        (&self.data - self.data.adjoint()).norm() / self.frobenius_norm().max(1.0)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    fn require_hermitian(&self, tol: f64) -> Result<()> {
        let deviation = self.hermiticity_deviation();
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }

    /// Eigendecomposition of a Hermitian operator (descending eigenvalues).
    pub fn eigh(&self) -> Result<HermitianEigen> {
        self.require_hermitian(crate::EPS_NUM)?;
        Ok(linalg::eigh(&self.data))
    }

    /// Eigenvalues of a Hermitian operator in descending order.
    pub fn eigvalsh(&self) -> Result<Vec<f64>> {
        self.require_hermitian(crate::EPS_NUM)?;
        Ok(linalg::eigvalsh(&self.data))
    }

    /// Hermitian and no eigenvalue below `-tol · max(1, ‖self‖_F)`.
    pub fn is_psd(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        let floor = -tol * self.frobenius_norm().max(1.0);
        linalg::eigvalsh(&self.data).last().is_none_or(|&min| min >= floor)
    }

    /// Largest singular value.
    pub fn op_norm_inf(&self) -> f64 {
        if self.is_hermitian(crate::EPS_NUM) {
            let values = linalg::eigvalsh(&self.data);
            return values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        }
        linalg::singular_values(&self.data).first().copied().unwrap_or(0.0)
    }

    /// `tr(self† · other)`
    pub fn inner(&self, other: &DenseOperator) -> Result<C64> {
        self.same_support(other)?;
        Ok(self.data.iter().zip(other.data.iter()).map(|(a, b)| a.conj() * b).sum())
    }
}

/// Reorders the factors of a square matrix: factor `k` of the result is
/// factor `order[k]` of the input.
pub(crate) fn permute_matrix(data: &DMatrix<C64>, dims: &[usize], order: &[usize]) -> DMatrix<C64> {
    let map = offsets(dims, order);
    let n = map.len();
    let src = data.as_slice();
    let full = data.nrows();
    let mut out = DMatrix::<C64>::zeros(n, n);
    {
        let dst = out.as_mut_slice();
        for (j, &mj) in map.iter().enumerate() {
            let col = mj * full;
            for (i, &mi) in map.iter().enumerate() {
                dst[j * n + i] = src[col + mi];
            }
        }
    }
    out
}

/// Pauli matrices for qubits.
pub mod pauli {
    use nalgebra::DMatrix;

    use super::{c, C64};

    pub fn identity() -> DMatrix<C64> {
        DMatrix::identity(2, 2)
    }

    pub fn x() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    pub fn y() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
    }

    pub fn z() -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
    }
}
