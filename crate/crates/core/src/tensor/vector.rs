//! Pure states, low-rank positive operators, and the common reduced-state
//! interface used by the entropy and classification code.

use nalgebra::{DMatrix, DVector};

use super::{c, check_cap, linalg, offsets, DenseOperator, SiteLabel, C64};
use crate::error::{Error, Result};

fn positions_in(labels: &[SiteLabel], wanted: &[SiteLabel]) -> Result<Vec<usize>> {
    wanted
        .iter()
        .map(|w| {
            labels
                .iter()
                .position(|l| l == w)
                .ok_or_else(|| Error::SupportMismatch(format!("{w} is not a factor of the state")))
        })
        .collect()
}

fn sorted(labels: &[SiteLabel]) -> Vec<SiteLabel> {
    let mut out = labels.to_vec();
    out.sort();
    out
}

/// A vector over labeled factors. Unlike [`DenseOperator`], the factor order
/// is whatever the caller chose; this is what lets the PEPU construction keep
/// its vector in interleaved (site, ancilla) order.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    labels: Vec<SiteLabel>,
    dims: Vec<usize>,
    data: DVector<C64>,
}

impl StateVector {
    pub fn new(labels: Vec<SiteLabel>, dims: Vec<usize>, data: DVector<C64>) -> Result<Self> {
        if labels.len() != dims.len() {
            return Err(Error::ShapeMismatch("one dimension per label".into()));
        }
        if sorted(&labels).windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::OverlappingSupport("repeated label in state".into()));
        }
        let dim: usize = dims.iter().product();
        if data.len() != dim {
            return Err(Error::ShapeMismatch(format!("vector has {} entries, factors need {dim}", data.len())));
        }
        Ok(StateVector { labels, dims, data })
    }

    /// Tensor product of single-factor vectors, in the given order.
    pub fn product(labels: Vec<SiteLabel>, locals: &[DVector<C64>]) -> Result<Self> {
        if labels.len() != locals.len() {
            return Err(Error::ShapeMismatch("one local vector per label".into()));
        }
        let mut data = DVector::from_element(1, c(1.0, 0.0));
        for v in locals {
            data = data.kronecker(v);
        }
        let dims = locals.iter().map(|v| v.len()).collect();
        StateVector::new(labels, dims, data)
    }

    /// Computational basis state; `digits` lists one basis index per factor.
    pub fn basis(labels: Vec<SiteLabel>, dims: Vec<usize>, digits: &[usize]) -> Result<Self> {
        let locals: Vec<DVector<C64>> = dims
            .iter()
            .zip(digits)
            .map(|(&d, &k)| {
                let mut v = DVector::zeros(d);
                v[k] = c(1.0, 0.0);
                v
            })
            .collect();
        StateVector::product(labels, &locals)
    }

    pub fn labels(&self) -> &[SiteLabel] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &DVector<C64> {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn scale(&self, factor: C64) -> Self {
        StateVector { labels: self.labels.clone(), dims: self.dims.clone(), data: &self.data * factor }
    }

    pub fn normalized(&self) -> Self {
        self.scale(c(1.0 / self.norm(), 0.0))
    }

    /// `⟨self|other⟩`, after aligning factor orders.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        let other = other.reordered(&self.labels)?;
        Ok(self.data.dotc(&other.data))
    }

    /// Applies an operator whose support is a subset of the factors.
    pub fn apply(&self, op: &DenseOperator) -> Result<Self> {
        let pos = positions_in(&self.labels, op.support())?;
        for (&p, &d) in pos.iter().zip(op.dims()) {
            if self.dims[p] != d {
                return Err(Error::ShapeMismatch(format!("factor {} has dimension {}", self.labels[p], self.dims[p])));
            }
        }
        let rest: Vec<usize> = (0..self.labels.len()).filter(|p| !pos.contains(p)).collect();
        let local = offsets(&self.dims, &pos);
        let outer = offsets(&self.dims, &rest);
        let m = op.data();
        let mut out = DVector::<C64>::zeros(self.data.len());
        let mut buf = DVector::<C64>::zeros(local.len());
        for &base in &outer {
            for (k, &off) in local.iter().enumerate() {
                buf[k] = self.data[base + off];
            }
            let res = m * &buf;
            for (k, &off) in local.iter().enumerate() {
                out[base + off] = res[k];
            }
        }
        Ok(StateVector { labels: self.labels.clone(), dims: self.dims.clone(), data: out })
    }

    /// Same vector with factors in `order` (a permutation of the labels).
    pub fn reordered(&self, order: &[SiteLabel]) -> Result<Self> {
        if order.len() != self.labels.len() {
            return Err(Error::SupportMismatch("order must list every factor".into()));
        }
        let pos = positions_in(&self.labels, order)?;
        let map = offsets(&self.dims, &pos);
        let data = DVector::from_iterator(map.len(), map.iter().map(|&i| self.data[i]));
        Ok(StateVector { labels: order.to_vec(), dims: pos.iter().map(|&p| self.dims[p]).collect(), data })
    }

    /// Coefficient matrix with rows indexed by `left` (in the given order)
    /// and columns by the remaining factors (in their current order).
    pub fn split(&self, left: &[SiteLabel]) -> Result<DMatrix<C64>> {
        let pos = positions_in(&self.labels, left)?;
        let rest: Vec<usize> = (0..self.labels.len()).filter(|p| !pos.contains(p)).collect();
        let rows = offsets(&self.dims, &pos);
        let cols = offsets(&self.dims, &rest);
        Ok(DMatrix::from_fn(rows.len(), cols.len(), |i, j| self.data[rows[i] + cols[j]]))
    }

    /// Squared Schmidt coefficients across the cut `left | rest`, descending.
    pub fn schmidt_spectrum(&self, left: &[SiteLabel]) -> Result<Vec<f64>> {
        let m = self.split(left)?;
        Ok(linalg::singular_values(&m).into_iter().map(|s| s * s).collect())
    }

    /// `|ψ⟩⟨ψ|` as a canonical operator.
    pub fn to_density(&self) -> Result<DenseOperator> {
        check_cap(self.data.len())?;
        DenseOperator::new(self.labels.clone(), self.dims.clone(), &self.data * self.data.adjoint())
    }

    pub fn as_low_rank(&self) -> LowRank {
        LowRank {
            labels: self.labels.clone(),
            dims: self.dims.clone(),
            factor: DMatrix::from_column_slice(self.data.len(), 1, self.data.as_slice()),
        }
    }
}

/// The positive operator `F F†`, stored through its factor `F` whose columns
/// are vectors over `labels` (in that order).
#[derive(Clone, Debug)]
pub struct LowRank {
    labels: Vec<SiteLabel>,
    dims: Vec<usize>,
    factor: DMatrix<C64>,
}

impl LowRank {
    pub fn new(labels: Vec<SiteLabel>, dims: Vec<usize>, factor: DMatrix<C64>) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if labels.len() != dims.len() || factor.nrows() != dim {
            return Err(Error::ShapeMismatch(format!("factor has {} rows, factors need {dim}", factor.nrows())));
        }
        Ok(LowRank { labels, dims, factor })
    }

    pub fn factor(&self) -> &DMatrix<C64> {
        &self.factor
    }

    pub fn rank_bound(&self) -> usize {
        self.factor.ncols()
    }

    /// Gram matrix `F† F`, which shares the nonzero spectrum of `F F†`.
    pub fn gram(&self) -> DMatrix<C64> {
        self.factor.adjoint() * &self.factor
    }

    pub fn to_dense(&self) -> Result<DenseOperator> {
        check_cap(self.factor.nrows())?;
        DenseOperator::new(self.labels.clone(), self.dims.clone(), &self.factor * self.factor.adjoint())
    }

    /// Matrix `G` with `tr_rest(F F†) = G G†`, rows indexed by `keep` in
    /// canonical order.
    fn reduced_factor(&self, keep: &[SiteLabel]) -> Result<(Vec<SiteLabel>, Vec<usize>, DMatrix<C64>)> {
        let keep = sorted(keep);
        let pos = positions_in(&self.labels, &keep)?;
        let rest: Vec<usize> = (0..self.labels.len()).filter(|p| !pos.contains(p)).collect();
        let rows = offsets(&self.dims, &pos);
        let cols = offsets(&self.dims, &rest);
        let rank = self.factor.ncols();
        let width = cols.len();
        let g = DMatrix::from_fn(rows.len(), rank * width, |i, j| {
            let (k, col) = (j / width, j % width);
            self.factor[(rows[i] + cols[col], k)]
        });
        let dims = pos.iter().map(|&p| self.dims[p]).collect();
        Ok((keep, dims, g))
    }
}

/// A positive operator that can be reduced onto subsets of its factors.
/// Implemented by dense operators, pure states and low-rank factors, so
/// entropies never need to materialize a large operator.
pub trait Density {
    /// Factor labels in canonical order.
    fn support(&self) -> Vec<SiteLabel>;

    fn dim_of(&self, label: SiteLabel) -> Option<usize>;

    fn trace(&self) -> f64;

    /// Partial trace onto `keep`.
    fn reduced(&self, keep: &[SiteLabel]) -> Result<DenseOperator>;

    /// Eigenvalues of the reduction onto `keep`, descending. Zero
    /// eigenvalues may be omitted.
    fn reduced_spectrum(&self, keep: &[SiteLabel]) -> Result<Vec<f64>> {
        self.reduced(keep)?.eigvalsh()
    }
}

impl Density for DenseOperator {
    fn support(&self) -> Vec<SiteLabel> {
        DenseOperator::support(self).to_vec()
    }

    fn dim_of(&self, label: SiteLabel) -> Option<usize> {
        DenseOperator::dim_of(self, label)
    }

    fn trace(&self) -> f64 {
        DenseOperator::trace(self).re
    }

    fn reduced(&self, keep: &[SiteLabel]) -> Result<DenseOperator> {
        self.reduce_to(keep)
    }
}

impl Density for LowRank {
    fn support(&self) -> Vec<SiteLabel> {
        sorted(&self.labels)
    }

    fn dim_of(&self, label: SiteLabel) -> Option<usize> {
        self.labels.iter().position(|&l| l == label).map(|k| self.dims[k])
    }

    fn trace(&self) -> f64 {
        self.factor.norm_squared()
    }

    fn reduced(&self, keep: &[SiteLabel]) -> Result<DenseOperator> {
        let (labels, dims, g) = self.reduced_factor(keep)?;
        check_cap(g.nrows())?;
        DenseOperator::new(labels, dims, &g * g.adjoint())
    }

    fn reduced_spectrum(&self, keep: &[SiteLabel]) -> Result<Vec<f64>> {
        let (_, _, g) = self.reduced_factor(keep)?;
        let small = if g.nrows() <= g.ncols() { &g * g.adjoint() } else { g.adjoint() * &g };
        Ok(linalg::eigvalsh(&small))
    }
}

impl Density for StateVector {
    fn support(&self) -> Vec<SiteLabel> {
        sorted(&self.labels)
    }

    fn dim_of(&self, label: SiteLabel) -> Option<usize> {
        self.labels.iter().position(|&l| l == label).map(|k| self.dims[k])
    }

    fn trace(&self) -> f64 {
        self.data.norm_squared()
    }

    fn reduced(&self, keep: &[SiteLabel]) -> Result<DenseOperator> {
        self.as_low_rank().reduced(keep)
    }

    fn reduced_spectrum(&self, keep: &[SiteLabel]) -> Result<Vec<f64>> {
        if keep.is_empty() {
            return Ok(vec![self.data.norm_squared()]);
        }
        self.schmidt_spectrum(&sorted(keep))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use crate::tensor::pauli;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(site: usize) -> SiteLabel {
        SiteLabel::physical(site)
    }

    #[test]
    fn apply_matches_embedded_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let labels = vec![p(0), SiteLabel::ancilla(0), p(1)];
        let psi = StateVector::new(labels.clone(), vec![2, 2, 2], sampling::random_vector(&mut rng, 8)).unwrap();
        let u = DenseOperator::new(vec![p(1), p(0)], vec![2, 2], sampling::random_matrix(&mut rng, 4)).unwrap();
        let direct = psi.apply(&u).unwrap();
        // oracle: embed to the full canonical support and multiply densely
        let full = u.embed(&sorted(&labels), 2).unwrap();
        let canon = psi.reordered(full.support()).unwrap();
        let expected = full.data() * canon.data();
        let got = direct.reordered(full.support()).unwrap();
        assert!((got.data() - expected).norm() < 1e-12);
    }

    #[test]
    fn reductions_agree_across_representations() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let labels = vec![p(2), p(0), SiteLabel::ancilla(1)];
        let factor = DMatrix::from_fn(8, 3, |_, _| sampling::gaussian(&mut rng));
        let low = LowRank::new(labels.clone(), vec![2, 2, 2], factor).unwrap();
        let dense = low.to_dense().unwrap();
        for keep in [vec![p(0)], vec![p(2), SiteLabel::ancilla(1)], vec![]] {
            let a = low.reduced(&keep).unwrap();
            let b = dense.reduce_to(&keep).unwrap();
            assert!(a.approx_eq(&b, 1e-12));
            let sa = low.reduced_spectrum(&keep).unwrap();
            let sb = b.eigvalsh().unwrap();
            for (x, y) in sa.iter().zip(&sb) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn schmidt_spectrum_of_bell_pair() {
        let mut v = DVector::zeros(4);
        v[0] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        v[3] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let bell = StateVector::new(vec![p(0), p(1)], vec![2, 2], v).unwrap();
        let s = bell.schmidt_spectrum(&[p(1)]).unwrap();
        assert!((s[0] - 0.5).abs() < 1e-14 && (s[1] - 0.5).abs() < 1e-14);
        let x = DenseOperator::on_site(p(0), pauli::x()).unwrap();
        let flipped = bell.apply(&x).unwrap();
        assert!(bell.inner(&flipped).unwrap().norm() < 1e-15);
    }
}
