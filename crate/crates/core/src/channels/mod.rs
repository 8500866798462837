//! Channels on a lattice, held through their Choi states.
//!
//! The Choi state of `E` is `R = (E ⊗ id)(|Φ⟩⟨Φ|)` with
//! `|Φ⟩ = Σ_s |s⟩_V |s⟩_{V'}`, so `tr R = d^N` and `tr_V R = 1_{V'}`.
//! A channel built from Kraus operators keeps them and exposes `R` through
//! the low-rank factor `[vec K_1, …, vec K_k]`; the dense `R` is only formed
//! on request.

pub mod builtin;
pub mod circuit;
pub mod spec;

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::tensor::{
    ancilla_labels, c, check_cap, linalg, physical_labels, Density, DenseOperator, LowRank, SiteLabel,
    StateVector, C64,
};

pub use circuit::{gates, Circuit, Gate};
pub use spec::ChannelSpec;

/// Physical labels of every site, in canonical order.
pub fn physical(lattice: &Lattice) -> Vec<SiteLabel> {
    physical_labels(&lattice.sites())
}

/// Ancilla labels of every site, in canonical order.
pub fn ancillas(lattice: &Lattice) -> Vec<SiteLabel> {
    ancilla_labels(&lattice.sites())
}

/// `V ∪ V'` in canonical order.
pub fn doubled(lattice: &Lattice) -> Vec<SiteLabel> {
    let mut out = physical(lattice);
    out.extend(ancillas(lattice));
    out
}

/// The unnormalized maximally entangled vector `|Φ⟩ = Σ_s |s⟩_V |s⟩_{V'}`.
#[derive(Clone, Debug)]
pub struct MaxEntangledResource {
    lattice: Lattice,
    state: StateVector,
}

impl MaxEntangledResource {
    pub fn new(lattice: &Lattice) -> Result<Self> {
        let dim = lattice.hilbert_dim();
        check_cap(dim * dim)?;
        let mut data = DVector::zeros(dim * dim);
        for s in 0..dim {
            data[s * dim + s] = c(1.0, 0.0);
        }
        let labels = doubled(lattice);
        let dims = vec![lattice.local_dim(); labels.len()];
        Ok(MaxEntangledResource { lattice: lattice.clone(), state: StateVector::new(labels, dims, data)? })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// `|Φ⟩⟨Φ|`
    pub fn projector(&self) -> Result<DenseOperator> {
        self.state.to_density()
    }
}

#[derive(Clone, Debug)]
enum Representation {
    Kraus(Vec<DenseOperator>),
    Choi(DenseOperator),
}

/// The Choi state in whichever form is cheapest for the channel at hand.
#[derive(Clone, Debug)]
pub enum ChoiState<'a> {
    LowRank(LowRank),
    Dense(&'a DenseOperator),
}

impl Density for ChoiState<'_> {
    fn support(&self) -> Vec<SiteLabel> {
        match self {
            ChoiState::LowRank(f) => f.support(),
            ChoiState::Dense(r) => r.support().to_vec(),
        }
    }

    fn dim_of(&self, label: SiteLabel) -> Option<usize> {
        match self {
            ChoiState::LowRank(f) => f.dim_of(label),
            ChoiState::Dense(r) => r.dim_of(label),
        }
    }

    fn trace(&self) -> f64 {
        match self {
            ChoiState::LowRank(f) => Density::trace(f),
            ChoiState::Dense(r) => r.trace().re,
        }
    }

    fn reduced(&self, keep: &[SiteLabel]) -> Result<DenseOperator> {
        match self {
            ChoiState::LowRank(f) => f.reduced(keep),
            ChoiState::Dense(r) => r.reduce_to(keep),
        }
    }

    fn reduced_spectrum(&self, keep: &[SiteLabel]) -> Result<Vec<f64>> {
        match self {
            ChoiState::LowRank(f) => f.reduced_spectrum(keep),
            ChoiState::Dense(r) => r.reduce_to(keep)?.eigvalsh(),
        }
    }
}

/// A completely positive trace-preserving map on the lattice.
#[derive(Clone, Debug)]
pub struct Channel {
    lattice: Lattice,
    name: String,
    notes: Vec<String>,
    repr: Representation,
    cjs: OnceLock<DenseOperator>,
}

fn row_major(m: &DMatrix<C64>) -> Vec<C64> {
    m.transpose().as_slice().to_vec()
}

fn tp_deviation(lattice: &Lattice, kraus: &[DenseOperator]) -> f64 {
    let dim = lattice.hilbert_dim();
    let mut sum = DMatrix::<C64>::zeros(dim, dim);
    for k in kraus {
        sum += conjugate_by(&k.data().adjoint(), &DMatrix::identity(k.dim(), k.dim()));
    }
    (sum - DMatrix::<C64>::identity(dim, dim)).norm() / (dim as f64).sqrt()
}

impl Channel {
    /// Channel with Kraus operators `K_i`, each supported on physical sites
    /// and embedded on the full lattice.
    pub fn from_kraus(lattice: &Lattice, kraus: Vec<DenseOperator>) -> Result<Self> {
        let v = physical(lattice);
        check_cap(lattice.hilbert_dim())?;
        if kraus.is_empty() {
            return Err(Error::NotTracePreserving { deviation: 1.0 });
        }
        let embedded = kraus
            .iter()
            .map(|k| {
                if k.support().iter().any(|l| l.is_ancilla()) {
                    return Err(Error::SupportMismatch("Kraus operators act on physical sites only".into()));
                }
                k.embed(&v, lattice.local_dim())
            })
            .collect::<Result<Vec<_>>>()?;
        let deviation = tp_deviation(lattice, &embedded);
        if deviation > crate::EPS_NUM {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(Channel::raw(lattice, "kraus", Representation::Kraus(embedded)))
    }

    /// Channel from its Choi state, which must be Hermitian, positive and
    /// satisfy `tr_V R = 1_{V'}`.
    pub fn from_cjs(lattice: &Lattice, cjs: DenseOperator) -> Result<Self> {
        let labels = doubled(lattice);
        if cjs.support() != labels.as_slice() {
            return Err(Error::SupportMismatch("a Choi state must be supported on V ∪ V'".into()));
        }
        let deviation = cjs.hermiticity_deviation();
        if deviation > crate::EPS_NUM {
            return Err(Error::NotHermitian { deviation });
        }
        let marginal = cjs.partial_trace(&physical(lattice))?;
        let identity = DenseOperator::identity_on(&ancillas(lattice), lattice.local_dim())?;
        let deviation = marginal.sub(&identity)?.frobenius_norm() / (identity.dim() as f64).sqrt();
        if deviation > crate::EPS_NUM {
            return Err(Error::NotTracePreserving { deviation });
        }
        let min_eigenvalue = cjs.eigvalsh()?.last().copied().unwrap_or(0.0);
        if min_eigenvalue < -crate::EPS_NUM {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        let channel = Channel::raw(lattice, "cjs", Representation::Choi(cjs.clone()));
        let _ = channel.cjs.set(cjs);
        Ok(channel)
    }

    /// Unitary channel `ρ ↦ U ρ U†`.
    pub fn unitary(lattice: &Lattice, u: DenseOperator) -> Result<Self> {
        let embedded = u.embed(&physical(lattice), lattice.local_dim())?;
        let deviation = circuit::unitarity_deviation(embedded.data());
        if deviation > crate::EPS_NUM {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Channel::raw(lattice, "unitary", Representation::Kraus(vec![embedded])))
    }

    pub fn identity(lattice: &Lattice) -> Result<Self> {
        let id = DenseOperator::identity_on(&physical(lattice), lattice.local_dim())?;
        Ok(Channel::raw(lattice, "identity", Representation::Kraus(vec![id])))
    }

    fn raw(lattice: &Lattice, name: &str, repr: Representation) -> Self {
        Channel { lattice: lattice.clone(), name: name.into(), notes: Vec::new(), repr, cjs: OnceLock::new() }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Same channel viewed at another range `r` (only the lattice metadata
    /// changes).
    pub fn with_range(&self, range: usize) -> Result<Self> {
        let mut out = self.clone();
        out.lattice = self.lattice.with_range(range)?;
        Ok(out)
    }

    /// Kraus operators when the channel was built from them.
    pub fn stored_kraus(&self) -> Option<&[DenseOperator]> {
        match &self.repr {
            Representation::Kraus(k) => Some(k),
            Representation::Choi(_) => None,
        }
    }

    /// Kraus operators; derived from the eigendecomposition of `R` for
    /// channels given by their Choi state (Kraus rank = rank of `R`).
    pub fn kraus_operators(&self) -> Result<Vec<DenseOperator>> {
        match &self.repr {
            Representation::Kraus(k) => Ok(k.clone()),
            Representation::Choi(r) => {
                let dim = self.lattice.hilbert_dim();
                let eig = r.eigh()?;
                let floor = crate::EPS_NUM * r.trace().re.max(1.0);
                eig.values
                    .iter()
                    .enumerate()
                    .take_while(|(_, &lambda)| lambda > floor)
                    .map(|(k, &lambda)| {
                        let v = eig.vectors.column(k);
                        let scale = lambda.sqrt();
                        let m = DMatrix::from_fn(dim, dim, |s, t| v[s * dim + t] * scale);
                        DenseOperator::new(physical(&self.lattice), vec![self.lattice.local_dim(); self.lattice.num_sites()], m)
                    })
                    .collect()
            }
        }
    }

    /// The dense Choi state `R`, built once and cached.
    pub fn cjs(&self) -> Result<&DenseOperator> {
        if let Some(r) = self.cjs.get() {
            return Ok(r);
        }
        let dim = self.lattice.hilbert_dim();
        check_cap(dim * dim)?;
        let r = match &self.repr {
            Representation::Choi(r) => r.clone(),
            Representation::Kraus(kraus) => {
                let f = self.kraus_factor(kraus);
                DenseOperator::new(doubled(&self.lattice), vec![self.lattice.local_dim(); 2 * self.lattice.num_sites()], &f * f.adjoint())?
            }
        };
        Ok(self.cjs.get_or_init(|| r))
    }

    fn kraus_factor(&self, kraus: &[DenseOperator]) -> DMatrix<C64> {
        let dim = self.lattice.hilbert_dim();
        let mut f = DMatrix::zeros(dim * dim, kraus.len());
        for (i, k) in kraus.iter().enumerate() {
            f.column_mut(i).copy_from_slice(&row_major(k.data()));
        }
        f
    }

    /// The Choi state as a low-rank factor (Kraus channels) or a reference
    /// to the dense matrix.
    pub fn choi_state(&self) -> Result<ChoiState<'_>> {
        match &self.repr {
            Representation::Kraus(kraus) => {
                let labels = doubled(&self.lattice);
                let dims = vec![self.lattice.local_dim(); labels.len()];
                Ok(ChoiState::LowRank(LowRank::new(labels, dims, self.kraus_factor(kraus))?))
            }
            Representation::Choi(_) => Ok(ChoiState::Dense(self.cjs()?)),
        }
    }

    /// Eigenvalues of `R`, descending. For Kraus channels these come from the
    /// Gram matrix `⟨k_i|k_j⟩`, so only the (at most Kraus-count) nonzero
    /// part of the spectrum is returned.
    pub fn cjs_spectrum(&self) -> Result<Vec<f64>> {
        match &self.repr {
            Representation::Kraus(kraus) => {
                let f = self.kraus_factor(kraus);
                Ok(linalg::eigvalsh(&(f.adjoint() * f)))
            }
            Representation::Choi(r) => r.eigvalsh(),
        }
    }

    fn check_input(&self, op: &DenseOperator) -> Result<()> {
        if op.support() != physical(&self.lattice).as_slice() {
            return Err(Error::SupportMismatch(
                "operators passed to a channel must be supported on every physical site".into(),
            ));
        }
        Ok(())
    }

    /// `E(ρ)`. Through the Choi state this is `tr_{V'}(ρ^T_{V'} R)`, i.e.
    /// `E(ρ)[s,t] = Σ_{u,v} ρ[u,v] R[(s,u),(t,v)]`.
    pub fn apply(&self, rho: &DenseOperator) -> Result<DenseOperator> {
        self.check_input(rho)?;
        let out = match &self.repr {
            Representation::Kraus(kraus) => {
                let mut acc = DMatrix::<C64>::zeros(rho.dim(), rho.dim());
                for k in kraus {
                    acc += conjugate_by(k.data(), rho.data());
                }
                acc
            }
            Representation::Choi(r) => {
                let dim = rho.dim();
                let r = r.data();
                DMatrix::from_fn(dim, dim, |s, t| {
                    let mut acc = c(0.0, 0.0);
                    for v in 0..dim {
                        let col = r.column(t * dim + v);
                        for u in 0..dim {
                            acc += rho.data()[(u, v)] * col[s * dim + u];
                        }
                    }
                    acc
                })
            }
        };
        DenseOperator::new(rho.support().to_vec(), rho.dims().to_vec(), out)
    }

    /// `E†(X)`, the Heisenberg-picture action, with
    /// `E†(X)[v,u] = Σ_{s,t} X[t,s] R[(s,u),(t,v)]`.
    pub fn adjoint_apply(&self, x: &DenseOperator) -> Result<DenseOperator> {
        self.check_input(x)?;
        let out = match &self.repr {
            Representation::Kraus(kraus) => {
                let mut acc = DMatrix::<C64>::zeros(x.dim(), x.dim());
                for k in kraus {
                    acc += conjugate_by(&k.data().adjoint(), x.data());
                }
                acc
            }
            Representation::Choi(r) => {
                let dim = x.dim();
                let r = r.data();
                let mut acc = DMatrix::<C64>::zeros(dim, dim);
                for s in 0..dim {
                    for t in 0..dim {
                        let coeff = x.data()[(t, s)];
                        if coeff == c(0.0, 0.0) {
                            continue;
                        }
                        for v in 0..dim {
                            let col = r.column(t * dim + v);
                            for u in 0..dim {
                                acc[(v, u)] += coeff * col[s * dim + u];
                            }
                        }
                    }
                }
                acc
            }
        };
        DenseOperator::new(x.support().to_vec(), x.dims().to_vec(), out)
    }

    /// `Σ_i w_i E_i`. Kraus channels combine into a Kraus channel, anything
    /// else into a dense Choi state.
    pub fn convex_combine(weights: &[f64], channels: &[Channel]) -> Result<Channel> {
        if weights.len() != channels.len() || channels.is_empty() {
            return Err(Error::InvalidWeights(format!(
                "{} weights for {} channels",
                weights.len(),
                channels.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidWeights(format!("weight {w} is negative")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > crate::EPS_NUM {
            return Err(Error::InvalidWeights(format!("weights sum to {total}")));
        }
        let lattice = channels[0].lattice.clone();
        if channels.iter().any(|ch| ch.lattice != lattice) {
            return Err(Error::InvalidWeights("channels live on different lattices".into()));
        }
        let name = format!(
            "convex({})",
            weights.iter().zip(channels).map(|(w, ch)| format!("{w}*{}", ch.name)).collect::<Vec<_>>().join("+")
        );
        if channels.iter().all(|ch| ch.stored_kraus().is_some()) {
            let mut kraus = Vec::new();
            for (&w, ch) in weights.iter().zip(channels) {
                if w == 0.0 {
                    continue;
                }
                for k in ch.stored_kraus().unwrap_or_default() {
                    kraus.push(k.scale_real(w.sqrt()));
                }
            }
            return Ok(Channel::raw(&lattice, &name, Representation::Kraus(kraus)));
        }
        let mut acc: Option<DenseOperator> = None;
        for (&w, ch) in weights.iter().zip(channels) {
            let term = ch.cjs()?.scale_real(w);
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term)?,
            });
        }
        let r = acc.expect("at least one channel");
        Ok(Channel::from_cjs(&lattice, r)?.named(name))
    }

    /// `E_2 ∘ E_1` with `self = E_1`.
    pub fn then(&self, next: &Channel) -> Result<Channel> {
        if self.lattice != next.lattice {
            return Err(Error::SupportMismatch("channels live on different lattices".into()));
        }
        let first = self.kraus_operators()?;
        let second = next.kraus_operators()?;
        let mut kraus = Vec::with_capacity(first.len() * second.len());
        for b in &second {
            for a in &first {
                kraus.push(b.matmul(a)?);
            }
        }
        Ok(Channel::raw(&self.lattice, &format!("{}*{}", next.name, self.name), Representation::Kraus(kraus)))
    }

    /// Tensor product of local channels on disjoint physical supports,
    /// identity elsewhere. Each entry is a Kraus family on its support.
    pub fn local_product(lattice: &Lattice, parts: &[Vec<DenseOperator>]) -> Result<Channel> {
        let d = lattice.local_dim();
        let mut covered: Vec<SiteLabel> = Vec::new();
        for part in parts {
            let support = part.first().map(|k| k.support().to_vec()).unwrap_or_default();
            if part.iter().any(|k| k.support() != support.as_slice()) {
                return Err(Error::SupportMismatch("Kraus operators of one part must share a support".into()));
            }
            if support.iter().any(|l| l.is_ancilla() || covered.contains(l)) {
                return Err(Error::OverlappingSupport(format!("{support:?}")));
            }
            let dim: usize = support.iter().map(|_| d).product();
            let mut sum = DMatrix::<C64>::zeros(dim, dim);
            for k in part {
                sum += conjugate_by(&k.data().adjoint(), &DMatrix::identity(k.dim(), k.dim()));
            }
            let deviation = (sum - DMatrix::<C64>::identity(dim, dim)).norm() / (dim as f64).sqrt();
            if deviation > crate::EPS_NUM {
                return Err(Error::NotTracePreserving { deviation });
            }
            covered.extend(support);
        }
        let count: usize = parts.iter().map(|p| p.len()).product();
        if count <= 256 {
            let mut kraus = vec![DenseOperator::scalar(c(1.0, 0.0))];
            for part in parts {
                let mut next = Vec::with_capacity(kraus.len() * part.len());
                for k in &kraus {
                    for local in part {
                        next.push(k.tensor_product(local)?);
                    }
                }
                kraus = next;
            }
            return Channel::from_kraus(lattice, kraus);
        }
        // Dense Choi state as a product of local Choi states.
        let mut r = DenseOperator::scalar(c(1.0, 0.0));
        for part in parts {
            r = r.tensor_product(&local_cjs(part, d)?)?;
        }
        for label in physical(lattice) {
            if !covered.contains(&label) {
                let identity = DenseOperator::identity_on(&[label], d)?;
                r = r.tensor_product(&local_cjs(&[identity], d)?)?;
            }
        }
        Channel::from_cjs(lattice, r)
    }

    /// Second-largest over largest Choi eigenvalue test; returns the
    /// implemented unitary when `R` has rank one.
    pub fn unitary_operator(&self, tol: f64) -> Result<Option<DenseOperator>> {
        let spectrum = self.cjs_spectrum()?;
        let trace: f64 = self.lattice.hilbert_dim() as f64;
        if spectrum.get(1).copied().unwrap_or(0.0) > tol * trace {
            return Ok(None);
        }
        let kraus = self.kraus_operators()?;
        let u = match &self.repr {
            Representation::Choi(_) => kraus.into_iter().next(),
            Representation::Kraus(_) => {
                // all Kraus operators are proportional; combine along the top
                // eigenvector of the Gram matrix
                let f = self.kraus_factor(&kraus);
                let eig = linalg::eigh(&(f.adjoint() * &f));
                let v = eig.vectors.column(0);
                let mut acc = DenseOperator::zeros(physical(&self.lattice), vec![self.lattice.local_dim(); self.lattice.num_sites()])?;
                for (k, coeff) in kraus.iter().zip(v.iter()) {
                    acc = acc.add(&k.scale(*coeff))?;
                }
                Some(acc)
            }
        };
        let Some(u) = u else { return Ok(None) };
        let norm = u.frobenius_norm();
        if norm == 0.0 {
            return Ok(None);
        }
        let u = u.scale_real((self.lattice.hilbert_dim() as f64).sqrt() / norm);
        // fix the global phase so that the largest entry is real positive
        let pivot = u.data().iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or(c(1.0, 0.0));
        Ok(Some(u.scale(pivot.conj() / pivot.norm())))
    }

    /// Channel on `V` obtained from a unitary on `V ∪ V'` (given as a gate
    /// circuit) by preparing every ancilla in `ancilla_init` and tracing the
    /// ancillas out afterwards. The default initial state is the first
    /// computational basis state.
    pub fn dilated(lattice: &Lattice, circuit: &Circuit, ancilla_init: Option<&DVector<C64>>) -> Result<Channel> {
        let d = lattice.local_dim();
        let dim = lattice.hilbert_dim();
        check_cap(dim * dim)?;
        let init = init_state(d, ancilla_init)?;
        let labels = doubled(lattice);
        let mut columns = isometry_input(dim, &init, lattice.num_sites());
        circuit.apply_to_columns(&labels, d, &mut columns)?;
        Ok(Channel::from_isometry(lattice, &columns)?.named("dilated"))
    }

    /// As [`Channel::dilated`], with the doubled-lattice unitary given
    /// densely.
    pub fn dilated_from_unitary(
        lattice: &Lattice,
        unitary: &DenseOperator,
        ancilla_init: Option<&DVector<C64>>,
    ) -> Result<Channel> {
        let labels = doubled(lattice);
        let u = unitary.embed(&labels, lattice.local_dim())?;
        let deviation = circuit::unitarity_deviation(u.data());
        if deviation > crate::EPS_NUM {
            return Err(Error::NotUnitary { deviation });
        }
        let dim = lattice.hilbert_dim();
        let init = init_state(lattice.local_dim(), ancilla_init)?;
        let columns = u.data() * isometry_input(dim, &init, lattice.num_sites());
        Ok(Channel::from_isometry(lattice, &columns)?.named("dilated"))
    }

    /// Kraus operators `K_j[s,t] = W[(s,j), t]` of an isometry `W` from `V`
    /// into `V ∪ V'`.
    fn from_isometry(lattice: &Lattice, w: &DMatrix<C64>) -> Result<Channel> {
        let dim = lattice.hilbert_dim();
        let labels = physical(lattice);
        let dims = vec![lattice.local_dim(); labels.len()];
        let kraus = (0..dim)
            .map(|j| DMatrix::from_fn(dim, dim, |s, t| w[(s * dim + j, t)]))
            .filter(|k| k.norm() > crate::EPS_NUM)
            .map(|k| DenseOperator::new(labels.clone(), dims.clone(), k))
            .collect::<Result<Vec<_>>>()?;
        Channel::from_kraus(lattice, kraus)
    }
}

fn init_state(d: usize, init: Option<&DVector<C64>>) -> Result<DVector<C64>> {
    match init {
        None => {
            let mut v = DVector::zeros(d);
            v[0] = c(1.0, 0.0);
            Ok(v)
        }
        Some(v) if v.len() == d && (v.norm() - 1.0).abs() <= crate::EPS_NUM => Ok(v.clone()),
        Some(v) if v.len() != d => Err(Error::ShapeMismatch(format!("ancilla state has {} entries, expected {d}", v.len()))),
        Some(v) => Err(Error::NotNormalized { trace: v.norm_squared() }),
    }
}

/// Columns `|t⟩_V ⊗ |φ⟩^{⊗N}_{V'}` for every basis state `t`.
fn isometry_input(dim: usize, phi: &DVector<C64>, sites: usize) -> DMatrix<C64> {
    let mut ancilla = DVector::from_element(1, c(1.0, 0.0));
    for _ in 0..sites {
        ancilla = ancilla.kronecker(phi);
    }
    let mut out = DMatrix::zeros(dim * dim, dim);
    for t in 0..dim {
        for j in 0..dim {
            out[(t * dim + j, t)] = ancilla[j];
        }
    }
    out
}

/// Choi state of a local Kraus family on `support ∪ support'`.
fn local_cjs(kraus: &[DenseOperator], d: usize) -> Result<DenseOperator> {
    let support = kraus[0].support().to_vec();
    let dim = kraus[0].dim();
    let mut labels = support.clone();
    labels.extend(support.iter().map(|l| l.partner()));
    let mut r = DMatrix::<C64>::zeros(dim * dim, dim * dim);
    for k in kraus {
        let v = DVector::from_vec(row_major(k.data()));
        r += &v * v.adjoint();
    }
    DenseOperator::new(labels, vec![d; 2 * support.len()], r)
}

/// `k x k†`, skipping zero entries of `k` when it is sparse (Kraus operators
/// of local channels embedded in `V` mostly are).
fn conjugate_by(k: &DMatrix<C64>, x: &DMatrix<C64>) -> DMatrix<C64> {
    let n = k.nrows();
    let zero = c(0.0, 0.0);
    let nnz = k.iter().filter(|&&z| z != zero).count();
    if nnz * 8 > n * k.ncols() {
        return k * x * k.adjoint();
    }
    let entries: Vec<(usize, usize, C64)> = (0..k.ncols())
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .filter_map(|(i, j)| (k[(i, j)] != zero).then(|| (i, j, k[(i, j)])))
        .collect();
    // y = k x, then out = y k†
    let mut y = DMatrix::<C64>::zeros(n, x.ncols());
    for &(i, j, v) in &entries {
        for col in 0..x.ncols() {
            y[(i, col)] += v * x[(j, col)];
        }
    }
    let mut out = DMatrix::<C64>::zeros(n, n);
    for &(a, b, v) in &entries {
        let w = v.conj();
        for row in 0..n {
            out[(row, a)] += y[(row, b)] * w;
        }
    }
    out
}
