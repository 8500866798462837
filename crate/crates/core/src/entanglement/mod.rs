//! Entropies (in bits), mutual information and area-law audits.

mod audit;

use serde::{Deserialize, Serialize};

use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::lattice::SiteSet;
use crate::tensor::{ancilla_labels, physical_labels, Density, DenseOperator, SiteLabel, StateVector};

pub use audit::{audit_area_law, AreaLawRecord, AreaLawReport, AuditRegions, Metric, ProductStateSampler, Verdict, DISCLAIMER};

/// Eigenvalues in `[-EIGEN_FLOOR, 0)` are treated as zero.
pub const EIGEN_FLOOR: f64 = 1e-12;

/// `-Σ λ log₂ λ` of a spectrum that sums to one.
pub fn entropy_of_spectrum(values: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in values {
        if l < -EIGEN_FLOOR {
            return Err(Error::NotPositive { min_eigenvalue: l });
        }
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s.max(0.0))
}

fn check_normalized(trace: f64) -> Result<()> {
    if (trace - 1.0).abs() > crate::EPS_NUM {
        return Err(Error::NotNormalized { trace });
    }
    Ok(())
}

/// Von Neumann entropy in bits of a normalized state.
pub fn von_neumann_entropy(rho: &DenseOperator) -> Result<f64> {
    check_normalized(rho.trace().re)?;
    entropy_of_spectrum(&rho.eigvalsh()?)
}

/// Entropy of the reduction of a normalized state onto `keep`; an empty
/// `keep` gives zero.
pub fn reduced_entropy<D: Density + ?Sized>(state: &D, keep: &[SiteLabel]) -> Result<f64> {
    check_normalized(state.trace())?;
    if keep.is_empty() {
        return Ok(0.0);
    }
    entropy_of_spectrum(&state.reduced_spectrum(keep)?)
}

fn complement<D: Density + ?Sized>(state: &D, region: &[SiteLabel]) -> Result<Vec<SiteLabel>> {
    let support = state.support();
    if let Some(l) = region.iter().find(|l| !support.contains(l)) {
        return Err(Error::SupportMismatch(format!("{l} is not a factor of the state")));
    }
    Ok(support.into_iter().filter(|l| !region.contains(l)).collect())
}

/// Entanglement entropy `S(tr_{Aᶜ} ψ)` of a pure state given as a projector.
pub fn entanglement_entropy(psi: &DenseOperator, region: &[SiteLabel]) -> Result<f64> {
    check_normalized(psi.trace().re)?;
    let purity = psi.matmul(psi)?.trace().re;
    if (purity - 1.0).abs() > crate::EPS_NUM {
        return Err(Error::NotPure { purity });
    }
    complement(psi, region)?;
    reduced_entropy(psi, region)
}

/// Entanglement entropy of a state vector across `region | rest`.
pub fn vector_entanglement_entropy(psi: &StateVector, region: &[SiteLabel]) -> Result<f64> {
    let norm = psi.norm();
    check_normalized(norm * norm)?;
    entropy_of_spectrum(&psi.schmidt_spectrum(region)?)
}

/// `I(A:Aᶜ) = S_A + S_{Aᶜ} − S_V`.
pub fn mutual_information<D: Density + ?Sized>(rho: &D, region: &[SiteLabel]) -> Result<f64> {
    let rest = complement(rho, region)?;
    mutual_information_between(rho, region, &rest)
}

/// `I(X:Y) = S_X + S_Y − S_{XY}` for disjoint label sets.
pub fn mutual_information_between<D: Density + ?Sized>(rho: &D, x: &[SiteLabel], y: &[SiteLabel]) -> Result<f64> {
    if let Some(l) = x.iter().find(|l| y.contains(l)) {
        return Err(Error::OverlappingSupport(l.to_string()));
    }
    let xy: Vec<SiteLabel> = x.iter().chain(y).copied().collect();
    let i = reduced_entropy(rho, x)? + reduced_entropy(rho, y)? - reduced_entropy(rho, &xy)?;
    Ok(i.max(0.0))
}

/// Slack of `I(Aa:B) ≤ I(A:B) + 2 S(a)` on a given state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArakiLiebCheck {
    pub holds: bool,
    pub slack: f64,
}

pub fn araki_lieb_bound_check<D: Density + ?Sized>(
    rho: &D,
    a_big: &[SiteLabel],
    a_small: &[SiteLabel],
    b_big: &[SiteLabel],
) -> Result<ArakiLiebCheck> {
    for (x, y) in [(a_big, a_small), (a_big, b_big), (a_small, b_big)] {
        if let Some(l) = x.iter().find(|l| y.contains(l)) {
            return Err(Error::OverlappingSupport(l.to_string()));
        }
    }
    let aa: Vec<SiteLabel> = a_big.iter().chain(a_small).copied().collect();
    let slack = mutual_information_between(rho, a_big, b_big)? + 2.0 * reduced_entropy(rho, a_small)?
        - mutual_information_between(rho, &aa, b_big)?;
    Ok(ArakiLiebCheck { holds: slack >= -crate::EPS_NUM, slack })
}

/// `I(x : y)` of the normalized Choi state `R / d^N`, for disjoint label
/// sets on `V ∪ V'`. Works from the low-rank factor when the channel has
/// Kraus operators.
pub fn cjs_mutual_information(channel: &Channel, x: &[SiteLabel], y: &[SiteLabel]) -> Result<f64> {
    if let Some(l) = x.iter().find(|l| y.contains(l)) {
        return Err(Error::OverlappingSupport(l.to_string()));
    }
    let norm = channel.lattice().hilbert_dim() as f64;
    let state = channel.choi_state()?;
    let entropy = |keep: &[SiteLabel]| -> Result<f64> {
        let spectrum: Vec<f64> = state.reduced_spectrum(keep)?.into_iter().map(|l| l / norm).collect();
        entropy_of_spectrum(&spectrum)
    };
    let xy = [x, y].concat();
    Ok((entropy(x)? + entropy(y)? - entropy(&xy)?).max(0.0))
}

/// `I(ĀĀ' : B̄B̄')` of the normalized Choi state together with the bound
/// `2(|a| + |b|) log₂ d` that holds for locality-preserving channels.
pub fn cjs_closure_mutual_information(channel: &Channel, region: &SiteSet) -> Result<(f64, f64)> {
    let lattice = channel.lattice();
    let p = lattice.partition(region)?;
    let closure = p.closure();
    let outer = p.outer_closure();
    let x = [physical_labels(&closure), ancilla_labels(&closure)].concat();
    let y = [physical_labels(&outer), ancilla_labels(&outer)].concat();
    let mi = cjs_mutual_information(channel, &x, &y)?;
    let bound = 2.0 * (p.neighborhood.len() + p.shell.len()) as f64 * (lattice.local_dim() as f64).log2();
    Ok((mi, bound))
}
