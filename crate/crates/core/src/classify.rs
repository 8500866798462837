//! Membership tests for the channel classes.
//!
//! Every predicate sweeps the regions `A ∈ S` chosen by a [`RegionPolicy`],
//! computes a relative residual per region, and reports the maximum:
//!
//! * causality (Choi route): `T = tr_{a,B̄} R` against `σ ⊗ 1_{B̄'}`;
//! * causality (Heisenberg route): `E†(X_A)` supported on `Ā`;
//! * locality: `T = tr_{a,b} R` against `σ_{A,Ā'} ⊗ σ_{B,B̄'}`;
//! * factorization: `E†(X_A Y_B) = E†(X_A) E†(Y_B)`, on top of causality;
//! * unitarity: the Choi state has rank one.

use serde::{Deserialize, Serialize};

use crate::channels::{ancillas, physical, Channel};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, RegionPartition, RegionPolicy, SiteSet};
use crate::tensor::{ancilla_labels, physical_labels, weyl_basis, Density, DenseOperator};

/// Norms below this are treated as zero when forming relative residuals.
const NEGLIGIBLE: f64 = 1e-13;

fn relative(diff: f64, scale: f64) -> f64 {
    if scale <= NEGLIGIBLE {
        if diff <= NEGLIGIBLE { 0.0 } else { f64::INFINITY }
    } else {
        diff / scale
    }
}

fn power(d: usize, k: usize) -> f64 {
    (d as f64).powi(k as i32)
}

/// Regions to sweep; fails when `S` is empty.
pub fn regions(lattice: &Lattice, policy: RegionPolicy) -> Result<Vec<SiteSet>> {
    let out = lattice.regions(policy);
    if out.is_empty() {
        return Err(Error::EmptyRegionSet { range: lattice.range() });
    }
    Ok(out)
}

fn partition(lattice: &Lattice, region: &SiteSet) -> Result<RegionPartition> {
    let p = lattice.partition(region)?;
    if !p.in_s() {
        return Err(Error::InvalidSpec(format!("region {region:?} has an empty exterior")));
    }
    Ok(p)
}

/// `‖T − σ ⊗ 1_{B̄'}‖ / ‖T‖` with `T = tr_{a,B̄}(R)`.
pub fn cpqc_residual(channel: &Channel, region: &SiteSet) -> Result<f64> {
    let lattice = channel.lattice();
    let d = lattice.local_dim();
    let p = partition(lattice, region)?;
    let outer = p.outer_closure();
    let mut keep = physical_labels(&p.region);
    keep.extend(ancillas(lattice));
    let t = channel.choi_state()?.reduced(&keep)?;
    let outer_anc = ancilla_labels(&outer);
    let sigma = t.partial_trace(&outer_anc)?.scale_real(1.0 / power(d, outer.len()));
    let product = sigma.tensor_product(&DenseOperator::identity_on(&outer_anc, d)?)?;
    Ok(relative(t.sub(&product)?.frobenius_norm(), t.frobenius_norm()))
}

/// Largest relative distance of `E†(X)` from `tr_{B̄}(E†X)/d^{|B̄|} ⊗ 1_{B̄}`
/// over a complete operator basis `X` on `A`.
pub fn cpqc_heisenberg_residual(channel: &Channel, region: &SiteSet) -> Result<f64> {
    let lattice = channel.lattice();
    let d = lattice.local_dim();
    let p = partition(lattice, region)?;
    let v = physical(lattice);
    let outer = physical_labels(&p.outer_closure());
    let mut worst = 0.0f64;
    for x in weyl_basis(&physical_labels(&p.region), d)? {
        let y = channel.adjoint_apply(&x.embed(&v, d)?)?;
        let scale = y.frobenius_norm();
        if scale <= NEGLIGIBLE {
            continue;
        }
        let local = y.partial_trace(&outer)?.scale_real(1.0 / power(d, outer.len()));
        let back = local.embed(&v, d)?;
        worst = worst.max(relative(y.sub(&back)?.frobenius_norm(), scale));
    }
    Ok(worst)
}

/// `‖T − σ_A ⊗ σ_B‖ / ‖T‖` with `T = tr_{a,b}(R)`,
/// `σ_A = tr_{B,B̄'}(T)/d^{|B̄'|}` and `σ_B = tr_{A,Ā'}(T)/d^{|Ā'|}`.
pub fn lpqc_residual(channel: &Channel, region: &SiteSet) -> Result<f64> {
    let lattice = channel.lattice();
    let d = lattice.local_dim();
    let p = partition(lattice, region)?;
    let closure = p.closure();
    let outer = p.outer_closure();
    let mut keep = physical_labels(&p.region);
    keep.extend(physical_labels(&p.exterior));
    keep.extend(ancillas(lattice));
    let t = channel.choi_state()?.reduced(&keep)?;
    let mut b_side = physical_labels(&p.exterior);
    b_side.extend(ancilla_labels(&outer));
    let mut a_side = physical_labels(&p.region);
    a_side.extend(ancilla_labels(&closure));
    let sigma_a = t.partial_trace(&b_side)?.scale_real(1.0 / power(d, outer.len()));
    let sigma_b = t.partial_trace(&a_side)?.scale_real(1.0 / power(d, closure.len()));
    let product = sigma_a.tensor_product(&sigma_b)?;
    Ok(relative(t.sub(&product)?.frobenius_norm(), t.frobenius_norm()))
}

/// Largest `‖E†(X_A Y_B) − E†(X_A) E†(Y_B)‖_F / √(d^N)` over complete
/// operator bases on `A` and `B` (unitary basis elements, so the scale is
/// relative).
pub fn factorization_residual(channel: &Channel, region: &SiteSet) -> Result<f64> {
    let lattice = channel.lattice();
    let d = lattice.local_dim();
    let p = partition(lattice, region)?;
    let v = physical(lattice);
    let scale = (lattice.hilbert_dim() as f64).sqrt();
    let xs = weyl_basis(&physical_labels(&p.region), d)?
        .into_iter()
        .map(|x| x.embed(&v, d))
        .collect::<Result<Vec<_>>>()?;
    let ys = weyl_basis(&physical_labels(&p.exterior), d)?
        .into_iter()
        .map(|y| y.embed(&v, d))
        .collect::<Result<Vec<_>>>()?;
    let ex = xs.iter().map(|x| channel.adjoint_apply(x)).collect::<Result<Vec<_>>>()?;
    let ey = ys.iter().map(|y| channel.adjoint_apply(y)).collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    // the identity elements factorize trivially
    for (x, ex) in xs.iter().zip(&ex).skip(1) {
        for (y, ey) in ys.iter().zip(&ey).skip(1) {
            let joint = channel.adjoint_apply(&x.matmul(y)?)?;
            let product = ex.matmul(ey)?;
            worst = worst.max(joint.sub(&product)?.frobenius_norm() / scale);
        }
    }
    Ok(worst)
}

/// Sweep settings shared by the predicates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub tol: f64,
    pub policy: RegionPolicy,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { tol: crate::DEFAULT_TOL, policy: RegionPolicy::Blocks }
    }
}

impl ClassifyOptions {
    pub fn with_tol(tol: f64) -> Self {
        ClassifyOptions { tol, ..Default::default() }
    }
}

fn sweep(channel: &Channel, policy: RegionPolicy, f: impl Fn(&Channel, &SiteSet) -> Result<f64>) -> Result<f64> {
    let mut worst = 0.0f64;
    for region in regions(channel.lattice(), policy)? {
        worst = worst.max(f(channel, &region)?);
    }
    Ok(worst)
}

/// Causality preservation through the Choi criterion.
pub fn is_cpqc(channel: &Channel, options: ClassifyOptions) -> Result<(bool, f64)> {
    let r = sweep(channel, options.policy, cpqc_residual)?;
    Ok((r <= options.tol, r))
}

/// Causality preservation through the Heisenberg picture; an independent
/// check of [`is_cpqc`].
pub fn is_cpqc_heisenberg(channel: &Channel, options: ClassifyOptions) -> Result<(bool, f64)> {
    let r = sweep(channel, options.policy, cpqc_heisenberg_residual)?;
    Ok((r <= options.tol, r))
}

/// Locality preservation through the Choi criterion.
pub fn is_lpqc(channel: &Channel, options: ClassifyOptions) -> Result<(bool, f64)> {
    let r = sweep(channel, options.policy, lpqc_residual)?;
    Ok((r <= options.tol, r))
}

/// Causality together with the factorization of the adjoint. The returned
/// residual is the larger of the two.
pub fn is_fqc(channel: &Channel, options: ClassifyOptions) -> Result<(bool, f64)> {
    let r = sweep(channel, options.policy, |ch, a| {
        Ok(cpqc_heisenberg_residual(ch, a)?.max(factorization_residual(ch, a)?))
    })?;
    Ok((r <= options.tol, r))
}

/// Ratio of the second-largest Choi eigenvalue to `tr R`.
pub fn unitarity_residual(channel: &Channel) -> Result<f64> {
    let spectrum = channel.cjs_spectrum()?;
    Ok(spectrum.get(1).copied().unwrap_or(0.0).max(0.0) / channel.lattice().hilbert_dim() as f64)
}

pub fn is_unitary(channel: &Channel, tol: f64) -> Result<bool> {
    Ok(unitarity_residual(channel)? <= tol)
}

/// Unitary and causality preserving.
pub fn is_qca(channel: &Channel, options: ClassifyOptions) -> Result<bool> {
    Ok(is_unitary(channel, options.tol)? && is_cpqc(channel, options)?.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionResiduals {
    #[serde(rename = "A")]
    pub region: Vec<usize>,
    pub cpqc_residual: f64,
    pub cpqc_heisenberg_residual: f64,
    pub lpqc_residual: f64,
    pub fqc_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub is_cpqc: bool,
    pub is_cpqc_heisenberg: bool,
    pub is_lpqc: bool,
    pub is_fqc: bool,
    pub is_unitary: bool,
    pub is_qca: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub channel_id: String,
    pub version: String,
    pub lattice: Lattice,
    pub tolerance: f64,
    pub region_policy: RegionPolicy,
    pub per_region: Vec<RegionResiduals>,
    pub max_residuals: MaxResiduals,
    pub verdicts: Verdicts,
    /// Violated class inclusions; empty for a consistent report.
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxResiduals {
    pub cpqc: f64,
    pub cpqc_heisenberg: f64,
    pub lpqc: f64,
    pub fqc: f64,
    pub unitary: f64,
}

impl ClassificationReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

fn violations(v: &Verdicts) -> Vec<String> {
    let mut out = Vec::new();
    if v.is_lpqc && !v.is_cpqc {
        out.push("locality preserving but not causality preserving".to_string());
    }
    if v.is_fqc != v.is_lpqc {
        out.push(format!("factorization verdict {} differs from locality verdict {}", v.is_fqc, v.is_lpqc));
    }
    if v.is_cpqc != v.is_cpqc_heisenberg {
        out.push(format!(
            "Choi causality verdict {} differs from Heisenberg verdict {}",
            v.is_cpqc, v.is_cpqc_heisenberg
        ));
    }
    if v.is_qca && !v.is_lpqc {
        out.push("unitary and causal but not locality preserving".to_string());
    }
    out
}

/// Evaluates every predicate and records (rather than raises) violations of
/// the class inclusions.
pub fn evaluate(channel: &Channel, options: ClassifyOptions) -> Result<ClassificationReport> {
    let mut per_region = Vec::new();
    for region in regions(channel.lattice(), options.policy)? {
        let cpqc = cpqc_residual(channel, &region)?;
        let heisenberg = cpqc_heisenberg_residual(channel, &region)?;
        let lpqc = lpqc_residual(channel, &region)?;
        let fqc = heisenberg.max(factorization_residual(channel, &region)?);
        per_region.push(RegionResiduals {
            region: region.into_iter().collect(),
            cpqc_residual: cpqc,
            cpqc_heisenberg_residual: heisenberg,
            lpqc_residual: lpqc,
            fqc_residual: fqc,
        });
    }
    let max = |f: fn(&RegionResiduals) -> f64| per_region.iter().map(f).fold(0.0f64, f64::max);
    let max_residuals = MaxResiduals {
        cpqc: max(|r| r.cpqc_residual),
        cpqc_heisenberg: max(|r| r.cpqc_heisenberg_residual),
        lpqc: max(|r| r.lpqc_residual),
        fqc: max(|r| r.fqc_residual),
        unitary: unitarity_residual(channel)?,
    };
    let tol = options.tol;
    let is_cpqc = max_residuals.cpqc <= tol;
    let is_unitary = max_residuals.unitary <= tol;
    let verdicts = Verdicts {
        is_cpqc,
        is_cpqc_heisenberg: max_residuals.cpqc_heisenberg <= tol,
        is_lpqc: max_residuals.lpqc <= tol,
        is_fqc: max_residuals.fqc <= tol,
        is_unitary,
        is_qca: is_unitary && is_cpqc,
    };
    Ok(ClassificationReport {
        channel_id: channel.name().to_string(),
        version: crate::VERSION.to_string(),
        lattice: channel.lattice().clone(),
        tolerance: tol,
        region_policy: options.policy,
        per_region,
        max_residuals,
        violations: violations(&verdicts),
        verdicts,
        notes: channel.notes().to_vec(),
    })
}

/// As [`evaluate`], but an inconsistent report is an error.
pub fn taxonomy(channel: &Channel, options: ClassifyOptions) -> Result<ClassificationReport> {
    let report = evaluate(channel, options)?;
    if !report.is_consistent() {
        return Err(Error::Inconsistent(format!("{}: {}", report.channel_id, report.violations.join("; "))));
    }
    Ok(report)
}
