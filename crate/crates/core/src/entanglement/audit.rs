//! Empirical area-law audits over a family of channels indexed by `M`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{entropy_of_spectrum, vector_entanglement_entropy};
use crate::channels::{physical, Channel};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, SiteSet};
use crate::sampling::{random_density, random_vector};
use crate::tensor::{c, physical_labels, DenseOperator, StateVector, C64};

pub const DISCLAIMER: &str = "Empirical check on sampled product states at the tested sizes only; \
the definition quantifies over all product states and all sizes, so this is evidence, not a proof.";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    /// Entanglement entropy of the pure output (unitary channels only).
    #[serde(rename = "ee")]
    Entanglement,
    #[serde(rename = "mi")]
    MutualInformation,
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ee" | "entanglement" => Ok(Metric::Entanglement),
            "mi" | "mutual_information" => Ok(Metric::MutualInformation),
            _ => Err(Error::InvalidSpec(format!("unknown metric `{s}` (expected ee or mi)"))),
        }
    }
}

/// Regions swept by an audit. Unlike the classification sweeps these need
/// not have a non-empty exterior.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditRegions {
    /// Every proper contiguous block.
    #[default]
    Blocks,
    Singletons,
    /// The sites with first coordinate below `M/2`.
    Half,
}

impl std::str::FromStr for AuditRegions {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::InvalidSpec(format!("unknown region set `{s}` (expected blocks, singletons or half)")))
    }
}

impl AuditRegions {
    pub fn regions(&self, lattice: &Lattice) -> Vec<SiteSet> {
        match self {
            AuditRegions::Blocks => lattice.contiguous_blocks(),
            AuditRegions::Singletons => (0..lattice.num_sites()).map(|n| [n].into()).collect(),
            AuditRegions::Half => {
                let half: SiteSet = (0..lattice.num_sites()).filter(|&n| lattice.coords(n)[0] < lattice.size() / 2).collect();
                if half.is_empty() { vec![] } else { vec![half] }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ConsistentWithAreaLaw,
    Violating,
    Inconclusive,
}

/// Product inputs: a fixed list of structured states followed by `samples`
/// Haar-random ones (random mixed single-site states for mutual
/// information).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductStateSampler {
    pub samples: usize,
    pub seed: u64,
}

impl Default for ProductStateSampler {
    fn default() -> Self {
        ProductStateSampler { samples: 16, seed: 0 }
    }
}

type LocalStates = Vec<DVector<C64>>;

impl ProductStateSampler {
    /// Structured product states: all `|0⟩`, all `|+⟩`, a domain wall along
    /// the first axis, alternating `|0⟩|1⟩`, and site-dependent rotations.
    pub fn fixtures(lattice: &Lattice) -> Vec<(String, LocalStates)> {
        let d = lattice.local_dim();
        let n = lattice.num_sites();
        let basis = |k: usize| {
            let mut v = DVector::<C64>::zeros(d);
            v[k % d] = c(1.0, 0.0);
            v
        };
        let plus = DVector::from_element(d, c(1.0 / (d as f64).sqrt(), 0.0));
        let rotated = |site: usize| {
            let theta = 0.37 * (site + 1) as f64;
            let mut v = DVector::<C64>::zeros(d);
            v[0] = c(theta.cos(), 0.0);
            v[1] = C64::from_polar(theta.sin(), 0.61 * site as f64);
            v
        };
        vec![
            ("zeros".to_string(), (0..n).map(|_| basis(0)).collect()),
            ("plus".to_string(), (0..n).map(|_| plus.clone()).collect()),
            (
                "domain_wall".to_string(),
                (0..n).map(|s| basis(usize::from(lattice.coords(s)[0] >= lattice.size() / 2))).collect(),
            ),
            ("alternating".to_string(), (0..n).map(|s| basis(lattice.coords(s).iter().sum::<usize>() % 2)).collect()),
            ("rotated".to_string(), (0..n).map(rotated).collect()),
        ]
    }

    pub fn pure_states(&self, lattice: &Lattice) -> Vec<(String, LocalStates)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let d = lattice.local_dim();
        let mut out = Self::fixtures(lattice);
        for k in 0..self.samples {
            out.push((format!("random{k}"), (0..lattice.num_sites()).map(|_| random_vector(&mut rng, d)).collect()));
        }
        out
    }

    pub fn mixed_states(&self, lattice: &Lattice) -> Vec<(String, Vec<DMatrix<C64>>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let d = lattice.local_dim();
        let mut out: Vec<(String, Vec<DMatrix<C64>>)> = Self::fixtures(lattice)
            .into_iter()
            .map(|(name, vs)| (name, vs.iter().map(|v| v * v.adjoint()).collect()))
            .collect();
        for k in 0..self.samples {
            out.push((format!("random{k}"), (0..lattice.num_sites()).map(|_| random_density(&mut rng, d, d)).collect()));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaLawRecord {
    #[serde(rename = "M")]
    pub size: usize,
    #[serde(rename = "A")]
    pub region: Vec<usize>,
    pub boundary: usize,
    /// Largest value over the sampled inputs, in bits.
    pub value: f64,
    pub ratio: f64,
    /// Input that attained `value`.
    pub input: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaLawReport {
    pub channel_family: String,
    pub version: String,
    pub metric: Metric,
    pub regions: AuditRegions,
    pub sizes: Vec<usize>,
    pub sampler: ProductStateSampler,
    pub per_region: Vec<AreaLawRecord>,
    /// Largest `value / |∂A|` at each size.
    pub c_per_size: Vec<f64>,
    pub fitted_c: f64,
    pub verdict: Verdict,
    pub disclaimer: String,
}

impl AreaLawReport {
    /// One row per record: `M,region_size,boundary,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("M,region_size,boundary,value\n");
        for r in &self.per_region {
            out.push_str(&format!("{},{},{},{}\n", r.size, r.region.len(), r.boundary, r.value));
        }
        out
    }
}

const SLACK: f64 = 1e-9;

fn verdict(c_per_size: &[f64]) -> Verdict {
    if c_per_size.len() < 2 {
        return Verdict::Inconclusive;
    }
    if c_per_size.iter().all(|&c| c <= c_per_size[0] + SLACK) {
        Verdict::ConsistentWithAreaLaw
    } else if c_per_size.windows(2).all(|w| w[1] > w[0] + SLACK) {
        Verdict::Violating
    } else {
        Verdict::Inconclusive
    }
}

fn ratio(value: f64, boundary: usize) -> f64 {
    match boundary {
        0 if value <= SLACK => 0.0,
        0 => f64::INFINITY,
        b => value / b as f64,
    }
}

/// Per-region maxima of the metric over the sampled inputs.
fn size_records(channel: &Channel, metric: Metric, regions: AuditRegions, sampler: &ProductStateSampler) -> Result<Vec<AreaLawRecord>> {
    let lattice = channel.lattice();
    let v = physical(lattice);
    let d = lattice.local_dim();
    let sets = regions.regions(lattice);
    let mut best: Vec<(f64, String)> = vec![(0.0, String::new()); sets.len()];
    let mut record = |k: usize, value: f64, name: &str| {
        if best[k].1.is_empty() || value > best[k].0 {
            best[k] = (value, name.to_string());
        }
    };
    match metric {
        Metric::Entanglement => {
            let u = channel.unitary_operator(crate::DEFAULT_TOL)?.ok_or_else(|| {
                Error::Unsupported("the entanglement metric needs a unitary channel (pure outputs)".into())
            })?;
            for (name, locals) in sampler.pure_states(lattice) {
                let input = StateVector::product(v.clone(), &locals)?;
                let out = StateVector::new(v.clone(), vec![d; v.len()], u.data() * input.data())?;
                for (k, set) in sets.iter().enumerate() {
                    record(k, vector_entanglement_entropy(&out, &physical_labels(set))?, &name);
                }
            }
        }
        Metric::MutualInformation => {
            for (name, locals) in sampler.mixed_states(lattice) {
                let mut rho = DenseOperator::scalar(c(1.0, 0.0));
                for (label, m) in v.iter().zip(locals) {
                    rho = rho.tensor_product(&DenseOperator::on_site(*label, m)?)?;
                }
                let out = channel.apply(&rho)?;
                let s_v = entropy_of_spectrum(&out.eigvalsh()?)?;
                for (k, set) in sets.iter().enumerate() {
                    let a = physical_labels(set);
                    let rest: Vec<_> = v.iter().filter(|l| !a.contains(l)).copied().collect();
                    let s_a = entropy_of_spectrum(&out.reduce_to(&a)?.eigvalsh()?)?;
                    let s_b = entropy_of_spectrum(&out.reduce_to(&rest)?.eigvalsh()?)?;
                    record(k, (s_a + s_b - s_v).max(0.0), &name);
                }
            }
        }
    }
    Ok(sets
        .into_iter()
        .zip(best)
        .map(|(set, (value, input))| {
            let boundary = lattice.boundary_size(&set);
            AreaLawRecord { size: lattice.size(), region: set.into_iter().collect(), boundary, value, ratio: ratio(value, boundary), input }
        })
        .collect())
}

/// Applies `family(M)` for each size to the sampled product inputs and
/// records the largest metric value per region.
pub fn audit_area_law(
    family_name: &str,
    family: &dyn Fn(usize) -> Result<Channel>,
    sizes: &[usize],
    sampler: &ProductStateSampler,
    metric: Metric,
    regions: AuditRegions,
) -> Result<AreaLawReport> {
    if sizes.is_empty() {
        return Err(Error::InvalidSpec("no sizes to audit".into()));
    }
    let mut per_region = Vec::new();
    let mut c_per_size = Vec::with_capacity(sizes.len());
    for &m in sizes {
        let channel = family(m)?;
        let records = size_records(&channel, metric, regions, sampler)?;
        c_per_size.push(records.iter().map(|r| r.ratio).fold(0.0, f64::max));
        per_region.extend(records);
    }
    let fitted_c = c_per_size.iter().copied().fold(0.0, f64::max);
    Ok(AreaLawReport {
        channel_family: family_name.to_string(),
        version: crate::VERSION.to_string(),
        metric,
        regions,
        sizes: sizes.to_vec(),
        sampler: *sampler,
        per_region,
        verdict: verdict(&c_per_size),
        c_per_size,
        fitted_c,
        disclaimer: DISCLAIMER.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rules() {
        assert_eq!(verdict(&[1.0]), Verdict::Inconclusive);
        assert_eq!(verdict(&[1.0, 1.0, 0.5]), Verdict::ConsistentWithAreaLaw);
        assert_eq!(verdict(&[1.0, 1.5, 2.0]), Verdict::Violating);
        assert_eq!(verdict(&[1.0, 1.5, 1.2]), Verdict::Inconclusive);
    }

    #[test]
    fn metric_and_regions_parse() {
        assert_eq!("mi".parse::<Metric>().unwrap(), Metric::MutualInformation);
        assert_eq!("half".parse::<AuditRegions>().unwrap(), AuditRegions::Half);
        assert!("nope".parse::<AuditRegions>().is_err());
    }
}
