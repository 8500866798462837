//! Named channels: the identity, the three worked examples, and a few
//! standard quantum cellular automata.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{circuit::gates, doubled, physical, Channel, Circuit, Gate};
use crate::error::{Error, Result};
use crate::lattice::{Boundary, Lattice};
use crate::sampling;
use crate::tensor::{c, pauli, DenseOperator, SiteLabel, C64};

fn require_qubits(lattice: &Lattice, what: &str) -> Result<()> {
    if lattice.local_dim() != 2 {
        return Err(Error::Unsupported(format!("{what} is defined for qubits (d = 2)")));
    }
    Ok(())
}

fn require_even(lattice: &Lattice, what: &str) -> Result<()> {
    if lattice.size() % 2 != 0 {
        return Err(Error::Unsupported(format!("{what} needs an even linear size, got M = {}", lattice.size())));
    }
    Ok(())
}

/// Pairs `(n, n + e)` with `e = (M/2, 0, …)`, for every `n` with first
/// coordinate below `M/2`.
pub fn half_shift_pairs(lattice: &Lattice) -> Vec<(usize, usize)> {
    let half = lattice.size() / 2;
    (0..lattice.num_sites())
        .filter_map(|n| {
            let mut coords = lattice.coords(n);
            if coords[0] >= half {
                return None;
            }
            coords[0] += half;
            lattice.index(&coords).ok().map(|m| (n, m))
        })
        .collect()
}

/// `ρ ↦ ½[ρ + X^{⊗N} ρ X^{⊗N}]`
pub fn example1(lattice: &Lattice) -> Result<Channel> {
    require_qubits(lattice, "example1")?;
    let id = Channel::identity(lattice)?;
    let flip = global_pauli_x(lattice)?;
    Ok(Channel::convex_combine(&[0.5, 0.5], &[id, flip])?.named("example1"))
}

/// The unitary channel `ρ ↦ X^{⊗N} ρ X^{⊗N}`.
pub fn global_pauli_x(lattice: &Lattice) -> Result<Channel> {
    let mut x = DenseOperator::scalar(c(1.0, 0.0));
    for label in physical(lattice) {
        x = x.tensor_product(&DenseOperator::on_site(label, pauli::x())?)?;
    }
    Ok(Channel::unitary(lattice, x)?.named("global_x"))
}

/// Choi state `R = 1/2^N + S` with
/// `S = k_N Σ_s c_s ⊗_n (X_n X_{n'})^{s_n} (Z_n Z_{n'})^{1−s_n}`.
///
/// `c_s` are the amplitudes of the product of Bell pairs `(|00⟩+|11⟩)/√2`
/// on the half-shift pairs `(n, n+e)`, i.e. `c_s = ∏ δ(s_n, s_{n+e}) / 2^{N/4}`,
/// and `k_N = 1 / (2^N Σ_s |c_s|)` so that `‖S‖_∞ ≤ 1/2^N`.
pub fn example2(lattice: &Lattice) -> Result<Channel> {
    require_qubits(lattice, "example2")?;
    require_even(lattice, "example2")?;
    let n = lattice.num_sites();
    let pairs = half_shift_pairs(lattice);
    let labels = doubled(lattice);
    let dim = 1usize << (2 * n);
    crate::tensor::check_cap(dim)?;
    // bit position of physical site k and ancilla k in the canonical index
    let phys_bit = |k: usize| 2 * n - 1 - k;
    let anc_bit = |k: usize| n - 1 - k;
    let amplitude = 0.5f64.powf(n as f64 / 4.0);
    let strings = 1usize << pairs.len();
    let k_n = 1.0 / (2f64.powi(n as i32) * amplitude * strings as f64);
    let mut r = DMatrix::<C64>::identity(dim, dim) * c(1.0 / 2f64.powi(n as i32), 0.0);
    for choice in 0..strings {
        // s_n = s_{n+e} = bit of the pair
        let mut flip = 0usize;
        let mut phase_mask = 0usize;
        for (p, &(a, b)) in pairs.iter().enumerate() {
            let bit = (choice >> p) & 1;
            for site in [a, b] {
                let mask = (1 << phys_bit(site)) | (1 << anc_bit(site));
                if bit == 1 {
                    flip |= mask;
                } else {
                    phase_mask |= mask;
                }
            }
        }
        let coeff = k_n * amplitude;
        for x in 0..dim {
            let sign = if (x & phase_mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            r[(x ^ flip, x)] += c(coeff * sign, 0.0);
        }
    }
    let r = DenseOperator::new(labels, vec![2; 2 * n], r)?;
    Ok(Channel::from_cjs(lattice, r)?
        .named("example2")
        .with_note("Bell pairs (|00>+|11>)/sqrt2 on (n, n+M/2) along axis 0; k_N = 1/(2^N sum_s |c_s|)"))
}

/// How the sites of the first half are chosen in [`example3`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairConvention {
    /// First coordinate in `0..M/2`: exactly `M/2` disjoint pairs per row.
    #[default]
    Disjoint,
    /// First coordinate in `0..=M/2`: one extra pair per row, wrapping
    /// around, composed with the others (the dephasings commute).
    Inclusive,
}

/// `⊗_{n ∈ V_1} E_{n,n+e}` with `E_{n,m}(ρ) = ½[ρ + Z_n Z_m ρ Z_n Z_m]`.
pub fn example3(lattice: &Lattice, convention: PairConvention) -> Result<Channel> {
    require_qubits(lattice, "example3")?;
    require_even(lattice, "example3")?;
    let dephasing = |a: usize, b: usize| -> Result<Vec<DenseOperator>> {
        let (pa, pb) = (SiteLabel::physical(a), SiteLabel::physical(b));
        let id = DenseOperator::identity_on(&[pa, pb], 2)?.scale_real(std::f64::consts::FRAC_1_SQRT_2);
        let zz = DenseOperator::on_site(pa, pauli::z())?
            .tensor_product(&DenseOperator::on_site(pb, pauli::z())?)?
            .scale_real(std::f64::consts::FRAC_1_SQRT_2);
        Ok(vec![id, zz])
    };
    let pairs = half_shift_pairs(lattice);
    let parts = pairs.iter().map(|&(a, b)| dephasing(a, b)).collect::<Result<Vec<_>>>()?;
    let mut channel = Channel::local_product(lattice, &parts)?;
    if convention == PairConvention::Inclusive {
        let half = lattice.size() / 2;
        for n in 0..lattice.num_sites() {
            let mut coords = lattice.coords(n);
            if coords[0] != half {
                continue;
            }
            coords[0] = (coords[0] + half) % lattice.size();
            let m = lattice.index(&coords)?;
            let extra = Channel::local_product(lattice, &[dephasing(n, m)?])?;
            channel = channel.then(&extra)?;
        }
    }
    Ok(channel.named("example3"))
}

/// Unitary permuting the sites: the content of site `n` moves to `perm[n]`.
pub fn site_permutation(lattice: &Lattice, perm: &[usize]) -> Result<DenseOperator> {
    let n = lattice.num_sites();
    let d = lattice.local_dim();
    let dim = lattice.hilbert_dim();
    crate::tensor::check_cap(dim)?;
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidSpec("not a permutation of the sites".into()));
        }
    }
    if perm.len() != n {
        return Err(Error::InvalidSpec("not a permutation of the sites".into()));
    }
    let mut u = DMatrix::<C64>::zeros(dim, dim);
    let mut digits = vec![0usize; n];
    let mut out = vec![0usize; n];
    for x in 0..dim {
        let mut rest = x;
        for k in (0..n).rev() {
            digits[k] = rest % d;
            rest /= d;
        }
        for k in 0..n {
            out[perm[k]] = digits[k];
        }
        let y = out.iter().fold(0, |acc, &digit| acc * d + digit);
        u[(y, x)] = c(1.0, 0.0);
    }
    DenseOperator::new(physical(lattice), vec![d; n], u)
}

/// Translation by one site along axis 0 (cyclic, also on open lattices).
pub fn shift(lattice: &Lattice) -> Result<Channel> {
    let perm: Vec<usize> = (0..lattice.num_sites())
        .map(|n| {
            let mut coords = lattice.coords(n);
            coords[0] = (coords[0] + 1) % lattice.size();
            lattice.index(&coords)
        })
        .collect::<Result<_>>()?;
    Ok(Channel::unitary(lattice, site_permutation(lattice, &perm)?)?.named("shift"))
}

/// Exchange of two sites.
pub fn swap(lattice: &Lattice, a: usize, b: usize) -> Result<Channel> {
    let n = lattice.num_sites();
    for site in [a, b] {
        if site >= n {
            return Err(Error::SiteOutOfRange { index: site, sites: n });
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.swap(a, b);
    Ok(Channel::unitary(lattice, site_permutation(lattice, &perm)?)?.named(format!("swap({a},{b})")))
}

/// Two-site gate used in [`brickwork`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BrickGate {
    /// Independent Haar-random two-site unitaries.
    #[default]
    Haar,
    /// Controlled-phase gates.
    Cz,
}

/// Layers of nearest-neighbour gates on a chain; layer `k` acts on the
/// bonds `(i, i+1)` with `i ≡ k (mod 2)`, including the wrap-around bond
/// when the chain is periodic and even.
pub fn brickwork_circuit(lattice: &Lattice, layers: usize, gate: BrickGate, seed: u64) -> Result<Circuit> {
    if lattice.dimension() != 1 {
        return Err(Error::Unsupported("brickwork circuits are defined on chains".into()));
    }
    let m = lattice.size();
    let d = lattice.local_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut circuit = Circuit::new();
    for layer in 0..layers {
        let mut bonds: Vec<(usize, usize)> = (0..m.saturating_sub(1)).filter(|i| i % 2 == layer % 2).map(|i| (i, i + 1)).collect();
        if lattice.boundary() == Boundary::Periodic && m % 2 == 0 && (m - 1) % 2 == layer % 2 {
            bonds.push((m - 1, 0));
        }
        for (a, b) in bonds {
            let matrix = match gate {
                BrickGate::Haar => sampling::random_unitary(&mut rng, d * d),
                BrickGate::Cz => gates::cz(d),
            };
            circuit.push(Gate::on(&[SiteLabel::physical(a), SiteLabel::physical(b)], matrix)?);
        }
    }
    Ok(circuit)
}

pub fn brickwork(lattice: &Lattice, layers: usize, gate: BrickGate, seed: u64) -> Result<Channel> {
    let circuit = brickwork_circuit(lattice, layers, gate, seed)?;
    let u = circuit.unitary(&physical(lattice), lattice.local_dim())?;
    Ok(Channel::unitary(lattice, u)?.named(format!("brickwork(layers={layers},gate={gate:?},seed={seed})")))
}

/// `⊗_n u_n` with Haar-random single-site unitaries.
pub fn product_unitary(lattice: &Lattice, seed: u64) -> Result<Channel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = lattice.local_dim();
    let mut u = DenseOperator::scalar(c(1.0, 0.0));
    for label in physical(lattice) {
        u = u.tensor_product(&DenseOperator::on_site(label, sampling::random_unitary(&mut rng, d))?)?;
    }
    Ok(Channel::unitary(lattice, u)?.named(format!("product(seed={seed})")))
}

/// Channel from a range-one circuit on the doubled lattice: a Haar gate on
/// every pair `(n, n')`, one brickwork layer on the physical chain, and a
/// second round of on-site couplings. Ancillas start in `|0⟩`.
pub fn random_dilated(lattice: &Lattice, seed: u64) -> Result<Channel> {
    let d = lattice.local_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut circuit = Circuit::new();
    let couple = |rng: &mut ChaCha8Rng, circuit: &mut Circuit| -> Result<()> {
        for n in 0..lattice.num_sites() {
            let u = sampling::random_unitary(rng, d * d);
            circuit.push(Gate::on(&[SiteLabel::physical(n), SiteLabel::ancilla(n)], u)?);
        }
        Ok(())
    };
    couple(&mut rng, &mut circuit)?;
    if lattice.dimension() == 1 {
        circuit.extend(brickwork_circuit(lattice, 1, BrickGate::Haar, rng.random())?);
    }
    couple(&mut rng, &mut circuit)?;
    Ok(Channel::dilated(lattice, &circuit, None)?.named(format!("dilated(seed={seed})")))
}

/// Independent depolarizing noise `ρ ↦ (1−p) ρ + p tr(ρ) 1/d` on every site.
pub fn depolarizing(lattice: &Lattice, p: f64) -> Result<Channel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidSpec(format!("depolarizing probability {p} outside [0, 1]")));
    }
    let d = lattice.local_dim();
    let d2 = (d * d) as f64;
    let parts = physical(lattice)
        .into_iter()
        .map(|label| {
            (0..d * d)
                .map(|k| {
                    let weight = if k == 0 { 1.0 - p + p / d2 } else { p / d2 };
                    let w = crate::tensor::weyl_operator(d, k / d, k % d) * c(weight.sqrt(), 0.0);
                    DenseOperator::on_site(label, w)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Channel::local_product(lattice, &parts)?.named(format!("depolarizing(p={p})")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Density;

    fn chain(m: usize, boundary: Boundary) -> Lattice {
        Lattice::chain(m, boundary).unwrap()
    }

    #[test]
    fn example1_on_all_zeros() {
        let lat = chain(4, Boundary::Open);
        let ch = example1(&lat).unwrap();
        let mut zeros = DMatrix::<C64>::zeros(16, 16);
        zeros[(0, 0)] = c(1.0, 0.0);
        let rho = DenseOperator::new(physical(&lat), vec![2; 4], zeros).unwrap();
        let out = ch.apply(&rho).unwrap();
        let mut expected = DMatrix::<C64>::zeros(16, 16);
        expected[(0, 0)] = c(0.5, 0.0);
        expected[(15, 15)] = c(0.5, 0.0);
        assert!((out.data() - expected).norm() < 1e-14);
    }

    #[test]
    fn example2_is_a_valid_choi_state() {
        let lat = Lattice::new(1, 4, 2, Boundary::Periodic, 1).unwrap();
        let ch = example2(&lat).unwrap();
        let r = ch.cjs().unwrap();
        // S = R - 1/2^N is traceless on every single factor
        let s = r.sub(&DenseOperator::identity_on(r.support(), 2).unwrap().scale_real(1.0 / 16.0)).unwrap();
        for label in r.support() {
            assert!(s.partial_trace(&[*label]).unwrap().frobenius_norm() < 1e-12);
        }
        assert!(s.op_norm_inf() <= 1.0 / 16.0 + 1e-12);
        assert!(r.eigvalsh().unwrap().last().unwrap() > &-1e-12);
        assert!(example2(&chain(5, Boundary::Open)).is_err());
    }

    #[test]
    fn example3_pairs_and_convention() {
        let lat = chain(6, Boundary::Periodic);
        assert_eq!(half_shift_pairs(&lat), vec![(0, 3), (1, 4), (2, 5)]);
        let disjoint = example3(&lat, PairConvention::Disjoint).unwrap();
        assert_eq!(disjoint.stored_kraus().unwrap().len(), 8);
        let inclusive = example3(&lat, PairConvention::Inclusive).unwrap();
        assert_eq!(inclusive.stored_kraus().unwrap().len(), 16);
        // the extra pair (3, 0) dephases the parity of sites 0 and 3 once more,
        // which the (0, 3) pair already did; the channels therefore coincide
        let a = disjoint.cjs().unwrap();
        let b = inclusive.cjs().unwrap();
        assert!(a.approx_eq(b, 1e-12));
    }

    #[test]
    fn shift_moves_site_contents_forward() {
        let lat = chain(3, Boundary::Open);
        let ch = shift(&lat).unwrap();
        let u = ch.unitary_operator(1e-10).unwrap().unwrap();
        // |100⟩ (index 4) ↦ |010⟩ (index 2)
        assert_eq!(u.data()[(2, 4)], c(1.0, 0.0));
        // |001⟩ wraps to |100⟩
        assert_eq!(u.data()[(4, 1)], c(1.0, 0.0));
    }

    #[test]
    fn depolarizing_choi_state_is_product() {
        let lat = chain(2, Boundary::Open);
        let ch = depolarizing(&lat, 1.0).unwrap();
        let r = ch.cjs().unwrap();
        let expected = DenseOperator::identity_on(r.support(), 2).unwrap().scale_real(0.25);
        assert!(r.approx_eq(&expected, 1e-12));
        let state = ch.choi_state().unwrap();
        assert!((Density::trace(&state) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cz_brickwork_is_diagonal() {
        let lat = chain(4, Boundary::Open);
        let ch = brickwork(&lat, 2, BrickGate::Cz, 0).unwrap();
        let u = ch.unitary_operator(1e-10).unwrap().unwrap();
        let off: f64 = (0..16).flat_map(|i| (0..16).map(move |j| (i, j))).filter(|(i, j)| i != j).map(|(i, j)| u.data()[(i, j)].norm()).sum();
        assert!(off < 1e-14);
    }

    #[test]
    fn random_dilated_is_a_locality_preserving_non_unitary_channel() {
        let lat = chain(4, Boundary::Open);
        let ch = random_dilated(&lat, 3).unwrap();
        let marginal = ch.cjs().unwrap().partial_trace(&physical(&lat)).unwrap();
        let identity = DenseOperator::identity_on(&crate::channels::ancillas(&lat), 2).unwrap();
        assert!(marginal.distance(&identity).unwrap() < 1e-10);
        let options = crate::classify::ClassifyOptions::default();
        assert!(crate::classify::is_lpqc(&ch, options).unwrap().0);
        assert!(!crate::classify::is_unitary(&ch, 1e-8).unwrap());
        let again = random_dilated(&lat, 3).unwrap();
        assert!(ch.cjs().unwrap().distance(again.cjs().unwrap()).unwrap() < 1e-14);
    }
}
