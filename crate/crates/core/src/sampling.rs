//! Seeded random matrices, states and channels.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channels::{physical, Channel};
use crate::error::Result;
use crate::lattice::Lattice;
use crate::tensor::{c, DenseOperator, SiteLabel, C64};

/// Complex Gaussian with independent standard normal parts.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Ginibre matrix.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |_, _| gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<C64> {
    let g = random_matrix(rng, n);
    (&g + g.adjoint()) * c(0.5, 0.0)
}

/// Unit vector, uniform on the sphere.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<C64> {
    let v = DVector::from_fn(n, |_, _| gaussian(rng));
    let norm = v.norm();
    v / c(norm, 0.0)
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal moved into Q.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<C64> {
    let qr = random_matrix(rng, n).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for x in q.column_mut(j).iter_mut() {
            *x *= phase;
        }
    }
    q
}

/// Density matrix `G G† / tr` with `G` an `n × rank` Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(n, rank, |_, _| gaussian(rng));
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho / c(tr, 0.0)
}

/// `rank` Kraus operators of a random channel on a `dim`-dimensional space,
/// cut from the first `dim` columns of a Haar unitary.
pub fn random_kraus<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> Vec<DMatrix<C64>> {
    let u = random_unitary(rng, dim * rank);
    (0..rank).map(|k| u.view((k * dim, 0), (dim, dim)).into_owned()).collect()
}

/// Families of random channels used to probe the predicates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RandomChannelKind {
    /// Random channel on a nearest-neighbour pair, identity elsewhere.
    AdjacentPair,
    /// Random channel on two sites further apart than the range.
    DistantPair,
    /// Convex mixture of two random products of single-site unitaries.
    LocalUnitaryMixture,
    /// Random channel on the whole lattice.
    Global,
}

impl RandomChannelKind {
    pub const ALL: [RandomChannelKind; 4] = [
        RandomChannelKind::AdjacentPair,
        RandomChannelKind::DistantPair,
        RandomChannelKind::LocalUnitaryMixture,
        RandomChannelKind::Global,
    ];
}

fn local_unitary_product<R: Rng + ?Sized>(rng: &mut R, lattice: &Lattice) -> Result<DenseOperator> {
    let mut u = DenseOperator::scalar(c(1.0, 0.0));
    for label in physical(lattice) {
        u = u.tensor_product(&DenseOperator::on_site(label, random_unitary(rng, lattice.local_dim()))?)?;
    }
    Ok(u)
}

/// Random channel of the requested family; Kraus ranks are drawn from 1..=4.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, lattice: &Lattice, kind: RandomChannelKind) -> Result<Channel> {
    let d = lattice.local_dim();
    let pair_channel = |rng: &mut R, a: usize, b: usize| -> Result<Channel> {
        let rank = rng.random_range(1..=4);
        let labels = [SiteLabel::physical(a), SiteLabel::physical(b)];
        let kraus = random_kraus(rng, d * d, rank)
            .into_iter()
            .map(|k| DenseOperator::new(labels.to_vec(), vec![d, d], k))
            .collect::<Result<Vec<_>>>()?;
        Channel::local_product(lattice, &[kraus])
    };
    let channel = match kind {
        RandomChannelKind::AdjacentPair => {
            let edges = lattice.edges();
            let (a, b) = edges[rng.random_range(0..edges.len())];
            pair_channel(rng, a, b)?
        }
        RandomChannelKind::DistantPair => {
            let pairs: Vec<(usize, usize)> = (0..lattice.num_sites())
                .flat_map(|a| (a + 1..lattice.num_sites()).map(move |b| (a, b)))
                .filter(|&(a, b)| lattice.distance(a, b).is_ok_and(|dist| dist > lattice.range()))
                .collect();
            let (a, b) = pairs[rng.random_range(0..pairs.len())];
            pair_channel(rng, a, b)?
        }
        RandomChannelKind::LocalUnitaryMixture => {
            let w = rng.random_range(0.1..0.9);
            let u1 = Channel::unitary(lattice, local_unitary_product(rng, lattice)?)?;
            let u2 = Channel::unitary(lattice, local_unitary_product(rng, lattice)?)?;
            Channel::convex_combine(&[w, 1.0 - w], &[u1, u2])?
        }
        RandomChannelKind::Global => {
            let rank = rng.random_range(1..=4);
            let v = physical(lattice);
            let kraus = random_kraus(rng, lattice.hilbert_dim(), rank)
                .into_iter()
                .map(|k| DenseOperator::new(v.clone(), vec![d; v.len()], k))
                .collect::<Result<Vec<_>>>()?;
            Channel::from_kraus(lattice, kraus)?
        }
    };
    Ok(channel.named(format!("random:{kind:?}")))
}
