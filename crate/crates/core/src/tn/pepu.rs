//! Extraction of a tensor-network description from a QCA through the
//! commuting projectors whose joint fixed point is the Choi vector of `U`,
//! and the operational simpleness test.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{bond_dimension_bound, Edge, Leg, Tensor, TensorNetworkOperator};
use crate::channels::{physical, Channel};
use crate::classify::{self, ClassifyOptions};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, SiteSet};
use crate::sampling::random_vector;
use crate::tensor::{c, check_cap, linalg, physical_labels, weyl_basis, DenseOperator, SiteLabel, StateVector, C64};

/// Product states tried before giving up on the projection step.
pub const PEPU_RETRIES: usize = 8;

/// Norm below which a projected product state counts as annihilated.
const ANNIHILATED: f64 = 1e-6;

/// The commuting projectors `Q̃_n = (U⊗1) Q_n (U⊗1)†` with
/// `Q_n = 1 − |Φ⟩⟨Φ|_{n n'}/d`, each restricted to the `r`-ball of `n` and
/// the ancilla `n'`.
#[derive(Clone, Debug)]
pub struct ParentHamiltonianData {
    pub qca: Channel,
    pub projectors: Vec<DenseOperator>,
    /// Largest `‖Q̃² − Q̃‖_F`.
    pub idempotence_residual: f64,
    /// Largest `‖[Q̃_n, Q̃_m]‖_F`.
    pub commutation_residual: f64,
    /// Largest `‖Q̃_n |Ψ⟩‖` for the normalized Choi vector `|Ψ⟩`.
    pub ground_state_residual: f64,
    pub spectrum_check: bool,
}

fn unitary_of(channel: &Channel) -> Result<DenseOperator> {
    match channel.unitary_operator(crate::DEFAULT_TOL)? {
        Some(u) => Ok(u),
        None => Err(Error::NotUnitary { deviation: classify::unitarity_residual(channel)? }),
    }
}

/// Normalized `(U ⊗ 1)|Φ⟩` with factors interleaved as `0, 0', 1, 1', …`.
pub(super) fn choi_vector(lattice: &Lattice, u: &DenseOperator) -> Result<StateVector> {
    let n = lattice.num_sites();
    let dim = lattice.hilbert_dim();
    let mut labels = Vec::with_capacity(2 * n);
    for site in 0..n {
        labels.push(SiteLabel::physical(site));
        labels.push(SiteLabel::ancilla(site));
    }
    let d = lattice.local_dim();
    let norm = 1.0 / (dim as f64).sqrt();
    let m = u.data();
    let mut data = DVector::<C64>::zeros(dim * dim);
    for s in 0..dim {
        for t in 0..dim {
            // interleave the digits of s and t
            let (mut idx, mut place, mut ss, mut tt) = (0usize, 1usize, s, t);
            for _ in 0..n {
                idx += (tt % d) * place;
                place *= d;
                idx += (ss % d) * place;
                place *= d;
                ss /= d;
                tt /= d;
            }
            data[idx] = m[(s, t)] * norm;
        }
    }
    StateVector::new(labels, vec![d; 2 * n], data)
}

impl ParentHamiltonianData {
    /// Builds the projectors and checks that each conjugated site operator
    /// stays inside the `r`-ball of its site.
    pub fn new(qca: &Channel) -> Result<Self> {
        let lattice = qca.lattice();
        let u = unitary_of(qca)?;
        let d = lattice.local_dim();
        let n = lattice.num_sites();
        let dim = lattice.hilbert_dim();
        let v = physical(lattice);
        let m = u.data();
        let mut projectors = Vec::with_capacity(n);
        for site in 0..n {
            let ball = physical_labels(&lattice.ball(site, lattice.range()));
            let outside: Vec<SiteLabel> = v.iter().filter(|l| !ball.contains(l)).copied().collect();
            let stride = d.pow((n - 1 - site) as u32);
            let columns = |digit: usize| -> Vec<usize> { (0..dim).filter(|col| (col / stride) % d == digit).collect() };
            let cols: Vec<Vec<usize>> = (0..d).map(columns).collect();
            let support = [ball.clone(), vec![SiteLabel::ancilla(site)]].concat();
            let mut t = DenseOperator::zeros(support.clone(), vec![d; support.len()])?;
            for i in 0..d {
                let ui = m.select_columns(&cols[i]);
                for j in 0..d {
                    let uj = m.select_columns(&cols[j]);
                    let y = DenseOperator::new(v.clone(), vec![d; n], &ui * uj.adjoint())?;
                    let local = y.partial_trace(&outside)?.scale_real(1.0 / (d as f64).powi(outside.len() as i32));
                    let spread = y.sub(&local.embed(&v, d)?)?.frobenius_norm() / y.frobenius_norm();
                    if spread > crate::DEFAULT_TOL {
                        return Err(Error::NotQca(format!(
                            "the image of a site-{site} operator leaves the radius-{} ball (residual {spread:.3e})",
                            lattice.range()
                        )));
                    }
                    let mut eij = DMatrix::<C64>::zeros(d, d);
                    eij[(i, j)] = c(1.0, 0.0);
                    let term = local.tensor_product(&DenseOperator::on_site(SiteLabel::ancilla(site), eij)?)?;
                    t = t.add(&term.scale_real(1.0 / d as f64))?;
                }
            }
            let q = DenseOperator::identity_on(t.support(), d)?.sub(&t)?;
            projectors.push(q);
        }
        let idempotence_residual = projectors
            .iter()
            .map(|q| Ok(q.matmul(q)?.sub(q)?.frobenius_norm()))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let mut commutation_residual = 0.0f64;
        for (a, qa) in projectors.iter().enumerate() {
            for qb in &projectors[a + 1..] {
                if qa.support().iter().all(|l| !qb.support().contains(l)) {
                    continue;
                }
                let mut union: Vec<SiteLabel> = qa.support().to_vec();
                union.extend(qb.support().iter().filter(|l| !qa.support().contains(l)));
                let (ea, eb) = (qa.embed(&union, d)?, qb.embed(&union, d)?);
                let comm = ea.matmul(&eb)?.sub(&eb.matmul(&ea)?)?;
                commutation_residual = commutation_residual.max(comm.frobenius_norm());
            }
        }
        let psi = choi_vector(lattice, &u)?;
        let mut ground_state_residual = 0.0f64;
        for q in &projectors {
            ground_state_residual = ground_state_residual.max(psi.apply(q)?.norm());
        }
        let eps = crate::EPS_NUM;
        Ok(ParentHamiltonianData {
            qca: qca.clone(),
            projectors,
            idempotence_residual,
            commutation_residual,
            ground_state_residual,
            spectrum_check: idempotence_residual <= eps && commutation_residual <= eps && ground_state_residual <= eps,
        })
    }

    /// `T_n = 1 − Q̃_n`.
    pub fn complements(&self) -> Result<Vec<DenseOperator>> {
        let d = self.qca.lattice().local_dim();
        self.projectors.iter().map(|q| DenseOperator::identity_on(q.support(), d)?.sub(q)).collect()
    }
}

/// Output of [`build_pepu_from_qca`].
#[derive(Clone, Debug, Serialize)]
pub struct PepuConstruction {
    pub tno: TensorNetworkOperator,
    pub bond_dimension: usize,
    pub bond_dimension_bound: Option<u128>,
    /// `‖contract(tno) − U‖_F / ‖U‖_F`.
    pub reconstruction_residual: f64,
    pub seed: u64,
    /// Product states sampled, including the successful one.
    pub attempts: usize,
    /// Norm of the projected product state, `|⟨Ψ|α⟩|`.
    pub projection_norm: f64,
    pub idempotence_residual: f64,
    pub commutation_residual: f64,
    pub spectrum_check: bool,
    pub version: String,
}

/// Projects a random product state onto the Choi vector of the QCA and
/// splits it into site tensors by sequential SVDs along the snake order.
pub fn build_pepu_from_qca(qca: &Channel, r: usize, seed: u64) -> Result<PepuConstruction> {
    let channel = qca.with_range(r)?;
    let lattice = channel.lattice().clone();
    let u = unitary_of(&channel)?;
    let options = ClassifyOptions::default();
    if !lattice.regions(options.policy).is_empty() {
        let (causal, residual) = classify::is_cpqc(&channel, options)?;
        if !causal {
            return Err(Error::NotQca(format!("causality residual {residual:.3e} at range {r}")));
        }
    }
    let parent = ParentHamiltonianData::new(&channel)?;
    if !parent.spectrum_check {
        return Err(Error::NotQca(format!(
            "projector checks failed (idempotence {:.3e}, commutation {:.3e}, ground state {:.3e})",
            parent.idempotence_residual, parent.commutation_residual, parent.ground_state_residual
        )));
    }
    let t_ops = parent.complements()?;
    let psi = choi_vector(&lattice, &u)?;
    let d = lattice.local_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut projected = None;
    let mut attempts = 0;
    while attempts < PEPU_RETRIES {
        attempts += 1;
        let locals: Vec<DVector<C64>> = (0..psi.labels().len()).map(|_| random_vector(&mut rng, d)).collect();
        let mut state = StateVector::product(psi.labels().to_vec(), &locals)?;
        for t in &t_ops {
            state = state.apply(t)?;
        }
        if state.norm() >= ANNIHILATED {
            projected = Some(state);
            break;
        }
    }
    let state = projected.ok_or(Error::ProjectionFailed { attempts })?;
    let projection_norm = state.norm();
    let overlap = psi.inner(&state)?;
    let state = state.scale(overlap.conj() / (overlap.norm() * projection_norm));

    let order = lattice.snake_order();
    let mut labels = Vec::with_capacity(2 * order.len());
    for &site in &order {
        labels.push(SiteLabel::physical(site));
        labels.push(SiteLabel::ancilla(site));
    }
    let state = state.reordered(&labels)?;
    let tno = split_into_sites(&lattice, &order, state.data(), (lattice.hilbert_dim() as f64).sqrt())?;
    let reconstruction_residual = match check_cap(lattice.hilbert_dim()) {
        Ok(()) => {
            let dense = tno.contract_to_dense()?;
            dense.sub(&u)?.frobenius_norm() / u.frobenius_norm()
        }
        Err(_) => f64::NAN,
    };
    if reconstruction_residual > crate::DEFAULT_TOL {
        return Err(Error::MalformedNetwork(format!(
            "contracted network differs from U (residual {reconstruction_residual:.3e})"
        )));
    }
    Ok(PepuConstruction {
        bond_dimension: tno.bond_dimension(),
        bond_dimension_bound: bond_dimension_bound(d, lattice.dimension()).ok(),
        tno,
        reconstruction_residual,
        seed,
        attempts,
        projection_norm,
        idempotence_residual: parent.idempotence_residual,
        commutation_residual: parent.commutation_residual,
        spectrum_check: parent.spectrum_check,
        version: crate::VERSION.to_string(),
    })
}

/// Left-to-right SVD sweep over a vector whose factors are `(n, n')` pairs in
/// `order`; singular values at or below the threshold are dropped. The
/// `(n, n')` leg becomes the `(out, in)` pair of site `n`, and `scale`
/// multiplies the last tensor.
pub(super) fn split_into_sites(lattice: &Lattice, order: &[usize], vector: &DVector<C64>, scale: f64) -> Result<TensorNetworkOperator> {
    let d = lattice.local_dim();
    let p = d * d;
    let n = order.len();
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut site_data: Vec<(usize, Vec<C64>, usize, usize)> = Vec::with_capacity(n);
    // rem is row-major (left bond, rest)
    let mut left = 1usize;
    let mut rem: Vec<C64> = vector.iter().copied().collect();
    for k in 0..n - 1 {
        let rest = rem.len() / (left * p);
        let mat = DMatrix::from_row_slice(left * p, rest, &rem);
        let dec = linalg::svd(&mat);
        let keep = dec.singular_values.iter().filter(|&&s| s > crate::EPS_SVD).count().max(1);
        let a: Vec<C64> = (0..left * p).flat_map(|i| (0..keep).map(move |j| (i, j))).map(|(i, j)| dec.u[(i, j)]).collect();
        site_data.push((order[k], a, left, keep));
        let mut next = Vec::with_capacity(keep * rest);
        for i in 0..keep {
            for j in 0..rest {
                next.push(c(dec.singular_values[i], 0.0) * dec.v_adj[(i, j)]);
            }
        }
        edges.push(Edge { sites: [order[k], order[k + 1]], dim: keep });
        rem = next;
        left = keep;
    }
    site_data.push((order[n - 1], rem.into_iter().map(|z| z * scale).collect(), left, 1));

    let mut tensors: Vec<Option<Tensor>> = vec![None; n];
    for (k, (site, data, dl, dr)) in site_data.into_iter().enumerate() {
        // data is row-major over (left, out, in, right); end bonds have dimension 1
        let mut legs = Vec::new();
        let mut dims = Vec::new();
        if k > 0 {
            legs.push(Leg::Bond(k - 1));
            dims.push(dl);
        }
        legs.extend([Leg::Out(site), Leg::In(site)]);
        dims.extend([d, d]);
        if k + 1 < n {
            legs.push(Leg::Bond(k));
            dims.push(dr);
        }
        let t = Tensor::new(legs, dims, data)?;
        tensors[site] = Some(t);
    }
    let tensors = tensors.into_iter().map(|t| t.expect("every site visited")).collect();
    TensorNetworkOperator::new(lattice, tensors, edges)
}

/// Largest deviation from
/// `tr_{a,b}(U X Y U†) = d^{-N} tr_{a,B̄}(U X U†) ⊗ tr_{Ā,b}(U Y U†)` over
/// operator bases `X` on `Ā` and `Y` on `B̄`, relative to the largest left
/// side.
pub fn simple_residual(qca: &Channel, region: &SiteSet) -> Result<f64> {
    let lattice = qca.lattice();
    let u = unitary_of(qca)?;
    let p = lattice.partition(region)?;
    if !p.in_s() {
        return Err(Error::InvalidSpec(format!("region {region:?} has an empty exterior")));
    }
    let d = lattice.local_dim();
    let v = physical(lattice);
    let big_d = lattice.hilbert_dim();
    let (la, lb) = (physical_labels(&p.region), physical_labels(&p.exterior));
    let traced = [physical_labels(&p.neighborhood), physical_labels(&p.shell)].concat();
    let order = [la.clone(), lb.clone(), traced.clone()].concat();
    let (da, db, dt) = (d.pow(la.len() as u32), d.pow(lb.len() as u32), d.pow(traced.len() as u32));
    let dk = da * db;
    let conjugated = |labels: Vec<SiteLabel>| -> Result<Vec<DMatrix<C64>>> {
        weyl_basis(&labels, d)?
            .into_iter()
            .map(|x| {
                let y = u.matmul(&x.embed(&v, d)?)?.matmul(&u.adjoint())?;
                y.matrix_in_order(&order)
            })
            .collect()
    };
    let fs = conjugated(physical_labels(&p.closure()))?;
    let gs = conjugated(physical_labels(&p.outer_closure()))?;
    let (nx, ny) = (fs.len(), gs.len());

    // F[(x,k),(t,m)] = F_x[(k,t),m] and G[(t,m),(y,k')] = G_y[m,(k',t)]
    let f_big = DMatrix::from_fn(nx * dk, dt * big_d, |row, col| {
        let (x, k) = (row / dk, row % dk);
        let (t, m) = (col / big_d, col % big_d);
        fs[x][(k * dt + t, m)]
    });
    let g_big = DMatrix::from_fn(dt * big_d, ny * dk, |row, col| {
        let (t, m) = (row / big_d, row % big_d);
        let (y, k) = (col / dk, col % dk);
        gs[y][(m, k * dt + t)]
    });
    let lhs = f_big * g_big;

    let reduce_a = |f: &DMatrix<C64>| {
        DMatrix::from_fn(da, da, |i, j| {
            let mut acc = c(0.0, 0.0);
            for kb in 0..db {
                for t in 0..dt {
                    acc += f[((i * db + kb) * dt + t, (j * db + kb) * dt + t)];
                }
            }
            acc
        })
    };
    let reduce_b = |g: &DMatrix<C64>| {
        DMatrix::from_fn(db, db, |i, j| {
            let mut acc = c(0.0, 0.0);
            for ka in 0..da {
                for t in 0..dt {
                    acc += g[((ka * db + i) * dt + t, (ka * db + j) * dt + t)];
                }
            }
            acc
        })
    };
    let fa: Vec<DMatrix<C64>> = fs.iter().map(reduce_a).collect();
    let gb: Vec<DMatrix<C64>> = gs.iter().map(reduce_b).collect();
    let inv = 1.0 / big_d as f64;
    let (mut worst_diff, mut worst_lhs) = (0.0f64, 0.0f64);
    for x in 0..nx {
        for y in 0..ny {
            let (mut diff, mut norm) = (0.0, 0.0);
            for ka in 0..da {
                for kb in 0..db {
                    for ka2 in 0..da {
                        for kb2 in 0..db {
                            let l = lhs[(x * dk + ka * db + kb, y * dk + ka2 * db + kb2)];
                            let r = fa[x][(ka, ka2)] * gb[y][(kb, kb2)] * inv;
                            diff += (l - r).norm_sqr();
                            norm += l.norm_sqr();
                        }
                    }
                }
            }
            worst_diff = worst_diff.max(diff.sqrt());
            worst_lhs = worst_lhs.max(norm.sqrt());
        }
    }
    Ok(if worst_lhs == 0.0 { worst_diff } else { worst_diff / worst_lhs })
}

/// Operational simpleness test over the regions of the sweep policy.
pub fn is_simple(qca: &Channel, options: ClassifyOptions) -> Result<(bool, f64)> {
    unitary_of(qca)?;
    let mut worst = 0.0f64;
    for region in classify::regions(qca.lattice(), options.policy)? {
        worst = worst.max(simple_residual(qca, &region)?);
    }
    Ok((worst <= options.tol, worst))
}

