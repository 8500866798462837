//! Tensor-network operators on the lattice: one tensor per site with an
//! output leg, an input leg and one bond leg per incident edge.
//!
//! Tensors are stored densely in row-major order over their legs.

mod pepu;

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::channels::physical;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::tensor::{c, check_cap, dense_cap, offsets, DenseOperator, C64};

pub use pepu::{
    build_pepu_from_qca, is_simple, simple_residual, ParentHamiltonianData, PepuConstruction, PEPU_RETRIES,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Leg {
    /// Output (row) index of the site's physical space.
    Out(usize),
    /// Input (column) index of the site's physical space.
    In(usize),
    /// Auxiliary index shared by the two tensors of an edge.
    Bond(usize),
}

/// Dense tensor with labelled legs.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    legs: Vec<Leg>,
    dims: Vec<usize>,
    data: Vec<C64>,
}

impl Tensor {
    pub fn new(legs: Vec<Leg>, dims: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        if legs.len() != dims.len() {
            return Err(Error::ShapeMismatch(format!("{} legs but {} dimensions", legs.len(), dims.len())));
        }
        if legs.iter().collect::<BTreeSet<_>>().len() != legs.len() {
            return Err(Error::MalformedNetwork(format!("repeated leg in {legs:?}")));
        }
        let size: usize = dims.iter().product();
        if size != data.len() || dims.contains(&0) {
            return Err(Error::ShapeMismatch(format!("dimensions {dims:?} do not match {} entries", data.len())));
        }
        Ok(Tensor { legs, dims, data })
    }

    pub fn from_fn(legs: Vec<Leg>, dims: Vec<usize>, f: impl Fn(&[usize]) -> C64) -> Result<Self> {
        let size: usize = dims.iter().product();
        let mut idx = vec![0usize; dims.len()];
        let mut data = Vec::with_capacity(size);
        for _ in 0..size {
            data.push(f(&idx));
            for k in (0..dims.len()).rev() {
                idx[k] += 1;
                if idx[k] < dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Tensor::new(legs, dims, data)
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn dim_of(&self, leg: Leg) -> Option<usize> {
        self.legs.iter().position(|&l| l == leg).map(|p| self.dims[p])
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Same tensor with legs in `order` (a permutation of the legs).
    pub fn permuted(&self, order: &[Leg]) -> Result<Self> {
        if order.len() != self.legs.len() {
            return Err(Error::ShapeMismatch("order must list every leg".into()));
        }
        let pos = order
            .iter()
            .map(|leg| {
                self.legs
                    .iter()
                    .position(|l| l == leg)
                    .ok_or_else(|| Error::MalformedNetwork(format!("no leg {leg:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let data = offsets(&self.dims, &pos).into_iter().map(|o| self.data[o]).collect();
        Ok(Tensor { legs: order.to_vec(), dims: pos.iter().map(|&p| self.dims[p]).collect(), data })
    }

    /// Sums over every leg the two tensors share. Free legs of `self` come
    /// first in the result.
    pub fn contract(&self, other: &Tensor) -> Result<Tensor> {
        let shared: Vec<Leg> = self.legs.iter().filter(|l| other.legs.contains(l)).copied().collect();
        for &leg in &shared {
            if self.dim_of(leg) != other.dim_of(leg) {
                return Err(Error::MalformedNetwork(format!(
                    "leg {leg:?} has dimension {:?} on one side and {:?} on the other",
                    self.dim_of(leg),
                    other.dim_of(leg)
                )));
            }
        }
        let free_a: Vec<Leg> = self.legs.iter().filter(|l| !shared.contains(l)).copied().collect();
        let free_b: Vec<Leg> = other.legs.iter().filter(|l| !shared.contains(l)).copied().collect();
        let a = self.permuted(&[free_a.clone(), shared.clone()].concat())?;
        let b = other.permuted(&[shared.clone(), free_b.clone()].concat())?;
        let rows: usize = a.dims[..free_a.len()].iter().product();
        let inner: usize = a.dims[free_a.len()..].iter().product();
        let cols: usize = b.dims[shared.len()..].iter().product();
        let cap = dense_cap();
        if rows.saturating_mul(cols) > cap.saturating_mul(cap) {
            return Err(Error::DimensionCap { requested: rows.saturating_mul(cols), cap: cap * cap });
        }
        let ma = DMatrix::from_row_slice(rows, inner, &a.data);
        let mb = DMatrix::from_row_slice(inner, cols, &b.data);
        let prod = ma * mb;
        let data = prod.transpose().as_slice().to_vec();
        let dims = [&a.dims[..free_a.len()], &b.dims[shared.len()..]].concat();
        Tensor::new([free_a, free_b].concat(), dims, data)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub sites: [usize; 2],
    pub dim: usize,
}

/// Tensor-network operator: tensor `n` carries `Out(n)`, `In(n)` and
/// `Bond(e)` for every edge `e` touching site `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TnoJson", into = "TnoJson")]
pub struct TensorNetworkOperator {
    lattice: Lattice,
    tensors: Vec<Tensor>,
    edges: Vec<Edge>,
}

impl TensorNetworkOperator {
    pub fn new(lattice: &Lattice, tensors: Vec<Tensor>, edges: Vec<Edge>) -> Result<Self> {
        let n = lattice.num_sites();
        let d = lattice.local_dim();
        if tensors.len() != n {
            return Err(Error::MalformedNetwork(format!("{} tensors for {n} sites", tensors.len())));
        }
        for (e, edge) in edges.iter().enumerate() {
            let [a, b] = edge.sites;
            if a == b || a >= n || b >= n || edge.dim == 0 {
                return Err(Error::MalformedNetwork(format!("edge {e} = {edge:?} is invalid")));
            }
        }
        for (site, t) in tensors.iter().enumerate() {
            let mut expected: BTreeSet<Leg> = [Leg::Out(site), Leg::In(site)].into();
            for (e, edge) in edges.iter().enumerate() {
                if edge.sites.contains(&site) {
                    expected.insert(Leg::Bond(e));
                }
            }
            if t.legs.iter().copied().collect::<BTreeSet<_>>() != expected {
                return Err(Error::MalformedNetwork(format!("tensor {site} has legs {:?}, expected {expected:?}", t.legs)));
            }
            for (&leg, &dim) in t.legs.iter().zip(&t.dims) {
                let want = match leg {
                    Leg::Out(_) | Leg::In(_) => d,
                    Leg::Bond(e) => edges[e].dim,
                };
                if dim != want {
                    return Err(Error::MalformedNetwork(format!(
                        "bond mismatch: leg {leg:?} of tensor {site} has dimension {dim}, expected {want}"
                    )));
                }
            }
        }
        Ok(TensorNetworkOperator { lattice: lattice.clone(), tensors, edges })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        self.edges.iter().map(|e| e.dim).collect()
    }

    /// Largest bond dimension (1 for a network without edges).
    pub fn bond_dimension(&self) -> usize {
        self.edges.iter().map(|e| e.dim).max().unwrap_or(1)
    }

    /// Contracts the tensors in site order.
    pub fn contract_to_dense(&self) -> Result<DenseOperator> {
        let order: Vec<usize> = (0..self.tensors.len()).collect();
        self.contract_in_order(&order)
    }

    /// Contracts the tensors in the given site order into the dense operator
    /// on `V`.
    pub fn contract_in_order(&self, order: &[usize]) -> Result<DenseOperator> {
        let n = self.tensors.len();
        if order.iter().copied().collect::<BTreeSet<_>>() != (0..n).collect() || order.len() != n {
            return Err(Error::InvalidSpec(format!("contraction order {order:?} is not a permutation of the sites")));
        }
        let dim = self.lattice.hilbert_dim();
        check_cap(dim)?;
        let mut acc = Tensor::new(vec![], vec![], vec![c(1.0, 0.0)])?;
        for &site in order {
            acc = acc.contract(&self.tensors[site])?;
        }
        let final_order: Vec<Leg> = (0..n).map(Leg::Out).chain((0..n).map(Leg::In)).collect();
        let acc = acc.permuted(&final_order)?;
        let matrix = DMatrix::from_row_slice(dim, dim, &acc.data);
        DenseOperator::new(physical(&self.lattice), vec![self.lattice.local_dim(); n], matrix)
    }
}

/// Network of single-site operators with trivial bonds on every lattice edge.
pub fn product_tno(lattice: &Lattice, locals: &[DMatrix<C64>]) -> Result<TensorNetworkOperator> {
    let d = lattice.local_dim();
    if locals.len() != lattice.num_sites() {
        return Err(Error::ShapeMismatch(format!("{} local operators for {} sites", locals.len(), lattice.num_sites())));
    }
    let edges: Vec<Edge> = lattice.edges().into_iter().map(|(a, b)| Edge { sites: [a, b], dim: 1 }).collect();
    let mut tensors = Vec::with_capacity(locals.len());
    for (site, u) in locals.iter().enumerate() {
        if u.shape() != (d, d) {
            return Err(Error::ShapeMismatch(format!("local operator {site} is {:?}, expected {d}x{d}", u.shape())));
        }
        let mut legs = vec![Leg::Out(site), Leg::In(site)];
        legs.extend(edges.iter().enumerate().filter(|(_, e)| e.sites.contains(&site)).map(|(k, _)| Leg::Bond(k)));
        let mut dims = vec![d, d];
        dims.resize(legs.len(), 1);
        tensors.push(Tensor::from_fn(legs, dims, |idx| u[(idx[0], idx[1])])?);
    }
    TensorNetworkOperator::new(lattice, tensors, edges)
}

pub fn identity_tno(lattice: &Lattice) -> Result<TensorNetworkOperator> {
    let d = lattice.local_dim();
    product_tno(lattice, &vec![DMatrix::identity(d, d); lattice.num_sites()])
}

/// Bond-dimension-`d` MPO of the cyclic shift on a periodic chain: the
/// input of site `n` travels along the bond to site `n + 1`.
pub fn shift_mpo(lattice: &Lattice) -> Result<TensorNetworkOperator> {
    let m = lattice.num_sites();
    if lattice.dimension() != 1 || lattice.boundary() != crate::lattice::Boundary::Periodic || m < 3 {
        return Err(Error::Unsupported("the shift MPO needs a periodic chain of at least 3 sites".into()));
    }
    let d = lattice.local_dim();
    // edge n joins n and n + 1
    let edges: Vec<Edge> = (0..m).map(|n| Edge { sites: [n, (n + 1) % m], dim: d }).collect();
    let tensors = (0..m)
        .map(|n| {
            let left = Leg::Bond((n + m - 1) % m);
            let right = Leg::Bond(n);
            Tensor::from_fn(vec![Leg::Out(n), Leg::In(n), left, right], vec![d; 4], |i| {
                if i[0] == i[2] && i[3] == i[1] { c(1.0, 0.0) } else { c(0.0, 0.0) }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    TensorNetworkOperator::new(lattice, tensors, edges)
}

/// A-priori bond dimension of the projector construction: `d^8` on a chain
/// and `d^16` on a square lattice.
pub fn bond_dimension_bound(d: usize, d_l: usize) -> Result<u128> {
    if d < 2 {
        return Err(Error::Unsupported(format!("local dimension {d} < 2")));
    }
    let exponent = match d_l {
        1 => 8,
        2 => 16,
        _ => return Err(Error::Unsupported(format!("no bond-dimension bound for {d_l}-dimensional lattices"))),
    };
    Ok((d as u128).pow(exponent))
}

#[derive(Serialize, Deserialize)]
struct TensorJson {
    site: usize,
    legs: Vec<Leg>,
    dims: Vec<usize>,
    re: Vec<f64>,
    im: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TnoJson {
    lattice: Lattice,
    bond_dims: Vec<Edge>,
    tensors: Vec<TensorJson>,
}

impl From<TensorNetworkOperator> for TnoJson {
    fn from(t: TensorNetworkOperator) -> Self {
        let tensors = t
            .tensors
            .into_iter()
            .enumerate()
            .map(|(site, x)| TensorJson {
                site,
                re: x.data.iter().map(|z| z.re).collect(),
                im: x.data.iter().map(|z| z.im).collect(),
                legs: x.legs,
                dims: x.dims,
            })
            .collect();
        TnoJson { lattice: t.lattice, bond_dims: t.edges, tensors }
    }
}

impl TryFrom<TnoJson> for TensorNetworkOperator {
    type Error = Error;

    fn try_from(j: TnoJson) -> Result<Self> {
        let mut tensors = j.tensors;
        tensors.sort_by_key(|t| t.site);
        let tensors = tensors
            .into_iter()
            .map(|t| {
                if t.re.len() != t.im.len() {
                    return Err(Error::ShapeMismatch("re and im differ in length".into()));
                }
                let data = t.re.iter().zip(&t.im).map(|(&r, &i)| c(r, i)).collect();
                Tensor::new(t.legs, t.dims, data)
            })
            .collect::<Result<Vec<_>>>()?;
        TensorNetworkOperator::new(&j.lattice, tensors, j.bond_dims)
    }
}
