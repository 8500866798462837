//! Gate circuits over labeled factors, used to build lattice unitaries and
//! the unitaries of Stinespring dilations.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{c, offsets, DenseOperator, SiteLabel, C64};

/// A gate: a unitary on a few labeled factors.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "DenseOperator", into = "DenseOperator")]
pub struct Gate {
    op: DenseOperator,
}

impl TryFrom<DenseOperator> for Gate {
    type Error = Error;

    fn try_from(op: DenseOperator) -> Result<Self> {
        Gate::new(op)
    }
}

impl From<Gate> for DenseOperator {
    fn from(gate: Gate) -> Self {
        gate.op
    }
}

impl Gate {
    pub fn new(op: DenseOperator) -> Result<Self> {
        let deviation = unitarity_deviation(op.data());
        if deviation > crate::EPS_NUM {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Gate { op })
    }

    pub fn on(labels: &[SiteLabel], matrix: DMatrix<C64>) -> Result<Self> {
        let d = (matrix.nrows() as f64).powf(1.0 / labels.len() as f64).round() as usize;
        Gate::new(DenseOperator::new(labels.to_vec(), vec![d; labels.len()], matrix)?)
    }

    pub fn op(&self) -> &DenseOperator {
        &self.op
    }
}

/// `‖U†U − I‖_F / √dim`
pub fn unitarity_deviation(u: &DMatrix<C64>) -> f64 {
    let n = u.nrows();
    if u.ncols() != n {
        return f64::INFINITY;
    }
    (u.adjoint() * u - DMatrix::<C64>::identity(n, n)).norm() / (n as f64).sqrt()
}

/// Ordered list of gates; the first gate acts first.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Circuit {
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new() -> Self {
        Circuit::default()
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn extend(&mut self, other: Circuit) {
        self.gates.extend(other.gates);
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Multiplies every column of `columns` (rows indexed by `labels`, each
    /// factor of dimension `d`) by the circuit.
    pub fn apply_to_columns(&self, labels: &[SiteLabel], d: usize, columns: &mut DMatrix<C64>) -> Result<()> {
        let dims = vec![d; labels.len()];
        for gate in &self.gates {
            let pos = gate
                .op
                .support()
                .iter()
                .map(|l| {
                    labels.iter().position(|x| x == l).ok_or_else(|| {
                        Error::SupportMismatch(format!("gate acts on {l}, which is outside the circuit"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            left_multiply_local(columns, &dims, &pos, gate.op.data());
        }
        Ok(())
    }

    /// The full unitary on `labels` in canonical order.
    pub fn unitary(&self, labels: &[SiteLabel], d: usize) -> Result<DenseOperator> {
        let mut sorted = labels.to_vec();
        sorted.sort();
        let id = DenseOperator::identity_on(&sorted, d)?;
        let mut data = id.into_data();
        self.apply_to_columns(&sorted, d, &mut data)?;
        DenseOperator::new(sorted, vec![d; labels.len()], data)
    }
}

/// `m ← (g on positions) · m`, rows of `m` factorized over `dims`.
pub(crate) fn left_multiply_local(m: &mut DMatrix<C64>, dims: &[usize], positions: &[usize], g: &DMatrix<C64>) {
    let rest: Vec<usize> = (0..dims.len()).filter(|p| !positions.contains(p)).collect();
    let local = offsets(dims, positions);
    let outer = offsets(dims, &rest);
    let k = local.len();
    for col in 0..m.ncols() {
        let mut column = m.column_mut(col);
        let mut buf = vec![c(0.0, 0.0); k];
        for &base in &outer {
            for (i, &off) in local.iter().enumerate() {
                buf[i] = column[base + off];
            }
            for (i, &off) in local.iter().enumerate() {
                let mut acc = c(0.0, 0.0);
                for (j, b) in buf.iter().enumerate() {
                    acc += g[(i, j)] * b;
                }
                column[base + off] = acc;
            }
        }
    }
}

/// Standard gates.
pub mod gates {
    use nalgebra::DMatrix;

    use crate::tensor::{c, C64};

    /// SWAP on two qudits of dimension `d`.
    pub fn swap(d: usize) -> DMatrix<C64> {
        DMatrix::from_fn(d * d, d * d, |i, j| {
            let (a, b) = (j / d, j % d);
            if i == b * d + a { c(1.0, 0.0) } else { c(0.0, 0.0) }
        })
    }

    /// Generalized CNOT: `|a, b⟩ ↦ |a, a + b mod d⟩`.
    pub fn cnot(d: usize) -> DMatrix<C64> {
        DMatrix::from_fn(d * d, d * d, |i, j| {
            let (a, b) = (j / d, j % d);
            if i == a * d + (a + b) % d { c(1.0, 0.0) } else { c(0.0, 0.0) }
        })
    }

    /// Controlled phase `|a, b⟩ ↦ ω^{ab} |a, b⟩`.
    pub fn cz(d: usize) -> DMatrix<C64> {
        DMatrix::from_fn(d * d, d * d, |i, j| {
            if i != j {
                return c(0.0, 0.0);
            }
            let (a, b) = (j / d, j % d);
            if d == 2 {
                return c(if a * b == 1 { -1.0 } else { 1.0 }, 0.0);
            }
            let phase = 2.0 * std::f64::consts::PI * ((a * b) % d) as f64 / d as f64;
            c(phase.cos(), phase.sin())
        })
    }

    /// Qudit Fourier transform (Hadamard for `d = 2`).
    pub fn fourier(d: usize) -> DMatrix<C64> {
        let norm = 1.0 / (d as f64).sqrt();
        DMatrix::from_fn(d, d, |i, j| {
            if d == 2 {
                return c(if i * j == 1 { -norm } else { norm }, 0.0);
            }
            let phase = 2.0 * std::f64::consts::PI * ((i * j) % d) as f64 / d as f64;
            c(norm * phase.cos(), norm * phase.sin())
        })
    }
}
