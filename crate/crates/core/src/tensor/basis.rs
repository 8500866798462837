//! Generalized Pauli (Heisenberg–Weyl) operator bases.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::{c, DenseOperator, SiteLabel, C64};
use crate::error::Result;

/// `X^a Z^b` on a single qudit of dimension `d`, with `X|k⟩ = |k+1⟩` and
/// `Z|k⟩ = ω^k |k⟩`.
pub fn weyl_operator(d: usize, a: usize, b: usize) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(d, d);
    for k in 0..d {
        // Z^b first, then X^a; qubits get exact signs
        m[((k + a) % d, k)] = if d == 2 {
            c(if (b * k) % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        } else {
            let phase = 2.0 * PI * ((b * k) % d) as f64 / d as f64;
            c(phase.cos(), phase.sin())
        };
    }
    m
}

/// All `d^{2|labels|}` tensor products of Weyl operators on `labels`.
/// The identity comes first; every other element is traceless, and the
/// elements are orthogonal in the Hilbert–Schmidt inner product.
pub fn weyl_basis(labels: &[SiteLabel], d: usize) -> Result<Vec<DenseOperator>> {
    let locals: Vec<DMatrix<C64>> = (0..d * d).map(|k| weyl_operator(d, k / d, k % d)).collect();
    let mut out = vec![DenseOperator::scalar(c(1.0, 0.0))];
    for &label in labels {
        let mut next = Vec::with_capacity(out.len() * locals.len());
        for op in &out {
            for m in &locals {
                next.push(op.tensor_product(&DenseOperator::on_site(label, m.clone())?)?);
            }
        }
        out = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_is_orthogonal_and_complete() {
        for d in [2, 3] {
            let labels = [SiteLabel::physical(0), SiteLabel::ancilla(0)];
            let basis = weyl_basis(&labels, d).unwrap();
            let dim = d * d;
            assert_eq!(basis.len(), dim * dim);
            assert!(basis[0].approx_eq(&DenseOperator::identity_on(&labels, d).unwrap(), 0.0));
            for (i, x) in basis.iter().enumerate() {
                if i > 0 {
                    assert!(x.trace().norm() < 1e-12);
                }
                for (j, y) in basis.iter().enumerate() {
                    let ip = x.inner(y).unwrap();
                    let expected = if i == j { dim as f64 } else { 0.0 };
                    assert!((ip - c(expected, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn qubit_weyl_operators_are_paulis() {
        use crate::tensor::pauli;
        assert_eq!(weyl_operator(2, 1, 0), pauli::x());
        assert_eq!(weyl_operator(2, 0, 1), pauli::z());
        // XZ = -iY
        assert_eq!(weyl_operator(2, 1, 1), pauli::y() * c(0.0, -1.0));
    }
}
