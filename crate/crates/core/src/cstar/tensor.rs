//! Interior tensor product of Hilbert bimodules: the algebraic tensor of
//! the carriers carries the algebra-valued semi-inner product
//! `⟨f⊗g, f'⊗g'⟩ = ⟨g, ⟨f, f'⟩·g'⟩`; its null space is cut out by rank
//! reduction of the trace Gram matrix.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::report::Report;

use super::linalg::{hermitian_eigenvalues, rank, C};
use super::module::HilbertBimodule;

pub struct TensorModule<'a> {
    pub first: &'a HilbertBimodule,
    pub second: &'a HilbertBimodule,
    /// Trace Gram matrix of the elementary Dirac tensors.
    pub gram: DMatrix<C>,
    /// Dimension of the quotient by the null space, at the tolerance the
    /// tensor was built with.
    pub dim: usize,
}

/// Index of the elementary tensor `δ_i ⊗ δ_j`.
pub fn tensor_index(m2_dim: usize, i: u32, j: u32) -> usize {
    i as usize * m2_dim + j as usize
}

/// The algebra-valued inner product of two elementary tensors, as a
/// function on the right groupoid of `second`.
pub fn inner_elementary(
    first: &HilbertBimodule,
    second: &HilbertBimodule,
    i1: u32,
    j1: u32,
    i2: u32,
    j2: u32,
) -> Vec<C> {
    let mid = first.inner(&first.dirac(i1), &first.dirac(i2));
    let acted = second.left_act(&mid, &second.dirac(j2));
    second.inner(&second.dirac(j1), &acted)
}

/// Inner product of arbitrary tensor-coordinate vectors (length
/// `dim1 * dim2`), extended sesquilinearly from the elementary values.
pub fn inner_tensor_vectors(
    first: &HilbertBimodule,
    second: &HilbertBimodule,
    a: &[C],
    b: &[C],
) -> Vec<C> {
    let n2 = second.dim();
    let nk = second.right_alg.dim();
    let mut out = vec![C::new(0.0, 0.0); nk];
    for (ia, va) in a.iter().enumerate() {
        if va.norm() == 0.0 {
            continue;
        }
        for (ib, vb) in b.iter().enumerate() {
            if vb.norm() == 0.0 {
                continue;
            }
            let (i1, j1) = ((ia / n2) as u32, (ia % n2) as u32);
            let (i2, j2) = ((ib / n2) as u32, (ib % n2) as u32);
            let elem = inner_elementary(first, second, i1, j1, i2, j2);
            let coeff = va.conj() * vb;
            for (o, e) in out.iter_mut().zip(elem.iter()) {
                *o += coeff * e;
            }
        }
    }
    out
}

/// Builds the interior tensor product data and checks Gram positivity.
pub fn interior_tensor<'a>(
    first: &'a HilbertBimodule,
    second: &'a HilbertBimodule,
    tol: f64,
) -> Result<(TensorModule<'a>, Report)> {
    if first.right_alg != second.left_alg {
        return Err(Error::GroupoidMismatch(
            "interior tensor product needs matching middle algebras".into(),
        ));
    }
    let (n1, n2) = (first.dim(), second.dim());
    let n = n1 * n2;
    let mut gram = DMatrix::<C>::zeros(n, n);
    for i1 in 0..n1 as u32 {
        for j1 in 0..n2 as u32 {
            for i2 in 0..n1 as u32 {
                for j2 in 0..n2 as u32 {
                    let ip = inner_elementary(first, second, i1, j1, i2, j2);
                    let val = second.right_alg.trace(&ip);
                    gram[(tensor_index(n2, i1, j1), tensor_index(n2, i2, j2))] = val;
                }
            }
        }
    }
    let mut report = Report::new();
    let sym = (gram.clone() + gram.adjoint()) * C::new(0.5, 0.0);
    let eigs = hermitian_eigenvalues(&sym);
    let min = eigs.first().copied().unwrap_or(0.0);
    report.check_residual("tensor.gram_positive", (-min).max(0.0), tol);
    let dim = rank(&gram, tol);
    Ok((
        TensorModule {
            first,
            second,
            gram,
            dim,
        },
        report,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{swap_correspondence, z2};
    use crate::correspondence::identity_correspondence;
    use crate::cstar::module::build_module;

    #[test]
    fn tensor_with_identity_module_keeps_dimension() {
        let sw = swap_correspondence();
        let id = identity_correspondence(&z2());
        let m_id = build_module(&id, 1e-9).unwrap();
        let m_sw = build_module(&sw, 1e-9).unwrap();
        let (t, rep) = interior_tensor(&m_id, &m_sw, 1e-9).unwrap();
        assert!(rep.passed(), "{}", rep.render_human());
        assert_eq!(t.dim, m_sw.dim());
    }

    #[test]
    fn swap_tensor_trivial_module_has_dimension_two() {
        let sw = swap_correspondence();
        let m_sw = build_module(&sw, 1e-9).unwrap();
        let triv = crate::correspondence::from_space_map(&[0], 1, 1).unwrap();
        let m_tr = build_module(&triv, 1e-9).unwrap();
        let (t, rep) = interior_tensor(&m_sw, &m_tr, 1e-9).unwrap();
        assert!(rep.passed());
        assert_eq!(t.dim, 2);
    }

    #[test]
    fn mismatched_middle_is_rejected() {
        let sw = swap_correspondence();
        let id = identity_correspondence(&z2());
        let m_id = build_module(&id, 1e-9).unwrap();
        let m_sw = build_module(&sw, 1e-9).unwrap();
        assert!(interior_tensor(&m_sw, &m_id, 1e-9).is_err());
    }
}
