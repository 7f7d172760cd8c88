//! The passage from 2-arrows and composites to module maps: the natural
//! transformation from a tensor product onto the module of a composite, the
//! unitary induced by an isomorphism of correspondences, and the coherence
//! checks of the resulting assignment.

use nalgebra::DMatrix;

use crate::correspondence::{Composite, CorrIso, Correspondence};
use crate::error::{Error, Result};
use crate::rat::to_f64;
use crate::report::Report;

use super::linalg::{c, max_abs_diff, rank, C};
use super::module::{build_module, HilbertBimodule};
use super::tensor::{inner_elementary, tensor_index};

/// The map `f⊗g ↦ ∫ f(x·η) g(η⁻¹·y) b^{-1/2}(x·η, η⁻¹y) dβ(η)` from the
/// tensor product of the factor modules onto the module of the composite,
/// using the same cochain `b` that built the composite's measures.
pub struct NatTransform {
    /// Columns indexed by elementary tensors, rows by composite classes.
    pub matrix: DMatrix<C>,
}

impl NatTransform {
    pub fn apply(&self, tensor_coords: &[C]) -> Vec<C> {
        let v = nalgebra::DVector::from_column_slice(tensor_coords);
        (&self.matrix * v).iter().copied().collect()
    }
}

pub fn nat_transform(
    first: &HilbertBimodule,
    second: &HilbertBimodule,
    target: &HilbertBimodule,
    comp: &Composite,
    tol: f64,
) -> Result<(NatTransform, Report)> {
    let mut report = Report::new();
    let (n1, n2) = (first.dim(), second.dim());
    let n_classes = comp.trace.orbits.n_classes();
    if target.dim() != n_classes {
        return Err(Error::Invalid("target module does not match the composite".into()));
    }
    let h = &comp.trace.tg.acting.groupoid;
    let haar = &comp.trace.tg.acting.haar;
    let b_invsqrt: Vec<f64> = comp
        .trace
        .cochain
        .0
        .iter()
        .map(|v| 1.0 / to_f64(v).sqrt())
        .collect();

    // Column of the elementary tensor δ_x ⊗ δ_y at class ω, computed from a
    // chosen basepoint of ω.
    let column_from = |base: u32, x0: u32, y0: u32| -> f64 {
        let (xr, yr) = comp.trace.fp.pairs[base as usize];
        let x_b = &comp.trace.fp;
        let mut acc = 0.0f64;
        for &eta in h.range_fiber(second.corr.bispace.rho(yr)) {
            let x_moved = first.corr.bispace.right_act(xr, eta).expect("composable");
            let y_moved = second
                .corr
                .bispace
                .left_act(h.inv(eta), yr)
                .expect("composable");
            if x_moved == x0 && y_moved == y0 {
                let pair = x_b.pair_index(x_moved, y_moved).expect("stays inside");
                acc += b_invsqrt[pair as usize] * to_f64(haar.weight(eta));
            }
        }
        acc
    };

    let mut matrix = DMatrix::<C>::zeros(n_classes, n1 * n2);
    let mut rep_defect = 0.0f64;
    for class in 0..n_classes as u32 {
        let members = comp.trace.orbits.members(class);
        let rep = comp.trace.orbits.reps[class as usize];
        for x0 in 0..n1 as u32 {
            for y0 in 0..n2 as u32 {
                let val = column_from(rep, x0, y0);
                for &m in &members {
                    rep_defect = rep_defect.max((column_from(m, x0, y0) - val).abs());
                }
                matrix[(class as usize, tensor_index(n2, x0, y0))] = c(val);
            }
        }
    }
    report.check_residual("nat.representative_independent", rep_defect, tol);
    let phi = NatTransform { matrix };

    // inner-product preservation on every elementary pair
    let mut worst = 0.0f64;
    for i1 in 0..n1 as u32 {
        for j1 in 0..n2 as u32 {
            let a = phi_column(&phi, n2, i1, j1);
            for i2 in 0..n1 as u32 {
                for j2 in 0..n2 as u32 {
                    let b = phi_column(&phi, n2, i2, j2);
                    let lhs = target.inner(&a, &b);
                    let rhs = inner_elementary(first, second, i1, j1, i2, j2);
                    worst = worst.max(max_abs_diff(&lhs, &rhs));
                }
            }
        }
    }
    report.check_residual("nat.inner_product_preserved", worst, tol);
    report.check("nat.onto", rank(&phi.matrix, tol) == n_classes, || {
        "image does not span the composite module".into()
    });

    // intertwines the left action of the left algebra
    let ng = first.left_alg.dim();
    let mut worst = 0.0f64;
    for a in 0..ng as u32 {
        let mut phi_a = vec![c(0.0); ng];
        phi_a[a as usize] = c(1.0);
        for x0 in 0..n1 as u32 {
            let acted = first.left_act(&phi_a, &first.dirac(x0));
            for y0 in 0..n2 as u32 {
                let mut coords = vec![c(0.0); n1 * n2];
                for (xi, v) in acted.iter().enumerate() {
                    coords[tensor_index(n2, xi as u32, y0)] = *v;
                }
                let lhs = phi.apply(&coords);
                let rhs = target.left_act(&phi_a, &phi_column(&phi, n2, x0, y0));
                worst = worst.max(max_abs_diff(&lhs, &rhs));
            }
        }
    }
    report.check_residual("nat.left_intertwining", worst, tol);

    // intertwines the right action of the right algebra
    let nk = second.right_alg.dim();
    let mut worst = 0.0f64;
    for a in 0..nk as u32 {
        let mut psi = vec![c(0.0); nk];
        psi[a as usize] = c(1.0);
        for x0 in 0..n1 as u32 {
            for y0 in 0..n2 as u32 {
                let acted = second.right_act(&second.dirac(y0), &psi);
                let mut coords = vec![c(0.0); n1 * n2];
                for (yi, v) in acted.iter().enumerate() {
                    coords[tensor_index(n2, x0, yi as u32)] = *v;
                }
                let lhs = phi.apply(&coords);
                let rhs = target.right_act(&phi_column(&phi, n2, x0, y0), &psi);
                worst = worst.max(max_abs_diff(&lhs, &rhs));
            }
        }
    }
    report.check_residual("nat.right_intertwining", worst, tol);

    Ok((phi, report))
}

fn phi_column(phi: &NatTransform, n2: usize, x0: u32, y0: u32) -> Vec<C> {
    phi.matrix
        .column(tensor_index(n2, x0, y0))
        .iter()
        .copied()
        .collect()
}

/// The unitary induced by an isomorphism of correspondences:
/// `T(f) = f∘t⁻¹ · M^{1/2}` with `M` the stored derivative of the
/// pushed-forward family, and `T*(g) = g∘t · M^{-1/2}∘t`.
pub struct ModuleMap {
    pub forward: DMatrix<C>,
    pub adjoint: DMatrix<C>,
}

impl ModuleMap {
    pub fn identity(n: usize) -> Self {
        ModuleMap {
            forward: DMatrix::identity(n, n),
            adjoint: DMatrix::identity(n, n),
        }
    }

    pub fn apply(&self, f: &[C]) -> Vec<C> {
        let v = nalgebra::DVector::from_column_slice(f);
        (&self.forward * v).iter().copied().collect()
    }

    pub fn apply_adjoint(&self, g: &[C]) -> Vec<C> {
        let v = nalgebra::DVector::from_column_slice(g);
        (&self.adjoint * v).iter().copied().collect()
    }
}

pub fn unitary_from_iso(
    iso: &CorrIso,
    from: &HilbertBimodule,
    to: &HilbertBimodule,
    tol: f64,
) -> (ModuleMap, Report) {
    let n = from.dim();
    let m_sqrt: Vec<f64> = iso.rn.iter().map(|v| to_f64(v).sqrt()).collect();
    let mut forward = DMatrix::<C>::zeros(n, n);
    let mut adjoint = DMatrix::<C>::zeros(n, n);
    for p in 0..n {
        let q = iso.map[p] as usize;
        forward[(q, p)] = c(m_sqrt[q]);
        adjoint[(p, q)] = c(1.0 / m_sqrt[q]);
    }
    let map = ModuleMap { forward, adjoint };
    let mut report = Report::new();

    let id = DMatrix::<C>::identity(n, n);
    let tt = &map.adjoint * &map.forward;
    let tt2 = &map.forward * &map.adjoint;
    let r1 = (&tt - &id).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let r2 = (&tt2 - &id).iter().map(|v| v.norm()).fold(0.0, f64::max);
    report.check_residual("unitary.t_star_t", r1, tol);
    report.check_residual("unitary.t_t_star", r2, tol);

    // declared adjoint: ⟨T f, g⟩ = ⟨f, T* g⟩ on Dirac pairs
    let mut worst = 0.0f64;
    for p in 0..n as u32 {
        for q in 0..n as u32 {
            let lhs = to.inner(&map.apply(&from.dirac(p)), &to.dirac(q));
            let rhs = from.inner(&from.dirac(p), &map.apply_adjoint(&to.dirac(q)));
            worst = worst.max(max_abs_diff(&lhs, &rhs));
        }
    }
    report.check_residual("unitary.adjoint_relation", worst, tol);

    // right linearity: T(f·ψ) = T(f)·ψ
    let nh = from.right_alg.dim();
    let mut worst = 0.0f64;
    for p in 0..n as u32 {
        for a in 0..nh as u32 {
            let mut psi = vec![c(0.0); nh];
            psi[a as usize] = c(1.0);
            let lhs = map.apply(&from.right_act(&from.dirac(p), &psi));
            let rhs = to.right_act(&map.apply(&from.dirac(p)), &psi);
            worst = worst.max(max_abs_diff(&lhs, &rhs));
        }
    }
    report.check_residual("unitary.right_linear", worst, tol);

    // intertwines the left actions: T(φ·f) = φ·T(f)
    let ng = from.left_alg.dim();
    let mut worst = 0.0f64;
    for p in 0..n as u32 {
        for a in 0..ng as u32 {
            let mut phi = vec![c(0.0); ng];
            phi[a as usize] = c(1.0);
            let lhs = map.apply(&from.left_act(&phi, &from.dirac(p)));
            let rhs = to.left_act(&phi, &map.apply(&from.dirac(p)));
            worst = worst.max(max_abs_diff(&lhs, &rhs));
        }
    }
    report.check_residual("unitary.left_intertwining", worst, tol);

    (map, report)
}

/// The two routes around the associativity square of the assignment, on
/// every elementary triple: through the nested tensor maps on one side and
/// through the associator unitary on the other.
#[allow(clippy::too_many_arguments)]
pub fn check_functor_pentagon(
    x: &Correspondence,
    y: &Correspondence,
    z: &Correspondence,
    c12: &Composite,
    c12_3: &Composite,
    c23: &Composite,
    c1_23: &Composite,
    assoc_iso: &CorrIso,
    tol: f64,
) -> Result<Report> {
    let mut report = Report::new();
    let m1 = build_module(x, tol)?;
    let m2 = build_module(y, tol)?;
    let m3 = build_module(z, tol)?;
    let m12 = build_module(&c12.corr, tol)?;
    let m23 = build_module(&c23.corr, tol)?;
    let m_left = build_module(&c12_3.corr, tol)?;
    let m_right = build_module(&c1_23.corr, tol)?;

    let (phi12, r12) = nat_transform(&m1, &m2, &m12, c12, tol)?;
    let (phi23, r23) = nat_transform(&m2, &m3, &m23, c23, tol)?;
    let (phi_left, rl) = nat_transform(&m12, &m3, &m_left, c12_3, tol)?;
    let (phi_right, rr) = nat_transform(&m1, &m23, &m_right, c1_23, tol)?;
    for r in [r12, r23, rl, rr] {
        report.merge(r);
    }
    let (t_a, rt) = unitary_from_iso(assoc_iso, &m_left, &m_right, tol);
    report.merge(rt);

    let (n1, n2, n3) = (m1.dim(), m2.dim(), m3.dim());
    let mut worst = 0.0f64;
    for i in 0..n1 as u32 {
        for j in 0..n2 as u32 {
            for k in 0..n3 as u32 {
                // right-bracketed route: f1 ⊗ Φ23(f2⊗f3), then Φ_right
                let inner23 = phi23.apply(&elementary(n2, n3, j, k));
                let mut coords = vec![c(0.0); n1 * m23.dim()];
                for (w, v) in inner23.iter().enumerate() {
                    coords[tensor_index(m23.dim(), i, w as u32)] = *v;
                }
                let lhs = phi_right.apply(&coords);

                // left-bracketed route: Φ12(f1⊗f2) ⊗ f3, Φ_left, then T_a
                let inner12 = phi12.apply(&elementary(n1, n2, i, j));
                let mut coords = vec![c(0.0); m12.dim() * n3];
                for (v12, v) in inner12.iter().enumerate() {
                    coords[tensor_index(n3, v12 as u32, k)] = *v;
                }
                let rhs = t_a.apply(&phi_left.apply(&coords));
                worst = worst.max(max_abs_diff(&lhs, &rhs));
            }
        }
    }
    report.check_residual("functor.pentagon", worst, tol);
    Ok(report)
}

fn elementary(n1: usize, n2: usize, i: u32, j: u32) -> Vec<C> {
    let mut v = vec![c(0.0); n1 * n2];
    v[tensor_index(n2, i, j)] = c(1.0);
    v
}

/// Identity coherence on both sides: the unitary of the unitor composed
/// with the tensor map equals the plain module action pairing.
pub fn check_identity_coherence(
    x: &Correspondence,
    left_comp: &Composite,
    left_unitor: &CorrIso,
    right_comp: &Composite,
    right_unitor: &CorrIso,
    tol: f64,
) -> Result<Report> {
    let mut report = Report::new();
    let m_x = build_module(x, tol)?;

    // left identity: T(Φ(f ⊗ g)) = f·g for f in the algebra of the left
    // groupoid (the identity correspondence's module) and g in the module.
    let id_left = crate::correspondence::identity_correspondence(&x.left);
    let m_id = build_module(&id_left, tol)?;
    let m_comp = build_module(&left_comp.corr, tol)?;
    let (phi, rp) = nat_transform(&m_id, &m_x, &m_comp, left_comp, tol)?;
    report.merge(rp);
    let (t, rt) = unitary_from_iso(left_unitor, &m_comp, &m_x, tol);
    report.merge(rt);
    let (ng, nx) = (m_id.dim(), m_x.dim());
    let mut worst = 0.0f64;
    for a in 0..ng as u32 {
        for p in 0..nx as u32 {
            let lhs = t.apply(&phi.apply(&elementary(ng, nx, a, p)));
            let mut f = vec![c(0.0); ng];
            f[a as usize] = c(1.0);
            let rhs = m_x.left_act(&f, &m_x.dirac(p));
            worst = worst.max(max_abs_diff(&lhs, &rhs));
        }
    }
    report.check_residual("functor.left_identity_coherence", worst, tol);

    // right identity: T(Φ(f ⊗ ψ)) = f·ψ
    let id_right = crate::correspondence::identity_correspondence(&x.right);
    let m_idr = build_module(&id_right, tol)?;
    let m_rcomp = build_module(&right_comp.corr, tol)?;
    let (phi_r, rp) = nat_transform(&m_x, &m_idr, &m_rcomp, right_comp, tol)?;
    report.merge(rp);
    let (t_r, rt) = unitary_from_iso(right_unitor, &m_rcomp, &m_x, tol);
    report.merge(rt);
    let nh = m_idr.dim();
    let mut worst = 0.0f64;
    for p in 0..nx as u32 {
        for a in 0..nh as u32 {
            let lhs = t_r.apply(&phi_r.apply(&elementary(nx, nh, p, a)));
            let mut psi = vec![c(0.0); nh];
            psi[a as usize] = c(1.0);
            let rhs = m_x.right_act(&m_x.dirac(p), &psi);
            worst = worst.max(max_abs_diff(&lhs, &rhs));
        }
    }
    report.check_residual("functor.right_identity_coherence", worst, tol);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{swap_correspondence, z2};
    use crate::correspondence::{
        associator, compose, from_space_map, identity_correspondence, unitor_left, unitor_right,
    };

    const TOL: f64 = 1e-9;

    #[test]
    fn nat_transform_on_identity_pair_is_unitary() {
        let id = identity_correspondence(&z2());
        let comp = compose(&id, &id, None).unwrap();
        let m = build_module(&id, TOL).unwrap();
        let mc = build_module(&comp.corr, TOL).unwrap();
        let (_, rep) = nat_transform(&m, &m, &mc, &comp, TOL).unwrap();
        assert!(rep.passed(), "{}", rep.render_human());
    }

    #[test]
    fn nat_transform_through_nontrivial_cochain() {
        let id = identity_correspondence(&z2());
        let sw = swap_correspondence();
        let comp = compose(&id, &sw, None).unwrap();
        let m1 = build_module(&id, TOL).unwrap();
        let m2 = build_module(&sw, TOL).unwrap();
        let mc = build_module(&comp.corr, TOL).unwrap();
        let (_, rep) = nat_transform(&m1, &m2, &mc, &comp, TOL).unwrap();
        assert!(rep.passed(), "{}", rep.render_human());
    }

    #[test]
    fn unitary_from_swap_iso() {
        let sw = swap_correspondence();
        let m = build_module(&sw, TOL).unwrap();
        let flip = CorrIso::new(&sw, &sw, vec![1, 0]).unwrap();
        let (t, rep) = unitary_from_iso(&flip, &m, &m, TOL);
        assert!(rep.passed(), "{}", rep.render_human());
        // functoriality: T(flip)·T(flip) = T(flip∘flip) = Id
        let square = &t.forward * &t.forward;
        let id = DMatrix::<C>::identity(2, 2);
        assert!((square - id).iter().map(|v| v.norm()).fold(0.0, f64::max) < TOL);
    }

    #[test]
    fn functor_pentagon_identity_chain() {
        let id = identity_correspondence(&z2());
        let c12 = compose(&id, &id, None).unwrap();
        let c23 = compose(&id, &id, None).unwrap();
        let c12_3 = compose(&c12.corr, &id, None).unwrap();
        let c1_23 = compose(&id, &c23.corr, None).unwrap();
        let a = associator(&id, &id, &id, &c12, &c12_3, &c23, &c1_23).unwrap();
        let rep =
            check_functor_pentagon(&id, &id, &id, &c12, &c12_3, &c23, &c1_23, &a.iso, TOL).unwrap();
        assert!(rep.passed(), "{}", rep.render_human());
    }

    #[test]
    fn functor_pentagon_with_swap() {
        let triv = crate::correspondence::group_with_constant_haar(
            "1",
            crate::groupoid::FiniteGroupoid::cyclic_group(1),
            crate::rat::one(),
        )
        .unwrap();
        let x = crate::correspondence::from_group_hom(&triv, &z2(), &[0]).unwrap();
        let y = swap_correspondence();
        let z = from_space_map(&[0], 1, 1).unwrap();
        let c12 = compose(&x, &y, None).unwrap();
        let c23 = compose(&y, &z, None).unwrap();
        let c12_3 = compose(&c12.corr, &z, None).unwrap();
        let c1_23 = compose(&x, &c23.corr, None).unwrap();
        let a = associator(&x, &y, &z, &c12, &c12_3, &c23, &c1_23).unwrap();
        let rep =
            check_functor_pentagon(&x, &y, &z, &c12, &c12_3, &c23, &c1_23, &a.iso, TOL).unwrap();
        assert!(rep.passed(), "{}", rep.render_human());
    }

    #[test]
    fn identity_coherence_for_swap() {
        let sw = swap_correspondence();
        let idl = identity_correspondence(&sw.left);
        let idr = identity_correspondence(&sw.right);
        let lc = compose(&idl, &sw, None).unwrap();
        let rc = compose(&sw, &idr, None).unwrap();
        let lu = unitor_left(&sw, &lc).unwrap();
        let ru = unitor_right(&sw, &rc).unwrap();
        let rep = check_identity_coherence(&sw, &lc, &lu.iso, &rc, &ru.iso, TOL).unwrap();
        assert!(rep.passed(), "{}", rep.render_human());
    }
}
