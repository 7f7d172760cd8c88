//! Composition of correspondences.
//!
//! Given `x: (G,α) → (H,β)` and `y: (H,β) → (K,κ)`, the composite lives on
//! the orbit space of the middle fibre product under the diagonal action.
//! The measure data is assembled in stages, all exact: the product measure
//! `m`, the quasi-invariance cocycle `D` on the transformation groupoid, a
//! 0-cochain `b` with `d0(b) = D` (solved, or supplied by the caller), the
//! induced family along the quotient with its cutoff, and the descended
//! family `μ`. The full construction trace is kept so that later stages can
//! reuse exactly the same `b`.

use crate::action::{OrbitPartition, TransformationGroupoid};
use crate::bispace::{fibre_product, Bispace, FibreProduct};
use crate::cohomology::{d0, solve_coboundary, verify_cocycle, OneCocycle, ZeroCochain};
use crate::error::{Error, Result};
use crate::measures::{descend_measure, induced_family_along_quotient, WeightFamily};
use crate::rat::Rat;
use crate::report::Report;

use super::Correspondence;

/// Everything `compose` built on the way to the composite.
#[derive(Debug, Clone)]
pub struct ComposeTrace {
    pub fp: FibreProduct,
    pub tg: TransformationGroupoid,
    pub orbits: OrbitPartition,
    /// The quasi-invariance 1-cocycle `D` on `tg`.
    pub cocycle: OneCocycle,
    /// The 0-cochain with `d0(b) = D` that produced the measures.
    pub cochain: ZeroCochain,
    pub cutoff: Vec<Rat>,
    /// Product measure family on the fibre product, over right units.
    pub m: WeightFamily,
    /// Haar-induced family along the orbit projection.
    pub lambda_fam: WeightFamily,
}

#[derive(Debug, Clone)]
pub struct Composite {
    pub corr: Correspondence,
    pub trace: ComposeTrace,
}

/// Builds the middle fibre product and its transformation groupoid; shared
/// between `compose` and callers that need to address cochains by pair.
pub fn middle_data(x: &Correspondence, y: &Correspondence) -> Result<(FibreProduct, TransformationGroupoid)> {
    if *x.right != *y.left {
        return Err(Error::GroupoidMismatch(format!(
            "cannot compose {:?} with {:?}: middle groupoids differ",
            x.name, y.name
        )));
    }
    let fp = fibre_product(
        &x.bispace,
        &y.bispace,
        &x.left.groupoid,
        &x.right.groupoid,
        &y.right.groupoid,
    )?;
    let tg = TransformationGroupoid::new(x.right.clone(), fp.diag.clone())?;
    Ok((fp, tg))
}

/// The quasi-invariance cocycle of the product measure: on the arrow
/// `((x,y), γ)` it is the modular function of `y` at `(γ⁻¹, y)`.
pub fn composition_cocycle(y: &Correspondence, fp: &FibreProduct, tg: &TransformationGroupoid) -> OneCocycle {
    let middle = &tg.acting.groupoid;
    let vals = (0..tg.n_arrows())
        .map(|i| {
            let (z, gamma) = tg.arrows[i];
            let (_, yi) = fp.pairs[z as usize];
            y.delta.expect(middle.inv(gamma), yi).clone()
        })
        .collect();
    OneCocycle(vals)
}

/// Composes two correspondences. When `cochain` is supplied its coboundary
/// must equal the composition cocycle; otherwise the spanning-tree solver
/// provides the canonical one.
pub fn compose(x: &Correspondence, y: &Correspondence, cochain: Option<&ZeroCochain>) -> Result<Composite> {
    let (fp, tg) = middle_data(x, y)?;
    let orbits = tg.orbits();
    let cocycle = composition_cocycle(y, &fp, &tg);
    let rep = verify_cocycle(&cocycle, &tg);
    if let Some(f) = rep.failures().next() {
        return Err(Error::Invalid(format!("composition cocycle is not a cocycle: {}", f.name)));
    }
    let b = match cochain {
        Some(b) => {
            if b.0.len() != fp.pairs.len() {
                return Err(Error::Invalid("supplied cochain does not cover the fibre product".into()));
            }
            if d0(b, &tg) != cocycle {
                return Err(Error::Invalid(
                    "supplied cochain has the wrong coboundary for this composition".into(),
                ));
            }
            b.clone()
        }
        None => solve_coboundary(&cocycle, &tg)?,
    };

    // product measure family m over right units: m(x,y) = λ_x(x)·λ_y(y)
    let k_units = y.right.groupoid.n_units();
    let m_pi: Vec<u32> = fp.pairs.iter().map(|&(_, yi)| y.bispace.sigma(yi)).collect();
    let m_w: Vec<Rat> = fp
        .pairs
        .iter()
        .map(|&(xi, yi)| x.lambda.weight(xi) * y.lambda.weight(yi))
        .collect();
    let m = WeightFamily::new(m_pi.clone(), k_units, m_w)?;

    let lambda_fam = induced_family_along_quotient(&tg, &orbits)?;
    let cutoff = lambda_fam.cutoff();

    // b·m is invariant exactly because d0(b) = D; descent certifies it
    let bm = WeightFamily::new(
        m_pi,
        k_units,
        m.w.iter().zip(b.0.iter()).map(|(a, c)| a * c).collect(),
    )?;
    let mu = descend_measure(&bm, &tg, &lambda_fam, &orbits)?;

    let bispace = quotient_bispace(x, y, &fp, &orbits)?;
    let corr = Correspondence::new(
        format!("({}.{})", x.name, y.name),
        x.left.clone(),
        y.right.clone(),
        bispace,
        mu,
    )?;
    let composite = Composite {
        corr,
        trace: ComposeTrace {
            fp,
            tg,
            orbits,
            cocycle,
            cochain: b,
            cutoff,
            m,
            lambda_fam,
        },
    };
    let formula = composite_delta_formula(x, &composite);
    if let Some(f) = formula.failures().next() {
        return Err(Error::Invalid(format!("composite modular function check failed: {}", f.name)));
    }
    Ok(composite)
}

/// The orbit space of the fibre product as a bispace with the descended
/// outer actions; every induced table entry is certified on every orbit
/// member, not just the representative.
fn quotient_bispace(
    x: &Correspondence,
    y: &Correspondence,
    fp: &FibreProduct,
    orbits: &OrbitPartition,
) -> Result<Bispace> {
    let g = &x.left.groupoid;
    let k = &y.right.groupoid;
    let n = orbits.n_classes();
    let points: Vec<String> = orbits
        .reps
        .iter()
        .map(|&rep| format!("[{}]", fp.outer.point_name(rep)))
        .collect();
    let rho: Vec<u32> = orbits.reps.iter().map(|&rep| fp.outer.rho(rep)).collect();
    let sigma: Vec<u32> = orbits.reps.iter().map(|&rep| fp.outer.sigma(rep)).collect();
    let mut left = vec![None; g.n_arrows() * n];
    let mut right = vec![None; n * k.n_arrows()];
    for c in 0..n as u32 {
        let members = orbits.members(c);
        for a in 0..g.n_arrows() as u32 {
            if g.src(a) == rho[c as usize] {
                let mut image = None;
                for &z in &members {
                    let az = fp.outer.left_act(a, z).ok_or_else(|| {
                        Error::InvalidAction("outer left action not orbit-uniform".into())
                    })?;
                    let cls = orbits.class_of[az as usize];
                    match image {
                        None => image = Some(cls),
                        Some(prev) if prev != cls => {
                            return Err(Error::InvalidAction(
                                "descended left action is not well-defined".into(),
                            ))
                        }
                        _ => {}
                    }
                }
                left[a as usize * n + c as usize] = image;
            }
        }
        for b in 0..k.n_arrows() as u32 {
            if sigma[c as usize] == k.rng(b) {
                let mut image = None;
                for &z in &members {
                    let zb = fp.outer.right_act(z, b).ok_or_else(|| {
                        Error::InvalidAction("outer right action not orbit-uniform".into())
                    })?;
                    let cls = orbits.class_of[zb as usize];
                    match image {
                        None => image = Some(cls),
                        Some(prev) if prev != cls => {
                            return Err(Error::InvalidAction(
                                "descended right action is not well-defined".into(),
                            ))
                        }
                        _ => {}
                    }
                }
                right[c as usize * k.n_arrows() + b as usize] = image;
            }
        }
    }
    Bispace::new(points, rho, sigma, left, right, g.n_arrows(), k.n_arrows())
}

/// Exact check of the composite modular function against its closed form
/// `Δ(η, [x,y]) = b(ηx, y)⁻¹ · Δ_x(η, x) · b(x, y)`, evaluated with every
/// representative of every class.
pub fn composite_delta_formula(x: &Correspondence, comp: &Composite) -> Report {
    let mut r = Report::new();
    let fp = &comp.trace.fp;
    let orbits = &comp.trace.orbits;
    let b = &comp.trace.cochain;
    let mut ok = true;
    let mut witness = String::new();
    'outer: for (eta, omega) in comp.corr.delta.composable_pairs() {
        let pipeline = comp.corr.delta.expect(eta, omega);
        for z in orbits.members(omega) {
            let (xi, yi) = fp.pairs[z as usize];
            let eta_x = x
                .bispace
                .left_act(eta, xi)
                .expect("composable on every representative");
            let z_moved = fp.pair_index(eta_x, yi).expect("pair stays in fibre product");
            let formula = &b.0[z as usize] * x.delta.expect(eta, xi) / &b.0[z_moved as usize];
            if &formula != pipeline {
                ok = false;
                witness = format!(
                    "closed form disagrees at ({}, {}) via representative {}",
                    x.left.groupoid.arrow_name(eta),
                    comp.corr.bispace.point_name(omega),
                    fp.outer.point_name(z)
                );
                break 'outer;
            }
        }
    }
    r.check("compose.delta_closed_form", ok, || witness.clone());
    r
}

/// A second, independent cochain for the same composition: the canonical
/// solver output rescaled by a deterministic positive constant per orbit.
/// Both produce valid composites; the pair exercises cochain independence.
pub fn alternative_cochain(comp: &Composite) -> ZeroCochain {
    let orbits = &comp.trace.orbits;
    let scales = [2i64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    let vals = comp
        .trace
        .cochain
        .0
        .iter()
        .enumerate()
        .map(|(z, v)| {
            let class = orbits.class_of[z] as usize;
            v * crate::rat::rat_int(scales[class % scales.len()])
        })
        .collect();
    ZeroCochain(vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correspondence::tests::{swap_correspondence, z2};
    use crate::correspondence::{from_space_map, identity_correspondence};
    use crate::rat::{one, rat, rat_int};

    #[test]
    fn space_maps_compose_to_the_composite_map() {
        // {1,2,3} -> {1,2} -> {1}: the composite correspondence is the one
        // of the composite map, with unit weights.
        let f = from_space_map(&[0, 0, 1], 3, 2).unwrap();
        let g = from_space_map(&[0, 0], 2, 1).unwrap();
        let comp = compose(&f, &g, None).unwrap();
        assert_eq!(comp.corr.n_points(), 3);
        assert!(comp.corr.validate().passed());
        assert!(comp.corr.lambda.w.iter().all(|w| *w == one()));
        assert!(comp.corr.delta.is_constant_one());
    }

    #[test]
    fn identity_compose_identity_is_identity_sized() {
        let id = identity_correspondence(&z2());
        let comp = compose(&id, &id, None).unwrap();
        assert_eq!(comp.corr.n_points(), 2);
        assert!(comp.corr.validate().passed());
    }

    #[test]
    fn nontrivial_cocycle_through_the_swap_example() {
        // id(Z2) ∘ swap: the middle Z/2 acts diagonally and the cocycle is
        // the swap example's modular function, so the solved cochain is not
        // constant.
        let id = identity_correspondence(&z2());
        let sw = swap_correspondence();
        let comp = compose(&id, &sw, None).unwrap();
        assert!(comp.trace.cochain.0.iter().any(|v| *v != one()));
        assert!(comp.corr.validate().passed());
        // Z = Z2 x {p,q} has 4 points in 2 orbits
        assert_eq!(comp.trace.fp.pairs.len(), 4);
        assert_eq!(comp.trace.orbits.n_classes(), 2);
        // composite measures are strictly positive rationals
        assert_eq!(comp.corr.lambda.w.len(), 2);
    }

    #[test]
    fn supplied_cochain_with_wrong_coboundary_is_rejected() {
        let id = identity_correspondence(&z2());
        let sw = swap_correspondence();
        let comp = compose(&id, &sw, None).unwrap();
        let mut bad = comp.trace.cochain.clone();
        bad.0[0] = &bad.0[0] * rat_int(3); // breaks d0 within an orbit
        assert!(compose(&id, &sw, Some(&bad)).is_err());
        // while an orbit-wise rescale is accepted
        let alt = alternative_cochain(&comp);
        let comp2 = compose(&id, &sw, Some(&alt)).unwrap();
        assert!(comp2.corr.validate().passed());
        // and the two composite families differ by the orbit scales
        let ratio: Vec<_> = comp2
            .corr
            .lambda
            .w
            .iter()
            .zip(comp.corr.lambda.w.iter())
            .map(|(a, b)| a / b)
            .collect();
        assert_eq!(ratio, vec![rat_int(2), rat_int(3)]);
    }

    #[test]
    fn middle_mismatch_is_an_error() {
        let sw = swap_correspondence();
        let id = identity_correspondence(&z2());
        assert!(matches!(compose(&sw, &id, None), Err(Error::GroupoidMismatch(_))));
    }

    #[test]
    fn composite_measure_on_trivial_middle_keeps_product_weights() {
        // swap: Z2 -> 1 composed with a weighted quiver over the point
        let sw = swap_correspondence();
        let q = crate::correspondence::from_quiver(&[0], &[0], vec![rat_int(3)], 1, 1).unwrap();
        let comp = compose(&sw, &q, None).unwrap();
        assert_eq!(comp.corr.n_points(), 2);
        // μ[p|e] = λ(p)·3, μ[q|e] = λ(q)·3 with b = e = 1
        assert_eq!(comp.corr.lambda.w, vec![rat_int(3), rat_int(6)]);
        assert_eq!(comp.corr.delta.expect(1, 0), &rat(1, 2));
    }
}
