//! Pentagon and triangle coherence, checked pointwise on the finite class
//! spaces. All intermediate composites are built with canonical cochains;
//! the class maps do not depend on that choice.

use crate::error::Result;
use crate::report::Report;

use super::assoc::{associator, unitor_left, unitor_right};
use super::compose::{compose, Composite};
use super::iso::{compose_iso_horizontal, CorrIso};
use super::{identity_correspondence, Correspondence};

fn assoc_map(
    x: &Correspondence,
    y: &Correspondence,
    z: &Correspondence,
    cxy: &Composite,
    cxy_z: &Composite,
    cyz: &Composite,
    cx_yz: &Composite,
) -> Result<CorrIso> {
    Ok(associator(x, y, z, cxy, cxy_z, cyz, cx_yz)?.iso)
}

fn chain(first: &CorrIso, second: &CorrIso) -> Vec<u32> {
    first.map.iter().map(|&c| second.map[c as usize]).collect()
}

/// The pentagon for four composable correspondences: the two re-bracketing
/// routes from `((w∘x)∘y)∘z` to `w∘(x∘(y∘z))` agree on every class.
pub fn check_pentagon(
    w: &Correspondence,
    x: &Correspondence,
    y: &Correspondence,
    z: &Correspondence,
) -> Result<Report> {
    let mut report = Report::new();
    let cwx = compose(w, x, None)?;
    let cxy = compose(x, y, None)?;
    let cyz = compose(y, z, None)?;
    let cwx_y = compose(&cwx.corr, y, None)?;
    let cw_xy = compose(w, &cxy.corr, None)?;
    let cxy_z = compose(&cxy.corr, z, None)?;
    let cx_yz = compose(x, &cyz.corr, None)?;
    let q_wx_y_z = compose(&cwx_y.corr, z, None)?; // ((wx)y)z
    let q_wx_yz = compose(&cwx.corr, &cyz.corr, None)?; // (wx)(yz)
    let q_w_x_yz = compose(w, &cx_yz.corr, None)?; // w(x(yz))
    let q_w_xy_z = compose(&cw_xy.corr, z, None)?; // (w(xy))z
    let q_w_xy_z2 = compose(w, &cxy_z.corr, None)?; // w((xy)z)

    // path one: a(wx, y, z) then a(w, x, yz)
    let a1 = assoc_map(&cwx.corr, y, z, &cwx_y, &q_wx_y_z, &cyz, &q_wx_yz)?;
    let a2 = assoc_map(w, x, &cyz.corr, &cwx, &q_wx_yz, &cx_yz, &q_w_x_yz)?;
    let path_one = chain(&a1, &a2);

    // path two: (a(w,x,y) × id_z), a(w, xy, z), (id_w × a(x,y,z))
    let a_wxy = assoc_map(w, x, y, &cwx, &cwx_y, &cxy, &cw_xy)?;
    let b1 = compose_iso_horizontal(&a_wxy, &CorrIso::identity(z), &q_wx_y_z, &q_w_xy_z)?;
    let b2 = assoc_map(w, &cxy.corr, z, &cw_xy, &q_w_xy_z, &cxy_z, &q_w_xy_z2)?;
    let a_xyz = assoc_map(x, y, z, &cxy, &cxy_z, &cyz, &cx_yz)?;
    let b3 = compose_iso_horizontal(&CorrIso::identity(w), &a_xyz, &q_w_xy_z2, &q_w_x_yz)?;
    let path_two: Vec<u32> = b1
        .map
        .iter()
        .map(|&c| b3.map[b2.map[c as usize] as usize])
        .collect();

    let mut ok = path_one == path_two;
    let mut witness = String::new();
    if !ok {
        if let Some(c) = path_one.iter().zip(path_two.iter()).position(|(a, b)| a != b) {
            witness = format!(
                "paths split at class {}",
                q_wx_y_z.corr.bispace.point_name(c as u32)
            );
        }
        ok = false;
    }
    report.check("coherence.pentagon", ok, || witness.clone());
    Ok(report)
}

/// The triangle for a composable pair `(x, y)` around the middle identity:
/// `(id_x × l(y)) ∘ a(x, id, y) = r(x) × id_y` pointwise on `(x∘id)∘y`.
pub fn check_triangle_pair(x: &Correspondence, y: &Correspondence) -> Result<Report> {
    let mut report = Report::new();
    let id_mid = identity_correspondence(&x.right);
    let cxi = compose(x, &id_mid, None)?;
    let ciy = compose(&id_mid, y, None)?;
    let q_left = compose(&cxi.corr, y, None)?; // (x∘id)∘y
    let q_right = compose(x, &ciy.corr, None)?; // x∘(id∘y)
    let cxy = compose(x, y, None)?;

    let a = assoc_map(x, &id_mid, y, &cxi, &q_left, &ciy, &q_right)?;
    let r_unitor = unitor_right(x, &cxi)?;
    let l_unitor = unitor_left(y, &ciy)?;
    report.merge(r_unitor.report);
    report.merge(l_unitor.report);
    let rh = compose_iso_horizontal(&r_unitor.iso, &CorrIso::identity(y), &q_left, &cxy)?;
    let lh = compose_iso_horizontal(&CorrIso::identity(x), &l_unitor.iso, &q_right, &cxy)?;

    let via_assoc: Vec<u32> = a.map.iter().map(|&c| lh.map[c as usize]).collect();
    let mut witness = String::new();
    let ok = via_assoc == rh.map;
    if !ok {
        if let Some(c) = via_assoc.iter().zip(rh.map.iter()).position(|(l, r)| l != r) {
            witness = format!(
                "triangle splits at class {}",
                q_left.corr.bispace.point_name(c as u32)
            );
        }
    }
    report.check("coherence.triangle", ok, || witness.clone());
    Ok(report)
}

/// Single-correspondence form of the triangle: the second leg is the
/// identity correspondence of the right groupoid.
pub fn check_triangle(x: &Correspondence) -> Result<Report> {
    let id_right = identity_correspondence(&x.right);
    check_triangle_pair(x, &id_right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correspondence::tests::{swap_correspondence, z2};
    use crate::correspondence::{from_space_map, group_with_constant_haar};
    use crate::groupoid::FiniteGroupoid;
    use crate::rat::one;

    #[test]
    fn pentagon_for_identity_chain() {
        let id = identity_correspondence(&z2());
        let rep = check_pentagon(&id, &id, &id, &id).unwrap();
        assert!(rep.passed(), "{}", rep.render_human());
    }

    #[test]
    fn pentagon_for_space_maps() {
        let a = from_space_map(&[0, 1, 1], 3, 2).unwrap();
        let b = from_space_map(&[0, 0], 2, 1).unwrap();
        let c = from_space_map(&[0], 1, 1).unwrap();
        let d = from_space_map(&[0], 1, 1).unwrap();
        let rep = check_pentagon(&a, &b, &c, &d).unwrap();
        assert!(rep.passed(), "{}", rep.render_human());
    }

    #[test]
    fn pentagon_mixed_chain() {
        let triv =
            group_with_constant_haar("1", FiniteGroupoid::cyclic_group(1), one()).unwrap();
        let w = identity_correspondence(&z2());
        let x = identity_correspondence(&z2());
        let y = swap_correspondence();
        let z = crate::correspondence::from_group_hom(&triv, &triv, &[0]).unwrap();
        let rep = check_pentagon(&w, &x, &y, &z).unwrap();
        assert!(rep.passed(), "{}", rep.render_human());
    }

    #[test]
    fn triangle_on_swap_and_identity() {
        let sw = swap_correspondence();
        let rep = check_triangle(&sw).unwrap();
        assert!(rep.passed(), "{}", rep.render_human());
        let id = identity_correspondence(&z2());
        let rep = check_triangle_pair(&id, &sw).unwrap();
        assert!(rep.passed(), "{}", rep.render_human());
    }
}
