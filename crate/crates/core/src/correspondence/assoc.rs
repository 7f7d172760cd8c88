//! The associativity and identity 2-arrows of composition, with their exact
//! Radon–Nikodym witnesses checked against the cocycle formulas.
//!
//! For three composable correspondences the triple fibre product carries a
//! diagonal action of the product of the two middle groupoids. Both nested
//! composites are quotients of that one space; the re-bracketing map is the
//! induced bijection, and its derivative is the descended ratio of the two
//! assembled 0-cochains.


use crate::action::{RightAction, TransformationGroupoid};
use crate::cohomology::{d0, OneCocycle, ZeroCochain};
use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, GroupoidWithHaar, HaarSystem};
use crate::measures::invariant_function_descends;
use crate::rat::Rat;
use crate::report::Report;

use super::compose::Composite;
use super::iso::{validate_iso, CorrIso};
use super::Correspondence;

pub struct Associator {
    /// From `(x∘y)∘z` to `x∘(y∘z)`.
    pub iso: CorrIso,
    pub report: Report,
}

pub struct Unitor {
    /// From the composite with the identity correspondence to the bare one.
    pub iso: CorrIso,
    pub report: Report,
}

struct TripleData {
    triples: Vec<(u32, u32, u32)>,
    tg: TransformationGroupoid,
    orbits: crate::action::OrbitPartition,
}

/// The triple fibre product with the diagonal action of the product of the
/// two middle groupoids, `(x1,x2,x3)·(γ,η) = (x1·γ, γ⁻¹·x2·η, η⁻¹·x3)`.
fn triple_data(x: &Correspondence, y: &Correspondence, z: &Correspondence) -> Result<TripleData> {
    let mid2 = &x.right;
    let mid3 = &y.right;
    let mut triples = Vec::new();
    for i in 0..x.n_points() as u32 {
        for j in 0..y.n_points() as u32 {
            if x.bispace.sigma(i) != y.bispace.rho(j) {
                continue;
            }
            for k in 0..z.n_points() as u32 {
                if y.bispace.sigma(j) == z.bispace.rho(k) {
                    triples.push((i, j, k));
                }
            }
        }
    }
    let prod = FiniteGroupoid::product(&mid2.groupoid, &mid3.groupoid);
    let na3 = mid3.groupoid.n_arrows();
    let weights: Vec<Rat> = (0..prod.n_arrows())
        .map(|pa| {
            let (a, b) = ((pa / na3) as u32, (pa % na3) as u32);
            mid2.haar.weight(a) * mid3.haar.weight(b)
        })
        .collect();
    let prod_gh = GroupoidWithHaar::new(
        format!("({}x{})", mid2.name, mid3.name),
        prod,
        HaarSystem { weights },
    )?;
    let nu3 = mid3.groupoid.n_units() as u32;
    let momentum: Vec<u32> = triples
        .iter()
        .map(|&(i, j, _)| x.bispace.sigma(i) * nu3 + y.bispace.sigma(j))
        .collect();
    let n = triples.len();
    let n_pa = prod_gh.groupoid.n_arrows();
    let mut table = vec![None; n * n_pa];
    let pair_ix = |i: u32, j: u32, k: u32| -> Option<u32> {
        triples.binary_search(&(i, j, k)).ok().map(|v| v as u32)
    };
    for (t, &(i, j, k)) in triples.iter().enumerate() {
        for pa in 0..n_pa as u32 {
            if prod_gh.groupoid.rng(pa) != momentum[t] {
                continue;
            }
            let (a, b) = ((pa / na3 as u32), (pa % na3 as u32));
            let ia = mid2.groupoid.inv(a);
            let ib = mid3.groupoid.inv(b);
            let i2 = x.bispace.right_act(i, a).expect("composable");
            let j2 = y
                .bispace
                .right_act(y.bispace.left_act(ia, j).expect("composable"), b)
                .expect("composable");
            let k2 = z.bispace.left_act(ib, k).expect("composable");
            table[t * n_pa + pa as usize] =
                Some(pair_ix(i2, j2, k2).expect("diagonal action stays in the triple product"));
        }
    }
    let action = RightAction {
        momentum,
        table,
        n_arrows: n_pa,
    };
    let tg = TransformationGroupoid::new(prod_gh, action)?;
    let orbits = tg.orbits();
    Ok(TripleData { triples, tg, orbits })
}

/// The two quasi-invariance cocycles on the triple transformation groupoid:
/// the left-bracketing route evaluates the middle modular function on the
/// raw second component, the right-bracketing route reads it through the
/// representative of the class `[x2, x3]`, which only agrees because the
/// modular function is invariant under the rightmost groupoid.
fn triple_cocycles(
    y: &Correspondence,
    z: &Correspondence,
    c23: &Composite,
    td: &TripleData,
) -> (OneCocycle, OneCocycle) {
    let mid2 = &y.left.groupoid;
    let mid3 = &z.left.groupoid;
    let na3 = mid3.n_arrows() as u32;
    let mut left_route = Vec::with_capacity(td.tg.n_arrows());
    let mut right_route = Vec::with_capacity(td.tg.n_arrows());
    for idx in 0..td.tg.n_arrows() {
        let (t, pa) = td.tg.arrows[idx];
        let (_, j, k) = td.triples[t as usize];
        let (a, b) = (pa / na3, pa % na3);
        let d_left = y.delta.expect(mid2.inv(a), j) * z.delta.expect(mid3.inv(b), k);
        left_route.push(d_left);
        // class representative of [j, k] inside the composite y∘z
        let pair = c23.trace.fp.pair_index(j, k).expect("triple restricts to a pair");
        let class = c23.trace.orbits.class_of[pair as usize];
        let rep = c23.trace.orbits.reps[class as usize];
        let (j_rep, _) = c23.trace.fp.pairs[rep as usize];
        let d_right = y.delta.expect(mid2.inv(a), j_rep) * z.delta.expect(mid3.inv(b), k);
        right_route.push(d_right);
    }
    (OneCocycle(left_route), OneCocycle(right_route))
}

/// Builds the associativity isomorphism `(x∘y)∘z → x∘(y∘z)` for composites
/// built with recorded cochains, together with every exact identity the
/// construction satisfies: the two routes to the quasi-invariance cocycle
/// agree, all three assembled cochains solve it, and the pointwise
/// derivative of the re-bracketing map equals the descended cochain ratio.
pub fn associator(
    x: &Correspondence,
    y: &Correspondence,
    z: &Correspondence,
    c12: &Composite,
    c12_3: &Composite,
    c23: &Composite,
    c1_23: &Composite,
) -> Result<Associator> {
    let td = triple_data(x, y, z)?;
    let mut report = Report::new();

    let (d_left, d_right) = triple_cocycles(y, z, c23, &td);
    report.check("assoc.cocycle_routes_agree", d_left == d_right, || {
        "left- and right-bracketing cocycles differ".into()
    });

    // assembled cochains on the triple product
    let mut b_left = Vec::with_capacity(td.triples.len());
    let mut b_right = Vec::with_capacity(td.triples.len());
    let mut b_plain = Vec::with_capacity(td.triples.len());
    for &(i, j, k) in &td.triples {
        let p12 = c12.trace.fp.pair_index(i, j).expect("pair of the triple");
        let cls12 = c12.trace.orbits.class_of[p12 as usize];
        let p12_3 = c12_3
            .trace
            .fp
            .pair_index(cls12, k)
            .expect("class pairs with the third leg");
        b_left.push(&c12.trace.cochain.0[p12 as usize] * &c12_3.trace.cochain.0[p12_3 as usize]);

        let p23 = c23.trace.fp.pair_index(j, k).expect("pair of the triple");
        let cls23 = c23.trace.orbits.class_of[p23 as usize];
        let p1_23 = c1_23
            .trace
            .fp
            .pair_index(i, cls23)
            .expect("class pairs with the first leg");
        b_right.push(&c23.trace.cochain.0[p23 as usize] * &c1_23.trace.cochain.0[p1_23 as usize]);

        b_plain.push(&c12.trace.cochain.0[p12 as usize] * &c23.trace.cochain.0[p23 as usize]);
    }
    let b_left = ZeroCochain(b_left);
    let b_right = ZeroCochain(b_right);
    let b_plain = ZeroCochain(b_plain);
    report.check("assoc.left_cochain_solves", d0(&b_left, &td.tg) == d_left, || {
        "assembled left cochain does not solve the cocycle".into()
    });
    report.check("assoc.right_cochain_solves", d0(&b_right, &td.tg) == d_left, || {
        "assembled right cochain does not solve the cocycle".into()
    });
    report.check("assoc.product_cochain_solves", d0(&b_plain, &td.tg) == d_left, || {
        "product of the stage cochains does not solve the cocycle".into()
    });

    // class maps out of the triple quotient
    let a_prime = class_map(&td, |&(i, j, k)| {
        let p12 = c12.trace.fp.pair_index(i, j).expect("pair");
        let cls12 = c12.trace.orbits.class_of[p12 as usize];
        let p = c12_3.trace.fp.pair_index(cls12, k).expect("pair");
        c12_3.trace.orbits.class_of[p as usize]
    })?;
    let a_doubleprime = class_map(&td, |&(i, j, k)| {
        let p23 = c23.trace.fp.pair_index(j, k).expect("pair");
        let cls23 = c23.trace.orbits.class_of[p23 as usize];
        let p = c1_23.trace.fp.pair_index(i, cls23).expect("pair");
        c1_23.trace.orbits.class_of[p as usize]
    })?;
    let n123 = td.orbits.n_classes();
    if c12_3.corr.n_points() != n123 || c1_23.corr.n_points() != n123 {
        return Err(Error::Invalid("triple quotient does not match the nested quotients".into()));
    }
    let a_prime_inv = invert(&a_prime)?;
    let map: Vec<u32> = a_prime_inv.iter().map(|&c| a_doubleprime[c as usize]).collect();

    let (iso_report, iso) = validate_iso(&c12_3.corr, &c1_23.corr, &map);
    report.merge(iso_report);
    let Some(iso) = iso else {
        return Err(Error::Invalid("re-bracketing map is not an isomorphism".into()));
    };

    // derivative identity: rn = [b_left/b_right] ∘ a''⁻¹
    let ratio: Vec<Rat> = b_left
        .0
        .iter()
        .zip(b_right.0.iter())
        .map(|(l, r)| l / r)
        .collect();
    let descended = invariant_function_descends(&ratio, &td.tg, &td.orbits)?;
    let a_dp_inv = invert(&a_doubleprime)?;
    let expected: Vec<Rat> = (0..n123)
        .map(|w| descended[a_dp_inv[w] as usize].clone())
        .collect();
    report.check("assoc.rn_equals_descended_cochain_ratio", iso.rn == expected, || {
        "pointwise derivative differs from the descended cochain ratio".into()
    });

    Ok(Associator { iso, report })
}

/// Evaluates `f` on every member of every orbit class and checks constancy,
/// returning the induced map on classes.
fn class_map(
    td: &TripleData,
    f: impl Fn(&(u32, u32, u32)) -> u32,
) -> Result<Vec<u32>> {
    let mut out = vec![u32::MAX; td.orbits.n_classes()];
    for c in 0..td.orbits.n_classes() as u32 {
        let mut image = None;
        for t in td.orbits.members(c) {
            let v = f(&td.triples[t as usize]);
            match image {
                None => image = Some(v),
                Some(prev) if prev != v => {
                    return Err(Error::Invalid("class map is not constant on orbits".into()))
                }
                _ => {}
            }
        }
        out[c as usize] = image.expect("orbits are inhabited");
    }
    Ok(out)
}

fn invert(map: &[u32]) -> Result<Vec<u32>> {
    let mut inv = vec![u32::MAX; map.len()];
    for (i, &v) in map.iter().enumerate() {
        if v as usize >= map.len() || inv[v as usize] != u32::MAX {
            return Err(Error::Invalid("class map is not a bijection".into()));
        }
        inv[v as usize] = i as u32;
    }
    Ok(inv)
}

/// The left identity 2-arrow `id∘x → x`, `[δ, p] ↦ δ·p`. Its derivative is
/// the cochain read on the unit section, matching the identity-composite
/// formula exactly.
pub fn unitor_left(x: &Correspondence, comp: &Composite) -> Result<Unitor> {
    let id_like = &comp.trace.fp; // pairs (arrow of left groupoid, point of x)
    let mut report = Report::new();
    let mut map = vec![u32::MAX; comp.corr.n_points()];
    for c in 0..comp.trace.orbits.n_classes() as u32 {
        let mut image = None;
        for zp in comp.trace.orbits.members(c) {
            let (d, p) = id_like.pairs[zp as usize];
            let v = x
                .bispace
                .left_act(d, p)
                .ok_or_else(|| Error::Invalid("identity pair is not composable".into()))?;
            match image {
                None => image = Some(v),
                Some(prev) if prev != v => {
                    return Err(Error::Invalid("left unitor is not well-defined".into()))
                }
                _ => {}
            }
        }
        map[c as usize] = image.expect("orbits are inhabited");
    }
    let (iso_report, iso) = validate_iso(&comp.corr, x, &map);
    report.merge(iso_report);
    let Some(iso) = iso else {
        return Err(Error::Invalid("left unitor map is not an isomorphism".into()));
    };
    // formula: rn(z) = b(unit arrow at rho(z), z)
    let g = &x.left.groupoid;
    let mut ok = true;
    let mut witness = String::new();
    for z in 0..x.n_points() as u32 {
        let unit = g.unit_arrow(x.bispace.rho(z));
        let pair = id_like
            .pair_index(unit, z)
            .expect("unit section lies in the fibre product");
        if iso.rn[z as usize] != comp.trace.cochain.0[pair as usize] {
            ok = false;
            witness = format!("unit-section formula fails at {}", x.bispace.point_name(z));
            break;
        }
    }
    report.check("unitor.left_rn_formula", ok, || witness.clone());
    Ok(Unitor { iso, report })
}

/// The right identity 2-arrow `x∘id → x`, `[p, δ] ↦ p·δ`. Here the cocycle
/// is trivial, the cochain is orbit-constant, and the derivative is its
/// descended class function read back along the quotient.
pub fn unitor_right(x: &Correspondence, comp: &Composite) -> Result<Unitor> {
    let fp = &comp.trace.fp; // pairs (point of x, arrow of right groupoid)
    let mut report = Report::new();
    let mut map = vec![u32::MAX; comp.corr.n_points()];
    for c in 0..comp.trace.orbits.n_classes() as u32 {
        let mut image = None;
        for zp in comp.trace.orbits.members(c) {
            let (p, d) = fp.pairs[zp as usize];
            let v = x
                .bispace
                .right_act(p, d)
                .ok_or_else(|| Error::Invalid("identity pair is not composable".into()))?;
            match image {
                None => image = Some(v),
                Some(prev) if prev != v => {
                    return Err(Error::Invalid("right unitor is not well-defined".into()))
                }
                _ => {}
            }
        }
        map[c as usize] = image.expect("orbits are inhabited");
    }
    let (iso_report, iso) = validate_iso(&comp.corr, x, &map);
    report.merge(iso_report);
    let Some(iso) = iso else {
        return Err(Error::Invalid("right unitor map is not an isomorphism".into()));
    };
    // the trivial-cocycle cochain descends; its class function is the rn
    let descended =
        invariant_function_descends(&comp.trace.cochain.0, &comp.trace.tg, &comp.trace.orbits)?;
    let h = &x.right.groupoid;
    let mut ok = true;
    let mut witness = String::new();
    for z in 0..x.n_points() as u32 {
        let unit = h.unit_arrow(x.bispace.sigma(z));
        let pair = fp
            .pair_index(z, unit)
            .expect("unit section lies in the fibre product");
        let class = comp.trace.orbits.class_of[pair as usize];
        let via_section = &comp.trace.cochain.0[pair as usize];
        if iso.rn[z as usize] != descended[class as usize] || via_section != &descended[class as usize] {
            ok = false;
            witness = format!("descended-cochain formula fails at {}", x.bispace.point_name(z));
            break;
        }
    }
    report.check("unitor.right_rn_formula", ok, || witness.clone());
    Ok(Unitor { iso, report })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::correspondence::compose::compose;
    use crate::correspondence::tests::{swap_correspondence, z2};
    use crate::correspondence::{from_space_map, identity_correspondence};
    use crate::rat::one;

    #[test]
    fn associator_on_identity_chain() {
        let id = identity_correspondence(&z2());
        let c12 = compose(&id, &id, None).unwrap();
        let c23 = compose(&id, &id, None).unwrap();
        let c12_3 = compose(&c12.corr, &id, None).unwrap();
        let c1_23 = compose(&id, &c23.corr, None).unwrap();
        let a = associator(&id, &id, &id, &c12, &c12_3, &c23, &c1_23).unwrap();
        assert!(a.report.passed(), "{}", a.report.render_human());
    }

    #[test]
    fn associator_on_space_maps_has_unit_rn() {
        let f = from_space_map(&[0, 0, 1], 3, 2).unwrap();
        let g = from_space_map(&[0, 0], 2, 1).unwrap();
        let h = from_space_map(&[0], 1, 1).unwrap();
        let c12 = compose(&f, &g, None).unwrap();
        let c23 = compose(&g, &h, None).unwrap();
        let c12_3 = compose(&c12.corr, &h, None).unwrap();
        let c1_23 = compose(&f, &c23.corr, None).unwrap();
        let a = associator(&f, &g, &h, &c12, &c12_3, &c23, &c1_23).unwrap();
        assert!(a.report.passed(), "{}", a.report.render_human());
        assert!(a.iso.rn.iter().all(|v| *v == one()));
    }

    #[test]
    fn associator_through_nontrivial_cochains() {
        // triv→Z2 (group hom), Z2→1 (swap example), 1→1 (space map)
        let triv = crate::correspondence::group_with_constant_haar(
            "1",
            crate::groupoid::FiniteGroupoid::cyclic_group(1),
            one(),
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
        assert!(a.report.passed(), "{}", a.report.render_human());
    }

    #[test]
    fn unitors_on_the_swap_example() {
        let sw = swap_correspondence();
        let idl = identity_correspondence(&sw.left);
        let idr = identity_correspondence(&sw.right);
        let left_comp = compose(&idl, &sw, None).unwrap();
        let l = unitor_left(&sw, &left_comp).unwrap();
        assert!(l.report.passed(), "{}", l.report.render_human());
        let right_comp = compose(&sw, &idr, None).unwrap();
        let r = unitor_right(&sw, &right_comp).unwrap();
        assert!(r.report.passed(), "{}", r.report.render_human());
    }

    #[test]
    fn unitor_on_identity_composed_with_itself_is_multiplication() {
        let id = identity_correspondence(&z2());
        let comp = compose(&id, &id, None).unwrap();
        let l = unitor_left(&id, &comp).unwrap();
        assert!(l.report.passed());
        // classes are [g0|g0] and [g0|g1]; the unitor multiplies components
        assert_eq!(l.iso.map.len(), 2);
    }
}
