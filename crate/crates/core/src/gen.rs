//! Built-in example generators: identity correspondences, space maps,
//! quivers, group homomorphisms, and the weighted swap action, plus the
//! bundled families the verification suites run on.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::action::RightAction;
use crate::bispace::Bispace;
use crate::correspondence::{
    from_group_hom, from_quiver, from_space_map, group_with_constant_haar, identity_correspondence,
    Correspondence,
};
use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, GroupoidWithHaar, HaarSystem};
use crate::measures::WeightFamily;
use crate::rat::{rat, rat_int, Rat};

pub fn z2() -> Arc<GroupoidWithHaar> {
    GroupoidWithHaar::counting("Z2", FiniteGroupoid::cyclic_group(2))
}

pub fn z3() -> Arc<GroupoidWithHaar> {
    GroupoidWithHaar::counting("Z3", FiniteGroupoid::cyclic_group(3))
}

pub fn z4() -> Arc<GroupoidWithHaar> {
    GroupoidWithHaar::counting("Z4", FiniteGroupoid::cyclic_group(4))
}

pub fn trivial_group() -> Arc<GroupoidWithHaar> {
    GroupoidWithHaar::counting("1", FiniteGroupoid::cyclic_group(1))
}

pub fn pair2() -> Arc<GroupoidWithHaar> {
    GroupoidWithHaar::counting("P2", FiniteGroupoid::pair_groupoid(2))
}

/// Pair groupoid on two units with source-column weights (1, 2); a
/// non-counting Haar system.
pub fn pair2_weighted() -> Arc<GroupoidWithHaar> {
    let g = FiniteGroupoid::pair_groupoid(2);
    let weights: Vec<Rat> = (0..g.n_arrows() as u32)
        .map(|a| if g.src(a) == 0 { rat_int(1) } else { rat_int(2) })
        .collect();
    GroupoidWithHaar::new("P2w", g, HaarSystem { weights }).expect("column weights are invariant")
}

/// Z/2 exchanging two points over the trivial group, with weights (1, 2):
/// the smallest correspondence with a nontrivial modular function.
pub fn swap_correspondence() -> Correspondence {
    swap_weighted(rat_int(1), rat_int(2))
}

pub fn swap_weighted(wp: Rat, wq: Rat) -> Correspondence {
    let left = z2();
    let right = trivial_group();
    let bispace = Bispace::new(
        vec!["p".into(), "q".into()],
        vec![0, 0],
        vec![0, 0],
        vec![Some(0), Some(1), Some(1), Some(0)],
        vec![Some(0), Some(1)],
        2,
        1,
    )
    .expect("swap bispace");
    let lambda = WeightFamily::new(vec![0, 0], 1, vec![wp, wq]).expect("positive weights");
    Correspondence::new("swap", left, right, bispace, lambda).expect("swap example validates")
}

/// Z/2 swapping p and q while fixing r, weights (1, 2, 5).
pub fn swap_with_fixed_point() -> Correspondence {
    let left = z2();
    let right = trivial_group();
    let bispace = Bispace::new(
        vec!["p".into(), "q".into(), "r".into()],
        vec![0; 3],
        vec![0; 3],
        vec![Some(0), Some(1), Some(2), Some(1), Some(0), Some(2)],
        vec![Some(0), Some(1), Some(2)],
        2,
        1,
    )
    .expect("bispace");
    let lambda =
        WeightFamily::new(vec![0; 3], 1, vec![rat_int(1), rat_int(2), rat_int(5)]).expect("weights");
    Correspondence::new("swap3", left, right, bispace, lambda).expect("validates")
}

/// The trivial group mapped into Z/2: the carrier is Z/2 with constant
/// weights, a correspondence with a genuinely two-sided nontrivial action.
pub fn hom_into_z2() -> Correspondence {
    from_group_hom(&trivial_group(), &z2(), &[0]).expect("inclusion of the trivial group")
}

pub fn hom_z4_to_z2() -> Correspondence {
    from_group_hom(&z4(), &z2(), &[0, 1, 0, 1]).expect("reduction mod 2")
}

pub fn hom_z2_to_trivial() -> Correspondence {
    from_group_hom(&z2(), &trivial_group(), &[0, 0]).expect("collapse")
}

/// The named single correspondences every suite runs over. All are at most
/// 4 bispace points.
pub fn bundled_correspondences() -> Vec<(String, Correspondence)> {
    let mut out: Vec<(String, Correspondence)> = Vec::new();
    out.push(("id_Z2".into(), identity_correspondence(&z2())));
    out.push(("id_Z3".into(), identity_correspondence(&z3())));
    out.push(("id_P2".into(), identity_correspondence(&pair2())));
    out.push(("id_P2_weighted".into(), identity_correspondence(&pair2_weighted())));
    out.push(("swap_1_2".into(), swap_correspondence()));
    out.push(("swap_1_3".into(), swap_weighted(rat_int(1), rat_int(3))));
    out.push(("swap_fixed_point".into(), swap_with_fixed_point()));
    out.push((
        "space_map_const".into(),
        from_space_map(&[0, 0], 2, 1).expect("constant map"),
    ));
    out.push((
        "space_map_3_to_2".into(),
        from_space_map(&[0, 0, 1], 3, 2).expect("map"),
    ));
    out.push((
        "quiver_two_loops".into(),
        from_quiver(&[0, 0], &[0, 0], vec![rat_int(1), rat_int(2)], 1, 1).expect("quiver"),
    ));
    out.push((
        "quiver_bipartite".into(),
        from_quiver(&[0, 1, 0], &[0, 0, 1], vec![rat_int(1), rat_int(2), rat_int(3)], 2, 2)
            .expect("quiver"),
    ));
    out.push(("hom_triv_to_Z2".into(), hom_into_z2()));
    out.push(("hom_Z4_to_Z2".into(), hom_z4_to_z2()));
    out.push(("hom_Z2_to_triv".into(), hom_z2_to_trivial()));
    out
}

/// Composable pairs, each exercising a different middle groupoid.
pub fn bundled_pairs() -> Vec<(String, Correspondence, Correspondence)> {
    vec![
        (
            "id_Z2.id_Z2".into(),
            identity_correspondence(&z2()),
            identity_correspondence(&z2()),
        ),
        (
            "id_Z2.swap".into(),
            identity_correspondence(&z2()),
            swap_correspondence(),
        ),
        (
            "hom.swap".into(),
            hom_into_z2(),
            swap_correspondence(),
        ),
        (
            "space_maps".into(),
            from_space_map(&[0, 0, 1], 3, 2).expect("map"),
            from_space_map(&[0, 0], 2, 1).expect("map"),
        ),
        (
            "homs_Z4_Z2_triv".into(),
            hom_z4_to_z2(),
            hom_z2_to_trivial(),
        ),
        (
            "quiver.quiver".into(),
            from_quiver(&[0, 1, 0], &[0, 0, 1], vec![rat_int(1), rat_int(2), rat_int(3)], 2, 2)
                .expect("quiver"),
            from_quiver(&[0, 1], &[0, 0], vec![rat_int(2), rat_int(1)], 2, 1).expect("quiver"),
        ),
        (
            "swap.quiver".into(),
            swap_correspondence(),
            from_quiver(&[0], &[0], vec![rat_int(3)], 1, 1).expect("quiver"),
        ),
    ]
}

/// Composable triples for the associator checks.
pub fn bundled_triples() -> Vec<(String, Correspondence, Correspondence, Correspondence)> {
    vec![
        (
            "identities_Z2".into(),
            identity_correspondence(&z2()),
            identity_correspondence(&z2()),
            identity_correspondence(&z2()),
        ),
        (
            "space_maps".into(),
            from_space_map(&[0, 0, 1], 3, 2).expect("map"),
            from_space_map(&[0, 0], 2, 1).expect("map"),
            from_space_map(&[0], 1, 1).expect("map"),
        ),
        (
            "hom.swap.space".into(),
            hom_into_z2(),
            swap_correspondence(),
            from_space_map(&[0], 1, 1).expect("map"),
        ),
        (
            "id.id.swap".into(),
            identity_correspondence(&z2()),
            identity_correspondence(&z2()),
            swap_correspondence(),
        ),
    ]
}

/// Composable quadruples for the pentagon.
pub fn bundled_quadruples(
) -> Vec<(String, Correspondence, Correspondence, Correspondence, Correspondence)> {
    vec![
        (
            "identities_Z2".into(),
            identity_correspondence(&z2()),
            identity_correspondence(&z2()),
            identity_correspondence(&z2()),
            identity_correspondence(&z2()),
        ),
        (
            "space_maps".into(),
            from_space_map(&[0, 1, 1], 3, 2).expect("map"),
            from_space_map(&[0, 0], 2, 1).expect("map"),
            from_space_map(&[0], 1, 1).expect("map"),
            from_space_map(&[0], 1, 1).expect("map"),
        ),
        (
            "mixed_hom_chain".into(),
            identity_correspondence(&z2()),
            identity_correspondence(&z2()),
            swap_correspondence(),
            from_space_map(&[0], 1, 1).expect("map"),
        ),
    ]
}

/// A randomized proper transformation-groupoid instance for the measure
/// calculus: a small cyclic group acting by a permutation built from its
/// generator, two equivalent invariant measures, and two stage families.
pub struct RandomMeasureInstance {
    pub tg: crate::action::TransformationGroupoid,
    pub m1: WeightFamily,
    pub m2: WeightFamily,
}

pub fn random_measure_instance(seed: u64) -> Result<RandomMeasureInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = [1usize, 2, 2, 3, 4][rng.gen_range(0..5)];
    let n_points = rng.gen_range(order.max(1)..=12);
    let g = FiniteGroupoid::cyclic_group(order);
    let haar_scale = rat_int(rng.gen_range(1..=3));
    let gh = group_with_constant_haar("C", g, haar_scale)?;

    // generator permutation of order dividing `order`: a product of cycles
    // of that length plus fixed points
    let mut points: Vec<u32> = (0..n_points as u32).collect();
    // deterministic shuffle
    for i in (1..points.len()).rev() {
        let j = rng.gen_range(0..=i);
        points.swap(i, j);
    }
    let mut gen_perm: Vec<u32> = (0..n_points as u32).collect();
    let mut idx = 0;
    while idx + order <= n_points {
        if order > 1 && rng.gen_bool(0.8) {
            for k in 0..order {
                gen_perm[points[idx + k] as usize] = points[idx + (k + 1) % order];
            }
        }
        idx += order;
    }
    // action table: g^k acts by the k-th power of the generator permutation
    let n_arrows = gh.groupoid.n_arrows();
    let mut table = vec![None; n_points * n_arrows];
    for (k, chunk) in (0..n_arrows).map(|k| (k, k)) {
        let mut perm: Vec<u32> = (0..n_points as u32).collect();
        for _ in 0..k {
            perm = perm.iter().map(|&p| gen_perm[p as usize]).collect();
        }
        for z in 0..n_points {
            table[z * n_arrows + chunk] = Some(perm[z]);
        }
    }
    let action = RightAction {
        momentum: vec![0; n_points],
        table,
        n_arrows,
    };
    let tg = crate::action::TransformationGroupoid::new(gh, action)?;

    // invariant measures are exactly the orbit-constant ones here
    let orbits = tg.orbits();
    let orbit_values1: Vec<Rat> = (0..orbits.n_classes())
        .map(|_| rat(rng.gen_range(1..=9), rng.gen_range(1..=4)))
        .collect();
    let orbit_values2: Vec<Rat> = (0..orbits.n_classes())
        .map(|_| rat(rng.gen_range(1..=9), rng.gen_range(1..=4)))
        .collect();
    let m1 = WeightFamily::new(
        vec![0; n_points],
        1,
        (0..n_points)
            .map(|z| orbit_values1[orbits.class_of[z] as usize].clone())
            .collect(),
    )?;
    let m2 = WeightFamily::new(
        vec![0; n_points],
        1,
        (0..n_points)
            .map(|z| orbit_values2[orbits.class_of[z] as usize].clone())
            .collect(),
    )?;
    Ok(RandomMeasureInstance { tg, m1, m2 })
}

/// Random weight families over a common base with two compatible carrier
/// bijections, for the chain-rule and functoriality laws.
pub struct RandomFamilyChain {
    pub w1: WeightFamily,
    pub w2: WeightFamily,
    pub w3: WeightFamily,
    pub a1: Vec<u32>,
    pub a2: Vec<u32>,
}

pub fn random_family_chain(seed: u64) -> RandomFamilyChain {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(17));
    let n = rng.gen_range(2..=12usize);
    let base = rng.gen_range(1..=3usize);
    let pi: Vec<u32> = (0..n).map(|_| rng.gen_range(0..base) as u32).collect();
    let rand_family = |rng: &mut ChaCha8Rng| -> Vec<Rat> {
        (0..n).map(|_| rat(rng.gen_range(1..=9), rng.gen_range(1..=4))).collect()
    };
    // fiber-preserving bijections: shuffle within each fiber
    let fiber_shuffle = |rng: &mut ChaCha8Rng| -> Vec<u32> {
        let mut map: Vec<u32> = (0..n as u32).collect();
        for b in 0..base as u32 {
            let fiber: Vec<usize> = (0..n).filter(|&z| pi[z] == b).collect();
            let mut images = fiber.clone();
            for i in (1..images.len()).rev() {
                let j = rng.gen_range(0..=i);
                images.swap(i, j);
            }
            for (z, img) in fiber.iter().zip(images.iter()) {
                map[*z] = *img as u32;
            }
        }
        map
    };
    let w1 = WeightFamily::new(pi.clone(), base, rand_family(&mut rng)).expect("positive");
    let w2 = WeightFamily::new(pi.clone(), base, rand_family(&mut rng)).expect("positive");
    let w3 = WeightFamily::new(pi.clone(), base, rand_family(&mut rng)).expect("positive");
    let a1 = fiber_shuffle(&mut rng);
    let a2 = fiber_shuffle(&mut rng);
    RandomFamilyChain { w1, w2, w3, a1, a2 }
}

/// Resolves a generator name with `key=value` parameters.
pub fn generate(name: &str, params: &[(String, String)]) -> Result<Vec<(String, Correspondence)>> {
    let get = |key: &str| params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
    let group_by_name = |spec: &str| -> Result<Arc<GroupoidWithHaar>> {
        match spec {
            "Z1" | "1" => Ok(trivial_group()),
            "Z2" => Ok(z2()),
            "Z3" => Ok(z3()),
            "Z4" => Ok(z4()),
            "P2" => Ok(pair2()),
            "P2w" => Ok(pair2_weighted()),
            other => Err(Error::Invalid(format!("unknown group {other:?}"))),
        }
    };
    match name {
        "identity" => {
            let g = group_by_name(get("group").unwrap_or("Z2"))?;
            Ok(vec![(format!("id_{}", g.name), identity_correspondence(&g))])
        }
        "space-map" => {
            let nx: usize = get("X").unwrap_or("2").parse().map_err(|_| Error::Invalid("bad X".into()))?;
            let ny: usize = get("Y").unwrap_or("1").parse().map_err(|_| Error::Invalid("bad Y".into()))?;
            let map: Vec<usize> = match get("map") {
                Some(spec) => spec
                    .split(',')
                    .map(|s| s.trim().parse::<usize>().map(|v| v - 1))
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Invalid("bad map spec".into()))?,
                None => (0..nx).map(|i| i.min(ny - 1)).collect(),
            };
            Ok(vec![("space_map".into(), from_space_map(&map, nx, ny)?)])
        }
        "quiver" => {
            let edges: usize = get("edges").unwrap_or("2").parse().map_err(|_| Error::Invalid("bad edges".into()))?;
            let weights: Vec<Rat> = (1..=edges as i64).map(rat_int).collect();
            Ok(vec![(
                "quiver".into(),
                from_quiver(&vec![0; edges], &vec![0; edges], weights, 1, 1)?,
            )])
        }
        "group-hom" => {
            let from = get("from").unwrap_or("Z4");
            let to = get("to").unwrap_or("Z2");
            let corr = match (from, to) {
                ("Z4", "Z2") => hom_z4_to_z2(),
                ("Z2", "Z1") | ("Z2", "1") => hom_z2_to_trivial(),
                ("Z1", "Z2") | ("1", "Z2") => hom_into_z2(),
                _ => return Err(Error::Invalid(format!("no bundled homomorphism {from} -> {to}"))),
            };
            Ok(vec![(format!("hom_{from}_{to}"), corr)])
        }
        "swap" => Ok(vec![("swap".into(), swap_correspondence())]),
        "all" => Ok(bundled_correspondences()),
        other => Err(Error::Invalid(format!("unknown generator {other:?}"))),
    }
}

pub fn generator_names() -> &'static [&'static str] {
    &["identity", "space-map", "quiver", "group-hom", "swap", "all"]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::one;

    #[test]
    fn all_bundled_correspondences_validate() {
        let all = bundled_correspondences();
        assert!(all.len() >= 10);
        for (name, corr) in all {
            let rep = corr.validate();
            assert!(rep.passed(), "{name}: {}", rep.render_human());
            assert!(corr.n_points() <= 12);
        }
    }

    #[test]
    fn bundled_pairs_are_composable() {
        for (name, x, y) in bundled_pairs() {
            assert!(*x.right == *y.left, "{name} middle mismatch");
        }
    }

    #[test]
    fn random_measure_instances_are_valid() {
        for seed in 0..20 {
            let inst = random_measure_instance(seed).unwrap();
            assert!(inst.tg.n_points() <= 12);
            assert!(crate::measures::check_measure_invariance(&inst.m1, &inst.tg).is_ok());
            assert!(crate::measures::check_measure_invariance(&inst.m2, &inst.tg).is_ok());
        }
    }

    #[test]
    fn generator_lookup() {
        assert!(generate("identity", &[("group".into(), "Z3".into())]).is_ok());
        assert!(generate("space-map", &[("X".into(), "2".into()), ("Y".into(), "1".into())]).is_ok());
        assert!(generate("nope", &[]).is_err());
        let sw = generate("swap", &[]).unwrap();
        assert_eq!(sw[0].1.lambda.w, vec![one(), rat_int(2)]);
    }
}
