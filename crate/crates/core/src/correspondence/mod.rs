//! Correspondences between groupoids with Haar systems: a bispace with an
//! invariant weight family along the right momentum map and the modular
//! function of the left action.

mod assoc;
mod compose;
mod coherence;
mod iso;

pub use assoc::{associator, unitor_left, unitor_right, Associator, Unitor};
pub use compose::{alternative_cochain, compose, composite_delta_formula, middle_data, Composite, ComposeTrace};
pub use coherence::{check_pentagon, check_triangle, check_triangle_pair};
pub use iso::{compose_iso_horizontal, compose_iso_vertical, find_iso, validate_iso, CorrIso};

use std::sync::Arc;

use crate::bispace::Bispace;
use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, GroupoidWithHaar, HaarSystem};
use crate::measures::{
    check_invariance, invert_haar, modular_uniqueness, quasi_invariance_modular, Adjoining,
    WeightFamily,
};
use crate::rat::{is_positive, one, Rat};
use crate::report::Report;

#[derive(Debug, Clone)]
pub struct Correspondence {
    pub name: String,
    pub left: Arc<GroupoidWithHaar>,
    pub right: Arc<GroupoidWithHaar>,
    pub bispace: Bispace,
    /// Weight family along the right momentum map, indexed by right units.
    pub lambda: WeightFamily,
    /// Modular function of the left action, cached at validation time.
    pub delta: Adjoining,
}

impl Correspondence {
    /// Builds and fully validates a correspondence; the modular function is
    /// computed by closed form and certified against its defining identity.
    pub fn new(
        name: impl Into<String>,
        left: Arc<GroupoidWithHaar>,
        right: Arc<GroupoidWithHaar>,
        bispace: Bispace,
        lambda: WeightFamily,
    ) -> Result<Self> {
        let name = name.into();
        let report = validate_parts(&left, &right, &bispace, &lambda);
        if let Some(f) = report.failures().next() {
            return Err(Error::Invalid(format!(
                "correspondence {name:?} failed validation at {}",
                f.name
            )));
        }
        let delta = quasi_invariance_modular(&left, &bispace, &lambda)?;
        Ok(Correspondence {
            name,
            left,
            right,
            bispace,
            lambda,
            delta,
        })
    }

    /// Report-valued validation of an already-built correspondence,
    /// including the checks on the cached modular function.
    pub fn validate(&self) -> Report {
        let mut r = validate_parts(&self.left, &self.right, &self.bispace, &self.lambda);
        match quasi_invariance_modular(&self.left, &self.bispace, &self.lambda) {
            Ok(delta) => {
                r.check("corr.delta_matches_cached", delta == self.delta, || {
                    "recomputed modular function differs from cache".into()
                });
                r.merge(modular_uniqueness(&self.left, &self.bispace, &self.lambda, &delta));
                r.merge(self.delta_right_invariance());
            }
            Err(e) => r.fail("corr.delta_exists", e.to_string()),
        }
        r
    }

    /// The modular function is invariant under the right action.
    fn delta_right_invariance(&self) -> Report {
        let mut r = Report::new();
        let h = &self.right.groupoid;
        let mut ok = true;
        let mut witness = String::new();
        'outer: for (a, p) in self.delta.composable_pairs() {
            for eta in 0..h.n_arrows() as u32 {
                if let Some(pe) = self.bispace.right_act(p, eta) {
                    if self.delta.expect(a, p) != self.delta.expect(a, pe) {
                        ok = false;
                        witness = format!(
                            "modular function moves along ({}, {})·{}",
                            self.left.groupoid.arrow_name(a),
                            self.bispace.point_name(p),
                            h.arrow_name(eta)
                        );
                        break 'outer;
                    }
                }
            }
        }
        r.check("corr.delta_right_invariant", ok, || witness.clone());
        r
    }

    pub fn n_points(&self) -> usize {
        self.bispace.n_points()
    }

    /// Structural parallelism: same left and right groupoids-with-Haar.
    pub fn parallel_to(&self, other: &Correspondence) -> bool {
        *self.left == *other.left && *self.right == *other.right
    }
}

/// The component checks behind [`Correspondence::new`], reported one by one.
pub fn validate_parts(
    left: &GroupoidWithHaar,
    right: &GroupoidWithHaar,
    bispace: &Bispace,
    lambda: &WeightFamily,
) -> Report {
    let mut r = bispace.validate(&left.groupoid, &right.groupoid);
    if !r.passed() {
        return r;
    }
    if lambda.pi != bispace.sigma || lambda.base_size != right.groupoid.n_units() {
        r.fail(
            "corr.lambda_target",
            "weight family is not fibered along the right momentum map",
        );
        return r;
    }
    r.pass("corr.lambda_target");
    let inv = check_invariance(lambda, &bispace.right_action(), &right.groupoid);
    let ok = inv.passed();
    r.check("corr.lambda_right_invariant", ok, || {
        inv.failures()
            .next()
            .map(|c| c.name.clone())
            .unwrap_or_default()
    });
    if ok {
        match quasi_invariance_modular(left, bispace, lambda) {
            Ok(_) => r.pass("corr.delta_exists"),
            Err(e) => r.fail("corr.delta_exists", e.to_string()),
        }
    }
    r
}

/// The identity correspondence of `(G, α)`: the bispace is `G` itself under
/// two-sided multiplication, weighted by the inverted Haar system; its
/// modular function is constant 1.
pub fn identity_correspondence(g: &Arc<GroupoidWithHaar>) -> Correspondence {
    let gg = &g.groupoid;
    let n = gg.n_arrows();
    let points: Vec<String> = gg.arrows.clone();
    let rho: Vec<u32> = (0..n as u32).map(|a| gg.rng(a)).collect();
    let sigma: Vec<u32> = (0..n as u32).map(|a| gg.src(a)).collect();
    let mut left = vec![None; n * n];
    let mut right = vec![None; n * n];
    for a in 0..n as u32 {
        for p in 0..n as u32 {
            left[a as usize * n + p as usize] = gg.compose(a, p);
            right[p as usize * n + a as usize] = gg.compose(p, a);
        }
    }
    let bispace = Bispace::new(points, rho, sigma, left, right, n, n).expect("identity bispace");
    let lambda = invert_haar(g);
    let corr = Correspondence::new(format!("id({})", g.name), g.clone(), g.clone(), bispace, lambda)
        .expect("identity correspondence is always valid");
    debug_assert!(corr.delta.is_constant_one());
    corr
}

/// A map of finite spaces `f: X → Y` as a correspondence: the carrier is
/// `X` with momenta `(id, f)` and the counting family along `f`.
pub fn from_space_map(f: &[usize], n_from: usize, n_to: usize) -> Result<Correspondence> {
    if f.len() != n_from || f.iter().any(|&v| v >= n_to) {
        return Err(Error::Invalid("map table does not match the declared spaces".into()));
    }
    let left = GroupoidWithHaar::counting("X", FiniteGroupoid::space(n_from));
    let right = GroupoidWithHaar::counting("Y", FiniteGroupoid::space(n_to));
    let points: Vec<String> = (1..=n_from).map(|i| format!("x{i}")).collect();
    let rho: Vec<u32> = (0..n_from as u32).collect();
    let sigma: Vec<u32> = f.iter().map(|&v| v as u32).collect();
    let mut left_t = vec![None; n_from * n_from];
    let mut right_t = vec![None; n_from * n_to];
    for p in 0..n_from {
        left_t[p * n_from + p] = Some(p as u32);
        right_t[p * n_to + f[p]] = Some(p as u32);
    }
    let bispace = Bispace::new(points, rho, sigma, left_t, right_t, n_from, n_to)?;
    let lambda = WeightFamily::new(bispace.sigma.clone(), n_to, vec![one(); n_from])?;
    Correspondence::new(format!("map({n_from}->{n_to})"), left, right, bispace, lambda)
}

/// A finite quiver `X ←b– Z –f→ Y` with a full-support weight family along
/// `f`, as a correspondence between the two spaces.
pub fn from_quiver(
    back: &[usize],
    forward: &[usize],
    weights: Vec<Rat>,
    n_x: usize,
    n_y: usize,
) -> Result<Correspondence> {
    let n_z = back.len();
    if forward.len() != n_z || weights.len() != n_z {
        return Err(Error::Invalid("quiver tables disagree in length".into()));
    }
    if back.iter().any(|&v| v >= n_x) || forward.iter().any(|&v| v >= n_y) {
        return Err(Error::Invalid("quiver structure map out of range".into()));
    }
    if weights.iter().any(|w| !is_positive(w)) {
        return Err(Error::Invalid("quiver weights must be strictly positive".into()));
    }
    let left = GroupoidWithHaar::counting("X", FiniteGroupoid::space(n_x));
    let right = GroupoidWithHaar::counting("Y", FiniteGroupoid::space(n_y));
    let points: Vec<String> = (1..=n_z).map(|i| format!("e{i}")).collect();
    let rho: Vec<u32> = back.iter().map(|&v| v as u32).collect();
    let sigma: Vec<u32> = forward.iter().map(|&v| v as u32).collect();
    let mut left_t = vec![None; n_x * n_z];
    let mut right_t = vec![None; n_z * n_y];
    for p in 0..n_z {
        left_t[back[p] * n_z + p] = Some(p as u32);
        right_t[p * n_y + forward[p]] = Some(p as u32);
    }
    let bispace = Bispace::new(points, rho, sigma, left_t, right_t, n_x, n_y)?;
    let lambda = WeightFamily::new(bispace.sigma.clone(), n_y, weights)?;
    Correspondence::new(format!("quiver({n_z})"), left, right, bispace, lambda)
}

/// A homomorphism `φ: G → H` of finite groups (one-unit groupoids) as the
/// correspondence carried by `H` with left action through `φ` and the
/// inverted Haar family.
pub fn from_group_hom(
    g: &Arc<GroupoidWithHaar>,
    h: &Arc<GroupoidWithHaar>,
    hom: &[u32],
) -> Result<Correspondence> {
    let gg = &g.groupoid;
    let hh = &h.groupoid;
    if gg.n_units() != 1 || hh.n_units() != 1 {
        return Err(Error::Invalid("group homomorphism generator needs one-unit groupoids".into()));
    }
    if hom.len() != gg.n_arrows() || hom.iter().any(|&v| v as usize >= hh.n_arrows()) {
        return Err(Error::Invalid("homomorphism table does not match the groups".into()));
    }
    for a in 0..gg.n_arrows() as u32 {
        for b in 0..gg.n_arrows() as u32 {
            let ab = gg.compose(a, b).expect("group is total");
            let img = hh.compose(hom[a as usize], hom[b as usize]).expect("group is total");
            if img != hom[ab as usize] {
                return Err(Error::Invalid(format!(
                    "not a homomorphism at ({}, {})",
                    gg.arrow_name(a),
                    gg.arrow_name(b)
                )));
            }
        }
    }
    if hom[gg.unit_arrow(0) as usize] != hh.unit_arrow(0) {
        return Err(Error::Invalid("homomorphism does not preserve the unit".into()));
    }
    let n = hh.n_arrows();
    let points: Vec<String> = hh.arrows.clone();
    let rho = vec![0u32; n];
    let sigma = vec![0u32; n];
    let mut left_t = vec![None; gg.n_arrows() * n];
    let mut right_t = vec![None; n * n];
    for a in 0..gg.n_arrows() as u32 {
        for p in 0..n as u32 {
            left_t[a as usize * n + p as usize] = hh.compose(hom[a as usize], p);
        }
    }
    for p in 0..n as u32 {
        for b in 0..n as u32 {
            right_t[p as usize * n + b as usize] = hh.compose(p, b);
        }
    }
    let bispace = Bispace::new(points, rho, sigma, left_t, right_t, gg.n_arrows(), n)?;
    let lambda = invert_haar(h);
    Correspondence::new(
        format!("hom({}->{})", g.name, h.name),
        g.clone(),
        h.clone(),
        bispace,
        lambda,
    )
}

/// Builds a one-unit groupoid-with-Haar from a group with a constant weight.
pub fn group_with_constant_haar(name: &str, g: FiniteGroupoid, c: Rat) -> Result<Arc<GroupoidWithHaar>> {
    let n = g.n_arrows();
    GroupoidWithHaar::new(name, g, HaarSystem { weights: vec![c; n] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    pub(crate) use crate::gen::{swap_correspondence, z2};

    #[test]
    fn identity_correspondence_of_z2() {
        let corr = identity_correspondence(&z2());
        assert_eq!(corr.n_points(), 2);
        assert!(corr.delta.is_constant_one());
        assert!(corr.validate().passed());
        // counting Haar inverts to counting weights along src
        assert!(corr.lambda.w.iter().all(|w| *w == one()));
    }

    #[test]
    fn identity_correspondence_of_pair_groupoid() {
        let g = GroupoidWithHaar::counting("P2", FiniteGroupoid::pair_groupoid(2));
        let corr = identity_correspondence(&g);
        assert_eq!(corr.n_points(), 4);
        assert!(corr.validate().passed());
        assert!(corr.delta.is_constant_one());
    }

    #[test]
    fn swap_example_validates_with_expected_delta() {
        let corr = swap_correspondence();
        assert!(corr.validate().passed());
        assert_eq!(corr.delta.expect(1, 0), &rat(1, 2));
        assert_eq!(corr.delta.expect(1, 1), &rat_int(2));
    }

    #[test]
    fn moved_weight_under_right_action_fails_invariance() {
        // λ = (1,2) with a right Z/2 action that swaps the points
        let left = GroupoidWithHaar::counting("1", FiniteGroupoid::cyclic_group(1));
        let right = z2();
        let bispace = Bispace::new(
            vec!["p".into(), "q".into()],
            vec![0, 0],
            vec![0, 0],
            vec![Some(0), Some(1)],
            vec![Some(0), Some(1), Some(1), Some(0)],
            1,
            2,
        )
        .unwrap();
        let lambda = WeightFamily::new(vec![0, 0], 1, vec![rat_int(1), rat_int(2)]).unwrap();
        let report = validate_parts(&left, &right, &bispace, &lambda);
        assert!(!report.passed());
        assert!(Correspondence::new("bad", left, right, bispace, lambda).is_err());
    }

    #[test]
    fn space_map_correspondence_is_the_constant_map_example() {
        let corr = from_space_map(&[0, 0], 2, 1).unwrap();
        assert!(corr.validate().passed());
        assert_eq!(corr.lambda.w, vec![one(), one()]);
        assert!(corr.delta.is_constant_one());
    }

    #[test]
    fn quiver_generator_validates() {
        let corr = from_quiver(&[0, 0], &[0, 0], vec![rat_int(1), rat_int(2)], 1, 1).unwrap();
        assert!(corr.validate().passed());
    }

    #[test]
    fn group_hom_to_trivial_group() {
        let g = z2();
        let h = GroupoidWithHaar::counting("1", FiniteGroupoid::cyclic_group(1));
        let corr = from_group_hom(&g, &h, &[0, 0]).unwrap();
        assert_eq!(corr.n_points(), 1);
        assert!(corr.validate().passed());
    }

    #[test]
    fn group_hom_z4_to_z2() {
        let g = GroupoidWithHaar::counting("Z4", FiniteGroupoid::cyclic_group(4));
        let h = z2();
        // k mod 2
        let corr = from_group_hom(&g, &h, &[0, 1, 0, 1]).unwrap();
        assert!(corr.validate().passed());
        // non-homomorphism rejected
        assert!(from_group_hom(&g, &h, &[0, 1, 1, 0]).is_err());
    }
}
