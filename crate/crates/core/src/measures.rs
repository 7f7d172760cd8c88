//! Weight-family calculus: pushforward, equivalence and pointwise
//! Radon–Nikodym derivatives, invariance and quasi-invariance, fiber
//! integration, cutoff functions, and descent of invariant measures along
//! orbit quotients.
//!
//! Everything here is exact rational arithmetic. All identities are checked
//! pointwise; the finite full-support setting removes every almost-everywhere
//! qualifier.

use crate::action::{OrbitPartition, RightAction, TransformationGroupoid};
use crate::bispace::Bispace;
use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, GroupoidWithHaar};
use crate::rat::{fmt_rat, is_positive, one, Rat};
use crate::report::Report;

/// A strictly positive weight on every point of a carrier, fibered over a
/// base by the target map `pi`. The fibers partition the carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFamily {
    pub pi: Vec<u32>,
    pub base_size: usize,
    pub w: Vec<Rat>,
}

impl WeightFamily {
    pub fn new(pi: Vec<u32>, base_size: usize, w: Vec<Rat>) -> Result<Self> {
        if pi.len() != w.len() {
            return Err(Error::Schema("weight family tables disagree in length".into()));
        }
        if let Some(&bad) = pi.iter().find(|&&b| b as usize >= base_size) {
            return Err(Error::Schema(format!("fiber index {bad} out of base range")));
        }
        if let Some(i) = w.iter().position(|x| !is_positive(x)) {
            return Err(Error::Schema(format!(
                "weight at carrier point {i} is not strictly positive"
            )));
        }
        Ok(WeightFamily { pi, base_size, w })
    }

    pub fn carrier_size(&self) -> usize {
        self.w.len()
    }

    pub fn weight(&self, z: u32) -> &Rat {
        &self.w[z as usize]
    }

    /// Total mass of the fiber over `b`.
    pub fn fiber_mass(&self, b: u32) -> Rat {
        let mut acc = Rat::from_integer(0.into());
        for (z, wt) in self.w.iter().enumerate() {
            if self.pi[z] == b {
                acc += wt;
            }
        }
        acc
    }

    /// Base point ↦ Σ_fiber f·weight.
    pub fn fiber_integrate(&self, f: &[Rat]) -> Vec<Rat> {
        assert_eq!(f.len(), self.carrier_size(), "function not total on carrier");
        let mut out = vec![Rat::from_integer(0.into()); self.base_size];
        for (z, wt) in self.w.iter().enumerate() {
            out[self.pi[z] as usize] += &f[z] * wt;
        }
        out
    }

    /// The canonical cutoff: `e(z) = 1 / mass(fiber of pi(z))`, so that the
    /// fiber integral of `e` is identically 1.
    pub fn cutoff(&self) -> Vec<Rat> {
        let masses: Vec<Rat> = (0..self.base_size as u32).map(|b| self.fiber_mass(b)).collect();
        self.pi
            .iter()
            .map(|&b| one() / &masses[b as usize])
            .collect()
    }
}

/// The inverted Haar system as a weight family along the source map: the
/// weight of `γ` over its source fiber is the Haar weight of `γ⁻¹` over its
/// range fiber. Inverting twice gives back the Haar weights.
pub fn invert_haar(g: &GroupoidWithHaar) -> WeightFamily {
    let gg = &g.groupoid;
    let pi: Vec<u32> = (0..gg.n_arrows() as u32).map(|a| gg.src(a)).collect();
    let w: Vec<Rat> = (0..gg.n_arrows() as u32)
        .map(|a| g.haar.weight(gg.inv(a)).clone())
        .collect();
    WeightFamily::new(pi, gg.n_units(), w).expect("Haar weights are positive")
}

/// Pushes `w` forward along a bijection `map` of carriers that commutes with
/// the targets: the image of point `z` carries the weight of `z`.
pub fn pushforward(map: &[u32], w: &WeightFamily, target_pi: &[u32], target_base: usize) -> Result<WeightFamily> {
    if map.len() != w.carrier_size() || map.len() != target_pi.len() {
        return Err(Error::Invalid("pushforward map is not a bijection of the carriers".into()));
    }
    let mut seen = vec![false; target_pi.len()];
    for &img in map {
        if img as usize >= target_pi.len() || seen[img as usize] {
            return Err(Error::Invalid("pushforward map is not a bijection of the carriers".into()));
        }
        seen[img as usize] = true;
    }
    for (z, &img) in map.iter().enumerate() {
        if w.pi[z] != target_pi[img as usize] {
            return Err(Error::Invalid(format!(
                "pushforward map does not commute with targets at point {z}"
            )));
        }
    }
    let mut new_w = vec![Rat::from_integer(0.into()); map.len()];
    for (z, &img) in map.iter().enumerate() {
        new_w[img as usize] = w.w[z].clone();
    }
    WeightFamily::new(target_pi.to_vec(), target_base, new_w)
}

/// The Radon–Nikodym derivative `dw1/dw2` of two families along the same
/// target map: the pointwise ratio, which full support always defines.
pub fn equivalence(w1: &WeightFamily, w2: &WeightFamily) -> Result<Vec<Rat>> {
    if w1.pi != w2.pi || w1.base_size != w2.base_size {
        return Err(Error::Invalid("families do not share a target map".into()));
    }
    Ok(w1
        .w
        .iter()
        .zip(w2.w.iter())
        .map(|(a, b)| a / b)
        .collect())
}

/// Invariance of `w` under a right action whose base is indexed by the
/// acting groupoid's units: `w(z·η) = w(z)` for every composable pair.
pub fn check_invariance(w: &WeightFamily, action: &RightAction, h: &FiniteGroupoid) -> Report {
    let mut r = Report::new();
    if w.pi != action.momentum || w.base_size != h.n_units() {
        r.fail("invariance.target", "family is not fibered over the action's momentum map");
        return r;
    }
    let mut ok = true;
    let mut witness = String::new();
    'outer: for z in 0..action.n_points() as u32 {
        for a in 0..h.n_arrows() as u32 {
            if let Some(za) = action.act(z, a) {
                if w.weight(za) != w.weight(z) {
                    ok = false;
                    witness = format!(
                        "weight moves along (point {z})·{}: {} vs {}",
                        h.arrow_name(a),
                        fmt_rat(w.weight(z)),
                        fmt_rat(w.weight(za))
                    );
                    break 'outer;
                }
            }
        }
    }
    r.check("invariance.translation", ok, || witness.clone());
    r
}

/// The modular function of a left action on a weighted carrier, stored on
/// composable pairs `(γ, z)` with `src(γ) = rho(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Adjoining {
    n_points: usize,
    vals: Vec<Option<Rat>>,
}

impl Adjoining {
    pub fn get(&self, arrow: u32, point: u32) -> Option<&Rat> {
        self.vals[arrow as usize * self.n_points + point as usize].as_ref()
    }

    pub fn expect(&self, arrow: u32, point: u32) -> &Rat {
        self.get(arrow, point).expect("pair is composable")
    }

    pub fn composable_pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let n = self.n_points;
        self.vals.iter().enumerate().filter_map(move |(i, v)| {
            v.as_ref().map(|_| ((i / n) as u32, (i % n) as u32))
        })
    }

    pub fn is_constant_one(&self) -> bool {
        self.vals
            .iter()
            .flatten()
            .all(|v| *v == one())
    }
}

/// Computes the modular function of the left `g`-action on the carrier of
/// `lambda` by the closed-form fiber ratio
/// `Δ(γ, z) = w(γ⁻¹)·λ(z) / (w(γ)·λ(γ·z))`
/// and then certifies it against the defining double-integral identity over
/// every Dirac test function, which pins each value uniquely.
pub fn quasi_invariance_modular(
    g: &GroupoidWithHaar,
    x: &Bispace,
    lambda: &WeightFamily,
) -> Result<Adjoining> {
    if lambda.pi != x.sigma {
        return Err(Error::Invalid("family is not fibered along the right momentum map".into()));
    }
    let gg = &g.groupoid;
    let n = x.n_points();
    let mut vals = vec![None; gg.n_arrows() * n];
    for a in 0..gg.n_arrows() as u32 {
        for p in 0..n as u32 {
            if gg.src(a) == x.rho(p) {
                let ap = x.left_act(a, p).expect("composable");
                if x.sigma(ap) != x.sigma(p) {
                    return Err(Error::NotQuasiInvariant(format!(
                        "left action moves {} across right fibers",
                        x.point_name(p)
                    )));
                }
                let num = g.haar.weight(gg.inv(a)) * lambda.weight(p);
                let den = g.haar.weight(a) * lambda.weight(ap);
                vals[a as usize * n + p as usize] = Some(num / den);
            }
        }
    }
    let delta = Adjoining { n_points: n, vals };
    certify_modular(g, x, lambda, &delta)?;
    Ok(delta)
}

/// Independent certification route for the modular function: for each Dirac
/// test function on composable pairs, both sides of the defining identity
/// are accumulated per base point by a full scan and compared exactly.
pub fn certify_modular(
    g: &GroupoidWithHaar,
    x: &Bispace,
    lambda: &WeightFamily,
    delta: &Adjoining,
) -> Result<()> {
    let gg = &g.groupoid;
    let n_units = lambda.base_size;
    for (a0, p0) in delta.composable_pairs() {
        let mut lhs = vec![Rat::from_integer(0.into()); n_units];
        let mut rhs = vec![Rat::from_integer(0.into()); n_units];
        for p in 0..x.n_points() as u32 {
            let u = x.sigma(p) as usize;
            for &gamma in gg.range_fiber(x.rho(p)) {
                // left side: F(γ⁻¹, p) dα(γ) dλ(p)
                if gg.inv(gamma) == a0 && p == p0 {
                    lhs[u] += g.haar.weight(gamma) * lambda.weight(p);
                }
                // right side: F(γ, γ⁻¹p) Δ(γ, γ⁻¹p) dα(γ) dλ(p)
                if gamma == a0 {
                    let gp = x
                        .left_act(gg.inv(gamma), p)
                        .expect("γ⁻¹ acts on the range fiber of ρ(p)");
                    if gp == p0 {
                        rhs[u] += delta.expect(gamma, gp) * g.haar.weight(gamma) * lambda.weight(p);
                    }
                }
            }
        }
        if lhs != rhs {
            return Err(Error::NotQuasiInvariant(format!(
                "defining identity fails for the Dirac at ({}, {})",
                gg.arrow_name(a0),
                x.point_name(p0)
            )));
        }
    }
    Ok(())
}

/// Uniqueness of the modular function on a finite instance: each Dirac test
/// function isolates one value with a strictly positive coefficient.
pub fn modular_uniqueness(g: &GroupoidWithHaar, x: &Bispace, lambda: &WeightFamily, delta: &Adjoining) -> Report {
    let mut r = Report::new();
    let mut ok = true;
    let mut witness = String::new();
    for (a, p) in delta.composable_pairs() {
        let ap = x.left_act(a, p).expect("composable");
        let coeff = g.haar.weight(a) * lambda.weight(ap);
        if !is_positive(&coeff) {
            ok = false;
            witness = format!(
                "vanishing coefficient at ({}, {})",
                g.groupoid.arrow_name(a),
                x.point_name(p)
            );
            break;
        }
    }
    r.check("modular.uniqueness_coefficients", ok, || witness.clone());
    r
}

/// The family of measures along the orbit projection induced by the Haar
/// system of a transformation groupoid: the Haar fiber at any basepoint of
/// an orbit pushed forward along the source map. Left invariance makes the
/// result independent of the basepoint, and that independence is checked.
pub fn induced_family_along_quotient(
    t: &TransformationGroupoid,
    orbits: &OrbitPartition,
) -> Result<WeightFamily> {
    let n = t.n_points();
    let compute_from = |base: u32| -> Vec<Rat> {
        let mut w = vec![Rat::from_integer(0.into()); n];
        for i in 0..t.n_arrows() {
            if t.rng_of(i) == base {
                w[t.src_of(i) as usize] += t.haar_weight(i);
            }
        }
        w
    };
    let mut weights = vec![Rat::from_integer(0.into()); n];
    for (class, &rep) in orbits.reps.iter().enumerate() {
        let from_rep = compute_from(rep);
        for z in orbits.members(class as u32) {
            weights[z as usize] = from_rep[z as usize].clone();
        }
        // basepoint independence
        for z in orbits.members(class as u32) {
            if z != rep {
                let alt = compute_from(z);
                for m in orbits.members(class as u32) {
                    if alt[m as usize] != from_rep[m as usize] {
                        return Err(Error::Invalid(format!(
                            "induced family depends on the basepoint within orbit of {rep}"
                        )));
                    }
                }
            }
        }
    }
    WeightFamily::new(orbits.class_of.clone(), orbits.n_classes(), weights)
}

/// Checks that `m` (a family along some `tau` constant on orbits) is
/// invariant for the transformation groupoid: translating either way along
/// any arrow preserves Haar-weighted mass.
pub fn check_measure_invariance(m: &WeightFamily, t: &TransformationGroupoid) -> Result<()> {
    for i in 0..t.n_arrows() {
        let z = t.rng_of(i);
        let za = t.src_of(i);
        if m.pi[z as usize] != m.pi[za as usize] {
            return Err(Error::Schema(format!(
                "measure target is not constant on orbits at arrow {}",
                t.arrow_label(i)
            )));
        }
        let lhs = t.haar_weight(i) * m.weight(z);
        let rhs = t.haar_weight(t.inv_of(i)) * m.weight(za);
        if lhs != rhs {
            return Err(Error::NotInvariant(t.arrow_label(i)));
        }
    }
    Ok(())
}

/// Descends an invariant measure along the orbit projection: `μ = m((·∘π)e)`
/// with the canonical cutoff `e` for `fam`. The disintegration identity
/// `μ ∘ fiber_integrate = m` is certified on every Dirac function.
pub fn descend_measure(
    m: &WeightFamily,
    t: &TransformationGroupoid,
    fam: &WeightFamily,
    orbits: &OrbitPartition,
) -> Result<WeightFamily> {
    check_measure_invariance(m, t)?;
    let e = fam.cutoff();
    let n_classes = orbits.n_classes();
    let mut mu = vec![Rat::from_integer(0.into()); n_classes];
    let mut pi_bar = vec![0u32; n_classes];
    for (class, &rep) in orbits.reps.iter().enumerate() {
        pi_bar[class] = m.pi[rep as usize];
    }
    for z in 0..m.carrier_size() {
        mu[orbits.class_of[z] as usize] += &e[z] * &m.w[z];
    }
    let mu = WeightFamily::new(pi_bar, m.base_size, mu)?;
    // disintegration on Diracs: μ([z])·fam(z) = m(z)
    for z in 0..m.carrier_size() {
        let lhs = mu.weight(orbits.class_of[z]) * fam.weight(z as u32);
        if lhs != m.w[z] {
            return Err(Error::NotInvariant(format!(
                "disintegration fails at carrier point {z}"
            )));
        }
    }
    Ok(mu)
}

/// If `f∘src = f∘rng` on every arrow of the transformation groupoid, returns
/// the induced function on orbit classes.
pub fn invariant_function_descends(
    f: &[Rat],
    t: &TransformationGroupoid,
    orbits: &OrbitPartition,
) -> Result<Vec<Rat>> {
    for i in 0..t.n_arrows() {
        if f[t.rng_of(i) as usize] != f[t.src_of(i) as usize] {
            return Err(Error::NotInvariant(t.arrow_label(i)));
        }
    }
    Ok(orbits.reps.iter().map(|&rep| f[rep as usize].clone()).collect())
}

/// Composite of two stages of families: `w1` along `π1: Z → W` and `w2`
/// along `π2: W → Ω` give the family `z ↦ w1(z)·w2(π1(z))` along `π2∘π1`.
pub fn compose_families(w1: &WeightFamily, w2: &WeightFamily) -> Result<WeightFamily> {
    if w1.base_size != w2.carrier_size() {
        return Err(Error::Invalid("stage mismatch in family composition".into()));
    }
    let pi: Vec<u32> = w1.pi.iter().map(|&mid| w2.pi[mid as usize]).collect();
    let w = w1
        .w
        .iter()
        .zip(w1.pi.iter())
        .map(|(a, &mid)| a * w2.weight(mid))
        .collect();
    WeightFamily::new(pi, w2.base_size, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::FiniteGroupoid;
    use crate::rat::{rat, rat_int};
    use std::sync::Arc;

    fn family(pi: Vec<u32>, base: usize, w: Vec<Rat>) -> WeightFamily {
        WeightFamily::new(pi, base, w).unwrap()
    }

    #[test]
    fn pushforward_relabels_weights() {
        let w = family(vec![0, 0], 1, vec![rat_int(1), rat_int(2)]);
        let swapped = pushforward(&[1, 0], &w, &[0, 0], 1).unwrap();
        assert_eq!(swapped.w, vec![rat_int(2), rat_int(1)]);
        let idp = pushforward(&[0, 1], &w, &[0, 0], 1).unwrap();
        assert_eq!(idp, w);
    }

    #[test]
    fn pushforward_is_functorial_on_three_points() {
        let w = family(vec![0; 3], 1, vec![rat_int(1), rat_int(2), rat_int(5)]);
        let f = [1u32, 2, 0];
        let g = [2u32, 0, 1];
        let gf: Vec<u32> = (0..3).map(|z| g[f[z] as usize]).collect();
        let lhs = pushforward(&gf, &w, &[0; 3], 1).unwrap();
        let rhs = pushforward(&g, &pushforward(&f, &w, &[0; 3], 1).unwrap(), &[0; 3], 1).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn equivalence_is_the_pointwise_ratio() {
        let w1 = family(vec![0, 0], 1, vec![rat_int(1), rat_int(2)]);
        let w2 = family(vec![0, 0], 1, vec![rat_int(2), rat_int(1)]);
        assert_eq!(equivalence(&w1, &w1).unwrap(), vec![one(), one()]);
        assert_eq!(equivalence(&w1, &w2).unwrap(), vec![rat(1, 2), rat_int(2)]);
        // reciprocal law
        let fwd = equivalence(&w1, &w2).unwrap();
        let bwd = equivalence(&w2, &w1).unwrap();
        for (a, b) in fwd.iter().zip(bwd.iter()) {
            assert_eq!(a * b, one());
        }
    }

    /// The swap example: Z/2 acting on {p, q} by exchange over a trivial
    /// right groupoid, with weights (1, 2).
    fn swap_example() -> (Arc<GroupoidWithHaar>, Bispace, WeightFamily) {
        let g = GroupoidWithHaar::counting("Z2", FiniteGroupoid::cyclic_group(2));
        let x = Bispace::new(
            vec!["p".into(), "q".into()],
            vec![0, 0],
            vec![0, 0],
            vec![Some(0), Some(1), Some(1), Some(0)],
            vec![Some(0), Some(1)],
            2,
            1,
        )
        .unwrap();
        let lambda = family(vec![0, 0], 1, vec![rat_int(1), rat_int(2)]);
        (g, x, lambda)
    }

    /// Independent oracle: solve the defining identity for Δ directly from
    /// Dirac test functions, without the closed form.
    fn oracle_modular(g: &GroupoidWithHaar, x: &Bispace, lambda: &WeightFamily) -> Vec<((u32, u32), Rat)> {
        let gg = &g.groupoid;
        let mut out = Vec::new();
        for a0 in 0..gg.n_arrows() as u32 {
            for p0 in 0..x.n_points() as u32 {
                if gg.src(a0) != x.rho(p0) {
                    continue;
                }
                // LHS of the identity for the Dirac at (a0, p0)
                let mut lhs = Rat::from_integer(0.into());
                let mut coeff = Rat::from_integer(0.into());
                for p in 0..x.n_points() as u32 {
                    for &gamma in gg.range_fiber(x.rho(p)) {
                        if gg.inv(gamma) == a0 && p == p0 {
                            lhs += g.haar.weight(gamma) * lambda.weight(p);
                        }
                        if gamma == a0 && x.left_act(gg.inv(gamma), p) == Some(p0) {
                            coeff += g.haar.weight(gamma) * lambda.weight(p);
                        }
                    }
                }
                out.push(((a0, p0), lhs / coeff));
            }
        }
        out
    }

    #[test]
    fn swap_example_modular_function() {
        let (g, x, lambda) = swap_example();
        let delta = quasi_invariance_modular(&g, &x, &lambda).unwrap();
        // frozen values computed by the Dirac oracle: Δ(g,p)=1/2, Δ(g,q)=2,
        // Δ(e,·)=1
        assert_eq!(delta.expect(1, 0), &rat(1, 2));
        assert_eq!(delta.expect(1, 1), &rat_int(2));
        assert_eq!(delta.expect(0, 0), &one());
        assert_eq!(delta.expect(0, 1), &one());
        for ((a, p), v) in oracle_modular(&g, &x, &lambda) {
            assert_eq!(delta.expect(a, p), &v, "oracle disagrees at ({a},{p})");
        }
        assert!(modular_uniqueness(&g, &x, &lambda, &delta).passed());
    }

    #[test]
    fn trivial_group_modular_is_one() {
        let g = GroupoidWithHaar::counting("1", FiniteGroupoid::cyclic_group(1));
        let x = Bispace::new(
            vec!["p".into(), "q".into()],
            vec![0, 0],
            vec![0, 0],
            vec![Some(0), Some(1)],
            vec![Some(0), Some(1)],
            1,
            1,
        )
        .unwrap();
        let lambda = family(vec![0, 0], 1, vec![rat_int(3), rat_int(7)]);
        let delta = quasi_invariance_modular(&g, &x, &lambda).unwrap();
        assert!(delta.is_constant_one());
    }

    #[test]
    fn invariance_detects_moved_weight() {
        let (_, x, lambda) = swap_example();
        // right action of Z/2 that swaps p and q, while weights are (1, 2)
        let h = FiniteGroupoid::cyclic_group(2);
        let action = RightAction {
            momentum: vec![0, 0],
            table: vec![Some(0), Some(1), Some(1), Some(0)],
            n_arrows: 2,
        };
        let rep = check_invariance(&lambda, &action, &h);
        assert!(!rep.passed());
        // the trivial right action of the one-arrow groupoid passes
        let triv = FiniteGroupoid::cyclic_group(1);
        let rep = check_invariance(&lambda, &x.right_action(), &triv);
        assert!(rep.passed());
    }

    #[test]
    fn fiber_integration_and_cutoff() {
        let w = family(vec![0, 0, 1], 2, vec![rat_int(1), rat_int(3), rat_int(2)]);
        let ones = vec![one(), one(), one()];
        assert_eq!(w.fiber_integrate(&ones), vec![rat_int(4), rat_int(2)]);
        let dirac = vec![Rat::from_integer(0.into()), one(), Rat::from_integer(0.into())];
        assert_eq!(w.fiber_integrate(&dirac), vec![rat_int(3), rat_int(0)]);
        let e = w.cutoff();
        assert_eq!(e, vec![rat(1, 4), rat(1, 4), rat(1, 2)]);
        assert_eq!(w.fiber_integrate(&e), vec![one(), one()]);
    }

    #[test]
    fn two_stage_fiber_integration_composes() {
        // Z -> W -> Ω on a 4-point carrier: integrating the composed family
        // equals integrating stage by stage, on every Dirac function.
        let w1 = family(vec![0, 0, 1, 1], 2, vec![rat_int(1), rat_int(2), rat_int(3), rat_int(5)]);
        let w2 = family(vec![0, 0], 1, vec![rat_int(2), rat_int(7)]);
        let comp = compose_families(&w1, &w2).unwrap();
        for z in 0..4 {
            let mut dirac = vec![Rat::from_integer(0.into()); 4];
            dirac[z] = one();
            let staged = w2.fiber_integrate(&w1.fiber_integrate(&dirac));
            assert_eq!(comp.fiber_integrate(&dirac), staged);
        }
    }

    #[test]
    fn free_swap_descends_counting_to_unit_mass() {
        let (gh, _, _) = swap_example();
        let action = RightAction {
            momentum: vec![0, 0],
            table: vec![Some(0), Some(1), Some(1), Some(0)],
            n_arrows: 2,
        };
        let t = TransformationGroupoid::new(gh, action).unwrap();
        let orbits = t.orbits();
        let fam = induced_family_along_quotient(&t, &orbits).unwrap();
        assert_eq!(fam.w, vec![one(), one()]);
        assert_eq!(fam.fiber_mass(0), rat_int(2));
        let m = family(vec![0, 0], 1, vec![one(), one()]);
        let mu = descend_measure(&m, &t, &fam, &orbits).unwrap();
        assert_eq!(mu.w, vec![one()]);
    }

    #[test]
    fn trivial_action_descends_identically() {
        let gh = GroupoidWithHaar::counting("1", FiniteGroupoid::cyclic_group(1));
        let action = crate::action::trivial_action(&gh.groupoid, 3, 0);
        let t = TransformationGroupoid::new(gh, action).unwrap();
        let orbits = t.orbits();
        let fam = induced_family_along_quotient(&t, &orbits).unwrap();
        let m = family(vec![0; 3], 1, vec![rat_int(2), rat_int(3), rat_int(5)]);
        let mu = descend_measure(&m, &t, &fam, &orbits).unwrap();
        assert_eq!(mu.w, m.w);
    }

    #[test]
    fn equivalent_invariant_measures_descend_equivalently() {
        // Lemma about quotient measures, part (iii), on a 4-point instance:
        // dμ/dμ' is the descended dm/dm'.
        let gh = GroupoidWithHaar::counting("Z2", FiniteGroupoid::cyclic_group(2));
        let action = RightAction {
            momentum: vec![0; 4],
            table: vec![
                Some(0), Some(1), Some(1), Some(0),
                Some(2), Some(3), Some(3), Some(2),
            ],
            n_arrows: 2,
        };
        let t = TransformationGroupoid::new(gh, action).unwrap();
        let orbits = t.orbits();
        let fam = induced_family_along_quotient(&t, &orbits).unwrap();
        let m = family(vec![0; 4], 1, vec![rat_int(2), rat_int(2), rat_int(3), rat_int(3)]);
        let m2 = family(vec![0; 4], 1, vec![rat_int(4), rat_int(4), rat_int(3), rat_int(3)]);
        let mu = descend_measure(&m, &t, &fam, &orbits).unwrap();
        let mu2 = descend_measure(&m2, &t, &fam, &orbits).unwrap();
        let dm = equivalence(&m, &m2).unwrap();
        let descended = invariant_function_descends(&dm, &t, &orbits).unwrap();
        assert_eq!(equivalence(&mu, &mu2).unwrap(), descended);
    }

    #[test]
    fn non_orbit_constant_function_fails_descent() {
        let gh = GroupoidWithHaar::counting("Z2", FiniteGroupoid::cyclic_group(2));
        let action = RightAction {
            momentum: vec![0, 0],
            table: vec![Some(0), Some(1), Some(1), Some(0)],
            n_arrows: 2,
        };
        let t = TransformationGroupoid::new(gh, action).unwrap();
        let orbits = t.orbits();
        let f = vec![rat_int(1), rat_int(2)];
        assert!(invariant_function_descends(&f, &t, &orbits).is_err());
        let c = vec![rat_int(5), rat_int(5)];
        assert_eq!(invariant_function_descends(&c, &t, &orbits).unwrap(), vec![rat_int(5)]);
    }
}
