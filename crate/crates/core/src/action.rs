//! Right actions of groupoids on finite carriers, their transformation
//! groupoids, and orbit quotients.
//!
//! The arrow convention is fixed once: an arrow of a transformation groupoid
//! is a pair `(z, γ)` with `momentum(z) = rng(γ)`, with range `z`, source
//! `z·γ` and composition `(z, γ)(z·γ, η) = (z, γη)`. A paper writing the
//! action groupoid as `G⋉X` for a left action translates into this form by
//! acting through inverses: `x∗γ = γ⁻¹·x`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, GroupoidWithHaar, HaarSystem};
use crate::rat::Rat;
use crate::report::Report;

/// A right action of a groupoid on a finite carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct RightAction {
    /// Momentum map: carrier point -> acting-groupoid unit.
    pub momentum: Vec<u32>,
    /// `act[z * n_arrows + a]`, defined exactly when `momentum(z) == rng(a)`.
    pub table: Vec<Option<u32>>,
    pub n_arrows: usize,
}

impl RightAction {
    pub fn n_points(&self) -> usize {
        self.momentum.len()
    }

    pub fn act(&self, z: u32, a: u32) -> Option<u32> {
        self.table[z as usize * self.n_arrows + a as usize]
    }

    /// Action axioms: defined exactly on the declared domain, units act as
    /// the identity, compatibility with composition, and momentum
    /// equivariance `momentum(z·γ) = src(γ)`.
    pub fn validate(&self, g: &FiniteGroupoid) -> Report {
        let mut r = Report::new();
        let mut ok = true;
        let mut witness = String::new();
        'dom: for z in 0..self.n_points() as u32 {
            for a in 0..g.n_arrows() as u32 {
                let defined = self.act(z, a).is_some();
                let should = self.momentum[z as usize] == g.rng(a);
                if defined != should {
                    ok = false;
                    witness = format!("action domain wrong at (point {z}, {})", g.arrow_name(a));
                    break 'dom;
                }
                if let Some(za) = self.act(z, a) {
                    if self.momentum[za as usize] != g.src(a) {
                        ok = false;
                        witness =
                            format!("momentum not equivariant at (point {z}, {})", g.arrow_name(a));
                        break 'dom;
                    }
                }
            }
        }
        r.check("action.domain_and_momentum", ok, || witness.clone());

        let mut ok = true;
        let mut witness = String::new();
        for z in 0..self.n_points() as u32 {
            let e = g.unit_arrow(self.momentum[z as usize]);
            if self.act(z, e) != Some(z) {
                ok = false;
                witness = format!("unit arrow moves point {z}");
                break;
            }
        }
        r.check("action.units_fix_points", ok, || witness.clone());

        let mut ok = true;
        let mut witness = String::new();
        'comp: for z in 0..self.n_points() as u32 {
            for a in 0..g.n_arrows() as u32 {
                let Some(za) = self.act(z, a) else { continue };
                for b in 0..g.n_arrows() as u32 {
                    let Some(ab) = g.compose(a, b) else { continue };
                    if self.act(za, b) != self.act(z, ab) {
                        ok = false;
                        witness = format!(
                            "compatibility fails at (point {z}, {}, {})",
                            g.arrow_name(a),
                            g.arrow_name(b)
                        );
                        break 'comp;
                    }
                }
            }
        }
        r.check("action.compatibility", ok, || witness.clone());
        r
    }
}

/// The transformation groupoid of a right action, with the Haar system
/// transported fiberwise from the acting groupoid.
#[derive(Debug, Clone)]
pub struct TransformationGroupoid {
    pub acting: Arc<GroupoidWithHaar>,
    pub action: RightAction,
    /// All pairs `(z, a)` with `momentum(z) = rng(a)`, sorted.
    pub arrows: Vec<(u32, u32)>,
}

impl TransformationGroupoid {
    pub fn new(acting: Arc<GroupoidWithHaar>, action: RightAction) -> Result<Self> {
        if action.n_arrows != acting.groupoid.n_arrows() {
            return Err(Error::InvalidAction(
                "action table does not match acting groupoid".into(),
            ));
        }
        let rep = action.validate(&acting.groupoid);
        if let Some(f) = rep.failures().next() {
            return Err(Error::InvalidAction(f.name.clone()));
        }
        let mut arrows = Vec::new();
        for z in 0..action.n_points() as u32 {
            for a in 0..acting.groupoid.n_arrows() as u32 {
                if action.act(z, a).is_some() {
                    arrows.push((z, a));
                }
            }
        }
        Ok(TransformationGroupoid {
            acting,
            action,
            arrows,
        })
    }

    pub fn n_points(&self) -> usize {
        self.action.n_points()
    }

    pub fn n_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn rng_of(&self, i: usize) -> u32 {
        self.arrows[i].0
    }

    pub fn src_of(&self, i: usize) -> u32 {
        let (z, a) = self.arrows[i];
        self.action.act(z, a).expect("arrow is composable")
    }

    /// Index of `(z, a)` within `arrows`.
    pub fn arrow_index(&self, z: u32, a: u32) -> Option<usize> {
        self.arrows.binary_search(&(z, a)).ok()
    }

    pub fn inv_of(&self, i: usize) -> usize {
        let (z, a) = self.arrows[i];
        let za = self.action.act(z, a).expect("arrow is composable");
        self.arrow_index(za, self.acting.groupoid.inv(a))
            .expect("inverse arrow exists")
    }

    /// `(z, γ)(z·γ, η) = (z, γη)`; `None` when not composable.
    pub fn compose_arrows(&self, i: usize, j: usize) -> Option<usize> {
        let (z, a) = self.arrows[i];
        let (w, b) = self.arrows[j];
        if self.src_of(i) != w {
            return None;
        }
        let ab = self.acting.groupoid.compose(a, b)?;
        self.arrow_index(z, ab)
    }

    /// Induced Haar weight of arrow `i`: the acting groupoid's weight of its
    /// arrow component.
    pub fn haar_weight(&self, i: usize) -> &Rat {
        self.acting.haar.weight(self.arrows[i].1)
    }

    pub fn is_unit(&self, i: usize) -> bool {
        let (z, a) = self.arrows[i];
        self.acting.groupoid.unit_arrow(self.acting.groupoid.rng(a)) == a
            && self.action.act(z, a) == Some(z)
    }

    pub fn arrow_label(&self, i: usize) -> String {
        let (z, a) = self.arrows[i];
        format!("(z{z}, {})", self.acting.groupoid.arrow_name(a))
    }

    /// Materializes the transformation groupoid as plain tables so the
    /// groupoid and Haar validators can run on it.
    pub fn to_groupoid_with_haar(&self, name: &str) -> Result<Arc<GroupoidWithHaar>> {
        let units: Vec<String> = (0..self.n_points()).map(|z| format!("z{z}")).collect();
        let arrows: Vec<String> = (0..self.n_arrows())
            .map(|i| {
                let (z, a) = self.arrows[i];
                format!("(z{z}|{})", self.acting.groupoid.arrow_name(a))
            })
            .collect();
        let src: Vec<u32> = (0..self.n_arrows()).map(|i| self.src_of(i)).collect();
        let rng: Vec<u32> = (0..self.n_arrows()).map(|i| self.rng_of(i)).collect();
        let inv: Vec<u32> = (0..self.n_arrows()).map(|i| self.inv_of(i) as u32).collect();
        let mut comp = Vec::new();
        for i in 0..self.n_arrows() {
            for j in 0..self.n_arrows() {
                if let Some(k) = self.compose_arrows(i, j) {
                    comp.push((i as u32, j as u32, k as u32));
                }
            }
        }
        let unit_arrow: Vec<u32> = (0..self.n_points() as u32)
            .map(|z| {
                let e = self
                    .acting
                    .groupoid
                    .unit_arrow(self.action.momentum[z as usize]);
                self.arrow_index(z, e).expect("unit arrow exists") as u32
            })
            .collect();
        let g = FiniteGroupoid::from_tables(units, arrows, src, rng, &comp, inv, unit_arrow)?;
        let haar = HaarSystem {
            weights: (0..self.n_arrows()).map(|i| self.haar_weight(i).clone()).collect(),
        };
        GroupoidWithHaar::new(name, g, haar)
    }

    pub fn orbits(&self) -> OrbitPartition {
        orbit_quotient(&self.action)
    }
}

/// Orbit partition of a carrier under a right action, with deterministic
/// least-index representatives. Classes are ordered by representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    pub class_of: Vec<u32>,
    pub reps: Vec<u32>,
}

impl OrbitPartition {
    pub fn n_classes(&self) -> usize {
        self.reps.len()
    }

    pub fn members(&self, class: u32) -> Vec<u32> {
        (0..self.class_of.len() as u32)
            .filter(|&z| self.class_of[z as usize] == class)
            .collect()
    }
}

/// Computes orbits; the projection is total and surjective by construction.
pub fn orbit_quotient(action: &RightAction) -> OrbitPartition {
    let n = action.n_points();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut [u32], x: u32) -> u32 {
        let mut root = x;
        while parent[root as usize] != root {
            root = parent[root as usize];
        }
        let mut cur = x;
        while parent[cur as usize] != root {
            let next = parent[cur as usize];
            parent[cur as usize] = root;
            cur = next;
        }
        root
    }
    for z in 0..n as u32 {
        for a in 0..action.n_arrows as u32 {
            if let Some(za) = action.act(z, a) {
                let (rz, rza) = (find(&mut parent, z), find(&mut parent, za));
                if rz != rza {
                    // union by least root keeps representatives minimal
                    let (lo, hi) = if rz < rza { (rz, rza) } else { (rza, rz) };
                    parent[hi as usize] = lo;
                }
            }
        }
    }
    let mut reps = Vec::new();
    let mut class_of = vec![u32::MAX; n];
    for z in 0..n as u32 {
        let root = find(&mut parent, z);
        if root == z {
            reps.push(z);
        }
    }
    for z in 0..n as u32 {
        let root = find(&mut parent, z);
        let class = reps.binary_search(&root).expect("root is a representative") as u32;
        class_of[z as usize] = class;
    }
    OrbitPartition { class_of, reps }
}

/// The trivial right action of `g` on `n` points all sitting over `unit`.
pub fn trivial_action(g: &FiniteGroupoid, n: usize, unit: u32) -> RightAction {
    let mut table = vec![None; n * g.n_arrows()];
    for z in 0..n {
        for a in 0..g.n_arrows() as u32 {
            if g.rng(a) == unit {
                // only isotropy at `unit` acts, and it must fix everything
                if g.src(a) == unit {
                    table[z * g.n_arrows() + a as usize] = Some(z as u32);
                }
            }
        }
    }
    RightAction {
        momentum: vec![unit; n],
        table,
        n_arrows: g.n_arrows(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{validate_groupoid, validate_haar};

    /// Z/2 swapping two points, as a right action.
    pub(crate) fn swap_action() -> (Arc<GroupoidWithHaar>, RightAction) {
        let g = FiniteGroupoid::cyclic_group(2);
        let gh = GroupoidWithHaar::counting("Z2", g);
        let action = RightAction {
            momentum: vec![0, 0],
            table: vec![Some(0), Some(1), Some(1), Some(0)],
            n_arrows: 2,
        };
        (gh, action)
    }

    #[test]
    fn transformation_groupoid_of_swap() {
        let (gh, action) = swap_action();
        let t = TransformationGroupoid::new(gh, action).unwrap();
        assert_eq!(t.n_arrows(), 4);
        assert_eq!(t.n_points(), 2);
        let materialized = t.to_groupoid_with_haar("T").unwrap();
        assert!(validate_groupoid(&materialized.groupoid).passed());
        assert!(validate_haar(&materialized.groupoid, &materialized.haar).passed());
        let orbits = t.orbits();
        assert_eq!(orbits.n_classes(), 1);
        assert_eq!(orbits.reps, vec![0]);
    }

    #[test]
    fn trivial_action_quotient_is_identity() {
        let g = FiniteGroupoid::space(1);
        let action = trivial_action(&g, 4, 0);
        let orbits = orbit_quotient(&action);
        assert_eq!(orbits.n_classes(), 4);
        for z in 0..4u32 {
            assert_eq!(orbits.class_of[z as usize], z);
        }
    }

    #[test]
    fn trivial_group_transformation_groupoid_has_only_units() {
        let g = FiniteGroupoid::cyclic_group(1);
        let gh = GroupoidWithHaar::counting("1", g);
        let action = trivial_action(&gh.groupoid, 3, 0);
        let t = TransformationGroupoid::new(gh, action).unwrap();
        assert_eq!(t.n_arrows(), 3);
        assert!((0..3).all(|i| t.is_unit(i)));
    }

    #[test]
    fn diagonal_free_swap_on_four_points_has_two_classes() {
        // Two independent swapped pairs under one Z/2: points 0<->1, 2<->3.
        let g = FiniteGroupoid::cyclic_group(2);
        let gh = GroupoidWithHaar::counting("Z2", g);
        let action = RightAction {
            momentum: vec![0; 4],
            table: vec![
                Some(0),
                Some(1),
                Some(1),
                Some(0),
                Some(2),
                Some(3),
                Some(3),
                Some(2),
            ],
            n_arrows: 2,
        };
        let t = TransformationGroupoid::new(gh, action).unwrap();
        let orbits = t.orbits();
        assert_eq!(orbits.n_classes(), 2);
        assert_eq!(orbits.reps, vec![0, 2]);
    }
}
