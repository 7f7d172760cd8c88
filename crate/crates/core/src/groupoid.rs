//! Finite groupoids and Haar weight systems.
//!
//! A groupoid is stored with explicit tables: source/range per arrow, a
//! partial composition table, an inverse table and the unit embedding. All
//! identifiers are interned as indices into lexicographically sorted name
//! vectors, which fixes the total order used everywhere for deterministic
//! representatives.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rat::{fmt_rat, is_positive, Rat};
use crate::report::Report;

/// A finite groupoid with total structure tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupoid {
    pub units: Vec<String>,
    pub arrows: Vec<String>,
    src: Vec<u32>,
    rng: Vec<u32>,
    /// `comp[a * n + b]` is `a∘b`, defined exactly when `src(a) == rng(b)`.
    comp: Vec<Option<u32>>,
    inv: Vec<u32>,
    unit_arrow: Vec<u32>,
    /// Arrows by range unit, each fiber sorted.
    range_fibers: Vec<Vec<u32>>,
}

impl FiniteGroupoid {
    /// Builds a groupoid from raw tables. Totality over the declared
    /// domains is enforced here; the algebraic axioms are checked by
    /// [`validate_groupoid`].
    pub fn from_tables(
        units: Vec<String>,
        arrows: Vec<String>,
        src: Vec<u32>,
        rng: Vec<u32>,
        comp_entries: &[(u32, u32, u32)],
        inv: Vec<u32>,
        unit_arrow: Vec<u32>,
    ) -> Result<Self> {
        let n = arrows.len();
        if src.len() != n || rng.len() != n || inv.len() != n || unit_arrow.len() != units.len() {
            return Err(Error::Schema("groupoid table lengths disagree".into()));
        }
        for (&s, &r) in src.iter().zip(rng.iter()) {
            if s as usize >= units.len() || r as usize >= units.len() {
                return Err(Error::Schema("arrow endpoint out of range".into()));
            }
        }
        let mut comp = vec![None; n * n];
        for &(a, b, c) in comp_entries {
            if a as usize >= n || b as usize >= n || c as usize >= n {
                return Err(Error::Schema("composition entry out of range".into()));
            }
            if src[a as usize] != rng[b as usize] {
                return Err(Error::Schema(format!(
                    "composition declared for non-composable pair ({}, {})",
                    arrows[a as usize], arrows[b as usize]
                )));
            }
            comp[a as usize * n + b as usize] = Some(c);
        }
        // Totality: every composable pair must be covered.
        for a in 0..n {
            for b in 0..n {
                if src[a] == rng[b] && comp[a * n + b].is_none() {
                    return Err(Error::Schema(format!(
                        "missing composition for composable pair ({}, {})",
                        arrows[a], arrows[b]
                    )));
                }
            }
        }
        let mut range_fibers = vec![Vec::new(); units.len()];
        for (a, &r) in rng.iter().enumerate() {
            range_fibers[r as usize].push(a as u32);
        }
        Ok(FiniteGroupoid {
            units,
            arrows,
            src,
            rng,
            comp,
            inv,
            unit_arrow,
            range_fibers,
        })
    }

    pub fn n_units(&self) -> usize {
        self.units.len()
    }

    pub fn n_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn src(&self, a: u32) -> u32 {
        self.src[a as usize]
    }

    pub fn rng(&self, a: u32) -> u32 {
        self.rng[a as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn unit_arrow(&self, u: u32) -> u32 {
        self.unit_arrow[u as usize]
    }

    pub fn is_unit_arrow(&self, a: u32) -> bool {
        self.unit_arrow[self.rng(a) as usize] == a
    }

    /// `a∘b`, defined when `src(a) == rng(b)`.
    pub fn compose(&self, a: u32, b: u32) -> Option<u32> {
        self.comp[a as usize * self.arrows.len() + b as usize]
    }

    /// Arrows with range `u`, sorted by index.
    pub fn range_fiber(&self, u: u32) -> &[u32] {
        &self.range_fibers[u as usize]
    }

    pub fn arrow_name(&self, a: u32) -> &str {
        &self.arrows[a as usize]
    }

    /// Index-wise structural equality, ignoring display names: two
    /// presentations agree when all tables coincide.
    pub fn same_structure(&self, other: &FiniteGroupoid) -> bool {
        self.units.len() == other.units.len()
            && self.src == other.src
            && self.rng == other.rng
            && self.comp == other.comp
            && self.inv == other.inv
            && self.unit_arrow == other.unit_arrow
    }

    pub fn unit_name(&self, u: u32) -> &str {
        &self.units[u as usize]
    }

    // ---- builders ----------------------------------------------------

    /// Cyclic group of order `n` as a one-unit groupoid. Arrows are named
    /// `g0` (the unit), `g1`, ... with `gi∘gj = g((i+j) mod n)`.
    pub fn cyclic_group(n: usize) -> Self {
        assert!(n >= 1);
        let units = vec!["u".to_string()];
        let arrows: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
        let src = vec![0u32; n];
        let rng = vec![0u32; n];
        let mut comp = Vec::new();
        for a in 0..n {
            for b in 0..n {
                comp.push((a as u32, b as u32, ((a + b) % n) as u32));
            }
        }
        let inv = (0..n).map(|a| ((n - a) % n) as u32).collect();
        FiniteGroupoid::from_tables(units, arrows, src, rng, &comp, inv, vec![0]).unwrap()
    }

    /// Pair groupoid on `n` units: one arrow `a_i_j : j -> i` per ordered
    /// pair, composing as `a_i_j ∘ a_j_k = a_i_k`.
    pub fn pair_groupoid(n: usize) -> Self {
        assert!(n >= 1);
        let units: Vec<String> = (1..=n).map(|i| format!("{i}")).collect();
        let mut arrows = Vec::new();
        let mut src = Vec::new();
        let mut rng = Vec::new();
        let ix = |i: usize, j: usize| (i * n + j) as u32;
        for i in 0..n {
            for j in 0..n {
                arrows.push(format!("a{}_{}", i + 1, j + 1));
                rng.push(i as u32);
                src.push(j as u32);
            }
        }
        let mut comp = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    comp.push((ix(i, j), ix(j, k), ix(i, k)));
                }
            }
        }
        let inv = (0..n * n).map(|a| ix(a % n, a / n)).collect();
        let unit_arrow = (0..n).map(|i| ix(i, i)).collect();
        FiniteGroupoid::from_tables(units, arrows, src, rng, &comp, inv, unit_arrow).unwrap()
    }

    /// A finite space viewed as a groupoid: `n` units carrying only their
    /// unit arrows. Units are named `p1..pn`.
    pub fn space(n: usize) -> Self {
        let units: Vec<String> = (1..=n).map(|i| format!("p{i}")).collect();
        let arrows: Vec<String> = (1..=n).map(|i| format!("id_p{i}")).collect();
        let src: Vec<u32> = (0..n as u32).collect();
        let rng = src.clone();
        let comp: Vec<(u32, u32, u32)> = (0..n as u32).map(|a| (a, a, a)).collect();
        let inv = (0..n as u32).collect();
        let unit_arrow = (0..n as u32).collect();
        FiniteGroupoid::from_tables(units, arrows, src, rng, &comp, inv, unit_arrow).unwrap()
    }

    /// Product groupoid; arrows and units are pairs, all tables componentwise.
    pub fn product(g: &FiniteGroupoid, h: &FiniteGroupoid) -> Self {
        let nu_h = h.n_units();
        let na_h = h.n_arrows();
        let units: Vec<String> = g
            .units
            .iter()
            .flat_map(|gu| h.units.iter().map(move |hu| format!("({gu},{hu})")))
            .collect();
        let arrows: Vec<String> = g
            .arrows
            .iter()
            .flat_map(|ga| h.arrows.iter().map(move |ha| format!("({ga},{ha})")))
            .collect();
        let uix = |gu: u32, hu: u32| gu * nu_h as u32 + hu;
        let aix = |ga: u32, ha: u32| ga * na_h as u32 + ha;
        let mut src = Vec::new();
        let mut rng = Vec::new();
        let mut inv = Vec::new();
        for ga in 0..g.n_arrows() as u32 {
            for ha in 0..na_h as u32 {
                src.push(uix(g.src(ga), h.src(ha)));
                rng.push(uix(g.rng(ga), h.rng(ha)));
                inv.push(aix(g.inv(ga), h.inv(ha)));
            }
        }
        let mut comp = Vec::new();
        for ga in 0..g.n_arrows() as u32 {
            for gb in 0..g.n_arrows() as u32 {
                if g.src(ga) != g.rng(gb) {
                    continue;
                }
                let gc = g.compose(ga, gb).unwrap();
                for ha in 0..na_h as u32 {
                    for hb in 0..na_h as u32 {
                        if h.src(ha) != h.rng(hb) {
                            continue;
                        }
                        let hc = h.compose(ha, hb).unwrap();
                        comp.push((aix(ga, ha), aix(gb, hb), aix(gc, hc)));
                    }
                }
            }
        }
        let mut unit_arrow = Vec::new();
        for gu in 0..g.n_units() as u32 {
            for hu in 0..nu_h as u32 {
                unit_arrow.push(aix(g.unit_arrow(gu), h.unit_arrow(hu)));
            }
        }
        FiniteGroupoid::from_tables(units, arrows, src, rng, &comp, inv, unit_arrow).unwrap()
    }

    /// Disjoint union; names are prefixed to stay unique.
    pub fn disjoint_union(g: &FiniteGroupoid, h: &FiniteGroupoid) -> Self {
        let units: Vec<String> = g
            .units
            .iter()
            .map(|u| format!("L.{u}"))
            .chain(h.units.iter().map(|u| format!("R.{u}")))
            .collect();
        let arrows: Vec<String> = g
            .arrows
            .iter()
            .map(|a| format!("L.{a}"))
            .chain(h.arrows.iter().map(|a| format!("R.{a}")))
            .collect();
        let ou = g.n_units() as u32;
        let oa = g.n_arrows() as u32;
        let src: Vec<u32> = g
            .src
            .iter()
            .copied()
            .chain(h.src.iter().map(|&s| s + ou))
            .collect();
        let rng: Vec<u32> = g
            .rng
            .iter()
            .copied()
            .chain(h.rng.iter().map(|&r| r + ou))
            .collect();
        let inv: Vec<u32> = g
            .inv
            .iter()
            .copied()
            .chain(h.inv.iter().map(|&i| i + oa))
            .collect();
        let unit_arrow: Vec<u32> = g
            .unit_arrow
            .iter()
            .copied()
            .chain(h.unit_arrow.iter().map(|&a| a + oa))
            .collect();
        let mut comp = Vec::new();
        for a in 0..g.n_arrows() as u32 {
            for b in 0..g.n_arrows() as u32 {
                if let Some(c) = g.compose(a, b) {
                    comp.push((a, b, c));
                }
            }
        }
        for a in 0..h.n_arrows() as u32 {
            for b in 0..h.n_arrows() as u32 {
                if let Some(c) = h.compose(a, b) {
                    comp.push((a + oa, b + oa, c + oa));
                }
            }
        }
        FiniteGroupoid::from_tables(units, arrows, src, rng, &comp, inv, unit_arrow).unwrap()
    }
}

/// Strictly positive weight per arrow; the weight of `a` is read as the mass
/// of `a` inside the range fiber over `rng(a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaarSystem {
    pub weights: Vec<Rat>,
}

impl HaarSystem {
    pub fn counting(g: &FiniteGroupoid) -> Self {
        HaarSystem {
            weights: vec![Rat::from_integer(1.into()); g.n_arrows()],
        }
    }

    pub fn weight(&self, a: u32) -> &Rat {
        &self.weights[a as usize]
    }
}

/// A groupoid bundled with a validated Haar system; the unit both sides of
/// a correspondence share.
#[derive(Debug, Clone)]
pub struct GroupoidWithHaar {
    pub name: String,
    pub groupoid: FiniteGroupoid,
    pub haar: HaarSystem,
}

impl PartialEq for GroupoidWithHaar {
    /// Structural equality; display names do not matter for composability.
    fn eq(&self, other: &Self) -> bool {
        self.groupoid.same_structure(&other.groupoid) && self.haar == other.haar
    }
}

impl GroupoidWithHaar {
    pub fn new(name: impl Into<String>, groupoid: FiniteGroupoid, haar: HaarSystem) -> Result<Arc<Self>> {
        let gh = GroupoidWithHaar {
            name: name.into(),
            groupoid,
            haar,
        };
        let mut report = validate_groupoid(&gh.groupoid);
        report.merge(validate_haar(&gh.groupoid, &gh.haar));
        let first_failure = report.failures().next().map(|f| f.name.clone());
        match first_failure {
            None => Ok(Arc::new(gh)),
            Some(name) => Err(Error::Invalid(format!(
                "groupoid {:?} failed validation at {name}",
                gh.name
            ))),
        }
    }

    pub fn counting(name: impl Into<String>, groupoid: FiniteGroupoid) -> Arc<Self> {
        let haar = HaarSystem::counting(&groupoid);
        GroupoidWithHaar::new(name, groupoid, haar).unwrap()
    }
}

/// Checks every groupoid axiom over the full tables and reports each with a
/// witness on failure.
pub fn validate_groupoid(g: &FiniteGroupoid) -> Report {
    let mut r = Report::new();
    let n = g.n_arrows() as u32;

    let mut ok = true;
    let mut witness = String::new();
    for u in 0..g.n_units() as u32 {
        let e = g.unit_arrow(u);
        if g.src(e) != u || g.rng(e) != u {
            ok = false;
            witness = format!("unit arrow of {} has wrong endpoints", g.unit_name(u));
            break;
        }
    }
    r.check("groupoid.unit_endpoints", ok, || witness.clone());

    let mut ok = true;
    let mut witness = String::new();
    'units: for a in 0..n {
        let el = g.unit_arrow(g.rng(a));
        let er = g.unit_arrow(g.src(a));
        if g.compose(el, a) != Some(a) || g.compose(a, er) != Some(a) {
            ok = false;
            witness = format!("unit arrows are not identities at {}", g.arrow_name(a));
            break 'units;
        }
    }
    r.check("groupoid.units_are_identities", ok, || witness.clone());

    let mut ok = true;
    let mut witness = String::new();
    'inv: for a in 0..n {
        let ia = g.inv(a);
        if g.inv(ia) != a {
            ok = false;
            witness = format!("inverse is not involutive at {}", g.arrow_name(a));
            break 'inv;
        }
        if g.rng(ia) != g.src(a) || g.src(ia) != g.rng(a) {
            ok = false;
            witness = format!("inverse swaps endpoints incorrectly at {}", g.arrow_name(a));
            break 'inv;
        }
        if g.compose(a, ia) != Some(g.unit_arrow(g.rng(a)))
            || g.compose(ia, a) != Some(g.unit_arrow(g.src(a)))
        {
            ok = false;
            witness = format!("inverse law fails at {}", g.arrow_name(a));
            break 'inv;
        }
    }
    r.check("groupoid.inverse_laws", ok, || witness.clone());

    let mut ok = true;
    let mut witness = String::new();
    'endpoints: for a in 0..n {
        for b in 0..n {
            if let Some(c) = g.compose(a, b) {
                if g.rng(c) != g.rng(a) || g.src(c) != g.src(b) {
                    ok = false;
                    witness = format!(
                        "composite endpoints wrong at ({}, {})",
                        g.arrow_name(a),
                        g.arrow_name(b)
                    );
                    break 'endpoints;
                }
            }
        }
    }
    r.check("groupoid.composite_endpoints", ok, || witness.clone());

    let mut ok = true;
    let mut witness = String::new();
    'assoc: for a in 0..n {
        for b in 0..n {
            let Some(ab) = g.compose(a, b) else { continue };
            for c in 0..n {
                let Some(bc) = g.compose(b, c) else { continue };
                if g.compose(ab, c) != g.compose(a, bc) {
                    ok = false;
                    witness = format!(
                        "associativity fails at ({}, {}, {})",
                        g.arrow_name(a),
                        g.arrow_name(b),
                        g.arrow_name(c)
                    );
                    break 'assoc;
                }
            }
        }
    }
    r.check("groupoid.associativity", ok, || witness.clone());
    r
}

/// Left invariance: translating the range fiber at `rng(γ)` to the one at
/// `src(γ)` by `γ⁻¹` preserves weights. Checked for every pair.
pub fn validate_haar(g: &FiniteGroupoid, h: &HaarSystem) -> Report {
    let mut r = Report::new();
    if h.weights.len() != g.n_arrows() {
        r.fail("haar.totality", "weight table length disagrees with arrows");
        return r;
    }
    let mut ok = true;
    let mut witness = String::new();
    for (a, w) in h.weights.iter().enumerate() {
        if !is_positive(w) {
            ok = false;
            witness = format!("non-positive weight at {}", g.arrow_name(a as u32));
            break;
        }
    }
    r.check("haar.positivity", ok, || witness.clone());

    let mut ok = true;
    let mut witness = String::new();
    'outer: for gamma in 0..g.n_arrows() as u32 {
        let ig = g.inv(gamma);
        for &eta in g.range_fiber(g.rng(gamma)) {
            let translated = g.compose(ig, eta).expect("composable by construction");
            if h.weight(translated) != h.weight(eta) {
                ok = false;
                witness = format!(
                    "translation by {} moves weight of {}: {} vs {}",
                    g.arrow_name(gamma),
                    g.arrow_name(eta),
                    fmt_rat(h.weight(eta)),
                    fmt_rat(h.weight(translated)),
                );
                break 'outer;
            }
        }
    }
    r.check("haar.left_invariance", ok, || witness.clone());
    r
}

/// Builds a `GroupoidWithHaar` from named tables, the form the instance
/// loader produces.
pub fn groupoid_from_names(
    name: &str,
    units: Vec<String>,
    arrow_decls: &BTreeMap<String, (String, String)>,
    compose: &[(String, String, String)],
    inverse: &[(String, String)],
    haar: &BTreeMap<String, Rat>,
) -> Result<Arc<GroupoidWithHaar>> {
    let mut units = units;
    units.sort();
    units.dedup();
    let unit_ix: BTreeMap<&str, u32> = units
        .iter()
        .enumerate()
        .map(|(i, u)| (u.as_str(), i as u32))
        .collect();
    let arrows: Vec<String> = arrow_decls.keys().cloned().collect();
    let arrow_ix: BTreeMap<&str, u32> = arrows
        .iter()
        .enumerate()
        .map(|(i, a)| (a.as_str(), i as u32))
        .collect();
    let look_u = |u: &str| -> Result<u32> {
        unit_ix
            .get(u)
            .copied()
            .ok_or_else(|| Error::Schema(format!("unknown unit {u:?} in groupoid {name:?}")))
    };
    let look_a = |a: &str| -> Result<u32> {
        arrow_ix
            .get(a)
            .copied()
            .ok_or_else(|| Error::Schema(format!("unknown arrow {a:?} in groupoid {name:?}")))
    };
    let mut src = Vec::new();
    let mut rng = Vec::new();
    for a in &arrows {
        let (s, r) = &arrow_decls[a];
        src.push(look_u(s)?);
        rng.push(look_u(r)?);
    }
    let mut comp_entries = Vec::new();
    for (a, b, c) in compose {
        comp_entries.push((look_a(a)?, look_a(b)?, look_a(c)?));
    }
    let mut inv = vec![u32::MAX; arrows.len()];
    for (a, b) in inverse {
        let (ia, ib) = (look_a(a)?, look_a(b)?);
        inv[ia as usize] = ib;
        inv[ib as usize] = ia;
    }
    if let Some(missing) = inv.iter().position(|&x| x == u32::MAX) {
        return Err(Error::Schema(format!(
            "no inverse declared for arrow {:?} in groupoid {name:?}",
            arrows[missing]
        )));
    }
    // Unit arrows are recovered as the arrows composing to themselves on
    // both sides; equivalently the necessarily-unique loop at u acting as a
    // two-sided identity. We take the arrow a with src=rng=u and a∘a = a.
    let mut unit_arrow = vec![u32::MAX; units.len()];
    let tmp_n = arrows.len();
    let mut comp_table = vec![None; tmp_n * tmp_n];
    for &(a, b, c) in &comp_entries {
        comp_table[a as usize * tmp_n + b as usize] = Some(c);
    }
    for a in 0..tmp_n {
        if src[a] == rng[a] && comp_table[a * tmp_n + a] == Some(a as u32) && inv[a] == a as u32 {
            let u = src[a] as usize;
            if unit_arrow[u] == u32::MAX {
                unit_arrow[u] = a as u32;
            }
        }
    }
    if let Some(u) = unit_arrow.iter().position(|&x| x == u32::MAX) {
        return Err(Error::Schema(format!(
            "no unit arrow found at unit {:?} in groupoid {name:?}",
            units[u]
        )));
    }
    let g = FiniteGroupoid::from_tables(units, arrows.clone(), src, rng, &comp_entries, inv, unit_arrow)?;
    let mut weights = Vec::with_capacity(arrows.len());
    for a in &arrows {
        let w = haar
            .get(a)
            .ok_or_else(|| Error::Schema(format!("missing Haar weight for arrow {a:?} in groupoid {name:?}")))?;
        weights.push(w.clone());
    }
    GroupoidWithHaar::new(name, g, HaarSystem { weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;

    #[test]
    fn cyclic_and_pair_groupoids_validate() {
        for g in [
            FiniteGroupoid::cyclic_group(2),
            FiniteGroupoid::cyclic_group(3),
            FiniteGroupoid::pair_groupoid(2),
            FiniteGroupoid::space(3),
            FiniteGroupoid::product(&FiniteGroupoid::cyclic_group(2), &FiniteGroupoid::cyclic_group(3)),
            FiniteGroupoid::disjoint_union(
                &FiniteGroupoid::cyclic_group(2),
                &FiniteGroupoid::space(1),
            ),
        ] {
            let rep = validate_groupoid(&g);
            assert!(rep.passed(), "{}", rep.render_human());
            let rep = validate_haar(&g, &HaarSystem::counting(&g));
            assert!(rep.passed(), "{}", rep.render_human());
        }
    }

    #[test]
    fn broken_involution_is_caught() {
        // Z/2 with inv(g) = e.
        let g = FiniteGroupoid::from_tables(
            vec!["u".into()],
            vec!["g0".into(), "g1".into()],
            vec![0, 0],
            vec![0, 0],
            &[(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)],
            vec![0, 0],
            vec![0],
        )
        .unwrap();
        let rep = validate_groupoid(&g);
        assert!(!rep.passed());
        let failed: Vec<_> = rep.failures().map(|c| c.name.clone()).collect();
        assert!(failed.contains(&"groupoid.inverse_laws".to_string()), "{failed:?}");
    }

    #[test]
    fn unequal_group_fiber_weights_break_invariance() {
        let g = FiniteGroupoid::cyclic_group(2);
        let h = HaarSystem {
            weights: vec![rat_int(1), rat_int(2)],
        };
        let rep = validate_haar(&g, &h);
        assert!(!rep.passed());
    }

    #[test]
    fn per_component_scales_stay_invariant() {
        // Disjoint union of two one-point spaces with different scales: the
        // fibers never interact, so any per-unit scale is fine.
        let g = FiniteGroupoid::disjoint_union(&FiniteGroupoid::space(1), &FiniteGroupoid::space(1));
        let h = HaarSystem {
            weights: vec![rat_int(1), rat_int(3)],
        };
        assert!(validate_haar(&g, &h).passed());
    }

    #[test]
    fn pair_groupoid_column_weights_are_invariant() {
        // On the pair groupoid the weight of a_i_j may depend only on j.
        let g = FiniteGroupoid::pair_groupoid(2);
        let by_src: Vec<Rat> = (0..4)
            .map(|a| if g.src(a) == 0 { rat_int(1) } else { rat_int(2) })
            .collect();
        assert!(validate_haar(&g, &HaarSystem { weights: by_src }).passed());
        let by_rng: Vec<Rat> = (0..4)
            .map(|a| if g.rng(a) == 0 { rat_int(1) } else { rat_int(2) })
            .collect();
        assert!(!validate_haar(&g, &HaarSystem { weights: by_rng }).passed());
    }
}
