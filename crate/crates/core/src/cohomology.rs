//! Positive 0-cochains and 1-cocycles on finite transformation groupoids,
//! and the coboundary solver that composition of correspondences needs.

use crate::action::{OrbitPartition, TransformationGroupoid};
use crate::error::{Error, Result};
use crate::measures::invariant_function_descends;
use crate::rat::{fmt_rat, is_positive, one, Rat};
use crate::report::Report;

/// Strictly positive value on each carrier point of a transformation
/// groupoid.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCochain(pub Vec<Rat>);

/// Strictly positive value on each arrow of a transformation groupoid
/// (indexed as in [`TransformationGroupoid::arrows`]).
#[derive(Debug, Clone, PartialEq)]
pub struct OneCocycle(pub Vec<Rat>);

impl ZeroCochain {
    pub fn constant_one(t: &TransformationGroupoid) -> Self {
        ZeroCochain(vec![one(); t.n_points()])
    }
}

/// The coboundary: arrow `(z, γ) ↦ b(z·γ)/b(z)`. Always multiplicative.
pub fn d0(b: &ZeroCochain, t: &TransformationGroupoid) -> OneCocycle {
    let vals = (0..t.n_arrows())
        .map(|i| &b.0[t.src_of(i) as usize] / &b.0[t.rng_of(i) as usize])
        .collect();
    OneCocycle(vals)
}

/// Certifies the 1-cocycle laws: strict positivity, value 1 on unit arrows,
/// and multiplicativity `D(z, γη) = D(z, γ)·D(z·γ, η)` over all composable
/// pairs.
pub fn verify_cocycle(d: &OneCocycle, t: &TransformationGroupoid) -> Report {
    let mut r = Report::new();
    if d.0.len() != t.n_arrows() {
        r.fail("cocycle.totality", "value table does not cover the arrows");
        return r;
    }
    let mut ok = true;
    let mut witness = String::new();
    for (i, v) in d.0.iter().enumerate() {
        if !is_positive(v) {
            ok = false;
            witness = format!("non-positive value at {}", t.arrow_label(i));
            break;
        }
    }
    r.check("cocycle.positivity", ok, || witness.clone());

    let mut ok = true;
    let mut witness = String::new();
    for i in 0..t.n_arrows() {
        if t.is_unit(i) && d.0[i] != one() {
            ok = false;
            witness = format!("value {} on unit arrow {}", fmt_rat(&d.0[i]), t.arrow_label(i));
            break;
        }
    }
    r.check("cocycle.units", ok, || witness.clone());

    let mut ok = true;
    let mut witness = String::new();
    'outer: for i in 0..t.n_arrows() {
        for j in 0..t.n_arrows() {
            if let Some(k) = t.compose_arrows(i, j) {
                if d.0[k] != &d.0[i] * &d.0[j] {
                    ok = false;
                    witness = format!(
                        "multiplicativity fails at {} ∘ {}",
                        t.arrow_label(i),
                        t.arrow_label(j)
                    );
                    break 'outer;
                }
            }
        }
    }
    r.check("cocycle.multiplicativity", ok, || witness.clone());
    r
}

/// Solves `d0(b) = D` by spanning-tree propagation: per orbit, the least
/// representative gets `b = 1` and values propagate along arrows, after
/// which `d0(b) = D` is certified on every arrow. The certification is
/// exactly path independence; it can only fail when `D` takes a value ≠ 1
/// on an isotropy arrow.
pub fn solve_coboundary(d: &OneCocycle, t: &TransformationGroupoid) -> Result<ZeroCochain> {
    let rep = verify_cocycle(d, t);
    if let Some(f) = rep.failures().next() {
        let witness = match &f.status {
            crate::report::CheckStatus::Fail { witness } => witness.clone(),
            _ => String::new(),
        };
        return Err(Error::NotACoboundary(format!("{} ({witness})", f.name)));
    }
    let n = t.n_points();
    let mut b: Vec<Option<Rat>> = vec![None; n];
    let orbits = t.orbits();
    for &rep in &orbits.reps {
        b[rep as usize] = Some(one());
        // breadth-first propagation along arrows out of settled points
        let mut queue = std::collections::VecDeque::from([rep]);
        while let Some(z) = queue.pop_front() {
            let bz = b[z as usize].clone().expect("settled");
            for i in 0..t.n_arrows() {
                if t.rng_of(i) == z {
                    let w = t.src_of(i);
                    if b[w as usize].is_none() {
                        b[w as usize] = Some(&bz * &d.0[i]);
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    let b = ZeroCochain(
        b.into_iter()
            .map(|v| v.expect("orbit reachability settles every point"))
            .collect(),
    );
    // certification = path independence and isotropy triviality
    let back = d0(&b, t);
    for i in 0..t.n_arrows() {
        if back.0[i] != d.0[i] {
            return Err(Error::NotACoboundary(t.arrow_label(i)));
        }
    }
    Ok(b)
}

/// For two cochains with the same coboundary, the ratio `b'/b` is constant
/// on orbits and descends to a class function on the quotient.
pub fn cochain_quotient(
    b: &ZeroCochain,
    b2: &ZeroCochain,
    t: &TransformationGroupoid,
    orbits: &OrbitPartition,
) -> Result<Vec<Rat>> {
    if d0(b, t) != d0(b2, t) {
        return Err(Error::Invalid("cochains have different coboundaries".into()));
    }
    let ratio: Vec<Rat> = b2.0.iter().zip(b.0.iter()).map(|(x, y)| x / y).collect();
    invariant_function_descends(&ratio, t, orbits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::RightAction;
    use crate::groupoid::{FiniteGroupoid, GroupoidWithHaar};
    use crate::rat::{rat, rat_int};

    fn swap_t() -> TransformationGroupoid {
        let gh = GroupoidWithHaar::counting("Z2", FiniteGroupoid::cyclic_group(2));
        let action = RightAction {
            momentum: vec![0, 0],
            table: vec![Some(0), Some(1), Some(1), Some(0)],
            n_arrows: 2,
        };
        TransformationGroupoid::new(gh, action).unwrap()
    }

    #[test]
    fn coboundary_of_constant_is_one() {
        let t = swap_t();
        let b = ZeroCochain::constant_one(&t);
        let d = d0(&b, &t);
        assert!(d.0.iter().all(|v| *v == one()));
        assert!(verify_cocycle(&d, &t).passed());
        assert_eq!(solve_coboundary(&d, &t).unwrap().0, vec![one(), one()]);
    }

    #[test]
    fn coboundary_of_free_swap_cochain() {
        let t = swap_t();
        let b = ZeroCochain(vec![rat_int(1), rat_int(2)]);
        let d = d0(&b, &t);
        // arrows sorted: (0,g0),(0,g1),(1,g0),(1,g1)
        assert_eq!(d.0, vec![one(), rat_int(2), one(), rat(1, 2)]);
        assert!(verify_cocycle(&d, &t).passed());
    }

    #[test]
    fn solver_recovers_cochain_up_to_orbit_constant() {
        // two orbits: a 6-arrow transformation groupoid of Z/2 on 4 points
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
        let b0 = ZeroCochain(vec![rat_int(3), rat_int(5), rat(1, 2), rat_int(7)]);
        let d = d0(&b0, &t);
        assert!(verify_cocycle(&d, &t).passed());
        let b = solve_coboundary(&d, &t).unwrap();
        assert_eq!(d0(&b, &t), d);
        // ratio b/b0 is orbit-constant
        let orbits = t.orbits();
        let ratio: Vec<Rat> = b.0.iter().zip(b0.0.iter()).map(|(x, y)| x / y).collect();
        for class in 0..orbits.n_classes() as u32 {
            let members = orbits.members(class);
            for &m in &members {
                assert_eq!(ratio[m as usize], ratio[members[0] as usize]);
            }
        }
        // and the quotient class function recovers the per-orbit factor
        let c = cochain_quotient(&b, &b0, &t, &orbits).unwrap();
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn unit_value_not_one_fails() {
        let t = swap_t();
        let mut d = d0(&ZeroCochain::constant_one(&t), &t);
        d.0[0] = rat_int(2); // unit arrow (0, g0)
        assert!(!verify_cocycle(&d, &t).passed());
    }

    #[test]
    fn nontrivial_isotropy_value_obstructs_solving() {
        // Z/2 fixing a single point: D(z, g) = 2 cannot be a coboundary
        // because the isotropy value of a finite stabilizer must be 1.
        let gh = GroupoidWithHaar::counting("Z2", FiniteGroupoid::cyclic_group(2));
        let action = RightAction {
            momentum: vec![0],
            table: vec![Some(0), Some(0)],
            n_arrows: 2,
        };
        let t = TransformationGroupoid::new(gh, action).unwrap();
        let d = OneCocycle(vec![one(), rat_int(2)]);
        assert!(!verify_cocycle(&d, &t).passed());
        match solve_coboundary(&d, &t) {
            Err(Error::NotACoboundary(w)) => assert!(w.contains("multiplicativity") || w.contains("unit"), "{w}"),
            other => panic!("expected NotACoboundary, got {other:?}"),
        }
    }

    #[test]
    fn adjoining_style_cocycle_is_solvable() {
        // D((x,y),γ) values coming from a modular function with weights
        // (1,2): fixed-point-free orbit, value 1/2 one way and 2 back.
        let gh = GroupoidWithHaar::counting("Z2", FiniteGroupoid::cyclic_group(2));
        let action = RightAction {
            momentum: vec![0, 0],
            table: vec![Some(0), Some(1), Some(1), Some(0)],
            n_arrows: 2,
        };
        let t = TransformationGroupoid::new(gh, action).unwrap();
        let d = OneCocycle(vec![one(), rat(1, 2), one(), rat_int(2)]);
        assert!(verify_cocycle(&d, &t).passed());
        let b = solve_coboundary(&d, &t).unwrap();
        assert_eq!(d0(&b, &t), d);
        assert_eq!(b.0, vec![one(), rat(1, 2)]);
    }
}
