//! Bispaces: finite carriers with commuting left and right groupoid actions,
//! and fibre products with their diagonal middle action.

use crate::action::RightAction;
use crate::error::{Error, Result};
use crate::groupoid::FiniteGroupoid;
use crate::report::Report;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bispace {
    pub points: Vec<String>,
    /// Left momentum into the left groupoid's units.
    pub rho: Vec<u32>,
    /// Right momentum into the right groupoid's units.
    pub sigma: Vec<u32>,
    /// `left[a * n_points + p]`, defined exactly when `src(a) == rho(p)`.
    left: Vec<Option<u32>>,
    /// `right[p * n_right_arrows + a]`, defined exactly when `sigma(p) == rng(a)`.
    right: Vec<Option<u32>>,
    n_left_arrows: usize,
    n_right_arrows: usize,
}

impl Bispace {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        points: Vec<String>,
        rho: Vec<u32>,
        sigma: Vec<u32>,
        left: Vec<Option<u32>>,
        right: Vec<Option<u32>>,
        n_left_arrows: usize,
        n_right_arrows: usize,
    ) -> Result<Self> {
        let n = points.len();
        if rho.len() != n
            || sigma.len() != n
            || left.len() != n_left_arrows * n
            || right.len() != n * n_right_arrows
        {
            return Err(Error::Schema("bispace table lengths disagree".into()));
        }
        Ok(Bispace {
            points,
            rho,
            sigma,
            left,
            right,
            n_left_arrows,
            n_right_arrows,
        })
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn rho(&self, p: u32) -> u32 {
        self.rho[p as usize]
    }

    pub fn sigma(&self, p: u32) -> u32 {
        self.sigma[p as usize]
    }

    pub fn left_act(&self, a: u32, p: u32) -> Option<u32> {
        self.left[a as usize * self.n_points() + p as usize]
    }

    pub fn right_act(&self, p: u32, a: u32) -> Option<u32> {
        self.right[p as usize * self.n_right_arrows + a as usize]
    }

    pub fn point_name(&self, p: u32) -> &str {
        &self.points[p as usize]
    }

    /// The right half of the bispace as a standalone action.
    pub fn right_action(&self) -> RightAction {
        RightAction {
            momentum: self.sigma.clone(),
            table: self.right.clone(),
            n_arrows: self.n_right_arrows,
        }
    }

    /// The left half converted to a right action through inverses:
    /// `x ∗ γ := γ⁻¹·x`, with momentum `rho`.
    pub fn left_as_right_action(&self, g: &FiniteGroupoid) -> RightAction {
        let n = self.n_points();
        let mut table = vec![None; n * g.n_arrows()];
        for p in 0..n as u32 {
            for a in 0..g.n_arrows() as u32 {
                if g.rng(a) == self.rho(p) {
                    table[p as usize * g.n_arrows() + a as usize] = self.left_act(g.inv(a), p);
                }
            }
        }
        RightAction {
            momentum: self.rho.clone(),
            table,
            n_arrows: g.n_arrows(),
        }
    }

    /// All bispace axioms: action domains, unit laws, associativity with
    /// groupoid composition, momentum equivariance, and commutation of the
    /// two actions.
    pub fn validate(&self, g: &FiniteGroupoid, h: &FiniteGroupoid) -> Report {
        let mut r = Report::new();
        let n = self.n_points() as u32;

        let mut ok = self.n_left_arrows == g.n_arrows() && self.n_right_arrows == h.n_arrows();
        let mut witness = if ok {
            String::new()
        } else {
            "action tables sized for different groupoids".to_string()
        };
        if ok {
            'dom: for p in 0..n {
                if self.rho(p) as usize >= g.n_units() || self.sigma(p) as usize >= h.n_units() {
                    ok = false;
                    witness = format!("momentum out of range at {}", self.point_name(p));
                    break 'dom;
                }
                for a in 0..g.n_arrows() as u32 {
                    let defined = self.left_act(a, p).is_some();
                    if defined != (g.src(a) == self.rho(p)) {
                        ok = false;
                        witness = format!(
                            "left action domain wrong at ({}, {})",
                            g.arrow_name(a),
                            self.point_name(p)
                        );
                        break 'dom;
                    }
                }
                for a in 0..h.n_arrows() as u32 {
                    let defined = self.right_act(p, a).is_some();
                    if defined != (self.sigma(p) == h.rng(a)) {
                        ok = false;
                        witness = format!(
                            "right action domain wrong at ({}, {})",
                            self.point_name(p),
                            h.arrow_name(a)
                        );
                        break 'dom;
                    }
                }
            }
        }
        r.check("bispace.domains", ok, || witness.clone());
        if !r.passed() {
            return r;
        }

        let mut ok = true;
        let mut witness = String::new();
        for p in 0..n {
            if self.left_act(g.unit_arrow(self.rho(p)), p) != Some(p)
                || self.right_act(p, h.unit_arrow(self.sigma(p))) != Some(p)
            {
                ok = false;
                witness = format!("unit arrow moves {}", self.point_name(p));
                break;
            }
        }
        r.check("bispace.units_act_trivially", ok, || witness.clone());

        let mut ok = true;
        let mut witness = String::new();
        'equi: for p in 0..n {
            for a in 0..g.n_arrows() as u32 {
                if let Some(ap) = self.left_act(a, p) {
                    if self.rho(ap) != g.rng(a) || self.sigma(ap) != self.sigma(p) {
                        ok = false;
                        witness = format!(
                            "left momentum equivariance fails at ({}, {})",
                            g.arrow_name(a),
                            self.point_name(p)
                        );
                        break 'equi;
                    }
                }
            }
            for a in 0..h.n_arrows() as u32 {
                if let Some(pa) = self.right_act(p, a) {
                    if self.sigma(pa) != h.src(a) || self.rho(pa) != self.rho(p) {
                        ok = false;
                        witness = format!(
                            "right momentum equivariance fails at ({}, {})",
                            self.point_name(p),
                            h.arrow_name(a)
                        );
                        break 'equi;
                    }
                }
            }
        }
        r.check("bispace.momentum_equivariance", ok, || witness.clone());
        if !r.passed() {
            return r;
        }

        let mut ok = true;
        let mut witness = String::new();
        'assoc: for p in 0..n {
            for b in 0..g.n_arrows() as u32 {
                let Some(bp) = self.left_act(b, p) else { continue };
                for a in 0..g.n_arrows() as u32 {
                    let Some(ab) = g.compose(a, b) else { continue };
                    if self.left_act(a, bp) != self.left_act(ab, p) {
                        ok = false;
                        witness = format!(
                            "left associativity fails at ({}, {}, {})",
                            g.arrow_name(a),
                            g.arrow_name(b),
                            self.point_name(p)
                        );
                        break 'assoc;
                    }
                }
            }
            for a in 0..h.n_arrows() as u32 {
                let Some(pa) = self.right_act(p, a) else { continue };
                for b in 0..h.n_arrows() as u32 {
                    let Some(ab) = h.compose(a, b) else { continue };
                    if self.right_act(pa, b) != self.right_act(p, ab) {
                        ok = false;
                        witness = format!(
                            "right associativity fails at ({}, {}, {})",
                            self.point_name(p),
                            h.arrow_name(a),
                            h.arrow_name(b)
                        );
                        break 'assoc;
                    }
                }
            }
        }
        r.check("bispace.action_associativity", ok, || witness.clone());

        let mut ok = true;
        let mut witness = String::new();
        'commute: for p in 0..n {
            for a in 0..g.n_arrows() as u32 {
                let Some(ap) = self.left_act(a, p) else { continue };
                for b in 0..h.n_arrows() as u32 {
                    let Some(pb) = self.right_act(p, b) else { continue };
                    if self.right_act(ap, b) != self.left_act(a, pb) {
                        ok = false;
                        witness = format!(
                            "actions do not commute at ({}, {}, {})",
                            g.arrow_name(a),
                            self.point_name(p),
                            h.arrow_name(b)
                        );
                        break 'commute;
                    }
                }
            }
        }
        r.check("bispace.actions_commute", ok, || witness.clone());
        r
    }
}

/// The fibre product of `x` (..→ H) and `y` (H → ..): pairs with matching
/// middle momenta, the outer bispace structure, and the diagonal middle
/// action `(x, y)·γ = (x·γ, γ⁻¹·y)`.
#[derive(Debug, Clone)]
pub struct FibreProduct {
    /// Sorted `(x index, y index)` pairs with `sigma_x(x) == rho_y(y)`.
    pub pairs: Vec<(u32, u32)>,
    /// Outer bispace over (left of x) → (right of y).
    pub outer: Bispace,
    /// Diagonal right action of the middle groupoid on the pairs.
    pub diag: RightAction,
}

impl FibreProduct {
    pub fn pair_index(&self, x: u32, y: u32) -> Option<u32> {
        self.pairs.binary_search(&(x, y)).ok().map(|i| i as u32)
    }
}

/// Builds the fibre product carrier `{(x, y) : sigma(x) = rho(y)}`. The
/// caller guarantees that `x`'s right groupoid and `y`'s left groupoid are
/// the same `middle`.
pub fn fibre_product(
    x: &Bispace,
    y: &Bispace,
    left: &FiniteGroupoid,
    middle: &FiniteGroupoid,
    right: &FiniteGroupoid,
) -> Result<FibreProduct> {
    let mut pairs = Vec::new();
    for xi in 0..x.n_points() as u32 {
        for yi in 0..y.n_points() as u32 {
            if x.sigma(xi) == y.rho(yi) {
                pairs.push((xi, yi));
            }
        }
    }
    let n = pairs.len();
    let points: Vec<String> = pairs
        .iter()
        .map(|&(xi, yi)| format!("{}|{}", x.point_name(xi), y.point_name(yi)))
        .collect();
    let rho: Vec<u32> = pairs.iter().map(|&(xi, _)| x.rho(xi)).collect();
    let sigma: Vec<u32> = pairs.iter().map(|&(_, yi)| y.sigma(yi)).collect();
    let find = |xi: u32, yi: u32| -> u32 {
        pairs
            .binary_search(&(xi, yi))
            .map(|i| i as u32)
            .expect("pair stays inside fibre product")
    };

    let mut left_table = vec![None; left.n_arrows() * n];
    for a in 0..left.n_arrows() as u32 {
        for (pi, &(xi, yi)) in pairs.iter().enumerate() {
            if left.src(a) == x.rho(xi) {
                let ax = x.left_act(a, xi).expect("composable by domain check");
                left_table[a as usize * n + pi] = Some(find(ax, yi));
            }
        }
    }
    let mut right_table = vec![None; n * right.n_arrows()];
    for (pi, &(xi, yi)) in pairs.iter().enumerate() {
        for a in 0..right.n_arrows() as u32 {
            if y.sigma(yi) == right.rng(a) {
                let ya = y.right_act(yi, a).expect("composable by domain check");
                right_table[pi * right.n_arrows() + a as usize] = Some(find(xi, ya));
            }
        }
    }
    let outer = Bispace::new(
        points,
        rho,
        sigma,
        left_table,
        right_table,
        left.n_arrows(),
        right.n_arrows(),
    )?;

    let mut diag_table = vec![None; n * middle.n_arrows()];
    let momentum: Vec<u32> = pairs.iter().map(|&(xi, _)| x.sigma(xi)).collect();
    for (pi, &(xi, yi)) in pairs.iter().enumerate() {
        for a in 0..middle.n_arrows() as u32 {
            if x.sigma(xi) == middle.rng(a) {
                let xa = x.right_act(xi, a).expect("composable");
                let ia = middle.inv(a);
                let ay = y.left_act(ia, yi).ok_or_else(|| {
                    Error::InvalidAction("middle action not composable on fibre product".into())
                })?;
                diag_table[pi * middle.n_arrows() + a as usize] = Some(find(xa, ay));
            }
        }
    }
    let diag = RightAction {
        momentum,
        table: diag_table,
        n_arrows: middle.n_arrows(),
    };
    Ok(FibreProduct { pairs, outer, diag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::FiniteGroupoid;

    /// X = {p, q} over one unit on both sides of trivial groupoids.
    fn simple_bispace(names: &[&str]) -> Bispace {
        let n = names.len();
        Bispace::new(
            names.iter().map(|s| s.to_string()).collect(),
            vec![0; n],
            vec![0; n],
            (0..n as u32).map(Some).collect(),
            (0..n as u32).map(Some).collect(),
            1,
            1,
        )
        .unwrap()
    }

    #[test]
    fn all_pairs_over_one_unit() {
        let t = FiniteGroupoid::space(1);
        let x = simple_bispace(&["p", "q"]);
        let y = simple_bispace(&["s"]);
        assert!(x.validate(&t, &t).passed());
        let fp = fibre_product(&x, &y, &t, &t, &t).unwrap();
        assert_eq!(fp.pairs, vec![(0, 0), (1, 0)]);
        assert_eq!(fp.outer.points, vec!["p|s", "q|s"]);
    }

    #[test]
    fn disjoint_momenta_give_empty_carrier() {
        let t2 = FiniteGroupoid::space(2);
        let t1 = FiniteGroupoid::space(1);
        // x over unit 0, y's rho over unit 1: never composable.
        let x = Bispace::new(
            vec!["p".into()],
            vec![0],
            vec![0],
            vec![Some(0)],
            vec![Some(0), None],
            1,
            2,
        )
        .unwrap();
        let y = Bispace::new(
            vec!["q".into()],
            vec![1],
            vec![0],
            vec![None, Some(0)],
            vec![Some(0)],
            2,
            1,
        )
        .unwrap();
        let fp = fibre_product(&x, &y, &t1, &t2, &t1).unwrap();
        assert!(fp.pairs.is_empty());
    }
}
