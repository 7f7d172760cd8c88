//! Isomorphisms of correspondences: equivariant bijections of bispaces with
//! an exact Radon–Nikodym witness, their vertical and horizontal composites,
//! and an exhaustive search procedure.

use crate::error::{Error, Result};
use crate::measures::invariant_function_descends;
use crate::rat::{fmt_rat, one, Rat};
use crate::report::Report;

use super::compose::Composite;
use super::Correspondence;

/// A 2-arrow between parallel correspondences. The stored witness is the
/// derivative of the pushed-forward source family against the target family,
/// `rn(q) = d t_*(λ) / d λ' (q) = λ(t⁻¹q) / λ'(q)`;
/// its reciprocal is the derivative in the other orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrIso {
    pub map: Vec<u32>,
    pub rn: Vec<Rat>,
}

impl CorrIso {
    pub fn identity(x: &Correspondence) -> CorrIso {
        CorrIso {
            map: (0..x.n_points() as u32).collect(),
            rn: vec![one(); x.n_points()],
        }
    }

    pub fn inverse_map(&self) -> Vec<u32> {
        let mut inv = vec![0u32; self.map.len()];
        for (p, &q) in self.map.iter().enumerate() {
            inv[q as usize] = p as u32;
        }
        inv
    }

    /// Builds the iso after full validation.
    pub fn new(x: &Correspondence, y: &Correspondence, map: Vec<u32>) -> Result<CorrIso> {
        let (report, iso) = validate_iso(x, y, &map);
        match iso {
            Some(iso) => Ok(iso),
            None => {
                let f = report.failures().next().expect("invalid iso has a failing check");
                Err(Error::Invalid(format!("not an isomorphism: {}", f.name)))
            }
        }
    }
}

/// Validates a candidate map as an isomorphism of correspondences and, on
/// success, returns it with its Radon–Nikodym witness. The witness's
/// right-invariance and its interplay with the two modular functions are
/// certified as well; both orientations of the derivative are reported.
pub fn validate_iso(x: &Correspondence, y: &Correspondence, map: &[u32]) -> (Report, Option<CorrIso>) {
    let mut r = Report::new();
    if !x.parallel_to(y) {
        r.fail("iso.parallel", "correspondences are not parallel");
        return (r, None);
    }
    r.pass("iso.parallel");

    let n = x.n_points();
    let mut ok = map.len() == n && y.n_points() == n;
    if ok {
        let mut seen = vec![false; n];
        for &q in map {
            if q as usize >= n || seen[q as usize] {
                ok = false;
                break;
            }
            seen[q as usize] = true;
        }
    }
    r.check("iso.bijection", ok, || "map is not a bijection of the carriers".into());
    if !ok {
        return (r, None);
    }

    let mut ok = true;
    let mut witness = String::new();
    for p in 0..n as u32 {
        let q = map[p as usize];
        if x.bispace.rho(p) != y.bispace.rho(q) || x.bispace.sigma(p) != y.bispace.sigma(q) {
            ok = false;
            witness = format!("momenta disagree at {}", x.bispace.point_name(p));
            break;
        }
    }
    r.check("iso.momenta", ok, || witness.clone());
    if !ok {
        return (r, None);
    }

    let g = &x.left.groupoid;
    let h = &x.right.groupoid;
    let mut ok = true;
    let mut witness = String::new();
    'left: for a in 0..g.n_arrows() as u32 {
        for p in 0..n as u32 {
            if let Some(ap) = x.bispace.left_act(a, p) {
                if y.bispace.left_act(a, map[p as usize]) != Some(map[ap as usize]) {
                    ok = false;
                    witness = format!(
                        "left equivariance fails at ({}, {})",
                        g.arrow_name(a),
                        x.bispace.point_name(p)
                    );
                    break 'left;
                }
            }
        }
    }
    r.check("iso.left_equivariance", ok, || witness.clone());
    let left_ok = ok;

    let mut ok = true;
    let mut witness = String::new();
    'right: for p in 0..n as u32 {
        for a in 0..h.n_arrows() as u32 {
            if let Some(pa) = x.bispace.right_act(p, a) {
                if y.bispace.right_act(map[p as usize], a) != Some(map[pa as usize]) {
                    ok = false;
                    witness = format!(
                        "right equivariance fails at ({}, {})",
                        x.bispace.point_name(p),
                        h.arrow_name(a)
                    );
                    break 'right;
                }
            }
        }
    }
    r.check("iso.right_equivariance", ok, || witness.clone());
    if !left_ok || !ok {
        return (r, None);
    }

    // Full support makes the pushforward equivalent to the target family;
    // the derivative is the pointwise ratio.
    let inv_map = {
        let mut inv = vec![0u32; n];
        for (p, &q) in map.iter().enumerate() {
            inv[q as usize] = p as u32;
        }
        inv
    };
    let rn: Vec<Rat> = (0..n as u32)
        .map(|q| x.lambda.weight(inv_map[q as usize]) / y.lambda.weight(q))
        .collect();
    r.pass("iso.pushforward_equivalent");

    let mut ok = true;
    let mut witness = String::new();
    'rninv: for q in 0..n as u32 {
        for a in 0..h.n_arrows() as u32 {
            if let Some(qa) = y.bispace.right_act(q, a) {
                if rn[q as usize] != rn[qa as usize] {
                    ok = false;
                    witness = format!(
                        "witness moves along {}·{}: {} vs {}",
                        y.bispace.point_name(q),
                        h.arrow_name(a),
                        fmt_rat(&rn[q as usize]),
                        fmt_rat(&rn[qa as usize])
                    );
                    break 'rninv;
                }
            }
        }
    }
    r.check("iso.rn_right_invariant", ok, || witness.clone());

    // Δ_x(γ, z)·rn(t(γz)) = rn(t(z))·Δ_y(γ, t(z)) on every composable pair.
    let mut ok = true;
    let mut witness = String::new();
    for (a, p) in x.delta.composable_pairs() {
        let ap = x.bispace.left_act(a, p).expect("composable");
        let lhs = x.delta.expect(a, p) * &rn[map[ap as usize] as usize];
        let rhs = &rn[map[p as usize] as usize] * y.delta.expect(a, map[p as usize]);
        if lhs != rhs {
            ok = false;
            witness = format!(
                "modular functions disagree through the witness at ({}, {})",
                g.arrow_name(a),
                x.bispace.point_name(p)
            );
            break;
        }
    }
    r.check("iso.modular_relation", ok, || witness.clone());

    if r.passed() {
        (r, Some(CorrIso { map: map.to_vec(), rn }))
    } else {
        (r, None)
    }
}

/// Vertical composition: function composition of the maps, derivative by
/// the chain rule. The chain-rule value is certified against the direct
/// pointwise ratio.
pub fn compose_iso_vertical(
    s: &CorrIso,
    t: &CorrIso,
    x: &Correspondence,
    y: &Correspondence,
    z: &Correspondence,
) -> Result<CorrIso> {
    let n = s.map.len();
    if t.map.len() != n {
        return Err(Error::Invalid("vertical composition of isos over different carriers".into()));
    }
    let map: Vec<u32> = (0..n).map(|p| t.map[s.map[p] as usize]).collect();
    let t_inv = t.inverse_map();
    let rn: Vec<Rat> = (0..n)
        .map(|w| &s.rn[t_inv[w] as usize] * &t.rn[w])
        .collect();
    let composed = CorrIso::new(x, z, map)?;
    let _ = y;
    if composed.rn != rn {
        return Err(Error::Invalid("chain rule disagrees with the pointwise derivative".into()));
    }
    Ok(composed)
}

/// Horizontal composition of 2-arrows across a composition of 1-arrows:
/// `[φ×ψ]([x,y]) = [φ(x), ψ(y)]`. The descended derivative is certified
/// against the product formula
/// `rn_φ·rn_ψ·b₁∘(φ×ψ)⁻¹ / b₂` descended to the quotient.
pub fn compose_iso_horizontal(
    phi: &CorrIso,
    psi: &CorrIso,
    from: &Composite,
    to: &Composite,
) -> Result<CorrIso> {
    let n_from = from.trace.orbits.n_classes();
    let mut map = vec![u32::MAX; n_from];
    for c in 0..n_from as u32 {
        let mut image = None;
        for z in from.trace.orbits.members(c) {
            let (xi, yi) = from.trace.fp.pairs[z as usize];
            let pair = to
                .trace
                .fp
                .pair_index(phi.map[xi as usize], psi.map[yi as usize])
                .ok_or_else(|| Error::Invalid("horizontal image leaves the fibre product".into()))?;
            let cls = to.trace.orbits.class_of[pair as usize];
            match image {
                None => image = Some(cls),
                Some(prev) if prev != cls => {
                    return Err(Error::Invalid("horizontal composite is not well-defined".into()))
                }
                _ => {}
            }
        }
        map[c as usize] = image.expect("orbit classes are nonempty");
    }
    let iso = CorrIso::new(&from.corr, &to.corr, map)?;

    // dual route for the witness: the product-level derivative descends
    let phi_inv = phi.inverse_map();
    let psi_inv = psi.inverse_map();
    let mut product_rn = Vec::with_capacity(to.trace.fp.pairs.len());
    for &(xi2, yi2) in &to.trace.fp.pairs {
        let pre = from
            .trace
            .fp
            .pair_index(phi_inv[xi2 as usize], psi_inv[yi2 as usize])
            .ok_or_else(|| Error::Invalid("horizontal preimage leaves the fibre product".into()))?;
        let to_pair = to
            .trace
            .fp
            .pair_index(xi2, yi2)
            .expect("pair enumerates itself");
        let val = &phi.rn[xi2 as usize]
            * &psi.rn[yi2 as usize]
            * &from.trace.cochain.0[pre as usize]
            / &to.trace.cochain.0[to_pair as usize];
        product_rn.push(val);
    }
    let descended = invariant_function_descends(&product_rn, &to.trace.tg, &to.trace.orbits)?;
    if descended != iso.rn {
        return Err(Error::Invalid(
            "descended product derivative disagrees with the pointwise witness".into(),
        ));
    }
    Ok(iso)
}

/// Exhaustive, deterministic search for an isomorphism between parallel
/// correspondences. Candidates are explored in index order with forced
/// propagation along both actions, so when the identity assignment is valid
/// it is the one found.
pub fn find_iso(x: &Correspondence, y: &Correspondence) -> Option<CorrIso> {
    if !x.parallel_to(y) || x.n_points() != y.n_points() {
        return None;
    }
    let n = x.n_points();
    // cheap obstruction: orbit counts under the two-sided action must agree
    if two_sided_orbit_count(x) != two_sided_orbit_count(y) {
        return None;
    }
    let mut assign: Vec<Option<u32>> = vec![None; n];
    let mut used = vec![false; n];
    if search(x, y, &mut assign, &mut used) {
        let map: Vec<u32> = assign.into_iter().map(|v| v.expect("search completed")).collect();
        if let (_, Some(iso)) = validate_iso(x, y, &map) {
            return Some(iso);
        }
    }
    None
}

fn two_sided_orbit_count(x: &Correspondence) -> usize {
    let right = x.bispace.right_action();
    let left = x.bispace.left_as_right_action(&x.left.groupoid);
    let n = x.n_points();
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut [u32], v: u32) -> u32 {
        let mut root = v;
        while parent[root as usize] != root {
            root = parent[root as usize];
        }
        root
    }
    for action in [&right, &left] {
        for z in 0..n as u32 {
            for a in 0..action.n_arrows as u32 {
                if let Some(za) = action.act(z, a) {
                    let (x0, y0) = (find(&mut parent, z), find(&mut parent, za));
                    if x0 != y0 {
                        parent[x0.max(y0) as usize] = x0.min(y0);
                    }
                }
            }
        }
    }
    (0..n as u32).filter(|&p| find(&mut parent, p) == p).count()
}

fn search(x: &Correspondence, y: &Correspondence, assign: &mut Vec<Option<u32>>, used: &mut Vec<bool>) -> bool {
    let Some(p) = assign.iter().position(|v| v.is_none()) else {
        return true;
    };
    for q in 0..y.n_points() as u32 {
        if used[q as usize] {
            continue;
        }
        if x.bispace.rho(p as u32) != y.bispace.rho(q) || x.bispace.sigma(p as u32) != y.bispace.sigma(q) {
            continue;
        }
        let mut trail = Vec::new();
        if propagate(x, y, p as u32, q, assign, used, &mut trail)
            && search(x, y, assign, used)
        {
            return true;
        }
        for z in trail {
            let img = assign[z as usize].take().expect("trail entry was set");
            used[img as usize] = false;
        }
    }
    false
}

/// Forces `t(p) = q` and closes the assignment under both actions,
/// recording every new binding in `trail`. Fails on any conflict.
fn propagate(
    x: &Correspondence,
    y: &Correspondence,
    p: u32,
    q: u32,
    assign: &mut [Option<u32>],
    used: &mut [bool],
    trail: &mut Vec<u32>,
) -> bool {
    let mut queue = vec![(p, q)];
    while let Some((p, q)) = queue.pop() {
        match assign[p as usize] {
            Some(existing) => {
                if existing != q {
                    return false;
                }
                continue;
            }
            None => {
                if used[q as usize]
                    || x.bispace.rho(p) != y.bispace.rho(q)
                    || x.bispace.sigma(p) != y.bispace.sigma(q)
                {
                    return false;
                }
                assign[p as usize] = Some(q);
                used[q as usize] = true;
                trail.push(p);
            }
        }
        let g = &x.left.groupoid;
        for a in 0..g.n_arrows() as u32 {
            if let Some(ap) = x.bispace.left_act(a, p) {
                let Some(aq) = y.bispace.left_act(a, q) else {
                    return false;
                };
                queue.push((ap, aq));
            }
        }
        let h = &x.right.groupoid;
        for a in 0..h.n_arrows() as u32 {
            if let Some(pa) = x.bispace.right_act(p, a) {
                let Some(qa) = y.bispace.right_act(q, a) else {
                    return false;
                };
                queue.push((pa, qa));
            }
        }
    }
    true
}
