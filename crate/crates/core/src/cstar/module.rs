//! The Hilbert bimodule of a correspondence: functions on the bispace with
//! a convolution-algebra-valued inner product, a right module action, and a
//! left action twisted by the square root of the modular function.

use nalgebra::DMatrix;

use crate::correspondence::Correspondence;
use crate::error::{Error, Result};
use crate::rat::{to_f64, Rat};
use crate::report::Report;

use super::algebra::ConvolutionAlgebra;
use super::linalg::{c, max_abs_diff, C};

#[derive(Debug, Clone)]
pub struct HilbertBimodule {
    pub corr: Correspondence,
    pub left_alg: ConvolutionAlgebra,
    pub right_alg: ConvolutionAlgebra,
    lambda_f: Vec<f64>,
    /// `Δ^{1/2}` on composable pairs, dense `(arrow, point)` table.
    delta_sqrt: Vec<Option<f64>>,
}

/// Builds the bimodule of a validated correspondence and certifies the
/// module axioms on Dirac spanning sets.
pub fn build_module(corr: &Correspondence, tol: f64) -> Result<HilbertBimodule> {
    let m = HilbertBimodule::new(corr.clone());
    let rep = m.axioms_report(tol);
    if let Some(f) = rep.failures().next() {
        return Err(Error::Invalid(format!("module axioms failed at {}", f.name)));
    }
    Ok(m)
}

impl HilbertBimodule {
    pub fn new(corr: Correspondence) -> Self {
        let left_alg = ConvolutionAlgebra::new(corr.left.clone());
        let right_alg = ConvolutionAlgebra::new(corr.right.clone());
        let lambda_f = corr.lambda.w.iter().map(to_f64).collect();
        let n = corr.n_points();
        let mut delta_sqrt = vec![None; corr.left.groupoid.n_arrows() * n];
        for (a, p) in corr.delta.composable_pairs() {
            delta_sqrt[a as usize * n + p as usize] =
                Some(to_f64(corr.delta.expect(a, p)).sqrt());
        }
        HilbertBimodule {
            corr,
            left_alg,
            right_alg,
            lambda_f,
            delta_sqrt,
        }
    }

    pub fn dim(&self) -> usize {
        self.corr.n_points()
    }

    fn delta_sqrt(&self, a: u32, p: u32) -> f64 {
        self.delta_sqrt[a as usize * self.dim() + p as usize].expect("composable pair")
    }

    /// `(f·ψ)(x) = Σ_{η ∈ H^{σ(x)}} f(x·η) ψ(η⁻¹) β(η)`.
    pub fn right_act(&self, f: &[C], psi: &[C]) -> Vec<C> {
        let h = &self.corr.right.groupoid;
        let x = &self.corr.bispace;
        (0..self.dim() as u32)
            .map(|p| {
                let mut acc = c(0.0);
                for &eta in h.range_fiber(x.sigma(p)) {
                    let pe = x.right_act(p, eta).expect("composable");
                    acc += f[pe as usize]
                        * psi[h.inv(eta) as usize]
                        * c(self.right_alg.haar_f(eta));
                }
                acc
            })
            .collect()
    }

    /// `⟨f, g⟩(η) = Σ_{x ∈ σ⁻¹(r(η))} conj(f(x)) g(x·η) λ(x)`.
    pub fn inner(&self, f: &[C], g: &[C]) -> Vec<C> {
        let h = &self.corr.right.groupoid;
        let x = &self.corr.bispace;
        (0..h.n_arrows() as u32)
            .map(|eta| {
                let mut acc = c(0.0);
                for p in 0..self.dim() as u32 {
                    if x.sigma(p) == h.rng(eta) {
                        let pe = x.right_act(p, eta).expect("composable");
                        acc += f[p as usize].conj() * g[pe as usize] * c(self.lambda_f[p as usize]);
                    }
                }
                acc
            })
            .collect()
    }

    /// `(φ·f)(x) = Σ_{γ ∈ G^{ρ(x)}} φ(γ) f(γ⁻¹·x) Δ^{1/2}(γ, γ⁻¹x) α(γ)`.
    pub fn left_act(&self, phi: &[C], f: &[C]) -> Vec<C> {
        let g = &self.corr.left.groupoid;
        let x = &self.corr.bispace;
        (0..self.dim() as u32)
            .map(|p| {
                let mut acc = c(0.0);
                for &gamma in g.range_fiber(x.rho(p)) {
                    let gp = x.left_act(g.inv(gamma), p).expect("composable");
                    acc += phi[gamma as usize]
                        * f[gp as usize]
                        * c(self.delta_sqrt(gamma, gp))
                        * c(self.left_alg.haar_f(gamma));
                }
                acc
            })
            .collect()
    }

    /// Rational-exact right action; no square roots are involved.
    pub fn right_act_exact(&self, f: &[Rat], psi: &[Rat]) -> Vec<Rat> {
        let h = &self.corr.right.groupoid;
        let x = &self.corr.bispace;
        (0..self.dim() as u32)
            .map(|p| {
                let mut acc = Rat::from_integer(0.into());
                for &eta in h.range_fiber(x.sigma(p)) {
                    let pe = x.right_act(p, eta).expect("composable");
                    acc += &f[pe as usize]
                        * &psi[h.inv(eta) as usize]
                        * self.corr.right.haar.weight(eta);
                }
                acc
            })
            .collect()
    }

    /// Rational-exact inner product of real-valued elements.
    pub fn inner_exact(&self, f: &[Rat], g: &[Rat]) -> Vec<Rat> {
        let h = &self.corr.right.groupoid;
        let x = &self.corr.bispace;
        (0..h.n_arrows() as u32)
            .map(|eta| {
                let mut acc = Rat::from_integer(0.into());
                for p in 0..self.dim() as u32 {
                    if x.sigma(p) == h.rng(eta) {
                        let pe = x.right_act(p, eta).expect("composable");
                        acc += &f[p as usize] * &g[pe as usize] * self.corr.lambda.weight(p);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn dirac(&self, p: u32) -> Vec<C> {
        let mut v = vec![c(0.0); self.dim()];
        v[p as usize] = c(1.0);
        v
    }

    fn alg_dirac(n: usize, a: u32) -> Vec<C> {
        let mut v = vec![c(0.0); n];
        v[a as usize] = c(1.0);
        v
    }

    /// Gram matrix of the Dirac basis under the unit-trace functional of
    /// the right algebra; real by construction.
    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut g = DMatrix::<f64>::zeros(n, n);
        for i in 0..n as u32 {
            let di = self.dirac(i);
            for j in 0..n as u32 {
                let dj = self.dirac(j);
                let ip = self.inner(&di, &dj);
                g[(i as usize, j as usize)] = self.right_alg.trace(&ip).re;
            }
        }
        g
    }

    /// Certifies every bimodule axiom on Dirac spanning sets, plus spectral
    /// positivity of `⟨v, v⟩` for Diracs and complex two-point combinations.
    pub fn axioms_report(&self, tol: f64) -> Report {
        let mut r = Report::new();
        let n = self.dim();
        let ng = self.left_alg.dim();
        let nh = self.right_alg.dim();
        let diracs: Vec<Vec<C>> = (0..n as u32).map(|p| self.dirac(p)).collect();
        let g_diracs: Vec<Vec<C>> = (0..ng as u32).map(|a| Self::alg_dirac(ng, a)).collect();
        let h_diracs: Vec<Vec<C>> = (0..nh as u32).map(|a| Self::alg_dirac(nh, a)).collect();

        // right action associativity: (f·ψ)·ψ' = f·(ψ*ψ')
        let mut worst = 0.0f64;
        for f in &diracs {
            for psi in &h_diracs {
                for psi2 in &h_diracs {
                    let lhs = self.right_act(&self.right_act(f, psi), psi2);
                    let rhs = self.right_act(f, &self.right_alg.convolve(psi, psi2));
                    worst = worst.max(max_abs_diff(&lhs, &rhs));
                }
            }
        }
        r.check_residual("module.right_action_associativity", worst, tol);

        // ⟨f, g·ψ⟩ = ⟨f, g⟩ * ψ
        let mut worst = 0.0f64;
        for f in &diracs {
            for g in &diracs {
                for psi in &h_diracs {
                    let lhs = self.inner(f, &self.right_act(g, psi));
                    let rhs = self.right_alg.convolve(&self.inner(f, g), psi);
                    worst = worst.max(max_abs_diff(&lhs, &rhs));
                }
            }
        }
        r.check_residual("module.inner_right_linear", worst, tol);

        // ⟨f, g⟩* = ⟨g, f⟩
        let mut worst = 0.0f64;
        for f in &diracs {
            for g in &diracs {
                let lhs = self.right_alg.involute(&self.inner(f, g));
                let rhs = self.inner(g, f);
                worst = worst.max(max_abs_diff(&lhs, &rhs));
            }
        }
        r.check_residual("module.inner_hermitian", worst, tol);

        // ⟨φ·f, g⟩ = ⟨f, φ*·g⟩
        let mut worst = 0.0f64;
        for phi in &g_diracs {
            let phi_star = self.left_alg.involute(phi);
            for f in &diracs {
                for g in &diracs {
                    let lhs = self.inner(&self.left_act(phi, f), g);
                    let rhs = self.inner(f, &self.left_act(&phi_star, g));
                    worst = worst.max(max_abs_diff(&lhs, &rhs));
                }
            }
        }
        r.check_residual("module.left_action_adjointable", worst, tol);

        // left action is multiplicative: (φ*φ')·f = φ·(φ'·f)
        let mut worst = 0.0f64;
        for phi in &g_diracs {
            for phi2 in &g_diracs {
                for f in &diracs {
                    let lhs = self.left_act(&self.left_alg.convolve(phi, phi2), f);
                    let rhs = self.left_act(phi, &self.left_act(phi2, f));
                    worst = worst.max(max_abs_diff(&lhs, &rhs));
                }
            }
        }
        r.check_residual("module.left_action_multiplicative", worst, tol);

        // spectral positivity of ⟨v, v⟩ for a spanning selection of vectors
        let mut vectors: Vec<Vec<C>> = diracs.clone();
        for i in 0..n {
            let j = (i + 1) % n;
            if i != j {
                let mut v = diracs[i].clone();
                v[j] += c(1.0);
                vectors.push(v);
                let mut v = diracs[i].clone();
                v[j] += C::new(0.0, 1.0);
                vectors.push(v);
            }
        }
        let mut min_eig = f64::INFINITY;
        let mut failed = None;
        for v in &vectors {
            let h = self.inner(v, v);
            match self.right_alg.positivity_eigenvalues(&h, tol) {
                Ok(eigs) => {
                    if let Some(&lo) = eigs.first() {
                        min_eig = min_eig.min(lo);
                    }
                }
                Err(e) => {
                    failed = Some(e.to_string());
                    break;
                }
            }
        }
        match failed {
            Some(err) => r.fail("module.inner_positive", err),
            None => {
                let residual = if min_eig.is_finite() { (-min_eig).max(0.0) } else { 0.0 };
                r.check_residual("module.inner_positive", residual, tol);
            }
        }

        // Gram positivity of the Dirac basis
        let gram = self.gram();
        let sym = (gram.clone() + gram.transpose()) * 0.5;
        let eigs = sym.symmetric_eigen().eigenvalues;
        let min = eigs.iter().copied().fold(f64::INFINITY, f64::min);
        r.check_residual("module.gram_positive", (-min).max(0.0), tol);
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{swap_correspondence, z2};
    use crate::correspondence::identity_correspondence;
    use crate::rat::{one, rat_int};

    #[test]
    fn identity_module_reproduces_convolution_exactly() {
        let id = identity_correspondence(&z2());
        let m = build_module(&id, 1e-9).unwrap();
        let alg = &m.right_alg;
        // f·ψ = f*ψ and ⟨f, g⟩ = f* * g, exactly over the rationals
        for i in 0..2u32 {
            for j in 0..2u32 {
                let mut f = vec![Rat::from_integer(0.into()); 2];
                f[i as usize] = one();
                let mut g = vec![Rat::from_integer(0.into()); 2];
                g[j as usize] = one();
                assert_eq!(m.right_act_exact(&f, &g), alg.convolve_exact(&f, &g));
                assert_eq!(
                    m.inner_exact(&f, &g),
                    alg.convolve_exact(&alg.involute_exact(&f), &g)
                );
            }
        }
    }

    #[test]
    fn swap_module_axioms_and_inner_product() {
        let sw = swap_correspondence();
        let m = build_module(&sw, 1e-9).unwrap();
        // ⟨f, f⟩ over the trivial group is |f(p)|² + 2|f(q)|²
        let f = vec![C::new(1.0, 1.0), C::new(0.0, 3.0)];
        let ip = m.inner(&f, &f);
        assert!((ip[0].re - (2.0 + 2.0 * 9.0)).abs() < 1e-12);
        assert!(ip[0].im.abs() < 1e-14);
    }

    #[test]
    fn trivial_left_action_is_scalar() {
        let q = crate::correspondence::from_quiver(&[0, 0], &[0, 0], vec![rat_int(1), rat_int(2)], 1, 1)
            .unwrap();
        let m = build_module(&q, 1e-9).unwrap();
        let phi = vec![c(2.5)];
        let f = vec![c(1.0), c(-1.0)];
        let out = m.left_act(&phi, &f);
        assert!(max_abs_diff(&out, &[c(2.5), c(-2.5)]) < 1e-14);
    }

    #[test]
    fn group_hom_module_axioms() {
        let g4 = crate::groupoid::GroupoidWithHaar::counting(
            "Z4",
            crate::groupoid::FiniteGroupoid::cyclic_group(4),
        );
        let corr = crate::correspondence::from_group_hom(&g4, &z2(), &[0, 1, 0, 1]).unwrap();
        assert!(build_module(&corr, 1e-9).is_ok());
    }
}
