//! Convolution *-algebras of finite groupoids with Haar weights.
//!
//! Elements are functions on arrows. The product integrates over range
//! fibers, the involution conjugates at the inverse. Positivity of a
//! self-adjoint element is spectral positivity of its left-regular matrix,
//! read in the GNS inner product of the canonical unit-trace functional.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::groupoid::GroupoidWithHaar;
use crate::rat::{one, to_f64, Rat};

use super::linalg::{c, hermitian_defect, hermitian_eigenvalues, C};

#[derive(Debug, Clone)]
pub struct ConvolutionAlgebra {
    pub gh: Arc<GroupoidWithHaar>,
    haar_f: Vec<f64>,
}

impl PartialEq for ConvolutionAlgebra {
    fn eq(&self, other: &Self) -> bool {
        *self.gh == *other.gh
    }
}

impl ConvolutionAlgebra {
    pub fn new(gh: Arc<GroupoidWithHaar>) -> Self {
        let haar_f = gh.haar.weights.iter().map(to_f64).collect();
        ConvolutionAlgebra { gh, haar_f }
    }

    pub fn dim(&self) -> usize {
        self.gh.groupoid.n_arrows()
    }

    pub fn haar_f(&self, a: u32) -> f64 {
        self.haar_f[a as usize]
    }

    /// `(f*g)(γ) = Σ_{η ∈ G^{r(γ)}} f(η) g(η⁻¹γ) α(η)`.
    pub fn convolve(&self, f: &[C], g: &[C]) -> Vec<C> {
        let gg = &self.gh.groupoid;
        (0..self.dim() as u32)
            .map(|gamma| {
                let mut acc = c(0.0);
                for &eta in gg.range_fiber(gg.rng(gamma)) {
                    let rest = gg.compose(gg.inv(eta), gamma).expect("composable");
                    acc += f[eta as usize] * g[rest as usize] * c(self.haar_f(eta));
                }
                acc
            })
            .collect()
    }

    /// `f*(γ) = conj(f(γ⁻¹))`.
    pub fn involute(&self, f: &[C]) -> Vec<C> {
        let gg = &self.gh.groupoid;
        (0..self.dim() as u32)
            .map(|gamma| f[gg.inv(gamma) as usize].conj())
            .collect()
    }

    /// Rational-exact convolution, for identities that involve no square
    /// roots.
    pub fn convolve_exact(&self, f: &[Rat], g: &[Rat]) -> Vec<Rat> {
        let gg = &self.gh.groupoid;
        (0..self.dim() as u32)
            .map(|gamma| {
                let mut acc = Rat::from_integer(0.into());
                for &eta in gg.range_fiber(gg.rng(gamma)) {
                    let rest = gg.compose(gg.inv(eta), gamma).expect("composable");
                    acc += &f[eta as usize] * &g[rest as usize] * self.gh.haar.weight(eta);
                }
                acc
            })
            .collect()
    }

    /// Rational-exact involution of a real-valued element.
    pub fn involute_exact(&self, f: &[Rat]) -> Vec<Rat> {
        let gg = &self.gh.groupoid;
        (0..self.dim() as u32)
            .map(|gamma| f[gg.inv(gamma) as usize].clone())
            .collect()
    }

    /// The sum of unit Diracs is a two-sided unit exactly when the Haar
    /// system gives every unit arrow weight 1.
    pub fn is_unital(&self) -> bool {
        let gg = &self.gh.groupoid;
        (0..gg.n_units() as u32).all(|u| self.gh.haar.weight(gg.unit_arrow(u)) == &one())
    }

    pub fn unit(&self) -> Option<Vec<C>> {
        if !self.is_unital() {
            return None;
        }
        let gg = &self.gh.groupoid;
        let mut e = vec![c(0.0); self.dim()];
        for u in 0..gg.n_units() as u32 {
            e[gg.unit_arrow(u) as usize] = c(1.0);
        }
        Some(e)
    }

    /// The faithful positive functional `τ(h) = Σ_u h(unit arrow at u)`.
    pub fn trace(&self, h: &[C]) -> C {
        let gg = &self.gh.groupoid;
        (0..gg.n_units() as u32)
            .map(|u| h[gg.unit_arrow(u) as usize])
            .sum()
    }

    pub fn trace_exact(&self, h: &[Rat]) -> Rat {
        let gg = &self.gh.groupoid;
        let mut acc = Rat::from_integer(0.into());
        for u in 0..gg.n_units() as u32 {
            acc += &h[gg.unit_arrow(u) as usize];
        }
        acc
    }

    /// Matrix of left convolution by `h` on the Dirac basis.
    pub fn left_regular_matrix(&self, h: &[C]) -> DMatrix<C> {
        let gg = &self.gh.groupoid;
        let n = self.dim();
        let mut a = DMatrix::<C>::zeros(n, n);
        for col in 0..n as u32 {
            for row in 0..n as u32 {
                if gg.src(row) == gg.src(col) {
                    let eta = gg.compose(row, gg.inv(col)).expect("composable");
                    a[(row as usize, col as usize)] = h[eta as usize] * c(self.haar_f(eta));
                }
            }
        }
        a
    }

    /// Spectrum of the left-regular matrix of a self-adjoint element,
    /// computed through the GNS orthonormal basis where the matrix is
    /// Hermitian. Errors if `h` is not self-adjoint.
    pub fn positivity_eigenvalues(&self, h: &[C], tol: f64) -> Result<Vec<f64>> {
        let star: Vec<C> = self.involute(h);
        let defect = super::linalg::max_abs_diff(h, &star);
        if defect > tol {
            return Err(Error::Invalid(format!(
                "element is not self-adjoint (defect {defect:.3e})"
            )));
        }
        let gg = &self.gh.groupoid;
        let n = self.dim();
        let a = self.left_regular_matrix(h);
        // GNS Gram of the Dirac basis is diagonal: S(γ) = α(γ⁻¹)
        let s: Vec<f64> = (0..n as u32).map(|g| self.haar_f(gg.inv(g))).collect();
        let mut b = DMatrix::<C>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                b[(i, j)] = a[(i, j)] * c((s[i] / s[j]).sqrt());
            }
        }
        let defect = hermitian_defect(&b);
        if defect > tol * 10.0 {
            return Err(Error::Invalid(format!(
                "left-regular matrix is not Hermitian in the GNS basis (defect {defect:.3e})"
            )));
        }
        // symmetrize away rounding before extracting the spectrum
        let bh = b.adjoint();
        let sym = (b + bh) * c(0.5);
        Ok(hermitian_eigenvalues(&sym))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::FiniteGroupoid;
    use crate::rat::rat_int;

    fn z2_alg() -> ConvolutionAlgebra {
        ConvolutionAlgebra::new(GroupoidWithHaar::counting("Z2", FiniteGroupoid::cyclic_group(2)))
    }

    #[test]
    fn group_algebra_of_z2_multiplies_group_like() {
        let alg = z2_alg();
        let dg = vec![c(0.0), c(1.0)];
        let de = vec![c(1.0), c(0.0)];
        assert_eq!(alg.convolve(&dg, &dg), de);
        // δ_e is the unit
        let e = alg.unit().unwrap();
        let f = vec![c(0.7), c(-0.3)];
        assert!(super::super::linalg::max_abs_diff(&alg.convolve(&e, &f), &f) < 1e-15);
        assert!(super::super::linalg::max_abs_diff(&alg.convolve(&f, &e), &f) < 1e-15);
    }

    #[test]
    fn exact_convolution_matches_float() {
        let alg = ConvolutionAlgebra::new(GroupoidWithHaar::counting(
            "P2",
            FiniteGroupoid::pair_groupoid(2),
        ));
        let f: Vec<Rat> = (1..=4).map(rat_int).collect();
        let g: Vec<Rat> = (2..=5).map(rat_int).collect();
        let exact = alg.convolve_exact(&f, &g);
        let ff: Vec<C> = f.iter().map(|r| c(to_f64(r))).collect();
        let gf: Vec<C> = g.iter().map(|r| c(to_f64(r))).collect();
        let float = alg.convolve(&ff, &gf);
        for (e, fl) in exact.iter().zip(float.iter()) {
            assert!((to_f64(e) - fl.re).abs() < 1e-12);
        }
        // associativity over an exhaustive triple expansion
        let h: Vec<Rat> = (3..=6).map(rat_int).collect();
        let lhs = alg.convolve_exact(&alg.convolve_exact(&f, &g), &h);
        let rhs = alg.convolve_exact(&f, &alg.convolve_exact(&g, &h));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn star_is_involutive_and_antimultiplicative() {
        let alg = z2_alg();
        let f = vec![C::new(0.5, 0.25), C::new(-1.0, 2.0)];
        let g = vec![C::new(1.5, -0.5), C::new(0.0, 1.0)];
        let lhs = alg.involute(&alg.convolve(&f, &g));
        let rhs = alg.convolve(&alg.involute(&g), &alg.involute(&f));
        assert!(super::super::linalg::max_abs_diff(&lhs, &rhs) < 1e-14);
        assert_eq!(alg.involute(&alg.involute(&f)), f);
    }

    #[test]
    fn positive_elements_have_nonnegative_spectrum() {
        let alg = z2_alg();
        let f = vec![C::new(0.3, 0.7), C::new(-1.1, 0.2)];
        let h = alg.convolve(&alg.involute(&f), &f);
        let eigs = alg.positivity_eigenvalues(&h, 1e-9).unwrap();
        assert!(eigs.iter().all(|&v| v >= -1e-9), "{eigs:?}");
        // while δ_g - is self-adjoint with a negative eigenvalue
        let neg = vec![c(-1.0), c(0.0)];
        let eigs = alg.positivity_eigenvalues(&neg, 1e-9).unwrap();
        assert!(eigs[0] < -0.5);
    }
}
