//! Cofactor polynomials of the 4x4 symbol matrix.
//!
//! On the hexagonal basis (in-plane transverse, in-plane longitudinal, axis,
//! potential) the symbol matrix of the coupled operator depends on a plane
//! wave vector only through `xi_b^2` and `xi_c^2`. With `xi_c = 1` and
//! `a = xi_b^2` every adjugate entry becomes a low-order polynomial in `a`:
//! cubic for the diagonal-type entries, quadratic for the de-branched
//! off-diagonal kernels `gamma_*` (the raw off-diagonal cofactors carry a
//! factor `sqrt(a)`, which is kept out of the exposed functions so they stay
//! single valued for complex `a`).
//!
//! All kernels accept complex `a` because they are evaluated at the negated
//! characteristic roots.

use crate::error::Result;
use crate::linalg::det4;
use crate::material::{CartesianModuli, MaterialModuli};
use crate::spectrum::cubic_coefficients;
use num_complex::Complex64;

type C = Complex64;

/// Snapshot of the constants plus the characteristic-cubic coefficients,
/// exposing every symbol kernel as a function of `a`.
#[derive(Debug, Clone, Copy)]
pub struct KernelSet {
    m: MaterialModuli,
    /// c13 + c44, the cross-plane stiffness coupling.
    cp: f64,
    /// e31 + e15, the cross-plane piezoelectric coupling.
    ep: f64,
    coeff: [f64; 4],
}

impl KernelSet {
    pub fn new(m: &MaterialModuli) -> Result<Self> {
        m.ensure_valid()?;
        Ok(Self {
            m: *m,
            cp: m.c13 + m.c44,
            ep: m.e31 + m.e15,
            coeff: cubic_coefficients(m),
        })
    }

    pub fn moduli(&self) -> &MaterialModuli {
        &self.m
    }

    // Diagonal symbol scalars.

    /// In-plane transverse stiffness `c66 a + c44`; its root is `-c44/c66`.
    pub fn t_bperp(&self, a: C) -> C {
        self.m.c66 * a + self.m.c44
    }

    pub fn t_b(&self, a: C) -> C {
        self.m.c11 * a + self.m.c44
    }

    /// Square of the cross coupling `T_bc`, i.e. `(c13 + c44)^2 a`.
    pub fn t_bc_sq(&self, a: C) -> C {
        self.cp * self.cp * a
    }

    pub fn t_c(&self, a: C) -> C {
        self.m.c44 * a + self.m.c33
    }

    /// Square of the in-plane piezoelectric coupling, `(e31 + e15)^2 a`.
    pub fn t_b4_sq(&self, a: C) -> C {
        self.ep * self.ep * a
    }

    pub fn t_c4(&self, a: C) -> C {
        self.m.e15 * a + self.m.e33
    }

    pub fn tau(&self, a: C) -> C {
        -(self.m.eta11 * a + self.m.eta33)
    }

    // Adjugate kernels.

    /// Transverse cofactor; identical to the characteristic cubic.
    pub fn lambda_bperp(&self, a: C) -> C {
        let tb = self.t_b(a);
        let tc = self.t_c(a);
        let tc4 = self.t_c4(a);
        // T_bc t_b4 = a (c13 + c44)(e31 + e15): branch-free product.
        let tbc_tb4 = self.cp * self.ep * a;
        self.tau(a) * (tb * tc - self.t_bc_sq(a))
            - (tc4 * tc4 * tb - 2.0 * tc4 * tbc_tb4 + self.t_b4_sq(a) * tc)
    }

    /// The characteristic cubic from its coefficients. Same polynomial as
    /// `lambda_bperp`, kept as a second route for cross-checking.
    pub fn characteristic_cubic(&self, a: C) -> C {
        let [ca, cb, cc, cd] = self.coeff;
        ((ca * a + cb) * a + cc) * a + cd
    }

    pub fn lambda_b(&self, a: C) -> C {
        -self.t_bperp(a) * ((self.m.eta11 * a + self.m.eta33) * self.t_c(a) + self.t_c4(a).powi(2))
    }

    pub fn lambda_c(&self, a: C) -> C {
        -self.t_bperp(a)
            * ((self.m.eta11 * a + self.m.eta33) * self.t_b(a) + self.ep * self.ep * a)
    }

    pub fn lambda_c4(&self, a: C) -> C {
        -self.t_bperp(a) * (self.t_b(a) * self.t_c4(a) - self.cp * self.ep * a)
    }

    pub fn lambda_4(&self, a: C) -> C {
        self.t_bperp(a) * ((self.m.c11 * a + self.m.c44) * self.t_c(a) - self.t_bc_sq(a))
    }

    /// De-branched in-plane kernel, defined by
    /// `lambda_bperp(a) - lambda_b(a) = a * gamma_b(a)`; degree two.
    ///
    /// Expanded form. Note the sign of the `(e31+e15)^2 T_c` term: it is
    /// negative, as the defining difference requires.
    pub fn gamma_b(&self, a: C) -> C {
        let tc = self.t_c(a);
        let tc4 = self.t_c4(a);
        (self.m.c11 - self.m.c66) * (tc * self.tau(a) - tc4 * tc4) - self.cp * self.cp * self.tau(a)
            + 2.0 * self.cp * self.ep * tc4
            - self.ep * self.ep * tc
    }

    /// De-branched elastic/axis coupling kernel `lambda_bc / sqrt(a)`.
    pub fn gamma_bc(&self, a: C) -> C {
        self.t_bperp(a) * (self.ep * self.t_c4(a) + (self.m.eta11 * a + self.m.eta33) * self.cp)
    }

    /// De-branched electroelastic coupling kernel `lambda_b4 / sqrt(a)`.
    pub fn gamma_b4(&self, a: C) -> C {
        self.t_bperp(a) * (self.cp * self.t_c4(a) - self.t_c(a) * self.ep)
    }

    /// Determinant of the symbol matrix as the product of the transverse
    /// factor and the characteristic cubic.
    pub fn determinant_factored(&self, a: C) -> C {
        self.t_bperp(a) * self.characteristic_cubic(a)
    }
}

/// Symbol matrix of the coupled operator at a real wave vector: stiffness,
/// coupling and (negated) permittivity contractions in one symmetric 4x4.
pub fn assemble_toperator(cm: &CartesianModuli, xi: [f64; 3]) -> [[f64; 4]; 4] {
    let mut t = [[0.0; 4]; 4];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0.0;
            for p in 0..3 {
                for q in 0..3 {
                    acc += cm.c[i][p][j][q] * xi[p] * xi[q];
                }
            }
            t[i][j] = acc;
        }
        let mut acc = 0.0;
        for p in 0..3 {
            for q in 0..3 {
                acc += cm.e[p][i][q] * xi[p] * xi[q];
            }
        }
        t[i][3] = acc;
        t[3][i] = acc;
    }
    let mut acc = 0.0;
    for p in 0..3 {
        for q in 0..3 {
            acc += cm.eta[p][q] * xi[p] * xi[q];
        }
    }
    t[3][3] = -acc;
    t
}

/// Relative residual between the directly computed symbol determinant at
/// `xi = (sqrt(a), 0, 1)` and its factored form. Requires `a >= 0` so the
/// wave vector is real.
pub fn determinant_identity_check(m: &MaterialModuli, a: f64) -> Result<f64> {
    assert!(a >= 0.0 && a.is_finite(), "need a real wave vector, a >= 0");
    let kernels = KernelSet::new(m)?;
    let cm = m.expand()?;
    let t = assemble_toperator(&cm, [a.sqrt(), 0.0, 1.0]);
    let direct = det4(&t);
    let factored = kernels.determinant_factored(C::new(a, 0.0)).re;
    let scale = direct.abs().max(factored.abs()).max(f64::MIN_POSITIVE);
    Ok((direct - factored).abs() / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::invert4;
    use crate::spectrum::solve_spectrum;
    use crate::test_util::sample_material;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cn(x: f64) -> C {
        C::new(x, 0.0)
    }

    #[test]
    fn transverse_cofactor_equals_the_characteristic_cubic() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0021);
        for _ in 0..50 {
            let m = sample_material(&mut rng);
            let k = KernelSet::new(&m).unwrap();
            let a = C::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let lhs = k.lambda_bperp(a);
            let rhs = k.characteristic_cubic(a);
            let scale = lhs.norm().max(rhs.norm()).max(k.coeff_scale());
            assert!((lhs - rhs).norm() <= 1e-12 * scale, "{lhs} vs {rhs}");
        }
    }

    impl KernelSet {
        fn coeff_scale(&self) -> f64 {
            self.coeff.iter().map(|c| c.abs()).fold(0.0, f64::max)
        }
    }

    #[test]
    fn debranched_kernel_satisfies_its_defining_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0022);
        for _ in 0..50 {
            let m = sample_material(&mut rng);
            let k = KernelSet::new(&m).unwrap();
            let a = C::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let lhs = k.lambda_bperp(a) - k.lambda_b(a);
            let rhs = a * k.gamma_b(a);
            let scale = k.lambda_bperp(a).norm().max(k.lambda_b(a).norm());
            assert!((lhs - rhs).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn coupling_kernels_vanish_without_piezoelectricity() {
        let m = MaterialModuli::zno().zero_piezo();
        let k = KernelSet::new(&m).unwrap();
        for a in [cn(0.0), cn(1.7), C::new(-0.3, 0.8), cn(-2.0)] {
            assert_eq!(k.gamma_b4(a), cn(0.0));
            assert_eq!(k.lambda_c4(a), cn(0.0));
        }
    }

    #[test]
    fn dielectric_kernel_at_zero_is_c33_c44_squared() {
        let m = MaterialModuli::zno();
        let k = KernelSet::new(&m).unwrap();
        assert_eq!(k.lambda_4(cn(0.0)), cn(m.c33 * m.c44 * m.c44));
    }

    #[test]
    fn transverse_root_kills_the_debranched_couplings() {
        let m = MaterialModuli::zno();
        let k = KernelSet::new(&m).unwrap();
        let a = cn(-m.c44 / m.c66);
        assert!(k.gamma_bc(a).norm() <= 1e-12 * k.gamma_bc(cn(1.0)).norm());
        assert!(k.gamma_b4(a).norm() <= 1e-12 * k.gamma_b4(cn(1.0)).norm());
    }

    #[test]
    fn cubic_vanishes_at_the_negated_characteristic_roots() {
        let m = MaterialModuli::zno();
        let k = KernelSet::new(&m).unwrap();
        let s = solve_spectrum(&m).unwrap();
        let scale = [cn(0.0), cn(1.0), cn(2.0)]
            .iter()
            .map(|a| k.lambda_bperp(*a).norm())
            .fold(0.0, f64::max);
        for root in &s.roots[1..] {
            let v = k.lambda_bperp(-root).norm();
            assert!(v <= 1e-9 * scale, "residual {v:.3e} at root {root}");
        }
    }

    #[test]
    fn symbol_matrix_limits() {
        let m = MaterialModuli::zno();
        let cm = m.expand().unwrap();
        let zero = assemble_toperator(&cm, [0.0; 3]);
        assert!(zero.iter().flatten().all(|v| *v == 0.0));

        let axis = assemble_toperator(&cm, [0.0, 0.0, 1.0]);
        let expect = [
            [m.c44, 0.0, 0.0, 0.0],
            [0.0, m.c44, 0.0, 0.0],
            [0.0, 0.0, m.c33, m.e33],
            [0.0, 0.0, m.e33, -m.eta33],
        ];
        assert_eq!(axis, expect);
    }

    #[test]
    fn symbol_matrix_projects_onto_the_hexagonal_scalars() {
        // At xi = (sqrt(a), 0, 1) the Cartesian axes already realize the
        // hexagonal frame, with the in-plane transverse direction along y.
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0023);
        for _ in 0..30 {
            let m = sample_material(&mut rng);
            let k = KernelSet::new(&m).unwrap();
            let cm = m.expand().unwrap();
            let a: f64 = rng.gen_range(0.0..4.0);
            let t = assemble_toperator(&cm, [a.sqrt(), 0.0, 1.0]);
            let ac = cn(a);
            let sq = a.sqrt();
            let scale_c = (1.0 + a) * m.c11.max(m.c33);
            let scale_e = (1.0 + a) * m.e15.abs().max(m.e31.abs()).max(m.e33.abs()).max(1.0);
            let scale_eta = (1.0 + a) * m.eta11.max(m.eta33);
            assert!((t[0][0] - k.t_b(ac).re).abs() <= 1e-13 * scale_c);
            assert!((t[1][1] - k.t_bperp(ac).re).abs() <= 1e-13 * scale_c);
            assert!((t[2][2] - k.t_c(ac).re).abs() <= 1e-13 * scale_c);
            assert!((t[0][2] - (m.c13 + m.c44) * sq).abs() <= 1e-13 * scale_c);
            assert!((t[0][3] - (m.e31 + m.e15) * sq).abs() <= 1e-13 * scale_e);
            assert!((t[2][3] - k.t_c4(ac).re).abs() <= 1e-13 * scale_e);
            assert!((t[3][3] - k.tau(ac).re).abs() <= 1e-13 * scale_eta);
            // Squared couplings agree with their kernel forms.
            assert!((t[0][2] * t[0][2] - k.t_bc_sq(ac).re).abs() <= 1e-12 * scale_c * scale_c);
            assert!((t[0][3] * t[0][3] - k.t_b4_sq(ac).re).abs() <= 1e-12 * scale_e * scale_e);
            assert_eq!(t[0][1], 0.0);
            assert_eq!(t[1][2], 0.0);
            assert_eq!(t[1][3], 0.0);
        }
    }

    #[test]
    fn adjugate_matches_the_kernel_polynomials() {
        // adj(T) = det(T) * T^{-1}; entries at xi = (sqrt(a), 0, 1) must equal
        // the kernel polynomials, with sqrt(a) restored on the off-diagonal
        // couplings.
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0024);
        for _ in 0..40 {
            let m = sample_material(&mut rng);
            let k = KernelSet::new(&m).unwrap();
            let cm = m.expand().unwrap();
            let a: f64 = rng.gen_range(0.05..4.0);
            let t = assemble_toperator(&cm, [a.sqrt(), 0.0, 1.0]);
            let det = crate::linalg::det4(&t);
            let (inv, _) = invert4(&t).unwrap();
            let ac = cn(a);
            let sq = a.sqrt();
            let pairs = [
                (det * inv[0][0], k.lambda_b(ac)),
                (det * inv[1][1], k.lambda_bperp(ac)),
                (det * inv[2][2], k.lambda_c(ac)),
                (det * inv[3][3], k.lambda_4(ac)),
                (det * inv[0][2], sq * k.gamma_bc(ac)),
                (det * inv[0][3], sq * k.gamma_b4(ac)),
                (det * inv[2][3], k.lambda_c4(ac)),
            ];
            let scale = pairs
                .iter()
                .map(|(x, y)| x.abs().max(y.norm()))
                .fold(0.0, f64::max);
            for (adj, kernel) in pairs {
                assert!(
                    (adj - kernel.re).abs() <= 1e-9 * scale,
                    "adjugate {adj:e} vs kernel {:e} (a = {a})",
                    kernel.re
                );
            }
        }
    }

    #[test]
    fn determinant_identity_on_the_reference_material() {
        let m = MaterialModuli::zno();
        for a in [0.0, 0.3, 1.0, 2.5, 7.0] {
            let res = determinant_identity_check(&m, a).unwrap();
            assert!(res <= 1e-10, "residual {res:.3e} at a = {a}");
        }
        let elastic = m.zero_piezo();
        for a in [0.0, 0.4, 1.9] {
            assert!(determinant_identity_check(&elastic, a).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn kernel_polynomials_have_the_advertised_degrees() {
        // Lagrange reconstruction from minimal node sets must reproduce the
        // kernels exactly; any higher-degree term would break it.
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0025);
        let cubic_nodes = [cn(-1.5), cn(-0.5), cn(0.5), cn(1.5)];
        let quad_nodes = [cn(-1.0), cn(0.0), cn(1.0)];
        for _ in 0..10 {
            let m = sample_material(&mut rng);
            let k = KernelSet::new(&m).unwrap();
            type Kernel = fn(&KernelSet, C) -> C;
            let cubics: [(&str, Kernel); 5] = [
                ("lambda_bperp", KernelSet::lambda_bperp),
                ("lambda_b", KernelSet::lambda_b),
                ("lambda_c", KernelSet::lambda_c),
                ("lambda_c4", KernelSet::lambda_c4),
                ("lambda_4", KernelSet::lambda_4),
            ];
            let quads: [(&str, Kernel); 3] = [
                ("gamma_b", KernelSet::gamma_b),
                ("gamma_bc", KernelSet::gamma_bc),
                ("gamma_b4", KernelSet::gamma_b4),
            ];
            for _ in 0..50 {
                let a = C::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                for (name, f) in cubics.iter() {
                    let interp = lagrange(&cubic_nodes, |x| f(&k, x), a);
                    let direct = f(&k, a);
                    let scale = direct.norm().max(interp.norm()).max(1e-3 * k.coeff_scale());
                    assert!(
                        (interp - direct).norm() <= 1e-10 * scale,
                        "{name} exceeds its degree"
                    );
                }
                for (name, f) in quads.iter() {
                    let interp = lagrange(&quad_nodes, |x| f(&k, x), a);
                    let direct = f(&k, a);
                    let scale = direct.norm().max(interp.norm()).max(1e-3 * k.coeff_scale());
                    assert!(
                        (interp - direct).norm() <= 1e-10 * scale,
                        "{name} exceeds its degree"
                    );
                }
            }
        }
    }

    fn lagrange(nodes: &[C], f: impl Fn(C) -> C, at: C) -> C {
        let mut acc = cn(0.0);
        for (i, xi) in nodes.iter().enumerate() {
            let mut basis = cn(1.0);
            for (j, xj) in nodes.iter().enumerate() {
                if i != j {
                    basis *= (at - xj) / (xi - xj);
                }
            }
            acc += f(*xi) * basis;
        }
        acc
    }

    #[test]
    fn divided_differences_annihilate_quadratic_kernels() {
        // Sum of gamma(-a_l) / prod_{j != l}(a_j - a_l) over the four roots
        // is a third divided difference of a quadratic: identically zero.
        // This is the mechanism that cancels the 1/rho^2 terms in the tensor.
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0026);
        let mut done = 0;
        while done < 60 {
            let m = sample_material(&mut rng);
            let s = match solve_spectrum(&m) {
                Ok(s) => s,
                Err(_) => continue,
            };
            done += 1;
            let k = KernelSet::new(&m).unwrap();
            for f in [KernelSet::gamma_b, KernelSet::gamma_bc, KernelSet::gamma_b4] {
                let mut acc = cn(0.0);
                let mut scale = 0.0f64;
                for l in 0..4 {
                    let mut denom = cn(1.0);
                    for j in 0..4 {
                        if j != l {
                            denom *= s.roots[j] - s.roots[l];
                        }
                    }
                    let term = f(&k, -s.roots[l]) / denom;
                    scale = scale.max(term.norm());
                    acc += term;
                }
                assert!(
                    acc.norm() <= 1e-9 * scale.max(f64::MIN_POSITIVE),
                    "sum {:.3e} vs term scale {:.3e}",
                    acc.norm(),
                    scale
                );
            }
        }
    }

    proptest! {
        #[test]
        fn determinant_identity_holds_at_random_materials(seed in any::<u64>(), a in 0.0f64..8.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = sample_material(&mut rng);
            let res = determinant_identity_check(&m, a).unwrap();
            prop_assert!(res <= 1e-9, "residual {res:.3e}");
        }
    }
}
