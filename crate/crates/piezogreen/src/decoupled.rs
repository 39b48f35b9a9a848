//! Zero-coupling limits of the evaluator.
//!
//! With the piezoelectric constants identically zero the 4x4 problem splits:
//! the elastic 3x3 block becomes Kroener's classical Green's tensor of the
//! hexagonal medium, the dielectric corner becomes the potential of a unit
//! point charge in a uniaxial dielectric, and the coupling column vanishes.
//! This module implements both classical results from their own textbook
//! formulas — sharing no kernel code with the full evaluator — so the two
//! routes can be compared.

use crate::error::{Error, Result};
use crate::greens::AXIS_SWITCH_RATIO;
use crate::kernels::KernelSet;
use crate::material::MaterialModuli;
use crate::spectrum::{solve_spectrum, DEGENERACY_THRESHOLD};
use num_complex::Complex64;

/// The three characteristic ratios of the purely elastic problem and the
/// angular amplitudes attached to them. Valid only for media whose meridional
/// quadratic has real distinct zeros well separated from the torsional ratio
/// `c44/c66`; complex or clustered zeros are refused rather than evaluated
/// with a formula that no longer applies.
#[derive(Debug, Clone, Copy)]
pub struct KroenerConstants {
    /// `roots[0] = c44/c66`; `roots[1..]` solve
    /// `c11 c44 a^2 + (c13^2 + 2 c13 c44 - c11 c33) a + c33 c44 = 0`.
    /// All real, positive, pairwise distinct.
    pub roots: [f64; 3],
    /// Normalization weights `E_l = 4 pi c11 c44 c66 prod_{j != l}(a_j - a_l)`.
    pub weights: [f64; 3],
    /// In-plane anisotropic amplitude.
    pub amp_a: [f64; 3],
    /// In-plane isotropic amplitude.
    pub amp_b: [f64; 3],
    /// Meridional shear amplitude.
    pub amp_c: [f64; 3],
    /// Axial amplitude.
    pub amp_d: [f64; 3],
}

/// Real zeros of `c11 c44 a^2 + (c13^2 + 2 c13 c44 - c11 c33) a + c33 c44`,
/// or an explanation of why the real-root form does not apply.
fn meridional_roots(m: &MaterialModuli) -> Result<[f64; 2]> {
    let qa = m.c11 * m.c44;
    let qb = m.c13 * m.c13 + 2.0 * m.c13 * m.c44 - m.c11 * m.c33;
    let qc = m.c33 * m.c44;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc <= 0.0 {
        return Err(Error::ElasticRoots(format!(
            "meridional zeros are complex or repeated (discriminant {disc:.6e}); \
             the real-root elastic form does not apply"
        )));
    }
    // Citardauq-style split keeps both zeros fully accurate.
    let q = -0.5 * (qb + qb.signum() * disc.sqrt());
    Ok([q / qa, qc / q])
}

impl KroenerConstants {
    pub fn new(m: &MaterialModuli) -> Result<Self> {
        m.ensure_valid()?;
        if !m.is_piezo_free() {
            return Err(Error::PiezoelectricCoupling(
                "zero the coupling constants or use the full 4x4 evaluator".into(),
            ));
        }
        let [a2, a3] = meridional_roots(m)?;
        let roots = [m.c44 / m.c66, a2, a3];
        let scale = roots.iter().fold(0.0f64, |s, r| s.max(r.abs()));
        for i in 0..3 {
            if roots[i] <= 0.0 {
                return Err(Error::ElasticRoots(format!(
                    "characteristic ratio {} is not positive: {}",
                    i + 1,
                    roots[i]
                )));
            }
            for j in i + 1..3 {
                if (roots[i] - roots[j]).abs() < DEGENERACY_THRESHOLD * scale {
                    return Err(Error::ElasticRoots(format!(
                        "characteristic ratios {} and {} coincide ({} vs {})",
                        i + 1,
                        j + 1,
                        roots[i],
                        roots[j]
                    )));
                }
            }
        }
        let mut weights = [0.0; 3];
        let mut amp_a = [0.0; 3];
        let mut amp_b = [0.0; 3];
        let mut amp_c = [0.0; 3];
        let mut amp_d = [0.0; 3];
        let pref = 4.0 * std::f64::consts::PI * m.c11 * m.c44 * m.c66;
        let cp = m.c13 + m.c44;
        for l in 0..3 {
            let a_l = roots[l];
            let mut w = pref;
            for j in 0..3 {
                if j != l {
                    w *= roots[j] - a_l;
                }
            }
            weights[l] = w;
            amp_a[l] = ((m.c66 - m.c11) * (m.c33 - a_l * m.c44) + cp * cp) / w;
            amp_b[l] = (m.c11 * m.c44 * a_l * a_l
                + (m.c13 * m.c13 + 2.0 * m.c13 * m.c44 - m.c11 * m.c33) * a_l
                + m.c33 * m.c44)
                / w;
            amp_c[l] = ((m.c44 - a_l * m.c66) * cp) / w;
            amp_d[l] = ((m.c44 - a_l * m.c66) * (m.c44 - a_l * m.c11)) / w;
        }
        Ok(Self {
            roots,
            weights,
            amp_a,
            amp_b,
            amp_c,
            amp_d,
        })
    }

    /// The elastic Green's tensor at a field point. The in-plane amplitude
    /// cancellation is not resummed here, so the formula is refused close to
    /// the symmetry axis; the full evaluator's quadrature path covers that
    /// region.
    pub fn tensor(&self, point: [f64; 3]) -> Result<[[f64; 3]; 3]> {
        let [x, y, z] = point;
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::NonFinitePoint);
        }
        let rho2 = x * x + y * y;
        let z2 = z * z;
        if rho2 + z2 == 0.0 {
            return Err(Error::OriginSingularity);
        }
        if rho2.sqrt() < AXIS_SWITCH_RATIO * (rho2 + z2).sqrt() {
            return Err(Error::Inconsistency(
                "the closed elastic form loses accuracy near the symmetry axis; \
                 evaluate the full operator's quadrature path instead"
                    .into(),
            ));
        }
        let inv_rho2 = 1.0 / rho2;
        let inv_rho4 = inv_rho2 * inv_rho2;
        let mut g = [[0.0; 3]; 3];
        for l in 0..3 {
            let r2l = self.roots[l] * rho2 + z2;
            let q = 1.0 / r2l.sqrt();
            let (aa, bb, cc, dd) = (self.amp_a[l], self.amp_b[l], self.amp_c[l], self.amp_d[l]);
            g[0][0] += q * (aa * (x * x * z2 - y * y * r2l) * inv_rho4 + bb);
            g[1][1] += q * (aa * (y * y * z2 - x * x * r2l) * inv_rho4 + bb);
            g[0][1] += q * aa * x * y * (self.roots[l] * rho2 + 2.0 * z2) * inv_rho4;
            g[0][2] += q * cc * x * z * inv_rho2;
            g[1][2] += q * cc * y * z * inv_rho2;
            g[2][2] += q * dd;
        }
        g[1][0] = g[0][1];
        g[2][0] = g[0][2];
        g[2][1] = g[1][2];
        Ok(g)
    }
}

/// Potential of a unit point charge in a uniaxial dielectric:
/// `-1 / (4 pi eta11 sqrt((eta33/eta11) rho^2 + z^2))`.
pub fn poisson_kernel(eta11: f64, eta33: f64, point: [f64; 3]) -> Result<f64> {
    if !(eta11.is_finite() && eta33.is_finite()) || eta11 <= 0.0 || eta33 <= 0.0 {
        return Err(Error::InvalidMaterial(format!(
            "permittivities must be finite and positive (got {eta11:e}, {eta33:e})"
        )));
    }
    let [x, y, z] = point;
    if !(x.is_finite() && y.is_finite() && z.is_finite()) {
        return Err(Error::NonFinitePoint);
    }
    let w2 = (eta33 / eta11) * (x * x + y * y) + z * z;
    if w2 == 0.0 {
        return Err(Error::OriginSingularity);
    }
    Ok(-1.0 / (4.0 * std::f64::consts::PI * eta11 * w2.sqrt()))
}

/// Residuals of the identities that make the 4x4 evaluator collapse onto the
/// two classical results when the coupling vanishes. All entries are relative
/// deviations; an exact collapse reports zeros.
#[derive(Debug, Clone, Copy)]
pub struct DecoupledReport {
    /// Largest electroelastic coupling entry of the assembled matrix at a set
    /// of probe points, relative to the geometric mean of the block scales.
    pub coupling_column: f64,
    /// Largest value of the elastic-sector kernels at the negated dielectric
    /// ratio, where all of them must vanish.
    pub kernel_zeros_at_dielectric_root: f64,
    /// Largest value of the dielectric kernel at the negated elastic ratios.
    pub lambda4_zeros_at_elastic_roots: f64,
    /// Deviation of the dielectric residue from `-1/(4 pi eta11)`.
    pub dielectric_residue: f64,
}

impl DecoupledReport {
    pub fn max_residual(&self) -> f64 {
        self.coupling_column
            .max(self.kernel_zeros_at_dielectric_root)
            .max(self.lambda4_zeros_at_elastic_roots)
            .max(self.dielectric_residue)
    }
}

impl std::fmt::Display for DecoupledReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "coupling column:            {:.3e}", self.coupling_column)?;
        writeln!(
            f,
            "kernels at dielectric ratio: {:.3e}",
            self.kernel_zeros_at_dielectric_root
        )?;
        writeln!(
            f,
            "axial kernel at elastic ratios: {:.3e}",
            self.lambda4_zeros_at_elastic_roots
        )?;
        write!(f, "dielectric residue:          {:.3e}", self.dielectric_residue)
    }
}

/// Checks that a coupling-free medium actually decouples: the assembled
/// matrix has no electroelastic column, the elastic kernels die at the
/// dielectric ratio and vice versa, and the dielectric residue reduces to the
/// Coulomb prefactor.
pub fn decoupled_consistency(m: &MaterialModuli) -> Result<DecoupledReport> {
    m.ensure_valid()?;
    if !m.is_piezo_free() {
        return Err(Error::PiezoelectricCoupling(
            "decoupling checks compare against limits that assume no coupling".into(),
        ));
    }
    let kernels = KernelSet::new(m)?;
    let spectrum = solve_spectrum(m)?;
    let ev = crate::greens::GreensEvaluator::from_spectrum(m, spectrum)?;

    // Probe points for the coupling column, spread across octants and radii.
    let probes = [
        [0.7, -0.4, 0.5],
        [1.2, 0.3, -0.8],
        [-0.2, 0.9, 1.1],
        [0.05, 0.03, -0.01],
    ];
    let mut coupling_column = 0.0f64;
    for p in probes {
        let g = ev.cartesian(p)?;
        let scales = g.block_scales();
        let scale = (scales[0] * scales[2]).sqrt().max(f64::MIN_POSITIVE);
        for j in 0..3 {
            coupling_column = coupling_column.max(g.matrix[j][3].abs() / scale);
        }
    }

    // Kernel zeros. Scales come from the same kernel at a generic argument.
    let a4 = m.eta33 / m.eta11;
    let at_a4 = Complex64::new(-a4, 0.0);
    let generic = Complex64::new(1.0, 0.0);
    let mut kernel_zeros = 0.0f64;
    let pairs = [
        (kernels.lambda_bperp(at_a4), kernels.lambda_bperp(generic)),
        (kernels.lambda_b(at_a4), kernels.lambda_b(generic)),
        (kernels.gamma_b(at_a4), kernels.gamma_b(generic)),
        (kernels.gamma_bc(at_a4), kernels.gamma_bc(generic)),
        (kernels.lambda_c(at_a4), kernels.lambda_c(generic)),
    ];
    for (value, witness) in pairs {
        kernel_zeros = kernel_zeros.max(value.norm() / witness.norm().max(f64::MIN_POSITIVE));
    }

    // Split the spectrum into the dielectric root (nearest eta33/eta11,
    // always real and simple here) and the three elastic ones, which may be
    // complex; the vanishing identities hold either way.
    let s = ev.spectrum();
    let near4 = (0..4)
        .min_by(|&i, &j| {
            (s.roots[i] - a4)
                .norm()
                .total_cmp(&(s.roots[j] - a4).norm())
        })
        .unwrap();
    let root4 = s.roots[near4];
    let lambda4_scale = kernels.lambda_4(generic).norm().max(f64::MIN_POSITIVE);
    let mut lambda4_zeros = 0.0f64;
    for (i, a_l) in s.roots.iter().enumerate() {
        if i != near4 {
            lambda4_zeros = lambda4_zeros.max(kernels.lambda_4(-a_l).norm() / lambda4_scale);
        }
    }

    let mut weight = Complex64::new(4.0 * std::f64::consts::PI * s.coeff_a * m.c66, 0.0);
    for (i, other) in s.roots.iter().enumerate() {
        if i != near4 {
            weight *= other - root4;
        }
    }
    let residue = kernels.lambda_4(-root4) / weight;
    let want = -1.0 / (4.0 * std::f64::consts::PI * m.eta11);
    let dielectric_residue = (residue - want).norm() / want.abs();

    Ok(DecoupledReport {
        coupling_column,
        kernel_zeros_at_dielectric_root: kernel_zeros,
        lambda4_zeros_at_elastic_roots: lambda4_zeros,
        dielectric_residue,
    })
}
