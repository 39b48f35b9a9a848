//! Closed-form evaluation of the 4x4 electroelastic Green's matrix.
//!
//! Rows and columns 1..3 are mechanical displacement per generalized force,
//! row/column 4 is the electric potential slot; the generalized force vector
//! is (point force, minus point charge). Entries are sums over the four
//! characteristic roots `a_l`:
//!
//! `G_pq = sum_l kernel_pq(-a_l) * geometry_pq / (E_l * sqrt(a_l rho^2 + z^2))`
//!
//! with residue weights `E_l = 4 pi c66 A prod_{j != l}(a_j - a_l)`. Complex
//! roots enter in conjugate pairs, so each sum is real; the square root takes
//! the principal branch (nonnegative real part), which maps conjugate roots
//! to conjugate values and keeps pair sums exactly real.
//!
//! The in-plane entries carry `1/rho^2` and `1/rho^4` geometry factors whose
//! root sums cancel analytically (third divided differences of quadratics).
//! In floating point that cancellation eats roughly `(z/rho)^2 * epsilon`
//! relative accuracy, so points with `rho/r` below `AXIS_SWITCH_RATIO` are
//! served by the angular quadrature instead of the closed form.

use crate::error::{Error, Result};
use crate::kernels::KernelSet;
use crate::material::{CartesianModuli, MaterialModuli};
use crate::quadrature;
use crate::spectrum::{solve_spectrum, CharacteristicSpectrum, DEGENERACY_THRESHOLD};
use num_complex::Complex64;
use rayon::prelude::*;

/// Below this `rho/r` the evaluator switches from the closed form to the
/// angular quadrature.
pub const AXIS_SWITCH_RATIO: f64 = 1e-4;

/// Node count used for quadrature fallbacks inside the evaluator; converged
/// to machine level for smooth hexagonal media.
pub const NEAR_AXIS_NODES: usize = 2048;

/// Tolerated imaginary residue of a root sum, relative to its largest term.
const REALNESS_TOL: f64 = 1e-10;

/// Tolerated asymmetry of an assembled matrix, relative to its block scales.
const SYMMETRY_TOL: f64 = 1e-10;

/// The Green's matrix at one field point. Symmetric; units mix per block
/// (displacement per force, displacement per charge, potential per charge).
#[derive(Debug, Clone, Copy)]
pub struct GreensMatrix {
    pub position: [f64; 3],
    pub matrix: [[f64; 4]; 4],
}

impl GreensMatrix {
    /// Wraps a nearly symmetric matrix, averaging away roundoff asymmetry and
    /// refusing anything worse.
    pub(crate) fn new_symmetrized(position: [f64; 3], m: [[f64; 4]; 4]) -> Result<Self> {
        let g = GreensMatrix {
            position,
            matrix: m,
        };
        let dev = g.symmetry_deviation();
        if dev > SYMMETRY_TOL {
            return Err(Error::Inconsistency(format!(
                "assembled matrix lost symmetry (relative deviation {dev:.3e})"
            )));
        }
        let mut sym = m;
        for i in 0..4 {
            for j in i + 1..4 {
                let v = 0.5 * (m[i][j] + m[j][i]);
                sym[i][j] = v;
                sym[j][i] = v;
            }
        }
        Ok(GreensMatrix {
            position,
            matrix: sym,
        })
    }

    pub fn entry(&self, p: usize, q: usize) -> f64 {
        self.matrix[p][q]
    }

    /// Row-major upper triangle: G11, G12, G13, G14, G22, G23, G24, G33,
    /// G34, G44.
    pub fn upper_triangle(&self) -> [f64; 10] {
        let m = &self.matrix;
        [
            m[0][0], m[0][1], m[0][2], m[0][3], m[1][1], m[1][2], m[1][3], m[2][2], m[2][3],
            m[3][3],
        ]
    }

    pub fn elastic_block(&self) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = self.matrix[i][j];
            }
        }
        out
    }

    /// Generalized displacement response to a generalized load.
    pub fn apply(&self, load: &[f64; 4]) -> [f64; 4] {
        let mut u = [0.0; 4];
        for p in 0..4 {
            for q in 0..4 {
                u[p] += self.matrix[p][q] * load[q];
            }
        }
        u
    }

    /// Largest entry magnitudes per unit-homogeneous block:
    /// (elastic 3x3, electroelastic column, dielectric corner).
    pub fn block_scales(&self) -> [f64; 3] {
        let m = &self.matrix;
        let mut elastic = 0.0f64;
        let mut coupling = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                elastic = elastic.max(m[i][j].abs());
            }
            coupling = coupling.max(m[i][3].abs()).max(m[3][i].abs());
        }
        [elastic, coupling, m[3][3].abs()]
    }

    fn block_of(p: usize, q: usize) -> usize {
        match (p == 3, q == 3) {
            (false, false) => 0,
            (true, true) => 2,
            _ => 1,
        }
    }

    /// Max asymmetry relative to the block scale of each entry.
    pub fn symmetry_deviation(&self) -> f64 {
        let scales = self.block_scales();
        let mut worst = 0.0f64;
        for p in 0..4 {
            for q in p + 1..4 {
                let s = scales[Self::block_of(p, q)].max(f64::MIN_POSITIVE);
                worst = worst.max((self.matrix[p][q] - self.matrix[q][p]).abs() / s);
            }
        }
        worst
    }
}

/// Entrywise deviation between two matrices, relative to per-block scales.
/// The blocks carry different physical units, so a single matrix norm would
/// let the dielectric corner (larger by many decades in SI) drown out the
/// elastic block.
pub fn relative_deviation(a: &GreensMatrix, b: &GreensMatrix) -> f64 {
    let sa = a.block_scales();
    let sb = b.block_scales();
    let mut worst = 0.0f64;
    for p in 0..4 {
        for q in 0..4 {
            let blk = GreensMatrix::block_of(p, q);
            let scale = sa[blk].max(sb[blk]).max(f64::MIN_POSITIVE);
            worst = worst.max((a.matrix[p][q] - b.matrix[p][q]).abs() / scale);
        }
    }
    worst
}

/// The independent components in cylindrical form. Transverse isotropy leaves
/// exactly seven: azimuthal, radial, radial-axial, axial, and the three
/// potential couplings.
#[derive(Debug, Clone, Copy)]
pub struct CylindricalComponents {
    pub rho: f64,
    pub z: f64,
    pub g_phiphi: f64,
    pub g_rhorho: f64,
    pub g_rhoz: f64,
    pub g_zz: f64,
    pub g_rho4: f64,
    pub g_z4: f64,
    pub g_44: f64,
}

impl CylindricalComponents {
    /// Reassembles the Cartesian matrix at azimuth `phi`.
    pub fn to_cartesian(&self, phi: f64) -> GreensMatrix {
        let (s, c) = phi.sin_cos();
        let m = {
            let (grr, gff) = (self.g_rhorho, self.g_phiphi);
            let mut m = [[0.0; 4]; 4];
            m[0][0] = grr * c * c + gff * s * s;
            m[1][1] = grr * s * s + gff * c * c;
            m[0][1] = (grr - gff) * s * c;
            m[1][0] = m[0][1];
            m[0][2] = self.g_rhoz * c;
            m[2][0] = m[0][2];
            m[1][2] = self.g_rhoz * s;
            m[2][1] = m[1][2];
            m[0][3] = self.g_rho4 * c;
            m[3][0] = m[0][3];
            m[1][3] = self.g_rho4 * s;
            m[3][1] = m[1][3];
            m[2][2] = self.g_zz;
            m[2][3] = self.g_z4;
            m[3][2] = m[2][3];
            m[3][3] = self.g_44;
            m
        };
        GreensMatrix {
            position: [self.rho * c, self.rho * s, self.z],
            matrix: m,
        }
    }
}

/// Per-root residue data: the root itself and every kernel evaluated at its
/// negative, divided by the residue weight.
#[derive(Debug, Clone, Copy)]
struct RootTerm {
    root: Complex64,
    lam_bperp: Complex64,
    lam_b: Complex64,
    gam_b: Complex64,
    gam_bc: Complex64,
    gam_b4: Complex64,
    lam_c: Complex64,
    lam_c4: Complex64,
    lam_4: Complex64,
}

/// Evaluator with the spectrum and all residue coefficients precomputed.
/// Construction does all material-dependent work; evaluation is per point,
/// immutable and safe to share across threads.
#[derive(Debug, Clone)]
pub struct GreensEvaluator {
    moduli: MaterialModuli,
    tensors: CartesianModuli,
    spectrum: CharacteristicSpectrum,
    terms: [RootTerm; 4],
}

/// Running complex sum that tracks its largest term, so the imaginary residue
/// can be judged against what was actually summed.
#[derive(Clone, Copy, Default)]
struct TrackedSum {
    sum: Complex64,
    peak: f64,
}

impl TrackedSum {
    fn add(&mut self, term: Complex64) {
        self.sum += term;
        self.peak = self.peak.max(term.norm());
    }

    fn real(&self, what: &str) -> Result<f64> {
        let im = self.sum.im.abs();
        if im > REALNESS_TOL * self.peak.max(f64::MIN_POSITIVE) {
            return Err(Error::Inconsistency(format!(
                "root sum {what} lost realness (im {im:.3e}, term scale {:.3e})",
                self.peak
            )));
        }
        Ok(self.sum.re)
    }
}

impl GreensEvaluator {
    pub fn new(m: &MaterialModuli) -> Result<Self> {
        let spectrum = solve_spectrum(m)?;
        Self::from_spectrum(m, spectrum)
    }

    /// Builds from a spectrum already solved for the same constants.
    pub fn from_spectrum(m: &MaterialModuli, spectrum: CharacteristicSpectrum) -> Result<Self> {
        if spectrum.degeneracy_gap < DEGENERACY_THRESHOLD {
            return Err(Error::DegenerateSpectrum {
                gap: spectrum.degeneracy_gap,
                threshold: DEGENERACY_THRESHOLD,
            });
        }
        let kernels = KernelSet::new(m)?;
        let tensors = m.expand()?;
        let pref = 4.0 * std::f64::consts::PI * spectrum.coeff_a * m.c66;
        let mut terms = [RootTerm {
            root: Complex64::default(),
            lam_bperp: Complex64::default(),
            lam_b: Complex64::default(),
            gam_b: Complex64::default(),
            gam_bc: Complex64::default(),
            gam_b4: Complex64::default(),
            lam_c: Complex64::default(),
            lam_c4: Complex64::default(),
            lam_4: Complex64::default(),
        }; 4];
        for l in 0..4 {
            let root = spectrum.roots[l];
            let mut weight = Complex64::new(pref, 0.0);
            for j in 0..4 {
                if j != l {
                    weight *= spectrum.roots[j] - root;
                }
            }
            let at = -root;
            terms[l] = RootTerm {
                root,
                lam_bperp: kernels.lambda_bperp(at) / weight,
                lam_b: kernels.lambda_b(at) / weight,
                gam_b: kernels.gamma_b(at) / weight,
                gam_bc: kernels.gamma_bc(at) / weight,
                gam_b4: kernels.gamma_b4(at) / weight,
                lam_c: kernels.lambda_c(at) / weight,
                lam_c4: kernels.lambda_c4(at) / weight,
                lam_4: kernels.lambda_4(at) / weight,
            };
        }
        Ok(Self {
            moduli: *m,
            tensors,
            spectrum,
            terms,
        })
    }

    pub fn moduli(&self) -> &MaterialModuli {
        &self.moduli
    }

    pub fn spectrum(&self) -> &CharacteristicSpectrum {
        &self.spectrum
    }

    pub fn tensors(&self) -> &CartesianModuli {
        &self.tensors
    }

    /// Full Cartesian matrix; closed form away from the symmetry axis,
    /// angular quadrature within `AXIS_SWITCH_RATIO` of it.
    pub fn cartesian(&self, point: [f64; 3]) -> Result<GreensMatrix> {
        let [x, y, z] = point;
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::NonFinitePoint);
        }
        let rho2 = x * x + y * y;
        let r2 = rho2 + z * z;
        if r2 == 0.0 {
            return Err(Error::OriginSingularity);
        }
        if rho2.sqrt() < AXIS_SWITCH_RATIO * r2.sqrt() {
            self.via_quadrature(point, NEAR_AXIS_NODES)
        } else {
            self.closed_form(point)
        }
    }

    /// Evaluates many points, in parallel, preserving input order. Results
    /// are bitwise identical to a sequential pointwise loop.
    pub fn batch(&self, points: &[[f64; 3]]) -> Result<Vec<GreensMatrix>> {
        let results: Vec<Result<GreensMatrix>> =
            points.par_iter().map(|p| self.cartesian(*p)).collect();
        let mut out = Vec::with_capacity(results.len());
        for (index, r) in results.into_iter().enumerate() {
            match r {
                Ok(g) => out.push(g),
                Err(e) => {
                    return Err(Error::AtPoint {
                        index,
                        source: Box::new(e),
                    })
                }
            }
        }
        Ok(out)
    }

    /// The seven cylindrical components at `(rho, z)`, `rho >= 0`.
    pub fn cylindrical(&self, rho: f64, z: f64) -> Result<CylindricalComponents> {
        if !(rho.is_finite() && z.is_finite()) {
            return Err(Error::NonFinitePoint);
        }
        if rho < 0.0 {
            return Err(Error::Inconsistency(
                "cylindrical radius must be nonnegative".into(),
            ));
        }
        let r = rho.hypot(z);
        if r == 0.0 {
            return Err(Error::OriginSingularity);
        }
        if rho < AXIS_SWITCH_RATIO * r {
            // Quadrature in the xz-plane; at phi = 0 the Cartesian axes align
            // with the cylindrical ones.
            let g = self.via_quadrature([rho, 0.0, z], NEAR_AXIS_NODES)?;
            let m = &g.matrix;
            return Ok(CylindricalComponents {
                rho,
                z,
                g_rhorho: m[0][0],
                g_phiphi: m[1][1],
                g_rhoz: m[0][2],
                g_zz: m[2][2],
                g_rho4: m[0][3],
                g_z4: m[2][3],
                g_44: m[3][3],
            });
        }
        let s = self.root_sums(rho * rho, z * z)?;
        let z2_in_rho2 = z * z / (rho * rho);
        Ok(CylindricalComponents {
            rho,
            z,
            g_phiphi: s.lam_b + z2_in_rho2 * s.gam_b,
            g_rhorho: s.lam_bperp - z2_in_rho2 * s.gam_b,
            g_rhoz: -(z / rho) * s.gam_bc,
            g_zz: s.lam_c,
            g_rho4: -(z / rho) * s.gam_b4,
            g_z4: s.lam_c4,
            g_44: s.lam_4,
        })
    }

    /// Closed form regardless of axis proximity. Public as a diagnostic for
    /// path-agreement studies; `cartesian` is the right entry point for
    /// ordinary use.
    pub fn closed_form(&self, point: [f64; 3]) -> Result<GreensMatrix> {
        let [x, y, z] = point;
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::NonFinitePoint);
        }
        let rho2 = x * x + y * y;
        let z2 = z * z;
        if rho2 + z2 == 0.0 {
            return Err(Error::OriginSingularity);
        }
        if rho2 == 0.0 {
            return Err(Error::Inconsistency(
                "closed-form path is singular on the symmetry axis; use the quadrature path"
                    .into(),
            ));
        }
        let s = self.root_sums(rho2, z2)?;
        let inv_rho2 = 1.0 / rho2;
        let inv_rho4 = inv_rho2 * inv_rho2;
        let mut m = [[0.0; 4]; 4];
        m[0][0] = -(x * x * z2 * inv_rho4) * s.gam_b + (y * y * inv_rho4) * s.gam_b_r2 + s.lam_bperp;
        m[1][1] = -(y * y * z2 * inv_rho4) * s.gam_b + (x * x * inv_rho4) * s.gam_b_r2 + s.lam_bperp;
        m[0][1] = -(x * y * inv_rho4) * (s.gam_b_r2 + z2 * s.gam_b);
        m[1][0] = m[0][1];
        m[0][2] = -(x * z * inv_rho2) * s.gam_bc;
        m[2][0] = m[0][2];
        m[1][2] = -(y * z * inv_rho2) * s.gam_bc;
        m[2][1] = m[1][2];
        m[0][3] = -(x * z * inv_rho2) * s.gam_b4;
        m[3][0] = m[0][3];
        m[1][3] = -(y * z * inv_rho2) * s.gam_b4;
        m[3][1] = m[1][3];
        m[2][2] = s.lam_c;
        m[2][3] = s.lam_c4;
        m[3][2] = m[2][3];
        m[3][3] = s.lam_4;
        GreensMatrix::new_symmetrized(point, m)
    }

    /// Angular-quadrature evaluation with an explicit node count.
    pub fn via_quadrature(&self, point: [f64; 3], n_nodes: usize) -> Result<GreensMatrix> {
        quadrature::integrate(&self.tensors, point, n_nodes)
    }

    fn root_sums(&self, rho2: f64, z2: f64) -> Result<RealSums> {
        let mut lam_bperp = TrackedSum::default();
        let mut lam_b = TrackedSum::default();
        let mut gam_b = TrackedSum::default();
        let mut gam_b_r2 = TrackedSum::default();
        let mut gam_bc = TrackedSum::default();
        let mut gam_b4 = TrackedSum::default();
        let mut lam_c = TrackedSum::default();
        let mut lam_c4 = TrackedSum::default();
        let mut lam_4 = TrackedSum::default();
        for t in &self.terms {
            // Principal branch: conjugate roots give conjugate factors.
            let r2 = t.root * rho2 + z2;
            let q = r2.sqrt().finv();
            lam_bperp.add(t.lam_bperp * q);
            lam_b.add(t.lam_b * q);
            gam_b.add(t.gam_b * q);
            gam_b_r2.add(t.gam_b * r2 * q);
            gam_bc.add(t.gam_bc * q);
            gam_b4.add(t.gam_b4 * q);
            lam_c.add(t.lam_c * q);
            lam_c4.add(t.lam_c4 * q);
            lam_4.add(t.lam_4 * q);
        }
        Ok(RealSums {
            lam_bperp: lam_bperp.real("lambda_bperp")?,
            lam_b: lam_b.real("lambda_b")?,
            gam_b: gam_b.real("gamma_b")?,
            gam_b_r2: gam_b_r2.real("gamma_b * (a rho^2 + z^2)")?,
            gam_bc: gam_bc.real("gamma_bc")?,
            gam_b4: gam_b4.real("gamma_b4")?,
            lam_c: lam_c.real("lambda_c")?,
            lam_c4: lam_c4.real("lambda_c4")?,
            lam_4: lam_4.real("lambda_4")?,
        })
    }
}

struct RealSums {
    lam_bperp: f64,
    lam_b: f64,
    gam_b: f64,
    gam_b_r2: f64,
    gam_bc: f64,
    gam_b4: f64,
    lam_c: f64,
    lam_c4: f64,
    lam_4: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::{sample_nondegenerate, sample_point};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zno_evaluator() -> GreensEvaluator {
        GreensEvaluator::new(&MaterialModuli::zno()).unwrap()
    }

    #[test]
    fn construction_rejects_invalid_materials() {
        let bad = MaterialModuli {
            c44: -1.0,
            ..MaterialModuli::zno()
        };
        assert!(matches!(
            GreensEvaluator::new(&bad),
            Err(Error::InvalidMaterial(_))
        ));
    }

    #[test]
    fn isotropic_dielectric_corner_is_coulombic() {
        let eta = 8.85e-11;
        let m = MaterialModuli {
            eta11: eta,
            eta33: eta,
            ..MaterialModuli::zno().zero_piezo()
        };
        let ev = GreensEvaluator::new(&m).unwrap();
        for (rho, z) in [(1.0, 0.0), (0.4, -0.9), (2.0, 1.3)] {
            let comps = ev.cylindrical(rho, z).unwrap();
            let want = -1.0 / (4.0 * std::f64::consts::PI * eta * rho.hypot(z));
            assert!(
                (comps.g_44 - want).abs() <= 1e-12 * want.abs(),
                "{} vs {want}",
                comps.g_44
            );
        }
    }

    #[test]
    fn decoupled_material_has_zero_potential_column() {
        let ev = GreensEvaluator::new(&MaterialModuli::zno().zero_piezo()).unwrap();
        let g = ev.cartesian([0.8, -0.3, 0.5]).unwrap();
        for i in 0..3 {
            assert_eq!(g.matrix[i][3], 0.0);
            assert_eq!(g.matrix[3][i], 0.0);
        }
    }

    #[test]
    fn origin_and_nan_points_error() {
        let ev = zno_evaluator();
        assert!(matches!(
            ev.cartesian([0.0; 3]),
            Err(Error::OriginSingularity)
        ));
        assert!(matches!(
            ev.cartesian([f64::NAN, 0.0, 1.0]),
            Err(Error::NonFinitePoint)
        ));
        assert!(matches!(
            ev.cylindrical(0.0, 0.0),
            Err(Error::OriginSingularity)
        ));
    }

    #[test]
    fn closed_form_matches_the_quadrature_oracle() {
        let ev = zno_evaluator();
        for p in [[1.0, 0.0, 0.5], [-0.4, 0.8, -1.2], [0.3, 0.3, 2.0]] {
            let cf = ev.closed_form(p).unwrap();
            let or = ev.via_quadrature(p, 1024).unwrap();
            let dev = relative_deviation(&cf, &or);
            assert!(dev <= 1e-9, "deviation {dev:.3e} at {p:?}");
        }
    }

    #[test]
    fn cylindrical_assembly_reproduces_the_cartesian_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0041);
        for _ in 0..25 {
            let m = sample_nondegenerate(&mut rng);
            let ev = GreensEvaluator::new(&m).unwrap();
            let p = sample_point(&mut rng);
            let rho = p[0].hypot(p[1]);
            let phi = p[1].atan2(p[0]);
            let comps = ev.cylindrical(rho, p[2]).unwrap();
            let assembled = comps.to_cartesian(phi);
            let direct = ev.cartesian(p).unwrap();
            let dev = relative_deviation(&assembled, &direct);
            assert!(dev <= 1e-12, "deviation {dev:.3e} at {p:?} for {m:?}");
        }
    }

    #[test]
    fn on_axis_requests_are_served_by_quadrature() {
        let ev = zno_evaluator();
        let g = ev.cartesian([0.0, 0.0, 1.0]).unwrap();
        let direct = ev.via_quadrature([0.0, 0.0, 1.0], NEAR_AXIS_NODES).unwrap();
        assert_eq!(g.matrix, direct.matrix);
        assert!(matches!(
            ev.closed_form([0.0, 0.0, 1.0]),
            Err(Error::Inconsistency(_))
        ));
    }

    #[test]
    fn batch_is_bitwise_equal_to_the_pointwise_loop() {
        let ev = zno_evaluator();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0042);
        let mut points = Vec::new();
        for _ in 0..100_000 {
            points.push(sample_point(&mut rng));
        }
        // Repeated point: identical input must give identical output.
        points[17] = points[3];
        let batch = ev.batch(&points).unwrap();
        for (i, p) in points.iter().enumerate().step_by(997) {
            let single = ev.cartesian(*p).unwrap();
            assert_eq!(batch[i].matrix, single.matrix, "point {i}");
        }
        assert_eq!(batch[17].matrix, batch[3].matrix);
    }

    #[test]
    fn batch_reports_the_first_offending_point() {
        let ev = zno_evaluator();
        let points = vec![[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        match ev.batch(&points) {
            Err(Error::AtPoint { index, source }) => {
                assert_eq!(index, 1);
                assert!(matches!(*source, Error::OriginSingularity));
            }
            other => panic!("expected indexed error, got {other:?}"),
        }
    }

    #[test]
    fn switch_boundary_paths_agree() {
        let ev = zno_evaluator();
        let r = 1.3;
        for dir in [[1.0, 0.0], [0.6, -0.8]] {
            let ratio = AXIS_SWITCH_RATIO * 1.01;
            let rho = ratio * r;
            let z = (r * r - rho * rho).sqrt();
            let p = [dir[0] * rho, dir[1] * rho, z];
            let cf = ev.closed_form(p).unwrap();
            let or = ev.via_quadrature(p, NEAR_AXIS_NODES).unwrap();
            let dev = relative_deviation(&cf, &or);
            assert!(dev <= 1e-7, "paths diverge at the switch: {dev:.3e}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn structural_invariants(seed in any::<u64>(), lambda in 0.3f64..3.0, theta in -3.0f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = sample_nondegenerate(&mut rng);
            let ev = GreensEvaluator::new(&m).unwrap();
            let p = sample_point(&mut rng);
            let g = ev.cartesian(p).unwrap();

            // Symmetry.
            prop_assert!(g.symmetry_deviation() <= 1e-10);

            // Degree -1 homogeneity.
            let scaled = ev.cartesian([lambda * p[0], lambda * p[1], lambda * p[2]]).unwrap();
            let mut back = scaled;
            for row in back.matrix.iter_mut() {
                for v in row.iter_mut() {
                    *v *= lambda;
                }
            }
            prop_assert!(relative_deviation(&back, &g) <= 1e-11);

            // Equivariance under rotations about the symmetry axis.
            let (s, c) = theta.sin_cos();
            let q = [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]];
            let g_rot = ev.cartesian(q).unwrap();
            let rot = [[c, -s, 0.0, 0.0], [s, c, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
            let mut conj = [[0.0; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        for l in 0..4 {
                            conj[i][j] += rot[i][k] * g.matrix[k][l] * rot[j][l];
                        }
                    }
                }
            }
            let conj = GreensMatrix { position: q, matrix: conj };
            prop_assert!(relative_deviation(&g_rot, &conj) <= 1e-11);

            // Mirror parity across the basal plane: radial-axial and
            // axial-potential couplings are odd, everything else even.
            let g_mirror = ev.cartesian([p[0], p[1], -p[2]]).unwrap();
            let parity = [
                [1.0, 1.0, -1.0, -1.0],
                [1.0, 1.0, -1.0, -1.0],
                [-1.0, -1.0, 1.0, 1.0],
                [-1.0, -1.0, 1.0, 1.0],
            ];
            let mut expected = g;
            for i in 0..4 {
                for j in 0..4 {
                    expected.matrix[i][j] *= parity[i][j];
                }
            }
            expected.position = [p[0], p[1], -p[2]];
            prop_assert!(relative_deviation(&g_mirror, &expected) <= 1e-11);
        }
    }
}
