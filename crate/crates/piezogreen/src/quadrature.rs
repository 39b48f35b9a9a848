//! Angular-quadrature reference evaluation.
//!
//! Over directions orthogonal to the field point the inverse symbol matrix
//! integrates to the Green's matrix:
//!
//! `G(r) = 1/(8 pi^2 |r|) * int_0^{2pi} inv(T(e1 cos a + e2 sin a)) da`
//!
//! with `(e1, e2, r/|r|)` any right-handed orthonormal frame. The integrand is
//! smooth and 2pi-periodic, so the plain trapezoid rule converges spectrally.
//! This path never touches the kernel polynomials or the characteristic
//! roots; it exists to cross-check the closed form and to serve evaluation
//! requests close to the symmetry axis, where the closed form loses digits.

use crate::error::{Error, Result};
use crate::greens::GreensMatrix;
use crate::kernels::assemble_toperator;
use crate::linalg::invert4;
use crate::material::CartesianModuli;

/// Equilibrated condition estimate above which a node inversion is reported
/// as suspect. The estimate is taken after conjugating the symbol by
/// `diag(1, 1, 1, s)` with `s^2` the stiffness/permittivity scale ratio;
/// without that, the ~21 decades separating Pa from F/m would trip the
/// warning at every healthy direction.
pub const CONDITION_WARN_THRESHOLD: f64 = 1e12;

/// Right-handed orthonormal frame adapted to a field point: `e3` points along
/// it, `e1` and `e2` span the orthogonal plane the quadrature walks around.
#[derive(Debug, Clone, Copy)]
pub struct AngularFrame {
    pub e1: [f64; 3],
    pub e2: [f64; 3],
    pub e3: [f64; 3],
    pub rho: f64,
    pub r: f64,
}

/// On-axis fallback threshold for the frame construction; below this the
/// azimuth of the point is numerically meaningless anyway.
const FRAME_AXIS_RATIO: f64 = 1e-12;

/// Scale factors for the condition diagnostic only; inverses are always
/// computed from the raw matrix.
fn equilibration_scales(cm: &CartesianModuli) -> [f64; 4] {
    let c_scale = cm
        .c
        .iter()
        .flatten()
        .flatten()
        .flatten()
        .fold(0.0f64, |s, v| s.max(v.abs()));
    let eta_scale = cm.eta[0][0].max(cm.eta[2][2]);
    [1.0, 1.0, 1.0, (c_scale / eta_scale).sqrt()]
}

/// Infinity-norm condition of `diag(scales) * t * diag(scales)`, computed
/// from the already-inverted raw matrix.
fn equilibrated_condition(
    scales: &[f64; 4],
    t: &[[f64; 4]; 4],
    inv: &[[f64; 4]; 4],
) -> f64 {
    let mut norm_t = 0.0f64;
    let mut norm_inv = 0.0f64;
    for p in 0..4 {
        let mut row_t = 0.0;
        let mut row_inv = 0.0;
        for q in 0..4 {
            row_t += (t[p][q] * scales[p] * scales[q]).abs();
            row_inv += (inv[p][q] / (scales[p] * scales[q])).abs();
        }
        norm_t = norm_t.max(row_t);
        norm_inv = norm_inv.max(row_inv);
    }
    norm_t * norm_inv
}

pub fn frame_at(point: [f64; 3]) -> Result<AngularFrame> {
    let [x, y, z] = point;
    if !(x.is_finite() && y.is_finite() && z.is_finite()) {
        return Err(Error::NonFinitePoint);
    }
    let rho = x.hypot(y);
    let r = rho.hypot(z);
    if r == 0.0 {
        return Err(Error::OriginSingularity);
    }
    let e3 = [x / r, y / r, z / r];
    if rho < FRAME_AXIS_RATIO * r {
        // Any in-plane pair works on the axis; e2 = e3 x e1 keeps the frame
        // right handed for either axis direction.
        let e1 = [1.0, 0.0, 0.0];
        let e2 = [0.0, e3[2], -e3[1]];
        return Ok(AngularFrame { e1, e2, e3, rho, r });
    }
    let e1 = [-y / rho, x / rho, 0.0];
    let e2 = [-z * x / (rho * r), -z * y / (rho * r), rho * rho / (rho * r)];
    Ok(AngularFrame { e1, e2, e3, rho, r })
}

/// Periodic-trapezoid evaluation of the angular representation with
/// `n_nodes` equispaced nodes. Even counts of at least 8 only: the integrand
/// has period pi in exact arithmetic and an even count keeps the sampling
/// symmetric.
pub fn integrate(cm: &CartesianModuli, point: [f64; 3], n_nodes: usize) -> Result<GreensMatrix> {
    if n_nodes < 8 || !n_nodes.is_multiple_of(2) {
        return Err(Error::InvalidNodeCount(n_nodes));
    }
    let frame = frame_at(point)?;
    let mut acc = [[0.0f64; 4]; 4];
    let mut worst_cond = 0.0f64;
    let scales = equilibration_scales(cm);
    let step = 2.0 * std::f64::consts::PI / n_nodes as f64;
    for k in 0..n_nodes {
        let alpha = step * k as f64;
        let (s, c) = alpha.sin_cos();
        let xi = [
            frame.e1[0] * c + frame.e2[0] * s,
            frame.e1[1] * c + frame.e2[1] * s,
            frame.e1[2] * c + frame.e2[2] * s,
        ];
        let t = assemble_toperator(cm, xi);
        let (inv, _) = invert4(&t).ok_or(Error::SingularNode { node: k, alpha })?;
        worst_cond = worst_cond.max(equilibrated_condition(&scales, &t, &inv));
        for p in 0..4 {
            for q in 0..4 {
                acc[p][q] += inv[p][q];
            }
        }
    }
    if worst_cond > CONDITION_WARN_THRESHOLD {
        log::warn!(
            "angular quadrature hit condition estimate {worst_cond:.3e} at point {point:?}"
        );
    }
    // step / (8 pi^2 r) collapses to 1/(4 pi r n).
    let w = 1.0 / (4.0 * std::f64::consts::PI * frame.r * n_nodes as f64);
    for row in acc.iter_mut() {
        for v in row.iter_mut() {
            *v *= w;
        }
    }
    GreensMatrix::new_symmetrized(point, acc)
}
