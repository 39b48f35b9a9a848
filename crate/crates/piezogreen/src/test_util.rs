//! Shared helpers for the unit tests: admissible-material sampling and small
//! independent oracles (Jacobi eigenvalues, Durand-Kerner roots, tensor
//! rotation). Test-only code; nothing here is reachable from the library.

use crate::material::{CartesianModuli, MaterialModuli};
use num_complex::Complex64;
use rand::Rng;

/// Draws a random admissible material: stiffness constructed to satisfy the
/// positive-definiteness minors, permittivities positive, moderate coupling.
/// Magnitudes match real ceramics so SI conditioning is exercised.
pub fn sample_material(rng: &mut impl Rng) -> MaterialModuli {
    let scale_c: f64 = 1e11;
    let c44 = rng.gen_range(0.2..1.5) * scale_c;
    let c66 = rng.gen_range(0.2..1.5) * scale_c;
    let c11 = c66 + rng.gen_range(0.3..2.0) * scale_c;
    let c33 = rng.gen_range(0.3..2.0) * scale_c;
    let c13_bound = ((c11 - c66) * c33).sqrt();
    let c13 = rng.gen_range(-0.9..0.9) * c13_bound;
    let e_scale = rng.gen_range(0.0..15.0);
    let e15 = rng.gen_range(-1.0..1.0) * e_scale;
    let e31 = rng.gen_range(-1.0..1.0) * e_scale;
    let e33 = rng.gen_range(-1.0..1.0) * e_scale;
    let eta11 = rng.gen_range(0.5..20.0) * 1e-10;
    let eta33 = rng.gen_range(0.5..20.0) * 1e-10;
    MaterialModuli::new(c11, c33, c44, c66, c13, e15, e31, e33, eta11, eta33)
}

/// Like `sample_material` but rejects draws whose characteristic roots are
/// close to degenerate, so closed-form evaluation is well defined.
pub fn sample_nondegenerate(rng: &mut impl Rng) -> MaterialModuli {
    loop {
        let m = sample_material(rng);
        if crate::spectrum::solve_spectrum(&m).is_ok() {
            return m;
        }
    }
}

/// Uniform direction on the unit sphere.
pub fn sample_direction(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            let n = n2.sqrt();
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// A generic off-axis, off-origin evaluation point.
pub fn sample_point(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let d = sample_direction(rng);
        let r = rng.gen_range(0.2..3.0);
        let p = [d[0] * r, d[1] * r, d[2] * r];
        let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
        if rho > 0.05 * r {
            return p;
        }
    }
}

/// Cyclic Jacobi eigenvalue iteration for symmetric 6x6 matrices. Used as an
/// independent positivity oracle for stiffness validation.
pub struct Jacobi6;

impl Jacobi6 {
    pub fn eigenvalues(a: &[[f64; 6]; 6]) -> [f64; 6] {
        let mut m = *a;
        for _sweep in 0..60 {
            let mut off = 0.0;
            for p in 0..6 {
                for q in p + 1..6 {
                    off += m[p][q] * m[p][q];
                }
            }
            if off < 1e-30 * Self::frob2(&m).max(1e-300) {
                break;
            }
            for p in 0..6 {
                for q in p + 1..6 {
                    if m[p][q] == 0.0 {
                        continue;
                    }
                    let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..6 {
                        let mkp = m[k][p];
                        let mkq = m[k][q];
                        m[k][p] = c * mkp - s * mkq;
                        m[k][q] = s * mkp + c * mkq;
                    }
                    for k in 0..6 {
                        let mpk = m[p][k];
                        let mqk = m[q][k];
                        m[p][k] = c * mpk - s * mqk;
                        m[q][k] = s * mpk + c * mqk;
                    }
                }
            }
        }
        [m[0][0], m[1][1], m[2][2], m[3][3], m[4][4], m[5][5]]
    }

    fn frob2(m: &[[f64; 6]; 6]) -> f64 {
        m.iter().flatten().map(|v| v * v).sum()
    }
}

/// Durand-Kerner simultaneous iteration for a monic cubic
/// `t^3 + p t^2 + q t + r`. Independent of the production solver.
pub fn durand_kerner_cubic(p: f64, q: f64, r: f64) -> [Complex64; 3] {
    let f = |t: Complex64| ((t + p) * t + q) * t + r;
    let scale = 1.0 + p.abs().max(q.abs()).max(r.abs());
    let seed = Complex64::new(0.4, 0.9) * scale;
    let mut z = [seed, seed * seed / scale, seed * seed * seed / (scale * scale)];
    for _ in 0..200 {
        let mut next = z;
        for k in 0..3 {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..3 {
                if j != k {
                    denom *= z[k] - z[j];
                }
            }
            next[k] = z[k] - f(z[k]) / denom;
        }
        let shift: f64 = (0..3).map(|k| (next[k] - z[k]).norm()).sum();
        z = next;
        if shift < 1e-15 * scale {
            break;
        }
    }
    z
}

/// Rotates the full tensors by angle `theta` about the 3-axis.
pub fn rotate_moduli(t: &CartesianModuli, theta: f64) -> CartesianModuli {
    let (s, c) = theta.sin_cos();
    let r = [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]];
    let mut out = CartesianModuli {
        c: [[[[0.0; 3]; 3]; 3]; 3],
        e: [[[0.0; 3]; 3]; 3],
        eta: [[0.0; 3]; 3],
    };
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    let mut acc = 0.0;
                    for a in 0..3 {
                        for b in 0..3 {
                            for cc in 0..3 {
                                for d in 0..3 {
                                    acc += r[i][a] * r[j][b] * r[k][cc] * r[l][d] * t.c[a][b][cc][d];
                                }
                            }
                        }
                    }
                    out.c[i][j][k][l] = acc;
                }
                let mut acc = 0.0;
                for a in 0..3 {
                    for b in 0..3 {
                        for cc in 0..3 {
                            acc += r[i][a] * r[j][b] * r[k][cc] * t.e[a][b][cc];
                        }
                    }
                }
                out.e[i][j][k] = acc;
            }
            let mut acc = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    acc += r[i][a] * r[j][b] * t.eta[a][b];
                }
            }
            out.eta[i][j] = acc;
        }
    }
    out
}
