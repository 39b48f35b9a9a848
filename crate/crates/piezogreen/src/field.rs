//! Superposition of point sources and discrete post-processing.
//!
//! A generalized source combines a mechanical point force with a point
//! charge; by the sign convention of the operator, the fourth load slot
//! carries *minus* the charge. The response at a field point is the sum of
//! `G(r - r_s) * load_s` over the sources: three displacement components and
//! the electric potential.

use crate::error::{Error, Result};
use crate::greens::GreensEvaluator;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct GeneralizedSource {
    pub position: [f64; 3],
    /// Mechanical force components; the last slot is minus the charge.
    pub load: [f64; 4],
}

impl GeneralizedSource {
    pub fn point_force(position: [f64; 3], force: [f64; 3]) -> Self {
        Self {
            position,
            load: [force[0], force[1], force[2], 0.0],
        }
    }

    pub fn point_charge(position: [f64; 3], charge: f64) -> Self {
        Self {
            position,
            load: [0.0, 0.0, 0.0, -charge],
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    pub position: [f64; 3],
    /// Displacement components and, in the last slot, the potential.
    pub response: [f64; 4],
}

impl FieldSample {
    pub fn displacement(&self) -> [f64; 3] {
        [self.response[0], self.response[1], self.response[2]]
    }

    pub fn potential(&self) -> f64 {
        self.response[3]
    }
}

/// Field of a set of point sources at a set of points, in parallel over
/// points with the source sum kept sequential, so results do not depend on
/// scheduling. The first offending point (by input order) is reported on
/// error; a point sitting exactly on a source names both indices.
pub fn superpose(
    ev: &GreensEvaluator,
    sources: &[GeneralizedSource],
    points: &[[f64; 3]],
) -> Result<Vec<FieldSample>> {
    let one = |point_index: usize, point: &[f64; 3]| -> Result<FieldSample> {
        let mut response = [0.0; 4];
        for (source_index, s) in sources.iter().enumerate() {
            let offset = [
                point[0] - s.position[0],
                point[1] - s.position[1],
                point[2] - s.position[2],
            ];
            if offset == [0.0; 3] {
                return Err(Error::PointOnSource {
                    point_index,
                    source_index,
                });
            }
            let g = ev.cartesian(offset).map_err(|e| Error::AtPoint {
                index: point_index,
                source: Box::new(e),
            })?;
            let u = g.apply(&s.load);
            for k in 0..4 {
                response[k] += u[k];
            }
        }
        Ok(FieldSample {
            position: *point,
            response,
        })
    };
    let results: Vec<Result<FieldSample>> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| one(i, p))
        .collect();
    results.into_iter().collect()
}

/// Parses `x y z F1 F2 F3 F4` rows, one source per line. `#` starts a
/// comment; blank lines are skipped. `origin` names the input in errors.
pub fn parse_sources(text: &str, origin: &str) -> Result<Vec<GeneralizedSource>> {
    parse_rows(text, origin, 7).map(|rows| {
        rows.into_iter()
            .map(|row| GeneralizedSource {
                position: [row[0], row[1], row[2]],
                load: [row[3], row[4], row[5], row[6]],
            })
            .collect()
    })
}

/// Parses `x y z` rows, one field point per line, same comment rules.
pub fn parse_points(text: &str, origin: &str) -> Result<Vec<[f64; 3]>> {
    parse_rows(text, origin, 3).map(|rows| rows.into_iter().map(|r| [r[0], r[1], r[2]]).collect())
}

fn parse_rows(text: &str, origin: &str, width: usize) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != width {
            return Err(Error::Parse {
                origin: origin.into(),
                line: lineno + 1,
                message: format!("expected {width} numbers, found {}", fields.len()),
            });
        }
        let mut row = Vec::with_capacity(width);
        for f in fields {
            match f.parse::<f64>() {
                Ok(v) if v.is_finite() => row.push(v),
                Ok(v) => {
                    return Err(Error::Parse {
                        origin: origin.into(),
                        line: lineno + 1,
                        message: format!("non-finite value {v}"),
                    })
                }
                Err(_) => {
                    return Err(Error::Parse {
                        origin: origin.into(),
                        line: lineno + 1,
                        message: format!("not a number: {f:?}"),
                    })
                }
            }
        }
        out.push(row);
    }
    Ok(out)
}

/// Generalized responses sampled on a regular grid, x index fastest.
#[derive(Debug, Clone)]
pub struct GridField {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub origin: [f64; 3],
    pub values: Vec<[f64; 4]>,
}

impl GridField {
    /// Fills a grid from a per-point function, row by row.
    pub fn from_fn(
        dims: [usize; 3],
        spacing: [f64; 3],
        origin: [f64; 3],
        f: impl Fn([f64; 3]) -> Result<[f64; 4]>,
    ) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidGrid(format!(
                "every axis needs at least one point, got {}x{}x{}",
                dims[0], dims[1], dims[2]
            )));
        }
        if spacing.iter().any(|s| !s.is_finite() || *s <= 0.0) {
            return Err(Error::InvalidGrid(format!(
                "spacings must be finite and positive, got {spacing:?}"
            )));
        }
        if origin.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "origin must be finite, got {origin:?}"
            )));
        }
        let mut grid = Self {
            dims,
            spacing,
            origin,
            values: Vec::with_capacity(dims[0] * dims[1] * dims[2]),
        };
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    grid.values.push(f(grid.position([i, j, k]))?);
                }
            }
        }
        Ok(grid)
    }

    pub fn position(&self, index: [usize; 3]) -> [f64; 3] {
        [
            self.origin[0] + index[0] as f64 * self.spacing[0],
            self.origin[1] + index[1] as f64 * self.spacing[1],
            self.origin[2] + index[2] as f64 * self.spacing[2],
        ]
    }

    fn flat(&self, index: [usize; 3]) -> usize {
        index[0] + self.dims[0] * (index[1] + self.dims[1] * index[2])
    }

    pub fn at(&self, index: [usize; 3]) -> &[f64; 4] {
        &self.values[self.flat(index)]
    }

    /// Central-difference strains and electric field at every interior node.
    /// Output order follows the value layout restricted to the interior.
    pub fn fd_gradients(&self) -> Result<Vec<GradientSample>> {
        let [nx, ny, nz] = self.dims;
        if nx < 3 || ny < 3 || nz < 3 {
            return Err(Error::GridTooSmall { nx, ny, nz });
        }
        let mut out = Vec::with_capacity((nx - 2) * (ny - 2) * (nz - 2));
        for k in 1..nz - 1 {
            for j in 1..ny - 1 {
                for i in 1..nx - 1 {
                    let index = [i, j, k];
                    // grad[axis][component] of the 4-component response.
                    let mut grad = [[0.0; 4]; 3];
                    for (axis, row) in grad.iter_mut().enumerate() {
                        let mut plus = index;
                        let mut minus = index;
                        plus[axis] += 1;
                        minus[axis] -= 1;
                        let vp = self.at(plus);
                        let vm = self.at(minus);
                        let h2 = 2.0 * self.spacing[axis];
                        for c in 0..4 {
                            row[c] = (vp[c] - vm[c]) / h2;
                        }
                    }
                    let mut strain = [[0.0; 3]; 3];
                    for a in 0..3 {
                        for b in 0..3 {
                            strain[a][b] = 0.5 * (grad[b][a] + grad[a][b]);
                        }
                    }
                    let e_field = [-grad[0][3], -grad[1][3], -grad[2][3]];
                    out.push(GradientSample {
                        index,
                        position: self.position(index),
                        strain,
                        e_field,
                    });
                }
            }
        }
        Ok(out)
    }
}

/// Discrete derivatives of the sampled field at one interior grid node.
#[derive(Debug, Clone, Copy)]
pub struct GradientSample {
    pub index: [usize; 3],
    pub position: [f64; 3],
    /// Symmetrized displacement gradient.
    pub strain: [[f64; 3]; 3],
    /// Minus the potential gradient.
    pub e_field: [f64; 3],
}
