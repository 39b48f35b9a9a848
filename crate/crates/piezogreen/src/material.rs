//! Material constants of a hexagonal (transversely isotropic) piezoelectric
//! medium and their expansion into full Cartesian tensors.
//!
//! Everything is SI: elastic stiffness in Pa, piezoelectric stress constants
//! in C/m^2, dielectric permittivity in F/m. The symmetry axis is the
//! Cartesian 3-axis throughout the crate.

use crate::error::{Error, Result};
use std::fmt;
use std::path::Path;

/// The ten independent constants of a hexagonal piezoelectric medium.
///
/// `c11, c33, c44, c66, c13` are the Voigt stiffnesses (with
/// `c12 = c11 - 2 c66` implied), `e15, e31, e33` the piezoelectric stress
/// constants and `eta11, eta33` the dielectric permittivities transverse and
/// parallel to the symmetry axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialModuli {
    pub c11: f64,
    pub c33: f64,
    pub c44: f64,
    pub c66: f64,
    pub c13: f64,
    pub e15: f64,
    pub e31: f64,
    pub e33: f64,
    pub eta11: f64,
    pub eta33: f64,
}

/// One validated inequality, with the offending numbers when it fails.
#[derive(Debug, Clone)]
pub struct ValidationCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of `MaterialModuli::validate`. Collects every check instead of
/// stopping at the first failure.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn failure_summary(&self) -> String {
        self.failures()
            .map(|c| c.detail.as_str())
            .collect::<Vec<_>>()
            .join("; ")
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {}: {}",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

impl MaterialModuli {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        c11: f64,
        c33: f64,
        c44: f64,
        c66: f64,
        c13: f64,
        e15: f64,
        e31: f64,
        e33: f64,
        eta11: f64,
        eta33: f64,
    ) -> Self {
        Self {
            c11,
            c33,
            c44,
            c66,
            c13,
            e15,
            e31,
            e33,
            eta11,
            eta33,
        }
    }

    /// Zinc oxide, a standard strongly coupled hexagonal piezoelectric.
    /// Stiffnesses in GPa-scale Pa, permittivities a few units of 1e-11 F/m.
    pub fn zno() -> Self {
        Self {
            c11: 209.7e9,
            c33: 210.9e9,
            c44: 42.5e9,
            c66: 44.3e9,
            c13: 105.1e9,
            e15: -0.48,
            e31: -0.573,
            e33: 1.32,
            eta11: 7.57e-11,
            eta33: 9.03e-11,
        }
    }

    /// Same elastic and dielectric constants, piezoelectric coupling removed.
    /// In this limit the elastic and electric problems separate.
    pub fn zero_piezo(mut self) -> Self {
        self.e15 = 0.0;
        self.e31 = 0.0;
        self.e33 = 0.0;
        self
    }

    pub fn is_piezo_free(&self) -> bool {
        self.e15 == 0.0 && self.e31 == 0.0 && self.e33 == 0.0
    }

    /// Implied Voigt constant `c12`.
    pub fn c12(&self) -> f64 {
        self.c11 - 2.0 * self.c66
    }

    /// Checks positive definiteness of the stiffness matrix and positivity of
    /// the permittivities. The stiffness conditions are the principal-minor
    /// reduction of the 6x6 Voigt matrix for this symmetry class:
    /// `c44 > 0`, `c66 > 0`, `c11 > c66`, `c33 > 0`, `(c11 - c66) c33 > c13^2`.
    pub fn validate(&self) -> ValidationReport {
        let all = [
            self.c11, self.c33, self.c44, self.c66, self.c13, self.e15, self.e31, self.e33,
            self.eta11, self.eta33,
        ];
        let mut checks = Vec::new();
        let mut push = |name: &'static str, passed: bool, detail: String| {
            checks.push(ValidationCheck {
                name,
                passed,
                detail,
            });
        };

        push(
            "finite",
            all.iter().all(|v| v.is_finite()),
            "all ten constants are finite numbers".into(),
        );
        push(
            "eta11 > 0",
            self.eta11 > 0.0,
            format!("eta11 = {:e}", self.eta11),
        );
        push(
            "eta33 > 0",
            self.eta33 > 0.0,
            format!("eta33 = {:e}", self.eta33),
        );
        push("c44 > 0", self.c44 > 0.0, format!("c44 = {:e}", self.c44));
        push("c66 > 0", self.c66 > 0.0, format!("c66 = {:e}", self.c66));
        push("c33 > 0", self.c33 > 0.0, format!("c33 = {:e}", self.c33));
        push(
            "c11 > c66",
            self.c11 > self.c66,
            format!("c11 - c66 = {:e}", self.c11 - self.c66),
        );
        push(
            "(c11 - c66)*c33 > c13^2",
            (self.c11 - self.c66) * self.c33 > self.c13 * self.c13,
            format!(
                "(c11 - c66)*c33 - c13^2 = {:e}",
                (self.c11 - self.c66) * self.c33 - self.c13 * self.c13
            ),
        );
        ValidationReport { checks }
    }

    /// Errors with the full list of violated inequalities unless the material
    /// is admissible.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.passed() {
            Ok(())
        } else {
            Err(Error::InvalidMaterial(report.failure_summary()))
        }
    }

    /// Expands the ten constants into the full stiffness, piezoelectric and
    /// permittivity tensors.
    pub fn expand(&self) -> Result<CartesianModuli> {
        self.ensure_valid()?;
        Ok(CartesianModuli::from_moduli(self))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        parse_material(&text, &path.display().to_string())
    }
}

/// Full tensors `c_ijkl`, `e_ikl`, `eta_ij` of a hexagonal medium.
/// `e` is indexed electric-first: `e[k][i][j]` couples the field component
/// `k` to the strain pair `(i, j)`.
#[derive(Debug, Clone)]
pub struct CartesianModuli {
    pub c: [[[[f64; 3]; 3]; 3]; 3],
    pub e: [[[f64; 3]; 3]; 3],
    pub eta: [[f64; 3]; 3],
}

/// Voigt pair index: 11->1, 22->2, 33->3, 23->4, 13->5, 12->6 (one-based).
fn voigt(i: usize, j: usize) -> usize {
    if i == j {
        i
    } else {
        6 - i - j
    }
}

impl CartesianModuli {
    fn from_moduli(m: &MaterialModuli) -> Self {
        let c12 = m.c12();
        let mut v = [[0.0; 6]; 6];
        v[0][0] = m.c11;
        v[1][1] = m.c11;
        v[2][2] = m.c33;
        v[0][1] = c12;
        v[0][2] = m.c13;
        v[1][2] = m.c13;
        v[3][3] = m.c44;
        v[4][4] = m.c44;
        v[5][5] = m.c66;
        for i in 0..6 {
            for j in 0..i {
                v[i][j] = v[j][i];
            }
        }

        let mut c = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        c[i][j][k][l] = v[voigt(i, j)][voigt(k, l)];
                    }
                }
            }
        }

        let mut e = [[[0.0; 3]; 3]; 3];
        e[0][0][2] = m.e15;
        e[0][2][0] = m.e15;
        e[1][1][2] = m.e15;
        e[1][2][1] = m.e15;
        e[2][0][0] = m.e31;
        e[2][1][1] = m.e31;
        e[2][2][2] = m.e33;

        let eta = [
            [m.eta11, 0.0, 0.0],
            [0.0, m.eta11, 0.0],
            [0.0, 0.0, m.eta33],
        ];
        Self { c, e, eta }
    }
}

const KEYS: [&str; 10] = [
    "c11", "c33", "c44", "c66", "c13", "e15", "e31", "e33", "eta11", "eta33",
];

/// Parses the `key = value` material format: one constant per line, `#`
/// starts a comment, keys in any order, all ten required exactly once.
pub fn parse_material(text: &str, origin: &str) -> Result<MaterialModuli> {
    let mut values: [Option<f64>; 10] = [None; 10];
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.splitn(2, '=');
        let key = parts.next().unwrap_or("").trim();
        let value = match parts.next() {
            Some(v) => v.trim(),
            None => {
                return Err(Error::Parse {
                    origin: origin.into(),
                    line: lineno,
                    message: format!("expected `key = value`, got `{line}`"),
                })
            }
        };
        let slot = match KEYS.iter().position(|k| *k == key) {
            Some(s) => s,
            None => {
                return Err(Error::Parse {
                    origin: origin.into(),
                    line: lineno,
                    message: format!("unknown key `{key}`"),
                })
            }
        };
        if values[slot].is_some() {
            return Err(Error::Parse {
                origin: origin.into(),
                line: lineno,
                message: format!("duplicate key `{key}`"),
            });
        }
        let parsed: f64 = value.parse().map_err(|_| Error::Parse {
            origin: origin.into(),
            line: lineno,
            message: format!("cannot parse `{value}` as a number"),
        })?;
        values[slot] = Some(parsed);
    }

    let missing: Vec<&str> = KEYS
        .iter()
        .zip(values.iter())
        .filter(|(_, v)| v.is_none())
        .map(|(k, _)| *k)
        .collect();
    if !missing.is_empty() {
        return Err(Error::Parse {
            origin: origin.into(),
            line: text.lines().count(),
            message: format!("missing keys: {}", missing.join(", ")),
        });
    }
    let v = values.map(|x| x.unwrap());
    Ok(MaterialModuli::new(
        v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9],
    ))
}
