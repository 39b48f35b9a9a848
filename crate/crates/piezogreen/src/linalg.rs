//! Small dense helpers for the 4x4 symbol matrix. Partial-pivot LU is plenty
//! at this size; no external solver is warranted.

/// LU factorization with partial pivoting. Returns (lu, perm, sign) or None
/// when a pivot vanishes exactly.
fn lu4(a: &[[f64; 4]; 4]) -> Option<([[f64; 4]; 4], [usize; 4], f64)> {
    let mut lu = *a;
    let mut perm = [0usize, 1, 2, 3];
    let mut sign = 1.0;
    for k in 0..4 {
        let mut p = k;
        let mut best = lu[k][k].abs();
        for i in k + 1..4 {
            let v = lu[i][k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return None;
        }
        if p != k {
            lu.swap(p, k);
            perm.swap(p, k);
            sign = -sign;
        }
        let piv = lu[k][k];
        for i in k + 1..4 {
            let m = lu[i][k] / piv;
            lu[i][k] = m;
            for j in k + 1..4 {
                lu[i][j] -= m * lu[k][j];
            }
        }
    }
    Some((lu, perm, sign))
}

pub(crate) fn det4(a: &[[f64; 4]; 4]) -> f64 {
    match lu4(a) {
        Some((lu, _, sign)) => sign * lu[0][0] * lu[1][1] * lu[2][2] * lu[3][3],
        None => 0.0,
    }
}

fn inf_norm(a: &[[f64; 4]; 4]) -> f64 {
    a.iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Inverse plus the infinity-norm condition estimate `cond = |A| * |A^-1|`.
pub(crate) fn invert4(a: &[[f64; 4]; 4]) -> Option<([[f64; 4]; 4], f64)> {
    let (lu, perm, _) = lu4(a)?;
    let mut inv = [[0.0; 4]; 4];
    for col in 0..4 {
        // Solve A x = e_col through the permuted LU factors.
        let mut y = [0.0; 4];
        for i in 0..4 {
            let mut s = if perm[i] == col { 1.0 } else { 0.0 };
            for j in 0..i {
                s -= lu[i][j] * y[j];
            }
            y[i] = s;
        }
        for i in (0..4).rev() {
            let mut s = y[i];
            for j in i + 1..4 {
                s -= lu[i][j] * inv[j][col];
            }
            inv[i][col] = s / lu[i][i];
        }
    }
    let cond = inf_norm(a) * inf_norm(&inv);
    Some((inv, cond))
}
