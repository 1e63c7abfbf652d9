//! Tiny dense least-squares helpers for coefficient recovery.

/// Least-squares fit of v = c0 + c1 x + c2 x^2 + c3 x^3 over the given
/// points, returned as [c0, c1, c2, c3]. The abscissa is rescaled to O(1)
/// before forming the normal equations; without that the Vandermonde columns
/// on a narrow interval are numerically collinear.
pub fn polyfit3(points: &[(f64, f64)]) -> [f64; 4] {
    let scale = points
        .iter()
        .map(|(x, _)| x.abs())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut ata = [[0.0f64; 4]; 4];
    let mut atv = [0.0f64; 4];
    for &(x, v) in points {
        let u = x / scale;
        let basis = [1.0, u, u * u, u * u * u];
        for i in 0..4 {
            atv[i] += basis[i] * v;
            for j in 0..4 {
                ata[i][j] += basis[i] * basis[j];
            }
        }
    }
    let scaled = solve4(ata, atv);
    let mut out = [0.0f64; 4];
    let mut s = 1.0;
    for (slot, coef) in out.iter_mut().zip(scaled) {
        *slot = coef / s;
        s *= scale;
    }
    out
}

fn solve4(mut m: [[f64; 4]; 4], mut rhs: [f64; 4]) -> [f64; 4] {
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        m.swap(col, piv);
        rhs.swap(col, piv);
        let d = m[col][col];
        for row in (col + 1)..4 {
            let f = m[row][col] / d;
            let pivot_row = m[col];
            for (entry, pv) in m[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *entry -= f * pv;
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut out = [0.0f64; 4];
    for row in (0..4).rev() {
        let mut s = rhs[row];
        for k in (row + 1)..4 {
            s -= m[row][k] * out[k];
        }
        out[row] = s / m[row][row];
    }
    out
}
