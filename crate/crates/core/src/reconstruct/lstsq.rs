//! Least squares for tall two-column systems via a thin QR factorization.
//!
//! For full column rank this is the Moore-Penrose solution `A⁺b`; the
//! condition number `σ_max / σ_min` comes from the closed-form singular
//! values of the 2×2 triangular factor.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoColumnFit {
    /// Least-squares solution; `None` when the columns are linearly dependent.
    pub solution: Option<[f64; 2]>,
    pub cond: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Singular values of `[[a, b], [0, d]]`, largest first.
pub fn triangular_singular_values(a: f64, b: f64, d: f64) -> (f64, f64) {
    let s = a * a + b * b + d * d;
    let det = (a * d).abs();
    let disc = ((s - 2.0 * det) * (s + 2.0 * det)).max(0.0).sqrt();
    let smax = ((s + disc) / 2.0).sqrt();
    let smin = if smax > 0.0 { det / smax } else { 0.0 };
    (smax, smin)
}

pub fn solve(rows: &[[f64; 2]], rhs: &[f64]) -> TwoColumnFit {
    let c0: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let c1: Vec<f64> = rows.iter().map(|r| r[1]).collect();

    let r11 = dot(&c0, &c0).sqrt();
    if r11 == 0.0 {
        return TwoColumnFit {
            solution: None,
            cond: f64::INFINITY,
        };
    }
    let q0: Vec<f64> = c0.iter().map(|x| x / r11).collect();
    let mut r12 = dot(&q0, &c1);
    let mut w: Vec<f64> = c1.iter().zip(&q0).map(|(x, q)| x - r12 * q).collect();
    // One reorthogonalization pass keeps Gram-Schmidt accurate.
    let corr = dot(&q0, &w);
    w.iter_mut().zip(&q0).for_each(|(x, q)| *x -= corr * q);
    r12 += corr;
    let r22 = dot(&w, &w).sqrt();

    let (smax, smin) = triangular_singular_values(r11, r12, r22);
    let cond = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if r22 == 0.0 || !cond.is_finite() {
        return TwoColumnFit {
            solution: None,
            cond: f64::INFINITY,
        };
    }
    let q1: Vec<f64> = w.iter().map(|x| x / r22).collect();
    let y1 = dot(&q1, rhs) / r22;
    let y0 = (dot(&q0, rhs) - r12 * y1) / r11;
    TwoColumnFit {
        solution: Some([y0, y1]),
        cond,
    }
}
