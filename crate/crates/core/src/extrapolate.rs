//! Sequence acceleration and convergence diagnostics.

use serde::Serialize;

/// Fits `f(N) = c + Σ_j a_j N^{−p_j}` through the given points and
/// returns `c`. Needs `points.len() == powers.len() + 1`.
pub fn richardson(points: &[(f64, f64)], powers: &[f64]) -> Option<f64> {
    let m = powers.len() + 1;
    if points.len() != m {
        return None;
    }
    let mut a = vec![vec![0.0; m + 1]; m];
    for (row, &(n, v)) in a.iter_mut().zip(points) {
        row[0] = 1.0;
        for (j, p) in powers.iter().enumerate() {
            row[j + 1] = n.powf(-p);
        }
        row[m] = v;
    }
    let sol = solve(a)?;
    Some(sol[0])
}

fn solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let m = a.len();
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..=m {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    Some((0..m).map(|i| a[i][m] / a[i][i]).collect())
}

/// Richardson value with an error estimate taken from the spread against
/// the fit that drops the highest correction term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Extrapolated {
    pub value: f64,
    pub error: f64,
    pub raw: f64,
}

pub fn richardson_with_error(points: &[(f64, f64)], powers: &[f64]) -> Extrapolated {
    let raw = points.last().map(|p| p.1).unwrap_or(f64::NAN);
    let n = points.len();
    let full = richardson(points, powers);
    let reduced = if n >= 2 && !powers.is_empty() {
        richardson(&points[1..], &powers[..powers.len() - 1])
    } else {
        None
    };
    match (full, reduced) {
        (Some(v), Some(r)) if v.is_finite() => Extrapolated {
            value: v,
            error: (v - r).abs(),
            raw,
        },
        (Some(v), None) if v.is_finite() => Extrapolated {
            value: v,
            error: (v - raw).abs(),
            raw,
        },
        _ => Extrapolated {
            value: raw,
            error: f64::INFINITY,
            raw,
        },
    }
}

/// Aitken's Δ² on the last three terms of a sequence.
pub fn aitken(xs: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 3 {
        return None;
    }
    let (a, b, c) = (xs[n - 3], xs[n - 2], xs[n - 1]);
    let d1 = b - a;
    let d2 = c - b;
    let den = d2 - d1;
    if den == 0.0 || !den.is_finite() {
        return Some(c);
    }
    let r = d2 / d1;
    if !(r.abs() < 1.0) {
        return None;
    }
    Some(c - d2 * d2 / den)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Convergence {
    pub declared: bool,
    pub last: f64,
    /// Differences between consecutive evaluations.
    pub increments: Vec<f64>,
    pub note: String,
}

/// A limit is declared when the last three values differ pairwise by less
/// than `tol` and the absolute increments shrink.
pub fn diagnose(values: &[f64], tol: f64) -> Convergence {
    let increments: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let last = values.last().copied().unwrap_or(f64::NAN);
    let n = values.len();
    if n < 3 {
        return Convergence {
            declared: false,
            last,
            increments,
            note: "fewer than three evaluations".into(),
        };
    }
    let tail = &values[n - 3..];
    let close = (0..3).all(|i| (0..3).all(|j| (tail[i] - tail[j]).abs() < tol));
    let k = increments.len();
    let shrinking = increments[k - 1].abs() <= increments[k - 2].abs() || increments[k - 1].abs() < 1e-15;
    let declared = close && shrinking;
    Convergence {
        declared,
        last,
        increments,
        note: if declared {
            "converged".into()
        } else {
            "not converged at horizon".into()
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_removes_power_terms() {
        let f = |n: f64| 2.0 + 3.0 / n.sqrt() - 1.0 / n + 0.5 * n.powf(-1.5);
        let pts: Vec<(f64, f64)> = [1000.0, 2000.0, 4000.0, 8000.0].iter().map(|&n| (n, f(n))).collect();
        let e = richardson_with_error(&pts, &[0.5, 1.0, 1.5]);
        assert!((e.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn aitken_on_geometric_sequence() {
        let xs: Vec<f64> = (0..5).map(|k| 1.0 - 0.6f64.powi(k)).collect();
        assert!((aitken(&xs).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(aitken(&[1.0, 2.0, 4.0]), None);
    }

    #[test]
    fn diagnose_examples() {
        assert!(diagnose(&[1.0, 1.5, 1.75, 1.875, 1.8751, 1.87511], 1e-3).declared);
        assert!(!diagnose(&[1.0, 2.0, 3.0], 1e-3).declared);
    }
}
