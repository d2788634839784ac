//! Renewal sequences `u_0 = 1`, `u_m = Σ_k f_k u_{m−k}`.
//!
//! For a step law on `ℕ*`, `u_m` is the probability that the walk ever
//! visits `m`. Short supports use the direct recursion; long ones use an
//! online divide-and-conquer convolution.

use crate::error::{precondition, Result};
use crate::measure::{FftConvolver, Law};

const DIRECT_SUPPORT: usize = 64;
const LEAF: usize = 128;

/// Weights `f_1..f_m` of a law on `ℕ*` (index 0 is zero).
fn positive_weights(f: &Law, m: usize) -> Result<Vec<f64>> {
    if !f.is_strictly_positive() {
        return precondition("renewal sequences need a law supported on positive integers");
    }
    let mut w = vec![0.0; m + 1];
    match f {
        Law::Points(p) => {
            for (k, x) in p.iter() {
                if (k as usize) <= m {
                    w[k as usize] = x;
                }
            }
        }
        other => {
            for (k, x) in w.iter_mut().enumerate().skip(1) {
                *x = other.pmf(k as i64);
            }
        }
    }
    Ok(w)
}

/// `u_0, ..., u_m`.
pub fn renewal_sequence(f: &Law, m: usize) -> Result<Vec<f64>> {
    let w = positive_weights(f, m)?;
    let support = w.iter().rposition(|&x| x != 0.0).unwrap_or(0);
    if support <= DIRECT_SUPPORT {
        return Ok(direct(&w[..=support], m));
    }
    Ok(online(&w, m))
}

fn direct(w: &[f64], m: usize) -> Vec<f64> {
    let mut u = vec![0.0; m + 1];
    u[0] = 1.0;
    for n in 1..=m {
        let top = (w.len() - 1).min(n);
        u[n] = (1..=top).map(|k| w[k] * u[n - k]).sum();
    }
    u
}

fn online(w: &[f64], m: usize) -> Vec<f64> {
    let mut u = vec![0.0; m + 1];
    let mut acc = vec![0.0; m + 1];
    let mut conv = FftConvolver::new();
    solve(0, m + 1, w, &mut u, &mut acc, &mut conv);
    u
}

// On entry acc[n] holds the contributions of u[..l] for n in l..r.
fn solve(l: usize, r: usize, w: &[f64], u: &mut [f64], acc: &mut [f64], conv: &mut FftConvolver) {
    if r - l <= LEAF {
        for n in l..r {
            if n == 0 {
                u[0] = 1.0;
                continue;
            }
            let mut s = acc[n];
            for j in l..n {
                s += u[j] * w[n - j];
            }
            u[n] = s;
        }
        return;
    }
    let mid = l + (r - l) / 2;
    solve(l, mid, w, u, acc, conv);
    let c = conv.convolve(&u[l..mid], &w[..r - l]);
    for n in mid..r {
        acc[n] += c[n - l];
    }
    solve(mid, r, w, u, acc, conv);
}
