//! Gauss-Legendre rules on `[0, 1]`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result};

pub const MAX_ORDER: usize = 64;

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// A `k`-point Gauss-Legendre rule on `[0, 1]`: nodes strictly increasing in
/// `(0, 1)`, positive weights summing to one, exact for polynomials of degree
/// up to `2k - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Classical Legendre `L_n(t)` and its derivative on `[-1, 1]`.
fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = t;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0) * t * p - jf * p_prev) / (jf + 1.0);
        p_prev = p;
        p = next;
    }
    let nf = n as f64;
    // derivative from (1 - t^2) L_n' = n (L_{n-1} - t L_n); not used at t = +-1
    let dp = nf * (p_prev - t * p) / (1.0 - t * t);
    (p, dp)
}

fn newton_root(n: usize, guess: f64) -> Option<f64> {
    let mut t = guess;
    for _ in 0..NEWTON_MAX_ITER {
        let (p, dp) = legendre_with_derivative(n, t);
        let delta = p / dp;
        t -= delta;
        if !t.is_finite() {
            return None;
        }
        if delta.abs() <= NEWTON_TOL {
            return Some(t);
        }
    }
    None
}

/// Bisection for the `i`-th root (descending) of `L_n`, bracketed between
/// consecutive Chebyshev-Gauss-Lobatto points which are known to interlace
/// with the Legendre roots.
fn bisect_root(n: usize, i: usize) -> f64 {
    let nf = n as f64;
    let mut hi = libm::cos(PI * i as f64 / nf);
    let mut lo = libm::cos(PI * (i as f64 + 1.0) / nf);
    let mut f_lo = legendre_with_derivative(n, lo).0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = legendre_with_derivative(n, mid).0;
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl GaussRule {
    /// Builds the `k`-point rule, `1 <= k <= 64`.
    pub fn new(k: usize) -> Result<Self> {
        if !(1..=MAX_ORDER).contains(&k) {
            return Err(Error::UnsupportedOrder(k));
        }
        // roots t_i of L_k on [-1, 1] in descending order, only the
        // non-negative half is computed and mirrored so the rule is exactly
        // symmetric.
        let half = k.div_ceil(2);
        let mut t_pos = vec![0.0; half];
        let mut w_pos = vec![0.0; half];
        let kf = k as f64;
        for i in 0..half {
            let t = if k % 2 == 1 && i == half - 1 {
                0.0
            } else {
                let guess = libm::cos(PI * (i as f64 + 0.75) / (kf + 0.5));
                newton_root(k, guess).unwrap_or_else(|| bisect_root(k, i))
            };
            let (_, dp) = legendre_with_derivative(k, t);
            t_pos[i] = t;
            w_pos[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }

        let mut nodes = vec![0.0; k];
        let mut weights = vec![0.0; k];
        for i in 0..half {
            // t_pos[i] is the (i+1)-th largest root
            let upper = k - 1 - i;
            nodes[upper] = 0.5 * (1.0 + t_pos[i]);
            nodes[i] = 0.5 * (1.0 - t_pos[i]);
            weights[upper] = 0.5 * w_pos[i];
            weights[i] = 0.5 * w_pos[i];
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);

        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum_l b_l f(c_l)`, approximating `int_0^1 f`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&c, &b)| b * f(c))
            .sum()
    }
}

/// Same as [`GaussRule::new`].
pub fn gauss_rule(k: usize) -> Result<GaussRule> {
    GaussRule::new(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legendre::basis_unchecked;

    #[test]
    fn closed_form_rules() {
        let r = GaussRule::new(1).unwrap();
        assert_eq!(r.nodes(), &[0.5]);
        assert_eq!(r.weights(), &[1.0]);

        let r = GaussRule::new(2).unwrap();
        let d = 3f64.sqrt() / 6.0;
        assert!((r.nodes()[0] - (0.5 - d)).abs() < 1e-15);
        assert!((r.nodes()[1] - (0.5 + d)).abs() < 1e-15);
        assert!((r.weights()[0] - 0.5).abs() < 1e-15);
        assert!((r.weights()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unsupported_orders() {
        assert_eq!(GaussRule::new(0), Err(Error::UnsupportedOrder(0)));
        assert_eq!(GaussRule::new(65), Err(Error::UnsupportedOrder(65)));
        assert!(GaussRule::new(64).is_ok());
    }

    /// Roots by sign-change scanning plus bisection of the shifted basis, weights
    /// from `w = (1 - t^2) / (k L_{k-1}(t))^2` on `[-1, 1]` halved for `[0, 1]`.
    fn bisection_oracle(k: usize) -> (Vec<f64>, Vec<f64>) {
        let f = |x: f64| basis_unchecked(k, x)[k];
        let samples = 20_000;
        let mut nodes = Vec::new();
        let mut prev_x = 0.0;
        let mut prev_f = f(0.0);
        for i in 1..=samples {
            let x = i as f64 / samples as f64;
            let fx = f(x);
            if (fx < 0.0) != (prev_f < 0.0) {
                let (mut a, mut b, mut fa) = (prev_x, x, prev_f);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    let fm = f(m);
                    if (fm < 0.0) == (fa < 0.0) {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                }
                nodes.push(0.5 * (a + b));
            }
            prev_x = x;
            prev_f = fx;
        }
        let weights = nodes
            .iter()
            .map(|&c| {
                let t = 2.0 * c - 1.0;
                // classical L_{k-1}(t) = P_{k-1}(c) / sqrt(2k - 1)
                let lkm1 = basis_unchecked(k - 1, c)[k - 1] / ((2 * k - 1) as f64).sqrt();
                let kf = k as f64;
                0.5 * 2.0 * (1.0 - t * t) / (kf * kf * lkm1 * lkm1)
            })
            .collect();
        (nodes, weights)
    }

    #[test]
    fn four_point_rule_matches_bisection_oracle() {
        let r = GaussRule::new(4).unwrap();
        let (nodes, weights) = bisection_oracle(4);
        assert_eq!(nodes.len(), 4);
        for l in 0..4 {
            assert!((r.nodes()[l] - nodes[l]).abs() < 1e-14, "node {l}");
            assert!((r.weights()[l] - weights[l]).abs() < 1e-14, "weight {l}");
        }
    }

    #[test]
    fn invariants_for_k_up_to_16() {
        for k in 1..=16 {
            let r = GaussRule::new(k).unwrap();
            let sum: f64 = r.weights().iter().sum();
            assert!((sum - 1.0).abs() <= 1e-14, "k={k}");
            for l in 0..k {
                let c = r.nodes()[l];
                assert!(c > 0.0 && c < 1.0);
                assert!(r.weights()[l] > 0.0);
                if l + 1 < k {
                    assert!(r.nodes()[l + 1] > c);
                }
                assert!((c + r.nodes()[k - 1 - l] - 1.0).abs() <= 1e-14);
                assert!((r.weights()[l] - r.weights()[k - 1 - l]).abs() <= 1e-14);
            }
            for d in 0..2 * k {
                let approx = r.integrate(|x| x.powi(d as i32));
                assert!(
                    (approx - 1.0 / (d as f64 + 1.0)).abs() <= 1e-12,
                    "k={k} d={d}"
                );
            }
        }
    }

    #[test]
    fn nodes_interlace() {
        for k in 1..=15 {
            let a = GaussRule::new(k).unwrap();
            let b = GaussRule::new(k + 1).unwrap();
            for l in 0..k {
                assert!(b.nodes()[l] < a.nodes()[l] && a.nodes()[l] < b.nodes()[l + 1]);
            }
        }
    }

    #[test]
    fn large_rules_stay_accurate() {
        for k in [32, 48, 64] {
            let r = GaussRule::new(k).unwrap();
            let approx = r.integrate(libm::cos);
            assert!((approx - libm::sin(1.0)).abs() < 1e-14);
            assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
        }
    }
}
