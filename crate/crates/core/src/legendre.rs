//! Orthonormal shifted Legendre polynomials on `[0, 1]`.
//!
//! The basis is `P_j(x) = sqrt(2j + 1) * L_j(2x - 1)`, with `L_j` the classical
//! Legendre polynomial, so that `int_0^1 P_i P_j = delta_ij`. Substituting into
//! Bonnet's recurrence `(j+1) L_{j+1} = (2j+1) t L_j - j L_{j-1}` gives
//!
//! ```text
//! P_{j+1}(x) = sqrt(2j+3)/(j+1) * ( sqrt(2j+1) t P_j(x) - j/sqrt(2j-1) P_{j-1}(x) ),   t = 2x - 1
//! ```
//!
//! and `int L_j = (L_{j+1} - L_{j-1}) / (2j+1)` gives the antiderivatives in
//! closed form (the boundary term at `x = 0` vanishes for `j >= 1`):
//!
//! ```text
//! int_0^x P_j = ( P_{j+1}(x)/sqrt(2j+3) - P_{j-1}(x)/sqrt(2j-1) ) / (2 sqrt(2j+1))
//! ```

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::quadrature::GaussRule;
use crate::{Error, Result};

const DOMAIN_SLACK: f64 = 1e-14;

fn check_domain(x: f64) -> Result<f64> {
    if !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&x) {
        return Err(Error::Domain {
            value: x,
            lower: 0.0,
            upper: 1.0,
        });
    }
    Ok(x.clamp(0.0, 1.0))
}

/// Recurrence without the domain check. Also used by the quadrature module,
/// which evaluates outside `[0, 1]` while bracketing roots.
pub(crate) fn basis_unchecked(j_max: usize, x: f64) -> Vec<f64> {
    let t = 2.0 * x - 1.0;
    let mut p = vec![0.0; j_max + 1];
    p[0] = 1.0;
    if j_max >= 1 {
        p[1] = libm::sqrt(3.0) * t;
    }
    for j in 1..j_max {
        let jf = j as f64;
        p[j + 1] = libm::sqrt(2.0 * jf + 3.0) / (jf + 1.0)
            * (libm::sqrt(2.0 * jf + 1.0) * t * p[j] - jf / libm::sqrt(2.0 * jf - 1.0) * p[j - 1]);
    }
    p
}

/// Values `(P_0(x), ..., P_{j_max}(x))`.
pub fn eval_basis(j_max: usize, x: f64) -> Result<Vec<f64>> {
    let x = check_domain(x)?;
    Ok(basis_unchecked(j_max, x))
}

/// Antiderivatives `(int_0^x P_0, ..., int_0^x P_{j_max})`, exact up to rounding.
pub fn eval_antiderivatives(j_max: usize, x: f64) -> Result<Vec<f64>> {
    let x = check_domain(x)?;
    let p = basis_unchecked(j_max + 1, x);
    let mut out = Vec::with_capacity(j_max + 1);
    out.push(x);
    for j in 1..=j_max {
        let jf = j as f64;
        let v = (p[j + 1] / libm::sqrt(2.0 * jf + 3.0) - p[j - 1] / libm::sqrt(2.0 * jf - 1.0))
            / (2.0 * libm::sqrt(2.0 * jf + 1.0));
        out.push(v);
    }
    Ok(out)
}

/// Legendre values and antiderivatives sampled at the nodes of a quadrature rule.
///
/// `values[(l, j)] = P_j(c_l)` and `integrals[(l, j)] = int_0^{c_l} P_j`, for
/// `l < k` and `j < s`.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreTables {
    pub degree_count: usize,
    pub nodes: Vec<f64>,
    pub values: Matrix,
    pub integrals: Matrix,
}

impl LegendreTables {
    pub fn build(s: usize, rule: &GaussRule) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidArgument(
                "at least one basis polynomial is required".into(),
            ));
        }
        let k = rule.len();
        let mut values = Matrix::zeros(k, s);
        let mut integrals = Matrix::zeros(k, s);
        for (l, &c) in rule.nodes().iter().enumerate() {
            values.row_mut(l).copy_from_slice(&eval_basis(s - 1, c)?);
            integrals
                .row_mut(l)
                .copy_from_slice(&eval_antiderivatives(s - 1, c)?);
        }
        Ok(Self {
            degree_count: s,
            nodes: rule.nodes().to_vec(),
            values,
            integrals,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

/// Same as [`LegendreTables::build`].
pub fn build_tables(s: usize, rule: &GaussRule) -> Result<LegendreTables> {
    LegendreTables::build(s, rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn basis_examples() {
        let v = eval_basis(1, 0.5).unwrap();
        assert!(close(v[0], 1.0, 1e-15) && close(v[1], 0.0, 1e-15));

        let v = eval_basis(2, 1.0).unwrap();
        assert!(close(v[1], 3f64.sqrt(), 1e-14));
        assert!(close(v[2], 5f64.sqrt(), 1e-14));

        // P_2(1/4) = sqrt(5) (6/16 - 6/4 + 1) = -sqrt(5)/8
        let v = eval_basis(2, 0.25).unwrap();
        assert!(close(v[1], -3f64.sqrt() / 2.0, 1e-15));
        assert!(close(v[2], -5f64.sqrt() / 8.0, 1e-15));
    }

    #[test]
    fn antiderivative_examples() {
        assert_eq!(eval_antiderivatives(0, 0.7).unwrap(), vec![0.7]);
        let v = eval_antiderivatives(3, 1.0).unwrap();
        assert!(close(v[0], 1.0, 1e-15));
        for x in &v[1..] {
            assert!(x.abs() < 1e-15);
        }
        // int_0^{1/2} sqrt(3)(2t-1) dt = sqrt(3) [t^2 - t]_0^{1/2} = -sqrt(3)/4
        let v = eval_antiderivatives(1, 0.5).unwrap();
        assert!(close(v[1], -3f64.sqrt() / 4.0, 1e-15));
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(eval_basis(2, 1.1), Err(Error::Domain { .. })));
        assert!(matches!(
            eval_antiderivatives(2, -0.01),
            Err(Error::Domain { .. })
        ));
        assert!(eval_basis(2, 1.0 + 5e-15).is_ok());
        assert!(eval_basis(2, f64::NAN).is_err());
    }

    #[test]
    fn tables_for_small_rules() {
        let rule = GaussRule::new(1).unwrap();
        let t = LegendreTables::build(1, &rule).unwrap();
        assert_eq!(t.values.as_slice(), &[1.0]);
        assert_eq!(t.integrals.as_slice(), &[0.5]);

        let rule = GaussRule::new(2).unwrap();
        let t = LegendreTables::build(2, &rule).unwrap();
        for (l, &c) in rule.nodes().iter().enumerate() {
            assert_eq!(t.values[(l, 0)], 1.0);
            assert!(close(
                t.values[(l, 1)],
                3f64.sqrt() * (2.0 * c - 1.0),
                1e-15
            ));
            assert_eq!(t.integrals[(l, 0)], c);
        }
        assert!(LegendreTables::build(0, &rule).is_err());
    }

    #[test]
    fn continuous_orthonormality() {
        // composite 3-point Gauss on 2000 panels: exact for polynomials of
        // degree <= 5 per panel, error far below 1e-10 for degree 20
        let g = [
            (-(0.6f64).sqrt(), 5.0 / 9.0),
            (0.0, 8.0 / 9.0),
            ((0.6f64).sqrt(), 5.0 / 9.0),
        ];
        let panels = 2000;
        let width = 1.0 / panels as f64;
        let mut gram = [[0.0f64; 11]; 11];
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * width;
            for (t, w) in g {
                let x = mid + 0.5 * width * t;
                let v = eval_basis(10, x).unwrap();
                for i in 0..=10 {
                    for j in 0..=10 {
                        gram[i][j] += 0.5 * width * w * v[i] * v[j];
                    }
                }
            }
        }
        for (i, row) in gram.iter().enumerate() {
            for (j, &g) in row.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!(close(g, expected, 1e-10), "({i},{j}) = {g}");
            }
        }
    }

    #[test]
    fn discrete_orthonormality() {
        for k in 1..=16 {
            let rule = GaussRule::new(k).unwrap();
            let vals: Vec<Vec<f64>> = rule
                .nodes()
                .iter()
                .map(|&c| eval_basis(2 * k, c).unwrap())
                .collect();
            for i in 0..2 * k {
                for j in 0..2 * k {
                    if i + j > 2 * k - 1 {
                        continue;
                    }
                    let s: f64 = (0..k)
                        .map(|l| rule.weights()[l] * vals[l][i] * vals[l][j])
                        .sum();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!(close(s, expected, 1e-12), "k={k} ({i},{j}) = {s}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn reflection_symmetry(x in 0.0f64..=1.0) {
            let a = eval_basis(10, x).unwrap();
            let b = eval_basis(10, 1.0 - x).unwrap();
            for j in 0..=10 {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                prop_assert!((b[j] - sign * a[j]).abs() <= 1e-12);
            }
        }

        #[test]
        fn antiderivative_matches_finite_differences(x in 1e-5f64..(1.0 - 1e-5)) {
            let step = 1e-6;
            let hi = eval_antiderivatives(10, x + step).unwrap();
            let lo = eval_antiderivatives(10, x - step).unwrap();
            let p = eval_basis(10, x).unwrap();
            for j in 0..=10 {
                let fd = (hi[j] - lo[j]) / (2.0 * step);
                prop_assert!((fd - p[j]).abs() <= 1e-6, "j={} fd={} p={}", j, fd, p[j]);
            }
        }
    }
}
