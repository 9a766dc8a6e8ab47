use alloc::format;
use alloc::vec::Vec;

use super::MethodConfig;
use crate::legendre::LegendreTables;
use crate::linalg::Matrix;
use crate::quadrature::GaussRule;
use crate::{Error, Result};

/// Butcher matrix `A = I_s diag(eta) P_s^T Omega` and weights `b` of the
/// `k`-stage Runge-Kutta form of the method, for a given set of coefficient
/// scalings `eta` (one per Legendre coefficient, `eta[0] = 1`).
///
/// With `k = s` and `eta = 1` this is the classical Gauss tableau.
pub fn build_tableau(
    config: &MethodConfig,
    eta: &[f64],
    rule: &GaussRule,
    tables: &LegendreTables,
) -> Result<(Matrix, Vec<f64>)> {
    let (k, s) = (config.k, config.s);
    if rule.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            actual: rule.len(),
        });
    }
    if tables.degree_count != s || tables.node_count() != k || tables.nodes != rule.nodes() {
        return Err(Error::InvalidArgument(format!(
            "tables built for s = {}, k = {} do not match the rule/config",
            tables.degree_count,
            tables.node_count()
        )));
    }
    if eta.len() != s {
        return Err(Error::DimensionMismatch {
            expected: s,
            actual: eta.len(),
        });
    }
    if eta[0] != 1.0 {
        return Err(Error::InvalidArgument("eta[0] must be 1".into()));
    }

    let scaled = tables.integrals.matmul(&Matrix::from_diagonal(eta))?;
    let a = scaled
        .matmul(&tables.values.transpose())?
        .matmul(&Matrix::from_diagonal(rule.weights()))?;
    Ok((a, rule.weights().to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn setup(k: usize, s: usize) -> (MethodConfig, GaussRule, LegendreTables) {
        let cfg = MethodConfig::hbvm(k, s);
        let rule = GaussRule::new(k).unwrap();
        let tables = LegendreTables::build(s, &rule).unwrap();
        (cfg, rule, tables)
    }

    #[test]
    fn two_stage_gauss() {
        let (cfg, rule, tables) = setup(2, 2);
        let (a, b) = build_tableau(&cfg, &[1.0, 1.0], &rule, &tables).unwrap();
        let r = 3f64.sqrt() / 6.0;
        let expected = [[0.25, 0.25 - r], [0.25 + r, 0.25]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[(i, j)] - expected[i][j]).abs() < 1e-15, "({i},{j})");
            }
        }
        assert_eq!(b, vec![0.5, 0.5]);
    }

    #[test]
    fn implicit_midpoint() {
        let (cfg, rule, tables) = setup(1, 1);
        let (a, b) = build_tableau(&cfg, &[1.0], &rule, &tables).unwrap();
        assert_eq!(a.as_slice(), &[0.5]);
        assert_eq!(b, vec![1.0]);
    }

    #[test]
    fn row_sums_are_nodes() {
        for (k, s) in [(4, 2), (6, 3), (12, 6), (5, 5)] {
            let (cfg, rule, tables) = setup(k, s);
            let (a, _) = build_tableau(&cfg, &vec![1.0; s], &rule, &tables).unwrap();
            for l in 0..k {
                let sum: f64 = a.row(l).iter().sum();
                assert!((sum - rule.nodes()[l]).abs() <= 1e-13, "k={k} s={s} l={l}");
            }
        }
    }

    #[test]
    fn mismatches_rejected() {
        let (cfg, rule, tables) = setup(4, 2);
        assert!(build_tableau(&cfg, &[1.0], &rule, &tables).is_err());
        assert!(build_tableau(&cfg, &[0.5, 1.0], &rule, &tables).is_err());
        let other = GaussRule::new(3).unwrap();
        assert!(build_tableau(&cfg, &[1.0, 1.0], &other, &tables).is_err());
    }
}
