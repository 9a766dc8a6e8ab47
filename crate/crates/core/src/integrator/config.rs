use alloc::format;
use alloc::string::String;

use crate::quadrature::MAX_ORDER;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodKind {
    /// `s`-stage Gauss collocation (`k = s`, `eta = 1`).
    Gauss,
    /// Energy-conserving HBVM(k, s) (`eta = 1`).
    Hbvm,
    /// HBVM(k, s) with the top `nu` coefficients rescaled to conserve the
    /// problem's extra invariants.
    Ehbvm,
}

impl MethodKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodKind::Gauss => "gauss",
            MethodKind::Hbvm => "hbvm",
            MethodKind::Ehbvm => "ehbvm",
        }
    }
}

impl core::str::FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss" => Ok(MethodKind::Gauss),
            "hbvm" => Ok(MethodKind::Hbvm),
            "ehbvm" => Ok(MethodKind::Ehbvm),
            other => Err(Error::InvalidConfig(format!("unknown method '{other}'"))),
        }
    }
}

impl core::fmt::Display for MethodKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodConfig {
    pub kind: MethodKind,
    /// Number of Gauss-Legendre quadrature points.
    pub k: usize,
    /// Degree of the polynomial approximation (number of Legendre coefficients).
    pub s: usize,
    /// Fixed-point stopping tolerance, relative to `1 + |y0|_inf`.
    pub fp_tolerance: f64,
    pub max_iterations: usize,
    /// Reciprocal condition number below which the conservation system is
    /// treated as singular and the step falls back to plain HBVM.
    pub singular_gamma_threshold: f64,
}

impl MethodConfig {
    pub const DEFAULT_TOLERANCE: f64 = 1e-14;
    pub const DEFAULT_MAX_ITERATIONS: usize = 100;
    pub const DEFAULT_SINGULAR_THRESHOLD: f64 = 1e-12;

    pub fn new(kind: MethodKind, k: usize, s: usize) -> Self {
        Self {
            kind,
            k,
            s,
            fp_tolerance: Self::DEFAULT_TOLERANCE,
            max_iterations: Self::DEFAULT_MAX_ITERATIONS,
            singular_gamma_threshold: Self::DEFAULT_SINGULAR_THRESHOLD,
        }
    }

    pub fn gauss(s: usize) -> Self {
        Self::new(MethodKind::Gauss, s, s)
    }

    pub fn hbvm(k: usize, s: usize) -> Self {
        Self::new(MethodKind::Hbvm, k, s)
    }

    pub fn ehbvm(k: usize, s: usize) -> Self {
        Self::new(MethodKind::Ehbvm, k, s)
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.fp_tolerance = tol;
        self
    }

    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }

    /// Checks the problem-independent constraints.
    pub fn validate(&self) -> Result<()> {
        if self.s < 1 {
            return Err(Error::InvalidConfig("s must be at least 1".into()));
        }
        if self.k < self.s {
            return Err(Error::InvalidConfig(format!(
                "k = {} must be >= s = {}",
                self.k, self.s
            )));
        }
        if self.k > MAX_ORDER {
            return Err(Error::InvalidConfig(format!(
                "k = {} exceeds {MAX_ORDER}",
                self.k
            )));
        }
        if self.kind == MethodKind::Gauss && self.k != self.s {
            return Err(Error::InvalidConfig(format!(
                "gauss requires k = s (got k = {}, s = {})",
                self.k, self.s
            )));
        }
        if !(self.fp_tolerance > 0.0) {
            return Err(Error::InvalidConfig(
                "fixed-point tolerance must be positive".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "max_iterations must be positive".into(),
            ));
        }
        if !(self.singular_gamma_threshold >= 0.0) {
            return Err(Error::InvalidConfig(
                "singular threshold must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Checks the constraints that depend on the problem's invariant count.
    pub fn validate_for(&self, invariant_count: usize) -> Result<()> {
        self.validate()?;
        if self.kind == MethodKind::Ehbvm && self.s <= invariant_count {
            return Err(Error::InvalidConfig(format!(
                "ehbvm needs s > nu (s = {}, nu = {invariant_count})",
                self.s
            )));
        }
        Ok(())
    }

    /// Number of coefficients that get rescaled for a problem with `nu`
    /// invariants: `nu` in ehbvm mode, zero otherwise.
    pub fn rescaled_count(&self, invariant_count: usize) -> usize {
        match self.kind {
            MethodKind::Ehbvm => invariant_count,
            _ => 0,
        }
    }

    /// `floor(2k / s)`, the highest polynomial degree conserved exactly.
    pub fn exact_degree(&self) -> usize {
        2 * self.k / self.s
    }

    pub fn label(&self) -> String {
        match self.kind {
            MethodKind::Gauss => format!("Gauss({})", self.s),
            MethodKind::Hbvm => format!("HBVM({},{})", self.k, self.s),
            MethodKind::Ehbvm => format!("EHBVM({},{})", self.k, self.s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constraints() {
        assert!(MethodConfig::gauss(2).validate().is_ok());
        assert!(MethodConfig::new(MethodKind::Gauss, 3, 2)
            .validate()
            .is_err());
        assert!(MethodConfig::hbvm(1, 2).validate().is_err());
        assert!(MethodConfig::hbvm(65, 2).validate().is_err());
        assert!(MethodConfig::hbvm(4, 0).validate().is_err());
        assert!(MethodConfig::ehbvm(4, 1).validate_for(1).is_err());
        assert!(MethodConfig::ehbvm(4, 2).validate_for(1).is_ok());
        assert!(MethodConfig::ehbvm(4, 1).validate_for(0).is_ok());
        assert!(MethodConfig::hbvm(4, 1).validate_for(3).is_ok());
    }

    #[test]
    fn labels_and_parsing() {
        assert_eq!(MethodConfig::ehbvm(4, 2).label(), "EHBVM(4,2)");
        assert_eq!(MethodConfig::gauss(2).label(), "Gauss(2)");
        assert_eq!("hbvm".parse::<MethodKind>().unwrap(), MethodKind::Hbvm);
        assert!("rk4".parse::<MethodKind>().is_err());
        assert_eq!(MethodConfig::hbvm(4, 2).exact_degree(), 4);
        assert_eq!(MethodConfig::ehbvm(6, 3).exact_degree(), 4);
    }
}
