use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Number of grid cells used for numerical infima and spot checks of custom links.
const GRID_CELLS: usize = 10_000;

type LinkFn = dyn Fn(f64) -> f64 + Send + Sync;

/// The prediction function `b`: odd, strictly increasing, bounded by 1 in absolute
/// value and Lipschitz with constant `lipschitz()`.
#[derive(Clone)]
pub struct LinkFunction {
    kind: LinkKind,
    lipschitz: f64,
}

#[derive(Clone)]
pub enum LinkKind {
    /// `b(u) = tanh(c u)`.
    Logistic { c: f64 },
    /// A user-supplied function, spot-checked at construction.
    Custom { name: String, eval: Arc<LinkFn> },
}

impl fmt::Debug for LinkFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            LinkKind::Logistic { c } => write!(f, "Logistic(c={c})"),
            LinkKind::Custom { name, .. } => {
                write!(f, "Custom({name}, L={})", self.lipschitz)
            }
        }
    }
}

impl LinkFunction {
    /// The logistic link `tanh(c u)`, whose Lipschitz constant is exactly `c`.
    pub fn logistic(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "logistic scale must be positive, got {c}"
            )));
        }
        Ok(Self {
            kind: LinkKind::Logistic { c },
            lipschitz: c,
        })
    }

    /// Registers a custom link with a declared Lipschitz constant.
    ///
    /// The link contract is spot-checked on a grid over `[-probe, probe]`: value 0
    /// at the origin, oddness to 1e-15, strict monotonicity, range inside (-1, 1)
    /// and the Lipschitz bound on neighbouring grid points. Passing the checks is
    /// not a proof.
    pub fn custom<F>(name: impl Into<String>, lipschitz: f64, probe: f64, eval: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(lipschitz.is_finite() && lipschitz > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Lipschitz constant must be positive, got {lipschitz}"
            )));
        }
        if !(probe.is_finite() && probe > 0.0) {
            return Err(Error::InvalidParameter("probe radius must be positive".into()));
        }
        let name = name.into();
        let reject = |why: String| Err(Error::InvalidParameter(format!("link {name}: {why}")));

        if eval(0.0) != 0.0 {
            return reject(format!("b(0) = {} is not 0", eval(0.0)));
        }
        let h = 2.0 * probe / GRID_CELLS as f64;
        let mut prev_u = -probe;
        let mut prev_b = eval(prev_u);
        for k in 1..=GRID_CELLS {
            let u = -probe + k as f64 * h;
            let bu = eval(u);
            if bu.is_nan() || bu.abs() >= 1.0 {
                return reject(format!("|b({u})| = {} is not below 1", bu.abs()));
            }
            if (eval(-u) + bu).abs() > 1e-15 {
                return reject(format!("not odd at u = {u}"));
            }
            if bu <= prev_b {
                return reject(format!("not strictly increasing on [{prev_u}, {u}]"));
            }
            if bu - prev_b > lipschitz * (u - prev_u) * (1.0 + 1e-12) + 1e-15 {
                return reject(format!("Lipschitz bound {lipschitz} violated near {u}"));
            }
            prev_u = u;
            prev_b = bu;
        }
        Ok(Self {
            kind: LinkKind::Custom {
                name,
                eval: Arc::new(eval),
            },
            lipschitz,
        })
    }

    pub fn kind(&self) -> &LinkKind {
        &self.kind
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// `b(u)`.
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match &self.kind {
            LinkKind::Logistic { c } => (c * u).tanh(),
            LinkKind::Custom { eval, .. } => eval(u),
        }
    }

    /// `b'(u)`; closed form for the logistic, a central difference otherwise.
    pub fn derivative(&self, u: f64) -> f64 {
        match &self.kind {
            LinkKind::Logistic { c } => {
                let t = (c * u).tanh();
                c * (1.0 - t * t)
            }
            LinkKind::Custom { eval, .. } => {
                let h = 1e-6 * (1.0 + u.abs());
                (eval(u + h) - eval(u - h)) / (2.0 * h)
            }
        }
    }

    /// The worst-case slope `ℓ_M` of `b` over `[-M, M]`.
    ///
    /// For the logistic (odd and concave on the positive half-line) this is
    /// `b'(M)`. Custom links use the smallest neighbouring difference quotient on
    /// a uniform grid, which equals the infimum over all grid pairs.
    pub fn ell(&self, m: f64) -> Result<f64> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidParameter(format!("ell_M needs M > 0, got {m}")));
        }
        Ok(match &self.kind {
            LinkKind::Logistic { .. } => self.derivative(m),
            LinkKind::Custom { .. } => self.grid_ell(m, GRID_CELLS),
        })
    }

    /// Minimum of `b'` over the `cells + 1` points of a uniform grid of `[-M, M]`.
    pub fn grid_ell(&self, m: f64, cells: usize) -> f64 {
        // The infimum of secant slopes over [-m, m] equals the infimum of b' there.
        let h = 2.0 * m / cells as f64;
        (0..=cells)
            .map(|k| self.derivative(if k == cells { m } else { -m + k as f64 * h }))
            .fold(f64::INFINITY, f64::min)
    }

    /// Parameter echo used by config files and CSV headers.
    pub fn describe(&self) -> String {
        match &self.kind {
            LinkKind::Logistic { c } => format!("logistic(c={c})"),
            LinkKind::Custom { name, .. } => format!("custom({name};L={})", self.lipschitz),
        }
    }
}

/// `b(u)` for a given link.
pub fn link_eval(link: &LinkFunction, u: f64) -> f64 {
    link.eval(u)
}

/// `ℓ_M` for a given link.
pub fn ell_m(link: &LinkFunction, m: f64) -> Result<f64> {
    link.ell(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn logistic() -> LinkFunction {
        LinkFunction::logistic(0.5).unwrap()
    }

    // Truncated Maclaurin series for tanh on |x| <= 1 plus the identity
    // tanh(x) = (e^{2x}-1)/(e^{2x}+1), computed from a hand-rolled exp series.
    fn exp_series(x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            term *= x / k as f64;
            sum += term;
        }
        sum
    }

    fn tanh_oracle(x: f64) -> f64 {
        let e = exp_series(2.0 * x);
        (e - 1.0) / (e + 1.0)
    }

    #[test]
    fn logistic_values() {
        let b = logistic();
        assert_eq!(b.eval(0.0), 0.0);
        assert_abs_diff_eq!(tanh_oracle(1.0), 0.761594, epsilon = 1e-6);
        assert_abs_diff_eq!(b.eval(2.0), tanh_oracle(1.0), epsilon = 1e-14);
        assert_abs_diff_eq!(b.eval(2.0), 0.761594, epsilon = 1e-6);
        assert_abs_diff_eq!(b.eval(-2.0), -0.761594, epsilon = 1e-6);
        assert_eq!(b.lipschitz(), 0.5);
    }

    /// Brute force over all pairs of a coarse grid: independent of the closed form.
    fn brute_force_ell(b: &LinkFunction, m: f64, points: usize) -> f64 {
        let grid: Vec<f64> = (0..points)
            .map(|k| -m + 2.0 * m * k as f64 / (points - 1) as f64)
            .collect();
        let mut inf = f64::INFINITY;
        for (p, &v) in grid.iter().enumerate() {
            for &u in &grid[p + 1..] {
                inf = inf.min((b.eval(u) - b.eval(v)) / (u - v));
            }
        }
        inf
    }

    #[test]
    fn ell_matches_grid_oracle() {
        let b = logistic();
        // ~4.5·10^4 point pairs.
        let oracle1 = brute_force_ell(&b, 1.0, 300);
        let oracle2 = brute_force_ell(&b, 2.0, 300);
        assert_abs_diff_eq!(b.ell(1.0).unwrap(), 0.393224, epsilon = 1e-6);
        assert_abs_diff_eq!(b.ell(2.0).unwrap(), 0.209987, epsilon = 1e-6);
        // The coarse pair grid only approaches the endpoint slope from above.
        assert!(oracle1 >= b.ell(1.0).unwrap() && oracle1 - b.ell(1.0).unwrap() < 2e-3);
        assert!(oracle2 >= b.ell(2.0).unwrap() && oracle2 - b.ell(2.0).unwrap() < 2e-3);
        for m in [0.3, 1.0, 2.0, 5.0] {
            assert_abs_diff_eq!(b.grid_ell(m, 10_000), b.ell(m).unwrap(), epsilon = 1e-6);
        }
    }

    #[test]
    fn ell_rejects_non_positive_radius() {
        assert!(logistic().ell(0.0).is_err());
        assert!(logistic().ell(-1.0).is_err());
    }

    #[test]
    fn custom_link_checks() {
        let ok = LinkFunction::custom("atan", 2.0 / std::f64::consts::PI, 20.0, |u: f64| {
            2.0 / std::f64::consts::PI * u.atan()
        })
        .unwrap();
        assert!(ok.ell(1.0).unwrap() > 0.0);
        assert_abs_diff_eq!(
            ok.ell(1.0).unwrap(),
            2.0 / std::f64::consts::PI / 2.0,
            epsilon = 1e-6
        );

        // Understated Lipschitz constant.
        assert!(LinkFunction::custom("steep", 0.1, 5.0, |u: f64| u.tanh()).is_err());
        // Not odd.
        assert!(LinkFunction::custom("shifted", 1.0, 5.0, |u: f64| (u + 0.1).tanh() - 0.1_f64.tanh()).is_err());
        // Leaves (-1, 1).
        assert!(LinkFunction::custom("clamp", 1.0, 5.0, |u: f64| u.clamp(-1.0, 1.0)).is_err());
    }

    #[test]
    fn ell_is_non_increasing() {
        let b = logistic();
        let mut prev = f64::INFINITY;
        for k in 1..200 {
            let l = b.ell(k as f64 * 0.1).unwrap();
            assert!(l <= prev);
            prev = l;
        }
    }

    proptest! {
        #[test]
        fn logistic_is_odd(u in -50.0f64..50.0) {
            let b = logistic();
            prop_assert_eq!(b.eval(-u), -b.eval(u));
            prop_assert!(b.eval(u).abs() < 1.0 || u.abs() > 30.0);
        }

        #[test]
        fn logistic_is_lipschitz(u in -20.0f64..20.0, v in -20.0f64..20.0) {
            let b = logistic();
            prop_assert!((b.eval(u) - b.eval(v)).abs() <= b.lipschitz() * (u - v).abs() + 1e-12);
        }

        #[test]
        fn logistic_is_increasing(u in -15.0f64..15.0, d in 1e-6f64..5.0) {
            let b = logistic();
            prop_assert!(b.eval(u) < b.eval(u + d));
        }
    }
}
