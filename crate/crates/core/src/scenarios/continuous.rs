//! Continuous cases: the unmarked clock, the noisy scale and the decaying atom.

use std::f64::consts::PI;

use libm::erf;

use crate::density::{belief_region, BeliefRegion, DensityNormality, Gaussian, Uniform, WrappedNormal};
use crate::dese::{DecayModel, Measuring};
use crate::error::{Error, Result};

/// Probability that a normal reading lies within two standard deviations of
/// its mean (0.9544997…).
pub fn two_sigma_mass() -> f64 {
    erf(std::f64::consts::SQRT_2)
}

/// A scale whose readings are normal around the true weight.
pub fn build_weighing(mu: f64, sigma: f64, threshold: f64) -> Result<DensityNormality<f64, Gaussian<f64>>> {
    DensityNormality::new(Gaussian::new(mu, sigma)?, threshold)
}

/// A clock face without marks, read with angular error `sigma` (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clock {
    pub sigma: f64,
}

/// An arc of orientations `[center - left, center + right]`, angles in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub center: f64,
    pub left: f64,
    pub right: f64,
    pub mass: f64,
}

impl Arc {
    pub fn width(&self) -> f64 {
        self.left + self.right
    }

    /// Whether the orientation `theta` lies on the arc.
    pub fn contains(&self, theta: f64) -> bool {
        let d = (theta - self.center + PI).rem_euclid(2.0 * PI) - PI;
        -self.left <= d && d <= self.right
    }
}

pub fn build_clock(sigma: f64) -> Result<Clock> {
    if !(sigma > 0.0) || sigma > PI {
        return Err(Error::Parameter(format!("clock sigma must be in (0, π], got {sigma}")));
    }
    Ok(Clock { sigma })
}

impl Clock {
    /// Before looking, every orientation is equally dense.
    pub fn before_looking(&self) -> Uniform<f64> {
        Uniform { lo: 0.0, hi: 2.0 * PI }
    }

    /// After seeing the hand apparently at `apparent`, in coordinates
    /// centred on that reading.
    pub fn after_looking(&self) -> Result<WrappedNormal<f64>> {
        WrappedNormal::new(0.0, self.sigma)
    }

    pub fn belief_arc(&self, apparent: f64, t: f64) -> Result<Arc> {
        let r: BeliefRegion<f64> = belief_region(&self.after_looking()?, t)?;
        let (a, b) = r.bounds().ok_or_else(|| Error::Numeric("empty belief arc".into()))?;
        Ok(Arc { center: apparent.rem_euclid(2.0 * PI), left: -a, right: b, mass: r.mass })
    }
}

pub fn build_decay(measuring: Measuring, threshold: f64) -> Result<DecayModel<f64>> {
    DecayModel::new(measuring, threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Density;

    #[test]
    fn clock_before_looking_is_flat() {
        let c = build_clock(0.1).unwrap();
        let u = c.before_looking();
        assert!((u.pdf(1.0) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((u.pdf(5.0) - u.pdf(0.2)).abs() < 1e-15);
    }

    #[test]
    fn arc_wraps_around_twelve() {
        let c = build_clock(0.1).unwrap();
        let a = c.belief_arc(0.05, 0.95).unwrap();
        assert!(a.contains(2.0 * PI - 0.05));
        assert!(!a.contains(PI));
    }

    #[test]
    fn two_sigma_constant() {
        let v = two_sigma_mass();
        assert!((v - 0.9544997361036416).abs() < 1e-14, "{v:.17}");
    }
}
