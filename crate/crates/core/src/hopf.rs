//! Logarithmic cutoff near the cylinder and the background swirl built from it.
//!
//! With `delta = exp(-1/eps)` the cutoff `xi` equals 1 up to `sigma + delta^2`,
//! decays like `eps * ln(delta / (r - sigma))` and vanishes beyond
//! `sigma + delta`. The smoothed cutoff `theta` is the exact sliding mean of
//! `xi` over a window of total width `delta^2` (`xi` continued by 1 below
//! `sigma`), evaluated through the closed-form antiderivative of `xi`.
//!
//! The background swirl is `-(theta * phi)'` with the vortex potential
//! `phi(r) = -(gamma / 2 pi) ln r`. It matches the cylinder swirl at
//! `r = sigma` and vanishes for `r >= sigma + delta + delta^2 / 2`.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HopfParams<T> {
    pub eps: T,
    pub sigma: T,
    pub gamma: T,
}

impl<T: Real> HopfParams<T> {
    pub fn new(eps: T, sigma: T, gamma: T) -> Result<Self> {
        if !(eps > T::zero() && eps < T::one()) {
            return Err(Error::Validation(format!("hopf eps must lie in (0, 1), got {eps}")));
        }
        if !(sigma > T::zero()) || !gamma.is_finite() {
            return Err(Error::Validation("hopf needs sigma > 0 and finite gamma".into()));
        }
        Ok(Self { eps, sigma, gamma })
    }

    /// `exp(-1/eps)`, always recomputed from `eps`.
    pub fn delta(&self) -> T {
        (-self.eps.recip()).exp()
    }

    /// Half-width of the averaging window, `delta^2 / 2`.
    pub fn half_window(&self) -> T {
        let d = self.delta();
        d * d * T::half()
    }

    /// Outer edge of the support of the smoothed cutoff.
    pub fn support_end(&self) -> T {
        self.sigma + self.delta() + self.half_window()
    }

    fn check(&self, r: T) -> Result<()> {
        if r < self.sigma || !r.is_finite() {
            return Err(Error::Domain(format!("radius {r} inside the cylinder (sigma = {})", self.sigma)));
        }
        Ok(())
    }

    fn xi_unchecked(&self, r: T) -> T {
        let d = self.delta();
        let x = r - self.sigma;
        if x <= d * d {
            T::one()
        } else if x <= d {
            self.eps * (d / x).ln()
        } else {
            T::zero()
        }
    }

    fn xi_slope_unchecked(&self, r: T) -> T {
        let d = self.delta();
        let x = r - self.sigma;
        if x > d * d && x < d {
            -self.eps / x
        } else {
            T::zero()
        }
    }

    /// Antiderivative of `xi` (continued by 1 below `sigma`), zero at `sigma`.
    fn xi_integral(&self, r: T) -> T {
        let d = self.delta();
        let d2 = d * d;
        let g = |x: T| x * ((d / x).ln() + T::one());
        let x = r - self.sigma;
        if x <= d2 {
            x
        } else if x <= d {
            d2 + self.eps * (g(x) - g(d2))
        } else {
            d2 + self.eps * (g(d) - g(d2))
        }
    }
}

/// Piecewise cutoff: 1 near the wall, logarithmic decay, 0 beyond `sigma + delta`.
pub fn xi_eps<T: Real>(hp: &HopfParams<T>, r: T) -> Result<T> {
    hp.check(r)?;
    Ok(hp.xi_unchecked(r))
}

/// Smoothed cutoff: sliding mean of `xi` over `[r - delta^2/2, r + delta^2/2]`.
pub fn theta_eps<T: Real>(hp: &HopfParams<T>, r: T) -> Result<T> {
    hp.check(r)?;
    let h = hp.half_window();
    if r - hp.sigma <= h {
        return Ok(T::one());
    }
    if r >= hp.support_end() {
        return Ok(T::zero());
    }
    let t = (hp.xi_integral(r + h) - hp.xi_integral(r - h)) / (h + h);
    Ok(t.max(T::zero()).min(T::one()))
}

/// Derivative of [`theta_eps`]: `(xi(r + h) - xi(r - h)) / (2 h)`.
pub fn theta_eps_slope<T: Real>(hp: &HopfParams<T>, r: T) -> Result<T> {
    hp.check(r)?;
    let h = hp.half_window();
    if r - hp.sigma <= h || r >= hp.support_end() {
        return Ok(T::zero());
    }
    Ok((hp.xi_unchecked(r + h) - hp.xi_unchecked(r - h)) / (h + h))
}

/// Background swirl `theta'(r) (gamma / 2 pi) ln r + theta(r) gamma / (2 pi r)`.
pub fn background_swirl<T: Real>(hp: &HopfParams<T>, r: T) -> Result<T> {
    let theta = theta_eps(hp, r)?;
    let slope = theta_eps_slope(hp, r)?;
    let c = hp.gamma / (T::two() * T::PI());
    Ok(slope * c * r.ln() + theta * c / r)
}

/// Slope of `xi` where it is differentiable (0 off the logarithmic branch).
pub fn xi_eps_slope<T: Real>(hp: &HopfParams<T>, r: T) -> Result<T> {
    hp.check(r)?;
    Ok(hp.xi_slope_unchecked(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn hp(eps: f64) -> HopfParams<f64> {
        HopfParams::new(eps, 0.1, 0.1 * PI).unwrap()
    }

    #[test]
    fn xi_plateau_and_breakpoint() {
        let h = hp(0.5);
        let d = h.delta();
        assert_eq!(d, (-2.0f64).exp());
        assert_eq!(xi_eps(&h, 0.1 + d * d / 2.0).unwrap(), 1.0);
        assert_eq!(xi_eps(&h, 0.1 + d).unwrap(), 0.0);
        assert_eq!(xi_eps(&h, 0.1 + 2.0 * d).unwrap(), 0.0);
    }

    #[test]
    fn xi_half_value_is_eps_independent() {
        for eps in [0.2, 0.35, 0.5, 0.8] {
            let h = hp(eps);
            let r = 0.1 + h.delta().powf(1.5);
            assert!((xi_eps(&h, r).unwrap() - 0.5).abs() < 1e-12, "eps={eps}");
        }
    }

    #[test]
    fn theta_plateau_and_support() {
        for eps in [0.3, 0.5, 0.7] {
            let h = hp(eps);
            let d = h.delta();
            for k in 0..=10 {
                let r = 0.1 + d * d / 2.0 * k as f64 / 10.0;
                assert_eq!(theta_eps(&h, r).unwrap(), 1.0);
                let exact = h.gamma / (2.0 * PI * r);
                assert!((background_swirl(&h, r).unwrap() - exact).abs() <= 1e-14 * exact);
            }
            let end = 0.1 + d + d * d / 2.0;
            for k in 0..=10 {
                let r = end + k as f64 * 0.05;
                assert_eq!(theta_eps(&h, r).unwrap(), 0.0);
                assert_eq!(background_swirl(&h, r).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn background_matches_cylinder_swirl() {
        let h = hp(0.5);
        let v = background_swirl(&h, 0.1).unwrap();
        assert!((v - 0.1 * PI / (2.0 * PI * 0.1)).abs() < 1e-15);
    }

    #[test]
    fn smoothed_slope_matches_difference_quotient() {
        let h = hp(0.5);
        let d = h.delta();
        let (a, b) = (0.1 + d * d, 0.1 + d);
        for k in 1..200 {
            let r = a + (b - a) * k as f64 / 200.0;
            let e = 1e-7 * d * d;
            let fd = (theta_eps(&h, r + e).unwrap() - theta_eps(&h, r - e).unwrap()) / (2.0 * e);
            let s = theta_eps_slope(&h, r).unwrap();
            assert!((fd - s).abs() <= 1e-4 * s.abs().max(1.0), "r={r} fd={fd} s={s}");
        }
    }

    #[test]
    fn inside_cylinder_rejected() {
        let h = hp(0.5);
        assert!(xi_eps(&h, 0.05).is_err());
        assert!(theta_eps(&h, 0.05).is_err());
        assert!(background_swirl(&h, 0.0).is_err());
        assert!(HopfParams::new(1.0, 0.1, 1.0).is_err());
        assert!(HopfParams::new(0.0, 0.1, 1.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::{prop_assert, prop_assume, proptest};

        proptest! {
            #[test]
            fn xi_is_monotone_and_theta_bounded(eps in 0.15f64..0.9, a in 0.0f64..1.0, b in 0.0f64..1.0) {
                let h = hp(eps);
                let span = 1.5 * h.delta();
                let (r0, r1) = (0.1 + span * a.min(b), 0.1 + span * a.max(b));
                prop_assert!(xi_eps(&h, r1).unwrap() <= xi_eps(&h, r0).unwrap());
                let t = theta_eps(&h, r0).unwrap();
                prop_assert!((0.0..=1.0).contains(&t));
            }

            #[test]
            fn theta_slope_and_swirl_bounds(eps in 0.15f64..0.9, a in 0.0f64..1.0) {
                let h = hp(eps);
                let d = h.delta();
                let (lo, hi) = (0.1 + d * d / 2.0, h.support_end());
                let r = lo + (hi - lo) * a;
                prop_assume!(r > lo);
                let x = r - 0.1;
                prop_assert!(theta_eps_slope(&h, r).unwrap().abs() <= 2.0 * eps / x);
                let bound = 2.0 * (eps / x + h.gamma / (2.0 * PI * r));
                prop_assert!(background_swirl(&h, r).unwrap().abs() <= bound);
            }
        }
    }
}
