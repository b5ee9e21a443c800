//! Closed-form Brownian limit targets.
//!
//! For standard Brownian motion the ascending ladder time is the ½-stable
//! first-passage subordinator and the ladder height is the pure drift
//! `t / √2`, so `κ(α, β) = √α + β/√2` with `κ(1, 0) = 1`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Drift of the limiting ladder height process.
pub const DELTA_H: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Killing rate of the limiting ladder height process.
pub const Q_H: f64 = 0.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceLaw {
    KappaBm,
    LevyHalfCdf,
    RayleighCdf,
    HalfStableTauTail,
    HBm,
}

impl ReferenceLaw {
    pub fn id(self) -> &'static str {
        match self {
            ReferenceLaw::KappaBm => "kappa_bm",
            ReferenceLaw::LevyHalfCdf => "levy_half_cdf",
            ReferenceLaw::RayleighCdf => "rayleigh_cdf",
            ReferenceLaw::HalfStableTauTail => "half_stable_tau_tail",
            ReferenceLaw::HBm => "h_bm",
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        [
            ReferenceLaw::KappaBm,
            ReferenceLaw::LevyHalfCdf,
            ReferenceLaw::RayleighCdf,
            ReferenceLaw::HalfStableTauTail,
            ReferenceLaw::HBm,
        ]
        .into_iter()
        .find(|l| l.id() == id)
        .ok_or_else(|| Error::Parameter(format!("unknown reference law {id}")))
    }
}

fn domain(ok: bool, what: &str, x: f64) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{what} outside its domain: {x}")))
    }
}

/// Bivariate ladder exponent of standard Brownian motion.
pub fn kappa_bm(alpha: f64, beta: f64) -> Result<f64> {
    domain(alpha >= 0.0, "alpha", alpha)?;
    domain(beta >= 0.0, "beta", beta)?;
    Ok(alpha.sqrt() + beta * DELTA_H)
}

/// `P(τ₁ ≤ s) = erfc(1 / (2√s))` for the subordinator with exponent `√α`.
pub fn levy_half_cdf(s: f64) -> Result<f64> {
    domain(s >= 0.0, "s", s)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    Ok(libm::erfc(0.5 / s.sqrt()))
}

pub fn rayleigh_cdf(x: f64) -> Result<f64> {
    domain(x >= 0.0, "x", x)?;
    Ok(1.0 - (-x * x / 2.0).exp())
}

pub fn rayleigh_density(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        x * (-x * x / 2.0).exp()
    }
}

/// Lévy tail `π^τ(c, ∞) = 1/√(πc)`.
pub fn tau_levy_tail(c: f64) -> Result<f64> {
    domain(c > 0.0, "c", c)?;
    Ok(1.0 / (PI * c).sqrt())
}

/// `π^τ(1, ∞) = 1/√π`.
pub fn half_stable_tau_tail() -> f64 {
    1.0 / PI.sqrt()
}

/// Renewal function of the descending ladder height, `x / δ = √2 x`.
pub fn h_bm(x: f64) -> Result<f64> {
    domain(x >= 0.0, "x", x)?;
    Ok(SQRT_2 * x)
}

/// Evaluates a reference law by id; `args` holds the point (two entries for κ).
pub fn reference(law: ReferenceLaw, args: &[f64]) -> Result<f64> {
    let need = |k: usize| {
        if args.len() == k {
            Ok(())
        } else {
            Err(Error::Dimension(format!("{} takes {k} arguments, got {}", law.id(), args.len())))
        }
    };
    match law {
        ReferenceLaw::KappaBm => {
            need(2)?;
            kappa_bm(args[0], args[1])
        }
        ReferenceLaw::LevyHalfCdf => {
            need(1)?;
            levy_half_cdf(args[0])
        }
        ReferenceLaw::RayleighCdf => {
            need(1)?;
            rayleigh_cdf(args[0])
        }
        ReferenceLaw::HalfStableTauTail => {
            need(0)?;
            Ok(half_stable_tau_tail())
        }
        ReferenceLaw::HBm => {
            need(1)?;
            h_bm(args[0])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    fn normal_tail(x: f64) -> f64 {
        libm::erfc(x / SQRT_2) / 2.0
    }

    #[test]
    fn examples() {
        assert_eq!(kappa_bm(1.0, 0.0).unwrap(), 1.0);
        assert!((levy_half_cdf(1.0).unwrap() - libm::erfc(0.5)).abs() < 1e-15);
        assert!((levy_half_cdf(1.0).unwrap() - 0.4795).abs() < 1e-4);
        assert!((rayleigh_cdf((2.0 * 2f64.ln()).sqrt()).unwrap() - 0.5).abs() < 1e-15);
        assert!((half_stable_tau_tail() - 0.5642).abs() < 1e-4);
        assert!(rayleigh_cdf(-1.0).is_err());
        assert!(levy_half_cdf(-1.0).is_err());
        assert!(reference(ReferenceLaw::KappaBm, &[1.0]).is_err());
        assert_eq!(reference(ReferenceLaw::from_id("h_bm").unwrap(), &[1.0]).unwrap(), SQRT_2);
    }

    #[test]
    fn kappa_axes() {
        for i in 0..20 {
            let x = i as f64 * 0.37;
            assert!((kappa_bm(x, 0.0).unwrap() - x.sqrt()).abs() < 1e-15);
            assert!((kappa_bm(0.0, x).unwrap() - x / SQRT_2).abs() < 1e-15);
        }
    }

    /// `log κ(α,β) = ∫₀^∞ t⁻¹ (e^{−t} P(B_t > 0) − e^{−αt} E(e^{−βB_t}; B_t > 0)) dt`,
    /// evaluated with `t = u²`.
    fn kappa_by_quadrature(alpha: f64, beta: f64) -> f64 {
        let integrand = |u: f64| {
            if u == 0.0 {
                return 2.0 * beta / (2.0 * PI).sqrt();
            }
            let t = u * u;
            let inner = (beta * beta * t / 2.0).exp() * normal_tail(beta * u);
            2.0 / u * ((-t).exp() / 2.0 - (-alpha * t).exp() * inner)
        };
        let upper = (60.0 / alpha.min(1.0)).sqrt();
        simpson(integrand, 0.0, upper, 400_000).exp()
    }

    #[test]
    fn kappa_matches_fluctuation_integral() {
        for (a, b) in [(1.0, 1.0), (2.0, 0.5), (0.5, 1.5), (1.0, 0.0)] {
            let q = kappa_by_quadrature(a, b);
            assert!((q - kappa_bm(a, b).unwrap()).abs() < 1e-5, "({a},{b}): {q}");
        }
        assert!((kappa_by_quadrature(1.0, 1.0) - 1.7071).abs() < 1e-4);
    }

    #[test]
    fn levy_cdf_is_a_cdf_with_the_right_transform() {
        let mut prev = 0.0;
        for i in 1..2000 {
            let v = levy_half_cdf(i as f64 * 0.05).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        assert!(levy_half_cdf(1e-4).unwrap() < 1e-10);
        assert!(levy_half_cdf(1e12).unwrap() > 1.0 - 1e-6);
        // E e^{−ατ} = ∫ α e^{−αs} F(s) ds, with s = v² to tame the tail
        for alpha in [0.5f64, 1.0, 2.0] {
            let f = |v: f64| {
                let s = v * v;
                alpha * (-alpha * s).exp() * levy_half_cdf(s).unwrap() * 2.0 * v
            };
            let lt = simpson(f, 0.0, (80.0 / alpha).sqrt(), 200_000);
            assert!((lt - (-alpha.sqrt()).exp()).abs() < 1e-6, "alpha {alpha}: {lt}");
        }
    }

    #[test]
    fn rayleigh_density_integrates_to_one() {
        let total = simpson(rayleigh_density, 0.0, 40.0, 200_000);
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tau_tail_from_levy_density() {
        // ∫_c^∞ s^{−3/2} / (2√π) ds with s = c e^y
        let c = 1.0;
        let f = |y: f64| {
            let s = c * y.exp();
            s.powf(-1.5) / (2.0 * PI.sqrt()) * s
        };
        let v = simpson(f, 0.0, 80.0, 200_000);
        assert!((v - tau_levy_tail(c).unwrap()).abs() < 1e-10);
        assert_eq!(tau_levy_tail(1.0).unwrap(), half_stable_tau_tail());
    }
}
