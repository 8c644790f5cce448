//! The warping function `phi` of the metric `dr^2 + phi(r)^2 dθ^2` on the
//! annulus `δ <= r <= 3δ` around a cone point.
//!
//! `phi''` is prescribed as `sinh(s) + A·b((s - δ)/δ)`, where `b = 1 - w`
//! for a smooth step `w` that is flat at both ends. Integrating twice from
//! `phi'(δ) = 0` and fixing `phi(δ)` so that `phi(2δ) = sinh(2δ)` gives a
//! convex profile that coincides with `sinh` from `2δ` on. `A` is chosen so
//! that `phi'(2δ) = cosh(2δ)`.

use serde::{Deserialize, Serialize};

use super::SimplerepError;
use crate::tolerances::TOL;

/// Smooth step on `[0, 1]`, flat to all orders at both ends.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / u).exp();
    let b = (-1.0 / (1.0 - u)).exp();
    a / (a + b)
}

// Five-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_X: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL_W: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_08,
    0.236_926_885_056_189_08,
];

fn gauss(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (m, h) = ((a + b) / 2.0, (b - a) / 2.0);
    GL_X.iter().zip(GL_W).map(|(x, w)| w * f(m + h * x)).sum::<f64>() * h
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadialProfile {
    pub delta: f64,
    /// `phi(δ)`.
    pub kappa: f64,
    /// Amplitude of the bump added to `sinh` in `phi''`.
    pub amplitude: f64,
    /// Number of grid intervals on `[δ, 3δ]`.
    pub samples: usize,
    // Cumulative `∫ phi''` and `∫ t phi''` from δ to each node.
    i0: Vec<f64>,
    i1: Vec<f64>,
}

impl RadialProfile {
    pub fn new(delta: f64, samples: usize) -> Result<Self, SimplerepError> {
        if !(delta > 0.0 && delta < 1.0) || samples < 16 {
            return Err(SimplerepError::DomainError(format!("profile needs 0 < δ < 1 and >= 16 samples, got δ={delta}, {samples}")));
        }
        // ∫_0^1 (1 - w) = 1/2 by the symmetry w(u) + w(1 - u) = 1.
        let amplitude = delta.cosh() / (delta / 2.0);
        let mut p = RadialProfile { delta, kappa: 0.0, amplitude, samples, i0: Vec::new(), i1: Vec::new() };
        let h = 2.0 * delta / samples as f64;
        let (mut c0, mut c1) = (0.0, 0.0);
        p.i0.push(0.0);
        p.i1.push(0.0);
        for k in 0..samples {
            let (a, b) = (delta + k as f64 * h, delta + (k + 1) as f64 * h);
            c0 += gauss(a, b, |t| p.second(t));
            c1 += gauss(a, b, |t| t * p.second(t));
            p.i0.push(c0);
            p.i1.push(c1);
        }
        // phi(s) = kappa + s I0(s) - I1(s); match sinh at 2δ.
        let (j0, j1) = p.integrals(2.0 * delta);
        p.kappa = (2.0 * delta).sinh() - (2.0 * delta * j0 - j1);
        if !(p.kappa > 0.0) {
            return Err(SimplerepError::DomainError(format!("profile has phi(δ) = {} <= 0", p.kappa)));
        }
        Ok(p)
    }

    /// `phi''(s)`.
    pub fn second(&self, s: f64) -> f64 {
        let u = (s - self.delta) / self.delta;
        let bump = if u < 1.0 { self.amplitude * (1.0 - smooth_step(u)) } else { 0.0 };
        s.sinh() + bump
    }

    fn integrals(&self, s: f64) -> (f64, f64) {
        let h = 2.0 * self.delta / self.samples as f64;
        let x = ((s - self.delta) / h).clamp(0.0, self.samples as f64);
        let k = (x.floor() as usize).min(self.samples - 1);
        let a = self.delta + k as f64 * h;
        (
            self.i0[k] + gauss(a, s, |t| self.second(t)),
            self.i1[k] + gauss(a, s, |t| t * self.second(t)),
        )
    }

    /// `(phi(s), phi'(s))` from the tabulated integrals; `sinh` beyond `3δ`.
    pub fn eval(&self, s: f64) -> (f64, f64) {
        if s > 3.0 * self.delta {
            return (s.sinh(), s.cosh());
        }
        let s = s.max(self.delta);
        let (j0, j1) = self.integrals(s);
        (self.kappa + s * j0 - j1, j0)
    }

    pub fn phi(&self, s: f64) -> f64 {
        self.eval(s).0
    }

    /// Checks convexity, `phi'(δ) = 0` and the match with `sinh` on
    /// `[2δ, 3δ]` at every grid node.
    pub fn validate(&self) -> ProfileCheck {
        let h = 2.0 * self.delta / self.samples as f64;
        let nodes = (0..=self.samples).map(|k| self.delta + k as f64 * h);
        let min_second = nodes.clone().map(|s| self.second(s)).fold(f64::INFINITY, f64::min);
        let slope_at_delta = self.eval(self.delta).1;
        let sinh_mismatch = nodes
            .filter(|&s| s >= 2.0 * self.delta * (1.0 - 1e-12))
            .map(|s| {
                let (v, d) = self.eval(s);
                ((v - s.sinh()).abs() / s.sinh()).max((d - s.cosh()).abs() / s.cosh())
            })
            .fold(0.0, f64::max);
        ProfileCheck {
            min_second,
            slope_at_delta,
            sinh_mismatch,
            convex: min_second > 0.0,
            flat_at_delta: slope_at_delta.abs() <= TOL.sinh_match,
            matches_sinh: sinh_mismatch <= TOL.sinh_match,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileCheck {
    pub min_second: f64,
    pub slope_at_delta: f64,
    /// Largest relative deviation of `(phi, phi')` from `(sinh, cosh)`.
    pub sinh_mismatch: f64,
    pub convex: bool,
    pub flat_at_delta: bool,
    pub matches_sinh: bool,
}

impl ProfileCheck {
    pub fn pass(&self) -> bool {
        self.convex && self.flat_at_delta && self.matches_sinh
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_is_symmetric_and_flat() {
        for u in [0.1, 0.3, 0.5, 0.77] {
            assert!((smooth_step(u) + smooth_step(1.0 - u) - 1.0).abs() < 1e-15);
        }
        assert!(smooth_step(1e-3) < 1e-300 && smooth_step(0.0) == 0.0 && smooth_step(1.0) == 1.0);
    }

    #[test]
    fn profiles_validate_across_scales() {
        for delta in [0.2, 0.05, 1e-3, 1e-8] {
            let p = RadialProfile::new(delta, 4096).unwrap();
            let c = p.validate();
            assert!(c.pass(), "δ={delta}: {c:?}");
            assert!(p.kappa > 0.0 && p.kappa < (2.0 * delta).sinh());
        }
    }

    #[test]
    fn refinement_changes_nothing() {
        let a = RadialProfile::new(0.05, 4096).unwrap();
        let b = RadialProfile::new(0.05, 8192).unwrap();
        assert!((a.kappa - b.kappa).abs() < 1e-14);
        for s in [0.05, 0.06, 0.083, 0.1, 0.14] {
            assert!((a.phi(s) - b.phi(s)).abs() < 1e-14);
        }
        assert_eq!(a.validate().pass(), b.validate().pass());
    }

    #[test]
    fn finite_difference_second_derivative() {
        let p = RadialProfile::new(0.1, 4096).unwrap();
        let h = 1e-4;
        for s in [0.12, 0.15, 0.18] {
            let fd = (p.phi(s + h) - 2.0 * p.phi(s) + p.phi(s - h)) / (h * h);
            assert!((fd - p.second(s)).abs() < 1e-4 * p.second(s).abs().max(1.0), "{fd} {}", p.second(s));
        }
    }
}
