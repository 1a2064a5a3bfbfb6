use serde::Serialize;

use super::{CovarianceProfile, Distribution, Potential};
use crate::quadrature::{integrate, uniform_breakpoints};
use crate::response::epsilon_g;
use crate::special::sphere_area;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

/// One hypothesis with the computed quantity behind its verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bullet {
    pub name: String,
    pub verdict: Verdict,
    pub value: f64,
    pub threshold: Option<f64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub dim: usize,
    /// The stability theorem is stated for `d ≥ 4`; lower dimensions are
    /// checked but labelled outside its scope.
    pub theorem_applies: bool,
    pub eps_g: f64,
    pub bullets: Vec<Bullet>,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.bullets.iter().all(|b| b.verdict == Verdict::Pass)
    }

    pub fn bullet(&self, name: &str) -> Option<&Bullet> {
        self.bullets.iter().find(|b| b.name == name)
    }
}

fn bullet(name: &str, verdict: Verdict, value: f64, threshold: Option<f64>, note: impl Into<String>) -> Bullet {
    Bullet {
        name: name.into(),
        verdict,
        value,
        threshold,
        note: note.into(),
    }
}

fn finite_bullet(name: &str, value: f64, trusted: bool, note: &str) -> Bullet {
    let verdict = if !trusted {
        Verdict::Indeterminate
    } else if value.is_finite() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    bullet(name, verdict, value, None, note)
}

/// Numerical check of the stability hypotheses on `f` and `w` in dimension `d`.
///
/// `k_max` bounds the frequency range scanned for `sup (ŵ)_-`.
pub fn hypothesis_check(f: &Distribution, w: &Potential, dim: usize, k_max: f64) -> Result<HypothesisReport> {
    if !(1..=4).contains(&dim) {
        return Err(Error::InvalidParameter(format!("dimension {dim} outside 1..=4")));
    }
    let area = sphere_area(dim);
    let s = dim as f64 / 2.0 - 1.0;
    let s_ceil = s.ceil().max(0.0) as i32;
    let profile = CovarianceProfile::new(f, dim)?;
    let trusted_h = profile.quadrature_converged();
    let cutoff = f.cutoff();
    let mut bullets = Vec::new();

    let mut bps = vec![0.0];
    bps.extend(f.breakpoints());
    bps.push(cutoff);
    let mut radial = vec![0.0];
    for w in bps.windows(2) {
        radial.extend_from_slice(&uniform_breakpoints(w[0], w[1], cutoff / 16.0)[1..]);
    }

    let mass = integrate(
        |r: f64| (1.0 + r * r).powi(s_ceil) * f.eval_f2(r) * r.powi(dim as i32 - 1),
        &radial,
        1e-14,
        1e-10,
        4000,
    );
    bullets.push(finite_bullet(
        "weighted-l2-mass",
        area * mass.value,
        mass.converged,
        "∫⟨ξ⟩^{2⌈s⌉}|f|²",
    ));

    let smooth = !matches!(f, Distribution::ZeroTempFermi { .. });
    if smooth {
        let grad = integrate(|r: f64| f.d_f2(r).abs(), &radial, 1e-14, 1e-10, 4000);
        bullets.push(finite_bullet(
            "f-grad-f",
            0.5 * area * grad.value,
            grad.converged,
            "∫|ξ|^{1-d}|f∇f| = |S^{d-1}|/2 ∫|∂_r|f|²|",
        ));
    } else {
        bullets.push(bullet(
            "f-grad-f",
            Verdict::Indeterminate,
            f64::NAN,
            None,
            "|f|² has a jump; ∇f is not a function",
        ));
    }

    // strict decrease, sampled on a log grid wherever |f|² is positive
    let mut worst = f64::NEG_INFINITY;
    let mut positive = 0usize;
    let mut prev = f.eval_f2(0.0);
    let mut increases = false;
    for i in 0..=400 {
        let r = 1e-4 * (1.5 * cutoff / 1e-4).powf(i as f64 / 400.0);
        let v = f.eval_f2(r);
        increases |= v > prev;
        prev = v;
        if v > 0.0 {
            positive += 1;
            worst = worst.max(f.d_f2(r));
        }
    }
    let monotone = positive > 0 && worst < 0.0 && !increases;
    bullets.push(bullet(
        "monotone",
        if monotone { Verdict::Pass } else { Verdict::Fail },
        if positive > 0 { worst } else { 0.0 },
        Some(0.0),
        "max of ∂_r|f|² over sampled radii where |f|² > 0",
    ));

    let radii = profile.sample_radii(24);
    for k in 0..=(2 * s_ceil as usize) {
        let sup = radii
            .iter()
            .map(|&x| (1.0 + x * x) * profile.derivative(x, k).abs())
            .fold(0.0, f64::max);
        let name = format!("weighted-h-derivative-{k}");
        let b = if !trusted_h {
            bullet(
                &name,
                Verdict::Indeterminate,
                sup,
                None,
                "h quadrature did not converge",
            )
        } else if profile.decayed() {
            bullet(&name, Verdict::Pass, sup, None, "sup ⟨x⟩²|∂^k h|, radial derivatives")
        } else {
            bullet(
                &name,
                Verdict::Fail,
                sup,
                None,
                format!("h has not decayed by x = {}; sup grows with the range", profile.x_max()),
            )
        };
        bullets.push(b);
    }

    let int_h = profile.radial_integral(|r| profile.eval(r).abs() + profile.derivative(r, 1).abs());
    let int_rh = profile.radial_integral(|r| r * profile.eval(r).abs());
    for (name, value, note) in [
        ("h-grad-h-integrable", area * int_h, "∫|ξ|^{1-d}(|h|+|∇h|)"),
        ("h-weighted-integrable", area * int_rh, "∫|x|^{2-d}|h|"),
    ] {
        let b = if !trusted_h {
            bullet(
                name,
                Verdict::Indeterminate,
                value,
                None,
                "h quadrature did not converge",
            )
        } else if profile.decayed() {
            bullet(name, Verdict::Pass, value, None, note)
        } else {
            bullet(
                name,
                Verdict::Fail,
                value,
                None,
                format!("{note}: h has not decayed; integral grows with the range"),
            )
        };
        bullets.push(b);
    }

    let two_area = 2.0 * area;
    let neg = w.negative_part_sup(k_max);
    let product = neg * area * int_rh;
    bullets.push(bullet(
        "potential-negative-part",
        if !profile.decayed() && neg > 0.0 {
            Verdict::Indeterminate
        } else if product < two_area {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        product,
        Some(two_area),
        "‖(ŵ)_-‖_∞ ∫|h|/|x|^{d-2} < 2|S^{d-1}|",
    ));

    let eg = epsilon_g(&profile, 1.0, 10, 32);
    let w0 = w.hat_at_zero().max(0.0);
    let product = eg.value * w0;
    let verdict = if !eg.converged && w0 > 0.0 {
        if eg.interval.1 * w0 < two_area {
            Verdict::Pass
        } else if eg.interval.0 * w0 >= two_area {
            Verdict::Fail
        } else {
            Verdict::Indeterminate
        }
    } else if product < two_area {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    bullets.push(bullet(
        "potential-low-frequency",
        verdict,
        product,
        Some(two_area),
        "ε_g ŵ(0)_+ < 2|S^{d-1}|",
    ));

    Ok(HypothesisReport {
        dim,
        theorem_applies: dim >= 4,
        eps_g: eg.value,
        bullets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fermi_is_monotone_and_zero_temperature_is_not() {
        let w = Potential::delta(1.0).unwrap();
        let r = hypothesis_check(&Distribution::fermi(1.0, 0.0).unwrap(), &w, 4, 32.0).unwrap();
        assert_eq!(r.bullet("monotone").unwrap().verdict, Verdict::Pass);
        assert!(r.theorem_applies);
        let r = hypothesis_check(&Distribution::zero_temp_fermi(1.0).unwrap(), &w, 4, 32.0).unwrap();
        assert_eq!(r.bullet("monotone").unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn zero_distribution_integrals_vanish() {
        let r = hypothesis_check(&Distribution::zero(), &Potential::delta(1.0).unwrap(), 3, 8.0).unwrap();
        for name in [
            "weighted-l2-mass",
            "f-grad-f",
            "h-grad-h-integrable",
            "h-weighted-integrable",
        ] {
            let b = r.bullet(name).unwrap();
            assert_eq!(b.verdict, Verdict::Pass, "{name}");
            assert_eq!(b.value, 0.0, "{name}");
        }
    }
}
