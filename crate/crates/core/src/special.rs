//! Bessel functions of integer order and the radial Fourier kernels built from them.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// `J_n(z)` for integer `n ≥ 0` and real `z`.
///
/// Small and moderate arguments use the trapezoidal rule on the periodic
/// integral `(1/π)∫_0^π cos(nθ - z sin θ) dθ`, which converges geometrically
/// once the node count exceeds `|z|`. Large arguments use Hankel's expansion.
pub fn bessel_j(n: u32, z: f64) -> f64 {
    if z < 0.0 {
        let v = bessel_j(n, -z);
        return if n % 2 == 0 { v } else { -v };
    }
    if z >= 25.0 + n as f64 * n as f64 {
        return hankel_asymptotic(n, z);
    }
    bessel_trapezoid(n, z)
}

fn bessel_trapezoid(n: u32, z: f64) -> f64 {
    let m = z.ceil() as usize + 25 + n as usize;
    let h = PI / m as f64;
    let nf = n as f64;
    // endpoint values: cos(0) = 1 and cos(nπ)
    let mut s = 0.5 * (1.0 + if n % 2 == 0 { 1.0 } else { -1.0 });
    for k in 1..m {
        let t = k as f64 * h;
        s += (nf * t - z * t.sin()).cos();
    }
    s / m as f64
}

fn hankel_asymptotic(n: u32, z: f64) -> f64 {
    let mu = 4.0 * (n as f64).powi(2);
    let chi = z - n as f64 * FRAC_PI_2 - FRAC_PI_4;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..60 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            term *= (mu - odd * odd) / (k as f64 * 8.0 * z);
        }
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Surface area `|S^{d-1}|` of the unit sphere in `ℝ^d`.
pub fn sphere_area(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        _ => {
            let hd = d as f64 / 2.0;
            2.0 * PI.powf(hd) / gamma_half_integer(d)
        }
    }
}

/// `Γ(d/2)` for positive integer `d`.
fn gamma_half_integer(d: usize) -> f64 {
    let mut g = if d % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut x = if d % 2 == 0 { 1.0 } else { 0.5 };
    while x < d as f64 / 2.0 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Angular average of `e^{iξ·x}` over the sphere of radius `r`, times its
/// area: `∫_{S^{d-1}} e^{i z ω·e} dω` with `z = r|x|`.
///
/// `d=1: 2cos z`, `d=2: 2π J_0(z)`, `d=3: 4π sin z / z`, `d=4: 4π² J_1(z)/z`.
pub fn radial_kernel(d: usize, z: f64) -> f64 {
    let z = z.abs();
    match d {
        1 => 2.0 * z.cos(),
        2 => 2.0 * PI * bessel_j(0, z),
        3 => {
            if z < 1e-4 {
                4.0 * PI * (1.0 - z * z / 6.0)
            } else {
                4.0 * PI * z.sin() / z
            }
        }
        4 => {
            if z < 1e-4 {
                2.0 * PI * PI * (1.0 - z * z / 8.0)
            } else {
                4.0 * PI * PI * bessel_j(1, z) / z
            }
        }
        _ => panic!("radial kernel implemented for d in 1..=4, got {d}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Power series, accurate for small arguments; independent of both code paths.
    fn series(n: u32, z: f64) -> f64 {
        let mut term = (z / 2.0).powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
        let mut s = term;
        for k in 1..80 {
            term *= -(z * z / 4.0) / (k as f64 * (k + n) as f64);
            s += term;
        }
        s
    }

    #[test]
    fn matches_series_for_moderate_arguments() {
        for n in 0..3 {
            for i in 0..60 {
                let z = 0.1 * i as f64;
                assert!((bessel_j(n, z) - series(n, z)).abs() < 1e-14, "n={n} z={z}");
            }
        }
    }

    #[test]
    fn known_values() {
        // J0(1), J1(1), first zero of J0
        assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(1, 1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!(bessel_j(0, 2.404_825_557_695_773).abs() < 1e-14);
        assert!((bessel_j(0, 30.0) - (-0.086_367_983_581_040_22)).abs() < 1e-14);
        assert!((bessel_j(1, 100.0) - (-0.077_145_352_014_112_16)).abs() < 1e-14);
    }

    #[test]
    fn branches_agree_at_switch() {
        for n in 0..2 {
            let z = 25.0 + (n * n) as f64;
            let a = hankel_asymptotic(n, z);
            let b = bessel_trapezoid(n, z);
            assert!((a - b).abs() < 1e-13, "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-14);
    }

    #[test]
    fn kernels_at_zero_equal_sphere_area() {
        for d in 1..=4 {
            assert!((radial_kernel(d, 0.0) - sphere_area(d)).abs() < 1e-13);
        }
    }
}
