//! Gauss–Legendre quadrature with a cached node ladder for
//! convergence-by-doubling integration.

use std::sync::OnceLock;

/// Orders used by the doubling ladder.
pub const LADDER_ORDERS: [usize; 6] = [64, 128, 256, 512, 1024, 2048];

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
///
/// Newton iteration on P_n with the Chebyshev-like initial guess; accurate
/// to machine precision for the orders used here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(z) and P'_n(z)
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j as f64 + 1.0) * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            pp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * pp * pp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn ladder() -> &'static Vec<(Vec<f64>, Vec<f64>)> {
    static LADDER: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    LADDER.get_or_init(|| LADDER_ORDERS.iter().map(|&n| gauss_legendre(n)).collect())
}

/// Precomputed (sin²ψ, cos²ψ, weight) tables for the ladder rules mapped
/// onto ψ ∈ [0, π/2]; integrands built on the sin²ψ substitution need no
/// trigonometry per node.
pub fn psi_tables() -> &'static Vec<Vec<(f64, f64, f64)>> {
    static TABLES: OnceLock<Vec<Vec<(f64, f64, f64)>>> = OnceLock::new();
    TABLES.get_or_init(|| {
        ladder()
            .iter()
            .map(|(xs, ws)| {
                let c = std::f64::consts::FRAC_PI_4;
                xs.iter()
                    .zip(ws)
                    .map(|(&x, &w)| {
                        let psi = c * (x + 1.0);
                        let (s, co) = psi.sin_cos();
                        (s * s, co * co, w * c)
                    })
                    .collect()
            })
            .collect()
    })
}

/// Integrates a ψ-substituted integrand over [0, π/2] with order doubling
/// until successive rules agree to `rtol`.
pub fn integrate_psi(rtol: f64, mut f: impl FnMut(f64, f64) -> f64) -> Option<f64> {
    integrate_psi_pair(rtol, move |s2, c2| {
        let v = f(s2, c2);
        (v, 0.0)
    })
    .map(|(a, _)| a)
}

/// Integrates a pair of ψ-substituted integrands over [0, π/2] with order
/// doubling until both agree to `rtol`; `f` maps (sin²ψ, cos²ψ) to the two
/// integrand values.
pub fn integrate_psi_pair(
    rtol: f64,
    mut f: impl FnMut(f64, f64) -> (f64, f64),
) -> Option<(f64, f64)> {
    let tables = psi_tables();
    let eval = |f: &mut dyn FnMut(f64, f64) -> (f64, f64), idx: usize| -> (f64, f64) {
        let mut a = 0.0;
        let mut b = 0.0;
        for &(s2, c2, w) in &tables[idx] {
            let (va, vb) = f(s2, c2);
            a += w * va;
            b += w * vb;
        }
        (a, b)
    };
    let close = |x: f64, y: f64| -> bool {
        (x - y).abs() <= rtol * x.abs().max(y.abs()) || (x == 0.0 && y == 0.0)
    };
    let mut prev = eval(&mut f, 0);
    for idx in 1..LADDER_ORDERS.len() {
        let cur = eval(&mut f, idx);
        if close(cur.0, prev.0) && close(cur.1, prev.1) {
            return Some(cur);
        }
        prev = cur;
    }
    None
}

/// ∫_a^b f(x)dx with the n-point rule from the cached ladder.
pub fn integrate_fixed(ladder_idx: usize, a: f64, b: f64, f: &dyn Fn(f64) -> f64) -> f64 {
    let (xs, ws) = &ladder()[ladder_idx];
    let c = 0.5 * (b - a);
    let d = 0.5 * (b + a);
    let mut acc = 0.0;
    for (&x, &w) in xs.iter().zip(ws) {
        acc += w * f(c * x + d);
    }
    c * acc
}

/// Integrates with order doubling until two successive rules agree to
/// `rtol` relatively; returns `None` when the ladder is exhausted.
pub fn integrate_adaptive(a: f64, b: f64, rtol: f64, f: &dyn Fn(f64) -> f64) -> Option<f64> {
    let mut prev = integrate_fixed(0, a, b, f);
    for idx in 1..LADDER_ORDERS.len() {
        let cur = integrate_fixed(idx, a, b, f);
        if (cur - prev).abs() <= rtol * cur.abs().max(prev.abs()) || (cur == 0.0 && prev == 0.0) {
            return Some(cur);
        }
        prev = cur;
    }
    None
}
