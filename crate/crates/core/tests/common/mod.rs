//! Shared oracle machinery for the integration tests: spherical-harmonic
//! quadrature, a dense matrix exponential, and an adaptive Cash–Karp
//! integrator, all independent of the library's production paths.

#![allow(dead_code)]

use num_complex::Complex64;

/// Fully normalized associated Legendre values P̄_l^m(x) for m ≥ 0 such
/// that Y_l^m = P̄_l^m(cosθ)·e^{imφ} (Condon–Shortley phase included).
pub fn normalized_legendre(l_max: usize, m: usize, x: f64) -> Vec<f64> {
    assert!(m <= l_max);
    let mut out = vec![0.0; l_max + 1];
    let sx = (1.0 - x * x).max(0.0).sqrt();
    // P̄_m^m by upward recurrence in m
    let mut pmm = (1.0 / (4.0 * std::f64::consts::PI)).sqrt();
    for k in 1..=m {
        pmm *= -(((2 * k + 1) as f64) / ((2 * k) as f64)).sqrt() * sx;
    }
    out[m] = pmm;
    if m < l_max {
        out[m + 1] = ((2 * m + 3) as f64).sqrt() * x * pmm;
    }
    for l in (m + 2)..=l_max {
        let lf = l as f64;
        let mf = m as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b =
            (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
        out[l] = a * (x * out[l - 1] - b * out[l - 2]);
    }
    out
}

/// Y_l^m(θ, φ) for any sign of m.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Complex64 {
    let x = theta.cos();
    let ma = m.unsigned_abs() as usize;
    let p = normalized_legendre(l as usize, ma, x)[l as usize];
    let phase = Complex64::from_polar(1.0, ma as f64 * phi);
    if m >= 0 {
        p * phase
    } else {
        // Y_l^{-m} = (−1)^m · conj(Y_l^m)
        let sign = if ma % 2 == 0 { 1.0 } else { -1.0 };
        sign * p * phase.conj()
    }
}

/// ⟨J′,m′| f(θ,φ) |J,m⟩ by 2D quadrature: Gauss–Legendre in cosθ and the
/// trapezoid rule in φ (exact for the band-limited integrands here).
pub fn bra_op_ket_quadrature(
    jp: u32,
    mp: i32,
    j: u32,
    m: i32,
    f: impl Fn(f64, f64) -> f64,
) -> Complex64 {
    let n_theta = 64;
    let (xs, ws) = gauss_legendre_nodes(n_theta);
    let n_phi = 64;
    let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for (&x, &w) in xs.iter().zip(&ws) {
        let theta = x.acos();
        for k in 0..n_phi {
            let phi = k as f64 * dphi;
            let val = spherical_harmonic(jp, mp, theta, phi).conj()
                * f(theta, phi)
                * spherical_harmonic(j, m, theta, phi);
            acc += w * dphi * val;
        }
    }
    acc
}

/// Gauss–Legendre nodes/weights on [−1, 1] (local copy so the oracle does
/// not share the library's quadrature code).
pub fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
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
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Dense row-major complex matrix.
#[derive(Clone)]
pub struct DenseMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += self.data[i * n + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    fn one_norm(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| self.at(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// exp(M) by scaling and squaring with a Taylor series.
    pub fn expm(&self) -> DenseMatrix {
        let norm = self.one_norm();
        let s = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as u32
        } else {
            0
        };
        let scale = 2f64.powi(-(s as i32));
        let mut b = self.clone();
        for v in b.data.iter_mut() {
            *v *= scale;
        }
        let mut result = DenseMatrix::identity(self.n);
        let mut term = DenseMatrix::identity(self.n);
        for k in 1..200 {
            term = term.matmul(&b);
            let f = 1.0 / k as f64;
            for v in term.data.iter_mut() {
                *v *= f;
            }
            for (r, t) in result.data.iter_mut().zip(&term.data) {
                *r += t;
            }
            if term.one_norm() < 1e-20 * result.one_norm() {
                break;
            }
        }
        for _ in 0..s {
            result = result.matmul(&result);
        }
        result
    }
}

/// Adaptive Cash–Karp 4(5) integrator for small real ODE systems.
pub fn integrate_cash_karp(
    f: &mut dyn FnMut(f64, &[f64], &mut [f64]),
    y0: &[f64],
    t0: f64,
    t1: f64,
    rtol: f64,
    atol: f64,
) -> Vec<f64> {
    const A: [[f64; 5]; 5] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
        [3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0, 0.0, 0.0],
        [-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0, 0.0],
        [
            1631.0 / 55296.0,
            175.0 / 512.0,
            575.0 / 13824.0,
            44275.0 / 110592.0,
            253.0 / 4096.0,
        ],
    ];
    const B5: [f64; 6] = [
        37.0 / 378.0,
        0.0,
        250.0 / 621.0,
        125.0 / 594.0,
        0.0,
        512.0 / 1771.0,
    ];
    const B4: [f64; 6] = [
        2825.0 / 27648.0,
        0.0,
        18575.0 / 48384.0,
        13525.0 / 55296.0,
        277.0 / 14336.0,
        1.0 / 4.0,
    ];

    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut h = (t1 - t0) * 1e-6;
    let mut k = vec![vec![0.0; n]; 6];
    let mut ytmp = vec![0.0; n];

    while t < t1 {
        if t + h > t1 {
            h = t1 - t;
        }
        f(t, &y, &mut k[0]);
        for stage in 1..6 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kk) in k.iter().enumerate().take(stage) {
                    acc += A[stage - 1][j] * kk[i];
                }
                ytmp[i] = y[i] + h * acc;
            }
            let (head, tail) = k.split_at_mut(stage);
            let _ = head;
            f(t + h, &ytmp, &mut tail[0]);
        }
        let mut err: f64 = 0.0;
        let mut y5 = vec![0.0; n];
        for i in 0..n {
            let mut v5 = 0.0;
            let mut v4 = 0.0;
            for s in 0..6 {
                v5 += B5[s] * k[s][i];
                v4 += B4[s] * k[s][i];
            }
            y5[i] = y[i] + h * v5;
            let sc = atol + rtol * y[i].abs().max(y5[i].abs());
            err = err.max((h * (v5 - v4)).abs() / sc);
        }
        if err <= 1.0 {
            t += h;
            y = y5;
        }
        let fac = if err > 0.0 {
            (0.9 * err.powf(-0.25)).clamp(0.1, 5.0)
        } else {
            5.0
        };
        h *= fac;
        assert!(h > (t1 - t0) * 1e-14, "oracle integrator step underflow");
    }
    y
}

use moldeflect::classical::ClassicalRotorState;
use moldeflect::species::MolecularSpecies;
use moldeflect::thermal::ThermalSpec;

/// Reduced-unit equations of motion of a rotor in a z-polarized field of
/// dimensionless well depth w = ΔαE²/(4k_BT):
/// θ' = P'_θ, P'_θ' = P'_φ²·cosθ/sin³θ − w·sin2θ (P'_φ conserved).
pub fn rotor_deriv(theta: f64, p_theta: f64, p_phi: f64, w: f64) -> (f64, f64) {
    let s = theta.sin();
    (
        p_theta,
        p_phi * p_phi * theta.cos() / (s * s * s) - w * (2.0 * theta).sin(),
    )
}

/// Reduced energy ½P'_θ² + ½P'_φ²/sin²θ − w·cos²θ.
pub fn rotor_energy(theta: f64, p_theta: f64, p_phi: f64, w: f64) -> f64 {
    let s = theta.sin();
    0.5 * p_theta * p_theta + 0.5 * (p_phi / s) * (p_phi / s) - w * theta.cos() * theta.cos()
}

pub struct RampOracleOutcome {
    /// Plateau time average of cos²θ from the ODE.
    pub mean_u: f64,
    /// Plateau reduced energy (without the −w_perp constant).
    pub mean_energy: f64,
    pub min_u: f64,
    pub max_u: f64,
}

/// Integrates a rotor through a smooth field ramp (0 → w_peak over
/// `ramp_periods` initial rotor periods) and time-averages u = cos²θ over
/// `avg_periods` more at constant field.
pub fn slow_ramp_oracle(
    state: &ClassicalRotorState,
    w_peak: f64,
    ramp_periods: f64,
    avg_periods: f64,
) -> RampOracleOutcome {
    let omega0 = state.omega();
    let t_rot = 2.0 * std::f64::consts::PI / omega0;
    let t_ramp = ramp_periods * t_rot;
    let t_avg = avg_periods * t_rot;
    let p_phi = state.p_phi;

    let ramp = move |t: f64| -> f64 {
        if t >= t_ramp {
            w_peak
        } else {
            let x = t / t_ramp;
            w_peak * (0.5 * std::f64::consts::PI * x).sin().powi(2)
        }
    };

    // y = [θ, P'_θ, ∫u dt, ∫H' dt] with the averaging integrals only
    // accumulating past the ramp
    let mut f = move |t: f64, y: &[f64], dy: &mut [f64]| {
        let w = ramp(t);
        let (dth, dpt) = rotor_deriv(y[0], y[1], p_phi, w);
        dy[0] = dth;
        dy[1] = dpt;
        if t >= t_ramp {
            let u = y[0].cos() * y[0].cos();
            dy[2] = u;
            dy[3] = rotor_energy(y[0], y[1], p_phi, w);
        } else {
            dy[2] = 0.0;
            dy[3] = 0.0;
        }
    };

    // track the u excursion on the plateau with a fine sampling pass
    let y_ramp_end = integrate_cash_karp(
        &mut f,
        &[state.theta, state.p_theta, 0.0, 0.0],
        0.0,
        t_ramp,
        1e-10,
        1e-12,
    );
    let mut y = y_ramp_end;
    let mut min_u = f64::INFINITY;
    let mut max_u = f64::NEG_INFINITY;
    let n_chunks = 400;
    for k in 0..n_chunks {
        let t0 = t_ramp + t_avg * k as f64 / n_chunks as f64;
        let t1 = t_ramp + t_avg * (k + 1) as f64 / n_chunks as f64;
        y = integrate_cash_karp(&mut f, &y, t0, t1, 1e-10, 1e-12);
        let u = y[0].cos() * y[0].cos();
        min_u = min_u.min(u);
        max_u = max_u.max(u);
    }
    RampOracleOutcome {
        mean_u: y[2] / t_avg,
        mean_energy: y[3] / t_avg,
        min_u,
        max_u,
    }
}

/// Dimensionless well depth w = ΔαE²/(4·k_B·T) for a species at a given
/// squared field.
pub fn well_depth_reduced(
    species: &MolecularSpecies,
    thermal: &ThermalSpec,
    e_squared: f64,
) -> f64 {
    species.alpha_aniso_si() * e_squared / (4.0 * thermal.thermal_energy(species))
}
