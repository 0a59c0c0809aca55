//! Classical rigid-rotor treatment of the weak-deflecting-field regime:
//! thermal sampling, δ-kick maps, the closed-form time-averaged alignment
//! factor, Monte Carlo distributions, analytic rainbow laws and the
//! strong-kick asymptotics.
//!
//! All rotor state variables are dimensionless: canonical momenta in units
//! of p_th = √(I·k_B·T), time in units of 1/ω_th.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::histogram::{Histogram, SampleSummary};
use crate::pulse::{KickAxis, KickPulse};
use crate::rng::RngSpec;
use crate::species::MolecularSpecies;
use crate::thermal::ThermalSpec;

/// Classical rotor phase-space point in thermal reduced units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalRotorState {
    /// Polar angle of the molecular axis, θ ∈ (0, π).
    pub theta: f64,
    /// Azimuth φ ∈ [0, 2π).
    pub phi: f64,
    /// P'_θ in units of p_th.
    pub p_theta: f64,
    /// P'_φ in units of p_th.
    pub p_phi: f64,
}

impl ClassicalRotorState {
    /// Angular frequency ω = √(P'_θ² + P'_φ²/sin²θ) of the free rotation.
    pub fn omega(&self) -> f64 {
        let s = self.theta.sin();
        (self.p_theta * self.p_theta + (self.p_phi / s) * (self.p_phi / s)).sqrt()
    }

    /// cosθ(t') of the free rotor:
    /// cosθ₀·cos(ωt') − (P'_θ/ω)·sinθ₀·sin(ωt').
    pub fn cos_theta_at(&self, t: f64) -> f64 {
        let w = self.omega();
        let (s, c) = (w * t).sin_cos();
        self.theta.cos() * c - self.p_theta / w * self.theta.sin() * s
    }
}

/// Monte Carlo ensemble request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub n_samples: usize,
    pub thermal: ThermalSpec,
    pub rng: RngSpec,
}

impl EnsembleSpec {
    pub fn new(n_samples: usize, thermal: ThermalSpec, rng: RngSpec) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::InvalidSpec("need at least one sample".into()));
        }
        Ok(Self {
            n_samples,
            thermal,
            rng,
        })
    }
}

/// Draws the thermal rotor state with sample index `index`.
///
/// θ has density ½sinθ (cosθ uniform), φ is uniform, P'_θ is standard
/// normal and P'_φ is normal with standard deviation sinθ, which realizes
/// F ∝ exp[−½(P'_θ² + P'_φ²/sin²θ)].
pub fn sample_thermal_state(rng_spec: &RngSpec, index: u64) -> ClassicalRotorState {
    let mut rng = rng_spec.substream(index);
    let cos_theta: f64 = 1.0 - 2.0 * rng.gen::<f64>();
    let theta = cos_theta.clamp(-1.0, 1.0).acos();
    let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    let p_theta: f64 = rng.sample(StandardNormal);
    let g: f64 = rng.sample(StandardNormal);
    let p_phi = g * theta.sin();
    ClassicalRotorState {
        theta,
        phi,
        p_theta,
        p_phi,
    }
}

/// Draws `spec.n_samples` thermal states (deterministic per index).
pub fn sample_thermal(spec: &EnsembleSpec) -> Vec<ClassicalRotorState> {
    (0..spec.n_samples as u64)
        .into_par_iter()
        .map(|i| sample_thermal_state(&spec.rng, i))
        .collect()
}

/// Impulsive kick map: angles are frozen, momenta jump.
///
/// z-kick: P'_θ ← P'_θ − P'_s·sin2θ;
/// x-kick: P'_θ ← P'_θ + P'_s·cos²φ·sin2θ, P'_φ ← P'_φ − P'_s·sin²θ·sin2φ.
pub fn apply_kick(
    state: &ClassicalRotorState,
    p_s: f64,
    polarization: KickAxis,
) -> ClassicalRotorState {
    let mut out = *state;
    match polarization {
        KickAxis::ZParallel => {
            out.p_theta -= p_s * (2.0 * state.theta).sin();
        }
        KickAxis::XPerpendicular => {
            let c2phi = state.phi.cos() * state.phi.cos();
            out.p_theta += p_s * c2phi * (2.0 * state.theta).sin();
            out.p_phi -= p_s * state.theta.sin().powi(2) * (2.0 * state.phi).sin();
        }
    }
    out
}

/// Time-averaged alignment factor of the free rotor:
/// A = ¼[1 + (P'_θ/ω)²] + ¼[1 − (P'_θ/ω)²]·cos2θ.
pub fn time_averaged_alignment(state: &ClassicalRotorState) -> Result<f64> {
    let w = state.omega();
    if w == 0.0 || !w.is_finite() {
        return Err(Error::DegenerateRotor);
    }
    let r2 = (state.p_theta / w) * (state.p_theta / w);
    let a = 0.25 * (1.0 + r2) + 0.25 * (1.0 - r2) * (2.0 * state.theta).cos();
    Ok(a)
}

/// Monte Carlo distribution of the time-averaged alignment factor.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentDistribution {
    pub samples: Vec<f64>,
    /// Degenerate rotors dropped from the ensemble (measure zero).
    pub rejected: usize,
}

impl AlignmentDistribution {
    pub fn histogram(&self, bins: usize) -> Result<Histogram> {
        Histogram::from_samples(0.0, 1.0, bins, &self.samples)
    }

    pub fn summary(&self) -> SampleSummary {
        SampleSummary::from_samples(&self.samples)
    }
}

/// Samples the thermal ensemble, applies the optional prealignment kick and
/// returns the distribution of A. The reduced kick strength is
/// P'_s = P·ħ/√(k_B·T·I).
pub fn ensemble_alignment_distribution(
    species: &MolecularSpecies,
    spec: &EnsembleSpec,
    pulse: Option<&KickPulse>,
) -> AlignmentDistribution {
    let kick = pulse.map(|k| {
        (
            k.reduced_kick_strength(species, &spec.thermal),
            k.polarization,
        )
    });
    let raw: Vec<Option<f64>> = (0..spec.n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut st = sample_thermal_state(&spec.rng, i);
            if let Some((p_s, axis)) = kick {
                st = apply_kick(&st, p_s, axis);
            }
            time_averaged_alignment(&st).ok()
        })
        .collect();
    let rejected = raw.iter().filter(|v| v.is_none()).count();
    AlignmentDistribution {
        samples: raw.into_iter().flatten().collect(),
        rejected,
    }
}

/// Analytic rainbow reference law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RainbowVariant {
    /// Thermal ensemble: f(A) = 1/√(1−2A) on [0, ½).
    Thermal,
    /// Perpendicular prealignment: f(A) = (√2/π)/√(A(1−2A)) on (0, ½).
    Perpendicular,
}

/// Reference probability density of A; zero outside the support.
pub fn rainbow_reference_pdf(a: f64, variant: RainbowVariant) -> f64 {
    match variant {
        RainbowVariant::Thermal => {
            if (0.0..0.5).contains(&a) {
                1.0 / (1.0 - 2.0 * a).sqrt()
            } else {
                0.0
            }
        }
        RainbowVariant::Perpendicular => {
            if a > 0.0 && a < 0.5 {
                std::f64::consts::SQRT_2 / std::f64::consts::PI / (a * (1.0 - 2.0 * a)).sqrt()
            } else {
                0.0
            }
        }
    }
}

/// Closed-form CDF of the rainbow laws (for KS tests).
pub fn rainbow_reference_cdf(a: f64, variant: RainbowVariant) -> f64 {
    let x = a.clamp(0.0, 0.5);
    match variant {
        RainbowVariant::Thermal => 1.0 - (1.0 - 2.0 * x).sqrt(),
        RainbowVariant::Perpendicular => {
            2.0 / std::f64::consts::PI * (2.0 * x).sqrt().min(1.0).asin()
        }
    }
}

/// Strong-kick asymptotics of the parallel-prealigned distribution:
/// ⟨A⟩ = ½ − (√π/8)·(J_T/P), (ΔA)² = (√π/32)·(J_T/P).
pub fn parallel_kick_asymptotics(p: f64, j_t: f64) -> (f64, f64) {
    let ratio = j_t / p;
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let mean = 0.5 - sqrt_pi / 8.0 * ratio;
    let var = sqrt_pi / 32.0 * ratio;
    (mean, var.sqrt())
}

/// Ensemble-averaged ⟨cos²θ⟩(t') from the closed-form free-rotor solution.
/// Degenerate rotors are dropped; the count is returned alongside.
pub fn classical_alignment_trace(
    states: &[ClassicalRotorState],
    times: &[f64],
) -> (Vec<f64>, usize) {
    let valid: Vec<&ClassicalRotorState> = states
        .iter()
        .filter(|s| s.omega() > 0.0 && s.omega().is_finite())
        .collect();
    let rejected = states.len() - valid.len();
    let trace: Vec<f64> = times
        .par_iter()
        .map(|&t| {
            let sum: f64 = valid
                .iter()
                .map(|s| {
                    let c = s.cos_theta_at(t);
                    c * c
                })
                .sum();
            sum / valid.len() as f64
        })
        .collect();
    (trace, rejected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::cs2;

    fn spec(n: usize, jt: f64, seed: u64) -> EnsembleSpec {
        EnsembleSpec::new(
            n,
            ThermalSpec::from_j_thermal(jt).unwrap(),
            RngSpec::new(seed),
        )
        .unwrap()
    }

    #[test]
    fn thermal_sampling_moments() {
        let sp = spec(1_000_000, 15.0, 11);
        let states = sample_thermal(&sp);
        let n = states.len() as f64;
        let mean_cos2: f64 = states.iter().map(|s| s.theta.cos().powi(2)).sum::<f64>() / n;
        let mean_pt2: f64 = states.iter().map(|s| s.p_theta * s.p_theta).sum::<f64>() / n;
        let mean_pf2: f64 = states
            .iter()
            .map(|s| (s.p_phi / s.theta.sin()).powi(2))
            .sum::<f64>()
            / n;
        assert!(
            (mean_cos2 - 1.0 / 3.0).abs() < 0.002,
            "⟨cos²θ⟩ = {mean_cos2}"
        );
        assert!((mean_pt2 - 1.0).abs() < 0.005, "⟨P'_θ²⟩ = {mean_pt2}");
        assert!((mean_pf2 - 1.0).abs() < 0.005, "⟨P'_φ²/sin²θ⟩ = {mean_pf2}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_thermal_state(&RngSpec::new(3), 17);
        let b = sample_thermal_state(&RngSpec::new(3), 17);
        assert_eq!(a, b);
    }

    #[test]
    fn zero_kick_is_identity_and_equator_fixed_point() {
        let st = ClassicalRotorState {
            theta: 1.1,
            phi: 0.4,
            p_theta: 0.3,
            p_phi: -0.2,
        };
        assert_eq!(apply_kick(&st, 0.0, KickAxis::ZParallel), st);

        let eq = ClassicalRotorState {
            theta: std::f64::consts::FRAC_PI_2,
            ..st
        };
        let kicked = apply_kick(&eq, 3.0, KickAxis::ZParallel);
        assert!((kicked.p_theta - eq.p_theta).abs() < 1e-15);
    }

    #[test]
    fn z_kick_conserves_p_phi() {
        let st = ClassicalRotorState {
            theta: 0.8,
            phi: 2.0,
            p_theta: -0.5,
            p_phi: 0.7,
        };
        let kicked = apply_kick(&st, 4.0, KickAxis::ZParallel);
        assert_eq!(kicked.p_phi, st.p_phi);
        assert_eq!(kicked.theta, st.theta);
        assert_eq!(kicked.phi, st.phi);
    }

    #[test]
    fn alignment_closed_form_limits() {
        // rotation confined to the xy-plane → A = 0
        let planar = ClassicalRotorState {
            theta: std::f64::consts::FRAC_PI_2,
            phi: 0.0,
            p_theta: 0.0,
            p_phi: 1.0,
        };
        assert!(time_averaged_alignment(&planar).unwrap().abs() < 1e-15);

        // great circle through the poles → A = 1/2
        let polar = ClassicalRotorState {
            theta: 0.7,
            phi: 1.0,
            p_theta: 0.9,
            p_phi: 0.0,
        };
        assert!((time_averaged_alignment(&polar).unwrap() - 0.5).abs() < 1e-15);

        // degenerate rotor errors out
        let frozen = ClassicalRotorState {
            theta: 0.7,
            phi: 1.0,
            p_theta: 0.0,
            p_phi: 0.0,
        };
        assert!(matches!(
            time_averaged_alignment(&frozen),
            Err(Error::DegenerateRotor)
        ));
    }

    #[test]
    fn free_alignment_never_exceeds_half() {
        let sp = spec(100_000, 5.0, 5);
        let d = ensemble_alignment_distribution(&cs2(), &sp, None);
        assert_eq!(d.rejected, 0);
        for &a in &d.samples {
            assert!((0.0..=0.5 + 1e-12).contains(&a));
        }
    }

    #[test]
    fn rainbow_laws_normalized() {
        // numeric integral of both pdfs over the support = 1 within 1e−10;
        // the substitution A = ½sin²x removes the endpoint singularities
        for variant in [RainbowVariant::Thermal, RainbowVariant::Perpendicular] {
            assert!((rainbow_reference_cdf(0.5, variant) - 1.0).abs() < 1e-12);
            assert!(rainbow_reference_cdf(0.0, variant).abs() < 1e-12);
            let integrand = |x: f64| {
                let a = 0.5 * x.sin() * x.sin();
                rainbow_reference_pdf(a, variant) * x.sin() * x.cos()
            };
            let total = crate::quadrature::integrate_adaptive(
                0.0,
                std::f64::consts::FRAC_PI_2,
                1e-12,
                &integrand,
            )
            .unwrap();
            assert!((total - 1.0).abs() < 1e-10, "{variant:?}: ∫f = {total}");
        }
        // densities: thermal flat step at A = 0; perpendicular divergent at
        // both edges
        assert!((rainbow_reference_pdf(0.0, RainbowVariant::Thermal) - 1.0).abs() < 1e-15);
        assert!(rainbow_reference_pdf(1e-9, RainbowVariant::Perpendicular) > 1e3);
        assert!(rainbow_reference_pdf(0.5 - 1e-9, RainbowVariant::Perpendicular) > 1e3);
        assert_eq!(rainbow_reference_pdf(0.7, RainbowVariant::Thermal), 0.0);
    }

    #[test]
    fn asymptotics_by_direct_substitution() {
        let (mean, std) = parallel_kick_asymptotics(25.0, 5.0);
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert_eq!(mean, 0.5 - sqrt_pi / 8.0 * 0.2);
        assert_eq!(std, (sqrt_pi / 32.0 * 0.2).sqrt());
        assert!((mean - 0.45569).abs() < 1e-4);
        assert!((std - 0.10525).abs() < 1e-4);

        // infinite-kick limit
        let (m_inf, s_inf) = parallel_kick_asymptotics(1e12, 1.0);
        assert!((m_inf - 0.5).abs() < 1e-12);
        assert!(s_inf < 1e-5);
    }

    #[test]
    fn trace_starts_isotropic() {
        let sp = spec(1_000_000, 5.0, 21);
        let states = sample_thermal(&sp);
        let (trace, rejected) = classical_alignment_trace(&states, &[0.0]);
        assert_eq!(rejected, 0);
        assert!(
            (trace[0] - 1.0 / 3.0).abs() < 0.002,
            "⟨cos²θ⟩(0) = {}",
            trace[0]
        );
    }

    #[test]
    fn long_time_trace_average_matches_mean_alignment() {
        let sp = spec(2000, 5.0, 8);
        let states = sample_thermal(&sp);
        let mean_a: f64 = states
            .iter()
            .map(|s| time_averaged_alignment(s).unwrap())
            .sum::<f64>()
            / states.len() as f64;
        let t_max = 2000.0;
        let n_t = 20_000;
        let times: Vec<f64> = (0..n_t)
            .map(|i| (i as f64 + 0.5) * t_max / n_t as f64)
            .collect();
        let (trace, _) = classical_alignment_trace(&states, &times);
        let avg = trace.iter().sum::<f64>() / n_t as f64;
        assert!((avg - mean_a).abs() < 1e-3, "{avg} vs {mean_a}");
    }

    #[test]
    fn huge_kick_drives_mean_to_half_with_vanishing_variance() {
        // P/J_T = 50: the ensemble gathers at the maximal alignment with
        // moments following the asymptotic trend
        let s = cs2();
        let jt = 5.0;
        let p = 250.0;
        let sp = spec(200_000, jt, 77);
        let pulse =
            crate::pulse::KickPulse::from_strength(p, crate::pulse::KickAxis::ZParallel).unwrap();
        let d = ensemble_alignment_distribution(&s, &sp, Some(&pulse));
        let n = d.samples.len() as f64;
        let mean = d.samples.iter().sum::<f64>() / n;
        let var = d.samples.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
        let (a_mean, a_std) = parallel_kick_asymptotics(p, jt);
        assert!(mean > 0.49 && mean < 0.5, "mean = {mean}");
        // the deficit ½ − ⟨A⟩ follows the asymptotic deficit
        let deficit_ratio = (0.5 - mean) / (0.5 - a_mean);
        assert!(
            (deficit_ratio - 1.0).abs() < 0.1,
            "½−mean ratio = {deficit_ratio}"
        );
        assert!(
            (var.sqrt() - a_std).abs() / a_std < 0.05,
            "std {} vs asymptotic {a_std}",
            var.sqrt()
        );
    }
}
