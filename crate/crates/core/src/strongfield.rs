//! Strong-deflecting-field treatment via adiabatic invariants.
//!
//! With u = cos²θ, the polar motion obeys (du/dt)² = g(u) where
//! g(u) = 4u[(1−u)β − (P_φ/I)² + (1−u)αu],
//! α = ΔαE²/(2I) and β = (2/I)(H + ¼E²α⊥). One root of g is pinned at
//! u = 0; the motion oscillates between the middle and upper roots. The
//! action I_θ = (I/4)∫√g/(u(1−u))du is conserved while the field envelope
//! varies slowly, which turns the energy inside the beam into the root of
//! I_θ(H, E) = I_θ(H₀, 0).

use rayon::prelude::*;

use crate::classical::{apply_kick, sample_thermal_state, ClassicalRotorState, EnsembleSpec};
use crate::constants::field_squared_from_intensity;
use crate::error::{Error, Result};
use crate::histogram::{Histogram, SampleSummary};
use crate::pulse::KickPulse;
use crate::quadrature;
use crate::species::MolecularSpecies;
use crate::thermal::ThermalSpec;

/// Relative convergence target of the action quadrature.
const QUAD_RTOL: f64 = 1e-10;
/// Roots this close to zero are snapped onto the guaranteed u = 0 root.
const ROOT_SNAP: f64 = 1e-12;
/// Relative tolerance of the energy solve.
const SOLVE_RTOL: f64 = 1e-10;

/// Coefficients of g(u) for one molecule at one field value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldCoefficients {
    /// ΔαE²/(2I) (s⁻²).
    pub alpha: f64,
    /// (2/I)(H + ¼E²α⊥) (s⁻²).
    pub beta: f64,
    /// P_φ/I (s⁻¹).
    pub p_phi_over_i: f64,
}

impl FieldCoefficients {
    /// Builds the coefficients from energy H (J), squared field amplitude
    /// E² (V²/m²) and angular momentum projection P_φ (J·s).
    pub fn new(species: &MolecularSpecies, h: f64, e_squared: f64, p_phi: f64) -> Self {
        let inertia = species.moment_of_inertia();
        FieldCoefficients {
            alpha: species.alpha_aniso_si() * e_squared / (2.0 * inertia),
            beta: 2.0 / inertia * (h + 0.25 * e_squared * species.alpha_perp_si()),
            p_phi_over_i: p_phi / inertia,
        }
    }
}

/// g(u) = 4u[(1−u)β − (P_φ/I)² + (1−u)αu] (s⁻²).
pub fn g_polynomial(u: f64, c: &FieldCoefficients) -> f64 {
    let pphi2 = c.p_phi_over_i * c.p_phi_over_i;
    4.0 * u * ((1.0 - u) * c.beta - pphi2 + (1.0 - u) * c.alpha * u)
}

/// Character of the polar motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Full rotation through the equator; oscillation on [0, u3].
    Rotating,
    /// Field-trapped libration on [u2, u3] with u2 > 0.
    Pendular,
    /// Double root at u = 0 within tolerance.
    Separatrix,
}

/// Sorted roots of g(u) with the motion classified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootTriple {
    /// The root below the oscillation interval: negative for a rotating
    /// molecule in a field, absent when α = 0 collapses the cubic.
    pub u1: Option<f64>,
    /// Lower edge of the oscillation interval (0 when rotating).
    pub u2: f64,
    /// Upper edge of the oscillation interval.
    pub u3: f64,
    pub regime: Regime,
}

impl RootTriple {
    pub fn oscillation_interval(&self) -> (f64, f64) {
        (self.u2, self.u3)
    }
}

/// Deflates the pinned u = 0 root and solves the remaining quadratic
/// α·u² − (α − β)·u − (β − (P_φ/I)²) = 0 in closed form.
pub fn find_roots(c: &FieldCoefficients) -> Result<RootTriple> {
    if c.alpha < 0.0 {
        // Δα < 0 flips the well onto the equator; the rotating/pendular
        // classification below assumes an aligning potential
        return Err(Error::InadmissibleState(
            "negative-anisotropy strong-field dynamics not supported".into(),
        ));
    }
    let pphi2 = c.p_phi_over_i * c.p_phi_over_i;
    let a = c.alpha;
    let b = c.beta - c.alpha;
    let c0 = pphi2 - c.beta;

    let polish = |u: f64| -> f64 {
        // one Newton step on Q(u) = −αu² + (α−β)u + (β − pφ²)
        let q = -a * u * u - b * u - c0;
        let dq = -2.0 * a * u - b;
        if dq != 0.0 {
            u - q / dq
        } else {
            u
        }
    };

    let snap = |u: f64| -> f64 {
        if u.abs() <= ROOT_SNAP {
            0.0
        } else {
            u
        }
    };

    let (mut r_lo, mut r_hi);
    if a == 0.0 {
        if c.beta <= 0.0 {
            return Err(Error::InadmissibleState(format!(
                "free rotor with non-positive β = {:.3e}",
                c.beta
            )));
        }
        let u3 = snap(1.0 - pphi2 / c.beta);
        if u3 < 0.0 {
            return Err(Error::InadmissibleState(
                "free rotor with |P_φ| > |J|".into(),
            ));
        }
        return Ok(RootTriple {
            u1: None,
            u2: 0.0,
            u3: u3.min(1.0),
            regime: Regime::Rotating,
        });
    } else {
        let disc = b * b - 4.0 * a * c0;
        if disc < 0.0 {
            return Err(Error::InadmissibleState(format!(
                "no real oscillation interval (discriminant {disc:.3e})"
            )));
        }
        let sq = disc.sqrt();
        // stable quadratic roots: q = −(b + sign(b)·√disc)/2
        let q = -0.5 * (b + b.signum() * sq);
        let (ra, rb) = if q != 0.0 {
            (q / a, c0 / q)
        } else {
            (0.0, 0.0)
        };
        r_lo = ra.min(rb);
        r_hi = ra.max(rb);
    }

    r_lo = snap(polish(r_lo));
    r_hi = snap(polish(r_hi));

    if r_hi < 0.0 {
        return Err(Error::InadmissibleState(format!(
            "oscillation interval empty (upper root {r_hi:.3e})"
        )));
    }
    // g(1) = −4(P_φ/I)² ≤ 0 keeps the physical root at or below one; trim
    // rounding excess.
    r_hi = r_hi.min(1.0);

    if r_lo > 0.0 {
        if r_lo > r_hi {
            return Err(Error::InadmissibleState(
                "quadratic roots out of order after polish".into(),
            ));
        }
        Ok(RootTriple {
            u1: Some(0.0),
            u2: r_lo,
            u3: r_hi,
            regime: Regime::Pendular,
        })
    } else if r_lo == 0.0 {
        Ok(RootTriple {
            u1: Some(0.0),
            u2: 0.0,
            u3: r_hi,
            regime: Regime::Separatrix,
        })
    } else {
        Ok(RootTriple {
            u1: Some(r_lo),
            u2: 0.0,
            u3: r_hi,
            regime: Regime::Rotating,
        })
    }
}

/// Smooth factor w(u) with g(u) = 4·w(u)·(u − u_lo)(u_hi − u) on the
/// oscillation interval.
fn smooth_factor(c: &FieldCoefficients, roots: &RootTriple, u: f64) -> f64 {
    match roots.regime {
        Regime::Pendular => c.alpha * u,
        Regime::Rotating | Regime::Separatrix => {
            if c.alpha == 0.0 {
                c.beta
            } else {
                c.alpha * (u - roots.u1.unwrap_or(0.0))
            }
        }
    }
}

/// Substitution u = u_lo + (u_hi − u_lo)·sin²ψ evaluated stably; returns
/// (u, 1 − u) without cancellation at either endpoint.
fn u_of_psi(u_lo: f64, u_hi: f64, sin2: f64, cos2: f64) -> (f64, f64) {
    let delta = u_hi - u_lo;
    let u = u_lo + delta * sin2;
    let one_minus = (1.0 - u_hi) + delta * cos2;
    (u, one_minus)
}

/// Adiabatic action I_θ = (I/4)·∫√g/(u(1−u))du over the oscillation
/// interval (J·s). The sin²ψ substitution removes both endpoint
/// singularities; the quadrature order doubles until 1e−10 relative
/// agreement.
pub fn adiabatic_invariant(c: &FieldCoefficients, roots: &RootTriple, inertia: f64) -> Result<f64> {
    let (u_lo, u_hi) = roots.oscillation_interval();
    let delta = u_hi - u_lo;
    if delta <= 0.0 {
        return Ok(0.0);
    }
    let val = quadrature::integrate_psi(QUAD_RTOL, |sin2, cos2| {
        let (u, one_minus_u) = u_of_psi(u_lo, u_hi, sin2, cos2);
        let w = smooth_factor(c, roots, u);
        if u <= 0.0 || one_minus_u <= 0.0 {
            // only reachable in the exact-endpoint limit; the factor
            // sin²ψcos²ψ vanishes there at matching order
            return 0.0;
        }
        w.max(0.0).sqrt() * sin2 * cos2 / (u * one_minus_u)
    })
    .ok_or_else(|| {
        Error::NumericalFailure(format!(
            "action quadrature did not converge (regime {:?}, interval [{:.6e}, {:.6e}], α = {:.3e}, β = {:.3e})",
            roots.regime, u_lo, u_hi, c.alpha, c.beta
        ))
    })?;
    Ok(inertia * delta * delta * val)
}

/// Orbit-averaged alignment ⟨u⟩ = ∫u·du/√g ÷ ∫du/√g (dimensionless).
pub fn average_alignment_strong(c: &FieldCoefficients, roots: &RootTriple) -> Result<f64> {
    let (u_lo, u_hi) = roots.oscillation_interval();
    let delta = u_hi - u_lo;
    if roots.regime == Regime::Separatrix && c.alpha != 0.0 && u_hi > 0.0 {
        return Err(Error::NumericalFailure(
            "orbit average undefined on the separatrix (divergent period)".into(),
        ));
    }
    if delta <= 1e-14 {
        // pinched orbit: the axis is locked at the well bottom
        return Ok(0.5 * (u_lo + u_hi));
    }
    let pair = quadrature::integrate_psi_pair(QUAD_RTOL, |sin2, cos2| {
        let (u, _) = u_of_psi(u_lo, u_hi, sin2, cos2);
        let w = smooth_factor(c, roots, u);
        let inv_sqrt = 1.0 / w.max(f64::MIN_POSITIVE).sqrt();
        (u * inv_sqrt, inv_sqrt)
    });
    match pair {
        Some((n, d)) if d > 0.0 => Ok((n / d).clamp(u_lo, u_hi)),
        _ => Err(Error::NumericalFailure(format!(
            "orbit-average quadrature did not converge (regime {:?}, interval [{:.6e}, {:.6e}])",
            roots.regime, u_lo, u_hi
        ))),
    }
}

/// The conserved data of one molecule crossing the beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticRecord {
    /// Field-free energy (J).
    pub h0: f64,
    /// Angular momentum projection on the field axis (J·s).
    pub p_phi: f64,
    /// Action computed at E = 0 (J·s).
    pub i_theta0: f64,
    /// Current energy (J).
    pub h: f64,
    pub regime: Regime,
    /// Set once the regime flips along a ramp.
    pub separatrix_crossed: bool,
    /// Energy step of the previous solve; warm-starts the next bracket.
    h_step_hint: f64,
}

impl AdiabaticRecord {
    /// Builds the record for a free rotor of energy `h0` and projection
    /// `p_phi`.
    pub fn new(species: &MolecularSpecies, h0: f64, p_phi: f64) -> Result<Self> {
        if !(h0 > 0.0) {
            return Err(Error::InadmissibleState(format!(
                "free rotor needs positive energy, got {h0:.3e}"
            )));
        }
        let coeffs = FieldCoefficients::new(species, h0, 0.0, p_phi);
        let roots = find_roots(&coeffs)?;
        let i_theta0 = adiabatic_invariant(&coeffs, &roots, species.moment_of_inertia())?;
        Ok(Self {
            h0,
            p_phi,
            i_theta0,
            h: h0,
            regime: Regime::Rotating,
            separatrix_crossed: false,
            h_step_hint: f64::NAN,
        })
    }

    /// Builds the record from a reduced thermal rotor state.
    pub fn from_reduced_state(
        species: &MolecularSpecies,
        thermal: &ThermalSpec,
        state: &ClassicalRotorState,
    ) -> Result<Self> {
        let p_th = thermal.momentum_scale(species);
        let p_phi = state.p_phi * p_th;
        // H₀ = (P_θ² + P_φ²/sin²θ)/(2I) = ½·k_B·T·ω'²
        let h0 = 0.5 * thermal.thermal_energy(species) * state.omega().powi(2);
        Self::new(species, h0, p_phi)
    }
}

/// I_θ and the regime at trial energy `h` in squared field `e_squared`.
fn action_at(
    species: &MolecularSpecies,
    h: f64,
    e_squared: f64,
    p_phi: f64,
) -> Result<(f64, Regime)> {
    let coeffs = FieldCoefficients::new(species, h, e_squared, p_phi);
    let roots = find_roots(&coeffs)?;
    let action = adiabatic_invariant(&coeffs, &roots, species.moment_of_inertia())?;
    Ok((action, roots.regime))
}

/// Lowest admissible energy at this field: the bottom of the effective
/// potential P_φ²/(2I(1−u)) − ¼E²(Δα·u + α⊥).
fn well_bottom(species: &MolecularSpecies, e_squared: f64, p_phi: f64) -> f64 {
    let inertia = species.moment_of_inertia();
    let da = species.alpha_aniso_si();
    let ap = species.alpha_perp_si();
    if p_phi == 0.0 {
        return -0.25 * e_squared * (da + ap);
    }
    let pot =
        |u: f64| p_phi * p_phi / (2.0 * inertia * (1.0 - u)) - 0.25 * e_squared * (da * u + ap);
    if e_squared == 0.0 || da == 0.0 {
        return pot(0.0);
    }
    let x2 = 2.0 * p_phi * p_phi / (inertia * e_squared * da);
    let x = x2.sqrt();
    if x >= 1.0 {
        pot(0.0)
    } else {
        pot(1.0 - x)
    }
}

/// Solves I_θ(H, E) = I_θ⁰ for the energy inside the field and updates the
/// record. A regime flip relative to the record's previous state marks a
/// separatrix crossing; the solve itself is continuous across it because
/// I_θ(H) is continuous and strictly increasing.
pub fn solve_energy(
    record: &mut AdiabaticRecord,
    species: &MolecularSpecies,
    e_field: f64,
) -> Result<f64> {
    let e_squared = e_field * e_field;
    solve_energy_at_squared_field(record, species, e_squared)
}

/// As [`solve_energy`] but parameterized by E² directly.
pub fn solve_energy_at_squared_field(
    record: &mut AdiabaticRecord,
    species: &MolecularSpecies,
    e_squared: f64,
) -> Result<f64> {
    if e_squared == 0.0 {
        let prev = record.regime;
        record.h = record.h0;
        record.regime = Regime::Rotating;
        record.h_step_hint = f64::NAN;
        if prev != Regime::Rotating {
            record.separatrix_crossed = true;
        }
        return Ok(record.h);
    }

    let target = record.i_theta0;
    let bottom = well_bottom(species, e_squared, record.p_phi);
    let scale = record.h0.abs()
        + 0.25 * e_squared * (species.alpha_aniso_si() + species.alpha_perp_si())
        + bottom.abs()
        + f64::MIN_POSITIVE;
    // I_θ(H) − target, with below-the-well trial energies counting as −target
    let f_at = |h: f64| -> Result<f64> {
        match action_at(species, h, e_squared, record.p_phi) {
            Ok((v, _)) => Ok(v - target),
            Err(Error::InadmissibleState(_)) => Ok(-target),
            Err(e) => Err(e),
        }
    };
    let tol_h = SOLVE_RTOL * scale;

    // warm bracket around the predicted energy when a previous step exists
    let mut bracket = None;
    if record.h_step_hint.is_finite() {
        let pred = record.h + record.h_step_hint;
        let mut d = (4.0 * record.h_step_hint.abs()).max(1e3 * tol_h);
        let mut lo = (pred - d).max(bottom);
        let mut hi = pred + d;
        let mut f_lo = f_at(lo)?;
        let mut f_hi = f_at(hi)?;
        for _ in 0..30 {
            if f_lo <= 0.0 && f_hi >= 0.0 {
                bracket = Some((lo, f_lo, hi, f_hi));
                break;
            }
            d *= 2.0;
            if f_lo > 0.0 {
                hi = lo;
                f_hi = f_lo;
                lo = (lo - d).max(bottom);
                f_lo = f_at(lo)?;
            } else {
                lo = hi;
                f_lo = f_hi;
                hi += d;
                f_hi = f_at(hi)?;
            }
        }
    }

    // full bracket: the well bottom has I_θ = 0; expand upward
    let (mut lo, mut f_lo, mut hi, mut f_hi) = match bracket {
        Some(b) => b,
        None => {
            let lo = bottom;
            let mut hi = record.h.max(lo + 1e3 * tol_h);
            let mut expansions = 0;
            let f_hi = loop {
                let v = f_at(hi)?;
                if v >= 0.0 {
                    break v;
                }
                expansions += 1;
                if expansions > 200 {
                    return Err(Error::BracketFailure(format!(
                        "no upper bracket for I_θ = {target:.6e} (E² = {e_squared:.3e}, P_φ = {:.3e}, H span [{lo:.6e}, {hi:.6e}])",
                        record.p_phi
                    )));
                }
                hi = lo + (hi - lo).max(1e3 * tol_h) * 2.0;
            };
            (lo, -target, hi, f_hi)
        }
    };

    // Illinois (bracketed secant) on f(H)
    let mut side = 0i8;
    for _ in 0..200 {
        if (hi - lo).abs() <= tol_h {
            break;
        }
        let denom = f_hi - f_lo;
        let mut h_mid = if denom.abs() > 0.0 {
            (lo * f_hi - hi * f_lo) / denom
        } else {
            0.5 * (lo + hi)
        };
        if !(h_mid > lo && h_mid < hi) {
            h_mid = 0.5 * (lo + hi);
        }
        let f_mid = f_at(h_mid)?;
        if f_mid < 0.0 {
            lo = h_mid;
            f_lo = f_mid;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = h_mid;
            f_hi = f_mid;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
    }

    let h = 0.5 * (lo + hi);
    let coeffs = FieldCoefficients::new(species, h, e_squared, record.p_phi);
    let roots = find_roots(&coeffs)?;
    if roots.regime != record.regime {
        record.separatrix_crossed = true;
    }
    record.h_step_hint = h - record.h;
    record.h = h;
    record.regime = roots.regime;
    Ok(h)
}

/// ⟨u⟩ of the record's current orbit at squared field E².
pub fn current_average_alignment(
    record: &AdiabaticRecord,
    species: &MolecularSpecies,
    e_squared: f64,
) -> Result<f64> {
    let coeffs = FieldCoefficients::new(species, record.h, e_squared, record.p_phi);
    let roots = find_roots(&coeffs)?;
    average_alignment_strong(&coeffs, &roots)
}

/// ⟨u⟩ together with the u-oscillation period 2∫du/√g (s) of the record's
/// current orbit; the period against the envelope timescale decides whether
/// the adiabatic treatment still holds.
pub fn current_alignment_and_period(
    record: &AdiabaticRecord,
    species: &MolecularSpecies,
    e_squared: f64,
) -> Result<(f64, f64)> {
    let c = FieldCoefficients::new(species, record.h, e_squared, record.p_phi);
    let roots = find_roots(&c)?;
    let (u_lo, u_hi) = roots.oscillation_interval();
    let delta = u_hi - u_lo;
    if roots.regime == Regime::Separatrix && c.alpha != 0.0 && u_hi > 0.0 {
        return Err(Error::NumericalFailure(
            "orbit average undefined on the separatrix (divergent period)".into(),
        ));
    }
    if delta <= 1e-14 {
        return Ok((0.5 * (u_lo + u_hi), 0.0));
    }
    let pair = quadrature::integrate_psi_pair(QUAD_RTOL, |sin2, cos2| {
        let (u, _) = u_of_psi(u_lo, u_hi, sin2, cos2);
        let w = smooth_factor(&c, &roots, u);
        let inv_sqrt = 1.0 / w.max(f64::MIN_POSITIVE).sqrt();
        (u * inv_sqrt, inv_sqrt)
    });
    match pair {
        Some((n, d)) if d > 0.0 => Ok(((n / d).clamp(u_lo, u_hi), 4.0 * d)),
        _ => Err(Error::NumericalFailure(format!(
            "orbit-average quadrature did not converge (regime {:?}, interval [{:.6e}, {:.6e}])",
            roots.regime, u_lo, u_hi
        ))),
    }
}

/// Per-sample outcome counters of a strong-field ensemble run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StrongFieldFlags {
    pub pendular: usize,
    pub separatrix: usize,
    pub failed: usize,
}

/// Distribution of ⟨u⟩ at the peak of the deflecting field.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakAlignmentDistribution {
    pub samples: Vec<f64>,
    pub flags: StrongFieldFlags,
}

impl PeakAlignmentDistribution {
    pub fn histogram(&self, bins: usize) -> Result<Histogram> {
        Histogram::from_samples(0.0, 1.0, bins, &self.samples)
    }

    pub fn summary(&self) -> SampleSummary {
        SampleSummary::from_samples(&self.samples)
    }
}

/// Samples thermal rotors (optionally prealigned by `pulse`), conserves
/// each one's action up to the peak field, and returns the ⟨u⟩ samples.
pub fn peak_alignment_distribution(
    species: &MolecularSpecies,
    spec: &EnsembleSpec,
    pulse: Option<&KickPulse>,
    peak_intensity_w_cm2: f64,
) -> PeakAlignmentDistribution {
    let e2 = field_squared_from_intensity(peak_intensity_w_cm2);
    let kick = pulse.map(|k| {
        (
            k.reduced_kick_strength(species, &spec.thermal),
            k.polarization,
        )
    });
    let raw: Vec<std::result::Result<(f64, Regime), ()>> = (0..spec.n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut st = sample_thermal_state(&spec.rng, i);
            if let Some((p_s, axis)) = kick {
                st = apply_kick(&st, p_s, axis);
            }
            let mut record =
                AdiabaticRecord::from_reduced_state(species, &spec.thermal, &st).map_err(|_| ())?;
            solve_energy_at_squared_field(&mut record, species, e2).map_err(|_| ())?;
            let u = current_average_alignment(&record, species, e2).map_err(|_| ())?;
            Ok((u, record.regime))
        })
        .collect();

    let mut flags = StrongFieldFlags::default();
    let mut samples = Vec::with_capacity(spec.n_samples);
    for r in raw {
        match r {
            Ok((u, regime)) => {
                match regime {
                    Regime::Pendular => flags.pendular += 1,
                    Regime::Separatrix => flags.separatrix += 1,
                    Regime::Rotating => {}
                }
                samples.push(u);
            }
            Err(()) => flags.failed += 1,
        }
    }
    PeakAlignmentDistribution { samples, flags }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSpec;
    use crate::species::cs2;

    fn free_coeffs(beta: f64, pphi_over_i: f64) -> FieldCoefficients {
        FieldCoefficients {
            alpha: 0.0,
            beta,
            p_phi_over_i: pphi_over_i,
        }
    }

    #[test]
    fn g_is_zero_at_origin_and_negative_at_one() {
        let c = FieldCoefficients {
            alpha: 2.0,
            beta: 3.0,
            p_phi_over_i: 0.7,
        };
        assert_eq!(g_polynomial(0.0, &c), 0.0);
        assert!((g_polynomial(1.0, &c) + 4.0 * 0.49).abs() < 1e-12);
    }

    #[test]
    fn free_rotor_roots() {
        let c = free_coeffs(4.0, 1.0);
        let r = find_roots(&c).unwrap();
        assert_eq!(r.regime, Regime::Rotating);
        assert_eq!(r.u2, 0.0);
        assert!((r.u3 - 0.75).abs() < 1e-14);
        assert!(r.u1.is_none());

        // degenerate equator rotation: β = (P_φ/I)² → u3 = 0
        let c = free_coeffs(1.0, 1.0);
        let r = find_roots(&c).unwrap();
        assert_eq!(r.u3, 0.0);
    }

    #[test]
    fn weak_field_perturbs_free_root_to_first_order() {
        let beta = 4.0;
        let pphi = 1.0;
        let alpha = 1e-4;
        let c = FieldCoefficients {
            alpha,
            beta,
            p_phi_over_i: pphi,
        };
        let r = find_roots(&c).unwrap();
        assert_eq!(r.regime, Regime::Rotating);
        // series: u3 ≈ u3⁰ + (α/β)·u3⁰·(1 − u3⁰)
        let u30 = 1.0 - pphi * pphi / beta;
        let expected = u30 + alpha / beta * u30 * (1.0 - u30);
        assert!(
            (r.u3 - expected).abs() < 1e-3 * alpha / beta,
            "u3 = {}, series = {expected}",
            r.u3
        );
        assert!(r.u1.unwrap() < 0.0);
    }

    #[test]
    fn deep_well_low_energy_is_pendular() {
        let s = cs2();
        // strong field, energy between the well bottom and the separatrix
        let e2 = field_squared_from_intensity(9.0e11);
        let inertia = s.moment_of_inertia();
        let p_phi = 20.0 * crate::constants::HBAR;
        let h_sep = p_phi * p_phi / (2.0 * inertia) - 0.25 * e2 * s.alpha_perp_si();
        let h_bot = well_bottom(&s, e2, p_phi);
        assert!(h_bot < h_sep);
        let h = 0.5 * (h_bot + h_sep);
        let c = FieldCoefficients::new(&s, h, e2, p_phi);
        let r = find_roots(&c).unwrap();
        assert_eq!(r.regime, Regime::Pendular, "roots: {r:?}");
        assert!(r.u2 > 0.0 && r.u3 <= 1.0);
        assert!(g_polynomial(0.5 * (r.u2 + r.u3), &c) > 0.0);
    }

    #[test]
    fn roots_are_roots_after_polish() {
        let s = cs2();
        let e2 = field_squared_from_intensity(5.0e11);
        let p_phi = 3.0 * crate::constants::HBAR;
        let h = 2.0e-22;
        let c = FieldCoefficients::new(&s, h, e2, p_phi);
        let r = find_roots(&c).unwrap();
        let gmax = (0..=100)
            .map(|i| g_polynomial(i as f64 / 100.0, &c).abs())
            .fold(0.0f64, f64::max);
        for u in [r.u2, r.u3] {
            assert!(
                g_polynomial(u, &c).abs() <= 1e-10 * gmax,
                "g({u}) = {:.3e}, max |g| = {gmax:.3e}",
                g_polynomial(u, &c)
            );
        }
    }

    #[test]
    fn action_scaling_homogeneity() {
        let s = cs2();
        let c = FieldCoefficients {
            alpha: 3.0e22,
            beta: 5.0e22,
            p_phi_over_i: 4.0e10,
        };
        let scale = 7.0;
        let c2 = FieldCoefficients {
            alpha: c.alpha * scale * scale,
            beta: c.beta * scale * scale,
            p_phi_over_i: c.p_phi_over_i * scale,
        };
        let inertia = s.moment_of_inertia();
        let r1 = find_roots(&c).unwrap();
        let r2 = find_roots(&c2).unwrap();
        assert!((r1.u3 - r2.u3).abs() < 1e-12);
        let i1 = adiabatic_invariant(&c, &r1, inertia).unwrap();
        let i2 = adiabatic_invariant(&c2, &r2, inertia).unwrap();
        assert!(
            ((i2 - scale * i1) / i2).abs() < 1e-10,
            "I_θ scaling: {i2} vs {}",
            scale * i1
        );
    }

    #[test]
    fn pinched_orbit_limits() {
        let s = cs2();
        let e2 = field_squared_from_intensity(9.0e11);
        let p_phi = 10.0 * crate::constants::HBAR;
        // energy just above the well bottom: tiny orbit
        let h_bot = well_bottom(&s, e2, p_phi);
        let h = h_bot + 1e-8 * h_bot.abs();
        let c = FieldCoefficients::new(&s, h, e2, p_phi);
        let r = find_roots(&c).unwrap();
        assert_eq!(r.regime, Regime::Pendular);
        let i_theta = adiabatic_invariant(&c, &r, s.moment_of_inertia()).unwrap();
        let u = average_alignment_strong(&c, &r).unwrap();
        assert!(r.u3 - r.u2 < 1e-3);
        assert!(i_theta >= 0.0 && i_theta < 1e-4 * crate::constants::HBAR);
        assert!((u - r.u3).abs() < 1e-3);
        assert!(u >= r.u2 && u <= r.u3);
    }

    #[test]
    fn zero_field_average_equals_free_rotor_alignment() {
        let s = cs2();
        let th = ThermalSpec::from_temperature(5.0).unwrap();
        let rng = RngSpec::new(99);
        for i in 0..200u64 {
            let st = sample_thermal_state(&rng, i);
            let a = crate::classical::time_averaged_alignment(&st).unwrap();
            let record = AdiabaticRecord::from_reduced_state(&s, &th, &st).unwrap();
            let c = FieldCoefficients::new(&s, record.h0, 0.0, record.p_phi);
            let r = find_roots(&c).unwrap();
            let u = average_alignment_strong(&c, &r).unwrap();
            assert!((u - a).abs() < 1e-8, "sample {i}: ⟨u⟩ = {u}, A = {a}");
        }
    }

    #[test]
    fn solve_identity_at_zero_field() {
        let s = cs2();
        let th = ThermalSpec::from_temperature(5.0).unwrap();
        let st = sample_thermal_state(&RngSpec::new(5), 0);
        let mut record = AdiabaticRecord::from_reduced_state(&s, &th, &st).unwrap();
        let h = solve_energy(&mut record, &s, 0.0).unwrap();
        assert_eq!(h, record.h0);
    }

    #[test]
    fn ramp_up_down_recovers_initial_energy() {
        let s = cs2();
        let th = ThermalSpec::from_temperature(5.0).unwrap();
        // moderate peak so that a healthy fraction never crosses the
        // separatrix; crossers are excluded from the reversibility claim
        let e2_peak = field_squared_from_intensity(1.0e10);
        let rng = RngSpec::new(17);
        let mut checked = 0;
        for i in 0..40u64 {
            let st = sample_thermal_state(&rng, i);
            let mut record = match AdiabaticRecord::from_reduced_state(&s, &th, &st) {
                Ok(r) => r,
                Err(_) => continue,
            };
            // geometric ramp up then down, tailing off far enough that the
            // residual field shifts H by less than the tolerance
            let n = 60;
            let mut ok = true;
            let up_down = (0..=n)
                .chain((0..n).rev())
                .map(|k| e2_peak * (1e-6f64).powf(1.0 - k as f64 / n as f64));
            let tail = (7..=13).map(|d| e2_peak * 10f64.powi(-d));
            for e2 in up_down.chain(tail) {
                if solve_energy_at_squared_field(&mut record, &s, e2).is_err() {
                    ok = false;
                    break;
                }
            }
            if !ok || record.separatrix_crossed {
                continue;
            }
            let h_final = record.h;
            assert!(
                ((h_final - record.h0) / record.h0).abs() < 1e-8,
                "sample {i}: H returned to {h_final:.6e} from {:.6e}",
                record.h0
            );
            checked += 1;
        }
        assert!(checked > 5, "too few non-crossing samples ({checked})");
    }

    #[test]
    fn strong_ramp_traps_thermal_molecules() {
        let s = cs2();
        let th = ThermalSpec::from_temperature(5.0).unwrap();
        let e2_peak = field_squared_from_intensity(9.0e11);
        let rng = RngSpec::new(23);
        let mut trapped = 0;
        let mut total = 0;
        for i in 0..30u64 {
            let st = sample_thermal_state(&rng, i);
            let mut record = match AdiabaticRecord::from_reduced_state(&s, &th, &st) {
                Ok(r) => r,
                Err(_) => continue,
            };
            let n = 60;
            let mut ok = true;
            for k in 0..=n {
                let e2 = e2_peak * (1e-6f64).powf(1.0 - k as f64 / n as f64);
                if solve_energy_at_squared_field(&mut record, &s, e2).is_err() {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            total += 1;
            if record.regime == Regime::Pendular {
                assert!(record.separatrix_crossed);
                trapped += 1;
            }
        }
        assert!(total > 20);
        assert!(trapped > 0, "a 26·k_BT well should trap thermal rotors");
    }

    #[test]
    fn peak_distribution_zero_intensity_matches_weak_ensemble() {
        let s = cs2();
        let spec = EnsembleSpec::new(
            20_000,
            ThermalSpec::from_temperature(5.0).unwrap(),
            RngSpec::new(4),
        )
        .unwrap();
        let strong = peak_alignment_distribution(&s, &spec, None, 0.0);
        let weak = crate::classical::ensemble_alignment_distribution(&s, &spec, None);
        assert_eq!(strong.flags.failed, 0);
        assert_eq!(strong.flags.pendular, 0);
        let ms = strong.samples.iter().sum::<f64>() / strong.samples.len() as f64;
        let mw = weak.samples.iter().sum::<f64>() / weak.samples.len() as f64;
        assert!((ms - mw).abs() < 1e-6, "zero-field mean ⟨u⟩ {ms} vs A {mw}");
    }
}
