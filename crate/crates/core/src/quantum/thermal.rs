//! Thermal ensembles of kicked rotors and the discrete distribution of the
//! time-averaged alignment factor.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::Result;
use crate::histogram::Histogram;
use crate::pulse::KickPulse;
use crate::species::MolecularSpecies;
use crate::thermal::ThermalSpec;

use super::matrix_elements::alignment_factor_exact;
use super::propagate::{j_max_for_kick, kick_propagate};
use super::state::QuantumState;

/// Fraction of Boltzmann weight that may be dropped by the initial-state
/// cutoff.
const THERMAL_CUTOFF: f64 = 1e-6;

/// An exact rational A_{J,m} used as a grouping key: distinct (J,m) pairs
/// with the same alignment factor share one spectral line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationalAlignment {
    pub num: i64,
    pub den: i64,
}

impl RationalAlignment {
    pub fn of(j: u32, m: i32) -> Result<Self> {
        let (num, den) = alignment_factor_exact(j, m)?;
        Ok(Self { num, den })
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Ord for RationalAlignment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // denominators are positive by construction
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl PartialOrd for RationalAlignment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Discrete spectrum of the alignment factor: (A, weight) lines keyed by the
/// exact rational value of A.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteAlignmentDistribution {
    entries: Vec<(RationalAlignment, f64)>,
}

impl DiscreteAlignmentDistribution {
    fn from_map(map: BTreeMap<RationalAlignment, f64>) -> Self {
        Self {
            entries: map.into_iter().collect(),
        }
    }

    /// Lines sorted by ascending A.
    pub fn entries(&self) -> &[(RationalAlignment, f64)] {
        &self.entries
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w).sum()
    }

    pub fn mean(&self) -> f64 {
        self.entries.iter().map(|(a, w)| a.value() * w).sum()
    }

    pub fn std(&self) -> f64 {
        let mean = self.mean();
        let m2: f64 = self
            .entries
            .iter()
            .map(|(a, w)| (a.value() - mean).powi(2) * w)
            .sum();
        m2.sqrt()
    }

    /// Weight at the exact rational A of (J,m), if present.
    pub fn weight_at(&self, j: u32, m: i32) -> Option<f64> {
        let key = RationalAlignment::of(j, m).ok()?;
        self.entries
            .binary_search_by(|(a, _)| a.cmp(&key))
            .ok()
            .map(|i| self.entries[i].1)
    }
}

/// Coarse-grains a discrete distribution onto equal-width bins on [0, 1].
pub fn coarse_grain(dist: &DiscreteAlignmentDistribution, bins: usize) -> Result<Histogram> {
    let mut h = Histogram::new(0.0, 1.0, bins)?;
    for (a, w) in dist.entries() {
        h.add(a.value(), *w);
    }
    Ok(h)
}

/// Largest initial shell the quantum treatment will enumerate.
const J_CUT_LIMIT: u32 = 2000;

/// Initial (J₀, m₀ ≥ 0) list with Boltzmann weights; m₀ and −m₀ contribute
/// identically, so negative m₀ is folded into a ×2 weight.
fn thermal_initial_states(
    species: &MolecularSpecies,
    j_t: f64,
) -> crate::error::Result<Vec<(u32, i32, f64)>> {
    let boltz = |j: u32| -> f64 {
        let jf = j as f64;
        (-jf * (jf + 1.0) / (j_t * j_t)).exp()
    };

    // Full partition function over allowed J (to machine-negligible tail).
    let mut q_full = 0.0;
    let mut j = 0u32;
    loop {
        if species.j_parity.allows(j) {
            let term = (2.0 * j as f64 + 1.0) * boltz(j);
            q_full += term;
            if term < q_full * 1e-18 && j as f64 > 3.0 * j_t {
                break;
            }
        }
        j += 1;
        if j > 100_000 {
            break;
        }
    }

    // Smallest cutoff with cumulative weight ≥ 1 − THERMAL_CUTOFF.
    let mut cum = 0.0;
    let mut j_cut = 0u32;
    for j in 0.. {
        if species.j_parity.allows(j) {
            cum += (2.0 * j as f64 + 1.0) * boltz(j);
            if cum >= (1.0 - THERMAL_CUTOFF) * q_full {
                j_cut = j;
                break;
            }
        }
        if j > J_CUT_LIMIT {
            return Err(crate::error::Error::InvalidSpec(format!(
                "thermal ensemble too hot for the quantum treatment (J cutoff exceeds {J_CUT_LIMIT} at J_T = {j_t})"
            )));
        }
    }

    // Normalize over the included set so the distribution sums to one.
    let q_norm = cum;
    let mut states = Vec::new();
    for j in 0..=j_cut {
        if !species.j_parity.allows(j) {
            continue;
        }
        let w = boltz(j) / q_norm;
        for m in 0..=(j as i32) {
            let mult = if m == 0 { 1.0 } else { 2.0 };
            states.push((j, m, mult * w));
        }
    }
    Ok(states)
}

/// Builds the thermal (optionally kicked) discrete distribution of A_{J,m}.
///
/// Every allowed initial |J₀,m₀⟩ is propagated through the kick; the final
/// populations are accumulated into lines keyed by the exact rational
/// A_{J,m}, weighted by exp(−E_{J₀}/k_BT)/Q_rot with the m₀ degeneracy
/// summed explicitly.
pub fn thermal_distribution(
    species: &MolecularSpecies,
    thermal: &ThermalSpec,
    pulse: Option<&KickPulse>,
) -> Result<DiscreteAlignmentDistribution> {
    let j_t = thermal.j_thermal(species);
    let initial = thermal_initial_states(species, j_t)?;

    let p = pulse.map(|k| k.kick_strength(species)).unwrap_or(0.0);

    if p == 0.0 {
        let mut map: BTreeMap<RationalAlignment, f64> = BTreeMap::new();
        for (j0, m0, w) in initial {
            *map.entry(RationalAlignment::of(j0, m0)?).or_insert(0.0) += w;
        }
        return Ok(DiscreteAlignmentDistribution::from_map(map));
    }

    let axis = pulse.expect("kick with p != 0").polarization;
    let per_state: Vec<Result<Vec<(RationalAlignment, f64)>>> = initial
        .par_iter()
        .map(|&(j0, m0, w)| {
            let j_max = j_max_for_kick(j0, p);
            let psi0 = QuantumState::pure(j_max, j0, m0)?;
            let psi = kick_propagate(&psi0, p, axis)?;
            let mut lines = Vec::new();
            for (j, m, c) in psi.iter() {
                let pop = c.norm_sqr();
                if pop > 0.0 {
                    lines.push((RationalAlignment::of(j, m)?, w * pop));
                }
            }
            Ok(lines)
        })
        .collect();

    // Fixed-order reduction keeps the output bit-stable across thread counts.
    let mut map: BTreeMap<RationalAlignment, f64> = BTreeMap::new();
    for lines in per_state {
        for (key, w) in lines? {
            *map.entry(key).or_insert(0.0) += w;
        }
    }
    Ok(DiscreteAlignmentDistribution::from_map(map))
}

/// ⟨cos²θ⟩(t) of a freely evolving wavepacket: coefficients pick up
/// exp(−iE_J t/ħ) phases and the expectation couples J to J±2 within each m.
pub fn alignment_expectation_trace(
    state: &QuantumState,
    species: &MolecularSpecies,
    times: &[f64],
) -> Vec<f64> {
    // E_J/ħ = 2π·c·B̃·J(J+1)
    let omega_unit = 2.0 * std::f64::consts::PI * crate::constants::SPEED_OF_LIGHT * species.b_m1();

    let mut diag = 0.0;
    let mut beats: Vec<(f64, f64, f64)> = Vec::new(); // (re, im, Δω)
    for (j, m, c) in state.iter() {
        let pop = c.norm_sqr();
        if pop > 0.0 {
            diag += pop * super::matrix_elements::alignment_factor(j, m).unwrap();
        }
        if j + 2 <= state.j_max() {
            let c_up = state.get(j + 2, m);
            if pop > 0.0 && c_up.norm_sqr() > 0.0 {
                let x = super::matrix_elements::cos2_theta_element(j + 2, j, m);
                let z = c_up.conj() * c * x;
                let jf = j as f64;
                let d_omega = omega_unit * (4.0 * jf + 6.0);
                beats.push((z.re, z.im, d_omega));
            }
        }
    }

    times
        .iter()
        .map(|&t| {
            let mut v = diag;
            for &(re, im, w) in &beats {
                let (s, c) = (w * t).sin_cos();
                v += 2.0 * (re * c - im * s);
            }
            v
        })
        .collect()
}

/// Thermal-ensemble ⟨cos²θ⟩(t) after an optional kick at t = 0.
pub fn thermal_alignment_trace(
    species: &MolecularSpecies,
    thermal: &ThermalSpec,
    pulse: Option<&KickPulse>,
    times: &[f64],
) -> Result<Vec<f64>> {
    let j_t = thermal.j_thermal(species);
    let initial = thermal_initial_states(species, j_t)?;
    let p = pulse.map(|k| k.kick_strength(species)).unwrap_or(0.0);
    let axis = pulse.map(|k| k.polarization);

    let per_state: Vec<Result<Vec<f64>>> = initial
        .par_iter()
        .map(|&(j0, m0, w)| {
            let j_max = j_max_for_kick(j0, p);
            let psi0 = QuantumState::pure(j_max, j0, m0)?;
            let psi = match axis {
                Some(ax) if p != 0.0 => kick_propagate(&psi0, p, ax)?,
                _ => psi0,
            };
            let trace = alignment_expectation_trace(&psi, species, times);
            Ok(trace.into_iter().map(|v| w * v).collect())
        })
        .collect();

    let mut acc = vec![0.0; times.len()];
    for tr in per_state {
        for (a, v) in acc.iter_mut().zip(tr?) {
            *a += v;
        }
    }
    Ok(acc)
}

/// Full rotational revival period 1/(2B̃c) (s): free-evolution beat phases
/// all advance by integer multiples of 2π over it.
pub fn revival_period(species: &MolecularSpecies) -> f64 {
    1.0 / (2.0 * species.b_m1() * crate::constants::SPEED_OF_LIGHT)
}
