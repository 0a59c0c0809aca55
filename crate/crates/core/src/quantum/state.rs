//! Rotational wavepacket coefficients on a truncated |J,m⟩ basis.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients c_{J,m} for 0 ≤ J ≤ j_max, |m| ≤ J, stored flat at index
/// J² + (J + m).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    j_max: u32,
    coeffs: Vec<Complex64>,
}

impl QuantumState {
    /// The zero state on a basis (coefficients to be filled in).
    pub fn zero(j_max: u32) -> Self {
        let dim = ((j_max + 1) * (j_max + 1)) as usize;
        Self {
            j_max,
            coeffs: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    /// A pure basis state |J₀,m₀⟩.
    pub fn pure(j_max: u32, j0: u32, m0: i32) -> Result<Self> {
        if j0 > j_max {
            return Err(Error::Domain(format!("J₀ = {j0} exceeds J_max = {j_max}")));
        }
        if m0.unsigned_abs() > j0 {
            return Err(Error::Domain(format!("|m₀| = {} > J₀ = {j0}", m0.abs())));
        }
        let mut s = Self::zero(j_max);
        let idx = s.index(j0, m0);
        s.coeffs[idx] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    #[inline]
    pub fn index(&self, j: u32, m: i32) -> usize {
        debug_assert!(j <= self.j_max && m.unsigned_abs() <= j);
        (j * j) as usize + (j as i64 + m as i64) as usize
    }

    pub fn get(&self, j: u32, m: i32) -> Complex64 {
        self.coeffs[self.index(j, m)]
    }

    pub fn set(&mut self, j: u32, m: i32, c: Complex64) {
        let idx = self.index(j, m);
        self.coeffs[idx] = c;
    }

    pub fn population(&self, j: u32, m: i32) -> f64 {
        self.get(j, m).norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Iterates over (J, m, c) with nonzero-by-construction layout order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, i32, Complex64)> + '_ {
        (0..=self.j_max)
            .flat_map(move |j| (-(j as i32)..=(j as i32)).map(move |m| (j, m, self.get(j, m))))
    }

    /// Population summed over the top two J shells; small values certify the
    /// truncation.
    pub fn top_shell_population(&self) -> f64 {
        let mut p = 0.0;
        for j in [self.j_max.saturating_sub(1), self.j_max] {
            for m in -(j as i32)..=(j as i32) {
                p += self.population(j, m);
            }
        }
        if self.j_max == 0 {
            p = self.population(0, 0);
        }
        p
    }

    /// Σ|c|²·A_{J,m}: the time-averaged alignment of the wavepacket.
    pub fn mean_alignment(&self) -> f64 {
        self.iter()
            .map(|(j, m, c)| {
                let w = c.norm_sqr();
                if w == 0.0 {
                    0.0
                } else {
                    w * super::matrix_elements::alignment_factor(j, m).unwrap()
                }
            })
            .sum()
    }
}
