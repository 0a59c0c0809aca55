//! δ-kick propagation: |ψ⁺⟩ = exp(iP·Ô)|ψ⁻⟩ via the auxiliary-parameter ODE
//! dc/dξ = iP·M·c integrated from ξ = 0 to 1.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pulse::KickAxis;

use super::matrix_elements::{cos2_matrix_element, AngleOperator};
use super::state::QuantumState;

/// Population allowed in the top two J shells after a kick.
pub const TRUNCATION_TOLERANCE: f64 = 1e-8;

/// Relative tolerance of the ξ integration.
pub const XI_RTOL: f64 = 1e-10;
const XI_ATOL: f64 = 1e-13;

/// Basis size policy: a kick of strength P populates J up to roughly J₀ + 2P
/// with a steep tail; the margin is validated after the fact by the
/// top-shell check.
pub fn j_max_for_kick(j0: u32, p: f64) -> u32 {
    (j0 + (6.0 * p.abs()).ceil() as u32 + 10).max(20)
}

/// Compressed sparse rows of a real symmetric operator on an index set.
pub(crate) struct SparseOp {
    dim: usize,
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

impl SparseOp {
    /// Builds the operator matrix on `states` (a list of (J,m)), looking up
    /// couplings through `element`.
    pub(crate) fn build(
        states: &[(u32, i32)],
        lookup: &dyn Fn(u32, i32) -> Option<usize>,
        op: AngleOperator,
    ) -> Self {
        let dim = states.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col = Vec::new();
        let mut val = Vec::new();
        row_ptr.push(0);
        for &(j, m) in states {
            for dj in [-2i64, 0, 2] {
                let jp = j as i64 + dj;
                if jp < 0 {
                    continue;
                }
                for dm in [-2i64, 0, 2] {
                    let mp = m as i64 + dm;
                    if mp.abs() > jp {
                        continue;
                    }
                    if let Some(target) = lookup(jp as u32, mp as i32) {
                        let v = cos2_matrix_element(jp as u32, mp as i32, j, m, op);
                        if v != 0.0 {
                            col.push(target);
                            val.push(v);
                        }
                    }
                }
            }
            row_ptr.push(col.len());
        }
        Self {
            dim,
            row_ptr,
            col,
            val,
        }
    }

    /// out = M·y (rows hold the couplings *from* each state; M symmetric).
    fn matvec(&self, y: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(y.len(), self.dim);
        for i in 0..self.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.val[k] * y[self.col[k]];
            }
            out[i] = acc;
        }
    }
}

/// Adaptive Dormand–Prince 5(4) for dy/dξ = f(y) on ξ ∈ [0, 1].
fn dopri5(
    f: &dyn Fn(&[Complex64], &mut [Complex64]),
    y0: Vec<Complex64>,
    rtol: f64,
    atol: f64,
) -> Result<Vec<Complex64>> {
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    // 5th-order solution weights
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    // embedded 4th-order weights
    const E1: f64 = 5179.0 / 57600.0;
    const E3: f64 = 7571.0 / 16695.0;
    const E4: f64 = 393.0 / 640.0;
    const E5: f64 = -92097.0 / 339200.0;
    const E6: f64 = 187.0 / 2100.0;
    const E7: f64 = 1.0 / 40.0;

    let n = y0.len();
    let mut y = y0;
    let mut x = 0.0f64;
    let mut h = 1e-3f64;
    let mut k1 = vec![Complex64::default(); n];
    let mut k2 = vec![Complex64::default(); n];
    let mut k3 = vec![Complex64::default(); n];
    let mut k4 = vec![Complex64::default(); n];
    let mut k5 = vec![Complex64::default(); n];
    let mut k6 = vec![Complex64::default(); n];
    let mut k7 = vec![Complex64::default(); n];
    let mut ytmp = vec![Complex64::default(); n];
    let mut y5 = vec![Complex64::default(); n];

    f(&y, &mut k1);
    let mut steps = 0usize;
    while x < 1.0 {
        if steps > 2_000_000 {
            return Err(Error::NumericalFailure(
                "ξ integration exceeded the step budget".into(),
            ));
        }
        steps += 1;
        if x + h > 1.0 {
            h = 1.0 - x;
        }

        for i in 0..n {
            ytmp[i] = y[i] + h * A21 * k1[i];
        }
        f(&ytmp, &mut k2);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f(&ytmp, &mut k3);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(&ytmp, &mut k4);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(&ytmp, &mut k5);
        for i in 0..n {
            ytmp[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(&ytmp, &mut k6);
        for i in 0..n {
            y5[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        f(&y5, &mut k7); // FSAL

        let mut err_sq = 0.0f64;
        for i in 0..n {
            let y4 = y[i]
                + h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let e = (y5[i] - y4).norm();
            let sc = atol + rtol * y[i].norm().max(y5[i].norm());
            err_sq += (e / sc) * (e / sc);
        }
        let err = (err_sq / n as f64).sqrt();

        if err <= 1.0 {
            x += h;
            std::mem::swap(&mut y, &mut y5);
            std::mem::swap(&mut k1, &mut k7);
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = (h * factor).min(1.0);
        if h < 1e-14 {
            return Err(Error::NumericalFailure(
                "ξ integration step size underflow".into(),
            ));
        }
    }
    Ok(y)
}

/// Propagates one coupled block: states `block` (indices into a flat layout
/// decided by the caller), coefficients `c`, generator iP·M.
fn propagate_block(op: &SparseOp, p: f64, c: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let ip = Complex64::new(0.0, p);
    let deriv = |y: &[Complex64], out: &mut [Complex64]| {
        op.matvec(y, out);
        for v in out.iter_mut() {
            *v *= ip;
        }
    };
    dopri5(&deriv, c, XI_RTOL, XI_ATOL)
}

/// Applies exp(iP·Ô) to a state. The z-kick (Ô = cos²θ) conserves m and is
/// propagated per m block; the x-kick couples Δm = ±2 and is propagated per
/// (J parity, m parity) sublattice.
pub fn kick_propagate(state: &QuantumState, p: f64, axis: KickAxis) -> Result<QuantumState> {
    if p == 0.0 {
        return Ok(state.clone());
    }
    let j_max = state.j_max();
    let mut out = state.clone();

    match axis {
        KickAxis::ZParallel => {
            for m in -(j_max as i32)..=(j_max as i32) {
                let j_lo = m.unsigned_abs();
                let states: Vec<(u32, i32)> = (j_lo..=j_max).map(|j| (j, m)).collect();
                let c: Vec<Complex64> = states.iter().map(|&(j, mm)| state.get(j, mm)).collect();
                if c.iter().all(|v| v.norm_sqr() == 0.0) {
                    continue;
                }
                let lookup = |jp: u32, mp: i32| -> Option<usize> {
                    (mp == m && jp >= j_lo && jp <= j_max).then(|| (jp - j_lo) as usize)
                };
                let op = SparseOp::build(&states, &lookup, AngleOperator::Cos2Theta);
                let c = propagate_block(&op, p, c)?;
                for (&(j, mm), v) in states.iter().zip(&c) {
                    out.set(j, mm, *v);
                }
            }
        }
        KickAxis::XPerpendicular => {
            for j_par in 0..2u32 {
                for m_par in 0..2i32 {
                    let mut states = Vec::new();
                    for j in (j_par..=j_max).step_by(2) {
                        for m in -(j as i32)..=(j as i32) {
                            if m.rem_euclid(2) == m_par {
                                states.push((j, m));
                            }
                        }
                    }
                    if states.is_empty() {
                        continue;
                    }
                    let c: Vec<Complex64> = states.iter().map(|&(j, m)| state.get(j, m)).collect();
                    if c.iter().all(|v| v.norm_sqr() == 0.0) {
                        continue;
                    }
                    // Dense (J,m) → slot lookup for this sublattice.
                    let mut table = vec![usize::MAX; ((j_max + 1) * (j_max + 1)) as usize];
                    for (slot, &(j, m)) in states.iter().enumerate() {
                        table[(j * j) as usize + (j as i64 + m as i64) as usize] = slot;
                    }
                    let lookup = |jp: u32, mp: i32| -> Option<usize> {
                        if jp > j_max {
                            return None;
                        }
                        let t = table[(jp * jp) as usize + (jp as i64 + mp as i64) as usize];
                        (t != usize::MAX).then_some(t)
                    };
                    let op = SparseOp::build(&states, &lookup, AngleOperator::Cos2PhiSin2Theta);
                    let c = propagate_block(&op, p, c)?;
                    for (&(j, m), v) in states.iter().zip(&c) {
                        out.set(j, m, *v);
                    }
                }
            }
        }
    }

    let leak = out.top_shell_population();
    if leak > TRUNCATION_TOLERANCE {
        return Err(Error::TruncationLeak {
            j_max,
            population: leak,
        });
    }
    Ok(out)
}
