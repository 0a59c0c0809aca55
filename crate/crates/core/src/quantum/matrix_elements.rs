//! Matrix elements of cos²θ and cos²φ·sin²θ in the |J,m⟩ basis.
//!
//! Everything reduces to the spherical-harmonic recurrences
//!
//!   cosθ·Y_J^m      = a(J,m)·Y_{J+1}^m + a(J−1,m)·Y_{J−1}^m,
//!   sinθe^{iφ}·Y_J^m = −b₊(J,m)·Y_{J+1}^{m+1} + b₋(J,m)·Y_{J−1}^{m+1},
//!
//! with a(J,m) = √[((J+1)²−m²)/((2J+1)(2J+3))],
//! b₊(J,m) = √[((J+m+1)(J+m+2))/((2J+1)(2J+3))] and
//! b₋(J,m) = √[((J−m)(J−m−1))/((2J+1)(2J−1))]; the quadratic operators are
//! the recurrences applied twice.

use crate::error::{Error, Result};

/// Which angular operator a matrix element refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleOperator {
    /// cos²θ (z-polarized kick; Δm = 0, ΔJ = 0, ±2).
    Cos2Theta,
    /// cos²φ·sin²θ (x-polarized kick; Δm = 0, ±2, ΔJ = 0, ±2).
    Cos2PhiSin2Theta,
}

/// Expectation value A_{J,m} = ⟨J,m|cos²θ|J,m⟩
/// = 1/3 + (2/3)·[J(J+1) − 3m²]/[(2J+3)(2J−1)].
pub fn alignment_factor(j: u32, m: i32) -> Result<f64> {
    if m.unsigned_abs() > j {
        return Err(Error::Domain(format!("|m| = {} > J = {j}", m.abs())));
    }
    let jf = j as f64;
    let mf = m as f64;
    Ok(1.0 / 3.0
        + 2.0 / 3.0 * (jf * (jf + 1.0) - 3.0 * mf * mf) / ((2.0 * jf + 3.0) * (2.0 * jf - 1.0)))
}

/// A_{J,m} as an exact reduced fraction. A_{J,m} is rational:
/// [(2J+3)(2J−1) + 2(J(J+1) − 3m²)] / [3(2J+3)(2J−1)].
pub fn alignment_factor_exact(j: u32, m: i32) -> Result<(i64, i64)> {
    if m.unsigned_abs() > j {
        return Err(Error::Domain(format!("|m| = {} > J = {j}", m.abs())));
    }
    let j = j as i64;
    let m = m as i64;
    let d = (2 * j + 3) * (2 * j - 1);
    let mut num = d + 2 * (j * (j + 1) - 3 * m * m);
    let mut den = 3 * d;
    // (2J−1) < 0 at J = 0; keep the denominator positive
    if den < 0 {
        num = -num;
        den = -den;
    }
    let g = gcd(num.abs().max(1), den);
    Ok((num / g, den / g))
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// cosθ raising coefficient a(J,m); zero when the target state is invalid.
fn a_cos(j: i64, m: i64) -> f64 {
    if j < 0 || m.abs() > j {
        return 0.0;
    }
    let jf = j as f64;
    let mf = m as f64;
    let num = (jf + 1.0) * (jf + 1.0) - mf * mf;
    if num <= 0.0 {
        return 0.0;
    }
    (num / ((2.0 * jf + 1.0) * (2.0 * jf + 3.0))).sqrt()
}

/// sinθe^{iφ} raising coefficient onto Y_{J+1}^{m+1} (with its sign).
fn b_up(j: i64, m: i64) -> f64 {
    if j < 0 || m.abs() > j {
        return 0.0;
    }
    let jf = j as f64;
    let mf = m as f64;
    let num = (jf + mf + 1.0) * (jf + mf + 2.0);
    if num <= 0.0 {
        return 0.0;
    }
    -(num / ((2.0 * jf + 1.0) * (2.0 * jf + 3.0))).sqrt()
}

/// sinθe^{iφ} lowering coefficient onto Y_{J−1}^{m+1}.
fn b_down(j: i64, m: i64) -> f64 {
    if j < 1 || m.abs() > j {
        return 0.0;
    }
    let jf = j as f64;
    let mf = m as f64;
    let num = (jf - mf) * (jf - mf - 1.0);
    if num <= 0.0 {
        return 0.0;
    }
    (num / ((2.0 * jf + 1.0) * (2.0 * jf - 1.0))).sqrt()
}

/// ⟨J′,m|cos²θ|J,m⟩ for J′ ∈ {J−2, J, J+2}; zero otherwise.
pub fn cos2_theta_element(jp: u32, j: u32, m: i32) -> f64 {
    let (jp, j, m) = (jp as i64, j as i64, m as i64);
    if m.abs() > j || m.abs() > jp {
        return 0.0;
    }
    if jp == j {
        let lower = a_cos(j - 1, m);
        a_cos(j, m) * a_cos(j, m) + lower * lower
    } else if jp == j + 2 {
        a_cos(j, m) * a_cos(j + 1, m)
    } else if j >= 2 && jp == j - 2 {
        a_cos(j - 2, m) * a_cos(j - 1, m)
    } else {
        0.0
    }
}

/// ⟨J′,m+2|sin²θ·e^{2iφ}|J,m⟩ for J′ ∈ {J−2, J, J+2}; zero otherwise.
pub fn sin2_e2iphi_element(jp: u32, j: u32, m: i32) -> f64 {
    let (jp, j, m) = (jp as i64, j as i64, m as i64);
    if m.abs() > j {
        return 0.0;
    }
    if jp == j + 2 {
        b_up(j, m) * b_up(j + 1, m + 1)
    } else if jp == j {
        b_up(j, m) * b_down(j + 1, m + 1) + b_down(j, m) * b_up(j - 1, m + 1)
    } else if j >= 2 && jp == j - 2 {
        b_down(j, m) * b_down(j - 1, m + 1)
    } else {
        0.0
    }
}

/// Real matrix element ⟨J′,m′|Ô|J,m⟩ of either kick operator; zero for all
/// forbidden couplings.
pub fn cos2_matrix_element(jp: u32, mp: i32, j: u32, m: i32, op: AngleOperator) -> f64 {
    if m.unsigned_abs() > j || mp.unsigned_abs() > jp {
        return 0.0;
    }
    match op {
        AngleOperator::Cos2Theta => {
            if mp == m {
                cos2_theta_element(jp, j, m)
            } else {
                0.0
            }
        }
        AngleOperator::Cos2PhiSin2Theta => {
            // cos²φ·sin²θ = ¼·(2 + e^{2iφ} + e^{−2iφ})·(1 − cos²θ)
            if mp == m {
                let identity = if jp == j { 1.0 } else { 0.0 };
                0.5 * (identity - cos2_theta_element(jp, j, m))
            } else if mp == m + 2 {
                0.25 * sin2_e2iphi_element(jp, j, m)
            } else if mp == m - 2 {
                // ⟨J′,m−2|sin²θe^{−2iφ}|J,m⟩ = ⟨J,m|sin²θe^{2iφ}|J′,m−2⟩
                0.25 * sin2_e2iphi_element(j, jp, mp)
            } else {
                0.0
            }
        }
    }
}
