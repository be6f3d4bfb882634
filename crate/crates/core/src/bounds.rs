//! Sumsets over `Z_m` and the numeric constants of the density bounds for
//! spreading systems.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::{is_odd_prime, spreading_6p3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("moduli differ ({0} vs {1})")]
    ModulusMismatch(u64, u64),
    #[error("sumset operands must be nonempty")]
    EmptyOperand,
    #[error("modulus must be at least 2 (got {0})")]
    BadModulus(u64),
    #[error("residue {residue} is not below the modulus {modulus}")]
    ResidueOutOfRange { residue: u64, modulus: u64 },
    #[error("value {0} is outside (0, 1]")]
    OutOfRange(f64),
    #[error("tolerance must be positive (got {0})")]
    BadTolerance(f64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(usize),
}

/// A subset of `Z_modulus`, stored as a membership table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueSet {
    modulus: u64,
    present: Vec<bool>,
}

impl ResidueSet {
    pub fn new<I: IntoIterator<Item = u64>>(modulus: u64, members: I) -> Result<Self, BoundsError> {
        if modulus < 2 {
            return Err(BoundsError::BadModulus(modulus));
        }
        let mut present = vec![false; modulus as usize];
        for r in members {
            if r >= modulus {
                return Err(BoundsError::ResidueOutOfRange { residue: r, modulus });
            }
            present[r as usize] = true;
        }
        Ok(ResidueSet { modulus, present })
    }

    /// The whole group `Z_modulus`.
    pub fn full(modulus: u64) -> Result<Self, BoundsError> {
        Self::new(modulus, 0..modulus)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn members(&self) -> Vec<u64> {
        (0..self.modulus).filter(|&r| self.present[r as usize]).collect()
    }

    pub fn len(&self) -> usize {
        self.present.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, r: u64) -> bool {
        r < self.modulus && self.present[r as usize]
    }
}

/// `{x + y mod m : x in a, y in b}`.
pub fn sumset(a: &ResidueSet, b: &ResidueSet) -> Result<ResidueSet, BoundsError> {
    if a.modulus != b.modulus {
        return Err(BoundsError::ModulusMismatch(a.modulus, b.modulus));
    }
    if a.is_empty() || b.is_empty() {
        return Err(BoundsError::EmptyOperand);
    }
    let m = a.modulus;
    let bm = b.members();
    let mut present = vec![false; m as usize];
    for x in a.members() {
        for &y in &bm {
            present[((x + y) % m) as usize] = true;
        }
    }
    Ok(ResidueSet { modulus: m, present })
}

/// `{x + y mod m : x != y in a}`; empty when `|a| <= 1`.
pub fn restricted_sumset(a: &ResidueSet) -> ResidueSet {
    let m = a.modulus;
    let am = a.members();
    let mut present = vec![false; m as usize];
    for (i, &x) in am.iter().enumerate() {
        for &y in &am[i + 1..] {
            present[((x + y) % m) as usize] = true;
        }
    }
    ResidueSet { modulus: m, present }
}

/// `z(1-z)(3-2z) / (4z^2 - 6z + 3)`; the denominator has no real root.
pub fn average_value_ratio(z: f64) -> f64 {
    z * (1.0 - z) * (3.0 - 2.0 * z) / (4.0 * z * z - 6.0 * z + 3.0)
}

const GRID_POINTS: usize = 1000;

/// Maximises [`average_value_ratio`] over `[1/2, 1]`, returning
/// `(argmax, max)`. A coarse grid locates the peak, then golden-section
/// search narrows the bracket below `tolerance`.
pub fn tau(tolerance: f64) -> Result<(f64, f64), BoundsError> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(BoundsError::BadTolerance(tolerance));
    }
    let (lo, hi) = (0.5_f64, 1.0_f64);
    let step = (hi - lo) / GRID_POINTS as f64;
    let best = (0..=GRID_POINTS)
        .map(|i| lo + step * i as f64)
        .map(|z| (z, average_value_ratio(z)))
        .fold((lo, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });

    let mut a = (best.0 - step).max(lo);
    let mut b = (best.0 + step).min(hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (average_value_ratio(x1), average_value_ratio(x2));
    while b - a > tolerance {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = average_value_ratio(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = average_value_ratio(x1);
        }
    }
    let z = 0.5 * (a + b);
    Ok((z, average_value_ratio(z)))
}

/// Leading-order constants of the density bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub tau: f64,
    /// Maximiser of the ratio function when `tau` came from [`tau`].
    pub argmax_z: Option<f64>,
    /// Uncovered pairs of a spreading system are below `edge_bound_coeff * n^2`.
    pub edge_bound_coeff: f64,
    /// Spreading systems have more than `xi_sp_coeff * n^2` blocks.
    pub xi_sp_coeff: f64,
    /// `edge_bound_coeff` obtained with the trivial value bound (`t = 1`).
    pub naive_coeff: f64,
}

/// Positive root `s` of `s^2 + (t/3) s - t/3 = 0`, where `s n^2` bounds twice
/// the number of uncovered pairs.
fn uncovered_root(t: f64) -> f64 {
    let h = t / 3.0;
    (-h + (h * h + 4.0 * h).sqrt()) / 2.0
}

/// Constants derived from an average-value bound `tau_value * n` per block.
pub fn lower_bound_constants(tau_value: f64) -> Result<BoundsReport, BoundsError> {
    if tau_value.is_nan() || tau_value <= 0.0 || tau_value > 1.0 {
        return Err(BoundsError::OutOfRange(tau_value));
    }
    let edge = uncovered_root(tau_value) / 2.0;
    Ok(BoundsReport {
        tau: tau_value,
        argmax_z: None,
        edge_bound_coeff: edge,
        xi_sp_coeff: (0.5 - edge) / 3.0,
        naive_coeff: uncovered_root(1.0) / 2.0,
    })
}

/// `tau` and the constants it yields, in one report.
pub fn bounds_report(tolerance: f64) -> Result<BoundsReport, BoundsError> {
    let (z, t) = tau(tolerance)?;
    let mut report = lower_bound_constants(t)?;
    report.argmax_z = Some(z);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub n: usize,
    pub m: usize,
    pub ratio: f64,
}

/// Block density `m / n^2` of the spreading system built from `p`.
pub fn construction_density(p: usize) -> Result<Density, BoundsError> {
    if !is_odd_prime(p) {
        return Err(BoundsError::NotOddPrime(p));
    }
    let sys = spreading_6p3(p).map_err(|_| BoundsError::NotOddPrime(p))?;
    let (n, m) = (sys.n(), sys.len());
    Ok(Density {
        n,
        m,
        ratio: m as f64 / (n * n) as f64,
    })
}
