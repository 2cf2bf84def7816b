//! Closed-form spectra of the four-spin chains.
//!
//! * photon on an edge spin of the open chain: nine explicit branches;
//! * photon on the second spin of the open chain, and the closed ring:
//!   characteristic polynomials factored into even pieces, kept as
//!   polynomials in u = E².
//!
//! The factor coefficients are generic over the scalar so the same
//! expressions serve the floating-point and the exact rational paths.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::exactpoly::{Rational, RationalPolynomial, RootError};

/// Radicands in [−1e−12, 0) are treated as zero before taking square roots.
pub const RADICAND_CLAMP: f64 = 1e-12;
/// Roots in u = E² down to this value are clamped to zero.
pub const NEGATIVE_U_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Degeneracy {
    /// twofold
    D,
    /// fourfold
    Q,
    /// eightfold
    O,
}

impl Degeneracy {
    pub fn multiplicity(self) -> usize {
        match self {
            Degeneracy::D => 2,
            Degeneracy::Q => 4,
            Degeneracy::O => 8,
        }
    }

    pub fn from_multiplicity(m: usize) -> Option<Self> {
        match m {
            2 => Some(Degeneracy::D),
            4 => Some(Degeneracy::Q),
            8 => Some(Degeneracy::O),
            _ => None,
        }
    }
}

impl fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Degeneracy::D => "D",
            Degeneracy::Q => "Q",
            Degeneracy::O => "O",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticLevel {
    pub energy: f64,
    pub degeneracy: Degeneracy,
    /// Branch index 1…9 in decreasing order of energy at G = 0.
    pub branch: usize,
}

impl AnalyticLevel {
    pub fn multiplicity(&self) -> usize {
        self.degeneracy.multiplicity()
    }

    pub fn label(&self) -> String {
        format!("E{}^{}", self.branch, self.degeneracy)
    }
}

fn clamped_sqrt(x: f64) -> f64 {
    if (-RADICAND_CLAMP..0.0).contains(&x) {
        0.0
    } else {
        x.sqrt()
    }
}

/// The nine branches for the photon on spin 1 (or spin 4) of the open chain.
pub fn levels_open_edge(g: f64, j: f64) -> Vec<AnalyticLevel> {
    let (g2, j2) = (g * g, j * j);
    let inner_d = clamped_sqrt(2.0 * g2 * j2 + j2 * j2);
    let inner_q = clamped_sqrt(g2 * g2 - 2.0 * g2 * j2 + 5.0 * j2 * j2);
    let base = g2 + 3.0 * j2;
    let e1 = clamped_sqrt(base + 2.0 * inner_d);
    let e2 = clamped_sqrt(base + inner_q) / std::f64::consts::SQRT_2;
    let e3 = clamped_sqrt(base - 2.0 * inner_d);
    let e4 = clamped_sqrt(base - inner_q) / std::f64::consts::SQRT_2;

    use Degeneracy::*;
    [
        (e1, D),
        (e2, Q),
        (e3, D),
        (e4, Q),
        (0.0, O),
        (-e4, Q),
        (-e3, D),
        (-e2, Q),
        (-e1, D),
    ]
    .into_iter()
    .enumerate()
    .map(|(i, (energy, degeneracy))| AnalyticLevel {
        energy,
        degeneracy,
        branch: i + 1,
    })
    .collect()
}

/// Branch energies repeated by multiplicity, ascending (32 values).
pub fn expand_levels(levels: &[AnalyticLevel]) -> Vec<f64> {
    let mut out: Vec<f64> = levels
        .iter()
        .flat_map(|l| std::iter::repeat_n(l.energy, l.multiplicity()))
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// The two nonnegative closed-ring branches from the quadratic-in-E² factor.
pub fn analytic_branch_closed_quadratic(g: f64, j: f64) -> (f64, f64) {
    let (g2, j2) = (g * g, j * j);
    let inner = clamped_sqrt(g2 * g2 + 16.0 * j2 * j2);
    let base = g2 + 4.0 * j2;
    (
        clamped_sqrt(base + inner) / std::f64::consts::SQRT_2,
        clamped_sqrt(base - inner) / std::f64::consts::SQRT_2,
    )
}

/// One even factor of a characteristic polynomial, stored in u = E².
#[derive(Debug, Clone, PartialEq)]
pub struct CharFactor<T> {
    pub label: String,
    /// Coefficients in u, lowest power first.
    pub u_coeffs: Vec<T>,
    pub exponent: u32,
}

impl<T> CharFactor<T> {
    /// Degree in E of the factor itself (without the exponent).
    pub fn degree_in_e(&self) -> usize {
        2 * self.u_coeffs.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactoredCharPoly<T> {
    pub factors: Vec<CharFactor<T>>,
}

impl<T> FactoredCharPoly<T> {
    pub fn from_u_factors(factors: Vec<(&str, Vec<T>, u32)>) -> Self {
        FactoredCharPoly {
            factors: factors
                .into_iter()
                .map(|(label, u_coeffs, exponent)| CharFactor {
                    label: label.to_string(),
                    u_coeffs,
                    exponent,
                })
                .collect(),
        }
    }

    pub fn total_degree(&self) -> usize {
        self.factors
            .iter()
            .map(|f| f.degree_in_e() * f.exponent as usize)
            .sum()
    }
}

/// Scalar operations needed to evaluate the printed factor coefficients.
pub trait Coefficient:
    Clone
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_small(n: i64) -> Self;
}

impl Coefficient for f64 {
    fn from_small(n: i64) -> Self {
        n as f64
    }
}

impl Coefficient for Rational {
    fn from_small(n: i64) -> Self {
        Rational::from_integer(n.into())
    }
}

struct Powers<T> {
    g2: T,
    g4: T,
    g6: T,
    j2: T,
    j4: T,
    j6: T,
    j8: T,
}

impl<T: Coefficient> Powers<T> {
    fn new(g: T, j: T) -> Self {
        let g2 = g.clone() * g;
        let j2 = j.clone() * j;
        let g4 = g2.clone() * g2.clone();
        let j4 = j2.clone() * j2.clone();
        Powers {
            g6: g4.clone() * g2.clone(),
            j6: j4.clone() * j2.clone(),
            j8: j4.clone() * j4.clone(),
            g2,
            g4,
            j2,
            j4,
        }
    }
}

fn n<T: Coefficient>(k: i64) -> T {
    T::from_small(k)
}

/// Factored det(E − H) for the open four-spin chain with the photon on
/// spin 2: E⁸ · [quartic]² · {octic}².
pub fn charpoly_open_second<T: Coefficient>(g: T, j: T) -> FactoredCharPoly<T> {
    let p = Powers::new(g, j);
    let quartic = vec![
        (p.g2.clone() + p.j2.clone()) * p.j2.clone(),
        -(p.g2.clone() + n::<T>(3) * p.j2.clone()),
        T::one(),
    ];
    let octic = vec![
        p.g6.clone() * p.j2.clone()
            + n::<T>(7) * p.g4.clone() * p.j4.clone()
            + n::<T>(3) * p.g2.clone() * p.j6.clone()
            + n::<T>(5) * p.j8.clone(),
        -(p.g6.clone()
            + n::<T>(7) * p.g4.clone() * p.j2.clone()
            + n::<T>(23) * p.g2.clone() * p.j4.clone()
            + n::<T>(21) * p.j6.clone()),
        n::<T>(3) * p.g4.clone()
            + n::<T>(15) * p.g2.clone() * p.j2.clone()
            + n::<T>(24) * p.j4.clone(),
        -(n::<T>(3) * p.g2.clone() + n::<T>(9) * p.j2.clone()),
        T::one(),
    ];
    FactoredCharPoly::from_u_factors(vec![
        ("E^8", vec![T::zero(), T::one()], 4),
        ("quartic", quartic, 2),
        ("octic", octic, 2),
    ])
}

/// Factored det(E − H) for the closed four-spin ring:
/// E⁸ · (E² − G²)² · [quartic]² · {sextic}².
pub fn charpoly_closed<T: Coefficient>(g: T, j: T) -> FactoredCharPoly<T> {
    let p = Powers::new(g, j);
    let linear = vec![-p.g2.clone(), T::one()];
    let quartic = vec![
        n::<T>(2) * p.g2.clone() * p.j2.clone(),
        -(p.g2.clone() + n::<T>(4) * p.j2.clone()),
        T::one(),
    ];
    let sextic = vec![
        -(n::<T>(2) * p.g4.clone() * p.j2.clone() + n::<T>(8) * p.g2.clone() * p.j4.clone()),
        p.g4.clone() + n::<T>(6) * p.g2.clone() * p.j2.clone() + n::<T>(32) * p.j4.clone(),
        -(n::<T>(2) * p.g2.clone() + n::<T>(12) * p.j2.clone()),
        T::one(),
    ];
    FactoredCharPoly::from_u_factors(vec![
        ("E^8", vec![T::zero(), T::one()], 4),
        ("E^2-G^2", linear, 2),
        ("quartic", quartic, 2),
        ("sextic", sextic, 2),
    ])
}

/// Numeric roots (32 values with multiplicity, ascending) of a factored
/// polynomial with floating-point coefficients.
///
/// Each f64 coefficient is converted to the rational it represents exactly;
/// the u-roots are then extracted through the exact square-free /
/// Jacobi-matrix route and mapped back to ±√u.
pub fn roots_of_factored(p: &FactoredCharPoly<f64>) -> Result<Vec<f64>, RootError> {
    let mut out = Vec::with_capacity(p.total_degree());
    for factor in &p.factors {
        let coeffs = factor
            .u_coeffs
            .iter()
            .map(|&c| crate::exactpoly::rational_from_f64(c))
            .collect::<Result<Vec<_>, _>>()?;
        let poly = RationalPolynomial::new(coeffs);
        if poly.degree().unwrap_or(0) == 0 {
            continue;
        }
        out.extend(crate::exactpoly::roots_in_square(
            &poly,
            factor.exponent as usize,
            NEGATIVE_U_TOL,
        )?);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}
