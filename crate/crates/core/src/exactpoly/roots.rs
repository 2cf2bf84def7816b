//! Real roots of exact polynomials.
//!
//! Repeated roots are separated exactly (Yun's square-free decomposition).
//! Each square-free factor p is then turned into a symmetric tridiagonal
//! (Jacobi) matrix whose characteristic polynomial is p: the Euclidean
//! remainder sequence of (p, p') is a three-term recurrence
//! `q_{k-1} = (x − α_k) q_k − β_k q_{k+1}`, and p has only real roots
//! exactly when every β_k is positive. The α and β are computed exactly and
//! rounded once, so the roots come out of the tridiagonal QL solver with
//! backward error at the level of one rounding.

use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::{Rational, RationalPolynomial};
use crate::spectral::{tridiagonal_eigenvalues, SpectralError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("the zero polynomial has no finite root set")]
    ZeroPolynomial,
    #[error("polynomial {0} has non-real roots")]
    NonRealRoots(String),
    #[error("root {0:e} of a factor in E² is negative; E would be imaginary")]
    NegativeSquare(f64),
    #[error("coefficient {0} is not finite")]
    NonFiniteCoefficient(f64),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Monic square-free factors with their multiplicities; the product of
/// `factor^multiplicity` is the monic version of `p`. Constant input yields
/// an empty list.
pub fn squarefree_decomposition(p: &RationalPolynomial) -> Vec<(RationalPolynomial, usize)> {
    let f = p.monic();
    if f.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let df = f.derivative();
    let a0 = f.gcd(&df);
    let mut b = f.div_rem(&a0).0;
    let c = df.div_rem(&a0).0;
    let mut d = &c - &b.derivative();
    let mut out = Vec::new();
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        let next_b = b.div_rem(&a).0;
        let next_c = d.div_rem(&a).0;
        if a.degree().unwrap_or(0) > 0 {
            out.push((a, i));
        }
        d = &next_c - &next_b.derivative();
        b = next_b;
        i += 1;
    }
    out
}

/// Exact Jacobi parameters (α₁…α_n, β₁…β_{n−1}) of a square-free
/// polynomial with only real roots.
pub fn sturm_jacobi(p: &RationalPolynomial) -> Result<(Vec<Rational>, Vec<Rational>), RootError> {
    let n = p.degree().ok_or(RootError::ZeroPolynomial)?;
    let mut prev = p.monic();
    let mut cur = p.derivative().monic();
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..=n {
        let (quot, rem) = prev.div_rem(&cur);
        alpha.push(-quot.coeff(0));
        if k == n {
            break;
        }
        let expected = n - k - 1;
        if rem.is_zero() || rem.degree() != Some(expected) {
            // a zero remainder means a repeated root; a degree gap or a
            // sign failure below means complex roots
            return Err(RootError::NonRealRoots(p.to_string()));
        }
        let b = -rem.leading().cloned().unwrap_or_default();
        if !b.is_positive() {
            return Err(RootError::NonRealRoots(p.to_string()));
        }
        beta.push(b);
        prev = cur;
        cur = rem.monic();
    }
    Ok((alpha, beta))
}

fn squarefree_real_roots(p: &RationalPolynomial) -> Result<Vec<f64>, RootError> {
    let (alpha, beta) = sturm_jacobi(p)?;
    let mut d: Vec<f64> = alpha
        .iter()
        .map(|a| a.to_f64().unwrap_or(f64::NAN))
        .collect();
    let mut e: Vec<f64> = beta
        .iter()
        .map(|b| b.to_f64().unwrap_or(f64::NAN).sqrt())
        .chain(std::iter::once(0.0))
        .collect();
    if let Some(bad) = d.iter().chain(&e).find(|x| !x.is_finite()) {
        return Err(RootError::NonFiniteCoefficient(*bad));
    }
    tridiagonal_eigenvalues(&mut d, &mut e, f64::EPSILON)?;
    Ok(d)
}

/// All roots of `p`, ascending and repeated by multiplicity. Fails if any
/// root is not real.
pub fn real_roots(p: &RationalPolynomial) -> Result<Vec<f64>, RootError> {
    if p.is_zero() {
        return Err(RootError::ZeroPolynomial);
    }
    let mut roots = Vec::with_capacity(p.degree().unwrap_or(0));
    // zero roots are split off exactly so they come out as exact zeros
    let zeros = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    roots.extend(std::iter::repeat_n(0.0, zeros));
    let rest = RationalPolynomial::new(p.coeffs()[zeros..].to_vec());
    for (factor, mult) in squarefree_decomposition(&rest) {
        for r in squarefree_real_roots(&factor)? {
            roots.extend(std::iter::repeat_n(r, mult));
        }
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Roots of p(E²) given p in u = E², as ±√u with multiplicities. u-roots in
/// [−`neg_tol`, 0) are clamped to zero.
pub(crate) fn roots_in_square(
    p_in_u: &RationalPolynomial,
    multiplicity: usize,
    neg_tol: f64,
) -> Result<Vec<f64>, RootError> {
    let mut out = Vec::new();
    for u in real_roots(p_in_u)? {
        let u = if u < 0.0 {
            if u < -neg_tol {
                return Err(RootError::NegativeSquare(u));
            }
            0.0
        } else {
            u
        };
        let e = u.sqrt();
        for _ in 0..multiplicity {
            out.push(e);
            out.push(-e);
        }
    }
    Ok(out)
}

pub(crate) fn rational_from_f64(x: f64) -> Result<Rational, RootError> {
    if x.is_zero() {
        return Ok(Rational::zero());
    }
    Rational::from_float(x).ok_or(RootError::NonFiniteCoefficient(x))
}
