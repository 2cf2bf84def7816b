//! Single-slot generators and their Kronecker embedding into the
//! photon ⊗ spin₁ ⊗ … ⊗ spin_N product space.
//!
//! Basis convention: the photon slot is the leftmost (slowest-varying)
//! tensor factor, followed by spins 1…N. Inside a slot the first basis
//! vector is |0⟩ for the photon and |↑⟩ for a spin. A basis index is read
//! as the binary number `photon s₁ s₂ … s_N` with `↑ = 0`, `↓ = 1`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Largest matrix dimension the dense path will allocate unless told otherwise
/// (N = 12 spins plus the photon).
pub const DEFAULT_MAX_DIM: usize = 1 << 13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("requested dimension {requested} exceeds the cap of {cap}")]
    DimensionOverflow { requested: usize, cap: usize },
    #[error("site {site} out of range 1..={n_spins}")]
    SiteOutOfRange { site: usize, n_spins: usize },
    #[error("operator {0} has imaginary entries and cannot enter the real embedding")]
    ComplexOperator(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("chain needs at least one spin")]
    NoSpins,
}

/// Named 2×2 generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    SigmaX,
    SigmaY,
    SigmaZ,
    SigmaPlus,
    SigmaMinus,
    Identity,
    /// Photon annihilation, truncated to {|0⟩, |1⟩}.
    A,
    /// Photon creation, truncated to {|0⟩, |1⟩}.
    ADagger,
}

impl Generator {
    pub const ALL: [Generator; 8] = [
        Generator::SigmaX,
        Generator::SigmaY,
        Generator::SigmaZ,
        Generator::SigmaPlus,
        Generator::SigmaMinus,
        Generator::Identity,
        Generator::A,
        Generator::ADagger,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::SigmaX => "sigma_x",
            Generator::SigmaY => "sigma_y",
            Generator::SigmaZ => "sigma_z",
            Generator::SigmaPlus => "sigma_plus",
            Generator::SigmaMinus => "sigma_minus",
            Generator::Identity => "identity",
            Generator::A => "a",
            Generator::ADagger => "a_dagger",
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A 2×2 complex matrix acting on one tensor slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallOperator {
    pub entries: [[Complex64; 2]; 2],
}

impl SmallOperator {
    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        SmallOperator {
            entries: [[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]],
        }
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().flatten().all(|z| z.im == 0.0)
    }

    /// Real part, or an error if any entry has a nonzero imaginary part.
    pub fn to_real(&self) -> Result<[[f64; 2]; 2], OperatorError> {
        if !self.is_real() {
            return Err(OperatorError::ComplexOperator(format!(
                "{:?}",
                self.entries
            )));
        }
        let e = &self.entries;
        Ok([[e[0][0].re, e[0][1].re], [e[1][0].re, e[1][1].re]])
    }

    pub fn transpose(&self) -> Self {
        let e = &self.entries;
        SmallOperator {
            entries: [[e[0][0], e[1][0]], [e[0][1], e[1][1]]],
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        out.entries.iter_mut().flatten().for_each(|z| *z *= s);
        out
    }
}

impl Add for SmallOperator {
    type Output = SmallOperator;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.entries[r][c] += rhs.entries[r][c];
            }
        }
        out
    }
}

impl Sub for SmallOperator {
    type Output = SmallOperator;
    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for SmallOperator {
    type Output = SmallOperator;
    fn mul(self, rhs: Self) -> Self {
        let mut out = SmallOperator::from_real([[0.0; 2]; 2]);
        for r in 0..2 {
            for c in 0..2 {
                out.entries[r][c] =
                    self.entries[r][0] * rhs.entries[0][c] + self.entries[r][1] * rhs.entries[1][c];
            }
        }
        out
    }
}

/// The exact 2×2 matrix of a named generator.
pub fn generator(name: Generator) -> SmallOperator {
    match name {
        Generator::SigmaX => SmallOperator::from_real([[0.0, 1.0], [1.0, 0.0]]),
        Generator::SigmaY => {
            let i = Complex64::new(0.0, 1.0);
            let z = Complex64::new(0.0, 0.0);
            SmallOperator {
                entries: [[z, -i], [i, z]],
            }
        }
        Generator::SigmaZ => SmallOperator::from_real([[1.0, 0.0], [0.0, -1.0]]),
        // |↓⟩ → |↑⟩
        Generator::SigmaPlus => SmallOperator::from_real([[0.0, 1.0], [0.0, 0.0]]),
        Generator::SigmaMinus => SmallOperator::from_real([[0.0, 0.0], [1.0, 0.0]]),
        Generator::Identity => SmallOperator::from_real([[1.0, 0.0], [0.0, 1.0]]),
        // |1⟩ → |0⟩
        Generator::A => SmallOperator::from_real([[0.0, 1.0], [0.0, 0.0]]),
        Generator::ADagger => SmallOperator::from_real([[0.0, 0.0], [1.0, 0.0]]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    fn bit(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

/// Index of the product state |photons; s₁ … s_N⟩ in the full basis.
pub fn basis_index(photons: u8, spins: &[Spin]) -> usize {
    assert!(photons <= 1, "photon space is truncated to 0 or 1 quanta");
    spins
        .iter()
        .fold(photons as usize, |acc, s| (acc << 1) | s.bit())
}

/// Dense row-major real square matrix.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix({}x{})", self.dim, self.dim)?;
        if self.dim <= 16 {
            for r in 0..self.dim {
                writeln!(f, "  {:?}", self.row(r))?;
            }
        }
        Ok(())
    }
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Builds a matrix from row-major data, rejecting non-square or non-finite input.
    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self, OperatorError> {
        if data.len() != dim * dim {
            return Err(OperatorError::DimensionMismatch {
                left: dim * dim,
                right: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(OperatorError::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(DenseMatrix { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        DenseMatrix { dim, data }
    }

    pub fn from_small(op: [[f64; 2]; 2]) -> Self {
        DenseMatrix {
            dim: 2,
            data: vec![op[0][0], op[0][1], op[1][0], op[1][1]],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.dim + col] = value;
    }

    #[inline]
    fn add_at(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.dim + col] += value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r))
    }

    /// Exact entry-wise symmetry.
    pub fn is_symmetric(&self) -> bool {
        self.max_asymmetry() == 0.0
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in (r + 1)..self.dim {
                worst = worst.max((self.get(r, c) - self.get(c, r)).abs());
            }
        }
        worst
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        DenseMatrix {
            dim: self.dim,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    fn check_dims(&self, other: &DenseMatrix) -> Result<(), OperatorError> {
        if self.dim != other.dim {
            return Err(OperatorError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &DenseMatrix) -> Result<Self, OperatorError> {
        self.check_dims(other)?;
        Ok(DenseMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &DenseMatrix) -> Result<Self, OperatorError> {
        self.check_dims(other)?;
        Ok(DenseMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Matrix product; zero entries of the left factor are skipped, which keeps
    /// products of the (very sparse) embedded operators cheap.
    pub fn try_mul(&self, other: &DenseMatrix) -> Result<Self, OperatorError> {
        self.check_dims(other)?;
        let n = self.dim;
        let mut out = DenseMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[r * n..(r + 1) * n];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }
}

impl<'a> Add<&'a DenseMatrix> for &'a DenseMatrix {
    type Output = DenseMatrix;
    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.try_add(rhs)
            .expect("dimension mismatch in matrix addition")
    }
}

impl<'a> Sub<&'a DenseMatrix> for &'a DenseMatrix {
    type Output = DenseMatrix;
    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.try_sub(rhs)
            .expect("dimension mismatch in matrix subtraction")
    }
}

impl<'a> Mul<&'a DenseMatrix> for &'a DenseMatrix {
    type Output = DenseMatrix;
    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.try_mul(rhs)
            .expect("dimension mismatch in matrix product")
    }
}

/// Kronecker product with the default dimension cap.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix, OperatorError> {
    kron_capped(a, b, DEFAULT_MAX_DIM)
}

/// Kronecker product `a ⊗ b`; the left factor is the slowest-varying index.
pub fn kron_capped(
    a: &DenseMatrix,
    b: &DenseMatrix,
    max_dim: usize,
) -> Result<DenseMatrix, OperatorError> {
    let requested = a
        .dim
        .checked_mul(b.dim)
        .ok_or(OperatorError::DimensionOverflow {
            requested: usize::MAX,
            cap: max_dim,
        })?;
    if requested > max_dim {
        return Err(OperatorError::DimensionOverflow {
            requested,
            cap: max_dim,
        });
    }
    let nb = b.dim;
    Ok(DenseMatrix::from_fn(requested, |r, c| {
        a.get(r / nb, c / nb) * b.get(r % nb, c % nb)
    }))
}

/// Embeds products of slot operators into the space of one photon mode and
/// `n_spins` spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Embedder {
    n_spins: usize,
    dim: usize,
}

impl Embedder {
    pub fn new(n_spins: usize) -> Result<Self, OperatorError> {
        Self::with_max_dim(n_spins, DEFAULT_MAX_DIM)
    }

    pub fn with_max_dim(n_spins: usize, max_dim: usize) -> Result<Self, OperatorError> {
        if n_spins == 0 {
            return Err(OperatorError::NoSpins);
        }
        let slots = n_spins + 1;
        let dim = 1usize
            .checked_shl(slots as u32)
            .filter(|_| slots < usize::BITS as usize)
            .ok_or(OperatorError::DimensionOverflow {
                requested: usize::MAX,
                cap: max_dim,
            })?;
        if dim > max_dim {
            return Err(OperatorError::DimensionOverflow {
                requested: dim,
                cap: max_dim,
            });
        }
        Ok(Embedder { n_spins, dim })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_site(&self, site: usize) -> Result<(), OperatorError> {
        if site == 0 || site > self.n_spins {
            return Err(OperatorError::SiteOutOfRange {
                site,
                n_spins: self.n_spins,
            });
        }
        Ok(())
    }

    /// `I_field ⊗ I^{site-1} ⊗ op ⊗ I^{N-site}`.
    pub fn site(&self, op: &SmallOperator, site: usize) -> Result<DenseMatrix, OperatorError> {
        self.product(None, &[(site, *op)])
    }

    /// `op ⊗ I^{N}`.
    pub fn field(&self, op: &SmallOperator) -> Result<DenseMatrix, OperatorError> {
        self.product(Some(op), &[])
    }

    /// The full Kronecker chain with `field` on the photon slot and the given
    /// operators on their sites; every other slot carries the identity.
    pub fn product(
        &self,
        field: Option<&SmallOperator>,
        sites: &[(usize, SmallOperator)],
    ) -> Result<DenseMatrix, OperatorError> {
        let mut out = DenseMatrix::zeros(self.dim);
        self.accumulate(&mut out, 1.0, field, sites)?;
        Ok(out)
    }

    /// Adds `coeff` times the Kronecker chain into `target` without
    /// materializing the chain itself.
    pub fn accumulate(
        &self,
        target: &mut DenseMatrix,
        coeff: f64,
        field: Option<&SmallOperator>,
        sites: &[(usize, SmallOperator)],
    ) -> Result<(), OperatorError> {
        if target.dim != self.dim {
            return Err(OperatorError::DimensionMismatch {
                left: target.dim,
                right: self.dim,
            });
        }
        let identity = generator(Generator::Identity).to_real()?;
        let mut slots = vec![identity; self.n_spins + 1];
        if let Some(op) = field {
            slots[0] = op.to_real()?;
        }
        for (site, op) in sites {
            self.check_site(*site)?;
            let real = op.to_real()?;
            slots[*site] = mat2_mul(&slots[*site], &real);
        }

        // Column by column: the image of a basis vector under a product of
        // slot operators is the tensor product of the slot images.
        let mut frontier: Vec<(usize, f64)> = Vec::new();
        let mut next: Vec<(usize, f64)> = Vec::new();
        let n_slots = slots.len();
        for col in 0..self.dim {
            frontier.clear();
            frontier.push((0, coeff));
            for (s, op) in slots.iter().enumerate() {
                let bit = (col >> (n_slots - 1 - s)) & 1;
                next.clear();
                for &(row, val) in &frontier {
                    for (r_bit, op_row) in op.iter().enumerate() {
                        let entry = op_row[bit];
                        if entry != 0.0 {
                            next.push(((row << 1) | r_bit, val * entry));
                        }
                    }
                }
                std::mem::swap(&mut frontier, &mut next);
                if frontier.is_empty() {
                    break;
                }
            }
            for &(row, val) in &frontier {
                target.add_at(row, col, val);
            }
        }
        Ok(())
    }
}

fn mat2_mul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub fn embed_site(
    op: &SmallOperator,
    site: usize,
    n_spins: usize,
) -> Result<DenseMatrix, OperatorError> {
    Embedder::new(n_spins)?.site(op, site)
}

pub fn embed_field(op: &SmallOperator, n_spins: usize) -> Result<DenseMatrix, OperatorError> {
    Embedder::new(n_spins)?.field(op)
}
