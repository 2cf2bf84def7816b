//! Dense real-symmetric eigenvalues and degeneracy clustering.
//!
//! The solver reduces the matrix to tridiagonal form with Householder
//! reflections and then runs the implicitly shifted QL iteration on the
//! tridiagonal pair. Only eigenvalues are computed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{build_hamiltonian, ModelConfig, ModelError};
use crate::operators::DenseMatrix;

pub const DEFAULT_CONV_TOL: f64 = 1e-12;
/// QL sweeps allowed per eigenvalue before giving up.
pub const MAX_SWEEPS_PER_EIGENVALUE: usize = 64;
pub const DEFAULT_CLUSTER_REL_TOL: f64 = 1e-9;
/// Input symmetry is checked to this absolute tolerance.
pub const SYMMETRY_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("matrix of dimension {dim} is not symmetric (max |m_ij - m_ji| = {asymmetry:e})")]
    NotSymmetric { dim: usize, asymmetry: f64 },
    #[error(
        "QL iteration did not converge for eigenvalue {index} of a {dim}x{dim} matrix \
         after {cap} sweeps"
    )]
    NoConvergence {
        dim: usize,
        index: usize,
        cap: usize,
    },
    #[error("eigenvalues passed to clustering are not sorted at position {0}")]
    Unsorted(usize),
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Numeric tolerances for a spectrum computation. `cluster = None` selects
/// the default `1e-9 · max(1, max|H_ij|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub conv: f64,
    pub cluster: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            conv: DEFAULT_CONV_TOL,
            cluster: None,
        }
    }
}

impl Tolerances {
    pub fn cluster_for(&self, m: &DenseMatrix) -> f64 {
        self.cluster
            .unwrap_or_else(|| DEFAULT_CLUSTER_REL_TOL * m.max_abs().max(1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub energy: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// All eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Clustered levels, ascending in energy.
    pub levels: Vec<Level>,
    pub cluster_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ModelConfig>,
}

impl Spectrum {
    pub fn multiplicities(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.multiplicity).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    /// The level within `tol` of `energy`, if any.
    pub fn level_near(&self, energy: f64, tol: f64) -> Option<&Level> {
        self.levels
            .iter()
            .find(|l| (l.energy - energy).abs() <= tol)
    }
}

fn check_tol(tol: f64) -> Result<(), SpectralError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(SpectralError::BadTolerance(tol))
    }
}

/// All eigenvalues of a real symmetric matrix, ascending.
///
/// Tridiagonal deflation happens once an off-diagonal element falls below
/// `conv_tol` relative to its neighbouring diagonal entries, which keeps the
/// backward error of every eigenvalue under `conv_tol · ‖m‖`. Tolerances
/// below machine epsilon are raised to it.
pub fn eigen_symmetric(m: &DenseMatrix, conv_tol: f64) -> Result<Vec<f64>, SpectralError> {
    check_tol(conv_tol)?;
    let asymmetry = m.max_asymmetry();
    if asymmetry > SYMMETRY_TOL {
        return Err(SpectralError::NotSymmetric {
            dim: m.dim(),
            asymmetry,
        });
    }
    let (mut d, mut e) = householder_tridiagonal(m);
    tridiagonal_eigenvalues(&mut d, &mut e, conv_tol)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Householder reduction to tridiagonal form. Returns the diagonal and the
/// sub-diagonal (padded with a trailing zero to the full length).
fn householder_tridiagonal(m: &DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.dim();
    // symmetrize exactly; input is symmetric to 1e-14 at worst
    let mut a: Vec<f64> = DenseMatrix::from_fn(n, |r, c| 0.5 * (m.get(r, c) + m.get(c, r)))
        .as_slice()
        .to_vec();
    let mut off = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        // column k below the diagonal
        let scale: f64 = ((k + 1)..n).map(|i| a[i * n + k].abs()).sum();
        if scale == 0.0 {
            off[k] = 0.0;
            continue;
        }
        let mut sigma = 0.0;
        for i in (k + 1)..n {
            v[i] = a[i * n + k] / scale;
            sigma += v[i] * v[i];
        }
        let x0 = v[k + 1];
        let alpha = -sigma.sqrt().copysign(x0);
        off[k] = scale * alpha;
        v[k + 1] = x0 - alpha;
        // H = I − β v vᵀ with β = 2 / vᵀv
        let vtv = sigma - x0 * x0 + v[k + 1] * v[k + 1];
        if vtv == 0.0 {
            continue;
        }
        let beta = 2.0 / vtv;

        // p = β A v on the trailing block
        for i in (k + 1)..n {
            let row = &a[i * n..(i + 1) * n];
            let s: f64 = ((k + 1)..n).map(|j| row[j] * v[j]).sum();
            p[i] = beta * s;
        }
        let ptv: f64 = ((k + 1)..n).map(|i| p[i] * v[i]).sum();
        let half = 0.5 * beta * ptv;
        for i in (k + 1)..n {
            p[i] -= half * v[i];
        }
        // A ← A − v pᵀ − p vᵀ
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                a[i * n + j] -= v[i] * p[j] + p[i] * v[j];
            }
        }
    }
    if n >= 2 {
        off[n - 2] = a[(n - 1) * n + (n - 2)];
    }
    let d = (0..n).map(|i| a[i * n + i]).collect();
    (d, off)
}

/// Implicit QL on a symmetric tridiagonal matrix.
///
/// `d` holds the diagonal, `e[i]` couples `d[i]` and `d[i + 1]`; `e` must have
/// the same length as `d` (its last entry is ignored). On return `d` holds
/// the eigenvalues in no particular order.
pub(crate) fn tridiagonal_eigenvalues(
    d: &mut [f64],
    e: &mut [f64],
    conv_tol: f64,
) -> Result<(), SpectralError> {
    check_tol(conv_tol)?;
    let n = d.len();
    assert_eq!(
        e.len(),
        n,
        "off-diagonal must be padded to the diagonal length"
    );
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let tol = conv_tol.max(f64::EPSILON);
    let norm = (0..n)
        .map(|i| d[i].abs() + e[i].abs() + if i > 0 { e[i - 1].abs() } else { 0.0 })
        .fold(0.0f64, f64::max);
    let floor = f64::EPSILON * tol * norm;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= 0.5 * tol * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if m == l + 1 {
                let (a, b) = eigen_2x2(d[l], e[l], d[l + 1]);
                d[l] = a;
                d[l + 1] = b;
                e[l] = 0.0;
                break;
            }
            if sweeps == MAX_SWEEPS_PER_EIGENVALUE {
                return Err(SpectralError::NoConvergence {
                    dim: n,
                    index: l,
                    cap: MAX_SWEEPS_PER_EIGENVALUE,
                });
            }
            sweeps += 1;

            // Wilkinson-type shift from the leading 2×2 block
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues of [[a, b], [b, c]], larger first. The smaller one comes
/// from the determinant to avoid cancellation.
fn eigen_2x2(a: f64, b: f64, c: f64) -> (f64, f64) {
    let sm = a + c;
    let rt = (a - c).hypot(2.0 * b);
    let (big, small) = if sm > 0.0 {
        let big = 0.5 * (sm + rt);
        (big, (a.max(c) / big) * a.min(c) - (b / big) * b)
    } else if sm < 0.0 {
        let small = 0.5 * (sm - rt);
        ((a.max(c) / small) * a.min(c) - (b / small) * b, small)
    } else {
        (0.5 * rt, -0.5 * rt)
    };
    (big, small)
}

/// Greedy left-to-right clustering: a new level starts whenever the gap to
/// the previous eigenvalue exceeds `cluster_tol`. Level energy is the mean
/// of its members.
pub fn cluster_degeneracies(eigs: &[f64], cluster_tol: f64) -> Result<Spectrum, SpectralError> {
    check_tol(cluster_tol)?;
    if let Some(pos) = eigs.windows(2).position(|w| w[1] < w[0]) {
        return Err(SpectralError::Unsorted(pos + 1));
    }
    let mut levels = Vec::new();
    let mut start = 0;
    for i in 1..=eigs.len() {
        if i == eigs.len() || eigs[i] - eigs[i - 1] > cluster_tol {
            if i > start {
                let members = &eigs[start..i];
                levels.push(Level {
                    energy: members.iter().sum::<f64>() / members.len() as f64,
                    multiplicity: members.len(),
                });
            }
            start = i;
        }
    }
    Ok(Spectrum {
        eigenvalues: eigs.to_vec(),
        levels,
        cluster_tol,
        config: None,
    })
}

/// Full pipeline: build H, diagonalize, cluster.
pub fn spectrum_of(config: &ModelConfig, tols: &Tolerances) -> Result<Spectrum, SpectralError> {
    let h = build_hamiltonian(config)?;
    spectrum_of_matrix(&h.matrix, tols).map(|mut s| {
        s.config = Some(*config);
        s
    })
}

pub fn spectrum_of_matrix(m: &DenseMatrix, tols: &Tolerances) -> Result<Spectrum, SpectralError> {
    let eigs = eigen_symmetric(m, tols.conv)?;
    cluster_degeneracies(&eigs, tols.cluster_for(m))
}
