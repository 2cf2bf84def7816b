use jcxy::operators::DenseMatrix;
use jcxy::spectral::{cluster_degeneracies, eigen_symmetric};
use jcxy::{build_hamiltonian, Chain};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n);
    for r in 0..n {
        for c in r..n {
            let x = rng.gen_range(-1.0..1.0);
            m.set(r, c, x);
            m.set(c, r, x);
        }
    }
    m
}

#[allow(clippy::needless_range_loop)]
/// det(m − x) by Gaussian elimination with partial pivoting.
fn shifted_det(m: &DenseMatrix, x: f64) -> f64 {
    let n = m.dim();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| m.get(r, c) - if r == c { x } else { 0.0 })
                .collect()
        })
        .collect();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in (k + 1)..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// Roots of det(m − x) by a sign-change scan and bisection; only valid for
/// simple eigenvalues, which random matrices have almost surely.
fn scan_roots(m: &DenseMatrix) -> Vec<f64> {
    let bound = (0..m.dim())
        .map(|r| m.row(r).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    let steps = 20_000;
    let h = 2.0 * bound / steps as f64;
    let mut roots = Vec::new();
    let mut x0 = -bound;
    let mut f0 = shifted_det(m, x0);
    for i in 1..=steps {
        let x1 = -bound + i as f64 * h;
        let f1 = shifted_det(m, x1);
        if f0.signum() != f1.signum() {
            let (mut lo, mut hi, mut flo) = (x0, x1, f0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let fm = shifted_det(m, mid);
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

#[test]
fn matches_determinant_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let m = random_symmetric(&mut rng, 6);
        let eigs = eigen_symmetric(&m, 1e-12).unwrap();
        let scan = scan_roots(&m);
        assert_eq!(scan.len(), 6, "{scan:?}");
        for (a, b) in eigs.iter().zip(&scan) {
            assert!((a - b).abs() < 1e-8, "{eigs:?} vs {scan:?}");
        }
    }
}

#[test]
fn trace_and_frobenius_are_preserved() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in [1, 2, 3, 7, 16, 40] {
        let m = random_symmetric(&mut rng, n);
        let eigs = eigen_symmetric(&m, 1e-12).unwrap();
        let sum: f64 = eigs.iter().sum();
        let sq: f64 = eigs.iter().map(|x| x * x).sum();
        assert!((sum - m.trace()).abs() < 1e-11 * n as f64);
        assert!((sq - m.frobenius_norm_sq()).abs() < 1e-11 * m.frobenius_norm_sq().max(1.0));
        assert!(eigs.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn diagonal_input() {
    let m = DenseMatrix::from_diagonal(&[3.0, -1.0, 2.0, 2.0]);
    assert_eq!(
        eigen_symmetric(&m, 1e-12).unwrap(),
        vec![-1.0, 2.0, 2.0, 3.0]
    );
}

#[test]
fn rejects_asymmetric_input() {
    let m = DenseMatrix::from_row_major(2, vec![0.0, 1.0, 0.0, 0.0]).unwrap();
    assert!(eigen_symmetric(&m, 1e-12).is_err());
}

#[test]
fn clustering_multiplicities_sum_to_dimension() {
    for (chain, g, j) in [
        (Chain::open(5, 3), 0.4, 1.1),
        (Chain::closed(5, 2), 1.0, -0.6),
    ] {
        let h = build_hamiltonian(&chain.with_couplings(g, j))
            .unwrap()
            .matrix;
        let eigs = eigen_symmetric(&h, 1e-12).unwrap();
        let s = cluster_degeneracies(&eigs, 1e-9).unwrap();
        assert_eq!(s.multiplicities().iter().sum::<usize>(), chain.dim());
        assert!(s
            .levels
            .windows(2)
            .all(|w| w[1].energy - w[0].energy > 1e-9));
    }
}
