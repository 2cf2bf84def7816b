//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the output.

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;

use jcxy::exactpoly::{
    charpoly_exact, rational_hamiltonian, real_roots, Rational, RationalPolynomial,
};
use jcxy::spectral::{eigen_symmetric, DEFAULT_CONV_TOL};
use jcxy::sweep::{emit, sweep_phi, Format, SweepSpec, SweepTable};
use jcxy::{build_hamiltonian, spectrum_of, Chain, Tolerances, Topology};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn eigs(chain: Chain, g: f64, j: f64) -> Vec<f64> {
    let h = build_hamiltonian(&chain.with_couplings(g, j)).expect("valid config");
    eigen_symmetric(&h.matrix, DEFAULT_CONV_TOL).expect("converged")
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn bound(worst: f64, tol: f64, what: &str) -> Outcome {
    let msg = format!("{what}, max deviation {worst:.2e} (tol {tol:e})");
    if worst <= tol {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

// The open edge-coupled spectrum, typed in independently of the library.
fn edge_reference(g: f64, j: f64) -> Vec<f64> {
    let (g2, j2) = (g * g, j * j);
    let s = |x: f64| x.max(0.0).sqrt();
    let a = s(2.0 * g2 * j2 + j2 * j2);
    let b = s(g2 * g2 - 2.0 * g2 * j2 + 5.0 * j2 * j2);
    let e1 = s(g2 + 3.0 * j2 + 2.0 * a);
    let e2 = s(g2 + 3.0 * j2 + b) / 2f64.sqrt();
    let e3 = s(g2 + 3.0 * j2 - 2.0 * a);
    let e4 = s(g2 + 3.0 * j2 - b) / 2f64.sqrt();
    let mut out = vec![0.0; 8];
    for (e, m) in [(e1, 2), (e2, 4), (e3, 2), (e4, 4)] {
        for _ in 0..m {
            out.push(e);
            out.push(-e);
        }
    }
    sorted(out)
}

fn criterion_1(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let g = rng.gen_range(-2.0..=2.0);
        let j = rng.gen_range(-2.0..=2.0);
        worst = worst.max(max_diff(
            &eigs(Chain::open(4, 1), g, j),
            &edge_reference(g, j),
        ));
    }
    bound(
        worst,
        1e-8,
        "open k=1 vs closed-form branches at 200 random points",
    )
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Polynomial in E from coefficients of E^0, E^2, E^4, ...
fn even_poly(u_coeffs: &[Rational]) -> RationalPolynomial {
    let mut c = vec![Rational::zero(); 2 * u_coeffs.len() - 1];
    for (i, x) in u_coeffs.iter().enumerate() {
        c[2 * i] = x.clone();
    }
    RationalPolynomial::new(c)
}

fn product(factors: &[(RationalPolynomial, u32)]) -> RationalPolynomial {
    let mut acc = RationalPolynomial::one();
    for (f, e) in factors {
        for _ in 0..*e {
            acc = &acc * f;
        }
    }
    acc
}

fn open_second_expanded(g: &Rational, j: &Rational) -> RationalPolynomial {
    let (g2, j2) = (g * g, j * j);
    let (g4, j4) = (&g2 * &g2, &j2 * &j2);
    let (g6, j6) = (&g4 * &g2, &j4 * &j2);
    let j8 = &j4 * &j4;
    let quartic = even_poly(&[(&g2 + &j2) * &j2, -(&g2 + int(3) * &j2), int(1)]);
    let octic = even_poly(&[
        &g6 * &j2 + int(7) * &g4 * &j4 + int(3) * &g2 * &j6 + int(5) * &j8,
        -(&g6 + int(7) * &g4 * &j2 + int(23) * &g2 * &j4 + int(21) * &j6),
        int(3) * &g4 + int(15) * &g2 * &j2 + int(24) * &j4,
        -(int(3) * &g2 + int(9) * &j2),
        int(1),
    ]);
    let e8 = even_poly(&[int(0), int(0), int(0), int(0), int(1)]);
    product(&[(e8, 1), (quartic, 2), (octic, 2)])
}

fn closed_expanded(g: &Rational, j: &Rational) -> RationalPolynomial {
    let (g2, j2) = (g * g, j * j);
    let (g4, j4) = (&g2 * &g2, &j2 * &j2);
    let e8 = even_poly(&[int(0), int(0), int(0), int(0), int(1)]);
    let lin = even_poly(&[-g2.clone(), int(1)]);
    let quartic = even_poly(&[int(2) * &g2 * &j2, -(&g2 + int(4) * &j2), int(1)]);
    let sextic = even_poly(&[
        -(int(2) * &g4 * &j2 + int(8) * &g2 * &j4),
        &g4 + int(6) * &g2 * &j2 + int(32) * &j4,
        -(int(2) * &g2 + int(12) * &j2),
        int(1),
    ]);
    product(&[(e8, 1), (lin, 2), (quartic, 2), (sextic, 2)])
}

/// Axes, the origin, and random mixed-sign rationals; 25 in total.
fn sample_points(rng: &mut ChaCha8Rng) -> Vec<(Rational, Rational)> {
    let mut pts = vec![
        (q(0, 1), q(0, 1)),
        (q(1, 1), q(0, 1)),
        (q(-3, 2), q(0, 1)),
        (q(0, 1), q(1, 1)),
        (q(0, 1), q(-2, 3)),
    ];
    while pts.len() < 25 {
        let g = q(
            rng.gen_range(1..=9) * if rng.gen_bool(0.5) { 1 } else { -1 },
            rng.gen_range(1..=5),
        );
        let j = q(
            rng.gen_range(1..=9) * if rng.gen_bool(0.5) { 1 } else { -1 },
            rng.gen_range(1..=5),
        );
        pts.push((g, j));
    }
    pts
}

fn distinct_ratios(pts: &[(Rational, Rational)]) -> usize {
    pts.iter()
        .filter(|(_, j)| !j.is_zero())
        .map(|(g, j)| (g * g) / (j * j))
        .collect::<HashSet<_>>()
        .len()
}

fn certify(
    chains: &[Chain],
    pts: &[(Rational, Rational)],
    claimed: fn(&Rational, &Rational) -> RationalPolynomial,
) -> Outcome {
    for &chain in chains {
        for (g, j) in pts {
            let h = rational_hamiltonian(&chain, g, j).map_err(|e| e.to_string())?;
            if charpoly_exact(&h) != claimed(g, j) {
                return Err(format!("{chain} differs at (G, J) = ({g}, {j})"));
            }
        }
    }
    Ok(format!(
        "{} chain(s) x {} points ({} distinct G^2/J^2 ratios) equal coefficient for coefficient",
        chains.len(),
        pts.len(),
        distinct_ratios(pts)
    ))
}

fn criterion_2(rng: &mut ChaCha8Rng) -> Outcome {
    certify(
        &[Chain::open(4, 2)],
        &sample_points(rng),
        open_second_expanded,
    )
}

fn criterion_3(rng: &mut ChaCha8Rng) -> Outcome {
    let ring: Vec<Chain> = (1..=4).map(|k| Chain::closed(4, k)).collect();
    certify(&ring, &sample_points(rng), closed_expanded)
}

fn criterion_4() -> Outcome {
    let tols = Tolerances {
        conv: DEFAULT_CONV_TOL,
        cluster: Some(1e-9),
    };
    let mult = |chain: Chain| {
        spectrum_of(&chain.with_couplings(1.0, 0.3), &tols)
            .map(|s| s.multiplicities())
            .map_err(|e| e.to_string())
    };
    let edge = mult(Chain::open(4, 1))?;
    if edge != [2, 4, 2, 4, 8, 4, 2, 4, 2] {
        return Err(format!("open k=1 multiplicities {edge:?}"));
    }
    for chain in [Chain::open(4, 2), Chain::closed(4, 1)] {
        let m = mult(chain)?;
        let ok = m.len() == 13 && m[6] == 8 && m.iter().enumerate().all(|(i, &x)| i == 6 || x == 2);
        if !ok {
            return Err(format!("{chain} multiplicities {m:?}"));
        }
    }
    Ok(
        "9 levels (2,4,2,4,8,4,2,4,2) for k=1; 13 levels with an 8-fold zero for k=2 and the ring"
            .into(),
    )
}

fn criterion_5() -> Outcome {
    let want = sorted([vec![1.0; 8], vec![0.0; 16], vec![-1.0; 8]].concat());
    let worst = [Chain::open(4, 1), Chain::open(4, 2), Chain::closed(4, 1)]
        .into_iter()
        .map(|c| max_diff(&eigs(c, 1.0, 0.0), &want))
        .fold(0.0, f64::max);
    bound(worst, 1e-10, "three configurations at G=1, J=0")
}

fn criterion_6(rng: &mut ChaCha8Rng) -> Outcome {
    for _ in 0..50 {
        let j: f64 = rng.gen_range(-2.0..=2.0);
        let s = spectrum_of(
            &Chain::closed(4, 1).with_couplings(0.7, j),
            &Tolerances::default(),
        )
        .map_err(|e| e.to_string())?;
        for e in [0.7, -0.7] {
            let hit = s.levels.iter().find(|l| (l.energy - e).abs() <= 1e-9);
            if hit.map(|l| l.multiplicity) != Some(2) {
                return Err(format!("J = {j}: level {e} is {hit:?}"));
            }
        }
    }
    Ok("levels +0.7 and -0.7, each twofold, for 50 random J".into())
}

/// Photon number plus up spins, read off the basis index (bit 0 = up).
fn excitations(index: usize, n_spins: usize) -> i32 {
    let photon = (index >> n_spins) & 1;
    let ups = (0..n_spins).filter(|s| (index >> s) & 1 == 0).count();
    (photon + ups) as i32
}

fn spin_z_twice(index: usize, n_spins: usize) -> i32 {
    (0..n_spins)
        .map(|s| if (index >> s) & 1 == 0 { 1 } else { -1 })
        .sum()
}

fn invariant_structure() -> Result<(), String> {
    let mut chains = Vec::new();
    for n in 1..=5 {
        for k in 1..=n {
            chains.push(Chain::open(n, k));
            if n >= 3 {
                chains.push(Chain::closed(n, k));
            }
        }
    }
    for chain in chains {
        let n = chain.n_spins;
        for (g, j) in [(1.0, 0.3), (0.0, 0.8), (-1.2, -0.4)] {
            let h = build_hamiltonian(&chain.with_couplings(g, j))
                .unwrap()
                .matrix;
            let dim = h.dim();
            let mut trace = 0.0;
            let mut sz_commutes = true;
            for r in 0..dim {
                trace += h.get(r, r);
                for c in 0..dim {
                    let x = h.get(r, c);
                    if x != h.get(c, r) {
                        return Err(format!("{chain}: H not symmetric at ({r}, {c})"));
                    }
                    // diagonal observables: [H, D]_rc = H_rc (d_c - d_r)
                    if x != 0.0 && excitations(r, n) != excitations(c, n) {
                        return Err(format!("{chain}: [H, N_ex] != 0 at ({r}, {c})"));
                    }
                    if x != 0.0 && spin_z_twice(r, n) != spin_z_twice(c, n) {
                        sz_commutes = false;
                    }
                }
            }
            if trace != 0.0 {
                return Err(format!("{chain}: trace {trace}"));
            }
            if sz_commutes != (g == 0.0) {
                return Err(format!("{chain} at G = {g}: [H, S_z] = 0 is {sz_commutes}"));
            }
        }
    }
    Ok(())
}

fn criterion_7(rng: &mut ChaCha8Rng) -> Outcome {
    invariant_structure()?;

    let mut chains: Vec<Chain> = (1..=5).map(|n| Chain::open(n, 1.max(n / 2))).collect();
    chains.push(Chain::closed(4, 1));
    let mut worst = 0.0f64;
    for &chain in &chains {
        for _ in 0..10 {
            let (g, j) = (rng.gen_range(-2.0..=2.0), rng.gen_range(-2.0..=2.0));
            let e = eigs(chain, g, j);
            let neg = sorted(e.iter().map(|x| -x).collect());
            worst = worst.max(max_diff(&e, &neg));
        }
    }
    if worst > 1e-10 {
        return Err(format!("E -> -E deviation {worst:.2e}"));
    }

    for chain in [
        Chain::open(2, 1),
        Chain::open(2, 2),
        Chain::open(4, 1),
        Chain::open(4, 2),
        Chain::closed(4, 1),
    ] {
        for _ in 0..5 {
            let (g, j) = (rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0));
            let s = spectrum_of(&chain.with_couplings(g, j), &Tolerances::default()).unwrap();
            if s.levels.iter().any(|l| l.multiplicity % 2 == 1) {
                return Err(format!(
                    "{chain} at ({g}, {j}): odd multiplicity {:?}",
                    s.multiplicities()
                ));
            }
        }
    }
    Ok(format!(
        "symmetric, traceless, N_ex and S_z commutation, E -> -E within {worst:.2e}, even degeneracy"
    ))
}

fn criterion_8(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..20 {
        let n = 1 + i % 4;
        let topology = if n >= 3 && rng.gen_bool(0.5) {
            Topology::Closed
        } else {
            Topology::Open
        };
        let chain = Chain::new(n, topology, rng.gen_range(1..=n));
        let g = q(rng.gen_range(-12..=12), rng.gen_range(1..=6));
        let j = q(rng.gen_range(-12..=12), rng.gen_range(1..=6));
        let h = rational_hamiltonian(&chain, &g, &j).map_err(|e| e.to_string())?;
        let roots = real_roots(&charpoly_exact(&h)).map_err(|e| format!("{chain}: {e}"))?;
        let e = eigs(chain, g.to_f64().unwrap(), j.to_f64().unwrap());
        worst = worst.max(max_diff(&roots, &e));
    }
    bound(
        worst,
        1e-8,
        "exact-polynomial roots vs eigensolver for 20 configurations",
    )
}

fn expanded_row(table: &SweepTable, i: usize) -> Vec<f64> {
    sorted(
        table.rows[i]
            .levels
            .iter()
            .flat_map(|l| std::iter::repeat_n(l.energy, l.multiplicity))
            .collect(),
    )
}

fn criterion_9() -> Outcome {
    let spec = SweepSpec::new(Chain::open(4, 1), 1.0);
    let tols = Tolerances::default();
    let a = sweep_phi(&spec, &tols).map_err(|e| e.to_string())?;
    let b = sweep_phi(&spec, &tols).map_err(|e| e.to_string())?;
    let csv = emit(&a, Format::Csv).map_err(|e| e.to_string())?;
    if csv != emit(&b, Format::Csv).map_err(|e| e.to_string())? {
        return Err("csv differs between identical runs".into());
    }
    if a.rows.len() != 601 {
        return Err(format!("{} rows", a.rows.len()));
    }

    let mid = a
        .rows
        .iter()
        .position(|r| (r.phi - FRAC_PI_2).abs() < 1e-12)
        .ok_or("no row at phi = pi/2")?;
    let s5 = 5f64.sqrt();
    let xy = sorted(vec![
        s5,
        -s5,
        (1.0 + s5) / 2.0,
        -(1.0 + s5) / 2.0,
        1.0,
        -1.0,
        (s5 - 1.0) / 2.0,
        (1.0 - s5) / 2.0,
        0.0,
    ]);
    let got: Vec<f64> = a.rows[mid].levels.iter().map(|l| l.energy).collect();
    if got.len() != xy.len() {
        return Err(format!("{} levels at phi = pi/2", got.len()));
    }
    let xy_dev = max_diff(&got, &xy);
    if xy_dev > 1e-8 {
        return Err(format!("XY levels off by {xy_dev:.2e}"));
    }

    let mut mirror_dev = 0.0f64;
    let mut pairs = 0;
    for (i, row) in a.rows.iter().enumerate() {
        let target = PI - row.phi;
        if let Some(k) = a.rows.iter().position(|r| (r.phi - target).abs() < 1e-12) {
            mirror_dev = mirror_dev.max(max_diff(&expanded_row(&a, i), &expanded_row(&a, k)));
            pairs += 1;
        }
    }
    if pairs < 400 || mirror_dev > 1e-8 {
        return Err(format!("{pairs} mirror pairs, deviation {mirror_dev:.2e}"));
    }
    Ok(format!(
        "601 rows, byte-identical csv ({} bytes), XY levels within {xy_dev:.2e}, {pairs} phi/pi-phi pairs within {mirror_dev:.2e}",
        csv.len()
    ))
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let results: Vec<(usize, Outcome)> = vec![
        (1, criterion_1(&mut rng)),
        (2, criterion_2(&mut rng)),
        (3, criterion_3(&mut rng)),
        (4, criterion_4()),
        (5, criterion_5()),
        (6, criterion_6(&mut rng)),
        (7, criterion_7(&mut rng)),
        (8, criterion_8(&mut rng)),
        (9, criterion_9()),
    ];
    let mut failed = 0;
    for (n, r) in &results {
        match r {
            Ok(msg) => println!("PASS criterion {n}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {n}: {msg}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
