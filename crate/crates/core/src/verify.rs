//! Self-checks behind `jcxy verify`.
//!
//! Every check is deterministic for a given seed: each one draws from its
//! own ChaCha stream, so selecting a narrower scope does not change the
//! random points a check sees.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::{
    analytic_branch_closed_quadratic, charpoly_closed, charpoly_open_second, expand_levels,
    levels_open_edge, roots_of_factored,
};
use crate::exactpoly::{
    certification_points, certify_factorization, charpoly_exact, rational_hamiltonian, real_roots,
    Rational,
};
use crate::model::{
    build_hamiltonian, commutator, excitation_number_operator, total_sz_operator, Chain,
    ModelConfig, Topology,
};
use crate::spectral::{eigen_symmetric, spectrum_of, Tolerances, DEFAULT_CONV_TOL};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// Four open spins, photon on an end spin.
    OpenEdge,
    /// Four open spins, photon on an inner spin.
    OpenSecond,
    /// Four-spin ring.
    Closed,
    Invariants,
    All,
}

impl std::str::FromStr for Scope {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "open-edge" => Ok(Scope::OpenEdge),
            "open-second" => Ok(Scope::OpenSecond),
            "closed" => Ok(Scope::Closed),
            "invariants" => Ok(Scope::Invariants),
            "all" => Ok(Scope::All),
            other => Err(format!(
                "unknown scope '{other}' (expected open-edge, open-second, closed, invariants or all)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Measured and reported, never counted as a failure.
    Info,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn from_result(name: &str, r: Result<String, String>) -> Self {
        let (status, detail) = match r {
            Ok(d) => (Status::Pass, d),
            Err(d) => (Status::Fail, d),
        };
        Check {
            name: name.to_string(),
            status,
            detail,
        }
    }

    fn info(name: &str, detail: String) -> Self {
        Check {
            name: name.to_string(),
            status: Status::Info,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> usize {
        self.count(Status::Pass)
    }

    pub fn failed(&self) -> usize {
        self.count(Status::Fail)
    }

    fn count(&self, s: Status) -> usize {
        self.checks.iter().filter(|c| c.status == s).count()
    }

    pub fn ok(&self) -> bool {
        self.failed() == 0
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Info => "INFO",
            };
            writeln!(f, "{tag} {}: {}", c.name, c.detail)?;
        }
        writeln!(f, "passed: {}, failed: {}", self.passed(), self.failed())
    }
}

pub fn verify(scope: Scope, seed: u64) -> Report {
    let mut checks = Vec::new();
    let all = scope == Scope::All;
    if all || scope == Scope::OpenEdge {
        checks.extend(open_edge_checks(seed));
    }
    if all || scope == Scope::OpenSecond {
        checks.extend(open_second_checks(seed));
    }
    if all || scope == Scope::Closed {
        checks.extend(closed_checks(seed));
    }
    if all || scope == Scope::Invariants {
        checks.extend(invariant_checks(seed));
    }
    Report { checks }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn sorted_eigs(config: &ModelConfig) -> Result<Vec<f64>, String> {
    let h = build_hamiltonian(config).map_err(|e| e.to_string())?;
    eigen_symmetric(&h.matrix, DEFAULT_CONV_TOL).map_err(|e| e.to_string())
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn negated(eigs: &[f64]) -> Vec<f64> {
    eigs.iter().rev().map(|x| -x).collect()
}

fn within(worst: f64, tol: f64, what: &str) -> Result<String, String> {
    if worst <= tol {
        Ok(format!("{what}: max deviation {worst:.3e} <= {tol:e}"))
    } else {
        Err(format!("{what}: max deviation {worst:.3e} > {tol:e}"))
    }
}

fn pattern_check(config: ModelConfig, check: impl Fn(&[usize]) -> bool) -> Result<String, String> {
    let s = spectrum_of(
        &config,
        &Tolerances {
            conv: DEFAULT_CONV_TOL,
            cluster: Some(1e-9),
        },
    )
    .map_err(|e| e.to_string())?;
    let m = s.multiplicities();
    let detail = format!(
        "{} at (G, J) = ({}, {}): {} levels, multiplicities {m:?}",
        config.chain,
        config.g,
        config.j,
        m.len()
    );
    if check(&m) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// 13 levels, an eightfold zero level and all others twofold.
fn thirteen_level_pattern(m: &[usize]) -> bool {
    m.len() == 13 && m[6] == 8 && m.iter().enumerate().all(|(i, &x)| i == 6 || x == 2)
}

fn random_point(r: &mut ChaCha8Rng) -> (f64, f64) {
    (r.gen_range(-2.0..=2.0), r.gen_range(-2.0..=2.0))
}

fn open_edge_checks(seed: u64) -> Vec<Check> {
    let mut out = Vec::new();

    let mut r = rng(seed, 1);
    let res = (|| {
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let (g, j) = random_point(&mut r);
            for k in [1, 4] {
                let eigs = sorted_eigs(&Chain::open(4, k).with_couplings(g, j))?;
                worst = worst.max(max_diff(&eigs, &expand_levels(&levels_open_edge(g, j))));
            }
        }
        within(worst, 1e-8, "200 random points, k = 1 and 4")
    })();
    out.push(Check::from_result("open-edge branches vs eigensolver", res));

    out.push(Check::from_result(
        "open-edge degeneracy pattern",
        pattern_check(Chain::open(4, 1).with_couplings(1.0, 0.3), |m| {
            m == [2, 4, 2, 4, 8, 4, 2, 4, 2]
        }),
    ));
    out
}

fn certify_at_points(chains: &[Chain], closed: bool) -> Result<String, String> {
    let points = certification_points();
    for chain in chains {
        for (g, j) in &points {
            let claimed = if closed {
                charpoly_closed(g.clone(), j.clone())
            } else {
                charpoly_open_second(g.clone(), j.clone())
            };
            let cert = certify_factorization(chain, g, j, &claimed).map_err(|e| e.to_string())?;
            if !cert.equal {
                let m = cert
                    .first_mismatch
                    .expect("unequal certificate has a mismatch");
                return Err(format!(
                    "{chain} at (G, J) = ({g}, {j}): coefficient of E^{} is {} but the factorization gives {}",
                    m.power, m.lhs, m.rhs
                ));
            }
        }
    }
    Ok(format!(
        "{} points x {} chain(s), all coefficients equal",
        points.len(),
        chains.len()
    ))
}

fn factored_vs_numeric(
    seed: u64,
    stream: u64,
    chain: Chain,
    roots: impl Fn(f64, f64) -> Result<Vec<f64>, String>,
) -> Result<String, String> {
    let mut r = rng(seed, stream);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let (g, j) = random_point(&mut r);
        let want = roots(g, j)?;
        let eigs = sorted_eigs(&chain.with_couplings(g, j))?;
        worst = worst.max(max_diff(&eigs, &want));
    }
    within(worst, 1e-8, "200 random points")
}

fn open_second_checks(seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    out.push(Check::from_result(
        "open-second exact factorization",
        certify_at_points(&[Chain::open(4, 2), Chain::open(4, 3)], false),
    ));
    out.push(Check::from_result(
        "open-second factored roots vs eigensolver",
        factored_vs_numeric(seed, 2, Chain::open(4, 2), |g, j| {
            roots_of_factored(&charpoly_open_second(g, j)).map_err(|e| e.to_string())
        }),
    ));
    out.push(Check::from_result(
        "open-second degeneracy pattern",
        pattern_check(
            Chain::open(4, 2).with_couplings(1.0, 0.3),
            thirteen_level_pattern,
        ),
    ));
    out
}

fn closed_checks(seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    let ring: Vec<Chain> = (1..=4).map(|k| Chain::closed(4, k)).collect();
    out.push(Check::from_result(
        "closed exact factorization",
        certify_at_points(&ring, true),
    ));
    out.push(Check::from_result(
        "closed factored roots vs eigensolver",
        factored_vs_numeric(seed, 3, Chain::closed(4, 1), |g, j| {
            roots_of_factored(&charpoly_closed(g, j)).map_err(|e| e.to_string())
        }),
    ));

    let mut r = rng(seed, 4);
    let res = (|| {
        let g = 0.7;
        for _ in 0..50 {
            let j: f64 = r.gen_range(-2.0..=2.0);
            let s = spectrum_of(
                &Chain::closed(4, 1).with_couplings(g, j),
                &Tolerances::default(),
            )
            .map_err(|e| e.to_string())?;
            for e in [g, -g] {
                match s.level_near(e, 1e-9) {
                    Some(l) if l.multiplicity == 2 => {}
                    Some(l) => {
                        return Err(format!(
                            "J = {j}: level {e} has multiplicity {}",
                            l.multiplicity
                        ))
                    }
                    None => return Err(format!("J = {j}: no level at {e}")),
                }
            }
        }
        Ok("G = 0.7, 50 random J: levels +G and -G present, twofold".to_string())
    })();
    out.push(Check::from_result("closed +-G line", res));

    let mut r = rng(seed, 5);
    let res = (|| {
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let (g, j) = random_point(&mut r);
            let eigs = sorted_eigs(&Chain::closed(4, 1).with_couplings(g, j))?;
            let (a, b) = analytic_branch_closed_quadratic(g, j);
            for e in [a, b, -a, -b] {
                let d = eigs
                    .iter()
                    .map(|x| (x - e).abs())
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
            }
        }
        within(
            worst,
            1e-8,
            "50 random points, quadratic branches in spectrum",
        )
    })();
    out.push(Check::from_result("closed quadratic branches", res));

    out.push(Check::from_result(
        "closed degeneracy pattern",
        pattern_check(
            Chain::closed(4, 1).with_couplings(1.0, 0.3),
            thirteen_level_pattern,
        ),
    ));
    out
}

fn all_chains(max_n: usize) -> Vec<Chain> {
    let mut v = Vec::new();
    for n in 1..=max_n {
        for k in 1..=n {
            v.push(Chain::open(n, k));
            if n >= 3 {
                v.push(Chain::closed(n, k));
            }
        }
    }
    v
}

fn structural_checks(couplings: &[(f64, f64)]) -> Result<String, String> {
    let chains = all_chains(4);
    for chain in &chains {
        let nex = excitation_number_operator(chain.n_spins).map_err(|e| e.to_string())?;
        let sz = total_sz_operator(chain.n_spins).map_err(|e| e.to_string())?;
        for &(g, j) in couplings {
            let h = build_hamiltonian(&chain.with_couplings(g, j))
                .map_err(|e| e.to_string())?
                .matrix;
            let at = format!("{chain} at (G, J) = ({g}, {j})");
            if !h.is_symmetric() {
                return Err(format!("{at}: H is not symmetric"));
            }
            if h.trace() != 0.0 {
                return Err(format!("{at}: trace {}", h.trace()));
            }
            if !commutator(&h, &nex).map_err(|e| e.to_string())?.is_zero() {
                return Err(format!("{at}: [H, N_ex] != 0"));
            }
            let sz_commutes = commutator(&h, &sz).map_err(|e| e.to_string())?.is_zero();
            if sz_commutes != (g == 0.0) {
                return Err(format!("{at}: [H, S_z] = 0 is {sz_commutes}"));
            }
        }
    }
    Ok(format!(
        "{} chains x {} couplings: symmetric, traceless, [H, N_ex] = 0, [H, S_z] = 0 iff G = 0",
        chains.len(),
        couplings.len()
    ))
}

fn invariant_checks(seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    out.push(Check::from_result(
        "structure of H",
        structural_checks(&[(1.0, 0.3), (0.0, 1.0), (-0.7, -1.3), (1.0, 0.0)]),
    ));

    let mut r = rng(seed, 6);
    let res = (|| {
        let mut chains: Vec<Chain> = (1..=5)
            .flat_map(|n| (1..=n).map(move |k| Chain::open(n, k)))
            .collect();
        chains.extend((1..=4).map(|k| Chain::closed(4, k)));
        let mut worst = 0.0f64;
        for chain in &chains {
            for _ in 0..5 {
                let (g, j) = random_point(&mut r);
                let eigs = sorted_eigs(&chain.with_couplings(g, j))?;
                worst = worst.max(max_diff(&eigs, &negated(&eigs)));
            }
        }
        within(worst, 1e-10, "open N = 1..5 and closed N = 4, E -> -E")
    })();
    out.push(Check::from_result("spectral +- symmetry", res));

    let mut r = rng(seed, 7);
    let res = (|| {
        let mut chains: Vec<Chain> = [2, 4]
            .into_iter()
            .flat_map(|n| (1..=n).map(move |k| Chain::open(n, k)))
            .collect();
        chains.extend((1..=4).map(|k| Chain::closed(4, k)));
        for chain in &chains {
            for _ in 0..5 {
                let (g, j) = (r.gen_range(0.2..2.0), r.gen_range(0.2..2.0));
                let s = spectrum_of(&chain.with_couplings(g, j), &Tolerances::default())
                    .map_err(|e| e.to_string())?;
                let m = s.multiplicities();
                if m.iter().any(|x| x % 2 != 0) {
                    return Err(format!(
                        "{chain} at (G, J) = ({g}, {j}): multiplicities {m:?}"
                    ));
                }
            }
        }
        Ok(format!(
            "{} chains x 5 generic couplings: all multiplicities even",
            chains.len()
        ))
    })();
    out.push(Check::from_result("even degeneracy", res));

    let mut r = rng(seed, 8);
    let res = (|| {
        let mut worst = 0.0f64;
        for chain in all_chains(4) {
            let (g, j) = random_point(&mut r);
            let a = sorted_eigs(&chain.with_couplings(g, j))?;
            worst = worst.max(max_diff(&a, &sorted_eigs(&chain.with_couplings(-g, j))?));
            // mirror image for open chains, rotation for rings
            let k = match chain.topology {
                Topology::Open => chain.n_spins + 1 - chain.coupled_site,
                Topology::Closed => 1,
            };
            let other = Chain::new(chain.n_spins, chain.topology, k);
            worst = worst.max(max_diff(&a, &sorted_eigs(&other.with_couplings(g, j))?));
        }
        within(worst, 1e-10, "G -> -G and site relabelling")
    })();
    out.push(Check::from_result("coupling and site symmetries", res));

    let res = (|| {
        let mut worst = 0.0f64;
        let want: Vec<f64> = [(-1.0, 8), (0.0, 16), (1.0, 8)]
            .into_iter()
            .flat_map(|(e, m)| std::iter::repeat_n(e, m))
            .collect();
        for chain in [Chain::open(4, 1), Chain::open(4, 2), Chain::closed(4, 1)] {
            worst = worst.max(max_diff(
                &sorted_eigs(&chain.with_couplings(1.0, 0.0))?,
                &want,
            ));
        }
        within(
            worst,
            1e-10,
            "three four-spin configurations at G = 1, J = 0",
        )
    })();
    out.push(Check::from_result("uncoupled limit", res));

    let mut r = rng(seed, 9);
    out.push(Check::from_result(
        "exact roots vs eigensolver",
        cross_oracle(&mut r, 20),
    ));

    out.push(three_ring_symmetry());
    out.push(three_ring_linear_level());
    out
}

fn random_rational(r: &mut ChaCha8Rng) -> Rational {
    let num: i64 = r.gen_range(-8..=8);
    let den: i64 = r.gen_range(1..=4);
    Rational::new(num.into(), den.into())
}

fn to_f64(x: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)
}

/// Numeric roots of the exact characteristic polynomial against the
/// floating-point eigensolver on random configurations.
pub fn cross_oracle(r: &mut ChaCha8Rng, count: usize) -> Result<String, String> {
    let mut worst = 0.0f64;
    for _ in 0..count {
        let n = r.gen_range(1..=4usize);
        let topology = if n >= 3 && r.gen_bool(0.5) {
            Topology::Closed
        } else {
            Topology::Open
        };
        let chain = Chain::new(n, topology, r.gen_range(1..=n));
        let (g, j) = (random_rational(r), random_rational(r));
        let h = rational_hamiltonian(&chain, &g, &j).map_err(|e| e.to_string())?;
        let roots = real_roots(&charpoly_exact(&h)).map_err(|e| format!("{chain}: {e}"))?;
        let eigs = sorted_eigs(&chain.with_couplings(to_f64(&g), to_f64(&j)))?;
        let d = max_diff(&roots, &eigs);
        if d > 1e-8 {
            return Err(format!("{chain} at (G, J) = ({g}, {j}): deviation {d:.3e}"));
        }
        worst = worst.max(d);
    }
    within(worst, 1e-8, &format!("{count} random configurations"))
}

fn three_ring_symmetry() -> Check {
    let detail = match sorted_eigs(&Chain::closed(3, 1).with_couplings(1.0, 0.3)) {
        Ok(eigs) => {
            let d = max_diff(&eigs, &negated(&eigs));
            format!(
                "three-spin ring at (1, 0.3): E -> -E deviation {d:.3e} ({})",
                if d <= 1e-10 {
                    "symmetric"
                } else {
                    "not symmetric"
                }
            )
        }
        Err(e) => e,
    };
    Check::info("three-spin ring +- symmetry", detail)
}

/// Levels of the three-spin ring at J = 1 whose second G-derivative at G = 1
/// vanishes while the first does not.
pub fn three_ring_linear_levels() -> Result<Vec<(f64, f64)>, String> {
    let h = 1e-3;
    let chain = Chain::closed(3, 1);
    let at = |g: f64| sorted_eigs(&chain.with_couplings(g, 1.0));
    let (lo, mid, hi) = (at(1.0 - h)?, at(1.0)?, at(1.0 + h)?);
    let mut out: Vec<(f64, f64)> = Vec::new();
    for i in 0..mid.len() {
        let slope = (hi[i] - lo[i]) / (2.0 * h);
        let curvature = (hi[i] - 2.0 * mid[i] + lo[i]) / (h * h);
        if slope.abs() > 0.1
            && curvature.abs() < 1e-4
            && !out.iter().any(|(e, _)| (e - mid[i]).abs() < 1e-9)
        {
            out.push((mid[i], slope));
        }
    }
    Ok(out)
}

fn three_ring_linear_level() -> Check {
    let detail = match three_ring_linear_levels() {
        Ok(v) if v.is_empty() => "no level linear in G found at (1, 1)".to_string(),
        Ok(v) => {
            let list: Vec<String> = v
                .iter()
                .map(|(e, s)| format!("E = {e:.6} (dE/dG = {s:.6})"))
                .collect();
            format!("levels linear in G at (1, 1): {}", list.join(", "))
        }
        Err(e) => e,
    };
    Check::info("three-spin ring linear level", detail)
}
