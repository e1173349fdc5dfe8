//! Acceptance suite. Prints one PASS/FAIL line per criterion; run with
//! `cargo test -p dirac-moyal --test acceptance -- --nocapture`.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::BigRational;

use common::{data, dirac_explicit, moyal_sin_oracle};
use dirac_moyal::bracket::{jacobi_defect, BracketKind};
use dirac_moyal::sample::{self, SampleRng, SymbolShape};
use dirac_moyal::{
    class_equal, darboux_basis, dirac, moyal, parse_symbol, random_symplectic, reduced_star_consistency, star,
    DiracStructure, HamiltonianSystem, PhaseSpace, QMatrix, Scalar, Symbol,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

/// S1, S2 and 20 seeded random systems with n ∈ {2, 3}, m = 1.
fn generated_systems() -> Vec<DiracStructure> {
    let mut out: Vec<DiracStructure> = sample::reference_systems().into();
    let mut rng = sample::rng(2024);
    for k in 0..20 {
        out.push(sample::system(&mut rng, 2 + k % 2, 1));
    }
    out
}

fn z(dim: usize, i: usize) -> Symbol {
    Symbol::coordinate(dim, i)
}

fn jd_entry(ds: &DiracStructure, i: usize, j: usize) -> Symbol {
    Symbol::constant(ds.space().dim(), Scalar::real(ds.jd()[(i, j)].clone()))
}

fn triple(rng: &mut SampleRng, space: PhaseSpace, shape: SymbolShape) -> [Symbol; 3] {
    [sample::symbol(rng, space, shape), sample::symbol(rng, space, shape), sample::symbol(rng, space, shape)]
}

const HBAR_FREE_CUBIC: SymbolShape = SymbolShape { max_degree: 3, max_terms: 4, max_hbar: 0, complex: true };

fn coordinate_star_identity() -> Outcome {
    let start = Instant::now();
    let systems = generated_systems();
    let mut checked = 0;
    for ds in &systems {
        let dim = ds.space().dim();
        let weight = &Scalar::ratio(1, 2) * &Scalar::i();
        for i in 0..dim {
            for j in 0..dim {
                let residual = star(&z(dim, i), &z(dim, j), ds).unwrap()
                    - &z(dim, i) * &z(dim, j)
                    - jd_entry(ds, i, j).scale(&weight).mul_hbar_power(1);
                check(residual.is_zero(), || format!("nonzero residual at ({i},{j}): {residual}"))?;
                checked += 1;
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("{} systems, {checked} pairs, {:?}", systems.len(), start.elapsed()))
}

fn coordinate_moyal_identity() -> Outcome {
    let start = Instant::now();
    let systems = generated_systems();
    for ds in &systems {
        let dim = ds.space().dim();
        for i in 0..dim {
            for j in 0..dim {
                let m = moyal(&z(dim, i), &z(dim, j), ds).unwrap();
                check(m == jd_entry(ds, i, j), || format!("moyal(z{i}, z{j}) = {m}"))?;
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("{} systems, {:?}", systems.len(), start.elapsed()))
}

fn null_eigenvectors() -> Outcome {
    let mut systems = generated_systems();
    let [_, s2] = sample::reference_systems();
    for seed in 0..20 {
        systems.push(s2.apply_symplectic_transform(&random_symplectic(s2.space(), seed)).unwrap());
    }
    for ds in &systems {
        let product = ds.jd() * &ds.alpha().transpose();
        check(product.is_zero(), || format!("JD alpha^T = {product}"))?;
    }
    Ok(format!("{} systems", systems.len()))
}

fn star_associativity() -> Outcome {
    let start = Instant::now();
    let mut rng = sample::rng(4);
    let mut count = 0;
    for ds in sample::reference_systems() {
        for _ in 0..100 {
            let [a, b, c] = triple(&mut rng, ds.space(), HBAR_FREE_CUBIC);
            let left = star(&star(&a, &b, &ds).unwrap(), &c, &ds).unwrap();
            let right = star(&a, &star(&b, &c, &ds).unwrap(), &ds).unwrap();
            check(left == right, || format!("({a}) ({b}) ({c})"))?;
            count += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("{count} triples, {:?}", start.elapsed()))
}

fn jacobi_identities() -> Outcome {
    let systems = generated_systems();
    let mut rng = sample::rng(5);
    for k in 0..100 {
        let ds = &systems[k % systems.len()];
        let [a, b, c] = triple(&mut rng, ds.space(), HBAR_FREE_CUBIC);
        for kind in [BracketKind::Moyal, BracketKind::Dirac] {
            let d = jacobi_defect(kind, &a, &b, &c, ds).unwrap();
            check(d.is_zero(), || format!("{kind:?} defect {d}"))?;
        }
    }
    Ok("100 triples, moyal and dirac".into())
}

fn class_independence() -> Outcome {
    let systems = generated_systems();
    let mut rng = sample::rng(6);
    for k in 0..50 {
        let ds = &systems[k % systems.len()];
        let [a, b, f] = triple(&mut rng, ds.space(), HBAR_FREE_CUBIC);
        let phis = ds.constraint_symbols();
        let phi = &phis[k % phis.len()];
        let shifted = &a + &(&f * phi);
        let left_ok = class_equal(&star(&shifted, &b, ds).unwrap(), &star(&a, &b, ds).unwrap(), ds).unwrap();
        let right_ok = class_equal(&star(&b, &shifted, ds).unwrap(), &star(&b, &a, ds).unwrap(), ds).unwrap();
        check(left_ok && right_ok, || format!("case {k}: A = {a}, f = {f}"))?;
    }
    Ok("50 cases, left and right".into())
}

fn star_ideal() -> Outcome {
    let mut rng = sample::rng(7);
    let mut count = 0;
    for ds in sample::reference_systems() {
        let zero = Symbol::zero(ds.space().dim());
        for _ in 0..50 {
            let a = sample::symbol(&mut rng, ds.space(), HBAR_FREE_CUBIC);
            for phi in ds.constraint_symbols() {
                let ok = class_equal(&star(&phi, &a, &ds).unwrap(), &zero, &ds).unwrap()
                    && class_equal(&star(&a, &phi, &ds).unwrap(), &zero, &ds).unwrap();
                check(ok, || format!("A = {a}, phi = {phi}"))?;
            }
            count += 1;
        }
    }
    Ok(format!("{count} symbols on S1 and S2"))
}

fn semiclassical_limit() -> Outcome {
    let systems = generated_systems();
    let mut rng = sample::rng(8);
    for k in 0..100 {
        let ds = &systems[k % systems.len()];
        let a = sample::symbol(&mut rng, ds.space(), HBAR_FREE_CUBIC);
        let b = sample::symbol(&mut rng, ds.space(), HBAR_FREE_CUBIC);
        let d = moyal(&a, &b, ds).unwrap() - dirac(&a, &b, ds).unwrap();
        check(d.hbar_coefficient(0).is_zero() && d.hbar_coefficient(1).is_zero(), || format!("low grades of {d}"))?;
    }
    let space = PhaseSpace::new(1);
    let q3 = parse_symbol("q1^3", space).unwrap();
    let p3 = parse_symbol("p1^3", space).unwrap();
    let expected = parse_symbol("9*q1^2*p1^2 - 3/2*hbar^2", space).unwrap();
    let got = dirac_moyal::star::moyal_standard(&q3, &p3).unwrap();
    let oracle = moyal_sin_oracle(&q3, &p3, &QMatrix::symplectic(1));
    check(got == expected && oracle == expected, || format!("moyal(q1^3, p1^3) = {got}, oracle {oracle}"))?;
    Ok(format!("100 pairs; moyal(q1^3, p1^3) = {got}"))
}

fn rank_invariance() -> Outcome {
    let [_, s2] = sample::reference_systems();
    for seed in 0..20 {
        let s = random_symplectic(s2.space(), 1000 + seed);
        let moved = s2.apply_symplectic_transform(&s).unwrap();
        let rank = moved.jd().rank();
        check(rank == 2, || format!("seed {seed}: rank {rank}"))?;
    }
    Ok("20 transforms, rank 2".into())
}

fn reduced_consistency() -> Outcome {
    let mut rng = sample::rng(10);
    for ds in sample::reference_systems() {
        let chart = darboux_basis(&ds);
        let dim = ds.space().dim();
        let rdim = chart.reduced_space().dim();
        let mut expected = QMatrix::zeros(dim, dim);
        for k in (0..rdim).step_by(2) {
            expected[(k, k + 1)] = BigRational::from_integer(1.into());
            expected[(k + 1, k)] = BigRational::from_integer((-1).into());
        }
        let gram = chart.gram(&ds);
        check(gram == expected, || format!("gram = {gram}"))?;
        for _ in 0..50 {
            let a = sample::symbol(&mut rng, ds.space(), HBAR_FREE_CUBIC);
            let b = sample::symbol(&mut rng, ds.space(), HBAR_FREE_CUBIC);
            let d = reduced_star_consistency(&a, &b, &chart, &ds).unwrap();
            check(d.is_zero(), || format!("A = {a}, B = {b}: {d}"))?;
        }
    }
    Ok("50 pairs on S1 and S2, gram = block-diag(J, 0)".into())
}

fn bracket_and_flow_forms_agree() -> Outcome {
    let systems = generated_systems();
    let mut rng = sample::rng(11);
    for k in 0..50 {
        let ds = &systems[k % systems.len()];
        let a = sample::symbol(&mut rng, ds.space(), HBAR_FREE_CUBIC);
        let b = sample::symbol(&mut rng, ds.space(), HBAR_FREE_CUBIC);
        check(dirac(&a, &b, ds).unwrap() == dirac_explicit(&a, &b, ds), || format!("A = {a}, B = {b}"))?;
    }
    for k in 0..10 {
        let ds = &systems[k % systems.len()];
        let degree = 2 + (k % 2) as u32;
        let h = sample::symbol(&mut rng, ds.space(), SymbolShape::classical(degree));
        let system = HamiltonianSystem::new(ds.clone(), h.clone()).unwrap();
        check(system.dirac_vector_field() == system.total_hamiltonian_field(), || format!("H = {h}"))?;
    }
    Ok("50 bracket pairs, 10 hamiltonians".into())
}

fn oscillator() -> HamiltonianSystem {
    let [s1, _] = sample::reference_systems();
    let h = parse_symbol("(p1^2 + p2^2 + q1^2 + q2^2)/2", s1.space()).unwrap();
    HamiltonianSystem::new(s1, h).unwrap()
}

fn classical_dynamics() -> Outcome {
    let start = Instant::now();
    let traj = oscillator().integrate_classical(&[1.0, 0.0, 0.0, 0.0], std::f64::consts::TAU, 1e-3).unwrap();
    let end = traj.last_point().unwrap();
    let err = (end[0] - 1.0).abs().max(end[1].abs());
    let residual = traj.max_constraint_residual();
    let drift = traj.relative_energy_drift();
    within(start.elapsed(), Duration::from_secs(5))?;
    check(err <= 1e-8 && residual <= 1e-12 && drift <= 1e-8, || {
        format!("endpoint error {err:e}, residual {residual:e}, drift {drift:e}")
    })?;
    Ok(format!("endpoint error {err:.2e}, residual {residual:.2e}, drift {drift:.2e}"))
}

fn quantum_classical_agreement() -> Outcome {
    let system = oscillator();
    let dim = 4;
    let starts: [[f64; 4]; 3] = [[1.0, 0.0, 0.0, 0.0], [0.3, -0.7, 0.0, 0.0], [-1.2, 0.5, 0.0, 0.0]];
    let flows: Vec<Vec<f64>> = starts
        .iter()
        .map(|z0| system.integrate_classical(z0, 1.0, 1e-3).unwrap().last_point().unwrap().to_vec())
        .collect();
    let (s, c) = 1f64.sin_cos();
    let mut worst = 0f64;
    for i in 0..dim {
        let evolved = system.evolve_symbol_moyal(&z(dim, i), 1.0, 1e-3).unwrap();
        for (z0, zt) in starts.iter().zip(&flows) {
            let closed = match i {
                0 => c * z0[0] + s * z0[1],
                1 => -s * z0[0] + c * z0[1],
                _ => z0[i],
            };
            let quantum = evolved.eval(z0, 1.0);
            worst = worst.max((quantum.re - zt[i]).abs()).max((quantum.re - closed).abs()).max(quantum.im.abs());
        }
    }
    check(worst <= 1e-10, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.2e}"))
}

fn cli_determinism() -> Outcome {
    let mut rng = sample::rng(14);
    let space = PhaseSpace::new(2);
    let shape = SymbolShape { max_degree: 4, max_terms: 6, max_hbar: 2, complex: true };
    for _ in 0..100 {
        let a = sample::symbol(&mut rng, space, shape);
        let text = a.to_string();
        let back = parse_symbol(&text, space).map_err(|e| format!("{text}: {e}"))?;
        check(back == a && back.to_string() == text, || format!("round trip of {text}"))?;
    }
    let bin = env!("CARGO_BIN_EXE_dirac-moyal");
    let s2 = data("s2.json");
    let s2 = s2.to_str().unwrap();
    let invocations: [&[&str]; 3] = [
        &["star", s2, "q1^2*p2 + i*q2", "p1^3 - hbar*q1"],
        &["structure", s2, "--transform", "3"],
        &["--format", "csv", "evolve", s2, "--t", "1", "--dt", "0.01", "--initial", "q1=1,q2=1,p1=0.5"],
    ];
    for args in invocations {
        let first = Command::new(bin).args(args).output().unwrap();
        let second = Command::new(bin).args(args).output().unwrap();
        check(first.status.success(), || format!("{args:?} failed"))?;
        check(first.stdout == second.stdout && first.stderr == second.stderr, || format!("{args:?} differs"))?;
    }
    let bad = Command::new(bin).args(["check", data("sbad.json").to_str().unwrap()]).output().unwrap();
    check(bad.status.code() == Some(2), || format!("Sbad exited with {:?}", bad.status.code()))?;
    Ok("100 round trips, 3 commands repeated, Sbad exit 2".into())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 14] = [
        ("coordinate star identity", coordinate_star_identity),
        ("coordinate moyal identity", coordinate_moyal_identity),
        ("null eigenvectors of JD", null_eigenvectors),
        ("star associativity", star_associativity),
        ("moyal and dirac jacobi", jacobi_identities),
        ("class independence", class_independence),
        ("star ideal", star_ideal),
        ("semiclassical limit", semiclassical_limit),
        ("rank invariance", rank_invariance),
        ("reduced-space consistency", reduced_consistency),
        ("bracket and flow forms agree", bracket_and_flow_forms_agree),
        ("classical dynamics", classical_dynamics),
        ("quantum-classical agreement", quantum_classical_agreement),
        ("cli determinism and round trip", cli_determinism),
    ];
    let mut failed = Vec::new();
    for (n, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2}: PASS  {name} ({detail})", n + 1),
            Err(why) => {
                println!("criterion {:>2}: FAIL  {name} ({why})", n + 1);
                failed.push(n + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
