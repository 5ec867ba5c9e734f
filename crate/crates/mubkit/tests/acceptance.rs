//! End-to-end acceptance gate. Each test covers one numbered criterion and
//! prints a single PASS/FAIL line (visible with `--nocapture`) before
//! asserting.

use std::collections::BTreeSet;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mubkit::bases::{self, Basis};
use mubkit::bell;
use mubkit::galois::{prime_power, FiniteStructure};
use mubkit::linalg::{self, ComplexMatrix};
use mubkit::tomography::{self, DensityMatrix, TomographyScheme};
use mubkit::weyl;
use mubkit::{DEFAULT_SEED, DEFAULT_TOL};

fn report(criterion: usize, description: &str, pass: bool) {
    println!(
        "acceptance {:>2} [{}]: {}",
        criterion,
        description,
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(
        pass,
        "acceptance criterion {criterion} failed: {description}"
    );
}

fn ring(n: usize) -> Arc<FiniteStructure> {
    Arc::new(FiniteStructure::ring_mod_n(n).unwrap())
}

fn field(p: usize, m: usize) -> Arc<FiniteStructure> {
    Arc::new(FiniteStructure::galois_field(p, m).unwrap())
}

#[test]
fn criterion_01_frozen_size_four_tables() {
    let gf4_add = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];
    let gf4_mul = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];
    let mod4_add = [[0, 1, 2, 3], [1, 2, 3, 0], [2, 3, 0, 1], [3, 0, 1, 2]];
    let mod4_mul = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 0, 2], [0, 3, 2, 1]];
    let gf4 = field(2, 2);
    let mod4 = ring(4);
    let mut pass = true;
    for a in 0..4 {
        for b in 0..4 {
            pass &= gf4.add(a, b) == gf4_add[a][b];
            pass &= gf4.mul(a, b) == gf4_mul[a][b];
            pass &= mod4.add(a, b) == mod4_add[a][b];
            pass &= mod4.mul(a, b) == mod4_mul[a][b];
        }
    }
    report(1, "size-4 arithmetic tables match the published ones", pass);
}

#[test]
fn criterion_02_character_identities_up_to_64() {
    let mut worst = 0.0_f64;
    let mut structures: Vec<Arc<FiniteStructure>> = (2..=64).map(ring).collect();
    for n in 2..=64 {
        if let Some((p, m)) = prime_power(n) {
            structures.push(field(p, m));
        }
    }
    for s in &structures {
        let n = s.size();
        let chi = s.character();
        for a in 0..n {
            for b in 0..n {
                worst = worst.max((chi.value(s.add(a, b)) - chi.value(a) * chi.value(b)).norm());
            }
        }
        for q in 0..n {
            let sum: Complex64 = (0..n).map(|x| chi.value(s.mul(x, q))).sum();
            let target = if q == 0 { n as f64 } else { 0.0 };
            worst = worst.max((sum - Complex64::new(target, 0.0)).norm());
        }
    }
    report(
        2,
        "additive characters are homomorphisms with delta sums, N <= 64",
        worst < 1e-12,
    );
}

#[test]
fn criterion_03_complete_mub_families() {
    let structures = [
        ring(2),
        ring(3),
        field(2, 2),
        ring(5),
        ring(7),
        field(2, 3),
        field(3, 2),
    ];
    let mut pass = true;
    for s in structures {
        let family = bases::mub_family(&s);
        let rep = bases::unbiasedness(&family, 1e-10).unwrap();
        pass &= rep.is_complete_mub && rep.overall_max < 1e-10;
    }
    report(
        3,
        "N+1 mutually unbiased bases over fields up to GF(9)",
        pass,
    );
}

#[test]
fn criterion_04_non_field_rings_fail_only_between_family_members() {
    let mut pass = true;
    for s in [ring(6), ring(10)] {
        let family = bases::mub_family(&s);
        let rep = bases::unbiasedness(&family, 1e-10).unwrap();
        // Every basis stays unbiased against the computational one.
        pass &= rep
            .pairs
            .iter()
            .filter(|p| p.first == 0)
            .all(|p| p.deviation < 1e-10);
        // But the family is not pairwise unbiased.
        pass &= rep.pairs.iter().any(|p| p.first >= 1 && p.deviation > 0.01);
        pass &= !rep.is_complete_mub;
    }
    report(
        4,
        "mod-6 and mod-10 families are computationally unbiased yet incomplete",
        pass,
    );
}

fn pauli(ch: char) -> ComplexMatrix {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let rows = match ch {
        'I' => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
        'X' => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        'Y' => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
        'Z' => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
        _ => unreachable!(),
    };
    ComplexMatrix::from_rows(vec![rows[0].to_vec(), rows[1].to_vec()]).unwrap()
}

fn proportional_to_unit_phase(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    let mut lambda = None;
    'outer: for r in 0..a.rows() {
        for q in 0..a.cols() {
            if b[(r, q)].norm() > 0.5 {
                lambda = Some(a[(r, q)] / b[(r, q)]);
                break 'outer;
            }
        }
    }
    match lambda {
        Some(l) if (l.norm() - 1.0).abs() <= tol => a.max_abs_diff(&b.scale(l)).unwrap() <= tol,
        _ => false,
    }
}

#[test]
fn criterion_05_commuting_subgroup_census() {
    let mut pass = true;
    for n in [2usize, 3, 5, 7, 11] {
        pass &= weyl::enumerate_subgroups(&ring(n)).len() == n + 1;
    }

    let mod4 = weyl::enumerate_subgroups(&ring(4));
    let got: BTreeSet<Vec<(usize, usize)>> = mod4.iter().map(|s| s.labels().to_vec()).collect();
    let want: BTreeSet<Vec<(usize, usize)>> = [
        vec![(0, 0), (1, 0), (2, 0), (3, 0)],
        vec![(0, 0), (0, 1), (0, 2), (0, 3)],
        vec![(0, 0), (1, 1), (2, 2), (3, 3)],
        vec![(0, 0), (1, 2), (2, 0), (3, 2)],
        vec![(0, 0), (1, 3), (2, 2), (3, 1)],
        vec![(0, 0), (0, 2), (2, 1), (2, 3)],
    ]
    .into_iter()
    .collect();
    pass &= mod4.len() == 6 && got == want;

    let gf4 = field(2, 2);
    let subs = weyl::enumerate_subgroups(&gf4);
    pass &= subs.len() == 5;
    let table: [((usize, usize), (char, char)); 15] = [
        ((1, 0), ('I', 'Z')),
        ((2, 0), ('Z', 'I')),
        ((3, 0), ('Z', 'Z')),
        ((0, 1), ('I', 'X')),
        ((0, 2), ('X', 'I')),
        ((0, 3), ('X', 'X')),
        ((1, 1), ('I', 'Y')),
        ((2, 2), ('Y', 'I')),
        ((3, 3), ('Y', 'Y')),
        ((2, 1), ('Z', 'X')),
        ((3, 2), ('Y', 'Z')),
        ((1, 3), ('X', 'Y')),
        ((3, 1), ('Z', 'Y')),
        ((1, 2), ('X', 'Z')),
        ((2, 3), ('Y', 'X')),
    ];
    for sub in &subs {
        for &(j, i) in sub.labels() {
            if (j, i) == (0, 0) {
                continue;
            }
            let (high, low) = table
                .iter()
                .find(|(l, _)| *l == (j, i))
                .map(|&(_, p)| p)
                .expect("every non-identity label appears");
            let want = pauli(high).tensor(&pauli(low));
            let got = weyl::v_op(&gf4, j, i).unwrap().matrix();
            pass &= proportional_to_unit_phase(&got, &want, 1e-10);
        }
    }
    report(
        5,
        "subgroup counts, the six mod-4 lines and the five GF(4) Pauli pairs",
        pass,
    );
}

#[test]
fn criterion_06_operator_group_law() {
    let mut structures: Vec<Arc<FiniteStructure>> = (2..=8).map(ring).collect();
    for n in [2usize, 3, 4, 5, 7, 8] {
        let (p, m) = prime_power(n).unwrap();
        structures.push(field(p, m));
    }
    let mut worst = 0.0_f64;
    let mut labels_ok = true;
    for s in &structures {
        let n = s.size();
        let chi = s.character();
        for ja in 0..n {
            for ia in 0..n {
                let a = weyl::v_op(s, ja, ia).unwrap();
                for jb in 0..n {
                    for ib in 0..n {
                        let b = weyl::v_op(s, jb, ib).unwrap();
                        let prod = a.compose(&b).unwrap();
                        worst = worst.max(
                            a.matrix()
                                .matmul(&b.matrix())
                                .unwrap()
                                .max_abs_diff(&prod.matrix())
                                .unwrap(),
                        );
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ab = weyl::shift_op(s, i)
                    .unwrap()
                    .compose(&weyl::clock_op(s, j).unwrap())
                    .unwrap();
                let ba = weyl::clock_op(s, j)
                    .unwrap()
                    .compose(&weyl::shift_op(s, i).unwrap())
                    .unwrap();
                let swap = chi.value(s.neg(s.mul(i, j)));
                worst = worst.max((ab.phase() - swap * ba.phase()).norm());
            }
        }
        for k in 0..=n {
            for l1 in 0..n {
                for l2 in 0..n {
                    let prod = weyl::u_op(s, k, l1)
                        .unwrap()
                        .compose(&weyl::u_op(s, k, l2).unwrap())
                        .unwrap();
                    let direct = weyl::u_op(s, k, s.add(l1, l2)).unwrap();
                    labels_ok &= (prod.clock(), prod.shift()) == (direct.clock(), direct.shift());
                    worst = worst.max((prod.phase() - direct.phase()).norm());
                }
            }
        }
    }
    report(
        6,
        "composition, exchange rule and exact diagonal-group closure, N <= 8",
        labels_ok && worst < 1e-12,
    );
}

#[test]
fn criterion_07_pair_state_identities() {
    let started = Instant::now();
    let mut worst = 0.0_f64;
    for s in [ring(2), ring(3)] {
        let n = s.size();
        for m in 0..n {
            for nn in 0..n {
                worst = worst.max(bell::duality_residual(&s, m, nn).unwrap());
                worst = worst.max(bell::error_channel_residual(&s, m, nn).unwrap());
                for i in 0..n {
                    worst = worst.max(bell::permutation_residual(&s, i, m, nn).unwrap());
                }
                for i in 0..n {
                    for j in 0..n {
                        let got = bell::repairing_overlap(&s, m, nn, i, j).unwrap();
                        let want = bell::repairing_prediction(&s, m, nn, i, j);
                        worst = worst.max((got - want).norm());
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    for s in [ring(5), field(2, 2)] {
        let n = s.size();
        for m in 0..n {
            for nn in 0..n {
                worst = worst.max(bell::duality_residual(&s, m, nn).unwrap());
                worst = worst.max(bell::error_channel_residual(&s, m, nn).unwrap());
                for i in 0..n {
                    worst = worst.max(bell::permutation_residual(&s, i, m, nn).unwrap());
                }
            }
        }
        for _ in 0..100 {
            let (m, nn, i, j) = (
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0..n),
            );
            let got = bell::repairing_overlap(&s, m, nn, i, j).unwrap();
            let want = bell::repairing_prediction(&s, m, nn, i, j);
            worst = worst.max((got - want).norm());
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    report(
        7,
        "pair-state duality, shift invariance, collapse and re-pairing",
        worst < 1e-10 && elapsed < 60.0,
    );
}

#[test]
fn criterion_08_tomography_round_trip() {
    let structures = [
        ring(2),
        ring(3),
        field(2, 2),
        ring(5),
        ring(7),
        field(2, 3),
        field(3, 2),
    ];
    let mut pass = true;
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    for s in structures {
        let n = s.size();
        let scheme = TomographyScheme::new(&s, DEFAULT_SEED, DEFAULT_TOL).unwrap();
        let dof = scheme.degrees_of_freedom();
        pass &= dof.independent_coefficients == n * n - 1;
        pass &= dof.measured_values == dof.subgroup_count * (n - 1);
        pass &= dof.excess == dof.measured_values - dof.independent_coefficients;
        if s.is_field() {
            pass &= dof.subgroup_count == n + 1 && dof.excess == 0;
        }
        for _ in 0..50 {
            let rho = DensityMatrix::random(n, &mut rng);
            let rows = scheme.measure(&rho).unwrap();
            let rec = scheme.reconstruct(&rows, 1e-8).unwrap();
            pass &= rec.max_abs_diff(rho.matrix()).unwrap() < 1e-9;
        }
    }
    report(
        8,
        "exact measurement statistics rebuild 50 random states",
        pass,
    );
}

#[test]
fn criterion_09_intertwining_bijection() {
    let mut pass = true;
    let mut worst = 0.0_f64;
    for p in [2usize, 3, 5, 7] {
        let s = ring(p);
        for k in 0..=p {
            let w = weyl::basis_change(&s, k).unwrap();
            let wh = w.adjoint();
            let mut seen = BTreeSet::new();
            for m in 0..p {
                for n in 0..p {
                    let op = weyl::v_op(&s, m, n).unwrap();
                    let out = weyl::intertwined(&op, k).unwrap();
                    let num = wh.matmul(&op.matrix()).unwrap().matmul(&w).unwrap();
                    worst = worst.max(num.max_abs_diff(&out.matrix()).unwrap());
                    seen.insert((out.clock(), out.shift()));
                }
            }
            pass &= seen.len() == p * p;
        }
    }
    report(
        9,
        "basis changes permute the operator labels bijectively, primes <= 7",
        pass && worst < 1e-10,
    );
}

#[test]
fn criterion_10_cli_contract() {
    let bin = env!("CARGO_BIN_EXE_mubkit");
    let run = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .env_remove("MUBKIT_TOL")
            .output()
            .expect("binary runs")
    };

    let a = run(&["all", "--dim", "3", "--seed", "7", "--json"]);
    let b = run(&["all", "--dim", "3", "--seed", "7", "--json"]);
    let mut pass = a.status.code() == Some(0);
    pass &= a.stdout == b.stdout && !a.stdout.is_empty();

    let ok = run(&["field", "show", "--dim", "4"]);
    pass &= ok.status.code() == Some(0);

    let failing = run(&["mub", "verify", "--dim", "6"]);
    pass &= failing.status.code() == Some(1);

    let not_a_field = run(&["field", "show", "--dim", "6", "--construction", "galois"]);
    pass &= not_a_field.status.code() == Some(2);

    let bad_flag = run(&["field", "show", "--no-such-flag"]);
    pass &= bad_flag.status.code() == Some(2);

    report(10, "CLI determinism and the 0/1/2 exit-code contract", pass);
}

// The Basis import is exercised here so family files and direct construction
// stay interchangeable for the loaded-input path of the CLI.
#[test]
fn family_files_round_trip_through_serialization() {
    let s = field(3, 2);
    let family = bases::mub_family(&s);
    for b in &family {
        let json = serde_json::to_string(&b.to_json()).unwrap();
        let back = Basis::from_json(&serde_json::from_str(&json).unwrap()).unwrap();
        for i in 0..s.size() {
            assert!(linalg::max_abs_diff_vec(b.state(i), back.state(i)) < 1e-15);
        }
    }
    let _ = tomography::expand(&s, &ComplexMatrix::identity(9)).unwrap();
}
