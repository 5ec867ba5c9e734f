//! Maximally entangled pair states indexed by two structure labels, and the
//! identities that make them useful: basis duality, invariance under
//! simultaneous shifts, collapse onto clock-and-shift errors, and the overlap
//! that survives re-pairing two entangled pairs.
//!
//! Relative to an orthonormal basis {b_k} the pair state with labels (m, n)
//! is `B_{m,n}[(a, b)] = (1/√N)·Σ_k γ^{k⊙n}·conj(b_k[a])·b_{k⊕m}[b]`. The N²
//! computational-basis pair states are orthonormal, so (m, n) plays the role
//! of a syndrome: m is read in the position pairing, n in the phase.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bases::{self, Basis};
use crate::galois::FiniteStructure;
use crate::linalg::{self, ComplexVector};
use crate::weyl;
use crate::{parallel, Error, Result};

/// Pair state B_{m,n} relative to `basis`, flattened with index a·N + b.
pub fn bell_state(s: &FiniteStructure, basis: &Basis, m: usize, n: usize) -> Result<ComplexVector> {
    let dim = s.size();
    if basis.dim() != dim {
        return Err(Error::Shape(format!(
            "basis of dimension {} over a structure of size {}",
            basis.dim(),
            dim
        )));
    }
    if m >= dim {
        return Err(Error::Index {
            index: m,
            size: dim,
        });
    }
    if n >= dim {
        return Err(Error::Index {
            index: n,
            size: dim,
        });
    }
    let chi = s.character();
    let norm = 1.0 / (dim as f64).sqrt();
    let mut out = vec![linalg::ZERO; dim * dim];
    for a in 0..dim {
        for b in 0..dim {
            let mut acc = linalg::ZERO;
            for k in 0..dim {
                acc +=
                    chi.value(s.mul(k, n)) * basis.state(k)[a].conj() * basis.state(s.add(k, m))[b];
            }
            out[a * dim + b] = acc * norm;
        }
    }
    Ok(out)
}

/// Largest deviation of the computational pair family from orthonormality.
pub fn family_orthonormality_deviation(s: &FiniteStructure) -> Result<f64> {
    let dim = s.size();
    let comp = bases::computational_basis(dim);
    let states: Vec<ComplexVector> = (0..dim * dim)
        .map(|idx| bell_state(s, &comp, idx / dim, idx % dim))
        .collect::<Result<_>>()?;
    let mut worst = 0.0_f64;
    for x in 0..states.len() {
        for y in x..states.len() {
            let g = linalg::inner(&states[x], &states[y])?;
            let expected = if x == y { 1.0 } else { 0.0 };
            worst = worst.max((g - Complex64::new(expected, 0.0)).norm());
        }
    }
    Ok(worst)
}

/// Residual of the duality between the two label slots: the computational
/// pair state with labels (⊖n, m) equals γ^{n⊙m} times the pair state with
/// labels (m, n) taken relative to the dual basis.
pub fn duality_residual(s: &FiniteStructure, m: usize, n: usize) -> Result<f64> {
    let dim = s.size();
    let comp = bell_state(s, &bases::computational_basis(dim), s.neg(n), m)?;
    let dual = bell_state(s, &bases::dual_basis(s), m, n)?;
    let phase = s.character().value(s.mul(n, m));
    let scaled: ComplexVector = dual.iter().map(|z| z * phase).collect();
    Ok(linalg::max_abs_diff_vec(&comp, &scaled))
}

/// Residual of shift invariance: applying the same shift to both slots
/// multiplies B_{m,n} by γ^{⊖(i⊙n)}.
pub fn permutation_residual(s: &Arc<FiniteStructure>, i: usize, m: usize, n: usize) -> Result<f64> {
    let dim = s.size();
    let bell = bell_state(s, &bases::computational_basis(dim), m, n)?;
    let p = weyl::shift_op(s, i)?.matrix();
    let shifted = p.tensor(&p).apply(&bell)?;
    let phase = s.character().value(s.neg(s.mul(i, n)));
    let scaled: ComplexVector = bell.iter().map(|z| z * phase).collect();
    Ok(linalg::max_abs_diff_vec(&shifted, &scaled))
}

/// Projects the first slot of the computational pair state B_{m,n} onto
/// computational state k and returns the renormalized second slot.
pub fn error_channel(s: &FiniteStructure, m: usize, n: usize, k: usize) -> Result<ComplexVector> {
    let dim = s.size();
    if k >= dim {
        return Err(Error::Index {
            index: k,
            size: dim,
        });
    }
    let bell = bell_state(s, &bases::computational_basis(dim), m, n)?;
    let slice: ComplexVector = (0..dim).map(|b| bell[k * dim + b]).collect();
    let nrm = linalg::norm(&slice);
    if nrm * nrm < 1e-15 {
        return Err(Error::DegenerateProjection(nrm * nrm));
    }
    Ok(slice.iter().map(|z| z / nrm).collect())
}

/// Largest deviation, over projection outcomes k, of the collapsed state
/// from γ^{⊖(m⊙n)}·V^n_m|k⟩.
pub fn error_channel_residual(s: &Arc<FiniteStructure>, m: usize, n: usize) -> Result<f64> {
    let dim = s.size();
    let chi = s.character();
    let op = weyl::v_op(s, n, m)?.matrix();
    let phase = chi.value(s.neg(s.mul(m, n)));
    let mut worst = 0.0_f64;
    for k in 0..dim {
        let collapsed = error_channel(s, m, n, k)?;
        let mut unit = vec![linalg::ZERO; dim];
        unit[k] = linalg::ONE;
        let pushed: ComplexVector = op.apply(&unit)?.iter().map(|z| z * phase).collect();
        worst = worst.max(linalg::max_abs_diff_vec(&collapsed, &pushed));
    }
    Ok(worst)
}

/// Overlap between the two ways of grouping two pair states on four slots:
/// Ψ1 pairs (a, b) with the conjugate of (e, e′) using B_{m,n}, Ψ2 pairs
/// (a, e) conjugated with (b, e′) using B_{i,j}. Evaluates to
/// (1/N)·γ^{i⊙n}·γ^{m⊙j}.
pub fn repairing_overlap(
    s: &FiniteStructure,
    m: usize,
    n: usize,
    i: usize,
    j: usize,
) -> Result<Complex64> {
    let dim = s.size();
    let comp = bases::computational_basis(dim);
    let first = bell_state(s, &comp, m, n)?;
    let second = bell_state(s, &comp, i, j)?;
    let mut psi1 = Vec::with_capacity(dim * dim * dim * dim);
    let mut psi2 = Vec::with_capacity(dim * dim * dim * dim);
    for a in 0..dim {
        for b in 0..dim {
            for e in 0..dim {
                for ep in 0..dim {
                    psi1.push(first[a * dim + b] * first[e * dim + ep].conj());
                    psi2.push(second[a * dim + e].conj() * second[b * dim + ep]);
                }
            }
        }
    }
    linalg::inner(&psi1, &psi2)
}

/// Closed form the re-pairing overlap must reproduce.
pub fn repairing_prediction(
    s: &FiniteStructure,
    m: usize,
    n: usize,
    i: usize,
    j: usize,
) -> Complex64 {
    let chi = s.character();
    chi.value(s.mul(i, n)) * chi.value(s.mul(m, j)) / s.size() as f64
}

/// One named identity sweep with its worst residual.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub max_residual: f64,
    pub pass: bool,
}

impl CheckOutcome {
    pub fn new(name: &str, max_residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            max_residual,
            pass: max_residual <= tol,
        }
    }
}

/// Sweeps every pair-state identity over the whole label range. Re-pairing
/// tuples are exhaustive for N ≤ 3 and a 100-tuple seeded sample above that.
pub fn verify_identities(
    s: &Arc<FiniteStructure>,
    tol: f64,
    seed: u64,
) -> Result<Vec<CheckOutcome>> {
    let dim = s.size();
    let mut label_pairs = Vec::new();
    for m in 0..dim {
        for n in 0..dim {
            label_pairs.push((m, n));
        }
    }

    let ortho = family_orthonormality_deviation(s)?;

    let shared = Arc::clone(s);
    let duality = parallel::max_over(label_pairs.clone(), move |&(m, n)| {
        duality_residual(&shared, m, n).expect("labels in range")
    });

    let mut triples = Vec::new();
    for i in 0..dim {
        for &(m, n) in &label_pairs {
            triples.push((i, m, n));
        }
    }
    let shared = Arc::clone(s);
    let permutation = parallel::max_over(triples, move |&(i, m, n)| {
        permutation_residual(&shared, i, m, n).expect("labels in range")
    });

    let shared = Arc::clone(s);
    let channel = parallel::max_over(label_pairs.clone(), move |&(m, n)| {
        error_channel_residual(&shared, m, n).expect("labels in range")
    });

    let tuples: Vec<(usize, usize, usize, usize)> = if dim <= 3 {
        let mut all = Vec::new();
        for &(m, n) in &label_pairs {
            for &(i, j) in &label_pairs {
                all.push((m, n, i, j));
            }
        }
        all
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..100)
            .map(|_| {
                (
                    rng.gen_range(0..dim),
                    rng.gen_range(0..dim),
                    rng.gen_range(0..dim),
                    rng.gen_range(0..dim),
                )
            })
            .collect()
    };
    let shared = Arc::clone(s);
    let repairing = parallel::max_over(tuples, move |&(m, n, i, j)| {
        let got = repairing_overlap(&shared, m, n, i, j).expect("labels in range");
        (got - repairing_prediction(&shared, m, n, i, j)).norm()
    });

    Ok(vec![
        CheckOutcome::new("bell_orthonormality", ortho, tol),
        CheckOutcome::new("bell_duality", duality, tol),
        CheckOutcome::new("bell_permutation_invariance", permutation, tol),
        CheckOutcome::new("bell_error_channel", channel, tol),
        CheckOutcome::new("bell_repairing_overlap", repairing, tol),
    ])
}
