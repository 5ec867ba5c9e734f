//! Clock and shift operators labelled by a finite structure, their closed
//! composition law, the maximal commuting subgroups they generate, and the
//! change-of-basis maps that permute them.
//!
//! V^j_i acts on position labels by shifting with i and then reading the
//! clock j: its only non-zero entries are `M[k⊕i][k] = γ^{(k⊕i)⊙j}`. Products
//! of such operators stay in the set up to a character phase, so an
//! [`ErrorOperator`] carries its scalar phase explicitly and composition
//! never needs a matrix product.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bases::{self, Basis};
use crate::galois::FiniteStructure;
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use crate::{parallel, Error, Result};

/// A scalar multiple of one clock-and-shift operator V^j_i.
#[derive(Debug, Clone)]
pub struct ErrorOperator {
    structure: Arc<FiniteStructure>,
    clock: usize,
    shift: usize,
    phase: Complex64,
}

impl ErrorOperator {
    pub fn structure(&self) -> &Arc<FiniteStructure> {
        &self.structure
    }

    pub fn clock(&self) -> usize {
        self.clock
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn phase(&self) -> Complex64 {
        self.phase
    }

    /// Dense matrix form; column k has its single entry at row k⊕i.
    pub fn matrix(&self) -> ComplexMatrix {
        let s = &self.structure;
        let n = s.size();
        let chi = s.character();
        let mut m = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let row = s.add(k, self.shift);
            m[(row, k)] = self.phase * chi.value(s.mul(row, self.clock));
        }
        m
    }

    /// (V^j_i)† = γ^{⊖(i⊙j)}·V^{⊖j}_{⊖i}, with the scalar phase conjugated.
    pub fn adjoint(&self) -> Self {
        let s = &self.structure;
        let chi = s.character();
        let phase = self.phase.conj() * chi.value(s.neg(s.mul(self.shift, self.clock)));
        Self {
            structure: Arc::clone(s),
            clock: s.neg(self.clock),
            shift: s.neg(self.shift),
            phase,
        }
    }

    /// Matrix product self·other evaluated in closed form:
    /// V^{j_a}_{i_a}·V^{j_b}_{i_b} = γ^{⊖(i_a⊙j_b)}·V^{j_a⊕j_b}_{i_a⊕i_b}.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if !Arc::ptr_eq(&self.structure, &other.structure) && *self.structure != *other.structure {
            return Err(Error::InconsistentData(
                "operators over different finite structures".into(),
            ));
        }
        let s = &self.structure;
        let chi = s.character();
        let phase = self.phase * other.phase * chi.value(s.neg(s.mul(self.shift, other.clock)));
        Ok(Self {
            structure: Arc::clone(s),
            clock: s.add(self.clock, other.clock),
            shift: s.add(self.shift, other.shift),
            phase,
        })
    }
}

/// The operator V^j_i with unit scalar phase.
pub fn v_op(s: &Arc<FiniteStructure>, clock: usize, shift: usize) -> Result<ErrorOperator> {
    let n = s.size();
    if clock >= n {
        return Err(Error::Index {
            index: clock,
            size: n,
        });
    }
    if shift >= n {
        return Err(Error::Index {
            index: shift,
            size: n,
        });
    }
    Ok(ErrorOperator {
        structure: Arc::clone(s),
        clock,
        shift,
        phase: linalg::ONE,
    })
}

/// Diagonal operator diag(γ^{k⊙j}).
pub fn clock_op(s: &Arc<FiniteStructure>, j: usize) -> Result<ErrorOperator> {
    v_op(s, j, 0)
}

/// Permutation operator |k⟩ ↦ |k⊕i⟩.
pub fn shift_op(s: &Arc<FiniteStructure>, i: usize) -> Result<ErrorOperator> {
    v_op(s, 0, i)
}

/// The operator diagonal in family basis `basis_index` with spectrum γ^{k⊙l}:
/// U = conj(Φ_c(l))·V^{c⊙l}_l for c = basis_index − 1, and the clock V^l_0
/// for the computational basis. Satisfies U_{l1}·U_{l2} = U_{l1⊕l2} exactly.
pub fn u_op(s: &Arc<FiniteStructure>, basis_index: usize, l: usize) -> Result<ErrorOperator> {
    let n = s.size();
    if basis_index > n {
        return Err(Error::Index {
            index: basis_index,
            size: n + 1,
        });
    }
    if l >= n {
        return Err(Error::Index { index: l, size: n });
    }
    if basis_index == 0 {
        return v_op(s, l, 0);
    }
    let c = basis_index - 1;
    let phases = bases::half_power(s, c);
    let mut op = v_op(s, s.mul(c, l), l)?;
    op.phase = phases[l].conj();
    Ok(op)
}

/// A maximal commuting set of operator labels: the scalar line
/// {(t⊙j, t⊙i) : t} of a generator whose multiples exhaust N labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorSubgroup {
    labels: Vec<(usize, usize)>,
}

impl OperatorSubgroup {
    /// Sorted (clock, shift) pairs, always including (0, 0).
    pub fn labels(&self) -> &[(usize, usize)] {
        &self.labels
    }

    /// Which family basis diagonalizes every member: 0 for the clock line,
    /// c+1 when the line contains (c, 1), None otherwise. Over a field every
    /// line has a family index; over mod-N rings some lines have none.
    pub fn family_index(&self) -> Option<usize> {
        if self.labels.iter().all(|&(_, i)| i == 0) {
            return Some(0);
        }
        self.labels
            .iter()
            .find(|&&(_, i)| i == 1)
            .map(|&(j, _)| j + 1)
    }

    pub fn members(&self, s: &Arc<FiniteStructure>) -> Result<Vec<ErrorOperator>> {
        self.labels.iter().map(|&(j, i)| v_op(s, j, i)).collect()
    }
}

/// All maximal commuting label lines, deduplicated and deterministically
/// ordered. Counts: N+1 over a field, more over a non-field ring (six for
/// mod-4, twelve for mod-6).
pub fn enumerate_subgroups(s: &FiniteStructure) -> Vec<OperatorSubgroup> {
    let n = s.size();
    let mut seen: BTreeSet<Vec<(usize, usize)>> = BTreeSet::new();
    for j in 0..n {
        for i in 0..n {
            if j == 0 && i == 0 {
                continue;
            }
            let line: BTreeSet<(usize, usize)> =
                (0..n).map(|t| (s.mul(t, j), s.mul(t, i))).collect();
            if line.len() == n {
                seen.insert(line.into_iter().collect());
            }
        }
    }
    seen.into_iter()
        .map(|labels| OperatorSubgroup { labels })
        .collect()
}

fn subgroup_seed(base: u64, labels: &[(usize, usize)]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325_u64;
    let eat = |h: &mut u64, v: u64| {
        for b in v.to_le_bytes() {
            *h ^= b as u64;
            *h = h.wrapping_mul(0x100_0000_01b3);
        }
    };
    eat(&mut h, base);
    for &(j, i) in labels {
        eat(&mut h, j as u64);
        eat(&mut h, i as u64);
    }
    h
}

/// A common eigenbasis of every member of the subgroup, found by
/// diagonalizing a random Hermitian combination of the members. The
/// combination is drawn from a generator seeded by the subgroup's own labels
/// mixed with `seed`, so the result does not depend on evaluation order.
/// Degenerate draws are retried with fresh coefficients.
pub fn joint_eigenbasis(
    s: &Arc<FiniteStructure>,
    subgroup: &OperatorSubgroup,
    seed: u64,
    tol: f64,
) -> Result<Basis> {
    let n = s.size();
    let mats: Vec<ComplexMatrix> = subgroup
        .labels
        .iter()
        .filter(|&&l| l != (0, 0))
        .map(|&(j, i)| v_op(s, j, i).map(|op| op.matrix()))
        .collect::<Result<Vec<_>>>()?;
    if mats.is_empty() {
        return Err(Error::Domain("subgroup has no non-identity members".into()));
    }
    let base = subgroup_seed(seed, &subgroup.labels);
    for attempt in 0..24u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(
            base.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        );
        let mut h = ComplexMatrix::zeros(n, n);
        for m in &mats {
            let c: f64 = rng.gen_range(-1.0..1.0);
            let d: f64 = rng.gen_range(-1.0..1.0);
            let adj = m.adjoint();
            let herm = m.add(&adj)?.scale(Complex64::new(c, 0.0));
            let anti = m.sub(&adj)?.scale(Complex64::new(0.0, d));
            h = h.add(&herm)?.add(&anti)?;
        }
        let eig = linalg::eig_hermitian(&h, 1e-9)?;
        let scale = eig.values.iter().fold(1.0_f64, |a, &v| a.max(v.abs()));
        let gap = eig
            .values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        if gap < 1e-6 * scale {
            continue;
        }
        let w = eig.vectors;
        let wh = w.adjoint();
        let mut worst = 0.0_f64;
        for m in &mats {
            let d = wh.matmul(m)?.matmul(&w)?;
            for r in 0..n {
                for c in 0..n {
                    if r != c {
                        worst = worst.max(d[(r, c)].norm());
                    }
                }
            }
        }
        if worst > tol.max(1e-8) {
            continue;
        }
        let mut states: Vec<ComplexVector> = (0..n).map(|k| w.column(k)).collect();
        let threshold = 1e-9 / (n as f64).sqrt();
        for st in &mut states {
            linalg::phase_normalize(st, threshold);
        }
        return Ok(Basis::new(n, subgroup.family_index().unwrap_or(0), states));
    }
    Err(Error::NumericalDegeneracy(format!(
        "no well-separated random combination found for subgroup {:?}",
        subgroup.labels
    )))
}

/// Joint eigenbases for a list of subgroups, in the same order. Independent
/// subgroups are processed in parallel when the `parallel` feature is on.
pub fn all_joint_eigenbases(
    s: &Arc<FiniteStructure>,
    subgroups: &[OperatorSubgroup],
    seed: u64,
    tol: f64,
) -> Result<Vec<Basis>> {
    let shared = Arc::clone(s);
    let results = parallel::map_collect(subgroups.to_vec(), move |sub| {
        joint_eigenbasis(&shared, sub, seed, tol)
    });
    results.into_iter().collect()
}

/// Matrix whose columns are the states of family basis k.
pub fn basis_change(s: &FiniteStructure, k: usize) -> Result<ComplexMatrix> {
    Ok(bases::family_basis(s, k)?.as_matrix())
}

/// Conjugation of an error operator by the k-th basis change, in closed form:
/// (W^k)†·V^m_n·W^k = conj(Φ_c(n))·γ^{n⊙m}·V^n_{c⊙n ⊖ m} with c = k−1.
/// For fixed k the label map (m, n) ↦ (n, c⊙n ⊖ m) is a bijection.
pub fn intertwined(op: &ErrorOperator, k: usize) -> Result<ErrorOperator> {
    let s = op.structure();
    let dim = s.size();
    if k > dim {
        return Err(Error::Index {
            index: k,
            size: dim + 1,
        });
    }
    if k == 0 {
        return Ok(op.clone());
    }
    let c = k - 1;
    let chi = s.character();
    let m = op.clock;
    let n = op.shift;
    let phases = bases::half_power(s, c);
    let phase = op.phase * phases[n].conj() * chi.value(s.mul(n, m));
    Ok(ErrorOperator {
        structure: Arc::clone(s),
        clock: n,
        shift: s.sub(s.mul(c, n), m),
        phase,
    })
}
