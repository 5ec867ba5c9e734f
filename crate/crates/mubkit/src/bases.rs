//! Orthonormal bases labelled by a finite structure, and the family of N+1
//! bases generated by quadratic character phases.
//!
//! Basis k = 0 is the computational basis. For k ≥ 1, state i of basis k has
//! component (1/√N)·γ^{⊖(q⊙i)}·Φ_{k−1}(q) at position q, where Φ_c(q) is a
//! consistent square root of γ^{c⊙q⊙q} (see [`half_power`]). Over a field this
//! family together with the computational basis is a complete set of N+1
//! mutually unbiased bases; over a non-field mod-N ring every basis is still
//! unbiased with respect to the computational one, but pairs k, l with
//! gcd(k−l, N) > 1 fail to be unbiased against each other.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::galois::{root_of_unity, FiniteStructure, StructureKind};
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use crate::{parallel, Error, Result};

/// An ordered orthonormal basis; `construction_index` records which member of
/// the family it is (0 = computational).
#[derive(Debug, Clone)]
pub struct Basis {
    dim: usize,
    construction_index: usize,
    states: Vec<ComplexVector>,
}

impl Basis {
    pub(crate) fn new(dim: usize, construction_index: usize, states: Vec<ComplexVector>) -> Self {
        Self {
            dim,
            construction_index,
            states,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn construction_index(&self) -> usize {
        self.construction_index
    }

    pub fn state(&self, i: usize) -> &ComplexVector {
        &self.states[i]
    }

    pub fn states(&self) -> &[ComplexVector] {
        &self.states
    }

    /// Matrix whose column i is state i.
    pub fn as_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_columns(&self.states).expect("states share the basis dimension")
    }

    /// Max deviation of the Gram matrix from the identity.
    pub fn orthonormality_deviation(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.states.len() {
            for j in i..self.states.len() {
                let g = linalg::inner(&self.states[i], &self.states[j]).expect("equal lengths");
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - Complex64::new(expected, 0.0)).norm());
            }
        }
        worst
    }

    /// Rescales every state so its first non-negligible component is real and
    /// positive.
    pub(crate) fn phase_normalize(&mut self) {
        let threshold = 1e-9 / (self.dim as f64).sqrt();
        for state in &mut self.states {
            linalg::phase_normalize(state, threshold);
        }
    }

    pub fn to_json(&self) -> BasisJson {
        BasisJson {
            dim: self.dim,
            construction_index: self.construction_index,
            states: self
                .states
                .iter()
                .map(|s| s.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn from_json(json: &BasisJson) -> Result<Self> {
        if json.states.len() != json.dim || json.states.iter().any(|s| s.len() != json.dim) {
            return Err(Error::Parse(format!(
                "basis file claims dim {} but carries {} states",
                json.dim,
                json.states.len()
            )));
        }
        let states = json
            .states
            .iter()
            .map(|s| s.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect();
        Ok(Self {
            dim: json.dim,
            construction_index: json.construction_index,
            states,
        })
    }
}

/// Serialized basis; complex numbers are [re, im] pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisJson {
    pub dim: usize,
    pub construction_index: usize,
    pub states: Vec<Vec<[f64; 2]>>,
}

/// Standard unit vectors.
pub fn computational_basis(n: usize) -> Basis {
    let states = (0..n)
        .map(|i| {
            let mut v = vec![linalg::ZERO; n];
            v[i] = linalg::ONE;
            v
        })
        .collect();
    Basis::new(n, 0, states)
}

/// The finite Fourier dual of the computational basis: state j has component
/// γ^{q⊙j}/√N at position q. Eigenbasis of every shift operator.
pub fn dual_basis(s: &FiniteStructure) -> Basis {
    let n = s.size();
    let chi = s.character();
    let norm = 1.0 / (n as f64).sqrt();
    let states = (0..n)
        .map(|j| (0..n).map(|q| chi.value(s.mul(q, j)) * norm).collect())
        .collect();
    let mut b = Basis::new(n, 1, states);
    b.phase_normalize();
    b
}

/// Φ_c: a unit-modulus square root of q ↦ γ^{c⊙q⊙q}, chosen so that
/// Φ_c(q⊕l)·conj(Φ_c(q)) = Φ_c(l)·γ^{c⊙q⊙l} holds exactly.
///
/// * mod-N: Φ_c(q) = e^{iπ·c·q·(q+N)/N} with the exponent reduced mod 2N as an
///   integer, never as a floating square root.
/// * GF(p^m), p odd: Φ_c(q) = γ^{h⊙c⊙q⊙q} where h = (1⊕1)^{−1}.
/// * GF(2^m): Φ_c(q) = i^{Q_c(q)} for the Z₄-valued quadratic refinement
///   Q_c of the bilinear form (x, y) ↦ digit₀(c⊙x⊙y) on the digit basis.
pub fn half_power(s: &FiniteStructure, c: usize) -> Vec<Complex64> {
    let n = s.size();
    match s.kind() {
        StructureKind::ModN => (0..n)
            .map(|q| {
                let num = (c as i64) * (q as i64) * ((q + n) as i64);
                root_of_unity(num.rem_euclid(2 * n as i64), 2 * n)
            })
            .collect(),
        StructureKind::Galois { p, .. } if p % 2 == 1 => {
            let half = s
                .inv(s.add(1, 1))
                .expect("2 is a unit in odd characteristic");
            let chi = s.character();
            let hc = s.mul(half, c);
            (0..n).map(|q| chi.value(s.mul(hc, s.mul(q, q)))).collect()
        }
        StructureKind::Galois { p: _, m, .. } => {
            let m = *m;
            let unit = |t: usize| 1usize << t; // label of x^t in characteristic 2
            let diag: Vec<usize> = (0..m)
                .map(|t| s.char_exponent(s.mul(c, s.mul(unit(t), unit(t)))))
                .collect();
            let cross: Vec<Vec<usize>> = (0..m)
                .map(|t| {
                    (0..m)
                        .map(|u| s.char_exponent(s.mul(c, s.mul(unit(t), unit(u)))))
                        .collect()
                })
                .collect();
            (0..n)
                .map(|q| {
                    let mut exp = 0usize;
                    for t in 0..m {
                        let xt = s.digit(q, t);
                        exp += xt * diag[t];
                        for u in t + 1..m {
                            exp += 2 * xt * s.digit(q, u) * cross[t][u];
                        }
                    }
                    root_of_unity(exp as i64, 4)
                })
                .collect()
        }
    }
}

/// Computational basis with the half-power phase Φ_{k−1}(q) attached to state
/// q. The phases are the content, so no phase normalization is applied.
pub fn phased_computational(s: &FiniteStructure, k: usize) -> Result<Basis> {
    let n = s.size();
    if k < 1 || k > n {
        return Err(Error::Index {
            index: k,
            size: n + 1,
        });
    }
    let phases = half_power(s, k - 1);
    let states = (0..n)
        .map(|q| {
            let mut v = vec![linalg::ZERO; n];
            v[q] = phases[q];
            v
        })
        .collect();
    Ok(Basis::new(n, k, states))
}

/// Member k of the family: the computational basis for k = 0, otherwise
/// state i has component (1/√N)·γ^{⊖(q⊙i)}·Φ_{k−1}(q) at position q.
pub fn family_basis(s: &FiniteStructure, k: usize) -> Result<Basis> {
    let n = s.size();
    if k == 0 {
        return Ok(computational_basis(n));
    }
    if k > n {
        return Err(Error::Index {
            index: k,
            size: n + 1,
        });
    }
    let chi = s.character();
    let norm = 1.0 / (n as f64).sqrt();
    let phases = half_power(s, k - 1);
    let states = (0..n)
        .map(|i| {
            (0..n)
                .map(|q| chi.value(s.neg(s.mul(q, i))) * phases[q] * norm)
                .collect()
        })
        .collect();
    let mut b = Basis::new(n, k, states);
    b.phase_normalize();
    Ok(b)
}

/// The family of N+1 bases: computational plus the N quadratic-phase duals.
pub fn mub_family(s: &FiniteStructure) -> Vec<Basis> {
    (0..=s.size())
        .map(|k| family_basis(s, k).expect("k stays in range"))
        .collect()
}

/// ⟨basis_a state j | basis_b state i⟩.
pub fn overlap(basis_a: &Basis, j: usize, basis_b: &Basis, i: usize) -> Result<Complex64> {
    if basis_a.dim() != basis_b.dim() {
        return Err(Error::Shape(format!(
            "overlap between dims {} and {}",
            basis_a.dim(),
            basis_b.dim()
        )));
    }
    linalg::inner(basis_a.state(j), basis_b.state(i))
}

/// Deviation of one basis pair from mutual unbiasedness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairDeviation {
    pub first: usize,
    pub second: usize,
    /// max over states of | |⟨·|·⟩|² − 1/N |.
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnbiasednessReport {
    pub dim: usize,
    pub pairs: Vec<PairDeviation>,
    pub overall_max: f64,
    /// True when there are N+1 bases and every pair is unbiased within tol.
    pub is_complete_mub: bool,
}

/// Checks |⟨e^k_i|e^l_j⟩|² = 1/N for every pair of distinct bases.
pub fn unbiasedness(bases: &[Basis], tol: f64) -> Result<UnbiasednessReport> {
    let dim = bases.first().map_or(0, Basis::dim);
    if dim == 0 {
        return Err(Error::Shape("no bases given".into()));
    }
    if bases.iter().any(|b| b.dim() != dim) {
        return Err(Error::Shape("bases of mixed dimensions".into()));
    }
    let mut index_pairs = Vec::new();
    for k in 0..bases.len() {
        for l in k + 1..bases.len() {
            index_pairs.push((k, l));
        }
    }
    let target = 1.0 / dim as f64;
    let pairs: Vec<PairDeviation> = parallel::map_collect(index_pairs, |&(k, l)| {
        let mut dev = 0.0_f64;
        for i in 0..dim {
            for j in 0..dim {
                let ov = linalg::inner(bases[k].state(i), bases[l].state(j))
                    .expect("dims checked above");
                dev = dev.max((ov.norm_sqr() - target).abs());
            }
        }
        PairDeviation {
            first: k,
            second: l,
            deviation: dev,
        }
    });
    let overall_max = pairs.iter().map(|p| p.deviation).fold(0.0, f64::max);
    let is_complete_mub = bases.len() == dim + 1 && overall_max <= tol;
    Ok(UnbiasednessReport {
        dim,
        pairs,
        overall_max,
        is_complete_mub,
    })
}

/// True when the two bases contain the same states up to order and per-state
/// global phase.
pub fn same_basis_up_to_phase(a: &Basis, b: &Basis, tol: f64) -> bool {
    if a.dim() != b.dim() || a.states().len() != b.states().len() {
        return false;
    }
    let n = a.dim();
    let mut used = vec![false; n];
    for sa in a.states() {
        let mut found = false;
        for (j, sb) in b.states().iter().enumerate() {
            if used[j] {
                continue;
            }
            let ov = linalg::inner(sa, sb).expect("dims equal");
            if (ov.norm() - 1.0).abs() <= tol {
                used[j] = true;
                found = true;
                break;
            }
        }
        if !found {
            return false;
        }
    }
    true
}
