//! State reconstruction from measurements in the joint eigenbases of the
//! commuting operator subgroups.
//!
//! The N² clock-and-shift operators are an orthogonal operator basis:
//! Tr((V^k_l)†·V^{k'}_{l'}) = N·δ. Any operator is therefore fixed by its
//! coefficients `c[k][l] = Tr((V^k_l)†·L)`, and each coefficient with
//! (k, l) ≠ (0, 0) is readable from the outcome distribution of one subgroup
//! measurement, because a subgroup member is diagonal in that subgroup's
//! joint eigenbasis with unit-modulus eigenvalues. Over a field the N+1
//! subgroups give exactly N²−1 informative numbers; over a non-field ring
//! the lines overlap and the scheme is overcomplete, which [`TomographyScheme::reconstruct`]
//! exploits as a consistency check on its input.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bases::Basis;
use crate::galois::FiniteStructure;
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use crate::weyl::{self, OperatorSubgroup};
use crate::{parallel, Error, Result};

/// A unit-trace positive semidefinite matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Wraps a matrix after checking shape, hermiticity and unit trace.
    /// Positivity is the caller's concern; see [`DensityMatrix::validate`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermiticity_deviation();
        if herm > 1e-9 {
            return Err(Error::Domain(format!("hermiticity deviation {herm:.3e}")));
        }
        let tr = matrix.trace()?;
        if (tr - linalg::ONE).norm() > 1e-9 {
            return Err(Error::Domain(format!("trace {tr} is not 1")));
        }
        Ok(Self { matrix })
    }

    /// Projector onto the given state, normalized first.
    pub fn pure(state: &[Complex64]) -> Result<Self> {
        let nrm = linalg::norm(state);
        if nrm < 1e-12 {
            return Err(Error::Domain("cannot normalize the zero vector".into()));
        }
        let n = state.len();
        let m = ComplexMatrix::from_fn(n, n, |a, b| state[a] * state[b].conj() / (nrm * nrm));
        Ok(Self { matrix: m })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let m = ComplexMatrix::identity(n).scale(Complex64::new(1.0 / n as f64, 0.0));
        Self { matrix: m }
    }

    /// ρ = G·G†/Tr(G·G†) for a matrix of standard complex Gaussians; this is
    /// the standard full-rank random mixed state.
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let g = ComplexMatrix::from_fn(n, n, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        });
        let gg = g.matmul(&g.adjoint()).expect("square by construction");
        let tr = gg.trace().expect("square").re;
        Self {
            matrix: gg.scale(Complex64::new(1.0 / tr, 0.0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Full physicality check including the spectrum: eigenvalues above −tol.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let eig = linalg::eig_hermitian(&self.matrix, tol.max(1e-9))?;
        match eig.values.first() {
            Some(&lo) if lo < -tol => Err(Error::Domain(format!("negative eigenvalue {lo:.3e}"))),
            _ => Ok(()),
        }
    }

    pub fn to_json(&self) -> DensityJson {
        let n = self.dim();
        DensityJson {
            dim: n,
            matrix: (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| [self.matrix[(a, b)].re, self.matrix[(a, b)].im])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_json(json: &DensityJson) -> Result<Self> {
        if json.matrix.len() != json.dim || json.matrix.iter().any(|r| r.len() != json.dim) {
            return Err(Error::Parse(format!(
                "density file claims dim {} but carries a {}-row matrix",
                json.dim,
                json.matrix.len()
            )));
        }
        let m = ComplexMatrix::from_fn(json.dim, json.dim, |a, b| {
            Complex64::new(json.matrix[a][b][0], json.matrix[a][b][1])
        });
        Self::new(m)
    }
}

/// Serialized density matrix; complex numbers are [re, im] pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityJson {
    pub dim: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

/// Coefficients `c[k][l] = Tr((V^k_l)†·L)` of an arbitrary operator, indexed
/// clock first.
pub fn expand(s: &FiniteStructure, op: &ComplexMatrix) -> Result<Vec<Vec<Complex64>>> {
    let n = s.size();
    if op.rows() != n || op.cols() != n {
        return Err(Error::Shape(format!(
            "operator is {}x{} over a structure of size {}",
            op.rows(),
            op.cols(),
            n
        )));
    }
    let chi = s.character();
    let mut coeffs = vec![vec![linalg::ZERO; n]; n];
    for (k, row) in coeffs.iter_mut().enumerate() {
        for (l, slot) in row.iter_mut().enumerate() {
            // (V^k_l)† hits only the entries L[q⊕l][q].
            let mut acc = linalg::ZERO;
            for q in 0..n {
                let r = s.add(q, l);
                acc += chi.value(s.neg(s.mul(r, k))) * op[(r, q)];
            }
            *slot = acc;
        }
    }
    Ok(coeffs)
}

/// Inverse of [`expand`]: `L = (1/N)·Σ_{k,l} c[k][l]·V^k_l`.
pub fn reconstruct_from_coefficients(
    s: &FiniteStructure,
    coeffs: &[Vec<Complex64>],
) -> Result<ComplexMatrix> {
    let n = s.size();
    if coeffs.len() != n || coeffs.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("coefficient table must be N x N".into()));
    }
    let chi = s.character();
    let mut m = ComplexMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let l = s.sub(a, b);
            let mut acc = linalg::ZERO;
            for (k, row) in coeffs.iter().enumerate() {
                acc += row[l] * chi.value(s.mul(a, k));
            }
            m[(a, b)] = acc / n as f64;
        }
    }
    Ok(m)
}

struct SubgroupData {
    labels: Vec<(usize, usize)>,
    basis: Basis,
    /// eigenvalues[w][k] = ⟨b_k|V|b_k⟩ for member w, aligned with `labels`.
    eigenvalues: Vec<ComplexVector>,
}

/// Counting argument for the scheme: how many numbers the measurements yield
/// versus how many the operator expansion needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DofReport {
    pub dim: usize,
    pub subgroup_count: usize,
    /// N² − 1 coefficients beyond the fixed trace.
    pub independent_coefficients: usize,
    /// (N − 1) informative outcome frequencies per subgroup.
    pub measured_values: usize,
    /// Zero exactly when the line count is N + 1.
    pub excess: usize,
}

/// Measurement bases and eigenvalue tables for every commuting subgroup.
pub struct TomographyScheme {
    structure: Arc<FiniteStructure>,
    data: Vec<SubgroupData>,
}

impl TomographyScheme {
    /// Enumerates the subgroups, solves a joint eigenbasis for each and
    /// tabulates member eigenvalues, verifying along the way that every
    /// member really is diagonal in its subgroup's basis.
    pub fn new(s: &Arc<FiniteStructure>, seed: u64, tol: f64) -> Result<Self> {
        let subgroups = weyl::enumerate_subgroups(s);
        let shared = Arc::clone(s);
        let built = parallel::map_collect(subgroups, move |sub| {
            build_subgroup(&shared, sub, seed, tol)
        });
        let data = built.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(Self {
            structure: Arc::clone(s),
            data,
        })
    }

    pub fn structure(&self) -> &Arc<FiniteStructure> {
        &self.structure
    }

    pub fn subgroup_count(&self) -> usize {
        self.data.len()
    }

    pub fn subgroup_labels(&self, t: usize) -> &[(usize, usize)] {
        &self.data[t].labels
    }

    pub fn basis(&self, t: usize) -> &Basis {
        &self.data[t].basis
    }

    /// Ideal outcome distributions `p[t][k] = ⟨b^t_k|ρ|b^t_k⟩`.
    pub fn measure(&self, rho: &DensityMatrix) -> Result<Vec<Vec<f64>>> {
        let n = self.structure.size();
        if rho.dim() != n {
            return Err(Error::Shape(format!(
                "state of dimension {} under a size-{} scheme",
                rho.dim(),
                n
            )));
        }
        iter!(self.data)
            .map(|sub| {
                let mut row = Vec::with_capacity(n);
                for k in 0..n {
                    let b = sub.basis.state(k);
                    let p = linalg::inner(b, &rho.matrix().apply(b)?)?;
                    if p.im.abs() > 1e-9 {
                        return Err(Error::Domain(format!(
                            "complex outcome probability {p} from a non-hermitian input"
                        )));
                    }
                    row.push(p.re.max(0.0));
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()
    }

    /// Simulates `shots` projective measurements per subgroup and returns
    /// outcome frequencies. Sampling walks the outcomes with conditional
    /// binomial draws, so the counts follow the exact multinomial law.
    pub fn measure_sampled(
        &self,
        rho: &DensityMatrix,
        shots: u64,
        seed: u64,
    ) -> Result<Vec<Vec<f64>>> {
        if shots == 0 {
            return Err(Error::Domain("need at least one shot".into()));
        }
        let ideal = self.measure(rho)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::with_capacity(ideal.len());
        for probs in &ideal {
            let total: f64 = probs.iter().sum();
            let mut remaining = shots;
            let mut rest = total;
            let mut row = Vec::with_capacity(probs.len());
            for (k, &p) in probs.iter().enumerate() {
                if k + 1 == probs.len() {
                    row.push(remaining as f64 / shots as f64);
                    break;
                }
                let cond = if rest > 1e-15 {
                    (p / rest).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let draw = Binomial::new(remaining, cond)
                    .map_err(|e| Error::Domain(format!("binomial draw failed: {e}")))?
                    .sample(&mut rng);
                row.push(draw as f64 / shots as f64);
                remaining -= draw;
                rest -= p;
            }
            rows.push(row);
        }
        Ok(rows)
    }

    /// Linear inversion from outcome distributions. Labels measured by more
    /// than one subgroup must agree within `spread_tol` and are averaged.
    pub fn reconstruct(&self, probs: &[Vec<f64>], spread_tol: f64) -> Result<ComplexMatrix> {
        let n = self.structure.size();
        if probs.len() != self.data.len() {
            return Err(Error::Shape(format!(
                "{} probability rows for {} subgroups",
                probs.len(),
                self.data.len()
            )));
        }
        if probs.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(
                "every probability row must have N entries".into(),
            ));
        }
        let mut estimates: BTreeMap<(usize, usize), Vec<Complex64>> = BTreeMap::new();
        for (sub, row) in self.data.iter().zip(probs) {
            // The trace coefficient comes from the row sum of any subgroup.
            let sum: f64 = row.iter().sum();
            estimates
                .entry((0, 0))
                .or_default()
                .push(Complex64::new(sum, 0.0));
            for (w, &(j, i)) in sub.labels.iter().enumerate() {
                if (j, i) == (0, 0) {
                    continue;
                }
                let est: Complex64 = sub.eigenvalues[w]
                    .iter()
                    .zip(row)
                    .map(|(lam, &p)| lam.conj() * p)
                    .sum();
                estimates.entry((j, i)).or_default().push(est);
            }
        }
        let mut coeffs = vec![vec![linalg::ZERO; n]; n];
        for k in 0..n {
            for l in 0..n {
                let ests = estimates.get(&(k, l)).ok_or_else(|| {
                    Error::IncompleteData(format!("no subgroup measures label ({k}, {l})"))
                })?;
                let mut spread = 0.0_f64;
                for a in ests {
                    for b in ests {
                        spread = spread.max((a - b).norm());
                    }
                }
                if spread > spread_tol {
                    return Err(Error::InconsistentData(format!(
                        "label ({k}, {l}) measured with spread {spread:.3e} > {spread_tol:.3e}"
                    )));
                }
                let mean = ests.iter().copied().sum::<Complex64>() / ests.len() as f64;
                coeffs[k][l] = mean;
            }
        }
        reconstruct_from_coefficients(&self.structure, &coeffs)
    }

    pub fn degrees_of_freedom(&self) -> DofReport {
        let n = self.structure.size();
        let measured = self.data.len() * (n - 1);
        DofReport {
            dim: n,
            subgroup_count: self.data.len(),
            independent_coefficients: n * n - 1,
            measured_values: measured,
            excess: measured - (n * n - 1),
        }
    }
}

fn build_subgroup(
    s: &Arc<FiniteStructure>,
    sub: &OperatorSubgroup,
    seed: u64,
    tol: f64,
) -> Result<SubgroupData> {
    let n = s.size();
    let basis = weyl::joint_eigenbasis(s, sub, seed, tol)?;
    let w = basis.as_matrix();
    let wh = w.adjoint();
    let mut eigenvalues = Vec::with_capacity(sub.labels().len());
    for &(j, i) in sub.labels() {
        let d = wh.matmul(&weyl::v_op(s, j, i)?.matrix())?.matmul(&w)?;
        let mut diag = Vec::with_capacity(n);
        for a in 0..n {
            for b in 0..n {
                if a != b && d[(a, b)].norm() > tol.max(1e-8) {
                    return Err(Error::InconsistentData(format!(
                        "member ({j}, {i}) is not diagonal in its joint eigenbasis"
                    )));
                }
            }
            diag.push(d[(a, a)]);
        }
        eigenvalues.push(diag);
    }
    Ok(SubgroupData {
        labels: sub.labels().to_vec(),
        basis,
        eigenvalues,
    })
}
