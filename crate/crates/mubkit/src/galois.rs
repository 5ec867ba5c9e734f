//! Finite label arithmetic: the ring of integers mod N and Galois fields GF(p^m).
//!
//! Labels are always `0..N`. For GF(p^m) a label encodes the coefficients of a
//! polynomial over Z_p in base-p digits, least significant digit first, so label
//! p is the polynomial x. Multiplication reduces modulo the lexicographically
//! smallest monic irreducible polynomial of degree m. Both operations are
//! materialized as N×N lookup tables at construction time, which bounds the
//! supported size to N ≤ 256.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, MAX_DIM};

/// Which arithmetic a structure carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructureKind {
    /// Integers with addition and multiplication mod N.
    ModN,
    /// GF(p^m) with the reducing polynomial stored constant-term first
    /// (length m+1, leading coefficient 1).
    Galois {
        p: usize,
        m: usize,
        modulus: Vec<usize>,
    },
}

/// A finite commutative structure (ring or field) with materialized tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStructure {
    size: usize,
    kind: StructureKind,
    add: Vec<usize>,
    mul: Vec<usize>,
}

impl FiniteStructure {
    /// Integers mod n, n in 2..=256.
    pub fn ring_mod_n(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        if n > MAX_DIM {
            return Err(Error::TooLarge(n, MAX_DIM));
        }
        let mut add = vec![0usize; n * n];
        let mut mul = vec![0usize; n * n];
        for a in 0..n {
            for b in 0..n {
                add[a * n + b] = (a + b) % n;
                mul[a * n + b] = (a * b) % n;
            }
        }
        Ok(Self {
            size: n,
            kind: StructureKind::ModN,
            add,
            mul,
        })
    }

    /// GF(p^m) for prime p, m ≥ 1, p^m ≤ 256.
    pub fn galois_field(p: usize, m: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidCharacteristic(p));
        }
        if m == 0 {
            return Err(Error::InvalidDimension(1));
        }
        let mut size = 1usize;
        for _ in 0..m {
            size = size
                .checked_mul(p)
                .ok_or(Error::TooLarge(usize::MAX, MAX_DIM))?;
            if size > MAX_DIM {
                return Err(Error::TooLarge(size, MAX_DIM));
            }
        }
        let modulus = smallest_irreducible(p, m);
        let mut add = vec![0usize; size * size];
        let mut mul = vec![0usize; size * size];
        for a in 0..size {
            let da = to_digits(a, p, m);
            for b in 0..size {
                let db = to_digits(b, p, m);
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * size + b] = from_digits(&sum, p);
                let prod = poly_mul_mod(&da, &db, &modulus, p);
                mul[a * size + b] = from_digits(&prod, p);
            }
        }
        Ok(Self {
            size,
            kind: StructureKind::Galois { p, m, modulus },
            add,
            mul,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn kind(&self) -> &StructureKind {
        &self.kind
    }

    /// a ⊕ b.
    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.size + b]
    }

    /// a ⊙ b.
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.size + b]
    }

    /// Additive inverse ⊖a.
    pub fn neg(&self, a: usize) -> usize {
        (0..self.size)
            .find(|&b| self.add(a, b) == 0)
            .expect("every label has an additive inverse")
    }

    /// a ⊖ b.
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// Multiplicative inverse; errors for 0 and for non-units.
    pub fn inv(&self, a: usize) -> Result<usize> {
        (0..self.size)
            .find(|&b| self.mul(a, b) == 1)
            .ok_or(Error::NoInverse(a))
    }

    /// True when every nonzero label is a unit.
    pub fn is_field(&self) -> bool {
        (1..self.size).all(|a| self.inv(a).is_ok())
    }

    /// Order of the additive character: N for mod-n, p for GF(p^m).
    pub fn char_order(&self) -> usize {
        match &self.kind {
            StructureKind::ModN => self.size,
            StructureKind::Galois { p, .. } => *p,
        }
    }

    /// Character exponent of a label: the label itself for mod-n, the
    /// constant-term digit for GF(p^m).
    pub fn char_exponent(&self, x: usize) -> usize {
        match &self.kind {
            StructureKind::ModN => x,
            StructureKind::Galois { p, .. } => x % p,
        }
    }

    /// Base-p digit t of a label (0 beyond the degree); digit 0 for mod-n.
    pub fn digit(&self, x: usize, t: usize) -> usize {
        match &self.kind {
            StructureKind::ModN => {
                if t == 0 {
                    x
                } else {
                    0
                }
            }
            StructureKind::Galois { p, .. } => (x / p.pow(t as u32)) % p,
        }
    }

    /// The additive character γ_G evaluated on every label.
    pub fn character(&self) -> Character {
        let order = self.char_order();
        let values = (0..self.size)
            .map(|x| root_of_unity(self.char_exponent(x) as i64, order))
            .collect();
        Character { order, values }
    }

    /// Serializable table form.
    pub fn to_json(&self) -> StructureJson {
        let n = self.size;
        let nest = |t: &[usize]| (0..n).map(|a| t[a * n..(a + 1) * n].to_vec()).collect();
        let (kind, p, m, modulus) = match &self.kind {
            StructureKind::ModN => ("mod-n".to_string(), None, None, None),
            StructureKind::Galois { p, m, modulus } => (
                "galois".to_string(),
                Some(*p),
                Some(*m),
                Some(modulus.clone()),
            ),
        };
        StructureJson {
            size: n,
            kind,
            p,
            m,
            modulus,
            add: nest(&self.add),
            mul: nest(&self.mul),
        }
    }
}

/// e^{2πi·e/order}.
pub(crate) fn root_of_unity(e: i64, order: usize) -> Complex64 {
    let turn = (e.rem_euclid(order as i64)) as f64 / order as f64;
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * turn)
}

/// Additive character table: γ(x) = e^{2πi·x/N} for mod-n, e^{2πi·digit₀(x)/p}
/// for GF(p^m). Satisfies γ(a⊕b) = γ(a)·γ(b) and Σ_x γ(x⊙q) = N·δ_{q,0}.
#[derive(Debug, Clone)]
pub struct Character {
    order: usize,
    values: Vec<Complex64>,
}

impl Character {
    /// γ evaluated on a label.
    #[inline]
    pub fn value(&self, x: usize) -> Complex64 {
        self.values[x]
    }

    /// Order of the root of unity generating the image.
    pub fn order(&self) -> usize {
        self.order
    }
}

/// Brute-force verification of the ring/field axioms.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub additive_group: bool,
    pub additive_commutative: bool,
    pub multiplicative_commutative: bool,
    pub multiplicative_associative: bool,
    pub multiplicative_identity: bool,
    pub distributive: bool,
    pub zero_divisor_free: bool,
    pub multiplicative_inverses: bool,
    pub is_field: bool,
    /// A pair (a, b) of nonzero labels with a⊙b = 0, when one exists.
    pub zero_divisor_witness: Option<(usize, usize)>,
}

/// Checks every axiom exhaustively; reports flags instead of failing.
pub fn verify_axioms(s: &FiniteStructure) -> AxiomReport {
    let n = s.size();
    let labels = || 0..n;

    let closed = labels().all(|a| labels().all(|b| s.add(a, b) < n && s.mul(a, b) < n));
    let add_assoc = labels().all(|a| {
        labels().all(|b| labels().all(|c| s.add(s.add(a, b), c) == s.add(a, s.add(b, c))))
    });
    let add_identity = labels().all(|a| s.add(a, 0) == a && s.add(0, a) == a);
    let add_inverses = labels().all(|a| labels().any(|b| s.add(a, b) == 0));
    let additive_group = closed && add_assoc && add_identity && add_inverses;

    let additive_commutative = labels().all(|a| labels().all(|b| s.add(a, b) == s.add(b, a)));
    let multiplicative_commutative = labels().all(|a| labels().all(|b| s.mul(a, b) == s.mul(b, a)));
    let multiplicative_associative = labels().all(|a| {
        labels().all(|b| labels().all(|c| s.mul(s.mul(a, b), c) == s.mul(a, s.mul(b, c))))
    });
    let multiplicative_identity = labels().all(|a| s.mul(a, 1) == a && s.mul(1, a) == a);
    let distributive = labels().all(|a| {
        labels().all(|b| {
            labels().all(|c| {
                s.mul(a, s.add(b, c)) == s.add(s.mul(a, b), s.mul(a, c))
                    && s.mul(s.add(b, c), a) == s.add(s.mul(b, a), s.mul(c, a))
            })
        })
    });

    let mut zero_divisor_witness = None;
    'outer: for a in 1..n {
        for b in 1..n {
            if s.mul(a, b) == 0 {
                zero_divisor_witness = Some((a, b));
                break 'outer;
            }
        }
    }
    let zero_divisor_free = zero_divisor_witness.is_none();
    let multiplicative_inverses = (1..n).all(|a| s.inv(a).is_ok());

    let is_field = additive_group
        && additive_commutative
        && multiplicative_commutative
        && multiplicative_associative
        && multiplicative_identity
        && distributive
        && zero_divisor_free
        && multiplicative_inverses;

    AxiomReport {
        additive_group,
        additive_commutative,
        multiplicative_commutative,
        multiplicative_associative,
        multiplicative_identity,
        distributive,
        zero_divisor_free,
        multiplicative_inverses,
        is_field,
        zero_divisor_witness,
    }
}

/// JSON shape for a structure: tables nested row-major, polynomial fields null
/// for mod-n.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureJson {
    pub size: usize,
    pub kind: String,
    pub p: Option<usize>,
    pub m: Option<usize>,
    pub modulus: Option<Vec<usize>>,
    pub add: Vec<Vec<usize>>,
    pub mul: Vec<Vec<usize>>,
}

pub(crate) fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Factors n as p^m for prime p, when possible.
pub fn prime_power(n: usize) -> Option<(usize, usize)> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut m = 0;
            let mut rest = n;
            while rest.is_multiple_of(p) {
                rest /= p;
                m += 1;
            }
            return if rest == 1 { Some((p, m)) } else { None };
        }
        p += 1;
    }
    Some((n, 1))
}

fn to_digits(x: usize, p: usize, m: usize) -> Vec<usize> {
    let mut digits = vec![0usize; m];
    let mut rest = x;
    for d in digits.iter_mut() {
        *d = rest % p;
        rest /= p;
    }
    digits
}

fn from_digits(digits: &[usize], p: usize) -> usize {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Remainder of a by b over Z_p; coefficients constant-term first.
fn poly_rem(a: &[usize], b: &[usize], p: usize) -> Vec<usize> {
    let mut r: Vec<usize> = a.to_vec();
    let db = poly_degree(b);
    let lead_inv = mod_inverse(b[db], p);
    while poly_degree(&r) >= db && !poly_is_zero(&r) {
        let dr = poly_degree(&r);
        let factor = (r[dr] * lead_inv) % p;
        let shift = dr - db;
        for (i, &bc) in b.iter().enumerate().take(db + 1) {
            let sub = (factor * bc) % p;
            r[i + shift] = (r[i + shift] + p - sub) % p;
        }
    }
    r
}

fn poly_degree(a: &[usize]) -> usize {
    a.iter().rposition(|&c| c != 0).unwrap_or(0)
}

fn poly_is_zero(a: &[usize]) -> bool {
    a.iter().all(|&c| c == 0)
}

fn mod_inverse(a: usize, p: usize) -> usize {
    (1..p).find(|&b| (a * b) % p == 1).expect("unit in Z_p")
}

/// (a·b) mod modulus over Z_p, truncated to m coefficients.
fn poly_mul_mod(a: &[usize], b: &[usize], modulus: &[usize], p: usize) -> Vec<usize> {
    let m = a.len();
    let mut prod = vec![0usize; 2 * m];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    let rem = poly_rem(&prod, modulus, p);
    rem[..m].to_vec()
}

/// Lexicographically smallest monic irreducible polynomial of degree m over
/// Z_p, scanning constant-term-first digit vectors in ascending order and
/// testing divisibility by every lower-degree monic polynomial.
fn smallest_irreducible(p: usize, m: usize) -> Vec<usize> {
    for t in 0..p.pow(m as u32) {
        let mut candidate = to_digits(t, p, m);
        candidate.push(1);
        if is_irreducible(&candidate, p) {
            return candidate;
        }
    }
    unreachable!("irreducible polynomials exist for every degree")
}

fn is_irreducible(poly: &[usize], p: usize) -> bool {
    let deg = poly_degree(poly);
    for d in 1..deg {
        // All monic divisor candidates of degree d.
        for t in 0..p.pow(d as u32) {
            let mut divisor = to_digits(t, p, d);
            divisor.push(1);
            if poly_is_zero(&poly_rem(poly, &divisor, p)) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    // GF(4) multiplication and addition with labels 0,1,x,x+1 ↦ 0,1,2,3.
    const GF4_MUL: [[usize; 4]; 4] = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];
    const GF4_ADD: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];
    // Integers mod 4.
    const MOD4_MUL: [[usize; 4]; 4] = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 0, 2], [0, 3, 2, 1]];
    const MOD4_ADD: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 2, 3, 0], [2, 3, 0, 1], [3, 0, 1, 2]];

    #[test]
    fn gf4_tables_match_expected() {
        let s = FiniteStructure::galois_field(2, 2).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(s.mul(a, b), GF4_MUL[a][b], "mul {a} {b}");
                assert_eq!(s.add(a, b), GF4_ADD[a][b], "add {a} {b}");
            }
        }
        match s.kind() {
            StructureKind::Galois { p, m, modulus } => {
                assert_eq!((*p, *m), (2, 2));
                // x² + x + 1.
                assert_eq!(modulus, &vec![1, 1, 1]);
            }
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn mod4_tables_match_expected() {
        let s = FiniteStructure::ring_mod_n(4).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(s.mul(a, b), MOD4_MUL[a][b]);
                assert_eq!(s.add(a, b), MOD4_ADD[a][b]);
            }
        }
    }

    #[test]
    fn reducing_polynomials_are_the_smallest_irreducible() {
        let gf8 = FiniteStructure::galois_field(2, 3).unwrap();
        match gf8.kind() {
            // x³ + x + 1.
            StructureKind::Galois { modulus, .. } => assert_eq!(modulus, &vec![1, 1, 0, 1]),
            _ => panic!(),
        }
        let gf9 = FiniteStructure::galois_field(3, 2).unwrap();
        match gf9.kind() {
            // x² + 1.
            StructureKind::Galois { modulus, .. } => assert_eq!(modulus, &vec![1, 0, 1]),
            _ => panic!(),
        }
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(matches!(
            FiniteStructure::ring_mod_n(0),
            Err(Error::InvalidDimension(0))
        ));
        assert!(matches!(
            FiniteStructure::ring_mod_n(1),
            Err(Error::InvalidDimension(1))
        ));
        assert!(matches!(
            FiniteStructure::ring_mod_n(257),
            Err(Error::TooLarge(257, _))
        ));
        assert!(matches!(
            FiniteStructure::galois_field(4, 1),
            Err(Error::InvalidCharacteristic(4))
        ));
        assert!(matches!(
            FiniteStructure::galois_field(2, 0),
            Err(Error::InvalidDimension(1))
        ));
        assert!(matches!(
            FiniteStructure::galois_field(2, 9),
            Err(Error::TooLarge(512, _))
        ));
        assert!(FiniteStructure::galois_field(2, 8).is_ok());
    }

    #[test]
    fn negation_and_inverses() {
        let mod4 = FiniteStructure::ring_mod_n(4).unwrap();
        assert_eq!(mod4.neg(3), 1);
        assert_eq!(mod4.sub(1, 3), 2);
        assert!(matches!(mod4.inv(2), Err(Error::NoInverse(2))));
        assert!(matches!(mod4.inv(0), Err(Error::NoInverse(0))));
        assert_eq!(mod4.inv(3).unwrap(), 3);

        let gf4 = FiniteStructure::galois_field(2, 2).unwrap();
        // Characteristic 2: every element is its own additive inverse.
        for a in 0..4 {
            assert_eq!(gf4.neg(a), a);
        }
        assert_eq!(gf4.inv(2).unwrap(), 3);
    }

    #[test]
    fn mod_n_is_a_field_exactly_for_primes() {
        for n in 2..=20 {
            let s = FiniteStructure::ring_mod_n(n).unwrap();
            let report = verify_axioms(&s);
            assert_eq!(report.is_field, is_prime(n), "N = {n}");
            assert!(report.additive_group && report.distributive);
            assert_eq!(s.is_field(), is_prime(n));
            if !is_prime(n) {
                assert!(report.zero_divisor_witness.is_some());
            }
        }
    }

    #[test]
    fn galois_fields_pass_all_axioms() {
        for (p, m) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1)] {
            let s = FiniteStructure::galois_field(p, m).unwrap();
            let report = verify_axioms(&s);
            assert!(report.is_field, "GF({p}^{m})");
        }
    }

    #[test]
    fn character_values_match_expected() {
        let mod4 = FiniteStructure::ring_mod_n(4).unwrap();
        let chi = mod4.character();
        assert!((chi.value(1) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let gf4 = FiniteStructure::galois_field(2, 2).unwrap();
        let chi = gf4.character();
        assert!((chi.value(2) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((chi.value(3) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    fn all_test_structures(max: usize) -> Vec<FiniteStructure> {
        let mut out = Vec::new();
        for n in 2..=max {
            out.push(FiniteStructure::ring_mod_n(n).unwrap());
        }
        for p in 2..=max {
            if !is_prime(p) {
                continue;
            }
            let mut m = 1u32;
            while p.pow(m) <= max {
                out.push(FiniteStructure::galois_field(p, m as usize).unwrap());
                m += 1;
            }
        }
        out
    }

    #[test]
    fn character_homomorphism_and_delta_sum() {
        for s in all_test_structures(64) {
            let n = s.size();
            let chi = s.character();
            for a in 0..n {
                for b in 0..n {
                    let lhs = chi.value(s.add(a, b));
                    let rhs = chi.value(a) * chi.value(b);
                    assert!((lhs - rhs).norm() < 1e-12, "homomorphism at N={n}");
                }
            }
            for q in 0..n {
                let sum: Complex64 = (0..n).map(|x| chi.value(s.mul(x, q))).sum();
                let expected = if q == 0 { n as f64 } else { 0.0 };
                assert!(
                    (sum - Complex64::new(expected, 0.0)).norm() < 1e-10,
                    "delta sum at N={n}, q={q}"
                );
            }
        }
    }

    #[test]
    fn prime_power_factorization() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn structure_json_round_trips_shape() {
        let s = FiniteStructure::galois_field(2, 2).unwrap();
        let json = s.to_json();
        assert_eq!(json.size, 4);
        assert_eq!(json.kind, "galois");
        assert_eq!(json.modulus, Some(vec![1, 1, 1]));
        assert_eq!(json.add[1][2], 3);
        let text = serde_json::to_string(&json).unwrap();
        let back: StructureJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.mul, json.mul);

        let modn = FiniteStructure::ring_mod_n(5).unwrap().to_json();
        assert_eq!(modn.kind, "mod-n");
        assert!(modn.p.is_none() && modn.modulus.is_none());
    }
}
