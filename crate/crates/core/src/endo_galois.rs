//! Endomorphism algebras with a finite Galois action, and Frobenius class
//! labels for multi-quadratic splitting fields.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{is_squarefree, legendre, squarefree_part};
use crate::linalg::{algebra_closure, Echelon, Rational, RationalMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GaloisError {
    #[error("generator {index} is {rows}x{cols}, expected {n}x{n}")]
    GeneratorShape {
        index: usize,
        rows: usize,
        cols: usize,
        n: usize,
    },
    #[error("invalid field descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("multiplication table is not a group: {0}")]
    NotAGroup(String),
    #[error("expected {expected} action matrices, got {got}")]
    ActionCount { expected: usize, got: usize },
    #[error("action of `{label}` is {rows}x{cols}, but the algebra basis has {basis} elements")]
    DimensionMismatch {
        label: String,
        rows: usize,
        cols: usize,
        basis: usize,
    },
    #[error("prime {0} is ramified in the splitting field or even")]
    RamifiedPrime(u64),
    #[error("group has no field descriptor, Frobenius classes cannot be labeled")]
    Unlabelable,
    #[error("unknown group element `{0}`")]
    UnknownElement(String),
    #[error("matrix does not lie in the endomorphism algebra")]
    NotInAlgebra,
}

/// A finite-dimensional subalgebra `D ⊂ M_n(Q)` with its structure constants.
#[derive(Clone, Debug)]
pub struct EndAlgebra {
    n: usize,
    basis: Vec<RationalMatrix>,
    structure: Vec<Vec<Vec<Rational>>>,
    echelon: Echelon,
}

impl EndAlgebra {
    /// The unital algebra generated by `generators` (see [`algebra_closure`]
    /// for the basis order; `basis()[0]` is always the identity).
    pub fn from_generators(n: usize, generators: &[RationalMatrix]) -> Result<Self, GaloisError> {
        for (index, g) in generators.iter().enumerate() {
            if g.rows() != n || g.cols() != n {
                return Err(GaloisError::GeneratorShape {
                    index,
                    rows: g.rows(),
                    cols: g.cols(),
                    n,
                });
            }
        }
        Ok(Self::from_basis(n, algebra_closure(generators, n)))
    }

    /// `Q · Id`.
    pub fn scalars(n: usize) -> Self {
        Self::from_basis(n, vec![RationalMatrix::identity(n)])
    }

    fn from_basis(n: usize, basis: Vec<RationalMatrix>) -> Self {
        let mut echelon = Echelon::new(n * n);
        for b in &basis {
            let fresh = echelon.insert(b.as_flat());
            debug_assert!(fresh);
        }
        let structure = basis
            .iter()
            .map(|bi| {
                basis
                    .iter()
                    .map(|bj| {
                        echelon
                            .coordinates((bi * bj).as_flat())
                            .expect("closure is multiplicatively closed")
                    })
                    .collect()
            })
            .collect();
        Self {
            n,
            basis,
            structure,
            echelon,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[RationalMatrix] {
        &self.basis
    }

    /// `c[i][j][k]` with `b_i b_j = Σ_k c[i][j][k] b_k`.
    pub fn structure_constants(&self) -> &[Vec<Vec<Rational>>] {
        &self.structure
    }

    pub fn coordinates(&self, m: &RationalMatrix) -> Option<Vec<Rational>> {
        if m.rows() != self.n || m.cols() != self.n {
            return None;
        }
        self.echelon.coordinates(m.as_flat())
    }

    pub fn combine(&self, coords: &[Rational]) -> RationalMatrix {
        assert_eq!(coords.len(), self.basis.len());
        let mut acc = RationalMatrix::zeros(self.n, self.n);
        for (c, b) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                acc = &acc + &b.scale(c);
            }
        }
        acc
    }
}

/// `Gal(K_e/K)` together with its action on an algebra basis.
///
/// Element 0 is always the identity. With a field descriptor
/// `[d_1, …, d_r]` the group is `(Z/2)^r` and element `m` is the bitmask
/// whose bit `i` says whether `√d_{i+1}` is moved.
#[derive(Clone, Debug)]
pub struct GaloisTwistGroup {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    descriptor: Option<Vec<i64>>,
    actions: Vec<RationalMatrix>,
}

fn mask_label(mask: usize) -> String {
    if mask == 0 {
        return "id".to_string();
    }
    (0..usize::BITS as usize)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| format!("s{}", b + 1))
        .collect()
}

impl GaloisTwistGroup {
    /// The trivial group acting trivially on an algebra with `basis_len` basis elements.
    pub fn trivial(basis_len: usize) -> Self {
        Self {
            labels: vec!["id".to_string()],
            table: vec![vec![0]],
            descriptor: Some(Vec::new()),
            actions: vec![RationalMatrix::identity(basis_len)],
        }
    }

    /// `Gal(Q(√d_1, …, √d_r)/Q) ≅ (Z/2)^r`, with one action matrix per bitmask.
    pub fn multi_quadratic(discs: &[i64], actions: Vec<RationalMatrix>) -> Result<Self, GaloisError> {
        for &d in discs {
            if !is_squarefree(d) || d == 1 {
                return Err(GaloisError::InvalidDescriptor(format!(
                    "{d} is not a squarefree integer other than 0 and 1"
                )));
            }
        }
        let r = discs.len();
        if r > 16 {
            return Err(GaloisError::InvalidDescriptor("too many square roots".into()));
        }
        let order = 1usize << r;
        // the √d_i must be independent modulo squares
        for subset in 1..order {
            let prod = (0..r)
                .filter(|i| subset >> i & 1 == 1)
                .fold(1i64, |acc, i| squarefree_part(acc * discs[i]));
            if prod == 1 {
                return Err(GaloisError::InvalidDescriptor(format!(
                    "discriminants {discs:?} are dependent modulo squares"
                )));
            }
        }
        if actions.len() != order {
            return Err(GaloisError::ActionCount {
                expected: order,
                got: actions.len(),
            });
        }
        let table = (0..order).map(|a| (0..order).map(|b| a ^ b).collect()).collect();
        Ok(Self {
            labels: (0..order).map(mask_label).collect(),
            table,
            descriptor: Some(discs.to_vec()),
            actions,
        })
    }

    /// A group given only by its multiplication table (no prime labeling).
    pub fn from_table(
        labels: Vec<String>,
        table: Vec<Vec<usize>>,
        actions: Vec<RationalMatrix>,
    ) -> Result<Self, GaloisError> {
        let order = labels.len();
        if order == 0 {
            return Err(GaloisError::NotAGroup("empty group".into()));
        }
        if table.len() != order || table.iter().any(|row| row.len() != order) {
            return Err(GaloisError::NotAGroup("table shape does not match labels".into()));
        }
        if table.iter().flatten().any(|&x| x >= order) {
            return Err(GaloisError::NotAGroup("entry out of range".into()));
        }
        for a in 0..order {
            if table[0][a] != a || table[a][0] != a {
                return Err(GaloisError::NotAGroup("element 0 is not the identity".into()));
            }
            if !(0..order).any(|b| table[a][b] == 0 && table[b][a] == 0) {
                return Err(GaloisError::NotAGroup(format!("`{}` has no inverse", labels[a])));
            }
            for b in 0..order {
                for c in 0..order {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(GaloisError::NotAGroup("not associative".into()));
                    }
                }
            }
        }
        if actions.len() != order {
            return Err(GaloisError::ActionCount {
                expected: order,
                got: actions.len(),
            });
        }
        Ok(Self {
            labels,
            table,
            descriptor: None,
            actions,
        })
    }

    /// Same group structure, different action (used for derived algebras).
    pub fn with_actions(&self, actions: Vec<RationalMatrix>) -> Self {
        assert_eq!(actions.len(), self.order());
        Self {
            actions,
            ..self.clone()
        }
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, element: usize) -> &str {
        &self.labels[element]
    }

    pub fn element(&self, label: &str) -> Result<usize, GaloisError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| GaloisError::UnknownElement(label.to_string()))
    }

    pub fn multiply(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order())
            .find(|&b| self.table[a][b] == 0)
            .expect("validated group")
    }

    pub fn descriptor(&self) -> Option<&[i64]> {
        self.descriptor.as_deref()
    }

    pub fn is_same_group(&self, other: &GaloisTwistGroup) -> bool {
        self.table == other.table && self.descriptor == other.descriptor
    }

    /// Action matrix of `element` on algebra-basis coordinates (column convention).
    pub fn action(&self, element: usize) -> &RationalMatrix {
        &self.actions[element]
    }

    pub fn actions(&self) -> &[RationalMatrix] {
        &self.actions
    }

    /// `ρ_e(τ)(β)` for `β ∈ D`.
    pub fn apply(&self, algebra: &EndAlgebra, tau: usize, beta: &RationalMatrix) -> Result<RationalMatrix, GaloisError> {
        let coords = algebra.coordinates(beta).ok_or(GaloisError::NotInAlgebra)?;
        Ok(algebra.combine(&self.actions[tau].mul_vec(&coords)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionIssue {
    IdentityActsNontrivially,
    NotInvertible { element: String },
    UnitNotFixed { element: String },
    NotAutomorphism { element: String, i: usize, j: usize },
    NotHomomorphism { a: String, b: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<ActionIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks that `G` acts on `D` by algebra automorphisms, homomorphically.
pub fn validate_action(algebra: &EndAlgebra, group: &GaloisTwistGroup) -> Result<ValidationReport, GaloisError> {
    let m = algebra.dim();
    for (e, a) in group.actions.iter().enumerate() {
        if a.rows() != m || a.cols() != m {
            return Err(GaloisError::DimensionMismatch {
                label: group.label(e).to_string(),
                rows: a.rows(),
                cols: a.cols(),
                basis: m,
            });
        }
    }
    let mut report = ValidationReport::default();
    if !group.action(group.identity()).is_identity() {
        report.issues.push(ActionIssue::IdentityActsNontrivially);
    }
    let structure = algebra.structure_constants();
    for (e, a) in group.actions.iter().enumerate() {
        let element = group.label(e).to_string();
        if a.rank() < m {
            report.issues.push(ActionIssue::NotInvertible { element: element.clone() });
        }
        // basis[0] is the unit
        let unit_fixed = (0..m).all(|k| if k == 0 { a.get(k, 0).is_one() } else { a.get(k, 0).is_zero() });
        if !unit_fixed {
            report.issues.push(ActionIssue::UnitNotFixed { element: element.clone() });
        }
        let images: Vec<RationalMatrix> = (0..m)
            .map(|i| algebra.combine(&(0..m).map(|k| a.get(k, i).clone()).collect::<Vec<_>>()))
            .collect();
        'pairs: for i in 0..m {
            for j in 0..m {
                let lhs = &images[i] * &images[j];
                let mut rhs = RationalMatrix::zeros(algebra.n(), algebra.n());
                for (k, c) in structure[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        rhs = &rhs + &images[k].scale(c);
                    }
                }
                if lhs != rhs {
                    report.issues.push(ActionIssue::NotAutomorphism { element: element.clone(), i, j });
                    break 'pairs;
                }
            }
        }
    }
    for a in 0..group.order() {
        for b in 0..group.order() {
            let ab = group.multiply(a, b);
            if *group.action(ab) != group.action(a) * group.action(b) {
                report.issues.push(ActionIssue::NotHomomorphism {
                    a: group.label(a).to_string(),
                    b: group.label(b).to_string(),
                });
            }
        }
    }
    Ok(report)
}

/// Frobenius class of an odd unramified prime, read off the Kronecker
/// symbols `(d_i / p)`.
pub fn frobenius_class(p: u64, group: &GaloisTwistGroup) -> Result<usize, GaloisError> {
    let discs = group.descriptor().ok_or(GaloisError::Unlabelable)?;
    if p % 2 == 0 || discs.iter().any(|&d| d.rem_euclid(p as i64) == 0) {
        return Err(GaloisError::RamifiedPrime(p));
    }
    Ok(discs
        .iter()
        .enumerate()
        .filter(|(_, &d)| legendre(d, p) == -1)
        .fold(0usize, |mask, (i, _)| mask | 1 << i))
}

/// The usual Q(i) example: `D = Q[J]` with `J = [[0,-1],[1,0]]` on the
/// standard symplectic plane, and complex conjugation acting by `J ↦ -J`.
pub fn gaussian_example() -> (EndAlgebra, GaloisTwistGroup) {
    let j = RationalMatrix::from_i64(&[&[0, -1], &[1, 0]]);
    let algebra = EndAlgebra::from_generators(2, &[j]).expect("2x2 generator");
    let conj = RationalMatrix::from_i64(&[&[1, 0], &[0, -1]]);
    let group = GaloisTwistGroup::multi_quadratic(&[-1], vec![RationalMatrix::identity(2), conj])
        .expect("valid descriptor");
    (algebra, group)
}
