//! Coordinate charts on jet prolongations.
//!
//! A [`JetSpec`] fixes a single chart: base variables `x^i`, field slots
//! `y^σ`, a maximum problem order, named scalar parameters and opaque atoms.
//! Jet coordinates `y^σ_J` are indexed by sorted multi-indices and treated as
//! independent coordinates; `∂y^σ_J / ∂y^ν_K = δ_σν δ_JK` with no
//! multiplicity factors.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::AtomDecl;

/// Errors raised while constructing a [`JetSpec`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("a jet spec needs at least one base variable")]
    NoBaseVars,
    #[error("a jet spec needs at least one field")]
    NoFields,
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("field family `{0}` has zero components")]
    EmptyFamily(String),
}

/// A sorted multiset of base-variable indices (0-based).
///
/// Equality is multiset equality; the ordering is graded (shorter first),
/// then lexicographic, so lower-order coordinates sort before higher ones.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn new(mut indices: Vec<u8>) -> Self {
        indices.sort_unstable();
        MultiIndex(indices)
    }

    pub fn single(i: usize) -> Self {
        MultiIndex(vec![i as u8])
    }

    /// The multiset J ∪ {i}, still sorted.
    pub fn with(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        let pos = v.partition_point(|&x| x <= i as u8);
        v.insert(pos, i as u8);
        MultiIndex(v)
    }

    /// The multiset union J ∪ K.
    pub fn union(&self, other: &MultiIndex) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        MultiIndex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[u8] {
        &self.0
    }

    /// Multiplicity of base index `i` in the multiset.
    pub fn multiplicity(&self, i: usize) -> usize {
        self.0.iter().filter(|&&x| x as usize == i).count()
    }

    /// Product over base indices of `mult!` — the symmetry factor of the
    /// coordinate (used when matching jets of polynomial sections).
    pub fn mult_factorial(&self) -> u64 {
        let mut total = 1u64;
        let mut run = 1u64;
        for w in self.0.windows(2) {
            if w[0] == w[1] {
                run += 1;
                total *= run;
            } else {
                run = 1;
            }
        }
        total
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J{:?}", self.0)
    }
}

/// The multiset binomial `∏_a C(mult_{J∪I}(a), mult_J(a))`.
///
/// This is the coefficient with which `d_I ∂ε/∂y_{J∪I}` enters the
/// Helmholtz expression in the sorted-multi-index convention; for a single
/// base variable it reduces to the ordinary binomial C(|J|+|I|, |J|).
pub fn multiset_binomial(j: &MultiIndex, i: &MultiIndex) -> u64 {
    let mut result = 1u64;
    let mut all: Vec<u8> = j.indices().to_vec();
    all.extend_from_slice(i.indices());
    all.sort_unstable();
    all.dedup();
    for &a in &all {
        let mj = j.multiplicity(a as usize) as u64;
        let mi = i.multiplicity(a as usize) as u64;
        result *= binomial(mj + mi, mj);
    }
    result
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for j in 0..k {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

/// All sorted multisets of size `len` over base indices `0..n`, in the
/// canonical (lexicographic) order.
pub fn multisets(n: usize, len: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(len);
    fn rec(n: usize, len: usize, start: usize, current: &mut Vec<u8>, out: &mut Vec<MultiIndex>) {
        if current.len() == len {
            out.push(MultiIndex(current.clone()));
            return;
        }
        for i in start..n {
            current.push(i as u8);
            rec(n, len, i, current, out);
            current.pop();
        }
    }
    rec(n, len, 0, &mut current, &mut out);
    out
}

/// A single jet coordinate: a base variable `x^i` or a field coordinate
/// `y^σ_J` (σ is a flat field-slot index).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JetVar {
    Base(usize),
    Field { slot: usize, index: MultiIndex },
}

impl JetVar {
    pub fn field(slot: usize, index: MultiIndex) -> Self {
        JetVar::Field { slot, index }
    }

    /// Jet order of the coordinate: 0 for base variables and plain fields.
    pub fn order(&self) -> usize {
        match self {
            JetVar::Base(_) => 0,
            JetVar::Field { index, .. } => index.len(),
        }
    }
}

impl fmt::Debug for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JetVar::Base(i) => write!(f, "x{}", i),
            JetVar::Field { slot, index } => write!(f, "y{}_{:?}", slot, index.0),
        }
    }
}

/// A named family of field components, e.g. `q` with 2 components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldFamily {
    pub name: String,
    pub components: usize,
}

/// A named scalar parameter, possibly carrying indices.
///
/// `symmetric` parameters are canonicalized by sorting their indices, which
/// is how declarations like `m_{σν} = m_{νσ}` enter canonical forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamDecl {
    pub name: String,
    pub arity: usize,
    pub symmetric: bool,
}

impl ParamDecl {
    pub fn scalar(name: &str) -> Self {
        ParamDecl { name: name.into(), arity: 0, symmetric: false }
    }

    pub fn symmetric(name: &str, arity: usize) -> Self {
        ParamDecl { name: name.into(), arity, symmetric: true }
    }
}

/// The coordinate chart: base variables, field slots, problem order,
/// parameters and atoms.
#[derive(Debug, Clone)]
pub struct JetSpec {
    base_names: Vec<String>,
    families: Vec<FieldFamily>,
    /// slot -> (family, component within family)
    slots: Vec<(usize, usize)>,
    max_order: usize,
    params: Vec<ParamDecl>,
    atoms: Vec<AtomDecl>,
}

pub type SpecRef = Arc<JetSpec>;

impl JetSpec {
    pub fn new(
        base_names: Vec<String>,
        families: Vec<FieldFamily>,
        max_order: usize,
        params: Vec<ParamDecl>,
        atoms: Vec<AtomDecl>,
    ) -> Result<SpecRef, SpecError> {
        if base_names.is_empty() {
            return Err(SpecError::NoBaseVars);
        }
        if families.is_empty() {
            return Err(SpecError::NoFields);
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in base_names
            .iter()
            .chain(families.iter().map(|f| &f.name))
            .chain(params.iter().map(|p| &p.name))
            .chain(atoms.iter().map(|a| &a.name))
        {
            if !seen.insert(name.clone()) {
                return Err(SpecError::DuplicateName(name.clone()));
            }
        }
        let mut slots = Vec::new();
        for (fi, fam) in families.iter().enumerate() {
            if fam.components == 0 {
                return Err(SpecError::EmptyFamily(fam.name.clone()));
            }
            for c in 0..fam.components {
                slots.push((fi, c));
            }
        }
        Ok(Arc::new(JetSpec { base_names, families, slots, max_order, params, atoms }))
    }

    /// Convenience chart for mechanics-style problems: one base variable and
    /// a single field family.
    pub fn mechanics(
        base: &str,
        field: &str,
        components: usize,
        max_order: usize,
        params: Vec<ParamDecl>,
    ) -> Result<SpecRef, SpecError> {
        JetSpec::new(
            vec![base.into()],
            vec![FieldFamily { name: field.into(), components }],
            max_order,
            params,
            Vec::new(),
        )
    }

    pub fn base_dim(&self) -> usize {
        self.base_names.len()
    }

    pub fn base_names(&self) -> &[String] {
        &self.base_names
    }

    pub fn base_index(&self, name: &str) -> Option<usize> {
        self.base_names.iter().position(|b| b == name)
    }

    /// Total number of field slots `m`.
    pub fn field_count(&self) -> usize {
        self.slots.len()
    }

    pub fn families(&self) -> &[FieldFamily] {
        &self.families
    }

    pub fn family_index(&self, name: &str) -> Option<usize> {
        self.families.iter().position(|f| f.name == name)
    }

    /// Flat slot index of component `comp` (0-based) of family `family`.
    pub fn slot_of(&self, family: usize, comp: usize) -> usize {
        self.slots
            .iter()
            .position(|&(f, c)| f == family && c == comp)
            .expect("component within declared family")
    }

    pub fn slot_family(&self, slot: usize) -> (usize, usize) {
        self.slots[slot]
    }

    /// Display name of a slot: `q` for single-component families, `q[2]`
    /// (1-based component) otherwise.
    pub fn slot_name(&self, slot: usize) -> String {
        let (fi, c) = self.slots[slot];
        let fam = &self.families[fi];
        if fam.components == 1 {
            fam.name.clone()
        } else {
            format!("{}[{}]", fam.name, c + 1)
        }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn params(&self) -> &[ParamDecl] {
        &self.params
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == name)
    }

    pub fn atoms(&self) -> &[AtomDecl] {
        &self.atoms
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a.name == name)
    }

    /// All canonical jet coordinates up to `order`: base variables first,
    /// then field coordinates grouped by slot, graded by derivative order.
    pub fn coordinates(&self, order: usize) -> Vec<JetVar> {
        let n = self.base_dim();
        let mut vars: Vec<JetVar> = (0..n).map(JetVar::Base).collect();
        for k in 0..=order {
            for idx in multisets(n, k) {
                for slot in 0..self.field_count() {
                    vars.push(JetVar::field(slot, idx.clone()));
                }
            }
        }
        vars
    }

    /// The set of all field slots, for full-homothety operations.
    pub fn all_fields(&self) -> Vec<usize> {
        (0..self.field_count()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_index_is_sorted_multiset() {
        let a = MultiIndex::new(vec![2, 0, 1, 0]);
        let b = MultiIndex::new(vec![0, 0, 1, 2]);
        assert_eq!(a, b);
        assert_eq!(a.indices(), &[0, 0, 1, 2]);
        assert_eq!(a.multiplicity(0), 2);
        assert_eq!(a.with(0).indices(), &[0, 0, 0, 1, 2]);
    }

    #[test]
    fn graded_ordering() {
        let lower = MultiIndex::new(vec![1]);
        let higher = MultiIndex::new(vec![0, 0]);
        assert!(lower < higher);
    }

    #[test]
    fn multiset_binomial_reduces_to_binomial_for_one_base_var() {
        // |J| = 1, |I| = 1 over a single base variable: C(2, 1) = 2.
        let j = MultiIndex::new(vec![0]);
        let i = MultiIndex::new(vec![0]);
        assert_eq!(multiset_binomial(&j, &i), 2);
        // distinct indices carry no multiplicity: C(1,1)·C(1,0) = 1
        let i2 = MultiIndex::new(vec![1]);
        assert_eq!(multiset_binomial(&j, &i2), 1);
    }

    #[test]
    fn multisets_enumeration() {
        assert_eq!(multisets(2, 2).len(), 3); // (00), (01), (11)
        assert_eq!(multisets(4, 2).len(), 10);
        assert_eq!(multisets(1, 3), vec![MultiIndex::new(vec![0, 0, 0])]);
    }

    #[test]
    fn mult_factorial() {
        assert_eq!(MultiIndex::new(vec![0, 0, 0]).mult_factorial(), 6);
        assert_eq!(MultiIndex::new(vec![0, 1]).mult_factorial(), 1);
        assert_eq!(MultiIndex::new(vec![0, 0, 1, 1]).mult_factorial(), 4);
    }

    #[test]
    fn rejects_degenerate_specs() {
        assert!(matches!(
            JetSpec::new(vec![], vec![FieldFamily { name: "q".into(), components: 1 }], 1, vec![], vec![]),
            Err(SpecError::NoBaseVars)
        ));
        assert!(matches!(
            JetSpec::new(vec!["t".into()], vec![], 1, vec![], vec![]),
            Err(SpecError::NoFields)
        ));
        assert!(matches!(
            JetSpec::mechanics("t", "t", 1, 1, vec![]),
            Err(SpecError::DuplicateName(_))
        ));
    }

    #[test]
    fn slot_layout() {
        let spec = JetSpec::mechanics("t", "q", 2, 2, vec![]).unwrap();
        assert_eq!(spec.field_count(), 2);
        assert_eq!(spec.slot_name(1), "q[2]");
        assert_eq!(spec.slot_of(0, 1), 1);
        // base + 2 slots x (1 + 1 + 1) orders over n=1
        assert_eq!(spec.coordinates(2).len(), 1 + 2 * 3);
    }
}
