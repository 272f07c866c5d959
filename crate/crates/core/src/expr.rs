//! Immutable symbolic expressions over jet coordinates.
//!
//! An [`Expr`] is kept in canonical form at all times: a sum of monomials
//! with merged rational coefficients, factors flattened, sorted and
//! exponent-merged, zero coefficients dropped. Structural equality on
//! canonical forms therefore decides expression equality on the polynomial
//! fragment. Coefficients are exact rationals; no floating point enters the
//! symbolic layer.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num::{BigInt, BigRational, One, Zero};
use thiserror::Error;

use crate::jet::{JetSpec, JetVar, MultiIndex};
use crate::numjet::{JetPoint, NumError};

pub type Rat = BigRational;

/// Shorthand for small rational constants.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("atom `{atom}` has no derivative rule for a coordinate it depends on")]
    MissingDerivativeRule { atom: String },
    #[error("total derivative would exceed jet order {cap}")]
    OrderOverflow { cap: usize },
    #[error("atom `{atom}` depends on scaled fields but declares no homothety weight")]
    UnknownWeight { atom: String },
}

/// Numeric evaluator contract of an atom: reads the jet point, returns a value.
pub type AtomEval = Arc<dyn Fn(&JetPoint) -> Result<f64, NumError> + Send + Sync>;

/// An opaque symbol with declared jet-coordinate dependencies.
///
/// Atoms carry an optional homothety weight (behavior under the fiber
/// scaling χ_u when the fields they read are scaled), optional symbolic
/// derivative rules, and an optional numeric evaluator. An atom without a
/// derivative rule can still be evaluated numerically but blocks symbolic
/// differentiation with respect to its dependencies.
#[derive(Clone)]
pub struct AtomDecl {
    pub name: String,
    pub deps: Vec<JetVar>,
    pub weight: Option<Rat>,
    pub rules: Vec<(JetVar, Expr)>,
    pub evaluator: Option<AtomEval>,
}

impl AtomDecl {
    pub fn new(name: &str, deps: Vec<JetVar>) -> Self {
        AtomDecl { name: name.into(), deps, weight: None, rules: Vec::new(), evaluator: None }
    }

    pub fn with_weight(mut self, w: Rat) -> Self {
        self.weight = Some(w);
        self
    }

    pub fn with_rule(mut self, v: JetVar, rule: Expr) -> Self {
        self.rules.push((v, rule));
        self
    }

    pub fn with_evaluator(mut self, f: AtomEval) -> Self {
        self.evaluator = Some(f);
        self
    }

    pub fn depends_on(&self, v: &JetVar) -> bool {
        self.deps.contains(v)
    }

    pub fn rule_for(&self, v: &JetVar) -> Option<&Expr> {
        self.rules.iter().find(|(rv, _)| rv == v).map(|(_, e)| e)
    }
}

impl fmt::Debug for AtomDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AtomDecl")
            .field("name", &self.name)
            .field("deps", &self.deps)
            .field("weight", &self.weight)
            .field("rules", &self.rules.len())
            .field("evaluator", &self.evaluator.is_some())
            .finish()
    }
}

/// A single multiplicand: jet coordinate, parameter reference, or atom.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Factor {
    /// Indexed parameter reference; indices are canonicalized (sorted) for
    /// parameters declared symmetric.
    Param { param: usize, indices: Vec<u8> },
    Var(JetVar),
    Atom(usize),
}

/// coefficient · Π factor^power, factors sorted, powers ≥ 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Monomial {
    pub coeff: Rat,
    pub factors: Vec<(Factor, u32)>,
}

impl Monomial {
    /// Total degree in the jet coordinates of the given field slots.
    fn scaled_degree(&self, scaled: &BTreeSet<usize>) -> i64 {
        self.factors
            .iter()
            .map(|(f, p)| match f {
                Factor::Var(JetVar::Field { slot, .. }) if scaled.contains(slot) => *p as i64,
                _ => 0,
            })
            .sum()
    }
}

/// Canonical polynomial expression over jet coordinates, parameters and atoms.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Expr {
    terms: Vec<Monomial>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Expr::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        if c.is_zero() {
            Expr::zero()
        } else {
            Expr { terms: vec![Monomial { coeff: c, factors: Vec::new() }] }
        }
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(rat(n, 1))
    }

    pub fn var(v: JetVar) -> Self {
        Expr { terms: vec![Monomial { coeff: Rat::one(), factors: vec![(Factor::Var(v), 1)] }] }
    }

    pub fn field(slot: usize, index: MultiIndex) -> Self {
        Expr::var(JetVar::field(slot, index))
    }

    /// A parameter reference; sorts the indices when the parameter was
    /// declared symmetric.
    pub fn param(spec: &JetSpec, param: usize, mut indices: Vec<u8>) -> Self {
        assert_eq!(indices.len(), spec.params()[param].arity, "parameter arity");
        if spec.params()[param].symmetric {
            indices.sort_unstable();
        }
        Expr {
            terms: vec![Monomial {
                coeff: Rat::one(),
                factors: vec![(Factor::Param { param, indices }, 1)],
            }],
        }
    }

    pub fn atom(atom: usize) -> Self {
        Expr { terms: vec![Monomial { coeff: Rat::one(), factors: vec![(Factor::Atom(atom), 1)] }] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    fn from_map(map: BTreeMap<Vec<(Factor, u32)>, Rat>) -> Self {
        let terms = map
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(factors, coeff)| Monomial { coeff, factors })
            .collect();
        Expr { terms }
    }

    /// Canonical sum of arbitrary monomials (merges equal keys, drops zeros).
    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(monomials: I) -> Self {
        let mut map: BTreeMap<Vec<(Factor, u32)>, Rat> = BTreeMap::new();
        for m in monomials {
            if m.coeff.is_zero() {
                continue;
            }
            let mut factors = m.factors;
            factors.sort_by(|a, b| a.0.cmp(&b.0));
            // merge equal adjacent factors
            let mut merged: Vec<(Factor, u32)> = Vec::with_capacity(factors.len());
            for (f, p) in factors {
                if p == 0 {
                    continue;
                }
                match merged.last_mut() {
                    Some((lf, lp)) if *lf == f => *lp += p,
                    _ => merged.push((f, p)),
                }
            }
            *map.entry(merged).or_insert_with(Rat::zero) += m.coeff;
        }
        Expr::from_map(map)
    }

    pub fn add(&self, other: &Expr) -> Expr {
        Expr::from_monomials(self.terms.iter().chain(other.terms.iter()).cloned())
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Expr {
        Expr {
            terms: self
                .terms
                .iter()
                .map(|m| Monomial { coeff: -m.coeff.clone(), factors: m.factors.clone() })
                .collect(),
        }
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut factors = a.factors.clone();
                factors.extend(b.factors.iter().cloned());
                out.push(Monomial { coeff: &a.coeff * &b.coeff, factors });
            }
        }
        Expr::from_monomials(out)
    }

    pub fn scale(&self, c: &Rat) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: self
                .terms
                .iter()
                .map(|m| Monomial { coeff: &m.coeff * c, factors: m.factors.clone() })
                .collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Expr {
        let mut acc = Expr::one();
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// Maximum jet order of the coordinates the expression reads, including
    /// the declared dependencies of any atoms it contains.
    pub fn jet_order(&self, spec: &JetSpec) -> usize {
        self.collect_jet_vars(spec)
            .iter()
            .map(JetVar::order)
            .max()
            .unwrap_or(0)
    }

    /// Jet coordinates the expression depends on, directly or through atoms.
    pub fn collect_jet_vars(&self, spec: &JetSpec) -> BTreeSet<JetVar> {
        let mut vars = BTreeSet::new();
        for m in &self.terms {
            for (f, _) in &m.factors {
                match f {
                    Factor::Var(v) => {
                        vars.insert(v.clone());
                    }
                    Factor::Atom(a) => {
                        vars.extend(spec.atoms()[*a].deps.iter().cloned());
                    }
                    Factor::Param { .. } => {}
                }
            }
        }
        vars
    }

    pub fn contains_atoms(&self) -> bool {
        self.terms
            .iter()
            .any(|m| m.factors.iter().any(|(f, _)| matches!(f, Factor::Atom(_))))
    }

    /// Partial derivative with respect to a single jet coordinate, treating
    /// every canonical coordinate as independent. Atoms are differentiated
    /// through their declared rules.
    pub fn partial(&self, spec: &JetSpec, v: &JetVar) -> Result<Expr, ExprError> {
        let mut out: Vec<Monomial> = Vec::new();
        for m in &self.terms {
            for (pos, (f, p)) in m.factors.iter().enumerate() {
                let rest = |coeff: Rat| -> Monomial {
                    let mut factors = Vec::with_capacity(m.factors.len());
                    for (j, (g, q)) in m.factors.iter().enumerate() {
                        let q = if j == pos { q - 1 } else { *q };
                        if q > 0 {
                            factors.push((g.clone(), q));
                        }
                    }
                    Monomial { coeff, factors }
                };
                match f {
                    Factor::Var(fv) if fv == v => {
                        out.push(rest(&m.coeff * rat(*p as i64, 1)));
                    }
                    Factor::Atom(a) => {
                        let decl = &spec.atoms()[*a];
                        if decl.depends_on(v) {
                            let rule = decl.rule_for(v).ok_or_else(|| {
                                ExprError::MissingDerivativeRule { atom: decl.name.clone() }
                            })?;
                            let base = rest(&m.coeff * rat(*p as i64, 1));
                            let chain = Expr { terms: vec![base] }.mul(rule);
                            out.extend(chain.terms);
                        }
                    }
                    _ => {}
                }
            }
        }
        Ok(Expr::from_monomials(out))
    }

    /// Total derivative `d_i` along base direction `i`, with an explicit cap
    /// on the resulting jet order. `d_i f = ∂f/∂x^i + Σ y^σ_{J∪{i}} ∂f/∂y^σ_J`.
    pub fn total_derivative_capped(
        &self,
        spec: &JetSpec,
        i: usize,
        cap: Option<usize>,
    ) -> Result<Expr, ExprError> {
        let mut result = self.partial(spec, &JetVar::Base(i))?;
        for v in self.collect_jet_vars(spec) {
            let JetVar::Field { slot, index } = &v else { continue };
            let p = self.partial(spec, &v)?;
            if p.is_zero() {
                continue;
            }
            let lifted = index.with(i);
            if let Some(cap) = cap {
                if lifted.len() > cap {
                    return Err(ExprError::OrderOverflow { cap });
                }
            }
            result = result.add(&Expr::field(*slot, lifted).mul(&p));
        }
        Ok(result)
    }

    /// Total derivative bounded by the chart's order budget `2·max_order`
    /// (completions live at order 2r).
    pub fn total_derivative(&self, spec: &JetSpec, i: usize) -> Result<Expr, ExprError> {
        self.total_derivative_capped(spec, i, Some(2 * spec.max_order()))
    }

    /// Splits the expression into homothety-homogeneous components with
    /// respect to scaling the jet coordinates (all orders) of `scaled` field
    /// slots: `e = Σ_w e_w` with `e_w ∘ χ_u = u^w e_w`.
    ///
    /// Polynomial factors contribute their degree in scaled coordinates;
    /// atoms contribute their declared weight when they read scaled fields.
    pub fn homogeneous_decompose(
        &self,
        spec: &JetSpec,
        scaled: &BTreeSet<usize>,
    ) -> Result<Vec<(Rat, Expr)>, ExprError> {
        let mut by_weight: BTreeMap<Rat, Vec<Monomial>> = BTreeMap::new();
        for m in &self.terms {
            let mut weight = rat(m.scaled_degree(scaled), 1);
            for (f, p) in &m.factors {
                if let Factor::Atom(a) = f {
                    let decl = &spec.atoms()[*a];
                    let dep_slots: BTreeSet<usize> = decl
                        .deps
                        .iter()
                        .filter_map(|v| match v {
                            JetVar::Field { slot, .. } => Some(*slot),
                            JetVar::Base(_) => None,
                        })
                        .collect();
                    if dep_slots.is_empty() || dep_slots.is_disjoint(scaled) {
                        continue;
                    }
                    if !dep_slots.is_subset(scaled) {
                        // mixed scaled/unscaled dependencies: the declared
                        // weight does not apply
                        return Err(ExprError::UnknownWeight { atom: decl.name.clone() });
                    }
                    let w = decl
                        .weight
                        .clone()
                        .ok_or_else(|| ExprError::UnknownWeight { atom: decl.name.clone() })?;
                    weight += w * rat(*p as i64, 1);
                }
            }
            by_weight.entry(weight).or_default().push(m.clone());
        }
        Ok(by_weight
            .into_iter()
            .map(|(w, monomials)| (w, Expr::from_monomials(monomials)))
            .collect())
    }

    /// Substitute a jet coordinate by an expression. Used by the order
    /// reduction heuristic; the substituted variable must not appear inside
    /// atom dependencies.
    pub fn substitute(&self, v: &JetVar, replacement: &Expr) -> Expr {
        let mut out = Expr::zero();
        for m in &self.terms {
            let mut power = 0u32;
            let mut rest = Vec::new();
            for (f, p) in &m.factors {
                if matches!(f, Factor::Var(fv) if fv == v) {
                    power = *p;
                } else {
                    rest.push((f.clone(), *p));
                }
            }
            let base = Expr { terms: vec![Monomial { coeff: m.coeff.clone(), factors: rest }] };
            out = out.add(&base.mul(&replacement.pow(power)));
        }
        out
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, m) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", m.coeff)?;
            for (fac, p) in &m.factors {
                write!(f, "·{:?}", fac)?;
                if *p > 1 {
                    write!(f, "^{}", p)?;
                }
            }
        }
        Ok(())
    }
}

impl std::ops::Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl std::ops::Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        Expr::mul(self, rhs)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{JetSpec, ParamDecl};

    fn mech2() -> crate::jet::SpecRef {
        JetSpec::mechanics(
            "t",
            "q",
            2,
            2,
            vec![
                ParamDecl::symmetric("m", 2),
                ParamDecl::symmetric("k", 2),
                ParamDecl::symmetric("a", 2),
            ],
        )
        .unwrap()
    }

    fn q(slot: usize) -> Expr {
        Expr::field(slot, MultiIndex::empty())
    }
    fn qd(slot: usize) -> Expr {
        Expr::field(slot, MultiIndex::new(vec![0]))
    }
    fn qdd(slot: usize) -> Expr {
        Expr::field(slot, MultiIndex::new(vec![0, 0]))
    }

    #[test]
    fn canonicalization_merges_and_drops() {
        let spec = mech2();
        let e = q(0).mul(&qd(1)).add(&qd(1).mul(&q(0))).sub(&q(0).mul(&qd(1)).scale(&rat(2, 1)));
        assert!(e.is_zero());
        let f = Expr::param(&spec, 0, vec![1, 0]);
        let g = Expr::param(&spec, 0, vec![0, 1]);
        assert_eq!(f, g); // symmetric parameter indices canonicalized
    }

    #[test]
    fn partial_power_rule() {
        // ∂(q̇²)/∂q̇ = 2 q̇
        let spec = mech2();
        let e = qd(0).pow(2);
        let d = e.partial(&spec, &JetVar::field(0, MultiIndex::new(vec![0]))).unwrap();
        assert_eq!(d, qd(0).scale(&rat(2, 1)));
    }

    #[test]
    fn partial_symmetric_param_double_sum() {
        // ∂(m_{σν} q̈^ν q^σ)/∂q̈^μ = m_{μσ} q^σ, expanded by hand for m = 2.
        let spec = mech2();
        let mut e = Expr::zero();
        for s in 0..2u8 {
            for v in 0..2u8 {
                e = e.add(
                    &Expr::param(&spec, 0, vec![s, v])
                        .mul(&qdd(v as usize))
                        .mul(&q(s as usize)),
                );
            }
        }
        let d = e.partial(&spec, &JetVar::field(0, MultiIndex::new(vec![0, 0]))).unwrap();
        // hand expansion: m_{00} q^0 + m_{01} q^1 (μ = 0)
        let expected = Expr::param(&spec, 0, vec![0, 0])
            .mul(&q(0))
            .add(&Expr::param(&spec, 0, vec![0, 1]).mul(&q(1)));
        assert_eq!(d, expected);
    }

    #[test]
    fn partial_quadratic_form() {
        // ∂(k_{σν} q^σ q^ν)/∂q^ρ = 2 k_{ρν} q^ν, brute-forced for m = 2.
        let spec = mech2();
        let mut e = Expr::zero();
        for s in 0..2u8 {
            for v in 0..2u8 {
                e = e.add(
                    &Expr::param(&spec, 1, vec![s, v]).mul(&q(s as usize)).mul(&q(v as usize)),
                );
            }
        }
        let d = e.partial(&spec, &JetVar::field(1, MultiIndex::empty())).unwrap();
        let expected = Expr::param(&spec, 1, vec![1, 0])
            .mul(&q(0))
            .add(&Expr::param(&spec, 1, vec![1, 1]).mul(&q(1)))
            .scale(&rat(2, 1));
        assert_eq!(d, expected);
    }

    #[test]
    fn total_derivative_basics() {
        let spec = mech2();
        // d_t q = q̇
        assert_eq!(q(0).total_derivative(&spec, 0).unwrap(), qd(0));
        // Leibniz on y y₁ (n=1): → y₁² + y y₁₁
        let spec1 = JetSpec::mechanics("x", "y", 1, 2, vec![]).unwrap();
        let y = Expr::field(0, MultiIndex::empty());
        let y1 = Expr::field(0, MultiIndex::new(vec![0]));
        let y11 = Expr::field(0, MultiIndex::new(vec![0, 0]));
        let d = y.mul(&y1).total_derivative(&spec1, 0).unwrap();
        assert_eq!(d, y1.pow(2).add(&y.mul(&y11)));
    }

    #[test]
    fn total_derivative_of_paper_kinetic_term() {
        // d_t(½ m_{σν} q̇^ν q^σ) = ½ m_{σν} q̈^ν q^σ + ½ m_{σν} q̇^ν q̇^σ
        let spec = mech2();
        let mut e = Expr::zero();
        let mut expected = Expr::zero();
        for s in 0..2u8 {
            for v in 0..2u8 {
                let m = Expr::param(&spec, 0, vec![s, v]).scale(&rat(1, 2));
                e = e.add(&m.mul(&qd(v as usize)).mul(&q(s as usize)));
                expected = expected
                    .add(&m.mul(&qdd(v as usize)).mul(&q(s as usize)))
                    .add(&m.mul(&qd(v as usize)).mul(&qd(s as usize)));
            }
        }
        assert_eq!(e.total_derivative(&spec, 0).unwrap(), expected);
    }

    #[test]
    fn total_derivative_order_cap() {
        let spec = JetSpec::mechanics("t", "q", 1, 1, vec![]).unwrap();
        let top = Expr::field(0, MultiIndex::new(vec![0, 0])); // order 2 = 2r
        assert_eq!(
            top.total_derivative(&spec, 0),
            Err(ExprError::OrderOverflow { cap: 2 })
        );
    }

    #[test]
    fn mixed_total_derivatives_commute() {
        let spec = JetSpec::new(
            vec!["x".into(), "y".into()],
            vec![crate::jet::FieldFamily { name: "u".into(), components: 1 }],
            2,
            vec![],
            vec![],
        )
        .unwrap();
        let u = Expr::field(0, MultiIndex::empty());
        let u1 = Expr::field(0, MultiIndex::new(vec![0]));
        let e = u.pow(2).mul(&u1); // order 1, so d_i d_j stays within 2r
        let d01 = e
            .total_derivative(&spec, 0)
            .unwrap()
            .total_derivative(&spec, 1)
            .unwrap();
        let d10 = e
            .total_derivative(&spec, 1)
            .unwrap()
            .total_derivative(&spec, 0)
            .unwrap();
        assert_eq!(d01, d10);
    }

    #[test]
    fn decompose_linear_source() {
        // m q̈ + k q + a q̇ scaling {q}: single component of weight 1
        let spec = mech2();
        let mut e = Expr::zero();
        for s in 0..2u8 {
            for v in 0..2u8 {
                e = e
                    .add(&Expr::param(&spec, 0, vec![s, v]).mul(&qdd(v as usize)))
                    .add(&Expr::param(&spec, 1, vec![s, v]).mul(&q(v as usize)))
                    .add(&Expr::param(&spec, 2, vec![s, v]).mul(&qd(v as usize)));
            }
        }
        let scaled: BTreeSet<usize> = [0, 1].into_iter().collect();
        let parts = e.homogeneous_decompose(&spec, &scaled).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].0, rat(1, 1));
        assert_eq!(parts[0].1, e);
    }

    #[test]
    fn decompose_with_atom_weights() {
        // α R^{ij}√|g| modeled with opaque atoms: g^{ij} weight −1 (twice),
        // lowered Ricci weight 0, √|g| weight 2 → total weight 0.
        let g = JetVar::field(0, MultiIndex::empty());
        let atoms = vec![
            AtomDecl::new("ginv", vec![g.clone()]).with_weight(rat(-1, 1)),
            AtomDecl::new("riclow", vec![g.clone()]).with_weight(rat(0, 1)),
            AtomDecl::new("sqrtg", vec![g.clone()]).with_weight(rat(2, 1)),
        ];
        let spec = JetSpec::new(
            vec!["x".into()],
            vec![crate::jet::FieldFamily { name: "g".into(), components: 1 }],
            2,
            vec![],
            atoms,
        )
        .unwrap();
        let e = Expr::atom(0).pow(2).mul(&Expr::atom(1)).mul(&Expr::atom(2));
        let scaled: BTreeSet<usize> = [0].into_iter().collect();
        let parts = e.homogeneous_decompose(&spec, &scaled).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].0, rat(0, 1));

        // electromagnetic Noether density shape: g⁻¹ · A-derivative (0) ·
        // mixed F (0) · √|g| (2) + g⁻¹ · F·F (0) · √|g| → single weight 1
        let atoms2 = vec![
            AtomDecl::new("ginv", vec![g.clone()]).with_weight(rat(-1, 1)),
            AtomDecl::new("acov", vec![g.clone()]).with_weight(rat(0, 1)),
            AtomDecl::new("fmix", vec![g.clone()]).with_weight(rat(0, 1)),
            AtomDecl::new("ff", vec![g.clone()]).with_weight(rat(0, 1)),
            AtomDecl::new("sqrtg", vec![g.clone()]).with_weight(rat(2, 1)),
        ];
        let spec2 = JetSpec::new(
            vec!["x".into()],
            vec![crate::jet::FieldFamily { name: "g".into(), components: 1 }],
            2,
            vec![],
            atoms2,
        )
        .unwrap();
        let t1 = Expr::atom(0).mul(&Expr::atom(1)).mul(&Expr::atom(2)).mul(&Expr::atom(4));
        let t2 = Expr::atom(0).mul(&Expr::atom(3)).mul(&Expr::atom(4));
        let parts2 = t1.add(&t2).homogeneous_decompose(&spec2, &[0].into_iter().collect()).unwrap();
        assert_eq!(parts2.len(), 1);
        assert_eq!(parts2[0].0, rat(1, 1));
    }

    #[test]
    fn decompose_missing_weight_errors() {
        let g = JetVar::field(0, MultiIndex::empty());
        let atoms = vec![AtomDecl::new("f", vec![g.clone()])];
        let spec = JetSpec::new(
            vec!["x".into()],
            vec![crate::jet::FieldFamily { name: "g".into(), components: 1 }],
            1,
            vec![],
            atoms,
        )
        .unwrap();
        let e = Expr::atom(0);
        assert_eq!(
            e.homogeneous_decompose(&spec, &[0].into_iter().collect()),
            Err(ExprError::UnknownWeight { atom: "f".into() })
        );
    }

    #[test]
    fn decompose_reconstructs() {
        let spec = mech2();
        let e = q(0)
            .pow(3)
            .add(&qd(1).mul(&q(0)).scale(&rat(5, 3)))
            .add(&Expr::param(&spec, 0, vec![0, 1]))
            .add(&qdd(0).pow(2).mul(&q(1)));
        let parts = e.homogeneous_decompose(&spec, &[0, 1].into_iter().collect()).unwrap();
        let mut sum = Expr::zero();
        for (_, c) in &parts {
            sum = sum.add(c);
        }
        assert_eq!(sum, e);
    }

    #[test]
    fn missing_rule_blocks_partial() {
        let v = JetVar::field(0, MultiIndex::empty());
        let atoms = vec![AtomDecl::new("f", vec![v.clone()])];
        let spec = JetSpec::new(
            vec!["x".into()],
            vec![crate::jet::FieldFamily { name: "y".into(), components: 1 }],
            1,
            vec![],
            atoms,
        )
        .unwrap();
        let e = Expr::atom(0);
        assert_eq!(
            e.partial(&spec, &v),
            Err(ExprError::MissingDerivativeRule { atom: "f".into() })
        );
        // but a partial w.r.t. an unrelated coordinate is fine
        let other = JetVar::field(0, MultiIndex::new(vec![0]));
        assert!(e.partial(&spec, &other).unwrap().is_zero());
    }

    #[test]
    fn atom_chain_rule() {
        // f(q) with rule ∂f/∂q = 2q: ∂(f²)/∂q = 2 f · 2q = 4 f q
        let v = JetVar::field(0, MultiIndex::empty());
        let q0 = Expr::var(v.clone());
        let atoms = vec![AtomDecl::new("f", vec![v.clone()])
            .with_rule(v.clone(), q0.scale(&rat(2, 1)))];
        let spec = JetSpec::new(
            vec!["x".into()],
            vec![crate::jet::FieldFamily { name: "q".into(), components: 1 }],
            1,
            vec![],
            atoms,
        )
        .unwrap();
        let e = Expr::atom(0).pow(2);
        let d = e.partial(&spec, &v).unwrap();
        assert_eq!(d, Expr::atom(0).mul(&Expr::var(v)).scale(&rat(4, 1)));
    }
}
