//! The core variational operators: Euler-Lagrange, the generalized Helmholtz
//! obstruction tensor, the Vainberg-Tonti Lagrangian, canonical variational
//! completion (both the defining route and the Helmholtz-coefficient route),
//! and a total-derivative order-reduction heuristic.
//!
//! Everything is exact: the homotopy integral `∫₀¹ u^w du = 1/(w+1)` is
//! evaluated through homothety-homogeneous decomposition, so no symbolic
//! integration and no floating point enter these operators.

use std::collections::{BTreeMap, BTreeSet};

use num::One;
use thiserror::Error;

use crate::expr::{rat, Expr, ExprError, Rat};
use crate::jet::{multiset_binomial, multisets, JetVar, MultiIndex, SpecRef};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VarCalcError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("divergent homotopy integral at {location}: weight {weight} makes ∫₀¹ u^{exponent} du infinite")]
    DivergentHomotopy { location: String, weight: Rat, exponent: String },
}

impl VarCalcError {
    fn divergent_component(slot: usize, weight: Rat) -> Self {
        VarCalcError::DivergentHomotopy {
            location: format!("source component {}", slot),
            weight: weight.clone(),
            exponent: weight.to_string(),
        }
    }

    fn divergent_entry(sigma: usize, nu: usize, j: &MultiIndex, weight: Rat) -> Self {
        let exponent = (&weight + Rat::one()).to_string();
        VarCalcError::DivergentHomotopy {
            location: format!("Helmholtz entry ({}, {}, {:?})", sigma, nu, j),
            weight,
            exponent,
        }
    }
}

/// A system of equations in coordinates: the coefficient vector ε_σ of the
/// source form ε = ε_σ ω^σ ∧ ω₀, one expression per field slot.
#[derive(Debug, Clone)]
pub struct SourceForm {
    spec: SpecRef,
    order: usize,
    comps: Vec<Expr>,
}

/// Structural equality of the canonical components.
impl PartialEq for SourceForm {
    fn eq(&self, other: &Self) -> bool {
        self.comps == other.comps
    }
}
impl Eq for SourceForm {}

impl SourceForm {
    /// Builds a source form; the order is the actual maximal jet order of
    /// the components. Declared problem orders are validated at parse time.
    pub fn new(spec: SpecRef, comps: Vec<Expr>) -> Self {
        assert_eq!(comps.len(), spec.field_count(), "one component per field slot");
        let order = comps.iter().map(|e| e.jet_order(&spec)).max().unwrap_or(0);
        SourceForm { spec, order, comps }
    }

    pub fn zero(spec: SpecRef) -> Self {
        let comps = vec![Expr::zero(); spec.field_count()];
        SourceForm { spec, order: 0, comps }
    }

    pub fn spec(&self) -> &SpecRef {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn component(&self, slot: usize) -> &Expr {
        &self.comps[slot]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Expr::is_zero)
    }

    pub fn add(&self, other: &SourceForm) -> SourceForm {
        let comps = self
            .comps
            .iter()
            .zip(other.comps.iter())
            .map(|(a, b)| a.add(b))
            .collect();
        SourceForm::new(self.spec.clone(), comps)
    }

    pub fn sub(&self, other: &SourceForm) -> SourceForm {
        let comps = self
            .comps
            .iter()
            .zip(other.comps.iter())
            .map(|(a, b)| a.sub(b))
            .collect();
        SourceForm::new(self.spec.clone(), comps)
    }
}

/// A Lagrangian λ = L ω₀, kept as its density L.
#[derive(Debug, Clone)]
pub struct Lagrangian {
    spec: SpecRef,
    order: usize,
    density: Expr,
}

impl PartialEq for Lagrangian {
    fn eq(&self, other: &Self) -> bool {
        self.density == other.density
    }
}
impl Eq for Lagrangian {}

impl Lagrangian {
    pub fn new(spec: SpecRef, density: Expr) -> Self {
        let order = density.jet_order(&spec);
        Lagrangian { spec, order, density }
    }

    pub fn spec(&self) -> &SpecRef {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn density(&self) -> &Expr {
        &self.density
    }
}

/// The family of Helmholtz coefficients H_{σν}^{j₁…j_k}, k = 0..r, stored
/// for sorted multi-indices only; an absent entry is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HelmholtzTensor {
    order: usize,
    entries: BTreeMap<(usize, usize, MultiIndex), Expr>,
}

impl HelmholtzTensor {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, MultiIndex), &Expr)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, sigma: usize, nu: usize, j: &MultiIndex) -> Expr {
        self.entries
            .get(&(sigma, nu, j.clone()))
            .cloned()
            .unwrap_or_else(Expr::zero)
    }

    /// All coefficients normalize to the zero expression. For the polynomial
    /// fragment (and for opaque atoms as free symbols) this decides local
    /// variationality.
    pub fn is_all_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The Euler-Lagrange source form of a Lagrangian:
/// `E_σ = Σ_{|J| ≤ s} (−1)^{|J|} d_J ∂L/∂y^σ_J`, the J-sum running over
/// sorted multi-indices (unordered combinations) in the symmetrized
/// coordinate convention.
pub fn euler_lagrange(lag: &Lagrangian) -> Result<SourceForm, ExprError> {
    let spec = &lag.spec;
    let vars = lag.density.collect_jet_vars(spec);
    let mut comps = vec![Expr::zero(); spec.field_count()];
    for v in vars {
        let JetVar::Field { slot, index } = &v else { continue };
        let p = lag.density.partial(spec, &v)?;
        if p.is_zero() {
            continue;
        }
        let mut term = p;
        for &i in index.indices() {
            term = term.total_derivative_capped(spec, i as usize, None)?;
        }
        if index.len() % 2 == 1 {
            term = term.neg();
        }
        comps[*slot] = comps[*slot].add(&term);
    }
    Ok(SourceForm::new(spec.clone(), comps))
}

/// The generalized Helmholtz coefficients of a source form of order r:
///
/// `H_{σν}^J = ∂ε_σ/∂y^ν_J − (−1)^{|J|} ∂ε_ν/∂y^σ_J
///   − Σ_{l=|J|+1}^{r} (−1)^l Σ_{|I|=l−|J|} binom(J∪I; J) d_I ∂ε_ν/∂y^σ_{J∪I}`
///
/// where `binom(J∪I; J) = ∏_a C(mult_J(a)+mult_I(a), mult_J(a))` is the
/// multiset binomial (the paper's binomial symbol, summed over unordered
/// index combinations). The source form is locally variational iff every
/// entry normalizes to zero.
pub fn helmholtz(eps: &SourceForm) -> Result<HelmholtzTensor, ExprError> {
    let spec = &eps.spec;
    let n = spec.base_dim();
    let m = spec.field_count();
    let r = eps.order;
    let mut entries = BTreeMap::new();
    for k in 0..=r {
        for j in multisets(n, k) {
            for sigma in 0..m {
                for nu in 0..m {
                    let term1 = eps.comps[sigma].partial(spec, &JetVar::field(nu, j.clone()))?;
                    let term2 = eps.comps[nu].partial(spec, &JetVar::field(sigma, j.clone()))?;
                    let mut h = if k % 2 == 0 { term1.sub(&term2) } else { term1.add(&term2) };
                    for l in (k + 1)..=r {
                        for i_idx in multisets(n, l - k) {
                            let joined = j.union(&i_idx);
                            let p =
                                eps.comps[nu].partial(spec, &JetVar::field(sigma, joined))?;
                            if p.is_zero() {
                                continue;
                            }
                            let mut d = p;
                            for &i in i_idx.indices() {
                                d = d.total_derivative_capped(spec, i as usize, None)?;
                            }
                            let weight = rat(multiset_binomial(&j, &i_idx) as i64, 1);
                            let signed = if l % 2 == 0 { weight } else { -weight };
                            h = h.sub(&d.scale(&signed));
                        }
                    }
                    if !h.is_zero() {
                        entries.insert((sigma, nu, j.clone()), h);
                    }
                }
            }
        }
    }
    Ok(HelmholtzTensor { order: r, entries })
}

/// The Vainberg-Tonti Lagrangian of a source form:
/// `L_ε = Σ_{σ ∈ scaled} y^σ ∫₀¹ ε_σ ∘ χ_u du`, evaluated exactly through
/// homothety-homogeneous decomposition (a weight-w component integrates to
/// `1/(w+1)`). Weight −1 is a hard error: the integral has no finite value.
pub fn vt_lagrangian(
    eps: &SourceForm,
    scaled: &BTreeSet<usize>,
) -> Result<Lagrangian, VarCalcError> {
    let spec = &eps.spec;
    let minus_one = -Rat::one();
    let mut density = Expr::zero();
    for &slot in scaled {
        let contraction = Expr::field(slot, MultiIndex::empty());
        for (w, part) in eps.comps[slot].homogeneous_decompose(spec, scaled)? {
            if w == minus_one {
                return Err(VarCalcError::divergent_component(slot, w));
            }
            let factor = (w + Rat::one()).recip();
            density = density.add(&contraction.mul(&part).scale(&factor));
        }
    }
    Ok(Lagrangian::new(spec.clone(), density))
}

/// The canonical variational completion τ(ε) = E(λ_ε) − ε. Adding τ makes
/// the system variational; τ vanishes iff ε was already variational.
pub fn canonical_completion(
    eps: &SourceForm,
    scaled: &BTreeSet<usize>,
) -> Result<SourceForm, VarCalcError> {
    let lag = vt_lagrangian(eps, scaled)?;
    let el = euler_lagrange(&lag)?;
    Ok(el.sub(eps))
}

/// The completion computed directly from the Helmholtz coefficients:
/// `τ_ν = −∫₀¹ u Σ_{σ, J} y^σ_J (H_{νσ}^J ∘ χ_u) du`, with the contraction
/// running over sorted multi-indices and the full homothety (all fields
/// scaled). Agrees with [`canonical_completion`] wherever both are defined.
pub fn completion_via_helmholtz(eps: &SourceForm) -> Result<SourceForm, VarCalcError> {
    let spec = &eps.spec;
    let tensor = helmholtz(eps)?;
    let all: BTreeSet<usize> = spec.all_fields().into_iter().collect();
    let minus_two = rat(-2, 1);
    let mut comps = vec![Expr::zero(); spec.field_count()];
    for ((nu, sigma, j), h) in &tensor.entries {
        // entry key is (first index, second index, J); τ_ν contracts H_{νσ}
        for (w, part) in h.homogeneous_decompose(spec, &all)? {
            if w == minus_two {
                return Err(VarCalcError::divergent_entry(*nu, *sigma, j, w));
            }
            // −∫₀¹ u·u^w du = −1/(w+2)
            let factor = -(&w + rat(2, 1)).recip();
            let contracted = Expr::field(*sigma, j.clone()).mul(&part).scale(&factor);
            comps[*nu] = comps[*nu].add(&contracted);
        }
    }
    Ok(SourceForm::new(spec.clone(), comps))
}

fn order_measure(spec: &SpecRef, e: &Expr) -> (usize, usize) {
    let s = e.jet_order(spec);
    if s == 0 {
        return (0, 0);
    }
    let count = e
        .terms()
        .iter()
        .filter(|mono| {
            mono.factors.iter().any(|(f, _)| {
                matches!(f, crate::expr::Factor::Var(JetVar::Field { index, .. }) if index.len() == s)
            })
        })
        .count();
    (s, count)
}

/// Order reduction by integration by parts: repeatedly rewrites a term that
/// is linear in a highest-order coordinate `y^σ_J`, |J| = order(λ), as
/// `A·y^σ_J → −(d_i A)·y^σ_{J∖{i}}` (dropping the exact divergence), as long
/// as each step strictly lowers the (order, top-order term count) measure
/// and never raises the order. The result differs from the input by a total
/// divergence, so the Euler-Lagrange forms agree; when the heuristic does
/// not apply the input is returned unchanged.
pub fn reduce_order(lag: &Lagrangian) -> Lagrangian {
    let spec = &lag.spec;
    let mut current = lag.density.clone();
    let original_order = current.jet_order(spec);
    loop {
        let (s, top_count) = order_measure(spec, &current);
        if s == 0 {
            break;
        }
        let mut applied = false;
        'monos: for mono in current.terms() {
            let top_factors: Vec<(usize, MultiIndex, u32)> = mono
                .factors
                .iter()
                .filter_map(|(f, p)| match f {
                    crate::expr::Factor::Var(JetVar::Field { slot, index })
                        if index.len() == s =>
                    {
                        Some((*slot, index.clone(), *p))
                    }
                    _ => None,
                })
                .collect();
            // a term linear in exactly one highest-order coordinate
            let [(slot, index, 1)] = top_factors.as_slice() else { continue };
            let target = JetVar::field(*slot, index.clone());
            // A = monomial / y^σ_J
            let factors: Vec<_> = mono
                .factors
                .iter()
                .filter(|(f, _)| !matches!(f, crate::expr::Factor::Var(v) if *v == target))
                .cloned()
                .collect();
            let coefficient = Expr::from_monomials([crate::expr::Monomial {
                coeff: mono.coeff.clone(),
                factors,
            }]);
            let &i = index.indices().last().expect("nonempty multi-index");
            let lowered = {
                let mut v = index.indices().to_vec();
                v.pop();
                MultiIndex::new(v)
            };
            let Ok(d_coeff) = coefficient.total_derivative_capped(spec, i as usize, None) else {
                continue; // atoms without rules: leave the term alone
            };
            let removed = Expr::from_monomials([mono.clone()]);
            let candidate = current
                .sub(&removed)
                .sub(&d_coeff.mul(&Expr::field(*slot, lowered)));
            if candidate.jet_order(spec) > original_order {
                continue;
            }
            if order_measure(spec, &candidate) < (s, top_count) {
                current = candidate;
                applied = true;
                break 'monos;
            }
        }
        if !applied {
            break;
        }
    }
    Lagrangian::new(spec.clone(), current)
}
