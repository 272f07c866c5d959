//! Numeric oracle layer: evaluation of expressions and black-box densities
//! at numeric jet points, homotopy quadrature, finite-difference partials
//! and total derivatives, and numeric Euler-Lagrange / Helmholtz operators.
//!
//! Everything here is pure: densities must be deterministic and
//! side-effect free, and point batches can be processed in parallel.

mod quad;
mod sample;
mod stencil;

pub use quad::GaussLegendre;
pub use sample::{canonical_param_tuples, sample_jet_point};
pub use stencil::StencilCfg;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num::ToPrimitive;
use thiserror::Error;

use crate::expr::{Expr, Factor};
use crate::jet::{multiset_binomial, multisets, JetSpec, JetVar, MultiIndex, SpecRef};
use stencil::{PolySection, SectionGrid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumError {
    #[error("jet point does not cover {0}")]
    IncompletePoint(String),
    #[error("atom `{0}` cannot be evaluated numerically")]
    AtomEvalFailure(String),
    #[error("homotopy integrand is non-finite or divergent near u = 0")]
    NonFiniteIntegrand,
    #[error("metric is numerically singular")]
    SingularMetric,
    #[error("{0}")]
    Invalid(String),
}

/// Index tables for the canonical coordinates of one chart up to a fixed
/// order: base variables first, then per order k the blocks of field
/// coordinates, each block laid out rank-major over sorted multi-indices.
#[derive(Debug)]
struct JetLayout {
    n: usize,
    m: usize,
    order: usize,
    block_start: Vec<usize>,
    index_sets: Vec<Vec<MultiIndex>>,
    ranks: Vec<BTreeMap<MultiIndex, usize>>,
    total: usize,
}

impl JetLayout {
    fn new(n: usize, m: usize, order: usize) -> Self {
        let mut block_start = Vec::with_capacity(order + 1);
        let mut index_sets = Vec::with_capacity(order + 1);
        let mut ranks = Vec::with_capacity(order + 1);
        let mut pos = n;
        for k in 0..=order {
            block_start.push(pos);
            let sets = multisets(n, k);
            let rank: BTreeMap<MultiIndex, usize> =
                sets.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
            pos += sets.len() * m;
            index_sets.push(sets);
            ranks.push(rank);
        }
        JetLayout { n, m, order, block_start, index_sets, ranks, total: pos }
    }

    fn position(&self, v: &JetVar) -> Option<usize> {
        match v {
            JetVar::Base(i) => (*i < self.n).then_some(*i),
            JetVar::Field { slot, index } => {
                let k = index.len();
                if k > self.order || *slot >= self.m {
                    return None;
                }
                let rank = self.ranks[k].get(index)?;
                Some(self.block_start[k] + rank * self.m + slot)
            }
        }
    }
}

/// A numeric assignment to all canonical jet coordinates up to a stated
/// order, plus values for the chart's parameters.
#[derive(Clone)]
pub struct JetPoint {
    spec: SpecRef,
    layout: Arc<JetLayout>,
    coords: Vec<f64>,
    params: BTreeMap<(usize, Vec<u8>), f64>,
}

impl JetPoint {
    /// All coordinates zero; parameters empty.
    pub fn zeros(spec: &SpecRef, order: usize) -> Self {
        let layout = Arc::new(JetLayout::new(spec.base_dim(), spec.field_count(), order));
        let coords = vec![0.0; layout.total];
        JetPoint { spec: spec.clone(), layout, coords, params: BTreeMap::new() }
    }

    pub fn spec(&self) -> &SpecRef {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.layout.order
    }

    pub fn value(&self, v: &JetVar) -> Result<f64, NumError> {
        self.layout
            .position(v)
            .map(|i| self.coords[i])
            .ok_or_else(|| NumError::IncompletePoint(format!("{:?}", v)))
    }

    pub fn set(&mut self, v: &JetVar, value: f64) -> Result<(), NumError> {
        let i = self
            .layout
            .position(v)
            .ok_or_else(|| NumError::IncompletePoint(format!("{:?}", v)))?;
        self.coords[i] = value;
        Ok(())
    }

    pub fn set_param(&mut self, param: usize, mut indices: Vec<u8>, value: f64) {
        if self.spec.params()[param].symmetric {
            indices.sort_unstable();
        }
        self.params.insert((param, indices), value);
    }

    pub fn param_value(&self, param: usize, indices: &[u8]) -> Result<f64, NumError> {
        let mut idx = indices.to_vec();
        if self.spec.params()[param].symmetric {
            idx.sort_unstable();
        }
        self.params.get(&(param, idx)).copied().ok_or_else(|| {
            NumError::IncompletePoint(format!("parameter `{}`", self.spec.params()[param].name))
        })
    }

    pub fn params(&self) -> &BTreeMap<(usize, Vec<u8>), f64> {
        &self.params
    }

    /// True when every stored coordinate is finite.
    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|v| v.is_finite()) && self.params.values().all(|v| v.is_finite())
    }

    /// The homothety χ_u: multiplies every jet coordinate (all orders) of
    /// the scaled field slots by `u`; base coordinates and parameters are
    /// untouched.
    pub fn scaled_fields(&self, u: f64, scaled: &BTreeSet<usize>) -> JetPoint {
        let mut out = self.clone();
        for k in 0..=self.layout.order {
            let start = self.layout.block_start[k];
            let count = self.layout.index_sets[k].len();
            for rank in 0..count {
                for &slot in scaled {
                    out.coords[start + rank * self.layout.m + slot] *= u;
                }
            }
        }
        out
    }

    pub(crate) fn position_of(&self, v: &JetVar) -> Option<usize> {
        self.layout.position(v)
    }

    /// Arithmetic position lookup: coordinate of derivative order `k`,
    /// multiset rank `rank` (in the canonical enumeration), field `slot`.
    /// Avoids building a `JetVar` in hot loops.
    pub(crate) fn block_position(&self, k: usize, rank: usize, slot: usize) -> Option<usize> {
        if k > self.layout.order || slot >= self.layout.m {
            return None;
        }
        if rank >= self.layout.index_sets[k].len() {
            return None;
        }
        Some(self.layout.block_start[k] + rank * self.layout.m + slot)
    }

    pub(crate) fn raw(&self, pos: usize) -> f64 {
        self.coords[pos]
    }

    pub(crate) fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    pub(crate) fn set_params_map(&mut self, params: BTreeMap<(usize, Vec<u8>), f64>) {
        self.params = params;
    }

    /// Iterator over (coordinate, value) pairs in canonical order.
    pub fn coordinates(&self) -> Vec<(JetVar, f64)> {
        let mut out = Vec::with_capacity(self.coords.len());
        for i in 0..self.layout.n {
            out.push((JetVar::Base(i), self.coords[i]));
        }
        for k in 0..=self.layout.order {
            for (rank, idx) in self.layout.index_sets[k].iter().enumerate() {
                for slot in 0..self.layout.m {
                    let pos = self.layout.block_start[k] + rank * self.layout.m + slot;
                    out.push((JetVar::field(slot, idx.clone()), self.coords[pos]));
                }
            }
        }
        out
    }
}

impl std::fmt::Debug for JetPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("JetPoint")
            .field("order", &self.layout.order)
            .field("coords", &self.coords.len())
            .finish()
    }
}

/// Recursive evaluation of a canonical expression at a jet point.
pub fn eval(e: &Expr, p: &JetPoint) -> Result<f64, NumError> {
    let mut total = 0.0;
    for m in e.terms() {
        let mut value = m
            .coeff
            .to_f64()
            .ok_or_else(|| NumError::Invalid("coefficient out of f64 range".into()))?;
        for (f, pow) in &m.factors {
            let base = match f {
                Factor::Var(v) => p.value(v)?,
                Factor::Param { param, indices } => p.param_value(*param, indices)?,
                Factor::Atom(a) => {
                    let decl = &p.spec().atoms()[*a];
                    let eval = decl
                        .evaluator
                        .as_ref()
                        .ok_or_else(|| NumError::AtomEvalFailure(decl.name.clone()))?;
                    eval(p)?
                }
            };
            value *= base.powi(*pow as i32);
        }
        total += value;
    }
    Ok(total)
}

type ScalarFn = Arc<dyn Fn(&JetPoint) -> Result<f64, NumError> + Send + Sync>;
type VectorFn = Arc<dyn Fn(&JetPoint) -> Result<Vec<f64>, NumError> + Send + Sync>;

/// A black-box scalar density: a deterministic, side-effect-free function of
/// a jet point with a declared jet order.
#[derive(Clone)]
pub struct DensityFn {
    order: usize,
    func: ScalarFn,
}

impl DensityFn {
    pub fn new(
        order: usize,
        func: impl Fn(&JetPoint) -> Result<f64, NumError> + Send + Sync + 'static,
    ) -> Self {
        DensityFn { order, func: Arc::new(func) }
    }

    pub fn from_expr(spec: &JetSpec, e: &Expr) -> Self {
        let e = e.clone();
        DensityFn { order: e.jet_order(spec), func: Arc::new(move |p| eval(&e, p)) }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn eval(&self, p: &JetPoint) -> Result<f64, NumError> {
        (self.func)(p)
    }
}

/// A black-box source-form density: one value per field slot.
#[derive(Clone)]
pub struct SourceDensity {
    order: usize,
    components: usize,
    func: VectorFn,
}

impl SourceDensity {
    pub fn new(
        order: usize,
        components: usize,
        func: impl Fn(&JetPoint) -> Result<Vec<f64>, NumError> + Send + Sync + 'static,
    ) -> Self {
        SourceDensity { order, components, func: Arc::new(func) }
    }

    pub fn from_exprs(spec: &JetSpec, comps: &[Expr]) -> Self {
        let comps: Vec<Expr> = comps.to_vec();
        let order = comps.iter().map(|e| e.jet_order(spec)).max().unwrap_or(0);
        SourceDensity {
            order,
            components: comps.len(),
            func: Arc::new(move |p| comps.iter().map(|e| eval(e, p)).collect()),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn eval(&self, p: &JetPoint) -> Result<Vec<f64>, NumError> {
        (self.func)(p)
    }
}

/// Finite-difference settings for the first-order operators.
#[derive(Debug, Clone)]
pub struct FdConfig {
    /// Relative step: h = rel_step · max(1, |p[v]|).
    pub rel_step: f64,
    /// Richardson extrapolation over two step sizes.
    pub richardson: bool,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig { rel_step: 1e-6, richardson: false }
    }
}

/// Central-difference partial derivative of a density with respect to one
/// jet coordinate.
pub fn numeric_partial(
    f: &DensityFn,
    p: &JetPoint,
    v: &JetVar,
    cfg: &FdConfig,
) -> Result<f64, NumError> {
    let base = p.value(v)?;
    let h = cfg.rel_step * base.abs().max(1.0);
    let central = |h: f64| -> Result<f64, NumError> {
        let mut plus = p.clone();
        plus.set(v, base + h)?;
        let mut minus = p.clone();
        minus.set(v, base - h)?;
        Ok((f.eval(&plus)? - f.eval(&minus)?) / (2.0 * h))
    };
    if cfg.richardson {
        let d1 = central(h)?;
        let d2 = central(h / 2.0)?;
        Ok((4.0 * d2 - d1) / 3.0)
    } else {
        central(h)
    }
}

/// Chain-rule total derivative `d_i f` at a point of order ≥ f.order + 1:
/// `∂f/∂x^i + Σ_{σ,J} p[y^σ_{J∪{i}}] · ∂f/∂y^σ_J`, each partial by central
/// differences.
pub fn numeric_total_derivative(
    spec: &JetSpec,
    f: &DensityFn,
    p: &JetPoint,
    i: usize,
    cfg: &FdConfig,
) -> Result<f64, NumError> {
    if p.order() < f.order() + 1 {
        return Err(NumError::IncompletePoint(format!(
            "total derivative of an order-{} density needs a point of order ≥ {}",
            f.order(),
            f.order() + 1
        )));
    }
    let mut result = numeric_partial(f, p, &JetVar::Base(i), cfg)?;
    for k in 0..=f.order() {
        for idx in multisets(spec.base_dim(), k) {
            for slot in 0..spec.field_count() {
                let v = JetVar::field(slot, idx.clone());
                let lifted = JetVar::field(slot, idx.with(i));
                result += p.value(&lifted)? * numeric_partial(f, p, &v, cfg)?;
            }
        }
    }
    Ok(result)
}

fn divergence_probe(g: &mut impl FnMut(f64) -> Result<f64, NumError>) -> Result<(), NumError> {
    let mut values = Vec::with_capacity(20);
    for k in 1..=20 {
        let u = 2f64.powi(-k);
        let v = g(u)?;
        if !v.is_finite() {
            return Err(NumError::NonFiniteIntegrand);
        }
        values.push(v.abs());
    }
    let head = values[0];
    let tail = values[19];
    let mut growing = 0;
    for k in 11..19 {
        if values[k + 1] > 1.5 * values[k] && values[k + 1] > 1e-12 {
            growing += 1;
        }
    }
    if growing >= 7 && tail > 1e3 * (head + 1e-12) {
        return Err(NumError::NonFiniteIntegrand);
    }
    Ok(())
}

/// Fixed Gauss-Legendre quadrature of the Vainberg-Tonti homotopy integral
/// `Σ_{σ ∈ scaled} y^σ(p) ∫₀¹ ε_σ(χ_u(p)) du`.
///
/// Divergent integrands (e.g. weight −1 behavior near u = 0) are detected by
/// dyadic sampling u = 2^{-k}, k = 1..20, before the quadrature runs.
pub fn numeric_vt_lagrangian(
    eps: &SourceDensity,
    p: &JetPoint,
    scaled: &BTreeSet<usize>,
    rule: &GaussLegendre,
) -> Result<f64, NumError> {
    let contraction: Vec<(usize, f64)> = scaled
        .iter()
        .map(|&slot| Ok((slot, p.value(&JetVar::field(slot, MultiIndex::empty()))?)))
        .collect::<Result<_, NumError>>()?;
    let mut integrand = |u: f64| -> Result<f64, NumError> {
        let moved = p.scaled_fields(u, scaled);
        let comps = eps.eval(&moved)?;
        if comps.len() != eps.components() {
            return Err(NumError::Invalid("density produced wrong component count".into()));
        }
        Ok(contraction.iter().map(|&(slot, y)| y * comps[slot]).sum())
    };
    divergence_probe(&mut integrand)?;
    let mut total = 0.0;
    for (u, w) in rule.points() {
        let v = integrand(u)?;
        if !v.is_finite() {
            return Err(NumError::NonFiniteIntegrand);
        }
        total += w * v;
    }
    Ok(total)
}

/// Quadrature of the homotopy integral without the divergence probe, for
/// densities whose homothety weight is already known to be integrable (the
/// probe costs 20 extra evaluations per call, which matters when the
/// integral itself is the integrand of a nested operator).
pub fn numeric_vt_quadrature(
    eps: &SourceDensity,
    p: &JetPoint,
    scaled: &BTreeSet<usize>,
    rule: &GaussLegendre,
) -> Result<f64, NumError> {
    let contraction: Vec<(usize, f64)> = scaled
        .iter()
        .map(|&slot| Ok((slot, p.value(&JetVar::field(slot, MultiIndex::empty()))?)))
        .collect::<Result<_, NumError>>()?;
    let mut total = 0.0;
    for (u, w) in rule.points() {
        let moved = p.scaled_fields(u, scaled);
        let comps = eps.eval(&moved)?;
        let v: f64 = contraction.iter().map(|&(slot, y)| y * comps[slot]).sum();
        if !v.is_finite() {
            return Err(NumError::NonFiniteIntegrand);
        }
        total += w * v;
    }
    Ok(total)
}

/// Result of the numeric Euler-Lagrange operator: one value per field slot
/// plus a finite-difference error estimate (difference between two outer
/// step sizes). Estimates above ~1e-4 deserve suspicion.
#[derive(Debug, Clone)]
pub struct ElValues {
    pub components: Vec<f64>,
    pub fd_error: f64,
}

fn el_pass(
    spec: &JetSpec,
    l: &DensityFn,
    section: &PolySection,
    cfg: &StencilCfg,
) -> Result<Vec<f64>, NumError> {
    let s = l.order();
    let n = spec.base_dim();
    let mut grid = SectionGrid::new(section, s, cfg.clone());
    let mut comps = Vec::with_capacity(spec.field_count());
    for slot in 0..spec.field_count() {
        let mut total = 0.0;
        for k in 0..=s {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            for idx in multisets(n, k) {
                let v = JetVar::field(slot, idx.clone());
                let d = grid.total_mixed_of_partial(l, &v, idx.indices())?;
                total += sign * d;
            }
        }
        comps.push(total);
    }
    Ok(comps)
}

/// Settings for the nested Euler-Lagrange operator.
#[derive(Debug, Clone, Default)]
pub struct ElConfig {
    pub stencil: StencilCfg,
    /// Repeat the sum at twice the outer step and report the difference as
    /// the error estimate. Costs a second pass.
    pub estimate_error: bool,
}

/// Numeric Euler-Lagrange values `E_σ(p)` of a scalar density of order s at
/// a point of order ≥ 2s.
///
/// The alternating-sign sum of iterated total derivatives is evaluated by
/// differentiating along a polynomial section through the point, which
/// realizes each `d_{j₁}…d_{jₖ} ∂L/∂y^σ_J` as a mixed x-derivative of a
/// single-level finite difference.
pub fn numeric_euler_lagrange(
    spec: &JetSpec,
    l: &DensityFn,
    p: &JetPoint,
) -> Result<ElValues, NumError> {
    numeric_euler_lagrange_cfg(
        spec,
        l,
        p,
        &ElConfig { stencil: StencilCfg::default(), estimate_error: true },
    )
}

/// [`numeric_euler_lagrange`] with explicit stencil settings.
pub fn numeric_euler_lagrange_cfg(
    spec: &JetSpec,
    l: &DensityFn,
    p: &JetPoint,
    cfg: &ElConfig,
) -> Result<ElValues, NumError> {
    if p.order() < 2 * l.order() {
        return Err(NumError::IncompletePoint(format!(
            "Euler-Lagrange of an order-{} density needs a point of order ≥ {}",
            l.order(),
            2 * l.order()
        )));
    }
    let section = PolySection::new(spec, p);
    let fine = el_pass(spec, l, &section, &cfg.stencil)?;
    let fd_error = if cfg.estimate_error {
        let coarse =
            StencilCfg { outer_step: cfg.stencil.outer_step * 2.0, ..cfg.stencil.clone() };
        let check = el_pass(spec, l, &section, &coarse)?;
        fine.iter()
            .zip(check.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    Ok(ElValues { components: fine, fd_error })
}

/// Numeric values of the Helmholtz coefficients at a point.
#[derive(Debug, Clone)]
pub struct HelmholtzValues {
    pub order: usize,
    pub entries: BTreeMap<(usize, usize, MultiIndex), f64>,
}

impl HelmholtzValues {
    pub fn max_abs(&self) -> f64 {
        self.entries.values().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// "numerically variational at p" when every coefficient is below `tol`.
    pub fn is_variational(&self, tol: f64) -> bool {
        self.max_abs() < tol
    }
}

/// Numeric Helmholtz coefficients
/// `H_{σν}^J = ∂ε_σ/∂y^ν_J − (−1)^{|J|} ∂ε_ν/∂y^σ_J
///  − Σ_{l>|J|} (−1)^l Σ_{|I|=l−|J|} binom(J∪I;J) d_I ∂ε_ν/∂y^σ_{J∪I}`
/// of a source density of order r at a point of order ≥ 2r.
pub fn numeric_helmholtz(
    spec: &JetSpec,
    eps: &SourceDensity,
    p: &JetPoint,
) -> Result<HelmholtzValues, NumError> {
    let r = eps.order();
    if p.order() < 2 * r {
        return Err(NumError::IncompletePoint(format!(
            "Helmholtz of an order-{} source needs a point of order ≥ {}",
            r,
            2 * r
        )));
    }
    let n = spec.base_dim();
    let m = spec.field_count();
    let section = PolySection::new(spec, p);
    let mut grid = SectionGrid::new(&section, r, StencilCfg::default());

    let mut entries = BTreeMap::new();
    for k in 0..=r {
        for j in multisets(n, k) {
            for sigma in 0..m {
                for nu in 0..m {
                    let term1 =
                        grid.partial_vector(eps, &JetVar::field(nu, j.clone()), &[])?[sigma];
                    let term2 =
                        grid.partial_vector(eps, &JetVar::field(sigma, j.clone()), &[])?[nu];
                    let sign_k = if k % 2 == 0 { 1.0 } else { -1.0 };
                    let mut h = term1 - sign_k * term2;
                    for l in (k + 1)..=r {
                        let sign_l = if l % 2 == 0 { 1.0 } else { -1.0 };
                        for i_idx in multisets(n, l - k) {
                            let joined = j.union(&i_idx);
                            let weight = multiset_binomial(&j, &i_idx) as f64;
                            let d = grid.partial_vector(
                                eps,
                                &JetVar::field(sigma, joined.clone()),
                                i_idx.indices(),
                            )?[nu];
                            h -= sign_l * weight * d;
                        }
                    }
                    entries.insert((sigma, nu, j.clone()), h);
                }
            }
        }
    }
    Ok(HelmholtzValues { order: r, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{rat, Expr};
    use crate::jet::{JetSpec, ParamDecl};

    fn spec1() -> SpecRef {
        JetSpec::mechanics("t", "q", 1, 2, vec![ParamDecl::scalar("m"), ParamDecl::scalar("k")])
            .unwrap()
    }

    #[test]
    fn eval_examples() {
        let spec = spec1();
        let qdot = Expr::field(0, MultiIndex::new(vec![0]));
        let mut p = JetPoint::zeros(&spec, 2);
        p.set(&JetVar::field(0, MultiIndex::new(vec![0])), 3.0).unwrap();
        // q̇² at q̇ = 3
        assert_eq!(eval(&qdot.pow(2), &p).unwrap(), 9.0);
        assert_eq!(eval(&Expr::zero(), &p).unwrap(), 0.0);

        // ½ m q̈ q + ½ k q² at q=1, q̇=0, q̈=2, m=1, k=4 → 3
        let q = Expr::field(0, MultiIndex::empty());
        let qdd = Expr::field(0, MultiIndex::new(vec![0, 0]));
        let e = Expr::param(&spec, 0, vec![])
            .mul(&qdd)
            .mul(&q)
            .scale(&rat(1, 2))
            .add(&Expr::param(&spec, 1, vec![]).mul(&q.pow(2)).scale(&rat(1, 2)));
        let mut p = JetPoint::zeros(&spec, 2);
        p.set(&JetVar::field(0, MultiIndex::empty()), 1.0).unwrap();
        p.set(&JetVar::field(0, MultiIndex::new(vec![0, 0])), 2.0).unwrap();
        p.set_param(0, vec![], 1.0);
        p.set_param(1, vec![], 4.0);
        assert_eq!(eval(&e, &p).unwrap(), 3.0);
    }

    #[test]
    fn incomplete_point_is_reported() {
        let spec = spec1();
        let p = JetPoint::zeros(&spec, 0);
        let qdot = Expr::field(0, MultiIndex::new(vec![0]));
        assert!(matches!(eval(&qdot, &p), Err(NumError::IncompletePoint(_))));
        let e = Expr::param(&spec, 0, vec![]);
        assert!(matches!(eval(&e, &p), Err(NumError::IncompletePoint(_))));
    }

    #[test]
    fn partial_known_derivative() {
        // f = q̇²: ∂f/∂q̇ at q̇ = 3 → 6 ± 1e−6
        let spec = spec1();
        let qdot = Expr::field(0, MultiIndex::new(vec![0]));
        let f = DensityFn::from_expr(&spec, &qdot.pow(2));
        let mut p = JetPoint::zeros(&spec, 1);
        let v = JetVar::field(0, MultiIndex::new(vec![0]));
        p.set(&v, 3.0).unwrap();
        let d = numeric_partial(&f, &p, &v, &FdConfig::default()).unwrap();
        assert!((d - 6.0).abs() < 1e-6, "got {}", d);
        // constants have zero derivative
        let c = DensityFn::new(0, |_| Ok(7.5));
        let d0 = numeric_partial(&c, &p, &v, &FdConfig::default()).unwrap();
        assert_eq!(d0, 0.0);
    }

    #[test]
    fn total_derivative_chain_rule() {
        let spec = spec1();
        // f = q at {q̇ = 7} → 7
        let q = Expr::field(0, MultiIndex::empty());
        let f = DensityFn::from_expr(&spec, &q);
        let mut p = JetPoint::zeros(&spec, 1);
        p.set(&JetVar::field(0, MultiIndex::new(vec![0])), 7.0).unwrap();
        let d = numeric_total_derivative(&spec, &f, &p, 0, &FdConfig::default()).unwrap();
        assert!((d - 7.0).abs() < 1e-8, "got {}", d);

        // f = y y₁ at {y: 2, y₁: 3, y₁₁: 5} → 9 + 10 = 19
        let y = Expr::field(0, MultiIndex::empty());
        let y1 = Expr::field(0, MultiIndex::new(vec![0]));
        let f = DensityFn::from_expr(&spec, &y.mul(&y1));
        let mut p = JetPoint::zeros(&spec, 2);
        p.set(&JetVar::field(0, MultiIndex::empty()), 2.0).unwrap();
        p.set(&JetVar::field(0, MultiIndex::new(vec![0])), 3.0).unwrap();
        p.set(&JetVar::field(0, MultiIndex::new(vec![0, 0])), 5.0).unwrap();
        let d = numeric_total_derivative(&spec, &f, &p, 0, &FdConfig::default()).unwrap();
        assert!((d - 19.0).abs() < 1e-6, "got {}", d);

        let c = DensityFn::new(0, |_| Ok(1.0));
        let d0 = numeric_total_derivative(&spec, &c, &p, 0, &FdConfig::default()).unwrap();
        assert!(d0.abs() < 1e-12);
    }

    #[test]
    fn vt_quadrature_hand_integral() {
        // ε = −q̈ (from L = ½q̇²) at {q: 2, q̈: 5} → q·∫₀¹(−5u)du = −5
        let spec = spec1();
        let qdd = Expr::field(0, MultiIndex::new(vec![0, 0]));
        let eps = SourceDensity::from_exprs(&spec, &[qdd.neg()]);
        let mut p = JetPoint::zeros(&spec, 2);
        p.set(&JetVar::field(0, MultiIndex::empty()), 2.0).unwrap();
        p.set(&JetVar::field(0, MultiIndex::new(vec![0, 0])), 5.0).unwrap();
        let rule = GaussLegendre::new(32);
        let scaled: BTreeSet<usize> = [0].into_iter().collect();
        let v = numeric_vt_lagrangian(&eps, &p, &scaled, &rule).unwrap();
        assert!((v - (-5.0)).abs() < 1e-12, "got {}", v);

        // zero density → 0
        let zero = SourceDensity::new(0, 1, |_| Ok(vec![0.0]));
        let v0 = numeric_vt_lagrangian(&zero, &p, &scaled, &rule).unwrap();
        assert_eq!(v0, 0.0);
    }

    #[test]
    fn vt_divergence_detection() {
        // integrand ~ u⁻¹: density scaling like 1/y with y scaled
        let spec = spec1();
        let f = SourceDensity::new(0, 1, |p: &JetPoint| {
            let y = p.value(&JetVar::field(0, MultiIndex::empty()))?;
            Ok(vec![1.0 / y])
        });
        let mut p = JetPoint::zeros(&spec, 0);
        p.set(&JetVar::field(0, MultiIndex::empty()), 1.3).unwrap();
        let rule = GaussLegendre::new(32);
        let scaled: BTreeSet<usize> = [0].into_iter().collect();
        assert_eq!(
            numeric_vt_lagrangian(&f, &p, &scaled, &rule),
            Err(NumError::NonFiniteIntegrand)
        );
    }

    #[test]
    fn numeric_el_textbook() {
        // L = ½ q̇² at q̈ = 4 → E = −4 ± 1e−5
        let spec = spec1();
        let qdot = Expr::field(0, MultiIndex::new(vec![0]));
        let l = DensityFn::from_expr(&spec, &qdot.pow(2).scale(&rat(1, 2)));
        let mut p = JetPoint::zeros(&spec, 2);
        p.set(&JetVar::field(0, MultiIndex::empty()), 1.5).unwrap();
        p.set(&JetVar::field(0, MultiIndex::new(vec![0])), -0.3).unwrap();
        p.set(&JetVar::field(0, MultiIndex::new(vec![0, 0])), 4.0).unwrap();
        let el = numeric_euler_lagrange(&spec, &l, &p).unwrap();
        assert!((el.components[0] + 4.0).abs() < 1e-5, "got {:?}", el);

        let zero = DensityFn::new(0, |_| Ok(0.0));
        let el0 = numeric_euler_lagrange(&spec, &zero, &p).unwrap();
        assert_eq!(el0.components, vec![0.0]);
    }

    #[test]
    fn point_order_requirements() {
        let spec = spec1();
        let qdot = Expr::field(0, MultiIndex::new(vec![0]));
        let l = DensityFn::from_expr(&spec, &qdot.pow(2));
        let p = JetPoint::zeros(&spec, 1);
        assert!(matches!(
            numeric_euler_lagrange(&spec, &l, &p),
            Err(NumError::IncompletePoint(_))
        ));
    }
}
