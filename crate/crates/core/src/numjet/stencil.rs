//! Iterated total derivatives of black-box densities, realized as mixed
//! x-derivatives along a polynomial section.
//!
//! For any section γ whose jet at x₀ matches the point p to high enough
//! order, `(d_{i₁}…d_{iₗ} f)(p) = ∂_{i₁…iₗ} [ f ∘ jˢγ ](x₀)`. Taking γ to be
//! the Taylor-polynomial section determined by p turns every nested total
//! derivative into a single-level finite-difference stencil in the base
//! variables, with the inner coordinate partial as the only other
//! finite-difference level. This keeps the noise floor of the nested
//! Euler-Lagrange and Helmholtz operators near 1e-6 instead of the
//! 1e-2..1e-3 of naive recursive chain-rule nesting.

use std::collections::{BTreeMap, HashMap};

use crate::jet::{multisets, JetSpec, JetVar, MultiIndex, SpecRef};

use super::{DensityFn, JetPoint, NumError, SourceDensity};

/// Step sizes for the section stencils.
#[derive(Debug, Clone)]
pub struct StencilCfg {
    /// Absolute step in the base variables for the outer mixed derivatives.
    pub outer_step: f64,
    /// Relative step for the inner coordinate partial.
    pub inner_rel_step: f64,
    /// Inner stencil width: 2 (central) or 4 (4th order).
    pub inner_points: usize,
}

impl Default for StencilCfg {
    fn default() -> Self {
        StencilCfg { outer_step: 2e-2, inner_rel_step: 2e-5, inner_points: 2 }
    }
}

/// 4th-order central first-derivative stencil: offsets and weights (to be
/// divided by 12h). Composing these along axes keeps O(h⁴) truncation for
/// mixed and repeated derivatives.
const STENCIL_1D: [(i32, f64); 4] = [(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];

/// The Taylor-polynomial section through a jet point: for each field slot,
/// `y(x) = Σ_K p[y_K] (x−x₀)^K / K!` so that its jet at x₀ reproduces every
/// coordinate of the point.
pub(crate) struct PolySection {
    spec: SpecRef,
    x0: Vec<f64>,
    /// per slot: (multiset K, coefficient p[y_K]/K!)
    coeffs: Vec<Vec<(MultiIndex, f64)>>,
    params: BTreeMap<(usize, Vec<u8>), f64>,
    source_order: usize,
}

impl PolySection {
    pub fn new(spec: &JetSpec, p: &JetPoint) -> Self {
        let n = spec.base_dim();
        let m = spec.field_count();
        let x0: Vec<f64> = (0..n)
            .map(|i| p.value(&JetVar::Base(i)).expect("base coordinate"))
            .collect();
        let mut coeffs = vec![Vec::new(); m];
        for k in 0..=p.order() {
            for idx in multisets(n, k) {
                let fact = idx.mult_factorial() as f64;
                for (slot, cs) in coeffs.iter_mut().enumerate() {
                    let val = p
                        .value(&JetVar::field(slot, idx.clone()))
                        .expect("complete point");
                    if val != 0.0 {
                        cs.push((idx.clone(), val / fact));
                    }
                }
            }
        }
        PolySection {
            spec: p.spec().clone(),
            x0,
            coeffs,
            params: p.params().clone(),
            source_order: p.order(),
        }
    }
}

/// `∂_J ∏_a t_a^{mult_K(a)}` evaluated at t = dx, or None when J ⊄ K.
fn derivative_monomial(k: &MultiIndex, j: &MultiIndex, dx_pows: &[Vec<f64>]) -> Option<f64> {
    let mut acc = 1.0;
    for (a, pows) in dx_pows.iter().enumerate() {
        let mk = k.multiplicity(a);
        let mj = j.multiplicity(a);
        if mj > mk {
            return None;
        }
        for s in 0..mj {
            acc *= (mk - s) as f64;
        }
        acc *= pows[mk - mj];
    }
    Some(acc)
}

/// A lazily evaluated grid of section jets at integer stencil offsets, with
/// memoized inner-partial values. One grid serves a whole operator
/// invocation; jets and values are shared across entries.
pub(crate) struct SectionGrid<'a> {
    section: &'a PolySection,
    cfg: StencilCfg,
    template: JetPoint,
    targets: Vec<(usize, JetVar)>, // (position in template, coordinate)
    jets: HashMap<Vec<i32>, JetPoint>,
    values: HashMap<(JetVar, Vec<i32>), Vec<f64>>,
    n: usize,
}

impl<'a> SectionGrid<'a> {
    pub fn new(section: &'a PolySection, target_order: usize, cfg: StencilCfg) -> Self {
        assert!(
            target_order <= section.source_order,
            "section from an order-{} point cannot produce order-{} jets",
            section.source_order,
            target_order
        );
        let spec = section.spec.clone();
        let n = spec.base_dim();
        let mut template = JetPoint::zeros(&spec, target_order);
        template.set_params_map(section.params.clone());
        let mut targets = Vec::new();
        for k in 0..=target_order {
            for idx in multisets(n, k) {
                for slot in 0..spec.field_count() {
                    let v = JetVar::field(slot, idx.clone());
                    let pos = template.position_of(&v).expect("coordinate in layout");
                    targets.push((pos, v));
                }
            }
        }
        SectionGrid {
            section,
            cfg,
            template,
            targets,
            jets: HashMap::new(),
            values: HashMap::new(),
            n,
        }
    }

    fn jet(&mut self, off: &[i32]) -> &JetPoint {
        if !self.jets.contains_key(off) {
            let h = self.cfg.outer_step;
            let dx: Vec<f64> = off.iter().map(|&o| o as f64 * h).collect();
            let max_pow = self.section.source_order;
            let dx_pows: Vec<Vec<f64>> = dx
                .iter()
                .map(|&d| (0..=max_pow).map(|e| d.powi(e as i32)).collect())
                .collect();
            let mut jet = self.template.clone();
            for (i, x0) in self.section.x0.iter().enumerate() {
                jet.set(&JetVar::Base(i), x0 + dx[i]).expect("base var");
            }
            for (pos, v) in &self.targets {
                let JetVar::Field { slot, index } = v else { unreachable!() };
                let mut y = 0.0;
                for (k_idx, c) in &self.section.coeffs[*slot] {
                    if let Some(t) = derivative_monomial(k_idx, index, &dx_pows) {
                        y += c * t;
                    }
                }
                jet.coords_mut()[*pos] = y;
            }
            self.jets.insert(off.to_vec(), jet);
        }
        &self.jets[off]
    }

    /// Inner partial `∂f/∂v` at the section jet of the given offset,
    /// 4th-order central, all components at once.
    fn g_value<F>(&mut self, f: &F, v: &JetVar, off: &[i32]) -> Result<Vec<f64>, NumError>
    where
        F: Fn(&JetPoint) -> Result<Vec<f64>, NumError>,
    {
        let key = (v.clone(), off.to_vec());
        if let Some(cached) = self.values.get(&key) {
            return Ok(cached.clone());
        }
        let base_jet = self.jet(off).clone();
        let y0 = base_jet.value(v)?;
        let h = self.cfg.inner_rel_step * y0.abs().max(1.0);
        let stencil: &[(i32, f64)] = if self.cfg.inner_points >= 4 {
            &STENCIL_1D
        } else {
            &[(-1, -6.0), (1, 6.0)] // plain central, same 1/(12h) normalization
        };
        let mut acc: Option<Vec<f64>> = None;
        for &(o, w) in stencil {
            let mut moved = base_jet.clone();
            moved.set(v, y0 + o as f64 * h)?;
            let vals = f(&moved)?;
            match &mut acc {
                None => acc = Some(vals.iter().map(|x| w * x).collect()),
                Some(a) => {
                    for (ai, vi) in a.iter_mut().zip(vals) {
                        *ai += w * vi;
                    }
                }
            }
        }
        let mut out = acc.unwrap_or_default();
        for x in &mut out {
            *x /= 12.0 * h;
        }
        self.values.insert(key, out.clone());
        Ok(out)
    }

    fn mixed<F>(
        &mut self,
        f: &F,
        v: &JetVar,
        dirs: &[u8],
        off: &mut Vec<i32>,
    ) -> Result<Vec<f64>, NumError>
    where
        F: Fn(&JetPoint) -> Result<Vec<f64>, NumError>,
    {
        let Some((&axis, rest)) = dirs.split_first() else {
            return self.g_value(f, v, off);
        };
        let mut acc: Option<Vec<f64>> = None;
        for (o, w) in STENCIL_1D {
            off[axis as usize] += o;
            let sub = self.mixed(f, v, rest, off)?;
            off[axis as usize] -= o;
            match &mut acc {
                None => acc = Some(sub.iter().map(|x| w * x).collect()),
                Some(a) => {
                    for (ai, si) in a.iter_mut().zip(sub) {
                        *ai += w * si;
                    }
                }
            }
        }
        let mut out = acc.unwrap_or_default();
        for x in &mut out {
            *x /= 12.0 * self.cfg.outer_step;
        }
        Ok(out)
    }

    /// `d_I ∂ε/∂v` at the grid center, all source components at once.
    /// `i_dirs` is the multiset I as a slice of base indices.
    pub fn partial_vector(
        &mut self,
        eps: &SourceDensity,
        v: &JetVar,
        i_dirs: &[u8],
    ) -> Result<Vec<f64>, NumError> {
        let func = |p: &JetPoint| eps.eval(p);
        let mut off = vec![0i32; self.n];
        self.mixed(&func, v, i_dirs, &mut off)
    }

    /// `d_I ∂L/∂v` at the grid center for a scalar density.
    pub fn total_mixed_of_partial(
        &mut self,
        l: &DensityFn,
        v: &JetVar,
        i_dirs: &[u8],
    ) -> Result<f64, NumError> {
        let func = |p: &JetPoint| l.eval(p).map(|x| vec![x]);
        let mut off = vec![0i32; self.n];
        Ok(self.mixed(&func, v, i_dirs, &mut off)?[0])
    }
}
