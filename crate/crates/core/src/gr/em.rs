//! Electromagnetic energy-momentum fixtures on the fibered product of the
//! metric bundle with the 4-potential vector field.
//!
//! The field variables are the contravariant components A^k: only with that
//! choice does the Noether tensor density scale with weight +1 under the
//! metric homothety, making its Vainberg-Tonti Lagrangian finite. The
//! covariant-component formulation is kept alongside precisely because its
//! weight is −1 and the homotopy integral must be detected as divergent.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::jet::{multisets, FieldFamily, JetSpec, JetVar, MultiIndex, SpecRef};
use crate::numjet::{
    numeric_vt_quadrature, DensityFn, GaussLegendre, JetPoint, NumError, SourceDensity,
};

use super::{
    christoffel, invert_metric, metric_determinant, metric_view, pack_symmetric, sym_count,
    sym_slot, MetricJet,
};

/// Chart of the fibered product: metric slots first, then the potential
/// components A^0..A^{n−1}.
pub fn em_spec(n: usize) -> SpecRef {
    JetSpec::new(
        (0..n).map(|i| format!("x{}", i)).collect(),
        vec![
            FieldFamily { name: "g".into(), components: sym_count(n) },
            FieldFamily { name: "A".into(), components: n },
        ],
        2,
        vec![],
        vec![],
    )
    .expect("valid electromagnetic chart")
}

/// A metric jet extended with potential values A^k, A^k_{,l} (and A^k_{,lm}
/// for Euler-Lagrange checks). Values up to first order are cached flat, as
/// the tensors sit inside finite-difference loops.
#[derive(Debug, Clone)]
pub struct EmJet {
    n: usize,
    point: JetPoint,
    cache_a: Vec<f64>,
    cache_da: Vec<f64>,
}

impl EmJet {
    pub fn from_point(n: usize, point: JetPoint) -> Self {
        assert_eq!(point.spec().field_count(), sym_count(n) + n, "em chart");
        let mut cache_a = vec![0.0; n];
        let mut cache_da = vec![0.0; n * n];
        for k in 0..n {
            let slot = sym_count(n) + k;
            let pos = point.block_position(0, 0, slot).expect("potential value");
            cache_a[k] = point.raw(pos);
            for l in 0..n {
                let pos = point.block_position(1, l, slot).expect("potential derivative");
                cache_da[k * n + l] = point.raw(pos);
            }
        }
        EmJet { n, point, cache_a, cache_da }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn point(&self) -> &JetPoint {
        &self.point
    }

    pub fn metric(&self) -> MetricJet {
        metric_view(&self.point, self.n)
    }

    #[inline]
    pub fn a(&self, k: usize) -> f64 {
        self.cache_a[k]
    }

    #[inline]
    pub fn da(&self, k: usize, l: usize) -> f64 {
        self.cache_da[k * self.n + l]
    }

    /// The metric slots of the chart — the χ_u directions of the §5-style
    /// partial homothety.
    pub fn metric_slots(&self) -> BTreeSet<usize> {
        (0..sym_count(self.n)).collect()
    }

    pub fn scaled_metric(&self, u: f64) -> EmJet {
        EmJet::from_point(self.n, self.point.scaled_fields(u, &self.metric_slots()))
    }

    /// Largest |A| or |A_{,l}| value; zero exactly for the zero field.
    pub fn field_magnitude(&self) -> f64 {
        let mut mag = 0.0f64;
        for k in 0..self.n {
            mag = mag.max(self.a(k).abs());
            for l in 0..self.n {
                mag = mag.max(self.da(k, l).abs());
            }
        }
        mag
    }
}

struct EmTensors {
    /// A^l_{;h}
    cov_da: Vec<Vec<f64>>,
    /// F_{ij}
    f_low: Vec<Vec<f64>>,
    ginv: Vec<Vec<f64>>,
    sqrt_det: f64,
}

fn em_tensors(ej: &EmJet) -> Result<EmTensors, NumError> {
    let n = ej.dim();
    let mj = ej.metric();
    let ginv = invert_metric(&mj.matrix())?;
    let gamma = christoffel(&mj)?;
    // A^l_{;h} = A^l_{,h} + Γ^l_{hb} A^b  (formal covariant differentiation)
    let mut cov_da = vec![vec![0.0; n]; n];
    for l in 0..n {
        for h in 0..n {
            let mut total = ej.da(l, h);
            for b in 0..n {
                total += gamma[l][h][b] * ej.a(b);
            }
            cov_da[l][h] = total;
        }
    }
    // F_{ij} = g_{jk} A^k_{;i} − g_{ik} A^k_{;j}
    let mut f_low = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut total = 0.0;
            for k in 0..n {
                total += mj.g(j, k) * cov_da[k][i] - mj.g(i, k) * cov_da[k][j];
            }
            f_low[i][j] = total;
        }
    }
    let sqrt_det = metric_determinant(&mj.matrix()).abs().sqrt();
    Ok(EmTensors { cov_da, f_low, ginv, sqrt_det })
}

fn raise_second(f_low: &[Vec<f64>], ginv: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = f_low.len();
    // F^j_{ l} = g^{ja} F_{al}
    let mut out = vec![vec![0.0; n]; n];
    for j in 0..n {
        for l in 0..n {
            out[j][l] = (0..n).map(|a| ginv[j][a] * f_low[a][l]).sum();
        }
    }
    out
}

fn f_squared(f_low: &[Vec<f64>], ginv: &[Vec<f64>]) -> f64 {
    let n = f_low.len();
    let mut total = 0.0;
    for k in 0..n {
        for l in 0..n {
            for a in 0..n {
                for b in 0..n {
                    total += f_low[k][l] * ginv[k][a] * ginv[l][b] * f_low[a][b];
                }
            }
        }
    }
    total
}

/// The curved-space Noether tensor density
/// `T̃^{ij} = (−(1/4π) g^{ih} A^l_{;h} F^j_l + (1/16π) g^{ij} F_{kl}F^{kl}) √|g|`.
/// Scales with weight +1 under the metric homothety; at a flat jet it
/// reduces to the special-relativistic Noether current.
pub fn em_noether_density(ej: &EmJet) -> Result<Vec<Vec<f64>>, NumError> {
    let n = ej.dim();
    let t = em_tensors(ej)?;
    let f_mixed = raise_second(&t.f_low, &t.ginv);
    let f2 = f_squared(&t.f_low, &t.ginv);
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut first = 0.0;
            for h in 0..n {
                for l in 0..n {
                    first += t.ginv[i][h] * t.cov_da[l][h] * f_mixed[j][l];
                }
            }
            out[i][j] = (-first / (4.0 * PI) + t.ginv[i][j] * f2 / (16.0 * PI)) * t.sqrt_det;
        }
    }
    Ok(out)
}

/// The special-relativistic Noether current
/// `T̃^{ij} = −(1/4π) η^{ih} A^l_{,h} F^j_l + (1/16π) η^{ij} F_{kl}F^{kl}`
/// with `F_{ij} = η_{jk}A^k_{,i} − η_{ik}A^k_{,j}` — the independent flat
/// oracle for [`em_noether_density`] at flat jets.
pub fn flat_noether_current(ej: &EmJet) -> Vec<Vec<f64>> {
    let n = ej.dim();
    let eta = |i: usize| if i == 0 { 1.0 } else { -1.0 };
    let mut f_low = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            f_low[i][j] = eta(j) * ej.da(j, i) - eta(i) * ej.da(i, j);
        }
    }
    let mut f_mixed = vec![vec![0.0; n]; n]; // F^j_l = η^{ja} F_{al}
    for j in 0..n {
        for l in 0..n {
            f_mixed[j][l] = eta(j) * f_low[j][l];
        }
    }
    let mut f2 = 0.0;
    for k in 0..n {
        for l in 0..n {
            f2 += f_low[k][l] * eta(k) * eta(l) * f_low[k][l];
        }
    }
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut first = 0.0;
            for l in 0..n {
                first += eta(i) * ej.da(l, i) * f_mixed[j][l];
            }
            out[i][j] = -first / (4.0 * PI) + if i == j { eta(i) * f2 / (16.0 * PI) } else { 0.0 };
        }
    }
    out
}

/// The three-step symmetrization at a flat jet: returns (T, τ) with
/// `T^{ij} = −α(−(1/4π) F^{il}F^j_l + (1/16π) η^{ij} F_{kl}F^{kl})` and
/// `τ^{ij} = T^{ij} − T̃^{ij}`. With α = −1 the correction is the classical
/// `(1/4π) A^i_{,l} F^{jl}` and T = T̃ + τ is symmetric and conserved.
pub fn em_symmetrized_tensor(ej: &EmJet, alpha: f64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = ej.dim();
    let eta = |i: usize| if i == 0 { 1.0 } else { -1.0 };
    let mut f_low = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            f_low[i][j] = eta(j) * ej.da(j, i) - eta(i) * ej.da(i, j);
        }
    }
    let mut f2 = 0.0;
    for k in 0..n {
        for l in 0..n {
            f2 += f_low[k][l] * eta(k) * eta(l) * f_low[k][l];
        }
    }
    let noether = flat_noether_current(ej);
    let mut t = vec![vec![0.0; n]; n];
    let mut tau = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            // F^{il} = η^{ia}η^{lb}F_{ab}; F^j_l = η^{ja}F_{al}
            let mut first = 0.0;
            for l in 0..n {
                let f_up_il = eta(i) * eta(l) * f_low[i][l];
                let f_mixed_jl = eta(j) * f_low[j][l];
                first += f_up_il * f_mixed_jl;
            }
            let eta_term = if i == j { eta(i) * f2 / (16.0 * PI) } else { 0.0 };
            t[i][j] = -alpha * (-first / (4.0 * PI) + eta_term);
            tau[i][j] = t[i][j] - noether[i][j];
        }
    }
    (t, tau)
}

/// Closed form of the Met(X)-Vainberg-Tonti Lagrangian density of the
/// Noether source: `(α/16π) F^{kl}F_{kl} √|g|`.
pub fn em_vt_closed_form(ej: &EmJet, alpha: f64) -> Result<f64, NumError> {
    let t = em_tensors(ej)?;
    Ok(alpha / (16.0 * PI) * f_squared(&t.f_low, &t.ginv) * t.sqrt_det)
}

/// The Noether source form over the em chart: metric components carry
/// `(2 − δ_jk) α T̃^{jk}`, potential components are zero (a Met(X)-source
/// form has no A-directions).
pub fn em_noether_source_density(n: usize, alpha: f64) -> SourceDensity {
    let m = sym_count(n) + n;
    SourceDensity::new(1, m, move |p: &JetPoint| {
        let ej = EmJet::from_point(n, p.clone());
        let t = em_noether_density(&ej)?;
        let mut packed = pack_symmetric(n, &t);
        for row in packed.iter_mut() {
            *row *= alpha;
        }
        packed.extend(std::iter::repeat(0.0).take(n));
        Ok(packed)
    })
}

/// The same Noether density expressed in the covariant potential components
/// A_i (the point's A-slots are read as A_i). Under the metric homothety
/// this density has weight −1, so its homotopy integral diverges — the
/// fixture exists to be detected, not integrated.
pub fn em_noether_covariant_source_density(n: usize, alpha: f64) -> SourceDensity {
    let m = sym_count(n) + n;
    SourceDensity::new(1, m, move |p: &JetPoint| {
        let ej = EmJet::from_point(n, p.clone());
        let mj = ej.metric();
        let ginv = invert_metric(&mj.matrix())?;
        let gamma = christoffel(&mj)?;
        // A_{a;h} = A_{a,h} − Γ^c_{ah} A_c
        let mut cov_da_low = vec![vec![0.0; n]; n];
        for a in 0..n {
            for h in 0..n {
                let mut total = ej.da(a, h);
                for c in 0..n {
                    total -= gamma[c][a][h] * ej.a(c);
                }
                cov_da_low[a][h] = total;
            }
        }
        // A^l_{;h} = g^{la} A_{a;h}
        let mut cov_da = vec![vec![0.0; n]; n];
        for l in 0..n {
            for h in 0..n {
                cov_da[l][h] = (0..n).map(|a| ginv[l][a] * cov_da_low[a][h]).sum();
            }
        }
        // F_{ij} = A_{j;i} − A_{i;j} = A_{j,i} − A_{i,j}
        let mut f_low = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                f_low[i][j] = ej.da(j, i) - ej.da(i, j);
            }
        }
        let f_mixed = raise_second(&f_low, &ginv);
        let f2 = f_squared(&f_low, &ginv);
        let sqrt_det = metric_determinant(&mj.matrix()).abs().sqrt();
        let mut t = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut first = 0.0;
                for h in 0..n {
                    for l in 0..n {
                        first += ginv[i][h] * cov_da[l][h] * f_mixed[j][l];
                    }
                }
                t[i][j] =
                    alpha * (-first / (4.0 * PI) + ginv[i][j] * f2 / (16.0 * PI)) * sqrt_det;
            }
        }
        let mut packed = pack_symmetric(n, &t);
        packed.extend(std::iter::repeat(0.0).take(n));
        Ok(packed)
    })
}

/// Rewrites an em-chart point whose potential slots hold the covariant
/// components A_i into the equivalent contravariant-variable point of order
/// 1: `A^k = g^{kl} A_l`, `A^k_{,m} = (∂_m g^{kl}) A_l + g^{kl} A_{l,m}`
/// with `∂_m g^{kl} = −g^{ka} g_{ab,m} g^{bl}`.
pub fn covariant_to_contravariant_point(p: &JetPoint, n: usize) -> Result<JetPoint, NumError> {
    let mj = metric_view(p, n);
    let ginv = invert_metric(&mj.matrix())?;
    let cov = EmJet::from_point(n, p.clone());
    let spec = em_spec(n);
    let mut q = JetPoint::zeros(&spec, 1);
    for slot in 0..sym_count(n) {
        for k in 0..=1usize {
            for idx in multisets(n, k) {
                let v = JetVar::field(slot, idx.clone());
                q.set(&v, p.value(&v)?)?;
            }
        }
    }
    for k in 0..n {
        let mut a_up = 0.0;
        for l in 0..n {
            a_up += ginv[k][l] * cov.a(l);
        }
        q.set(&JetVar::field(sym_count(n) + k, MultiIndex::empty()), a_up)?;
        for m in 0..n {
            let mut da_up = 0.0;
            for l in 0..n {
                let mut dginv_kl = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        dginv_kl -= ginv[k][a] * mj.dg(a, b, m) * ginv[b][l];
                    }
                }
                da_up += dginv_kl * cov.a(l) + ginv[k][l] * cov.da(l, m);
            }
            q.set(&JetVar::field(sym_count(n) + k, MultiIndex::single(m)), da_up)?;
        }
    }
    Ok(q)
}

/// The Vainberg-Tonti density of the Noether source presented in the
/// variables the Hilbert variation holds fixed.
///
/// The homotopy integral is taken with the contravariant components A^k as
/// the field variables (the only finite choice), but the energy-momentum
/// tensor is the metric variation of the resulting density with the
/// potential 1-form A_i held fixed — the matter Lagrangian of the
/// first-order Hilbert definition carries no metric-derivative dependence.
/// Presenting the quadrature density on the covariant chart (converting to
/// A^k pointwise inside the evaluation) realizes exactly that variation.
pub fn em_vt_density_form_fixed(n: usize, alpha: f64) -> DensityFn {
    let eps = em_noether_source_density(n, alpha);
    let rule = GaussLegendre::new(32);
    let metric_slots: BTreeSet<usize> = (0..sym_count(n)).collect();
    DensityFn::new(1, move |p: &JetPoint| {
        let q = covariant_to_contravariant_point(p, n)?;
        numeric_vt_quadrature(&eps, &q, &metric_slots, &rule)
    })
}

/// Lowers the potential slots of a flat em jet (metric exactly η with zero
/// derivatives): every A-coordinate picks up the sign η_kk.
pub fn flat_covariant_point(ej: &EmJet) -> JetPoint {
    let n = ej.dim();
    let p = ej.point();
    let mut out = p.clone();
    for k in 0..n {
        let sign = if k == 0 { 1.0 } else { -1.0 };
        let slot = sym_count(n) + k;
        for ord in 0..=p.order() {
            for idx in multisets(n, ord) {
                let v = JetVar::field(slot, idx.clone());
                let value = p.value(&v).expect("potential coordinate");
                out.set(&v, sign * value).expect("potential coordinate");
            }
        }
    }
    out
}

/// Seeded random em jet: flat or sampled metric part, potential coordinates
/// uniform in [−1, 1] at every order. Deterministic per seed.
pub fn sample_em_jet(seed: u64, n: usize, order: usize, flat_metric: bool) -> EmJet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = em_spec(n);
    loop {
        let mut p = JetPoint::zeros(&spec, order);
        for j in 0..n {
            for k in j..n {
                let eta = if j == k {
                    if j == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                } else {
                    0.0
                };
                let delta: f64 = if flat_metric { 0.0 } else { rng.gen_range(-0.2..0.2) };
                p.set(&JetVar::field(sym_slot(n, j, k), MultiIndex::empty()), eta + delta)
                    .expect("metric slot");
            }
        }
        if !flat_metric {
            for k in 1..=order {
                for idx in multisets(n, k) {
                    for slot in 0..sym_count(n) {
                        let v: f64 = rng.gen_range(-0.5..0.5);
                        p.set(&JetVar::field(slot, idx.clone()), v).expect("metric derivative");
                    }
                }
            }
        }
        for k in 0..=order {
            for idx in multisets(n, k) {
                for a in 0..n {
                    let v: f64 = rng.gen_range(-1.0..1.0);
                    p.set(&JetVar::field(sym_count(n) + a, idx.clone()), v)
                        .expect("potential coordinate");
                }
            }
        }
        let ej = EmJet::from_point(n, p);
        if metric_determinant(&ej.metric().matrix()).abs() > 1e-6 {
            return ej;
        }
    }
}

/// The zero-field em jet over a flat metric.
pub fn zero_em_jet(n: usize, order: usize) -> EmJet {
    let spec = em_spec(n);
    let mut p = JetPoint::zeros(&spec, order);
    for j in 0..n {
        let value = if j == 0 { 1.0 } else { -1.0 };
        p.set(&JetVar::field(sym_slot(n, j, j), MultiIndex::empty()), value)
            .expect("metric slot");
    }
    EmJet::from_point(n, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numjet::{numeric_vt_lagrangian, GaussLegendre};

    fn max_abs(t: &[Vec<f64>]) -> f64 {
        t.iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    #[test]
    fn constant_potential_gives_zero_current() {
        // A constant, metric flat: F = 0, T̃ = 0
        let spec = em_spec(4);
        let mut p = JetPoint::zeros(&spec, 1);
        for j in 0..4 {
            p.set(&JetVar::field(sym_slot(4, j, j), MultiIndex::empty()), if j == 0 { 1.0 } else { -1.0 })
                .unwrap();
        }
        for k in 0..4 {
            p.set(&JetVar::field(sym_count(4) + k, MultiIndex::empty()), 0.3 * k as f64 + 0.1)
                .unwrap();
        }
        let ej = EmJet::from_point(4, p);
        assert_eq!(max_abs(&em_noether_density(&ej).unwrap()), 0.0);
    }

    #[test]
    fn noether_density_weight_one() {
        // T̃(u·g) = u · T̃(g) at u = 0.25
        let ej = sample_em_jet(3, 4, 1, false);
        let t1 = em_noether_density(&ej).unwrap();
        let t2 = em_noether_density(&ej.scaled_metric(0.25)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!(
                    (t2[i][j] - 0.25 * t1[i][j]).abs() < 1e-12 * t1[i][j].abs().max(1.0),
                    "({}, {}): {} vs {}",
                    i,
                    j,
                    t2[i][j],
                    0.25 * t1[i][j]
                );
            }
        }
    }

    #[test]
    fn flat_reduction_matches_eta_formula() {
        for seed in 0..20 {
            let ej = sample_em_jet(100 + seed, 4, 1, true);
            let curved = em_noether_density(&ej).unwrap();
            let flat = flat_noether_current(&ej);
            for i in 0..4 {
                for j in 0..4 {
                    assert!(
                        (curved[i][j] - flat[i][j]).abs() < 1e-12 * flat[i][j].abs().max(1.0),
                        "seed {} ({}, {})",
                        seed,
                        i,
                        j
                    );
                }
            }
        }
    }

    #[test]
    fn symmetrization_fixes_asymmetry() {
        let ej = sample_em_jet(17, 4, 1, true);
        let noether = flat_noether_current(&ej);
        let (t, tau) = em_symmetrized_tensor(&ej, -1.0);
        // T̃ is generically asymmetric, T is symmetric to machine precision
        let mut asym = 0.0f64;
        let mut t_asym = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                asym = asym.max((noether[i][j] - noether[j][i]).abs());
                t_asym = t_asym.max((t[i][j] - t[j][i]).abs());
                // T = T̃ + τ by construction
                assert!((t[i][j] - noether[i][j] - tau[i][j]).abs() < 1e-15);
            }
        }
        assert!(asym > 1e-3, "witness asymmetry too small: {}", asym);
        assert!(t_asym < 1e-10);
        // with α = −1 the correction is the classical (1/4π) A^i_{,l} F^{jl}
        let eta = |i: usize| if i == 0 { 1.0 } else { -1.0 };
        let mut f_low = vec![vec![0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                f_low[i][j] = eta(j) * ej.da(j, i) - eta(i) * ej.da(i, j);
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                let mut classical = 0.0;
                for l in 0..4 {
                    let f_up_jl = eta(j) * eta(l) * f_low[j][l];
                    classical += ej.da(i, l) * f_up_jl;
                }
                classical /= 4.0 * PI;
                assert!(
                    (tau[i][j] - classical).abs() < 1e-12 * classical.abs().max(1.0),
                    "({}, {}): {} vs {}",
                    i,
                    j,
                    tau[i][j],
                    classical
                );
            }
        }
        // zero field: everything vanishes
        let zero = zero_em_jet(4, 1);
        let (t0, tau0) = em_symmetrized_tensor(&zero, -1.0);
        assert_eq!(max_abs(&t0), 0.0);
        assert_eq!(max_abs(&tau0), 0.0);
    }

    #[test]
    fn vt_quadrature_matches_closed_form() {
        // the 32-node rule is exact on the weight-1 integrand
        let rule = GaussLegendre::new(32);
        for seed in 0..5 {
            let ej = sample_em_jet(40 + seed, 4, 1, false);
            let eps = em_noether_source_density(4, -1.0);
            let value =
                numeric_vt_lagrangian(&eps, ej.point(), &ej.metric_slots(), &rule).unwrap();
            let expected = em_vt_closed_form(&ej, -1.0).unwrap();
            assert!(
                (value - expected).abs() < 1e-10 * expected.abs().max(1.0),
                "seed {}: {} vs {}",
                seed,
                value,
                expected
            );
        }
    }

    #[test]
    fn covariant_formulation_diverges() {
        let rule = GaussLegendre::new(32);
        let eps = em_noether_covariant_source_density(4, -1.0);
        for seed in 0..5 {
            let ej = sample_em_jet(60 + seed, 4, 1, false);
            assert_eq!(
                numeric_vt_lagrangian(&eps, ej.point(), &ej.metric_slots(), &rule),
                Err(NumError::NonFiniteIntegrand),
                "seed {}",
                seed
            );
            // while the contravariant formulation is finite at the same point
            let contra = em_noether_source_density(4, -1.0);
            assert!(
                numeric_vt_lagrangian(&contra, ej.point(), &ej.metric_slots(), &rule).is_ok()
            );
        }
        // degenerate zero field: integrand identically zero, defined, 0
        let zero = zero_em_jet(4, 1);
        let value = numeric_vt_lagrangian(&eps, zero.point(), &zero.metric_slots(), &rule).unwrap();
        assert_eq!(value, 0.0);
    }
}
