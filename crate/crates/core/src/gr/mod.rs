//! Numeric realizations of the metric-bundle objects: Christoffel symbols,
//! curvature, the Hilbert and Ricci densities, the Einstein tensor density,
//! and the electromagnetic energy-momentum fixtures. Everything here is a
//! plain function of jet values — no symbolic tensor calculus — packaged as
//! [`DensityFn`]/[`SourceDensity`] adapters so the numeric operators can
//! drive it.
//!
//! The metric is represented by its independent components g_{jk}, j ≤ k,
//! one field slot each. A symmetric tensor density T^{jk} enters source-form
//! component arrays with the multiplicity weight (2 − δ_jk), which makes the
//! slot-wise contraction Σ_{j≤k} g_{jk}·(2−δ)T^{jk} equal the tensor
//! contraction g_{ij}T^{ij}.

mod em;
mod verify;

pub use em::{
    covariant_to_contravariant_point, em_noether_covariant_source_density, em_noether_density,
    em_noether_source_density, em_spec, em_symmetrized_tensor, em_vt_closed_form,
    em_vt_density_form_fixed, flat_covariant_point, flat_noether_current, sample_em_jet,
    zero_em_jet, EmJet,
};
pub use verify::{check_names, run_scenario, CheckOverride, GrCheckResult, GrScenario};

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::jet::{multisets, FieldFamily, JetSpec, JetVar, MultiIndex, SpecRef};
use crate::numjet::{DensityFn, JetPoint, NumError, SourceDensity};

/// Number of independent components of a symmetric n×n tensor.
pub fn sym_count(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Slot index of the independent component (j, k), j ≤ k, row-major over
/// the upper triangle.
pub fn sym_slot(n: usize, j: usize, k: usize) -> usize {
    let (j, k) = if j <= k { (j, k) } else { (k, j) };
    j * n - j * (j + 1) / 2 + k
}

/// The chart of the metric bundle: base x^0..x^{n−1}, field family `g` with
/// one slot per independent component, problem order 2.
pub fn metric_spec(n: usize) -> SpecRef {
    JetSpec::new(
        (0..n).map(|i| format!("x{}", i)).collect(),
        vec![FieldFamily { name: "g".into(), components: sym_count(n) }],
        2,
        vec![],
        vec![],
    )
    .expect("valid metric chart")
}

/// A numeric metric jet: values g_{jk}, g_{jk,i}, g_{jk,il} (and optionally
/// orders 3-4 for nested Euler-Lagrange checks) over [`metric_spec`].
///
/// The values up to second order are cached in flat arrays at construction;
/// the tensor routines are hot inside finite-difference loops and must not
/// pay a coordinate lookup per access.
#[derive(Debug, Clone)]
pub struct MetricJet {
    n: usize,
    point: JetPoint,
    cache_g: Vec<f64>,
    cache_dg: Vec<f64>,
    cache_d2g: Vec<f64>,
}

impl MetricJet {
    pub fn from_point(n: usize, point: JetPoint) -> Self {
        assert_eq!(point.spec().field_count(), sym_count(n), "metric chart");
        build_metric_view(n, point)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn point(&self) -> &JetPoint {
        &self.point
    }

    #[inline]
    pub fn g(&self, j: usize, k: usize) -> f64 {
        self.cache_g[j * self.n + k]
    }

    #[inline]
    pub fn dg(&self, j: usize, k: usize, i: usize) -> f64 {
        self.cache_dg[(j * self.n + k) * self.n + i]
    }

    #[inline]
    pub fn d2g(&self, j: usize, k: usize, i: usize, l: usize) -> f64 {
        assert!(
            !self.cache_d2g.is_empty(),
            "second metric derivatives need an order-2 point"
        );
        self.cache_d2g[((j * self.n + k) * self.n + i) * self.n + l]
    }

    /// χ_u restricted to the metric slots (all derivative orders).
    pub fn scaled(&self, u: f64) -> MetricJet {
        let scaled: BTreeSet<usize> = (0..sym_count(self.n)).collect();
        build_metric_view(self.n, self.point.scaled_fields(u, &scaled))
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|j| (0..self.n).map(|k| self.g(j, k)).collect())
            .collect()
    }
}

/// Reads a metric view out of any point whose leading field slots are the
/// independent metric components (the metric chart itself or the em chart).
pub(crate) fn metric_view(p: &JetPoint, n: usize) -> MetricJet {
    build_metric_view(n, p.clone())
}

fn build_metric_view(n: usize, point: JetPoint) -> MetricJet {
    assert!(point.order() >= 1, "metric jets carry at least first derivatives");
    let has_second = point.order() >= 2;
    let mut cache_g = vec![0.0; n * n];
    let mut cache_dg = vec![0.0; n * n * n];
    let mut cache_d2g = if has_second { vec![0.0; n * n * n * n] } else { Vec::new() };
    for j in 0..n {
        for k in 0..n {
            let slot = sym_slot(n, j, k);
            let pos = point.block_position(0, 0, slot).expect("metric value");
            cache_g[j * n + k] = point.raw(pos);
            for i in 0..n {
                // multisets of size 1 are enumerated in index order
                let pos = point.block_position(1, i, slot).expect("first derivative");
                cache_dg[(j * n + k) * n + i] = point.raw(pos);
                if has_second {
                    for l in 0..n {
                        // rank of the sorted pair (i, l) in the enumeration
                        // is the symmetric pair index
                        let rank = sym_slot(n, i, l);
                        let pos =
                            point.block_position(2, rank, slot).expect("second derivative");
                        cache_d2g[((j * n + k) * n + i) * n + l] = point.raw(pos);
                    }
                }
            }
        }
    }
    MetricJet { n, point, cache_g, cache_dg, cache_d2g }
}

/// Inverse by LU decomposition with partial pivoting. The singularity
/// threshold is scale-invariant (|det| relative to the entry scale to the
/// n-th power) so that homothety-scaled metrics u·g stay invertible for
/// small u exactly when g itself is.
pub fn invert_metric(g: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, NumError> {
    let n = g.len();
    let scale = g
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return Err(NumError::SingularMetric);
    }
    let mut a: Vec<Vec<f64>> = g.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut det = 1.0f64;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| a[r1][col].abs().total_cmp(&a[r2][col].abs()))
            .expect("nonempty column");
        if a[pivot_row][col].abs() < 1e-14 * scale {
            return Err(NumError::SingularMetric);
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            inv.swap(pivot_row, col);
            det = -det;
        }
        let pivot = a[col][col];
        det *= pivot;
        for j in 0..n {
            a[col][j] /= pivot;
            inv[col][j] /= pivot;
        }
        for row in 0..n {
            if row != col {
                let factor = a[row][col];
                if factor != 0.0 {
                    for j in 0..n {
                        a[row][j] -= factor * a[col][j];
                        inv[row][j] -= factor * inv[col][j];
                    }
                }
            }
        }
    }
    if det.abs() < 1e-9 * scale.powi(n as i32) {
        return Err(NumError::SingularMetric);
    }
    Ok(inv)
}

/// Determinant by LU with partial pivoting (same scale-invariant threshold).
pub fn metric_determinant(g: &[Vec<f64>]) -> f64 {
    let n = g.len();
    let mut a: Vec<Vec<f64>> = g.to_vec();
    let mut det = 1.0f64;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| a[r1][col].abs().total_cmp(&a[r2][col].abs()))
            .expect("nonempty column");
        if a[pivot_row][col] == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            det = -det;
        }
        let pivot = a[col][col];
        det *= pivot;
        for row in (col + 1)..n {
            let factor = a[row][col] / pivot;
            for j in col..n {
                a[row][j] -= factor * a[col][j];
            }
        }
    }
    det
}

/// All the pointwise curvature data of a metric jet.
pub struct Curvature {
    /// R^i_{jkl} indexed \[i\]\[j\]\[k\]\[l\]
    pub riemann: Vec<Vec<Vec<Vec<f64>>>>,
    pub ricci: Vec<Vec<f64>>,
    pub scalar: f64,
    pub inverse: Vec<Vec<f64>>,
    pub sqrt_det: f64,
}

/// Γ^i_{jk} = ½ g^{ih}(g_{hj,k} + g_{hk,j} − g_{jk,h}); symmetric in (j,k)
/// and invariant under the metric homothety.
pub fn christoffel(mj: &MetricJet) -> Result<Vec<Vec<Vec<f64>>>, NumError> {
    let n = mj.dim();
    let ginv = invert_metric(&mj.matrix())?;
    let mut gamma = vec![vec![vec![0.0; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut total = 0.0;
                for h in 0..n {
                    total += ginv[i][h] * (mj.dg(h, j, k) + mj.dg(h, k, j) - mj.dg(j, k, h));
                }
                gamma[i][j][k] = 0.5 * total;
            }
        }
    }
    Ok(gamma)
}

/// Γ^i_{jk,l}: the total x^l-derivative of the Christoffel display, using
/// ∂_l g^{ih} = −g^{ia} g_{ab,l} g^{bh} and the second metric derivatives.
fn christoffel_derivative(
    mj: &MetricJet,
    ginv: &[Vec<f64>],
) -> Result<Vec<Vec<Vec<Vec<f64>>>>, NumError> {
    let n = mj.dim();
    // dginv[i][h][l] = ∂_l g^{ih}
    let mut dginv = vec![vec![vec![0.0; n]; n]; n];
    for i in 0..n {
        for h in 0..n {
            for l in 0..n {
                let mut total = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        total -= ginv[i][a] * mj.dg(a, b, l) * ginv[b][h];
                    }
                }
                dginv[i][h][l] = total;
            }
        }
    }
    let mut dgamma = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut total = 0.0;
                    for h in 0..n {
                        total += dginv[i][h][l]
                            * (mj.dg(h, j, k) + mj.dg(h, k, j) - mj.dg(j, k, h));
                        total += ginv[i][h]
                            * (mj.d2g(h, j, k, l) + mj.d2g(h, k, j, l) - mj.d2g(j, k, h, l));
                    }
                    dgamma[i][j][k][l] = 0.5 * total;
                }
            }
        }
    }
    Ok(dgamma)
}

/// Ricci tensor, scalar curvature, inverse and √|det| without materializing
/// the full Riemann tensor — the workhorse of the density evaluators, which
/// sit inside finite-difference loops.
pub(crate) struct RicciData {
    /// flat n×n
    pub inv: Vec<f64>,
    /// flat n×n
    pub ricci: Vec<f64>,
    pub scalar: f64,
    pub sqrt_det: f64,
}

pub(crate) fn ricci_data(mj: &MetricJet) -> Result<RicciData, NumError> {
    let n = mj.dim();
    let inv_rows = invert_metric(&mj.matrix())?;
    let mut inv = vec![0.0; n * n];
    for (j, row) in inv_rows.iter().enumerate() {
        inv[j * n..(j + 1) * n].copy_from_slice(row);
    }
    // Γ^i_{jk}, flat [i][j][k]
    let mut gamma = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut total = 0.0;
                for h in 0..n {
                    total += inv[i * n + h] * (mj.dg(h, j, k) + mj.dg(h, k, j) - mj.dg(j, k, h));
                }
                gamma[(i * n + j) * n + k] = 0.5 * total;
            }
        }
    }
    // ∂_l g^{ih} = −g^{ia} g_{ab,l} g^{bh}, flat [i][h][l]
    let mut dginv = vec![0.0; n * n * n];
    for i in 0..n {
        for h in 0..n {
            for l in 0..n {
                let mut total = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        total -= inv[i * n + a] * mj.dg(a, b, l) * inv[b * n + h];
                    }
                }
                dginv[(i * n + h) * n + l] = total;
            }
        }
    }
    let dgamma = |i: usize, j: usize, k: usize, l: usize| -> f64 {
        let mut total = 0.0;
        for h in 0..n {
            total += dginv[(i * n + h) * n + l] * (mj.dg(h, j, k) + mj.dg(h, k, j) - mj.dg(j, k, h));
            total +=
                inv[i * n + h] * (mj.d2g(h, j, k, l) + mj.d2g(h, k, j, l) - mj.d2g(j, k, h, l));
        }
        0.5 * total
    };
    // R_{jk} = Σ_i (Γ^i_{jk,i} − Γ^i_{ji,k} + Γ^h_{jk}Γ^i_{hi} − Γ^h_{ji}Γ^i_{hk})
    let mut ricci = vec![0.0; n * n];
    for j in 0..n {
        for k in 0..n {
            let mut total = 0.0;
            for i in 0..n {
                total += dgamma(i, j, k, i) - dgamma(i, j, i, k);
                for h in 0..n {
                    total += gamma[(h * n + j) * n + k] * gamma[(i * n + h) * n + i]
                        - gamma[(h * n + j) * n + i] * gamma[(i * n + h) * n + k];
                }
            }
            ricci[j * n + k] = total;
        }
    }
    let mut scalar = 0.0;
    for j in 0..n {
        for k in 0..n {
            scalar += inv[j * n + k] * ricci[j * n + k];
        }
    }
    let det = metric_determinant(&mj.matrix());
    Ok(RicciData { inv, ricci, scalar, sqrt_det: det.abs().sqrt() })
}

/// Riemann, Ricci and scalar curvature from the jet values:
/// R^i_{jkl} = Γ^i_{jk,l} − Γ^i_{jl,k} + Γ^h_{jk}Γ^i_{hl} − Γ^h_{jl}Γ^i_{hk},
/// R_{jk} = R^i_{jki}, R = g^{jk}R_{jk}.
pub fn curvature(mj: &MetricJet) -> Result<Curvature, NumError> {
    let n = mj.dim();
    let g = mj.matrix();
    let inverse = invert_metric(&g)?;
    let gamma = christoffel(mj)?;
    let dgamma = christoffel_derivative(mj, &inverse)?;
    let mut riemann = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut total = dgamma[i][j][k][l] - dgamma[i][j][l][k];
                    for h in 0..n {
                        total += gamma[h][j][k] * gamma[i][h][l]
                            - gamma[h][j][l] * gamma[i][h][k];
                    }
                    riemann[i][j][k][l] = total;
                }
            }
        }
    }
    let mut ricci = vec![vec![0.0; n]; n];
    for j in 0..n {
        for k in 0..n {
            ricci[j][k] = (0..n).map(|i| riemann[i][j][k][i]).sum();
        }
    }
    let mut scalar = 0.0;
    for j in 0..n {
        for k in 0..n {
            scalar += inverse[j][k] * ricci[j][k];
        }
    }
    let det = metric_determinant(&g);
    Ok(Curvature { riemann, ricci, scalar, inverse, sqrt_det: det.abs().sqrt() })
}

/// ε^{ij} = α R^{ij} √|g|, the (non-variational) Ricci source tensor.
pub fn ricci_source(mj: &MetricJet, alpha: f64) -> Result<Vec<Vec<f64>>, NumError> {
    let n = mj.dim();
    let data = ricci_data(mj)?;
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut ricci_up = 0.0;
            for a in 0..n {
                for b in 0..n {
                    ricci_up += data.inv[i * n + a] * data.inv[j * n + b] * data.ricci[a * n + b];
                }
            }
            out[i][j] = alpha * ricci_up * data.sqrt_det;
        }
    }
    Ok(out)
}

/// The Einstein tensor density (1/16πκ)(R^{ij} − ½ R g^{ij})√|g| — the
/// Euler-Lagrange form of the Hilbert density −(1/16πκ) R √|g|.
pub fn einstein_density(mj: &MetricJet, kappa: f64) -> Result<Vec<Vec<f64>>, NumError> {
    let n = mj.dim();
    let data = ricci_data(mj)?;
    let factor = 1.0 / (16.0 * PI * kappa);
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut ricci_up = 0.0;
            for a in 0..n {
                for b in 0..n {
                    ricci_up += data.inv[i * n + a] * data.inv[j * n + b] * data.ricci[a * n + b];
                }
            }
            out[i][j] =
                factor * (ricci_up - 0.5 * data.scalar * data.inv[i * n + j]) * data.sqrt_det;
        }
    }
    Ok(out)
}

/// The Hilbert density −(1/16πκ) R √|g| as a black-box density.
pub fn hilbert_density(n: usize, kappa: f64) -> DensityFn {
    DensityFn::new(2, move |p: &JetPoint| {
        let data = ricci_data(&metric_view(p, n))?;
        Ok(-(1.0 / (16.0 * PI * kappa)) * data.scalar * data.sqrt_det)
    })
}

/// α R √|g| — the Vainberg-Tonti Lagrangian density of the Ricci source.
pub fn scaled_scalar_density(n: usize, alpha: f64) -> DensityFn {
    DensityFn::new(2, move |p: &JetPoint| {
        let data = ricci_data(&metric_view(p, n))?;
        Ok(alpha * data.scalar * data.sqrt_det)
    })
}

/// Packs a tensor density T^{jk} into independent-component source-form
/// values: the coefficient of ω_{jk} (j ≤ k) in T^{ij} ω_ij ∧ ω₀ is
/// T^{jk} + T^{kj} off the diagonal and T^{jj} on it. For symmetric tensors
/// this is the (2 − δ_jk) multiplicity weight; asymmetric densities (the
/// Noether current) contribute through their symmetric part, as befits a
/// variation over symmetric g_{jk}.
pub fn pack_symmetric(n: usize, t: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; sym_count(n)];
    for j in 0..n {
        for k in j..n {
            out[sym_slot(n, j, k)] = if j == k { t[j][j] } else { t[j][k] + t[k][j] };
        }
    }
    out
}

/// The Ricci source form over the metric chart: components
/// (2 − δ_jk) α R^{jk} √|g|.
pub fn ricci_source_density(n: usize, alpha: f64) -> SourceDensity {
    SourceDensity::new(2, sym_count(n), move |p: &JetPoint| {
        let t = ricci_source(&metric_view(p, n), alpha)?;
        Ok(pack_symmetric(n, &t))
    })
}

/// The Einstein density as a source form over the metric chart.
pub fn einstein_source_density(n: usize, kappa: f64) -> SourceDensity {
    SourceDensity::new(2, sym_count(n), move |p: &JetPoint| {
        let t = einstein_density(&metric_view(p, n), kappa)?;
        Ok(pack_symmetric(n, &t))
    })
}

/// The flat metric η = diag(1, −1, …, −1) with all derivatives zero.
pub fn minkowski_jet(n: usize, order: usize) -> MetricJet {
    let spec = metric_spec(n);
    let mut p = JetPoint::zeros(&spec, order);
    for j in 0..n {
        let value = if j == 0 { 1.0 } else { -1.0 };
        p.set(&JetVar::field(sym_slot(n, j, j), MultiIndex::empty()), value)
            .expect("metric slot");
    }
    build_metric_view(n, p)
}

/// Seeded random metric jet: g = η + δ with δ symmetric uniform in
/// [−0.2, 0.2]; all derivative coordinates uniform in [−0.5, 0.5];
/// resamples δ until |det g| > 1e−6. Deterministic per seed.
pub fn sample_metric_jet(seed: u64, n: usize, order: usize) -> MetricJet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = metric_spec(n);
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
                let delta: f64 = rng.gen_range(-0.2..0.2);
                p.set(&JetVar::field(sym_slot(n, j, k), MultiIndex::empty()), eta + delta)
                    .expect("metric slot");
            }
        }
        for k in 1..=order {
            for idx in multisets(n, k) {
                for slot in 0..sym_count(n) {
                    let v: f64 = rng.gen_range(-0.5..0.5);
                    p.set(&JetVar::field(slot, idx.clone()), v).expect("derivative slot");
                }
            }
        }
        let mj = build_metric_view(n, p);
        if metric_determinant(&mj.matrix()).abs() > 1e-6 {
            return mj;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(t: &[Vec<f64>]) -> f64 {
        t.iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    #[test]
    fn minkowski_is_flat() {
        let mj = minkowski_jet(4, 2);
        let gamma = christoffel(&mj).unwrap();
        for i in 0..4 {
            assert!(max_abs(&gamma[i]) == 0.0);
        }
        let curv = curvature(&mj).unwrap();
        assert_eq!(curv.scalar, 0.0);
        assert_eq!(max_abs(&curv.ricci), 0.0);
        assert_eq!(max_abs(&ricci_source(&mj, -1.0).unwrap()), 0.0);
        assert_eq!(max_abs(&einstein_density(&mj, 1.0).unwrap()), 0.0);
    }

    #[test]
    fn diagonal_first_derivative_example() {
        // g = diag(A, −1, −1, −1) with g_{00,0} = 2A gives Γ⁰₀₀ = 1
        let spec = metric_spec(4);
        let mut p = JetPoint::zeros(&spec, 2);
        let a = 2.0;
        p.set(&JetVar::field(sym_slot(4, 0, 0), MultiIndex::empty()), a).unwrap();
        for j in 1..4 {
            p.set(&JetVar::field(sym_slot(4, j, j), MultiIndex::empty()), -1.0).unwrap();
        }
        p.set(&JetVar::field(sym_slot(4, 0, 0), MultiIndex::single(0)), 2.0 * a).unwrap();
        let mj = MetricJet::from_point(4, p);
        let gamma = christoffel(&mj).unwrap();
        assert!((gamma[0][0][0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn christoffel_scaling_invariance() {
        let mj = sample_metric_jet(11, 4, 2);
        let scaled = mj.scaled(0.37);
        let g1 = christoffel(&mj).unwrap();
        let g2 = christoffel(&scaled).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    assert!((g1[i][j][k] - g2[i][j][k]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn unit_sphere_scalar_curvature() {
        // round 2-sphere of radius 1 at θ₀ = 1: g = diag(1, sin²θ),
        // g_{22,1} = sin 2θ, g_{22,11} = 2 cos 2θ; analytically R = 2.
        let spec = metric_spec(2);
        let mut p = JetPoint::zeros(&spec, 2);
        let theta = 1.0f64;
        p.set(&JetVar::field(sym_slot(2, 0, 0), MultiIndex::empty()), 1.0).unwrap();
        p.set(&JetVar::field(sym_slot(2, 1, 1), MultiIndex::empty()), theta.sin().powi(2))
            .unwrap();
        p.set(&JetVar::field(sym_slot(2, 1, 1), MultiIndex::single(0)), (2.0 * theta).sin())
            .unwrap();
        p.set(
            &JetVar::field(sym_slot(2, 1, 1), MultiIndex::new(vec![0, 0])),
            2.0 * (2.0 * theta).cos(),
        )
        .unwrap();
        let mj = MetricJet::from_point(2, p);
        let curv = curvature(&mj).unwrap();
        assert!((curv.scalar - 2.0).abs() < 1e-12, "R = {}", curv.scalar);
        // Ricci of the unit sphere equals the metric
        assert!((curv.ricci[1][1] - theta.sin().powi(2)).abs() < 1e-12);
        assert!((curv.ricci[0][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn curvature_scaling_weights() {
        // R has homothety weight −1, R^{ij} weight −2, Ricci weight 0
        let mj = sample_metric_jet(5, 4, 2);
        let u = 0.5;
        let scaled = mj.scaled(u);
        let c1 = curvature(&mj).unwrap();
        let c2 = curvature(&scaled).unwrap();
        assert!(
            (c2.scalar - c1.scalar / u).abs() < 1e-9 * c1.scalar.abs().max(1.0),
            "R(u·g) = {}, u⁻¹R = {}",
            c2.scalar,
            c1.scalar / u
        );
        for j in 0..4 {
            for k in 0..4 {
                assert!((c2.ricci[j][k] - c1.ricci[j][k]).abs() < 1e-9);
            }
        }
        // Ricci is symmetric within 1e−10
        for j in 0..4 {
            for k in 0..4 {
                assert!((c1.ricci[j][k] - c1.ricci[k][j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn ricci_source_weight_and_contraction() {
        let mj = sample_metric_jet(23, 4, 2);
        let alpha = -1.0 / (16.0 * PI);
        // weight 0: ε^{ij}(u·g) = ε^{ij}(g)
        let e1 = ricci_source(&mj, alpha).unwrap();
        let e2 = ricci_source(&mj.scaled(0.3), alpha).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((e1[i][j] - e2[i][j]).abs() < 1e-10 * e1[i][j].abs().max(1.0));
            }
        }
        // contraction g_{ij} ε^{ij} = α R √|g|
        let curv = curvature(&mj).unwrap();
        let mut contracted = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                contracted += mj.g(i, j) * e1[i][j];
            }
        }
        let expected = alpha * curv.scalar * curv.sqrt_det;
        assert!((contracted - expected).abs() < 1e-12 * expected.abs().max(1.0));
    }

    #[test]
    fn two_dimensional_einstein_tensor_vanishes() {
        for seed in 0..20 {
            let mj = sample_metric_jet(1000 + seed, 2, 2);
            let e = einstein_density(&mj, 1.0).unwrap();
            assert!(max_abs(&e) < 1e-10, "seed {}: {:?}", seed, e);
        }
    }

    #[test]
    fn completion_identity_pointwise() {
        // τ-density = (1/16πκ)(2R^{ij} − ½ R g^{ij})√|g|
        //           = einstein_density + ricci_source with α = −1/16πκ
        let kappa = 1.0;
        let mj = sample_metric_jet(99, 4, 2);
        let curv = curvature(&mj).unwrap();
        // τ = E(λ_ε) − ε with ε = α R^{ij}√|g|, α = −1/16πκ
        let einstein = einstein_density(&mj, kappa).unwrap();
        let minus_eps = ricci_source(&mj, 1.0 / (16.0 * PI * kappa)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let mut ricci_up = 0.0;
                for a in 0..4 {
                    for b in 0..4 {
                        ricci_up += curv.inverse[i][a] * curv.inverse[j][b] * curv.ricci[a][b];
                    }
                }
                let tau = (1.0 / (16.0 * PI * kappa))
                    * (2.0 * ricci_up - 0.5 * curv.scalar * curv.inverse[i][j])
                    * curv.sqrt_det;
                let sum = einstein[i][j] + minus_eps[i][j];
                assert!((tau - sum).abs() < 1e-12 * tau.abs().max(1.0));
            }
        }
    }

    #[test]
    fn sampler_contract() {
        let a = sample_metric_jet(42, 4, 4);
        let b = sample_metric_jet(42, 4, 4);
        assert_eq!(a.point().coordinates(), b.point().coordinates());
        assert!(metric_determinant(&a.matrix()).abs() > 1e-6);
        // δ = 0 forced → Minkowski
        let mink = minkowski_jet(4, 2);
        assert_eq!(mink.g(0, 0), 1.0);
        assert_eq!(mink.g(1, 1), -1.0);
        assert_eq!(mink.g(0, 1), 0.0);
        assert_eq!(mink.dg(0, 0, 0), 0.0);
    }

    #[test]
    fn scaled_metric_stays_invertible_at_small_u() {
        // the quadrature visits u ≈ 1.4e−3; det(u·g) = u⁴ det g is tiny in
        // absolute terms but the matrix is perfectly well conditioned
        let mj = sample_metric_jet(7, 4, 2);
        let small = mj.scaled(1.4e-3);
        assert!(invert_metric(&small.matrix()).is_ok());
        assert!(curvature(&small).is_ok());
    }
}
