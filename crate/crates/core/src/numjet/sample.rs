//! Seeded random jet points for oracle comparisons.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::jet::{multisets, JetVar, SpecRef};

use super::JetPoint;

/// Canonical index tuples of a parameter: sorted tuples for symmetric
/// parameters (one representative per orbit), all tuples otherwise. Indices
/// range over the chart's field slots.
pub fn canonical_param_tuples(spec: &SpecRef, param: usize) -> Vec<Vec<u8>> {
    let decl = &spec.params()[param];
    let m = spec.field_count();
    if decl.arity == 0 {
        return vec![Vec::new()];
    }
    if decl.symmetric {
        multisets(m, decl.arity)
            .into_iter()
            .map(|idx| idx.indices().to_vec())
            .collect()
    } else {
        let mut tuples = vec![Vec::new()];
        for _ in 0..decl.arity {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    (0..m as u8).map(move |i| {
                        let mut next = t.clone();
                        next.push(i);
                        next
                    })
                })
                .collect();
        }
        tuples
    }
}

/// A complete random jet point: every coordinate up to `order` uniform in
/// [−1, 1], every canonical parameter entry uniform in [−1, 1].
/// Deterministic per seed.
pub fn sample_jet_point(spec: &SpecRef, order: usize, seed: u64) -> JetPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = JetPoint::zeros(spec, order);
    for i in 0..spec.base_dim() {
        let v: f64 = rng.gen_range(-1.0..1.0);
        p.set(&JetVar::Base(i), v).expect("base var");
    }
    for k in 0..=order {
        for idx in multisets(spec.base_dim(), k) {
            for slot in 0..spec.field_count() {
                let v: f64 = rng.gen_range(-1.0..1.0);
                p.set(&JetVar::field(slot, idx.clone()), v).expect("coordinate");
            }
        }
    }
    for param in 0..spec.params().len() {
        for tuple in canonical_param_tuples(spec, param) {
            let v: f64 = rng.gen_range(-1.0..1.0);
            p.set_param(param, tuple, v);
        }
    }
    p
}
