//! Breadth-first enumeration of balls in the Cayley graph.
//!
//! Spheres are built one at a time from the previous sphere by right
//! multiplication with every generator. Each sphere is sorted by normal form,
//! so the stored order does not depend on thread scheduling.

mod cache;
mod growth;

pub use cache::{cache_load, cache_store, CACHE_VERSION};
pub use growth::{
    growth_classify, growth_classify_with, least_squares, ClassifyOptions, Fit, GrowthKind, GrowthSeries, GrowthVerdict,
};

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{GroupBackend, GroupElement, NormalForm};

/// Default memory budget for a single enumeration.
pub const DEFAULT_BUDGET_BYTES: u64 = 2 << 30;

/// Rough resident cost of one stored element: the sorted vector slot plus a
/// hash-index entry. Spilled normal forms add their heap length on top.
const BYTES_PER_ELEMENT: u64 = 96;

fn element_cost(nf: &NormalForm) -> u64 {
    BYTES_PER_ELEMENT + if nf.spilled() { nf.len() as u64 } else { 0 }
}

/// All elements of word length at most `radius`, grouped by sphere.
pub struct BallEnumeration {
    backend: Arc<GroupBackend>,
    radius: usize,
    elements: Vec<NormalForm>,
    /// `elements[offsets[l]..offsets[l + 1]]` is sphere l.
    offsets: Vec<usize>,
    index: HashMap<NormalForm, u32>,
}

impl std::fmt::Debug for BallEnumeration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BallEnumeration")
            .field("backend", &self.backend.description())
            .field("radius", &self.radius)
            .field("size", &self.elements.len())
            .finish()
    }
}

impl PartialEq for BallEnumeration {
    fn eq(&self, other: &Self) -> bool {
        self.backend.fingerprint() == other.backend.fingerprint()
            && self.radius == other.radius
            && self.offsets == other.offsets
            && self.elements == other.elements
    }
}

impl BallEnumeration {
    /// Assembles an enumeration from sorted spheres; used by the cache loader.
    pub(crate) fn from_spheres(backend: Arc<GroupBackend>, spheres: Vec<Vec<NormalForm>>) -> Self {
        let mut offsets = vec![0];
        let mut elements = Vec::with_capacity(spheres.iter().map(Vec::len).sum());
        for s in spheres {
            elements.extend(s);
            offsets.push(elements.len());
        }
        let index = elements.iter().enumerate().map(|(i, nf)| (nf.clone(), i as u32)).collect();
        BallEnumeration { radius: offsets.len() - 2, backend, elements, offsets, index }
    }

    pub fn backend(&self) -> &Arc<GroupBackend> {
        &self.backend
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub(crate) fn sphere_raw(&self, l: usize) -> &[NormalForm] {
        if l > self.radius {
            return &[];
        }
        &self.elements[self.offsets[l]..self.offsets[l + 1]]
    }

    /// Elements of sphere `l`, in normal-form order.
    pub fn sphere(&self, l: usize) -> Vec<GroupElement> {
        self.sphere_raw(l).iter().map(|nf| self.backend.elem(nf.clone())).collect()
    }

    /// Elements of the ball in (length, normal form) order.
    pub fn elements(&self) -> impl Iterator<Item = (GroupElement, usize)> + '_ {
        (0..=self.radius).flat_map(move |l| self.sphere_raw(l).iter().map(move |nf| (self.backend.elem(nf.clone()), l)))
    }

    pub(crate) fn raw_elements(&self) -> &[NormalForm] {
        &self.elements
    }

    /// Position of an element in the (length, normal form) order.
    pub(crate) fn position_raw(&self, nf: &[u8]) -> Option<usize> {
        self.index.get(nf).map(|&i| i as usize)
    }

    pub(crate) fn length_raw(&self, nf: &[u8]) -> Option<usize> {
        let pos = self.position_raw(nf)?;
        Some(self.offsets.partition_point(|&o| o <= pos) - 1)
    }

    pub fn length_of(&self, g: &GroupElement) -> Option<usize> {
        if g.backend_id() != self.backend.id() {
            return None;
        }
        self.length_raw(g.normal_form())
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.length_of(g).is_some()
    }

    /// Number of elements of length at most `r`.
    pub fn ball_size(&self, r: usize) -> usize {
        self.offsets[r.min(self.radius) + 1]
    }

    pub fn sphere_sizes(&self) -> GrowthSeries {
        let counts = self.offsets.windows(2).map(|w| (w[1] - w[0]) as u64).collect();
        GrowthSeries::new(counts, format!("ball of {}", self.backend.description()))
    }
}

pub fn enumerate_ball(backend: &Arc<GroupBackend>, radius: usize) -> Result<BallEnumeration> {
    enumerate_ball_within(backend, radius, DEFAULT_BUDGET_BYTES)
}

/// Enumerates B_radius, failing with `BudgetExceeded` (reporting the last
/// complete radius) instead of truncating.
pub fn enumerate_ball_within(
    backend: &Arc<GroupBackend>,
    radius: usize,
    budget_bytes: u64,
) -> Result<BallEnumeration> {
    let identity = backend.identity_nf().clone();
    let mut used = element_cost(&identity);
    let mut elements = vec![identity.clone()];
    let mut offsets = vec![0, 1];
    let mut index: HashMap<NormalForm, u32> = HashMap::new();
    index.insert(identity, 0);
    let ngens = backend.generators().len();

    for l in 0..radius {
        let sphere = &elements[offsets[l]..offsets[l + 1]];
        let transient = (sphere.len() * ngens) as u64 * (std::mem::size_of::<NormalForm>() as u64);
        if used + transient > budget_bytes {
            return Err(Error::BudgetExceeded { budget: budget_bytes, reached: l });
        }
        let mut next: Vec<NormalForm> = sphere
            .par_iter()
            .flat_map_iter(|g| (0..ngens).map(move |s| backend.mul_gen_raw(g, s)))
            .filter(|h| !index.contains_key(h))
            .collect();
        next.par_sort_unstable();
        next.dedup();
        used += next.iter().map(element_cost).sum::<u64>();
        if used > budget_bytes {
            return Err(Error::BudgetExceeded { budget: budget_bytes, reached: l });
        }
        let base = elements.len();
        index.reserve(next.len());
        for (i, nf) in next.iter().enumerate() {
            index.insert(nf.clone(), (base + i) as u32);
        }
        elements.extend(next);
        offsets.push(elements.len());
    }
    Ok(BallEnumeration { backend: backend.clone(), radius, elements, offsets, index })
}

pub fn sphere_sizes(backend: &Arc<GroupBackend>, radius: usize) -> Result<GrowthSeries> {
    Ok(enumerate_ball(backend, radius)?.sphere_sizes())
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::presets;

    /// Evaluates every word of length ≤ r letter by letter and keeps the
    /// shortest length per element.
    fn naive_ball(backend: &Arc<GroupBackend>, r: usize) -> BTreeMap<GroupElement, usize> {
        let mut out = BTreeMap::new();
        let k = backend.generators().len();
        let mut words: Vec<Vec<usize>> = vec![vec![]];
        for len in 0..=r {
            for w in &words {
                out.entry(backend.evaluate_word(w)).or_insert(len);
            }
            if len < r {
                words = words
                    .iter()
                    .flat_map(|w| (0..k).map(move |s| [w.clone(), vec![s]].concat()))
                    .collect();
            }
        }
        out
    }

    #[test]
    fn agrees_with_naive_word_enumeration() {
        for (name, r) in [("free2", 5), ("z", 6), ("z3xz3", 5), ("s3", 4), ("paper-example-3", 4), ("z3xfree2", 4)] {
            let g = presets::preset(name).unwrap();
            let ball = enumerate_ball(&g, r).unwrap();
            let naive = naive_ball(&g, r);
            assert_eq!(ball.len(), naive.len(), "{name}");
            for (el, len) in &naive {
                assert_eq!(ball.length_of(el), Some(*len), "{name}");
            }
        }
    }

    #[test]
    fn small_balls() {
        let f2 = presets::preset("free2").unwrap();
        assert_eq!(enumerate_ball(&f2, 0).unwrap().len(), 1);
        assert_eq!(enumerate_ball(&f2, 2).unwrap().len(), 17);
        let z = presets::preset("z").unwrap();
        assert_eq!(enumerate_ball(&z, 5).unwrap().len(), 11);
    }

    #[test]
    fn finite_group_spheres_sum_to_order() {
        let s3 = presets::preset("s3").unwrap();
        let series = sphere_sizes(&s3, 8).unwrap();
        assert_eq!(series.counts, vec![1, 2, 2, 1, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn direct_product_series_is_a_convolution() {
        let z3 = GroupBackend::cyclic(3, "a").unwrap();
        let f2 = GroupBackend::free(2).unwrap();
        let prod = presets::preset("z3xfree2").unwrap();
        let a = sphere_sizes(&z3, 7).unwrap().counts;
        let b = sphere_sizes(&f2, 7).unwrap().counts;
        let c = sphere_sizes(&prod, 7).unwrap().counts;
        for l in 0..=7 {
            let conv: u64 = (0..=l).map(|i| a[i] * b[l - i]).sum();
            assert_eq!(c[l], conv);
        }
    }

    #[test]
    fn budget_is_a_hard_error() {
        let f2 = presets::preset("free2").unwrap();
        match enumerate_ball_within(&f2, 12, 1 << 20) {
            Err(Error::BudgetExceeded { reached, .. }) => assert!(reached < 12),
            other => panic!("expected budget error, got {other:?}"),
        }
    }
}
