//! Conjugator counts, the fiber map g ↦ g x g⁻¹ on small balls, and
//! centralizers.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rayon::prelude::*;

use super::{exact, orbit_closure};
use crate::enumerate::{enumerate_ball, BallEnumeration};
use crate::error::{Error, Result};
use crate::group::{GroupBackend, GroupElement, NormalForm};
use crate::length::word_length;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugatorCount {
    pub x: GroupElement,
    pub y: GroupElement,
    pub k: usize,
    /// |{h : |h| = k, h x h⁻¹ = y}|
    pub count: u64,
}

fn check_pair(backend: &GroupBackend, x: &GroupElement, y: &GroupElement) -> Result<()> {
    if x.backend_id() != backend.id() || y.backend_id() != backend.id() {
        return Err(Error::BackendMismatch);
    }
    Ok(())
}

pub fn conjugator_count(
    backend: &Arc<GroupBackend>,
    x: &GroupElement,
    y: &GroupElement,
    k: usize,
) -> Result<ConjugatorCount> {
    check_pair(backend, x, y)?;
    conjugator_count_in(&enumerate_ball(backend, k)?, x, y, k)
}

/// As [`conjugator_count`], scanning sphere `k` of an existing ball.
pub fn conjugator_count_in(
    ball: &BallEnumeration,
    x: &GroupElement,
    y: &GroupElement,
    k: usize,
) -> Result<ConjugatorCount> {
    let backend = ball.backend();
    check_pair(backend, x, y)?;
    if k > ball.radius() {
        return Err(Error::InvalidArgument(format!("sphere {k} lies outside the ball of radius {}", ball.radius())));
    }
    let count = ball
        .sphere_raw(k)
        .par_iter()
        .filter(|h| backend.conj_raw(h, x.normal_form()).as_slice() == y.normal_form())
        .count() as u64;
    Ok(ConjugatorCount { x: x.clone(), y: y.clone(), k, count })
}

/// Σ over k < n/7 of the conjugator counts.
pub fn conjugator_count_aggregate(
    backend: &Arc<GroupBackend>,
    x: &GroupElement,
    y: &GroupElement,
    n: usize,
) -> Result<u64> {
    check_pair(backend, x, y)?;
    if n == 0 {
        return Ok(0);
    }
    let kmax = (n - 1) / 7;
    let ball = enumerate_ball(backend, kmax)?;
    (0..=kmax).map(|k| conjugator_count_in(&ball, x, y, k).map(|c| c.count)).sum()
}

/// For fixed x and k, the number of h in sphere k with h x h⁻¹ = y, for
/// every y that occurs.
#[derive(Clone, Debug)]
pub struct ConjugatorTable {
    pub k: usize,
    pub counts: HashMap<NormalForm, u64>,
}

impl ConjugatorTable {
    pub fn count(&self, y: &GroupElement) -> u64 {
        self.counts.get(y.normal_form()).copied().unwrap_or(0)
    }

    /// Largest count over the images accepted by `keep`.
    pub fn max_where(&self, mut keep: impl FnMut(&[u8]) -> bool) -> u64 {
        self.counts.iter().filter(|(y, _)| keep(y)).map(|(_, &c)| c).max().unwrap_or(0)
    }
}

pub fn conjugator_table(ball: &BallEnumeration, x: &GroupElement, k: usize) -> Result<ConjugatorTable> {
    let backend = ball.backend();
    if x.backend_id() != backend.id() {
        return Err(Error::BackendMismatch);
    }
    if k > ball.radius() {
        return Err(Error::InvalidArgument(format!("sphere {k} lies outside the ball of radius {}", ball.radius())));
    }
    let mut counts: HashMap<NormalForm, u64> = HashMap::new();
    for h in ball.sphere_raw(k) {
        *counts.entry(backend.conj_raw(h, x.normal_form())).or_insert(0) += 1;
    }
    Ok(ConjugatorTable { k, counts })
}

#[derive(Clone, Debug)]
pub struct FiberStats {
    pub n: usize,
    /// The class element of length n the map is applied to.
    pub x: GroupElement,
    pub domain_radius: usize,
    pub domain_size: usize,
    /// Image element → number of preimages.
    pub fibers: BTreeMap<GroupElement, u64>,
    pub image_lengths: BTreeMap<GroupElement, usize>,
    pub max_fiber: u64,
    /// Domain elements whose image violates 5n/7 < l < 9n/7.
    pub outside_annulus: usize,
}

impl FiberStats {
    pub fn all_in_annulus(&self) -> bool {
        self.outside_annulus == 0
    }

    /// `image_length,fiber_size,count` rows: how many images of each length
    /// have each fiber size.
    pub fn to_csv(&self) -> String {
        let mut hist: BTreeMap<(usize, u64), u64> = BTreeMap::new();
        for (y, &size) in &self.fibers {
            *hist.entry((self.image_lengths[y], size)).or_insert(0) += 1;
        }
        let mut out = String::from("image_length,fiber_size,count\n");
        for ((l, size), count) in hist {
            out.push_str(&format!("{l},{size},{count}\n"));
        }
        out
    }
}

/// Class elements of `a` with lengths, up to `r`, for backends with an exact
/// enumerator or a finite class.
fn class_lengths(backend: &GroupBackend, a: &GroupElement, r: usize) -> Result<Vec<(NormalForm, usize)>> {
    if exact::supports_exact_enumeration(backend) {
        return exact::class_within(backend, a.normal_form(), r);
    }
    match orbit_closure(backend, a.normal_form(), super::DEFAULT_CLASS_BUDGET) {
        Some(orbit) => orbit
            .into_iter()
            .map(|nf| {
                let l = word_length(backend, &backend.elem(nf.clone()))?;
                Ok((nf, l))
            })
            .filter(|r_| r_.as_ref().map_or(true, |(_, l)| *l <= r))
            .collect(),
        None => Err(Error::Unsupported(format!(
            "cannot enumerate the class in {} without an exact enumerator",
            backend.description()
        ))),
    }
}

/// Applies φ(g) = g x g⁻¹ to every g in B_{⌊n/7⌋}, where x is the least
/// normal form among class elements of length exactly n.
pub fn phi_fiber_stats(backend: &Arc<GroupBackend>, a: &GroupElement, n: usize) -> Result<FiberStats> {
    if a.backend_id() != backend.id() {
        return Err(Error::BackendMismatch);
    }
    let window = n + 4;
    let class = class_lengths(backend, a, window)?;
    let x_nf = class.iter().filter(|(_, l)| *l == n).map(|(nf, _)| nf).min().cloned();
    let Some(x_nf) = x_nf else {
        // nearest available length, ties going to the longer one
        let nearest = class.iter().map(|(_, l)| *l).filter(|&l| l > 0).min_by_key(|&l| (l.abs_diff(n), usize::MAX - l));
        return Err(Error::NoClassElement { requested: n, nearest });
    };
    let x = backend.elem(x_nf);
    let radius = n / 7;
    let ball = enumerate_ball(backend, radius)?;
    let images: Vec<(NormalForm, usize)> = ball
        .raw_elements()
        .par_iter()
        .map(|g| {
            let y = backend.conj_raw(g, x.normal_form());
            let l = backend.len_raw(&y).expect("exact length rule");
            (y, l)
        })
        .collect();
    let mut fibers = BTreeMap::new();
    let mut image_lengths = BTreeMap::new();
    let mut outside = 0;
    for (y, l) in images {
        if !(5 * n < 7 * l && 7 * l < 9 * n) {
            outside += 1;
        }
        let y = backend.elem(y);
        *fibers.entry(y.clone()).or_insert(0u64) += 1;
        image_lengths.insert(y, l);
    }
    let max_fiber = fibers.values().copied().max().unwrap_or(0);
    Ok(FiberStats {
        n,
        x,
        domain_radius: radius,
        domain_size: ball.len(),
        fibers,
        image_lengths,
        max_fiber,
        outside_annulus: outside,
    })
}

/// {h ∈ B_R : hg = gh}, in (length, normal form) order.
pub fn centralizer_elements(backend: &Arc<GroupBackend>, g: &GroupElement, radius: usize) -> Result<Vec<GroupElement>> {
    if g.backend_id() != backend.id() {
        return Err(Error::BackendMismatch);
    }
    let ball = enumerate_ball(backend, radius)?;
    Ok(ball
        .raw_elements()
        .par_iter()
        .filter(|h| backend.mul_raw(h, g.normal_form()) == backend.mul_raw(g.normal_form(), h))
        .map(|h| backend.elem(h.clone()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::preset;

    #[test]
    fn documented_conjugator_counts() {
        let f2 = preset("free2").unwrap();
        let el = |s: &str| f2.parse_element(s).unwrap();
        assert_eq!(conjugator_count(&f2, &el("x"), &el("x"), 3).unwrap().count, 2);
        assert_eq!(conjugator_count(&f2, &el("x"), &el("y x y^-1"), 1).unwrap().count, 1);
        assert_eq!(conjugator_count(&f2, &el("x y"), &el("x y"), 0).unwrap().count, 1);
        let z3 = preset("z3xz3").unwrap();
        let a = z3.parse_element("a").unwrap();
        assert_eq!(conjugator_count(&z3, &a, &a, 0).unwrap().count, 1);
    }

    #[test]
    fn aggregate_matches_per_sphere_brute_force() {
        let f2 = preset("free2").unwrap();
        let x = f2.parse_element("x").unwrap();
        // centralizer of x is ⟨x⟩: one conjugator at k = 0, two (x^±k) after
        assert_eq!(conjugator_count_aggregate(&f2, &x, &x, 28).unwrap(), 7);
        let y = f2.parse_element("y").unwrap();
        assert_eq!(conjugator_count_aggregate(&f2, &x, &y, 28).unwrap(), 0);
        let e = f2.identity();
        assert_eq!(conjugator_count_aggregate(&f2, &e, &e, 7).unwrap(), 1);
    }

    #[test]
    fn table_agrees_with_direct_counts() {
        let f2 = preset("free2").unwrap();
        let x = f2.parse_element("x y^-1 x").unwrap();
        let ball = enumerate_ball(&f2, 3).unwrap();
        for k in 0..=3 {
            let table = conjugator_table(&ball, &x, k).unwrap();
            for (y_nf, &c) in table.counts.iter().take(20) {
                let y = f2.elem(y_nf.clone());
                assert_eq!(conjugator_count_in(&ball, &x, &y, k).unwrap().count, c);
            }
            assert_eq!(table.counts.values().sum::<u64>() as usize, ball.sphere_raw(k).len());
        }
    }

    #[test]
    fn fiber_stats_account_for_the_whole_domain() {
        let f2 = preset("free2").unwrap();
        let x = f2.parse_element("x").unwrap();
        let stats = phi_fiber_stats(&f2, &x, 21).unwrap();
        assert_eq!(word_length(&f2, &stats.x).unwrap(), 21);
        assert_eq!(stats.fibers.values().sum::<u64>() as usize, stats.domain_size);
        assert_eq!(stats.domain_size, 1 + 4 + 12 + 36);
        let class = exact::class_within(&f2, x.normal_form(), 30).unwrap();
        for y in stats.fibers.keys() {
            assert!(class.iter().any(|(nf, _)| nf.as_slice() == y.normal_form()));
        }
    }

    #[test]
    fn fiber_stats_reject_missing_lengths() {
        let f2 = preset("free2").unwrap();
        let x = f2.parse_element("x").unwrap();
        assert!(matches!(
            phi_fiber_stats(&f2, &x, 14),
            Err(Error::NoClassElement { requested: 14, nearest: Some(15) })
        ));
        assert!(matches!(
            phi_fiber_stats(&f2, &f2.identity(), 7),
            Err(Error::NoClassElement { nearest: None, .. })
        ));
        let g = preset("paper-example-3").unwrap();
        let a = g.parse_element("a").unwrap();
        assert!(matches!(phi_fiber_stats(&g, &a, 14), Err(Error::NoClassElement { nearest: Some(1), .. })));
    }

    #[test]
    fn documented_centralizers() {
        let f2 = preset("free2").unwrap();
        let x = f2.parse_element("x").unwrap();
        let z = centralizer_elements(&f2, &x, 4).unwrap();
        let expect: Vec<GroupElement> = (-4i32..=4).map(|k| f2.parse_element(&format!("x^{k}")).unwrap()).collect();
        assert_eq!(z.len(), 9);
        assert!(expect.iter().all(|g| z.contains(g)));
        assert_eq!(centralizer_elements(&f2, &f2.identity(), 3).unwrap().len(), 1 + 4 + 12 + 36);

        let g = preset("paper-example-3").unwrap();
        let a = g.parse_element("a").unwrap();
        let z = centralizer_elements(&g, &a, 1).unwrap();
        let expect: Vec<GroupElement> =
            ["e", "a", "a^2", "y", "y^-1"].iter().map(|s| g.parse_element(s).unwrap()).collect();
        assert_eq!(z.len(), expect.len());
        assert!(expect.iter().all(|h| z.contains(h)));
    }
}
