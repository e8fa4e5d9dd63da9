//! Conjugacy classes intersected with balls.

mod exact;
mod lemma;

pub use lemma::{
    centralizer_elements, conjugator_count, conjugator_count_aggregate, conjugator_count_in, conjugator_table,
    phi_fiber_stats, ConjugatorCount, ConjugatorTable, FiberStats,
};

use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::enumerate::{enumerate_ball_within, GrowthSeries, DEFAULT_BUDGET_BYTES};
use crate::error::{Error, Result};
use crate::group::{GroupBackend, GroupElement, Kind, NormalForm};
use crate::length::LengthFunction;

/// Approximate bytes held per visited class element during an orbit search.
const ORBIT_BYTES_PER_ELEMENT: u64 = 80;

/// Element budget used by [`is_finite_class`] callers that do not choose one.
pub const DEFAULT_CLASS_BUDGET: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    LowerBound,
}

impl Exactness {
    pub fn as_str(self) -> &'static str {
        match self {
            Exactness::Exact => "exact",
            Exactness::LowerBound => "lower_bound",
        }
    }
}

/// C(a) ∩ B_horizon, counted by length.
#[derive(Clone, Debug)]
pub struct ConjugacyProfile {
    pub representative: GroupElement,
    /// Least normal form among the shortest class elements found.
    pub canonical: GroupElement,
    pub counts: GrowthSeries,
    pub horizon: usize,
    pub exactness: Exactness,
    /// The whole class was found and is closed under generator conjugation.
    pub finite_class: bool,
    /// Class elements of length ≤ horizon in (length, normal form) order.
    pub elements: Vec<(GroupElement, usize)>,
}

impl ConjugacyProfile {
    fn build(
        backend: &GroupBackend,
        a: &GroupElement,
        mut found: Vec<(NormalForm, usize)>,
        horizon: usize,
        exactness: Exactness,
        finite_class: bool,
    ) -> Self {
        found.sort_by(|x, y| (x.1, &x.0).cmp(&(y.1, &y.0)));
        found.dedup();
        let mut counts = vec![0u64; horizon + 1];
        for (_, l) in &found {
            counts[*l] += 1;
        }
        let canonical = found.first().map_or_else(|| a.clone(), |(nf, _)| backend.elem(nf.clone()));
        ConjugacyProfile {
            representative: a.clone(),
            canonical,
            counts: GrowthSeries::new(counts, format!("class of {}", backend.format_element(a))),
            horizon,
            exactness,
            finite_class,
            elements: found.into_iter().map(|(nf, l)| (backend.elem(nf), l)).collect(),
        }
    }

    /// Class elements of length exactly `l`.
    pub fn sphere(&self, l: usize) -> impl Iterator<Item = &GroupElement> {
        self.elements.iter().filter(move |(_, k)| *k == l).map(|(g, _)| g)
    }

    /// `l,n_l,exactness` rows with header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,n_l,exactness\n");
        for (l, n) in self.counts.counts.iter().enumerate() {
            out.push_str(&format!("{l},{n},{}\n", self.exactness.as_str()));
        }
        out
    }
}

/// Default exploration margin for orbit searches: one generator conjugation
/// changes length by at most 2.
pub fn default_margin(len_a: usize) -> usize {
    2 * len_a + 4
}

/// Orbit of `a` under generator conjugation, if it closes within `max_elements`.
pub(crate) fn orbit_closure(backend: &GroupBackend, a: &[u8], max_elements: usize) -> Option<Vec<NormalForm>> {
    let mut seen: HashSet<NormalForm> = HashSet::new();
    let mut order = vec![NormalForm::from_slice(a)];
    seen.insert(order[0].clone());
    let mut i = 0;
    let gens = backend.gen_nf();
    while i < order.len() {
        let g = order[i].clone();
        i += 1;
        for s in gens {
            let h = backend.conj_raw(s, &g);
            if seen.insert(h.clone()) {
                if order.len() >= max_elements {
                    return None;
                }
                order.push(h);
            }
        }
    }
    Some(order)
}

/// Explores the conjugation graph g ↦ s g s⁻¹ from `a`, keeping elements of
/// length ≤ radius + margin, and reports counts for lengths ≤ radius.
pub fn conjugacy_orbit(
    backend: &Arc<GroupBackend>,
    a: &GroupElement,
    radius: usize,
    margin: usize,
) -> Result<ConjugacyProfile> {
    conjugacy_orbit_within(backend, a, radius, margin, DEFAULT_BUDGET_BYTES)
}

pub fn conjugacy_orbit_within(
    backend: &Arc<GroupBackend>,
    a: &GroupElement,
    radius: usize,
    margin: usize,
    budget_bytes: u64,
) -> Result<ConjugacyProfile> {
    if a.backend_id() != backend.id() {
        return Err(Error::BackendMismatch);
    }
    let cap = radius + margin;
    let lengths = if backend.has_exact_length() {
        LengthFunction::exact(backend)?
    } else {
        LengthFunction::from_table(Arc::new(enumerate_ball_within(backend, cap, budget_bytes)?))
    };
    let len_of = |nf: &[u8]| lengths.length_raw(nf).ok().filter(|&l| l <= cap);
    let la = len_of(a.normal_form()).ok_or_else(|| {
        Error::InvalidArgument(format!("radius {radius} is below the length of the representative"))
    })?;
    if la > radius {
        return Err(Error::InvalidArgument(format!("radius {radius} is below word length {la}")));
    }

    let mut seen: HashSet<NormalForm> = HashSet::new();
    let mut queue = VecDeque::new();
    let mut found = Vec::new();
    let start = NormalForm::from_slice(a.normal_form());
    seen.insert(start.clone());
    queue.push_back((start, la));
    let mut closed = true;
    let mut max_len = la;
    while let Some((g, l)) = queue.pop_front() {
        if l <= radius {
            found.push((g.clone(), l));
        }
        for s in backend.gen_nf() {
            let h = backend.conj_raw(s, &g);
            if seen.contains(&h) {
                continue;
            }
            match len_of(&h) {
                Some(lh) => {
                    seen.insert(h.clone());
                    max_len = max_len.max(lh);
                    queue.push_back((h, lh));
                }
                None => closed = false,
            }
        }
        if seen.len() as u64 * ORBIT_BYTES_PER_ELEMENT > budget_bytes {
            return Err(Error::BudgetExceeded { budget: budget_bytes, reached: max_len });
        }
    }

    let mut exactness = if closed { Exactness::Exact } else { Exactness::LowerBound };
    if !closed && exact::supports_exact_enumeration(backend) {
        let mut reference = exact::class_within(backend, a.normal_form(), radius)?;
        reference.sort_by(|x, y| (x.1, &x.0).cmp(&(y.1, &y.0)));
        let mut mine = found.clone();
        mine.sort_by(|x, y| (x.1, &x.0).cmp(&(y.1, &y.0)));
        if mine == reference {
            exactness = Exactness::Exact;
        }
    }
    Ok(ConjugacyProfile::build(backend, a, found, radius, exactness, closed))
}

/// All elements of C(a) ∩ B_radius, for free groups, free products of
/// free/finite factors, and finite groups.
pub fn exact_class_enumerator(backend: &GroupBackend, a: &GroupElement, radius: usize) -> Result<Vec<GroupElement>> {
    if a.backend_id() != backend.id() {
        return Err(Error::BackendMismatch);
    }
    let mut found = exact::class_within(backend, a.normal_form(), radius)?;
    found.sort_by(|x, y| (x.1, &x.0).cmp(&(y.1, &y.0)));
    Ok(found.into_iter().map(|(nf, _)| backend.elem(nf)).collect())
}

pub fn has_exact_class_enumerator(backend: &GroupBackend) -> bool {
    exact::supports_exact_enumeration(backend)
}

/// Class profile to length `horizon`: exact enumeration where available,
/// otherwise the orbit search with the default margin.
pub fn class_profile(backend: &Arc<GroupBackend>, a: &GroupElement, horizon: usize) -> Result<ConjugacyProfile> {
    if a.backend_id() != backend.id() {
        return Err(Error::BackendMismatch);
    }
    if exact::supports_exact_enumeration(backend) {
        let found = exact::class_within(backend, a.normal_form(), horizon)?;
        let finite = matches!(is_finite_class(backend, a, DEFAULT_CLASS_BUDGET)?, ClassFiniteness::Finite(_));
        return Ok(ConjugacyProfile::build(backend, a, found, horizon, Exactness::Exact, finite));
    }
    let la = LengthFunction::for_backend(backend, horizon)?.length(a).unwrap_or(horizon);
    conjugacy_orbit(backend, a, horizon.max(la), default_margin(la))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "size", rename_all = "snake_case")]
pub enum ClassFiniteness {
    Finite(usize),
    InfiniteWitnessed,
    /// The orbit did not close within the element budget.
    Unknown,
}

/// Structural proof that the class of `a` is infinite.
///
/// Free groups of rank ≥ 2 and free products other than ℤ/2 * ℤ/2 have no
/// nontrivial finite classes: centralizers of nontrivial elements are
/// cyclic or lie in a conjugate of a factor, both of infinite index. For
/// direct products the class is the product of the factor classes; for the
/// semidirect and quotient backends the class surjects onto (or is a
/// finite-to-one image of) a class in the free base.
fn infinite_witness(backend: &GroupBackend, a: &[u8]) -> bool {
    match backend.kind() {
        Kind::Free(f) => f.rank >= 2 && !a.is_empty(),
        Kind::Finite(_) => false,
        Kind::FreeProduct(p) => {
            let order_two = |g: &GroupBackend| matches!(g.kind(), Kind::Finite(f) if f.order() == 2);
            a != backend.identity_nf().as_slice() && !(order_two(&p.left) && order_two(&p.right))
        }
        Kind::Direct(p) => {
            let (l, r) = crate::group::split_direct(a);
            infinite_witness(&p.left, l) || infinite_witness(&p.right, r)
        }
        Kind::Semidirect(s) => infinite_witness(&s.base, s.base_part(a)),
        Kind::Quotient(q) => infinite_witness(&q.base, a),
    }
}

/// A finite set containing every element with finite class, when the
/// structural witnesses decide all elements outside it.
pub(crate) fn fc_candidates(backend: &GroupBackend) -> Option<Vec<NormalForm>> {
    let identity = || Some(vec![backend.identity_nf().clone()]);
    match backend.kind() {
        Kind::Free(f) if f.rank >= 2 => identity(),
        Kind::Free(_) => None,
        Kind::Finite(g) => Some(
            (0..g.order())
                .map(|i| {
                    let mut nf = NormalForm::new();
                    crate::group::put_varint(&mut nf, i as u64);
                    nf
                })
                .collect(),
        ),
        Kind::FreeProduct(p) => {
            let order_two = |g: &GroupBackend| matches!(g.kind(), Kind::Finite(f) if f.order() == 2);
            if order_two(&p.left) && order_two(&p.right) {
                None
            } else {
                identity()
            }
        }
        Kind::Direct(p) => {
            let (left, right) = (fc_candidates(&p.left)?, fc_candidates(&p.right)?);
            Some(left.iter().flat_map(|l| right.iter().map(move |r| crate::group::direct_pair(l, r))).collect())
        }
        Kind::Semidirect(s) => match (s.base.kind(), s.normal.kind()) {
            (Kind::Free(f), Kind::Finite(n)) if f.rank >= 2 => {
                Some((0..n.order() as u32).map(|i| crate::group::semidirect_nf(i, &[])).collect())
            }
            _ => None,
        },
        Kind::Quotient(_) => None,
    }
}

/// Finite(|C(a)|) when the generator-conjugation orbit closes within
/// `budget` elements, InfiniteWitnessed when a structural witness applies.
pub fn is_finite_class(backend: &GroupBackend, a: &GroupElement, budget: usize) -> Result<ClassFiniteness> {
    if a.backend_id() != backend.id() {
        return Err(Error::BackendMismatch);
    }
    if infinite_witness(backend, a.normal_form()) {
        return Ok(ClassFiniteness::InfiniteWitnessed);
    }
    Ok(match orbit_closure(backend, a.normal_form(), budget) {
        Some(orbit) => ClassFiniteness::Finite(orbit.len()),
        None => ClassFiniteness::Unknown,
    })
}

/// The full class when it is finite and closes within `budget` elements,
/// sorted by normal form.
pub fn finite_class_elements(backend: &GroupBackend, a: &GroupElement, budget: usize) -> Result<Option<Vec<GroupElement>>> {
    if a.backend_id() != backend.id() {
        return Err(Error::BackendMismatch);
    }
    if infinite_witness(backend, a.normal_form()) {
        return Ok(None);
    }
    Ok(orbit_closure(backend, a.normal_form(), budget).map(|mut orbit| {
        orbit.sort();
        orbit.into_iter().map(|nf| backend.elem(nf)).collect()
    }))
}
