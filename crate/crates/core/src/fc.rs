//! The FC-center N (elements with finite conjugacy class), verification that
//! it is a normal subgroup, and the quotient G/N.

use std::collections::HashSet;
use std::sync::Arc;

use serde::Serialize;

use crate::conjugacy::fc_candidates;
use crate::enumerate::{enumerate_ball_within, DEFAULT_BUDGET_BYTES};
use crate::error::{Error, Result};
use crate::group::{GroupBackend, GroupElement, NormalForm};
use crate::length::LengthFunction;
use crate::traces::trace_space_basis;

/// Radius of the conjugator ball used for normality spot checks inside
/// [`fc_center`].
const SPOT_RADIUS: usize = 3;

#[derive(Clone, Debug)]
pub struct FcCenter {
    backend: Arc<GroupBackend>,
    /// Sorted by normal form; always contains e.
    pub elements: Vec<GroupElement>,
    pub horizon: usize,
    /// Every scanned class was decided, every finite class found lies in
    /// B_horizon, and the subgroup and normality checks passed.
    pub certified: bool,
    /// Certified, and the structural witnesses rule out finite classes
    /// beyond the horizon, so `elements` is the whole FC-center.
    pub absolute: bool,
}

impl FcCenter {
    pub fn backend(&self) -> &Arc<GroupBackend> {
        &self.backend
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.binary_search(g).is_ok()
    }
}

pub fn fc_center(backend: &Arc<GroupBackend>, horizon: usize, budget_bytes: u64) -> Result<FcCenter> {
    let space = trace_space_basis(backend, horizon, budget_bytes)?;
    let ball = enumerate_ball_within(backend, horizon, budget_bytes)?;
    let mut elements: Vec<GroupElement> = space.classes.iter().flat_map(|c| c.elements()).collect();
    elements.sort();
    let inside = elements.iter().all(|g| ball.contains(g));
    let closed = verify_subgroup(backend, &elements)?.passed
        && verify_normal(backend, &elements, SPOT_RADIUS.min(horizon))?.passed;
    let certified = space.complete_within_horizon() && inside && closed;
    let absolute = certified
        && fc_candidates(backend).is_some_and(|cands| cands.iter().all(|nf| ball.position_raw(nf).is_some()));
    Ok(FcCenter { backend: backend.clone(), elements, horizon, certified, absolute })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SubgroupReport {
    pub passed: bool,
    pub missing_identity: bool,
    /// Pairs (a, b) with ab outside the set.
    pub product_violations: Vec<(String, String)>,
    /// Elements whose inverse is outside the set.
    pub inverse_violations: Vec<String>,
}

/// Exhaustive closure check over the set and its square.
pub fn verify_subgroup(backend: &GroupBackend, elements: &[GroupElement]) -> Result<SubgroupReport> {
    let set = member_set(backend, elements)?;
    let fmt = |nf: &NormalForm| backend.format_element(&backend.elem(nf.clone()));
    let mut sorted: Vec<&NormalForm> = set.iter().collect();
    sorted.sort();
    let mut report = SubgroupReport { missing_identity: !set.contains(backend.identity_nf()), ..Default::default() };
    for &a in &sorted {
        if !set.contains(&backend.inv_raw(a)) {
            report.inverse_violations.push(fmt(a));
        }
        for &b in &sorted {
            if !set.contains(&backend.mul_raw(a, b)) {
                report.product_violations.push((fmt(a), fmt(b)));
            }
        }
    }
    report.passed = !report.missing_identity && report.product_violations.is_empty() && report.inverse_violations.is_empty();
    Ok(report)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct NormalReport {
    pub passed: bool,
    /// (s, n) with s n s⁻¹ outside the set, over all generators s.
    pub generator_violations: Vec<(String, String)>,
    pub spot_radius: usize,
    pub spot_checked: usize,
    /// (g, n) with g n g⁻¹ outside the set, for g ∈ B_spot_radius.
    pub spot_violations: Vec<(String, String)>,
}

/// Generator conjugation suffices for normality; conjugation by the whole
/// ball of radius `spot_radius` is checked as well.
pub fn verify_normal(backend: &Arc<GroupBackend>, elements: &[GroupElement], spot_radius: usize) -> Result<NormalReport> {
    let set = member_set(backend, elements)?;
    let fmt = |nf: &[u8]| backend.format_element(&backend.elem(NormalForm::from_slice(nf)));
    let mut sorted: Vec<&NormalForm> = set.iter().collect();
    sorted.sort();
    let mut report = NormalReport { spot_radius, ..Default::default() };
    for (pos, s) in backend.gen_nf().iter().enumerate() {
        for &n in &sorted {
            if !set.contains(&backend.conj_raw(s, n)) {
                report.generator_violations.push((backend.generator_label(pos), fmt(n)));
            }
        }
    }
    let ball = enumerate_ball_within(backend, spot_radius, DEFAULT_BUDGET_BYTES)?;
    for g in ball.raw_elements() {
        for &n in &sorted {
            report.spot_checked += 1;
            if !set.contains(&backend.conj_raw(g, n)) {
                report.spot_violations.push((fmt(g), fmt(n)));
            }
        }
    }
    report.passed = report.generator_violations.is_empty() && report.spot_violations.is_empty();
    Ok(report)
}

fn member_set(backend: &GroupBackend, elements: &[GroupElement]) -> Result<HashSet<NormalForm>> {
    elements
        .iter()
        .map(|g| {
            if g.backend_id() == backend.id() {
                Ok(NormalForm::from_slice(g.normal_form()))
            } else {
                Err(Error::BackendMismatch)
            }
        })
        .collect()
}

/// G/N with cosets represented by their least normal form. N must pass
/// [`verify_subgroup`] and generator-conjugation normality.
pub fn quotient_backend(backend: &Arc<GroupBackend>, n: &[GroupElement]) -> Result<Arc<GroupBackend>> {
    let sub = verify_subgroup(backend, n)?;
    if !sub.passed {
        return Err(Error::VerificationFailed(format!("not a subgroup: {sub:?}")));
    }
    let normal = verify_normal(backend, n, 0)?;
    if !normal.passed {
        return Err(Error::VerificationFailed(format!("not normal: {:?}", normal.generator_violations)));
    }
    GroupBackend::quotient_unchecked(backend.clone(), n.to_vec())
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientTraceReport {
    pub horizon: usize,
    pub dimension: usize,
    pub complete_within_horizon: bool,
    /// Dimension 1: the trace is unique up to scalars within the horizon.
    pub passed: bool,
}

pub fn quotient_trace_check(quotient: &Arc<GroupBackend>, horizon: usize, budget_bytes: u64) -> Result<QuotientTraceReport> {
    let space = trace_space_basis(quotient, horizon, budget_bytes)?;
    Ok(QuotientTraceReport {
        horizon,
        dimension: space.dimension(),
        complete_within_horizon: space.complete_within_horizon(),
        passed: space.dimension() == 1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Distortion {
    pub radius: usize,
    /// Some g had l_{G/N}(gN) > l_G(g).
    pub lipschitz_violated: bool,
    /// max over g ∈ B_radius of l_G(rep(gN)) − l_{G/N}(gN).
    pub max_additive: usize,
}

/// Compares base and quotient lengths over the base ball of the given radius.
pub fn length_distortion(quotient: &Arc<GroupBackend>, radius: usize, budget_bytes: u64) -> Result<Distortion> {
    let base = quotient
        .quotient_base()
        .ok_or_else(|| Error::Unsupported(format!("{} is not a quotient", quotient.description())))?;
    let base_ball = enumerate_ball_within(base, radius, budget_bytes)?;
    let q_lengths = LengthFunction::for_backend(quotient, radius)?;
    let base_lengths = LengthFunction::for_backend(base, 0)?;
    let mut out = Distortion { radius, lipschitz_violated: false, max_additive: 0 };
    for (g, lg) in base_ball.elements() {
        let coset = quotient.project(&g)?;
        let lq = q_lengths.length(&coset)?;
        out.lipschitz_violated |= lq > lg;
        let lrep = match base_lengths.length(&quotient.lift(&coset)?) {
            Ok(l) => l,
            Err(Error::OutOfTable { .. }) => continue,
            Err(e) => return Err(e),
        };
        out.max_additive = out.max_additive.max(lrep.saturating_sub(lq));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct FcReport {
    pub center: FcCenter,
    pub subgroup: SubgroupReport,
    pub normal: NormalReport,
    pub quotient_trace: Option<QuotientTraceReport>,
    pub distortion: Option<Distortion>,
}

/// FC-center, its verification, and the trace check on G/N when N is a
/// verified normal subgroup.
pub fn fc_report(backend: &Arc<GroupBackend>, horizon: usize, trace_horizon: usize, budget_bytes: u64) -> Result<FcReport> {
    let center = fc_center(backend, horizon, budget_bytes)?;
    let subgroup = verify_subgroup(backend, &center.elements)?;
    let normal = verify_normal(backend, &center.elements, SPOT_RADIUS.min(horizon))?;
    let (quotient_trace, distortion) = if subgroup.passed && normal.passed {
        let q = quotient_backend(backend, &center.elements)?;
        (
            Some(quotient_trace_check(&q, trace_horizon, budget_bytes)?),
            Some(length_distortion(&q, trace_horizon, budget_bytes)?),
        )
    } else {
        (None, None)
    };
    Ok(FcReport { center, subgroup, normal, quotient_trace, distortion })
}

impl FcReport {
    pub fn to_json(&self) -> serde_json::Value {
        let b = &self.center.backend;
        let pass = |p: bool| if p { "pass" } else { "fail" };
        serde_json::json!({
            "N": self.center.elements.iter().map(|g| b.format_element(g)).collect::<Vec<_>>(),
            "horizon": self.center.horizon,
            "certified": self.center.certified,
            "absolute": self.center.absolute,
            "subgroup": pass(self.subgroup.passed),
            "normal": pass(self.normal.passed),
            "subgroup_report": self.subgroup,
            "normal_report": self.normal,
            "quotient_trace_dimension": self.quotient_trace.as_ref().map(|q| q.dimension),
            "quotient_trace": self.quotient_trace,
            "distortion": self.distortion,
        })
    }
}
