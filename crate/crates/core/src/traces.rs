//! Traces on ℂ[G]: class indicators of finite conjugacy classes, the trace
//! identity τ(f·g) = τ(g·f), and vanishing certificates for infinite classes.

use std::collections::HashSet;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{convolve, GroupAlgebraElement};
use crate::conjugacy::{class_profile, finite_class_elements, is_finite_class, ClassFiniteness, Exactness, DEFAULT_CLASS_BUDGET};
use crate::enumerate::enumerate_ball_within;
use crate::error::{Error, Result};
use crate::group::{GroupBackend, GroupElement, NormalForm};

/// Fewest certificate rows for which a tail verdict is meaningful.
pub const MIN_CERTIFICATE_ROWS: usize = 6;

pub trait LinearFunctional {
    fn backend(&self) -> &Arc<GroupBackend>;
    fn evaluate(&self, f: &GroupAlgebraElement) -> Result<Complex64>;
}

/// χ_C(f) = Σ_{h ∈ C} f(h) for a finite conjugacy class C.
#[derive(Clone, Debug)]
pub struct ClassFunctional {
    backend: Arc<GroupBackend>,
    representative: GroupElement,
    /// Sorted; closed under conjugation by every generator.
    elements: Vec<NormalForm>,
}

impl ClassFunctional {
    /// The indicator of C(a); fails unless the class closes within `budget`
    /// elements.
    pub fn of_class(backend: &Arc<GroupBackend>, a: &GroupElement, budget: usize) -> Result<Self> {
        match finite_class_elements(backend, a, budget)? {
            Some(class) => Ok(ClassFunctional {
                backend: backend.clone(),
                representative: class[0].clone(),
                elements: class.iter().map(|g| NormalForm::from_slice(g.normal_form())).collect(),
            }),
            None => Err(Error::Unsupported(format!(
                "class of {} is not verified finite",
                backend.format_element(a)
            ))),
        }
    }

    /// Checks that the set is a single orbit under generator conjugation.
    pub fn from_elements(backend: &Arc<GroupBackend>, elements: &[GroupElement]) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::VerificationFailed("empty class".into()));
        }
        if elements.iter().any(|g| g.backend_id() != backend.id()) {
            return Err(Error::BackendMismatch);
        }
        let mut nfs: Vec<NormalForm> = elements.iter().map(|g| NormalForm::from_slice(g.normal_form())).collect();
        nfs.sort();
        nfs.dedup();
        let orbit = crate::conjugacy::orbit_closure(backend, &nfs[0], nfs.len());
        let mut orbit = orbit.ok_or_else(|| Error::VerificationFailed("set is not closed under conjugation".into()))?;
        orbit.sort();
        if orbit != nfs {
            return Err(Error::VerificationFailed("set is not a single conjugacy class".into()));
        }
        Ok(ClassFunctional { backend: backend.clone(), representative: backend.elem(nfs[0].clone()), elements: nfs })
    }

    /// Least normal form in the class.
    pub fn representative(&self) -> &GroupElement {
        &self.representative
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        self.elements.iter().map(|nf| self.backend.elem(nf.clone())).collect()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.backend_id() == self.backend.id() && self.elements.binary_search_by(|nf| nf.as_slice().cmp(g.normal_form())).is_ok()
    }
}

impl LinearFunctional for ClassFunctional {
    fn backend(&self) -> &Arc<GroupBackend> {
        &self.backend
    }

    fn evaluate(&self, f: &GroupAlgebraElement) -> Result<Complex64> {
        chi_eval(self, f)
    }
}

pub fn chi_eval(chi: &ClassFunctional, f: &GroupAlgebraElement) -> Result<Complex64> {
    if f.backend().id() != chi.backend.id() {
        return Err(Error::BackendMismatch);
    }
    // iterate the smaller side; both are sorted by normal form
    let mut sum = Complex64::new(0.0, 0.0);
    if chi.elements.len() <= f.support_len() {
        for nf in &chi.elements {
            sum += f.coefficient(&chi.backend.elem(nf.clone()));
        }
    } else {
        for (nf, c) in f.raw_terms() {
            if chi.elements.binary_search(nf).is_ok() {
                sum += c;
            }
        }
    }
    Ok(sum)
}

/// Σ_i c_i χ_{C_i} over distinct finite classes.
#[derive(Clone, Debug)]
pub struct TraceFunctional {
    backend: Arc<GroupBackend>,
    terms: Vec<(ClassFunctional, Complex64)>,
}

impl TraceFunctional {
    pub fn zero(backend: &Arc<GroupBackend>) -> Self {
        TraceFunctional { backend: backend.clone(), terms: Vec::new() }
    }

    pub fn new(backend: &Arc<GroupBackend>, terms: Vec<(ClassFunctional, Complex64)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (chi, _) in &terms {
            if chi.backend.id() != backend.id() {
                return Err(Error::BackendMismatch);
            }
            if !seen.insert(chi.representative.clone()) {
                return Err(Error::InvalidArgument("classes in a trace functional must be distinct".into()));
            }
        }
        Ok(TraceFunctional { backend: backend.clone(), terms })
    }

    pub fn terms(&self) -> &[(ClassFunctional, Complex64)] {
        &self.terms
    }
}

impl LinearFunctional for TraceFunctional {
    fn backend(&self) -> &Arc<GroupBackend> {
        &self.backend
    }

    fn evaluate(&self, f: &GroupAlgebraElement) -> Result<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        for (chi, c) in &self.terms {
            sum += c * chi_eval(chi, f)?;
        }
        Ok(sum)
    }
}

/// f ↦ f(g). Not a trace unless the class of g is {g}.
#[derive(Clone, Debug)]
pub struct PointEvaluation {
    backend: Arc<GroupBackend>,
    at: GroupElement,
}

impl PointEvaluation {
    pub fn new(backend: &Arc<GroupBackend>, at: &GroupElement) -> Result<Self> {
        if at.backend_id() != backend.id() {
            return Err(Error::BackendMismatch);
        }
        Ok(PointEvaluation { backend: backend.clone(), at: at.clone() })
    }
}

impl LinearFunctional for PointEvaluation {
    fn backend(&self) -> &Arc<GroupBackend> {
        &self.backend
    }

    fn evaluate(&self, f: &GroupAlgebraElement) -> Result<Complex64> {
        Ok(f.coefficient(&self.at))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceCheck {
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// |τ(f·g) − τ(g·f)| against `tol`.
pub fn trace_property_check(
    tau: &dyn LinearFunctional,
    f: &GroupAlgebraElement,
    g: &GroupAlgebraElement,
    tol: f64,
) -> Result<TraceCheck> {
    if f.backend().id() != tau.backend().id() {
        return Err(Error::BackendMismatch);
    }
    let deviation = (tau.evaluate(&convolve(f, g)?)? - tau.evaluate(&convolve(g, f)?)?).norm();
    Ok(TraceCheck { deviation, tolerance: tol, passed: deviation < tol })
}

/// Finite classes meeting B_horizon.
#[derive(Clone, Debug)]
pub struct TraceSpace {
    pub horizon: usize,
    pub classes: Vec<ClassFunctional>,
    /// Elements of B_horizon whose class was neither closed within the
    /// budget nor structurally infinite. Empty means every finite class
    /// meeting B_horizon is listed.
    pub undecided: Vec<GroupElement>,
}

impl TraceSpace {
    pub fn dimension(&self) -> usize {
        self.classes.len()
    }

    pub fn complete_within_horizon(&self) -> bool {
        self.undecided.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let backend = self.classes.first().map(|c| c.backend.clone());
        let fmt = |c: &ClassFunctional| -> Vec<String> {
            c.elements().iter().map(|g| c.backend.format_element(g)).collect()
        };
        serde_json::json!({
            "horizon": self.horizon,
            "dimension": self.dimension(),
            "classes": self.classes.iter().map(fmt).collect::<Vec<_>>(),
            "complete_within_horizon": self.complete_within_horizon(),
            "undecided": self.undecided.iter().map(|g| backend.as_ref().map(|b| b.format_element(g))).collect::<Vec<_>>(),
        })
    }
}

/// Scans B_horizon in (length, normal form) order, grouping elements into
/// verified finite classes. Classes are listed by least element.
pub fn trace_space_basis(backend: &Arc<GroupBackend>, horizon: usize, budget_bytes: u64) -> Result<TraceSpace> {
    let ball = enumerate_ball_within(backend, horizon, budget_bytes)?;
    let mut visited: HashSet<NormalForm> = HashSet::new();
    let mut classes = Vec::new();
    let mut undecided = Vec::new();
    for nf in ball.raw_elements() {
        if visited.contains(nf) {
            continue;
        }
        let g = backend.elem(nf.clone());
        match is_finite_class(backend, &g, DEFAULT_CLASS_BUDGET)? {
            ClassFiniteness::Finite(_) => {
                let chi = ClassFunctional::of_class(backend, &g, DEFAULT_CLASS_BUDGET)?;
                visited.extend(chi.elements.iter().cloned());
                classes.push(chi);
            }
            ClassFiniteness::InfiniteWitnessed => {}
            ClassFiniteness::Unknown => undecided.push(g),
        }
    }
    classes.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(TraceSpace { horizon, classes, undecided })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateRow {
    pub l: usize,
    pub n_l: u64,
    pub bound: f64,
}

impl CertificateRow {
    pub fn new(l: usize, n_l: u64, s: f64) -> Self {
        CertificateRow { l, n_l, bound: (1.0 + l as f64).powf(s) / (n_l as f64).sqrt() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateVerdict {
    /// bound_l is nonincreasing over the final third of the rows.
    pub decreasing_tail: bool,
    pub final_bound: f64,
}

/// For every trace τ bounded by C·‖·‖_{H^s}: |τ(δ_a)| ≤ ‖τ‖·C·bound_l for
/// each row, since τ(δ_a) = τ(w_l) and ‖w_l‖_{H^s} = bound_l.
#[derive(Clone, Debug)]
pub struct VanishingCertificate {
    pub representative: GroupElement,
    pub s: f64,
    pub rows: Vec<CertificateRow>,
    /// The class counts are exact rather than lower bounds.
    pub exact: bool,
    pub verdict: CertificateVerdict,
    text_representative: String,
}

impl VanishingCertificate {
    pub fn warning(&self) -> Option<&'static str> {
        (!self.exact).then_some("class counts are lower bounds; certificate is heuristic")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "representative": self.text_representative,
            "s": self.s,
            "rows": self.rows,
            "exact": self.exact,
            "verdict": self.verdict,
            "warning": self.warning(),
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,n_l,bound\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{:.15e}\n", r.l, r.n_l, r.bound));
        }
        out
    }
}

pub fn vanishing_certificate(backend: &Arc<GroupBackend>, a: &GroupElement, s: f64, horizon: usize) -> Result<VanishingCertificate> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidArgument(format!("Sobolev exponent must be finite and ≥ 0, got {s}")));
    }
    if let ClassFiniteness::Finite(size) = is_finite_class(backend, a, DEFAULT_CLASS_BUDGET)? {
        return Err(Error::FiniteClass { size });
    }
    let profile = class_profile(backend, a, horizon)?;
    if profile.finite_class {
        return Err(Error::FiniteClass { size: profile.elements.len() });
    }
    let rows: Vec<CertificateRow> = profile
        .counts
        .counts
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(l, &n)| CertificateRow::new(l, n, s))
        .collect();
    if rows.len() < MIN_CERTIFICATE_ROWS {
        return Err(Error::InsufficientData(format!(
            "{} nonempty class spheres up to length {horizon}, need {MIN_CERTIFICATE_ROWS}",
            rows.len()
        )));
    }
    let tail = &rows[rows.len() - rows.len().div_ceil(3)..];
    let verdict = CertificateVerdict {
        decreasing_tail: tail.windows(2).all(|w| w[1].bound <= w[0].bound),
        final_bound: rows.last().expect("rows nonempty").bound,
    };
    Ok(VanishingCertificate {
        representative: a.clone(),
        s,
        rows,
        exact: profile.exactness == Exactness::Exact,
        verdict,
        text_representative: backend.format_element(a),
    })
}

/// w_l = (1/n_l) Σ δ_g over class elements of length exactly l.
pub fn witness_element(backend: &Arc<GroupBackend>, a: &GroupElement, l: usize) -> Result<GroupAlgebraElement> {
    let profile = class_profile(backend, a, l)?;
    let sphere: Vec<&GroupElement> = profile.sphere(l).collect();
    if sphere.is_empty() {
        return Err(Error::EmptySphere(l));
    }
    let c = Complex64::new(1.0 / sphere.len() as f64, 0.0);
    GroupAlgebraElement::from_terms(backend, sphere.into_iter().map(|g| (g.clone(), c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{hs_norm, SobolevParams};
    use crate::enumerate::DEFAULT_BUDGET_BYTES;
    use crate::length::LengthFunction;
    use crate::presets::preset;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn chi_sums_over_the_class() {
        let g = preset("paper-example-3").unwrap();
        let el = |s: &str| g.parse_element(s).unwrap();
        let chi = ClassFunctional::of_class(&g, &el("a"), 100).unwrap();
        assert_eq!(chi.len(), 2);
        let f = GroupAlgebraElement::from_terms(&g, [(el("a"), c(3.0)), (el("a^2"), c(5.0)), (el("x"), c(7.0))]).unwrap();
        assert_eq!(chi_eval(&chi, &f).unwrap(), c(8.0));
        let e = ClassFunctional::of_class(&g, &g.identity(), 10).unwrap();
        assert_eq!(chi_eval(&e, &f).unwrap(), c(0.0));
        assert!(ClassFunctional::from_elements(&g, &[el("a")]).is_err());
        assert!(ClassFunctional::of_class(&g, &el("x"), 100).is_err());
    }

    #[test]
    fn point_evaluation_is_not_a_trace() {
        let f2 = preset("free2").unwrap();
        let el = |s: &str| f2.parse_element(s).unwrap();
        let delta = |s: &str| GroupAlgebraElement::delta(&f2, &el(s)).unwrap();
        let tau = PointEvaluation::new(&f2, &el("x")).unwrap();
        let check = trace_property_check(&tau, &delta("y"), &delta("y^-1 x"), 1e-12).unwrap();
        assert_eq!(check.deviation, 1.0);
        assert!(!check.passed);
        let zero = TraceFunctional::zero(&f2);
        assert!(trace_property_check(&zero, &delta("y"), &delta("y^-1 x"), 1e-12).unwrap().passed);
    }

    #[test]
    fn documented_trace_space_dimensions() {
        let g = preset("paper-example-3").unwrap();
        let space = trace_space_basis(&g, 4, DEFAULT_BUDGET_BYTES).unwrap();
        assert_eq!(space.dimension(), 2);
        assert!(space.complete_within_horizon());
        let el = |s: &str| g.parse_element(s).unwrap();
        let mut nontrivial = space.classes[1].elements();
        nontrivial.sort();
        let mut expect = vec![el("a"), el("a^2")];
        expect.sort();
        assert_eq!(space.classes[0].elements(), vec![g.identity()]);
        assert_eq!(nontrivial, expect);
        assert_eq!(trace_space_basis(&preset("z3xfree2").unwrap(), 4, DEFAULT_BUDGET_BYTES).unwrap().dimension(), 3);
        assert_eq!(trace_space_basis(&preset("free2").unwrap(), 6, DEFAULT_BUDGET_BYTES).unwrap().dimension(), 1);
    }

    #[test]
    fn witnesses_carry_the_certificate_bounds() {
        let f2 = preset("free2").unwrap();
        let x = f2.parse_element("x").unwrap();
        let params = SobolevParams::new(2.0, LengthFunction::exact(&f2).unwrap()).unwrap();
        let w1 = witness_element(&f2, &x, 1).unwrap();
        assert_eq!(hs_norm(&w1, &params).unwrap(), 4.0);
        let w3 = witness_element(&f2, &x, 3).unwrap();
        assert_eq!(w3.support_len(), 2);
        assert!((hs_norm(&w3, &params).unwrap() - 16.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!(matches!(witness_element(&f2, &x, 2), Err(Error::EmptySphere(2))));

        let cert = vanishing_certificate(&f2, &x, 2.0, 11).unwrap();
        assert!(cert.exact);
        for row in &cert.rows {
            let w = witness_element(&f2, &x, row.l).unwrap();
            assert!((hs_norm(&w, &params).unwrap() - row.bound).abs() < 1e-12);
        }
    }

    #[test]
    fn certificate_preconditions() {
        let g = preset("paper-example-3").unwrap();
        let a = g.parse_element("a").unwrap();
        assert!(matches!(vanishing_certificate(&g, &a, 2.0, 10), Err(Error::FiniteClass { size: 2 })));
        assert!(matches!(vanishing_certificate(&g, &g.identity(), 2.0, 10), Err(Error::FiniteClass { size: 1 })));
        let f2 = preset("free2").unwrap();
        let x = f2.parse_element("x").unwrap();
        assert!(matches!(vanishing_certificate(&f2, &x, 2.0, 3), Err(Error::InsufficientData(_))));
    }
}
