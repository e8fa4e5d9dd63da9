//! Finitely supported complex functions on a group, under convolution.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{GroupBackend, GroupElement, NormalForm};
use crate::length::LengthFunction;

/// Coefficients with modulus at or below this are dropped.
pub const PRUNE_TOLERANCE: f64 = 1e-15;

/// An element Σ c_g g of ℂ[G]. The support is kept ordered by normal form so
/// that every derived sum is evaluated in a fixed order.
#[derive(Clone)]
pub struct GroupAlgebraElement {
    backend: Arc<GroupBackend>,
    coeffs: BTreeMap<NormalForm, Complex64>,
}

impl std::fmt::Debug for GroupAlgebraElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .map(|(nf, c)| format!("{c}·[{}]", self.backend.format_element(&self.backend.elem(nf.clone()))))
            .collect();
        write!(f, "{}", if terms.is_empty() { "0".into() } else { terms.join(" + ") })
    }
}

impl PartialEq for GroupAlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.backend.id() == other.backend.id() && self.coeffs == other.coeffs
    }
}

impl GroupAlgebraElement {
    pub fn zero(backend: &Arc<GroupBackend>) -> Self {
        GroupAlgebraElement { backend: backend.clone(), coeffs: BTreeMap::new() }
    }

    pub fn delta(backend: &Arc<GroupBackend>, g: &GroupElement) -> Result<Self> {
        Self::from_terms(backend, [(g.clone(), Complex64::new(1.0, 0.0))])
    }

    /// Sums the given terms; repeated elements accumulate.
    pub fn from_terms(
        backend: &Arc<GroupBackend>,
        terms: impl IntoIterator<Item = (GroupElement, Complex64)>,
    ) -> Result<Self> {
        let mut f = Self::zero(backend);
        for (g, c) in terms {
            f.add_term(&g, c)?;
        }
        Ok(f)
    }

    pub(crate) fn from_raw(backend: &Arc<GroupBackend>, coeffs: BTreeMap<NormalForm, Complex64>) -> Self {
        let mut f = GroupAlgebraElement { backend: backend.clone(), coeffs };
        f.prune();
        f
    }

    pub fn backend(&self) -> &Arc<GroupBackend> {
        &self.backend
    }

    pub fn add_term(&mut self, g: &GroupElement, c: Complex64) -> Result<()> {
        if g.backend_id() != self.backend.id() {
            return Err(Error::BackendMismatch);
        }
        let entry = self.coeffs.entry(NormalForm::from_slice(g.normal_form())).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if entry.norm() <= PRUNE_TOLERANCE {
            self.coeffs.remove(g.normal_form());
        }
        Ok(())
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| c.norm() > PRUNE_TOLERANCE);
    }

    /// f(g); zero off the support.
    pub fn coefficient(&self, g: &GroupElement) -> Complex64 {
        if g.backend_id() != self.backend.id() {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs.get(g.normal_form()).copied().unwrap_or_default()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Support and coefficients in normal-form order.
    pub fn terms(&self) -> impl Iterator<Item = (GroupElement, Complex64)> + '_ {
        self.coeffs.iter().map(|(nf, c)| (self.backend.elem(nf.clone()), *c))
    }

    pub(crate) fn raw_terms(&self) -> impl Iterator<Item = (&NormalForm, &Complex64)> {
        self.coeffs.iter()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.backend.id() == other.backend.id() {
            Ok(())
        } else {
            Err(Error::BackendMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut coeffs = self.coeffs.clone();
        for (nf, c) in &other.coeffs {
            *coeffs.entry(nf.clone()).or_default() += c;
        }
        Ok(Self::from_raw(&self.backend, coeffs))
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let coeffs = self.coeffs.iter().map(|(nf, c)| (nf.clone(), c * k)).collect();
        Self::from_raw(&self.backend, coeffs)
    }

    /// f*(g) = conj(f(g⁻¹)).
    pub fn involution(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(nf, c)| (self.backend.inv_raw(nf), c.conj())).collect();
        Self::from_raw(&self.backend, coeffs)
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// (f * g)(k) = Σ_h f(h) g(h⁻¹k).
pub fn convolve(f: &GroupAlgebraElement, g: &GroupAlgebraElement) -> Result<GroupAlgebraElement> {
    f.check(g)?;
    let backend = &f.backend;
    let mut acc: HashMap<NormalForm, Complex64> = HashMap::new();
    for (a, ca) in &f.coeffs {
        for (b, cb) in &g.coeffs {
            *acc.entry(backend.mul_raw(a, b)).or_default() += ca * cb;
        }
    }
    Ok(GroupAlgebraElement::from_raw(backend, acc.into_iter().collect()))
}

#[derive(Clone)]
pub struct SobolevParams {
    pub s: f64,
    pub lengths: LengthFunction,
}

impl SobolevParams {
    pub fn new(s: f64, lengths: LengthFunction) -> Result<Self> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::InvalidArgument(format!("Sobolev exponent must be finite and ≥ 0, got {s}")));
        }
        Ok(SobolevParams { s, lengths })
    }
}

/// (Σ |c_g|² (1 + l(g))^{2s})^{1/2}.
pub fn hs_norm(f: &GroupAlgebraElement, params: &SobolevParams) -> Result<f64> {
    if params.lengths.backend().id() != f.backend.id() {
        return Err(Error::BackendMismatch);
    }
    let mut sum = 0.0;
    for (nf, c) in &f.coeffs {
        let l = params.lengths.length_raw(nf)?;
        sum += c.norm_sqr() * (1.0 + l as f64).powf(2.0 * params.s);
    }
    Ok(sum.sqrt())
}
