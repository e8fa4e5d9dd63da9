//! Group backends with canonical normal forms.
//!
//! Every backend exposes the same word-problem interface: multiplication,
//! inversion, a symmetric generating set and (where one is known) an exact
//! geodesic length rule. Elements are tagged byte strings; two elements are
//! equal exactly when their normal forms are byte-identical.

mod finite;
mod free;
mod product;
mod quotient;
mod semidirect;
mod spec;
mod word;

use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub use finite::parse_table;
pub use spec::{make_backend, BackendSpec};

pub(crate) use finite::FiniteGroup;
pub(crate) use product::{direct_pair, encode_syllables, split_direct, syllables, Pair};
pub(crate) use semidirect::encode as semidirect_nf;
pub(crate) use quotient::Quotient;
pub(crate) use semidirect::Semidirect;

/// Raw canonical encoding of an element.
pub type NormalForm = SmallVec<[u8; 24]>;

/// Short identifier derived from the backend fingerprint; tags every element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BackendId(pub u64);

/// An element of some backend, stored as its canonical normal form.
///
/// Ordering is lexicographic on the normal-form bytes, which is the
/// deterministic order used for spheres, caches and class representatives.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    backend: BackendId,
    nf: NormalForm,
}

impl GroupElement {
    pub(crate) fn new(backend: BackendId, nf: NormalForm) -> Self {
        GroupElement { backend, nf }
    }

    pub fn backend_id(&self) -> BackendId {
        self.backend
    }

    pub fn normal_form(&self) -> &[u8] {
        &self.nf
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupElement({:02x?})", &self.nf[..])
    }
}

/// One entry of a symmetric generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub backend_id: BackendId,
    /// Index of the primary generator this entry belongs to.
    pub index: usize,
    /// True for the formal inverse of a primary generator.
    pub is_inverse: bool,
}

/// Coarse description of a backend, for reports and dispatch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KindTag {
    Free { rank: usize },
    Finite { order: usize },
    FreeProduct,
    DirectProduct,
    Semidirect,
    Quotient,
}

pub(crate) enum Kind {
    Free(free::FreeGroup),
    Finite(FiniteGroup),
    FreeProduct(Pair),
    Direct(Pair),
    Semidirect(Semidirect),
    Quotient(Quotient),
}

/// A group together with its word-problem oracle.
///
/// Backends are immutable once built and are shared through `Arc`.
pub struct GroupBackend {
    kind: Kind,
    description: String,
    fingerprint: [u8; 32],
    id: BackendId,
    names: Vec<String>,
    generators: Vec<Generator>,
    gen_nf: Vec<NormalForm>,
    gen_inverse: Vec<usize>,
    identity: NormalForm,
}

impl fmt::Debug for GroupBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupBackend")
            .field("description", &self.description)
            .field("generators", &self.names)
            .finish()
    }
}

pub(crate) fn put_varint(out: &mut NormalForm, mut v: u64) {
    loop {
        let b = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(b);
            return;
        }
        out.push(b | 0x80);
    }
}

/// Decodes a canonical LEB128 integer, returning the value and bytes consumed.
pub(crate) fn get_varint(bytes: &[u8]) -> Option<(u64, usize)> {
    let mut v = 0u64;
    for (i, &b) in bytes.iter().enumerate().take(10) {
        v |= u64::from(b & 0x7f) << (7 * i);
        if b & 0x80 == 0 {
            // reject overlong encodings so the normal form stays unique
            if i > 0 && b == 0 {
                return None;
            }
            return Some((v, i + 1));
        }
    }
    None
}

const SPARE_NAMES: &str = "abcdfghkmnpqrstuvwxyz";

impl GroupBackend {
    /// Builds the symmetric generating set from primary generators and
    /// finishes kind-specific tables. Primaries that are trivial or repeat an
    /// earlier generator (or its inverse) are dropped.
    fn assemble(
        kind: Kind,
        description: String,
        primaries: Vec<(String, NormalForm)>,
    ) -> Result<GroupBackend> {
        let fingerprint: [u8; 32] = Sha256::digest(description.as_bytes()).into();
        let id = BackendId(u64::from_le_bytes(fingerprint[..8].try_into().unwrap()));
        let mut backend = GroupBackend {
            kind,
            description,
            fingerprint,
            id,
            names: Vec::new(),
            generators: Vec::new(),
            gen_nf: Vec::new(),
            gen_inverse: Vec::new(),
            identity: NormalForm::new(),
        };
        backend.identity = backend.identity_raw();

        for (name, nf) in primaries {
            if nf == backend.identity || backend.gen_nf.contains(&nf) {
                continue;
            }
            if name.is_empty() || name == "e" || name == "1" || name.contains(char::is_whitespace) {
                return Err(Error::InvalidParameters(format!("bad generator name `{name}`")));
            }
            if backend.names.contains(&name) {
                return Err(Error::InvalidParameters(format!("duplicate generator name `{name}`")));
            }
            let index = backend.names.len();
            backend.names.push(name);
            let inv = backend.inv_raw(&nf);
            let pos = backend.gen_nf.len();
            backend.generators.push(Generator { backend_id: id, index, is_inverse: false });
            backend.gen_nf.push(nf.clone());
            if inv == nf {
                backend.gen_inverse.push(pos);
            } else {
                backend.gen_inverse.push(pos + 1);
                backend.generators.push(Generator { backend_id: id, index, is_inverse: true });
                backend.gen_nf.push(inv);
                backend.gen_inverse.push(pos);
            }
        }

        let gen_nf = backend.gen_nf.clone();
        match &mut backend.kind {
            Kind::Finite(g) => g.finish(&gen_nf)?,
            Kind::FreeProduct(p) | Kind::Direct(p) => p.finish(&gen_nf)?,
            Kind::Semidirect(s) => s.finish(&gen_nf),
            Kind::Quotient(q) => q.finish(&gen_nf),
            Kind::Free(_) => {}
        }
        Ok(backend)
    }

    /// Free group of the given rank on generators x, y, z (or x1..xr).
    pub fn free(rank: usize) -> Result<Arc<GroupBackend>> {
        let names = if rank <= 3 {
            ["x", "y", "z"][..rank].iter().map(|s| s.to_string()).collect()
        } else {
            (1..=rank).map(|i| format!("x{i}")).collect()
        };
        Self::free_named(rank, names)
    }

    pub fn free_named(rank: usize, names: Vec<String>) -> Result<Arc<GroupBackend>> {
        if rank == 0 || rank > 127 {
            return Err(Error::InvalidParameters(format!("free rank {rank} outside 1..=127")));
        }
        if names.len() != rank {
            return Err(Error::InvalidParameters("one name per free generator required".into()));
        }
        let primaries = names
            .into_iter()
            .enumerate()
            .map(|(i, n)| (n, SmallVec::from_slice(&[(2 * i) as u8])))
            .collect();
        let kind = Kind::Free(free::FreeGroup { rank });
        Ok(Arc::new(Self::assemble(kind, format!("free({rank})"), primaries)?))
    }

    /// Finite group from a multiplication table (`table[g][h]` is the index of
    /// `gh`, identity at index 0). When `generators` is `None` a generating set
    /// is chosen greedily by smallest index.
    pub fn finite(
        table: Vec<Vec<u32>>,
        generators: Option<Vec<u32>>,
        names: Option<Vec<String>>,
    ) -> Result<Arc<GroupBackend>> {
        let group = FiniteGroup::new(table)?;
        let gens = match generators {
            Some(g) => g,
            None => group.greedy_generators(),
        };
        for &g in &gens {
            if g as usize >= group.order() {
                return Err(Error::InvalidParameters(format!("generator index {g} out of range")));
            }
        }
        let names = match names {
            Some(n) if n.len() == gens.len() => n,
            Some(_) => {
                return Err(Error::InvalidParameters("one name per finite generator required".into()))
            }
            None => gens
                .iter()
                .enumerate()
                .map(|(i, _)| SPARE_NAMES.chars().nth(i).map(String::from).unwrap_or(format!("a{i}")))
                .collect(),
        };
        let description = group.describe(&gens);
        let primaries = names
            .into_iter()
            .zip(gens.iter())
            .map(|(n, &g)| {
                let mut nf = NormalForm::new();
                put_varint(&mut nf, u64::from(g));
                (n, nf)
            })
            .collect();
        Ok(Arc::new(Self::assemble(Kind::Finite(group), description, primaries)?))
    }

    /// Cyclic group of order `n` generated by a single named generator.
    pub fn cyclic(n: usize, name: &str) -> Result<Arc<GroupBackend>> {
        if n < 2 {
            return Err(Error::InvalidParameters("cyclic order must be at least 2".into()));
        }
        let table = (0..n)
            .map(|i| (0..n).map(|j| ((i + j) % n) as u32).collect())
            .collect();
        Self::finite(table, Some(vec![1]), Some(vec![name.to_string()]))
    }

    /// The symmetric group on three points (order 6), generated by the
    /// transpositions (0 1) and (1 2).
    pub fn symmetric3() -> Result<Arc<GroupBackend>> {
        let (table, gens) = finite::symmetric3_table();
        Self::finite(table, Some(gens), Some(vec!["s".into(), "t".into()]))
    }

    pub fn free_product(left: Arc<GroupBackend>, right: Arc<GroupBackend>) -> Result<Arc<GroupBackend>> {
        if left.is_trivial() || right.is_trivial() {
            return Err(Error::InvalidParameters("free product factors must be nontrivial".into()));
        }
        let description = format!("free_product({},{})", left.description, right.description);
        let primaries = Pair::primaries(&left, &right, |side, nf| product::free_product_syllable(side, nf));
        let kind = Kind::FreeProduct(Pair::new(left, right, false));
        Ok(Arc::new(Self::assemble(kind, description, primaries)?))
    }

    pub fn direct_product(left: Arc<GroupBackend>, right: Arc<GroupBackend>) -> Result<Arc<GroupBackend>> {
        let description = format!("direct_product({},{})", left.description, right.description);
        let (li, ri) = (left.identity.clone(), right.identity.clone());
        let primaries = Pair::primaries(&left, &right, |side, nf| {
            if side == 0 {
                product::direct_pair(nf, &ri)
            } else {
                product::direct_pair(&li, nf)
            }
        });
        let kind = Kind::Direct(Pair::new(left, right, true));
        Ok(Arc::new(Self::assemble(kind, description, primaries)?))
    }

    /// Semidirect product `normal ⋊ base` with `base` free. `action[i]` is the
    /// automorphism of `normal` (as an index permutation) induced by
    /// conjugation with the i-th base generator: `s n s⁻¹ = action[i][n]`.
    pub fn semidirect(
        normal: Arc<GroupBackend>,
        base: Arc<GroupBackend>,
        action: Vec<Vec<u32>>,
    ) -> Result<Arc<GroupBackend>> {
        let s = Semidirect::new(normal.clone(), base.clone(), action)?;
        let description = s.describe();
        let mut primaries = Vec::new();
        for (i, name) in base.names.iter().enumerate() {
            let pos = base.primary_position(i);
            primaries.push((name.clone(), semidirect::encode(0, &base.gen_nf[pos])));
        }
        let mut used: Vec<String> = base.names.clone();
        for (i, name) in normal.names.iter().enumerate() {
            let pos = normal.primary_position(i);
            let idx = normal.finite_index(&normal.gen_nf[pos]);
            let name = disambiguate(name, &used);
            used.push(name.clone());
            primaries.push((name, semidirect::encode(idx, &base.identity)));
        }
        Ok(Arc::new(Self::assemble(Kind::Semidirect(s), description, primaries)?))
    }

    /// Quotient by an explicit finite normal subgroup. Callers must have
    /// verified that `members` is a normal subgroup; see `fc::quotient_backend`.
    pub(crate) fn quotient_unchecked(
        base: Arc<GroupBackend>,
        members: Vec<GroupElement>,
    ) -> Result<Arc<GroupBackend>> {
        let q = Quotient::new(base.clone(), members)?;
        let description = q.describe();
        let mut primaries = Vec::new();
        for (i, name) in base.names.iter().enumerate() {
            let pos = base.primary_position(i);
            primaries.push((name.clone(), q.rep(&base.gen_nf[pos])));
        }
        Ok(Arc::new(Self::assemble(Kind::Quotient(q), description, primaries)?))
    }

    /// For a quotient backend G/N, the base backend G.
    pub fn quotient_base(&self) -> Option<&Arc<GroupBackend>> {
        match &self.kind {
            Kind::Quotient(q) => Some(&q.base),
            _ => None,
        }
    }

    /// The coset gN of a base element, for a quotient backend.
    pub fn project(&self, g: &GroupElement) -> Result<GroupElement> {
        match &self.kind {
            Kind::Quotient(q) if g.backend_id() == q.base.id() => Ok(self.elem(q.rep(g.normal_form()))),
            Kind::Quotient(_) => Err(Error::BackendMismatch),
            _ => Err(Error::Unsupported(format!("{} is not a quotient", self.description))),
        }
    }

    /// The coset representative (least normal form in the coset) as a base
    /// element.
    pub fn lift(&self, q: &GroupElement) -> Result<GroupElement> {
        let base = self
            .quotient_base()
            .ok_or_else(|| Error::Unsupported(format!("{} is not a quotient", self.description)))?;
        if q.backend_id() != self.id() {
            return Err(Error::BackendMismatch);
        }
        Ok(base.elem(NormalForm::from_slice(q.normal_form())))
    }

    pub fn id(&self) -> BackendId {
        self.id
    }

    /// SHA-256 of the canonical kind-and-parameters description.
    pub fn fingerprint(&self) -> [u8; 32] {
        self.fingerprint
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn kind_tag(&self) -> KindTag {
        match &self.kind {
            Kind::Free(f) => KindTag::Free { rank: f.rank },
            Kind::Finite(g) => KindTag::Finite { order: g.order() },
            Kind::FreeProduct(_) => KindTag::FreeProduct,
            Kind::Direct(_) => KindTag::DirectProduct,
            Kind::Semidirect(_) => KindTag::Semidirect,
            Kind::Quotient(_) => KindTag::Quotient,
        }
    }

    pub(crate) fn kind(&self) -> &Kind {
        &self.kind
    }

    /// Primary generator names, in order.
    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    /// The symmetric generating set.
    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator_element(&self, pos: usize) -> GroupElement {
        self.elem(self.gen_nf[pos].clone())
    }

    pub fn generator_elements(&self) -> Vec<GroupElement> {
        self.gen_nf.iter().map(|nf| self.elem(nf.clone())).collect()
    }

    /// Position of the paired inverse of generator `pos`.
    pub fn generator_inverse(&self, pos: usize) -> usize {
        self.gen_inverse[pos]
    }

    pub fn generator_label(&self, pos: usize) -> String {
        let g = &self.generators[pos];
        if g.is_inverse {
            format!("{}^-1", self.names[g.index])
        } else {
            self.names[g.index].clone()
        }
    }

    fn primary_position(&self, index: usize) -> usize {
        self.generators.iter().position(|g| g.index == index && !g.is_inverse).unwrap()
    }

    pub fn identity(&self) -> GroupElement {
        self.elem(self.identity.clone())
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        g.nf == self.identity
    }

    fn is_trivial(&self) -> bool {
        self.gen_nf.is_empty()
    }

    pub(crate) fn elem(&self, nf: NormalForm) -> GroupElement {
        GroupElement::new(self.id, nf)
    }

    pub(crate) fn identity_nf(&self) -> &NormalForm {
        &self.identity
    }

    pub(crate) fn gen_nf(&self) -> &[NormalForm] {
        &self.gen_nf
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if g.backend == self.id {
            Ok(())
        } else {
            Err(Error::BackendMismatch)
        }
    }

    /// Wraps raw bytes as an element after validating the normal form.
    pub fn element_from_normal_form(&self, bytes: &[u8]) -> Result<GroupElement> {
        if self.valid_raw(bytes) {
            Ok(self.elem(SmallVec::from_slice(bytes)))
        } else {
            Err(Error::BackendMismatch)
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.elem(self.mul_raw(&g.nf, &h.nf)))
    }

    pub fn invert(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(self.elem(self.inv_raw(&g.nf)))
    }

    /// `h x h⁻¹`.
    pub fn conjugate(&self, h: &GroupElement, x: &GroupElement) -> Result<GroupElement> {
        self.check(h)?;
        self.check(x)?;
        Ok(self.elem(self.conj_raw(&h.nf, &x.nf)))
    }

    pub(crate) fn conj_raw(&self, h: &[u8], x: &[u8]) -> NormalForm {
        let hx = self.mul_raw(h, x);
        self.mul_raw(&hx, &self.inv_raw(h))
    }

    /// Right multiplication by a generator, the Cayley-graph edge g → gs.
    pub(crate) fn mul_gen_raw(&self, g: &[u8], pos: usize) -> NormalForm {
        self.mul_raw(g, &self.gen_nf[pos])
    }

    /// Product of generators, evaluated letter by letter.
    pub fn evaluate_word(&self, word: &[usize]) -> GroupElement {
        let mut acc = self.identity.clone();
        for &pos in word {
            acc = self.mul_gen_raw(&acc, pos);
        }
        self.elem(acc)
    }

    /// True when an exact geodesic length rule is available.
    pub fn has_exact_length(&self) -> bool {
        match &self.kind {
            Kind::Free(_) | Kind::Finite(_) => true,
            Kind::FreeProduct(p) | Kind::Direct(p) => {
                p.left.has_exact_length() && p.right.has_exact_length()
            }
            Kind::Semidirect(s) => s.length_rule_exact(),
            Kind::Quotient(_) => false,
        }
    }

    /// Exact word length when a rule is known, `None` otherwise.
    pub fn exact_length(&self, g: &GroupElement) -> Result<Option<usize>> {
        self.check(g)?;
        Ok(self.len_raw(&g.nf))
    }

    pub(crate) fn len_raw(&self, a: &[u8]) -> Option<usize> {
        if !self.has_exact_length() {
            return None;
        }
        Some(match &self.kind {
            Kind::Free(_) => a.len(),
            Kind::Finite(g) => g.length(finite_idx(a)),
            Kind::FreeProduct(p) => product::syllables(a)
                .iter()
                .map(|(side, s)| p.factor(*side).len_raw(s).unwrap())
                .sum(),
            Kind::Direct(p) => {
                let (l, r) = product::split_direct(a);
                p.left.len_raw(l).unwrap() + p.right.len_raw(r).unwrap()
            }
            Kind::Semidirect(s) => s.length(a),
            Kind::Quotient(_) => unreachable!(),
        })
    }

    pub(crate) fn identity_raw(&self) -> NormalForm {
        match &self.kind {
            Kind::Free(_) | Kind::FreeProduct(_) => NormalForm::new(),
            Kind::Finite(_) => SmallVec::from_slice(&[0]),
            Kind::Direct(p) => product::direct_pair(&p.left.identity, &p.right.identity),
            Kind::Semidirect(s) => semidirect::encode(0, &s.base.identity),
            Kind::Quotient(q) => q.identity(),
        }
    }

    pub(crate) fn mul_raw(&self, a: &[u8], b: &[u8]) -> NormalForm {
        match &self.kind {
            Kind::Free(_) => free::mul(a, b),
            Kind::Finite(g) => {
                let mut out = NormalForm::new();
                put_varint(&mut out, u64::from(g.mul(finite_idx(a), finite_idx(b))));
                out
            }
            Kind::FreeProduct(p) => product::free_product_mul(p, a, b),
            Kind::Direct(p) => {
                let (al, ar) = product::split_direct(a);
                let (bl, br) = product::split_direct(b);
                product::direct_pair(&p.left.mul_raw(al, bl), &p.right.mul_raw(ar, br))
            }
            Kind::Semidirect(s) => s.mul(a, b),
            Kind::Quotient(q) => q.rep(&q.base.mul_raw(a, b)),
        }
    }

    pub(crate) fn inv_raw(&self, a: &[u8]) -> NormalForm {
        match &self.kind {
            Kind::Free(_) => free::inv(a),
            Kind::Finite(g) => {
                let mut out = NormalForm::new();
                put_varint(&mut out, u64::from(g.inverse(finite_idx(a))));
                out
            }
            Kind::FreeProduct(p) => product::free_product_inv(p, a),
            Kind::Direct(p) => {
                let (l, r) = product::split_direct(a);
                product::direct_pair(&p.left.inv_raw(l), &p.right.inv_raw(r))
            }
            Kind::Semidirect(s) => s.inv(a),
            Kind::Quotient(q) => q.rep(&q.base.inv_raw(a)),
        }
    }

    pub(crate) fn valid_raw(&self, a: &[u8]) -> bool {
        match &self.kind {
            Kind::Free(f) => free::valid(f.rank, a),
            Kind::Finite(g) => match get_varint(a) {
                Some((v, n)) => n == a.len() && (v as usize) < g.order(),
                None => false,
            },
            Kind::FreeProduct(p) => product::free_product_valid(p, a),
            Kind::Direct(p) => product::direct_valid(p, a),
            Kind::Semidirect(s) => s.valid(a),
            Kind::Quotient(q) => q.base.valid_raw(a) && q.rep(a).as_slice() == a,
        }
    }

    /// A word in the symmetric generators (positions) evaluating to `a`.
    pub(crate) fn word_raw(&self, a: &[u8]) -> Vec<usize> {
        match &self.kind {
            Kind::Free(_) => a.iter().map(|&l| l as usize).collect(),
            Kind::Finite(g) => g.word(finite_idx(a)).to_vec(),
            Kind::FreeProduct(p) => product::syllables(a)
                .iter()
                .flat_map(|(side, s)| {
                    let f = p.factor(*side);
                    f.word_raw(s).into_iter().map(move |w| p.embed[*side as usize][w])
                })
                .collect(),
            Kind::Direct(p) => {
                let (l, r) = product::split_direct(a);
                let mut w: Vec<usize> = p.left.word_raw(l).into_iter().map(|x| p.embed[0][x]).collect();
                w.extend(p.right.word_raw(r).into_iter().map(|x| p.embed[1][x]));
                w
            }
            Kind::Semidirect(s) => s.word(a),
            Kind::Quotient(q) => q.word(a),
        }
    }

    pub fn word(&self, g: &GroupElement) -> Result<Vec<usize>> {
        self.check(g)?;
        Ok(self.word_raw(&g.nf))
    }

    /// Index of a finite-backend element; only meaningful for `Kind::Finite`.
    pub(crate) fn finite_index(&self, a: &[u8]) -> u32 {
        finite_idx(a)
    }

    /// Parses whitespace-separated generator tokens such as `x y^-1 a`.
    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        word::parse(self, text)
    }

    /// Renders an element as a parseable word, `e` for the identity.
    pub fn format_element(&self, g: &GroupElement) -> String {
        word::format(self, &self.word_raw(&g.nf))
    }
}

fn finite_idx(a: &[u8]) -> u32 {
    get_varint(a).map(|(v, _)| v as u32).unwrap_or(0)
}

fn disambiguate(name: &str, used: &[String]) -> String {
    if !used.iter().any(|u| u == name) {
        return name.to_string();
    }
    SPARE_NAMES
        .chars()
        .map(String::from)
        .find(|c| !used.contains(c))
        .unwrap_or_else(|| format!("{name}'"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn varint_round_trip_and_canonical() {
        for v in [0u64, 1, 127, 128, 300, 1 << 40] {
            let mut nf = NormalForm::new();
            put_varint(&mut nf, v);
            assert_eq!(get_varint(&nf), Some((v, nf.len())));
        }
        assert_eq!(get_varint(&[0x80, 0x00]), None);
        assert_eq!(get_varint(&[0x80]), None);
    }

    #[test]
    fn free_two_basics() {
        let f2 = GroupBackend::free(2).unwrap();
        let x = f2.parse_element("x").unwrap();
        let xi = f2.invert(&x).unwrap();
        assert!(f2.is_identity(&f2.multiply(&x, &xi).unwrap()));
        let xy = f2.parse_element("x y").unwrap();
        let yix = f2.parse_element("y^-1 x").unwrap();
        assert_eq!(f2.multiply(&xy, &yix).unwrap(), f2.parse_element("x x").unwrap());
        assert_eq!(f2.invert(&xy).unwrap(), f2.parse_element("y^-1 x^-1").unwrap());
        assert!(f2.is_identity(&f2.invert(&f2.identity()).unwrap()));
        let w = f2.parse_element("x y x^-1").unwrap();
        assert_eq!(f2.exact_length(&w).unwrap(), Some(3));
        assert_eq!(f2.exact_length(&f2.identity()).unwrap(), Some(0));
        assert_eq!(f2.conjugate(&f2.identity(), &x).unwrap(), x);
    }

    #[test]
    fn generating_sets_are_symmetric() {
        let backends = [
            GroupBackend::free(2).unwrap(),
            GroupBackend::cyclic(3, "a").unwrap(),
            GroupBackend::symmetric3().unwrap(),
            GroupBackend::cyclic(2, "a").unwrap(),
        ];
        for b in &backends {
            for pos in 0..b.generators().len() {
                let inv = b.generator_inverse(pos);
                let prod = b.multiply(&b.generator_element(pos), &b.generator_element(inv)).unwrap();
                assert!(b.is_identity(&prod), "{}", b.description());
                assert_eq!(b.generator_inverse(inv), pos);
            }
        }
    }

    #[test]
    fn mismatched_backends_are_rejected() {
        let f2 = GroupBackend::free(2).unwrap();
        let z3 = GroupBackend::cyclic(3, "a").unwrap();
        let x = f2.parse_element("x").unwrap();
        let a = z3.parse_element("a").unwrap();
        assert!(matches!(f2.multiply(&x, &a), Err(Error::BackendMismatch)));
        assert!(matches!(z3.invert(&x), Err(Error::BackendMismatch)));
        assert!(f2.element_from_normal_form(&[0, 1]).is_err());
    }

    #[test]
    fn formatting_round_trips() {
        let f2 = GroupBackend::free(2).unwrap();
        let g = f2.parse_element("x x y^-1 x^3").unwrap();
        let s = f2.format_element(&g);
        assert_eq!(s, "x^2 y^-1 x^3");
        assert_eq!(f2.parse_element(&s).unwrap(), g);
        assert_eq!(f2.format_element(&f2.identity()), "e");
    }
}
