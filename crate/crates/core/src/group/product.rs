//! Free products and direct products of two backends.
//!
//! Free-product normal form: alternating syllables, each encoded as a side
//! byte (0 left, 1 right), a length varint and the factor's normal form.
//! Every syllable is a nontrivial factor element, so the form is unique.
//!
//! Direct-product normal form: length varint of the left component followed
//! by both components.

use std::sync::Arc;

use super::{disambiguate, get_varint, put_varint, GroupBackend, NormalForm};
use crate::error::{Error, Result};

pub(crate) struct Pair {
    pub(crate) left: Arc<GroupBackend>,
    pub(crate) right: Arc<GroupBackend>,
    /// Factor generator position -> composite generator position.
    pub(crate) embed: [Vec<usize>; 2],
    direct: bool,
}

impl Pair {
    pub(crate) fn new(left: Arc<GroupBackend>, right: Arc<GroupBackend>, direct: bool) -> Pair {
        Pair { left, right, embed: [Vec::new(), Vec::new()], direct }
    }

    pub(crate) fn factor(&self, side: u8) -> &GroupBackend {
        if side == 0 {
            &self.left
        } else {
            &self.right
        }
    }

    pub(crate) fn primaries(
        left: &GroupBackend,
        right: &GroupBackend,
        embed: impl Fn(u8, &NormalForm) -> NormalForm,
    ) -> Vec<(String, NormalForm)> {
        let mut out = Vec::new();
        let mut used = Vec::new();
        for (side, factor) in [(0u8, left), (1u8, right)] {
            for (i, name) in factor.names.iter().enumerate() {
                let name = disambiguate(name, &used);
                used.push(name.clone());
                out.push((name, embed(side, &factor.gen_nf[factor.primary_position(i)])));
            }
        }
        out
    }

    fn embed_nf(&self, side: u8, nf: &NormalForm) -> NormalForm {
        if !self.direct {
            free_product_syllable(side, nf)
        } else if side == 0 {
            direct_pair(nf, &self.right.identity)
        } else {
            direct_pair(&self.left.identity, nf)
        }
    }

    pub(crate) fn finish(&mut self, gen_nf: &[NormalForm]) -> Result<()> {
        for side in 0..2u8 {
            let factor = self.factor(side);
            let mut map = Vec::with_capacity(factor.gen_nf.len());
            for nf in &factor.gen_nf {
                let image = self.embed_nf(side, nf);
                let pos = gen_nf
                    .iter()
                    .position(|g| *g == image)
                    .ok_or_else(|| Error::InvalidParameters("factor generator lost in product".into()))?;
                map.push(pos);
            }
            self.embed[side as usize] = map;
        }
        Ok(())
    }
}

pub(crate) fn free_product_syllable(side: u8, nf: &[u8]) -> NormalForm {
    let mut out = NormalForm::new();
    push_syllable(&mut out, side, nf);
    out
}

fn push_syllable(out: &mut NormalForm, side: u8, nf: &[u8]) {
    out.push(side);
    put_varint(out, nf.len() as u64);
    out.extend_from_slice(nf);
}

fn parse_syllables(a: &[u8]) -> Option<Vec<(u8, &[u8])>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < a.len() {
        let side = a[i];
        let (len, used) = get_varint(&a[i + 1..])?;
        let start = i + 1 + used;
        let end = start.checked_add(len as usize)?;
        if side > 1 || end > a.len() {
            return None;
        }
        out.push((side, &a[start..end]));
        i = end;
    }
    Some(out)
}

pub(crate) fn syllables(a: &[u8]) -> Vec<(u8, &[u8])> {
    parse_syllables(a).expect("corrupt free-product normal form")
}

pub(crate) fn encode_syllables<'a>(parts: impl IntoIterator<Item = (u8, &'a [u8])>) -> NormalForm {
    let mut out = NormalForm::new();
    for (side, nf) in parts {
        push_syllable(&mut out, side, nf);
    }
    out
}

pub(crate) fn free_product_mul(p: &Pair, a: &[u8], b: &[u8]) -> NormalForm {
    let mut left: Vec<(u8, NormalForm)> =
        syllables(a).into_iter().map(|(s, nf)| (s, NormalForm::from_slice(nf))).collect();
    let right = syllables(b);
    let mut j = 0;
    while j < right.len() {
        let Some((side, last)) = left.last() else { break };
        let (rside, first) = right[j];
        if *side != rside {
            break;
        }
        let factor = p.factor(rside);
        let merged = factor.mul_raw(last, first);
        j += 1;
        if merged == factor.identity {
            left.pop();
        } else {
            *left.last_mut().unwrap() = (rside, merged);
            break;
        }
    }
    let mut out = NormalForm::new();
    for (side, nf) in &left {
        push_syllable(&mut out, *side, nf);
    }
    for &(side, nf) in &right[j..] {
        push_syllable(&mut out, side, nf);
    }
    out
}

pub(crate) fn free_product_inv(p: &Pair, a: &[u8]) -> NormalForm {
    let mut out = NormalForm::new();
    for (side, nf) in syllables(a).into_iter().rev() {
        push_syllable(&mut out, side, &p.factor(side).inv_raw(nf));
    }
    out
}

pub(crate) fn free_product_valid(p: &Pair, a: &[u8]) -> bool {
    let Some(parts) = parse_syllables(a) else { return false };
    parts.windows(2).all(|w| w[0].0 != w[1].0)
        && parts.iter().all(|&(side, nf)| {
            let f = p.factor(side);
            f.valid_raw(nf) && nf != f.identity.as_slice()
        })
}

pub(crate) fn direct_pair(l: &[u8], r: &[u8]) -> NormalForm {
    let mut out = NormalForm::new();
    put_varint(&mut out, l.len() as u64);
    out.extend_from_slice(l);
    out.extend_from_slice(r);
    out
}

pub(crate) fn split_direct(a: &[u8]) -> (&[u8], &[u8]) {
    let (len, used) = get_varint(a).expect("corrupt direct-product normal form");
    a[used..].split_at(len as usize)
}

pub(crate) fn direct_valid(p: &Pair, a: &[u8]) -> bool {
    match get_varint(a) {
        Some((len, used)) if used + len as usize <= a.len() => {
            let (l, r) = a[used..].split_at(len as usize);
            p.left.valid_raw(l) && p.right.valid_raw(r)
        }
        _ => false,
    }
}
