//! Exact enumeration of C(a) ∩ B_R for free groups and free products.
//!
//! Free groups: every class element is uniquely `w c' w⁻¹` (freely reduced as
//! written), where c' is a rotation of the cyclically reduced core c of a and
//! the last letter of w is neither c'₁⁻¹ nor c'ₘ.
//!
//! Free products: reduce a to a core c that is a single syllable or has an
//! even number m ≥ 2 of syllables with first and last on different sides.
//! Every class element is uniquely `u h u⁻¹` (reduced as written) where either
//! h is a rotation c' of c and u = e, or
//! h = t·c'₁…c'ₘ₋₁·(c'ₘ t⁻¹) with t ∉ {e, c'ₘ} on the side of c'ₘ and the last
//! syllable of u on the other side, or (single-syllable core) h lies in the
//! factor class of c and the last syllable of u is on the other side.

use crate::enumerate::enumerate_ball;
use crate::error::{Error, Result};
use crate::group::{GroupBackend, Kind, NormalForm, Pair};
use crate::group::{encode_syllables, syllables};

/// Class elements of length ≤ r with their lengths, unsorted.
pub(crate) fn class_within(backend: &GroupBackend, a: &[u8], r: usize) -> Result<Vec<(NormalForm, usize)>> {
    match backend.kind() {
        Kind::Free(f) => Ok(free_class(f.rank, a, r)),
        Kind::Finite(_) => {
            let mut out = Vec::new();
            let orbit = super::orbit_closure(backend, a, usize::MAX).expect("finite group orbit closes");
            for nf in orbit {
                let l = backend.len_raw(&nf).unwrap();
                if l <= r {
                    out.push((nf, l));
                }
            }
            Ok(out)
        }
        Kind::FreeProduct(p) => free_product_class(p, a, r),
        _ => Err(Error::Unsupported(format!(
            "no exact class enumerator for {}",
            backend.description()
        ))),
    }
}

pub(crate) fn supports_exact_enumeration(backend: &GroupBackend) -> bool {
    match backend.kind() {
        Kind::Free(_) | Kind::Finite(_) => true,
        Kind::FreeProduct(p) => {
            supports_exact_enumeration(&p.left)
                && supports_exact_enumeration(&p.right)
                && p.left.has_exact_length()
                && p.right.has_exact_length()
        }
        _ => false,
    }
}

fn distinct_rotations<T: Clone + PartialEq>(core: &[T]) -> Vec<Vec<T>> {
    let m = core.len();
    let mut out: Vec<Vec<T>> = Vec::with_capacity(m);
    for i in 0..m {
        let rot: Vec<T> = core[i..].iter().chain(&core[..i]).cloned().collect();
        if !out.contains(&rot) {
            out.push(rot);
        }
    }
    out
}

fn free_class(rank: usize, a: &[u8], r: usize) -> Vec<(NormalForm, usize)> {
    let (mut lo, mut hi) = (0, a.len());
    while hi - lo >= 2 && a[lo] == a[hi - 1] ^ 1 {
        lo += 1;
        hi -= 1;
    }
    let core = &a[lo..hi];
    if core.is_empty() {
        return vec![(NormalForm::new(), 0)];
    }
    let m = core.len();
    if m > r {
        return Vec::new();
    }
    let letters: Vec<u8> = (0..2 * rank as u8).collect();
    let max_w = (r - m) / 2;
    let mut out = Vec::new();
    for rot in distinct_rotations(core) {
        out.push((NormalForm::from_slice(&rot), m));
        let (first, last) = (rot[0], rot[m - 1]);
        // w is grown right to left: `rev` holds w reversed
        let mut stack: Vec<Vec<u8>> = letters
            .iter()
            .filter(|&&t| max_w > 0 && t != first ^ 1 && t != last)
            .map(|&t| vec![t])
            .collect();
        while let Some(rev) = stack.pop() {
            let mut nf = NormalForm::with_capacity(2 * rev.len() + m);
            nf.extend(rev.iter().rev().copied());
            nf.extend_from_slice(&rot);
            nf.extend(rev.iter().map(|&l| l ^ 1));
            out.push((nf, m + 2 * rev.len()));
            if rev.len() < max_w {
                let front = *rev.last().unwrap();
                for &p in &letters {
                    if p != front ^ 1 {
                        let mut next = rev.clone();
                        next.push(p);
                        stack.push(next);
                    }
                }
            }
        }
    }
    out
}

type Syllable = (u8, NormalForm);

struct FactorLists {
    /// Nontrivial elements with lengths, per side, sorted by length.
    elements: [Vec<(NormalForm, usize)>; 2],
}

impl FactorLists {
    fn new(p: &Pair, r: usize) -> Result<Self> {
        let mut elements: [Vec<(NormalForm, usize)>; 2] = [Vec::new(), Vec::new()];
        for (side, factor) in [&p.left, &p.right].into_iter().enumerate() {
            let ball = enumerate_ball(factor, r)?;
            elements[side] = (1..=r)
                .flat_map(|l| ball.sphere_raw(l).iter().map(move |nf| (nf.clone(), l)))
                .collect();
        }
        Ok(FactorLists { elements })
    }
}

fn syllable_len(p: &Pair, s: &Syllable) -> usize {
    p.factor(s.0).len_raw(&s.1).expect("factor has an exact length rule")
}

fn emit_conjugates(
    p: &Pair,
    lists: &FactorLists,
    h: &[Syllable],
    lh: usize,
    r: usize,
    out: &mut Vec<(NormalForm, usize)>,
) {
    let encode = |u: &[Syllable]| {
        let inv: Vec<Syllable> = u.iter().rev().map(|(s, nf)| (*s, p.factor(*s).inv_raw(nf))).collect();
        let parts = u.iter().chain(h).chain(inv.iter()).map(|(s, nf)| (*s, nf.as_slice()));
        encode_syllables(parts)
    };
    out.push((encode(&[]), lh));
    if h.is_empty() {
        return;
    }
    let budget = (r - lh) / 2;
    let side_last = 1 - h[0].0;
    debug_assert!(h.len() == 1 || h[h.len() - 1].0 == h[0].0);
    // u grown right to left; `rev` holds u reversed with its length
    let mut stack: Vec<(Vec<Syllable>, usize)> = lists.elements[side_last as usize]
        .iter()
        .take_while(|(_, l)| *l <= budget)
        .map(|(nf, l)| (vec![(side_last, nf.clone())], *l))
        .collect();
    while let Some((rev, lu)) = stack.pop() {
        let u: Vec<Syllable> = rev.iter().rev().cloned().collect();
        out.push((encode(&u), lh + 2 * lu));
        let side = 1 - rev.last().unwrap().0;
        for (nf, l) in lists.elements[side as usize].iter().take_while(|(_, l)| lu + l <= budget) {
            let mut next = rev.clone();
            next.push((side, nf.clone()));
            stack.push((next, lu + l));
        }
    }
}

fn free_product_class(p: &Pair, a: &[u8], r: usize) -> Result<Vec<(NormalForm, usize)>> {
    if !p.left.has_exact_length() || !p.right.has_exact_length() {
        return Err(Error::Unsupported("free product factors need exact length rules".into()));
    }
    let mut syl: Vec<Syllable> = syllables(a).into_iter().map(|(s, nf)| (s, NormalForm::from_slice(nf))).collect();
    while syl.len() >= 2 && syl[0].0 == syl[syl.len() - 1].0 {
        let side = syl[0].0;
        let f = p.factor(side);
        let merged = f.mul_raw(&syl[syl.len() - 1].1, &syl[0].1);
        syl.remove(0);
        if merged == *f.identity_nf() {
            syl.pop();
        } else {
            *syl.last_mut().unwrap() = (side, merged);
            break;
        }
    }
    let lists = FactorLists::new(p, r)?;
    let mut out = Vec::new();
    match syl.len() {
        0 => out.push((NormalForm::new(), 0)),
        1 => {
            let (side, c) = &syl[0];
            let factor = p.factor(*side);
            for (h, lh) in class_within(factor, c, r)? {
                emit_conjugates(p, &lists, &[(*side, h)], lh, r, &mut out);
            }
        }
        m => {
            let core_len: usize = syl.iter().map(|s| syllable_len(p, s)).sum();
            for rot in distinct_rotations(&syl) {
                if core_len <= r {
                    out.push((encode_syllables(rot.iter().map(|(s, nf)| (*s, nf.as_slice()))), core_len));
                }
                let (side, last) = (rot[m - 1].0, &rot[m - 1].1);
                let f = p.factor(side);
                let inner: usize = rot[..m - 1].iter().map(|s| syllable_len(p, s)).sum();
                for (t, lt) in &lists.elements[side as usize] {
                    if lt + inner > r {
                        break;
                    }
                    if t == last {
                        continue;
                    }
                    let tail = f.mul_raw(last, &f.inv_raw(t));
                    let lh = lt + inner + f.len_raw(&tail).unwrap();
                    if lh > r {
                        continue;
                    }
                    let mut h: Vec<Syllable> = Vec::with_capacity(m + 1);
                    h.push((side, t.clone()));
                    h.extend(rot[..m - 1].iter().cloned());
                    h.push((side, tail));
                    emit_conjugates(p, &lists, &h, lh, r, &mut out);
                }
            }
        }
    }
    Ok(out)
}
