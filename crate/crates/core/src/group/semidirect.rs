//! Split extensions `N ⋊ F` of a finite group by a free group.
//!
//! An element is stored as the pair (w, n) standing for the product w·n, with
//! w a reduced word in F and n an index into N. Moving n past a base word uses
//! `w⁻¹ n w`, evaluated letter by letter through the action map.

use std::sync::Arc;

use super::{free, get_varint, put_varint, GroupBackend, Kind, NormalForm};
use crate::error::{Error, Result};

pub(crate) struct Semidirect {
    pub(crate) normal: Arc<GroupBackend>,
    pub(crate) base: Arc<GroupBackend>,
    /// `action[i][n]` = s_i n s_i⁻¹.
    action: Vec<Vec<u32>>,
    /// `action_inv[i][n]` = s_i⁻¹ n s_i.
    action_inv: Vec<Vec<u32>>,
    preserves_generators: bool,
    embed_base: Vec<usize>,
    embed_normal: Vec<usize>,
}

pub(crate) fn encode(n: u32, w: &[u8]) -> NormalForm {
    let mut out = NormalForm::new();
    put_varint(&mut out, u64::from(n));
    out.extend_from_slice(w);
    out
}

fn decode(a: &[u8]) -> (u32, &[u8]) {
    let (n, used) = get_varint(a).expect("corrupt semidirect normal form");
    (n as u32, &a[used..])
}

impl Semidirect {
    pub(crate) fn new(
        normal: Arc<GroupBackend>,
        base: Arc<GroupBackend>,
        action: Vec<Vec<u32>>,
    ) -> Result<Semidirect> {
        let Kind::Finite(fin) = normal.kind() else {
            return Err(Error::InvalidParameters("semidirect normal part must be finite".into()));
        };
        let Kind::Free(free) = base.kind() else {
            return Err(Error::InvalidParameters("semidirect base must be a free group".into()));
        };
        if action.len() != free.rank {
            return Err(Error::InvalidAction(format!(
                "expected {} automorphisms, got {}",
                free.rank,
                action.len()
            )));
        }
        let n = fin.order();
        let mut action_inv = Vec::with_capacity(action.len());
        for (i, phi) in action.iter().enumerate() {
            if phi.len() != n {
                return Err(Error::InvalidAction(format!("map {i} has {} entries, expected {n}", phi.len())));
            }
            let mut inv = vec![u32::MAX; n];
            for (src, &dst) in phi.iter().enumerate() {
                if dst as usize >= n || inv[dst as usize] != u32::MAX {
                    return Err(Error::InvalidAction(format!("map {i} is not a bijection")));
                }
                inv[dst as usize] = src as u32;
            }
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    if phi[fin.mul(a, b) as usize] != fin.mul(phi[a as usize], phi[b as usize]) {
                        return Err(Error::InvalidAction(format!(
                            "map {i} is not a homomorphism at ({a},{b})"
                        )));
                    }
                }
            }
            action_inv.push(inv);
        }
        let gens: Vec<u32> = normal.gen_nf.iter().map(|nf| get_varint(nf).unwrap().0 as u32).collect();
        let preserves_generators = action
            .iter()
            .all(|phi| gens.iter().all(|g| gens.contains(&phi[*g as usize])));
        Ok(Semidirect {
            normal,
            base,
            action,
            action_inv,
            preserves_generators,
            embed_base: Vec::new(),
            embed_normal: Vec::new(),
        })
    }

    pub(crate) fn describe(&self) -> String {
        format!(
            "semidirect({},{},action={:?})",
            self.normal.description, self.base.description, self.action
        )
    }

    pub(crate) fn finish(&mut self, gen_nf: &[NormalForm]) {
        let find = |nf: NormalForm| gen_nf.iter().position(|g| *g == nf).unwrap();
        self.embed_base = self.base.gen_nf.iter().map(|w| find(encode(0, w))).collect();
        self.embed_normal = self
            .normal
            .gen_nf
            .iter()
            .map(|nf| find(encode(get_varint(nf).unwrap().0 as u32, &self.base.identity)))
            .collect();
    }

    /// The length rule |w| + l_N(n) is geodesic when every automorphism
    /// permutes the generating set of N.
    pub(crate) fn length_rule_exact(&self) -> bool {
        self.preserves_generators && self.normal.has_exact_length()
    }

    fn finite_mul(&self, a: u32, b: u32) -> u32 {
        match self.normal.kind() {
            Kind::Finite(g) => g.mul(a, b),
            _ => unreachable!(),
        }
    }

    /// w⁻¹ n w, applying one letter at a time.
    fn twist(&self, mut n: u32, w: &[u8]) -> u32 {
        for &l in w {
            let i = (l >> 1) as usize;
            n = if l & 1 == 0 { self.action_inv[i][n as usize] } else { self.action[i][n as usize] };
        }
        n
    }

    pub(crate) fn mul(&self, a: &[u8], b: &[u8]) -> NormalForm {
        let (n1, w1) = decode(a);
        let (n2, w2) = decode(b);
        let n = self.finite_mul(self.twist(n1, w2), n2);
        encode(n, &free::mul(w1, w2))
    }

    pub(crate) fn inv(&self, a: &[u8]) -> NormalForm {
        let (n, w) = decode(a);
        let w_inv = free::inv(w);
        let n_inv = match self.normal.kind() {
            Kind::Finite(g) => g.inverse(n),
            _ => unreachable!(),
        };
        // (w n)⁻¹ = w⁻¹ (w n⁻¹ w⁻¹)
        encode(self.twist(n_inv, &w_inv), &w_inv)
    }

    /// The free-base word of an element.
    pub(crate) fn base_part<'a>(&self, a: &'a [u8]) -> &'a [u8] {
        decode(a).1
    }

    pub(crate) fn length(&self, a: &[u8]) -> usize {
        let (n, w) = decode(a);
        let Kind::Finite(g) = self.normal.kind() else { unreachable!() };
        w.len() + g.length(n)
    }

    pub(crate) fn valid(&self, a: &[u8]) -> bool {
        match get_varint(a) {
            Some((n, used)) => {
                let mut fin = NormalForm::new();
                put_varint(&mut fin, n);
                self.normal.valid_raw(&fin) && self.base.valid_raw(&a[used..])
            }
            None => false,
        }
    }

    pub(crate) fn word(&self, a: &[u8]) -> Vec<usize> {
        let (n, w) = decode(a);
        let mut fin = NormalForm::new();
        put_varint(&mut fin, u64::from(n));
        let mut out: Vec<usize> = self.base.word_raw(w).into_iter().map(|p| self.embed_base[p]).collect();
        out.extend(self.normal.word_raw(&fin).into_iter().map(|p| self.embed_normal[p]));
        out
    }
}

#[cfg(test)]
mod tests {
    use crate::group::GroupBackend;
    use crate::presets;

    #[test]
    fn defining_relations_of_the_example_group() {
        let g = presets::paper_example_3().unwrap();
        let el = |s: &str| g.parse_element(s).unwrap();
        let (a, x, y) = (el("a"), el("x"), el("y"));
        let a2 = g.multiply(&a, &a).unwrap();
        assert_eq!(a2, el("a a"));
        assert!(g.is_identity(&g.multiply(&a2, &a).unwrap()));
        assert_eq!(g.invert(&a).unwrap(), a2);
        assert_eq!(g.conjugate(&x, &a).unwrap(), a2);
        assert_eq!(g.conjugate(&y, &a).unwrap(), a);
        assert_eq!(g.exact_length(&a2).unwrap(), Some(1));
        assert!(g.has_exact_length());
    }

    #[test]
    fn rejects_non_automorphisms() {
        let z3 = GroupBackend::cyclic(3, "a").unwrap();
        let f2 = GroupBackend::free(2).unwrap();
        // not a bijection
        assert!(GroupBackend::semidirect(z3.clone(), f2.clone(), vec![vec![0, 1, 1], vec![0, 1, 2]]).is_err());
        // bijection but not a homomorphism
        let z4 = GroupBackend::cyclic(4, "a").unwrap();
        assert!(GroupBackend::semidirect(z4, f2.clone(), vec![vec![0, 2, 1, 3], vec![0, 1, 2, 3]]).is_err());
        // wrong number of maps
        assert!(GroupBackend::semidirect(z3, f2, vec![vec![0, 2, 1]]).is_err());
    }
}
