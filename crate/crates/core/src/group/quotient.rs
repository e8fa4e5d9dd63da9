//! Quotients by an explicit finite normal subgroup. A coset is represented by
//! its lexicographically least member normal form.

use std::sync::Arc;

use super::{GroupBackend, GroupElement, NormalForm};
use crate::error::{Error, Result};

pub(crate) struct Quotient {
    pub(crate) base: Arc<GroupBackend>,
    members: Vec<NormalForm>,
    /// Base generator position -> quotient generator position (None if trivial).
    base_to_quotient: Vec<Option<usize>>,
}

impl Quotient {
    pub(crate) fn new(base: Arc<GroupBackend>, members: Vec<GroupElement>) -> Result<Quotient> {
        let mut nfs = Vec::with_capacity(members.len());
        for m in members {
            if m.backend_id() != base.id() {
                return Err(Error::BackendMismatch);
            }
            nfs.push(m.nf);
        }
        nfs.sort();
        nfs.dedup();
        if !nfs.contains(base.identity_nf()) {
            return Err(Error::InvalidParameters("subgroup must contain the identity".into()));
        }
        Ok(Quotient { base, members: nfs, base_to_quotient: Vec::new() })
    }

    pub(crate) fn describe(&self) -> String {
        let hex: Vec<String> = self
            .members
            .iter()
            .map(|m| m.iter().map(|b| format!("{b:02x}")).collect())
            .collect();
        format!("quotient({};N=[{}])", self.base.description, hex.join(","))
    }

    pub(crate) fn rep(&self, g: &[u8]) -> NormalForm {
        self.members
            .iter()
            .map(|n| self.base.mul_raw(g, n))
            .min()
            .expect("subgroup is nonempty")
    }

    pub(crate) fn identity(&self) -> NormalForm {
        self.members[0].clone()
    }

    pub(crate) fn finish(&mut self, gen_nf: &[NormalForm]) {
        self.base_to_quotient = self
            .base
            .gen_nf
            .iter()
            .map(|s| {
                let image = self.rep(s);
                gen_nf.iter().position(|g| *g == image)
            })
            .collect();
    }

    pub(crate) fn word(&self, a: &[u8]) -> Vec<usize> {
        self.base
            .word_raw(a)
            .into_iter()
            .filter_map(|p| self.base_to_quotient[p])
            .collect()
    }
}
