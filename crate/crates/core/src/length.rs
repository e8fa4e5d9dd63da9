//! Word length over the symmetric generating set, either by a backend's exact
//! rule or by lookup in a precomputed ball.

use std::sync::Arc;

use crate::enumerate::{enumerate_ball_within, BallEnumeration, DEFAULT_BUDGET_BYTES};
use crate::error::{Error, Result};
use crate::group::{GroupBackend, GroupElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LengthMode {
    ExactRule,
    BfsTable { radius: usize },
}

#[derive(Clone)]
pub struct LengthFunction {
    backend: Arc<GroupBackend>,
    table: Option<Arc<BallEnumeration>>,
}

impl LengthFunction {
    /// Exact rule when the backend has one, otherwise a BFS table of the
    /// given radius.
    pub fn for_backend(backend: &Arc<GroupBackend>, table_radius: usize) -> Result<Self> {
        if backend.has_exact_length() {
            Ok(LengthFunction { backend: backend.clone(), table: None })
        } else {
            let ball = enumerate_ball_within(backend, table_radius, DEFAULT_BUDGET_BYTES)?;
            Ok(Self::from_table(Arc::new(ball)))
        }
    }

    pub fn exact(backend: &Arc<GroupBackend>) -> Result<Self> {
        if !backend.has_exact_length() {
            return Err(Error::Unsupported(format!("no exact length rule for {}", backend.description())));
        }
        Ok(LengthFunction { backend: backend.clone(), table: None })
    }

    pub fn from_table(ball: Arc<BallEnumeration>) -> Self {
        LengthFunction { backend: ball.backend().clone(), table: Some(ball) }
    }

    pub fn backend(&self) -> &Arc<GroupBackend> {
        &self.backend
    }

    pub fn mode(&self) -> LengthMode {
        match &self.table {
            None => LengthMode::ExactRule,
            Some(t) => LengthMode::BfsTable { radius: t.radius() },
        }
    }

    /// Largest length this function can answer for, `None` if unbounded.
    pub fn horizon(&self) -> Option<usize> {
        self.table.as_ref().map(|t| t.radius())
    }

    pub fn length(&self, g: &GroupElement) -> Result<usize> {
        if g.backend_id() != self.backend.id() {
            return Err(Error::BackendMismatch);
        }
        self.length_raw(g.normal_form())
    }

    pub(crate) fn length_raw(&self, nf: &[u8]) -> Result<usize> {
        match &self.table {
            None => Ok(self.backend.len_raw(nf).expect("exact rule checked at construction")),
            Some(t) => t.length_raw(nf).ok_or(Error::OutOfTable { radius: t.radius() }),
        }
    }
}

/// Word length under the exact rule; `Unsupported` for backends without one.
pub fn word_length(backend: &GroupBackend, g: &GroupElement) -> Result<usize> {
    backend
        .exact_length(g)?
        .ok_or_else(|| Error::Unsupported(format!("no exact length rule for {}", backend.description())))
}
