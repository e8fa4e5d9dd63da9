//! Finite groups given by multiplication tables.

use std::collections::VecDeque;

use sha2::{Digest, Sha256};

use super::{get_varint, NormalForm};
use crate::error::{Error, Result};

pub(crate) struct FiniteGroup {
    n: usize,
    table: Vec<u32>,
    inverse: Vec<u32>,
    dist: Vec<usize>,
    words: Vec<Vec<usize>>,
}

impl FiniteGroup {
    /// Validates the group axioms exhaustively.
    pub(crate) fn new(rows: Vec<Vec<u32>>) -> Result<FiniteGroup> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        if n > 4096 {
            return Err(Error::InvalidTable(format!("order {n} too large")));
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidTable(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for &v in row {
                if v as usize >= n {
                    return Err(Error::InvalidTable(format!("entry {v} out of range in row {i}")));
                }
            }
            table.extend_from_slice(row);
        }
        let at = |a: usize, b: usize| table[a * n + b] as usize;
        for g in 0..n {
            if at(0, g) != g || at(g, 0) != g {
                return Err(Error::InvalidTable(format!("index 0 is not an identity for {g}")));
            }
        }
        for a in 0..n {
            let mut seen_row = vec![false; n];
            let mut seen_col = vec![false; n];
            for b in 0..n {
                if std::mem::replace(&mut seen_row[at(a, b)], true) {
                    return Err(Error::InvalidTable(format!("row {a} repeats an entry")));
                }
                if std::mem::replace(&mut seen_col[at(b, a)], true) {
                    return Err(Error::InvalidTable(format!("column {a} repeats an entry")));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = at(a, b);
                for c in 0..n {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(Error::InvalidTable(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        let inverse = (0..n)
            .map(|g| (0..n).find(|&h| at(g, h) == 0).unwrap() as u32)
            .collect();
        Ok(FiniteGroup { n, table, inverse, dist: Vec::new(), words: Vec::new() })
    }

    pub(crate) fn order(&self) -> usize {
        self.n
    }

    pub(crate) fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.n + b as usize]
    }

    pub(crate) fn inverse(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    pub(crate) fn length(&self, a: u32) -> usize {
        self.dist[a as usize]
    }

    pub(crate) fn word(&self, a: u32) -> &[usize] {
        &self.words[a as usize]
    }

    /// Smallest-index elements not yet generated, until everything is.
    pub(crate) fn greedy_generators(&self) -> Vec<u32> {
        let mut gens = Vec::new();
        let mut reached = vec![false; self.n];
        reached[0] = true;
        for g in 1..self.n as u32 {
            if reached[g as usize] {
                continue;
            }
            gens.push(g);
            let mut queue: VecDeque<u32> = (0..self.n as u32).filter(|&h| reached[h as usize]).collect();
            while let Some(h) = queue.pop_front() {
                for &s in &gens {
                    let hs = self.mul(h, s);
                    if !reached[hs as usize] {
                        reached[hs as usize] = true;
                        queue.push_back(hs);
                    }
                }
            }
        }
        gens
    }

    pub(crate) fn describe(&self, gens: &[u32]) -> String {
        let mut h = Sha256::new();
        for v in &self.table {
            h.update(v.to_le_bytes());
        }
        let digest = h.finalize();
        let hex: String = digest[..16].iter().map(|b| format!("{b:02x}")).collect();
        format!("finite({};gens={:?};table={})", self.n, gens, hex)
    }

    /// Breadth-first distances and geodesic words over the symmetric set.
    pub(crate) fn finish(&mut self, gen_nf: &[NormalForm]) -> Result<()> {
        let gens: Vec<u32> = gen_nf.iter().map(|nf| get_varint(nf).unwrap().0 as u32).collect();
        let mut dist = vec![usize::MAX; self.n];
        let mut words = vec![Vec::new(); self.n];
        dist[0] = 0;
        let mut queue = VecDeque::from([0u32]);
        while let Some(g) = queue.pop_front() {
            for (pos, &s) in gens.iter().enumerate() {
                let gs = self.mul(g, s) as usize;
                if dist[gs] == usize::MAX {
                    dist[gs] = dist[g as usize] + 1;
                    let mut w = words[g as usize].clone();
                    w.push(pos);
                    words[gs] = w;
                    queue.push_back(gs as u32);
                }
            }
        }
        if dist.contains(&usize::MAX) {
            return Err(Error::InvalidParameters("generators do not generate the finite group".into()));
        }
        self.dist = dist;
        self.words = words;
        Ok(())
    }
}

/// Parses the plain-text table format: the order on the first line, then one
/// row of space-separated indices per element (row g, column h gives gh).
pub fn parse_table(text: &str) -> Result<Vec<Vec<u32>>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let n: usize = lines
        .next()
        .ok_or_else(|| Error::InvalidTable("missing order line".into()))?
        .parse()
        .map_err(|_| Error::InvalidTable("order is not an integer".into()))?;
    let mut rows = Vec::with_capacity(n);
    for (i, line) in lines.enumerate() {
        let row: std::result::Result<Vec<u32>, _> = line.split_whitespace().map(str::parse).collect();
        rows.push(row.map_err(|_| Error::InvalidTable(format!("row {i} is not a list of integers")))?);
    }
    if rows.len() != n {
        return Err(Error::InvalidTable(format!("expected {n} rows, found {}", rows.len())));
    }
    Ok(rows)
}

/// Table of S3 with permutations listed lexicographically (identity first)
/// and composition `(pq)(i) = p(q(i))`; returns the table and the indices of
/// the transpositions (0 1), (1 2).
pub(crate) fn symmetric3_table() -> (Vec<Vec<u32>>, Vec<u32>) {
    let perms: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap() as u32;
    let table = perms
        .iter()
        .map(|p| perms.iter().map(|q| index([p[q[0]], p[q[1]], p[q[2]]])).collect())
        .collect();
    (table, vec![index([1, 0, 2]), index([0, 2, 1])])
}
