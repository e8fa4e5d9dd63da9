//! Empirical rapid-decay ratios ‖f‖_red / ‖f‖_{H^s} for random f on balls.
//!
//! The reduced norm is bounded below by ‖λ(h) P_p‖ for h ∈ {f, f*}, where P_p
//! projects onto ℓ²(B_p) for a fixed probe radius p. Its square is the top
//! eigenvalue of the |B_p|×|B_p| Gram matrix G[j,j'] = Σ_k conj(h(kj⁻¹)) h(kj'⁻¹),
//! which is accumulated row by row over k ∈ B_n·B_p and solved exactly.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::enumerate::least_squares;
use crate::enumerate::{enumerate_ball_within, BallEnumeration, DEFAULT_BUDGET_BYTES};
use crate::error::{Error, Result};
use crate::group::GroupBackend;

pub const DEFAULT_PROBE_RADIUS: usize = 4;
pub const DEFAULT_SAMPLES_PER_N: usize = 200;
pub const DEFAULT_RD_SEED: u64 = 0x00d1_5ea5e;

/// Bytes per (row, u, j) incidence kept while building the row structure.
const INCIDENCE_BYTES: u64 = 12;

#[derive(Clone, Debug)]
pub struct RdOptions {
    pub min_n: usize,
    pub max_n: usize,
    pub samples_per_n: usize,
    pub seed: u64,
    pub probe_radius: usize,
    pub budget_bytes: u64,
}

impl RdOptions {
    pub fn new(max_n: usize, samples_per_n: usize) -> Self {
        RdOptions {
            min_n: 0,
            max_n,
            samples_per_n,
            seed: DEFAULT_RD_SEED,
            probe_radius: DEFAULT_PROBE_RADIUS,
            budget_bytes: DEFAULT_BUDGET_BYTES,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RdSample {
    pub n: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RdEstimate {
    pub s: f64,
    pub samples_per_n: usize,
    pub seed: u64,
    pub probe_radius: usize,
    /// Coefficients are i.i.d. standard complex Gaussian over all of B_n.
    pub sampling: &'static str,
    pub samples: Vec<RdSample>,
    pub sup_ratio: f64,
    /// Least-squares slope of ratio against n over all samples.
    pub trend_slope: f64,
}

impl RdEstimate {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,ratio\n");
        for smp in &self.samples {
            out.push_str(&format!("{},{:.12e}\n", smp.n, smp.ratio));
        }
        out
    }

    /// Largest ratio among samples with support radius n.
    pub fn sup_at(&self, n: usize) -> Option<f64> {
        self.samples.iter().filter(|x| x.n == n).map(|x| x.ratio).reduce(f64::max)
    }
}

pub fn rd_ratio_estimate(backend: &Arc<GroupBackend>, s: f64, max_n: usize, samples_per_n: usize) -> Result<RdEstimate> {
    let opts = RdOptions::new(max_n, samples_per_n);
    Ok(rd_ratio_estimates(backend, &[s], &opts)?.pop().expect("one exponent requested"))
}

/// One estimate per exponent, all computed from the same random samples.
pub fn rd_ratio_estimates(backend: &Arc<GroupBackend>, exponents: &[f64], opts: &RdOptions) -> Result<Vec<RdEstimate>> {
    if let Some(&s) = exponents.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
        return Err(Error::InvalidArgument(format!("Sobolev exponent must be finite and ≥ 0, got {s}")));
    }
    if opts.samples_per_n == 0 || opts.min_n > opts.max_n {
        return Err(Error::InvalidArgument("need at least one sample and min_n ≤ max_n".into()));
    }
    let ball = enumerate_ball_within(backend, opts.max_n.max(opts.probe_radius), opts.budget_bytes)?;
    let lengths: Vec<u32> = (0..=ball.radius())
        .flat_map(|l| std::iter::repeat_n(l as u32, ball.sphere_raw(l).len()))
        .collect();
    let inverse: Vec<u32> = ball
        .raw_elements()
        .iter()
        .map(|nf| ball.position_raw(&backend.inv_raw(nf)).expect("balls are inverse-closed") as u32)
        .collect();

    let mut norms: Vec<(usize, f64, Vec<Complex64>)> = Vec::new();
    for n in opts.min_n..=opts.max_n {
        let probe = ProbeStructure::build(&ball, n, opts.probe_radius, opts.budget_bytes)?;
        let size = ball.ball_size(n);
        for i in 0..opts.samples_per_n {
            let coeffs = sample_coefficients(opts.seed, n, i, size);
            let star: Vec<Complex64> = (0..size).map(|u| coeffs[inverse[u] as usize].conj()).collect();
            let norm = probe.norm(&coeffs).max(probe.norm(&star));
            norms.push((n, norm, coeffs));
        }
    }

    let mut out = Vec::with_capacity(exponents.len());
    for &s in exponents {
        let samples: Vec<RdSample> = norms
            .iter()
            .map(|(n, norm, coeffs)| {
                let hs: f64 = coeffs
                    .iter()
                    .zip(&lengths)
                    .map(|(c, &l)| c.norm_sqr() * (1.0 + l as f64).powf(2.0 * s))
                    .sum::<f64>()
                    .sqrt();
                RdSample { n: *n, ratio: norm / hs }
            })
            .collect();
        let sup_ratio = samples.iter().map(|x| x.ratio).fold(0.0, f64::max);
        let xs: Vec<f64> = samples.iter().map(|x| x.n as f64).collect();
        let ys: Vec<f64> = samples.iter().map(|x| x.ratio).collect();
        let trend_slope = if opts.min_n == opts.max_n { 0.0 } else { least_squares(&xs, &ys).slope };
        out.push(RdEstimate {
            s,
            samples_per_n: opts.samples_per_n,
            seed: opts.seed,
            probe_radius: opts.probe_radius,
            sampling: "iid standard complex gaussian on B_n",
            samples,
            sup_ratio,
            trend_slope,
        });
    }
    Ok(out)
}

/// ‖λ(f) P_p‖ for a single element supported in the ball, a lower bound for
/// ‖f‖_red that is exact for δ_g.
pub fn probe_norm(f: &crate::algebra::GroupAlgebraElement, probe_radius: usize) -> Result<f64> {
    let backend = f.backend();
    // any word for g bounds l(g) from above, which is all B_n must cover
    let n = f
        .raw_terms()
        .map(|(nf, _)| backend.len_raw(nf).unwrap_or_else(|| backend.word_raw(nf).len()))
        .max()
        .unwrap_or(0);
    let ball = enumerate_ball_within(backend, n.max(probe_radius), DEFAULT_BUDGET_BYTES)?;
    let probe = ProbeStructure::build(&ball, n, probe_radius, DEFAULT_BUDGET_BYTES)?;
    let size = ball.ball_size(n);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); size];
    let mut star = coeffs.clone();
    for (nf, c) in f.raw_terms() {
        coeffs[ball.position_raw(nf).expect("support lies in B_n")] = *c;
        star[ball.position_raw(&backend.inv_raw(nf)).expect("ball is inverse-closed")] = c.conj();
    }
    Ok(probe.norm(&coeffs).max(probe.norm(&star)))
}

fn sample_coefficients(seed: u64, n: usize, i: usize, size: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) | i as u64);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    (0..size)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(scale * re, scale * im)
        })
        .collect()
}

/// For each k ∈ B_n·B_p, the pairs (u, j) ∈ B_n × B_p with u·j = k.
struct ProbeStructure {
    probe_size: usize,
    row_start: Vec<u32>,
    u: Vec<u32>,
    j: Vec<u16>,
}

impl ProbeStructure {
    fn build(ball: &BallEnumeration, n: usize, p: usize, budget_bytes: u64) -> Result<Self> {
        let backend = ball.backend();
        let (support, probe) = (ball.ball_size(n), ball.ball_size(p));
        if probe > u16::MAX as usize {
            return Err(Error::InvalidArgument(format!("probe ball B_{p} has {probe} elements, too many")));
        }
        let incidences = support as u64 * probe as u64;
        if incidences * INCIDENCE_BYTES > budget_bytes {
            return Err(Error::BudgetExceeded { budget: budget_bytes, reached: n.saturating_sub(1) });
        }
        let elements = ball.raw_elements();
        let mut row_of: HashMap<crate::group::NormalForm, u32> = HashMap::new();
        let mut triples: Vec<(u32, u32, u16)> = Vec::with_capacity(incidences as usize);
        for (ui, u) in elements[..support].iter().enumerate() {
            for (ji, j) in elements[..probe].iter().enumerate() {
                let next = row_of.len() as u32;
                let row = *row_of.entry(backend.mul_raw(u, j)).or_insert(next);
                triples.push((row, ui as u32, ji as u16));
            }
        }
        triples.sort_unstable();
        let rows = row_of.len();
        let mut row_start = Vec::with_capacity(rows + 1);
        row_start.push(0);
        for (i, t) in triples.iter().enumerate() {
            while row_start.len() <= t.0 as usize {
                row_start.push(i as u32);
            }
        }
        row_start.push(triples.len() as u32);
        Ok(ProbeStructure {
            probe_size: probe,
            row_start,
            u: triples.iter().map(|t| t.1).collect(),
            j: triples.iter().map(|t| t.2).collect(),
        })
    }

    /// ‖λ(h) P_p‖ where h is given by its coefficients on B_n in ball order.
    fn norm(&self, h: &[Complex64]) -> f64 {
        let m = self.probe_size;
        let mut gram = DMatrix::<Complex64>::zeros(m, m);
        let mut vals: Vec<(usize, Complex64)> = Vec::new();
        for w in self.row_start.windows(2) {
            vals.clear();
            vals.extend((w[0] as usize..w[1] as usize).map(|e| (self.j[e] as usize, h[self.u[e] as usize])));
            for &(ja, ca) in &vals {
                let ca = ca.conj();
                for &(jb, cb) in &vals {
                    gram[(ja, jb)] += ca * cb;
                }
            }
        }
        gram.symmetric_eigenvalues().max().max(0.0).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GroupAlgebraElement;
    use crate::operator::dense_regular_matrix;
    use crate::presets::preset;

    #[test]
    fn probe_norm_of_a_point_mass_is_its_modulus() {
        let f2 = preset("free2").unwrap();
        let g = f2.parse_element("x y^-1").unwrap();
        let f = GroupAlgebraElement::delta(&f2, &g).unwrap().scale(Complex64::new(0.6, 0.8));
        assert!((probe_norm(&f, 2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probe_covering_a_finite_group_gives_the_exact_norm() {
        let s3 = preset("s3").unwrap();
        let all = crate::enumerate::enumerate_ball(&s3, 6).unwrap();
        let coeffs = sample_coefficients(3, 3, 0, all.len());
        let f = GroupAlgebraElement::from_terms(&s3, all.elements().map(|(e, _)| e).zip(coeffs)).unwrap();
        let exact = dense_regular_matrix(&f).unwrap().singular_values().max();
        assert!((probe_norm(&f, 3).unwrap() - exact).abs() < 1e-9);
    }

    #[test]
    fn finite_ratios_respect_the_crude_bound() {
        let s3 = preset("s3").unwrap();
        let mut opts = RdOptions::new(3, 20);
        opts.probe_radius = 3;
        let est = rd_ratio_estimates(&s3, &[0.0], &opts).unwrap().pop().unwrap();
        assert!(est.samples.iter().all(|x| x.ratio > 0.0 && x.ratio <= 6f64.sqrt() + 1e-12));
        assert!(est.samples.iter().all(|x| x.ratio <= est.sup_ratio));
    }

    #[test]
    fn runs_are_reproducible_and_prefix_stable() {
        let f2 = preset("free2").unwrap();
        let a = rd_ratio_estimates(&f2, &[2.0], &RdOptions::new(3, 5)).unwrap();
        let b = rd_ratio_estimates(&f2, &[2.0], &RdOptions::new(4, 5)).unwrap();
        assert_eq!(a[0].samples[..], b[0].samples[..a[0].samples.len()]);
        assert_eq!(a[0].to_csv(), rd_ratio_estimates(&f2, &[2.0], &RdOptions::new(3, 5)).unwrap()[0].to_csv());
    }
}
