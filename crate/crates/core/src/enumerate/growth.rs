//! Growth series and the polynomial-versus-exponential verdict.
//!
//! Both models are fitted by ordinary least squares on the tail window
//! `[⌈L/2⌉, L]`, skipping zero counts:
//! `ln n_l = b·l + ln a` (exponential) and `ln n_l = d·ln l + c` (polynomial).

use serde::Serialize;

use crate::error::{Error, Result};

/// `counts[l]` is the number of elements of length exactly l.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthSeries {
    pub counts: Vec<u64>,
    pub label: String,
}

impl GrowthSeries {
    pub fn new(counts: Vec<u64>, label: impl Into<String>) -> Self {
        GrowthSeries { counts, label: label.into() }
    }

    /// Largest length index L.
    pub fn horizon(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `l,n_l` rows with header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,n_l\n");
        for (l, n) in self.counts.iter().enumerate() {
            out.push_str(&format!("{l},{n}\n"));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least squares y = slope·x + intercept. R² is taken as 1 when y is constant
/// (the model then fits exactly).
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Fit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r_squared = if syy <= f64::EPSILON * (1.0 + my.abs()) { 1.0 } else { 1.0 - sse / syy };
    Fit { slope, intercept, r_squared, points: xs.len() }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthKind {
    Polynomial { degree: f64 },
    AtLeastExponential { rate: f64, scale: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthVerdict {
    #[serde(flatten)]
    pub kind: GrowthKind,
    pub fit_window: (usize, usize),
    pub fit_quality: f64,
    /// The tail window is entirely zero: the counted set is finite.
    pub finite_set: bool,
    pub exponential_fit: Option<Fit>,
    pub polynomial_fit: Option<Fit>,
    pub options: ClassifyOptions,
}

impl GrowthVerdict {
    pub fn is_exponential(&self) -> bool {
        matches!(self.kind, GrowthKind::AtLeastExponential { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassifyOptions {
    pub min_rate: f64,
    pub min_quality: f64,
    /// Nonzero counts required at lengths l ≥ 2.
    pub min_nonzero: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { min_rate: 0.1, min_quality: 0.98, min_nonzero: 8 }
    }
}

pub fn growth_classify(series: &GrowthSeries) -> Result<GrowthVerdict> {
    growth_classify_with(series, &ClassifyOptions::default())
}

pub fn growth_classify_with(series: &GrowthSeries, opts: &ClassifyOptions) -> Result<GrowthVerdict> {
    let big_l = series.horizon();
    let lo = big_l.div_ceil(2);
    let window = (lo, big_l);
    let tail: Vec<(usize, u64)> =
        (lo..=big_l).map(|l| (l, series.counts[l])).filter(|&(l, n)| n > 0 && l > 0).collect();

    if big_l > 0 && tail.is_empty() {
        return Ok(GrowthVerdict {
            kind: GrowthKind::Polynomial { degree: 0.0 },
            fit_window: window,
            fit_quality: 1.0,
            finite_set: true,
            exponential_fit: None,
            polynomial_fit: None,
            options: *opts,
        });
    }
    let nonzero = series.counts.iter().skip(2).filter(|&&n| n > 0).count();
    if nonzero < opts.min_nonzero || tail.len() < 2 {
        return Err(Error::SeriesTooShort { nonzero, required: opts.min_nonzero });
    }

    let ls: Vec<f64> = tail.iter().map(|&(l, _)| l as f64).collect();
    let log_ls: Vec<f64> = ls.iter().map(|l| l.ln()).collect();
    let log_ns: Vec<f64> = tail.iter().map(|&(_, n)| (n as f64).ln()).collect();
    let exp = least_squares(&ls, &log_ns);
    let poly = least_squares(&log_ls, &log_ns);

    let exponential =
        exp.slope >= opts.min_rate && exp.r_squared >= opts.min_quality && exp.r_squared > poly.r_squared;
    let (kind, fit_quality) = if exponential {
        (GrowthKind::AtLeastExponential { rate: exp.slope, scale: exp.intercept.exp() }, exp.r_squared)
    } else {
        (GrowthKind::Polynomial { degree: poly.slope }, poly.r_squared)
    };
    Ok(GrowthVerdict {
        kind,
        fit_window: window,
        fit_quality,
        finite_set: false,
        exponential_fit: Some(exp),
        polynomial_fit: Some(poly),
        options: *opts,
    })
}
