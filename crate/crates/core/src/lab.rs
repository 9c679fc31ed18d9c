//! Closed-form count predictions, size thresholds, seeded subset sampling and
//! the observed-vs-predicted experiment loop.
//!
//! Predictions keep exact integer numerators and denominators and round once,
//! when the final ratio is converted to `f64`.
//!
//! Trial seeds are derived with SplitMix64:
//!
//! ```text
//! trial_seed = splitmix64(master_seed ^ splitmix64((density_index << 32) | trial_index))
//! ```
//!
//! and each trial samples its subset with a partial Fisher-Yates shuffle of
//! `0..n` driven by `ChaCha8Rng::seed_from_u64(trial_seed)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitRow;
use crate::count::{count_ordered_tuples, PatternGraph, VertexSubset};
use crate::error::{Error, Result};
use crate::graph::{build_affine_graph, closed_form_degree, closed_form_n, Family, OrthoGraph};

fn big(x: u128) -> BigInt {
    BigInt::from(x)
}

fn ratio_to_f64(num: BigInt, den: BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    BigRational::new(num, den).to_f64().unwrap_or(f64::INFINITY)
}

/// `m^k / k! * q^(-k(k-1)/2)`.
pub fn predict_lambda_k(m: u64, q: u64, k: u32) -> f64 {
    let num = num_traits::pow(big(m as u128), k as usize);
    let k_fact: BigInt = (1..=k as u128).map(big).product();
    let pairs = (k as usize) * (k as usize).saturating_sub(1) / 2;
    let den = k_fact * num_traits::pow(big(q as u128), pairs);
    ratio_to_f64(num, den)
}

/// `m^s / |Aut(H)| * (degree/n)^r`.
pub fn predict_alon(m: u64, n: u64, degree: u64, h: &PatternGraph) -> f64 {
    let r = h.edge_count();
    let num = num_traits::pow(big(m as u128), h.vertex_count()) * num_traits::pow(big(degree as u128), r);
    let den = big(h.aut_count() as u128) * num_traits::pow(big(n as u128), r);
    ratio_to_f64(num, den)
}

/// An exponent held as a reduced fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exponent {
    pub num: i64,
    pub den: i64,
}

impl Exponent {
    fn new(num: i64, den: i64) -> Self {
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        let sign = if den < 0 { -1 } else { 1 };
        Exponent { num: sign * num / g, den: sign * den / g }
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `q` raised to this exponent. Integral exponents are evaluated exactly
    /// before the conversion to `f64`.
    pub fn pow(self, q: u64) -> f64 {
        if self.num % self.den == 0 && self.num >= 0 {
            let e = (self.num / self.den) as u32;
            if let Some(v) = (q as u128).checked_pow(e) {
                return v as f64;
            }
        }
        (q as f64).powf(self.value())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// `d/2 + k - 1`.
pub fn threshold_new_exponent(d: u32, k: u32) -> Exponent {
    Exponent::new(d as i64 + 2 * (k as i64 - 1), 2)
}

/// `d(k-1)/k + (k-1)/2 + 1/k`, over the common denominator `2k`.
pub fn threshold_old_exponent(d: u32, k: u32) -> Exponent {
    let (d, k) = (d as i64, k as i64);
    Exponent::new(2 * d * (k - 1) + k * (k - 1) + 2, 2 * k)
}

/// `q^(d/2 + k - 1)`.
pub fn threshold_new(q: u64, d: u32, k: u32) -> f64 {
    threshold_new_exponent(d, k).pow(q)
}

/// `q^(d(k-1)/k + (k-1)/2 + 1/k)`, without the unspecified leading constant.
pub fn threshold_old(q: u64, d: u32, k: u32) -> f64 {
    threshold_old_exponent(d, k).pow(q)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdComparison {
    pub q: u64,
    pub d: u32,
    pub k: u32,
    pub exponent_new: String,
    pub exponent_old: String,
    /// `exponent_old - exponent_new`.
    pub exponent_difference: f64,
    pub threshold_new: f64,
    pub threshold_old: f64,
    pub equal: bool,
}

pub fn compare_thresholds(q: u64, d: u32, k: u32) -> ThresholdComparison {
    let (new, old) = (threshold_new_exponent(d, k), threshold_old_exponent(d, k));
    let diff = Exponent::new(old.num * new.den - new.num * old.den, old.den * new.den);
    ThresholdComparison {
        q,
        d,
        k,
        exponent_new: new.to_string(),
        exponent_old: old.to_string(),
        exponent_difference: diff.value(),
        threshold_new: new.pow(q),
        threshold_old: old.pow(q),
        equal: new == old,
    }
}

/// `m / (lambda (n/degree)^Delta)` for the affine graph G(q, d), with
/// `lambda = (q-1) q^((d-2)/2)`. Values above 1 mean the subset is large
/// enough for the counting lemma's hypothesis. Requires `d >= 2`.
pub fn validity_margin(m: u64, q: u64, d: u32, h: &PatternGraph) -> f64 {
    let n = closed_form_n(Family::Affine, q, d);
    let degree = closed_form_degree(Family::Affine, q, d);
    let delta = h.max_degree();
    let num = big(m as u128) * num_traits::pow(big(degree), delta);
    let mut den = big(q as u128 - 1) * num_traits::pow(big(n), delta);
    // lambda carries q^((d-2)/2); the integer part goes into the denominator
    den *= num_traits::pow(big(q as u128), (d.saturating_sub(2) / 2) as usize);
    let exact = ratio_to_f64(num, den);
    if d % 2 == 1 && d >= 3 {
        exact / (q as f64).sqrt()
    } else {
        exact
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial_index` at density `density_index`.
pub fn trial_seed(master_seed: u64, density_index: u32, trial_index: u32) -> u64 {
    splitmix64(master_seed ^ splitmix64(((density_index as u64) << 32) | trial_index as u64))
}

/// A uniformly random `m`-subset of the vertices.
pub fn sample_subset(graph: &OrthoGraph, m: usize, seed: u64) -> Result<VertexSubset<'_>> {
    let n = graph.n();
    if m > n {
        return Err(Error::InvalidParameters(format!("subset size {m} exceeds n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..m {
        let j = rng.random_range(i as u64..n as u64) as usize;
        pool.swap(i, j);
    }
    let mut members = BitRow::zeros(n);
    for &v in &pool[..m] {
        members.set(v);
    }
    VertexSubset::from_members(graph, members)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SubsetSize {
    /// `m = floor(fraction * n)`.
    Fraction(f64),
    Count(usize),
}

impl SubsetSize {
    pub fn resolve(self, n: usize) -> Result<usize> {
        let m = match self {
            SubsetSize::Fraction(f) if f.is_finite() && f > 0.0 => (f * n as f64).floor() as usize,
            SubsetSize::Fraction(f) => {
                return Err(Error::InvalidParameters(format!("density {f} must be positive")))
            }
            SubsetSize::Count(m) => m,
        };
        if m == 0 || m > n {
            return Err(Error::InvalidParameters(format!("subset size {m} not in 1..={n}")));
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub q: u64,
    pub d: u32,
    pub k: u32,
    pub sizes: Vec<SubsetSize>,
    pub trials: u32,
    pub master_seed: u64,
}

impl ExperimentConfig {
    /// Set when `d < 2k - 1`, outside the regime of the counting theorem.
    pub fn regime_warning(&self) -> Option<String> {
        (self.d + 1 < 2 * self.k).then(|| {
            format!(
                "d = {} is below 2k - 1 = {}; counts are outside the asymptotic regime",
                self.d,
                2 * self.k - 1
            )
        })
    }

    fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidParameters("trials must be at least 1".into()));
        }
        if self.k < 1 {
            return Err(Error::InvalidParameters("k must be at least 1".into()));
        }
        if self.sizes.is_empty() {
            return Err(Error::InvalidParameters("no subset sizes given".into()));
        }
        Ok(())
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    /// Parses `key = value` lines. Keys: `q`, `d`, `k`, `trials`, `seed`,
    /// and exactly one of `densities` (fractions of n) or `sizes` (explicit m),
    /// each a comma list. `family = affine` is accepted; `#` starts a comment.
    fn from_str(text: &str) -> Result<Self> {
        let bad = |m: String| Error::Parse(format!("experiment config: {m}"));
        let (mut q, mut d, mut k, mut trials, mut seed) = (None, None, None, None, None);
        let mut densities: Option<Vec<SubsetSize>> = None;
        let mut sizes: Option<Vec<SubsetSize>> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let int = |v: &str| v.parse::<u64>().map_err(|_| bad(format!("{key}: bad integer {v:?}")));
            let list = |v: &'_ str| -> Result<Vec<String>> {
                let items: Vec<String> = v.split(',').map(|s| s.trim().to_string()).collect();
                if items.iter().any(String::is_empty) {
                    return Err(bad(format!("{key}: empty list entry")));
                }
                Ok(items)
            };
            match key {
                "q" => q = Some(int(value)?),
                "d" => d = Some(int(value)? as u32),
                "k" => k = Some(int(value)? as u32),
                "trials" => trials = Some(int(value)? as u32),
                "seed" => seed = Some(int(value)?),
                "densities" => {
                    densities = Some(
                        list(value)?
                            .into_iter()
                            .map(|s| {
                                s.parse::<f64>()
                                    .map(SubsetSize::Fraction)
                                    .map_err(|_| bad(format!("densities: bad number {s:?}")))
                            })
                            .collect::<Result<_>>()?,
                    )
                }
                "sizes" => {
                    sizes = Some(
                        list(value)?
                            .into_iter()
                            .map(|s| int(&s).map(|m| SubsetSize::Count(m as usize)))
                            .collect::<Result<_>>()?,
                    )
                }
                "family" if value == "affine" => {}
                "family" => return Err(bad(format!("only the affine family is supported, got {value:?}"))),
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        let sizes = match (densities, sizes) {
            (Some(s), None) | (None, Some(s)) => s,
            (Some(_), Some(_)) => return Err(bad("give either densities or sizes, not both".into())),
            (None, None) => return Err(bad("missing densities".into())),
        };
        let missing = |name: &str| bad(format!("missing {name}"));
        let config = ExperimentConfig {
            q: q.ok_or_else(|| missing("q"))?,
            d: d.ok_or_else(|| missing("d"))?,
            k: k.ok_or_else(|| missing("k"))?,
            sizes,
            trials: trials.ok_or_else(|| missing("trials"))?,
            master_seed: seed.ok_or_else(|| missing("seed"))?,
        };
        config.validate()?;
        Ok(config)
    }
}

/// One experiment row. Field order is the CSV column order.
///
/// `observed` is the ordered count `lambda_k`; `relative_error` compares
/// `observed / k!` with `predicted_main`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub q: u64,
    pub d: u32,
    pub k: u32,
    pub m: u64,
    pub trial: u32,
    pub observed: u128,
    pub predicted_main: f64,
    pub predicted_alon: f64,
    pub relative_error: f64,
    pub validity_margin: f64,
    pub threshold_new: f64,
    pub threshold_old: f64,
    pub seed_used: u64,
}

pub const CSV_COLUMNS: [&str; 13] = [
    "q",
    "d",
    "k",
    "m",
    "trial",
    "observed",
    "predicted_main",
    "predicted_alon",
    "relative_error",
    "validity_margin",
    "threshold_new",
    "threshold_old",
    "seed_used",
];

impl CountReport {
    /// Rows whose subset is too small for the counting lemma's hypothesis.
    pub fn is_flagged(&self) -> bool {
        self.validity_margin < 1.0
    }
}

/// Fills one report row for an observed count.
pub fn make_report(graph: &OrthoGraph, k: u32, m: usize, trial: u32, observed: u128, seed: u64) -> Result<CountReport> {
    let (q, d) = (graph.q(), graph.d() as u32);
    let h = PatternGraph::complete(k as usize)?;
    let predicted_main = predict_lambda_k(m as u64, q, k);
    // The prediction counts unordered k-sets; `observed` is ordered.
    let k_fact: f64 = (1..=k).map(f64::from).product();
    let relative_error = if predicted_main > 0.0 {
        (observed as f64 / k_fact - predicted_main).abs() / predicted_main
    } else {
        0.0
    };
    Ok(CountReport {
        q,
        d,
        k,
        m: m as u64,
        trial,
        observed,
        predicted_main,
        predicted_alon: predict_alon(m as u64, graph.n() as u64, graph.degree(), &h),
        relative_error,
        validity_margin: validity_margin(m as u64, q, d, &h),
        threshold_new: threshold_new(q, d, k),
        threshold_old: threshold_old(q, d, k),
        seed_used: seed,
    })
}

/// Builds G(q, d) once and counts ordered orthogonal k-tuples in seeded random
/// subsets. Rows come out sorted by (density index, trial index).
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<CountReport>> {
    config.validate()?;
    let graph = build_affine_graph(config.q, config.d as usize)?;
    run_experiment_on(&graph, config)
}

/// As [`run_experiment`] with a prebuilt affine graph.
pub fn run_experiment_on(graph: &OrthoGraph, config: &ExperimentConfig) -> Result<Vec<CountReport>> {
    if graph.family() != Family::Affine {
        return Err(Error::WrongFamily { expected: "affine" });
    }
    let n = graph.n();
    let jobs: Vec<(u32, u32, usize)> = config
        .sizes
        .iter()
        .enumerate()
        .map(|(di, size)| size.resolve(n).map(|m| (di as u32, m)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flat_map(|(di, m)| (0..config.trials).map(move |t| (di, t, m)))
        .collect();
    jobs.into_par_iter()
        .map(|(di, trial, m)| {
            let seed = trial_seed(config.master_seed, di, trial);
            let subset = sample_subset(graph, m, seed)?;
            let observed = count_ordered_tuples(&subset, config.k as usize)?;
            make_report(graph, config.k, m, trial, observed, seed)
        })
        .collect()
}
