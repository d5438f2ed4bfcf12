//! Exact derangement frequencies and rates.
//!
//! The frequency of a derangement `w` of `{1..n}` is
//! `f(w) = 2^(C(n,2) - S) * prod_{t in U(w)} (2^|rho_w(t)| - 1)` with
//! `S = sum_{t in U(w)} |rho_w(t)|`, and its rate is
//! `r(w) = prod_{t in U(w)} (1 - 2^-|rho_w(t)|)`. Every rate is therefore a
//! dyadic rational, and all arithmetic here is exact: big integers for counts
//! and an odd-numerator-over-power-of-two representation for rates.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::pair_count;
use crate::perm::{canopy, Derangement, Permutation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FreqError {
    #[error("theta profiles have different cycle counts ({a} vs {b}); the cartesian order is defined within a fixed cycle count")]
    CycleCountMismatch { a: usize, b: usize },
    #[error("theta profiles have different lengths ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("extremal derangements need n >= 2, got {n}")]
    TooFewVertices { n: usize },
    #[error("cycle length {len} is below 2")]
    CycleTooShort { len: usize },
}

/// An exact non-negative count.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactCount(BigUint);

impl ExactCount {
    pub fn from_u64(v: u64) -> Self {
        ExactCount(BigUint::from(v))
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    /// Decimal digits, e.g. `"172032"`.
    pub fn to_decimal_string(&self) -> String {
        self.0.to_str_radix(10)
    }
}

impl From<BigUint> for ExactCount {
    fn from(v: BigUint) -> Self {
        ExactCount(v)
    }
}

impl fmt::Display for ExactCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for ExactCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactCount({})", self.0)
    }
}

/// An exact dyadic rational in `[0, 1]`, stored as `numerator / 2^log2`
/// with the numerator odd (or zero with a zero exponent).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactRate {
    numerator: BigUint,
    denominator_log2: u32,
}

impl ExactRate {
    pub fn zero() -> Self {
        ExactRate {
            numerator: BigUint::zero(),
            denominator_log2: 0,
        }
    }

    pub fn one() -> Self {
        ExactRate {
            numerator: BigUint::one(),
            denominator_log2: 0,
        }
    }

    /// Builds `numerator / 2^denominator_log2`, normalizing out common
    /// factors of two. The value must not exceed one.
    pub fn new(mut numerator: BigUint, mut denominator_log2: u32) -> Self {
        if numerator.is_zero() {
            return Self::zero();
        }
        while denominator_log2 > 0 && !numerator.bit(0) {
            numerator >>= 1;
            denominator_log2 -= 1;
        }
        let rate = ExactRate {
            numerator,
            denominator_log2,
        };
        debug_assert!(
            rate.numerator.bits() as u32 <= rate.denominator_log2 + 1,
            "rate exceeds one"
        );
        rate
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn denominator_log2(&self) -> u32 {
        self.denominator_log2
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.denominator_log2 == 0 && self.numerator.is_one()
    }

    /// `"p/2^q"` form, e.g. `"21/2^8"`; whole values render bare.
    pub fn to_fraction_string(&self) -> String {
        if self.denominator_log2 == 0 {
            return self.numerator.to_string();
        }
        format!("{}/2^{}", self.numerator, self.denominator_log2)
    }

    /// Exact finite decimal expansion, e.g. `"0.08203125"`.
    ///
    /// `p / 2^q = p * 5^q / 10^q`, and with `p` odd the last digit is never
    /// zero, so the expansion below is already in lowest terms.
    pub fn to_decimal_string(&self) -> String {
        if self.denominator_log2 == 0 {
            return self.numerator.to_string();
        }
        let q = self.denominator_log2;
        let scaled = &self.numerator * BigUint::from(5u32).pow(q);
        let digits = scaled.to_str_radix(10);
        let q = q as usize;
        if digits.len() >= q + 1 {
            // Value is at least one; only possible at exactly one, but keep
            // the general split.
            let (int, frac) = digits.split_at(digits.len() - q);
            format!("{int}.{frac}")
        } else {
            format!("0.{}{}", "0".repeat(q - digits.len()), digits)
        }
    }

    /// Closest double, for display alongside the exact forms.
    pub fn to_f64_lossy(&self) -> f64 {
        let num_bits = self.numerator.bits();
        if num_bits == 0 {
            return 0.0;
        }
        // Take the top 53 significant bits and rescale.
        let shift = num_bits.saturating_sub(53);
        let top: u64 = (&self.numerator >> shift)
            .try_into()
            .expect("53 bits fit in u64");
        top as f64 * 2f64.powi(shift as i32 - self.denominator_log2 as i32)
    }
}

impl PartialOrd for ExactRate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactRate {
    fn cmp(&self, other: &Self) -> Ordering {
        // a/2^p vs b/2^q compares as a*2^q vs b*2^p.
        let lhs = &self.numerator << other.denominator_log2;
        let rhs = &other.numerator << self.denominator_log2;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for ExactRate {
    fmt_display_as_fraction!();
}

macro_rules! fmt_display_as_fraction {
    () => {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str(&self.to_fraction_string())
        }
    };
}
use fmt_display_as_fraction;

impl fmt::Debug for ExactRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ExactRate({} = {})",
            self.to_fraction_string(),
            self.to_decimal_string()
        )
    }
}

/// Sizes `|rho_w(t)|` over the non-minimal vertices `t`.
fn canopy_sizes_over_non_min(w: &Derangement) -> Vec<usize> {
    let canopy = canopy(w);
    w.cycles()
        .iter()
        .flat_map(|cycle| cycle[1..].iter().copied())
        .map(|t| canopy.rho_len(t))
        .collect()
}

/// The number of graphs on `{1..n}` whose derangement set contains `w`,
/// computed exactly from the closed formula.
pub fn frequency(w: &Derangement) -> ExactCount {
    let total_pairs = pair_count(w.n()) as u64;
    let sizes = canopy_sizes_over_non_min(w);
    let constrained: u64 = sizes.iter().map(|&s| s as u64).sum();
    debug_assert!(constrained <= total_pairs);
    let mut value = BigUint::one() << (total_pairs - constrained);
    for s in sizes {
        value *= (BigUint::one() << s) - BigUint::one();
    }
    ExactCount(value)
}

/// The proportion of all graphs on `{1..n}` admitting `w`, as an exact dyadic
/// rational. Identically `frequency(w) / 2^C(n,2)`.
pub fn rate(w: &Derangement) -> ExactRate {
    let sizes = canopy_sizes_over_non_min(w);
    let mut numerator = BigUint::one();
    let mut denominator_log2 = 0u32;
    for s in sizes {
        numerator *= (BigUint::one() << s) - BigUint::one();
        denominator_log2 += s as u32;
    }
    ExactRate::new(numerator, denominator_log2)
}

/// The canopy-size profile of a derangement: `|rho_w(t)|` over `t in U(w)`,
/// in non-decreasing order, tagged with the cycle count.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ThetaProfile {
    cycle_count: usize,
    sizes: Vec<usize>,
}

impl ThetaProfile {
    pub fn cycle_count(&self) -> usize {
        self.cycle_count
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }
}

impl fmt::Display for ThetaProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.sizes.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for ThetaProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ThetaProfile(k={}, {})", self.cycle_count, self)
    }
}

pub fn theta(w: &Derangement) -> ThetaProfile {
    let mut sizes = canopy_sizes_over_non_min(w);
    sizes.sort_unstable();
    ThetaProfile {
        cycle_count: w.cycle_count(),
        sizes,
    }
}

/// Componentwise comparison outcome of two theta profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaOrdering {
    Equal,
    LessOrEqual,
    GreaterOrEqual,
    Incomparable,
}

impl fmt::Display for ThetaOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ThetaOrdering::Equal => "Equal",
            ThetaOrdering::LessOrEqual => "LessOrEqual",
            ThetaOrdering::GreaterOrEqual => "GreaterOrEqual",
            ThetaOrdering::Incomparable => "Incomparable",
        };
        f.write_str(s)
    }
}

/// Cartesian-order comparison of two profiles from the same `D^k(V)`.
/// Profiles with different cycle counts are rejected rather than called
/// incomparable.
pub fn compare_theta(a: &ThetaProfile, b: &ThetaProfile) -> Result<ThetaOrdering, FreqError> {
    if a.cycle_count != b.cycle_count {
        return Err(FreqError::CycleCountMismatch {
            a: a.cycle_count,
            b: b.cycle_count,
        });
    }
    if a.sizes.len() != b.sizes.len() {
        return Err(FreqError::LengthMismatch {
            a: a.sizes.len(),
            b: b.sizes.len(),
        });
    }
    let le = a.sizes.iter().zip(&b.sizes).all(|(x, y)| x <= y);
    let ge = a.sizes.iter().zip(&b.sizes).all(|(x, y)| x >= y);
    Ok(match (le, ge) {
        (true, true) => ThetaOrdering::Equal,
        (true, false) => ThetaOrdering::LessOrEqual,
        (false, true) => ThetaOrdering::GreaterOrEqual,
        (false, false) => ThetaOrdering::Incomparable,
    })
}

/// The least frequent derangement of `{1..n}`: the single reversed cycle
/// `(1 n ... 4 3 2)`, whose rate is `1/2^(n-1)`.
pub fn min_rate_derangement(n: usize) -> Result<Derangement, FreqError> {
    if n < 2 {
        return Err(FreqError::TooFewVertices { n });
    }
    let mut cycle = vec![1];
    cycle.extend((2..=n).rev());
    let perm = Permutation::from_cycles(n, &[cycle]).expect("valid cycle");
    Ok(Derangement::try_from(perm).expect("single n-cycle has no fixed points"))
}

/// The most frequent derangement of `{1..n}`: the increasing cycle
/// `(1 2 3 ... n)`, whose frequency is `prod_{k=1}^{n-1} (2^k - 1)`.
pub fn max_rate_derangement(n: usize) -> Result<Derangement, FreqError> {
    if n < 2 {
        return Err(FreqError::TooFewVertices { n });
    }
    let cycle: Vec<usize> = (1..=n).collect();
    let perm = Permutation::from_cycles(n, &[cycle]).expect("valid cycle");
    Ok(Derangement::try_from(perm).expect("single n-cycle has no fixed points"))
}

/// Rate of any derangement whose cycles are all written as decreasing
/// sequences, i.e. `rho_w(t) = {t}` for every non-minimal `t`: `1/2^|U(w)|`.
pub fn decreasing_arrangement_rate(num_non_min: usize) -> ExactRate {
    ExactRate::new(BigUint::one(), num_non_min as u32)
}

/// Rate of any derangement whose cycles are all written as increasing
/// sequences, from the cycle lengths alone:
/// `prod_i prod_{k=1}^{c_i - 1} (1 - 2^-k)`.
pub fn increasing_arrangement_rate(cycle_lengths: &[usize]) -> Result<ExactRate, FreqError> {
    let mut numerator = BigUint::one();
    let mut denominator_log2 = 0u32;
    for &len in cycle_lengths {
        if len < 2 {
            return Err(FreqError::CycleTooShort { len });
        }
        for k in 1..len {
            numerator *= (BigUint::one() << k) - BigUint::one();
            denominator_log2 += k as u32;
        }
    }
    Ok(ExactRate::new(numerator, denominator_log2))
}
