//! Permutations of `{1..n}` in cycle form, derangements, and the canopy maps.
//!
//! The canopy of a permutation `w` assigns to each vertex `t` the set
//! `rho_w(t) = {t, w(t), ..., w^{k-1}(t)}` where `k` is the least positive
//! exponent with `w^k(t) <= t`, and the vertex `lambda_w(t) = w^{-l}(t)` where
//! `l` is the least positive exponent with `w^{-l}(t) <= t`. Both exponents
//! exist because every orbit is finite and contains its own minimum.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Deref;

use itertools::Itertools;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("column {column}: unexpected character {ch:?}")]
    UnexpectedChar { column: usize, ch: char },
    #[error("column {column}: cycle is never closed")]
    UnclosedCycle { column: usize },
    #[error("column {column}: empty cycle")]
    EmptyCycle { column: usize },
    #[error("column {column}: element {element} out of range 1..={n}")]
    ElementOutOfRange {
        column: usize,
        element: usize,
        n: usize,
    },
    #[error("column {column}: token {token:?} out of range for n={n}; compact digit-run cycles require n <= 9")]
    CompactFormTooLarge {
        column: usize,
        token: String,
        n: usize,
    },
    #[error("column {column}: element {element} appears more than once")]
    RepeatedElement { column: usize, element: usize },
    #[error("images are not a bijection on 1..={n}")]
    NotABijection { n: usize },
}

/// The permutation fixes `vertex`, so it is not a derangement.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("vertex {vertex} is a fixed point")]
pub struct FixedPointError {
    pub vertex: usize,
}

/// A permutation of `{1..n}` stored with its cycle decomposition.
///
/// The cycle list is kept in standard form: each cycle rotated so its minimum
/// comes first, cycles sorted by ascending minima, fixed points included as
/// singletons. Values are immutable after construction.
#[derive(Clone)]
pub struct Permutation {
    n: usize,
    images: Vec<usize>,
    inverse: Vec<usize>,
    cycles: Vec<Vec<usize>>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self::from_images((1..=n).collect()).expect("identity is a bijection")
    }

    /// Builds a permutation from its one-line notation: `images[i]` is the
    /// image of vertex `i + 1`.
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut inverse = vec![0usize; n];
        for (i, &img) in images.iter().enumerate() {
            if img == 0 || img > n || inverse[img - 1] != 0 {
                return Err(PermError::NotABijection { n });
            }
            inverse[img - 1] = i + 1;
        }
        let cycles = standard_cycles(&images);
        Ok(Self {
            n,
            images,
            inverse,
            cycles,
        })
    }

    /// Builds a permutation from explicit cycles; elements of `{1..n}` absent
    /// from every cycle are fixed points.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (1..=n).collect();
        let mut seen = vec![false; n];
        for cycle in cycles {
            for (i, &v) in cycle.iter().enumerate() {
                if v == 0 || v > n {
                    return Err(PermError::ElementOutOfRange {
                        column: 0,
                        element: v,
                        n,
                    });
                }
                if seen[v - 1] {
                    return Err(PermError::RepeatedElement {
                        column: 0,
                        element: v,
                    });
                }
                seen[v - 1] = true;
                images[v - 1] = cycle[(i + 1) % cycle.len()];
            }
        }
        Self::from_images(images)
    }

    /// Parses cycle notation such as `"(13472)(56)"` or `"(1 3 4 7 2)(5 6)"`.
    ///
    /// Elements are separated by whitespace or commas; a separator-free digit
    /// run is read one digit per element, which is only unambiguous (and only
    /// accepted) when `n <= 9`. Elements absent from the text are fixed
    /// points, so the empty string parses to the identity.
    pub fn parse(text: &str, n: usize) -> Result<Self, PermError> {
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut seen = vec![false; n];
        let bytes = text.as_bytes();
        let mut i = 0;

        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c != '(' {
                return Err(PermError::UnexpectedChar { column: i + 1, ch: c });
            }
            let open = i;
            i += 1;
            // Tokens of this cycle with their start columns.
            let mut tokens: Vec<(usize, &str)> = Vec::new();
            let mut closed = false;
            while i < bytes.len() {
                let c = bytes[i] as char;
                if c == ')' {
                    closed = true;
                    i += 1;
                    break;
                } else if c.is_whitespace() || c == ',' {
                    i += 1;
                } else if c.is_ascii_digit() {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    tokens.push((start, &text[start..i]));
                } else {
                    return Err(PermError::UnexpectedChar { column: i + 1, ch: c });
                }
            }
            if !closed {
                return Err(PermError::UnclosedCycle { column: open + 1 });
            }
            if tokens.is_empty() {
                return Err(PermError::EmptyCycle { column: open + 1 });
            }

            let mut cycle = Vec::new();
            let mut push = |column: usize, element: usize| -> Result<(), PermError> {
                if element == 0 || element > n {
                    return Err(PermError::ElementOutOfRange { column, element, n });
                }
                if seen[element - 1] {
                    return Err(PermError::RepeatedElement { column, element });
                }
                seen[element - 1] = true;
                cycle.push(element);
                Ok(())
            };
            if tokens.len() == 1 && tokens[0].1.len() > 1 && n <= 9 {
                // Compact digit-run form: one element per digit.
                let (start, token) = tokens[0];
                for (j, d) in token.bytes().enumerate() {
                    push(start + j + 1, (d - b'0') as usize)?;
                }
            } else {
                for (start, token) in tokens {
                    let element: usize =
                        token.parse().map_err(|_| PermError::CompactFormTooLarge {
                            column: start + 1,
                            token: token.to_string(),
                            n,
                        })?;
                    if element > n && token.len() > 1 && n > 9 {
                        return Err(PermError::CompactFormTooLarge {
                            column: start + 1,
                            token: token.to_string(),
                            n,
                        });
                    }
                    push(start + 1, element)?;
                }
            }
            cycles.push(cycle);
        }

        Self::from_cycles(n, &cycles)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Image of vertex `v` under the permutation.
    #[inline]
    pub fn apply(&self, v: usize) -> usize {
        self.images[v - 1]
    }

    /// Preimage of vertex `v`.
    #[inline]
    pub fn apply_inv(&self, v: usize) -> usize {
        self.inverse[v - 1]
    }

    /// One-line notation: the image of `1, 2, ..., n` in order.
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Cycle decomposition in standard form, fixed points included as
    /// singletons.
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles.len()
    }

    pub fn fixed_points(&self) -> impl Iterator<Item = usize> + '_ {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, &img)| img == i + 1)
            .map(|(i, _)| i + 1)
    }

    pub fn is_derangement(&self) -> bool {
        self.fixed_points().next().is_none()
    }

    /// Standard cycle form: cycles min-first and sorted by ascending minima,
    /// fixed points omitted, digits run together when `n <= 9` and separated
    /// by spaces otherwise. The identity renders as the empty string.
    pub fn standard_cycle_form(&self) -> String {
        let mut out = String::new();
        for cycle in &self.cycles {
            if cycle.len() < 2 {
                continue;
            }
            out.push('(');
            if self.n <= 9 {
                for v in cycle {
                    out.push_str(&v.to_string());
                }
            } else {
                out.push_str(&cycle.iter().join(" "));
            }
            out.push(')');
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.standard_cycle_form())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation(n={}, {})", self.n, self)
    }
}

impl PartialEq for Permutation {
    fn eq(&self, other: &Self) -> bool {
        self.images == other.images
    }
}

impl Eq for Permutation {}

impl Hash for Permutation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.images.hash(state);
    }
}

impl PartialOrd for Permutation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic by one-line notation, the enumeration order.
impl Ord for Permutation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.images.cmp(&other.images)
    }
}

fn standard_cycles(images: &[usize]) -> Vec<Vec<usize>> {
    let n = images.len();
    let mut visited = vec![false; n];
    let mut cycles = Vec::new();
    // Scanning vertices in ascending order starts each cycle at its minimum
    // and lists cycles by ascending minima.
    for start in 1..=n {
        if visited[start - 1] {
            continue;
        }
        let mut cycle = vec![start];
        visited[start - 1] = true;
        let mut v = images[start - 1];
        while v != start {
            visited[v - 1] = true;
            cycle.push(v);
            v = images[v - 1];
        }
        cycles.push(cycle);
    }
    cycles
}

/// A fixed-point-free permutation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Derangement(Permutation);

impl Derangement {
    pub fn as_permutation(&self) -> &Permutation {
        &self.0
    }

    pub fn into_permutation(self) -> Permutation {
        self.0
    }
}

impl TryFrom<Permutation> for Derangement {
    type Error = FixedPointError;

    /// Succeeds exactly when the permutation has no fixed points; otherwise
    /// reports the smallest fixed vertex.
    fn try_from(perm: Permutation) -> Result<Self, FixedPointError> {
        match perm.fixed_points().next() {
            Some(vertex) => Err(FixedPointError { vertex }),
            None => Ok(Derangement(perm)),
        }
    }
}

impl Deref for Derangement {
    type Target = Permutation;

    fn deref(&self) -> &Permutation {
        &self.0
    }
}

impl fmt::Display for Derangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for Derangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Derangement(n={}, {})", self.0.n, self.0)
    }
}

/// Per-vertex canopy values `lambda_w(t)` and `rho_w(t)` of a permutation.
///
/// For every `t`: `t` is in `rho(t)`, `lambda(t) <= t` with equality exactly
/// when `t` is minimal in its cycle, and in that case `rho(t)` is the whole
/// cycle of `t`.
#[derive(Clone, Debug)]
pub struct CanopyData {
    perm: Permutation,
    lambda: Vec<usize>,
    rho: Vec<Vec<usize>>,
}

impl CanopyData {
    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn n(&self) -> usize {
        self.perm.n()
    }

    /// `lambda_w(t)`.
    #[inline]
    pub fn lambda(&self, t: usize) -> usize {
        self.lambda[t - 1]
    }

    /// `rho_w(t)` in ascending order.
    #[inline]
    pub fn rho(&self, t: usize) -> &[usize] {
        &self.rho[t - 1]
    }

    pub fn rho_len(&self, t: usize) -> usize {
        self.rho[t - 1].len()
    }
}

/// Computes the canopy of any permutation, fixed points included (a fixed
/// point `t` gets `lambda(t) = t` and `rho(t) = {t}`).
pub fn canopy(w: &Permutation) -> CanopyData {
    let n = w.n();
    let mut lambda = Vec::with_capacity(n);
    let mut rho = Vec::with_capacity(n);
    for t in 1..=n {
        // Forward walk collects t, w(t), ... while strictly above t.
        let mut run = vec![t];
        let mut x = w.apply(t);
        while x > t {
            run.push(x);
            x = w.apply(x);
        }
        run.sort_unstable();
        rho.push(run);
        // Backward walk stops at the first iterate at or below t.
        let mut y = w.apply_inv(t);
        while y > t {
            y = w.apply_inv(y);
        }
        lambda.push(y);
    }
    CanopyData {
        perm: w.clone(),
        lambda,
        rho,
    }
}

/// All derangements of `{1..n}` in lexicographic one-line order. Empty for
/// `n < 2`.
pub fn derangements(n: usize) -> impl Iterator<Item = Derangement> {
    let empty = n < 2;
    (1..=n)
        .permutations(n)
        .filter(move |images| {
            !empty && images.iter().enumerate().all(|(i, &img)| img != i + 1)
        })
        .map(|images| {
            Derangement::try_from(Permutation::from_images(images).expect("valid images"))
                .expect("fixed points were filtered")
        })
}

/// The derangements of `{1..n}` with exactly `k` cycles, in enumeration order.
pub fn derangements_with_cycle_count(n: usize, k: usize) -> impl Iterator<Item = Derangement> {
    derangements(n).filter(move |d| d.cycle_count() == k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, n: usize) -> Permutation {
        Permutation::parse(text, n).unwrap()
    }

    /// Subfactorial by the recurrence D(n) = (n-1)(D(n-1) + D(n-2)),
    /// independent of any permutation enumeration.
    fn subfactorial(n: usize) -> u64 {
        match n {
            0 => 1,
            1 => 0,
            _ => (n as u64 - 1) * (subfactorial(n - 1) + subfactorial(n - 2)),
        }
    }

    #[test]
    fn parse_paper_example() {
        let w = parse("(13472)(56)", 7);
        let expected = [(1, 3), (3, 4), (4, 7), (7, 2), (2, 1), (5, 6), (6, 5)];
        for (v, img) in expected {
            assert_eq!(w.apply(v), img, "image of {v}");
        }
    }

    #[test]
    fn parse_separated_and_compact_agree() {
        assert_eq!(parse("(1 2)", 2), parse("(12)", 2));
        assert_eq!(parse("(1,3,4,7,2)(5,6)", 7), parse("(13472)(56)", 7));
    }

    #[test]
    fn parse_omitted_elements_are_fixed() {
        let w = parse("(1 3)", 4);
        assert_eq!(w.apply(1), 3);
        assert_eq!(w.apply(3), 1);
        assert_eq!(w.apply(2), 2);
        assert_eq!(w.apply(4), 4);
        assert_eq!(w.fixed_points().collect::<Vec<_>>(), vec![2, 4]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Permutation::parse("(12", 2),
            Err(PermError::UnclosedCycle { column: 1 })
        ));
        assert!(matches!(
            Permutation::parse("12)", 2),
            Err(PermError::UnexpectedChar { column: 1, ch: '1' })
        ));
        assert!(matches!(
            Permutation::parse("()", 3),
            Err(PermError::EmptyCycle { column: 1 })
        ));
        assert!(matches!(
            Permutation::parse("(19)", 7),
            Err(PermError::ElementOutOfRange {
                element: 9,
                n: 7,
                ..
            })
        ));
        assert!(matches!(
            Permutation::parse("(11)", 7),
            Err(PermError::RepeatedElement { element: 1, .. })
        ));
        assert!(matches!(
            Permutation::parse("(12)(23)", 7),
            Err(PermError::RepeatedElement { element: 2, .. })
        ));
        assert!(matches!(
            Permutation::parse("(1a)", 7),
            Err(PermError::UnexpectedChar { column: 3, ch: 'a' })
        ));
        // Compact digit runs are rejected past n = 9.
        assert!(matches!(
            Permutation::parse("(132)", 12),
            Err(PermError::CompactFormTooLarge { .. })
        ));
        // But genuine multi-digit elements still parse with separators.
        let w = parse("(1 12)(2 11)", 12);
        assert_eq!(w.apply(1), 12);
        assert_eq!(w.apply(2), 11);
    }

    #[test]
    fn standard_form_matches_paper_notation() {
        let images = vec![3, 1, 4, 7, 6, 5, 2];
        let w = Permutation::from_images(images).unwrap();
        assert_eq!(w.standard_cycle_form(), "(13472)(56)");
    }

    #[test]
    fn standard_form_single_digit_conventions() {
        assert_eq!(Permutation::identity(3).standard_cycle_form(), "");
        let w = Permutation::from_images(vec![2, 1, 4, 3]).unwrap();
        assert_eq!(w.standard_cycle_form(), "(12)(34)");
        // Min-first rotation within each cycle.
        assert_eq!(parse("(21)(43)", 4).standard_cycle_form(), "(12)(34)");
    }

    #[test]
    fn standard_form_wide_uses_spaces() {
        let w = parse("(1 10)(2 11)", 11);
        assert_eq!(w.standard_cycle_form(), "(1 10)(2 11)");
    }

    #[test]
    fn parse_format_round_trip_exhaustive_small() {
        for n in [1usize, 2, 3, 4, 5] {
            for images in (1..=n).permutations(n) {
                let w = Permutation::from_images(images).unwrap();
                let back = parse(&w.standard_cycle_form(), n);
                assert_eq!(back, w);
            }
        }
    }

    #[test]
    fn derangement_conversion() {
        let ok = Permutation::from_images(vec![2, 1, 4, 3]).unwrap();
        assert!(Derangement::try_from(ok).is_ok());
        assert_eq!(
            Derangement::try_from(Permutation::identity(2)),
            Err(FixedPointError { vertex: 1 })
        );
        // (13) on n=4 fixes 2 and 4; the smallest is reported.
        assert_eq!(
            Derangement::try_from(parse("(13)", 4)),
            Err(FixedPointError { vertex: 2 })
        );
    }

    #[test]
    fn canopy_paper_values() {
        let c = canopy(&parse("(1234567)", 7));
        assert_eq!(c.lambda(5), 4);
        assert_eq!(c.rho(5), &[5, 6, 7]);

        let c = canopy(&parse("(13472)(56)", 7));
        assert_eq!(c.lambda(3), 1);
        assert_eq!(c.rho(3), &[3, 4, 7]);
        assert_eq!(c.lambda(6), 5);
        assert_eq!(c.rho(6), &[6]);

        let c = canopy(&parse("(12)", 2));
        assert_eq!(c.lambda(1), 1);
        assert_eq!(c.rho(1), &[1, 2]);
    }

    #[test]
    fn canopy_of_fixed_point_is_degenerate() {
        let c = canopy(&Permutation::identity(3));
        for t in 1..=3 {
            assert_eq!(c.lambda(t), t);
            assert_eq!(c.rho(t), &[t]);
        }
    }

    /// Independent reading of Def. 2.1 off the standard cycle form: lambda is
    /// the first smaller element to the left, rho the rightward run of larger
    /// elements (wrapping), and cycle minima take the whole cycle.
    fn canopy_by_string_walk(w: &Permutation, t: usize) -> (usize, Vec<usize>) {
        let cycle = w
            .cycles()
            .iter()
            .find(|c| c.contains(&t))
            .expect("every vertex lies in a cycle");
        let pos = cycle.iter().position(|&x| x == t).unwrap();
        if pos == 0 {
            let mut rho = cycle.clone();
            rho.sort_unstable();
            return (t, rho);
        }
        let lambda = cycle[..pos]
            .iter()
            .rev()
            .copied()
            .find(|&x| x < t)
            .expect("the leftmost element is the cycle minimum");
        let mut rho = vec![t];
        let mut i = (pos + 1) % cycle.len();
        while cycle[i] > t {
            rho.push(cycle[i]);
            i = (i + 1) % cycle.len();
        }
        rho.sort_unstable();
        (lambda, rho)
    }

    #[test]
    fn canopy_agrees_with_string_walk_exhaustively() {
        for n in 1..=6 {
            for images in (1..=n).permutations(n) {
                let w = Permutation::from_images(images).unwrap();
                let c = canopy(&w);
                for t in 1..=n {
                    let (lambda, rho) = canopy_by_string_walk(&w, t);
                    assert_eq!(c.lambda(t), lambda, "lambda mismatch at t={t} for {w}");
                    assert_eq!(c.rho(t), &rho[..], "rho mismatch at t={t} for {w}");
                }
            }
        }
    }

    #[test]
    fn canopy_invariants_exhaustive() {
        for n in 1..=6 {
            for images in (1..=n).permutations(n) {
                let w = Permutation::from_images(images).unwrap();
                let c = canopy(&w);
                for t in 1..=n {
                    assert!(c.lambda(t) <= t);
                    assert!(c.rho(t).contains(&t));
                    let min_of_cycle = w
                        .cycles()
                        .iter()
                        .find(|cy| cy.contains(&t))
                        .map(|cy| cy[0])
                        .unwrap();
                    if t == min_of_cycle {
                        assert_eq!(c.lambda(t), t);
                        let mut cy = w
                            .cycles()
                            .iter()
                            .find(|cy| cy.contains(&t))
                            .unwrap()
                            .clone();
                        cy.sort_unstable();
                        assert_eq!(c.rho(t), &cy[..]);
                    } else {
                        assert!(c.lambda(t) < t);
                    }
                    // Everything in rho(t) beyond t itself sits above t.
                    assert!(c.rho(t).iter().all(|&s| s == t || s > t));
                }
            }
        }
    }

    #[test]
    fn derangement_counts_match_subfactorial() {
        for n in 0..=7 {
            assert_eq!(
                derangements(n).count() as u64,
                subfactorial(n),
                "derangement count at n={n}"
            );
        }
    }

    #[test]
    fn enumeration_is_lexicographic_and_deterministic() {
        let listed: Vec<String> = derangements(3).map(|d| d.to_string()).collect();
        assert_eq!(listed, vec!["(123)", "(132)"]);

        let first: Vec<_> = derangements(4).collect();
        let second: Vec<_> = derangements(4).collect();
        assert_eq!(first, second);
        assert!(first.windows(2).all(|p| p[0] < p[1]), "strictly increasing");
    }

    #[test]
    fn smallest_cases_are_empty_or_singleton() {
        assert_eq!(derangements(0).count(), 0);
        assert_eq!(derangements(1).count(), 0);
        let only: Vec<_> = derangements(2).collect();
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].to_string(), "(12)");
    }

    #[test]
    fn cycle_count_filter() {
        let two_cycles: Vec<String> = derangements_with_cycle_count(4, 2)
            .map(|d| d.to_string())
            .collect();
        assert_eq!(two_cycles, vec!["(12)(34)", "(13)(24)", "(14)(23)"]);
        assert_eq!(derangements_with_cycle_count(4, 1).count(), 6);
        assert_eq!(derangements_with_cycle_count(2, 1).count(), 1);
        assert_eq!(derangements_with_cycle_count(2, 1).next().unwrap().to_string(), "(12)");
        // No derangement can exceed floor(n/2) cycles.
        assert_eq!(derangements_with_cycle_count(4, 3).count(), 0);
    }
}
