//! Independent uniqueness checks.
//!
//! For `β ∈ (1, 1+m]` a sequence over `{0, 1, m}` is the unique expansion of
//! its value iff no suffix value falls into one of the two closed switch
//! regions ("holes") of the branching β-transformation
//!
//! ```text
//! [1/β, m/(β(β-1))]   and   [m/β, 1/β + m/(β(β-1))].
//! ```
//!
//! [`is_unique`] applies this directly to eventually periodic words,
//! [`binary_membership_via_fg`] goes through the `f`/`g` criterion instead,
//! and [`pair_certificate`] certifies that every concatenation of two blocks
//! is unique, which gives an uncountable family and a positive dimension.

use serde::{Deserialize, Serialize};

use crate::critical::{CaseKind, CriticalCase};
use crate::error::{Error, Result};
use crate::numerics::{bisect_decreasing, check_m, pi_beta_unchecked, Extremes, Valuation};
use crate::words::{Digit, EpWord, FiniteWord, Subst};

/// Slack used when deciding that an enclosure misses a hole.
const MARGIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoleGeometry {
    pub h1_lo: f64,
    pub h1_hi: f64,
    pub h2_lo: f64,
    pub h2_hi: f64,
    pub domain_hi: f64,
}

impl HoleGeometry {
    fn holes(&self) -> [(f64, f64); 2] {
        [(self.h1_lo, self.h1_hi), (self.h2_lo, self.h2_hi)]
    }

    fn endpoints(&self) -> [f64; 4] {
        [self.h1_lo, self.h1_hi, self.h2_lo, self.h2_hi]
    }

    /// Whether `[lo, hi]` misses both holes by more than `margin`.
    pub fn avoids(&self, lo: f64, hi: f64, margin: f64) -> bool {
        self.holes()
            .iter()
            .all(|&(a, b)| a > b || hi < a - margin || lo > b + margin)
    }

    /// Whether `[lo, hi]` lies inside one of the holes.
    pub fn swallows(&self, lo: f64, hi: f64) -> bool {
        self.holes().iter().any(|&(a, b)| lo >= a && hi <= b)
    }
}

/// Hole geometry without the range check on `β`.
pub fn holes_unchecked(beta: f64, m: f64) -> HoleGeometry {
    let c = m / (beta * (beta - 1.0));
    HoleGeometry {
        h1_lo: 1.0 / beta,
        h1_hi: c,
        h2_lo: m / beta,
        h2_hi: 1.0 / beta + c,
        domain_hi: m / (beta - 1.0),
    }
}

fn check_beta_range(beta: f64, m: f64) -> Result<()> {
    check_m(m)?;
    if beta > 1.0 && beta <= 1.0 + m {
        Ok(())
    } else {
        Err(Error::Domain(format!("beta must lie in (1, 1+m] = (1, {}], got {beta}", 1.0 + m)))
    }
}

pub fn holes(beta: f64, m: f64) -> Result<HoleGeometry> {
    check_beta_range(beta, m)?;
    Ok(holes_unchecked(beta, m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Unique,
    NotUnique,
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    /// 0-based start of the offending suffix, when the hole test produced
    /// the verdict.
    pub witness_position: Option<usize>,
}

impl Verdict {
    fn unique() -> Self {
        Verdict { status: Status::Unique, witness_position: None }
    }
}

/// Hole test on every distinct suffix of `u` (digit `2` valued as `m`).
/// A suffix inside a hole by more than `tau` decides `NotUnique`; otherwise
/// a suffix within `tau` of a hole endpoint gives `Boundary`.
pub fn is_unique_with(u: &EpWord, beta: f64, m: f64, tau: f64) -> Result<Verdict> {
    check_beta_range(beta, m)?;
    let geo = holes_unchecked(beta, m);
    let val = Valuation::Alphabet(m);
    let mut boundary = None;
    for k in 0..u.orbit_len() {
        let x = pi_beta_unchecked(&u.suffix(k), beta, val);
        if geo.endpoints().iter().any(|&e| (x - e).abs() <= tau) {
            boundary.get_or_insert(k);
        } else if geo.holes().iter().any(|&(a, b)| x >= a && x <= b) {
            return Ok(Verdict { status: Status::NotUnique, witness_position: Some(k) });
        }
    }
    Ok(match boundary {
        Some(k) => Verdict { status: Status::Boundary, witness_position: Some(k) },
        None => Verdict::unique(),
    })
}

pub fn is_unique(u: &EpWord, beta: f64, m: f64) -> Result<Verdict> {
    is_unique_with(u, beta, m, crate::DEFAULT_TAU)
}

/// `max(f_u(m), g_u(m))` compared against `β`, for binary `u` starting with
/// `1`, different from `1 0̄`, with at least two ones.
pub fn binary_membership_via_fg(u: &EpWord, beta: f64, m: f64, tau: f64) -> Result<Verdict> {
    check_beta_range(beta, m)?;
    if !u.is_binary() {
        return Err(Error::NotBinary);
    }
    if u.at(0) != 1 {
        return Err(Error::Precondition(format!("{u} does not start with 1")));
    }
    if !u.at_least_two(1) {
        return Err(Error::Precondition(format!("{u} contains fewer than two ones")));
    }
    let threshold = fg_threshold(u, m)?;
    let status = if beta > threshold + tau {
        Status::Unique
    } else if beta < threshold - tau {
        Status::NotUnique
    } else {
        Status::Boundary
    };
    Ok(Verdict { status, witness_position: None })
}

/// `max(f_u(m), g_u(m))`.
pub fn fg_threshold(u: &EpWord, m: f64) -> Result<f64> {
    let ext = Extremes::of(u);
    Ok(ext.f(m, 0.0)?.max(ext.g(m, 0.0)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Certified,
    Unknown,
}

/// Upper bound on enclosure evaluations per certificate.
const NODE_BUDGET: usize = 2_000_000;

/// Checks that every word in `{v, w}^∞` avoids the holes.
///
/// Every suffix of such a word starts inside a block and continues with
/// further blocks. For each start, continuations are explored block by block
/// until the enclosure `[π(x), π(x) + β^{-|x|}/(β-1)]` of the known prefix
/// `x` clears both holes; reaching `horizon` letters while still ambiguous,
/// or an enclosure inside a hole, gives `Unknown`.
pub fn pair_certificate(
    v: &FiniteWord,
    w: &FiniteWord,
    beta: f64,
    m: f64,
    horizon: usize,
) -> Result<Certificate> {
    if v.is_empty() || w.is_empty() || v == w {
        return Err(Error::Precondition("blocks must be nonempty and distinct".into()));
    }
    if !v.is_binary() || !w.is_binary() {
        return Err(Error::NotBinary);
    }
    check_m(m)?;
    if !(beta > 1.0) {
        return Err(Error::Domain(format!("base must exceed 1, got {beta}")));
    }
    let geo = holes_unchecked(beta, m);
    let blocks = [v.letters(), w.letters()];
    let tail_scale = 1.0 / (beta - 1.0);

    // known prefixes of suffixes; every prefix ends at a block boundary
    let mut stack: Vec<Vec<Digit>> = Vec::new();
    for b in blocks {
        for j in 0..b.len() {
            stack.push(b[j..].to_vec());
        }
    }
    let mut visited = 0usize;
    while let Some(x) = stack.pop() {
        visited += 1;
        if visited > NODE_BUDGET {
            return Ok(Certificate::Unknown);
        }
        let lo = x.iter().rev().fold(0.0, |acc, &d| (d as f64 + acc) / beta);
        let hi = lo + beta.powi(-(x.len() as i32)) * tail_scale;
        if geo.avoids(lo, hi, MARGIN) {
            continue;
        }
        if geo.swallows(lo, hi) || x.len() >= horizon {
            return Ok(Certificate::Unknown);
        }
        for b in blocks {
            let mut next = x.clone();
            next.extend_from_slice(b);
            stack.push(next);
        }
    }
    Ok(Certificate::Certified)
}

/// The block pair used for the plateau described by `case` with exponent `h`:
/// `σ(0(01)^h), σ(0(01)^{h+1})` on `g`-plateaus at `σM`,
/// `σ(1(10)^h), σ(1(10)^{h+1})` on `f`-plateaus at `σM`, and
/// `01^h, 01^{h+1}` on the top branch.
pub fn certificate_blocks(case: &CriticalCase, h: usize) -> Result<(FiniteWord, FiniteWord)> {
    if h == 0 {
        return Err(Error::Precondition("block exponent must be at least 1".into()));
    }
    let rep = |head: &[Digit], unit: &[Digit], k: usize| {
        let mut out = head.to_vec();
        for _ in 0..k {
            out.extend_from_slice(unit);
        }
        out
    };
    let (a, b) = match case.kind {
        CaseKind::TopG => (rep(&[0], &[1], h), rep(&[0], &[1], h + 1)),
        CaseKind::PlateauG | CaseKind::PlateauF => {
            let letters = case.directive.letters();
            let sigma = match letters.split_last() {
                Some((Subst::M, head)) => crate::words::Directive::new(head.to_vec()),
                _ => {
                    return Err(Error::Precondition(format!(
                        "plateau directive {} does not end in M",
                        case.directive
                    )))
                }
            };
            let mor = sigma.morphism();
            let (head, unit) = if case.kind == CaseKind::PlateauG {
                ([0u8], [0u8, 1])
            } else {
                ([1u8], [1u8, 0])
            };
            (
                mor.apply_finite(&rep(&head, &unit, h))?,
                mor.apply_finite(&rep(&head, &unit, h + 1))?,
            )
        }
        CaseKind::LimitPoint => {
            return Err(Error::Precondition("no block family for limit points".into()))
        }
    };
    Ok((FiniteWord::new(a)?, FiniteWord::new(b)?))
}

/// A certified block pair.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedPair {
    pub h: usize,
    pub v: FiniteWord,
    pub w: FiniteWord,
    pub dimension: f64,
}

/// Tries `h = 1..=max_h` and returns the first certified pair.
pub fn search_certificate(
    case: &CriticalCase,
    beta: f64,
    m: f64,
    max_h: usize,
    horizon: usize,
) -> Result<Option<CertifiedPair>> {
    for h in 1..=max_h {
        let (v, w) = certificate_blocks(case, h)?;
        if pair_certificate(&v, &w, beta, m, horizon)? == Certificate::Certified {
            let dimension = hutchinson_dim(v.len(), w.len(), beta)?;
            return Ok(Some(CertifiedPair { h, v, w, dimension }));
        }
    }
    Ok(None)
}

/// The `r > 0` with `β^{-a r} + β^{-b r} = 1`.
pub fn hutchinson_dim(len_v: usize, len_w: usize, beta: f64) -> Result<f64> {
    if len_v == 0 || len_w == 0 {
        return Err(Error::Precondition("block lengths must be positive".into()));
    }
    if !(beta > 1.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("base must exceed 1, got {beta}")));
    }
    let (a, b) = (len_v as f64, len_w as f64);
    let moran = |r: f64| beta.powf(-a * r) + beta.powf(-b * r) - 1.0;
    let mut hi = 1.0;
    while moran(hi) > 0.0 {
        hi *= 2.0;
    }
    Ok(bisect_decreasing(moran, 0.0, hi, 0.0).mid())
}

/// Number of binary words of each length `1..=depth` none of whose suffix
/// enclosures lies inside a hole. An upper-bound census only: prefixes that
/// survive may still have no unique continuation.
pub fn census(beta: f64, m: f64, depth: usize) -> Result<Vec<u64>> {
    check_beta_range(beta, m)?;
    let geo = holes_unchecked(beta, m);
    let tail_scale = 1.0 / (beta - 1.0);
    let mut counts = vec![0u64; depth];
    let mut stack: Vec<Vec<Digit>> = vec![vec![0], vec![1]];
    while let Some(x) = stack.pop() {
        let n = x.len();
        let excluded = (0..n).any(|k| {
            let lo = x[k..].iter().rev().fold(0.0, |acc, &d| (d as f64 + acc) / beta);
            let hi = lo + beta.powi(-((n - k) as i32)) * tail_scale;
            geo.swallows(lo, hi)
        });
        if excluded {
            continue;
        }
        counts[n - 1] += 1;
        if n < depth {
            for d in [0, 1] {
                let mut next = x.clone();
                next.push(d);
                stack.push(next);
            }
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> EpWord {
        s.parse().unwrap()
    }

    fn fw(s: &str) -> FiniteWord {
        s.parse().unwrap()
    }

    #[test]
    fn hole_geometry_examples() {
        let g = holes(2.25, 1.5).unwrap();
        let expect = [4.0 / 9.0, 8.0 / 15.0, 2.0 / 3.0, 44.0 / 45.0];
        for (got, want) in g.endpoints().iter().zip(expect) {
            assert!((got - want).abs() < 1e-12);
        }
        let g = holes(2.0, 2.0).unwrap();
        assert_eq!((g.h1_lo, g.h1_hi, g.h2_lo, g.h2_hi), (0.5, 1.0, 1.0, 1.5));
        // at β = 1 + m the upper hole ends where the domain's top image starts
        let m = 1.7;
        let g = holes(1.0 + m, m).unwrap();
        assert!((g.h2_hi - (1.0 / (1.0 + m)) * (1.0 + m / m)).abs() < 1e-15);
        assert!(g.h2_hi <= g.domain_hi);
        assert!(holes(2.8, 1.5).is_err());
        assert!(holes(1.0, 1.5).is_err());
    }

    #[test]
    fn trivial_words() {
        for &(beta, m) in &[(2.2, 1.5), (2.9, 2.0), (1.5, 1.2)] {
            assert_eq!(is_unique(&w("(0)"), beta, m).unwrap().status, Status::Unique);
            assert_eq!(is_unique(&w("(2)"), beta, m).unwrap().status, Status::Unique);
            let v = is_unique(&w("1(0)"), beta, m).unwrap();
            assert_ne!(v.status, Status::Unique);
        }
    }

    #[test]
    fn fg_criterion_examples() {
        let u = w("1(10)");
        let t = fg_threshold(&u, 1.6).unwrap();
        let v = binary_membership_via_fg(&u, 2.6, 1.6, 1e-9).unwrap();
        let expect = if 2.6 > t { Status::Unique } else { Status::NotUnique };
        assert_eq!(v.status, expect);
        assert_eq!(is_unique(&u, 2.6, 1.6).unwrap().status, expect);
        assert!(binary_membership_via_fg(&w("0(1)"), 2.5, 1.6, 1e-9).is_err());
        assert!(binary_membership_via_fg(&w("1(0)"), 2.5, 1.6, 1e-9).is_err());
    }

    #[test]
    fn moran_examples() {
        assert!((hutchinson_dim(1, 1, 2.0).unwrap() - 1.0).abs() < 1e-12);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((hutchinson_dim(1, 2, phi).unwrap() - 1.0).abs() < 1e-12);
        assert!((hutchinson_dim(2, 2, 2.0).unwrap() - 0.5).abs() < 1e-12);
        assert!(hutchinson_dim(0, 2, 2.0).is_err());
    }

    #[test]
    fn full_shift_certified_above_one_plus_m() {
        let c = pair_certificate(&fw("0"), &fw("1"), 3.1, 2.0, 64).unwrap();
        assert_eq!(c, Certificate::Certified);
        let c = pair_certificate(&fw("0"), &fw("1"), 2.5, 2.0, 64).unwrap();
        assert_eq!(c, Certificate::Unknown);
        assert!(pair_certificate(&fw("01"), &fw("01"), 2.5, 2.0, 64).is_err());
    }

    #[test]
    fn plateau_blocks() {
        let case = CriticalCase {
            kind: CaseKind::PlateauG,
            directive: "M".parse().unwrap(),
            witness: w("10(01)"),
        };
        let (v, u) = certificate_blocks(&case, 1).unwrap();
        assert_eq!((v.to_string(), u.to_string()), ("001".into(), "00101".into()));
        let case = CriticalCase { kind: CaseKind::PlateauF, ..case };
        let (v, u) = certificate_blocks(&case, 2).unwrap();
        assert_eq!((v.to_string(), u.to_string()), ("11010".into(), "1101010".into()));
        let case = CriticalCase { kind: CaseKind::PlateauG, directive: "LM".parse().unwrap(), ..case };
        let (v, _) = certificate_blocks(&case, 1).unwrap();
        assert_eq!(v.to_string(), "0001");
    }

    #[test]
    fn census_counts() {
        let counts = census(2.1, 1.5, 14).unwrap();
        assert_eq!(counts[0], 2);
        assert!(counts.windows(2).all(|p| p[1] <= 2 * p[0]));
        // well below the critical base most prefixes die out
        assert!(counts[13] < 1 << 13);
    }
}
