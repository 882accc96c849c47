//! Finite and eventually periodic words over the digits `{0, 1, 2}`, the
//! substitutions `L`, `M`, `R`, shift-orbit extremes and desubstitution.
//!
//! An [`EpWord`] is always stored in canonical form: the period is primitive
//! and the preperiod cannot be shortened by rotating the period. Two values
//! denote the same infinite word iff they are structurally equal.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A digit symbol. `2` stands for the third letter of the alphabet, whose
/// numeric value is chosen by the caller (see [`crate::numerics::Valuation`]).
pub type Digit = u8;

fn check_digit(d: Digit) -> Result<Digit> {
    if d <= 2 {
        Ok(d)
    } else {
        Err(Error::Parse(format!("illegal digit {d}")))
    }
}

/// A finite word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteWord(Vec<Digit>);

impl FiniteWord {
    pub fn new(letters: Vec<Digit>) -> Result<Self> {
        for &d in &letters {
            check_digit(d)?;
        }
        Ok(FiniteWord(letters))
    }

    pub fn empty() -> Self {
        FiniteWord(Vec::new())
    }

    pub fn letters(&self) -> &[Digit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|&d| d <= 1)
    }

    pub fn concat(&self, other: &FiniteWord) -> FiniteWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        FiniteWord(v)
    }

    pub fn into_vec(self) -> Vec<Digit> {
        self.0
    }
}

impl fmt::Display for FiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for FiniteWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_digits(s).map(FiniteWord)
    }
}

fn parse_digits(s: &str) -> Result<Vec<Digit>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            '2' => Ok(2),
            other => Err(Error::Parse(format!("illegal character {other:?}"))),
        })
        .collect()
}

/// An eventually periodic infinite word `pre (per)^ω` in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EpWord {
    pre: Vec<Digit>,
    per: Vec<Digit>,
}

/// Length of the primitive root of `w` (smallest `p` dividing `|w|` with `w`
/// invariant under rotation by `p`).
fn primitive_root_len(w: &[Digit]) -> usize {
    let n = w.len();
    (1..=n)
        .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| w[i] == w[i - p]))
        .unwrap_or(n)
}

impl EpWord {
    /// Builds `pre (per)^ω`; the result is canonicalised.
    pub fn new(pre: Vec<Digit>, per: Vec<Digit>) -> Result<Self> {
        if per.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        for &d in pre.iter().chain(per.iter()) {
            check_digit(d)?;
        }
        Ok(Self::canonical(pre, per))
    }

    /// The constant word `a a a ...`.
    pub fn constant(a: Digit) -> Self {
        EpWord { pre: Vec::new(), per: vec![a] }
    }

    /// Canonical form: primitive period, then roll the preperiod into the
    /// period while their last letters agree.
    fn canonical(mut pre: Vec<Digit>, mut per: Vec<Digit>) -> Self {
        let p = primitive_root_len(&per);
        per.truncate(p);
        while let (Some(&a), Some(&b)) = (pre.last(), per.last()) {
            if a != b {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        EpWord { pre, per }
    }

    /// Returns the canonical representative (a no-op for values built through
    /// the public constructors).
    pub fn canonicalize(&self) -> EpWord {
        Self::canonical(self.pre.clone(), self.per.clone())
    }

    pub fn preperiod(&self) -> &[Digit] {
        &self.pre
    }

    pub fn period(&self) -> &[Digit] {
        &self.per
    }

    /// Letter at 0-based position `i`.
    pub fn at(&self, i: usize) -> Digit {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.per[(i - self.pre.len()) % self.per.len()]
        }
    }

    /// The first `n` letters.
    pub fn prefix(&self, n: usize) -> Vec<Digit> {
        (0..n).map(|i| self.at(i)).collect()
    }

    pub fn is_binary(&self) -> bool {
        self.pre.iter().chain(self.per.iter()).all(|&d| d <= 1)
    }

    /// Number of distinct starting positions that need to be looked at to
    /// enumerate the whole shift orbit.
    pub fn orbit_len(&self) -> usize {
        self.pre.len() + self.per.len()
    }

    /// The suffix starting at 0-based position `k`.
    pub fn suffix(&self, k: usize) -> EpWord {
        if k < self.pre.len() {
            EpWord { pre: self.pre[k..].to_vec(), per: self.per.clone() }
        } else {
            let mut per = self.per.clone();
            per.rotate_left((k - self.pre.len()) % self.per.len());
            EpWord { pre: Vec::new(), per }
        }
    }

    /// Prepends a finite word.
    pub fn prepend(&self, w: &[Digit]) -> EpWord {
        let mut pre = w.to_vec();
        pre.extend_from_slice(&self.pre);
        Self::canonical(pre, self.per.clone())
    }

    /// Whether `d` occurs at least twice.
    pub fn at_least_two(&self, d: Digit) -> bool {
        self.per.contains(&d) || self.pre.iter().filter(|&&x| x == d).count() >= 2
    }

    pub fn contains(&self, d: Digit) -> bool {
        self.pre.contains(&d) || self.per.contains(&d)
    }

    /// Lexicographic comparison of the infinite words.
    pub fn compare(&self, other: &EpWord) -> Ordering {
        let bound = self.pre.len().max(other.pre.len()) + lcm(self.per.len(), other.per.len());
        (0..bound)
            .map(|i| self.at(i).cmp(&other.at(i)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }

    /// Image under a single substitution.
    pub fn apply(&self, s: Subst) -> Result<EpWord> {
        Morphism::from(s).apply(self)
    }

    /// `inf O(u)`: the smallest suffix.
    pub fn orbit_inf(&self) -> EpWord {
        self.extreme((0..self.orbit_len()).map(|k| self.suffix(k)), Ordering::Less)
            .expect("orbit is nonempty")
    }

    /// `sup O(u)`: the largest suffix.
    pub fn orbit_sup(&self) -> EpWord {
        self.extreme((0..self.orbit_len()).map(|k| self.suffix(k)), Ordering::Greater)
            .expect("orbit is nonempty")
    }

    /// Smallest suffix immediately following an occurrence of `1`.
    pub fn orbit_inf1(&self) -> Result<EpWord> {
        self.extreme(self.suffixes_after(1), Ordering::Less)
            .ok_or(Error::MissingLetter(1))
    }

    /// Largest suffix immediately following an occurrence of `0`.
    pub fn orbit_sup0(&self) -> Result<EpWord> {
        self.extreme(self.suffixes_after(0), Ordering::Greater)
            .ok_or(Error::MissingLetter(0))
    }

    fn suffixes_after(&self, d: Digit) -> impl Iterator<Item = EpWord> + '_ {
        (0..self.orbit_len())
            .filter(move |&k| self.at(k) == d)
            .map(move |k| self.suffix(k + 1))
    }

    fn extreme(&self, it: impl Iterator<Item = EpWord>, want: Ordering) -> Option<EpWord> {
        let mut best: Option<EpWord> = None;
        for s in it {
            match &best {
                Some(b) if s.compare(b) != want => {}
                _ => best = Some(s),
            }
        }
        best.map(|b| b.canonicalize())
    }
}

impl PartialOrd for EpWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EpWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

impl fmt::Display for EpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.pre {
            write!(f, "{d}")?;
        }
        f.write_str("(")?;
        for d in &self.per {
            write!(f, "{d}")?;
        }
        f.write_str(")")
    }
}

/// Parses the literal `<digits> "(" <digits> ")"`.
impl FromStr for EpWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let open = s
            .find('(')
            .ok_or_else(|| Error::Parse(format!("missing '(' in {s:?}")))?;
        let rest = &s[open + 1..];
        let close = rest
            .find(')')
            .ok_or_else(|| Error::Parse(format!("missing ')' in {s:?}")))?;
        if close + 1 != rest.len() {
            return Err(Error::Parse(format!("trailing characters in {s:?}")));
        }
        let pre = parse_digits(&s[..open])?;
        let per = parse_digits(&rest[..close])?;
        EpWord::new(pre, per)
    }
}

pub fn parse_word(text: &str) -> Result<EpWord> {
    text.parse()
}

/// One of the three generating substitutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subst {
    /// `0 -> 0, 1 -> 01`
    L,
    /// `0 -> 01, 1 -> 10`
    M,
    /// `0 -> 01, 1 -> 1`
    R,
}

impl Subst {
    pub const ALL: [Subst; 3] = [Subst::L, Subst::M, Subst::R];

    pub fn image(self, d: Digit) -> &'static [Digit] {
        match (self, d) {
            (Subst::L, 0) => &[0],
            (Subst::L, _) => &[0, 1],
            (Subst::M, 0) => &[0, 1],
            (Subst::M, _) => &[1, 0],
            (Subst::R, 0) => &[0, 1],
            (Subst::R, _) => &[1],
        }
    }

    pub fn apply_finite(self, w: &[Digit]) -> Result<Vec<Digit>> {
        let mut out = Vec::with_capacity(2 * w.len());
        for &d in w {
            if d > 1 {
                return Err(Error::NotBinary);
            }
            out.extend_from_slice(self.image(d));
        }
        Ok(out)
    }

    pub fn symbol(self) -> char {
        match self {
            Subst::L => 'L',
            Subst::M => 'M',
            Subst::R => 'R',
        }
    }
}

impl TryFrom<char> for Subst {
    type Error = Error;

    fn try_from(c: char) -> Result<Self> {
        match c {
            'L' => Ok(Subst::L),
            'M' => Ok(Subst::M),
            'R' => Ok(Subst::R),
            other => Err(Error::Parse(format!("illegal substitution letter {other:?}"))),
        }
    }
}

/// A finite product `σ₁σ₂⋯σₙ` of substitutions, acting as `σ₁(σ₂(⋯σₙ(u)))`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Directive(Vec<Subst>);

impl Directive {
    pub fn new(letters: Vec<Subst>) -> Self {
        Directive(letters)
    }

    pub fn identity() -> Self {
        Directive(Vec::new())
    }

    pub fn letters(&self) -> &[Subst] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self` followed by `s` (so `s` is applied first).
    pub fn then(&self, s: Subst) -> Directive {
        let mut v = self.0.clone();
        v.push(s);
        Directive(v)
    }

    pub fn morphism(&self) -> Morphism {
        morphism_of(self)
    }
}

impl fmt::Display for Directive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for Directive {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim().chars().map(Subst::try_from).collect::<Result<Vec<_>>>().map(Directive)
    }
}

/// A morphism of `{0,1}` given by the images of both letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism {
    image0: Vec<Digit>,
    image1: Vec<Digit>,
}

impl Morphism {
    pub fn identity() -> Self {
        Morphism { image0: vec![0], image1: vec![1] }
    }

    pub fn image0(&self) -> &[Digit] {
        &self.image0
    }

    pub fn image1(&self) -> &[Digit] {
        &self.image1
    }

    pub fn apply_finite(&self, w: &[Digit]) -> Result<Vec<Digit>> {
        let mut out = Vec::new();
        for &d in w {
            match d {
                0 => out.extend_from_slice(&self.image0),
                1 => out.extend_from_slice(&self.image1),
                _ => return Err(Error::NotBinary),
            }
        }
        Ok(out)
    }

    /// `σ(pre (per)^ω) = σ(pre) σ(per)^ω`.
    pub fn apply(&self, u: &EpWord) -> Result<EpWord> {
        let pre = self.apply_finite(&u.pre)?;
        let per = self.apply_finite(&u.per)?;
        Ok(EpWord::canonical(pre, per))
    }
}

impl From<Subst> for Morphism {
    fn from(s: Subst) -> Self {
        Morphism { image0: s.image(0).to_vec(), image1: s.image(1).to_vec() }
    }
}

pub fn morphism_of(d: &Directive) -> Morphism {
    let mut image0 = vec![0];
    let mut image1 = vec![1];
    for &s in d.0.iter().rev() {
        image0 = s.apply_finite(&image0).expect("binary");
        image1 = s.apply_finite(&image1).expect("binary");
    }
    Morphism { image0, image1 }
}

/// Length-`n` prefix of the limit word of the (finite prefix of a) directive
/// sequence. Images of `0` under `L`, `M` and `R` all start with `0`, so the
/// words `σ₁⋯σ_k(0)` are nested.
pub fn limit_word_prefix(d: &Directive, n: usize) -> Result<FiniteWord> {
    let mut best = 0;
    for k in 0..=d.len() {
        let img = morphism_of(&Directive(d.0[..k].to_vec())).image0;
        if img.len() >= n {
            return Ok(FiniteWord(img[..n].to_vec()));
        }
        best = best.max(img.len());
    }
    Err(Error::NoStabilisation { requested: n, reached: best })
}

/// Finds `v` and the shortest `offset` with `u = offset · s(v)`.
pub fn desubstitute(u: &EpWord, s: Subst) -> Result<(EpWord, FiniteWord)> {
    if !u.is_binary() {
        return Err(Error::NotBinary);
    }
    let max_offset = u.orbit_len() + 2;
    for k in 0..=max_offset {
        if let Some(v) = decode_from(u, s, k) {
            return Ok((v, FiniteWord(u.prefix(k))));
        }
    }
    Err(Error::NoDecoding(s.symbol()))
}

/// Longest-match tokenisation of `u` from position `start` into images of
/// `s`. Returns `None` as soon as no image matches.
fn decode_from(u: &EpWord, s: Subst, start: usize) -> Option<EpWord> {
    let pre_len = u.pre.len();
    let per_len = u.per.len();
    let matches = |pos: usize, img: &[Digit]| img.iter().enumerate().all(|(i, &d)| u.at(pos + i) == d);
    let mut decoded = Vec::new();
    // phase within the period -> index into `decoded` at which it was first seen
    let mut seen = vec![None; per_len];
    let mut pos = start;
    loop {
        if pos >= pre_len {
            let phase = (pos - pre_len) % per_len;
            if let Some(first) = seen[phase] {
                let per: Vec<Digit> = decoded[first..].to_vec();
                let pre: Vec<Digit> = decoded[..first].to_vec();
                return Some(EpWord::canonical(pre, per));
            }
            seen[phase] = Some(decoded.len());
        }
        let i0 = s.image(0);
        let i1 = s.image(1);
        let m0 = matches(pos, i0);
        let m1 = matches(pos, i1);
        let (letter, len) = match (m0, m1) {
            (true, true) if i0.len() >= i1.len() => (0, i0.len()),
            (true, true) => (1, i1.len()),
            (true, false) => (0, i0.len()),
            (false, true) => (1, i1.len()),
            (false, false) => return None,
        };
        decoded.push(letter);
        pos += len;
    }
}
