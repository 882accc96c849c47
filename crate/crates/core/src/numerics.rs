//! Evaluation of `π_β` on eventually periodic words and the bracketing
//! solvers for `f_u(m)`, `g_u(m)`, `μ_u`, the closed-form `μ` identities and
//! the Komornik–Loreti constant.
//!
//! Every defining function here is strictly monotone on its bracket, so plain
//! bisection is used throughout. A tolerance of `0.0` means "bisect until the
//! bracket cannot be split in double precision".

use crate::error::{Error, Result};
use crate::words::{limit_word_prefix, Digit, Directive, EpWord, Subst};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_TAU: f64 = 1e-9;

/// Lower end of every base/parameter bracket.
const LOWER: f64 = 1.0 + 1e-9;

/// How the symbol `2` is valued.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Valuation {
    /// Alphabet `{0, 1, m}`.
    Alphabet(f64),
    /// Literal digit value 2.
    Literal,
}

impl Valuation {
    #[inline]
    pub fn value(self, d: Digit) -> f64 {
        match (d, self) {
            (0, _) => 0.0,
            (1, _) => 1.0,
            (_, Valuation::Alphabet(m)) => m,
            (_, Valuation::Literal) => 2.0,
        }
    }
}

/// A closed interval known to contain a root.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Bisection for a strictly decreasing `func` with `func(lo) > 0 >= func(hi)`.
pub fn bisect_decreasing(mut func: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Bracket {
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if func(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Bracket { lo, hi }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("base must exceed 1, got {beta}")))
    }
}

pub fn check_m(m: f64) -> Result<()> {
    if m > 1.0 && m <= 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("m must lie in (1, 2], got {m}")))
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol >= 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("tolerance must be finite and non-negative, got {tol}")))
    }
}

/// `π_β` of a finite block read as a polynomial in `1/β`, continued by `tail`
/// (the value of the infinite continuation).
#[inline]
fn horner(letters: &[Digit], tail: f64, beta: f64, val: Valuation) -> f64 {
    letters.iter().rev().fold(tail, |acc, &d| (val.value(d) + acc) / beta)
}

/// `π_β(pre (per)^ω)` in closed form.
pub fn pi_beta_unchecked(u: &EpWord, beta: f64, val: Valuation) -> f64 {
    let per = u.period();
    let block = horner(per, 0.0, beta, val);
    let tail = block / (1.0 - beta.powi(-(per.len() as i32)));
    horner(u.preperiod(), tail, beta, val)
}

/// `π_β(u) = Σ u_k β^{-k}`.
pub fn pi_beta(u: &EpWord, beta: f64, val: Valuation) -> Result<f64> {
    check_beta(beta)?;
    Ok(pi_beta_unchecked(u, beta, val))
}

/// Doubles `β - 1` until `func` turns non-positive.
fn expand_upper(mut func: impl FnMut(f64) -> f64, start: f64) -> Result<f64> {
    let mut hi = start;
    for _ in 0..64 {
        if func(hi) <= 0.0 {
            return Ok(hi);
        }
        hi = 1.0 + 2.0 * (hi - 1.0);
    }
    Err(Error::NoBracket { lo: LOWER, hi })
}

/// `f` computed from the orbit supremum directly.
pub(crate) fn f_from_sup(sup: &EpWord, m: f64, tol: f64) -> Result<Bracket> {
    let h = |x: f64| x * pi_beta_unchecked(sup, x, Valuation::Literal) - m;
    if h(LOWER) <= 0.0 {
        return Ok(Bracket { lo: LOWER, hi: LOWER });
    }
    let hi = expand_upper(h, 1.0 + m)?;
    Ok(bisect_decreasing(h, LOWER, hi, tol))
}

/// `g` computed from the orbit infimum directly.
pub(crate) fn g_from_inf(inf: &EpWord, m: f64, tol: f64) -> Result<Bracket> {
    let h = |x: f64| m / (x - 1.0) - pi_beta_unchecked(inf, x, Valuation::Literal) - 1.0;
    let hi = expand_upper(h, 1.0 + m)?;
    if h(LOWER) <= 0.0 {
        return Err(Error::NoBracket { lo: LOWER, hi });
    }
    Ok(bisect_decreasing(h, LOWER, hi, tol))
}

fn require_binary(u: &EpWord) -> Result<()> {
    if u.is_binary() {
        Ok(())
    } else {
        Err(Error::NotBinary)
    }
}

fn require_two_ones(u: &EpWord) -> Result<()> {
    if u.at_least_two(1) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{u} contains fewer than two ones")))
    }
}

/// `f_u(m)`: the base solving `β π_β(sup O(u)) = m`.
pub fn solve_f(u: &EpWord, m: f64, tol: f64) -> Result<f64> {
    require_binary(u)?;
    require_two_ones(u)?;
    check_m(m)?;
    check_tol(tol)?;
    Ok(f_from_sup(&u.orbit_sup(), m, tol)?.mid())
}

/// `g_u(m)`: the base solving `(β - 1)(1 + π_β(inf O(u))) = m`.
pub fn solve_g(u: &EpWord, m: f64, tol: f64) -> Result<f64> {
    require_binary(u)?;
    check_m(m)?;
    check_tol(tol)?;
    Ok(g_from_inf(&u.orbit_inf(), m, tol)?.mid())
}

/// Orbit extremes of a word, the only data `f`, `g` and `μ` depend on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Extremes {
    pub inf: EpWord,
    pub sup: EpWord,
}

impl Extremes {
    pub fn of(u: &EpWord) -> Self {
        Extremes { inf: u.orbit_inf(), sup: u.orbit_sup() }
    }

    pub fn f(&self, m: f64, tol: f64) -> Result<f64> {
        Ok(f_from_sup(&self.sup, m, tol)?.mid())
    }

    pub fn g(&self, m: f64, tol: f64) -> Result<f64> {
        Ok(g_from_inf(&self.inf, m, tol)?.mid())
    }

    /// `μ`, bisecting the strictly decreasing `m ↦ f(m) - g(m)` on `(1, 2]`.
    pub fn mu(&self, tol: f64) -> Result<Bracket> {
        let mut failure = None;
        let mut diff = |m: f64| match (f_from_sup(&self.sup, m, 0.0), g_from_inf(&self.inf, m, 0.0)) {
            (Ok(f), Ok(g)) => f.mid() - g.mid(),
            (Err(e), _) | (_, Err(e)) => {
                failure.get_or_insert(e);
                0.0
            }
        };
        let bracket = if diff(2.0) > 0.0 {
            Bracket { lo: 2.0, hi: 2.0 }
        } else {
            bisect_decreasing(&mut diff, LOWER, 2.0, tol)
        };
        match failure {
            Some(e) => Err(e),
            None => Ok(bracket),
        }
    }
}

/// `μ_u`: the parameter at which `f_u` and `g_u` coincide.
pub fn solve_mu(u: &EpWord, tol: f64) -> Result<f64> {
    require_binary(u)?;
    require_two_ones(u)?;
    check_tol(tol)?;
    Ok(Extremes::of(u).mu(tol)?.mid())
}

/// Root of the strictly decreasing `β ↦ π_β(w) - 1` for a word whose first
/// letter is the literal digit 2.
fn solve_pi_equals_one(w: &EpWord, tol: f64) -> Result<f64> {
    let h = |x: f64| pi_beta_unchecked(w, x, Valuation::Literal) - 1.0;
    let hi = 4.0;
    if h(LOWER) <= 0.0 || h(hi) > 0.0 {
        return Err(Error::NoBracket { lo: LOWER, hi });
    }
    Ok(bisect_decreasing(h, LOWER, hi, tol).mid())
}

/// `μ = (β - 1)²` with `π_β(2 0 v) = 1`, valid for words `u` with
/// `inf O(u) = 0v` and `sup O(u) = 1v`.
pub fn mu_sturmian_closed_form(v: &EpWord, tol: f64) -> Result<f64> {
    require_binary(v)?;
    check_tol(tol)?;
    let beta = solve_pi_equals_one(&v.prepend(&[2, 0]), tol)?;
    Ok((beta - 1.0) * (beta - 1.0))
}

/// The common tail `v` with `inf O(u) = 0v` and `sup O(u) = 1v`, if any.
pub fn sturmian_tail(u: &EpWord) -> Option<EpWord> {
    let inf = u.orbit_inf();
    let sup = u.orbit_sup();
    let v = inf.suffix(1);
    (inf.at(0) == 0 && sup.at(0) == 1 && sup.suffix(1) == v).then_some(v)
}

/// [`mu_sturmian_closed_form`] for a word `u`, after checking that its orbit
/// extremes have the required shape.
pub fn mu_sturmian_closed_form_for(u: &EpWord, tol: f64) -> Result<f64> {
    let v = sturmian_tail(u).ok_or_else(|| {
        Error::Precondition(format!("{u} does not satisfy inf = 0v, sup = 1v"))
    })?;
    mu_sturmian_closed_form(&v, tol)
}

/// `μ_{σ(0̄)} = (β-1)² β^n / (β^n - 1)` with `σ(0) = 0w1`, `n = |σ(0)|` and
/// `π_β(2 0 w 0̄) = 1`, for `σ ∈ {L,R}*M`.
pub fn mu_periodic_closed_form(d: &Directive, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let letters = d.letters();
    match letters.split_last() {
        Some((Subst::M, head)) if head.iter().all(|&s| s != Subst::M) => {}
        _ => {
            return Err(Error::Precondition(format!(
                "directive {d} is not of the form {{L,R}}*M"
            )))
        }
    }
    let image0 = d.morphism().image0().to_vec();
    let n = image0.len();
    if n < 2 || image0[0] != 0 || image0[n - 1] != 1 {
        return Err(Error::Precondition(format!("image of 0 under {d} is not of the form 0w1")));
    }
    let mut pre = vec![2, 0];
    pre.extend_from_slice(&image0[1..n - 1]);
    let word = EpWord::new(pre, vec![0])?;
    let beta = solve_pi_equals_one(&word, tol)?;
    let bn = beta.powi(n as i32);
    Ok((beta - 1.0) * (beta - 1.0) * bn / (bn - 1.0))
}

/// Enclosure of the base `β` with `π_β(u) = 1`, `u` the Thue–Morse word
/// without its first letter, from a prefix of `prefix_len` letters. The
/// unknown tail is bounded by the all-0 and all-1 continuations.
pub fn komornik_loreti_bracket(prefix_len: usize, tol: f64) -> Result<Bracket> {
    if prefix_len < 32 {
        return Err(Error::Precondition(format!("prefix length {prefix_len} is below 32")));
    }
    check_tol(tol)?;
    let bracket = kl_enclosure(prefix_len, tol)?;
    if bracket.width() <= tol {
        return Ok(bracket);
    }
    let mut required = prefix_len;
    loop {
        required *= 2;
        if kl_enclosure(required, tol)?.width() <= tol || required >= 1 << 14 {
            return Err(Error::PrefixTooShort { tol, prefix_len, required });
        }
    }
}

/// Midpoint of [`komornik_loreti_bracket`].
pub fn komornik_loreti_root(prefix_len: usize, tol: f64) -> Result<f64> {
    komornik_loreti_bracket(prefix_len, tol).map(|b| b.mid())
}

fn kl_enclosure(prefix_len: usize, tol: f64) -> Result<Bracket> {
    let depth = usize::BITS - prefix_len.leading_zeros() + 1;
    let tm = Directive::new(vec![Subst::M; depth as usize]);
    let prefix = limit_word_prefix(&tm, prefix_len + 1)?.into_vec();
    let u = &prefix[1..];
    let n = u.len() as i32;
    let lower = |x: f64| horner(u, 0.0, x, Valuation::Literal);
    let tail = |x: f64| x.powi(-n) / (x - 1.0);
    let inner_tol = tol * 1e-3;
    // lower(β) <= π_β(u) <= lower(β) + tail(β), all decreasing in β
    let lo = bisect_decreasing(|x| lower(x) - 1.0, 1.5, 2.0, inner_tol).lo;
    let hi = bisect_decreasing(|x| lower(x) + tail(x) - 1.0, 1.5, 2.0, inner_tol).hi;
    Ok(Bracket { lo: lo.min(hi), hi: hi.max(lo) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> EpWord {
        s.parse().unwrap()
    }

    const BIN: Valuation = Valuation::Literal;

    #[test]
    fn pi_beta_examples() {
        assert!((pi_beta(&w("(1)"), 2.0, BIN).unwrap() - 1.0).abs() < 1e-15);
        assert!((pi_beta(&w("1(0)"), 2.5, BIN).unwrap() - 0.4).abs() < 1e-15);
        assert!((pi_beta(&w("(10)"), 2.0, BIN).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(pi_beta(&w("(1)"), 1.0, BIN), Err(Error::Domain(_))));
        // digit 2 under the two valuations
        let u = w("(2)");
        assert!((pi_beta(&u, 3.0, Valuation::Alphabet(1.5)).unwrap() - 0.75).abs() < 1e-15);
        assert!((pi_beta(&u, 3.0, BIN).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn solve_f_examples() {
        let top = w("(1)");
        for &m in &[1.2, 1.5, 1.9, 2.0] {
            let f = solve_f(&top, m, 1e-13).unwrap();
            assert!((f - m / (m - 1.0)).abs() < 1e-12, "m = {m}");
        }
        assert!((solve_f(&w("0(1)"), 2.0, 1e-13).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(solve_f(&w("1(0)"), 1.5, 1e-12), Err(Error::Precondition(_))));
        assert!(matches!(solve_f(&top, 2.5, 1e-12), Err(Error::Domain(_))));
    }

    #[test]
    fn solve_g_examples() {
        for &m in &[1.1, 1.5, 2.0] {
            let g = solve_g(&w("1(0)"), m, 1e-13).unwrap();
            assert!((g - (1.0 + m)).abs() < 1e-12);
            let g = solve_g(&w("0(1)"), m, 1e-13).unwrap();
            let expect = (m + 1.0 + (m * m + 2.0 * m - 3.0).sqrt()) / 2.0;
            assert!((g - expect).abs() < 1e-12, "m = {m}: {g} vs {expect}");
        }
        let g2 = solve_g(&w("0(1)"), 2.0, 1e-13).unwrap();
        assert!((g2 - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn solve_mu_examples() {
        let cases = [("0(01)", 1.281972), ("1(10)", 1.55496), ("001(0110)", 1.47571)];
        for (s, expect) in cases {
            let mu = solve_mu(&w(s), 1e-12).unwrap();
            assert!((mu - expect).abs() < 1e-5, "{s}: {mu}");
        }
        assert!(solve_mu(&w("1(0)"), 1e-12).is_err());
    }

    #[test]
    fn sturmian_closed_form_examples() {
        let mu = mu_sturmian_closed_form(&w("(0)"), 1e-13).unwrap();
        assert!((mu - 1.0).abs() < 1e-12);
        let closed = mu_sturmian_closed_form(&w("(01)"), 1e-13).unwrap();
        let direct = solve_mu(&w("0(01)"), 1e-13).unwrap();
        assert!((closed - direct).abs() < 2e-12, "{closed} vs {direct}");
        let mu = mu_sturmian_closed_form(&w("(1)"), 1e-13).unwrap();
        assert!((mu - 1.7549).abs() < 1e-4);
        assert_eq!(sturmian_tail(&w("0(01)")), Some(w("(01)")));
        assert!(mu_sturmian_closed_form_for(&w("(01)"), 1e-12).is_err());
    }

    #[test]
    fn periodic_closed_form_examples() {
        let d = |s: &str| s.parse::<Directive>().unwrap();
        let mu = mu_periodic_closed_form(&d("M"), 1e-13).unwrap();
        assert!((mu - 4.0 / 3.0).abs() < 1e-12);
        let mu = mu_periodic_closed_form(&d("LM"), 1e-13).unwrap();
        assert!((mu - 8.0 / 7.0).abs() < 1e-12);
        for s in ["RM", "LRM", "RRLM"] {
            let closed = mu_periodic_closed_form(&d(s), 1e-13).unwrap();
            let word = d(s).morphism().apply(&EpWord::constant(0)).unwrap();
            let direct = solve_mu(&word, 1e-13).unwrap();
            assert!((closed - direct).abs() < 2e-12, "{s}: {closed} vs {direct}");
        }
        assert!(mu_periodic_closed_form(&d("ML"), 1e-12).is_err());
        assert!(mu_periodic_closed_form(&d("MM"), 1e-12).is_err());
    }

    #[test]
    fn komornik_loreti() {
        let b = komornik_loreti_bracket(64, 1e-9).unwrap();
        assert!(b.width() <= 1e-9);
        assert!(b.lo >= 1.7872 && b.hi <= 1.7873, "{b:?}");
        assert!(komornik_loreti_root(16, 1e-9).is_err());
        let err = komornik_loreti_root(32, 1e-300).unwrap_err();
        assert!(matches!(err, Error::PrefixTooShort { .. }));
    }

    #[test]
    fn bisection_residual_within_slope_bound() {
        let u = w("1(10)");
        let m = 1.6;
        let tol = 1e-12;
        let sup = u.orbit_sup();
        let f = solve_f(&u, m, tol).unwrap();
        let h = |x: f64| x * pi_beta_unchecked(&sup, x, BIN) - m;
        let slope = (h(f - 1e-6) - h(f + 1e-6)).abs() / 2e-6;
        assert!(h(f).abs() <= 10.0 * tol * slope.max(1.0));
        let inf = u.orbit_inf();
        let g = solve_g(&u, m, tol).unwrap();
        let k = |x: f64| (x - 1.0) * (1.0 + pi_beta_unchecked(&inf, x, BIN)) - m;
        let slope = (k(g + 1e-6) - k(g - 1e-6)).abs() / 2e-6;
        assert!(k(g).abs() <= 10.0 * tol * slope.max(1.0));
    }
}
