//! Descent over the substitution tree computing the critical bases `L(m)`
//! (over `{L, M, R}`) and `G(m)` (over `{L, R}`).
//!
//! A node is a directive `σ`. Its plateaus sit at `σM`, and in parameter
//! space the children are ordered
//! `σL < [μ(σM(10̄)), μ(σM(010̄))] < σM < [μ(σM(101̄)), μ(σM(01̄))] < σR`.
//! The breakpoints are recomputed from orbit extremes of concrete words and
//! the ordering is checked at every node.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{check_m, Extremes, DEFAULT_TAU, DEFAULT_TOL};
use crate::words::{Directive, EpWord, Subst};

pub const DEFAULT_MAX_DEPTH: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseKind {
    PlateauG,
    PlateauF,
    TopG,
    LimitPoint,
}

impl fmt::Display for CaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseKind::PlateauG => "PlateauG",
            CaseKind::PlateauF => "PlateauF",
            CaseKind::TopG => "TopG",
            CaseKind::LimitPoint => "LimitPoint",
        })
    }
}

/// Which branch of the piecewise formula produced a value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalCase {
    pub kind: CaseKind,
    /// For plateaus the directive `σM`; for limit points the deepest node
    /// explored; empty for the top branch.
    pub directive: Directive,
    /// The word whose `f` or `g` gives the value.
    pub witness: EpWord,
}

impl CriticalCase {
    /// `"PlateauG:M"`, `"TopG"`, `"LimitPoint:MRL"`, ...
    pub fn summary(&self) -> String {
        match self.kind {
            CaseKind::TopG => self.kind.to_string(),
            _ => format!("{}:{}", self.kind, self.directive),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalResult {
    pub m: f64,
    pub beta: f64,
    pub case: CriticalCase,
    /// Solver bracket width, or the gap between the two limiting curves for
    /// limit points.
    pub bracket_width: f64,
    pub depth_used: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    pub tol: f64,
    pub tau: f64,
    pub max_depth: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params { tol: DEFAULT_TOL, tau: DEFAULT_TAU, max_depth: DEFAULT_MAX_DEPTH }
    }
}

impl Params {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Domain(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(Error::Domain(format!("tau must be non-negative, got {}", self.tau)));
        }
        if self.max_depth == 0 {
            return Err(Error::Domain("max_depth must be at least 1".into()));
        }
        Ok(())
    }
}

/// Routing decision taken at one node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Top,
    DescendL,
    DescendM,
    DescendR,
    PlateauG,
    PlateauF,
    Limit,
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Top => "top",
            Decision::DescendL => "descend L",
            Decision::DescendM => "descend M",
            Decision::DescendR => "descend R",
            Decision::PlateauG => "plateauG",
            Decision::PlateauF => "plateauF",
            Decision::Limit => "limit",
        })
    }
}

/// One visited node of the descent.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceNode {
    pub directive: Directive,
    pub breakpoints: Vec<f64>,
    pub decision: Decision,
}

/// The four words whose `μ` bound the plateaus at `σM`.
pub fn plateau_words(sigma: &Directive) -> Result<[EpWord; 4]> {
    let mor = sigma.then(Subst::M).morphism();
    Ok([
        mor.apply(&"1(0)".parse()?)?,
        mor.apply(&"01(0)".parse()?)?,
        mor.apply(&"10(1)".parse()?)?,
        mor.apply(&"0(1)".parse()?)?,
    ])
}

/// Breakpoint cache plus parameters. Reusing one `Descent` across many `m`
/// (as [`scan`] does) avoids recomputing the `μ` of shared nodes.
#[derive(Debug)]
pub struct Descent {
    params: Params,
    top_mu: f64,
    l_nodes: HashMap<Directive, [f64; 4]>,
    g_nodes: HashMap<Directive, [f64; 3]>,
}

fn mu_of(u: &EpWord, tol: f64) -> Result<f64> {
    Ok(Extremes::of(u).mu(tol)?.mid())
}

impl Descent {
    pub fn new(params: Params) -> Result<Self> {
        params.validate()?;
        let top_mu = mu_of(&"0(1)".parse()?, params.tol)?;
        Ok(Descent { params, top_mu, l_nodes: HashMap::new(), g_nodes: HashMap::new() })
    }

    pub fn params(&self) -> Params {
        self.params
    }

    /// `μ_{0 1̄}`, above which both critical bases follow their top branches.
    pub fn top_mu(&self) -> f64 {
        self.top_mu
    }

    fn l_breakpoints(&mut self, sigma: &Directive) -> Result<[f64; 4]> {
        if let Some(b) = self.l_nodes.get(sigma) {
            return Ok(*b);
        }
        let words = plateau_words(sigma)?;
        let mut b = [0.0; 4];
        for (slot, w) in b.iter_mut().zip(words.iter()) {
            *slot = mu_of(w, self.params.tol)?;
        }
        self.l_nodes.insert(sigma.clone(), b);
        Ok(b)
    }

    fn g_breakpoints(&mut self, sigma: &Directive) -> Result<[f64; 3]> {
        if let Some(b) = self.g_nodes.get(sigma) {
            return Ok(*b);
        }
        let mor = sigma.then(Subst::M).morphism();
        let mut b = [0.0; 3];
        for (slot, lit) in b.iter_mut().zip(["1(0)", "(0)", "0(1)"]) {
            *slot = mu_of(&mor.apply(&lit.parse()?)?, self.params.tol)?;
        }
        self.g_nodes.insert(sigma.clone(), b);
        Ok(b)
    }

    fn check_order(&self, sigma: &Directive, b: &[f64], region: (f64, f64)) -> Result<()> {
        let tau = self.params.tau;
        let ordered = b.windows(2).all(|p| p[0] <= p[1] + tau);
        let inside = b[0] >= region.0 - tau && b[b.len() - 1] <= region.1 + tau;
        if ordered && inside {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "breakpoint ordering violated at node {sigma:?}: {b:?} in region {region:?}"
            )))
        }
    }

    /// `L(m)` together with the descent trace.
    pub fn critical_l_traced(&mut self, m: f64) -> Result<(CriticalResult, Vec<TraceNode>)> {
        check_m(m)?;
        let Params { tol, tau, max_depth } = self.params;
        let mut trace = Vec::new();
        if m >= self.top_mu - tau {
            let witness: EpWord = "0(1)".parse()?;
            let beta = Extremes::of(&witness).g(m, tol)?;
            trace.push(TraceNode {
                directive: Directive::identity(),
                breakpoints: vec![self.top_mu],
                decision: Decision::Top,
            });
            let case = CriticalCase { kind: CaseKind::TopG, directive: Directive::identity(), witness };
            return Ok((CriticalResult { m, beta, case, bracket_width: tol, depth_used: 0 }, trace));
        }

        let mut sigma = Directive::identity();
        let mut region = (1.0, self.top_mu);
        for depth in 0..max_depth {
            let b = self.l_breakpoints(&sigma)?;
            self.check_order(&sigma, &b, region)?;
            if b[3] - b[0] < tol {
                break;
            }
            let decision = if m >= b[0] - tau && m <= b[1] + tau {
                Decision::PlateauG
            } else if m >= b[2] - tau && m <= b[3] + tau {
                Decision::PlateauF
            } else if m < b[0] {
                Decision::DescendL
            } else if m > b[3] {
                Decision::DescendR
            } else {
                Decision::DescendM
            };
            trace.push(TraceNode { directive: sigma.clone(), breakpoints: b.to_vec(), decision });
            let plateau = sigma.then(Subst::M);
            let (next, next_region) = match decision {
                Decision::PlateauG | Decision::PlateauF => {
                    let words = plateau_words(&sigma)?;
                    let (kind, witness, beta) = if decision == Decision::PlateauG {
                        let w = words[0].clone();
                        let beta = Extremes::of(&w).g(m, tol)?;
                        (CaseKind::PlateauG, w, beta)
                    } else {
                        let w = words[3].clone();
                        let beta = Extremes::of(&w).f(m, tol)?;
                        (CaseKind::PlateauF, w, beta)
                    };
                    let case = CriticalCase { kind, directive: plateau, witness };
                    let result =
                        CriticalResult { m, beta, case, bracket_width: tol, depth_used: depth + 1 };
                    return Ok((result, trace));
                }
                Decision::DescendL => (sigma.then(Subst::L), (region.0, b[0])),
                Decision::DescendM => (plateau, (b[1], b[2])),
                Decision::DescendR => (sigma.then(Subst::R), (b[3], region.1)),
                Decision::Top | Decision::Limit => unreachable!(),
            };
            sigma = next;
            region = next_region;
        }
        self.limit_point(m, sigma, trace)
    }

    fn limit_point(
        &mut self,
        m: f64,
        sigma: Directive,
        mut trace: Vec<TraceNode>,
    ) -> Result<(CriticalResult, Vec<TraceNode>)> {
        let tol = self.params.tol;
        let mor = sigma.morphism();
        let upper = mor.apply(&"0(1)".parse()?)?;
        let lower = mor.apply(&"1(0)".parse()?)?;
        let beta = Extremes::of(&upper).f(m, tol)?;
        let other = Extremes::of(&lower).g(m, tol)?;
        let depth_used = trace.len();
        trace.push(TraceNode { directive: sigma.clone(), breakpoints: Vec::new(), decision: Decision::Limit });
        let case = CriticalCase { kind: CaseKind::LimitPoint, directive: sigma, witness: upper };
        let result = CriticalResult { m, beta, case, bracket_width: (beta - other).abs(), depth_used };
        Ok((result, trace))
    }

    pub fn critical_l(&mut self, m: f64) -> Result<CriticalResult> {
        self.critical_l_traced(m).map(|(r, _)| r)
    }

    /// `G(m)`: descent over `{L, R}` with plateaus
    /// `[μ(σM(10̄)), μ(σM(0̄))]` (value `f_{σM(0̄)}`) and
    /// `[μ(σM(0̄)), μ(σM(01̄))]` (value `g_{σM(0̄)}`).
    pub fn critical_g(&mut self, m: f64) -> Result<CriticalResult> {
        check_m(m)?;
        let Params { tol, tau, max_depth } = self.params;
        if m >= self.top_mu - tau {
            let witness = EpWord::constant(1);
            let beta = Extremes::of(&witness).f(m, tol)?;
            let case = CriticalCase { kind: CaseKind::TopG, directive: Directive::identity(), witness };
            return Ok(CriticalResult { m, beta, case, bracket_width: tol, depth_used: 0 });
        }
        let mut sigma = Directive::identity();
        let mut region = (1.0, self.top_mu);
        let mut depth = 0;
        while depth < max_depth {
            let b = self.g_breakpoints(&sigma)?;
            self.check_order(&sigma, &b, region)?;
            if b[2] - b[0] < tol {
                break;
            }
            depth += 1;
            let plateau = sigma.then(Subst::M);
            if m >= b[0] - tau && m <= b[2] + tau {
                let witness = plateau.morphism().apply(&EpWord::constant(0))?;
                let ext = Extremes::of(&witness);
                let (kind, beta) = if m <= b[1] {
                    (CaseKind::PlateauF, ext.f(m, tol)?)
                } else {
                    (CaseKind::PlateauG, ext.g(m, tol)?)
                };
                let case = CriticalCase { kind, directive: plateau, witness };
                return Ok(CriticalResult { m, beta, case, bracket_width: tol, depth_used: depth });
            }
            if m < b[0] {
                sigma = sigma.then(Subst::L);
                region = (region.0, b[0]);
            } else {
                sigma = sigma.then(Subst::R);
                region = (b[2], region.1);
            }
        }
        let witness = sigma.morphism().apply(&"0(1)".parse()?)?;
        let case = CriticalCase { kind: CaseKind::LimitPoint, directive: sigma, witness };
        Ok(CriticalResult { m, beta: 1.0 + m.sqrt(), case, bracket_width: tol, depth_used: depth })
    }

    pub fn scan_row(&mut self, m: f64) -> Result<ScanRow> {
        let g = self.critical_g(m)?;
        let l = self.critical_l(m)?;
        Ok(ScanRow { m, g: g.beta, l: l.beta, case_g: g.case.summary(), case_l: l.case.summary() })
    }
}

pub fn critical_l(m: f64, params: Params) -> Result<CriticalResult> {
    Descent::new(params)?.critical_l(m)
}

pub fn critical_g(m: f64, params: Params) -> Result<CriticalResult> {
    Descent::new(params)?.critical_g(m)
}

/// The nodes visited by the `L(m)` descent with their breakpoints and
/// routing decisions; the last entry carries the final case.
pub fn classify(m: f64, params: Params) -> Result<Vec<TraceNode>> {
    Descent::new(params)?.critical_l_traced(m).map(|(_, t)| t)
}

/// One row of a parameter sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub m: f64,
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "caseG")]
    pub case_g: String,
    #[serde(rename = "caseL")]
    pub case_l: String,
}

/// Grid `from, from + step, ...` up to `to` (inclusive, snapping the last
/// point onto `to` when it is within rounding distance).
pub fn grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Domain(format!("step must be positive, got {step}")));
    }
    if !(from > 1.0 && from < to && to <= 2.0) {
        return Err(Error::Domain(format!("grid [{from}, {to}] must satisfy 1 < from < to <= 2")));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| {
            let m = from + i as f64 * step;
            if (m - to).abs() < 1e-9 * step {
                to
            } else {
                m.min(to)
            }
        })
        .collect())
}

pub fn scan(from: f64, to: f64, step: f64, params: Params) -> Result<Vec<ScanRow>> {
    let points = grid(from, to, step)?;
    let mut descent = Descent::new(params)?;
    points.into_iter().map(|m| descent.scan_row(m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> EpWord {
        s.parse().unwrap()
    }

    fn d(s: &str) -> Directive {
        s.parse().unwrap()
    }

    fn golden_sq() -> f64 {
        (3.0 + 5f64.sqrt()) / 2.0
    }

    #[test]
    fn plateau_words_at_root() {
        let [a, b, c, e] = plateau_words(&Directive::identity()).unwrap();
        assert_eq!(a, w("10(01)"));
        assert_eq!(b, w("0110(01)"));
        assert_eq!(c, w("1001(10)"));
        assert_eq!(e, w("01(10)"));
    }

    #[test]
    fn top_branch_at_two() {
        let r = critical_l(2.0, Params::default()).unwrap();
        assert_eq!(r.case.kind, CaseKind::TopG);
        assert_eq!(r.case.witness, w("0(1)"));
        assert!((r.beta - golden_sq()).abs() < 1e-10);
        let g = critical_g(2.0, Params::default()).unwrap();
        assert!((g.beta - 2.0).abs() < 1e-10);
        let g = critical_g(1.9, Params::default()).unwrap();
        assert!((g.beta - 1.9 / 0.9).abs() < 1e-10);
    }

    #[test]
    fn plateaus_at_m() {
        let r = critical_l(1.4, Params::default()).unwrap();
        assert_eq!(r.case.summary(), "PlateauG:M");
        let expect = Extremes::of(&w("0(01)")).g(1.4, 1e-13).unwrap();
        assert!((r.beta - expect).abs() < 1e-11);

        let r = critical_l(1.52, Params::default()).unwrap();
        assert_eq!(r.case.summary(), "PlateauF:M");
        let expect = Extremes::of(&w("1(10)")).f(1.52, 1e-13).unwrap();
        assert!((r.beta - expect).abs() < 1e-11);

        let r = critical_l(1.505, Params::default()).unwrap();
        assert_eq!(r.case.summary(), "PlateauF:MM");
    }

    #[test]
    fn g_plateau_boundary_at_four_thirds() {
        let m = 4.0 / 3.0;
        let u = w("(01)");
        let ext = Extremes::of(&u);
        let f = ext.f(m, 1e-13).unwrap();
        let g = ext.g(m, 1e-13).unwrap();
        assert!((f - g).abs() < 2e-12, "{f} vs {g}");
        let r = critical_g(m, Params::default()).unwrap();
        assert!((r.beta - f).abs() < 1e-11);
        assert_eq!(r.case.directive, d("M"));
    }

    #[test]
    fn classify_traces() {
        let t = classify(1.505, Params::default()).unwrap();
        let steps: Vec<_> = t.iter().map(|n| (n.directive.to_string(), n.decision)).collect();
        assert_eq!(
            steps,
            vec![("".to_string(), Decision::DescendM), ("M".to_string(), Decision::PlateauF)]
        );
        let t = classify(1.4, Params::default()).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].decision, Decision::PlateauG);

        let params = Params { max_depth: 10, ..Params::default() };
        let t = classify(1.75, params).unwrap();
        assert!(t.len() <= 11);
        assert!(t[0].decision == Decision::DescendR);
        let last = t.last().unwrap().decision;
        assert!(matches!(last, Decision::PlateauG | Decision::PlateauF | Decision::Limit));
    }

    #[test]
    fn limit_point_reports_gap() {
        // 1.5035 lies between the two plateaus at MM, so two levels are not enough
        let params = Params { max_depth: 2, ..Params::default() };
        let r = critical_l(1.5035, params).unwrap();
        assert_eq!(r.case.kind, CaseKind::LimitPoint);
        assert_eq!(r.case.directive, d("MM"));
        assert_eq!(r.depth_used, 2);
        assert!(r.bracket_width > 0.0 && r.bracket_width < 0.1);
        let full = critical_l(1.5035, Params::default()).unwrap();
        // the gap is a scale for the error, not a rigorous enclosure
        assert!((full.beta - r.beta).abs() <= 2.0 * r.bracket_width);
    }

    #[test]
    fn out_of_range() {
        assert!(critical_l(1.0, Params::default()).is_err());
        assert!(critical_l(2.1, Params::default()).is_err());
        assert!(critical_g(0.5, Params::default()).is_err());
        assert!(Descent::new(Params { max_depth: 0, ..Params::default() }).is_err());
    }

    #[test]
    fn grid_construction() {
        let g = grid(1.99, 2.0, 0.01).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(*g.last().unwrap(), 2.0);
        assert_eq!(grid(1.3, 1.45, 0.05).unwrap().len(), 4);
        assert!(grid(1.5, 1.4, 0.01).is_err());
        assert!(grid(1.4, 1.5, 0.0).is_err());
    }

    #[test]
    fn scan_rows_follow_the_plateau() {
        let rows = scan(1.3, 1.45, 0.05, Params::default()).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert_eq!(r.case_l, "PlateauG:M");
        }
        let rows = scan(1.99, 2.0, 0.01, Params::default()).unwrap();
        assert!((rows.last().unwrap().l - golden_sq()).abs() < 1e-12);
    }
}
