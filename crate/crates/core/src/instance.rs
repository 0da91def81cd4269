//! Random MAX-2SAT instances.
//!
//! A clause is an unordered pair of literals on two distinct variables, so the
//! pool of possible clauses on `n` variables has `4·C(n,2)` members. Instances
//! draw `r·n` of them without replacement and keep them sorted, which makes
//! the clause list a canonical form: two instances are equal exactly when
//! their clause sets are.
//!
//! Assignments are basis indices: bit `k` of the index is the value of
//! variable `v_k`, with a set bit meaning TRUE.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_rational::Ratio;
use rand::seq::index;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed::rng_from;

/// Largest `n` accepted by [`brute_force`].
pub const BRUTE_FORCE_MAX_VARS: usize = 20;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("ratio infeasible: {requested} clauses requested but only {available} distinct clauses exist on {n} variables")]
    RatioInfeasible {
        n: usize,
        requested: u64,
        available: u64,
    },
    #[error("r·n = {r}·{n} is not an integer clause count")]
    FractionalClauseCount { n: usize, r: String },
    #[error("need at least 2 variables, got {0}")]
    TooFewVariables(usize),
    #[error("{n} variables exceeds the brute-force limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("unknown instance format for {0}")]
    UnknownFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: u32,
    pub negated: bool,
}

impl Literal {
    pub fn new(var: u32, negated: bool) -> Self {
        Literal { var, negated }
    }

    /// Truth value of the literal under the assignment encoded by `basis`.
    #[inline]
    pub fn holds(self, basis: u64) -> bool {
        ((basis >> self.var) & 1 == 1) != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "¬v{}", self.var)
        } else {
            write!(f, "v{}", self.var)
        }
    }
}

/// A two-literal disjunction. `first.var < second.var` always holds.
///
/// Clauses order by variable pair, then by the two negation flags, which is
/// the order the clause pool is enumerated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Clause {
    first: Literal,
    second: Literal,
}

impl Clause {
    fn key(&self) -> (u32, u32, bool, bool) {
        (
            self.first.var,
            self.second.var,
            self.first.negated,
            self.second.negated,
        )
    }
}

impl Ord for Clause {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Clause {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Clause {
    /// Builds a clause, ordering the literals by variable.
    pub fn new(a: Literal, b: Literal) -> Result<Self, InstanceError> {
        if a.var == b.var {
            return Err(InstanceError::Invalid(format!(
                "clause repeats variable v{}",
                a.var
            )));
        }
        let (first, second) = if a.var < b.var { (a, b) } else { (b, a) };
        Ok(Clause { first, second })
    }

    pub fn first(&self) -> Literal {
        self.first
    }

    pub fn second(&self) -> Literal {
        self.second
    }

    #[inline]
    pub fn satisfied_by(&self, basis: u64) -> bool {
        self.first.holds(basis) || self.second.holds(basis)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} ∨ {})", self.first, self.second)
    }
}

/// A MAX-2SAT formula together with the seed that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatInstance {
    n: usize,
    clauses: Vec<Clause>,
    seed: u64,
}

/// Number of distinct clauses on `n` variables.
pub fn clause_pool_size(n: usize) -> u64 {
    let n = n as u64;
    4 * n * n.saturating_sub(1) / 2
}

/// Clause count `r·n`, if it is an integer.
pub fn clause_count(n: usize, r: Ratio<u64>) -> Option<u64> {
    let m = r * Ratio::from_integer(n as u64);
    m.is_integer().then(|| m.to_integer())
}

/// Parses a clause-to-variable ratio written as `4`, `7/2` or `3.5`.
pub fn parse_ratio(text: &str) -> Result<Ratio<u64>, String> {
    let text = text.trim();
    if let Some((int, frac)) = text.split_once('.') {
        let digits = frac.len() as u32;
        if digits > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(format!("bad ratio {text:?}"));
        }
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| format!("bad ratio {text:?}"))?
        };
        let frac_val: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| format!("bad ratio {text:?}"))?
        };
        let den = 10u64.pow(digits);
        return Ok(Ratio::new(int * den + frac_val, den));
    }
    Ratio::from_str(text).map_err(|_| format!("bad ratio {text:?}"))
}

/// The full clause pool in canonical (sorted) order.
fn clause_pool(n: usize) -> Vec<Clause> {
    let mut pool = Vec::with_capacity(clause_pool_size(n) as usize);
    for i in 0..n as u32 {
        for j in i + 1..n as u32 {
            for (ni, nj) in [(false, false), (false, true), (true, false), (true, true)] {
                pool.push(Clause {
                    first: Literal::new(i, ni),
                    second: Literal::new(j, nj),
                });
            }
        }
    }
    pool
}

/// Draws `r·n` distinct clauses uniformly without replacement.
///
/// The stream is `ChaCha8Rng::seed_from_u64(seed)` feeding
/// `rand::seq::index::sample` over the canonical pool order, so a given
/// `(n, r, seed)` gives the same instance on every platform.
pub fn generate(n: usize, r: Ratio<u64>, seed: u64) -> Result<SatInstance, InstanceError> {
    if n < 2 {
        return Err(InstanceError::TooFewVariables(n));
    }
    let m = clause_count(n, r).ok_or_else(|| InstanceError::FractionalClauseCount { n, r: r.to_string() })?;
    let available = clause_pool_size(n);
    if m > available {
        return Err(InstanceError::RatioInfeasible {
            n,
            requested: m,
            available,
        });
    }
    let pool = clause_pool(n);
    let mut rng = rng_from(seed);
    let mut picked: Vec<usize> = index::sample(&mut rng, pool.len(), m as usize).into_vec();
    picked.sort_unstable();
    let clauses = picked.into_iter().map(|i| pool[i]).collect();
    Ok(SatInstance { n, clauses, seed })
}

impl SatInstance {
    /// Builds an instance from explicit clauses, validating and canonicalizing them.
    pub fn from_clauses(n: usize, clauses: Vec<Clause>, seed: u64) -> Result<Self, InstanceError> {
        let mut clauses = clauses;
        for (i, c) in clauses.iter().enumerate() {
            if c.second.var as usize >= n {
                return Err(InstanceError::Invalid(format!(
                    "clause {i} uses variable v{} but n = {n}",
                    c.second.var
                )));
            }
        }
        clauses.sort_unstable();
        if let Some(w) = clauses.windows(2).find(|w| w[0] == w[1]) {
            return Err(InstanceError::Invalid(format!("duplicate clause {}", w[0])));
        }
        Ok(SatInstance { n, clauses, seed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    /// Clause-to-variable ratio `|C|/n`.
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.clauses.len() as u64, self.n as u64)
    }

    pub fn ratio_f64(&self) -> f64 {
        self.clauses.len() as f64 / self.n as f64
    }

    pub fn num_satisfied(&self, basis: u64) -> usize {
        self.clauses.iter().filter(|c| c.satisfied_by(basis)).count()
    }

    pub fn save(&self, path: &Path) -> Result<(), InstanceError> {
        let text = match Format::from_path(path)? {
            Format::Json => self.to_json(),
            Format::Wcnf => self.to_wcnf(),
        };
        fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, InstanceError> {
        let text = fs::read_to_string(path)?;
        match Format::from_path(path)? {
            Format::Json => Self::from_json(&text),
            Format::Wcnf => Self::from_wcnf(&text),
        }
    }

    /// JSON form, one clause per line.
    pub fn to_json(&self) -> String {
        let mut out = format!(
            "{{\n  \"n\": {},\n  \"r\": \"{}\",\n  \"seed\": {},\n  \"clauses\": [",
            self.n,
            self.ratio(),
            self.seed
        );
        for (i, c) in self.clauses.iter().enumerate() {
            out.push_str(if i == 0 { "\n    " } else { ",\n    " });
            out.push_str(&format!(
                "[{}, {}, {}, {}]",
                c.first.var, c.first.negated as u8, c.second.var, c.second.negated as u8
            ));
        }
        if !self.clauses.is_empty() {
            out.push_str("\n  ");
        }
        out.push_str("]\n}\n");
        out
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let file: JsonInstance = serde_json::from_str(text).map_err(|e| InstanceError::Parse {
            line: e.line(),
            reason: e.to_string(),
        })?;
        let mut clauses = Vec::with_capacity(file.clauses.len());
        for (i, raw) in file.clauses.iter().enumerate() {
            let lit = |var: u32, neg: u32| -> Result<Literal, InstanceError> {
                if neg > 1 {
                    return Err(InstanceError::Invalid(format!(
                        "clause {i}: negation flag must be 0 or 1, got {neg}"
                    )));
                }
                if var as usize >= file.n {
                    return Err(InstanceError::Invalid(format!(
                        "clause {i}: variable index {var} out of range for n = {}",
                        file.n
                    )));
                }
                Ok(Literal::new(var, neg == 1))
            };
            let a = lit(raw[0], raw[1])?;
            let b = lit(raw[2], raw[3])?;
            clauses.push(Clause::new(a, b).map_err(|e| InstanceError::Invalid(format!("clause {i}: {e}")))?);
        }
        let inst = SatInstance::from_clauses(file.n, clauses, file.seed)?;
        let r = parse_ratio(&file.r).map_err(InstanceError::Invalid)?;
        if inst.ratio() != r {
            return Err(InstanceError::Invalid(format!(
                "r = {} but {} clauses on {} variables give {}",
                file.r,
                inst.num_clauses(),
                inst.n,
                inst.ratio()
            )));
        }
        Ok(inst)
    }

    /// DIMACS WCNF text: `p wcnf n m` header, then `1 lit lit 0` per clause.
    ///
    /// The seed is not part of this format; loading WCNF gives seed 0.
    pub fn to_wcnf(&self) -> String {
        let mut out = format!("p wcnf {} {}\n", self.n, self.clauses.len());
        let dimacs = |l: Literal| {
            let v = l.var as i64 + 1;
            if l.negated {
                -v
            } else {
                v
            }
        };
        for c in &self.clauses {
            out.push_str(&format!("1 {} {} 0\n", dimacs(c.first), dimacs(c.second)));
        }
        out
    }

    pub fn from_wcnf(text: &str) -> Result<Self, InstanceError> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let parse_err = |reason: String| InstanceError::Parse { line: lineno, reason };
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                if header.is_some() {
                    return Err(parse_err("duplicate header".into()));
                }
                let fields: Vec<&str> = rest.split_whitespace().collect();
                if fields.len() < 3 || fields[0] != "wcnf" {
                    return Err(parse_err(format!("expected `p wcnf n m`, got {line:?}")));
                }
                let n = fields[1]
                    .parse()
                    .map_err(|_| parse_err(format!("bad variable count {:?}", fields[1])))?;
                let m = fields[2]
                    .parse()
                    .map_err(|_| parse_err(format!("bad clause count {:?}", fields[2])))?;
                header = Some((n, m));
                continue;
            }
            let (n, _) = header.ok_or_else(|| parse_err("clause before header".into()))?;
            let nums: Vec<i64> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| parse_err(format!("bad number {t:?}"))))
                .collect::<Result<_, _>>()?;
            if nums.len() != 4 || nums[3] != 0 {
                return Err(parse_err(
                    "expected `weight lit lit 0` for a two-literal clause".into(),
                ));
            }
            if nums[0] != 1 {
                return Err(parse_err(format!("clause weight must be 1, got {}", nums[0])));
            }
            let lit = |v: i64| -> Result<Literal, InstanceError> {
                if v == 0 || v.unsigned_abs() as usize > n {
                    return Err(parse_err(format!("literal {v} out of range for n = {n}")));
                }
                Ok(Literal::new(v.unsigned_abs() as u32 - 1, v < 0))
            };
            let clause = Clause::new(lit(nums[1])?, lit(nums[2])?).map_err(|e| parse_err(e.to_string()))?;
            clauses.push(clause);
        }
        let (n, m) = header.ok_or(InstanceError::Parse {
            line: text.lines().count(),
            reason: "missing `p wcnf` header".into(),
        })?;
        if clauses.len() != m {
            return Err(InstanceError::Invalid(format!(
                "header declares {m} clauses, found {}",
                clauses.len()
            )));
        }
        SatInstance::from_clauses(n, clauses, 0)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonInstance {
    n: usize,
    r: String,
    seed: u64,
    clauses: Vec<[u32; 4]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Wcnf,
}

impl Format {
    pub fn from_path(path: &Path) -> Result<Self, InstanceError> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Ok(Format::Json),
            Some("wcnf") => Ok(Format::Wcnf),
            _ => Err(InstanceError::UnknownFormat(path.display().to_string())),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Wcnf => "wcnf",
        }
    }
}

/// Exhaustive optimum of a MAX-2SAT instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForceResult {
    pub max_satisfied: usize,
    /// Basis indices of every maximizing assignment, ascending.
    pub optimal_assignments: Vec<u64>,
}

impl BruteForceResult {
    pub fn ground_degeneracy(&self) -> usize {
        self.optimal_assignments.len()
    }

    /// Assignment as a bit string, variable `v_0` first.
    pub fn bitstring(basis: u64, n: usize) -> String {
        (0..n)
            .map(|k| if (basis >> k) & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

pub fn brute_force(inst: &SatInstance) -> Result<BruteForceResult, InstanceError> {
    if inst.n > BRUTE_FORCE_MAX_VARS {
        return Err(InstanceError::TooLarge {
            n: inst.n,
            max: BRUTE_FORCE_MAX_VARS,
        });
    }
    let mut best = 0usize;
    let mut optimal = Vec::new();
    for b in 0..(1u64 << inst.n) {
        let s = inst.num_satisfied(b);
        if s > best {
            best = s;
            optimal.clear();
        }
        if s == best {
            optimal.push(b);
        }
    }
    Ok(BruteForceResult {
        max_satisfied: best,
        optimal_assignments: optimal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(var: u32, negated: bool) -> Literal {
        Literal::new(var, negated)
    }

    #[test]
    fn saturated_pool_is_unique() {
        let a = generate(5, Ratio::from_integer(8), 1).unwrap();
        let b = generate(5, Ratio::from_integer(8), 999).unwrap();
        assert_eq!(a.num_clauses(), 40);
        assert_eq!(a.clauses(), b.clauses());
        assert_eq!(a.clauses(), clause_pool(5).as_slice());
    }

    #[test]
    fn two_variables_ratio_two_takes_all_polarities() {
        let inst = generate(2, Ratio::from_integer(2), 3).unwrap();
        let expected: Vec<Clause> = [(false, false), (false, true), (true, false), (true, true)]
            .iter()
            .map(|&(a, b)| Clause::new(lit(0, a), lit(1, b)).unwrap())
            .collect();
        assert_eq!(inst.clauses(), expected.as_slice());
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate(6, Ratio::from_integer(4), 7).unwrap();
        let b = generate(6, Ratio::from_integer(4), 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
        let c = generate(6, Ratio::from_integer(4), 8).unwrap();
        assert_ne!(a.clauses(), c.clauses());
    }

    #[test]
    fn infeasible_ratio_rejected() {
        match generate(5, Ratio::from_integer(9), 0) {
            Err(InstanceError::RatioInfeasible {
                requested, available, ..
            }) => {
                assert_eq!(requested, 45);
                assert_eq!(available, 40);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            generate(5, Ratio::new(1, 2), 0),
            Err(InstanceError::FractionalClauseCount { .. })
        ));
    }

    #[test]
    fn single_clause_brute_force() {
        let c = Clause::new(lit(0, false), lit(1, false)).unwrap();
        let inst = SatInstance::from_clauses(2, vec![c], 0).unwrap();
        let bf = brute_force(&inst).unwrap();
        assert_eq!(bf.max_satisfied, 1);
        assert_eq!(bf.ground_degeneracy(), 3);
        assert_eq!(bf.optimal_assignments, vec![1, 2, 3]);
    }

    #[test]
    fn empty_instance_is_fully_degenerate() {
        let inst = SatInstance::from_clauses(3, vec![], 0).unwrap();
        let bf = brute_force(&inst).unwrap();
        assert_eq!(bf.max_satisfied, 0);
        assert_eq!(bf.ground_degeneracy(), 8);
    }

    #[test]
    fn saturated_five_variable_optimum() {
        // Every assignment falsifies exactly one polarity pattern per
        // variable pair, so 10 of the 40 clauses are always violated.
        let inst = generate(5, Ratio::from_integer(8), 0).unwrap();
        for b in 0..32 {
            assert_eq!(inst.num_satisfied(b), 30);
        }
        let bf = brute_force(&inst).unwrap();
        assert_eq!(bf.max_satisfied, 30);
        assert_eq!(bf.ground_degeneracy(), 32);
    }

    #[test]
    fn brute_force_scale_guard() {
        let inst = SatInstance::from_clauses(21, vec![], 0).unwrap();
        assert!(matches!(brute_force(&inst), Err(InstanceError::TooLarge { .. })));
    }

    #[test]
    fn json_round_trip() {
        let inst = generate(6, Ratio::new(7, 2), 11).unwrap();
        let back = SatInstance::from_json(&inst.to_json()).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn wcnf_round_trip_drops_seed() {
        let inst = generate(6, Ratio::from_integer(4), 5).unwrap();
        let back = SatInstance::from_wcnf(&inst.to_wcnf()).unwrap();
        assert_eq!(back.clauses(), inst.clauses());
        assert_eq!(back.seed(), 0);
        assert!(inst.to_wcnf().starts_with("p wcnf 6 24\n"));
    }

    #[test]
    fn json_rejects_out_of_range_variable() {
        let text = r#"{"n": 3, "r": "1/3", "seed": 0, "clauses": [[0, 0, 3, 1]]}"#;
        let err = SatInstance::from_json(text).unwrap_err();
        assert!(err.to_string().contains("out of range"), "{err}");
    }

    #[test]
    fn json_rejects_repeated_variable() {
        let text = r#"{"n": 3, "r": "1/3", "seed": 0, "clauses": [[1, 0, 1, 1]]}"#;
        let err = SatInstance::from_json(text).unwrap_err();
        assert!(err.to_string().contains("repeats variable"), "{err}");
    }

    #[test]
    fn json_syntax_error_reports_line() {
        let text = "{\n  \"n\": 3,\n  \"r\": \"1\",\n  oops\n}";
        match SatInstance::from_json(text) {
            Err(InstanceError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wcnf_errors_report_line() {
        let text = "c comment\np wcnf 3 2\n1 1 -2 0\n1 2 -2 0\n";
        match SatInstance::from_wcnf(text) {
            Err(InstanceError::Parse { line, reason }) => {
                assert_eq!(line, 4);
                assert!(reason.contains("repeats variable"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = "p wcnf 3 1\n1 1 4 0\n";
        assert!(matches!(
            SatInstance::from_wcnf(text),
            Err(InstanceError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn ratio_parsing() {
        assert_eq!(parse_ratio("4").unwrap(), Ratio::from_integer(4));
        assert_eq!(parse_ratio("7/2").unwrap(), Ratio::new(7, 2));
        assert_eq!(parse_ratio("3.5").unwrap(), Ratio::new(7, 2));
        assert!(parse_ratio("x").is_err());
    }

    #[test]
    fn duplicate_clauses_rejected() {
        let c = Clause::new(lit(0, false), lit(1, true)).unwrap();
        assert!(SatInstance::from_clauses(2, vec![c, c], 0).is_err());
    }
}
