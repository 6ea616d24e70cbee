//! Constraint-consistency analysis for Hamiltonian systems presented as a
//! base Hamiltonian plus primary constraints.
//!
//! The algorithm evolves each constraint with the total Hamiltonian and
//! demands the bracket vanish on the constraint surface. Each consistency
//! condition either vanishes, produces a new (secondary) constraint, or fixes
//! a Lagrange multiplier. The finished chain yields the mutual-bracket matrix
//! C, a first/second-class classification, and the modified bracket
//! {f,g}* = {f,g} - {f,phi_i}(C^-1)_ij {phi_j,g} under which all second-class
//! constraints become Casimirs.
//!
//! "Vanishes on the surface" is decided by exact zero or by numeric sampling
//! of on-surface points (a heuristic that is sound for the low-degree systems
//! handled here; the report flags it as such).

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chart::Var;
use crate::rational::{
    poisson_bracket, CompiledObservable, PhasePoint4, RationalObservable,
};

/// Absolute tolerance for the sampled on-surface vanishing test.
pub const SURFACE_VANISH_TOL: f64 = 1e-9;
/// Residual tolerance the sampler drives every constraint below.
pub const SAMPLER_RESIDUAL_TOL: f64 = 1e-12;
/// Maximum secondary-constraint generation depth.
pub const MAX_CHAIN_DEPTH: u32 = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("constraint chain exceeded depth {0} without terminating")]
    NonTerminating(u32),
    #[error("undetermined consistency condition: {0}")]
    UndeterminedSystem(String),
    #[error("constraint matrix is singular as a rational-function matrix")]
    SingularCMatrix,
    #[error("surface sampler could not produce the requested points")]
    SamplerExhausted,
    #[error("no primary constraints supplied")]
    NoPrimaries,
}

/// Where a constraint arose in the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Primary,
    /// Secondary of the given generation (1 = produced by a primary).
    Secondary(u32),
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Primary => f.write_str("primary"),
            Stage::Secondary(k) => write!(f, "secondary({k})"),
        }
    }
}

/// A phase-space constraint with its provenance.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub label: String,
    pub stage: Stage,
    pub expression: RationalObservable,
}

impl Constraint {
    /// A constraint expression must not be identically zero.
    pub fn new(
        label: impl Into<String>,
        stage: Stage,
        expression: RationalObservable,
    ) -> Option<Self> {
        if expression.is_zero() {
            return None;
        }
        Some(Constraint {
            label: label.into(),
            stage,
            expression,
        })
    }

    pub fn primary(label: impl Into<String>, expression: RationalObservable) -> Option<Self> {
        Constraint::new(label, Stage::Primary, expression)
    }
}

/// Base Hamiltonian plus one multiplier term per primary constraint.
#[derive(Debug, Clone)]
pub struct TotalHamiltonian {
    pub base: RationalObservable,
    pub multiplier_terms: Vec<(Constraint, String)>,
}

impl TotalHamiltonian {
    pub fn new(base: RationalObservable, primaries: &[Constraint]) -> Self {
        let multiplier_terms = primaries
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), multiplier_symbol(c, i)))
            .collect();
        TotalHamiltonian {
            base,
            multiplier_terms,
        }
    }
}

/// Multiplier names follow the degenerate velocity they stand in for: a bare
/// momentum constraint p_i gets "v_i"; anything else is numbered by position.
fn multiplier_symbol(c: &Constraint, position: usize) -> String {
    let expr = &c.expression;
    if expr.is_polynomial() && expr.numerator().num_terms() == 1 {
        if let Some((mono, _)) = expr.numerator().terms().next() {
            if mono.total_degree() == 1 {
                if mono.exponent(Var::P1) == 1 {
                    return "v1".to_string();
                }
                if mono.exponent(Var::P2) == 1 {
                    return "v2".to_string();
                }
            }
        }
    }
    format!("v{}", position + 1)
}

/// Antisymmetric matrix of mutual Poisson brackets C_ij = {phi_i, phi_j}.
#[derive(Debug, Clone)]
pub struct ConstraintMatrix {
    entries: Vec<Vec<RationalObservable>>,
}

impl ConstraintMatrix {
    pub fn from_constraints(constraints: &[Constraint]) -> Self {
        let n = constraints.len();
        let mut entries = vec![vec![RationalObservable::zero(); n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let b = poisson_bracket(
                    &constraints[i].expression,
                    &constraints[j].expression,
                );
                entries[j][i] = -&b;
                entries[i][j] = b;
            }
        }
        ConstraintMatrix { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &RationalObservable {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<RationalObservable>] {
        &self.entries
    }

    /// Exact antisymmetry check: C_ij + C_ji = 0 for all pairs.
    pub fn is_antisymmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| (&self.entries[i][j] + &self.entries[j][i]).is_zero())
        })
    }
}

/// What happened to one consistency condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Disposition {
    VanishesOnSurface,
    NewConstraint { label: String },
    FixesMultiplier { symbol: String },
}

impl fmt::Display for Disposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Disposition::VanishesOnSurface => f.write_str("vanishes on surface"),
            Disposition::NewConstraint { label } => write!(f, "new constraint {label}"),
            Disposition::FixesMultiplier { symbol } => write!(f, "fixes multiplier {symbol}"),
        }
    }
}

/// One evolved-constraint step of the chain.
#[derive(Debug, Clone)]
pub struct ConsistencyStep {
    pub constraint: String,
    /// The bracket with the total Hamiltonian, rendered with any still-unknown
    /// multiplier symbols in place.
    pub bracket: String,
    pub disposition: Disposition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    FirstClass,
    SecondClass,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::FirstClass => f.write_str("first-class"),
            Classification::SecondClass => f.write_str("second-class"),
        }
    }
}

/// Full record of a finished constraint analysis.
#[derive(Debug, Clone)]
pub struct ConstraintChainReport {
    pub constraints: Vec<Constraint>,
    pub consistency_log: Vec<ConsistencyStep>,
    pub multipliers: BTreeMap<String, RationalObservable>,
    pub c_matrix: ConstraintMatrix,
    pub classification: Vec<Classification>,
}

impl ConstraintChainReport {
    pub fn all_second_class(&self) -> bool {
        self.classification
            .iter()
            .all(|c| *c == Classification::SecondClass)
    }

    pub fn find(&self, label: &str) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.label == label)
    }

    pub fn to_doc(&self) -> ReportDoc {
        ReportDoc {
            constraints: self
                .constraints
                .iter()
                .map(|c| ConstraintDoc {
                    label: c.label.clone(),
                    stage: c.stage.to_string(),
                    expression: c.expression.to_string(),
                })
                .collect(),
            c_matrix: self
                .c_matrix
                .rows()
                .iter()
                .map(|row| row.iter().map(|e| e.to_string()).collect())
                .collect(),
            multipliers: self
                .multipliers
                .iter()
                .map(|(k, v)| (k.clone(), v.to_string()))
                .collect(),
            classification: self.classification.iter().map(|c| c.to_string()).collect(),
            consistency_log: self
                .consistency_log
                .iter()
                .map(|s| StepDoc {
                    constraint: s.constraint.clone(),
                    bracket: s.bracket.clone(),
                    disposition: s.disposition.to_string(),
                })
                .collect(),
            surface_test: "numeric sampling (heuristic), exact zeros short-circuit".to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("report serialization")
    }
}

/// Serializable mirror of the report, all expressions rendered as text.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ReportDoc {
    pub constraints: Vec<ConstraintDoc>,
    pub c_matrix: Vec<Vec<String>>,
    pub multipliers: BTreeMap<String, String>,
    pub classification: Vec<String>,
    pub consistency_log: Vec<StepDoc>,
    pub surface_test: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ConstraintDoc {
    pub label: String,
    pub stage: String,
    pub expression: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct StepDoc {
    pub constraint: String,
    pub bracket: String,
    pub disposition: String,
}

/// Draws random points on the surface cut out by a constraint set, keeping
/// clear of the excluded line q2 = 0. Each call reseeds, so identical inputs
/// give identical points.
#[derive(Debug, Clone)]
pub struct SurfaceSampler {
    pub r: f64,
    pub seed: u64,
    pub count: usize,
}

impl SurfaceSampler {
    pub fn new(r: f64, seed: u64, count: usize) -> Self {
        SurfaceSampler { r, seed, count }
    }

    /// Project random starts onto the constraint surface by Gauss-Newton
    /// iteration until every |phi_i| < 1e-12 (the iteration drives them to
    /// ~1e-13 for margin).
    pub fn sample(
        &self,
        constraints: &[Constraint],
        n: usize,
    ) -> Result<Vec<PhasePoint4>, EngineError> {
        let n = n.max(1);
        let scale = self.r.abs().max(1.0);
        let exprs: Vec<CompiledObservable> = constraints
            .iter()
            .map(|c| c.expression.compile(self.r))
            .collect();
        let jacobians: Vec<[CompiledObservable; 4]> = constraints
            .iter()
            .map(|c| {
                [
                    c.expression.differentiate(Var::Q1).compile(self.r),
                    c.expression.differentiate(Var::Q2).compile(self.r),
                    c.expression.differentiate(Var::P1).compile(self.r),
                    c.expression.differentiate(Var::P2).compile(self.r),
                ]
            })
            .collect();

        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut points = Vec::with_capacity(n);
        let max_attempts = 500 * n;
        for _ in 0..max_attempts {
            if points.len() >= n {
                break;
            }
            let start: PhasePoint4 =
                std::array::from_fn(|_| rng.random_range(-1.5 * scale..1.5 * scale));
            if start[1].abs() < 0.1 * scale {
                continue;
            }
            if let Some(x) = project_onto_surface(&exprs, &jacobians, start) {
                let bounded = x.iter().all(|c| c.abs() <= 10.0 * scale);
                if x[1].abs() >= 0.05 * scale && bounded {
                    points.push(x);
                }
            }
        }
        if points.len() < n {
            return Err(EngineError::SamplerExhausted);
        }
        Ok(points)
    }
}

fn project_onto_surface(
    exprs: &[CompiledObservable],
    jacobians: &[[CompiledObservable; 4]],
    mut x: PhasePoint4,
) -> Option<PhasePoint4> {
    let m = exprs.len();
    if m == 0 {
        return Some(x);
    }
    for _ in 0..60 {
        let mut residual = DVector::zeros(m);
        for (i, e) in exprs.iter().enumerate() {
            residual[i] = e.eval(&x)?;
        }
        if residual.amax() < SAMPLER_RESIDUAL_TOL * 0.1 {
            return Some(x);
        }
        let mut jac = DMatrix::zeros(m, 4);
        for i in 0..m {
            for k in 0..4 {
                jac[(i, k)] = jacobians[i][k].eval(&x)?;
            }
        }
        let normal = &jac * jac.transpose();
        let coeffs = normal.lu().solve(&residual)?;
        let step = jac.transpose() * coeffs;
        for k in 0..4 {
            x[k] -= step[k];
            if !x[k].is_finite() {
                return None;
            }
        }
    }
    None
}

/// True iff `f` vanishes on the surface of the given constraints: exactly
/// zero, or below 1e-9 at every sampled on-surface point (at least 20).
pub fn vanishes_on_surface(
    f: &RationalObservable,
    constraints: &[Constraint],
    sampler: &SurfaceSampler,
) -> Result<bool, EngineError> {
    if f.is_zero() {
        return Ok(true);
    }
    let points = sampler.sample(constraints, sampler.count.max(20))?;
    let compiled = f.compile(sampler.r);
    for p in &points {
        match compiled.eval(p) {
            Some(v) if v.abs() < SURFACE_VANISH_TOL => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// Run the constraint-consistency algorithm.
///
/// `h` is the base Hamiltonian (multiplier terms are added internally, one
/// unknown per primary). Returns the full chain report; see [`EngineError`]
/// for the failure modes.
pub fn run_dirac_algorithm(
    h: &RationalObservable,
    primaries: &[Constraint],
    sampler: &SurfaceSampler,
) -> Result<ConstraintChainReport, EngineError> {
    if primaries.is_empty() {
        return Err(EngineError::NoPrimaries);
    }
    let total = TotalHamiltonian::new(h.clone(), primaries);
    let mut constraints: Vec<Constraint> = primaries.to_vec();
    let mut log: Vec<ConsistencyStep> = Vec::new();
    let mut multipliers: BTreeMap<String, RationalObservable> = BTreeMap::new();

    // Constraints are processed in discovery order; additions extend the list.
    let mut next = 0usize;
    while next < constraints.len() {
        let phi = constraints[next].clone();
        next += 1;

        let stage_level = match phi.stage {
            Stage::Primary => 0,
            Stage::Secondary(k) => k,
        };
        if stage_level >= MAX_CHAIN_DEPTH {
            return Err(EngineError::NonTerminating(MAX_CHAIN_DEPTH));
        }

        // {phi, H_T} = {phi, H} + sum_i {phi, phi_i} v_i
        let mut free_part = poisson_bracket(&phi.expression, &total.base);
        let mut unknowns: Vec<(String, RationalObservable)> = Vec::new();
        for (primary, symbol) in &total.multiplier_terms {
            let coeff = poisson_bracket(&phi.expression, &primary.expression);
            if coeff.is_zero() {
                continue;
            }
            if let Some(solution) = multipliers.get(symbol) {
                free_part = &free_part + &(&coeff * solution);
            } else if vanishes_on_surface(&coeff, &constraints, sampler)? {
                // Coefficient dies on the surface; it cannot fix this
                // multiplier and contributes nothing to the condition there.
            } else {
                unknowns.push((symbol.clone(), coeff));
            }
        }

        let bracket_text = render_condition(&free_part, &unknowns);

        match unknowns.len() {
            0 => {
                if vanishes_on_surface(&free_part, &constraints, sampler)? {
                    log.push(ConsistencyStep {
                        constraint: phi.label.clone(),
                        bracket: bracket_text,
                        disposition: Disposition::VanishesOnSurface,
                    });
                } else if free_part.numerator().is_constant() {
                    // A nonzero constant can never vanish: the demand is
                    // inconsistent rather than a new constraint.
                    return Err(EngineError::UndeterminedSystem(format!(
                        "consistency of {} demands {} = 0",
                        phi.label, bracket_text
                    )));
                } else {
                    let expr = normalize_constraint(&free_part);
                    let label = next_label(&constraints);
                    let secondary = Constraint {
                        label: label.clone(),
                        stage: Stage::Secondary(stage_level + 1),
                        expression: expr,
                    };
                    constraints.push(secondary);
                    log.push(ConsistencyStep {
                        constraint: phi.label.clone(),
                        bracket: bracket_text,
                        disposition: Disposition::NewConstraint { label },
                    });
                }
            }
            1 => {
                let (symbol, coeff) = unknowns.into_iter().next().unwrap();
                // a*v + b = 0 with a nonvanishing on the surface: v = -b/a.
                let solution = (-&free_part)
                    .div(&coeff)
                    .map_err(|_| EngineError::UndeterminedSystem(format!(
                        "vanishing multiplier coefficient for {symbol}"
                    )))?;
                multipliers.insert(symbol.clone(), solution);
                log.push(ConsistencyStep {
                    constraint: phi.label.clone(),
                    bracket: bracket_text,
                    disposition: Disposition::FixesMultiplier { symbol },
                });
            }
            _ => {
                return Err(EngineError::UndeterminedSystem(format!(
                    "consistency of {} couples several undetermined multipliers: {}",
                    phi.label, bracket_text
                )));
            }
        }
    }

    let c_matrix = ConstraintMatrix::from_constraints(&constraints);
    debug_assert!(c_matrix.is_antisymmetric());
    let mut classification = Vec::with_capacity(constraints.len());
    for i in 0..constraints.len() {
        let mut first_class = true;
        for j in 0..constraints.len() {
            if !vanishes_on_surface(c_matrix.entry(i, j), &constraints, sampler)? {
                first_class = false;
                break;
            }
        }
        classification.push(if first_class {
            Classification::FirstClass
        } else {
            Classification::SecondClass
        });
    }

    Ok(ConstraintChainReport {
        constraints,
        consistency_log: log,
        multipliers,
        c_matrix,
        classification,
    })
}

/// Secondary constraints are stored as the computed consistency bracket's
/// numerator, sign-normalized so the leading coefficient is positive.
fn normalize_constraint(f: &RationalObservable) -> RationalObservable {
    use num_traits::Signed;
    let mut num = f.numerator().clone();
    if num.leading_coefficient().is_negative() {
        num = -num;
    }
    RationalObservable::from_poly(num)
}

/// Continue the label family of the newest constraint: "phi1" -> "phi2",
/// "chi1" -> "chi2"; anything unrecognized falls back to "phi{n}".
fn next_label(constraints: &[Constraint]) -> String {
    let k = constraints.len() + 1;
    let stem = constraints
        .last()
        .map(|c| c.label.trim_end_matches(|ch: char| ch.is_ascii_digit()))
        .filter(|s| !s.is_empty())
        .unwrap_or("phi");
    format!("{stem}{k}")
}

fn render_condition(
    free_part: &RationalObservable,
    unknowns: &[(String, RationalObservable)],
) -> String {
    let mut pieces = Vec::new();
    if !free_part.is_zero() {
        pieces.push(free_part.to_string());
    }
    for (symbol, coeff) in unknowns {
        if coeff.is_polynomial() && coeff.numerator().num_terms() == 1 {
            pieces.push(format!("{coeff}*{symbol}"));
        } else {
            pieces.push(format!("({coeff})*{symbol}"));
        }
    }
    if pieces.is_empty() {
        "0".to_string()
    } else {
        pieces.join(" + ")
    }
}

/// Exact inverse of a matrix of rational functions by Gauss-Jordan
/// elimination. Fails with [`EngineError::SingularCMatrix`] when the
/// determinant is the zero rational function.
pub fn invert_c_matrix(
    c: &ConstraintMatrix,
) -> Result<Vec<Vec<RationalObservable>>, EngineError> {
    let n = c.dim();
    let mut a: Vec<Vec<RationalObservable>> = c.rows().to_vec();
    let mut inv: Vec<Vec<RationalObservable>> =
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            RationalObservable::one()
                        } else {
                            RationalObservable::zero()
                        }
                    })
                    .collect()
            })
            .collect();

    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(EngineError::SingularCMatrix)?;
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);

        let pivot = a[col][col].clone();
        for j in 0..n {
            a[col][j] = a[col][j].div(&pivot).expect("nonzero pivot");
            inv[col][j] = inv[col][j].div(&pivot).expect("nonzero pivot");
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in 0..n {
                a[r][j] = &a[r][j] - &(&factor * &a[col][j]);
                inv[r][j] = &inv[r][j] - &(&factor * &inv[col][j]);
            }
        }
    }
    Ok(inv)
}

/// The modified bracket {f,g} - {f,phi_i}(C^-1)_ij {phi_j,g}, exact.
///
/// With an empty constraint list this reduces to the Poisson bracket.
pub fn dirac_bracket(
    f: &RationalObservable,
    g: &RationalObservable,
    report: &ConstraintChainReport,
) -> Result<RationalObservable, EngineError> {
    let n = report.constraints.len();
    if n == 0 {
        return Ok(poisson_bracket(f, g));
    }
    let inv = invert_c_matrix(&report.c_matrix)?;
    let f_brackets: Vec<RationalObservable> = report
        .constraints
        .iter()
        .map(|c| poisson_bracket(f, &c.expression))
        .collect();
    let g_brackets: Vec<RationalObservable> = report
        .constraints
        .iter()
        .map(|c| poisson_bracket(&c.expression, g))
        .collect();

    let mut out = poisson_bracket(f, g);
    for i in 0..n {
        if f_brackets[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if inv[i][j].is_zero() || g_brackets[j].is_zero() {
                continue;
            }
            out = &out - &(&(&f_brackets[i] * &inv[i][j]) * &g_brackets[j]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Var::*;
    use crate::poly::{coeff_int, Polynomial as P};

    fn p2_constraint() -> Constraint {
        Constraint::primary("phi1", RationalObservable::var(P2)).unwrap()
    }

    fn sphere_poly() -> P {
        // q1^2 + q2^2 + p1^2 - R^2 (the computed secondary for model A)
        &(&(&P::var_pow(Q1, 2) + &P::var_pow(Q2, 2)) + &P::var_pow(P1, 2)) - &P::var_pow(R, 2)
    }

    fn sampler() -> SurfaceSampler {
        SurfaceSampler::new(2.0, 42, 20)
    }

    #[test]
    fn sampler_hits_the_surface() {
        let constraints = vec![
            p2_constraint(),
            Constraint::new(
                "phi2",
                Stage::Secondary(1),
                RationalObservable::from_poly(sphere_poly()),
            )
            .unwrap(),
        ];
        let pts = sampler().sample(&constraints, 25).unwrap();
        assert_eq!(pts.len(), 25);
        for p in pts {
            assert!(p[3].abs() < 1e-12);
            let phi2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2] - 4.0;
            assert!(phi2.abs() < 1e-12, "off surface: {phi2}");
            assert!(p[1].abs() >= 0.05 * 2.0);
        }
    }

    #[test]
    fn vanishing_test_examples() {
        let constraints = vec![
            p2_constraint(),
            Constraint::new(
                "phi2",
                Stage::Secondary(1),
                RationalObservable::from_poly(sphere_poly()),
            )
            .unwrap(),
        ];
        let s = sampler();

        // A member of the set vanishes.
        let phi2 = RationalObservable::from_poly(sphere_poly());
        assert!(vanishes_on_surface(&phi2, &constraints, &s).unwrap());

        // Adding p2^2 changes nothing on p2 = 0.
        let with_p2sq =
            RationalObservable::from_poly(&sphere_poly() + &P::var_pow(P2, 2));
        assert!(vanishes_on_surface(&with_p2sq, &constraints, &s).unwrap());

        // q1 is free on the sphere.
        let q1 = RationalObservable::var(Q1);
        assert!(!vanishes_on_surface(&q1, &constraints, &s).unwrap());
    }

    #[test]
    fn free_hamiltonian_chain_stops_at_first_class_primary() {
        // H = p1^2 commutes with p2: no secondaries, no multiplier fixed.
        let h = RationalObservable::from_poly(P::var_pow(P1, 2));
        let report = run_dirac_algorithm(&h, &[p2_constraint()], &sampler()).unwrap();
        assert_eq!(report.constraints.len(), 1);
        assert_eq!(report.classification, vec![Classification::FirstClass]);
        assert!(report.multipliers.is_empty());
        assert_eq!(
            report.consistency_log[0].disposition,
            Disposition::VanishesOnSurface
        );
    }

    #[test]
    fn invert_2x2_antisymmetric() {
        // [[0, -d], [d, 0]]^-1 = [[0, 1/d], [-1/d, 0]] with d = -2*q2
        let d = RationalObservable::from_poly(P::monomial(coeff_int(-2), [0, 1, 0, 0, 0]));
        let constraints = vec![
            p2_constraint(),
            Constraint::new(
                "phi2",
                Stage::Secondary(1),
                RationalObservable::from_poly(sphere_poly()),
            )
            .unwrap(),
        ];
        let c = ConstraintMatrix::from_constraints(&constraints);
        assert_eq!(c.entry(0, 1), &d);
        let inv = invert_c_matrix(&c).unwrap();
        // inverse of [[0, d], [-d, 0]] is [[0, -1/d], [1/d, 0]]
        let minus_inv_d = (-&RationalObservable::one()).div(&d).unwrap();
        assert_eq!(inv[0][1].to_string(), "1/(2*q2)");
        assert_eq!(&inv[0][1], &minus_inv_d);
        assert_eq!(inv[1][0], -&minus_inv_d);
        assert!(inv[0][0].is_zero() && inv[1][1].is_zero());
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let constraints = vec![p2_constraint()];
        let c = ConstraintMatrix::from_constraints(&constraints);
        assert_eq!(invert_c_matrix(&c), Err(EngineError::SingularCMatrix));
    }
}
