//! The canonical phase-space chart: two coordinate/momentum pairs plus the
//! radius parameter carried as a formal symbol.

use std::fmt;

/// A formal variable of the symbolic layer.
///
/// `Q1, Q2, P1, P2` are the canonical phase-space variables; `R` is the
/// constraint-radius parameter, which stays symbolic until a numeric value is
/// substituted at evaluation time.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    Q1,
    Q2,
    P1,
    P2,
    R,
}

impl Var {
    /// All formal variables, in storage order.
    pub const ALL: [Var; 5] = [Var::Q1, Var::Q2, Var::P1, Var::P2, Var::R];

    /// Index into exponent tuples.
    pub fn index(self) -> usize {
        match self {
            Var::Q1 => 0,
            Var::Q2 => 1,
            Var::P1 => 2,
            Var::P2 => 3,
            Var::R => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::Q1 => "q1",
            Var::Q2 => "q2",
            Var::P1 => "p1",
            Var::P2 => "p2",
            Var::R => "R",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The ordered chart (q1, q2, p1, p2) with its conjugacy pairing.
///
/// There is exactly one chart in this toolkit; the type exists to carry the
/// pairing used by the Poisson bracket and by evaluation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CanonicalChart;

impl CanonicalChart {
    pub fn standard() -> Self {
        CanonicalChart
    }

    /// Phase-space variables in chart order.
    pub fn variables(&self) -> [Var; 4] {
        [Var::Q1, Var::Q2, Var::P1, Var::P2]
    }

    /// Conjugate pairs (qi, pi).
    pub fn pairs(&self) -> [(Var, Var); 2] {
        [(Var::Q1, Var::P1), (Var::Q2, Var::P2)]
    }

    /// The conjugate partner of a phase-space variable; `None` for `R`.
    pub fn conjugate(&self, v: Var) -> Option<Var> {
        match v {
            Var::Q1 => Some(Var::P1),
            Var::P1 => Some(Var::Q1),
            Var::Q2 => Some(Var::P2),
            Var::P2 => Some(Var::Q2),
            Var::R => None,
        }
    }
}

impl Default for CanonicalChart {
    fn default() -> Self {
        Self::standard()
    }
}
