mod arith;
mod concentration;
mod recurrence;
mod structural;
mod uniform;

pub use arith::{AperiodicityLiouville, FolnerDensity, KataiDiagnostic};
pub use concentration::{ConcentrationFg, ConcentrationGeneralRestricted, CounterexampleArchimedean, Decompose};
pub use recurrence::{CounterexampleDilation, MainALinear, MainBRational, RecurrenceProfileExp};
pub use structural::{ChuInequality, LatticeIdentity, QuadEquationExp};
pub use uniform::{Digits, GowersOracle, InverseDiagnostic, MixedSeminormLadder, OmegaUniformity};

use multact_core::actions::ActionDesc;
use multact_core::linforms::{LinearForm, RationalPolynomialFL};
use multact_core::multfn::MultiplicativeFunctionSpec as S;

use crate::error::LabError;

pub(crate) fn rotation(function: S) -> ActionDesc {
    ActionDesc::RotationBy { function }
}

pub(crate) fn liouville_rotation() -> ActionDesc {
    rotation(S::Liouville)
}

pub(crate) fn chi3_rotation() -> ActionDesc {
    rotation(S::ModifiedDirichletCharacter { q: 3, index: 1 })
}

pub(crate) fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

pub(crate) fn forms(v: &[String]) -> Result<Vec<LinearForm>, LabError> {
    v.iter()
        .map(|s| s.parse().map_err(|e| LabError::Schema(format!("form `{s}`: {e}"))))
        .collect()
}

pub(crate) fn rational_polys(v: &[String]) -> Result<Vec<RationalPolynomialFL>, LabError> {
    v.iter()
        .map(|s| RationalPolynomialFL::parse(s).map_err(|e| LabError::Schema(format!("`{s}`: {e}"))))
        .collect()
}

/// Whether no step rises by more than `slack`.
pub(crate) fn nonincreasing(v: &[f64], slack: f64) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] + slack)
}
