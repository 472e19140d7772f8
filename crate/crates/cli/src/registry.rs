use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::config::resolve;
use crate::error::LabError;
use crate::experiments::*;
use crate::report::Report;

pub struct Ctx {
    pub seed: u64,
}

pub trait Experiment {
    type Params: Serialize + DeserializeOwned + Default;
    const NAME: &'static str;
    const ABOUT: &'static str;
    fn run(p: &Self::Params, ctx: &Ctx) -> Result<Report, LabError>;
}

pub struct Entry {
    pub name: &'static str,
    pub about: &'static str,
    pub defaults: fn() -> Value,
    /// Validates `params`; the returned closure performs the computation.
    pub prepare: fn(&Value) -> Result<Prepared, LabError>,
}

pub type RunFn = Box<dyn FnOnce(&Ctx) -> Result<Report, LabError>>;

pub struct Prepared {
    pub resolved: Value,
    pub run: RunFn,
}

fn defaults<E: Experiment>() -> Value {
    serde_json::to_value(E::Params::default()).expect("defaults serialize")
}

fn prepare<E: Experiment + 'static>(params: &Value) -> Result<Prepared, LabError>
where
    E::Params: 'static,
{
    let (p, resolved) = resolve::<E::Params>(params)?;
    Ok(Prepared {
        resolved,
        run: Box::new(move |ctx| E::run(&p, ctx)),
    })
}

fn entry<E: Experiment + 'static>() -> Entry {
    Entry {
        name: E::NAME,
        about: E::ABOUT,
        defaults: defaults::<E>,
        prepare: prepare::<E>,
    }
}

pub fn registry() -> Vec<Entry> {
    vec![
        entry::<FolnerDensity>(),
        entry::<ConcentrationFg>(),
        entry::<ConcentrationGeneralRestricted>(),
        entry::<AperiodicityLiouville>(),
        entry::<GowersOracle>(),
        entry::<MixedSeminormLadder>(),
        entry::<InverseDiagnostic>(),
        entry::<Decompose>(),
        entry::<MainALinear>(),
        entry::<MainBRational>(),
        entry::<RecurrenceProfileExp>(),
        entry::<CounterexampleDilation>(),
        entry::<CounterexampleArchimedean>(),
        entry::<OmegaUniformity>(),
        entry::<Digits>(),
        entry::<QuadEquationExp>(),
        entry::<ChuInequality>(),
        entry::<LatticeIdentity>(),
        entry::<KataiDiagnostic>(),
    ]
}

pub fn lookup(name: &str) -> Result<Entry, LabError> {
    let reg = registry();
    let names: Vec<&str> = reg.iter().map(|e| e.name).collect();
    let available = names.join(", ");
    reg.into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| LabError::UnknownExperiment {
            name: name.to_string(),
            available,
        })
}
