//! Named strategy tables for runtime selection of the approximation scheme.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::approx::{
    ApproximationScheme, CoefficientApproximator, ConstantShiftPerturbation, MeanApproximator, NoPerturbation,
    PerturbationGenerator, PolygonalApproximator, SawtoothPerturbation,
};
use crate::error::{Error, Result};
use crate::stieltjes::{MeasureDiscretizer, MidpointDiscretizer, RightEndpointDiscretizer};

/// Name → strategy map with a designated default.
#[derive(Debug, Clone)]
pub struct Registry<T: ?Sized> {
    kind: &'static str,
    default: &'static str,
    entries: BTreeMap<&'static str, Arc<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str, default: &'static str) -> Self {
        Self {
            kind,
            default,
            entries: BTreeMap::new(),
        }
    }

    /// Adds or replaces the strategy registered under `name`.
    pub fn register(&mut self, name: &'static str, strategy: Arc<T>) -> &mut Self {
        self.entries.insert(name, strategy);
        self
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }

    pub fn default_name(&self) -> &'static str {
        self.default
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries.get(name).cloned().ok_or_else(|| Error::UnknownStrategy {
            kind: self.kind,
            name: name.to_string(),
            available: self.names().collect::<Vec<_>>().join(", "),
        })
    }

    pub fn get_or_default(&self, name: Option<&str>) -> Result<Arc<T>> {
        self.get(name.unwrap_or(self.default))
    }
}

pub fn discretizers() -> Registry<dyn MeasureDiscretizer> {
    let mut r: Registry<dyn MeasureDiscretizer> = Registry::new("measure discretizer", "midpoint");
    r.register("midpoint", Arc::new(MidpointDiscretizer))
        .register("right-endpoint", Arc::new(RightEndpointDiscretizer));
    r
}

pub fn coefficient_approximators() -> Registry<dyn CoefficientApproximator> {
    let mut r: Registry<dyn CoefficientApproximator> = Registry::new("coefficient approximator", "mean");
    r.register("mean", Arc::new(MeanApproximator))
        .register("polygonal", Arc::new(PolygonalApproximator));
    r
}

pub fn perturbations() -> Registry<dyn PerturbationGenerator> {
    let mut r: Registry<dyn PerturbationGenerator> = Registry::new("perturbation", "sawtooth");
    r.register("sawtooth", Arc::new(SawtoothPerturbation))
        .register("constant-shift", Arc::new(ConstantShiftPerturbation))
        .register("none", Arc::new(NoPerturbation));
    r
}

/// Scheme from optional strategy names; `None` selects the defaults.
pub fn scheme(discretizer: Option<&str>, coefficients: Option<&str>) -> Result<ApproximationScheme> {
    Ok(ApproximationScheme {
        discretizer: discretizers().get_or_default(discretizer)?,
        coefficients: coefficient_approximators().get_or_default(coefficients)?,
    })
}
