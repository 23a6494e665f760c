use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::boosting::BoostParams;
use crate::data::{
    load_csv, train_test_split, vertical_partition, Dataset, LabelColumn, SyntheticSpec, VerticalPartition,
};
use crate::error::{Error, Result};
use crate::fedproto::{BackendKind, HeCostModel, TrainingConfig};
use crate::moo::{Constraints, GaConfig, SearchSpace};
use crate::objectives::ExperimentContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    #[default]
    Synthetic,
    Csv,
}

/// Where the data comes from. Synthetic fields are ignored for CSV input
/// except `classes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSection {
    pub source: DataSource,
    pub instances: usize,
    pub active_features: usize,
    pub passive_features: usize,
    pub classes: usize,
    pub class_sep: f64,
    pub path: Option<PathBuf>,
    pub label_column: String,
    /// Active-party column count for CSV input.
    pub active_count: usize,
}

impl Default for DatasetSection {
    fn default() -> Self {
        let s = SyntheticSpec::synthetic1(0);
        Self {
            source: DataSource::Synthetic,
            instances: s.instances,
            active_features: s.active_features,
            passive_features: s.passive_features,
            classes: s.classes,
            class_sep: s.class_sep,
            path: None,
            label_column: "label".into(),
            active_count: 5,
        }
    }
}

/// Hyperparameters of a single `train` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingSection {
    pub n_f: usize,
    pub n_l: usize,
    pub max_depth: usize,
    pub subsample: f64,
    pub purity_threshold: Option<f64>,
    pub learning_rate: f64,
    pub complete_secure: bool,
    /// Allows a purity threshold below 0.7 on binary data.
    pub unrestricted_purity: bool,
    pub backend: String,
    pub modulus_bits: u64,
}

impl Default for TrainingSection {
    fn default() -> Self {
        let t = TrainingConfig::default();
        Self {
            n_f: t.n_f,
            n_l: t.n_l,
            max_depth: t.max_depth,
            subsample: t.subsample,
            purity_threshold: t.purity_threshold,
            learning_rate: t.learning_rate,
            complete_secure: t.complete_secure,
            unrestricted_purity: false,
            backend: "counting".into(),
            modulus_bits: 1024,
        }
    }
}

impl TrainingSection {
    pub fn config(&self) -> TrainingConfig {
        TrainingConfig {
            n_f: self.n_f,
            n_l: self.n_l,
            max_depth: self.max_depth,
            subsample: self.subsample,
            purity_threshold: self.purity_threshold,
            learning_rate: self.learning_rate,
            complete_secure: self.complete_secure,
        }
    }

    pub fn backend(&self) -> Result<BackendKind> {
        match self.backend.as_str() {
            "counting" => Ok(BackendKind::Counting),
            "paillier" => Ok(BackendKind::Paillier {
                modulus_bits: self.modulus_bits,
            }),
            other => Err(Error::param("training.backend", format!("unknown backend `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttackSection {
    pub probe_per_class: usize,
    pub known_per_class: usize,
}

impl Default for AttackSection {
    fn default() -> Self {
        Self {
            probe_per_class: 50,
            known_per_class: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaSection {
    pub population: usize,
    pub generations: usize,
    pub crossover_binary: f64,
    pub crossover_sbx: f64,
    pub mutation_bitflip: f64,
    pub mutation_poly: f64,
    pub eta_c: f64,
    pub eta_m: f64,
}

impl Default for GaSection {
    fn default() -> Self {
        let g = GaConfig::default();
        Self {
            population: g.population,
            generations: g.generations,
            crossover_binary: g.crossover_binary,
            crossover_sbx: g.crossover_sbx,
            mutation_bitflip: g.mutation_bitflip,
            mutation_poly: g.mutation_poly,
            eta_c: g.eta_c,
            eta_m: g.eta_m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstraintSection {
    pub enabled: bool,
    pub phi_c: f64,
    pub phi_p: f64,
    pub alpha: f64,
}

impl Default for ConstraintSection {
    fn default() -> Self {
        Self {
            enabled: true,
            phi_c: 100.0,
            phi_p: 0.6,
            alpha: 20.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoostSection {
    pub lambda: f64,
    pub gamma: f64,
    pub min_child_weight: f64,
    pub bins: usize,
    /// Cost axis of the hypervolume reference point, and the cost assigned
    /// to failed evaluations.
    pub cost_ceiling: f64,
}

impl Default for BoostSection {
    fn default() -> Self {
        let b = BoostParams::default();
        Self {
            lambda: b.lambda,
            gamma: b.gamma,
            min_child_weight: b.min_child_weight,
            bins: b.bins,
            cost_ceiling: 500.0,
        }
    }
}

/// A whole experiment in one TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub dataset: DatasetSection,
    pub training: TrainingSection,
    pub boost: BoostSection,
    pub cost_model: HeCostModel,
    pub attack: AttackSection,
    pub ga: GaSection,
    pub constraints: ConstraintSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            out: PathBuf::from("out"),
            dataset: DatasetSection::default(),
            training: TrainingSection::default(),
            boost: BoostSection::default(),
            cost_model: HeCostModel::default(),
            attack: AttackSection::default(),
            ga: GaSection::default(),
            constraints: ConstraintSection::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::param("config", e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::param("--config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.dataset;
        if d.classes < 2 {
            return Err(Error::param("dataset.classes", "must be at least 2"));
        }
        match d.source {
            DataSource::Synthetic => {
                if d.active_features == 0 || d.passive_features == 0 {
                    return Err(Error::param(
                        "dataset.active_features",
                        "both parties need at least one feature",
                    ));
                }
                if d.instances < 3 * d.classes {
                    return Err(Error::param(
                        "dataset.instances",
                        "too few instances for the class count",
                    ));
                }
            }
            DataSource::Csv => match &d.path {
                None => return Err(Error::param("dataset.path", "required for csv input")),
                Some(p) if !p.is_file() => {
                    return Err(Error::param("dataset.path", format!("{} does not exist", p.display())))
                }
                _ => {}
            },
        }
        let t = self.training.config();
        t.validate().map_err(|e| prefix("training", e))?;
        if let Some(p) = t.purity_threshold {
            if d.classes == 2 && p < 0.7 && !self.training.unrestricted_purity {
                return Err(Error::param(
                    "training.purity_threshold",
                    "binary campaigns use [0.7, 1]; set training.unrestricted_purity to go lower",
                ));
            }
        }
        self.training.backend()?;
        self.boost_params().validate().map_err(|e| prefix("boost", e))?;
        if !(self.boost.cost_ceiling > 0.0) {
            return Err(Error::param("boost.cost_ceiling", "must be positive"));
        }
        self.cost_model.validate().map_err(|e| prefix("cost_model", e))?;
        if self.attack.probe_per_class == 0 || self.attack.known_per_class == 0 {
            return Err(Error::param(
                "attack",
                "probe_per_class and known_per_class must be positive",
            ));
        }
        if self.attack.known_per_class > self.attack.probe_per_class {
            return Err(Error::param("attack.known_per_class", "cannot exceed probe_per_class"));
        }
        self.ga_config().validate().map_err(|e| prefix("ga", e))?;
        self.constraints().validate().map_err(|e| prefix("constraints", e))?;
        Ok(())
    }

    pub fn synthetic_spec(&self) -> SyntheticSpec {
        SyntheticSpec {
            instances: self.dataset.instances,
            active_features: self.dataset.active_features,
            passive_features: self.dataset.passive_features,
            classes: self.dataset.classes,
            class_sep: self.dataset.class_sep,
            seed: self.seed,
        }
    }

    pub fn boost_params(&self) -> BoostParams {
        BoostParams {
            lambda: self.boost.lambda,
            gamma: self.boost.gamma,
            min_child_weight: self.boost.min_child_weight,
            bins: self.boost.bins,
        }
    }

    pub fn ga_config(&self) -> GaConfig {
        let g = &self.ga;
        GaConfig {
            population: g.population,
            generations: g.generations,
            crossover_binary: g.crossover_binary,
            crossover_sbx: g.crossover_sbx,
            mutation_bitflip: g.mutation_bitflip,
            mutation_poly: g.mutation_poly,
            eta_c: g.eta_c,
            eta_m: g.eta_m,
            seed: self.seed,
        }
    }

    pub fn constraints(&self) -> Constraints {
        let c = &self.constraints;
        if c.enabled {
            Constraints::cost_and_privacy(c.phi_c, c.phi_p, c.alpha)
        } else {
            Constraints::none()
        }
    }

    pub fn search_space(&self) -> SearchSpace {
        SearchSpace::for_classes(self.dataset.classes)
    }

    /// The full dataset: generated, or read from CSV.
    pub fn dataset(&self) -> Result<Dataset> {
        match self.dataset.source {
            DataSource::Synthetic => self.synthetic_spec().generate(),
            DataSource::Csv => {
                let path = self
                    .dataset
                    .path
                    .as_deref()
                    .ok_or_else(|| Error::param("dataset.path", "missing"))?;
                let column: LabelColumn = self.dataset.label_column.parse().expect("infallible");
                load_csv(path, &column, self.dataset.classes)
            }
        }
    }

    pub fn partition(&self, ds: &Dataset) -> Result<VerticalPartition> {
        let active = match self.dataset.source {
            DataSource::Synthetic => self.dataset.active_features,
            DataSource::Csv => self.dataset.active_count,
        };
        vertical_partition(ds, active, self.seed)
    }

    /// Split, partition, probe and attacker knowledge for this config.
    pub fn context(&self) -> Result<ExperimentContext> {
        let ds = self.dataset()?;
        let split = train_test_split(&ds, self.seed)?;
        let partition = self.partition(&ds)?;
        let mut ctx = ExperimentContext::new(
            ds.subset(&split.train_rows),
            ds.subset(&split.test_rows),
            partition,
            self.attack.probe_per_class,
            self.attack.known_per_class,
            self.cost_model,
            self.boost_params(),
            self.seed,
            self.boost.cost_ceiling,
        )?;
        ctx.backend = self.training.backend()?;
        Ok(ctx)
    }
}

fn prefix(section: &str, e: Error) -> Error {
    match e {
        Error::Parameter { name, reason } => Error::Parameter {
            name: format!("{section}.{name}"),
            reason,
        },
        other => other,
    }
}
