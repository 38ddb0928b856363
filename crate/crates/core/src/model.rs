//! Common prediction surface shared by every trained model.

use crate::belpm::BelpmModel;
use crate::classic::ClassicBelModel;
use crate::error::Result;
use crate::series::{embed, EmbeddedDataset, Embedding, TimeSeries};
use crate::wknn::WknnModel;

pub trait Forecaster {
    fn embedding(&self) -> Embedding;

    /// One-step prediction from a single input window.
    fn predict(&self, input: &[f64]) -> Result<f64>;

    fn predict_dataset(&self, data: &EmbeddedDataset) -> Result<Vec<f64>> {
        data.inputs().map(|x| self.predict(x)).collect()
    }

    /// Direct multi-step forecast: one prediction per embeddable window of
    /// `series`, stamped with the time of the value it forecasts.
    fn predict_series(&self, series: &TimeSeries) -> Result<TimeSeries> {
        let data = embed(series, self.embedding())?;
        let values = self.predict_dataset(&data)?;
        TimeSeries::with_time(values, data.times()[0], series.step())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Belpm,
    Wknn,
    ClassicBel,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Belpm => "belpm",
            ModelKind::Wknn => "wknn",
            ModelKind::ClassicBel => "classic-bel",
        }
    }
}

/// Any trained model, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Model {
    Belpm(BelpmModel),
    Wknn(WknnModel),
    ClassicBel(ClassicBelModel),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Belpm(_) => ModelKind::Belpm,
            Model::Wknn(_) => ModelKind::Wknn,
            Model::ClassicBel(_) => ModelKind::ClassicBel,
        }
    }
}

impl Forecaster for Model {
    fn embedding(&self) -> Embedding {
        match self {
            Model::Belpm(m) => m.embedding(),
            Model::Wknn(m) => m.embedding(),
            Model::ClassicBel(m) => m.embedding(),
        }
    }

    fn predict(&self, input: &[f64]) -> Result<f64> {
        match self {
            Model::Belpm(m) => m.predict(input),
            Model::Wknn(m) => m.predict(input),
            Model::ClassicBel(m) => m.predict(input),
        }
    }
}

impl From<BelpmModel> for Model {
    fn from(m: BelpmModel) -> Self {
        Model::Belpm(m)
    }
}

impl From<WknnModel> for Model {
    fn from(m: WknnModel) -> Self {
        Model::Wknn(m)
    }
}

impl From<ClassicBelModel> for Model {
    fn from(m: ClassicBelModel) -> Self {
        Model::ClassicBel(m)
    }
}
