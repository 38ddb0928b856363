//! Versioned plain-text model files.
//!
//! Layout: a `belpm-model v1` header, one `key = value` line per field, and a
//! trailing `checksum = <crc32>` line covering every byte before it. Arrays
//! are comma-separated; floats carry 17 significant digits so a reload
//! reproduces predictions bit for bit.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::belpm::{BelpmConfig, BelpmModel, CmWeights, LoWeights};
use crate::classic::{ClassicBelModel, OrbitofrontalRule};
use crate::error::{Error, Result};
use crate::io::fmt_full;
use crate::model::{Model, ModelKind};
use crate::network::{AdaptiveNetwork, KernelKind};
use crate::series::Embedding;
use crate::wknn::WknnModel;

pub const MODEL_HEADER: &str = "belpm-model v1";
const MAGIC: &str = "belpm-model";
const CHECKSUM_KEY: &str = "checksum = ";

struct Writer {
    text: String,
}

impl Writer {
    fn new() -> Self {
        Self {
            text: format!("{MODEL_HEADER}\n"),
        }
    }

    fn put(&mut self, key: &str, value: impl Display) {
        self.text.push_str(&format!("{key} = {value}\n"));
    }

    fn floats(&mut self, key: &str, values: &[f64]) {
        let joined: Vec<String> = values.iter().map(|v| fmt_full(*v)).collect();
        self.put(key, joined.join(","));
    }

    fn network(&mut self, prefix: &str, net: &AdaptiveNetwork) {
        self.put(&format!("{prefix}.dim"), net.dim());
        self.put(&format!("{prefix}.k"), net.k());
        self.put(&format!("{prefix}.kernel"), net.kernel());
        self.put(&format!("{prefix}.samples"), net.len());
        self.floats(&format!("{prefix}.bandwidths"), net.bandwidths());
        self.floats(&format!("{prefix}.inputs"), net.flat_inputs());
        self.floats(&format!("{prefix}.targets"), net.targets());
    }

    fn finish(mut self) -> String {
        let crc = crc32fast::hash(self.text.as_bytes());
        self.text.push_str(&format!("{CHECKSUM_KEY}{crc:08x}\n"));
        self.text
    }
}

pub fn format_model(model: &Model) -> String {
    let mut w = Writer::new();
    w.put("kind", model.kind().as_str());
    let embedding = crate::model::Forecaster::embedding(model);
    w.put("embedding.dim", embedding.dim);
    w.put("embedding.horizon", embedding.horizon);
    match model {
        Model::Belpm(m) => {
            let c = m.config();
            w.put("config.k_a", c.k_a);
            w.put("config.k_o", c.k_o);
            w.put("config.kernel_a", c.kernel_a);
            w.put("config.kernel_o", c.kernel_o);
            w.put("config.lr", fmt_full(c.lr));
            w.put("config.epochs", c.epochs);
            w.put("config.lambda", fmt_full(c.lambda));
            w.network("bl", m.bl());
            w.network("mo", m.mo());
            w.floats("cm.w", &m.cm().w);
            w.floats("cm.wa", &m.cm().wa);
            w.floats("lo.wo", &m.lo().wo);
        }
        Model::Wknn(m) => {
            w.put("wknn.k", m.k());
            w.put("wknn.samples", m.len());
            w.floats("wknn.inputs", m.flat_inputs());
            w.floats("wknn.targets", m.targets());
        }
        Model::ClassicBel(m) => {
            w.put("bel.alpha", fmt_full(m.alpha));
            w.put("bel.beta", fmt_full(m.beta));
            w.put(
                "bel.rule",
                match m.rule {
                    OrbitofrontalRule::Reinforcement => "reinforcement",
                    OrbitofrontalRule::OutputError => "output-error",
                },
            );
            w.floats("bel.v", &m.v);
            w.floats("bel.w", &m.w);
        }
    }
    w.finish()
}

pub fn save_model(model: &Model, path: &Path) -> Result<()> {
    fs::write(path, format_model(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<Model> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text)
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptFile(msg.into())
}

struct Fields {
    map: BTreeMap<String, String>,
}

impl Fields {
    fn raw(&self, key: &str) -> Result<&str> {
        self.map
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| corrupt(format!("missing key '{key}'")))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.raw(key)?;
        raw.parse()
            .map_err(|_| corrupt(format!("bad value for '{key}': '{raw}'")))
    }

    fn floats(&self, key: &str) -> Result<Vec<f64>> {
        let raw = self.raw(key)?;
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| corrupt(format!("bad number in '{key}': '{s}'")))
            })
            .collect()
    }

    fn array<const N: usize>(&self, key: &str) -> Result<[f64; N]> {
        let v = self.floats(key)?;
        v.try_into()
            .map_err(|v: Vec<f64>| corrupt(format!("'{key}' needs {N} values, found {}", v.len())))
    }

    fn network(&self, prefix: &str) -> Result<AdaptiveNetwork> {
        let dim: usize = self.get(&format!("{prefix}.dim"))?;
        let k: usize = self.get(&format!("{prefix}.k"))?;
        let kernel: KernelKind = self.get(&format!("{prefix}.kernel"))?;
        let samples: usize = self.get(&format!("{prefix}.samples"))?;
        let targets = self.floats(&format!("{prefix}.targets"))?;
        if targets.len() != samples {
            return Err(corrupt(format!("{prefix}: {samples} samples declared, {} stored", targets.len())));
        }
        let net = AdaptiveNetwork::new(dim, self.floats(&format!("{prefix}.inputs"))?, targets, k, kernel)
            .map_err(|e| corrupt(format!("{prefix}: {e}")))?;
        if net.k() != k {
            return Err(corrupt(format!("{prefix}: k exceeds sample count")));
        }
        net.with_bandwidths(self.floats(&format!("{prefix}.bandwidths"))?)
            .map_err(|e| corrupt(format!("{prefix}: {e}")))
    }
}

/// Verifies the header and checksum, then rebuilds the model.
pub fn parse_model(text: &str) -> Result<Model> {
    let header = text.lines().next().unwrap_or("").trim_end_matches('\r');
    if header != MODEL_HEADER {
        return match header.strip_prefix(MAGIC) {
            Some(version) => Err(Error::VersionMismatch(version.trim().to_string())),
            None => Err(corrupt("missing model header")),
        };
    }

    let body_end = text
        .trim_end_matches(['\n', '\r'])
        .rfind('\n')
        .map(|i| i + 1)
        .ok_or_else(|| corrupt("missing checksum"))?;
    let (body, trailer) = text.split_at(body_end);
    let stored = trailer
        .trim_end()
        .strip_prefix(CHECKSUM_KEY)
        .ok_or_else(|| corrupt("missing checksum (file truncated?)"))?;
    let stored = u32::from_str_radix(stored.trim(), 16).map_err(|_| corrupt("malformed checksum"))?;
    if crc32fast::hash(body.as_bytes()) != stored {
        return Err(corrupt("checksum mismatch"));
    }

    let mut map = BTreeMap::new();
    for (i, line) in body.lines().enumerate().skip(1) {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once(" = ")
            .ok_or_else(|| corrupt(format!("line {}: expected 'key = value'", i + 1)))?;
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(corrupt(format!("duplicate key '{key}'")));
        }
    }
    let f = Fields { map };

    let embedding = Embedding::new(f.get("embedding.dim")?, f.get("embedding.horizon")?)
        .map_err(|e| corrupt(e.to_string()))?;
    let kind = f.raw("kind")?;
    let model = if kind == ModelKind::Belpm.as_str() {
        let config = BelpmConfig {
            k_a: f.get("config.k_a")?,
            k_o: f.get("config.k_o")?,
            kernel_a: f.get("config.kernel_a")?,
            kernel_o: f.get("config.kernel_o")?,
            lr: f.get("config.lr")?,
            epochs: f.get("config.epochs")?,
            lambda: f.get("config.lambda")?,
        };
        let cm = CmWeights {
            w: f.array("cm.w")?,
            wa: f.array("cm.wa")?,
        };
        let lo = LoWeights { wo: f.array("lo.wo")? };
        Model::Belpm(
            BelpmModel::from_parts(embedding, f.network("bl")?, f.network("mo")?, cm, lo, config)
                .map_err(|e| corrupt(e.to_string()))?,
        )
    } else if kind == ModelKind::Wknn.as_str() {
        let samples: usize = f.get("wknn.samples")?;
        let targets = f.floats("wknn.targets")?;
        if targets.len() != samples {
            return Err(corrupt(format!("wknn: {samples} samples declared, {} stored", targets.len())));
        }
        Model::Wknn(
            WknnModel::from_parts(embedding, f.floats("wknn.inputs")?, targets, f.get("wknn.k")?)
                .map_err(|e| corrupt(e.to_string()))?,
        )
    } else if kind == ModelKind::ClassicBel.as_str() {
        let rule = match f.raw("bel.rule")? {
            "reinforcement" => OrbitofrontalRule::Reinforcement,
            "output-error" => OrbitofrontalRule::OutputError,
            other => return Err(corrupt(format!("unknown rule '{other}'"))),
        };
        Model::ClassicBel(
            ClassicBelModel::from_weights(
                embedding,
                f.floats("bel.v")?,
                f.floats("bel.w")?,
                f.get("bel.alpha")?,
                f.get("bel.beta")?,
            )
            .map_err(|e| corrupt(e.to_string()))?
            .with_rule(rule),
        )
    } else {
        return Err(corrupt(format!("unknown model kind '{kind}'")));
    };
    Ok(model)
}
