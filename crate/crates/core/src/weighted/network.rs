//! Dense softmax networks: the affine+softmax (logistic) model and the MLP.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::digest::{CanonicalWriter, Digest};
use crate::domain::ClassId;
use crate::error::{Error, Result};
use crate::loss::{argmax, one_hot, softmax, LossFunction};

/// Format version written into serialized model files.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative expressed through the pre-activation value.
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Architecture {
    Logistic,
    Mlp {
        hidden: Vec<usize>,
        activation: Activation,
    },
}

impl Architecture {
    /// One hidden layer of 16 tanh units.
    pub fn default_mlp() -> Self {
        Architecture::Mlp {
            hidden: vec![16],
            activation: Activation::Tanh,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Architecture::Logistic => "logistic",
            Architecture::Mlp { .. } => "mlp",
        }
    }
}

/// Affine layer. `weights` is `inputs × outputs`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    /// Uniform in `[-r, r]` with `r = sqrt(6 / (fan_in + fan_out))`; zero bias.
    pub fn glorot<R: Rng + ?Sized>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        let r = (6.0 / (inputs + outputs) as f64).sqrt();
        let weights = (0..inputs * outputs)
            .map(|_| rng.random_range(-r..=r))
            .collect();
        Self {
            inputs,
            outputs,
            weights,
            bias: vec![0.0; outputs],
        }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = self.bias.clone();
        for (i, xi) in x.iter().enumerate() {
            let row = &self.weights[i * self.outputs..(i + 1) * self.outputs];
            for (o, w) in out.iter_mut().zip(row) {
                *o += xi * w;
            }
        }
        out
    }

    fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    fn is_finite(&self) -> bool {
        self.weights.iter().chain(&self.bias).all(|v| v.is_finite())
    }
}

/// A weighted mapping from features to a class distribution.
///
/// Hidden layers use `activation`; the last layer feeds a softmax.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    architecture: Architecture,
    layers: Vec<Dense>,
}

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    version: u32,
    architecture: Architecture,
    layers: Vec<Dense>,
}

impl Network {
    pub fn new<R: Rng + ?Sized>(
        architecture: Architecture,
        input_dim: usize,
        classes: usize,
        rng: &mut R,
    ) -> Self {
        let widths = layer_widths(&architecture, input_dim, classes);
        let layers = widths
            .windows(2)
            .map(|w| Dense::glorot(w[0], w[1], rng))
            .collect();
        Self {
            architecture,
            layers,
        }
    }

    pub fn zeros(architecture: Architecture, input_dim: usize, classes: usize) -> Self {
        let widths = layer_widths(&architecture, input_dim, classes);
        let layers = widths
            .windows(2)
            .map(|w| Dense::zeros(w[0], w[1]))
            .collect();
        Self {
            architecture,
            layers,
        }
    }

    /// Builds a network from explicit layers, checking that shapes compose.
    pub fn from_layers(architecture: Architecture, layers: Vec<Dense>) -> Result<Self> {
        let expected_depth = match &architecture {
            Architecture::Logistic => 1,
            Architecture::Mlp { hidden, .. } => hidden.len() + 1,
        };
        if layers.len() != expected_depth {
            return Err(Error::contract(format!(
                "{} layers given, architecture needs {expected_depth}",
                layers.len()
            )));
        }
        for l in &layers {
            if l.inputs == 0 || l.outputs == 0 {
                return Err(Error::contract("layer with a zero dimension"));
            }
            if l.weights.len() != l.inputs * l.outputs || l.bias.len() != l.outputs {
                return Err(Error::contract("layer buffer does not match its shape"));
            }
        }
        for pair in layers.windows(2) {
            if pair[0].outputs != pair[1].inputs {
                return Err(Error::contract("consecutive layer shapes do not compose"));
            }
        }
        if let Architecture::Mlp { hidden, .. } = &architecture {
            for (h, l) in hidden.iter().zip(&layers) {
                if *h != l.outputs {
                    return Err(Error::contract("hidden width does not match architecture"));
                }
            }
        }
        if layers.last().map(|l| l.outputs).unwrap_or(0) < 2 {
            return Err(Error::contract("final layer needs at least two classes"));
        }
        Ok(Self {
            architecture,
            layers,
        })
    }

    pub fn architecture(&self) -> &Architecture {
        &self.architecture
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn class_count(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs
    }

    fn activation(&self) -> Option<Activation> {
        match &self.architecture {
            Architecture::Logistic => None,
            Architecture::Mlp { activation, .. } => Some(*activation),
        }
    }

    fn check_input(&self, features: &[f64]) -> Result<()> {
        if features.len() != self.input_dim() {
            return Err(Error::IncompatibleInput {
                expected: self.input_dim(),
                found: features.len(),
            });
        }
        Ok(())
    }

    /// Class distribution for one input.
    pub fn forward(&self, features: &[f64]) -> Result<Vec<f64>> {
        self.check_input(features)?;
        Ok(softmax(&self.trace(features).logits))
    }

    pub fn predict(&self, features: &[f64]) -> Result<ClassId> {
        Ok(argmax(&self.forward(features)?))
    }

    fn trace(&self, features: &[f64]) -> Trace {
        let act = self.activation();
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut current = features.to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let z = layer.apply(&current);
            inputs.push(std::mem::take(&mut current));
            if i < last {
                let a = act.expect("hidden layers imply an activation");
                current = z.iter().map(|v| a.apply(*v)).collect();
            }
            pre.push(z);
        }
        let logits = pre[last].clone();
        Trace {
            inputs,
            pre,
            logits,
        }
    }

    /// Loss on one sample and its gradient with respect to every parameter.
    pub fn loss_and_gradient(
        &self,
        features: &[f64],
        label: ClassId,
        loss: LossFunction,
    ) -> Result<(f64, Vec<Dense>)> {
        self.check_input(features)?;
        let classes = self.class_count();
        if label >= classes {
            return Err(Error::IncompatibleClasses {
                expected: classes,
                found: label + 1,
            });
        }
        let trace = self.trace(features);
        let p = softmax(&trace.logits);
        let value = loss.eval(&p, label)?;
        let target = one_hot(label, classes);

        let mut delta: Vec<f64> = match loss {
            LossFunction::CrossEntropy => p.iter().zip(&target).map(|(pi, ti)| pi - ti).collect(),
            LossFunction::MeanSquaredError => {
                let g: Vec<f64> = p
                    .iter()
                    .zip(&target)
                    .map(|(pi, ti)| 2.0 * (pi - ti) / classes as f64)
                    .collect();
                let dot: f64 = p.iter().zip(&g).map(|(pi, gi)| pi * gi).sum();
                p.iter().zip(&g).map(|(pj, gj)| pj * (gj - dot)).collect()
            }
            LossFunction::ZeroOne => {
                return Err(Error::contract("zero-one loss has no gradient"));
            }
        };

        let act = self.activation();
        let mut grads: Vec<Dense> = self
            .layers
            .iter()
            .map(|l| Dense::zeros(l.inputs, l.outputs))
            .collect();
        for li in (0..self.layers.len()).rev() {
            let layer = &self.layers[li];
            let input = &trace.inputs[li];
            let g = &mut grads[li];
            for (i, xi) in input.iter().enumerate() {
                let row = &mut g.weights[i * layer.outputs..(i + 1) * layer.outputs];
                for (gw, d) in row.iter_mut().zip(&delta) {
                    *gw = xi * d;
                }
            }
            g.bias.copy_from_slice(&delta);
            if li > 0 {
                let a = act.expect("hidden layers imply an activation");
                let prev_pre = &trace.pre[li - 1];
                delta = (0..layer.inputs)
                    .map(|i| {
                        let row = &layer.weights[i * layer.outputs..(i + 1) * layer.outputs];
                        let back: f64 = row.iter().zip(&delta).map(|(w, d)| w * d).sum();
                        back * a.derivative(prev_pre[i])
                    })
                    .collect();
            }
        }
        Ok((value, grads))
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Dense::param_count).sum()
    }

    /// Parameters flattened layer by layer, weights before bias.
    pub fn params(&self) -> Vec<f64> {
        flatten(&self.layers)
    }

    pub fn set_params(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.param_count() {
            return Err(Error::contract(format!(
                "expected {} parameters, got {}",
                self.param_count(),
                values.len()
            )));
        }
        let mut it = values.iter().copied();
        for l in &mut self.layers {
            for w in l.weights.iter_mut().chain(l.bias.iter_mut()) {
                *w = it.next().expect("length checked");
            }
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().all(Dense::is_finite)
    }

    pub fn fingerprint(&self) -> Digest {
        let mut w = CanonicalWriter::new("weighted-network/v1");
        w.str(self.architecture.name());
        if let Architecture::Mlp { hidden, activation } = &self.architecture {
            w.u64(hidden.len() as u64);
            for h in hidden {
                w.u64(*h as u64);
            }
            w.str(match activation {
                Activation::Relu => "relu",
                Activation::Tanh => "tanh",
            });
        }
        w.u64(self.layers.len() as u64);
        for l in &self.layers {
            w.u64(l.inputs as u64).u64(l.outputs as u64);
            w.f64s(&l.weights).f64s(&l.bias);
        }
        w.finish()
    }

    pub fn to_json(&self) -> Result<String> {
        let file = NetworkFile {
            version: MODEL_FORMAT_VERSION,
            architecture: self.architecture.clone(),
            layers: self.layers.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: NetworkFile = serde_json::from_str(s)?;
        if file.version != MODEL_FORMAT_VERSION {
            return Err(Error::contract(format!(
                "unsupported model format version {}",
                file.version
            )));
        }
        Self::from_layers(file.architecture, file.layers)
    }
}

struct Trace {
    inputs: Vec<Vec<f64>>,
    pre: Vec<Vec<f64>>,
    logits: Vec<f64>,
}

fn layer_widths(architecture: &Architecture, input_dim: usize, classes: usize) -> Vec<usize> {
    let mut widths = vec![input_dim];
    if let Architecture::Mlp { hidden, .. } = architecture {
        widths.extend(hidden);
    }
    widths.push(classes);
    widths
}

pub(crate) fn flatten(layers: &[Dense]) -> Vec<f64> {
    layers
        .iter()
        .flat_map(|l| l.weights.iter().chain(&l.bias).copied())
        .collect()
}
