//! Dense feed-forward network with `tanh` on every layer and a single output
//! neuron, trained by Levenberg-Marquardt.
//!
//! Parameters are addressed as one flat vector. Layers are laid out in order;
//! within a layer the weight matrix comes first (row-major, `outputs x inputs`)
//! followed by the bias vector. The Jacobian columns, the persistence format
//! and the random initializer all use this order.

mod lm;
mod persist;

pub use lm::{lm_train, StopReason, TrainConfig, TrainReport, MU_FLOOR};
pub use persist::{load_model, save_model, MODEL_MAGIC};

use nalgebra::DMatrix;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::class::Class;
use crate::energy::{FeatureVector, FEATURE_DIM};

/// Hidden width used when nothing else is requested.
pub const DEFAULT_HIDDEN: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("invalid network shape: {0}")]
    Shape(String),
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error("invalid training data: {0}")]
    Data(String),
    #[error("damped normal equations could not be factorized up to mu = {mu_max:e}")]
    SingularSystem { mu_max: f64 },
    #[error("model file line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq)]
struct Layer {
    inputs: usize,
    outputs: usize,
    /// Row-major `outputs x inputs`.
    weights: Vec<f64>,
    biases: Vec<f64>,
}

impl Layer {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            biases: vec![0.0; outputs],
        }
    }

    fn param_count(&self) -> usize {
        self.weights.len() + self.biases.len()
    }

    fn activate(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.biases.iter().enumerate().map(|(i, &b)| {
            let row = &self.weights[i * self.inputs..(i + 1) * self.inputs];
            let z: f64 = row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>() + b;
            z.tanh()
        }));
    }
}

/// A `tanh` multilayer perceptron with one output.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<Layer>,
}

impl Network {
    /// All-zero network with the given layer widths, e.g. `[6, 5, 1]`.
    pub fn zeros(layer_sizes: &[usize]) -> Result<Self, NetError> {
        if layer_sizes.len() < 2 {
            return Err(NetError::Shape("need at least an input and an output layer".into()));
        }
        if layer_sizes.contains(&0) {
            return Err(NetError::Shape("layer widths must be positive".into()));
        }
        if *layer_sizes.last().unwrap() != 1 {
            return Err(NetError::Shape("the output layer must have exactly one neuron".into()));
        }
        let layers = layer_sizes
            .windows(2)
            .map(|w| Layer::zeros(w[0], w[1]))
            .collect();
        Ok(Self { layers })
    }

    /// Network with parameters drawn uniformly from `[-0.5, 0.5)`.
    ///
    /// The generator is ChaCha8 seeded with `seed_from_u64(seed)`. Each
    /// parameter, in flat parameter order, takes the next `u64` draw `r` and
    /// becomes `(r >> 11) * 2^-53 - 0.5`.
    pub fn random(layer_sizes: &[usize], seed: u64) -> Result<Self, NetError> {
        let mut net = Self::zeros(layer_sizes)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params: Vec<f64> = (0..net.param_count())
            .map(|_| unit_interval(rng.next_u64()) - 0.5)
            .collect();
        net.set_params(&params)?;
        Ok(net)
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        std::iter::once(self.layers[0].inputs)
            .chain(self.layers.iter().map(|l| l.outputs))
            .collect()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Layer::param_count).sum()
    }

    /// Flat parameter vector.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            out.extend_from_slice(&layer.weights);
            out.extend_from_slice(&layer.biases);
        }
        out
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<(), NetError> {
        if params.len() != self.param_count() {
            return Err(NetError::Shape(format!(
                "expected {} parameters, got {}",
                self.param_count(),
                params.len()
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(NetError::Shape("parameters must be finite".into()));
        }
        let mut rest = params;
        for layer in &mut self.layers {
            let (w, tail) = rest.split_at(layer.weights.len());
            let (b, tail) = tail.split_at(layer.biases.len());
            layer.weights.copy_from_slice(w);
            layer.biases.copy_from_slice(b);
            rest = tail;
        }
        Ok(())
    }

    /// `(weights, biases)` of layer `index` (0-based), weights row-major.
    pub fn layer(&self, index: usize) -> Option<(&[f64], &[f64])> {
        self.layers
            .get(index)
            .map(|l| (l.weights.as_slice(), l.biases.as_slice()))
    }

    pub(crate) fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Network output for one input vector.
    ///
    /// # Panics
    ///
    /// If `input.len()` differs from the input width.
    pub fn forward(&self, input: &[f64]) -> f64 {
        assert_eq!(
            input.len(),
            self.input_dim(),
            "input has {} values but the network expects {}",
            input.len(),
            self.input_dim()
        );
        let mut current = input.to_vec();
        let mut next = Vec::new();
        for layer in &self.layers {
            layer.activate(&current, &mut next);
            std::mem::swap(&mut current, &mut next);
        }
        current[0]
    }

    /// Derivatives of the output with respect to every parameter, one row per
    /// input, computed by backpropagation.
    ///
    /// # Panics
    ///
    /// If any input has the wrong width.
    pub fn jacobian<I: AsRef<[f64]>>(&self, inputs: &[I]) -> DMatrix<f64> {
        let params = self.param_count();
        let mut jac = DMatrix::zeros(inputs.len(), params);
        let mut row = vec![0.0; params];
        for (n, input) in inputs.iter().enumerate() {
            self.gradient_into(input.as_ref(), &mut row);
            for (p, &v) in row.iter().enumerate() {
                jac[(n, p)] = v;
            }
        }
        jac
    }

    fn gradient_into(&self, input: &[f64], grad: &mut [f64]) {
        assert_eq!(input.len(), self.input_dim(), "input width mismatch");
        // activations[0] is the input, activations[l + 1] the output of layer l.
        let mut activations: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len() + 1);
        activations.push(input.to_vec());
        for layer in &self.layers {
            let mut out = Vec::new();
            layer.activate(activations.last().unwrap(), &mut out);
            activations.push(out);
        }

        let mut offsets = Vec::with_capacity(self.layers.len());
        let mut acc = 0;
        for layer in &self.layers {
            offsets.push(acc);
            acc += layer.param_count();
        }

        // delta = d(output) / d(pre-activation) of the current layer.
        let y = activations[self.layers.len()][0];
        let mut delta = vec![1.0 - y * y];
        for (l, layer) in self.layers.iter().enumerate().rev() {
            let prev = &activations[l];
            let base = offsets[l];
            for i in 0..layer.outputs {
                for j in 0..layer.inputs {
                    grad[base + i * layer.inputs + j] = delta[i] * prev[j];
                }
                grad[base + layer.weights.len() + i] = delta[i];
            }
            if l > 0 {
                delta = (0..layer.inputs)
                    .map(|j| {
                        let back: f64 = (0..layer.outputs)
                            .map(|i| layer.weights[i * layer.inputs + j] * delta[i])
                            .sum();
                        back * (1.0 - prev[j] * prev[j])
                    })
                    .collect();
            }
        }
    }
}

fn unit_interval(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Randomly initialized network with the default `6-5-1` shape.
pub fn init_network(seed: u64) -> Network {
    Network::random(&[FEATURE_DIM, DEFAULT_HIDDEN, 1], seed)
        .expect("the default shape is valid")
}

/// Output targets for the three classes on the single output neuron.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassEncoding {
    targets: [f64; 3],
}

impl Default for ClassEncoding {
    fn default() -> Self {
        Self {
            targets: [-0.8, 0.0, 0.8],
        }
    }
}

impl ClassEncoding {
    /// Targets indexed by [`Class::index`]; they must be strictly increasing and
    /// inside `(-1, 1)`.
    pub fn new(targets: [f64; 3]) -> Result<Self, NetError> {
        let inside = targets.iter().all(|t| t.abs() < 1.0);
        let increasing = targets.windows(2).all(|w| w[0] < w[1]);
        if !inside || !increasing {
            return Err(NetError::Config(format!(
                "class targets {targets:?} must be increasing and inside (-1, 1)"
            )));
        }
        Ok(Self { targets })
    }

    pub fn target(&self, class: Class) -> f64 {
        self.targets[class.index()]
    }

    pub fn targets(&self) -> [f64; 3] {
        self.targets
    }

    /// Class whose target is nearest to `raw`; ties go to the lower target.
    pub fn decode(&self, raw: f64) -> Class {
        let mut best = Class::Healthy;
        let mut best_dist = f64::INFINITY;
        // Targets are increasing, so a strict comparison keeps the lower one on ties.
        for class in Class::ALL {
            let dist = (raw - self.target(class)).abs();
            if dist < best_dist {
                best = class;
                best_dist = dist;
            }
        }
        best
    }
}

/// Predicted class and raw network output for one feature vector.
pub fn classify(net: &Network, encoding: &ClassEncoding, feature: &FeatureVector) -> (Class, f64) {
    let raw = net.forward(feature.shares());
    (encoding.decode(raw), raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_shape_has_41_parameters() {
        let net = init_network(1);
        assert_eq!(net.layer_sizes(), vec![6, 5, 1]);
        assert_eq!(net.param_count(), 41);
    }

    #[test]
    fn init_is_seeded() {
        assert_eq!(init_network(7), init_network(7));
        assert_ne!(init_network(7).params(), init_network(8).params());
        for p in init_network(3).params() {
            assert!((-0.5..0.5).contains(&p));
        }
    }

    #[test]
    fn zero_network_outputs_zero() {
        let net = Network::zeros(&[6, 5, 1]).unwrap();
        assert_eq!(net.forward(&[0.3, 0.1, 0.9, 0.2, 0.5, 0.7]), 0.0);
    }

    #[test]
    fn scalar_chain() {
        let mut net = Network::zeros(&[1, 1, 1]).unwrap();
        net.set_params(&[1.0, 0.0, 1.0, 0.0]).unwrap();
        let y = net.forward(&[0.5]);
        assert!((y - 0.431_808_180_595_096).abs() < 1e-12, "{y}");
        assert_eq!(y, 0.5f64.tanh().tanh());
    }

    #[test]
    fn output_bias_gradient_is_tanh_derivative() {
        let net = init_network(11);
        let x = [0.1, 0.2, 0.05, 0.3, 0.15, 0.2];
        let y = net.forward(&x);
        let jac = net.jacobian(&[x]);
        assert!((jac[(0, 40)] - (1.0 - y * y)).abs() < 1e-15);
    }

    #[test]
    fn zero_input_has_zero_first_layer_weight_gradient() {
        let net = init_network(5);
        let jac = net.jacobian(&[[0.0; 6]]);
        for p in 0..30 {
            assert_eq!(jac[(0, p)], 0.0);
        }
        assert!(jac[(0, 30)] != 0.0);
    }

    #[test]
    fn shape_errors() {
        assert!(Network::zeros(&[6]).is_err());
        assert!(Network::zeros(&[6, 0, 1]).is_err());
        assert!(Network::zeros(&[6, 5, 2]).is_err());
        let mut net = init_network(0);
        assert!(net.set_params(&[0.0; 40]).is_err());
        let mut bad = net.params();
        bad[3] = f64::NAN;
        assert!(net.set_params(&bad).is_err());
    }

    #[test]
    fn decode_examples() {
        let enc = ClassEncoding::default();
        assert_eq!(enc.decode(-0.79), Class::Healthy);
        assert_eq!(enc.decode(0.41), Class::Seizure);
        assert_eq!(enc.decode(-0.4), Class::Healthy);
        assert_eq!(enc.decode(0.4), Class::EpilepsySyndrome);
        assert_eq!(enc.decode(0.0), Class::EpilepsySyndrome);
    }

    #[test]
    fn encoding_validation() {
        assert!(ClassEncoding::new([-0.8, 0.0, 0.8]).is_ok());
        assert!(ClassEncoding::new([0.0, -0.8, 0.8]).is_err());
        assert!(ClassEncoding::new([-1.0, 0.0, 0.8]).is_err());
    }
}
