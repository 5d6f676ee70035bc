//! From-scratch deep autoencoder: forward pass, cosine-similarity loss,
//! backpropagation, Adam optimization, the training loop, encoder reuse,
//! and finite-difference gradient verification.
//!
//! The network is four encoder layers and four mirrored decoder layers.
//! Hidden layers apply LeakyReLU; the final decoder layer is linear. All
//! arithmetic is 64-bit. Training is single-writer: one owner mutates the
//! parameters, everything else reads.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::time::Instant;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::vectorize::SpecialistMatrix;

/// Embedding width of the default configuration.
pub const EMBEDDING_DIM: usize = 20;

/// Default hidden widths chained onto the corpus dimension:
/// `[V, 512, 128, 48, 20]`.
pub const DEFAULT_HIDDEN_DIMS: [usize; 4] = [512, 128, 48, EMBEDDING_DIM];

pub const DEFAULT_LEAKY_SLOPE: f64 = 0.01;
pub const DEFAULT_LEARNING_RATE: f64 = 1e-5;
pub const DEFAULT_EPOCHS: usize = 18;
pub const DEFAULT_BATCH_SIZE: usize = 32;

/// Guards the cosine denominator against a zero-norm reconstruction.
pub const COSINE_EPS: f64 = 1e-12;

/// Encoder layer count; the decoder mirrors it.
pub const ENCODER_LAYERS: usize = 4;

const MODEL_MAGIC: &[u8; 4] = b"AEXP";
const MODEL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum NeuralError {
    #[error("invalid layer dimensions: {0}")]
    BadDims(String),
    #[error("input length {got} does not match expected width {want}")]
    ShapeMismatch { want: usize, got: usize },
    #[error("non-finite value in input")]
    NonFiniteInput,
    #[error("zero-norm target vector")]
    ZeroNormTarget,
    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },
    #[error("finite-difference step must be positive")]
    BadStepSize,
    #[error("optimizer state does not match parameters: {0}")]
    OptimizerShape(String),
    #[error("invalid training config: {0}")]
    BadConfig(String),
    #[error("not a model file (bad magic)")]
    NotAModelFile,
    #[error("unsupported model file version {0}")]
    UnsupportedVersion(u32),
    #[error("model file truncated or corrupt: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[inline]
pub fn leaky_relu(z: f64, slope: f64) -> f64 {
    if z >= 0.0 {
        z
    } else {
        slope * z
    }
}

/// Derivative of LeakyReLU; defined as the slope at exactly zero.
#[inline]
fn leaky_relu_grad(z: f64, slope: f64) -> f64 {
    if z > 0.0 {
        1.0
    } else {
        slope
    }
}

/// One dense layer, weights row-major `fan_out x fan_in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub fan_in: usize,
    pub fan_out: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Layer {
    fn matvec(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.reserve(self.fan_out);
        for i in 0..self.fan_out {
            let row = &self.weights[i * self.fan_in..(i + 1) * self.fan_in];
            let mut acc = self.bias[i];
            for (w, x) in row.iter().zip(input) {
                acc += w * x;
            }
            out.push(acc);
        }
    }
}

/// The full encoder/decoder stack.
#[derive(Debug, Clone, PartialEq)]
pub struct AutoencoderModel {
    encoder_dims: Vec<usize>,
    leaky_slope: f64,
    layers: Vec<Layer>,
}

/// Cached layer values from one forward pass: `activations[0]` is the input,
/// `activations[l]` the output of layer `l`; `pre_activations[l-1]` holds
/// layer `l`'s affine output before the nonlinearity.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub activations: Vec<Vec<f64>>,
    pub pre_activations: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn reconstruction(&self) -> &[f64] {
        self.activations.last().expect("cache holds the input at least")
    }

    /// Encoder output, i.e. the activation after the bottleneck layer.
    pub fn embedding(&self) -> &[f64] {
        &self.activations[ENCODER_LAYERS]
    }
}

/// Gradients for every layer, shaped like the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_for(model: &AutoencoderModel) -> Gradients {
        Gradients {
            weights: model.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            biases: model.layers.iter().map(|l| vec![0.0; l.bias.len()]).collect(),
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for w in &mut self.weights {
            for v in w {
                *v *= factor;
            }
        }
        for b in &mut self.biases {
            for v in b {
                *v *= factor;
            }
        }
    }

    fn reset(&mut self) {
        for w in &mut self.weights {
            w.fill(0.0);
        }
        for b in &mut self.biases {
            b.fill(0.0);
        }
    }
}

/// Initializes a model with Xavier-uniform weights (`±sqrt(6/(fan_in+fan_out))`)
/// and zero biases, deterministically per seed.
///
/// `encoder_dims` is the five-element chain `[d0, d1, d2, d3, d4]`; the
/// decoder mirrors it.
pub fn init_model(
    encoder_dims: &[usize],
    leaky_slope: f64,
    seed: u64,
) -> Result<AutoencoderModel, NeuralError> {
    if encoder_dims.len() != ENCODER_LAYERS + 1 {
        return Err(NeuralError::BadDims(format!(
            "expected {} encoder dims, got {}",
            ENCODER_LAYERS + 1,
            encoder_dims.len()
        )));
    }
    if encoder_dims.iter().any(|&d| d == 0) {
        return Err(NeuralError::BadDims("layer width of zero".into()));
    }
    let mut chain: Vec<usize> = encoder_dims.to_vec();
    chain.extend(encoder_dims.iter().rev().skip(1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let layers = chain
        .windows(2)
        .map(|pair| {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let weights = (0..fan_in * fan_out)
                .map(|_| (2.0 * rng.gen::<f64>() - 1.0) * bound)
                .collect();
            Layer {
                fan_in,
                fan_out,
                weights,
                bias: vec![0.0; fan_out],
            }
        })
        .collect();
    Ok(AutoencoderModel {
        encoder_dims: encoder_dims.to_vec(),
        leaky_slope,
        layers,
    })
}

impl AutoencoderModel {
    pub fn encoder_dims(&self) -> &[usize] {
        &self.encoder_dims
    }

    pub fn input_dim(&self) -> usize {
        self.encoder_dims[0]
    }

    pub fn embedding_dim(&self) -> usize {
        self.encoder_dims[ENCODER_LAYERS]
    }

    pub fn leaky_slope(&self) -> f64 {
        self.leaky_slope
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    fn check_input(&self, x: &[f64]) -> Result<(), NeuralError> {
        if x.len() != self.input_dim() {
            return Err(NeuralError::ShapeMismatch {
                want: self.input_dim(),
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(NeuralError::NonFiniteInput);
        }
        Ok(())
    }

    /// Full forward pass, caching pre-activations for backpropagation.
    pub fn forward(&self, x: &[f64]) -> Result<ForwardCache, NeuralError> {
        self.check_input(x)?;
        let last = self.layers.len() - 1;
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        let mut pre_activations = Vec::with_capacity(self.layers.len());
        activations.push(x.to_vec());
        for (l, layer) in self.layers.iter().enumerate() {
            let mut z = Vec::new();
            layer.matvec(activations.last().expect("at least the input"), &mut z);
            let a = if l == last {
                z.clone()
            } else {
                z.iter().map(|&v| leaky_relu(v, self.leaky_slope)).collect()
            };
            pre_activations.push(z);
            activations.push(a);
        }
        Ok(ForwardCache {
            activations,
            pre_activations,
        })
    }

    /// Runs the encoder half only.
    pub fn encode(&self, x: &[f64]) -> Result<Vec<f64>, NeuralError> {
        self.check_input(x)?;
        let mut current = x.to_vec();
        let mut z = Vec::new();
        for layer in &self.layers[..ENCODER_LAYERS] {
            layer.matvec(&current, &mut z);
            current.clear();
            current.extend(z.iter().map(|&v| leaky_relu(v, self.leaky_slope)));
        }
        Ok(current)
    }

    /// Analytic gradients of the cosine loss for one sample.
    pub fn backward(&self, x: &[f64], cache: &ForwardCache) -> Gradients {
        let mut grads = Gradients::zeros_for(self);
        self.backward_accumulate(x, cache, &mut grads);
        grads
    }

    /// Adds one sample's gradients into `grads` without allocating fresh
    /// buffers; used for batch accumulation.
    pub fn backward_accumulate(&self, x: &[f64], cache: &ForwardCache, grads: &mut Gradients) {
        let last = self.layers.len() - 1;
        // final layer is linear, so its delta is the raw loss gradient
        let mut delta = cosine_loss_grad_raw(x, cache.reconstruction());
        for l in (0..=last).rev() {
            let layer = &self.layers[l];
            let input = &cache.activations[l];
            let dw = &mut grads.weights[l];
            for i in 0..layer.fan_out {
                let d = delta[i];
                grads.biases[l][i] += d;
                let row = &mut dw[i * layer.fan_in..(i + 1) * layer.fan_in];
                for (slot, a) in row.iter_mut().zip(input) {
                    *slot += d * a;
                }
            }
            if l == 0 {
                break;
            }
            let mut prev = vec![0.0; layer.fan_in];
            for i in 0..layer.fan_out {
                let d = delta[i];
                let row = &layer.weights[i * layer.fan_in..(i + 1) * layer.fan_in];
                for (slot, w) in prev.iter_mut().zip(row) {
                    *slot += d * w;
                }
            }
            let z_prev = &cache.pre_activations[l - 1];
            for (slot, &z) in prev.iter_mut().zip(z_prev) {
                *slot *= leaky_relu_grad(z, self.leaky_slope);
            }
            delta = prev;
        }
    }

    fn param_shapes(&self) -> Vec<usize> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.len(), l.bias.len()])
            .collect()
    }

    /// One Adam update over every parameter tensor.
    pub fn apply_adam(
        &mut self,
        state: &mut AdamState,
        grads: &Gradients,
    ) -> Result<(), NeuralError> {
        let mut params: Vec<&mut [f64]> = Vec::with_capacity(self.layers.len() * 2);
        for layer in &mut self.layers {
            let Layer { weights, bias, .. } = layer;
            params.push(weights.as_mut_slice());
            params.push(bias.as_mut_slice());
        }
        let grad_slices: Vec<&[f64]> = grads
            .weights
            .iter()
            .zip(&grads.biases)
            .flat_map(|(w, b)| [w.as_slice(), b.as_slice()])
            .collect();
        adam_step(state, &mut params, &grad_slices)
    }

    /// Serializes to the little-endian `AEXP` format.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn write_to(&self, mut w: impl Write) -> io::Result<()> {
        w.write_all(MODEL_MAGIC)?;
        w.write_u32::<LittleEndian>(MODEL_VERSION)?;
        w.write_f64::<LittleEndian>(self.leaky_slope)?;
        w.write_u32::<LittleEndian>(self.layers.len() as u32)?;
        w.write_u32::<LittleEndian>(self.encoder_dims.len() as u32)?;
        for &d in &self.encoder_dims {
            w.write_u64::<LittleEndian>(d as u64)?;
        }
        for layer in &self.layers {
            for &v in &layer.weights {
                w.write_f64::<LittleEndian>(v)?;
            }
            for &v in &layer.bias {
                w.write_f64::<LittleEndian>(v)?;
            }
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), NeuralError> {
        let mut file = BufWriter::new(File::create(path)?);
        self.write_to(&mut file)?;
        file.flush()?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<AutoencoderModel, NeuralError> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)
            .map_err(|_| NeuralError::Corrupt("missing header".into()))?;
        if &magic != MODEL_MAGIC {
            return Err(NeuralError::NotAModelFile);
        }
        let version = r.read_u32::<LittleEndian>().map_err(truncated)?;
        if version != MODEL_VERSION {
            return Err(NeuralError::UnsupportedVersion(version));
        }
        let leaky_slope = r.read_f64::<LittleEndian>().map_err(truncated)?;
        let layer_count = r.read_u32::<LittleEndian>().map_err(truncated)? as usize;
        let dim_count = r.read_u32::<LittleEndian>().map_err(truncated)? as usize;
        if dim_count != ENCODER_LAYERS + 1 || layer_count != 2 * ENCODER_LAYERS {
            return Err(NeuralError::Corrupt(format!(
                "unexpected layer layout: {layer_count} layers, {dim_count} dims"
            )));
        }
        let mut encoder_dims = Vec::with_capacity(dim_count);
        for _ in 0..dim_count {
            encoder_dims.push(r.read_u64::<LittleEndian>().map_err(truncated)? as usize);
        }
        if encoder_dims.iter().any(|&d| d == 0) {
            return Err(NeuralError::Corrupt("layer width of zero".into()));
        }
        let mut chain: Vec<usize> = encoder_dims.clone();
        chain.extend(encoder_dims.iter().rev().skip(1));
        let mut layers = Vec::with_capacity(layer_count);
        for pair in chain.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let mut weights = vec![0.0; fan_in * fan_out];
            for v in &mut weights {
                *v = r.read_f64::<LittleEndian>().map_err(truncated)?;
            }
            let mut bias = vec![0.0; fan_out];
            for v in &mut bias {
                *v = r.read_f64::<LittleEndian>().map_err(truncated)?;
            }
            layers.push(Layer {
                fan_in,
                fan_out,
                weights,
                bias,
            });
        }
        Ok(AutoencoderModel {
            encoder_dims,
            leaky_slope,
            layers,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<AutoencoderModel, NeuralError> {
        AutoencoderModel::read_from(BufReader::new(File::open(path)?))
    }

    /// SHA-256 over the serialized bytes; identifies the exact parameters.
    pub fn fingerprint(&self) -> [u8; 32] {
        let digest = Sha256::digest(self.to_bytes());
        digest.into()
    }
}

fn truncated(_: io::Error) -> NeuralError {
    NeuralError::Corrupt("unexpected end of file".into())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Cosine reconstruction loss: `1 - x.y / (|x||y| + eps)`, in `[0, 2]`.
pub fn cosine_loss(x: &[f64], y: &[f64]) -> Result<f64, NeuralError> {
    if x.len() != y.len() {
        return Err(NeuralError::ShapeMismatch {
            want: x.len(),
            got: y.len(),
        });
    }
    let nx = norm(x);
    if nx == 0.0 {
        return Err(NeuralError::ZeroNormTarget);
    }
    Ok(1.0 - dot(x, y) / (nx * norm(y) + COSINE_EPS))
}

/// Gradient of the cosine loss with respect to the reconstruction `y`.
pub fn cosine_loss_gradient(x: &[f64], y: &[f64]) -> Result<Vec<f64>, NeuralError> {
    if x.len() != y.len() {
        return Err(NeuralError::ShapeMismatch {
            want: x.len(),
            got: y.len(),
        });
    }
    if norm(x) == 0.0 {
        return Err(NeuralError::ZeroNormTarget);
    }
    Ok(cosine_loss_grad_raw(x, y))
}

fn cosine_loss_grad_raw(x: &[f64], y: &[f64]) -> Vec<f64> {
    let nx = norm(x);
    let ny = norm(y);
    let s = dot(x, y);
    let denom = nx * ny + COSINE_EPS;
    if ny == 0.0 {
        // at the origin s = 0, so only the first term survives
        return x.iter().map(|&xi| -xi / denom).collect();
    }
    let scale = s * nx / (ny * denom * denom);
    x.iter()
        .zip(y)
        .map(|(&xi, &yi)| -xi / denom + scale * yi)
        .collect()
}

/// Adam optimizer state: per-parameter first and second moments plus the
/// step counter, over a flat list of parameter tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub learning_rate: f64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl AdamState {
    pub fn new(shapes: &[usize], learning_rate: f64) -> AdamState {
        AdamState {
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            learning_rate,
            m: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            v: shapes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    pub fn for_model(model: &AutoencoderModel, learning_rate: f64) -> AdamState {
        AdamState::new(&model.param_shapes(), learning_rate)
    }

    /// Second moments, for invariant checks.
    pub fn second_moments(&self) -> &[Vec<f64>] {
        &self.v
    }
}

/// One Adam step over a flat list of parameter tensors:
/// `m <- b1 m + (1-b1) g`, `v <- b2 v + (1-b2) g^2`, bias-corrected, then
/// `theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)`.
pub fn adam_step(
    state: &mut AdamState,
    params: &mut [&mut [f64]],
    grads: &[&[f64]],
) -> Result<(), NeuralError> {
    if params.len() != state.m.len() || grads.len() != state.m.len() {
        return Err(NeuralError::OptimizerShape(format!(
            "expected {} tensors, got {} params / {} grads",
            state.m.len(),
            params.len(),
            grads.len()
        )));
    }
    for (i, (p, g)) in params.iter().zip(grads).enumerate() {
        if p.len() != state.m[i].len() || g.len() != state.m[i].len() {
            return Err(NeuralError::OptimizerShape(format!(
                "tensor {i}: expected {} values, got {} params / {} grads",
                state.m[i].len(),
                p.len(),
                g.len()
            )));
        }
    }
    state.t += 1;
    let t = state.t as i32;
    let m_corr = 1.0 - state.beta1.powi(t);
    let v_corr = 1.0 - state.beta2.powi(t);
    for ((param, grad), (m, v)) in params
        .iter_mut()
        .zip(grads)
        .zip(state.m.iter_mut().zip(state.v.iter_mut()))
    {
        for k in 0..param.len() {
            let g = grad[k];
            m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * g;
            v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * g * g;
            let m_hat = m[k] / m_corr;
            let v_hat = v[k] / v_corr;
            param[k] -= state.learning_rate * m_hat / (v_hat.sqrt() + state.epsilon);
        }
    }
    Ok(())
}

/// Training hyperparameters. `dims` is the full five-element encoder chain;
/// `dims[0]` must equal the matrix vocabulary size.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub dims: Vec<usize>,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub leaky_slope: f64,
    pub seed: u64,
    pub log_progress: bool,
}

impl TrainConfig {
    /// Default configuration for a given corpus dimension.
    pub fn for_input_dim(input_dim: usize) -> TrainConfig {
        let mut dims = vec![input_dim];
        dims.extend(DEFAULT_HIDDEN_DIMS);
        TrainConfig {
            dims,
            epochs: DEFAULT_EPOCHS,
            batch_size: DEFAULT_BATCH_SIZE,
            learning_rate: DEFAULT_LEARNING_RATE,
            leaky_slope: DEFAULT_LEAKY_SLOPE,
            seed: 1,
            log_progress: true,
        }
    }

    fn validate(&self, matrix_dim: usize) -> Result<(), NeuralError> {
        if self.epochs == 0 {
            return Err(NeuralError::BadConfig("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(NeuralError::BadConfig("batch size must be at least 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(NeuralError::BadConfig("learning rate must be positive".into()));
        }
        if self.dims.first().copied() != Some(matrix_dim) {
            return Err(NeuralError::BadConfig(format!(
                "dims[0] = {:?} must equal the matrix dimension {matrix_dim}",
                self.dims.first()
            )));
        }
        Ok(())
    }
}

/// Per-epoch mean reconstruction loss and wall-clock seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epoch_losses: Vec<f64>,
    pub epoch_seconds: Vec<f64>,
    pub min_loss: f64,
}

/// Trains a freshly initialized model on the matrix rows.
///
/// Each epoch shuffles the rows with the seeded generator, walks minibatches,
/// averages per-sample gradients and applies one Adam step per batch. The
/// whole run is a deterministic function of `(matrix, config)` up to
/// wall-clock fields.
pub fn train(
    matrix: &SpecialistMatrix,
    config: &TrainConfig,
) -> Result<(AutoencoderModel, TrainReport), NeuralError> {
    if matrix.is_empty() {
        return Err(NeuralError::BadConfig("matrix has no rows".into()));
    }
    config.validate(matrix.dim())?;
    let mut model = init_model(&config.dims, config.leaky_slope, config.seed)?;
    let mut adam = AdamState::for_model(&model, config.learning_rate);
    // independent stream from the init RNG
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9E37_79B9_7F4A_7C15);

    let dense_rows: Vec<Vec<f64>> = matrix.rows().iter().map(|r| r.vector.to_dense()).collect();
    let n = dense_rows.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut grads = Gradients::zeros_for(&model);

    let mut epoch_losses = Vec::with_capacity(config.epochs);
    let mut epoch_seconds = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        let started = Instant::now();
        shuffle(&mut order, &mut shuffle_rng);
        let mut loss_sum = 0.0;
        for (batch_no, batch) in order.chunks(config.batch_size).enumerate() {
            grads.reset();
            for &row in batch {
                let x = &dense_rows[row];
                let cache = model.forward(x)?;
                let loss = cosine_loss(x, cache.reconstruction())?;
                if !loss.is_finite() {
                    return Err(NeuralError::NonFiniteLoss {
                        epoch,
                        batch: batch_no + 1,
                    });
                }
                loss_sum += loss;
                model.backward_accumulate(x, &cache, &mut grads);
            }
            grads.scale(1.0 / batch.len() as f64);
            model.apply_adam(&mut adam, &grads)?;
        }
        let mean_loss = loss_sum / n as f64;
        let seconds = started.elapsed().as_secs_f64();
        if config.log_progress {
            eprintln!("epoch={epoch} mean_loss={mean_loss} seconds={seconds:.3}");
        }
        epoch_losses.push(mean_loss);
        epoch_seconds.push(seconds);
    }
    let min_loss = epoch_losses.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((
        model,
        TrainReport {
            epoch_losses,
            epoch_seconds,
            min_loss,
        },
    ))
}

/// Fisher-Yates driven by the given generator.
fn shuffle(order: &mut [usize], rng: &mut ChaCha8Rng) {
    for i in (1..order.len()).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
}

/// Compares analytic gradients against central finite differences over every
/// parameter and returns the maximum relative error.
pub fn gradient_check(
    model: &AutoencoderModel,
    x: &[f64],
    h: f64,
) -> Result<f64, NeuralError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(NeuralError::BadStepSize);
    }
    let cache = model.forward(x)?;
    cosine_loss(x, cache.reconstruction())?;
    let analytic = model.backward(x, &cache);

    fn param_mut(model: &mut AutoencoderModel, l: usize, is_bias: bool, k: usize) -> &mut f64 {
        let layer = &mut model.layers_mut()[l];
        if is_bias {
            &mut layer.bias[k]
        } else {
            &mut layer.weights[k]
        }
    }

    let mut probe = model.clone();
    let mut max_rel = 0.0f64;
    for l in 0..model.layers().len() {
        for is_bias in [false, true] {
            let len = if is_bias {
                model.layers()[l].bias.len()
            } else {
                model.layers()[l].weights.len()
            };
            for k in 0..len {
                let original = *param_mut(&mut probe, l, is_bias, k);
                *param_mut(&mut probe, l, is_bias, k) = original + h;
                let plus = cosine_loss(x, probe.forward(x)?.reconstruction())?;
                *param_mut(&mut probe, l, is_bias, k) = original - h;
                let minus = cosine_loss(x, probe.forward(x)?.reconstruction())?;
                *param_mut(&mut probe, l, is_bias, k) = original;
                let numeric = (plus - minus) / (2.0 * h);
                let exact = if is_bias {
                    analytic.biases[l][k]
                } else {
                    analytic.weights[l][k]
                };
                let denom = (exact.abs() + numeric.abs()).max(1e-8);
                max_rel = max_rel.max((exact - numeric).abs() / denom);
            }
        }
    }
    Ok(max_rel)
}

/// Smallest absolute hidden pre-activation of one forward pass; inputs whose
/// margin is tiny sit next to a LeakyReLU kink, where finite differences are
/// unreliable.
pub fn kink_margin(model: &AutoencoderModel, x: &[f64]) -> Result<f64, NeuralError> {
    let cache = model.forward(x)?;
    let last = cache.pre_activations.len() - 1;
    let mut margin = f64::INFINITY;
    for z in &cache.pre_activations[..last] {
        for &v in z {
            margin = margin.min(v.abs());
        }
    }
    Ok(margin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectorize::{build_matrix, build_vocabulary, SpecialistDocument, WeightMode};
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn tiny_dims() -> Vec<usize> {
        vec![6, 5, 4, 3, 2]
    }

    fn random_input(dim: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..dim).map(|_| rng.gen_range(0.1..1.0)).collect()
    }

    #[test]
    fn init_is_deterministic_per_seed() {
        let a = init_model(&[100, 64, 48, 32, 20], 0.01, 7).unwrap();
        let b = init_model(&[100, 64, 48, 32, 20], 0.01, 7).unwrap();
        assert_eq!(a, b);
        let c = init_model(&[100, 64, 48, 32, 20], 0.01, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn init_rejects_wrong_layer_count() {
        assert!(matches!(
            init_model(&[100, 64, 48, 20], 0.01, 1),
            Err(NeuralError::BadDims(_))
        ));
    }

    #[test]
    fn init_biases_are_zero() {
        let model = init_model(&tiny_dims(), 0.01, 3).unwrap();
        assert_eq!(model.layers().len(), 8);
        for layer in model.layers() {
            assert!(layer.bias.iter().all(|&b| b == 0.0));
        }
    }

    #[test]
    fn init_weights_within_xavier_bound() {
        let model = init_model(&tiny_dims(), 0.01, 3).unwrap();
        for layer in model.layers() {
            let bound = (6.0 / (layer.fan_in + layer.fan_out) as f64).sqrt();
            assert!(layer.weights.iter().all(|w| w.abs() <= bound));
        }
    }

    #[test]
    fn leaky_relu_definition() {
        assert_eq!(leaky_relu(3.0, 0.01), 3.0);
        assert_eq!(leaky_relu(-1.0, 0.01), -0.01);
        assert_eq!(leaky_relu(0.0, 0.01), 0.0);
    }

    #[test]
    fn forward_zero_model_reconstructs_zero() {
        let mut model = init_model(&tiny_dims(), 0.01, 1).unwrap();
        for layer in model.layers_mut() {
            layer.weights.fill(0.0);
        }
        let cache = model.forward(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert!(cache.reconstruction().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn forward_scalar_chain_matches_closed_form() {
        // 1x1 layers with positive weights and input keep every
        // pre-activation positive, so the stack is a plain product
        let mut model = init_model(&[1, 1, 1, 1, 1], 0.01, 1).unwrap();
        let ws = [0.9, 1.1, 0.8, 1.2, 0.7, 1.3, 0.6, 1.4];
        for (layer, w) in model.layers_mut().iter_mut().zip(ws) {
            layer.weights[0] = w;
        }
        let x = 0.5;
        let cache = model.forward(&[x]).unwrap();
        let expected: f64 = ws.iter().product::<f64>() * x;
        assert!((cache.reconstruction()[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn forward_rejects_non_finite_input() {
        let model = init_model(&tiny_dims(), 0.01, 1).unwrap();
        assert!(matches!(
            model.forward(&[1.0, f64::NAN, 0.0, 0.0, 0.0, 0.0]),
            Err(NeuralError::NonFiniteInput)
        ));
    }

    #[test]
    fn cosine_loss_identical_orthogonal_opposite() {
        let x = vec![1.0, 2.0, 2.0];
        assert!(cosine_loss(&x, &x).unwrap() < 1e-12);
        let y = vec![2.0, -1.0, 0.0]; // orthogonal to x
        assert!((cosine_loss(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((cosine_loss(&x, &neg).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_loss_zero_target_is_error() {
        assert!(matches!(
            cosine_loss(&[0.0, 0.0], &[1.0, 1.0]),
            Err(NeuralError::ZeroNormTarget)
        ));
    }

    #[test]
    fn loss_gradient_vanishes_at_positive_scaling() {
        let x = vec![0.3, -0.4, 0.5, 1.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v).collect();
        let grad = cosine_loss_gradient(&x, &y).unwrap();
        // exact zero up to the eps guard in the denominator
        assert!(grad.iter().all(|g| g.abs() < 1e-9), "grad = {grad:?}");
    }

    #[test]
    fn backward_matches_hand_derived_scalar_chain() {
        let mut model = init_model(&[1, 1, 1, 1, 1], 0.01, 1).unwrap();
        let ws = [0.9, 1.1, 0.8, 1.2, 0.7, 1.3, 0.6, 1.4];
        for (layer, w) in model.layers_mut().iter_mut().zip(ws) {
            layer.weights[0] = w;
        }
        let x = 0.5;
        let cache = model.forward(&[x]).unwrap();
        let grads = model.backward(&[x], &cache);
        // loss = eps / (W x^2 + eps) with W the product of all weights, so
        // dL/dw_l = -eps x^2 (W / w_l) / (W x^2 + eps)^2
        let w_total: f64 = ws.iter().product();
        for (l, &w) in ws.iter().enumerate() {
            let expected =
                -COSINE_EPS * x * x * (w_total / w) / (w_total * x * x + COSINE_EPS).powi(2);
            let got = grads.weights[l][0];
            assert!(
                ((got - expected) / expected).abs() < 1e-6,
                "layer {l}: got {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn backward_matches_finite_differences_on_random_models() {
        for seed in 0..5 {
            let model = init_model(&[7, 6, 5, 4, 3], 0.01, seed).unwrap();
            let x = random_input(7, seed ^ 0xABCD);
            if kink_margin(&model, &x).unwrap() < 1e-6 {
                continue;
            }
            let err = gradient_check(&model, &x, 1e-5).unwrap();
            assert!(err < 1e-4, "seed {seed}: relative error {err}");
        }
    }

    #[test]
    fn gradient_check_linear_chain_is_machine_precision() {
        let mut model = init_model(&[2, 2, 2, 2, 2], 0.01, 9).unwrap();
        for layer in model.layers_mut() {
            // positive weights keep all pre-activations positive for
            // positive input, so no kink is crossed
            for w in &mut layer.weights {
                *w = w.abs() + 0.2;
            }
        }
        let err = gradient_check(&model, &[0.7, 0.9], 1e-5).unwrap();
        assert!(err < 1e-8, "relative error {err}");
    }

    #[test]
    fn gradient_check_rejects_zero_step() {
        let model = init_model(&tiny_dims(), 0.01, 1).unwrap();
        assert!(matches!(
            gradient_check(&model, &[1.0; 6], 0.0),
            Err(NeuralError::BadStepSize)
        ));
    }

    #[test]
    fn adam_first_step_is_signed_learning_rate() {
        let mut state = AdamState::new(&[3], 0.001);
        let mut params = vec![vec![1.0, -2.0, 0.5]];
        let grads = vec![vec![10.0, -0.3, 0.0001]];
        let before = params[0].clone();
        {
            let mut slices: Vec<&mut [f64]> = params.iter_mut().map(|p| p.as_mut_slice()).collect();
            let gslices: Vec<&[f64]> = grads.iter().map(|g| g.as_slice()).collect();
            adam_step(&mut state, &mut slices, &gslices).unwrap();
        }
        for k in 0..3 {
            let delta = params[0][k] - before[k];
            let expected = -0.001 * grads[0][k].signum();
            // first-step bias correction gives m_hat = g, sqrt(v_hat) = |g|
            assert!(
                (delta - expected).abs() < 1e-9,
                "k={k}: delta {delta}, expected {expected}"
            );
        }
    }

    #[test]
    fn adam_zero_gradient_is_identity() {
        let mut state = AdamState::new(&[4], 0.01);
        let mut params = vec![vec![1.0, -2.0, 0.5, 3.0]];
        let before = params[0].clone();
        for _ in 0..10 {
            let mut slices: Vec<&mut [f64]> = params.iter_mut().map(|p| p.as_mut_slice()).collect();
            adam_step(&mut state, &mut slices, &[&[0.0; 4]]).unwrap();
        }
        assert_eq!(params[0], before);
    }

    #[test]
    fn adam_rejects_shape_mismatch() {
        let mut state = AdamState::new(&[3], 0.01);
        let mut params = vec![vec![1.0, 2.0]];
        let mut slices: Vec<&mut [f64]> = params.iter_mut().map(|p| p.as_mut_slice()).collect();
        assert!(matches!(
            adam_step(&mut state, &mut slices, &[&[0.0, 0.0]]),
            Err(NeuralError::OptimizerShape(_))
        ));
    }

    #[test]
    fn adam_second_moments_stay_non_negative() {
        let mut state = AdamState::new(&[2], 0.01);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut params = vec![vec![0.3, -0.8]];
        for _ in 0..200 {
            let g = vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let mut slices: Vec<&mut [f64]> = params.iter_mut().map(|p| p.as_mut_slice()).collect();
            adam_step(&mut state, &mut slices, &[g.as_slice()]).unwrap();
            assert!(state.second_moments()[0].iter().all(|&v| v >= 0.0));
        }
    }

    fn small_matrix(docs: usize, dim: usize, seed: u64) -> SpecialistMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let documents: Vec<SpecialistDocument> = (0..docs)
            .map(|i| {
                let mut radical_counts = BTreeMap::new();
                for t in 0..dim {
                    if rng.gen_bool(0.3) {
                        radical_counts.insert(format!("t{t:04}"), rng.gen_range(1..4));
                    }
                }
                radical_counts.insert(format!("u{i:04}"), 1); // keep rows non-empty and docs distinct
                SpecialistDocument {
                    specialist_id: format!("s{i:03}"),
                    radical_counts,
                }
            })
            .collect();
        let vocab = build_vocabulary(&documents, 1).unwrap();
        build_matrix(&documents, &vocab, WeightMode::TfIdf).unwrap().0
    }

    fn quick_config(matrix: &SpecialistMatrix, epochs: usize) -> TrainConfig {
        TrainConfig {
            dims: vec![matrix.dim(), 12, 8, 6, 4],
            epochs,
            batch_size: 4,
            learning_rate: 1e-3,
            leaky_slope: 0.01,
            seed: 1,
            log_progress: false,
        }
    }

    #[test]
    fn train_is_deterministic() {
        let matrix = small_matrix(12, 20, 11);
        let config = quick_config(&matrix, 3);
        let (m1, r1) = train(&matrix, &config).unwrap();
        let (m2, r2) = train(&matrix, &config).unwrap();
        assert_eq!(m1.to_bytes(), m2.to_bytes());
        assert_eq!(r1.epoch_losses, r2.epoch_losses);
    }

    #[test]
    fn train_reduces_loss_on_small_corpus() {
        let matrix = small_matrix(24, 30, 3);
        let (_, report) = train(&matrix, &quick_config(&matrix, 8)).unwrap();
        assert!(report.epoch_losses.last().unwrap() < &report.epoch_losses[0]);
        assert!(report.epoch_losses.iter().all(|&l| (0.0..=2.0).contains(&l)));
        assert_eq!(report.min_loss, report.epoch_losses.iter().copied().fold(f64::INFINITY, f64::min));
    }

    #[test]
    fn train_rejects_mismatched_dims() {
        let matrix = small_matrix(6, 10, 4);
        let mut config = quick_config(&matrix, 1);
        config.dims[0] = matrix.dim() + 1;
        assert!(matches!(
            train(&matrix, &config),
            Err(NeuralError::BadConfig(_))
        ));
    }

    #[test]
    fn encode_has_bottleneck_width_and_is_pure() {
        let model = init_model(&[50, 32, 28, 24, 20], 0.01, 2).unwrap();
        let x = random_input(50, 77);
        let e1 = model.encode(&x).unwrap();
        let e2 = model.encode(&x).unwrap();
        assert_eq!(e1.len(), 20);
        assert_eq!(e1, e2);
    }

    #[test]
    fn encode_matches_forward_cache() {
        let model = init_model(&tiny_dims(), 0.01, 5).unwrap();
        let x = random_input(6, 6);
        let cache = model.forward(&x).unwrap();
        assert_eq!(model.encode(&x).unwrap(), cache.embedding());
    }

    #[test]
    fn encode_ignores_decoder_parameters() {
        let model = init_model(&tiny_dims(), 0.01, 5).unwrap();
        let x = random_input(6, 8);
        let before = model.encode(&x).unwrap();
        let mut perturbed = model.clone();
        for layer in &mut perturbed.layers_mut()[ENCODER_LAYERS..] {
            for w in &mut layer.weights {
                *w += 1.0;
            }
        }
        assert_eq!(perturbed.encode(&x).unwrap(), before);
    }

    #[test]
    fn model_file_round_trip_is_bit_exact() {
        let model = init_model(&tiny_dims(), 0.02, 13).unwrap();
        let bytes = model.to_bytes();
        let loaded = AutoencoderModel::read_from(bytes.as_slice()).unwrap();
        assert_eq!(loaded, model);
        assert_eq!(loaded.to_bytes(), bytes);
        assert_eq!(loaded.fingerprint(), model.fingerprint());
    }

    #[test]
    fn model_load_rejects_bad_magic() {
        let model = init_model(&tiny_dims(), 0.01, 1).unwrap();
        let mut bytes = model.to_bytes();
        bytes[0] = b'Z';
        assert!(matches!(
            AutoencoderModel::read_from(bytes.as_slice()),
            Err(NeuralError::NotAModelFile)
        ));
    }

    #[test]
    fn model_load_rejects_unknown_version() {
        let model = init_model(&tiny_dims(), 0.01, 1).unwrap();
        let mut bytes = model.to_bytes();
        bytes[4..8].copy_from_slice(&99u32.to_le_bytes());
        assert!(matches!(
            AutoencoderModel::read_from(bytes.as_slice()),
            Err(NeuralError::UnsupportedVersion(99))
        ));
    }

    #[test]
    fn model_load_rejects_truncation() {
        let model = init_model(&tiny_dims(), 0.01, 1).unwrap();
        let bytes = model.to_bytes();
        assert!(matches!(
            AutoencoderModel::read_from(&bytes[..bytes.len() - 9]),
            Err(NeuralError::Corrupt(_))
        ));
    }

    proptest! {
        #[test]
        fn cosine_loss_stays_in_bounds(
            xs in prop::collection::vec(-10.0f64..10.0, 2..16),
            ys in prop::collection::vec(-10.0f64..10.0, 2..16),
        ) {
            prop_assume!(xs.len() == ys.len());
            prop_assume!(norm(&xs) > 1e-6);
            let loss = cosine_loss(&xs, &ys).unwrap();
            prop_assert!((0.0..=2.0).contains(&loss), "loss = {}", loss);
        }
    }
}
