//! Scalar-input, scalar-output feed-forward network.
//!
//! Input derivatives come from pushing a truncated Taylor jet through every
//! layer. Parameter gradients of any linear combination of those derivatives
//! come from a reverse sweep over the same jet computation, so one forward
//! pass serves both the residual evaluation and the gradient.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::taylor::{sigmoid, sigmoid_phi, tanh_phi};
use crate::MAX_ORDER;

/// `(N(x), N'(x), ..., N^(order)(x))` at a single point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    values: Vec<f64>,
}

impl Jet {
    pub fn new(values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "a jet holds at least the value");
        Self { values }
    }

    /// The jet of a network that outputs zero everywhere.
    pub fn zero(order: usize) -> Self {
        Self::new(vec![0.0; order + 1])
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Activation {
    #[default]
    Sigmoid,
    Tanh,
}

impl Activation {
    fn value(self, z: f64) -> f64 {
        match self {
            Activation::Sigmoid => sigmoid(z),
            Activation::Tanh => z.tanh(),
        }
    }

    fn phi(self, f: &[f64], m: usize) -> f64 {
        match self {
            Activation::Sigmoid => sigmoid_phi(f, m),
            Activation::Tanh => tanh_phi(f, m),
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigmoid" => Ok(Activation::Sigmoid),
            "tanh" => Ok(Activation::Tanh),
            other => Err(Error::BadParameter(format!("unknown activation `{other}`"))),
        }
    }
}

/// Offsets of one layer inside the flat parameter vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct LayerLayout {
    inputs: usize,
    outputs: usize,
    weights: usize,
    biases: usize,
}

fn layouts(sizes: &[usize]) -> Vec<LayerLayout> {
    let mut offset = 0;
    sizes
        .windows(2)
        .map(|w| {
            let l = LayerLayout {
                inputs: w[0],
                outputs: w[1],
                weights: offset,
                biases: offset + w[0] * w[1],
            };
            offset += w[0] * w[1] + w[1];
            l
        })
        .collect()
}

fn validate_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.len() < 2 {
        return Err(Error::BadShape(format!(
            "need at least an input and an output layer, got {sizes:?}"
        )));
    }
    if sizes[0] != 1 || sizes[sizes.len() - 1] != 1 {
        return Err(Error::BadShape(format!(
            "network must map a scalar to a scalar, got {sizes:?}"
        )));
    }
    if sizes.contains(&0) {
        return Err(Error::BadShape(format!("empty layer in {sizes:?}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    layer_sizes: Vec<usize>,
    activation: Activation,
    seed: u64,
    params: Vec<f64>,
    layout: Vec<LayerLayout>,
}

impl Mlp {
    /// Weights uniform in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`, biases zero.
    pub fn new(layer_sizes: &[usize], activation: Activation, seed: u64) -> Result<Self> {
        validate_sizes(layer_sizes)?;
        let layout = layouts(layer_sizes);
        let total = layout.last().map(|l| l.biases + l.outputs).unwrap_or(0);
        let mut params = vec![0.0; total];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for l in &layout {
            let bound = 1.0 / (l.inputs as f64).sqrt();
            let dist = Uniform::new_inclusive(-bound, bound);
            for w in &mut params[l.weights..l.biases] {
                *w = dist.sample(&mut rng);
            }
        }
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            activation,
            seed,
            params,
            layout,
        })
    }

    /// Network with explicit parameters in the flat layout used by `params()`.
    pub fn from_params(layer_sizes: &[usize], activation: Activation, params: Vec<f64>) -> Result<Self> {
        validate_sizes(layer_sizes)?;
        let layout = layouts(layer_sizes);
        let total = layout.last().map(|l| l.biases + l.outputs).unwrap_or(0);
        if params.len() != total {
            return Err(Error::LengthMismatch {
                expected: total,
                got: params.len(),
            });
        }
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            activation,
            seed: 0,
            params,
            layout,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// All parameters; per layer the row-major weight matrix followed by the biases.
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn num_layers(&self) -> usize {
        self.layout.len()
    }

    /// Shape `(rows, cols)` of the weight matrix of `layer`.
    pub fn weight_shape(&self, layer: usize) -> (usize, usize) {
        let l = self.layout[layer];
        (l.outputs, l.inputs)
    }

    pub fn weight(&self, layer: usize, row: usize, col: usize) -> f64 {
        let l = self.layout[layer];
        self.params[l.weights + row * l.inputs + col]
    }

    pub fn bias(&self, layer: usize, row: usize) -> f64 {
        self.params[self.layout[layer].biases + row]
    }

    /// Plain forward value `N(x)`.
    pub fn forward(&self, x: f64) -> f64 {
        let mut h = vec![x];
        for (li, l) in self.layout.iter().enumerate() {
            let hidden = li + 1 < self.layout.len();
            h = (0..l.outputs)
                .map(|i| {
                    let row = &self.params[l.weights + i * l.inputs..l.weights + (i + 1) * l.inputs];
                    let z = row.iter().zip(&h).map(|(w, v)| w * v).sum::<f64>() + self.params[l.biases + i];
                    if hidden {
                        self.activation.value(z)
                    } else {
                        z
                    }
                })
                .collect();
        }
        h[0]
    }

    pub fn forward_jet(&self, x: f64, order: usize) -> Result<Jet> {
        Ok(self.forward_pass(x, order)?.jet())
    }

    /// Gradient with respect to every parameter of `sum_k cotangents[k] * N^(k)(x)`.
    pub fn backprop_jet(&self, x: f64, order: usize, cotangents: &[f64]) -> Result<ParamGradient> {
        let pass = self.forward_pass(x, order)?;
        let mut grad = ParamGradient::zeros_like(self);
        pass.backprop_into(self, cotangents, &mut grad)?;
        Ok(grad)
    }

    /// Forward Taylor pass keeping every intermediate needed by the reverse sweep.
    pub fn forward_pass(&self, x: f64, order: usize) -> Result<JetPass> {
        if order > MAX_ORDER {
            return Err(Error::OrderTooHigh(order));
        }
        let width = order + 1;
        let mut input = vec![0.0; width];
        input[0] = x;
        if order >= 1 {
            input[1] = 1.0;
        }
        let mut inputs = Vec::with_capacity(self.layout.len());
        let mut pre = Vec::with_capacity(self.layout.len());
        let mut phis = Vec::with_capacity(self.layout.len());
        let mut h = input;
        for (li, l) in self.layout.iter().enumerate() {
            let mut z = vec![0.0; l.outputs * width];
            for i in 0..l.outputs {
                let zi = &mut z[i * width..(i + 1) * width];
                for j in 0..l.inputs {
                    let w = self.params[l.weights + i * l.inputs + j];
                    for (zk, hk) in zi.iter_mut().zip(&h[j * width..(j + 1) * width]) {
                        *zk += w * hk;
                    }
                }
                zi[0] += self.params[l.biases + i];
            }
            let hidden = li + 1 < self.layout.len();
            let next = if hidden {
                let mut f = vec![0.0; l.outputs * width];
                let mut phi = vec![0.0; l.outputs * width];
                for i in 0..l.outputs {
                    self.activation_jet(
                        &z[i * width..(i + 1) * width],
                        &mut f[i * width..(i + 1) * width],
                        &mut phi[i * width..(i + 1) * width],
                    );
                }
                phis.push(phi);
                f
            } else {
                z.clone()
            };
            inputs.push(h);
            pre.push(z);
            h = next;
        }
        Ok(JetPass {
            order,
            inputs,
            pre,
            phis,
            output: h,
        })
    }

    /// Taylor coefficients of `act(a)` into `f`, and of `act'(a)` into `phi`
    /// (entries `0..order`, with `phi[0] = act'(a0)` also when `order == 0`).
    fn activation_jet(&self, a: &[f64], f: &mut [f64], phi: &mut [f64]) {
        let order = a.len() - 1;
        f[0] = self.activation.value(a[0]);
        phi[0] = self.activation.phi(f, 0);
        for k in 1..=order {
            if k >= 2 {
                phi[k - 1] = self.activation.phi(f, k - 1);
            }
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * a[j] * phi[k - j];
            }
            f[k] = acc / k as f64;
        }
    }
}

/// Intermediates of one forward Taylor pass. Coefficients are stored
/// unit-major, `order + 1` normalized Taylor coefficients per unit.
#[derive(Clone, Debug)]
pub struct JetPass {
    order: usize,
    inputs: Vec<Vec<f64>>,
    pre: Vec<Vec<f64>>,
    phis: Vec<Vec<f64>>,
    output: Vec<f64>,
}

impl JetPass {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn jet(&self) -> Jet {
        let mut fact = 1.0;
        let values = self
            .output
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    fact *= k as f64;
                }
                c * fact
            })
            .collect();
        Jet::new(values)
    }

    /// Accumulate `d/dp sum_k cotangents[k] * N^(k)(x)` into `grad`.
    pub fn backprop_into(&self, mlp: &Mlp, cotangents: &[f64], grad: &mut ParamGradient) -> Result<()> {
        let width = self.order + 1;
        if cotangents.len() != width {
            return Err(Error::LengthMismatch {
                expected: width,
                got: cotangents.len(),
            });
        }
        if grad.values.len() != mlp.params.len() {
            return Err(Error::ShapeMismatch("gradient does not match the network".into()));
        }
        // adjoints of normalized coefficients: N^(k) = k! * c_k
        let mut fact = 1.0;
        let mut adj: Vec<f64> = cotangents
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    fact *= k as f64;
                }
                c * fact
            })
            .collect();

        let last = mlp.layout.len() - 1;
        for li in (0..=last).rev() {
            let l = mlp.layout[li];
            let z_adj = if li == last {
                adj
            } else {
                let mut z_adj = vec![0.0; l.outputs * width];
                let phis = &self.phis[li];
                for i in 0..l.outputs {
                    let s = i * width..(i + 1) * width;
                    // the activation output is the next layer's input
                    activation_reverse(
                        mlp.activation,
                        &self.pre[li][s.clone()],
                        &self.inputs[li + 1][s.clone()],
                        &phis[s.clone()],
                        &mut adj[s.clone()],
                        &mut z_adj[s],
                    );
                }
                z_adj
            };
            let h = &self.inputs[li];
            for i in 0..l.outputs {
                let zi = &z_adj[i * width..(i + 1) * width];
                for j in 0..l.inputs {
                    let hj = &h[j * width..(j + 1) * width];
                    grad.values[l.weights + i * l.inputs + j] += zi.iter().zip(hj).map(|(a, b)| a * b).sum::<f64>();
                }
                grad.values[l.biases + i] += zi[0];
            }
            if li > 0 {
                let mut h_adj = vec![0.0; l.inputs * width];
                for i in 0..l.outputs {
                    let zi = &z_adj[i * width..(i + 1) * width];
                    for j in 0..l.inputs {
                        let w = mlp.params[l.weights + i * l.inputs + j];
                        for (ha, za) in h_adj[j * width..(j + 1) * width].iter_mut().zip(zi) {
                            *ha += w * za;
                        }
                    }
                }
                adj = h_adj;
            } else {
                adj = Vec::new();
            }
        }
        Ok(())
    }
}

/// Reverse sweep of `activation_jet`: consumes the output adjoints `f_adj`
/// and accumulates pre-activation adjoints into `a_adj`.
fn activation_reverse(act: Activation, a: &[f64], f: &[f64], phi: &[f64], f_adj: &mut [f64], a_adj: &mut [f64]) {
    let order = a.len() - 1;
    let mut phi_adj = vec![0.0; order.max(1)];
    for k in (1..=order).rev() {
        let fk = f_adj[k] / k as f64;
        for j in 1..=k {
            a_adj[j] += j as f64 * phi[k - j] * fk;
            phi_adj[k - j] += j as f64 * a[j] * fk;
        }
        // phi_{k-1} = [s_{k-1}] - sum_i f_i f_{k-1-i}   (sigmoid)
        //           = [m == 0] - sum_i f_i f_{k-1-i}    (tanh)
        let m = k - 1;
        let pa = phi_adj[m];
        if act == Activation::Sigmoid {
            f_adj[m] += pa;
        }
        for p in 0..=m {
            f_adj[p] -= 2.0 * f[m - p] * pa;
        }
    }
    a_adj[0] += phi[0] * f_adj[0];
}

/// Gradient with the same flat layout as the owning network's parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamGradient {
    layer_sizes: Vec<usize>,
    values: Vec<f64>,
}

impl ParamGradient {
    pub fn zeros_like(mlp: &Mlp) -> Self {
        Self {
            layer_sizes: mlp.layer_sizes.clone(),
            values: vec![0.0; mlp.params.len()],
        }
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn fill_zero(&mut self) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
    }

    pub fn weight(&self, layer: usize, row: usize, col: usize) -> f64 {
        let l = layouts(&self.layer_sizes)[layer];
        self.values[l.weights + row * l.inputs + col]
    }

    pub fn bias(&self, layer: usize, row: usize) -> f64 {
        let l = layouts(&self.layer_sizes)[layer];
        self.values[l.biases + row]
    }
}
