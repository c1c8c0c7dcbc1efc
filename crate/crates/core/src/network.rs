//! Network data model: weights, biases and skip topology of a ReLU MLP with an
//! affine output head, plus the reference forward pass that every other module
//! is checked against.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pattern::ActivationPattern;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("malformed network document: {0}")]
    Malformed(String),
    #[error("shape mismatch in `{field}`: {detail}")]
    Shape { field: String, detail: String },
    #[error("non-finite value in `{field}`")]
    NonFinite { field: String },
    #[error("invalid skip {from}->{to} in `{field}`: {reason}")]
    InvalidSkip {
        field: String,
        from: usize,
        to: usize,
        reason: String,
    },
    #[error("input has dimension {got}, network expects {expected}")]
    Dimension { expected: usize, got: usize },
}

/// An affine layer `x -> W x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    pub fn new(weights: Array2<f64>, bias: Array1<f64>) -> Self {
        Dense { weights, bias }
    }

    pub fn out_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn in_dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn apply(&self, x: &Array1<f64>) -> Array1<f64> {
        self.weights.dot(x) + &self.bias
    }
}

/// Skip connection: the post-activation output of hidden layer `from` is
/// added to the input of hidden layer `to`. Both indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Skip {
    pub from: usize,
    pub to: usize,
}

impl Skip {
    pub fn new(from: usize, to: usize) -> Self {
        Skip { from, to }
    }
}

impl fmt::Display for Skip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.from, self.to)
    }
}

impl FromStr for Skip {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || NetworkError::Malformed(format!("skip `{s}` is not of the form `a-b`"));
        let (a, b) = s.trim().split_once('-').ok_or_else(bad)?;
        let from = a.trim().parse().map_err(|_| bad())?;
        let to = b.trim().parse().map_err(|_| bad())?;
        Ok(Skip { from, to })
    }
}

/// Parses a skip list such as `"1-3,2-4"`. The empty string is the empty list.
pub fn parse_skip_list(s: &str) -> Result<Vec<Skip>, NetworkError> {
    s.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// A validated ReLU network. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    input_dim: usize,
    hidden: Vec<Dense>,
    output: Dense,
    skips: Vec<Skip>,
}

/// Pre- and post-activation values of every hidden layer plus the output.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    pub pre_activations: Vec<Array1<f64>>,
    pub post_activations: Vec<Array1<f64>>,
    pub output: Array1<f64>,
}

impl NetworkSpec {
    /// Validates shapes, finiteness and skip constraints. Skips are stored
    /// sorted.
    pub fn new(
        input_dim: usize,
        hidden: Vec<Dense>,
        output: Dense,
        skips: Vec<Skip>,
    ) -> Result<Self, NetworkError> {
        if input_dim == 0 {
            return Err(shape("input_dim", "must be positive"));
        }
        if hidden.is_empty() {
            return Err(shape("hidden_layers", "at least one hidden layer is required"));
        }
        let mut prev = input_dim;
        for (i, layer) in hidden.iter().enumerate() {
            check_dense(layer, prev, &format!("hidden_layers[{i}]"))?;
            prev = layer.out_dim();
        }
        check_dense(&output, prev, "output")?;

        let depth = hidden.len();
        let mut seen = BTreeSet::new();
        for (i, skip) in skips.iter().enumerate() {
            let field = format!("skips[{i}]");
            let invalid = |reason: String| NetworkError::InvalidSkip {
                field: field.clone(),
                from: skip.from,
                to: skip.to,
                reason,
            };
            if skip.from < 1 {
                return Err(invalid("source layer index must be at least 1".into()));
            }
            if skip.to < skip.from + 2 {
                return Err(invalid("destination must be at least two layers after the source".into()));
            }
            if skip.to > depth {
                return Err(invalid(format!("destination exceeds the {depth} hidden layers")));
            }
            let src_width = hidden[skip.from - 1].out_dim();
            let dst_input = hidden[skip.to - 2].out_dim();
            if src_width != dst_input {
                return Err(invalid(format!(
                    "source width {src_width} differs from destination input width {dst_input}"
                )));
            }
            if !seen.insert(*skip) {
                return Err(invalid("duplicate skip".into()));
            }
        }

        Ok(NetworkSpec {
            input_dim,
            hidden,
            output,
            skips: seen.into_iter().collect(),
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output.out_dim()
    }

    pub fn hidden_layers(&self) -> &[Dense] {
        &self.hidden
    }

    pub fn output(&self) -> &Dense {
        &self.output
    }

    pub fn skips(&self) -> &[Skip] {
        &self.skips
    }

    pub fn depth(&self) -> usize {
        self.hidden.len()
    }

    pub fn widths(&self) -> Vec<usize> {
        self.hidden.iter().map(Dense::out_dim).collect()
    }

    pub fn total_neurons(&self) -> usize {
        self.hidden.iter().map(Dense::out_dim).sum()
    }

    /// Source layers (1-based) whose outputs feed the input of layer `dst`.
    pub fn skip_sources(&self, dst: usize) -> impl Iterator<Item = usize> + '_ {
        self.skips.iter().filter(move |s| s.to == dst).map(|s| s.from)
    }

    /// The same weights with every skip removed.
    pub fn without_skips(&self) -> NetworkSpec {
        NetworkSpec {
            skips: Vec::new(),
            ..self.clone()
        }
    }

    fn check_input(&self, x: &[f64]) -> Result<(), NetworkError> {
        if x.len() != self.input_dim {
            return Err(NetworkError::Dimension {
                expected: self.input_dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Reference forward pass.
    pub fn forward(&self, x: &[f64]) -> Result<ForwardTrace, NetworkError> {
        self.check_input(x)?;
        let mut pre = Vec::with_capacity(self.depth());
        let mut post: Vec<Array1<f64>> = Vec::with_capacity(self.depth());
        let mut input = Array1::from(x.to_vec());
        for (l, layer) in self.hidden.iter().enumerate() {
            let dst = l + 1;
            for src in self.skip_sources(dst) {
                input += &post[src - 1];
            }
            let rho = layer.apply(&input);
            let nu = rho.mapv(|v| v.max(0.0));
            pre.push(rho);
            post.push(nu.clone());
            input = nu;
        }
        let output = self.output.apply(&input);
        Ok(ForwardTrace {
            pre_activations: pre,
            post_activations: post,
            output,
        })
    }

    /// Active bit is set iff the pre-activation is `>= 0`.
    pub fn activation_pattern(&self, x: &[f64]) -> Result<ActivationPattern, NetworkError> {
        let trace = self.forward(x)?;
        Ok(ActivationPattern::new(
            trace
                .pre_activations
                .iter()
                .map(|rho| rho.iter().map(|&v| v >= 0.0).collect())
                .collect(),
        ))
    }
}

fn shape(field: &str, detail: &str) -> NetworkError {
    NetworkError::Shape {
        field: field.to_string(),
        detail: detail.to_string(),
    }
}

fn check_dense(layer: &Dense, in_dim: usize, field: &str) -> Result<(), NetworkError> {
    if layer.out_dim() == 0 {
        return Err(shape(&format!("{field}.weights"), "layer must have at least one row"));
    }
    if layer.in_dim() != in_dim {
        return Err(shape(
            &format!("{field}.weights"),
            &format!("expected {in_dim} columns, found {}", layer.in_dim()),
        ));
    }
    if layer.bias.len() != layer.out_dim() {
        return Err(shape(
            &format!("{field}.bias"),
            &format!("expected length {}, found {}", layer.out_dim(), layer.bias.len()),
        ));
    }
    if layer.weights.iter().any(|v| !v.is_finite()) {
        return Err(NetworkError::NonFinite {
            field: format!("{field}.weights"),
        });
    }
    if layer.bias.iter().any(|v| !v.is_finite()) {
        return Err(NetworkError::NonFinite {
            field: format!("{field}.bias"),
        });
    }
    Ok(())
}

/// Kaiming-uniform initialization with ReLU gain: weights uniform in
/// `±sqrt(6 / fan_in)`, biases uniform in `±1 / sqrt(fan_in)`. The output head
/// uses the same rule. Identical arguments give a bit-identical network.
pub fn init_kaiming(
    layer_widths: &[usize],
    input_dim: usize,
    output_dim: usize,
    skips: &[Skip],
    seed: u64,
) -> Result<NetworkSpec, NetworkError> {
    if let Some(i) = layer_widths.iter().position(|&w| w == 0) {
        return Err(shape(&format!("hidden_layers[{i}]"), "width must be positive"));
    }
    if input_dim == 0 || output_dim == 0 {
        return Err(shape("input_dim", "input and output dimensions must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fan_in = input_dim;
    let mut hidden = Vec::with_capacity(layer_widths.len());
    for &width in layer_widths {
        hidden.push(kaiming_dense(&mut rng, width, fan_in));
        fan_in = width;
    }
    let output = kaiming_dense(&mut rng, output_dim, fan_in);
    NetworkSpec::new(input_dim, hidden, output, skips.to_vec())
}

fn kaiming_dense(rng: &mut ChaCha8Rng, rows: usize, fan_in: usize) -> Dense {
    let w_bound = (6.0 / fan_in as f64).sqrt();
    let b_bound = 1.0 / (fan_in as f64).sqrt();
    let weights = Array2::from_shape_fn((rows, fan_in), |_| rng.gen_range(-w_bound..w_bound));
    let bias = Array1::from_shape_fn(rows, |_| rng.gen_range(-b_bound..b_bound));
    Dense { weights, bias }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerDocument {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDocument {
    input_dim: usize,
    hidden_layers: Vec<LayerDocument>,
    output: LayerDocument,
    #[serde(default)]
    skips: Vec<Skip>,
}

fn dense_from_doc(doc: LayerDocument, field: &str) -> Result<Dense, NetworkError> {
    let rows = doc.weights.len();
    let cols = doc.weights.first().map_or(0, Vec::len);
    if let Some(r) = doc.weights.iter().position(|row| row.len() != cols) {
        return Err(shape(
            &format!("{field}.weights[{r}]"),
            &format!("row has {} entries, expected {cols}", doc.weights[r].len()),
        ));
    }
    let flat: Vec<f64> = doc.weights.into_iter().flatten().collect();
    let weights = Array2::from_shape_vec((rows, cols), flat)
        .map_err(|e| shape(&format!("{field}.weights"), &e.to_string()))?;
    Ok(Dense::new(weights, Array1::from(doc.bias)))
}

fn dense_to_doc(layer: &Dense) -> LayerDocument {
    LayerDocument {
        weights: layer.weights.rows().into_iter().map(|r| r.to_vec()).collect(),
        bias: layer.bias.to_vec(),
    }
}

/// Parses and validates a network JSON document.
pub fn load_network(text: &str) -> Result<NetworkSpec, NetworkError> {
    let doc: NetworkDocument =
        serde_json::from_str(text).map_err(|e| NetworkError::Malformed(e.to_string()))?;
    let hidden = doc
        .hidden_layers
        .into_iter()
        .enumerate()
        .map(|(i, l)| dense_from_doc(l, &format!("hidden_layers[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let output = dense_from_doc(doc.output, "output")?;
    NetworkSpec::new(doc.input_dim, hidden, output, doc.skips)
}

/// Canonical pretty-printed JSON document.
pub fn save_network(net: &NetworkSpec) -> String {
    let doc = NetworkDocument {
        input_dim: net.input_dim,
        hidden_layers: net.hidden.iter().map(dense_to_doc).collect(),
        output: dense_to_doc(&net.output),
        skips: net.skips.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("network documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    pub(crate) fn worked_example() -> NetworkSpec {
        load_network(include_str!("../../../data/worked_example.json")).unwrap()
    }

    fn chain(skip: bool) -> NetworkSpec {
        let one = || Dense::new(array![[1.0]], array![0.0]);
        let skips = if skip { vec![Skip::new(1, 3)] } else { vec![] };
        NetworkSpec::new(1, vec![one(), one(), one()], one(), skips).unwrap()
    }

    #[test]
    fn worked_example_forward() {
        let net = worked_example();
        assert_eq!(net.widths(), vec![2, 2]);
        let trace = net.forward(&[0.4, 0.2]).unwrap();
        let nu1 = &trace.post_activations[0];
        assert!((nu1[0] - 0.6).abs() < 1e-12 && (nu1[1] - 1.2).abs() < 1e-12);
        let rho2 = &trace.pre_activations[1];
        assert!((rho2[0] + 5.2).abs() < 1e-12 && (rho2[1] - 3.55).abs() < 1e-12);
        assert_eq!(net.activation_pattern(&[0.4, 0.2]).unwrap().to_string(), "11|01");
    }

    #[test]
    fn zero_input_zero_bias() {
        let mut net = init_kaiming(&[3, 3], 2, 2, &[], 5).unwrap();
        for l in net.hidden.iter_mut() {
            l.bias.fill(0.0);
        }
        net.output.bias.fill(0.0);
        let trace = net.forward(&[0.0, 0.0]).unwrap();
        assert!(trace.pre_activations.iter().flatten().all(|&v| v == 0.0));
        assert!(trace.output.iter().all(|&v| v == 0.0));
        assert!(net.activation_pattern(&[0.0, 0.0]).unwrap().layers().iter().flatten().all(|&b| b));
    }

    #[test]
    fn skip_adds_source_output() {
        // Three unit layers; the skip makes the last input nu1 + nu2.
        assert_eq!(chain(false).forward(&[1.0]).unwrap().output[0], 1.0);
        assert_eq!(chain(true).forward(&[1.0]).unwrap().output[0], 2.0);
    }

    #[test]
    fn kaiming_bounds_and_determinism() {
        let net = init_kaiming(&[4, 4, 4], 2, 1, &[Skip::new(1, 3)], 11).unwrap();
        assert_eq!(net.depth(), 3);
        let bound = 3f64.sqrt();
        assert!(net.hidden[0].weights.iter().all(|w| w.abs() <= bound));
        assert!(net.hidden[0].bias.iter().all(|b| b.abs() <= 1.0 / 2f64.sqrt()));
        assert!(net.hidden[1].weights.iter().all(|w| w.abs() <= 1.5f64.sqrt()));
        let again = init_kaiming(&[4, 4, 4], 2, 1, &[Skip::new(1, 3)], 11).unwrap();
        assert_eq!(save_network(&net), save_network(&again));
        let other = init_kaiming(&[4, 4, 4], 2, 1, &[Skip::new(1, 3)], 12).unwrap();
        assert_ne!(save_network(&net), save_network(&other));
    }

    #[test]
    fn rejects_bad_skips() {
        let bad = |skips: Vec<Skip>| init_kaiming(&[4, 4, 4, 4], 2, 1, &skips, 0).unwrap_err();
        assert!(matches!(bad(vec![Skip::new(2, 3)]), NetworkError::InvalidSkip { .. }));
        assert!(matches!(bad(vec![Skip::new(0, 3)]), NetworkError::InvalidSkip { .. }));
        assert!(matches!(bad(vec![Skip::new(2, 5)]), NetworkError::InvalidSkip { .. }));
        assert!(matches!(bad(vec![Skip::new(1, 3), Skip::new(1, 3)]), NetworkError::InvalidSkip { .. }));
        let err = init_kaiming(&[4, 3, 4], 2, 1, &[Skip::new(1, 3)], 0).unwrap_err();
        assert!(err.to_string().contains("width"), "{err}");
        // Two skips into the same destination are allowed.
        assert!(init_kaiming(&[4, 4, 4, 4], 2, 1, &[Skip::new(1, 4), Skip::new(2, 4)], 0).is_ok());
    }

    #[test]
    fn document_rejections_name_the_field() {
        let doc = r#"{"input_dim":2,"hidden_layers":[{"weights":[[1,0],[0,1]],"bias":[0,0]},
            {"weights":[[1,0],[0,1]],"bias":[0,0]},{"weights":[[1,0],[0,1]],"bias":[0,0]}],
            "output":{"weights":[[1,1]],"bias":[0]},"skips":[{"from":2,"to":3}]}"#;
        let err = load_network(doc).unwrap_err();
        assert!(matches!(&err, NetworkError::InvalidSkip { field, .. } if field == "skips[0]"), "{err}");

        let ragged = r#"{"input_dim":2,"hidden_layers":[{"weights":[[1,0],[0]],"bias":[0,0]}],
            "output":{"weights":[[1,1]],"bias":[0]}}"#;
        let err = load_network(ragged).unwrap_err();
        assert!(err.to_string().contains("hidden_layers[0].weights[1]"), "{err}");

        let wrong_bias = r#"{"input_dim":2,"hidden_layers":[{"weights":[[1,0]],"bias":[0,0]}],
            "output":{"weights":[[1]],"bias":[0]}}"#;
        let err = load_network(wrong_bias).unwrap_err();
        assert!(err.to_string().contains("hidden_layers[0].bias"), "{err}");

        assert!(matches!(load_network("{not json"), Err(NetworkError::Malformed(_))));
    }

    #[test]
    fn document_round_trip() {
        let net = init_kaiming(&[3, 3, 3], 2, 2, &[Skip::new(1, 3)], 99).unwrap();
        let text = save_network(&net);
        let back = load_network(&text).unwrap();
        assert_eq!(back, net);
        assert_eq!(save_network(&back), text);
    }

    #[test]
    fn dimension_mismatch() {
        let net = worked_example();
        assert_eq!(
            net.forward(&[1.0]).unwrap_err(),
            NetworkError::Dimension { expected: 2, got: 1 }
        );
    }

    #[test]
    fn skip_list_grammar() {
        assert_eq!(parse_skip_list("").unwrap(), vec![]);
        assert_eq!(
            parse_skip_list("1-3, 2-4").unwrap(),
            vec![Skip::new(1, 3), Skip::new(2, 4)]
        );
        assert!(parse_skip_list("1>3").is_err());
    }
}
