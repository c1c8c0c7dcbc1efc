//! Layer-by-layer symbolic decomposition of a ReLU network.
//!
//! Every layer's post-activation output is written as a difference `F - G`
//! of two tropical (max-plus) polynomials, with the pre-activation equal to
//! `H - G` and `F = max(H, G)`. Restricted to one activation pattern each of
//! `F`, `G`, `H` is affine in the network input, so we store them as
//! coefficient matrices and offset vectors:
//!
//! ```text
//! F(x) = F_A x + f_b,   G(x) = G_A x + g_b,   H(x) = H_A x + h_b
//! ```
//!
//! Splitting the next layer's weights `A = A+ - A-` into non-negative parts
//! gives
//!
//! ```text
//! G' = A+ G + A- F + A- S,      H' = A+ F + A- G + A+ S + b
//! ```
//!
//! where `S` is the sum of `F - G` over the layers whose outputs are skipped
//! into this one (zero without skips). Choosing `F' = H'` corresponds to the
//! neuron being active, `F' = G'` to inactive.

use ndarray::{Array1, Array2, Zip};
use thiserror::Error;

use crate::tol;
use crate::geometry::HalfSpace;
use crate::network::NetworkSpec;
use crate::pattern::{ActivationPattern, PatternError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TropicalError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

/// Non-negative parts of a matrix: `plus - minus == A`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedSplit {
    pub plus: Array2<f64>,
    pub minus: Array2<f64>,
}

pub fn split_pos_neg(a: &Array2<f64>) -> SignedSplit {
    SignedSplit {
        plus: a.mapv(|v| v.max(0.0)),
        minus: a.mapv(|v| (-v).max(0.0)),
    }
}

/// Coefficients of `F`, `G`, `H` for one layer, valid along one pattern prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct TropicalLayerState {
    pub f_a: Array2<f64>,
    pub g_a: Array2<f64>,
    pub h_a: Array2<f64>,
    pub f_b: Array1<f64>,
    pub g_b: Array1<f64>,
    pub h_b: Array1<f64>,
    pub layer_index: usize,
}

impl TropicalLayerState {
    pub fn width(&self) -> usize {
        self.f_a.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.f_a.ncols()
    }

    /// `(F_A - G_A, f_b - g_b)`: the post-activation output as an affine map.
    pub fn output_map(&self) -> (Array2<f64>, Array1<f64>) {
        (&self.f_a - &self.g_a, &self.f_b - &self.g_b)
    }

    /// `(H_A - G_A, h_b - g_b)`: the pre-activation as an affine map.
    pub fn pre_activation_map(&self) -> (Array2<f64>, Array1<f64>) {
        (&self.h_a - &self.g_a, &self.h_b - &self.g_b)
    }

    pub fn eval_output(&self, x: &[f64]) -> Array1<f64> {
        let x = ndarray::ArrayView1::from(x);
        (self.f_a.dot(&x) + &self.f_b) - (self.g_a.dot(&x) + &self.g_b)
    }

    pub fn eval_pre_activation(&self, x: &[f64]) -> Array1<f64> {
        let x = ndarray::ArrayView1::from(x);
        (self.h_a.dot(&x) + &self.h_b) - (self.g_a.dot(&x) + &self.g_b)
    }
}

/// The identity layer `F = H = x`, `G = 0`.
pub fn initial_state(input_dim: usize) -> TropicalLayerState {
    let eye = Array2::eye(input_dim);
    TropicalLayerState {
        f_a: eye.clone(),
        g_a: Array2::zeros((input_dim, input_dim)),
        h_a: eye,
        f_b: Array1::zeros(input_dim),
        g_b: Array1::zeros(input_dim),
        h_b: Array1::zeros(input_dim),
        layer_index: 0,
    }
}

/// `G` and `H` of the next layer, before any neuron's state is chosen.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagated {
    pub g_a: Array2<f64>,
    pub h_a: Array2<f64>,
    pub g_b: Array1<f64>,
    pub h_b: Array1<f64>,
    pub layer_index: usize,
}

impl Propagated {
    pub fn width(&self) -> usize {
        self.g_a.nrows()
    }
}

pub fn propagate(
    prev: &TropicalLayerState,
    a: &Array2<f64>,
    b: &Array1<f64>,
    skip_states: &[&TropicalLayerState],
) -> Result<Propagated, TropicalError> {
    let n = prev.input_dim();
    if a.ncols() != prev.width() {
        return Err(TropicalError::Shape(format!(
            "weights have {} columns, previous layer has width {}",
            a.ncols(),
            prev.width()
        )));
    }
    if b.len() != a.nrows() {
        return Err(TropicalError::Shape(format!(
            "bias has length {}, weights have {} rows",
            b.len(),
            a.nrows()
        )));
    }
    let split = split_pos_neg(a);
    let (plus, minus) = (&split.plus, &split.minus);

    let mut g_a = plus.dot(&prev.g_a) + minus.dot(&prev.f_a);
    let mut h_a = plus.dot(&prev.f_a) + minus.dot(&prev.g_a);
    let mut g_b = plus.dot(&prev.g_b) + minus.dot(&prev.f_b);
    let mut h_b = plus.dot(&prev.f_b) + minus.dot(&prev.g_b);

    if !skip_states.is_empty() {
        let mut skip_a = Array2::<f64>::zeros((prev.width(), n));
        let mut skip_b = Array1::<f64>::zeros(prev.width());
        for s in skip_states {
            if s.width() != prev.width() || s.input_dim() != n {
                return Err(TropicalError::Shape(format!(
                    "skip source layer {} has shape {}x{}, expected {}x{}",
                    s.layer_index,
                    s.width(),
                    s.input_dim(),
                    prev.width(),
                    n
                )));
            }
            skip_a += &(&s.f_a - &s.g_a);
            skip_b += &(&s.f_b - &s.g_b);
        }
        g_a += &minus.dot(&skip_a);
        h_a += &plus.dot(&skip_a);
        g_b += &minus.dot(&skip_b);
        h_b += &plus.dot(&skip_b);
    }
    h_b += b;

    Ok(Propagated {
        g_a,
        h_a,
        g_b,
        h_b,
        layer_index: prev.layer_index + 1,
    })
}

/// Chooses `F` row by row from `bits` (true = active) and emits one
/// half-space per neuron describing where that choice is valid.
///
/// Inactive: `(H - G)_i x + (h - g)_i <= 0` and `F_i = G_i`.
/// Active: the negated inequality and `F_i = H_i`.
/// A neuron whose pre-activation is the constant 0 is active only; its
/// inactive half-space is the unsatisfiable `0 . x + 1 <= 0`.
pub fn select_f(prop: &Propagated, bits: &[bool]) -> (TropicalLayerState, Vec<HalfSpace>) {
    assert_eq!(bits.len(), prop.width(), "one bit per neuron");
    let mut f_a = prop.g_a.clone();
    let mut f_b = prop.g_b.clone();
    let mut halfspaces = Vec::with_capacity(bits.len());
    for (i, &active) in bits.iter().enumerate() {
        let mut alpha = &prop.h_a.row(i) - &prop.g_a.row(i);
        let mut beta = prop.h_b[i] - prop.g_b[i];
        if active {
            f_a.row_mut(i).assign(&prop.h_a.row(i));
            f_b[i] = prop.h_b[i];
            alpha.mapv_inplace(|v| -v);
            beta = -beta;
        } else if alpha.iter().all(|v| v.abs() <= tol::DEGENERATE_ROW) && beta >= -tol::DEGENERATE_ROW {
            // A pre-activation that is constantly (numerically) zero counts
            // as active, so the inactive branch must be empty. The closed
            // inequality alone would admit both branches of the same cell.
            beta = 1.0;
        }
        halfspaces.push(HalfSpace::new(alpha.to_vec(), beta));
    }
    let state = TropicalLayerState {
        f_a,
        g_a: prop.g_a.clone(),
        h_a: prop.h_a.clone(),
        f_b,
        g_b: prop.g_b.clone(),
        h_b: prop.h_b.clone(),
        layer_index: prop.layer_index,
    };
    (state, halfspaces)
}

/// Affine map `x -> M x + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    pub m: Array2<f64>,
    pub c: Array1<f64>,
}

impl AffineMap {
    pub fn apply(&self, x: &[f64]) -> Array1<f64> {
        self.m.dot(&ndarray::ArrayView1::from(x)) + &self.c
    }

    /// Largest entrywise difference to `other`, infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &AffineMap) -> f64 {
        if self.m.dim() != other.m.dim() || self.c.len() != other.c.len() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        Zip::from(&self.m).and(&other.m).for_each(|a, b| worst = worst.max((a - b).abs()));
        Zip::from(&self.c).and(&other.c).for_each(|a, b| worst = worst.max((a - b).abs()));
        worst
    }
}

/// States of every hidden layer, `states[0]` being the input identity.
#[derive(Debug, Clone)]
pub struct StateChain {
    pub states: Vec<TropicalLayerState>,
}

impl StateChain {
    pub fn new(input_dim: usize) -> Self {
        StateChain {
            states: vec![initial_state(input_dim)],
        }
    }

    /// Index of the last layer pushed (0 for the input).
    pub fn depth(&self) -> usize {
        self.states.len() - 1
    }

    /// Propagates into the next hidden layer of `net`, gathering skip sources.
    pub fn propagate_next(&self, net: &NetworkSpec) -> Result<Propagated, TropicalError> {
        let dst = self.depth() + 1;
        let layer = net
            .hidden_layers()
            .get(dst - 1)
            .ok_or_else(|| TropicalError::Shape(format!("network has no hidden layer {dst}")))?;
        let skips: Vec<&TropicalLayerState> = net.skip_sources(dst).map(|src| &self.states[src]).collect();
        propagate(self.last(), &layer.weights, &layer.bias, &skips)
    }

    pub fn push(&mut self, state: TropicalLayerState) {
        self.states.push(state);
    }

    pub fn last(&self) -> &TropicalLayerState {
        self.states.last().expect("chain always holds the input state")
    }

    /// End-to-end map `A_out (F - G) + b_out` of the complete chain.
    pub fn network_map(&self, net: &NetworkSpec) -> AffineMap {
        let (m, c) = self.last().output_map();
        let head = net.output();
        AffineMap {
            m: head.weights.dot(&m),
            c: head.weights.dot(&c) + &head.bias,
        }
    }
}

/// Builds the full state chain along `pattern` without any feasibility test.
/// Returns the chain and the half-spaces in layer-major order.
pub fn trace_pattern(
    net: &NetworkSpec,
    pattern: &ActivationPattern,
) -> Result<(StateChain, Vec<HalfSpace>), TropicalError> {
    pattern.check_widths(&net.widths())?;
    let mut chain = StateChain::new(net.input_dim());
    let mut halfspaces = Vec::with_capacity(pattern.total_bits());
    for bits in pattern.layers() {
        let prop = chain.propagate_next(net)?;
        let (state, hs) = select_f(&prop, bits);
        chain.push(state);
        halfspaces.extend(hs);
    }
    Ok((chain, halfspaces))
}
