//! Reverse-mode differentiation over a linear tape of matrix operations.
//!
//! Parameters are never copied onto the tape: a [`Var::Param`] reads straight
//! from the borrowed [`ModelParams`] and its gradient lands in the matching
//! slot of the returned [`GradientStore`].

use super::config::Activation;
use super::params::{GradientStore, ModelParams, NormIds, ParamId};
use super::tensor::{self, gelu, gelu_grad, matmul, matmul_at_acc, matmul_bt, Tensor};

/// A value on the tape: either a parameter or the output of a recorded op.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Param(ParamId),
    Node(usize),
}

/// Attention visibility: keys at or beyond `key_len` are hidden, and a causal
/// mask additionally hides keys after the query position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AttnMask {
    pub causal: bool,
    pub key_len: usize,
}

impl AttnMask {
    pub fn fully_visible(key_len: usize) -> Self {
        Self { causal: false, key_len }
    }

    pub fn causal(key_len: usize) -> Self {
        Self { causal: true, key_len }
    }

    #[inline]
    pub fn visible_keys(&self, query: usize) -> usize {
        if self.causal {
            (query + 1).min(self.key_len)
        } else {
            self.key_len
        }
    }
}

enum Op {
    Constant,
    Gather {
        table: Var,
        ids: Vec<usize>,
    },
    MatMul(Var, Var),
    Add(Var, Var),
    AddBias(Var, Var),
    LayerNorm {
        x: Var,
        gamma: Var,
        beta: Var,
        xhat: Tensor,
        inv_std: Vec<f64>,
    },
    Activate {
        x: Var,
        kind: Activation,
    },
    Attention {
        q: Var,
        k: Var,
        v: Var,
        heads: usize,
        probs: Vec<Tensor>,
    },
    LogProbPick {
        logits: Var,
        targets: Vec<usize>,
        inv_temp: f64,
        probs: Tensor,
    },
    WeightedSum {
        x: Var,
        weights: Vec<f64>,
    },
    SquaredError {
        x: Var,
        targets: Vec<f64>,
        weights: Vec<f64>,
    },
}

struct Node {
    value: Tensor,
    op: Op,
}

pub struct Tape<'p> {
    params: &'p ModelParams,
    nodes: Vec<Node>,
}

impl<'p> Tape<'p> {
    pub fn new(params: &'p ModelParams) -> Self {
        Self {
            params,
            nodes: Vec::new(),
        }
    }

    pub fn params(&self) -> &'p ModelParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &Tensor {
        match v {
            Var::Param(id) => self.params.get(id),
            Var::Node(i) => &self.nodes[i].value,
        }
    }

    fn push(&mut self, value: Tensor, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var::Node(self.nodes.len() - 1)
    }

    pub fn param(&self, id: ParamId) -> Var {
        Var::Param(id)
    }

    pub fn constant(&mut self, t: Tensor) -> Var {
        self.push(t, Op::Constant)
    }

    /// Rows `ids` of `table`.
    pub fn gather(&mut self, table: Var, ids: &[usize]) -> Var {
        let t = self.value(table);
        let mut out = Tensor::zeros(ids.len(), t.cols);
        for (r, &id) in ids.iter().enumerate() {
            out.row_mut(r).copy_from_slice(t.row(id));
        }
        self.push(
            out,
            Op::Gather {
                table,
                ids: ids.to_vec(),
            },
        )
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let out = matmul(self.value(a), self.value(b));
        self.push(out, Op::MatMul(a, b))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let mut out = self.value(a).clone();
        out.add_assign(self.value(b));
        self.push(out, Op::Add(a, b))
    }

    /// Adds the `1 × n` row `bias` to every row of `x`.
    pub fn add_bias(&mut self, x: Var, bias: Var) -> Var {
        let mut out = self.value(x).clone();
        let b = self.value(bias);
        assert_eq!(b.shape(), (1, out.cols), "bias shape mismatch");
        for r in 0..out.rows {
            for (o, bv) in out.row_mut(r).iter_mut().zip(&b.data) {
                *o += bv;
            }
        }
        self.push(out, Op::AddBias(x, bias))
    }

    pub fn layer_norm(&mut self, x: Var, ids: NormIds) -> Var {
        let (gamma, beta) = (Var::Param(ids.gamma), Var::Param(ids.beta));
        let xv = self.value(x);
        let g = self.value(gamma);
        let b = self.value(beta);
        let mut xhat = xv.clone();
        let mut out = Tensor::zeros(xv.rows, xv.cols);
        let mut inv_std = Vec::with_capacity(xv.rows);
        for r in 0..xv.rows {
            inv_std.push(tensor::normalize_row(xhat.row_mut(r)));
            for (c, o) in out.row_mut(r).iter_mut().enumerate() {
                *o = xhat.at(r, c) * g.data[c] + b.data[c];
            }
        }
        self.push(
            out,
            Op::LayerNorm {
                x,
                gamma,
                beta,
                xhat,
                inv_std,
            },
        )
    }

    pub fn activate(&mut self, x: Var, kind: Activation) -> Var {
        let mut out = self.value(x).clone();
        for v in &mut out.data {
            *v = match kind {
                Activation::Gelu => gelu(*v),
                Activation::Relu => v.max(0.0),
            };
        }
        self.push(out, Op::Activate { x, kind })
    }

    /// Multi-head scaled dot-product attention over already-projected `q`, `k`, `v`.
    pub fn attention(&mut self, q: Var, k: Var, v: Var, heads: usize, mask: AttnMask) -> Var {
        let (qv, kv, vv) = (self.value(q), self.value(k), self.value(v));
        assert_eq!(qv.cols, kv.cols);
        assert_eq!(kv.rows, vv.rows);
        assert!(mask.key_len <= kv.rows);
        let d = qv.cols;
        let dh = d / heads;
        let scale = 1.0 / (dh as f64).sqrt();
        let mut out = Tensor::zeros(qv.rows, d);
        let mut probs = Vec::with_capacity(heads);
        for h in 0..heads {
            let cols = h * dh..(h + 1) * dh;
            let mut p = Tensor::zeros(qv.rows, kv.rows);
            for t in 0..qv.rows {
                let visible = mask.visible_keys(t);
                if visible == 0 {
                    continue;
                }
                let qrow = &qv.row(t)[cols.clone()];
                let prow = &mut p.row_mut(t)[..visible];
                for (s, pv) in prow.iter_mut().enumerate() {
                    *pv = tensor::dot(qrow, &kv.row(s)[cols.clone()]) * scale;
                }
                tensor::softmax_in_place(prow);
                let orow = &mut out.row_mut(t)[cols.clone()];
                for (s, &pv) in prow.iter().enumerate() {
                    tensor::axpy(orow, pv, &vv.row(s)[cols.clone()]);
                }
            }
            probs.push(p);
        }
        self.push(out, Op::Attention { q, k, v, heads, probs })
    }

    /// Column of `log softmax(logits_t / temperature)[targets_t]`, one row per target.
    pub fn log_prob_pick(&mut self, logits: Var, targets: &[usize], temperature: f64) -> Var {
        assert!(temperature > 0.0, "temperature must be positive");
        let lv = self.value(logits);
        assert_eq!(lv.rows, targets.len(), "one target per logits row");
        let inv_temp = 1.0 / temperature;
        let mut probs = lv.clone();
        let mut out = Tensor::zeros(lv.rows, 1);
        for (t, &target) in targets.iter().enumerate() {
            let row = probs.row_mut(t);
            for v in row.iter_mut() {
                *v *= inv_temp;
            }
            let lse = tensor::log_sum_exp(row);
            out.data[t] = row[target] - lse;
            for v in row.iter_mut() {
                *v = (*v - lse).exp();
            }
        }
        self.push(
            out,
            Op::LogProbPick {
                logits,
                targets: targets.to_vec(),
                inv_temp,
                probs,
            },
        )
    }

    /// Scalar `Σ wᵢ xᵢ` over the flattened entries of `x`.
    pub fn weighted_sum(&mut self, x: Var, weights: &[f64]) -> Var {
        let xv = self.value(x);
        assert_eq!(xv.len(), weights.len());
        let s = tensor::dot(&xv.data, weights);
        self.push(
            Tensor::scalar(s),
            Op::WeightedSum {
                x,
                weights: weights.to_vec(),
            },
        )
    }

    /// Scalar `Σ wᵢ (xᵢ − tᵢ)²`; the targets are constants.
    pub fn squared_error(&mut self, x: Var, targets: &[f64], weights: &[f64]) -> Var {
        let xv = self.value(x);
        assert_eq!(xv.len(), targets.len());
        assert_eq!(xv.len(), weights.len());
        let s = xv
            .data
            .iter()
            .zip(targets)
            .zip(weights)
            .map(|((x, t), w)| w * (x - t) * (x - t))
            .sum();
        self.push(
            Tensor::scalar(s),
            Op::SquaredError {
                x,
                targets: targets.to_vec(),
                weights: weights.to_vec(),
            },
        )
    }

    /// Gradients of the scalar `loss` with respect to every parameter.
    pub fn backward(&self, loss: Var) -> GradientStore {
        let mut pgrads = GradientStore::zeros_like(self.params);
        self.backward_into(loss, 1.0, &mut pgrads);
        pgrads
    }

    /// Accumulates `seed · ∂loss/∂θ` into `pgrads`.
    pub fn backward_into(&self, loss: Var, seed: f64, pgrads: &mut GradientStore) {
        let Var::Node(last) = loss else {
            panic!("loss must be a recorded node");
        };
        assert_eq!(self.nodes[last].value.shape(), (1, 1), "loss must be scalar");
        let mut grads: Vec<Option<Tensor>> = (0..=last).map(|_| None).collect();
        grads[last] = Some(Tensor::scalar(seed));
        for i in (0..=last).rev() {
            let Some(g) = grads[i].take() else { continue };
            let mut ctx = Ctx {
                nodes: &self.nodes,
                params: self.params,
                grads: &mut grads,
                pgrads,
            };
            ctx.propagate(&self.nodes[i], &g);
        }
    }
}

struct Ctx<'a> {
    nodes: &'a [Node],
    params: &'a ModelParams,
    grads: &'a mut [Option<Tensor>],
    pgrads: &'a mut GradientStore,
}

fn lookup<'a>(nodes: &'a [Node], params: &'a ModelParams, v: Var) -> &'a Tensor {
    match v {
        Var::Param(id) => params.get(id),
        Var::Node(i) => &nodes[i].value,
    }
}

impl<'a> Ctx<'a> {
    fn value(&self, v: Var) -> &'a Tensor {
        lookup(self.nodes, self.params, v)
    }

    /// Mutable gradient accumulator for `v`, or `None` for constants.
    fn slot(&mut self, v: Var) -> Option<&mut Tensor> {
        match v {
            Var::Param(id) => Some(self.pgrads.get_mut(id)),
            Var::Node(j) => {
                if matches!(self.nodes[j].op, Op::Constant) {
                    return None;
                }
                let (r, c) = self.nodes[j].value.shape();
                Some(self.grads[j].get_or_insert_with(|| Tensor::zeros(r, c)))
            }
        }
    }

    fn accumulate(&mut self, v: Var, g: &Tensor) {
        if let Some(s) = self.slot(v) {
            s.add_assign(g);
        }
    }

    fn propagate(&mut self, node: &Node, g: &Tensor) {
        match &node.op {
            Op::Constant => {}
            Op::Gather { table, ids } => {
                if let Some(s) = self.slot(*table) {
                    for (r, &id) in ids.iter().enumerate() {
                        tensor::axpy(s.row_mut(id), 1.0, g.row(r));
                    }
                }
            }
            Op::MatMul(a, b) => {
                let da = matmul_bt(g, self.value(*b));
                self.accumulate(*a, &da);
                let av = self.value(*a);
                if let Some(s) = self.slot(*b) {
                    matmul_at_acc(s, av, g);
                }
            }
            Op::Add(a, b) => {
                self.accumulate(*a, g);
                self.accumulate(*b, g);
            }
            Op::AddBias(x, bias) => {
                self.accumulate(*x, g);
                if let Some(s) = self.slot(*bias) {
                    for r in 0..g.rows {
                        tensor::axpy(&mut s.data, 1.0, g.row(r));
                    }
                }
            }
            Op::LayerNorm {
                x,
                gamma,
                beta,
                xhat,
                inv_std,
            } => {
                let gv = &self.value(*gamma).data;
                let n = g.cols as f64;
                let mut dx = Tensor::zeros(g.rows, g.cols);
                for r in 0..g.rows {
                    let grow = g.row(r);
                    let xh = xhat.row(r);
                    let dxhat: Vec<f64> = grow.iter().zip(gv).map(|(a, b)| a * b).collect();
                    let sum: f64 = dxhat.iter().sum();
                    let sum_xh: f64 = tensor::dot(&dxhat, xh);
                    for (c, o) in dx.row_mut(r).iter_mut().enumerate() {
                        *o = inv_std[r] / n * (n * dxhat[c] - sum - xh[c] * sum_xh);
                    }
                }
                if let Some(s) = self.slot(*gamma) {
                    for r in 0..g.rows {
                        for (c, sv) in s.data.iter_mut().enumerate() {
                            *sv += g.at(r, c) * xhat.at(r, c);
                        }
                    }
                }
                if let Some(s) = self.slot(*beta) {
                    for r in 0..g.rows {
                        tensor::axpy(&mut s.data, 1.0, g.row(r));
                    }
                }
                self.accumulate(*x, &dx);
            }
            Op::Activate { x, kind } => {
                let xv = self.value(*x);
                let mut dx = g.clone();
                for (d, &xi) in dx.data.iter_mut().zip(&xv.data) {
                    *d *= match kind {
                        Activation::Gelu => gelu_grad(xi),
                        Activation::Relu => {
                            if xi > 0.0 {
                                1.0
                            } else {
                                0.0
                            }
                        }
                    };
                }
                self.accumulate(*x, &dx);
            }
            Op::Attention { q, k, v, heads, probs } => {
                let (qv, kv, vv) = (self.value(*q), self.value(*k), self.value(*v));
                let d = qv.cols;
                let dh = d / heads;
                let scale = 1.0 / (dh as f64).sqrt();
                let mut dq = Tensor::zeros(qv.rows, d);
                let mut dk = Tensor::zeros(kv.rows, d);
                let mut dv = Tensor::zeros(vv.rows, d);
                for (h, p) in probs.iter().enumerate() {
                    let cols = h * dh..(h + 1) * dh;
                    let mut dp = vec![0.0; kv.rows];
                    for t in 0..qv.rows {
                        let prow = p.row(t);
                        let grow = &g.row(t)[cols.clone()];
                        let mut dot_sum = 0.0;
                        for s in 0..kv.rows {
                            let pv = prow[s];
                            if pv == 0.0 {
                                dp[s] = 0.0;
                                continue;
                            }
                            tensor::axpy(&mut dv.row_mut(s)[cols.clone()], pv, grow);
                            dp[s] = tensor::dot(grow, &vv.row(s)[cols.clone()]);
                            dot_sum += dp[s] * pv;
                        }
                        for s in 0..kv.rows {
                            let pv = prow[s];
                            if pv == 0.0 {
                                continue;
                            }
                            let ds = pv * (dp[s] - dot_sum) * scale;
                            tensor::axpy(&mut dq.row_mut(t)[cols.clone()], ds, &kv.row(s)[cols.clone()]);
                            tensor::axpy(&mut dk.row_mut(s)[cols.clone()], ds, &qv.row(t)[cols.clone()]);
                        }
                    }
                }
                self.accumulate(*q, &dq);
                self.accumulate(*k, &dk);
                self.accumulate(*v, &dv);
            }
            Op::LogProbPick {
                logits,
                targets,
                inv_temp,
                probs,
            } => {
                let mut dl = Tensor::zeros(probs.rows, probs.cols);
                for (t, &target) in targets.iter().enumerate() {
                    let gt = g.data[t];
                    if gt == 0.0 {
                        continue;
                    }
                    let prow = probs.row(t);
                    for (c, o) in dl.row_mut(t).iter_mut().enumerate() {
                        let onehot = if c == target { 1.0 } else { 0.0 };
                        *o = gt * inv_temp * (onehot - prow[c]);
                    }
                }
                self.accumulate(*logits, &dl);
            }
            Op::WeightedSum { x, weights } => {
                let (r, c) = self.value(*x).shape();
                let g0 = g.data[0];
                let dx = Tensor::from_vec(r, c, weights.iter().map(|w| g0 * w).collect());
                self.accumulate(*x, &dx);
            }
            Op::SquaredError { x, targets, weights } => {
                let xv = self.value(*x);
                let g0 = g.data[0];
                let data = xv
                    .data
                    .iter()
                    .zip(targets)
                    .zip(weights)
                    .map(|((x, t), w)| g0 * 2.0 * w * (x - t))
                    .collect();
                let dx = Tensor::from_vec(xv.rows, xv.cols, data);
                self.accumulate(*x, &dx);
            }
        }
    }
}
