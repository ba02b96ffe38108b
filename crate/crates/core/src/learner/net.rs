//! Dueling Q-network: three stride-2 convolutions, a fully connected trunk,
//! and value/advantage heads combined as `Q = V + (A - mean(A))`.
//!
//! Forward and reverse passes are written against matrix layouts only
//! (im2col + GEMM), so the whole network is a handful of `dot` calls. The
//! element type is generic: training runs in `f32`, the finite-difference
//! gradient check instantiates the same code in `f64`.

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

pub trait Elem:
    ndarray::NdFloat + num_traits::FromPrimitive + Send + Sync + 'static
{
}
impl Elem for f32 {}
impl Elem for f64 {}

fn cast<F: Elem>(v: f64) -> F {
    F::from_f64(v).expect("finite cast")
}

/// Network topology. Widths are configurable; the defaults fit the
/// 5 x 58 x 38 observation stack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QNetworkSpec {
    pub in_channels: usize,
    pub height: usize,
    pub width: usize,
    pub conv_channels: [usize; 3],
    pub kernel: usize,
    pub stride: usize,
    pub padding: usize,
    pub fc_width: usize,
    pub fc_layers: usize,
    pub actions: usize,
}

impl QNetworkSpec {
    pub fn for_input(height: usize, width: usize) -> Self {
        QNetworkSpec {
            in_channels: 5,
            height,
            width,
            conv_channels: [16, 32, 64],
            kernel: 3,
            stride: 2,
            padding: 1,
            fc_width: 256,
            fc_layers: 3,
            actions: 8,
        }
    }

    /// Small instance for gradient checks.
    pub fn toy() -> Self {
        QNetworkSpec {
            in_channels: 5,
            height: 6,
            width: 6,
            conv_channels: [3, 4, 5],
            kernel: 3,
            stride: 2,
            padding: 1,
            fc_width: 8,
            fc_layers: 3,
            actions: 8,
        }
    }

    fn out_dim(&self, input: usize) -> usize {
        (input + 2 * self.padding - self.kernel) / self.stride + 1
    }

    /// (height, width) after each convolution stage.
    pub fn conv_dims(&self) -> [(usize, usize); 3] {
        let d1 = (self.out_dim(self.height), self.out_dim(self.width));
        let d2 = (self.out_dim(d1.0), self.out_dim(d1.1));
        let d3 = (self.out_dim(d2.0), self.out_dim(d2.1));
        [d1, d2, d3]
    }

    pub fn flat_features(&self) -> usize {
        let (h, w) = self.conv_dims()[2];
        self.conv_channels[2] * h * w
    }

    pub fn param_count(&self) -> usize {
        let mut n = 0;
        let mut in_ch = self.in_channels;
        for &out_ch in &self.conv_channels {
            n += out_ch * in_ch * self.kernel * self.kernel + out_ch;
            in_ch = out_ch;
        }
        let mut in_f = self.flat_features();
        for _ in 0..self.fc_layers {
            n += self.fc_width * in_f + self.fc_width;
            in_f = self.fc_width;
        }
        n += in_f + 1; // value head
        n += self.actions * in_f + self.actions; // advantage head
        n
    }

    /// Stable textual form, hashed into checkpoints.
    pub fn canonical_string(&self) -> String {
        format!(
            "qnet v1 in={}x{}x{} conv={:?} k={} s={} p={} fc={}x{} act={}",
            self.in_channels,
            self.height,
            self.width,
            self.conv_channels,
            self.kernel,
            self.stride,
            self.padding,
            self.fc_layers,
            self.fc_width,
            self.actions
        )
    }
}

#[derive(Debug, Clone)]
struct Conv<F> {
    /// (out_ch, in_ch * k * k)
    w: Array2<F>,
    b: Array1<F>,
}

#[derive(Debug, Clone)]
struct Dense<F> {
    /// (out, in)
    w: Array2<F>,
    b: Array1<F>,
}

/// Activations in channel-major matrix form: `(channels, batch * h * w)`,
/// sample-contiguous columns.
#[derive(Debug, Clone)]
struct Act<F> {
    data: Array2<F>,
    h: usize,
    w: usize,
    batch: usize,
}

#[derive(Debug, Clone)]
pub struct QNetwork<F> {
    spec: QNetworkSpec,
    convs: Vec<Conv<F>>,
    fcs: Vec<Dense<F>>,
    value: Dense<F>,
    advantage: Dense<F>,
}

/// Per-layer gradients in the same shapes as the parameters.
#[derive(Debug, Clone)]
pub struct Gradients<F> {
    convs: Vec<(Array2<F>, Array1<F>)>,
    fcs: Vec<(Array2<F>, Array1<F>)>,
    value: (Array2<F>, Array1<F>),
    advantage: (Array2<F>, Array1<F>),
}

impl<F: Elem> Gradients<F> {
    /// Flat gradient vector in the canonical parameter order.
    pub fn flat(&self) -> Vec<F> {
        let mut out = Vec::new();
        for (w, b) in &self.convs {
            out.extend(w.iter().cloned());
            out.extend(b.iter().cloned());
        }
        for (w, b) in &self.fcs {
            out.extend(w.iter().cloned());
            out.extend(b.iter().cloned());
        }
        out.extend(self.value.0.iter().cloned());
        out.extend(self.value.1.iter().cloned());
        out.extend(self.advantage.0.iter().cloned());
        out.extend(self.advantage.1.iter().cloned());
        out
    }
}

/// Forward-pass cache consumed by [`QNetwork::backward`].
pub struct Cache<F> {
    conv_cols: Vec<Array2<F>>,
    conv_out: Vec<Act<F>>, // post-relu
    fc_in: Vec<Array2<F>>, // inputs of each trunk layer
    trunk_out: Array2<F>,  // post-relu output of the last trunk layer
    advantage_out: Array2<F>,
}

impl<F: Elem> QNetwork<F> {
    /// He-uniform initialization, biases zero, deterministic in the seed.
    pub fn init(spec: QNetworkSpec, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |fan_in: usize, rows: usize, cols: usize| -> Array2<F> {
            let limit = (6.0 / fan_in as f64).sqrt();
            Array2::from_shape_fn((rows, cols), |_| cast(rng.gen_range(-limit..limit)))
        };

        let mut convs = Vec::new();
        let mut in_ch = spec.in_channels;
        for &out_ch in &spec.conv_channels {
            let fan_in = in_ch * spec.kernel * spec.kernel;
            convs.push(Conv { w: draw(fan_in, out_ch, fan_in), b: Array1::zeros(out_ch) });
            in_ch = out_ch;
        }

        let mut fcs = Vec::new();
        let mut in_f = spec.flat_features();
        for _ in 0..spec.fc_layers {
            fcs.push(Dense { w: draw(in_f, spec.fc_width, in_f), b: Array1::zeros(spec.fc_width) });
            in_f = spec.fc_width;
        }
        let value = Dense { w: draw(in_f, 1, in_f), b: Array1::zeros(1) };
        let advantage = Dense { w: draw(in_f, spec.actions, in_f), b: Array1::zeros(spec.actions) };

        QNetwork { spec, convs, fcs, value, advantage }
    }

    pub fn spec(&self) -> &QNetworkSpec {
        &self.spec
    }

    /// Q-values for a batch given as a `(in_channels, batch * h * w)` matrix
    /// with sample-contiguous columns (see [`QNetwork::input_from_stacks`]).
    pub fn forward(&self, input: Array2<F>, batch: usize) -> Array2<F> {
        self.forward_cached(input, batch).0
    }

    /// Q-values plus the value-head column (for dueling-identity checks).
    pub fn forward_split(&self, input: Array2<F>, batch: usize) -> (Array2<F>, Array1<F>) {
        let (q, cache) = self.forward_cached(input, batch);
        let mut v = cache.trunk_out.dot(&self.value.w.t());
        v.column_mut(0).mapv_inplace(|x| x + self.value.b[0]);
        (q, v.column(0).to_owned())
    }

    pub fn forward_cached(&self, input: Array2<F>, batch: usize) -> (Array2<F>, Cache<F>) {
        let spec = &self.spec;
        assert_eq!(input.nrows(), spec.in_channels, "channel count mismatch");
        assert_eq!(input.ncols(), batch * spec.height * spec.width, "input size mismatch");

        let mut act = Act { data: input, h: spec.height, w: spec.width, batch };
        let mut conv_cols = Vec::new();
        let mut conv_out = Vec::new();
        for conv in &self.convs {
            let oh = spec.out_dim(act.h);
            let ow = spec.out_dim(act.w);
            let cols = im2col(&act, spec.kernel, spec.stride, spec.padding, oh, ow);
            let mut out = conv.w.dot(&cols);
            for (mut row, &b) in out.axis_iter_mut(Axis(0)).zip(conv.b.iter()) {
                row.mapv_inplace(|v| relu(v + b));
            }
            conv_cols.push(cols);
            let next = Act { data: out, h: oh, w: ow, batch };
            conv_out.push(next.clone());
            act = next;
        }

        // flatten (ch, b*oh*ow) -> (b, ch*oh*ow)
        let feat = spec.flat_features();
        let hw = act.h * act.w;
        let ch = act.data.nrows();
        let mut x = Array2::zeros((batch, feat));
        {
            let src = act.data.as_slice().expect("standard layout");
            let dst = x.as_slice_mut().expect("standard layout");
            for bi in 0..batch {
                for ci in 0..ch {
                    dst[bi * feat + ci * hw..bi * feat + (ci + 1) * hw]
                        .copy_from_slice(&src[ci * batch * hw + bi * hw..][..hw]);
                }
            }
        }

        let mut fc_in = Vec::new();
        for fc in &self.fcs {
            fc_in.push(x.clone());
            let mut out = x.dot(&fc.w.t());
            for mut row in out.axis_iter_mut(Axis(0)) {
                row.zip_mut_with(&fc.b, |v, &b| *v = relu(*v + b));
            }
            x = out;
        }
        let trunk_out = x;

        let mut v = trunk_out.dot(&self.value.w.t());
        v.column_mut(0).mapv_inplace(|x| x + self.value.b[0]);
        let mut a = trunk_out.dot(&self.advantage.w.t());
        for mut row in a.axis_iter_mut(Axis(0)) {
            row.zip_mut_with(&self.advantage.b, |x, &b| *x = *x + b);
        }

        // dueling aggregation
        let na = cast::<F>(spec.actions as f64);
        let mut q = a.clone();
        for (mut row, vb) in q.axis_iter_mut(Axis(0)).zip(v.column(0).iter()) {
            let mean = row.sum() / na;
            row.mapv_inplace(|x| x - mean + *vb);
        }

        let cache = Cache {
            conv_cols,
            conv_out,
            fc_in,
            trunk_out,
            advantage_out: a,
        };
        (q, cache)
    }

    /// Reverse pass from dL/dQ; returns parameter gradients.
    pub fn backward(&self, cache: &Cache<F>, dq: &Array2<F>) -> Gradients<F> {
        let spec = &self.spec;
        let batch = dq.nrows();
        let na = cast::<F>(spec.actions as f64);

        // dueling: dV_b = sum_j dQ_bj ; dA_bj = dQ_bj - mean_j dQ_bj
        let dv = dq.sum_axis(Axis(1)).insert_axis(Axis(1));
        let mut da = dq.clone();
        for mut row in da.axis_iter_mut(Axis(0)) {
            let mean = row.sum() / na;
            row.mapv_inplace(|x| x - mean);
        }
        let _ = &cache.advantage_out; // heads are linear; no mask needed

        let d_value_w = dv.t().dot(&cache.trunk_out);
        let d_value_b = Array1::from_vec(vec![dv.column(0).sum()]);
        let d_adv_w = da.t().dot(&cache.trunk_out);
        let d_adv_b = da.sum_axis(Axis(0));

        let mut dx = dv.dot(&self.value.w) + da.dot(&self.advantage.w);

        // trunk, last layer first
        let mut fcs_grads = vec![(Array2::zeros((0, 0)), Array1::zeros(0)); self.fcs.len()];
        for (idx, fc) in self.fcs.iter().enumerate().rev() {
            let out = if idx + 1 == self.fcs.len() { &cache.trunk_out } else { &cache.fc_in[idx + 1] };
            dx.zip_mut_with(out, |g, &o| {
                if o <= F::zero() {
                    *g = F::zero();
                }
            });
            fcs_grads[idx] = (dx.t().dot(&cache.fc_in[idx]), dx.sum_axis(Axis(0)));
            dx = dx.dot(&fc.w);
        }

        // unflatten (b, ch*oh*ow) -> (ch, b*oh*ow)
        let last = cache.conv_out.last().expect("three conv stages");
        let hw = last.h * last.w;
        let ch = last.data.nrows();
        let feat = ch * hw;
        let mut dact = Array2::zeros((ch, batch * hw));
        {
            let src = dx.as_slice().expect("standard layout");
            let dst = dact.as_slice_mut().expect("standard layout");
            for bi in 0..batch {
                for ci in 0..ch {
                    dst[ci * batch * hw + bi * hw..][..hw]
                        .copy_from_slice(&src[bi * feat + ci * hw..][..hw]);
                }
            }
        }

        let mut convs_grads = vec![(Array2::zeros((0, 0)), Array1::zeros(0)); self.convs.len()];
        for (idx, conv) in self.convs.iter().enumerate().rev() {
            let out = &cache.conv_out[idx];
            dact.zip_mut_with(&out.data, |g, &o| {
                if o <= F::zero() {
                    *g = F::zero();
                }
            });
            convs_grads[idx] = (dact.dot(&cache.conv_cols[idx].t()), dact.sum_axis(Axis(1)));
            if idx > 0 {
                let dcols = conv.w.t().dot(&dact);
                let below = &cache.conv_out[idx - 1];
                dact = col2im(
                    &dcols,
                    below.data.nrows(),
                    below.h,
                    below.w,
                    batch,
                    spec.kernel,
                    spec.stride,
                    spec.padding,
                    out.h,
                    out.w,
                );
            }
        }

        Gradients {
            convs: convs_grads,
            fcs: fcs_grads,
            value: (d_value_w, d_value_b),
            advantage: (d_adv_w, d_adv_b),
        }
    }

    /// Visits every parameter with its gradient, in the canonical order used
    /// by flattening. The closure mutates the parameter in place.
    pub fn visit_params_mut(&mut self, grads: &Gradients<F>, mut f: impl FnMut(&mut F, F)) {
        for (conv, g) in self.convs.iter_mut().zip(&grads.convs) {
            for (p, &gv) in conv.w.iter_mut().zip(g.0.iter()) {
                f(p, gv);
            }
            for (p, &gv) in conv.b.iter_mut().zip(g.1.iter()) {
                f(p, gv);
            }
        }
        for (fc, g) in self.fcs.iter_mut().zip(&grads.fcs) {
            for (p, &gv) in fc.w.iter_mut().zip(g.0.iter()) {
                f(p, gv);
            }
            for (p, &gv) in fc.b.iter_mut().zip(g.1.iter()) {
                f(p, gv);
            }
        }
        for (head, g) in [(&mut self.value, &grads.value), (&mut self.advantage, &grads.advantage)] {
            for (p, &gv) in head.w.iter_mut().zip(g.0.iter()) {
                f(p, gv);
            }
            for (p, &gv) in head.b.iter_mut().zip(g.1.iter()) {
                f(p, gv);
            }
        }
    }

    /// Polyak update: `self <- tau * online + (1 - tau) * self`.
    pub fn polyak_from(&mut self, online: &QNetwork<F>, tau: f64) {
        let t = cast::<F>(tau);
        let one_m = F::one() - t;
        let mix = |dst: &mut Array2<F>, src: &Array2<F>| {
            dst.zip_mut_with(src, |d, &s| *d = one_m * *d + t * s);
        };
        let mix1 = |dst: &mut Array1<F>, src: &Array1<F>| {
            dst.zip_mut_with(src, |d, &s| *d = one_m * *d + t * s);
        };
        for (a, b) in self.convs.iter_mut().zip(&online.convs) {
            mix(&mut a.w, &b.w);
            mix1(&mut a.b, &b.b);
        }
        for (a, b) in self.fcs.iter_mut().zip(&online.fcs) {
            mix(&mut a.w, &b.w);
            mix1(&mut a.b, &b.b);
        }
        mix(&mut self.value.w, &online.value.w);
        mix1(&mut self.value.b, &online.value.b);
        mix(&mut self.advantage.w, &online.advantage.w);
        mix1(&mut self.advantage.b, &online.advantage.b);
    }

    /// Flat parameter vector in canonical order.
    pub fn params_flat(&self) -> Vec<F> {
        let mut out = Vec::with_capacity(self.spec.param_count());
        for conv in &self.convs {
            out.extend(conv.w.iter().cloned());
            out.extend(conv.b.iter().cloned());
        }
        for fc in &self.fcs {
            out.extend(fc.w.iter().cloned());
            out.extend(fc.b.iter().cloned());
        }
        out.extend(self.value.w.iter().cloned());
        out.extend(self.value.b.iter().cloned());
        out.extend(self.advantage.w.iter().cloned());
        out.extend(self.advantage.b.iter().cloned());
        out
    }

    /// Rebuilds a network from a flat vector (inverse of `params_flat`).
    pub fn from_flat(spec: QNetworkSpec, flat: &[F]) -> Option<Self> {
        if flat.len() != spec.param_count() {
            return None;
        }
        let mut net = QNetwork::init(spec, 0);
        let mut it = flat.iter().cloned();
        let mut fill2 = |m: &mut Array2<F>, it: &mut dyn Iterator<Item = F>| {
            for p in m.iter_mut() {
                *p = it.next().unwrap();
            }
        };
        for conv in &mut net.convs {
            fill2(&mut conv.w, &mut it);
            for p in conv.b.iter_mut() {
                *p = it.next().unwrap();
            }
        }
        for fc in &mut net.fcs {
            fill2(&mut fc.w, &mut it);
            for p in fc.b.iter_mut() {
                *p = it.next().unwrap();
            }
        }
        fill2(&mut net.value.w, &mut it);
        for p in net.value.b.iter_mut() {
            *p = it.next().unwrap();
        }
        fill2(&mut net.advantage.w, &mut it);
        for p in net.advantage.b.iter_mut() {
            *p = it.next().unwrap();
        }
        Some(net)
    }

    /// Builds the network input from per-sample channel stacks
    /// (`channels * h * w` each, as produced by `Observation::to_stack`).
    pub fn input_from_stacks(spec: &QNetworkSpec, stacks: &[Vec<f32>]) -> Array2<F> {
        let hw = spec.height * spec.width;
        let batch = stacks.len();
        let mut input = Array2::zeros((spec.in_channels, batch * hw));
        for (bi, stack) in stacks.iter().enumerate() {
            assert_eq!(stack.len(), spec.in_channels * hw, "stack size mismatch");
            for ci in 0..spec.in_channels {
                for p in 0..hw {
                    input[[ci, bi * hw + p]] = cast(stack[ci * hw + p] as f64);
                }
            }
        }
        input
    }
}

fn relu<F: Elem>(v: F) -> F {
    if v > F::zero() {
        v
    } else {
        F::zero()
    }
}

fn im2col<F: Elem>(
    act: &Act<F>,
    k: usize,
    stride: usize,
    pad: usize,
    oh: usize,
    ow: usize,
) -> Array2<F> {
    let ch = act.data.nrows();
    let (h, w, b) = (act.h, act.w, act.batch);
    let hw = h * w;
    let ohow = oh * ow;
    let ncols = b * ohow;
    let mut cols = Array2::zeros((ch * k * k, ncols));
    let src_all = act.data.as_slice().expect("standard layout");
    let dst_all = cols.as_slice_mut().expect("standard layout");
    for ci in 0..ch {
        let src_ch = &src_all[ci * b * hw..(ci + 1) * b * hw];
        for kr in 0..k {
            for kc in 0..k {
                let row = ci * k * k + kr * k + kc;
                let dst = &mut dst_all[row * ncols..(row + 1) * ncols];
                // valid output-column range for this kernel offset
                let oc_lo = pad.saturating_sub(kc).div_ceil(stride);
                let oc_hi = ((w + pad - kc).saturating_sub(1) / stride).min(ow - 1);
                if oc_lo > oc_hi {
                    continue;
                }
                for bi in 0..b {
                    for orow in 0..oh {
                        let ir = (orow * stride + kr) as i64 - pad as i64;
                        if ir < 0 || ir >= h as i64 {
                            continue;
                        }
                        let src_row = &src_ch[bi * hw + ir as usize * w..];
                        let dst_row = &mut dst[bi * ohow + orow * ow..];
                        let off = (kc as i64 - pad as i64) as isize;
                        for oc in oc_lo..=oc_hi {
                            let ic = (oc * stride) as isize + off;
                            dst_row[oc] = src_row[ic as usize];
                        }
                    }
                }
            }
        }
    }
    cols
}

#[allow(clippy::too_many_arguments)]
fn col2im<F: Elem>(
    dcols: &Array2<F>,
    ch: usize,
    h: usize,
    w: usize,
    batch: usize,
    k: usize,
    stride: usize,
    pad: usize,
    oh: usize,
    ow: usize,
) -> Array2<F> {
    let hw = h * w;
    let ohow = oh * ow;
    let ncols = batch * ohow;
    let mut dact = Array2::zeros((ch, batch * hw));
    let src_all = dcols.as_slice().expect("standard layout");
    let dst_all = dact.as_slice_mut().expect("standard layout");
    for ci in 0..ch {
        let dst_ch = &mut dst_all[ci * batch * hw..(ci + 1) * batch * hw];
        for kr in 0..k {
            for kc in 0..k {
                let row = ci * k * k + kr * k + kc;
                let src = &src_all[row * ncols..(row + 1) * ncols];
                let oc_lo = pad.saturating_sub(kc).div_ceil(stride);
                let oc_hi = ((w + pad - kc).saturating_sub(1) / stride).min(ow - 1);
                if oc_lo > oc_hi {
                    continue;
                }
                for bi in 0..batch {
                    for orow in 0..oh {
                        let ir = (orow * stride + kr) as i64 - pad as i64;
                        if ir < 0 || ir >= h as i64 {
                            continue;
                        }
                        let dst_row = &mut dst_ch[bi * hw + ir as usize * w..];
                        let src_row = &src[bi * ohow + orow * ow..];
                        let off = (kc as i64 - pad as i64) as isize;
                        for oc in oc_lo..=oc_hi {
                            let ic = ((oc * stride) as isize + off) as usize;
                            dst_row[ic] = dst_row[ic] + src_row[oc];
                        }
                    }
                }
            }
        }
    }
    dact
}
