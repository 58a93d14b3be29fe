//! Layer definitions: shape algebra, parameter initialization, and
//! forward/backward kernels.
//!
//! Conventions, fixed once for the whole crate:
//!
//! - Data is channels-first row-major: rank-3 activations are `[C, H, W]`
//!   (W contiguous), rank-2 are `[C, L]`.
//! - Convolutions are valid cross-correlations with stride 1 and one bias
//!   per output channel.
//! - Max pooling is non-overlapping; trailing rows/columns that do not fill
//!   a window are dropped (floor semantics). On rank-2 input the pool acts
//!   along the single spatial axis with extent `pool_h`.
//! - Dropout is inverted: surviving activations are scaled by `1/(1-p)` in
//!   train mode; eval mode is the identity.
//!
//! Reductions (dot products, bias gradients) run in a fixed lane order so
//! results are bit-identical regardless of worker count.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::tensor::Tensor;
use crate::nn::{Mode, Scalar};

/// One layer of the network graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LayerSpec {
    Conv2d {
        out_channels: usize,
        kernel_h: usize,
        kernel_w: usize,
    },
    Conv1d {
        out_channels: usize,
        kernel: usize,
    },
    MaxPool2d {
        pool_h: usize,
        pool_w: usize,
    },
    Dense {
        units: usize,
    },
    Relu,
    Dropout {
        rate: f64,
    },
    Flatten,
}

/// Weight/bias pair for a parameterized layer.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerParams<F> {
    pub weight: Tensor<F>,
    pub bias: Tensor<F>,
}

impl<F: Scalar> LayerParams<F> {
    pub fn zeros_like(&self) -> Self {
        LayerParams {
            weight: Tensor::zeros(self.weight.shape()),
            bias: Tensor::zeros(self.bias.shape()),
        }
    }

    pub fn param_count(&self) -> usize {
        self.weight.len() + self.bias.len()
    }
}

/// Layer-specific cache from forward needed by backward.
#[derive(Clone, Debug)]
pub enum Aux<F> {
    None,
    /// Argmax flat input index per pooled output element.
    PoolIdx(Vec<u32>),
    /// Dropout scale per element: 0 or 1/(1-p).
    Mask(Vec<F>),
}

impl LayerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            LayerSpec::Conv2d { .. } => "conv2d",
            LayerSpec::Conv1d { .. } => "conv1d",
            LayerSpec::MaxPool2d { .. } => "maxpool2d",
            LayerSpec::Dense { .. } => "dense",
            LayerSpec::Relu => "relu",
            LayerSpec::Dropout { .. } => "dropout",
            LayerSpec::Flatten => "flatten",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LayerSpec::Conv2d {
                out_channels,
                kernel_h,
                kernel_w,
            } => {
                if out_channels == 0 || kernel_h == 0 || kernel_w == 0 {
                    return Err(Error::Config("conv2d extents must be >= 1".into()));
                }
            }
            LayerSpec::Conv1d { out_channels, kernel } => {
                if out_channels == 0 || kernel == 0 {
                    return Err(Error::Config("conv1d extents must be >= 1".into()));
                }
            }
            LayerSpec::MaxPool2d { pool_h, pool_w } => {
                if pool_h == 0 || pool_w == 0 {
                    return Err(Error::Config("pool extents must be >= 1".into()));
                }
            }
            LayerSpec::Dense { units } => {
                if units == 0 {
                    return Err(Error::Config("dense units must be >= 1".into()));
                }
            }
            LayerSpec::Dropout { rate } => {
                if !(0.0..1.0).contains(&rate) {
                    return Err(Error::Config("dropout rate must lie in [0, 1)".into()));
                }
            }
            LayerSpec::Relu | LayerSpec::Flatten => {}
        }
        Ok(())
    }

    /// Output shape for the given input shape; construction-time check.
    pub fn output_shape(&self, input: &[usize]) -> Result<Vec<usize>> {
        self.validate()?;
        let err = |msg: String| Err(Error::Shape(msg));
        match *self {
            LayerSpec::Conv2d {
                out_channels,
                kernel_h,
                kernel_w,
            } => {
                let [_, h, w] = rank3(input, "conv2d")?;
                if kernel_h > h || kernel_w > w {
                    return err(format!(
                        "conv2d kernel {kernel_h}x{kernel_w} exceeds input {h}x{w}"
                    ));
                }
                Ok(vec![out_channels, h - kernel_h + 1, w - kernel_w + 1])
            }
            LayerSpec::Conv1d { out_channels, kernel } => {
                let [_, l] = rank2(input, "conv1d")?;
                if kernel > l {
                    return err(format!("conv1d kernel {kernel} exceeds input length {l}"));
                }
                Ok(vec![out_channels, l - kernel + 1])
            }
            LayerSpec::MaxPool2d { pool_h, pool_w } => match input.len() {
                3 => {
                    let [c, h, w] = rank3(input, "maxpool2d")?;
                    let (oh, ow) = (h / pool_h, w / pool_w);
                    if oh == 0 || ow == 0 {
                        return err(format!("pool {pool_h}x{pool_w} empties input {h}x{w}"));
                    }
                    Ok(vec![c, oh, ow])
                }
                2 => {
                    let [c, l] = rank2(input, "maxpool2d")?;
                    let ol = l / pool_h;
                    if ol == 0 {
                        return err(format!("pool {pool_h} empties input length {l}"));
                    }
                    Ok(vec![c, ol])
                }
                _ => err(format!("maxpool2d wants rank 2 or 3 input, got {input:?}")),
            },
            LayerSpec::Dense { units } => {
                if input.len() != 1 {
                    return err(format!("dense wants rank-1 input (flatten first), got {input:?}"));
                }
                Ok(vec![units])
            }
            LayerSpec::Relu | LayerSpec::Dropout { .. } => Ok(input.to_vec()),
            LayerSpec::Flatten => Ok(vec![input.iter().product()]),
        }
    }

    /// Weight/bias shapes, or `None` for parameterless layers.
    pub fn param_shapes(&self, input: &[usize]) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
        match *self {
            LayerSpec::Conv2d {
                out_channels,
                kernel_h,
                kernel_w,
            } => {
                let [c, _, _] = rank3(input, "conv2d")?;
                Ok(Some((vec![out_channels, c, kernel_h, kernel_w], vec![out_channels])))
            }
            LayerSpec::Conv1d { out_channels, kernel } => {
                let [c, _] = rank2(input, "conv1d")?;
                Ok(Some((vec![out_channels, c, kernel], vec![out_channels])))
            }
            LayerSpec::Dense { units } => Ok(Some((vec![units, input[0]], vec![units]))),
            _ => Ok(None),
        }
    }

    /// Fan-in-scaled uniform init, biases zero; draws are made in `f64` so
    /// models at different precisions share a seed.
    pub fn init_params<F: Scalar, R: Rng + ?Sized>(
        &self,
        input: &[usize],
        rng: &mut R,
    ) -> Result<Option<LayerParams<F>>> {
        let Some((w_shape, b_shape)) = self.param_shapes(input)? else {
            return Ok(None);
        };
        let fan_in = match *self {
            LayerSpec::Conv2d { kernel_h, kernel_w, .. } => input[0] * kernel_h * kernel_w,
            LayerSpec::Conv1d { kernel, .. } => input[0] * kernel,
            LayerSpec::Dense { .. } => input[0],
            _ => unreachable!(),
        };
        let limit = 1.0 / (fan_in as f64).sqrt();
        let n: usize = w_shape.iter().product();
        let weight = Tensor::from_vec(
            &w_shape,
            (0..n)
                .map(|_| F::from_f64((rng.random::<f64>() * 2.0 - 1.0) * limit))
                .collect(),
        )?;
        Ok(Some(LayerParams {
            weight,
            bias: Tensor::zeros(&b_shape),
        }))
    }
}

fn rank3(shape: &[usize], who: &str) -> Result<[usize; 3]> {
    match shape {
        &[c, h, w] => Ok([c, h, w]),
        _ => Err(Error::Shape(format!("{who} wants rank-3 input, got {shape:?}"))),
    }
}

fn rank2(shape: &[usize], who: &str) -> Result<[usize; 2]> {
    match shape {
        &[c, l] => Ok([c, l]),
        _ => Err(Error::Shape(format!("{who} wants rank-2 input, got {shape:?}"))),
    }
}

/// `dst[i] += a * src[i]`; elementwise, autovectorizes.
#[inline]
fn axpy<F: Scalar>(dst: &mut [F], a: F, src: &[F]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d = *d + a * *s;
    }
}

/// Dot product with a fixed 8-lane accumulation order: deterministic and
/// SIMD-friendly.
#[inline]
fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    const LANES: usize = 8;
    let mut acc = [F::zero(); LANES];
    let n = a.len().min(b.len());
    let chunks = n / LANES;
    for i in 0..chunks {
        let base = i * LANES;
        for l in 0..LANES {
            acc[l] = acc[l] + a[base + l] * b[base + l];
        }
    }
    let mut tail = F::zero();
    for i in chunks * LANES..n {
        tail = tail + a[i] * b[i];
    }
    let s01 = acc[0] + acc[1];
    let s23 = acc[2] + acc[3];
    let s45 = acc[4] + acc[5];
    let s67 = acc[6] + acc[7];
    ((s01 + s23) + (s45 + s67)) + tail
}

/// Sum with the same fixed lane structure as [`dot`].
#[inline]
fn sum<F: Scalar>(a: &[F]) -> F {
    const LANES: usize = 8;
    let mut acc = [F::zero(); LANES];
    let chunks = a.len() / LANES;
    for i in 0..chunks {
        let base = i * LANES;
        for l in 0..LANES {
            acc[l] = acc[l] + a[base + l];
        }
    }
    let mut tail = F::zero();
    for v in &a[chunks * LANES..] {
        tail = tail + *v;
    }
    let s01 = acc[0] + acc[1];
    let s23 = acc[2] + acc[3];
    let s45 = acc[4] + acc[5];
    let s67 = acc[6] + acc[7];
    ((s01 + s23) + (s45 + s67)) + tail
}

/// Forward pass of one layer. `dropout_rng` is consumed only by dropout
/// layers in train mode.
pub fn forward<F: Scalar, R: Rng + ?Sized>(
    spec: &LayerSpec,
    input: &Tensor<F>,
    params: Option<&LayerParams<F>>,
    mode: Mode,
    dropout_rng: &mut R,
) -> Result<(Tensor<F>, Aux<F>)> {
    match *spec {
        LayerSpec::Conv2d {
            out_channels,
            kernel_h,
            kernel_w,
        } => {
            let p = params.ok_or_else(|| Error::Shape("conv2d missing parameters".into()))?;
            conv2d_forward(input, p, out_channels, kernel_h, kernel_w).map(|t| (t, Aux::None))
        }
        LayerSpec::Conv1d { out_channels, kernel } => {
            let p = params.ok_or_else(|| Error::Shape("conv1d missing parameters".into()))?;
            conv1d_forward(input, p, out_channels, kernel).map(|t| (t, Aux::None))
        }
        LayerSpec::MaxPool2d { pool_h, pool_w } => maxpool_forward(input, pool_h, pool_w),
        LayerSpec::Dense { .. } => {
            let p = params.ok_or_else(|| Error::Shape("dense missing parameters".into()))?;
            dense_forward(input, p).map(|t| (t, Aux::None))
        }
        LayerSpec::Relu => {
            let out = input.data().iter().map(|&v| v.max(F::zero())).collect();
            Ok((Tensor::from_vec(input.shape(), out)?, Aux::None))
        }
        LayerSpec::Dropout { rate } => {
            if mode == Mode::Eval || rate == 0.0 {
                return Ok((input.clone(), Aux::None));
            }
            let keep_scale = F::from_f64(1.0 / (1.0 - rate));
            let mask: Vec<F> = (0..input.len())
                .map(|_| {
                    if dropout_rng.random::<f64>() < rate {
                        F::zero()
                    } else {
                        keep_scale
                    }
                })
                .collect();
            let out: Vec<F> = input.data().iter().zip(&mask).map(|(&v, &m)| v * m).collect();
            Ok((Tensor::from_vec(input.shape(), out)?, Aux::Mask(mask)))
        }
        LayerSpec::Flatten => {
            let flat = input.len();
            Ok((input.clone().reshaped(&[flat])?, Aux::None))
        }
    }
}

/// Backward pass of one layer: gradient of parameters (if any) and of the
/// layer input, given the cached forward input and aux.
pub fn backward<F: Scalar>(
    spec: &LayerSpec,
    input: &Tensor<F>,
    aux: &Aux<F>,
    params: Option<&LayerParams<F>>,
    dout: &Tensor<F>,
) -> Result<(Option<LayerParams<F>>, Tensor<F>)> {
    match *spec {
        LayerSpec::Conv2d {
            out_channels,
            kernel_h,
            kernel_w,
        } => {
            let p = params.ok_or_else(|| Error::Shape("conv2d missing parameters".into()))?;
            let (grads, din) = conv2d_backward(input, p, dout, out_channels, kernel_h, kernel_w)?;
            Ok((Some(grads), din))
        }
        LayerSpec::Conv1d { out_channels, kernel } => {
            let p = params.ok_or_else(|| Error::Shape("conv1d missing parameters".into()))?;
            let (grads, din) = conv1d_backward(input, p, dout, out_channels, kernel)?;
            Ok((Some(grads), din))
        }
        LayerSpec::MaxPool2d { .. } => {
            let Aux::PoolIdx(idx) = aux else {
                return Err(Error::Shape("maxpool2d backward without pool cache".into()));
            };
            let mut din = Tensor::zeros(input.shape());
            let d = din.data_mut();
            for (&i, &g) in idx.iter().zip(dout.data()) {
                d[i as usize] = d[i as usize] + g;
            }
            Ok((None, din))
        }
        LayerSpec::Dense { .. } => {
            let p = params.ok_or_else(|| Error::Shape("dense missing parameters".into()))?;
            let (grads, din) = dense_backward(input, p, dout)?;
            Ok((Some(grads), din))
        }
        LayerSpec::Relu => {
            let din: Vec<F> = input
                .data()
                .iter()
                .zip(dout.data())
                .map(|(&x, &g)| if x > F::zero() { g } else { F::zero() })
                .collect();
            Ok((None, Tensor::from_vec(input.shape(), din)?))
        }
        LayerSpec::Dropout { rate } => {
            if rate == 0.0 {
                return Ok((None, dout.clone()));
            }
            match aux {
                Aux::Mask(mask) => {
                    let din: Vec<F> =
                        dout.data().iter().zip(mask).map(|(&g, &m)| g * m).collect();
                    Ok((None, Tensor::from_vec(input.shape(), din)?))
                }
                // Eval-mode forward stored no mask: identity.
                Aux::None => Ok((None, dout.clone())),
                _ => Err(Error::Shape("dropout backward with wrong cache".into())),
            }
        }
        LayerSpec::Flatten => Ok((None, dout.clone().reshaped(input.shape())?)),
    }
}

fn conv2d_forward<F: Scalar>(
    input: &Tensor<F>,
    p: &LayerParams<F>,
    out_c: usize,
    kh: usize,
    kw: usize,
) -> Result<Tensor<F>> {
    let [in_c, h, w] = rank3(input.shape(), "conv2d")?;
    if p.weight.shape() != [out_c, in_c, kh, kw] {
        return Err(Error::Shape(format!(
            "conv2d weight shape {:?} does not match input {:?}",
            p.weight.shape(),
            input.shape()
        )));
    }
    let (oh, ow) = (h - kh + 1, w - kw + 1);
    let x = input.data();
    let wt = p.weight.data();
    let bias = p.bias.data();
    let mut out = vec![F::zero(); out_c * oh * ow];

    for co in 0..out_c {
        let out_plane = &mut out[co * oh * ow..(co + 1) * oh * ow];
        out_plane.fill(bias[co]);
        for ci in 0..in_c {
            let in_plane = &x[ci * h * w..(ci + 1) * h * w];
            let kbase = (co * in_c + ci) * kh * kw;
            for dy in 0..kh {
                for dx in 0..kw {
                    let wv = wt[kbase + dy * kw + dx];
                    for oy in 0..oh {
                        let row = (oy + dy) * w + dx;
                        axpy(&mut out_plane[oy * ow..(oy + 1) * ow], wv, &in_plane[row..row + ow]);
                    }
                }
            }
        }
    }
    Tensor::from_vec(&[out_c, oh, ow], out)
}

fn conv2d_backward<F: Scalar>(
    input: &Tensor<F>,
    p: &LayerParams<F>,
    dout: &Tensor<F>,
    out_c: usize,
    kh: usize,
    kw: usize,
) -> Result<(LayerParams<F>, Tensor<F>)> {
    let [in_c, h, w] = rank3(input.shape(), "conv2d")?;
    let [dc, oh, ow] = rank3(dout.shape(), "conv2d gradient")?;
    if dc != out_c || oh != h - kh + 1 || ow != w - kw + 1 {
        return Err(Error::Shape(format!(
            "conv2d gradient shape {:?} does not match input {:?}",
            dout.shape(),
            input.shape()
        )));
    }
    let x = input.data();
    let wt = p.weight.data();
    let g = dout.data();

    let mut dw = vec![F::zero(); p.weight.len()];
    let mut db = vec![F::zero(); out_c];
    let mut din = vec![F::zero(); x.len()];

    for co in 0..out_c {
        let g_plane = &g[co * oh * ow..(co + 1) * oh * ow];
        db[co] = sum(g_plane);
        for ci in 0..in_c {
            let in_plane = &x[ci * h * w..(ci + 1) * h * w];
            let din_plane = &mut din[ci * h * w..(ci + 1) * h * w];
            let kbase = (co * in_c + ci) * kh * kw;
            for dy in 0..kh {
                for dx in 0..kw {
                    let mut acc = F::zero();
                    let wv = wt[kbase + dy * kw + dx];
                    for oy in 0..oh {
                        let row = (oy + dy) * w + dx;
                        let g_row = &g_plane[oy * ow..(oy + 1) * ow];
                        acc = acc + dot(g_row, &in_plane[row..row + ow]);
                        axpy(&mut din_plane[row..row + ow], wv, g_row);
                    }
                    dw[kbase + dy * kw + dx] = acc;
                }
            }
        }
    }

    Ok((
        LayerParams {
            weight: Tensor::from_vec(p.weight.shape(), dw)?,
            bias: Tensor::from_vec(&[out_c], db)?,
        },
        Tensor::from_vec(input.shape(), din)?,
    ))
}

fn conv1d_forward<F: Scalar>(
    input: &Tensor<F>,
    p: &LayerParams<F>,
    out_c: usize,
    k: usize,
) -> Result<Tensor<F>> {
    let [in_c, l] = rank2(input.shape(), "conv1d")?;
    if p.weight.shape() != [out_c, in_c, k] {
        return Err(Error::Shape(format!(
            "conv1d weight shape {:?} does not match input {:?}",
            p.weight.shape(),
            input.shape()
        )));
    }
    let ol = l - k + 1;
    let x = input.data();
    let wt = p.weight.data();
    let bias = p.bias.data();
    let mut out = vec![F::zero(); out_c * ol];

    for co in 0..out_c {
        let out_row = &mut out[co * ol..(co + 1) * ol];
        out_row.fill(bias[co]);
        for ci in 0..in_c {
            let in_row = &x[ci * l..(ci + 1) * l];
            let kbase = (co * in_c + ci) * k;
            for dk in 0..k {
                axpy(out_row, wt[kbase + dk], &in_row[dk..dk + ol]);
            }
        }
    }
    Tensor::from_vec(&[out_c, ol], out)
}

fn conv1d_backward<F: Scalar>(
    input: &Tensor<F>,
    p: &LayerParams<F>,
    dout: &Tensor<F>,
    out_c: usize,
    k: usize,
) -> Result<(LayerParams<F>, Tensor<F>)> {
    let [in_c, l] = rank2(input.shape(), "conv1d")?;
    let [dc, ol] = rank2(dout.shape(), "conv1d gradient")?;
    if dc != out_c || ol != l - k + 1 {
        return Err(Error::Shape(format!(
            "conv1d gradient shape {:?} does not match input {:?}",
            dout.shape(),
            input.shape()
        )));
    }
    let x = input.data();
    let wt = p.weight.data();
    let g = dout.data();

    let mut dw = vec![F::zero(); p.weight.len()];
    let mut db = vec![F::zero(); out_c];
    let mut din = vec![F::zero(); x.len()];

    for co in 0..out_c {
        let g_row = &g[co * ol..(co + 1) * ol];
        db[co] = dot(g_row, &vec![F::one(); ol]);
        for ci in 0..in_c {
            let in_row = &x[ci * l..(ci + 1) * l];
            let din_row = &mut din[ci * l..(ci + 1) * l];
            let kbase = (co * in_c + ci) * k;
            for dk in 0..k {
                dw[kbase + dk] = dw[kbase + dk] + dot(g_row, &in_row[dk..dk + ol]);
                axpy(&mut din_row[dk..dk + ol], wt[kbase + dk], g_row);
            }
        }
    }

    Ok((
        LayerParams {
            weight: Tensor::from_vec(p.weight.shape(), dw)?,
            bias: Tensor::from_vec(&[out_c], db)?,
        },
        Tensor::from_vec(input.shape(), din)?,
    ))
}

fn maxpool_forward<F: Scalar>(
    input: &Tensor<F>,
    pool_h: usize,
    pool_w: usize,
) -> Result<(Tensor<F>, Aux<F>)> {
    match input.shape().len() {
        3 => {
            let [c, h, w] = rank3(input.shape(), "maxpool2d")?;
            let (oh, ow) = (h / pool_h, w / pool_w);
            if oh == 0 || ow == 0 {
                return Err(Error::Shape(format!(
                    "pool {pool_h}x{pool_w} empties input {h}x{w}"
                )));
            }
            let x = input.data();
            let mut out = Vec::with_capacity(c * oh * ow);
            let mut idx = Vec::with_capacity(c * oh * ow);
            for ci in 0..c {
                for py in 0..oh {
                    for px in 0..ow {
                        let mut best = F::neg_infinity();
                        let mut best_i = 0usize;
                        for dy in 0..pool_h {
                            let row = ci * h * w + (py * pool_h + dy) * w + px * pool_w;
                            for dx in 0..pool_w {
                                let v = x[row + dx];
                                if v > best {
                                    best = v;
                                    best_i = row + dx;
                                }
                            }
                        }
                        out.push(best);
                        idx.push(best_i as u32);
                    }
                }
            }
            Ok((Tensor::from_vec(&[c, oh, ow], out)?, Aux::PoolIdx(idx)))
        }
        2 => {
            let [c, l] = rank2(input.shape(), "maxpool2d")?;
            let ol = l / pool_h;
            if ol == 0 {
                return Err(Error::Shape(format!("pool {pool_h} empties input length {l}")));
            }
            let x = input.data();
            let mut out = Vec::with_capacity(c * ol);
            let mut idx = Vec::with_capacity(c * ol);
            for ci in 0..c {
                for pl in 0..ol {
                    let base = ci * l + pl * pool_h;
                    let mut best = F::neg_infinity();
                    let mut best_i = 0usize;
                    for dk in 0..pool_h {
                        let v = x[base + dk];
                        if v > best {
                            best = v;
                            best_i = base + dk;
                        }
                    }
                    out.push(best);
                    idx.push(best_i as u32);
                }
            }
            Ok((Tensor::from_vec(&[c, ol], out)?, Aux::PoolIdx(idx)))
        }
        _ => Err(Error::Shape(format!(
            "maxpool2d wants rank 2 or 3 input, got {:?}",
            input.shape()
        ))),
    }
}

fn dense_forward<F: Scalar>(input: &Tensor<F>, p: &LayerParams<F>) -> Result<Tensor<F>> {
    let n = match input.shape() {
        &[n] => n,
        other => {
            return Err(Error::Shape(format!(
                "dense wants rank-1 input (flatten first), got {other:?}"
            )))
        }
    };
    let units = p.bias.len();
    if p.weight.shape() != [units, n] {
        return Err(Error::Shape(format!(
            "dense weight shape {:?} does not match input length {n}",
            p.weight.shape()
        )));
    }
    let x = input.data();
    let wt = p.weight.data();
    let out: Vec<F> = (0..units)
        .map(|u| p.bias.data()[u] + dot(&wt[u * n..(u + 1) * n], x))
        .collect();
    Tensor::from_vec(&[units], out)
}

fn dense_backward<F: Scalar>(
    input: &Tensor<F>,
    p: &LayerParams<F>,
    dout: &Tensor<F>,
) -> Result<(LayerParams<F>, Tensor<F>)> {
    let n = input.len();
    let units = p.bias.len();
    if dout.len() != units {
        return Err(Error::Shape(format!(
            "dense gradient length {} does not match {units} units",
            dout.len()
        )));
    }
    let x = input.data();
    let wt = p.weight.data();
    let g = dout.data();

    let mut dw = vec![F::zero(); units * n];
    let mut din = vec![F::zero(); n];
    for u in 0..units {
        axpy(&mut dw[u * n..(u + 1) * n], g[u], x);
        axpy(&mut din, g[u], &wt[u * n..(u + 1) * n]);
    }

    Ok((
        LayerParams {
            weight: Tensor::from_vec(p.weight.shape(), dw)?,
            bias: Tensor::from_vec(&[units], g.to_vec())?,
        },
        Tensor::from_vec(input.shape(), din)?,
    ))
}
