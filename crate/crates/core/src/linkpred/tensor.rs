use rand::Rng;
use serde::{Deserialize, Serialize};

/// Named dense parameter block, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(name: impl Into<String>, shape: &[usize]) -> Tensor {
        Tensor {
            name: name.into(),
            shape: shape.to_vec(),
            data: vec![0.0; shape.iter().product()],
        }
    }

    pub fn uniform<R: Rng + ?Sized>(name: impl Into<String>, shape: &[usize], bound: f64, rng: &mut R) -> Tensor {
        let mut t = Tensor::zeros(name, shape);
        if bound > 0.0 {
            t.data.iter_mut().for_each(|v| *v = rng.gen_range(-bound..bound));
        }
        t
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn zeros_like(&self) -> Tensor {
        Tensor::zeros(self.name.clone(), &self.shape)
    }

    pub fn fill(&mut self, value: f64) {
        self.data.iter_mut().for_each(|v| *v = value);
    }

    pub fn add_assign(&mut self, other: &Tensor) {
        debug_assert_eq!(self.shape, other.shape);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// `out += W x` for a `rows × cols` row-major `W`.
#[inline]
pub(crate) fn matvec_add(w: &[f64], cols: usize, x: &[f64], out: &mut [f64]) {
    debug_assert_eq!(x.len(), cols);
    for (row, o) in w.chunks_exact(cols).zip(out.iter_mut()) {
        *o += dot(row, x);
    }
}

/// `x_grad += Wᵀ g`.
#[inline]
pub(crate) fn matvec_t_add(w: &[f64], cols: usize, g: &[f64], x_grad: &mut [f64]) {
    for (row, &gi) in w.chunks_exact(cols).zip(g) {
        if gi != 0.0 {
            for (xg, wv) in x_grad.iter_mut().zip(row) {
                *xg += gi * wv;
            }
        }
    }
}

/// `W_grad += g xᵀ`.
#[inline]
pub(crate) fn outer_add(w_grad: &mut [f64], cols: usize, g: &[f64], x: &[f64]) {
    for (row, &gi) in w_grad.chunks_exact_mut(cols).zip(g) {
        if gi != 0.0 {
            for (wv, xv) in row.iter_mut().zip(x) {
                *wv += gi * xv;
            }
        }
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let n = a.len() / 4 * 4;
    for (ca, cb) in a[..n].chunks_exact(4).zip(b[..n].chunks_exact(4)) {
        for l in 0..4 {
            acc[l] += ca[l] * cb[l];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in n..a.len() {
        s += a[i] * b[i];
    }
    s
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}
