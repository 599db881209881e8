//! Fixed-weight fusion kernels: query-swapped cross-attention, channel concatenation and
//! prompt-driven feature modulation.
//!
//! Feature maps are token-by-channel matrices. All kernels are single-head.

use ndarray::{concatenate, s, Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    data: Array2<f64>,
}

impl FeatureMap {
    /// Wraps a `tokens × dim` matrix. Zero channels are allowed (the neutral element of
    /// concatenation); zero tokens are not.
    pub fn new(data: Array2<f64>) -> Result<Self> {
        if data.nrows() == 0 {
            return Err(Error::invalid("feature map needs at least one token"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("feature map entries must be finite"));
        }
        Ok(Self { data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?)
    }

    pub fn seeded(tokens: usize, dim: usize, seed: u64) -> Result<Self> {
        let mut rng = crate::seed::rng(seed);
        Self::new(Array2::from_shape_simple_fn((tokens, dim), || rng.sample(StandardNormal)))
    }

    pub fn tokens(&self) -> usize {
        self.data.nrows()
    }

    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.data.view()
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.data
    }

    /// Channels `start..end`.
    pub fn slice_channels(&self, start: usize, end: usize) -> Result<Self> {
        if start > end || end > self.dim() {
            return Err(Error::invalid(format!("channel range {start}..{end} outside 0..{}", self.dim())));
        }
        Ok(Self { data: self.data.slice(s![.., start..end]).to_owned() })
    }
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Array2<f64>> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::invalid("ragged matrix rows"));
    }
    Array2::from_shape_vec((rows.len(), cols), rows.concat()).map_err(|e| Error::invalid(e.to_string()))
}

fn matrix_to_rows(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

/// Query, key and value projections for one modality, each `dim × dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionWeights {
    w_q: Array2<f64>,
    w_k: Array2<f64>,
    w_v: Array2<f64>,
}

#[derive(Serialize, Deserialize)]
struct WeightsFile {
    w_q: Vec<Vec<f64>>,
    w_k: Vec<Vec<f64>>,
    w_v: Vec<Vec<f64>>,
}

impl AttentionWeights {
    pub fn new(w_q: Array2<f64>, w_k: Array2<f64>, w_v: Array2<f64>) -> Result<Self> {
        let dim = w_q.nrows();
        for (name, w) in [("w_q", &w_q), ("w_k", &w_k), ("w_v", &w_v)] {
            if w.nrows() != dim || w.ncols() != dim {
                return Err(Error::invalid(format!("{name} is {:?}, expected {dim}×{dim}", w.dim())));
            }
            if w.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("{name} has non-finite entries")));
            }
        }
        Ok(Self { w_q, w_k, w_v })
    }

    pub fn identity(dim: usize) -> Self {
        let eye = Array2::eye(dim);
        Self { w_q: eye.clone(), w_k: eye.clone(), w_v: eye }
    }

    /// Entries drawn from `N(0, 1/dim)`.
    pub fn seeded(dim: usize, seed: u64) -> Self {
        let mut rng = crate::seed::rng(seed);
        let scale = 1.0 / (dim.max(1) as f64).sqrt();
        let mut draw = || Array2::from_shape_simple_fn((dim, dim), || scale * rng.sample::<f64, _>(StandardNormal));
        let (w_q, w_k, w_v) = (draw(), draw(), draw());
        Self { w_q, w_k, w_v }
    }

    pub fn dim(&self) -> usize {
        self.w_q.nrows()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: WeightsFile = serde_json::from_str(text)?;
        Self::new(matrix_from_rows(&f.w_q)?, matrix_from_rows(&f.w_k)?, matrix_from_rows(&f.w_v)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let f = WeightsFile {
            w_q: matrix_to_rows(&self.w_q),
            w_k: matrix_to_rows(&self.w_k),
            w_v: matrix_to_rows(&self.w_v),
        };
        Ok(serde_json::to_string(&f)?)
    }

    fn project(&self, f: &FeatureMap) -> Result<(Array2<f64>, Array2<f64>, Array2<f64>)> {
        if f.dim() != self.dim() {
            return Err(Error::invalid(format!("feature dim {} does not match weights dim {}", f.dim(), self.dim())));
        }
        Ok((f.data.dot(&self.w_q), f.data.dot(&self.w_k), f.data.dot(&self.w_v)))
    }
}

/// Row-wise softmax, shifted by the row maximum.
pub fn softmax_rows(scores: &Array2<f64>) -> Array2<f64> {
    let mut out = scores.clone();
    for mut row in out.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
    out
}

/// `softmax(Q·Kᵀ / √d_k)·V` with `d_k` the channel count of `Q`.
pub fn attention(q: &Array2<f64>, k: &Array2<f64>, v: &Array2<f64>) -> Result<Array2<f64>> {
    if q.ncols() != k.ncols() || k.nrows() != v.nrows() {
        return Err(Error::invalid(format!(
            "attention shapes do not line up: Q {:?}, K {:?}, V {:?}",
            q.dim(),
            k.dim(),
            v.dim()
        )));
    }
    let scale = 1.0 / (q.ncols().max(1) as f64).sqrt();
    Ok(softmax_rows(&(q.dot(&k.t()) * scale)).dot(v))
}

/// Cross-attention with swapped queries: infrared keys and values are attended by visible
/// queries, and the other way round. Returns `(fused_ir, fused_vi)`.
pub fn cross_attention_swap(
    f_ir: &FeatureMap,
    f_vi: &FeatureMap,
    w_ir: &AttentionWeights,
    w_vi: &AttentionWeights,
) -> Result<(FeatureMap, FeatureMap)> {
    if f_ir.dim() != f_vi.dim() {
        return Err(Error::invalid(format!("modal dims differ: {} vs {}", f_ir.dim(), f_vi.dim())));
    }
    let (q_ir, k_ir, v_ir) = w_ir.project(f_ir)?;
    let (q_vi, k_vi, v_vi) = w_vi.project(f_vi)?;
    let fused_ir = attention(&q_vi, &k_ir, &v_ir)?;
    let fused_vi = attention(&q_ir, &k_vi, &v_vi)?;
    Ok((FeatureMap::new(fused_ir)?, FeatureMap::new(fused_vi)?))
}

/// Channel concatenation `[f_ir, f_vi]`.
pub fn concat_fuse(f_ir: &FeatureMap, f_vi: &FeatureMap) -> Result<FeatureMap> {
    if f_ir.tokens() != f_vi.tokens() {
        return Err(Error::invalid(format!("token counts differ: {} vs {}", f_ir.tokens(), f_vi.tokens())));
    }
    let data = concatenate(Axis(1), &[f_ir.view(), f_vi.view()]).map_err(|e| Error::invalid(e.to_string()))?;
    FeatureMap::new(data)
}

/// Per-channel scale and shift produced from a prompt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulationParams {
    pub gamma: Array1<f64>,
    pub beta: Array1<f64>,
}

impl ModulationParams {
    pub fn new(gamma: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if gamma.len() != beta.len() {
            return Err(Error::invalid("gamma and beta lengths differ"));
        }
        if gamma.iter().chain(&beta).any(|v| !v.is_finite()) {
            return Err(Error::invalid("modulation params must be finite"));
        }
        Ok(Self { gamma: Array1::from(gamma), beta: Array1::from(beta) })
    }

    pub fn identity(dim: usize) -> Self {
        Self { gamma: Array1::zeros(dim), beta: Array1::zeros(dim) }
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// Single modulation equal to applying `self` and then `next`.
    pub fn then(&self, next: &ModulationParams) -> Result<Self> {
        if self.dim() != next.dim() {
            return Err(Error::invalid("modulation dims differ"));
        }
        let gamma = &self.gamma + &next.gamma + &self.gamma * &next.gamma;
        let beta = (1.0 + &next.gamma) * &self.beta + &next.beta;
        Ok(Self { gamma, beta })
    }
}

/// Residual affine modulation `(1 + γ) ⊙ F + β`, broadcast over tokens.
pub fn prompt_modulate(f: &FeatureMap, m: &ModulationParams) -> Result<FeatureMap> {
    if m.gamma.len() != f.dim() || m.beta.len() != f.dim() {
        return Err(Error::invalid(format!(
            "modulation lengths ({}, {}) do not match feature dim {}",
            m.gamma.len(),
            m.beta.len(),
            f.dim()
        )));
    }
    let scale = 1.0 + &m.gamma;
    FeatureMap::new(&f.data * &scale + &m.beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn softmax_rows_sum_to_one() {
        let s = array![[1.0, 2.0, 3.0], [1000.0, 1000.0, -1000.0]];
        let p = softmax_rows(&s);
        for row in p.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
        }
        assert!((p[[1, 0]] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_key_broadcasts_value() {
        let f_ir = FeatureMap::from_rows(&[vec![0.5, -1.0, 2.0]]).unwrap();
        let f_vi = FeatureMap::seeded(4, 3, 1).unwrap();
        let w = AttentionWeights::seeded(3, 2);
        let (fused_ir, _) = cross_attention_swap(&f_ir, &f_vi, &w, &w).unwrap();
        let v_ir = f_ir.view().dot(&w.w_v);
        assert_eq!(fused_ir.tokens(), 4);
        for row in fused_ir.view().rows() {
            for (a, b) in row.iter().zip(v_ir.row(0)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn equal_inputs_give_equal_outputs() {
        let f = FeatureMap::seeded(5, 4, 3).unwrap();
        let w = AttentionWeights::seeded(4, 4);
        let (a, b) = cross_attention_swap(&f, &f, &w, &w).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn two_token_oracle() {
        let f_ir = FeatureMap::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let f_vi = FeatureMap::from_rows(&[vec![0.5, 0.5], vec![-1.0, 1.0]]).unwrap();
        let w = AttentionWeights::identity(2);
        let (fused_ir, fused_vi) = cross_attention_swap(&f_ir, &f_vi, &w, &w).unwrap();
        // Scalar loops over the same formula.
        let oracle = |q: &[[f64; 2]; 2], kv: &[[f64; 2]; 2]| {
            let mut out = [[0.0; 2]; 2];
            for i in 0..2 {
                let s: Vec<f64> = (0..2).map(|j| (q[i][0] * kv[j][0] + q[i][1] * kv[j][1]) / 2f64.sqrt()).collect();
                let e: Vec<f64> = s.iter().map(|v| v.exp()).collect();
                let z = e[0] + e[1];
                for c in 0..2 {
                    out[i][c] = (e[0] * kv[0][c] + e[1] * kv[1][c]) / z;
                }
            }
            out
        };
        let ir = [[1.0, 0.0], [0.0, 2.0]];
        let vi = [[0.5, 0.5], [-1.0, 1.0]];
        let exp_ir = oracle(&vi, &ir);
        let exp_vi = oracle(&ir, &vi);
        for i in 0..2 {
            for c in 0..2 {
                assert!((fused_ir.view()[[i, c]] - exp_ir[i][c]).abs() < 1e-6);
                assert!((fused_vi.view()[[i, c]] - exp_vi[i][c]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        let a = FeatureMap::seeded(3, 4, 0).unwrap();
        let b = FeatureMap::seeded(3, 5, 0).unwrap();
        assert!(cross_attention_swap(&a, &b, &AttentionWeights::identity(4), &AttentionWeights::identity(4)).is_err());
        assert!(cross_attention_swap(&a, &a, &AttentionWeights::identity(5), &AttentionWeights::identity(5)).is_err());
        assert!(AttentionWeights::new(Array2::eye(2), Array2::eye(3), Array2::eye(2)).is_err());
    }

    #[test]
    fn weights_json_round_trip() {
        let w = AttentionWeights::seeded(3, 9);
        assert_eq!(AttentionWeights::from_json(&w.to_json().unwrap()).unwrap(), w);
        assert!(AttentionWeights::from_json(r#"{"w_q":[[1.0]],"w_k":[[1.0]],"w_v":[[1.0,2.0]]}"#).is_err());
    }

    #[test]
    fn concat_and_slice() {
        let a = FeatureMap::seeded(3, 4, 1).unwrap();
        let b = FeatureMap::seeded(3, 4, 2).unwrap();
        let c = concat_fuse(&a, &b).unwrap();
        assert_eq!(c.dim(), 8);
        assert_eq!(c.slice_channels(0, 4).unwrap(), a);
        assert_eq!(c.slice_channels(4, 8).unwrap(), b);
        let empty = FeatureMap::new(Array2::zeros((3, 0))).unwrap();
        assert_eq!(concat_fuse(&empty, &a).unwrap(), a);
        assert!(concat_fuse(&a, &FeatureMap::seeded(2, 4, 0).unwrap()).is_err());
    }

    #[test]
    fn modulation_cases() {
        let f = FeatureMap::seeded(3, 4, 5).unwrap();
        assert_eq!(prompt_modulate(&f, &ModulationParams::identity(4)).unwrap(), f);
        let double = ModulationParams::new(vec![1.0; 4], vec![0.0; 4]).unwrap();
        let out = prompt_modulate(&f, &double).unwrap();
        for (a, b) in out.view().iter().zip(f.view()) {
            assert_eq!(*a, 2.0 * b);
        }
        assert!(prompt_modulate(&f, &ModulationParams::identity(3)).is_err());
        assert!(ModulationParams::new(vec![0.0], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn modulation_elementwise_oracle() {
        let f = FeatureMap::seeded(3, 4, 6).unwrap();
        let g = FeatureMap::seeded(1, 8, 7).unwrap().into_inner().into_raw_vec_and_offset().0;
        let m = ModulationParams::new(g[..4].to_vec(), g[4..].to_vec()).unwrap();
        let out = prompt_modulate(&f, &m).unwrap();
        for t in 0..3 {
            for c in 0..4 {
                let expected = (1.0 + g[c]) * f.view()[[t, c]] + g[4 + c];
                assert!((out.view()[[t, c]] - expected).abs() < 1e-9);
            }
        }
    }
}
