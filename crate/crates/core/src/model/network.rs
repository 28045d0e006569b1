use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `self * x + b`
    fn affine(&self, x: &[f64], b: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|r| b[r] + dot(self.row(r), x)).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub(crate) fn softmax(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

/// A sentence as word ids plus per-token targets; `supervised[i] == false`
/// marks a skipped token whose target is ignored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedSentence {
    pub words: Vec<usize>,
    pub targets: Vec<usize>,
    pub supervised: Vec<bool>,
}

impl EncodedSentence {
    pub fn n_supervised(&self) -> usize {
        self.supervised.iter().filter(|&&s| s).count()
    }
}

/// All trainable tensors. Also used for gradients and optimizer moments.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub embeddings: Matrix,
    pub hidden_w: Matrix,
    pub hidden_b: Vec<f64>,
    pub output_w: Matrix,
    pub output_b: Vec<f64>,
}

impl Params {
    pub fn zeros_like(other: &Params) -> Self {
        Params {
            embeddings: Matrix::zeros(other.embeddings.rows, other.embeddings.cols),
            hidden_w: Matrix::zeros(other.hidden_w.rows, other.hidden_w.cols),
            hidden_b: vec![0.0; other.hidden_b.len()],
            output_w: Matrix::zeros(other.output_w.rows, other.output_w.cols),
            output_b: vec![0.0; other.output_b.len()],
        }
    }

    pub fn tensors(&self) -> [&[f64]; 5] {
        [&self.embeddings.data, &self.hidden_w.data, &self.hidden_b, &self.output_w.data, &self.output_b]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 5] {
        [
            &mut self.embeddings.data,
            &mut self.hidden_w.data,
            &mut self.hidden_b,
            &mut self.output_w.data,
            &mut self.output_b,
        ]
    }

    pub fn n_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    fn embedding_dim(&self) -> usize {
        self.embeddings.cols
    }

    /// Sum of the embeddings of a sentence.
    fn embedding_sum(&self, ids: &[usize]) -> Vec<f64> {
        let mut sum = vec![0.0; self.embedding_dim()];
        for &id in ids {
            axpy(&mut sum, 1.0, self.embeddings.row(id));
        }
        sum
    }

    /// `[e_i ; mean of the other embeddings]`, zero context for a lone token.
    fn feature(&self, ids: &[usize], sum: &[f64], i: usize) -> Vec<f64> {
        let e = self.embeddings.row(ids[i]);
        let mut f = Vec::with_capacity(2 * e.len());
        f.extend_from_slice(e);
        if ids.len() > 1 {
            let k = (ids.len() - 1) as f64;
            f.extend(sum.iter().zip(e).map(|(s, x)| (s - x) / k));
        } else {
            f.extend(std::iter::repeat_n(0.0, e.len()));
        }
        f
    }

    fn hidden(&self, f: &[f64]) -> Vec<f64> {
        let mut h = self.hidden_w.affine(f, &self.hidden_b);
        h.iter_mut().for_each(|v| *v = v.tanh());
        h
    }

    /// Inference-mode distributions for the tokens at `positions`.
    pub fn infer(&self, ids: &[usize], positions: &[usize]) -> Vec<Vec<f64>> {
        let sum = self.embedding_sum(ids);
        positions
            .iter()
            .map(|&i| {
                let h = self.hidden(&self.feature(ids, &sum, i));
                let mut z = self.output_w.affine(&h, &self.output_b);
                softmax(&mut z);
                z
            })
            .collect()
    }

    /// Mean `-ln q[target]` over supervised tokens of the batch, the number of
    /// such tokens, and the gradient. A batch without supervision has loss 0
    /// and a zero gradient.
    pub fn loss_and_grad(
        &self,
        batch: &[EncodedSentence],
        dropout_rate: f64,
        mut rng: Option<&mut ChaCha8Rng>,
    ) -> (f64, usize, Params) {
        let mut grad = Params::zeros_like(self);
        let n_sup: usize = batch.iter().map(EncodedSentence::n_supervised).sum();
        if n_sup == 0 {
            return (0.0, 0, grad);
        }
        let scale = 1.0 / n_sup as f64;
        let keep = 1.0 - dropout_rate;
        let e_dim = self.embedding_dim();
        let mut loss = 0.0;
        for s in batch {
            let n = s.words.len();
            let sum = self.embedding_sum(&s.words);
            // gradient w.r.t. each token's context mean
            let mut d_context: Vec<Option<Vec<f64>>> = vec![None; n];
            for i in (0..n).filter(|&i| s.supervised[i]) {
                let f = self.feature(&s.words, &sum, i);
                let h = self.hidden(&f);
                let mask: Vec<f64> = match rng.as_deref_mut() {
                    Some(r) if dropout_rate > 0.0 => {
                        (0..h.len()).map(|_| if r.gen::<f64>() < keep { 1.0 / keep } else { 0.0 }).collect()
                    }
                    _ => vec![1.0; h.len()],
                };
                let hd: Vec<f64> = h.iter().zip(&mask).map(|(a, m)| a * m).collect();
                let mut q = self.output_w.affine(&hd, &self.output_b);
                softmax(&mut q);
                let t = s.targets[i];
                loss -= q[t].ln();

                let mut dz = q;
                dz[t] -= 1.0;
                dz.iter_mut().for_each(|v| *v *= scale);
                let mut dhd = vec![0.0; hd.len()];
                for (c, &g) in dz.iter().enumerate() {
                    if g != 0.0 {
                        axpy(grad.output_w.row_mut(c), g, &hd);
                        axpy(&mut dhd, g, self.output_w.row(c));
                    }
                    grad.output_b[c] += g;
                }
                let da: Vec<f64> = (0..h.len()).map(|k| dhd[k] * mask[k] * (1.0 - h[k] * h[k])).collect();
                let mut df = vec![0.0; f.len()];
                for (r, &g) in da.iter().enumerate() {
                    axpy(grad.hidden_w.row_mut(r), g, &f);
                    axpy(&mut df, g, self.hidden_w.row(r));
                    grad.hidden_b[r] += g;
                }
                axpy(grad.embeddings.row_mut(s.words[i]), 1.0, &df[..e_dim]);
                if n > 1 {
                    d_context[i] = Some(df[e_dim..].to_vec());
                }
            }
            // context of token i is (sum - e_i) / (n - 1): every other token
            // receives d_context[i] / (n - 1)
            if n > 1 {
                let k = 1.0 / (n - 1) as f64;
                let mut total = vec![0.0; e_dim];
                for dc in d_context.iter().flatten() {
                    axpy(&mut total, k, dc);
                }
                for (&w, own) in s.words.iter().zip(&d_context) {
                    let row = grad.embeddings.row_mut(w);
                    axpy(row, 1.0, &total);
                    if let Some(dc) = own {
                        axpy(row, -k, dc);
                    }
                }
            }
        }
        (loss * scale, n_sup, grad)
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;

    fn tiny(seed: u64, vocab: usize, e: usize, h: usize, c: usize) -> Params {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m =
            |rows, cols| Matrix { rows, cols, data: (0..rows * cols).map(|_| rng.gen_range(-0.5..0.5)).collect() };
        let embeddings = m(vocab, e);
        let hidden_w = m(h, 2 * e);
        let output_w = m(c, h);
        let hidden_b = m(1, h).data;
        let output_b = m(1, c).data;
        Params { embeddings, hidden_w, hidden_b, output_w, output_b }
    }

    #[test]
    fn distributions_sum_to_one() {
        let p = tiny(1, 6, 4, 5, 7);
        for dist in p.infer(&[1, 2, 3, 2], &[0, 1, 2, 3]) {
            assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(dist.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn lone_token_has_zero_context() {
        let p = tiny(2, 6, 3, 4, 5);
        let f = p.feature(&[4], &p.embedding_sum(&[4]), 0);
        assert_eq!(&f[..3], p.embeddings.row(4));
        assert_eq!(&f[3..], &[0.0; 3]);
    }

    #[test]
    fn context_is_mean_of_other_tokens() {
        let p = tiny(3, 6, 2, 3, 3);
        let ids = [1, 2, 5];
        let f = p.feature(&ids, &p.embedding_sum(&ids), 1);
        for k in 0..2 {
            let want = (p.embeddings.row(1)[k] + p.embeddings.row(5)[k]) / 2.0;
            assert!((f[2 + k] - want).abs() < 1e-15);
        }
    }

    #[test]
    fn loss_values_match_definition() {
        // zero weights give a uniform distribution over c classes: loss ln c
        let mut p = tiny(4, 3, 2, 2, 4);
        p.output_w.data.iter_mut().for_each(|v| *v = 0.0);
        p.output_b.iter_mut().for_each(|v| *v = 0.0);
        let s = EncodedSentence { words: vec![0, 1], targets: vec![2, 0], supervised: vec![true, false] };
        let (loss, n, _) = p.loss_and_grad(&[s], 0.0, None);
        assert_eq!(n, 1);
        assert!((loss - 4f64.ln()).abs() < 1e-12);

        // logits (1, 0) with target 0 is -ln(e/(e+1)); pick the bias so q[t] = 1/e
        let mut p = tiny(5, 3, 2, 2, 2);
        p.output_w.data.iter_mut().for_each(|v| *v = 0.0);
        p.output_b = vec![0.0, (std::f64::consts::E - 1.0).ln()];
        let s = EncodedSentence { words: vec![1], targets: vec![0], supervised: vec![true] };
        let (loss, _, _) = p.loss_and_grad(&[s], 0.0, None);
        assert!((loss - 1.0).abs() < 1e-12, "{loss}");
    }
}
