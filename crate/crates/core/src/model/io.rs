//! Model files: magic, version, JSON header, little-endian `f64` tensors and
//! a SHA-256 trailer over everything before it.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Matrix, Model, ModelConfig, ModelError, ModelMeta, Params, Vocab};
use crate::compress::CompressionLevel;

pub const MODEL_MAGIC: &[u8; 16] = b"SENSEFOLD-MODEL\n";
pub const MODEL_VERSION: u32 = 1;
const DIGEST_LEN: usize = 32;

#[derive(Serialize, Deserialize)]
struct Header {
    config: ModelConfig,
    level: CompressionLevel,
    words: Vec<String>,
    tags: Vec<String>,
    meta: ModelMeta,
    /// (rows, cols) of embeddings, hidden weights, hidden bias, output weights, output bias
    shapes: [(usize, usize); 5],
}

fn shapes(p: &Params) -> [(usize, usize); 5] {
    [
        (p.embeddings.rows, p.embeddings.cols),
        (p.hidden_w.rows, p.hidden_w.cols),
        (1, p.hidden_b.len()),
        (p.output_w.rows, p.output_w.cols),
        (1, p.output_b.len()),
    ]
}

pub fn model_to_bytes(model: &Model) -> Vec<u8> {
    let header = Header {
        config: model.config.clone(),
        level: model.level,
        words: model.words.items().to_vec(),
        tags: model.tags.items().to_vec(),
        meta: model.meta.clone(),
        shapes: shapes(&model.params),
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let mut out = Vec::with_capacity(json.len() + 8 * model.n_params() + 64);
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    out.extend_from_slice(&(json.len() as u64).to_le_bytes());
    out.extend_from_slice(&json);
    for tensor in model.params.tensors() {
        for v in tensor {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

pub fn model_from_bytes(bytes: &[u8]) -> Result<Model, ModelError> {
    let corrupt = |msg: &str| ModelError::Corrupt(msg.to_string());
    let fixed = MODEL_MAGIC.len() + 4 + 8;
    if bytes.len() < MODEL_MAGIC.len() || &bytes[..MODEL_MAGIC.len()] != MODEL_MAGIC {
        return Err(corrupt("not a sensefold model file"));
    }
    if bytes.len() < fixed + DIGEST_LEN {
        return Err(corrupt("truncated file"));
    }
    let version = u32::from_le_bytes(bytes[16..20].try_into().unwrap());
    if version != MODEL_VERSION {
        return Err(ModelError::Version(version));
    }
    let (body, digest) = bytes.split_at(bytes.len() - DIGEST_LEN);
    if Sha256::digest(body).as_slice() != digest {
        return Err(corrupt("checksum mismatch (truncated or modified file)"));
    }
    let header_len = u64::from_le_bytes(bytes[20..28].try_into().unwrap()) as usize;
    let header_end =
        fixed.checked_add(header_len).filter(|&e| e <= body.len()).ok_or_else(|| corrupt("bad header length"))?;
    let header: Header =
        serde_json::from_slice(&body[fixed..header_end]).map_err(|e| ModelError::Corrupt(format!("header: {e}")))?;

    let mut values = body[header_end..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let n_values: usize = header.shapes.iter().map(|(r, c)| r * c).sum();
    if (body.len() - header_end) != 8 * n_values {
        return Err(corrupt("tensor data does not match the header shapes"));
    }
    let mut take =
        |(rows, cols): (usize, usize)| Matrix { rows, cols, data: values.by_ref().take(rows * cols).collect() };
    let [e, hw, hb, ow, ob] = header.shapes;
    let params = Params {
        embeddings: take(e),
        hidden_w: take(hw),
        hidden_b: take(hb).data,
        output_w: take(ow),
        output_b: take(ob).data,
    };
    let c = &header.config;
    let consistent = e == (header.words.len(), c.embedding_dim)
        && hw == (c.hidden_dim, 2 * c.embedding_dim)
        && hb == (1, c.hidden_dim)
        && ow == (header.tags.len(), c.hidden_dim)
        && ob == (1, header.tags.len());
    if !consistent {
        return Err(corrupt("tensor shapes disagree with the configuration"));
    }
    Ok(Model {
        config: header.config,
        level: header.level,
        words: Vocab::from_items(header.words)?,
        tags: Vocab::from_items(header.tags)?,
        params,
        meta: header.meta,
    })
}

pub fn save_model(model: &Model, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let mut f = File::create(path)?;
    f.write_all(&model_to_bytes(model))?;
    f.sync_all()?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model, ModelError> {
    model_from_bytes(&std::fs::read(path)?)
}

/// Pretrained word vectors from `word v1 ... vE` lines. A leading
/// `count dim` line is skipped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Embeddings {
    pub dim: usize,
    pub vectors: HashMap<String, Vec<f64>>,
}

impl Embeddings {
    pub fn read(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        Self::parse(BufReader::new(File::open(path)?))
    }

    pub fn parse(reader: impl BufRead) -> Result<Self, ModelError> {
        let mut out = Embeddings::default();
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            let mut fields = line.split_whitespace();
            let Some(word) = fields.next() else { continue };
            let values: Vec<&str> = fields.collect();
            if n == 0 && values.len() == 1 && word.parse::<usize>().is_ok() && values[0].parse::<usize>().is_ok() {
                continue;
            }
            let vector = values
                .iter()
                .map(|v| v.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ModelError::Embeddings { line: n + 1, msg: e.to_string() })?;
            if vector.is_empty() {
                return Err(ModelError::Embeddings { line: n + 1, msg: "no values".into() });
            }
            if out.dim == 0 {
                out.dim = vector.len();
            } else if vector.len() != out.dim {
                return Err(ModelError::Embeddings {
                    line: n + 1,
                    msg: format!("{} values, expected {}", vector.len(), out.dim),
                });
            }
            out.vectors.entry(word.to_lowercase()).or_insert(vector);
        }
        Ok(out)
    }

    /// Overwrites the rows of known words; returns how many were set.
    pub fn apply(&self, model: &mut Model) -> Result<usize, ModelError> {
        if self.vectors.is_empty() {
            return Ok(0);
        }
        if self.dim != model.config.embedding_dim {
            return Err(ModelError::InvalidConfig(format!(
                "embeddings have {} dimensions but embedding_dim is {}",
                self.dim, model.config.embedding_dim
            )));
        }
        let mut set = 0;
        for (i, word) in model.words.items().iter().enumerate() {
            if let Some(v) = self.vectors.get(word) {
                model.params.embeddings.row_mut(i).copy_from_slice(v);
                set += 1;
            }
        }
        Ok(set)
    }
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<Embeddings, ModelError> {
    Embeddings::read(path)
}
