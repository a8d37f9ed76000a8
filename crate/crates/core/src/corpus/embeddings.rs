use std::collections::HashMap;
use std::path::Path;

use super::{read_to_string, CorpusError};

/// Pretrained word vectors with a mean-vector fallback for unknown words.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<f64>,
    unk: Vec<f64>,
}

impl EmbeddingTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of loaded words, not counting UNK.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn unk(&self) -> &[f64] {
        &self.unk
    }

    /// Exact match only.
    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index
            .get(word)
            .map(|&i| &self.vectors[i * self.dim..(i + 1) * self.dim])
    }

    /// Exact match, then lowercase, then UNK.
    pub fn lookup(&self, word: &str) -> &[f64] {
        self.get(word)
            .or_else(|| self.get(&word.to_lowercase()))
            .unwrap_or(&self.unk)
    }
}

pub fn load_embeddings(path: impl AsRef<Path>, dim: usize) -> Result<EmbeddingTable, CorpusError> {
    parse_embeddings(&read_to_string(path.as_ref())?, dim)
}

/// Parse the word2vec text layout. A first line of exactly two integers is
/// taken as a `count dim` header; a later duplicate word keeps its first
/// vector.
pub fn parse_embeddings(text: &str, dim: usize) -> Result<EmbeddingTable, CorpusError> {
    let mut words = Vec::new();
    let mut index = HashMap::new();
    let mut vectors = Vec::new();

    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let mut fields = line.split_whitespace();
        let Some(word) = fields.next() else {
            continue;
        };
        let rest: Vec<&str> = fields.collect();
        if n == 0 && rest.len() == 1 && word.parse::<usize>().is_ok() {
            if let Ok(header_dim) = rest[0].parse::<usize>() {
                if header_dim != dim {
                    return Err(CorpusError::DimensionMismatch {
                        line: line_no,
                        expected: dim,
                        found: header_dim,
                    });
                }
                continue;
            }
        }
        if rest.len() != dim {
            return Err(CorpusError::DimensionMismatch {
                line: line_no,
                expected: dim,
                found: rest.len(),
            });
        }
        let mut row = Vec::with_capacity(dim);
        for f in rest {
            match f.parse::<f64>() {
                Ok(v) if v.is_finite() => row.push(v),
                _ => return Err(CorpusError::format(line_no, format!("bad value {f:?}"))),
            }
        }
        if index.contains_key(word) {
            continue;
        }
        index.insert(word.to_string(), words.len());
        words.push(word.to_string());
        vectors.extend(row);
    }

    let mut unk = vec![0.0; dim];
    if !words.is_empty() {
        for row in vectors.chunks(dim.max(1)) {
            for (u, v) in unk.iter_mut().zip(row) {
                *u += v;
            }
        }
        let n = words.len() as f64;
        unk.iter_mut().for_each(|u| *u /= n);
    }
    Ok(EmbeddingTable {
        dim,
        words,
        index,
        vectors,
        unk,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const THREE: &str = "the 0.1 0.2 0.3 0.4\nCat 1 2 3 4\nsat -1 0 0.5 2\n";

    #[test]
    fn three_words() {
        let t = parse_embeddings(THREE, 4).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.dim(), 4);
        assert_eq!(t.get("sat"), Some(&[-1.0, 0.0, 0.5, 2.0][..]));
    }

    #[test]
    fn header_is_skipped() {
        let with = parse_embeddings(&format!("3 4\n{THREE}"), 4).unwrap();
        assert_eq!(with, parse_embeddings(THREE, 4).unwrap());
        assert!(matches!(
            parse_embeddings(&format!("3 5\n{THREE}"), 4),
            Err(CorpusError::DimensionMismatch { line: 1, .. })
        ));
    }

    #[test]
    fn unk_is_mean() {
        let t = parse_embeddings(THREE, 4).unwrap();
        let rows = [[0.1, 0.2, 0.3, 0.4], [1.0, 2.0, 3.0, 4.0], [-1.0, 0.0, 0.5, 2.0]];
        for j in 0..4 {
            let mean = (rows[0][j] + rows[1][j] + rows[2][j]) / 3.0;
            assert!((t.unk()[j] - mean).abs() < 1e-15);
        }
    }

    #[test]
    fn lookup_falls_back() {
        let t = parse_embeddings(THREE, 4).unwrap();
        assert_eq!(t.lookup("THE"), t.get("the").unwrap());
        assert_eq!(t.lookup("Cat"), &[1.0, 2.0, 3.0, 4.0]);
        assert!(t.get("cat").is_none());
        assert_eq!(t.lookup("cat"), t.unk());
        assert_eq!(t.lookup("dog"), t.unk());
    }

    #[test]
    fn wrong_width_reports_line() {
        match parse_embeddings("a 1 2 3 4\nb 1 2 3\n", 4) {
            Err(CorpusError::DimensionMismatch { line, expected, found }) => {
                assert_eq!((line, expected, found), (2, 4, 3))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_table_has_zero_unk() {
        let t = parse_embeddings("", 3).unwrap();
        assert!(t.is_empty());
        assert_eq!(t.unk(), &[0.0; 3]);
    }
}
