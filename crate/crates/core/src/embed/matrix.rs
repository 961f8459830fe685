use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{EcneError, Result};

/// Dense row-major embedding table with one named row per item.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    names: Vec<String>,
    dim: usize,
    values: Vec<f32>,
}

impl EmbeddingMatrix {
    pub fn new(names: Vec<String>, dim: usize, values: Vec<f32>) -> Result<EmbeddingMatrix> {
        if values.len() != names.len() * dim {
            return Err(EcneError::Shape(format!(
                "{} rows of dim {dim} need {} values, got {}",
                names.len(),
                names.len() * dim,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(EcneError::Shape(format!(
                "non-finite entry in row {}",
                names[i / dim.max(1)]
            )));
        }
        Ok(EmbeddingMatrix { names, dim, values })
    }

    pub fn rows(&self) -> usize {
        self.names.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn row_by_name(&self, name: &str) -> Option<&[f32]> {
        self.names.iter().position(|n| n == name).map(|i| self.row(i))
    }

    /// Text format: `count dim`, then `name v1 ... vd` per row.
    pub fn write_text<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut out = BufWriter::new(out);
        writeln!(out, "{} {}", self.rows(), self.dim)?;
        for (i, name) in self.names.iter().enumerate() {
            write!(out, "{name}")?;
            for v in self.row(i) {
                write!(out, " {v}")?;
            }
            writeln!(out)?;
        }
        out.flush()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| EcneError::io(path, e))?;
        self.write_text(file).map_err(|e| EcneError::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<EmbeddingMatrix> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| EcneError::io(path, e))?;
        let mut lines = BufReader::new(file).lines();
        let parse_err = |line: usize, message: String| EcneError::Parse {
            path: path.to_owned(),
            line,
            message,
        };
        let header = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing header".into()))?
            .map_err(|e| EcneError::io(path, e))?;
        let mut head = header.split_whitespace().map(str::parse::<usize>);
        let (count, dim) = match (head.next(), head.next(), head.next()) {
            (Some(Ok(c)), Some(Ok(d)), None) => (c, d),
            _ => return Err(parse_err(1, format!("bad header {header:?}"))),
        };
        let mut names = Vec::with_capacity(count);
        let mut values = Vec::with_capacity(count * dim);
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| EcneError::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let name = tokens.next().unwrap().to_owned();
            let before = values.len();
            for t in tokens {
                values.push(t.parse::<f32>().map_err(|e| parse_err(i + 2, format!("{t:?}: {e}")))?);
            }
            if values.len() - before != dim {
                return Err(parse_err(
                    i + 2,
                    format!("expected {dim} values, got {}", values.len() - before),
                ));
            }
            names.push(name);
        }
        if names.len() != count {
            return Err(parse_err(1, format!("header says {count} rows, found {}", names.len())));
        }
        EmbeddingMatrix::new(names, dim, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let m = EmbeddingMatrix::new(
            vec!["0_1".into(), "1_2".into()],
            3,
            vec![0.1, -2.5, 3e-7, 1.0, 0.0, -0.333_333_34],
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.txt");
        m.save(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("2 3\n0_1 0.1 -2.5 "));
        assert_eq!(EmbeddingMatrix::load(&path).unwrap(), m);
    }

    #[test]
    fn rejects_shape_mismatch() {
        assert!(EmbeddingMatrix::new(vec!["a".into()], 2, vec![1.0]).is_err());
        assert!(EmbeddingMatrix::new(vec!["a".into()], 1, vec![f32::NAN]).is_err());
    }

    #[test]
    fn load_reports_bad_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "1 2\na 1.0\n").unwrap();
        assert!(matches!(
            EmbeddingMatrix::load(&path),
            Err(EcneError::Parse { line: 2, .. })
        ));
    }
}
