use std::path::Path;

use thiserror::Error;

use crate::spectral::{Grid, SpectralScalar, SpectralVector};

use super::IoError;

pub const SNAPSHOT_MAGIC: [u8; 4] = *b"MREF";
pub const SNAPSHOT_VERSION: u8 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SnapshotError {
    #[error("bad magic {0:?}, expected \"MREF\"")]
    BadMagic([u8; 4]),
    #[error("unsupported version {0}, expected 1")]
    Version(u8),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("invalid header: {0}")]
    Header(String),
}

/// Real-space samples of one or more fields sharing a grid.
///
/// Layout (little-endian): `"MREF"`, `u8` version, `u8 d`, `u8 nfields`,
/// `u8` pad, `d × u32` points per axis, `f64` time, `f64` gamma, then each
/// field's samples as row-major `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub shape: Vec<usize>,
    pub time: f64,
    pub gamma: f64,
    pub fields: Vec<Vec<f64>>,
}

impl Snapshot {
    pub fn from_vector(b: &SpectralVector, time: f64, gamma: f64) -> Self {
        let g = b.grid();
        Self {
            shape: vec![g.n(); g.dim()],
            time,
            gamma,
            fields: b.to_samples(),
        }
    }

    pub fn from_scalars(fields: &[&SpectralScalar], time: f64, gamma: f64) -> Result<Self, IoError> {
        let first = fields.first().ok_or_else(|| IoError::Shape("snapshot needs at least one field".into()))?;
        let g = first.grid();
        if fields.iter().any(|f| !f.grid().same_shape(g)) {
            return Err(IoError::Shape("snapshot fields must share a grid".into()));
        }
        Ok(Self {
            shape: vec![g.n(); g.dim()],
            time,
            gamma,
            fields: fields.iter().map(|f| f.to_samples()).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    /// Grid implied by the header, with the given period.
    pub fn grid(&self, period: f64) -> Result<Grid, IoError> {
        let n = self.shape[0];
        if self.shape.iter().any(|&m| m != n) {
            return Err(IoError::Shape(format!("non-cubic snapshot shape {:?}", self.shape)));
        }
        Grid::new(self.dim(), n)
            .and_then(|g| g.with_period(period))
            .map_err(|e| IoError::Shape(e.to_string()))
    }

    pub fn scalar(&self, index: usize, period: f64) -> Result<SpectralScalar, IoError> {
        let grid = self.grid(period)?;
        let samples = self
            .fields
            .get(index)
            .ok_or_else(|| IoError::Shape(format!("no field {index} in snapshot")))?;
        SpectralScalar::from_samples(grid, samples).map_err(|e| IoError::Shape(e.to_string()))
    }

    /// The fields as one vector field; requires `nfields == d`.
    pub fn vector(&self, period: f64) -> Result<SpectralVector, IoError> {
        if self.fields.len() != self.dim() {
            return Err(IoError::Shape(format!(
                "{} fields do not form a {}-vector",
                self.fields.len(),
                self.dim()
            )));
        }
        let grid = self.grid(period)?;
        SpectralVector::from_samples(grid, &self.fields).map_err(|e| IoError::Shape(e.to_string()))
    }

    pub fn encode(&self) -> Result<Vec<u8>, SnapshotError> {
        let d = u8::try_from(self.dim()).map_err(|_| SnapshotError::Header("too many axes".into()))?;
        let nf = u8::try_from(self.fields.len()).map_err(|_| SnapshotError::Header("too many fields".into()))?;
        let count: usize = self.shape.iter().product();
        if self.fields.iter().any(|f| f.len() != count) {
            return Err(SnapshotError::Header("field length does not match shape".into()));
        }
        let mut out = Vec::with_capacity(24 + 4 * self.dim() + 8 * count * self.fields.len());
        out.extend_from_slice(&SNAPSHOT_MAGIC);
        out.extend_from_slice(&[SNAPSHOT_VERSION, d, nf, 0]);
        for &n in &self.shape {
            let n = u32::try_from(n).map_err(|_| SnapshotError::Header("axis too long".into()))?;
            out.extend_from_slice(&n.to_le_bytes());
        }
        out.extend_from_slice(&self.time.to_le_bytes());
        out.extend_from_slice(&self.gamma.to_le_bytes());
        for f in &self.fields {
            for v in f {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, SnapshotError> {
        let need = |expected: usize| {
            if bytes.len() < expected {
                Err(SnapshotError::Truncated {
                    expected,
                    found: bytes.len(),
                })
            } else {
                Ok(())
            }
        };
        need(8)?;
        let magic: [u8; 4] = bytes[0..4].try_into().expect("4 bytes");
        if magic != SNAPSHOT_MAGIC {
            return Err(SnapshotError::BadMagic(magic));
        }
        if bytes[4] != SNAPSHOT_VERSION {
            return Err(SnapshotError::Version(bytes[4]));
        }
        let (d, nf) = (bytes[5] as usize, bytes[6] as usize);
        if d == 0 {
            return Err(SnapshotError::Header("zero dimensions".into()));
        }
        let header = 8 + 4 * d + 16;
        need(header)?;
        let shape: Vec<usize> = (0..d)
            .map(|a| u32::from_le_bytes(bytes[8 + 4 * a..12 + 4 * a].try_into().expect("4 bytes")) as usize)
            .collect();
        let f64_at = |off: usize| f64::from_le_bytes(bytes[off..off + 8].try_into().expect("8 bytes"));
        let time = f64_at(8 + 4 * d);
        let gamma = f64_at(16 + 4 * d);
        let count = shape
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .and_then(|c| c.checked_mul(nf))
            .ok_or_else(|| SnapshotError::Header("shape overflows".into()))?;
        let total = header + 8 * count;
        need(total)?;
        if bytes.len() > total {
            return Err(SnapshotError::Header(format!("{} trailing bytes", bytes.len() - total)));
        }
        let per = count / nf.max(1);
        let fields = (0..nf)
            .map(|f| (0..per).map(|i| f64_at(header + 8 * (f * per + i))).collect())
            .collect();
        Ok(Self {
            shape,
            time,
            gamma,
            fields,
        })
    }
}

pub fn write_snapshot(path: impl AsRef<Path>, snapshot: &Snapshot) -> Result<(), IoError> {
    let path = path.as_ref();
    let bytes = snapshot.encode().map_err(|source| IoError::Snapshot {
        path: path.into(),
        source,
    })?;
    std::fs::write(path, bytes).map_err(|e| IoError::io(path, e))
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Snapshot, IoError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| IoError::io(path, e))?;
    Snapshot::decode(&bytes).map_err(|source| IoError::Snapshot {
        path: path.into(),
        source,
    })
}
