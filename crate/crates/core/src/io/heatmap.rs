use std::io::Write;
use std::path::{Path, PathBuf};

use super::IoError;

/// Range information written next to a heatmap.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapInfo {
    pub min: f64,
    pub max: f64,
    pub degenerate: bool,
    pub sidecar: PathBuf,
}

/// The `x₃ = index` plane of a 3-D row-major sample array.
pub fn slice_3d(samples: &[f64], n: usize, index: usize) -> Vec<f64> {
    assert_eq!(samples.len(), n * n * n, "expected n³ samples");
    assert!(index < n, "slice index out of range");
    (0..n * n).map(|p| samples[p * n + index]).collect()
}

/// 8-bit binary PGM of an `n × n` row-major field (`flat = i₁·n + i₂`).
/// Column `c` is `x₁` index `c`; the top row is the largest `x₂`. Values map
/// affinely from `[min, max]` to `[0, 255]`; a constant field is mid-gray.
/// The range goes to `<path>.txt`.
pub fn render_heatmap(samples: &[f64], n: usize, path: impl AsRef<Path>) -> Result<HeatmapInfo, IoError> {
    let path = path.as_ref();
    if samples.len() != n * n {
        return Err(IoError::Shape(format!("heatmap needs {} samples, got {}", n * n, samples.len())));
    }
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let degenerate = !(max > min);
    let mut pixels = Vec::with_capacity(n * n);
    for row in 0..n {
        let i2 = n - 1 - row;
        for i1 in 0..n {
            let v = samples[i1 * n + i2];
            let p = if degenerate {
                128
            } else {
                (255.0 * (v - min) / (max - min)).round().clamp(0.0, 255.0) as u8
            };
            pixels.push(p);
        }
    }
    let mut file = std::fs::File::create(path).map_err(|e| IoError::io(path, e))?;
    write!(file, "P5\n{n} {n}\n255\n").map_err(|e| IoError::io(path, e))?;
    file.write_all(&pixels).map_err(|e| IoError::io(path, e))?;

    let mut sidecar = path.as_os_str().to_owned();
    sidecar.push(".txt");
    let sidecar = PathBuf::from(sidecar);
    let mut text = format!(
        "min {min:.16e}\nmax {max:.16e}\nsize {n}x{n}\norientation column=x1 index, top row=largest x2\n"
    );
    if degenerate {
        text.push_str("degenerate range: uniform mid-gray 128\n");
    }
    std::fs::write(&sidecar, text).map_err(|e| IoError::io(&sidecar, e))?;
    Ok(HeatmapInfo {
        min,
        max,
        degenerate,
        sidecar,
    })
}
