//! Uniform periodic grids on [-L, L]^d and the scalar fields living on them.

use crate::error::{Error, Result};
use crate::par;
use std::io::{Read, Write};

/// Discrete L^p norms. `L1` and `L2` carry the dx^d quadrature weight,
/// `Sup` is the plain maximum of absolute values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    Sup,
}

/// A uniform periodic sampling of [-L, L]^d, d in {1, 2}.
///
/// Nodes sit at x_j = -L + j*dx with dx = 2L/n (cell-corner convention);
/// the right endpoint +L is identified with -L.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub half_width: f64,
    pub n: usize,
    pub dim: usize,
}

impl GridSpec {
    pub fn new(half_width: f64, n: usize, dim: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Invalid(format!(
                "half_width must be positive, got {half_width}"
            )));
        }
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::Invalid(format!(
                "n must be even and positive, got {n}"
            )));
        }
        if dim != 1 && dim != 2 {
            return Err(Error::Invalid(format!("dim must be 1 or 2, got {dim}")));
        }
        Ok(GridSpec { half_width, n, dim })
    }

    pub fn new_1d(half_width: f64, n: usize) -> Result<Self> {
        Self::new(half_width, n, 1)
    }

    pub fn new_2d(half_width: f64, n: usize) -> Result<Self> {
        Self::new(half_width, n, 2)
    }

    /// Grid spacing 2L/n.
    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Quadrature weight dx^d.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    /// Total number of nodes n^d.
    pub fn len(&self) -> usize {
        match self.dim {
            1 => self.n,
            _ => self.n * self.n,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of index j along one axis.
    pub fn coord(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.dx()
    }

    /// All axis coordinates.
    pub fn axis(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.coord(j)).collect()
    }

    /// Node position for a flat row-major index. Axis order is (x1, x2):
    /// `flat = i1 * n + i2` in 2D.
    pub fn position(&self, flat: usize) -> Vec<f64> {
        match self.dim {
            1 => vec![self.coord(flat)],
            _ => vec![self.coord(flat / self.n), self.coord(flat % self.n)],
        }
    }

    /// Frequency represented by DFT bin k along one axis, in cycles per
    /// length unit: xi_k = k/(2L) for k < n/2, (k - n)/(2L) otherwise.
    pub fn frequency(&self, k: usize) -> f64 {
        let k = k as isize;
        let n = self.n as isize;
        let signed = if k < n / 2 { k } else { k - n };
        signed as f64 / (2.0 * self.half_width)
    }

    /// Index of the axis node nearest to coordinate `x` (no wrap).
    pub fn nearest_index(&self, x: f64) -> usize {
        let j = ((x + self.half_width) / self.dx()).round() as isize;
        j.clamp(0, self.n as isize - 1) as usize
    }

    fn describe(&self) -> String {
        format!("[L={}, n={}, d={}]", self.half_width, self.n, self.dim)
    }
}

/// Real scalar field sampled on a [`GridSpec`], row-major in axis order.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    spec: GridSpec,
    values: Vec<f64>,
}

impl Field {
    /// Wrap raw samples, checking length and finiteness.
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Invalid(format!(
                "expected {} samples for grid {}, got {}",
                spec.len(),
                spec.describe(),
                values.len()
            )));
        }
        if let Some(flat) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample {
                node: spec.position(flat),
                value: values[flat],
            });
        }
        Ok(Field { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Field {
            spec,
            values: vec![0.0; spec.len()],
        }
    }

    /// Sample a function of position on every node.
    pub fn sample<F>(spec: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync + Send,
    {
        let n = spec.n;
        let values: Vec<f64> = match spec.dim {
            1 => par::map_indices(n, |j| f(&[spec.coord(j)])),
            _ => {
                let mut buf = vec![0.0; spec.len()];
                par::for_each_row_mut(&mut buf, n, |i1, row| {
                    let x1 = spec.coord(i1);
                    for (i2, v) in row.iter_mut().enumerate() {
                        *v = f(&[x1, spec.coord(i2)]);
                    }
                });
                buf
            }
        };
        Field::new(spec, values)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sample at flat index.
    pub fn at(&self, flat: usize) -> f64 {
        self.values[flat]
    }

    /// 2D accessor: value at axis indices (i1, i2).
    pub fn at2(&self, i1: usize, i2: usize) -> f64 {
        debug_assert_eq!(self.spec.dim, 2);
        self.values[i1 * self.spec.n + i2]
    }

    pub(crate) fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub(crate) fn from_raw(spec: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Field { spec, values }
    }

    fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch {
                left: self.spec.describe(),
                right: other.spec.describe(),
            });
        }
        Ok(())
    }

    /// Pointwise a*self + b*other.
    pub fn lin_comb(&self, a: f64, other: &Field, b: f64) -> Result<Field> {
        self.check_same_grid(other)?;
        let mut out = self.values.clone();
        par::for_each_indexed_mut(&mut out, |i, v| {
            *v = a * *v + b * other.values[i];
        });
        Field::new(self.spec, out)
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.lin_comb(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.lin_comb(1.0, other, -1.0)
    }

    pub fn scale(&self, a: f64) -> Field {
        let mut out = self.values.clone();
        par::for_each_mut(&mut out, |v| *v *= a);
        Field::from_raw(self.spec, out)
    }

    /// Pointwise map. The result is validated for finiteness.
    pub fn map<F>(&self, f: F) -> Result<Field>
    where
        F: Fn(f64) -> f64 + Sync + Send,
    {
        let mut out = self.values.clone();
        par::for_each_mut(&mut out, |v| *v = f(*v));
        Field::new(self.spec, out)
    }

    /// Discrete norm with dx^d weight for p < infinity.
    pub fn norm(&self, p: Norm) -> f64 {
        let w = self.spec.cell_volume();
        match p {
            Norm::Sup => par::reduce_chunks(
                &self.values,
                |c| c.iter().fold(0.0f64, |m, v| m.max(v.abs())),
                f64::max,
            )
            .unwrap_or(0.0),
            Norm::L1 => {
                let s = par::reduce_chunks(
                    &self.values,
                    |c| c.iter().map(|v| v.abs()).sum::<f64>(),
                    |a, b| a + b,
                )
                .unwrap_or(0.0);
                s * w
            }
            Norm::L2 => {
                let s = par::reduce_chunks(
                    &self.values,
                    |c| c.iter().map(|v| v * v).sum::<f64>(),
                    |a, b| a + b,
                )
                .unwrap_or(0.0);
                (s * w).sqrt()
            }
        }
    }

    /// Sup-norm distance, the solver stopping metric.
    pub fn sup_distance(&self, other: &Field) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(par::sup_abs_diff(&self.values, &other.values))
    }
}

const MAGIC: &[u8; 4] = b"NFLD";
const VERSION: u32 = 1;

impl Field {
    /// Serialize as flat little-endian f64 preceded by the 32-byte header
    /// (magic "NFLD", version u32, d u32, n u32, L f64, 8 reserved bytes).
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.spec.dim as u32).to_le_bytes())?;
        w.write_all(&(self.spec.n as u32).to_le_bytes())?;
        w.write_all(&self.spec.half_width.to_le_bytes())?;
        w.write_all(&[0u8; 8])?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Field> {
        let mut header = [0u8; 32];
        r.read_exact(&mut header)?;
        if &header[0..4] != MAGIC {
            return Err(Error::Io("bad magic, not an NFLD field".into()));
        }
        let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
        if version != VERSION {
            return Err(Error::Io(format!("unsupported NFLD version {version}")));
        }
        let dim = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        let n = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
        let half_width = f64::from_le_bytes(header[16..24].try_into().unwrap());
        let spec = GridSpec::new(half_width, n, dim)?;
        let mut buf = vec![0u8; spec.len() * 8];
        r.read_exact(&mut buf)?;
        let values = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Field::new(spec, values)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)
    }

    pub fn load(path: &std::path::Path) -> Result<Field> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        Field::read_from(&mut f)
    }
}
