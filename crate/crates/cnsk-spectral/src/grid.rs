//! Uniform periodic box, wavenumber lattice and Parseval norms.
//!
//! The box is `[-L, L)^2` sampled at `n` points per axis (`n` a power of
//! two), with the wavenumber lattice `xi_k = (pi/L) k`, `k in [-n/2, n/2)^2`.
//! Transforms carry the continuum normalization
//!
//! ```text
//! fhat(xi_k) = dx^2 sum_j f(x_j) e^{-i x_j . xi_k},
//! f(x_j)    = (2 pi)^{-2} dxi^2 sum_k fhat(xi_k) e^{i x_j . xi_k},
//! ```
//!
//! so a spectral coefficient at `xi = 0` directly approximates the integral
//! of the datum, and the discrete Parseval identity
//! `dx^2 sum |f|^2 = (2 pi)^{-2} dxi^2 sum |fhat|^2` holds exactly.
//!
//! Storage layout: row-major with index `i1 * n + i2`, where `i_a = k_a + n/2`
//! enumerates `k_a` from `-n/2` to `n/2 - 1`; the same layout indexes the
//! physical samples `x_j = -L + j dx`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Uniform periodic grid on `[-L, L)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    n: usize,
    half_width: f64,
    dx: f64,
    dxi: f64,
}

impl Grid2D {
    /// Build a grid with `n` points per axis (power of two, at least 8) on
    /// the box of half-width `L`.
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::GridConfig(format!(
                "n must be a power of two >= 8, got {n}"
            )));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::GridConfig(format!(
                "half_width must be positive, got {half_width}"
            )));
        }
        Ok(Self {
            n,
            half_width,
            dx: 2.0 * half_width / n as f64,
            dxi: std::f64::consts::PI / half_width,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dxi(&self) -> f64 {
        self.dxi
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Parseval weight of a single mode, `dxi^2 / (2 pi)^2`.
    pub fn mode_weight(&self) -> f64 {
        let w = self.dxi / (2.0 * std::f64::consts::PI);
        w * w
    }

    /// Integer lattice coordinates `(k1, k2)` of a flat index.
    pub fn k_of(&self, idx: usize) -> (i64, i64) {
        let half = (self.n / 2) as i64;
        let i1 = (idx / self.n) as i64;
        let i2 = (idx % self.n) as i64;
        (i1 - half, i2 - half)
    }

    /// Wavenumber `xi` of a flat index.
    pub fn xi_of(&self, idx: usize) -> [f64; 2] {
        let (k1, k2) = self.k_of(idx);
        [k1 as f64 * self.dxi, k2 as f64 * self.dxi]
    }

    /// Squared wavenumber of a flat index.
    pub fn xi_sq_of(&self, idx: usize) -> f64 {
        let xi = self.xi_of(idx);
        xi[0] * xi[0] + xi[1] * xi[1]
    }

    /// Physical sample point of a flat index.
    pub fn x_of(&self, idx: usize) -> [f64; 2] {
        let i1 = idx / self.n;
        let i2 = idx % self.n;
        [
            -self.half_width + i1 as f64 * self.dx,
            -self.half_width + i2 as f64 * self.dx,
        ]
    }

    /// Flat index of the `xi = 0` mode.
    pub fn zero_mode(&self) -> usize {
        (self.n / 2) * self.n + self.n / 2
    }

    /// Flat index of the mirrored mode `-k`, or `None` when any component is
    /// the unpaired Nyquist row `k = -n/2`.
    pub fn mirror_of(&self, idx: usize) -> Option<usize> {
        let (k1, k2) = self.k_of(idx);
        let half = (self.n / 2) as i64;
        if k1 == -half || k2 == -half {
            return None;
        }
        let i1 = (-k1 + half) as usize;
        let i2 = (-k2 + half) as usize;
        Some(i1 * self.n + i2)
    }

    /// Whether the flat index lies on a Nyquist row or column.
    pub fn on_nyquist(&self, idx: usize) -> bool {
        let (k1, k2) = self.k_of(idx);
        let half = (self.n / 2) as i64;
        k1 == -half || k2 == -half
    }

    /// Largest axis wavenumber magnitude on the lattice, `(n/2) dxi`.
    pub fn max_axis_wavenumber(&self) -> f64 {
        (self.n as f64 / 2.0) * self.dxi
    }
}

/// Which side of the transform a field currently lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Repr {
    Spectral,
    Physical,
}

impl Repr {
    fn name(self) -> &'static str {
        match self {
            Repr::Spectral => "spectral",
            Repr::Physical => "physical",
        }
    }
}

/// Transform direction for [`ScalarField::transform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// physical -> spectral
    Forward,
    /// spectral -> physical
    Inverse,
}

/// Complex scalar field over the lattice.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: Grid2D,
    pub repr: Repr,
    pub data: Vec<Complex64>,
}

/// Two-component field (momentum) over the lattice.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub grid: Grid2D,
    pub repr: Repr,
    pub comps: [Vec<Complex64>; 2],
}

fn require_repr(have: Repr, want: Repr) -> Result<()> {
    if have != want {
        return Err(Error::RepresentationMismatch {
            expected: want.name(),
            got: have.name(),
        });
    }
    Ok(())
}

/// Unnormalized 2D FFT over the flat row-major buffer, in place.
fn fft2_inplace(data: &mut [Complex64], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    // Rows.
    for row in data.chunks_exact_mut(n) {
        fft.process(row);
    }
    // Columns, via transpose-process-transpose.
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = data[i * n + j];
        }
        fft.process(&mut col);
        for i in 0..n {
            data[i * n + j] = col[i];
        }
    }
}

/// Map between lattice order (k from -n/2) and DFT order (q = k mod n),
/// applying the `(-1)^{k1+k2}` phase that accounts for the box offset `-L`.
fn lattice_to_dft(src: &[Complex64], n: usize, scale: f64) -> Vec<Complex64> {
    let half = n / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i1 in 0..n {
        let q1 = (i1 + half) % n;
        let s1 = if (i1 + half) % 2 == 1 { -1.0 } else { 1.0 };
        for i2 in 0..n {
            let q2 = (i2 + half) % n;
            let s2 = if (i2 + half) % 2 == 1 { -1.0 } else { 1.0 };
            out[q1 * n + q2] = src[i1 * n + i2] * (s1 * s2 * scale);
        }
    }
    out
}

fn dft_to_lattice(src: &[Complex64], n: usize, scale: f64) -> Vec<Complex64> {
    let half = n / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i1 in 0..n {
        let q1 = (i1 + half) % n;
        let s1 = if (i1 + half) % 2 == 1 { -1.0 } else { 1.0 };
        for i2 in 0..n {
            let q2 = (i2 + half) % n;
            let s2 = if (i2 + half) % 2 == 1 { -1.0 } else { 1.0 };
            out[i1 * n + i2] = src[q1 * n + q2] * (s1 * s2 * scale);
        }
    }
    out
}

fn forward_buffer(grid: &Grid2D, physical: &[Complex64]) -> Vec<Complex64> {
    // fhat(xi_k) = dx^2 (-1)^{k1+k2} DFT[f][k mod n]; the phase commutes with
    // the DFT, so it is applied on the output side.
    let n = grid.n;
    let mut buf = physical.to_vec();
    fft2_inplace(&mut buf, n, false);
    dft_to_lattice(&buf, n, grid.dx * grid.dx)
}

fn inverse_buffer(grid: &Grid2D, spectral: &[Complex64]) -> Vec<Complex64> {
    let n = grid.n;
    let norm = grid.dxi / (2.0 * std::f64::consts::PI);
    let mut buf = lattice_to_dft(spectral, n, norm * norm);
    fft2_inplace(&mut buf, n, true);
    buf
}

impl ScalarField {
    pub fn zeros(grid: Grid2D, repr: Repr) -> Self {
        Self {
            grid,
            repr,
            data: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Build a spectral field by sampling a closed-form transform on the
    /// lattice.
    pub fn from_spectral_fn(grid: Grid2D, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let data = (0..grid.len()).map(|i| f(grid.xi_of(i))).collect();
        Self {
            grid,
            repr: Repr::Spectral,
            data,
        }
    }

    /// Build a physical field by sampling a function at the grid points.
    pub fn from_physical_fn(grid: Grid2D, f: impl Fn([f64; 2]) -> f64) -> Self {
        let data = (0..grid.len())
            .map(|i| Complex64::new(f(grid.x_of(i)), 0.0))
            .collect();
        Self {
            grid,
            repr: Repr::Physical,
            data,
        }
    }

    pub fn transform(&self, direction: Direction) -> Result<ScalarField> {
        match direction {
            Direction::Forward => self.forward(),
            Direction::Inverse => self.inverse(),
        }
    }

    /// Physical -> spectral with the continuum normalization.
    pub fn forward(&self) -> Result<ScalarField> {
        require_repr(self.repr, Repr::Physical)?;
        Ok(ScalarField {
            grid: self.grid,
            repr: Repr::Spectral,
            data: forward_buffer(&self.grid, &self.data),
        })
    }

    /// Spectral -> physical.
    pub fn inverse(&self) -> Result<ScalarField> {
        require_repr(self.repr, Repr::Spectral)?;
        Ok(ScalarField {
            grid: self.grid,
            repr: Repr::Physical,
            data: inverse_buffer(&self.grid, &self.data),
        })
    }

    /// Multiply every mode by a scalar symbol evaluated at its wavenumber.
    pub fn apply_symbol(&self, symbol: impl Fn([f64; 2]) -> Complex64) -> Result<ScalarField> {
        require_repr(self.repr, Repr::Spectral)?;
        let mut out = self.clone();
        for (i, v) in out.data.iter_mut().enumerate() {
            *v *= symbol(self.grid.xi_of(i));
        }
        Ok(out)
    }

    /// Discrete Parseval norm approximating `||f||_{L^2}`.
    pub fn l2_norm(&self) -> f64 {
        match self.repr {
            Repr::Spectral => {
                let w = self.grid.mode_weight();
                (self.data.iter().map(|v| v.norm_sqr()).sum::<f64>() * w).sqrt()
            }
            Repr::Physical => {
                let w = self.grid.dx * self.grid.dx;
                (self.data.iter().map(|v| v.norm_sqr()).sum::<f64>() * w).sqrt()
            }
        }
    }

    /// Physical-space `L^1` quadrature (requires physical representation).
    pub fn l1_norm(&self) -> Result<f64> {
        require_repr(self.repr, Repr::Physical)?;
        let w = self.grid.dx * self.grid.dx;
        Ok(self.data.iter().map(|v| v.norm()).sum::<f64>() * w)
    }

    /// Physical-space `L^1` norm of `|x| f(x)`.
    pub fn moment_l1_norm(&self) -> Result<f64> {
        require_repr(self.repr, Repr::Physical)?;
        let w = self.grid.dx * self.grid.dx;
        let mut acc = 0.0;
        for (i, v) in self.data.iter().enumerate() {
            let x = self.grid.x_of(i);
            acc += (x[0] * x[0] + x[1] * x[1]).sqrt() * v.norm();
        }
        Ok(acc * w)
    }

    /// Max relative Hermitian-symmetry defect over paired modes.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self
            .data
            .iter()
            .map(|v| v.norm())
            .fold(0.0_f64, f64::max)
            .max(1e-300);
        let mut worst = 0.0_f64;
        for i in 0..self.data.len() {
            if let Some(j) = self.grid.mirror_of(i) {
                worst = worst.max((self.data[i] - self.data[j].conj()).norm() / scale);
            }
        }
        worst
    }

    /// Zero out the unpaired Nyquist rows (used after odd symbols).
    pub fn zero_nyquist(&mut self) {
        for i in 0..self.data.len() {
            if self.grid.on_nyquist(i) {
                self.data[i] = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Spectral gradient `i xi fhat`; Nyquist rows are zeroed (odd symbol).
    pub fn gradient(&self) -> Result<VectorField> {
        require_repr(self.repr, Repr::Spectral)?;
        let mut out = VectorField::zeros(self.grid, Repr::Spectral);
        for i in 0..self.data.len() {
            if self.grid.on_nyquist(i) {
                continue;
            }
            let xi = self.grid.xi_of(i);
            let iv = Complex64::new(0.0, 1.0) * self.data[i];
            out.comps[0][i] = iv * xi[0];
            out.comps[1][i] = iv * xi[1];
        }
        Ok(out)
    }
}

impl VectorField {
    pub fn zeros(grid: Grid2D, repr: Repr) -> Self {
        Self {
            grid,
            repr,
            comps: [
                vec![Complex64::new(0.0, 0.0); grid.len()],
                vec![Complex64::new(0.0, 0.0); grid.len()],
            ],
        }
    }

    pub fn from_spectral_fn(grid: Grid2D, f: impl Fn([f64; 2]) -> [Complex64; 2]) -> Self {
        let mut out = Self::zeros(grid, Repr::Spectral);
        for i in 0..grid.len() {
            let v = f(grid.xi_of(i));
            out.comps[0][i] = v[0];
            out.comps[1][i] = v[1];
        }
        out
    }

    pub fn transform(&self, direction: Direction) -> Result<VectorField> {
        let (want, target) = match direction {
            Direction::Forward => (Repr::Physical, Repr::Spectral),
            Direction::Inverse => (Repr::Spectral, Repr::Physical),
        };
        require_repr(self.repr, want)?;
        let map = |c: &Vec<Complex64>| match direction {
            Direction::Forward => forward_buffer(&self.grid, c),
            Direction::Inverse => inverse_buffer(&self.grid, c),
        };
        Ok(VectorField {
            grid: self.grid,
            repr: target,
            comps: [map(&self.comps[0]), map(&self.comps[1])],
        })
    }

    /// Multiply every mode by a matrix symbol.
    pub fn apply_matrix_symbol(
        &self,
        symbol: impl Fn([f64; 2]) -> [[Complex64; 2]; 2],
    ) -> Result<VectorField> {
        require_repr(self.repr, Repr::Spectral)?;
        let mut out = VectorField::zeros(self.grid, Repr::Spectral);
        for i in 0..self.grid.len() {
            let m = symbol(self.grid.xi_of(i));
            let v = [self.comps[0][i], self.comps[1][i]];
            out.comps[0][i] = m[0][0] * v[0] + m[0][1] * v[1];
            out.comps[1][i] = m[1][0] * v[0] + m[1][1] * v[1];
        }
        Ok(out)
    }

    /// Multiply every mode of both components by a scalar symbol.
    pub fn apply_scalar_symbol(
        &self,
        symbol: impl Fn([f64; 2]) -> Complex64,
    ) -> Result<VectorField> {
        require_repr(self.repr, Repr::Spectral)?;
        let mut out = self.clone();
        for i in 0..self.grid.len() {
            let s = symbol(self.grid.xi_of(i));
            out.comps[0][i] *= s;
            out.comps[1][i] *= s;
        }
        Ok(out)
    }

    /// Spectral divergence `i xi . mhat`; Nyquist rows zeroed (odd symbol).
    pub fn divergence(&self) -> Result<ScalarField> {
        require_repr(self.repr, Repr::Spectral)?;
        let mut out = ScalarField::zeros(self.grid, Repr::Spectral);
        for i in 0..self.grid.len() {
            if self.grid.on_nyquist(i) {
                continue;
            }
            let xi = self.grid.xi_of(i);
            out.data[i] = Complex64::new(0.0, 1.0)
                * (self.comps[0][i] * xi[0] + self.comps[1][i] * xi[1]);
        }
        Ok(out)
    }

    pub fn l2_norm(&self) -> f64 {
        let w = match self.repr {
            Repr::Spectral => self.grid.mode_weight(),
            Repr::Physical => self.grid.dx * self.grid.dx,
        };
        let s: f64 = self
            .comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm_sqr())
            .sum();
        (s * w).sqrt()
    }

    /// Vector `L^1` norm `(||m1||_{L^1}^2 + ||m2||_{L^1}^2)^{1/2}`.
    pub fn l1_norm(&self) -> Result<f64> {
        require_repr(self.repr, Repr::Physical)?;
        let w = self.grid.dx * self.grid.dx;
        let n1: f64 = self.comps[0].iter().map(|v| v.norm()).sum::<f64>() * w;
        let n2: f64 = self.comps[1].iter().map(|v| v.norm()).sum::<f64>() * w;
        Ok((n1 * n1 + n2 * n2).sqrt())
    }

    pub fn hermitian_defect(&self) -> f64 {
        let scale = self
            .comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm())
            .fold(0.0_f64, f64::max)
            .max(1e-300);
        let mut worst = 0.0_f64;
        for c in &self.comps {
            for i in 0..c.len() {
                if let Some(j) = self.grid.mirror_of(i) {
                    worst = worst.max((c[i] - c[j].conj()).norm() / scale);
                }
            }
        }
        worst
    }

    pub fn zero_nyquist(&mut self) {
        for c in &mut self.comps {
            for (i, v) in c.iter_mut().enumerate() {
                if self.grid.on_nyquist(i) {
                    *v = Complex64::new(0.0, 0.0);
                }
            }
        }
    }
}
