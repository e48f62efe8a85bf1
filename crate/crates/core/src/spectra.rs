//! Explicit model spectra for `Q = P^{1/m}`: flat tori with a homogeneous
//! symbol, Zoll-type clustered spectra, and user-supplied eigenvalue lists.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::cplx::C64;
use crate::error::{LabError, Result};
use crate::quad::GaussLegendre;
use crate::region::validate_order;
use crate::sphere::SphereRule;
use crate::symbol::Symbol;

const MAX_MODES: usize = 10_000_000;
const MAX_GRID_POINTS: usize = 1 << 24;

/// One eigenvalue of `Q` with its multiplicity and the basis mode carrying
/// its eigenfunction(s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub mu: f64,
    pub multiplicity: u64,
    pub mode: usize,
}

#[derive(Debug, Clone)]
pub enum ModelKind {
    Torus { symbol: Symbol },
    Zoll(ZollParams),
    Custom,
}

/// Orthonormal eigenfunctions on a quadrature grid.
#[derive(Clone)]
pub enum Basis {
    Torus(TorusBasis),
    Zonal(ZonalBasis),
    Dense(DenseBasis),
}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Torus(b) => write!(f, "TorusBasis(n={}, N={})", b.n, b.res),
            Basis::Zonal(b) => write!(f, "ZonalBasis(n={}, points={})", b.n, b.nodes.len()),
            Basis::Dense(b) => write!(f, "DenseBasis(points={}, modes={})", b.weights.len(), b.columns.len()),
        }
    }
}

impl Basis {
    pub fn weights(&self) -> &Arc<Vec<f64>> {
        match self {
            Basis::Torus(b) => &b.weights,
            Basis::Zonal(b) => &b.weights,
            Basis::Dense(b) => &b.weights,
        }
    }

    pub fn num_points(&self) -> usize {
        self.weights().len()
    }

    pub fn num_modes(&self) -> usize {
        match self {
            Basis::Torus(b) => b.lattice.len() / b.n,
            Basis::Zonal(b) => b.table.len(),
            Basis::Dense(b) => b.columns.len(),
        }
    }

    /// False when the grid functions are restricted to an invariant subspace
    /// (zonal functions) rather than spanning every eigenfunction.
    pub fn is_complete(&self) -> bool {
        !matches!(self, Basis::Zonal(_))
    }

    pub fn eval(&self, mode: usize, point: usize) -> C64 {
        match self {
            Basis::Torus(b) => b.eval(mode, point),
            Basis::Zonal(b) => C64::new(b.table[mode][point], 0.0),
            Basis::Dense(b) => b.columns[mode][point],
        }
    }

    /// Coefficients `<f, e_mode>` for every mode.
    pub fn analyze(&self, f: &[C64]) -> Vec<C64> {
        assert_eq!(f.len(), self.num_points(), "grid function length mismatch");
        match self {
            Basis::Torus(b) => b.analyze(f),
            Basis::Zonal(b) => b
                .table
                .iter()
                .map(|z| {
                    z.iter()
                        .zip(f)
                        .zip(b.weights.iter())
                        .map(|((zi, fi), w)| *fi * (w * zi))
                        .sum()
                })
                .collect(),
            Basis::Dense(b) => b
                .columns
                .iter()
                .map(|e| e.iter().zip(f).zip(b.weights.iter()).map(|((ei, fi), w)| *fi * ei.conj() * *w).sum())
                .collect(),
        }
    }

    /// `sum_mode coeffs[mode] e_mode`.
    pub fn synthesize(&self, coeffs: &[C64]) -> Vec<C64> {
        assert_eq!(coeffs.len(), self.num_modes(), "coefficient length mismatch");
        match self {
            Basis::Torus(b) => b.synthesize(coeffs),
            Basis::Zonal(b) => {
                let mut out = vec![C64::new(0.0, 0.0); b.nodes.len()];
                for (z, c) in b.table.iter().zip(coeffs) {
                    if *c == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for (o, zi) in out.iter_mut().zip(z) {
                        *o += *c * *zi;
                    }
                }
                out
            }
            Basis::Dense(b) => {
                let mut out = vec![C64::new(0.0, 0.0); b.weights.len()];
                for (e, c) in b.columns.iter().zip(coeffs) {
                    for (o, ei) in out.iter_mut().zip(e) {
                        *o += *c * *ei;
                    }
                }
                out
            }
        }
    }

    /// Largest deviation of the grid Gram matrix from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let modes = self.num_modes();
        let pts = self.num_points();
        let w = self.weights();
        let mut worst: f64 = 0.0;
        for a in 0..modes {
            for b in a..modes {
                let mut s = C64::new(0.0, 0.0);
                for x in 0..pts {
                    s += self.eval(a, x) * self.eval(b, x).conj() * w[x];
                }
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }
}

/// Fourier modes `(2pi)^{-n/2} e^{i<k,x>}` on the uniform tensor grid with
/// `res` points per axis.
#[derive(Clone)]
pub struct TorusBasis {
    pub n: usize,
    pub res: usize,
    /// Lattice points, `n` integers per mode.
    pub lattice: Vec<i64>,
    weights: Arc<Vec<f64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl TorusBasis {
    fn new(n: usize, res: usize, lattice: Vec<i64>) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(res);
        let inv = planner.plan_fft_inverse(res);
        let points = res.pow(n as u32);
        let w = (2.0 * PI / res as f64).powi(n as i32);
        TorusBasis {
            n,
            res,
            lattice,
            weights: Arc::new(vec![w; points]),
            fwd,
            inv,
        }
    }

    pub fn lattice_point(&self, mode: usize) -> &[i64] {
        &self.lattice[mode * self.n..(mode + 1) * self.n]
    }

    /// Grid coordinates of point `idx` (row-major, last axis fastest).
    pub fn point(&self, idx: usize) -> Vec<f64> {
        let h = 2.0 * PI / self.res as f64;
        let mut out = vec![0.0; self.n];
        let mut r = idx;
        for a in (0..self.n).rev() {
            out[a] = h * (r % self.res) as f64;
            r /= self.res;
        }
        out
    }

    fn norm_const(&self) -> f64 {
        (2.0 * PI).powf(-(self.n as f64) / 2.0)
    }

    fn eval(&self, mode: usize, point: usize) -> C64 {
        let k = self.lattice_point(mode);
        let mut r = point;
        let mut phase: i64 = 0;
        for a in (0..self.n).rev() {
            let i = (r % self.res) as i64;
            r /= self.res;
            phase += k[a] * i;
        }
        let phase = phase.rem_euclid(self.res as i64) as f64;
        let th = 2.0 * PI * phase / self.res as f64;
        C64::new(th.cos(), th.sin()) * self.norm_const()
    }

    fn flat_index(&self, k: &[i64]) -> usize {
        let mut idx = 0usize;
        for &ka in k {
            idx = idx * self.res + ka.rem_euclid(self.res as i64) as usize;
        }
        idx
    }

    fn fft_nd(&self, data: &mut [C64], forward: bool) {
        let plan = if forward { &self.fwd } else { &self.inv };
        let res = self.res;
        let total = data.len();
        let mut line = vec![C64::new(0.0, 0.0); res];
        for axis in 0..self.n {
            let stride = res.pow((self.n - 1 - axis) as u32);
            let block = stride * res;
            for start in (0..total).step_by(block) {
                for off in 0..stride {
                    let base = start + off;
                    for (i, l) in line.iter_mut().enumerate() {
                        *l = data[base + i * stride];
                    }
                    plan.process(&mut line);
                    for (i, l) in line.iter().enumerate() {
                        data[base + i * stride] = *l;
                    }
                }
            }
        }
    }

    fn analyze(&self, f: &[C64]) -> Vec<C64> {
        let mut data = f.to_vec();
        self.fft_nd(&mut data, true);
        let scale = self.weights[0] * self.norm_const();
        (0..self.lattice.len() / self.n)
            .map(|mode| data[self.flat_index(self.lattice_point(mode))] * scale)
            .collect()
    }

    fn synthesize(&self, coeffs: &[C64]) -> Vec<C64> {
        let mut data = vec![C64::new(0.0, 0.0); self.weights.len()];
        for (mode, c) in coeffs.iter().enumerate() {
            data[self.flat_index(self.lattice_point(mode))] += *c;
        }
        self.fft_nd(&mut data, false);
        let scale = self.norm_const();
        data.iter_mut().for_each(|v| *v *= scale);
        data
    }
}

/// One normalized zonal harmonic per cluster on a polar-angle grid of
/// `S^n`, `n in {2, 3}`.
#[derive(Debug, Clone)]
pub struct ZonalBasis {
    pub n: usize,
    /// `cos(theta)` at each ring.
    pub nodes: Vec<f64>,
    weights: Arc<Vec<f64>>,
    /// `table[k][i]`: normalized degree-`k` zonal harmonic at ring `i`.
    table: Vec<Vec<f64>>,
}

impl ZonalBasis {
    fn new(n: usize, k_max: usize) -> Result<Self> {
        let rings = 4 * k_max + 8;
        let (nodes, weights): (Vec<f64>, Vec<f64>) = match n {
            2 => {
                let gl = GaussLegendre::new(rings);
                (gl.nodes.clone(), gl.weights.iter().map(|w| w * 2.0 * PI).collect())
            }
            3 => (1..=rings)
                .map(|i| {
                    let th = i as f64 * PI / (rings as f64 + 1.0);
                    (th.cos(), 4.0 * PI * PI / (rings as f64 + 1.0) * th.sin().powi(2))
                })
                .unzip(),
            _ => return Err(LabError::invalid("zonal eigenfunctions are available for n = 2, 3 only")),
        };
        let mut table = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let raw: Vec<f64> = nodes.iter().map(|&t| zonal_polynomial(n, k, t)).collect();
            let norm: f64 = raw.iter().zip(&weights).map(|(v, w)| w * v * v).sum::<f64>().sqrt();
            table.push(raw.into_iter().map(|v| v / norm).collect());
        }
        Ok(ZonalBasis {
            n,
            nodes,
            weights: Arc::new(weights),
            table,
        })
    }
}

/// Legendre `P_k(t)` for `S^2`, Chebyshev `U_k(t)` for `S^3`.
fn zonal_polynomial(n: usize, k: usize, t: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, if n == 2 { t } else { 2.0 * t });
    if k == 0 {
        return p0;
    }
    for j in 1..k {
        let jf = j as f64;
        let p2 = if n == 2 {
            ((2.0 * jf + 1.0) * t * p1 - jf * p0) / (jf + 1.0)
        } else {
            2.0 * t * p1 - p0
        };
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Explicit eigenfunction columns on an arbitrary weighted grid.
#[derive(Debug, Clone)]
pub struct DenseBasis {
    columns: Vec<Vec<C64>>,
    weights: Arc<Vec<f64>>,
}

/// Parameters of the Zoll-type model `mu = (2pi/T)(k + alpha/4) + jitter`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZollParams {
    pub n: usize,
    pub m: u32,
    pub period: f64,
    pub alpha_shift: f64,
    pub jitter: f64,
    pub k_max: usize,
    pub seed: u64,
    /// Attach zonal eigenfunctions (n = 2, 3).
    pub zonal: bool,
}

impl ZollParams {
    pub fn new(n: usize, m: u32, k_max: usize) -> Self {
        ZollParams {
            n,
            m,
            period: 2.0 * PI,
            alpha_shift: 2.0 * (n as f64 - 1.0),
            jitter: 0.0,
            k_max,
            seed: 42,
            zonal: false,
        }
    }

    pub fn center(&self, k: usize) -> f64 {
        (2.0 * PI / self.period) * (k as f64 + self.alpha_shift / 4.0)
    }
}

#[derive(Debug, Clone)]
pub struct ModelSpectrum {
    pub n: usize,
    pub m: u32,
    pub entries: Vec<Entry>,
    pub volume: f64,
    pub cutoff: f64,
    pub kind: ModelKind,
    basis: Option<Arc<Basis>>,
    /// `cum[i]` = total multiplicity of `entries[..i]`.
    cum: Vec<u64>,
}

impl ModelSpectrum {
    fn assemble(
        n: usize,
        m: u32,
        mut entries: Vec<Entry>,
        volume: f64,
        cutoff: f64,
        kind: ModelKind,
        basis: Option<Basis>,
    ) -> Self {
        entries.sort_by(|a, b| a.mu.total_cmp(&b.mu));
        let mut cum = Vec::with_capacity(entries.len() + 1);
        let mut acc = 0u64;
        cum.push(0);
        for e in &entries {
            acc += e.multiplicity;
            cum.push(acc);
        }
        ModelSpectrum {
            n,
            m,
            entries,
            volume,
            cutoff,
            kind,
            basis: basis.map(Arc::new),
            cum,
        }
    }

    /// Spectrum with explicit eigenfunction columns on a weighted grid.
    /// Columns are checked for grid orthonormality to `1e-8`.
    pub fn from_dense(n: usize, m: u32, mus: &[f64], columns: Vec<Vec<C64>>, weights: Vec<f64>) -> Result<Self> {
        validate_order(m)?;
        if mus.len() != columns.len() || mus.is_empty() {
            return Err(LabError::invalid("need one eigenfunction column per eigenvalue"));
        }
        if columns.iter().any(|c| c.len() != weights.len()) || weights.iter().any(|w| !(*w > 0.0)) {
            return Err(LabError::invalid("columns must match the grid and weights must be positive"));
        }
        if mus.iter().any(|mu| !(*mu >= 0.0) || !mu.is_finite()) {
            return Err(LabError::invalid("eigenvalues must be finite and non-negative"));
        }
        let volume = weights.iter().sum();
        let basis = Basis::Dense(DenseBasis {
            columns,
            weights: Arc::new(weights),
        });
        let dev = basis.gram_deviation();
        if dev > 1e-8 {
            return Err(LabError::invalid(format!("eigenfunction columns are not orthonormal (deviation {dev:e})")));
        }
        let entries = mus
            .iter()
            .enumerate()
            .map(|(mode, &mu)| Entry { mu, multiplicity: 1, mode })
            .collect();
        let cutoff = mus.iter().cloned().fold(0.0, f64::max);
        Ok(Self::assemble(n, m, entries, volume, cutoff, ModelKind::Custom, Some(basis)))
    }

    /// Eigenvalue list without eigenfunctions.
    pub fn from_eigenvalues(n: usize, m: u32, pairs: &[(f64, u64)], volume: f64) -> Result<Self> {
        validate_order(m)?;
        if n < 2 {
            return Err(LabError::invalid("dimension n must be >= 2"));
        }
        if pairs.is_empty() {
            return Err(LabError::invalid("no eigenvalues"));
        }
        if !(volume > 0.0) {
            return Err(LabError::invalid("volume must be positive"));
        }
        for &(mu, mult) in pairs {
            if !(mu > 0.0) || !mu.is_finite() {
                return Err(LabError::invalid(format!("non-positive eigenvalue {mu}")));
            }
            if mult == 0 {
                return Err(LabError::invalid("multiplicity must be a positive integer"));
            }
        }
        let entries = pairs
            .iter()
            .enumerate()
            .map(|(mode, &(mu, multiplicity))| Entry { mu, multiplicity, mode })
            .collect();
        let cutoff = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
        Ok(Self::assemble(n, m, entries, volume, cutoff, ModelKind::Custom, None))
    }

    pub fn basis(&self) -> Option<&Basis> {
        self.basis.as_deref()
    }

    pub fn require_basis(&self) -> Result<&Basis> {
        self.basis().ok_or(LabError::NoEigenfunctions)
    }

    pub fn has_eigenfunctions(&self) -> bool {
        self.basis.is_some()
    }

    pub fn symbol(&self) -> Option<&Symbol> {
        match &self.kind {
            ModelKind::Torus { symbol } => Some(symbol),
            _ => None,
        }
    }

    /// Eigenvalue `lambda_j = mu_j^m` of `P`.
    pub fn lambda(&self, entry: &Entry) -> f64 {
        entry.mu.powi(self.m as i32)
    }

    pub fn total_multiplicity(&self) -> u64 {
        *self.cum.last().unwrap_or(&0)
    }

    /// Index of the first entry with `mu >= alpha`.
    fn lower_index(&self, alpha: f64) -> usize {
        self.entries.partition_point(|e| e.mu < alpha)
    }

    /// Entries with `mu` in the half-open window `[lo, hi)`.
    pub fn window(&self, lo: f64, hi: f64) -> &[Entry] {
        let a = self.lower_index(lo);
        let b = self.lower_index(hi).max(a);
        &self.entries[a..b]
    }

    /// Rejects windows whose upper end comes within 1 of the cutoff.
    pub fn check_window(&self, lo: f64, hi: f64) -> Result<()> {
        if hi > self.cutoff - 1.0 {
            return Err(LabError::CutoffProximity {
                lo,
                hi,
                cutoff: self.cutoff,
            });
        }
        Ok(())
    }
}

/// Flat torus `T^n = R^n / 2pi Z^n` with `Q` of symbol `q`; modes `q(k) < cutoff`.
pub fn build_torus_model(n: usize, m: u32, q: Symbol, cutoff: f64, grid_resolution: Option<usize>) -> Result<ModelSpectrum> {
    validate_order(m)?;
    if n < 2 {
        return Err(LabError::invalid("dimension n must be >= 2"));
    }
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(LabError::invalid("cutoff must be positive"));
    }
    q.check_homogeneous(n)?;
    let qmin = q.min_on_sphere(n);
    // Sampled minimum may overshoot the true one slightly.
    let reach = (cutoff / (0.98 * qmin)).floor() as i64;
    let side = (2 * reach + 1) as f64;
    if side.powi(n as i32) > 4e8 {
        return Err(LabError::invalid(format!("cutoff {cutoff} gives more than {MAX_MODES} modes")));
    }
    let mut lattice = Vec::new();
    let mut mus = Vec::new();
    let mut k = vec![-reach; n];
    let mut max_coord = 0i64;
    'enumerate: loop {
        let xi: Vec<f64> = k.iter().map(|&v| v as f64).collect();
        let mu = if k.iter().all(|&v| v == 0) { 0.0 } else { q.value(&xi) };
        if mu < cutoff {
            lattice.extend_from_slice(&k);
            mus.push(mu);
            max_coord = max_coord.max(k.iter().map(|v| v.abs()).max().unwrap_or(0));
            if mus.len() > MAX_MODES {
                return Err(LabError::invalid(format!("cutoff {cutoff} gives more than {MAX_MODES} modes")));
            }
        }
        let mut a = n;
        loop {
            if a == 0 {
                break 'enumerate;
            }
            a -= 1;
            if k[a] < reach {
                k[a] += 1;
                continue 'enumerate;
            }
            k[a] = -reach;
        }
    }
    if max_coord == reach && reach > 0 {
        log::warn!("lattice enumeration reached its search box; symbol minimum may be underestimated");
    }
    let min_res = (2 * max_coord + 1) as usize;
    let res = grid_resolution.unwrap_or(min_res.max(3));
    if res < min_res {
        return Err(LabError::invalid(format!(
            "grid resolution {res} is below 2*{max_coord}+1 = {min_res} needed for exact orthogonality"
        )));
    }
    if (res as f64).powi(n as i32) > MAX_GRID_POINTS as f64 {
        return Err(LabError::invalid(format!("grid {res}^{n} is too large")));
    }
    let entries = mus
        .iter()
        .enumerate()
        .map(|(mode, &mu)| Entry { mu, multiplicity: 1, mode })
        .collect();
    let basis = Basis::Torus(TorusBasis::new(n, res, lattice));
    Ok(ModelSpectrum::assemble(
        n,
        m,
        entries,
        (2.0 * PI).powi(n as i32),
        cutoff,
        ModelKind::Torus { symbol: q },
        Some(basis),
    ))
}

/// Dimension of degree-`k` spherical harmonics on `S^n`:
/// `(2k+n-1)(k+n-2)! / (k!(n-1)!)`.
pub fn sphere_harmonic_dim(n: usize, k: usize) -> u64 {
    // (k+n-2)!/(k!(n-2)!) = C(k+n-2, n-2), then divide by n-1.
    let r = n as u128 - 2;
    let mut binom: u128 = 1;
    for i in 1..=r {
        binom = binom * (k as u128 + i) / i;
    }
    ((2 * k as u128 + n as u128 - 1) * binom / (n as u128 - 1)) as u64
}

/// Zoll-type spectrum: clusters `k = 0..=k_max` at `c_k` with multiplicity
/// `d_k`, each shifted by `u C / k` for one seeded `u in [-1, 1]` per cluster.
pub fn build_zoll_model(params: ZollParams) -> Result<ModelSpectrum> {
    validate_order(params.m)?;
    if params.n < 2 {
        return Err(LabError::invalid("dimension n must be >= 2"));
    }
    if params.k_max < 2 {
        return Err(LabError::invalid("cluster cutoff K must be >= 2"));
    }
    if !(params.jitter >= 0.0) || !params.jitter.is_finite() {
        return Err(LabError::invalid(format!("jitter C must be >= 0, got {}", params.jitter)));
    }
    if !(params.period > 0.0) || !(params.alpha_shift >= 0.0) {
        return Err(LabError::invalid("period must be positive and the shift non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let entries = (0..=params.k_max)
        .map(|k| {
            let shift = if k == 0 {
                0.0
            } else {
                rng.gen_range(-1.0..=1.0) * params.jitter / k as f64
            };
            Entry {
                mu: params.center(k) + shift,
                multiplicity: sphere_harmonic_dim(params.n, k),
                mode: k,
            }
        })
        .collect();
    let volume = sphere_volume(params.n);
    let cutoff = params.center(params.k_max) + 0.5 * (2.0 * PI / params.period);
    let basis = if params.zonal {
        Some(Basis::Zonal(ZonalBasis::new(params.n, params.k_max)?))
    } else {
        None
    };
    Ok(ModelSpectrum::assemble(
        params.n,
        params.m,
        entries,
        volume,
        cutoff,
        ModelKind::Zoll(params),
        basis,
    ))
}

/// `Vol(S^n) = 2 pi^{(n+1)/2} / Gamma((n+1)/2)`.
pub fn sphere_volume(n: usize) -> f64 {
    // Vol(S^0) = 2, Vol(S^1) = 2pi, Vol(S^n) = 2pi/(n-1) Vol(S^{n-2}).
    let (mut v, start) = if n % 2 == 0 { (2.0, 0) } else { (2.0 * PI, 1) };
    let mut d = start;
    while d < n {
        d += 2;
        v *= 2.0 * PI / (d as f64 - 1.0);
    }
    v
}

/// Reads a `mu,multiplicity` CSV (header optional).
pub fn load_custom_spectrum(path: &Path, n: usize, m: u32) -> Result<ModelSpectrum> {
    let text = std::fs::read_to_string(path)?;
    parse_custom_spectrum(&text, n, m)
}

pub fn parse_custom_spectrum(text: &str, n: usize, m: u32) -> Result<ModelSpectrum> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut pairs = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| LabError::Parse(format!("malformed row {}: {e}", line + 1)))?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if line == 0 && rec.get(0) == Some("mu") {
            continue;
        }
        if rec.len() != 2 {
            return Err(LabError::Parse(format!("malformed row {}: expected mu,multiplicity", line + 1)));
        }
        let mu: f64 = rec[0]
            .parse()
            .map_err(|_| LabError::Parse(format!("malformed row {}: bad eigenvalue '{}'", line + 1, &rec[0])))?;
        let mult: u64 = rec[1]
            .parse()
            .map_err(|_| LabError::Parse(format!("malformed row {}: bad multiplicity '{}'", line + 1, &rec[1])))?;
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(LabError::invalid(format!("non-positive eigenvalue {mu} on row {}", line + 1)));
        }
        if mult == 0 {
            return Err(LabError::invalid(format!("zero multiplicity on row {}", line + 1)));
        }
        pairs.push((mu, mult));
    }
    if pairs.is_empty() {
        return Err(LabError::invalid("no eigenvalues"));
    }
    if pairs.windows(2).any(|w| w[1].0 < w[0].0) {
        log::warn!("custom spectrum is not sorted; sorting on load");
    }
    ModelSpectrum::from_eigenvalues(n, m, &pairs, 1.0)
}

/// `N(alpha) = #{j : mu_j < alpha}` with multiplicity.
pub fn counting_function(model: &ModelSpectrum, alpha: f64) -> u64 {
    model.cum[model.lower_index(alpha)]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylConstant {
    pub value: f64,
    pub error: f64,
}

/// `(2pi)^{-n} Vol(M) vol{q <= 1}` for torus models, with
/// `vol{q <= 1} = (1/n) int_{S^{n-1}} q(w)^{-n} dw`.
pub fn weyl_constant(model: &ModelSpectrum) -> Result<WeylConstant> {
    let q = model.symbol().ok_or(LabError::NoSymbol)?;
    let n = model.n;
    let prefactor = model.volume / (2.0 * PI).powi(n as i32);
    let ball = |level: usize| -> Result<f64> {
        let rule = SphereRule::new(n, level)?;
        Ok(rule.integrate(|w| q.value(w).powi(-(n as i32))) / n as f64)
    };
    let (coarse, fine) = if n <= 3 {
        (ball(128)?, ball(256)?)
    } else {
        monte_carlo_ball(q, n)
    };
    Ok(WeylConstant {
        value: prefactor * fine,
        error: prefactor * (fine - coarse).abs(),
    })
}

/// Seeded Monte Carlo estimate of `vol{q <= 1}`; returns (estimate at half
/// the samples, estimate at all samples).
fn monte_carlo_ball(q: &Symbol, n: usize) -> (f64, f64) {
    let r = 1.0 / (0.98 * q.min_on_sphere(n));
    let mut rng = ChaCha8Rng::seed_from_u64(0xba11);
    let samples = 2_000_000usize;
    let mut hits = [0usize; 2];
    let mut xi = vec![0.0; n];
    for s in 0..samples {
        xi.iter_mut().for_each(|v| *v = rng.gen_range(-r..r));
        if q.value(&xi) <= 1.0 {
            hits[(s >= samples / 2) as usize] += 1;
        }
    }
    let box_vol = (2.0 * r).powi(n as i32);
    let half = box_vol * hits[0] as f64 / (samples / 2) as f64;
    let full = box_vol * (hits[0] + hits[1]) as f64 / samples as f64;
    (half, full)
}

/// `int S_alpha(x, x) dmu` by grid quadrature of `sum_{mu_j < alpha} |e_j(x)|^2`.
pub fn spectral_function_trace(model: &ModelSpectrum, alpha: f64) -> Result<f64> {
    let basis = model.require_basis()?;
    if !basis.is_complete() {
        return Err(LabError::invalid(
            "spectral function trace needs a complete eigenbasis (zonal models carry one function per cluster)",
        ));
    }
    let w = basis.weights();
    let modes: Vec<usize> = model.window(f64::NEG_INFINITY, alpha).iter().map(|e| e.mode).collect();
    use rayon::prelude::*;
    let total: f64 = (0..basis.num_points())
        .into_par_iter()
        .map(|x| w[x] * modes.iter().map(|&j| basis.eval(j, x).norm_sqr()).sum::<f64>())
        .collect::<Vec<_>>()
        .iter()
        .sum();
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub k: usize,
    pub center: f64,
    pub half_width: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAnalysis {
    pub clusters: Vec<ClusterReport>,
    /// Eigenvalues between the first and last interval lying in none of them.
    pub outside_count: u64,
    /// Least-squares slope of `log d_k` against `log k` over `k in [K/2, K]`.
    pub fitted_degree: f64,
}

/// Counts eigenvalues in `I_k = [c_k - C/k, c_k + C/k]`, `c_k = (2pi/T)(k + shift/4)`,
/// for every `k >= 1` whose interval lies below the cutoff.
pub fn cluster_report(model: &ModelSpectrum, period: f64, alpha_shift: f64, width: f64) -> Result<ClusterAnalysis> {
    if !(period > 0.0) || !(width >= 0.0) {
        return Err(LabError::invalid("period must be positive and width non-negative"));
    }
    let center = |k: usize| (2.0 * PI / period) * (k as f64 + alpha_shift / 4.0);
    let mut clusters = Vec::new();
    let mut k = 1usize;
    loop {
        let c = center(k);
        let w = width / k as f64;
        if c + w >= model.cutoff {
            break;
        }
        let slack = 1e-12 * c.abs().max(1.0);
        let lo = model.lower_index(c - w - slack);
        let hi = model.entries.partition_point(|e| e.mu <= c + w + slack);
        let count = model.cum[hi.max(lo)] - model.cum[lo];
        clusters.push(ClusterReport {
            k,
            center: c,
            half_width: w,
            count,
        });
        k += 1;
    }
    let outside_count = match (clusters.first(), clusters.last()) {
        (Some(first), Some(last)) => {
            let lo = model.lower_index(first.center - first.half_width);
            let hi = model
                .entries
                .partition_point(|e| e.mu <= last.center + last.half_width + 1e-12 * last.center.abs().max(1.0));
            let span = model.cum[hi.max(lo)] - model.cum[lo];
            span - clusters.iter().map(|c| c.count).sum::<u64>().min(span)
        }
        _ => 0,
    };
    let kmax = clusters.len();
    let pts: Vec<(f64, f64)> = clusters
        .iter()
        .filter(|c| 2 * c.k >= kmax && c.count > 0)
        .map(|c| ((c.k as f64).ln(), (c.count as f64).ln()))
        .collect();
    let fitted_degree = least_squares_slope(&pts);
    Ok(ClusterAnalysis {
        clusters,
        outside_count,
        fitted_degree,
    })
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// `(beta alpha^{n-1})^{-1} [N(alpha + beta) - N(alpha - beta)]`.
pub fn saturation_density(model: &ModelSpectrum, alpha: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(LabError::invalid("window half-width beta must be positive"));
    }
    let count = counting_function(model, alpha + beta) - counting_function(model, alpha - beta);
    Ok(count as f64 / (beta * alpha.powi(model.n as i32 - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus(n: usize, q: Symbol, cutoff: f64) -> ModelSpectrum {
        build_torus_model(n, 2, q, cutoff, None).unwrap()
    }

    #[test]
    fn torus_examples() {
        assert_eq!(torus(2, Symbol::Euclid, 1.5).entries.len(), 9);
        assert_eq!(torus(2, Symbol::Euclid, 1.0).entries.len(), 1);
        // Every k in {-1,0,1}^3 has q(k) <= 3^{1/4} < 2; (2,0,0) sits on the cutoff.
        assert_eq!(torus(3, Symbol::Lp4, 2.0).entries.len(), 27);
        let quad = Symbol::custom("quadratic", |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>() + 1.0);
        assert!(build_torus_model(2, 2, quad, 2.0, None).is_err());
        assert!(build_torus_model(2, 2, Symbol::Euclid, 3.5, Some(5)).is_err());
    }

    #[test]
    fn torus_basis_round_trip() {
        let model = torus(2, Symbol::Euclid, 2.5);
        let basis = model.basis().unwrap();
        assert!(basis.gram_deviation() < 1e-12);
        let coeffs: Vec<C64> = (0..basis.num_modes()).map(|j| C64::new(j as f64, 1.0 - j as f64)).collect();
        let f = basis.synthesize(&coeffs);
        let back = basis.analyze(&f);
        for (a, b) in coeffs.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
        // Direct evaluation agrees with the FFT synthesis.
        let x = 7;
        let direct: C64 = coeffs.iter().enumerate().map(|(j, c)| c * basis.eval(j, x)).sum();
        assert!((direct - f[x]).norm() < 1e-12);
    }

    #[test]
    fn torus_basis_three_dimensional() {
        let model = build_torus_model(3, 2, Symbol::Euclid, 1.8, None).unwrap();
        let basis = model.basis().unwrap();
        assert!(basis.gram_deviation() < 1e-12);
        let coeffs: Vec<C64> = (0..basis.num_modes()).map(|j| C64::new(1.0, j as f64)).collect();
        let back = basis.analyze(&basis.synthesize(&coeffs));
        assert!(coeffs.iter().zip(&back).all(|(a, b)| (a - b).norm() < 1e-11));
    }

    #[test]
    fn counting_and_trace() {
        let model = torus(2, Symbol::Euclid, 3.6);
        assert_eq!(counting_function(&model, 1.5), 9);
        assert_eq!(counting_function(&model, 2.5), 21);
        assert_eq!(counting_function(&model, 0.0), 0);
        assert!((spectral_function_trace(&model, 1.5).unwrap() - 9.0).abs() < 1e-9);
        assert!((spectral_function_trace(&model, 2.5).unwrap() - 21.0).abs() < 1e-9);
        assert_eq!(spectral_function_trace(&model, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn weyl_constants() {
        let w = weyl_constant(&torus(2, Symbol::Euclid, 1.5)).unwrap();
        assert!((w.value - PI).abs() < 1e-10);
        let w = weyl_constant(&build_torus_model(3, 2, Symbol::Euclid, 1.5, None).unwrap()).unwrap();
        assert!((w.value - 4.0 * PI / 3.0).abs() < 1e-10);
        let w = weyl_constant(&torus(2, Symbol::scaled(2.0, Symbol::Euclid), 2.5)).unwrap();
        assert!((w.value - PI / 4.0).abs() < 1e-10);
        let zoll = build_zoll_model(ZollParams::new(3, 2, 4)).unwrap();
        assert!(matches!(weyl_constant(&zoll), Err(LabError::NoSymbol)));
    }

    #[test]
    fn zoll_examples() {
        let mut p = ZollParams::new(3, 2, 2);
        let model = build_zoll_model(p).unwrap();
        let pairs: Vec<(f64, u64)> = model.entries.iter().map(|e| (e.mu, e.multiplicity)).collect();
        assert_eq!(pairs, vec![(1.0, 1), (2.0, 4), (3.0, 9)]);
        assert_eq!(sphere_harmonic_dim(2, 5), 11);
        p.jitter = 0.5;
        p.k_max = 12;
        let model = build_zoll_model(p).unwrap();
        let e10 = model.entries.iter().find(|e| e.mode == 10).unwrap();
        assert!((e10.mu - 11.0).abs() <= 0.05);
        p.jitter = -1.0;
        assert!(build_zoll_model(p).is_err());
        let model = build_zoll_model(ZollParams::new(3, 2, 6)).unwrap();
        assert_eq!(counting_function(&model, 2.5), 5);
    }

    #[test]
    fn zonal_basis_orthonormal() {
        for n in [2, 3] {
            let mut p = ZollParams::new(n, 2, 30);
            p.zonal = true;
            let model = build_zoll_model(p).unwrap();
            let basis = model.basis().unwrap();
            assert!(basis.gram_deviation() < 1e-10, "n={n}");
            let total: f64 = basis.weights().iter().sum();
            assert!((total - sphere_volume(n)).abs() < 1e-10);
            // Peak value of the normalized zonal function approaches d_k / Vol.
            let k = 7;
            let peak = (0..basis.num_points()).map(|x| basis.eval(k, x).norm_sqr()).fold(0.0, f64::max);
            let exact = sphere_harmonic_dim(n, k) as f64 / sphere_volume(n);
            assert!(peak <= exact * (1.0 + 1e-12) && peak > 0.95 * exact);
        }
    }

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume(1) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn custom_parsing() {
        let m = parse_custom_spectrum("1.0,1\n2.0,3", 3, 2).unwrap();
        assert_eq!(m.entries.len(), 2);
        assert_eq!(m.total_multiplicity(), 4);
        let m = parse_custom_spectrum("mu,multiplicity\n2.0,3\n1.0,1\n", 3, 2).unwrap();
        assert_eq!(m.entries[0].mu, 1.0);
        let e = parse_custom_spectrum("", 3, 2).unwrap_err();
        assert!(e.to_string().contains("no eigenvalues"));
        let e = parse_custom_spectrum("-1.0,1", 3, 2).unwrap_err();
        assert!(e.to_string().contains("non-positive eigenvalue"));
        assert!(matches!(parse_custom_spectrum("1.0,x", 3, 2), Err(LabError::Parse(_))));
        assert!(matches!(parse_custom_spectrum("1.0,1,2", 3, 2), Err(LabError::Parse(_))));
    }

    #[test]
    fn cluster_degrees() {
        for (n, expect) in [(3usize, 2.0), (2, 1.0)] {
            let model = build_zoll_model(ZollParams::new(n, 2, 200)).unwrap();
            let rep = cluster_report(&model, 2.0 * PI, 2.0 * (n as f64 - 1.0), 0.0).unwrap();
            assert!((rep.fitted_degree - expect).abs() < 0.05, "n={n}: {}", rep.fitted_degree);
            assert_eq!(rep.outside_count, 0);
            assert_eq!(rep.clusters[0].count, sphere_harmonic_dim(n, 1));
        }
        let small = torus(2, Symbol::Euclid, 10.0);
        let large = torus(2, Symbol::Euclid, 30.0);
        let a = cluster_report(&small, 2.0 * PI, 2.0, 0.1).unwrap().outside_count;
        let b = cluster_report(&large, 2.0 * PI, 2.0, 0.1).unwrap().outside_count;
        assert!(b > a && a > 0);
    }

    #[test]
    fn saturation_examples() {
        let model = build_zoll_model(ZollParams::new(3, 2, 60)).unwrap();
        for k in [5usize, 10, 40] {
            let d = saturation_density(&model, k as f64 + 1.0, 1.0 / k as f64).unwrap();
            assert!((d - k as f64).abs() < 1e-9);
            let d1 = saturation_density(&model, k as f64 + 1.0, 1.0).unwrap();
            // [k, k+2) holds the clusters at k and k+1.
            assert!(d1 <= 2.0 + 1e-12);
        }
        assert!(saturation_density(&model, 5.0, 0.0).is_err());
    }

    #[test]
    fn cutoff_proximity() {
        let model = build_zoll_model(ZollParams::new(3, 2, 20)).unwrap();
        assert!(model.check_window(9.0, 11.0).is_ok());
        assert!(matches!(model.check_window(19.0, 21.0), Err(LabError::CutoffProximity { .. })));
    }
}
