//! Separable 3D fast wavelet transform with zero extension.
//!
//! Each 1D step is the full convolution of the zero-extended signal with the
//! filters, downsampled by two. Keeping every output that can be nonzero makes
//! the transform orthonormal on the finite data, so the energy of the samples
//! is carried exactly by the coefficients.

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Vec3};
use crate::wavelet::filters::WaveletSystem;

/// Cell-centred samples on an axis-aligned box with cubic cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub lo: Vec3,
    pub h: f64,
    pub dims: [usize; 3],
    /// Row-major, last axis fastest.
    pub values: Vec<f64>,
}

impl Grid {
    /// Samples `f` at the cell centres of the cube `[lo, lo + side]³` split
    /// into `n` cells per axis.
    pub fn sample(f: impl Fn(Vec3) -> f64, lo: Vec3, side: f64, n: usize) -> Self {
        let h = side / n as f64;
        let mut values = Vec::with_capacity(n * n * n);
        for i in 0..n {
            let x = lo[0] + (i as f64 + 0.5) * h;
            for j in 0..n {
                let y = lo[1] + (j as f64 + 0.5) * h;
                for k in 0..n {
                    let z = lo[2] + (k as f64 + 0.5) * h;
                    values.push(f([x, y, z]));
                }
            }
        }
        Grid {
            lo,
            h,
            dims: [n; 3],
            values,
        }
    }

    pub fn cell_center(&self, idx: [usize; 3]) -> Vec3 {
        std::array::from_fn(|a| self.lo[a] + (idx[a] as f64 + 0.5) * self.h)
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::new(
            self.lo,
            std::array::from_fn(|a| self.lo[a] + self.dims[a] as f64 * self.h),
        )
    }

    /// Dyadic level `J` with `h = 2^{-J}`.
    pub fn fine_level(&self) -> Result<i32> {
        let j = -self.h.log2();
        let jr = j.round();
        if (j - jr).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "cell size {} is not a power of two",
                self.h
            )));
        }
        Ok(jr as i32)
    }

    /// Sum of squared samples times the cell volume.
    pub fn l2_norm_squared(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.h.powi(3)
    }
}

/// Wavelet coefficients of one decomposition step.
#[derive(Clone, Debug, PartialEq)]
pub struct DetailLevel {
    /// Dyadic level: coefficients are spaced `2^{-j}` apart.
    pub j: i32,
    /// Number of steps from the samples (1 for the finest details).
    pub step: u32,
    pub dims: [usize; 3],
    pub parent_dims: [usize; 3],
    /// Bands for types `e = 1..=7`; bit 2 of `e` is the first axis.
    pub bands: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoeffField {
    pub system: WaveletSystem,
    pub lo: Vec3,
    pub h: f64,
    pub dims: [usize; 3],
    pub fine_level: i32,
    /// Finest first.
    pub details: Vec<DetailLevel>,
    /// Scaling coefficients after the last step.
    pub coarse: Vec<f64>,
    pub coarse_dims: [usize; 3],
}

fn strides(d: [usize; 3]) -> [usize; 3] {
    [d[1] * d[2], d[2], 1]
}

fn other_axes(axis: usize) -> (usize, usize) {
    match axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

fn half_len(m: usize, taps: usize) -> usize {
    (m + taps - 1) / 2
}

fn split_axis(x: &[f64], dims: [usize; 3], axis: usize, w: &WaveletSystem) -> (Vec<f64>, Vec<f64>, [usize; 3]) {
    let taps = w.len();
    let shift = taps as isize - 2;
    let m = dims[axis];
    let mo = half_len(m, taps);
    let mut od = dims;
    od[axis] = mo;
    let (si, so) = (strides(dims), strides(od));
    let total = od.iter().product();
    let mut lo = vec![0.0; total];
    let mut hi = vec![0.0; total];
    let mut line = vec![0.0; m];
    let (p, q) = other_axes(axis);
    for ip in 0..dims[p] {
        for iq in 0..dims[q] {
            let bin = ip * si[p] + iq * si[q];
            let bout = ip * so[p] + iq * so[q];
            for (i, v) in line.iter_mut().enumerate() {
                *v = x[bin + i * si[axis]];
            }
            for n in 0..mo {
                let start = 2 * n as isize - shift;
                let k0 = (-start).max(0) as usize;
                let k1 = ((m as isize - start) as usize).min(taps);
                let (mut a, mut b) = (0.0, 0.0);
                for k in k0..k1 {
                    let v = line[(start + k as isize) as usize];
                    a += w.low[k] * v;
                    b += w.high[k] * v;
                }
                lo[bout + n * so[axis]] = a;
                hi[bout + n * so[axis]] = b;
            }
        }
    }
    (lo, hi, od)
}

fn merge_axis(lo: &[f64], hi: &[f64], dims: [usize; 3], axis: usize, m: usize, w: &WaveletSystem) -> (Vec<f64>, [usize; 3]) {
    let taps = w.len();
    let shift = taps as isize - 2;
    let mo = dims[axis];
    let mut od = dims;
    od[axis] = m;
    let (si, so) = (strides(dims), strides(od));
    let mut out = vec![0.0; od.iter().product()];
    let mut line = vec![0.0; m];
    let (p, q) = other_axes(axis);
    for ip in 0..dims[p] {
        for iq in 0..dims[q] {
            let bin = ip * si[p] + iq * si[q];
            let bout = ip * so[p] + iq * so[q];
            line.iter_mut().for_each(|v| *v = 0.0);
            for n in 0..mo {
                let (a, b) = (lo[bin + n * si[axis]], hi[bin + n * si[axis]]);
                if a == 0.0 && b == 0.0 {
                    continue;
                }
                let start = 2 * n as isize - shift;
                let k0 = (-start).max(0) as usize;
                let k1 = ((m as isize - start) as usize).min(taps);
                for k in k0..k1 {
                    line[(start + k as isize) as usize] += a * w.low[k] + b * w.high[k];
                }
            }
            for (i, v) in line.iter().enumerate() {
                out[bout + i * so[axis]] = *v;
            }
        }
    }
    (out, od)
}

/// One 3D step: returns the eight bands indexed by `4 e0 + 2 e1 + e2`.
fn split3(x: &[f64], dims: [usize; 3], w: &WaveletSystem) -> (Vec<Vec<f64>>, [usize; 3]) {
    let mut bands = vec![x.to_vec()];
    let mut d = dims;
    for axis in 0..3 {
        let mut next = Vec::with_capacity(bands.len() * 2);
        let mut nd = d;
        for b in bands {
            let (lo, hi, od) = split_axis(&b, d, axis, w);
            next.push(lo);
            next.push(hi);
            nd = od;
        }
        bands = next;
        d = nd;
    }
    (bands, d)
}

fn merge3(bands: Vec<Vec<f64>>, dims: [usize; 3], parent: [usize; 3], w: &WaveletSystem) -> Vec<f64> {
    let mut bands = bands;
    let mut d = dims;
    for axis in (0..3).rev() {
        let mut next = Vec::with_capacity(bands.len() / 2);
        let mut nd = d;
        let mut it = bands.into_iter();
        while let (Some(lo), Some(hi)) = (it.next(), it.next()) {
            let (out, od) = merge_axis(&lo, &hi, d, axis, parent[axis], w);
            next.push(out);
            nd = od;
        }
        bands = next;
        d = nd;
    }
    bands.pop().unwrap()
}

/// Forward transform with `levels` steps. Coefficients are inner products
/// with `L₂`-normalised basis functions, taking each sample as the value on
/// its cell.
pub fn analyze(grid: &Grid, system: &WaveletSystem, levels: u32) -> Result<CoeffField> {
    let fine_level = grid.fine_level()?;
    let nmin = *grid.dims.iter().min().unwrap();
    if levels == 0 || (1usize << levels) > nmin {
        return Err(Error::InvalidParameter(format!(
            "grid of {nmin} cells per axis cannot support {levels} levels"
        )));
    }
    if grid.values.len() != grid.dims.iter().product::<usize>() {
        return Err(Error::InvalidParameter("sample count does not match grid dimensions".into()));
    }
    let scale = grid.h.powf(1.5);
    let mut current: Vec<f64> = grid.values.iter().map(|v| v * scale).collect();
    let mut dims = grid.dims;
    let mut details = Vec::with_capacity(levels as usize);
    for step in 1..=levels {
        let (mut bands, nd) = split3(&current, dims, system);
        current = std::mem::take(&mut bands[0]);
        bands.remove(0);
        details.push(DetailLevel {
            j: fine_level - step as i32,
            step,
            dims: nd,
            parent_dims: dims,
            bands,
        });
        dims = nd;
    }
    Ok(CoeffField {
        system: system.clone(),
        lo: grid.lo,
        h: grid.h,
        dims: grid.dims,
        fine_level,
        details,
        coarse: current,
        coarse_dims: dims,
    })
}

impl CoeffField {
    /// Inverse transform back to samples.
    pub fn synthesize(&self) -> Grid {
        let mut current = self.coarse.clone();
        for lev in self.details.iter().rev() {
            let mut bands = Vec::with_capacity(8);
            bands.push(current);
            bands.extend(lev.bands.iter().cloned());
            current = merge3(bands, lev.dims, lev.parent_dims, &self.system);
        }
        let scale = self.h.powf(-1.5);
        Grid {
            lo: self.lo,
            h: self.h,
            dims: self.dims,
            values: current.into_iter().map(|v| v * scale).collect(),
        }
    }

    /// A field of the same shape with all coefficients zero.
    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        z.coarse.iter_mut().for_each(|v| *v = 0.0);
        for lev in &mut z.details {
            for b in &mut lev.bands {
                b.iter_mut().for_each(|v| *v = 0.0);
            }
        }
        z
    }

    pub fn coarse_level(&self) -> i32 {
        self.fine_level - self.details.len() as i32
    }

    pub fn energy(&self) -> f64 {
        let mut e: f64 = self.coarse.iter().map(|v| v * v).sum();
        for lev in &self.details {
            for b in &lev.bands {
                e += b.iter().map(|v| v * v).sum::<f64>();
            }
        }
        e
    }

    pub fn coefficient_count(&self) -> usize {
        self.coarse.len() + self.details.iter().map(|l| 7 * l.bands[0].len()).sum::<usize>()
    }

    /// Support box of the basis functions at `step` and spatial index `idx`,
    /// clipped to the sampled box.
    pub fn support(&self, step: u32, idx: [usize; 3]) -> Aabb {
        let taps = self.system.len() as i64;
        let scale = 1i64 << step;
        let origin = (taps - 2) * (scale - 1);
        let width = (taps - 1) * (scale - 1);
        let mut lo = [0.0; 3];
        let mut hi = [0.0; 3];
        for a in 0..3 {
            let first = (scale * idx[a] as i64 - origin).max(0);
            let last = (scale * idx[a] as i64 - origin + width).min(self.dims[a] as i64 - 1);
            lo[a] = self.lo[a] + first as f64 * self.h;
            hi[a] = self.lo[a] + (last + 1) as f64 * self.h;
        }
        Aabb::new(lo, hi)
    }

    /// Visits every spatial position of every level with its support box:
    /// `f(level, is_scaling, box, values)` where `values` holds the seven
    /// wavelet coefficients or the single scaling coefficient.
    pub fn for_each_position(&self, mut f: impl FnMut(i32, bool, &Aabb, &[f64])) {
        let mut vals = [0.0; 7];
        for lev in &self.details {
            let d = lev.dims;
            let mut lin = 0;
            for i in 0..d[0] {
                for j in 0..d[1] {
                    for k in 0..d[2] {
                        let b = self.support(lev.step, [i, j, k]);
                        for (e, v) in vals.iter_mut().enumerate() {
                            *v = lev.bands[e][lin];
                        }
                        f(lev.j, false, &b, &vals);
                        lin += 1;
                    }
                }
            }
        }
        let d = self.coarse_dims;
        let step = self.details.len() as u32;
        let mut lin = 0;
        for i in 0..d[0] {
            for j in 0..d[1] {
                for k in 0..d[2] {
                    let b = self.support(step, [i, j, k]);
                    f(self.coarse_level(), true, &b, &self.coarse[lin..lin + 1]);
                    lin += 1;
                }
            }
        }
    }

    /// Sets one coefficient: `band` 0 addresses the scaling coefficients
    /// (only at the coarsest step), 1..=7 the wavelet types.
    pub fn set(&mut self, step: u32, band: usize, idx: [usize; 3], value: f64) -> Result<()> {
        let steps = self.details.len() as u32;
        if band == 0 {
            if step != steps {
                return Err(Error::InvalidParameter("scaling coefficients live at the last step".into()));
            }
            let s = strides(self.coarse_dims);
            let lin = idx[0] * s[0] + idx[1] * s[1] + idx[2];
            let count = self.coarse.len();
            *self.coarse.get_mut(lin).ok_or(Error::IndexOutOfRange { index: lin, count })? = value;
            return Ok(());
        }
        if step == 0 || step > steps || band > 7 {
            return Err(Error::InvalidParameter(format!("no coefficient at step {step}, band {band}")));
        }
        let lev = &mut self.details[step as usize - 1];
        let s = strides(lev.dims);
        let lin = idx[0] * s[0] + idx[1] * s[1] + idx[2];
        let count = lev.bands[band - 1].len();
        *lev.bands[band - 1]
            .get_mut(lin)
            .ok_or(Error::IndexOutOfRange { index: lin, count })? = value;
        Ok(())
    }
}
