//! Double description: extreme rays of a pointed cone `{y : a_i·y ≥ 0}`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const ZERO_TOL: f64 = 1e-9;

#[derive(Clone)]
struct Ray {
    coords: Vec<f64>,
    /// Bit `i` set when constraint `i` (in processing order) is tight.
    zeros: Vec<u64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let s = v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    }
}

fn set_bit(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Extreme rays of `{y ∈ ℝᵈ : a·y ≥ 0 for every row a}`, each scaled to
/// max-abs 1. The rows must span `ℝᵈ` (pointed cone).
pub(crate) fn extreme_rays(rows: &[Vec<f64>], d: usize) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = rows.to_vec();
    rows.iter_mut().for_each(|r| normalize(r));

    // Greedy choice of d independent rows for the initial simplicial cone.
    let mut basis_rows: Vec<usize> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut trial: Vec<&Vec<f64>> = basis_rows.iter().map(|&k| &rows[k]).collect();
        trial.push(row);
        let m = DMatrix::from_fn(trial.len(), d, |r, c| trial[r][c]);
        if m.rank(1e-9) == trial.len() {
            basis_rows.push(i);
            if basis_rows.len() == d {
                break;
            }
        }
    }
    if basis_rows.len() < d {
        return Err(Error::InvalidInput("constraint rows do not span the space; cone is not pointed".into()));
    }
    let mut order = basis_rows.clone();
    order.extend((0..rows.len()).filter(|i| !basis_rows.contains(i)));
    let words = order.len().div_ceil(64).max(1);

    let b = DMatrix::from_fn(d, d, |r, c| rows[basis_rows[r]][c]);
    let inv = b
        .try_inverse()
        .ok_or_else(|| Error::InvalidInput("singular initial basis".into()))?;
    let mut rays: Vec<Ray> = (0..d)
        .map(|k| {
            let mut coords: Vec<f64> = inv.column(k).iter().copied().collect();
            normalize(&mut coords);
            let mut zeros = vec![0; words];
            for j in 0..d {
                if j != k {
                    set_bit(&mut zeros, j);
                }
            }
            Ray { coords, zeros }
        })
        .collect();

    for (step, &ri) in order.iter().enumerate().skip(d) {
        let a = &rows[ri];
        let vals: Vec<f64> = rays.iter().map(|r| dot(a, &r.coords)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] > ZERO_TOL).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k] < -ZERO_TOL).collect();
        if neg.is_empty() {
            for (k, r) in rays.iter_mut().enumerate() {
                if vals[k].abs() <= ZERO_TOL {
                    set_bit(&mut r.zeros, step);
                }
            }
            continue;
        }
        let mut next: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common: Vec<u64> = rays[p]
                    .zeros
                    .iter()
                    .zip(&rays[q].zeros)
                    .map(|(x, y)| x & y)
                    .collect();
                let count: u32 = common.iter().map(|w| w.count_ones()).sum();
                if (count as usize) + 2 < d {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .all(|k| k == p || k == q || !subset(&common, &rays[k].zeros));
                if !adjacent {
                    continue;
                }
                let mut coords: Vec<f64> = rays[q]
                    .coords
                    .iter()
                    .zip(&rays[p].coords)
                    .map(|(qv, pv)| vals[p] * qv - vals[q] * pv)
                    .collect();
                normalize(&mut coords);
                let mut zeros = common;
                set_bit(&mut zeros, step);
                next.push(Ray { coords, zeros });
            }
        }
        for (k, r) in rays.iter().enumerate() {
            if vals[k] >= -ZERO_TOL {
                let mut r = r.clone();
                if vals[k].abs() <= ZERO_TOL {
                    set_bit(&mut r.zeros, step);
                }
                next.push(r);
            }
        }
        rays = next;
    }

    let mut out: Vec<Vec<f64>> = Vec::new();
    for r in rays {
        let dup = out
            .iter()
            .any(|o| o.iter().zip(&r.coords).all(|(x, y)| (x - y).abs() < 1e-9));
        if !dup {
            out.push(r.coords);
        }
    }
    Ok(out)
}
