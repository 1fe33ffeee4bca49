//! Nelder–Mead on a box. Trial points are projected onto the box, and
//! coordinates whose bounds coincide are held fixed.

use crate::error::Result;
use crate::real::Real;

pub(super) struct Outcome<T> {
    pub x: Vec<T>,
    pub f: T,
    pub iterations: usize,
    pub converged: bool,
}

pub(super) struct Bounds<'a, T> {
    pub lo: &'a [T],
    pub hi: &'a [T],
}

impl<T: Real> Bounds<'_, T> {
    fn clamp(&self, x: &mut [T]) {
        for ((v, &lo), &hi) in x.iter_mut().zip(self.lo).zip(self.hi) {
            *v = v.max(lo).min(hi);
        }
    }

    fn free(&self) -> Vec<usize> {
        (0..self.lo.len()).filter(|&i| self.hi[i] > self.lo[i]).collect()
    }
}

/// Largest coordinate distance from the best vertex.
fn size<T: Real>(simplex: &[Vec<T>]) -> T {
    let best = &simplex[0];
    simplex[1..]
        .iter()
        .flat_map(|v| v.iter().zip(best).map(|(a, b)| (*a - *b).abs()))
        .fold(T::zero(), T::max)
}

/// Minimizes `f` from `x0` with an initial step of `step` times each box width.
pub(super) fn minimize<T: Real>(
    f: &impl Fn(&[T]) -> Result<T>,
    bounds: &Bounds<'_, T>,
    x0: &[T],
    step: T,
    tol: T,
    max_iter: usize,
) -> Result<Outcome<T>> {
    let mut start = x0.to_vec();
    bounds.clamp(&mut start);
    let free = bounds.free();
    if free.is_empty() {
        let f0 = f(&start)?;
        return Ok(Outcome {
            x: start,
            f: f0,
            iterations: 0,
            converged: true,
        });
    }

    let mut simplex = vec![start.clone()];
    for &i in &free {
        let mut v = start.clone();
        let width = bounds.hi[i] - bounds.lo[i];
        let up = v[i] + step * width;
        v[i] = if up <= bounds.hi[i] { up } else { v[i] - step * width };
        simplex.push(v);
    }
    let mut values = simplex.iter().map(|v| f(v)).collect::<Result<Vec<T>>>()?;

    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let n = free.len();
    let mut iterations = 0;
    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if size(&simplex) < tol || iterations >= max_iter {
            break;
        }
        iterations += 1;

        let centroid: Vec<T> = (0..start.len())
            .map(|j| simplex[..n].iter().fold(T::zero(), |a, v| a + v[j]) / T::lit(n as f64))
            .collect();
        let toward = |coef: T| {
            let mut p: Vec<T> = centroid
                .iter()
                .zip(&simplex[n])
                .map(|(&c, &w)| c + coef * (c - w))
                .collect();
            bounds.clamp(&mut p);
            p
        };

        let xr = toward(T::one());
        let fr = f(&xr)?;
        if fr < values[0] {
            let xe = toward(two);
            let fe = f(&xe)?;
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let outside = fr < values[n];
        let xc = toward(if outside { half } else { -half });
        let fc = f(&xc)?;
        if (outside && fc <= fr) || (!outside && fc < values[n]) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        for k in 1..=n {
            let shrunk: Vec<T> = simplex[0].iter().zip(&simplex[k]).map(|(&b, &v)| b + half * (v - b)).collect();
            values[k] = f(&shrunk)?;
            simplex[k] = shrunk;
        }
    }
    let converged = size(&simplex) < tol;
    Ok(Outcome {
        x: simplex.swap_remove(0),
        f: values[0],
        iterations,
        converged,
    })
}
