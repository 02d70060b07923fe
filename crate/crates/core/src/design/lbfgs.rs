//! Limited-memory BFGS with a backtracking Armijo line search.

use std::collections::VecDeque;

#[derive(Clone, Debug)]
pub struct LbfgsSettings {
    pub memory: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub f_tol: f64,
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimize `f`, where `fg(x, g)` returns `f(x)` and writes the gradient into `g`.
pub fn minimize<F>(mut fg: F, x0: Vec<f64>, s: &LbfgsSettings) -> Minimum
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0;
    let mut g = vec![0.0; n];
    let mut f = fg(&x, &mut g);
    let mut hist: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(s.memory);
    let mut dir = vec![0.0; n];
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut alpha = vec![0.0; s.memory];
    let mut stalled = 0;
    let mut iters = 0;

    while iters < s.max_iters {
        if g.iter().fold(0.0_f64, |m, v| m.max(v.abs())) < s.grad_tol {
            break;
        }
        iters += 1;

        // Two-loop recursion: dir = -H g.
        dir.iter_mut().zip(&g).for_each(|(d, gi)| *d = -gi);
        for (k, (sv, yv, rho)) in hist.iter().enumerate().rev() {
            alpha[k] = rho * dot(sv, &dir);
            dir.iter_mut().zip(yv).for_each(|(d, y)| *d -= alpha[k] * y);
        }
        let gamma = match hist.back() {
            Some((sv, yv, _)) => dot(sv, yv) / dot(yv, yv),
            None => 1.0 / g.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0),
        };
        dir.iter_mut().for_each(|d| *d *= gamma);
        for (k, (sv, yv, rho)) in hist.iter().enumerate() {
            let beta = rho * dot(yv, &dir);
            dir.iter_mut().zip(sv).for_each(|(d, s)| *d += (alpha[k] - beta) * s);
        }

        let mut slope = dot(&g, &dir);
        if !(slope < 0.0) {
            hist.clear();
            dir.iter_mut().zip(&g).for_each(|(d, gi)| *d = -gi);
            slope = dot(&g, &dir);
        }

        let mut step = 1.0;
        let mut accepted = false;
        let mut f_new = f;
        for _ in 0..60 {
            x_new.iter_mut().zip(x.iter().zip(&dir)).for_each(|(xn, (xi, d))| *xn = xi + step * d);
            f_new = fg(&x_new, &mut g_new);
            if f_new.is_finite() && f_new <= f + 1e-4 * step * slope {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            if hist.is_empty() {
                break;
            }
            hist.clear();
            continue;
        }

        let sv: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&sv, &yv);
        if sy > 1e-16 * dot(&sv, &sv).sqrt() * dot(&yv, &yv).sqrt() && sy > 0.0 {
            if hist.len() == s.memory {
                hist.pop_front();
            }
            hist.push_back((sv, yv, 1.0 / sy));
        }

        let improvement = f - f_new;
        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        f = f_new;
        if improvement <= s.f_tol * (1.0 + f.abs()) {
            stalled += 1;
            if stalled >= 3 {
                break;
            }
        } else {
            stalled = 0;
        }
    }
    Minimum { x, f, iterations: iters }
}

/// Central-difference gradient of `f` at `x` with step `h`.
pub fn central_gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], h: f64, g: &mut [f64]) {
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        let xi = xp[i];
        xp[i] = xi + h;
        let up = f(&xp);
        xp[i] = xi - h;
        let down = f(&xp);
        xp[i] = xi;
        g[i] = (up - down) / (2.0 * h);
    }
}
