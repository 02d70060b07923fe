//! Integer-order Bessel functions of the first kind.
//!
//! Values are produced by Miller's backward recurrence
//! `J_{k-1}(x) = (2k/x) J_k(x) - J_{k+1}(x)`, normalized with
//! `J_0(x) + 2 sum_k J_{2k}(x) = 1`. The recurrence is stable in the
//! downward direction for every order, so a whole table costs one pass.

const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// `J_k(x)` for `k = 0..=max_order`.
pub fn bessel_j_table(max_order: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; max_order + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let reach = (max_order as f64).max(ax.ceil());
    let mut start = reach as usize + 20 + (40.0 * reach).sqrt().ceil() as usize;
    if start % 2 == 1 {
        start += 1;
    }

    let two_over_x = 2.0 / ax;
    let mut j_next = 0.0_f64;
    let mut j_curr = 1e-30_f64;
    let mut norm = 0.0_f64;
    // Walk k = start..1 computing J_{k-1}.
    for k in (1..=start).rev() {
        if k <= max_order {
            out[k] = j_curr;
        }
        if k % 2 == 0 {
            norm += 2.0 * j_curr;
        }
        let j_prev = k as f64 * two_over_x * j_curr - j_next;
        j_next = j_curr;
        j_curr = j_prev;
        if j_curr.abs() > RESCALE_ABOVE {
            j_curr *= RESCALE_BY;
            j_next *= RESCALE_BY;
            norm *= RESCALE_BY;
            for v in out.iter_mut() {
                *v *= RESCALE_BY;
            }
        }
    }
    out[0] = j_curr;
    norm += j_curr;

    let scale = 1.0 / norm;
    for (k, v) in out.iter_mut().enumerate() {
        *v *= scale;
        if x < 0.0 && k % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

/// `J_n(x)` for any integer order, using `J_{-n} = (-1)^n J_n`.
pub fn bessel_j(n: i64, x: f64) -> f64 {
    let k = n.unsigned_abs() as usize;
    let v = bessel_j_table(k, x)[k];
    if n < 0 && k % 2 == 1 {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // Abramowitz & Stegun table 9.1
        assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(1, 1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j(2, 1.0) - 0.114_903_484_931_900_5).abs() < 1e-15);
        assert!((bessel_j(0, 10.0) - (-0.245_935_764_451_348_3)).abs() < 1e-14);
        assert!(bessel_j(0, 2.404_825_557_695_773).abs() < 1e-14);
    }

    #[test]
    fn symmetry_in_order_and_argument() {
        for &x in &[0.3, 1.7, 4.2] {
            for n in 0..6_i64 {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert!((bessel_j(-n, x) - sign * bessel_j(n, x)).abs() < 1e-15);
                assert!((bessel_j(n, -x) - sign * bessel_j(n, x)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_argument() {
        let t = bessel_j_table(5, 0.0);
        assert_eq!(t, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn squared_sum_is_one() {
        for &x in &[0.1, 2.0, 7.5, 25.0] {
            let t = bessel_j_table(80, x);
            let s = t[0] * t[0] + 2.0 * t[1..].iter().map(|v| v * v).sum::<f64>();
            assert!((s - 1.0).abs() < 1e-13, "x={x} sum={s}");
        }
    }
}
