//! Integer-order Bessel functions of the first kind by Miller's backward
//! recurrence, normalized with `J_0 + 2 Σ J_2k = 1`.

const RESCALE_ABOVE: f64 = 1e250;

/// `[J_0(x), J_1(x), ..., J_nmax(x)]`.
pub fn bessel_j_sequence(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let margin = 40.0 + 10.0 * ax.cbrt();
    let mut start = (nmax as f64).max(ax).ceil() as usize + margin.ceil() as usize;
    start += start % 2;

    let mut next = 0.0_f64; // J_{k+1}
    let mut cur = 1e-300_f64; // J_k
    let mut even_sum = 0.0_f64;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / ax * cur - next;
        next = cur;
        cur = prev;
        if k - 1 <= nmax {
            out[k - 1] = cur;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            even_sum += cur;
        }
        if cur.abs() > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            cur *= s;
            next *= s;
            even_sum *= s;
            for v in out.iter_mut().skip(k - 1) {
                *v *= s;
            }
        }
    }
    let norm = cur + 2.0 * even_sum;
    for (n, v) in out.iter_mut().enumerate() {
        *v /= norm;
        if x < 0.0 && n % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // Abramowitz & Stegun table 9.1 / 9.4.
        let j = bessel_j_sequence(3, 1.0);
        assert!((j[0] - 0.765_197_686_557_966_6).abs() < 1e-14);
        assert!((j[1] - 0.440_050_585_744_933_5).abs() < 1e-14);
        assert!((j[2] - 0.114_903_484_931_900_5).abs() < 1e-14);
        let j = bessel_j_sequence(1, 10.0);
        assert!((j[0] + 0.245_935_764_451_348_3).abs() < 1e-13);
        assert!((j[1] - 0.043_472_746_168_861_44).abs() < 1e-13);
    }

    #[test]
    fn parity_for_negative_argument() {
        let p = bessel_j_sequence(6, 3.7);
        let m = bessel_j_sequence(6, -3.7);
        for n in 0..=6 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((m[n] - sign * p[n]).abs() < 1e-15);
        }
    }

    #[test]
    fn squares_sum_to_one_for_large_argument() {
        for &x in &[0.3, 50.0, 314.159, 5000.0] {
            let j = bessel_j_sequence((2.0 * x) as usize + 60, x);
            let s: f64 = j[0] * j[0] + 2.0 * j[1..].iter().map(|v| v * v).sum::<f64>();
            assert!((s - 1.0).abs() < 1e-10, "x={x} sum={s}");
        }
    }
}
