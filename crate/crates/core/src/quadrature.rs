//! Composite Gauss-Legendre quadrature.

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// 8-point rule on `[a, b]`.
pub fn gl8<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
        sum += w * (f(c - r * x) + f(c + r * x));
    }
    sum * r
}

/// 8-point rule on `panels` equal subintervals.
pub fn composite_gl8<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(1);
    let h = (b - a) / n as f64;
    (0..n)
        .map(|i| {
            let lo = a + i as f64 * h;
            gl8(&mut f, lo, lo + h)
        })
        .sum()
}

/// Two-point rule, used for cell masses.
pub fn gl2<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a) / 3f64.sqrt();
    0.5 * (b - a) * (f(c - r) + f(c + r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_degree_fifteen() {
        let f = |x: f64| x.powi(15) - 3.0 * x.powi(8) + 1.0;
        let exact = (2f64.powi(16) - 1.0) / 16.0 - 3.0 * (2f64.powi(9) - 1.0) / 9.0 + 1.0;
        assert!((gl8(f, 1.0, 2.0) - exact).abs() < 1e-10 * exact.abs());
    }

    #[test]
    fn weights_sum_to_two() {
        assert!((2.0 * GL8_WEIGHTS.iter().sum::<f64>() - 2.0).abs() < 1e-15);
        assert!((gl2(|x| x * x * x + x * x, 0.0, 1.0) - (0.25 + 1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn composite_gaussian() {
        let v = composite_gl8(|x| (-x * x).exp(), 0.0, 8.0, 40);
        assert!((v - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-14);
    }
}
