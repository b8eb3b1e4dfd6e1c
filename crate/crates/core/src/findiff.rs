//! Central finite differences with Richardson extrapolation.

/// Weights of the central stencil on the integer grid `-p..=p` for the
/// `order`-th derivative at 0, via Fornberg's recursion.
pub fn central_weights(order: usize, half_width: usize) -> Vec<f64> {
    let nodes: Vec<f64> = (-(half_width as i64)..=half_width as i64).map(|j| j as f64).collect();
    fornberg(&nodes, 0.0, order)
}

fn fornberg(nodes: &[f64], x0: f64, order: usize) -> Vec<f64> {
    let n = nodes.len();
    // c[j][k]: weight of node j for derivative k.
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Half-width of the narrowest central stencil with fourth-order accuracy.
pub fn fourth_order_half_width(order: usize) -> usize {
    order.div_ceil(2) + 1
}

/// A numerical estimate and its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Fourth-order central difference of `f` at `x` with step `h`.
pub fn central_difference(f: &impl Fn(f64) -> f64, x: f64, h: f64, order: usize) -> f64 {
    let p = fourth_order_half_width(order);
    let w = central_weights(order, p);
    let mut acc = crate::sum::Neumaier::new();
    for (k, wk) in w.iter().enumerate() {
        if *wk != 0.0 {
            let offset = k as f64 - p as f64;
            acc.add(wk * f(x + offset * h));
        }
    }
    acc.value() / h.powi(order as i32)
}

/// Richardson-extrapolated derivative. Steps halve from `h0`; the leading
/// error terms are `h^4, h^6, …`. Stops when the tableau diagonal starts to
/// diverge (round-off dominating).
pub fn richardson_derivative(f: impl Fn(f64) -> f64, x: f64, order: usize, h0: f64, levels: usize) -> Estimate {
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(levels);
    let mut best = Estimate { value: f64::NAN, error: f64::INFINITY };
    let mut h = h0;
    for i in 0..levels {
        let mut row = vec![central_difference(&f, x, h, order)];
        for j in 1..=i {
            let r = 2f64.powi(2 + 2 * j as i32);
            let prev = table[i - 1][j - 1];
            row.push((r * row[j - 1] - prev) / (r - 1.0));
            let err = (row[j] - row[j - 1]).abs().max((row[j] - prev).abs());
            if err <= best.error {
                best = Estimate { value: row[j], error: err };
            }
        }
        if i > 0 {
            let diverging = (row[i] - table[i - 1][i - 1]).abs() >= 2.0 * best.error;
            table.push(row);
            if diverging && i > 2 {
                break;
            }
        } else {
            table.push(row);
        }
        h /= 2.0;
    }
    if !best.value.is_finite() {
        best = Estimate { value: table[0][0], error: f64::INFINITY };
    }
    best
}

/// Extrapolate `g(d) → g(0)` from samples at `d0, d0/2, d0/4, …`, assuming
/// `g` is smooth in `d` (error expansion in integer powers of `d`).
pub fn extrapolate_to_zero(mut g: impl FnMut(f64) -> Option<f64>, d0: f64, levels: usize) -> Option<Estimate> {
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(levels);
    let mut best = Estimate { value: f64::NAN, error: f64::INFINITY };
    let mut d = d0;
    for i in 0..levels {
        let mut row = vec![g(d)?];
        for j in 1..=i {
            let r = 2f64.powi(j as i32);
            let prev = table[i - 1][j - 1];
            row.push((r * row[j - 1] - prev) / (r - 1.0));
            let err = (row[j] - row[j - 1]).abs().max((row[j] - prev).abs());
            if err <= best.error {
                best = Estimate { value: row[j], error: err };
            }
        }
        table.push(row);
        d /= 2.0;
    }
    best.value.is_finite().then_some(best)
}
