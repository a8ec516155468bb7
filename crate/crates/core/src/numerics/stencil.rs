//! Central difference stencils on a uniform grid. The fourth-order tables are
//! the defaults; other even accuracies come from Fornberg's recursion.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    pub order: usize,
    pub accuracy: usize,
    /// Weights for offsets `-half_width..=half_width`, before the `1/hⁿ` factor.
    pub weights: Vec<f64>,
    pub denominator: f64,
}

impl Stencil {
    pub fn half_width(&self) -> usize {
        self.weights.len() / 2
    }

    pub fn width(&self) -> usize {
        self.weights.len()
    }

    /// `(offset, weight / denominator)` pairs.
    pub fn taps(&self) -> impl Iterator<Item = (isize, f64)> + '_ {
        let hw = self.half_width() as isize;
        self.weights
            .iter()
            .enumerate()
            .map(move |(k, w)| (k as isize - hw, w / self.denominator))
    }
}

const TABLES: [(&[f64], f64); 4] = [
    (&[1.0, -8.0, 0.0, 8.0, -1.0], 12.0),
    (&[-1.0, 16.0, -30.0, 16.0, -1.0], 12.0),
    (&[1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0], 8.0),
    (&[-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0], 6.0),
];

pub fn central(order: usize) -> Result<Stencil> {
    central_with_accuracy(order, 4)
}

/// Central stencil for the `order`-th derivative with truncation error `O(h^accuracy)`.
pub fn central_with_accuracy(order: usize, accuracy: usize) -> Result<Stencil> {
    if !(1..=4).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    if accuracy < 2 || accuracy % 2 != 0 || accuracy > 12 {
        return Err(Error::InvalidParameter(format!("stencil accuracy must be even in 2..=12, got {accuracy}")));
    }
    if accuracy == 4 {
        let (w, d) = TABLES[order - 1];
        return Ok(Stencil { order, accuracy, weights: w.to_vec(), denominator: d });
    }
    let half = (order + 1) / 2 - 1 + accuracy / 2;
    let nodes: Vec<f64> = (-(half as isize)..=half as isize).map(|o| o as f64).collect();
    Ok(Stencil { order, accuracy, weights: fornberg(&nodes, order), denominator: 1.0 })
}

// Weights at x = 0 for the `m`-th derivative on arbitrary `nodes`.
fn fornberg(nodes: &[f64], m: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0];
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i];
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
    c.into_iter().map(|row| row[m]).collect()
}
