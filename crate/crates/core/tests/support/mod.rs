//! Stand-alone Gauss collocation solver used as an oracle: closed-form nodes,
//! a tableau from Lagrange cardinal polynomials and plain fixed-point stage
//! iteration.

use hbvm_core::systems::apply_j;
use hbvm_core::HamiltonianProblem;

/// Gauss nodes on [0, 1] for s <= 4 from the roots of the Legendre polynomials,
/// written out in closed form.
fn closed_form_nodes(s: usize) -> Vec<f64> {
    let roots: Vec<f64> = match s {
        1 => vec![0.0],
        2 => vec![-(1.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt()],
        3 => vec![-(0.6f64).sqrt(), 0.0, (0.6f64).sqrt()],
        4 => {
            let r = 2.0 / 7.0 * (1.2f64).sqrt();
            let inner = (3.0 / 7.0 - r).sqrt();
            let outer = (3.0 / 7.0 + r).sqrt();
            vec![-outer, -inner, inner, outer]
        }
        _ => unreachable!(),
    };
    roots.iter().map(|t| (t + 1.0) / 2.0).collect()
}

/// Monomial coefficients of the j-th Lagrange cardinal polynomial.
fn cardinal(nodes: &[f64], j: usize) -> Vec<f64> {
    let mut poly = vec![1.0];
    for (i, &c) in nodes.iter().enumerate() {
        if i == j {
            continue;
        }
        let scale = 1.0 / (nodes[j] - c);
        let mut next = vec![0.0; poly.len() + 1];
        for (d, &a) in poly.iter().enumerate() {
            next[d + 1] += a * scale;
            next[d] -= a * c * scale;
        }
        poly = next;
    }
    poly
}

fn integral_to(poly: &[f64], x: f64) -> f64 {
    poly.iter()
        .enumerate()
        .map(|(d, a)| a * x.powi(d as i32 + 1) / (d as f64 + 1.0))
        .sum()
}

pub struct DirectGauss {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl DirectGauss {
    pub fn new(s: usize) -> Self {
        let c = closed_form_nodes(s);
        let polys: Vec<Vec<f64>> = (0..s).map(|j| cardinal(&c, j)).collect();
        let a = c
            .iter()
            .map(|&ci| polys.iter().map(|p| integral_to(p, ci)).collect())
            .collect();
        let b = polys.iter().map(|p| integral_to(p, 1.0)).collect();
        Self { a, b }
    }

    fn field(problem: &dyn HamiltonianProblem, y: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; y.len()];
        problem.energy_gradient(y, &mut g).unwrap();
        apply_j(problem.half_dim(), &g).unwrap()
    }

    /// Fixed-point iteration on the stage slopes until they stop changing.
    pub fn step(&self, problem: &dyn HamiltonianProblem, y0: &[f64], h: f64) -> Vec<f64> {
        let s = self.b.len();
        let n = y0.len();
        let mut slopes = vec![Self::field(problem, y0); s];
        for _ in 0..500 {
            let stages: Vec<Vec<f64>> = (0..s)
                .map(|i| {
                    (0..n)
                        .map(|d| {
                            y0[d] + h * (0..s).map(|j| self.a[i][j] * slopes[j][d]).sum::<f64>()
                        })
                        .collect()
                })
                .collect();
            let next: Vec<Vec<f64>> = stages.iter().map(|u| Self::field(problem, u)).collect();
            let change = next
                .iter()
                .flatten()
                .zip(slopes.iter().flatten())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            slopes = next;
            if change < 1e-16 {
                break;
            }
        }
        (0..n)
            .map(|d| y0[d] + h * (0..s).map(|j| self.b[j] * slopes[j][d]).sum::<f64>())
            .collect()
    }
}

/// Small deterministic generator so the sample set is fixed.
pub struct SplitMix(pub u64);

impl SplitMix {
    fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}
