//! Expected total reward of an absorbing Markov chain.
//!
//! Solves `(I - A) x = r` where `A` is the chain's transition matrix
//! with terminal rows zeroed. The system is split along strongly
//! connected components and solved back to front: small components by
//! dense LU with partial pivoting, large ones by Gauss-Seidel sweeps.

use thiserror::Error;

use crate::game::{InducedChain, ValueVector, VertexId};
use crate::graph::{backward_reachable, tarjan_scc};

/// Largest component solved by dense LU.
pub const DENSE_LIMIT: usize = 2_000;
/// Relative sweep-to-sweep change at which Gauss-Seidel stops.
pub const GAUSS_SEIDEL_TOLERANCE: f64 = 1e-12;
pub const GAUSS_SEIDEL_MAX_SWEEPS: usize = 1_000_000;

const PIVOT_EPS: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinearError {
    #[error("{0} cannot reach a terminal vertex; the system is singular")]
    NoTerminalReachable(VertexId),
    #[error("singular pivot while eliminating the component containing {0}")]
    SingularPivot(VertexId),
    #[error("Gauss-Seidel did not converge after {sweeps} sweeps (change {change:e})")]
    NotConverged { sweeps: usize, change: f64 },
}

pub fn linear_solve_mc_expected_reward(chain: &InducedChain) -> Result<ValueVector, LinearError> {
    let n = chain.num_vertices();
    let adj: Vec<Vec<usize>> = chain
        .adjacency()
        .into_iter()
        .enumerate()
        .map(|(v, row)| if chain.is_terminal(VertexId(v)) { Vec::new() } else { row })
        .collect();
    let terminals = (0..n).filter(|&v| chain.is_terminal(VertexId(v)));
    let reaches = backward_reachable(&adj, terminals);
    if let Some(v) = (0..n).find(|&v| !reaches[v]) {
        return Err(LinearError::NoTerminalReachable(VertexId(v)));
    }

    let mut x = vec![0.0; n];
    let mut local = vec![usize::MAX; n];
    for comp in tarjan_scc(&adj, |v| !chain.is_terminal(VertexId(v))) {
        for (i, &v) in comp.iter().enumerate() {
            local[v] = i;
        }
        // Right-hand side: reward plus mass flowing out of the component,
        // whose values are already final.
        let rhs: Vec<f64> = comp
            .iter()
            .map(|&v| {
                chain.reward(VertexId(v))
                    + chain
                        .row(VertexId(v))
                        .iter()
                        .filter(|(w, _)| in_comp(&local, *w, comp.len()).is_none())
                        .map(|(w, p)| p * x[w.0])
                        .sum::<f64>()
            })
            .collect();
        let sol = if comp.len() == 1 {
            let v = comp[0];
            let stay: f64 = chain
                .row(VertexId(v))
                .iter()
                .filter(|(w, _)| w.0 == v)
                .map(|e| e.1)
                .sum();
            if 1.0 - stay <= PIVOT_EPS {
                return Err(LinearError::SingularPivot(VertexId(v)));
            }
            vec![rhs[0] / (1.0 - stay)]
        } else if comp.len() <= DENSE_LIMIT {
            dense_solve(chain, &comp, &local, rhs)?
        } else {
            gauss_seidel(chain, &comp, &local, &rhs)?
        };
        for (i, &v) in comp.iter().enumerate() {
            x[v] = sol[i];
        }
        for &v in &comp {
            local[v] = usize::MAX;
        }
    }
    Ok(ValueVector::new(x))
}

fn in_comp(local: &[usize], w: VertexId, m: usize) -> Option<usize> {
    let i = local[w.0];
    (i < m).then_some(i)
}

fn dense_solve(
    chain: &InducedChain,
    comp: &[usize],
    local: &[usize],
    mut b: Vec<f64>,
) -> Result<Vec<f64>, LinearError> {
    let m = comp.len();
    let mut a = vec![0.0; m * m];
    for (i, &v) in comp.iter().enumerate() {
        a[i * m + i] = 1.0;
        for &(w, p) in chain.row(VertexId(v)) {
            if let Some(j) = in_comp(local, w, m) {
                a[i * m + j] -= p;
            }
        }
    }
    for k in 0..m {
        let (piv, best) = (k..m)
            .map(|r| (r, a[r * m + k].abs()))
            .fold((k, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
        if best <= PIVOT_EPS {
            return Err(LinearError::SingularPivot(VertexId(comp[k])));
        }
        if piv != k {
            for c in 0..m {
                a.swap(k * m + c, piv * m + c);
            }
            b.swap(k, piv);
        }
        let d = a[k * m + k];
        for r in k + 1..m {
            let f = a[r * m + k] / d;
            if f == 0.0 {
                continue;
            }
            a[r * m + k] = 0.0;
            for c in k + 1..m {
                a[r * m + c] -= f * a[k * m + c];
            }
            b[r] -= f * b[k];
        }
    }
    let mut x = vec![0.0; m];
    for k in (0..m).rev() {
        let s: f64 = (k + 1..m).map(|c| a[k * m + c] * x[c]).sum();
        x[k] = (b[k] - s) / a[k * m + k];
    }
    Ok(x)
}

fn gauss_seidel(
    chain: &InducedChain,
    comp: &[usize],
    local: &[usize],
    b: &[f64],
) -> Result<Vec<f64>, LinearError> {
    let m = comp.len();
    let rows: Vec<(f64, Vec<(usize, f64)>)> = comp
        .iter()
        .map(|&v| {
            let mut diag = 1.0;
            let mut off = Vec::new();
            for &(w, p) in chain.row(VertexId(v)) {
                match in_comp(local, w, m) {
                    Some(j) if comp[j] == v => diag -= p,
                    Some(j) => off.push((j, p)),
                    None => {}
                }
            }
            (diag, off)
        })
        .collect();
    let mut x = b.to_vec();
    let mut change = f64::INFINITY;
    for _ in 0..GAUSS_SEIDEL_MAX_SWEEPS {
        change = 0.0;
        for (i, (diag, off)) in rows.iter().enumerate() {
            let s: f64 = off.iter().map(|&(j, p)| p * x[j]).sum();
            let nx = (b[i] + s) / diag;
            change = f64::max(change, (nx - x[i]).abs() / nx.abs().max(1.0));
            x[i] = nx;
        }
        if change < GAUSS_SEIDEL_TOLERANCE {
            return Ok(x);
        }
    }
    Err(LinearError::NotConverged {
        sweeps: GAUSS_SEIDEL_MAX_SWEEPS,
        change,
    })
}
