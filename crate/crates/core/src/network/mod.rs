//! Discrete electrical networks on warped annuli.
//!
//! The annulus `ρ ≤ r ≤ R` is cut into `K` radial shells of equal width and
//! a fixed angular grid; each cell is a node. Radial edges carry the
//! conductance `w(r_mid)^{m−1}·|cell|/Δr` and angular edges the dual
//! `(dual face)/(node distance)` weighting. Holding the inner level at 0 and
//! the outer level at 1, the current through the network is its effective
//! conductance, which converges to the annulus capacity under refinement.
//! Deleting edges can only lower it (Rayleigh monotonicity), which is what
//! makes networks usable for comparison arguments.

mod cg;

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cg::{pcg, CgReport, CsrMatrix};

use crate::dirichlet::{drifted_capacity_with, AnnulusSpec, CapacityEstimate};
use crate::error::{Error, Result};
use crate::geometry::WarpingDescriptor;
use crate::problem::RadialProblem;

pub const RESIDUAL_TARGET: f64 = 1e-10;
/// Fewest angular cells per direction.
pub const MIN_CELLS: usize = 4;

/// Angular grid: `A` equal arcs on the circle, or a latitude–longitude grid
/// `[lat, lon]` on the 2-sphere whose first and last latitude bands are
/// merged into polar caps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AngularCells {
    Circle(usize),
    Sphere([usize; 2]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resolution {
    pub radial: usize,
    pub angular: AngularCells,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub conductance: f64,
}

/// Angular cells of one level: measures on the unit sphere and the
/// dimensionless `face/distance` factor of each angular edge.
struct AngularLayout {
    measures: Vec<f64>,
    links: Vec<(usize, usize, f64)>,
}

fn circle_layout(a: usize) -> AngularLayout {
    let dtheta = 2.0 * PI / a as f64;
    AngularLayout {
        measures: vec![dtheta; a],
        links: (0..a).map(|j| (j, (j + 1) % a, 1.0 / dtheta)).collect(),
    }
}

fn sphere_layout(lat: usize, lon: usize) -> AngularLayout {
    let dth = PI / lat as f64;
    let dph = 2.0 * PI / lon as f64;
    let bands = lat - 2;
    let north = 0;
    let south = 1 + bands * lon;
    let cell = |t: usize, j: usize| 1 + (t - 1) * lon + j % lon;
    let cap = 2.0 * PI * (1.0 - dth.cos());
    let mut measures = vec![cap];
    for t in 1..=bands {
        let m = dph * ((t as f64 * dth).cos() - ((t + 1) as f64 * dth).cos());
        measures.extend(std::iter::repeat_n(m, lon));
    }
    measures.push(cap);
    let mut links = Vec::new();
    // Cap centres sit at the poles, 1.5 bands from the neighbouring centres.
    let cap_link = dth.sin() * dph / (1.5 * dth);
    for j in 0..lon {
        links.push((north, cell(1, j), cap_link));
    }
    for t in 1..=bands {
        let centre = (t as f64 + 0.5) * dth;
        for j in 0..lon {
            links.push((cell(t, j), cell(t, j + 1), dth / (centre.sin() * dph)));
            if t < bands {
                let edge = ((t + 1) as f64 * dth).sin();
                links.push((cell(t, j), cell(t + 1, j), edge * dph / dth));
            }
        }
    }
    for j in 0..lon {
        links.push((cell(bands, j), south, cap_link));
    }
    AngularLayout { measures, links }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialNetwork {
    m: usize,
    levels: Vec<f64>,
    per_level: usize,
    edges: Vec<Edge>,
}

/// Graph for the annulus `ρ ≤ r ≤ R` of the `m`-dimensional model with
/// warping `w`, `m ∈ {2, 3}`. Nodes are numbered level by level.
pub fn build_network(
    m: usize,
    w: &WarpingDescriptor,
    rho: f64,
    big_r: f64,
    k: usize,
    angular: AngularCells,
) -> Result<RadialNetwork> {
    if !(rho > 0.0 && rho < big_r) {
        return Err(Error::Domain {
            value: rho,
            lo: 0.0,
            hi: big_r,
        });
    }
    w.check_domain(big_r)?;
    if k == 0 {
        return Err(Error::Domain {
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    let layout = match (m, angular) {
        (2, AngularCells::Circle(a)) if a >= MIN_CELLS => circle_layout(a),
        (3, AngularCells::Sphere([lat, lon])) if lat >= MIN_CELLS && lon >= MIN_CELLS => sphere_layout(lat, lon),
        _ => {
            return Err(Error::invalid(format!(
                "angular grid {angular:?} does not fit dimension {m} (need m = 2 with A ≥ 4 or m = 3 with [lat, lon] ≥ 4)"
            )))
        }
    };
    let dr = (big_r - rho) / k as f64;
    let levels: Vec<f64> = (0..=k).map(|i| if i == k { big_r } else { rho + i as f64 * dr }).collect();
    let per_level = layout.measures.len();
    let weights = |i: usize| -> Result<Vec<Edge>> {
        let base = i * per_level;
        let r = levels[i];
        // Radial thickness of the dual cell: halved on the boundary levels.
        let thickness = if i == 0 || i == k { dr / 2.0 } else { dr };
        let wr = w.eval(r)?;
        let angular_scale = thickness * wr.powi(m as i32 - 3);
        let mut edges: Vec<Edge> = layout
            .links
            .iter()
            .map(|&(a, b, f)| Edge {
                a: base + a,
                b: base + b,
                conductance: angular_scale * f,
            })
            .collect();
        if i < k {
            let mid = 0.5 * (levels[i] + levels[i + 1]);
            let shell = w.eval(mid)?.powi(m as i32 - 1) / (levels[i + 1] - levels[i]);
            edges.extend(layout.measures.iter().enumerate().map(|(c, mu)| Edge {
                a: base + c,
                b: base + per_level + c,
                conductance: shell * mu,
            }));
        }
        Ok(edges)
    };
    let per: Vec<Vec<Edge>> = (0..=k).into_par_iter().map(weights).collect::<Result<_>>()?;
    let edges: Vec<Edge> = per.into_iter().flatten().collect();
    if let Some(e) = edges.iter().find(|e| !(e.conductance > 0.0 && e.conductance.is_finite())) {
        return Err(Error::Numerical(format!("edge {}–{} has conductance {}", e.a, e.b, e.conductance)));
    }
    Ok(RadialNetwork {
        m,
        levels,
        per_level,
        edges,
    })
}

impl RadialNetwork {
    pub fn dimension(&self) -> usize {
        self.m
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn nodes_per_level(&self) -> usize {
        self.per_level
    }

    pub fn node_count(&self) -> usize {
        self.levels.len() * self.per_level
    }

    pub fn level_of(&self, node: usize) -> usize {
        node / self.per_level
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edges between level `i` and level `i + 1`.
    pub fn radial_edges(&self, i: usize) -> impl Iterator<Item = &Edge> {
        self.edges
            .iter()
            .filter(move |e| self.level_of(e.a) == i && self.level_of(e.b) == i + 1)
    }

    /// A copy with edge `index` removed; nodes and boundary sets are kept.
    pub fn without_edge(&self, index: usize) -> Result<Self> {
        if index >= self.edges.len() {
            return Err(Error::invalid(format!("no edge {index} in a network of {}", self.edges.len())));
        }
        let mut out = self.clone();
        out.edges.remove(index);
        Ok(out)
    }

    /// Plain edge list, one `node node conductance` line per edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for e in &self.edges {
            writeln!(out, "{} {} {}", e.a, e.b, e.conductance)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConductanceResult {
    /// Current into the inner boundary.
    pub conductance: f64,
    /// Current out of the outer boundary; equals `conductance` up to the
    /// solver residual.
    pub outflow: f64,
    pub iterations: usize,
    pub residual_norm: f64,
    pub rhs_norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSolution {
    /// Node potentials, 0 on the inner level and 1 on the outer one.
    pub potential: Vec<f64>,
    pub result: ConductanceResult,
}

/// Starting point for the conjugate-gradient iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartingGuess {
    /// Potential linear in the level index.
    Linear,
    /// Series-resistor profile from the total radial conductance between
    /// consecutive levels. Exact for rotationally symmetric networks, so CG
    /// only has to remove the asymmetric part.
    LevelProfile,
}

pub fn effective_conductance(net: &RadialNetwork) -> Result<ConductanceResult> {
    Ok(solve_network(net)?.result)
}

pub fn solve_network(net: &RadialNetwork) -> Result<NetworkSolution> {
    solve_network_from(net, StartingGuess::LevelProfile)
}

fn level_profile(net: &RadialNetwork) -> Vec<f64> {
    let k = net.levels.len() - 1;
    let mut level_g = vec![0.0; k];
    for e in &net.edges {
        let (la, lb) = (net.level_of(e.a), net.level_of(e.b));
        if la != lb {
            level_g[la.min(lb)] += e.conductance;
        }
    }
    let mut acc = vec![0.0; k + 1];
    for i in 0..k {
        acc[i + 1] = acc[i] + 1.0 / level_g[i];
    }
    let total = acc[k];
    acc.iter().map(|a| a / total).collect()
}

/// Dirichlet problem on the network by Jacobi-preconditioned conjugate
/// gradients, relative residual `1e-10`.
pub fn solve_network_from(net: &RadialNetwork, start: StartingGuess) -> Result<NetworkSolution> {
    let p = net.per_level;
    let k = net.levels.len() - 1;
    let n = (k - 1) * p;
    let fixed = |node: usize| match net.level_of(node) {
        0 => Some(0.0),
        l if l == k => Some(1.0),
        _ => None,
    };
    let mut triplets = Vec::with_capacity(4 * net.edges.len());
    let mut rhs = vec![0.0; n];
    for e in &net.edges {
        match (fixed(e.a), fixed(e.b)) {
            (None, None) => {
                let (a, b) = (e.a - p, e.b - p);
                triplets.extend([(a, a, e.conductance), (b, b, e.conductance), (a, b, -e.conductance), (b, a, -e.conductance)]);
            }
            (None, Some(v)) | (Some(v), None) => {
                let u = if fixed(e.a).is_none() { e.a } else { e.b } - p;
                triplets.push((u, u, e.conductance));
                rhs[u] += e.conductance * v;
            }
            (Some(_), Some(_)) => {}
        }
    }
    let matrix = CsrMatrix::from_triplets(n, triplets);
    let mut x: Vec<f64> = match start {
        StartingGuess::Linear => (0..n).map(|u| (u / p + 1) as f64 / k as f64).collect(),
        StartingGuess::LevelProfile => {
            let profile = level_profile(net);
            if profile.iter().all(|v| v.is_finite()) {
                (0..n).map(|u| profile[u / p + 1]).collect()
            } else {
                (0..n).map(|u| (u / p + 1) as f64 / k as f64).collect()
            }
        }
    };
    let report = pcg(&matrix, &rhs, &mut x, RESIDUAL_TARGET, 10 * n + 1000)?;
    let mut potential = vec![0.0; net.node_count()];
    potential[p..p + n].copy_from_slice(&x);
    potential[k * p..].fill(1.0);
    let mut inflow = 0.0;
    let mut outflow = 0.0;
    for e in &net.edges {
        let (la, lb) = (net.level_of(e.a), net.level_of(e.b));
        let drop = e.conductance * (potential[e.b] - potential[e.a]).abs();
        if (la == 0) != (lb == 0) {
            inflow += drop;
        }
        if (la == k) != (lb == k) {
            outflow += drop;
        }
    }
    Ok(NetworkSolution {
        potential,
        result: ConductanceResult {
            conductance: inflow,
            outflow,
            iterations: report.iterations,
            residual_norm: report.residual_norm,
            rhs_norm: report.rhs_norm,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub resolution: Resolution,
    pub conductance: f64,
    pub iterations: usize,
    /// `|G − cap| / cap` against the continuum capacity.
    pub relative_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub reference: CapacityEstimate,
    pub rows: Vec<StudyRow>,
}

/// Effective conductance over a refinement schedule, compared with the
/// capacity of the same annulus in the model (no mean-curvature drift).
pub fn convergence_study(
    m: usize,
    w: &WarpingDescriptor,
    rho: f64,
    big_r: f64,
    schedule: &[Resolution],
    tol: f64,
) -> Result<ConvergenceStudy> {
    let spec = AnnulusSpec::new(RadialProblem::intrinsic(m, w.clone(), rho)?, big_r)?;
    let reference = drifted_capacity_with(&spec, tol)?;
    let rows = schedule
        .iter()
        .map(|&res| {
            let net = build_network(m, w, rho, big_r, res.radial, res.angular)?;
            let g = effective_conductance(&net)?;
            Ok(StudyRow {
                resolution: res,
                conductance: g.conductance,
                iterations: g.iterations,
                relative_gap: (g.conductance - reference.value).abs() / reference.value,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ConvergenceStudy { reference, rows })
}
