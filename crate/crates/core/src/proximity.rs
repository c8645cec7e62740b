//! Node proximity operators: the first stage of every embedding pipeline.
//!
//! Each operator maps a graph to a dense `n x n` matrix `S` whose entry
//! `S[i][j]` is large when `i` and `j` are close in the graph. Operators
//! built on eigendecompositions or inverses are evaluated one connected
//! component at a time, so proximities between components are exactly zero.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    adjacency, ensure_finite, laplacian, laplacian_pinv, per_component, rw_transition,
    spectral_apply, symmetric_eig, DenseMatrix, Graph,
};

/// Largest condition number accepted when inverting `I + aD - cA`.
pub const MAX_CONDITION: f64 = 1e12;

/// Margin below 1 required for `beta * rho(A)`.
pub const DIVERGENCE_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Operator {
    Ppmi,
    HeatKernel,
    Fabp,
    Ppr,
    LapPinv,
    AdjPower,
    RwPower,
}

impl Operator {
    pub const ALL: [Operator; 7] = [
        Operator::Ppmi,
        Operator::HeatKernel,
        Operator::Fabp,
        Operator::Ppr,
        Operator::LapPinv,
        Operator::AdjPower,
        Operator::RwPower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Operator::Ppmi => "ppmi",
            Operator::HeatKernel => "hk",
            Operator::Fabp => "fabp",
            Operator::Ppr => "ppr",
            Operator::LapPinv => "lap_pinv",
            Operator::AdjPower => "adj",
            Operator::RwPower => "rw",
        }
    }

    pub fn from_name(name: &str) -> Option<Operator> {
        Operator::ALL.into_iter().find(|op| op.name() == name)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which trace term the FaBP "about-half" heuristic uses for `c2`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum FabpC2 {
    /// `c2 = Tr(D^2) - 1`, the form of the original FaBP heuristic.
    #[default]
    TraceDegreeSquared,
    /// `c2 = Tr(D) - 1`.
    TraceDegree,
}

/// A proximity operator together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Proximity {
    /// `vol(G)/(bT) * (sum_{r=1..T} R^r) D^-1`.
    Ppmi { window: usize, negative: f64 },
    /// `exp(-s L)`.
    HeatKernel { scale: f64 },
    /// `(I + aD - cA)^-1`.
    Fabp { a: f64, c: f64 },
    /// `(I - beta M)^-1 (beta M)` with `M = A`, or `M = R` when `normalized`.
    Ppr { beta: f64, normalized: bool },
    /// `L+`.
    LapPinv,
    /// `A^k`.
    AdjPower { k: usize },
    /// `R^k`.
    RwPower { k: usize },
}

impl Proximity {
    pub fn operator(&self) -> Operator {
        match self {
            Proximity::Ppmi { .. } => Operator::Ppmi,
            Proximity::HeatKernel { .. } => Operator::HeatKernel,
            Proximity::Fabp { .. } => Operator::Fabp,
            Proximity::Ppr { .. } => Operator::Ppr,
            Proximity::LapPinv => Operator::LapPinv,
            Proximity::AdjPower { .. } => Operator::AdjPower,
            Proximity::RwPower { .. } => Operator::RwPower,
        }
    }

    pub fn compute(&self, g: &Graph) -> Result<ProximityMatrix> {
        match *self {
            Proximity::Ppmi { window, negative } => ppmi(g, window, negative),
            Proximity::HeatKernel { scale } => heat_kernel(g, scale),
            Proximity::Fabp { a, c } => fabp(g, a, c),
            Proximity::Ppr { beta, normalized } => ppr(g, beta, normalized),
            Proximity::LapPinv => lap_pinv_proximity(g),
            Proximity::AdjPower { k } => adj_power(g, k),
            Proximity::RwPower { k } => rw_power(g, k),
        }
    }
}

impl fmt::Display for Proximity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Proximity::Ppmi { window, negative } => write!(f, "ppmi(T={window}, b={negative})"),
            Proximity::HeatKernel { scale } => write!(f, "hk(s={scale})"),
            Proximity::Fabp { a, c } => write!(f, "fabp(a={a}, c={c})"),
            Proximity::Ppr { beta, normalized } => {
                write!(f, "ppr(beta={beta}{})", if *normalized { ", R" } else { "" })
            }
            Proximity::LapPinv => f.write_str("lap_pinv"),
            Proximity::AdjPower { k } => write!(f, "adj(k={k})"),
            Proximity::RwPower { k } => write!(f, "rw(k={k})"),
        }
    }
}

/// Output of a proximity operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ProximityMatrix {
    pub matrix: DenseMatrix,
    pub params: Proximity,
}

impl ProximityMatrix {
    fn new(matrix: DenseMatrix, params: Proximity) -> Result<Self> {
        ensure_finite(&matrix, "proximity operator")?;
        Ok(ProximityMatrix { matrix, params })
    }

    pub fn operator(&self) -> Operator {
        self.params.operator()
    }
}

fn symmetrize(m: DenseMatrix) -> DenseMatrix {
    (&m + m.transpose()) * 0.5
}

/// Positive pointwise mutual information matrix, computed exactly from
/// `window` dense powers of the transition matrix.
pub fn ppmi(g: &Graph, window: usize, negative: f64) -> Result<ProximityMatrix> {
    if window < 1 {
        return Err(Error::InvalidParameter("PPMI window must be >= 1".into()));
    }
    if !(negative >= 1.0 && negative.is_finite()) {
        return Err(Error::InvalidParameter(
            "PPMI negative-sampling parameter must be >= 1".into(),
        ));
    }
    let r = rw_transition(g)?;
    let degrees = g.degrees();
    let vol: f64 = degrees.iter().sum();
    let mut power = r.clone();
    let mut sum = r.clone();
    for _ in 1..window {
        power = &power * &r;
        sum += &power;
    }
    for (j, d) in degrees.iter().enumerate() {
        sum.column_mut(j).scale_mut(1.0 / d);
    }
    sum *= vol / (negative * window as f64);
    ProximityMatrix::new(
        symmetrize(sum),
        Proximity::Ppmi { window, negative },
    )
}

/// Heat kernel `exp(-s L)`.
pub fn heat_kernel(g: &Graph, scale: f64) -> Result<ProximityMatrix> {
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "heat kernel scale must be >= 0, got {scale}"
        )));
    }
    let s = per_component(g, |c| {
        let (values, vectors) = symmetric_eig(&laplacian(c))?;
        Ok(spectral_apply(&values, &vectors, |lambda| (-scale * lambda).exp()))
    })?;
    ProximityMatrix::new(s, Proximity::HeatKernel { scale })
}

/// Linearized belief propagation `(I + aD - cA)^-1`.
pub fn fabp(g: &Graph, a: f64, c: f64) -> Result<ProximityMatrix> {
    if !(a.is_finite() && c.is_finite()) {
        return Err(Error::InvalidParameter("FaBP parameters must be finite".into()));
    }
    let s = per_component(g, |comp| {
        let mut m = -adjacency(comp) * c;
        for (i, d) in comp.degrees().into_iter().enumerate() {
            m[(i, i)] = 1.0 + a * d;
        }
        let (values, vectors) = symmetric_eig(&m)?;
        let largest = values.amax();
        let smallest = values.iter().fold(f64::INFINITY, |acc, x| acc.min(x.abs()));
        let condition = largest / smallest;
        if !(condition < MAX_CONDITION) {
            return Err(Error::Singular { condition });
        }
        Ok(spectral_apply(&values, &vectors, |lambda| 1.0 / lambda))
    })?;
    ProximityMatrix::new(s, Proximity::Fabp { a, c })
}

/// The FaBP "about-half" homophily heuristic. Returns `(a, c)`.
pub fn fabp_default_params(g: &Graph, variant: FabpC2) -> Result<(f64, f64)> {
    if g.edge_count() == 0 {
        return Err(Error::InvalidParameter(
            "FaBP heuristic needs at least one edge".into(),
        ));
    }
    let h = fabp_homophily(g, variant)?;
    let h2 = h * h;
    let denom = 1.0 - 4.0 * h2;
    Ok((4.0 * h2 / denom, 2.0 * h / denom))
}

/// The homophily factor `h_h` behind [`fabp_default_params`].
pub fn fabp_homophily(g: &Graph, variant: FabpC2) -> Result<f64> {
    let degrees = g.degrees();
    let trace_d: f64 = degrees.iter().sum();
    let c1 = trace_d + 2.0;
    let c2 = match variant {
        FabpC2::TraceDegreeSquared => degrees.iter().map(|d| d * d).sum::<f64>() - 1.0,
        FabpC2::TraceDegree => trace_d - 1.0,
    };
    if c2 <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "FaBP heuristic is degenerate (c2 = {c2})"
        )));
    }
    let h = ((-c1 + (c1 * c1 + 4.0 * c2).sqrt()) / (8.0 * c2)).sqrt();
    if !(h > 0.0 && h < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "FaBP homophily factor {h} outside (0, 0.5)"
        )));
    }
    Ok(h)
}

/// Personalized-PageRank style proximity `(I - beta M)^-1 (beta M)`, i.e. the
/// Neumann series `sum_{r>=1} (beta M)^r`. `M = A` by default; `normalized`
/// substitutes the transition matrix `R`.
pub fn ppr(g: &Graph, beta: f64, normalized: bool) -> Result<ProximityMatrix> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "PPR decay must lie in (0, 1), got {beta}"
        )));
    }
    let params = Proximity::Ppr { beta, normalized };
    if normalized {
        // rho(R) = 1 for any graph without isolated nodes.
        let r = rw_transition(g)?;
        check_neumann(beta)?;
        let n = g.node_count();
        let rhs = &r * beta;
        let system = DMatrix::identity(n, n) - &rhs;
        let s = system
            .lu()
            .solve(&rhs)
            .ok_or(Error::Singular { condition: f64::INFINITY })?;
        return ProximityMatrix::new(s, params);
    }
    let s = per_component(g, |c| {
        let (values, vectors) = symmetric_eig(&adjacency(c))?;
        check_neumann(beta * values.amax())?;
        Ok(spectral_apply(&values, &vectors, |lambda| {
            beta * lambda / (1.0 - beta * lambda)
        }))
    })?;
    ProximityMatrix::new(s, params)
}

fn check_neumann(product: f64) -> Result<()> {
    if product >= 1.0 - DIVERGENCE_MARGIN {
        Err(Error::Divergent { product })
    } else {
        Ok(())
    }
}

/// Largest eigenvalue magnitude of `A`.
pub fn spectral_radius(g: &Graph) -> Result<f64> {
    let (values, _) = symmetric_eig(&adjacency(g))?;
    Ok(if values.is_empty() { 0.0 } else { values.amax() })
}

pub fn lap_pinv_proximity(g: &Graph) -> Result<ProximityMatrix> {
    ProximityMatrix::new(laplacian_pinv(g)?, Proximity::LapPinv)
}

fn matrix_power(base: &DenseMatrix, k: usize) -> DenseMatrix {
    let mut out = base.clone();
    for _ in 1..k {
        out = &out * base;
    }
    out
}

pub fn adj_power(g: &Graph, k: usize) -> Result<ProximityMatrix> {
    if k < 1 {
        return Err(Error::InvalidParameter("matrix power must be >= 1".into()));
    }
    ProximityMatrix::new(matrix_power(&adjacency(g), k), Proximity::AdjPower { k })
}

pub fn rw_power(g: &Graph, k: usize) -> Result<ProximityMatrix> {
    if k < 1 {
        return Err(Error::InvalidParameter("matrix power must be >= 1".into()));
    }
    ProximityMatrix::new(matrix_power(&rw_transition(g)?, k), Proximity::RwPower { k })
}
