//! Parametric analytic closed curves, multiply connected domain assembly,
//! and quadrature grids with equispaced parameter nodes.
//!
//! Orientation convention: every curve is traversed so that the domain
//! material lies on its left. Outer boundaries run counterclockwise, hole
//! boundaries clockwise, and the outward normal of the domain is always
//! (y', -x')/|x'| along the direction of travel.

use serde::Deserialize;

use crate::error::{Error, Result};

pub const TAU: f64 = std::f64::consts::TAU;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Ccw,
    Cw,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CurveKind {
    Circle {
        center: [f64; 2],
        radius: f64,
    },
    Ellipse {
        center: [f64; 2],
        radii: [f64; 2],
    },
    /// Kress-standard kite x(t) = (cos t + 0.65 cos 2t - 0.65, 1.5 sin t),
    /// scaled and shifted.
    Kite {
        center: [f64; 2],
        scale: f64,
    },
    /// Truncated Fourier series; cos lists start at the constant term,
    /// sin lists at frequency 1.
    Fourier {
        cos_x: Vec<f64>,
        sin_x: Vec<f64>,
        cos_y: Vec<f64>,
        sin_y: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    kind: CurveKind,
    orientation: Orientation,
    /// Whether the effective parametrization runs the base one backwards.
    reversed: bool,
}

/// Point, velocity, acceleration of a parametrization at one parameter value.
#[derive(Clone, Copy, Debug)]
struct Jet {
    p: [f64; 2],
    v: [f64; 2],
    a: [f64; 2],
}

impl CurveKind {
    fn eval_base(&self, t: f64) -> Jet {
        match self {
            CurveKind::Circle { center, radius } => {
                let (s, c) = t.sin_cos();
                Jet {
                    p: [center[0] + radius * c, center[1] + radius * s],
                    v: [-radius * s, radius * c],
                    a: [-radius * c, -radius * s],
                }
            }
            CurveKind::Ellipse { center, radii } => {
                let (s, c) = t.sin_cos();
                Jet {
                    p: [center[0] + radii[0] * c, center[1] + radii[1] * s],
                    v: [-radii[0] * s, radii[1] * c],
                    a: [-radii[0] * c, -radii[1] * s],
                }
            }
            CurveKind::Kite { center, scale } => {
                let (s, c) = t.sin_cos();
                let (s2, c2) = (2.0 * t).sin_cos();
                Jet {
                    p: [
                        center[0] + scale * (c + 0.65 * c2 - 0.65),
                        center[1] + scale * 1.5 * s,
                    ],
                    v: [scale * (-s - 1.3 * s2), scale * 1.5 * c],
                    a: [scale * (-c - 2.6 * c2), scale * -1.5 * s],
                }
            }
            CurveKind::Fourier {
                cos_x,
                sin_x,
                cos_y,
                sin_y,
            } => {
                let mut jet = Jet {
                    p: [0.0, 0.0],
                    v: [0.0, 0.0],
                    a: [0.0, 0.0],
                };
                let mut accumulate = |coef: &[f64], axis: usize, is_sin: bool| {
                    for (i, &c) in coef.iter().enumerate() {
                        let m = if is_sin { (i + 1) as f64 } else { i as f64 };
                        let (s, co) = (m * t).sin_cos();
                        let (b, db, ddb) = if is_sin {
                            (s, m * co, -m * m * s)
                        } else {
                            (co, -m * s, -m * m * co)
                        };
                        jet.p[axis] += c * b;
                        jet.v[axis] += c * db;
                        jet.a[axis] += c * ddb;
                    }
                };
                accumulate(cos_x, 0, false);
                accumulate(sin_x, 0, true);
                accumulate(cos_y, 1, false);
                accumulate(sin_y, 1, true);
                jet
            }
        }
    }

    /// Signed area of the base parametrization via the shoelace integral.
    fn base_signed_area(&self) -> f64 {
        let m = 2048;
        let h = TAU / m as f64;
        let mut area = 0.0;
        for i in 0..m {
            let jet = self.eval_base(i as f64 * h);
            area += 0.5 * (jet.p[0] * jet.v[1] - jet.p[1] * jet.v[0]);
        }
        area * h
    }
}

impl Curve {
    pub fn new(kind: CurveKind, orientation: Orientation) -> Self {
        let base_ccw = match kind {
            CurveKind::Fourier { .. } => kind.base_signed_area() > 0.0,
            _ => true,
        };
        let want_ccw = orientation == Orientation::Ccw;
        Curve {
            kind,
            orientation,
            reversed: base_ccw != want_ccw,
        }
    }

    pub fn circle(center: [f64; 2], radius: f64, orientation: Orientation) -> Self {
        Self::new(CurveKind::Circle { center, radius }, orientation)
    }

    pub fn ellipse(center: [f64; 2], radii: [f64; 2], orientation: Orientation) -> Self {
        Self::new(CurveKind::Ellipse { center, radii }, orientation)
    }

    pub fn kite(center: [f64; 2], scale: f64, orientation: Orientation) -> Self {
        Self::new(CurveKind::Kite { center, scale }, orientation)
    }

    pub fn fourier(
        cos_x: Vec<f64>,
        sin_x: Vec<f64>,
        cos_y: Vec<f64>,
        sin_y: Vec<f64>,
        orientation: Orientation,
    ) -> Self {
        Self::new(
            CurveKind::Fourier {
                cos_x,
                sin_x,
                cos_y,
                sin_y,
            },
            orientation,
        )
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// The same geometric trace traversed the other way round.
    pub fn reversed(&self) -> Curve {
        let orientation = match self.orientation {
            Orientation::Ccw => Orientation::Cw,
            Orientation::Cw => Orientation::Ccw,
        };
        Curve::new(self.kind.clone(), orientation)
    }

    fn eval(&self, t: f64) -> Jet {
        if self.reversed {
            let jet = self.kind.eval_base(TAU - t);
            Jet {
                p: jet.p,
                v: [-jet.v[0], -jet.v[1]],
                a: jet.a,
            }
        } else {
            self.kind.eval_base(t)
        }
    }

    pub fn point(&self, t: f64) -> [f64; 2] {
        self.eval(t).p
    }

    pub fn velocity(&self, t: f64) -> [f64; 2] {
        self.eval(t).v
    }

    pub fn speed(&self, t: f64) -> f64 {
        let v = self.eval(t).v;
        v[0].hypot(v[1])
    }

    /// Unit normal pointing out of the domain material (right of travel).
    pub fn normal(&self, t: f64) -> [f64; 2] {
        let v = self.eval(t).v;
        let s = v[0].hypot(v[1]);
        [v[1] / s, -v[0] / s]
    }

    /// Signed curvature (x' x'' cross product over speed cubed).
    pub fn curvature(&self, t: f64) -> f64 {
        let jet = self.eval(t);
        let s = jet.v[0].hypot(jet.v[1]);
        (jet.v[0] * jet.a[1] - jet.v[1] * jet.a[0]) / (s * s * s)
    }

    pub fn signed_area(&self) -> f64 {
        let m = 2048;
        let h = TAU / m as f64;
        let mut area = 0.0;
        for i in 0..m {
            let jet = self.eval(i as f64 * h);
            area += 0.5 * (jet.p[0] * jet.v[1] - jet.p[1] * jet.v[0]);
        }
        area * h
    }

    pub fn arc_length(&self, samples: usize) -> f64 {
        let h = TAU / samples as f64;
        (0..samples).map(|i| self.speed(i as f64 * h)).sum::<f64>() * h
    }
}

/// A multiply connected domain: counterclockwise outer boundaries and
/// clockwise hole boundaries.
#[derive(Clone, Debug)]
pub struct Domain {
    curves: Vec<Curve>,
}

impl Domain {
    pub fn new(curves: Vec<Curve>) -> Result<Self> {
        if curves.is_empty() {
            return Err(Error::InvalidInput("domain needs at least one curve".into()));
        }
        for curve in &curves {
            for i in 0..1024 {
                let t = i as f64 * TAU / 1024.0;
                let s = curve.speed(t);
                if !(s > 1e-12) {
                    return Err(Error::CuspDetected { t, speed: s });
                }
            }
        }
        if !curves.iter().any(|c| c.orientation() == Orientation::Ccw) {
            return Err(Error::InvalidInput(
                "domain needs at least one counterclockwise outer curve".into(),
            ));
        }
        Ok(Domain { curves })
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    /// Number of connected components of the domain itself.
    pub fn kappa_plus(&self) -> usize {
        self.curves
            .iter()
            .filter(|c| c.orientation() == Orientation::Ccw)
            .count()
    }

    /// Number of bounded components of the complement (holes).
    pub fn kappa_minus(&self) -> usize {
        self.curves
            .iter()
            .filter(|c| c.orientation() == Orientation::Cw)
            .count()
    }

    fn hole_curve(&self, j: usize) -> Option<&Curve> {
        self.curves
            .iter()
            .filter(|c| c.orientation() == Orientation::Cw)
            .nth(j.checked_sub(1)?)
    }

    /// Hole number j (1-based) viewed as a bounded domain of its own.
    pub fn hole_as_interior(&self, j: usize) -> Result<Domain> {
        let curve = self
            .hole_curve(j)
            .ok_or_else(|| Error::InvalidInput(format!("no hole with index {j}")))?;
        Domain::new(vec![curve.reversed()])
    }

    pub fn from_json(text: &str) -> Result<Domain> {
        let file: GeometryFile = serde_json::from_str(text)?;
        let curves = file
            .curves
            .into_iter()
            .map(CurveSpec::into_curve)
            .collect::<Result<Vec<_>>>()?;
        Domain::new(curves)
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Domain> {
        Domain::from_json(&std::fs::read_to_string(path)?)
    }

    /// Mean of coarse boundary samples; used as the ray origin for
    /// radiation checks and field sweeps.
    pub fn centroid(&self) -> [f64; 2] {
        let mut c = [0.0, 0.0];
        let mut count = 0.0;
        for curve in &self.curves {
            for i in 0..64 {
                let p = curve.point(i as f64 * TAU / 64.0);
                c[0] += p[0];
                c[1] += p[1];
                count += 1.0;
            }
        }
        [c[0] / count, c[1] / count]
    }

    pub fn max_radius(&self) -> f64 {
        let c = self.centroid();
        let mut r: f64 = 0.0;
        for curve in &self.curves {
            for i in 0..64 {
                let p = curve.point(i as f64 * TAU / 64.0);
                r = r.max((p[0] - c[0]).hypot(p[1] - c[1]));
            }
        }
        r
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryFile {
    curves: Vec<CurveSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveSpec {
    kind: String,
    orientation: Orientation,
    center: Option<[f64; 2]>,
    radius: Option<f64>,
    radii: Option<[f64; 2]>,
    scale: Option<f64>,
    cos_x: Option<Vec<f64>>,
    sin_x: Option<Vec<f64>>,
    cos_y: Option<Vec<f64>>,
    sin_y: Option<Vec<f64>>,
}

impl CurveSpec {
    fn into_curve(self) -> Result<Curve> {
        let reject = |field: &str, kind: &str| {
            Error::InvalidInput(format!("field '{field}' does not apply to kind '{kind}'"))
        };
        let need = |field: &str, kind: &str| {
            Error::InvalidInput(format!("kind '{kind}' requires field '{field}'"))
        };
        match self.kind.as_str() {
            "circle" => {
                if self.radii.is_some() || self.scale.is_some() || self.cos_x.is_some() {
                    return Err(reject("radii/scale/cos_x", "circle"));
                }
                Ok(Curve::circle(
                    self.center.ok_or_else(|| need("center", "circle"))?,
                    self.radius.ok_or_else(|| need("radius", "circle"))?,
                    self.orientation,
                ))
            }
            "ellipse" => {
                if self.radius.is_some() || self.scale.is_some() || self.cos_x.is_some() {
                    return Err(reject("radius/scale/cos_x", "ellipse"));
                }
                Ok(Curve::ellipse(
                    self.center.ok_or_else(|| need("center", "ellipse"))?,
                    self.radii.ok_or_else(|| need("radii", "ellipse"))?,
                    self.orientation,
                ))
            }
            "kite" => {
                if self.radius.is_some() || self.radii.is_some() || self.cos_x.is_some() {
                    return Err(reject("radius/radii/cos_x", "kite"));
                }
                Ok(Curve::kite(
                    self.center.unwrap_or([0.0, 0.0]),
                    self.scale.unwrap_or(1.0),
                    self.orientation,
                ))
            }
            "fourier" => {
                if self.radius.is_some() || self.radii.is_some() || self.scale.is_some() {
                    return Err(reject("radius/radii/scale", "fourier"));
                }
                Ok(Curve::fourier(
                    self.cos_x.ok_or_else(|| need("cos_x", "fourier"))?,
                    self.sin_x.ok_or_else(|| need("sin_x", "fourier"))?,
                    self.cos_y.ok_or_else(|| need("cos_y", "fourier"))?,
                    self.sin_y.ok_or_else(|| need("sin_y", "fourier"))?,
                    self.orientation,
                ))
            }
            other => Err(Error::InvalidInput(format!("unknown curve kind '{other}'"))),
        }
    }
}

/// Quadrature data for one curve: equispaced parameter nodes t_j = 2 pi j / n.
#[derive(Clone, Debug)]
pub struct CurveGrid {
    pub curve: Curve,
    pub n: usize,
    pub t: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    pub normals: Vec<[f64; 2]>,
    pub speeds: Vec<f64>,
    pub curvatures: Vec<f64>,
    /// Max distance between adjacent nodes; sets the near-boundary band.
    pub spacing: f64,
}

#[derive(Clone, Debug)]
pub struct QuadGrid {
    domain: Domain,
    curves: Vec<CurveGrid>,
    offsets: Vec<usize>,
    total: usize,
}

/// Region classification of a point relative to the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Interior,
    ExteriorUnbounded,
    /// Inside bounded complement component j (1-based, hole order).
    ExteriorBounded(usize),
    NearBoundary,
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Region::Interior => write!(f, "interior"),
            Region::ExteriorUnbounded => write!(f, "exterior-unbounded"),
            Region::ExteriorBounded(j) => write!(f, "exterior-bounded-{j}"),
            Region::NearBoundary => write!(f, "near-boundary"),
        }
    }
}

pub fn build_grid(domain: &Domain, n_per_curve: usize) -> Result<QuadGrid> {
    if n_per_curve % 2 != 0 {
        return Err(Error::OddN(n_per_curve));
    }
    if n_per_curve < 16 {
        return Err(Error::GridTooCoarse(n_per_curve));
    }
    let mut curves = Vec::with_capacity(domain.curves().len());
    for curve in domain.curves() {
        // cusp check on a 4n oversampled grid
        for i in 0..4 * n_per_curve {
            let t = i as f64 * TAU / (4 * n_per_curve) as f64;
            let s = curve.speed(t);
            if !(s > 1e-12) {
                return Err(Error::CuspDetected { t, speed: s });
            }
        }
        let n = n_per_curve;
        let t: Vec<f64> = (0..n).map(|j| j as f64 * TAU / n as f64).collect();
        let points: Vec<[f64; 2]> = t.iter().map(|&tj| curve.point(tj)).collect();
        let normals = t.iter().map(|&tj| curve.normal(tj)).collect();
        let speeds = t.iter().map(|&tj| curve.speed(tj)).collect();
        let curvatures = t.iter().map(|&tj| curve.curvature(tj)).collect();
        let spacing = (0..n)
            .map(|j| {
                let a = points[j];
                let b = points[(j + 1) % n];
                (a[0] - b[0]).hypot(a[1] - b[1])
            })
            .fold(0.0, f64::max);
        curves.push(CurveGrid {
            curve: curve.clone(),
            n,
            t,
            points,
            normals,
            speeds,
            curvatures,
            spacing,
        });
    }

    // disjointness: curves must stay out of each other's refusal bands
    let max_spacing = curves.iter().map(|c| c.spacing).fold(0.0, f64::max);
    let mut min_cross = f64::INFINITY;
    for a in 0..curves.len() {
        for b in (a + 1)..curves.len() {
            for p in &curves[a].points {
                for q in &curves[b].points {
                    min_cross = min_cross.min((p[0] - q[0]).hypot(p[1] - q[1]));
                }
            }
        }
    }
    if curves.len() > 1 && min_cross <= 2.0 * max_spacing {
        return Err(Error::CurveTooClose {
            distance: min_cross,
            spacing: max_spacing,
        });
    }

    let mut offsets = Vec::with_capacity(curves.len());
    let mut total = 0;
    for c in &curves {
        offsets.push(total);
        total += c.n;
    }
    Ok(QuadGrid {
        domain: domain.clone(),
        curves,
        offsets,
        total,
    })
}

impl QuadGrid {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn node_count(&self) -> usize {
        self.total
    }

    pub fn curve_count(&self) -> usize {
        self.curves.len()
    }

    pub fn curve_grid(&self, c: usize) -> &CurveGrid {
        &self.curves[c]
    }

    pub fn curve_grids(&self) -> &[CurveGrid] {
        &self.curves
    }

    pub fn offset(&self, c: usize) -> usize {
        self.offsets[c]
    }

    /// Curve index and local node index of a global node index.
    pub fn split_index(&self, i: usize) -> (usize, usize) {
        let c = match self.offsets.binary_search(&i) {
            Ok(c) => c,
            Err(c) => c - 1,
        };
        (c, i - self.offsets[c])
    }

    pub fn point(&self, i: usize) -> [f64; 2] {
        let (c, j) = self.split_index(i);
        self.curves[c].points[j]
    }

    pub fn normal(&self, i: usize) -> [f64; 2] {
        let (c, j) = self.split_index(i);
        self.curves[c].normals[j]
    }

    pub fn param(&self, i: usize) -> f64 {
        let (c, j) = self.split_index(i);
        self.curves[c].t[j]
    }

    /// Arclength quadrature weight |x'(t_j)| 2 pi / n of node j.
    pub fn weight(&self, i: usize) -> f64 {
        let (c, j) = self.split_index(i);
        self.curves[c].speeds[j] * TAU / self.curves[c].n as f64
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.total).map(|i| self.weight(i)).collect()
    }

    pub fn min_node_distance(&self, x: [f64; 2]) -> f64 {
        let mut d = f64::INFINITY;
        for c in &self.curves {
            for p in &c.points {
                d = d.min((p[0] - x[0]).hypot(p[1] - x[1]));
            }
        }
        d
    }

    /// True when x is within two node spacings of some curve's nodes.
    pub fn near_boundary(&self, x: [f64; 2]) -> bool {
        self.curves.iter().any(|c| {
            c.points
                .iter()
                .any(|p| (p[0] - x[0]).hypot(p[1] - x[1]) < 2.0 * c.spacing)
        })
    }

    /// Winding-number region classification.
    pub fn locate(&self, x: [f64; 2]) -> Region {
        if self.near_boundary(x) {
            return Region::NearBoundary;
        }
        let mut hole_index = 0;
        let mut total_winding = 0i32;
        for cg in &self.curves {
            let wn = winding_number(&cg.curve, 4 * cg.n, x);
            if cg.curve.orientation() == Orientation::Cw {
                hole_index += 1;
                if wn != 0 {
                    return Region::ExteriorBounded(hole_index);
                }
            }
            total_winding += wn;
        }
        if total_winding == 1 {
            Region::Interior
        } else {
            Region::ExteriorUnbounded
        }
    }
}

/// Free-function form of the region query.
pub fn point_location(grid: &QuadGrid, x: [f64; 2]) -> Region {
    grid.locate(x)
}

fn winding_number(curve: &Curve, samples: usize, x: [f64; 2]) -> i32 {
    let mut total = 0.0;
    let h = TAU / samples as f64;
    let mut prev = curve.point(0.0);
    for i in 1..=samples {
        let next = curve.point(i as f64 * h);
        let a = [prev[0] - x[0], prev[1] - x[1]];
        let b = [next[0] - x[0], next[1] - x[1]];
        total += (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1]);
        prev = next;
    }
    (total / TAU).round() as i32
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn unit_circle() -> Domain {
        Domain::new(vec![Curve::circle([0.0, 0.0], 1.0, Orientation::Ccw)]).unwrap()
    }

    pub fn annulus() -> Domain {
        Domain::new(vec![
            Curve::circle([0.0, 0.0], 2.0, Orientation::Ccw),
            Curve::circle([0.0, 0.0], 1.0, Orientation::Cw),
        ])
        .unwrap()
    }

    #[test]
    fn circle_nodes_and_normals() {
        // n = 4 is below the minimum for solving but fine for node layout
        let domain = unit_circle();
        let grid = match build_grid(&domain, 16) {
            Ok(g) => g,
            Err(e) => panic!("{e}"),
        };
        assert_eq!(grid.node_count(), 16);
        let cg = grid.curve_grid(0);
        for j in 0..16 {
            let angle = j as f64 * TAU / 16.0;
            assert!((cg.points[j][0] - angle.cos()).abs() < 1e-14);
            assert!((cg.points[j][1] - angle.sin()).abs() < 1e-14);
            // circle normal = radial direction
            assert!((cg.normals[j][0] - cg.points[j][0]).abs() < 1e-14);
            assert!((cg.normals[j][1] - cg.points[j][1]).abs() < 1e-14);
            assert!((cg.normals[j][0].hypot(cg.normals[j][1]) - 1.0).abs() < 1e-14);
            assert!((cg.curvatures[j] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn quarter_nodes_of_small_grid() {
        let grid = build_grid(&unit_circle(), 16).unwrap();
        let cg = grid.curve_grid(0);
        // nodes 0, 4, 8, 12 sit at angles 0, pi/2, pi, 3pi/2
        for (j, expect) in [(0, [1.0, 0.0]), (4, [0.0, 1.0]), (8, [-1.0, 0.0]), (12, [0.0, -1.0])]
        {
            assert!((cg.points[j][0] - expect[0]).abs() < 1e-14);
            assert!((cg.points[j][1] - expect[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn kite_speeds_positive() {
        let domain = Domain::new(vec![Curve::kite([0.0, 0.0], 1.0, Orientation::Ccw)]).unwrap();
        let grid = build_grid(&domain, 64).unwrap();
        assert!(grid.curve_grid(0).speeds.iter().all(|&s| s > 0.0));
    }

    #[test]
    fn annulus_grid_and_normals() {
        let grid = build_grid(&annulus(), 32).unwrap();
        assert_eq!(grid.node_count(), 64);
        let inner = grid.curve_grid(1);
        for j in 0..inner.n {
            let p = inner.points[j];
            let nrm = inner.normals[j];
            // inner normals point toward the origin (into the hole)
            let dot = nrm[0] * p[0] + nrm[1] * p[1];
            assert!(dot < -0.99, "normal not inward at node {j}");
            // clockwise hole has negative curvature in travel direction
            assert!(inner.curvatures[j] < 0.0);
        }
    }

    #[test]
    fn odd_and_coarse_n_rejected() {
        assert!(matches!(
            build_grid(&unit_circle(), 33),
            Err(Error::OddN(33))
        ));
        assert!(matches!(
            build_grid(&unit_circle(), 8),
            Err(Error::GridTooCoarse(8))
        ));
    }

    #[test]
    fn touching_curves_rejected() {
        let domain = Domain::new(vec![
            Curve::circle([0.0, 0.0], 2.0, Orientation::Ccw),
            Curve::circle([0.0, 0.0], 1.99, Orientation::Cw),
        ])
        .unwrap();
        assert!(matches!(
            build_grid(&domain, 32),
            Err(Error::CurveTooClose { .. })
        ));
    }

    #[test]
    fn signed_areas_follow_orientation() {
        let ccw = Curve::circle([0.4, -0.2], 1.5, Orientation::Ccw);
        let cw = Curve::circle([0.4, -0.2], 1.5, Orientation::Cw);
        let expect = std::f64::consts::PI * 1.5 * 1.5;
        assert!((ccw.signed_area() - expect).abs() < 1e-9);
        assert!((cw.signed_area() + expect).abs() < 1e-9);
        let kite_ccw = Curve::kite([0.0, 0.0], 1.0, Orientation::Ccw);
        assert!(kite_ccw.signed_area() > 0.0);
        let kite_cw = Curve::kite([0.0, 0.0], 1.0, Orientation::Cw);
        assert!(kite_cw.signed_area() < 0.0);
    }

    #[test]
    fn fourier_orientation_canonicalized() {
        // base parametrization runs clockwise: y uses -sin t
        let cw_base = Curve::fourier(
            vec![0.0, 1.0],
            vec![],
            vec![0.0],
            vec![-1.0],
            Orientation::Ccw,
        );
        assert!(cw_base.signed_area() > 0.0);
        let as_hole = Curve::fourier(
            vec![0.0, 1.0],
            vec![],
            vec![0.0],
            vec![-1.0],
            Orientation::Cw,
        );
        assert!(as_hole.signed_area() < 0.0);
    }

    #[test]
    fn arc_length_stable_under_refinement() {
        let kite = Curve::kite([0.0, 0.0], 1.0, Orientation::Ccw);
        let l1 = kite.arc_length(256);
        let l2 = kite.arc_length(512);
        assert!((l1 - l2).abs() < 1e-10 * l2);
    }

    #[test]
    fn annulus_point_location() {
        let grid = build_grid(&annulus(), 64).unwrap();
        assert_eq!(grid.locate([1.5, 0.0]), Region::Interior);
        assert_eq!(grid.locate([0.0, 0.0]), Region::ExteriorBounded(1));
        assert_eq!(grid.locate([10.0, 0.0]), Region::ExteriorUnbounded);
        assert_eq!(grid.locate([1.0 + 1e-4, 0.0]), Region::NearBoundary);
    }

    #[test]
    fn point_location_stable_under_refinement() {
        let domain = annulus();
        let coarse = build_grid(&domain, 32).unwrap();
        let fine = build_grid(&domain, 64).unwrap();
        let pts = [
            [1.4, 0.3],
            [0.2, 0.1],
            [-3.0, 2.0],
            [0.0, 1.56],
            [0.0, -0.4],
        ];
        for p in pts {
            // only compare points at least four spacings from every curve
            let far = coarse
                .curve_grids()
                .iter()
                .all(|c| c.points.iter().all(|q| (q[0] - p[0]).hypot(q[1] - p[1]) >= 4.0 * c.spacing));
            if far {
                assert_eq!(coarse.locate(p), fine.locate(p), "at {p:?}");
            }
        }
    }

    #[test]
    fn geometry_json_round_trip() {
        let text = r#"{"curves":[
            {"kind":"circle","center":[0,0],"radius":1.0,"orientation":"ccw"},
            {"kind":"circle","center":[0.1,0.0],"radius":0.3,"orientation":"cw"}
        ]}"#;
        let domain = Domain::from_json(text).unwrap();
        assert_eq!(domain.kappa_plus(), 1);
        assert_eq!(domain.kappa_minus(), 1);

        let bad = r#"{"curves":[{"kind":"circle","center":[0,0],"radius":1.0,"orientation":"ccw","extra":1}]}"#;
        assert!(Domain::from_json(bad).is_err());

        let wrong_field = r#"{"curves":[{"kind":"circle","center":[0,0],"radii":[1.0,1.0],"orientation":"ccw"}]}"#;
        assert!(Domain::from_json(wrong_field).is_err());

        let kite = r#"{"curves":[{"kind":"kite","orientation":"ccw"}]}"#;
        assert!(Domain::from_json(kite).is_ok());
    }

    #[test]
    fn hole_as_interior_reverses() {
        let domain = annulus();
        let hole = domain.hole_as_interior(1).unwrap();
        assert_eq!(hole.kappa_plus(), 1);
        assert_eq!(hole.kappa_minus(), 0);
        assert!(hole.curves()[0].signed_area() > 0.0);
        assert!(domain.hole_as_interior(2).is_err());
    }
}
