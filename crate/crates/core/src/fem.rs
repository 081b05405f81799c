//! Conforming P1 finite elements for the coupled eigenvalue on 2-D
//! polygonal and perturbed-disk domains.
//!
//! The discrete pencil keeps independent surface unknowns at the boundary
//! vertices; the exchange term `∫_Σ (u - v)²` is what ties them to the bulk
//! trace, mirroring the continuous formulation. The surface Laplace-Beltrami
//! operator is the 1-D P1 stiffness along the boundary polyline with edge
//! arc lengths, so the geometric error is O(h²) like the rest of the
//! discretization.

use crate::linalg::{self, SolveOptions, SparseSym};
use std::collections::HashMap;
use std::io::{BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FemError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("mesh quality failure: min angle {min_angle_deg:.2}° below 15°")]
    MeshQualityFailure { min_angle_deg: f64 },
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("mesh file parse error at line {line}: {detail}")]
    ParseError { line: usize, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
}

/// Conforming triangulation with a single ordered boundary loop.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    /// positively oriented vertex-index triples
    pub triangles: Vec<[usize; 3]>,
    /// ordered vertex indices of the closed boundary polyline
    pub boundary_loop: Vec<usize>,
}

fn tri_area(p: [f64; 2], q: [f64; 2], r: [f64; 2]) -> f64 {
    0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
}

impl Mesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                tri_area(
                    self.vertices[t[0]],
                    self.vertices[t[1]],
                    self.vertices[t[2]],
                )
            })
            .sum()
    }

    pub fn perimeter(&self) -> f64 {
        self.boundary_edge_lengths().iter().sum()
    }

    /// Arc length of each boundary edge `(loop[i], loop[i+1])`.
    pub fn boundary_edge_lengths(&self) -> Vec<f64> {
        let n = self.boundary_loop.len();
        (0..n)
            .map(|i| {
                let a = self.vertices[self.boundary_loop[i]];
                let b = self.vertices[self.boundary_loop[(i + 1) % n]];
                ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
            })
            .collect()
    }

    pub fn min_angle_deg(&self) -> f64 {
        let mut min_angle = f64::INFINITY;
        for t in &self.triangles {
            let p = [
                self.vertices[t[0]],
                self.vertices[t[1]],
                self.vertices[t[2]],
            ];
            for v in 0..3 {
                let a = p[v];
                let b = p[(v + 1) % 3];
                let c = p[(v + 2) % 3];
                let u = [b[0] - a[0], b[1] - a[1]];
                let w = [c[0] - a[0], c[1] - a[1]];
                let dot = u[0] * w[0] + u[1] * w[1];
                let nu = (u[0] * u[0] + u[1] * u[1]).sqrt();
                let nw = (w[0] * w[0] + w[1] * w[1]).sqrt();
                let cos = (dot / (nu * nw)).clamp(-1.0, 1.0);
                min_angle = min_angle.min(cos.acos().to_degrees());
            }
        }
        min_angle
    }

    /// Structural invariants: positive areas, conformity, and a boundary
    /// that is exactly the stored loop.
    pub fn validate(&self) -> Result<(), FemError> {
        for (ti, t) in self.triangles.iter().enumerate() {
            if tri_area(
                self.vertices[t[0]],
                self.vertices[t[1]],
                self.vertices[t[2]],
            ) <= 0.0
            {
                return Err(FemError::InvalidMesh(format!(
                    "triangle {ti} not positively oriented"
                )));
            }
        }
        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                let key = (a.min(b), a.max(b));
                *edge_count.entry(key).or_insert(0) += 1;
            }
        }
        if let Some((e, c)) = edge_count.iter().find(|(_, &c)| c > 2) {
            return Err(FemError::InvalidMesh(format!(
                "edge {e:?} shared by {c} triangles"
            )));
        }
        let boundary_edges: std::collections::HashSet<(usize, usize)> = edge_count
            .iter()
            .filter(|(_, &c)| c == 1)
            .map(|(&e, _)| e)
            .collect();
        let n = self.boundary_loop.len();
        if boundary_edges.len() != n {
            return Err(FemError::InvalidMesh(format!(
                "{} boundary edges vs loop of {n}",
                boundary_edges.len()
            )));
        }
        for i in 0..n {
            let a = self.boundary_loop[i];
            let b = self.boundary_loop[(i + 1) % n];
            if !boundary_edges.contains(&(a.min(b), a.max(b))) {
                return Err(FemError::InvalidMesh(format!(
                    "loop edge ({a},{b}) is not a boundary edge"
                )));
            }
        }
        // the loop covers all boundary edges once, so it is the single cycle
        Ok(())
    }

    fn check_quality(self) -> Result<Mesh, FemError> {
        let min_angle = self.min_angle_deg();
        if min_angle < 15.0 {
            return Err(FemError::MeshQualityFailure {
                min_angle_deg: min_angle,
            });
        }
        Ok(self)
    }

    /// Uniform refinement by edge midpoints. Boundary midpoints stay on the
    /// polyline, so the refined P1 spaces are nested in the original's.
    pub fn refine_uniform(&self) -> Mesh {
        let mut vertices = self.vertices.clone();
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<[f64; 2]>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoint.entry(key).or_insert_with(|| {
                let p = vertices[a];
                let q = vertices[b];
                vertices.push([(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0]);
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(self.triangles.len() * 4);
        for t in &self.triangles {
            let m01 = mid(t[0], t[1], &mut vertices);
            let m12 = mid(t[1], t[2], &mut vertices);
            let m20 = mid(t[2], t[0], &mut vertices);
            triangles.push([t[0], m01, m20]);
            triangles.push([t[1], m12, m01]);
            triangles.push([t[2], m20, m12]);
            triangles.push([m01, m12, m20]);
        }
        let n = self.boundary_loop.len();
        let mut boundary_loop = Vec::with_capacity(2 * n);
        for i in 0..n {
            let a = self.boundary_loop[i];
            let b = self.boundary_loop[(i + 1) % n];
            boundary_loop.push(a);
            boundary_loop.push(mid(a, b, &mut vertices));
        }
        Mesh {
            vertices,
            triangles,
            boundary_loop,
        }
    }

    /// Plain-text serialization: VERTICES / TRIANGLES / BOUNDARY sections,
    /// coordinates at 17 significant digits so the decimal text round-trips
    /// the binary values exactly.
    pub fn write_text(&self, mut w: impl Write) -> Result<(), FemError> {
        writeln!(w, "VERTICES {}", self.vertices.len())?;
        for v in &self.vertices {
            writeln!(w, "{:.16e} {:.16e}", v[0], v[1])?;
        }
        writeln!(w, "TRIANGLES {}", self.triangles.len())?;
        for t in &self.triangles {
            writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
        }
        writeln!(w, "BOUNDARY {}", self.boundary_loop.len())?;
        for i in &self.boundary_loop {
            writeln!(w, "{i}")?;
        }
        Ok(())
    }

    pub fn read_text(r: impl BufRead) -> Result<Mesh, FemError> {
        let mut lines = r.lines().enumerate();
        let mut next_line = |what: &str| -> Result<(usize, String), FemError> {
            for (no, line) in lines.by_ref() {
                let line = line?;
                if !line.trim().is_empty() {
                    return Ok((no + 1, line));
                }
            }
            Err(FemError::ParseError {
                line: 0,
                detail: format!("missing {what}"),
            })
        };
        let expect_header = |line: (usize, String), word: &str| -> Result<usize, FemError> {
            let (no, text) = line;
            let mut it = text.split_whitespace();
            match (it.next(), it.next().map(str::parse::<usize>)) {
                (Some(w), Some(Ok(count))) if w == word => Ok(count),
                _ => Err(FemError::ParseError {
                    line: no,
                    detail: format!("expected `{word} <count>`"),
                }),
            }
        };
        let nv = expect_header(next_line("VERTICES")?, "VERTICES")?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (no, line) = next_line("vertex")?;
            let mut it = line.split_whitespace().map(str::parse::<f64>);
            match (it.next(), it.next()) {
                (Some(Ok(x)), Some(Ok(y))) => vertices.push([x, y]),
                _ => {
                    return Err(FemError::ParseError {
                        line: no,
                        detail: "bad vertex".into(),
                    })
                }
            }
        }
        let nt = expect_header(next_line("TRIANGLES")?, "TRIANGLES")?;
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (no, line) = next_line("triangle")?;
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b)), Some(Ok(c))) => triangles.push([a, b, c]),
                _ => {
                    return Err(FemError::ParseError {
                        line: no,
                        detail: "bad triangle".into(),
                    })
                }
            }
        }
        let nb = expect_header(next_line("BOUNDARY")?, "BOUNDARY")?;
        let mut boundary_loop = Vec::with_capacity(nb);
        for _ in 0..nb {
            let (no, line) = next_line("boundary index")?;
            boundary_loop.push(
                line.trim()
                    .parse::<usize>()
                    .map_err(|e| FemError::ParseError {
                        line: no,
                        detail: format!("bad boundary index: {e}"),
                    })?,
            );
        }
        let mesh = Mesh {
            vertices,
            triangles,
            boundary_loop,
        };
        mesh.validate()?;
        Ok(mesh)
    }
}

/// Structured triangulation of the rectangle (0,a) × (0,b).
pub fn make_rectangle_mesh(a: f64, b: f64, h: f64) -> Result<Mesh, FemError> {
    if !(a > 0.0 && b > 0.0 && h > 0.0) {
        return Err(FemError::InvalidInput(format!(
            "bad rectangle spec a={a} b={b} h={h}"
        )));
    }
    let nx = (a / h).round().max(1.0) as usize;
    let ny = (b / h).round().max(1.0) as usize;
    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([a * i as f64 / nx as f64, b * j as f64 / ny as f64]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            triangles.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            triangles.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    let mut boundary_loop = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        boundary_loop.push(idx(i, 0));
    }
    for j in 0..ny {
        boundary_loop.push(idx(nx, j));
    }
    for i in (1..=nx).rev() {
        boundary_loop.push(idx(i, ny));
    }
    for j in (1..=ny).rev() {
        boundary_loop.push(idx(0, j));
    }
    let mesh = Mesh {
        vertices,
        triangles,
        boundary_loop,
    };
    mesh.validate()?;
    mesh.check_quality()
}

/// Ring-structured triangulation of the unit disk: ring j carries 6j
/// vertices at radius j/n, annuli triangulated by angular merge. Boundary
/// edge length is about h for n = round(1/h).
pub fn make_disk_mesh(h: f64) -> Result<Mesh, FemError> {
    if !(h > 0.0 && h < 0.5) {
        return Err(FemError::InvalidInput(format!(
            "mesh size h = {h} out of range"
        )));
    }
    let n = (1.0 / h).round().max(3.0) as usize;
    let mut vertices = vec![[0.0, 0.0]];
    let mut ring_start = vec![0usize; n + 1]; // ring_start[j] = first vertex of ring j
    for j in 1..=n {
        ring_start[j] = vertices.len();
        let count = 6 * j;
        let r = j as f64 / n as f64;
        for i in 0..count {
            let th = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
            vertices.push([r * th.cos(), r * th.sin()]);
        }
    }
    let mut triangles = Vec::with_capacity(6 * n * n);
    // center fan
    for i in 0..6 {
        triangles.push([0, ring_start[1] + i, ring_start[1] + (i + 1) % 6]);
    }
    // annuli: two-pointer merge of the angular sequences
    for j in 1..n {
        let (p, q) = (6 * j, 6 * (j + 1));
        let inner = ring_start[j];
        let outer = ring_start[j + 1];
        let mut a = 0usize; // consumed inner steps
        let mut b = 0usize; // consumed outer steps
        let angle = |steps: usize, count: usize| steps as f64 / count as f64;
        while a < p || b < q {
            let adv_inner = if a == p {
                false
            } else if b == q {
                true
            } else {
                // advance the side whose next vertex comes first in angle
                angle(a + 1, p) <= angle(b + 1, q)
            };
            if adv_inner {
                triangles.push([inner + a % p, outer + b % q, inner + (a + 1) % p]);
                a += 1;
            } else {
                triangles.push([inner + a % p, outer + b % q, outer + (b + 1) % q]);
                b += 1;
            }
        }
    }
    let boundary_loop: Vec<usize> = (0..6 * n).map(|i| ring_start[n] + i).collect();
    let mesh = Mesh {
        vertices,
        triangles,
        boundary_loop,
    };
    mesh.validate()?;
    mesh.check_quality()
}

/// Interior cutoff used to extend the boundary perturbation: ≡ 0 for
/// ρ ≤ 1/4, ≡ 1 for ρ ≥ 1/2, smooth monotone in between. Two profiles are
/// provided; the finite-difference Hessian must be insensitive to the
/// choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffProfile {
    Cubic,
    Quintic,
}

impl CutoffProfile {
    pub fn eval(self, rho: f64) -> f64 {
        let s = ((rho - 0.25) / 0.25).clamp(0.0, 1.0);
        match self {
            CutoffProfile::Cubic => s * s * (3.0 - 2.0 * s),
            CutoffProfile::Quintic => s * s * s * (10.0 - 15.0 * s + 6.0 * s * s),
        }
    }
}

/// Unit-L²(S¹) spherical harmonic of degree k in the plane.
pub fn harmonic_y(k: usize, theta: f64) -> f64 {
    (k as f64 * theta).cos() / std::f64::consts::PI.sqrt()
}

/// Maps an existing disk mesh by the normal perturbation
/// `ρ ↦ ρ + t χ(ρ) Y_k(θ)`. All meshes in a finite-difference stencil come
/// from one reference mesh so the discretization bias cancels in second
/// differences.
pub fn perturb_disk_mesh(
    reference: &Mesh,
    k: usize,
    t: f64,
    profile: CutoffProfile,
) -> Result<Mesh, FemError> {
    if k < 1 {
        return Err(FemError::InvalidInput(
            "harmonic degree k must be >= 1".into(),
        ));
    }
    if 8 * k > reference.boundary_loop.len() {
        return Err(FemError::InvalidInput(format!(
            "boundary resolution: {} vertices for {k} oscillations (need >= 8 per oscillation)",
            reference.boundary_loop.len()
        )));
    }
    let vertices: Vec<[f64; 2]> = reference
        .vertices
        .iter()
        .map(|&[x, y]| {
            let rho = (x * x + y * y).sqrt();
            if rho < 1e-14 {
                return [x, y];
            }
            let theta = y.atan2(x);
            let rho2 = rho + t * profile.eval(rho) * harmonic_y(k, theta);
            [rho2 * x / rho, rho2 * y / rho]
        })
        .collect();
    let mesh = Mesh {
        vertices,
        triangles: reference.triangles.clone(),
        boundary_loop: reference.boundary_loop.clone(),
    };
    mesh.validate()?;
    mesh.check_quality()
}

/// Perturbed disk r(θ) = 1 + t Y_k(θ) built from a fresh reference mesh.
pub fn make_perturbed_disk_mesh(k: usize, t: f64, h: f64) -> Result<Mesh, FemError> {
    perturb_disk_mesh(&make_disk_mesh(h)?, k, t, CutoffProfile::Quintic)
}

/// Assembled symmetric pencil over bulk + surface unknowns.
#[derive(Debug, Clone)]
pub struct CoupledOperator {
    pub a: SparseSym,
    pub m: SparseSym,
    pub n_bulk: usize,
    /// surface DOF of each boundary-loop position: n_bulk + position
    pub surf_dof: Vec<usize>,
}

impl CoupledOperator {
    pub fn n_dofs(&self) -> usize {
        self.n_bulk + self.surf_dof.len()
    }
}

/// Exact P1 assembly of
/// `A = bulk stiffness + c_i · bulk mass + surface stiffness
///      + exchange coupling - c_b · surface mass`
/// and the block mass `M = bulk mass ⊕ surface mass`.
pub fn assemble(mesh: &Mesh, c_i: f64, c_b: f64) -> CoupledOperator {
    let n_bulk = mesh.n_vertices();
    let nb = mesh.boundary_loop.len();
    let surf_dof: Vec<usize> = (0..nb).map(|i| n_bulk + i).collect();
    let mut a_trips: Vec<(usize, usize, f64)> = Vec::with_capacity(12 * mesh.triangles.len());
    let mut m_trips: Vec<(usize, usize, f64)> = Vec::with_capacity(6 * mesh.triangles.len());

    for t in &mesh.triangles {
        let p = [
            mesh.vertices[t[0]],
            mesh.vertices[t[1]],
            mesh.vertices[t[2]],
        ];
        let area = tri_area(p[0], p[1], p[2]);
        // ∇φ_v = perp(opposite edge) / (2 area)
        let grads: [[f64; 2]; 3] = [
            [
                (p[1][1] - p[2][1]) / (2.0 * area),
                (p[2][0] - p[1][0]) / (2.0 * area),
            ],
            [
                (p[2][1] - p[0][1]) / (2.0 * area),
                (p[0][0] - p[2][0]) / (2.0 * area),
            ],
            [
                (p[0][1] - p[1][1]) / (2.0 * area),
                (p[1][0] - p[0][0]) / (2.0 * area),
            ],
        ];
        for v in 0..3 {
            for w in v..3 {
                let k = area * (grads[v][0] * grads[w][0] + grads[v][1] * grads[w][1]);
                let mass = if v == w { area / 6.0 } else { area / 12.0 };
                let (gi, gj) = (t[v].min(t[w]), t[v].max(t[w]));
                a_trips.push((gi, gj, k + c_i * mass));
                m_trips.push((gi, gj, mass));
            }
        }
    }

    let lengths = mesh.boundary_edge_lengths();
    for (e, &len) in lengths.iter().enumerate() {
        let va = mesh.boundary_loop[e];
        let vb = mesh.boundary_loop[(e + 1) % nb];
        let sa = surf_dof[e];
        let sb = surf_dof[(e + 1) % nb];
        // 1-D P1 on the edge: stiffness (1/len)[[1,-1],[-1,1]],
        // mass (len/6)[[2,1],[1,2]]
        let ks = 1.0 / len;
        let (m11, m12) = (len / 3.0, len / 6.0);
        // surface stiffness and -c_b mass on (sa, sb)
        a_trips.push((sa, sa, ks - c_b * m11));
        a_trips.push((sb, sb, ks - c_b * m11));
        a_trips.push((sa.min(sb), sa.max(sb), -ks - c_b * m12));
        m_trips.push((sa, sa, m11));
        m_trips.push((sb, sb, m11));
        m_trips.push((sa.min(sb), sa.max(sb), m12));
        // exchange ∫(u - v)² with the same edge mass matrix
        for (x, y, mm) in [(0, 0, m11), (1, 1, m11), (0, 1, m12), (1, 0, m12)] {
            let bu = if x == 0 { va } else { vb };
            let sv = if y == 0 { sa } else { sb };
            // u_x u_y and v_x v_y enter once per unordered pair
            if x <= y {
                let bu2 = if y == 0 { va } else { vb };
                let sv1 = if x == 0 { sa } else { sb };
                a_trips.push((bu.min(bu2), bu.max(bu2), mm));
                a_trips.push((sv1.min(sv), sv1.max(sv), mm));
            }
            // cross term -2 Σ m_xy u_x v_y: every directed (x,y) once
            a_trips.push((bu.min(sv), bu.max(sv), -mm));
        }
    }

    let n = n_bulk + nb;
    CoupledOperator {
        a: SparseSym::from_triplets(n, a_trips),
        m: SparseSym::from_triplets(n, m_trips),
        n_bulk,
        surf_dof,
    }
}

/// Smallest pencil eigenvalue with the safe shift `min(c_i, -c_b) - 1`
/// (conformity keeps the discrete eigenvalue above the continuous lower
/// bound). The eigenvector is sign-normalized to be positive.
pub fn lambda_fem(mesh: &Mesh, c_i: f64, c_b: f64) -> Result<(f64, Vec<f64>), FemError> {
    lambda_fem_with(mesh, c_i, c_b, &SolveOptions::default())
}

pub fn lambda_fem_with(
    mesh: &Mesh,
    c_i: f64,
    c_b: f64,
    opts: &SolveOptions,
) -> Result<(f64, Vec<f64>), FemError> {
    let op = assemble(mesh, c_i, c_b);
    let shift = c_i.min(-c_b) - 1.0;
    let pair = linalg::smallest_generalized_eigenpair(&op.a, &op.m, shift, opts)?;
    let mut coords = pair.coords;
    let peak = coords
        .iter()
        .cloned()
        .fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
    if peak < 0.0 {
        for c in coords.iter_mut() {
            *c = -*c;
        }
    }
    Ok((pair.value, coords))
}

/// One row of the non-existence scan over thinning rectangles.
#[derive(Debug, Clone, Copy)]
pub struct NonexistenceRow {
    pub aspect: f64,
    pub area: f64,
    pub perimeter: f64,
    pub lambda_h: f64,
    /// (c_i |B| - c_b P) / (|B| + P), the constants-test upper bound
    pub upper_bound: f64,
}

/// Evaluates λ_h over the thinning family of rectangles of area π obtained
/// by stretching the square: parameter `a` maps the √π × √π square to
/// (a√π) × (√π/a). Valid in the regime -c_b < c_i, where the spectral gap
/// to -c_b shrinks as the perimeter grows.
pub fn nonexistence_scan(
    c_i: f64,
    c_b: f64,
    aspect_list: &[f64],
) -> Result<Vec<NonexistenceRow>, FemError> {
    if !(-c_b < c_i) {
        return Err(FemError::InvalidInput(format!(
            "non-existence regime requires -c_b < c_i, got c_i = {c_i}, c_b = {c_b}"
        )));
    }
    let disk_area = std::f64::consts::PI;
    aspect_list
        .iter()
        .map(|&aspect| {
            if !(aspect >= 1.0) {
                return Err(FemError::InvalidInput(format!("aspect {aspect} < 1")));
            }
            let w = disk_area.sqrt() / aspect;
            let l = disk_area.sqrt() * aspect;
            let h = (w / 4.0).min(0.07);
            let mesh = make_rectangle_mesh(l, w, h)?;
            let (lambda_h, _) = lambda_fem(&mesh, c_i, c_b)?;
            let p = 2.0 * (l + w);
            Ok(NonexistenceRow {
                aspect,
                area: mesh.area(),
                perimeter: mesh.perimeter(),
                lambda_h,
                upper_bound: (c_i * disk_area - c_b * p) / (disk_area + p),
            })
        })
        .collect()
}

/// Second difference of the volume-constrained Lagrangian along the
/// degree-k normal perturbation of the disk:
///
/// ```text
///   [ L_μ(Ω_t) + L_μ(Ω_{-t}) - 2 L_μ(B) ] / t²,
///   L_μ(Ω) = λ_h(Ω) - μ |Ω|.
/// ```
///
/// All three meshes are images of one reference mesh so the discretization
/// bias cancels in the difference.
pub fn hessian_fd(k: usize, c_i: f64, c_b: f64, t: f64, h: f64, mu: f64) -> Result<f64, FemError> {
    hessian_fd_with(k, c_i, c_b, t, h, mu, CutoffProfile::Quintic)
}

pub fn hessian_fd_with(
    k: usize,
    c_i: f64,
    c_b: f64,
    t: f64,
    h: f64,
    mu: f64,
    profile: CutoffProfile,
) -> Result<f64, FemError> {
    if !(t > 0.0) {
        return Err(FemError::InvalidInput(format!(
            "step t = {t} must be positive"
        )));
    }
    let reference = make_disk_mesh(h)?;
    let lagrangian = |mesh: &Mesh| -> Result<f64, FemError> {
        let mut opts = SolveOptions::default();
        // second differences divide by t²; the eigenvalue must be resolved
        // well below t² times the admissible error in the quotient
        opts.eig_tol = 1e-12;
        let (l, _) = lambda_fem_with(mesh, c_i, c_b, &opts)?;
        Ok(l - mu * mesh.area())
    };
    let l0 = lagrangian(&reference)?;
    let lp = lagrangian(&perturb_disk_mesh(&reference, k, t, profile)?)?;
    let lm = lagrangian(&perturb_disk_mesh(&reference, k, -t, profile)?)?;
    Ok((lp + lm - 2.0 * l0) / (t * t))
}
