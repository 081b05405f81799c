//! Cap symmetrization on circles and disks, the concentration comparison
//! relation, and numerical checks of the classical rearrangement
//! inequalities.
//!
//! A [`CircleField`] holds `m` uniform angular samples of a function on a
//! circle; a [`PolarField`] stacks circle fields over increasing radii. The
//! (increasing) cap symmetrization `f^♯` rearranges each circle so values
//! decrease with the distance from the pole θ = 0; `f_♯` is the variant
//! increasing from the pole. The continuous definitions fix the
//! rearrangement only up to null sets; the discrete layout used here places
//! the descending sorted values at angle indices ordered
//! `0, +1, -1, +2, -2, …` with the +θ side preferred on ties. This is one
//! concrete, deterministic choice, not a canonical one.

use std::io::{BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SymmetrizeError {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("negative input at sample {index}: {value}")]
    NegativeInput { index: usize, value: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("csv parse error at line {line}: {detail}")]
    CsvParse { line: usize, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Samples of a function on a circle at θ_j = 2πj/m.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleField {
    pub m: usize,
    pub radius: f64,
    pub values: Vec<f64>,
}

impl CircleField {
    pub fn new(radius: f64, values: Vec<f64>) -> Result<Self, SymmetrizeError> {
        let m = values.len();
        if m < 8 || m % 2 != 0 {
            return Err(SymmetrizeError::InvalidField(format!(
                "m = {m} must be even and >= 8"
            )));
        }
        if !(radius > 0.0) {
            return Err(SymmetrizeError::InvalidField(format!(
                "radius {radius} <= 0"
            )));
        }
        if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(SymmetrizeError::InvalidField(format!(
                "non-finite value {v} at {i}"
            )));
        }
        Ok(CircleField { m, radius, values })
    }

    pub fn constant(m: usize, radius: f64, value: f64) -> Result<Self, SymmetrizeError> {
        Self::new(radius, vec![value; m])
    }

    pub fn from_fn(m: usize, radius: f64, f: impl Fn(f64) -> f64) -> Result<Self, SymmetrizeError> {
        let values = (0..m)
            .map(|j| f(2.0 * std::f64::consts::PI * j as f64 / m as f64))
            .collect();
        Self::new(radius, values)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn check_nonnegative(&self) -> Result<(), SymmetrizeError> {
        if let Some((index, &value)) = self.values.iter().enumerate().find(|(_, &v)| v < 0.0) {
            return Err(SymmetrizeError::NegativeInput { index, value });
        }
        Ok(())
    }
}

/// Function on the disk as circles stacked over strictly increasing radii.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarField {
    pub rings: Vec<(f64, CircleField)>,
}

impl PolarField {
    pub fn new(rings: Vec<(f64, CircleField)>) -> Result<Self, SymmetrizeError> {
        if rings.is_empty() {
            return Err(SymmetrizeError::InvalidField("no rings".into()));
        }
        let m = rings[0].1.m;
        let mut prev = 0.0;
        for (i, (r, c)) in rings.iter().enumerate() {
            if c.m != m {
                return Err(SymmetrizeError::InvalidField(format!(
                    "ring {i} has m = {}, expected {m}",
                    c.m
                )));
            }
            if !(*r > prev) {
                return Err(SymmetrizeError::InvalidField(format!(
                    "ring radii must be strictly increasing and positive (ring {i})"
                )));
            }
            if (c.radius - r).abs() > 1e-12 * r.max(1.0) {
                return Err(SymmetrizeError::InvalidField(format!(
                    "ring {i}: circle radius {} disagrees with ring radius {r}",
                    c.radius
                )));
            }
            prev = *r;
        }
        Ok(PolarField { rings })
    }

    pub fn m(&self) -> usize {
        self.rings[0].1.m
    }

    pub fn n_rings(&self) -> usize {
        self.rings.len()
    }

    pub fn same_grid(&self, other: &PolarField) -> bool {
        self.n_rings() == other.n_rings()
            && self.m() == other.m()
            && self
                .rings
                .iter()
                .zip(&other.rings)
                .all(|((r1, _), (r2, _))| (r1 - r2).abs() <= 1e-12 * r1.max(1.0))
    }

    /// Writes `ring_index,r,theta_index,value` rows.
    pub fn write_csv(&self, mut w: impl Write) -> Result<(), SymmetrizeError> {
        writeln!(w, "ring_index,r,theta_index,value")?;
        for (i, (r, c)) in self.rings.iter().enumerate() {
            for (j, v) in c.values.iter().enumerate() {
                writeln!(w, "{i},{r},{j},{v}")?;
            }
        }
        Ok(())
    }

    pub fn read_csv(r: impl BufRead) -> Result<Self, SymmetrizeError> {
        let mut rows: Vec<(usize, f64, usize, f64)> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if lineno == 0 || line.is_empty() {
                continue; // header
            }
            let mut parts = line.split(',');
            let mut next = |what: &str| {
                parts.next().ok_or_else(|| SymmetrizeError::CsvParse {
                    line: lineno + 1,
                    detail: format!("missing {what}"),
                })
            };
            let ring: usize =
                next("ring_index")?
                    .trim()
                    .parse()
                    .map_err(|e| SymmetrizeError::CsvParse {
                        line: lineno + 1,
                        detail: format!("ring_index: {e}"),
                    })?;
            let r: f64 = next("r")?
                .trim()
                .parse()
                .map_err(|e| SymmetrizeError::CsvParse {
                    line: lineno + 1,
                    detail: format!("r: {e}"),
                })?;
            let theta: usize =
                next("theta_index")?
                    .trim()
                    .parse()
                    .map_err(|e| SymmetrizeError::CsvParse {
                        line: lineno + 1,
                        detail: format!("theta_index: {e}"),
                    })?;
            let value: f64 =
                next("value")?
                    .trim()
                    .parse()
                    .map_err(|e| SymmetrizeError::CsvParse {
                        line: lineno + 1,
                        detail: format!("value: {e}"),
                    })?;
            rows.push((ring, r, theta, value));
        }
        rows.sort_by(|a, b| (a.0, a.2).cmp(&(b.0, b.2)));
        let mut rings: Vec<(f64, Vec<f64>)> = Vec::new();
        for (ring, r, theta, value) in rows {
            if ring == rings.len() {
                rings.push((r, Vec::new()));
            }
            let slot = rings
                .get_mut(ring)
                .ok_or_else(|| SymmetrizeError::CsvParse {
                    line: 0,
                    detail: format!("ring indices not contiguous at {ring}"),
                })?;
            if theta != slot.1.len() {
                return Err(SymmetrizeError::CsvParse {
                    line: 0,
                    detail: format!("theta indices not contiguous in ring {ring}"),
                });
            }
            slot.1.push(value);
        }
        PolarField::new(
            rings
                .into_iter()
                .map(|(r, values)| CircleField::new(r, values).map(|c| (r, c)))
                .collect::<Result<_, _>>()?,
        )
    }
}

/// Angle-index order `0, +1, -1, +2, -2, …` (distance from the pole,
/// +θ side preferred on ties).
fn cap_layout(m: usize) -> impl Iterator<Item = usize> {
    (0..m).map(move |rank| {
        if rank == 0 {
            0
        } else if rank % 2 == 1 {
            rank / 2 + 1
        } else {
            m - rank / 2
        }
    })
}

fn place_sorted(values: &[f64], ascending: bool) -> Vec<f64> {
    let m = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    if !ascending {
        sorted.reverse();
    }
    let mut out = vec![0.0; m];
    for (rank, pos) in cap_layout(m).enumerate() {
        out[pos] = sorted[rank];
    }
    out
}

/// Increasing cap symmetrization `f^♯`: equimeasurable rearrangement
/// non-increasing in the distance |θ| from the pole.
pub fn cap_symmetrize_circle(f: &CircleField) -> Result<CircleField, SymmetrizeError> {
    f.check_nonnegative()?;
    Ok(CircleField {
        m: f.m,
        radius: f.radius,
        values: place_sorted(&f.values, false),
    })
}

/// Decreasing cap symmetrization `f_♯`: minimum at the pole.
pub fn decreasing_cap_symmetrize_circle(f: &CircleField) -> Result<CircleField, SymmetrizeError> {
    f.check_nonnegative()?;
    Ok(CircleField {
        m: f.m,
        radius: f.radius,
        values: place_sorted(&f.values, true),
    })
}

/// Ring-by-ring cap symmetrization of a disk field.
pub fn cap_symmetrize_disk(f: &PolarField) -> Result<PolarField, SymmetrizeError> {
    let rings = f
        .rings
        .iter()
        .map(|(r, c)| cap_symmetrize_circle(c).map(|s| (*r, s)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PolarField { rings })
}

pub fn decreasing_cap_symmetrize_disk(f: &PolarField) -> Result<PolarField, SymmetrizeError> {
    let rings = f
        .rings
        .iter()
        .map(|(r, c)| decreasing_cap_symmetrize_circle(c).map(|s| (*r, s)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PolarField { rings })
}

/// Outcome of the concentration comparison `u1 ⪯ u2`.
#[derive(Debug, Clone, Copy)]
pub struct ComparisonReport {
    pub holds: bool,
    /// most negative value of (top-m₀ sum of u2) - (top-m₀ sum of u1)
    pub worst_deficit: f64,
    pub worst_ring: usize,
    /// cap size m₀ at the worst deficit
    pub worst_cap: usize,
}

/// Discrete concentration comparison: on every ring and for every cap size
/// m₀, the sum of the m₀ largest samples of `u1` must not exceed that of
/// `u2` beyond `tol`.
pub fn compare_concentration(
    u1: &PolarField,
    u2: &PolarField,
    tol: f64,
) -> Result<ComparisonReport, SymmetrizeError> {
    if !u1.same_grid(u2) {
        return Err(SymmetrizeError::GridMismatch(format!(
            "{}x{} vs {}x{}",
            u1.n_rings(),
            u1.m(),
            u2.n_rings(),
            u2.m()
        )));
    }
    let mut worst_deficit = f64::INFINITY;
    let mut worst_ring = 0;
    let mut worst_cap = 1;
    for (ring, ((_, c1), (_, c2))) in u1.rings.iter().zip(&u2.rings).enumerate() {
        let mut s1 = c1.values.clone();
        let mut s2 = c2.values.clone();
        s1.sort_by(|a, b| f64::total_cmp(b, a));
        s2.sort_by(|a, b| f64::total_cmp(b, a));
        let mut acc1 = 0.0;
        let mut acc2 = 0.0;
        for cap in 0..s1.len() {
            acc1 += s1[cap];
            acc2 += s2[cap];
            let deficit = acc2 - acc1;
            if deficit < worst_deficit {
                worst_deficit = deficit;
                worst_ring = ring;
                worst_cap = cap + 1;
            }
        }
    }
    Ok(ComparisonReport {
        holds: worst_deficit >= -tol,
        worst_deficit,
        worst_ring,
        worst_cap,
    })
}

/// Dirichlet energy ∫ |∇_Σ f|² of the band-limited trigonometric
/// interpolant, computed spectrally. On a circle of radius r the tangential
/// gradient carries a 1/r factor, giving energy (1/r) ∫ (df/dθ)² dθ.
pub fn circle_dirichlet_energy(f: &CircleField) -> f64 {
    let m = f.m;
    let x = &f.values;
    let mut e = 0.0;
    for k in 1..m / 2 {
        let mut a = 0.0;
        let mut b = 0.0;
        for (j, &v) in x.iter().enumerate() {
            let t = 2.0 * std::f64::consts::PI * ((k * j) % m) as f64 / m as f64;
            a += v * t.cos();
            b += v * t.sin();
        }
        a *= 2.0 / m as f64;
        b *= 2.0 / m as f64;
        e += std::f64::consts::PI * (k * k) as f64 * (a * a + b * b);
    }
    // Nyquist mode interpolates as cos(mθ/2)
    let mut a = 0.0;
    for (j, &v) in x.iter().enumerate() {
        a += v * if j % 2 == 0 { 1.0 } else { -1.0 };
    }
    a /= m as f64;
    e += std::f64::consts::PI * (m as f64 / 2.0).powi(2) * a * a;
    e / f.radius
}

/// Slack record for the rearrangement inequalities applied to one pair of
/// circle fields; every slack is `>= 0` up to roundoff when the inequality
/// holds.
#[derive(Debug, Clone)]
pub struct RearrangementReport {
    /// max over p ∈ {1,2,3} of |Σ f^p - Σ (f^♯)^p|
    pub lp_preservation_error: f64,
    /// Σ f^♯ g^♯ - Σ f g  (Hardy-Littlewood)
    pub hardy_littlewood_slack: f64,
    /// Σ (f-g)² - Σ (f^♯-g^♯)²  (contraction)
    pub contraction_slack: f64,
    /// E(f) - E(f^♯) for the spectral circle energy (Pólya-Szegő)
    pub polya_szego_slack: f64,
    /// set when g is symmetric-decreasing with distinct values and the
    /// Hardy-Littlewood slack vanishes to 1e-12: then f must equal f^♯
    pub rigidity_forced_symmetric: Option<bool>,
}

/// Evaluates the four rearrangement inequalities on a pair of nonnegative
/// circle fields.
pub fn rearrangement_checks(
    f: &CircleField,
    g: &CircleField,
) -> Result<RearrangementReport, SymmetrizeError> {
    f.check_nonnegative()?;
    g.check_nonnegative()?;
    if f.m != g.m {
        return Err(SymmetrizeError::GridMismatch(format!(
            "m: {} vs {}",
            f.m, g.m
        )));
    }
    let fs = cap_symmetrize_circle(f)?;
    let gs = cap_symmetrize_circle(g)?;

    let mut lp_err = 0.0f64;
    for p in [1i32, 2, 3] {
        let sf: f64 = f.values.iter().map(|v| v.powi(p)).sum();
        let sfs: f64 = fs.values.iter().map(|v| v.powi(p)).sum();
        lp_err = lp_err.max((sf - sfs).abs());
    }
    let dot = |a: &CircleField, b: &CircleField| -> f64 {
        a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum()
    };
    let hl = dot(&fs, &gs) - dot(f, g);
    let dist = |a: &CircleField, b: &CircleField| -> f64 {
        a.values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y) * (x - y))
            .sum()
    };
    let contraction = dist(f, g) - dist(&fs, &gs);
    let ps = circle_dirichlet_energy(f) - circle_dirichlet_energy(&fs);

    // Hardy-Littlewood rigidity probe, meaningful only when g is already
    // symmetric-decreasing with pairwise distinct values.
    let g_symmetric = g.values == cap_symmetrize_circle(g)?.values;
    let mut distinct = g.values.clone();
    distinct.sort_by(f64::total_cmp);
    let g_distinct = distinct.windows(2).all(|w| w[0] != w[1]);
    let rigidity = if g_symmetric && g_distinct {
        if hl.abs() <= 1e-12 * dot(f, g).abs().max(1.0) {
            Some(f.values == fs.values)
        } else {
            None
        }
    } else {
        None
    };

    Ok(RearrangementReport {
        lp_preservation_error: lp_err,
        hardy_littlewood_slack: hl,
        contraction_slack: contraction,
        polya_szego_slack: ps,
        rigidity_forced_symmetric: rigidity,
    })
}
