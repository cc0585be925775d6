//! Domains and evaluation grids.
//!
//! A grid holds the interior lattice nodes (strictly inside the domain) and
//! the boundary nodes, each boundary node carrying the unit inner normal at
//! that point.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of angular boundary nodes on a disk.
pub const DEFAULT_BOUNDARY_NODES: usize = 256;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Domain {
    /// Axis-aligned box `[min_i, max_i]` in dimension 2 or 3.
    Box { min: Vec<f64>, max: Vec<f64> },
    /// Disk in the plane.
    Disk { center: Vec<f64>, radius: f64 },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Box { min, .. } => min.len(),
            Domain::Disk { center, .. } => center.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Domain::Box { min, max } => {
                if min.len() != max.len() {
                    return Err(Error::DimensionMismatch(
                        "box min and max have different lengths".into(),
                    ));
                }
                if !(2..=3).contains(&min.len()) {
                    return Err(Error::BadInput("domain dimension must be 2 or 3".into()));
                }
                if min
                    .iter()
                    .zip(max)
                    .any(|(lo, hi)| !lo.is_finite() || !hi.is_finite() || lo >= hi)
                {
                    return Err(Error::BadInput("box must have positive extent".into()));
                }
                Ok(())
            }
            Domain::Disk { center, radius } => {
                if center.len() != 2 {
                    return Err(Error::BadInput("disk domains are planar".into()));
                }
                if !radius.is_finite() || *radius <= 0.0 {
                    return Err(Error::BadInput("disk radius must be positive".into()));
                }
                Ok(())
            }
        }
    }

    /// Strict interior test.
    pub fn contains(&self, x: &DVector<f64>) -> bool {
        match self {
            Domain::Box { min, max } => x
                .iter()
                .zip(min.iter().zip(max))
                .all(|(&xi, (&lo, &hi))| xi > lo && xi < hi),
            Domain::Disk { center, radius } => {
                let c = DVector::from_column_slice(center);
                (x - c).norm() < *radius
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundaryNode {
    pub point: DVector<f64>,
    /// Unit normal pointing into the domain.
    pub inner_normal: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct Grid {
    pub interior: Vec<DVector<f64>>,
    pub boundary: Vec<BoundaryNode>,
    pub spacing: f64,
}

impl Grid {
    /// Builds a lattice of spacing `h` over the domain plus boundary nodes:
    /// `boundary_nodes` angles for a disk, every face lattice point for a
    /// box.
    pub fn build(domain: &Domain, spacing: f64, boundary_nodes: usize) -> Result<Grid> {
        domain.validate()?;
        if !spacing.is_finite() || spacing <= 0.0 {
            return Err(Error::BadInput("grid spacing must be positive".into()));
        }
        match domain {
            Domain::Box { min, max } => Ok(build_box(min, max, spacing)),
            Domain::Disk { center, radius } => {
                if boundary_nodes < 3 {
                    return Err(Error::BadInput(
                        "disk boundary needs at least 3 nodes".into(),
                    ));
                }
                Ok(build_disk(center, *radius, spacing, boundary_nodes))
            }
        }
    }

    pub fn all_points(&self) -> impl Iterator<Item = &DVector<f64>> {
        self.interior
            .iter()
            .chain(self.boundary.iter().map(|b| &b.point))
    }
}

fn axis_steps(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    // lattice lo + k h, k >= 1, strictly below hi
    let mut out = Vec::new();
    let mut k = 1usize;
    loop {
        let x = lo + k as f64 * h;
        if x >= hi - 1e-12 * (1.0 + hi.abs()) {
            break;
        }
        out.push(x);
        k += 1;
    }
    out
}

fn build_box(min: &[f64], max: &[f64], h: f64) -> Grid {
    let dim = min.len();
    let axes: Vec<Vec<f64>> = (0..dim).map(|i| axis_steps(min[i], max[i], h)).collect();

    let mut interior = Vec::new();
    let mut idx = vec![0usize; dim];
    'outer: loop {
        interior.push(DVector::from_iterator(
            dim,
            (0..dim).map(|i| axes[i][idx[i]]),
        ));
        for i in 0..dim {
            idx[i] += 1;
            if idx[i] < axes[i].len() {
                continue 'outer;
            }
            idx[i] = 0;
        }
        break;
    }
    if axes.iter().any(|a| a.is_empty()) {
        interior.clear();
    }

    // boundary: faces at min_i and max_i, gridded with closed axis lattices
    let closed_axes: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            let mut a = vec![min[i]];
            a.extend(axis_steps(min[i], max[i], h));
            a.push(max[i]);
            a
        })
        .collect();
    let mut boundary = Vec::new();
    for face_axis in 0..dim {
        for (face_value, normal_sign) in [(min[face_axis], 1.0), (max[face_axis], -1.0)] {
            let others: Vec<usize> = (0..dim).filter(|&i| i != face_axis).collect();
            let mut idx = vec![0usize; others.len()];
            loop {
                let mut point = DVector::zeros(dim);
                point[face_axis] = face_value;
                for (slot, &axis) in others.iter().enumerate() {
                    point[axis] = closed_axes[axis][idx[slot]];
                }
                let mut normal = DVector::zeros(dim);
                normal[face_axis] = normal_sign;
                boundary.push(BoundaryNode {
                    point,
                    inner_normal: normal,
                });
                let mut carried = true;
                for slot in 0..others.len() {
                    idx[slot] += 1;
                    if idx[slot] < closed_axes[others[slot]].len() {
                        carried = false;
                        break;
                    }
                    idx[slot] = 0;
                }
                if carried {
                    break;
                }
            }
        }
    }
    Grid {
        interior,
        boundary,
        spacing: h,
    }
}

fn build_disk(center: &[f64], radius: f64, h: f64, boundary_nodes: usize) -> Grid {
    let c = DVector::from_column_slice(center);
    let mut interior = Vec::new();
    for x in axis_steps(center[0] - radius, center[0] + radius, h) {
        for y in axis_steps(center[1] - radius, center[1] + radius, h) {
            let p = DVector::from_vec(vec![x, y]);
            if (&p - &c).norm() < radius {
                interior.push(p);
            }
        }
    }
    let mut boundary = Vec::with_capacity(boundary_nodes);
    for j in 0..boundary_nodes {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / boundary_nodes as f64;
        let dir = DVector::from_vec(vec![theta.cos(), theta.sin()]);
        boundary.push(BoundaryNode {
            point: &c + &dir * radius,
            inner_normal: -dir,
        });
    }
    Grid {
        interior,
        boundary,
        spacing: h,
    }
}
