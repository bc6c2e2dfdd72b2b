//! Berman-Turner quadrature: data points plus a regular dummy grid, with
//! counting weights per tile.

use crate::geometry::{Point, Window};
use crate::pattern::PointPattern;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureScheme {
    nodes: Vec<Point>,
    weights: Vec<f64>,
    n_data: usize,
}

/// Default number of dummy points per axis.
pub const DEFAULT_DUMMY: usize = 32;

impl QuadratureScheme {
    /// Data nodes come first, in pattern order, followed by the dummy grid.
    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn n_data(&self) -> usize {
        self.n_data
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

pub fn build_quadrature(window: &Window, data: &PointPattern, n_dummy_per_axis: usize) -> QuadratureScheme {
    build_from_points(window, data.points(), n_dummy_per_axis)
}

pub(crate) fn build_from_points(window: &Window, data: &[Point], n: usize) -> QuadratureScheme {
    assert!(n > 0, "dummy grid needs at least one point per axis");
    let tiles = window.grid(n, n);
    let tile_of = |u: Point| {
        let i = ((u.x - window.x_min()) / window.width() * n as f64) as usize;
        let j = ((u.y - window.y_min()) / window.height() * n as f64) as usize;
        j.min(n - 1) * n + i.min(n - 1)
    };
    let mut counts = vec![1usize; n * n];
    let data_tiles: Vec<usize> = data.iter().map(|&u| tile_of(u)).collect();
    for &t in &data_tiles {
        counts[t] += 1;
    }
    let mut nodes = Vec::with_capacity(data.len() + n * n);
    let mut weights = Vec::with_capacity(data.len() + n * n);
    for (&u, &t) in data.iter().zip(&data_tiles) {
        nodes.push(u);
        weights.push(tiles[t].area() / counts[t] as f64);
    }
    for (t, tile) in tiles.iter().enumerate() {
        nodes.push(Point { x: 0.5 * (tile.x_min() + tile.x_max()), y: 0.5 * (tile.y_min() + tile.y_max()) });
        weights.push(tile.area() / counts[t] as f64);
    }
    QuadratureScheme { nodes, weights, n_data: data.len() }
}
