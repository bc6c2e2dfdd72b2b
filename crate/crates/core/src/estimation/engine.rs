//! Cached evaluation of prediction errors over many parameter values.
//!
//! A [`Master`] holds the quadrature nodes of one pattern (its points plus the
//! dummy grid) with each node's neighbourhood in the full pattern. Folds and
//! thinnings restrict those neighbourhoods to sub-patterns instead of
//! recomputing distances.

use crate::geometry::{Point, Window};
use crate::models::{Family, ModelSpec, Neighbourhood, NoCounts, PatternGraph};
use crate::pattern::PointPattern;

use super::quadrature::QuadratureScheme;
use super::test_function::TestFunctionSpec;

pub(crate) struct Master {
    window: Window,
    points: Vec<Point>,
    nodes: Vec<Point>,
    n_data: usize,
    n_dummy: usize,
    tile_area: Vec<f64>,
    data_tile: Vec<usize>,
    r_max: Option<f64>,
    nbs: Vec<Neighbourhood>,
}

impl Master {
    pub(crate) fn new(x: &PointPattern, dummy: usize, r_max: Option<f64>) -> Self {
        let window = x.window();
        let tiles = window.grid(dummy, dummy);
        let n = x.len();
        let mut nodes = x.points().to_vec();
        nodes
            .extend(tiles.iter().map(|t| Point { x: 0.5 * (t.x_min() + t.x_max()), y: 0.5 * (t.y_min() + t.y_max()) }));
        let data_tile = x
            .points()
            .iter()
            .map(|u| {
                let i = ((u.x - window.x_min()) / window.width() * dummy as f64) as usize;
                let j = ((u.y - window.y_min()) / window.height() * dummy as f64) as usize;
                j.min(dummy - 1) * dummy + i.min(dummy - 1)
            })
            .collect();
        let nbs = match r_max {
            Some(r) => nodes.iter().map(|&u| Neighbourhood::build(u, x.points(), r)).collect(),
            None => Vec::new(),
        };
        Self {
            window,
            points: x.points().to_vec(),
            nodes,
            n_data: n,
            n_dummy: dummy * dummy,
            tile_area: tiles.iter().map(|t| t.area()).collect(),
            data_tile,
            r_max,
            nbs,
        }
    }

    pub(crate) fn n_data(&self) -> usize {
        self.n_data
    }

    pub(crate) fn window(&self) -> Window {
        self.window
    }

    pub(crate) fn node(&self, i: usize) -> Point {
        self.nodes[i]
    }

    /// Node indices and counting weights for the quadrature made of the
    /// listed data nodes plus the full dummy grid.
    pub(crate) fn quadrature(&self, data_nodes: &[usize]) -> (Vec<usize>, Vec<f64>) {
        let mut counts = vec![1usize; self.n_dummy];
        for &j in data_nodes {
            counts[self.data_tile[j]] += 1;
        }
        let mut idx = Vec::with_capacity(data_nodes.len() + self.n_dummy);
        let mut w = Vec::with_capacity(data_nodes.len() + self.n_dummy);
        for &j in data_nodes {
            idx.push(j);
            let t = self.data_tile[j];
            w.push(self.tile_area[t] / counts[t] as f64);
        }
        for (t, (&a, &c)) in self.tile_area.iter().zip(&counts).enumerate() {
            idx.push(self.n_data + t);
            w.push(a / c as f64);
        }
        (idx, w)
    }

    /// Neighbourhoods of the given nodes restricted to the sub-pattern
    /// `mask`, re-indexed into that sub-pattern.
    pub(crate) fn restricted(&self, nodes: &[usize], mask: &[bool]) -> (Vec<Neighbourhood>, Vec<Point>) {
        let mut map = vec![None; self.n_data];
        let mut sub = Vec::new();
        for (j, &m) in mask.iter().enumerate() {
            if m {
                map[j] = Some(sub.len());
                sub.push(self.points[j]);
            }
        }
        let nbs = if self.r_max.is_some() {
            nodes.iter().map(|&i| self.nbs[i].restrict(|j| map[j])).collect()
        } else {
            vec![Neighbourhood::default(); nodes.len()]
        };
        (nbs, sub)
    }

    /// Fold with training `train_mask`, validation at data nodes `val`, and
    /// quadrature `(nodes, weights)` from [`Master::quadrature`].
    pub(crate) fn fold(
        &self,
        train_mask: &[bool],
        val: &[usize],
        quad: (Vec<usize>, Vec<f64>),
        family: Family,
        indicator: Option<Vec<bool>>,
    ) -> FoldEval {
        let (nodes, weights) = quad;
        let (nbs, train) = self.restricted(&nodes, train_mask);
        let pos: std::collections::HashMap<usize, usize> = nodes.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let val_pos = val.iter().map(|j| pos[j]).collect();
        let pts = nodes.iter().map(|&i| self.nodes[i]).collect();
        let graph = (family == Family::Geyer).then(|| PatternGraph::new(&train, self.r_max.unwrap_or(0.0)));
        FoldEval::new(pts, weights, nbs, val_pos, graph, indicator, family, !train.is_empty() && !val.is_empty())
    }
}

pub(crate) struct FoldEval {
    pts: Vec<Point>,
    weights: Vec<f64>,
    total: f64,
    nbs: Vec<Neighbourhood>,
    val: Vec<usize>,
    graph: Option<PatternGraph>,
    indicator: Option<Vec<bool>>,
    hard_core: Option<HardCoreIndex>,
    pub(crate) nonempty: bool,
}

/// Nearest-neighbour distances to training, sorted with cumulative weights,
/// so that the covered area for any radius is one binary search.
struct HardCoreIndex {
    dmin: Vec<f64>,
    cum: Vec<f64>,
    val_dmin: Vec<f64>,
}

impl FoldEval {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        pts: Vec<Point>,
        weights: Vec<f64>,
        nbs: Vec<Neighbourhood>,
        val: Vec<usize>,
        graph: Option<PatternGraph>,
        indicator: Option<Vec<bool>>,
        family: Family,
        nonempty: bool,
    ) -> Self {
        let total = weights.iter().sum();
        let hard_core = (family == Family::HardCore && indicator.is_none()).then(|| {
            let d = |nb: &Neighbourhood| nb.nearest().unwrap_or(f64::INFINITY);
            let mut order: Vec<(f64, f64)> = nbs.iter().zip(&weights).map(|(nb, &w)| (d(nb), w)).collect();
            order.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut acc = 0.0;
            let cum = order
                .iter()
                .map(|o| {
                    acc += o.1;
                    acc
                })
                .collect();
            HardCoreIndex {
                dmin: order.iter().map(|o| o.0).collect(),
                cum,
                val_dmin: val.iter().map(|&i| d(&nbs[i])).collect(),
            }
        });
        Self { pts, weights, total, nbs, val, graph, indicator, hard_core, nonempty }
    }

    /// Builds a fold by brute force from explicit patterns.
    pub(crate) fn direct(
        training: &PointPattern,
        validation: &[usize],
        quad: &QuadratureScheme,
        spec: &ModelSpec,
    ) -> Self {
        let r = spec.interaction_radius();
        let nbs = match r {
            Some(r) => quad.nodes().iter().map(|&u| Neighbourhood::build(u, training.points(), r)).collect(),
            None => vec![Neighbourhood::default(); quad.len()],
        };
        let graph = (spec.family() == Family::Geyer).then(|| PatternGraph::new(training.points(), r.unwrap_or(0.0)));
        let nonempty = !training.is_empty() && !validation.is_empty();
        Self::new(
            quad.nodes().to_vec(),
            quad.weights().to_vec(),
            nbs,
            validation.to_vec(),
            graph,
            None,
            spec.family(),
            nonempty,
        )
    }

    pub(crate) fn lambda(&self, spec: &ModelSpec, i: usize) -> f64 {
        let nb = self.nbs.get(i);
        match (nb, &self.graph) {
            (Some(nb), Some(g)) => spec.intensity_local(self.pts[i], nb, g),
            (Some(nb), None) => spec.intensity_local(self.pts[i], nb, &NoCounts),
            (None, _) => spec.base_intensity(self.pts[i]),
        }
    }

    fn xi(&self, spec: &ModelSpec, w: f64, i: usize) -> f64 {
        match &self.indicator {
            Some(ind) if !ind[i] => 0.0,
            _ => w * self.lambda(spec, i),
        }
    }

    /// `(sum term, integral term)` of the prediction error.
    pub(crate) fn terms(&self, spec: &ModelSpec, tf: &TestFunctionSpec, w: f64) -> (f64, f64) {
        if let (Some(hc), Some(r)) = (&self.hard_core, spec.interaction_radius()) {
            let free = w * spec.base_intensity(Point { x: 0.0, y: 0.0 });
            let sum = hc.val_dmin.iter().map(|&d| tf.h(if d > r { free } else { 0.0 })).sum();
            let covered = match hc.dmin.partition_point(|&d| d <= r) {
                0 => 0.0,
                k => hc.cum[k - 1],
            };
            let integral = tf.h_times_xi(free) * (self.total - covered) + tf.h_times_xi(0.0) * covered;
            return (sum, integral);
        }
        let sum = self.val.iter().map(|&i| tf.h(self.xi(spec, w, i))).sum();
        let integral = if tf.is_exact_sg() && self.indicator.is_none() {
            self.total
        } else {
            (0..self.pts.len()).map(|i| self.weights[i] * tf.h_times_xi(self.xi(spec, w, i))).sum()
        };
        (sum, integral)
    }

    pub(crate) fn error(&self, spec: &ModelSpec, tf: &TestFunctionSpec, w: f64) -> f64 {
        let (s, i) = self.terms(spec, tf, w);
        s - i
    }
}
