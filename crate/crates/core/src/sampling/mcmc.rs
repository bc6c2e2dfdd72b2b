//! Birth-death Metropolis-Hastings for locally stable Gibbs models.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, Point, Window};
use crate::models::{ModelSpec, NeighbourCounts, Neighbourhood, NoCounts};
use crate::pattern::PointPattern;
use crate::rng::RngStream;

use super::poisson::{poisson_count, uniform_point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    #[default]
    Empty,
    /// Homogeneous Poisson pattern at the model's `beta`.
    PoissonSeed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McmcConfig {
    pub n_steps: u64,
    pub burn_in: u64,
    pub birth_prob: f64,
    pub initial: InitialState,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self { n_steps: 100_000, burn_in: 50_000, birth_prob: 0.5, initial: InitialState::Empty }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::InvalidParameter("n_steps must be positive".into()));
        }
        if self.burn_in >= self.n_steps {
            return Err(Error::InvalidParameter(format!(
                "burn_in ({}) must be smaller than n_steps ({})",
                self.burn_in, self.n_steps
            )));
        }
        if !(self.birth_prob > 0.0 && self.birth_prob < 1.0) {
            return Err(Error::InvalidParameter(format!("birth_prob must lie in (0, 1), got {}", self.birth_prob)));
        }
        Ok(())
    }
}

/// Runs `cfg.n_steps` proposals and returns the final state.
pub fn sample_gibbs(spec: &ModelSpec, window: &Window, cfg: &McmcConfig, rng: &RngStream) -> Result<PointPattern> {
    cfg.validate()?;
    let mut chain = Chain::new(spec, window, cfg, rng);
    chain.advance(cfg.n_steps);
    chain.state.pattern(*window)
}

/// One chain: `cfg.burn_in` steps, then `n_draws` states spaced
/// `spacing` proposals apart.
pub fn sample_gibbs_series(
    spec: &ModelSpec,
    window: &Window,
    cfg: &McmcConfig,
    n_draws: usize,
    spacing: u64,
    rng: &RngStream,
) -> Result<Vec<PointPattern>> {
    cfg.validate()?;
    if spacing == 0 {
        return Err(Error::InvalidParameter("spacing must be positive".into()));
    }
    let mut chain = Chain::new(spec, window, cfg, rng);
    chain.advance(cfg.burn_in);
    let mut out = Vec::with_capacity(n_draws);
    for _ in 0..n_draws {
        chain.advance(spacing);
        out.push(chain.state.pattern(*window)?);
    }
    Ok(out)
}

struct Chain<'a> {
    spec: &'a ModelSpec,
    window: Window,
    birth_prob: f64,
    state: CellIndex,
    rng: rand_chacha::ChaCha8Rng,
}

impl<'a> Chain<'a> {
    fn new(spec: &'a ModelSpec, window: &Window, cfg: &McmcConfig, stream: &RngStream) -> Self {
        let mut rng = stream.rng();
        let cell = spec.interaction_radius().unwrap_or(window.width().max(window.height()));
        let mut state = CellIndex::new(*window, cell);
        if cfg.initial == InitialState::PoissonSeed {
            let rate = spec.base_intensity(Point { x: window.x_min(), y: window.y_min() });
            for _ in 0..poisson_count(rate * window.area(), &mut rng) {
                state.insert(uniform_point(window, &mut rng));
            }
        }
        Self { spec, window: *window, birth_prob: cfg.birth_prob, state, rng }
    }

    fn advance(&mut self, steps: u64) {
        let area = self.window.area();
        for _ in 0..steps {
            let n = self.state.len();
            if self.rng.random::<f64>() < self.birth_prob {
                let u = uniform_point(&self.window, &mut self.rng);
                let lambda = self.intensity(u, None);
                // ratio includes the proposal asymmetry between births and deaths
                let ratio = lambda * area / (n + 1) as f64 * (1.0 - self.birth_prob) / self.birth_prob;
                if lambda > 0.0 && self.rng.random::<f64>() < ratio {
                    self.state.insert(u);
                }
            } else if n > 0 {
                let i = self.rng.random_range(0..n);
                let lambda = self.intensity(self.state.pts[i], Some(i));
                let accept = if lambda == 0.0 {
                    true
                } else {
                    let ratio = n as f64 / (lambda * area) * self.birth_prob / (1.0 - self.birth_prob);
                    self.rng.random::<f64>() < ratio
                };
                if accept {
                    self.state.remove(i);
                }
            }
        }
    }

    /// `lambda(u | x \ {x_i})` when `self_index = Some(i)`.
    fn intensity(&self, u: Point, self_index: Option<usize>) -> f64 {
        match self.spec.interaction_radius() {
            None => self.spec.base_intensity(u),
            Some(r) => {
                let nb = Neighbourhood::from_pairs(self.state.within(u, r, self_index), self_index);
                if matches!(self.spec.family(), crate::models::Family::Geyer) {
                    self.spec.intensity_local(u, &nb, &self.state)
                } else {
                    self.spec.intensity_local(u, &nb, &NoCounts)
                }
            }
        }
    }
}

/// Mutable point set with a uniform cell grid for radius queries.
pub(crate) struct CellIndex {
    window: Window,
    cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<usize>>,
    pts: Vec<Point>,
    cell_of: Vec<usize>,
}

impl CellIndex {
    pub(crate) fn new(window: Window, cell: f64) -> Self {
        let nx = ((window.width() / cell).floor() as usize).clamp(1, 512);
        let ny = ((window.height() / cell).floor() as usize).clamp(1, 512);
        Self {
            window,
            cell: (window.width() / nx as f64).max(window.height() / ny as f64),
            nx,
            ny,
            cells: vec![Vec::new(); nx * ny],
            pts: Vec::new(),
            cell_of: Vec::new(),
        }
    }

    fn coords(&self, u: Point) -> (usize, usize) {
        let cx = ((u.x - self.window.x_min()) / self.window.width() * self.nx as f64) as usize;
        let cy = ((u.y - self.window.y_min()) / self.window.height() * self.ny as f64) as usize;
        (cx.min(self.nx - 1), cy.min(self.ny - 1))
    }

    pub(crate) fn len(&self) -> usize {
        self.pts.len()
    }

    pub(crate) fn insert(&mut self, u: Point) {
        let (cx, cy) = self.coords(u);
        let c = cy * self.nx + cx;
        self.cells[c].push(self.pts.len());
        self.cell_of.push(c);
        self.pts.push(u);
    }

    pub(crate) fn remove(&mut self, i: usize) {
        let last = self.pts.len() - 1;
        let c = self.cell_of[i];
        let pos = self.cells[c].iter().position(|&j| j == i).expect("indexed point");
        self.cells[c].swap_remove(pos);
        if i != last {
            let cl = self.cell_of[last];
            let pos = self.cells[cl].iter().position(|&j| j == last).expect("indexed point");
            self.cells[cl][pos] = i;
        }
        self.pts.swap_remove(i);
        self.cell_of.swap_remove(i);
    }

    /// `(distance, index)` of points within closed distance `r` of `u`,
    /// skipping `skip`.
    pub(crate) fn within(&self, u: Point, r: f64, skip: Option<usize>) -> Vec<(f64, usize)> {
        let mut out = Vec::new();
        self.for_each_candidate(u, r, |j| {
            if Some(j) != skip {
                let d = distance(u, self.pts[j]);
                if d <= r {
                    out.push((d, j));
                }
            }
        });
        out
    }

    fn for_each_candidate(&self, u: Point, r: f64, mut f: impl FnMut(usize)) {
        let reach = (r / self.cell).ceil() as isize;
        let (cx, cy) = self.coords(u);
        let (cx, cy) = (cx as isize, cy as isize);
        for gy in (cy - reach).max(0)..=(cy + reach).min(self.ny as isize - 1) {
            for gx in (cx - reach).max(0)..=(cx + reach).min(self.nx as isize - 1) {
                for &j in &self.cells[gy as usize * self.nx + gx as usize] {
                    f(j);
                }
            }
        }
    }

    pub(crate) fn pattern(&self, window: Window) -> Result<PointPattern> {
        PointPattern::new(self.pts.clone(), window)
    }
}

impl NeighbourCounts for CellIndex {
    fn count_within(&self, j: usize, r: f64) -> usize {
        let y = self.pts[j];
        let mut n = 0;
        self.for_each_candidate(y, r, |i| {
            if i != j && distance(y, self.pts[i]) <= r {
                n += 1;
            }
        });
        n
    }
}
