//! Matrix games, the duality gap, 2x2 equilibria, and the parameterized
//! hard instances.
//!
//! Coordinate convention for 2x2 equilibria: `x* = (1 - delta_x, delta_x)` and
//! `y* = (delta_y, 1 - delta_y)`. Under this convention the loss differences
//! on `A_{dx,dy}` are `e_x = (y[1] - delta_y) / (1 - delta_x)` and
//! `e_y = (1 - delta_x - x[1]) / (1 - delta_x)` (1-based coordinates), both of
//! which vanish exactly at the equilibrium.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::simplex::SimplexPoint;

/// Tolerance for declaring a candidate 2x2 profile an equilibrium.
const NASH_GAP_TOLERANCE: f64 = 1e-12;

/// Loss matrix of the x-player (rows) against the y-player (columns).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixGame {
    entries: Vec<f64>,
    rows: usize,
    cols: usize,
    range: (f64, f64),
}

impl MatrixGame {
    /// Builds a game whose entries must lie in `[0, 1]`.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_range(rows, (0.0, 1.0))
    }

    pub fn with_range(rows: Vec<Vec<f64>>, range: (f64, f64)) -> Result<Self> {
        let d1 = rows.len();
        let d2 = rows.first().map_or(0, Vec::len);
        if d1 < 2 || d2 < 2 {
            return domain(format!("games need at least 2x2 actions, got {d1}x{d2}"));
        }
        if rows.iter().any(|r| r.len() != d2) {
            return domain("loss matrix rows have different lengths");
        }
        let (lo, hi) = range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return domain(format!("invalid declared range [{lo}, {hi}]"));
        }
        let entries: Vec<f64> = rows.into_iter().flatten().collect();
        if let Some(bad) = entries.iter().find(|a| !a.is_finite() || **a < lo || **a > hi) {
            return domain(format!("entry {bad} lies outside [{lo}, {hi}]"));
        }
        Ok(Self {
            entries,
            rows: d1,
            cols: d2,
            range,
        })
    }

    /// Builds a game whose declared range is the tightest interval holding
    /// its entries.
    pub fn unbounded(rows: Vec<Vec<f64>>) -> Result<Self> {
        let (lo, hi) = rows
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| (lo.min(*a), hi.max(*a)));
        Self::with_range(rows, (lo.min(0.0), hi.max(0.0)))
    }

    pub fn zeros(d1: usize, d2: usize) -> Result<Self> {
        Self::new(vec![vec![0.0; d2]; d1])
    }

    pub fn d1(&self) -> usize {
        self.rows
    }

    pub fn d2(&self) -> usize {
        self.cols
    }

    pub fn declared_range(&self) -> (f64, f64) {
        self.range
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    /// `A y`, the x-player's loss vector.
    pub fn loss_x(&self, y: &[f64]) -> Vec<f64> {
        self.entries
            .chunks(self.cols)
            .map(|row| row.iter().zip(y).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `-A^T x`, the y-player's loss vector.
    pub fn loss_y(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (row, xi) in self.entries.chunks(self.cols).zip(x) {
            for (o, a) in out.iter_mut().zip(row) {
                *o -= a * xi;
            }
        }
        out
    }

    /// `b1 * 1 + b2 * A`, with the declared range widened to fit.
    pub fn affine(&self, b1: f64, b2: f64) -> Result<Self> {
        let rows = self
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(|a| b1 + b2 * a).collect())
            .collect();
        Self::unbounded(rows)
    }

    fn check_dims(&self, x: &SimplexPoint, y: &SimplexPoint) -> Result<()> {
        if x.len() != self.rows || y.len() != self.cols {
            return domain(format!(
                "strategy dimensions {}x{} do not match a {}x{} game",
                x.len(),
                y.len(),
                self.rows,
                self.cols
            ));
        }
        Ok(())
    }

    fn is_2x2(&self) -> Result<()> {
        if self.rows != 2 || self.cols != 2 {
            return domain(format!("expected a 2x2 game, got {}x{}", self.rows, self.cols));
        }
        Ok(())
    }
}

/// Index of the largest entry, lowest index on ties.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, a) in v.iter().enumerate() {
        if *a > v[best] {
            best = i;
        }
    }
    best
}

/// Index of the smallest entry, lowest index on ties.
pub fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, a) in v.iter().enumerate() {
        if *a < v[best] {
            best = i;
        }
    }
    best
}

/// `max_j (A^T x)[j] - min_i (A y)[i]`.
pub fn duality_gap(game: &MatrixGame, x: &SimplexPoint, y: &SimplexPoint) -> Result<f64> {
    game.check_dims(x, y)?;
    Ok(gap_unchecked(game, x.probs(), y.probs()))
}

pub(crate) fn gap_unchecked(game: &MatrixGame, x: &[f64], y: &[f64]) -> f64 {
    let lx = game.loss_x(y);
    let ly = game.loss_y(x);
    let best_col = -ly[argmin(&ly)];
    let best_row = lx[argmin(&lx)];
    best_col - best_row
}

/// The hard instance `[[1/2 + delta, 1/2], [0, 1]]`.
pub fn make_a_delta(delta: f64) -> Result<MatrixGame> {
    if !(delta > 0.0 && delta < 0.5) {
        return domain(format!("delta must lie in (0, 1/2), got {delta}"));
    }
    MatrixGame::new(vec![vec![0.5 + delta, 0.5], vec![0.0, 1.0]])
}

/// The normalized 2x2 game whose equilibrium is
/// `x* = (1 - delta_x, delta_x)`, `y* = (delta_y, 1 - delta_y)`.
pub fn make_a_dxdy(delta_x: f64, delta_y: f64) -> Result<MatrixGame> {
    if !(delta_x > 0.0 && delta_x <= delta_y && delta_y <= 1.0 - delta_x) {
        return domain(format!(
            "need 0 < delta_x <= delta_y <= 1 - delta_x, got ({delta_x}, {delta_y})"
        ));
    }
    let scale = 1.0 - delta_x;
    MatrixGame::new(vec![
        vec![(1.0 - delta_y) / scale, (1.0 - delta_x - delta_y) / scale],
        vec![0.0, 1.0],
    ])
}

/// Equilibrium of a 2x2 game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NashPoint2x2 {
    pub x_star: SimplexPoint,
    pub y_star: SimplexPoint,
    /// `x*[2]` (1-based), the x-player's probability on its second action.
    pub delta_x: f64,
    /// `y*[1]` (1-based), the y-player's probability on its first action.
    pub delta_y: f64,
    pub fully_mixed: bool,
    pub game_value: f64,
}

impl NashPoint2x2 {
    fn from_probs(game: &MatrixGame, x1: f64, y1: f64, fully_mixed: bool) -> Self {
        let x_star = SimplexPoint::from_raw(vec![x1, 1.0 - x1]);
        let y_star = SimplexPoint::from_raw(vec![y1, 1.0 - y1]);
        let game_value = x_star.dot(&game.loss_x(y_star.probs()));
        Self {
            delta_x: 1.0 - x1,
            delta_y: y1,
            x_star,
            y_star,
            fully_mixed,
            game_value,
        }
    }

    /// Smallest equilibrium probability.
    pub fn min_probability(&self) -> f64 {
        self.x_star
            .probs()
            .iter()
            .chain(self.y_star.probs())
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Solves a 2x2 zero-sum game. Interior solutions of both indifference
/// equations are preferred; otherwise pure profiles and the pure-versus-mixed
/// indifference lines are searched in a fixed order.
pub fn nash_2x2(game: &MatrixGame) -> Result<NashPoint2x2> {
    game.is_2x2()?;
    let (a, b, c, d) = (game.get(0, 0), game.get(0, 1), game.get(1, 0), game.get(1, 1));
    let denom = a - b - c + d;
    let scale = a.abs().max(b.abs()).max(c.abs()).max(d.abs()).max(1.0);
    let degenerate = denom.abs() <= 1e-14 * scale;

    if !degenerate {
        // column player indifferent: (A^T x)[1] = (A^T x)[2]
        let x1 = (d - c) / denom;
        // row player indifferent: (A y)[1] = (A y)[2]
        let y1 = (d - b) / denom;
        if x1 > 0.0 && x1 < 1.0 && y1 > 0.0 && y1 < 1.0 {
            return Ok(NashPoint2x2::from_probs(game, x1, y1, true));
        }
    }

    // Candidate strategies for each player: uniform when the opponent is
    // indifferent everywhere, then the indifference point, then the vertices.
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    if degenerate && (d - c).abs() <= 1e-14 * scale {
        xs.push(0.5);
    }
    if degenerate && (d - b).abs() <= 1e-14 * scale {
        ys.push(0.5);
    }
    if !degenerate {
        let x1 = (d - c) / denom;
        let y1 = (d - b) / denom;
        if (0.0..=1.0).contains(&x1) {
            xs.push(x1);
        }
        if (0.0..=1.0).contains(&y1) {
            ys.push(y1);
        }
    }
    xs.extend([1.0, 0.0]);
    ys.extend([1.0, 0.0]);

    let mut best: Option<(f64, f64, f64)> = None;
    for &x1 in &xs {
        for &y1 in &ys {
            let gap = gap_unchecked(game, &[x1, 1.0 - x1], &[y1, 1.0 - y1]);
            if gap <= NASH_GAP_TOLERANCE {
                return Ok(NashPoint2x2::from_probs(game, x1, y1, false));
            }
            if best.is_none_or(|(g, _, _)| gap < g) {
                best = Some((gap, x1, y1));
            }
        }
    }
    // Unreachable for exact arithmetic; keep the closest candidate.
    let (_, x1, y1) = best.expect("candidate lists are non-empty");
    Ok(NashPoint2x2::from_probs(game, x1, y1, false))
}

/// Action relabelings applied to bring a 2x2 game into normalized form.
/// They are applied in the order: exchange players, swap rows, swap columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct Relabeling {
    pub swap_players: bool,
    pub swap_rows: bool,
    pub swap_cols: bool,
}

impl Relabeling {
    fn all() -> impl Iterator<Item = Relabeling> {
        (0..8u8).map(|bits| Relabeling {
            swap_players: bits & 4 != 0,
            swap_rows: bits & 2 != 0,
            swap_cols: bits & 1 != 0,
        })
    }

    /// The relabeled game.
    pub fn apply(&self, game: &MatrixGame) -> Result<MatrixGame> {
        let mut m = game.to_rows();
        if self.swap_players {
            // The y-player's loss matrix is -A^T.
            m = (0..m[0].len())
                .map(|j| m.iter().map(|row| -row[j]).collect())
                .collect();
        }
        if self.swap_rows {
            m.reverse();
        }
        if self.swap_cols {
            m.iter_mut().for_each(|row| row.reverse());
        }
        MatrixGame::unbounded(m)
    }

    /// Maps a strategy profile of the original game to the relabeled game.
    pub fn map_profile(&self, x: &SimplexPoint, y: &SimplexPoint) -> (SimplexPoint, SimplexPoint) {
        let (mut x, mut y) = if self.swap_players {
            (y.clone(), x.clone())
        } else {
            (x.clone(), y.clone())
        };
        if self.swap_rows {
            x = SimplexPoint::from_raw(x.probs().iter().rev().cloned().collect());
        }
        if self.swap_cols {
            y = SimplexPoint::from_raw(y.probs().iter().rev().cloned().collect());
        }
        (x, y)
    }
}

/// `game = b1 * 1 + b2 * A_{delta_x, delta_y}` after `relabeling`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub b1: f64,
    pub b2: f64,
    pub delta_x: f64,
    pub delta_y: f64,
    pub relabeling: Relabeling,
}

/// Writes a 2x2 game with a fully mixed equilibrium as an affine image of
/// `A_{delta_x, delta_y}` with `b2 > 0` and `delta_x <= delta_y <= 1 - delta_x`.
pub fn decompose_2x2(game: &MatrixGame) -> Result<Decomposition> {
    game.is_2x2()?;
    let nash = nash_2x2(game)?;
    if !nash.fully_mixed {
        return Err(Error::Precondition(
            "decomposition needs a fully mixed equilibrium".into(),
        ));
    }
    const TOL: f64 = 1e-12;
    for relabeling in Relabeling::all() {
        let g = relabeling.apply(game)?;
        let ne = nash_2x2(&g)?;
        let (dx, dy) = (ne.delta_x, ne.delta_y);
        let b1 = g.get(1, 0);
        let b2 = g.get(1, 1) - g.get(1, 0);
        if b2 <= 0.0 || dx > dy + TOL || dy > 1.0 - dx + TOL {
            continue;
        }
        // Clamp tolerance-level violations so the constructor accepts them.
        let dy = dy.max(dx).min(1.0 - dx);
        let base = make_a_dxdy(dx, dy)?;
        let reconstructs = (0..2).all(|i| {
            (0..2).all(|j| (b1 + b2 * base.get(i, j) - g.get(i, j)).abs() <= 1e-10 * (1.0 + b2))
        });
        if reconstructs {
            return Ok(Decomposition {
                b1,
                b2,
                delta_x: dx,
                delta_y: dy,
                relabeling,
            });
        }
    }
    Err(Error::Precondition(
        "no relabeling brings the game into normalized form".into(),
    ))
}
