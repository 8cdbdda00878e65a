//! Fixed-step gradient ascent on the log objective, linear and planar.
//!
//! When the objective is log-concave the plain climb from the midpoint seed
//! finds the global optimum. At extreme SNR skews the objective can lose
//! concavity and dip to an interior valley with its maximum at a range
//! boundary; to stay robust there, a climb that falls back to the inner
//! boundary is restarted once from the outer side, and both range edges are
//! always probed as candidate solutions. Under log-concavity neither
//! addition ever changes the answer.

use super::objective::{GradientMode, Objective, PlanarObjective};
use super::{SelError, SelectionResult, SelectionStrategy, StopReason, TracePoint};
use crate::netmodel::{Deployment, Point};
use serde::{Deserialize, Serialize};

/// Ascent parameters. The step size is applied in coordinates normalised by
/// the estimated base-to-user distance, so the update is
/// `x := x + step * d_hat^2 * F'`; this keeps the iteration stable across
/// cell scales and matches a step of 0.01 on kilometre-scaled positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AscentOptions {
    pub step: f64,
    pub max_iter: usize,
    pub mode: GradientMode,
    /// Record the full (position, log f) trace in the result.
    pub keep_trace: bool,
    /// How many candidates nearest to the continuous solution compete on
    /// achievable rate for the final pick. 1 reproduces the plain
    /// nearest-relay rule; the default of 5 is indistinguishable from it on
    /// dense grids but avoids rate cliffs when the grid is sparse.
    pub pick_neighbors: usize,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            step: 0.01,
            max_iter: 10_000,
            mode: GradientMode::Simplified,
            keep_trace: false,
            pick_neighbors: 5,
        }
    }
}

/// Final relay pick: among the `k` candidates nearest to the continuous
/// solution, take the one with the best achievable rate. Distance ties keep
/// the lowest index, and so do exact rate ties.
fn pick_candidate(
    candidates: &[Point],
    target: Point,
    k: usize,
    rate_of: impl Fn(usize) -> f64,
) -> (usize, Point) {
    let k = k.max(1).min(candidates.len());
    // Indices of the k nearest candidates (small k; insertion into a sorted
    // scratch list beats sorting the whole set).
    let mut nearest: Vec<(usize, f64)> = Vec::with_capacity(k + 1);
    for (i, &p) in candidates.iter().enumerate() {
        let d = p.distance_to(target);
        let pos = nearest.partition_point(|&(_, nd)| nd <= d);
        if pos < k {
            nearest.insert(pos, (i, d));
            nearest.truncate(k);
        }
    }
    let mut best = nearest[0].0;
    let mut best_rate = rate_of(best);
    for &(i, _) in &nearest[1..] {
        let r = rate_of(i);
        if r > best_rate || (r == best_rate && i < best) {
            best_rate = r;
            best = i;
        }
    }
    (best, candidates[best])
}

/// Exhaustive fallback for degenerate geometries (empty continuous domain):
/// pick the candidate with the best lattice PNC-B rate.
fn degenerate_pick(
    dep: &Deployment,
    rate_of: impl Fn(Point) -> f64,
    seed_point: Point,
) -> SelectionResult {
    let mut best = None::<(usize, f64)>;
    for (i, &p) in dep.relay_positions.iter().enumerate() {
        let r = rate_of(p);
        if best.map_or(true, |(_, br)| r > br) {
            best = Some((i, r));
        }
    }
    let (idx, rate) = best.unwrap();
    SelectionResult {
        chosen_index: idx,
        chosen_pos: dep.relay_positions[idx],
        x_star: seed_point,
        iterations: 0,
        trace: Vec::new(),
        achieved_rate: rate,
        strategy: SelectionStrategy::PncB,
        outage: false,
        stop: StopReason::Degenerate,
    }
}

struct Climb {
    best_x: f64,
    best_f: f64,
    trace: Vec<TracePoint>,
    iterations: usize,
    stop: StopReason,
}

fn climb_linear(
    obj: &Objective,
    seed: f64,
    lo: f64,
    hi: f64,
    edge_eps: f64,
    scale: f64,
    mode: GradientMode,
    opts: &AscentOptions,
) -> Climb {
    let mut x = seed;
    let mut f_cur = obj.log_f(x);
    let mut trace = Vec::new();
    if opts.keep_trace {
        trace.push(TracePoint { x, y: 0.0, log_f: f_cur });
    }
    let mut best = (x, f_cur);
    let mut iterations = 0usize;
    let mut stop = StopReason::MaxIter;
    for _ in 0..opts.max_iter {
        iterations += 1;
        let grad = obj.grad_log_f(x, mode);
        let mut x_new = x + scale * grad;
        let mut boundary = None;
        if x_new > hi {
            x_new = hi;
            boundary = Some(StopReason::Boundary);
        } else if x_new <= lo {
            x_new = lo + edge_eps;
            boundary = Some(StopReason::InnerBoundary);
        }
        let f_new = obj.log_f(x_new);
        if opts.keep_trace {
            trace.push(TracePoint { x: x_new, y: 0.0, log_f: f_new });
        }
        if f_new > best.1 {
            best = (x_new, f_new);
        }
        if let Some(reason) = boundary {
            stop = reason;
            break;
        }
        if f_new <= f_cur {
            stop = StopReason::Converged;
            break;
        }
        x = x_new;
        f_cur = f_new;
    }
    Climb { best_x: best.0, best_f: best.1, trace, iterations, stop }
}

/// Gradient-ascent relay selection on the linear model.
///
/// Starts just inside the midpoint of the search range and climbs until the
/// objective stops increasing, a step crosses a range boundary, or the
/// iteration budget runs out. The chosen relay is the candidate nearest to
/// the continuous solution.
pub fn select_relay_pncb_linear(
    dep: &Deployment,
    obj: &Objective,
    opts: &AscentOptions,
) -> Result<SelectionResult, SelError> {
    if dep.relay_positions.is_empty() {
        return Err(SelError::NoRelays);
    }
    let (lo, hi) = obj.domain();
    if lo >= hi {
        return Ok(degenerate_pick(
            dep,
            |p| obj.lattice_rate_at(p.x.abs(), (obj.x_b_hat - p.x).abs()),
            Point::on_axis(obj.x_b_hat / 2.0),
        ));
    }

    // Interior seed: the midpoint itself is an open boundary of the range.
    let offset = (0.01 * obj.x_b_hat * (1.0 / obj.d_big - 0.5)).max(1e-3);
    let clamp_seed = |s: f64| if s > lo && s <= hi { s } else { 0.5 * (lo + hi) };
    let scale = opts.step * obj.x_b_hat * obj.x_b_hat;
    let edge_eps = 1e-9 * obj.x_b_hat;

    let first = climb_linear(
        obj,
        clamp_seed(lo + offset),
        lo,
        hi,
        edge_eps,
        scale,
        opts.mode,
        opts,
    );
    let mut iterations = first.iterations;
    let mut winner = first;
    if winner.stop == StopReason::InnerBoundary {
        // The climb drifted to the inner edge; look for a second mode on the
        // outer side of the valley.
        let second = climb_linear(
            obj,
            clamp_seed(hi - offset),
            lo,
            hi,
            edge_eps,
            scale,
            opts.mode,
            opts,
        );
        iterations += second.iterations;
        if second.best_f > winner.best_f {
            winner = second;
        }
    }
    // Refinement: the simplified field's fixed point can sit slightly off
    // the true maximum on flat landscapes, and very flat instances exhaust
    // the iteration budget mid-walk. Continue from the best point with exact
    // derivatives until the walk converges (bounded patience).
    let mut rounds = 0;
    while rounds < 10 {
        let need = winner.stop == StopReason::MaxIter
            || (winner.stop == StopReason::Converged
                && opts.mode == GradientMode::Simplified
                && rounds == 0);
        if !need {
            break;
        }
        let cont = climb_linear(
            obj,
            winner.best_x,
            lo,
            hi,
            edge_eps,
            scale,
            GradientMode::Exact,
            opts,
        );
        iterations += cont.iterations;
        rounds += 1;
        if cont.best_f > winner.best_f {
            winner = cont;
        } else {
            break;
        }
    }

    // Edge probes (not part of any trace).
    let mut x_star = winner.best_x;
    let mut f_star = winner.best_f;
    for cand in [lo + edge_eps, hi] {
        let f = obj.log_f(cand);
        if f > f_star {
            f_star = f;
            x_star = cand;
        }
    }

    let (idx, pos) = pick_candidate(
        &dep.relay_positions,
        Point::on_axis(x_star),
        opts.pick_neighbors,
        |i| {
            let p = dep.relay_positions[i];
            obj.lattice_rate_at(p.x.abs(), (obj.x_b_hat - p.x).abs())
        },
    );
    let achieved = obj.lattice_rate_at(pos.x.abs(), (obj.x_b_hat - pos.x).abs());
    Ok(SelectionResult {
        chosen_index: idx,
        chosen_pos: pos,
        x_star: Point::on_axis(x_star),
        iterations,
        trace: winner.trace,
        achieved_rate: achieved,
        strategy: SelectionStrategy::PncB,
        outage: false,
        stop: winner.stop,
    })
}

struct PlanarClimb {
    best_p: Point,
    best_f: f64,
    trace: Vec<TracePoint>,
    iterations: usize,
    stop: StopReason,
}

fn climb_planar(
    obj: &PlanarObjective,
    seed: Point,
    lo: f64,
    hi: f64,
    edge_eps: f64,
    scale: f64,
    mode: GradientMode,
    opts: &AscentOptions,
) -> Option<PlanarClimb> {
    let clamp_radius = |p: Point, target: f64| -> Point {
        let r = p.radius();
        Point::new(p.x * target / r, p.y * target / r)
    };
    let mut p = seed;
    let mut f_cur = obj.log_f(p)?;
    let mut trace = Vec::new();
    if opts.keep_trace {
        trace.push(TracePoint { x: p.x, y: p.y, log_f: f_cur });
    }
    let mut best = (p, f_cur);
    let mut iterations = 0usize;
    let mut stop = StopReason::MaxIter;
    for _ in 0..opts.max_iter {
        iterations += 1;
        let Some((gx, gy)) = obj.grad_log_f(p, mode) else {
            stop = StopReason::Boundary;
            break;
        };
        let mut p_new = Point::new(p.x + scale * gx, p.y + scale * gy);
        let mut boundary = None;
        let r_new = p_new.radius();
        if r_new > hi {
            p_new = clamp_radius(p_new, hi);
            boundary = Some(StopReason::Boundary);
        } else if r_new <= lo {
            p_new = clamp_radius(p_new, lo + edge_eps);
            boundary = Some(StopReason::InnerBoundary);
        }
        let Some(f_new) = obj.log_f(p_new) else {
            stop = boundary.unwrap_or(StopReason::Boundary);
            break;
        };
        if opts.keep_trace {
            trace.push(TracePoint { x: p_new.x, y: p_new.y, log_f: f_new });
        }
        if f_new > best.1 {
            best = (p_new, f_new);
        }
        if let Some(reason) = boundary {
            stop = reason;
            break;
        }
        if f_new <= f_cur {
            stop = StopReason::Converged;
            break;
        }
        p = p_new;
        f_cur = f_new;
    }
    Some(PlanarClimb { best_p: best.0, best_f: best.1, trace, iterations, stop })
}

/// Gradient-ascent relay selection on the planar model: both coordinates are
/// updated simultaneously from the partial derivatives of the log objective.
/// The stop rules are the radial analogues of the linear ones.
pub fn select_relay_pncb_planar(
    dep: &Deployment,
    obj: &PlanarObjective,
    opts: &AscentOptions,
) -> Result<SelectionResult, SelError> {
    if dep.relay_positions.is_empty() {
        return Err(SelError::NoRelays);
    }
    let d_ab = obj.user_pos_hat.radius();
    let lo = d_ab / 2.0;
    let hi = (d_ab / obj.d_big).min(d_ab - obj.ref_dist);
    let unit = if d_ab > 0.0 {
        Point::new(obj.user_pos_hat.x / d_ab, obj.user_pos_hat.y / d_ab)
    } else {
        Point::new(1.0, 0.0)
    };
    let at_radius = |r: f64| Point::new(unit.x * r, unit.y * r);
    if lo >= hi {
        return Ok(degenerate_pick(dep, |p| obj.lattice_rate_at(p), at_radius(lo)));
    }

    let offset = (0.01 * d_ab * (1.0 / obj.d_big - 0.5)).max(1e-3);
    let clamp_seed = |r: f64| if r > lo && r <= hi { r } else { 0.5 * (lo + hi) };
    let scale = opts.step * d_ab * d_ab;
    let edge_eps = 1e-9 * d_ab;

    let Some(first) = climb_planar(
        obj,
        at_radius(clamp_seed(lo + offset)),
        lo,
        hi,
        edge_eps,
        scale,
        opts.mode,
        opts,
    ) else {
        return Ok(degenerate_pick(dep, |p| obj.lattice_rate_at(p), at_radius(lo)));
    };
    let mut iterations = first.iterations;
    let mut winner = first;
    if winner.stop == StopReason::InnerBoundary {
        if let Some(second) = climb_planar(
            obj,
            at_radius(clamp_seed(hi - offset)),
            lo,
            hi,
            edge_eps,
            scale,
            opts.mode,
            opts,
        ) {
            iterations += second.iterations;
            if second.best_f > winner.best_f {
                winner = second;
            }
        }
    }
    let mut rounds = 0;
    while rounds < 10 {
        let need = winner.stop == StopReason::MaxIter
            || (winner.stop == StopReason::Converged
                && opts.mode == GradientMode::Simplified
                && rounds == 0);
        if !need {
            break;
        }
        let Some(cont) = climb_planar(
            obj,
            winner.best_p,
            lo,
            hi,
            edge_eps,
            scale,
            GradientMode::Exact,
            opts,
        ) else {
            break;
        };
        iterations += cont.iterations;
        rounds += 1;
        if cont.best_f > winner.best_f {
            winner = cont;
        } else {
            break;
        }
    }

    // Edge probes along the seed axis.
    let mut x_star = winner.best_p;
    let mut f_star = winner.best_f;
    for cand in [at_radius(lo + edge_eps), at_radius(hi)] {
        if let Some(f) = obj.log_f(cand) {
            if f > f_star {
                f_star = f;
                x_star = cand;
            }
        }
    }

    let (idx, pos) = pick_candidate(&dep.relay_positions, x_star, opts.pick_neighbors, |i| {
        obj.lattice_rate_at(dep.relay_positions[i])
    });
    Ok(SelectionResult {
        chosen_index: idx,
        chosen_pos: pos,
        x_star,
        iterations,
        trace: winner.trace,
        achieved_rate: obj.lattice_rate_at(pos),
        strategy: SelectionStrategy::PncB,
        outage: false,
        stop: winner.stop,
    })
}
