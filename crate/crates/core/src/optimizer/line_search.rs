//! Line search for the strong Wolfe conditions: bracketing followed by
//! interpolating zoom. Non-finite trial points count as overshoots.
//!
//! Trials that already fail sufficient decrease are evaluated without a
//! gradient; the zoom then interpolates them quadratically instead of with a
//! cubic.

use super::Objective;

const SUFFICIENT_DECREASE: f64 = 1e-4;
const CURVATURE: f64 = 0.9;
const MAX_BRACKET: usize = 40;
const MAX_ZOOM: usize = 40;
const REFINE_SLOPE: f64 = 0.1;

/// A trial point along the search direction. `gradient` is empty and `slope`
/// NaN for value-only trials.
#[derive(Debug, Clone)]
pub(crate) struct Trial {
    pub alpha: f64,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub slope: f64,
}

impl Trial {
    fn finite(&self) -> bool {
        self.value.is_finite() && self.gradient.iter().all(|g| g.is_finite())
    }

    fn has_slope(&self) -> bool {
        !self.slope.is_nan()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Ray<'a, O: ?Sized> {
    objective: &'a O,
    origin: &'a [f64],
    direction: &'a [f64],
    evaluations: usize,
}

impl<O: Objective + ?Sized> Ray<'_, O> {
    fn point(&self, alpha: f64) -> Vec<f64> {
        self.origin.iter().zip(self.direction).map(|(x, p)| x + alpha * p).collect()
    }

    /// Evaluates the trial at `alpha`, skipping the gradient when the value
    /// is non-finite or fails sufficient decrease from `start`.
    fn eval(&mut self, start: &Trial, alpha: f64) -> Trial {
        self.evaluations += 1;
        let point = self.point(alpha);
        let value = self.objective.value(&point);
        if !value.is_finite() || value > start.value + SUFFICIENT_DECREASE * alpha * start.slope {
            return Trial { alpha, value, gradient: Vec::new(), slope: f64::NAN };
        }
        let (value, gradient) = self.objective.value_and_gradient(&point);
        let slope = dot(&gradient, self.direction);
        Trial { alpha, value, gradient, slope }
    }
}

/// Minimizer of the quadratic matching `lo`'s value and slope and `hi`'s value.
fn quadratic_minimizer(lo: &Trial, hi: &Trial) -> Option<f64> {
    let d = hi.alpha - lo.alpha;
    let curvature = hi.value - lo.value - lo.slope * d;
    if !(curvature > 0.0) {
        return None;
    }
    let a = lo.alpha - lo.slope * d * d / (2.0 * curvature);
    a.is_finite().then_some(a)
}

/// Minimizer of the cubic through two points with slopes, or `None` when the
/// cubic has no usable minimum.
fn cubic_minimizer(lo: &Trial, hi: &Trial) -> Option<f64> {
    let d1 = lo.slope + hi.slope - 3.0 * (lo.value - hi.value) / (lo.alpha - hi.alpha);
    let radicand = d1 * d1 - lo.slope * hi.slope;
    if !(radicand >= 0.0) {
        return None;
    }
    let d2 = (hi.alpha - lo.alpha).signum() * radicand.sqrt();
    let a = hi.alpha - (hi.alpha - lo.alpha) * (hi.slope + d2 - d1) / (hi.slope - lo.slope + 2.0 * d2);
    a.is_finite().then_some(a)
}

/// Result of a line search: the accepted trial, or `None` when no point with
/// sufficient decrease was found, plus the number of objective evaluations.
pub(crate) fn strong_wolfe<O: Objective + ?Sized>(
    objective: &O,
    origin: &[f64],
    value: f64,
    gradient: &[f64],
    direction: &[f64],
    initial_step: f64,
) -> (Option<Trial>, usize) {
    let mut ray = Ray { objective, origin, direction, evaluations: 0 };
    let start = Trial { alpha: 0.0, value, gradient: gradient.to_vec(), slope: dot(gradient, direction) };
    let result = search(&mut ray, &start, initial_step);
    (result, ray.evaluations)
}

fn armijo(start: &Trial, t: &Trial) -> bool {
    t.value <= start.value + SUFFICIENT_DECREASE * t.alpha * start.slope
}

fn curvature(start: &Trial, t: &Trial) -> bool {
    t.slope.abs() <= -CURVATURE * start.slope
}

fn search<O: Objective + ?Sized>(ray: &mut Ray<'_, O>, start: &Trial, initial_step: f64) -> Option<Trial> {
    let mut prev = start.clone();
    let mut alpha = initial_step;
    for i in 0..MAX_BRACKET {
        let t = ray.eval(start, alpha);
        if !t.finite() {
            return zoom(ray, start, prev, t.alpha, None);
        }
        if !armijo(start, &t) || (i > 0 && t.value >= prev.value) {
            let far = t.alpha;
            return zoom(ray, start, prev, far, Some(t));
        }
        if curvature(start, &t) {
            return Some(if i == 0 { refine(ray, start, t) } else { t });
        }
        if t.slope >= 0.0 {
            let far = prev.alpha;
            return zoom(ray, start, t, far, Some(prev));
        }
        alpha = 2.0 * t.alpha;
        prev = t;
    }
    (prev.alpha > 0.0).then_some(prev)
}

/// An acceptable first trial whose slope is still far from zero is
/// followed by one secant step towards the stationary point along the ray
/// (exact on quadratics); the better of the two acceptable points is kept.
fn refine<O: Objective + ?Sized>(ray: &mut Ray<'_, O>, start: &Trial, t: Trial) -> Trial {
    if t.slope.abs() <= REFINE_SLOPE * start.slope.abs() || t.slope <= start.slope {
        return t;
    }
    let alpha = t.alpha * start.slope / (start.slope - t.slope);
    if !(alpha.is_finite() && alpha > 0.0) || (alpha - t.alpha).abs() <= 1e-3 * t.alpha {
        return t;
    }
    let r = ray.eval(start, alpha);
    if r.finite() && armijo(start, &r) && curvature(start, &r) && r.value < t.value {
        r
    } else {
        t
    }
}

/// `lo` always satisfies sufficient decrease and has the lowest value seen;
/// `hi` is `None` when the trial at the far end `hi_alpha` was non-finite.
fn zoom<O: Objective + ?Sized>(
    ray: &mut Ray<'_, O>,
    start: &Trial,
    mut lo: Trial,
    mut hi_alpha: f64,
    mut hi: Option<Trial>,
) -> Option<Trial> {
    for _ in 0..MAX_ZOOM {
        let (a_min, a_max) = (lo.alpha.min(hi_alpha), lo.alpha.max(hi_alpha));
        let width = a_max - a_min;
        if width <= f64::EPSILON * a_max.max(f64::MIN_POSITIVE) {
            break;
        }
        let guess = hi.as_ref().and_then(|h| {
            if h.has_slope() {
                cubic_minimizer(&lo, h)
            } else {
                quadratic_minimizer(&lo, h)
            }
        });
        let alpha = match guess {
            Some(a) if a > a_min + 0.1 * width && a < a_max - 0.1 * width => a,
            _ => 0.5 * (lo.alpha + hi_alpha),
        };
        let t = ray.eval(start, alpha);
        if !t.finite() {
            hi_alpha = t.alpha;
            hi = None;
            continue;
        }
        if !armijo(start, &t) || t.value >= lo.value {
            hi_alpha = t.alpha;
            hi = Some(t);
        } else {
            if curvature(start, &t) {
                return Some(t);
            }
            if t.slope * (hi_alpha - lo.alpha) >= 0.0 {
                hi_alpha = lo.alpha;
                hi = Some(lo);
            }
            lo = t;
        }
    }
    (lo.alpha > 0.0).then_some(lo)
}
