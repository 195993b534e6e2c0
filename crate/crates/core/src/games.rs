//! Adaptive answering games against deterministic certifiers.
//!
//! Each game answers label queries on behalf of a hidden hypothesis that is
//! only fixed after the certifier commits to a verdict, then exhibits a
//! hypothesis that agrees with every answer and whose robust loss
//! contradicts the verdict. All geometry is exact.
//!
//! * The L2 game hides a halfplane `h_(a,b)(z) = 1{a z1 + b z2 + 1 > 0}`
//!   under a point mass at the origin with label 1 and `U` the closed unit
//!   L2 ball. The robust loss of `h_(a,b)` is 1 iff `a² + b² >= 1`. A query
//!   `z` splits the dual `(a,b)`-plane along `z1 a + z2 b + 1 = 0`; the game
//!   keeps one convex cell that straddles the unit circle.
//! * The tolerant singleton game hides `h_p(z) = 1{z = p}` under a point
//!   mass at `x0` with label 0, answers 0 to everything, and finally places
//!   `p` inside `U(x0)` or outside `V(x0)` away from every query.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::Hypothesis;
use crate::loss;
use crate::oracles::TranscriptEntry;
use crate::perturbation::{Norm, Perturbation};
use crate::point::Point;
use crate::rational::{self, Rational};
use crate::trials;

/// Hard cap on the number of queries a strategy may declare.
pub const MAX_STRATEGY_QUERIES: usize = 10_000;

type Pt = (Rational, Rational);

/// The line `a u + b v + c = 0` in the dual plane.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Line {
    #[serde(with = "rational::serde_str")]
    pub a: Rational,
    #[serde(with = "rational::serde_str")]
    pub b: Rational,
    #[serde(with = "rational::serde_str")]
    pub c: Rational,
}

impl Line {
    pub fn eval(&self, p: &Pt) -> Rational {
        &self.a * &p.0 + &self.b * &p.1 + &self.c
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == rational::zero() && self.b == rational::zero()
    }
}

/// Dual line of a query point: `z1 a + z2 b + 1 = 0`.
pub fn dual_line(z: &Point) -> Result<Line> {
    let (z1, z2) = z.as_plane().ok_or_else(|| Error::PointOutsideDomain(Box::new(z.clone())))?;
    Ok(Line { a: z1.clone(), b: z2.clone(), c: rational::one() })
}

/// A constraint `sign(line) > 0` (`positive`) or `< 0` on the open cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Halfplane {
    pub line: Line,
    pub positive: bool,
}

/// Open convex polygon in the dual plane, kept as its halfplane
/// constraints and its counter-clockwise vertex list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub constraints: Vec<Halfplane>,
    pub vertices: Vec<Pt>,
}

fn norm2(p: &Pt) -> Rational {
    &p.0 * &p.0 + &p.1 * &p.1
}

fn cross(o: &Pt, a: &Pt, b: &Pt) -> Rational {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Twice the signed area.
fn area2(vs: &[Pt]) -> Rational {
    let n = vs.len();
    let mut s = rational::zero();
    for i in 0..n {
        let (a, b) = (&vs[i], &vs[(i + 1) % n]);
        s += &a.0 * &b.1 - &a.1 * &b.0;
    }
    s
}

impl Cell {
    /// The box `[-4, 4]²`.
    pub fn bounding_box() -> Self {
        let four = rational::int(4);
        let m = -four.clone();
        let z = rational::zero();
        let o = rational::one();
        let side = |a: &Rational, b: &Rational| Halfplane {
            line: Line { a: a.clone(), b: b.clone(), c: four.clone() },
            positive: true,
        };
        Cell {
            constraints: vec![side(&o, &z), side(&-o.clone(), &z), side(&z, &o), side(&z, &-o.clone())],
            vertices: vec![
                (m.clone(), m.clone()),
                (four.clone(), m.clone()),
                (four.clone(), four.clone()),
                (m.clone(), four.clone()),
            ],
        }
    }

    /// Twice the area, exact.
    pub fn area2(&self) -> Rational {
        area2(&self.vertices)
    }

    /// Strict interior membership.
    pub fn contains_interior(&self, p: &Pt) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| cross(&self.vertices[i], &self.vertices[(i + 1) % n], p) > rational::zero())
    }

    /// Closed membership.
    fn contains_closed(&self, p: &Pt) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| cross(&self.vertices[i], &self.vertices[(i + 1) % n], p) >= rational::zero())
    }

    /// Average of the vertices; strictly interior for a cell with nonempty
    /// interior.
    pub fn centroid(&self) -> Pt {
        let n = rational::int(self.vertices.len() as i64);
        let sx: Rational = self.vertices.iter().map(|v| v.0.clone()).sum();
        let sy: Rational = self.vertices.iter().map(|v| v.1.clone()).sum();
        (sx / &n, sy / &n)
    }

    /// Closest point of the closed cell to the origin.
    pub fn closest_to_origin(&self) -> Pt {
        let origin = (rational::zero(), rational::zero());
        if self.contains_closed(&origin) {
            return origin;
        }
        let n = self.vertices.len();
        let mut best: Option<(Rational, Pt)> = None;
        for i in 0..n {
            let p = &self.vertices[i];
            let q = &self.vertices[(i + 1) % n];
            let d = (&q.0 - &p.0, &q.1 - &p.1);
            let len2 = norm2(&d);
            let mut t = -(&p.0 * &d.0 + &p.1 * &d.1) / &len2;
            if t < rational::zero() {
                t = rational::zero();
            } else if t > rational::one() {
                t = rational::one();
            }
            let c = (&p.0 + &t * &d.0, &p.1 + &t * &d.1);
            let n2 = norm2(&c);
            if best.as_ref().is_none_or(|(b, _)| n2 < *b) {
                best = Some((n2, c));
            }
        }
        best.unwrap().1
    }

    /// Squared distance from the origin to the closed cell.
    pub fn min_norm2(&self) -> Rational {
        norm2(&self.closest_to_origin())
    }

    /// Vertex whose squared norm is nearest to 1, ties broken
    /// lexicographically.
    fn circle_nearest_vertex(&self) -> &Pt {
        self.vertices
            .iter()
            .min_by(|a, b| {
                let da = rational::abs(&(norm2(a) - rational::one()));
                let db = rational::abs(&(norm2(b) - rational::one()));
                da.cmp(&db).then_with(|| a.cmp(b))
            })
            .unwrap()
    }
}

fn clip(vertices: &[Pt], line: &Line, positive: bool) -> Vec<Pt> {
    let n = vertices.len();
    let signed = |p: &Pt| {
        let v = line.eval(p);
        if positive {
            v
        } else {
            -v
        }
    };
    let zero = rational::zero();
    let mut out: Vec<Pt> = Vec::new();
    for i in 0..n {
        let p = &vertices[i];
        let q = &vertices[(i + 1) % n];
        let vp = signed(p);
        let vq = signed(q);
        if vp >= zero {
            out.push(p.clone());
        }
        if (vp > zero && vq < zero) || (vp < zero && vq > zero) {
            let t = &vp / (&vp - &vq);
            out.push((&p.0 + &t * (&q.0 - &p.0), &p.1 + &t * (&q.1 - &p.1)));
        }
    }
    out.dedup();
    if out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    // Drop collinear vertices so the vertex list stays strictly convex.
    let mut i = 0;
    while out.len() >= 3 && i < out.len() {
        let k = out.len();
        if cross(&out[(i + k - 1) % k], &out[i], &out[(i + 1) % k]) == zero {
            out.remove(i);
        } else {
            i += 1;
        }
    }
    out
}

/// Splits a cell by `line` into its open positive and negative parts,
/// omitting parts with empty interior.
pub fn split_cell(cell: &Cell, line: &Line) -> (Option<Cell>, Option<Cell>) {
    if line.is_degenerate() {
        let whole = line.c > rational::zero();
        return if whole { (Some(cell.clone()), None) } else { (None, Some(cell.clone())) };
    }
    let part = |positive: bool| {
        let vs = clip(&cell.vertices, line, positive);
        if vs.len() < 3 || area2(&vs) <= rational::zero() {
            return None;
        }
        let mut constraints = cell.constraints.clone();
        constraints.push(Halfplane { line: line.clone(), positive });
        Some(Cell { constraints, vertices: vs })
    };
    (part(true), part(false))
}

/// Whether the open cell contains points with `a² + b² < 1` and points with
/// `a² + b² > 1`.
pub fn straddles_unit_circle(cell: &Cell) -> bool {
    let one = rational::one();
    cell.min_norm2() < one && cell.vertices.iter().any(|v| norm2(v) > one)
}

/// Point strictly inside `cell` on the requested side of the unit circle.
fn interior_point(cell: &Cell, outside: bool) -> Result<Pt> {
    let one = rational::one();
    let c = cell.centroid();
    let anchor = if outside {
        cell.vertices
            .iter()
            .filter(|v| norm2(v) > one)
            .max_by(|a, b| norm2(a).cmp(&norm2(b)).then_with(|| b.cmp(a)))
            .cloned()
    } else {
        Some(cell.closest_to_origin()).filter(|q| norm2(q) < one)
    };
    let anchor = anchor.ok_or_else(|| Error::InvariantViolation("cell does not straddle the unit circle".into()))?;
    let wanted = |p: &Pt| if outside { norm2(p) > one } else { norm2(p) < one };
    if wanted(&c) && cell.contains_interior(&c) {
        return Ok(c);
    }
    let mut step = rational::q(1, 2);
    for _ in 0..256 {
        let p = (&anchor.0 + &step * (&c.0 - &anchor.0), &anchor.1 + &step * (&c.1 - &anchor.1));
        if wanted(&p) && cell.contains_interior(&p) {
            return Ok(p);
        }
        step /= rational::int(2);
    }
    Err(Error::InvariantViolation("no interior point found on the requested side".into()))
}

/// A certifier's claim: robust loss is high (`Lossy`, estimate 1) or low
/// (`NotLossy`, estimate 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Lossy,
    NotLossy,
}

impl Verdict {
    pub fn estimate(self) -> Rational {
        match self {
            Verdict::Lossy => rational::one(),
            Verdict::NotLossy => rational::zero(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    Query(Point),
    Decide(Verdict),
}

/// A deterministic certifier: its next action is a function of the
/// transcript so far.
pub trait CertifierStrategy {
    fn max_queries(&self) -> usize;
    fn next(&self, transcript: &[(Point, bool)]) -> Action;
}

/// Fixed query list followed by a fixed verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptedStrategy {
    pub queries: Vec<Point>,
    pub verdict: Verdict,
}

impl CertifierStrategy for ScriptedStrategy {
    fn max_queries(&self) -> usize {
        self.queries.len()
    }

    fn next(&self, transcript: &[(Point, bool)]) -> Action {
        match self.queries.get(transcript.len()) {
            Some(p) => Action::Query(p.clone()),
            None => Action::Decide(self.verdict),
        }
    }
}

/// Seeded strategy whose queries depend on the answers received so far.
/// Queries are planar points with coordinates `k/8`, `|k| <= 32`.
#[derive(Clone, Debug)]
pub struct RandomStrategy {
    pub seed: u64,
    pub max_queries: usize,
}

impl RandomStrategy {
    pub fn new(seed: u64, max_queries: usize) -> Self {
        RandomStrategy { seed, max_queries }
    }

    fn planned(&self) -> usize {
        use rand::Rng;
        trials::trial_rng(self.seed, u64::MAX).gen_range(0..=self.max_queries)
    }
}

impl CertifierStrategy for RandomStrategy {
    fn max_queries(&self) -> usize {
        self.max_queries
    }

    fn next(&self, transcript: &[(Point, bool)]) -> Action {
        use rand::Rng;
        let mix = transcript
            .iter()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, (_, l)| (h ^ (*l as u64 + 1)).wrapping_mul(0x100_0000_01b3));
        let mut rng = trials::trial_rng(self.seed ^ mix, transcript.len() as u64);
        if transcript.len() >= self.planned() {
            return Action::Decide(if rng.gen() { Verdict::Lossy } else { Verdict::NotLossy });
        }
        let mut coord = || rational::q(rng.gen_range(-32..=32), 8);
        Action::Query(Point::plane(coord(), coord()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GameKind {
    L2,
    Tolerant,
}

/// The hypothesis fixed at the end of a game.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RefutingHypothesis {
    /// `h_(a,b)(z) = 1{a z1 + b z2 + 1 > 0}`.
    Dual {
        #[serde(with = "rational::serde_str")]
        a: Rational,
        #[serde(with = "rational::serde_str")]
        b: Rational,
    },
    /// `h_p(z) = 1{z = p}`.
    Singleton { p: Point },
}

impl RefutingHypothesis {
    pub fn eval(&self, z: &Point) -> Result<bool> {
        match self {
            RefutingHypothesis::Dual { a, b } => {
                let (z1, z2) = z.as_plane().ok_or_else(|| Error::PointOutsideDomain(Box::new(z.clone())))?;
                Ok(a * z1 + b * z2 + rational::one() > rational::zero())
            }
            RefutingHypothesis::Singleton { p } => Ok(z == p),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Refutation {
    pub game: GameKind,
    pub transcript: Vec<TranscriptEntry>,
    pub verdict: Verdict,
    pub hypothesis: RefutingHypothesis,
    /// Point mass of the hidden distribution and its label.
    pub x0: Point,
    pub x0_label: u8,
    #[serde(with = "rational::serde_str")]
    pub r: Rational,
    /// Outer radius for the tolerant game; equal to `r` otherwise.
    #[serde(with = "rational::serde_str")]
    pub r_outer: Rational,
    #[serde(with = "rational::serde_str")]
    pub eps: Rational,
    /// Robust loss of the refuting hypothesis under the inner and outer
    /// balls.
    #[serde(with = "rational::serde_str")]
    pub loss_inner: Rational,
    #[serde(with = "rational::serde_str")]
    pub loss_outer: Rational,
    pub splits: usize,
}

fn transcript_entries(t: &[(Point, bool)]) -> Vec<TranscriptEntry> {
    t.iter().enumerate().map(|(index, (x, l))| TranscriptEntry { x: x.clone(), label: *l as u8, index }).collect()
}

impl Refutation {
    /// Exact robust loss of the refuting hypothesis at the point mass under
    /// a closed L2 ball of radius `r`.
    fn loss_at(&self, r: &Rational) -> Result<Rational> {
        let y = self.x0_label == 1;
        let lossy = match &self.hypothesis {
            RefutingHypothesis::Dual { a, b } => {
                // Boundary meets the ball iff (a² + b²) r² >= 1.
                self.hypothesis.eval(&self.x0)? != y || (a * a + b * b) * r * r >= rational::one()
            }
            RefutingHypothesis::Singleton { p } => {
                let u = Perturbation::ball(Norm::L2, r.clone())?;
                loss::robust_loss_point(&Hypothesis::Singleton(p.clone()), &self.x0, y, &u)?
            }
        };
        Ok(if lossy { rational::one() } else { rational::zero() })
    }

    /// Replays the transcript against the refuting hypothesis and checks
    /// that the verdict's estimate falls outside
    /// `[R_inner - eps, R_outer + eps]`.
    pub fn verify(&self) -> Result<()> {
        for e in &self.transcript {
            if self.hypothesis.eval(&e.x)? as u8 != e.label {
                return Err(Error::InvariantViolation(format!(
                    "refuting hypothesis disagrees with answer {} at {}",
                    e.index, e.x
                )));
            }
        }
        let inner = self.loss_at(&self.r)?;
        let outer = self.loss_at(&self.r_outer)?;
        if inner != self.loss_inner || outer != self.loss_outer {
            return Err(Error::InvariantViolation("recorded losses do not match recomputation".into()));
        }
        let est = self.verdict.estimate();
        let consistent = est >= &inner - &self.eps && est <= &outer + &self.eps;
        if consistent {
            return Err(Error::InvariantViolation(format!(
                "verdict {:?} is consistent with losses {} and {}",
                self.verdict,
                rational::format(&inner),
                rational::format(&outer)
            )));
        }
        Ok(())
    }
}

/// Drives `strategy` until it decides, calling `answer` for each query.
fn play(
    strategy: &dyn CertifierStrategy,
    mut answer: impl FnMut(&Point) -> Result<bool>,
) -> Result<(Vec<(Point, bool)>, Verdict)> {
    let cap = strategy.max_queries();
    if cap > MAX_STRATEGY_QUERIES {
        return Err(Error::InvalidParameter(format!(
            "strategy declares {cap} queries, limit is {MAX_STRATEGY_QUERIES}"
        )));
    }
    let mut transcript = Vec::new();
    loop {
        match strategy.next(&transcript) {
            Action::Decide(v) => return Ok((transcript, v)),
            Action::Query(z) => {
                if transcript.len() >= cap {
                    return Err(Error::StrategyOverrun(cap));
                }
                let l = answer(&z)?;
                transcript.push((z, l));
            }
        }
    }
}

/// Plays the dual-arrangement game and returns a verified refutation.
pub fn run_l2_game(strategy: &dyn CertifierStrategy) -> Result<Refutation> {
    let mut cell = Cell::bounding_box();
    let mut splits = 0;
    let origin = (rational::zero(), rational::zero());
    let (transcript, verdict) = play(strategy, |z| {
        let line = dual_line(z)?;
        if line.is_degenerate() {
            return Ok(true);
        }
        let prefer_positive = line.eval(cell.circle_nearest_vertex()) >= rational::zero();
        let (pos, neg) = split_cell(&cell, &line);
        let pos = pos.filter(straddles_unit_circle);
        let neg = neg.filter(straddles_unit_circle);
        let (next, label) = match (prefer_positive, pos, neg) {
            (true, Some(c), _) => (c, true),
            (false, _, Some(c)) => (c, false),
            (_, Some(c), None) => (c, true),
            (_, None, Some(c)) => (c, false),
            (_, None, None) => return Err(Error::InvariantViolation(format!("no straddling cell after query {z}"))),
        };
        cell = next;
        splits += 1;
        Ok(label)
    })?;
    if !straddles_unit_circle(&cell) {
        return Err(Error::InvariantViolation("final cell does not straddle the unit circle".into()));
    }
    let (a, b) = interior_point(&cell, verdict == Verdict::NotLossy)?;
    let mut refutation = Refutation {
        game: GameKind::L2,
        transcript: transcript_entries(&transcript),
        verdict,
        hypothesis: RefutingHypothesis::Dual { a, b },
        x0: Point::Plane(origin.0, origin.1),
        x0_label: 1,
        r: rational::one(),
        r_outer: rational::one(),
        eps: rational::q(1, 4),
        loss_inner: rational::zero(),
        loss_outer: rational::zero(),
        splits,
    };
    refutation.loss_inner = refutation.loss_at(&refutation.r)?;
    refutation.loss_outer = refutation.loss_inner.clone();
    refutation.verify()?;
    Ok(refutation)
}

/// Plays the tolerant singleton game around `x0` with `U` the L2 ball of
/// radius `r` and `V` the L2 ball of radius `r (1 + γ)`.
pub fn run_tolerant_singleton_game(
    strategy: &dyn CertifierStrategy,
    x0: &Point,
    r: &Rational,
    gamma: &Rational,
) -> Result<Refutation> {
    if x0.as_plane().is_none() {
        return Err(Error::PointOutsideDomain(Box::new(x0.clone())));
    }
    if *r <= rational::zero() || *gamma <= rational::zero() {
        return Err(Error::InvalidParameter("radius and gamma must be positive".into()));
    }
    let (transcript, verdict) = play(strategy, |_| Ok(false))?;
    let r_outer = r * (rational::one() + gamma);
    let queried = |p: &Point| transcript.iter().any(|(z, _)| z == p);
    let zero = rational::zero();
    let mut p = None;
    let mut d = rational::one();
    for _ in 0..(transcript.len() + 2) {
        let cand = match verdict {
            // Inside U(x0) \ {x0}: offsets r/2, r/4, ...
            Verdict::NotLossy => x0.offset(&(r * &d / rational::int(2)), &zero),
            // Outside V(x0): offsets R(1 + 1), R(1 + 1/2), ...
            Verdict::Lossy => x0.offset(&(&r_outer * (rational::one() + &d)), &zero),
        };
        if !queried(&cand) {
            p = Some(cand);
            break;
        }
        d /= rational::int(2);
    }
    let p = p.ok_or_else(|| Error::InvariantViolation("no free point found".into()))?;
    let mut refutation = Refutation {
        game: GameKind::Tolerant,
        transcript: transcript_entries(&transcript),
        verdict,
        hypothesis: RefutingHypothesis::Singleton { p },
        x0: x0.clone(),
        x0_label: 0,
        r: r.clone(),
        r_outer,
        eps: rational::q(1, 4),
        loss_inner: rational::zero(),
        loss_outer: rational::zero(),
        splits: 0,
    };
    refutation.loss_inner = refutation.loss_at(&refutation.r)?;
    refutation.loss_outer = refutation.loss_at(&refutation.r_outer)?;
    refutation.verify()?;
    Ok(refutation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};

    fn pt(a: Rational, b: Rational) -> Pt {
        (a, b)
    }

    #[test]
    fn dual_line_examples() {
        let l = dual_line(&Point::plane(int(2), int(0))).unwrap();
        assert_eq!(l.eval(&pt(q(-1, 2), int(7))), int(0));
        assert!(dual_line(&Point::plane(int(0), int(0))).unwrap().is_degenerate());
        assert!(dual_line(&Point::sym("a")).is_err());
    }

    #[test]
    fn box_splits() {
        let b = Cell::bounding_box();
        assert!(straddles_unit_circle(&b));
        let l = Line { a: int(1), b: int(0), c: int(0) };
        let (p, n) = split_cell(&b, &l);
        let (p, n) = (p.unwrap(), n.unwrap());
        assert_eq!(p.vertices.len(), 4);
        assert_eq!(n.vertices.len(), 4);
        assert_eq!(p.area2() + n.area2(), b.area2());
        let miss = Line { a: int(1), b: int(0), c: int(10) };
        let (p, n) = split_cell(&b, &miss);
        assert_eq!(p.unwrap().vertices, b.vertices);
        assert!(n.is_none());
    }

    fn small_square(cx: Rational, cy: Rational) -> Cell {
        let h = q(1, 100);
        let mut c = Cell::bounding_box();
        c.vertices = vec![(&cx - &h, &cy - &h), (&cx + &h, &cy - &h), (&cx + &h, &cy + &h), (&cx - &h, &cy + &h)];
        c
    }

    #[test]
    fn straddle_cases() {
        assert!(!straddles_unit_circle(&small_square(int(2), int(2))));
        assert!(!straddles_unit_circle(&small_square(int(0), int(0))));
        assert!(straddles_unit_circle(&small_square(int(1), int(0))));
    }

    #[test]
    fn immediate_verdicts_are_refuted() {
        for v in [Verdict::Lossy, Verdict::NotLossy] {
            let s = ScriptedStrategy { queries: vec![], verdict: v };
            let r = run_l2_game(&s).unwrap();
            assert_eq!(r.loss_inner, if v == Verdict::Lossy { int(0) } else { int(1) });
        }
    }

    #[test]
    fn scripted_single_query() {
        let s = ScriptedStrategy { queries: vec![Point::plane(int(2), int(0))], verdict: Verdict::NotLossy };
        let r = run_l2_game(&s).unwrap();
        assert_eq!(r.transcript.len(), 1);
        assert_eq!(r.splits, 1);
        r.verify().unwrap();
    }

    #[test]
    fn random_strategies() {
        for seed in 0..20 {
            let s = RandomStrategy::new(seed, 30);
            run_l2_game(&s).unwrap().verify().unwrap();
            run_tolerant_singleton_game(&s, &Point::plane(int(0), int(0)), &int(1), &q(1, 10)).unwrap();
        }
    }

    #[test]
    fn tolerant_avoids_queried_points() {
        let x0 = Point::plane(int(0), int(0));
        let r = int(1);
        let s = ScriptedStrategy { queries: vec![], verdict: Verdict::NotLossy };
        let rf = run_tolerant_singleton_game(&s, &x0, &r, &q(1, 10)).unwrap();
        assert_eq!(rf.hypothesis, RefutingHypothesis::Singleton { p: Point::plane(q(1, 2), int(0)) });
        assert_eq!(rf.loss_inner, int(1));

        let s = ScriptedStrategy { queries: vec![Point::plane(q(1, 2), int(0))], verdict: Verdict::NotLossy };
        let rf = run_tolerant_singleton_game(&s, &x0, &r, &q(1, 10)).unwrap();
        assert_eq!(rf.hypothesis, RefutingHypothesis::Singleton { p: Point::plane(q(1, 4), int(0)) });
        assert!(rf.transcript.iter().all(|e| e.label == 0));

        let s = ScriptedStrategy { queries: vec![], verdict: Verdict::Lossy };
        let rf = run_tolerant_singleton_game(&s, &x0, &r, &q(1, 10)).unwrap();
        assert_eq!(rf.loss_outer, int(0));
    }

    #[test]
    fn overrun_is_reported() {
        struct Greedy;
        impl CertifierStrategy for Greedy {
            fn max_queries(&self) -> usize {
                2
            }
            fn next(&self, _t: &[(Point, bool)]) -> Action {
                Action::Query(Point::plane(int(1), int(1)))
            }
        }
        assert!(matches!(run_l2_game(&Greedy), Err(Error::StrategyOverrun(2))));
    }
}
