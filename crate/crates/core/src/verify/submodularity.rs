use alloc::vec::Vec;

use rand::Rng;

use crate::diffusion::{monte_carlo_influence, rng, SeedSets};
use crate::error::{Error, Result};
use crate::network::{random_dag, InfoNetwork, NodeId};
use crate::optimize::Evaluator;
use crate::par;

/// Violations kept verbatim in a report; further ones are only counted.
pub const MAX_RECORDED_VIOLATIONS: usize = 64;

/// Default absolute tolerance for exact evaluators.
pub const EXACT_TOLERANCE: f64 = 1e-9;

/// Standard errors allowed for Monte-Carlo comparisons.
pub const SIGMA_MULTIPLIER: f64 = 4.0;

/// Which argument of `σ̄(A, Â)` varies while the other stays fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    FirstArg,
    SecondArg,
    Both,
}

impl Scope {
    pub fn tag(&self) -> &'static str {
        match self {
            Scope::FirstArg => "first-arg",
            Scope::SecondArg => "second-arg",
            Scope::Both => "both",
        }
    }

    fn includes(&self, arg: Argument) -> bool {
        matches!(
            (self, arg),
            (Scope::Both, _) | (Scope::FirstArg, Argument::Transient) | (Scope::SecondArg, Argument::Permanent)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Argument {
    Transient,
    Permanent,
}

impl Argument {
    pub fn tag(&self) -> &'static str {
        match self {
            Argument::Transient => "transient",
            Argument::Permanent => "permanent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Submodularity,
    Monotonicity,
}

/// One failed inequality.
///
/// `small ⊆ large` are values of the varying argument, `context` the fixed
/// other argument. For a monotonicity failure `large == small` and
/// `gap_small` is the negative gain of adding `element`.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub argument: Argument,
    pub context: Vec<NodeId>,
    pub small: Vec<NodeId>,
    pub large: Vec<NodeId>,
    pub element: NodeId,
    pub gap_small: f64,
    pub gap_large: f64,
    /// Amount by which the inequality fails.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularityOptions {
    pub scope: Scope,
    pub tolerance: f64,
    /// Nodes taking part; `None` means every counted node.
    pub ground: Option<Vec<NodeId>>,
    /// Largest ground set checked exhaustively; bigger ones are sampled.
    pub max_exhaustive: usize,
    pub samples: usize,
    pub seed: u64,
}

impl SubmodularityOptions {
    pub fn new(scope: Scope) -> Self {
        SubmodularityOptions {
            scope,
            tolerance: EXACT_TOLERANCE,
            ground: None,
            max_exhaustive: 8,
            samples: 20_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularityReport {
    pub nodes: usize,
    pub edges: usize,
    pub horizon: usize,
    pub evaluator: &'static str,
    pub scope: Scope,
    pub tolerance: f64,
    /// Set for Monte-Carlo evaluators, whose tolerance scales with stderr.
    pub sigma_multiplier: Option<f64>,
    pub exhaustive: bool,
    pub triples: u64,
    pub monotone_checks: u64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    pub max_violation: f64,
}

impl SubmodularityReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

/// `σ̄` and its standard error at one seed configuration.
#[derive(Clone, Copy)]
struct Value {
    mean: f64,
    stderr: f64,
}

fn evaluate(net: &InfoNetwork, seeds: &SeedSets, horizon: usize, evaluator: Evaluator) -> Result<Value> {
    match evaluator {
        Evaluator::MonteCarlo { samples, seed } => {
            let e = monte_carlo_influence(net, seeds, horizon, samples, seed)?;
            Ok(Value {
                mean: e.mean,
                stderr: e.stderr,
            })
        }
        _ => Ok(Value {
            mean: evaluator.evaluate(net, seeds, horizon)?,
            stderr: 0.0,
        }),
    }
}

struct Collector {
    tolerance: f64,
    sigma: Option<f64>,
    triples: u64,
    monotone_checks: u64,
    count: u64,
    recorded: Vec<Violation>,
    max: f64,
}

impl Collector {
    fn allowed(&self, values: &[Value]) -> f64 {
        match self.sigma {
            Some(k) => {
                let var: f64 = values.iter().map(|v| v.stderr * v.stderr).sum();
                self.tolerance + k * libm::sqrt(var)
            }
            None => self.tolerance,
        }
    }

    fn record(&mut self, v: Violation) {
        self.count += 1;
        if v.magnitude > self.max {
            self.max = v.magnitude;
        }
        if self.recorded.len() < MAX_RECORDED_VIOLATIONS {
            self.recorded.push(v);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn submodular(
        &mut self,
        arg: Argument,
        sets: &dyn Fn() -> (Vec<NodeId>, Vec<NodeId>, Vec<NodeId>),
        element: NodeId,
        a: Value,
        aw: Value,
        b: Value,
        bw: Value,
    ) {
        self.triples += 1;
        let gap_small = aw.mean - a.mean;
        let gap_large = bw.mean - b.mean;
        let excess = gap_large - gap_small;
        if excess > self.allowed(&[a, aw, b, bw]) {
            let (context, small, large) = sets();
            self.record(Violation {
                kind: ViolationKind::Submodularity,
                argument: arg,
                context,
                small,
                large,
                element,
                gap_small,
                gap_large,
                magnitude: excess,
            });
        }
    }

    fn monotone(
        &mut self,
        arg: Argument,
        sets: &dyn Fn() -> (Vec<NodeId>, Vec<NodeId>),
        element: NodeId,
        a: Value,
        aw: Value,
    ) {
        self.monotone_checks += 1;
        let gain = aw.mean - a.mean;
        if -gain > self.allowed(&[a, aw]) {
            let (context, small) = sets();
            self.record(Violation {
                kind: ViolationKind::Monotonicity,
                argument: arg,
                context,
                large: small.clone(),
                small,
                element,
                gap_small: gain,
                gap_large: gain,
                magnitude: -gain,
            });
        }
    }
}

fn members(ground: &[NodeId], mask: u32) -> Vec<NodeId> {
    ground
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &v)| v)
        .collect()
}

/// Iterates the submasks of `mask`, including zero and `mask` itself.
fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(mask);
    core::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

/// Checks submodularity and monotonicity of `σ̄(A, Â)` in the arguments
/// selected by `options.scope`, keeping the other argument fixed.
///
/// On ground sets up to `options.max_exhaustive` nodes every triple
/// `A ⊆ B, w ∉ B` over every disjoint context is checked; larger ground sets
/// are checked on `options.samples` random triples.
pub fn check_submodularity(
    net: &InfoNetwork,
    horizon: usize,
    evaluator: Evaluator,
    options: &SubmodularityOptions,
) -> Result<SubmodularityReport> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    evaluator.check(net)?;
    let ground: Vec<NodeId> = match &options.ground {
        Some(g) => {
            let mut g = g.clone();
            g.sort_unstable();
            g.dedup();
            if let Some(&v) = g.iter().find(|&&v| v.index() >= net.node_count() || net.is_void(v)) {
                return Err(Error::UnknownNode(alloc::format!("#{}", v.index())));
            }
            g
        }
        None => net.counted_nodes().collect(),
    };
    let mut col = Collector {
        tolerance: options.tolerance,
        sigma: (!evaluator.is_exact()).then_some(SIGMA_MULTIPLIER),
        triples: 0,
        monotone_checks: 0,
        count: 0,
        recorded: Vec::new(),
        max: 0.0,
    };
    let exhaustive = ground.len() <= options.max_exhaustive.min(12);
    if exhaustive {
        exhaustive_check(net, horizon, evaluator, options.scope, &ground, &mut col)?;
    } else {
        sampled_check(net, horizon, evaluator, options, &ground, &mut col)?;
    }
    Ok(SubmodularityReport {
        nodes: net.counted_count(),
        edges: net.edges().len(),
        horizon,
        evaluator: evaluator.tag(),
        scope: options.scope,
        tolerance: options.tolerance,
        sigma_multiplier: col.sigma,
        exhaustive,
        triples: col.triples,
        monotone_checks: col.monotone_checks,
        violation_count: col.count,
        violations: col.recorded,
        max_violation: col.max,
    })
}

fn exhaustive_check(
    net: &InfoNetwork,
    horizon: usize,
    evaluator: Evaluator,
    scope: Scope,
    ground: &[NodeId],
    col: &mut Collector,
) -> Result<()> {
    let g = ground.len();
    let full: u32 = (1u32 << g) - 1;
    // Configuration index: base-3 digit per ground node, 1 transient, 2 permanent.
    let mut tern = alloc::vec![0usize; 1 << g];
    for mask in 1..=full as usize {
        let low = mask.trailing_zeros() as usize;
        tern[mask] = tern[mask & (mask - 1)] + 3usize.pow(low as u32);
    }
    let configs = 3usize.pow(g as u32);
    let values: Vec<Result<Value>> = par::map_indexed(configs, |code| {
        let (mut tr, mut pe) = (Vec::new(), Vec::new());
        let mut c = code;
        for &v in ground {
            match c % 3 {
                1 => tr.push(v),
                2 => pe.push(v),
                _ => {}
            }
            c /= 3;
        }
        evaluate(net, &SeedSets::new(net, tr, pe)?, horizon, evaluator)
    });
    let values: Vec<Value> = values.into_iter().collect::<Result<_>>()?;

    for arg in [Argument::Transient, Argument::Permanent] {
        if !scope.includes(arg) {
            continue;
        }
        let at = |vary: u32, fixed: u32| match arg {
            Argument::Transient => values[tern[vary as usize] + 2 * tern[fixed as usize]],
            Argument::Permanent => values[tern[fixed as usize] + 2 * tern[vary as usize]],
        };
        for fixed in 0..=full {
            let rest = full & !fixed;
            for large in submasks(rest) {
                let outside = rest & !large;
                for wi in (0..g).filter(|&i| outside >> i & 1 == 1) {
                    let bit = 1u32 << wi;
                    let (b, bw) = (at(large, fixed), at(large | bit, fixed));
                    col.monotone(
                        arg,
                        &|| (members(ground, fixed), members(ground, large)),
                        ground[wi],
                        b,
                        bw,
                    );
                    for small in submasks(large).filter(|&s| s != large) {
                        let (a, aw) = (at(small, fixed), at(small | bit, fixed));
                        col.submodular(
                            arg,
                            &|| (members(ground, fixed), members(ground, small), members(ground, large)),
                            ground[wi],
                            a,
                            aw,
                            b,
                            bw,
                        );
                    }
                }
            }
        }
    }
    Ok(())
}

fn sampled_check(
    net: &InfoNetwork,
    horizon: usize,
    evaluator: Evaluator,
    options: &SubmodularityOptions,
    ground: &[NodeId],
    col: &mut Collector,
) -> Result<()> {
    let args: Vec<Argument> = [Argument::Transient, Argument::Permanent]
        .into_iter()
        .filter(|&a| options.scope.includes(a))
        .collect();
    // Each sample: (argument, context, small, large, element).
    type Draw = (Argument, Vec<NodeId>, Vec<NodeId>, Vec<NodeId>, NodeId);
    let draws: Vec<Option<Draw>> = (0..options.samples)
        .map(|i| {
            let mut r = rng::sample_stream(options.seed, i as u64);
            let arg = args[r.random_range(0..args.len())];
            let (mut context, mut small, mut large, mut free) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
            for &v in ground {
                match r.random_range(0..4u8) {
                    0 => context.push(v),
                    1 => {
                        small.push(v);
                        large.push(v);
                    }
                    2 => large.push(v),
                    _ => free.push(v),
                }
            }
            if free.is_empty() {
                return None;
            }
            let w = free[r.random_range(0..free.len())];
            Some((arg, context, small, large, w))
        })
        .collect();
    let results: Vec<Result<Option<[Value; 4]>>> = par::map_indexed(draws.len(), |i| {
        let Some((arg, context, small, large, w)) = &draws[i] else {
            return Ok(None);
        };
        let seeds = |vary: &[NodeId], extra: Option<NodeId>| {
            let mut vary = vary.to_vec();
            vary.extend(extra);
            match arg {
                Argument::Transient => SeedSets::new(net, vary, context.iter().copied()),
                Argument::Permanent => SeedSets::new(net, context.iter().copied(), vary),
            }
        };
        Ok(Some([
            evaluate(net, &seeds(small, None)?, horizon, evaluator)?,
            evaluate(net, &seeds(small, Some(*w))?, horizon, evaluator)?,
            evaluate(net, &seeds(large, None)?, horizon, evaluator)?,
            evaluate(net, &seeds(large, Some(*w))?, horizon, evaluator)?,
        ]))
    });
    for (draw, res) in draws.iter().zip(results) {
        let (Some((arg, context, small, large, w)), Some([a, aw, b, bw])) = (draw, res?) else {
            continue;
        };
        col.monotone(*arg, &|| (context.clone(), small.clone()), *w, a, aw);
        col.monotone(*arg, &|| (context.clone(), large.clone()), *w, b, bw);
        if small.len() < large.len() {
            col.submodular(
                *arg,
                &|| (context.clone(), small.clone(), large.clone()),
                *w,
                a,
                aw,
                b,
                bw,
            );
        }
    }
    Ok(())
}

/// Outcome of [`random_dag_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub instances: usize,
    pub max_nodes: usize,
    pub max_horizon: usize,
    pub seed: u64,
    pub triples: u64,
    pub monotone_checks: u64,
    pub violation_count: u64,
    pub max_violation: f64,
    /// Per-instance reports that contain violations.
    pub failures: Vec<(usize, SubmodularityReport)>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

/// Runs [`check_submodularity`] on `instances` random DAGs of 2 to
/// `max_nodes` nodes and horizons up to `max_horizon`, with the exact
/// walk evaluator. Instance `i` is drawn from `rng::sample_stream(seed, i)`.
pub fn random_dag_sweep(
    instances: usize,
    max_nodes: usize,
    max_horizon: usize,
    scope: Scope,
    seed: u64,
) -> Result<SweepReport> {
    if max_nodes < 2 || max_horizon == 0 {
        return Err(Error::InvalidArgument("need at least two nodes and a positive horizon".into()));
    }
    let mut report = SweepReport {
        instances,
        max_nodes,
        max_horizon,
        seed,
        triples: 0,
        monotone_checks: 0,
        violation_count: 0,
        max_violation: 0.0,
        failures: Vec::new(),
    };
    for i in 0..instances {
        let mut r = rng::sample_stream(seed, i as u64);
        let n = r.random_range(2..=max_nodes);
        let net = random_dag(&mut r, n, 2 * n);
        let horizon = r.random_range(1..=max_horizon);
        let rep = check_submodularity(&net, horizon, Evaluator::ExactDag, &SubmodularityOptions::new(scope))?;
        report.triples += rep.triples;
        report.monotone_checks += rep.monotone_checks;
        report.violation_count += rep.violation_count;
        report.max_violation = report.max_violation.max(rep.max_violation);
        if !rep.passed() {
            report.failures.push((i, rep));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn submask_iteration() {
        let subs: Vec<u32> = submasks(0b101).collect();
        assert_eq!(subs, [0b101, 0b100, 0b001, 0]);
        assert_eq!(submasks(0).collect::<Vec<_>>(), [0]);
    }

    #[test]
    fn triple_count_matches_formula() {
        // n ground nodes, one argument: Σ_fixed Σ_{B ⊆ R} (2^|B| - 1)(|R| - |B|).
        let net = InfoNetwork::build(&["a", "b", "c"], &[("b", "a", 0.5), ("c", "b", 0.4)]).unwrap();
        let rep = check_submodularity(&net, 2, Evaluator::ExactDag, &SubmodularityOptions::new(Scope::FirstArg)).unwrap();
        let mut expect = 0u64;
        let mut mono = 0u64;
        for r in 0..=3u32 {
            let contexts = [1, 3, 3, 1][3 - r as usize];
            for b in 0..=r {
                let choose = [[1, 0, 0, 0], [1, 1, 0, 0], [1, 2, 1, 0], [1, 3, 3, 1]][r as usize][b as usize];
                expect += contexts * choose * ((1u64 << b) - 1) * u64::from(r - b);
                mono += contexts * choose * u64::from(r - b);
            }
        }
        assert_eq!(rep.triples, expect);
        assert_eq!(rep.monotone_checks, mono);
        assert!(rep.passed());
    }

    #[test]
    fn dag_sweep_is_clean() {
        let rep = random_dag_sweep(15, 6, 4, Scope::Both, 11).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures.first());
        assert!(rep.triples > 0);
    }

    #[test]
    fn sampled_mode_agrees_on_dags() {
        let mut r = rng::stream(4);
        let net = random_dag(&mut r, 10, 20);
        let mut opts = SubmodularityOptions::new(Scope::Both);
        opts.max_exhaustive = 4;
        opts.samples = 500;
        let rep = check_submodularity(&net, 3, Evaluator::ExactDag, &opts).unwrap();
        assert!(!rep.exhaustive);
        assert!(rep.passed());
        assert!(rep.triples > 100);
    }

    #[test]
    fn self_loop_bump_matches_hand_analysis() {
        // `v` needs more than its other inputs give at t = 2 unless it was
        // already active at t = 1, and its self-loop carries that forward.
        let net = InfoNetwork::build(
            &["v", "x1", "x2", "u", "z"],
            &[
                ("v", "v", 0.2),
                ("v", "x1", 0.2),
                ("v", "x2", 0.2),
                ("v", "u", 0.3),
                ("u", "z", 1.0),
            ],
        )
        .unwrap();
        let v = net.resolve("v").unwrap();
        let eval = |a: &[&str]| {
            let s = SeedSets::from_labels(&net, a, &[] as &[&str]).unwrap();
            crate::exact::exact_indicators_cells(&net, &s, 2, 1_000_000).unwrap().table.get(2, v)
        };
        let bump = (eval(&["z", "x1", "x2"]) - eval(&["z", "x1"])) - (eval(&["z", "x2"]) - eval(&["z"]));
        assert!((bump - 0.1).abs() < 1e-12);
    }
}
