//! Lane-exchange schedules for the half-warp pairwise interaction pattern.
//!
//! A sub-group of width `W` is split in half: lower lanes `0..W/2` hold
//! particles `a_0..a_{W/2-1}` from leaf A, upper lanes hold `b_0..b_{W/2-1}`
//! from leaf B. Each schedule step tells every lane which other lane's
//! resident value it evaluates against, and a full schedule makes every
//! `(a_i, b_j)` pair meet exactly once in each direction.
//!
//! Four exchange strategies are modeled:
//!
//! - [`build_xor_schedule`]: lane `l` partners with `l XOR (W/2 + r)` at
//!   step `r`. Compiles to indirect register access on hardware without
//!   cross-lane move instructions, costed at one cycle per element.
//! - [`build_butterfly_schedule`]: a half-swap followed by cyclic inward
//!   shifts. Same pair coverage, but each step compiles to four `mov`
//!   instructions when the shuffle parameters are compile-time constants.
//! - [`build_local_memory_schedule`]: the XOR permutation realized as a
//!   write/barrier/read triple through work-group local memory.
//! - [`build_broadcast_schedule`]: known-index broadcasts per half, with
//!   the mirrored evaluation recomputed redundantly instead of exchanged.
//!
//! The verifier, not the builders, is the contract: any schedule passing
//! [`verify_schedule`] has the symmetry and coverage properties the
//! algorithm needs, whatever its step ordering.

use serde::Serialize;
use thiserror::Error;

/// Errors from schedule construction and evaluation.
#[derive(Debug, Error, PartialEq)]
pub enum LaneError {
    #[error("width {0} is invalid: {1}")]
    InvalidWidth(u32, &'static str),
    #[error("schedule width {schedule} does not match layout width {layout}")]
    WidthMismatch { schedule: u32, layout: u32 },
    #[error("operation requires a {expected:?} schedule, got {got:?}")]
    KindMismatch {
        expected: ScheduleKind,
        got: ScheduleKind,
    },
    #[error("payload length {got} does not match schedule width {want}")]
    PayloadSize { want: u32, got: usize },
    #[error("step {step} sources lane {lane}, out of range for width {width}")]
    LaneOutOfRange { step: usize, lane: u32, width: u32 },
}

/// Exchange strategy of a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScheduleKind {
    XorShuffle,
    Butterfly,
    LocalMemory,
    Broadcast,
}

/// Which leaf a particle was loaded from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Leaf {
    A,
    B,
}

/// A particle resident in one lane: leaf plus index within the leaf half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ParticleTag {
    pub leaf: Leaf,
    pub index: u32,
}

/// Lane layout of the half-warp algorithm for a sub-group of width `W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfWarpLayout {
    width: u32,
}

impl HalfWarpLayout {
    /// Creates a layout. The width must be even and at least 2; the
    /// sub-group sizes seen in practice are 8, 16, 32 and 64.
    pub fn new(width: u32) -> Result<Self, LaneError> {
        if width < 2 {
            return Err(LaneError::InvalidWidth(width, "must be at least 2"));
        }
        if !width.is_multiple_of(2) {
            return Err(LaneError::InvalidWidth(width, "must be even"));
        }
        Ok(HalfWarpLayout { width })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Lanes per half, i.e. particles per leaf.
    pub fn half(&self) -> u32 {
        self.width / 2
    }

    /// The particle resident in `lane`: lower lanes hold leaf A, upper
    /// lanes hold leaf B.
    pub fn particle_at(&self, lane: u32) -> ParticleTag {
        debug_assert!(lane < self.width);
        if lane < self.half() {
            ParticleTag {
                leaf: Leaf::A,
                index: lane,
            }
        } else {
            ParticleTag {
                leaf: Leaf::B,
                index: lane - self.half(),
            }
        }
    }

    /// The lane holding `tag`.
    pub fn lane_of(&self, tag: ParticleTag) -> u32 {
        debug_assert!(tag.index < self.half());
        match tag.leaf {
            Leaf::A => tag.index,
            Leaf::B => self.half() + tag.index,
        }
    }
}

/// One step of an exchange schedule: `sources[l]` is the lane whose resident
/// value lane `l` evaluates against during this step.
///
/// For the shuffle kinds this is a lane permutation; for local memory it is
/// the permutation realized by the write/barrier/read triple; for broadcast
/// every lane of a half reads the same source lane.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExchangeStep {
    sources: Vec<u32>,
}

impl ExchangeStep {
    pub fn sources(&self) -> &[u32] {
        &self.sources
    }

    pub fn source_of(&self, lane: u32) -> u32 {
        self.sources[lane as usize]
    }

    /// True when every lane is sourced exactly once.
    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.sources.len()];
        for &s in &self.sources {
            let slot = &mut seen[s as usize];
            if *slot {
                return false;
            }
            *slot = true;
        }
        true
    }
}

/// An ordered list of lane-exchange steps over a sub-group of width `W`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExchangeSchedule {
    kind: ScheduleKind,
    width: u32,
    steps: Vec<ExchangeStep>,
}

impl ExchangeSchedule {
    /// Builds a schedule from raw per-step source maps. Only lane ranges are
    /// checked here; symmetry, coverage and bijection checks belong to
    /// [`verify_schedule`].
    pub fn from_steps(
        kind: ScheduleKind,
        width: u32,
        steps: Vec<Vec<u32>>,
    ) -> Result<Self, LaneError> {
        if width < 2 || !width.is_multiple_of(2) {
            return Err(LaneError::InvalidWidth(
                width,
                "must be even and at least 2",
            ));
        }
        for (idx, sources) in steps.iter().enumerate() {
            if sources.len() != width as usize {
                return Err(LaneError::PayloadSize {
                    want: width,
                    got: sources.len(),
                });
            }
            if let Some(&bad) = sources.iter().find(|&&s| s >= width) {
                return Err(LaneError::LaneOutOfRange {
                    step: idx,
                    lane: bad,
                    width,
                });
            }
        }
        Ok(ExchangeSchedule {
            kind,
            width,
            steps: steps
                .into_iter()
                .map(|sources| ExchangeStep { sources })
                .collect(),
        })
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn steps(&self) -> &[ExchangeStep] {
        &self.steps
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }
}

fn require_even(width: u32) -> Result<(), LaneError> {
    if width < 2 {
        return Err(LaneError::InvalidWidth(width, "must be at least 2"));
    }
    if !width.is_multiple_of(2) {
        return Err(LaneError::InvalidWidth(width, "must be even"));
    }
    Ok(())
}

fn require_power_of_two(width: u32) -> Result<(), LaneError> {
    require_even(width)?;
    if !width.is_power_of_two() {
        return Err(LaneError::InvalidWidth(
            width,
            "XOR lane masks stay in range only for power-of-two widths",
        ));
    }
    Ok(())
}

/// XOR-based shuffle schedule: at step `r`, lane `l` receives the value held
/// by lane `l XOR (W/2 + r)`, so lower lane `l` evaluates `(a_l, b_{l⊕r})`
/// while upper lane `W/2 + (l⊕r)` evaluates `(b_{l⊕r}, a_l)` in the same step.
pub fn build_xor_schedule(width: u32) -> Result<ExchangeSchedule, LaneError> {
    require_power_of_two(width)?;
    let half = width / 2;
    let steps = (0..half)
        .map(|r| {
            let mask = half + r;
            (0..width).map(|lane| lane ^ mask).collect()
        })
        .collect();
    ExchangeSchedule::from_steps(ScheduleKind::XorShuffle, width, steps)
}

/// Butterfly shuffle schedule: step 0 is the plain half-swap, and each later
/// step `k` shifts the exchanged values cyclically inward, so lower lane `l`
/// evaluates `(a_l, b_{(l+k) mod W/2})` and upper lane `W/2 + u` evaluates
/// `(b_u, a_{(u−k) mod W/2})`.
pub fn build_butterfly_schedule(width: u32) -> Result<ExchangeSchedule, LaneError> {
    require_even(width)?;
    let half = width / 2;
    let steps = (0..half)
        .map(|k| {
            (0..width)
                .map(|lane| {
                    if lane < half {
                        half + (lane + k) % half
                    } else {
                        let upper_index = lane - half;
                        (upper_index + half - k % half) % half
                    }
                })
                .collect()
        })
        .collect();
    ExchangeSchedule::from_steps(ScheduleKind::Butterfly, width, steps)
}

/// Local-memory exchange schedule. Behaves identically to the XOR shuffle —
/// the same resulting permutation per step — but each step is realized as a
/// write to work-group local memory, a sub-group barrier, and a read, which
/// is what the cost model prices.
pub fn build_local_memory_schedule(width: u32) -> Result<ExchangeSchedule, LaneError> {
    let xor = build_xor_schedule(width)?;
    Ok(ExchangeSchedule {
        kind: ScheduleKind::LocalMemory,
        width: xor.width,
        steps: xor.steps,
    })
}

/// Broadcast decomposition: at step `r`, every lower lane reads `b_r` from
/// upper lane `W/2 + r` and every upper lane reads `a_r` from lane `r`.
/// Coverage still holds, but the mirrored evaluation of a pair happens at a
/// different step, so each work-item redundantly computes intermediate
/// values a shuffle would have exchanged.
pub fn build_broadcast_schedule(width: u32) -> Result<ExchangeSchedule, LaneError> {
    require_even(width)?;
    let half = width / 2;
    let steps = (0..half)
        .map(|r| {
            (0..width)
                .map(|lane| if lane < half { half + r } else { r })
                .collect()
        })
        .collect();
    ExchangeSchedule::from_steps(ScheduleKind::Broadcast, width, steps)
}

/// Direction of a directed pair evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Direction {
    /// Lane holding `a_i` evaluating against `b_j`.
    AToB,
    /// Lane holding `b_j` evaluating against `a_i`.
    BToA,
}

/// A verification failure, located by step and lane where applicable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    /// `sources[sources[lane]] != lane`: the mirrored evaluation of this
    /// lane's pair does not happen in the same step.
    AsymmetricStep { step: usize, lane: u32, source: u32 },
    /// A lane is sourced `count` times (≠ 1) within one shuffle step.
    NotBijection { step: usize, lane: u32, count: u32 },
    /// Lanes within one half of a broadcast step read different sources.
    NonUniformBroadcast { step: usize, lane: u32, source: u32 },
    /// A lane evaluates against a particle from its own leaf.
    SameLeafEvaluation { step: usize, lane: u32, source: u32 },
    /// The directed pair `(i, j)` is evaluated `count` times (≠ 1) across
    /// the whole schedule.
    CoverageCount {
        direction: Direction,
        i: u32,
        j: u32,
        count: u32,
    },
    /// Broadcast only: a directed evaluation whose mirror never occurs at
    /// any step.
    UnmirroredEvaluation { step: usize, lane: u32 },
}

/// Result of checking a schedule against the half-warp correctness
/// properties: per-step pair symmetry, exact once-per-direction coverage of
/// all `(W/2)²` pairs, and per-step permutation validity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub kind: ScheduleKind,
    pub width: u32,
    pub step_count: usize,
    pub directed_evaluations: u64,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies pair-wise symmetry, coverage, and permutation validity of a
/// schedule over a layout of the same width.
///
/// For the shuffle kinds, per-step symmetry means every step is an
/// involution: the lane you read is the lane reading you. Broadcast steps
/// cannot pair up within a step, so for them the mirror of each evaluation
/// is required to exist at some step, and uniform per-half sources replace
/// the bijection check. Violations are reported, not returned as errors.
pub fn verify_schedule(
    schedule: &ExchangeSchedule,
    layout: &HalfWarpLayout,
) -> Result<VerificationReport, LaneError> {
    if schedule.width() != layout.width() {
        return Err(LaneError::WidthMismatch {
            schedule: schedule.width(),
            layout: layout.width(),
        });
    }
    let width = layout.width();
    let half = layout.half();
    let mut violations = Vec::new();

    let is_shuffle = !matches!(schedule.kind(), ScheduleKind::Broadcast);

    for (step_idx, step) in schedule.steps().iter().enumerate() {
        if is_shuffle {
            // Permutation validity.
            let mut sourced = vec![0u32; width as usize];
            for &s in step.sources() {
                sourced[s as usize] += 1;
            }
            for (lane, &count) in sourced.iter().enumerate() {
                if count != 1 {
                    violations.push(Violation::NotBijection {
                        step: step_idx,
                        lane: lane as u32,
                        count,
                    });
                }
            }
            // Per-step symmetry: the source map must be an involution.
            for lane in 0..width {
                let source = step.source_of(lane);
                if step.source_of(source) != lane {
                    violations.push(Violation::AsymmetricStep {
                        step: step_idx,
                        lane,
                        source,
                    });
                }
            }
        } else {
            // Broadcast: each half must read one uniform source.
            for half_range in [0..half, half..width] {
                let expected = step.source_of(half_range.start);
                for lane in half_range {
                    let source = step.source_of(lane);
                    if source != expected {
                        violations.push(Violation::NonUniformBroadcast {
                            step: step_idx,
                            lane,
                            source,
                        });
                    }
                }
            }
        }

        // Cross-leaf check: partners must come from the opposite half.
        for lane in 0..width {
            let source = step.source_of(lane);
            if (lane < half) == (source < half) {
                violations.push(Violation::SameLeafEvaluation {
                    step: step_idx,
                    lane,
                    source,
                });
            }
        }
    }

    // Coverage: count directed (a_i, b_j) evaluations over all steps.
    let mut a_to_b = vec![0u32; (half * half) as usize];
    let mut b_to_a = vec![0u32; (half * half) as usize];
    let mut directed = 0u64;
    for step in schedule.steps() {
        for lane in 0..width {
            let own = layout.particle_at(lane);
            let partner = layout.particle_at(step.source_of(lane));
            directed += 1;
            match (own.leaf, partner.leaf) {
                (Leaf::A, Leaf::B) => a_to_b[(own.index * half + partner.index) as usize] += 1,
                (Leaf::B, Leaf::A) => b_to_a[(partner.index * half + own.index) as usize] += 1,
                _ => {} // already reported as SameLeafEvaluation
            }
        }
    }
    for i in 0..half {
        for j in 0..half {
            let idx = (i * half + j) as usize;
            if a_to_b[idx] != 1 {
                violations.push(Violation::CoverageCount {
                    direction: Direction::AToB,
                    i,
                    j,
                    count: a_to_b[idx],
                });
            }
            if b_to_a[idx] != 1 {
                violations.push(Violation::CoverageCount {
                    direction: Direction::BToA,
                    i,
                    j,
                    count: b_to_a[idx],
                });
            }
        }
    }

    // Broadcast symmetry: every evaluation needs its mirror somewhere.
    if !is_shuffle {
        for (step_idx, step) in schedule.steps().iter().enumerate() {
            for lane in 0..width {
                let own = layout.particle_at(lane);
                let partner = layout.particle_at(step.source_of(lane));
                let mirrored = match (own.leaf, partner.leaf) {
                    (Leaf::A, Leaf::B) => b_to_a[(own.index * half + partner.index) as usize] > 0,
                    (Leaf::B, Leaf::A) => a_to_b[(partner.index * half + own.index) as usize] > 0,
                    _ => continue,
                };
                if !mirrored {
                    violations.push(Violation::UnmirroredEvaluation {
                        step: step_idx,
                        lane,
                    });
                }
            }
        }
    }

    Ok(VerificationReport {
        kind: schedule.kind(),
        width,
        step_count: schedule.step_count(),
        directed_evaluations: directed,
        violations,
    })
}

/// Runs a schedule over integer payloads, one per lane, applying a
/// commutative exact update `op(own, partner)` and accumulating per lane.
///
/// Because residents never change and `op` is exact, any two schedules with
/// the same directed evaluation set return identical accumulators.
pub fn simulate_interaction<F>(
    schedule: &ExchangeSchedule,
    payloads: &[i64],
    op: F,
) -> Result<Vec<i64>, LaneError>
where
    F: Fn(i64, i64) -> i64,
{
    if payloads.len() != schedule.width() as usize {
        return Err(LaneError::PayloadSize {
            want: schedule.width(),
            got: payloads.len(),
        });
    }
    let mut accumulators = vec![0i64; payloads.len()];
    for step in schedule.steps() {
        for (lane, acc) in accumulators.iter_mut().enumerate() {
            let partner = payloads[step.source_of(lane as u32) as usize];
            *acc += op(payloads[lane], partner);
        }
    }
    Ok(accumulators)
}

/// Floating-point variant of [`simulate_interaction`]. Accumulation order
/// follows step order, so different schedules may differ in the last ulps;
/// compare results with [`accumulators_match_f64`].
pub fn simulate_interaction_f64<F>(
    schedule: &ExchangeSchedule,
    payloads: &[f64],
    op: F,
) -> Result<Vec<f64>, LaneError>
where
    F: Fn(f64, f64) -> f64,
{
    if payloads.len() != schedule.width() as usize {
        return Err(LaneError::PayloadSize {
            want: schedule.width(),
            got: payloads.len(),
        });
    }
    let mut accumulators = vec![0f64; payloads.len()];
    for step in schedule.steps() {
        for (lane, acc) in accumulators.iter_mut().enumerate() {
            let partner = payloads[step.source_of(lane as u32) as usize];
            *acc += op(payloads[lane], partner);
        }
    }
    Ok(accumulators)
}

/// Relative-tolerance comparison for floating accumulator vectors.
pub fn accumulators_match_f64(a: &[f64], b: &[f64], relative_tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            let scale = x.abs().max(y.abs()).max(1.0);
            (x - y).abs() <= relative_tol * scale
        })
}

/// Abstract per-step instruction costs of the exchange strategies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostModel {
    /// Indirect register access: cycles per gathered element. One step
    /// gathers `W` elements.
    pub indirect_cycles_per_element: u64,
    /// Specialized butterfly step with compile-time shuffle parameters:
    /// two duplicating moves plus two regioned shifted moves.
    pub butterfly_moves_per_step: u64,
    /// Register-regioned broadcast overhead per step.
    pub broadcast_overhead_per_step: u64,
    /// Local-memory exchange: write, barrier, read. The underlying costs
    /// are hardware-specific; these default to one abstract unit each.
    pub local_memory_write: u64,
    pub local_memory_barrier: u64,
    pub local_memory_read: u64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            indirect_cycles_per_element: 1,
            butterfly_moves_per_step: 4,
            broadcast_overhead_per_step: 0,
            local_memory_write: 1,
            local_memory_barrier: 1,
            local_memory_read: 1,
        }
    }
}

/// Unit of an estimated cost total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CostUnit {
    Cycles,
    MoveInstructions,
    AbstractUnits,
}

/// Itemized cost of running a schedule under a [`CostModel`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostEstimate {
    pub kind: ScheduleKind,
    pub step_count: u64,
    pub per_step: u64,
    pub total: u64,
    pub unit: CostUnit,
    /// Broadcast only: directed evaluations whose intermediate values are
    /// recomputed redundantly instead of exchanged.
    pub redundant_evaluations: Option<u64>,
}

/// Prices a schedule: per-step cost times step count, itemized by kind.
pub fn cost_estimate(schedule: &ExchangeSchedule, model: &CostModel) -> CostEstimate {
    let steps = schedule.step_count() as u64;
    let width = schedule.width() as u64;
    let (per_step, unit, redundant) = match schedule.kind() {
        ScheduleKind::XorShuffle => (
            model.indirect_cycles_per_element * width,
            CostUnit::Cycles,
            None,
        ),
        ScheduleKind::Butterfly => (
            model.butterfly_moves_per_step,
            CostUnit::MoveInstructions,
            None,
        ),
        ScheduleKind::LocalMemory => (
            model.local_memory_write + model.local_memory_barrier + model.local_memory_read,
            CostUnit::AbstractUnits,
            None,
        ),
        ScheduleKind::Broadcast => (
            model.broadcast_overhead_per_step,
            CostUnit::Cycles,
            Some(steps * width),
        ),
    };
    CostEstimate {
        kind: schedule.kind(),
        step_count: steps,
        per_step,
        total: per_step * steps,
        unit,
        redundant_evaluations: redundant,
    }
}

/// Move-instruction decomposition of one butterfly step: two duplicating
/// moves populate the doubled register pair, and the left and right shifts
/// are one regioned move each — four in total, independent of width.
pub fn decompose_step_moves(schedule: &ExchangeSchedule) -> Result<u64, LaneError> {
    if schedule.kind() != ScheduleKind::Butterfly {
        return Err(LaneError::KindMismatch {
            expected: ScheduleKind::Butterfly,
            got: schedule.kind(),
        });
    }
    Ok(4)
}

/// Total move instructions for a full butterfly schedule: 4 per step.
pub fn decompose_total_moves(schedule: &ExchangeSchedule) -> Result<u64, LaneError> {
    Ok(decompose_step_moves(schedule)? * schedule.step_count() as u64)
}
