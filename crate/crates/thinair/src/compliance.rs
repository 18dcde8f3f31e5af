//! Rules engine for FAA FTD Level 4–7 and FFS Level A–D criteria as they
//! bear on mid-air haptic (virtual) controls, plus a latency-budget checker
//! backed by a stage-delay pipeline model.
//!
//! Only criteria encoded in the rule table are evaluated; reports carry a
//! disclaimer and the modeling assumptions. Haptic cues are budgeted with
//! motion and instrument cues (the stricter 100 ms figure) at FFS levels C
//! and D.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interaction::{CockpitProfile, ControlCategory, ControlWidget, WidgetKind};

#[derive(Debug, Error)]
pub enum ComplianceError {
    #[error("unknown simulator level \"{0}\"")]
    UnknownLevel(String),
    #[error("focal distance {0} must be >= 0")]
    NegativeDistance(f64),
}

/// FAA training-device qualification levels covered by the rule table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimLevel {
    Ftd4,
    Ftd5,
    Ftd6,
    Ftd7,
    FfsA,
    FfsB,
    FfsC,
    FfsD,
}

impl SimLevel {
    pub const ALL: [SimLevel; 8] = [
        SimLevel::Ftd4,
        SimLevel::Ftd5,
        SimLevel::Ftd6,
        SimLevel::Ftd7,
        SimLevel::FfsA,
        SimLevel::FfsB,
        SimLevel::FfsC,
        SimLevel::FfsD,
    ];

    pub fn is_ffs(&self) -> bool {
        matches!(
            self,
            SimLevel::FfsA | SimLevel::FfsB | SimLevel::FfsC | SimLevel::FfsD
        )
    }

    /// Transport-delay budget where the standards state one.
    pub fn latency_budget_us(&self) -> Option<u64> {
        match self {
            SimLevel::FfsA | SimLevel::FfsB => Some(300_000),
            SimLevel::FfsC | SimLevel::FfsD => Some(100_000),
            _ => None,
        }
    }
}

impl fmt::Display for SimLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SimLevel::Ftd4 => "ftd4",
            SimLevel::Ftd5 => "ftd5",
            SimLevel::Ftd6 => "ftd6",
            SimLevel::Ftd7 => "ftd7",
            SimLevel::FfsA => "ffs_a",
            SimLevel::FfsB => "ffs_b",
            SimLevel::FfsC => "ffs_c",
            SimLevel::FfsD => "ffs_d",
        };
        f.write_str(s)
    }
}

impl FromStr for SimLevel {
    type Err = ComplianceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ftd4" => Ok(SimLevel::Ftd4),
            "ftd5" => Ok(SimLevel::Ftd5),
            "ftd6" => Ok(SimLevel::Ftd6),
            "ftd7" => Ok(SimLevel::Ftd7),
            "ffs_a" | "ffsa" | "a" => Ok(SimLevel::FfsA),
            "ffs_b" | "ffsb" | "b" => Ok(SimLevel::FfsB),
            "ffs_c" | "ffsc" | "c" => Ok(SimLevel::FfsC),
            "ffs_d" | "ffsd" | "d" => Ok(SimLevel::FfsD),
            other => Err(ComplianceError::UnknownLevel(other.into())),
        }
    }
}

/// Severity of a finding, ordered: opportunity < potential risk < risk.
/// These map onto the green/amber/red reading of the qualification chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingStatus {
    Opportunity,
    PotentialRisk,
    Risk,
}

/// Overall report verdict: the worst finding status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Clear,
    Amber,
    Red,
}

/// One rule evaluation outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub rule_id: String,
    pub status: FindingStatus,
    pub subject: String,
    pub citation: String,
}

impl Finding {
    fn new(rule_id: &str, status: FindingStatus, subject: &str, citation: &str) -> Self {
        Self {
            rule_id: rule_id.into(),
            status,
            subject: subject.into(),
            citation: citation.into(),
        }
    }
}

/// Full audit output for one profile at one level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplianceReport {
    pub level: SimLevel,
    pub verdict: Verdict,
    pub findings: Vec<Finding>,
    pub assumptions: Vec<String>,
    pub disclaimer: String,
}

const ANSI_GREEN: &str = "\u{1b}[32m";
const ANSI_AMBER: &str = "\u{1b}[33m";
const ANSI_RED: &str = "\u{1b}[31m";
const ANSI_RESET: &str = "\u{1b}[0m";

fn paint(text: &str, code: &str, color: bool) -> String {
    if color {
        format!("{code}{text}{ANSI_RESET}")
    } else {
        text.to_string()
    }
}

impl FindingStatus {
    /// Chart color for this status.
    pub fn color_key(&self) -> &'static str {
        match self {
            FindingStatus::Opportunity => "GREEN",
            FindingStatus::PotentialRisk => "AMBER",
            FindingStatus::Risk => "RED",
        }
    }

    fn ansi(&self) -> &'static str {
        match self {
            FindingStatus::Opportunity => ANSI_GREEN,
            FindingStatus::PotentialRisk => ANSI_AMBER,
            FindingStatus::Risk => ANSI_RED,
        }
    }
}

impl ComplianceReport {
    /// Plain-text summary keyed green/amber/red, optionally ANSI-colored.
    pub fn text_summary(&self, color: bool) -> String {
        let verdict_paint = match self.verdict {
            Verdict::Clear => paint("CLEAR", ANSI_GREEN, color),
            Verdict::Amber => paint("AMBER", ANSI_AMBER, color),
            Verdict::Red => paint("RED", ANSI_RED, color),
        };
        let mut out = format!(
            "compliance audit at level {}: {}\n",
            self.level, verdict_paint
        );
        for f in &self.findings {
            out.push_str(&format!(
                "  [{}] {:<32} {} — {}\n",
                paint(f.status.color_key(), f.status.ansi(), color),
                f.rule_id,
                f.subject,
                f.citation
            ));
        }
        out.push_str("assumptions:\n");
        for a in &self.assumptions {
            out.push_str(&format!("  - {a}\n"));
        }
        out.push_str(&format!("note: {}\n", self.disclaimer));
        out
    }
}

const CITE_FTD4: &str = "All controls, switches, and knobs may be touch sensitive activation \
     or may physically replicate the aircraft in control operation.";
const CITE_FTD5_FLIGHT: &str = "Primary and secondary flight controls (e.g., rudder, aileron, \
     elevator, flaps, spoilers/speed brakes, engine controls, landing gear, nosewheel steering, \
     trim, brakes) must be physical controls.";
const CITE_FTD5_OTHER: &str =
    "All other controls, switches, and knobs may be touch sensitive activation.";
const CITE_FTD67: &str =
    "All controls, switches, and knobs must physically replicate the aircraft in control operation.";
const CITE_FFS_REPLICA: &str = "The simulator must have a flight deck that is a replica of the \
     airplane simulated with controls, equipment, observable flight deck indicators, circuit \
     breakers, and bulkheads properly located, functionally accurate and replicating the airplane.";
const CITE_PHYSICAL: &str = "Physical control; replicates the aircraft in control operation.";
const CITE_CONTROL_FEEL: &str = "Simulator control feel dynamics must replicate the airplane.";
const CITE_STICK_PUSHER: &str = "For aircraft equipped with a stick pusher system, control \
     forces, displacement, and surface position must correspond to that of the airplane being \
     simulated; a Statement of Compliance is required.";
const CITE_VISUAL: &str = "The visual system must be free from optical discontinuities.";
const CITE_THRUST: &str = "Normal and reverse dynamic thrust effect on control surfaces.";
const CITE_LATENCY_AB: &str =
    "Test results must be within 300 milliseconds of the airplane response.";
const CITE_LATENCY_CD: &str =
    "Test results must be within 100 milliseconds of the airplane response (motion and instrument cues).";
const CITE_LATENCY_FTD: &str =
    "No transport-delay budget is stated for FTD levels in the encoded criteria.";

fn is_flight_control(category: ControlCategory) -> bool {
    matches!(
        category,
        ControlCategory::PrimaryFlightControl | ControlCategory::SecondaryFlightControl
    )
}

/// Classifies a single control under a level's control-physicality rules.
pub fn classify_control(widget: &ControlWidget, level: SimLevel) -> Finding {
    let subject = widget.id.as_str();
    if !widget.is_virtual() {
        return Finding::new(
            "physical_control",
            FindingStatus::Opportunity,
            subject,
            CITE_PHYSICAL,
        );
    }
    match level {
        SimLevel::Ftd4 => Finding::new(
            "ftd4_touch_sensitive",
            FindingStatus::Opportunity,
            subject,
            CITE_FTD4,
        ),
        SimLevel::Ftd5 => {
            if is_flight_control(widget.category) {
                Finding::new(
                    "ftd5_flight_controls_physical",
                    FindingStatus::Risk,
                    subject,
                    CITE_FTD5_FLIGHT,
                )
            } else {
                Finding::new(
                    "ftd5_other_touch_sensitive",
                    FindingStatus::Opportunity,
                    subject,
                    CITE_FTD5_OTHER,
                )
            }
        }
        SimLevel::Ftd6 => Finding::new(
            "ftd6_physical_replication",
            FindingStatus::Risk,
            subject,
            CITE_FTD67,
        ),
        SimLevel::Ftd7 => Finding::new(
            "ftd7_physical_replication",
            FindingStatus::Risk,
            subject,
            CITE_FTD67,
        ),
        SimLevel::FfsA | SimLevel::FfsB | SimLevel::FfsC | SimLevel::FfsD => Finding::new(
            "ffs_flight_deck_replica",
            FindingStatus::Risk,
            subject,
            CITE_FFS_REPLICA,
        ),
    }
}

/// Ordered stage of the latency pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineStage {
    pub name: String,
    pub delay_us: u64,
}

/// Fixed stage delays plus an acoustic-transit stage derived from focal
/// distance. Stage defaults are engineering estimates, all overridable.
#[derive(Debug, Clone, PartialEq)]
pub struct LatencyPipeline {
    stages: Vec<PipelineStage>,
    speed_of_sound_mps: f64,
}

impl LatencyPipeline {
    pub fn new(stages: Vec<PipelineStage>, speed_of_sound_mps: f64) -> Self {
        Self {
            stages,
            speed_of_sound_mps,
        }
    }

    /// Defaults: tracking 8 ms, contact+scheduling 2 ms, phase solve
    /// 0.5 ms, device buffering 1 ms; sound speed 346 m/s.
    pub fn default_pipeline() -> Self {
        Self {
            stages: vec![
                PipelineStage {
                    name: "tracking".into(),
                    delay_us: 8_000,
                },
                PipelineStage {
                    name: "contact_scheduling".into(),
                    delay_us: 2_000,
                },
                PipelineStage {
                    name: "phase_solve".into(),
                    delay_us: 500,
                },
                PipelineStage {
                    name: "device_buffering".into(),
                    delay_us: 1_000,
                },
            ],
            speed_of_sound_mps: 346.0,
        }
    }

    pub fn stages(&self) -> &[PipelineStage] {
        &self.stages
    }

    pub fn speed_of_sound_mps(&self) -> f64 {
        self.speed_of_sound_mps
    }
}

/// Per-stage and total delay for one focal distance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatencyBreakdown {
    pub stages: Vec<PipelineStage>,
    pub transit_us: u64,
    pub total_us: u64,
}

/// Sums fixed stage delays plus `round(1e6 · distance / c)` acoustic
/// transit.
pub fn simulate_latency(
    pipeline: &LatencyPipeline,
    focal_distance_m: f64,
) -> Result<LatencyBreakdown, ComplianceError> {
    if !(focal_distance_m >= 0.0) {
        return Err(ComplianceError::NegativeDistance(focal_distance_m));
    }
    let transit_us = (1e6 * focal_distance_m / pipeline.speed_of_sound_mps()).round() as u64;
    let stage_sum: u64 = pipeline.stages().iter().map(|s| s.delay_us).sum();
    Ok(LatencyBreakdown {
        stages: pipeline.stages().to_vec(),
        transit_us,
        total_us: stage_sum + transit_us,
    })
}

/// Checks a measured total against the level's transport-delay budget.
/// FTD levels have no stated budget and report an opportunity with a note.
pub fn check_latency_budget(total_us: u64, level: SimLevel) -> Finding {
    match level.latency_budget_us() {
        Some(budget) => {
            let citation = if budget == 300_000 {
                CITE_LATENCY_AB
            } else {
                CITE_LATENCY_CD
            };
            let status = if total_us <= budget {
                FindingStatus::Opportunity
            } else {
                FindingStatus::Risk
            };
            Finding::new(
                "latency_transport_delay",
                status,
                &format!("measured {total_us} µs vs {budget} µs budget"),
                citation,
            )
        }
        None => Finding::new(
            "latency_transport_delay",
            FindingStatus::Opportunity,
            &format!("measured {total_us} µs"),
            CITE_LATENCY_FTD,
        ),
    }
}

fn verdict_of(findings: &[Finding]) -> Verdict {
    match findings.iter().map(|f| f.status).max() {
        Some(FindingStatus::Risk) => Verdict::Red,
        Some(FindingStatus::PotentialRisk) => Verdict::Amber,
        _ => Verdict::Clear,
    }
}

/// Audits a cockpit profile at a level: per-control findings, level-scoped
/// criterion findings, and (when supplied) the latency check. The verdict
/// is the worst finding status.
pub fn assess_compliance(
    profile: &CockpitProfile,
    level: SimLevel,
    measured_latency_us: Option<u64>,
) -> ComplianceReport {
    let mut findings: Vec<Finding> = profile
        .widgets
        .iter()
        .map(|w| classify_control(w, level))
        .collect();

    if level.is_ffs() {
        let any_virtual_flight_control = profile
            .widgets
            .iter()
            .any(|w| w.is_virtual() && is_flight_control(w.category));
        if any_virtual_flight_control {
            findings.push(Finding::new(
                "ffs_control_feel_dynamics",
                FindingStatus::PotentialRisk,
                "control feel dynamics",
                CITE_CONTROL_FEEL,
            ));
        }
        if matches!(level, SimLevel::FfsC | SimLevel::FfsD) {
            let any_virtual_stick = profile
                .widgets
                .iter()
                .any(|w| w.is_virtual() && w.kind == WidgetKind::StickOrRudder);
            if any_virtual_stick {
                findings.push(Finding::new(
                    "ffs_stick_pusher_soc",
                    FindingStatus::PotentialRisk,
                    "stick pusher statement of compliance",
                    CITE_STICK_PUSHER,
                ));
            }
        }
        // Flagged informationally: outside the haptics scope but on the
        // qualification chart for every FFS level.
        findings.push(Finding::new(
            "ffs_visual_continuity",
            FindingStatus::PotentialRisk,
            "visual system",
            CITE_VISUAL,
        ));
        if level == SimLevel::FfsD {
            findings.push(Finding::new(
                "ffs_d_dynamic_thrust",
                FindingStatus::PotentialRisk,
                "aerodynamic modeling",
                CITE_THRUST,
            ));
        }
    }

    if let Some(total) = measured_latency_us {
        findings.push(check_latency_budget(total, level));
    }

    ComplianceReport {
        level,
        verdict: verdict_of(&findings),
        findings,
        assumptions: vec![
            "Haptic cue latency is budgeted with motion and instrument cues (100 ms) at FFS levels C and D.".into(),
            "Default latency-pipeline stage delays are engineering estimates and configurable.".into(),
            "Any virtual control is treated as failing the FFS flight-deck replica rule.".into(),
        ],
        disclaimer:
            "Informational rules-engine output covering only the encoded criteria; not a certification determination."
                .into(),
    }
}
