//! Subcommands as named experiments.

use std::collections::BTreeMap;

use anyhow::Context;
use femtocell_core::analysis::{
    capacity_imperfect, capacity_perfect, cell_averaged_outage, outage_at, outage_profile_literal, sir_from_distances,
    worst_case_distance_ratios, worst_case_sir_formula, AnalysisParams, CapacityParams, LiteralReading, ProfileForm,
};
use femtocell_core::engine::{
    capacity_comparison, density_tradeoff, estimate_femto_outage, estimate_macro_outage, sweep, sweep_variants,
    traffic_snapshots, Scenario, SimReport, SweepAxis, SweepPoint, Variant,
};
use femtocell_core::geometry::{build_layout, reuse_ratio};
use femtocell_core::units::linear_to_db;
use serde::Serialize;

use crate::output::{to_pretty_json, Table};

/// Subcommand arguments beyond the scenario itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentArgs {
    pub axis: Option<SweepAxis>,
    pub values: Vec<String>,
    pub all_variants: bool,
    pub lambda: f64,
    pub rounds: u32,
    pub densities: Vec<f64>,
    pub points: usize,
    pub exponents: Vec<f64>,
}

impl Default for ExperimentArgs {
    fn default() -> Self {
        ExperimentArgs {
            axis: None,
            values: Vec::new(),
            all_variants: false,
            lambda: 18.0,
            rounds: 1,
            densities: vec![0.0, 0.5, 1.0, 2.0, 4.0],
            points: 50,
            exponents: vec![4.0, 5.0],
        }
    }
}

/// What an experiment produced.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub tables: Vec<Table>,
    pub report: Option<SimReport>,
    /// Extra files written verbatim in every format.
    pub files: Vec<(String, Vec<u8>)>,
}

pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, scenario: &Scenario, args: &ExperimentArgs) -> anyhow::Result<Artifacts>;
}

pub struct AnalyzeOutage;
pub struct AnalyzeCapacity;
pub struct WorstCaseSir;
pub struct Simulate;
pub struct Sweep;
pub struct Traffic;
pub struct Density;

impl Experiment for AnalyzeOutage {
    fn name(&self) -> &'static str {
        "analyze-outage"
    }

    fn run(&self, scenario: &Scenario, args: &ExperimentArgs) -> anyhow::Result<Artifacts> {
        if args.points < 2 {
            anyhow::bail!("--points must be at least 2");
        }
        let mut curves = Table::new(
            "outage_curves",
            &["exponent", "distance_ratio", "outage", "literal_distance_offset", "literal_pi_scaled"],
        );
        let mut averages = Table::new("cell_average", &["exponent", "cell_averaged_outage"]);
        for &k in &args.exponents {
            let params = AnalysisParams {
                pathloss_exponent: k,
                ..scenario.analysis.clone()
            };
            params.validate()?;
            let top = params.boundary_ratio();
            for i in 0..args.points {
                let ratio = 1.0 + (top - 1.0) * i as f64 / (args.points - 1) as f64;
                let literal = |form| outage_profile_literal(ratio, &params, form, LiteralReading::LognormalMean).ok();
                curves.push(vec![
                    k.into(),
                    ratio.into(),
                    outage_at(ratio, &params)?.into(),
                    literal(ProfileForm::DistanceOffset).into(),
                    literal(ProfileForm::PiScaled).into(),
                ]);
            }
            averages.push(vec![k.into(), cell_averaged_outage(&params)?.into()]);
        }
        Ok(Artifacts {
            tables: vec![curves, averages],
            ..Default::default()
        })
    }
}

impl Experiment for AnalyzeCapacity {
    fn name(&self) -> &'static str {
        "analyze-capacity"
    }

    fn run(&self, scenario: &Scenario, _args: &ExperimentArgs) -> anyhow::Result<Artifacts> {
        let mut curves = Table::new(
            "capacity_curves",
            &["curve", "pce_cd_db", "source_activity", "ebio_db", "capacity_imperfect", "capacity_perfect"],
        );
        let base = &scenario.capacity.macro_tier;
        let mut add = |curve: &str, p: CapacityParams| -> anyhow::Result<()> {
            for &ebio_db in &scenario.capacity.ebio_grid_db {
                let q = CapacityParams { ebio_db, ..p.clone() };
                curves.push(vec![
                    curve.into(),
                    q.pce_cd_db.into(),
                    q.source_activity.into(),
                    ebio_db.into(),
                    capacity_imperfect(&q)?.into(),
                    capacity_perfect(&q)?.into(),
                ]);
            }
            Ok(())
        };
        for cd in [1.0, 2.0, 3.0] {
            add("pce", CapacityParams { pce_cd_db: cd, source_activity: 0.05, ..base.clone() })?;
        }
        for sf in [0.01, 0.02, 0.05] {
            add("activity", CapacityParams { pce_cd_db: 1.0, source_activity: sf, ..base.clone() })?;
        }

        let rows = capacity_comparison(scenario)?;
        let mut comparison = Table::new(
            "capacity_comparison",
            &["tier", "ebio_db", "imperfect", "perfect_matched", "perfect", "relative_improvement"],
        );
        for r in &rows {
            comparison.push(vec![
                r.tier.clone().into(),
                r.ebio_db.into(),
                r.imperfect.into(),
                r.perfect_matched.into(),
                r.perfect.into(),
                r.relative_improvement.into(),
            ]);
        }
        let mut report = SimReport::new(scenario);
        report.capacity = rows;
        Ok(Artifacts {
            tables: vec![curves, comparison],
            report: Some(report),
            ..Default::default()
        })
    }
}

impl Experiment for WorstCaseSir {
    fn name(&self) -> &'static str {
        "worst-case-sir"
    }

    fn run(&self, scenario: &Scenario, _args: &ExperimentArgs) -> anyhow::Result<Artifacts> {
        let mut table = Table::new(
            "worst_case_sir",
            &["label", "cluster_size", "reuse_ratio", "formula_linear", "formula_db", "distances_linear", "distances_db"],
        );
        let radius = scenario.layout.macro_radius;
        let n = scenario.channel.pathloss_exponent;
        let mut cases: Vec<(String, Option<u32>, f64)> = vec![("reference".into(), None, 4.6)];
        for cluster in [3u32, 4, 7, 9, 12] {
            cases.push((format!("cluster_{cluster}"), Some(cluster), reuse_ratio(cluster)?));
        }
        for (label, cluster, q) in cases {
            let formula = worst_case_sir_formula(q)?;
            let distances: Vec<f64> = worst_case_distance_ratios(q).iter().map(|r| r * radius).collect();
            let routed = sir_from_distances(radius, &distances, n)?;
            table.push(vec![
                label.into(),
                cluster.into(),
                q.into(),
                formula.into(),
                linear_to_db(formula).into(),
                routed.into(),
                linear_to_db(routed).into(),
            ]);
        }
        Ok(Artifacts {
            tables: vec![table],
            ..Default::default()
        })
    }
}

fn estimate_row(table: &mut Table, tier: &str, scenario: &Scenario, e: &femtocell_core::engine::OutageEstimate) {
    table.push(vec![
        tier.into(),
        scenario.macro_sectors.mode.label().into(),
        scenario.power_control.clone().into(),
        e.p_hat.into(),
        e.stderr.into(),
        e.trials.into(),
        e.outages.into(),
        e.seed.into(),
    ]);
}

const ESTIMATE_HEADERS: [&str; 8] = ["tier", "sector_mode", "power_control", "p_hat", "stderr", "trials", "outages", "seed"];

impl Experiment for Simulate {
    fn name(&self) -> &'static str {
        "simulate"
    }

    fn run(&self, scenario: &Scenario, _args: &ExperimentArgs) -> anyhow::Result<Artifacts> {
        let macro_est = estimate_macro_outage(scenario)?;
        let femto_est = estimate_femto_outage(scenario)?;
        let mut table = Table::new("estimates", &ESTIMATE_HEADERS);
        estimate_row(&mut table, "macro", scenario, &macro_est);
        estimate_row(&mut table, "femto", scenario, &femto_est);
        let mut report = SimReport::new(scenario);
        report.estimates.push(SweepPoint {
            axis: SweepAxis::SectorMode,
            value: scenario.macro_sectors.mode.label().to_string(),
            sector_mode: scenario.macro_sectors.mode,
            power_control: scenario.power_control.clone(),
            macro_outage: macro_est,
            femto_outage: femto_est,
        });
        let layout = build_layout(&scenario.layout, scenario.layout_seed)?;
        Ok(Artifacts {
            tables: vec![table],
            report: Some(report),
            files: vec![("layout.json".into(), to_pretty_json(&layout)?)],
        })
    }
}

impl Experiment for Sweep {
    fn name(&self) -> &'static str {
        "sweep"
    }

    fn run(&self, scenario: &Scenario, args: &ExperimentArgs) -> anyhow::Result<Artifacts> {
        let axis = args.axis.context("sweep needs --axis")?;
        let values = if args.values.is_empty() {
            axis.default_values()
        } else {
            args.values.clone()
        };
        let points = if args.all_variants {
            sweep_variants(scenario, axis, &values, &Variant::all())?
        } else {
            sweep(scenario, axis, &values)?
        };
        let mut table = Table::new(
            "sweep",
            &[
                "axis",
                "value",
                "sector_mode",
                "power_control",
                "macro_p_hat",
                "macro_stderr",
                "femto_p_hat",
                "femto_stderr",
                "trials",
                "seed",
            ],
        );
        for p in &points {
            table.push(vec![
                p.axis.label().into(),
                p.value.clone().into(),
                p.sector_mode.label().into(),
                p.power_control.clone().into(),
                p.macro_outage.p_hat.into(),
                p.macro_outage.stderr.into(),
                p.femto_outage.p_hat.into(),
                p.femto_outage.stderr.into(),
                p.macro_outage.trials.into(),
                scenario.master_seed.into(),
            ]);
        }
        let mut report = SimReport::new(scenario);
        report.estimates = points;
        Ok(Artifacts {
            tables: vec![table],
            report: Some(report),
            ..Default::default()
        })
    }
}

impl Experiment for Traffic {
    fn name(&self) -> &'static str {
        "traffic"
    }

    fn run(&self, scenario: &Scenario, args: &ExperimentArgs) -> anyhow::Result<Artifacts> {
        let snapshots = traffic_snapshots(scenario, args.lambda, args.rounds)?;
        let mut table = Table::new("traffic", &["round", "bs_id", "active", "utilization", "allocated_khz"]);
        for snap in &snapshots {
            for row in &snap.rows {
                table.push(vec![
                    snap.round.into(),
                    row.bs_id.clone().into(),
                    row.active.into(),
                    row.utilization.into(),
                    row.allocated_khz.into(),
                ]);
            }
        }
        let mut report = SimReport::new(scenario);
        report.traffic = snapshots;
        Ok(Artifacts {
            tables: vec![table],
            report: Some(report),
            ..Default::default()
        })
    }
}

impl Experiment for Density {
    fn name(&self) -> &'static str {
        "density"
    }

    fn run(&self, scenario: &Scenario, args: &ExperimentArgs) -> anyhow::Result<Artifacts> {
        let points = density_tradeoff(scenario, &args.densities)?;
        let mut table = Table::new(
            "density",
            &["femto_density", "max_macro_users", "bracket", "macro_p_hat", "femto_p_hat"],
        );
        for p in &points {
            let bracket = serde_json::to_value(p.bracket)?;
            table.push(vec![
                p.femto_density.into(),
                p.max_macro_users.into(),
                bracket.as_str().unwrap_or_default().to_string().into(),
                p.macro_outage.as_ref().map(|e| e.p_hat).into(),
                p.femto_outage.as_ref().map(|e| e.p_hat).into(),
            ]);
        }
        let mut report = SimReport::new(scenario);
        report.density = points;
        Ok(Artifacts {
            tables: vec![table],
            report: Some(report),
            ..Default::default()
        })
    }
}

/// Experiments by subcommand name.
pub struct ExperimentRegistry {
    experiments: BTreeMap<&'static str, Box<dyn Experiment>>,
}

impl Default for ExperimentRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl ExperimentRegistry {
    pub fn builtin() -> Self {
        let mut reg = ExperimentRegistry {
            experiments: BTreeMap::new(),
        };
        let all: Vec<Box<dyn Experiment>> = vec![
            Box::new(AnalyzeOutage),
            Box::new(AnalyzeCapacity),
            Box::new(WorstCaseSir),
            Box::new(Simulate),
            Box::new(Sweep),
            Box::new(Traffic),
            Box::new(Density),
        ];
        for e in all {
            reg.register(e);
        }
        reg
    }

    pub fn register(&mut self, experiment: Box<dyn Experiment>) {
        self.experiments.insert(experiment.name(), experiment);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Experiment> {
        self.experiments.get(name).map(|e| e.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.experiments.keys().copied().collect()
    }
}
