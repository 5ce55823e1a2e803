//! Reproduction sweeps: run a published table's configuration and print
//! the computed values next to the published ones with ratio columns.
//!
//! Published errors are relative (normalized by the norms of the exact
//! solution at the final time), so computed absolute norms are converted
//! before the ratios are formed; both forms are printed.

use std::f64::consts::PI;

use crate::error::Result;
use crate::multistep::PcConfig;
use crate::problem::{discrete_norms, ErrorNorms};
use crate::rosenbrock::{builtin_tableau, construct_tableau, BuiltinGamma, RootChoice};
use crate::spatial::WenoVariant;

use super::cases::{test_case, CaseId, SpatialConfig};
use super::reference_data::{reference_table, ReferenceTable, TableId};
use super::runner::{run_convergence_study, ConvergenceTable, DtRule, Integrator, RunConfig};
use super::table::format_sci;

/// One scheme's worth of a sweep: the computed table, the published one,
/// and the exact-solution norms used for the relative conversion.
pub struct SweepResult {
    pub computed: ConvergenceTable,
    pub reference: ReferenceTable,
    /// Exact-solution norms at the final time, per resolution.
    pub exact_norms: Vec<ErrorNorms>,
    pub lambda: f64,
    pub final_time: f64,
}

fn rosenbrock_schemes(table: TableId) -> Vec<Integrator> {
    match table {
        TableId::R1 => vec![
            Integrator::Rosenbrock(builtin_tableau(BuiltinGamma::ThirteenFiftieths)),
            Integrator::Rosenbrock(builtin_tableau(BuiltinGamma::ThreeQuarters)),
            Integrator::Rosenbrock(builtin_tableau(BuiltinGamma::OneMinusInvSqrt2)),
        ],
        _ => vec![
            Integrator::Rosenbrock(
                construct_tableau(0.3, RootChoice::Unit).expect("gamma = 3/10 is regular"),
            ),
            Integrator::Rosenbrock(builtin_tableau(BuiltinGamma::ThreeQuarters)),
            Integrator::Rosenbrock(builtin_tableau(BuiltinGamma::OneMinusInvSqrt2)),
        ],
    }
}

fn bdf_schemes(start_m: usize) -> Vec<(Integrator, WenoVariant)> {
    (2..=4)
        .map(|p| {
            let weno = if p == 4 {
                WenoVariant::Weno53
            } else {
                WenoVariant::Weno32
            };
            (
                Integrator::SiPcBdf(PcConfig {
                    start_m,
                    ..PcConfig::standard(p)
                }),
                weno,
            )
        })
        .collect()
}

/// The run configurations reproducing one published table.
pub fn table_runs(table: TableId) -> Vec<(CaseId, f64, RunConfig)> {
    let kdv_eps = 1e-8;
    match table {
        TableId::R1 => rosenbrock_schemes(table)
            .into_iter()
            .map(|integ| {
                (
                    CaseId::R1ConvDiff,
                    0.0,
                    RunConfig {
                        integrator: integ,
                        spatial: SpatialConfig::default(),
                        n_list: vec![40, 80, 160, 320, 640],
                        dt_rule: DtRule::FixedRatio(1.0),
                        final_time: None,
                    },
                )
            })
            .collect(),
        TableId::R2 | TableId::R2B => {
            let lambda = if table == TableId::R2 { 0.1 } else { 10.0 };
            rosenbrock_schemes(table)
                .into_iter()
                .map(|integ| {
                    (
                        CaseId::R2Kdv,
                        lambda,
                        RunConfig {
                            integrator: integ,
                            spatial: SpatialConfig {
                                weno_epsilon: kdv_eps,
                                ..SpatialConfig::default()
                            },
                            n_list: vec![80, 160, 320, 640],
                            dt_rule: if table == TableId::R2 {
                                DtRule::FixedRatio(1.0)
                            } else {
                                DtRule::Cfl(0.5)
                            },
                            final_time: Some(if table == TableId::R2 { PI } else { PI / 4.0 }),
                        },
                    )
                })
                .collect()
        }
        TableId::R3 => rosenbrock_schemes(table)
            .into_iter()
            .map(|integ| {
                (
                    CaseId::R3Biharmonic,
                    0.0,
                    RunConfig {
                        integrator: integ,
                        spatial: SpatialConfig::default(),
                        n_list: vec![40, 80, 160, 320, 640],
                        dt_rule: DtRule::FixedRatio(1.0),
                        final_time: None,
                    },
                )
            })
            .collect(),
        TableId::M1 => bdf_schemes(4)
            .into_iter()
            .map(|(integ, _)| {
                (
                    CaseId::M1Diffusion,
                    0.0,
                    RunConfig {
                        integrator: integ,
                        spatial: SpatialConfig::default(),
                        n_list: vec![40, 80, 160, 320],
                        dt_rule: DtRule::FixedRatio(1.0),
                        final_time: None,
                    },
                )
            })
            .collect(),
        TableId::M2 => bdf_schemes(4)
            .into_iter()
            .map(|(integ, weno)| {
                (
                    CaseId::M2ConvDiff,
                    0.0,
                    RunConfig {
                        integrator: integ,
                        spatial: SpatialConfig {
                            weno,
                            ..SpatialConfig::default()
                        },
                        n_list: vec![40, 80, 160, 320],
                        dt_rule: DtRule::FixedRatio(4.0),
                        final_time: None,
                    },
                )
            })
            .collect(),
        TableId::M3 => bdf_schemes(16)
            .into_iter()
            .map(|(integ, weno)| {
                (
                    CaseId::M3Kdv,
                    0.1,
                    RunConfig {
                        integrator: integ,
                        spatial: SpatialConfig {
                            weno,
                            weno_epsilon: kdv_eps,
                            ..SpatialConfig::default()
                        },
                        n_list: vec![40, 80, 160, 320],
                        dt_rule: DtRule::Cfl(0.4),
                        final_time: None,
                    },
                )
            })
            .collect(),
        TableId::M4 => bdf_schemes(16)
            .into_iter()
            .map(|(integ, _)| {
                (
                    CaseId::M4Biharmonic,
                    0.0,
                    RunConfig {
                        integrator: integ,
                        spatial: SpatialConfig::default(),
                        n_list: vec![40, 80, 160, 320],
                        dt_rule: DtRule::FixedRatio(1.0),
                        final_time: None,
                    },
                )
            })
            .collect(),
    }
}

/// Run the full reproduction of one published table.
pub fn run_sweep(table: TableId) -> Result<Vec<SweepResult>> {
    let runs = table_runs(table);
    let refs = reference_table(table);
    let mut out = Vec::new();
    for ((case_id, lambda, cfg), reference) in runs.into_iter().zip(refs) {
        let mut case = test_case(case_id);
        if lambda != 0.0 {
            case = case.with_lambda(lambda);
        }
        let computed = run_convergence_study(&case, &cfg)?;
        let t_final = cfg.final_time.unwrap_or(case.final_time);
        let exact_norms = cfg
            .n_list
            .iter()
            .map(|&n| {
                let problem = case.make_problem(n, cfg.spatial)?;
                let exact = problem.exact_state(t_final).expect("registered case");
                discrete_norms(&exact.values, problem.grid().dx())
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(SweepResult {
            computed,
            reference,
            exact_norms,
            lambda,
            final_time: t_final,
        });
    }
    Ok(out)
}

impl SweepResult {
    /// Computed relative L2 errors (the published convention).
    pub fn relative_l2(&self) -> Vec<Option<f64>> {
        self.computed
            .rows
            .iter()
            .zip(&self.exact_norms)
            .map(|(r, en)| r.norms.map(|n| n.l2 / en.l2))
            .collect()
    }

    /// Computed relative Linf errors.
    pub fn relative_linf(&self) -> Vec<Option<f64>> {
        self.computed
            .rows
            .iter()
            .zip(&self.exact_norms)
            .map(|(r, en)| r.norms.map(|n| n.linf / en.linf))
            .collect()
    }

    /// Render the side-by-side comparison.
    pub fn comparison_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "table {} | {} | case {} | T = {:.6}\n",
            self.reference.table.name(),
            self.computed.scheme,
            self.computed.case,
            self.final_time,
        ));
        out.push_str(
            "   N |   L2 (abs)  |  L2 (rel)   |  published  | ratio | order | pub.o | mass drift\n",
        );
        for (k, r) in self.computed.rows.iter().enumerate() {
            let pr = self.reference.rows.get(k);
            match (&r.norms, pr) {
                (Some(n), Some(p)) => {
                    let rel = n.l2 / self.exact_norms[k].l2;
                    let order = r.orders[1].map(|o| format!("{o:5.2}")).unwrap_or("    -".into());
                    let po = if p.o_l2.is_nan() {
                        "    -".to_string()
                    } else {
                        format!("{:5.2}", p.o_l2)
                    };
                    out.push_str(&format!(
                        "{:>5} | {} | {} | {} | {:5.2} | {order} | {po} | {:.1e}\n",
                        r.n,
                        format_sci(n.l2),
                        format_sci(rel),
                        format_sci(p.l2),
                        rel / p.l2,
                        r.mass_drift,
                    ));
                }
                (Some(n), None) => {
                    out.push_str(&format!("{:>5} | {}\n", r.n, format_sci(n.l2)));
                }
                (None, _) => {
                    out.push_str(&format!(
                        "{:>5} | failed: {}\n",
                        r.n,
                        r.failure.as_deref().unwrap_or("")
                    ));
                }
            }
        }
        out
    }
}
