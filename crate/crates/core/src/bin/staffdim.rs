use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use staffdim::master::{
    calibrate_alpha, compute_requirements, master_lower_bound, pareto_front, solve_master,
    RequirementOptions,
};
use staffdim::model::{load_instance, load_scenarios, save_instance, save_scenarios};
use staffdim::report::{report_json, report_tables, run_report, SolveRecord};
use staffdim::routing::{cycle_durations, routes_from_table};
use staffdim::scengen::{generate_series, generate_territory, sample_scenarios, TerritorySpec};
use staffdim::slave::{solve_slave, CoverBound, SlaveTask};
use staffdim::{Series, Sparsity};

#[derive(Parser)]
#[command(name = "staffdim", version, about = "Staff dimensioning for home health care")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark instance and its scenarios.
    Gen {
        #[arg(long, default_value = "S1.1")]
        series: Series,
        #[arg(long, default_value = "rural")]
        sparsity: Sparsity,
        #[arg(long, default_value_t = 10)]
        divisions: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        scenarios: usize,
        /// Directory receiving instance.json and scenarios.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Count the admissible routes of a profession.
    Routes {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        profession: String,
    },
    /// Minimal caregivers of one profession for one scenario.
    Slave {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        scenarios: PathBuf,
        /// Index into the scenario file.
        #[arg(long, default_value_t = 0)]
        scenario: usize,
        #[arg(long)]
        profession: String,
        /// Seconds, or "inf".
        #[arg(long, default_value = "300", value_parser = parse_limit)]
        time_limit: Limit,
    },
    /// Staffing levels covering a target share of days.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        scenarios: PathBuf,
        #[arg(long, default_value_t = 0.8)]
        alpha_star: f64,
        /// Sample coverage ratio; calibrated from --alpha-star when absent.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value = "300", value_parser = parse_limit)]
        time_limit: Limit,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        out: PathBuf,
        /// Store the requirement matrix in the output.
        #[arg(long)]
        dump_matrix: bool,
        /// Store every caregiver's plan as well (implies --dump-matrix).
        #[arg(long)]
        keep_assignments: bool,
    },
    /// Cost and coverage trade-off as CSV.
    Pareto {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        scenarios: PathBuf,
        #[arg(long, default_value = "300", value_parser = parse_limit)]
        time_limit: Limit,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tables of a solved run directory.
    Report {
        /// Directory with instance.json, scenarios.json and solution.json.
        #[arg(long)]
        run: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy)]
struct Limit(Option<Duration>);

fn parse_limit(s: &str) -> Result<Limit, String> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(Limit(None));
    }
    let secs: f64 = s.parse().map_err(|_| format!("not a number of seconds: {s}"))?;
    if secs.is_nan() || secs < 0.0 {
        return Err(format!("negative time limit: {s}"));
    }
    Ok(Limit(Some(Duration::from_secs_f64(secs))))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Gen {
            series,
            sparsity,
            divisions,
            seed,
            scenarios,
            out,
        } => {
            let territory = generate_territory(&TerritorySpec {
                sparsity,
                divisions,
                seed,
            });
            let instance = generate_series(series, territory, seed);
            let draws = sample_scenarios(&instance, seed, scenarios);
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            save_instance(&instance, out.join("instance.json"))?;
            save_scenarios(&draws, out.join("scenarios.json"))?;
            println!("{} with {scenarios} scenarios in {}", instance.label, out.display());
        }
        Command::Routes {
            instance,
            profession,
        } => {
            let instance = load_instance(instance)?;
            let routes = staffdim::enumerate_routes(&instance, &profession)?;
            println!("routes: {}", routes.len());
            println!("size,count");
            for (size, count) in routes.histogram().iter().enumerate() {
                println!("{size},{count}");
            }
        }
        Command::Slave {
            instance,
            scenarios,
            scenario,
            profession,
            time_limit,
        } => {
            let instance = load_instance(instance)?;
            let draws = load_scenarios(scenarios, &instance)?;
            let Some(day) = draws.get(scenario) else {
                bail!("scenario {scenario} out of range ({} in file)", draws.len());
            };
            let p = instance.profession_index(&profession)?;
            let routes = routes_from_table(&instance, p, &cycle_durations(&instance.territory));
            let cover = CoverBound::new(&routes);
            let mut task = SlaveTask::new(&instance, p, day, &routes)?.with_time_limit(time_limit.0);
            if let Some(c) = &cover {
                task = task.with_cover_bound(c);
            }
            let mut result = solve_slave(&task)?;
            result.assignment = None;
            println!("{}", serde_json::to_string_pretty(&result)?);
        }
        Command::Solve {
            instance,
            scenarios,
            alpha_star,
            alpha,
            time_limit,
            threads,
            out,
            dump_matrix,
            keep_assignments,
        } => {
            let instance = load_instance(instance)?;
            let draws = load_scenarios(scenarios, &instance)?;
            let alpha = match alpha {
                Some(a) => a,
                None => calibrate_alpha(alpha_star, draws.len())?,
            };
            let options = RequirementOptions {
                time_limit: time_limit.0,
                threads,
                keep_assignments,
                ..RequirementOptions::default()
            };
            let req = compute_requirements(&instance, &draws, alpha, &options)?;
            let costs = instance.costs();
            let sol = solve_master(&req, &costs, alpha)?;
            let record = SolveRecord {
                label: instance.label.clone(),
                alpha_star: Some(alpha_star),
                alpha,
                professions: req.professions.clone(),
                n: sol.n.clone(),
                cost: sol.cost,
                coverage: sol.coverage,
                confidence_lb: sol.confidence_lb,
                covered: sol.covered.clone(),
                master_lower_bound: master_lower_bound(&req, &costs, alpha)?,
                matrix: (dump_matrix || keep_assignments).then_some(req),
            };
            write(&out, &(serde_json::to_string_pretty(&record)? + "\n"))?;
            for (id, n) in record.professions.iter().zip(&record.n) {
                println!("{id}: {n}");
            }
            println!(
                "cost {}  coverage {:.3}  confidence bound {:.4}  lower bound {}",
                record.cost, record.coverage, record.confidence_lb, record.master_lower_bound
            );
        }
        Command::Pareto {
            instance,
            scenarios,
            time_limit,
            threads,
            out,
        } => {
            let instance = load_instance(instance)?;
            let draws = load_scenarios(scenarios, &instance)?;
            let options = RequirementOptions {
                time_limit: time_limit.0,
                threads,
                ..RequirementOptions::default()
            };
            let req = compute_requirements(&instance, &draws, 1.0, &options)?;
            let front = pareto_front(&req, &instance.costs())?;
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["coverage".to_string(), "cost".to_string()];
            header.extend(req.professions.iter().map(|p| format!("n_{p}")));
            w.write_record(&header)?;
            for point in &front {
                let mut row = vec![format!("{:.4}", point.coverage), point.cost.to_string()];
                row.extend(point.n.iter().map(u32::to_string));
                w.write_record(&row)?;
            }
            let text = String::from_utf8(w.into_inner()?)?;
            match out {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
            let approximate = front.iter().filter(|p| p.approximate).count();
            if approximate > 0 {
                eprintln!("{approximate} point(s) rest on requirements not proven optimal");
            }
        }
        Command::Report { run, format } => {
            let instance = load_instance(run.join("instance.json"))?;
            let draws = load_scenarios(run.join("scenarios.json"), &instance)?;
            let text = fs::read_to_string(run.join("solution.json"))
                .with_context(|| format!("reading {}", run.join("solution.json").display()))?;
            let record: SolveRecord = serde_json::from_str(&text)?;
            let report = run_report(&instance, &draws, &record)?;
            match format {
                Format::Json => print!("{}", report_json(&report)?),
                Format::Csv => {
                    if report.workload.is_none() {
                        eprintln!("no assignments in solution.json; re-solve with --keep-assignments for the workload table");
                    }
                    for (i, (name, table)) in report_tables(&report).into_iter().enumerate() {
                        write(&run.join(name), &table)?;
                        if i > 0 {
                            println!();
                        }
                        print!("{table}");
                    }
                }
            }
        }
    }
    Ok(())
}
