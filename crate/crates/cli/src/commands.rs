use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use rydberg_core::algebra::ad_powers;
use rydberg_core::bounds::{
    coefficient_bound, convergence_ratio, density_ratio_bound, kappa, rigorous_convergence_ratio, BoundClass,
    BoundEnvelope,
};
use rydberg_core::dynamics::{
    taylor_oracle, time_grid, universal_coefficients, universal_window, window_statistics, Eigensystem,
    EvolutionResult,
};
use rydberg_core::export::{
    coefficient_records, format_f64, rational_decimal, records_csv, records_json, topology_label, ConfigEcho, Source,
    Table, DECIMAL_DIGITS,
};
use rydberg_core::series::{boundary_deficit_q, eval_series, observable_coefficients, universality_threshold};
use rydberg_core::space::{hamiltonian_matrix, observable_matrix, parity_matrix, BlockadeBasis};
use rydberg_core::verify::{run_criterion, CRITERIA};
use rydberg_core::{Budget, ModelSpec, ObservableSpec, OperatorSum, Topology, Word};
use serde_json::json;

use crate::{
    AdArgs, BoundsArgs, BoundsTable, ClassArg, CoeffsArgs, Command, Format, MatrixArgs, MatrixKind, ModelArgs,
    ObservableKind, OutputArgs, SimulateArgs, SourceArg, VerifyArgs,
};

/// Exit status when the symbolic and matrix routes disagree.
pub const MISMATCH_EXIT: u8 = 3;

pub fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Coeffs(a) => coeffs(a),
        Command::Simulate(a) => simulate(a).map(|_| ExitCode::SUCCESS),
        Command::Bounds(a) => bounds(a).map(|_| ExitCode::SUCCESS),
        Command::Verify(a) => Ok(verify(a)),
        Command::Ad(a) => ad(a).map(|_| ExitCode::SUCCESS),
        Command::Matrix(a) => matrix(a).map(|_| ExitCode::SUCCESS),
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn echo(pairs: &[(&str, String)]) -> ConfigEcho {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn model_echo(command: &str, model: &ModelSpec) -> ConfigEcho {
    echo(&[
        ("command", command.into()),
        ("topology", topology_label(model)),
        ("lambda_b", model.blockade_range().to_string()),
    ])
}

fn write_table(table: &Table, config: &ConfigEcho, out: &OutputArgs) -> Result<()> {
    let text = match out.format {
        Format::Csv => table.to_csv(config),
        Format::Json => table.to_json(config),
    };
    emit(out.output.as_deref(), &text)
}

fn coeffs(a: CoeffsArgs) -> Result<ExitCode> {
    let model = a.model.model()?;
    let obs = a.observable.spec()?;
    let budget = Budget { max_terms: a.max_terms, ..Budget::default() };
    let jmax = match a.jmax {
        Some(j) => j,
        None => match universality_threshold(&model, &obs) {
            Some(t) if t > 0 => t,
            _ => 5,
        },
    };
    let mut config = model_echo("coeffs", &model);
    config.extend(echo(&[
        ("observable", obs.label()),
        ("jmax", jmax.to_string()),
        ("source", format!("{:?}", a.source).to_lowercase()),
    ]));

    if a.emit_q {
        return emit_q(&a, &model, &obs, jmax, budget, config);
    }

    let symbolic = match a.source {
        SourceArg::Oracle => None,
        _ => Some(observable_coefficients(&model, &obs, jmax, budget)?),
    };
    let oracle = match a.source {
        SourceArg::Symbolic => None,
        _ => {
            if model.topology() == Topology::InfiniteLine {
                bail!("the matrix oracle needs a finite lattice");
            }
            Some(taylor_oracle(&model, &obs, jmax)?.coefficients)
        }
    };
    if let (Some(s), Some(o)) = (&symbolic, &oracle) {
        if s.terms != o.terms {
            eprintln!("error: symbolic and matrix-oracle coefficients differ on {model}");
            for (x, y) in s.terms.iter().zip(&o.terms).filter(|(x, y)| x != y) {
                eprintln!("  order {}: symbolic {} vs oracle {}", x.order, x.value, y.value);
            }
            return Ok(ExitCode::from(MISMATCH_EXIT));
        }
        config.push(("cross_check".into(), "symbolic = matrix-oracle (exact)".into()));
    }
    let (coefficients, source) = match (symbolic, oracle) {
        (Some(s), _) => (s, Source::Symbolic),
        (None, Some(o)) => (o, Source::MatrixOracle),
        (None, None) => unreachable!("at least one source"),
    };
    let records = coefficient_records(&coefficients, source);
    let text = match a.out.format {
        Format::Csv => records_csv(&config, &records, a.decimal),
        Format::Json => records_json(&config, &records, a.decimal),
    };
    emit(a.out.output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn emit_q(
    a: &CoeffsArgs,
    model: &ModelSpec,
    obs: &ObservableSpec,
    jmax: usize,
    budget: Budget,
    mut config: ConfigEcho,
) -> Result<ExitCode> {
    let Topology::Line(l) = model.topology() else {
        bail!("--emit-q probes open chains; use --topology line");
    };
    if *obs != ObservableSpec::DensityPerSite {
        bail!("--emit-q is defined for the density");
    }
    let q = boundary_deficit_q(jmax, l, model.blockade_range(), budget)?;
    config.push(("probes".into(), format!("{l},{}", l + 3)));
    let cell = |x: &Option<rydberg_core::Rational>, f: &dyn Fn(&rydberg_core::Rational) -> String| {
        x.as_ref().map_or_else(String::new, f)
    };
    let text = match a.out.format {
        Format::Csv => {
            let mut out = String::new();
            for (k, v) in &config {
                let _ = writeln!(out, "# {k} = {v}");
            }
            out.push_str(if a.decimal { "order,numerator,denominator,decimal\n" } else { "order,numerator,denominator\n" });
            for (i, x) in q.iter().enumerate() {
                let _ = write!(
                    out,
                    "{},{},{}",
                    i + 1,
                    cell(x, &|r| r.numer().to_string()),
                    cell(x, &|r| r.denom().to_string())
                );
                if a.decimal {
                    let _ = write!(out, ",{}", cell(x, &|r| rational_decimal(r, DECIMAL_DIGITS)));
                }
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let items: Vec<_> = q
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    json!({
                        "order": i + 1,
                        "numerator": x.as_ref().map(|r| r.numer().to_string()),
                        "denominator": x.as_ref().map(|r| r.denom().to_string()),
                    })
                })
                .collect();
            let cfg: serde_json::Map<_, _> = config.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
            serde_json::to_string_pretty(&json!({ "config": cfg, "q": items }))? + "\n"
        }
    };
    emit(a.out.output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn finite(args: &ModelArgs) -> Result<ModelSpec> {
    let model = args.model()?;
    if model.topology() == Topology::InfiniteLine {
        bail!("evolution needs a finite lattice: pass --topology ring|line and --L");
    }
    Ok(model)
}

fn evolve_on(sys: &Eigensystem, a: &SimulateArgs, times: &[f64]) -> Result<EvolutionResult> {
    Ok(match a.observable.observable {
        ObservableKind::G2 => sys.g2(a.observable.distance()?, a.observable.site, times)?,
        _ => sys.evolve(&a.observable.spec()?, times)?,
    })
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let model = finite(&a.model)?;
    let times = time_grid(a.t_start, a.t_stop, a.steps);
    let sys = Eigensystem::with_budget(&model, a.dimension_limit)?;
    let main = evolve_on(&sys, &a, &times)?;

    let mut config = model_echo("simulate", &model);
    config.extend(echo(&[
        ("observable", main.observable.clone()),
        ("dimension", sys.dim().to_string()),
        ("t_start", a.t_start.to_string()),
        ("t_stop", a.t_stop.to_string()),
        ("steps", a.steps.to_string()),
        ("method", "eigendecomposition".into()),
    ]));
    let mut columns = vec!["t".to_string(), "value".to_string()];
    let mut data = vec![times.clone(), main.values.clone()];

    if a.compare_sites.is_some() || a.compare_topology.is_some() {
        let other_args = ModelArgs {
            topology: a.compare_topology.unwrap_or(a.model.topology),
            sites: a.compare_sites.or(a.model.sites),
            lambda_b: a.model.lambda_b,
        };
        let other_model = finite(&other_args)?;
        let other = evolve_on(&Eigensystem::with_budget(&other_model, a.dimension_limit)?, &a, &times)?;
        let window = universal_window(&main, &other, a.window_eps);
        config.push(("compare".into(), topology_label(&other_model)));
        config.push(("window_eps".into(), a.window_eps.to_string()));
        config.push(("universal_window".into(), window.map_or_else(|| "none".into(), |t| t.to_string())));
        columns.push(format!("value_{}", topology_label(&other_model).replace(['(', ')'], "")));
        data.push(other.values);
    }
    if let Some(order) = a.overlay_order {
        let obs = a.observable.spec().context("the universal overlay needs a series observable")?;
        let coeffs = universal_coefficients(&obs, model.blockade_range(), order, Budget::default())?;
        let series: Result<Vec<f64>, _> = times.iter().map(|&t| eval_series(&coeffs, t, order)).collect();
        config.push(("overlay_order".into(), order.to_string()));
        columns.push(format!("universal_{order}"));
        data.push(series?);
    }
    if let Some(start) = a.stats_start {
        let stats = window_statistics(&main, start, a.t_stop).context("no samples in the statistics window")?;
        config.push(("stats_window".into(), format!("[{start}, {}]", a.t_stop)));
        config.push(("stats_mean".into(), format_f64(stats.mean)));
        config.push(("stats_variance".into(), format_f64(stats.variance)));
    }
    if !main.undefined.is_empty() {
        config.push(("undefined_points".into(), main.undefined.len().to_string()));
    }

    let mut table = Table::new(columns);
    for i in 0..times.len() {
        table.push(data.iter().map(|c| c[i]).collect());
    }
    write_table(&table, &config, &a.out)
}

fn class(a: &BoundsArgs) -> BoundClass {
    match a.class {
        ClassArg::Density => BoundClass::Density,
        ClassArg::Word => BoundClass::Word { ell: a.ell },
        ClassArg::Correlation => BoundClass::Correlation { d: a.d },
    }
}

fn class_label(c: BoundClass) -> String {
    match c {
        BoundClass::Density => "density".into(),
        BoundClass::Word { ell } => format!("word(ell={ell})"),
        BoundClass::Correlation { d } => format!("correlation(d={d})"),
    }
}

fn bounds(a: BoundsArgs) -> Result<()> {
    let class = class(&a);
    let mut config = echo(&[
        ("command", "bounds".into()),
        ("table", format!("{:?}", a.table).to_lowercase()),
        ("lambda_b", a.lambda_b.to_string()),
    ]);
    let table = match a.table {
        BoundsTable::Kappa => {
            config.push(("a_max".into(), a.a_max.to_string()));
            let mut t = Table::new(["a", "tau", "log_kappa", "omega"]);
            for n in 1..=a.a_max {
                let k = kappa(n as f64)?;
                t.push(vec![n as f64, k.tau, k.log_kappa, k.omega]);
            }
            t
        }
        BoundsTable::Coefficients => {
            config.push(("class".into(), class_label(class)));
            config.push(("jmax".into(), a.jmax.to_string()));
            let mut t = Table::new(["j", "log_bj"]);
            for j in 1..=a.jmax {
                t.push(vec![j as f64, coefficient_bound(j, a.lambda_b, class)?]);
            }
            t
        }
        BoundsTable::Envelope => {
            let l = a.sites.context("--L is required for the envelope")?;
            let env = BoundEnvelope::new(l, a.lambda_b, class)?;
            config.extend(echo(&[
                ("class", class_label(class)),
                ("L", l.to_string()),
                ("first_order", env.first_order.to_string()),
                ("t_start", a.t_start.to_string()),
                ("t_stop", a.t_stop.to_string()),
                ("steps", a.steps.to_string()),
            ]));
            let mut t = Table::new(["t", "log_E", "E"]);
            for x in time_grid(a.t_start, a.t_stop, a.steps) {
                let log = env.log_evaluate(x)?;
                t.push(vec![x, log, log.exp()]);
            }
            t
        }
        BoundsTable::Ratio => {
            config.extend(echo(&[
                ("class", class_label(class)),
                ("ell", a.ell.to_string()),
                ("t", a.t.to_string()),
                ("L_min", a.sites_min.to_string()),
                ("L_max", a.sites_max.to_string()),
            ]));
            let mut t =
                Table::new(["L", "envelope_ratio", "density_ratio_bound", "convergence_ratio", "rigorous_ratio"]);
            for l in a.sites_min.max(2)..=a.sites_max {
                let log = |n: usize| BoundEnvelope::new(n, a.lambda_b, class).and_then(|e| e.log_evaluate(a.t));
                let measured = (log(l)? - log(l - 1)?).exp();
                let bound = if a.lambda_b == 1 && class == BoundClass::Density {
                    density_ratio_bound(l, a.t)?
                } else {
                    f64::NAN
                };
                let asymptotic = convergence_ratio(l, a.lambda_b, a.ell, a.t).unwrap_or(f64::NAN);
                let rigorous = rigorous_convergence_ratio(l, a.lambda_b, a.ell, a.t).unwrap_or(f64::NAN);
                t.push(vec![l as f64, measured, bound, asymptotic, rigorous]);
            }
            t
        }
    };
    write_table(&table, &config, &a.out)
}

fn verify(a: VerifyArgs) -> ExitCode {
    let ids: Vec<u8> = if a.criterion.is_empty() { CRITERIA.to_vec() } else { a.criterion };
    let mut failed = 0;
    for id in &ids {
        let report = run_criterion(*id);
        println!("{report}");
        if !report.passed {
            failed += 1;
        }
    }
    println!("{} passed, {failed} failed", ids.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ad(a: AdArgs) -> Result<()> {
    let model = a.model.model()?;
    let word: Word = match &a.word {
        Some(w) => w.parse()?,
        None => format!("{}:n", a.site).parse()?,
    };
    let word = model.normalize_word(&word)?;
    let budget = Budget { max_terms: a.max_terms, ..Budget::default() };
    let powers = ad_powers(&OperatorSum::from_word(word.clone()), &model, a.order, budget)?;
    let first = if a.all { 0 } else { a.order };
    let mut config = model_echo("ad", &model);
    config.extend(echo(&[("word", word.to_string()), ("order", a.order.to_string())]));
    let text = match a.out.format {
        Format::Csv => {
            let mut out = String::new();
            for (k, v) in &config {
                let _ = writeln!(out, "# {k} = {v}");
            }
            for (j, x) in powers.iter().enumerate().skip(first) {
                let _ = writeln!(out, "# ad^{j}: {} terms, vacuum value {}", x.len(), x.vacuum_expectation());
                out.push_str(&x.to_text());
            }
            out
        }
        Format::Json => {
            let cfg: serde_json::Map<_, _> = config.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
            let orders: Vec<_> = powers
                .iter()
                .enumerate()
                .skip(first)
                .map(|(j, x)| {
                    json!({ "order": j, "terms": x.len(), "vacuum": x.vacuum_expectation().to_string(), "operator": x.to_text() })
                })
                .collect();
            serde_json::to_string_pretty(&json!({ "config": cfg, "orders": orders }))? + "\n"
        }
    };
    emit(a.out.output.as_deref(), &text)
}

fn matrix(a: MatrixArgs) -> Result<()> {
    let model = finite(&a.model)?;
    let basis = BlockadeBasis::new(&model)?;
    let mut out = String::new();
    let mut config = model_echo("matrix", &model);
    config.push(("what".into(), format!("{:?}", a.what).to_lowercase()));
    config.push(("dimension".into(), basis.dim().to_string()));
    let body = match a.what {
        MatrixKind::Hamiltonian => hamiltonian_matrix(&model, &basis)?.to_coordinate_text(),
        MatrixKind::Parity => parity_matrix(&basis).to_coordinate_text(),
        MatrixKind::Observable => {
            let obs = a.observable.spec()?;
            let m = observable_matrix(&model, &basis, &obs)?;
            config.push(("observable".into(), obs.label()));
            config.push(("divisor".into(), m.divisor.to_string()));
            m.matrix.to_coordinate_text()
        }
        MatrixKind::Basis => {
            let mut s = String::new();
            for (i, st) in basis.states().iter().enumerate() {
                let _ = writeln!(s, "{} {}", i + 1, st.render(basis.sites()));
            }
            s
        }
    };
    for (k, v) in &config {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out.push_str(&body);
    emit(a.output.as_deref(), &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TopologyArg;

    #[test]
    fn topology_arguments_map_to_models() {
        let args = ModelArgs { topology: TopologyArg::Ring, sites: Some(5), lambda_b: 2 };
        assert_eq!(args.model().unwrap(), ModelSpec::ring(5, 2).unwrap());
        let missing = ModelArgs { topology: TopologyArg::Line, sites: None, lambda_b: 1 };
        assert!(missing.model().is_err());
        let inf = ModelArgs { topology: TopologyArg::Infinite, sites: None, lambda_b: 1 };
        assert!(finite(&inf).is_err());
    }
}
