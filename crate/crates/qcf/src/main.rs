use clap::{Parser, Subcommand, ValueEnum};
use qcf::data::{self, GroupFile};
use qcf::error::Error;
use qcf::geometry::{
    decode_appendix_row, gaussian_binomial, parse_code_text, write_code_text, Code, CodeFormat,
};
use qcf::groups::{code_automorphisms, fingerprint, orbit_space, AutConfig, MatrixGroup};
use qcf::km::{add_closeness, build_model, read_lp, write_lp};
use qcf::normalizer::{ladder_extend, normalizer_of_cyclic, LadderInput};
use qcf::report::{run_battery, verify_code, BatteryOptions, VerifyCodeOptions};
use qcf::solver::{solve, SolveConfig, SolveMode, SolveResult, SolveStatus};
use std::path::PathBuf;
use std::time::Duration;

/// Workbench for constant-dimension subspace codes in PG(6,2) with
/// prescribed automorphism groups.
#[derive(Parser)]
#[command(name = "qcf", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Appendix,
    Json,
}

impl From<FormatArg> for CodeFormat {
    fn from(f: FormatArg) -> CodeFormat {
        match f {
            FormatArg::Appendix => CodeFormat::Appendix,
            FormatArg::Json => CodeFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Gaussian binomial coefficient for q = 2.
    Gauss { n: usize, k: usize },
    /// Decode a 7-digit code row into its RREF basis.
    Decode { row: String },
    /// Check a code file: size, distance, orbit type, hyperplane counts.
    VerifyCode {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "appendix")]
        format: FormatArg,
        /// Bundled group name or JSON path; expands representatives.
        #[arg(long)]
        group: Option<String>,
        /// Also compute the automorphism group order.
        #[arg(long)]
        aut: bool,
        /// Fail unless the minimum distance reaches this value.
        #[arg(long)]
        expect_distance: Option<usize>,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value = "10m")]
        budget: String,
    },
    /// Order, abstract type, and element data of a group.
    GroupInfo { group: String },
    /// Orbit type of a group on the k-subspaces of F_2^n.
    Orbits {
        group: String,
        #[arg(long, default_value_t = 7)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
    },
    /// Build the orbit-packing model and print its shape.
    KmBuild {
        group: String,
        #[arg(long, default_value_t = 7)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        lambda: u32,
    },
    /// Export the model in textual LP format.
    ExportLp {
        group: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        lambda: u32,
    },
    /// Solve a model from an LP file.
    Solve {
        #[arg(long)]
        model: PathBuf,
        /// Decision target; omit to optimize.
        #[arg(long)]
        target: Option<u64>,
        #[arg(long, default_value = "48h")]
        budget: String,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        deterministic: bool,
        #[arg(long)]
        json: bool,
    },
    /// Normalizer of the cyclic group generated by a group file's generator.
    Normalizer {
        #[arg(long)]
        group: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extend order-t classes to order-u groups inside their normalizers.
    Ladder {
        /// Directory of group JSON files for the t-classes. A non-cyclic
        /// class file `g.json` needs a companion `g.normalizer.json`.
        #[arg(long)]
        t_classes: PathBuf,
        #[arg(long)]
        u: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Automorphism group of a code.
    Aut {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "appendix")]
        format: FormatArg,
        /// Expand representatives under this group before the search.
        #[arg(long)]
        group: Option<String>,
        #[arg(long, default_value = "10m")]
        budget: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for codes near a reference code via the closeness constraint.
    Improve {
        code: PathBuf,
        #[arg(long, value_enum, default_value = "appendix")]
        format: FormatArg,
        #[arg(long)]
        group: String,
        /// Closeness threshold c.
        #[arg(long)]
        c: u64,
        /// Decision target; omit to optimize.
        #[arg(long)]
        target: Option<u64>,
        #[arg(long, default_value = "1h")]
        budget: String,
        #[arg(long, default_value_t = 1)]
        lambda: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Run the full reference verification battery.
    VerifyPaper {
        /// Skip the solver checks beyond the order-127 model.
        #[arg(long)]
        fast: bool,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[arg(long)]
        deterministic: bool,
        #[arg(long)]
        json: bool,
        /// Budget for the order-31 solver checks.
        #[arg(long, default_value = "2h")]
        budget: String,
    },
}

fn parse_budget(s: &str) -> Result<Duration, Error> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "empty budget".into(),
        });
    }
    let (num, unit) = s.split_at(s.len() - 1);
    let (value, mult) = match unit {
        "h" => (num, 3600u64),
        "m" => (num, 60),
        "s" => (num, 1),
        _ => (s, 1),
    };
    let v: f64 = value.parse().map_err(|_| Error::Parse {
        line: 0,
        msg: format!("bad budget {s:?}; use forms like 48h, 30m, 90s"),
    })?;
    Ok(Duration::from_secs_f64(v * mult as f64))
}

fn load_group(arg: &str) -> Result<MatrixGroup, Error> {
    MatrixGroup::from_group_file(&data::resolve_group(arg)?)
}

fn load_code_words(
    path: &PathBuf,
    format: CodeFormat,
) -> Result<Vec<qcf::geometry::Subspace>, Error> {
    let text = std::fs::read_to_string(path)?;
    parse_code_text(&text, format)
}

fn print_solve_result(r: &SolveResult, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(r).expect("serializes"));
    } else {
        println!(
            "status {:?}, objective {}, {} selected orbits, {} nodes, {} ms",
            r.status,
            r.objective,
            r.selection.len(),
            r.nodes,
            r.wall_ms
        );
    }
}

fn exit_code_for(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::TimedOut => 2,
        _ => 0,
    }
}

fn run() -> Result<i32, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Gauss { n, k } => {
            println!("{}", gaussian_binomial(n, k));
            Ok(0)
        }
        Command::Decode { row } => {
            let s = decode_appendix_row(&row)?;
            for i in 0..s.dim() {
                let r = s.basis_rows()[i];
                let line: String = (0..s.ambient())
                    .map(|j| if r >> j & 1 == 1 { '1' } else { '0' })
                    .collect();
                println!("{line}");
            }
            Ok(0)
        }
        Command::VerifyCode {
            path,
            format,
            group,
            aut,
            expect_distance,
            json,
            budget,
        } => {
            let words = load_code_words(&path, format.into())?;
            let group = group.as_deref().map(load_group).transpose()?;
            let report = verify_code(
                words,
                &VerifyCodeOptions {
                    group,
                    check_aut: aut,
                    aut_budget: Some(parse_budget(&budget)?),
                    expect_distance,
                },
            )?;
            if json {
                print!("{}", report.to_json());
            } else {
                print!("{}", report.render_text());
            }
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Command::GroupInfo { group } => {
            let file = data::resolve_group(&group)?;
            let g = MatrixGroup::from_group_file(&file)?;
            println!("name: {}", file.name);
            println!("order: {}", g.order().unwrap());
            println!("abstract type: {}", fingerprint(&g)?.label());
            if let Some(stated) = &file.abstract_type {
                println!("stated type: {stated}");
            }
            for (i, gen) in g.generators().iter().enumerate() {
                let ord = gen.element_order(g.order().unwrap() as u64)?;
                let fixed = qcf::groups::conjugacy::fixed_space_dim(gen);
                println!("generator {i}: order {ord}, fixed-space dim {fixed}");
            }
            Ok(0)
        }
        Command::Orbits { group, n, k } => {
            let g = load_group(&group)?;
            let os = orbit_space(n, k, &g)?;
            println!("{}", os.type_string());
            println!(
                "{} orbits on the {k}-subspaces of F_2^{n}",
                os.orbit_count()
            );
            Ok(0)
        }
        Command::KmBuild {
            group,
            n,
            k,
            d,
            lambda,
        } => {
            let g = load_group(&group)?;
            let model = build_model(n, k, d, &g, lambda)?;
            println!("variables (k-orbits): {}", model.full_var_sizes.len());
            println!("  full type:   {}", model.full_type_string());
            println!("  pruned type: {}", model.pruned_type_string());
            println!("rows (t-orbits): {}", model.rows.len());
            println!("anticode bound: {}", model.anticode_bound());
            for w in &model.warnings {
                eprintln!("warning: {w}");
            }
            Ok(0)
        }
        Command::ExportLp {
            group,
            out,
            n,
            k,
            d,
            lambda,
        } => {
            let g = load_group(&group)?;
            let model = build_model(n, k, d, &g, lambda)?;
            std::fs::write(&out, write_lp(&model))?;
            println!(
                "wrote {} ({} variables, {} rows)",
                out.display(),
                model.vars.len(),
                model.rows.iter().filter(|r| !r.entries.is_empty()).count()
            );
            Ok(0)
        }
        Command::Solve {
            model,
            target,
            budget,
            threads,
            deterministic,
            json,
        } => {
            let text = std::fs::read_to_string(&model)?;
            let m = read_lp(&text)?;
            let config = SolveConfig {
                mode: match target {
                    Some(t) => SolveMode::Decision { target: t },
                    None => SolveMode::Optimize,
                },
                time_budget: Some(parse_budget(&budget)?),
                threads,
                deterministic,
                record_bound_trace: false,
            };
            let r = solve(&m, &config);
            print_solve_result(&r, json);
            Ok(exit_code_for(r.status))
        }
        Command::Normalizer { group, out } => {
            let g = load_group(&group)?;
            if !g.is_cyclic()? {
                return Err(Error::InvalidGroup(
                    "normalizer computation needs a cyclic group; supply the normalizer \
                     of a non-cyclic group as its own file"
                        .into(),
                ));
            }
            let (gen, ord) = g.element_of_maximal_order()?;
            let outcome = normalizer_of_cyclic(&gen)?;
            println!(
                "cyclic group of order {ord}; normalizer order {}",
                outcome.group.order().unwrap()
            );
            for s in &outcome.slices {
                println!(
                    "  slice g c = c^{} g: solution dim {}, {} invertible",
                    s.power, s.solution_dim, s.invertible_count
                );
            }
            if let Some(path) = out {
                let file = GroupFile {
                    name: format!("N({group})"),
                    order: outcome.group.order().map(|o| o as u64),
                    abstract_type: None,
                    generators: outcome.group.generators().to_vec(),
                };
                std::fs::write(&path, file.to_json())?;
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
        Command::Ladder { t_classes, u, out } => {
            let mut entries: Vec<PathBuf> = std::fs::read_dir(&t_classes)?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| {
                    p.extension().map(|x| x == "json").unwrap_or(false)
                        && !p
                            .file_name()
                            .map(|f| f.to_string_lossy().ends_with(".normalizer.json"))
                            .unwrap_or(false)
                })
                .collect();
            entries.sort();
            let mut pairs = Vec::new();
            let mut t_order = None;
            for path in &entries {
                let file = GroupFile::from_json(&std::fs::read_to_string(path)?)?;
                let t = MatrixGroup::from_group_file(&file)?;
                t_order = Some(t.order().unwrap() as u64);
                let norm_path = path.with_extension("normalizer.json");
                let n = if norm_path.is_file() {
                    let nf = GroupFile::from_json(&std::fs::read_to_string(&norm_path)?)?;
                    MatrixGroup::from_group_file(&nf)?
                } else if t.is_cyclic()? {
                    let (gen, _) = t.element_of_maximal_order()?;
                    normalizer_of_cyclic(&gen)?.group
                } else {
                    return Err(Error::InvalidGroup(format!(
                        "{} is not cyclic and has no {} companion",
                        path.display(),
                        norm_path.display()
                    )));
                };
                pairs.push((t, n));
            }
            let t = t_order.ok_or_else(|| {
                Error::InvalidGroup(format!("no group files in {}", t_classes.display()))
            })?;
            let outcome = ladder_extend(&LadderInput {
                pairs,
                t,
                u,
                ambient: None,
            })?;
            println!(
                "{} candidate groups of order {u}; classes in [{}, {}]",
                outcome.groups.len(),
                outcome.class_count_lower,
                outcome.class_count_upper
            );
            for (i, g) in outcome.groups.iter().enumerate() {
                println!("  candidate {i}: type {}", fingerprint(g)?.label());
                if let Some(dir) = &out {
                    std::fs::create_dir_all(dir)?;
                    let file = GroupFile {
                        name: format!("ladder_u{u}_{i}"),
                        order: g.order().map(|o| o as u64),
                        abstract_type: None,
                        generators: g.generators().to_vec(),
                    };
                    let path = dir.join(format!("ladder_u{u}_{i}.json"));
                    std::fs::write(&path, file.to_json())?;
                }
            }
            Ok(0)
        }
        Command::Aut {
            path,
            format,
            group,
            budget,
            out,
        } => {
            let words = load_code_words(&path, format.into())?;
            let code = match group.as_deref().map(load_group).transpose()? {
                Some(g) => qcf::groups::expand_orbits(&words, &g)?,
                None => Code::from_words(words)?,
            };
            let aut = code_automorphisms(
                &code,
                &AutConfig {
                    time_budget: Some(parse_budget(&budget)?),
                    parallel: true,
                },
            )?;
            println!("automorphism group order: {}", aut.order().unwrap());
            if aut.elements().is_some() {
                println!("abstract type: {}", fingerprint(&aut)?.label());
            }
            if let Some(path) = out {
                let file = GroupFile {
                    name: "Aut".into(),
                    order: aut.order().map(|o| o as u64),
                    abstract_type: None,
                    generators: aut.generators().to_vec(),
                };
                std::fs::write(&path, file.to_json())?;
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
        Command::Improve {
            code,
            format,
            group,
            c,
            target,
            budget,
            lambda,
            out,
            json,
        } => {
            let g = load_group(&group)?;
            let words = load_code_words(&code, format.into())?;
            let reference = qcf::groups::expand_orbits(&words, &g)?;
            let mut model = build_model(7, 3, 4, &g, lambda)?;
            add_closeness(&mut model, &reference, &g, c)?;
            for w in &model.warnings {
                eprintln!("warning: {w}");
            }
            let config = SolveConfig {
                mode: match target {
                    Some(t) => SolveMode::Decision { target: t },
                    None => SolveMode::Optimize,
                },
                time_budget: Some(parse_budget(&budget)?),
                ..Default::default()
            };
            let r = solve(&model, &config);
            print_solve_result(&r, json);
            if !r.selection.is_empty() {
                let found = model.decode_selection(&r.selection, &g)?;
                let dist = found.min_distance();
                println!(
                    "decoded code: {} words, min distance {:?} (reference {})",
                    found.len(),
                    dist,
                    reference.len()
                );
                if dist.map(|d| d < 4).unwrap_or(false) {
                    return Err(Error::InvalidGroup(
                        "decoded solution violates the distance bound".into(),
                    ));
                }
                if let Some(path) = out {
                    std::fs::write(&path, write_code_text(found.words(), format.into())?)?;
                    println!("wrote {}", path.display());
                }
            }
            Ok(exit_code_for(r.status))
        }
        Command::VerifyPaper {
            fast,
            threads,
            deterministic,
            json,
            budget,
        } => {
            let report = run_battery(&BatteryOptions {
                fast,
                threads,
                deterministic,
                budget_order31: parse_budget(&budget)?,
                ..Default::default()
            })?;
            if json {
                print!("{}", report.to_json());
            } else {
                print!("{}", report.render_text());
            }
            Ok(if report.all_passed() { 0 } else { 1 })
        }
    }
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code),
        Err(Error::TimeBudgetExceeded) => {
            eprintln!("error: time budget exceeded");
            std::process::exit(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
