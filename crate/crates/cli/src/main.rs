mod args;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;

use aidyn::bdm::{bdm_1d, bdm_2d, binarize, DEFAULT_BLOCK_1D, DEFAULT_BLOCK_2D};
use aidyn::ca::{self, rule_table, Configuration};
use aidyn::collision::{collision_experiment, evolve_interacting, isolated_runs, sample_interaction_rule};
use aidyn::ctm::{self, build_table, save_table, table_file_name, BuildOptions, CtmTable};
use aidyn::output::{self, emit_csv, emit_pgm};
use aidyn::perturbation::{self, delta_trace, gol_experiment, perturbation_sweep, GolParams, Sensitivity};

use args::{BdmArgs, Cli, CollideArgs, Command, CtmBuildArgs, Dim, EcaArgs, GolArgs, Init, PerturbArgs, TableArgs};

type Echo = Vec<(String, String)>;

fn echo(command: &str) -> Echo {
    vec![
        ("command".into(), command.into()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
    ]
}

fn push(e: &mut Echo, key: &str, value: impl ToString) {
    e.push((key.into(), value.to_string()));
}

fn load_table(args: &TableArgs, class: u32, e: &mut Echo) -> Result<CtmTable> {
    let table = ctm::resolve_table(args.table.as_deref(), class)?.into_owned();
    let source = match &args.table {
        Some(p) => p.display().to_string(),
        None => match ctm::default_table_path(class, 2).filter(|p| p.exists()) {
            Some(p) => p.display().to_string(),
            None => format!("bundled:{}", table_file_name(class, 2)),
        },
    };
    let m = table.meta();
    push(e, "table", source);
    push(e, "table_class", format!("({},{})", m.n, m.k));
    push(e, "table_cutoff", m.cutoff);
    push(e, "table_total", m.total);
    push(e, "table_sampled", m.sampled);
    Ok(table)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

fn csv(path: &Path, e: &Echo, schema: &[&str], rows: &[output::Row]) -> Result<()> {
    emit_csv(path, e, schema, rows)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn ctm_build(a: CtmBuildArgs, workers: usize) -> Result<()> {
    let opts = BuildOptions {
        long_run: a.long_run,
        sample: a.sample,
        sample_seed: a.sample_seed,
    };
    let table = build_table(a.n, a.k, a.cutoff, workers, opts)?;
    let out = a.out.unwrap_or_else(|| table_file_name(a.n, a.k).into());
    save_table(&table, &out)?;
    let m = table.meta();
    println!(
        "({},{}) cutoff={} machines={} halting={} outputs={} -> {}",
        m.n,
        m.k,
        m.cutoff,
        m.total,
        m.halting,
        table.len(),
        out.display()
    );
    Ok(())
}

fn bdm(a: BdmArgs) -> Result<()> {
    let array = output::read_array(&a.input)?;
    let two_d = match a.dim {
        Dim::Auto => array.height() > 1,
        Dim::One => false,
        Dim::Two => true,
    };
    let mut e = echo("bdm");
    let value = if two_d {
        let table = load_table(&a.table, a.table.class_2d(), &mut e)?;
        bdm_2d(&array, &table, a.block.unwrap_or(DEFAULT_BLOCK_2D))?
    } else {
        let table = load_table(&a.table, a.table.class_1d(), &mut e)?;
        let s = binarize(array.cells())?;
        bdm_1d(&s, &table, a.block.unwrap_or(DEFAULT_BLOCK_1D))?
    };
    println!("{}", output::format_real(value.value));
    Ok(())
}

fn eca(a: EcaArgs) -> Result<()> {
    let rule = rule_table(a.rule)?;
    let init = match a.init {
        Init::Single => Configuration::single(a.width, a.width / 2)?,
        Init::Random => ca::random_config(a.seed, a.width, a.density)?,
    };
    let st = ca::evolve_eca(&rule, &init, a.steps)?;
    match a.out {
        Some(path) => emit_pgm(st.frames(), &path)?,
        None => {
            let text = output::pgm_text(st.frames().iter().map(|f| f.cells()))?;
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn perturb(a: PerturbArgs, workers: usize) -> Result<()> {
    ensure_dir(&a.out)?;
    let mut e = echo("perturb");
    if a.single {
        let number = a.rule.context("--single needs --rule")?;
        let rule = rule_table(number)?;
        let flip = a.flip.unwrap_or(a.width / 2);
        push(&mut e, "mode", "single");
        push(&mut e, "rule", number);
        push(&mut e, "width", a.width);
        push(&mut e, "steps", a.steps);
        push(&mut e, "seed", a.seed);
        push(&mut e, "flip", flip);
        push(&mut e, "every", a.every);
        push(&mut e, "block", a.block);
        let table = load_table(&a.table, a.table.class_1d(), &mut e)?;
        let init = perturbation::sweep_initial_state(a.seed, a.width)?;
        let trace = delta_trace(&rule, &init, flip, a.steps, &table, a.block, a.every)?;
        emit_pgm(trace.original.frames(), &a.out.join("unperturbed.pgm"))?;
        emit_pgm(trace.perturbed.frames(), &a.out.join("perturbed.pgm"))?;
        csv(&a.out.join("trace.csv"), &e, output::TRACE_SCHEMA, &output::trace_rows(&trace.delta_bdm))?;
        let (_, last) = trace.delta_bdm.last().copied().unwrap_or_default();
        println!("delta_bdm={}", output::format_real(last));
        return Ok(());
    }
    let rules = a.rules.iter().map(|&r| rule_table(r)).collect::<aidyn::Result<Vec<_>>>()?;
    push(&mut e, "mode", "sweep");
    push(
        &mut e,
        "rules",
        a.rules.iter().map(u32::to_string).collect::<Vec<_>>().join(";"),
    );
    push(&mut e, "width", a.width);
    push(&mut e, "steps", a.steps);
    push(&mut e, "seeds", a.seeds);
    push(&mut e, "block", a.block);
    let table = load_table(&a.table, a.table.class_1d(), &mut e)?;
    let sweep = perturbation_sweep(&rules, a.width, a.steps, a.seeds, &table, a.block, workers)?;
    csv(&a.out.join("sweep.csv"), &e, output::SWEEP_SCHEMA, &output::sweep_rows(&sweep))?;
    csv(
        &a.out.join("sweep_mean.csv"),
        &e,
        output::SWEEP_MEAN_SCHEMA,
        &output::sweep_mean_rows(&sweep),
    )?;
    let schema = output::heatmap_schema(sweep.width);
    let schema: Vec<&str> = schema.iter().map(String::as_str).collect();
    for (name, m) in [
        ("heatmap_delta_bdm.csv", &sweep.mean_delta_bdm),
        ("heatmap_delta_lzw.csv", &sweep.mean_delta_lzw_bytes),
        ("heatmap_delta_entropy.csv", &sweep.mean_delta_entropy),
    ] {
        csv(&a.out.join(name), &e, &schema, &output::heatmap_rows(&sweep.rules, m))?;
    }
    let s = Sensitivity::of(&sweep.reports);
    println!("bdm_only={} lzw_only={}", s.bdm_only, s.lzw_only);
    Ok(())
}

fn collide(a: CollideArgs, workers: usize) -> Result<()> {
    ensure_dir(&a.out)?;
    let (ra, rb) = (rule_table(a.rule_a)?, rule_table(a.rule_b)?);
    let mut e = echo("collide");
    push(&mut e, "rule_a", a.rule_a);
    push(&mut e, "rule_b", a.rule_b);
    push(&mut e, "gap", a.gap);
    push(&mut e, "steps", a.steps);
    push(&mut e, "interaction_seeds", format!("0..{}", a.rules));
    push(&mut e, "block", a.block);
    push(&mut e, "isolated_encoding", "binary; rule_b live cells as 1");
    push(&mut e, "collision_encoding", "ternary binarized 0->00 1->01 -1->10");
    let table = load_table(&a.table, a.table.class_1d(), &mut e)?;
    let reports = collision_experiment(&ra, &rb, a.gap, a.steps, a.rules, &table, a.block, workers)?;
    csv(
        &a.out.join("collision.csv"),
        &e,
        output::COLLISION_SCHEMA,
        &output::collision_rows(&reports),
    )?;
    let iso = isolated_runs(&ra, &rb, a.gap, a.steps)?;
    emit_pgm(iso.a.frames(), &a.out.join("isolated_a.pgm"))?;
    emit_pgm(iso.b.frames(), &a.out.join("isolated_b.pgm"))?;
    let init = iso.lattice.collision_init();
    for seed in 0..a.dump.min(a.rules) {
        let ir = sample_interaction_rule(ra, rb, seed);
        let st = evolve_interacting(&ir, &init, a.steps)?;
        emit_pgm(st.frames(), &a.out.join(format!("collision_{seed}.pgm")))?;
    }
    let n = reports.len() as f64;
    let mean = reports.iter().map(|r| r.delta_bdm_a()).sum::<f64>() / n;
    let var = reports.iter().map(|r| (r.delta_bdm_a() - mean).powi(2)).sum::<f64>() / n;
    println!(
        "reports={} mean_delta_bdm_a={} var_delta_bdm_a={}",
        reports.len(),
        output::format_real(mean),
        output::format_real(var)
    );
    Ok(())
}

fn gol(a: GolArgs, workers: usize) -> Result<()> {
    ensure_dir(&a.out)?;
    if !(0.0..=1.0).contains(&a.density) {
        bail!("density must lie in [0, 1]");
    }
    let p = GolParams {
        width: a.width,
        height: a.height,
        density: a.density,
        pre_steps: a.pre_steps,
        post_steps: a.post_steps,
        block: a.block,
    };
    let mut e = echo("gol");
    push(&mut e, "width", a.width);
    push(&mut e, "height", a.height);
    push(&mut e, "density", a.density);
    push(&mut e, "pre_steps", a.pre_steps);
    push(&mut e, "post_steps", a.post_steps);
    push(&mut e, "seeds", a.seeds);
    push(&mut e, "block", a.block);
    let table = load_table(&a.table, a.table.class_2d(), &mut e)?;
    let reports = gol_experiment(&p, a.seeds, &table, workers)?;
    csv(&a.out.join("gol.csv"), &e, output::GOL_SCHEMA, &output::gol_rows(&reports))?;
    let insensitive = reports
        .iter()
        .filter(|r| r.delta_lzw_bytes() == 0 && r.delta_bdm_volume() != 0.0)
        .count();
    println!("seeds={} lzw_blind_bdm_nonzero={}", reports.len(), insensitive);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let w = cli.workers;
    match cli.command {
        Command::CtmBuild(a) => ctm_build(a, w),
        Command::Bdm(a) => bdm(a),
        Command::Eca(a) => eca(a),
        Command::Perturb(a) => perturb(a, w),
        Command::Collide(a) => collide(a, w),
        Command::Gol(a) => gol(a, w),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
