use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frontsheaf::chd::{
    aug_to_chd, degree_zero, enumerate_augmentations, validate_chd, DEFAULT_BOUND,
};
use frontsheaf::dga::NCPoly;
use frontsheaf::sheaf::microlocal_rank;
use frontsheaf::{
    build_dga, build_sheaf, build_strata, verify_axioms, Diagnostic, FrontComplex, PrimeField,
    SimplicialDGA, StratumType,
};

use frontsheaf_cli::report::*;

#[derive(Parser)]
#[command(
    name = "frontsheaf",
    version,
    about = "Augmentations and constructible sheaves of Legendrian surface fronts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Front diagnostics.
    Validate(Common),
    /// Generators, degrees and differentials of the simplicial DGA.
    Dga(Common),
    /// Augmentations over GF(p).
    Augs(Common),
    /// Chain homotopy diagram of each augmentation.
    Chd(Common),
    /// Stratification and a summary of each sheaf.
    Sheaf(Common),
    /// Sheaf conditions and microlocal ranks.
    Verify(Common),
    /// Every stage, or those picked with --stage.
    Report(Common),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
enum Stage {
    Validate,
    Dga,
    Augs,
    Chd,
    Sheaf,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Args)]
struct Common {
    /// Front file (TOML).
    input: PathBuf,
    /// Prime p of the coefficient field GF(p).
    #[arg(long, default_value_t = 2)]
    field: u32,
    /// Largest number of assignments the enumerator may search.
    #[arg(long, default_value_t = DEFAULT_BOUND, value_parser = parse_bound)]
    bound: u128,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stages to include; repeatable or comma separated.
    #[arg(long, value_enum, value_delimiter = ',')]
    stage: Vec<Stage>,
}

fn parse_bound(s: &str) -> Result<u128, String> {
    match s.parse::<u128>() {
        Ok(0) => Err("bound must be positive".into()),
        Ok(b) => Ok(b),
        Err(e) => Err(e.to_string()),
    }
}

/// Input problems, reported with exit code 2.
struct InvalidInput(String);

fn diag_entries(ds: &[Diagnostic]) -> Vec<DiagnosticEntry> {
    ds.iter()
        .map(|d| DiagnosticEntry {
            cell: d.cell.clone(),
            rule: d.rule.clone(),
            message: d.message.clone(),
        })
        .collect()
}

fn format_poly(dga: &SimplicialDGA, x: &NCPoly) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (word, &c)) in x.terms().iter().enumerate() {
        let sign = if c < 0 {
            "-"
        } else if i == 0 {
            ""
        } else {
            "+"
        };
        if i > 0 {
            out.push(' ');
        }
        out.push_str(sign);
        if i > 0 || c < 0 {
            out.push(' ');
        }
        let gens: Vec<String> = word.iter().map(|&g| dga.generator(g).id()).collect();
        match (c.abs(), gens.is_empty()) {
            (a, true) => out.push_str(&a.to_string()),
            (1, false) => out.push_str(&gens.join(" ")),
            (a, false) => out.push_str(&format!("{a} {}", gens.join(" "))),
        }
    }
    out
}

struct Outcome<'a> {
    report: Report,
    common: &'a Common,
    /// The front has validation diagnostics.
    invalid: bool,
}

fn run(cmd: &Command) -> Result<Outcome<'_>, InvalidInput> {
    let (common, default): (&Common, &[Stage]) = match cmd {
        Command::Validate(c) => (c, &[Stage::Validate]),
        Command::Dga(c) => (c, &[Stage::Validate, Stage::Dga]),
        Command::Augs(c) => (c, &[Stage::Validate, Stage::Augs]),
        Command::Chd(c) => (c, &[Stage::Validate, Stage::Chd]),
        Command::Sheaf(c) => (c, &[Stage::Validate, Stage::Sheaf]),
        Command::Verify(c) => (c, &[Stage::Validate, Stage::Augs, Stage::Verify]),
        Command::Report(c) => (
            c,
            &[
                Stage::Validate,
                Stage::Dga,
                Stage::Augs,
                Stage::Chd,
                Stage::Sheaf,
                Stage::Verify,
            ],
        ),
    };
    let stages: Vec<Stage> = if common.stage.is_empty() {
        default.to_vec()
    } else {
        common.stage.clone()
    };
    let want = |s: Stage| stages.contains(&s);
    let field = PrimeField::new(common.field).map_err(|e| InvalidInput(e.to_string()))?;
    let front = FrontComplex::load(&common.input).map_err(|e| InvalidInput(e.to_string()))?;
    let mut report = Report {
        input: common.input.display().to_string(),
        field: field.p(),
        passed: true,
        ..Default::default()
    };

    let diags = front.validate();
    if want(Stage::Validate) {
        let mut sheets: Vec<String> = front.maslov().keys().cloned().collect();
        sheets.sort();
        report.front = Some(FrontSection {
            name: front.name().to_string(),
            cells: front.cells().len(),
            sheets,
            cusps: front.cusp_decls().keys().cloned().collect(),
            diagnostics: diag_entries(&diags),
        });
    }
    if !diags.is_empty() {
        report.passed = false;
        return Ok(Outcome {
            report,
            common,
            invalid: true,
        });
    }
    if stages.iter().all(|&s| s == Stage::Validate) {
        return Ok(Outcome {
            report,
            common,
            invalid: false,
        });
    }

    let dga = build_dga(&front).map_err(|e| InvalidInput(e.to_string()))?;
    if want(Stage::Dga) {
        let failures: Vec<String> = dga
            .d_squared_failures()
            .into_iter()
            .map(|g| dga.generator(g).id())
            .collect();
        report.passed &= failures.is_empty();
        report.dga = Some(DgaSection {
            generators: (0..dga.generators().len())
                .map(|g| {
                    let gen = dga.generator(g);
                    GeneratorEntry {
                        id: gen.id(),
                        upper: gen.upper.clone(),
                        lower: gen.lower.clone(),
                        degree: gen.degree,
                        differential: format_poly(&dga, dga.diff_generator(g)),
                    }
                })
                .collect(),
            d_squared_zero: failures.is_empty(),
            d_squared_failures: failures,
        });
    }
    if !(want(Stage::Augs) || want(Stage::Chd) || want(Stage::Sheaf) || want(Stage::Verify)) {
        return Ok(Outcome {
            report,
            common,
            invalid: false,
        });
    }

    let augs = enumerate_augmentations(&dga, field, common.bound)
        .map_err(|e| InvalidInput(e.to_string()))?;
    if want(Stage::Augs) {
        let vars = degree_zero(&dga);
        report.augmentations = Some(AugSection {
            degree_zero: vars.iter().map(|&g| dga.generator(g).id()).collect(),
            count: augs.len(),
            table: augs
                .iter()
                .map(|a| vars.iter().map(|&g| a.value(g)).collect())
                .collect(),
        });
    }
    let chds: Vec<_> = augs.iter().map(|a| aug_to_chd(&dga, a)).collect();
    if want(Stage::Chd) {
        let entries: Vec<ChdEntry> = chds
            .iter()
            .enumerate()
            .map(|(i, c)| ChdEntry {
                augmentation: i,
                maps: c
                    .maps()
                    .iter()
                    .map(|(cell, m)| {
                        let rows = (0..m.rows())
                            .map(|r| (0..m.cols()).map(|k| m.get(r, k)).collect())
                            .collect();
                        (cell.to_string(), rows)
                    })
                    .collect(),
                diagnostics: diag_entries(&validate_chd(&front, c)),
            })
            .collect();
        report.passed &= entries.iter().all(|e| e.diagnostics.is_empty());
        report.chds = Some(entries);
    }
    if !(want(Stage::Sheaf) || want(Stage::Verify)) {
        return Ok(Outcome {
            report,
            common,
            invalid: false,
        });
    }

    let poset = build_strata(&front).map_err(|e| InvalidInput(e.to_string()))?;
    let mut sheaves = Vec::with_capacity(chds.len());
    for (i, c) in chds.iter().enumerate() {
        sheaves.push(
            build_sheaf(&poset, c).map_err(|e| InvalidInput(format!("augmentation #{i}: {e}")))?,
        );
    }
    if want(Stage::Sheaf) {
        let mut covers: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (s, t) in poset.covering_edges() {
            covers.entry(s).or_default().push(t);
        }
        report.sheaf = Some(SheafSection {
            handle_cells: poset.handles().cells().len(),
            strata: poset
                .strata()
                .iter()
                .map(|st| StratumEntry {
                    id: st.id,
                    handle: st.handle.to_string(),
                    slot: st.slot.clone(),
                    tag: st.tag.name().to_string(),
                    lambda_f: st.lambda_f,
                    dim: st.dim,
                    covers: covers.remove(&st.id).unwrap_or_default(),
                })
                .collect(),
            edges: poset.edges().len(),
            crossing_squares: poset.crossing_squares().len(),
            top_squares: poset.top_dimensional_squares().len(),
            summaries: sheaves
                .iter()
                .enumerate()
                .map(|(i, sh)| {
                    let complex_dims: Vec<usize> =
                        (0..poset.len()).map(|s| sh.complex(s).dim()).collect();
                    SheafSummary {
                        augmentation: i,
                        total_dim: complex_dims.iter().sum(),
                        complex_dims,
                    }
                })
                .collect(),
        });
    }
    if want(Stage::Verify) {
        let mut entries = Vec::new();
        for (i, sh) in sheaves.iter().enumerate() {
            let axioms = verify_axioms(sh);
            let mut ranks = BTreeMap::new();
            for st in poset
                .strata()
                .iter()
                .filter(|st| st.tag == StratumType::Legendrian2)
            {
                let r = microlocal_rank(sh, st.id).map_err(|e| InvalidInput(e.to_string()))?;
                ranks.insert(st.id, r);
            }
            let passed = axioms.passed() && ranks.values().all(|&r| r == 1);
            report.passed &= passed;
            entries.push(VerifyEntry {
                augmentation: i,
                checks: axioms
                    .checks
                    .into_iter()
                    .map(|c| CheckEntry {
                        name: c.name,
                        checked: c.checked,
                        failures: c.failures,
                    })
                    .collect(),
                microlocal_ranks: ranks,
                passed,
            });
        }
        report.verify = Some(entries);
    }
    Ok(Outcome {
        report,
        common,
        invalid: false,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Outcome {
        report,
        common,
        invalid,
    } = match run(&cli.command) {
        Ok(r) => r,
        Err(InvalidInput(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let text = match common.format {
        Format::Text => report.to_text(),
        Format::Structured => {
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
    };
    match &common.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if invalid {
        for d in report.front.iter().flat_map(|f| &f.diagnostics) {
            eprintln!("invalid: [{}] {}: {}", d.rule, d.cell, d.message);
        }
        ExitCode::from(2)
    } else if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
