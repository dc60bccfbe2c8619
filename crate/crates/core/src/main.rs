use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rfring::cli::{
    cmd_chartab, cmd_classes, cmd_glrank, cmd_ktheory, cmd_ring, cmd_verify, glrank_summary,
    parse_map, to_json, Failure, Options, VerifyArgs, WorkspaceDoc,
};

/// Torsion classes, representation rings and K-theory ranks of amalgams of
/// finite groups.
#[derive(Parser)]
#[command(name = "rfring", version)]
struct Cli {
    /// Workspace document (JSON).
    #[arg(long, short, global = true)]
    doc: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Syllable bound for the conjugacy oracle [default: 6].
    #[arg(long, global = true)]
    oracle_bound: Option<usize>,
    /// Largest group order accepted [default: 2000].
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Count only nontrivial p-power classes in n_p.
    #[arg(long, global = true)]
    exclude_identity_np: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Torsion conjugacy classes of an amalgam.
    Classes { amalgam: String },
    /// The ring R_F (or its p-local part) of an amalgam.
    Ring {
        amalgam: String,
        #[arg(long)]
        prime: Option<u64>,
    },
    /// Check a presentation, and optionally an isomorphism onto R_F.
    Verify {
        presentation: String,
        #[arg(long)]
        against: Option<String>,
        #[arg(long)]
        prime: Option<u64>,
        /// gen=pair:i,j or gen=coords:c1,c2,...
        #[arg(long = "map")]
        maps: Vec<String>,
        #[arg(long)]
        search_degree_one: bool,
    },
    /// K⁰/K¹ ranks at a prime.
    Ktheory {
        amalgam: String,
        #[arg(long)]
        prime: u64,
    },
    /// Rank identity for R_F(p)(GL_{p-1}(Z)).
    Glrank {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        class_number: u64,
        /// Δ-orbit sizes on the ideal classes, comma separated.
        #[arg(long, value_delimiter = ',')]
        orbits: Vec<u64>,
    },
    /// Character table of a group.
    Chartab { group: String },
}

fn load(cli: &Cli) -> Result<(WorkspaceDoc, Options), Failure> {
    let path = cli
        .doc
        .as_ref()
        .ok_or_else(|| Failure::input("cli/missing-document", "--doc FILE is required"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input("cli/io", format!("{}: {e}", path.display())))?;
    let doc = WorkspaceDoc::parse(&text)?;
    let mut opts = doc.options.clone();
    if let Some(c) = cli.cap {
        opts.cap = c;
    }
    if let Some(b) = cli.oracle_bound {
        opts.oracle_bound = b;
    }
    if cli.exclude_identity_np {
        opts.include_identity_np = false;
    }
    Ok((doc, opts))
}

fn run(cli: &Cli) -> Result<(String, String), Failure> {
    let out = match &cli.cmd {
        Cmd::Glrank {
            p,
            class_number,
            orbits,
        } => {
            let r = cmd_glrank(*p, *class_number, orbits)?;
            (to_json(&r), glrank_summary(&r))
        }
        cmd => {
            let (doc, opts) = load(cli)?;
            match cmd {
                Cmd::Classes { amalgam } => {
                    let r = cmd_classes(&doc, amalgam, &opts)?;
                    (to_json(&r), r.summary())
                }
                Cmd::Ring { amalgam, prime } => {
                    let r = cmd_ring(&doc, amalgam, *prime, &opts)?;
                    (to_json(&r), r.summary())
                }
                Cmd::Verify {
                    presentation,
                    against,
                    prime,
                    maps,
                    search_degree_one,
                } => {
                    let args = VerifyArgs {
                        against: against.as_deref(),
                        prime: *prime,
                        maps: maps.iter().map(|m| parse_map(m)).collect::<Result<_, _>>()?,
                        search_degree_one: *search_degree_one,
                    };
                    let r = cmd_verify(&doc, presentation, &args, &opts)?;
                    (to_json(&r), r.summary())
                }
                Cmd::Ktheory { amalgam, prime } => {
                    let r = cmd_ktheory(&doc, amalgam, *prime, &opts)?;
                    (to_json(&r), r.summary())
                }
                Cmd::Chartab { group } => {
                    let r = cmd_chartab(&doc, group, &opts)?;
                    (to_json(&r), r.summary())
                }
                Cmd::Glrank { .. } => unreachable!(),
            }
        }
    };
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((json, summary)) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, json) {
                    eprintln!("error[cli/io]: {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            } else {
                print!("{json}");
            }
            eprintln!("{summary}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
