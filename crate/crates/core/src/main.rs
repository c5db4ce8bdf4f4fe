use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use specfold::acceptance::{run_criterion, KNOWN_RED};
use specfold::ar_knitting::{knit, nakayama_permutation, ArError};
use specfold::field_tower::is_prime;
use specfold::homological::{almost_koszul_resolution, split_by_star_degree};
use specfold::nakayama::{corrected_nakayama, frobenius_certificate, generator_images_json, nakayama_automorphism, NakayamaError};
use specfold::segre::{product_koszul_complex, tensor_species_presentation, KoszulFactor};
use specfold::species::{classify, realize, SpeciesError, SpeciesFile, SpeciesSpec};
use specfold::tensor_algebra::{build_preprojective, PreprojectiveAlgebra};

const DEFAULT_PRIME: u32 = 7;

#[derive(Parser, Debug)]
#[command(name = "specfold", version, about = "Preprojective algebras of Dynkin species")]
struct Cli {
    /// Base prime; overrides the prime stored in species files.
    #[arg(long, global = true, env = "SPECFOLD_PRIME")]
    prime: Option<u32>,
    /// Write output to this file instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Detect the Dynkin type of a species file.
    Classify { file: PathBuf },
    /// Knit the Auslander-Reiten quiver.
    Ar {
        file: PathBuf,
        #[arg(long)]
        dot: bool,
    },
    /// Dump the preprojective algebra as JSON.
    Algebra { file: PathBuf },
    /// Almost Koszul resolution complex of a simple module.
    Koszul {
        file: PathBuf,
        /// Vertex id of the simple.
        #[arg(long)]
        simple: u32,
    },
    /// Nakayama permutation and automorphism.
    Nakayama {
        file: PathBuf,
        /// Certify the automorphism with a Frobenius functional.
        #[arg(long)]
        verify: bool,
    },
    /// Assembled complex over the Segre product of two preprojective algebras.
    Segre {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// Vertex ids `i,j`.
        #[arg(long, value_parser = parse_pair)]
        simple: (u32, u32),
        #[arg(long, value_enum, default_value_t = Emit::Json)]
        emit: Emit,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Run only this criterion.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=10))]
        criterion: Option<u8>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Emit {
    Json,
    Dot,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("input error: {0}")]
    Input(String),
    #[error("{0}")]
    Falsified(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Falsified(_) => 1,
            CliError::Io { .. } | CliError::Input(_) => 2,
        }
    }
}

impl From<SpeciesError> for CliError {
    fn from(e: SpeciesError) -> Self {
        match e {
            SpeciesError::NotDynkin(_) | SpeciesError::Disconnected => CliError::Falsified(format!("NotDynkin: {e}")),
            e => CliError::Input(e.to_string()),
        }
    }
}

impl From<ArError> for CliError {
    fn from(e: ArError) -> Self {
        match e {
            ArError::TableMismatch { .. } => CliError::Falsified(e.to_string()),
            e => CliError::Falsified(format!("NotDynkin: {e}")),
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

fn parse_pair(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(',').ok_or("expected i,j")?;
    Ok((
        a.trim().parse().map_err(|e| format!("{a}: {e}"))?,
        b.trim().parse().map_err(|e| format!("{b}: {e}"))?,
    ))
}

fn check_prime(p: u32) -> Result<u32, CliError> {
    if p == 2 || p >= 1 << 16 || !is_prime(p) {
        return Err(CliError::Input(format!("prime {p} must be an odd prime below 65536")));
    }
    Ok(p)
}

fn load(path: &Path, prime: Option<u32>) -> Result<SpeciesSpec, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file = SpeciesFile::parse(&text)?;
    let p = check_prime(prime.or(file.prime).unwrap_or(DEFAULT_PRIME))?;
    let q = file.to_quiver()?;
    classify(&q)?;
    let mut spec = realize(&q, p)?;
    spec.name = file.name;
    Ok(spec)
}

fn vertex(spec: &SpeciesSpec, id: u32) -> Result<usize, CliError> {
    let labels = spec.quiver.labels();
    labels
        .iter()
        .position(|&l| l == id)
        .ok_or_else(|| CliError::Input(format!("no vertex {id}; vertices are {labels:?}")))
}

fn preprojective(spec: &SpeciesSpec) -> Result<PreprojectiveAlgebra, CliError> {
    build_preprojective(spec).map_err(input)
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Result<(String, Result<(), CliError>), CliError> {
    let prime = cli.prime.map(check_prime).transpose()?;
    let ok = |s: String| Ok((s, Ok(())));
    match &cli.command {
        Command::Classify { file } => {
            let spec = load(file, prime)?;
            let ar = knit(&spec)?;
            let nd = nakayama_permutation(&ar)?;
            let ty = spec.dynkin.as_ref().map(|c| c.ty.to_string()).unwrap_or_default();
            ok(format!("{ty}, representation finite, h={}\n", nd.h))
        }
        Command::Ar { file, dot } => {
            let spec = load(file, prime)?;
            let ar = knit(&spec)?;
            if *dot {
                return ok(ar.to_dot());
            }
            let nd = nakayama_permutation(&ar)?;
            let labels = spec.quiver.labels();
            ok(pretty(&json!({
                "name": spec.name,
                "vertices": ar.num_vertices(),
                "total_dim": ar.total_k_dim(),
                "meshes_hold": ar.meshes_hold(),
                "nakayama": nd.to_json(labels),
            })))
        }
        Command::Algebra { file } => {
            let pp = preprojective(&load(file, prime)?)?;
            ok(pretty(&pp.algebra.to_json()))
        }
        Command::Koszul { file, simple } => {
            let spec = load(file, prime)?;
            let i = vertex(&spec, *simple)?;
            let pp = preprojective(&spec)?;
            let a = &pp.algebra;
            let (c, rep) = almost_koszul_resolution(&pp, i).map_err(|e| CliError::Falsified(e.to_string()))?;
            let split = split_by_star_degree(a, &c).map_err(|e| CliError::Falsified(e.to_string()))?;
            let h2 = rep.h2_vertex().map(|v| a.vertex_name(v).to_string());
            ok(pretty(&json!({
                "simple": a.vertex_name(i),
                "shape": c.shape_string(a),
                "complex": c.to_json(a),
                "q": split.q().to_json(a),
                "r": split.r().to_json(a),
                "h0": a.vertex_name(i),
                "h2": h2,
            })))
        }
        Command::Nakayama { file, verify } => {
            let spec = load(file, prime)?;
            let pp = preprojective(&spec)?;
            let nd = nakayama_permutation(&knit(&spec)?)?;
            let gamma = nakayama_automorphism(&pp, &nd).map_err(|e| CliError::Falsified(e.to_string()))?;
            let mut report = json!({
                "nakayama": nd.to_json(spec.quiver.labels()),
                "gamma": generator_images_json(&pp, &gamma),
            });
            let mut verdict = Ok(());
            if *verify {
                let literal = match frobenius_certificate(&pp.algebra, &gamma) {
                    Ok(_) => "PASS".to_string(),
                    Err(NakayamaError::NoFunctional) => "FAIL: no compatible Frobenius functional".to_string(),
                    Err(e) => return Err(CliError::Falsified(e.to_string())),
                };
                let corrected = corrected_nakayama(&pp, &nd).map_err(|e| CliError::Falsified(e.to_string()))?;
                report["certificate"] = json!({
                    "literal": literal,
                    "corrected": {
                        "galois_exponent": corrected.galois_exponent,
                        "gamma": generator_images_json(&pp, &corrected.gamma),
                        "result": "PASS",
                    },
                });
                if literal != "PASS" {
                    verdict = Err(CliError::Falsified(format!(
                        "literal automorphism: {literal}; Galois-corrected with exponent {} certifies",
                        corrected.galois_exponent
                    )));
                }
            }
            Ok((pretty(&report), verdict))
        }
        Command::Segre {
            left,
            right,
            simple,
            emit,
        } => {
            let (ls, rs) = (load(left, prime)?, load(right, prime)?);
            if ls.prime() != rs.prime() {
                return Err(CliError::Input("left and right species use different primes".into()));
            }
            let (i, j) = (vertex(&ls, simple.0)?, vertex(&rs, simple.1)?);
            let (lp, rp) = (preprojective(&ls)?, preprojective(&rs)?);
            if let Emit::Dot = emit {
                let tsp = tensor_species_presentation(&lp.algebra, &rp.algebra).map_err(input)?;
                return ok(tsp.to_dot());
            }
            let f1 = KoszulFactor::from_preprojective(&lp, i).map_err(input)?;
            let f2 = KoszulFactor::from_preprojective(&rp, j).map_err(input)?;
            let pk = product_koszul_complex(&f1, &f2).map_err(|e| CliError::Falsified(e.to_string()))?;
            let a = &pk.result.algebra;
            ok(pretty(&json!({
                "simple": a.vertex_name(pk.result.vertex),
                "homogeneity": pk.result.homogeneity,
                "shape": pk.result.complex.shape_string(a),
                "complex": pk.result.complex.to_json(a),
                "q": pk.phi.source.to_json(a),
                "r": pk.phi.target.to_json(a),
                "top_star_degrees": pk.top_star_degrees(),
            })))
        }
        Command::Selftest { criterion } => {
            let p = prime.unwrap_or(DEFAULT_PRIME);
            let ids: Vec<u8> = criterion.map_or_else(|| (1..=10).collect(), |c| vec![c]);
            let mut out = format!("selftest over GF({p})\n");
            let mut failed = Vec::new();
            for id in ids {
                let o = run_criterion(id, p);
                out.push_str(&format!("{o}\n"));
                if !o.pass {
                    if let Some((_, why)) = KNOWN_RED.iter().find(|(r, _)| *r == id) {
                        out.push_str(&format!("       known red: {why}\n"));
                    }
                    failed.push(id.to_string());
                }
            }
            let verdict = if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Falsified(format!("criteria failing: {}", failed.join(" "))))
            };
            Ok((out, verdict))
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                path: "stdout".into(),
                source,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(text, verdict)| {
        emit(&cli, &text)?;
        verdict
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("specfold: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
