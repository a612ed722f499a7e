//! fssc: command-line front door for the decoder toolkit. Machine-readable
//! results (JSON/JSONL/CSV) go to stdout or the requested output file;
//! human-oriented summaries go to stderr.

use clap::{Args, Parser, Subcommand};
use isa_compiler::{
    analyze_potentials, apply_merge_passes, compile_baseline, read_program, write_program,
    MergeScenario, Program,
};
use polar_core::CodeSpec;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use vm_decoder::{Arith, QuantSpec};

#[derive(Parser)]
#[command(
    name = "fssc",
    version,
    about = "Fast simplified successive-cancellation polar decoding toolkit"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Code selection: an explicit frozen-set file, or (N, K) for the bundled
/// 5G reliability sequence.
#[derive(Args)]
struct CodeArgs {
    /// frozen-set JSON file {"N":..,"K":..,"frozen":[..]}
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
    /// block length (power of two)
    #[arg(long)]
    n: Option<usize>,
    /// information length
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct FrozenFile {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    frozen: Vec<usize>,
}

impl CodeArgs {
    fn load(&self) -> Result<CodeSpec, String> {
        match (&self.spec, self.n, self.k) {
            (Some(path), None, None) => {
                let f = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
                let ff: FrozenFile = serde_json::from_reader(BufReader::new(f))
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                let spec = CodeSpec::from_frozen(ff.n, ff.frozen).map_err(|e| e.to_string())?;
                if spec.info_len() != ff.k {
                    return Err(format!(
                        "frozen set implies K={}, file says K={}",
                        spec.info_len(),
                        ff.k
                    ));
                }
                Ok(spec)
            }
            (None, Some(n), Some(k)) => polar_core::construct_5g(n, k).map_err(|e| e.to_string()),
            _ => Err("give either --spec FILE or both --n and --k".into()),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct a frozen set from the bundled 5G reliability sequence
    Construct {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// output file (stdout if omitted)
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Encode information bits into a codeword
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        /// information bits as a 0/1 string of length K
        #[arg(long)]
        info: Option<String>,
        /// draw random information bits instead
        #[arg(long, conflicts_with = "info")]
        random: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Compile a decoder tree into an instruction listing (JSONL)
    Compile {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        pe: usize,
        /// emit the baseline stream without merged instructions
        #[arg(long)]
        no_merge: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Latency, memory and merge-saving figures for one configuration
    Analyze {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        pe: usize,
        /// analyze the merged stream and packed memory layout
        #[arg(long)]
        merged: bool,
    },
    /// Monte-Carlo FER/BER sweep (CSV)
    Simulate {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        pe: usize,
        /// "qi,qc,qf" for fixed point, or "real"
        #[arg(long, default_value = "6,5,1")]
        quant: String,
        /// Eb/N0 grid: "start:step:stop" or comma list
        #[arg(long)]
        ebno: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        min_errors: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_frames: u64,
        /// simulate the baseline (unmerged) program
        #[arg(long)]
        no_merge: bool,
    },
    /// Execute one noisy frame step by step (JSONL)
    Trace {
        /// program listing from `compile`
        #[arg(long)]
        program: PathBuf,
        /// frame index within the seed's stream
        #[arg(long, default_value_t = 0)]
        frame: u64,
        #[arg(long, default_value_t = 2.5)]
        ebno: f64,
        #[arg(long, default_value = "6,5,1")]
        quant: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Reproduce published tables (2, 3, 5) and figures (6, 9) as CSV
    Report {
        #[arg(long, conflicts_with = "figure")]
        table: Option<u32>,
        #[arg(long)]
        figure: Option<u32>,
        /// comma list of PE counts (tables 2/5, figure 6)
        #[arg(long)]
        pe: Option<String>,
        /// comma list of code rates (table 5)
        #[arg(long)]
        rates: Option<String>,
        #[arg(long, default_value_t = 1024)]
        n: usize,
        /// Eb/N0 grid for figure 9
        #[arg(long, default_value = "1.0:0.5:4.0")]
        ebno: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        min_errors: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_frames: u64,
    },
}

fn out_writer(path: &Option<PathBuf>) -> Result<Box<dyn Write>, String> {
    match path {
        Some(p) => Ok(Box::new(BufWriter::new(
            File::create(p).map_err(|e| format!("{}: {e}", p.display()))?,
        ))),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn parse_quant(s: &str) -> Result<Arith, String> {
    if s.eq_ignore_ascii_case("real") || s.eq_ignore_ascii_case("float") {
        return Ok(Arith::Real);
    }
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("bad quantization '{s}': want qi,qc,qf or 'real'"));
    }
    let mut q = [0u32; 3];
    for (slot, p) in q.iter_mut().zip(&parts) {
        *slot = p.trim().parse().map_err(|_| format!("bad quantization '{s}'"))?;
    }
    let qs = QuantSpec { qi: q[0], qc: q[1], qf: q[2] };
    qs.validate().map_err(|e| e.to_string())?;
    Ok(Arith::Fixed(qs))
}

fn parse_ebno(s: &str) -> Result<Vec<f64>, String> {
    let bad = |_| format!("bad Eb/N0 grid '{s}'");
    if s.contains(':') {
        let p: Vec<&str> = s.split(':').collect();
        if p.len() != 3 {
            return Err(format!("bad Eb/N0 grid '{s}': want start:step:stop"));
        }
        let (start, step, stop): (f64, f64, f64) = (
            p[0].trim().parse().map_err(bad)?,
            p[1].trim().parse().map_err(bad)?,
            p[2].trim().parse().map_err(bad)?,
        );
        if step <= 0.0 || stop < start {
            return Err(format!("bad Eb/N0 grid '{s}'"));
        }
        let mut out = Vec::new();
        let mut i = 0;
        loop {
            let v = start + step * i as f64;
            if v > stop + 1e-9 {
                break;
            }
            out.push(v);
            i += 1;
        }
        Ok(out)
    } else {
        s.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(bad))
            .collect()
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| format!("bad {what} '{s}'")))
        .collect()
}

fn compile_pair(spec: &CodeSpec, pe: usize) -> Result<(Program, Program), String> {
    let base = compile_baseline(spec, pe).map_err(|e| e.to_string())?;
    let merged = apply_merge_passes(&base);
    Ok((base, merged))
}

#[derive(Serialize)]
struct AnalyzeReport {
    steps: usize,
    cycles: usize,
    words_alpha: usize,
    words_beta: usize,
    utilization: f64,
    theta_sp: f64,
    savings_vs_baseline: f64,
}

fn cmd_analyze(code: &CodeArgs, pe: usize, merged: bool) -> Result<(), String> {
    let spec = code.load()?;
    let (base, m) = compile_pair(&spec, pe)?;
    let p = if merged { &m } else { &base };
    let words = if merged {
        perf_model::words_proposed(spec.n(), pe)
    } else {
        perf_model::words_baseline(spec.n(), pe)
    };
    let report = AnalyzeReport {
        steps: p.steps(),
        cycles: p.cycles(),
        words_alpha: words,
        words_beta: words,
        utilization: perf_model::utilization(spec.n(), pe, merged),
        theta_sp: perf_model::theta_sp(spec.block_len(), pe),
        savings_vs_baseline: 100.0 * (base.cycles() - p.cycles()) as f64 / base.cycles() as f64,
    };
    println!("{}", serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?);
    eprintln!(
        "PC({},{}) pe={pe} {}: {} instructions, {} cycles",
        spec.block_len(),
        spec.info_len(),
        if merged { "merged" } else { "baseline" },
        p.steps(),
        p.cycles()
    );
    Ok(())
}

fn cmd_simulate(
    code: &CodeArgs,
    pe: usize,
    quant: &str,
    ebno: &str,
    seed: u64,
    min_errors: u64,
    max_frames: u64,
    no_merge: bool,
) -> Result<(), String> {
    let spec = code.load()?;
    let (base, merged) = compile_pair(&spec, pe)?;
    let prog = if no_merge { base } else { merged };
    let arith = parse_quant(quant)?;
    let points = parse_ebno(ebno)?;
    println!("ebno_db,frames,frame_errors,bit_errors,fer,ber");
    for &point in &points {
        let cfg = channel_mc::McConfig {
            min_frame_errors: min_errors,
            max_frames,
            ..channel_mc::McConfig::new(point, seed)
        };
        let r = channel_mc::montecarlo(&prog, arith, &cfg).map_err(|e| e.to_string())?;
        println!(
            "{},{},{},{},{},{}",
            r.ebno_db, r.frames, r.frame_errors, r.bit_errors, r.fer, r.ber
        );
        eprintln!(
            "{} dB: {} frames, FER {:.3e}, BER {:.3e}",
            r.ebno_db, r.frames, r.fer, r.ber
        );
    }
    Ok(())
}

fn cmd_trace(program: &PathBuf, frame: u64, ebno: f64, quant: &str, seed: u64) -> Result<(), String> {
    let f = File::open(program).map_err(|e| format!("{}: {e}", program.display()))?;
    let prog = read_program(BufReader::new(f)).map_err(|e| e.to_string())?;
    let arith = parse_quant(quant)?;
    let spec = &prog.spec;
    let mut rng = channel_mc::frame_rng(seed, frame);
    let info: Vec<u8> = (0..spec.info_len())
        .map(|_| rand::Rng::gen_range(&mut rng, 0..2u8))
        .collect();
    let x = polar_core::encode(spec, &info).map_err(|e| e.to_string())?;
    let llrs = channel_mc::awgn_llrs(&x, ebno, spec.rate(), &mut rng);
    let (out, entries) = vm_decoder::trace(&prog, &llrs, arith).map_err(|e| e.to_string())?;
    let stdout = std::io::stdout().lock();
    let mut w = BufWriter::new(stdout);
    for e in &entries {
        serde_json::to_writer(&mut w, e).map_err(|e| e.to_string())?;
        w.write_all(b"\n").map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())?;
    eprintln!(
        "frame {frame} @ {ebno} dB: {} steps, frame_error={}",
        entries.len(),
        out.x_hat != x
    );
    Ok(())
}

const TABLE2_ROWS: [MergeScenario; 14] = [
    MergeScenario::F2,
    MergeScenario::F3,
    MergeScenario::F4,
    MergeScenario::G02,
    MergeScenario::G03,
    MergeScenario::C2,
    MergeScenario::C3,
    MergeScenario::C4,
    MergeScenario::C02,
    MergeScenario::C03,
    MergeScenario::GF,
    MergeScenario::FG0,
    MergeScenario::CG,
    MergeScenario::C0G,
];

const TABLE3_ROWS: [MergeScenario; 7] = [
    MergeScenario::RepRepSpc,
    MergeScenario::Rate0RepSpc,
    MergeScenario::RepSpcRate1,
    MergeScenario::RepRate1,
    MergeScenario::Rate0Ml,
    MergeScenario::MlRate1,
    MergeScenario::FRep,
];

#[allow(clippy::too_many_arguments)]
fn cmd_report(
    table: Option<u32>,
    figure: Option<u32>,
    pe: &Option<String>,
    rates: &Option<String>,
    n: usize,
    ebno: &str,
    seed: u64,
    min_errors: u64,
    max_frames: u64,
) -> Result<(), String> {
    match (table, figure) {
        (Some(2), None) => {
            let pes: Vec<usize> = parse_list(pe.as_deref().unwrap_or("32,64,128"), "pe list")?;
            let spec = polar_core::construct_5g(n, n / 2).map_err(|e| e.to_string())?;
            let progs: Vec<Program> = pes
                .iter()
                .map(|&pe| compile_baseline(&spec, pe).map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;
            let header: Vec<String> = pes.iter().map(|pe| format!("pe{pe}")).collect();
            println!("scenario,{}", header.join(","));
            for s in TABLE2_ROWS {
                let cells: Vec<String> = progs
                    .iter()
                    .map(|p| format!("{:.2}", analyze_potentials(p, s)))
                    .collect();
                println!("{},{}", s.name(), cells.join(","));
            }
        }
        (Some(3), None) => {
            let spec = polar_core::construct_5g(n, n / 2).map_err(|e| e.to_string())?;
            let p = compile_baseline(&spec, 64.min(n / 2)).map_err(|e| e.to_string())?;
            println!("scenario,savings_percent");
            for s in TABLE3_ROWS {
                println!("{},{:.2}", s.name(), analyze_potentials(&p, s));
            }
        }
        (Some(5), None) => {
            let pes: Vec<usize> = parse_list(pe.as_deref().unwrap_or("32,64,128"), "pe list")?;
            let rates: Vec<f64> =
                parse_list(rates.as_deref().unwrap_or("0.25,0.5,0.75"), "rate list")?;
            println!("info_len,pe,ops_reduction_percent,cycle_reduction_percent");
            for &r in &rates {
                let k = (n as f64 * r).round() as usize;
                let spec = polar_core::construct_5g(n, k).map_err(|e| e.to_string())?;
                for &pe in &pes {
                    let (base, merged) = compile_pair(&spec, pe)?;
                    let ops = 100.0 * (base.steps() - merged.steps()) as f64 / base.steps() as f64;
                    let ts = 100.0 * (base.cycles() - merged.cycles()) as f64 / base.cycles() as f64;
                    println!("{k},{pe},{ops:.2},{ts:.2}");
                }
            }
        }
        (None, Some(6)) => {
            let pes: Vec<usize> =
                parse_list(pe.as_deref().unwrap_or("16,32,64,128,256"), "pe list")?;
            let nn = (n.trailing_zeros()) as u32;
            println!("pe,words_baseline,words_proposed,util_baseline_percent,util_proposed_percent,theta_sp_percent");
            for &pe in &pes {
                println!(
                    "{pe},{},{},{:.2},{:.2},{:.2}",
                    perf_model::words_baseline(nn, pe),
                    perf_model::words_proposed(nn, pe),
                    perf_model::utilization(nn, pe, false),
                    perf_model::utilization(nn, pe, true),
                    perf_model::theta_sp(n, pe)
                );
            }
        }
        (None, Some(9)) => {
            let spec = polar_core::construct_5g(n, n / 2).map_err(|e| e.to_string())?;
            let (_, prog) = compile_pair(&spec, 64.min(n / 2))?;
            let points = parse_ebno(ebno)?;
            println!("ebno_db,arith,frames,frame_errors,bit_errors,fer,ber");
            for (arith, label) in [
                (Arith::Real, "real"),
                (Arith::Fixed(QuantSpec::default()), "q6_5_1"),
            ] {
                for &point in &points {
                    let cfg = channel_mc::McConfig {
                        min_frame_errors: min_errors,
                        max_frames,
                        ..channel_mc::McConfig::new(point, seed)
                    };
                    let r = channel_mc::montecarlo(&prog, arith, &cfg).map_err(|e| e.to_string())?;
                    println!(
                        "{},{label},{},{},{},{},{}",
                        r.ebno_db, r.frames, r.frame_errors, r.bit_errors, r.fer, r.ber
                    );
                    eprintln!("{label} {} dB: FER {:.3e}", r.ebno_db, r.fer);
                }
            }
        }
        _ => return Err("give --table 2|3|5 or --figure 6|9".into()),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.cmd {
        Cmd::Construct { n, k, out } => {
            let spec = polar_core::construct_5g(n, k).map_err(|e| e.to_string())?;
            let ff = FrozenFile {
                n: spec.block_len(),
                k: spec.info_len(),
                frozen: spec.frozen_set().to_vec(),
            };
            let mut w = out_writer(&out)?;
            serde_json::to_writer(&mut w, &ff).map_err(|e| e.to_string())?;
            writeln!(w).map_err(|e| e.to_string())?;
            eprintln!("PC({n},{k}): {} frozen positions", ff.frozen.len());
            Ok(())
        }
        Cmd::Encode { code, info, random, seed } => {
            let spec = code.load()?;
            let bits: Vec<u8> = if random {
                let mut rng = channel_mc::frame_rng(seed, 0);
                (0..spec.info_len())
                    .map(|_| rand::Rng::gen_range(&mut rng, 0..2u8))
                    .collect()
            } else {
                let s = info.ok_or("give --info BITS or --random")?;
                let bits: Option<Vec<u8>> = s
                    .chars()
                    .map(|c| match c {
                        '0' => Some(0),
                        '1' => Some(1),
                        _ => None,
                    })
                    .collect();
                bits.ok_or_else(|| format!("--info must be a 0/1 string, got '{s}'"))?
            };
            let x = polar_core::encode(&spec, &bits).map_err(|e| e.to_string())?;
            let to_string = |v: &[u8]| v.iter().map(|b| (b'0' + b) as char).collect::<String>();
            println!(
                "{}",
                serde_json::json!({
                    "block_len": spec.block_len(),
                    "info_len": spec.info_len(),
                    "info": to_string(&bits),
                    "codeword": to_string(&x),
                })
            );
            Ok(())
        }
        Cmd::Compile { code, pe, no_merge, out } => {
            let spec = code.load()?;
            let (base, merged) = compile_pair(&spec, pe)?;
            let p = if no_merge { &base } else { &merged };
            let mut w = out_writer(&out)?;
            write_program(p, &mut w).map_err(|e| e.to_string())?;
            w.flush().map_err(|e| e.to_string())?;
            eprintln!(
                "PC({},{}) pe={pe}: {} instructions, {} cycles{}",
                spec.block_len(),
                spec.info_len(),
                p.steps(),
                p.cycles(),
                if no_merge {
                    String::new()
                } else {
                    format!(" (baseline {}/{})", base.steps(), base.cycles())
                }
            );
            Ok(())
        }
        Cmd::Analyze { code, pe, merged } => cmd_analyze(&code, pe, merged),
        Cmd::Simulate {
            code,
            pe,
            quant,
            ebno,
            seed,
            min_errors,
            max_frames,
            no_merge,
        } => cmd_simulate(&code, pe, &quant, &ebno, seed, min_errors, max_frames, no_merge),
        Cmd::Trace { program, frame, ebno, quant, seed } => {
            cmd_trace(&program, frame, ebno, &quant, seed)
        }
        Cmd::Report {
            table,
            figure,
            pe,
            rates,
            n,
            ebno,
            seed,
            min_errors,
            max_frames,
        } => cmd_report(table, figure, &pe, &rates, n, &ebno, seed, min_errors, max_frames),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
