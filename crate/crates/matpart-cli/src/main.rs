//! Command-line toolkit for Matrix Partition problems: solving,
//! reductions, obstruction enumeration, and the satisfiability gadget.
//!
//! Exit codes: 0 when a homomorphism exists, a property holds, or a
//! rewrite succeeds; 1 when a homomorphism is missing or a property
//! fails; 2 on usage or validation errors; 3 when a resource cap or
//! timeout is hit.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use matpart::{
    binary_to_many_instance, binary_to_many_target, build_instance_tree, build_target,
    comparison_category, core_of, designated_no_instance, find_homomorphism,
    for_each_homomorphism, from_csp, is_homomorphism, is_trivial_target, many_to_binary_instance,
    pack_structure, parse_dimacs, parse_mps, serialize_mps, star_to_01, sylvester, to_csp,
    unpack_instance, verify_reduction, Category, Cnf3, DualityOutcome, Error, HomMap, LStructure,
    ObstructionSearch, Signature, SolveOpts, TargetGadget, TreeGadget, UnpackOutcome,
};

#[derive(Parser)]
#[command(
    name = "matpart",
    version,
    about = "Homomorphism and reduction toolkit for structures labeled from a poset"
)]
struct Cli {
    /// Worker threads for brute-force searches; never changes output
    /// bytes.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether an instance maps into a target.
    Solve(SolveArgs),
    /// Print the core of a structure.
    Core { file: PathBuf },
    /// Report whether a target absorbs every instance.
    Trivial { file: PathBuf },
    /// Rewrite a bottom-label structure over the doubled signature.
    EncodeCsp { file: PathBuf },
    /// Recover a bottom-label structure from its doubled form.
    DecodeCsp { file: PathBuf },
    /// Print the Sylvester matrix of order 2^k as a sign grid.
    Hadamard { k: u32 },
    /// Blow a star instance up into a {0,1} instance for the same
    /// target size.
    Blowup {
        file: PathBuf,
        /// Elements of the target the blow-up is aimed at.
        #[arg(long)]
        target_size: usize,
        /// Also write the block-collapsing projection, one `v -> w`
        /// line per element.
        #[arg(long)]
        projection_out: Option<PathBuf>,
    },
    /// Pack many symbols into one wide symbol and back.
    Arity {
        #[command(subcommand)]
        command: ArityCommand,
    },
    /// Rewrite a single-binary-symbol problem over a many-relation
    /// signature.
    B2m {
        #[command(subcommand)]
        command: B2mCommand,
    },
    /// Collapse a many-relation instance onto a single binary symbol.
    M2b {
        #[command(subcommand)]
        command: M2bCommand,
    },
    /// Enumerate minimal obstructions of a target.
    Obstructions {
        file: PathBuf,
        /// Candidate label category: 01, star, empty, or csp.
        #[arg(long)]
        cat: String,
        /// Largest candidate domain size.
        #[arg(long)]
        max_size: usize,
        /// Which minimality to enumerate.
        #[arg(long)]
        mode: ObstructionCliMode,
        /// Domain bound for the hom-minimality witnesses; defaults to
        /// the candidate bound.
        #[arg(long)]
        universe_bound: Option<usize>,
    },
    /// Check a duality family against a target within a bound.
    Duality {
        file: PathBuf,
        /// Directory of member structures (`.mps` files).
        #[arg(long)]
        family: PathBuf,
        /// Largest candidate domain size; candidates share the
        /// target's category.
        #[arg(long)]
        max_size: usize,
    },
    /// Build or verify satisfiability gadgets.
    Sat {
        #[command(subcommand)]
        command: SatCommand,
    },
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    target: PathBuf,
    /// Enumerate every homomorphism instead of stopping at the first.
    #[arg(long)]
    all: bool,
    /// Exhaustive map search instead of backtracking.
    #[arg(long)]
    brute_force: bool,
    /// Cap on maps or search nodes explored.
    #[arg(long, default_value_t = 10_000_000)]
    max_maps: u64,
    /// Wall-clock limit for the search.
    #[arg(long, default_value_t = 60)]
    timeout_secs: u64,
}

#[derive(Subcommand)]
enum ArityCommand {
    /// Merge all symbols of a structure into one wide symbol.
    Pack { file: PathBuf },
    /// Recover a base structure from a packed instance, or print the
    /// designated no-instance with the refusal reason.
    Unpack {
        file: PathBuf,
        /// Base signature as `NAME/ARITY` entries, e.g. "R/2 S/1".
        #[arg(long)]
        signature: String,
    },
}

#[derive(Subcommand)]
enum B2mCommand {
    /// Lift a target graph to the many-relation signature.
    Target {
        file: PathBuf,
        /// Signature as `NAME/ARITY` entries with a leading symbol of
        /// arity at least 2.
        #[arg(long)]
        signature: String,
    },
    /// Lift an instance graph to the many-relation signature.
    Instance {
        file: PathBuf,
        /// Signature as `NAME/ARITY` entries with a leading symbol of
        /// arity at least 2.
        #[arg(long)]
        signature: String,
    },
}

#[derive(Subcommand)]
enum M2bCommand {
    /// Collapse an instance to a single binary edge symbol.
    Instance { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ObstructionCliMode {
    /// Minimal under one-element deletion.
    Inc,
    /// Minimal in the homomorphism order among cores.
    Hom,
}

#[derive(Subcommand)]
enum SatCommand {
    /// Build the instance tree, target, and bookkeeping for a formula.
    Build {
        cnf: PathBuf,
        /// Output directory for T.mps, H.mps, and book.txt.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full verification harness on a formula.
    Verify { cnf: PathBuf },
}

enum Failure {
    Lib(Error),
    Usage(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Lib(err) => err.fmt(f),
            Failure::Usage(msg) => msg.fmt(f),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Failure {
        Failure::Lib(err)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(Error::CapExceeded { .. }) | Failure::Lib(Error::Timeout) => 3,
            _ => 2,
        }
    }
}

// Die quietly when a downstream pipe closes, like other line-oriented tools,
// instead of panicking on the failed write.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}

fn read_structure(path: &Path) -> Result<LStructure, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_mps(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_formula(path: &Path) -> Result<Cnf3, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_dimacs(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parse_signature(text: &str) -> Result<Signature, Failure> {
    Signature::parse(text).map_err(|e| Failure::Usage(format!("--signature: {e}")))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    if cli.jobs == 0 {
        return Err(Failure::Usage("--jobs must be at least 1".to_string()));
    }
    match cli.command {
        Command::Solve(args) => solve(&args, cli.jobs),
        Command::Core { file } => {
            let core = core_of(&read_structure(&file)?)?;
            print!("{}", serialize_mps(&core));
            Ok(0)
        }
        Command::Trivial { file } => {
            if is_trivial_target(&read_structure(&file)?) {
                println!("trivial");
                Ok(0)
            } else {
                println!("not trivial");
                Ok(1)
            }
        }
        Command::EncodeCsp { file } => {
            let encoded = to_csp(&read_structure(&file)?)?;
            print!("{}", serialize_mps(&encoded));
            Ok(0)
        }
        Command::DecodeCsp { file } => {
            let decoded = from_csp(&read_structure(&file)?)?;
            print!("{}", serialize_mps(&decoded));
            Ok(0)
        }
        Command::Hadamard { k } => {
            let m = sylvester(k)?;
            for i in 0..m.order() {
                let row: String = (0..m.order())
                    .map(|j| if m.entry(i, j) == 1 { '+' } else { '-' })
                    .collect();
                println!("{row}");
            }
            Ok(0)
        }
        Command::Blowup {
            file,
            target_size,
            projection_out,
        } => {
            let g = read_structure(&file)?;
            let blown = star_to_01(&g, target_size)?;
            if let Some(path) = projection_out {
                let mut text = String::new();
                for v in 0..blown.structure.domain_size() {
                    text.push_str(&format!("{v} -> {}\n", blown.projection.apply(v)));
                }
                write_file(&path, &text)?;
            }
            print!("{}", serialize_mps(&blown.structure));
            Ok(0)
        }
        Command::Arity { command } => match command {
            ArityCommand::Pack { file } => {
                let packed = pack_structure(&read_structure(&file)?)?;
                print!("{}", serialize_mps(&packed));
                Ok(0)
            }
            ArityCommand::Unpack { file, signature } => {
                let base = parse_signature(&signature)?;
                match unpack_instance(&read_structure(&file)?, &base)? {
                    UnpackOutcome::Structure(b) => print!("{}", serialize_mps(&b)),
                    UnpackOutcome::NoCertificate(reason) => {
                        println!("# no-certificate: {reason}");
                        print!("{}", serialize_mps(&designated_no_instance(&base)));
                    }
                }
                Ok(0)
            }
        },
        Command::B2m { command } => {
            let (file, signature, target) = match command {
                B2mCommand::Target { file, signature } => (file, signature, true),
                B2mCommand::Instance { file, signature } => (file, signature, false),
            };
            let sig = parse_signature(&signature)?;
            let g = read_structure(&file)?;
            let lifted = if target {
                binary_to_many_target(&g, &sig)?
            } else {
                binary_to_many_instance(&g, &sig)?
            };
            print!("{}", serialize_mps(&lifted));
            Ok(0)
        }
        Command::M2b { command } => {
            let M2bCommand::Instance { file } = command;
            let collapsed = many_to_binary_instance(&read_structure(&file)?)?;
            print!("{}", serialize_mps(&collapsed));
            Ok(0)
        }
        Command::Obstructions {
            file,
            cat,
            max_size,
            mode,
            universe_bound,
        } => {
            let h = read_structure(&file)?;
            let cat: Category = cat
                .parse()
                .map_err(|e: Error| Failure::Usage(format!("--cat: {e}")))?;
            let mut search = ObstructionSearch::new();
            let report = match mode {
                ObstructionCliMode::Inc => {
                    search.inclusion_minimal_obstructions(&h, cat, max_size)?
                }
                ObstructionCliMode::Hom => search.hom_minimal_obstructions(
                    &h,
                    cat,
                    max_size,
                    universe_bound.unwrap_or(max_size),
                )?,
            };
            print!("{}", report.to_text()?);
            Ok(0)
        }
        Command::Duality {
            file,
            family,
            max_size,
        } => {
            let h = read_structure(&file)?;
            let mut members = Vec::new();
            let mut paths: Vec<PathBuf> = fs::read_dir(&family)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", family.display())))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|ext| ext == "mps"))
                .collect();
            paths.sort();
            for path in paths {
                members.push(read_structure(&path)?);
            }
            let mut search = ObstructionSearch::new();
            match search.duality_holds(&members, &h, h.category(), max_size)? {
                DualityOutcome::Holds => {
                    println!("duality holds");
                    Ok(0)
                }
                DualityOutcome::Violation(candidate) => {
                    println!("violation");
                    print!("{}", serialize_mps(&candidate));
                    Ok(1)
                }
            }
        }
        Command::Sat { command } => match command {
            SatCommand::Build { cnf, out } => {
                let formula = read_formula(&cnf)?;
                let tree = build_instance_tree(&formula);
                let target = build_target(&formula);
                fs::create_dir_all(&out)
                    .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", out.display())))?;
                write_file(&out.join("T.mps"), &serialize_mps(&tree.tree))?;
                write_file(&out.join("H.mps"), &serialize_mps(&target.target))?;
                write_file(&out.join("book.txt"), &gadget_book(&formula, &tree, &target))?;
                println!("tree {}", tree.tree.domain_size());
                println!("target {}", target.target.domain_size());
                Ok(0)
            }
            SatCommand::Verify { cnf } => {
                let report = verify_reduction(&read_formula(&cnf)?)?;
                print!("{}", report.to_text());
                Ok(if report.all_ok() { 0 } else { 1 })
            }
        },
    }
}

fn print_single_witness(witness: &HomMap) {
    println!("homomorphism found");
    for v in 0..witness.source_size() {
        println!("{v} -> {}", witness.apply(v));
    }
}

fn witness_line(witness: &HomMap) -> String {
    let images: Vec<String> = witness.image().iter().map(|i| i.to_string()).collect();
    format!("witness {}", images.join(" "))
}

fn solve(args: &SolveArgs, jobs: usize) -> Result<u8, Failure> {
    let g = read_structure(&args.instance)?;
    let h = read_structure(&args.target)?;
    let deadline = Instant::now() + Duration::from_secs(args.timeout_secs);
    if args.brute_force {
        return solve_bruteforce(&g, &h, args, jobs, deadline);
    }
    let opts = SolveOpts {
        pins: Vec::new(),
        deadline: Some(deadline),
        node_cap: Some(args.max_maps),
    };
    if args.all {
        let mut count = 0u64;
        for_each_homomorphism(&g, &h, &opts, |w| {
            println!("{}", witness_line(w));
            count += 1;
            false
        })?;
        println!("count {count}");
        Ok(if count > 0 { 0 } else { 1 })
    } else {
        match find_homomorphism(&g, &h, &opts)? {
            Some(witness) => {
                print_single_witness(&witness);
                Ok(0)
            }
            None => {
                println!("no homomorphism");
                Ok(1)
            }
        }
    }
}

/// Reconstructs the map with brute-force index `index`: element `k`
/// takes digit `k` of the base-`m` expansion, most significant first.
fn map_at(index: u128, n: usize, m: usize) -> Vec<usize> {
    let mut image = vec![0usize; n];
    let mut rest = index;
    for k in (0..n).rev() {
        image[k] = (rest % m as u128) as usize;
        rest /= m as u128;
    }
    image
}

/// Scans `range` of map indices and returns the valid ones, stopping
/// after the first when `first_only`.
fn scan_maps(
    g: &LStructure,
    h: &LStructure,
    range: std::ops::Range<u128>,
    first_only: bool,
    deadline: Instant,
) -> Result<Vec<u128>, Error> {
    let n = g.domain_size();
    let m = h.domain_size();
    let mut found = Vec::new();
    for (step, index) in range.enumerate() {
        if step % 1024 == 0 && Instant::now() > deadline {
            return Err(Error::Timeout);
        }
        let map = HomMap::new(m, map_at(index, n, m))?;
        if is_homomorphism(g, h, &map)? {
            found.push(index);
            if first_only {
                break;
            }
        }
    }
    Ok(found)
}

fn solve_bruteforce(
    g: &LStructure,
    h: &LStructure,
    args: &SolveArgs,
    jobs: usize,
    deadline: Instant,
) -> Result<u8, Failure> {
    comparison_category(g.category(), h.category())?;
    let n = g.domain_size();
    let m = h.domain_size();
    let total: u128 = if n == 0 {
        1
    } else if m == 0 {
        0
    } else {
        (m as u128)
            .checked_pow(n as u32)
            .filter(|&t| t <= args.max_maps as u128)
            .ok_or(Error::CapExceeded {
                what: "brute-force map enumeration".to_string(),
                limit: args.max_maps,
            })?
    };
    let workers = jobs.min(total.max(1) as usize);
    let chunk = total.div_ceil(workers as u128).max(1);
    let mut results: Vec<Result<Vec<u128>, Error>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let (g, h) = (&g, &h);
                let lo = chunk * w as u128;
                let hi = total.min(lo + chunk);
                scope.spawn(move || scan_maps(g, h, lo..hi, !args.all, deadline))
            })
            .collect();
        for handle in handles {
            results.push(handle.join().expect("search worker panicked"));
        }
    });
    let mut valid = Vec::new();
    for result in results {
        valid.extend(result?);
    }
    valid.sort_unstable();
    if args.all {
        for &index in &valid {
            let map = HomMap::new(m, map_at(index, n, m))?;
            println!("{}", witness_line(&map));
        }
        println!("count {}", valid.len());
        Ok(if valid.is_empty() { 1 } else { 0 })
    } else {
        match valid.first() {
            Some(&index) => {
                print_single_witness(&HomMap::new(m, map_at(index, n, m))?);
                Ok(0)
            }
            None => {
                println!("no homomorphism");
                Ok(1)
            }
        }
    }
}

fn gadget_book(formula: &Cnf3, tree: &TreeGadget, target: &TargetGadget) -> String {
    fn list(elements: &[usize]) -> String {
        let parts: Vec<String> = elements.iter().map(|e| e.to_string()).collect();
        parts.join(" ")
    }
    let mut out = String::new();
    out.push_str(&format!(
        "formula vars={} clauses={}\n",
        formula.num_vars(),
        formula.clauses().len()
    ));
    out.push_str(&format!(
        "tree root={} size={}\n",
        tree.root,
        tree.tree.domain_size()
    ));
    out.push_str(&format!(
        "target root={} size={}\n",
        target.root,
        target.target.domain_size()
    ));
    for (c, clause) in formula.clauses().iter().enumerate() {
        out.push_str(&format!("clause {}\n", c + 1));
        let t_block = &tree.clauses[c];
        out.push_str(&format!("  tree clause-path {}\n", list(&t_block.clause_path)));
        out.push_str(&format!("  tree branch-head {}\n", t_block.branch_head));
        for (l, path) in t_block.literal_paths.iter().enumerate() {
            out.push_str(&format!(
                "  tree literal {} var={}: {}\n",
                l + 1,
                clause[l].var,
                list(path)
            ));
        }
        let h_block = &target.clauses[c];
        out.push_str(&format!(
            "  target clause-path {}\n",
            list(&h_block.clause_path)
        ));
        for branch in &h_block.branches {
            let tag: String = branch.assignment.iter().map(|b| b.to_string()).collect();
            out.push_str(&format!("  target branch {tag} head={}\n", branch.head));
            for (l, path) in branch.literal_paths.iter().enumerate() {
                out.push_str(&format!(
                    "  target branch {tag} literal {} var={} tag={} leaf={}: {}\n",
                    l + 1,
                    clause[l].var,
                    branch.assignment[l],
                    path.last().expect("path nonempty"),
                    list(path)
                ));
            }
        }
    }
    out
}
