//! `nwall`: number walls, the Thue-Morse substitution tiling, and exact
//! escape-of-mass computations from the command line.

mod verify;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use numberwall::escape;
use numberwall::pbm;
use numberwall::series::{cf_expand, thue_morse_prefix, LaurentPrefix};
use numberwall::tmtiles::{sigma_iter, Tile};
use numberwall::wall::{diagonal_align, generate_wall, wall_by_oracle};
use numberwall::{BitGrid, PrimeField};
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "nwall", version, about)]
struct Cli {
    /// Reject computations whose grids would exceed this many GiB.
    #[arg(long, global = true, default_value_t = 2.0)]
    max_mem_gib: f64,
    /// Worker threads for parallel sweeps (1 = fully sequential).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a Thue-Morse prefix.
    Tm {
        /// Number of sequence terms.
        #[arg(long, short = 'n')]
        length: usize,
        #[arg(long, value_enum, default_value_t = TextFormat::Text)]
        format: TextFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Continued-fraction expansion of a series prefix.
    Cf {
        #[command(flatten)]
        input: SeriesInput,
        #[arg(long, value_enum, default_value_t = TextFormat::Text)]
        format: TextFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate the axes-aligned number wall of a prefix.
    Wall {
        #[command(flatten)]
        input: SeriesInput,
        /// Deepest row to generate.
        #[arg(long)]
        rows: usize,
        /// Use the per-entry determinant oracle instead of the recurrence.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value_t = GridFormat::Pbm)]
        format: GridFormat,
        /// Emit binary P4 instead of ASCII P1.
        #[arg(long)]
        binary: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate the diagonally-aligned wall of a prefix.
    Dwall {
        #[command(flatten)]
        input: SeriesInput,
        /// Side of the rendered square (rows row0..row0+size-1, columns 1..size).
        #[arg(long)]
        size: usize,
        /// First rendered row of the wall.
        #[arg(long, default_value_t = 0)]
        row0: usize,
        /// Use the per-entry determinant oracle for the underlying wall.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value_t = GridFormat::Pbm)]
        format: GridFormat,
        #[arg(long)]
        binary: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Text dump of an iterated substitution tile matrix.
    Tiles {
        #[arg(long)]
        depth: usize,
        /// Starting tile (default +0).
        #[arg(long, default_value = "+0")]
        tile: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assemble the pixel coding of sigma^depth(+0).
    Code {
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value = "+0")]
        tile: String,
        #[arg(long, value_enum, default_value_t = GridFormat::Pbm)]
        format: GridFormat,
        #[arg(long)]
        binary: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render one of the supported targets as a PBM image.
    Render {
        #[arg(long, value_enum)]
        target: RenderTarget,
        /// Side for wall/dwall targets.
        #[arg(long)]
        size: Option<usize>,
        /// Depth for tiles/code targets.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        binary: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named verification suite; exits nonzero on any violation.
    Verify(verify::VerifyArgs),
    /// Exact escape-of-mass values.
    Escape {
        #[arg(long, value_enum)]
        what: EscapeWhat,
        #[arg(long)]
        l: Option<usize>,
        #[arg(long)]
        j: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        /// Largest level for trace sweeps.
        #[arg(long, default_value_t = 12)]
        lmax: usize,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the recurrence against the determinant oracle.
    Bench {
        /// Comma-separated prefix lengths.
        #[arg(long, value_delimiter = ',', default_values_t = [256usize, 512, 1024])]
        sizes: Vec<usize>,
        /// Wall rows are size divided by this (at least 12).
        #[arg(long, default_value_t = 32)]
        rows_divisor: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TextFormat {
    Text,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridFormat {
    Pbm,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum RenderTarget {
    Wall,
    Dwall,
    Tiles,
    Code,
}

#[derive(Clone, Copy, ValueEnum)]
enum EscapeWhat {
    /// Direct column escape E_{l,j}(d).
    Elj,
    /// The same through the two-scale recursion.
    Recursive,
    /// Limit of the shifted-series escape.
    Limit,
    /// Exact trace along the full-escape shift sequence.
    Trace,
    /// The shift sequence j_l itself.
    Jl,
}

/// Where the input sequence comes from.
#[derive(Args)]
struct SeriesInput {
    /// Take the first `tm` terms of the Thue-Morse sequence over F_2.
    #[arg(long)]
    tm: Option<usize>,
    /// Prime modulus for an explicit coefficient list.
    #[arg(long)]
    prime: Option<u32>,
    /// Comma-separated coefficients b_1, b_2, ...
    #[arg(long, value_delimiter = ',')]
    coeffs: Option<Vec<u32>>,
}

impl SeriesInput {
    fn prefix(&self) -> Result<LaurentPrefix> {
        match (self.tm, &self.coeffs) {
            (Some(n), None) => {
                if n == 0 {
                    bail!("--tm must be positive");
                }
                Ok(thue_morse_prefix(n))
            }
            (None, Some(coeffs)) => {
                let p = self.prime.context("--coeffs requires --prime")?;
                let field = PrimeField::new(p)?;
                Ok(LaurentPrefix::new(field, coeffs.clone()))
            }
            _ => bail!("give exactly one of --tm or --coeffs"),
        }
    }
}

struct MemBudget {
    bytes: u128,
}

impl MemBudget {
    fn new(gib: f64) -> Self {
        MemBudget {
            bytes: (gib * (1u64 << 30) as f64) as u128,
        }
    }

    fn check(&self, need: u128, what: &str) -> Result<()> {
        if need > self.bytes {
            bail!(
                "{what} needs about {need} bytes, over the {} byte budget; raise --max-mem-gib",
                self.bytes
            );
        }
        Ok(())
    }
}

fn write_output(out: Option<&PathBuf>, data: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, data).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().write_all(data)?,
    }
    Ok(())
}

fn parse_tile(name: &str) -> Result<Tile> {
    Tile::from_name(name).with_context(|| format!("unknown tile '{name}'"))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.max(1))
        .build_global()
        .ok();
    let budget = MemBudget::new(cli.max_mem_gib);
    match cli.command {
        Command::Tm { length, format, out } => cmd_tm(length, format, out.as_ref()),
        Command::Cf { input, format, out } => cmd_cf(&input, format, out.as_ref()),
        Command::Wall {
            input,
            rows,
            oracle,
            format,
            binary,
            out,
        } => cmd_wall(&budget, &input, rows, oracle, format, binary, out.as_ref()),
        Command::Dwall {
            input,
            size,
            row0,
            oracle,
            format,
            binary,
            out,
        } => cmd_dwall(&budget, &input, size, row0, oracle, format, binary, out.as_ref()),
        Command::Tiles { depth, tile, out } => cmd_tiles(&budget, depth, &tile, out.as_ref()),
        Command::Code {
            depth,
            tile,
            format,
            binary,
            out,
        } => cmd_code(&budget, depth, &tile, format, binary, out.as_ref()),
        Command::Render {
            target,
            size,
            depth,
            binary,
            out,
        } => cmd_render(&budget, target, size, depth, binary, out.as_ref()),
        Command::Verify(args) => {
            let report = verify::run(&args)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            if report.pass {
                Ok(())
            } else {
                std::process::exit(1);
            }
        }
        Command::Escape {
            what,
            l,
            j,
            d,
            lmax,
            format,
            out,
        } => cmd_escape(what, l, j, d, lmax, format, out.as_ref()),
        Command::Bench {
            sizes,
            rows_divisor,
        } => cmd_bench(&sizes, rows_divisor),
    }
}

fn cmd_tm(length: usize, format: TextFormat, out: Option<&PathBuf>) -> Result<()> {
    if length == 0 {
        bail!("--length must be positive");
    }
    let tm = thue_morse_prefix(length);
    let text = match format {
        TextFormat::Text => {
            let mut s: String = tm.coeffs().iter().map(|&b| if b == 0 { '0' } else { '1' }).collect();
            s.push('\n');
            s
        }
        TextFormat::Csv => {
            let mut s = String::from("index,bit\n");
            for (i, &b) in tm.coeffs().iter().enumerate() {
                s.push_str(&format!("{},{}\n", i + 1, b));
            }
            s
        }
    };
    write_output(out, text.as_bytes())
}

fn cmd_cf(input: &SeriesInput, format: TextFormat, out: Option<&PathBuf>) -> Result<()> {
    let theta = input.prefix()?;
    let cf = cf_expand(&theta);
    let text = match format {
        TextFormat::Text => {
            let mut s = format!("certified quotients: {}\n", cf.valid_count);
            for k in 0..cf.valid_count {
                s.push_str(&format!(
                    "a_{} = {}   (degree {}, i_{} = {})\n",
                    k + 1,
                    cf.quotients[k],
                    cf.degrees[k],
                    k + 1,
                    cf.convergent_degrees[k],
                ));
            }
            s
        }
        TextFormat::Csv => {
            let mut s = String::from("k,degree,convergent_degree\n");
            for k in 0..cf.valid_count {
                s.push_str(&format!(
                    "{},{},{}\n",
                    k + 1,
                    cf.degrees[k],
                    cf.convergent_degrees[k]
                ));
            }
            s
        }
    };
    write_output(out, text.as_bytes())
}

fn cmd_wall(
    budget: &MemBudget,
    input: &SeriesInput,
    rows: usize,
    oracle: bool,
    format: GridFormat,
    binary: bool,
    out: Option<&PathBuf>,
) -> Result<()> {
    let theta = input.prefix()?;
    let n = theta.precision() as u128;
    let per_cell = if theta.field().modulus() == 2 { 1 } else { 32 };
    budget.check((rows as u128 + 3) * (n + 1) * per_cell / 8, "wall")?;
    let wall = if oracle {
        wall_by_oracle(&theta, rows)?
    } else {
        generate_wall(&theta, rows)?
    };
    match format {
        GridFormat::Csv => write_output(out, wall.to_csv().as_bytes()),
        GridFormat::Pbm => {
            let grid = wall.to_bitgrid_nonzero();
            let bytes = if binary {
                pbm::encode_p4(&grid)
            } else {
                pbm::encode_p1(&grid)
            };
            write_output(out, &bytes)
        }
    }
}

fn dwall_grid(
    budget: &MemBudget,
    input: &SeriesInput,
    size: usize,
    row0: usize,
    oracle: bool,
) -> Result<BitGrid> {
    if size < 2 {
        bail!("--size must be at least 2");
    }
    let theta = input.prefix()?;
    budget.check((size as u128) * (size as u128) / 4, "diagonal wall")?;
    let last_row = row0 + size - 1;
    // Wall rows up to ceil((last_row - 3) / 2) certify rows 0..=last_row.
    let rows = last_row.saturating_sub(3).div_ceil(2);
    if theta.precision() + 1 < last_row {
        bail!(
            "prefix of {} terms certifies wall rows up to {} only",
            theta.precision(),
            theta.precision() + 1
        );
    }
    let wall = if oracle {
        wall_by_oracle(&theta, rows)?
    } else {
        generate_wall(&theta, rows)?
    };
    let dwall = diagonal_align(&wall);
    Ok(dwall.to_bitgrid(row0, 1, size, size))
}

#[allow(clippy::too_many_arguments)]
fn cmd_dwall(
    budget: &MemBudget,
    input: &SeriesInput,
    size: usize,
    row0: usize,
    oracle: bool,
    format: GridFormat,
    binary: bool,
    out: Option<&PathBuf>,
) -> Result<()> {
    match format {
        GridFormat::Csv => {
            let theta = input.prefix()?;
            let rows = (row0 + size - 1).saturating_sub(3).div_ceil(2);
            let wall = generate_wall(&theta, rows)?;
            let dwall = diagonal_align(&wall);
            write_output(out, dwall.to_csv().as_bytes())
        }
        GridFormat::Pbm => {
            let grid = dwall_grid(budget, input, size, row0, oracle)?;
            let bytes = if binary {
                pbm::encode_p4(&grid)
            } else {
                pbm::encode_p1(&grid)
            };
            write_output(out, &bytes)
        }
    }
}

fn cmd_tiles(budget: &MemBudget, depth: usize, tile: &str, out: Option<&PathBuf>) -> Result<()> {
    budget.check(1u128 << (2 * depth), "tile matrix")?;
    let mat = sigma_iter(parse_tile(tile)?, depth)?;
    write_output(out, mat.dump().as_bytes())
}

fn code_grid(budget: &MemBudget, depth: usize, tile: &str) -> Result<BitGrid> {
    let side = (1u128 << depth) * 4 + 1;
    budget.check(side * side / 8 + (1u128 << (2 * depth)), "coded tiling")?;
    let mat = sigma_iter(parse_tile(tile)?, depth)?;
    Ok(numberwall::coding::assemble(&mat)?)
}

fn cmd_code(
    budget: &MemBudget,
    depth: usize,
    tile: &str,
    format: GridFormat,
    binary: bool,
    out: Option<&PathBuf>,
) -> Result<()> {
    let grid = code_grid(budget, depth, tile)?;
    match format {
        GridFormat::Csv => {
            let mut s = String::from("row,col,value\n");
            for r in 0..grid.rows() {
                for c in 0..grid.cols() {
                    s.push_str(&format!("{},{},{}\n", r + 1, c + 1, grid.get(r, c) as u8));
                }
            }
            write_output(out, s.as_bytes())
        }
        GridFormat::Pbm => {
            let bytes = if binary {
                pbm::encode_p4(&grid)
            } else {
                pbm::encode_p1(&grid)
            };
            write_output(out, &bytes)
        }
    }
}

fn cmd_render(
    budget: &MemBudget,
    target: RenderTarget,
    size: Option<usize>,
    depth: Option<usize>,
    binary: bool,
    out: Option<&PathBuf>,
) -> Result<()> {
    match target {
        RenderTarget::Wall => {
            let size = size.context("--size required for wall")?;
            let input = SeriesInput {
                tm: Some(size),
                prime: None,
                coeffs: None,
            };
            cmd_wall(
                budget,
                &input,
                (size - 1) / 2,
                false,
                GridFormat::Pbm,
                binary,
                out,
            )
        }
        RenderTarget::Dwall => {
            let size = size.context("--size required for dwall")?;
            let input = SeriesInput {
                tm: Some(size.max(2) - 1),
                prime: None,
                coeffs: None,
            };
            cmd_dwall(budget, &input, size, 0, false, GridFormat::Pbm, binary, out)
        }
        RenderTarget::Tiles => {
            let depth = depth.context("--depth required for tiles")?;
            cmd_tiles(budget, depth, "+0", out)
        }
        RenderTarget::Code => {
            let depth = depth.context("--depth required for code")?;
            cmd_code(budget, depth, "+0", GridFormat::Pbm, binary, out)
        }
    }
}

fn cmd_escape(
    what: EscapeWhat,
    l: Option<usize>,
    j: Option<usize>,
    d: Option<usize>,
    lmax: usize,
    format: TableFormat,
    out: Option<&PathBuf>,
) -> Result<()> {
    // Rows of (l, j, d, value) tuples; j and the value are unused for jl.
    let mut rows: Vec<(u64, u64, u64, escape::Rational)> = Vec::new();
    match what {
        EscapeWhat::Elj => {
            let (l, j, d) = (
                l.context("--l required")?,
                j.context("--j required")?,
                d.context("--d required")?,
            );
            rows.push((l as u64, j as u64, d as u64, escape::e_lj(l, j, d)?));
        }
        EscapeWhat::Recursive => {
            let (l, j, d) = (
                l.context("--l required")?,
                j.context("--j required")?,
                d.context("--d required")?,
            );
            rows.push((l as u64, j as u64, d as u64, escape::e_lj_recursive(l, j, d)?));
        }
        EscapeWhat::Limit => {
            let (j, d) = (j.context("--j required")?, d.context("--d required")?);
            let level = escape::level_for_shift(j);
            rows.push((level as u64, j as u64, d as u64, escape::shift_limit(j, d)));
        }
        EscapeWhat::Trace => {
            let d = d.unwrap_or(5);
            for (level, v) in escape::full_escape_trace(d, lmax).into_iter().enumerate() {
                rows.push((level as u64, escape::j_l(level), d as u64, v));
            }
        }
        EscapeWhat::Jl => {
            for level in 0..=lmax {
                rows.push((
                    level as u64,
                    escape::j_l(level),
                    0,
                    escape::ratio(escape::j_l(level) as i64, 1),
                ));
            }
        }
    }
    let text = match format {
        TableFormat::Csv => {
            let mut s = String::from("l,j,d,value_num,value_den\n");
            for (l, j, d, v) in &rows {
                s.push_str(&format!("{},{},{},{},{}\n", l, j, d, v.numer(), v.denom()));
            }
            s
        }
        TableFormat::Json => {
            let objs: Vec<serde_json::Value> = rows
                .iter()
                .map(|(l, j, d, v)| {
                    serde_json::json!({
                        "l": l,
                        "j": j,
                        "d": d,
                        "value_num": v.numer().to_string(),
                        "value_den": v.denom().to_string(),
                    })
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&objs)?)
        }
    };
    write_output(out, text.as_bytes())
}

fn cmd_bench(sizes: &[usize], rows_divisor: usize) -> Result<()> {
    println!("size,rows,recurrence_ms,oracle_ms,ratio");
    for &size in sizes.iter().filter(|&&s| s >= 32) {
        let theta = thue_morse_prefix(size);
        let rows = (size / rows_divisor.max(1)).max(12).min((size - 1) / 2);
        let t0 = Instant::now();
        let fast = generate_wall(&theta, rows)?;
        let fast_ms = t0.elapsed().as_secs_f64() * 1e3;
        let t1 = Instant::now();
        let slow = wall_by_oracle(&theta, rows)?;
        let slow_ms = t1.elapsed().as_secs_f64() * 1e3;
        if !fast.same_entries(&slow) {
            bail!("recurrence and oracle walls differ at size {size}");
        }
        println!(
            "{},{},{:.3},{:.3},{:.1}",
            size,
            rows,
            fast_ms,
            slow_ms,
            slow_ms / fast_ms.max(1e-9)
        );
    }
    Ok(())
}
