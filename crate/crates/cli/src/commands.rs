use std::time::{SystemTime, UNIX_EPOCH};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use otterlab_core::approx::{remainder_increment_constant, validate_eh, validate_ud, ApproxReport};
use otterlab_core::constants::{lambda, lambda_f64, rho, rho_f64, terms_for_precision};
use otterlab_core::deviations::rate_point;
use otterlab_core::limit_laws::{
    diam_density, diam_limit_moment, diam_tail, height_limit_moment, theta_density, theta_tail,
};
use otterlab_core::numeric::rational_to_f64;
use otterlab_core::trees::{height_ladder, height_pmf, rooted_series, unrooted_series};
use otterlab_core::{DiameterTable, Error, ExactPmf, HeightLadder};

use crate::cache::{default_dir, Cache, CacheEntry, CacheKey, TableKind};
use crate::output::{Cell, Table};
use crate::{Cli, Command, DistArgs, Family, ValidateCmd};

/// Default size limit for exact tables.
pub const MAX_EXACT_N: usize = 500;
/// Limit for the cheap single-series families.
pub const MAX_SERIES_N: usize = 20_000;
/// Largest `--digits` accepted by `constants`.
pub const MAX_DIGITS: usize = 300;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Refused(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Refused(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Usage(m) => CliError::Usage(m),
            Error::Invariant(m) => CliError::Invariant(m),
            e @ Error::PrecisionUnreachable { .. } => CliError::Refused(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

struct Context {
    cache: Option<Cache>,
}

impl Context {
    fn ladder(&self, n_max: usize, h_max: usize) -> Result<HeightLadder> {
        let key = CacheKey::new(TableKind::HeightLadder, n_max, h_max);
        if let Some(entry) = self.load(&key) {
            match entry.into_ladder() {
                Ok(l) => return Ok(l),
                Err(e) => eprintln!("warning: ignoring cached ladder: {e}"),
            }
        }
        let ladder = height_ladder(n_max, h_max)?;
        self.store(&CacheEntry::from_ladder(&ladder));
        Ok(ladder)
    }

    fn diameter_table(&self, n_max: usize) -> Result<DiameterTable> {
        let h_max = n_max / 2;
        let key = CacheKey::new(TableKind::DiameterTable, n_max, h_max);
        if let Some(entry) = self.load(&key) {
            match entry.into_diameter_table() {
                Ok(t) => return Ok(t),
                Err(e) => eprintln!("warning: ignoring cached diameter table: {e}"),
            }
        }
        let table = DiameterTable::new(&self.ladder(n_max, h_max)?)?;
        self.store(&CacheEntry::from_diameter_table(&table, h_max));
        Ok(table)
    }

    fn load(&self, key: &CacheKey) -> Option<CacheEntry> {
        let cache = self.cache.as_ref()?;
        match cache.load(key) {
            Ok(entry) => entry,
            Err(e) => {
                eprintln!("warning: ignoring cache file {}: {e}", cache.path_for(key).display());
                None
            }
        }
    }

    fn store(&self, entry: &CacheEntry) {
        if let Some(cache) = &self.cache {
            if let Err(e) = cache.store(entry) {
                eprintln!("warning: could not write cache in {}: {e}", cache.dir().display());
            }
        }
    }
}

/// Rough wall-clock estimate for exact tables of size `n`: the ladder needs
/// about `n^3/6` products of `n`-bit integers.
fn refusal(n: usize, limit: usize) -> CliError {
    let products = (n as f64).powi(3) / 6.0;
    let seconds = 2.0 * (n as f64 / 500.0).powi(4);
    CliError::Refused(format!(
        "n = {n} exceeds the exact-table limit of {limit}; it needs about {products:.1e} big-integer \
         products (roughly {seconds:.0} s and growing like n^4); pass --allow-large to proceed"
    ))
}

fn check_size(n: usize, limit: usize, allow: bool) -> Result<()> {
    if n > limit && !allow {
        Err(refusal(n, limit))
    } else {
        Ok(())
    }
}

/// Runs one command and renders its output.
pub fn run(cli: &Cli) -> Result<String> {
    let ctx = Context { cache: if cli.no_cache { None } else { default_dir().map(Cache::new) } };
    let table = match &cli.command {
        Command::Seq { family, n_max, allow_large } => seq(&ctx, *family, *n_max, *allow_large)?,
        Command::HeightDist(args) => height_dist(&ctx, args)?,
        Command::DiameterDist(args) => diameter_dist(&ctx, args)?,
        Command::Constants { digits } => constants(*digits)?,
        Command::RateFunction { x_grid } => rate_function(x_grid)?,
        Command::Validate { which } => match which {
            ValidateCmd::Eh { grid } => validate_eh_cmd(grid)?,
            ValidateCmd::Ud { grid, n_max, allow_large } => validate_ud_cmd(&ctx, grid, *n_max, *allow_large)?,
        },
    };
    let timestamp = cli
        .timestamp
        .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
    Ok(table.render(cli.format, timestamp))
}

fn seq(ctx: &Context, family: Family, n_max: usize, allow: bool) -> Result<Table> {
    if n_max < 1 {
        return Err(CliError::Usage("--n-max must be at least 1".into()));
    }
    let values: Vec<BigInt> = match family {
        Family::Rooted => {
            check_size(n_max, MAX_SERIES_N, allow)?;
            rooted_series(n_max)?.coeffs()[1..].to_vec()
        }
        Family::Unrooted => {
            check_size(n_max, MAX_SERIES_N, allow)?;
            unrooted_series(n_max)?.coeffs()[1..].to_vec()
        }
        Family::OddDiameter | Family::EvenDiameter => {
            check_size(n_max, MAX_EXACT_N, allow)?;
            if n_max < 2 {
                vec![BigInt::zero()]
            } else {
                let (odd, even) = ctx.diameter_table(n_max)?.parity_split();
                let s = if family == Family::OddDiameter { odd } else { even };
                s.coeffs()[1..].to_vec()
            }
        }
    };
    let mut t = Table::new(&["value"]);
    t.bare = true;
    for v in values {
        t.push(vec![Cell::Int(v)]);
    }
    Ok(t)
}

#[derive(Clone, Copy)]
enum Law {
    Height,
    Diameter,
}

impl Law {
    fn density(self, x: f64) -> Result<f64> {
        Ok(match self {
            Law::Height => theta_density(x)?,
            Law::Diameter => diam_density(x)?,
        })
    }

    fn tail(self, x: f64) -> Result<f64> {
        Ok(match self {
            Law::Height => theta_tail(x)?,
            Law::Diameter => diam_tail(x)?,
        })
    }

    fn moment(self, r: u32) -> Result<f64> {
        Ok(match self {
            Law::Height => height_limit_moment(r)?,
            Law::Diameter => diam_limit_moment(r)?,
        })
    }
}

fn height_dist(ctx: &Context, args: &DistArgs) -> Result<Table> {
    if args.n < 1 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    check_size(args.n, MAX_EXACT_N, args.allow_large)?;
    let pmf = if args.n == 1 {
        // a single leaf has height 0
        ExactPmf::from_counts(1, &[(0, BigInt::from(1))], &BigInt::from(1))?
    } else {
        height_pmf(&ctx.ladder(args.n, args.n)?, args.n)?
    };
    dist_table(&pmf, args, Law::Height, "h")
}

fn diameter_dist(ctx: &Context, args: &DistArgs) -> Result<Table> {
    if args.n < 2 {
        return Err(CliError::Usage("--n must be at least 2".into()));
    }
    check_size(args.n, MAX_EXACT_N, args.allow_large)?;
    let pmf = ctx.diameter_table(args.n)?.pmf(args.n)?;
    dist_table(&pmf, args, Law::Diameter, "d")
}

fn dist_table(pmf: &ExactPmf, args: &DistArgs, law: Law, var: &str) -> Result<Table> {
    let n = pmf.size_n() as f64;
    let scale = lambda_f64() / n.sqrt();
    if let Some(r) = args.moment {
        if r == 0 {
            return Err(CliError::Usage("--moment must be at least 1".into()));
        }
        let exact = pmf.moment(r);
        let exact_f = rational_to_f64(&exact);
        let asymptote = law.moment(r)? / scale.powi(r as i32);
        let mut t = Table::new(&["r", "exact", "exact_float", "asymptote", "ratio"]);
        t.push(vec![
            Cell::Count(r as usize),
            Cell::Exact(exact),
            Cell::Float(exact_f),
            Cell::Float(asymptote),
            Cell::Float(exact_f / asymptote),
        ]);
        return Ok(t);
    }
    let mut cols = vec![var, "mass", "cumulative"];
    if args.compare_limit {
        cols.extend(["x", "limit_mass", "tail", "limit_tail"]);
    }
    let mut t = Table::new(&cols);
    let mut cum = BigRational::zero();
    let total = BigRational::from_integer(1.into());
    for (k, mass) in pmf.iter() {
        let tail = &total - &cum;
        cum += mass;
        let mut row = vec![Cell::Count(k), Cell::Exact(mass.clone()), Cell::Exact(cum.clone())];
        if args.compare_limit {
            let x = scale * k as f64;
            let (dens, lim_tail) = if x > 0.0 { (law.density(x)?, law.tail(x)?) } else { (0.0, 1.0) };
            row.extend([
                Cell::Float(x),
                Cell::Float(scale * dens),
                Cell::Float(rational_to_f64(&tail)),
                Cell::Float(lim_tail),
            ]);
        }
        t.push(row);
    }
    Ok(t)
}

fn constants(digits: usize) -> Result<Table> {
    if digits == 0 || digits > MAX_DIGITS {
        return Err(CliError::Usage(format!("--digits must be in 1..={MAX_DIGITS}")));
    }
    // Three guard digits keep the rounding of the last printed digit honest.
    let precision = 10f64.powi(-(digits as i32) - 3).max(f64::MIN_POSITIVE);
    let n_terms = terms_for_precision(precision);
    let mut t = Table::new(&["name", "value", "abs_error"]);
    for (name, c) in [("rho", rho(n_terms, precision)?), ("lambda", lambda(n_terms, precision)?)] {
        t.push(vec![Cell::Text(name.into()), Cell::Text(c.to_decimal(digits)), Cell::Float(c.abs_error())]);
    }
    Ok(t)
}

/// Parses `a:b:step` into `a, a + step, ...` up to `b`.
pub fn parse_x_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::Usage(format!("x grid must look like a:b:step, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
    let (a, b, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || b < a || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    let count = ((b - a) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(CliError::Usage("x grid has more than 100000 points".into()));
    }
    // Index-based so that 0.1:0.9:0.1 yields exactly nine points; rounding
    // to 12 significant digits strips the accumulated representation noise.
    Ok((0..count).map(|i| round_sig(a + i as f64 * step, 12)).collect())
}

fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    format!("{x:.*e}", digits - 1).parse().unwrap_or(x)
}

fn rate_function(grid: &str) -> Result<Table> {
    let mut t = Table::new(&["x", "xi", "rate"]);
    for x in parse_x_grid(grid)? {
        let p = rate_point(x)?;
        t.push(vec![Cell::Float(p.x), Cell::Float(p.xi), Cell::Float(p.rate)]);
    }
    Ok(t)
}

/// Parses `z:i,j,k;z:...` where `z` is a number or `rho`.
pub fn parse_point_grid(spec: &str) -> Result<Vec<(f64, usize)>> {
    let bad = |m: &str| CliError::Usage(format!("grid {spec:?}: {m}; expected e.g. \"rho:50,100\""));
    let mut out = Vec::new();
    for group in spec.split(';').filter(|g| !g.trim().is_empty()) {
        let (z, idx) = group.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let z = match z.trim() {
            "rho" => rho_f64(),
            other => other.parse::<f64>().map_err(|_| bad("bad z value"))?,
        };
        for i in idx.split(',') {
            out.push((z, i.trim().parse::<usize>().map_err(|_| bad("bad index"))?));
        }
    }
    if out.is_empty() {
        return Err(bad("no points"));
    }
    Ok(out)
}

fn report_table(rep: &ApproxReport, index: &str) -> Table {
    let with_r = !rep.remainder.is_empty();
    let mut cols = vec!["z", index, "exact", "approx", "rel_err"];
    if with_r {
        cols.extend(["remainder", "flagged"]);
    }
    let mut t = Table::new(&cols);
    for (i, &(z, k)) in rep.grid.iter().enumerate() {
        let mut row = vec![
            Cell::Float(z),
            Cell::Count(k),
            Cell::Float(rep.exact[i]),
            Cell::Float(rep.approx[i]),
            Cell::Float(rep.rel_err[i]),
        ];
        if with_r {
            row.push(Cell::Float(rep.remainder[i]));
            row.push(Cell::Text(rep.flagged.contains(&i).to_string()));
        }
        t.push(row);
    }
    if let Some(c) = rep.fitted_c {
        t.notes.push(("fitted_c".into(), Cell::Float(c)));
    }
    t
}

fn validate_eh_cmd(grid: &str) -> Result<Table> {
    let points = parse_point_grid(grid)?;
    if points.iter().any(|&(_, h)| h == 0) {
        return Err(CliError::Usage("heights in the grid must be >= 1".into()));
    }
    let rep = validate_eh(&points)?;
    let mut t = report_table(&rep, "h");
    let rho = rho_f64();
    if points.iter().any(|&(z, _)| z == rho) {
        let c = remainder_increment_constant(rho, 10..=200)?;
        t.notes.push(("increment_c".into(), Cell::Float(c)));
    }
    Ok(t)
}

fn validate_ud_cmd(ctx: &Context, grid: &str, n_max: usize, allow: bool) -> Result<Table> {
    check_size(n_max, MAX_EXACT_N, allow)?;
    let points = parse_point_grid(grid)?;
    if let Some(&(_, d)) = points.iter().find(|&&(_, d)| d == 0 || d >= n_max) {
        return Err(CliError::Usage(format!("diameter {d} outside 1..{n_max}")));
    }
    let table = ctx.diameter_table(n_max)?;
    Ok(report_table(&validate_ud(&points, &table)?, "d"))
}
