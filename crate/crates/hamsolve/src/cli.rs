//! Batch front-end: parse a problem/method configuration, run the solves,
//! emit iterate expressions and CSV tables.
//!
//! Config format (UTF-8, line oriented, `#` comments):
//!
//! ```text
//! [problem]
//! p = 2
//! a = 0
//! b = 1
//! alphas = 1, 1
//! lambda2 = 1
//! kernel2 = t | t              # separable parts "g | h", ';'-separated
//! F2 = 1*u^1                   # monomials "coeff*u^deg", ','-separated
//! split = exp(t) ; -t          # term lists x0 ; x1 ; ...
//!
//! [method.nd]
//! variant = NDHAM              # HAM | MHAM | mHAM | QHAM | NDHAM
//! hbar = -1
//! iterations = 5
//!
//! [output]
//! expressions = true
//! exact = exp(t)
//! grid = 0, 0.25, 0.5, 0.75, 1
//! csv = out.csv
//! residual_grid = 101
//! ```
//!
//! Term lists are comma-separated products `coeff [*t^k] [*exp(r*t)]` with
//! exact rational coefficients (`1/3`, `-2`, `0.25`) and integer rates.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_traits::{ToPrimitive, Zero};

use crate::algebra::{rational_to_f64, ExpPoly, Rational};
use crate::diagnostics::TableError;
use crate::error::SolverError;
use crate::homotopy::{run, DivergenceNote, MethodConfig, SeriesSolution, Variant};
use crate::problem::{PowerNonlinearity, SeparableKernel, VFIDEProblem};

/// Output switches of a run specification.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    /// Print the iterate/partial-sum expression listing.
    pub expressions: bool,
    /// Known exact solution; enables the defect line and the CSV reference
    /// column.
    pub exact: Option<ExpPoly>,
    /// Evaluation grid for the CSV table.
    pub grid: Vec<f64>,
    /// CSV destination path, relative to the working directory.
    pub csv_path: Option<String>,
    /// Grid size for the residual max-norm line; absent disables it.
    pub residual_grid_size: Option<usize>,
}

/// A parsed and validated batch run: one problem, one or more methods,
/// output switches.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub problem: VFIDEProblem,
    pub methods: Vec<MethodConfig>,
    pub output: OutputSpec,
}

/// Parse failure with its 1-based config line.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl ConfigError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        ConfigError { line, message: message.into() }
    }
}

/// Everything that can go wrong while executing a spec. Exit codes:
/// 2 for configuration errors, 3 for solver errors, 1 for I/O.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("solver: {0}")]
    Solver(#[from] SolverError),
    #[error("table: {0}")]
    Table(#[from] TableError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    /// At least one run tripped the divergence guard.
    #[error("diverging iterate in method '{label}' (iterate {}, magnitude {:.3e})",
        note.iterate, note.magnitude)]
    Diverging { label: String, note: DivergenceNote },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) | CliError::Table(_) | CliError::Diverging { .. } => 3,
            CliError::Io(_) => 1,
        }
    }
}

// ---------------------------------------------------------------------------
// parsing

struct Section {
    name: String,
    header_line: usize,
    entries: Vec<(usize, String, String)>, // line, key, value
}

fn split_sections(text: &str) -> Result<Vec<Section>, ConfigError> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            sections.push(Section {
                name: name.trim().to_string(),
                header_line: line_no,
                entries: Vec::new(),
            });
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::new(line_no, format!("expected 'key = value', got '{line}'")));
        };
        let Some(section) = sections.last_mut() else {
            return Err(ConfigError::new(line_no, "entry before any section header"));
        };
        section
            .entries
            .push((line_no, key.trim().to_string(), value.trim().to_string()));
    }
    Ok(sections)
}

/// Exact rational from `1/3`, `-2`, `0.25` style literals.
pub fn parse_rational(s: &str, line: usize) -> Result<Rational, ConfigError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ConfigError::new(line, "empty number"));
    }
    let bad = |_| ConfigError::new(line, format!("invalid number '{s}'"));
    if let Some((num, den)) = s.split_once('/') {
        let n = num_bigint::BigInt::from_str(num.trim()).map_err(bad)?;
        let d = num_bigint::BigInt::from_str(den.trim()).map_err(bad)?;
        if d.is_zero() {
            return Err(ConfigError::new(line, format!("zero denominator in '{s}'")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let int_digits = if int_part.is_empty() || int_part == "-" { "0" } else { int_part };
        let i = num_bigint::BigInt::from_str(int_digits).map_err(bad)?;
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ConfigError::new(line, format!("invalid number '{s}'")));
        }
        let f = num_bigint::BigInt::from_str(frac_part).map_err(bad)?;
        let scale = num_bigint::BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac = Rational::new(f, scale);
        let int = Rational::from_integer(i);
        return Ok(if negative { int - frac } else { int + frac });
    }
    let n = num_bigint::BigInt::from_str(s).map_err(bad)?;
    Ok(Rational::from_integer(n))
}

// splits on a separator at parenthesis depth zero
fn split_top_level(s: &str, sep: char) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ => {}
        }
        if c == sep && depth == 0 {
            parts.push(current.trim().to_string());
            current = String::new();
        } else {
            current.push(c);
        }
    }
    parts.push(current.trim().to_string());
    parts
}

fn parse_exp_factor(arg: &str, line: usize) -> Result<i64, ConfigError> {
    // accepted argument forms: t, -t, r*t with integer r
    let arg = arg.trim();
    let rate_str = match arg.strip_suffix('t') {
        Some(prefix) => {
            let prefix = prefix.trim().trim_end_matches('*').trim();
            match prefix {
                "" => "1".to_string(),
                "-" => "-1".to_string(),
                other => other.to_string(),
            }
        }
        None => {
            return Err(ConfigError::new(line, format!("invalid exponential argument '{arg}'")));
        }
    };
    let rate = parse_rational(&rate_str, line)?;
    if !rate.is_integer() {
        return Err(ConfigError::new(
            line,
            format!("exponential rate must be an integer, got '{rate_str}'"),
        ));
    }
    rate.to_integer()
        .to_i64()
        .ok_or_else(|| ConfigError::new(line, format!("exponential rate '{rate_str}' too large")))
}

fn parse_term(term: &str, line: usize) -> Result<(Rational, u32, i64), ConfigError> {
    let term = term.trim();
    if term.is_empty() {
        return Err(ConfigError::new(line, "empty term"));
    }
    let (sign, body) = match term.strip_prefix('-') {
        Some(rest) => (-Rational::from_integer(1.into()), rest.trim()),
        None => (
            Rational::from_integer(1.into()),
            term.strip_prefix('+').unwrap_or(term).trim(),
        ),
    };
    let mut coeff = sign;
    let mut power = 0u32;
    let mut rate = 0i64;
    let mut saw_factor = false;
    for factor in split_top_level(body, '*') {
        let factor = factor.trim();
        if factor.is_empty() {
            return Err(ConfigError::new(line, format!("empty factor in term '{term}'")));
        }
        if let Some(arg) = factor.strip_prefix("exp(").and_then(|s| s.strip_suffix(')')) {
            rate += parse_exp_factor(arg, line)?;
        } else if factor == "t" {
            power += 1;
        } else if let Some(exp) = factor.strip_prefix("t^") {
            let k: u32 = exp.trim().parse().map_err(|_| {
                ConfigError::new(line, format!("invalid power '{exp}' in term '{term}'"))
            })?;
            power += k;
        } else {
            coeff *= parse_rational(factor, line)?;
        }
        saw_factor = true;
    }
    if !saw_factor {
        return Err(ConfigError::new(line, format!("empty term '{term}'")));
    }
    Ok((coeff, power, rate))
}

/// Parses a comma-separated term list into an exp-polynomial.
pub fn parse_term_list(s: &str, line: usize) -> Result<ExpPoly, ConfigError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(ExpPoly::zero());
    }
    let mut terms = Vec::new();
    for part in split_top_level(s, ',') {
        terms.push(parse_term(&part, line)?);
    }
    Ok(ExpPoly::from_terms(terms))
}

fn parse_kernel(s: &str, line: usize) -> Result<SeparableKernel, ConfigError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(SeparableKernel::zero());
    }
    let mut parts = Vec::new();
    for part in split_top_level(s, ';') {
        let Some((g, h)) = part.split_once('|') else {
            return Err(ConfigError::new(
                line,
                format!("kernel part '{part}' must be 'gterms | hterms'"),
            ));
        };
        parts.push((parse_term_list(g, line)?, parse_term_list(h, line)?));
    }
    Ok(SeparableKernel { parts })
}

fn parse_nonlinearity(s: &str, line: usize) -> Result<PowerNonlinearity, ConfigError> {
    let mut monomials = Vec::new();
    for part in split_top_level(s, ',') {
        let part = part.trim();
        // forms: coeff*u^deg, coeff*u, u^deg, u
        let (coeff_str, u_part) = match part.rsplit_once('*') {
            Some((c, u)) if u.trim().starts_with('u') => (c.trim().to_string(), u.trim().to_string()),
            _ => ("1".to_string(), part.to_string()),
        };
        let degree: u32 = if u_part == "u" {
            1
        } else if let Some(d) = u_part.strip_prefix("u^") {
            d.trim().parse().map_err(|_| {
                ConfigError::new(line, format!("invalid degree in '{part}'"))
            })?
        } else {
            return Err(ConfigError::new(
                line,
                format!("nonlinearity monomial '{part}' must be 'coeff*u^deg'"),
            ));
        };
        monomials.push((parse_rational(&coeff_str, line)?, degree));
    }
    Ok(PowerNonlinearity::new(monomials))
}

fn parse_bool(s: &str, line: usize) -> Result<bool, ConfigError> {
    match s.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(ConfigError::new(line, format!("invalid boolean '{other}'"))),
    }
}

fn parse_variant(s: &str, line: usize) -> Result<Variant, ConfigError> {
    // MHAM and mHAM are distinct schemes; the token is case-sensitive
    match s.trim() {
        "HAM" => Ok(Variant::Ham),
        "MHAM" => Ok(Variant::Mham),
        "mHAM" => Ok(Variant::MhamStaged),
        "QHAM" | "qHAM" | "q-HAM" => Ok(Variant::Qham),
        "NDHAM" | "ND-HAM" => Ok(Variant::NdHam),
        other => Err(ConfigError::new(
            line,
            format!("unknown variant '{other}' (expected HAM, MHAM, mHAM, QHAM or NDHAM)"),
        )),
    }
}

/// Parses and fully validates a configuration file.
pub fn parse_config(text: &str) -> Result<RunSpec, ConfigError> {
    let sections = split_sections(text)?;

    let mut problem: Option<VFIDEProblem> = None;
    let mut problem_extras: BTreeMap<u32, ExpPoly> = BTreeMap::new();
    let mut methods: Vec<MethodConfig> = Vec::new();
    let mut output = OutputSpec::default();
    let mut grid_line = 0usize;

    for section in &sections {
        if section.name == "problem" {
            if problem.is_some() {
                return Err(ConfigError::new(section.header_line, "duplicate [problem] section"));
            }
            let (prob, extras) = parse_problem_section(section)?;
            problem = Some(prob);
            problem_extras = extras;
        } else if let Some(label) = section.name.strip_prefix("method.") {
            methods.push(parse_method_section(section, label)?);
        } else if section.name == "output" {
            for (line, key, value) in &section.entries {
                match key.as_str() {
                    "expressions" => output.expressions = parse_bool(value, *line)?,
                    "exact" => output.exact = Some(parse_term_list(value, *line)?),
                    "csv" => output.csv_path = Some(value.clone()),
                    "grid" => {
                        grid_line = *line;
                        output.grid = split_top_level(value, ',')
                            .iter()
                            .map(|v| parse_rational(v, *line).map(|r| rational_to_f64(&r)))
                            .collect::<Result<_, _>>()?;
                    }
                    "residual_grid" => {
                        let size: usize = value.trim().parse().map_err(|_| {
                            ConfigError::new(*line, format!("invalid residual grid size '{value}'"))
                        })?;
                        if size < 2 {
                            return Err(ConfigError::new(*line, "residual grid needs at least 2 points"));
                        }
                        output.residual_grid_size = Some(size);
                    }
                    other => {
                        return Err(ConfigError::new(*line, format!("unknown output key '{other}'")));
                    }
                }
            }
        } else {
            return Err(ConfigError::new(
                section.header_line,
                format!("unknown section '[{}]'", section.name),
            ));
        }
    }

    let mut problem = problem.ok_or_else(|| ConfigError::new(0, "missing [problem] section"))?;

    // attach a_coeff.<j> entries in order, checking the index range
    if !problem_extras.is_empty() {
        let max_j = problem.p.saturating_sub(1);
        let mut coeffs = vec![ExpPoly::zero(); max_j as usize];
        for (j, poly) in problem_extras {
            if j < 1 || j > max_j {
                return Err(ConfigError::new(
                    0,
                    format!("a_coeff.{j} out of range (valid: 1..={max_j})"),
                ));
            }
            coeffs[(j - 1) as usize] = poly;
        }
        problem.a_coeffs = coeffs;
    } else {
        problem.a_coeffs = vec![ExpPoly::zero(); (problem.p - 1) as usize];
    }

    problem
        .validate()
        .map_err(|message| ConfigError::new(0, message))?;

    if methods.is_empty() {
        return Err(ConfigError::new(0, "at least one [method.<label>] section is required"));
    }
    for m in &methods {
        m.validate().map_err(|message| ConfigError::new(0, message))?;
    }

    let a = rational_to_f64(&problem.domain.0);
    let b = rational_to_f64(&problem.domain.1);
    for &g in &output.grid {
        if g < a || g > b {
            return Err(ConfigError::new(grid_line, format!("grid point {g} outside domain [{a}, {b}]")));
        }
    }
    for w in output.grid.windows(2) {
        if w[1] <= w[0] {
            return Err(ConfigError::new(grid_line, "grid must be strictly increasing"));
        }
    }

    Ok(RunSpec { problem, methods, output })
}

fn parse_problem_section(
    section: &Section,
) -> Result<(VFIDEProblem, BTreeMap<u32, ExpPoly>), ConfigError> {
    let mut p: Option<u32> = None;
    let mut a = None;
    let mut b = None;
    let mut alphas: Option<Vec<Rational>> = None;
    let mut lambda1 = Rational::zero();
    let mut lambda2 = Rational::zero();
    let mut kernel1 = SeparableKernel::zero();
    let mut kernel2 = SeparableKernel::zero();
    let mut f1 = PowerNonlinearity::identity();
    let mut f2 = PowerNonlinearity::identity();
    let mut split: Option<Vec<ExpPoly>> = None;
    let mut extras: BTreeMap<u32, ExpPoly> = BTreeMap::new();

    for (line, key, value) in &section.entries {
        match key.as_str() {
            "p" => {
                p = Some(value.trim().parse().map_err(|_| {
                    ConfigError::new(*line, format!("invalid order '{value}'"))
                })?);
            }
            "a" => a = Some(parse_rational(value, *line)?),
            "b" => b = Some(parse_rational(value, *line)?),
            "alphas" => {
                alphas = Some(
                    split_top_level(value, ',')
                        .iter()
                        .map(|v| parse_rational(v, *line))
                        .collect::<Result<_, _>>()?,
                );
            }
            "lambda1" => lambda1 = parse_rational(value, *line)?,
            "lambda2" => lambda2 = parse_rational(value, *line)?,
            "kernel1" => kernel1 = parse_kernel(value, *line)?,
            "kernel2" => kernel2 = parse_kernel(value, *line)?,
            "F1" => f1 = parse_nonlinearity(value, *line)?,
            "F2" => f2 = parse_nonlinearity(value, *line)?,
            "split" => {
                split = Some(
                    split_top_level(value, ';')
                        .iter()
                        .map(|part| parse_term_list(part, *line))
                        .collect::<Result<_, _>>()?,
                );
            }
            other if other.starts_with("a_coeff.") => {
                let j: u32 = other["a_coeff.".len()..].parse().map_err(|_| {
                    ConfigError::new(*line, format!("invalid coefficient index in '{other}'"))
                })?;
                extras.insert(j, parse_term_list(value, *line)?);
            }
            other => {
                return Err(ConfigError::new(*line, format!("unknown problem key '{other}'")));
            }
        }
    }

    let need = |name: &str, line: usize| ConfigError::new(line, format!("missing problem key '{name}'"));
    let line = section.header_line;
    let p = p.ok_or_else(|| need("p", line))?;
    if p < 1 {
        return Err(ConfigError::new(line, "p must be at least 1"));
    }
    let problem = VFIDEProblem {
        p,
        a_coeffs: vec![],
        split: split.ok_or_else(|| need("split", line))?,
        lambda1,
        lambda2,
        kernel1,
        kernel2,
        f1,
        f2,
        domain: (a.ok_or_else(|| need("a", line))?, b.ok_or_else(|| need("b", line))?),
        alphas: alphas.ok_or_else(|| need("alphas", line))?,
    };
    Ok((problem, extras))
}

fn parse_method_section(section: &Section, label: &str) -> Result<MethodConfig, ConfigError> {
    let mut variant = None;
    let mut hbar = None;
    let mut n_qham = 1u32;
    let mut iterations = None;
    let mut guess = None;

    for (line, key, value) in &section.entries {
        match key.as_str() {
            "variant" => variant = Some(parse_variant(value, *line)?),
            "hbar" => {
                let h = parse_rational(value, *line)?;
                if h.is_zero() {
                    return Err(ConfigError::new(*line, "hbar must be nonzero"));
                }
                hbar = Some(h);
            }
            "n" => {
                n_qham = value.trim().parse().map_err(|_| {
                    ConfigError::new(*line, format!("invalid n '{value}'"))
                })?;
                if n_qham < 1 {
                    return Err(ConfigError::new(*line, "n must be at least 1"));
                }
            }
            "iterations" => {
                iterations = Some(value.trim().parse::<u32>().map_err(|_| {
                    ConfigError::new(*line, format!("invalid iteration count '{value}'"))
                })?);
            }
            "initial_guess" => guess = Some(parse_term_list(value, *line)?),
            other => {
                return Err(ConfigError::new(*line, format!("unknown method key '{other}'")));
            }
        }
    }

    let line = section.header_line;
    let need = |name: &str| ConfigError::new(line, format!("method '{label}': missing key '{name}'"));
    let mut config = MethodConfig::new(
        variant.ok_or_else(|| need("variant"))?,
        hbar.ok_or_else(|| need("hbar"))?,
        iterations.ok_or_else(|| need("iterations"))?,
    )
    .with_label(label)
    .with_n(n_qham);
    if let Some(g) = guess {
        config = config.with_initial_guess(g);
    }
    Ok(config)
}

// ---------------------------------------------------------------------------
// rendering (canonical config text; inverse of parse_config)

/// Term list in the input grammar, e.g. `-1*t, 1/36*t^3, 1*exp(t)`.
pub fn term_list_string(p: &ExpPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let parts: Vec<String> = p
        .terms()
        .map(|(coeff, power, rate)| {
            let mut s = coeff.to_string();
            if power == 1 {
                s.push_str("*t");
            } else if power > 1 {
                let _ = write!(s, "*t^{power}");
            }
            match rate {
                0 => {}
                1 => s.push_str("*exp(t)"),
                r => {
                    let _ = write!(s, "*exp({r}*t)");
                }
            }
            s
        })
        .collect();
    parts.join(", ")
}

fn kernel_string(k: &SeparableKernel) -> String {
    k.parts
        .iter()
        .map(|(g, h)| format!("{} | {}", term_list_string(g), term_list_string(h)))
        .collect::<Vec<_>>()
        .join(" ; ")
}

fn nonlinearity_string(f: &PowerNonlinearity) -> String {
    f.monomials()
        .iter()
        .map(|(c, d)| format!("{c}*u^{d}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Canonical config text for a spec; `parse_config(render_config(spec))`
/// reproduces the spec exactly.
pub fn render_config(spec: &RunSpec) -> String {
    let mut out = String::new();
    let prob = &spec.problem;
    out.push_str("[problem]\n");
    let _ = writeln!(out, "p = {}", prob.p);
    let _ = writeln!(out, "a = {}", prob.domain.0);
    let _ = writeln!(out, "b = {}", prob.domain.1);
    let alphas: Vec<String> = prob.alphas.iter().map(|r| r.to_string()).collect();
    let _ = writeln!(out, "alphas = {}", alphas.join(", "));
    for (j, c) in prob.a_coeffs.iter().enumerate() {
        if !c.is_zero() {
            let _ = writeln!(out, "a_coeff.{} = {}", j + 1, term_list_string(c));
        }
    }
    if !prob.lambda1.is_zero() {
        let _ = writeln!(out, "lambda1 = {}", prob.lambda1);
    }
    if !prob.lambda2.is_zero() {
        let _ = writeln!(out, "lambda2 = {}", prob.lambda2);
    }
    if !prob.kernel1.is_zero() {
        let _ = writeln!(out, "kernel1 = {}", kernel_string(&prob.kernel1));
    }
    if !prob.kernel2.is_zero() {
        let _ = writeln!(out, "kernel2 = {}", kernel_string(&prob.kernel2));
    }
    let _ = writeln!(out, "F1 = {}", nonlinearity_string(&prob.f1));
    let _ = writeln!(out, "F2 = {}", nonlinearity_string(&prob.f2));
    let splits: Vec<String> = prob.split.iter().map(term_list_string).collect();
    let _ = writeln!(out, "split = {}", splits.join(" ; "));

    for method in &spec.methods {
        let _ = writeln!(out, "\n[method.{}]", method.label);
        let _ = writeln!(out, "variant = {}", method.variant.name());
        let _ = writeln!(out, "hbar = {}", method.hbar);
        let _ = writeln!(out, "n = {}", method.n_qham);
        let _ = writeln!(out, "iterations = {}", method.iterations);
        if let Some(g) = &method.initial_guess_override {
            let _ = writeln!(out, "initial_guess = {}", term_list_string(g));
        }
    }

    out.push_str("\n[output]\n");
    let _ = writeln!(out, "expressions = {}", spec.output.expressions);
    if let Some(exact) = &spec.output.exact {
        let _ = writeln!(out, "exact = {}", term_list_string(exact));
    }
    if !spec.output.grid.is_empty() {
        let grid: Vec<String> = spec.output.grid.iter().map(|g| format!("{g}")).collect();
        let _ = writeln!(out, "grid = {}", grid.join(", "));
    }
    if let Some(csv) = &spec.output.csv_path {
        let _ = writeln!(out, "csv = {csv}");
    }
    if let Some(size) = spec.output.residual_grid_size {
        let _ = writeln!(out, "residual_grid = {size}");
    }
    out
}

// ---------------------------------------------------------------------------
// execution

/// In-memory results of a spec run; `execute` writes these to disk/stdout.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecOutput {
    /// Expression listing (empty when `expressions` is off and no residual
    /// norms are requested).
    pub listing: String,
    /// Rendered CSV table, when a grid was supplied.
    pub csv: Option<String>,
    /// Divergence-guard reports, one per affected method.
    pub divergences: Vec<(String, DivergenceNote)>,
}

fn format_value(v: f64) -> String {
    // 9 decimal places; Rust's formatter rounds half to even
    format!("{v:.9}")
}

fn render_csv(spec: &RunSpec, solutions: &[SeriesSolution]) -> Result<String, CliError> {
    let refs: Vec<&SeriesSolution> = solutions.iter().collect();
    let reference_values: Option<Vec<f64>> = spec
        .output
        .exact
        .as_ref()
        .map(|exact| spec.output.grid.iter().map(|&t| exact.eval_float(t)).collect());
    let table = crate::diagnostics::build_table(
        &refs,
        &spec.output.grid,
        reference_values
            .as_ref()
            .map(|values| ("reference", values.as_slice())),
    )?;

    let mut header = String::from("s");
    for (label, _) in &table.columns {
        let _ = write!(header, ",{label}");
    }
    if table.reference.is_some() {
        header.push_str(",reference");
        for (label, _) in &table.columns {
            let _ = write!(header, ",abs_err_{label}");
        }
    }
    let mut csv = header;
    csv.push('\n');
    for (i, &s) in table.grid.iter().enumerate() {
        let mut row = format_value(s);
        for (_, values) in &table.columns {
            let _ = write!(row, ",{}", format_value(values[i]));
        }
        if let Some((_, reference)) = &table.reference {
            let _ = write!(row, ",{}", format_value(reference[i]));
            for (_, values) in &table.columns {
                let _ = write!(row, ",{}", format_value((values[i] - reference[i]).abs()));
            }
        }
        csv.push_str(&row);
        csv.push('\n');
    }
    Ok(csv)
}

/// Runs every method of the spec and assembles the outputs in memory.
///
/// Methods run in spec order; outputs are byte-deterministic for a given
/// spec.
pub fn run_spec(spec: &RunSpec) -> Result<SpecOutput, CliError> {
    let mut solutions = Vec::with_capacity(spec.methods.len());
    for method in &spec.methods {
        solutions.push(run(&spec.problem, method)?);
    }

    let mut listing = String::new();
    let want_listing = spec.output.expressions || spec.output.residual_grid_size.is_some();
    if want_listing {
        for sol in &solutions {
            let _ = writeln!(listing, "[{}]", sol.config.label);
            let last = sol.iterates.len() - 1;
            if spec.output.expressions {
                for (m, u) in sol.iterates.iter().enumerate() {
                    let _ = writeln!(listing, "u[{m}] = {}", u.pretty_print());
                }
                let _ = writeln!(listing, "sum[{last}] = {}", sol.partial_sum(last).pretty_print());
                if let Some(exact) = &spec.output.exact {
                    let defect = sol.partial_sum(last).sub(exact);
                    let _ = writeln!(listing, "defect[{last}] = {}", defect.pretty_print());
                }
            }
            if let Some(size) = spec.output.residual_grid_size {
                let norm =
                    crate::diagnostics::residual_norm(&spec.problem, &sol.partial_sum(last), size)?;
                let _ = writeln!(listing, "residual_norm[{last}] = {:.6e}", norm);
            }
            listing.push('\n');
        }
    }

    let csv = if spec.output.grid.is_empty() {
        None
    } else {
        Some(render_csv(spec, &solutions)?)
    };

    let divergences = solutions
        .iter()
        .filter_map(|sol| {
            sol.divergence
                .clone()
                .map(|note| (sol.config.label.clone(), note))
        })
        .collect();

    Ok(SpecOutput { listing, csv, divergences })
}

/// Runs the spec, prints the listing to stdout and writes the CSV file.
///
/// Returns the first divergence as an error (exit code 3) after all
/// artifacts have been written.
pub fn execute(spec: &RunSpec) -> Result<(), CliError> {
    let output = run_spec(spec)?;
    if !output.listing.is_empty() {
        print!("{}", output.listing);
    }
    if let (Some(path), Some(csv)) = (&spec.output.csv_path, &output.csv) {
        std::fs::write(path, csv)?;
    }
    if let Some((label, note)) = output.divergences.into_iter().next() {
        return Err(CliError::Diverging { label, note });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_int};

    const EXP_KERNEL_CONFIG: &str = "\
# second-order problem with a product kernel
[problem]
p = 2
a = 0
b = 1
alphas = 1, 1
lambda2 = 1
kernel2 = t | t
F2 = 1*u^1
split = exp(t) ; -1*t

[method.nd]
variant = NDHAM
hbar = -1
iterations = 5

[output]
expressions = true
exact = exp(t)
";

    const QUADRATIC_CONFIG: &str = "\
[problem]
p = 1
a = 0
b = 1
alphas = 0
lambda1 = 1
kernel1 = 1 | 1
F1 = 1*u^2
split = -1 ; 0

[method.nd]
variant = NDHAM
hbar = -1
iterations = 5

[output]
expressions = true
grid = 0, 0.5, 1
csv = table.csv
";

    #[test]
    fn parses_exp_kernel_config() {
        let spec = parse_config(EXP_KERNEL_CONFIG).unwrap();
        assert_eq!(spec.problem.p, 2);
        assert_eq!(spec.problem.alphas, vec![rat_int(1), rat_int(1)]);
        assert_eq!(spec.problem.split.len(), 2);
        assert_eq!(spec.problem.split[0], ExpPoly::exp(1));
        assert_eq!(spec.problem.split[1], ExpPoly::term(rat_int(-1), 1, 0));
        assert_eq!(spec.methods.len(), 1);
        assert_eq!(spec.methods[0].variant, Variant::NdHam);
        assert_eq!(spec.methods[0].hbar, rat_int(-1));
        assert_eq!(spec.output.exact, Some(ExpPoly::exp(1)));
    }

    #[test]
    fn parses_quadratic_config() {
        let spec = parse_config(QUADRATIC_CONFIG).unwrap();
        assert_eq!(spec.problem.p, 1);
        assert_eq!(spec.problem.lambda1, rat_int(1));
        assert_eq!(spec.problem.f1.monomials(), &[(rat_int(1), 2)]);
        assert_eq!(spec.problem.split[0], ExpPoly::constant(rat_int(-1)));
        assert!(spec.problem.split[1].is_zero());
        assert_eq!(spec.output.grid, vec![0.0, 0.5, 1.0]);
        assert_eq!(spec.output.csv_path.as_deref(), Some("table.csv"));
    }

    #[test]
    fn rejects_zero_hbar() {
        let text = QUADRATIC_CONFIG.replace("hbar = -1", "hbar = 0");
        let err = parse_config(&text).unwrap_err();
        assert!(err.message.contains("hbar must be nonzero"), "{err}");
    }

    #[test]
    fn rejects_unknown_keys_with_line_numbers() {
        let text = format!("{QUADRATIC_CONFIG}\n[problem2]\nx = 1\n");
        let err = parse_config(&text).unwrap_err();
        assert!(err.message.contains("unknown section"), "{err}");

        let text = QUADRATIC_CONFIG.replace("lambda1 = 1", "lambda9 = 1");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.line, 6);
        assert!(err.message.contains("unknown problem key"), "{err}");
    }

    #[test]
    fn rejects_alpha_arity_mismatch() {
        let text = QUADRATIC_CONFIG.replace("alphas = 0", "alphas = 0, 1");
        let err = parse_config(&text).unwrap_err();
        assert!(err.message.contains("initial values"), "{err}");
    }

    #[test]
    fn rejects_missing_methods() {
        let upto = QUADRATIC_CONFIG.find("[method.nd]").unwrap();
        let err = parse_config(&QUADRATIC_CONFIG[..upto]).unwrap_err();
        assert!(err.message.contains("at least one"), "{err}");
    }

    #[test]
    fn rejects_grid_outside_domain() {
        let text = QUADRATIC_CONFIG.replace("grid = 0, 0.5, 1", "grid = 0, 0.5, 2");
        let err = parse_config(&text).unwrap_err();
        assert!(err.message.contains("outside domain"), "{err}");
    }

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("1/3", 1).unwrap(), rat(1, 3));
        assert_eq!(parse_rational("-2", 1).unwrap(), rat_int(-2));
        assert_eq!(parse_rational("0.25", 1).unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-0.5", 1).unwrap(), rat(-1, 2));
        assert!(parse_rational("1/0", 1).is_err());
        assert!(parse_rational("abc", 1).is_err());
    }

    #[test]
    fn parses_term_grammar() {
        assert_eq!(parse_term_list("exp(t)", 1).unwrap(), ExpPoly::exp(1));
        assert_eq!(parse_term_list("-t", 1).unwrap(), ExpPoly::term(rat_int(-1), 1, 0));
        assert_eq!(
            parse_term_list("2*t^3*exp(-2*t)", 1).unwrap(),
            ExpPoly::term(rat_int(2), 3, -2)
        );
        assert_eq!(
            parse_term_list("1, 1*t", 1).unwrap(),
            ExpPoly::constant(rat_int(1)).add(&ExpPoly::var())
        );
        assert_eq!(parse_term_list("0", 1).unwrap(), ExpPoly::zero());
        assert!(parse_term_list("exp(t^2)", 1).is_err());
        assert!(parse_term_list("1/2*exp(1/2*t)", 1).is_err()); // non-integer rate
    }

    #[test]
    fn round_trip_through_renderer() {
        for text in [EXP_KERNEL_CONFIG, QUADRATIC_CONFIG] {
            let spec = parse_config(text).unwrap();
            let rendered = render_config(&spec);
            let reparsed = parse_config(&rendered).unwrap();
            assert_eq!(spec, reparsed, "rendered:\n{rendered}");
        }
    }

    #[test]
    fn exp_kernel_run_recovers_exact_solution() {
        let spec = parse_config(EXP_KERNEL_CONFIG).unwrap();
        let output = run_spec(&spec).unwrap();
        assert!(output.listing.contains("u[0] = e^t"));
        assert!(output.listing.contains("u[1] = 0"));
        assert!(output.listing.contains("sum[5] = e^t"));
        assert!(output.listing.contains("defect[5] = 0"));
        assert!(output.csv.is_none());
        assert!(output.divergences.is_empty());
    }

    #[test]
    fn csv_shape_and_determinism() {
        let spec = parse_config(QUADRATIC_CONFIG).unwrap();
        let first = run_spec(&spec).unwrap();
        let second = run_spec(&spec).unwrap();
        assert_eq!(first, second);
        let csv = first.csv.unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "s,nd");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 2);
        assert_eq!(row[0], "0.000000000");
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn csv_with_reference_column() {
        let text = QUADRATIC_CONFIG.replace("csv = table.csv", "csv = table.csv\nexact = -1*t");
        let spec = parse_config(&text).unwrap();
        let csv = run_spec(&spec).unwrap().csv.unwrap();
        assert!(csv.lines().next().unwrap() == "s,nd,reference,abs_err_nd");
    }

    #[test]
    fn execute_writes_csv_artifact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let text = QUADRATIC_CONFIG.replace("csv = table.csv", &format!("csv = {}", path.display()));
        let spec = parse_config(&text).unwrap();
        execute(&spec).unwrap();
        let written = std::fs::read_to_string(&path).unwrap();
        assert!(written.starts_with("s,nd"));
    }
}
