//! Command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a verification fails, 2 on
//! usage or input errors. With `--format machine` every report line is a
//! `key=value` record.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::algebra::{builtin, parse_group_file, StratifiedLieAlgebra};
use crate::bump::TestBump;
use crate::contact::{rigidity_probe, solve_contact_fields};
use crate::error::{CarnotError, Result};
use crate::exterior::{default_grid_order, DxToSigma};
use crate::flows::{verify_identity_in_chart, Composition, ContactMap, FlowMap, PolyContactMap};
use crate::group::{CarnotGroup, LeftPolyField, NumericField, PolyVectorField};
use crate::mollifier::{BumpForm, Mollifier};
use crate::poly::{coord_name, parse_polynomial, Polynomial};
use crate::rational::parse_q;
use crate::weak::{is_weak_contact, verify_pushforward, TestFamily};

#[derive(Parser, Debug)]
#[command(name = "carnot", version, about = "Contact fields, mollification and weak contact identities on Carnot groups")]
pub struct Cli {
    /// Output style.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

/// A builtin name (`heisenberg`, `heisenberg(k)`, `engel`, `g235`,
/// `free(m,s)`) or the path of a group-definition file.
#[derive(Args, Debug, Clone)]
pub struct GroupArg {
    pub group: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check antisymmetry, grading, Jacobi and generation of a stratified
    /// Lie algebra.
    Validate(GroupArg),
    /// Print the left- and right-invariant frames and the left coframe
    /// of the group in exponential coordinates.
    Frame(GroupArg),
    /// Solve the contact field equation for polynomial fields up to a
    /// weighted degree and print the dimension table.
    SolveContact {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, default_value_t = 3, allow_negative_numbers = true)]
        degree: i32,
        /// Also run the stabilization probe up to this degree.
        #[arg(long)]
        probe: Option<i32>,
        /// Print the kernel fields.
        #[arg(long)]
        basis: bool,
    },
    /// Heuristic rigidity probe: do the contact-field dimensions stabilize?
    Probe {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, default_value_t = 6)]
        degree: i32,
    },
    /// Group mollification: normalization, the three convolution
    /// integrals, the two duality identities and commutation with d.
    SmoothDemo {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// Per-axis order of the mollifier rule.
        #[arg(long, env = "CARNOT_GRID_ORDER")]
        grid: Option<usize>,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Evaluate the weak contact identity of a field (or its pushforward)
    /// against the standard test family on the box [-1,1]^n.
    VerifyWeak {
        #[command(flatten)]
        group: GroupArg,
        /// `right:k`, `left:k`, `dilation`, `kernel:D:i`, `left-coeffs:p1;...;pn`
        /// or `coords:p1;...;pn` (1-based indices).
        #[arg(long)]
        field: String,
        /// `id`, `translate:a1,...,an`, `dilate:t`, `flow:T:<field>`, or a
        /// composition `A@B` meaning `A∘B`.
        #[arg(long)]
        pushforward: Option<String>,
        /// Per-axis order of the quadrature on each bump.
        #[arg(long, env = "CARNOT_GRID_ORDER")]
        grid: Option<usize>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Half-width of the working box.
        #[arg(long, default_value_t = 1.0)]
        half_width: f64,
    },
    /// Charts from flows of the right-invariant frame at `p` and of its
    /// pushforward at `f(p)`: check that `f` is the identity in them.
    ChartDemo {
        #[command(flatten)]
        group: GroupArg,
        /// Map spec, as for `verify-weak --pushforward`.
        #[arg(long)]
        map: String,
        /// Comma-separated base point (default: the origin).
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value_t = 0.1)]
        radius: f64,
        /// Grid points per axis.
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

/// Parses `args` (including the program name), runs, and returns the exit
/// code together with everything that should go to stdout.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    let mut out = Output { format: cli.format, text: String::new() };
    match execute(&cli.command, &mut out) {
        Ok(true) => (0, out.text),
        Ok(false) => (1, out.text),
        Err(e) => {
            out.record("error", &e.to_string());
            (2, out.text)
        }
    }
}

struct Output {
    format: Format,
    text: String,
}

impl Output {
    fn line(&mut self, human: impl AsRef<str>) {
        if self.format == Format::Human {
            self.text.push_str(human.as_ref());
            self.text.push('\n');
        }
    }

    fn record(&mut self, key: &str, value: impl std::fmt::Display) {
        match self.format {
            Format::Human => writeln!(self.text, "{key}: {value}").unwrap(),
            Format::Machine => writeln!(self.text, "{key}={value}").unwrap(),
        }
    }

    fn machine(&mut self, key: &str, value: impl std::fmt::Display) {
        if self.format == Format::Machine {
            writeln!(self.text, "{key}={value}").unwrap();
        }
    }
}

/// Reads an algebra from a builtin name or a file path.
pub fn load_algebra(spec: &str) -> Result<StratifiedLieAlgebra> {
    if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec).map_err(|e| CarnotError::Parse(format!("{spec}: {e}")))?;
        parse_group_file(&text)
    } else {
        builtin(spec)
    }
}

pub fn load_group(spec: &str) -> Result<CarnotGroup> {
    CarnotGroup::new(load_algebra(spec)?)
}

fn execute(cmd: &Command, out: &mut Output) -> Result<bool> {
    match cmd {
        Command::Validate(g) => {
            let report = load_algebra(&g.group)?.validate();
            match out.format {
                Format::Human => out.line(report.to_string().trim_end()),
                Format::Machine => {
                    for c in &report.checks {
                        out.machine(&c.name, if c.passed { "pass" } else { "fail" });
                        if let Some(d) = &c.detail {
                            out.machine(&format!("{}.detail", c.name), d);
                        }
                    }
                }
            }
            Ok(report.all_passed())
        }
        Command::Frame(g) => {
            let group = load_group(&g.group)?;
            frame(&group, out);
            Ok(true)
        }
        Command::SolveContact { group, degree, probe, basis } => {
            let group = load_group(&group.group)?;
            let sol = solve_contact_fields(&group, *degree)?;
            out.line(format!("contact fields of {} up to weighted degree {degree}", group.algebra().name()));
            out.line(format!("{:>8} {:>10}", "degree", "dimension"));
            for (d, dim) in sol.table() {
                out.line(format!("{d:>8} {dim:>10}"));
                out.machine(&format!("dim[{d}]"), dim);
            }
            out.record("dimension", sol.dimension());
            if *basis {
                for (i, z) in sol.basis.iter().enumerate() {
                    out.record(&format!("field[{}]", i + 1), z.fmt_with(group.weights()));
                }
            }
            if let Some(d_max) = probe {
                out.record("probe", rigidity_probe(&group, *d_max)?.verdict);
            }
            Ok(true)
        }
        Command::Probe { group, degree } => {
            let group = load_group(&group.group)?;
            let report = rigidity_probe(&group, *degree)?;
            out.line(format!("{:>8} {:>10}", "degree", "dimension"));
            for (d, dim) in &report.table {
                out.line(format!("{d:>8} {dim:>10}"));
                out.machine(&format!("dim[{d}]"), dim);
            }
            out.record("verdict", &report.verdict);
            Ok(true)
        }
        Command::SmoothDemo { group, eps, grid, tol } => {
            let group = load_group(&group.group)?;
            smooth_demo(&group, *eps, grid.unwrap_or_else(default_grid_order), *tol, out)
        }
        Command::VerifyWeak { group, field, pushforward, grid, tol, half_width } => {
            let group = load_group(&group.group)?;
            let z = parse_field(&group, field)?;
            let n = group.dim();
            let lo = vec![-half_width; n];
            let hi = vec![*half_width; n];
            let order = grid.unwrap_or_else(default_grid_order);
            let family = TestFamily::standard(&group, &lo, &hi, order)?;
            let report = match pushforward {
                None => is_weak_contact(&group, z.as_ref(), &family, *tol)?,
                Some(spec) => {
                    let f = parse_map(&group, spec)?;
                    verify_pushforward(&group, f.as_ref(), z.as_ref(), &family, *tol, 1e-6)?
                }
            };
            for (label, r) in &report.residuals {
                out.line(format!("{r:>12.3e}  {label}"));
            }
            match out.format {
                Format::Human => out.line(format!(
                    "max residual {:.3e} over {} pairs at tol {:.1e}: {}",
                    report.max_residual,
                    report.residuals.len(),
                    report.tol,
                    if report.pass { "weak contact" } else { "NOT weak contact" }
                )),
                Format::Machine => {
                    for (i, (_, r)) in report.residuals.iter().enumerate() {
                        out.machine(&format!("residual[{}]", i + 1), format!("{r:.6e}"));
                    }
                    out.machine("max_residual", format!("{:.6e}", report.max_residual));
                    out.machine("pass", report.pass);
                }
            }
            Ok(report.pass)
        }
        Command::ChartDemo { group, map, point, radius, points, tol } => {
            let group = load_group(&group.group)?;
            let f = parse_map(&group, map)?;
            let n = group.dim();
            let p = match point {
                Some(s) => parse_point(s, n)?,
                None => vec![0.0; n],
            };
            let right: Vec<LeftPolyField> =
                group.right_frame().iter().map(|z| LeftPolyField::from_field(&group, z)).collect::<Result<_>>()?;
            let fields: Vec<&dyn NumericField> = right.iter().map(|z| z as &dyn NumericField).collect();
            let report = verify_identity_in_chart(&group, f.as_ref(), &p, &fields, *radius, *points)?;
            out.line(format!("identity in flow charts for {} at {:?}", f.label(), p));
            out.line(format!("{:>40} {:>12}", "t", "error"));
            for (t, e) in &report.errors {
                out.line(format!("{:>40} {e:>12.3e}", format!("{t:.3?}")));
            }
            out.record("points", report.points);
            out.record("max_error", format!("{:.3e}", report.max_error));
            let pass = report.max_error <= *tol;
            out.record("pass", pass);
            Ok(pass)
        }
    }
}

fn frame(group: &CarnotGroup, out: &mut Output) {
    let n = group.dim();
    let alg = group.algebra();
    let w = group.weights();
    let name = |prefix: &str, a: usize| format!("{prefix}{}", alg.basis_index(a));
    match out.format {
        Format::Human => {
            out.line("left-invariant frame");
            for (a, z) in group.left_frame().iter().enumerate() {
                out.line(format!("  {} = {}", name("X", a), z.fmt_with(w)));
            }
            out.line("right-invariant frame");
            for (a, z) in group.right_frame().iter().enumerate() {
                out.line(format!("  {} = {}", name("XR", a), z.fmt_with(w)));
            }
            out.line("left-invariant coframe");
            for a in 0..n {
                let s = group.to_coordinate(&group.sigma(&[a])).expect("coframe conversion");
                out.line(format!("  {} = {}", name("sigma", a), s));
            }
        }
        Format::Machine => {
            let d = |b: usize| format!("d{}", coord_name(b));
            for (prefix, frame) in [("X", group.left_frame()), ("XR", group.right_frame())] {
                for (a, z) in frame.iter().enumerate() {
                    let partial = |b: usize| format!("∂{}", coord_name(b));
                    for l in z.machine_lines(&partial, w) {
                        out.machine(&name(prefix, a), l);
                    }
                }
            }
            for (a, row) in group.left_coframe_matrix().iter().enumerate() {
                let as_field = PolyVectorField::new(row.clone());
                for l in as_field.machine_lines(&d, w) {
                    out.machine(&name("sigma", a), l);
                }
            }
        }
    }
}

fn smooth_demo(group: &CarnotGroup, eps: f64, grid: usize, tol: f64, out: &mut Output) -> Result<bool> {
    let n = group.dim();
    let m = Mollifier::new(group, eps)?.with_order(grid);
    let p = |s: &str| parse_polynomial(s);
    let last = n - 1;
    let mut ok = true;
    let mut row = |out: &mut Output, key: &str, value: f64, pass: bool| {
        out.line(format!("{key:<22} {value:>12.3e}  {}", if pass { "ok" } else { "FAIL" }));
        out.machine(key, format!("{value:.6e}"));
        ok &= pass;
    };
    out.line(format!("mollification on {} at eps = {eps}", group.algebra().name()));
    let mass = m.total_mass(if n <= 4 { 1.0 / 12.0 } else { 1.0 / 10.0 });
    row(out, "normalization", (mass - 1.0).abs(), (mass - 1.0).abs() <= 1e-8);

    let x: Vec<f64> = (0..n).map(|a| 0.1 * (a as f64 + 1.0) * if a % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let f = |y: &[f64]| y[0] * y[0] + y[last] + y[0] * y[last];
    let cells = if n <= 3 { 8 } else if n == 4 { 4 } else { 3 };
    let three = m.convolve_three(f, &x, cells);
    let bc = (three[1] - three[2]).abs();
    row(out, "convolution_b_vs_c", bc, bc <= 1e-12);
    // Form A runs on a composite grid over a box around a curved support.
    let a = (three[0] - three[2]).abs();
    row(out, "convolution_a_vs_c", a, a <= 1e-4);

    let theta = group.sigma(&[last]).scale(&p(&format!("x1^2*x{} + x2 - x{}", n, n))?);
    let bump = TestBump::new(vec![0.05; n], 0.5)?;
    let beta = BumpForm::new(group, bump.clone(), &group.sigma_hat(last).scale(&p("1 + x1")?))?;
    let dual = m.verify_duality(&theta, &beta)?;
    out.machine("duality_lhs", format!("{:.6e}", dual.lhs));
    row(out, "duality", dual.residual, dual.residual <= tol);

    let alpha = group.sigma(&[0, last]);
    let field = PolyVectorField::new((0..n).map(|a| if a == 0 { p(&format!("x{n}")) } else { p("x1^2") }).collect::<Result<Vec<Polynomial>>>()?);
    let beta2 = BumpForm::new(group, bump, &group.sigma_hat(0).scale(&p("1 + x1")?))?;
    let inner = m.verify_interior_duality(&alpha, &field, &beta2)?;
    out.machine("interior_duality_lhs", format!("{:.6e}", inner.lhs));
    row(out, "interior_duality", inner.residual, inner.residual <= tol);

    let pts = vec![x.clone(), x.iter().map(|v| -v / 2.0).collect()];
    let r1 = m.verify_d_commutes(&theta, &pts, 1e-2)?;
    let r2 = m.verify_d_commutes(&theta, &pts, 5e-3)?;
    row(out, "d_commutes_h", r1, true);
    row(out, "d_commutes_h/2", r2, r2 <= r1 / 3.0 || r2 <= 1e-9);
    Ok(ok)
}

fn parse_point(s: &str, n: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CarnotError::Parse(format!("bad coordinate `{t}`"))))
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(CarnotError::DimensionMismatch { expected: n, got: v.len() });
    }
    Ok(v)
}

fn parse_index(s: &str, n: usize) -> Result<usize> {
    match s.trim().parse::<usize>() {
        Ok(k) if (1..=n).contains(&k) => Ok(k - 1),
        _ => Err(CarnotError::IndexOutOfRange(format!("`{s}` not in 1..={n}"))),
    }
}

fn parse_polys(s: &str, n: usize) -> Result<Vec<Polynomial>> {
    let v: Vec<Polynomial> = s.split(';').map(parse_polynomial).collect::<Result<_>>()?;
    if v.len() != n {
        return Err(CarnotError::DimensionMismatch { expected: n, got: v.len() });
    }
    Ok(v)
}

/// A polynomial field from its spec.
pub fn parse_poly_field(group: &CarnotGroup, spec: &str) -> Result<PolyVectorField> {
    let n = group.dim();
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    match head.trim() {
        "right" => Ok(group.right_frame()[parse_index(rest, n)?].clone()),
        "left" => Ok(group.left_frame()[parse_index(rest, n)?].clone()),
        "dilation" => Ok(group.dilation_generator()),
        "kernel" => {
            let (d, i) = rest.split_once(':').ok_or_else(|| CarnotError::Parse(format!("expected kernel:D:i in `{spec}`")))?;
            let d: i32 = d.trim().parse().map_err(|_| CarnotError::Parse(format!("bad degree `{d}`")))?;
            let sol = solve_contact_fields(group, d)?;
            Ok(sol.basis[parse_index(i, sol.basis.len())?].clone())
        }
        "left-coeffs" => group.from_left_coefficients(&parse_polys(rest, n)?),
        "coords" => Ok(PolyVectorField::new(parse_polys(rest, n)?)),
        other => Err(CarnotError::Parse(format!("unknown field kind `{other}`"))),
    }
}

fn parse_field(group: &CarnotGroup, spec: &str) -> Result<Box<dyn NumericField>> {
    Ok(Box::new(LeftPolyField::from_field(group, &parse_poly_field(group, spec)?)?))
}

/// A contact map from its spec; `A@B` is `A∘B`.
pub fn parse_map(group: &CarnotGroup, spec: &str) -> Result<Arc<dyn ContactMap>> {
    let parts: Vec<&str> = spec.split('@').collect();
    if parts.len() > 1 {
        let maps = parts.iter().map(|p| parse_map(group, p)).collect::<Result<Vec<_>>>()?;
        return Ok(Arc::new(Composition { maps }));
    }
    let n = group.dim();
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    match head.trim() {
        "id" => Ok(Arc::new(PolyContactMap::identity(n))),
        "translate" => {
            let a = rest.split(',').map(|t| parse_q(t.trim())).collect::<Result<Vec<_>>>()?;
            Ok(Arc::new(PolyContactMap::left_translation(group, &a)?))
        }
        "dilate" => Ok(Arc::new(PolyContactMap::dilation(group, &parse_q(rest.trim())?)?)),
        "flow" => {
            let (t, field) = rest.split_once(':').ok_or_else(|| CarnotError::Parse(format!("expected flow:T:<field> in `{spec}`")))?;
            let t: f64 = t.trim().parse().map_err(|_| CarnotError::Parse(format!("bad time `{t}`")))?;
            let z = parse_poly_field(group, field)?;
            Ok(Arc::new(FlowMap::new(&z, t).with_label(format!("flow[{}]", field.trim()))))
        }
        other => Err(CarnotError::Parse(format!("unknown map kind `{other}`"))),
    }
}

