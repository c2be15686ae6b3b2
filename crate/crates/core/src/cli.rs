//! Command-line front end. Every command builds a [`Report`]: an ordered
//! list of named results plus `{claim, expected, got, pass}` checks, printed
//! either as `key: value` lines or as one JSON document.
//!
//! Exit codes: 0 success, 1 domain error or failed check, 2 usage error.

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::checks::{self, seed_from_env, Check, Scenario};
use crate::curve::{Curve, Place};
use crate::divisor::{principal_divisor, Divisor};
use crate::error::{Error, Result};
use crate::parse;
use crate::picard::PicardData;
use crate::quadratic::{represents_obstruction, SearchMode};
use crate::riemann_roch::{in_space, rr_dim, rr_space};
use crate::series::local_expand;
use crate::sheaf::{admits_constant_field_embedding, order_conjugate_m2, order_sections, EmbeddingMode, SplitOrder};
use crate::spinor::{
    nonsplit_lower_bound, representing_genera_hyperbolic_pair, restrict_to_open, rho_invariant,
    spinor_class_group, split_representatives, ClassFieldQuotient, Family, SpinorObject,
};

#[derive(Parser, Debug)]
#[command(
    name = "spinor-workbench",
    version,
    about = "Divisor class groups, Riemann-Roch spaces, split maximal orders and spinor genera over curves over finite fields"
)]
pub struct Cli {
    /// Emit one JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    /// Maximal orders in M_n(K).
    Orders,
    /// Quadratic lattices L(B) of rank n.
    Quadratic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExampleArg {
    A,
    B,
    M2,
    Elliptic,
    P1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Structural,
    Brute,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Picard group of a curve.
    Picard { curve: String },
    /// Riemann-Roch space L(B) with a basis.
    Rr { curve: String, divisor: String },
    /// Principal divisor of a function.
    Div { curve: String, function: String },
    /// Whether a divisor is principal, with a witness.
    Principal { curve: String, divisor: String },
    /// Global sections of a split order, e.g. "order P1/GF(3) [2*[inf]; 0]".
    Sections { order: String },
    /// Conjugacy of Delta_B and Delta_D in M_2(K).
    OrderConj { curve: String, b: String, d: String },
    /// Class-field quotient for a genus family.
    SpinorGroup {
        curve: String,
        #[arg(long, value_enum, default_value = "orders")]
        family: FamilyArg,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Spinor-genus tag of an order or quadratic-lattice literal.
    SpinorTag { object: String },
    /// Restriction of the class-field quotient to the complement of places.
    Restrict {
        curve: String,
        #[arg(required = true)]
        places: Vec<String>,
        #[arg(long, value_enum, default_value = "quadratic")]
        family: FamilyArg,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Lower bound on spinor genera of maximal orders containing non-split orders.
    NonsplitBound {
        curve: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Obstruction and spinor genera for representing the hyperbolic pair.
    Represent { qlat: String },
    /// One split order per spinor genus.
    SplitReps {
        curve: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Worked examples with embedded expected values.
    Example {
        which: ExampleArg,
        #[arg(long, default_value_t = 3)]
        q: u64,
        #[arg(long = "degB", default_value_t = 2, allow_hyphen_values = true)]
        deg_b: i64,
    },
    /// Invariant suite and acceptance matrix.
    Selftest {
        /// Run only groups whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
    },
    /// Places of degree at most --max-degree (rational points on elliptic curves).
    Places {
        curve: String,
        #[arg(long, default_value_t = 1)]
        max_degree: usize,
    },
    /// Laurent expansion of a function at a place.
    Expand {
        curve: String,
        function: String,
        place: String,
        #[arg(long, default_value_t = 6)]
        precision: usize,
    },
    /// Factor a polynomial in x over a field.
    Factor { field: String, poly: String },
    /// Constant-field embedding F_{q^n} -> Delta(X).
    Embed {
        order: String,
        #[arg(long, value_enum, default_value = "both")]
        mode: ModeArg,
    },
    /// Class group of the curve minus the given places.
    Affine {
        curve: String,
        #[arg(required = true)]
        places: Vec<String>,
    },
}

/// Named results and checks of one command.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub results: Vec<(String, Value)>,
    pub checks: Vec<(String, Check)>,
}

impl Report {
    fn new(command: &str) -> Self {
        Report { command: command.into(), ..Default::default() }
    }

    fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.results.push((key.into(), v.into()));
    }

    fn check(&mut self, scope: &str, c: Check) {
        self.checks.push((scope.into(), c));
    }

    fn scenario(&mut self, s: Scenario) {
        for c in s.checks {
            self.checks.push((s.id.clone(), c));
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, c)| c.pass)
    }

    pub fn to_json(&self) -> Value {
        let mut results = Map::new();
        for (k, v) in &self.results {
            results.insert(k.clone(), v.clone());
        }
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|(s, c)| json!({"scope": s, "claim": c.claim, "expected": c.expected, "got": c.got, "pass": c.pass}))
            .collect();
        json!({"command": self.command, "results": results, "checks": checks, "pass": self.passed()})
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.results {
            out.push_str(&format!("{k}: {}\n", render(v)));
        }
        if !self.checks.is_empty() {
            let mut scope = "";
            for (s, c) in &self.checks {
                if s != scope {
                    out.push_str(&format!("== {s}\n"));
                    scope = s;
                }
                let verdict = if c.pass { "PASS" } else { "FAIL" };
                out.push_str(&format!("{verdict} {}: expected {}, got {}\n", c.claim, c.expected, c.got));
            }
            let n = self.checks.iter().filter(|(_, c)| c.pass).count();
            let overall = if self.passed() { "PASS" } else { "FAIL" };
            out.push_str(&format!("{overall} {n}/{} checks\n", self.checks.len()));
        }
        out
    }
}

/// Text rendering of a result value.
pub fn render(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        Value::Array(xs) => format!("[{}]", xs.iter().map(render).collect::<Vec<_>>().join(", ")),
        Value::Object(m) => format!("{{{}}}", m.iter().map(|(k, v)| format!("{k}: {}", render(v))).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli.command) {
        Ok(report) => {
            let code = if report.passed() { 0 } else { 1 };
            let stdout = if cli.json {
                format!("{}\n", serde_json::to_string_pretty(&report.to_json()).expect("serializable"))
            } else {
                report.to_text()
            };
            Outcome { code, stdout, stderr: String::new() }
        }
        Err(e) => {
            let code = exit_code(&e);
            if cli.json {
                let doc = json!({"error": {"kind": error_kind(&e), "message": e.to_string()}, "exit_code": code});
                Outcome { code, stdout: format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable")), stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: format!("error: {e}\n") }
            }
        }
    }
}

/// Malformed literals and out-of-range arguments are usage errors;
/// everything else is a domain error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::InvalidArgument(_) => 2,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DivisionByZero => "division_by_zero",
        Error::FieldMismatch(..) => "field_mismatch",
        Error::CurveMismatch(..) => "curve_mismatch",
        Error::InvalidField(_) => "invalid_field",
        Error::InvalidCurve(_) => "invalid_curve",
        Error::InvalidPlace(_) => "invalid_place",
        Error::Parse(_) => "parse",
        Error::Unsupported(_) => "unsupported",
        Error::CharacteristicTwo => "characteristic_two",
        Error::NonRationalSupport(_) => "non_rational_support",
        Error::PrecisionExhausted(_) => "precision_exhausted",
        Error::KindMismatch(_) => "kind_mismatch",
        Error::BudgetExceeded(_) => "budget_exceeded",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::Internal(_) => "internal",
    }
}

fn places_json(c: &Curve, ps: &[Place]) -> Value {
    Value::Array(ps.iter().map(|p| Value::String(p.format(c.field()))).collect())
}

fn strings<T: ToString>(xs: impl IntoIterator<Item = T>) -> Value {
    Value::Array(xs.into_iter().map(|x| Value::String(x.to_string())).collect())
}

fn pic_string(pic: &PicardData) -> String {
    if pic.torsion().is_trivial() {
        "Z".into()
    } else {
        format!("Z x {}", pic.torsion())
    }
}

fn family(f: FamilyArg, n: usize) -> Family {
    match f {
        FamilyArg::Orders => Family::SplitOrders(n),
        FamilyArg::Quadratic => Family::UnimodularQuadratic(n),
    }
}

fn quotient_results(r: &mut Report, q: &ClassFieldQuotient) -> Result<()> {
    r.put("quotient", q.label());
    r.put("group", q.group().to_string());
    r.put("order", q.order());
    let c = q.curve();
    let places = if c.is_elliptic() { c.rational_points() } else { c.places_up_to_degree(2)? };
    let mut frob = Map::new();
    for p in places {
        frob.insert(p.format(c.field()), Value::String(q.frobenius(&p)?.to_string()));
    }
    r.put("frobenius", Value::Object(frob));
    Ok(())
}

fn execute(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Picard { curve } => {
            let c = parse::parse_curve(curve)?;
            let pic = PicardData::new(&c)?;
            let mut r = Report::new("picard");
            r.put("curve", c.to_string());
            r.put("genus", c.genus());
            r.put("pic", pic_string(&pic));
            r.put("pic0", pic.torsion().to_string());
            r.put("pic0_order", pic.torsion().order().unwrap_or(0));
            if c.is_elliptic() {
                r.put("points", places_json(&c, pic.points()));
                r.put("torsion_basis", places_json(&c, &pic.torsion_basis()));
            }
            r.check("picard", Check::holds("Hasse interval", pic.hasse_check()));
            r.check("picard", Check::holds("group axioms of the point table", pic.group_axioms_check()));
            Ok(r)
        }
        Command::Rr { curve, divisor } => {
            let c = parse::parse_curve(curve)?;
            let b = parse::parse_divisor(&c, divisor)?;
            let s = rr_space(&b)?;
            let mut r = Report::new("rr");
            r.put("curve", c.to_string());
            r.put("divisor", b.to_string());
            r.put("degree", b.degree());
            r.put("dim", s.dim());
            r.put("basis", strings(s.basis()));
            r.check("rr", Check::eq("dimension equals the closed form", rr_dim(&b)?, s.dim()));
            for f in s.basis() {
                r.check("rr", Check::holds(format!("div({f}) + B >= 0"), in_space(f, &b)));
            }
            Ok(r)
        }
        Command::Div { curve, function } => {
            let c = parse::parse_curve(curve)?;
            let f = parse::parse_function(&c, function)?;
            let d = principal_divisor(&f)?;
            let mut r = Report::new("div");
            r.put("curve", c.to_string());
            r.put("function", f.to_string());
            r.put("divisor", d.to_string());
            r.put("zeros", d.positive_part().to_string());
            r.put("poles", (-&d).positive_part().to_string());
            r.check("div", Check::eq("degree of a principal divisor", 0, d.degree()));
            Ok(r)
        }
        Command::Principal { curve, divisor } => {
            let c = parse::parse_curve(curve)?;
            let d = parse::parse_divisor(&c, divisor)?;
            let pic = PicardData::new(&c)?;
            let w = pic.principal_witness(&d)?;
            let mut r = Report::new("principal");
            r.put("curve", c.to_string());
            r.put("divisor", d.to_string());
            r.put("class", pic.class_of(&d)?.to_string());
            r.put("principal", w.is_some());
            r.put("witness", w.as_ref().map_or(Value::Null, |f| Value::String(f.to_string())));
            if let Some(f) = &w {
                r.check("principal", Check::eq("div(witness)", &d, principal_divisor(f)?));
            }
            Ok(r)
        }
        Command::Sections { order } => {
            let o = parse::parse_order(order)?;
            let pic = PicardData::new(o.curve())?;
            let alg = order_sections(&o, &pic)?;
            let mut r = Report::new("sections");
            r.put("order", parse::format_order(&o));
            r.put("n", o.n());
            r.put("dim", alg.dim());
            r.put("structure", alg.structure().to_string());
            let dims: Vec<Value> = (0..o.n()).map(|i| Value::Array((0..o.n()).map(|j| alg.block_dim(i, j).into()).collect())).collect();
            r.put("block_dims", Value::Array(dims));
            r.put("basis", strings(alg.entries().iter().map(|e| format!("({}) E_{}{}", e.f, e.i + 1, e.j + 1))));
            r.check("sections", Check::holds("associative", alg.is_associative()));
            Ok(r)
        }
        Command::OrderConj { curve, b, d } => {
            let c = parse::parse_curve(curve)?;
            let (b, d) = (parse::parse_divisor(&c, b)?, parse::parse_divisor(&c, d)?);
            let pic = PicardData::new(&c)?;
            let conj = order_conjugate_m2(&b, &d, &pic)?;
            let ab = order_sections(&SplitOrder::m2(&b), &pic)?;
            let ad = order_sections(&SplitOrder::m2(&d), &pic)?;
            let mut r = Report::new("order-conj");
            r.put("curve", c.to_string());
            r.put("b", b.to_string());
            r.put("d", d.to_string());
            r.put("b_equivalent_d", pic.is_principal(&b.checked_sub(&d)?)?);
            r.put("b_equivalent_minus_d", pic.is_principal(&b.checked_add(&d)?)?);
            r.put("conjugate", conj);
            r.put("sections_b", format!("dim {}, {}", ab.dim(), ab.structure()));
            r.put("sections_d", format!("dim {}, {}", ad.dim(), ad.structure()));
            if conj {
                r.check("order-conj", Check::eq("section algebras of conjugate orders agree", format!("{} {}", ab.dim(), ab.structure()), format!("{} {}", ad.dim(), ad.structure())));
            }
            Ok(r)
        }
        Command::SpinorGroup { curve, family: f, n } => {
            let c = parse::parse_curve(curve)?;
            let pic = PicardData::new(&c)?;
            let q = spinor_class_group(family(*f, *n), &pic)?;
            let mut r = Report::new("spinor-group");
            r.put("curve", c.to_string());
            r.put("family", q.family().to_string());
            quotient_results(&mut r, &q)?;
            Ok(r)
        }
        Command::SpinorTag { object } => {
            let t = object.trim();
            let obj = if t.starts_with("order") {
                SpinorObject::Order(parse::parse_order(t)?)
            } else if t.starts_with("qlat") {
                SpinorObject::Lattice(parse::parse_qlat(t)?)
            } else {
                return Err(Error::Parse(format!("expected an order or qlat literal, got \"{t}\"")));
            };
            let (c, fam) = match &obj {
                SpinorObject::Order(o) => (o.curve().clone(), Family::SplitOrders(o.n())),
                SpinorObject::Lattice(l) => (l.curve().clone(), Family::UnimodularQuadratic(l.rank())),
            };
            let pic = PicardData::new(&c)?;
            let q = spinor_class_group(fam, &pic)?;
            let mut r = Report::new("spinor-tag");
            r.put("object", t);
            r.put("divisor", obj.divisor().to_string());
            r.put("class", pic.class_of(&obj.divisor())?.to_string());
            r.put("quotient", q.label());
            r.put("group", q.group().to_string());
            r.put("tag", rho_invariant(&obj, &q)?.to_string());
            Ok(r)
        }
        Command::Restrict { curve, places, family: f, n } => {
            let c = parse::parse_curve(curve)?;
            let ps = places.iter().map(|p| parse::parse_place(&c, p)).collect::<Result<Vec<_>>>()?;
            let pic = PicardData::new(&c)?;
            let q = spinor_class_group(family(*f, *n), &pic)?;
            let res = restrict_to_open(&q, &ps)?;
            let mut r = Report::new("restrict");
            r.put("curve", c.to_string());
            r.put("removed", places_json(&c, &ps));
            r.put("group_before", q.group().to_string());
            quotient_results(&mut r, &res)?;
            r.put("trivial", res.is_trivial());
            for p in &ps {
                r.check("restrict", Check::holds(format!("Frob{} trivial after restriction", p.format(c.field())), res.frobenius(p)?.is_identity()));
            }
            Ok(r)
        }
        Command::NonsplitBound { curve, n } => {
            let c = parse::parse_curve(curve)?;
            let pic = PicardData::new(&c)?;
            let b = nonsplit_lower_bound(&pic, *n)?;
            let mut r = Report::new("nonsplit-bound");
            r.put("curve", c.to_string());
            r.put("n", *n);
            r.put("pic0", pic.torsion().to_string());
            r.put("torsion_quotient", b.torsion_quotient);
            r.put("spinor_genera", b.spinor_genera);
            r.put("bound", b.bound);
            r.check("nonsplit-bound", Check::eq("|Pic/nPic| = n |T/nT|", *n as u64 * b.torsion_quotient, b.spinor_genera));
            Ok(r)
        }
        Command::Represent { qlat } => {
            let l = parse::parse_qlat(qlat)?;
            let pic = PicardData::new(l.curve())?;
            let obs = represents_obstruction(&l, SearchMode::Both)?;
            let rep = representing_genera_hyperbolic_pair(&l, &pic)?;
            let inv = &obs.invariants;
            let mut r = Report::new("represent");
            r.put("lattice", parse::format_qlat(&l));
            let parts: Vec<usize> = l.as_decomposable().sections()?.iter().map(|s| s.dim()).collect();
            r.put("section_dims", Value::Array(parts.iter().map(|&d| d.into()).collect()));
            r.put("sections_dim", inv.dim);
            r.put("radical_dim", inv.radical_dim);
            r.put("discriminant", inv.discriminant.to_string());
            r.put("witt_index", inv.witt_index);
            r.put("embedding_candidates", obs.embedding.candidates);
            r.put("verdict", obs.verdict.to_string());
            r.put("spinor_group", rep.quotient.group().to_string());
            r.put("certified_tags", strings(&rep.certified));
            r.put("representing_genera", format!("{} of {} ({})", rep.count, rep.total, rep.qualifier()));
            Ok(r)
        }
        Command::SplitReps { curve, n } => {
            let c = parse::parse_curve(curve)?;
            let pic = PicardData::new(&c)?;
            let reps = split_representatives(&pic, *n)?;
            let q = spinor_class_group(Family::SplitOrders(*n), &pic)?;
            let mut r = Report::new("split-reps");
            r.put("curve", c.to_string());
            r.put("group", q.group().to_string());
            r.put("count", reps.len());
            let mut m = Map::new();
            for (tag, o) in &reps {
                m.insert(tag.to_string(), Value::String(parse::format_order(o)));
            }
            r.put("representatives", Value::Object(m));
            r.check("split-reps", Check::eq("one representative per spinor genus", q.order(), reps.len()));
            Ok(r)
        }
        Command::Example { which, q, deg_b } => {
            let mut r = Report::new("example");
            match which {
                ExampleArg::A => {
                    r.put("example", "a");
                    r.scenario(checks::scenario_example_a());
                }
                ExampleArg::B => {
                    r.put("example", "b");
                    let k = crate::field::FiniteField::of_order(*q)?;
                    let c = Curve::projective_line(&k);
                    let l = crate::quadratic::QuadLattice::new(&c, 4, Divisor::place(&c, Place::Infinity, *deg_b)?)?;
                    let obs = represents_obstruction(&l, SearchMode::Both)?;
                    r.put("lattice", parse::format_qlat(&l));
                    r.put("sections", obs.sections.to_string());
                    r.put("radical", strings(obs.sections.radical_basis().iter().map(|v| {
                        format!("({})", v.iter().map(|&a| k.format(a)).collect::<Vec<_>>().join(","))
                    })));
                    r.put("verdict", obs.verdict.to_string());
                    r.scenario(checks::scenario_example_b(*q, *deg_b));
                }
                ExampleArg::M2 => {
                    r.put("example", "m2");
                    r.scenario(checks::scenario_conjugacy());
                    r.scenario(checks::scenario_embedding());
                }
                ExampleArg::Elliptic => {
                    r.put("example", "elliptic");
                    r.scenario(checks::scenario_genus_one());
                    r.scenario(checks::scenario_spinor_count());
                }
                ExampleArg::P1 => {
                    r.put("example", "p1");
                    r.scenario(checks::scenario_p1_sharpness());
                }
            }
            Ok(r)
        }
        Command::Selftest { filter } => {
            let seed = seed_from_env();
            let mut r = Report::new("selftest");
            r.put("seed", seed);
            let scenarios = crate::selftest::run(filter.as_deref(), seed);
            if scenarios.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "no group matches {:?}; groups: {}",
                    filter.as_deref().unwrap_or(""),
                    crate::selftest::GROUPS.join(", ")
                )));
            }
            r.put("groups", strings(scenarios.iter().map(|s| s.id.clone())));
            for s in scenarios {
                r.scenario(s);
            }
            Ok(r)
        }
        Command::Places { curve, max_degree } => {
            let c = parse::parse_curve(curve)?;
            let ps = if c.is_elliptic() { c.rational_points() } else { c.places_up_to_degree(*max_degree)? };
            let mut r = Report::new("places");
            r.put("curve", c.to_string());
            r.put("count", ps.len());
            r.put("places", places_json(&c, &ps));
            Ok(r)
        }
        Command::Expand { curve, function, place, precision } => {
            let c = parse::parse_curve(curve)?;
            let f = parse::parse_function(&c, function)?;
            let p = parse::parse_place(&c, place)?;
            let e = local_expand(&f, &p, *precision)?;
            let mut r = Report::new("expand");
            r.put("function", f.to_string());
            r.put("place", p.format(c.field()));
            r.put("uniformizer", e.uniformizer.clone());
            r.put("valuation", e.valuation.map_or(Value::Null, Value::from));
            r.put("coefficients", strings(e.coefficients.iter().map(|a| a.format_var("x"))));
            r.check("expand", Check::eq("series order equals the exact valuation", format!("{:?}", f.valuation(&p)), format!("{:?}", e.valuation)));
            Ok(r)
        }
        Command::Factor { field, poly } => {
            let k = parse::parse_field(field)?;
            let p = parse::parse_poly(&k, poly, "x")?;
            if p.is_zero() {
                return Err(Error::InvalidArgument("cannot factor the zero polynomial".into()));
            }
            let fz = p.factor();
            let mut r = Report::new("factor");
            r.put("field", k.to_string());
            r.put("poly", p.to_string());
            r.put("lead", k.format(fz.lead));
            r.put("factors", strings(fz.factors.iter().map(|(g, e)| if *e == 1 { format!("({g})") } else { format!("({g})^{e}") })));
            r.check("factor", Check::eq("product of factors", &p, fz.expand(&k)));
            Ok(r)
        }
        Command::Embed { order, mode } => {
            let o = parse::parse_order(order)?;
            let pic = PicardData::new(o.curve())?;
            let m = match mode {
                ModeArg::Structural => EmbeddingMode::Structural,
                ModeArg::Brute => EmbeddingMode::BruteForce,
                ModeArg::Both => EmbeddingMode::Both,
            };
            let v = admits_constant_field_embedding(&o, &pic, m)?;
            let k = o.curve().field();
            let opt = |b: Option<bool>| b.map_or(Value::Null, Value::Bool);
            let mut r = Report::new("embed");
            r.put("order", parse::format_order(&o));
            r.put("target", format!("GF({})", (k.order() as u64).pow(o.n() as u32)));
            r.put("admits", v.admits);
            r.put("structural", opt(v.structural));
            r.put("brute_force", opt(v.brute_force));
            r.put("minimal_polynomial", v.minimal_polynomial.as_ref().map_or(Value::Null, |p| Value::String(p.to_string())));
            r.put("witness", v.witness.as_ref().map_or(Value::Null, |w| strings(w.iter().map(|&a| k.format(a)))));
            if let (Some(s), Some(b)) = (v.structural, v.brute_force) {
                r.check("embed", Check::eq("structural criterion agrees with exhaustive search", s, b));
            }
            Ok(r)
        }
        Command::Affine { curve, places } => {
            let c = parse::parse_curve(curve)?;
            let ps = places.iter().map(|p| parse::parse_place(&c, p)).collect::<Result<Vec<_>>>()?;
            let pic = PicardData::new(&c)?;
            let a = pic.affine_class_group(&ps)?;
            let mut r = Report::new("affine");
            r.put("curve", c.to_string());
            r.put("removed", places_json(&c, &a.removed));
            r.put("class_group", a.group().to_string());
            r.put("order", a.group().order().map_or(Value::Null, Value::from));
            Ok(r)
        }
    }
}
