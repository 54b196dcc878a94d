use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use quadlie::autgroup::{act_on_form, kernel_transport_holds, orbit_invariants, random_automorphism, AutomorphismJson, Endo};
use quadlie::exactlin::{congruence_class, sign, square_class_rep, FieldMode, Rational};
use quadlie::freenilp::{witt_dimension, FreeNilpotent};
use quadlie::invforms::{invariance_witness, invariant_form_space, sym0_membership, BilinearForm, FormJson};
use quadlie::paperbook::{
    catalog_isomorphism, classified_algebra, family_form, replay, CatalogLabel, CatalogList, FamilyId, FamilySpec,
    ParamsJson, ReplayConfig, Tag,
};
use quadlie::quadratize::{orthogonality_check, quotient_quadratic, type_and_nilindex, verify_quadratic, QuadraticAlgebra, QuadraticJson};

const TAG_HELP: &str = "Replay tags (comma separated) or `all`: T5.2, C5.3, L5.4, T5.5, T5.6, T5.6-relation, C5.7, \
T5.6-remark, T6.1-kernels, T6.2-kernels, T6.1-catalog, T6.2-catalog";

const FAMILY_HELP: &str = "Form family: B21, B22, B23, B24, B25 on n_{2,t}; B31, B32, B33 on n_{3,t}; PHI23, PHI32. \
Parameters default to zero";

#[derive(Parser, Debug)]
#[command(name = "quadlie", version, about = "Invariant forms and quadratic nilpotent Lie algebras, exactly over Q")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for every sampled computation.
    #[arg(long, global = true, env = "QUADLIE_SEED", default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct AlgebraArgs {
    /// Number of generators.
    #[arg(short = 'd')]
    d: usize,
    /// Nilpotency index.
    #[arg(short = 't')]
    t: usize,
}

#[derive(Args, Debug, Clone, Default)]
struct FormSource {
    /// Form file in the `{"algebra": {"d", "t"}, "matrix": ..}` format.
    #[arg(long, conflicts_with = "family")]
    form: Option<PathBuf>,
    #[arg(long, help = FAMILY_HELP)]
    family: Option<String>,
    /// Family parameters: a JSON file or inline JSON such as '{"gamma": 1, "A2": [[1,0],[0,1]]}'.
    #[arg(long, requires = "family")]
    params: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the Hall basis of n_{d,t}.
    Basis(AlgebraArgs),
    /// Graded dimensions of n_{d,t}.
    Dims(AlgebraArgs),
    /// Basis of the space of invariant symmetric forms on n_{d,t}, or check a single form.
    Invforms {
        #[arg(short = 'd')]
        d: Option<usize>,
        #[arg(short = 't')]
        t: Option<usize>,
        #[command(flatten)]
        source: FormSource,
    },
    /// Quotient by the kernel of a form and verify the result.
    Quadratize {
        #[command(flatten)]
        source: FormSource,
        /// Report the congruence class of the family parameters over this field.
        #[arg(long)]
        field: Option<FieldMode>,
    },
    /// Verify a quadratic algebra file, a form file or a family form.
    Verify {
        /// Quadratic algebra JSON or form JSON.
        input: Option<PathBuf>,
        #[command(flatten)]
        source: FormSource,
    },
    /// Replay the classification identities.
    Replay {
        #[arg(long, default_value = "all", help = TAG_HELP)]
        tag: String,
        /// Random parameter points per sampled identity.
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// List classified algebras or show one entry.
    Catalog {
        /// Entry label such as T6.1-iii or T6.2-iv-neg.
        label: Option<String>,
        /// Restrict the listing to algebras classified over C or R.
        #[arg(long)]
        field: Option<FieldMode>,
    },
    /// Act on a form by an automorphism and compare orbit invariants.
    Act {
        #[command(flatten)]
        source: FormSource,
        /// Automorphism file; a seeded random automorphism is used otherwise.
        #[arg(long)]
        automorphism: Option<PathBuf>,
    },
}

struct Output {
    pass: bool,
    json: Value,
    text: String,
}

impl Output {
    fn ok(json: Value, text: String) -> Self {
        Output { pass: true, json, text }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable"));
            } else {
                print!("{}", out.text);
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<Output> {
    match &cli.command {
        Command::Basis(a) => basis(a),
        Command::Dims(a) => dims(a),
        Command::Invforms { d, t, source } => invforms(*d, *t, source),
        Command::Quadratize { source, field } => quadratize(source, *field),
        Command::Verify { input, source } => verify(input.as_ref(), source),
        Command::Replay { tag, samples } => run_replay(tag, *samples, cli.seed),
        Command::Catalog { label, field } => catalog(label.as_deref(), *field),
        Command::Act { source, automorphism } => act(source, automorphism.as_ref(), cli.seed),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn read_file(path: &PathBuf) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn matrix_text(m: &quadlie::exactlin::QMatrix) -> String {
    let mut s = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|x| format!("{x:>4}")).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

/// A form together with the family data it was built from, if any.
struct LoadedForm {
    form: BilinearForm,
    spec: Option<FamilySpec>,
}

fn load_form(src: &FormSource) -> anyhow::Result<LoadedForm> {
    if let Some(path) = &src.form {
        let json: FormJson = serde_json::from_str(&read_file(path)?).with_context(|| format!("parsing {}", path.display()))?;
        return Ok(LoadedForm {
            form: json.load()?,
            spec: None,
        });
    }
    let Some(name) = &src.family else {
        bail!("a form is required: pass --form <file> or --family <id> [--params <json>]");
    };
    let family: FamilyId = name.parse()?;
    let params: ParamsJson = match &src.params {
        None => ParamsJson::default(),
        Some(p) if p.trim_start().starts_with('{') => serde_json::from_str(p).context("parsing inline --params")?,
        Some(p) => {
            let path = PathBuf::from(p);
            serde_json::from_str(&read_file(&path)?).with_context(|| format!("parsing {p}"))?
        }
    };
    let spec = params.into_spec(family)?;
    Ok(LoadedForm {
        form: family_form(&spec)?,
        spec: Some(spec),
    })
}

fn basis(a: &AlgebraArgs) -> anyhow::Result<Output> {
    let alg = FreeNilpotent::new(a.d, a.t)?;
    let mut text = String::new();
    for (i, w) in alg.basis().iter().enumerate() {
        text.push_str(&format!("{:>4}  grade {}  {}\n", i + 1, w.len(), w));
    }
    Ok(Output::ok(to_value(&alg.to_json()), text))
}

fn dims(a: &AlgebraArgs) -> anyhow::Result<Output> {
    let alg = FreeNilpotent::new(a.d, a.t)?;
    let graded = alg.graded_dims();
    let total: usize = graded.iter().sum();
    let witt: Vec<u64> = (1..=a.t as u64).map(|l| witt_dimension(a.d as u64, l)).collect();
    let agree = witt.iter().zip(&graded).all(|(w, g)| *w == *g as u64);
    let list: Vec<String> = graded.iter().map(usize::to_string).collect();
    let mut text = format!("graded dims: {}\ntotal: {total}\n", list.join(" "));
    if !agree {
        text.push_str(&format!("witt formula disagrees: {witt:?}\n"));
    }
    Ok(Output {
        pass: agree,
        json: json!({"d": a.d, "t": a.t, "graded_dims": graded, "total": total, "witt": witt}),
        text,
    })
}

fn invforms(d: Option<usize>, t: Option<usize>, src: &FormSource) -> anyhow::Result<Output> {
    if src.form.is_some() || src.family.is_some() {
        return check_form(&load_form(src)?.form);
    }
    let (Some(d), Some(t)) = (d, t) else {
        bail!("invforms needs -d and -t, or a form via --form/--family");
    };
    let alg = Arc::new(FreeNilpotent::new(d, t)?);
    let space = invariant_form_space(&alg);
    let mut text = format!("dim n_{{{d},{t}}} = {}\ninvariant symmetric forms: {}\n", alg.dim(), space.len());
    for (i, b) in space.iter().enumerate() {
        text.push_str(&format!("\nbasis form {}:\n{}", i + 1, matrix_text(b.matrix())));
    }
    let forms: Vec<Value> = space.iter().map(|b| to_value(&b.to_json())).collect();
    Ok(Output::ok(
        json!({"d": d, "t": t, "dim": alg.dim(), "space_dim": space.len(), "basis": forms}),
        text,
    ))
}

fn check_form(b: &BilinearForm) -> anyhow::Result<Output> {
    let alg = b.algebra();
    if let Some(w) = invariance_witness(alg.table(), b.matrix()) {
        let (i, j, k) = w.triple;
        let text = format!(
            "invariant: FAIL\nwitness: B([e{}, e{}], e{}) = {} but B(e{}, [e{}, e{}]) = {}\n",
            i + 1,
            j + 1,
            k + 1,
            w.lhs,
            i + 1,
            j + 1,
            k + 1,
            w.rhs
        );
        return Ok(Output {
            pass: false,
            json: json!({"invariant": false, "witness": w}),
            text,
        });
    }
    let report = sym0_membership(b)?;
    let text = format!(
        "invariant: PASS\nrank: {}\nkernel dim: {}\nadmissible: {}\n{}",
        b.matrix().rank(),
        report.kernel_dim,
        if report.member { "PASS" } else { "FAIL" },
        report
            .violations
            .iter()
            .map(|v| format!("witness: {}\n", to_value(v)))
            .collect::<String>()
    );
    Ok(Output {
        pass: report.member,
        json: json!({"invariant": true, "rank": b.matrix().rank(), "sym0": report}),
        text,
    })
}

fn scalar_class(x: &Rational, field: FieldMode) -> anyhow::Result<Value> {
    Ok(match field {
        FieldMode::AlgClosedRank => json!({"nonzero": sign(x) != 0}),
        FieldMode::RealSignature => json!({"sign": sign(x)}),
        FieldMode::Rationals => json!({"square_class": square_class_rep(x)?.to_string()}),
    })
}

fn parameter_classes(spec: &FamilySpec, field: FieldMode) -> anyhow::Result<Value> {
    let mut out = serde_json::Map::new();
    out.insert("field".into(), json!(field.letter()));
    if let Some(g) = &spec.scalar {
        out.insert("gamma".into(), scalar_class(g, field)?);
    }
    if let Some(a2) = &spec.a2 {
        out.insert("A2".into(), to_value(&congruence_class(a2, field)?));
    }
    Ok(Value::Object(out))
}

fn quadratic_summary(q: &QuadraticAlgebra) -> anyhow::Result<(bool, Value, String)> {
    let report = verify_quadratic(q);
    let mut text = String::new();
    for c in &report.checks {
        text.push_str(&format!("{:<24} {}\n", c.property, if c.pass { "PASS" } else { "FAIL" }));
        if let Some(w) = &c.witness {
            text.push_str(&format!("  witness: {w}\n"));
        }
    }
    if !report.all_pass() {
        return Ok((false, json!({"checks": report}), text));
    }
    let orth = orthogonality_check(q)?;
    let (ty, nil) = type_and_nilindex(q)?;
    text.push_str(&format!(
        "{:<24} {}\ntype {ty}, nilindex {nil}, dim {}\n",
        "orthogonality",
        if orth.holds { "PASS" } else { "FAIL" },
        q.dim()
    ));
    Ok((
        orth.holds,
        json!({"checks": report, "orthogonality": orth, "type": ty, "nilindex": nil}),
        text,
    ))
}

fn quadratize(src: &FormSource, field: Option<FieldMode>) -> anyhow::Result<Output> {
    let loaded = load_form(src)?;
    let check = check_form(&loaded.form)?;
    if !check.pass {
        return Ok(check);
    }
    let quotient = quotient_quadratic(&loaded.form)?;
    let q = &quotient.algebra;
    let (pass, verification, mut text) = quadratic_summary(q)?;
    let header = format!(
        "quotient of n_{{{},{}}} by a {}-dimensional kernel\nbasis: {}\n",
        loaded.form.algebra().d(),
        loaded.form.algebra().t(),
        quotient.kernel.dim(),
        q.labels().join(" ")
    );
    text.insert_str(0, &header);
    text.push_str(&format!("form:\n{}", matrix_text(q.form())));
    let mut report = json!({"algebra": q.to_json(), "verification": verification});
    if let Some(f) = field {
        let classes = match &loaded.spec {
            Some(spec) => parameter_classes(spec, f)?,
            None => bail!("--field needs a family form (--family)"),
        };
        text.push_str(&format!("parameter classes: {classes}\n"));
        report["parameter_classes"] = classes;
    }
    Ok(Output { pass, json: report, text })
}

fn verify(input: Option<&PathBuf>, src: &FormSource) -> anyhow::Result<Output> {
    let Some(path) = input else {
        return check_form(&load_form(src)?.form);
    };
    let raw = read_file(path)?;
    let value: Value = serde_json::from_str(&raw).with_context(|| format!("parsing {}", path.display()))?;
    if value.get("algebra").is_some() {
        let json: FormJson = serde_json::from_value(value)?;
        return check_form(&json.load()?);
    }
    let json: QuadraticJson = serde_json::from_value(value).context("expected a quadratic algebra or a form")?;
    let q = json.load()?;
    let (pass, report, text) = quadratic_summary(&q)?;
    Ok(Output { pass, json: report, text })
}

fn run_replay(tags: &str, samples: usize, seed: u64) -> anyhow::Result<Output> {
    let tags = Tag::parse_list(tags)?;
    let report = replay(&tags, ReplayConfig { seed, samples });
    let mut text = String::new();
    for th in &report.theorems {
        text.push_str(&format!("{:<14} {}\n", th.tag, if th.pass { "PASS" } else { "FAIL" }));
        for id in &th.identities {
            text.push_str(&format!(
                "  {:<4} {} ({} samples)\n",
                if id.pass { "ok" } else { "FAIL" },
                id.name,
                id.samples
            ));
            if let Some(w) = &id.witness {
                text.push_str(&format!("       witness: {w}\n"));
            }
        }
    }
    text.push_str(&format!("seed {seed}: {}\n", if report.pass { "ALL PASS" } else { "FAILURES" }));
    Ok(Output {
        pass: report.pass,
        json: to_value(&report),
        text,
    })
}

fn catalog(label: Option<&str>, field: Option<FieldMode>) -> anyhow::Result<Output> {
    let Some(label) = label else {
        let lists: &[CatalogList] = match field {
            Some(FieldMode::AlgClosedRank) => &[CatalogList::Closed],
            Some(FieldMode::RealSignature) | None => &[CatalogList::Closed, CatalogList::Real],
            Some(FieldMode::Rationals) => bail!("the catalog classifies over C and R only"),
        };
        let mut rows = Vec::new();
        let mut text = String::new();
        for l in CatalogLabel::all().into_iter().filter(|l| lists.contains(&l.list)) {
            let e = classified_algebra(l)?;
            let (ty, nil) = e.type_nilindex;
            text.push_str(&format!("{:<12} dim {:>2}  type {ty}  nilindex {nil}\n", l.to_string(), e.algebra.dim()));
            rows.push(json!({"label": l.to_string(), "dim": e.algebra.dim(), "type": ty, "nilindex": nil}));
        }
        return Ok(Output::ok(Value::Array(rows), text));
    };
    let l: CatalogLabel = label.parse()?;
    let entry = classified_algebra(l)?;
    let (pass, verification, mut text) = quadratic_summary(&entry.algebra)?;
    let iso = catalog_isomorphism(&entry)?;
    text.insert_str(0, &format!("{l}\nbasis: {}\n", entry.algebra.labels().join(" ")));
    text.push_str(&format!("form:\n{}", matrix_text(entry.algebra.form())));
    text.push_str(&format!(
        "source form on n_{{{},{}}}: quotient isomorphism {}\n",
        entry.source.algebra().d(),
        entry.source.algebra().t(),
        if iso.pass() { "PASS" } else { "FAIL" }
    ));
    Ok(Output {
        pass: pass && iso.pass(),
        json: json!({
            "label": l.to_string(),
            "algebra": entry.algebra.to_json(),
            "verification": verification,
            "source": entry.source.to_json(),
            "isomorphism": iso,
        }),
        text,
    })
}

fn act(src: &FormSource, automorphism: Option<&PathBuf>, seed: u64) -> anyhow::Result<Output> {
    let b = load_form(src)?.form;
    let alg = b.algebra().clone();
    let phi: Endo = match automorphism {
        Some(path) => {
            let json: AutomorphismJson = serde_json::from_str(&read_file(path)?).with_context(|| format!("parsing {}", path.display()))?;
            if (json.d, json.t) != (alg.d(), alg.t()) {
                return Err(anyhow!(
                    "automorphism acts on n_{{{},{}}} but the form lives on n_{{{},{}}}",
                    json.d,
                    json.t,
                    alg.d(),
                    alg.t()
                ));
            }
            let e = json.load()?;
            // Rebuild on the form's algebra so both share one instance.
            Endo::from_matrix(&alg, e.matrix())?
        }
        None => random_automorphism(&alg, &mut ChaCha8Rng::seed_from_u64(seed)),
    };
    let image = act_on_form(&b, &phi)?;
    let before = orbit_invariants(&b);
    let after = orbit_invariants(&image);
    let transport = kernel_transport_holds(&b, &phi)?;
    let pass = before == after && transport;
    let text = format!(
        "invariants before: {}\ninvariants after:  {}\nkernel transport: {}\n{}",
        to_value(&before),
        to_value(&after),
        if transport { "PASS" } else { "FAIL" },
        if pass { "orbit invariants preserved\n" } else { "orbit invariants differ\n" }
    );
    Ok(Output {
        pass,
        json: json!({
            "automorphism": phi.to_json(),
            "before": before,
            "after": after,
            "kernel_transport": transport,
            "image": image.to_json(),
        }),
        text,
    })
}
