use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use serde_json::{json, Value};

use hyperval_core::axioms::{check_hyperfield_axioms, check_valued_axioms, AxiomBudget, AxiomReport};
use hyperval_core::gauss::{p_independent_check, pbasis_assemble, pbasis_expand_t, GaussElem};
use hyperval_core::hyperfield::Hyperfield;
use hyperval_core::morphisms::{
    check_hom, class_to_json, lift_tame, lift_unramified, lift_wild, search_homs, search_isos, HomBudget, HomReport,
    HomSpec, KrasnerF2, Lift, Presented, DEFAULT_UNIT_CAP,
};
use hyperval_core::ramification::{conjugate_difference_m, n_threshold};
use hyperval_core::representatives::{cohen_expand, digit_expand};
use hyperval_core::{FieldDef, FieldModel};
use hyperval_logic::{agreement_harness, eval_val, eval_vhf, generate_corpus, parse_val, parse_vhf, translate, EvalConfig};

use crate::elem::parse_elem;
use crate::{
    preset, CliError, CliResult, Command, Ctx, FieldArgs, GaussCmd, HfCmd, HomCmd, LiftKind, LogicCmd, Output,
    PresetCmd, RadixArg, Side,
};

pub fn dispatch(ctx: &Ctx, cmd: &Command) -> CliResult<Output> {
    match cmd {
        Command::Field(a) => field(ctx, a),
        Command::Hf(c) => hf(ctx, c),
        Command::Expand(a) => {
            let f = load_field(ctx, &a.field)?;
            expand(&f, &a.elem, a.level, a.radix)
        }
        Command::Gauss(c) => gauss(c),
        Command::Bounds(a) => bounds(&load_field(ctx, &a.field)?),
        Command::Hom(c) => hom(ctx, c),
        Command::Logic(c) => logic(ctx, c),
        Command::Preset(c) => {
            if ctx.in_preset {
                return Err(CliError::Domain("presets cannot run presets".into()));
            }
            match c {
                PresetCmd::List { dir } => preset::list(dir.as_deref()),
                PresetCmd::Run { name, dir } => preset::run(ctx, name, dir.as_deref()),
            }
        }
    }
}

fn load_def(ctx: &Ctx, spec: &str) -> CliResult<FieldDef> {
    if let Some(name) = spec.strip_prefix('@') {
        return ctx
            .fields
            .get(name)
            .cloned()
            .ok_or_else(|| CliError::Domain(format!("unknown field @{name}")));
    }
    let text = std::fs::read_to_string(Path::new(spec))
        .map_err(|e| CliError::Domain(format!("cannot read field file {spec:?}: {e}")))?;
    Ok(FieldDef::from_json_str(&text)?)
}

fn load_field(ctx: &Ctx, spec: &str) -> CliResult<Arc<FieldModel>> {
    Ok(Arc::new(FieldModel::new(load_def(ctx, spec)?)?))
}

/// `--n`, else the level named in the field file, else 1.
fn level(f: &FieldModel, n: Option<u32>) -> u32 {
    n.or(f.def().n).unwrap_or(1)
}

fn hyperfield(ctx: &Ctx, spec: &str, n: Option<u32>) -> CliResult<Hyperfield> {
    let f = load_field(ctx, spec)?;
    let n = level(&f, n);
    Ok(Hyperfield::new(f, n)?)
}

fn field(ctx: &Ctx, a: &FieldArgs) -> CliResult<Output> {
    let f = load_field(ctx, &a.field)?;
    let mut doc = json!({ "field": f.def().to_json(), "description": f.describe(), "tame": f.is_tame() });
    let mut text = f.describe();
    if let Some(src) = &a.elem {
        let x = parse_elem(&f, src)?;
        let v = x.valuation()?;
        let residue = match v {
            Some(v) if v >= 0 => Some(f.residue_field().render(&x.residue()?)),
            _ => None,
        };
        doc["elem"] = json!({ "input": src, "value": x.render(), "valuation": v, "residue": residue });
        let _ = write!(text, "\n{src} = {}\nvaluation: {}", x.render(), opt(v));
        if let Some(r) = residue {
            let _ = write!(text, "\nresidue: {r}");
        }
    }
    Ok(Output::new(doc, text))
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "inf".into(), |v| v.to_string())
}

fn axiom_text(title: &str, r: &AxiomReport, out: &mut String) {
    let _ = writeln!(out, "{title} (level {}, window {}, ball type {}):", r.level, r.window, r.ball_type);
    for res in &r.results {
        let status = if res.witness.is_none() { "pass" } else { "FAIL" };
        let _ = write!(out, "  {:<28} {status} ({} instances)", res.axiom, res.checked);
        if let Some(w) = &res.witness {
            let _ = write!(out, " at {w}");
        }
        out.push('\n');
    }
}

fn hf(ctx: &Ctx, c: &HfCmd) -> CliResult<Output> {
    match c {
        HfCmd::Axioms { field, n, window } => {
            let h = hyperfield(ctx, field, *n)?;
            let mut budget = AxiomBudget::default_for(h.level());
            if let Some(w) = window {
                budget.window = *w;
            }
            let a = check_hyperfield_axioms(&h, &budget);
            let b = check_valued_axioms(&h, &budget);
            let ok = a.all_pass() && b.all_pass();
            let mut text = String::new();
            axiom_text("hyperfield axioms", &a, &mut text);
            axiom_text("valued hyperfield axioms", &b, &mut text);
            let _ = write!(text, "all pass: {ok}");
            let doc = json!({ "hyperfield": a, "valued": b, "all_pass": ok });
            Ok(Output { json: doc, text, ok })
        }
        HfCmd::Class { field, n, elem } => {
            let h = hyperfield(ctx, field, *n)?;
            let x = parse_elem(h.field(), elem)?;
            let c = h.class_of_k(&x)?;
            let r = h.render_class(&c);
            let doc = json!({
                "level": h.level(),
                "input": elem,
                "class": class_to_json(&h, &c),
                "render": r,
                "valuation": c.valuation(),
            });
            Ok(Output::new(doc, format!("[{elem}]_{} = {r}", h.level())))
        }
        HfCmd::Add { field, n, a, b } => {
            let h = hyperfield(ctx, field, *n)?;
            let ca = h.class_of_k(&parse_elem(h.field(), a)?)?;
            let cb = h.class_of_k(&parse_elem(h.field(), b)?)?;
            let s = h.multiadd(&ca, &cb);
            let doc = json!({
                "level": h.level(),
                "a": h.render_class(&ca),
                "b": h.render_class(&cb),
                "sum": h.render_ball(&s),
                "contains_zero": s.contains_zero(),
                "radius": s.radius(h.level()),
            });
            let text = format!(
                "[{a}] + [{b}] = {}\ncontains zero: {}\nradius: {}",
                h.render_ball(&s),
                s.contains_zero(),
                opt(s.radius(h.level()))
            );
            Ok(Output::new(doc, text))
        }
        HfCmd::ResidueIso { field } => {
            let h = hyperfield(ctx, field, Some(1))?;
            let k = h.field().residue_field();
            let rows: Vec<(String, String)> =
                h.residue_iso_level1()?.iter().map(|(c, r)| (h.render_class(c), k.render(r))).collect();
            let mut text = format!("H(S) at level 1 has {} elements; [x] -> res(x) is a field isomorphism", rows.len());
            for (c, r) in &rows {
                let _ = write!(text, "\n  {c} -> {r}");
            }
            let doc = json!({
                "size": rows.len(),
                "isomorphism": rows.iter().map(|(c, r)| json!({ "class": c, "residue": r })).collect::<Vec<_>>(),
            });
            Ok(Output::new(doc, text))
        }
    }
}

fn expand(f: &Arc<FieldModel>, src: &str, l: u32, radix: RadixArg) -> CliResult<Output> {
    let a = parse_elem(f, src)?.to_elem()?;
    let d = match radix {
        RadixArg::Pi => digit_expand(&a, l)?,
        RadixArg::P => cohen_expand(&a, l)?,
    };
    let k = f.residue_field();
    let digits: Vec<String> = d.digits.iter().map(|x| k.render(x)).collect();
    let r = match radix {
        RadixArg::Pi => "pi",
        RadixArg::P => "p",
    };
    let doc = json!({ "input": src, "level": l, "radix": r, "digits": digits });
    let terms: Vec<String> = digits.iter().enumerate().map(|(i, x)| format!("[{x}]*{r}^{i}")).collect();
    Ok(Output::new(doc, format!("{src} = {} mod m^{}", terms.join(" + "), l + 1)))
}

fn gauss(c: &GaussCmd) -> CliResult<Output> {
    match c {
        GaussCmd::Expand { p, level, elem } => {
            let a = GaussElem::parse(*p, level + 1, elem)?;
            let d = pbasis_expand_t(&a, *level)?;
            let back = pbasis_assemble(&d)?;
            let ok = back.eq_at_precision(&a);
            let mut doc = d.to_json();
            doc["input"] = json!(elem);
            doc["reassembles"] = json!(ok);
            let mut text = format!("{elem} mod p^{} along the p-basis {{t}}:", level + 1);
            for (i, row) in d.digits.iter().enumerate() {
                let parts: Vec<String> = row.iter().map(GaussElem::render).collect();
                let _ = write!(text, "\n  p^{i}: [{}]", parts.join(", "));
            }
            let _ = write!(text, "\nreassembles: {ok}");
            Ok(Output { json: doc, text, ok })
        }
        GaussCmd::Independent { p, elem, prec } => {
            let b = GaussElem::parse(*p, *prec, elem)?;
            let ind = p_independent_check(&b)?;
            let doc = json!({ "p": p, "input": elem, "p_independent": ind });
            Ok(Output::new(doc, format!("{elem} is {}p-independent", if ind { "" } else { "not " })))
        }
    }
}

fn bounds(f: &Arc<FieldModel>) -> CliResult<Output> {
    let r = n_threshold(f)?;
    let conj = conjugate_difference_m(f)?;
    let consistent = conj.is_none_or(|m| m == r.m_p1);
    let mut doc = serde_json::to_value(&r)?;
    doc["m_conjugates"] = json!(conj.map(|m| m.to_string()));
    doc["consistent"] = json!(consistent);
    let text = format!(
        "{}\nM (p-normalized): {}\nM (pi-normalized): {}\nM from conjugates: {}\nd(e) = {}\n\
         threshold n > e^2*M: {}\nconservative threshold: {}\ntame: {}\nM <= d(e)/e: {}\nM <= d(e)/e^2: {}",
        f.describe(),
        r.m_p1,
        r.m_int,
        conj.map_or_else(|| "n/a".into(), |m| m.to_string()),
        r.d_e,
        r.n_min_paper,
        r.n_min_conservative,
        r.tame,
        r.within_de_over_e,
        r.within_de_over_e2,
    );
    Ok(Output { json: doc, text, ok: consistent })
}

fn hom_text(r: &HomReport, out: &mut String) {
    for c in &r.conditions {
        let status = if c.witness.is_none() { "pass" } else { "FAIL" };
        let _ = write!(out, "  ({}) {:<24} {status} ({} instances)", c.condition, c.name, c.checked);
        if let Some(w) = &c.witness {
            let _ = write!(out, " at {w}");
        }
        out.push('\n');
    }
}

fn presented(f: Arc<FieldModel>, n: u32) -> CliResult<Arc<Presented>> {
    Ok(Arc::new(Presented::from_field(f, n, DEFAULT_UNIT_CAP)?))
}

fn read_spec(path: &Path) -> CliResult<HomSpec<Hyperfield>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Domain(format!("cannot read spec {}: {e}", path.display())))?;
    Ok(HomSpec::from_json(&serde_json::from_str(&text)?, DEFAULT_UNIT_CAP)?)
}

fn lift(spec: &HomSpec<Hyperfield>, kind: LiftKind) -> CliResult<(&'static str, Lift)> {
    let (ek, el) = (spec.src.field().e(), spec.dst.field().e());
    let kind = match kind {
        LiftKind::Auto if ek == 1 && el == 1 => LiftKind::Unramified,
        LiftKind::Auto if spec.src.field().is_tame() => LiftKind::Tame,
        LiftKind::Auto => LiftKind::Wild,
        k => k,
    };
    Ok(match kind {
        LiftKind::Unramified => ("unramified", lift_unramified(spec)?),
        LiftKind::Tame => ("tame", lift_tame(spec)?),
        _ => ("wild", lift_wild(spec)?),
    })
}

/// The embedding {x_image, pi_image} with the lifting statistics alongside.
fn lift_json(kind: &str, l: &Lift) -> Value {
    let mut doc = l.embedding.to_json();
    doc["method"] = json!(kind);
    doc["newton_steps"] = json!(l.newton_steps);
    doc["digit_steps"] = json!(l.digit_steps);
    doc["agreement"] = json!(l.agreement);
    doc
}

fn lift_text(kind: &str, l: &Lift) -> String {
    let e = l.embedding.to_json();
    format!(
        "lift ({kind}): x -> {}, pi -> {}; {} Newton steps, {} digit steps; agrees on {}/{} samples",
        e["x_image"].as_str().unwrap_or_default(),
        e["pi_image"].as_str().unwrap_or_default(),
        l.newton_steps,
        l.digit_steps,
        l.agreement.matched,
        l.agreement.checked
    )
}

fn hom(ctx: &Ctx, c: &HomCmd) -> CliResult<Output> {
    match c {
        HomCmd::Search { src, dst, n, over_p, isos, lift: want_lift } => {
            let a = presented(load_field(ctx, src)?, *n)?;
            let b = presented(load_field(ctx, dst)?, *n)?;
            let found =
                if *isos { search_isos(&a, &b, ctx.threads)? } else { search_homs(&a, &b, *over_p, ctx.threads)? };
            let what = if *isos { "isomorphisms" } else { "homomorphisms" };
            let mut text = format!("{} {what} H_{n}(K) -> H_{n}(L)", found.len());
            let mut ok = true;
            let mut rows = Vec::new();
            for (i, f) in found.iter().enumerate() {
                let mut row = f.to_json();
                let _ = write!(
                    text,
                    "\n#{i}: pi -> {}; generators -> [{}]",
                    b.h.render_class(&f.pi_image),
                    f.unit_images.iter().map(|u| b.h.render_class(u)).collect::<Vec<_>>().join(", ")
                );
                if *want_lift {
                    match lift(f, LiftKind::Auto) {
                        Ok((k, l)) => {
                            ok &= l.agreement.complete();
                            row["lift"] = lift_json(k, &l);
                            let _ = write!(text, "\n    {}", lift_text(k, &l));
                        }
                        Err(e) => {
                            ok = false;
                            row["lift"] = json!({ "error": e.to_string() });
                            let _ = write!(text, "\n    lift failed: {e}");
                        }
                    }
                }
                rows.push(row);
            }
            Ok(Output { json: Value::Array(rows), text, ok })
        }
        HomCmd::Check { spec, window } => {
            let s = read_spec(spec)?;
            let mut budget = HomBudget::default_for(s.src.level());
            if let Some(w) = window {
                budget.window = *w;
            }
            let r = check_hom(&s, &budget)?;
            let mut text = format!("homomorphism conditions (window {}):\n", r.window);
            hom_text(&r, &mut text);
            let _ = write!(text, "all pass: {}", r.all_pass());
            Ok(Output { json: json!({ "report": r, "all_pass": r.all_pass() }), text, ok: r.all_pass() })
        }
        HomCmd::Lift { spec, field, n, kind } => {
            let s = match (spec, field, n) {
                (Some(path), _, _) => read_spec(path)?,
                (None, Some(f), Some(n)) => HomSpec::identity(&presented(load_field(ctx, f)?, *n)?),
                _ => return Err(CliError::Domain("give --spec, or --field with --n".into())),
            };
            let r = check_hom(&s, &HomBudget::default_for(s.src.level()))?;
            if let Some(e) = r.first_violation() {
                return Err(e.into());
            }
            let (k, l) = lift(&s, *kind)?;
            let ok = l.agreement.complete();
            Ok(Output { json: lift_json(k, &l), text: lift_text(k, &l), ok })
        }
        HomCmd::Krasner { field, n } => {
            let src = presented(load_field(ctx, field)?, *n)?;
            let spec = HomSpec {
                unit_images: vec![true; src.group.gens.len()],
                src,
                dst: Arc::new(KrasnerF2),
                pi_image: true,
                over_p: false,
            };
            let r = check_hom(&spec, &HomBudget::default_for(*n))?;
            let mut text = format!("H_{n}(K) -> Krasner hyperfield, every nonzero class to 1:\n");
            hom_text(&r, &mut text);
            let _ = write!(text, "all pass: {}", r.all_pass());
            Ok(Output { json: json!({ "report": r, "all_pass": r.all_pass() }), text, ok: r.all_pass() })
        }
    }
}

fn logic(ctx: &Ctx, c: &LogicCmd) -> CliResult<Output> {
    match c {
        LogicCmd::Translate { p, e, n, sentence } => {
            if !hyperval_core::arith::is_prime(&BigInt::from(*p)) {
                return Err(CliError::Domain(format!("{p} is not prime")));
            }
            if *e == 0 || *n == 0 {
                return Err(CliError::Domain("e and n must be positive".into()));
            }
            let phi = parse_vhf(sentence)?;
            let t = translate(&phi, *e, *n);
            let doc = json!({
                "sentence": phi.to_string(),
                "translation": t.to_string(),
                "positive_existential": phi.is_positive_existential(),
                "existential": t.is_existential(),
            });
            Ok(Output::new(doc, t.to_string()))
        }
        LogicCmd::Eval { model, side, radius, n, sentence, translate: tr, budget } => {
            let h = hyperfield(ctx, model, *n)?;
            let cfg = EvalConfig { radius: *radius, budget: *budget };
            let (shown, result) = match side {
                Side::Vhf => {
                    let phi = parse_vhf(sentence)?;
                    (phi.to_string(), eval_vhf(&phi, &h, &cfg)?.result)
                }
                Side::Val => {
                    let phi = if *tr {
                        let e = u32::try_from(h.field().e()).expect("small ramification index");
                        translate(&parse_vhf(sentence)?, e, h.level())
                    } else {
                        parse_val(sentence)?
                    };
                    (phi.to_string(), eval_val(&phi, &h, &cfg)?.result)
                }
            };
            let text = match &result {
                hyperval_logic::TriBool::True(w) => {
                    let parts: Vec<String> = w.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                    format!("true; witness: {}", parts.join(", "))
                }
                hyperval_logic::TriBool::FalseWithinRadius(v) => format!("false within radius {v}"),
                hyperval_logic::TriBool::Unknown(v) => format!("unknown within radius {v}"),
            };
            let doc = json!({ "sentence": shown, "level": h.level(), "outcome": result.to_json() });
            Ok(Output::new(doc, text))
        }
        LogicCmd::Agree { model, n, radius, count, seed } => {
            let h = hyperfield(ctx, model, *n)?;
            let corpus = generate_corpus(*count, *seed);
            let r = agreement_harness(&corpus, &h, &EvalConfig::new(*radius), ctx.threads)?;
            let ok = r.disagreements() == 0;
            let text = format!(
                "{} sentences at level {} and radius {radius}: {} definite agreements, {} disagreements, \
                 translations existential: {}",
                r.rows.len(),
                h.level(),
                r.definite_agreements(),
                r.disagreements(),
                r.all_existential()
            );
            Ok(Output { json: r.to_json(), text, ok })
        }
    }
}
