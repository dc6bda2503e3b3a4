use std::path::Path;

use serde_json::{json, Value};

use holant::classify::classify_set;
use holant::evaluation::{evaluate, realize_gadget, realize_gadget_brute, EvalOptions, Evaluator};
use holant::formulas::PpsHFormula;
use holant::grids::SignatureGrid;
use holant::numerics::{parse_scalar, principal_arg, scalar_from_json, scalar_to_json, Scalar};
use holant::reductions::{
    csp_brute, csp_to_grid, independent_set_grid, independent_set_poly_brute, rewrite, strip_k, valiant_transform,
    CspInstance, Rule, SimpleGraph,
};
use holant::signatures::{parse_function, signature_to_json, transform_from_json, Signature, DEFAULT_ARITY_CAP};
use holant::suites::{identities, run_suite, SuiteReport, SUITE_NAMES};
use holant::synthesis::{
    binary_from_ghz, binary_from_tractable_pair, express_e, express_m, ghz_from_w, pldu, triangularize,
    unitary_completion, TriangleSide,
};
use holant::{classify::KChoice, HolantError};

use crate::{Backend, Cli, Command, Failure, KArg, RuleArg, SynthKind};

type Out = Result<String, Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    HolantError::Validation(msg.into()).into()
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| HolantError::Parse { pos: e.column(), msg: format!("{}: line {}: {e}", path.display(), e.line()) }.into())
}

/// A JSON literal given inline or as `@path`.
fn literal(arg: &str) -> Result<Value, Failure> {
    match arg.strip_prefix('@') {
        Some(path) => read_json(Path::new(path)),
        None => serde_json::from_str(arg).map_err(|e| HolantError::Parse { pos: e.column(), msg: format!("{arg:?}: {e}") }.into()),
    }
}

fn required<'a>(arg: &'a Option<String>, name: &str) -> Result<&'a str, Failure> {
    arg.as_deref().ok_or_else(|| invalid(format!("--{name} is required")))
}

fn function(arg: &Option<String>, name: &str) -> Result<Signature, Failure> {
    Ok(parse_function(&literal(required(arg, name)?)?)?)
}

/// Parses and validates a grid, printing the full report on failure.
fn load_grid(path: &Path) -> Result<SignatureGrid, Failure> {
    let g = SignatureGrid::from_json(&read_json(path)?)?;
    let report = g.validate();
    if !report.ok {
        return Err(Failure { code: 1, body: json!({"error": "Validation", "report": report.to_json()}) });
    }
    Ok(g)
}

fn with_backend(cli: &Cli, mut g: SignatureGrid) -> SignatureGrid {
    if cli.backend == Backend::Float {
        for v in &mut g.vertices {
            v.sig = v.sig.to_approx();
        }
    }
    g
}

fn options(cli: &Cli) -> EvalOptions {
    EvalOptions { order: cli.order.into(), cap: cli.cap, budget: cli.budget_edges }
}

fn render(cli: &Cli, v: &Value) -> String {
    if cli.pretty {
        serde_json::to_string_pretty(v).expect("json values serialise")
    } else {
        v.to_string()
    }
}

fn value_json(z: &Scalar) -> Value {
    let c = z.to_c64();
    json!({"Z": scalar_to_json(z), "abs": c.norm(), "arg": principal_arg(c)})
}

pub fn run(cli: &Cli) -> Out {
    match &cli.command {
        Command::Eval { grid } => eval(cli, grid),
        Command::Realize { file } => realize(cli, file),
        Command::Classify { functions } => classify(cli, functions),
        Command::Synth { kind, f, g, target, s1, s2, matrix, side, vector } => {
            let out = match kind {
                SynthKind::BinaryFromGhz => binary_from_ghz(&function(f, "f")?, &function(target, "target")?, cli.tol)?.to_json(),
                SynthKind::BinaryFromPair => {
                    binary_from_tractable_pair(&function(f, "f")?, &function(g, "g")?, &function(target, "target")?, cli.tol)?
                        .to_json()
                }
                SynthKind::GhzFromW => ghz_from_w(&function(f, "f")?, &function(s1, "s1")?, &function(s2, "s2")?, cli.tol)?.to_json(),
                SynthKind::ExpressE => {
                    let m = transform_from_json(&literal(required(matrix, "matrix")?)?)?;
                    express_e(&function(f, "f")?, &m, cli.tol)?.to_json()
                }
                SynthKind::ExpressM => express_m(&function(f, "f")?, cli.tol)?.to_json(),
                SynthKind::Pldu => pldu(&transform_from_json(&literal(required(matrix, "matrix")?)?)?)?.to_json(),
                SynthKind::Triangularize => {
                    let side = match side.as_str() {
                        "upper" => TriangleSide::Upper,
                        "lower" => TriangleSide::Lower,
                        other => return Err(invalid(format!("side must be upper or lower, not {other:?}"))),
                    };
                    triangularize(&transform_from_json(&literal(required(matrix, "matrix")?)?)?, side)?.to_json()
                }
                SynthKind::UnitaryCompletion => {
                    let v = literal(required(vector, "vector")?)?;
                    let items = v.as_array().ok_or_else(|| invalid("--vector must be a JSON list"))?;
                    let a = items.iter().map(scalar_from_json).collect::<Result<Vec<_>, _>>()?;
                    signature_to_json(&unitary_completion(&a)?)
                }
            };
            Ok(render(cli, &out))
        }
        Command::ReduceIs { graph, lambda, arity_cap, evaluate: with_z } => {
            let g = SimpleGraph::from_json(&read_json(graph)?)?;
            let l = parse_scalar(lambda)?;
            let grid = independent_set_grid(&g, &l, *arity_cap)?;
            let mut out = json!({"grid": grid.to_json()});
            if *with_z {
                let z = evaluate(&with_backend(cli, grid), Evaluator::Contract, &options(cli), cli.tol)?.value;
                out["value"] = value_json(&z);
                out["brute"] = scalar_to_json(&independent_set_poly_brute(&g, &l)?);
            }
            Ok(render(cli, &out))
        }
        Command::Csp2holant { csp, evaluate: with_z } => {
            let c = CspInstance::from_json(&read_json(csp)?)?;
            let grid = csp_to_grid(&c)?;
            let mut out = json!({"grid": grid.to_json()});
            if *with_z {
                let z = evaluate(&with_backend(cli, grid), Evaluator::Contract, &options(cli), cli.tol)?.value;
                out["value"] = value_json(&z);
                out["brute"] = scalar_to_json(&csp_brute(&c, cli.budget_edges)?);
            }
            Ok(render(cli, &out))
        }
        Command::Transform { grid, matrix, strip_k: k, rewrite: rule } => {
            let g = SignatureGrid::from_json(&read_json(grid)?)?;
            let out = match (matrix, k, rule) {
                (Some(m), None, None) => valiant_transform(&g, &transform_from_json(&literal(m)?)?)?,
                (None, Some(k), None) => strip_k(&g, if *k == KArg::K1 { KChoice::K1 } else { KChoice::K2 })?,
                (None, None, Some(r)) => {
                    let rule = match r {
                        RuleArg::Subdivide => Rule::Subdivide,
                        RuleArg::Unsubdivide => Rule::Unsubdivide,
                        RuleArg::Bipartify => Rule::Bipartify,
                        RuleArg::Forget => Rule::Forget,
                    };
                    rewrite(&g, &rule, cli.tol)?
                }
                _ => return Err(invalid("give exactly one of --matrix, --strip-k, --rewrite")),
            };
            Ok(render(cli, &out.to_json()))
        }
        Command::VerifyIdentities { draws } => suite_output(cli, identities(*draws, cli.seed)),
        Command::Suite { name } => match run_suite(name, cli.seed) {
            Some(r) => suite_output(cli, r),
            None => Err(invalid(format!("unknown suite {name:?}; expected one of {}", SUITE_NAMES.join(", ")))),
        },
    }
}

fn eval(cli: &Cli, path: &Path) -> Out {
    let g = with_backend(cli, load_grid(path)?);
    let choice: Evaluator = cli.force.as_deref().unwrap_or("auto").parse()?;
    let r = evaluate(&g, choice, &options(cli), cli.tol)?;
    if cli.pretty {
        let c = r.value.to_c64();
        return Ok(format!("Z = {}\n|Z| = {}\nArg(Z) = {}\nevaluator = {}", r.value, c.norm(), principal_arg(c), r.evaluator));
    }
    let mut out = value_json(&r.value);
    out["evaluator"] = json!(r.evaluator);
    Ok(out.to_string())
}

fn realize(cli: &Cli, path: &Path) -> Out {
    let v = read_json(path)?;
    let brute = cli.force.as_deref() == Some("brute");
    let f = if v.get("atoms").is_some() {
        let h = PpsHFormula::from_json(&v)?;
        if brute {
            h.eval_brute(cli.budget_edges)?
        } else {
            h.eval_with(&options(cli))?
        }
    } else {
        let g = with_backend(cli, load_grid(path)?);
        if brute {
            realize_gadget_brute(&g, cli.budget_edges)?
        } else {
            realize_gadget(&g, &options(cli))?
        }
    };
    Ok(render(cli, &signature_to_json(&f)))
}

fn classify(cli: &Cli, path: &Path) -> Out {
    let v = read_json(path)?;
    let items = v.as_array().ok_or_else(|| invalid("functions file must hold a JSON list"))?;
    let mut fs = items.iter().map(parse_function).collect::<Result<Vec<_>, _>>()?;
    if cli.backend == Backend::Float {
        fs = fs.iter().map(Signature::to_approx).collect();
    }
    Ok(render(cli, &classify_set(&fs, DEFAULT_ARITY_CAP, cli.tol)?.to_json()))
}

fn suite_output(cli: &Cli, r: SuiteReport) -> Out {
    let text = if cli.pretty {
        let mut lines = vec![format!("suite {}", r.name)];
        for c in &r.cases {
            lines.push(format!(
                "{} {} ({} trials, {} failures, max residual {:.3e})",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.trials,
                c.failures,
                c.max_residual
            ));
        }
        lines.join("\n")
    } else {
        r.to_json().to_string()
    };
    if r.passed() {
        Ok(text)
    } else {
        Err(Failure { code: 4, body: Value::String(text) })
    }
}
