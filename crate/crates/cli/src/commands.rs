//! One function per verb; each returns the JSON document to emit.

use kv_core::constructions::{combine_solutions, elliptic_solve, GluePlan};
use kv_core::derivation::make_delta_2n;
use kv_core::divergence::{div, j};
use kv_core::expansion::{boundary_word, parse_loop_word, theta_exp};
use kv_core::json::{kind_of, FromJson, ToJson};
use kv_core::kv::krv_basis;
use kv_core::{
    random, solve_kv, Alphabet, Automorphism, KVInstance, KVSolution, LieSeries,
    TangentialDerivation, TensorSeries,
};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::{json, Value};

use crate::{Cli, CliError, Verb};

/// Random trials per property check.
const TRIALS: usize = 10;

pub struct Outcome {
    pub value: Value,
    /// Set when the document was produced but reports a failed check.
    pub failure: Option<String>,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Outcome {
            value,
            failure: None,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn shape(cli: &Cli) -> Result<(usize, usize, u32), CliError> {
    match (cli.g, cli.n, cli.deg) {
        (Some(g), Some(n), Some(d)) => Ok((g, n, d)),
        _ => Err(usage("--g, --n and --deg are required")),
    }
}

fn inputs(cli: &Cli, count: usize) -> Result<Vec<Value>, CliError> {
    if cli.inputs.len() != count {
        return Err(usage(format!(
            "expected {count} --in file(s), got {}",
            cli.inputs.len()
        )));
    }
    cli.inputs
        .iter()
        .map(|p| {
            let text =
                std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))
        })
        .collect()
}

fn wrong_kind(v: &Value, allowed: &str) -> CliError {
    usage(format!(
        "input of kind `{}` where {allowed} was expected",
        kind_of(v).unwrap_or("?")
    ))
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if cli.seed.is_some() && cli.inputs.is_empty() {
        if let Verb::Bch | Verb::Exp | Verb::Log | Verb::Div | Verb::Jcocycle = cli.verb {
            return property_check(cli);
        }
    }
    match &cli.verb {
        Verb::Bch => {
            let v = inputs(cli, 2)?;
            let a = LieSeries::from_json(&v[0])?;
            let b = LieSeries::from_json(&v[1])?;
            Ok(Outcome::ok(a.bch(&b)?.to_json()))
        }
        Verb::Exp => {
            let v = inputs(cli, 1)?.remove(0);
            match kind_of(&v) {
                Some("lie") => Ok(Outcome::ok(LieSeries::from_json(&v)?.exp().to_json())),
                Some("tder") => Ok(Outcome::ok(
                    TangentialDerivation::from_json(&v)?.exp()?.to_json(),
                )),
                _ => Err(wrong_kind(&v, "`lie` or `tder`")),
            }
        }
        Verb::Log => {
            let v = inputs(cli, 1)?.remove(0);
            match kind_of(&v) {
                Some("tensor") => Ok(Outcome::ok(
                    LieSeries::log(&TensorSeries::from_json(&v)?)?.to_json(),
                )),
                Some("taut") => Ok(Outcome::ok(Automorphism::from_json(&v)?.log()?.to_json())),
                _ => Err(wrong_kind(&v, "`tensor` or `taut`")),
            }
        }
        Verb::Div => {
            let u = TangentialDerivation::from_json(&inputs(cli, 1)?[0])?;
            Ok(Outcome::ok(div(&u).to_json()))
        }
        Verb::Jcocycle => {
            let f = Automorphism::from_json(&inputs(cli, 1)?[0])?;
            Ok(Outcome::ok(j(&f)?.to_json()))
        }
        Verb::Instance => {
            let (g, n, d) = shape(cli)?;
            Ok(Outcome::ok(KVInstance::new(g, n, d).to_json()))
        }
        Verb::Solve => {
            let (g, n, d) = shape(cli)?;
            let inst = KVInstance::new(g, n, d);
            Ok(Outcome::ok(
                solve_kv(&inst, cli.strategy, cli.pivot)?.to_json(),
            ))
        }
        Verb::Check => {
            let sol = KVSolution::from_json(&inputs(cli, 1)?[0])?;
            let report = sol.residuals()?;
            let failure = (!report.pass).then(|| {
                format!(
                    "nonzero residuals: KVI in weights {:?}, KVII in weights {:?}",
                    report.kv1_profile.keys().collect::<Vec<_>>(),
                    report.kv2_profile.keys().collect::<Vec<_>>()
                )
            });
            Ok(Outcome {
                value: report.to_json(),
                failure,
            })
        }
        Verb::KrvCheck { delta } => {
            let u = match delta {
                Some(k) => {
                    let d = cli.deg.ok_or_else(|| usage("--deg is required"))?;
                    if k % 2 != 0 {
                        return Err(usage("--delta takes an even index"));
                    }
                    make_delta_2n(Alphabet::new(1, 0), d, k / 2)?
                }
                None => TangentialDerivation::from_json(&inputs(cli, 1)?[0])?,
            };
            let a = u.alphabet();
            let inst = KVInstance::new(a.genus(), a.boundary(), u.cut());
            let report = inst.krv_check(&u)?;
            let failure = (!report.pass).then(|| "not in krv".to_string());
            Ok(Outcome {
                value: report.to_json(),
                failure,
            })
        }
        Verb::KrvBasis { weight } => {
            let (g, n, d) = shape(cli)?;
            let inst = KVInstance::new(g, n, d);
            let basis: Vec<Value> = krv_basis(&inst, *weight)?
                .iter()
                .map(ToJson::to_json)
                .collect();
            Ok(Outcome::ok(json!({
                "basis": basis,
                "instance": { "cut": d, "g": g, "n": n },
                "kind": "krv-basis",
                "weight": weight,
            })))
        }
        Verb::Glue => {
            let v = inputs(cli, 3)?;
            let left = KVSolution::from_json(&v[0])?;
            let right = KVSolution::from_json(&v[1])?;
            let pants = KVSolution::from_json(&v[2])?;
            let plan = GluePlan::new(left.instance.alphabet(), right.instance.alphabet())?;
            let (sol, report) = combine_solutions(&left, &right, &pants, &plan)?;
            eprintln!(
                "λ = {} (critical weight {:?})",
                report.lambda, report.critical_weight
            );
            Ok(Outcome::ok(sol.to_json()))
        }
        Verb::Elliptic => {
            let d = cli.deg.ok_or_else(|| usage("--deg is required"))?;
            let pants = KVSolution::from_json(&inputs(cli, 1)?[0])?;
            let out = elliptic_solve(&pants, d)?;
            eprintln!("λ = {}", out.fit.lambda);
            Ok(Outcome::ok(out.solution.to_json()))
        }
        Verb::Expand { word, log } => {
            let (g, n, d) = shape(cli)?;
            let a = Alphabet::new(g, n);
            let w = match word {
                Some(text) => parse_loop_word(a, text)?,
                None => boundary_word(a),
            };
            let t = theta_exp(a, d, &w);
            if *log {
                Ok(Outcome::ok(LieSeries::log(&t)?.to_json()))
            } else {
                Ok(Outcome::ok(t.to_json()))
            }
        }
        Verb::Torsor => {
            let v = inputs(cli, 2)?;
            let sol = KVSolution::from_json(&v[0])?;
            let g = Automorphism::from_json(&v[1])?;
            Ok(Outcome::ok(sol.torsor_act(&g)?.to_json()))
        }
    }
}

/// Randomized identity checks on seeded inputs.
fn property_check(cli: &Cli) -> Result<Outcome, CliError> {
    let (g, n, d) = shape(cli)?;
    let seed = cli.seed.expect("checked by the caller");
    let a = Alphabet::new(g, n);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for trial in 0..TRIALS {
        let holds = match cli.verb {
            Verb::Bch => {
                let x = random::lie_series(&mut rng, a, d, 1, 6);
                let y = random::lie_series(&mut rng, a, d, 1, 6);
                x.bch(&y)? == LieSeries::log(&(&x.exp() * &y.exp()))?
            }
            Verb::Exp => {
                let u = random::tangential_derivation(&mut rng, a, d, 3);
                u.exp()?.log()? == u
            }
            Verb::Log => {
                let f = random::automorphism(&mut rng, a, d, 3)?;
                let x = random::lie_series(&mut rng, a, d, 1, 6);
                f.log()?.exp()? == f && LieSeries::log(&x.exp())? == x
            }
            Verb::Div => {
                let u = random::tangential_derivation(&mut rng, a, d, 3);
                let v = random::tangential_derivation(&mut rng, a, d, 3);
                div(&u.bracket(&v)?)
                    == u.apply_cyclic(&div(&v))?
                        .try_sub(&v.apply_cyclic(&div(&u))?)?
            }
            Verb::Jcocycle => {
                let f = random::automorphism(&mut rng, a, d, 3)?;
                let h = random::automorphism(&mut rng, a, d, 3)?;
                j(&f.compose(&h)?)? == j(&f)?.try_add(&f.apply_cyclic(&j(&h)?)?)?
            }
            _ => unreachable!("only series verbs have property checks"),
        };
        if !holds {
            failures.push(trial);
        }
    }
    let failure = (!failures.is_empty()).then(|| format!("identity fails in trials {failures:?}"));
    Ok(Outcome {
        value: json!({
            "alphabet": { "g": g, "n": n },
            "cut": d,
            "failures": failures,
            "kind": "property-check",
            "pass": failure.is_none(),
            "seed": seed,
            "trials": TRIALS,
            "verb": cli.verb.name(),
        }),
        failure,
    })
}
