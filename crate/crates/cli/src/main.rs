use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use weilzeta::analytic::{dedekind_zeta_star, l_chi_at_zero, l_chi_derivative_at_zero, l_chi_star, QuadCharacter};
use weilzeta::curves::{CurveModel, ModelKind};
use weilzeta::driver::{
    functoriality_battery, parse_places, special_value_json, value_string, verify, verify_suite, LDatum, Report,
    DEFAULT_TOLERANCE,
};
use weilzeta::error::Error;
use weilzeta::frobenius::FrobModule;
use weilzeta::glued::{glued_catalog, GluedScheme};
use weilzeta::lattice::lemma_trials;
use weilzeta::quadratic::QuadField;

#[derive(Parser)]
#[command(name = "weilzeta", about = "Special values at s = 0 by two independent routes")]
struct Cli {
    /// Print JSON reports instead of text lines.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, default_value_t = 20240601)]
    seed: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Z over Spec O_{K,S}; disc 1 is Q. Places are `p` (all above p) or `p:i`.
    Field {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long, num_args = 0.., value_delimiter = ',')]
        places: Vec<String>,
    },
    /// The order of conductor f in Q(sqrt(D)), three routes.
    Order {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        conductor: u64,
    },
    /// A curve from the catalog (`--name`) or a plane model (`--q`, `--poly`).
    Curve {
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        poly: Option<String>,
        /// Read the polynomial as an affine equation in x, y.
        #[arg(long)]
        affine: bool,
        /// List the catalog names.
        #[arg(long)]
        list: bool,
    },
    /// Skyscraper sheaf at a point of norm N with stalk given as JSON
    /// `{"relations": [[..]], "frobenius": [[..]], "order": k}`.
    PointModule {
        #[arg(long)]
        module: String,
        #[arg(long)]
        norm: u64,
    },
    /// Analytic values: zeta_{K,S}*(0) and L(0, chi_D) or L'(0, chi_D).
    Analytic {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long, num_args = 0.., value_delimiter = ',')]
        s_primes: Vec<u64>,
        /// Only s = 0 is supported.
        #[arg(long, default_value_t = 0.0)]
        at: f64,
    },
    /// Seeded trials of the lattice lemmas.
    CheckAppendix {
        #[arg(long, default_value_t = 500)]
        trials: usize,
    },
    /// The whole catalog, random skyscrapers and the functoriality battery.
    VerifySuite,
}

fn emit_reports(cli: &Cli, reports: &[Report]) -> bool {
    if cli.json {
        let all: Vec<Value> = reports.iter().map(Report::to_json).collect();
        let out = if all.len() == 1 { all[0].clone() } else { Value::Array(all) };
        println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    } else {
        for r in reports {
            println!("{}", r.line());
            if let Some((name, v, m)) = &r.third {
                println!("    {name}: order {} value {} match {m:?}", v.order, value_string(v));
            }
        }
    }
    reports.iter().all(Report::passed)
}

fn curve_scheme(name: Option<&str>, q: Option<u64>, poly: Option<&str>, affine: bool) -> Result<GluedScheme, Error> {
    let catalog = glued_catalog();
    if let Some(name) = name {
        return catalog
            .into_iter()
            .find(|x| x.name == name)
            .ok_or_else(|| Error::Invalid(format!("no catalog curve named {name:?}; try --list")));
    }
    let (Some(q), Some(poly)) = (q, poly) else {
        return Err(Error::Invalid("give --name, or both --q and --poly".into()));
    };
    let model = if affine { CurveModel::affine(q, poly)? } else { CurveModel::projective(q, poly)? };
    // A cataloged gluing of the same model carries its fiber data.
    if let Some(x) = catalog.into_iter().find(|x| x.model.as_ref().is_some_and(|m| m.q == model.q && m.kind == model.kind)) {
        return Ok(x);
    }
    if !model.singular_points()?.is_empty() {
        return Err(Error::Unsupported(
            "singular models need fiber data; only cataloged gluings are supported".into(),
        ));
    }
    match model.kind {
        ModelKind::ProjectivePlane(_) | ModelKind::P1 => GluedScheme::smooth_curve(&format!("{poly} /F{q}"), model, false),
        ModelKind::AffinePlane(_) => Err(Error::Unsupported(
            "affine models outside the catalog: the removed points at infinity are not resolved".into(),
        )),
    }
}

fn run(cli: &Cli) -> Result<bool, Error> {
    match &cli.command {
        Command::Field { disc, places } => {
            let k = QuadField::from_disc(*disc)?;
            let l = LDatum::field(k, parse_places(k, places)?);
            Ok(emit_reports(cli, &[verify(&l, cli.tolerance)]))
        }
        Command::Order { disc, conductor } => {
            let x = GluedScheme::order(*disc, *conductor)?;
            let ch0 = x.ch0()?;
            let units = x.ch0_units()?;
            if !cli.json {
                println!("CH_0 = {}; CH_0(X,1) rank {} torsion {}", ch0.describe(), units.rank, units.torsion);
                for g in &units.generators {
                    println!("    unit {}", g.display);
                }
            }
            Ok(emit_reports(cli, &[verify(&LDatum::glued(x), cli.tolerance)]))
        }
        Command::Curve { name, q, poly, affine, list } => {
            if *list {
                for x in glued_catalog() {
                    if !matches!(x.base, weilzeta::glued::Normalization::Order { .. }) {
                        println!("{}", x.name);
                    }
                }
                return Ok(true);
            }
            let x = curve_scheme(name.as_deref(), *q, poly.as_deref(), *affine)?;
            if let Some(model) = &x.model {
                let zeta = model.zeta()?;
                if cli.json {
                    eprintln!("{}", json!({"model": model.describe(), "zeta": zeta.to_json()}));
                } else {
                    println!("zeta = {zeta}");
                }
            }
            Ok(emit_reports(cli, &[verify(&LDatum::glued(x), cli.tolerance)]))
        }
        Command::PointModule { module, norm } => {
            let m = FrobModule::from_json(module)?;
            Ok(emit_reports(cli, &[verify(&LDatum::skyscraper(m, *norm), cli.tolerance)]))
        }
        Command::Analytic { disc, s_primes, at } => {
            if *at != 0.0 {
                return Err(Error::Unsupported("values away from s = 0".into()));
            }
            let k = QuadField::from_disc(*disc)?;
            let specs: Vec<String> = s_primes.iter().map(u64::to_string).collect();
            let zeta = dedekind_zeta_star(k, &parse_places(k, &specs)?)?;
            let mut out = json!({"field": k.to_string(), "zeta_star": special_value_json(&zeta)});
            if k != QuadField::Rational {
                let chi = QuadCharacter::new(*disc)?;
                out["l_star"] = special_value_json(&l_chi_star(chi, s_primes)?);
                if chi.is_odd() {
                    out["l_at_zero"] = json!(l_chi_at_zero(chi)?.to_string());
                } else {
                    let d = l_chi_derivative_at_zero(chi)?;
                    out["l_derivative_at_zero"] = json!({"float": d.value, "err": d.err});
                }
            }
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out).expect("json"));
            } else {
                println!("zeta_K,S*(0): order {} value {}", zeta.order, value_string(&zeta));
                if let Some(l) = out.get("l_star") {
                    println!("L_S*(0, chi): {l}");
                }
            }
            Ok(true)
        }
        Command::CheckAppendix { trials } => {
            let trials = lemma_trials(*trials, cli.seed);
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&trials).expect("json"));
            } else {
                for t in &trials {
                    println!("{} {} {} {}", if t.pass { "PASS" } else { "FAIL" }, t.lemma, t.inputs_digest, t.value);
                }
            }
            Ok(trials.iter().all(|t| t.pass))
        }
        Command::VerifySuite => {
            let reports = verify_suite(cli.seed, cli.tolerance);
            let ok = emit_reports(cli, &reports);
            let checks = functoriality_battery(cli.seed, cli.tolerance);
            if !cli.json {
                for c in &checks {
                    println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
                }
                let passed = reports.iter().filter(|r| r.passed()).count();
                let checks_passed = checks.iter().filter(|c| c.pass).count();
                println!("{passed}/{} reports, {checks_passed}/{} checks", reports.len(), checks.len());
            }
            Ok(ok && checks.iter().all(|c| c.pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
