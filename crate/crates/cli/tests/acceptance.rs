//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL
//! line with its running time; the process fails if any criterion does.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use lftransport::lf::Ident;
use lftransport::oracle::{
    sample_permutations, verify_atoms, verify_minimization, verify_transport, verify_variants, AtomBounds, Bounds,
    MinBounds,
};
use lftransport::schema::ContextSchema;
use lftransport::subsumption::{transport_check, SearchConfig, TransportCertificate};
use lftransport_cli::{run, Workspace};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn lft(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("lft".to_string()).chain(args.iter().map(|a| a.to_string()));
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path(name: &str) -> String {
    fixture(name).display().to_string()
}

fn transport_args<'a>(sig: &'a str, schemas: &'a str, from: &'a str, to: &'a str, f: &'a str) -> Vec<&'a str> {
    vec![sig, schemas, "--from", from, "--to", to, "--formula", f, "--var", "G"]
}

fn workspace(sig: &str, schemas: &str) -> Workspace {
    Workspace::load(&fixture(sig), Some(&fixture(schemas))).expect("fixtures load")
}

fn plus_certificate() -> (Workspace, TransportCertificate) {
    let mut ws = workspace("sig_size.elf", "size.schemas");
    let (from, to) = (ws.schema("Cempty").unwrap(), ws.schema("Csize").unwrap());
    let g = Ident::new("G");
    let text = std::fs::read_to_string(fixture("f_plus.lft")).unwrap();
    let f = ws.formula_about("f_plus", &text, &g, &from).unwrap();
    let cert = transport_check(&ws.sig, &ws.rel, &from, &to, &g, &f, SearchConfig::default()).expect("certificate");
    (ws, cert)
}

fn subordination_table() -> Result<(), String> {
    let (code, out, err) = lft(&["subord", &path("sig_size.elf")]);
    let expected = [
        "nat <= nat",
        "nat <= plus",
        "nat <= size",
        "plus <= plus",
        "plus <= size",
        "size <= size",
        "tm <= size",
        "tm <= tm",
    ];
    let got: Vec<&str> = out.lines().collect();
    if code != 0 || got != expected {
        return Err(format!("exit {}, output {:?} {}", code, got, err));
    }
    Ok(())
}

fn plus_transport() -> Result<(), String> {
    let (sig, schemas, f) = (path("sig_size.elf"), path("size.schemas"), path("f_plus.lft"));
    let mut args = vec!["transport"];
    args.extend(transport_args(&sig, &schemas, "Cempty", "Csize", &f));
    let (code, out, err) = lft(&args);
    if code != 0 {
        return Err(format!("exit {}: {}{}", code, out, err));
    }
    for line in ["ce drop x:tm since tm !<= nat, tm !<= plus", "ce drop y:size x (s z) since size !<= nat, size !<= plus"] {
        if !out.contains(line) {
            return Err(format!("certificate lacks `{}`:\n{}", line, out));
        }
    }
    let (_, cert) = plus_certificate();
    let facts = cert.facts();
    for (a, b) in [("tm", "nat"), ("tm", "plus"), ("size", "nat"), ("size", "plus")] {
        if !facts.contains(&(Ident::new(a), Ident::new(b))) {
            return Err(format!("missing fact {} !<= {}", a, b));
        }
    }
    Ok(())
}

fn term_formula_is_refused() -> Result<(), String> {
    let (sig, schemas, f) = (path("sig_size.elf"), path("size.schemas"), path("f_tm.lft"));
    let mut args = vec!["transport"];
    args.extend(transport_args(&sig, &schemas, "Cempty", "Csize", &f));
    let (code, out, err) = lft(&args);
    if code != 1 {
        return Err(format!("exit {}: {}{}", code, out, err));
    }
    if !out.contains("schema subsumption fails") || !out.contains("undroppable x:tm") {
        return Err(format!("failure does not name the binding:\n{}", out));
    }
    Ok(())
}

fn minimization_oracle() -> Result<(), String> {
    let ws = Workspace::load(&fixture("sig_size.elf"), None).unwrap();
    let report = verify_minimization(&ws.sig, &ws.rel, MinBounds { ctx_max: 4, arg_size: 1, term_size_max: 4 });
    if report.passed() {
        Ok(())
    } else {
        Err(report.to_string())
    }
}

fn transport_oracle() -> Result<(), String> {
    let (ws, cert) = plus_certificate();
    let b = Bounds { term_size_max: 2, blocks_max: 3, fresh_nominals: 0 };
    let report = verify_transport(&ws.sig, &ws.rel, &cert, b, Some(b));
    // The empty context and one to three size blocks.
    let enumerated = report.obligations.iter().find(|o| o.name == "target instances enumerated").map(|o| o.checked);
    if enumerated != Some(4) {
        return Err(format!("expected 4 target instances, saw {:?}", enumerated));
    }
    if report.passed() {
        Ok(())
    } else {
        Err(report.to_string())
    }
}

fn atom_oracle() -> Result<(), String> {
    let (ws, cert) = plus_certificate();
    let b = AtomBounds { ctx_max: 3, arg_size: 1, term_size_max: 3 };
    let report = verify_atoms(&ws.sig, &ws.rel, &cert.gamma, &cert.formula, b);
    let compared = report.obligations.iter().find(|o| o.name == "term verdicts agree").map_or(0, |o| o.checked);
    if compared == 0 {
        return Err("no term verdicts were compared".into());
    }
    if report.passed() {
        Ok(())
    } else {
        Err(report.to_string())
    }
}

fn variant_suite() -> Result<(), String> {
    let ws = workspace("sig_stlc.elf", "stlc.schemas");
    let c: Arc<ContextSchema> = ws.schema("Cmix").unwrap();
    let mut names: Vec<Ident> = c.blocks.iter().flat_map(|b| b.blkctx().into_iter().map(|(x, _)| x)).collect();
    names.extend(["u", "v", "w"].map(Ident::new));
    names.sort();
    names.dedup();
    let perms = sample_permutations(&names, 200, 7);
    let report = verify_variants(&ws.sig, &c, &perms, Bounds { term_size_max: 2, blocks_max: 2, fresh_nominals: 0 });
    if report.passed() {
        Ok(())
    } else {
        Err(report.to_string())
    }
}

fn multi_block_subsumption() -> Result<(), String> {
    let (sig, schemas, f) = (path("sig_stlc.elf"), path("stlc.schemas"), path("f_of.lft"));
    let mut fwd = vec!["transport"];
    fwd.extend(transport_args(&sig, &schemas, "Ctwo", "Cwide", &f));
    let (code, out, err) = lft(&fwd);
    if code != 0 {
        return Err(format!("forward exit {}: {}{}", code, out, err));
    }
    if !out.contains("from source block 2") || !out.contains("ce drop w:size x (s z)") {
        return Err(format!("unexpected certificate:\n{}", out));
    }
    let mut back = vec!["subsumes"];
    back.extend(transport_args(&sig, &schemas, "Cwide", "Ctwo", &f));
    let (code, out, err) = lft(&back);
    if code != 1 {
        return Err(format!("reverse exit {}: {}{}", code, out, err));
    }
    Ok(())
}

type Criterion = (&'static str, Duration, fn() -> Result<(), String>);

fn main() {
    let criteria: [Criterion; 8] = [
        ("subordination table", Duration::from_secs(1), subordination_table),
        ("plus lemma transport", Duration::from_secs(1), plus_transport),
        ("term formula refused", Duration::from_secs(1), term_formula_is_refused),
        ("minimization oracle", Duration::from_secs(60), minimization_oracle),
        ("transport witness oracle", Duration::from_secs(60), transport_oracle),
        ("atom preservation oracle", Duration::from_secs(60), atom_oracle),
        ("variant property suite", Duration::from_secs(30), variant_suite),
        ("multi-block subsumption", Duration::from_secs(1), multi_block_subsumption),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let verdict = match result {
            Ok(()) if took <= *limit => Ok(()),
            Ok(()) => Err(format!("took {:.2?}, limit {:.0?}", took, limit)),
            Err(e) => Err(e),
        };
        match verdict {
            Ok(()) => println!("PASS {} {} ({:.2?})", i + 1, name, took),
            Err(e) => {
                failed += 1;
                println!("FAIL {} {} ({:.2?})", i + 1, name, took);
                for line in e.lines() {
                    println!("  {}", line);
                }
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
