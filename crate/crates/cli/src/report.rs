//! Human and machine renderings of each verb's result.

use std::path::Path;

use nildecomp::direct_decomp::{rational_summands, CertNode, NodeKind, Trial, Verification};
use nildecomp::{DecompCertificate, TGroup};
use serde_json::{json, Value};

use crate::{Failure, Format};

fn emit(v: &Value) {
    println!("{}", serde_json::to_string(v).expect("reports serialize"));
}

pub fn example(format: Format, path: &Path, g: &TGroup) {
    match format {
        Format::Human => println!("wrote {} (ambient {}, Hirsch length {})", path.display(), g.ambient_size(), g.hirsch_length()),
        Format::Machine => emit(&json!({
            "written": path.display().to_string(),
            "ambient": g.ambient_size(),
            "hirsch": g.hirsch_length(),
        })),
    }
}

fn verdict(cert: &DecompCertificate) -> &'static str {
    match cert.root.kind {
        NodeKind::Trivial => "trivial group",
        NodeKind::Product => "directly decomposable",
        NodeKind::Abelian | NodeKind::Indecomposable => "directly indecomposable",
    }
}

/// `Z × N9` style summary: `Z` per cyclic factor, `N<h>` per nonabelian one.
fn factor_names(cert: &DecompCertificate) -> Vec<String> {
    cert.leaves()
        .iter()
        .filter_map(|l| match l.kind {
            NodeKind::Abelian => Some(if l.hirsch == 1 { "Z".to_string() } else { format!("Z^{}", l.hirsch) }),
            NodeKind::Indecomposable => Some(format!("N{}", l.hirsch)),
            _ => None,
        })
        .collect()
}

fn outcome_name(t: &Trial) -> String {
    match serde_json::to_value(t.outcome) {
        Ok(Value::String(s)) => s,
        _ => format!("{:?}", t.outcome),
    }
}

fn side(s: &[usize]) -> String {
    format!("{{{}}}", s.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
}

fn walk<'a>(node: &'a CertNode, path: String, out: &mut Vec<(String, &'a Trial)>) {
    for t in &node.trials {
        out.push((path.clone(), t));
    }
    for (i, c) in node.children.iter().enumerate() {
        walk(c, format!("{path}.{i}"), out);
    }
}

pub fn decomposition(format: Format, input: &str, g: &TGroup, cert: &DecompCertificate, path: &Path) {
    let mut trials = Vec::new();
    walk(&cert.root, "root".into(), &mut trials);
    let names = factor_names(cert);
    match format {
        Format::Human => {
            println!("group: {input} (ambient {}, Hirsch length {})", g.ambient_size(), g.hirsch_length());
            println!("verdict: {}", verdict(cert));
            println!("factors: {} ({})", names.len(), names.join(" × "));
            println!("abelian rank: {}", cert.abelian_rank());
            println!("nonabelian Hirsch lengths: {:?}", cert.nonabelian_hirsch());
            println!("certificate: {}", path.display());
            if !trials.is_empty() {
                println!("bipartitions:");
            }
            for (at, t) in &trials {
                let mut line = format!("  {at}: {} | {}: {}", side(&t.side1), side(&t.side2), outcome_name(t));
                if let Some(inv) = &t.invariants {
                    let inv: Vec<String> = inv.iter().map(|x| x.0.to_string()).collect();
                    line.push_str(&format!(" (Smith invariants {})", inv.join(", ")));
                }
                if t.witness.is_some() {
                    line.push_str(" (common central element recorded)");
                }
                println!("{line}");
            }
        }
        Format::Machine => emit(&json!({
            "verdict": verdict(cert),
            "factors": names,
            "leaves": cert.leaves().len(),
            "abelian_rank": cert.abelian_rank(),
            "nonabelian_hirsch": cert.nonabelian_hirsch(),
            "certificate": path.display().to_string(),
            "trials": trials.iter().map(|(at, t)| json!({
                "node": at,
                "side1": t.side1,
                "side2": t.side2,
                "outcome": outcome_name(t),
            })).collect::<Vec<_>>(),
        })),
    }
}

pub fn verification(format: Format, v: &Verification, trace: bool) {
    let failed: Vec<&String> = v.transcript.iter().filter(|l| l.starts_with("FAILED")).collect();
    match format {
        Format::Human => {
            println!("certificate {}", if v.valid { "valid" } else { "rejected" });
            let lines: Vec<&String> = if trace || !v.valid { v.transcript.iter().collect() } else { Vec::new() };
            for l in lines {
                println!("  {l}");
            }
        }
        Format::Machine => emit(&json!({
            "valid": v.valid,
            "checks": v.transcript.len(),
            "failed": failed,
        })),
    }
}

pub fn info(format: Format, input: &str, g: &TGroup) -> Result<(), Failure> {
    let center = g.center();
    let derived = g.derived_subgroup()?;
    let ab = g.abelianization();
    let torsion: Vec<String> = ab.torsion.iter().map(ToString::to_string).collect();
    let fac = rational_summands(g);
    let dims: Vec<usize> = fac.summands.iter().map(|s| s.dim()).collect();
    let class = g.lie().lower_central_series().len() - 1;
    match format {
        Format::Human => {
            println!("group: {input} (ambient {}, {} generators)", g.ambient_size(), g.generators().len());
            println!("Hirsch length: {}", g.hirsch_length());
            println!("nilpotency class: {class}");
            println!("center: Hirsch length {}", center.hirsch_length());
            println!("derived subgroup: Hirsch length {}", derived.hirsch_length());
            println!(
                "abelianization: Z^{}{}",
                ab.free_rank,
                torsion.iter().map(|t| format!(" ⊕ Z/{t}")).collect::<String>()
            );
            let parts: Vec<String> = dims
                .iter()
                .zip(&fac.abelian)
                .map(|(d, a)| if *a { format!("{d} (abelian)") } else { d.to_string() })
                .collect();
            println!("rational summands: {}", parts.join(", "));
        }
        Format::Machine => emit(&json!({
            "ambient": g.ambient_size(),
            "hirsch": g.hirsch_length(),
            "class": class,
            "center_hirsch": center.hirsch_length(),
            "derived_hirsch": derived.hirsch_length(),
            "abelianization": { "free_rank": ab.free_rank, "torsion": torsion },
            "summand_dims": dims,
            "summand_abelian": fac.abelian,
        })),
    }
    Ok(())
}
