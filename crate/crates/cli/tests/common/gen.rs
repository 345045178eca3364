//! Seeded random source-tree generator for scanner/oracle comparison.
//!
//! Trees are acyclic by construction (a header may only include
//! higher-numbered headers), conditionals are balanced, macro bodies are
//! plain integers, and `#pragma once` is never emitted so the naive
//! interpreter's lack of include-guard optimization cannot matter.

use rand::rngs::StdRng;
use rand::Rng;
use std::fs;
use std::path::Path;

const MACRO_POOL: [&str; 6] = ["ALPHA", "BETA", "GAMMA", "DELTA", "WIDTH", "MODE"];

pub struct GeneratedTree {
    pub headers: Vec<String>,
    pub units: Vec<String>,
}

pub fn generate_tree(root: &Path, rng: &mut StdRng) -> GeneratedTree {
    let header_count = rng.gen_range(3..=6);
    let unit_count = rng.gen_range(2..=4);
    fs::create_dir_all(root.join("inc")).unwrap();
    fs::create_dir_all(root.join("src")).unwrap();

    let headers: Vec<String> = (0..header_count).map(|i| format!("inc/h{i}.h")).collect();
    for (index, rel) in headers.iter().enumerate() {
        let body = render_file(rng, index, &headers, true);
        fs::write(root.join(rel), body).unwrap();
    }
    let units: Vec<String> = (0..unit_count).map(|i| format!("src/u{i}.cpp")).collect();
    for rel in &units {
        let body = render_file(rng, 0, &headers, false);
        fs::write(root.join(rel), body).unwrap();
    }
    GeneratedTree { headers, units }
}

pub fn random_defines(rng: &mut StdRng) -> Vec<(String, String)> {
    let mut defines = Vec::new();
    for name in MACRO_POOL {
        if rng.gen_bool(0.5) {
            defines.push((name.to_string(), rng.gen_range(0..4).to_string()));
        }
    }
    defines
}

fn render_file(rng: &mut StdRng, index: usize, headers: &[String], is_header: bool) -> String {
    let mut lines: Vec<String> = Vec::new();
    let guard = format!("GEN_GUARD_{index}");
    let guarded = is_header && rng.gen_bool(0.7);
    if guarded {
        lines.push(format!("#ifndef {guard}"));
        lines.push(format!("#define {guard}"));
    }
    // Headers may include strictly later headers; units may include any.
    let include_from = if is_header { index + 1 } else { 0 };
    for target in headers.iter().skip(include_from) {
        if rng.gen_bool(0.4) {
            let name = target.strip_prefix("inc/").unwrap();
            if rng.gen_bool(0.5) {
                lines.push(format!("#include <{name}>"));
            } else {
                lines.push(format!("#include \"../inc/{name}\""));
            }
        }
    }
    let blocks = rng.gen_range(1..=3);
    for _ in 0..blocks {
        emit_block(rng, &mut lines, 0);
    }
    lines.push(format!("int tail_{};", rng.gen_range(0..100)));
    if guarded {
        lines.push("#endif".to_owned());
    }
    lines.join("\n") + "\n"
}

fn emit_block(rng: &mut StdRng, lines: &mut Vec<String>, depth: usize) {
    match rng.gen_range(0..6) {
        0 if depth < 2 => {
            lines.push(format!("#if {}", random_expr(rng)));
            emit_body(rng, lines, depth);
            if rng.gen_bool(0.5) {
                lines.push(format!("#elif {}", random_expr(rng)));
                emit_body(rng, lines, depth);
            }
            if rng.gen_bool(0.5) {
                lines.push("#else".to_owned());
                emit_body(rng, lines, depth);
            }
            lines.push("#endif".to_owned());
        }
        1 if depth < 2 => {
            let name = MACRO_POOL[rng.gen_range(0..MACRO_POOL.len())];
            let form = if rng.gen_bool(0.5) { "ifdef" } else { "ifndef" };
            lines.push(format!("#{form} {name}"));
            emit_body(rng, lines, depth);
            lines.push("#endif".to_owned());
        }
        2 => {
            let name = MACRO_POOL[rng.gen_range(0..MACRO_POOL.len())];
            if rng.gen_bool(0.7) {
                lines.push(format!("#define {name} {}", rng.gen_range(0..5)));
            } else {
                lines.push(format!("#undef {name}"));
            }
        }
        3 => {
            lines.push("// generated comment".to_owned());
            lines.push(String::new());
        }
        4 => {
            lines.push("/* multi".to_owned());
            lines.push("   line comment */".to_owned());
        }
        _ => {
            lines.push(format!(
                "int value_{} = {};",
                rng.gen_range(0..100),
                rng.gen_range(0..9)
            ));
        }
    }
}

fn emit_body(rng: &mut StdRng, lines: &mut Vec<String>, depth: usize) {
    let statements = rng.gen_range(1..=2);
    for _ in 0..statements {
        if rng.gen_bool(0.3) && depth < 2 {
            emit_block(rng, lines, depth + 1);
        } else {
            lines.push(format!(
                "  call_{}({});",
                rng.gen_range(0..50),
                rng.gen_range(0..9)
            ));
        }
    }
}

fn random_expr(rng: &mut StdRng) -> String {
    let name = MACRO_POOL[rng.gen_range(0..MACRO_POOL.len())];
    match rng.gen_range(0..6) {
        0 => format!("defined({name})"),
        1 => format!("defined {name}"),
        2 => format!("{name} == {}", rng.gen_range(0..4)),
        3 => format!("{name} + 1 > {}", rng.gen_range(0..4)),
        4 => format!(
            "defined({name}) && {} < {}",
            MACRO_POOL[rng.gen_range(0..MACRO_POOL.len())],
            rng.gen_range(1..4)
        ),
        _ => format!("{name} * 2 >= {}", rng.gen_range(0..6)),
    }
}
