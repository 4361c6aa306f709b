use num_complex::Complex64;

use super::ast::{Decl, KetPovm, ProtocolAst, SeparateBy, Step};

/// Shortest decimal that parses back to the same `f64`.
pub fn render_number(x: f64) -> String {
    format!("{x}")
}

pub fn render_complex(z: Complex64) -> String {
    if z.im == 0.0 && !z.im.is_sign_negative() {
        render_number(z.re)
    } else if z.im.is_sign_negative() {
        format!("{}-{}i", render_number(z.re), render_number(-z.im))
    } else {
        format!("{}+{}i", render_number(z.re), render_number(z.im))
    }
}

fn list(values: &[Complex64]) -> String {
    let items: Vec<String> = values.iter().map(|z| render_complex(*z)).collect();
    format!("[{}]", items.join(", "))
}

fn arrows(rows: &[(String, String)]) -> String {
    let items: Vec<String> = rows.iter().map(|(a, b)| format!("{a} -> {b}")).collect();
    format!("{{ {} }}", items.join(", "))
}

fn povm(p: &KetPovm) -> String {
    let mut s = format!("povm {{ {} }}", p.kets.join(", "));
    if let Some(obs) = &p.lift {
        s.push_str(" lift ");
        s.push_str(obs);
    }
    s
}

fn decl(d: &Decl) -> String {
    match d {
        Decl::Space { name, dim } => format!("space {name} dim {dim}"),
        Decl::Temp(t) => format!("temp {}", render_number(*t)),
        Decl::Ket { name, amplitudes } => format!("ket {name} = {}", list(amplitudes)),
        Decl::GasFromKet { name, ket } => format!("gas {name} from ket {ket}"),
        Decl::GasMatrix { name, rows } => {
            let rows: Vec<String> = rows.iter().map(|r| list(r)).collect();
            format!("gas {name} matrix [{}]", rows.join(", "))
        }
        Decl::Observer { name, table, dim } => {
            format!("observer {name} table {} dim {dim}", arrows(table))
        }
        Decl::Chamber { name, volume } => format!("chamber {name} volume {}", render_number(*volume)),
        Decl::Fill { chamber, parts, moles } => {
            let items: Vec<String> = parts
                .iter()
                .map(|(g, w)| format!("{g}: {}", render_number(*w)))
                .collect();
            format!("fill {chamber} {{ {} }} moles {}", items.join(", "), render_number(*moles))
        }
    }
}

fn step(s: &Step) -> String {
    match s {
        Step::Mix { a, b, into, povm: p } => format!("mix {a} {b} into {into} by {}", povm(p)),
        Step::Separate { chamber, by, into } => {
            let by = match by {
                SeparateBy::Eigenbasis => "eigenbasis".to_string(),
                SeparateBy::Povm(p) => povm(p),
            };
            format!("separate {chamber} by {by} into {}", into.join(" "))
        }
        Step::Rotate { chamber, map } => format!("rotate {chamber} map {}", arrows(map)),
        Step::Partition {
            chamber,
            fraction,
            into: [x, y],
        } => format!("partition {chamber} at {} into {x} {y}", render_number(*fraction)),
        Step::Join { a, b, into } => format!("join {a} {b} into {into}"),
        Step::Checkpoint(label) => format!("checkpoint {label}"),
        Step::AssertClosed { observer, checkpoint } => format!("assert-closed {observer} from {checkpoint}"),
        Step::Audit { observer, checkpoint } => format!("audit {observer} from {checkpoint}"),
    }
}

/// Canonical text for `ast`: one declaration per line, a blank line, then
/// one step per line.
pub fn render(ast: &ProtocolAst) -> String {
    let mut out = String::new();
    for d in &ast.declarations {
        out.push_str(&decl(&d.node));
        out.push('\n');
    }
    if !ast.steps.is_empty() {
        out.push('\n');
        for s in &ast.steps {
            out.push_str(&step(&s.node));
            out.push('\n');
        }
    }
    out
}
