//! Deterministic pretty-printer. Two-space indent, one statement per line,
//! braces on their own lines. Rendered text parses back to the same tree.

use super::ast::*;

pub fn render_program(program: &Program) -> String {
    let mut out = String::new();
    for class in &program.classes {
        out.push_str(&format!("class {}\n{{\n", class.name));
        for method in &class.methods {
            let params: Vec<String> = method
                .params
                .iter()
                .map(|p| format!("{} {}", p.ty, p.name))
                .collect();
            out.push_str(&format!(
                "  {} {}({})\n  {{\n",
                method.return_type,
                method.name,
                params.join(", ")
            ));
            render_into(&mut out, &method.body, 2);
            out.push_str("  }\n");
        }
        out.push_str("}\n");
    }
    out
}

pub fn render_statements(stmts: &[Statement], indent: usize) -> String {
    let mut out = String::new();
    render_into(&mut out, stmts, indent);
    out
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

fn render_into(out: &mut String, stmts: &[Statement], indent: usize) {
    for stmt in stmts {
        match stmt {
            Statement::VarDecl { name, init } => {
                pad(out, indent);
                out.push_str(&format!("var {} = {};\n", name, render_expr(init)));
            }
            Statement::Assign { target, value } => {
                pad(out, indent);
                out.push_str(&format!(
                    "{} = {};\n",
                    render_expr(target),
                    render_expr(value)
                ));
            }
            Statement::Expr(e) => {
                pad(out, indent);
                out.push_str(&render_expr(e));
                out.push_str(";\n");
            }
            Statement::If {
                cond,
                then_block,
                else_block,
            } => {
                pad(out, indent);
                out.push_str(&format!("if ({})\n", render_expr(cond)));
                pad(out, indent);
                out.push_str("{\n");
                render_into(out, then_block, indent + 1);
                pad(out, indent);
                out.push_str("}\n");
                if !else_block.is_empty() {
                    pad(out, indent);
                    out.push_str("else\n");
                    pad(out, indent);
                    out.push_str("{\n");
                    render_into(out, else_block, indent + 1);
                    pad(out, indent);
                    out.push_str("}\n");
                }
            }
            Statement::While { cond, body } => {
                pad(out, indent);
                out.push_str(&format!("while ({})\n", render_expr(cond)));
                pad(out, indent);
                out.push_str("{\n");
                render_into(out, body, indent + 1);
                pad(out, indent);
                out.push_str("}\n");
            }
            Statement::Return(value) => {
                pad(out, indent);
                match value {
                    Some(e) => out.push_str(&format!("return {};\n", render_expr(e))),
                    None => out.push_str("return;\n"),
                }
            }
            Statement::Comment(text) => {
                pad(out, indent);
                out.push_str(&format!("// {text}\n"));
            }
        }
    }
}

pub fn render_expr(expr: &Expr) -> String {
    match &expr.kind {
        ExprKind::Literal(lit) => render_literal(lit),
        ExprKind::Var(name) => name.clone(),
        ExprKind::FieldGet { receiver, field } => {
            format!("{}.{}", render_expr(receiver), field)
        }
        ExprKind::Call {
            receiver,
            method,
            args,
        } => {
            let rendered: Vec<String> = args.iter().map(render_expr).collect();
            format!(
                "{}.{}({})",
                render_expr(receiver),
                method,
                rendered.join(", ")
            )
        }
        ExprKind::New { type_name, args } => {
            let rendered: Vec<String> = args.iter().map(render_expr).collect();
            format!("new {}({})", type_name, rendered.join(", "))
        }
        ExprKind::Eq { left, right } => {
            format!("{} == {}", render_expr(left), render_expr(right))
        }
    }
}

fn render_literal(lit: &Literal) -> String {
    match lit {
        Literal::Int(n) => n.to_string(),
        Literal::Bool(b) => b.to_string(),
        Literal::Str(s) => {
            let mut out = String::from("\"");
            for c in s.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\t' => out.push_str("\\t"),
                    c => out.push(c),
                }
            }
            out.push('"');
            out
        }
        Literal::Null => "null".to_string(),
        Literal::Default(ty) => format!("default({ty})"),
    }
}
