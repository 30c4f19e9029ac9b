use crate::syntax::pretty::quote;

use super::value::Value;

/// Renders an integer, float, boolean, string, unit, pair or list the
/// way `show` does. Other values have no textual form.
pub fn show_value(v: &Value) -> Option<String> {
    let mut out = String::new();
    write_value(v, &mut out).then_some(out)
}

pub fn show_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "Infinity".into() } else { "-Infinity".into() };
    }
    let s = format!("{x}");
    if s.contains('.') {
        s
    } else {
        s + ".0"
    }
}

fn write_value(v: &Value, out: &mut String) -> bool {
    match v {
        Value::Int(n) => out.push_str(&n.to_string()),
        Value::Float(x) => out.push_str(&show_float(*x)),
        Value::Bool(b) => out.push_str(if *b { "True" } else { "False" }),
        Value::Str(s) => out.push_str(&quote(s)),
        Value::Unit => out.push_str("()"),
        Value::Pair(p) => {
            out.push('(');
            if !write_value(&p.0, out) {
                return false;
            }
            out.push(',');
            if !write_value(&p.1, out) {
                return false;
            }
            out.push(')');
        }
        Value::List(xs) => {
            out.push('[');
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if !write_value(x, out) {
                    return false;
                }
            }
            out.push(']');
        }
        _ => return false,
    }
    true
}
