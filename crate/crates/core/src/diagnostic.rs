//! Rendering of error lists for a terminal.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiagOptions {
    pub color: bool,
    /// Zero shows every error.
    pub max_errors: usize,
}

impl Default for DiagOptions {
    fn default() -> Self {
        DiagOptions {
            color: false,
            max_errors: 20,
        }
    }
}

const RED: &str = "\x1b[1;31m";
const BOLD: &str = "\x1b[1m";
const RESET: &str = "\x1b[0m";

/// Renders `file:line:col: error[KIND]: message` lines, one per entry,
/// each terminated by a newline.
pub fn render(lines: &[String], opts: DiagOptions) -> String {
    let shown = if opts.max_errors == 0 {
        lines.len()
    } else {
        lines.len().min(opts.max_errors)
    };
    let mut out = String::new();
    for line in &lines[..shown] {
        if opts.color {
            out.push_str(&colorize(line));
        } else {
            out.push_str(line);
        }
        out.push('\n');
    }
    let hidden = lines.len() - shown;
    if hidden > 0 {
        let noun = if hidden == 1 { "error" } else { "errors" };
        out.push_str(&format!("... {hidden} more {noun} not shown\n"));
    }
    out
}

fn colorize(line: &str) -> String {
    let tag = ["runtime fault[", "error["]
        .iter()
        .filter_map(|t| line.find(t).map(|i| (i, *t)))
        .min_by_key(|(i, _)| *i);
    let Some((start, t)) = tag else {
        return line.to_string();
    };
    let Some(close) = line[start + t.len()..].find(']') else {
        return line.to_string();
    };
    let end = start + t.len() + close + 1;
    format!(
        "{BOLD}{}{RESET}{RED}{}{RESET}{}",
        &line[..start],
        &line[start..end],
        &line[end..]
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncates() {
        let lines: Vec<String> = (0..5).map(|i| format!("f:1:{i}: error[Mismatch]: m")).collect();
        let out = render(&lines, DiagOptions { color: false, max_errors: 2 });
        assert_eq!(out.lines().count(), 3);
        assert!(out.ends_with("... 3 more errors not shown\n"));
    }

    #[test]
    fn plain_text_has_no_escapes() {
        let lines = vec!["f:1:1: error[Mismatch]: m".to_string()];
        assert_eq!(render(&lines, DiagOptions::default()), "f:1:1: error[Mismatch]: m\n");
    }

    #[test]
    fn color_marks_the_kind() {
        let out = colorize("f:1:1: runtime fault[UserFail]: x");
        assert!(out.contains("\x1b[1;31mruntime fault[UserFail]\x1b[0m"));
    }
}
