//! Text format for algebra, module, and endo-map definitions: a small
//! expression grammar over `d`, `t`, the lambda slots `x0, x1, ...`, and the
//! declared basis names, plus a sectioned file layout. Printing is canonical,
//! so `parse(print(x)) == x`.

use std::fmt;

use conformal_core::algebra::{
    format_combo, zero_vec, ConformalModule, HomConformalAlgebra, PolyVec,
};
use conformal_core::derivations::ExtensionRule;
use conformal_core::poly::{pvar, scalar, slot, MultiPoly, Scalar, DEF_PARAM, PARTIAL};

#[derive(Debug, Clone, PartialEq)]
pub enum DefError {
    Syntax {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    Rank {
        line: usize,
        index: usize,
        rank: usize,
    },
    UndeclaredBasis {
        line: usize,
        name: String,
    },
    Layout {
        line: usize,
        message: String,
    },
}

impl fmt::Display for DefError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DefError::Syntax {
                line,
                col,
                expected,
                found,
            } => write!(
                f,
                "syntax error at line {line}, column {col}: expected {expected}, found {found}"
            ),
            DefError::Rank { line, index, rank } => write!(
                f,
                "index error at line {line}: basis index {index} out of range 1..={rank}"
            ),
            DefError::UndeclaredBasis { line, name } => {
                write!(f, "undeclared basis name `{name}` at line {line}")
            }
            DefError::Layout { line, message } => {
                write!(f, "layout error at line {line}: {message}")
            }
        }
    }
}

impl std::error::Error for DefError {}

/// A parsed definition file: the algebra plus an optional module block.
#[derive(Debug, Clone, PartialEq)]
pub struct DefinitionFile {
    pub algebra: HomConformalAlgebra,
    pub module: Option<ConformalModule>,
}

/// A parsed endo-map file: a table of values per basis element together with
/// the extension rule the map uses.
#[derive(Debug, Clone, PartialEq)]
pub struct EndoFile {
    pub rule: ExtensionRule,
    pub table: Vec<PolyVec>,
}

// ---------------------------------------------------------------------------
// expression lexer / parser

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
        }
    }
}

fn lex(src: &str, line: usize, col_base: usize) -> Result<Vec<(Tok, usize)>, DefError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col_base + i + 1;
        match c {
            ' ' | '\t' => {
                i += 1;
            }
            '+' => {
                out.push((Tok::Plus, col));
                i += 1;
            }
            '-' => {
                out.push((Tok::Minus, col));
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, col));
                i += 1;
            }
            '/' => {
                out.push((Tok::Slash, col));
                i += 1;
            }
            '^' => {
                out.push((Tok::Caret, col));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, col));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let n = text.parse::<i64>().map_err(|_| DefError::Syntax {
                    line,
                    col,
                    expected: "an integer".into(),
                    found: format!("`{text}` (too large)"),
                })?;
                out.push((Tok::Int(n), col));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '.')
                {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            }
            other => {
                return Err(DefError::Syntax {
                    line,
                    col,
                    expected: "an operator, number, or name".into(),
                    found: format!("`{other}`"),
                })
            }
        }
    }
    Ok(out)
}

/// A partially evaluated expression: a scalar polynomial part plus a part
/// that is linear in the basis names.
#[derive(Clone)]
struct Val {
    s: MultiPoly,
    v: PolyVec,
}

impl Val {
    fn scalar_part(s: MultiPoly, rank: usize) -> Val {
        Val {
            s,
            v: zero_vec(rank),
        }
    }

    fn is_pure_scalar(&self) -> bool {
        self.v.iter().all(|p| p.is_zero())
    }
}

struct ExprParser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    end_col: usize,
    basis: &'a [String],
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> Option<&(Tok, usize)> {
        self.toks.get(self.pos)
    }

    fn err(&self, expected: &str) -> DefError {
        match self.peek() {
            Some((t, col)) => DefError::Syntax {
                line: self.line,
                col: *col,
                expected: expected.into(),
                found: t.to_string(),
            },
            None => DefError::Syntax {
                line: self.line,
                col: self.end_col,
                expected: expected.into(),
                found: "end of line".into(),
            },
        }
    }

    fn rank(&self) -> usize {
        self.basis.len()
    }

    fn expr(&mut self) -> Result<Val, DefError> {
        let mut negate = false;
        if let Some((Tok::Minus, _)) = self.peek() {
            self.pos += 1;
            negate = true;
        }
        let mut acc = self.term()?;
        if negate {
            acc.s = acc.s.neg();
            acc.v = acc.v.iter().map(|p| p.neg()).collect();
        }
        while let Some((t, _)) = self.peek() {
            let minus = match t {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            if minus {
                acc.s = acc.s.sub(&rhs.s);
                for (a, b) in acc.v.iter_mut().zip(&rhs.v) {
                    *a = a.sub(b);
                }
            } else {
                acc.s = acc.s.add(&rhs.s);
                for (a, b) in acc.v.iter_mut().zip(&rhs.v) {
                    *a = a.add(b);
                }
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Val, DefError> {
        let mut acc = self.factor()?;
        while let Some((Tok::Star, col)) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = match (acc.is_pure_scalar(), rhs.is_pure_scalar()) {
                (true, _) => Val {
                    s: acc.s.mul(&rhs.s),
                    v: rhs.v.iter().map(|p| acc.s.mul(p)).collect(),
                },
                (false, true) => Val {
                    s: MultiPoly::zero(),
                    v: acc.v.iter().map(|p| p.mul(&rhs.s)).collect(),
                },
                (false, false) => {
                    return Err(DefError::Syntax {
                        line: self.line,
                        col,
                        expected: "at most one factor containing basis names".into(),
                        found: "a product of basis elements".into(),
                    })
                }
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Val, DefError> {
        if let Some((Tok::Minus, _)) = self.peek() {
            self.pos += 1;
            let mut inner = self.factor()?;
            inner.s = inner.s.neg();
            inner.v = inner.v.iter().map(|p| p.neg()).collect();
            return Ok(inner);
        }
        let base = self.atom()?;
        if let Some((Tok::Caret, col)) = self.peek().cloned() {
            self.pos += 1;
            if !base.is_pure_scalar() {
                return Err(DefError::Syntax {
                    line: self.line,
                    col,
                    expected: "a scalar base for `^`".into(),
                    found: "a basis element".into(),
                });
            }
            match self.peek().cloned() {
                Some((Tok::Int(n), _)) if n >= 0 => {
                    self.pos += 1;
                    return Ok(Val::scalar_part(base.s.pow(n as u32), self.rank()));
                }
                _ => return Err(self.err("a nonnegative integer exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Val, DefError> {
        match self.peek().cloned() {
            Some((Tok::Int(n), _)) => {
                self.pos += 1;
                // a rational literal `a/b`
                if let Some((Tok::Slash, _)) = self.peek() {
                    self.pos += 1;
                    match self.peek().cloned() {
                        Some((Tok::Int(d), col)) => {
                            if d == 0 {
                                return Err(DefError::Syntax {
                                    line: self.line,
                                    col,
                                    expected: "a nonzero denominator".into(),
                                    found: "`0`".into(),
                                });
                            }
                            self.pos += 1;
                            let c = Scalar::new(n.into(), d.into());
                            Ok(Val::scalar_part(MultiPoly::constant(c), self.rank()))
                        }
                        _ => Err(self.err("a denominator")),
                    }
                } else {
                    Ok(Val::scalar_part(MultiPoly::constant(scalar(n)), self.rank()))
                }
            }
            Some((Tok::Ident(name), col)) => {
                self.pos += 1;
                if name == "d" {
                    return Ok(Val::scalar_part(pvar(PARTIAL), self.rank()));
                }
                if name == "t" {
                    return Ok(Val::scalar_part(pvar(DEF_PARAM), self.rank()));
                }
                if let Some(num) = name.strip_prefix('x') {
                    if let Ok(i) = num.parse::<u32>() {
                        return Ok(Val::scalar_part(pvar(slot(i)), self.rank()));
                    }
                }
                if let Some(i) = self.basis.iter().position(|b| b == &name) {
                    let mut v = zero_vec(self.rank());
                    v[i] = MultiPoly::one();
                    return Ok(Val {
                        s: MultiPoly::zero(),
                        v,
                    });
                }
                let _ = col;
                Err(DefError::UndeclaredBasis {
                    line: self.line,
                    name,
                })
            }
            Some((Tok::LParen, _)) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some((Tok::RParen, _)) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.err("`)`")),
                }
            }
            _ => Err(self.err("a number, name, or `(`")),
        }
    }
}

fn parse_expr(
    src: &str,
    line: usize,
    col_base: usize,
    basis: &[String],
) -> Result<Val, DefError> {
    let toks = lex(src, line, col_base)?;
    let end_col = col_base + src.len() + 1;
    let mut p = ExprParser {
        toks: &toks,
        pos: 0,
        line,
        end_col,
        basis,
    };
    let val = p.expr()?;
    if p.pos != toks.len() {
        return Err(p.err("end of expression"));
    }
    Ok(val)
}

/// Parse a standalone polynomial expression (no basis names).
pub fn parse_poly(src: &str) -> Result<MultiPoly, DefError> {
    let val = parse_expr(src, 1, 0, &[])?;
    Ok(val.s)
}

// ---------------------------------------------------------------------------
// sectioned files

struct Line<'a> {
    no: usize,
    text: &'a str,
}

fn logical_lines(src: &str) -> Vec<Line<'_>> {
    src.lines()
        .enumerate()
        .filter_map(|(idx, raw)| {
            let text = raw.split('#').next().unwrap_or("").trim_end();
            if text.trim().is_empty() {
                None
            } else {
                Some(Line {
                    no: idx + 1,
                    text,
                })
            }
        })
        .collect()
}

fn split_kv<'a>(line: &Line<'a>) -> Option<(&'a str, &'a str, usize)> {
    let eq = line.text.find('=')?;
    let key = line.text[..eq].trim();
    let value = line.text[eq + 1..].trim();
    let col = eq + 2 + (line.text[eq + 1..].len() - line.text[eq + 1..].trim_start().len());
    Some((key, value, col))
}

struct Entry {
    line: usize,
    indices: Vec<usize>,
    value_src: String,
    value_col: usize,
}

fn parse_entry(line: &Line<'_>, n_indices: usize, rank_per_index: &[usize]) -> Result<Entry, DefError> {
    let arrow = line.text.find("->").ok_or(DefError::Syntax {
        line: line.no,
        col: line.text.len() + 1,
        expected: "`->`".into(),
        found: "end of line".into(),
    })?;
    let head = &line.text[..arrow];
    let mut indices = Vec::new();
    for part in head.split_whitespace() {
        let i: usize = part.parse().map_err(|_| DefError::Syntax {
            line: line.no,
            col: line.text.find(part).unwrap_or(0) + 1,
            expected: "a 1-based basis index".into(),
            found: format!("`{part}`"),
        })?;
        indices.push(i);
    }
    if indices.len() != n_indices {
        return Err(DefError::Syntax {
            line: line.no,
            col: arrow + 1,
            expected: format!("{n_indices} index(es) before `->`"),
            found: format!("{}", indices.len()),
        });
    }
    for (i, &rank) in indices.iter().zip(rank_per_index) {
        if *i == 0 || *i > rank {
            return Err(DefError::Rank {
                line: line.no,
                index: *i,
                rank,
            });
        }
    }
    let value_col = arrow + 2
        + (line.text[arrow + 2..].len() - line.text[arrow + 2..].trim_start().len());
    Ok(Entry {
        line: line.no,
        indices: indices.iter().map(|i| i - 1).collect(),
        value_src: line.text[arrow + 2..].trim().to_string(),
        value_col,
    })
}

fn parse_basis_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Parse a sectioned algebra definition file.
pub fn parse_definition(src: &str) -> Result<DefinitionFile, DefError> {
    let lines = logical_lines(src);
    let mut i = 0;

    let mut name = String::from("unnamed");
    let mut basis: Vec<String> = Vec::new();
    let mut alpha_entries: Vec<Entry> = Vec::new();
    let mut bracket_entries: Vec<Entry> = Vec::new();
    let mut module_basis: Vec<String> = Vec::new();
    let mut beta_entries: Vec<Entry> = Vec::new();
    let mut action_entries: Vec<Entry> = Vec::new();
    let mut saw_algebra = false;
    let mut saw_module = false;

    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        None,
        Algebra,
        Alpha,
        Bracket,
        Module,
        Beta,
        Action,
    }
    let mut section = Section::None;

    while i < lines.len() {
        let line = &lines[i];
        let trimmed = line.text.trim();
        if trimmed.starts_with('[') && trimmed.ends_with(']') {
            section = match &trimmed[1..trimmed.len() - 1] {
                "algebra" => {
                    saw_algebra = true;
                    Section::Algebra
                }
                "alpha" => Section::Alpha,
                "bracket" => Section::Bracket,
                "module" => {
                    saw_module = true;
                    Section::Module
                }
                "beta" => Section::Beta,
                "action" => Section::Action,
                other => {
                    return Err(DefError::Layout {
                        line: line.no,
                        message: format!("unknown section `[{other}]`"),
                    })
                }
            };
            i += 1;
            continue;
        }
        match section {
            Section::None => {
                return Err(DefError::Layout {
                    line: line.no,
                    message: "content before the first section header".into(),
                })
            }
            Section::Algebra => {
                let (key, value, _) = split_kv(line).ok_or(DefError::Layout {
                    line: line.no,
                    message: "expected `key = value`".into(),
                })?;
                match key {
                    "name" => name = value.to_string(),
                    "basis" => basis = parse_basis_list(value),
                    other => {
                        return Err(DefError::Layout {
                            line: line.no,
                            message: format!("unknown key `{other}` in [algebra]"),
                        })
                    }
                }
            }
            Section::Module => {
                let (key, value, _) = split_kv(line).ok_or(DefError::Layout {
                    line: line.no,
                    message: "expected `key = value`".into(),
                })?;
                match key {
                    "basis" => module_basis = parse_basis_list(value),
                    other => {
                        return Err(DefError::Layout {
                            line: line.no,
                            message: format!("unknown key `{other}` in [module]"),
                        })
                    }
                }
            }
            Section::Alpha => {
                let r = basis.len();
                alpha_entries.push(parse_entry(line, 2, &[r, r])?);
            }
            Section::Bracket => {
                let r = basis.len();
                bracket_entries.push(parse_entry(line, 2, &[r, r])?);
            }
            Section::Beta => {
                let mr = module_basis.len();
                beta_entries.push(parse_entry(line, 2, &[mr, mr])?);
            }
            Section::Action => {
                action_entries.push(parse_entry(line, 2, &[basis.len(), module_basis.len()])?);
            }
        }
        i += 1;
    }

    if !saw_algebra {
        return Err(DefError::Layout {
            line: 1,
            message: "missing [algebra] section".into(),
        });
    }
    if basis.is_empty() {
        return Err(DefError::Layout {
            line: 1,
            message: "empty or missing basis declaration".into(),
        });
    }

    let r = basis.len();
    let mut alpha = vec![vec![MultiPoly::zero(); r]; r];
    for e in &alpha_entries {
        let val = parse_expr(&e.value_src, e.line, e.value_col - 1, &[])?;
        alpha[e.indices[0]][e.indices[1]] = val.s;
    }
    let mut bracket = vec![vec![zero_vec(r); r]; r];
    for e in &bracket_entries {
        let val = parse_expr(&e.value_src, e.line, e.value_col - 1, &basis)?;
        if !val.s.is_zero() {
            return Err(DefError::Syntax {
                line: e.line,
                col: e.value_col,
                expected: "a combination of basis elements".into(),
                found: "a bare scalar term".into(),
            });
        }
        bracket[e.indices[0]][e.indices[1]] = val.v;
    }
    let algebra = HomConformalAlgebra {
        name,
        basis,
        bracket,
        alpha,
    };

    let module = if saw_module {
        if module_basis.is_empty() {
            return Err(DefError::Layout {
                line: 1,
                message: "module block without a basis declaration".into(),
            });
        }
        let mr = module_basis.len();
        let mut beta = vec![vec![MultiPoly::zero(); mr]; mr];
        for e in &beta_entries {
            let val = parse_expr(&e.value_src, e.line, e.value_col - 1, &[])?;
            beta[e.indices[0]][e.indices[1]] = val.s;
        }
        let mut act = vec![vec![zero_vec(mr); mr]; r];
        for e in &action_entries {
            let val = parse_expr(&e.value_src, e.line, e.value_col - 1, &module_basis)?;
            if !val.s.is_zero() {
                return Err(DefError::Syntax {
                    line: e.line,
                    col: e.value_col,
                    expected: "a combination of module basis elements".into(),
                    found: "a bare scalar term".into(),
                });
            }
            act[e.indices[0]][e.indices[1]] = val.v;
        }
        Some(ConformalModule {
            basis: module_basis,
            act,
            beta,
        })
    } else {
        None
    };

    Ok(DefinitionFile { algebra, module })
}

/// Parse an endo-map file: an `extension = linear|antilinear` header plus
/// entries `i -> value` over the supplied basis.
pub fn parse_endo(src: &str, basis: &[String]) -> Result<EndoFile, DefError> {
    let lines = logical_lines(src);
    let mut rule: Option<ExtensionRule> = None;
    let mut table = vec![zero_vec(basis.len()); basis.len()];
    for line in &lines {
        if let Some((key, value, col)) = split_kv(line) {
            if key == "extension" {
                rule = Some(match value {
                    "linear" => ExtensionRule::ConformalLinear,
                    "antilinear" => ExtensionRule::CochainAntilinear,
                    other => {
                        return Err(DefError::Syntax {
                            line: line.no,
                            col,
                            expected: "`linear` or `antilinear`".into(),
                            found: format!("`{other}`"),
                        })
                    }
                });
                continue;
            }
        }
        let e = parse_entry(line, 1, &[basis.len()])?;
        let val = parse_expr(&e.value_src, e.line, e.value_col - 1, basis)?;
        if !val.s.is_zero() {
            return Err(DefError::Syntax {
                line: e.line,
                col: e.value_col,
                expected: "a combination of basis elements".into(),
                found: "a bare scalar term".into(),
            });
        }
        table[e.indices[0]] = val.v;
    }
    let rule = rule.ok_or(DefError::Layout {
        line: 1,
        message: "missing `extension = linear|antilinear` header".into(),
    })?;
    Ok(EndoFile { rule, table })
}

// ---------------------------------------------------------------------------
// canonical printing

fn print_matrix_section(out: &mut String, header: &str, mat: &[Vec<MultiPoly>]) {
    out.push_str(&format!("[{header}]\n"));
    for (i, row) in mat.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            if !p.is_zero() {
                out.push_str(&format!("{} {} -> {}\n", i + 1, j + 1, p));
            }
        }
    }
    out.push('\n');
}

fn print_table_section(out: &mut String, header: &str, table: &[Vec<PolyVec>], basis: &[String]) {
    out.push_str(&format!("[{header}]\n"));
    for (i, row) in table.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if v.iter().any(|p| !p.is_zero()) {
                out.push_str(&format!("{} {} -> {}\n", i + 1, j + 1, format_combo(basis, v)));
            }
        }
    }
    out.push('\n');
}

/// Canonical text rendering of a definition file.
pub fn print_definition(def: &DefinitionFile) -> String {
    let a = &def.algebra;
    let mut out = String::new();
    out.push_str("[algebra]\n");
    out.push_str(&format!("name = {}\n", a.name));
    out.push_str(&format!("basis = {}\n\n", a.basis.join(", ")));
    print_matrix_section(&mut out, "alpha", &a.alpha);
    print_table_section(&mut out, "bracket", &a.bracket, &a.basis);
    if let Some(m) = &def.module {
        out.push_str("[module]\n");
        out.push_str(&format!("basis = {}\n\n", m.basis.join(", ")));
        print_matrix_section(&mut out, "beta", &m.beta);
        print_table_section(&mut out, "action", &m.act, &m.basis);
    }
    while out.ends_with("\n\n") {
        out.pop();
    }
    out
}

/// Canonical text rendering of an endo-map file.
pub fn print_endo(endo: &EndoFile, basis: &[String]) -> String {
    let mut out = String::new();
    let rule = match endo.rule {
        ExtensionRule::ConformalLinear => "linear",
        ExtensionRule::CochainAntilinear => "antilinear",
    };
    out.push_str(&format!("extension = {rule}\n"));
    for (i, v) in endo.table.iter().enumerate() {
        if v.iter().any(|p| !p.is_zero()) {
            out.push_str(&format!("{} -> {}\n", i + 1, format_combo(basis, v)));
        }
    }
    out
}
