//! Game file formats: the JSON game document and Gambit `.nfg` text.

use std::fmt::Write as _;

use mmr_core::{BimatrixGame, GameError};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("invalid JSON at line {line}, column {column}: {msg}")]
    Json {
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("field `{field}`: {msg}")]
    Field { field: String, msg: String },
    #[error("field `{field}`: row {row} has {found} entries, expected {expected}")]
    Ragged {
        field: &'static str,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("nfg line {line}: {msg}")]
    Nfg { line: usize, msg: String },
    #[error(transparent)]
    Game(#[from] GameError),
}

fn field_err(field: impl Into<String>, msg: impl Into<String>) -> ParseError {
    ParseError::Field {
        field: field.into(),
        msg: msg.into(),
    }
}

/// Parses `{"n": .., "m": .., "R": [[..], ..], "C": [[..], ..]}`.
pub fn parse_game_json(text: &str) -> Result<BimatrixGame, ParseError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| ParseError::Json {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    let obj = doc
        .as_object()
        .ok_or_else(|| field_err("<root>", "expected an object"))?;
    let dim = |name: &'static str| -> Result<usize, ParseError> {
        let v = obj.get(name).ok_or(ParseError::MissingField(name))?;
        v.as_u64()
            .map(|d| d as usize)
            .ok_or_else(|| field_err(name, format!("expected a non-negative integer, got {v}")))
    };
    let n = dim("n")?;
    let m = dim("m")?;
    let row = matrix_field(obj, "R", n, m)?;
    let col = matrix_field(obj, "C", n, m)?;
    Ok(BimatrixGame::from_rows(&row, &col)?)
}

fn matrix_field(
    obj: &serde_json::Map<String, Value>,
    name: &'static str,
    n: usize,
    m: usize,
) -> Result<Vec<Vec<f64>>, ParseError> {
    let rows = obj
        .get(name)
        .ok_or(ParseError::MissingField(name))?
        .as_array()
        .ok_or_else(|| field_err(name, "expected an array of rows"))?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let r = r
            .as_array()
            .ok_or_else(|| field_err(name, format!("row {i} is not an array")))?;
        let width = out.first().map_or(r.len(), |first: &Vec<f64>| first.len());
        if r.len() != width {
            return Err(ParseError::Ragged {
                field: name,
                row: i,
                expected: width,
                found: r.len(),
            });
        }
        let vals = r
            .iter()
            .enumerate()
            .map(|(j, v)| {
                v.as_f64()
                    .ok_or_else(|| field_err(name, format!("entry [{i}][{j}] is not a number")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(vals);
    }
    if out.len() != n {
        return Err(field_err(name, format!("has {} rows but n = {n}", out.len())));
    }
    if let Some(first) = out.first() {
        if first.len() != m {
            return Err(field_err(
                name,
                format!("has {} columns but m = {m}", first.len()),
            ));
        }
    }
    Ok(out)
}

/// Emits the JSON game document, one matrix row per line.
///
/// Numbers use the shortest representation that parses back to the same
/// double, so `parse_game_json(&emit_game_json(g))` reproduces `g` exactly.
pub fn emit_game_json(g: &BimatrixGame) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{{\n  \"n\": {},\n  \"m\": {},", g.n(), g.m());
    for (key, mat, last) in [("R", g.row_matrix(), false), ("C", g.col_matrix(), true)] {
        let _ = writeln!(s, "  \"{key}\": [");
        for i in 0..mat.rows() {
            let row: Vec<String> = mat.row(i).iter().map(|v| json_number(*v)).collect();
            let sep = if i + 1 < mat.rows() { "," } else { "" };
            let _ = writeln!(s, "    [{}]{sep}", row.join(", "));
        }
        let _ = writeln!(s, "  ]{}", if last { "" } else { "," });
    }
    s.push_str("}\n");
    s
}

fn json_number(v: f64) -> String {
    serde_json::Number::from_f64(v)
        .map(|n| n.to_string())
        .unwrap_or_else(|| "null".into())
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Str(String),
    Open,
    Close,
    Word(String),
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\n' => line += 1,
            c if c.is_whitespace() || c == ',' => {}
            '{' => out.push((Token::Open, line)),
            '}' => out.push((Token::Close, line)),
            '"' => {
                let start = line;
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('\\') => {
                            if let Some(e) = chars.next() {
                                s.push(e);
                            }
                        }
                        Some('"') => break,
                        Some(ch) => {
                            if ch == '\n' {
                                line += 1;
                            }
                            s.push(ch);
                        }
                        None => {
                            return Err(ParseError::Nfg {
                                line: start,
                                msg: "unterminated string".into(),
                            })
                        }
                    }
                }
                out.push((Token::Str(s), start));
            }
            c => {
                let mut w = String::from(c);
                while let Some(&p) = chars.peek() {
                    if p.is_whitespace() || matches!(p, '{' | '}' | '"' | ',') {
                        break;
                    }
                    w.push(p);
                    chars.next();
                }
                out.push((Token::Word(w), line));
            }
        }
    }
    Ok(out)
}

struct Cursor {
    toks: Vec<(Token, usize)>,
    pos: usize,
}

impl Cursor {
    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map_or(1, |t| t.1)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Nfg {
            line: self.line(),
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), ParseError> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            _ => {
                self.pos -= 1;
                Err(self.err(format!("expected {what}")))
            }
        }
    }

    fn word(&mut self, what: &str) -> Result<String, ParseError> {
        match self.next() {
            Some(Token::Word(w)) => Ok(w),
            _ => {
                self.pos -= 1;
                Err(self.err(format!("expected {what}")))
            }
        }
    }

    fn strings_in_braces(&mut self, what: &str) -> Result<Vec<String>, ParseError> {
        self.expect(Token::Open, &format!("`{{` opening {what}"))?;
        let mut out = Vec::new();
        loop {
            match self.next() {
                Some(Token::Str(s)) => out.push(s),
                Some(Token::Close) => return Ok(out),
                _ => {
                    self.pos -= 1;
                    return Err(self.err(format!("malformed {what}")));
                }
            }
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let w = self.word("a number")?;
        parse_number(&w).ok_or_else(|| {
            self.pos -= 1;
            self.err(format!("`{w}` is not a number"))
        })
    }
}

/// Decimal, exponent or `p/q` rational literal.
fn parse_number(w: &str) -> Option<f64> {
    if let Some((p, q)) = w.split_once('/') {
        let p: f64 = p.parse().ok()?;
        let q: f64 = q.parse().ok()?;
        return (q != 0.0).then(|| p / q);
    }
    w.parse().ok().filter(|v: &f64| v.is_finite())
}

/// Parses a two-player Gambit strategic-form file.
///
/// Both body layouts are accepted: a flat payoff list (row then column
/// payoff per outcome) and an outcome table followed by outcome indices.
/// Outcomes are ordered with the row player's strategy varying fastest.
pub fn parse_nfg(text: &str) -> Result<BimatrixGame, ParseError> {
    let mut cur = Cursor {
        toks: tokenize(text)?,
        pos: 0,
    };
    if cur.word("`NFG` header")? != "NFG" {
        cur.pos -= 1;
        return Err(cur.err("file must start with `NFG 1 R`"));
    }
    let version = cur.word("format version")?;
    let kind = cur.word("number type")?;
    if version != "1" || !(kind == "R" || kind == "D") {
        cur.pos -= 1;
        return Err(cur.err(format!("unsupported header `NFG {version} {kind}`, expected `NFG 1 R`")));
    }
    match cur.next() {
        Some(Token::Str(_)) => {}
        _ => {
            cur.pos -= 1;
            return Err(cur.err("expected a quoted game title"));
        }
    }
    let players = cur.strings_in_braces("player list")?;
    if players.len() != 2 {
        cur.pos -= 1;
        return Err(cur.err(format!("two players required, found {}", players.len())));
    }

    cur.expect(Token::Open, "strategy block")?;
    let (n, m) = if cur.peek() == Some(&Token::Open) {
        let a = cur.strings_in_braces("strategy names")?.len();
        let b = cur.strings_in_braces("strategy names")?.len();
        (a, b)
    } else {
        let a = cur.word("strategy count")?;
        let b = cur.word("strategy count")?;
        let parse = |w: &str| w.parse::<usize>().ok().filter(|v| *v > 0);
        match (parse(&a), parse(&b)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(cur.err(format!("invalid strategy counts `{a} {b}`"))),
        }
    };
    cur.expect(Token::Close, "`}` closing strategy block")?;
    if let Some(Token::Str(_)) = cur.peek() {
        cur.next();
    }

    let outcomes = n * m;
    let mut row = vec![vec![0.0; m]; n];
    let mut col = vec![vec![0.0; m]; n];
    let mut assign = |k: usize, r: f64, c: f64| {
        row[k % n][k / n] = r;
        col[k % n][k / n] = c;
    };

    if cur.peek() == Some(&Token::Open) {
        cur.next();
        let mut table = Vec::new();
        while cur.peek() == Some(&Token::Open) {
            cur.next();
            if let Some(Token::Str(_)) = cur.peek() {
                cur.next();
            }
            let r = cur.number()?;
            let c = cur.number()?;
            cur.expect(Token::Close, "`}` closing outcome")?;
            table.push((r, c));
        }
        cur.expect(Token::Close, "`}` closing outcome table")?;
        for k in 0..outcomes {
            if cur.peek().is_none() {
                return Err(cur.err(format!(
                    "outcome list has {k} entries, expected {outcomes}"
                )));
            }
            let w = cur.word("outcome index")?;
            let idx: usize = w
                .parse()
                .map_err(|_| cur.err(format!("`{w}` is not an outcome index")))?;
            match idx {
                0 => assign(k, 0.0, 0.0),
                i if i <= table.len() => assign(k, table[i - 1].0, table[i - 1].1),
                i => return Err(cur.err(format!("outcome {i} is not defined"))),
            }
        }
    } else {
        let mut vals = Vec::with_capacity(2 * outcomes);
        while cur.peek().is_some() {
            vals.push(cur.number()?);
        }
        if vals.len() != 2 * outcomes {
            return Err(cur.err(format!(
                "payoff list has {} entries, expected {} for a {n}x{m} game",
                vals.len(),
                2 * outcomes
            )));
        }
        for k in 0..outcomes {
            assign(k, vals[2 * k], vals[2 * k + 1]);
        }
    }
    if cur.peek().is_some() {
        return Err(cur.err("unexpected trailing input"));
    }
    Ok(BimatrixGame::from_rows(&row, &col)?)
}

/// Emits the flat payoff-list layout accepted by [`parse_nfg`] and Gambit.
pub fn emit_nfg(g: &BimatrixGame, title: &str) -> String {
    let mut s = format!(
        "NFG 1 R \"{}\" {{ \"Row\" \"Column\" }} {{ {} {} }}\n\n",
        title.replace('"', "\\\""),
        g.n(),
        g.m()
    );
    let (r, c) = (g.row_matrix(), g.col_matrix());
    let mut vals = Vec::with_capacity(2 * g.n() * g.m());
    for j in 0..g.m() {
        for i in 0..g.n() {
            vals.push(format!("{} {}", r[(i, j)], c[(i, j)]));
        }
    }
    s.push_str(&vals.join(" "));
    s.push('\n');
    s
}

/// Dispatches on content: text starting with `NFG` is Gambit, anything else
/// is treated as a JSON game document.
pub fn parse_game(text: &str) -> Result<BimatrixGame, ParseError> {
    if text.trim_start().starts_with("NFG") {
        parse_nfg(text)
    } else {
        parse_game_json(text)
    }
}
