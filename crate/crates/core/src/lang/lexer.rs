use super::{LangError, Real};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Num(Real),
    Assign, // :=
    Semi,
    Colon,
    Dot,
    Comma,
    LParen,
    RParen,
    LBrace,
    RBrace,
    AndAnd,
    OrOr,
    Bang,
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Eof,
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const KEYWORDS: &[&str] = &[
    "if", "then", "else", "switch", "skip", "true", "false", "exists", "forall",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// Splits source text into tokens. `#` starts a comment that runs to the end of the line.
pub fn tokenize(src: &str) -> Result<Vec<Spanned>, LangError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let bump = |n: usize, col: &mut usize, i: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            bump(1, &mut col, &mut i);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let tok2 = match two.as_str() {
            ":=" => Some(Tok::Assign),
            "&&" => Some(Tok::AndAnd),
            "||" => Some(Tok::OrOr),
            "<=" => Some(Tok::Le),
            ">=" => Some(Tok::Ge),
            _ => None,
        };
        if let Some(t) = tok2 {
            out.push(Spanned {
                tok: t,
                line: tl,
                col: tc,
            });
            bump(2, &mut col, &mut i);
            continue;
        }
        let tok1 = match c {
            ';' => Some(Tok::Semi),
            ':' => Some(Tok::Colon),
            '.' if !chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) => Some(Tok::Dot),
            ',' => Some(Tok::Comma),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '!' => Some(Tok::Bang),
            '=' => Some(Tok::Eq),
            '<' => Some(Tok::Lt),
            '>' => Some(Tok::Gt),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            _ => None,
        };
        if let Some(t) = tok1 {
            out.push(Spanned {
                tok: t,
                line: tl,
                col: tc,
            });
            bump(1, &mut col, &mut i);
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            let mut seen_exp = false;
            while i < chars.len() {
                let d = chars[i];
                let prev = if i > start { chars[i - 1] } else { ' ' };
                let ok = d.is_ascii_digit()
                    || d == '.'
                    || d == '/'
                    || (!seen_exp && (d == 'e' || d == 'E') && i > start)
                    || ((d == '-' || d == '+') && (prev == 'e' || prev == 'E'));
                if !ok {
                    break;
                }
                if d == 'e' || d == 'E' {
                    seen_exp = true;
                }
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            let r: Real = text
                .parse()
                .map_err(|_| LangError::syntax(tl, tc, format!("malformed number `{text}`")))?;
            out.push(Spanned {
                tok: Tok::Num(r),
                line: tl,
                col: tc,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                i += 1;
            }
            col += i - start;
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: tl,
                col: tc,
            });
            continue;
        }
        return Err(LangError::syntax(
            tl,
            tc,
            format!("unexpected character `{c}`"),
        ));
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

/// All identifier tokens in `src`, in order, keywords excluded.
pub fn identifiers(src: &str) -> Result<Vec<String>, LangError> {
    Ok(tokenize(src)?
        .into_iter()
        .filter_map(|s| match s.tok {
            Tok::Ident(id) if !is_keyword(&id) => Some(id),
            _ => None,
        })
        .collect())
}
