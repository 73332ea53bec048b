use super::{is_name_char, is_name_start, ParseError, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Record,
    Data,
    Field,
    Where,
    Constructor,
    Set,
    Colon,
    Arrow,
    EqEq,
    Equals,
    Comma,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("name `{s}`"),
            Tok::Record => "`record`".into(),
            Tok::Data => "`data`".into(),
            Tok::Field => "`field`".into(),
            Tok::Where => "`where`".into(),
            Tok::Constructor => "`constructor`".into(),
            Tok::Set => "`Set`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`→`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "record" => Tok::Record,
        "data" => Tok::Data,
        "field" => Tok::Field,
        "where" => Tok::Where,
        "constructor" => Tok::Constructor,
        "Set" => Tok::Set,
        _ => return None,
    })
}

/// Splits `source` into tokens. `--` starts a comment that runs to end of line.
pub(crate) fn lex(source: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos::new(line, col);
        let next = chars.get(i + 1).copied();

        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' && next == Some('-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }

        let (tok, width) = match c {
            '→' => (Tok::Arrow, 1),
            '-' if next == Some('>') => (Tok::Arrow, 2),
            '=' if next == Some('=') => (Tok::EqEq, 2),
            '=' => (Tok::Equals, 1),
            ':' => (Tok::Colon, 1),
            ',' => (Tok::Comma, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            c if is_name_start(c) => {
                let start = i;
                let mut j = i + 1;
                while j < chars.len() && is_name_char(chars[j]) {
                    // `-` cannot begin a comment or an ASCII arrow inside a name
                    if chars[j] == '-' && matches!(chars.get(j + 1), Some('-') | Some('>')) {
                        break;
                    }
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                let tok = keyword(&word).unwrap_or(Tok::Ident(word));
                (tok, j - start)
            }
            other => {
                return Err(ParseError {
                    pos,
                    expected: vec![],
                    found: format!("unexpected character `{other}`"),
                })
            }
        };
        tokens.push(Token { tok, pos });
        i += width;
        col += width as u32;
    }

    tokens.push(Token {
        tok: Tok::Eof,
        pos: Pos::new(line, col),
    });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn ascii_and_unicode_arrows_lex_alike() {
        assert_eq!(toks("A → A"), toks("A -> A"));
        assert_eq!(toks("A->A"), toks("A → A"));
    }

    #[test]
    fn dashes_inside_names() {
        assert_eq!(
            toks("pres-op : x -- trailing comment"),
            vec![
                Tok::Ident("pres-op".into()),
                Tok::Colon,
                Tok::Ident("x".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions_track_lines_and_columns() {
        let ts = lex("record M\n  : Set").unwrap();
        assert_eq!((ts[0].pos.line, ts[0].pos.col), (1, 1));
        assert_eq!((ts[1].pos.line, ts[1].pos.col), (1, 8));
        assert_eq!((ts[2].pos.line, ts[2].pos.col), (2, 3));
        assert_eq!((ts[3].pos.line, ts[3].pos.col), (2, 5));
    }

    #[test]
    fn stray_character_is_an_error_with_position() {
        let err = lex("record M\n  ; Set").unwrap_err();
        assert_eq!((err.pos.line, err.pos.col), (2, 3));
    }
}
