//! Word literals: space-separated `(support;d0,d1)` tokens, leftmost token
//! first (`b_n`), with an optional `~` prefix selecting the opposite letter.
//!
//! Labels may themselves contain commas or brackets; a token is split at the
//! first `;` and at whichever `,` leaves two known labels.

use super::Word;
use crate::causet::CausalPoset;
use crate::error::{Error, Result};
use crate::simplex::Simplex1;

fn parse_token(p: &CausalPoset, token: &str) -> Result<Simplex1> {
    let (flip, body) = match token.strip_prefix('~') {
        Some(rest) => (true, rest),
        None => (false, token),
    };
    let inner = body
        .strip_prefix('(')
        .and_then(|b| b.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("token `{token}` is not of the form (s;a,b)")))?;
    let (sup, faces) = inner
        .split_once(';')
        .ok_or_else(|| Error::Parse(format!("token `{token}` lacks `;`")))?;
    let support = p.id(sup.trim())?;
    let mut split = None;
    for (i, ch) in faces.char_indices() {
        if ch == ',' {
            let (a, b) = (faces[..i].trim(), faces[i + 1..].trim());
            if let (Some(d0), Some(d1)) = (p.find(a), p.find(b)) {
                if split.replace((d0, d1)).is_some() {
                    return Err(Error::Parse(format!("token `{token}` is ambiguous")));
                }
            }
        }
    }
    let (d0, d1) = split.ok_or_else(|| Error::Parse(format!("token `{token}` has unknown faces")))?;
    let b = Simplex1::new(support, d0, d1);
    if !b.is_valid(p) {
        return Err(Error::InvalidSimplex(format!("faces of `{token}` are not below its support")));
    }
    Ok(if flip { b.opposite() } else { b })
}

pub fn parse_word(p: &CausalPoset, text: &str) -> Result<Word> {
    text.split_whitespace().map(|t| parse_token(p, t)).collect::<Result<Vec<_>>>().map(Word::new)
}

pub fn format_word(p: &CausalPoset, w: &Word) -> String {
    w.letters().iter().map(|b| b.display(p).to_string()).collect::<Vec<_>>().join(" ")
}
